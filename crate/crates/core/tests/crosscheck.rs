//! Independent cross-checks between disjoint computation routes.
//!
//! The constant-prime residue of pi^n g/h^r dT is computed by flipping the
//! expansion at infinity into K{{t}} (mixed-characteristic arithmetic). The
//! same number is the residue at the infinite place of P^1_K computed with
//! plain Laurent arithmetic in u = 1/t: writing h(1/u) = u^{-d} h*(u) with
//! h* the reversed polynomial (a unit power series), the form becomes
//! pi^n g(1/u) u^{dr} h*(u)^{-r} (-u^{-2}) du. The two routes share no
//! series code path beyond the base field, so their agreement pins both.

use twolocal_core::fields::LocalFieldDesc;
use twolocal_core::prng::{int_in, rng_from_seed};
use twolocal_core::reciprocity::{rres_at_constant, FormOverB, FormTerm, WeierstrassPoly};
use twolocal_core::residues::{KElt, Params};
use twolocal_core::series::{LaurentSeries, MixedSeries};
use twolocal_core::Coeff;

fn residue_at_infinity(
    g: &[KElt],
    h: &WeierstrassPoly,
    r: u32,
    pi_exp: i64,
    prec: i64,
) -> KElt {
    let field = g[0].field().clone();
    let zero = field.zero(prec);
    let d = h.degree() as i64;
    // reversed polynomial h*(u) = u^d h(1/u), constant term 1
    let hstar = LaurentSeries::from_pairs(
        &zero,
        h.coeffs()
            .iter()
            .enumerate()
            .map(|(i, c)| (d - i as i64, c.clone())),
    );
    let budget = 2 * prec + 16;
    let hs_inv = hstar.invert_unit(budget).unwrap();
    let mut denom_inv = LaurentSeries::constant(field.one(2 * prec + 8));
    for _ in 0..r {
        denom_inv = denom_inv.mul(&hs_inv);
    }
    let g_at = LaurentSeries::from_pairs(
        &zero,
        g.iter().enumerate().map(|(j, c)| (-(j as i64), c.clone())),
    );
    let pi = field.uniformizer(2 * prec + 8).pow_i64(pi_exp).unwrap();
    // f(1/u) * u^{dr} * (-u^{-2})
    let series = g_at
        .mul(&denom_inv)
        .shift(d * r as i64)
        .shift(-2)
        .mul_i64(-1)
        .scalar_mul(&pi);
    series.coeff(-1).unwrap()
}

#[test]
fn constant_prime_residue_agrees_with_residue_at_infinity() {
    let params = Params::default();
    for p in [2u64, 3, 5] {
        let field = LocalFieldDesc::qp(p);
        let prec = 2 * params.prec + 8;
        let kelt = |z: i64| field.from_i64(z, prec);
        let mut rng = rng_from_seed(0xc405 ^ p);
        for case in 0..25 {
            // random Weierstrass h of degree 1..=3, pole order 1..=3,
            // random integral numerator polynomial of degree <= 4
            let deg = int_in(&mut rng, 1, 3) as usize;
            let mut coeffs = Vec::new();
            for _ in 0..deg {
                coeffs.push(kelt(p as i64 * int_in(&mut rng, 0, (p * p) as i64 - 1)));
            }
            if coeffs[0].is_zero_to_prec() {
                coeffs[0] = kelt(p as i64);
            }
            coeffs.push(field.one(prec));
            let h = WeierstrassPoly::new(coeffs).unwrap();
            let r = int_in(&mut rng, 1, 3) as u32;
            let gdeg = int_in(&mut rng, 0, 4);
            let g: Vec<KElt> = (0..=gdeg)
                .map(|_| kelt(int_in(&mut rng, -40, 40)))
                .collect();
            let pi_exp = int_in(&mut rng, -1, 1);
            // mixed route: flip into K{{t}} and read the twisted coefficient
            let numerator = MixedSeries::exact(
                &kelt(0),
                g.iter().enumerate().map(|(i, c)| (i as i64, c.clone())),
            );
            let form = FormOverB::new(vec![FormTerm {
                pi_exp,
                numerator,
                pole: Some((h.clone(), r)),
            }])
            .unwrap();
            let mixed_route = rres_at_constant(&form, &params).unwrap();
            // equal-characteristic route at the infinite place
            let infinity_route = residue_at_infinity(&g, &h, r, pi_exp, params.prec);
            let diff = mixed_route.sub(&infinity_route);
            assert!(
                diff.is_zero_to_prec(),
                "p={p} case {case}: mixed {mixed_route:?} vs infinity {infinity_route:?}"
            );
            assert!(
                Coeff::prec_bound(&diff) >= num_rational::Rational64::new(params.prec - 3, 1),
                "p={p} case {case}: comparison precision too weak"
            );
        }
    }
}

#[test]
fn wildly_ramified_differents_match_the_jacobian_formula() {
    use num_bigint::BigInt;
    use twolocal_core::dualizing::{different_valuation, CdvrExtension};
    use twolocal_core::fields::StepKind;

    // For x^e - p the different valuation is v_F(e alpha^{e-1})
    // = e nu(e) + e - 1; the oracle must find exactly that exponent.
    for (p, e, expect) in [
        (3u64, 3usize, 5i64), // wild: 3*1 + 2
        (2, 2, 3),            // wild: 2*1 + 1
        (2, 4, 11),           // wild: 4*2 + 3
        (5, 4, 3),            // tame: e - 1
        (3, 2, 1),            // tame
    ] {
        let qp = LocalFieldDesc::qp(p);
        let mut g = vec![vec![BigInt::from(-(p as i64))]];
        for _ in 1..e {
            g.push(vec![BigInt::from(0)]);
        }
        g.push(vec![BigInt::from(1)]);
        let ext = CdvrExtension::new(&qp, g, StepKind::Eisenstein, 24).unwrap();
        let rep = different_valuation(&ext).unwrap();
        assert_eq!(
            rep.d_jacobian, expect,
            "x^{e} - {p}: got {} expected {expect}",
            rep.d_jacobian
        );
        assert_eq!(rep.d_oracle, expect);
    }
}
