//! Weierstrass division and preparation over O_K[[t]], and the "flip"
//! expansion of h^(-r) into K{{t}}.
//!
//! Division runs the classical fixed-point iteration: writing the divisor
//! as P + t^d E with nu(P) >= 1 and E an invertible power series, the map
//! q -> E^{-1} U(g - P q) (U = division by t^d discarding low terms) is a
//! contraction gaining one p-digit per round, so `prec` rounds certify the
//! quotient modulo p^prec.

use alloc::vec::Vec;

use num_rational::Rational64;

use crate::coeff::Coeff;
use crate::err::{Error, Result};
use crate::series::mixed::MixedSeries;

/// Monic with every non-leading coefficient in the maximal ideal.
pub fn is_weierstrass<C: Coeff>(h: &[C]) -> bool {
    if h.len() < 2 {
        return false;
    }
    let lead = h.last().unwrap();
    let one = lead.one_like();
    if !lead.sub(&one).is_zero_to_prec() {
        return false;
    }
    h[..h.len() - 1]
        .iter()
        .all(|c| c.val_at_least(Rational64::new(1, 1)))
}

/// View a dense polynomial as an exact power series in t.
pub fn poly_to_series<C: Coeff>(h: &[C], template: &C) -> MixedSeries<C> {
    MixedSeries::exact(
        template,
        h.iter().enumerate().map(|(i, c)| (i as i64, c.clone())),
    )
}

fn require_power_series<C: Coeff>(s: &MixedSeries<C>, who: &str) -> Result<()> {
    if s.min_exp().map_or(false, |m| m < 0) || s.tail().is_some() {
        return Err(Error::Shape(alloc::format!(
            "{who} must be a power series (no terms below t^0)"
        )));
    }
    Ok(())
}

/// Divide `g` by a power series `f` of reduction order `d`:
/// `g = q f + r` with `deg r < d`, certified modulo p^prec.
pub fn series_divide<C: Coeff>(
    g: &MixedSeries<C>,
    f: &MixedSeries<C>,
    prec: i64,
) -> Result<(MixedSeries<C>, Vec<C>)> {
    require_power_series(g, "dividend")?;
    require_power_series(f, "divisor")?;
    let d = f.reduction_order().map_err(|_| {
        Error::Shape("divisor reduces to zero on the window; divide out p first".into())
    })?;
    let template = g.template().clone();
    // split f = P + t^d E
    let mut p_part: Vec<(i64, C)> = Vec::new();
    let mut e_part: Vec<(i64, C)> = Vec::new();
    for (k, c) in f.iter() {
        if *k < d {
            p_part.push((*k, c.clone()));
        } else {
            e_part.push((*k - d, c.clone()));
        }
    }
    let low = MixedSeries::exact(&template, p_part);
    let unit = MixedSeries::bounded(&template, e_part, None, f.top());
    let hi_budget = g
        .max_stored_exp()
        .unwrap_or(0)
        .max(f.max_stored_exp().unwrap_or(0))
        .max(d);
    let w_q = (hi_budget - d).max(0);
    let unit_inv = unit.invert(prec, 0)?;
    // shift-down operator U: keep exponents >= d, shift by -d
    let shift_down = |s: &MixedSeries<C>| -> MixedSeries<C> {
        let kept: Vec<(i64, C)> = s
            .iter()
            .filter(|(k, _)| **k >= d)
            .map(|(k, c)| (*k - d, c.clone()))
            .collect();
        MixedSeries::bounded(&template, kept, None, s.top())
    };
    let mut q = MixedSeries::zero_exact(&template);
    for _ in 0..prec.max(1) {
        let rhs = g.sub(&low.mul(&q));
        q = unit_inv.mul(&shift_down(&rhs)).truncate_window(0, w_q);
    }
    // the fixed point is approached one p-digit per round
    let q = q.cap_all(Rational64::new(prec, 1));
    // remainder r = g - q f, certified supported below degree d
    let rem = g.sub(&q.mul(f));
    let mut r: Vec<C> = Vec::with_capacity(d as usize);
    for i in 0..d {
        r.push(rem.coeff_checked(i)?);
    }
    for (k, c) in rem.iter() {
        if *k >= d && *k <= w_q && !c.is_zero_to_prec() {
            return Err(Error::PrecisionLoss(
                "division residue not certified zero above the remainder degree".into(),
            ));
        }
    }
    Ok((q, r))
}

/// Divide by a Weierstrass polynomial: `f = q h + r` with `deg r < deg h`.
pub fn weierstrass_divide<C: Coeff>(
    f: &MixedSeries<C>,
    h: &[C],
    prec: i64,
) -> Result<(MixedSeries<C>, Vec<C>)> {
    if !is_weierstrass(h) {
        return Err(Error::Shape(
            "divisor must be a monic polynomial with non-leading coefficients of valuation >= 1"
                .into(),
        ));
    }
    let template = f.template().clone();
    series_divide(f, &poly_to_series(h, &template), prec)
}

/// Weierstrass preparation: `f = u h` with `u` a unit power series and `h`
/// a Weierstrass polynomial of degree = t-order of the reduction of `f`.
/// The factorisation is verified by multiplying back before returning.
pub fn weierstrass_prepare<C: Coeff>(
    f: &MixedSeries<C>,
    prec: i64,
) -> Result<(MixedSeries<C>, Vec<C>)> {
    require_power_series(f, "preparation input")?;
    if !f.val_at_least(Rational64::new(0, 1)) {
        return Err(Error::NotIntegral("preparation needs integral coefficients".into()));
    }
    let d = f.reduction_order().map_err(|_| {
        Error::Shape("reduction is zero on the window; divide out p first".into())
    })?;
    let template = f.template().clone();
    // divide t^d by f: t^d = q f + r, then h = t^d - r = q f with q a unit
    let td = MixedSeries::monomial(template.one_like(), d);
    let (q, r) = series_divide(&td, f, prec)?;
    let mut h: Vec<C> = r.iter().map(|c| c.neg()).collect();
    h.push(template.one_like());
    if !is_weierstrass(&h) {
        return Err(Error::PrecisionLoss(
            "prepared factor failed the Weierstrass shape check".into(),
        ));
    }
    let u = q.invert(prec, 0)?;
    // verify u h = f to the certified precision
    let back = u.mul(&poly_to_series(&h, &template));
    let diff = back.sub(f);
    for (k, c) in diff.iter() {
        if !c.is_zero_to_prec() {
            return Err(Error::Disagreement(alloc::format!(
                "preparation verification failed at exponent {k}"
            )));
        }
    }
    Ok((u, h))
}

/// Expansion of h^(-r) in K{{t}} ("flip" of the expansion at infinity):
/// h^r = t^(dr) (1 + eps) with eps supported on negative exponents and
/// nu(eps) >= 1, so h^(-r) = t^(-dr) sum_k binom(-r,k) eps^k, truncated
/// after `prec` terms (the omitted terms have valuation > prec).
pub fn flip_expand<C: Coeff>(
    h: &[C],
    r: u32,
    prec: i64,
    lo_window: i64,
) -> Result<MixedSeries<C>> {
    if !is_weierstrass(h) {
        return Err(Error::Shape("flip expansion requires a Weierstrass polynomial".into()));
    }
    if r == 0 {
        return Err(Error::Shape("pole order must be >= 1".into()));
    }
    let d = (h.len() - 1) as i64;
    let template = h[0].zero_like();
    let eps = MixedSeries::exact(
        &template,
        h[..h.len() - 1]
            .iter()
            .enumerate()
            .filter(|(_, c)| !(c.is_zero_to_prec() && c.prec_bound() >= crate::coeff::prec_inf()))
            .map(|(j, c)| (j as i64 - d, c.clone())),
    );
    if eps.min_exp().is_none() {
        // h = t^d exactly
        return Ok(MixedSeries::monomial(template.one_like(), -d * (r as i64)));
    }
    let mut inv1 = MixedSeries::constant(template.one_like());
    let mut power = MixedSeries::constant(template.one_like());
    let neg_eps = eps.neg();
    for _ in 1..=prec.max(1) {
        power = power.mul(&neg_eps).truncate_below(lo_window);
        if power.is_zero_to_prec() && power.floor() >= Rational64::new(prec, 1) {
            break;
        }
        inv1 = inv1.add(&power);
    }
    let inv1 = inv1.cap_all(Rational64::new(prec, 1));
    let out = inv1.pow(r).shift_t(-d * (r as i64)).truncate_below(lo_window);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::padic::PadicApprox;

    const N: i64 = 16;

    fn q(z: i64) -> PadicApprox {
        PadicApprox::from_i64(5, z, N)
    }

    fn series(pairs: &[(i64, i64)]) -> MixedSeries<PadicApprox> {
        MixedSeries::exact(&q(0), pairs.iter().map(|(e, c)| (*e, q(*c))))
    }

    #[test]
    fn divide_trivial_and_linear() {
        // f = h -> (1, 0)
        let h = [q(-5), q(1)]; // t - 5
        let f = series(&[(0, -5), (1, 1)]);
        let (quo, rem) = weierstrass_divide(&f, &h, N).unwrap();
        assert!(quo.coeff_checked(0).unwrap().sub(&q(1)).is_zero_to_prec());
        assert!(rem[0].is_zero_to_prec());
        // f = t, h = t - p -> (1, p)
        let t = series(&[(1, 1)]);
        let (quo, rem) = weierstrass_divide(&t, &h, N).unwrap();
        assert!(quo.coeff_checked(0).unwrap().sub(&q(1)).is_zero_to_prec());
        assert!(rem[0].sub(&q(5)).is_zero_to_prec());
    }

    #[test]
    fn divide_cubic_by_quadratic_against_long_division_oracle() {
        // f = t^3, h = t^2 - p: polynomial long division gives q = t, r = p t
        let h = [q(-5), q(0), q(1)];
        let f = series(&[(3, 1)]);
        let (quo, rem) = weierstrass_divide(&f, &h, N).unwrap();
        assert!(quo.coeff_checked(1).unwrap().sub(&q(1)).is_zero_to_prec());
        assert!(quo.coeff_checked(0).unwrap().is_zero_to_prec());
        assert!(rem[0].is_zero_to_prec());
        assert!(rem[1].sub(&q(5)).is_zero_to_prec());
    }

    #[test]
    fn recombination_reproduces_dividend() {
        let h = [q(10), q(-5), q(0), q(1)]; // t^3 - 5 t + 10
        let f = series(&[(0, 7), (1, -3), (2, 25), (4, 1), (6, 2)]);
        let (quo, rem) = weierstrass_divide(&f, &h, N).unwrap();
        let back = quo
            .mul(&poly_to_series(&h, &q(0)))
            .add(&poly_to_series(&rem, &q(0)));
        let diff = back.sub(&f);
        for (_, c) in diff.iter() {
            assert!(c.is_zero_to_prec());
        }
    }

    #[test]
    fn prepare_unit_times_weierstrass() {
        // f = (1+p)(t-p): u = 1+p, h = t-p
        let f = series(&[(0, -30), (1, 6)]);
        let (u, h) = weierstrass_prepare(&f, N).unwrap();
        assert_eq!(h.len(), 2);
        assert!(h[0].sub(&q(-5)).is_zero_to_prec());
        assert!(u.coeff_checked(0).unwrap().sub(&q(6)).is_zero_to_prec());
    }

    #[test]
    fn prepare_quadratic_with_tail() {
        // f = t^2 + p t + p + t^3: deg h = 2, u = 1 + t mod p
        let f = series(&[(0, 5), (1, 5), (2, 1), (3, 1)]);
        let (u, h) = weierstrass_prepare(&f, N).unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(u.coeff_checked(0).unwrap().residue_digit().unwrap(), 1);
        assert_eq!(u.coeff_checked(1).unwrap().residue_digit().unwrap(), 1);
        assert!(is_weierstrass(&h));
    }

    #[test]
    fn prepare_rejects_zero_reduction() {
        let f = series(&[(0, 5), (1, 10)]);
        assert!(matches!(weierstrass_prepare(&f, N), Err(Error::Shape(_))));
    }

    #[test]
    fn flip_linear_and_quadratic() {
        // h = t (exact zero constant term): exact t^{-1}
        let z = PadicApprox::zero_to(5, crate::padic::PREC_EXACT);
        let flip = flip_expand(&[z, q(1)], 1, N, -64).unwrap();
        assert!(flip.coeff_checked(-1).unwrap().sub(&q(1)).is_zero_to_prec());
        assert!(flip.is_exact());
        // h = t - p: t^{-1} + p t^{-2} + p^2 t^{-3} + ...
        let flip = flip_expand(&[q(-5), q(1)], 1, N, -64).unwrap();
        let mut c = 1i64;
        for k in 1..=5 {
            assert!(flip
                .coeff_checked(-k)
                .unwrap()
                .sub(&q(c))
                .is_zero_to_prec());
            c *= 5;
        }
        // h = t^2 - p: t^{-2} + p t^{-4} + p^2 t^{-6} + ...
        let flip = flip_expand(&[q(-5), q(0), q(1)], 1, N, -64).unwrap();
        assert!(flip.coeff_checked(-2).unwrap().sub(&q(1)).is_zero_to_prec());
        assert!(flip.coeff_checked(-3).unwrap().is_zero_to_prec());
        assert!(flip.coeff_checked(-4).unwrap().sub(&q(5)).is_zero_to_prec());
        assert!(flip.coeff_checked(-6).unwrap().sub(&q(25)).is_zero_to_prec());
    }

    #[test]
    fn flip_times_h_power_is_one() {
        for (h, r) in [
            (alloc::vec![q(-5), q(1)], 1u32),
            (alloc::vec![q(-5), q(1)], 3),
            (alloc::vec![q(-5), q(0), q(1)], 2),
            (alloc::vec![q(10), q(-5), q(0), q(25), q(1)], 2),
        ] {
            let flip = flip_expand(&h, r, N, -80).unwrap();
            let mut hp = MixedSeries::constant(q(1));
            for _ in 0..r {
                hp = hp.mul(&poly_to_series(&h, &q(0)));
            }
            let prod = flip.mul(&hp);
            let c0 = prod.coeff_checked(0).unwrap();
            assert!(c0.sub(&q(1)).is_zero_to_prec());
            assert!(c0.precision() >= N - 2);
            for k in -6..0 {
                assert!(prod.coeff_checked(k).unwrap().is_zero_to_prec());
            }
        }
    }
}
