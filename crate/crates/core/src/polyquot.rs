//! Generic dense-polynomial and small linear-algebra helpers over any
//! coefficient ring implementing [`Coeff`].
//!
//! These back the quotient algebras K[x]/(h), A = B[x]/(F) and the
//! multiplication-matrix traces used throughout. Determinants and adjugates
//! are computed division-free (cofactor expansion) so they stay valid over
//! rings where only units can be inverted, e.g. truncated power series.

use alloc::vec;
use alloc::vec::Vec;

use crate::coeff::Coeff;
use crate::err::{Error, Result};

pub fn poly_add<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    let n = a.len().max(b.len());
    let zero = a.first().or_else(|| b.first()).expect("nonempty").zero_like();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).unwrap_or(&zero);
        let y = b.get(i).unwrap_or(&zero);
        out.push(x.add(y));
    }
    out
}

pub fn poly_neg<C: Coeff>(a: &[C]) -> Vec<C> {
    a.iter().map(|c| c.neg()).collect()
}

pub fn poly_mul<C: Coeff>(a: &[C], b: &[C]) -> Vec<C> {
    if a.is_empty() || b.is_empty() {
        return vec![];
    }
    let zero = a[0].zero_like();
    let mut out = vec![zero; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] = out[i + j].add(&x.mul(y));
        }
    }
    out
}

/// Remainder of `a` modulo the monic polynomial `m` (leading coefficient is
/// taken to be exactly one and is not inspected).
pub fn poly_rem_monic<C: Coeff>(mut a: Vec<C>, m: &[C]) -> Vec<C> {
    let d = m.len() - 1;
    if d == 0 {
        return vec![];
    }
    while a.len() > d {
        let i = a.len() - 1;
        let lead = a.pop().expect("nonempty");
        for j in 0..d {
            let delta = lead.mul(&m[j]);
            a[i - d + j] = a[i - d + j].sub(&delta);
        }
    }
    let zero = m[0].zero_like();
    while a.len() < d {
        a.push(zero.clone());
    }
    a
}

pub fn poly_mulmod<C: Coeff>(a: &[C], b: &[C], m: &[C]) -> Vec<C> {
    poly_rem_monic(poly_mul(a, b), m)
}

pub fn poly_powmod<C: Coeff>(a: &[C], mut k: u64, m: &[C]) -> Vec<C> {
    let d = m.len() - 1;
    let mut acc = vec![m[0].zero_like(); d];
    acc[0] = m[0].one_like();
    let mut base: Vec<C> = poly_rem_monic(a.to_vec(), m);
    while k > 0 {
        if k & 1 == 1 {
            acc = poly_mulmod(&acc, &base, m);
        }
        k >>= 1;
        if k > 0 {
            base = poly_mulmod(&base, &base, m);
        }
    }
    acc
}

pub fn poly_eval<C: Coeff>(a: &[C], at: &C) -> C {
    let mut acc = at.zero_like();
    for c in a.iter().rev() {
        acc = acc.mul(at).add(c);
    }
    acc
}

pub fn poly_derivative<C: Coeff>(a: &[C]) -> Vec<C> {
    a.iter()
        .enumerate()
        .skip(1)
        .map(|(i, c)| c.mul_i64(i as i64))
        .collect()
}

/// Coefficients of `a(theta + u)` as a polynomial in `u` (Taylor shift by
/// repeated synthetic division).
pub fn taylor_shift<C: Coeff>(a: &[C], theta: &C) -> Vec<C> {
    let n = a.len();
    let mut work: Vec<C> = a.to_vec();
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        // divide work by (x - theta): remainder is the next coefficient
        let mut rem = work.last().expect("nonempty").zero_like();
        for c in work.iter().rev() {
            rem = rem.mul(theta).add(c);
        }
        out.push(rem);
        // quotient
        let mut q = Vec::with_capacity(work.len().saturating_sub(1));
        let mut carry = work.last().expect("nonempty").zero_like();
        for c in work.iter().rev() {
            carry = carry.mul(theta).add(c);
            q.push(carry.clone());
        }
        q.pop();
        q.reverse();
        if q.is_empty() {
            break;
        }
        work = q;
    }
    out
}

/// Multiplication matrix of `a` in C[x]/(m): `mat[col]` = coordinates of
/// `a * x^col mod m`.
pub fn mult_matrix<C: Coeff>(a: &[C], m: &[C]) -> Vec<Vec<C>> {
    let d = m.len() - 1;
    let mut mat = Vec::with_capacity(d);
    let mut cur = poly_rem_monic(a.to_vec(), m);
    for col in 0..d {
        mat.push(cur.clone());
        if col + 1 < d {
            // multiply by x
            let mut shifted = Vec::with_capacity(cur.len() + 1);
            shifted.push(cur[0].zero_like());
            shifted.extend(cur.iter().cloned());
            cur = poly_rem_monic(shifted, m);
        }
    }
    mat
}

/// Trace of multiplication by `a` in C[x]/(m).
pub fn trace_in_quotient<C: Coeff>(a: &[C], m: &[C]) -> C {
    let mat = mult_matrix(a, m);
    let d = m.len() - 1;
    let mut tr = m[0].zero_like();
    for k in 0..d {
        tr = tr.add(&mat[k][k]);
    }
    tr
}

/// Gauss-Jordan solve with minimal-valuation pivoting. Entries only ever
/// get divided by the chosen pivots, so precision loss is governed by the
/// pivot valuations.
pub fn gauss_solve<C: Coeff>(mut mat: Vec<Vec<C>>, mut rhs: Vec<C>) -> Result<Vec<C>> {
    // mat[col][row] layout (column vectors)
    let n = rhs.len();
    let mut perm: Vec<usize> = (0..n).collect();
    for col in 0..n {
        // pivot: row >= col with minimal valuation entry in this column
        let mut best: Option<(usize, num_rational::Rational64)> = None;
        for row in col..n {
            if let Some(v) = mat[col][perm[row]].vord() {
                if best.map_or(true, |(_, bv)| v < bv) {
                    best = Some((row, v));
                }
            }
        }
        let (prow, _) = best.ok_or_else(|| {
            Error::PrecisionLoss("singular system: no invertible pivot in column".into())
        })?;
        perm.swap(col, prow);
        let pr = perm[col];
        let pinv = mat[col][pr].inv()?;
        // normalise pivot row across remaining columns and rhs
        for c in mat.iter_mut().skip(col) {
            c[pr] = c[pr].mul(&pinv);
        }
        rhs[pr] = rhs[pr].mul(&pinv);
        // eliminate the column from all other rows
        for row in 0..n {
            let r = perm[row];
            if r == pr {
                continue;
            }
            let factor = mat[col][r].clone();
            if factor.is_zero_to_prec() && factor.prec_bound() >= crate::coeff::prec_inf() {
                continue;
            }
            for c in mat.iter_mut().skip(col) {
                let delta = factor.mul(&c[pr]);
                c[r] = c[r].sub(&delta);
            }
            let delta = factor.mul(&rhs[pr]);
            rhs[r] = rhs[r].sub(&delta);
        }
    }
    // read off solution: x[col] = rhs[perm[col]]
    let mut out = Vec::with_capacity(n);
    for col in 0..n {
        out.push(rhs[perm[col]].clone());
    }
    Ok(out)
}

/// Division-free determinant by cofactor expansion; intended for n <= 4.
/// Layout: `mat[col][row]`.
pub fn det_cofactor<C: Coeff>(mat: &[Vec<C>]) -> C {
    debug_assert!(!mat.is_empty() && mat.iter().all(|c| c.len() == mat.len()));
    let rows: Vec<usize> = (0..mat.len()).collect();
    det_rec(mat, 0, &rows)
}

fn det_rec<C: Coeff>(mat: &[Vec<C>], col: usize, rows: &[usize]) -> C {
    if rows.len() == 1 {
        return mat[col][rows[0]].clone();
    }
    let mut acc = mat[0][0].zero_like();
    for (idx, &r) in rows.iter().enumerate() {
        let rest: Vec<usize> = rows.iter().copied().filter(|&x| x != r).collect();
        let term = mat[col][r].mul(&det_rec(mat, col + 1, &rest));
        acc = if idx % 2 == 0 { acc.add(&term) } else { acc.sub(&term) };
    }
    acc
}

/// Adjugate matrix (division-free): `adj * mat = det * I`.
pub fn adjugate<C: Coeff>(mat: &[Vec<C>]) -> Vec<Vec<C>> {
    let n = mat.len();
    if n == 1 {
        return vec![vec![mat[0][0].one_like()]];
    }
    let mut adj = vec![vec![mat[0][0].zero_like(); n]; n];
    for col in 0..n {
        for row in 0..n {
            // cofactor C_{row,col} goes to adj[row][col] (note transpose)
            let minor = submatrix_det(mat, row, col);
            let sign = if (row + col) % 2 == 0 { minor } else { minor.neg() };
            adj[row][col] = sign;
        }
    }
    adj
}

fn submatrix_det<C: Coeff>(mat: &[Vec<C>], drop_row: usize, drop_col: usize) -> C {
    let n = mat.len();
    let cols: Vec<usize> = (0..n).filter(|&c| c != drop_col).collect();
    let rows: Vec<usize> = (0..n).filter(|&r| r != drop_row).collect();
    let sub: Vec<Vec<C>> = cols
        .iter()
        .map(|&c| rows.iter().map(|&r| mat[c][r].clone()).collect())
        .collect();
    det_cofactor(&sub)
}

/// Apply a matrix (column layout) to a vector.
pub fn mat_vec<C: Coeff>(mat: &[Vec<C>], v: &[C]) -> Vec<C> {
    let n = mat.len();
    let mut out = vec![mat[0][0].zero_like(); n];
    for (col, m) in mat.iter().enumerate() {
        for row in 0..n {
            out[row] = out[row].add(&m[row].mul(&v[col]));
        }
    }
    out
}
