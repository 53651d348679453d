//! Exact elimination: Sylvester resultants over polynomial rings and
//! univariate gcds over the Gaussian rationals.

use std::collections::HashMap;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::number::GaussRat;
use crate::poly::Poly;

/// Determinant of a square matrix of polynomials by Laplace expansion along
/// rows, memoized on the set of columns still available.
pub fn poly_det(m: &[Vec<Poly>], nvars: usize) -> Poly {
    let n = m.len();
    assert!(n <= 63, "matrix too large for subset memoization");
    fn rec(m: &[Vec<Poly>], row: usize, cols: u64, nvars: usize, memo: &mut HashMap<u64, Poly>) -> Poly {
        if row == m.len() {
            return Poly::one(nvars);
        }
        if let Some(p) = memo.get(&cols) {
            return p.clone();
        }
        let mut acc = Poly::zero(nvars);
        let mut sign_neg = false;
        for j in 0..m.len() {
            if cols & (1 << j) == 0 {
                continue;
            }
            let entry = &m[row][j];
            if !entry.is_zero() {
                let minor = rec(m, row + 1, cols & !(1 << j), nvars, memo);
                if !minor.is_zero() {
                    let t = entry * &minor;
                    acc = if sign_neg { &acc - &t } else { &acc + &t };
                }
            }
            sign_neg = !sign_neg;
        }
        memo.insert(cols, acc.clone());
        acc
    }
    if n == 0 {
        return Poly::one(nvars);
    }
    rec(m, 0, (1u64 << n) - 1, nvars, &mut HashMap::new())
}

/// `Res_var(p, q)` for formal degrees `deg_p`, `deg_q` (the Sylvester
/// determinant; leading coefficients may vanish). The result lives in the
/// same ring with `var` absent.
pub fn resultant(p: &Poly, q: &Poly, var: usize, deg_p: u32, deg_q: u32) -> Result<Poly> {
    if p.nvars() != q.nvars() {
        return Err(Error::DimensionMismatch { expected: p.nvars(), found: q.nvars() });
    }
    if p.degree_in(var).unwrap_or(0) > deg_p || q.degree_in(var).unwrap_or(0) > deg_q {
        return Err(Error::Elimination("formal degree below actual degree".into()));
    }
    let nvars = p.nvars();
    let (m, n) = (deg_p as usize, deg_q as usize);
    let size = m + n;
    if size == 0 {
        return Ok(Poly::one(nvars));
    }
    let pc: Vec<Poly> = (0..=deg_p).rev().map(|k| p.coeff_in(var, k)).collect();
    let qc: Vec<Poly> = (0..=deg_q).rev().map(|k| q.coeff_in(var, k)).collect();
    let mut rows = vec![vec![Poly::zero(nvars); size]; size];
    for i in 0..n {
        for (k, c) in pc.iter().enumerate() {
            rows[i][i + k] = c.clone();
        }
    }
    for i in 0..m {
        for (k, c) in qc.iter().enumerate() {
            rows[n + i][i + k] = c.clone();
        }
    }
    Ok(poly_det(&rows, nvars))
}

/// Dense univariate polynomial, coefficient `i` for `t^i`, no trailing zeros.
pub type UniPoly = Vec<GaussRat>;

/// Reads a polynomial involving only `var` as a dense univariate one.
pub fn to_univariate(p: &Poly, var: usize) -> Result<UniPoly> {
    let mut out = vec![GaussRat::zero(); p.degree_in(var).map_or(0, |d| d as usize + 1)];
    for (e, c) in p.terms() {
        if e.iter().enumerate().any(|(i, &k)| i != var && k != 0) {
            return Err(Error::Elimination(format!("unexpected variable in univariate polynomial {e:?}")));
        }
        out[e[var] as usize] = c.clone();
    }
    trim(&mut out);
    Ok(out)
}

fn trim(p: &mut UniPoly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

fn uni_rem(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let mut r = a.clone();
    let lead_inv = b.last().expect("nonzero divisor").inv().expect("nonzero lead");
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let f = r.last().unwrap() * &lead_inv;
        for (i, c) in b.iter().enumerate() {
            let s = &f * c;
            r[shift + i] -= &s;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Monic gcd; the gcd of two zero polynomials is zero (empty).
pub fn uni_gcd(a: &UniPoly, b: &UniPoly) -> UniPoly {
    let (mut a, mut b) = (a.clone(), b.clone());
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = uni_rem(&a, &b);
        a = std::mem::replace(&mut b, r);
    }
    if let Some(lead) = a.last().cloned() {
        let inv = lead.inv().expect("nonzero");
        a.iter_mut().for_each(|c| *c = &*c * &inv);
    }
    a
}

/// Degree of a nonzero univariate polynomial; `None` for zero.
pub fn uni_degree(p: &UniPoly) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn uni_is_constant(p: &UniPoly) -> bool {
    uni_degree(p) == Some(0)
}

/// Scales so the coefficient of the largest monomial is one.
pub fn normalize(p: &Poly) -> Poly {
    match p.terms().iter().next_back() {
        Some((_, c)) => p.scale(&c.inv().expect("nonzero term")),
        None => p.clone(),
    }
}
