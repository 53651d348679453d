//! Exact rational convex geometry: hulls with both representations,
//! linear minimization, containment with separating certificates, and the
//! projection of GL characters onto the sum-zero (SL) quotient.
//!
//! Polytopes here are small (a handful of points in dimension at most nine)
//! so the hull routine favours a simple exact construction: affine hull by
//! row reduction, then facets inside the hull (monotone chain in the plane,
//! exhaustive facet enumeration above that).

use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number::{primitive_integer, rational_str, rational_vec, Rational};

/// A point of character space with exact rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct RationalVector(#[serde(with = "rational_vec")] pub Vec<Rational>);

impl RationalVector {
    pub fn new(coords: Vec<Rational>) -> Self {
        RationalVector(coords)
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        RationalVector(coords.iter().map(|&x| Rational::from_integer(x.into())).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn dot_int(&self, u: &[BigInt]) -> Rational {
        dot_int(&self.0, u)
    }

    pub fn scaled(&self, k: &Rational) -> RationalVector {
        RationalVector(self.0.iter().map(|x| x * k).collect())
    }
}

fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

fn dot_int(a: &[Rational], u: &[BigInt]) -> Rational {
    let mut num = Rational::zero();
    for (x, c) in a.iter().zip(u) {
        if !c.is_zero() {
            num += x * Rational::from_integer(c.clone());
        }
    }
    num
}

/// `⟨normal, x⟩ ≥ offset` for halfspaces, `= offset` for equalities. Normals
/// are primitive integer vectors.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Constraint {
    #[serde(with = "crate::number::bigint_vec")]
    pub normal: Vec<BigInt>,
    #[serde(with = "rational_str")]
    pub offset: Rational,
}

impl Constraint {
    pub fn eval(&self, x: &RationalVector) -> Rational {
        x.dot_int(&self.normal)
    }
}

/// Convex hull of finitely many rational points, stored in both the vertex
/// and the constraint representation.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct LatticePolytope {
    pub dim: usize,
    pub vertices: Vec<RationalVector>,
    pub halfspaces: Vec<Constraint>,
    pub equalities: Vec<Constraint>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Containment {
    Contained,
    /// `min_Q ⟨u,·⟩ > min_P ⟨u,·⟩` for the primitive integer vector `u`.
    Separated {
        #[serde(with = "crate::number::bigint_vec")]
        u: Vec<BigInt>,
        #[serde(with = "rational_str")]
        min_p: Rational,
        #[serde(with = "rational_str")]
        min_q: Rational,
    },
}

impl Containment {
    pub fn is_contained(&self) -> bool {
        matches!(self, Containment::Contained)
    }
}

/// Row-reduces in place and returns the pivot columns.
fn rref(rows: &mut Vec<Vec<Rational>>, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == rows.len() {
            break;
        }
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Rational::one() / &rows[r][c];
        for x in rows[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                for j in 0..ncols {
                    let s = &f * &rows[r][j];
                    rows[i][j] -= s;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    rows.truncate(r);
    pivots
}

fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    let mut m = rows.to_vec();
    rref(&mut m, ncols).len()
}

/// Basis of `{a : ⟨a, row⟩ = 0 for every row}` read off a reduced matrix.
fn null_space(reduced: &[Vec<Rational>], pivots: &[usize], ncols: usize) -> Vec<Vec<Rational>> {
    (0..ncols)
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut a = vec![Rational::zero(); ncols];
            a[free] = Rational::one();
            for (row, &p) in reduced.iter().zip(pivots) {
                a[p] = -row[free].clone();
            }
            a
        })
        .collect()
}

fn to_rationals(v: &[BigInt]) -> Vec<Rational> {
    v.iter().map(|x| Rational::from_integer(x.clone())).collect()
}

/// Exact convex hull; degenerate (lower-dimensional) inputs get their affine
/// hull as equalities and facets are taken inside it.
pub fn convex_hull(points: &[RationalVector]) -> Result<LatticePolytope> {
    let first = points.first().ok_or(Error::EmptyInput("point set"))?;
    let n = first.dim();
    if n == 0 {
        return Err(Error::EmptyInput("zero-dimensional vectors"));
    }
    if let Some(p) = points.iter().find(|p| p.dim() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: p.dim() });
    }
    let pts: Vec<RationalVector> = points.iter().cloned().collect::<BTreeSet<_>>().into_iter().collect();
    let base = &pts[0];

    let mut diffs: Vec<Vec<Rational>> =
        pts[1..].iter().map(|p| p.0.iter().zip(&base.0).map(|(a, b)| a - b).collect()).collect();
    let pivots = rref(&mut diffs, n);
    let k = pivots.len();

    let mut eq_rows = null_space(&diffs, &pivots, n);
    let eq_piv = rref(&mut eq_rows, n);
    debug_assert_eq!(eq_piv.len(), n - k);
    let equalities: Vec<Constraint> = eq_rows
        .iter()
        .map(|row| {
            let normal = primitive_integer(row);
            let offset = base.dot_int(&normal);
            Constraint { normal, offset }
        })
        .collect();

    // Coordinates on the pivot columns parametrize the affine hull.
    let proj: Vec<Vec<Rational>> = pts.iter().map(|p| pivots.iter().map(|&c| p.0[c].clone()).collect()).collect();
    let facets: Vec<Vec<Rational>> = match k {
        0 => Vec::new(),
        1 => vec![vec![Rational::one()], vec![-Rational::one()]],
        2 => planar_facets(&proj),
        _ => brute_force_facets(&proj, k),
    };

    let mut halfspaces: Vec<Constraint> = facets
        .iter()
        .map(|a| {
            let mut full = vec![Rational::zero(); n];
            for (j, &c) in pivots.iter().enumerate() {
                full[c] = a[j].clone();
            }
            let normal = primitive_integer(&full);
            let offset = pts.iter().map(|p| p.dot_int(&normal)).min().expect("nonempty");
            Constraint { normal, offset }
        })
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    halfspaces.sort();

    let vertices: Vec<RationalVector> = if k == 0 {
        vec![base.clone()]
    } else {
        pts.iter()
            .filter(|p| {
                let tight: Vec<Vec<Rational>> = halfspaces
                    .iter()
                    .filter(|h| h.eval(p) == h.offset)
                    .map(|h| pivots.iter().map(|&c| Rational::from_integer(h.normal[c].clone())).collect())
                    .collect();
                tight.len() >= k && rank(&tight, k) == k
            })
            .cloned()
            .collect()
    };

    Ok(LatticePolytope { dim: n, vertices, halfspaces, equalities })
}

fn cross(o: &[Rational], a: &[Rational], b: &[Rational]) -> Rational {
    (&a[0] - &o[0]) * (&b[1] - &o[1]) - (&a[1] - &o[1]) * (&b[0] - &o[0])
}

/// Inward edge normals of a full-dimensional planar hull (monotone chain).
fn planar_facets(pts: &[Vec<Rational>]) -> Vec<Vec<Rational>> {
    let mut sorted: Vec<&Vec<Rational>> = pts.iter().collect();
    sorted.sort();
    sorted.dedup();
    let mut lower: Vec<&Vec<Rational>> = Vec::new();
    for p in &sorted {
        while lower.len() >= 2 && !cross(lower[lower.len() - 2], lower[lower.len() - 1], p).is_positive() {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<&Vec<Rational>> = Vec::new();
    for p in sorted.iter().rev() {
        while upper.len() >= 2 && !cross(upper[upper.len() - 2], upper[upper.len() - 1], p).is_positive() {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    let ring: Vec<&Vec<Rational>> = lower.into_iter().chain(upper).collect();
    (0..ring.len())
        .map(|i| {
            let a = ring[i];
            let b = ring[(i + 1) % ring.len()];
            // counter-clockwise ring: interior lies to the left
            vec![-(&b[1] - &a[1]), &b[0] - &a[0]]
        })
        .collect()
}

/// Facet normals of a full-dimensional hull in dimension `k ≥ 3` by testing
/// every `k`-subset of points as a candidate supporting hyperplane.
fn brute_force_facets(pts: &[Vec<Rational>], k: usize) -> Vec<Vec<Rational>> {
    let mut found: BTreeSet<Vec<BigInt>> = BTreeSet::new();
    let mut idx: Vec<usize> = (0..k).collect();
    let m = pts.len();
    loop {
        let s0 = &pts[idx[0]];
        let mut rows: Vec<Vec<Rational>> =
            idx[1..].iter().map(|&i| pts[i].iter().zip(s0).map(|(a, b)| a - b).collect()).collect();
        let piv = rref(&mut rows, k);
        if piv.len() == k - 1 {
            let a = null_space(&rows, &piv, k).pop().expect("one-dimensional kernel");
            let off = dot(&a, s0);
            let mut pos = false;
            let mut neg = false;
            for p in pts {
                let v = dot(&a, p) - &off;
                if v.is_positive() {
                    pos = true;
                } else if v.is_negative() {
                    neg = true;
                }
                if pos && neg {
                    break;
                }
            }
            if !(pos && neg) {
                let oriented: Vec<Rational> = if neg { a.iter().map(|x| -x.clone()).collect() } else { a };
                found.insert(primitive_integer(&oriented));
            }
        }
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return found.into_iter().map(|v| to_rationals(&v)).collect();
            }
            i -= 1;
            if idx[i] < m - k + i {
                idx[i] += 1;
                for j in i + 1..k {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

impl LatticePolytope {
    /// Dimension of the affine hull.
    pub fn affine_dim(&self) -> usize {
        self.dim - self.equalities.len()
    }

    pub fn contains_point(&self, x: &RationalVector) -> bool {
        self.equalities.iter().all(|e| e.eval(x) == e.offset) && self.halfspaces.iter().all(|h| h.eval(x) >= h.offset)
    }
}

/// `min` over the polytope of `⟨u, x⟩`, attained at a vertex.
pub fn minimize_linear(p: &LatticePolytope, u: &[BigInt]) -> Result<Rational> {
    if u.len() != p.dim {
        return Err(Error::DimensionMismatch { expected: p.dim, found: u.len() });
    }
    Ok(p.vertices.iter().map(|v| v.dot_int(u)).min().expect("polytopes are nonempty"))
}

/// Decides `P ⊆ Q`; on failure returns a separating primitive integer `u`.
pub fn contains_polytope(p: &LatticePolytope, q: &LatticePolytope) -> Result<Containment> {
    if p.dim != q.dim {
        return Err(Error::DimensionMismatch { expected: q.dim, found: p.dim });
    }
    for x in &p.vertices {
        for e in &q.equalities {
            let val = e.eval(x);
            if val != e.offset {
                let u: Vec<BigInt> =
                    if val < e.offset { e.normal.clone() } else { e.normal.iter().map(|c| -c).collect() };
                return separated(p, q, u);
            }
        }
        for h in &q.halfspaces {
            if h.eval(x) < h.offset {
                return separated(p, q, h.normal.clone());
            }
        }
    }
    Ok(Containment::Contained)
}

fn separated(p: &LatticePolytope, q: &LatticePolytope, u: Vec<BigInt>) -> Result<Containment> {
    let min_p = minimize_linear(p, &u)?;
    let min_q = minimize_linear(q, &u)?;
    debug_assert!(min_q > min_p);
    Ok(Containment::Separated { u, min_p, min_q })
}

/// Projects a GL character onto the sum-zero hyperplane (subtracts the mean
/// coordinate along the diagonal direction).
pub fn quotient_project(x: &RationalVector) -> RationalVector {
    let n = Rational::from_integer(BigInt::from(x.dim()));
    let mean = x.0.iter().fold(Rational::zero(), |a, b| a + b) / n;
    RationalVector(x.0.iter().map(|c| c - &mean).collect())
}

pub fn scale_polytope(p: &LatticePolytope, k: &Rational) -> Result<LatticePolytope> {
    if !k.is_positive() {
        return Err(Error::NonPositiveScale);
    }
    let scale = |c: &Constraint| Constraint { normal: c.normal.clone(), offset: &c.offset * k };
    Ok(LatticePolytope {
        dim: p.dim,
        vertices: p.vertices.iter().map(|v| v.scaled(k)).collect(),
        halfspaces: p.halfspaces.iter().map(scale).collect(),
        equalities: p.equalities.iter().map(scale).collect(),
    })
}
