//! Pairs of binary forms under `SL(2)`: the closed-form criterion
//! `e ≤ d` and `ord_p(g) − ord_p(f) ≤ (d − e)/2` for every `p ∈ ℙ¹`, and a
//! finite family of root-adapted tori on which the polytope test agrees
//! with it.
//!
//! Forms are given factored, as points of `ℙ¹` with multiplicities, so
//! orders of vanishing are exact.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::LatticePolytope;
use crate::matrix::Matrix;
use crate::number::{parse_rational, rat, GaussRat, Rational};
use crate::poly::Poly;
use crate::stability::{certificate_from_polytopes, check_pair_numerical, Pair, PairVerdict, Status};
use crate::weights::{weight_polytope, SparseForm, TorusFrame, Variance};

/// A point `[a:b]` of `ℙ¹`, normalized to `[a/b : 1]` or `[1 : 0]`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ProjPoint {
    a: GaussRat,
    b: GaussRat,
}

impl ProjPoint {
    pub fn new(a: GaussRat, b: GaussRat) -> Result<Self> {
        if b.is_zero() {
            if a.is_zero() {
                return Err(Error::InvalidForm("[0:0] is not a point of the projective line".into()));
            }
            return Ok(ProjPoint { a: GaussRat::one(), b: GaussRat::zero() });
        }
        Ok(ProjPoint { a: &a / &b, b: GaussRat::one() })
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        ProjPoint::new(GaussRat::from_int(a), GaussRat::from_int(b))
    }

    pub fn infinity() -> Self {
        ProjPoint { a: GaussRat::one(), b: GaussRat::zero() }
    }

    pub fn coords(&self) -> [&GaussRat; 2] {
        [&self.a, &self.b]
    }

    /// The linear form `b·x − a·y`, which vanishes at `(x, y) = (a, b)`.
    pub fn linear_factor(&self) -> Poly {
        Poly::from_terms(2, [(vec![1, 0], self.b.clone()), (vec![0, 1], -&self.a)])
    }

    /// Image under the induced action on roots, `p ↦ σ⁻ᵀp`.
    pub fn moved(&self, sigma: &Matrix) -> Result<ProjPoint> {
        let m = sigma.inverse()?.transpose();
        let v = m.apply(&[self.a.clone(), self.b.clone()]);
        ProjPoint::new(v[0].clone(), v[1].clone())
    }
}

fn fmt_scalar(c: &GaussRat) -> String {
    if c.is_real() {
        c.re.to_string()
    } else if c.re.is_zero() {
        format!("{}i", c.im)
    } else {
        let sign = if c.im < Rational::zero() { "" } else { "+" };
        format!("{}{}{}i", c.re, sign, c.im)
    }
}

impl fmt::Display for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}:{}]", fmt_scalar(&self.a), fmt_scalar(&self.b))
    }
}

fn parse_scalar(s: &str) -> Result<GaussRat> {
    let s = s.trim();
    if let Some(body) = s.strip_suffix('i') {
        // split "re±im" at the last sign that is not the leading one
        let split = body.char_indices().skip(1).filter(|(_, c)| *c == '+' || *c == '-').map(|(i, _)| i).last();
        return match split {
            Some(i) => {
                let im = match &body[i..] {
                    "+" => Rational::one(),
                    "-" => -Rational::one(),
                    t => parse_rational(t.trim_start_matches('+'))?,
                };
                Ok(GaussRat::new(parse_rational(&body[..i])?, im))
            }
            None => {
                let im = match body {
                    "" | "+" => Rational::one(),
                    "-" => -Rational::one(),
                    t => parse_rational(t)?,
                };
                Ok(GaussRat::new(Rational::zero(), im))
            }
        };
    }
    Ok(GaussRat::real(parse_rational(s)?))
}

impl FromStr for ProjPoint {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let inner = s
            .trim()
            .strip_prefix('[')
            .and_then(|t| t.strip_suffix(']'))
            .ok_or_else(|| Error::Parse(format!("expected [a:b], got {s:?}")))?;
        let (a, b) = inner.split_once(':').ok_or_else(|| Error::Parse(format!("expected [a:b], got {s:?}")))?;
        ProjPoint::new(parse_scalar(a)?, parse_scalar(b)?)
    }
}

/// `∏ (b·x − a·y)^m` over distinct points `[a:b]`; degree 0 is the constant 1.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct FactoredBinaryForm {
    factors: BTreeMap<ProjPoint, u32>,
}

impl FactoredBinaryForm {
    pub fn one() -> Self {
        FactoredBinaryForm::default()
    }

    /// Repeated points are merged; zero multiplicities dropped.
    pub fn new(factors: impl IntoIterator<Item = (ProjPoint, u32)>) -> Self {
        let mut map = BTreeMap::new();
        for (p, m) in factors {
            if m > 0 {
                *map.entry(p).or_insert(0) += m;
            }
        }
        FactoredBinaryForm { factors: map }
    }

    pub fn degree(&self) -> u32 {
        self.factors.values().sum()
    }

    pub fn ord(&self, p: &ProjPoint) -> u32 {
        self.factors.get(p).copied().unwrap_or(0)
    }

    pub fn roots(&self) -> impl Iterator<Item = &ProjPoint> {
        self.factors.keys()
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.factors.values().copied().max().unwrap_or(0)
    }

    pub fn transform(&self, sigma: &Matrix) -> Result<FactoredBinaryForm> {
        let moved = self.factors.iter().map(|(p, &m)| Ok((p.moved(sigma)?, m))).collect::<Result<Vec<_>>>()?;
        Ok(FactoredBinaryForm::new(moved))
    }
}

impl fmt::Display for FactoredBinaryForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<String> =
            self.factors.iter().map(|(p, &m)| if m == 1 { p.to_string() } else { format!("{p}^{m}") }).collect();
        write!(f, "{}", parts.join(" * "))
    }
}

impl FromStr for FactoredBinaryForm {
    type Err = Error;
    /// Parses `"[a:b]^m * [c:d] * ..."`; `"1"` is the degree-0 form.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s == "1" || s.is_empty() {
            return Ok(FactoredBinaryForm::one());
        }
        let factors = s
            .split('*')
            .map(|part| {
                let part = part.trim();
                let (pt, mult) = match part.rsplit_once('^') {
                    Some((pt, m)) => {
                        let m: u32 =
                            m.trim().parse().map_err(|_| Error::Parse(format!("bad multiplicity in {part:?}")))?;
                        (pt, m)
                    }
                    None => (part, 1),
                };
                Ok((pt.parse::<ProjPoint>()?, mult))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FactoredBinaryForm::new(factors))
    }
}

impl Serialize for FactoredBinaryForm {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for FactoredBinaryForm {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

pub fn expand(f: &FactoredBinaryForm) -> SparseForm {
    let mut p = Poly::one(2);
    for (pt, &m) in &f.factors {
        p = &p * &pt.linear_factor().pow(m);
    }
    SparseForm::from_poly(Variance::Covariant, p).expect("products of linear forms are nonzero and homogeneous")
}

/// The closed-form criterion, compared in exact rationals.
pub fn closed_form_check(f: &FactoredBinaryForm, g: &FactoredBinaryForm) -> bool {
    let (e, d) = (f.degree(), g.degree());
    if e > d {
        return false;
    }
    let bound = Rational::new((d as i64 - e as i64).into(), 2.into());
    f.roots().chain(g.roots()).all(|p| rat(g.ord(p) as i64 - f.ord(p) as i64) <= bound)
}

fn auxiliary_point(taken: &BTreeSet<ProjPoint>) -> ProjPoint {
    const CANDIDATES: [(i64, i64); 6] = [(3, 1), (5, 2), (-7, 3), (11, 5), (-13, 4), (17, 6)];
    CANDIDATES
        .iter()
        .map(|&(a, b)| ProjPoint::from_ints(a, b).expect("nonzero"))
        .find(|p| !taken.contains(p))
        .expect("finitely many roots")
}

/// Frame whose diagonal torus fixes `p` and `q`: the conjugator `c` has
/// `cᵀp ∝ (0,1)` and `cᵀq ∝ (1,0)`, so transporting a form into the frame
/// moves a root at `p` to `[0:1]` and one at `q` to `[1:0]`.
pub fn frame_fixing(p: &ProjPoint, q: &ProjPoint) -> Result<TorusFrame> {
    let cols = Matrix::from_rows(vec![vec![q.a.clone(), p.a.clone()], vec![q.b.clone(), p.b.clone()]])?;
    let c = cols.inverse()?.transpose();
    TorusFrame::new(c, format!("fixes {p} (attracting), {q}"))
}

/// The points whose ordered pairs index the root-adapted frames: all roots,
/// one auxiliary point off the roots, and `[1:1]`, `[1:-1]` as padding
/// when fewer than two points are available.
pub fn adapted_points(f: &FactoredBinaryForm, g: &FactoredBinaryForm) -> Vec<ProjPoint> {
    let mut pts: BTreeSet<ProjPoint> = f.roots().chain(g.roots()).cloned().collect();
    let aux = auxiliary_point(&pts);
    pts.insert(aux);
    for (a, b) in [(1, 1), (1, -1)] {
        if pts.len() >= 2 {
            break;
        }
        pts.insert(ProjPoint::from_ints(a, b).expect("nonzero"));
    }
    pts.into_iter().collect()
}

/// One frame per ordered pair of distinct adapted points.
pub fn root_adapted_frames(f: &FactoredBinaryForm, g: &FactoredBinaryForm) -> Result<Vec<TorusFrame>> {
    let pts = adapted_points(f, g);
    let mut frames = Vec::with_capacity(pts.len() * (pts.len() - 1));
    for p in &pts {
        for q in &pts {
            if p != q {
                frames.push(frame_fixing(p, q)?);
            }
        }
    }
    Ok(frames)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleReport {
    pub f: FactoredBinaryForm,
    pub g: FactoredBinaryForm,
    pub closed_form: bool,
    pub polytope: PairVerdict,
    pub agree: bool,
}

pub fn oracle_equivalence(f: &FactoredBinaryForm, g: &FactoredBinaryForm) -> Result<OracleReport> {
    let closed_form = closed_form_check(f, g);
    let frames = root_adapted_frames(f, g)?;
    let polytope = check_pair_numerical(&Pair::new(expand(f), expand(g))?, &frames)?;
    Ok(OracleReport {
        f: f.clone(),
        g: g.clone(),
        closed_form,
        agree: closed_form == polytope.is_semistable(),
        polytope,
    })
}

/// All factored forms of degree `deg` supported on `points`.
pub fn forms_of_degree(points: &[ProjPoint], deg: u32) -> Vec<FactoredBinaryForm> {
    fn rec(points: &[ProjPoint], left: u32, acc: &mut Vec<(ProjPoint, u32)>, out: &mut Vec<FactoredBinaryForm>) {
        match points.split_first() {
            None => {
                if left == 0 {
                    out.push(FactoredBinaryForm::new(acc.iter().cloned()));
                }
            }
            Some((p, rest)) => {
                for m in (0..=left).rev() {
                    acc.push((p.clone(), m));
                    rec(rest, left - m, acc, out);
                    acc.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    rec(points, deg, &mut Vec::new(), &mut out);
    out
}

/// The fixed root set `{[0:1], [1:0], [1:1], [1:-1], [2:1]}`.
pub fn standard_points() -> Vec<ProjPoint> {
    [(0, 1), (1, 0), (1, 1), (1, -1), (2, 1)]
        .iter()
        .map(|&(a, b)| ProjPoint::from_ints(a, b).expect("nonzero"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationRow {
    pub f: FactoredBinaryForm,
    pub g: FactoredBinaryForm,
    pub closed_form: bool,
    pub polytope: Status,
    pub frames: usize,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationReport {
    pub instances: usize,
    pub semistable: usize,
    pub mismatches: usize,
    pub rows: Vec<EnumerationRow>,
}

/// Runs the oracle comparison over every pair `(f, g)` with `deg f ∈ e_degrees`,
/// `deg g ∈ d_degrees` and roots in `points`. Weight polytopes are memoized
/// per (form, frame), so each is computed once.
pub fn enumerate_oracle(
    points: &[ProjPoint],
    e_degrees: std::ops::RangeInclusive<u32>,
    d_degrees: std::ops::RangeInclusive<u32>,
) -> Result<EnumerationReport> {
    let fs: Vec<FactoredBinaryForm> = e_degrees.flat_map(|e| forms_of_degree(points, e)).collect();
    let gs: Vec<FactoredBinaryForm> = d_degrees.flat_map(|d| forms_of_degree(points, d)).collect();
    let mut expanded: HashMap<FactoredBinaryForm, SparseForm> = HashMap::new();
    let mut cache: HashMap<(FactoredBinaryForm, ProjPoint, ProjPoint), LatticePolytope> = HashMap::new();
    let one = Rational::one();
    let mut rows = Vec::with_capacity(fs.len() * gs.len());

    for f in &fs {
        for g in &gs {
            let closed_form = closed_form_check(f, g);
            let pts = adapted_points(f, g);
            let mut status = Status::SemistableForTestedTori;
            let mut tested = 0;
            'frames: for p in &pts {
                for q in &pts {
                    if p == q {
                        continue;
                    }
                    tested += 1;
                    let frame = frame_fixing(p, q)?;
                    let mut polytope = |h: &FactoredBinaryForm| -> Result<LatticePolytope> {
                        let key = (h.clone(), p.clone(), q.clone());
                        if let Some(pt) = cache.get(&key) {
                            return Ok(pt.clone());
                        }
                        let form = expanded.entry(h.clone()).or_insert_with(|| expand(h)).clone();
                        let pt = weight_polytope(&form, &frame)?;
                        cache.insert(key, pt.clone());
                        Ok(pt)
                    };
                    let pv = polytope(f)?;
                    let pw = polytope(g)?;
                    let (vf, wf) = (expanded[f].clone(), expanded[g].clone());
                    if certificate_from_polytopes(&vf, &one, &wf, &one, &frame, &pv, &pw)?.is_some() {
                        status = Status::Destabilized;
                        break 'frames;
                    }
                }
            }
            let agree = closed_form == (status == Status::SemistableForTestedTori);
            rows.push(EnumerationRow {
                f: f.clone(),
                g: g.clone(),
                closed_form,
                polytope: status,
                frames: tested,
                agree,
            });
        }
    }
    Ok(EnumerationReport {
        instances: rows.len(),
        semistable: rows.iter().filter(|r| r.closed_form).count(),
        mismatches: rows.iter().filter(|r| !r.agree).count(),
        rows,
    })
}
