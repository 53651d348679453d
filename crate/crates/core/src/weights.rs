//! Forms as vectors of a representation, the group action on them, and
//! their weight-space decomposition under conjugated maximal tori.
//!
//! Conventions. A matrix `σ` acts on a covariant form by `F(x) ↦ F(σᵀx)` and
//! on a contravariant (dual-coordinate) form by `G(ξ) ↦ G(σ⁻¹ξ)`; both are
//! left actions, and the pairing `Σ xᵢξᵢ` is invariant. Under a diagonal
//! element `diag(t^u)` the monomial `x^a` therefore scales by `t^⟨u,a⟩` in
//! the covariant case and `t^-⟨u,a⟩` in the contravariant one. Characters
//! are taken in `ℤⁿ` and immediately projected to the sum-zero hyperplane
//! (the SL character space). Multi-block forms (one copy of the standard
//! variables per block) carry the sum of their block characters.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::geometry::{convex_hull, quotient_project, LatticePolytope, RationalVector};
use crate::matrix::Matrix;
use crate::number::{rational_str, GaussRat, Rational};
use crate::poly::Poly;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Variance {
    #[serde(rename = "co")]
    Covariant,
    #[serde(rename = "contra")]
    Contravariant,
}

/// A nonzero (multi-)homogeneous polynomial, viewed as a vector of a
/// polynomial representation of `GL(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SparseForm {
    blocks: Vec<usize>,
    variance: Variance,
    poly: Poly,
}

impl SparseForm {
    pub fn new(blocks: Vec<usize>, variance: Variance, poly: Poly) -> Result<Self> {
        if blocks.is_empty() || blocks.contains(&0) {
            return Err(Error::InvalidForm("blocks must be nonempty and positive".into()));
        }
        let total: usize = blocks.iter().sum();
        if total != poly.nvars() {
            return Err(Error::InvalidForm(format!(
                "blocks cover {total} variables but the form has {}",
                poly.nvars()
            )));
        }
        if poly.is_zero() {
            return Err(Error::ZeroForm);
        }
        let mut off = 0;
        for &b in &blocks {
            if poly.homogeneous_degree_in(off..off + b).is_none() {
                return Err(Error::InvalidForm(format!("not homogeneous in variables {off}..{}", off + b)));
            }
            off += b;
        }
        Ok(SparseForm { blocks, variance, poly })
    }

    /// Single-block form.
    pub fn from_poly(variance: Variance, poly: Poly) -> Result<Self> {
        let n = poly.nvars();
        SparseForm::new(vec![n], variance, poly)
    }

    /// Covariant single-block form from integer-coefficient terms.
    pub fn covariant(nvars: usize, terms: &[(&[u32], i64)]) -> Result<Self> {
        let poly = Poly::from_terms(nvars, terms.iter().map(|(e, c)| (e.to_vec(), GaussRat::from_int(*c))));
        SparseForm::from_poly(Variance::Covariant, poly)
    }

    /// The constant `1`: the trivial one-dimensional module, weight zero.
    pub fn constant_one(nvars: usize) -> Self {
        SparseForm { blocks: vec![nvars], variance: Variance::Covariant, poly: Poly::one(nvars) }
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn poly(&self) -> &Poly {
        &self.poly
    }

    pub fn num_vars(&self) -> usize {
        self.poly.nvars()
    }

    /// Common block size, i.e. the `n` of the acting `GL(n)`.
    pub fn block_size(&self) -> Result<usize> {
        let n = self.blocks[0];
        if self.blocks.iter().any(|&b| b != n) {
            return Err(Error::InvalidForm("blocks of unequal size".into()));
        }
        Ok(n)
    }

    /// Degree in each block.
    pub fn degrees(&self) -> Vec<u32> {
        let mut off = 0;
        self.blocks
            .iter()
            .map(|&b| {
                let d = self.poly.homogeneous_degree_in(off..off + b).expect("validated");
                off += b;
                d
            })
            .collect()
    }

    pub fn scale(&self, c: &GaussRat) -> Result<SparseForm> {
        SparseForm::new(self.blocks.clone(), self.variance, self.poly.scale(c))
    }

    /// The projected character of the monomial with exponent vector `exps`.
    pub fn character(&self, exps: &[u32]) -> Result<RationalVector> {
        let n = self.block_size()?;
        let mut sum = vec![0i64; n];
        for chunk in exps.chunks(n) {
            for (s, &e) in sum.iter_mut().zip(chunk) {
                *s += e as i64;
            }
        }
        if self.variance == Variance::Contravariant {
            sum.iter_mut().for_each(|s| *s = -*s);
        }
        Ok(quotient_project(&RationalVector::from_ints(&sum)))
    }

    /// Hermitian norm-squared with all monomial weights one.
    pub fn norm_sq(&self) -> Rational {
        self.poly.terms().values().fold(Rational::zero(), |acc, c| acc + c.norm_sq())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exps: Vec<u32>,
    #[serde(with = "rational_str")]
    re: Rational,
    #[serde(with = "rational_str", default = "Rational::zero")]
    im: Rational,
}

#[derive(Serialize, Deserialize)]
struct SparseFormJson {
    vars: usize,
    variance: Variance,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    blocks: Option<Vec<usize>>,
    terms: Vec<TermJson>,
}

impl Serialize for SparseForm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SparseFormJson {
            vars: self.num_vars(),
            variance: self.variance,
            blocks: Some(self.blocks.clone()),
            terms: self
                .poly
                .terms()
                .iter()
                .map(|(e, c)| TermJson { exps: e.clone(), re: c.re.clone(), im: c.im.clone() })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for SparseForm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let j = SparseFormJson::deserialize(d)?;
        if let Some(t) = j.terms.iter().find(|t| t.exps.len() != j.vars) {
            return Err(serde::de::Error::custom(format!(
                "term exponent vector {:?} does not have {} entries",
                t.exps, j.vars
            )));
        }
        let poly = Poly::from_terms(j.vars, j.terms.into_iter().map(|t| (t.exps, GaussRat::new(t.re, t.im))));
        SparseForm::new(j.blocks.unwrap_or_else(|| vec![j.vars]), j.variance, poly).map_err(serde::de::Error::custom)
    }
}

/// A maximal torus, given as the diagonal torus conjugated by `conjugator`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "TorusFrameJson")]
pub struct TorusFrame {
    pub conjugator: Matrix,
    #[serde(default)]
    pub description: String,
}

#[derive(Deserialize)]
struct TorusFrameJson {
    conjugator: Matrix,
    #[serde(default)]
    description: String,
}

impl TryFrom<TorusFrameJson> for TorusFrame {
    type Error = Error;
    fn try_from(j: TorusFrameJson) -> Result<Self> {
        TorusFrame::new(j.conjugator, j.description)
    }
}

impl TorusFrame {
    pub fn new(conjugator: Matrix, description: impl Into<String>) -> Result<Self> {
        if !conjugator.is_invertible() {
            return Err(Error::SingularMatrix);
        }
        Ok(TorusFrame { conjugator, description: description.into() })
    }

    pub fn identity(n: usize) -> Self {
        TorusFrame { conjugator: Matrix::identity(n), description: "identity".into() }
    }

    pub fn size(&self) -> usize {
        self.conjugator.size()
    }
}

/// An integral one-parameter subgroup `α ↦ diag(α^u)` of the diagonal torus,
/// normalized to a sum-zero (SL) cocharacter.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "OnePsgJson")]
pub struct OnePSG {
    #[serde(with = "crate::number::bigint_vec")]
    pub u: Vec<BigInt>,
}

#[derive(Deserialize)]
struct OnePsgJson {
    #[serde(with = "crate::number::bigint_vec")]
    u: Vec<BigInt>,
}

impl TryFrom<OnePsgJson> for OnePSG {
    type Error = Error;
    fn try_from(j: OnePsgJson) -> Result<Self> {
        OnePSG::new(j.u)
    }
}

impl OnePSG {
    /// Vectors with nonzero coordinate sum are replaced by the primitive
    /// integer vector on the ray of their projection.
    pub fn new(u: Vec<BigInt>) -> Result<Self> {
        if u.is_empty() {
            return Err(Error::EmptyInput("cocharacter"));
        }
        let n = BigInt::from(u.len());
        let sum: BigInt = u.iter().sum();
        let u = if sum.is_zero() {
            u
        } else {
            let shifted: Vec<Rational> = u.iter().map(|x| Rational::from_integer(x * &n - &sum)).collect();
            crate::number::primitive_integer(&shifted)
        };
        if u.iter().all(|x| x.is_zero()) {
            return Err(Error::TrivialOnePsg);
        }
        Ok(OnePSG { u })
    }

    pub fn from_ints(u: &[i64]) -> Result<Self> {
        OnePSG::new(u.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn dim(&self) -> usize {
        self.u.len()
    }

    pub fn negated(&self) -> OnePSG {
        OnePSG { u: self.u.iter().map(|x| -x).collect() }
    }
}

/// `𝒜(v)` together with the weight components `v_a`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightSupport {
    pub weights: Vec<RationalVector>,
    /// Components in the original coordinates; they sum to `v`.
    pub components: BTreeMap<RationalVector, SparseForm>,
}

impl WeightSupport {
    pub fn reconstruct(&self) -> Poly {
        let mut it = self.components.values();
        let first = it.next().expect("support is nonempty").poly().clone();
        it.fold(first, |acc, c| &acc + c.poly())
    }
}

/// `ρ(σ)·v` for the action described in the module docs.
pub fn apply_group_element(sigma: &Matrix, v: &SparseForm) -> Result<SparseForm> {
    let n = v.block_size()?;
    if sigma.size() != n {
        return Err(Error::SizeMismatch { matrix: sigma.size(), block: n });
    }
    let subst = match v.variance {
        Variance::Covariant => {
            if !sigma.is_invertible() {
                return Err(Error::SingularMatrix);
            }
            sigma.transpose()
        }
        Variance::Contravariant => sigma.inverse()?,
    };
    let nv = v.num_vars();
    let mut images = Vec::with_capacity(nv);
    for b in 0..v.blocks.len() {
        let off = b * n;
        for j in 0..n {
            let lin = Poly::from_terms(
                nv,
                (0..n).map(|i| {
                    let mut e = vec![0; nv];
                    e[off + i] = 1;
                    (e, subst.get(j, i).clone())
                }),
            );
            images.push(lin);
        }
    }
    SparseForm::new(v.blocks.clone(), v.variance, v.poly.compose(&images))
}

fn check_frame(v: &SparseForm, frame: &TorusFrame) -> Result<usize> {
    let n = v.block_size()?;
    if frame.size() != n {
        return Err(Error::SizeMismatch { matrix: frame.size(), block: n });
    }
    Ok(n)
}

/// `v` written in the frame's diagonal coordinates.
pub fn transport_to_frame(v: &SparseForm, frame: &TorusFrame) -> Result<SparseForm> {
    check_frame(v, frame)?;
    if frame.conjugator == Matrix::identity(frame.size()) {
        return Ok(v.clone());
    }
    apply_group_element(&frame.conjugator.inverse()?, v)
}

/// Support `𝒜(v)` relative to the frame's torus.
pub fn weight_set(v: &SparseForm, frame: &TorusFrame) -> Result<BTreeSet<RationalVector>> {
    let t = transport_to_frame(v, frame)?;
    t.poly.terms().keys().map(|e| t.character(e)).collect()
}

pub fn weight_decompose(v: &SparseForm, frame: &TorusFrame) -> Result<WeightSupport> {
    let t = transport_to_frame(v, frame)?;
    let mut groups: BTreeMap<RationalVector, Poly> = BTreeMap::new();
    for (e, c) in t.poly.terms() {
        groups.entry(t.character(e)?).or_insert_with(|| Poly::zero(t.num_vars())).add_term(e.clone(), c);
    }
    let back = frame.conjugator.clone();
    let identity = back == Matrix::identity(back.size());
    let mut components = BTreeMap::new();
    for (w, p) in groups {
        let comp = SparseForm::new(v.blocks.clone(), v.variance, p)?;
        let comp = if identity { comp } else { apply_group_element(&back, &comp)? };
        components.insert(w, comp);
    }
    Ok(WeightSupport { weights: components.keys().cloned().collect(), components })
}

/// `𝒩(v)`: convex hull of the support in the quotient character space.
pub fn weight_polytope(v: &SparseForm, frame: &TorusFrame) -> Result<LatticePolytope> {
    let pts: Vec<RationalVector> = weight_set(v, frame)?.into_iter().collect();
    convex_hull(&pts)
}

/// `w_λ(v) = min { ⟨u, a⟩ : a ∈ 𝒜(v) }`.
pub fn one_psg_weight(v: &SparseForm, frame: &TorusFrame, u: &OnePSG) -> Result<Rational> {
    let n = check_frame(v, frame)?;
    if u.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, found: u.dim() });
    }
    Ok(weight_set(v, frame)?.iter().map(|a| a.dot_int(&u.u)).min().expect("nonzero form"))
}

/// `diag(α^u)` for a rational `α > 0`.
pub fn psg_matrix(u: &OnePSG, alpha: &Rational) -> Result<Matrix> {
    let a = GaussRat::real(alpha.clone());
    let diag =
        u.u.iter()
            .map(|k| {
                let k: i64 = k.try_into().map_err(|_| Error::InvalidForm("cocharacter entry too large".into()))?;
                a.powi(k)
            })
            .collect::<Result<Vec<_>>>()?;
    if diag.iter().any(|x| x.is_zero()) {
        return Err(Error::NonPositiveAlpha);
    }
    Ok(Matrix::diagonal(diag))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::minimize_linear;
    use crate::number::{rat, ratio};
    use proptest::prelude::*;

    fn binary(terms: &[(&[u32], i64)]) -> SparseForm {
        SparseForm::covariant(2, terms).unwrap()
    }

    fn pt(c: &[i64]) -> RationalVector {
        RationalVector::from_ints(c)
    }

    #[test]
    fn swap_and_identity_actions() {
        let f = binary(&[(&[2, 1], 1)]);
        let swap = Matrix::from_ints(&[&[0, 1], &[1, 0]]).unwrap();
        assert_eq!(apply_group_element(&swap, &f).unwrap(), binary(&[(&[1, 2], 1)]));
        assert_eq!(apply_group_element(&Matrix::identity(2), &f).unwrap(), f);
    }

    #[test]
    fn shear_expands_square() {
        // x ↦ x, y ↦ x + y under the transpose of the lower shear
        let lower = Matrix::from_ints(&[&[1, 0], &[1, 1]]).unwrap();
        let x2 = binary(&[(&[2, 0], 1)]);
        let hand = binary(&[(&[2, 0], 1), (&[1, 1], 2), (&[0, 2], 1)]);
        assert_eq!(apply_group_element(&lower, &x2).unwrap(), hand);
        let upper = Matrix::from_ints(&[&[1, 1], &[0, 1]]).unwrap();
        let y2 = binary(&[(&[0, 2], 1)]);
        assert_eq!(apply_group_element(&upper, &y2).unwrap(), hand);
    }

    #[test]
    fn action_errors() {
        let f = binary(&[(&[2, 0], 1)]);
        let sing = Matrix::from_ints(&[&[1, 1], &[1, 1]]).unwrap();
        assert_eq!(apply_group_element(&sing, &f), Err(Error::SingularMatrix));
        assert!(matches!(apply_group_element(&Matrix::identity(3), &f), Err(Error::SizeMismatch { .. })));
    }

    #[test]
    fn action_is_a_left_action_both_variances() {
        let a = Matrix::from_ints(&[&[1, 2], &[0, 1]]).unwrap();
        let b = Matrix::from_ints(&[&[2, 0], &[1, 1]]).unwrap();
        let ab = a.mul(&b).unwrap();
        for var in [Variance::Covariant, Variance::Contravariant] {
            let f = SparseForm::from_poly(
                var,
                Poly::from_terms(2, [(vec![3, 0], GaussRat::from_int(1)), (vec![1, 2], GaussRat::from_int(-2))]),
            )
            .unwrap();
            let lhs = apply_group_element(&a, &apply_group_element(&b, &f).unwrap()).unwrap();
            let rhs = apply_group_element(&ab, &f).unwrap();
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn decomposition_identity_frame() {
        let f = binary(&[(&[2, 0], 1), (&[1, 1], 1)]);
        let ws = weight_decompose(&f, &TorusFrame::identity(2)).unwrap();
        assert_eq!(ws.weights, vec![pt(&[0, 0]), pt(&[1, -1])]);
        assert_eq!(ws.reconstruct(), *f.poly());
    }

    #[test]
    fn monomial_has_single_weight() {
        let f = binary(&[(&[3, 1], 5)]);
        let d = Matrix::from_ints(&[&[2, 0], &[0, -3]]).unwrap();
        let ws = weight_decompose(&f, &TorusFrame::new(d, "diag").unwrap()).unwrap();
        assert_eq!(ws.weights.len(), 1);
    }

    #[test]
    fn sheared_frame_decomposition() {
        // x² + y² seen through the shear: the transported form is
        // x² + (y - x)² = 2x² - 2xy + y²
        let f = binary(&[(&[2, 0], 1), (&[0, 2], 1)]);
        let frame = TorusFrame::new(Matrix::from_ints(&[&[1, 1], &[0, 1]]).unwrap(), "shear").unwrap();
        let t = transport_to_frame(&f, &frame).unwrap();
        assert_eq!(t, binary(&[(&[2, 0], 2), (&[1, 1], -2), (&[0, 2], 1)]));
        let ws = weight_decompose(&f, &frame).unwrap();
        assert_eq!(ws.weights, vec![pt(&[-1, 1]), pt(&[0, 0]), pt(&[1, -1])]);
        assert_eq!(ws.reconstruct(), *f.poly());
    }

    #[test]
    fn polytope_examples() {
        let id = TorusFrame::identity(2);
        let p = weight_polytope(&binary(&[(&[3, 1], 1)]), &id).unwrap();
        assert_eq!(p.vertices, vec![pt(&[1, -1])]);
        let q = weight_polytope(&binary(&[(&[4, 0], 1), (&[0, 4], 1)]), &id).unwrap();
        assert_eq!(q.vertices, vec![pt(&[-2, 2]), pt(&[2, -2])]);
        let generic = binary(&[(&[4, 0], 1), (&[3, 1], 2), (&[2, 2], -1), (&[1, 3], 7), (&[0, 4], 3)]);
        assert_eq!(weight_polytope(&generic, &id).unwrap(), q);
    }

    #[test]
    fn weight_examples() {
        let id = TorusFrame::identity(2);
        let u = OnePSG::from_ints(&[1, -1]).unwrap();
        let v = binary(&[(&[3, 1], 1), (&[1, 3], 1)]);
        assert_eq!(one_psg_weight(&v, &id, &u).unwrap(), rat(-2));
        // direct pairing: ⟨(1,-1),(1,-1)⟩ = 2, ⟨(1,-1),(2,-2)⟩ = 4
        assert_eq!(one_psg_weight(&binary(&[(&[2, 0], 1)]), &id, &u).unwrap(), rat(2));
        assert_eq!(one_psg_weight(&binary(&[(&[4, 0], 1)]), &id, &u).unwrap(), rat(4));
        let m = binary(&[(&[2, 5], 1)]);
        let u2 = OnePSG::from_ints(&[3, -3]).unwrap();
        let expected = pt(&[2, 5]);
        let proj = quotient_project(&expected);
        assert_eq!(one_psg_weight(&m, &id, &u2).unwrap(), proj.dot_int(&u2.u));
    }

    #[test]
    fn contravariant_weights_are_negated() {
        let f =
            SparseForm::from_poly(Variance::Contravariant, Poly::monomial(vec![2, 0], GaussRat::from_int(1))).unwrap();
        let p = weight_polytope(&f, &TorusFrame::identity(2)).unwrap();
        assert_eq!(p.vertices, vec![pt(&[-1, 1])]);
    }

    #[test]
    fn one_psg_normalization() {
        assert_eq!(OnePSG::from_ints(&[1, 0]).unwrap().u, vec![BigInt::from(1), BigInt::from(-1)]);
        assert_eq!(OnePSG::from_ints(&[2, 2]), Err(Error::TrivialOnePsg));
        assert_eq!(OnePSG::from_ints(&[2, -2]).unwrap().u, vec![BigInt::from(2), BigInt::from(-2)]);
    }

    #[test]
    fn form_validation_and_json() {
        assert_eq!(SparseForm::covariant(2, &[]), Err(Error::ZeroForm));
        assert!(matches!(SparseForm::covariant(2, &[(&[2, 0], 1), (&[1, 0], 1)]), Err(Error::InvalidForm(_))));
        let f = SparseForm::new(
            vec![2, 2],
            Variance::Contravariant,
            Poly::from_terms(4, [(vec![1, 0, 0, 2], GaussRat::new(ratio(1, 2), rat(-1)))]),
        )
        .unwrap();
        let s = serde_json::to_string(&f).unwrap();
        assert_eq!(
            s,
            r#"{"vars":4,"variance":"contra","blocks":[2,2],"terms":[{"exps":[1,0,0,2],"re":"1/2","im":"-1"}]}"#
        );
        let back: SparseForm = serde_json::from_str(&s).unwrap();
        assert_eq!(back, f);
        let plain: SparseForm =
            serde_json::from_str(r#"{"vars":2,"variance":"co","terms":[{"exps":[1,1],"re":"3"}]}"#).unwrap();
        assert_eq!(plain, binary(&[(&[1, 1], 3)]));
        assert_eq!(f.character(&[1, 0, 0, 2]).unwrap(), RationalVector(vec![ratio(1, 2), ratio(-1, 2)]));
    }

    fn arb_ternary() -> impl Strategy<Value = SparseForm> {
        (1u32..=3).prop_flat_map(|d| {
            prop::collection::vec(((0..=d), (0..=d), -4i64..=4), 1..=5).prop_filter_map("zero form", move |ts| {
                let terms: Vec<(Vec<u32>, GaussRat)> = ts
                    .into_iter()
                    .filter(|(a, b, _)| a + b <= d)
                    .map(|(a, b, c)| (vec![a, b, d - a - b], GaussRat::from_int(c)))
                    .collect();
                SparseForm::from_poly(Variance::Covariant, Poly::from_terms(3, terms)).ok()
            })
        })
    }

    fn arb_unimodular() -> impl Strategy<Value = Matrix> {
        prop::collection::vec(-2i64..=2, 6).prop_map(|e| {
            let l = Matrix::from_ints(&[&[1, 0, 0], &[e[0], 1, 0], &[e[1], e[2], 1]]).unwrap();
            let u = Matrix::from_ints(&[&[1, e[3], e[4]], &[0, 1, e[5]], &[0, 0, 1]]).unwrap();
            l.mul(&u).unwrap()
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn components_reconstruct(f in arb_ternary(), c in arb_unimodular()) {
            let frame = TorusFrame::new(c, "random").unwrap();
            let ws = weight_decompose(&f, &frame).unwrap();
            prop_assert_eq!(ws.reconstruct(), f.poly().clone());
        }

        #[test]
        fn frame_covariance(f in arb_ternary(), c in arb_unimodular(), s in arb_unimodular()) {
            let moved = apply_group_element(&s, &f).unwrap();
            let f1 = TorusFrame::new(c.clone(), "c").unwrap();
            let f2 = TorusFrame::new(s.mul(&c).unwrap(), "sc").unwrap();
            prop_assert_eq!(weight_polytope(&moved, &f2).unwrap(), weight_polytope(&f, &f1).unwrap());
        }

        #[test]
        fn weight_matches_polytope_minimum(f in arb_ternary(), u in prop::collection::vec(-3i64..=3, 3)) {
            prop_assume!(OnePSG::from_ints(&u).is_ok());
            let u = OnePSG::from_ints(&u).unwrap();
            let id = TorusFrame::identity(3);
            let p = weight_polytope(&f, &id).unwrap();
            prop_assert_eq!(one_psg_weight(&f, &id, &u).unwrap(), minimize_linear(&p, &u.u).unwrap());
        }

        #[test]
        fn limit_characterization(f in arb_ternary(), u in prop::collection::vec(-3i64..=3, 3)) {
            // α^{-w} λ(α)·v stays bounded as α → 0 and keeps the weight-w
            // component fixed; the other coefficients shrink by α^k, k ≥ 1.
            prop_assume!(OnePSG::from_ints(&u).is_ok());
            let u = OnePSG::from_ints(&u).unwrap();
            let id = TorusFrame::identity(3);
            let w = one_psg_weight(&f, &id, &u).unwrap();
            prop_assert!(w.is_integer());
            let alpha = ratio(1, 1000);
            let moved = apply_group_element(&psg_matrix(&u, &alpha).unwrap(), &f).unwrap();
            let wi: i64 = w.to_integer().try_into().unwrap();
            let rescaled = moved.poly().scale(&GaussRat::real(alpha.clone()).powi(-wi).unwrap());
            let mut fixed = 0;
            for (e, c) in rescaled.terms() {
                let orig = f.poly().coeff(e);
                if *c == orig {
                    fixed += 1;
                } else {
                    prop_assert!(c.norm_sq() * rat(1_000_000) <= orig.norm_sq());
                }
            }
            prop_assert!(fixed > 0);
        }
    }
}
