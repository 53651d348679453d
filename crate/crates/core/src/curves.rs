//! Plane curves `F = 0` in `ℙ²`: the resultant `R_X(u, v) = F(u × v)` on
//! pairs of lines, the dual curve `Δ_X`, and the polytope test
//! `deg Δ·𝒩(R_X) ⊆ deg R·𝒩(Δ_X)` for lower bounds of the K-energy
//! restricted to Bergman metrics.
//!
//! The normalized powers `R_X^{deg Δ}` and `Δ_X^{deg R}` are never expanded;
//! their polytopes are scaled copies.

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::elimination::{normalize, resultant, to_univariate, uni_gcd, uni_is_constant};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::number::{rat, GaussRat, Rational};
use crate::poly::Poly;
use crate::stability::{check_scaled_pair, scaled_frame_check, Certificate, Pair, PairVerdict, Status};
use crate::weights::{apply_group_element, SparseForm, TorusFrame, Variance};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PlaneCurve {
    form: SparseForm,
    degree: u32,
    smooth: bool,
}

impl PlaneCurve {
    /// Validates `F` and decides smoothness exactly. Singular curves are
    /// accepted here; operations that need smoothness refuse them.
    pub fn new(form: SparseForm) -> Result<Self> {
        if form.variance() != Variance::Covariant || form.blocks() != [3] {
            return Err(Error::InvalidForm("a plane curve is a covariant form in 3 variables".into()));
        }
        let degree = form.degrees()[0];
        if degree < 2 {
            return Err(Error::DegreeTooSmall(degree));
        }
        let smooth = is_smooth(&form)?;
        Ok(PlaneCurve { form, degree, smooth })
    }

    pub fn fermat(d: u32) -> Result<Self> {
        PlaneCurve::new(SparseForm::covariant(3, &[(&[d, 0, 0], 1), (&[0, d, 0], 1), (&[0, 0, d], 1)])?)
    }

    pub fn form(&self) -> &SparseForm {
        &self.form
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn is_smooth(&self) -> bool {
        self.smooth
    }

    pub fn transform(&self, sigma: &Matrix) -> Result<PlaneCurve> {
        PlaneCurve::new(apply_group_element(sigma, &self.form)?)
    }
}

fn smoothness_probes() -> Vec<Matrix> {
    [
        [[1, 0, 1], [0, 1, 1], [1, 1, 1]],
        [[1, 2, 3], [-1, 1, 2], [2, -1, 1]],
        [[3, -1, 2], [1, 4, -2], [-2, 1, 5]],
        [[2, 7, -3], [5, -1, 4], [-3, 2, 6]],
    ]
    .iter()
    .map(|m| Matrix::from_ints(&[&m[0], &m[1], &m[2]]).expect("3x3"))
    .collect()
}

/// Exact smoothness test. After a generic linear change of coordinates the
/// gradient components `P, Q, S` are monic in `z`; then a common zero of all
/// three forces a common root of `Res_z(P,Q)` and `Res_z(P,S)` on `ℙ¹`.
/// A trivial gcd certifies smoothness; if no probe certifies, the curve is
/// reported singular.
pub fn is_smooth(form: &SparseForm) -> Result<bool> {
    let d = form.degrees()[0];
    for t in smoothness_probes() {
        let g = apply_group_element(&t, form)?;
        let grads: Vec<Poly> = (0..3).map(|i| g.poly().derivative(i)).collect();
        if grads.iter().any(|p| p.coeff_in(2, d - 1).is_zero()) {
            continue;
        }
        let a = resultant(&grads[0], &grads[1], 2, d - 1, d - 1)?;
        let b = resultant(&grads[0], &grads[2], 2, d - 1, d - 1)?;
        if a.is_zero() || b.is_zero() {
            continue;
        }
        let top = vec![(d - 1) * (d - 1), 0, 0];
        if a.coeff(&top).is_zero() && b.coeff(&top).is_zero() {
            continue;
        }
        let one = GaussRat::one();
        let ua = to_univariate(&a.specialize(1, &one), 0)?;
        let ub = to_univariate(&b.specialize(1, &one), 0)?;
        if uni_is_constant(&uni_gcd(&ua, &ub)) {
            return Ok(true);
        }
    }
    Ok(false)
}

/// `R_X(u, v) = F(u × v)`, contravariant on two blocks of 3.
pub fn x_resultant(curve: &PlaneCurve) -> Result<SparseForm> {
    let var = |i| Poly::var(6, i);
    let (u, v) = ((0..3).map(var).collect::<Vec<_>>(), (3..6).map(var).collect::<Vec<_>>());
    let cross = |i: usize, j: usize| &(&u[i] * &v[j]) - &(&u[j] * &v[i]);
    let images = [cross(1, 2), cross(2, 0), cross(0, 1)];
    SparseForm::new(vec![3, 3], Variance::Contravariant, curve.form.poly().compose(&images))
}

/// Dual curve of `F` (restricted to `w ≠ 0`, the line `ux + vy + wz = 0` is
/// `(wx, wy, −(ux + vy))`); its binary restriction of `F` has a double root
/// exactly on tangent lines. The discriminant, taken as `Res_x(g_x, g_y)` at
/// `y = 1`, carries a spurious power of `w` that is stripped.
fn dual_with_pivot_last(form: &Poly, d: u32) -> Result<Poly> {
    // ring: x, y, u, v, w
    let var = |i| Poly::var(5, i);
    let (x, y, u, v, w) = (var(0), var(1), var(2), var(3), var(4));
    let z_image = -&(&(&u * &x) + &(&v * &y));
    let g = form.compose(&[&w * &x, &w * &y, z_image]);
    let one = GaussRat::one();
    let gx = g.derivative(0).specialize(1, &one);
    let gy = g.derivative(1).specialize(1, &one);
    let res = resultant(&gx, &gy, 0, d - 1, d - 1)?;
    if res.is_zero() {
        return Err(Error::Elimination("discriminant of the line restriction vanishes identically".into()));
    }
    let (stripped, _) = res.restrict(&[2, 3, 4]).strip_var_power(2);
    Ok(stripped)
}

/// The dual curve `Δ_X`: contravariant, degree exactly `d(d − 1)`.
pub fn hyperdiscriminant(curve: &PlaneCurve) -> Result<SparseForm> {
    if !curve.smooth {
        return Err(Error::SingularCurve);
    }
    let d = curve.degree;
    let target = d * (d - 1);
    let mut degrees = Vec::new();
    // the pivot coordinate is moved last; `perm[i]` is the source of variable i
    for perm in [[0, 1, 2], [1, 2, 0], [2, 0, 1]] {
        let f = curve.form.poly().permute_vars(&perm);
        let dual = dual_with_pivot_last(&f, d)?;
        let mut inv = [0; 3];
        for (i, &p) in perm.iter().enumerate() {
            inv[p] = i;
        }
        let dual = dual.permute_vars(&inv);
        match dual.homogeneous_degree_in(0..3) {
            Some(k) if k == target => {
                return SparseForm::new(vec![3], Variance::Contravariant, normalize(&dual));
            }
            k => degrees.push(k),
        }
    }
    Err(Error::Elimination(format!("eliminated dual has degrees {degrees:?} after content removal, expected {target}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveDegrees {
    pub degree: u32,
    pub deg_r: u64,
    pub deg_delta: u64,
    pub mu: i64,
    pub r: u64,
    /// `d(n+1)(n(n+1)d − dμ)` with `n = 1`.
    pub r_formula: i64,
}

pub fn degrees_and_mu(d: u32) -> Result<CurveDegrees> {
    if d < 2 {
        return Err(Error::DegreeTooSmall(d));
    }
    let dd = d as i64;
    let (n, mu) = (1i64, 3 - dd);
    let deg_r = 2 * d as u64;
    let deg_delta = (d * (d - 1)) as u64;
    let r = deg_r * deg_delta;
    let r_formula = dd * (n + 1) * (n * (n + 1) * dd - dd * mu);
    if r_formula != r as i64 {
        return Err(Error::Elimination(format!("degree identity fails: {r} vs {r_formula}")));
    }
    Ok(CurveDegrees { degree: d, deg_r, deg_delta, mu, r, r_formula })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveStabilityData {
    pub degrees: CurveDegrees,
    pub r_x: SparseForm,
    pub delta_x: SparseForm,
}

impl CurveStabilityData {
    pub fn new(curve: &PlaneCurve) -> Result<Self> {
        let degrees = degrees_and_mu(curve.degree)?;
        let r_x = x_resultant(curve)?;
        let delta_x = hyperdiscriminant(curve)?;
        if r_x.degrees().iter().sum::<u32>() as u64 != degrees.deg_r || delta_x.degrees()[0] as u64 != degrees.deg_delta
        {
            return Err(Error::Elimination("computed degrees disagree with the degree table".into()));
        }
        Ok(CurveStabilityData { degrees, r_x, delta_x })
    }

    fn scales(&self) -> (Rational, Rational) {
        (rat(self.degrees.deg_delta as i64), rat(self.degrees.deg_r as i64))
    }

    /// The pair `(R_X, Δ_X)` with scales `(deg Δ, deg R)`.
    pub fn check(&self, frames: &[TorusFrame]) -> Result<PairVerdict> {
        let (sr, sd) = self.scales();
        check_scaled_pair(&Pair::new(self.r_x.clone(), self.delta_x.clone())?, &sr, &sd, frames)
    }

    /// Roles reversed: `deg R·𝒩(Δ_X) ⊆ deg Δ·𝒩(R_X)`. A sanity check only.
    pub fn check_swapped(&self, frames: &[TorusFrame]) -> Result<PairVerdict> {
        let (sr, sd) = self.scales();
        check_scaled_pair(&Pair::new(self.delta_x.clone(), self.r_x.clone())?, &sd, &sr, frames)
    }

    /// One verdict per frame, without stopping at the first destabilizer.
    pub fn frame_report(&self, frames: &[TorusFrame]) -> Result<Vec<FrameVerdict>> {
        let (sr, sd) = self.scales();
        frames
            .iter()
            .map(|f| {
                let cert = scaled_frame_check(&self.r_x, &sr, &self.delta_x, &sd, f)?;
                Ok(FrameVerdict {
                    frame: f.description.clone(),
                    status: if cert.is_some() { Status::Destabilized } else { Status::SemistableForTestedTori },
                    certificate: cert,
                })
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameVerdict {
    pub frame: String,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
}

pub fn mabuchi_bound_check(curve: &PlaneCurve, frames: &[TorusFrame]) -> Result<PairVerdict> {
    CurveStabilityData::new(curve)?.check(frames)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivarianceReport {
    pub sigma: Matrix,
    /// `det(σ)^d`: the factor with `R_{σ·F} = det(σ)^d · σ·R_F`.
    pub expected_r_factor: GaussRat,
    pub r_factor: Option<GaussRat>,
    pub r_holds: bool,
    /// `c` with `Δ_{σ·F} = c · σ·Δ_F`.
    pub delta_factor: Option<GaussRat>,
    pub delta_holds: bool,
}

impl EquivarianceReport {
    pub fn holds(&self) -> bool {
        self.r_holds && self.delta_holds
    }
}

/// Exact check of `R(σ·X) = σ·R(X)` (up to `det(σ)^d`, which is one on `SL(3)`)
/// and `Δ(σ·X) ∝ σ·Δ(X)`.
pub fn equivariance_check(curve: &PlaneCurve, sigma: &Matrix) -> Result<EquivarianceReport> {
    let moved = curve.transform(sigma)?;
    let r_moved = x_resultant(&moved)?;
    let r_acted = apply_group_element(sigma, &x_resultant(curve)?)?;
    let expected_r_factor = sigma.det().pow(curve.degree);
    let r_factor = r_moved.poly().proportionality(r_acted.poly());
    let d_moved = hyperdiscriminant(&moved)?;
    let d_acted = apply_group_element(sigma, &hyperdiscriminant(curve)?)?;
    let delta_factor = d_moved.poly().proportionality(d_acted.poly());
    Ok(EquivarianceReport {
        sigma: sigma.clone(),
        r_holds: r_factor.as_ref() == Some(&expected_r_factor),
        expected_r_factor,
        r_factor,
        delta_holds: delta_factor.is_some(),
        delta_factor,
    })
}

/// Fixed `SL(3, ℤ)` test elements: a cyclic permutation, shears, and two products.
pub fn equivariance_test_set() -> Vec<Matrix> {
    [
        [[0, 1, 0], [0, 0, 1], [1, 0, 0]],
        [[1, 1, 0], [0, 1, 0], [0, 0, 1]],
        [[1, 0, 0], [2, 1, 0], [-1, 0, 1]],
        [[2, 1, 0], [1, 1, 0], [0, 0, 1]],
        [[1, 2, -1], [0, 1, 3], [1, 2, 0]],
    ]
    .iter()
    .map(|m| Matrix::from_ints(&[&m[0], &m[1], &m[2]]).expect("3x3"))
    .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::ratio;
    use crate::stability::{default_frames, replay_certificate, DEFAULT_FRAME_SEED};

    fn ternary(terms: &[(&[u32], i64)]) -> SparseForm {
        SparseForm::covariant(3, terms).unwrap()
    }

    fn contra(terms: &[(&[u32], i64)]) -> Poly {
        Poly::from_terms(3, terms.iter().map(|(e, c)| (e.to_vec(), GaussRat::from_int(*c))))
    }

    #[test]
    fn test_set_is_special_linear() {
        for s in equivariance_test_set() {
            assert_eq!(s.det(), GaussRat::one());
        }
    }

    #[test]
    fn smoothness() {
        assert!(PlaneCurve::fermat(2).unwrap().is_smooth());
        assert!(PlaneCurve::fermat(3).unwrap().is_smooth());
        assert!(PlaneCurve::fermat(4).unwrap().is_smooth());
        // cuspidal cubic, node, line pair
        let cusp = PlaneCurve::new(ternary(&[(&[0, 2, 1], 1), (&[3, 0, 0], -1)])).unwrap();
        assert!(!cusp.is_smooth());
        let node = PlaneCurve::new(ternary(&[(&[0, 2, 1], 1), (&[3, 0, 0], -1), (&[2, 0, 1], -1)])).unwrap();
        assert!(!node.is_smooth());
        let pair = PlaneCurve::new(ternary(&[(&[2, 0, 0], 1), (&[0, 2, 0], 1)])).unwrap();
        assert!(!pair.is_smooth());
        assert_eq!(hyperdiscriminant(&cusp).unwrap_err(), Error::SingularCurve);
        assert_eq!(PlaneCurve::new(ternary(&[(&[1, 0, 0], 1)])).unwrap_err(), Error::DegreeTooSmall(1));
    }

    #[test]
    fn x_resultant_is_cross_product_substitution() {
        let c = PlaneCurve::fermat(2).unwrap();
        let r = x_resultant(&c).unwrap();
        assert_eq!(r.degrees(), vec![2, 2]);
        let pt = |xs: [i64; 6]| xs.iter().map(|&x| GaussRat::from_int(x)).collect::<Vec<_>>();
        for xs in [[1, 2, 3, -1, 0, 4], [2, -5, 1, 3, 3, -2]] {
            let p = pt(xs);
            let cross = [
                &(&p[1] * &p[5]) - &(&p[2] * &p[4]),
                &(&p[2] * &p[3]) - &(&p[0] * &p[5]),
                &(&p[0] * &p[4]) - &(&p[1] * &p[3]),
            ];
            assert_eq!(r.poly().eval(&p), c.form().poly().eval(&cross));
        }
        // lines through a point of z·(x² + y² − z²) = 0 make R vanish
        let cubic = PlaneCurve::new(ternary(&[(&[2, 0, 1], 1), (&[0, 2, 1], 1), (&[0, 0, 3], -1)])).unwrap();
        let r = x_resultant(&cubic).unwrap();
        // u = z-line {z = 0}, v = {y = 0}: they meet at [1:0:0], on z = 0
        assert!(r.poly().eval(&pt([0, 0, 1, 0, 1, 0])).is_zero());
        assert!(!r.poly().eval(&pt([1, 0, 0, 0, 1, 0])).is_zero());
    }

    #[test]
    fn dual_conics() {
        let d = hyperdiscriminant(&PlaneCurve::fermat(2).unwrap()).unwrap();
        assert_eq!(d.poly(), &contra(&[(&[2, 0, 0], 1), (&[0, 2, 0], 1), (&[0, 0, 2], 1)]));
        assert_eq!(d.variance(), Variance::Contravariant);
        // a x² + b y² + c z² is dual to u²/a + v²/b + w²/c
        let c = PlaneCurve::new(ternary(&[(&[2, 0, 0], 2), (&[0, 2, 0], 3), (&[0, 0, 2], 5)])).unwrap();
        let d = hyperdiscriminant(&c).unwrap();
        let expected = Poly::from_terms(
            3,
            [
                (vec![2, 0, 0], GaussRat::real(ratio(1, 2))),
                (vec![0, 2, 0], GaussRat::real(ratio(1, 3))),
                (vec![0, 0, 2], GaussRat::real(ratio(1, 5))),
            ],
        );
        assert!(d.poly().proportionality(&expected).is_some());
    }

    #[test]
    fn dual_of_general_conic_is_adjugate() {
        // symmetric matrix A = [[2,1,0],[1,3,1],[0,1,4]]; dual form is ξᵀ adj(A) ξ
        let c = PlaneCurve::new(ternary(&[
            (&[2, 0, 0], 2),
            (&[1, 1, 0], 2),
            (&[0, 2, 0], 3),
            (&[0, 1, 1], 2),
            (&[0, 0, 2], 4),
        ]))
        .unwrap();
        let d = hyperdiscriminant(&c).unwrap();
        // adj(A) = [[11,-4,1],[-4,8,-2],[1,-2,5]]
        let adj = contra(&[
            (&[2, 0, 0], 11),
            (&[1, 1, 0], -8),
            (&[1, 0, 1], 2),
            (&[0, 2, 0], 8),
            (&[0, 1, 1], -4),
            (&[0, 0, 2], 5),
        ]);
        assert!(d.poly().proportionality(&adj).is_some());
        // biduality: the dual of the dual conic is the original
        let dual_as_curve =
            PlaneCurve::new(SparseForm::new(vec![3], Variance::Covariant, d.poly().clone()).unwrap()).unwrap();
        let back = hyperdiscriminant(&dual_as_curve).unwrap();
        assert!(back.poly().proportionality(c.form().poly()).is_some());
    }

    #[test]
    fn dual_fermat_cubic() {
        let d = hyperdiscriminant(&PlaneCurve::fermat(3).unwrap()).unwrap();
        let expected = contra(&[
            (&[6, 0, 0], 1),
            (&[0, 6, 0], 1),
            (&[0, 0, 6], 1),
            (&[3, 3, 0], -2),
            (&[0, 3, 3], -2),
            (&[3, 0, 3], -2),
        ]);
        assert_eq!(d.poly(), &expected);
        assert_eq!(d.degrees(), vec![6]);
    }

    #[test]
    fn degree_table() {
        let t: Vec<_> = (2..=4).map(|d| degrees_and_mu(d).unwrap()).collect();
        assert_eq!((t[0].deg_r, t[0].deg_delta, t[0].mu, t[0].r), (4, 2, 1, 8));
        assert_eq!((t[1].deg_r, t[1].deg_delta, t[1].mu, t[1].r), (6, 6, 0, 36));
        assert_eq!((t[2].deg_delta, t[2].mu, t[2].r), (12, -1, 96));
        assert_eq!(degrees_and_mu(1).unwrap_err(), Error::DegreeTooSmall(1));
    }

    #[test]
    fn equivariance_on_conic() {
        let c = PlaneCurve::fermat(2).unwrap();
        for s in equivariance_test_set() {
            let r = equivariance_check(&c, &s).unwrap();
            assert!(r.holds(), "{s}: {r:?}");
        }
        let id = equivariance_check(&c, &Matrix::identity(3)).unwrap();
        assert_eq!(id.r_factor, Some(GaussRat::one()));
        assert_eq!(id.delta_factor, Some(GaussRat::one()));
        // a non-unimodular σ picks up det(σ)^d on R
        let s = Matrix::from_ints(&[&[2, 0, 0], &[0, 1, 0], &[1, 0, 1]]).unwrap();
        let r = equivariance_check(&c, &s).unwrap();
        assert_eq!(r.expected_r_factor, GaussRat::from_int(4));
        assert!(r.holds());
    }

    #[test]
    fn fermat_curves_are_contained() {
        let frames = default_frames(3, 5, DEFAULT_FRAME_SEED);
        for d in [2, 3] {
            let data = CurveStabilityData::new(&PlaneCurve::fermat(d).unwrap()).unwrap();
            let v = data.check(&frames).unwrap();
            assert!(v.is_semistable(), "d = {d}: {v:?}");
            assert_eq!(v.tested_frames, 6);
        }
    }

    #[test]
    fn swapped_roles_separate() {
        let data = CurveStabilityData::new(&PlaneCurve::fermat(2).unwrap()).unwrap();
        let v = data.check_swapped(&[TorusFrame::identity(3)]).unwrap();
        assert_eq!(v.status, Status::Destabilized);
        let cert = v.certificate.unwrap();
        replay_certificate(&data.delta_x, &data.r_x, &cert).unwrap();
        // deg_Δ·w_λ(R_X) > deg_R·w_λ(Δ_X) under the reversed roles
        assert!(cert.margin > Rational::zero());
    }

    #[test]
    fn scaling_exponents_together_keeps_verdict() {
        let data = CurveStabilityData::new(&PlaneCurve::fermat(2).unwrap()).unwrap();
        let frames = default_frames(3, 3, 7);
        let pair = Pair::new(data.r_x.clone(), data.delta_x.clone()).unwrap();
        let base = data.check(&frames).unwrap().status;
        for k in [2, 5] {
            let v = check_scaled_pair(&pair, &rat(2 * k), &rat(4 * k), &frames).unwrap();
            assert_eq!(v.status, base);
        }
    }
}
