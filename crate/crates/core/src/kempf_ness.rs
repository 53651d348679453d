//! The energy `p_{v,w}(σ) = log‖σ·w‖² − log‖σ·v‖²`, its Fubini-Study
//! distance form, and its asymptotics along one-parameter subgroups.
//!
//! Norms-squared are exact rationals; logarithms appear only in reports.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::number::{ln_rational, rational_str, rational_to_f64, GaussRat, Rational};
use crate::stability::{destabilizing_slope, Pair};
use crate::weights::{apply_group_element, psg_matrix, OnePSG, SparseForm, TorusFrame};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MonomialWeights {
    /// Every monomial has weight one.
    #[default]
    Unit,
    /// Weight `∏ a_i! / d!` per block: invariant under unitary substitutions.
    Bombieri,
}

/// Diagonal Hermitian norm on a monomial basis: `‖F‖² = Σ h(a)·|c_a|²`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct HermitianFrame {
    base: MonomialWeights,
    overrides: BTreeMap<Vec<u32>, Rational>,
}

impl HermitianFrame {
    pub fn unit() -> Self {
        HermitianFrame::default()
    }

    pub fn bombieri() -> Self {
        HermitianFrame { base: MonomialWeights::Bombieri, overrides: BTreeMap::new() }
    }

    pub fn with_base(base: MonomialWeights) -> Self {
        HermitianFrame { base, overrides: BTreeMap::new() }
    }

    /// Overrides the weight of one monomial; weights must be positive.
    pub fn with_weight(mut self, exps: Vec<u32>, weight: Rational) -> Result<Self> {
        if !weight.is_positive() {
            return Err(Error::NonPositiveScale);
        }
        self.overrides.insert(exps, weight);
        Ok(self)
    }

    pub fn weight(&self, form: &SparseForm, exps: &[u32]) -> Rational {
        if let Some(w) = self.overrides.get(exps) {
            return w.clone();
        }
        match self.base {
            MonomialWeights::Unit => Rational::one(),
            MonomialWeights::Bombieri => {
                let mut num = BigInt::one();
                let mut den = BigInt::one();
                let mut off = 0;
                for &b in form.blocks() {
                    let chunk = &exps[off..off + b];
                    chunk.iter().for_each(|&a| num *= factorial(a));
                    den *= factorial(chunk.iter().sum());
                    off += b;
                }
                Rational::new(num, den)
            }
        }
    }

    pub fn norm_sq(&self, form: &SparseForm) -> Rational {
        form.poly().terms().iter().fold(Rational::zero(), |acc, (e, c)| acc + self.weight(form, e) * c.norm_sq())
    }

    /// `⟨x, y⟩ = Σ h(a)·x_a·conj(y_a)`; the forms must live in the same module.
    pub fn pairing(&self, x: &SparseForm, y: &SparseForm) -> GaussRat {
        let mut acc = GaussRat::zero();
        for (e, c) in x.poly().terms() {
            let d = y.poly().coeff(e);
            if !d.is_zero() {
                acc += &(&(c * &d.conj()) * &GaussRat::real(self.weight(x, e)));
            }
        }
        acc
    }
}

fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// A vector of `𝕍₁ ⊕ … ⊕ 𝕍ₖ`; `None` is a zero component.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DirectSum(pub Vec<Option<SparseForm>>);

impl DirectSum {
    pub fn norm_sq(&self, h: &HermitianFrame) -> Rational {
        self.0.iter().flatten().fold(Rational::zero(), |acc, f| acc + h.norm_sq(f))
    }

    pub fn pairing(&self, other: &DirectSum, h: &HermitianFrame) -> Result<GaussRat> {
        if self.0.len() != other.0.len() {
            return Err(Error::DimensionMismatch { expected: self.0.len(), found: other.0.len() });
        }
        let mut acc = GaussRat::zero();
        for (x, y) in self.0.iter().zip(&other.0) {
            if let (Some(x), Some(y)) = (x, y) {
                acc += &h.pairing(x, y);
            }
        }
        Ok(acc)
    }

    pub fn act(&self, sigma: &Matrix) -> Result<DirectSum> {
        self.0
            .iter()
            .map(|c| c.as_ref().map(|f| apply_group_element(sigma, f)).transpose())
            .collect::<Result<Vec<_>>>()
            .map(DirectSum)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub sigma: Matrix,
    #[serde(with = "rational_str")]
    pub norm_v_sq: Rational,
    #[serde(with = "rational_str")]
    pub norm_w_sq: Rational,
    pub p: f64,
}

pub fn energy(v: &SparseForm, w: &SparseForm, sigma: &Matrix, h: &HermitianFrame) -> Result<EnergySample> {
    let norm_v_sq = h.norm_sq(&apply_group_element(sigma, v)?);
    let norm_w_sq = h.norm_sq(&apply_group_element(sigma, w)?);
    let p = ln_rational(&norm_w_sq) - ln_rational(&norm_v_sq);
    Ok(EnergySample { sigma: sigma.clone(), norm_v_sq, norm_w_sq, p })
}

/// Fubini-Study angle between two lines, with its complement computed
/// independently so that neither end of `[0, π/2]` loses precision.
#[derive(Clone, Debug, PartialEq)]
pub struct FsAngle {
    pub cos_sq: Rational,
    pub angle: f64,
    pub complement: f64,
}

impl FsAngle {
    pub fn log_tan_sq(&self) -> f64 {
        if self.angle <= std::f64::consts::FRAC_PI_4 {
            2.0 * self.angle.tan().ln()
        } else {
            -2.0 * self.complement.tan().ln()
        }
    }
}

pub fn fs_angle(x: &DirectSum, y: &DirectSum, h: &HermitianFrame) -> Result<FsAngle> {
    let nx = x.norm_sq(h);
    let ny = y.norm_sq(h);
    if nx.is_zero() || ny.is_zero() {
        return Err(Error::ZeroForm);
    }
    let cos_sq = x.pairing(y, h)?.norm_sq() / (nx * ny);
    let sin_sq = Rational::one() - &cos_sq;
    let (c, s) = (rational_to_f64(&cos_sq).sqrt(), rational_to_f64(&sin_sq).sqrt());
    Ok(FsAngle { cos_sq, angle: s.atan2(c), complement: c.atan2(s) })
}

/// `arccos(|⟨x,y⟩| / ‖x‖‖y‖) ∈ [0, π/2]`.
pub fn fs_distance(x: &DirectSum, y: &DirectSum, h: &HermitianFrame) -> Result<f64> {
    Ok(fs_angle(x, y, h)?.angle)
}

/// `|p_{v,w}(σ) − log tan² d(σ·[(v,w)], σ·[(v,0)])|`.
pub fn distance_identity_residual(v: &SparseForm, w: &SparseForm, sigma: &Matrix, h: &HermitianFrame) -> Result<f64> {
    let e = energy(v, w, sigma, h)?;
    let x = DirectSum(vec![Some(v.clone()), Some(w.clone())]).act(sigma)?;
    let y = DirectSum(vec![Some(v.clone()), None]).act(sigma)?;
    let d = fs_angle(&x, &y, h)?;
    Ok((e.p - d.log_tan_sq()).abs())
}

/// `{10⁻¹, …, 10⁻⁶}`.
pub fn default_alpha_grid() -> Vec<Rational> {
    (1..=6).map(|k| Rational::new(BigInt::one(), BigInt::from(10).pow(k))).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeRow {
    #[serde(with = "rational_str")]
    pub alpha: Rational,
    pub log_alpha_sq: f64,
    pub p: f64,
    #[serde(with = "rational_str")]
    pub norm_v_sq: Rational,
    #[serde(with = "rational_str")]
    pub norm_w_sq: Rational,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SlopeReport {
    pub u: OnePSG,
    /// `w_λ(w) − w_λ(v)`.
    #[serde(with = "rational_str")]
    pub exact_slope: Rational,
    /// Secant slope between the two smallest `α`.
    pub fitted_slope: f64,
    pub rounded_slope: i64,
    /// Spread of `p − exact_slope·log α²` over the grid.
    pub drift: f64,
    pub consistent: bool,
    pub rows: Vec<SlopeRow>,
}

/// Evaluates `p` along `λ(α) = c·diag(α^u)·c⁻¹`, where `c` is the frame's conjugator.
pub fn energy_along_psg(
    v: &SparseForm,
    w: &SparseForm,
    u: &OnePSG,
    frame: &TorusFrame,
    h: &HermitianFrame,
    alphas: &[Rational],
) -> Result<SlopeReport> {
    if alphas.len() < 2 {
        return Err(Error::EmptyInput("alpha grid needs at least two points"));
    }
    if alphas.iter().any(|a| !a.is_positive()) {
        return Err(Error::NonPositiveAlpha);
    }
    let exact_slope = destabilizing_slope(&Pair::new(v.clone(), w.clone())?, frame, u)?;
    let c = &frame.conjugator;
    let c_inv = c.inverse()?;
    let mut rows = Vec::with_capacity(alphas.len());
    for a in alphas {
        let sigma = c.mul(&psg_matrix(u, a)?)?.mul(&c_inv)?;
        let s = energy(v, w, &sigma, h)?;
        rows.push(SlopeRow {
            alpha: a.clone(),
            log_alpha_sq: 2.0 * ln_rational(a),
            p: s.p,
            norm_v_sq: s.norm_v_sq,
            norm_w_sq: s.norm_w_sq,
        });
    }
    let mut by_alpha: Vec<&SlopeRow> = rows.iter().collect();
    by_alpha.sort_by(|a, b| a.alpha.cmp(&b.alpha));
    let (r0, r1) = (by_alpha[0], by_alpha[1]);
    let fitted_slope = (r0.p - r1.p) / (r0.log_alpha_sq - r1.log_alpha_sq);
    let rounded_slope = fitted_slope.round() as i64;
    let exact_f = rational_to_f64(&exact_slope);
    let resid: Vec<f64> = rows.iter().map(|r| r.p - exact_f * r.log_alpha_sq).collect();
    let drift =
        resid.iter().cloned().fold(f64::NEG_INFINITY, f64::max) - resid.iter().cloned().fold(f64::INFINITY, f64::min);
    let consistent = exact_slope.is_integer() && exact_slope.to_integer().to_i64() == Some(rounded_slope);
    Ok(SlopeReport { u: u.clone(), exact_slope, fitted_slope, rounded_slope, drift, consistent, rows })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScanConfig {
    pub seed: u64,
    pub samples: usize,
    /// Diagonal entries are `2^k` with `|k| ≤ max_exponent` (the last one balances the determinant).
    pub max_exponent: i64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig { seed: crate::stability::DEFAULT_FRAME_SEED, samples: 64, max_exponent: 8 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanRow {
    pub exponents: Vec<i64>,
    pub p: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanReport {
    pub config: ScanConfig,
    pub min_p: f64,
    pub argmin: EnergySample,
    pub rows: Vec<ScanRow>,
}

/// Rational rotation by the Pythagorean parameter `t`: `cos = (1−t²)/(1+t²)`, `sin = 2t/(1+t²)`.
pub fn givens(n: usize, i: usize, j: usize, t: &Rational) -> Matrix {
    let one = Rational::one();
    let den = &one + t * t;
    let c = GaussRat::real((&one - t * t) / &den);
    let s = GaussRat::real(Rational::from_integer(2.into()) * t / &den);
    let mut m = Matrix::identity(n);
    m.set(i, i, c.clone());
    m.set(j, j, c);
    m.set(i, j, -&s);
    m.set(j, i, s);
    m
}

fn random_rotation(n: usize, rng: &mut ChaCha8Rng) -> Matrix {
    let mut m = Matrix::identity(n);
    for i in 0..n {
        for j in i + 1..n {
            let t = Rational::new(rng.gen_range(-5i64..=5).into(), rng.gen_range(1i64..=5).into());
            m = m.mul(&givens(n, i, j, &t)).expect("same size");
        }
    }
    m
}

/// Heuristic probe of `inf p` over `σ = κ₁·t·κ₂` with rational rotations `κᵢ`
/// and `t = diag(2^k)`, `Σk = 0`. A small value is evidence, never a proof.
pub fn energy_scan(v: &SparseForm, w: &SparseForm, h: &HermitianFrame, config: &ScanConfig) -> Result<ScanReport> {
    if config.samples == 0 {
        return Err(Error::EmptyInput("scan samples"));
    }
    let n = Pair::new(v.clone(), w.clone())?.group_dim();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let two = GaussRat::from_int(2);
    let mut rows = Vec::with_capacity(config.samples);
    let mut best: Option<EnergySample> = None;
    for _ in 0..config.samples {
        let k1 = random_rotation(n, &mut rng);
        let k2 = random_rotation(n, &mut rng);
        let mut ks: Vec<i64> = (0..n - 1).map(|_| rng.gen_range(-config.max_exponent..=config.max_exponent)).collect();
        ks.push(-ks.iter().sum::<i64>());
        let t = Matrix::diagonal(ks.iter().map(|&k| two.powi(k)).collect::<Result<Vec<_>>>()?);
        let sigma = k1.mul(&t)?.mul(&k2)?;
        let s = energy(v, w, &sigma, h)?;
        rows.push(ScanRow { exponents: ks, p: s.p });
        if best.as_ref().is_none_or(|b| s.p < b.p) {
            best = Some(s);
        }
    }
    let argmin = best.expect("at least one sample");
    Ok(ScanReport { config: config.clone(), min_p: argmin.p, argmin, rows })
}
