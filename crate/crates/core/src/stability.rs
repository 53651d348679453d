//! Numerical semistability of pairs `(v, w)`: `𝒩(v) ⊆ 𝒩(w)` for every
//! tested torus, or a one-parameter subgroup with `w_λ(w) > w_λ(v)`.
//!
//! Only a destabilized verdict is absolute. A semistable verdict holds for
//! the frames that were tested.

use num_bigint::BigInt;
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{contains_polytope, scale_polytope, Containment, LatticePolytope};
use crate::matrix::Matrix;
use crate::number::{primitive_integer, rational_str, Rational};
use crate::weights::{one_psg_weight, weight_polytope, OnePSG, SparseForm, TorusFrame};

/// Seed of the default shear family.
pub const DEFAULT_FRAME_SEED: u64 = 1729;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Pair {
    pub v: SparseForm,
    pub w: SparseForm,
}

impl Pair {
    pub fn new(v: SparseForm, w: SparseForm) -> Result<Self> {
        let (nv, nw) = (v.block_size()?, w.block_size()?);
        if nv != nw {
            return Err(Error::DimensionMismatch { expected: nv, found: nw });
        }
        Ok(Pair { v, w })
    }

    pub fn group_dim(&self) -> usize {
        self.v.block_size().expect("validated")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    SemistableForTestedTori,
    Destabilized,
}

/// A replayable destabilizer: in `frame`, the 1-PSG `u` satisfies
/// `w_scale·w_λ(w) − v_scale·w_λ(v) = margin > 0`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub frame: TorusFrame,
    pub u: OnePSG,
    #[serde(with = "rational_str")]
    pub weight_v: Rational,
    #[serde(with = "rational_str")]
    pub weight_w: Rational,
    #[serde(with = "rational_str")]
    pub v_scale: Rational,
    #[serde(with = "rational_str")]
    pub w_scale: Rational,
    #[serde(with = "rational_str")]
    pub margin: Rational,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairVerdict {
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    pub tested_frames: usize,
}

impl PairVerdict {
    pub fn is_semistable(&self) -> bool {
        self.status == Status::SemistableForTestedTori
    }
}

/// Turns a separating direction of sum-zero polytopes into an SL cocharacter
/// on the same ray (pairings with sum-zero points scale by a positive factor).
fn sl_cocharacter(u: &[BigInt]) -> Result<OnePSG> {
    let n = BigInt::from(u.len());
    let s: BigInt = u.iter().sum();
    let shifted: Vec<Rational> = u.iter().map(|x| Rational::from_integer(x * &n - &s)).collect();
    OnePSG::new(primitive_integer(&shifted))
}

/// Containment test of `a·𝒩(v)` in `b·𝒩(w)` for one frame.
pub fn scaled_frame_check(
    v: &SparseForm,
    v_scale: &Rational,
    w: &SparseForm,
    w_scale: &Rational,
    frame: &TorusFrame,
) -> Result<Option<Certificate>> {
    let pv = scale_polytope(&weight_polytope(v, frame)?, v_scale)?;
    let pw = scale_polytope(&weight_polytope(w, frame)?, w_scale)?;
    certificate_from_polytopes(v, v_scale, w, w_scale, frame, &pv, &pw)
}

pub(crate) fn certificate_from_polytopes(
    v: &SparseForm,
    v_scale: &Rational,
    w: &SparseForm,
    w_scale: &Rational,
    frame: &TorusFrame,
    pv: &LatticePolytope,
    pw: &LatticePolytope,
) -> Result<Option<Certificate>> {
    match contains_polytope(pv, pw)? {
        Containment::Contained => Ok(None),
        Containment::Separated { u, .. } => {
            let u = sl_cocharacter(&u)?;
            let weight_v = one_psg_weight(v, frame, &u)?;
            let weight_w = one_psg_weight(w, frame, &u)?;
            let margin = w_scale * &weight_w - v_scale * &weight_v;
            if !margin.is_positive() {
                return Err(Error::Replay(format!("separating direction has margin {margin}")));
            }
            Ok(Some(Certificate {
                frame: frame.clone(),
                u,
                weight_v,
                weight_w,
                v_scale: v_scale.clone(),
                w_scale: w_scale.clone(),
                margin,
            }))
        }
    }
}

/// Runs the frames in order and stops at the first destabilizer.
pub fn check_scaled_pair(
    pair: &Pair,
    v_scale: &Rational,
    w_scale: &Rational,
    frames: &[TorusFrame],
) -> Result<PairVerdict> {
    if frames.is_empty() {
        return Err(Error::EmptyFrames);
    }
    for (i, frame) in frames.iter().enumerate() {
        if let Some(cert) = scaled_frame_check(&pair.v, v_scale, &pair.w, w_scale, frame)? {
            return Ok(PairVerdict { status: Status::Destabilized, certificate: Some(cert), tested_frames: i + 1 });
        }
    }
    Ok(PairVerdict { status: Status::SemistableForTestedTori, certificate: None, tested_frames: frames.len() })
}

pub fn check_pair_numerical(pair: &Pair, frames: &[TorusFrame]) -> Result<PairVerdict> {
    check_scaled_pair(pair, &Rational::one(), &Rational::one(), frames)
}

/// `w_λ(w) − w_λ(v)`: the coefficient of `log|α|²` in the energy along `λ`.
pub fn destabilizing_slope(pair: &Pair, frame: &TorusFrame, u: &OnePSG) -> Result<Rational> {
    Ok(one_psg_weight(&pair.w, frame, u)? - one_psg_weight(&pair.v, frame, u)?)
}

/// Classical Hilbert-Mumford test: the pair `(1, w)`.
pub fn hilbert_mumford_check(w: &SparseForm, frames: &[TorusFrame]) -> Result<PairVerdict> {
    let n = w.block_size()?;
    check_pair_numerical(&Pair::new(SparseForm::constant_one(n), w.clone())?, frames)
}

/// Recomputes both weights of a certificate and checks the stored margin.
pub fn replay_certificate(v: &SparseForm, w: &SparseForm, cert: &Certificate) -> Result<()> {
    let wv = one_psg_weight(v, &cert.frame, &cert.u)?;
    let ww = one_psg_weight(w, &cert.frame, &cert.u)?;
    if wv != cert.weight_v || ww != cert.weight_w {
        return Err(Error::Replay(format!(
            "weights ({wv}, {ww}) differ from stored ({}, {})",
            cert.weight_v, cert.weight_w
        )));
    }
    let margin = &cert.w_scale * &ww - &cert.v_scale * &wv;
    if margin != cert.margin {
        return Err(Error::Replay(format!("margin {margin} differs from stored {}", cert.margin)));
    }
    if !margin.is_positive() {
        return Err(Error::Replay(format!("margin {margin} is not positive")));
    }
    Ok(())
}

/// Identity followed by `count` unimodular frames `L·U` (unit lower times
/// unit upper triangular, off-diagonal entries uniform in `-3..=3`) drawn
/// from a ChaCha8 stream seeded with `seed`.
pub fn default_frames(n: usize, count: usize, seed: u64) -> Vec<TorusFrame> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut frames = vec![TorusFrame::identity(n)];
    while frames.len() < count + 1 {
        let mut lower = Matrix::identity(n);
        let mut upper = Matrix::identity(n);
        for i in 0..n {
            for j in 0..i {
                lower.set(i, j, crate::number::GaussRat::from_int(rng.gen_range(-3..=3)));
                upper.set(j, i, crate::number::GaussRat::from_int(rng.gen_range(-3..=3)));
            }
        }
        let c = lower.mul(&upper).expect("same size");
        if c == Matrix::identity(n) || frames.iter().any(|f| f.conjugator == c) {
            continue;
        }
        let k = frames.len();
        frames.push(TorusFrame { conjugator: c, description: format!("shear #{k} (seed {seed})") });
    }
    frames
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number::rat;
    use crate::weights::apply_group_element;

    fn binary(terms: &[(&[u32], i64)]) -> SparseForm {
        SparseForm::covariant(2, terms).unwrap()
    }

    #[test]
    fn equal_forms_are_semistable() {
        let f = binary(&[(&[3, 0], 1), (&[1, 2], -2)]);
        let v = check_pair_numerical(&Pair::new(f.clone(), f).unwrap(), &default_frames(2, 6, 3)).unwrap();
        assert!(v.is_semistable());
        assert_eq!(v.tested_frames, 7);
    }

    #[test]
    fn square_vs_fourth_power_destabilized() {
        let pair = Pair::new(binary(&[(&[2, 0], 1)]), binary(&[(&[4, 0], 1)])).unwrap();
        let v = check_pair_numerical(&pair, &[TorusFrame::identity(2)]).unwrap();
        assert_eq!(v.status, Status::Destabilized);
        let c = v.certificate.unwrap();
        assert_eq!(c.u, OnePSG::from_ints(&[1, -1]).unwrap());
        assert_eq!((c.weight_v.clone(), c.weight_w.clone()), (rat(2), rat(4)));
        assert_eq!(c.margin, rat(2));
        replay_certificate(&pair.v, &pair.w, &c).unwrap();
    }

    #[test]
    fn trivial_v_with_centered_w() {
        let w = binary(&[(&[2, 2], 1), (&[4, 0], 1), (&[0, 4], 1)]);
        let v = hilbert_mumford_check(&w, &default_frames(2, 4, DEFAULT_FRAME_SEED)).unwrap();
        assert!(v.is_semistable());
    }

    #[test]
    fn hilbert_mumford_examples() {
        let id = [TorusFrame::identity(2)];
        let d = hilbert_mumford_check(&binary(&[(&[3, 1], 1)]), &id).unwrap();
        let c = d.certificate.clone().unwrap();
        assert_eq!(c.u, OnePSG::from_ints(&[1, -1]).unwrap());
        assert_eq!(c.margin, rat(2));
        assert!(hilbert_mumford_check(&binary(&[(&[1, 1], 1)]), &id).unwrap().is_semistable());
    }

    #[test]
    fn slope_examples() {
        let id = TorusFrame::identity(2);
        let u = OnePSG::from_ints(&[1, -1]).unwrap();
        let p = Pair::new(binary(&[(&[2, 0], 1)]), binary(&[(&[4, 0], 1)])).unwrap();
        assert_eq!(destabilizing_slope(&p, &id, &u).unwrap(), rat(2));
        let f = binary(&[(&[2, 1], 1), (&[0, 3], 4)]);
        let same = Pair::new(f.clone(), f).unwrap();
        assert_eq!(destabilizing_slope(&same, &id, &u).unwrap(), rat(0));
        let q = Pair::new(binary(&[(&[1, 1], 1)]), binary(&[(&[2, 2], 1)])).unwrap();
        assert_eq!(destabilizing_slope(&q, &id, &u).unwrap(), rat(0));
    }

    #[test]
    fn errors_propagate() {
        let f = binary(&[(&[1, 1], 1)]);
        let p = Pair::new(f.clone(), f.clone()).unwrap();
        assert_eq!(check_pair_numerical(&p, &[]), Err(Error::EmptyFrames));
        let g = SparseForm::covariant(3, &[(&[1, 0, 0], 1)]).unwrap();
        assert!(Pair::new(f, g).is_err());
    }

    #[test]
    fn adding_frames_keeps_destabilizer_and_scaling_is_irrelevant() {
        let v = binary(&[(&[2, 1], 1), (&[0, 3], 1)]);
        let w = binary(&[(&[5, 0], 1), (&[4, 1], 2)]);
        let frames = default_frames(2, 8, 11);
        for k in 1..=frames.len() {
            let verdict = check_pair_numerical(&Pair::new(v.clone(), w.clone()).unwrap(), &frames[..k]).unwrap();
            let scaled = Pair::new(v.scale(&crate::number::GaussRat::from_int(-7)).unwrap(), w.clone()).unwrap();
            assert_eq!(verdict.status, check_pair_numerical(&scaled, &frames[..k]).unwrap().status);
            if k > 1 {
                let prev = check_pair_numerical(&Pair::new(v.clone(), w.clone()).unwrap(), &frames[..k - 1]).unwrap();
                if prev.status == Status::Destabilized {
                    assert_eq!(verdict.status, Status::Destabilized);
                }
            }
        }
    }

    #[test]
    fn default_frames_are_unimodular_and_reproducible() {
        let a = default_frames(3, 5, DEFAULT_FRAME_SEED);
        let b = default_frames(3, 5, DEFAULT_FRAME_SEED);
        assert_eq!(a, b);
        assert_eq!(a.len(), 6);
        for f in &a {
            assert_eq!(f.conjugator.det(), crate::number::GaussRat::from_int(1));
        }
    }

    #[test]
    fn certificates_replay_in_moved_frames() {
        // (x², x⁴) moved to ((x+2y)², (x+2y)⁴): contained in the identity
        // frame, destabilized in the frame that undoes the move.
        let s = Matrix::from_ints(&[&[1, 0], &[2, 1]]).unwrap();
        let v = apply_group_element(&s, &binary(&[(&[2, 0], 1)])).unwrap();
        let w = apply_group_element(&s, &binary(&[(&[4, 0], 1)])).unwrap();
        assert!(check_pair_numerical(&Pair::new(v.clone(), w.clone()).unwrap(), &[TorusFrame::identity(2)])
            .unwrap()
            .is_semistable());
        let frames = vec![TorusFrame::identity(2), TorusFrame::new(s, "s").unwrap()];
        let verdict = check_pair_numerical(&Pair::new(v.clone(), w.clone()).unwrap(), &frames).unwrap();
        assert_eq!(verdict.status, Status::Destabilized);
        assert_eq!(verdict.tested_frames, 2);
        let cert = verdict.certificate.unwrap();
        replay_certificate(&v, &w, &cert).unwrap();
        let mut bad = cert.clone();
        bad.margin = &bad.margin + rat(1);
        assert!(replay_certificate(&v, &w, &bad).is_err());
    }
}
