use std::time::Instant;

use semistab::curves::{equivariance_check, equivariance_test_set, CurveStabilityData, PlaneCurve};
use semistab::stability::{default_frames, DEFAULT_FRAME_SEED};
use semistab::weights::SparseForm;

#[test]
fn cubic_equivariance() {
    let start = Instant::now();
    let c = PlaneCurve::fermat(3).unwrap();
    for s in equivariance_test_set().iter().take(2) {
        let r = equivariance_check(&c, s).unwrap();
        assert!(r.holds(), "{s}: {r:?}");
    }
    eprintln!("cubic equivariance {:.1?}", start.elapsed());
}

#[test]
fn non_fermat_cubic_pipeline() {
    // a smooth member of the Hesse pencil
    let f = SparseForm::covariant(3, &[(&[3, 0, 0], 1), (&[0, 3, 0], 1), (&[0, 0, 3], 1), (&[1, 1, 1], 1)]).unwrap();
    let c = PlaneCurve::new(f).unwrap();
    assert!(c.is_smooth());
    let data = CurveStabilityData::new(&c).unwrap();
    assert_eq!(data.delta_x.degrees(), vec![6]);
    let frames = default_frames(3, 5, DEFAULT_FRAME_SEED);
    let report = data.frame_report(&frames).unwrap();
    assert_eq!(report.len(), 6);
    assert_eq!(report.iter().all(|f| f.certificate.is_none()), data.check(&frames).unwrap().is_semistable());
}

#[test]
fn quartic_degrees() {
    let data = CurveStabilityData::new(&PlaneCurve::fermat(4).unwrap()).unwrap();
    assert_eq!(data.delta_x.degrees(), vec![12]);
    assert_eq!(data.degrees.r, 96);
}
