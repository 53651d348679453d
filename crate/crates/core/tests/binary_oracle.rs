use std::time::Instant;

use semistab::binary::{enumerate_oracle, standard_points};

#[test]
fn exhaustive_enumeration_agrees_with_closed_form() {
    let start = Instant::now();
    let report = enumerate_oracle(&standard_points(), 0..=5, 0..=5).unwrap();
    // 252 forms of degree ≤ 5 on five points
    assert_eq!(report.instances, 252 * 252);
    assert_eq!(report.mismatches, 0, "{:?}", report.rows.iter().find(|r| !r.agree));
    assert!(report.semistable > 0 && report.semistable < report.instances);
    eprintln!("{} pairs, {} semistable, {:.1?}", report.instances, report.semistable, start.elapsed());
}
