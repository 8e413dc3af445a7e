use awlab_core::qcore::Precision;
use awlab_core::suite::{run_group, run_suite, Group, Suite, SuiteConfig};

fn failing(r: &[awlab_core::report::CheckReport]) -> Vec<String> {
    r.iter().filter(|c| !c.pass).map(|c| format!("{} {:e} {}", c.check_id, c.residual, c.notes)).collect()
}

#[test]
fn all_suites_pass_at_several_points() {
    for (q, n, n1, n2) in [(0.5, 3, 2, 1), (0.8, 6, 3, 3), (0.7, 1, 1, 0)] {
        let cfg = SuiteConfig { q, n, n1, n2, ..Default::default() };
        let r = run_suite(Suite::All, &cfg, Precision::Double).unwrap();
        assert!(failing(&r).is_empty(), "q={q}: {:#?}", failing(&r));
    }
}

#[test]
fn extended_precision_reaches_thirty_digits() {
    let r = run_suite(Suite::Aw3, &SuiteConfig::default(), Precision::Extended).unwrap();
    let d = r.iter().find(|c| c.check_id == "precision.extended_digits").expect("digits check");
    assert!(d.pass && d.residual <= 1e-30, "{d:?}");
    assert!(r.iter().all(|c| c.params["precision"] == "extended"));
}

#[test]
fn check_ids_are_stable_between_precisions() {
    let cfg = SuiteConfig::default();
    let ids = |p| {
        let mut v: Vec<String> = run_suite(Suite::All, &cfg, p)
            .unwrap()
            .into_iter()
            .map(|c| c.check_id)
            .filter(|id| id != "precision.extended_digits")
            .collect();
        v.dedup();
        v
    };
    assert_eq!(ids(Precision::Double), ids(Precision::Extended));
}

#[test]
fn ill_conditioned_groups_are_promoted() {
    let cfg = SuiteConfig { q: 0.5, n: 8, ..Default::default() };
    let r = run_group::<f64>(Group::QRacah, &cfg);
    assert!(r.iter().all(|c| c.params["precision"] == "extended (auto)"), "{r:#?}");
    assert!(failing(&r).is_empty());
}

#[test]
fn corruption_is_detected_and_named() {
    let cfg = SuiteConfig { corrupt: Some(1e-3), ..Default::default() };
    let r = run_suite(Suite::All, &cfg, Precision::Double).unwrap();
    let f = failing(&r);
    assert!(f.iter().any(|x| x.starts_with("aw3.relations")), "{f:?}");
    assert!(f.iter().any(|x| x.starts_with("rank2.relation.")), "{f:?}");
    assert!(r.iter().filter(|c| c.warning).all(|c| c.pass));
}

#[test]
fn invalid_q_is_rejected() {
    for q in [1.2, 1.0, 0.0, -0.3, f64::NAN] {
        let cfg = SuiteConfig { q, ..Default::default() };
        let e = run_suite(Suite::Aw3, &cfg, Precision::Double).unwrap_err();
        assert!(e.to_string().contains("0 < q < 1"), "{e}");
    }
}

#[test]
fn adjudications_are_resolved_and_named() {
    let r = run_suite(Suite::All, &SuiteConfig::default(), Precision::Double).unwrap();
    let adj: Vec<_> = r.iter().filter(|c| c.check_id.contains(".adjudicate.")).collect();
    assert!(adj.len() >= 10);
    for c in adj {
        assert!(c.pass && c.warning && c.notes.starts_with("resolved: "), "{c:?}");
    }
}
