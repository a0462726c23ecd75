macro_rules! example {
    ($name:ident) => {
        #[allow(dead_code)]
        mod $name {
            include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/", stringify!($name), ".rs"));
        }
    };
}

example!(kirchhoff_trace);
example!(two_point_delay);
example!(field_reconstruction);
example!(energy_audit);
example!(resolvent_identity);
example!(blowup_analysis);
example!(finite_propagation);

use pointwave::blowup::Verdict;

#[test]
fn kirchhoff_trace_runs() {
    let s = kirchhoff_trace::run_example().unwrap();
    assert_eq!(s.len(), 20);
    assert!(s.iter().all(|(_, v)| v.re.is_finite()));
}

#[test]
fn two_point_delay_runs() {
    let s = two_point_delay::run_example().unwrap();
    let (t, _, z2) = s[15];
    assert!((z2 - t).abs() < 1e-9);
}

#[test]
fn field_reconstruction_runs() {
    let s = field_reconstruction::run_example().unwrap();
    assert!(s.bc_residual < 1e-3);
}

#[test]
fn energy_audit_runs() {
    let (e0, e1) = energy_audit::run_example().unwrap();
    assert!((e1.total - e0.total).abs() / e0.total.abs() < 0.02);
}

#[test]
fn resolvent_identity_runs() {
    let r = resolvent_identity::run_example().unwrap();
    assert!(r.standard < 1e-5);
}

#[test]
fn blowup_analysis_runs() {
    let (a, b) = blowup_analysis::run_example().unwrap();
    assert_eq!(a.verdict, Verdict::GlobalEvidence);
    assert!(matches!(b.verdict, Verdict::BlowupUp(_)));
}

#[test]
fn finite_propagation_runs() {
    let s = finite_propagation::run_example().unwrap();
    assert!(s.iter().filter(|r| r.0 < 0.99).all(|r| r.1 == 0.0));
    assert!(s[5].2 > 1e-6);
}
