use zeroset_core::testfns::kernel_normalization;
use zeroset_core::Tolerances;

#[test]
fn probe() {
    for r in [0.1, 1.0, 10.0] {
        let q = kernel_normalization(r, &Tolerances::default()).unwrap();
        eprintln!("r={r}: value={} err={} panels={} conv={}", q.value, q.abs_err, q.panels, q.converged);
    }
}
