use splitstep_bench::{c3, gue, ising};

#[test]
fn fixtures_have_expected_shapes() {
    assert_eq!(gue(16).dim(), 16);
    assert_eq!(ising(8).dim(), 256);
    assert_eq!(c3().n_terms(), 2);
}
