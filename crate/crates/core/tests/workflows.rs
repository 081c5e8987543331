use std::f64::consts::PI;

use phaselab::intelligent::{make_expminus_intelligent, scan_intelligent_nogo, lambda_circle};
use phaselab::phase::{wrapped_phase_variance, PhaseFunction};
use phaselab::relations::{evaluate_phase_number_relations, evaluate_relations};
use phaselab::state::{make_fock_state, make_two_mode_superposition, seeded_random_state};
use phaselab::variational::{
    cylinder_branch_analysis, minimize_product, minimize_sum, neighborhood_witness, product_stationarity_residual,
    sum_stationarity_residual, BranchKind, Mode, VariationalConfig,
};
use phaselab::{Complex64, FockVector};

#[test]
fn state_file_round_trip_preserves_relations() {
    let s = make_expminus_intelligent(1, Complex64::new(0.7, 0.2), 40).unwrap();
    let back = FockVector::from_json(&s.to_json()).unwrap();
    assert_eq!(s, back);
    assert_eq!(s.digest(), back.digest());
    let a = evaluate_relations(&s, PhaseFunction::ExpMinus);
    let b = evaluate_relations(&back, PhaseFunction::ExpMinus);
    assert_eq!(a, b);
    assert!(a.rs_saturated);
}

#[test]
fn phase_number_relations_hold_on_random_states() {
    for i in 0..50 {
        let s = seeded_random_state(12, 3, i);
        let r = evaluate_phase_number_relations(&s);
        assert!(r.report.min_gap() >= -1e-9);
        assert!((r.report.var1 - wrapped_phase_variance(&s).variance).abs() < 1e-14);
    }
}

#[test]
fn nogo_scan_finds_no_admissible_candidate() {
    let grid = lambda_circle(1.0, 16);
    let r = scan_intelligent_nogo(PhaseFunction::CosPhi, &grid, 3, 1e-3).unwrap();
    assert!(r.min_violation > 0.0);
}

#[test]
fn descent_from_vacuum_then_witness_from_result() {
    let cfg = VariationalConfig { max_iters: 20_000, ..VariationalConfig::default() };
    let vac = make_fock_state(0, 8).unwrap();
    let r = minimize_sum(PhaseFunction::ExpMinus, 8, &vac, &cfg).unwrap();
    assert!(r.objective < 1.0);
    assert!(r.converged);
    assert!(r.residual < cfg.tol);
    assert!(r.full_residual.unwrap() > r.residual);
    assert!(sum_stationarity_residual(&r.state, PhaseFunction::ExpMinus) > 0.0);

    let w = neighborhood_witness(&vac, PhaseFunction::ExpMinus, Mode::Sum, 0.2).unwrap();
    assert!(w.witness_objective.unwrap() < 1.0);
}

#[test]
fn product_saddle_is_left_and_lands_on_number_state() {
    let s = make_two_mode_superposition(0, 2, 0.0, 0.0, 8).unwrap();
    assert!(product_stationarity_residual(&s, PhaseFunction::ExpMinus).unwrap() < 1e-9);
    let w = neighborhood_witness(&s, PhaseFunction::ExpMinus, Mode::Product, 0.2).unwrap();
    let start = w.state.unwrap();
    let r = minimize_product(PhaseFunction::ExpMinus, 8, &start, &VariationalConfig::default()).unwrap();
    assert!(r.converged);
    assert!(r.objective < 1e-10);
    assert!(r.nearest_fock().1 < 1e-4);
}

#[test]
fn cylinder_result_serializes_with_case_tag() {
    let r = cylinder_branch_analysis(1.5, 0.5, PI, BranchKind::Product).unwrap();
    let json = serde_json::to_value(&r).unwrap();
    assert_eq!(json["case_tag"], "iii");
    assert!(json["fourier_defect"].as_f64().unwrap() >= 0.0);
}
