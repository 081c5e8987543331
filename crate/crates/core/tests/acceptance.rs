//! End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
//! exits non-zero if any fails. Runtime budgets are part of each check.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use phaselab::intelligent::make_expminus_intelligent;
use phaselab::phase::{
    expect_phase_function, expect_phase_function_quadrature, number_moments, phase_function_variance, phi_moment,
    phi_moment_quadrature, wrapped_phase_variance, PhaseFunction,
};
use phaselab::quadrature::DEFAULT_POINTS;
use phaselab::relations::{evaluate_phase_number_relations, evaluate_relations};
use phaselab::state::{make_fock_state, make_two_mode_superposition, mix_with_fock, seeded_random_state};
use phaselab::variational::{
    cylinder_branch_grid, cylinder_branch_roots, finite_difference_gradient, multi_start, objective,
    objective_gradient, truncation_sweep, BranchKind, Mode, VariationalConfig, FOURIER_DEFECT_THRESHOLD,
};
use phaselab::Complex64;

struct Outcome {
    pass: bool,
    detail: String,
}

fn run(id: usize, name: &str, budget: Duration, check: impl FnOnce() -> Outcome) -> bool {
    let t = Instant::now();
    let out = check();
    let elapsed = t.elapsed();
    let in_time = elapsed <= budget;
    let pass = out.pass && in_time;
    println!(
        "criterion {id} {:<34} {}  {} [{:.2} s of {} s{}]",
        name,
        if pass { "PASS" } else { "FAIL" },
        out.detail,
        elapsed.as_secs_f64(),
        budget.as_secs(),
        if in_time { "" } else { ", over budget" }
    );
    pass
}

fn fock_phase_variance() -> Outcome {
    let worst = (0..=5)
        .map(|n| (wrapped_phase_variance(&make_fock_state(n, 64).unwrap()).variance - PI * PI / 3.0).abs())
        .fold(0.0, f64::max);
    Outcome { pass: worst < 1e-6, detail: format!("max |Δφ² − π²/3| = {worst:.2e}") }
}

fn intelligent_table() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut rows = Vec::new();
    for lambda in [1.0, -1.0] {
        let s = make_expminus_intelligent(0, Complex64::new(lambda, 0.0), 64).unwrap();
        let cos = phase_function_variance(&s, PhaseFunction::CosPhi);
        let sin = phase_function_variance(&s, PhaseFunction::SinPhi);
        let n = number_moments(&s).variance;
        let e = phase_function_variance(&s, PhaseFunction::ExpMinus);
        for (got, want) in [(cos, 0.3489), (sin, 0.1642), (n, 0.5131), (e, 0.5131)] {
            worst = worst.max((got - want).abs());
        }
        rows.push(format!("λ={lambda:+}: ({cos:.4}, {sin:.4}, {n:.4}, {e:.4})"));
    }
    Outcome { pass: worst <= 5e-4, detail: format!("{}; max dev {worst:.1e}", rows.join(" ")) }
}

fn saturation_chain() -> Outcome {
    let mut ok = true;
    let mut notes = Vec::new();
    for lambda in [Complex64::new(0.5, 0.0), Complex64::new(1.0, 0.0), Complex64::new(1.0, 1.0), Complex64::new(0.0, 2.0)] {
        let s = make_expminus_intelligent(0, lambda, 64).unwrap();
        let r = evaluate_relations(&s, PhaseFunction::ExpMinus);
        let mut good = r.rs_gap.abs() < 1e-8;
        if lambda.im == 0.0 {
            good &= r.hr_gap.abs() < 1e-8;
        }
        if (lambda.norm() - 1.0).abs() < 1e-15 {
            good &= r.tri_gap.abs() < 1e-8;
        }
        ok &= good;
        notes.push(format!("{lambda}: rs {:.0e} hr {:.0e} tri {:.0e}", r.rs_gap, r.hr_gap, r.tri_gap));
    }
    Outcome { pass: ok, detail: notes.join("; ") }
}

fn inequality_sweep() -> Outcome {
    let kinds = [PhaseFunction::ExpMinus, PhaseFunction::ExpPlus, PhaseFunction::CosPhi, PhaseFunction::SinPhi];
    let mut worst = f64::INFINITY;
    let mut worst_pn = f64::INFINITY;
    for i in 0..10_000u64 {
        let s = seeded_random_state(32, 42, i);
        for f1 in kinds {
            worst = worst.min(evaluate_relations(&s, f1).min_gap());
        }
        worst_pn = worst_pn.min(evaluate_phase_number_relations(&s).report.min_gap());
    }
    Outcome {
        pass: worst >= -1e-9 && worst_pn >= -1e-9,
        detail: format!("10⁴ states, min gap {worst:.2e} (Fourier kinds), {worst_pn:.2e} (wrapped phase)"),
    }
}

fn product_minimization() -> Outcome {
    let cfg = VariationalConfig::default();
    let mut ok = true;
    let mut notes = Vec::new();
    for f1 in [PhaseFunction::ExpMinus, PhaseFunction::WrappedPhi] {
        let runs = multi_start(f1, Mode::Product, 16, 50, 1, &cfg).unwrap();
        let conv: Vec<_> = runs.iter().filter(|r| r.converged).collect();
        let worst_obj = conv.iter().map(|r| r.objective).fold(0.0, f64::max);
        let worst_dist = conv.iter().map(|r| r.nearest_fock().1).fold(0.0, f64::max);
        ok &= !conv.is_empty() && worst_obj < 1e-10 && worst_dist < 1e-4;
        notes.push(format!(
            "{f1}: {}/50 converged, max objective {worst_obj:.1e}, max Fock distance {worst_dist:.1e}",
            conv.len()
        ));
    }
    Outcome { pass: ok, detail: notes.join("; ") }
}

fn saddle_counterexample() -> Outcome {
    let f1 = PhaseFunction::ExpMinus;
    let (k, l) = (0.0, 2.0);
    let s = make_two_mode_superposition(0, 2, 0.0, 0.0, 16).unwrap();
    let base = objective(&s, f1, Mode::Product).value;
    let mut ok = true;
    let mut worst_pred: f64 = 0.0;
    for eps in [0.05, 0.1, 0.25] {
        for m in [1usize, 4] {
            let p = mix_with_fock(&s, m, eps, 0.0).unwrap();
            let v = objective(&p, f1, Mode::Product);
            let mf = m as f64;
            let predicted = ((k - l) / 2.0f64).powi(2) + eps * (k - mf) * (l - mf) - eps * eps * ((k + l) / 2.0 - mf).powi(2);
            worst_pred = worst_pred.max((v.var2 - predicted).abs());
            ok &= if m == 1 { v.value < base } else { v.value > base };
        }
    }
    ok &= worst_pred < 1e-10;
    Outcome {
        pass: ok,
        detail: format!("m=1 lowers and m=4 raises the product {base:.3}; max |(Δn)′² − predicted| = {worst_pred:.1e}"),
    }
}

fn sum_no_minimum() -> Outcome {
    let cfg = VariationalConfig::default();
    let truncs = [8, 16, 32, 64];
    let mut ok = true;
    let mut notes = Vec::new();
    // a decrease smaller than this is below what converged runs resolve
    let resolvable = 1e-12;
    for (f1, fock_value) in [(PhaseFunction::ExpMinus, 1.0), (PhaseFunction::WrappedPhi, PI * PI / 3.0)] {
        let sweep = truncation_sweep(f1, Mode::Sum, &truncs, 6, 1, &cfg).unwrap();
        let best: Vec<f64> = sweep.iter().map(|p| p.best.objective).collect();
        let decreasing = best.windows(2).all(|w| w[1] < w[0] - resolvable);
        let below = best.iter().all(|&b| b < fock_value);
        ok &= decreasing && below;
        let steps: Vec<String> = best.windows(2).map(|w| format!("{:.1e}", w[0] - w[1])).collect();
        notes.push(format!(
            "{f1}: best {} (drops {}){}",
            best.iter().map(|b| format!("{b:.15}")).collect::<Vec<_>>().join(" > "),
            steps.join(", "),
            if decreasing { "" } else { " not strictly decreasing" }
        ));
    }
    Outcome { pass: ok, detail: notes.join("; ") }
}

fn cylinder_branch() -> Outcome {
    let means = [0.3, 1.0, 1.5, 2.2, 3.0];
    let dns = [0.25, 0.5, 1.0, 1.5, 2.0];
    let phi2s = [0.5, 1.0, 1.5, 2.5, 3.2];
    let mut ok = true;
    let mut checked = 0;
    let mut nontrivial = 0;
    let mut min_defect = f64::INFINITY;
    let mut worst_w: f64 = 0.0;
    for branch in [BranchKind::Product, BranchKind::Sum] {
        let mut results = cylinder_branch_grid(&means, &dns, &phi2s, branch).unwrap();
        for &m in means.iter().filter(|m| (2.0 * *m).fract() == 0.0) {
            for &d in &dns {
                results.extend(cylinder_branch_roots(m, d, (0.5, 3.2), 48, branch).unwrap());
            }
        }
        for r in &results {
            checked += 1;
            worst_w = worst_w.max(r.wronskian_error);
            ok &= r.wronskian_ok();
            if !r.trivial {
                nontrivial += 1;
                min_defect = min_defect.min(r.fourier_defect);
                ok &= r.fourier_defect > FOURIER_DEFECT_THRESHOLD;
            }
        }
    }
    Outcome {
        pass: ok,
        detail: format!(
            "{checked} points (grid plus periodic roots), {nontrivial} periodic, min Fourier defect {min_defect:.2e}, \
             max Wronskian error {worst_w:.1e}"
        ),
    }
}

fn cross_validation() -> Outcome {
    let mut worst_q: f64 = 0.0;
    for i in 0..100u64 {
        let n = 8 + (i as usize * 7) % 57;
        let s = seeded_random_state(n, 7, i);
        for f in PhaseFunction::ALL {
            let a = expect_phase_function(&s, f);
            let b = expect_phase_function_quadrature(&s, f, DEFAULT_POINTS);
            worst_q = worst_q.max((a - b).norm());
        }
        for k in [1, 2] {
            worst_q = worst_q.max((phi_moment(&s, k).unwrap() - phi_moment_quadrature(&s, k, DEFAULT_POINTS).unwrap()).abs());
        }
    }
    let mut worst_g: f64 = 0.0;
    for i in 0..20u64 {
        let s = seeded_random_state(4 + (i as usize % 13), 9, i);
        for f1 in PhaseFunction::ALL {
            for mode in [Mode::Product, Mode::Sum] {
                let (_, g) = objective_gradient(&s, f1, mode);
                let fd = finite_difference_gradient(&s, f1, mode, 1e-6);
                let err = g.iter().zip(&fd).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
                let scale = g.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
                worst_g = worst_g.max(err / scale);
            }
        }
    }
    Outcome {
        pass: worst_q < 1e-10 && worst_g < 1e-6,
        detail: format!("exact vs quadrature {worst_q:.1e}; gradient relative error {worst_g:.1e}"),
    }
}

fn main() -> ExitCode {
    let s = Duration::from_secs;
    let results = [
        run(1, "number-state phase variance", s(1), fock_phase_variance),
        run(2, "intelligent-family table", s(1), intelligent_table),
        run(3, "saturation chain", s(5), saturation_chain),
        run(4, "inequality sweep", s(60), inequality_sweep),
        run(5, "product minimization", s(300), product_minimization),
        run(6, "saddle counterexample", s(1), saddle_counterexample),
        run(7, "sum no-minimum diagnostic", s(600), sum_no_minimum),
        run(8, "cylinder branch", s(30), cylinder_branch),
        run(9, "cross-validation", s(30), cross_validation),
    ];
    let passed = results.iter().filter(|&&p| p).count();
    println!("acceptance: {passed}/{} criteria passed", results.len());
    println!("note: criteria 5, 7 and 8 are finite-truncation property checks, not proofs");
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
