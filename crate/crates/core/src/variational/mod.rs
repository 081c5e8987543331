//! Minimum uncertainty product and sum searches.
//!
//! Descent runs on the unit sphere of `C^{N+1}` (equivalently `2(N+1)` real
//! coordinates); every step is retracted back by normalization.

mod cylinder;
mod descent;
mod objective;
mod witness;

use serde::{Deserialize, Serialize};

use crate::phase::PhaseFunction;
use crate::state::FockVector;

pub use cylinder::{
    cylinder_branch_analysis, cylinder_branch_grid, cylinder_branch_roots, fourier_defect_of, BranchKind,
    CylinderBranchResult, CylinderCase, CYLINDER_FOURIER_MODES, FOURIER_DEFECT_THRESHOLD,
};
pub use descent::{best_run, minimize, minimize_product, minimize_sum, multi_start, truncation_sweep, SweepPoint};
pub use objective::{
    finite_difference_gradient, lagrange_multiplier, objective, objective_gradient, product_stationarity_residual,
    sum_stationarity_residual, Mode, ObjectiveValue,
};
pub use witness::{neighborhood_witness, Witness, WitnessSource};

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariationalConfig {
    pub max_iters: usize,
    /// Stop once the projected Euler–Lagrange residual drops below this.
    pub tol: f64,
    /// First trial step of the first line search.
    pub initial_step: f64,
    /// Upper bound on later trial steps, which follow the Barzilai–Borwein
    /// estimate.
    pub max_step: f64,
    /// Sufficient-decrease constant of the Armijo test.
    pub armijo: f64,
    pub max_halvings: usize,
    /// Keep every `trace_stride`-th iterate in the trace.
    pub trace_stride: usize,
    /// Restarts from perturbed copies allowed after reaching a stationary point.
    pub escape_attempts: usize,
    /// Seed for the random escape directions.
    pub seed: u64,
}

impl Default for VariationalConfig {
    fn default() -> Self {
        Self {
            max_iters: 100_000,
            tol: 1e-8,
            initial_step: 0.5,
            max_step: 0.5,
            armijo: 1e-4,
            max_halvings: 60,
            trace_stride: 10,
            escape_attempts: 5,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VariationalResult {
    pub mode: Mode,
    pub f1: PhaseFunction,
    pub state: FockVector,
    pub objective: f64,
    pub var1: f64,
    pub var2: f64,
    pub gamma0: Option<f64>,
    /// Euler–Lagrange residual projected on the truncated space.
    pub residual: f64,
    /// Same residual over all Fourier modes, including those the truncated
    /// state cannot reach. `None` when the product equation is undefined.
    pub full_residual: Option<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub escapes: usize,
    pub seed: u64,
    pub trace: Vec<(usize, f64)>,
}

impl VariationalResult {
    /// Nearest number state and its coefficient-space distance.
    pub fn nearest_fock(&self) -> (usize, f64) {
        self.state.nearest_fock()
    }

    pub fn trace_csv(&self) -> String {
        let mut out = String::from("iteration,objective\n");
        for (it, v) in &self.trace {
            out.push_str(&format!("{it},{v:.17e}\n"));
        }
        out
    }
}
