//! Number–phase uncertainty analysis for single-mode photon states.

pub mod error;
pub mod intelligent;
pub mod phase;
pub mod quadrature;
pub mod relations;
pub mod specfun;
pub mod spectrum;
pub mod state;
pub mod variational;

pub use error::{PhaseLabError, Result};
pub use num_complex::Complex64;
pub use state::{FockVector, SupNormDistance, DEFAULT_N_TRUNC};
pub use intelligent::{IntelligentFamilyParams, NogoReport};
pub use phase::PhaseFunction;
pub use relations::{FMatrix, PhaseNumberReport, UncertaintyReport};
pub use variational::{Mode, VariationalConfig, VariationalResult};
