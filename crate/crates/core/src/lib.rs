//! Nonlinear quantum walk on a circle, its Galerkin-truncated nonlinear
//! Dirac limit, and a Langevin sampler for the truncated system's Gibbs states.

pub mod diagnostics;
pub mod error;
pub mod experiments;
pub mod field;
pub mod gibbs;
pub mod nlde;
pub mod noise;
pub mod walk;

pub use diagnostics::{BinScale, Histogram};
pub use error::{Error, Result};
pub use field::{GridSpec, ShiftMethod, SpectralField, Spinor, SpinorField};
pub use gibbs::{GibbsParams, GibbsRun, Langevin, PhaseCoupling};
pub use nlde::{BasisDirection, ConservedQuantities, Nlde, NldeParams};
pub use noise::NoiseGenerator;
pub use walk::{WalkParams, WalkState, Walker};
