//! Pseudospectral gap functions for tuples of Hermitian and non-Hermitian
//! matrices: the Clifford (localizer) linear and radial gaps, the
//! quadratic composite gaps, the bounds relating them, and lattice models
//! to evaluate them on.

pub mod bounds;
pub mod clifford;
pub mod error;
pub mod gaps;
pub mod io;
pub mod kernels;
pub mod localizer;
pub mod models;
pub mod quadratic;
pub mod random;
pub mod suite;
pub mod sweep;

pub use bounds::{BoundKind, BoundReport, GapComparison, LocalityReport};
pub use clifford::{build_rep, CliffordRep};
pub use error::{Error, Result};
pub use gaps::{gap_record, GapRecord};
pub use kernels::{CMatrix, CVector, C64};
pub use localizer::{MatrixTuple, ProbeSite};
pub use quadratic::QuadraticGaps;
pub use suite::{check_suite, SuiteOutcome};
pub use sweep::{run_sweep, SweepConfig, SweepResult};
