//! Time-dependent quantum evolution as parallel transport along the time axis.
//!
//! States and observables over `[t0, t1]` are moved by the transport operator
//! `G(t)`, the time-ordered exponential of `sign · iH(t)`, built from
//! unitarity-preserving product-integral steppers. Observables follow by
//! conjugation, `α(t) = G(t) a G(t)*`, which is cross-checked against direct
//! integration of the inner derivation `δ_H(a) = i[H, a]` in superoperator
//! form.

pub mod algebra;
pub mod cli;
pub mod config;
pub mod derivation;
pub mod error;
pub mod path;
pub mod scenario;
pub mod section;
pub mod transport;

pub use algebra::{ComplexMatrix, HermitianMatrix, StateVector, UnitaryMatrix, C64};
pub use derivation::{InnerDerivation, Superoperator};
pub use config::{parse_config, ConfigError, ScenarioConfig};
pub use error::{Error, Result};
pub use path::{HamiltonianPath, Method, PathKind, Polynomial, Sign};
pub use scenario::{RunReport, Scenario};
pub use section::Section;
pub use transport::TransportOperator;
