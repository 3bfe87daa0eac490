//! Monte Carlo simulation of projective quantum measurements in dimensions
//! d = 2, 3, 4 with classical protocols: shared randomness (a Haar-random
//! orthonormal basis) plus one round of two-way communication.
//!
//! The crate provides:
//! - [`qmath`]: small dense complex linear algebra and Born-rule oracles,
//! - [`sampling`]: seeded RNG streams, Haar sampling, rejection sampling,
//! - [`p1`]: the P1 protocol (prepare-and-measure and entanglement modes),
//! - [`prtq`]: the exact d=2 reference protocol in choice and rejection form,
//! - [`scenarios`]: randomized / structured TVD studies, the CGLMP setup,
//!   and the cutoff sweep,
//! - [`stats`]: Kolmogorov-Smirnov helpers used by the test suites.

pub mod p1;
pub mod prtq;
pub mod qmath;
pub mod sampling;
pub mod scenarios;
pub mod stats;

pub use p1::{P1Params, TrialRecord};
pub use qmath::{Basis, JointDistribution, PureState, QmathError};
pub use sampling::{RejectionConfig, RngStream};
pub use scenarios::{P1Protocol, Protocol, Scenario, StudyConfig, StudyReport};
