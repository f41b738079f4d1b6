//! Desk-scale numerical laboratory for erasing quantum coherence.
//!
//! The crate implements, end to end, the machinery needed to study how much
//! noise a random-unitary channel must inject to delete the off-diagonal
//! structure of a quantum state in a fixed reference basis:
//!
//! - [`numkernel`]: dense complex linear algebra (Hermitian eigensolver,
//!   tensor products, partial trace, purification, trace norm);
//! - [`states`]: validated density matrices, named state families, entropies;
//! - [`coherence`]: coherence measures in the coordinate reference basis,
//!   dephasing, and distance-to-incoherent witnesses;
//! - [`channels`]: random-unitary ensembles, incoherent unitaries, and
//!   entropy exchange computed by two independent routes;
//! - [`typicality`]: classical typical sets, quantum typical subspaces, and
//!   the Fannes-Audenaert / gentle-operator inequality checkers;
//! - [`erasure`]: the erasure-cost experiments: entropy-exchange lower
//!   bounds, the sampled twirl construction, operator-Chernoff concentration
//!   runs, and finite-copy rate curves;
//! - [`report`]: reproducible tabular / structured report emission.
//!
//! All entropic quantities are in bits (base-2 logarithms). Randomized
//! operations take explicit seeds and are bitwise reproducible for any
//! thread count.

pub mod channels;
pub mod coherence;
pub mod erasure;
pub mod error;
pub mod numkernel;
pub mod par;
pub mod report;
pub mod seeding;
pub mod states;
pub mod typicality;

pub use error::{Error, Result};
pub use numkernel::ComplexMatrix;
pub use states::DensityMatrix;
