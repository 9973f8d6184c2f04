//! Lozenge tilings of a half hexagon with a free boundary: exact counting
//! and evaluation, samplers, spectral comparisons, and limit-shape numerics.
//!
//! The crate is organized bottom-up:
//!
//! * [`scalar`], [`jet`], [`linalg`]: exact/adaptive arithmetic, truncated
//!   Taylor jets, and confluent determinants.
//! * [`signature`], [`charlib`]: shapes and the character evaluations built
//!   on the determinant machinery.
//! * [`tiling`]: patterns, bijections, enumeration, and boundary profiles.
//! * [`sampler`]: exact and Markov-chain samplers over tilings.
//! * [`gue`], [`limitshape`], [`stats`]: spectral sampling, moment and
//!   rate-function numerics, and the statistical tests tying them together.
//! * [`verify`], [`report`], [`plot`]: the check suites, their serialized
//!   reports, and self-contained SVG rendering.

pub mod charlib;
pub mod error;
pub mod gue;
pub mod jet;
pub mod limitshape;
pub mod linalg;
pub mod plot;
pub mod report;
pub mod sampler;
pub mod scalar;
pub mod signature;
pub mod stats;
pub mod tiling;
pub mod verify;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use signature::Signature;
