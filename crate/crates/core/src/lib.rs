//! Desk-scale replica of a multi-coil dynamic MRI reconstruction challenge:
//! synthetic k-space, k-t undersampling, physics-driven reference solvers,
//! and the challenge evaluation, weighting, testing and ranking pipeline.

pub mod bench;
pub mod error;
pub mod evaluation;
pub mod operators;
pub mod phantom;
pub mod pipeline;
pub mod ranking;
pub mod recon;
pub mod sampling;
pub mod tensor_io;
pub mod util;

pub use error::{Error, Result};
