//! Bounds on rate-distortion regions for multiterminal source coding over
//! finite alphabets.
//!
//! The crate evaluates the constraint sets of the Berger-Tung inner and outer
//! bounds and of the outer bound built from an auxiliary variable `X` that
//! makes the observations conditionally independent, together with the closed
//! forms for the binary erasure and Gaussian CEO problems.
//!
//! Variables in every joint follow a fixed naming scheme: `Y0` is the hidden
//! source, `Y1..YL` the encoder observations, `Y{L+1}` the decoder side
//! information, `W` and `T` the shared-randomness and time-sharing variables,
//! `U1..UL` the encoder auxiliaries, `Z1..ZK` the reproductions and `X` the
//! conditioning variable.

pub mod ceo;
pub mod error;
pub mod model;
pub mod prob;
pub mod regions;

pub use error::{Error, Result};
pub use prob::{binary_entropy, Channel, JointPmf, Nats, Variable};
