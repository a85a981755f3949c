//! Numerical laboratory for approximate quantum state sharing.
//!
//! A sender splits a bipartite (or multipartite) qudit state between
//! receivers by passing each subsystem through an independent random
//! unitary channel. The key for each channel is the index of the unitary
//! that was actually applied; recovery needs every receiver's key.
//!
//! Modules, bottom-up:
//!
//! * [`linalg`]: dense complex matrices, density matrices, norms, entropies.
//! * [`random`]: seedable streams, Haar unitaries, Weyl-Heisenberg operators,
//!   random test states.
//! * [`channels`]: random unitary channels, product application, the exact
//!   Weyl-Heisenberg twirl, key-indexed encode/decode.
//! * [`protocol`]: sessions, cooperative decoding, adversary views, key cost.
//! * [`analysis`]: Monte Carlo estimators and inequality checks.
//!
//! Trial loops and channel sums run on rayon when the `parallel` feature is
//! enabled (the default); see [`exec`].

pub mod analysis;
pub mod channels;
mod error;
pub mod exec;
pub mod linalg;
pub mod protocol;
pub mod random;

pub use error::{Error, Result};
pub use exec::ExecMode;
pub use linalg::{ComplexMatrix, DensityMatrix, Subsystem, Unitary, C64};
pub use random::RngStream;
