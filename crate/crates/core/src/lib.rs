//! Simulation of three bosons meeting pairwise at a beam splitter, described two ways:
//!
//! * [`fock`] and [`bunching`]: the linear-optics picture. Mode unitaries are lifted to the
//!   N-boson Fock space through matrix permanents, and each pairwise "reflection" event becomes a
//!   Heisenberg-picture projector on the shared three-mode, three-boson space.
//! * [`hv`]: a noncontextual hidden-variable model. Every particle carries a uniform random
//!   `λ ∈ (0,1)`, and a beam splitter deterministically routes both particles to output mode 1
//!   when `λ_port1 + δ > λ_port2`.
//!
//! [`bounds`] compares the resulting probability sums against the exclusivity bound (1) and the
//! no-disturbance bound (3/2), and [`cli`] drives everything from the command line.

pub mod bounds;
pub mod bunching;
pub mod cli;
pub mod error;
pub mod fock;
pub mod hv;
pub mod numfmt;

pub use error::{Error, Result};
