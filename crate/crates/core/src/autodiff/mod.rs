//! Nested differentiation: forward mode in the composition `x1`, reverse
//! mode over the network parameters.
//!
//! [`Dual`] carries `∂/∂x1`; a [`Tape`] records operations on duals so that
//! losses built from `ln γ` (which already contain `∂gᴱ/∂x1`) can still be
//! differentiated with respect to every weight.

mod dual;
mod graph;
mod tape;

pub use dual::{logistic, silu, silu_prime, silu_second, Dual};
pub use graph::{Eager, Graph};
pub use tape::{Gradients, Tape, Var};
