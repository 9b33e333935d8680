//! Grassmann numbers, coefficient functions and superfunctions.

mod coefficient;
mod json;
mod number;
mod superfunction;

pub use coefficient::{Coefficient, MultiPoly, OpaqueFn, FD_STEP_FIRST, FD_STEP_SECOND};
pub use json::{superfunction_from_doc, superfunction_to_doc, SuperfunctionDoc};
pub use number::{GrassmannNumber, IndexSet, Parity};
pub use superfunction::{Axis, Superfunction};
