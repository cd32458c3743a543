//! Dense linear algebra for small systems and the generic state-space container.

mod matrix;
pub mod poly;
mod state_space;

pub use matrix::{Matrix, DEFAULT_RANK_TOL};
pub use poly::is_hurwitz;
pub use state_space::StateSpaceModel;
