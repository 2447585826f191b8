//! Numerical primitives shared by the solvers: uniform grid functions,
//! cumulative quadrature, the error function, a bracketing root finder and
//! a shooting-method oracle for the two-point problems.

mod erf;
mod grid;
mod quadrature;
mod roots;
mod shooting;

pub use erf::{erf, erfc};
pub use grid::GridFunction;
pub use quadrature::{cumulative_integral, integrate};
pub use roots::{find_root, find_root_with, RootBracket, DEFAULT_ROOT_MAX_ITER};
pub use shooting::{shoot_bvp, shoot_dirichlet};
