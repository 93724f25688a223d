//! Arbitrary-precision arithmetic with error bounds, polynomial roots and
//! adaptive quadrature.

mod ball;
mod budget;
mod legendre;
mod quadrature;
mod roots;

pub use ball::{fmt_float, BigComplex, BigReal};
pub use budget::PrecisionBudget;
pub use legendre::{gauss_rule, GaussRule};
pub use quadrature::{integrate_adaptive, integrate_with, QuadOptions, QuadResult};
pub use roots::{poly_roots, poly_roots_complex, roots_f64, roots_with_radii, RootBall};

pub(crate) use roots::uni_to_balls;
