//! Dirichlet and elliptic-curve L-values.

mod dirichlet;
mod elliptic;
mod hurwitz;

pub use dirichlet::{
    dirichlet_l, dirichlet_lprime_minus1, dirichlet_lprime_minus1_complex, odd_primitive_characters,
    zeta_prime_minus2, DirichletCharacter,
};
pub use elliptic::{ap_coefficients, ell_lprime_0, EllipticLData, LValueReport};
pub use hurwitz::{bernoulli_numbers, hurwitz_zeta};
