//! Characteristic polynomials, their roots and the eigenvalue driver.

pub mod charpoly;
pub mod iterate;
pub mod roots;

pub use charpoly::{
    characteristic, characteristic_dirichlet, characteristic_lambda_dependent, characteristic_periodic_singular,
    characteristic_regular_at_left, characteristic_robin, taylor_shift, trust_radius, CharacteristicPolynomial, EndData, Shape,
};
pub use iterate::{eigen_iterate, find_roots, Eigenpair, ShiftMode, SpectralOptions};
pub use roots::{polish, polynomial_roots};
