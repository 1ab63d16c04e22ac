//! Numerical laboratory for spectral clusters of the Laplacian on the flat
//! torus `R^n / (2πZ)^n`: exact band enumeration, orthonormal-system
//! densities, Schatten norms of `h χ h̄`, the mollified projector kernel and
//! scaling-law sweeps.

pub mod bessel;
pub mod cli;
pub mod cluster;
pub mod error;
pub mod experiments;
pub mod exponents;
pub mod kernels;
pub mod lattice;
pub mod mollifier;
pub mod quadrature;
pub mod schatten;
pub mod trig;

pub use error::{Error, Result};
