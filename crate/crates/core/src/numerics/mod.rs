//! Shared numerical kernels.

pub mod bessel;
pub mod eigen;
pub mod gauss;
pub mod ks;
pub mod quad;
pub mod rng;
pub mod special;
pub mod sphere;
