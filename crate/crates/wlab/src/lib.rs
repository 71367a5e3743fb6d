//! Numerical toolkit for the family of self-affine graphs generated by
//! `T_i(x, y) = ((x + i)/nb, lambda*y + cos(2 pi (x + i)/nb))`,
//! `i = 0, .., nb-1`. For `lambda*nb > 1` the attractor is the graph of a
//! Weierstrass-type function with box dimension `d_w = 2 + ln(lambda)/ln(nb)`.
//!
//! The crate covers the geometry of the level-`m` vertex chains and
//! polygons, the self-similar measures they carry, the associated energy
//! forms and graph Laplacians, direct and decimation-based spectra, the
//! effective resistance metric, and dimension estimators, plus closed-form
//! reference constants for the Sierpinski gasket and the unit interval.

pub mod energy;
pub mod geometry;
pub mod measure;
pub mod params;
pub mod reference;
pub mod spectral;

pub use params::{ParamError, WeierstrassParams};
