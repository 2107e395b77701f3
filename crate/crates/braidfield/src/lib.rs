//! Construct semiholomorphic polynomials f(u, v, conj v) whose zero set on
//! the unit three-sphere is the closure of a given braid, together with the
//! projected real polynomial pair on R^3 and numerical verification of the
//! construction.
//!
//! The pipeline runs in four steps: sample the braid diagram, interpolate
//! each component's x-coordinate trigonometrically, pin every crossing's
//! over/under strand with a second interpolation for the y-coordinate, then
//! expand the root product into a polynomial in u, e^{it}, e^{-it} and
//! substitute v for e^{it}. The `verify` module certifies the zero set on
//! the sphere before anything is reported as correct.

pub mod braid;
pub mod config;
pub mod crossings;
pub mod diagram;
pub mod error;
pub mod interp;
pub mod json;
pub mod pipeline;
pub mod project;
pub mod roots;
pub mod semiholo;
pub mod verify;

pub use braid::{BraidWord, Components, Letter, PositionChart};
pub use config::Config;
pub use error::{Error, Result};
pub use interp::TrigPoly;
pub use pipeline::{build_polynomial, fourier_parametrisation};
pub use project::{split_real_imag, stereographic_project, RealPoly3};
pub use semiholo::{assemble, degree_bounds, FourierBraid, SemiholoPoly};
pub use verify::{
    find_lambda, reconstruct_braid, sample_nodal_set, transversality_check, verified_polynomial,
    BraidData, Surface, VerificationReport,
};
