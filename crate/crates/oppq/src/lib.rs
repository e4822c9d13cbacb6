//! Quantization of one-dimensional Schrödinger operators by orthogonal
//! polynomial projection, for the sextic anharmonic and Bender–Dunne sextic
//! potentials.
//!
//! The pipeline is: a positive reference weight ([`weights`]) yields power
//! moments, from which an orthonormal basis is generated ([`orthopoly`]).
//! The moment recursion of the Schrödinger equation ([`moments`]) maps a few
//! missing moments onto all moments through energy polynomials, and the
//! projection coefficients of the state onto the basis are forced to vanish
//! at a truncation order, giving the determinant condition solved in
//! [`quantizer`]. Quasi-exactly solvable energies are cross-checked against
//! closed energy polynomials ([`bender_dunne`]) and non-QES levels against an
//! independent eigenvalue solver ([`oracle`]).

pub mod bender_dunne;
pub mod error;
pub mod moments;
pub mod numeric;
pub mod oracle;
pub mod orthopoly;
pub mod potential;
pub mod quantizer;
pub mod weights;

pub use error::{Error, Result};
pub use numeric::{EnergyPolynomial, Precision, RootSet};
pub use rug::Float;
