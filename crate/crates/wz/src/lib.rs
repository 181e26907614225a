//! Discovery and certification of WZ pairs that prove Ramanujan-type
//! series for 1/pi.
//!
//! The pipeline: model a bivariate hypergeometric term as a product of
//! Pochhammer factors ([`hyperterm`]), compute its exact shift quotients,
//! split the quotient denominators and set up a degree-parameterized
//! ansatz with undetermined coefficients ([`ansatz`]), solve the
//! resulting linear system over Q, and certify the emitted pair both
//! symbolically (telescoping identities over exact rationals) and
//! numerically (arbitrary-precision sums matched against c/pi) in
//! [`verify`]. [`catalog`] carries the built-in fixtures; [`dsl`] is the
//! textual term language; [`cli`] the command-line front end.

pub mod numbers;
pub mod polyalg;
pub mod hyperterm;
pub mod dsl;
pub mod ansatz;
pub mod verify;
pub mod catalog;
pub mod cli;
