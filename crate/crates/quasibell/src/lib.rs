//! Teleportation of a qubit over entangled coherent-state channels.
//!
//! The library has two halves that deliberately overlap:
//!
//! * closed-form modules, [`quasi_bell`] (channel construction, Gram matrix,
//!   reduced spectra, entanglement entropy) and [`teleport`] (orthonormal
//!   bases, measurement probabilities, conditional states, fidelity, MASFI),
//!   which evaluate the analytic expressions directly;
//! * a brute-force [`oracle`] that rebuilds every reported quantity from
//!   truncated Fock-space linear algebra ([`fock`]) and nothing else.
//!
//! The [`oracle::verification`] suite compares the two routes point by point;
//! the `quasibell verify` subcommand runs it from the command line.
//!
//! [`landau`] is a self-contained side module: the planar Landau problem with
//! a noncommutative position sector (effective mass and frequency, energy
//! ladder, cyclotron orbits, conserved pairs).

pub mod cli;
pub mod error;
pub mod fock;
pub mod landau;
pub mod oracle;
pub mod quasi_bell;
pub mod teleport;

pub use error::{Error, Result};
