//! Band-structure solver for the one-dimensional Kronig-Penney lattice with
//! two alternating delta-function strengths.
//!
//! A chain of deltas with strengths U, V on alternating sites has the Bloch
//! condition `cos(2 kappa) = g2(rho)` over the doubled cell. This crate
//! evaluates the dispersion kernels and their derivatives exactly, assembles
//! bands by bracketed root-finding, and analyzes the zone-edge physics:
//!
//! * equal strengths close every `g2 = -1` gap, leaving conical band
//!   touchings with slope `2 rho_s / |g1'(rho_s)|`;
//! * unequal strengths reopen those gaps by `|rho'^2 - rho^2|` between the
//!   two `g1` families;
//! * deep in the tight-binding regime the levels collapse to
//!   `n^2 pi^2 (1 - 1/u)^2` with second-order accuracy.
//!
//! An independent transfer-matrix oracle ([`transfer`]) rebuilds the
//! dispersion from the cell monodromy so the closed forms are never taken on
//! faith, and [`verify`] packages the cross-checks behind the `verify` CLI
//! subcommand.

pub mod bands;
pub mod cli;
pub mod dirac;
pub mod dispersion;
pub mod error;
pub mod rootfind;
pub mod tightbinding;
pub mod transfer;
pub mod verify;

pub use dispersion::{Family, Lattice, Units};
pub use error::{Error, Result};
pub use rootfind::SolverConfig;
