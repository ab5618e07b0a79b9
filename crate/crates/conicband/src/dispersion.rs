//! Dispersion kernels of the two-strength delta lattice.
//!
//! The model is a 1D chain of delta potentials with alternating strengths U
//! and V, spaced by `a`, so the repeating cell has length `2a`. Everything in
//! this crate is computed in dimensionless variables:
//!
//! * momentum `kappa = k*a` (Brillouin zone of the doubled cell: `[-pi/2, pi/2]`),
//! * wavenumber `rho = q*a` with `q = sqrt(2mE)/hbar`,
//! * energy `eps = rho^2` in units of `hbar^2 / (2 m a^2)`,
//! * strengths `u = m U a / hbar^2`, `v = m V a / hbar^2`.
//!
//! The Bloch eigenvalue condition is `f2(kappa) = g2(rho)` where
//!
//! ```text
//! f2(kappa) = cos(2 kappa)
//! g2(rho)   = cos(2 rho) + (u + v) sin(2 rho)/rho + 2 u v (sin(rho)/rho)^2
//! ```
//!
//! together with the half-cell kernels `f1 = cos(kappa)` and
//! `g1(rho, u) = cos(rho) + u sin(rho)/rho`. Two algebraic identities tie
//! them together and are enforced by tests rather than assumed:
//! `f2 = 2 f1^2 - 1` and `g2 = 2 g1(u) g1(v) - 1`.
//!
//! All functions here are pure; small arguments are handled by series
//! branches so the `rho -> 0` limits are exact.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Operations that require `rho > 0` reject anything below this floor rather
/// than silently switching to a limit value.
pub const EPS_RHO: f64 = 1e-12;

/// Switch point for the `sin(x)/x` series branch. Both branches agree to
/// better than 1e-13 here.
const SINC_CUTOFF: f64 = 1e-4;

/// Switch point for the sinc derivative kernels. These need a much wider
/// series region: the closed forms lose up to half their digits to
/// cancellation below |x| ~ 0.1.
const DSINC_CUTOFF: f64 = 0.5;

/// Unit conventions marker.
///
/// No physical constants are stored anywhere in this crate; this type only
/// documents how to translate results back to laboratory units:
///
/// * multiply `kappa` and `rho` by `1/a` to get `k` and `q`,
/// * multiply `eps` by `hbar^2 / (2 m a^2)` to get `E` (so `eps = rho^2` exactly),
/// * strengths map back via `U = u hbar^2 / (m a)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct Units;

/// Which of the two delta sublattices a quantity belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    U,
    V,
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Family::U => write!(f, "u"),
            Family::V => write!(f, "v"),
        }
    }
}

/// The physical model: dimensionless strengths of the two delta sublattices.
///
/// Only repulsive lattices (`u, v >= 0`) are supported; attractive strengths
/// would need the imaginary-`rho` branch that this crate does not implement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    u: f64,
    v: f64,
}

impl Lattice {
    pub fn new(u: f64, v: f64) -> Result<Self> {
        if !u.is_finite() || !v.is_finite() {
            return Err(Error::domain(format!(
                "lattice strengths must be finite, got u = {u}, v = {v}"
            )));
        }
        if u < 0.0 || v < 0.0 {
            return Err(Error::domain(format!(
                "lattice strengths must be non-negative (repulsive), got u = {u}, v = {v}"
            )));
        }
        Ok(Lattice { u, v })
    }

    pub fn u(&self) -> f64 {
        self.u
    }

    pub fn v(&self) -> f64 {
        self.v
    }

    pub fn strength(&self, family: Family) -> f64 {
        match family {
            Family::U => self.u,
            Family::V => self.v,
        }
    }

    /// True for the equal-strength lattice, where the translation period is
    /// really `a` and every minima gap closes.
    pub fn symmetric(&self) -> bool {
        self.u == self.v
    }
}

/// sin(x)/x with sinc(0) = 1.
pub(crate) fn sinc(x: f64) -> f64 {
    if x.abs() < SINC_CUTOFF {
        let x2 = x * x;
        // 1 - x^2/3! + x^4/5! - x^6/7!
        1.0 + x2 * (-1.0 / 6.0 + x2 * (1.0 / 120.0 + x2 * (-1.0 / 5040.0)))
    } else {
        x.sin() / x
    }
}

/// d/dx [sin(x)/x] = (x cos x - sin x) / x^2, with dsinc(0) = 0.
pub(crate) fn dsinc(x: f64) -> f64 {
    if x.abs() < DSINC_CUTOFF {
        let x2 = x * x;
        // series of (x cos x - sin x)/x^2: coefficients (-1)^n 2n/(2n+1)!,
        // good to ~1 ulp for |x| < 0.5
        x * (-1.0 / 3.0
            + x2 * (1.0 / 30.0
                + x2 * (-1.0 / 840.0
                    + x2 * (1.0 / 45360.0
                        + x2 * (-1.0 / 3991680.0
                            + x2 * (1.0 / 518918400.0
                                + x2 * (-1.0 / 93405312000.0)))))))
    } else {
        (x * x.cos() - x.sin()) / (x * x)
    }
}

/// d^2/dx^2 [sin(x)/x] = ((2 - x^2) sin x - 2 x cos x) / x^3, with the
/// limit -1/3 at x = 0.
pub(crate) fn d2sinc(x: f64) -> f64 {
    if x.abs() < DSINC_CUTOFF {
        let x2 = x * x;
        // coefficients (-1)^n 2n(2n-1)/(2n+1)!
        -1.0 / 3.0
            + x2 * (1.0 / 10.0
                + x2 * (-1.0 / 168.0
                    + x2 * (1.0 / 6480.0
                        + x2 * (-1.0 / 443520.0
                            + x2 * (1.0 / 47174400.0
                                + x2 * (-1.0 / 7185024000.0))))))
    } else {
        ((2.0 - x * x) * x.sin() - 2.0 * x * x.cos()) / (x * x * x)
    }
}

/// Half-cell momentum kernel `cos(kappa)`.
pub fn f1(kappa: f64) -> f64 {
    kappa.cos()
}

/// Doubled-cell momentum kernel `cos(2 kappa)`; equals `2 f1^2 - 1`.
pub fn f2(kappa: f64) -> f64 {
    (2.0 * kappa).cos()
}

pub(crate) fn g1_raw(rho: f64, strength: f64) -> f64 {
    rho.cos() + strength * sinc(rho)
}

pub(crate) fn g1_prime_raw(rho: f64, strength: f64) -> f64 {
    -rho.sin() + strength * dsinc(rho)
}

pub(crate) fn g2_raw(rho: f64, u: f64, v: f64) -> f64 {
    // sin(2 rho)/rho = 2 sinc(2 rho)
    (2.0 * rho).cos() + 2.0 * (u + v) * sinc(2.0 * rho) + 2.0 * u * v * sinc(rho) * sinc(rho)
}

pub(crate) fn g2_prime_raw(rho: f64, u: f64, v: f64) -> f64 {
    -2.0 * (2.0 * rho).sin() + 4.0 * (u + v) * dsinc(2.0 * rho)
        + 4.0 * u * v * sinc(rho) * dsinc(rho)
}

pub(crate) fn g2_second_raw(rho: f64, u: f64, v: f64) -> f64 {
    let s = sinc(rho);
    let ds = dsinc(rho);
    -4.0 * (2.0 * rho).cos() + 8.0 * (u + v) * d2sinc(2.0 * rho)
        + 4.0 * u * v * (ds * ds + s * d2sinc(rho))
}

fn check_rho_nonneg(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho < 0.0 {
        return Err(Error::domain(format!("rho must be finite and >= 0, got {rho}")));
    }
    Ok(())
}

fn check_rho_positive(rho: f64) -> Result<()> {
    if !rho.is_finite() || rho < EPS_RHO {
        return Err(Error::domain(format!(
            "rho must be finite and >= {EPS_RHO:e}, got {rho}"
        )));
    }
    Ok(())
}

fn check_strength(strength: f64) -> Result<()> {
    if !strength.is_finite() || strength < 0.0 {
        return Err(Error::domain(format!(
            "strength must be finite and >= 0, got {strength}"
        )));
    }
    Ok(())
}

/// Half-cell energy kernel `cos(rho) + u sin(rho)/rho`, continuous at
/// `rho = 0` where it equals `1 + u`.
pub fn g1(rho: f64, strength: f64) -> Result<f64> {
    check_rho_nonneg(rho)?;
    check_strength(strength)?;
    Ok(g1_raw(rho, strength))
}

/// Doubled-cell energy kernel; `rho -> 0` limit is `1 + 2(u+v) + 2uv`.
///
/// Satisfies `g2 = 2 g1(rho, u) g1(rho, v) - 1`, which tests verify as a
/// separate evaluation route.
pub fn g2(rho: f64, lat: Lattice) -> Result<f64> {
    check_rho_nonneg(rho)?;
    Ok(g2_raw(rho, lat.u, lat.v))
}

/// d g1 / d rho. Rejects `rho < EPS_RHO`; the limit at zero is 0 but callers
/// must ask for it explicitly via the series region above the floor.
pub fn g1_prime(rho: f64, strength: f64) -> Result<f64> {
    check_rho_positive(rho)?;
    check_strength(strength)?;
    Ok(g1_prime_raw(rho, strength))
}

/// d g2 / d rho. At a zero `rho_s` of `g1(., u)` this equals
/// `2 (v - u) sinc(rho_s) g1'(rho_s, u)`, which vanishes when `u = v`.
pub fn g2_prime(rho: f64, lat: Lattice) -> Result<f64> {
    check_rho_positive(rho)?;
    Ok(g2_prime_raw(rho, lat.u, lat.v))
}

/// d^2 g2 / d rho^2. At a zero of `g1` with `u = v` this equals `4 g1'^2`.
pub fn g2_second(rho: f64, lat: Lattice) -> Result<f64> {
    check_rho_positive(rho)?;
    Ok(g2_second_raw(rho, lat.u, lat.v))
}
