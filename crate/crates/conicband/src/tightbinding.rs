//! Closed-form tight-binding asymptotics and their comparison against exact
//! numerics.
//!
//! For strengths well above 1 the `g1` zeros pin near `rho = n pi` with a
//! first-order offset `delta_n = (-1)^(n+1) n pi / u`, so
//! `rho_n = n pi (1 - 1/u)` and the level energies collapse to
//! `n^2 pi^2 (1 - 1/u)^2`. The residual error of these forms is second order
//! in `1/u`, which `tb_compare` measures directly against the root finder.

use serde::Serialize;
use std::f64::consts::PI;

use crate::bands::nth_g1_zero;
use crate::dispersion::{Family, Lattice};
use crate::error::{Error, Result};
use crate::rootfind::SolverConfig;

/// Soft floor of the tight-binding regime. Below it results are still
/// computed but callers should surface a regime warning.
pub const TB_STRENGTH_FLOOR: f64 = 10.0;

pub fn in_tb_regime(strength: f64) -> bool {
    strength >= TB_STRENGTH_FLOOR
}

fn check_level(n: usize, strength: f64) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("tight-binding level index n is 1-based".to_string()));
    }
    if !strength.is_finite() || strength <= 0.0 {
        return Err(Error::domain(format!(
            "tight-binding forms need strength > 0, got {strength}"
        )));
    }
    Ok(())
}

/// Zero offset `delta_n = (-1)^(n+1) n pi / u`.
pub fn delta_n(n: usize, strength: f64) -> Result<f64> {
    check_level(n, strength)?;
    let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
    Ok(sign * n as f64 * PI / strength)
}

/// Predicted zero location `rho_n = n pi + (-1)^n delta_n = n pi (1 - 1/u)`.
pub fn rho_n(n: usize, strength: f64) -> Result<f64> {
    check_level(n, strength)?;
    Ok(n as f64 * PI * (1.0 - 1.0 / strength))
}

/// Exact-square level energy `n^2 pi^2 (1 - 1/u)^2`, i.e. `rho_n^2`.
pub fn energy_n(n: usize, strength: f64) -> Result<f64> {
    let r = rho_n(n, strength)?;
    Ok(r * r)
}

/// First-order expansion `n^2 pi^2 (1 - 2/u)`; differs from the exact-square
/// form by exactly `n^2 pi^2 / u^2`.
pub fn energy_n_first_order(n: usize, strength: f64) -> Result<f64> {
    check_level(n, strength)?;
    let npi = n as f64 * PI;
    Ok(npi * npi * (1.0 - 2.0 / strength))
}

/// One tight-binding level in closed form.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TbLevel {
    pub n: usize,
    pub delta_n: f64,
    pub rho_n: f64,
    pub energy_n: f64,
}

impl TbLevel {
    pub fn new(n: usize, strength: f64) -> Result<Self> {
        Ok(TbLevel {
            n,
            delta_n: delta_n(n, strength)?,
            rho_n: rho_n(n, strength)?,
            energy_n: energy_n(n, strength)?,
        })
    }
}

/// One row of the exact-vs-tight-binding comparison.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct TbComparisonRow {
    pub n: usize,
    pub family: Family,
    pub rho_exact: f64,
    pub rho_tb: f64,
    pub rel_err: f64,
    pub energy_exact: f64,
    pub energy_tb: f64,
    pub delta_n: f64,
    /// `delta_n - delta'_n` between the two families, second order in the
    /// offsets when the strengths are comparable.
    pub delta_diff: f64,
}

/// Comparison table plus the fitted error constant: `rel_err <= c / u^2`
/// with `fitted_c` the largest observed `rel_err * u^2`.
#[derive(Debug, Clone, Serialize)]
pub struct TbComparison {
    pub rows: Vec<TbComparisonRow>,
    pub fitted_c: f64,
    pub regime_warning: bool,
}

/// Exact `g1` zeros vs the closed forms for `n = 1..=n_max`, both families.
pub fn tb_compare(lat: Lattice, n_max: usize, cfg: &SolverConfig) -> Result<TbComparison> {
    if n_max == 0 {
        return Err(Error::domain("n_max must be at least 1".to_string()));
    }
    cfg.validate()?;
    let (u, v) = (lat.u(), lat.v());
    if !(u > 0.0 && v > 0.0) {
        return Err(Error::domain(
            "tight-binding comparison needs strictly positive strengths".to_string(),
        ));
    }

    let mut rows = Vec::with_capacity(2 * n_max);
    let mut fitted_c: f64 = 0.0;
    for n in 1..=n_max {
        for (family, s, s_other) in [(Family::U, u, v), (Family::V, v, u)] {
            let rho_exact = nth_g1_zero(s, n, cfg)?;
            let rho_tb = rho_n(n, s)?;
            let rel_err = (rho_exact - rho_tb).abs() / rho_exact;
            fitted_c = fitted_c.max(rel_err * s * s);
            rows.push(TbComparisonRow {
                n,
                family,
                rho_exact,
                rho_tb,
                rel_err,
                energy_exact: rho_exact * rho_exact,
                energy_tb: energy_n(n, s)?,
                delta_n: delta_n(n, s)?,
                delta_diff: delta_n(n, s)? - delta_n(n, s_other)?,
            });
        }
    }
    Ok(TbComparison {
        rows,
        fitted_c,
        regime_warning: !in_tb_regime(u) || !in_tb_regime(v),
    })
}
