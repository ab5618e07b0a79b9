//! Deterministic self-verification suite behind `conicband verify`.
//!
//! Each check computes a max residual over a grid or a seeded random sample
//! and compares it against the tolerance its module guarantees. Output is a
//! pure function of `(u, v, samples, seed)`, so two runs with the same seed
//! are byte-identical.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

use crate::bands::{band_intervals, band_structure};
use crate::dirac::{
    fermi_slope_analytic, fermi_slope_fitted, find_conical_candidates, gap_at_edge,
    saddle_expansion, DEFAULT_FIT_WINDOW,
};
use crate::dispersion::{
    f1, f2, g1_prime_raw, g1_raw, g2_prime_raw, g2_raw, g2_second_raw, Lattice, EPS_RHO,
};
use crate::error::Result;
use crate::rootfind::SolverConfig;
use crate::transfer::period_matrix;

/// Outcome of one verification check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub max_residual: f64,
    pub tol: f64,
    pub pass: bool,
}

impl CheckResult {
    fn new(name: &'static str, max_residual: f64, tol: f64) -> Self {
        CheckResult {
            name,
            max_residual,
            tol,
            pass: max_residual <= tol,
        }
    }

    pub fn render(&self) -> String {
        format!(
            "{:<24} max residual {:>12.3e}   tol {:>8.1e}   {}",
            self.name,
            self.max_residual,
            self.tol,
            if self.pass { "PASS" } else { "FAIL" }
        )
    }
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

fn richardson<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    let d = |h: f64| (f(x + h) - f(x - h)) / (2.0 * h);
    (4.0 * d(h / 2.0) - d(h)) / 3.0
}

fn second_stencil<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> f64 {
    (-f(x + 2.0 * h) + 16.0 * f(x + h) - 30.0 * f(x) + 16.0 * f(x - h) - f(x - 2.0 * h))
        / (12.0 * h * h)
}

/// Run every applicable check for the given lattice.
pub fn run_verification(
    lat: Lattice,
    samples: usize,
    seed: u64,
    cfg: &SolverConfig,
) -> Result<VerifyReport> {
    cfg.validate()?;
    let (u, v) = (lat.u(), lat.v());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut checks = Vec::new();

    // identity f2 = 2 f1^2 - 1 on a dense kappa grid
    {
        let mut worst: f64 = 0.0;
        for i in 0..10_000 {
            let kappa = -PI + 2.0 * PI * i as f64 / 9_999.0;
            worst = worst.max((f2(kappa) - (2.0 * f1(kappa) * f1(kappa) - 1.0)).abs());
        }
        checks.push(CheckResult::new("identity-f2", worst, 1e-12));
    }

    // identity g2 = 2 g1(u) g1(v) - 1 on a dense rho grid
    {
        let mut worst: f64 = 0.0;
        for i in 0..10_000 {
            let rho = EPS_RHO + (50.0 - EPS_RHO) * i as f64 / 9_999.0;
            let lhs = g2_raw(rho, u, v);
            let rhs = 2.0 * g1_raw(rho, u) * g1_raw(rho, v) - 1.0;
            worst = worst.max((lhs - rhs).abs() / (1.0 + lhs.abs()));
        }
        checks.push(CheckResult::new("identity-g2", worst, 1e-10));
    }

    // transfer-matrix oracle on seeded random rho
    {
        let mut worst_trace: f64 = 0.0;
        let mut worst_det: f64 = 0.0;
        for _ in 0..samples.max(1) {
            let rho = rng.gen_range(0.01..50.0);
            let m = period_matrix(lat, rho)?;
            let g = g2_raw(rho, u, v);
            worst_trace = worst_trace.max((0.5 * m.trace() - g).abs() / (1.0 + g.abs()));
            worst_det = worst_det.max((m.det() - 1.0).abs());
        }
        checks.push(CheckResult::new("transfer-trace", worst_trace, 1e-9));
        checks.push(CheckResult::new("transfer-det", worst_det, 1e-12));
    }

    // analytic derivatives vs finite differences at seeded random points;
    // step sizes balance stencil truncation against the eps*|g2|/h^k
    // rounding floor for strengths up to ~100
    {
        let h = 3e-3;
        let mut worst1: f64 = 0.0;
        let mut worst2: f64 = 0.0;
        let mut worst2nd: f64 = 0.0;
        for _ in 0..100 {
            let rho = rng.gen_range(0.5..25.0);
            for s in [u, v] {
                worst1 = worst1
                    .max((g1_prime_raw(rho, s) - richardson(|x| g1_raw(x, s), rho, h)).abs());
            }
            worst2 =
                worst2.max((g2_prime_raw(rho, u, v) - richardson(|x| g2_raw(x, u, v), rho, h)).abs());
        }
        for _ in 0..100 {
            let rho = rng.gen_range(2.0..25.0);
            worst2nd = worst2nd.max(
                (g2_second_raw(rho, u, v) - second_stencil(|x| g2_raw(x, u, v), rho, 5e-3)).abs(),
            );
        }
        checks.push(CheckResult::new("derivative-g1", worst1, 1e-8));
        checks.push(CheckResult::new("derivative-g2", worst2, 1e-8));
        checks.push(CheckResult::new("derivative-g2-second", worst2nd, 1e-6));
    }

    // every g1-family zero solves g2 = -1
    let edge_ceiling = cfg.rho_max.min(15.0);
    {
        let candidates = find_conical_candidates(lat, edge_ceiling, cfg)?;
        let mut worst: f64 = 0.0;
        for c in &candidates {
            worst = worst.max((g2_raw(c.rho_s, u, v) + 1.0).abs());
        }
        checks.push(CheckResult::new("edge-factorization", worst, 1e-10));
    }

    // dispersion residual across a sampled band structure
    {
        let available = band_intervals(lat, cfg, cfg.rho_max)?.len();
        let n_bands = available.min(4);
        let mut worst: f64 = 0.0;
        if n_bands > 0 {
            for band in band_structure(lat, n_bands, 21, cfg)? {
                for p in &band.points {
                    worst = worst.max((f2(p.kappa) - g2_raw(p.rho, u, v)).abs());
                }
            }
        }
        checks.push(CheckResult::new("band-residual", worst, 1e-9));
    }

    if lat.symmetric() {
        let candidates = find_conical_candidates(lat, edge_ceiling, cfg)?;

        // equal strengths close every zone-edge gap
        {
            let mut worst: f64 = 0.0;
            for c in &candidates {
                worst = worst.max(gap_at_edge(lat, c, cfg)?);
            }
            checks.push(CheckResult::new("gap-closure", worst, 1e-8));
        }

        // saddle structure of F = f2 - g2 at each conical point
        {
            let mut value: f64 = 0.0;
            let mut grad: f64 = 0.0;
            let mut d2k: f64 = 0.0;
            let mut d2r: f64 = 0.0;
            let mut quad: f64 = 0.0;
            for c in &candidates {
                let rep = saddle_expansion(lat, c, cfg)?;
                value = value.max(rep.value_residual);
                grad = grad.max(rep.grad_residual);
                d2k = d2k.max((rep.d2f_dkappa2 - 4.0).abs());
                let gp = g1_prime_raw(c.rho_s, u);
                d2r = d2r.max((rep.d2f_drho2 + 4.0 * gp * gp).abs());
                quad = quad.max(rep.quadratic_fit_error);
                if rep.d2f_dkappa2 * rep.d2f_drho2 >= 0.0 {
                    d2r = f64::INFINITY; // wrong signature: force a FAIL
                }
            }
            checks.push(CheckResult::new("saddle-value", value, 1e-10));
            checks.push(CheckResult::new("saddle-gradient", grad, 1e-8));
            checks.push(CheckResult::new("saddle-d2kappa", d2k, 1e-12));
            checks.push(CheckResult::new("saddle-d2rho", d2r, 1e-9));
            checks.push(CheckResult::new("saddle-quadratic", quad, 1e-6));
        }

        // fitted cone slope against the closed form
        {
            let mut worst: f64 = 0.0;
            for c in candidates.iter().filter(|c| c.rho_s <= 10.0) {
                let analytic = fermi_slope_analytic(c.rho_s, u)?;
                let fitted = fermi_slope_fitted(lat, c, cfg, DEFAULT_FIT_WINDOW)?;
                worst = worst.max((fitted - analytic).abs() / analytic);
            }
            checks.push(CheckResult::new("fermi-velocity", worst, 1e-2));
        }
    }

    if u == 0.0 && v == 0.0 {
        // folded free parabola regression
        let mut worst: f64 = 0.0;
        for band in band_structure(lat, 4, 201, cfg)? {
            for p in &band.points {
                let m = band.index / 2; // fold count: bands 2m and 2m+1 share it
                let expect = if band.index % 2 == 1 {
                    m as f64 * PI + p.kappa.abs()
                } else {
                    m as f64 * PI - p.kappa.abs()
                };
                worst = worst.max((p.energy - expect * expect).abs());
            }
        }
        checks.push(CheckResult::new("free-particle-bands", worst, 1e-10));
    }

    Ok(VerifyReport { checks })
}
