//! Scan-then-refine bracketing root finder.
//!
//! The dispersion kernels oscillate with period ~pi in `rho`, so a uniform
//! scan at `scan_step` resolution followed by bisection on each sign-change
//! interval finds every transversal root in range. Tangential (even
//! multiplicity) roots are invisible to sign scanning; callers that need
//! them exploit the factorization `g2 + 1 = 2 g1(u) g1(v)` and refine on
//! `g1` instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A sign-change interval: `lo < hi` and `f_lo * f_hi <= 0`.
#[derive(Debug, Clone, Copy)]
pub struct Bracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl Bracket {
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        if lo.is_nan() || hi.is_nan() || lo >= hi {
            return Err(Error::domain(format!("bracket requires lo < hi, got [{lo}, {hi}]")));
        }
        if f_lo * f_hi > 0.0 {
            return Err(Error::domain(format!(
                "bracket endpoints do not straddle a root: f({lo}) = {f_lo}, f({hi}) = {f_hi}"
            )));
        }
        Ok(Bracket { lo, hi, f_lo, f_hi })
    }
}

/// Tolerances and caps shared by every root solve in the crate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverConfig {
    /// Final bracket width for refined roots.
    pub abs_tol: f64,
    /// Iteration cap per refinement.
    pub max_iter: usize,
    /// Scan resolution in rho units.
    pub scan_step: f64,
    /// Search ceiling in rho.
    pub rho_max: f64,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            abs_tol: 1e-12,
            max_iter: 200,
            scan_step: 1e-3,
            rho_max: 60.0,
        }
    }
}

impl SolverConfig {
    pub fn validate(&self) -> Result<()> {
        if self.abs_tol.is_nan() || self.abs_tol <= 0.0 {
            return Err(Error::domain(format!("abs_tol must be > 0, got {}", self.abs_tol)));
        }
        if self.scan_step.is_nan() || self.scan_step <= 0.0 {
            return Err(Error::domain(format!(
                "scan_step must be > 0, got {}",
                self.scan_step
            )));
        }
        if self.rho_max.is_nan() || self.rho_max <= self.scan_step {
            return Err(Error::domain(format!(
                "rho_max ({}) must exceed scan_step ({})",
                self.rho_max, self.scan_step
            )));
        }
        if self.max_iter == 0 {
            return Err(Error::domain("max_iter must be positive".to_string()));
        }
        Ok(())
    }
}

// zero counts as positive so an exact grid hit pairs with its negative neighbor
fn sign_of(x: f64) -> bool {
    x >= 0.0
}

/// Sample `f` on `[lo, hi]` at spacing <= `cfg.scan_step` and return every
/// sign-change interval, ascending and disjoint. No sign change, empty list.
pub fn scan_brackets<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cfg: &SolverConfig) -> Vec<Bracket> {
    debug_assert!(lo < hi);
    let n = ((hi - lo) / cfg.scan_step).ceil().max(1.0) as usize;
    let step = (hi - lo) / n as f64;

    let mut brackets = Vec::new();
    let mut x_prev = lo;
    let mut f_prev = f(lo);
    for i in 1..=n {
        let x = if i == n { hi } else { lo + i as f64 * step };
        let fx = f(x);
        if sign_of(f_prev) != sign_of(fx) || f_prev == 0.0 && i == 1 {
            // f_prev == 0.0 at the very first point still yields a valid
            // bracket because 0 * fx <= 0
            brackets.push(Bracket {
                lo: x_prev,
                hi: x,
                f_lo: f_prev,
                f_hi: fx,
            });
        }
        x_prev = x;
        f_prev = fx;
    }
    brackets
}

/// Bisect a bracket down to width `cfg.abs_tol` and return the midpoint of
/// the final interval. Deterministic: identical inputs give identical bits.
pub fn refine<F: Fn(f64) -> f64>(f: F, b: &Bracket, cfg: &SolverConfig) -> Result<f64> {
    let (mut lo, mut hi, mut f_lo) = (b.lo, b.hi, b.f_lo);
    debug_assert!(f_lo * b.f_hi <= 0.0);

    for _ in 0..cfg.max_iter {
        if hi - lo <= cfg.abs_tol {
            return Ok(0.5 * (lo + hi));
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // interval hit floating-point resolution
            return Ok(0.5 * (lo + hi));
        }
        let f_mid = f(mid);
        if sign_of(f_mid) == sign_of(f_lo) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Err(Error::Convergence {
        lo,
        hi,
        iterations: cfg.max_iter,
    })
}

/// Scan + refine: every transversal root of `f` on `[lo, hi]`, ascending,
/// deduplicated at `abs_tol` separation.
pub fn find_roots<F: Fn(f64) -> f64>(f: F, lo: f64, hi: f64, cfg: &SolverConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let mut roots = Vec::new();
    for b in scan_brackets(&f, lo, hi, cfg) {
        let r = refine(&f, &b, cfg)?;
        if roots.last().is_none_or(|&prev| r - prev > cfg.abs_tol) {
            roots.push(r);
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::{g1_raw, EPS_RHO};
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn scan_finds_cosine_zeros() {
        let cfg = SolverConfig::default();
        let brackets = scan_brackets(|x| x.cos(), 0.0, 2.0 * PI, &cfg);
        assert_eq!(brackets.len(), 2);
        // grid points can land bit-exactly on the roots, so bounds are inclusive
        assert!(brackets[0].lo <= FRAC_PI_2 && FRAC_PI_2 <= brackets[0].hi);
        assert!(brackets[1].lo <= 3.0 * FRAC_PI_2 && 3.0 * FRAC_PI_2 <= brackets[1].hi);
    }

    #[test]
    fn scan_g1_u5_two_brackets() {
        let cfg = SolverConfig::default();
        let brackets = scan_brackets(|r| g1_raw(r, 5.0), EPS_RHO, 2.0 * PI, &cfg);
        assert_eq!(brackets.len(), 2);
        assert!(brackets[0].lo > FRAC_PI_2 && brackets[0].hi < PI);
        assert!(brackets[1].lo > PI && brackets[1].hi < 2.0 * PI);
    }

    #[test]
    fn scan_constant_is_empty() {
        let cfg = SolverConfig::default();
        assert!(scan_brackets(|_| 1.0, 0.0, 10.0, &cfg).is_empty());
    }

    #[test]
    fn refine_cosine_root() {
        let cfg = SolverConfig::default();
        let f = |x: f64| x.cos();
        let b = Bracket::new(1.0, 2.0, f(1.0), f(2.0)).unwrap();
        let r = refine(f, &b, &cfg).unwrap();
        assert!((r - FRAC_PI_2).abs() <= 1e-12);
    }

    #[test]
    fn refine_cube_root_of_two() {
        let cfg = SolverConfig::default();
        let f = |x: f64| x * x * x - 2.0;
        let b = Bracket::new(1.0, 2.0, f(1.0), f(2.0)).unwrap();
        let r = refine(f, &b, &cfg).unwrap();
        assert!((r - 1.259_921_049_894_873_2).abs() <= 1e-12);
    }

    #[test]
    fn refine_first_g1_zero_u5() {
        // frozen from a 40-digit independent solve
        let expected = 2.653_662_399_559_064_4_f64;
        let cfg = SolverConfig::default();
        let f = |r: f64| g1_raw(r, 5.0);
        let brackets = scan_brackets(f, EPS_RHO, 2.0 * PI, &cfg);
        let r = refine(f, &brackets[0], &cfg).unwrap();
        assert!((r - expected).abs() <= 1e-11, "got {r}");
        assert!(f(r).abs() <= 1e-10);
    }

    #[test]
    fn roots_sorted_separated_deterministic() {
        let cfg = SolverConfig::default();
        let f = |x: f64| (3.0 * x).sin();
        let a = find_roots(f, 0.1, 10.0, &cfg).unwrap();
        let b = find_roots(f, 0.1, 10.0, &cfg).unwrap();
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
        for w in a.windows(2) {
            assert!(w[1] - w[0] > cfg.abs_tol);
        }
        // every root has a genuine sign change within abs_tol
        for &r in &a {
            assert!(f(r - cfg.abs_tol) * f(r + cfg.abs_tol) <= 0.0);
        }
    }

    #[test]
    fn exact_grid_zero_is_caught() {
        let cfg = SolverConfig {
            scan_step: 0.25,
            ..SolverConfig::default()
        };
        // root exactly on a scan node at x = 0.5
        let f = |x: f64| x - 0.5;
        let roots = find_roots(f, 0.0, 1.0, &cfg).unwrap();
        assert_eq!(roots.len(), 1);
        assert!((roots[0] - 0.5).abs() <= 1e-12);
    }

    #[test]
    fn iteration_cap_reports_interval() {
        let cfg = SolverConfig {
            max_iter: 3,
            ..SolverConfig::default()
        };
        let f = |x: f64| x.cos();
        let b = Bracket::new(0.0, 3.0, 1.0, f(3.0)).unwrap();
        match refine(f, &b, &cfg) {
            Err(Error::Convergence { lo, hi, iterations }) => {
                assert_eq!(iterations, 3);
                assert!(lo < FRAC_PI_2 && FRAC_PI_2 < hi);
            }
            other => panic!("expected convergence error, got {other:?}"),
        }
    }

    #[test]
    fn bracket_validation() {
        assert!(Bracket::new(2.0, 1.0, -1.0, 1.0).is_err());
        assert!(Bracket::new(1.0, 2.0, 1.0, 2.0).is_err());
        assert!(Bracket::new(1.0, 2.0, 0.0, 2.0).is_ok());
    }

    #[test]
    fn config_validation() {
        assert!(SolverConfig::default().validate().is_ok());
        let bad = SolverConfig {
            abs_tol: 0.0,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
        let bad = SolverConfig {
            rho_max: 1e-4,
            ..SolverConfig::default()
        };
        assert!(bad.validate().is_err());
    }
}
