//! Band assembly over the Brillouin zone of the doubled cell.
//!
//! Allowed energies are where `|g2(rho)| <= 1`; band edges solve
//! `g2 = +1` or `g2 = -1`. The `g2 = -1` family is never scanned directly:
//! `g2 + 1 = 2 g1(u) g1(v)`, so those edges are zeros of `g1` of one family
//! or the other, which stay transversal even when the equal-strength lattice
//! turns the `g2 = -1` touch points tangential. The `g2 = +1` family is
//! seeded with the exact roots at `rho = m pi` (where `sin` kills every
//! strength term) and completed by a direct scan.
//!
//! Inside each band the half-trace is strictly monotone, so each
//! `(band, kappa)` solve is a single bracketed root between the band's edges.

use serde::{Deserialize, Serialize};
use std::f64::consts::{FRAC_PI_2, PI};

use crate::dispersion::{f2, g1_raw, g2_raw, Family, Lattice, EPS_RHO};
use crate::error::{Error, Result};
use crate::rootfind::{find_roots, refine, scan_brackets, Bracket, SolverConfig};

/// Which edge equation a band edge solves.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// `g2 = +1` (kappa = 0 zone center).
    PlusOne,
    /// `g2 = -1` (kappa = +/- pi/2 zone edge).
    MinusOne,
}

/// One solution of `g2 = +/-1`.
#[derive(Debug, Clone, Copy)]
pub struct BandEdge {
    pub rho: f64,
    pub kind: EdgeKind,
    /// For `MinusOne` edges, which `g1` family vanishes here.
    pub family: Option<Family>,
    /// Tangential touch point: the adjacent gap has zero width, so this edge
    /// belongs to two bands at once.
    pub degenerate: bool,
}

/// One sampled point on a band.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct BandPoint {
    pub kappa: f64,
    pub rho: f64,
    pub energy: f64,
}

/// One band over a uniform kappa grid.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Band {
    pub index: usize,
    pub points: Vec<BandPoint>,
    /// (rho at band bottom, rho at band top).
    pub edges: (f64, f64),
}

fn check_ceiling(cfg: &SolverConfig, rho_max: f64) -> Result<()> {
    cfg.validate()?;
    if rho_max.is_nan() || rho_max <= 0.0 || rho_max > cfg.rho_max {
        return Err(Error::domain(format!(
            "rho_max = {rho_max} must lie in (0, {}]",
            cfg.rho_max
        )));
    }
    Ok(())
}

/// Zeros of `g1(., strength)` on `(EPS_RHO, rho_max]`, ascending.
pub(crate) fn g1_zeros(strength: f64, rho_max: f64, cfg: &SolverConfig) -> Result<Vec<f64>> {
    find_roots(|r| g1_raw(r, strength), EPS_RHO, rho_max, cfg)
}

/// The k-th (1-based) zero of `g1(., strength)`. There is exactly one per
/// interval `((k-1) pi + pi/2, k pi)` for any strength >= 0, sitting on the
/// left endpoint in the free limit, so a slightly widened window always
/// brackets it.
pub(crate) fn nth_g1_zero(strength: f64, k: usize, cfg: &SolverConfig) -> Result<f64> {
    debug_assert!(k >= 1);
    let lo = (k - 1) as f64 * PI + FRAC_PI_2 - 0.01;
    let hi = k as f64 * PI;
    let roots = find_roots(|r| g1_raw(r, strength), lo, hi, cfg)?;
    match roots.as_slice() {
        [r] => Ok(*r),
        _ => Err(Error::domain(format!(
            "expected exactly one g1 zero in [{lo}, {hi}] for strength {strength}, found {}",
            roots.len()
        ))),
    }
}

/// All solutions of `g2 = +1` and `g2 = -1` on `(EPS_RHO, rho_max]`, tagged
/// and ascending.
pub fn band_edges(lat: Lattice, cfg: &SolverConfig, rho_max: f64) -> Result<Vec<BandEdge>> {
    check_ceiling(cfg, rho_max)?;
    let (u, v) = (lat.u(), lat.v());
    let mut edges: Vec<BandEdge> = Vec::new();

    if u == 0.0 && v == 0.0 {
        // free lattice: cos(2 rho) touches -1 at odd multiples of pi/2 and +1
        // at multiples of pi, all tangentially; no gap ever opens
        let mut m = 1usize;
        loop {
            let rho = m as f64 * FRAC_PI_2;
            if rho > rho_max {
                break;
            }
            let minus = m % 2 == 1;
            edges.push(BandEdge {
                rho,
                kind: if minus { EdgeKind::MinusOne } else { EdgeKind::PlusOne },
                family: minus.then_some(Family::U),
                degenerate: true,
            });
            m += 1;
        }
        return Ok(edges);
    }

    // g2 = -1 family via the g1 factorization
    if lat.symmetric() {
        for rho in g1_zeros(u, rho_max, cfg)? {
            edges.push(BandEdge {
                rho,
                kind: EdgeKind::MinusOne,
                family: Some(Family::U),
                degenerate: true,
            });
        }
    } else {
        for rho in g1_zeros(u, rho_max, cfg)? {
            edges.push(BandEdge {
                rho,
                kind: EdgeKind::MinusOne,
                family: Some(Family::U),
                degenerate: false,
            });
        }
        for rho in g1_zeros(v, rho_max, cfg)? {
            edges.push(BandEdge {
                rho,
                kind: EdgeKind::MinusOne,
                family: Some(Family::V),
                degenerate: false,
            });
        }
    }

    // g2 = +1 family: rho = m pi is an exact simple root whenever u + v > 0
    // (g2' there is 2(u+v)/(m pi)); the remaining crossings come from a scan
    let mut plus: Vec<f64> = Vec::new();
    let mut m = 1usize;
    loop {
        let rho = m as f64 * PI;
        if rho > rho_max {
            break;
        }
        plus.push(rho);
        m += 1;
    }
    let h = |r: f64| g2_raw(r, u, v) - 1.0;
    for b in scan_brackets(h, EPS_RHO, rho_max, cfg) {
        let r = refine(h, &b, cfg)?;
        if plus.iter().all(|&p| (r - p).abs() > 1e-9) {
            plus.push(r);
        }
    }
    for rho in plus {
        edges.push(BandEdge {
            rho,
            kind: EdgeKind::PlusOne,
            family: None,
            degenerate: false,
        });
    }

    edges.sort_by(|a, b| a.rho.total_cmp(&b.rho));
    Ok(edges)
}

/// Complete band intervals `(lo, hi)` in rho, ascending. A degenerate edge
/// closes the gap on its far side, so it bounds two consecutive bands.
pub(crate) fn band_intervals(
    lat: Lattice,
    cfg: &SolverConfig,
    rho_max: f64,
) -> Result<Vec<(f64, f64)>> {
    let edges = band_edges(lat, cfg, rho_max)?;
    let mut bounds: Vec<f64> = Vec::with_capacity(edges.len() + 1);
    bounds.push(0.0);
    for e in &edges {
        bounds.push(e.rho);
        if e.degenerate {
            bounds.push(e.rho);
        }
    }

    let (u, v) = (lat.u(), lat.v());
    let mut bands = Vec::new();
    for w in bounds.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        if hi - lo <= EPS_RHO {
            continue; // zero-width gap at a tangency
        }
        let mid = 0.5 * (lo + hi);
        if g2_raw(mid, u, v).abs() <= 1.0 {
            bands.push((lo, hi));
        }
    }
    Ok(bands)
}

/// Residual below which a solve snaps to the band edge. Near a tangency the
/// sign of `g2 - c` at the shared edge is evaluation noise, and snapping
/// keeps the two adjoining bands on the identical point.
const EDGE_CLAMP_TOL: f64 = 1e-10;

fn solve_in_interval(
    lat: Lattice,
    kappa: f64,
    band: usize,
    interval: (f64, f64),
    cfg: &SolverConfig,
) -> Result<BandPoint> {
    let (lo, hi) = interval;
    let c = f2(kappa);
    let (u, v) = (lat.u(), lat.v());
    let h = |r: f64| g2_raw(r, u, v) - c;
    let (h_lo, h_hi) = (h(lo), h(hi));

    let rho = if h_lo.abs() <= EDGE_CLAMP_TOL {
        lo
    } else if h_hi.abs() <= EDGE_CLAMP_TOL {
        hi
    } else if h_lo.signum() == h_hi.signum() {
        // c fell marginally outside [g2(lo), g2(hi)]: only possible at the
        // zone center/edge where c = +/-1 meets a refined edge value
        let (r, miss) = if h_lo.abs() <= h_hi.abs() {
            (lo, h_lo.abs())
        } else {
            (hi, h_hi.abs())
        };
        if miss > 1e-6 {
            return Err(Error::domain(format!(
                "dispersion target {c} outside band {band} range [{lo}, {hi}]"
            ))
            .in_band(band, kappa));
        }
        r
    } else {
        let b = Bracket::new(lo, hi, h_lo, h_hi).map_err(|e| e.in_band(band, kappa))?;
        refine(h, &b, cfg).map_err(|e| e.in_band(band, kappa))?
    };

    Ok(BandPoint {
        kappa,
        rho,
        energy: rho * rho,
    })
}

/// Per-band solve against a known band interval, for callers that already
/// hold the interval table.
pub(crate) fn band_at_kappa_in(
    lat: Lattice,
    kappa: f64,
    band: usize,
    interval: (f64, f64),
    cfg: &SolverConfig,
) -> Result<BandPoint> {
    solve_in_interval(lat, kappa, band, interval, cfg)
}

/// The n-th ascending solution of `g2(rho) = cos(2 kappa)`.
pub fn band_at_kappa(lat: Lattice, kappa: f64, n: usize, cfg: &SolverConfig) -> Result<BandPoint> {
    if !(kappa.is_finite() && kappa.abs() <= FRAC_PI_2 + 1e-12) {
        return Err(Error::domain(format!(
            "kappa must lie in [-pi/2, pi/2], got {kappa}"
        )));
    }
    if n == 0 {
        return Err(Error::domain("band index is 1-based".to_string()));
    }
    let intervals = band_intervals(lat, cfg, cfg.rho_max)?;
    let interval = *intervals.get(n - 1).ok_or(Error::BandNotFound {
        band: n,
        available: intervals.len(),
        rho_max: cfg.rho_max,
    })?;
    solve_in_interval(lat, kappa, n, interval, cfg)
}

/// Uniform kappa grid spanning `[-pi/2, pi/2]` inclusive.
pub(crate) fn kappa_grid(n_kappa: usize) -> Vec<f64> {
    (0..n_kappa)
        .map(|i| PI * (i as f64 / (n_kappa - 1) as f64 - 0.5))
        .collect()
}

/// The lowest `n_bands` bands sampled on a uniform `n_kappa`-point grid.
///
/// Degenerate zone-edge points appear in both adjoining bands with identical
/// `(kappa, rho)`, keeping every band a total function on the grid.
pub fn band_structure(
    lat: Lattice,
    n_bands: usize,
    n_kappa: usize,
    cfg: &SolverConfig,
) -> Result<Vec<Band>> {
    if n_kappa < 2 {
        return Err(Error::domain(format!("need at least 2 kappa points, got {n_kappa}")));
    }
    if n_bands == 0 {
        return Err(Error::domain("need at least 1 band".to_string()));
    }
    let intervals = band_intervals(lat, cfg, cfg.rho_max)?;
    if intervals.len() < n_bands {
        return Err(Error::BandNotFound {
            band: n_bands,
            available: intervals.len(),
            rho_max: cfg.rho_max,
        });
    }
    let grid = kappa_grid(n_kappa);
    let mut bands = Vec::with_capacity(n_bands);
    for n in 1..=n_bands {
        let interval = intervals[n - 1];
        let points = grid
            .iter()
            .map(|&kappa| solve_in_interval(lat, kappa, n, interval, cfg))
            .collect::<Result<Vec<_>>>()?;
        bands.push(Band {
            index: n,
            points,
            edges: interval,
        });
    }
    Ok(bands)
}
