//! Conical-point location, gap measurement, Fermi slope, and the saddle
//! structure of the eigenvalue function `F = f2 - g2`.
//!
//! Candidates sit at the zone edge `kappa_r = pi/2` (all odd multiples are
//! equivalent under the period of `f2`) paired with zeros of `g1(., u)` or
//! `g1(., v)`, where `g2 = -1` regardless of the other strength. For equal
//! strengths the touch is exact and the dispersion is a cone with
//! dimensionless slope `s_F = 2 rho_s / |g1'(rho_s)|`; for unequal strengths
//! a gap `|rho'^2 - rho^2|` opens between the adjacent `g1` families and the
//! cone survives only where that gap is small against the slope scale.

use serde::Serialize;
use std::f64::consts::FRAC_PI_2;

use crate::bands::{band_intervals, nth_g1_zero};
use crate::dispersion::{
    f2, g1_prime_raw, g1_raw, g2_raw, g2_second_raw, Family, Lattice, EPS_RHO,
};
use crate::error::{Error, Result};
use crate::rootfind::SolverConfig;
use crate::tightbinding::in_tb_regime;

/// Default outer edge of the slope-fit window in `Delta kappa`.
pub const DEFAULT_FIT_WINDOW: f64 = 1e-2;

/// The inner edge sits two decades inside the outer edge.
const FIT_WINDOW_RATIO: f64 = 1e-2;

/// Fit points per branch.
const FIT_POINTS: usize = 8;

/// Slopes below this are treated as flat-band pathologies.
const SLOPE_DERIVATIVE_FLOOR: f64 = 1e-10;

/// A zone-edge candidate: a zero of one `g1` family at `kappa_r = pi/2`.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct Candidate {
    pub kappa_r: f64,
    pub rho_s: f64,
    pub family: Family,
    pub energy: f64,
}

/// Full conical-point report.
#[derive(Debug, Clone, Serialize)]
pub struct DiracPoint {
    pub kappa_r: f64,
    pub rho_s: f64,
    pub family: Family,
    pub energy: f64,
    /// Dimensionless cone slope `d eps / d kappa = 2 rho_s / |g1'|`.
    pub slope_analytic: f64,
    /// |slope| extracted from a linear fit of the two adjacent bands, absent
    /// when the local gap swamps the fit window.
    pub slope_fitted: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub fit_note: Option<String>,
    /// Energy gap between the adjacent band edges at the zone edge.
    pub gap: f64,
    pub conical: bool,
}

/// Quadratic expansion of `F = f2 - g2` at a candidate.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SaddleReport {
    pub d2f_dkappa2: f64,
    pub d2f_drho2: f64,
    pub value_residual: f64,
    pub grad_residual: f64,
    pub quadratic_fit_error: f64,
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

/// All zone-edge candidates with `rho_s <= rho_max`, sorted by `rho`.
///
/// For equal strengths the two families produce the same zeros, so each is
/// reported once (tagged `u`); `gap_at_edge` still resolves both families
/// independently.
pub fn find_conical_candidates(
    lat: Lattice,
    rho_max: f64,
    cfg: &SolverConfig,
) -> Result<Vec<Candidate>> {
    check_ceiling(cfg, rho_max)?;

    let mut candidates = Vec::new();
    let mut push = |rho: f64, family: Family| {
        candidates.push(Candidate {
            kappa_r: FRAC_PI_2,
            rho_s: rho,
            family,
            energy: rho * rho,
        });
    };

    let mut k = 1usize;
    loop {
        if (k - 1) as f64 * std::f64::consts::PI + FRAC_PI_2 - 0.01 > rho_max {
            break;
        }
        let r_u = nth_g1_zero(lat.u(), k, cfg)?;
        if lat.symmetric() {
            if r_u <= rho_max {
                push(r_u, Family::U);
            }
        } else {
            let r_v = nth_g1_zero(lat.v(), k, cfg)?;
            // same-index zeros share a pi-interval; emit in rho order
            let (first, second) = if r_u <= r_v {
                ((r_u, Family::U), (r_v, Family::V))
            } else {
                ((r_v, Family::V), (r_u, Family::U))
            };
            if first.0 <= rho_max {
                push(first.0, first.1);
            }
            if second.0 <= rho_max {
                push(second.0, second.1);
            }
        }
        k += 1;
    }
    Ok(candidates)
}

/// Cone slope from the closed form `2 rho_s / |g1'(rho_s)|`. Equals
/// `sqrt(f2'' / g2'') * 2 rho_s` with `f2'' = 4`, `g2'' = 4 g1'^2`.
pub fn fermi_slope_analytic(rho_s: f64, strength: f64) -> Result<f64> {
    if rho_s.is_nan() || rho_s < EPS_RHO {
        return Err(Error::domain(format!("rho_s must be >= {EPS_RHO:e}, got {rho_s}")));
    }
    let g = g1_raw(rho_s, strength);
    if g.abs() > 1e-8 {
        return Err(Error::NotConical(format!(
            "g1({rho_s}, {strength}) = {g:e} is not a zero"
        )));
    }
    let deriv = g1_prime_raw(rho_s, strength);
    if deriv.abs() < SLOPE_DERIVATIVE_FLOOR {
        return Err(Error::DegenerateSlope {
            rho_s,
            derivative: deriv,
        });
    }
    Ok(2.0 * rho_s / deriv.abs())
}

/// Index of the candidate's zero within its own family (1-based). Zeros live
/// in ((k-1) pi + pi/2, k pi), so the ratio to pi always ceils to k.
fn family_index(rho_s: f64) -> usize {
    (rho_s / std::f64::consts::PI).ceil() as usize
}

/// The adjacent pair of `g2 = -1` roots at this candidate: its own zero and
/// the same-index zero of the other family, in ascending order.
fn edge_pair(lat: Lattice, cand: &Candidate, cfg: &SolverConfig) -> Result<(f64, f64)> {
    let k = family_index(cand.rho_s);
    let own = cand.family;
    let other = match own {
        Family::U => Family::V,
        Family::V => Family::U,
    };
    let r_own = nth_g1_zero(lat.strength(own), k, cfg)?;
    if (r_own - cand.rho_s).abs() > 1e-6 {
        return Err(Error::NotConical(format!(
            "candidate rho_s = {} does not match family zero {} (index {k})",
            cand.rho_s, r_own
        )));
    }
    let r_other = nth_g1_zero(lat.strength(other), k, cfg)?;
    Ok(if r_own <= r_other {
        (r_own, r_other)
    } else {
        (r_other, r_own)
    })
}

/// Energy gap `|rho'^2 - rho^2|` between the two `g1`-family zeros adjacent
/// at this candidate. Exactly zero for equal strengths, where both families
/// solve the same equation.
pub fn gap_at_edge(lat: Lattice, cand: &Candidate, cfg: &SolverConfig) -> Result<f64> {
    let (lo, hi) = edge_pair(lat, cand, cfg)?;
    Ok(hi * hi - lo * lo)
}

/// |slope| from least-squares fits of the adjacent bands against
/// `Delta kappa` on `[-fit_window, -fit_window/100]`, averaged over the
/// upper and lower branches (the averaging cancels the leading curvature).
pub fn fermi_slope_fitted(
    lat: Lattice,
    cand: &Candidate,
    cfg: &SolverConfig,
    fit_window: f64,
) -> Result<f64> {
    if fit_window.is_nan() || fit_window <= 0.0 || fit_window >= FRAC_PI_2 {
        return Err(Error::domain(format!(
            "fit window must lie in (0, pi/2), got {fit_window}"
        )));
    }
    let s_analytic = fermi_slope_analytic(cand.rho_s, lat.strength(cand.family))?;
    let (lo_edge, hi_edge) = edge_pair(lat, cand, cfg)?;
    let gap = hi_edge * hi_edge - lo_edge * lo_edge;

    // the cone spans ~2 s_F w in energy across the window; a gap beyond that
    // leaves nothing linear to fit
    let span = 2.0 * s_analytic * fit_window;
    if gap > span {
        return Err(Error::FitUnreliable {
            rho_s: cand.rho_s,
            gap,
            span,
        });
    }

    // the band above the candidate tops out at the exact g2 = +1 root k*pi,
    // so the interval table only needs to reach a little past it
    let k = family_index(cand.rho_s);
    let ceiling = (k as f64 * std::f64::consts::PI + 1.0).min(cfg.rho_max);
    let intervals = band_intervals(lat, cfg, ceiling)?;
    let below = intervals
        .iter()
        .position(|iv| (iv.1 - lo_edge).abs() <= 1e-6)
        .ok_or_else(|| Error::NotConical(format!("no band tops out at rho = {lo_edge}")))?;
    let above = intervals
        .iter()
        .position(|iv| (iv.0 - hi_edge).abs() <= 1e-6)
        .ok_or_else(|| Error::NotConical(format!("no band starts at rho = {hi_edge}")))?;

    let fit_min = fit_window * FIT_WINDOW_RATIO;
    let offsets: Vec<f64> = (0..FIT_POINTS)
        .map(|i| -fit_window + i as f64 * (fit_window - fit_min) / (FIT_POINTS - 1) as f64)
        .collect();

    let slope_of = |band_idx: usize, edge: f64| -> Result<f64> {
        let interval = intervals[band_idx];
        let mut xs = Vec::with_capacity(FIT_POINTS);
        let mut ys = Vec::with_capacity(FIT_POINTS);
        for &dk in &offsets {
            let p = crate::bands::band_at_kappa_in(lat, FRAC_PI_2 + dk, band_idx + 1, interval, cfg)?;
            xs.push(dk);
            ys.push(p.energy - edge * edge);
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let cov: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let var: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        Ok(cov / var)
    };

    let s_below = slope_of(below, lo_edge)?;
    let s_above = slope_of(above, hi_edge)?;
    Ok(0.5 * (s_below.abs() + s_above.abs()))
}

/// Quadratic expansion of `F(kappa, rho) = f2 - g2` at the candidate.
///
/// At a genuine conical point `F` and its gradient vanish and the second
/// derivatives have opposite signs: `d2F/dkappa2 = 4` at the zone edge while
/// `d2F/drho2 = -g2''` is negative, so the zero set is locally a cone.
pub fn saddle_expansion(lat: Lattice, cand: &Candidate, cfg: &SolverConfig) -> Result<SaddleReport> {
    cfg.validate()?;
    if !lat.symmetric() && !(in_tb_regime(lat.u()) && in_tb_regime(lat.v())) {
        return Err(Error::NotConical(format!(
            "expansion needs equal strengths or the tight-binding regime, got u = {}, v = {}",
            lat.u(),
            lat.v()
        )));
    }
    let g = g1_raw(cand.rho_s, lat.strength(cand.family));
    if g.abs() > 1e-8 {
        return Err(Error::NotConical(format!(
            "g1(rho_s) = {g:e}: not a zone-edge candidate"
        )));
    }

    let (u, v) = (lat.u(), lat.v());
    let (kr, rs) = (cand.kappa_r, cand.rho_s);

    let value = f2(kr) - g2_raw(rs, u, v);
    let grad_kappa = -2.0 * (2.0 * kr).sin();
    let grad_rho = -crate::dispersion::g2_prime_raw(rs, u, v);
    let d2_kappa = -4.0 * (2.0 * kr).cos();
    let d2_rho = -g2_second_raw(rs, u, v);

    // max deviation of F from its quadratic form over a disc in (dk, dr)
    let radius = 1e-3;
    let mut quad_err: f64 = 0.0;
    for ir in 1..=4 {
        let r = radius * ir as f64 / 4.0;
        for ia in 0..16 {
            let theta = std::f64::consts::TAU * ia as f64 / 16.0;
            let (dk, dr) = (r * theta.cos(), r * theta.sin());
            let f_exact = f2(kr + dk) - g2_raw(rs + dr, u, v);
            let f_quad = 0.5 * d2_kappa * dk * dk + 0.5 * d2_rho * dr * dr;
            quad_err = quad_err.max((f_exact - f_quad).abs());
        }
    }

    Ok(SaddleReport {
        d2f_dkappa2: d2_kappa,
        d2f_drho2: d2_rho,
        value_residual: value.abs(),
        grad_residual: grad_kappa.abs().max(grad_rho.abs()),
        quadratic_fit_error: quad_err,
    })
}

/// Candidates with slopes, gaps, and the conical classification filled in,
/// sorted by energy.
pub fn analyze(
    lat: Lattice,
    rho_max: f64,
    cfg: &SolverConfig,
    fit_window: f64,
) -> Result<Vec<DiracPoint>> {
    let candidates = find_conical_candidates(lat, rho_max, cfg)?;
    let mut points = Vec::with_capacity(candidates.len());
    for cand in &candidates {
        let slope_analytic = fermi_slope_analytic(cand.rho_s, lat.strength(cand.family))?;
        let gap = gap_at_edge(lat, cand, cfg)?;
        let (slope_fitted, fit_note) = match fermi_slope_fitted(lat, cand, cfg, fit_window) {
            Ok(s) => (Some(s), None),
            Err(e @ Error::FitUnreliable { .. }) => (None, Some(e.to_string())),
            Err(e) => return Err(e),
        };
        let window_span = fit_window - fit_window * FIT_WINDOW_RATIO;
        let conical = gap < 0.05 * slope_analytic * window_span;
        points.push(DiracPoint {
            kappa_r: cand.kappa_r,
            rho_s: cand.rho_s,
            family: cand.family,
            energy: cand.energy,
            slope_analytic,
            slope_fitted,
            fit_note,
            gap,
            conical,
        });
    }
    points.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::g1_prime;
    use std::f64::consts::PI;

    const CFG: SolverConfig = SolverConfig {
        abs_tol: 1e-12,
        max_iter: 200,
        scan_step: 1e-3,
        rho_max: 60.0,
    };

    // first zeros of g1(., u), frozen from a 40-digit independent solve
    const RHO1_U2: f64 = 2.288_929_728_103_404_4;
    const RHO1_U5: f64 = 2.653_662_399_559_064_4;
    const RHO1_U100: f64 = 3.110_497_702_305_585;
    const RHO1_U110: f64 = 3.113_297_502_619_009_9;
    const SLOPE1_U5: f64 = 2.152_222_133_434_710_6;

    #[test]
    fn free_candidates_at_odd_half_pi() {
        let lat = Lattice::new(0.0, 0.0).unwrap();
        let cands = find_conical_candidates(lat, 10.0, &CFG).unwrap();
        let expect = [FRAC_PI_2, 3.0 * FRAC_PI_2, 5.0 * FRAC_PI_2];
        assert_eq!(cands.len(), 3);
        for (c, x) in cands.iter().zip(&expect) {
            assert!((c.rho_s - x).abs() <= 1e-11);
            assert_eq!(c.kappa_r, FRAC_PI_2);
        }
    }

    #[test]
    fn u5_one_zero_per_pi_interval() {
        let lat = Lattice::new(5.0, 5.0).unwrap();
        let cands = find_conical_candidates(lat, 10.0, &CFG).unwrap();
        assert_eq!(cands.len(), 3);
        assert!((cands[0].rho_s - RHO1_U5).abs() <= 1e-11);
        for (k, c) in cands.iter().enumerate() {
            let n = k as f64;
            assert!(c.rho_s > n * PI && c.rho_s < (n + 1.0) * PI);
        }
    }

    #[test]
    fn asymmetric_candidates_interleave_and_touch_minus_one() {
        let lat = Lattice::new(2.0, 5.0).unwrap();
        let cands = find_conical_candidates(lat, 12.0, &CFG).unwrap();
        // families alternate within each pi interval (u zero below v zero for u < v)
        assert_eq!(cands[0].family, Family::U);
        assert_eq!(cands[1].family, Family::V);
        assert!((cands[0].rho_s - RHO1_U2).abs() <= 1e-11);
        assert!((cands[1].rho_s - RHO1_U5).abs() <= 1e-11);
        for c in &cands {
            let g2v = g2_raw(c.rho_s, 2.0, 5.0);
            assert!((g2v + 1.0).abs() <= 1e-10, "g2 = {g2v} at rho = {}", c.rho_s);
        }
    }

    #[test]
    fn analytic_slope_free_lattice() {
        assert!((fermi_slope_analytic(FRAC_PI_2, 0.0).unwrap() - PI).abs() <= 1e-15);
        assert!((fermi_slope_analytic(3.0 * FRAC_PI_2, 0.0).unwrap() - 3.0 * PI).abs() <= 1e-14);
    }

    #[test]
    fn analytic_slope_u5_frozen() {
        let s = fermi_slope_analytic(RHO1_U5, 5.0).unwrap();
        assert!((s - SLOPE1_U5).abs() <= 1e-11);
    }

    #[test]
    fn slope_two_forms_agree() {
        // 2 rho / |g1'| == sqrt(f2''/g2'') * 2 rho with f2'' = 4, g2'' = 4 g1'^2
        for &(rho, u) in &[(RHO1_U5, 5.0), (RHO1_U2, 2.0), (RHO1_U100, 100.0)] {
            let s1 = fermi_slope_analytic(rho, u).unwrap();
            let lat = Lattice::new(u, u).unwrap();
            let g2pp = g2_second_raw(rho, lat.u(), lat.v());
            let s2 = (4.0 / g2pp).sqrt() * 2.0 * rho;
            assert!((s1 - s2).abs() <= 1e-12 * s1, "{s1} vs {s2}");
        }
    }

    #[test]
    fn slope_rejects_non_zero() {
        assert!(matches!(
            fermi_slope_analytic(1.0, 5.0),
            Err(Error::NotConical(_))
        ));
    }

    #[test]
    fn gap_zero_for_equal_strengths() {
        let lat = Lattice::new(7.0, 7.0).unwrap();
        let cands = find_conical_candidates(lat, 12.0, &CFG).unwrap();
        assert!(!cands.is_empty());
        for c in &cands {
            assert_eq!(gap_at_edge(lat, c, &CFG).unwrap(), 0.0);
        }
    }

    #[test]
    fn gap_handles_zeros_hugging_n_pi() {
        // for strengths past ~300 the zeros sit within 0.01 of n pi; indexing
        // must not spill into the next interval
        let lat = Lattice::new(1000.0, 1001.0).unwrap();
        let cands = find_conical_candidates(lat, 7.0, &CFG).unwrap();
        assert_eq!(cands.len(), 4);
        for pair in cands.chunks(2) {
            let gap = gap_at_edge(lat, &pair[0], &CFG).unwrap();
            assert!(gap > 0.0 && gap < 1e-3, "gap {gap}");
        }
    }

    #[test]
    fn gap_tight_binding_pair() {
        let lat = Lattice::new(100.0, 110.0).unwrap();
        let cands = find_conical_candidates(lat, 4.0, &CFG).unwrap();
        let gap = gap_at_edge(lat, &cands[0], &CFG).unwrap();
        let frozen = RHO1_U110 * RHO1_U110 - RHO1_U100 * RHO1_U100;
        assert!((gap - frozen).abs() <= 1e-9);
        // against the first-order estimate 2 pi^2 (1/u - 1/v)
        let estimate = 2.0 * PI * PI * (1.0 / 100.0 - 1.0 / 110.0);
        assert!((gap - estimate).abs() / estimate < 0.2);
    }

    #[test]
    fn gap_positive_for_generic_asymmetric() {
        let lat = Lattice::new(2.0, 5.0).unwrap();
        let cands = find_conical_candidates(lat, 4.0, &CFG).unwrap();
        let gap = gap_at_edge(lat, &cands[0], &CFG).unwrap();
        assert!(gap > 0.1);
    }

    #[test]
    fn fitted_slope_free_lattice() {
        let lat = Lattice::new(0.0, 0.0).unwrap();
        let cands = find_conical_candidates(lat, 3.0, &CFG).unwrap();
        let s = fermi_slope_fitted(lat, &cands[0], &CFG, DEFAULT_FIT_WINDOW).unwrap();
        assert!((s - PI).abs() / PI < 0.01);
    }

    #[test]
    fn fitted_slope_symmetric_u5() {
        let lat = Lattice::new(5.0, 5.0).unwrap();
        let cands = find_conical_candidates(lat, 4.0, &CFG).unwrap();
        let fitted = fermi_slope_fitted(lat, &cands[0], &CFG, DEFAULT_FIT_WINDOW).unwrap();
        let analytic = fermi_slope_analytic(cands[0].rho_s, 5.0).unwrap();
        assert!((fitted - analytic).abs() / analytic < 0.01);
    }

    #[test]
    fn fitted_slope_tight_binding_near_degenerate() {
        // nearly equal strengths deep in the tight-binding regime: the gap is
        // tiny against the window and the cone slope survives the fit
        let lat = Lattice::new(100.0, 100.01).unwrap();
        let cands = find_conical_candidates(lat, 4.0, &CFG).unwrap();
        let fitted = fermi_slope_fitted(lat, &cands[0], &CFG, DEFAULT_FIT_WINDOW).unwrap();
        let analytic = fermi_slope_analytic(cands[0].rho_s, lat.strength(cands[0].family)).unwrap();
        assert!(
            (fitted - analytic).abs() / analytic < 0.05,
            "fitted {fitted} vs analytic {analytic}"
        );
    }

    #[test]
    fn fitted_slope_gap_dominated_window_is_biased() {
        // at u = 100, v = 101 the n = 1 gap (~1.9e-3) is comparable to the
        // energy the cone sweeps across the default window (~3.8e-3), so the
        // linear fit proceeds but lands well below the asymptotic slope; the
        // bias is the measurement, not a failure
        let lat = Lattice::new(100.0, 101.0).unwrap();
        let cands = find_conical_candidates(lat, 4.0, &CFG).unwrap();
        let fitted = fermi_slope_fitted(lat, &cands[0], &CFG, DEFAULT_FIT_WINDOW).unwrap();
        let analytic = fermi_slope_analytic(cands[0].rho_s, lat.strength(cands[0].family)).unwrap();
        let ratio = fitted / analytic;
        assert!(
            (0.55..0.75).contains(&ratio),
            "expected gap-suppressed slope, got ratio {ratio}"
        );
    }

    #[test]
    fn fit_unreliable_when_gap_exceeds_window() {
        let lat = Lattice::new(100.0, 110.0).unwrap();
        let cands = find_conical_candidates(lat, 4.0, &CFG).unwrap();
        match fermi_slope_fitted(lat, &cands[0], &CFG, DEFAULT_FIT_WINDOW) {
            Err(Error::FitUnreliable { gap, span, .. }) => {
                assert!(gap > span);
            }
            other => panic!("expected FitUnreliable, got {other:?}"),
        }
    }

    #[test]
    fn saddle_free_lattice() {
        let lat = Lattice::new(0.0, 0.0).unwrap();
        let cands = find_conical_candidates(lat, 3.0, &CFG).unwrap();
        let rep = saddle_expansion(lat, &cands[0], &CFG).unwrap();
        assert_eq!(rep.d2f_dkappa2, 4.0);
        assert!((rep.d2f_drho2 + 4.0).abs() <= 1e-9);
        assert!(rep.value_residual <= 1e-10);
        assert!(rep.grad_residual <= 1e-8);
        assert!(rep.quadratic_fit_error <= 1e-6);
    }

    #[test]
    fn saddle_signature_symmetric() {
        let lat = Lattice::new(5.0, 5.0).unwrap();
        for c in find_conical_candidates(lat, 10.0, &CFG).unwrap() {
            let rep = saddle_expansion(lat, &c, &CFG).unwrap();
            assert!(rep.d2f_dkappa2 * rep.d2f_drho2 < 0.0);
            let gp = g1_prime(c.rho_s, 5.0).unwrap();
            assert!((rep.d2f_drho2 + 4.0 * gp * gp).abs() <= 1e-9);
            assert!(rep.quadratic_fit_error <= 1e-6);
        }
    }

    #[test]
    fn saddle_rejects_generic_asymmetric() {
        let lat = Lattice::new(2.0, 5.0).unwrap();
        let cands = find_conical_candidates(lat, 4.0, &CFG).unwrap();
        assert!(matches!(
            saddle_expansion(lat, &cands[0], &CFG),
            Err(Error::NotConical(_))
        ));
    }

    #[test]
    fn gap_scaling_with_strength_imbalance() {
        // u = v (1 + eta), u large: the n = 1 gap is O(eta / u); halving eta
        // halves the gap within 10%
        let u = 100.0;
        let gap_for = |eta: f64| {
            let lat = Lattice::new(u, u * (1.0 + eta)).unwrap();
            let cands = find_conical_candidates(lat, 4.0, &CFG).unwrap();
            gap_at_edge(lat, &cands[0], &CFG).unwrap()
        };
        let g1 = gap_for(0.04);
        let g2 = gap_for(0.02);
        let ratio = g1 / g2;
        assert!((ratio - 2.0).abs() / 2.0 < 0.1, "ratio {ratio}");
    }

    #[test]
    fn analyze_sorted_and_classified() {
        let lat = Lattice::new(100.0, 110.0).unwrap();
        let points = analyze(lat, 14.0, &CFG, DEFAULT_FIT_WINDOW).unwrap();
        assert!(points.windows(2).all(|w| w[0].energy <= w[1].energy));
        // the large strength imbalance gaps out the cone at every level here
        let first = &points[0];
        assert!(!first.conical);
        assert!(first.slope_fitted.is_none() && first.fit_note.is_some());

        let lat = Lattice::new(7.0, 7.0).unwrap();
        let points = analyze(lat, 14.0, &CFG, DEFAULT_FIT_WINDOW).unwrap();
        for p in &points {
            assert!(p.conical);
            assert_eq!(p.gap, 0.0);
            assert!(p.slope_fitted.is_some());
        }
    }
}
