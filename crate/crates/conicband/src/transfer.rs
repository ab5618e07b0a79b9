//! Transfer-matrix oracle for the dispersion relation.
//!
//! Builds the exact 2x2 monodromy matrix of one doubled cell by composing
//! free propagation segments with delta kicks, in the state convention
//! `(psi, d psi/d x~)` with `x~ = x/a`. The Bloch condition reads
//! `cos(2 kappa) = Tr M / 2`, so `Tr M / 2` must reproduce `g2(rho)`, a
//! derivation-independent check on the closed-form kernel.
//!
//! The `(psi, d psi/d x~)` convention keeps the delta kick independent of
//! `rho` and makes every factor exactly unimodular.
//!
//! Composition is carried out in compensated (double-double) arithmetic.
//! Entries of the composed matrix grow like `u v`, and at that magnitude a
//! plain f64 product would bury the unit determinant under entry rounding
//! (the det residual scales like eps times the squared entry size). The
//! compensated entries keep both the Wronskian check and the half-trace
//! meaningful at their stated tolerances.

use std::ops::Mul;

use crate::dispersion::{sinc, Lattice, EPS_RHO};
use crate::error::{Error, Result};

/// Double-double scalar: value `hi` plus trailing error `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
struct Dd {
    hi: f64,
    lo: f64,
}

fn two_sum(a: f64, b: f64) -> Dd {
    let s = a + b;
    let bb = s - a;
    Dd {
        hi: s,
        lo: (a - (s - bb)) + (b - bb),
    }
}

fn two_prod(a: f64, b: f64) -> Dd {
    let p = a * b;
    Dd {
        hi: p,
        lo: a.mul_add(b, -p),
    }
}

impl Dd {
    fn add(self, other: Dd) -> Dd {
        let s = two_sum(self.hi, other.hi);
        let lo = s.lo + self.lo + other.lo;
        let r = two_sum(s.hi, lo);
        Dd { hi: r.hi, lo: r.lo }
    }

    fn mul(self, other: Dd) -> Dd {
        let p = two_prod(self.hi, other.hi);
        let lo = p.lo + self.hi * other.lo + self.lo * other.hi;
        let r = two_sum(p.hi, lo);
        Dd { hi: r.hi, lo: r.lo }
    }

    fn neg(self) -> Dd {
        Dd {
            hi: -self.hi,
            lo: -self.lo,
        }
    }

    fn value(self) -> f64 {
        self.hi + self.lo
    }
}

/// Real 2x2 matrix propagating `(psi, d psi/d x~)` across part of a cell.
///
/// The public entries are the rounded values; compensated trailing terms
/// from composition ride along privately so `trace` and `det` do not lose
/// the cancelled digits.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransferMatrix {
    pub m11: f64,
    pub m12: f64,
    pub m21: f64,
    pub m22: f64,
    lo: [f64; 4],
}

impl TransferMatrix {
    pub const IDENTITY: TransferMatrix = TransferMatrix {
        m11: 1.0,
        m12: 0.0,
        m21: 0.0,
        m22: 1.0,
        lo: [0.0; 4],
    };

    fn from_entries(m11: f64, m12: f64, m21: f64, m22: f64) -> Self {
        TransferMatrix {
            m11,
            m12,
            m21,
            m22,
            lo: [0.0; 4],
        }
    }

    fn dd(&self) -> [Dd; 4] {
        [
            Dd { hi: self.m11, lo: self.lo[0] },
            Dd { hi: self.m12, lo: self.lo[1] },
            Dd { hi: self.m21, lo: self.lo[2] },
            Dd { hi: self.m22, lo: self.lo[3] },
        ]
    }

    pub fn trace(&self) -> f64 {
        let [a, _, _, d] = self.dd();
        a.add(d).value()
    }

    pub fn det(&self) -> f64 {
        let [a, b, c, d] = self.dd();
        a.mul(d).add(b.mul(c).neg()).value()
    }
}

impl Mul for TransferMatrix {
    type Output = TransferMatrix;

    fn mul(self, rhs: TransferMatrix) -> TransferMatrix {
        let [a11, a12, a21, a22] = self.dd();
        let [b11, b12, b21, b22] = rhs.dd();
        let c11 = a11.mul(b11).add(a12.mul(b21));
        let c12 = a11.mul(b12).add(a12.mul(b22));
        let c21 = a21.mul(b11).add(a22.mul(b21));
        let c22 = a21.mul(b12).add(a22.mul(b22));
        TransferMatrix {
            m11: c11.hi,
            m12: c12.hi,
            m21: c21.hi,
            m22: c22.hi,
            lo: [c11.lo, c12.lo, c21.lo, c22.lo],
        }
    }
}

/// Propagation across one free segment of dimensionless length 1:
/// `[[cos rho, sin rho / rho], [-rho sin rho, cos rho]]`.
pub fn free_propagator(rho: f64) -> Result<TransferMatrix> {
    if !rho.is_finite() || rho < EPS_RHO {
        return Err(Error::domain(format!(
            "free propagator requires rho >= {EPS_RHO:e}, got {rho}"
        )));
    }
    let (s, c) = rho.sin_cos();
    Ok(TransferMatrix::from_entries(c, sinc(rho), -rho * s, c))
}

/// Derivative jump across one delta: psi is continuous, `d psi/d x~` jumps by
/// `2 u psi`.
pub fn delta_kick(strength: f64) -> Result<TransferMatrix> {
    if !strength.is_finite() || strength < 0.0 {
        return Err(Error::domain(format!(
            "delta kick requires strength >= 0, got {strength}"
        )));
    }
    Ok(TransferMatrix::from_entries(1.0, 0.0, 2.0 * strength, 1.0))
}

/// Monodromy of one doubled cell: kick(v) . free . kick(u) . free.
///
/// Any cyclic rotation of the factors changes the matrix but not its trace,
/// which is all the dispersion relation uses.
pub fn period_matrix(lat: Lattice, rho: f64) -> Result<TransferMatrix> {
    let free = free_propagator(rho)?;
    let ku = delta_kick(lat.u())?;
    let kv = delta_kick(lat.v())?;
    Ok(kv * free * ku * free)
}

/// Bloch dispersion from the monodromy trace: `Tr M / 2`, to be compared with
/// `g2(rho)`.
pub fn dispersion_from_trace(lat: Lattice, rho: f64) -> Result<f64> {
    Ok(0.5 * period_matrix(lat, rho)?.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::g2;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn free_propagator_at_pi() {
        let m = free_propagator(PI).unwrap();
        assert!((m.m11 + 1.0).abs() < 1e-15);
        assert!(m.m12.abs() < 1e-15);
        assert!(m.m21.abs() < 1e-15);
        assert!((m.m22 + 1.0).abs() < 1e-15);
    }

    #[test]
    fn free_propagator_at_half_pi() {
        let m = free_propagator(FRAC_PI_2).unwrap();
        assert!(m.m11.abs() < 1e-15);
        assert!((m.m12 - 2.0 / PI).abs() < 1e-15);
        assert!((m.m21 + FRAC_PI_2).abs() < 1e-15);
        assert!(m.m22.abs() < 1e-15);
    }

    #[test]
    fn free_propagator_domain() {
        assert!(free_propagator(0.0).is_err());
        assert!(free_propagator(-1.0).is_err());
    }

    #[test]
    fn delta_kick_values() {
        assert_eq!(delta_kick(0.0).unwrap(), TransferMatrix::IDENTITY);
        let m = delta_kick(3.0).unwrap();
        assert_eq!((m.m11, m.m12, m.m21, m.m22), (1.0, 0.0, 6.0, 1.0));
        assert_eq!(m.det(), 1.0);
        assert!(delta_kick(-0.1).is_err());
    }

    #[test]
    fn free_composition_gives_cos_2rho() {
        let lat = Lattice::new(0.0, 0.0).unwrap();
        for &rho in &[0.3, 1.0, 2.7, 11.0] {
            let tr = period_matrix(lat, rho).unwrap().trace();
            assert!((tr - 2.0 * (2.0 * rho).cos()).abs() < 1e-12);
        }
    }

    #[test]
    fn trace_at_pi_kills_strength_terms() {
        let lat = Lattice::new(1.0, 2.0).unwrap();
        let half_trace = dispersion_from_trace(lat, PI).unwrap();
        assert!((half_trace - 1.0).abs() < 1e-14);
    }

    #[test]
    fn trace_matches_g2_at_generic_point() {
        let lat = Lattice::new(5.0, 3.0).unwrap();
        let rho = 2.1;
        let t = dispersion_from_trace(lat, rho).unwrap();
        let g = g2(rho, lat).unwrap();
        assert!((t - g).abs() <= 1e-9 * (1.0 + g.abs()));
    }

    proptest! {
        #[test]
        fn oracle_matches_g2(rho in 0.01..50.0, u in 0.0..100.0, v in 0.0..100.0) {
            let lat = Lattice::new(u, v).unwrap();
            let t = dispersion_from_trace(lat, rho).unwrap();
            let g = g2(rho, lat).unwrap();
            prop_assert!((t - g).abs() <= 1e-9 * (1.0 + g.abs()));
        }

        #[test]
        fn unit_determinant(rho in 0.01..50.0, u in 0.0..100.0, v in 0.0..100.0) {
            let lat = Lattice::new(u, v).unwrap();
            let m = period_matrix(lat, rho).unwrap();
            prop_assert!((m.det() - 1.0).abs() <= 1e-12);
        }

        #[test]
        fn free_propagator_unimodular(rho in 0.001..60.0) {
            let m = free_propagator(rho).unwrap();
            prop_assert!((m.det() - 1.0).abs() <= 1e-15);
        }

        #[test]
        fn trace_swap_symmetry(rho in 0.01..50.0, u in 0.0..100.0, v in 0.0..100.0) {
            let a = dispersion_from_trace(Lattice::new(u, v).unwrap(), rho).unwrap();
            let b = dispersion_from_trace(Lattice::new(v, u).unwrap(), rho).unwrap();
            prop_assert!((a - b).abs() <= 1e-11 * (1.0 + a.abs()));
        }
    }
}
