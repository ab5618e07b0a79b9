use thiserror::Error;

/// Errors produced by the solver.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// Input outside the supported domain (negative strength, rho below the
    /// positivity floor, malformed configuration, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A bracketing refinement exhausted its iteration budget. Carries the
    /// last bracketing interval for diagnostics.
    #[error("no convergence after {iterations} iterations; last interval [{lo:e}, {hi:e}]")]
    Convergence { lo: f64, hi: f64, iterations: usize },

    /// Fewer complete bands than requested exist below the search ceiling.
    #[error("band {band} not found: only {available} complete bands below rho_max = {rho_max}")]
    BandNotFound {
        band: usize,
        available: usize,
        rho_max: f64,
    },

    /// Failure inside a per-band dispersion solve, with band and kappa context.
    #[error("band {band} at kappa = {kappa}: {source}")]
    BandSolve {
        band: usize,
        kappa: f64,
        #[source]
        source: Box<Error>,
    },

    /// |g1'| at the candidate is below the floor, so the cone slope is undefined.
    #[error("degenerate slope at rho_s = {rho_s}: |g1'| = {derivative:e} < 1e-10")]
    DegenerateSlope { rho_s: f64, derivative: f64 },

    /// Local gap too large for the linear fit window to see the cone.
    #[error("fit unreliable at rho_s = {rho_s}: gap {gap:e} exceeds fit-window energy span {span:e}")]
    FitUnreliable { rho_s: f64, gap: f64, span: f64 },

    /// The point fails the conical-point preconditions.
    #[error("not a conical point: {0}")]
    NotConical(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Wrap an error with band/kappa context from a per-band solve.
    pub(crate) fn in_band(self, band: usize, kappa: f64) -> Self {
        Error::BandSolve {
            band,
            kappa,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
