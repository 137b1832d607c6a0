use thiserror::Error;

/// Error type shared by all numerical modules.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("resolution too coarse: {0}")]
    ResolutionTooCoarse(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("quadrature tolerance not reached: requested {requested:.3e}, achieved {achieved:.3e}")]
    QuadratureTolerance { requested: f64, achieved: f64 },

    #[error("eigensolver failed to converge: {0}")]
    NonConvergence(String),

    #[error("Wronskian too small (spectral parameter near an eigenvalue?): |W| = {0:.3e}")]
    SmallWronskian(f64),

    #[error("decaying branch contaminated: two-start relative difference {0:.3e}")]
    Contamination(f64),

    #[error("series start radius {0} too large, must stay below 1")]
    SeriesRadius(f64),

    #[error("no sign change across bracket: a(T_lo) = {a_lo:.6e}, a(T_hi) = {a_hi:.6e}")]
    NoSignChange { a_lo: f64, a_hi: f64 },

    #[error("time step {dt:.3e} exceeds stability bound {bound:.3e}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("no blowup within step budget ({0} steps)")]
    NoBlowupWithinBudget(usize),

    #[error("ODE integrator exceeded step budget at t = {0}")]
    StepBudget(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
