use thiserror::Error;

/// Conditions that invalidate a rigorous computation.
///
/// Any of these raised during a search poisons the run: the report is still
/// written but carries no certificate.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum Fault {
    #[error("value {0:e} left the working range |x| <= 2^30")]
    Range(f64),
    #[error("division by an interval [{lo:e}, {hi:e}] reaching below 2^-11 in magnitude")]
    DivisionGuard { lo: f64, hi: f64 },
    #[error("square root of an interval with negative lower endpoint {lo:e}")]
    NegativeSqrt { lo: f64 },
    #[error("safe square root applied to [{lo:e}, {hi:e}], which straddles zero above 2^-10")]
    SafeSqrtGuard { lo: f64, hi: f64 },
    #[error("coincident points: squared chordal distance not bounded away from zero")]
    Coincident,
    #[error("subdivision past depth 24 on factor {factor}")]
    DepthExhausted { factor: usize },
}
