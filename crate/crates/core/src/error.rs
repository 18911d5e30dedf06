//! Error type shared across the engine.

/// Errors surfaced by geometry operations.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("vector is not admissible at the given point{}", t.map(|t| format!(" (t = {t})")).unwrap_or_default())]
    Inadmissible { t: Option<f64> },
    #[error("point lies outside the chart domain")]
    OutsideChart,
    #[error("fundamental tensor is degenerate (|det g| = {det:.3e}, threshold {threshold:.3e})")]
    DegenerateTensor { det: f64, threshold: f64 },
    #[error("jet domain error: {0}")]
    JetDomain(String),
    #[error("curve left the admissible domain at t = {t_exit}")]
    DomainExit { t_exit: f64 },
    #[error("integrator failed at t = {t}: {reason}")]
    StepFailure { t: f64, reason: String },
    #[error("base curve is not a geodesic (max |D_γ' γ'| = {residual:.3e})")]
    NotAGeodesic { residual: f64 },
    #[error("t = {t} is a break instant and no side was specified")]
    BreakAmbiguity { t: f64 },
    #[error("curve and field do not share break instants")]
    BreakMismatch,
    #[error("endpoint is not on the submanifold (chart distance {dist:.3e})")]
    EndpointNotOnSubmanifold { dist: f64 },
    #[error("metric restricted to the tangent space is degenerate (|det Gram| = {det:.3e})")]
    DegenerateRestriction { det: f64 },
    #[error("flag is degenerate (denominator {denom:.3e})")]
    DegenerateFlag { denom: f64 },
    #[error("no normal section could be constructed at the requested parameter")]
    NoNormalSection,
    #[error("operation requires a nonnull geodesic (L(γ') = {l:.3e})")]
    NullGeodesic { l: f64 },
    #[error("Jacobi fields belong to different geodesics")]
    MismatchedGeodesic,
    #[error("vector lies outside the exponential-map domain (integration stopped at t = {t_exit})")]
    ExpDomain { t_exit: f64 },
    #[error("geodesic is not orthogonal to the submanifold (residual {residual:.3e})")]
    NotOrthogonal { residual: f64 },
    #[error("field endpoint is not tangent to the submanifold (residual {residual:.3e})")]
    NotTangent { residual: f64 },
    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable machine-readable code for CLI error objects.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Inadmissible { .. } => "domain.inadmissible",
            Error::OutsideChart => "domain.outside_chart",
            Error::DegenerateTensor { .. } => "domain.degenerate_tensor",
            Error::JetDomain(_) => "domain.jet",
            Error::DomainExit { .. } => "domain.exit",
            Error::StepFailure { .. } => "integrator.step_failure",
            Error::NotAGeodesic { .. } => "domain.not_a_geodesic",
            Error::BreakAmbiguity { .. } => "domain.break_ambiguity",
            Error::BreakMismatch => "domain.break_mismatch",
            Error::EndpointNotOnSubmanifold { .. } => "domain.endpoint_off_submanifold",
            Error::DegenerateRestriction { .. } => "domain.degenerate_restriction",
            Error::DegenerateFlag { .. } => "domain.degenerate_flag",
            Error::NoNormalSection => "domain.no_normal_section",
            Error::NullGeodesic { .. } => "domain.null_geodesic",
            Error::MismatchedGeodesic => "domain.mismatched_geodesic",
            Error::ExpDomain { .. } => "domain.exp",
            Error::NotOrthogonal { .. } => "domain.not_orthogonal",
            Error::NotTangent { .. } => "domain.not_tangent",
            Error::Invalid(_) => "domain.invalid",
        }
    }
}
