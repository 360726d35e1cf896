use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("degenerate chart at (u, v) = ({u}, {v}): |r_u x r_v| = {norm:e}")]
    DegenerateChart { u: f64, v: f64, norm: f64 },

    #[error("parameter ({u}, {v}) lies outside the chart domain")]
    OutOfDomain { u: f64, v: f64 },

    #[error("umbilic point at (u, v) = ({u}, {v}) inside the requested region")]
    UmbilicInRegion { u: f64, v: f64 },

    #[error("curve is singular at t = {t}: |gamma'| = {speed:e}")]
    SingularCurve { t: f64, speed: f64 },

    #[error("curve left the chart domain at t = {t}")]
    DomainExit { t: f64 },

    #[error("integration did not converge: {0}")]
    StepFailure(String),

    #[error(
        "no rolling exists: normal curvature and geodesic torsion coincide with those of the rolling surface at t = {t}"
    )]
    NotRolling { t: f64 },

    #[error("rotation rate is not skew-symmetric (asymmetry {asymmetry:e})")]
    NotSkew { asymmetry: f64 },

    #[error("instantaneous motion has no center (screw motion, pitch {pitch:e})")]
    NoCenter { pitch: f64 },

    #[error("need at least three pairwise nonparallel directions, got {distinct}")]
    BadDirections { distinct: usize },

    #[error("rolling surface is not tangent to the contact surface at the start point: {0}")]
    Misplaced(String),

    #[error("invalid surface definition: {0}")]
    Config(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
