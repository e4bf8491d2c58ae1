use crate::geom::UnitVector3;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("origin is not an interior point: support {support:e} at {direction} is below margin {margin:e}")]
    OriginNotInterior {
        direction: UnitVector3,
        support: f64,
        margin: f64,
    },

    #[error("degenerate projection: hull area {0:e}")]
    DegenerateProjection(f64),

    #[error("leading coefficient of the quartic is zero")]
    DegenerateQuartic,

    #[error("hypothesis violated: {} direction(s) admit no rotation match", .0.len())]
    HypothesisViolated(Vec<UnitVector3>),

    #[error("body generation failed after {0} attempts")]
    Generation(usize),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidArgument(msg.into())
}
