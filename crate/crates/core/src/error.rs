use thiserror::Error;

use crate::heisenberg::Point;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("defining function has vanishing gradient at {point}")]
    VanishingGradient { point: Point },

    #[error("characteristic point at {point}: W/|grad phi| = {ratio:e}")]
    CharacteristicPoint { point: Point, ratio: f64 },

    #[error("chart transversal is tangent to the surface at parameters ({u}, {v})")]
    DegenerateChart { u: f64, v: f64 },

    #[error("non-finite integrand sample at {at:?}")]
    NonFiniteIntegrand { at: Vec<f64> },

    #[error("no k <= {k_max} certifies a negative second variation")]
    ScanExhausted {
        k_max: u32,
        rows: Vec<crate::instability::ScanRow>,
    },

    #[error(
        "pulled-back value {pulled_back} and surface-integral value {surface} disagree beyond {tolerance:e}"
    )]
    RouteDisagreement {
        pulled_back: f64,
        surface: f64,
        tolerance: f64,
    },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
