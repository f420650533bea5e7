use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("{what} = {value} is outside [0, 1]")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid game parameters: {0}")]
    InvalidParams(String),

    #[error("invalid population mix: {0}")]
    InvalidMix(String),

    #[error("adoption level z = {z} is infeasible for this mix (rational share y = {y})")]
    Infeasible { z: f64, y: f64 },

    #[error("the population has no rational agents")]
    NoRationals,

    #[error("parameters sit on a regime boundary: {boundary}")]
    RegimeAmbiguity { boundary: String },

    #[error("closed-form stable set disagrees with the attractor check at z = {z}")]
    TableMismatch { z: f64 },

    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),

    #[error("step size dt = {dt} must be positive and no larger than t_end = {t_end}")]
    StepSize { dt: f64, t_end: f64 },

    #[error("invalid environment model: {0}")]
    InvalidModel(String),

    #[error("CO2 trajectory has not settled by t = {t} (relative change {rel_change:e})")]
    Divergence { t: f64, rel_change: f64 },
}
