use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AciError {
    #[error("reward {0} outside [0, 1]")]
    RewardOutOfRange(f64),
    #[error("controller requires a binary reward, got {0}")]
    NonBinaryReward(f64),
    #[error("cost {cost} outside [0, {c_max}] for arm {arm}")]
    CostOutOfRange { arm: usize, cost: f64, c_max: f64 },
    #[error("demand {demand} outside [1, {cap}]")]
    DemandOutOfRange { demand: f64, cap: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("arm {0} has not been played yet")]
    Unplayed(usize),
    #[error("identity requires a constant step size")]
    NonConstantSchedule,
    #[error("empty input: {0}")]
    Empty(&'static str),
    #[error("infeasible benchmark: {0}")]
    Infeasible(String),
    #[error("set function is not monotone: prefix {k} has value {value}, below the previous {prev_value}")]
    NonMonotone { k: usize, value: f64, prev_value: f64 },
}

pub type Result<T> = std::result::Result<T, AciError>;

pub(crate) fn invalid(msg: impl Into<String>) -> AciError {
    AciError::InvalidParameter(msg.into())
}
