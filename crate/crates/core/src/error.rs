use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("rank deficient: numerical rank {rank}, need {required}")]
    RankDeficient { rank: usize, required: usize },

    #[error("no positive eigenvalues to water-fill over")]
    NoPositiveEigenvalues,

    #[error("infeasible: rate floors need power {required} but the budget is {budget}")]
    Infeasible { required: f64, budget: f64 },

    #[error("evaluation cap of {cap} reached before any start converged")]
    BudgetExceeded { cap: usize },

    #[error("grid search supports at most 3 mirror units, got {0}")]
    DimensionTooLarge(usize),

    #[error("nothing to aggregate")]
    EmptyGroup,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
