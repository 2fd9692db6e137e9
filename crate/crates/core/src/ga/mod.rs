//! The evolutionary loop, its operators and configuration.

mod config;
mod engine;
mod fitness;
mod operators;

pub use config::{GaConfig, Mode, MutationEndpoint, Selection};
pub use engine::{evolve, GenerationRow, RunRecord, Termination};
pub use fitness::{FitnessError, FitnessFunction, FnFitness};
pub use operators::{mutate_at, mutate_gene, roulette_masses, select_index, select_parents, single_point_crossover};

use thiserror::Error;

use crate::rggr::RggrError;

#[derive(Debug, Error)]
pub enum GaError {
    #[error("invalid GA configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Graph(#[from] RggrError),
    #[error("operator error: {0}")]
    Operator(String),
    #[error("fitness evaluation failed at generation {generation} for {chromosome:?}: {message}")]
    Fitness {
        generation: usize,
        chromosome: Vec<usize>,
        message: String,
    },
}
