//! Genetic algorithm whose crossover and mutation loci are chosen from a
//! gene relationship graph learned from population fitness.

pub mod benchmarks;
pub mod experiment;
pub mod featsel;
pub mod ga;
pub mod report;
pub mod rggr;
mod scalar;

pub use benchmarks::DiscretizedBox;
pub use ga::{evolve, FitnessFunction, GaConfig, GaError, Mode, RunRecord};
pub use rggr::{Chromosome, GeneSpace, Rggr, RggrError, StrengthParams, UpdateParams, VFunction};
pub use scalar::Real;

pub type Rggr64 = Rggr<f64>;
pub type Rggr32 = Rggr<f32>;
pub type RunRecord64 = RunRecord<f64>;
pub type UpdateParams64 = UpdateParams<f64>;
pub type StrengthParams64 = StrengthParams<f64>;
pub type DiscretizedBox64 = DiscretizedBox<f64>;
