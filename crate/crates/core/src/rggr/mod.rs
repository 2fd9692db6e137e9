//! Gene relationship graph: weights between alleles of adjacent loci,
//! their fitness-driven updates, and the locus distributions they induce.

mod graph;
mod params;
mod snapshot;
mod space;

pub use graph::{sample_locus, Rggr, UpdateTally, WeightedEdge};
pub use params::{edge_strength, strengthen_edge, weaken_edge, StrengthParams, UpdateParams, VFunction};
pub use snapshot::RggrSnapshot;
pub use space::{Chromosome, GeneSpace};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RggrError {
    #[error("gene space needs at least 2 loci, got {0}")]
    TooFewLoci(usize),
    #[error("locus {locus} has an empty alphabet")]
    EmptyAlphabet { locus: usize },
    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("gene {gene} at locus {locus} is outside alphabet of size {alphabet}")]
    GeneOutOfRange { locus: usize, gene: usize, alphabet: usize },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },
    #[error("cannot sample from an empty or all-zero distribution")]
    DegenerateDistribution,
    #[error("invalid snapshot: {0}")]
    InvalidSnapshot(String),
}
