use ndarray::Array2;
use rand::Rng;

use super::params::{edge_strength, strengthen_edge, weaken_edge, StrengthParams, UpdateParams};
use super::{Chromosome, GeneSpace, RggrError};
use crate::Real;

/// Weighted multipartite graph over adjacent loci.
///
/// Column `k` holds an `n_k x n_{k+1}` matrix of non-negative weights; entry
/// `(i, j)` is the learned affinity between allele `i` at locus `k` and
/// allele `j` at locus `k + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct Rggr<T> {
    space: GeneSpace,
    weights: Vec<Array2<T>>,
}

/// Counters from one population update.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UpdateTally {
    pub strengthened: usize,
    pub weakened: usize,
    /// Number of updates applied to each edge, per column.
    pub edge_updates: Vec<Array2<u32>>,
}

/// One edge in a top-k listing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedEdge<T> {
    pub from: usize,
    pub to: usize,
    pub weight: T,
}

impl<T: Real> Rggr<T> {
    /// Graph over `space` with every weight set to one.
    pub fn new(space: GeneSpace) -> Self {
        let weights = space
            .alphabet_sizes()
            .windows(2)
            .map(|w| Array2::from_elem((w[0], w[1]), T::one()))
            .collect();
        Self { space, weights }
    }

    /// Builds a graph from explicit weight matrices.
    pub fn from_weights(space: GeneSpace, weights: Vec<Array2<T>>) -> Result<Self, RggrError> {
        if weights.len() != space.num_edge_columns() {
            return Err(RggrError::InvalidSnapshot(format!(
                "expected {} weight matrices, found {}",
                space.num_edge_columns(),
                weights.len()
            )));
        }
        for (k, m) in weights.iter().enumerate() {
            let shape = (space.alphabet_size(k), space.alphabet_size(k + 1));
            if m.dim() != shape {
                return Err(RggrError::InvalidSnapshot(format!(
                    "column {k} has shape {:?}, expected {shape:?}",
                    m.dim()
                )));
            }
            if let Some(w) = m.iter().find(|w| !(w.is_finite() && **w >= T::zero())) {
                return Err(RggrError::InvalidSnapshot(format!(
                    "column {k} holds invalid weight {w}"
                )));
            }
        }
        Ok(Self { space, weights })
    }

    pub fn space(&self) -> &GeneSpace {
        &self.space
    }

    pub fn columns(&self) -> &[Array2<T>] {
        &self.weights
    }

    pub fn weight(&self, column: usize, from: usize, to: usize) -> T {
        self.weights[column][[from, to]]
    }

    /// Weight of the edge `chromosome` uses in `column`. No bounds checking
    /// beyond ndarray's.
    pub fn chain_weight(&self, chromosome: &Chromosome, column: usize) -> T {
        let (i, j) = chromosome.edge(column);
        self.weights[column][[i, j]]
    }

    /// Applies the fitness-driven update for one generation.
    ///
    /// Individuals are processed in order and each one's edges left to right,
    /// always against the current weight, so an edge shared by `N`
    /// individuals is transformed `N` times. Each individual uses its own
    /// `delta = fitness - avg_fitness`.
    pub fn update_from_population(
        &mut self,
        population: &[Chromosome],
        fitnesses: &[T],
        avg_fitness: T,
        params: &UpdateParams<T>,
    ) -> Result<UpdateTally, RggrError> {
        if population.len() != fitnesses.len() {
            return Err(RggrError::LengthMismatch {
                expected: population.len(),
                found: fitnesses.len(),
            });
        }
        for c in population {
            self.space.check(c)?;
        }
        let mut tally = UpdateTally {
            strengthened: 0,
            weakened: 0,
            edge_updates: self.weights.iter().map(|m| Array2::zeros(m.dim())).collect(),
        };
        let rho = params.resolve_rho(avg_fitness);
        for (chromosome, &fitness) in population.iter().zip(fitnesses) {
            let delta = fitness - avg_fitness;
            let accept = delta >= params.lambda;
            for (k, matrix) in self.weights.iter_mut().enumerate() {
                let edge = chromosome.edge(k);
                let w = matrix[edge];
                matrix[edge] = if accept {
                    strengthen_edge(w, delta, rho, params, k)
                } else {
                    weaken_edge(w, (delta - params.lambda).abs(), rho, params, k)
                };
                tally.edge_updates[k][edge] += 1;
            }
            if accept {
                tally.strengthened += 1;
            } else {
                tally.weakened += 1;
            }
        }
        Ok(tally)
    }

    /// Strength of each edge on `chromosome`'s chain.
    pub fn chain_strengths(&self, chromosome: &Chromosome, params: &StrengthParams<T>) -> Result<Vec<T>, RggrError> {
        self.space.check(chromosome)?;
        Ok((0..self.space.num_edge_columns())
            .map(|k| edge_strength(self.chain_weight(chromosome, k), params))
            .collect())
    }

    /// Probability of cutting each edge column when crossing `a` with `b`:
    /// proportional to the summed strengths of both parents' edges there.
    pub fn crossover_locus_probs(
        &self,
        a: &Chromosome,
        b: &Chromosome,
        params: &StrengthParams<T>,
    ) -> Result<Vec<T>, RggrError> {
        let sa = self.chain_strengths(a, params)?;
        let sb = self.chain_strengths(b, params)?;
        Ok(normalize(sa.into_iter().zip(sb).map(|(x, y)| x + y).collect()))
    }

    /// Probability of mutating at each edge column of `individual`.
    pub fn mutation_locus_probs(
        &self,
        individual: &Chromosome,
        params: &StrengthParams<T>,
    ) -> Result<Vec<T>, RggrError> {
        Ok(normalize(self.chain_strengths(individual, params)?))
    }

    /// The `k` heaviest edges of every column, ties broken by `(from, to)`.
    pub fn top_k_weights(&self, k: usize) -> Vec<Vec<WeightedEdge<T>>> {
        self.weights
            .iter()
            .map(|m| {
                let mut edges: Vec<_> = m
                    .indexed_iter()
                    .map(|((from, to), &weight)| WeightedEdge { from, to, weight })
                    .collect();
                // Stable sort keeps row-major order, i.e. lexicographic (from, to), among ties.
                edges.sort_by(|x, y| y.weight.partial_cmp(&x.weight).expect("weights are finite"));
                edges.truncate(k);
                edges
            })
            .collect()
    }

    /// Chain read off the heaviest edge of each column: locus 0 takes the
    /// source of column 0's top edge, locus `k + 1` the target of column
    /// `k`'s top edge.
    pub fn rank1_chain(&self) -> Chromosome {
        let top = self.top_k_weights(1);
        let mut genes = Vec::with_capacity(self.space.num_loci());
        genes.push(top[0][0].from);
        genes.extend(top.iter().map(|col| col[0].to));
        Chromosome::new(genes)
    }
}

fn normalize<T: Real>(mut values: Vec<T>) -> Vec<T> {
    let total = values.iter().fold(T::zero(), |acc, &v| acc + v);
    for v in &mut values {
        *v = *v / total;
    }
    values
}

/// Draws an index with probability proportional to `probs[k]` by inverting
/// the cumulative distribution.
pub fn sample_locus<T: Real, R: Rng + ?Sized>(probs: &[T], rng: &mut R) -> Result<usize, RggrError> {
    if probs.iter().any(|p| !(p.is_finite() && *p >= T::zero())) {
        return Err(RggrError::DegenerateDistribution);
    }
    let total: f64 = probs.iter().map(|p| p.as_f64()).sum();
    if total <= 0.0 || !total.is_finite() {
        return Err(RggrError::DegenerateDistribution);
    }
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (k, p) in probs.iter().enumerate() {
        let p = p.as_f64();
        if p > 0.0 {
            acc += p;
            last_positive = k;
            if u < acc {
                return Ok(k);
            }
        }
    }
    // Rounding can leave u just above the final cumulative sum.
    Ok(last_positive)
}
