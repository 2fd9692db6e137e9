//! Test functions over discretized boxes, with an exhaustive grid oracle.
//!
//! Every function here is a maximization objective once wrapped by
//! [`BoxFitness`]. [`sphere`] and [`rastrigin`] are minimization problems
//! kept for engine smoke tests; wrap them with [`negated`].

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ga::{FitnessError, FitnessFunction};
use crate::rggr::{Chromosome, GeneSpace};
use crate::Real;

/// Largest grid [`grid_oracle`] will enumerate.
pub const GRID_BUDGET: usize = 10_000_000;

/// Known maximum of the 3-D Shubert function.
pub const SHUBERT_3D_MAX: f64 = 2709.0935;

#[derive(Debug, Error)]
pub enum BenchmarkError {
    #[error("invalid box: {0}")]
    InvalidBox(String),
    #[error("bin {bin} out of range for dimension {dim} with {bins} bins")]
    BinOutOfRange { bin: usize, dim: usize, bins: usize },
    #[error("grid has {cells} cells, above the budget of {budget}")]
    BudgetExceeded { cells: usize, budget: usize },
    #[error("gene space {space:?} does not match box bins {bins:?}")]
    SpaceMismatch { space: Vec<usize>, bins: Vec<usize> },
}

/// Axis-aligned box with each dimension split into equal bins. Bin `j`
/// decodes to the left edge of its interval.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "BoxSpec<T>", into = "BoxSpec<T>")]
#[serde(bound = "T: Real")]
pub struct DiscretizedBox<T> {
    lo: Vec<T>,
    hi: Vec<T>,
    bins: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
#[serde(bound = "T: Real")]
struct BoxSpec<T> {
    lo: Vec<T>,
    hi: Vec<T>,
    bins: Vec<usize>,
}

impl<T: Real> TryFrom<BoxSpec<T>> for DiscretizedBox<T> {
    type Error = BenchmarkError;
    fn try_from(s: BoxSpec<T>) -> Result<Self, Self::Error> {
        Self::new(s.lo, s.hi, s.bins)
    }
}

impl<T: Real> From<DiscretizedBox<T>> for BoxSpec<T> {
    fn from(b: DiscretizedBox<T>) -> Self {
        Self {
            lo: b.lo,
            hi: b.hi,
            bins: b.bins,
        }
    }
}

impl<T: Real> DiscretizedBox<T> {
    pub fn new(lo: Vec<T>, hi: Vec<T>, bins: Vec<usize>) -> Result<Self, BenchmarkError> {
        if lo.is_empty() || lo.len() != hi.len() || lo.len() != bins.len() {
            return Err(BenchmarkError::InvalidBox(
                "lo, hi and bins must share a non-zero length".into(),
            ));
        }
        for d in 0..lo.len() {
            if !(lo[d].is_finite() && hi[d].is_finite() && hi[d] > lo[d]) {
                return Err(BenchmarkError::InvalidBox(format!(
                    "dimension {d} needs finite hi > lo"
                )));
            }
            if bins[d] == 0 {
                return Err(BenchmarkError::InvalidBox(format!("dimension {d} has zero bins")));
            }
        }
        Ok(Self { lo, hi, bins })
    }

    /// Same interval and bin count in every dimension.
    pub fn cube(dims: usize, lo: T, hi: T, bins: usize) -> Result<Self, BenchmarkError> {
        Self::new(vec![lo; dims], vec![hi; dims], vec![bins; dims])
    }

    /// `[-10, 10]^3` with 60 bins per axis.
    pub fn shubert_default() -> Self {
        Self::cube(3, T::lit(-10.0), T::lit(10.0), 60).expect("valid default box")
    }

    pub fn dims(&self) -> usize {
        self.bins.len()
    }

    pub fn bins(&self) -> &[usize] {
        &self.bins
    }

    pub fn lo(&self) -> &[T] {
        &self.lo
    }

    pub fn hi(&self) -> &[T] {
        &self.hi
    }

    pub fn num_cells(&self) -> Option<usize> {
        self.bins.iter().try_fold(1usize, |acc, &b| acc.checked_mul(b))
    }

    /// Gene space with one locus per dimension.
    pub fn gene_space(&self) -> Result<GeneSpace, BenchmarkError> {
        GeneSpace::new(self.bins.clone()).map_err(|e| BenchmarkError::InvalidBox(e.to_string()))
    }

    /// `(hi - lo) * bin / bins + lo`.
    pub fn decode_bin(&self, bin: usize, dim: usize) -> Result<T, BenchmarkError> {
        let bins = self.bins[dim];
        if bin >= bins {
            return Err(BenchmarkError::BinOutOfRange { bin, dim, bins });
        }
        let bin_t = T::from_usize(bin).expect("bin fits scalar");
        let bins_t = T::from_usize(bins).expect("bins fit scalar");
        Ok((self.hi[dim] - self.lo[dim]) * bin_t / bins_t + self.lo[dim])
    }

    pub fn decode(&self, bins: &[usize]) -> Result<Vec<T>, BenchmarkError> {
        if bins.len() != self.dims() {
            return Err(BenchmarkError::SpaceMismatch {
                space: bins.to_vec(),
                bins: self.bins.clone(),
            });
        }
        bins.iter().enumerate().map(|(d, &b)| self.decode_bin(b, d)).collect()
    }
}

/// `-prod_i sum_{j=1..5} j * cos((j + 1) * x_i + j)`.
pub fn shubert<T: Real>(x: &[T]) -> T {
    let prod = x.iter().fold(T::one(), |acc, &xi| {
        let inner = (1..=5).fold(T::zero(), |s, j| {
            let j = T::from_i32(j).expect("small integer");
            s + j * ((j + T::one()) * xi + j).cos()
        });
        acc * inner
    });
    -prod
}

/// Sum of squares; minimum 0 at the origin.
pub fn sphere<T: Real>(x: &[T]) -> T {
    x.iter().fold(T::zero(), |acc, &v| acc + v * v)
}

/// Rastrigin function; minimum 0 at the origin.
pub fn rastrigin<T: Real>(x: &[T]) -> T {
    let a = T::lit(10.0);
    let two_pi = T::lit(std::f64::consts::TAU);
    x.iter()
        .fold(a * T::from_usize(x.len()).expect("dimension fits scalar"), |acc, &v| {
            acc + v * v - a * (two_pi * v).cos()
        })
}

/// Turns a minimization objective into a maximization one.
pub fn negated<T: Real>(f: fn(&[T]) -> T) -> impl Fn(&[T]) -> T + Send + Sync + Copy {
    move |x| -f(x)
}

/// Fitness that decodes each gene as a bin of `bounds` and applies `f`.
#[derive(Debug, Clone)]
pub struct BoxFitness<T, F> {
    bounds: DiscretizedBox<T>,
    f: F,
}

impl<T: Real, F: Fn(&[T]) -> T + Sync> BoxFitness<T, F> {
    pub fn new(bounds: DiscretizedBox<T>, f: F) -> Self {
        Self { bounds, f }
    }

    /// Like [`BoxFitness::new`], checking that `space` has one locus per
    /// dimension with alphabet size equal to the bin count.
    pub fn for_space(bounds: DiscretizedBox<T>, f: F, space: &GeneSpace) -> Result<Self, BenchmarkError> {
        if space.alphabet_sizes() != bounds.bins() {
            return Err(BenchmarkError::SpaceMismatch {
                space: space.alphabet_sizes().to_vec(),
                bins: bounds.bins.clone(),
            });
        }
        Ok(Self::new(bounds, f))
    }

    pub fn bounds(&self) -> &DiscretizedBox<T> {
        &self.bounds
    }
}

impl<T: Real, F: Fn(&[T]) -> T + Sync> FitnessFunction<T> for BoxFitness<T, F> {
    fn evaluate(&self, chromosome: &Chromosome) -> Result<T, FitnessError> {
        let x = self
            .bounds
            .decode(chromosome.genes())
            .map_err(|e| FitnessError(e.to_string()))?;
        Ok((self.f)(&x))
    }
}

pub type ShubertFitness<T> = BoxFitness<T, fn(&[T]) -> T>;

/// Shubert fitness over `bounds`.
pub fn shubert_fitness<T: Real>(
    bounds: DiscretizedBox<T>,
    space: &GeneSpace,
) -> Result<ShubertFitness<T>, BenchmarkError> {
    BoxFitness::for_space(bounds, shubert::<T> as fn(&[T]) -> T, space)
}

/// Exhaustive evaluation of a function over every grid cell.
#[derive(Debug, Clone)]
pub struct GridOracle<T> {
    pub best_bins: Vec<usize>,
    pub best_value: T,
    sorted: Vec<T>,
}

impl<T: Real> GridOracle<T> {
    /// Nearest-rank empirical quantile: the smallest grid value with at
    /// least a fraction `q` of the grid at or below it.
    pub fn quantile(&self, q: f64) -> T {
        let n = self.sorted.len();
        let rank = (q.clamp(0.0, 1.0) * n as f64).ceil() as usize;
        self.sorted[rank.clamp(1, n) - 1]
    }

    /// Fraction of grid values strictly greater than `value`.
    pub fn fraction_above(&self, value: T) -> f64 {
        let at_or_below = self.sorted.partition_point(|v| *v <= value);
        (self.sorted.len() - at_or_below) as f64 / self.sorted.len() as f64
    }

    pub fn num_cells(&self) -> usize {
        self.sorted.len()
    }

    pub fn summary(&self, quantiles: &[f64]) -> OracleSummary<T> {
        OracleSummary {
            best_bins: self.best_bins.clone(),
            best_value: self.best_value,
            quantiles: quantiles
                .iter()
                .map(|&q| QuantilePoint {
                    q,
                    value: self.quantile(q),
                })
                .collect(),
        }
    }
}

/// JSON export of a grid oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct OracleSummary<T> {
    pub best_bins: Vec<usize>,
    pub best_value: T,
    pub quantiles: Vec<QuantilePoint<T>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct QuantilePoint<T> {
    pub q: f64,
    pub value: T,
}

/// Evaluates `f` at the decoded point of every cell. Ties for the maximum
/// go to the cell that comes first in row-major order.
pub fn grid_oracle<T, F>(bounds: &DiscretizedBox<T>, f: F) -> Result<GridOracle<T>, BenchmarkError>
where
    T: Real,
    F: Fn(&[T]) -> T + Sync,
{
    let cells = bounds
        .num_cells()
        .filter(|&c| c <= GRID_BUDGET)
        .ok_or(BenchmarkError::BudgetExceeded {
            cells: bounds.num_cells().unwrap_or(usize::MAX),
            budget: GRID_BUDGET,
        })?;
    let axes: Vec<Vec<T>> = (0..bounds.dims())
        .map(|d| (0..bounds.bins[d]).map(|b| bounds.decode_bin(b, d)).collect())
        .collect::<Result<_, _>>()?;
    let values: Vec<T> = (0..cells)
        .into_par_iter()
        .map_init(
            || vec![T::zero(); bounds.dims()],
            |x, flat| {
                let mut rest = flat;
                for d in (0..x.len()).rev() {
                    x[d] = axes[d][rest % bounds.bins[d]];
                    rest /= bounds.bins[d];
                }
                f(x)
            },
        )
        .collect();
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    let mut best_bins = vec![0; bounds.dims()];
    let mut rest = best;
    for d in (0..bounds.dims()).rev() {
        best_bins[d] = rest % bounds.bins[d];
        rest /= bounds.bins[d];
    }
    let best_value = values[best];
    let mut sorted = values;
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("grid values are comparable"));
    Ok(GridOracle {
        best_bins,
        best_value,
        sorted,
    })
}

/// Compass search for a local maximum of `f` from `start`, halving the step
/// until it drops below `tol`. Points stay inside `[lo, hi]`.
pub fn refine_local_max<F>(f: F, start: &[f64], lo: &[f64], hi: &[f64], step: f64, tol: f64) -> (Vec<f64>, f64)
where
    F: Fn(&[f64]) -> f64,
{
    let mut x = start.to_vec();
    let mut fx = f(&x);
    let mut h = step;
    while h > tol {
        let mut improved = false;
        for d in 0..x.len() {
            for dir in [1.0, -1.0] {
                let mut y = x.clone();
                y[d] = (y[d] + dir * h).clamp(lo[d], hi[d]);
                let fy = f(&y);
                if fy > fx {
                    x = y;
                    fx = fy;
                    improved = true;
                }
            }
        }
        if !improved {
            h *= 0.5;
        }
    }
    (x, fx)
}
