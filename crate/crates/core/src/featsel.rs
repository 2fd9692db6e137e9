//! Wrapper feature selection: a binary chromosome picks a feature subset,
//! scored by cross-validated 1-nearest-neighbour accuracy minus a per-feature
//! penalty.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::Mutex;

use ndarray::{Array2, Axis};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::ga::{FitnessError, FitnessFunction};
use crate::rggr::{Chromosome, GeneSpace};
use crate::Real;

pub const DEFAULT_PENALTY: f64 = 0.001;
pub const DEFAULT_FOLDS: usize = 5;
pub const DEFAULT_FOLD_SEED: u64 = 0x5eed;

#[derive(Debug, Error)]
pub enum FeatSelError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("malformed CSV: {0}")]
    Csv(#[from] csv::Error),
    #[error("label column `{0}` not found in header")]
    MissingLabelColumn(String),
    #[error("non-numeric value {value:?} in column `{column}` at data row {row}")]
    NonNumeric { row: usize, column: String, value: String },
    #[error("labels contain a single class")]
    SingleClass,
    #[error("invalid dataset: {0}")]
    InvalidDataset(String),
    #[error("invalid fitness configuration: {0}")]
    InvalidConfig(String),
}

/// Standardized feature matrix with integer class labels.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub feature_names: Vec<String>,
    pub class_names: Vec<String>,
}

impl Dataset {
    /// Validates shapes and standardizes every column to zero mean and unit
    /// variance; constant columns become zeros.
    pub fn new(
        mut features: Array2<f64>,
        labels: Vec<usize>,
        feature_names: Vec<String>,
        class_names: Vec<String>,
    ) -> Result<Self, FeatSelError> {
        let (rows, cols) = features.dim();
        if rows != labels.len() {
            return Err(FeatSelError::InvalidDataset(format!(
                "{rows} feature rows but {} labels",
                labels.len()
            )));
        }
        if rows < 2 {
            return Err(FeatSelError::InvalidDataset("need at least 2 samples".into()));
        }
        if cols == 0 || feature_names.len() != cols {
            return Err(FeatSelError::InvalidDataset("need at least 1 named feature".into()));
        }
        if labels.iter().any(|&l| l >= class_names.len()) {
            return Err(FeatSelError::InvalidDataset("label outside class list".into()));
        }
        let mut seen = vec![false; class_names.len()];
        labels.iter().for_each(|&l| seen[l] = true);
        if seen.iter().filter(|s| **s).count() < 2 {
            return Err(FeatSelError::SingleClass);
        }
        for mut col in features.axis_iter_mut(Axis(1)) {
            let n = col.len() as f64;
            let mean = col.sum() / n;
            let var = col.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
            let sd = var.sqrt();
            if sd > 0.0 {
                col.mapv_inplace(|v| (v - mean) / sd);
            } else {
                col.fill(0.0);
            }
        }
        Ok(Self {
            features,
            labels,
            feature_names,
            class_names,
        })
    }

    pub fn num_samples(&self) -> usize {
        self.labels.len()
    }

    pub fn num_features(&self) -> usize {
        self.features.ncols()
    }

    /// One binary locus per feature.
    pub fn gene_space(&self) -> Result<GeneSpace, FeatSelError> {
        GeneSpace::uniform(self.num_features(), 2)
            .map_err(|_| FeatSelError::InvalidDataset("feature selection needs at least 2 features".into()))
    }
}

/// Reads a headed CSV; every column except `label_column` must be numeric.
/// Labels are arbitrary strings, numbered in order of first appearance.
pub fn load_dataset(path: impl AsRef<Path>, label_column: &str) -> Result<Dataset, FeatSelError> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| FeatSelError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
    let label_idx = header
        .iter()
        .position(|h| h == label_column)
        .ok_or_else(|| FeatSelError::MissingLabelColumn(label_column.to_string()))?;
    let feature_names: Vec<String> = header
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != label_idx)
        .map(|(_, h)| h.clone())
        .collect();

    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut class_ids: HashMap<String, usize> = HashMap::new();
    let mut class_names = Vec::new();
    for (row, record) in reader.records().enumerate() {
        let record = record?;
        for (i, field) in record.iter().enumerate() {
            if i == label_idx {
                let next = class_ids.len();
                let id = *class_ids.entry(field.to_string()).or_insert_with(|| {
                    class_names.push(field.to_string());
                    next
                });
                labels.push(id);
            } else {
                let v: f64 =
                    field
                        .parse()
                        .ok()
                        .filter(|v: &f64| v.is_finite())
                        .ok_or_else(|| FeatSelError::NonNumeric {
                            row: row + 1,
                            column: header[i].clone(),
                            value: field.to_string(),
                        })?;
                values.push(v);
            }
        }
    }
    let features = Array2::from_shape_vec((labels.len(), feature_names.len()), values)
        .map_err(|e| FeatSelError::InvalidDataset(e.to_string()))?;
    Dataset::new(features, labels, feature_names, class_names)
}

/// Cross-validated 1-NN accuracy of a feature mask, minus `penalty` per
/// selected feature. Scores are memoized per mask.
#[derive(Debug)]
pub struct FeatSelFitness {
    dataset: Dataset,
    penalty: f64,
    folds: usize,
    fold_of: Vec<usize>,
    majority_rate: f64,
    /// Feature-major copy of the standardized matrix.
    columns: Vec<Vec<f64>>,
    cache: Mutex<HashMap<Vec<usize>, f64>>,
}

impl FeatSelFitness {
    pub fn new(dataset: Dataset, penalty: f64, folds: usize) -> Result<Self, FeatSelError> {
        Self::with_fold_seed(dataset, penalty, folds, DEFAULT_FOLD_SEED)
    }

    pub fn with_fold_seed(dataset: Dataset, penalty: f64, folds: usize, seed: u64) -> Result<Self, FeatSelError> {
        if !(penalty >= 0.0 && penalty * (dataset.num_features() as f64) < 1.0) {
            return Err(FeatSelError::InvalidConfig(
                "penalty must be non-negative with penalty * features < 1".into(),
            ));
        }
        if folds < 2 || folds > dataset.num_samples() {
            return Err(FeatSelError::InvalidConfig(format!(
                "folds must lie in [2, {}]",
                dataset.num_samples()
            )));
        }
        let fold_of = stratified_folds(&dataset.labels, dataset.class_names.len(), folds, seed);
        let mut counts = vec![0usize; dataset.class_names.len()];
        dataset.labels.iter().for_each(|&l| counts[l] += 1);
        let majority_rate = *counts.iter().max().expect("non-empty") as f64 / dataset.num_samples() as f64;
        let columns = dataset.features.columns().into_iter().map(|c| c.to_vec()).collect();
        Ok(Self {
            dataset,
            penalty,
            folds,
            fold_of,
            majority_rate,
            columns,
            cache: Mutex::default(),
        })
    }

    pub fn dataset(&self) -> &Dataset {
        &self.dataset
    }

    pub fn penalty(&self) -> f64 {
        self.penalty
    }

    pub fn folds(&self) -> usize {
        self.folds
    }

    /// Fold index of every sample.
    pub fn fold_assignment(&self) -> &[usize] {
        &self.fold_of
    }

    /// Cross-validated accuracy using the features in `selected`. An empty
    /// selection scores the majority-class rate.
    pub fn accuracy(&self, selected: &[usize]) -> f64 {
        if selected.is_empty() {
            return self.majority_rate;
        }
        let n = self.dataset.num_samples();
        let mut dist = vec![0.0; n];
        let correct = (0..n)
            .filter(|&i| {
                dist.fill(0.0);
                for &f in selected {
                    let col = &self.columns[f];
                    let xi = col[i];
                    for (d, xj) in dist.iter_mut().zip(col) {
                        let t = xi - xj;
                        *d += t * t;
                    }
                }
                let mut best: Option<(f64, usize)> = None;
                for (j, &d) in dist.iter().enumerate() {
                    if self.fold_of[j] != self.fold_of[i] && best.is_none_or(|(bd, _)| d < bd) {
                        best = Some((d, j));
                    }
                }
                best.is_some_and(|(_, j)| self.dataset.labels[j] == self.dataset.labels[i])
            })
            .count();
        correct as f64 / n as f64
    }

    /// Fitness of a mask of length `num_features`.
    pub fn score(&self, mask: &[usize]) -> Result<f64, FeatSelError> {
        if mask.len() != self.dataset.num_features() || mask.iter().any(|&g| g > 1) {
            return Err(FeatSelError::InvalidConfig(format!(
                "mask must be {} binary genes",
                self.dataset.num_features()
            )));
        }
        if let Some(&hit) = self.cache.lock().expect("cache lock").get(mask) {
            return Ok(hit);
        }
        let selected = selected_features(mask);
        let value = self.accuracy(&selected) - self.penalty * selected.len() as f64;
        self.cache.lock().expect("cache lock").insert(mask.to_vec(), value);
        Ok(value)
    }
}

pub fn selected_features(mask: &[usize]) -> Vec<usize> {
    mask.iter()
        .enumerate()
        .filter(|(_, g)| **g == 1)
        .map(|(i, _)| i)
        .collect()
}

/// Deals each class's shuffled samples round-robin over the folds, carrying
/// the position over between classes so fold sizes stay balanced.
fn stratified_folds(labels: &[usize], classes: usize, folds: usize, seed: u64) -> Vec<usize> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; labels.len()];
    let mut next = 0;
    for class in 0..classes {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == class).collect();
        members.shuffle(&mut rng);
        for i in members {
            fold_of[i] = next % folds;
            next += 1;
        }
    }
    fold_of
}

impl<T: Real> FitnessFunction<T> for FeatSelFitness {
    fn evaluate(&self, chromosome: &Chromosome) -> Result<T, FitnessError> {
        self.score(chromosome.genes())
            .map(T::lit)
            .map_err(|e| FitnessError(e.to_string()))
    }
}
