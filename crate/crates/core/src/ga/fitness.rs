use thiserror::Error;

use crate::rggr::Chromosome;

#[derive(Debug, Error)]
#[error("{0}")]
pub struct FitnessError(pub String);

/// Maps a chromosome to a fitness to be maximized.
///
/// Must be deterministic within a run; evaluations may run concurrently.
pub trait FitnessFunction<T>: Sync {
    fn evaluate(&self, chromosome: &Chromosome) -> Result<T, FitnessError>;
}

/// Adapts an infallible closure.
pub struct FnFitness<F>(pub F);

impl<T, F> FitnessFunction<T> for FnFitness<F>
where
    F: Fn(&Chromosome) -> T + Sync,
{
    fn evaluate(&self, chromosome: &Chromosome) -> Result<T, FitnessError> {
        Ok((self.0)(chromosome))
    }
}

impl<T, F: FitnessFunction<T> + ?Sized> FitnessFunction<T> for &F {
    fn evaluate(&self, chromosome: &Chromosome) -> Result<T, FitnessError> {
        (**self).evaluate(chromosome)
    }
}

impl<T, F: FitnessFunction<T> + ?Sized + Send> FitnessFunction<T> for Box<F> {
    fn evaluate(&self, chromosome: &Chromosome) -> Result<T, FitnessError> {
        (**self).evaluate(chromosome)
    }
}
