use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::operators::{mutate_gene, select_index, single_point_crossover};
use super::{FitnessFunction, GaConfig, GaError, Mode, MutationEndpoint};
use crate::rggr::{sample_locus, Chromosome, GeneSpace, Rggr, StrengthParams, UpdateParams};
use crate::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    Stall,
    MaxGenerations,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GenerationRow<T> {
    pub generation: usize,
    pub best_fitness: T,
    pub avg_fitness: T,
}

/// Outcome of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord<T> {
    /// One row per evaluated generation, starting at 0.
    pub rows: Vec<GenerationRow<T>>,
    /// Best individual seen over the whole run.
    pub best_chromosome: Chromosome,
    pub best_fitness: T,
    /// Graph after the final update; `None` for baseline runs.
    pub rggr: Option<Rggr<T>>,
    pub termination: Termination,
}

impl<T: Real> RunRecord<T> {
    /// Index of the last generation evaluated.
    pub fn final_generation(&self) -> usize {
        self.rows.len() - 1
    }
}

/// Runs one evolution.
///
/// Each generation evaluates the population, updates the graph (GRGA mode),
/// checks termination, then breeds the next generation: elites are copied,
/// the rest come from selected pairs crossed at one locus and optionally
/// mutated at one locus. GRGA draws those loci from the graph; the baseline
/// draws them uniformly.
pub fn evolve<T, F>(
    config: &GaConfig,
    space: &GeneSpace,
    fitness: &F,
    update: &UpdateParams<T>,
    strength: &StrengthParams<T>,
) -> Result<RunRecord<T>, GaError>
where
    T: Real,
    F: FitnessFunction<T> + ?Sized,
{
    config.validate()?;
    update.validate()?;
    strength.validate()?;

    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut population: Vec<Chromosome> = (0..config.population_size)
        .map(|_| random_chromosome(space, &mut rng))
        .collect();
    let mut rggr = match config.mode {
        Mode::Grga => Some(Rggr::new(space.clone())),
        Mode::BaselineGa => None,
    };

    let mut rows: Vec<GenerationRow<T>> = Vec::with_capacity(config.max_generations + 1);
    let mut best: Option<(Chromosome, T)> = None;
    let mut generation = 0;
    loop {
        let fitnesses = evaluate(fitness, &population, generation)?;
        let avg = mean(&fitnesses);
        let best_idx = argmax(&fitnesses);
        let gen_best = fitnesses[best_idx];
        rows.push(GenerationRow {
            generation,
            best_fitness: gen_best,
            avg_fitness: avg,
        });
        if best.as_ref().is_none_or(|(_, f)| gen_best > *f) {
            best = Some((population[best_idx].clone(), gen_best));
        }

        if let Some(g) = rggr.as_mut() {
            g.update_from_population(&population, &fitnesses, avg, update)?;
        }

        let termination = if stalled(&rows, config.stall_generations) {
            Some(Termination::Stall)
        } else if generation >= config.max_generations {
            Some(Termination::MaxGenerations)
        } else {
            None
        };
        if let Some(termination) = termination {
            let (best_chromosome, best_fitness) = best.expect("at least one generation evaluated");
            return Ok(RunRecord {
                rows,
                best_chromosome,
                best_fitness,
                rggr,
                termination,
            });
        }

        population = breed(
            config,
            space,
            rggr.as_ref(),
            strength,
            &population,
            &fitnesses,
            &mut rng,
        )?;
        generation += 1;
    }
}

fn random_chromosome<R: Rng + ?Sized>(space: &GeneSpace, rng: &mut R) -> Chromosome {
    Chromosome::new(space.alphabet_sizes().iter().map(|&n| rng.random_range(0..n)).collect())
}

fn evaluate<T: Real, F: FitnessFunction<T> + ?Sized>(
    fitness: &F,
    population: &[Chromosome],
    generation: usize,
) -> Result<Vec<T>, GaError> {
    population
        .par_iter()
        .map(|c| {
            let fail = |message: String| GaError::Fitness {
                generation,
                chromosome: c.genes().to_vec(),
                message,
            };
            let f = fitness.evaluate(c).map_err(|e| fail(e.0))?;
            if f.is_finite() {
                Ok(f)
            } else {
                Err(fail(format!("non-finite fitness {f}")))
            }
        })
        .collect()
}

fn mean<T: Real>(values: &[T]) -> T {
    let sum = values.iter().fold(T::zero(), |acc, &v| acc + v);
    sum / T::from_usize(values.len()).expect("population size fits scalar")
}

fn argmax<T: Real>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// True when the last `stall + 1` best-fitness values are all equal.
fn stalled<T: Real>(rows: &[GenerationRow<T>], stall: usize) -> bool {
    if rows.len() <= stall {
        return false;
    }
    let tail = &rows[rows.len() - stall - 1..];
    tail.iter().all(|r| r.best_fitness == tail[0].best_fitness)
}

fn breed<T: Real, R: Rng + ?Sized>(
    config: &GaConfig,
    space: &GeneSpace,
    rggr: Option<&Rggr<T>>,
    strength: &StrengthParams<T>,
    population: &[Chromosome],
    fitnesses: &[T],
    rng: &mut R,
) -> Result<Vec<Chromosome>, GaError> {
    let n = config.population_size;
    let columns = space.num_edge_columns();
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| fitnesses[b].partial_cmp(&fitnesses[a]).expect("finite fitness"));

    let mut next: Vec<Chromosome> = order[..config.elitism_count]
        .iter()
        .map(|&i| population[i].clone())
        .collect();

    while next.len() < n {
        let a = &population[select_index(fitnesses, config.selection, rng)];
        let b = &population[select_index(fitnesses, config.selection, rng)];
        let (x, y) = if rng.random::<f64>() < config.crossover_rate {
            let cut = match rggr {
                Some(g) => sample_locus(&g.crossover_locus_probs(a, b, strength)?, rng)?,
                None => rng.random_range(0..columns),
            };
            single_point_crossover(a, b, cut)?
        } else {
            (a.clone(), b.clone())
        };
        for child in [x, y] {
            if next.len() == n {
                break;
            }
            let child = if rng.random::<f64>() < config.mutation_rate {
                let column = match rggr {
                    Some(g) => sample_locus(&g.mutation_locus_probs(&child, strength)?, rng)?,
                    None => rng.random_range(0..columns),
                };
                let locus = match config.mutation_endpoint {
                    MutationEndpoint::Downstream => column + 1,
                    MutationEndpoint::Upstream => column,
                };
                mutate_gene(&child, locus, rng, space)?
            } else {
                child
            };
            next.push(child);
        }
    }
    Ok(next)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ga::{FitnessError, FnFitness, Selection};

    fn onemax() -> FnFitness<impl Fn(&Chromosome) -> f64 + Sync> {
        FnFitness(|c: &Chromosome| c.genes().iter().sum::<usize>() as f64)
    }

    #[test]
    fn minimal_run_has_two_rows() {
        let config = GaConfig {
            population_size: 2,
            max_generations: 1,
            ..Default::default()
        };
        let space = GeneSpace::uniform(4, 3).unwrap();
        let rec = evolve(
            &config,
            &space,
            &onemax(),
            &UpdateParams::default(),
            &StrengthParams::default(),
        )
        .unwrap();
        assert_eq!(rec.rows.len(), 2);
        assert_eq!(rec.rows[1].generation, 1);
        assert_eq!(rec.termination, Termination::MaxGenerations);
        space.check(&rec.best_chromosome).unwrap();
        assert!(rec.rggr.is_some());
    }

    #[test]
    fn constant_fitness_stalls() {
        let config = GaConfig {
            population_size: 10,
            max_generations: 100,
            stall_generations: 4,
            ..Default::default()
        };
        let space = GeneSpace::uniform(3, 3).unwrap();
        let rec = evolve(
            &config,
            &space,
            &FnFitness(|_: &Chromosome| 1.0f64),
            &UpdateParams::default(),
            &StrengthParams::default(),
        )
        .unwrap();
        assert_eq!(rec.termination, Termination::Stall);
        assert_eq!(rec.final_generation(), 4);
    }

    #[test]
    fn baseline_builds_no_graph() {
        let config = GaConfig {
            population_size: 20,
            max_generations: 5,
            mode: Mode::BaselineGa,
            ..Default::default()
        };
        let space = GeneSpace::uniform(5, 4).unwrap();
        let rec = evolve(
            &config,
            &space,
            &onemax(),
            &UpdateParams::default(),
            &StrengthParams::default(),
        )
        .unwrap();
        assert!(rec.rggr.is_none());
    }

    #[test]
    fn elitism_keeps_best_monotone_and_seed_reproduces() {
        for mode in [Mode::Grga, Mode::BaselineGa] {
            for selection in [Selection::Tournament { size: 3 }, Selection::RouletteWheel] {
                let config = GaConfig {
                    population_size: 30,
                    max_generations: 25,
                    stall_generations: 100,
                    selection,
                    mode,
                    mutation_rate: 0.3,
                    seed: 77,
                    ..Default::default()
                };
                let space = GeneSpace::uniform(8, 5).unwrap();
                let run = || {
                    evolve(
                        &config,
                        &space,
                        &onemax(),
                        &UpdateParams::default(),
                        &StrengthParams::default(),
                    )
                    .unwrap()
                };
                let rec = run();
                assert!(rec.rows.windows(2).all(|w| w[1].best_fitness >= w[0].best_fitness));
                assert_eq!(rec, run());
            }
        }
    }

    #[test]
    fn onemax_improves() {
        let config = GaConfig {
            population_size: 60,
            max_generations: 60,
            stall_generations: 60,
            mutation_rate: 0.5,
            seed: 3,
            ..Default::default()
        };
        let space = GeneSpace::uniform(10, 4).unwrap();
        let rec = evolve(
            &config,
            &space,
            &onemax(),
            &UpdateParams::default(),
            &StrengthParams::default(),
        )
        .unwrap();
        assert!(rec.best_fitness >= 27.0, "{}", rec.best_fitness);
        assert!(rec.rows.last().unwrap().avg_fitness > rec.rows[0].avg_fitness);
    }

    #[test]
    fn upstream_endpoint_runs() {
        let config = GaConfig {
            population_size: 10,
            max_generations: 5,
            mutation_rate: 1.0,
            mutation_endpoint: MutationEndpoint::Upstream,
            ..Default::default()
        };
        let space = GeneSpace::new(vec![3, 1]).unwrap();
        evolve(
            &config,
            &space,
            &onemax(),
            &UpdateParams::default(),
            &StrengthParams::default(),
        )
        .unwrap();
    }

    struct Failing;
    impl FitnessFunction<f64> for Failing {
        fn evaluate(&self, c: &Chromosome) -> Result<f64, FitnessError> {
            if c.genes()[0] == 1 {
                Err(FitnessError("boom".into()))
            } else {
                Ok(0.0)
            }
        }
    }

    #[test]
    fn fitness_failure_carries_context() {
        let config = GaConfig {
            population_size: 50,
            ..Default::default()
        };
        let space = GeneSpace::uniform(3, 2).unwrap();
        let err = evolve(
            &config,
            &space,
            &Failing,
            &UpdateParams::default(),
            &StrengthParams::default(),
        )
        .unwrap_err();
        match err {
            GaError::Fitness {
                generation,
                chromosome,
                message,
            } => {
                assert_eq!(generation, 0);
                assert_eq!(chromosome[0], 1);
                assert_eq!(message, "boom");
            }
            other => panic!("unexpected {other:?}"),
        }
        let nan = FnFitness(|_: &Chromosome| f64::NAN);
        assert!(matches!(
            evolve(
                &config,
                &space,
                &nan,
                &UpdateParams::default(),
                &StrengthParams::default()
            ),
            Err(GaError::Fitness { .. })
        ));
    }

    #[test]
    fn single_precision_run() {
        let config = GaConfig {
            population_size: 20,
            max_generations: 5,
            ..Default::default()
        };
        let space = GeneSpace::uniform(4, 3).unwrap();
        let f = FnFitness(|c: &Chromosome| c.genes()[0] as f32);
        let rec = evolve(
            &config,
            &space,
            &f,
            &UpdateParams::<f32>::default(),
            &StrengthParams::default(),
        )
        .unwrap();
        assert!(rec.rggr.unwrap().columns()[0].iter().all(|w| *w >= 0.0));
    }
}
