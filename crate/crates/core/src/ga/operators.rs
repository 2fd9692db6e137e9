use rand::seq::index;
use rand::Rng;

use super::{GaError, Selection};
use crate::rggr::{Chromosome, GeneSpace};
use crate::Real;

/// Exchanges the tails after gene `cut`: children are `a[..=cut] ++ b[cut+1..]`
/// and `b[..=cut] ++ a[cut+1..]`.
pub fn single_point_crossover(a: &Chromosome, b: &Chromosome, cut: usize) -> Result<(Chromosome, Chromosome), GaError> {
    if a.len() != b.len() {
        return Err(GaError::Operator(format!(
            "parents differ in length ({} vs {})",
            a.len(),
            b.len()
        )));
    }
    if cut + 1 >= a.len() {
        return Err(GaError::Operator(format!(
            "cut {cut} out of range for {} loci",
            a.len()
        )));
    }
    let (a, b) = (a.genes(), b.genes());
    let mut x = a[..=cut].to_vec();
    x.extend_from_slice(&b[cut + 1..]);
    let mut y = b[..=cut].to_vec();
    y.extend_from_slice(&a[cut + 1..]);
    Ok((Chromosome::new(x), Chromosome::new(y)))
}

/// Replaces gene `locus` by a uniformly drawn different allele. A locus
/// with a single allele is left unchanged.
pub fn mutate_gene<R: Rng + ?Sized>(
    individual: &Chromosome,
    locus: usize,
    rng: &mut R,
    space: &GeneSpace,
) -> Result<Chromosome, GaError> {
    if locus >= individual.len() || locus >= space.num_loci() {
        return Err(GaError::Operator(format!("locus {locus} out of range")));
    }
    let mut out = individual.clone();
    let n = space.alphabet_size(locus);
    if n > 1 {
        let current = out.genes()[locus];
        let r = rng.random_range(0..n - 1);
        out.genes_mut()[locus] = if r >= current { r + 1 } else { r };
    }
    Ok(out)
}

/// Mutation drawn at edge column `edge_index`, rewriting the downstream gene.
pub fn mutate_at<R: Rng + ?Sized>(
    individual: &Chromosome,
    edge_index: usize,
    rng: &mut R,
    space: &GeneSpace,
) -> Result<Chromosome, GaError> {
    if edge_index + 1 >= space.num_loci() {
        return Err(GaError::Operator(format!(
            "edge index {edge_index} out of range for {} loci",
            space.num_loci()
        )));
    }
    mutate_gene(individual, edge_index + 1, rng, space)
}

/// Index of one parent. `fitnesses` must be non-empty.
pub fn select_index<T: Real, R: Rng + ?Sized>(fitnesses: &[T], selection: Selection, rng: &mut R) -> usize {
    let n = fitnesses.len();
    match selection {
        Selection::Tournament { size } => {
            let draws = index::sample(rng, n, size.min(n));
            let mut best = draws.index(0);
            for i in draws.iter().skip(1) {
                if fitnesses[i] > fitnesses[best] {
                    best = i;
                }
            }
            best
        }
        Selection::RouletteWheel => {
            let masses = roulette_masses(fitnesses);
            let total: f64 = masses.iter().sum();
            let u = rng.random::<f64>() * total;
            let mut acc = 0.0;
            for (i, m) in masses.iter().enumerate() {
                acc += m;
                if u < acc {
                    return i;
                }
            }
            n - 1
        }
    }
}

/// Roulette masses: `f - min + floor`, where the floor is 1% of the fitness
/// range (or 1 when all fitnesses coincide).
pub fn roulette_masses<T: Real>(fitnesses: &[T]) -> Vec<f64> {
    let (lo, hi) = fitnesses
        .iter()
        .map(|f| f.as_f64())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), f| (lo.min(f), hi.max(f)));
    let floor = if hi > lo { 0.01 * (hi - lo) } else { 1.0 };
    fitnesses.iter().map(|f| f.as_f64() - lo + floor).collect()
}

pub fn select_parents<'a, T: Real, R: Rng + ?Sized>(
    population: &'a [Chromosome],
    fitnesses: &[T],
    selection: Selection,
    rng: &mut R,
) -> (&'a Chromosome, &'a Chromosome) {
    let i = select_index(fitnesses, selection, rng);
    let j = select_index(fitnesses, selection, rng);
    (&population[i], &population[j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(g: &[usize]) -> Chromosome {
        Chromosome::new(g.to_vec())
    }

    #[test]
    fn crossover_splices_tails() {
        let (x, y) = single_point_crossover(&c(&[2, 1, 3, 4, 7]), &c(&[5, 5, 5, 5, 5]), 1).unwrap();
        assert_eq!(x, c(&[2, 1, 5, 5, 5]));
        assert_eq!(y, c(&[5, 5, 3, 4, 7]));

        let (x, y) = single_point_crossover(&c(&[0, 1]), &c(&[2, 3]), 0).unwrap();
        assert_eq!((x, y), (c(&[0, 3]), c(&[2, 1])));

        let a = c(&[4, 2, 9]);
        for cut in 0..2 {
            assert_eq!(single_point_crossover(&a, &a, cut).unwrap(), (a.clone(), a.clone()));
        }
        assert!(single_point_crossover(&a, &a, 2).is_err());
        assert!(single_point_crossover(&a, &c(&[1, 2]), 0).is_err());
    }

    #[test]
    fn mutation_changes_only_target() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let space = GeneSpace::uniform(3, 2).unwrap();
        for _ in 0..20 {
            assert_eq!(mutate_at(&c(&[0, 0, 0]), 0, &mut rng, &space).unwrap(), c(&[0, 1, 0]));
        }
        let single = GeneSpace::new(vec![3, 1, 3]).unwrap();
        assert_eq!(mutate_at(&c(&[2, 0, 1]), 0, &mut rng, &single).unwrap(), c(&[2, 0, 1]));
        assert!(mutate_at(&c(&[0, 0, 0]), 2, &mut rng, &space).is_err());
        assert_eq!(mutate_gene(&c(&[0, 0, 0]), 0, &mut rng, &space).unwrap(), c(&[1, 0, 0]));
    }

    #[test]
    fn mutation_is_uniform_over_other_alleles() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let space = GeneSpace::new(vec![2, 5]).unwrap();
        let start = c(&[1, 2]);
        let mut counts = [0usize; 5];
        let n = 10_000;
        for _ in 0..n {
            counts[mutate_at(&start, 0, &mut rng, &space).unwrap().genes()[1]] += 1;
        }
        assert_eq!(counts[2], 0);
        for (allele, &k) in counts.iter().enumerate().filter(|(a, _)| *a != 2) {
            let f = k as f64 / n as f64;
            assert!((f - 0.25).abs() <= 0.02, "allele {allele}: {f}");
        }
    }

    #[test]
    fn selection_edge_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let pop = [c(&[0, 0])];
        let (a, b) = select_parents(&pop, &[3.0f64], Selection::Tournament { size: 2 }, &mut rng);
        assert_eq!((a, b), (&pop[0], &pop[0]));
        let (a, _) = select_parents(&pop, &[3.0f64], Selection::RouletteWheel, &mut rng);
        assert_eq!(a, &pop[0]);

        let fit = [0.5f64, 9.0, -1.0, 4.0, 8.9];
        for _ in 0..200 {
            assert_eq!(select_index(&fit, Selection::Tournament { size: 5 }, &mut rng), 1);
        }
    }

    #[test]
    fn roulette_frequencies_track_masses() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let fit = [1.0f64, 3.0];
        let masses = roulette_masses(&fit);
        let share = masses[1] / (masses[0] + masses[1]);
        let n = 100_000;
        let hits = (0..n)
            .filter(|_| select_index(&fit, Selection::RouletteWheel, &mut rng) == 1)
            .count();
        assert!((hits as f64 / n as f64 - share).abs() <= 0.02);

        let fit = [2.0f64, 2.0, 2.0, 2.0];
        let mut counts = [0usize; 4];
        for _ in 0..40_000 {
            counts[select_index(&fit, Selection::RouletteWheel, &mut rng)] += 1;
        }
        assert!(counts.iter().all(|&k| (k as f64 / 40_000.0 - 0.25).abs() < 0.02));
    }
}
