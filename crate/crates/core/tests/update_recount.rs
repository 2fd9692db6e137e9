use std::collections::HashMap;

use grga::{Chromosome, GeneSpace, Rggr64, UpdateParams64};
use proptest::prelude::*;

/// Replays each edge on its own, in population order, with scalar code.
fn recount(sizes: &[usize], pop: &[Vec<usize>], fit: &[f64]) -> HashMap<(usize, usize, usize), (f64, u32)> {
    let avg = fit.iter().sum::<f64>() / fit.len() as f64;
    let rho = (0.1 * avg.abs()).max(1e-6);
    let mut edges = HashMap::new();
    for k in 0..sizes.len() - 1 {
        for i in 0..sizes[k] {
            for j in 0..sizes[k + 1] {
                let damp = if k == 0 { 0.5 } else { 1.0 };
                let mut w = 1.0;
                let mut n = 0;
                for (genes, f) in pop.iter().zip(fit) {
                    if genes[k] != i || genes[k + 1] != j {
                        continue;
                    }
                    n += 1;
                    let d = f - avg;
                    w = match (d >= 0.0, w == 0.0) {
                        (true, false) => w + damp * d / (d + rho),
                        (true, true) => damp * 0.8 * d,
                        (false, false) => f64::max(w - damp * -d / (-d + rho), 0.0),
                        (false, true) => 0.0,
                    };
                }
                edges.insert((k, i, j), (w, n));
            }
        }
    }
    edges
}

fn population() -> impl Strategy<Value = (Vec<usize>, Vec<Vec<usize>>, Vec<f64>)> {
    prop::collection::vec(1usize..4, 2..5)
        .prop_flat_map(|sizes| {
            let genes: Vec<_> = sizes.iter().map(|&n| 0..n).collect();
            (Just(sizes), prop::collection::vec((genes, -50.0..50.0f64), 0..25))
        })
        .prop_map(|(sizes, members)| {
            let (pop, fit) = members.into_iter().unzip();
            (sizes, pop, fit)
        })
}

proptest! {
    #[test]
    fn update_matches_per_edge_recount((sizes, pop, fit) in population()) {
        let mut g = Rggr64::new(GeneSpace::new(sizes.clone()).unwrap());
        let chromosomes: Vec<Chromosome> = pop.iter().cloned().map(Chromosome::new).collect();
        let avg = if fit.is_empty() { 0.0 } else { fit.iter().sum::<f64>() / fit.len() as f64 };
        let tally = g.update_from_population(&chromosomes, &fit, avg, &UpdateParams64::default()).unwrap();
        if pop.is_empty() {
            prop_assert_eq!(&g, &Rggr64::new(GeneSpace::new(sizes.clone()).unwrap()));
        } else {
            for ((k, i, j), (w, n)) in recount(&sizes, &pop, &fit) {
                prop_assert!((g.weight(k, i, j) - w).abs() <= 1e-9 * w.max(1.0), "edge ({},{},{})", k, i, j);
                prop_assert_eq!(tally.edge_updates[k][[i, j]], n);
            }
            prop_assert_eq!(tally.strengthened + tally.weakened, pop.len());
        }
    }
}

#[test]
fn fig3_shared_edge_is_updated_twice() {
    // Both sharers sit above the mean by the same delta.
    let mut g = Rggr64::new(GeneSpace::uniform(3, 2).unwrap());
    let pop = [
        Chromosome::new(vec![0, 1, 1]),
        Chromosome::new(vec![1, 1, 1]),
        Chromosome::new(vec![0, 0, 0]),
    ];
    let fit = [4.0, 4.0, 1.0];
    g.update_from_population(&pop, &fit, 3.0, &UpdateParams64::default())
        .unwrap();
    let step = 1.0 / (1.0 + 0.3);
    assert!((g.weight(1, 1, 1) - (1.0 + 2.0 * step)).abs() < 1e-12);
    assert!((g.weight(0, 0, 1) - (1.0 + 0.5 * step)).abs() < 1e-12);
}
