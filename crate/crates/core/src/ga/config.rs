use serde::{Deserialize, Serialize};

use super::GaError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Selection {
    /// Best of `size` distinct uniformly drawn individuals.
    Tournament { size: usize },
    /// Fitness-proportional after shifting the minimum to a small positive mass.
    RouletteWheel,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// Loci drawn from the relationship graph.
    Grga,
    /// Loci drawn uniformly; no graph is built.
    BaselineGa,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::Grga => "grga",
            Mode::BaselineGa => "baseline",
        }
    }
}

/// Which gene a mutation drawn at edge column `k` rewrites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MutationEndpoint {
    /// Gene `k + 1`.
    #[default]
    Downstream,
    /// Gene `k`.
    Upstream,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaConfig {
    pub population_size: usize,
    /// Probability that a child undergoes one mutation event.
    pub mutation_rate: f64,
    /// Probability that a selected pair is crossed rather than copied.
    pub crossover_rate: f64,
    pub max_generations: usize,
    /// Stop once the best fitness has been unchanged for this many generations.
    pub stall_generations: usize,
    pub elitism_count: usize,
    pub selection: Selection,
    pub seed: u64,
    pub mode: Mode,
    pub mutation_endpoint: MutationEndpoint,
}

impl Default for GaConfig {
    fn default() -> Self {
        Self {
            population_size: 200,
            mutation_rate: 0.05,
            crossover_rate: 1.0,
            max_generations: 30,
            stall_generations: 10,
            elitism_count: 1,
            selection: Selection::Tournament { size: 2 },
            seed: 0,
            mode: Mode::Grga,
            mutation_endpoint: MutationEndpoint::Downstream,
        }
    }
}

impl GaConfig {
    pub fn validate(&self) -> Result<(), GaError> {
        let fail = |what: &str| Err(GaError::InvalidConfig(what.to_string()));
        if self.population_size < 2 {
            return fail("population_size must be at least 2");
        }
        if !(0.0..=1.0).contains(&self.mutation_rate) {
            return fail("mutation_rate must lie in [0, 1]");
        }
        if !(0.0..=1.0).contains(&self.crossover_rate) {
            return fail("crossover_rate must lie in [0, 1]");
        }
        if self.max_generations < 1 {
            return fail("max_generations must be at least 1");
        }
        if self.stall_generations < 1 {
            return fail("stall_generations must be at least 1");
        }
        if self.elitism_count >= self.population_size {
            return fail("elitism_count must be below population_size");
        }
        if let Selection::Tournament { size } = self.selection {
            if size < 2 {
                return fail("tournament size must be at least 2");
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        GaConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_configs() {
        let bad = [
            GaConfig {
                population_size: 1,
                ..Default::default()
            },
            GaConfig {
                mutation_rate: 1.5,
                ..Default::default()
            },
            GaConfig {
                crossover_rate: -0.1,
                ..Default::default()
            },
            GaConfig {
                max_generations: 0,
                ..Default::default()
            },
            GaConfig {
                stall_generations: 0,
                ..Default::default()
            },
            GaConfig {
                elitism_count: 200,
                ..Default::default()
            },
            GaConfig {
                selection: Selection::Tournament { size: 1 },
                ..Default::default()
            },
        ];
        for c in bad {
            assert!(c.validate().is_err(), "{c:?}");
        }
    }

    #[test]
    fn json_defaults_fill_missing_fields() {
        let c: GaConfig = serde_json::from_str(r#"{"population_size": 50, "mode": "baseline_ga"}"#).unwrap();
        assert_eq!(c.population_size, 50);
        assert_eq!(c.mode, Mode::BaselineGa);
        assert_eq!(c.stall_generations, 10);
    }
}
