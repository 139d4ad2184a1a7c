//! Genetic programming over behaviour-tree genomes.
//!
//! Initial trees come from the grow method; parents are picked by a
//! size-aware tournament; offspring are produced by single-point subtree
//! crossover and per-node micro/macro mutation; the best individuals survive
//! unchanged. Start poses are kept across generations until every elite
//! individual flies through the window from them.

mod checkpoint;
mod engine;
mod operators;
mod selection;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use checkpoint::{read_archive_csv, read_checkpoint, ArchiveWriter, CheckpointRecord, CheckpointWriter};
pub use engine::{
    initial_generation, next_generation, run_evolution, EvalError, Evaluator, EvolutionError, EvolutionResult,
    Generation, GenerationStats, InitSet, SimEvaluator,
};
pub use operators::{crossover, crossover_at, grow, grow_subtree, mutate, mutate_with_stats, random_leaf, MutationStats};
pub use selection::{rank_order, ranked_indices, tournament_pick, tournament_select};

/// Parameters of the evolutionary run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EAParams {
    /// Number of generations evaluated (the initial population counts as the first).
    pub max_generations: usize,
    pub population_size: usize,
    /// Tournament size as a fraction of the population.
    pub tournament_fraction: f64,
    pub elitism_rate: f64,
    pub crossover_rate: f64,
    /// Per-node mutation probability.
    pub mutation_rate: f64,
    /// Probability that a mutating node is replaced by a fresh subtree
    /// (macro-mutation) rather than re-parameterised.
    pub hcc_rate: f64,
    pub max_depth: usize,
    pub max_children: usize,
    pub runs_per_individual: usize,
    pub seed: u64,
}

impl Default for EAParams {
    fn default() -> Self {
        EAParams {
            max_generations: 150,
            population_size: 100,
            tournament_fraction: 0.06,
            elitism_rate: 0.04,
            crossover_rate: 0.8,
            mutation_rate: 0.2,
            hcc_rate: 0.2,
            max_depth: 6,
            max_children: 6,
            runs_per_individual: 6,
            seed: 0,
        }
    }
}

#[derive(Debug, Error, PartialEq)]
#[error("invalid EA parameter: {0}")]
pub struct ParamsError(pub String);

impl EAParams {
    pub fn validate(&self) -> Result<(), ParamsError> {
        let fractions = [
            ("tournament_fraction", self.tournament_fraction),
            ("elitism_rate", self.elitism_rate),
            ("crossover_rate", self.crossover_rate),
            ("mutation_rate", self.mutation_rate),
            ("hcc_rate", self.hcc_rate),
        ];
        for (name, v) in fractions {
            if !(0.0..=1.0).contains(&v) {
                return Err(ParamsError(format!("{name} = {v} must lie in [0, 1]")));
            }
        }
        let counts = [
            ("population_size", self.population_size, 2),
            ("max_generations", self.max_generations, 1),
            ("max_depth", self.max_depth, 1),
            ("max_children", self.max_children, 1),
            ("runs_per_individual", self.runs_per_individual, 1),
        ];
        for (name, v, min) in counts {
            if v < min {
                return Err(ParamsError(format!("{name} = {v} must be at least {min}")));
            }
        }
        if self.tournament_size() > self.population_size {
            return Err(ParamsError("tournament larger than the population".into()));
        }
        if self.elite_count() >= self.population_size {
            return Err(ParamsError("elitism leaves no room for offspring".into()));
        }
        Ok(())
    }

    /// `max(2, round(s·M))`.
    pub fn tournament_size(&self) -> usize {
        ((self.tournament_fraction * self.population_size as f64).round() as usize).max(2)
    }

    /// `ceil(P_e·M)`.
    pub fn elite_count(&self) -> usize {
        // tolerate representation error such as 0.07 * 100 = 7.000000000000001
        (self.elitism_rate * self.population_size as f64 - 1e-9).ceil().max(0.0) as usize
    }

    /// Offspring slots filled by crossover pairs: `round(P_c·(M − elites))`
    /// rounded down to an even number.
    pub fn crossover_slots(&self) -> usize {
        let free = self.population_size - self.elite_count();
        let n = (self.crossover_rate * free as f64).round() as usize;
        n.min(free) & !1
    }
}
