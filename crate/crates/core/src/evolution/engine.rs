use std::io;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::operators::{crossover, grow, mutate};
use super::selection::{rank_order, ranked_indices, tournament_select};
use super::{EAParams, ParamsError};
use crate::bt::BehaviourTree;
use crate::evaluation::{fitness, mean, EvaluatedIndividual, RunRecord};
use crate::rng::{self, Purpose};
use crate::sim::{run_episode, spawn, Outcome, Pose, World};

#[derive(Debug, Error, PartialEq)]
#[error("evaluation failed: {0}")]
pub struct EvalError(pub String);

#[derive(Debug, Error)]
pub enum EvolutionError {
    #[error(transparent)]
    Params(#[from] ParamsError),
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("writing generation output: {0}")]
    Io(#[from] io::Error),
}

/// Scores one flight of a tree and draws start poses.
pub trait Evaluator: Sync {
    fn evaluate_run(&self, tree: &BehaviourTree, init: Pose) -> Result<RunRecord, EvalError>;

    fn spawn(&self, rng: &mut ChaCha8Rng) -> Pose;
}

/// Evaluates trees by flying them in the simulator.
#[derive(Clone, Debug, Default)]
pub struct SimEvaluator {
    pub world: World,
}

impl Evaluator for SimEvaluator {
    fn evaluate_run(&self, tree: &BehaviourTree, init: Pose) -> Result<RunRecord, EvalError> {
        let r = run_episode(tree, init, &self.world);
        let f = fitness(&r);
        if !f.is_finite() {
            return Err(EvalError(format!("non-finite fitness from start {init:?}")));
        }
        Ok(RunRecord {
            fitness: f,
            outcome: r.outcome,
        })
    }

    fn spawn(&self, rng: &mut ChaCha8Rng) -> Pose {
        spawn(rng, &self.world.room, &self.world.sim)
    }
}

/// The start poses every individual of a generation is flown from, with the
/// number of generations each has been kept.
#[derive(Clone, Debug, PartialEq)]
pub struct InitSet {
    pub poses: Vec<Pose>,
    pub ages: Vec<u32>,
}

impl InitSet {
    fn fresh_pose(seed: u64, generation: u64, slot: usize, evaluator: &impl Evaluator) -> Pose {
        evaluator.spawn(&mut rng::stream(seed, Purpose::InitialCondition, generation, slot as u64))
    }

    pub fn fresh(k: usize, seed: u64, generation: u64, evaluator: &impl Evaluator) -> InitSet {
        InitSet {
            poses: (0..k).map(|i| Self::fresh_pose(seed, generation, i, evaluator)).collect(),
            ages: vec![0; k],
        }
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }
}

/// Summary row of one generation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    #[serde(rename = "gen")]
    pub generation: usize,
    #[serde(rename = "best_f")]
    pub best_fitness: f64,
    #[serde(rename = "mean_f")]
    pub mean_fitness: f64,
    pub best_size: usize,
    pub mean_size: f64,
}

/// An evaluated population together with the start poses it was scored on.
#[derive(Clone, Debug, PartialEq)]
pub struct Generation {
    pub index: usize,
    pub population: Vec<EvaluatedIndividual>,
    pub inits: InitSet,
}

impl Generation {
    /// Slot of the top-ranked individual.
    pub fn best_slot(&self) -> usize {
        ranked_indices(&self.population)[0]
    }

    pub fn stats(&self) -> GenerationStats {
        let best = &self.population[self.best_slot()];
        GenerationStats {
            generation: self.index,
            best_fitness: best.fitness,
            mean_fitness: mean(self.population.iter().map(|i| i.fitness)),
            best_size: best.size,
            mean_size: mean(self.population.iter().map(|i| i.size as f64)),
        }
    }
}

/// Scores every tree on every init it lacks a result for. `known[i][k]`
/// holds a reusable result for tree `i` on init `k`.
fn evaluate_all(
    trees: Vec<BehaviourTree>,
    known: Vec<Vec<Option<RunRecord>>>,
    inits: &InitSet,
    evaluator: &impl Evaluator,
) -> Result<Vec<EvaluatedIndividual>, EvalError> {
    let jobs: Vec<(usize, usize)> = known
        .iter()
        .enumerate()
        .flat_map(|(i, runs)| runs.iter().enumerate().filter(|(_, r)| r.is_none()).map(move |(k, _)| (i, k)))
        .collect();
    let results = jobs
        .par_iter()
        .map(|&(i, k)| evaluator.evaluate_run(&trees[i], inits.poses[k]))
        .collect::<Result<Vec<_>, _>>()?;
    let mut known = known;
    for (&(i, k), r) in jobs.iter().zip(results) {
        known[i][k] = Some(r);
    }
    Ok(trees
        .into_iter()
        .zip(known)
        .map(|(tree, runs)| EvaluatedIndividual::from_runs(tree, runs.into_iter().map(Option::unwrap).collect()))
        .collect())
}

/// Generation 0: grown trees on fresh start poses.
pub fn initial_generation(params: &EAParams, evaluator: &impl Evaluator) -> Result<Generation, EvolutionError> {
    params.validate()?;
    let trees: Vec<BehaviourTree> = (0..params.population_size)
        .map(|slot| grow(params, &mut rng::stream(params.seed, Purpose::Genome, 0, slot as u64)))
        .collect();
    let inits = InitSet::fresh(params.runs_per_individual, params.seed, 0, evaluator);
    let known = vec![vec![None; inits.len()]; trees.len()];
    let population = evaluate_all(trees, known, &inits, evaluator)?;
    Ok(Generation {
        index: 0,
        population,
        inits,
    })
}

/// Breeds and evaluates the generation after `prev`.
///
/// The top `ceil(P_e·M)` individuals are copied unchanged. Crossover pairs
/// of tournament winners fill `round(P_c·(M − elites))` slots (rounded down
/// to even); the remaining slots get tournament copies. Every non-elite is
/// then mutated. A start pose is replaced when every elite flew through the
/// window from it; elites keep their scores on the poses that stay.
pub fn next_generation(
    prev: &Generation,
    params: &EAParams,
    evaluator: &impl Evaluator,
) -> Result<Generation, EvolutionError> {
    params.validate()?;
    let g = prev.index as u64 + 1;
    let pop = &prev.population;
    let m = params.population_size;
    let ranked = ranked_indices(pop);
    let n_elite = params.elite_count();
    let elites = &ranked[..n_elite];

    let mut inits = prev.inits.clone();
    let mut replaced = vec![false; inits.len()];
    for k in 0..inits.len() {
        if elites.iter().all(|&e| pop[e].per_run[k].outcome == Outcome::Success) {
            inits.poses[k] = InitSet::fresh_pose(params.seed, g, k, evaluator);
            inits.ages[k] = 0;
            replaced[k] = true;
        } else {
            inits.ages[k] += 1;
        }
    }

    let t_size = params.tournament_size();
    let n_cross = params.crossover_slots();
    let mut trees: Vec<BehaviourTree> = elites.iter().map(|&e| pop[e].tree.clone()).collect();
    let mut known: Vec<Vec<Option<RunRecord>>> = elites
        .iter()
        .map(|&e| {
            pop[e]
                .per_run
                .iter()
                .zip(&replaced)
                .map(|(r, &fresh)| (!fresh).then_some(*r))
                .collect()
        })
        .collect();
    let mut slot = n_elite;
    while slot < n_elite + n_cross {
        let mut r = rng::stream(params.seed, Purpose::Genome, g, slot as u64);
        let a = tournament_select(pop, t_size, &mut r);
        let b = tournament_select(pop, t_size, &mut r);
        let (ca, cb) = crossover(&pop[a].tree, &pop[b].tree, params, &mut r);
        trees.push(mutate(&ca, params, &mut r));
        trees.push(mutate(&cb, params, &mut r));
        slot += 2;
    }
    while slot < m {
        let mut r = rng::stream(params.seed, Purpose::Genome, g, slot as u64);
        let a = tournament_select(pop, t_size, &mut r);
        trees.push(mutate(&pop[a].tree, params, &mut r));
        slot += 1;
    }
    known.resize(m, vec![None; inits.len()]);

    let population = evaluate_all(trees, known, &inits, evaluator)?;
    Ok(Generation {
        index: prev.index + 1,
        population,
        inits,
    })
}

#[derive(Clone, Debug)]
pub struct EvolutionResult {
    pub stats: Vec<GenerationStats>,
    /// Best individual over all generations (fitness, then size; earliest wins ties).
    pub best: EvaluatedIndividual,
    pub best_generation: usize,
    pub last: Generation,
}

/// Runs `params.max_generations` generations, calling `on_generation` after
/// each one is evaluated (generation 0 included).
pub fn run_evolution<E, F>(params: &EAParams, evaluator: &E, mut on_generation: F) -> Result<EvolutionResult, EvolutionError>
where
    E: Evaluator,
    F: FnMut(&Generation, &GenerationStats) -> io::Result<()>,
{
    let mut current = initial_generation(params, evaluator)?;
    let mut stats = Vec::with_capacity(params.max_generations);
    let mut best: Option<(EvaluatedIndividual, usize)> = None;
    loop {
        let s = current.stats();
        on_generation(&current, &s)?;
        stats.push(s);
        let top = &current.population[current.best_slot()];
        if best.as_ref().map_or(true, |(b, _)| rank_order(top, b).is_lt()) {
            best = Some((top.clone(), current.index));
        }
        if current.index + 1 >= params.max_generations {
            break;
        }
        current = next_generation(&current, params, evaluator)?;
    }
    let (best, best_generation) = best.expect("at least one generation");
    Ok(EvolutionResult {
        stats,
        best,
        best_generation,
        last: current,
    })
}
