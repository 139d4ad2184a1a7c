//! Fitness of a flight and the validation protocol.

use std::io::Write;

use rayon::prelude::*;

use crate::bt::BehaviourTree;
use crate::rng::{self, Purpose};
use crate::sim::{run_episode, spawn, EpisodeResult, Outcome, Pose, World};

/// Gain on the miss distance for flights that do not pass the window.
pub const MISS_GAIN: f64 = 3.0;

/// 1 for a fly-through, otherwise `1 / (1 + 3|e|)` with `|e|` in metres.
pub fn fitness_of(outcome: Outcome, error_norm: f64) -> f64 {
    match outcome {
        Outcome::Success => 1.0,
        _ => 1.0 / (1.0 + MISS_GAIN * error_norm),
    }
}

pub fn fitness(result: &EpisodeResult) -> f64 {
    fitness_of(result.outcome, result.error_norm())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RunRecord {
    pub fitness: f64,
    pub outcome: Outcome,
}

/// A tree scored on the current set of initial conditions.
#[derive(Clone, Debug, PartialEq)]
pub struct EvaluatedIndividual {
    pub tree: BehaviourTree,
    /// Mean of the per-run fitnesses.
    pub fitness: f64,
    pub per_run: Vec<RunRecord>,
    pub size: usize,
}

impl EvaluatedIndividual {
    pub fn from_runs(tree: BehaviourTree, per_run: Vec<RunRecord>) -> Self {
        let fitness = mean(per_run.iter().map(|r| r.fitness));
        let size = tree.size();
        EvaluatedIndividual {
            tree,
            fitness,
            per_run,
            size,
        }
    }
}

/// Arithmetic mean in iteration order; 0 for an empty input.
pub(crate) fn mean(values: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = values.fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    if n == 0 {
        0.0
    } else {
        sum / n as f64
    }
}

/// One episode per initial condition; episodes run in parallel but results
/// keep the order of `inits`.
pub fn evaluate_individual(tree: &BehaviourTree, inits: &[Pose], world: &World) -> EvaluatedIndividual {
    let per_run = inits
        .par_iter()
        .map(|&init| {
            let r = run_episode(tree, init, world);
            RunRecord {
                fitness: fitness(&r),
                outcome: r.outcome,
            }
        })
        .collect();
    EvaluatedIndividual::from_runs(tree.clone(), per_run)
}

/// Summary of one validation flight.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ValidationRun {
    pub init: Pose,
    pub outcome: Outcome,
    pub flight_time: f64,
    pub error_norm: f64,
    pub fitness: f64,
    pub approach_angle: Option<f64>,
    pub centre_offset: Option<f64>,
}

impl From<&EpisodeResult> for ValidationRun {
    fn from(r: &EpisodeResult) -> Self {
        ValidationRun {
            init: r.init,
            outcome: r.outcome,
            flight_time: r.flight_time,
            error_norm: r.error_norm(),
            fitness: fitness(r),
            approach_angle: r.approach_angle,
            centre_offset: r.centre_offset,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub success_rate: f64,
    pub mean_flight_time: f64,
    /// Over successful runs; `None` if there were none.
    pub mean_approach_angle: Option<f64>,
    pub mean_centre_offset: Option<f64>,
    pub per_run: Vec<ValidationRun>,
    pub init_seed: u64,
}

impl ValidationReport {
    pub fn from_runs(per_run: Vec<ValidationRun>, init_seed: u64) -> Self {
        let successes: Vec<&ValidationRun> = per_run.iter().filter(|r| r.outcome == Outcome::Success).collect();
        let n = per_run.len();
        let success_rate = if n == 0 {
            0.0
        } else {
            successes.len() as f64 / n as f64
        };
        let some_mean = |vals: Vec<f64>| (!vals.is_empty()).then(|| mean(vals.into_iter()));
        ValidationReport {
            success_rate,
            mean_flight_time: mean(per_run.iter().map(|r| r.flight_time)),
            mean_approach_angle: some_mean(successes.iter().filter_map(|r| r.approach_angle).collect()),
            mean_centre_offset: some_mean(successes.iter().filter_map(|r| r.centre_offset).collect()),
            per_run,
            init_seed,
        }
    }

    pub fn successes(&self) -> usize {
        self.per_run.iter().filter(|r| r.outcome == Outcome::Success).count()
    }

    /// Human-readable summary block.
    pub fn summary(&self, tree_size: usize) -> String {
        let opt = |v: Option<f64>, digits: usize| v.map_or_else(|| "n/a".to_string(), |v| format!("{v:.digits$}"));
        format!(
            "runs:                  {}\n\
             seed:                  {}\n\
             success rate:          {:.1}%\n\
             tree size:             {}\n\
             mean flight time [s]:  {:.1}\n\
             mean approach [deg]:   {}\n\
             mean offset [m]:       {}\n",
            self.per_run.len(),
            self.init_seed,
            100.0 * self.success_rate,
            tree_size,
            self.mean_flight_time,
            opt(self.mean_approach_angle, 1),
            opt(self.mean_centre_offset, 3),
        )
    }
}

/// The `n` start poses used by [`validate`] for `seed`.
pub fn validation_inits(n: usize, seed: u64, world: &World) -> Vec<Pose> {
    let mut rng = rng::stream(seed, Purpose::Validation, 0, 0);
    (0..n).map(|_| spawn(&mut rng, &world.room, &world.sim)).collect()
}

/// Flies `tree` from `n_runs` seeded random starts and aggregates the results.
pub fn validate(tree: &BehaviourTree, n_runs: usize, seed: u64, world: &World) -> ValidationReport {
    let inits = validation_inits(n_runs, seed, world);
    let per_run = inits
        .par_iter()
        .map(|&init| ValidationRun::from(&run_episode(tree, init, world)))
        .collect();
    ValidationReport::from_runs(per_run, seed)
}

pub const VALIDATION_CSV_HEADER: [&str; 10] = [
    "init_x",
    "init_y",
    "init_heading",
    "outcome",
    "flight_time",
    "e_norm",
    "fitness",
    "approach_angle",
    "centre_offset",
    "run",
];

pub fn write_validation_csv<W: Write>(out: W, report: &ValidationReport) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(VALIDATION_CSV_HEADER)?;
    let opt = |v: Option<f64>| v.map_or_else(String::new, |v| v.to_string());
    for (i, r) in report.per_run.iter().enumerate() {
        w.write_record([
            r.init.x.to_string(),
            r.init.y.to_string(),
            r.init.heading.to_string(),
            r.outcome.to_string(),
            r.flight_time.to_string(),
            r.error_norm.to_string(),
            r.fitness.to_string(),
            opt(r.approach_angle),
            opt(r.centre_offset),
            i.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fitness_values() {
        assert_eq!(fitness_of(Outcome::Success, 2.0), 1.0);
        assert_eq!(fitness_of(Outcome::Crash, 1.0), 0.25);
        assert!((fitness_of(Outcome::Timeout, 3.0) - 0.1).abs() < 1e-12);
        assert!((fitness_of(Outcome::Crash, 0.4) - 1.0 / 2.2).abs() < 1e-12);
        assert!(fitness_of(Outcome::Crash, 0.0) == 1.0);
        assert!(fitness_of(Outcome::Crash, 1e-9) < 1.0);
    }

    #[test]
    fn mean_of_runs() {
        let runs = [1.0, 0.25, 0.1, 1.0, 1.0, 0.25]
            .iter()
            .map(|&f| RunRecord {
                fitness: f,
                outcome: if f == 1.0 { Outcome::Success } else { Outcome::Crash },
            })
            .collect();
        let ind = EvaluatedIndividual::from_runs(BehaviourTree::action(0.0), runs);
        assert!((ind.fitness - 0.6).abs() < 1e-12);
        assert_eq!(ind.size, 1);
    }

    #[test]
    fn report_aggregates_successes_only() {
        let pose = Pose {
            x: 1.0,
            y: 1.0,
            heading: 0.0,
        };
        let run = |outcome, t, angle: Option<f64>| ValidationRun {
            init: pose,
            outcome,
            flight_time: t,
            error_norm: 0.0,
            fitness: 1.0,
            approach_angle: angle,
            centre_offset: angle.map(|a| a / 100.0),
        };
        let report = ValidationReport::from_runs(
            vec![
                run(Outcome::Success, 10.0, Some(20.0)),
                run(Outcome::Crash, 30.0, None),
                run(Outcome::Success, 20.0, Some(40.0)),
                run(Outcome::Timeout, 100.0, None),
            ],
            9,
        );
        assert_eq!(report.success_rate, 0.5);
        assert_eq!(report.mean_flight_time, 40.0);
        assert_eq!(report.mean_approach_angle, Some(30.0));
        assert!((report.mean_centre_offset.unwrap() - 0.3).abs() < 1e-12);
        assert!(report.summary(8).contains("success rate:          50.0%"));
    }
}
