use bt_flight::bt::{BehaviourTree, NodeKind};
use bt_flight::evaluation::{EvaluatedIndividual, RunRecord};
use bt_flight::evolution::{
    crossover, crossover_at, grow, mutate_with_stats, run_evolution, tournament_pick, tournament_select, EAParams,
    EvalError, Evaluator, GenerationStats,
};
use bt_flight::sim::{Outcome, Pose};
use rand::seq::index::sample;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn individual(fitness: f64, size: usize) -> EvaluatedIndividual {
    // a Selector holding `size - 1` actions
    let tree = BehaviourTree::selector((1..size).map(|_| BehaviourTree::action(0.0)));
    EvaluatedIndividual::from_runs(
        tree,
        vec![RunRecord {
            fitness,
            outcome: Outcome::Crash,
        }],
    )
}

#[test]
fn grow_draws_node_kinds_uniformly() {
    let params = EAParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let (mut composite, mut action, mut condition) = (0usize, 0usize, 0usize);
    while composite + action + condition < 10_000 {
        let tree = grow(&params, &mut rng);
        assert!(tree.depth() <= params.max_depth);
        assert_eq!(tree.node(tree.root()).kind, NodeKind::Selector);
        let depths = tree.node_depths();
        for (i, node) in tree.nodes().iter().enumerate() {
            if node.kind.is_composite() {
                assert_eq!(node.children.len(), params.max_children);
            }
            // the root is fixed and the deepest level holds only leaves
            if depths[i] == 0 || depths[i] == params.max_depth {
                continue;
            }
            match node.kind {
                NodeKind::Selector | NodeKind::Sequence => composite += 1,
                NodeKind::Action { .. } => action += 1,
                NodeKind::Condition { .. } => condition += 1,
            }
        }
    }
    let n = (composite + action + condition) as f64;
    for (name, count) in [("composite", composite), ("action", action), ("condition", condition)] {
        let f = count as f64 / n;
        assert!((f - 1.0 / 3.0).abs() <= 0.03, "{name}: {f}");
    }
}

#[test]
fn grow_depth_one_is_a_flat_selector() {
    let params = EAParams {
        max_depth: 1,
        ..Default::default()
    };
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for _ in 0..1000 {
        let t = grow(&params, &mut rng);
        assert_eq!(t.size(), 1 + params.max_children);
        assert_eq!(t.depth(), 1);
    }
}

#[test]
fn macro_mutation_rate_matches_parameters() {
    let params = EAParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut visited, mut macros) = (0usize, 0usize);
    while visited < 10_000 {
        let tree = grow(&params, &mut rng);
        let (_, stats) = mutate_with_stats(&tree, &params, &mut rng);
        visited += stats.visited;
        macros += stats.macro_;
    }
    let rate = macros as f64 / visited as f64;
    assert!((rate - 0.04).abs() <= 0.01, "macro rate {rate}");
}

#[test]
fn mutation_extremes() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let tree = grow(&EAParams::default(), &mut rng);
    let off = EAParams {
        mutation_rate: 0.0,
        ..Default::default()
    };
    assert_eq!(mutate_with_stats(&tree, &off, &mut rng).0, tree);
    let micro = EAParams {
        mutation_rate: 1.0,
        hcc_rate: 0.0,
        ..Default::default()
    };
    let (m, stats) = mutate_with_stats(&tree, &micro, &mut rng);
    assert_eq!(stats.macro_, 0);
    assert_eq!(m.size(), tree.size());
    for (a, b) in tree.nodes().iter().zip(m.nodes()) {
        assert_eq!(a.children, b.children);
        assert_eq!(std::mem::discriminant(&a.kind), std::mem::discriminant(&b.kind));
    }
}

/// Independent statement of the selection rule.
fn expected_winner(pop: &[EvaluatedIndividual], group: &[usize]) -> usize {
    let mut g = group.to_vec();
    g.sort_by(|&a, &b| {
        pop[b]
            .fitness
            .partial_cmp(&pop[a].fitness)
            .unwrap()
            .then(pop[a].size.cmp(&pop[b].size))
    });
    if pop[g[1]].size < pop[g[0]].size {
        g[1]
    } else {
        g[0]
    }
}

#[test]
fn equal_size_tournaments_return_the_fittest() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let pop: Vec<_> = (0..100).map(|i| individual(i as f64 / 100.0, 9)).collect();
    for _ in 0..10_000 {
        let group: Vec<usize> = sample(&mut rng, pop.len(), 6).into_vec();
        let best = *group.iter().max_by(|&&a, &&b| pop[a].fitness.partial_cmp(&pop[b].fitness).unwrap()).unwrap();
        assert_eq!(tournament_pick(&pop, &group), best);
    }
}

#[test]
fn size_override_fires_exactly_when_runner_up_is_smaller() {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    // coarse fitness levels and sizes so ties happen often
    let pop: Vec<_> = (0..60)
        .map(|_| individual(rng.gen_range(0..5) as f64 / 4.0, rng.gen_range(1..8)))
        .collect();
    let mut fired = 0;
    for _ in 0..10_000 {
        let k = rng.gen_range(2..7);
        let group: Vec<usize> = sample(&mut rng, pop.len(), k).into_vec();
        let got = tournament_pick(&pop, &group);
        // exact ties may resolve to either twin
        let want = expected_winner(&pop, &group);
        assert_eq!((pop[got].fitness, pop[got].size), (pop[want].fitness, pop[want].size), "group {group:?}");
        if pop[got].fitness < group.iter().map(|&i| pop[i].fitness).fold(0.0, f64::max) {
            fired += 1;
        }
    }
    assert!(fired > 0);
    // the literal example pair
    let pop = vec![individual(0.9, 40), individual(0.5, 10)];
    assert_eq!(tournament_pick(&pop, &[0, 1]), 1);
    let pop = vec![individual(0.9, 10), individual(0.5, 40)];
    assert_eq!(tournament_pick(&pop, &[0, 1]), 0);
    let pop = vec![individual(0.7, 30), individual(0.7, 12)];
    assert_eq!(tournament_pick(&pop, &[0, 1]), 1);
}

#[test]
fn tournaments_favour_small_trees_at_equal_fitness() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let pop: Vec<_> = (0..100).map(|i| individual(0.5, 1 + i % 40)).collect();
    let mean = pop.iter().map(|p| p.size as f64).sum::<f64>() / pop.len() as f64;
    let picked: f64 = (0..10_000).map(|_| pop[tournament_select(&pop, 6, &mut rng)].size as f64).sum::<f64>() / 10_000.0;
    assert!(picked < mean, "{picked} vs {mean}");
}

#[test]
fn crossover_conserves_nodes_and_depth() {
    let params = EAParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..1000 {
        let a = grow(&params, &mut rng);
        let b = grow(&params, &mut rng);
        let (i, j) = (rng.gen_range(0..a.size()), rng.gen_range(0..b.size()));
        let (ca, cb) = crossover_at(&a, &b, i, j);
        assert_eq!(ca.size() + cb.size(), a.size() + b.size());
        let (ta, tb) = crossover(&a, &b, &params, &mut rng);
        assert!(ta.depth() <= params.max_depth && tb.depth() <= params.max_depth);
    }
    let a = grow(&params, &mut rng);
    let b = grow(&params, &mut rng);
    let (ca, cb) = crossover_at(&a, &b, 0, 0);
    assert_eq!((ca, cb), (b, a));
}

#[test]
fn offspring_split_follows_the_rates() {
    let defaults = EAParams::default();
    assert_eq!(defaults.elite_count(), 4);
    assert_eq!(defaults.crossover_slots(), 76);
    assert_eq!(defaults.population_size - defaults.elite_count() - defaults.crossover_slots(), 20);
    assert_eq!(defaults.tournament_size(), 6);
}

/// Cheap deterministic stand-in for the flight simulation.
struct Toy;

impl Evaluator for Toy {
    fn evaluate_run(&self, tree: &BehaviourTree, init: Pose) -> Result<RunRecord, EvalError> {
        let bb = bt_flight::bt::Blackboard::new(init.x / 4.0 - 1.0, 50.0, init.y / 8.0, 0.0).unwrap();
        let r = tree.tick(bb).1.rudder;
        let miss = (r - init.heading / std::f64::consts::PI).abs();
        Ok(if miss < 0.1 {
            RunRecord {
                fitness: 1.0,
                outcome: Outcome::Success,
            }
        } else {
            RunRecord {
                fitness: 1.0 / (1.0 + 3.0 * miss),
                outcome: Outcome::Crash,
            }
        })
    }

    fn spawn(&self, rng: &mut ChaCha8Rng) -> Pose {
        Pose {
            x: rng.gen_range(0.5..7.5),
            y: rng.gen_range(0.5..7.5),
            heading: rng.gen_range(-3.0..3.0),
        }
    }
}

fn toy_params() -> EAParams {
    EAParams {
        population_size: 30,
        max_generations: 8,
        runs_per_individual: 4,
        seed: 17,
        ..Default::default()
    }
}

fn toy_run(threads: usize) -> (Vec<GenerationStats>, Vec<String>) {
    let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
    let mut trees = Vec::new();
    let result = pool
        .install(|| {
            run_evolution(&toy_params(), &Toy, |g, _| {
                for ind in &g.population {
                    assert!(ind.tree.depth() <= 6);
                    trees.push(bt_flight::bt::serialize_compact(&ind.tree));
                }
                Ok(())
            })
        })
        .unwrap();
    (result.stats, trees)
}

#[test]
fn evolution_is_independent_of_thread_count() {
    let one = toy_run(1);
    assert_eq!(one.0.len(), 8);
    assert_eq!(one, toy_run(4));
    assert_eq!(one, toy_run(1));
}
