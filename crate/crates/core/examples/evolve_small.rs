//! Evolves a controller with a small population and validates the champion.
//!
//! `cargo run --release --example evolve_small -- [seed] [generations] [population]`

use std::time::Instant;

use bt_flight::bt::{prune, serialize};
use bt_flight::evaluation::validate;
use bt_flight::evolution::{run_evolution, EAParams, SimEvaluator};

fn main() {
    let mut args = std::env::args().skip(1).map(|a| a.parse::<u64>().expect("numeric argument"));
    let seed = args.next().unwrap_or(1);
    let generations = args.next().unwrap_or(40) as usize;
    let population = args.next().unwrap_or(50) as usize;
    let params = EAParams {
        population_size: population,
        max_generations: generations,
        seed,
        ..Default::default()
    };
    let evaluator = SimEvaluator::default();
    let start = Instant::now();
    let result = run_evolution(&params, &evaluator, |_, s| {
        println!(
            "gen {:3}  best {:.4}  mean {:.4}  best size {:4}  mean size {:7.1}  ({:.1}s)",
            s.generation,
            s.best_fitness,
            s.mean_fitness,
            s.best_size,
            s.mean_size,
            start.elapsed().as_secs_f64()
        );
        Ok(())
    })
    .expect("evolution failed");
    let pruned = prune(&result.best.tree);
    println!("champion (generation {}, size {} -> {} pruned):", result.best_generation, result.best.size, pruned.size());
    print!("{}", serialize(&pruned));
    let report = validate(&pruned, 100, seed.wrapping_add(1000), &evaluator.world);
    println!("{}", report.summary(pruned.size()));
}
