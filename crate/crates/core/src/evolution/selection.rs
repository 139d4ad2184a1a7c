use std::cmp::Ordering;

use rand::seq::index;
use rand::Rng;

use crate::evaluation::EvaluatedIndividual;

/// Ranking order: higher fitness first, then smaller tree.
pub fn rank_order(a: &EvaluatedIndividual, b: &EvaluatedIndividual) -> Ordering {
    b.fitness
        .partial_cmp(&a.fitness)
        .unwrap_or(Ordering::Equal)
        .then(a.size.cmp(&b.size))
}

/// Population indices sorted best first; ties keep slot order.
pub fn ranked_indices(population: &[EvaluatedIndividual]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..population.len()).collect();
    idx.sort_by(|&a, &b| rank_order(&population[a], &population[b]));
    idx
}

/// Winner of a tournament among `group`: the top-ranked member, unless the
/// runner-up is a strictly smaller tree, in which case the runner-up wins.
///
/// # Panics
/// If `group` is empty.
pub fn tournament_pick(population: &[EvaluatedIndividual], group: &[usize]) -> usize {
    let mut sorted = group.to_vec();
    sorted.sort_by(|&a, &b| rank_order(&population[a], &population[b]).then(a.cmp(&b)));
    match sorted[..] {
        [first, second, ..] if population[second].size < population[first].size => second,
        [first, ..] => first,
        [] => panic!("empty tournament"),
    }
}

/// Draws `size` distinct members uniformly and returns the tournament winner.
pub fn tournament_select<R: Rng + ?Sized>(population: &[EvaluatedIndividual], size: usize, rng: &mut R) -> usize {
    let group = index::sample(rng, population.len(), size.min(population.len())).into_vec();
    tournament_pick(population, &group)
}
