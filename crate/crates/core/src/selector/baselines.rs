use rand::seq::SliceRandom;
use rand::Rng;

use super::greedy::{greedy_fill, BudgetRule};
use super::{rng_for, streams, Batch, CostModel, SelectionContext, SelectionState};
use crate::config::InitMode;
use crate::error::{Error, Result};
use crate::manifest::DatasetManifest;

/// Picks the initial labeled set with cost at most `b0`.
///
/// Cold mode samples uniformly at random, skipping samples that no longer fit.
/// Warm mode draws one random sample and fills the rest greedily with the
/// model-free (spatial and temporal) metric, under the same no-overshoot rule.
pub fn initialize_labeled(ctx: &SelectionContext<'_>, state: &mut SelectionState, b0: f64, mode: InitMode) -> Result<Batch> {
    let samples = ctx.manifest.samples();
    let cost = &ctx.config.cost;
    let cheapest = samples.iter().map(|s| cost.sample_cost(s)).fold(f64::INFINITY, f64::min);
    if cheapest > b0 {
        return Err(Error::BudgetTooSmall { budget: b0, cheapest });
    }
    let mut rng = rng_for(ctx.config.seed, streams::INIT);
    let mut batch = Batch::default();
    match mode {
        InitMode::Cold => {
            let mut order: Vec<usize> = state.unlabeled().collect();
            order.shuffle(&mut rng);
            for i in order {
                if batch.cost_with(&samples[i], cost) <= b0 {
                    batch.push(i, &samples[i], cost);
                    state.mark_labeled(i);
                }
            }
        }
        InitMode::Warm => {
            let metric = ctx.warm_start_metric()?;
            let affordable: Vec<usize> = state.unlabeled().filter(|&i| cost.sample_cost(&samples[i]) <= b0).collect();
            let first = affordable[rng.random_range(0..affordable.len())];
            batch.push(first, &samples[first], cost);
            state.mark_labeled(first);
            batch = greedy_fill(state, &metric, cost, b0, BudgetRule::NoOvershoot, batch);
        }
    }
    state.commit(&batch);
    Ok(batch)
}

/// Uniform random picks without replacement while the batch cost is below
/// `cycle_budget`.
pub fn random_select_cycle<R: Rng>(state: &mut SelectionState, manifest: &DatasetManifest, cost: &CostModel, cycle_budget: f64, rng: &mut R) -> Batch {
    let mut order: Vec<usize> = state.unlabeled().collect();
    order.shuffle(rng);
    let batch = take_in_order(state, manifest, cost, cycle_budget, order);
    state.commit(&batch);
    batch
}

/// Top-uncertainty picks from a random pool.
///
/// The pool holds `ceil(pool_factor * expected_frames)` unlabeled samples, where
/// `expected_frames` is the number of average-cost frames the budget buys.
/// If the pool runs dry first, the remaining unlabeled samples follow, again
/// by descending uncertainty.
pub fn entropy_select_cycle<R: Rng>(
    state: &mut SelectionState,
    manifest: &DatasetManifest,
    cost: &CostModel,
    cycle_budget: f64,
    pool_factor: f64,
    rng: &mut R,
) -> Result<Batch> {
    let samples = manifest.samples();
    let mut unlabeled: Vec<usize> = state.unlabeled().collect();
    if let Some(&i) = unlabeled.iter().find(|&&i| samples[i].uncertainty.is_none()) {
        return Err(Error::MissingField {
            field: "uncertainty",
            id: samples[i].id.clone(),
        });
    }
    if unlabeled.is_empty() {
        return Ok(Batch {
            exhausted: cycle_budget > 0.0,
            ..Batch::default()
        });
    }
    let mean_boxes = unlabeled.iter().map(|&i| samples[i].num_boxes as f64).sum::<f64>() / unlabeled.len() as f64;
    let expected_frames = cycle_budget / (cost.c_f + cost.c_b * mean_boxes);
    let pool_size = ((pool_factor * expected_frames).ceil().max(1.0) as usize).min(unlabeled.len());

    unlabeled.shuffle(rng);
    let (pool, rest) = unlabeled.split_at_mut(pool_size);
    let by_uncertainty = |a: &usize, b: &usize| {
        let (ua, ub) = (samples[*a].uncertainty.unwrap(), samples[*b].uncertainty.unwrap());
        ub.total_cmp(&ua).then(a.cmp(b))
    };
    pool.sort_by(by_uncertainty);
    rest.sort_by(by_uncertainty);
    let batch = take_in_order(state, manifest, cost, cycle_budget, unlabeled);
    state.commit(&batch);
    Ok(batch)
}

fn take_in_order(state: &mut SelectionState, manifest: &DatasetManifest, cost: &CostModel, budget: f64, order: Vec<usize>) -> Batch {
    let mut batch = Batch::default();
    let mut order = order.into_iter();
    while batch.cost < budget {
        let Some(i) = order.next() else {
            batch.exhausted = true;
            break;
        };
        batch.push(i, manifest.get(i), cost);
        state.mark_labeled(i);
    }
    batch
}
