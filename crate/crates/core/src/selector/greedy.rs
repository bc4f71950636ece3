use super::{Batch, CostModel, DiversityMetric, SelectionState};
use crate::error::{Error, Result};

/// How the batch budget limits picks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum BudgetRule {
    /// Keep picking while the batch cost is below the budget; the last pick
    /// may overshoot.
    Overshoot,
    /// Only pick samples that keep the batch within the budget.
    NoOvershoot,
}

/// One greedy k-Center cycle: repeatedly label the unlabeled sample farthest
/// from the labeled set until the batch cost reaches `cycle_budget`.
///
/// Ties go to the lowest manifest index. If the pool empties first, the
/// partial batch is returned with `exhausted` set.
pub fn greedy_select_cycle(state: &mut SelectionState, metric: &DiversityMetric<'_>, cost: &CostModel, cycle_budget: f64) -> Result<Batch> {
    if state.labeled().is_empty() {
        return Err(Error::Runtime("greedy selection needs a non-empty labeled set".into()));
    }
    if !(cycle_budget > 0.0) {
        return Err(Error::config("cycle_budget", "must be positive"));
    }
    let batch = greedy_fill(state, metric, cost, cycle_budget, BudgetRule::Overshoot, Batch::default());
    state.commit(&batch);
    Ok(batch)
}

pub(crate) fn greedy_fill(
    state: &mut SelectionState,
    metric: &DiversityMetric<'_>,
    cost: &CostModel,
    budget: f64,
    rule: BudgetRule,
    mut batch: Batch,
) -> Batch {
    let samples = metric.manifest().samples();
    state.sync(metric);
    loop {
        if rule == BudgetRule::Overshoot && batch.cost >= budget {
            break;
        }
        let mut pick: Option<(usize, f64)> = None;
        for i in state.unlabeled() {
            if rule == BudgetRule::NoOvershoot && batch.cost_with(&samples[i], cost) > budget {
                continue;
            }
            let d = state.min_dist[i];
            if pick.is_none_or(|(_, best)| d > best) {
                pick = Some((i, d));
            }
        }
        let Some((p, score)) = pick else {
            batch.exhausted = rule == BudgetRule::Overshoot;
            break;
        };
        batch.push(p, &samples[p], cost);
        batch.scores.push(score);
        state.mark_labeled(p);
        state.fold(metric, p);
    }
    batch
}
