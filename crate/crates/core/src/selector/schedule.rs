use log::{info, warn};

use super::report::{manifest_digest, run_hash};
use super::{
    entropy_select_cycle, greedy_select_cycle, initialize_labeled, random_select_cycle, rng_for, streams, Batch, CycleKind,
    CycleReport, SelectionContext, SelectionReport, SelectionState,
};
use crate::config::{RunConfig, Strategy};
use crate::error::Result;
use crate::manifest::{validate_for_strategy, DatasetManifest};

/// Runs initialization plus one cycle per remaining checkpoint.
///
/// Checkpoints are cumulative: cycle `t` may spend `checkpoint_t` minus what
/// earlier cycles already spent. A cycle whose share is already used up by an
/// earlier overshoot selects nothing.
pub fn run_schedule(manifest: &DatasetManifest, config: &RunConfig) -> Result<SelectionReport> {
    config.validate()?;
    let schedule = config.schedule()?;
    validate_for_strategy(manifest, config.strategy, config.distance.lambda_f)?;

    let ctx = SelectionContext::new(manifest, config)?;
    if let Some(g) = ctx.graph() {
        info!("knn graph: {} nodes, {} edges (K={})", g.node_count(), g.edge_count(), g.k());
    }
    let mut state = SelectionState::new(manifest.len());
    let checkpoints = schedule.checkpoints();
    let mut cycles = Vec::with_capacity(checkpoints.len());

    let init = initialize_labeled(&ctx, &mut state, checkpoints[0], config.init_mode)?;
    info!("init: {} frames, cost {:.3}", init.frames, init.cost);
    cycles.push(cycle_report(0, CycleKind::Init, checkpoints[0], checkpoints[0], false, &init, state.spent(), manifest));

    for (t, &checkpoint) in checkpoints.iter().enumerate().skip(1) {
        let spent = state.spent();
        let budget = checkpoint - spent;
        let feature_term = config.strategy == Strategy::Diversity && config.distance.feature_enabled(spent);
        let batch = if budget <= 0.0 {
            Batch::default()
        } else {
            let mut rng = rng_for(config.seed, streams::cycle(t));
            match config.strategy {
                Strategy::Random => random_select_cycle(&mut state, manifest, &config.cost, budget, &mut rng),
                Strategy::Entropy => entropy_select_cycle(&mut state, manifest, &config.cost, budget, config.pool_factor, &mut rng)?,
                Strategy::Diversity => {
                    let metric = ctx.metric(spent)?;
                    greedy_select_cycle(&mut state, &metric, &config.cost, budget)?
                }
            }
        };
        if batch.exhausted {
            warn!("cycle {t}: unlabeled pool exhausted before budget {budget:.3} was reached");
        }
        info!("cycle {t}: {} frames, cost {:.3}, cumulative {:.3}", batch.frames, batch.cost, state.spent());
        cycles.push(cycle_report(t, CycleKind::Select, checkpoint, budget, feature_term, &batch, state.spent(), manifest));
    }

    let digest = manifest_digest(manifest);
    Ok(SelectionReport {
        version: crate::VERSION.to_string(),
        strategy: config.strategy,
        config: config.clone(),
        scales: ctx.scales(),
        num_samples: manifest.len(),
        run_hash: run_hash(config, &digest),
        manifest_digest: digest,
        total_frames: cycles.iter().map(|c| c.frames).sum(),
        total_boxes: cycles.iter().map(|c| c.boxes).sum(),
        total_cost: state.spent(),
        cycles,
    })
}

#[allow(clippy::too_many_arguments)]
fn cycle_report(
    cycle: usize,
    kind: CycleKind,
    checkpoint: f64,
    budget: f64,
    feature_term: bool,
    batch: &Batch,
    cumulative_cost: f64,
    manifest: &DatasetManifest,
) -> CycleReport {
    CycleReport {
        cycle,
        kind,
        checkpoint,
        budget,
        feature_term,
        ids: batch.ids(manifest).into_iter().map(str::to_string).collect(),
        frames: batch.frames,
        boxes: batch.boxes,
        cost: batch.cost,
        cumulative_cost,
        exhausted: batch.exhausted,
        retrain_after: true,
    }
}
