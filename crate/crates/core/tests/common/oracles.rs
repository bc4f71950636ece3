//! Seeded oracle checks shared by the integration tests and the acceptance run.

use std::collections::BTreeSet;

use divsel::config::{InitMode, RunConfig, SpatialMode, Strategy};
use divsel::geo_graph::{build_knn_graph, manifold_distances_from};
use divsel::manifest::DatasetManifest;
use divsel::metric::{normalize, Aggregation, DistanceTermConfig, Normalization};
use divsel::run_schedule;
use divsel::selector::{annotation_cost, greedy_select_cycle, CostModel, CycleKind, SelectionContext, SelectionState};
use rand::seq::index::sample;
use rand::Rng;

use super::{covering_radius, floyd_warshall, naive_greedy, random_diversity_config, random_manifest, rng, Shape};

/// Largest gap between Dijkstra and Floyd–Warshall on one random graph of at
/// most 40 nodes.
pub fn shortest_path_gap(seed: u64) -> f64 {
    let mut r = rng(seed);
    let areas = r.random_range(1..=3);
    let k = r.random_range(1..=6);
    let shape = Shape {
        n: r.random_range((areas as usize * (k + 1)).max(8)..=40),
        areas,
        min_per_area: k + 1,
        extent: r.random_range(5.0..500.0),
        ..Shape::default()
    };
    let manifest = random_manifest(&mut r, shape);
    let graph = build_knn_graph(&manifest, k, 1e9, false).expect("graph");
    let fw = floyd_warshall(&graph);
    let mut gap: f64 = 0.0;
    for (s, fw_row) in fw.iter().enumerate() {
        let row = manifold_distances_from(&graph, s);
        for (a, b) in row.iter().zip(fw_row) {
            gap = gap.max((a - b).abs());
        }
    }
    gap
}

/// Runs one incremental greedy cycle and the from-scratch reference on the
/// same random instance (at most 200 samples) and compares pick sequences.
pub fn greedy_matches_reference(seed: u64) -> Result<usize, String> {
    let mut r = rng(seed);
    let with_features = r.random_bool(0.5);
    let shape = Shape {
        n: r.random_range(20..=200),
        streams: r.random_range(1..=6),
        areas: r.random_range(1..=2),
        feature_dim: if with_features { 4 } else { 0 },
        extent: r.random_range(10.0..1000.0),
        min_per_area: 10,
    };
    let manifest = random_manifest(&mut r, shape);
    let config = random_diversity_config(&mut r, with_features);
    let ctx = SelectionContext::new(&manifest, &config).map_err(|e| e.to_string())?;
    let spent = if r.random_bool(0.5) { 0.0 } else { 1e6 };
    let metric = ctx.metric(spent).or_else(|_| ctx.metric(1e6)).map_err(|e| e.to_string())?;
    let labeled_count = r.random_range(1..=5);
    let initial: Vec<usize> = sample(&mut r, manifest.len(), labeled_count).into_vec();
    let budget = r.random_range(2.0..30.0);

    let mut state = SelectionState::with_labeled(manifest.len(), &initial);
    let batch = greedy_select_cycle(&mut state, &metric, &config.cost, budget).map_err(|e| e.to_string())?;
    let reference = naive_greedy(&metric, &initial, &config.cost, budget);
    if batch.indices != reference {
        return Err(format!("seed {seed}: incremental {:?} != reference {:?}", batch.indices, reference));
    }
    Ok(batch.indices.len())
}

/// Greedy and optimal covering radius on a random instance with at most 15
/// samples and 3 centers under uniform cost.
pub fn two_approx_radii(seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let n = r.random_range(6..=15);
    let k = r.random_range(1..=3);
    let shape = Shape {
        n,
        streams: r.random_range(1..=3),
        areas: 1,
        min_per_area: n,
        extent: 100.0,
        ..Shape::default()
    };
    let manifest = random_manifest(&mut r, shape);
    let config = RunConfig {
        strategy: Strategy::Diversity,
        distance: DistanceTermConfig {
            lambda_s: 1.0,
            lambda_t: if r.random_bool(0.5) { 1.0 } else { 0.0 },
            lambda_f: 0.0,
            normalization: if r.random_bool(0.5) { Normalization::Rbf } else { Normalization::Linear },
            aggregation: if r.random_bool(0.5) { Aggregation::Sum } else { Aggregation::Max },
            ..Default::default()
        },
        spatial_mode: if r.random_bool(0.5) { SpatialMode::Manifold } else { SpatialMode::Euclidean },
        k: r.random_range(2..=4),
        cost: CostModel { c_f: 1.0, c_b: 0.0 },
        ..Default::default()
    };
    let ctx = SelectionContext::new(&manifest, &config).expect("context");
    let metric = ctx.metric(0.0).expect("metric");
    let dist: Vec<Vec<f64>> = (0..n).map(|i| metric.distances_from(i)).collect();

    let first = r.random_range(0..n);
    let mut state = SelectionState::with_labeled(n, &[first]);
    if k > 1 {
        greedy_select_cycle(&mut state, &metric, &config.cost, (k - 1) as f64).expect("greedy");
    }
    let greedy = covering_radius(&dist, state.labeled());

    let mut best = f64::INFINITY;
    for mask in 1u32..(1 << n) {
        if mask.count_ones() as usize == k {
            let centers: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
            best = best.min(covering_radius(&dist, &centers));
        }
    }
    (greedy, best)
}

/// Runs one random schedule and lists budget-rule violations.
pub fn budget_violations(seed: u64) -> Vec<String> {
    let mut r = rng(seed);
    let with_features = r.random_bool(0.3);
    let shape = Shape {
        n: r.random_range(12..=80),
        streams: r.random_range(1..=5),
        areas: 1,
        feature_dim: if with_features { 3 } else { 0 },
        extent: 200.0,
        min_per_area: 12,
    };
    let manifest = random_manifest(&mut r, shape);
    let mut config = random_diversity_config(&mut r, with_features);
    config.strategy = [Strategy::Diversity, Strategy::Entropy, Strategy::Random][r.random_range(0..3)];
    config.init_mode = if r.random_bool(0.5) { InitMode::Cold } else { InitMode::Warm };
    config.cost = CostModel {
        c_f: r.random_range(0.01..1.0),
        c_b: r.random_range(0.0..0.2),
    };
    config.pool_factor = r.random_range(0.5..20.0);
    let cheapest = manifest.samples().iter().map(|s| config.cost.sample_cost(s)).fold(f64::INFINITY, f64::min);
    let mut b = cheapest * r.random_range(1.0..8.0);
    config.checkpoints = (0..r.random_range(1..=5))
        .map(|_| {
            let c = b;
            b += r.random_range(0.05..6.0);
            c
        })
        .collect();

    let report = match run_schedule(&manifest, &config) {
        Ok(report) => report,
        Err(e) => return vec![format!("seed {seed}: run failed: {e}")],
    };
    let mut violations = Vec::new();
    let mut seen = BTreeSet::new();
    for c in &report.cycles {
        let samples: Vec<_> = c.ids.iter().map(|id| manifest.get(manifest.index_of(id).unwrap())).collect();
        let cost = annotation_cost(samples.iter().copied(), &config.cost);
        if (cost - c.cost).abs() > 1e-9 {
            violations.push(format!("seed {seed} cycle {}: reported cost {} != {}", c.cycle, c.cost, cost));
        }
        for id in &c.ids {
            if !seen.insert(id.clone()) {
                violations.push(format!("seed {seed}: {id} selected twice"));
            }
        }
        match c.kind {
            CycleKind::Init => {
                if c.cost > c.budget {
                    violations.push(format!("seed {seed}: init cost {} > b0 {}", c.cost, c.budget));
                }
            }
            CycleKind::Select => {
                if let Some(last) = samples.last() {
                    let before_last = c.cost - config.cost.sample_cost(last);
                    if before_last >= c.budget {
                        violations.push(format!(
                            "seed {seed} cycle {}: cost without last pick {} >= budget {}",
                            c.cycle, before_last, c.budget
                        ));
                    }
                }
            }
        }
    }
    violations
}

/// Random monotonicity and range checks for both normalization modes.
pub fn normalization_violations(seed: u64, draws: usize) -> Vec<String> {
    let mut r = rng(seed);
    let mut out = Vec::new();
    for _ in 0..draws {
        let scale = 10f64.powf(r.random_range(-3.0..3.0));
        let a = r.random_range(0.0..10.0) * scale;
        let b = a + r.random_range(0.0..10.0) * scale;
        for mode in [Normalization::Rbf, Normalization::Linear] {
            let (na, nb) = (normalize(a, mode, scale).unwrap().value(), normalize(b, mode, scale).unwrap().value());
            if !(0.0..=1.0).contains(&na) || !(0.0..=1.0).contains(&nb) {
                out.push(format!("{mode:?}: out of range at {a} or {b} (scale {scale})"));
            }
            if na > nb {
                out.push(format!("{mode:?}: not monotone: f({a}) = {na} > f({b}) = {nb}"));
            }
        }
    }
    for mode in [Normalization::Rbf, Normalization::Linear] {
        if normalize(f64::INFINITY, mode, 3.0).unwrap().value() != 1.0 {
            out.push(format!("{mode:?}: infinity does not map to 1.0"));
        }
        if normalize(0.0, mode, 3.0).unwrap().value() != 0.0 {
            out.push(format!("{mode:?}: zero does not map to 0.0"));
        }
    }
    out
}

/// Selected frames, boxes and dispersion for one labelled strategy run.
#[derive(Debug, Clone)]
pub struct StrategyOutcome {
    pub label: &'static str,
    pub frames: usize,
    pub boxes: u64,
    pub dispersion: f64,
}

/// Strategy configs compared on the hotspot scenario. Budgets are sized so
/// that the final checkpoint buys a few percent of the pool.
pub fn hotspot_configs(seed: u64) -> Vec<(&'static str, RunConfig)> {
    let config = |strategy, lambda_s, lambda_t| RunConfig {
        strategy,
        distance: DistanceTermConfig {
            lambda_s,
            lambda_t,
            lambda_f: 0.0,
            ..Default::default()
        },
        checkpoints: vec![50.0, 100.0, 200.0, 400.0],
        seed,
        ..Default::default()
    };
    vec![
        ("random", config(Strategy::Random, 1.0, 1.0)),
        ("entropy", config(Strategy::Entropy, 1.0, 1.0)),
        ("spatial", config(Strategy::Diversity, 1.0, 0.0)),
        ("spa_temp", config(Strategy::Diversity, 1.0, 1.0)),
    ]
}

pub fn run_strategies(manifest: &DatasetManifest, seed: u64) -> Vec<StrategyOutcome> {
    hotspot_configs(seed)
        .into_iter()
        .map(|(label, config)| {
            let report = run_schedule(manifest, &config).expect("run");
            let cov = divsel::simharness::evaluate_selection(manifest, &report.selected_ids()).expect("coverage");
            StrategyOutcome {
                label,
                frames: cov.frames,
                boxes: cov.boxes,
                dispersion: cov.dispersion,
            }
        })
        .collect()
}

pub fn outcome<'a>(outcomes: &'a [StrategyOutcome], label: &str) -> &'a StrategyOutcome {
    outcomes.iter().find(|o| o.label == label).expect("strategy present")
}
