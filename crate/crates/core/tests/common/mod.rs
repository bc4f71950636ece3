#![allow(dead_code)]

pub mod oracles;

use divsel::config::{RunConfig, SpatialMode, Strategy};
use divsel::geo_graph::KnnGraph;
use divsel::manifest::{DatasetManifest, SampleRecord};
use divsel::metric::{Aggregation, DistanceTermConfig, Normalization};
use divsel::selector::{CostModel, DiversityMetric};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Options for a random manifest.
#[derive(Debug, Clone, Copy)]
pub struct Shape {
    pub n: usize,
    pub streams: i64,
    pub areas: i64,
    pub feature_dim: usize,
    pub extent: f64,
    /// Every area gets at least this many samples.
    pub min_per_area: usize,
}

impl Default for Shape {
    fn default() -> Self {
        Shape {
            n: 60,
            streams: 4,
            areas: 1,
            feature_dim: 0,
            extent: 100.0,
            min_per_area: 10,
        }
    }
}

/// Samples scattered uniformly with random streams, timestamps and box counts.
pub fn random_manifest(rng: &mut impl Rng, shape: Shape) -> DatasetManifest {
    let mut samples = Vec::with_capacity(shape.n);
    for i in 0..shape.n {
        let area = if (i / shape.min_per_area) < shape.areas as usize {
            (i / shape.min_per_area) as i64
        } else {
            rng.random_range(0..shape.areas)
        };
        let stream = rng.random_range(0..shape.streams);
        let mut s = SampleRecord::new(
            format!("x{i:04}"),
            stream,
            rng.random_range(0.0..600.0),
            [rng.random_range(0.0..shape.extent), rng.random_range(0.0..shape.extent)],
            area,
            rng.random_range(0..25),
        );
        if shape.feature_dim > 0 {
            s.feature = Some((0..shape.feature_dim).map(|_| rng.random_range(-1.0..1.0)).collect());
        }
        s.uncertainty = Some((rng.random_range(0..20) as f64) / 19.0);
        samples.push(s);
    }
    DatasetManifest::new(samples, "random").expect("valid manifest")
}

/// A random run configuration for the diversity strategy.
pub fn random_diversity_config(rng: &mut impl Rng, with_features: bool) -> RunConfig {
    fn lambda(rng: &mut impl Rng) -> f64 {
        if rng.random_bool(0.75) {
            rng.random_range(0.2..2.0)
        } else {
            0.0
        }
    }
    let mut distance = DistanceTermConfig {
        lambda_s: lambda(rng),
        lambda_t: lambda(rng),
        lambda_f: if with_features { lambda(rng) } else { 0.0 },
        lp_order: [1.0, 2.0, 3.0][rng.random_range(0..3)],
        normalization: if rng.random_bool(0.5) { Normalization::Rbf } else { Normalization::Linear },
        aggregation: [Aggregation::Sum, Aggregation::Min, Aggregation::Max][rng.random_range(0..3)],
        feature_enable_budget: rng.random_range(0.0..20.0),
    };
    if distance.lambda_s + distance.lambda_t == 0.0 {
        distance.lambda_s = 1.0;
    }
    RunConfig {
        strategy: Strategy::Diversity,
        distance,
        spatial_mode: if rng.random_bool(0.7) { SpatialMode::Manifold } else { SpatialMode::Euclidean },
        k: rng.random_range(2..7),
        seed: rng.random(),
        checkpoints: vec![5.0, 10.0, 20.0],
        scale_pairs: 500,
        ..Default::default()
    }
}

/// All-pairs shortest paths over the graph's edge list.
pub fn floyd_warshall(graph: &KnnGraph) -> Vec<Vec<f64>> {
    let n = graph.node_count();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for (i, j, w) in graph.edges() {
        if w < d[i][j] {
            d[i][j] = w;
            d[j][i] = w;
        }
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k] == f64::INFINITY {
                continue;
            }
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    for row in &mut d {
        for v in row.iter_mut() {
            if *v == f64::INFINITY {
                *v = graph.large_constant();
            }
        }
    }
    d
}

/// Greedy k-Center recomputed from scratch at every pick: full distance rows
/// from every labeled sample, argmax of the minimum, lowest index on ties.
pub fn naive_greedy(metric: &DiversityMetric<'_>, labeled: &[usize], cost: &CostModel, budget: f64) -> Vec<usize> {
    let samples = metric.manifest().samples();
    let n = samples.len();
    let mut is_labeled = vec![false; n];
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for &l in labeled {
        is_labeled[l] = true;
        rows.push(metric.distances_from(l));
    }
    let mut picks = Vec::new();
    let (mut frames, mut boxes) = (0usize, 0u64);
    while cost.cost_of(frames, boxes) < budget {
        let mut best: Option<(usize, f64)> = None;
        for i in (0..n).filter(|&i| !is_labeled[i]) {
            let d = rows.iter().map(|r| r[i]).fold(f64::INFINITY, f64::min);
            if best.is_none() || d > best.unwrap().1 {
                best = Some((i, d));
            }
        }
        let Some((p, _)) = best else { break };
        picks.push(p);
        is_labeled[p] = true;
        rows.push(metric.distances_from(p));
        frames += 1;
        boxes += samples[p].num_boxes as u64;
    }
    picks
}

/// Largest distance from any sample to its nearest center.
pub fn covering_radius(dist: &[Vec<f64>], centers: &[usize]) -> f64 {
    (0..dist.len())
        .map(|i| centers.iter().map(|&c| dist[c][i]).fold(f64::INFINITY, f64::min))
        .fold(0.0, f64::max)
}

/// Average ranks, 1-based.
pub fn ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && values[order[j + 1]] == values[order[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    cov / (vx * vy).sqrt()
}
