use rand::Rng;

use super::{rng_for, streams};
use crate::config::{InitMode, RunConfig, SpatialMode, Strategy};
use crate::error::Result;
use crate::geo_graph::{self, KnnGraph};
use crate::manifest::DatasetManifest;
use crate::metric::{self, ActiveTerms, DistanceTermConfig, TermScales};

/// Everything a run needs besides the mutable selection state: the manifest,
/// the resolved config, the KNN graph (manifold mode only) and the per-term
/// normalization scales.
pub struct SelectionContext<'a> {
    pub manifest: &'a DatasetManifest,
    pub config: &'a RunConfig,
    graph: Option<KnnGraph>,
    scales: TermScales,
}

impl<'a> SelectionContext<'a> {
    pub fn new(manifest: &'a DatasetManifest, config: &'a RunConfig) -> Result<Self> {
        let uses_metric = config.strategy == Strategy::Diversity || config.init_mode == InitMode::Warm;
        let graph = if uses_metric && config.spatial_mode == SpatialMode::Manifold && config.distance.lambda_s > 0.0 {
            Some(geo_graph::build_knn_graph(manifest, config.k, config.large_constant, config.use_elevation)?)
        } else {
            None
        };
        let mut ctx = SelectionContext {
            manifest,
            config,
            graph,
            scales: TermScales::default(),
        };
        if uses_metric {
            ctx.scales = ctx.estimate_scales();
        }
        Ok(ctx)
    }

    pub fn graph(&self) -> Option<&KnnGraph> {
        self.graph.as_ref()
    }

    pub fn scales(&self) -> TermScales {
        self.scales
    }

    /// Metric used by greedy cycles that start at cumulative spend `spent`.
    pub fn metric(&self, spent: f64) -> Result<DiversityMetric<'_>> {
        Ok(self.metric_with(self.config.distance.active_terms(spent)?))
    }

    /// Model-free metric for warm initialization: the feature term is dropped.
    pub fn warm_start_metric(&self) -> Result<DiversityMetric<'_>> {
        let model_free = DistanceTermConfig {
            lambda_f: 0.0,
            ..self.config.distance.clone()
        };
        Ok(self.metric_with(model_free.active_terms(0.0)?))
    }

    pub fn metric_with(&self, terms: ActiveTerms) -> DiversityMetric<'_> {
        DiversityMetric { ctx: self, terms }
    }

    /// Raw spatial distances from `source` to every sample.
    pub fn raw_spatial_from(&self, source: usize) -> Vec<f64> {
        self.raw_spatial_within(source, f64::INFINITY)
    }

    fn raw_spatial_within(&self, source: usize, cutoff: f64) -> Vec<f64> {
        let large = self.config.large_constant;
        match (&self.graph, self.config.spatial_mode) {
            (Some(graph), SpatialMode::Manifold) if cutoff < large => geo_graph::manifold_distances_within(graph, source, cutoff),
            (Some(graph), SpatialMode::Manifold) => geo_graph::manifold_distances_from(graph, source),
            _ => {
                let src = self.manifest.get(source);
                self.manifest
                    .samples()
                    .iter()
                    .map(|s| geo_graph::euclidean_spatial_distance(src, s, large, self.config.use_elevation))
                    .collect()
            }
        }
    }

    /// Median (RBF) or maximum (linear) of each active term's raw distances over
    /// a seeded sample of pairs. Small manifests use every pair.
    fn estimate_scales(&self) -> TermScales {
        let n = self.manifest.len();
        let budget = self.config.scale_pairs;
        let d = &self.config.distance;
        let mode = d.normalization;
        let large = self.config.large_constant;
        let exhaustive = n * n.saturating_sub(1) / 2 <= budget;
        let mut rng = rng_for(self.config.seed, streams::SCALES);

        let pairs: Vec<(usize, usize)> = if n < 2 {
            Vec::new()
        } else if exhaustive {
            (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
        } else {
            (0..budget)
                .map(|_| {
                    let i = rng.random_range(0..n);
                    let j = (i + rng.random_range(1..n)) % n;
                    (i, j)
                })
                .collect()
        };
        let samples = self.manifest.samples();
        let mut scales = TermScales::default();
        if d.lambda_t > 0.0 {
            let v: Vec<f64> = pairs.iter().map(|&(i, j)| metric::temporal_distance(&samples[i], &samples[j])).collect();
            scales.temporal = Some(metric::scale_from_sample(&v, mode, f64::INFINITY));
        }
        if d.lambda_f > 0.0 {
            let v: Vec<f64> = pairs
                .iter()
                .filter_map(|&(i, j)| Some(metric::lp_distance(samples[i].feature.as_ref()?, samples[j].feature.as_ref()?, d.lp_order)))
                .collect();
            scales.feature = Some(metric::scale_from_sample(&v, mode, f64::INFINITY));
        }
        if d.lambda_s > 0.0 {
            let v: Vec<f64> = match &self.graph {
                Some(graph) if n >= 2 => {
                    if exhaustive {
                        (0..n)
                            .flat_map(|i| {
                                let row = geo_graph::manifold_distances_from(graph, i);
                                row.into_iter().skip(i + 1)
                            })
                            .collect()
                    } else {
                        // one shortest-path tree per source, many targets each
                        let sources = (budget as f64).sqrt().ceil() as usize;
                        let per_source = budget.div_ceil(sources);
                        let mut v = Vec::with_capacity(sources * per_source);
                        for _ in 0..sources {
                            let s = rng.random_range(0..n);
                            let row = geo_graph::manifold_distances_from(graph, s);
                            for _ in 0..per_source {
                                let t = (s + rng.random_range(1..n)) % n;
                                v.push(row[t]);
                            }
                        }
                        v
                    }
                }
                _ => pairs
                    .iter()
                    .map(|&(i, j)| geo_graph::euclidean_spatial_distance(&samples[i], &samples[j], large, self.config.use_elevation))
                    .collect(),
            };
            scales.spatial = Some(metric::scale_from_sample(&v, mode, large));
        }
        scales
    }
}

/// Aggregated, normalized sample distance for one set of active terms.
pub struct DiversityMetric<'a> {
    ctx: &'a SelectionContext<'a>,
    terms: ActiveTerms,
}

impl<'a> DiversityMetric<'a> {
    pub fn terms(&self) -> &ActiveTerms {
        &self.terms
    }

    pub fn manifest(&self) -> &'a DatasetManifest {
        self.ctx.manifest
    }

    /// Distance from `source` to every sample.
    pub fn distances_from(&self, source: usize) -> Vec<f64> {
        self.distances_bounded(source, f64::INFINITY)
    }

    /// Distance from `source` to every sample, where entries whose true value
    /// is at least `bound` may be reported as `f64::INFINITY` instead.
    pub fn distances_bounded(&self, source: usize, bound: f64) -> Vec<f64> {
        let ctx = self.ctx;
        let samples = ctx.manifest.samples();
        let mode = ctx.config.distance.normalization;
        let p = ctx.config.distance.lp_order;
        let scale = |s: Option<f64>| s.unwrap_or(1.0);
        let (s_scale, t_scale, f_scale) = (scale(ctx.scales.spatial), scale(ctx.scales.temporal), scale(ctx.scales.feature));

        let spatial = self.terms.spatial.map(|_| ctx.raw_spatial_within(source, self.spatial_cutoff(bound)));
        let src = &samples[source];
        samples
            .iter()
            .enumerate()
            .map(|(j, s)| {
                let ds = match &spatial {
                    Some(row) if row[j] == f64::INFINITY => return f64::INFINITY,
                    Some(row) => metric::normalize_unchecked(row[j], mode, s_scale),
                    None => 0.0,
                };
                let dt = if self.terms.temporal.is_some() {
                    metric::normalize_unchecked(metric::temporal_distance(src, s), mode, t_scale)
                } else {
                    0.0
                };
                let df = match (self.terms.feature, &src.feature, &s.feature) {
                    (Some(_), Some(a), Some(b)) => metric::normalize_unchecked(metric::lp_distance(a, b, p), mode, f_scale),
                    _ => 0.0,
                };
                self.terms.combine(ds, dt, df)
            })
            .collect()
    }

    /// Raw spatial distance beyond which the aggregate cannot drop below `bound`.
    fn spatial_cutoff(&self, bound: f64) -> f64 {
        let ctx = self.ctx;
        let Some(weight) = self.terms.spatial_lower_bound_weight() else {
            return f64::INFINITY;
        };
        if ctx.config.spatial_mode != SpatialMode::Manifold || !bound.is_finite() {
            return f64::INFINITY;
        }
        let scale = ctx.scales.spatial.unwrap_or(1.0);
        let raw = metric::normalize_inverse(bound / weight, ctx.config.distance.normalization, scale);
        // slack absorbs rounding in exp/ln so pruning never drops a lowering entry
        raw * (1.0 + 1e-6) + f64::MIN_POSITIVE
    }
}
