//! Budget-constrained selection: the annotation cost model, the greedy
//! k-Center loop, and the random/entropy baselines.

mod baselines;
mod context;
mod greedy;
mod report;
mod schedule;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::{DatasetManifest, SampleRecord};

pub use baselines::{entropy_select_cycle, initialize_labeled, random_select_cycle};
pub use context::{DiversityMetric, SelectionContext};
pub use greedy::greedy_select_cycle;
pub use report::{CycleKind, CycleReport, SelectionReport};
pub use schedule::run_schedule;

/// Cost of annotating one frame and one bounding box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CostModel {
    pub c_f: f64,
    pub c_b: f64,
}

impl Default for CostModel {
    fn default() -> Self {
        CostModel { c_f: 0.12, c_b: 0.04 }
    }
}

impl CostModel {
    pub fn validate(&self) -> Result<()> {
        if !(self.c_f.is_finite() && self.c_f >= 0.0 && self.c_b.is_finite() && self.c_b >= 0.0) {
            return Err(Error::config("cost", "c_f and c_b must be finite and non-negative"));
        }
        if self.c_f + self.c_b <= 0.0 {
            return Err(Error::config("cost", "c_f + c_b must be positive"));
        }
        Ok(())
    }

    #[inline]
    pub fn cost_of(&self, frames: usize, boxes: u64) -> f64 {
        self.c_f * frames as f64 + self.c_b * boxes as f64
    }

    #[inline]
    pub fn sample_cost(&self, sample: &SampleRecord) -> f64 {
        self.cost_of(1, sample.num_boxes as u64)
    }
}

/// `c_f · n_f + c_b · n_b` over a batch.
pub fn annotation_cost<'a>(batch: impl IntoIterator<Item = &'a SampleRecord>, model: &CostModel) -> f64 {
    let (frames, boxes) = batch
        .into_iter()
        .fold((0usize, 0u64), |(f, b), s| (f + 1, b + s.num_boxes as u64));
    model.cost_of(frames, boxes)
}

/// Strictly increasing cumulative budget checkpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct BudgetSchedule(Vec<f64>);

impl BudgetSchedule {
    pub fn new(checkpoints: Vec<f64>) -> Result<Self> {
        if checkpoints.is_empty() {
            return Err(Error::config("checkpoints", "at least one checkpoint is required"));
        }
        if !checkpoints.iter().all(|b| b.is_finite() && *b > 0.0) {
            return Err(Error::config("checkpoints", "checkpoints must be positive and finite"));
        }
        if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::config("checkpoints", "checkpoints must be strictly increasing"));
        }
        Ok(BudgetSchedule(checkpoints))
    }

    pub fn checkpoints(&self) -> &[f64] {
        &self.0
    }
}

/// One selected batch, in pick order.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Batch {
    pub indices: Vec<usize>,
    /// Min-distance of each pick at the time it was picked (greedy only).
    pub scores: Vec<f64>,
    pub frames: usize,
    pub boxes: u64,
    pub cost: f64,
    /// The unlabeled pool ran out before the budget was reached.
    pub exhausted: bool,
}

impl Batch {
    pub(crate) fn push(&mut self, index: usize, sample: &SampleRecord, model: &CostModel) {
        self.indices.push(index);
        self.frames += 1;
        self.boxes += sample.num_boxes as u64;
        self.cost = model.cost_of(self.frames, self.boxes);
    }

    pub(crate) fn cost_with(&self, sample: &SampleRecord, model: &CostModel) -> f64 {
        model.cost_of(self.frames + 1, self.boxes + sample.num_boxes as u64)
    }

    pub fn ids<'a>(&self, manifest: &'a DatasetManifest) -> Vec<&'a str> {
        self.indices.iter().map(|&i| manifest.get(i).id.as_str()).collect()
    }
}

/// Labeled/unlabeled split plus the cached min-distance of every unlabeled
/// sample to the labeled set under one metric.
#[derive(Debug, Clone)]
pub struct SelectionState {
    labeled: Vec<usize>,
    is_labeled: Vec<bool>,
    spent: f64,
    min_dist: Vec<f64>,
    cache_key: Option<crate::metric::ActiveTerms>,
    covered: usize,
}

impl SelectionState {
    pub fn new(n: usize) -> Self {
        SelectionState {
            labeled: Vec::new(),
            is_labeled: vec![false; n],
            spent: 0.0,
            min_dist: vec![f64::INFINITY; n],
            cache_key: None,
            covered: 0,
        }
    }

    /// State with `labeled` already annotated at no recorded cost.
    pub fn with_labeled(n: usize, labeled: &[usize]) -> Self {
        let mut state = SelectionState::new(n);
        for &i in labeled {
            state.mark_labeled(i);
        }
        state
    }

    pub fn labeled(&self) -> &[usize] {
        &self.labeled
    }

    pub fn is_labeled(&self, i: usize) -> bool {
        self.is_labeled[i]
    }

    pub fn unlabeled(&self) -> impl Iterator<Item = usize> + '_ {
        self.is_labeled.iter().enumerate().filter(|(_, &l)| !l).map(|(i, _)| i)
    }

    pub fn unlabeled_count(&self) -> usize {
        self.is_labeled.len() - self.labeled.len()
    }

    /// Cumulative cost of every batch committed so far.
    pub fn spent(&self) -> f64 {
        self.spent
    }

    /// Cached min-distance to the labeled set; meaningful for unlabeled samples.
    pub fn min_dist(&self) -> &[f64] {
        &self.min_dist
    }

    fn mark_labeled(&mut self, i: usize) {
        debug_assert!(!self.is_labeled[i], "sample {i} selected twice");
        self.is_labeled[i] = true;
        self.labeled.push(i);
    }

    pub(crate) fn commit(&mut self, batch: &Batch) {
        self.spent += batch.cost;
    }

    /// Brings `min_dist` in line with `metric`: recomputes from scratch when the
    /// metric changed, otherwise folds in samples labeled since the last sync.
    pub(crate) fn sync(&mut self, metric: &DiversityMetric<'_>) {
        if self.cache_key != Some(*metric.terms()) {
            self.min_dist.iter_mut().for_each(|d| *d = f64::INFINITY);
            self.cache_key = Some(*metric.terms());
            self.covered = 0;
        }
        while self.covered < self.labeled.len() {
            let source = self.labeled[self.covered];
            self.fold(metric, source);
        }
    }

    /// Folds one labeled sample into `min_dist`. Only distances that can lower
    /// some unlabeled entry are computed exactly.
    fn fold(&mut self, metric: &DiversityMetric<'_>, source: usize) {
        let bound = self.unlabeled().map(|i| self.min_dist[i]).fold(f64::NEG_INFINITY, f64::max);
        let row = metric.distances_bounded(source, bound);
        for (i, d) in row.into_iter().enumerate() {
            if !self.is_labeled[i] && d < self.min_dist[i] {
                self.min_dist[i] = d;
            }
        }
        self.covered += 1;
    }
}

pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

pub(crate) mod streams {
    pub const SCALES: u64 = 1;
    pub const INIT: u64 = 2;
    pub fn cycle(t: usize) -> u64 {
        100 + t as u64
    }
}
