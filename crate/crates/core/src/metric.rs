//! Per-term raw distances, normalization to `[0, 1]`, and weighted aggregation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::SampleRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Normalization {
    /// `1 - exp(-d / scale)`
    Rbf,
    /// `min(d / scale, 1)` with `scale` the largest finite raw distance.
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Aggregation {
    Sum,
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DistanceTermConfig {
    pub lambda_s: f64,
    pub lambda_t: f64,
    pub lambda_f: f64,
    pub lp_order: f64,
    pub normalization: Normalization,
    pub aggregation: Aggregation,
    /// Cumulative spend (cost units) from which the feature term is switched on.
    pub feature_enable_budget: f64,
}

impl Default for DistanceTermConfig {
    fn default() -> Self {
        DistanceTermConfig {
            lambda_s: 1.0,
            lambda_t: 1.0,
            lambda_f: 0.0,
            lp_order: 2.0,
            normalization: Normalization::Rbf,
            aggregation: Aggregation::Sum,
            feature_enable_budget: 1200.0,
        }
    }
}

impl DistanceTermConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("lambda_s", self.lambda_s), ("lambda_t", self.lambda_t), ("lambda_f", self.lambda_f)] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::config(format!("distance.{name}"), "must be finite and non-negative"));
            }
        }
        if self.lambda_s + self.lambda_t + self.lambda_f <= 0.0 {
            return Err(Error::config("distance", "at least one lambda must be positive"));
        }
        if !(self.lp_order.is_finite() && self.lp_order >= 1.0) {
            return Err(Error::config("distance.lp_order", "must be >= 1"));
        }
        if !(self.feature_enable_budget.is_finite() && self.feature_enable_budget >= 0.0) {
            return Err(Error::config("distance.feature_enable_budget", "must be finite and non-negative"));
        }
        Ok(())
    }

    pub fn feature_enabled(&self, spent_budget: f64) -> bool {
        self.lambda_f > 0.0 && spent_budget >= self.feature_enable_budget
    }

    /// Resolves which terms participate at the given spend.
    pub fn active_terms(&self, spent_budget: f64) -> Result<ActiveTerms> {
        let on = |w: f64| (w > 0.0).then_some(w);
        let terms = ActiveTerms {
            spatial: on(self.lambda_s),
            temporal: on(self.lambda_t),
            feature: if self.feature_enabled(spent_budget) { on(self.lambda_f) } else { None },
            aggregation: self.aggregation,
        };
        if terms.spatial.is_none() && terms.temporal.is_none() && terms.feature.is_none() {
            return Err(Error::NoActiveTerm);
        }
        Ok(terms)
    }
}

/// Weights of the enabled terms; `None` means the term does not participate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ActiveTerms {
    pub spatial: Option<f64>,
    pub temporal: Option<f64>,
    pub feature: Option<f64>,
    pub aggregation: Aggregation,
}

impl ActiveTerms {
    /// Combines normalized term values. Values of disabled terms are ignored.
    #[inline]
    pub fn combine(&self, spatial: f64, temporal: f64, feature: f64) -> f64 {
        let parts = [(self.spatial, spatial), (self.temporal, temporal), (self.feature, feature)];
        match self.aggregation {
            Aggregation::Sum => parts.iter().filter_map(|&(w, d)| w.map(|w| w * d)).sum(),
            Aggregation::Min => parts
                .iter()
                .filter(|(w, _)| w.is_some())
                .map(|&(_, d)| d)
                .fold(f64::INFINITY, f64::min),
            Aggregation::Max => parts
                .iter()
                .filter(|(w, _)| w.is_some())
                .map(|&(_, d)| d)
                .fold(f64::NEG_INFINITY, f64::max),
        }
    }

    /// Lower bound of the aggregate implied by the spatial term alone, if one exists.
    pub fn spatial_lower_bound_weight(&self) -> Option<f64> {
        match self.aggregation {
            Aggregation::Sum => self.spatial,
            Aggregation::Max => self.spatial.map(|_| 1.0),
            Aggregation::Min => None,
        }
    }
}

/// A distance mapped into `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct NormalizedDistance(f64);

impl NormalizedDistance {
    pub fn value(self) -> f64 {
        self.0
    }
}

/// `‖a − b‖_p`.
pub fn feature_distance(a: &[f64], b: &[f64], p: f64) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(lp_distance(a, b, p))
}

#[inline]
pub(crate) fn lp_distance(a: &[f64], b: &[f64], p: f64) -> f64 {
    let diffs = a.iter().zip(b).map(|(x, y)| (x - y).abs());
    if p == 2.0 {
        diffs.map(|d| d * d).sum::<f64>().sqrt()
    } else if p == 1.0 {
        diffs.sum()
    } else {
        diffs.map(|d| d.powf(p)).sum::<f64>().powf(p.recip())
    }
}

/// Absolute time difference within a stream, infinite across streams.
#[inline]
pub fn temporal_distance(a: &SampleRecord, b: &SampleRecord) -> f64 {
    if a.stream_id == b.stream_id {
        (a.timestamp - b.timestamp).abs()
    } else {
        f64::INFINITY
    }
}

pub fn normalize(d: f64, mode: Normalization, scale: f64) -> Result<NormalizedDistance> {
    if !(scale > 0.0) {
        return Err(Error::NonPositiveScale(scale));
    }
    Ok(NormalizedDistance(normalize_unchecked(d, mode, scale)))
}

#[inline]
pub(crate) fn normalize_unchecked(d: f64, mode: Normalization, scale: f64) -> f64 {
    if d == f64::INFINITY {
        return 1.0;
    }
    match mode {
        Normalization::Rbf => 1.0 - (-d / scale).exp(),
        Normalization::Linear => (d / scale).min(1.0),
    }
}

/// Smallest raw distance whose normalized value reaches `level`, or infinity
/// when no finite distance does.
pub(crate) fn normalize_inverse(level: f64, mode: Normalization, scale: f64) -> f64 {
    if level <= 0.0 {
        return 0.0;
    }
    if level >= 1.0 {
        return f64::INFINITY;
    }
    match mode {
        Normalization::Rbf => -scale * (-level).ln_1p(),
        Normalization::Linear => level * scale,
    }
}

/// Normalized terms for one pair; `feature` may be absent when the term is off.
#[derive(Debug, Clone, Copy)]
pub struct TermDistances {
    pub spatial: NormalizedDistance,
    pub temporal: NormalizedDistance,
    pub feature: Option<NormalizedDistance>,
}

pub fn aggregate(terms: &TermDistances, config: &DistanceTermConfig, spent_budget: f64) -> Result<f64> {
    let active = config.active_terms(spent_budget)?;
    let feature = match (active.feature, terms.feature) {
        (Some(_), None) => return Err(Error::MissingField { field: "feature", id: String::new() }),
        (_, f) => f.map_or(0.0, NormalizedDistance::value),
    };
    Ok(active.combine(terms.spatial.value(), terms.temporal.value(), feature))
}

/// Per-term scales used by normalization. A term that is not used has no scale.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TermScales {
    pub spatial: Option<f64>,
    pub temporal: Option<f64>,
    pub feature: Option<f64>,
}

/// Scale from a sample of raw distances: the median for RBF, the maximum for
/// linear. Infinite values and values at or above `sentinel` are excluded.
/// Falls back to the mean positive value when the median is zero, and to 1
/// when nothing usable remains.
pub fn scale_from_sample(values: &[f64], mode: Normalization, sentinel: f64) -> f64 {
    let mut finite: Vec<f64> = values.iter().copied().filter(|v| v.is_finite() && *v < sentinel).collect();
    if finite.is_empty() {
        return 1.0;
    }
    finite.sort_by(f64::total_cmp);
    let scale = match mode {
        Normalization::Linear => *finite.last().unwrap(),
        Normalization::Rbf => {
            let n = finite.len();
            if n % 2 == 1 {
                finite[n / 2]
            } else {
                0.5 * (finite[n / 2 - 1] + finite[n / 2])
            }
        }
    };
    if scale > 0.0 {
        return scale;
    }
    let positive: Vec<f64> = finite.into_iter().filter(|v| *v > 0.0).collect();
    if positive.is_empty() {
        1.0
    } else {
        positive.iter().sum::<f64>() / positive.len() as f64
    }
}
