//! Synthetic driving-log generator and selection coverage metrics.
//!
//! Vehicles drive random walks over a square grid of roads while recording at
//! a fixed rate. Inside a traffic hotspot the vehicle slows down, so frames
//! are packed more densely and contain more objects.

use std::collections::{BTreeMap, BTreeSet};

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use rand_distr::{Normal, Poisson};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::manifest::{DatasetManifest, SampleRecord};
use crate::selector::rng_for;

pub const CATEGORY_NAMES: [&str; 10] = [
    "car",
    "truck",
    "construction_vehicle",
    "bus",
    "trailer",
    "barrier",
    "motorcycle",
    "bicycle",
    "pedestrian",
    "traffic_cone",
];
const BACKGROUND_MIX: [f64; 10] = [0.35, 0.08, 0.02, 0.03, 0.03, 0.15, 0.03, 0.03, 0.15, 0.13];
const HOTSPOT_MIX: [f64; 10] = [0.25, 0.03, 0.01, 0.06, 0.01, 0.08, 0.05, 0.06, 0.35, 0.10];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Hotspot {
    pub center: [f64; 2],
    pub radius: f64,
    /// Speed divisor inside the hotspot, at least 1.
    pub slowdown: f64,
    /// Extra expected boxes per frame inside the hotspot.
    pub box_boost: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrajectoryConfig {
    pub num_streams: usize,
    pub duration_s: f64,
    pub sample_rate_hz: f64,
    pub base_speed_mps: f64,
    /// Side length of the square road grid in meters.
    pub extent_m: f64,
    /// Number of road blocks along each side of the grid.
    pub road_blocks: usize,
    pub hotspots: Vec<Hotspot>,
    /// Chance that a stream starts by re-driving an earlier stream's route.
    pub revisit_probability: f64,
    /// Expected boxes per frame outside hotspots.
    pub base_boxes: f64,
    pub num_areas: usize,
    pub num_categories: usize,
    pub feature_dim: usize,
    pub seed: u64,
}

impl Default for TrajectoryConfig {
    fn default() -> Self {
        TrajectoryConfig::standard_hotspot(0)
    }
}

impl TrajectoryConfig {
    /// The reference scenario: 20 streams of 4 minutes at 2 Hz on a 2 km grid
    /// with four slow, crowded junctions.
    pub fn standard_hotspot(seed: u64) -> Self {
        let hotspot = |x: f64, y: f64| Hotspot {
            center: [x, y],
            radius: 120.0,
            slowdown: 4.0,
            box_boost: 20.0,
        };
        TrajectoryConfig {
            num_streams: 20,
            duration_s: 240.0,
            sample_rate_hz: 2.0,
            base_speed_mps: 10.0,
            extent_m: 2000.0,
            road_blocks: 5,
            hotspots: vec![hotspot(800.0, 800.0), hotspot(1200.0, 1200.0), hotspot(400.0, 1600.0), hotspot(1600.0, 400.0)],
            revisit_probability: 0.3,
            base_boxes: 6.0,
            num_areas: 1,
            num_categories: 10,
            feature_dim: 8,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::config(name, "must be positive"))
            }
        };
        if self.num_streams == 0 {
            return Err(Error::config("num_streams", "must be at least 1"));
        }
        positive("duration_s", self.duration_s)?;
        positive("sample_rate_hz", self.sample_rate_hz)?;
        positive("base_speed_mps", self.base_speed_mps)?;
        positive("extent_m", self.extent_m)?;
        if self.road_blocks == 0 {
            return Err(Error::config("road_blocks", "must be at least 1"));
        }
        if !(0.0..=1.0).contains(&self.revisit_probability) {
            return Err(Error::config("revisit_probability", "must be in [0, 1]"));
        }
        if !(self.base_boxes.is_finite() && self.base_boxes >= 0.0) {
            return Err(Error::config("base_boxes", "must be non-negative"));
        }
        if self.num_areas == 0 {
            return Err(Error::config("num_areas", "must be at least 1"));
        }
        if self.num_categories == 0 {
            return Err(Error::config("num_categories", "must be at least 1"));
        }
        for h in &self.hotspots {
            positive("hotspots.radius", h.radius)?;
            if !(h.slowdown.is_finite() && h.slowdown >= 1.0) {
                return Err(Error::config("hotspots.slowdown", "must be >= 1"));
            }
            if !(h.box_boost.is_finite() && h.box_boost >= 0.0) {
                return Err(Error::config("hotspots.box_boost", "must be non-negative"));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: TrajectoryConfig = serde_json::from_str(text).map_err(|e| Error::config("scenario", e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    /// Index of the hotspot covering `p`; the slowest one wins where they overlap.
    pub fn hotspot_at(&self, p: [f64; 2]) -> Option<usize> {
        self.hotspots
            .iter()
            .enumerate()
            .filter(|(_, h)| (p[0] - h.center[0]).hypot(p[1] - h.center[1]) <= h.radius)
            .max_by(|(_, a), (_, b)| a.slowdown.total_cmp(&b.slowdown))
            .map(|(i, _)| i)
    }

    fn samples_per_stream(&self) -> usize {
        (self.duration_s * self.sample_rate_hz).floor() as usize
    }

    pub fn category_names(&self) -> Vec<String> {
        if self.num_categories == CATEGORY_NAMES.len() {
            CATEGORY_NAMES.iter().map(|s| s.to_string()).collect()
        } else {
            (0..self.num_categories).map(|k| format!("category_{k}")).collect()
        }
    }
}

/// Walks a route over grid junctions, yielding positions at requested arc
/// lengths. The route grows lazily as a non-backtracking random walk.
struct RouteWalker {
    junctions: Vec<[usize; 2]>,
    spacing: f64,
    blocks: usize,
    segment: usize,
    offset: f64,
}

impl RouteWalker {
    fn new(start: [usize; 2], spacing: f64, blocks: usize) -> Self {
        RouteWalker {
            junctions: vec![start],
            spacing,
            blocks,
            segment: 0,
            offset: 0.0,
        }
    }

    fn from_route(route: &[[usize; 2]], spacing: f64, blocks: usize) -> Self {
        RouteWalker {
            junctions: route.to_vec(),
            spacing,
            blocks,
            segment: 0,
            offset: 0.0,
        }
    }

    fn extend<R: Rng>(&mut self, rng: &mut R) {
        let cur = *self.junctions.last().unwrap();
        let prev = self.junctions.len().checked_sub(2).map(|i| self.junctions[i]);
        let b = self.blocks as isize;
        let mut options: Vec<[usize; 2]> = [(1, 0), (-1, 0), (0, 1), (0, -1)]
            .iter()
            .map(|(dx, dy)| (cur[0] as isize + dx, cur[1] as isize + dy))
            .filter(|&(x, y)| (0..=b).contains(&x) && (0..=b).contains(&y))
            .map(|(x, y)| [x as usize, y as usize])
            .collect();
        if options.len() > 1 {
            options.retain(|o| Some(*o) != prev);
        }
        let next = options[rng.random_range(0..options.len())];
        self.junctions.push(next);
    }

    fn point(&self, j: [usize; 2]) -> [f64; 2] {
        [j[0] as f64 * self.spacing, j[1] as f64 * self.spacing]
    }

    fn position<R: Rng>(&mut self, rng: &mut R) -> [f64; 2] {
        while self.segment + 1 >= self.junctions.len() {
            self.extend(rng);
        }
        let a = self.point(self.junctions[self.segment]);
        let b = self.point(self.junctions[self.segment + 1]);
        let f = self.offset / self.spacing;
        [a[0] + (b[0] - a[0]) * f, a[1] + (b[1] - a[1]) * f]
    }

    fn advance(&mut self, mut step: f64) {
        while step > 0.0 {
            let left = self.spacing - self.offset;
            if step < left {
                self.offset += step;
                return;
            }
            step -= left;
            self.segment += 1;
            self.offset = 0.0;
        }
    }
}

/// One generated frame together with its arc length along the stream's route.
pub(crate) struct GeneratedFrame {
    pub record: SampleRecord,
    #[cfg_attr(not(test), allow(dead_code))]
    pub arc_length: f64,
}

pub fn generate_trajectories(config: &TrajectoryConfig) -> Result<DatasetManifest> {
    let frames = generate_frames(config)?;
    DatasetManifest::new(frames.into_iter().map(|f| f.record).collect(), format!("synthetic:seed={}", config.seed))
}

pub(crate) fn generate_frames(config: &TrajectoryConfig) -> Result<Vec<GeneratedFrame>> {
    config.validate()?;
    let spacing = config.extent_m / config.road_blocks as f64;
    let names = config.category_names();
    let mix = |weights: &[f64; 10]| {
        if config.num_categories == 10 {
            WeightedIndex::new(weights).expect("static weights")
        } else {
            WeightedIndex::new(vec![1.0; config.num_categories]).expect("uniform weights")
        }
    };
    let (background_mix, hotspot_mix) = (mix(&BACKGROUND_MIX), mix(&HOTSPOT_MIX));
    let noise = Normal::new(0.0, 0.05).expect("valid sigma");
    let max_boost = config.hotspots.iter().map(|h| h.box_boost).fold(0.0, f64::max);
    let box_scale = (config.base_boxes + max_boost).max(1.0);

    let mut routes: Vec<(usize, Vec<[usize; 2]>)> = Vec::new();
    let mut out = Vec::with_capacity(config.num_streams * config.samples_per_stream());
    for stream in 0..config.num_streams {
        let mut rng = rng_for(config.seed, 1000 + stream as u64);
        let area = stream % config.num_areas;
        let earlier: Vec<&Vec<[usize; 2]>> = routes.iter().filter(|(a, _)| *a == area).map(|(_, r)| r).collect();
        let mut walker = if !earlier.is_empty() && rng.random_bool(config.revisit_probability) {
            let mut route = earlier[rng.random_range(0..earlier.len())].clone();
            if rng.random_bool(0.5) {
                route.reverse();
            }
            RouteWalker::from_route(&route, spacing, config.road_blocks)
        } else {
            let start = [rng.random_range(0..=config.road_blocks), rng.random_range(0..=config.road_blocks)];
            RouteWalker::new(start, spacing, config.road_blocks)
        };
        let t0 = (rng.random_range(0.0f64..86_400.0) * 1000.0).round() / 1000.0;
        let mut arc = 0.0;
        for k in 0..config.samples_per_stream() {
            let pos = walker.position(&mut rng);
            let hotspot = config.hotspot_at(pos).map(|i| &config.hotspots[i]);
            let (slowdown, boost, cats) = match hotspot {
                Some(h) => (h.slowdown, h.box_boost, &hotspot_mix),
                None => (1.0, 0.0, &background_mix),
            };
            let lambda = config.base_boxes + boost;
            let num_boxes = if lambda > 0.0 {
                Poisson::new(lambda).expect("positive rate").sample(&mut rng) as u32
            } else {
                0
            };
            let mut histogram = BTreeMap::new();
            for _ in 0..num_boxes {
                *histogram.entry(names[cats.sample(&mut rng)].clone()).or_insert(0u32) += 1;
            }
            let uncertainty = (1.0 - (-(num_boxes as f64) / 10.0).exp() + noise.sample(&mut rng)).clamp(0.0, 1.0);
            let mut feature = Vec::with_capacity(config.feature_dim);
            let embed = [pos[0] / config.extent_m, pos[1] / config.extent_m, num_boxes as f64 / box_scale];
            for d in 0..config.feature_dim {
                let base = embed.get(d).copied().unwrap_or(0.0);
                feature.push(base + noise.sample(&mut rng));
            }

            let mut record = SampleRecord::new(
                format!("s{stream:03}_{k:05}"),
                stream as i64,
                t0 + k as f64 / config.sample_rate_hz,
                pos,
                area as i64,
                num_boxes,
            );
            record.uncertainty = Some(uncertainty);
            record.category_histogram = Some(histogram);
            if config.feature_dim > 0 {
                record.feature = Some(feature);
            }
            out.push(GeneratedFrame { record, arc_length: arc });

            let step = config.base_speed_mps / (config.sample_rate_hz * slowdown);
            walker.advance(step);
            arc += step;
        }
        let used = walker.segment + 2;
        routes.push((area, walker.junctions[..used.min(walker.junctions.len())].to_vec()));
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    pub frames: usize,
    pub boxes: u64,
    pub category_histogram: BTreeMap<String, u64>,
    /// Mean distance (m) from each selected sample to its nearest selected
    /// neighbor in the same area.
    pub dispersion: f64,
    /// Fraction of the manifest's streams with at least one selected sample.
    pub stream_coverage: f64,
}

pub fn evaluate_selection<S: AsRef<str>>(manifest: &DatasetManifest, ids: &[S]) -> Result<CoverageReport> {
    let mut indices = Vec::with_capacity(ids.len());
    for id in ids {
        let id = id.as_ref();
        indices.push(manifest.index_of(id).ok_or_else(|| Error::UnknownId(id.to_string()))?);
    }
    let selected: Vec<&SampleRecord> = indices.iter().map(|&i| manifest.get(i)).collect();
    let mut category_histogram = BTreeMap::new();
    for s in &selected {
        for (k, v) in s.category_histogram.iter().flatten() {
            *category_histogram.entry(k.clone()).or_insert(0u64) += *v as u64;
        }
    }
    let all_streams: BTreeSet<i64> = manifest.samples().iter().map(|s| s.stream_id).collect();
    let touched: BTreeSet<i64> = selected.iter().map(|s| s.stream_id).collect();
    Ok(CoverageReport {
        frames: selected.len(),
        boxes: selected.iter().map(|s| s.num_boxes as u64).sum(),
        category_histogram,
        dispersion: dispersion(&selected),
        stream_coverage: touched.len() as f64 / all_streams.len() as f64,
    })
}

fn dispersion(selected: &[&SampleRecord]) -> f64 {
    let mut by_area: BTreeMap<i64, Vec<[f64; 2]>> = BTreeMap::new();
    for s in selected {
        by_area.entry(s.area_id).or_default().push(s.location);
    }
    let mut total = 0.0;
    let mut count = 0usize;
    for mut pts in by_area.into_values() {
        if pts.len() < 2 {
            continue;
        }
        pts.sort_by(|a, b| a[0].total_cmp(&b[0]));
        for i in 0..pts.len() {
            let mut best = f64::INFINITY;
            for j in (0..i).rev() {
                if pts[i][0] - pts[j][0] >= best {
                    break;
                }
                best = best.min((pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]));
            }
            for j in i + 1..pts.len() {
                if pts[j][0] - pts[i][0] >= best {
                    break;
                }
                best = best.min((pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]));
            }
            total += best;
            count += 1;
        }
    }
    if count == 0 {
        0.0
    } else {
        total / count as f64
    }
}
