mod common;

use std::collections::BTreeMap;

use common::oracles::{outcome, run_strategies};
use common::spearman;
use divsel::config::{RunConfig, Strategy};
use divsel::manifest::to_csv_string;
use divsel::run_schedule;
use divsel::simharness::{evaluate_selection, generate_trajectories, TrajectoryConfig};
use divsel::DatasetManifest;

/// Along-track sampling density: samples of the same stream within `radius`
/// meters of each sample. Overlap between different streams is left out.
fn local_density(manifest: &DatasetManifest, radius: f64) -> Vec<f64> {
    let s = manifest.samples();
    let mut by_stream: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, x) in s.iter().enumerate() {
        by_stream.entry(x.stream_id).or_default().push(i);
    }
    let mut density = vec![0.0; s.len()];
    for members in by_stream.values() {
        for &i in members {
            density[i] = members
                .iter()
                .filter(|&&j| (s[i].location[0] - s[j].location[0]).hypot(s[i].location[1] - s[j].location[1]) <= radius)
                .count() as f64;
        }
    }
    density
}

#[test]
fn uncertainty_tracks_local_density() {
    for seed in 1..=3 {
        let manifest = generate_trajectories(&TrajectoryConfig::standard_hotspot(seed)).unwrap();
        let density = local_density(&manifest, 30.0);
        let uncertainty: Vec<f64> = manifest.samples().iter().map(|s| s.uncertainty.unwrap()).collect();
        let rho = spearman(&uncertainty, &density);
        assert!(rho > 0.5, "seed {seed}: spearman {rho}");
    }
}

#[test]
fn random_selection_matches_hotspot_shares() {
    let config = TrajectoryConfig::standard_hotspot(5);
    let manifest = generate_trajectories(&config).unwrap();
    let region = |i: usize| config.hotspot_at(manifest.get(i).location).map_or(0, |h| h + 1);
    let regions = config.hotspots.len() + 1;
    let mut share = vec![0.0; regions];
    for i in 0..manifest.len() {
        share[region(i)] += 1.0 / manifest.len() as f64;
    }
    let mut observed = vec![0.0; regions];
    for seed in 0..20 {
        let run = RunConfig {
            strategy: Strategy::Random,
            checkpoints: vec![50.0, 100.0, 200.0, 400.0],
            seed,
            ..Default::default()
        };
        for id in run_schedule(&manifest, &run).unwrap().selected_ids() {
            observed[region(manifest.index_of(&id).unwrap())] += 1.0;
        }
    }
    let total: f64 = observed.iter().sum();
    let chi2: f64 = observed.iter().zip(&share).map(|(o, p)| (o - total * p).powi(2) / (total * p)).sum();
    // 4 degrees of freedom, alpha = 0.001
    assert!(chi2 < 18.47, "chi-square {chi2}, observed {observed:?}, shares {share:?}");
}

#[test]
fn entropy_buys_fewer_frames_and_more_boxes_than_spatial() {
    for seed in 1..=3 {
        let manifest = generate_trajectories(&TrajectoryConfig::standard_hotspot(seed)).unwrap();
        let outcomes = run_strategies(&manifest, seed);
        let (entropy, spatial) = (outcome(&outcomes, "entropy"), outcome(&outcomes, "spatial"));
        assert!(entropy.frames < spatial.frames, "seed {seed}: {outcomes:?}");
        assert!(entropy.boxes > spatial.boxes, "seed {seed}: {outcomes:?}");
    }
}

#[test]
fn generation_is_deterministic_per_seed() {
    let a = generate_trajectories(&TrajectoryConfig::standard_hotspot(9)).unwrap();
    let b = generate_trajectories(&TrajectoryConfig::standard_hotspot(9)).unwrap();
    let c = generate_trajectories(&TrajectoryConfig::standard_hotspot(10)).unwrap();
    assert_eq!(to_csv_string(&a), to_csv_string(&b));
    assert_ne!(to_csv_string(&a), to_csv_string(&c));
    assert_eq!(a.len(), 20 * 240 * 2);
}

#[test]
fn hotspot_frames_are_busier() {
    let config = TrajectoryConfig::standard_hotspot(4);
    let manifest = generate_trajectories(&config).unwrap();
    let (mut inside, mut outside) = (Vec::new(), Vec::new());
    for s in manifest.samples() {
        match config.hotspot_at(s.location) {
            Some(_) => inside.push(s.num_boxes as f64),
            None => outside.push(s.num_boxes as f64),
        }
    }
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    assert!(!inside.is_empty());
    assert!(mean(&inside) > mean(&outside) + 10.0, "{} vs {}", mean(&inside), mean(&outside));
}

#[test]
fn coverage_counts_match_the_selection() {
    let manifest = generate_trajectories(&TrajectoryConfig::standard_hotspot(6)).unwrap();
    let run = RunConfig {
        strategy: Strategy::Random,
        checkpoints: vec![20.0, 40.0],
        seed: 3,
        ..Default::default()
    };
    let report = run_schedule(&manifest, &run).unwrap();
    let cov = evaluate_selection(&manifest, &report.selected_ids()).unwrap();
    assert_eq!(cov.frames, report.total_frames);
    assert_eq!(cov.boxes, report.total_boxes);
    assert_eq!(cov.category_histogram.values().sum::<u64>(), cov.boxes);
    assert!(cov.dispersion >= 0.0);
    assert!(cov.stream_coverage > 0.0 && cov.stream_coverage <= 1.0);
}
