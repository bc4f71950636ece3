//! Runs every strategy on the standard hotspot scenario and prints frame,
//! box and dispersion numbers per seed.
//!
//! cargo run --release --example strategy_comparison -- 1 2 3

use std::time::Instant;

use divsel::config::{RunConfig, Strategy};
use divsel::metric::DistanceTermConfig;
use divsel::run_schedule;
use divsel::simharness::{evaluate_selection, generate_trajectories, TrajectoryConfig};

fn config(strategy: Strategy, lambda_s: f64, lambda_t: f64, seed: u64) -> RunConfig {
    RunConfig {
        strategy,
        distance: DistanceTermConfig { lambda_s, lambda_t, lambda_f: 0.0, ..Default::default() },
        checkpoints: vec![50.0, 100.0, 200.0, 400.0],
        seed,
        ..Default::default()
    }
}

fn main() {
    let seeds: Vec<u64> = std::env::args().skip(1).map(|s| s.parse().expect("seed")).collect();
    let seeds = if seeds.is_empty() { vec![1, 2, 3] } else { seeds };
    println!("seed,strategy,frames,boxes,cost,dispersion,stream_coverage,seconds");
    for seed in seeds {
        let manifest = generate_trajectories(&TrajectoryConfig::standard_hotspot(seed)).expect("scenario");
        let runs = [
            ("random", config(Strategy::Random, 1.0, 1.0, seed)),
            ("entropy", config(Strategy::Entropy, 1.0, 1.0, seed)),
            ("spatial", config(Strategy::Diversity, 1.0, 0.0, seed)),
            ("spa_temp", config(Strategy::Diversity, 1.0, 1.0, seed)),
        ];
        for (label, cfg) in runs {
            let start = Instant::now();
            let report = run_schedule(&manifest, &cfg).expect("run");
            let cov = evaluate_selection(&manifest, &report.selected_ids()).expect("coverage");
            println!(
                "{seed},{label},{},{},{:.2},{:.2},{:.2},{:.2}",
                cov.frames,
                cov.boxes,
                report.total_cost,
                cov.dispersion,
                cov.stream_coverage,
                start.elapsed().as_secs_f64()
            );
        }
    }
}
