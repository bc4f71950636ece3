use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::{RunConfig, Strategy};
use crate::manifest::{self, DatasetManifest};
use crate::metric::TermScales;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CycleKind {
    Init,
    Select,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub cycle: usize,
    pub kind: CycleKind,
    /// Cumulative budget this cycle fills up to.
    pub checkpoint: f64,
    /// Budget available to this cycle alone.
    pub budget: f64,
    pub feature_term: bool,
    pub ids: Vec<String>,
    pub frames: usize,
    pub boxes: u64,
    pub cost: f64,
    pub cumulative_cost: f64,
    pub exhausted: bool,
    /// The detector would be retrained on the labeled set after this cycle.
    pub retrain_after: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SelectionReport {
    pub version: String,
    pub strategy: Strategy,
    pub config: RunConfig,
    pub scales: TermScales,
    pub num_samples: usize,
    pub manifest_digest: String,
    /// Digest of the resolved config together with the manifest digest.
    pub run_hash: String,
    pub cycles: Vec<CycleReport>,
    pub total_frames: usize,
    pub total_boxes: u64,
    pub total_cost: f64,
}

impl SelectionReport {
    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// `cycle,sample_id` rows in selection order; cycle 0 is the initial set.
    pub fn ids_csv(&self) -> String {
        let mut out = String::from("cycle,sample_id\n");
        for c in &self.cycles {
            for id in &c.ids {
                let _ = writeln!(out, "{},{}", c.cycle, csv_field(id));
            }
        }
        out
    }

    /// Every selected id, in selection order.
    pub fn selected_ids(&self) -> Vec<String> {
        self.cycles.iter().flat_map(|c| c.ids.iter().cloned()).collect()
    }

    pub fn batches(&self) -> Vec<Vec<String>> {
        self.cycles.iter().map(|c| c.ids.clone()).collect()
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn hex(bytes: &[u8]) -> String {
    bytes.iter().fold(String::with_capacity(bytes.len() * 2), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

pub(crate) fn manifest_digest(manifest: &DatasetManifest) -> String {
    hex(&Sha256::digest(manifest::to_csv_string(manifest).as_bytes()))
}

pub(crate) fn run_hash(config: &RunConfig, manifest_digest: &str) -> String {
    let mut h = Sha256::new();
    h.update(serde_json::to_string(config).expect("config serializes").as_bytes());
    h.update(manifest_digest.as_bytes());
    hex(&h.finalize())
}
