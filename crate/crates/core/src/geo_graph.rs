//! KNN graph over sample locations and single-source manifold distances.
//!
//! Edge weights are squared Euclidean lengths, so a path length is the sum of
//! squared segment lengths. Only same-area samples are ever connected; pairs in
//! different areas or in different connected components get `large_constant`.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BinaryHeap};
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::manifest::{DatasetManifest, SampleRecord};

#[inline]
pub(crate) fn squared_distance(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    let dx = a[0] - b[0];
    let dy = a[1] - b[1];
    let dz = a[2] - b[2];
    dx * dx + dy * dy + dz * dz
}

/// Straight-line distance for same-area pairs, `large_constant` across areas.
pub fn euclidean_spatial_distance(a: &SampleRecord, b: &SampleRecord, large_constant: f64, use_elevation: bool) -> f64 {
    if a.area_id != b.area_id {
        return large_constant;
    }
    squared_distance(&a.position(use_elevation), &b.position(use_elevation)).sqrt()
}

/// Symmetric sparse graph in compressed adjacency form.
#[derive(Debug, Clone)]
pub struct KnnGraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    weights: Vec<f64>,
    area_of: Vec<i64>,
    large_constant: f64,
    k: usize,
}

impl KnnGraph {
    pub fn node_count(&self) -> usize {
        self.area_of.len()
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn large_constant(&self) -> f64 {
        self.large_constant
    }

    pub fn area_of(&self, node: usize) -> i64 {
        self.area_of[node]
    }

    pub fn neighbors(&self, node: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let range = self.offsets[node]..self.offsets[node + 1];
        self.targets[range.clone()].iter().map(|&t| t as usize).zip(self.weights[range].iter().copied())
    }

    /// Undirected edges `(i, j, w)` with `i < j`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.node_count()).flat_map(move |i| self.neighbors(i).filter(move |&(j, _)| i < j).map(move |(j, w)| (i, j, w)))
    }

    /// Debug dump as `i,j,w` CSV.
    pub fn write_edge_list(&self, path: impl AsRef<Path>) -> Result<()> {
        let mut out = String::from("i,j,w\n");
        for (i, j, w) in self.edges() {
            let _ = writeln!(out, "{i},{j},{w}");
        }
        std::fs::write(path.as_ref(), out).map_err(|e| Error::io(path.as_ref(), e))
    }
}

/// Exact K nearest same-area neighbors of every sample, ordered by
/// (squared distance, index).
pub fn nearest_neighbors(manifest: &DatasetManifest, k: usize, use_elevation: bool) -> Result<Vec<Vec<usize>>> {
    if k == 0 {
        return Err(Error::config("k", "must be at least 1"));
    }
    let mut by_area: BTreeMap<i64, Vec<usize>> = BTreeMap::new();
    for (i, s) in manifest.samples().iter().enumerate() {
        by_area.entry(s.area_id).or_default().push(i);
    }
    let positions: Vec<[f64; 3]> = manifest.samples().iter().map(|s| s.position(use_elevation)).collect();
    let mut lists = vec![Vec::new(); manifest.len()];
    for (area, members) in by_area {
        if members.len() <= k {
            return Err(Error::TooFewSamples {
                area,
                count: members.len(),
                k,
            });
        }
        let grid = Grid::new(&members, &positions);
        for &i in &members {
            lists[i] = grid.k_nearest(i, k, &positions);
        }
    }
    Ok(lists)
}

pub fn build_knn_graph(manifest: &DatasetManifest, k: usize, large_constant: f64, use_elevation: bool) -> Result<KnnGraph> {
    if !(large_constant > 0.0) {
        return Err(Error::config("large_constant", "must be positive"));
    }
    let lists = nearest_neighbors(manifest, k, use_elevation)?;
    let n = manifest.len();
    let positions: Vec<[f64; 3]> = manifest.samples().iter().map(|s| s.position(use_elevation)).collect();

    let mut adjacency: Vec<Vec<u32>> = vec![Vec::new(); n];
    for (i, list) in lists.iter().enumerate() {
        for &j in list {
            adjacency[i].push(j as u32);
            adjacency[j].push(i as u32);
        }
    }
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::new();
    let mut weights = Vec::new();
    offsets.push(0);
    for (i, adj) in adjacency.iter_mut().enumerate() {
        adj.sort_unstable();
        adj.dedup();
        for &j in adj.iter() {
            targets.push(j);
            weights.push(squared_distance(&positions[i], &positions[j as usize]));
        }
        offsets.push(targets.len());
    }
    Ok(KnnGraph {
        offsets,
        targets,
        weights,
        area_of: manifest.samples().iter().map(|s| s.area_id).collect(),
        large_constant,
        k,
    })
}

/// Shortest-path lengths from `source` to every node. Unreachable nodes,
/// including every node of another area, get the graph's large constant.
pub fn manifold_distances_from(graph: &KnnGraph, source: usize) -> Vec<f64> {
    let mut dist = manifold_distances_within(graph, source, f64::INFINITY);
    for d in &mut dist {
        if *d == f64::INFINITY {
            *d = graph.large_constant;
        }
    }
    dist
}

/// Like [`manifold_distances_from`], but stops expanding once path lengths
/// exceed `cutoff`. Nodes farther than `cutoff`, or unreachable, are reported
/// as `f64::INFINITY`. Distances that are reported are exact.
pub fn manifold_distances_within(graph: &KnnGraph, source: usize, cutoff: f64) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.node_count()];
    let mut settled = vec![false; graph.node_count()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(HeapEntry { dist: 0.0, node: source as u32 });
    while let Some(HeapEntry { dist: d, node }) = heap.pop() {
        let u = node as usize;
        if settled[u] {
            continue;
        }
        settled[u] = true;
        for (v, w) in graph.neighbors(u) {
            let nd = d + w;
            if nd < dist[v] && nd <= cutoff {
                dist[v] = nd;
                heap.push(HeapEntry { dist: nd, node: v as u32 });
            }
        }
    }
    dist
}

#[derive(Debug, Clone, Copy)]
struct HeapEntry {
    dist: f64,
    node: u32,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapEntry {}

impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapEntry {
    // reversed: BinaryHeap is a max-heap
    fn cmp(&self, other: &Self) -> Ordering {
        other.dist.total_cmp(&self.dist).then_with(|| other.node.cmp(&self.node))
    }
}

/// Uniform grid over the x/y plane of one area. Lookups expand square rings of
/// cells until no unvisited cell can hold a closer point.
struct Grid {
    min: [f64; 2],
    cell: f64,
    dims: [usize; 2],
    cells: Vec<Vec<usize>>,
}

impl Grid {
    fn new(members: &[usize], positions: &[[f64; 3]]) -> Self {
        let mut min = [f64::INFINITY; 2];
        let mut max = [f64::NEG_INFINITY; 2];
        for &i in members {
            for a in 0..2 {
                min[a] = min[a].min(positions[i][a]);
                max[a] = max[a].max(positions[i][a]);
            }
        }
        let extent = [(max[0] - min[0]).max(0.0), (max[1] - min[1]).max(0.0)];
        // about two points per cell for uniformly spread data
        let area = (extent[0] * extent[1]).max(extent[0].max(extent[1]).powi(2) / members.len() as f64);
        let mut cell = (2.0 * area / members.len() as f64).sqrt();
        if !(cell.is_finite() && cell > 0.0) {
            cell = 1.0;
        }
        let cap = 1 << 11;
        let dims = [
            ((extent[0] / cell) as usize + 1).min(cap),
            ((extent[1] / cell) as usize + 1).min(cap),
        ];
        let cell = cell.max(extent[0] / dims[0] as f64).max(extent[1] / dims[1] as f64);
        let mut grid = Grid {
            min,
            cell,
            dims,
            cells: vec![Vec::new(); dims[0] * dims[1]],
        };
        for &i in members {
            let (cx, cy) = grid.cell_of(&positions[i]);
            grid.cells[cy * dims[0] + cx].push(i);
        }
        grid
    }

    fn cell_of(&self, p: &[f64; 3]) -> (usize, usize) {
        let cx = (((p[0] - self.min[0]) / self.cell) as usize).min(self.dims[0] - 1);
        let cy = (((p[1] - self.min[1]) / self.cell) as usize).min(self.dims[1] - 1);
        (cx, cy)
    }

    fn k_nearest(&self, query: usize, k: usize, positions: &[[f64; 3]]) -> Vec<usize> {
        let q = &positions[query];
        let (cx, cy) = self.cell_of(q);
        let (cx, cy) = (cx as isize, cy as isize);
        let mut best: Vec<(f64, usize)> = Vec::with_capacity(k + 1);
        let max_ring = self.dims[0].max(self.dims[1]) as isize;
        for r in 0..=max_ring {
            for y in (cy - r)..=(cy + r) {
                if y < 0 || y >= self.dims[1] as isize {
                    continue;
                }
                let on_edge_row = y == cy - r || y == cy + r;
                let step = if on_edge_row { 1 } else { (2 * r).max(1) };
                let mut x = cx - r;
                while x <= cx + r {
                    if x >= 0 && x < self.dims[0] as isize {
                        for &j in &self.cells[y as usize * self.dims[0] + x as usize] {
                            if j == query {
                                continue;
                            }
                            push_bounded(&mut best, (squared_distance(q, &positions[j]), j), k);
                        }
                    }
                    x += step;
                }
            }
            // points in ring r+1 and beyond are at least r cells away in x or y
            if best.len() == k {
                let reach = r as f64 * self.cell;
                if best[k - 1].0 < reach * reach * (1.0 - 1e-9) {
                    break;
                }
            }
        }
        best.into_iter().map(|(_, j)| j).collect()
    }
}

fn push_bounded(best: &mut Vec<(f64, usize)>, item: (f64, usize), k: usize) {
    let less = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)) == Ordering::Less;
    if best.len() == k && !less(&item, &best[k - 1]) {
        return;
    }
    let pos = best.iter().position(|b| less(&item, b)).unwrap_or(best.len());
    best.insert(pos, item);
    best.truncate(k);
}
