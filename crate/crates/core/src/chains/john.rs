use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::{ChainDecomposition, ChainKind};
use crate::dyadic::{WhitneyCover, DILATION};
use crate::error::{Error, Result};
use crate::geometry::Point;

#[derive(PartialEq)]
struct Entry {
    cost: f64,
    node: usize,
}

impl Eq for Entry {}

impl Ord for Entry {
    fn cmp(&self, o: &Self) -> Ordering {
        // min-heap on cost, ties by index
        o.cost.total_cmp(&self.cost).then_with(|| o.node.cmp(&self.node))
    }
}

impl PartialOrd for Entry {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}

/// Whitney chains from a central cube: shortest paths in the graph of
/// cubes whose dilations overlap, with edge weight 1/ℓ(smaller cube).
///
/// The root is the cube containing `center` when given, else the cube of
/// maximal boundary distance (first in cube order on ties).
pub fn build_john_chains(cover: &WhitneyCover, center: Option<Point>) -> Result<ChainDecomposition> {
    if cover.is_empty() {
        return Err(Error::Resolution("empty Whitney cover".into()));
    }
    let root = match center {
        Some(c) => cover
            .locate(c)
            .ok_or_else(|| Error::Lookup(format!("no Whitney cube contains {c:?}")))?,
        None => {
            let mut best = 0;
            for (i, c) in cover.cubes.iter().enumerate() {
                if c.dist_center > cover.cubes[best].dist_center {
                    best = i;
                }
            }
            best
        }
    };
    let n = cover.len();
    let adj: Vec<Vec<usize>> = {
        use rayon::prelude::*;
        (0..n).into_par_iter().map(|i| cover.dilated_neighbors(i)).collect()
    };
    let mut dist = vec![f64::INFINITY; n];
    let mut prev = vec![usize::MAX; n];
    dist[root] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Entry { cost: 0.0, node: root });
    while let Some(Entry { cost, node }) = heap.pop() {
        if cost > dist[node] {
            continue;
        }
        let ln = cover.side(&cover.cubes[node].cube);
        for &m in &adj[node] {
            let lm = cover.side(&cover.cubes[m].cube);
            let c = cost + 1.0 / ln.min(lm);
            if c < dist[m] || (c == dist[m] && node < prev[m]) {
                dist[m] = c;
                prev[m] = node;
                heap.push(Entry { cost: c, node: m });
            }
        }
    }
    if let Some(i) = dist.iter().position(|d| d.is_infinite()) {
        return Err(Error::Resolution(format!(
            "Whitney adjacency graph is disconnected at j_max = {} (cube {:?} unreachable)",
            cover.j_max, cover.cubes[i].cube
        )));
    }
    let frame = cover.frame;
    let mut overlap = f64::INFINITY;
    let mut chains = Vec::with_capacity(n);
    for i in 0..n {
        let mut path = vec![i];
        let mut v = i;
        while v != root {
            v = prev[v];
            path.push(v);
        }
        path.reverse();
        for w in path.windows(2) {
            let a = frame.cube_box(&cover.cubes[w[0]].cube).dilate(DILATION);
            let b = frame.cube_box(&cover.cubes[w[1]].cube).dilate(DILATION);
            overlap = overlap.min(a.overlap_area(&b) / a.area().max(b.area()));
        }
        chains.push(path.into_iter().map(|k| cover.cubes[k].cube).collect());
    }
    let targets = cover.cubes.iter().map(|c| c.cube).collect();
    Ok(ChainDecomposition::new(
        ChainKind::John,
        frame,
        cover.cubes[root].cube,
        targets,
        chains,
        Some(if overlap.is_finite() { overlap } else { 1.0 }),
    ))
}
