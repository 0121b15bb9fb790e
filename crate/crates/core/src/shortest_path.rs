//! Source-to-sink shortest paths on a [`LayeredDag`].
//!
//! [`shortest_anchor_path`] is the reaching algorithm for DAGs: every vertex
//! starts at distance `+inf` except the source, and vertices are scanned in a
//! topological order, relaxing each outgoing edge with
//! `if dist(v) > dist(u) + w(u, v)`. Scanning the source, then the layers in
//! order (ascending index within a layer), then the sink is a topological
//! order by construction, even when model inputs repeat an `x` value. Every
//! edge is relaxed exactly once, so the cost is `O(|E|)`.
//!
//! The strict comparison keeps the first predecessor found among equal
//! distances, which makes the result deterministic.

use crate::error::{Error, Result};
use crate::graph::{LayeredDag, Vertex};

/// One anchor per layer and the total cost of the path through them.
#[derive(Clone, Debug, PartialEq)]
pub struct AnchorPath {
    pub anchors: Vec<usize>,
    pub total_cost: f64,
}

/// Largest number of paths [`brute_force_shortest`] will enumerate.
pub const ENUMERATION_CAP: u128 = 1_000_000;

/// Counters from a run of the reaching algorithm.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ReachingStats {
    pub relaxations: usize,
}

pub fn shortest_anchor_path<G: LayeredDag + ?Sized>(g: &G) -> AnchorPath {
    shortest_anchor_path_with_stats(g).0
}

pub fn shortest_anchor_path_with_stats<G: LayeredDag + ?Sized>(g: &G) -> (AnchorPath, ReachingStats) {
    let layers = g.layers();
    assert!(
        !layers.is_empty() && layers.iter().all(|l| !l.is_empty()),
        "layered graph must have non-empty layers"
    );
    let n = layers.iter().flatten().copied().max().unwrap_or(0) + 1;
    let mut dist = vec![f64::INFINITY; n];
    let mut pred: Vec<Option<usize>> = vec![None; n];
    let mut stats = ReachingStats::default();

    for &v in &layers[0] {
        stats.relaxations += 1;
        let cand = g.weight(Vertex::Source, Vertex::Node(v));
        if dist[v] > cand {
            dist[v] = cand;
        }
    }
    for pair in layers.windows(2) {
        for &u in &pair[0] {
            for &v in &pair[1] {
                stats.relaxations += 1;
                let cand = dist[u] + g.weight(Vertex::Node(u), Vertex::Node(v));
                if dist[v] > cand {
                    dist[v] = cand;
                    pred[v] = Some(u);
                }
            }
        }
    }
    let mut sink_dist = f64::INFINITY;
    let mut sink_pred = None;
    for &u in layers.last().expect("non-empty") {
        stats.relaxations += 1;
        let cand = dist[u] + g.weight(Vertex::Node(u), Vertex::Sink);
        if sink_dist > cand {
            sink_dist = cand;
            sink_pred = Some(u);
        }
    }

    let mut anchors = Vec::with_capacity(layers.len());
    let mut cur = sink_pred;
    while let Some(u) = cur {
        anchors.push(u);
        cur = pred[u];
    }
    anchors.reverse();
    debug_assert_eq!(anchors.len(), layers.len());
    (AnchorPath { anchors, total_cost: sink_dist }, stats)
}

/// Cost of the path `source -> anchors[0] -> ... -> anchors[m-1] -> sink`,
/// summed from the source.
pub fn path_cost<G: LayeredDag + ?Sized>(g: &G, anchors: &[usize]) -> f64 {
    let mut cost = 0.0;
    let mut prev = Vertex::Source;
    for &a in anchors {
        cost += g.weight(prev, Vertex::Node(a));
        prev = Vertex::Node(a);
    }
    cost + g.weight(prev, Vertex::Sink)
}

/// Exhaustive search over every anchor combination.
///
/// Ties go to the lexicographically smallest anchor sequence (combinations
/// are visited in that order and only a strictly cheaper path replaces the
/// incumbent). Refuses graphs with more than [`ENUMERATION_CAP`] paths.
pub fn brute_force_shortest<G: LayeredDag + ?Sized>(g: &G) -> Result<AnchorPath> {
    let paths = g.path_count();
    if paths > ENUMERATION_CAP {
        return Err(Error::TooManyPaths { paths, cap: ENUMERATION_CAP });
    }
    let layers = g.layers();
    if layers.is_empty() || layers.iter().any(Vec::is_empty) {
        return Err(Error::invalid("layered graph has an empty layer"));
    }
    let mut choice = vec![0usize; layers.len()];
    let mut anchors: Vec<usize> = layers.iter().map(|l| l[0]).collect();
    let mut best = AnchorPath { total_cost: path_cost(g, &anchors), anchors: anchors.clone() };
    // Odometer over layer positions, last layer fastest.
    loop {
        let mut k = layers.len();
        loop {
            if k == 0 {
                return Ok(best);
            }
            k -= 1;
            choice[k] += 1;
            if choice[k] < layers[k].len() {
                break;
            }
            choice[k] = 0;
        }
        for (j, &c) in choice.iter().enumerate().skip(k) {
            anchors[j] = layers[j][c];
        }
        let cost = path_cost(g, &anchors);
        if cost < best.total_cost {
            best = AnchorPath { anchors: anchors.clone(), total_cost: cost };
        }
    }
}
