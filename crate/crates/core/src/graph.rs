//! The layered matching graph.
//!
//! Every model run is assigned to the physical input nearest to it in `x`;
//! these clusters form the layers of a DAG. Edges run from every vertex of a
//! layer to every vertex of the next, from an artificial source into the
//! first layer, and from the last layer into an artificial sink. A
//! source-to-sink path therefore picks exactly one model run per physical
//! input.
//!
//! The weight of an edge `u -> v` between consecutive layers is
//!
//! ```text
//! w(u, v) = |y_model(u) - y_physical(layer of u)| + lambda * |theta(u) - theta(v)|
//! ```
//!
//! The first term rewards runs that reproduce the physical response; the
//! second penalizes jumps in the calibration parameter between neighbouring
//! anchors. Source and sink edges weigh zero.
//!
//! Edges are never stored: the layer structure and the weight function are
//! enough to enumerate them.

use crate::dataset::{ModelDataset, PhysicalDataset};
use crate::error::{Error, Result};
use crate::rng::Stream;

/// A vertex of a layered DAG.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vertex {
    Source,
    /// A model run, by its index in the model dataset.
    Node(usize),
    Sink,
}

/// A DAG whose inner vertices are split into ordered layers with complete
/// bipartite edges between consecutive layers.
pub trait LayeredDag {
    /// Inner vertices of every layer, each list in ascending index order.
    fn layers(&self) -> &[Vec<usize>];

    /// Weight of an edge. Callers only pass actual edges.
    fn weight(&self, from: Vertex, to: Vertex) -> f64;

    fn layer_count(&self) -> usize {
        self.layers().len()
    }

    /// `|E|`: products of consecutive layer sizes plus the source and sink fans.
    fn edge_count(&self) -> usize {
        let layers = self.layers();
        let inner: usize = layers.windows(2).map(|w| w[0].len() * w[1].len()).sum();
        inner + layers.first().map_or(0, Vec::len) + layers.last().map_or(0, Vec::len)
    }

    /// Number of distinct source-to-sink paths, `prod |C_j|`.
    fn path_count(&self) -> u128 {
        self.layers()
            .iter()
            .map(|l| l.len() as u128)
            .fold(1u128, |acc, k| acc.saturating_mul(k))
    }
}

/// A layered DAG with explicitly stored weights. Vertex `i` of layer `j`
/// gets a global index in layer order, so layer 0 holds `0..sizes[0]`.
#[derive(Clone, Debug)]
pub struct WeightTable {
    layers: Vec<Vec<usize>>,
    position: Vec<(usize, usize)>,
    source: Vec<f64>,
    inner: Vec<Vec<Vec<f64>>>,
    sink: Vec<f64>,
}

impl WeightTable {
    /// All-zero weights over layers of the given sizes.
    ///
    /// # Panics
    ///
    /// If `sizes` is empty or contains a zero.
    pub fn new(sizes: &[usize]) -> Self {
        assert!(!sizes.is_empty() && sizes.iter().all(|&s| s > 0), "layers must be non-empty");
        let mut layers = Vec::with_capacity(sizes.len());
        let mut position = Vec::new();
        for (j, &s) in sizes.iter().enumerate() {
            let start = position.len();
            layers.push((start..start + s).collect());
            position.extend((0..s).map(|a| (j, a)));
        }
        let inner = sizes.windows(2).map(|w| vec![vec![0.0; w[1]]; w[0]]).collect();
        Self {
            layers,
            position,
            source: vec![0.0; sizes[0]],
            inner,
            sink: vec![0.0; sizes[sizes.len() - 1]],
        }
    }

    /// Weights drawn uniformly from `[0, 1)`: source and sink fans stay zero
    /// unless `random_terminals` is set.
    pub fn random(sizes: &[usize], rng: &mut Stream, random_terminals: bool) -> Self {
        let mut t = Self::new(sizes);
        for row in t.inner.iter_mut().flatten() {
            row.iter_mut().for_each(|w| *w = rng.next_f64());
        }
        if random_terminals {
            t.source.iter_mut().for_each(|w| *w = rng.next_f64());
            t.sink.iter_mut().for_each(|w| *w = rng.next_f64());
        }
        t
    }

    pub fn set_source(&mut self, to: usize, w: f64) {
        self.source[to] = w;
    }

    /// Weight from position `from` of layer `layer` to position `to` of the next layer.
    pub fn set_inner(&mut self, layer: usize, from: usize, to: usize, w: f64) {
        self.inner[layer][from][to] = w;
    }

    pub fn set_sink(&mut self, from: usize, w: f64) {
        self.sink[from] = w;
    }
}

impl LayeredDag for WeightTable {
    fn layers(&self) -> &[Vec<usize>] {
        &self.layers
    }

    fn weight(&self, from: Vertex, to: Vertex) -> f64 {
        match (from, to) {
            (Vertex::Source, Vertex::Node(v)) => self.source[self.position[v].1],
            (Vertex::Node(u), Vertex::Sink) => self.sink[self.position[u].1],
            (Vertex::Node(u), Vertex::Node(v)) => {
                let (j, a) = self.position[u];
                self.inner[j][a][self.position[v].1]
            }
            _ => panic!("{from:?} -> {to:?} is not an edge"),
        }
    }
}

/// Assignment of model runs to physical inputs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClusterPartition {
    clusters: Vec<Vec<usize>>,
    cluster_of: Vec<usize>,
}

impl ClusterPartition {
    pub fn clusters(&self) -> &[Vec<usize>] {
        &self.clusters
    }

    /// Cluster of model run `i`.
    pub fn cluster_of(&self, i: usize) -> usize {
        self.cluster_of[i]
    }

    pub fn len(&self) -> usize {
        self.clusters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.clusters.is_empty()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(Vec::len).collect()
    }
}

/// Index of the sorted `xs` nearest to `x`; an exact tie goes to the
/// smaller index.
pub(crate) fn nearest_index(xs: &[f64], x: f64) -> usize {
    let hi = xs.partition_point(|&p| p < x);
    if hi == 0 {
        return 0;
    }
    if hi == xs.len() {
        return xs.len() - 1;
    }
    let lo = hi - 1;
    if (x - xs[lo]).abs() <= (xs[hi] - x).abs() {
        lo
    } else {
        hi
    }
}

/// Assigns each model run to the nearest physical input (ties go to the
/// smaller physical index). Fails if some physical input attracts no run.
pub fn assign_clusters(physical: &PhysicalDataset, model: &ModelDataset) -> Result<ClusterPartition> {
    let xs = physical.xs();
    let mut clusters = vec![Vec::new(); xs.len()];
    let cluster_of: Vec<usize> = model
        .points()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let j = nearest_index(&xs, p.x);
            clusters[j].push(i);
            j
        })
        .collect();
    if let Some(j) = clusters.iter().position(Vec::is_empty) {
        return Err(Error::EmptyCluster { cluster: j, x: xs[j] });
    }
    Ok(ClusterPartition { clusters, cluster_of })
}

/// Options that shape the edge weights.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WeightOptions {
    /// Smoothness weight on parameter jumps; zero is allowed.
    pub lambda: f64,
    /// Charge the last layer's response mismatch on its sink edges instead
    /// of leaving them at zero.
    pub terminal_response: bool,
}

impl WeightOptions {
    pub fn new(lambda: f64) -> Self {
        Self { lambda, terminal_response: false }
    }
}

/// The matching graph over a physical and a model dataset.
#[derive(Clone, Debug)]
pub struct LayeredGraph<'a> {
    physical: &'a PhysicalDataset,
    model: &'a ModelDataset,
    partition: ClusterPartition,
    options: WeightOptions,
}

impl<'a> LayeredGraph<'a> {
    pub fn partition(&self) -> &ClusterPartition {
        &self.partition
    }

    pub fn lambda(&self) -> f64 {
        self.options.lambda
    }

    pub fn options(&self) -> WeightOptions {
        self.options
    }

    pub fn physical(&self) -> &'a PhysicalDataset {
        self.physical
    }

    pub fn model(&self) -> &'a ModelDataset {
        self.model
    }

    /// Response mismatch of run `u` against its own cluster's physical response.
    fn response_gap(&self, u: usize) -> f64 {
        let j = self.partition.cluster_of[u];
        (self.model.points()[u].y - self.physical.points()[j].y).abs()
    }

    fn is_edge(&self, from: Vertex, to: Vertex) -> bool {
        let last = self.partition.len() - 1;
        match (from, to) {
            (Vertex::Source, Vertex::Node(v)) => self.partition.cluster_of[v] == 0,
            (Vertex::Node(u), Vertex::Sink) => self.partition.cluster_of[u] == last,
            (Vertex::Node(u), Vertex::Node(v)) => {
                self.partition.cluster_of[u] + 1 == self.partition.cluster_of[v]
            }
            _ => false,
        }
    }

    /// Weight of the edge `from -> to`.
    ///
    /// # Panics
    ///
    /// If `from -> to` is not an edge of the graph.
    pub fn edge_weight(&self, from: Vertex, to: Vertex) -> f64 {
        assert!(self.is_edge(from, to), "{from:?} -> {to:?} is not an edge");
        self.weight(from, to)
    }
}

impl LayeredDag for LayeredGraph<'_> {
    fn layers(&self) -> &[Vec<usize>] {
        &self.partition.clusters
    }

    fn weight(&self, from: Vertex, to: Vertex) -> f64 {
        match (from, to) {
            (Vertex::Node(u), Vertex::Node(v)) => {
                let pts = self.model.points();
                self.response_gap(u) + self.options.lambda * (pts[u].theta - pts[v].theta).abs()
            }
            (Vertex::Node(u), Vertex::Sink) if self.options.terminal_response => self.response_gap(u),
            _ => 0.0,
        }
    }
}

/// Clusters the model runs and wraps both datasets in a [`LayeredGraph`].
pub fn build_graph<'a>(
    physical: &'a PhysicalDataset,
    model: &'a ModelDataset,
    options: WeightOptions,
) -> Result<LayeredGraph<'a>> {
    if !(options.lambda >= 0.0 && options.lambda.is_finite()) {
        return Err(Error::invalid(format!(
            "lambda must be finite and >= 0, got {}",
            options.lambda
        )));
    }
    model.check_covers(physical)?;
    let partition = assign_clusters(physical, model)?;
    Ok(LayeredGraph { physical, model, partition, options })
}
