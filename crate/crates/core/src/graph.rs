//! Network topology and combination weights.
//!
//! Neighborhoods are self-inclusive: `k ∈ N_k`, and `|N_k|` counts the node
//! itself. The Metropolis self-weight `1 - Σ_{l ∈ N_k \ {k}} a_kl` relies on
//! that convention.

use std::collections::{BTreeSet, VecDeque};

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scalar::Weight;

/// Retry bound for seeded random-graph generation.
pub const MAX_RANDOM_ATTEMPTS: usize = 1000;

/// Description of a topology, as found in experiment config files.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TopologySpec {
    Explicit {
        nodes: usize,
        edges: Vec<[usize; 2]>,
    },
    /// Erdős–Rényi `G(nodes, edge_probability)`, resampled until connected.
    Random {
        nodes: usize,
        edge_probability: f64,
        seed: u64,
    },
}

impl TopologySpec {
    pub fn num_nodes(&self) -> usize {
        match self {
            TopologySpec::Explicit { nodes, .. } | TopologySpec::Random { nodes, .. } => *nodes,
        }
    }
}

/// Undirected connected graph without self-loops.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Topology {
    num_nodes: usize,
    edges: BTreeSet<(usize, usize)>,
    neighborhoods: Vec<Vec<usize>>,
}

impl Topology {
    /// Builds a topology from an explicit edge list, rejecting self-loops,
    /// out-of-range endpoints and disconnected graphs.
    pub fn from_edges(num_nodes: usize, edges: &[[usize; 2]]) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::Topology("node count must be positive".into()));
        }
        let mut set = BTreeSet::new();
        for &[a, b] in edges {
            if a >= num_nodes || b >= num_nodes {
                return Err(Error::Topology(format!(
                    "edge ({a}, {b}) references a node >= {num_nodes}"
                )));
            }
            if a == b {
                return Err(Error::Topology(format!("self-loop on node {a}")));
            }
            set.insert((a.min(b), a.max(b)));
        }
        let t = Self::from_edge_set(num_nodes, set);
        if let Some(node) = t.first_unreachable() {
            return Err(Error::Topology(format!(
                "graph is disconnected: node {node} is unreachable from node 0"
            )));
        }
        Ok(t)
    }

    /// Seeded `G(n, p)` graph. Attempts draw successively from one ChaCha20
    /// stream, so the result is a pure function of the arguments.
    pub fn random(num_nodes: usize, edge_probability: f64, seed: u64) -> Result<Self> {
        if num_nodes == 0 {
            return Err(Error::Topology("node count must be positive".into()));
        }
        if !(0.0..=1.0).contains(&edge_probability) {
            return Err(Error::Topology(format!(
                "edge probability {edge_probability} outside [0, 1]"
            )));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        for _ in 0..MAX_RANDOM_ATTEMPTS {
            let mut set = BTreeSet::new();
            for a in 0..num_nodes {
                for b in a + 1..num_nodes {
                    if rng.random::<f64>() < edge_probability {
                        set.insert((a, b));
                    }
                }
            }
            let t = Self::from_edge_set(num_nodes, set);
            if t.first_unreachable().is_none() {
                return Ok(t);
            }
        }
        Err(Error::Topology(format!(
            "no connected graph with {num_nodes} nodes and p = {edge_probability} \
             after {MAX_RANDOM_ATTEMPTS} attempts"
        )))
    }

    pub fn build(spec: &TopologySpec) -> Result<Self> {
        match spec {
            TopologySpec::Explicit { nodes, edges } => Self::from_edges(*nodes, edges),
            TopologySpec::Random {
                nodes,
                edge_probability,
                seed,
            } => Self::random(*nodes, *edge_probability, *seed),
        }
    }

    /// Path graph `0 - 1 - ... - (n-1)`.
    pub fn line(num_nodes: usize) -> Result<Self> {
        let edges: Vec<_> = (1..num_nodes).map(|k| [k - 1, k]).collect();
        Self::from_edges(num_nodes, &edges)
    }

    pub fn complete(num_nodes: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for a in 0..num_nodes {
            for b in a + 1..num_nodes {
                edges.push([a, b]);
            }
        }
        Self::from_edges(num_nodes, &edges)
    }

    fn from_edge_set(num_nodes: usize, edges: BTreeSet<(usize, usize)>) -> Self {
        let mut neighborhoods: Vec<Vec<usize>> = (0..num_nodes).map(|k| vec![k]).collect();
        for &(a, b) in &edges {
            neighborhoods[a].push(b);
            neighborhoods[b].push(a);
        }
        for n in &mut neighborhoods {
            n.sort_unstable();
        }
        Topology {
            num_nodes,
            edges,
            neighborhoods,
        }
    }

    fn first_unreachable(&self) -> Option<usize> {
        let mut seen = vec![false; self.num_nodes];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        while let Some(k) = queue.pop_front() {
            for &l in &self.neighborhoods[k] {
                if !seen[l] {
                    seen[l] = true;
                    queue.push_back(l);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    pub fn num_nodes(&self) -> usize {
        self.num_nodes
    }

    /// Edges as `(min, max)` pairs in ascending order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_list(&self) -> Vec<[usize; 2]> {
        self.edges.iter().map(|&(a, b)| [a, b]).collect()
    }

    /// Self-inclusive, sorted neighborhood `N_k`.
    pub fn neighborhood(&self, k: usize) -> &[usize] {
        &self.neighborhoods[k]
    }

    /// `|N_k|`, counting `k` itself.
    pub fn degree(&self, k: usize) -> usize {
        self.neighborhoods[k].len()
    }

    pub fn is_neighbor(&self, k: usize, l: usize) -> bool {
        self.neighborhoods[k].binary_search(&l).is_ok()
    }
}

/// Row-stochastic `K x K` combination matrix supported on neighborhoods.
#[derive(Clone, Debug, PartialEq)]
pub struct CombinationMatrix<T: Weight> {
    weights: DMatrix<T>,
}

impl<T: Weight> CombinationMatrix<T> {
    /// Metropolis rule: `a_kl = 1 / max(|N_k|, |N_l|)` for neighbors `l != k`,
    /// self-weight takes the remainder.
    pub fn metropolis(t: &Topology) -> Self {
        let n = t.num_nodes();
        let mut weights = DMatrix::from_element(n, n, T::zero());
        for k in 0..n {
            let mut off_diagonal = T::zero();
            for &l in t.neighborhood(k).iter().filter(|&&l| l != k) {
                let w = T::reciprocal_of(t.degree(k).max(t.degree(l)));
                weights[(k, l)] = w;
                off_diagonal += w;
            }
            weights[(k, k)] = T::one() - off_diagonal;
        }
        CombinationMatrix { weights }
    }

    pub fn identity(num_nodes: usize) -> Self {
        CombinationMatrix {
            weights: DMatrix::identity(num_nodes, num_nodes),
        }
    }

    /// Wraps an arbitrary matrix after checking it is square, nonnegative and
    /// row-stochastic within `tolerance`.
    pub fn new(weights: DMatrix<T>, tolerance: T) -> Result<Self> {
        if !weights.is_square() {
            return Err(Error::InvalidArgument(format!(
                "combination matrix must be square, got {}x{}",
                weights.nrows(),
                weights.ncols()
            )));
        }
        if weights.iter().any(|w| *w < T::zero()) {
            return Err(Error::InvalidArgument(
                "combination weights must be nonnegative".into(),
            ));
        }
        for (k, row) in weights.row_iter().enumerate() {
            let sum = row.iter().fold(T::zero(), |acc, &w| acc + w);
            let dev = if sum > T::one() { sum - T::one() } else { T::one() - sum };
            if dev > tolerance {
                return Err(Error::InvalidArgument(format!(
                    "row {k} of the combination matrix does not sum to one"
                )));
            }
        }
        Ok(CombinationMatrix { weights })
    }

    pub fn num_nodes(&self) -> usize {
        self.weights.nrows()
    }

    pub fn get(&self, k: usize, l: usize) -> T {
        self.weights[(k, l)]
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.weights
    }
}

/// How coefficients from nodes outside a neighborhood are treated.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HopMask {
    /// Exact powers `A^p`: information travels any number of hops.
    None,
    /// `A^p` with entries `(k, l)`, `l ∉ N_k`, zeroed after the power is taken.
    /// No renormalization. The resulting diffusion recursion is unstable for
    /// long buffers on non-complete graphs.
    OneHopPowers,
    /// Masked ladder `W(1) = A`, `W(p) = mask(A · W(p-1))`: every combine step
    /// discards coefficients whose center originates outside the receiving
    /// node's neighborhood, so a node only ever stores its neighbors' inputs.
    #[default]
    OneHopRecursive,
}

/// Precomputed `W(1) ..= W(L)`.
#[derive(Clone, Debug, PartialEq)]
pub struct PropagationWeights<T: Weight> {
    matrices: Vec<DMatrix<T>>,
    mask: HopMask,
}

impl<T: Weight> PropagationWeights<T> {
    pub fn new(a: &CombinationMatrix<T>, t: &Topology, max_power: usize, mask: HopMask) -> Result<Self> {
        if max_power == 0 {
            return Err(Error::InvalidArgument("max power must be at least 1".into()));
        }
        if a.num_nodes() != t.num_nodes() {
            return Err(Error::DimensionMismatch {
                expected: t.num_nodes(),
                found: a.num_nodes(),
            });
        }
        let apply_mask = |mut m: DMatrix<T>| {
            for k in 0..m.nrows() {
                for l in 0..m.ncols() {
                    if !t.is_neighbor(k, l) {
                        m[(k, l)] = T::zero();
                    }
                }
            }
            m
        };
        let a = a.matrix();
        let mut matrices: Vec<DMatrix<T>> = Vec::with_capacity(max_power);
        // Unmasked power, carried separately for the per-power variant.
        let mut power = a.clone();
        matrices.push(match mask {
            HopMask::None => a.clone(),
            _ => apply_mask(a.clone()),
        });
        for _ in 1..max_power {
            let next = match mask {
                HopMask::None => matrices.last().unwrap() * a,
                HopMask::OneHopPowers => {
                    power = &power * a;
                    apply_mask(power.clone())
                }
                HopMask::OneHopRecursive => apply_mask(a * matrices.last().unwrap()),
            };
            matrices.push(next);
        }
        Ok(PropagationWeights { matrices, mask })
    }

    pub fn max_power(&self) -> usize {
        self.matrices.len()
    }

    pub fn mask(&self) -> HopMask {
        self.mask
    }

    pub fn num_nodes(&self) -> usize {
        self.matrices[0].nrows()
    }

    /// `W(p)` for `1 <= p <= max_power`.
    pub fn power(&self, p: usize) -> &DMatrix<T> {
        assert!(p >= 1 && p <= self.matrices.len(), "power {p} out of range");
        &self.matrices[p - 1]
    }
}
