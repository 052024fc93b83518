//! Ising models, network structures and the model families used for testing
//! and for lower-bound constructions.
//!
//! Nodes are indexed from 0 in the API. Documentation of widget layouts uses
//! 1-based labels, so "node k" below lives at index `k - 1`.

use std::collections::BTreeSet;

use rand::seq::index;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{IsingError, Result};

/// Zero-field Ising model with a dense symmetric weight matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct IsingModel {
    p: usize,
    theta: Vec<f64>,
}

impl IsingModel {
    /// Model on `p` nodes with every weight zero.
    pub fn empty(p: usize) -> Result<Self> {
        if p == 0 {
            return Err(IsingError::param("node count must be positive"));
        }
        Ok(IsingModel { p, theta: vec![0.0; p * p] })
    }

    /// Build from `(i, j, weight)` triples with 0-based endpoints.
    pub fn from_edges(p: usize, edges: &[(usize, usize, f64)]) -> Result<Self> {
        let mut model = IsingModel::empty(p)?;
        for &(i, j, w) in edges {
            model.set_weight(i, j, w)?;
        }
        Ok(model)
    }

    /// Build from a full row-major matrix, checking symmetry and the zero diagonal.
    pub fn from_matrix(p: usize, theta: Vec<f64>) -> Result<Self> {
        if p == 0 {
            return Err(IsingError::param("node count must be positive"));
        }
        if theta.len() != p * p {
            return Err(IsingError::param(format!(
                "weight matrix has {} entries, expected {}",
                theta.len(),
                p * p
            )));
        }
        for i in 0..p {
            if theta[i * p + i] != 0.0 {
                return Err(IsingError::param(format!("diagonal entry {} is nonzero", i + 1)));
            }
            for j in 0..p {
                let w = theta[i * p + j];
                if !w.is_finite() {
                    return Err(IsingError::param(format!("weight ({}, {}) is not finite", i + 1, j + 1)));
                }
                if w != theta[j * p + i] {
                    return Err(IsingError::param(format!("weights ({}, {}) are not symmetric", i + 1, j + 1)));
                }
            }
        }
        Ok(IsingModel { p, theta })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.theta[i * self.p + j]
    }

    /// Row-major weight matrix.
    pub fn matrix(&self) -> &[f64] {
        &self.theta
    }

    pub fn set_weight(&mut self, i: usize, j: usize, w: f64) -> Result<()> {
        if i >= self.p || j >= self.p {
            return Err(IsingError::param(format!(
                "edge ({}, {}) out of range for {} nodes",
                i + 1,
                j + 1,
                self.p
            )));
        }
        if i == j {
            return Err(IsingError::param(format!("self-loop at node {}", i + 1)));
        }
        if !w.is_finite() {
            return Err(IsingError::param("edge weight must be finite"));
        }
        self.theta[i * self.p + j] = w;
        self.theta[j * self.p + i] = w;
        Ok(())
    }

    /// Nonzero weights as `(i, j, w)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> Vec<(usize, usize, f64)> {
        let mut out = Vec::new();
        for i in 0..self.p {
            for j in (i + 1)..self.p {
                let w = self.weight(i, j);
                if w != 0.0 {
                    out.push((i, j, w));
                }
            }
        }
        out
    }

    /// Σ_{i<j} θ_ij x_i x_j for a ±1 configuration.
    pub fn energy(&self, x: &[i8]) -> f64 {
        let mut e = 0.0;
        for i in 0..self.p {
            let row = &self.theta[i * self.p..(i + 1) * self.p];
            let mut acc = 0.0;
            for j in (i + 1)..self.p {
                acc += row[j] * f64::from(x[j]);
            }
            e += acc * f64::from(x[i]);
        }
        e
    }

    /// Σ_{i<j} |θ_ij|.
    pub fn total_abs_weight(&self) -> f64 {
        self.edges().iter().map(|e| e.2.abs()).sum()
    }

    /// The common weight of every edge, if the model has at least one edge and all agree.
    pub fn uniform_weight(&self) -> Option<f64> {
        let edges = self.edges();
        let first = edges.first()?.2;
        edges.iter().all(|e| e.2 == first).then_some(first)
    }

    pub fn is_ferromagnetic(&self) -> bool {
        self.theta.iter().all(|&w| w >= 0.0)
    }

    /// Markov network with exact-zero tolerance.
    pub fn network_structure(&self) -> GraphStructure {
        self.network_structure_with_tolerance(0.0)
    }

    /// Markov network treating `|θ_ij| <= tol` as absent.
    pub fn network_structure_with_tolerance(&self, tol: f64) -> GraphStructure {
        let mut edges = BTreeSet::new();
        for i in 0..self.p {
            for j in (i + 1)..self.p {
                let w = self.weight(i, j);
                if w != 0.0 && w.abs() > tol {
                    edges.insert((i, j));
                }
            }
        }
        GraphStructure { p: self.p, edges }
    }

    /// Weight matrix `a·θ_self + b·θ_other`.
    pub fn combine(&self, a: f64, other: &IsingModel, b: f64) -> Result<IsingModel> {
        if self.p != other.p {
            return Err(IsingError::Dimension { expected: self.p, found: other.p });
        }
        let theta = self
            .theta
            .iter()
            .zip(&other.theta)
            .map(|(&x, &y)| a * x + b * y)
            .collect();
        Ok(IsingModel { p: self.p, theta })
    }

    /// Block-diagonal union, blocks laid out in order.
    pub fn disjoint_union(blocks: &[&IsingModel]) -> Result<IsingModel> {
        let p: usize = blocks.iter().map(|b| b.p).sum();
        let mut out = IsingModel::empty(p)?;
        let mut offset = 0;
        for b in blocks {
            for (i, j, w) in b.edges() {
                out.set_weight(offset + i, offset + j, w)?;
            }
            offset += b.p;
        }
        Ok(out)
    }

    /// Model whose node `perm[i]` carries the role of node `i` here.
    pub fn relabel(&self, perm: &[usize]) -> Result<IsingModel> {
        check_permutation(perm, self.p)?;
        let mut out = IsingModel::empty(self.p)?;
        for (i, j, w) in self.edges() {
            out.set_weight(perm[i], perm[j], w)?;
        }
        Ok(out)
    }

    /// Copy with the model embedded in the first `self.p` nodes of a larger one.
    pub fn padded(&self, p: usize) -> Result<IsingModel> {
        if p < self.p {
            return Err(IsingError::param("padding cannot shrink a model"));
        }
        let mut out = IsingModel::empty(p)?;
        for (i, j, w) in self.edges() {
            out.set_weight(i, j, w)?;
        }
        Ok(out)
    }
}

fn check_permutation(perm: &[usize], p: usize) -> Result<()> {
    let mut seen = vec![false; p];
    if perm.len() != p {
        return Err(IsingError::Dimension { expected: p, found: perm.len() });
    }
    for &v in perm {
        if v >= p || seen[v] {
            return Err(IsingError::param("relabeling is not a permutation"));
        }
        seen[v] = true;
    }
    Ok(())
}

/// Undirected simple graph on `p` nodes; edges stored as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphStructure {
    p: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl GraphStructure {
    pub fn new(p: usize) -> Self {
        GraphStructure { p, edges: BTreeSet::new() }
    }

    pub fn from_edges(p: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = GraphStructure::new(p);
        for (i, j) in edges {
            g.insert(i, j)?;
        }
        Ok(g)
    }

    pub fn insert(&mut self, i: usize, j: usize) -> Result<bool> {
        if i == j {
            return Err(IsingError::param(format!("self-loop at node {}", i + 1)));
        }
        if i >= self.p || j >= self.p {
            return Err(IsingError::param(format!("edge ({}, {}) out of range", i + 1, j + 1)));
        }
        Ok(self.edges.insert((i.min(j), i.max(j))))
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn contains(&self, i: usize, j: usize) -> bool {
        self.edges.contains(&(i.min(j), i.max(j)))
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.p];
        for &(i, j) in &self.edges {
            deg[i] += 1;
            deg[j] += 1;
        }
        deg
    }

    pub fn max_degree(&self) -> usize {
        self.degrees().into_iter().max().unwrap_or(0)
    }

    /// Edges present in exactly one of the two graphs.
    pub fn symmetric_difference(&self, other: &GraphStructure) -> Result<GraphStructure> {
        if self.p != other.p {
            return Err(IsingError::Dimension { expected: self.p, found: other.p });
        }
        let edges = self.edges.symmetric_difference(&other.edges).copied().collect();
        Ok(GraphStructure { p: self.p, edges })
    }

    /// Connected-component label of every node.
    pub fn components(&self) -> Vec<usize> {
        let mut uf = UnionFind::new(self.p);
        for &(i, j) in &self.edges {
            uf.union(i, j);
        }
        (0..self.p).map(|v| uf.find(v)).collect()
    }

    pub fn is_forest(&self) -> bool {
        let mut uf = UnionFind::new(self.p);
        self.edges.iter().all(|&(i, j)| uf.union(i, j))
    }

    pub fn is_spanning_tree(&self) -> bool {
        self.edges.len() + 1 == self.p && self.is_forest()
    }
}

/// Disjoint-set forest with path halving.
#[derive(Debug, Clone)]
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }

    /// Returns false when `a` and `b` were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        self.parent[ra.max(rb)] = ra.min(rb);
        true
    }
}

/// Lower-bound construction families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WidgetFamily {
    SingleEdge,
    Triangle,
    Fan,
    CliqueMinusEdge,
    CliqueWithHole,
    EmmentalerExtraNode,
    EmmentalerVsFull,
    CliqueVsEmpty,
}

impl WidgetFamily {
    pub const ALL: [WidgetFamily; 8] = [
        WidgetFamily::SingleEdge,
        WidgetFamily::Triangle,
        WidgetFamily::Fan,
        WidgetFamily::CliqueMinusEdge,
        WidgetFamily::CliqueWithHole,
        WidgetFamily::EmmentalerExtraNode,
        WidgetFamily::EmmentalerVsFull,
        WidgetFamily::CliqueVsEmpty,
    ];

    pub fn name(self) -> &'static str {
        match self {
            WidgetFamily::SingleEdge => "single-edge",
            WidgetFamily::Triangle => "triangle",
            WidgetFamily::Fan => "fan",
            WidgetFamily::CliqueMinusEdge => "clique-minus-edge",
            WidgetFamily::CliqueWithHole => "clique-with-hole",
            WidgetFamily::EmmentalerExtraNode => "emmentaler-extra-node",
            WidgetFamily::EmmentalerVsFull => "emmentaler-vs-full",
            WidgetFamily::CliqueVsEmpty => "clique-vs-empty",
        }
    }
}

impl std::str::FromStr for WidgetFamily {
    type Err = IsingError;

    fn from_str(s: &str) -> Result<Self> {
        WidgetFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| IsingError::param(format!("unknown widget family `{s}`")))
    }
}

/// Parameters of one widget. `strong` is the background weight, `changed`
/// the weight of the edges that differ between the two models.
///
/// `size` is the clique parameter: the clique families live on `size + 1`
/// nodes, `EmmentalerVsFull` on `size` nodes and `CliqueVsEmpty` on `size`
/// nodes. `ell` is the hole or group parameter and the number of broken
/// blades for the fan; `blades` is used by the fan only.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WidgetSpec {
    pub family: WidgetFamily,
    pub strong: f64,
    pub changed: f64,
    pub size: usize,
    pub ell: usize,
    pub blades: usize,
}

impl WidgetSpec {
    fn with(family: WidgetFamily, strong: f64, changed: f64, size: usize, ell: usize, blades: usize) -> Self {
        WidgetSpec { family, strong, changed, size, ell, blades }
    }

    pub fn single_edge(changed: f64) -> Self {
        Self::with(WidgetFamily::SingleEdge, 0.0, changed, 1, 0, 0)
    }

    pub fn triangle(strong: f64, changed: f64) -> Self {
        Self::with(WidgetFamily::Triangle, strong, changed, 2, 0, 0)
    }

    pub fn fan(strong: f64, changed: f64, blades: usize, broken: usize) -> Self {
        Self::with(WidgetFamily::Fan, strong, changed, 2 * blades, broken, blades)
    }

    pub fn clique_minus_edge(strong: f64, changed: f64, d: usize) -> Self {
        Self::with(WidgetFamily::CliqueMinusEdge, strong, changed, d, 2, 0)
    }

    pub fn clique_with_hole(strong: f64, changed: f64, d: usize, hole: usize) -> Self {
        Self::with(WidgetFamily::CliqueWithHole, strong, changed, d, hole, 0)
    }

    pub fn emmentaler_extra_node(strong: f64, changed: f64, d: usize, ell: usize) -> Self {
        Self::with(WidgetFamily::EmmentalerExtraNode, strong, changed, d, ell, 0)
    }

    pub fn emmentaler_vs_full(strong: f64, changed: f64, d: usize, ell: usize) -> Self {
        Self::with(WidgetFamily::EmmentalerVsFull, strong, changed, d, ell, 0)
    }

    pub fn clique_vs_empty(changed: f64, k: usize) -> Self {
        Self::with(WidgetFamily::CliqueVsEmpty, 0.0, changed, k, 0, 0)
    }

    /// Check the family's structural conditions.
    pub fn validate(&self) -> Result<()> {
        let fail = |msg: String| Err(IsingError::Construction(format!("{}: {msg}", self.family.name())));
        if !self.strong.is_finite() || !self.changed.is_finite() {
            return fail("weights must be finite".into());
        }
        match self.family {
            WidgetFamily::SingleEdge | WidgetFamily::Triangle => Ok(()),
            WidgetFamily::Fan => {
                if self.blades == 0 {
                    fail("needs at least one blade".into())
                } else if self.ell == 0 || self.ell > self.blades {
                    fail(format!("needs 1 <= broken blades <= B, got {} with B = {}", self.ell, self.blades))
                } else {
                    Ok(())
                }
            }
            WidgetFamily::CliqueMinusEdge => {
                if self.size < 1 {
                    fail("needs d >= 1".into())
                } else {
                    Ok(())
                }
            }
            WidgetFamily::CliqueWithHole => {
                if self.ell < 1 || self.ell + 1 > self.size {
                    fail(format!("needs 1 <= ell and ell + 1 <= d, got ell = {}, d = {}", self.ell, self.size))
                } else {
                    Ok(())
                }
            }
            WidgetFamily::EmmentalerExtraNode | WidgetFamily::EmmentalerVsFull => {
                if self.size == 0 || !self.size.is_multiple_of(self.ell + 1) {
                    fail(format!("needs (ell + 1) | d, got ell = {}, d = {}", self.ell, self.size))
                } else {
                    Ok(())
                }
            }
            WidgetFamily::CliqueVsEmpty => {
                if self.size < 1 {
                    fail("needs k >= 1".into())
                } else {
                    Ok(())
                }
            }
        }
    }

    /// Number of nodes of both models.
    pub fn node_count(&self) -> usize {
        match self.family {
            WidgetFamily::SingleEdge => 2,
            WidgetFamily::Triangle => 3,
            WidgetFamily::Fan => 2 * self.blades + 1,
            WidgetFamily::CliqueMinusEdge | WidgetFamily::CliqueWithHole | WidgetFamily::EmmentalerExtraNode => {
                self.size + 1
            }
            WidgetFamily::EmmentalerVsFull | WidgetFamily::CliqueVsEmpty => self.size,
        }
    }

    /// Number of Emmentaler groups, `d / (ell + 1)`.
    pub fn group_count(&self) -> usize {
        self.size / (self.ell + 1)
    }

    /// Edge count of the symmetric difference when both weights are nonzero.
    pub fn stated_sigma(&self) -> usize {
        let l = self.ell;
        match self.family {
            WidgetFamily::SingleEdge | WidgetFamily::Triangle | WidgetFamily::CliqueMinusEdge => 1,
            WidgetFamily::Fan => l,
            WidgetFamily::CliqueWithHole => l * (l.saturating_sub(1)) / 2,
            WidgetFamily::EmmentalerExtraNode => l + 1,
            WidgetFamily::EmmentalerVsFull => self.group_count() * l * (l + 1) / 2,
            WidgetFamily::CliqueVsEmpty => self.size * (self.size - 1) / 2,
        }
    }

    /// Maximum degree allowed in either model.
    pub fn degree_bound(&self) -> usize {
        match self.family {
            WidgetFamily::SingleEdge => 1,
            WidgetFamily::Triangle => 2,
            WidgetFamily::Fan => 2 * self.blades,
            WidgetFamily::CliqueMinusEdge
            | WidgetFamily::CliqueWithHole
            | WidgetFamily::EmmentalerExtraNode
            | WidgetFamily::EmmentalerVsFull => self.size,
            WidgetFamily::CliqueVsEmpty => self.size - 1,
        }
    }
}

/// Null and alternate models of a widget.
#[derive(Debug, Clone, PartialEq)]
pub struct WidgetPair {
    pub null: IsingModel,
    pub alternate: IsingModel,
}

impl WidgetPair {
    pub fn sigma(&self) -> usize {
        self.null
            .network_structure()
            .symmetric_difference(&self.alternate.network_structure())
            .map(|g| g.len())
            .unwrap_or(0)
    }
}

/// Construct the null/alternate pair of a widget.
///
/// Layouts (1-based):
/// * single edge: null has edge (1,2) at `changed`, alternate is empty.
/// * triangle: null is the path 1–2–3 at `strong`; alternate adds (1,3) at `changed`.
/// * fan: centre 2B+1, blade i is the pair (2i−1, 2i) joined at `strong`; the
///   centre meets even nodes at `strong` and odd nodes at `changed`. The null
///   drops the centre's edges to nodes 2i−1 for i ≤ ell.
/// * clique minus edge: K_{d+1} at `strong` with (1,2) at `changed` in the null
///   and absent in the alternate.
/// * clique with hole: hole on nodes 1..=ell at `changed` in the null, removed
///   in the alternate.
/// * Emmentaler: groups V_g are consecutive runs of ell+1 nodes among 1..=d.
///   The extra-node variant joins node d+1 to every group but the last;
///   the alternate adds the last group at `changed`. The versus-full variant
///   adds every within-group edge at `changed`.
/// * clique vs empty: null is K_k at `changed`, alternate is empty.
pub fn build_widget(spec: &WidgetSpec) -> Result<WidgetPair> {
    spec.validate()?;
    let (lam, mu) = (spec.strong, spec.changed);
    let n = spec.node_count();
    let mut null = IsingModel::empty(n)?;
    let mut alt = IsingModel::empty(n)?;
    match spec.family {
        WidgetFamily::SingleEdge => {
            null.set_weight(0, 1, mu)?;
        }
        WidgetFamily::Triangle => {
            for m in [&mut null, &mut alt] {
                m.set_weight(0, 1, lam)?;
                m.set_weight(1, 2, lam)?;
            }
            alt.set_weight(0, 2, mu)?;
        }
        WidgetFamily::Fan => {
            let centre = 2 * spec.blades;
            for b in 0..spec.blades {
                let (odd, even) = (2 * b, 2 * b + 1);
                for m in [&mut null, &mut alt] {
                    m.set_weight(odd, even, lam)?;
                    m.set_weight(even, centre, lam)?;
                }
                alt.set_weight(odd, centre, mu)?;
                if b >= spec.ell {
                    null.set_weight(odd, centre, mu)?;
                }
            }
        }
        WidgetFamily::CliqueMinusEdge | WidgetFamily::CliqueWithHole => {
            let hole = spec.ell;
            for i in 0..n {
                for j in (i + 1)..n {
                    if j < hole {
                        null.set_weight(i, j, mu)?;
                    } else {
                        null.set_weight(i, j, lam)?;
                        alt.set_weight(i, j, lam)?;
                    }
                }
            }
        }
        WidgetFamily::EmmentalerExtraNode => {
            let g = spec.ell + 1;
            let d = spec.size;
            let last = spec.group_count() - 1;
            for i in 0..d {
                for j in (i + 1)..d {
                    if i / g != j / g {
                        null.set_weight(i, j, lam)?;
                        alt.set_weight(i, j, lam)?;
                    }
                }
                if i / g == last {
                    alt.set_weight(i, d, mu)?;
                } else {
                    null.set_weight(i, d, lam)?;
                    alt.set_weight(i, d, lam)?;
                }
            }
        }
        WidgetFamily::EmmentalerVsFull => {
            let g = spec.ell + 1;
            for i in 0..n {
                for j in (i + 1)..n {
                    if i / g != j / g {
                        null.set_weight(i, j, lam)?;
                        alt.set_weight(i, j, lam)?;
                    } else {
                        alt.set_weight(i, j, mu)?;
                    }
                }
            }
        }
        WidgetFamily::CliqueVsEmpty => {
            for i in 0..n {
                for j in (i + 1)..n {
                    null.set_weight(i, j, mu)?;
                }
            }
        }
    }
    Ok(WidgetPair { null, alternate: alt })
}

/// How an ensemble turns a set of changed blocks into an alternate model.
#[derive(Debug, Clone, PartialEq)]
pub enum EnsembleGenerator {
    /// Replace the null block by the alternate block on each chosen block.
    Blocks { null_block: IsingModel, alternate_block: IsingModel },
    /// Two-layer star: for each chosen i, detach leaf i from the hub and
    /// attach its outer neighbour m+i instead.
    TwoLayerStar { weight: f64 },
}

/// A null model together with a family of alternates indexed by
/// `changed_blocks`-subsets of `0..block_count`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChangeEnsemble {
    pub base: IsingModel,
    pub block_size: usize,
    pub block_count: usize,
    pub changed_blocks: usize,
    pub sigma: usize,
    pub generator: EnsembleGenerator,
}

impl ChangeEnsemble {
    /// Alternate for the given set of distinct block indices.
    pub fn alternate(&self, blocks: &[usize]) -> Result<IsingModel> {
        if blocks.len() != self.changed_blocks {
            return Err(IsingError::param(format!(
                "expected {} changed blocks, got {}",
                self.changed_blocks,
                blocks.len()
            )));
        }
        let mut seen = vec![false; self.block_count];
        for &b in blocks {
            if b >= self.block_count || seen[b] {
                return Err(IsingError::param(format!("invalid block index {b}")));
            }
            seen[b] = true;
        }
        let mut q = self.base.clone();
        match &self.generator {
            EnsembleGenerator::Blocks { null_block, alternate_block } => {
                let nu = self.block_size;
                for &b in blocks {
                    let off = b * nu;
                    for i in 0..nu {
                        for j in (i + 1)..nu {
                            debug_assert_eq!(q.weight(off + i, off + j), null_block.weight(i, j));
                            q.set_weight(off + i, off + j, alternate_block.weight(i, j))?;
                        }
                    }
                }
            }
            EnsembleGenerator::TwoLayerStar { weight } => {
                let hub = self.base.p() - 1;
                let m = self.block_count;
                for &i in blocks {
                    q.set_weight(hub, i, 0.0)?;
                    q.set_weight(hub, m + i, *weight)?;
                }
            }
        }
        Ok(q)
    }

    /// Alternate for a uniformly random subset of blocks.
    pub fn random_alternate<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<IsingModel> {
        let mut chosen = index::sample(rng, self.block_count, self.changed_blocks).into_vec();
        chosen.sort_unstable();
        self.alternate(&chosen)
    }

    /// Every `changed_blocks`-subset of the blocks, lexicographically.
    pub fn subsets(&self) -> Vec<Vec<usize>> {
        combinations(self.block_count, self.changed_blocks)
    }
}

/// All k-subsets of 0..n in lexicographic order.
pub fn combinations(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        let Some(i) = (0..k).rev().find(|&i| cur[i] < n - k + i) else {
            return out;
        };
        cur[i] += 1;
        for j in (i + 1)..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Tile `p` nodes with copies of the null block; alternates swap in the
/// alternate block on `t` of the `⌊p/ν⌋` blocks. Leftover nodes stay isolated.
pub fn lift(null_block: &IsingModel, alternate_block: &IsingModel, p: usize, t: usize) -> Result<ChangeEnsemble> {
    let nu = null_block.p();
    if alternate_block.p() != nu {
        return Err(IsingError::Dimension { expected: nu, found: alternate_block.p() });
    }
    if nu > p {
        return Err(IsingError::param(format!("block of {nu} nodes does not fit in {p}")));
    }
    let m = p / nu;
    if t < 1 || t > m {
        return Err(IsingError::param(format!("changed blocks t = {t} must lie in [1, {m}]")));
    }
    let copies: Vec<&IsingModel> = std::iter::repeat_n(null_block, m).collect();
    let base = IsingModel::disjoint_union(&copies)?.padded(p)?;
    let sigma = null_block
        .network_structure()
        .symmetric_difference(&alternate_block.network_structure())?
        .len();
    Ok(ChangeEnsemble {
        base,
        block_size: nu,
        block_count: m,
        changed_blocks: t,
        sigma,
        generator: EnsembleGenerator::Blocks {
            null_block: null_block.clone(),
            alternate_block: alternate_block.clone(),
        },
    })
}

/// Ensemble of rewired two-layer stars on odd `p`, changing `t` leaves.
pub fn two_layer_star_ensemble(p: usize, weight: f64, t: usize) -> Result<ChangeEnsemble> {
    let base = build_uniform_tree(TreeShape::TwoLayerStar, p, weight)?;
    let m = (p - 1) / 2;
    if t < 1 || t > m {
        return Err(IsingError::param(format!("changed leaves t = {t} must lie in [1, {m}]")));
    }
    Ok(ChangeEnsemble {
        base,
        block_size: 2,
        block_count: m,
        changed_blocks: t,
        sigma: 2,
        generator: EnsembleGenerator::TwoLayerStar { weight },
    })
}

/// Topologies with a single uniform weight.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TreeShape {
    /// Node k has children 2k and 2k+1 (1-based); needs p = 2^h − 1.
    CompleteBinary,
    /// Node 1 joined to every other node.
    Star,
    /// 1–2–…–p.
    Path,
    /// Hub p joined to 1..=m, and i joined to m+i, with m = (p−1)/2; needs odd p.
    TwoLayerStar,
}

impl std::str::FromStr for TreeShape {
    type Err = IsingError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "complete-binary" | "binary" => Ok(TreeShape::CompleteBinary),
            "star" => Ok(TreeShape::Star),
            "path" => Ok(TreeShape::Path),
            "two-layer-star" => Ok(TreeShape::TwoLayerStar),
            other => Err(IsingError::param(format!("unknown tree shape `{other}`"))),
        }
    }
}

pub fn build_uniform_tree(shape: TreeShape, p: usize, weight: f64) -> Result<IsingModel> {
    let mut model = IsingModel::empty(p)?;
    match shape {
        TreeShape::CompleteBinary => {
            if !(p + 1).is_power_of_two() {
                return Err(IsingError::param(format!("complete binary tree needs p = 2^h - 1, got {p}")));
            }
            for child in 1..p {
                model.set_weight((child - 1) / 2, child, weight)?;
            }
        }
        TreeShape::Star => {
            for leaf in 1..p {
                model.set_weight(0, leaf, weight)?;
            }
        }
        TreeShape::Path => {
            for i in 1..p {
                model.set_weight(i - 1, i, weight)?;
            }
        }
        TreeShape::TwoLayerStar => {
            if p.is_multiple_of(2) || p < 3 {
                return Err(IsingError::param(format!("two-layer star needs odd p >= 3, got {p}")));
            }
            let m = (p - 1) / 2;
            for i in 0..m {
                model.set_weight(p - 1, i, weight)?;
                model.set_weight(i, m + i, weight)?;
            }
        }
    }
    Ok(model)
}

/// Zero out a uniformly random `s`-subset of the edges, seeded.
pub fn random_edge_deletion(model: &IsingModel, s: usize, seed: u64) -> Result<IsingModel> {
    random_edge_deletion_with(model, s, &mut ChaCha8Rng::seed_from_u64(seed))
}

pub fn random_edge_deletion_with<R: Rng + ?Sized>(model: &IsingModel, s: usize, rng: &mut R) -> Result<IsingModel> {
    let edges = model.edges();
    if s > edges.len() {
        return Err(IsingError::param(format!(
            "cannot delete {s} edges from a model with {}",
            edges.len()
        )));
    }
    let mut out = model.clone();
    for k in index::sample(rng, edges.len(), s) {
        let (i, j, _) = edges[k];
        out.set_weight(i, j, 0.0)?;
    }
    Ok(out)
}
