//! Edge-sum statistics, threshold tests and the Chow–Liu baseline.

use crate::error::{IsingError, Result};
use crate::exact::{Enumerator, PairMoments};
use crate::model::{GraphStructure, IsingModel, UnionFind};
use crate::sampler::{Sampler, SampleBatch, SamplerConfig, DEFAULT_BURN_IN};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Null,
    Alternate,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Null => "null",
            Verdict::Alternate => "alternate",
        })
    }
}

/// Outcome of a test on one batch.
#[derive(Debug, Clone, PartialEq)]
pub struct TestDecision {
    pub test: &'static str,
    pub verdict: Verdict,
    pub statistic: f64,
    pub threshold: f64,
}

/// A goodness-of-fit test bound to a null model and separation.
pub trait GofTest: Send + Sync {
    fn name(&self) -> &'static str;
    fn separation(&self) -> usize;
    fn decide(&self, batch: &SampleBatch) -> Result<TestDecision>;
}

/// Mean over samples of Σ_{(i,j)∈g} x_i x_j.
pub fn statistic_t(batch: &SampleBatch, g: &GraphStructure) -> Result<f64> {
    if batch.p() != g.p() {
        return Err(IsingError::Dimension { expected: g.p(), found: batch.p() });
    }
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let total: i64 = batch
        .rows()
        .map(|x| edges.iter().map(|&(i, j)| i64::from(x[i] * x[j])).sum::<i64>())
        .sum();
    Ok(total as f64 / batch.n() as f64)
}

/// Exact law of a forest-structured model, rooted per component.
#[derive(Debug, Clone)]
pub struct ForestLaw {
    parent: Vec<Option<usize>>,
    parent_tanh: Vec<f64>,
    /// Breadth-first order; parents precede children.
    order: Vec<usize>,
}

impl ForestLaw {
    pub fn new(model: &IsingModel) -> Result<Self> {
        let g = model.network_structure();
        if !g.is_forest() {
            return Err(IsingError::Structure("model graph has a cycle".into()));
        }
        let p = model.p();
        let mut adj = vec![Vec::new(); p];
        for (i, j) in g.edges() {
            adj[i].push(j);
            adj[j].push(i);
        }
        let mut parent = vec![None; p];
        let mut parent_tanh = vec![0.0; p];
        let mut seen = vec![false; p];
        let mut order = Vec::with_capacity(p);
        for root in 0..p {
            if seen[root] {
                continue;
            }
            seen[root] = true;
            let start = order.len();
            order.push(root);
            let mut head = start;
            while head < order.len() {
                let v = order[head];
                head += 1;
                for &u in &adj[v] {
                    if !seen[u] {
                        seen[u] = true;
                        parent[u] = Some(v);
                        parent_tanh[u] = model.weight(u, v).tanh();
                        order.push(u);
                    }
                }
            }
        }
        Ok(ForestLaw { parent, parent_tanh, order })
    }

    /// E[Π_{v∈nodes} x_v]; repeated nodes cancel.
    pub fn moment(&self, nodes: &[usize]) -> f64 {
        let mut parity = vec![false; self.parent.len()];
        for &v in nodes {
            parity[v] ^= true;
        }
        let mut value = 1.0;
        for &v in self.order.iter().rev() {
            if !parity[v] {
                continue;
            }
            match self.parent[v] {
                Some(u) => {
                    value *= self.parent_tanh[v];
                    parity[u] ^= true;
                }
                None => return 0.0,
            }
        }
        value
    }
}

/// Mean and single-sample variance of the edge-sum statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ForestMoments {
    pub mean: f64,
    pub variance_n1: f64,
}

/// Moments of 𝒯 over the model's own graph under its own law.
pub fn forest_moments(model: &IsingModel) -> Result<ForestMoments> {
    ForestLaw::new(model)?;
    let (mean, var) = model
        .edges()
        .iter()
        .map(|e| e.2.tanh())
        .fold((0.0, 0.0), |(m, v), t| (m + t, v + 1.0 - t * t));
    Ok(ForestMoments { mean, variance_n1: var })
}

/// Moments of 𝒯 over `g` when samples come from the forest law `law`.
pub fn forest_moments_under(g: &GraphStructure, law: &IsingModel) -> Result<ForestMoments> {
    if g.p() != law.p() {
        return Err(IsingError::Dimension { expected: g.p(), found: law.p() });
    }
    let forest = ForestLaw::new(law)?;
    let edges: Vec<(usize, usize)> = g.edges().collect();
    let means: Vec<f64> = edges.iter().map(|&(i, j)| forest.moment(&[i, j])).collect();
    let mean: f64 = means.iter().sum();
    let mut second = 0.0;
    for (a, &(i, j)) in edges.iter().enumerate() {
        second += 1.0;
        for &(k, l) in &edges[a + 1..] {
            second += 2.0 * forest.moment(&[i, j, k, l]);
        }
    }
    Ok(ForestMoments { mean, variance_n1: (second - mean * mean).max(0.0) })
}

/// Uniform edge weight of a forest model, or an error naming what fails.
fn uniform_forest_weight(model: &IsingModel) -> Result<f64> {
    if !model.network_structure().is_forest() {
        return Err(IsingError::Structure("null model must be a forest".into()));
    }
    model
        .uniform_weight()
        .ok_or_else(|| IsingError::Structure("null model must have one uniform nonzero edge weight".into()))
}

/// Threshold test on 𝒯 over G(P). The null side is `𝒯 ≥ threshold` for
/// positive weights and `𝒯 ≤ threshold` for negative ones; `strict` excludes equality.
#[derive(Debug, Clone)]
pub struct ThresholdTest {
    name: &'static str,
    graph: GraphStructure,
    threshold: f64,
    sign: f64,
    strict: bool,
    s: usize,
}

impl ThresholdTest {
    pub fn threshold(&self) -> f64 {
        self.threshold
    }

    pub fn graph(&self) -> &GraphStructure {
        &self.graph
    }

    /// Decision for an already computed statistic.
    pub fn decide_value(&self, statistic: f64) -> TestDecision {
        let margin = self.sign * (statistic - self.threshold);
        let null = if self.strict { margin > 0.0 } else { margin >= 0.0 };
        TestDecision {
            test: self.name,
            verdict: if null { Verdict::Null } else { Verdict::Alternate },
            statistic,
            threshold: self.threshold,
        }
    }
}

impl GofTest for ThresholdTest {
    fn name(&self) -> &'static str {
        self.name
    }

    fn separation(&self) -> usize {
        self.s
    }

    fn decide(&self, batch: &SampleBatch) -> Result<TestDecision> {
        Ok(self.decide_value(statistic_t(batch, &self.graph)?))
    }
}

fn check_separation(s: usize) -> Result<()> {
    if s == 0 {
        Err(IsingError::param("separation s must be at least 1"))
    } else {
        Ok(())
    }
}

/// Null iff 𝒯 ≥ (k − s/2)·tanh α.
pub fn forest_deletion(null: &IsingModel, s: usize) -> Result<ThresholdTest> {
    tolerant_forest(null, s, 0.0).map(|t| ThresholdTest { name: "forest", ..t })
}

/// Null iff 𝒯 ≥ (k − (1+ε)s/2)·tanh α.
pub fn tolerant_forest(null: &IsingModel, s: usize, epsilon: f64) -> Result<ThresholdTest> {
    check_separation(s)?;
    if !(0.0..1.0).contains(&epsilon) {
        return Err(IsingError::param(format!("tolerance must lie in [0, 1), got {epsilon}")));
    }
    let alpha = uniform_forest_weight(null)?;
    let tau = alpha.abs().tanh();
    let k = null.edges().len() as f64;
    let sign = alpha.signum();
    Ok(ThresholdTest {
        name: "tolerant-forest",
        graph: null.network_structure(),
        threshold: sign * (k - (1.0 + epsilon) * s as f64 / 2.0) * tau,
        sign,
        strict: false,
        s,
    })
}

fn spanning_tree_weight(null: &IsingModel) -> Result<f64> {
    if !null.network_structure().is_spanning_tree() {
        return Err(IsingError::Structure("null model must be a spanning tree".into()));
    }
    uniform_forest_weight(null)
}

/// Null iff 𝒯 > (p−1)τ − sτ(1−τ)/4.
pub fn tree_change(null: &IsingModel, s: usize) -> Result<ThresholdTest> {
    check_separation(s)?;
    let alpha = spanning_tree_weight(null)?;
    let tau = alpha.abs().tanh();
    let p = null.p() as f64;
    let sign = alpha.signum();
    Ok(ThresholdTest {
        name: "tree",
        graph: null.network_structure(),
        threshold: sign * ((p - 1.0) * tau - s as f64 * tau * (1.0 - tau) / 4.0),
        sign,
        strict: true,
        s,
    })
}

/// Null iff 𝒯 > (p−1)τ − (1+2ε)sτ/4 + sτ²/4; needs ε < (1 − τ)/2.
pub fn tolerant_tree(null: &IsingModel, s: usize, epsilon: f64) -> Result<ThresholdTest> {
    check_separation(s)?;
    let alpha = spanning_tree_weight(null)?;
    let tau = alpha.abs().tanh();
    if !(0.0..(1.0 - tau) / 2.0).contains(&epsilon) {
        return Err(IsingError::param(format!(
            "tolerance {epsilon} violates 0 <= epsilon < (1 - tanh(alpha))/2 = {}",
            (1.0 - tau) / 2.0
        )));
    }
    let p = null.p() as f64;
    let sf = s as f64;
    let sign = alpha.signum();
    Ok(ThresholdTest {
        name: "tolerant-tree",
        graph: null.network_structure(),
        threshold: sign * ((p - 1.0) * tau - (1.0 + 2.0 * epsilon) * sf * tau / 4.0 + sf * tau * tau / 4.0),
        sign,
        strict: true,
        s,
    })
}

/// Default gap constant of the ferromagnetic deletion test.
pub const DEFAULT_FERRO_GAP: f64 = 1.0 / 800.0;

/// Source of E_P[𝒯] for the ferromagnetic test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MeanSource {
    /// Forest formula or enumeration.
    Exact,
    /// Monte-Carlo average over a calibration batch.
    Calibration { samples: usize, config: SamplerConfig },
}

/// Null iff 𝒯 ≥ E_P[𝒯] − gap·s·α on a high-temperature ferromagnet.
pub fn ferro_deletion(null: &IsingModel, s: usize, gap_constant: f64, mean: MeanSource) -> Result<ThresholdTest> {
    check_separation(s)?;
    if !null.is_ferromagnetic() {
        return Err(IsingError::ModelClass("ferromagnetic test needs nonnegative weights".into()));
    }
    let alpha = null
        .uniform_weight()
        .filter(|&a| a > 0.0)
        .ok_or_else(|| IsingError::ModelClass("ferromagnetic test needs one uniform positive weight".into()))?;
    let graph = null.network_structure();
    let d = graph.max_degree() as f64;
    if alpha * d >= 1.0 {
        return Err(IsingError::ModelClass(format!("alpha * d = {} is not below 1", alpha * d)));
    }
    let expected = match mean {
        MeanSource::Exact => exact_edge_sum_mean(null, &graph)?,
        MeanSource::Calibration { samples, config } => {
            statistic_t(&Sampler::new(null, config)?.draw(samples, &[u64::MAX])?, &graph)?
        }
    };
    Ok(ThresholdTest {
        name: "ferro",
        graph,
        threshold: expected - gap_constant * s as f64 * alpha,
        sign: 1.0,
        strict: false,
        s,
    })
}

/// E[Σ_{(i,j)∈g} X_i X_j] exactly, via the forest formula or enumeration.
pub fn exact_edge_sum_mean(law: &IsingModel, g: &GraphStructure) -> Result<f64> {
    if law.network_structure().is_forest() {
        return Ok(forest_moments_under(g, law)?.mean);
    }
    let moments = Enumerator::default().pair_moments(law)?;
    Ok(g.edges().map(|(i, j)| moments.get(i, j)).sum())
}

/// One-shot form of the ferromagnetic test. The mean is exact when the null is
/// a forest or small enough to enumerate, otherwise it comes from a
/// calibration batch of max(10⁴, 100n) samples.
pub fn ferro_deletion_test(null: &IsingModel, batch: &SampleBatch, s: usize, gap_constant: f64) -> Result<TestDecision> {
    let exact = null.network_structure().is_forest() || null.p() <= Enumerator::default().limit();
    let source = if exact {
        MeanSource::Exact
    } else {
        let seed = batch.provenance.map_or(0, |c| c.seed);
        let burn_in = batch.provenance.map_or(DEFAULT_BURN_IN, |c| c.burn_in.max(DEFAULT_BURN_IN));
        MeanSource::Calibration {
            samples: (100 * batch.n()).max(10_000),
            config: SamplerConfig::glauber(burn_in, seed ^ 0x5EED),
        }
    };
    ferro_deletion(null, s, gap_constant, source)?.decide(batch)
}

pub fn forest_deletion_test(null: &IsingModel, batch: &SampleBatch, s: usize) -> Result<TestDecision> {
    forest_deletion(null, s)?.decide(batch)
}

pub fn tree_change_test(null: &IsingModel, batch: &SampleBatch, s: usize) -> Result<TestDecision> {
    tree_change(null, s)?.decide(batch)
}

pub fn tolerant_forest_test(null: &IsingModel, batch: &SampleBatch, s: usize, epsilon: f64) -> Result<TestDecision> {
    tolerant_forest(null, s, epsilon)?.decide(batch)
}

pub fn tolerant_tree_test(null: &IsingModel, batch: &SampleBatch, s: usize, epsilon: f64) -> Result<TestDecision> {
    tolerant_tree(null, s, epsilon)?.decide(batch)
}

/// Maximum spanning tree of `weight` over the complete graph. Edges are
/// offered in lexicographic order and stably sorted by decreasing weight, so
/// ties resolve to the lexicographically first edge.
fn max_spanning_tree<W: PartialOrd + Copy>(p: usize, weight: impl Fn(usize, usize) -> W) -> GraphStructure {
    let mut edges: Vec<(W, usize, usize)> = Vec::with_capacity(p * (p - 1) / 2);
    for i in 0..p {
        for j in (i + 1)..p {
            edges.push((weight(i, j), i, j));
        }
    }
    edges.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap_or(std::cmp::Ordering::Equal));
    let mut uf = UnionFind::new(p);
    let mut tree = GraphStructure::new(p);
    for (_, i, j) in edges {
        if uf.union(i, j) {
            tree.insert(i, j).expect("indices in range");
            if tree.len() + 1 == p {
                break;
            }
        }
    }
    tree
}

/// Chow–Liu tree: maximum spanning tree under |Ê[X_i X_j]|.
pub fn chow_liu(batch: &SampleBatch) -> GraphStructure {
    let p = batch.p();
    let mut sums = vec![0i64; p * p];
    for x in batch.rows() {
        for i in 0..p {
            let xi = x[i];
            let row = &mut sums[i * p..(i + 1) * p];
            for j in (i + 1)..p {
                row[j] += i64::from(xi * x[j]);
            }
        }
    }
    max_spanning_tree(p, |i, j| sums[i * p + j].abs())
}

/// Chow–Liu tree from a given moment matrix.
pub fn chow_liu_from_moments(moments: &PairMoments) -> GraphStructure {
    max_spanning_tree(moments.p(), |i, j| moments.get(i, j).abs())
}

/// Goodness-of-fit through structure learning: alternate iff the learned
/// tree differs from G(P) in at least s/2 edges.
#[derive(Debug, Clone)]
pub struct StructureLearningTest {
    graph: GraphStructure,
    s: usize,
}

pub fn structure_learning(null: &IsingModel, s: usize) -> Result<StructureLearningTest> {
    check_separation(s)?;
    Ok(StructureLearningTest { graph: null.network_structure(), s })
}

impl GofTest for StructureLearningTest {
    fn name(&self) -> &'static str {
        "structure-learning"
    }

    fn separation(&self) -> usize {
        self.s
    }

    fn decide(&self, batch: &SampleBatch) -> Result<TestDecision> {
        if batch.p() != self.graph.p() {
            return Err(IsingError::Dimension { expected: self.graph.p(), found: batch.p() });
        }
        let learned = chow_liu(batch);
        let distance = learned.symmetric_difference(&self.graph)?.len() as f64;
        let threshold = self.s as f64 / 2.0;
        Ok(TestDecision {
            test: "structure-learning",
            verdict: if distance >= threshold { Verdict::Alternate } else { Verdict::Null },
            statistic: distance,
            threshold,
        })
    }
}

pub fn sl_based_gof(null: &IsingModel, batch: &SampleBatch, s: usize) -> Result<TestDecision> {
    structure_learning(null, s)?.decide(batch)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::pair_moments;
    use crate::model::{build_uniform_tree, TreeShape};

    fn batch(p: usize, rows: &[Vec<i8>]) -> SampleBatch {
        SampleBatch::from_rows(p, rows).unwrap()
    }

    #[test]
    fn statistic_examples() {
        let g = GraphStructure::from_edges(4, [(0, 1), (1, 2), (2, 3)]).unwrap();
        let plus = batch(4, &[vec![1; 4]]);
        assert_eq!(statistic_t(&plus, &GraphStructure::new(4)).unwrap(), 0.0);
        assert_eq!(statistic_t(&plus, &g).unwrap(), 3.0);
        let pm = batch(4, &[vec![1; 4], vec![-1; 4]]);
        assert_eq!(statistic_t(&pm, &g).unwrap(), 3.0);
        assert!(statistic_t(&pm, &GraphStructure::new(5)).is_err());
    }

    #[test]
    fn forest_moment_examples() {
        let a = 0.1f64;
        let tree = build_uniform_tree(TreeShape::CompleteBinary, 15, a).unwrap();
        let m = forest_moments(&tree).unwrap();
        assert!((m.mean - 14.0 * a.tanh()).abs() < 1e-14);
        assert!((m.variance_n1 - 14.0 * (1.0 - a.tanh().powi(2))).abs() < 1e-13);
        let star = build_uniform_tree(TreeShape::Star, 4, a).unwrap();
        let moments = pair_moments(&star).unwrap();
        let by_enum: f64 = star.edges().iter().map(|e| moments.get(e.0, e.1)).sum();
        assert!((forest_moments(&star).unwrap().mean - by_enum).abs() < 1e-14);
        let cyclic = IsingModel::from_edges(3, &[(0, 1, 0.1), (1, 2, 0.1), (0, 2, 0.1)]).unwrap();
        assert!(matches!(forest_moments(&cyclic), Err(IsingError::Structure(_))));
    }

    #[test]
    fn cross_moments_match_enumeration() {
        let p_model = build_uniform_tree(TreeShape::CompleteBinary, 7, 0.6).unwrap();
        let mut q = build_uniform_tree(TreeShape::Path, 7, 0.3).unwrap();
        q.set_weight(2, 3, 0.0).unwrap();
        let g = p_model.network_structure();
        let m = forest_moments_under(&g, &q).unwrap();
        let edges: Vec<_> = g.edges().collect();
        let e = Enumerator::default();
        let mean = e
            .flip_even_expectation(&q, |x| edges.iter().map(|&(i, j)| f64::from(x[i] * x[j])).sum())
            .unwrap();
        let second = e
            .flip_even_expectation(&q, |x| edges.iter().map(|&(i, j)| f64::from(x[i] * x[j])).sum::<f64>().powi(2))
            .unwrap();
        assert!((m.mean - mean).abs() < 1e-12);
        assert!((m.variance_n1 - (second - mean * mean)).abs() < 1e-12);
    }

    #[test]
    fn forest_test_examples() {
        let tree = build_uniform_tree(TreeShape::CompleteBinary, 7, 0.3).unwrap();
        let plus = batch(7, &[vec![1; 7]]);
        let d = forest_deletion_test(&tree, &plus, 2).unwrap();
        assert_eq!(d.verdict, Verdict::Null);
        assert!((d.threshold - 5.0 * 0.3f64.tanh()).abs() < 1e-15);
        assert!(forest_deletion_test(&tree, &plus, 0).is_err());
        let neg = build_uniform_tree(TreeShape::CompleteBinary, 7, -0.3).unwrap();
        let alt = batch(7, &[vec![1; 7]]);
        assert_eq!(forest_deletion_test(&neg, &alt, 2).unwrap().verdict, Verdict::Alternate);
        let mixed = IsingModel::from_edges(3, &[(0, 1, 0.1), (1, 2, 0.2)]).unwrap();
        assert!(matches!(forest_deletion(&mixed, 1), Err(IsingError::Structure(_))));
    }

    #[test]
    fn tolerant_thresholds() {
        let tree = build_uniform_tree(TreeShape::CompleteBinary, 15, 0.2).unwrap();
        let base = forest_deletion(&tree, 4).unwrap().threshold();
        assert_eq!(tolerant_forest(&tree, 4, 0.0).unwrap().threshold(), base);
        assert!(tolerant_forest(&tree, 4, 1.0).is_err());
        let t0 = tolerant_tree(&tree, 4, 0.0).unwrap().threshold();
        let t1 = tolerant_tree(&tree, 4, 0.2).unwrap().threshold();
        assert!(t1 < t0);
        assert!(tolerant_tree(&tree, 4, 0.45).is_err());
        let tau = 0.2f64.tanh();
        let expect = 14.0 * tau - 4.0 * tau * (1.0 - tau) / 4.0;
        assert!((tree_change(&tree, 4).unwrap().threshold() - expect).abs() < 1e-14);
        let forest = IsingModel::from_edges(4, &[(0, 1, 0.2)]).unwrap();
        assert!(matches!(tree_change(&forest, 1), Err(IsingError::Structure(_))));
    }

    #[test]
    fn tree_statistic_drop_per_rewired_edge() {
        let a = 0.7f64;
        let tau = a.tanh();
        let p_model = build_uniform_tree(TreeShape::Path, 3, a).unwrap();
        let q = IsingModel::from_edges(3, &[(0, 2, a), (1, 2, a)]).unwrap();
        let g = p_model.network_structure();
        let under_p = exact_edge_sum_mean(&p_model, &g).unwrap();
        let under_q = exact_edge_sum_mean(&q, &g).unwrap();
        assert!(under_p - under_q >= tau - tau * tau - 1e-14);
    }

    #[test]
    fn ferro_test_class_checks() {
        let tree = build_uniform_tree(TreeShape::Path, 5, 0.1).unwrap();
        let t = ferro_deletion(&tree, 1, DEFAULT_FERRO_GAP, MeanSource::Exact).unwrap();
        assert!((t.threshold() - (4.0 * 0.1f64.tanh() - 0.1 / 800.0)).abs() < 1e-15);
        assert!(ferro_deletion(&tree, 0, DEFAULT_FERRO_GAP, MeanSource::Exact).is_err());
        let neg = build_uniform_tree(TreeShape::Path, 5, -0.1).unwrap();
        assert!(matches!(
            ferro_deletion(&neg, 1, DEFAULT_FERRO_GAP, MeanSource::Exact),
            Err(IsingError::ModelClass(_))
        ));
        let hot = build_uniform_tree(TreeShape::Star, 5, 0.3).unwrap();
        assert!(matches!(
            ferro_deletion(&hot, 1, DEFAULT_FERRO_GAP, MeanSource::Exact),
            Err(IsingError::ModelClass(_))
        ));
    }

    #[test]
    fn chow_liu_examples() {
        let path = build_uniform_tree(TreeShape::Path, 6, 0.5).unwrap();
        let learned = chow_liu_from_moments(&pair_moments(&path).unwrap());
        assert_eq!(learned, path.network_structure());
        let zeros = PairMoments::from_matrix(4, vec![0.0; 16]).unwrap();
        let star = chow_liu_from_moments(&zeros);
        assert_eq!(star.edges().collect::<Vec<_>>(), vec![(0, 1), (0, 2), (0, 3)]);
        let rows: Vec<Vec<i8>> = vec![vec![1, 1, 1, 1]];
        assert_eq!(chow_liu(&batch(4, &rows)), star);
    }

    #[test]
    fn structure_learning_decisions() {
        let path = build_uniform_tree(TreeShape::Path, 4, 1.0).unwrap();
        let data = batch(4, &[vec![1, 1, 1, 1], vec![1, 1, -1, -1], vec![-1, 1, 1, 1], vec![-1, -1, -1, 1]]);
        let d = sl_based_gof(&path, &data, 2).unwrap();
        assert!(d.statistic.fract() == 0.0);
        assert_eq!(d.verdict == Verdict::Alternate, d.statistic >= 1.0);
    }
}
