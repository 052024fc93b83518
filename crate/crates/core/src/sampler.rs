//! Glauber dynamics and exact sampling.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{IsingError, Result};
use crate::exact::{state_from_index, Enumerator};
use crate::model::{GraphStructure, IsingModel};

/// Single-site update count used when no autocorrelation estimate is available.
pub const DEFAULT_BURN_IN: usize = 1600;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplerMode {
    /// Independent Glauber chains, one per sample.
    Glauber,
    /// I.i.d. draws from the enumerated law.
    ExactOracle,
    /// One chain per batch: burn-in, then a sample every `interval` updates.
    Thinned { interval: usize },
}

impl std::str::FromStr for SamplerMode {
    type Err = IsingError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "glauber" => Ok(SamplerMode::Glauber),
            "exact" | "exact-oracle" => Ok(SamplerMode::ExactOracle),
            other => match other.strip_prefix("thinned:").map(str::parse::<usize>) {
                Some(Ok(interval)) if interval > 0 => Ok(SamplerMode::Thinned { interval }),
                _ => Err(IsingError::param(format!("unknown sampler mode `{other}`"))),
            },
        }
    }
}

impl std::fmt::Display for SamplerMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SamplerMode::Glauber => f.write_str("glauber"),
            SamplerMode::ExactOracle => f.write_str("exact-oracle"),
            SamplerMode::Thinned { interval } => write!(f, "thinned:{interval}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SamplerConfig {
    pub burn_in: usize,
    pub seed: u64,
    pub mode: SamplerMode,
}

impl SamplerConfig {
    pub fn glauber(burn_in: usize, seed: u64) -> Self {
        SamplerConfig { burn_in, seed, mode: SamplerMode::Glauber }
    }

    pub fn exact(seed: u64) -> Self {
        SamplerConfig { burn_in: 0, seed, mode: SamplerMode::ExactOracle }
    }
}

/// `n` configurations in {−1,+1}^p, stored row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SampleBatch {
    p: usize,
    n: usize,
    data: Vec<i8>,
    /// Configuration that produced the batch, if it was sampled here.
    pub provenance: Option<SamplerConfig>,
}

impl SampleBatch {
    pub fn from_rows(p: usize, rows: &[Vec<i8>]) -> Result<Self> {
        if rows.is_empty() {
            return Err(IsingError::param("a batch needs at least one sample"));
        }
        let mut data = Vec::with_capacity(p * rows.len());
        for row in rows {
            if row.len() != p {
                return Err(IsingError::Dimension { expected: p, found: row.len() });
            }
            if row.iter().any(|&v| v != 1 && v != -1) {
                return Err(IsingError::param("spins must be +1 or -1"));
            }
            data.extend_from_slice(row);
        }
        Ok(SampleBatch { p, n: rows.len(), data, provenance: None })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, k: usize) -> &[i8] {
        &self.data[k * self.p..(k + 1) * self.p]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[i8]> {
        self.data.chunks_exact(self.p)
    }

    /// The first `n` samples.
    pub fn prefix(&self, n: usize) -> Result<SampleBatch> {
        if n == 0 || n > self.n {
            return Err(IsingError::param(format!("prefix length {n} outside 1..={}", self.n)));
        }
        Ok(SampleBatch { p: self.p, n, data: self.data[..n * self.p].to_vec(), provenance: self.provenance })
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Independent generator for a path of indices below a master seed, e.g.
/// `(seed, [cell, trial, role, sample])`.
pub fn stream_rng(seed: u64, path: &[u64]) -> ChaCha8Rng {
    let mut key = splitmix64(seed);
    for &p in path {
        key = splitmix64(key ^ splitmix64(p ^ 0xD1B5_4A32_D192_ED03));
    }
    ChaCha8Rng::seed_from_u64(key)
}

/// Sparse neighbour lists used by the dynamics.
#[derive(Debug, Clone)]
pub struct Adjacency {
    offsets: Vec<usize>,
    neighbours: Vec<(u32, f64)>,
}

impl Adjacency {
    pub fn new(model: &IsingModel) -> Self {
        let p = model.p();
        let mut offsets = Vec::with_capacity(p + 1);
        let mut neighbours = Vec::new();
        offsets.push(0);
        for i in 0..p {
            for j in 0..p {
                let w = model.weight(i, j);
                if w != 0.0 {
                    neighbours.push((j as u32, w));
                }
            }
            offsets.push(neighbours.len());
        }
        Adjacency { offsets, neighbours }
    }

    fn p(&self) -> usize {
        self.offsets.len() - 1
    }

    #[inline]
    fn local_field(&self, state: &[i8], i: usize) -> f64 {
        self.neighbours[self.offsets[i]..self.offsets[i + 1]]
            .iter()
            .map(|&(j, w)| w * f64::from(state[j as usize]))
            .sum()
    }

    /// One heat-bath update at a uniformly chosen site.
    #[inline]
    pub fn step<R: Rng + ?Sized>(&self, state: &mut [i8], rng: &mut R) {
        let i = rng.random_range(0..self.p());
        let h = self.local_field(state, i);
        let up = 1.0 / (1.0 + (-2.0 * h).exp());
        state[i] = if rng.random::<f64>() < up { 1 } else { -1 };
    }
}

/// P(X_i = +1 | rest) = logistic(2 Σ_j θ_ij x_j).
pub fn conditional_plus_probability(model: &IsingModel, state: &[i8], i: usize) -> f64 {
    let h: f64 = (0..model.p()).map(|j| model.weight(i, j) * f64::from(state[j])).sum();
    1.0 / (1.0 + (-2.0 * h).exp())
}

/// One Glauber update in place.
pub fn glauber_step<R: Rng + ?Sized>(state: &mut [i8], model: &IsingModel, rng: &mut R) {
    let i = rng.random_range(0..model.p());
    let up = conditional_plus_probability(model, state, i);
    state[i] = if rng.random::<f64>() < up { 1 } else { -1 };
}

/// Push a distribution over states (index bit i set means x_i = −1)
/// through one Glauber step.
pub fn apply_glauber_transition(model: &IsingModel, dist: &[f64]) -> Result<Vec<f64>> {
    let p = model.p();
    if dist.len() != 1usize << p {
        return Err(IsingError::Dimension { expected: 1 << p, found: dist.len() });
    }
    let mut out = vec![0.0; dist.len()];
    let share = 1.0 / p as f64;
    for (idx, &mass) in dist.iter().enumerate() {
        let x = state_from_index(idx, p);
        for i in 0..p {
            let up = conditional_plus_probability(model, &x, i);
            let plus = idx & !(1 << i);
            out[plus] += mass * share * up;
            out[plus | 1 << i] += mass * share * (1.0 - up);
        }
    }
    Ok(out)
}

/// Sampler prepared for one model, reusable across many batches.
#[derive(Debug, Clone)]
pub struct Sampler {
    p: usize,
    config: SamplerConfig,
    kind: Prepared,
}

#[derive(Debug, Clone)]
enum Prepared {
    Glauber(Adjacency),
    Oracle(Vec<f64>),
}

impl Sampler {
    pub fn new(model: &IsingModel, config: SamplerConfig) -> Result<Self> {
        Self::with_enumerator(model, config, &Enumerator::default())
    }

    pub fn with_enumerator(model: &IsingModel, config: SamplerConfig, enumerator: &Enumerator) -> Result<Self> {
        let kind = match config.mode {
            SamplerMode::Glauber | SamplerMode::Thinned { .. } => Prepared::Glauber(Adjacency::new(model)),
            SamplerMode::ExactOracle => {
                let probs = enumerator.probabilities(model)?;
                let mut acc = 0.0;
                let cdf = probs
                    .iter()
                    .map(|q| {
                        acc += q;
                        acc
                    })
                    .collect();
                Prepared::Oracle(cdf)
            }
        };
        Ok(Sampler { p: model.p(), config, kind })
    }

    fn draw_one(&self, rng: &mut ChaCha8Rng, out: &mut [i8]) {
        match &self.kind {
            Prepared::Glauber(adj) => {
                for s in out.iter_mut() {
                    *s = if rng.random::<bool>() { 1 } else { -1 };
                }
                for _ in 0..self.config.burn_in {
                    adj.step(out, rng);
                }
            }
            Prepared::Oracle(cdf) => {
                let u = rng.random::<f64>() * cdf[cdf.len() - 1];
                let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
                for (i, s) in out.iter_mut().enumerate() {
                    *s = if idx >> i & 1 == 1 { -1 } else { 1 };
                }
            }
        }
    }

    /// `n` samples; sample k uses the stream `stream ++ [k]`. The thinned
    /// mode runs a single chain on `stream`, so its batches are prefixes of longer ones.
    pub fn draw(&self, n: usize, stream: &[u64]) -> Result<SampleBatch> {
        if n == 0 {
            return Err(IsingError::param("sample count must be at least 1"));
        }
        let mut data = vec![0i8; n * self.p];
        if let (SamplerMode::Thinned { interval }, Prepared::Glauber(adj)) = (self.config.mode, &self.kind) {
            let mut rng = stream_rng(self.config.seed, stream);
            let mut state: Vec<i8> = (0..self.p).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
            for _ in 0..self.config.burn_in {
                adj.step(&mut state, &mut rng);
            }
            for (k, row) in data.chunks_mut(self.p).enumerate() {
                if k > 0 {
                    for _ in 0..interval {
                        adj.step(&mut state, &mut rng);
                    }
                }
                row.copy_from_slice(&state);
            }
            return Ok(SampleBatch { p: self.p, n, data, provenance: Some(self.config) });
        }
        data.par_chunks_mut(self.p).enumerate().for_each(|(k, row)| {
            let mut path = stream.to_vec();
            path.push(k as u64);
            let mut rng = stream_rng(self.config.seed, &path);
            self.draw_one(&mut rng, row);
        });
        Ok(SampleBatch { p: self.p, n, data, provenance: Some(self.config) })
    }
}

/// Draw `n` samples from `model`.
pub fn sample(model: &IsingModel, n: usize, config: SamplerConfig) -> Result<SampleBatch> {
    Sampler::new(model, config)?.draw(n, &[])
}

/// Settings for [`estimate_autocorrelation_time`].
#[derive(Debug, Clone, Copy)]
pub struct AutocorrelationOptions {
    /// Steps discarded before recording.
    pub warmup: usize,
    /// Recorded single-site steps.
    pub steps: usize,
    /// Autocorrelation level that counts as decorrelated.
    pub threshold: f64,
    /// Largest lag examined.
    pub max_lag: usize,
}

impl AutocorrelationOptions {
    /// Defaults scaled to the node count.
    pub fn for_nodes(p: usize) -> Self {
        AutocorrelationOptions {
            warmup: 50 * p,
            steps: (20_000 * p).max(200_000),
            threshold: 0.05,
            max_lag: 100 * p,
        }
    }
}

/// Run one long chain and return the first lag at which the empirical
/// autocorrelation of `statistic` falls below the threshold.
pub fn estimate_autocorrelation_time<F, R>(
    model: &IsingModel,
    statistic: F,
    rng: &mut R,
    options: AutocorrelationOptions,
) -> Result<usize>
where
    F: Fn(&[i8]) -> f64,
    R: Rng + ?Sized,
{
    let adj = Adjacency::new(model);
    let mut state: Vec<i8> = (0..model.p()).map(|_| if rng.random::<bool>() { 1 } else { -1 }).collect();
    for _ in 0..options.warmup {
        adj.step(&mut state, rng);
    }
    let mut trace = Vec::with_capacity(options.steps);
    for _ in 0..options.steps {
        adj.step(&mut state, rng);
        trace.push(statistic(&state));
    }
    let n = trace.len();
    let mean = trace.iter().sum::<f64>() / n as f64;
    let centred: Vec<f64> = trace.iter().map(|v| v - mean).collect();
    let var: f64 = centred.iter().map(|v| v * v).sum::<f64>() / n as f64;
    if var <= 0.0 || !var.is_finite() {
        return Err(IsingError::Inconclusive { steps: n, partial_lag: 0 });
    }
    let max_lag = options.max_lag.min(n / 10);
    for lag in 1..=max_lag {
        let cov: f64 = centred[..n - lag].iter().zip(&centred[lag..]).map(|(a, b)| a * b).sum::<f64>()
            / (n - lag) as f64;
        if cov / var < options.threshold {
            return Ok(lag);
        }
    }
    Err(IsingError::Inconclusive { steps: n, partial_lag: max_lag })
}

/// Σ_{(i,j)∈g} x_i x_j for one configuration.
pub fn edge_sum(g: &GraphStructure, x: &[i8]) -> f64 {
    g.edges().map(|(i, j)| f64::from(x[i] * x[j])).sum()
}

/// Σ_i x_i.
pub fn magnetization(x: &[i8]) -> f64 {
    x.iter().map(|&v| f64::from(v)).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::pair_moments;
    use crate::model::{build_uniform_tree, build_widget, TreeShape, WidgetSpec};

    #[test]
    fn conditional_examples() {
        let empty = IsingModel::empty(3).unwrap();
        assert_eq!(conditional_plus_probability(&empty, &[1, -1, 1], 1), 0.5);
        let a = 0.4f64;
        let edge = IsingModel::from_edges(2, &[(0, 1, a)]).unwrap();
        let expect = a.exp() / (a.exp() + (-a).exp());
        assert!((conditional_plus_probability(&edge, &[-1, 1], 0) - expect).abs() < 1e-15);
    }

    #[test]
    fn empty_model_site_flips_are_fair() {
        let empty = IsingModel::empty(1).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut ups = 0;
        let trials = 40_000;
        for _ in 0..trials {
            let mut s = [1i8];
            glauber_step(&mut s, &empty, &mut rng);
            ups += i32::from(s[0] == 1);
        }
        let frac = f64::from(ups) / f64::from(trials);
        assert!((frac - 0.5).abs() < 4.0 * 0.5 / f64::from(trials).sqrt());
    }

    #[test]
    fn transition_preserves_boltzmann_law() {
        let tree = build_uniform_tree(TreeShape::CompleteBinary, 7, 0.8).unwrap();
        let mut model = tree.clone();
        model.set_weight(0, 6, -0.5).unwrap();
        let dist = Enumerator::default().probabilities(&model).unwrap();
        let next = apply_glauber_transition(&model, &dist).unwrap();
        let tv: f64 = dist.iter().zip(&next).map(|(a, b)| (a - b).abs()).sum::<f64>() / 2.0;
        assert!(tv < 1e-12, "{tv}");
    }

    #[test]
    fn empty_model_means_vanish() {
        let model = IsingModel::empty(5).unwrap();
        let n = 10_000;
        let batch = sample(&model, n, SamplerConfig::glauber(20, 11)).unwrap();
        for i in 0..5 {
            let mean: f64 = batch.rows().map(|r| f64::from(r[i])).sum::<f64>() / n as f64;
            assert!(mean.abs() < 4.0 / (n as f64).sqrt());
        }
    }

    #[test]
    fn batches_are_reproducible_across_thread_counts() {
        let model = build_widget(&WidgetSpec::triangle(0.7, 0.2)).unwrap().alternate;
        let cfg = SamplerConfig::glauber(50, 99);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sample(&model, 500, cfg).unwrap());
        let b = four.install(|| sample(&model, 500, cfg).unwrap());
        assert_eq!(a, b);
        assert_ne!(a, sample(&model, 500, SamplerConfig::glauber(50, 100)).unwrap());
    }

    #[test]
    fn oracle_sampler_matches_moments() {
        let model = build_widget(&WidgetSpec::triangle(0.9, 0.4)).unwrap().alternate;
        let exact = pair_moments(&model).unwrap();
        let n = 50_000;
        let batch = sample(&model, n, SamplerConfig::exact(5)).unwrap();
        for (i, j) in [(0, 1), (0, 2), (1, 2)] {
            let emp: f64 = batch.rows().map(|r| f64::from(r[i] * r[j])).sum::<f64>() / n as f64;
            let se = ((1.0 - exact.get(i, j).powi(2)) / n as f64).sqrt();
            assert!((emp - exact.get(i, j)).abs() < 5.0 * se);
        }
        assert!(matches!(
            sample(&IsingModel::empty(30).unwrap(), 1, SamplerConfig::exact(1)),
            Err(IsingError::Capacity { .. })
        ));
    }

    #[test]
    fn autocorrelation_of_empty_model_is_coupon_scale() {
        let p = 20;
        let model = IsingModel::empty(p).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let lag = estimate_autocorrelation_time(&model, magnetization, &mut rng, AutocorrelationOptions::for_nodes(p))
            .unwrap();
        assert!(lag <= 8 * p, "{lag}");
        assert!(lag >= p, "{lag}");
        let mut again = ChaCha8Rng::seed_from_u64(8);
        let repeat =
            estimate_autocorrelation_time(&model, magnetization, &mut again, AutocorrelationOptions::for_nodes(p))
                .unwrap();
        assert_eq!(lag, repeat);
    }

    #[test]
    fn constant_statistic_is_inconclusive() {
        let model = IsingModel::empty(4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let g = model.network_structure();
        let err = estimate_autocorrelation_time(&model, |x| edge_sum(&g, x), &mut rng, AutocorrelationOptions::for_nodes(4));
        assert!(matches!(err, Err(IsingError::Inconclusive { .. })));
    }
}
