//! Exact inference on small models.
//!
//! Enumeration walks the states with node 1 pinned to +1 (the zero-field law
//! is invariant under a global flip) in Gray-code order, split into a fixed
//! number of chunks whose partial results are reduced pairwise in chunk
//! order, so the result does not depend on the thread count.
//!
//! Clique-structured models are also handled by a count-based evaluator that
//! sums over the number of minus spins per group of exchangeable nodes.

use rayon::prelude::*;
use statrs::function::factorial::ln_binomial;

use crate::error::{IsingError, Result};
use crate::model::{ChangeEnsemble, EnsembleGenerator, IsingModel, WidgetFamily, WidgetSpec};

/// Largest node count handled by enumeration unless overridden.
pub const DEFAULT_ENUMERATION_LIMIT: usize = 22;

/// Nodes used to split the state space into parallel chunks.
const CHUNK_BITS: usize = 6;

/// Largest number of count configurations the grouped evaluator will visit.
const GROUPED_LIMIT: f64 = 5.0e7;

/// Natural log of a partition function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogPartition {
    pub value: f64,
}

/// A χ²-divergence value; always nonnegative.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Chi2Value(f64);

impl Chi2Value {
    /// Wrap a computed divergence. Negative inputs only arise from rounding
    /// and are mapped to zero.
    pub fn new(value: f64) -> Self {
        debug_assert!(!value.is_nan());
        Chi2Value(value.max(0.0))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Route used to evaluate χ².
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Chi2Method {
    /// 1 + χ²(Q‖P) = Z_P Z_{2Q−P} / Z_Q², from three log-partition functions.
    #[default]
    Identity,
    /// Σ_x P(x)·(Q(x)/P(x) − 1)², accumulated without cancellation.
    Enumeration,
}

/// Streaming log-sum-exp.
#[derive(Debug, Clone, Copy)]
struct LogSumExp {
    max: f64,
    sum: f64,
}

impl LogSumExp {
    const EMPTY: LogSumExp = LogSumExp { max: f64::NEG_INFINITY, sum: 0.0 };

    fn push(&mut self, v: f64) {
        if v <= self.max {
            self.sum += (v - self.max).exp();
        } else {
            self.sum = self.sum * (self.max - v).exp() + 1.0;
            self.max = v;
        }
    }

    fn merge(self, other: LogSumExp) -> LogSumExp {
        if other.max == f64::NEG_INFINITY {
            return self;
        }
        if self.max == f64::NEG_INFINITY {
            return other;
        }
        if self.max >= other.max {
            LogSumExp { max: self.max, sum: self.sum + other.sum * (other.max - self.max).exp() }
        } else {
            LogSumExp { max: other.max, sum: other.sum + self.sum * (self.max - other.max).exp() }
        }
    }

    fn value(self) -> f64 {
        self.max + self.sum.ln()
    }
}

fn log_sum_exp(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut acc = LogSumExp::EMPTY;
    for v in values {
        acc.push(v);
    }
    acc.value()
}

/// e^{log_p}·(e^d − 1), finite when e^{log_p} underflows.
fn weighted_expm1(log_p: f64, d: f64) -> f64 {
    if d > 1.0 {
        (log_p + d).exp() - log_p.exp()
    } else {
        log_p.exp() * d.exp_m1()
    }
}

/// e^{log_p}·(e^r − 1)².
fn weighted_sq_expm1(log_p: f64, r: f64) -> f64 {
    if r > 1.0 {
        (log_p + 2.0 * r).exp() * (-r).exp_m1().powi(2)
    } else {
        let e = r.exp_m1();
        log_p.exp() * e * e
    }
}

/// log(Z_Q/Z_P) from Σ P·(e^D − 1), falling back to the log-sum-exp value
/// when that sum is far from zero and linear scale loses accuracy.
fn log_ratio(shift: f64, fallback: f64) -> f64 {
    if shift > -0.5 && shift < 1e6 {
        shift.ln_1p()
    } else {
        fallback
    }
}

fn tree_reduce<A>(mut items: Vec<A>, combine: &(impl Fn(A, A) -> A + Sync)) -> A {
    assert!(!items.is_empty());
    while items.len() > 1 {
        let mut next = Vec::with_capacity(items.len().div_ceil(2));
        let mut it = items.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(combine(a, b)),
                None => next.push(a),
            }
        }
        items = next;
    }
    items.pop().unwrap()
}

/// Pairwise-moment matrix E[X_i X_j].
#[derive(Debug, Clone, PartialEq)]
pub struct PairMoments {
    p: usize,
    values: Vec<f64>,
}

impl PairMoments {
    pub fn from_matrix(p: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != p * p {
            return Err(IsingError::Dimension { expected: p * p, found: values.len() });
        }
        Ok(PairMoments { p, values })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.p + j]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }
}

/// Enumeration-based exact inference with a configurable node limit.
#[derive(Debug, Clone, Copy)]
pub struct Enumerator {
    limit: usize,
}

impl Default for Enumerator {
    fn default() -> Self {
        Enumerator { limit: DEFAULT_ENUMERATION_LIMIT }
    }
}

impl Enumerator {
    pub fn with_limit(limit: usize) -> Self {
        Enumerator { limit }
    }

    pub fn limit(&self) -> usize {
        self.limit
    }

    fn check(&self, p: usize) -> Result<()> {
        if p > self.limit {
            Err(IsingError::Capacity { nodes: p, limit: self.limit })
        } else {
            Ok(())
        }
    }

    /// Visit every state with node 0 at +1, passing the configuration and its
    /// energy under each listed model. Accumulators are folded per chunk and
    /// reduced in a fixed order.
    fn fold_half<A, I, V, C>(&self, models: &[&IsingModel], init: I, visit: V, combine: C) -> Result<A>
    where
        A: Send,
        I: Fn() -> A + Sync,
        V: Fn(&mut A, &[i8], &[f64]) + Sync,
        C: Fn(A, A) -> A + Sync,
    {
        let p = models[0].p();
        for m in models {
            if m.p() != p {
                return Err(IsingError::Dimension { expected: p, found: m.p() });
            }
        }
        self.check(p)?;
        let chunk_bits = CHUNK_BITS.min(p - 1);
        let free_lo = 1 + chunk_bits;
        let free = p - free_lo;
        let partials: Vec<A> = (0..1usize << chunk_bits)
            .into_par_iter()
            .map(|chunk| {
                let mut acc = init();
                let mut x = vec![1i8; p];
                for b in 0..chunk_bits {
                    if chunk >> b & 1 == 1 {
                        x[1 + b] = -1;
                    }
                }
                let k = models.len();
                let mut energy: Vec<f64> = models.iter().map(|m| m.energy(&x)).collect();
                // local fields of the free nodes under each model
                let mut field = vec![0.0; k * free];
                for (mi, m) in models.iter().enumerate() {
                    for v in 0..free {
                        let row = &m.matrix()[(free_lo + v) * p..(free_lo + v + 1) * p];
                        field[mi * free + v] = row.iter().zip(&x).map(|(w, &s)| w * f64::from(s)).sum();
                    }
                }
                visit(&mut acc, &x, &energy);
                for step in 1usize..(1usize << free) {
                    let v = step.trailing_zeros() as usize;
                    let node = free_lo + v;
                    let old = f64::from(x[node]);
                    for (mi, m) in models.iter().enumerate() {
                        energy[mi] -= 2.0 * old * field[mi * free + v];
                        let row = &m.matrix()[node * p..(node + 1) * p];
                        let fs = &mut field[mi * free..(mi + 1) * free];
                        for (u, f) in fs.iter_mut().enumerate() {
                            *f -= 2.0 * old * row[free_lo + u];
                        }
                    }
                    x[node] = -x[node];
                    visit(&mut acc, &x, &energy);
                }
                acc
            })
            .collect();
        Ok(tree_reduce(partials, &combine))
    }

    /// log Z by enumeration.
    pub fn log_partition(&self, model: &IsingModel) -> Result<LogPartition> {
        let lse = self.fold_half(
            &[model],
            || LogSumExp::EMPTY,
            |acc, _, e| acc.push(e[0]),
            LogSumExp::merge,
        )?;
        Ok(LogPartition { value: std::f64::consts::LN_2 + lse.value() })
    }

    /// E[f(X)] for a function invariant under a global spin flip.
    pub fn flip_even_expectation<F>(&self, model: &IsingModel, f: F) -> Result<f64>
    where
        F: Fn(&[i8]) -> f64 + Sync,
    {
        let half = self.log_partition(model)?.value - std::f64::consts::LN_2;
        self.fold_half(
            &[model],
            || 0.0,
            |acc, x, e| *acc += (e[0] - half).exp() * f(x),
            |a, b| a + b,
        )
    }

    /// Exact E[X_i X_j].
    pub fn pair_moments(&self, model: &IsingModel) -> Result<PairMoments> {
        let p = model.p();
        let half = self.log_partition(model)?.value - std::f64::consts::LN_2;
        let upper = self.fold_half(
            &[model],
            || vec![0.0; p * p],
            |acc, x, e| {
                let w = (e[0] - half).exp();
                for i in 0..p {
                    let wi = w * f64::from(x[i]);
                    let row = &mut acc[i * p..(i + 1) * p];
                    for j in (i + 1)..p {
                        row[j] += wi * f64::from(x[j]);
                    }
                }
            },
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )?;
        let mut values = vec![0.0; p * p];
        for i in 0..p {
            values[i * p + i] = 1.0;
            for j in (i + 1)..p {
                values[i * p + j] = upper[i * p + j];
                values[j * p + i] = upper[i * p + j];
            }
        }
        Ok(PairMoments { p, values })
    }

    /// χ²(Q‖P) by the chosen route.
    pub fn chi_square_with(&self, q: &IsingModel, p: &IsingModel, method: Chi2Method) -> Result<Chi2Value> {
        if q.p() != p.p() {
            return Err(IsingError::Dimension { expected: p.p(), found: q.p() });
        }
        match method {
            Chi2Method::Identity => {
                let mixed = q.combine(2.0, p, -1.0)?;
                let lp = self.log_partition(p)?.value;
                let lm = self.log_partition(&mixed)?.value;
                let lq = self.log_partition(q)?.value;
                Ok(Chi2Value::new((lp + lm - 2.0 * lq).exp_m1()))
            }
            Chi2Method::Enumeration => {
                // D = log(Q/P) up to a constant, evaluated on the weight
                // difference so that it carries no cancellation error.
                let diff = q.combine(1.0, p, -1.0)?;
                let half = self.log_partition(p)?.value - std::f64::consts::LN_2;
                let (_, d0) = self.fold_half(
                    &[p, &diff],
                    || (f64::NEG_INFINITY, 0.0),
                    |acc, _, e| {
                        if e[0] > acc.0 {
                            *acc = (e[0], e[1]);
                        }
                    },
                    |a, b| if b.0 > a.0 { b } else { a },
                )?;
                let (shift, lse) = self.fold_half(
                    &[p, &diff],
                    || (0.0, LogSumExp::EMPTY),
                    |acc, _, e| {
                        acc.0 += weighted_expm1(e[0] - half, e[1] - d0);
                        acc.1.push(e[0] - half + e[1] - d0);
                    },
                    |a, b| (a.0 + b.0, a.1.merge(b.1)),
                )?;
                let delta = log_ratio(shift, lse.value());
                let chi = self.fold_half(
                    &[p, &diff],
                    || 0.0,
                    |acc, _, e| *acc += weighted_sq_expm1(e[0] - half, (e[1] - d0) - delta),
                    |a, b| a + b,
                )?;
                Ok(Chi2Value::new(chi))
            }
        }
    }

    /// χ²(Q‖P) through the partition-function identity.
    pub fn chi_square(&self, q: &IsingModel, p: &IsingModel) -> Result<Chi2Value> {
        self.chi_square_with(q, p, Chi2Method::Identity)
    }

    /// Full probability vector; bit i of the index set means x_i = −1.
    pub fn probabilities(&self, model: &IsingModel) -> Result<Vec<f64>> {
        let p = model.p();
        self.check(p)?;
        let energies: Vec<f64> = (0..1usize << p)
            .into_par_iter()
            .map(|idx| model.energy(&state_from_index(idx, p)))
            .collect();
        let lz = log_sum_exp(energies.iter().copied());
        Ok(energies.into_iter().map(|e| (e - lz).exp()).collect())
    }
}

/// ±1 configuration encoded by `idx`: bit i set means x_i = −1.
pub fn state_from_index(idx: usize, p: usize) -> Vec<i8> {
    (0..p).map(|i| if idx >> i & 1 == 1 { -1 } else { 1 }).collect()
}

pub fn log_partition(model: &IsingModel) -> Result<LogPartition> {
    Enumerator::default().log_partition(model)
}

pub fn pair_moments(model: &IsingModel) -> Result<PairMoments> {
    Enumerator::default().pair_moments(model)
}

/// χ²(Q‖P) through the partition-function identity.
pub fn chi_square(q: &IsingModel, p: &IsingModel) -> Result<Chi2Value> {
    Enumerator::default().chi_square(q, p)
}

/// (1+κ)^n − 1.
pub fn tensorize(kappa: Chi2Value, n: u64) -> Chi2Value {
    Chi2Value::new((n as f64 * kappa.value().ln_1p()).exp_m1())
}

/// Mixture divergence of a lifted ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MixtureChi2 {
    /// χ² of one alternate block against the null block.
    pub per_block: f64,
    /// The per-block value tensorized over n samples.
    pub per_block_n: f64,
    /// Hypergeometric average over the overlap of two random subsets.
    pub exact: f64,
    /// exp(t² a_n / m) − 1.
    pub binomial_bound: f64,
}

/// (1/C(m,t)) Σ_k C(t,k) C(m−t,t−k) ((1+a)^k − 1).
pub fn hypergeometric_mixture(m: u64, t: u64, a: f64) -> f64 {
    assert!(t <= m);
    let ln_total = ln_binomial(m, t);
    let log1p_a = a.ln_1p();
    let k_min = (2 * t).saturating_sub(m);
    (k_min..=t)
        .map(|k| (ln_binomial(t, k) + ln_binomial(m - t, t - k) - ln_total).exp() * (k as f64 * log1p_a).exp_m1())
        .sum()
}

/// exp(t² a / m) − 1.
pub fn binomial_mixture_bound(m: u64, t: u64, a: f64) -> f64 {
    ((t * t) as f64 * a / m as f64).exp_m1()
}

/// χ² between the uniform mixture of an ensemble's n-fold alternates and the
/// n-fold null, in closed form.
pub fn mixture_chi_square(ensemble: &ChangeEnsemble, n: u64) -> Result<MixtureChi2> {
    let EnsembleGenerator::Blocks { null_block, alternate_block } = &ensemble.generator else {
        return Err(IsingError::param(
            "the closed-form mixture needs a block-lifted ensemble; use the enumerated mode",
        ));
    };
    let per_block = Enumerator::default().chi_square_with(alternate_block, null_block, Chi2Method::Enumeration)?;
    let a_n = tensorize(per_block, n).value();
    let (m, t) = (ensemble.block_count as u64, ensemble.changed_blocks as u64);
    Ok(MixtureChi2 {
        per_block: per_block.value(),
        per_block_n: a_n,
        exact: hypergeometric_mixture(m, t, a_n).max(0.0),
        binomial_bound: binomial_mixture_bound(m, t, a_n),
    })
}

/// The same mixture divergence computed by summing over all n-sample
/// datasets and every alternate. Needs `n·p` within the enumeration limit.
pub fn mixture_chi_square_enumerated(ensemble: &ChangeEnsemble, n: usize, enumerator: &Enumerator) -> Result<f64> {
    let p = ensemble.base.p();
    let total_bits = n * p;
    if total_bits > enumerator.limit() {
        return Err(IsingError::Capacity { nodes: total_bits, limit: enumerator.limit() });
    }
    let base = enumerator.probabilities(&ensemble.base)?;
    let ratios: Vec<Vec<f64>> = ensemble
        .subsets()
        .iter()
        .map(|s| {
            let q = enumerator.probabilities(&ensemble.alternate(s)?)?;
            Ok(q.iter().zip(&base).map(|(a, b)| a / b).collect())
        })
        .collect::<Result<_>>()?;
    let count = ratios.len() as f64;
    let mask = (1usize << p) - 1;
    let chi: f64 = (0..1usize << total_bits)
        .into_par_iter()
        .map(|idx| {
            let mut prob = 1.0;
            for k in 0..n {
                prob *= base[idx >> (k * p) & mask];
            }
            let mean_ratio: f64 = ratios
                .iter()
                .map(|r| (0..n).map(|k| r[idx >> (k * p) & mask]).product::<f64>())
                .sum::<f64>()
                / count;
            prob * (mean_ratio - 1.0).powi(2)
        })
        .sum();
    Ok(chi)
}

fn ln_choose(n: usize, k: usize) -> f64 {
    ln_binomial(n as u64, k as u64)
}

/// log S_1 and log S_2 of the clique-minus-edge widget on d+1 nodes:
/// S_1 = Σ_j C(d−1,j) e^{−2λ j(d+1−j)}, S_2 = Σ_j C(d−1,j) e^{−2λ j(d−1−j)}.
pub fn clique_edge_sums(d: usize, lambda: f64) -> (f64, f64) {
    assert!(d >= 1);
    let df = d as f64;
    let s1 = log_sum_exp((0..d).map(|j| {
        let jf = j as f64;
        ln_choose(d - 1, j) - 2.0 * lambda * jf * (df + 1.0 - jf)
    }));
    let s2 = log_sum_exp((0..d).map(|j| {
        let jf = j as f64;
        ln_choose(d - 1, j) - 2.0 * lambda * jf * (df - 1.0 - jf)
    }));
    (s1, s2)
}

/// log S_i of the clique-with-hole widget:
/// S_i = Σ_j C(d+1−ℓ, j) e^{−2λ j(d+1−2i−j)}.
pub fn clique_hole_sum(d: usize, lambda: f64, ell: usize, i: usize) -> f64 {
    assert!(ell <= d + 1);
    let rest = d + 1 - ell;
    let base = (d + 1) as f64 - 2.0 * i as f64;
    log_sum_exp((0..=rest).map(|j| {
        let jf = j as f64;
        ln_choose(rest, j) - 2.0 * lambda * jf * (base - jf)
    }))
}

/// log Z̃ for K_{d+1} at weight λ except edge (1,2) at λ−η.
pub fn clique_edge_ln_ztilde(d: usize, lambda: f64, eta: f64) -> f64 {
    let (s1, s2) = clique_edge_sums(d, lambda);
    let dl = d as f64 * lambda;
    log_sum_exp([dl - eta + s1, -dl + eta + s2])
}

/// log Z of the clique-minus-edge null (μ = changed weight), or of the
/// alternate when `changed` is zero.
pub fn clique_minus_edge_log_partition(d: usize, strong: f64, changed: f64) -> f64 {
    let df = d as f64;
    std::f64::consts::LN_2 + strong / 2.0 * (df * df - df) + clique_edge_ln_ztilde(d, strong, strong - changed)
}

/// log Z̃_ℓ for K_{d+1} at weight λ with the hole K_ℓ at weight λ−η.
pub fn clique_hole_ln_ztilde(d: usize, ell: usize, lambda: f64, eta: f64) -> f64 {
    let df = d as f64;
    log_sum_exp((0..=ell).map(|i| {
        let fi = i as f64;
        ln_choose(ell, i) + 2.0 * eta * fi * (ell as f64 - fi) - 2.0 * lambda * fi * (df + 1.0 - fi)
            + clique_hole_sum(d, lambda, ell, i)
    }))
}

/// log Z of the clique with a hole of weight `changed` on ℓ nodes.
pub fn clique_with_hole_log_partition(d: usize, ell: usize, strong: f64, changed: f64) -> f64 {
    let n = (d + 1) as f64;
    let l = ell as f64;
    let eta = strong - changed;
    strong / 2.0 * (n * n - n) - eta / 2.0 * (l * l - l) + clique_hole_ln_ztilde(d, ell, strong, eta)
}

/// Model whose nodes split into groups of exchangeable spins: every pair in
/// groups (g, h) carries `coupling[g][h]`, pairs inside group g carry `coupling[g][g]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedModel {
    sizes: Vec<usize>,
    coupling: Vec<f64>,
}

impl GroupedModel {
    pub fn new(sizes: Vec<usize>, coupling: Vec<f64>) -> Result<Self> {
        let g = sizes.len();
        if g == 0 || sizes.contains(&0) {
            return Err(IsingError::param("groups must be nonempty"));
        }
        if coupling.len() != g * g {
            return Err(IsingError::Dimension { expected: g * g, found: coupling.len() });
        }
        for a in 0..g {
            for b in 0..g {
                if coupling[a * g + b] != coupling[b * g + a] || !coupling[a * g + b].is_finite() {
                    return Err(IsingError::param("group couplings must be finite and symmetric"));
                }
            }
        }
        Ok(GroupedModel { sizes, coupling })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn node_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    fn groups(&self) -> usize {
        self.sizes.len()
    }

    fn c(&self, a: usize, b: usize) -> f64 {
        self.coupling[a * self.groups() + b]
    }

    /// Expand into an explicit model; group g occupies a consecutive run of nodes.
    pub fn to_ising(&self) -> Result<IsingModel> {
        let mut label = Vec::with_capacity(self.node_count());
        for (g, &n) in self.sizes.iter().enumerate() {
            label.extend(std::iter::repeat_n(g, n));
        }
        let p = label.len();
        let mut m = IsingModel::empty(p)?;
        for i in 0..p {
            for j in (i + 1)..p {
                m.set_weight(i, j, self.c(label[i], label[j]))?;
            }
        }
        Ok(m)
    }

    /// Energy given the minus-spin count of each group.
    fn energy(&self, minus: &[usize]) -> f64 {
        let g = self.groups();
        let mag: Vec<f64> = self.sizes.iter().zip(minus).map(|(&n, &k)| n as f64 - 2.0 * k as f64).collect();
        let mut e = 0.0;
        for a in 0..g {
            e += self.c(a, a) * (mag[a] * mag[a] - self.sizes[a] as f64) / 2.0;
            for b in (a + 1)..g {
                e += self.c(a, b) * mag[a] * mag[b];
            }
        }
        e
    }

    fn configurations(&self) -> Result<Vec<(f64, Vec<usize>)>> {
        let count: f64 = self.sizes.iter().map(|&n| (n + 1) as f64).product();
        if count > GROUPED_LIMIT {
            return Err(IsingError::Capacity { nodes: self.node_count(), limit: DEFAULT_ENUMERATION_LIMIT });
        }
        let mut out = Vec::with_capacity(count as usize);
        let mut minus = vec![0usize; self.groups()];
        loop {
            let ln_mult: f64 = self.sizes.iter().zip(&minus).map(|(&n, &k)| ln_choose(n, k)).sum();
            out.push((ln_mult, minus.clone()));
            let mut g = 0;
            loop {
                if g == minus.len() {
                    return Ok(out);
                }
                if minus[g] < self.sizes[g] {
                    minus[g] += 1;
                    break;
                }
                minus[g] = 0;
                g += 1;
            }
        }
    }

    pub fn log_partition(&self) -> Result<f64> {
        Ok(log_sum_exp(self.configurations()?.into_iter().map(|(lm, k)| lm + self.energy(&k))))
    }

    fn check_same_groups(&self, other: &GroupedModel) -> Result<()> {
        if self.sizes != other.sizes {
            return Err(IsingError::param("grouped models must share their group sizes"));
        }
        Ok(())
    }

    /// χ²(self‖p) by the chosen route.
    pub fn chi_square_against(&self, p: &GroupedModel, method: Chi2Method) -> Result<Chi2Value> {
        self.check_same_groups(p)?;
        match method {
            Chi2Method::Identity => {
                let g = self.groups();
                let mixed: Vec<f64> = (0..g * g).map(|i| 2.0 * self.coupling[i] - p.coupling[i]).collect();
                let mixed = GroupedModel::new(self.sizes.clone(), mixed)?;
                let v = p.log_partition()? + mixed.log_partition()? - 2.0 * self.log_partition()?;
                Ok(Chi2Value::new(v.exp_m1()))
            }
            Chi2Method::Enumeration => {
                let diff: Vec<f64> = self.coupling.iter().zip(&p.coupling).map(|(a, b)| a - b).collect();
                let diff = GroupedModel::new(self.sizes.clone(), diff)?;
                let configs = self.configurations()?;
                let weights: Vec<f64> = configs.iter().map(|(lm, k)| lm + p.energy(k)).collect();
                let lz = log_sum_exp(weights.iter().copied());
                let mode = (0..weights.len()).fold(0, |best, i| if weights[i] > weights[best] { i } else { best });
                let d0 = diff.energy(&configs[mode].1);
                let terms: Vec<(f64, f64)> =
                    configs.iter().zip(&weights).map(|((_, k), w)| (w - lz, diff.energy(k) - d0)).collect();
                let shift = terms.iter().map(|&(lp, d)| weighted_expm1(lp, d)).sum::<f64>();
                let delta = log_ratio(shift, log_sum_exp(terms.iter().map(|&(lp, d)| lp + d)));
                let chi = terms.iter().map(|&(lp, d)| weighted_sq_expm1(lp, d - delta)).sum();
                Ok(Chi2Value::new(chi))
            }
        }
    }
}

/// Grouped form (null, alternate) of a widget. Node order matches
/// [`crate::model::build_widget`] up to a relabeling within the fan, which is
/// expanded as singleton groups.
pub fn grouped_widget(spec: &WidgetSpec) -> Result<(GroupedModel, GroupedModel)> {
    spec.validate()?;
    let (lam, mu) = (spec.strong, spec.changed);
    let build = |sizes: Vec<usize>, f: &dyn Fn(usize, usize, bool) -> f64| -> Result<(GroupedModel, GroupedModel)> {
        let g = sizes.len();
        let mut null = vec![0.0; g * g];
        let mut alt = vec![0.0; g * g];
        for a in 0..g {
            for b in 0..g {
                null[a * g + b] = f(a.min(b), a.max(b), false);
                alt[a * g + b] = f(a.min(b), a.max(b), true);
            }
        }
        Ok((GroupedModel::new(sizes.clone(), null)?, GroupedModel::new(sizes, alt)?))
    };
    match spec.family {
        WidgetFamily::CliqueMinusEdge => build(vec![1, 1, spec.size - 1], &|a, b, alt| match (a, b) {
            (0, 1) => {
                if alt {
                    0.0
                } else {
                    mu
                }
            }
            (0, 0) | (1, 1) => 0.0,
            _ => lam,
        }),
        WidgetFamily::CliqueWithHole => build(vec![spec.ell, spec.size + 1 - spec.ell], &|a, b, alt| match (a, b) {
            (0, 0) => {
                if alt {
                    0.0
                } else {
                    mu
                }
            }
            _ => lam,
        }),
        WidgetFamily::EmmentalerExtraNode => {
            let groups = spec.group_count();
            let mut sizes = vec![spec.ell + 1; groups];
            sizes.push(1);
            build(sizes, &|a, b, alt| {
                if a == b {
                    0.0
                } else if b == groups {
                    if a + 1 == groups {
                        if alt {
                            mu
                        } else {
                            0.0
                        }
                    } else {
                        lam
                    }
                } else {
                    lam
                }
            })
        }
        WidgetFamily::EmmentalerVsFull => {
            build(vec![spec.ell + 1; spec.group_count()], &|a, b, alt| {
                if a != b {
                    lam
                } else if alt {
                    mu
                } else {
                    0.0
                }
            })
        }
        WidgetFamily::CliqueVsEmpty => build(vec![spec.size], &|_, _, alt| if alt { 0.0 } else { mu }),
        WidgetFamily::SingleEdge | WidgetFamily::Triangle | WidgetFamily::Fan => {
            let pair = crate::model::build_widget(spec)?;
            let n = pair.null.p();
            let to_groups = |m: &IsingModel| GroupedModel::new(vec![1; n], m.matrix().to_vec());
            Ok((to_groups(&pair.null)?, to_groups(&pair.alternate)?))
        }
    }
}
