//! Monte-Carlo risk estimation and the experiment sweeps built on it.
//!
//! Random streams are addressed as `(seed, [row, trial, role, sample])`,
//! where `row` indexes the separation `s` of a sweep and `role` is 0 for
//! null samples, 1 for drawing the alternate and 2 for alternate samples.
//! Samples do not depend on `n`, so the batch used for a smaller `n` is a
//! prefix of the batch used for a larger one and a whole row of a heatmap is
//! simulated once.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::str::FromStr;

use rand::seq::IndexedRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{IsingError, Result};
use crate::model::{build_uniform_tree, random_edge_deletion_with, ChangeEnsemble, IsingModel, TreeShape, UnionFind};
use crate::sampler::{
    edge_sum, estimate_autocorrelation_time, stream_rng, AutocorrelationOptions, Sampler, SamplerConfig, SamplerMode,
    DEFAULT_BURN_IN,
};
use crate::stattests::{self, chow_liu, GofTest, MeanSource, Verdict, DEFAULT_FERRO_GAP};

pub const DEFAULT_TRIALS: usize = 100;

const ROLE_NULL: u64 = 0;
const ROLE_GENERATE: u64 = 1;
const ROLE_ALTERNATE: u64 = 2;

/// Error counts of a test over repeated trials.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RiskEstimate {
    pub false_alarms: usize,
    pub missed_detections: usize,
    pub trials: usize,
}

impl RiskEstimate {
    pub fn false_alarm_rate(&self) -> f64 {
        self.false_alarms as f64 / self.trials as f64
    }

    pub fn missed_detection_rate(&self) -> f64 {
        self.missed_detections as f64 / self.trials as f64
    }

    /// False-alarm rate plus missed-detection rate, in [0, 2].
    pub fn risk(&self) -> f64 {
        self.false_alarm_rate() + self.missed_detection_rate()
    }

    /// Half-width of a normal-approximation 95% interval for the risk, with
    /// a continuity correction of 1/(2T) per rate.
    pub fn ci95(&self) -> f64 {
        let t = self.trials as f64;
        let (fa, md) = (self.false_alarm_rate(), self.missed_detection_rate());
        1.96 * (fa * (1.0 - fa) / t + md * (1.0 - md) / t).sqrt() + 1.0 / t
    }
}

/// Produces the alternate model of one trial.
pub trait AlternateGenerator: Sync {
    fn generate(&self, null: &IsingModel, rng: &mut ChaCha8Rng) -> Result<IsingModel>;
}

/// Zero out `s` uniformly chosen edges.
#[derive(Debug, Clone, Copy)]
pub struct RandomDeletion {
    pub s: usize,
}

impl AlternateGenerator for RandomDeletion {
    fn generate(&self, null: &IsingModel, rng: &mut ChaCha8Rng) -> Result<IsingModel> {
        random_edge_deletion_with(null, self.s, rng)
    }
}

/// Replace ⌈s/2⌉ edges of a tree, one at a time, by edges outside the null
/// graph that reconnect the two sides; the result is a tree at distance 2⌈s/2⌉.
#[derive(Debug, Clone, Copy)]
pub struct RandomRewiring {
    pub s: usize,
}

impl AlternateGenerator for RandomRewiring {
    fn generate(&self, null: &IsingModel, rng: &mut ChaCha8Rng) -> Result<IsingModel> {
        let g = null.network_structure();
        if !g.is_spanning_tree() {
            return Err(IsingError::Structure("rewiring needs a spanning tree".into()));
        }
        let p = null.p();
        let swaps = self.s.div_ceil(2);
        if swaps > p - 1 {
            return Err(IsingError::param(format!("cannot rewire {swaps} edges of a tree on {p} nodes")));
        }
        let mut q = null.clone();
        let mut original: Vec<(usize, usize, f64)> = null.edges();
        for _ in 0..swaps {
            let k = rng.random_range(0..original.len());
            let (i, j, w) = original.swap_remove(k);
            q.set_weight(i, j, 0.0)?;
            let mut uf = UnionFind::new(p);
            for (a, b, _) in q.edges() {
                uf.union(a, b);
            }
            let root = uf.find(i);
            let candidates: Vec<(usize, usize)> = (0..p)
                .flat_map(|a| ((a + 1)..p).map(move |b| (a, b)))
                .filter(|&(a, b)| (uf.find(a) == root) != (uf.find(b) == root) && !g.contains(a, b))
                .collect();
            let &(a, b) = candidates
                .choose(rng)
                .ok_or_else(|| IsingError::Structure("no replacement edge outside the null graph".into()))?;
            q.set_weight(a, b, w)?;
        }
        Ok(q)
    }
}

/// Always the same alternate.
#[derive(Debug, Clone)]
pub struct FixedAlternate(pub IsingModel);

impl AlternateGenerator for FixedAlternate {
    fn generate(&self, _null: &IsingModel, _rng: &mut ChaCha8Rng) -> Result<IsingModel> {
        Ok(self.0.clone())
    }
}

impl AlternateGenerator for ChangeEnsemble {
    fn generate(&self, _null: &IsingModel, rng: &mut ChaCha8Rng) -> Result<IsingModel> {
        self.random_alternate(rng)
    }
}

/// Whether each trial draws its own alternate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AlternateMode {
    #[default]
    Fresh,
    Fixed,
}

impl FromStr for AlternateMode {
    type Err = IsingError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fresh" => Ok(AlternateMode::Fresh),
            "fixed" => Ok(AlternateMode::Fixed),
            other => Err(IsingError::param(format!("unknown alternate mode `{other}`"))),
        }
    }
}

/// Trial settings shared by every `n` of a risk curve.
#[derive(Debug, Clone, Copy)]
pub struct TrialSettings {
    pub trials: usize,
    pub sampler: SamplerConfig,
    pub alternates: AlternateMode,
    /// Leading stream index, distinct per sweep row.
    pub row: u64,
}

/// Risk at each `n` of `n_grid`, sharing sample prefixes across `n`.
pub fn estimate_risk_curve(
    null: &IsingModel,
    generator: &dyn AlternateGenerator,
    test: &dyn GofTest,
    n_grid: &[usize],
    settings: &TrialSettings,
) -> Result<Vec<RiskEstimate>> {
    if settings.trials == 0 {
        return Err(IsingError::param("trials must be at least 1"));
    }
    let n_max = *n_grid.iter().max().ok_or_else(|| IsingError::param("n grid is empty"))?;
    if n_grid.contains(&0) {
        return Err(IsingError::param("sample sizes must be at least 1"));
    }
    let seed = settings.sampler.seed;
    let row = settings.row;
    let null_sampler = Sampler::new(null, settings.sampler)?;
    let fixed = match settings.alternates {
        AlternateMode::Fixed => {
            let q = generator.generate(null, &mut stream_rng(seed, &[row, u64::MAX]))?;
            Some(Sampler::new(&q, settings.sampler)?)
        }
        AlternateMode::Fresh => None,
    };
    let outcomes: Vec<Vec<(bool, bool)>> = (0..settings.trials)
        .into_par_iter()
        .map(|trial| {
            let t = trial as u64;
            let run = || -> Result<Vec<(bool, bool)>> {
                let null_batch = null_sampler.draw(n_max, &[row, t, ROLE_NULL])?;
                let alt_sampler = match &fixed {
                    Some(s) => s.clone(),
                    None => {
                        let q = generator.generate(null, &mut stream_rng(seed, &[row, t, ROLE_GENERATE]))?;
                        Sampler::new(&q, settings.sampler)?
                    }
                };
                let alt_batch = alt_sampler.draw(n_max, &[row, t, ROLE_ALTERNATE])?;
                n_grid
                    .iter()
                    .map(|&n| {
                        let fa = test.decide(&null_batch.prefix(n)?)?.verdict == Verdict::Alternate;
                        let md = test.decide(&alt_batch.prefix(n)?)?.verdict == Verdict::Null;
                        Ok((fa, md))
                    })
                    .collect()
            };
            run().map_err(|e| IsingError::Trial { trial, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    Ok((0..n_grid.len())
        .map(|k| {
            let mut est = RiskEstimate { trials: settings.trials, ..Default::default() };
            for o in &outcomes {
                est.false_alarms += usize::from(o[k].0);
                est.missed_detections += usize::from(o[k].1);
            }
            est
        })
        .collect())
}

/// Risk of `test` at a single sample size.
pub fn estimate_risk(
    null: &IsingModel,
    generator: &dyn AlternateGenerator,
    test: &dyn GofTest,
    n: usize,
    settings: &TrialSettings,
) -> Result<RiskEstimate> {
    Ok(estimate_risk_curve(null, generator, test, &[n], settings)?[0])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Forest,
    Tree,
    TolerantForest,
    TolerantTree,
    Ferro,
    StructureLearning,
}

impl FromStr for TestKind {
    type Err = IsingError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "forest" => TestKind::Forest,
            "tree" => TestKind::Tree,
            "tolerant-forest" => TestKind::TolerantForest,
            "tolerant-tree" => TestKind::TolerantTree,
            "ferro" => TestKind::Ferro,
            "structure-learning" | "sl" => TestKind::StructureLearning,
            other => return Err(IsingError::param(format!("unknown test `{other}`"))),
        })
    }
}

/// Test plus the matching alternate generator for separation `s`.
pub fn build_test(
    kind: TestKind,
    null: &IsingModel,
    s: usize,
    epsilon: f64,
    gap: f64,
) -> Result<(Box<dyn GofTest>, Box<dyn AlternateGenerator>)> {
    let deletion = Box::new(RandomDeletion { s });
    Ok(match kind {
        TestKind::Forest => (Box::new(stattests::forest_deletion(null, s)?), deletion),
        TestKind::TolerantForest => (Box::new(stattests::tolerant_forest(null, s, epsilon)?), deletion),
        TestKind::Tree => (Box::new(stattests::tree_change(null, s)?), Box::new(RandomRewiring { s })),
        TestKind::TolerantTree => {
            (Box::new(stattests::tolerant_tree(null, s, epsilon)?), Box::new(RandomRewiring { s }))
        }
        TestKind::Ferro => (Box::new(stattests::ferro_deletion(null, s, gap, MeanSource::Exact)?), deletion),
        TestKind::StructureLearning => (Box::new(stattests::structure_learning(null, s)?), deletion),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BurnIn {
    Fixed(usize),
    /// Four times the estimated autocorrelation time of 𝒯 under the null.
    Auto,
}

impl FromStr for BurnIn {
    type Err = IsingError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "auto" {
            return Ok(BurnIn::Auto);
        }
        s.parse()
            .map(BurnIn::Fixed)
            .map_err(|_| IsingError::param(format!("burn-in must be a step count or `auto`, got `{s}`")))
    }
}

/// Resolve a burn-in policy for `model`.
pub fn resolve_burn_in(policy: BurnIn, model: &IsingModel, seed: u64) -> Result<usize> {
    match policy {
        BurnIn::Fixed(steps) => Ok(steps),
        BurnIn::Auto => {
            let g = model.network_structure();
            let mut rng = stream_rng(seed, &[u64::MAX - 1]);
            let lag = estimate_autocorrelation_time(
                model,
                |x| edge_sum(&g, x),
                &mut rng,
                AutocorrelationOptions::for_nodes(model.p()),
            )?;
            Ok(4 * lag)
        }
    }
}

/// Settings of a sweep. Keys of the `key = value` form are the field names.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub shape: TreeShape,
    pub p: usize,
    pub alpha: f64,
    pub test: TestKind,
    pub epsilon: f64,
    pub gap: f64,
    pub s_grid: Vec<usize>,
    pub n_grid: Vec<usize>,
    pub trials: usize,
    pub seed: u64,
    pub burn_in: BurnIn,
    pub sampler: SamplerMode,
    pub alternates: AlternateMode,
}

fn step_grid(start: usize, stop: usize, step: usize) -> Vec<usize> {
    (start..=stop).step_by(step).collect()
}

impl Default for ExperimentConfig {
    /// p = 127 complete binary tree at α = 0.1, forest test, burn-in 1600.
    fn default() -> Self {
        ExperimentConfig {
            shape: TreeShape::CompleteBinary,
            p: 127,
            alpha: 0.1,
            test: TestKind::Forest,
            epsilon: 0.0,
            gap: DEFAULT_FERRO_GAP,
            s_grid: step_grid(3, 60, 3),
            n_grid: step_grid(20, 480, 20),
            trials: DEFAULT_TRIALS,
            seed: 20_200_601,
            burn_in: BurnIn::Fixed(DEFAULT_BURN_IN),
            sampler: SamplerMode::Glauber,
            alternates: AlternateMode::Fresh,
        }
    }
}

/// Parse `a,b,c` or `start:stop:step`.
pub fn parse_grid(text: &str) -> Result<Vec<usize>> {
    let bad = || IsingError::param(format!("invalid grid `{text}`"));
    let grid: Vec<usize> = if let Some((a, rest)) = text.split_once(':') {
        let (b, c) = rest.split_once(':').unwrap_or((rest, "1"));
        let (a, b, c): (usize, usize, usize) = (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
            c.trim().parse().map_err(|_| bad())?,
        );
        if c == 0 {
            return Err(bad());
        }
        step_grid(a, b, c)
    } else {
        text.split(',').map(|t| t.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?
    };
    if grid.is_empty() {
        return Err(bad());
    }
    Ok(grid)
}

impl ExperimentConfig {
    /// The p = 63 variant with burn-in 800 and an s-grid shifted to match 2√p.
    pub fn reduced() -> Self {
        ExperimentConfig { p: 63, s_grid: step_grid(2, 42, 2), burn_in: BurnIn::Fixed(800), ..Default::default() }
    }

    /// Override fields from parsed `key = value` pairs.
    pub fn apply(&mut self, entries: &BTreeMap<String, String>) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse().map_err(|_| IsingError::param(format!("invalid value `{v}` for `{key}`")))
        }
        for (k, v) in entries {
            match k.as_str() {
                "shape" => self.shape = v.parse()?,
                "p" => self.p = num(k, v)?,
                "alpha" => self.alpha = num(k, v)?,
                "test" => self.test = v.parse()?,
                "epsilon" => self.epsilon = num(k, v)?,
                "gap" => self.gap = num(k, v)?,
                "s_grid" => self.s_grid = parse_grid(v)?,
                "n_grid" => self.n_grid = parse_grid(v)?,
                "trials" => self.trials = num(k, v)?,
                "seed" => self.seed = num(k, v)?,
                "burn_in" => self.burn_in = v.parse()?,
                "sampler" => self.sampler = v.parse()?,
                "alternates" => self.alternates = v.parse()?,
                "csv" | "svg" | "out" => {}
                other => return Err(IsingError::param(format!("unknown config key `{other}`"))),
            }
        }
        self.validate()
    }

    pub fn validate(&self) -> Result<()> {
        if self.s_grid.is_empty() || self.n_grid.is_empty() {
            return Err(IsingError::param("grids must be nonempty"));
        }
        if self.trials == 0 {
            return Err(IsingError::param("trials must be at least 1"));
        }
        if self.n_grid.contains(&0) || self.s_grid.contains(&0) {
            return Err(IsingError::param("grid entries must be positive"));
        }
        Ok(())
    }

    pub fn null_model(&self) -> Result<IsingModel> {
        build_uniform_tree(self.shape, self.p, self.alpha)
    }

    fn sampler_config(&self, null: &IsingModel) -> Result<SamplerConfig> {
        Ok(SamplerConfig { burn_in: resolve_burn_in(self.burn_in, null, self.seed)?, seed: self.seed, mode: self.sampler })
    }
}

/// Risk over an s × n grid, stored row-major by s.
#[derive(Debug, Clone, PartialEq)]
pub struct Heatmap {
    pub s_grid: Vec<usize>,
    pub n_grid: Vec<usize>,
    pub cells: Vec<RiskEstimate>,
}

impl Heatmap {
    pub fn get(&self, s_index: usize, n_index: usize) -> &RiskEstimate {
        &self.cells[s_index * self.n_grid.len() + n_index]
    }

    /// Cells as `(s, n, estimate)`.
    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, &RiskEstimate)> {
        let w = self.n_grid.len();
        self.cells.iter().enumerate().map(move |(k, e)| (self.s_grid[k / w], self.n_grid[k % w], e))
    }

    /// CSV with header `s,n,fa,md,trials,risk,ci95`; fa and md are counts.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["s", "n", "fa", "md", "trials", "risk", "ci95"])?;
        for (s, n, e) in self.iter() {
            w.write_record([
                s.to_string(),
                n.to_string(),
                e.false_alarms.to_string(),
                e.missed_detections.to_string(),
                e.trials.to_string(),
                e.risk().to_string(),
                e.ci95().to_string(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| IsingError::Io(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
    }

    pub fn from_csv(text: &str) -> Result<Heatmap> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let mut s_grid: Vec<usize> = Vec::new();
        let mut n_grid: Vec<usize> = Vec::new();
        let mut cells = Vec::new();
        for (k, rec) in r.records().enumerate() {
            let rec = rec?;
            let line = k + 2;
            let get = |i: usize| -> Result<usize> {
                rec.get(i)
                    .and_then(|v| v.parse().ok())
                    .ok_or_else(|| IsingError::Parse { line, message: format!("bad column {i}") })
            };
            let (s, n) = (get(0)?, get(1)?);
            if s_grid.last() != Some(&s) {
                s_grid.push(s);
            }
            if s_grid.len() == 1 {
                n_grid.push(n);
            }
            cells.push(RiskEstimate { false_alarms: get(2)?, missed_detections: get(3)?, trials: get(4)? });
        }
        if cells.len() != s_grid.len() * n_grid.len() {
            return Err(IsingError::Parse { line: 1, message: "rows do not form a full grid".into() });
        }
        Ok(Heatmap { s_grid, n_grid, cells })
    }

    /// Self-contained SVG: black above 0.35, white below 0.15, orange between.
    pub fn to_svg(&self) -> String {
        const CELL: usize = 24;
        const LEFT: usize = 48;
        const TOP: usize = 24;
        let (w, h) = (self.n_grid.len(), self.s_grid.len());
        let width = LEFT + CELL * w + 8;
        let height = TOP + CELL * h + 40;
        let mut out = String::new();
        let _ = writeln!(
            out,
            r#"<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" font-family="sans-serif" font-size="9">"#
        );
        let _ = writeln!(out, r#"<rect x="0" y="0" width="{width}" height="{height}" fill="rgb(240,240,240)"/>"#);
        for (si, &s) in self.s_grid.iter().enumerate() {
            // s increases upwards
            let y = TOP + CELL * (h - 1 - si);
            let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="end">{s}</text>"#, LEFT - 4, y + CELL / 2 + 3);
            for ni in 0..w {
                let risk = self.get(si, ni).risk();
                let fill = if risk > 0.35 {
                    "rgb(0,0,0)"
                } else if risk < 0.15 {
                    "rgb(255,255,255)"
                } else {
                    "rgb(255,140,0)"
                };
                let _ = writeln!(
                    out,
                    r#"<rect x="{}" y="{y}" width="{CELL}" height="{CELL}" style="fill:{fill};stroke:rgb(128,128,128);stroke-width:0.5"><title>s={s} n={} risk={risk:.3}</title></rect>"#,
                    LEFT + CELL * ni,
                    self.n_grid[ni]
                );
            }
        }
        for (ni, &n) in self.n_grid.iter().enumerate() {
            let _ = writeln!(
                out,
                r#"<text x="{}" y="{}" text-anchor="middle">{n}</text>"#,
                LEFT + CELL * ni + CELL / 2,
                TOP + CELL * h + 12
            );
        }
        let _ = writeln!(out, r#"<text x="{}" y="{}" text-anchor="middle">n</text>"#, LEFT + CELL * w / 2, height - 8);
        let _ = writeln!(out, r#"<text x="12" y="{}" text-anchor="middle">s</text>"#, TOP + CELL * h / 2);
        out.push_str("</svg>\n");
        out
    }
}

/// Simulate every cell of the configured grid.
pub fn risk_heatmap(config: &ExperimentConfig) -> Result<Heatmap> {
    config.validate()?;
    let null = config.null_model()?;
    let sampler = config.sampler_config(&null)?;
    let mut cells = Vec::with_capacity(config.s_grid.len() * config.n_grid.len());
    for (row, &s) in config.s_grid.iter().enumerate() {
        let (test, generator) = build_test(config.test, &null, s, config.epsilon, config.gap)?;
        let settings = TrialSettings { trials: config.trials, sampler, alternates: config.alternates, row: row as u64 };
        cells.extend(estimate_risk_curve(&null, generator.as_ref(), test.as_ref(), &config.n_grid, &settings)?);
    }
    Ok(Heatmap { s_grid: config.s_grid.clone(), n_grid: config.n_grid.clone(), cells })
}

/// Mean Chow–Liu error on null data at one sample size.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    pub n: usize,
    pub mean_edge_error: f64,
    pub trials: usize,
}

/// Mean |G(P) △ Ĝ| of the Chow–Liu tree over trials, per n.
pub fn chow_liu_error_curve(config: &ExperimentConfig) -> Result<Vec<CurvePoint>> {
    config.validate()?;
    let null = config.null_model()?;
    let truth = null.network_structure();
    let sampler = Sampler::new(&null, config.sampler_config(&null)?)?;
    let n_max = *config.n_grid.iter().max().expect("validated grid");
    let errors: Vec<Vec<usize>> = (0..config.trials)
        .into_par_iter()
        .map(|trial| {
            let run = || -> Result<Vec<usize>> {
                let batch = sampler.draw(n_max, &[0, trial as u64, ROLE_NULL])?;
                config
                    .n_grid
                    .iter()
                    .map(|&n| Ok(chow_liu(&batch.prefix(n)?).symmetric_difference(&truth)?.len()))
                    .collect()
            };
            run().map_err(|e| IsingError::Trial { trial, source: Box::new(e) })
        })
        .collect::<Result<_>>()?;
    Ok(config
        .n_grid
        .iter()
        .enumerate()
        .map(|(k, &n)| CurvePoint {
            n,
            mean_edge_error: errors.iter().map(|e| e[k] as f64).sum::<f64>() / config.trials as f64,
            trials: config.trials,
        })
        .collect())
}

/// CSV with header `n,mean_edge_error,trials`.
pub fn curve_to_csv(points: &[CurvePoint]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["n", "mean_edge_error", "trials"])?;
    for pt in points {
        w.write_record([pt.n.to_string(), pt.mean_edge_error.to_string(), pt.trials.to_string()])?;
    }
    let bytes = w.into_inner().map_err(|e| IsingError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

/// Cap the global thread pool from `ISING_THREADS`, if set. Has no effect
/// once the pool exists.
pub fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("ISING_THREADS") {
        let threads: usize = v
            .parse()
            .map_err(|_| IsingError::param(format!("ISING_THREADS must be a positive integer, got `{v}`")))?;
        let _ = rayon::ThreadPoolBuilder::new().num_threads(threads.max(1)).build_global();
    }
    Ok(())
}
