//! Command-line front end.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::bounds::{self, BoundQuery, BoundResult};
use crate::error::{IsingError, Result};
use crate::harness::{self, build_test, ExperimentConfig, Heatmap, TrialSettings};
use crate::io;
use crate::sampler::{sample, SamplerConfig};

#[derive(Parser, Debug)]
#[command(name = "ising-gof", version, about = "Structural goodness-of-fit testing for Ising models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Flags shared by the simulation subcommands; each overrides the config file.
#[derive(Args, Debug, Default)]
struct SweepArgs {
    /// `key = value` file with experiment settings
    #[arg(long)]
    config: Option<PathBuf>,
    /// Start from the p = 63 preset instead of p = 127
    #[arg(long)]
    reduced: bool,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    p: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    /// complete-binary, path or star
    #[arg(long)]
    shape: Option<String>,
    /// forest, tree, tolerant-forest, tolerant-tree, ferro or structure-learning
    #[arg(long)]
    test: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// `a,b,c` or `start:stop:step`
    #[arg(long = "s-grid")]
    s_grid: Option<String>,
    /// `a,b,c` or `start:stop:step`
    #[arg(long = "n-grid")]
    n_grid: Option<String>,
    #[arg(long)]
    trials: Option<usize>,
    /// Step count or `auto`
    #[arg(long = "burn-in")]
    burn_in: Option<String>,
    /// glauber, exact or thinned:N
    #[arg(long)]
    sampler: Option<String>,
    /// fresh or fixed
    #[arg(long)]
    alternates: Option<String>,
}

impl SweepArgs {
    fn resolve(&self) -> Result<ExperimentConfig> {
        let mut config = if self.reduced { ExperimentConfig::reduced() } else { ExperimentConfig::default() };
        if let Some(path) = &self.config {
            config.apply(&io::read_config(path)?)?;
        }
        let mut flags = BTreeMap::new();
        let mut put = |k: &str, v: Option<String>| {
            if let Some(v) = v {
                flags.insert(k.to_string(), v);
            }
        };
        put("seed", self.seed.map(|v| v.to_string()));
        put("p", self.p.map(|v| v.to_string()));
        put("alpha", self.alpha.map(|v| v.to_string()));
        put("shape", self.shape.clone());
        put("test", self.test.clone());
        put("epsilon", self.epsilon.map(|v| v.to_string()));
        put("s_grid", self.s_grid.clone());
        put("n_grid", self.n_grid.clone());
        put("trials", self.trials.map(|v| v.to_string()));
        put("burn_in", self.burn_in.clone());
        put("sampler", self.sampler.clone());
        put("alternates", self.alternates.clone());
        config.apply(&flags)?;
        Ok(config)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Risk over an s × n grid as CSV, optionally with an SVG heatmap
    Heatmap {
        #[command(flatten)]
        sweep: SweepArgs,
        /// CSV destination; stdout if absent
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
    },
    /// Mean Chow–Liu edge error on null data, per n
    ChowLiuCurve {
        #[command(flatten)]
        sweep: SweepArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Exact widget χ² against the closed-form bounds, as CSV
    VerifyWidgets {
        #[arg(long, default_value = "default")]
        grid: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate a sample-complexity formula
    Bounds(BoundsArgs),
    /// Draw samples from a model file or a uniform tree
    Sample {
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long, default_value = "complete-binary")]
        shape: String,
        #[arg(long, default_value_t = 15)]
        p: usize,
        #[arg(long, default_value_t = 0.1)]
        alpha: f64,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long = "burn-in", default_value_t = crate::sampler::DEFAULT_BURN_IN)]
        burn_in: usize,
        #[arg(long, default_value = "glauber")]
        sampler: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Risk of one test at a single (s, n)
    Risk {
        #[command(flatten)]
        sweep: SweepArgs,
        /// Null model file; overrides shape, p and alpha
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        s: usize,
        #[arg(long)]
        n: usize,
    },
}

#[derive(Args, Debug)]
struct BoundsArgs {
    /// forest-upper, forest-lower, forest-eof, tree-upper, tree-lower, ferro-upper,
    /// ferro-lower, sl-upper, gof-small-s, eof-small-s, gof-large-s, eof-large-s,
    /// gof-very-small-s, eof-very-small-s, tolerant-forest or tolerant-tree
    #[arg(long)]
    theorem: String,
    #[arg(long)]
    p: usize,
    #[arg(long, default_value_t = 1)]
    d: usize,
    #[arg(long)]
    s: usize,
    #[arg(long)]
    alpha: f64,
    /// Defaults to alpha
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    constant: Option<f64>,
    #[arg(long)]
    zeta: Option<f64>,
    #[arg(long)]
    eta: Option<f64>,
    #[arg(long, default_value_t = 0.0)]
    epsilon: f64,
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn evaluate_bound(a: &BoundsArgs) -> Result<BoundResult> {
    let mut q = BoundQuery::new(a.p, a.d, a.s, a.alpha, a.beta.unwrap_or(a.alpha));
    if let Some(c) = a.constant {
        q = q.with_constant(c);
    }
    if let Some(z) = a.zeta {
        q = q.with_zeta(z);
    }
    if let Some(e) = a.eta {
        q = q.with_eta(e);
    }
    let missing = |what: &str| IsingError::param(format!("`{}` has no {what} form here", a.theorem));
    Ok(match a.theorem.as_str() {
        "forest-upper" => bounds::forest_bounds(&q)?.upper,
        "forest-lower" => bounds::forest_bounds(&q)?.lower,
        "forest-eof" => bounds::forest_bounds(&q)?.eof_lower.ok_or_else(|| missing("EoF"))?,
        "tree-upper" => bounds::tree_bounds(&q)?.upper,
        "tree-lower" => bounds::tree_bounds(&q)?.lower,
        "ferro-upper" => bounds::ferro_bounds(&q)?.upper,
        "ferro-lower" => bounds::ferro_bounds(&q)?.lower,
        "sl-upper" => bounds::sl_upper(&q)?,
        "gof-small-s" => bounds::gof_lower_small_s(&q)?,
        "eof-small-s" => bounds::eof_lower_small_s(&q)?,
        "gof-large-s" | "eof-large-s" => {
            let b = bounds::gof_lower_large_s(&q)?;
            let (high, low) = if a.theorem.starts_with("gof") {
                (b.gof_high_temperature, b.gof_low_temperature)
            } else {
                (b.eof_high_temperature, b.eof_low_temperature)
            };
            // report whichever regime applies, preferring the larger value
            match (high.valid(), low.valid()) {
                (true, false) => high,
                (false, true) => low,
                _ if high.value >= low.value => high,
                _ => low,
            }
        }
        "gof-very-small-s" => bounds::gof_lower_very_small_s(&q)?.0,
        "eof-very-small-s" => bounds::gof_lower_very_small_s(&q)?.1,
        "tolerant-forest" => bounds::tolerant_bounds(&q, a.epsilon)?.0,
        "tolerant-tree" => bounds::tolerant_bounds(&q, a.epsilon)?.1,
        other => return Err(IsingError::param(format!("unknown theorem `{other}`"))),
    })
}

fn verification_csv(rows: &[bounds::VerificationRow]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "family", "lambda", "mu", "d", "ell", "exact_chi2", "closed_form", "bound", "valid", "pass", "blades",
        "failed_conditions",
    ])?;
    for r in rows {
        w.write_record([
            r.label(),
            r.spec.strong.to_string(),
            r.spec.changed.to_string(),
            r.spec.size.to_string(),
            r.spec.ell.to_string(),
            r.exact_chi2.to_string(),
            r.closed_form.map(|c| c.to_string()).unwrap_or_default(),
            r.bound.to_string(),
            r.valid.to_string(),
            r.pass().to_string(),
            r.spec.blades.to_string(),
            r.failed_conditions.join("; "),
        ])?;
    }
    let bytes = w.into_inner().map_err(|e| IsingError::Io(e.into_error()))?;
    Ok(String::from_utf8(bytes).expect("CSV output is UTF-8"))
}

fn execute(command: Command) -> Result<()> {
    harness::configure_threads()?;
    match command {
        Command::Heatmap { sweep, out, svg } => {
            let map = harness::risk_heatmap(&sweep.resolve()?)?;
            emit(out.as_deref(), &map.to_csv()?)?;
            if let Some(path) = svg {
                std::fs::write(path, map.to_svg())?;
            }
        }
        Command::ChowLiuCurve { sweep, out } => {
            let curve = harness::chow_liu_error_curve(&sweep.resolve()?)?;
            emit(out.as_deref(), &harness::curve_to_csv(&curve)?)?;
        }
        Command::VerifyWidgets { grid, out } => {
            let specs = match grid.as_str() {
                "default" => bounds::default_verification_grid(),
                other => return Err(IsingError::param(format!("unknown grid `{other}`"))),
            };
            let rows = bounds::verify_widget_bounds(&specs)?;
            emit(out.as_deref(), &verification_csv(&rows)?)?;
            let valid = rows.iter().filter(|r| r.valid).count();
            let failed = rows.iter().filter(|r| r.valid && !r.pass()).count();
            eprintln!("{} rows, {valid} inside the validity region, {failed} violations", rows.len());
        }
        Command::Bounds(args) => {
            let b = evaluate_bound(&args)?;
            println!("{}", b.value);
            for c in b.conditions.iter().filter(|c| !c.held) {
                eprintln!("warning: condition not met: {}", c.description);
            }
        }
        Command::Sample { model, shape, p, alpha, n, seed, burn_in, sampler, out } => {
            let model = match model {
                Some(path) => io::read_model(&path)?,
                None => crate::model::build_uniform_tree(shape.parse()?, p, alpha)?,
            };
            let config = SamplerConfig { burn_in, seed, mode: sampler.parse()? };
            emit(out.as_deref(), &io::format_samples(&sample(&model, n, config)?))?;
        }
        Command::Risk { sweep, model, s, n } => {
            let config = sweep.resolve()?;
            let null = match model {
                Some(path) => io::read_model(&path)?,
                None => config.null_model()?,
            };
            let (test, generator) = build_test(config.test, &null, s, config.epsilon, config.gap)?;
            let settings = TrialSettings {
                trials: config.trials,
                sampler: SamplerConfig {
                    burn_in: harness::resolve_burn_in(config.burn_in, &null, config.seed)?,
                    seed: config.seed,
                    mode: config.sampler,
                },
                alternates: config.alternates,
                row: 0,
            };
            let est = harness::estimate_risk(&null, generator.as_ref(), test.as_ref(), n, &settings)?;
            let map = Heatmap { s_grid: vec![s], n_grid: vec![n], cells: vec![est] };
            emit(None, &map.to_csv()?)?;
        }
    }
    Ok(())
}

/// Parse `args` (program name first), run, and return the exit status:
/// 0 on success, 1 on parameter or usage errors, 2 on capacity errors.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(run(["ising-gof", "no-such-command"]), 1);
        assert_eq!(run(["ising-gof"]), 1);
        assert_eq!(run(["ising-gof", "bounds", "--theorem", "forest-upper", "--p", "127", "--alpha", "0.1", "--s", "24"]), 0);
        assert_eq!(run(["ising-gof", "bounds", "--theorem", "nope", "--p", "12", "--alpha", "0.1", "--s", "2"]), 1);
        assert_eq!(run(["ising-gof", "sample", "--shape", "path", "--p", "40", "--n", "2", "--sampler", "exact"]), 2);
    }
}
