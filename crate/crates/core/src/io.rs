//! Plain-text model, sample and config files, and decision CSVs.
//!
//! Model file: first non-comment line is `p`, then one `i j theta` line per
//! edge with 1-based node labels. Sample file: header `p n seed`, then one
//! row of ±1 values per sample. `#` starts a comment in both.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{IsingError, Result};
use crate::model::IsingModel;
use crate::sampler::{SampleBatch, SamplerConfig, SamplerMode, DEFAULT_BURN_IN};
use crate::stattests::TestDecision;

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

fn parse_err(line: usize, message: impl Into<String>) -> IsingError {
    IsingError::Parse { line, message: message.into() }
}

fn field<T: std::str::FromStr>(line: usize, token: Option<&str>, what: &str) -> Result<T> {
    let token = token.ok_or_else(|| parse_err(line, format!("missing {what}")))?;
    token.parse().map_err(|_| parse_err(line, format!("invalid {what} `{token}`")))
}

pub fn parse_model(text: &str) -> Result<IsingModel> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty model file"))?;
    let p: usize = field(line, Some(header), "node count")?;
    let mut model = IsingModel::empty(p)?;
    for (line, l) in lines {
        let mut tok = l.split_whitespace();
        let i: usize = field(line, tok.next(), "node i")?;
        let j: usize = field(line, tok.next(), "node j")?;
        let w: f64 = field(line, tok.next(), "weight")?;
        if tok.next().is_some() {
            return Err(parse_err(line, "expected `i j theta`"));
        }
        if i == 0 || j == 0 || i > p || j > p || i == j {
            return Err(parse_err(line, format!("edge ({i}, {j}) is not a valid pair in 1..={p}")));
        }
        if model.weight(i - 1, j - 1) != 0.0 {
            return Err(parse_err(line, format!("duplicate edge ({i}, {j})")));
        }
        model.set_weight(i - 1, j - 1, w).map_err(|e| parse_err(line, e.to_string()))?;
    }
    Ok(model)
}

/// Weights are written with 17 significant digits so they parse back exactly.
pub fn format_model(model: &IsingModel) -> String {
    let mut out = format!("{}\n", model.p());
    for (i, j, w) in model.edges() {
        writeln!(out, "{} {} {:.16e}", i + 1, j + 1, w).expect("writing to a string");
    }
    out
}

pub fn read_model(path: &Path) -> Result<IsingModel> {
    parse_model(&std::fs::read_to_string(path)?)
}

pub fn write_model(path: &Path, model: &IsingModel) -> Result<()> {
    Ok(std::fs::write(path, format_model(model))?)
}

pub fn parse_samples(text: &str) -> Result<SampleBatch> {
    let mut lines = content_lines(text);
    let (line, header) = lines.next().ok_or_else(|| parse_err(1, "empty sample file"))?;
    let mut tok = header.split_whitespace();
    let p: usize = field(line, tok.next(), "node count")?;
    let n: usize = field(line, tok.next(), "sample count")?;
    let seed: Option<u64> = tok.next().map(|t| field(line, Some(t), "seed")).transpose()?;
    let mut rows = Vec::with_capacity(n);
    for (line, l) in lines {
        let row: Vec<i8> = l
            .split_whitespace()
            .map(|t| match t {
                "1" | "+1" => Ok(1),
                "-1" => Ok(-1),
                other => Err(parse_err(line, format!("spin `{other}` is not +1 or -1"))),
            })
            .collect::<Result<_>>()?;
        if row.len() != p {
            return Err(parse_err(line, format!("expected {p} spins, found {}", row.len())));
        }
        rows.push(row);
    }
    if rows.len() != n {
        return Err(parse_err(1, format!("header declares {n} samples, file has {}", rows.len())));
    }
    let mut batch = SampleBatch::from_rows(p, &rows)?;
    batch.provenance = seed.map(|seed| SamplerConfig { burn_in: DEFAULT_BURN_IN, seed, mode: SamplerMode::Glauber });
    Ok(batch)
}

pub fn format_samples(batch: &SampleBatch) -> String {
    let seed = batch.provenance.map_or(0, |c| c.seed);
    let mut out = String::with_capacity(batch.n() * (3 * batch.p() + 1) + 32);
    writeln!(out, "{} {} {}", batch.p(), batch.n(), seed).expect("writing to a string");
    for row in batch.rows() {
        let line: Vec<&str> = row.iter().map(|&x| if x > 0 { "1" } else { "-1" }).collect();
        out.push_str(&line.join(" "));
        out.push('\n');
    }
    out
}

pub fn read_samples(path: &Path) -> Result<SampleBatch> {
    parse_samples(&std::fs::read_to_string(path)?)
}

pub fn write_samples(path: &Path, batch: &SampleBatch) -> Result<()> {
    Ok(std::fs::write(path, format_samples(batch))?)
}

/// `key = value` lines; later keys override earlier ones.
pub fn parse_config(text: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for (line, l) in content_lines(text) {
        let (k, v) = l.split_once('=').ok_or_else(|| parse_err(line, "expected `key = value`"))?;
        let key = k.trim();
        if key.is_empty() {
            return Err(parse_err(line, "empty key"));
        }
        out.insert(key.to_string(), v.trim().to_string());
    }
    Ok(out)
}

pub fn read_config(path: &Path) -> Result<BTreeMap<String, String>> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// One decision with the context it was made in.
#[derive(Debug, Clone, PartialEq)]
pub struct DecisionRecord {
    pub decision: TestDecision,
    pub s: usize,
    pub n: usize,
    pub seed: u64,
}

/// CSV with header `test,s,n,seed,statistic,threshold,verdict`.
pub fn write_decisions<W: std::io::Write>(out: W, records: &[DecisionRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["test", "s", "n", "seed", "statistic", "threshold", "verdict"])?;
    for r in records {
        w.write_record([
            r.decision.test.to_string(),
            r.s.to_string(),
            r.n.to_string(),
            r.seed.to_string(),
            r.decision.statistic.to_string(),
            r.decision.threshold.to_string(),
            r.decision.verdict.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}
