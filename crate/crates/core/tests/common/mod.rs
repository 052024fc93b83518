//! Brute-force reference computations, written without the library's
//! enumeration code.
#![allow(dead_code)]

use ising_gof::IsingModel;

pub fn spins(idx: usize, p: usize) -> Vec<f64> {
    (0..p).map(|i| if idx >> i & 1 == 1 { -1.0 } else { 1.0 }).collect()
}

pub fn energy(m: &IsingModel, x: &[f64]) -> f64 {
    let p = m.p();
    let mut e = 0.0;
    for i in 0..p {
        for j in (i + 1)..p {
            e += m.weight(i, j) * x[i] * x[j];
        }
    }
    e
}

/// Normalized probabilities over all 2^p states.
pub fn probabilities(m: &IsingModel) -> Vec<f64> {
    let p = m.p();
    let e: Vec<f64> = (0..1usize << p).map(|k| energy(m, &spins(k, p))).collect();
    let top = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let w: Vec<f64> = e.iter().map(|v| (v - top).exp()).collect();
    let z: f64 = w.iter().sum();
    w.into_iter().map(|v| v / z).collect()
}

pub fn log_partition(m: &IsingModel) -> f64 {
    let p = m.p();
    let e: Vec<f64> = (0..1usize << p).map(|k| energy(m, &spins(k, p))).collect();
    let top = e.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    top + e.iter().map(|v| (v - top).exp()).sum::<f64>().ln()
}

/// Σ_x (Q(x) − P(x))² / P(x).
pub fn chi_square(q: &IsingModel, p: &IsingModel) -> f64 {
    let (qp, pp) = (probabilities(q), probabilities(p));
    qp.iter().zip(&pp).map(|(a, b)| (a - b) * (a - b) / b).sum()
}

/// E[X_i X_j] for every pair, row-major.
pub fn pair_moments(m: &IsingModel) -> Vec<f64> {
    let p = m.p();
    let probs = probabilities(m);
    let mut out = vec![0.0; p * p];
    for (k, &pr) in probs.iter().enumerate() {
        let x = spins(k, p);
        for i in 0..p {
            for j in 0..p {
                out[i * p + j] += pr * x[i] * x[j];
            }
        }
    }
    out
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    let scale = a.abs().max(b.abs());
    if scale == 0.0 {
        0.0
    } else {
        (a - b).abs() / scale
    }
}
