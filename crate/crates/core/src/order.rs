//! Counting functions and abscissa-of-convergence estimators for sequences of
//! singular values.

use crate::error::{Error, Result};
use crate::length::ls_fit;
use crate::registry::Registry;
use rayon::prelude::*;
use serde::Serialize;
use std::sync::Arc;

/// μ₀ ≥ μ₁ ≥ … > 0.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EigenvalueSequence {
    pub values: Vec<f64>,
    /// Zeros removed on ingestion.
    pub dropped_zeros: usize,
}

impl EigenvalueSequence {
    /// Takes absolute values, drops zeros, sorts non-increasing.
    pub fn from_values(v: impl IntoIterator<Item = f64>) -> Self {
        let mut values = Vec::new();
        let mut dropped_zeros = 0;
        for x in v {
            let a = x.abs();
            if a > 0.0 && a.is_finite() {
                values.push(a);
            } else {
                dropped_zeros += 1;
            }
        }
        values.sort_by(|a, b| b.total_cmp(a));
        EigenvalueSequence { values, dropped_zeros }
    }

    /// μ = (1+λ²)^{-1/2} over Dirac eigenvalues λ.
    pub fn from_dirac_spectrum(eigs: &[f64]) -> Self {
        Self::from_values(eigs.iter().map(|l| 1.0 / (1.0 + l * l).sqrt()))
    }

    /// One float per line, or CSV rows whose last column is the value; lines
    /// that do not parse (headers) are skipped.
    pub fn parse(text: &str) -> Self {
        Self::from_values(text.lines().filter_map(|l| l.split(',').last()?.trim().parse::<f64>().ok()))
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, c: f64) -> Self {
        EigenvalueSequence { values: self.values.iter().map(|v| v * c).collect(), dropped_zeros: self.dropped_zeros }
    }
}

/// λ_t = #{n : μ_n > t}.
pub fn counting_lambda(seq: &EigenvalueSequence, t: f64) -> Result<usize> {
    if t <= 0.0 || t.is_nan() {
        return Err(Error::InvalidArgument(format!("counting function needs t > 0, got {t}")));
    }
    Ok(seq.values.partition_point(|&m| m > t))
}

/// tr (1+D²)^{-s/2} over Dirac eigenvalues.
pub fn zeta_value(dirac_eigs: &[f64], s: f64) -> f64 {
    dirac_eigs.iter().map(|l| (1.0 + l * l).powf(-s / 2.0)).sum()
}

#[derive(Clone, Debug, Serialize, PartialEq)]
pub struct AbscissaEstimate {
    pub estimator: String,
    pub value: f64,
    pub residual: f64,
    pub flag: Option<String>,
}

pub trait AbscissaEstimator: Send + Sync {
    fn name(&self) -> &'static str;
    fn estimate(&self, seq: &EigenvalueSequence) -> Result<AbscissaEstimate>;
}

/// (liminf log μ_n / log(1/n))⁻¹ as an inverted tail slope.
pub struct MuSlope;

impl AbscissaEstimator for MuSlope {
    fn name(&self) -> &'static str {
        "mu-slope"
    }
    fn estimate(&self, seq: &EigenvalueSequence) -> Result<AbscissaEstimate> {
        let n = seq.len();
        if n < 100 {
            return Err(Error::SequenceTooShort { len: n, min: 100 });
        }
        let idx: Vec<usize> = (n / 2..n).collect();
        let x: Vec<f64> = idx.iter().map(|&k| -((k + 1) as f64).ln()).collect();
        let y: Vec<f64> = idx.iter().map(|&k| seq.values[k].ln()).collect();
        let (slope, _, residual) = ls_fit(&x, &y);
        let (value, flag) = if slope <= 0.0 {
            (f64::INFINITY, Some("infinite".to_string()))
        } else {
            let v = 1.0 / slope;
            (v, (v < 0.05).then(|| "superpolynomial".to_string()))
        };
        Ok(AbscissaEstimate { estimator: self.name().into(), value, residual, flag })
    }
}

/// limsup log λ_{1/n} / log n over a log-spaced grid of n.
pub struct LambdaSlope {
    pub grid: usize,
}

impl AbscissaEstimator for LambdaSlope {
    fn name(&self) -> &'static str {
        "lambda-slope"
    }
    fn estimate(&self, seq: &EigenvalueSequence) -> Result<AbscissaEstimate> {
        if seq.is_empty() {
            return Err(Error::SequenceTooShort { len: 0, min: 1 });
        }
        let lo = (1.0 / seq.values[0]).ln();
        let hi = (1.0 / seq.values[seq.len() - 1]).ln();
        let zero = AbscissaEstimate { estimator: self.name().into(), value: 0.0, residual: 0.0, flag: Some("saturated".into()) };
        if hi - lo <= 1e-12 {
            return Ok(zero);
        }
        let mut x = Vec::new();
        let mut y = Vec::new();
        for k in 0..self.grid {
            let ln_n = lo + (hi - lo) * k as f64 / (self.grid - 1) as f64;
            let lam = counting_lambda(seq, (-ln_n).exp())?;
            if lam > 0 {
                x.push(ln_n);
                y.push((lam as f64).ln());
            }
        }
        let h = x.len() / 2;
        if x.len() - h < 2 || y[h..].windows(2).all(|w| w[0] == w[1]) {
            return Ok(zero);
        }
        let (slope, _, residual) = ls_fit(&x[h..], &y[h..]);
        Ok(AbscissaEstimate { estimator: self.name().into(), value: slope.max(0.0), residual, flag: None })
    }
}

/// Smallest s on a grid where Σ_{n<N} μ_nˢ / Σ_{n<N/2} μ_nˢ < 1.05, with the
/// crossing interpolated linearly between grid points.
pub struct TraceScan {
    pub grid: Vec<f64>,
    pub threshold: f64,
}

impl Default for TraceScan {
    fn default() -> Self {
        TraceScan { grid: (1..=800).map(|k| k as f64 * 0.01).collect(), threshold: 1.05 }
    }
}

impl TraceScan {
    pub fn ratio(seq: &EigenvalueSequence, s: f64) -> f64 {
        let half = seq.len() / 2;
        let logs = seq.values.iter().map(|m| m.ln());
        let mut head = 0.0;
        let mut total = 0.0;
        for (k, l) in logs.enumerate() {
            let t = (s * l).exp();
            if k < half {
                head += t;
            }
            total += t;
        }
        total / head
    }
}

impl AbscissaEstimator for TraceScan {
    fn name(&self) -> &'static str {
        "trace-scan"
    }
    fn estimate(&self, seq: &EigenvalueSequence) -> Result<AbscissaEstimate> {
        if seq.len() < 2 {
            return Err(Error::SequenceTooShort { len: seq.len(), min: 2 });
        }
        let mut prev: Option<(f64, f64)> = None;
        for chunk in self.grid.chunks(32) {
            let ratios: Vec<f64> = chunk.par_iter().map(|&s| Self::ratio(seq, s)).collect();
            for (&s, &r) in chunk.iter().zip(&ratios) {
                if r < self.threshold {
                    let value = match prev {
                        Some((s0, r0)) if r0 > r => s0 + (s - s0) * (r0 - self.threshold) / (r0 - r),
                        _ => s,
                    };
                    return Ok(AbscissaEstimate {
                        estimator: self.name().into(),
                        value,
                        residual: r,
                        flag: Some("truncation heuristic".into()),
                    });
                }
                prev = Some((s, r));
            }
        }
        Ok(AbscissaEstimate {
            estimator: self.name().into(),
            value: f64::INFINITY,
            residual: prev.map_or(f64::NAN, |p| p.1),
            flag: Some("no grid point passed".into()),
        })
    }
}

pub fn estimator_registry() -> Registry<dyn AbscissaEstimator, ()> {
    let mut r: Registry<dyn AbscissaEstimator, ()> = Registry::default();
    r.register("mu-slope", |_, _| Ok(Arc::new(MuSlope)));
    r.register("lambda-slope", |a, _| Ok(Arc::new(LambdaSlope { grid: a.parsed(&["grid"], 0).unwrap_or(64) })));
    r.register("trace-scan", |a, _| {
        let step: f64 = a.parsed(&["step"], 0).unwrap_or(0.01);
        let max: f64 = a.parsed(&["max"], 1).unwrap_or(8.0);
        let n = (max / step).round() as usize;
        Ok(Arc::new(TraceScan { grid: (1..=n).map(|k| k as f64 * step).collect(), threshold: 1.05 }))
    });
    r
}

/// Every registered estimator on one sequence, in name order.
pub fn estimate_all(seq: &EigenvalueSequence) -> Result<Vec<AbscissaEstimate>> {
    let r = estimator_registry();
    r.names().iter().map(|n| r.build(n, &())?.estimate(seq)).collect()
}
