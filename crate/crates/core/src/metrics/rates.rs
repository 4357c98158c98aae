//! Log-log rate fitting and the per-ε error table of a convergence sweep.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root-mean-square residual in `log(error)`.
    pub residual: f64,
}

/// Least-squares line through `(ln ε, ln error)`.
pub fn fit_loglog_slope(pairs: &[(f64, f64)]) -> Result<LogLogFit> {
    if pairs.len() < 2 {
        return Err(Error::Metric(format!("need at least two points for a slope, got {}", pairs.len())));
    }
    if let Some(&(e, r)) = pairs.iter().find(|(e, r)| !(*e > 0.0) || !(*r > 0.0)) {
        return Err(Error::Metric(format!("log-log fit needs positive entries, got ({e}, {r})")));
    }
    let n = pairs.len() as f64;
    let xs: Vec<f64> = pairs.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = pairs.iter().map(|p| p.1.ln()).collect();
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Metric("all ε values coincide".into()));
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = xs.iter().zip(&ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    Ok(LogLogFit { slope, intercept, residual: (ss / n).sqrt() })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub eps: f64,
    pub w1_sup: f64,
    pub re_sup: f64,
    pub mono_sup: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRecord {
    pub rows: Vec<ConvergenceRow>,
    pub w1_fit: LogLogFit,
    pub re_fit: LogLogFit,
    pub mono_fit: LogLogFit,
}

impl ConvergenceRecord {
    pub const CSV_HEADER: &'static str = "eps,w1_sup,re_sup,mono_sup";

    /// Rows must have strictly decreasing `eps` and nonnegative errors.
    pub fn new(rows: Vec<ConvergenceRow>) -> Result<Self> {
        if rows.windows(2).any(|w| !(w[1].eps < w[0].eps)) {
            return Err(Error::Metric("ε values must be strictly decreasing".into()));
        }
        if rows.iter().any(|r| !(r.w1_sup >= 0.0 && r.re_sup >= 0.0 && r.mono_sup >= 0.0)) {
            return Err(Error::Metric("error entries must be nonnegative".into()));
        }
        let fit = |sel: fn(&ConvergenceRow) -> f64| {
            fit_loglog_slope(&rows.iter().map(|r| (r.eps, sel(r))).collect::<Vec<_>>())
        };
        Ok(Self { w1_fit: fit(|r| r.w1_sup)?, re_fit: fit(|r| r.re_sup)?, mono_fit: fit(|r| r.mono_sup)?, rows })
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            s.push_str(&format!("{},{},{},{}\n", r.eps, r.w1_sup, r.re_sup, r.mono_sup));
        }
        s
    }
}
