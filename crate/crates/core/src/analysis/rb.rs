//! Fits of `P(d) = A·r^d + B` to randomized-benchmarking curves.
//!
//! For fixed `r` the model is linear in `A, B`, so the fit is a
//! one-dimensional minimization over `r` (grid scan, then golden section)
//! with `A, B` in closed form. Parameter uncertainties come from the
//! per-depth binomial errors pushed through the linearized model.

use serde::{Deserialize, Serialize};
use thiserror::Error as ThisError;

use crate::experiments::{RbKind, RbPlan, TrialEval};

use super::selection::{apply_selection, SelectionPolicy};
use super::stats::{EstimateWithCI, Z95};

#[derive(Clone, Debug, PartialEq, ThisError, Serialize, Deserialize)]
pub enum FitFailure {
    #[error("need at least 3 depths, got {0}")]
    TooFewPoints(usize),
    #[error("non-finite data at depth {0}")]
    BadData(f64),
    #[error("decay did not converge (best r = {0})")]
    NoConvergence(f64),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbFit {
    pub a: f64,
    pub b: f64,
    pub r: f64,
    /// Standard error of `r`; 0 when no per-point errors were given.
    pub r_se: f64,
    pub sse: f64,
}

impl RbFit {
    /// Process infidelity per unit, `(1 - 1/4^n)(1 - r)`, for an
    /// `n`-qubit depolarizing decay.
    pub fn infidelity(&self, n_qubits: u32) -> f64 {
        dim_factor(n_qubits) * (1.0 - self.r)
    }
}

pub fn dim_factor(n_qubits: u32) -> f64 {
    1.0 - 0.25f64.powi(n_qubits as i32)
}

/// `(A, B, SSE)` at fixed `r`; `B` is pinned when `fixed_b` is set.
fn linear_part(d: &[f64], y: &[f64], r: f64, fixed_b: Option<f64>) -> (f64, f64, f64) {
    let x: Vec<f64> = d.iter().map(|&d| r.powf(d)).collect();
    let (a, b) = match fixed_b {
        Some(b) => {
            let sxx: f64 = x.iter().map(|v| v * v).sum();
            let sxy: f64 = x.iter().zip(y).map(|(v, w)| v * (w - b)).sum();
            (if sxx > 0.0 { sxy / sxx } else { 0.0 }, b)
        }
        None => {
            let m = x.len() as f64;
            let (mx, my) = (x.iter().sum::<f64>() / m, y.iter().sum::<f64>() / m);
            let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
            let sxy: f64 = x.iter().zip(y).map(|(v, w)| (v - mx) * (w - my)).sum();
            let a = if sxx > 1e-300 { sxy / sxx } else { 0.0 };
            (a, my - a * mx)
        }
    };
    let sse = x.iter().zip(y).map(|(v, w)| (w - a * v - b).powi(2)).sum();
    (a, b, sse)
}

/// Least-squares fit of `A·r^d + B` (or `A·r^d + fixed_b`). `se` holds
/// optional standard errors of the points, used only for `r_se`.
pub fn fit_decay(depths: &[f64], y: &[f64], se: Option<&[f64]>, fixed_b: Option<f64>) -> Result<RbFit, FitFailure> {
    assert_eq!(depths.len(), y.len());
    if depths.len() < 3 {
        return Err(FitFailure::TooFewPoints(depths.len()));
    }
    if let Some(i) = (0..y.len()).find(|&i| !y[i].is_finite() || !depths[i].is_finite()) {
        return Err(FitFailure::BadData(depths[i]));
    }
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    if fixed_b.is_none() && y.iter().all(|v| (v - mean).abs() < 1e-15) {
        // flat curve: no decay
        return Ok(RbFit { a: 0.0, b: mean, r: 1.0, r_se: 0.0, sse: 0.0 });
    }
    // r = 1 - 10^-s, scanned on a log grid
    let r_of = |s: f64| 1.0 - 10f64.powf(-s);
    let sse = |s: f64| linear_part(depths, y, r_of(s), fixed_b).2;
    let grid: Vec<f64> = (0..=400).map(|i| i as f64 * 0.025).collect();
    let best = (0..grid.len()).min_by(|&i, &j| sse(grid[i]).total_cmp(&sse(grid[j]))).unwrap();
    let (mut lo, mut hi) = (grid[best.saturating_sub(1)], grid[(best + 1).min(grid.len() - 1)]);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut c, mut e) = (hi - g * (hi - lo), lo + g * (hi - lo));
    let (mut fc, mut fe) = (sse(c), sse(e));
    for _ in 0..200 {
        if hi - lo < 1e-14 {
            break;
        }
        if fc < fe {
            hi = e;
            e = c;
            fe = fc;
            c = hi - g * (hi - lo);
            fc = sse(c);
        } else {
            lo = c;
            c = e;
            fc = fe;
            e = lo + g * (hi - lo);
            fe = sse(e);
        }
    }
    let s = (lo + hi) / 2.0;
    let r = r_of(s);
    if best == 0 && s < 0.02 {
        return Err(FitFailure::NoConvergence(r));
    }
    let (a, b, sse_min) = linear_part(depths, y, r, fixed_b);
    let r_se = se.map_or(0.0, |se| r_std_err(depths, a, r, fixed_b.is_none(), se));
    Ok(RbFit { a, b, r, r_se, sse: sse_min })
}

/// Standard error of `r` from point errors `se` through the linearized
/// model: `cov = (JᵀJ)⁻¹ Jᵀ diag(se²) J (JᵀJ)⁻¹`.
fn r_std_err(depths: &[f64], a: f64, r: f64, free_b: bool, se: &[f64]) -> f64 {
    let k = if free_b { 3 } else { 2 };
    // columns: dA, dr, dB
    let rows: Vec<[f64; 3]> = depths
        .iter()
        .map(|&d| [r.powf(d), a * d * r.powf(d - 1.0), 1.0])
        .collect();
    let mut jtj = [[0.0; 3]; 3];
    let mut mid = [[0.0; 3]; 3];
    for (row, s) in rows.iter().zip(se) {
        for i in 0..k {
            for j in 0..k {
                jtj[i][j] += row[i] * row[j];
                mid[i][j] += row[i] * row[j] * s * s;
            }
        }
    }
    let Some(inv) = invert(&jtj, k) else { return f64::NAN };
    // (inv · mid · inv)[1][1]
    let mut v = 0.0;
    for i in 0..k {
        for j in 0..k {
            v += inv[1][i] * mid[i][j] * inv[j][1];
        }
    }
    v.max(0.0).sqrt()
}

fn invert(m: &[[f64; 3]; 3], k: usize) -> Option<[[f64; 3]; 3]> {
    let mut a = *m;
    let mut inv = [[0.0; 3]; 3];
    for (i, row) in inv.iter_mut().enumerate().take(k) {
        row[i] = 1.0;
    }
    for col in 0..k {
        let p = (col..k).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[p][col].abs() < 1e-300 {
            return None;
        }
        a.swap(p, col);
        inv.swap(p, col);
        let d = a[col][col];
        for j in 0..k {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for i in 0..k {
            if i != col {
                let f = a[i][col];
                for j in 0..k {
                    a[i][j] -= f * a[col][j];
                    inv[i][j] -= f * inv[col][j];
                }
            }
        }
    }
    Some(inv)
}

/// One curve: per-depth return probability (over trials with no loss) and
/// retention (no atom lost, over eligible trials), with their fits. The
/// return probability is fitted with `B` pinned at `1/2^n`, its value for a
/// fully mixed state, and retention with `B = 0`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbCurve {
    pub name: String,
    pub depths: Vec<usize>,
    pub return_prob: Vec<EstimateWithCI>,
    pub retention: Vec<EstimateWithCI>,
    pub fit: Result<RbFit, FitFailure>,
    pub retention_fit: Result<RbFit, FitFailure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RbAnalysis {
    pub curves: Vec<RbCurve>,
    /// Headline error per benchmarked operation: per Clifford, per
    /// interleaved CZ, or per echoed CZ.
    pub error: Option<EstimateWithCI>,
    /// Echoed protocol only: detected loss per CZ.
    pub loss: Option<EstimateWithCI>,
}

fn curve(name: &str, depths: &[usize], evals: &[&TrialEval], first: usize, n_qubits: u32) -> RbCurve {
    let mut return_prob = Vec::new();
    let mut retention = Vec::new();
    for i in 0..depths.len() {
        let mine: Vec<TrialEval> = evals.iter().filter(|e| e.setting == first + i).map(|e| (*e).clone()).collect();
        let (kept, _) = apply_selection(&mine, &SelectionPolicy::default());
        let ok = kept.iter().filter(|e| e.error == 0.0).count();
        return_prob.push(EstimateWithCI::rate(ok as f64, kept.len() as u64, kept.len() as u64));
        let (kept, acc) = apply_selection(&mine, &SelectionPolicy::max_losses(0));
        retention.push(EstimateWithCI::rate(kept.len() as f64, acc.n_total, acc.n_total));
    }
    let d: Vec<f64> = depths.iter().map(|&d| d as f64).collect();
    let fit_of = |pts: &[EstimateWithCI], b: Option<f64>| {
        let y: Vec<f64> = pts.iter().map(|e| e.value).collect();
        let se: Vec<f64> = pts.iter().map(|e| e.std_err()).collect();
        fit_decay(&d, &y, Some(&se), b)
    };
    RbCurve {
        name: name.to_string(),
        depths: depths.to_vec(),
        fit: fit_of(&return_prob, Some(0.5f64.powi(n_qubits as i32))),
        retention_fit: fit_of(&retention, Some(0.0)),
        return_prob,
        retention,
    }
}

fn estimate(value: f64, se: f64, n: u64) -> EstimateWithCI {
    EstimateWithCI {
        value,
        ci_low: value - Z95 * se,
        ci_high: value + Z95 * se,
        n_accepted: n,
        n_total: n,
    }
}

/// Fits every curve of the plan and combines them into per-operation
/// numbers.
pub fn rb_analysis(plan: &RbPlan, evals: &[TrialEval]) -> RbAnalysis {
    let refs: Vec<&TrialEval> = evals.iter().collect();
    let nd = plan.depths.len();
    let curves: Vec<RbCurve> = plan
        .curves
        .iter()
        .enumerate()
        .map(|(c, name)| curve(name, &plan.depths, &refs, c * nd, plan.n_atoms() as u32))
        .collect();
    let n = evals.len() as u64;
    let fits: Vec<Option<RbFit>> = curves.iter().map(|c| c.fit.clone().ok()).collect();
    let (error, loss) = match plan.kind {
        RbKind::Clifford1q => (fits[0].map(|f| estimate(f.infidelity(1), dim_factor(1) * f.r_se, n)), None),
        RbKind::Irb2qStatic => {
            let e = match (fits[0], fits[1]) {
                (Some(r), Some(i)) => {
                    let ratio = i.r / r.r;
                    let se = ratio * ((i.r_se / i.r).powi(2) + (r.r_se / r.r).powi(2)).sqrt();
                    Some(estimate(dim_factor(2) * (1.0 - ratio), dim_factor(2) * se, n))
                }
                _ => None,
            };
            (e, None)
        }
        RbKind::Echoed2q { .. } => {
            // two CZs per unit; the reference curve carries everything else
            let diff = |a: Option<RbFit>, b: Option<RbFit>, f: f64| match (a, b) {
                (Some(a), Some(b)) => Some(estimate(f * (b.r - a.r) / 2.0, f * (a.r_se.hypot(b.r_se)) / 2.0, n)),
                _ => None,
            };
            let lf: Vec<Option<RbFit>> = curves.iter().map(|c| c.retention_fit.clone().ok()).collect();
            (diff(fits[0], fits[1], dim_factor(2)), diff(lf[0], lf[1], 1.0))
        }
    };
    RbAnalysis { curves, error, loss }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_curve_is_recovered() {
        let d = [1.0, 10.0, 25.0, 50.0, 100.0, 150.0];
        let y: Vec<f64> = d.iter().map(|&d| 0.5 * 0.99f64.powf(d) + 0.5).collect();
        let f = fit_decay(&d, &y, None, None).unwrap();
        assert!((f.r - 0.99).abs() < 1e-9, "{}", f.r);
        assert!((f.a - 0.5).abs() < 1e-9 && (f.b - 0.5).abs() < 1e-9, "{f:?}");
    }

    #[test]
    fn fixed_offset_fit() {
        let d = [1.0, 4.0, 8.0, 16.0];
        let y: Vec<f64> = d.iter().map(|&d| 0.97 * 0.995f64.powf(d)).collect();
        let f = fit_decay(&d, &y, None, Some(0.0)).unwrap();
        assert!((f.r - 0.995).abs() < 1e-9 && (f.a - 0.97).abs() < 1e-9);
    }

    #[test]
    fn flat_curve_is_no_decay() {
        let f = fit_decay(&[1.0, 2.0, 3.0], &[1.0; 3], None, None).unwrap();
        assert_eq!(f.r, 1.0);
        assert_eq!(f.infidelity(1), 0.0);
    }

    #[test]
    fn failures_are_reported() {
        assert_eq!(fit_decay(&[1.0, 2.0], &[1.0, 0.9], None, None), Err(FitFailure::TooFewPoints(2)));
        assert!(matches!(fit_decay(&[1.0, 2.0, 3.0], &[1.0, f64::NAN, 0.5], None, None), Err(FitFailure::BadData(_))));
    }

    #[test]
    fn standard_error_matches_scale() {
        // doubling the point errors doubles the parameter error
        let d = [1.0, 10.0, 20.0, 40.0];
        let y: Vec<f64> = d.iter().map(|&d| 0.5 * 0.98f64.powf(d) + 0.5).collect();
        let a = fit_decay(&d, &y, Some(&[0.01; 4]), None).unwrap().r_se;
        let b = fit_decay(&d, &y, Some(&[0.02; 4]), None).unwrap().r_se;
        assert!(a > 0.0 && (b / a - 2.0).abs() < 1e-9);
    }
}
