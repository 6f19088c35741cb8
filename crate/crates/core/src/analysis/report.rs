use serde::Serialize;
use serde_json::{json, Value};

use crate::codes::CodeBasis;
use crate::error::Result;
use crate::experiments::{Body, Experiment, ExperimentSpec, TrialEval};

use super::selection::{apply_selection, error_rate, SelectionPolicy};
use super::stats::{EstimateWithCI, Z95};
use super::{bv_metrics, cat_fidelity, cat_fidelity_bound, rb_analysis, tesseract_pairing, TESSERACT_SHOTS};

/// One line of the summary table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SummaryRow {
    pub experiment: String,
    pub metric: String,
    pub value: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub n_accepted: u64,
    pub n_total: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Report {
    pub rows: Vec<SummaryRow>,
    /// Plot data for the experiment's figure.
    pub plot: Value,
}

impl Report {
    pub const CSV_HEADER: &'static str = "experiment,metric,value,ci_low,ci_high,n_accepted,n_total";

    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n", Self::CSV_HEADER);
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                quote(&r.experiment),
                r.metric,
                r.value,
                r.ci_low,
                r.ci_high,
                r.n_accepted,
                r.n_total
            ));
        }
        s
    }

    pub fn row(&self, metric: &str) -> Option<&SummaryRow> {
        self.rows.iter().find(|r| r.metric == metric)
    }
}

fn quote(s: &str) -> String {
    if s.contains(',') || s.contains('"') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

struct Rows<'a> {
    experiment: &'a str,
    rows: Vec<SummaryRow>,
}

impl Rows<'_> {
    fn add(&mut self, metric: &str, e: &EstimateWithCI) {
        self.rows.push(SummaryRow {
            experiment: self.experiment.to_string(),
            metric: metric.to_string(),
            value: e.value,
            ci_low: e.ci_low,
            ci_high: e.ci_high,
            n_accepted: e.n_accepted,
            n_total: e.n_total,
        });
    }

    fn exact(&mut self, metric: &str, v: f64) {
        self.add(metric, &EstimateWithCI { value: v, ci_low: v, ci_high: v, n_accepted: 0, n_total: 0 });
    }
}

/// `1 - Π(1 - p_s)` over independent settings, with a delta-method
/// interval.
pub fn combined_error(parts: &[EstimateWithCI]) -> EstimateWithCI {
    if parts.is_empty() || parts.iter().any(|e| !e.is_defined()) {
        return EstimateWithCI::undefined(parts.iter().map(|e| e.n_total).sum());
    }
    let keep: f64 = parts.iter().map(|e| 1.0 - e.value).product();
    let var: f64 = parts
        .iter()
        .map(|e| {
            let others: f64 = parts.iter().filter(|o| !std::ptr::eq(*o, e)).map(|o| 1.0 - o.value).product();
            (others * e.std_err()).powi(2)
        })
        .sum();
    let value = 1.0 - keep;
    EstimateWithCI {
        value,
        ci_low: (value - Z95 * var.sqrt()).max(0.0),
        ci_high: (value + Z95 * var.sqrt()).min(1.0),
        n_accepted: parts.iter().map(|e| e.n_accepted).sum(),
        n_total: parts.iter().map(|e| e.n_total).sum(),
    }
}

fn est_json(e: &EstimateWithCI) -> Value {
    json!({ "value": e.value, "ci_low": e.ci_low, "ci_high": e.ci_high, "n_accepted": e.n_accepted, "n_total": e.n_total })
}

/// Summary rows and plot data for one experiment. `seed` drives the
/// tesseract pairing.
pub fn analyze(exp: &Experiment, evals: &[TrialEval], policy: &SelectionPolicy, seed: u64) -> Result<Report> {
    let name = exp.spec.to_string();
    let names = exp.setting_names();
    let mut out = Rows { experiment: &name, rows: Vec::new() };
    let (_, acceptance) = apply_selection(evals, policy);
    let per_setting: Vec<EstimateWithCI> = (0..names.len()).map(|s| error_rate(evals, s, policy)).collect();
    let plot = match &exp.spec {
        ExperimentSpec::Cat { n } => {
            let f = cat_fidelity(&names, evals, *n, policy)?;
            out.add("fidelity", &f.fidelity);
            out.add("z_error", &f.z_error);
            out.add("acceptance", &acceptance);
            out.exact("entangled", f.entangled as u8 as f64);
            json!({
                "figure": "cat_fidelity",
                "n": n,
                "fidelity": est_json(&f.fidelity),
                "z_error": est_json(&f.z_error),
                "coherence_error": f.other_errors.iter().map(est_json).collect::<Vec<_>>(),
            })
        }
        ExperimentSpec::CatEncoded { .. } => {
            let f = cat_fidelity_bound(&names, evals, policy)?;
            let (px, pz) = (&f.other_errors[0], &f.z_error);
            out.add("p_x", px);
            out.add("p_z", pz);
            out.add("total_error", &combined_sum(px, pz));
            out.add("fidelity_bound", &f.fidelity);
            out.add("acceptance", &acceptance);
            let mut sweep = Vec::new();
            for k in (0..=4).map(Some).chain([None]) {
                let p = SelectionPolicy { max_total_losses: k, require_no_loss: k == Some(0), ..*policy };
                let b = cat_fidelity_bound(&names, evals, &p)?;
                let total = combined_sum(&b.other_errors[0], &b.z_error);
                let (_, acc) = apply_selection(evals, &p);
                let label = k.map_or("any".to_string(), |k| k.to_string());
                out.add(&format!("total_error@max_losses={label}"), &total);
                out.add(&format!("acceptance@max_losses={label}"), &acc);
                sweep.push(json!({ "max_losses": k, "total_error": est_json(&total), "acceptance": est_json(&acc) }));
            }
            json!({ "figure": "encoded_cat_selection", "p_x": est_json(px), "p_z": est_json(pz), "loss_sweep": sweep })
        }
        ExperimentSpec::Bv { s, encoded } => {
            let m = bv_metrics(evals, s.len(), policy)?;
            out.add("success_given_accept", &m.success_given_accept);
            out.add("acceptance", &m.acceptance);
            out.add("pr_guess", &m.pr_guess);
            out.add("exp_hamming", &m.exp_hamming);
            out.exact("classical_pr_guess", m.classical.pr_guess);
            out.exact("classical_exp_hamming", m.classical.exp_hamming);
            json!({ "figure": "bv", "n": s.len(), "encoded": encoded, "metrics": serde_json::to_value(&m).expect("serializable") })
        }
        ExperimentSpec::RepeatedCz { encoded, .. } | ExperimentSpec::RandomSequence { encoded, .. } => {
            for (n, e) in names.iter().zip(&per_setting) {
                out.add(&format!("error:{n}"), e);
            }
            let total = combined_error(&per_setting);
            out.add("logical_error", &total);
            out.add("acceptance", &acceptance);
            json!({ "figure": "two_logical", "encoded": encoded, "error": est_json(&total), "acceptance": est_json(&acceptance) })
        }
        ExperimentSpec::Tesseract { ft } => {
            let (kept, _) = apply_selection(evals, policy);
            let tagged: Vec<(&TrialEval, CodeBasis)> = kept
                .iter()
                .map(|&e| (e, if names[e.setting] == "x" { CodeBasis::X } else { CodeBasis::Z }))
                .collect();
            let mut per_basis = serde_json::Map::new();
            for b in [CodeBasis::X, CodeBasis::Z] {
                let mine: Vec<(&TrialEval, CodeBasis)> = tagged.iter().copied().filter(|t| t.1 == b).collect();
                let s = tesseract_pairing(&mine, seed, TESSERACT_SHOTS);
                let l = if b == CodeBasis::X { "x" } else { "z" };
                out.add(&format!("block_error:{l}"), &s.block_error);
                per_basis.insert(l.into(), serde_json::to_value(&s).expect("serializable"));
            }
            let s = tesseract_pairing(&tagged, seed, TESSERACT_SHOTS);
            out.add("block_error", &s.block_error);
            out.add("block_rejection", &s.block_rejection);
            out.add("copy_acceptance", &s.copy_acceptance);
            out.exact("mean_correct_blocks_per_shot", s.mean_correct_per_shot);
            json!({ "figure": "tesseract", "ft": ft, "histogram": s.histogram, "summary": serde_json::to_value(&s).expect("serializable"), "per_basis": per_basis })
        }
        ExperimentSpec::Rb { .. } => {
            let Body::Rb(plan) = &exp.body else { unreachable!("RB spec compiles to an RB plan") };
            let a = rb_analysis(plan, evals);
            if let Some(e) = &a.error {
                out.add("error_per_op", e);
            }
            if let Some(l) = &a.loss {
                out.add("loss_per_op", l);
            }
            for c in &a.curves {
                match &c.fit {
                    Ok(f) => out.add(
                        &format!("r:{}", c.name),
                        &EstimateWithCI { value: f.r, ci_low: f.r - Z95 * f.r_se, ci_high: f.r + Z95 * f.r_se, n_accepted: 0, n_total: 0 },
                    ),
                    // the failure itself is in the plot data
                    Err(_) => out.add(&format!("r:{}", c.name), &EstimateWithCI::undefined(0)),
                }
            }
            serde_json::to_value(&a).map(|v| json!({ "figure": "rb", "analysis": v })).expect("serializable")
        }
    };
    Ok(Report { rows: out.rows, plot })
}

/// `p_X + p_Z` with independent errors.
fn combined_sum(a: &EstimateWithCI, b: &EstimateWithCI) -> EstimateWithCI {
    if !a.is_defined() || !b.is_defined() {
        return EstimateWithCI::undefined(a.n_total + b.n_total);
    }
    let v = a.value + b.value;
    let se = a.std_err().hypot(b.std_err());
    EstimateWithCI {
        value: v,
        ci_low: v - Z95 * se,
        ci_high: v + Z95 * se,
        n_accepted: a.n_accepted + b.n_accepted,
        n_total: a.n_total + b.n_total,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn combined_error_of_independent_settings() {
        let e = |v: f64| EstimateWithCI { value: v, ci_low: v - 0.01, ci_high: v + 0.01, n_accepted: 100, n_total: 100 };
        let c = combined_error(&[e(0.1), e(0.2)]);
        assert!((c.value - 0.28).abs() < 1e-12);
        assert!(c.ci_low < 0.28 && c.ci_high > 0.28);
    }

    #[test]
    fn csv_quotes_spec_strings() {
        let r = Report {
            rows: vec![SummaryRow {
                experiment: "bv:n=7,encoded=true".into(),
                metric: "pr_guess".into(),
                value: 1.0,
                ci_low: 0.9,
                ci_high: 1.0,
                n_accepted: 10,
                n_total: 10,
            }],
            plot: Value::Null,
        };
        assert_eq!(r.to_csv().lines().nth(1).unwrap(), "\"bv:n=7,encoded=true\",pr_guess,1,0.9,1,10,10");
    }
}
