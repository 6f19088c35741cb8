use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use erasim::analysis::SelectionPolicy;
use erasim::experiments::ExperimentSpec;
use erasim::noise::NoiseModel;

use crate::args::{ExperimentArgs, NoiseArgs, PolicyArgs, RunArgs};
use crate::error::{CliError, CliResult};

pub const DEFAULT_TRIALS: u64 = 1000;
pub const DEFAULT_SEED: u64 = 1;

/// Everything a run depends on. Saved next to the records as `run.json`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Canonical experiment spec.
    pub experiment: String,
    pub noise: NoiseModel,
    /// Trials per measurement setting.
    pub trials: u64,
    pub seed: u64,
    pub policy: SelectionPolicy,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn from_args(a: &RunArgs) -> CliResult<Self> {
        if let Some(path) = &a.config {
            let e = &a.experiment;
            let extra = e.experiment.is_some()
                || e.n.is_some()
                || e.k.is_some()
                || e.j.is_some()
                || e.id.is_some()
                || e.s.is_some()
                || e.encoded.is_some()
                || e.ft.is_some()
                || e.kind.is_some()
                || e.moves.is_some()
                || e.depths.is_some()
                || a.noise.noise.is_some()
                || a.noise.noise_config.is_some()
                || !a.noise.set.is_empty();
            if extra {
                return Err(CliError::Usage("--config cannot be combined with experiment or noise flags".into()));
            }
            let mut c = Self::load(path)?;
            if let Some(t) = a.trials {
                c.trials = t;
            }
            if let Some(s) = a.seed {
                c.seed = s;
            }
            if let Some(o) = &a.out {
                c.out = o.clone();
            }
            if a.policy.given() {
                c.policy = single_policy(&a.policy)?;
            }
            c.spec()?;
            c.noise.validate()?;
            return Ok(c);
        }
        Ok(RunConfig {
            experiment: experiment_spec(&a.experiment)?.to_string(),
            noise: noise_model(&a.noise)?,
            trials: a.trials.unwrap_or(DEFAULT_TRIALS),
            seed: a.seed.unwrap_or(DEFAULT_SEED),
            policy: single_policy(&a.policy)?,
            out: a.out.clone().unwrap_or_else(|| PathBuf::from("erasim-out")),
        })
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
    }

    pub fn spec(&self) -> CliResult<ExperimentSpec> {
        Ok(self.experiment.parse()?)
    }
}

/// Builds `name:key=value,...` from the positional name and flags.
pub fn experiment_spec(a: &ExperimentArgs) -> CliResult<ExperimentSpec> {
    let name = a
        .experiment
        .as_deref()
        .ok_or_else(|| CliError::Usage("missing experiment name (see `erasim list`)".into()))?;
    let mut pairs: Vec<String> = Vec::new();
    let mut num = |k: &str, v: Option<usize>| {
        if let Some(v) = v {
            pairs.push(format!("{k}={v}"));
        }
    };
    num("n", a.n);
    num("k", a.k);
    num("j", a.j);
    num("id", a.id);
    for (k, v) in [("encoded", a.encoded), ("ft", a.ft), ("moves", a.moves)] {
        if let Some(v) = v {
            pairs.push(format!("{k}={v}"));
        }
    }
    for (k, v) in [("s", &a.s), ("kind", &a.kind), ("depths", &a.depths)] {
        if let Some(v) = v {
            pairs.push(format!("{k}={v}"));
        }
    }
    let text = match (name.contains(':'), pairs.is_empty()) {
        (_, true) => name.to_string(),
        (true, false) => format!("{name},{}", pairs.join(",")),
        (false, false) => format!("{name}:{}", pairs.join(",")),
    };
    Ok(text.parse()?)
}

pub fn noise_model(a: &NoiseArgs) -> CliResult<NoiseModel> {
    let mut m = NoiseModel::preset(a.noise.as_deref().unwrap_or("paper"))?;
    if let Some(path) = &a.noise_config {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        m.apply_config(&text)?;
    }
    for kv in &a.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        let v: f64 = v
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("--set {k}: bad number {v:?}")))?;
        m.set(k.trim(), v)?;
    }
    Ok(m)
}

impl PolicyArgs {
    pub fn given(&self) -> bool {
        self.no_selection || self.no_loss || !self.max_losses.is_empty()
    }

    /// Requested policies in a fixed order, each with a short label. The
    /// default policy when no flag is given.
    pub fn policies(&self) -> CliResult<Vec<(String, SelectionPolicy)>> {
        let mut out = Vec::new();
        if self.no_selection {
            out.push(("no-selection".to_string(), SelectionPolicy::permissive()));
        }
        if self.no_loss {
            let p = SelectionPolicy { require_no_loss: true, ..SelectionPolicy::default() };
            out.push(("no-loss".to_string(), p));
        }
        for m in &self.max_losses {
            for k in parse_loss_range(m)? {
                let label = k.map_or("max-losses=any".to_string(), |k| format!("max-losses={k}"));
                let p = SelectionPolicy { max_total_losses: k, ..SelectionPolicy::default() };
                out.push((label, p));
            }
        }
        if out.is_empty() {
            out.push(("default".to_string(), SelectionPolicy::default()));
        }
        Ok(out)
    }
}

fn single_policy(a: &PolicyArgs) -> CliResult<SelectionPolicy> {
    let ps = a.policies()?;
    match ps.as_slice() {
        [(_, p)] => Ok(*p),
        _ => Err(CliError::Usage("run takes one selection policy; compare several with `erasim analyze`".into())),
    }
}

/// `K`, an inclusive range `A..B` (or `A..=B`), or `any`.
fn parse_loss_range(s: &str) -> CliResult<Vec<Option<usize>>> {
    let bad = || CliError::Usage(format!("--max-losses: expected K, A..B or any, got {s:?}"));
    if s == "any" {
        return Ok(vec![None]);
    }
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    match s.split_once("..") {
        Some((a, b)) => {
            let (a, b) = (num(a)?, num(b.trim_start_matches('='))?);
            if a > b {
                return Err(bad());
            }
            Ok((a..=b).map(Some).collect())
        }
        None => Ok(vec![Some(num(s)?)]),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::args::{Cli, Command};
    use clap::Parser;

    fn run_args(argv: &[&str]) -> RunArgs {
        match Cli::try_parse_from(argv).unwrap().command {
            Command::Run(r) => r,
            _ => panic!("not run"),
        }
    }

    #[test]
    fn flags_build_canonical_specs() {
        let c = RunConfig::from_args(&run_args(&["erasim", "run", "bv", "--n", "7", "--encoded"])).unwrap();
        assert_eq!(c.experiment, "bv:n=7,encoded=true,s=1111111");
        let c = RunConfig::from_args(&run_args(&["erasim", "run", "cat-encoded-24", "--noise", "zero"])).unwrap();
        assert_eq!(c.experiment, "cat-encoded:k=24");
        assert_eq!(c.noise, NoiseModel::zero());
        let c = RunConfig::from_args(&run_args(&["erasim", "run", "repeated-cz:j=2", "--encoded", "false"])).unwrap();
        assert_eq!(c.experiment, "repeated-cz:j=2,encoded=false");
    }

    #[test]
    fn overrides_and_unknown_keys() {
        let c = RunConfig::from_args(&run_args(&["erasim", "run", "cat", "--n", "4", "--set", "p_1q=0.002"])).unwrap();
        assert_eq!(c.noise.p_1q, 0.002);
        assert!(RunConfig::from_args(&run_args(&["erasim", "run", "cat", "--n", "4", "--set", "p_bogus=0.1"])).is_err());
        assert!(RunConfig::from_args(&run_args(&["erasim", "run", "cat", "--n", "4", "--noise", "loud"])).is_err());
        assert!(RunConfig::from_args(&run_args(&["erasim", "run", "cat", "--n", "4", "--no-loss", "--no-selection"])).is_err());
        let bad = r#"{"experiment":"cat:n=4","noise":{},"trials":1,"seed":1,"policy":{},"out":"x","extra":1}"#;
        assert!(serde_json::from_str::<RunConfig>(bad).is_err());
    }

    #[test]
    fn loss_ranges() {
        assert_eq!(parse_loss_range("0..2").unwrap(), [Some(0), Some(1), Some(2)]);
        assert_eq!(parse_loss_range("1..=1").unwrap(), [Some(1)]);
        assert_eq!(parse_loss_range("any").unwrap(), [None]);
        assert!(parse_loss_range("3..1").is_err());
        let p = PolicyArgs { no_selection: true, no_loss: true, max_losses: vec!["0..5".into()] };
        assert_eq!(p.policies().unwrap().len(), 8);
    }
}
