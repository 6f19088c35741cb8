use std::fs::{self, File, OpenOptions};
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use erasim::analysis::{analyze, Report, SelectionPolicy};
use erasim::codes::Registry;
use erasim::experiments::{Experiment, ExperimentSpec, TrialEval, BV_SIZES, MAX_CAT};
use erasim::noise::{NoiseModel, TrialRecord};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const RECORDS_FILE: &str = "records.jsonl";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const PLOT_FILE: &str = "plot.json";
pub const CONFIG_FILE: &str = "run.json";
pub const HISTOGRAM_FILE: &str = "histogram.csv";

const SUMMARY_HEADER: &str = "experiment,metric,value,ci_low,ci_high,n_accepted,n_total";

/// Paths written by a run, plus the summary it printed.
#[derive(Debug)]
pub struct RunOutput {
    pub files: Vec<PathBuf>,
    pub summary_csv: String,
}

fn write_file(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::io(path, e))
}

fn evaluate_all(exp: &Experiment, recs: &[TrialRecord]) -> CliResult<Vec<TrialEval>> {
    recs.iter()
        .map(|r| exp.evaluate(r).map_err(|e| CliError::Usage(format!("trial {} ({}): {e}", r.meta.trial, r.meta.setting))))
        .collect()
}

pub fn cmd_run(cfg: &RunConfig) -> CliResult<RunOutput> {
    let exp = Experiment::compile(&cfg.spec()?)?;
    fs::create_dir_all(&cfg.out).map_err(|e| CliError::io(&cfg.out, e))?;
    let rec_path = cfg.out.join(RECORDS_FILE);
    // records are never rewritten
    let file = OpenOptions::new()
        .write(true)
        .create_new(true)
        .open(&rec_path)
        .map_err(|e| match e.kind() {
            std::io::ErrorKind::AlreadyExists => {
                CliError::Usage(format!("{} already exists; choose another --out", rec_path.display()))
            }
            _ => CliError::io(&rec_path, e),
        })?;
    let recs = exp.run(&cfg.noise, cfg.trials, cfg.seed);
    let mut w = BufWriter::new(file);
    for r in &recs {
        writeln!(w, "{}", r.to_json_line()).map_err(|e| CliError::io(&rec_path, e))?;
    }
    w.flush().map_err(|e| CliError::io(&rec_path, e))?;

    let evals = evaluate_all(&exp, &recs)?;
    let report = analyze(&exp, &evals, &cfg.policy, cfg.seed)?;
    let mut files = vec![rec_path];
    let summary_csv = report.to_csv();
    for (name, text) in [
        (SUMMARY_FILE, summary_csv.clone()),
        (PLOT_FILE, serde_json::to_string_pretty(&report.plot).expect("plot serializes")),
        (CONFIG_FILE, serde_json::to_string_pretty(cfg).expect("config serializes")),
    ] {
        let p = cfg.out.join(name);
        write_file(&p, &text)?;
        files.push(p);
    }
    if let Some(h) = histogram_csv(&report) {
        let p = cfg.out.join(HISTOGRAM_FILE);
        write_file(&p, &h)?;
        files.push(p);
    }
    Ok(RunOutput { files, summary_csv })
}

/// Shots by number of correct blocks, for tesseract runs.
fn histogram_csv(report: &Report) -> Option<String> {
    let h = report.plot.get("histogram")?.as_array()?;
    let mut out = String::from("correct_blocks,shots\n");
    for (c, n) in h.iter().enumerate() {
        out.push_str(&format!("{c},{}\n", n.as_u64()?));
    }
    Some(out)
}

pub fn read_records(files: &[PathBuf]) -> CliResult<Vec<TrialRecord>> {
    let mut recs = Vec::new();
    for path in files {
        let f = File::open(path).map_err(|e| CliError::io(path, e))?;
        for (i, line) in BufReader::new(f).lines().enumerate() {
            let line = line.map_err(|e| CliError::io(path, e))?;
            if line.trim().is_empty() {
                continue;
            }
            let r = TrialRecord::from_json_line(&line)
                .map_err(|e| CliError::Usage(format!("{}:{}: {e}", path.display(), i + 1)))?;
            recs.push(r);
        }
    }
    Ok(recs)
}

/// The metric a loss-selection trade-off is about, and the acceptance
/// metric that goes with it.
fn headline(spec: &ExperimentSpec) -> (&'static str, Option<&'static str>) {
    match spec {
        ExperimentSpec::Cat { .. } => ("fidelity", Some("acceptance")),
        ExperimentSpec::CatEncoded { .. } => ("total_error", Some("acceptance")),
        ExperimentSpec::Bv { .. } => ("success_given_accept", Some("acceptance")),
        ExperimentSpec::RepeatedCz { .. } | ExperimentSpec::RandomSequence { .. } => ("logical_error", Some("acceptance")),
        ExperimentSpec::Tesseract { .. } => ("block_error", Some("copy_acceptance")),
        ExperimentSpec::Rb { .. } => ("error_per_op", None),
    }
}

fn fmt_row_tail(r: Option<&erasim::analysis::SummaryRow>) -> String {
    match r {
        Some(r) => format!("{},{},{}", r.value, r.ci_low, r.ci_high),
        None => ",,".to_string(),
    }
}

/// Re-runs the estimators on stored records. With one policy the output is
/// the run's summary CSV; with several it is a trade-off table with one
/// row per policy.
pub fn cmd_analyze(files: &[PathBuf], policies: &[(String, SelectionPolicy)], seed: Option<u64>) -> CliResult<String> {
    let recs = read_records(files)?;
    let Some(first) = recs.first() else {
        return Ok(format!("{SUMMARY_HEADER}\n,trials,0,0,0,0,0\n"));
    };
    let name = first.meta.experiment.clone();
    if let Some(other) = recs.iter().find(|r| r.meta.experiment != name) {
        return Err(CliError::Usage(format!(
            "records mix experiments {name:?} and {:?}",
            other.meta.experiment
        )));
    }
    let spec: ExperimentSpec = name.parse()?;
    let exp = Experiment::compile(&spec)?;
    let evals = evaluate_all(&exp, &recs)?;
    let seed = seed.unwrap_or(first.meta.seed);
    if let [(_, p)] = policies {
        return Ok(analyze(&exp, &evals, p, seed)?.to_csv());
    }
    let (metric, acc) = headline(&spec);
    let mut out = String::from("policy,metric,value,ci_low,ci_high,acceptance,acceptance_ci_low,acceptance_ci_high,n_accepted,n_total\n");
    for (label, p) in policies {
        let r = analyze(&exp, &evals, p, seed)?;
        let row = r.row(metric);
        let (na, nt) = row.map_or((0, 0), |r| (r.n_accepted, r.n_total));
        out.push_str(&format!(
            "{label},{metric},{},{},{na},{nt}\n",
            fmt_row_tail(row),
            fmt_row_tail(acc.and_then(|a| r.row(a)))
        ));
    }
    Ok(out)
}

pub fn cmd_list() -> String {
    let mut s = String::from("experiments:\n");
    let bv: Vec<String> = BV_SIZES.iter().map(|n| n.to_string()).collect();
    for (name, help) in [
        ("cat --n N", format!("unencoded antiferromagnetic cat, 2 ≤ N ≤ {MAX_CAT}")),
        ("cat-encoded --k K", "encoded cat on [[4,2,2]] blocks (cat-encoded-24 for K = 24)".to_string()),
        ("bv --n N [--encoded] [--s BITS]", format!("Bernstein-Vazirani, N in {{{}}}, s defaults to all ones", bv.join(", "))),
        ("repeated-cz --j J [--encoded BOOL]", "J+1 logical CZs with J error-detection rounds, J ≤ 9".to_string()),
        ("random-sequence --id I [--encoded BOOL]", "one of the random logical sequences, I in 0..=3".to_string()),
        ("tesseract [--ft BOOL]", "[[16,6,4]] blocks from paired [[8,3,2]] copies".to_string()),
        (
            "rb --kind KIND [--moves BOOL] [--depths D1/D2/...]",
            "randomized benchmarking: clifford-1q, irb-2q-static, echoed-2q".to_string(),
        ),
    ] {
        s.push_str(&format!("  {name:50} {help}\n"));
    }
    s.push_str("noise presets: paper, zero, static\nnoise keys (values in the paper preset):\n");
    let paper = serde_json::to_value(NoiseModel::paper()).expect("noise serializes");
    if let Some(obj) = paper.as_object() {
        for (k, v) in obj {
            s.push_str(&format!("  {k} = {v}\n"));
        }
    }
    s.push_str("codes:");
    for name in Registry::builtin().names() {
        s.push_str(&format!(" {name}"));
    }
    s.push('\n');
    s
}
