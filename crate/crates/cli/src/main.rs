//! Command-line front end: simulate scenarios, evaluate prediction
//! streams, and compare the legacy and comprehension metric regimes.
//!
//! Exit codes: 0 success, 2 input/config error, 3 internal invariant
//! violation (never expected; any occurrence is a bug).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use doc_eval_core::metrics::doc::EvaluationConfig;
use doc_eval_core::report::{digest_bytes, load_report, report_to_json, MetricReport};
use doc_eval_core::scenario::{
    load_predictions, load_scenario, predictions_to_jsonl, scenario_to_json,
};
use doc_eval_core::simulator::{generate_scene, simulate_detector, SimulationConfig};
use doc_eval_core::evaluate;

#[derive(Parser)]
#[command(name = "doc-eval", version, about = "Scenario simulator and comprehension-metric evaluator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a scenario (and optionally a simulated prediction stream)
    /// from a config file.
    Simulate {
        /// JSON config with `scene` and optional `detector` sections.
        #[arg(long)]
        config: PathBuf,
        /// Output directory for scenario.json / predictions.jsonl.
        #[arg(long)]
        out: PathBuf,
        /// Override the scene seed from the config.
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Evaluate a prediction stream against a scenario and write a report.
    Evaluate {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        predictions: PathBuf,
        #[arg(long)]
        out: PathBuf,
        #[command(flatten)]
        eval: EvalFlags,
        /// Additionally write CSV plot data (latency histogram,
        /// latency-recall curve, PR curve).
        #[arg(long)]
        plot_data: bool,
    },
    /// Compare two reports over the same scenario, side by side.
    Compare {
        report_a: PathBuf,
        report_b: PathBuf,
    },
}

#[derive(Args)]
struct EvalFlags {
    /// Acceptable detection latency, seconds.
    #[arg(long)]
    adl: Option<f64>,
    /// 3D matching threshold, meters.
    #[arg(long)]
    tau_loc: Option<f64>,
    /// Consecutive matched-and-correct frames required for comprehension.
    #[arg(long)]
    persistence: Option<u32>,
    /// IoU threshold for the legacy regime.
    #[arg(long)]
    iou_threshold: Option<f64>,
    /// Comma-separated latency budgets for the latency-recall curve.
    #[arg(long)]
    adl_grid: Option<String>,
}

struct CliError {
    code: u8,
    message: String,
}

impl CliError {
    fn input(message: impl Into<String>) -> Self {
        CliError { code: 2, message: message.into() }
    }
}

impl<E: std::fmt::Display> From<E> for CliError
where
    E: Into<Box<dyn std::error::Error>>,
{
    fn from(e: E) -> Self {
        CliError { code: 2, message: e.to_string() }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = std::panic::catch_unwind(|| run(cli));
    match result {
        Ok(Ok(())) => ExitCode::SUCCESS,
        Ok(Err(e)) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.code)
        }
        Err(_) => {
            eprintln!("error: internal invariant violation");
            ExitCode::from(3)
        }
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out, seed } => cmd_simulate(&config, &out, seed),
        Command::Evaluate { scenario, predictions, out, eval, plot_data } => {
            cmd_evaluate(&scenario, &predictions, &out, &eval, plot_data)
        }
        Command::Compare { report_a, report_b } => cmd_compare(&report_a, &report_b),
    }
}

fn cmd_simulate(config_path: &Path, out: &Path, seed: Option<u64>) -> Result<(), CliError> {
    let text = std::fs::read_to_string(config_path)
        .map_err(|e| CliError::input(format!("cannot read {}: {e}", config_path.display())))?;
    let mut config: SimulationConfig = serde_json::from_str(&text)
        .map_err(|e| CliError::input(format!("config parse error: {e}")))?;
    if let Some(seed) = seed {
        config.scene.seed = seed;
    }
    config.scene.validate()?;
    if let Some(detector) = &config.detector {
        detector.validate()?;
    }

    std::fs::create_dir_all(out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", out.display())))?;
    let scenario = generate_scene(&config.scene)?;
    let scenario_json = scenario_to_json(&scenario);
    let scenario_path = out.join("scenario.json");
    std::fs::write(&scenario_path, &scenario_json)?;
    println!("scenario {} sha256:{}", scenario_path.display(), digest_bytes(scenario_json.as_bytes()));

    if let Some(detector) = &config.detector {
        let stream = simulate_detector(&scenario, detector, config.scene.seed);
        let jsonl = predictions_to_jsonl(&stream);
        let predictions_path = out.join("predictions.jsonl");
        std::fs::write(&predictions_path, &jsonl)?;
        println!(
            "predictions {} sha256:{}",
            predictions_path.display(),
            digest_bytes(jsonl.as_bytes())
        );
    }
    Ok(())
}

fn cmd_evaluate(
    scenario_path: &Path,
    predictions_path: &Path,
    out: &Path,
    flags: &EvalFlags,
    plot_data: bool,
) -> Result<(), CliError> {
    let scenario = load_scenario(scenario_path)?;
    let stream = load_predictions(predictions_path, &scenario.taxonomy)?;

    let mut config = EvaluationConfig::default();
    if let Some(adl) = flags.adl {
        config.adl = adl;
    }
    if let Some(tau) = flags.tau_loc {
        config.tau_loc = tau;
    }
    if let Some(p) = flags.persistence {
        config.persistence_frames = p;
    }
    if let Some(thr) = flags.iou_threshold {
        config.iou_threshold = thr;
    }
    if let Some(grid) = &flags.adl_grid {
        config.adl_grid = grid
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| CliError::input(format!("bad --adl-grid: {e}")))?;
    }
    config.validate().map_err(CliError::input)?;

    let report = evaluate(&scenario, &stream, &config);

    std::fs::create_dir_all(out)
        .map_err(|e| CliError::input(format!("cannot create {}: {e}", out.display())))?;
    let report_path = out.join("report.json");
    let json = report_to_json(&report);
    std::fs::write(&report_path, &json)?;
    println!("report {} sha256:{}", report_path.display(), digest_bytes(json.as_bytes()));

    if plot_data {
        write_plot_data(&report, out)?;
    }
    Ok(())
}

fn write_plot_data(report: &MetricReport, out: &Path) -> Result<(), CliError> {
    let mut hist = String::from("object_id,latency_seconds\n");
    for o in &report.doc.outcomes {
        if let Some(l) = o.latency {
            hist.push_str(&format!("{},{l}\n", o.object_id));
        }
    }
    std::fs::write(out.join("latency_histogram.csv"), hist)?;

    let mut lr = String::from("adl_seconds,compliance\n");
    for &(adl, c) in &report.doc.latency_recall.points {
        lr.push_str(&format!("{adl},{c}\n"));
    }
    std::fs::write(out.join("latency_recall.csv"), lr)?;

    let mut pr = String::from("threshold,precision,recall\n");
    for p in &report.legacy.pr_curve {
        pr.push_str(&format!("{},{},{}\n", p.threshold, p.precision, p.recall));
    }
    std::fs::write(out.join("pr_curve.csv"), pr)?;
    Ok(())
}

fn cmd_compare(path_a: &Path, path_b: &Path) -> Result<(), CliError> {
    let a = load_report(path_a)?;
    let b = load_report(path_b)?;
    if a.scenario_digest != b.scenario_digest {
        return Err(CliError::input(format!(
            "scenario digest mismatch: {} vs {}",
            a.scenario_digest, b.scenario_digest
        )));
    }

    let oos_precision = |r: &MetricReport| {
        let c = &r.doc.oos_detection;
        if c.tp + c.fp == 0 { 1.0 } else { c.tp as f64 / (c.tp + c.fp) as f64 }
    };
    let rows: Vec<(&str, f64, f64)> = vec![
        ("legacy.precision", a.legacy.precision, b.legacy.precision),
        ("legacy.recall", a.legacy.recall, b.legacy.recall),
        ("legacy.average_precision", a.legacy.average_precision, b.legacy.average_precision),
        ("doc.adl_compliance", a.doc.adl_compliance, b.doc.adl_compliance),
        ("doc.latency_recall_auc", a.doc.latency_recall.auc, b.doc.latency_recall.auc),
        ("doc.oos_detection_precision", oos_precision(&a), oos_precision(&b)),
        (
            "doc.occlusion_recovery_rate",
            a.doc.tracking.occlusion_recovery_rate,
            b.doc.tracking.occlusion_recovery_rate,
        ),
    ];

    println!("{:<30} {:>12} {:>12} {:>12}", "metric", "A", "B", "delta");
    for (name, va, vb) in &rows {
        println!("{name:<30} {va:>12.6} {vb:>12.6} {:>12.6}", vb - va);
    }

    // Regime disagreements: the legacy metric and its comprehension-side
    // counterpart move in different directions between A and B.
    let pairs = [
        ("legacy.recall", "doc.adl_compliance"),
        ("legacy.average_precision", "doc.latency_recall_auc"),
        ("legacy.precision", "doc.oos_detection_precision"),
    ];
    let value = |name: &str| rows.iter().find(|r| r.0 == name).map(|r| (r.1, r.2)).unwrap();
    let mut any = false;
    for (legacy_name, doc_name) in pairs {
        let (la, lb) = value(legacy_name);
        let (da, db) = value(doc_name);
        let dl = trend(lb - la);
        let dd = trend(db - da);
        if dl != dd && (dl != 0 || dd != 0) {
            any = true;
            println!(
                "DISAGREEMENT: {legacy_name} {} while {doc_name} {}",
                trend_word(dl),
                trend_word(dd)
            );
        }
    }
    if !any {
        println!("no regime disagreements");
    }
    Ok(())
}

fn trend(delta: f64) -> i8 {
    if delta > 1e-9 {
        1
    } else if delta < -1e-9 {
        -1
    } else {
        0
    }
}

fn trend_word(t: i8) -> &'static str {
    match t {
        1 => "improved",
        -1 => "regressed",
        _ => "held",
    }
}
