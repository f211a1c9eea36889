//! `darkscan` command line: analyze screenshots, evaluate findings.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand};
use darkscan::config::Config;
use darkscan::evaluation::{binary_accuracy, match_findings, run_ablation, EvalCounts, Instance, MetricsReport, ScreenOutcome};
use darkscan::extract::ExtractorSuite;
use darkscan::model::{Stage, StageSet};
use darkscan::pipeline::{load_annotated, Analysis, Engine};
use darkscan::report::{legend, render_overlay};
use darkscan::schema::{read_text, FindingsReport, GroundTruthFile, GroundTruthRecord};
use darkscan::Error;
use rayon::prelude::*;

#[derive(Parser)]
#[command(name = "darkscan", version, about = "Find dark patterns in annotated mobile UI screenshots")]
struct Cli {
    /// More log output (repeat for debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check one screenshot, or every screenshot in a directory.
    Analyze(AnalyzeArgs),
    /// Score findings reports against ground truth.
    Evaluate(EvaluateArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Screenshot (PNG/JPEG) or a directory of screenshots.
    input: PathBuf,
    /// Element sidecar [default: <stem>.elements.json beside the image].
    #[arg(long)]
    elements: Option<PathBuf>,
    /// OCR sidecar [default: <stem>.ocr.json beside the image].
    #[arg(long)]
    ocr: Option<PathBuf>,
    /// Rules file layered over the built-in rules.
    #[arg(long)]
    rules: Option<PathBuf>,
    /// Engine configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Report file, or output directory for a directory input [default: stdout / the input directory].
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overlay PNG (legend written beside it as .txt), or a directory for a directory input.
    #[arg(long)]
    overlay: Option<PathBuf>,
    /// Skip a property stage: icon, template, status, color_grouping.
    #[arg(long, value_name = "STAGE")]
    disable: Vec<Stage>,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Directory of findings reports; with --ablation, of screenshots with sidecars.
    #[arg(long)]
    pred: PathBuf,
    /// Directory of ground-truth files.
    #[arg(long)]
    gt: PathBuf,
    /// Re-analyze the screenshots under each cumulative stage configuration.
    #[arg(long)]
    ablation: bool,
    /// Engine configuration (TOML); supplies the match IoU and, with --ablation, the rules.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Also write the metrics as JSON to this file.
    #[arg(long)]
    json: Option<PathBuf>,
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> Error + '_ {
    move |source| Error::Io { path: path.to_path_buf(), source }
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), Error> {
    fs::write(path, contents).map_err(io_err(path))
}

fn load_config(path: Option<&Path>) -> Result<Config, Error> {
    match path {
        Some(p) => Config::load(p),
        None => Ok(Config::default()),
    }
}

fn is_image(p: &Path) -> bool {
    matches!(
        p.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("png" | "jpg" | "jpeg")
    )
}

fn sorted_entries(dir: &Path, keep: impl Fn(&Path) -> bool) -> Result<Vec<PathBuf>, Error> {
    if !dir.is_dir() {
        return Err(Error::MissingInput(dir.to_path_buf()));
    }
    let mut out = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let p = entry.map_err(io_err(dir))?.path();
        if p.is_file() && keep(&p) {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

fn stem(p: &Path) -> String {
    p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn write_overlay(a: &Analysis, png: &Path) -> Result<(), Error> {
    let image = a.screen.image.as_ref().ok_or_else(|| Error::Internal("screen has no raster".into()))?;
    render_overlay(image, &a.outcome.findings)
        .save(png)
        .map_err(|source| Error::Image { path: png.to_path_buf(), source })?;
    write_file(&png.with_extension("txt"), legend(&a.outcome.findings).as_bytes())
}

fn analyze(args: AnalyzeArgs) -> Result<(), Error> {
    let mut config = load_config(args.config.as_deref())?;
    if args.rules.is_some() {
        config.rules = args.rules.clone();
    }
    config.disable.extend(args.disable.iter().copied());
    let engine = Engine::new(config)?;

    if !args.input.is_dir() {
        let a = engine.analyze_path(&args.input, args.elements.as_deref(), args.ocr.as_deref())?;
        let json = a.report().to_json();
        match &args.out {
            Some(p) => write_file(p, json.as_bytes())?,
            None => std::io::stdout().write_all(json.as_bytes()).map_err(io_err(Path::new("<stdout>")))?,
        }
        if let Some(p) = &args.overlay {
            write_overlay(&a, p)?;
        }
        return Ok(());
    }

    if args.elements.is_some() || args.ocr.is_some() {
        Cli::command()
            .error(clap::error::ErrorKind::ArgumentConflict, "--elements/--ocr apply to a single image, not a directory")
            .exit();
    }
    let images = sorted_entries(&args.input, is_image)?;
    let out_dir = args.out.clone().unwrap_or_else(|| args.input.clone());
    for d in [Some(&out_dir), args.overlay.as_ref()].into_iter().flatten() {
        fs::create_dir_all(d).map_err(io_err(d))?;
    }
    let results: Vec<(PathBuf, Result<Analysis, Error>)> =
        images.par_iter().map(|p| (p.clone(), engine.analyze_path(p, None, None))).collect();
    let mut worst: Option<Error> = None;
    for (path, r) in results {
        let outcome = r.and_then(|a| {
            write_file(&out_dir.join(format!("{}.findings.json", stem(&path))), a.report().to_json().as_bytes())?;
            match &args.overlay {
                Some(d) => write_overlay(&a, &d.join(format!("{}.overlay.png", stem(&path)))),
                None => Ok(()),
            }
        });
        if let Err(e) = outcome {
            log::error!("{}: {e}", path.display());
            if worst.as_ref().is_none_or(|w| e.exit_code() > w.exit_code()) {
                worst = Some(e);
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

/// Findings reports keyed by image name; sidecars are skipped.
fn read_reports(dir: &Path) -> Result<BTreeMap<String, Vec<Instance>>, Error> {
    let mut out = BTreeMap::new();
    let files = sorted_entries(dir, |p| {
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
        name.ends_with(".json") && !name.ends_with(".elements.json") && !name.ends_with(".ocr.json")
    })?;
    for p in files {
        let r = FindingsReport::parse(&p.display().to_string(), &read_text(&p)?)?;
        out.insert(r.image, r.findings.iter().map(Instance::from).collect());
    }
    Ok(out)
}

fn read_truth(dir: &Path) -> Result<BTreeMap<String, Vec<GroundTruthRecord>>, Error> {
    let mut out = BTreeMap::new();
    for p in sorted_entries(dir, |p| p.extension().is_some_and(|e| e == "json"))? {
        let g = GroundTruthFile::parse(&p.display().to_string(), &read_text(&p)?)?;
        out.insert(g.image, g.instances);
    }
    Ok(out)
}

fn emit(reports: &[(&str, MetricsReport)], json_path: Option<&Path>) -> Result<(), Error> {
    let mut text = String::new();
    for (name, r) in reports {
        if !name.is_empty() {
            text.push_str(&format!("== {name}\n"));
        }
        text.push_str(&r.table());
    }
    print!("{text}");
    if let Some(p) = json_path {
        let v = if reports.len() == 1 && reports[0].0.is_empty() {
            reports[0].1.to_json()
        } else {
            serde_json::Value::Array(
                reports.iter().map(|(n, r)| serde_json::json!({"configuration": n, "metrics": r.to_json()})).collect(),
            )
        };
        let mut s = serde_json::to_string_pretty(&v).expect("metrics serialize");
        s.push('\n');
        write_file(p, s.as_bytes())?;
    }
    Ok(())
}

fn evaluate(args: EvaluateArgs) -> Result<(), Error> {
    let config = load_config(args.config.as_deref())?;
    let truth = read_truth(&args.gt)?;

    if args.ablation {
        let engine = Engine::new(config)?;
        let images = sorted_entries(&args.pred, is_image)?;
        let loaded: Vec<Result<_, Error>> = images
            .par_iter()
            .map(|p| {
                let (screen, suite) = load_annotated(p, None, None)?;
                let (screen, _) = engine.extract(screen, &ExtractorSuite::from_annotations(suite), StageSet::all())?;
                Ok(screen)
            })
            .collect();
        let screens = loaded.into_iter().collect::<Result<Vec<_>, _>>()?;
        let gts: Vec<Vec<GroundTruthRecord>> =
            screens.iter().map(|s| truth.get(&s.name).cloned().unwrap_or_default()).collect();
        for name in truth.keys().filter(|n| !screens.iter().any(|s| &s.name == *n)) {
            log::warn!("ground truth for {name} has no screenshot; skipped");
        }
        let reports = run_ablation(&screens, &gts, &engine.rules, engine.config.eval_iou);
        return emit(&reports, args.json.as_deref());
    }

    let preds = read_reports(&args.pred)?;
    let mut names: Vec<&String> = truth.keys().chain(preds.keys()).collect();
    names.sort();
    names.dedup();
    let mut counts = EvalCounts::default();
    let mut outcomes = Vec::new();
    for name in names {
        let gt: Vec<Instance> = truth.get(name).map(|g| g.iter().map(Instance::from).collect()).unwrap_or_default();
        if !truth.contains_key(name) {
            log::warn!("{name} has no ground truth; scored as benign");
        }
        let pred = preds.get(name).cloned().unwrap_or_default();
        counts.merge(&match_findings(&pred, &gt, config.eval_iou));
        outcomes.push(ScreenOutcome { malicious: !gt.is_empty(), flagged: !pred.is_empty() });
    }
    let mut report = MetricsReport::from_counts(&counts);
    report.binary_accuracy = Some(binary_accuracy(&outcomes));
    emit(&[("", report)], args.json.as_deref())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();
    let result = match cli.command {
        Command::Analyze(a) => analyze(a),
        Command::Evaluate(e) => evaluate(e),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
