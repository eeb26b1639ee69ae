//! `ava-eval`: validate annotation files, build prompt banks and keyframe
//! schedules, evaluate detections and render reports.
//!
//! Exit status: 0 on success, 1 when inputs fail validation, 2 on usage
//! errors (bad flags, unreadable files).

mod manifest;

use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use ava_eval::ava_data::{
    parse_detections, parse_vocabulary, ActionVocabulary, DataError, EvalIndex, GroundTruthReader,
    ValidationReport,
};
use ava_eval::metrics::{evaluate, evaluate_with_threads, EvalConfig, Interpolation};
use ava_eval::prompt_schedule::{
    build_prompt_bank, build_schedule, PromptTemplate, ScheduleConfig, DEFAULT_PATTERN,
};
use ava_eval::report::{
    emit_pr_points, emit_report, parse_report_csv, rank_classes, ReportFormat, DEFAULT_K,
};
use ava_eval::Strictness;
use clap::{Args, Parser, Subcommand};

use manifest::{ConfigEcho, InputDigest, Inputs, Outputs, RowCounts, Rows, RunManifest};

#[derive(Parser)]
#[command(
    name = "ava-eval",
    version,
    about = "Frame-level action detection evaluation"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check ground-truth and/or detection files against a vocabulary.
    Validate {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long)]
        gt: Option<PathBuf>,
        #[arg(long)]
        det: Option<PathBuf>,
        /// Stop at the first bad row.
        #[arg(long)]
        strict: bool,
    },
    /// Write the `action_id,question` prompt bank for a vocabulary.
    Prompts {
        #[arg(long)]
        vocab: PathBuf,
        #[arg(long, default_value = DEFAULT_PATTERN)]
        template: String,
        /// Replace the generated question for a class: `NAME=QUESTION`.
        #[arg(long = "override", value_name = "NAME=QUESTION")]
        overrides: Vec<String>,
        /// Use a specific gerund for a verb: `VERB=GERUND`.
        #[arg(long = "gerund", value_name = "VERB=GERUND")]
        gerunds: Vec<String>,
        /// Overrides naming unknown classes are errors instead of warnings.
        #[arg(long)]
        strict: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the `video_id,timestamp` keyframe schedule.
    Schedule {
        #[arg(long = "video")]
        videos: Vec<String>,
        /// File with one video id per line.
        #[arg(long = "videos")]
        video_list: Option<PathBuf>,
        #[arg(long, default_value_t = ScheduleConfig::DEFAULT_START_S)]
        start: u32,
        #[arg(long, default_value_t = ScheduleConfig::DEFAULT_END_S)]
        end: u32,
        #[arg(long, default_value_t = 1)]
        interval: u32,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compute per-class AP and mAP; writes the report CSV and a manifest.
    Evaluate(EvaluateArgs),
    /// Render best/worst rankings from a report CSV.
    Report {
        #[arg(long)]
        input: PathBuf,
        /// Defaults to the manifest written next to the report.
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_K)]
        k: usize,
        #[arg(long, default_value = "markdown")]
        format: ReportFormat,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct EvaluateArgs {
    #[arg(long)]
    gt: PathBuf,
    #[arg(long)]
    det: PathBuf,
    #[arg(long)]
    vocab: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 0.5)]
    iou_threshold: f64,
    #[arg(long, default_value = "all_point")]
    interpolation: Interpolation,
    #[arg(long, default_value_t = 0.0)]
    score_floor: f64,
    #[arg(long)]
    strict: bool,
    /// Also write PR points to `<out stem>.pr.csv`.
    #[arg(long)]
    curves: bool,
    /// Worker threads for evaluation; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long)]
    manifest: Option<PathBuf>,
}

/// A failure carrying its exit status.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

type Outcome<T = ()> = Result<T, Failure>;

fn usage(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 2,
        error: error.into(),
    }
}

fn invalid(error: impl Into<anyhow::Error>) -> Failure {
    Failure {
        code: 1,
        error: error.into(),
    }
}

/// Row and vocabulary problems are validation failures; I/O is usage.
fn data_failure(path: &Path, e: DataError) -> Failure {
    let code = if matches!(e, DataError::Io(_)) { 2 } else { 1 };
    Failure {
        code,
        error: anyhow!(e).context(format!("{}", path.display())),
    }
}

fn open(path: &Path) -> Outcome<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .with_context(|| format!("cannot open {}", path.display()))
        .map_err(usage)
}

fn read_text(path: &Path) -> Outcome<String> {
    fs::read_to_string(path)
        .with_context(|| format!("cannot read {}", path.display()))
        .map_err(usage)
}

fn write_output(path: Option<&Path>, text: &str) -> Outcome {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("cannot write {}", p.display())),
        None => io::stdout()
            .write_all(text.as_bytes())
            .context("cannot write to stdout"),
    }
    .map_err(usage)
}

fn load_vocab(path: &Path) -> Outcome<ActionVocabulary> {
    parse_vocabulary(open(path)?).map_err(|e| data_failure(path, e))
}

fn strictness(strict: bool) -> Strictness {
    if strict {
        Strictness::Strict
    } else {
        Strictness::Lenient
    }
}

fn counts(r: &ValidationReport) -> RowCounts {
    RowCounts {
        total: r.total_rows,
        parsed: r.parsed_rows,
        rejected: r.rejected_total(),
    }
}

fn print_rejects(label: &str, path: &Path, report: &ValidationReport) {
    if report.rejected_total() > 0 {
        eprintln!(
            "warning: {label} {}: {} rows rejected",
            path.display(),
            report.rejected_total()
        );
        for issue in &report.issues {
            eprintln!("  {issue}");
        }
    }
}

/// Streams ground truth straight into the index.
fn load_ground_truth(
    path: &Path,
    vocab: &ActionVocabulary,
    strict: Strictness,
) -> Outcome<(EvalIndex, ValidationReport)> {
    let mut reader = GroundTruthReader::new(open(path)?, vocab, strict);
    let mut builder = EvalIndex::builder();
    for rec in reader.by_ref() {
        builder.insert(rec.map_err(|e| data_failure(path, e))?);
    }
    let mut report = reader.into_report();
    let index = builder.finish();
    report.record_duplicates(index.duplicates_per_class());
    Ok((index, report))
}

fn validate(vocab: &Path, gt: Option<&Path>, det: Option<&Path>, strict: bool) -> Outcome {
    let vocabulary = load_vocab(vocab)?;
    println!(
        "vocabulary {}: {} classes",
        vocab.display(),
        vocabulary.len()
    );
    let mut rejected = 0;
    if let Some(path) = gt {
        let (_, report) = load_ground_truth(path, &vocabulary, strictness(strict))?;
        print!("ground truth {}:\n{report}", path.display());
        rejected += report.rejected_total();
    }
    if let Some(path) = det {
        let (_, report) = parse_detections::<f64, _>(open(path)?, &vocabulary, strictness(strict))
            .map_err(|e| data_failure(path, e))?;
        print!("detections {}:\n{report}", path.display());
        rejected += report.rejected_total();
    }
    if rejected > 0 {
        return Err(invalid(anyhow!("{rejected} rows rejected")));
    }
    Ok(())
}

fn split_pair<'a>(flag: &str, s: &'a str) -> Outcome<(&'a str, &'a str)> {
    s.split_once('=')
        .filter(|(k, v)| !k.trim().is_empty() && !v.trim().is_empty())
        .map(|(k, v)| (k.trim(), v.trim()))
        .ok_or_else(|| usage(anyhow!("--{flag} expects KEY=VALUE, got {s:?}")))
}

fn prompts(
    vocab: &Path,
    pattern: &str,
    overrides: &[String],
    gerunds: &[String],
    strict: bool,
    out: Option<&Path>,
) -> Outcome {
    let vocabulary = load_vocab(vocab)?;
    let mut template = PromptTemplate::new(pattern).map_err(usage)?;
    for o in overrides {
        let (name, question) = split_pair("override", o)?;
        template = template.with_override(name, question).map_err(usage)?;
    }
    for g in gerunds {
        let (verb, gerund) = split_pair("gerund", g)?;
        template = template.with_gerund(verb, gerund);
    }
    let (bank, warnings) =
        build_prompt_bank(&vocabulary, &template, strictness(strict)).map_err(invalid)?;
    for w in warnings {
        eprintln!("warning: {w}");
    }
    write_output(out, &bank.to_csv().map_err(invalid)?)
}

fn schedule(
    videos: &[String],
    video_list: Option<&Path>,
    config: ScheduleConfig,
    out: Option<&Path>,
) -> Outcome {
    let mut ids = videos.to_vec();
    if let Some(path) = video_list {
        let text = read_text(path)?;
        ids.extend(
            text.lines()
                .map(str::trim)
                .filter(|l| !l.is_empty())
                .map(String::from),
        );
    }
    let plan = build_schedule(&ids, &config).map_err(usage)?;
    write_output(out, &plan.to_csv())
}

fn run_evaluate(args: &EvaluateArgs) -> Outcome {
    let config = EvalConfig::new(args.iou_threshold, args.interpolation, args.score_floor)
        .map_err(usage)?
        .with_curves(args.curves);
    let strict = strictness(args.strict);
    let vocab = load_vocab(&args.vocab)?;
    let (index, gt_report) = load_ground_truth(&args.gt, &vocab, strict)?;
    print_rejects("ground truth", &args.gt, &gt_report);
    let (dets, det_report) = parse_detections::<f64, _>(open(&args.det)?, &vocab, strict)
        .map_err(|e| data_failure(&args.det, e))?;
    print_rejects("detections", &args.det, &det_report);

    let report = match args.threads {
        Some(n) => evaluate_with_threads(&index, dets, &vocab, &config, n),
        None => evaluate(&index, dets, &vocab, &config),
    }
    .map_err(invalid)?;
    let table = rank_classes(&report, &vocab, DEFAULT_K).map_err(invalid)?;
    let csv = emit_report(&report, &table, &vocab, ReportFormat::Csv).map_err(invalid)?;
    write_output(Some(&args.out), &csv)?;

    let pr_path = args.curves.then(|| manifest::pr_points_path(&args.out));
    if let Some(p) = &pr_path {
        write_output(Some(p), &emit_pr_points(&report).map_err(invalid)?)?;
    }

    let digest = |p: &Path| {
        InputDigest::of(p)
            .with_context(|| format!("cannot hash {}", p.display()))
            .map_err(usage)
    };
    let run = RunManifest {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        timestamp: manifest::now(),
        inputs: Inputs {
            ground_truth: digest(&args.gt)?,
            detections: digest(&args.det)?,
            vocabulary: digest(&args.vocab)?,
        },
        config: ConfigEcho {
            iou_threshold: args.iou_threshold,
            interpolation: args.interpolation.to_string(),
            score_floor: args.score_floor,
            curves: args.curves,
            strict: args.strict,
        },
        rows: Rows {
            ground_truth: counts(&gt_report),
            detections: counts(&det_report),
        },
        outputs: Outputs {
            report: args.out.display().to_string(),
            pr_points: pr_path.as_ref().map(|p| p.display().to_string()),
        },
        map: report.map(),
        evaluable_classes: report.totals().evaluable_classes,
    };
    let manifest_path = args
        .manifest
        .clone()
        .unwrap_or_else(|| manifest::manifest_path(&args.out));
    let json = serde_json::to_string_pretty(&run).expect("manifest serializes") + "\n";
    write_output(Some(&manifest_path), &json)?;

    let totals = report.totals();
    println!(
        "mAP: {:.4} over {} of {} classes ({} ground-truth boxes, {} detections)",
        report.map().unwrap_or(0.0),
        totals.evaluable_classes,
        totals.classes,
        totals.num_gt,
        totals.num_det
    );
    Ok(())
}

fn run_report(
    input: &Path,
    manifest_path: Option<&Path>,
    k: usize,
    format: ReportFormat,
    out: Option<&Path>,
) -> Outcome {
    let default_manifest = manifest::manifest_path(input);
    let manifest_path = manifest_path.unwrap_or(&default_manifest);
    let mut config = EvalConfig::default();
    if manifest_path.exists() {
        let run: RunManifest = serde_json::from_str(&read_text(manifest_path)?)
            .with_context(|| format!("malformed manifest {}", manifest_path.display()))
            .map_err(usage)?;
        let interpolation = run.config.interpolation.parse().map_err(usage)?;
        config = EvalConfig::new(
            run.config.iou_threshold,
            interpolation,
            run.config.score_floor,
        )
        .map_err(usage)?;
    }
    let (report, vocab) = parse_report_csv(&read_text(input)?, config).map_err(invalid)?;
    let table = rank_classes(&report, &vocab, k).map_err(|e| match e {
        ava_eval::report::ReportError::ZeroK => usage(e),
        e => invalid(e),
    })?;
    write_output(
        out,
        &emit_report(&report, &table, &vocab, format).map_err(invalid)?,
    )
}

fn run(cli: Cli) -> Outcome {
    match cli.command {
        Command::Validate {
            vocab,
            gt,
            det,
            strict,
        } => validate(&vocab, gt.as_deref(), det.as_deref(), strict),
        Command::Prompts {
            vocab,
            template,
            overrides,
            gerunds,
            strict,
            out,
        } => prompts(
            &vocab,
            &template,
            &overrides,
            &gerunds,
            strict,
            out.as_deref(),
        ),
        Command::Schedule {
            videos,
            video_list,
            start,
            end,
            interval,
            out,
        } => {
            let config = ScheduleConfig::new(start, end, interval).map_err(usage)?;
            schedule(&videos, video_list.as_deref(), config, out.as_deref())
        }
        Command::Evaluate(args) => run_evaluate(&args),
        Command::Report {
            input,
            manifest,
            k,
            format,
            out,
        } => run_report(&input, manifest.as_deref(), k, format, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure { code, error }) => {
            eprintln!("error: {error:#}");
            ExitCode::from(code)
        }
    }
}
