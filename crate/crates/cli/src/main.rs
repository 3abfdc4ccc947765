use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use biaseval::assoc::{bundled, run_association_test, AssociationTestSpec, Level, PermutationConfig};
use biaseval::genderswap::{swap_dataset, GenderLexicon, RecordSwap, SwapReport};
use biaseval::metaeval::{
    compare_origin_swap, keep_record, preference_analysis, topk_system_curve, CorrelationConfig, CorrelationLevel,
    MetaEvalDataset, MultiRef, RecordFilter, DEFAULT_SHUFFLES,
};
use biaseval::{Error, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

mod metrics;
mod render;
mod report;

use metrics::{resolve, MetricArgs};
use report::{
    AssocCell, Body, CorrelateCell, CorrelateResults, InputDigest, PreferResults, PreferRow, Report, TopKSeries,
};

/// Exit status when the report was written but some cells failed.
const EXIT_CELL_FAILURES: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "biaseval", version, about = "Audit text generation metrics for social bias")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run association tests against metrics.
    Assoc(AssocArgs),
    /// Gender-swap every hypothesis and reference of a dataset.
    Swap(SwapArgs),
    /// Compare scores of male hypotheses and their swapped versions.
    Prefer(PreferArgs),
    /// Correlate metrics with human judgments before and after swapping.
    Correlate(CorrelateArgs),
    /// Render a JSON report as markdown or CSV.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
    Markdown,
}

#[derive(Args, Debug)]
struct Output {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// JSON report path; markdown or CSV output goes next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct LexiconArgs {
    /// Gender lexicon JSON; the bundled list is used otherwise.
    #[arg(long)]
    lexicon: Option<PathBuf>,
    /// Drop ambiguous rules so every replacement is one-to-one.
    #[arg(long)]
    bijective: bool,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum LevelArg {
    Word,
    Sentence,
    SentenceUnbleached,
}

impl From<LevelArg> for Level {
    fn from(l: LevelArg) -> Level {
        match l {
            LevelArg::Word => Level::Word,
            LevelArg::Sentence => Level::Sentence,
            LevelArg::SentenceUnbleached => Level::SentenceUnbleached,
        }
    }
}

#[derive(Args, Debug)]
struct AssocArgs {
    /// Test files; the bundled tests are used when none are given.
    #[arg(long = "tests", num_args = 1..)]
    tests: Vec<PathBuf>,
    /// Restrict bundled tests to these names (C1, C6-N, DB:C, ...).
    #[arg(long, value_delimiter = ',')]
    names: Vec<String>,
    #[arg(long, value_enum, value_delimiter = ',')]
    levels: Vec<LevelArg>,
    /// Sample partitions even when all of them could be enumerated.
    #[arg(long)]
    force_sampling: bool,
    #[command(flatten)]
    metrics: MetricArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct SwapArgs {
    input: PathBuf,
    output: PathBuf,
    /// Replacement log, one line per replacement; defaults to OUTPUT.audit.tsv.
    #[arg(long)]
    audit: Option<PathBuf>,
    #[command(flatten)]
    lexicon: LexiconArgs,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Max,
    Mean,
    Native,
}

impl From<ModeArg> for MultiRef {
    fn from(m: ModeArg) -> MultiRef {
        match m {
            ModeArg::Max => MultiRef::Max,
            ModeArg::Mean => MultiRef::Mean,
            ModeArg::Native => MultiRef::Native,
        }
    }
}

#[derive(Args, Debug)]
struct PreferArgs {
    dataset: PathBuf,
    #[arg(long, value_enum, default_value_t = ModeArg::Max)]
    mode: ModeArg,
    #[command(flatten)]
    lexicon: LexiconArgs,
    #[command(flatten)]
    metrics: MetricArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum CorrLevelArg {
    Example,
    System,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FilterArg {
    All,
    MaleOnly,
    MaleOnlyNeutralRefs,
}

#[derive(Args, Debug)]
struct CorrelateArgs {
    dataset: PathBuf,
    /// Human dimensions to correlate against; all by default.
    #[arg(long, value_delimiter = ',')]
    dimensions: Vec<String>,
    #[arg(long, value_enum, default_value_t = ModeArg::Max)]
    mode: ModeArg,
    #[arg(long, value_enum, default_value_t = CorrLevelArg::Example)]
    level: CorrLevelArg,
    #[arg(long, value_enum, default_value_t = FilterArg::All)]
    filter: FilterArg,
    /// Top-k system counts for system-level curves.
    #[arg(long, value_delimiter = ',')]
    topk: Vec<usize>,
    /// CSV file for the top-k curves.
    #[arg(long)]
    topk_out: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_SHUFFLES)]
    shuffles: usize,
    #[command(flatten)]
    lexicon: LexiconArgs,
    #[command(flatten)]
    metrics: MetricArgs,
    #[command(flatten)]
    output: Output,
}

#[derive(Args, Debug)]
struct ReportArgs {
    input: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Markdown)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn write_file(path: &Path, body: &str) -> Result<()> {
    std::fs::write(path, body).map_err(|e| Error::io(path, e))
}

fn rendered(report: &Report, format: Format) -> String {
    match format {
        Format::Json => report.to_json(),
        Format::Csv => render::csv(report),
        Format::Markdown => render::markdown(report),
    }
}

/// Writes the JSON report (and its human form) or prints the requested form.
fn emit(report: &Report, output: &Output) -> Result<u8> {
    match &output.out {
        Some(path) => {
            write_file(path, &report.to_json())?;
            let ext = match output.format {
                Format::Json => None,
                Format::Csv => Some("csv"),
                Format::Markdown => Some("md"),
            };
            if let Some(ext) = ext {
                write_file(&path.with_extension(ext), &rendered(report, output.format))?;
            }
        }
        None => print!("{}", rendered(report, output.format)),
    }
    let failed = report.failed_cells();
    if failed > 0 {
        eprintln!("{failed} cell(s) failed; see the report");
        return Ok(EXIT_CELL_FAILURES);
    }
    Ok(0)
}

fn load_lexicon(args: &LexiconArgs, inputs: &mut Vec<InputDigest>) -> Result<GenderLexicon> {
    let lex = match &args.lexicon {
        Some(path) => {
            inputs.push(InputDigest::of_file(path).map_err(|e| Error::io(path, e))?);
            GenderLexicon::load(path)?
        }
        None => GenderLexicon::builtin(),
    };
    Ok(if args.bijective { lex.bijective() } else { lex })
}

fn load_dataset(path: &Path, inputs: &mut Vec<InputDigest>) -> Result<MetaEvalDataset> {
    inputs.push(InputDigest::of_file(path).map_err(|e| Error::io(path, e))?);
    MetaEvalDataset::load(path)
}

fn cmd_assoc(args: AssocArgs) -> Result<u8> {
    let mut inputs = Vec::new();
    let levels: Vec<Level> = args.levels.iter().map(|&l| l.into()).collect();
    let mut specs: Vec<AssociationTestSpec> = Vec::new();
    if args.tests.is_empty() {
        for spec in bundled::all()? {
            let named = args.names.is_empty() || args.names.iter().any(|n| n.eq_ignore_ascii_case(&spec.name));
            if named && (levels.is_empty() || levels.contains(&spec.level)) {
                let body = serde_json::to_vec(&spec).expect("spec serializes");
                inputs.push(InputDigest::of_bytes(
                    &format!("bundled:{}:{}", spec.name, spec.level.as_str()),
                    &body,
                ));
                specs.push(spec);
            }
        }
        if specs.is_empty() {
            return Err(Error::invalid(format!(
                "no bundled test matches {:?} at {:?}",
                args.names, args.levels
            )));
        }
    } else {
        for path in &args.tests {
            let spec = AssociationTestSpec::load(path)?;
            if levels.is_empty() || levels.contains(&spec.level) {
                inputs.push(InputDigest::of_file(path).map_err(|e| Error::io(path, e))?);
                specs.push(spec);
            }
        }
    }
    let metrics = resolve(&args.metrics, None, &mut inputs)?;
    let config = PermutationConfig {
        force_sampling: args.force_sampling,
        ..PermutationConfig::new(args.output.seed)
    };

    let mut cells = Vec::new();
    for spec in &specs {
        for m in &metrics {
            let outcome = run_association_test::<f64, _>(spec, m.scorer.as_ref(), config);
            cells.push(AssocCell {
                test: spec.name.clone(),
                level: spec.level,
                metric: m.config.name.clone(),
                error: outcome.as_ref().err().map(ToString::to_string),
                result: outcome.ok(),
            });
        }
    }
    let report = Report::new(
        args.output.seed,
        metrics.into_iter().map(|m| m.config).collect(),
        inputs,
        Body::Assoc(cells),
    )
    .setting("force_sampling", args.force_sampling);
    emit(&report, &args.output)
}

fn audit_lines(audit: &[RecordSwap]) -> String {
    let mut out = String::new();
    let mut push = |rec: &RecordSwap, field: &str, report: &SwapReport| {
        for r in &report.replacements {
            out.push_str(&format!(
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\n",
                rec.example_id, rec.system_id, field, r.position, r.old, r.new, r.rule
            ));
        }
    };
    for rec in audit {
        push(rec, "hypothesis", &rec.hypothesis);
        for (i, r) in rec.references.iter().enumerate() {
            push(rec, &format!("reference[{i}]"), r);
        }
    }
    out
}

fn cmd_swap(args: SwapArgs) -> Result<u8> {
    let mut inputs = Vec::new();
    let lexicon = load_lexicon(&args.lexicon, &mut inputs)?;
    let dataset = load_dataset(&args.input, &mut inputs)?;
    let (swapped, audit) = swap_dataset(&dataset, &lexicon);
    swapped.save(&args.output)?;
    let audit_path = args.audit.clone().unwrap_or_else(|| {
        let mut p = args.output.clone().into_os_string();
        p.push(".audit.tsv");
        PathBuf::from(p)
    });
    write_file(&audit_path, &audit_lines(&audit))?;
    let total: usize = audit.iter().map(RecordSwap::replacement_count).sum();
    let plural = |n: usize, word: &str| format!("{n} {word}{}", if n == 1 { "" } else { "s" });
    eprintln!("{} in {}", plural(total, "replacement"), plural(audit.len(), "record"));
    Ok(0)
}

fn cmd_prefer(args: PreferArgs) -> Result<u8> {
    let mut inputs = Vec::new();
    let dataset = load_dataset(&args.dataset, &mut inputs)?;
    let lexicon = load_lexicon(&args.lexicon, &mut inputs)?;
    let metrics = resolve(&args.metrics, Some(&dataset), &mut inputs)?;
    let mode: MultiRef = args.mode.into();
    let n = dataset
        .records
        .iter()
        .filter(|r| keep_record(r, RecordFilter::MaleOnlyNeutralRefs, &lexicon))
        .count();
    let rows = metrics
        .iter()
        .map(|m| {
            let outcome = preference_analysis(&dataset, m.scorer.as_ref(), &lexicon, mode);
            PreferRow {
                metric: m.config.name.clone(),
                error: outcome.as_ref().err().map(ToString::to_string),
                report: outcome.ok(),
            }
        })
        .collect();
    let report = Report::new(
        args.output.seed,
        metrics.into_iter().map(|m| m.config).collect(),
        inputs,
        Body::Prefer(PreferResults {
            dataset: dataset.name.clone(),
            n,
            rows,
        }),
    )
    .setting("mode", mode)
    .setting("bijective", args.lexicon.bijective);
    emit(&report, &args.output)
}

fn cmd_correlate(args: CorrelateArgs) -> Result<u8> {
    let mut inputs = Vec::new();
    let dataset = load_dataset(&args.dataset, &mut inputs)?;
    let lexicon = load_lexicon(&args.lexicon, &mut inputs)?;
    let metrics = resolve(&args.metrics, Some(&dataset), &mut inputs)?;
    let mode: MultiRef = args.mode.into();
    let level = match args.level {
        CorrLevelArg::Example => CorrelationLevel::Example,
        CorrLevelArg::System => CorrelationLevel::System,
    };
    let filter = match args.filter {
        FilterArg::All => RecordFilter::All,
        FilterArg::MaleOnly => RecordFilter::MaleOnly,
        FilterArg::MaleOnlyNeutralRefs => RecordFilter::MaleOnlyNeutralRefs,
    };
    let dimensions = if args.dimensions.is_empty() {
        dataset.dimensions.clone()
    } else {
        args.dimensions.clone()
    };
    let config = CorrelationConfig {
        seed: args.output.seed,
        shuffles: args.shuffles,
    };

    let mut cells = Vec::new();
    for m in &metrics {
        for dim in &dimensions {
            let outcome = compare_origin_swap(&dataset, m.scorer.as_ref(), dim, mode, level, filter, &lexicon, config);
            cells.push(match outcome {
                Ok(r) => CorrelateCell {
                    metric: m.config.name.clone(),
                    dimension: dim.clone(),
                    origin: Some(r.origin),
                    swapped: Some(r.swapped),
                    delta: Some(r.delta),
                    error: None,
                },
                Err(e) => CorrelateCell {
                    metric: m.config.name.clone(),
                    dimension: dim.clone(),
                    origin: None,
                    swapped: None,
                    delta: None,
                    error: Some(e.to_string()),
                },
            });
        }
    }

    let mut topk = Vec::new();
    if !args.topk.is_empty() {
        let swapped = swap_dataset(&dataset, &lexicon).0;
        for m in &metrics {
            for dim in &dimensions {
                topk.push(TopKSeries {
                    metric: m.config.name.clone(),
                    dimension: dim.clone(),
                    origin: topk_system_curve(&dataset, m.scorer.as_ref(), dim, mode, &args.topk, config)?,
                    swapped: topk_system_curve(&swapped, m.scorer.as_ref(), dim, mode, &args.topk, config)?,
                });
            }
        }
    }

    let results = CorrelateResults {
        dataset: dataset.name.clone(),
        level,
        filter,
        mode,
        cells,
        topk,
    };
    if let Some(path) = &args.topk_out {
        write_file(path, &render::topk_csv(&results))?;
    }
    let report = Report::new(
        args.output.seed,
        metrics.into_iter().map(|m| m.config).collect(),
        inputs,
        Body::Correlate(results),
    )
    .setting("shuffles", args.shuffles)
    .setting("bijective", args.lexicon.bijective);
    emit(&report, &args.output)
}

fn cmd_report(args: ReportArgs) -> Result<u8> {
    let body = std::fs::read_to_string(&args.input).map_err(|e| Error::io(&args.input, e))?;
    let report: Report = serde_json::from_str(&body).map_err(|e| Error::json(args.input.display().to_string(), e))?;
    let text = rendered(&report, args.format);
    match &args.out {
        Some(path) => write_file(path, &text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Error::io("<stdout>", e))?;
        }
    }
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Assoc(a) => cmd_assoc(a),
        Command::Swap(a) => cmd_swap(a),
        Command::Prefer(a) => cmd_prefer(a),
        Command::Correlate(a) => cmd_correlate(a),
        Command::Report(a) => cmd_report(a),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
