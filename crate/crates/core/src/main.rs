use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use controversy::data::{load_dataset_path, load_predictions_path, Dataset, PredictionMatrix};
use controversy::description::{Binning, Description, Notation};
use controversy::error::{Error, Result};
use controversy::export::{prediction_order, write_ordering_csv, write_ppm};
use controversy::measures::{measure_baseline, Measure};
use controversy::report::{caption, render_table, to_json, write_csv, Fingerprint, RunReport};
use controversy::search::{beam_search, Direction, SearchConfig};

#[derive(Parser)]
#[command(name = "controversy", version, about = "Find regions where classifiers exceptionally (dis)agree")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Beam search for the best subgroups under one measure.
    Mine(MineArgs),
    /// Export the prediction matrix, rows ordered by predictions.
    ExportMatrix(ExportArgs),
    /// Print measure values on the whole dataset.
    Baseline(BaselineArgs),
}

#[derive(Args)]
struct Inputs {
    /// Dataset CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// JSON schema assigning a role to each column.
    #[arg(long)]
    schema: PathBuf,
    /// Prediction CSV, one column per classifier.
    #[arg(long)]
    predictions: PathBuf,
}

impl Inputs {
    fn load(&self) -> Result<(Dataset, PredictionMatrix)> {
        let ds = load_dataset_path(&self.data, &self.schema)?;
        let matrix = load_predictions_path(&self.predictions, &ds)?;
        Ok((ds, matrix))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Table,
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum DirectionArg {
    Max,
    Min,
}

#[derive(Clone, Copy, ValueEnum)]
enum BinningArg {
    EqualWidth,
    EqualFrequency,
}

#[derive(Args)]
struct MineArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// row | ccl | cac | cco | gt-yac | gt-yac2 | rasl
    #[arg(long)]
    measure: String,
    #[arg(long, value_enum, default_value = "max")]
    direction: DirectionArg,
    #[arg(long, default_value_t = 25)]
    beam_width: usize,
    #[arg(long, default_value_t = 3)]
    depth: usize,
    /// Minimum subgroup size as a fraction of the cases.
    #[arg(long, default_value_t = 0.04)]
    min_support: f64,
    /// Bins per numeric attribute.
    #[arg(long, default_value_t = 7)]
    bins: usize,
    #[arg(long, value_enum, default_value = "equal-width")]
    binning: BinningArg,
    /// Number of subgroups reported.
    #[arg(long, default_value_t = 10)]
    top: usize,
    /// Positive class label for rasl (default: the label sorting last).
    #[arg(long)]
    positive: Option<String>,
    /// Write the report here in --format; the table still goes to stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "table")]
    format: Format,
    /// Render descriptions with ASCII operators and AND.
    #[arg(long)]
    ascii: bool,
    /// Score candidates on a single thread.
    #[arg(long)]
    sequential: bool,
    /// Reserved; the search is deterministic.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Args)]
struct ExportArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Subgroup to highlight, e.g. "odor = n AND ring_type = p".
    #[arg(long)]
    description: Option<String>,
    /// Output stem: writes STEM.ppm and STEM.csv.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct BaselineArgs {
    #[command(flatten)]
    inputs: Inputs,
    /// Comma-separated measure tokens, or "all".
    #[arg(long, default_value = "all")]
    measure: String,
    #[arg(long)]
    positive: Option<String>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Mine(args) => mine(&args),
        Command::ExportMatrix(args) => export_matrix(&args),
        Command::Baseline(args) => baseline(&args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path)?))
}

fn mine(args: &MineArgs) -> Result<()> {
    let measure: Measure = args.measure.parse()?;
    let config = SearchConfig {
        measure,
        direction: match args.direction {
            DirectionArg::Max => Direction::Maximize,
            DirectionArg::Min => Direction::Minimize,
        },
        beam_width: args.beam_width,
        depth: args.depth,
        min_support: args.min_support,
        top_q: args.top,
        bins: args.bins,
        binning: match args.binning {
            BinningArg::EqualWidth => Binning::EqualWidth,
            BinningArg::EqualFrequency => Binning::EqualFrequency,
        },
        positive: args.positive.clone(),
        parallel: !args.sequential,
    };
    config.validate()?;
    let notation = if args.ascii { Notation::Ascii } else { Notation::Unicode };

    let (ds, matrix) = args.inputs.load()?;
    let started = Instant::now();
    let results = beam_search(&ds, &matrix, &config)?;
    let duration = started.elapsed();
    let fingerprint = Fingerprint::new(
        &ds,
        &matrix,
        &[
            ("data", &args.inputs.data),
            ("schema", &args.inputs.schema),
            ("predictions", &args.inputs.predictions),
        ],
    )?;
    let report = RunReport {
        config,
        baseline: results.baseline,
        results,
        duration,
        fingerprint,
    };

    let table = render_table(&report.results, &ds, notation);
    let rendered = match args.format {
        Format::Table => table.clone().into_bytes(),
        Format::Csv => {
            let mut buf = Vec::new();
            write_csv(&report.results, &ds, notation, &mut buf)?;
            buf
        }
        Format::Json => to_json(&report, &ds, notation)?.into_bytes(),
    };
    let stdout = io::stdout();
    let mut stdout = stdout.lock();
    match &args.out {
        Some(path) => {
            let mut file = create(path)?;
            file.write_all(&rendered)?;
            file.flush()?;
            stdout.write_all(table.as_bytes())?;
        }
        None => stdout.write_all(&rendered)?,
    }
    eprintln!(
        "searched {} cases x {} descriptors in {:.3}s",
        report.fingerprint.cases,
        report.fingerprint.descriptors,
        report.duration.as_secs_f64()
    );
    Ok(())
}

fn export_matrix(args: &ExportArgs) -> Result<()> {
    let (ds, matrix) = args.inputs.load()?;
    let members = match args.description.as_deref().map(str::trim) {
        Some(text) if !text.is_empty() => Some(Description::parse(text, &ds)?.evaluate(&ds)),
        _ => None,
    };
    let order = prediction_order(&matrix);
    let stem = args.out.to_string_lossy().into_owned();
    let image = PathBuf::from(format!("{stem}.ppm"));
    let table = PathBuf::from(format!("{stem}.csv"));
    write_ppm(&matrix, ds.truth(), &order, members.as_ref(), create(&image)?)?;
    write_ordering_csv(&ds, &matrix, &order, members.as_ref(), create(&table)?)?;
    let highlighted = members.map(|m| m.count()).unwrap_or(0);
    println!(
        "wrote {} and {} ({} rows, {} highlighted)",
        image.display(),
        table.display(),
        matrix.m(),
        highlighted
    );
    Ok(())
}

fn baseline(args: &BaselineArgs) -> Result<()> {
    let explicit = args.measure.trim() != "all";
    let measures: Vec<Measure> = if explicit {
        args.measure
            .split(',')
            .map(|t| t.trim().parse())
            .collect::<Result<_>>()?
    } else {
        Measure::ALL.to_vec()
    };
    let (ds, matrix) = args.inputs.load()?;
    let mut out = io::stdout().lock();
    for measure in measures {
        match measure_baseline(measure, &ds, &matrix, args.positive.as_deref()) {
            Ok(value) => writeln!(out, "{}", caption(measure, value))?,
            Err(e @ (Error::MissingGroundTruth | Error::BinaryOnly { .. })) if !explicit => {
                writeln!(out, "{}(DS)=n/a ({e})", measure.token())?
            }
            Err(e) => return Err(e),
        }
    }
    Ok(())
}
