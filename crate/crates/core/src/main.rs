use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use segcomplex::ablation::{parse_ops, AblationSpec, TextureBank};
use segcomplex::dataset::{CropMode, PrepareConfig, DEFAULT_AREA_FRACTION};
use segcomplex::factors::{FactorSelection, DEFAULT_HUNGARIAN_BUDGET};
use segcomplex::metrics::{MetricSelection, DEFAULT_IOU_THRESHOLD};
use segcomplex::report::{cmd_ablate, cmd_analyze, cmd_evaluate, cmd_prepare, RunConfig, DEFAULT_BINS};
use segcomplex::{Error, Result};

#[derive(Parser)]
#[command(name = "segcomplex", version, about = "Measure, simplify and score multi-object segmentation datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Shared {
    /// Worker threads.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output file (analyze, evaluate) or directory (prepare, ablate).
    #[arg(long)]
    out: PathBuf,
}

#[derive(Subcommand)]
enum Command {
    /// Crop, resize and filter raw images/ + masks/ into train and test datasets.
    Prepare {
        raw: PathBuf,
        #[command(flatten)]
        shared: Shared,
        #[arg(long, default_value_t = 128)]
        size: usize,
        /// Centered crop WIDTHxHEIGHT before resizing; default is the largest square.
        #[arg(long)]
        crop: Option<String>,
        #[arg(long, default_value_t = 2)]
        min_objects: usize,
        #[arg(long, default_value_t = 6)]
        max_objects: usize,
        /// Drop scenes with objects outside the default area bounds.
        #[arg(long)]
        area_filter: bool,
        /// Only keep scenes whose background is a single colour.
        #[arg(long)]
        blank_background: bool,
        #[arg(long, default_value_t = 0.2)]
        test_ratio: f64,
    },
    /// Compute complexity factors and their distributions.
    Analyze {
        dataset: PathBuf,
        #[command(flatten)]
        shared: Shared,
        #[arg(long, default_value = "object,scene,background")]
        factors: String,
        #[arg(long, default_value_t = DEFAULT_BINS)]
        bins: usize,
        /// Also write per-sample values as CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_HUNGARIAN_BUDGET)]
        hungarian_budget: usize,
    },
    /// Write a simplified copy of a dataset.
    Ablate {
        dataset: PathBuf,
        #[command(flatten)]
        shared: Shared,
        /// Comma-separated subset of C,S,T,U,bgC,bgT,bgS.
        #[arg(long)]
        ops: String,
        /// Directory of PNG texture tiles; the built-in bank is used otherwise.
        #[arg(long)]
        textures: Option<PathBuf>,
    },
    /// Score predicted masks against a dataset.
    Evaluate {
        dataset: PathBuf,
        predictions: PathBuf,
        #[command(flatten)]
        shared: Shared,
        #[arg(long, default_value = "all")]
        metrics: String,
        #[arg(long, default_value_t = DEFAULT_IOU_THRESHOLD)]
        iou_thresh: f64,
    },
}

fn parse_crop(s: &str) -> Result<CropMode> {
    let bad = || Error::InvalidConfig(format!("crop {s:?} is not WIDTHxHEIGHT"));
    let (w, h) = s.split_once(['x', 'X']).ok_or_else(bad)?;
    Ok(CropMode::Fixed {
        width: w.trim().parse().map_err(|_| bad())?,
        height: h.trim().parse().map_err(|_| bad())?,
    })
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Prepare {
            raw,
            shared,
            size,
            crop,
            min_objects,
            max_objects,
            area_filter,
            blank_background,
            test_ratio,
        } => {
            let cfg = PrepareConfig {
                crop: crop.as_deref().map(parse_crop).transpose()?.unwrap_or(CropMode::CenterSquare),
                target_size: size,
                min_objects,
                max_objects,
                area_fraction: area_filter.then_some(DEFAULT_AREA_FRACTION),
                blank_background,
            };
            let s = cmd_prepare(&raw, &cfg, test_ratio, shared.seed, shared.jobs, &shared.out)?;
            let count = |m: &Option<segcomplex::dataset::DatasetManifest>| m.as_ref().map_or(0, |m| m.ids.len());
            eprintln!(
                "kept {} of {} scenes: {} train, {} test",
                s.kept,
                s.input,
                count(&s.train),
                count(&s.test)
            );
        }
        Command::Analyze {
            dataset,
            shared,
            factors,
            bins,
            csv,
            hungarian_budget,
        } => {
            let cfg = RunConfig {
                jobs: shared.jobs,
                seed: shared.seed,
                factors: FactorSelection::parse(&factors)?,
                bins,
                hungarian_budget,
            };
            cfg.validate()?;
            let report = cmd_analyze(&dataset, &cfg, &shared.out, csv.as_deref())?;
            let failed = report.scenes.iter().filter(|s| s.error.is_some()).count();
            eprintln!("analyzed {} scenes ({failed} unreadable)", report.scenes.len());
        }
        Command::Ablate {
            dataset,
            shared,
            ops,
            textures,
        } => {
            if shared.jobs == 0 {
                return Err(Error::InvalidConfig("jobs must be at least 1".into()));
            }
            let ops = parse_ops(&ops)?;
            let bank = match textures {
                Some(dir) => TextureBank::load_dir(&dir)?,
                None => TextureBank::procedural(),
            };
            let spec = AblationSpec::new(ops, shared.seed, Some(bank))?;
            let m = cmd_ablate(&dataset, &spec, &shared.out, shared.jobs)?;
            eprintln!("wrote {} scenes with {}", m.ids.len(), spec.label());
        }
        Command::Evaluate {
            dataset,
            predictions,
            shared,
            metrics,
            iou_thresh,
        } => {
            if shared.jobs == 0 {
                return Err(Error::InvalidConfig("jobs must be at least 1".into()));
            }
            let sel = MetricSelection::parse(&metrics)?;
            let r = cmd_evaluate(&dataset, &predictions, sel, iou_thresh, shared.jobs, &shared.out)?;
            eprintln!("evaluated {} scenes", r.scenes.len());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() { 2 } else { 1 })
        }
    }
}
