use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use gted_cli::pipeline::{self, Baseline, SweepMetric};
use gted_cli::{load_dataset, AlphaSetting, Config, ConfigError};
use gted_core::evalkit::{self, format_kappa, format_percent, MetricReport};
use gted_core::{parse_theorem, passes_threshold, score, tree_of, OperatorTree};

#[derive(Parser)]
#[command(
    name = "gted",
    version,
    about = "Score formal theorem statements with generalized tree edit distance"
)]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a statement and print its syntax tree as JSON.
    Parse { file: PathBuf },
    /// Print the operator tree of a standardized statement.
    Tree {
        file: PathBuf,
        #[arg(long)]
        oneline: bool,
    },
    /// Generalized tree edit distance between two statements.
    Distance { a: PathBuf, b: PathBuf },
    /// Similarity and accept/reject decision for two statements.
    Similarity {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_parser = parse_alpha)]
        alpha: Option<AlphaSetting>,
        #[arg(long)]
        theta: Option<f64>,
        #[arg(long)]
        no_dumb_ops: bool,
    },
    /// Score a dataset against its human verdicts.
    Evaluate {
        dataset: PathBuf,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Confusion matrix at each threshold of a grid, as CSV.
    Sweep {
        dataset: PathBuf,
        /// `start:end:step` or a comma-separated list.
        #[arg(long)]
        thetas: String,
        #[arg(long, value_enum, default_value_t = MetricArg::Gted)]
        metric: MetricArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Identity-match or BLEU baseline on a dataset.
    Baselines {
        dataset: PathBuf,
        #[arg(long, value_enum, default_value_t = BaselineArg::Identity)]
        metric: BaselineArg,
        /// BLEU acceptance threshold (defaults to the configured theta).
        #[arg(long)]
        theta: Option<f64>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum MetricArg {
    Gted,
    Bleu,
}

#[derive(Clone, Copy, ValueEnum)]
enum BaselineArg {
    Identity,
    Bleu,
}

fn parse_alpha(s: &str) -> Result<AlphaSetting, String> {
    s.parse()
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))
}

fn load_tree(path: &Path, config: &Config) -> Result<OperatorTree> {
    let text = read(path)?;
    tree_of(&text, &config.standardize).with_context(|| format!("{}: parse error", path.display()))
}

fn write_output(path: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match path {
        Some(p) => fs::write(p, bytes).with_context(|| format!("cannot write {}", p.display())),
        None => io::stdout()
            .write_all(bytes)
            .context("cannot write to stdout"),
    }
}

fn metrics_line(m: &MetricReport) -> String {
    format!(
        "precision={} recall={} accuracy={} kappa={}",
        format_percent(m.precision),
        format_percent(m.recall),
        format_percent(Some(m.accuracy)),
        format_kappa(m.kappa)
    )
}

fn fmt_distance(d: f64) -> String {
    if d.is_finite() {
        d.to_string()
    } else {
        "inf".into()
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = Config::load_or_default(cli.config.as_deref())?;
    match cli.command {
        Command::Parse { file } => {
            let stmt = parse_theorem(&read(&file)?)
                .with_context(|| format!("{}: parse error", file.display()))?;
            println!("{}", serde_json::to_string_pretty(&stmt)?);
        }
        Command::Tree { file, oneline } => {
            let tree = load_tree(&file, &config)?;
            if oneline {
                println!("{}", tree.to_oneline());
            } else {
                print!("{}", tree.to_indented());
            }
        }
        Command::Distance { a, b } => {
            let (ta, tb) = (load_tree(&a, &config)?, load_tree(&b, &config)?);
            let s = score(
                &ta,
                &tb,
                &config.transformations(),
                config.gted.clamp_negative,
            );
            println!("{}", fmt_distance(s.distance));
        }
        Command::Similarity {
            a,
            b,
            alpha,
            theta,
            no_dumb_ops,
        } => {
            if let Some(alpha) = alpha {
                config.gted.alpha = alpha;
            }
            if let Some(theta) = theta {
                config.gted.theta = theta;
            }
            if no_dumb_ops {
                config.gted.dumb_ops = false;
            }
            config.validate()?;
            let (ta, tb) = (load_tree(&a, &config)?, load_tree(&b, &config)?);
            let s = score(
                &ta,
                &tb,
                &config.transformations(),
                config.gted.clamp_negative,
            );
            let decision = passes_threshold(s.similarity, config.gted.theta);
            println!("distance\t{}", fmt_distance(s.distance));
            println!("sizes\t{}\t{}", s.size1, s.size2);
            match s.similarity {
                Some(v) => println!("similarity\t{v}"),
                None => println!("similarity\tundefined"),
            }
            println!("decision\t{}", if decision { "accept" } else { "reject" });
        }
        Command::Evaluate { dataset, out } => {
            let ds = load_dataset(&dataset)?;
            let report = pipeline::evaluate(&ds, &config)?;
            let json = serde_json::to_string_pretty(&report)? + "\n";
            let out = out.or_else(|| config.output.report.clone());
            write_output(out.as_deref(), json.as_bytes())?;
            if let Some(csv_path) = &config.output.csv {
                let point = evalkit::SweepPoint {
                    theta: config.gted.theta,
                    confusion: report.confusion,
                    report: report.metrics,
                };
                let mut buf = Vec::new();
                evalkit::write_sweep_csv(&[point], &mut buf)?;
                write_output(Some(csv_path), &buf)?;
            }
            eprintln!(
                "{} records, {} skipped, {} malformed lines; {}",
                report.records,
                report.skipped.len(),
                report.malformed_lines.len(),
                metrics_line(&report.metrics)
            );
        }
        Command::Sweep {
            dataset,
            thetas,
            metric,
            out,
        } => {
            let grid = evalkit::parse_theta_grid(&thetas)
                .map_err(|e| ConfigError::Invalid(e.to_string()))?;
            let ds = load_dataset(&dataset)?;
            let metric = match metric {
                MetricArg::Gted => SweepMetric::Gted,
                MetricArg::Bleu => SweepMetric::Bleu,
            };
            let points = pipeline::sweep_command(&ds, &config, metric, &grid)?;
            let mut buf = Vec::new();
            evalkit::write_sweep_csv(&points, &mut buf)?;
            let out = out.or_else(|| config.output.csv.clone());
            write_output(out.as_deref(), &buf)?;
        }
        Command::Baselines {
            dataset,
            metric,
            theta,
        } => {
            let theta = theta.unwrap_or(config.gted.theta);
            if !(0.0..=1.0).contains(&theta) {
                return Err(
                    ConfigError::Invalid(format!("threshold {theta} is outside [0, 1]")).into(),
                );
            }
            let ds = load_dataset(&dataset)?;
            let baseline = match metric {
                BaselineArg::Identity => Baseline::Identity,
                BaselineArg::Bleu => Baseline::Bleu,
            };
            let report = pipeline::baselines(&ds, baseline, theta)?;
            let cm = report.confusion;
            println!(
                "tp={} tn={} fp={} fn={} {}",
                cm.tp,
                cm.tn,
                cm.fp,
                cm.fn_,
                metrics_line(&report.metrics)
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            if err.downcast_ref::<ConfigError>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
