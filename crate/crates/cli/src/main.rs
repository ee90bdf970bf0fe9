//! `tableqna`: every pipeline stage as a subcommand.

mod commands;
mod config;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tableqna::{Error, Result};

use crate::config::{PipelineConfig, CONFIG_FILE_NAME};

#[derive(Parser)]
#[command(name = "tableqna", version, about = "List and superlative query tagging and web-table answers")]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct GlobalArgs {
    /// Config file of key=value lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Fixture root holding a tableqna.conf, or a corpus directory.
    #[arg(long, global = true)]
    corpus: Option<PathBuf>,
    /// Override any config key.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    rho: Option<f64>,
    #[arg(long, global = true)]
    theta: Option<f64>,
    #[arg(long, global = true)]
    k: Option<usize>,
    #[arg(long, global = true)]
    m: Option<usize>,
    #[arg(long, global = true)]
    n: Option<usize>,
    /// Tagger: tdl, tdl-er, tdl-er-dp or dnn.
    #[arg(long, global = true)]
    mode: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Tag a query with its sought entity type.
    Tag {
        #[arg(long)]
        query: String,
        /// Wrap the output with the rejection reason.
        #[arg(long)]
        explain: bool,
    },
    /// Label a query log with the dictionary tagger.
    GenTrain {
        #[arg(long)]
        log: Option<PathBuf>,
    },
    /// Train the neural tagger on token/tag sequences.
    TrainTagger {
        #[arg(long)]
        train: PathBuf,
    },
    /// Tagging precision and coverage on a gold file.
    EvalTagger {
        #[arg(long)]
        gold: PathBuf,
    },
    /// Extract relational tables as JSON lines.
    Extract {
        /// A single page instead of the corpus.
        #[arg(long)]
        html: Option<PathBuf>,
        #[arg(long, default_value = "")]
        url: String,
        #[arg(long, default_value = "")]
        title: String,
        /// Also write the idf table of the extracted tables.
        #[arg(long)]
        idf_out: Option<PathBuf>,
    },
    /// Feature records for a query's candidates or for labelled pairs.
    Featurize {
        #[arg(long)]
        query: Option<String>,
        #[arg(long)]
        labels: Option<PathBuf>,
        /// Table dump to use instead of the corpus.
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Train the boosted-tree selector on labelled feature records.
    TrainSelector {
        #[arg(long)]
        features: PathBuf,
    },
    /// Answer a query with a table reference, or null.
    Answer {
        #[arg(long)]
        query: String,
    },
    /// Display snippet of a table for a query.
    Snippet {
        #[arg(long)]
        query: String,
        #[arg(long)]
        table: String,
        #[arg(long)]
        tables: Option<PathBuf>,
    },
    /// Precision and recall of selection across thresholds.
    EvalSelector {
        #[arg(long)]
        labels: PathBuf,
        /// Comma-separated thresholds; 0.05 to 0.95 by default.
        #[arg(long, value_delimiter = ',')]
        thetas: Vec<f64>,
        #[arg(long)]
        csv: bool,
    },
    /// Information gain and φ of every feature.
    FeatureReport {
        #[arg(long)]
        features: PathBuf,
        #[arg(long)]
        json: bool,
    },
}

fn load_config(g: &GlobalArgs) -> Result<PipelineConfig> {
    let mut cfg = PipelineConfig::default();
    let file = match (&g.config, &g.corpus) {
        (Some(c), _) => Some(c.clone()),
        (None, Some(dir)) if dir.join(CONFIG_FILE_NAME).is_file() => Some(dir.join(CONFIG_FILE_NAME)),
        (None, Some(_)) => None,
        (None, None) => Some(PathBuf::from(CONFIG_FILE_NAME)).filter(|p| p.is_file()),
    };
    if let Some(f) = &file {
        cfg.apply_file(f)?;
    }
    let here = Path::new(".");
    if let Some(dir) = &g.corpus {
        if file.as_ref().is_none_or(|f| f.parent() != Some(dir.as_path())) {
            cfg.set("corpus", &dir.display().to_string(), here)?;
        }
    }
    let flags = [
        ("seed", g.seed.map(|v| v.to_string())),
        ("rho", g.rho.map(|v| v.to_string())),
        ("theta", g.theta.map(|v| v.to_string())),
        ("k", g.k.map(|v| v.to_string())),
        ("m", g.m.map(|v| v.to_string())),
        ("n", g.n.map(|v| v.to_string())),
        ("tagger_mode", g.mode.clone()),
    ];
    for (key, value) in flags {
        if let Some(v) = value {
            cfg.set(key, &v, here)?;
        }
    }
    for kv in &g.set {
        let (k, v) = kv
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
        cfg.set(k.trim(), v, here)?;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: Cli) -> Result<()> {
    let cfg = load_config(&cli.global)?;
    let output = match &cli.command {
        Command::Tag { query, explain } => commands::tag(&cfg, query, *explain)?,
        Command::GenTrain { log } => commands::gen_train(&cfg, log.as_deref())?,
        Command::TrainTagger { train } => commands::train_tagger(&cfg, train)?,
        Command::EvalTagger { gold } => commands::eval_tagger(&cfg, gold)?,
        Command::Extract { html, url, title, idf_out } => {
            let page = html.as_deref().map(|path| commands::HtmlPage {
                path,
                url: url.clone(),
                title: title.clone(),
            });
            commands::extract(&cfg, page, idf_out.as_deref())?
        }
        Command::Featurize { query, labels, tables } => commands::featurize_cmd(&cfg, query.as_deref(), labels.as_deref(), tables.as_deref())?,
        Command::TrainSelector { features } => commands::train_selector_cmd(&cfg, features)?,
        Command::Answer { query } => commands::answer(&cfg, query)?,
        Command::Snippet { query, table, tables } => commands::snippet(&cfg, query, table, tables.as_deref())?,
        Command::EvalSelector { labels, thetas, csv } => {
            let default: Vec<f64> = (1..20).map(|i| f64::from(i) / 20.0).collect();
            commands::eval_selector(&cfg, labels, if thetas.is_empty() { &default } else { thetas }, *csv)?
        }
        Command::FeatureReport { features, json } => commands::feature_report_cmd(features, *json)?,
    };
    match &cli.global.out {
        Some(p) => std::fs::write(p, output).map_err(|e| Error::Config(format!("cannot write {}: {e}", p.display()))),
        None => std::io::stdout()
            .write_all(output.as_bytes())
            .map_err(|e| Error::Config(format!("cannot write stdout: {e}"))),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("tableqna: {e}");
            ExitCode::from(if matches!(e, Error::Config(_)) { 2 } else { 1 })
        }
    }
}
