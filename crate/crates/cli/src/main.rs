//! Command-line front end: one subcommand per pipeline stage, plus `run` for all of them.

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use sciomap::cocite::{Counting, Level};
use sciomap::netalgo::{Minkowski, PathLength};
use sciomap::pipeline::{run_pipeline, run_single_stage, Manifest, PipelineConfig, RunStatus, Stage};

#[derive(Parser)]
#[command(name = "sciomap", version, about = "Science maps from Wikipedia citations of journal articles")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    overrides: Overrides,
}

#[derive(Subcommand, Clone, Copy)]
enum Command {
    /// Parse the mention export and the journal source list
    Ingest,
    /// Fill missing ISSNs from lookup fixtures, the cache, or the wiki API
    Enrich,
    /// Attach journals and specialties to mentions
    Link,
    /// Keep one citation per entry and article
    Dedupe,
    /// Apply the discipline and year-window rules
    Filter,
    /// Corpus counts and language shares
    Summary,
    /// Build journal and specialty co-citation graphs
    Cocite,
    /// Threshold, drop isolates, normalize, and keep the main component
    Prune,
    /// Pathfinder scaling of the pruned networks
    Pathfinder,
    /// Degree and betweenness of each PFNET
    Centrality,
    /// Louvain communities of each PFNET
    Cluster,
    /// Descriptive tables as CSV
    Tables,
    /// Annual citation chart as SVG
    Plot,
    /// Pajek, GEXF, and Graphviz files of each PFNET
    Export,
    /// Every stage in order
    Run,
}

impl Command {
    fn stage(self) -> Option<Stage> {
        Some(match self {
            Command::Ingest => Stage::Ingest,
            Command::Enrich => Stage::Enrich,
            Command::Link => Stage::Link,
            Command::Dedupe => Stage::Dedupe,
            Command::Filter => Stage::Filter,
            Command::Summary => Stage::Summary,
            Command::Cocite => Stage::Cocite,
            Command::Prune => Stage::Prune,
            Command::Pathfinder => Stage::Pathfinder,
            Command::Centrality => Stage::Centrality,
            Command::Cluster => Stage::Cluster,
            Command::Tables => Stage::Tables,
            Command::Plot => Stage::Plot,
            Command::Export => Stage::Export,
            Command::Run => return None,
        })
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum CountingArg {
    Entries,
    Pairs,
}

#[derive(Clone, Copy, ValueEnum)]
enum LevelArg {
    Journal,
    Specialty,
    Both,
}

/// Settings that replace the config file's values when given.
#[derive(Args)]
struct Overrides {
    /// Pipeline config file (TOML)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Output directory
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Smallest co-citation count kept [config default: 6]
    #[arg(long, global = true, value_name = "N")]
    min_weight: Option<f64>,
    /// Inclusive year window [config default: 2007:2017]
    #[arg(long, global = true, value_name = "Y1:Y2", value_parser = parse_window)]
    window: Option<(i32, i32)>,
    #[arg(long, global = true, value_enum)]
    counting: Option<CountingArg>,
    #[arg(long, global = true, value_enum)]
    level: Option<LevelArg>,
    /// Minkowski parameter: a number >= 1 or `inf`
    #[arg(long, global = true, value_name = "inf|NUMBER")]
    r: Option<Minkowski>,
    /// Longest competing path in edges: a count or `max`
    #[arg(long, global = true, value_name = "N|max")]
    q: Option<PathLength>,
    /// Seed for community detection
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Rows in the journal ranking [config default: 25]
    #[arg(long, global = true, value_name = "N")]
    top_k: Option<usize>,
    /// Never contact the lookup endpoint
    #[arg(long, global = true)]
    offline: bool,
    /// Worker threads; results do not depend on it
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,
}

fn parse_window(s: &str) -> Result<(i32, i32), String> {
    let (lo, hi) = s.split_once(':').ok_or("expected Y1:Y2")?;
    let year = |y: &str| y.trim().parse::<i32>().map_err(|_| format!("bad year {y:?}"));
    Ok((year(lo)?, year(hi)?))
}

impl Overrides {
    fn apply(&self, config: &mut PipelineConfig) {
        let rules = &mut config.rules;
        if let Some(out) = &self.out {
            config.output_dir = out.clone();
        }
        if let Some(w) = self.min_weight {
            rules.min_weight = w;
        }
        if let Some(window) = self.window {
            rules.year_window = Some(window);
        }
        if let Some(c) = self.counting {
            rules.counting = match c {
                CountingArg::Entries => Counting::Entries,
                CountingArg::Pairs => Counting::Pairs,
            };
        }
        if let Some(l) = self.level {
            rules.levels = match l {
                LevelArg::Journal => vec![Level::Journal],
                LevelArg::Specialty => vec![Level::Specialty],
                LevelArg::Both => vec![Level::Journal, Level::Specialty],
            };
        }
        if let Some(r) = self.r {
            rules.pathfinder_r = r;
        }
        if let Some(q) = self.q {
            rules.pathfinder_q = q;
        }
        if let Some(seed) = self.seed {
            rules.seed = seed;
        }
        if let Some(k) = self.top_k {
            rules.top_k = k;
        }
        if self.offline {
            config.offline = true;
        }
        if self.jobs.is_some() {
            config.jobs = self.jobs;
        }
    }
}

fn load_config(overrides: &Overrides) -> Result<PipelineConfig> {
    let Some(path) = &overrides.config else {
        bail!("--config is required");
    };
    let mut config = PipelineConfig::load(path).with_context(|| format!("loading {}", path.display()))?;
    if let Some(cache) = std::env::var_os("SCIOMAP_CACHE") {
        config.inputs.cache = Some(PathBuf::from(cache));
    }
    overrides.apply(&mut config);
    Ok(config)
}

fn report(manifest: &Manifest, config: &PipelineConfig) {
    let status = match manifest.status {
        RunStatus::Complete => "complete",
        RunStatus::Partial => "partial",
        RunStatus::Failed => "failed",
    };
    println!(
        "{status}: {} files, manifest at {}",
        manifest.outputs.len(),
        config.output_dir.join(sciomap::pipeline::MANIFEST_NAME).display()
    );
}

fn run(cli: Cli) -> Result<()> {
    let config = load_config(&cli.overrides)?;
    let manifest = match cli.command.stage() {
        Some(stage) => {
            let manifest = run_single_stage(&config, stage)?;
            if stage == Stage::Summary {
                let path = config.output_dir.join(stage.dir_name()).join("summary.json");
                print!("{}", std::fs::read_to_string(path)?);
            }
            manifest
        }
        None => run_pipeline(&config)?,
    };
    report(&manifest, &config);
    Ok(())
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
