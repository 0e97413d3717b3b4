//! The end-to-end run, split into stages that communicate only through files.
//!
//! Stage `NN-name` writes into `<output_dir>/stage-NN-name/` and reads what earlier stages
//! wrote there, so running the stages one by one gives the same files as a full run.

mod config;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

pub use config::{InputPaths, PipelineConfig, Rules};

use crate::catalog::{build_journal_index, JournalIndex, JournalRecord, LabelVocabulary};
use crate::cocite::{
    build_cocitation_graph, components, drop_isolates, label_journals, largest_component,
    normalize_weights, prune_threshold, Level, WeightedGraph,
};
use crate::corpus::{
    dedupe_citations, filter_corpus, link_mentions, read_corpus_tsv, summarize_corpus,
    write_corpus_tsv, CitationRecord, FilterRules, LinkReport,
};
use crate::export::{self, GraphDocument};
use crate::ingest::{
    enrich_with_cache, parse_altmetric_export, parse_scopus_source_list, read_mentions,
    read_sources, write_mentions, write_sources, FixtureLookup, IssnCache, IssnLookup,
    MediaWikiLookup, RawMention,
};
use crate::netalgo::{
    louvain_communities, pathfinder, to_distance, CentralityReport, CommunityPartition,
    DistanceGraph,
};
use crate::stats;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error("config: {0}")]
    Config(String),
    #[error("stage {stage}: {message}")]
    Stage { stage: Stage, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Ingest,
    Enrich,
    Link,
    Dedupe,
    Filter,
    Summary,
    Cocite,
    Prune,
    Pathfinder,
    Centrality,
    Cluster,
    Tables,
    Plot,
    Export,
}

impl Stage {
    pub const ALL: [Stage; 14] = [
        Stage::Ingest,
        Stage::Enrich,
        Stage::Link,
        Stage::Dedupe,
        Stage::Filter,
        Stage::Summary,
        Stage::Cocite,
        Stage::Prune,
        Stage::Pathfinder,
        Stage::Centrality,
        Stage::Cluster,
        Stage::Tables,
        Stage::Plot,
        Stage::Export,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Enrich => "enrich",
            Stage::Link => "link",
            Stage::Dedupe => "dedupe",
            Stage::Filter => "filter",
            Stage::Summary => "summary",
            Stage::Cocite => "cocite",
            Stage::Prune => "prune",
            Stage::Pathfinder => "pathfinder",
            Stage::Centrality => "centrality",
            Stage::Cluster => "cluster",
            Stage::Tables => "tables",
            Stage::Plot => "plot",
            Stage::Export => "export",
        }
    }

    pub fn number(self) -> usize {
        Stage::ALL.iter().position(|&s| s == self).expect("listed") + 1
    }

    /// Directory name under the output directory, e.g. `stage-03-link`.
    pub fn dir_name(self) -> String {
        format!("stage-{:02}-{}", self.number(), self.name())
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL.into_iter().find(|st| st.name() == s).ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

fn level_name(level: Level) -> &'static str {
    match level {
        Level::Journal => "journal",
        Level::Specialty => "specialty",
    }
}

/// Where a run reads and writes.
struct Context<'a> {
    config: &'a PipelineConfig,
    stage: Stage,
}

impl Context<'_> {
    fn fail(&self, message: impl fmt::Display) -> PipelineError {
        PipelineError::Stage { stage: self.stage, message: message.to_string() }
    }

    fn dir(&self, stage: Stage) -> PathBuf {
        self.config.output_dir.join(stage.dir_name())
    }

    /// A file of an earlier stage, which must exist.
    fn input(&self, stage: Stage, name: &str) -> Result<PathBuf, PipelineError> {
        let path = self.dir(stage).join(name);
        if path.is_file() {
            Ok(path)
        } else {
            Err(self.fail(format!("missing {}; run stage {stage} first", path.display())))
        }
    }

    fn output(&self, name: &str) -> PathBuf {
        self.dir(self.stage).join(name)
    }

    fn write_json<T: Serialize + ?Sized>(&self, name: &str, value: &T) -> Result<(), PipelineError> {
        let mut text = serde_json::to_string_pretty(value).map_err(|e| self.fail(e))?;
        text.push('\n');
        fs::write(self.output(name), text).map_err(|e| self.fail(e))
    }

    fn read_json<T: DeserializeOwned>(&self, stage: Stage, name: &str) -> Result<T, PipelineError> {
        let path = self.input(stage, name)?;
        let text = fs::read_to_string(&path).map_err(|e| self.fail(e))?;
        serde_json::from_str(&text).map_err(|e| self.fail(format!("{}: {e}", path.display())))
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>, PipelineError> {
        File::create(self.output(name)).map(BufWriter::new).map_err(|e| self.fail(e))
    }

    fn read_citations(&self, stage: Stage) -> Result<Vec<CitationRecord>, PipelineError> {
        let file = File::open(self.input(stage, "citations.tsv")?).map_err(|e| self.fail(e))?;
        read_corpus_tsv(BufReader::new(file)).map_err(|e| self.fail(e))
    }

    fn write_citations(&self, records: &[CitationRecord]) -> Result<(), PipelineError> {
        let mut out = self.create("citations.tsv")?;
        write_corpus_tsv(&mut out, records).map_err(|e| self.fail(e))?;
        out.flush().map_err(|e| self.fail(e))
    }

    fn read_mentions(&self, stage: Stage) -> Result<Vec<RawMention>, PipelineError> {
        let file = File::open(self.input(stage, "mentions.csv")?).map_err(|e| self.fail(e))?;
        let (mentions, report) = read_mentions(BufReader::new(file)).map_err(|e| self.fail(e))?;
        if report.skipped > 0 {
            return Err(self.fail(format!("{} damaged rows in intermediate mentions", report.skipped)));
        }
        Ok(mentions)
    }

    fn journals(&self) -> Result<Vec<JournalRecord>, PipelineError> {
        let file = File::open(self.input(Stage::Ingest, "sources.csv")?).map_err(|e| self.fail(e))?;
        let (journals, _) = read_sources(BufReader::new(file)).map_err(|e| self.fail(e))?;
        Ok(journals)
    }

    fn index(&self) -> Result<JournalIndex, PipelineError> {
        Ok(build_journal_index(&self.journals()?).0)
    }

    fn vocabulary(&self) -> Result<LabelVocabulary, PipelineError> {
        LabelVocabulary::load(&self.config.inputs.labels).map_err(|e| self.fail(e))
    }

    fn levels(&self) -> impl Iterator<Item = (Level, &'static str)> + '_ {
        self.config.rules.levels.iter().map(|&l| (l, level_name(l)))
    }

    fn read_graph(&self, stage: Stage, name: &str) -> Result<WeightedGraph, PipelineError> {
        self.read_json(stage, name)
    }
}

/// The PFNET with similarity weights: network edges that survived scaling.
fn pfnet_similarity(network: &WeightedGraph, pfnet: &WeightedGraph) -> WeightedGraph {
    let mut out = network.clone();
    out.retain_edges(|a, b, _| pfnet.weight(a, b).is_some());
    out
}

#[derive(Serialize)]
struct IngestReport {
    mentions: crate::ingest::ParseReport,
    sources: crate::ingest::ParseReport,
}

#[derive(Serialize, Deserialize)]
struct LinkAudit {
    link: LinkReport,
    index_conflicts: usize,
}

#[derive(Serialize)]
struct GraphCounts {
    nodes: usize,
    edges: usize,
}

impl From<&WeightedGraph> for GraphCounts {
    fn from(g: &WeightedGraph) -> Self {
        GraphCounts { nodes: g.node_count(), edges: g.edge_count() }
    }
}

#[derive(Serialize)]
struct PruneReport {
    cocitation: GraphCounts,
    pruned: GraphCounts,
    without_isolates: GraphCounts,
    main_component: GraphCounts,
    components: usize,
}

fn run_ingest(cx: &Context) -> Result<(), PipelineError> {
    let inputs = &cx.config.inputs;
    let (mentions, mention_report) = parse_altmetric_export(&inputs.mentions).map_err(|e| cx.fail(e))?;
    let (journals, source_report) = parse_scopus_source_list(&inputs.sources).map_err(|e| cx.fail(e))?;
    let mut out = cx.create("mentions.csv")?;
    write_mentions(&mut out, &mentions).map_err(|e| cx.fail(e))?;
    out.flush().map_err(|e| cx.fail(e))?;
    let mut out = cx.create("sources.csv")?;
    write_sources(&mut out, &journals).map_err(|e| cx.fail(e))?;
    out.flush().map_err(|e| cx.fail(e))?;
    cx.write_json("ingest_report.json", &IngestReport { mentions: mention_report, sources: source_report })
}

fn run_enrich(cx: &Context) -> Result<(), PipelineError> {
    let mentions = cx.read_mentions(Stage::Ingest)?;
    let inputs = &cx.config.inputs;
    let client: Option<Box<dyn IssnLookup>> = match (&inputs.lookup_fixtures, &inputs.lookup_endpoint) {
        (Some(dir), _) => Some(Box::new(FixtureLookup::load(dir).map_err(|e| cx.fail(e))?)),
        (None, Some(endpoint)) if !cx.config.offline => Some(Box::new(MediaWikiLookup::new(endpoint.clone()))),
        _ => None,
    };
    let mut cache = match &inputs.cache {
        Some(path) => IssnCache::open(path).map_err(|e| cx.fail(e))?,
        None => IssnCache::in_memory(),
    };
    let (mentions, report) = enrich_with_cache(mentions, client.as_deref(), &mut cache);
    cache.save().map_err(|e| cx.fail(e))?;
    let mut out = cx.create("mentions.csv")?;
    write_mentions(&mut out, &mentions).map_err(|e| cx.fail(e))?;
    out.flush().map_err(|e| cx.fail(e))?;
    cx.write_json("enrich_report.json", &report)
}

fn run_link(cx: &Context) -> Result<(), PipelineError> {
    let mentions = cx.read_mentions(Stage::Enrich)?;
    let (index, conflicts) = build_journal_index(&cx.journals()?);
    let vocabulary = cx.vocabulary()?;
    let (records, report) = link_mentions(&mentions, &index, &vocabulary, cx.config.rules.date_source);
    cx.write_citations(&records)?;
    cx.write_json("link_report.json", &LinkAudit { link: report, index_conflicts: conflicts.len() })
}

fn run_dedupe(cx: &Context) -> Result<(), PipelineError> {
    let (records, report) = dedupe_citations(cx.read_citations(Stage::Link)?);
    cx.write_citations(&records)?;
    cx.write_json("dedup_report.json", &report)
}

fn run_filter(cx: &Context) -> Result<(), PipelineError> {
    let rules = &cx.config.rules;
    let discipline_labels = match &rules.discipline {
        Some(d) => {
            let labels = cx.vocabulary()?.discipline_labels(d);
            if labels.is_empty() {
                return Err(cx.fail(format!("discipline {d:?} has no labels in the vocabulary")));
            }
            Some(labels)
        }
        None => None,
    };
    let filter = FilterRules { discipline_labels, year_window: rules.year_window };
    let (records, report) = filter_corpus(cx.read_citations(Stage::Dedupe)?, &filter);
    let audit: LinkAudit = cx.read_json(Stage::Link, "link_report.json")?;
    cx.write_citations(&records)?;
    cx.write_json("filter_report.json", &report.with_link_audit(&audit.link))
}

fn run_summary(cx: &Context) -> Result<(), PipelineError> {
    cx.write_json("summary.json", &summarize_corpus(&cx.read_citations(Stage::Filter)?))
}

fn run_cocite(cx: &Context) -> Result<(), PipelineError> {
    let records = cx.read_citations(Stage::Filter)?;
    let index = cx.index()?;
    for (level, name) in cx.levels() {
        let mut g = build_cocitation_graph(&records, level, cx.config.rules.counting);
        if level == Level::Journal {
            label_journals(&mut g, &index);
        }
        cx.write_json(&format!("{name}_cocitation.json"), &g)?;
    }
    Ok(())
}

fn run_prune(cx: &Context) -> Result<(), PipelineError> {
    for (level, name) in cx.levels() {
        let g = cx.read_graph(Stage::Cocite, &format!("{name}_cocitation.json"))?;
        let pruned = prune_threshold(&g, cx.config.rules.min_weight);
        let connected = drop_isolates(&pruned);
        let network = largest_component(&normalize_weights(&connected));
        cx.write_json(&format!("{name}_network.json"), &network)?;
        let report = PruneReport {
            cocitation: (&g).into(),
            pruned: (&pruned).into(),
            without_isolates: (&connected).into(),
            main_component: (&network).into(),
            components: components(&connected).sizes.len(),
        };
        cx.write_json(&format!("{name}_prune_report.json"), &report)?;
        if level == Level::Journal {
            // The journal network before thresholding, for comparison with other maps.
            cx.write_json("journal_main_component.json", &largest_component(&drop_isolates(&g)))?;
        }
    }
    Ok(())
}

fn run_pathfinder(cx: &Context) -> Result<(), PipelineError> {
    for (_, name) in cx.levels() {
        let network = cx.read_graph(Stage::Prune, &format!("{name}_network.json"))?;
        let distances = to_distance(&network).map_err(|e| cx.fail(e))?;
        let pfnet = pathfinder(&distances, cx.config.rules.pathfinder_params()).map_err(|e| cx.fail(e))?;
        cx.write_json(&format!("{name}_pfnet.json"), &pfnet)?;
    }
    Ok(())
}

/// The PFNET of `name` with distance and similarity weights.
fn load_pfnet(cx: &Context, name: &str) -> Result<(WeightedGraph, WeightedGraph), PipelineError> {
    let network = cx.read_graph(Stage::Prune, &format!("{name}_network.json"))?;
    let pfnet: DistanceGraph = cx.read_json(Stage::Pathfinder, &format!("{name}_pfnet.json"))?;
    let similarity = pfnet_similarity(&network, pfnet.graph());
    Ok((pfnet.into_graph(), similarity))
}

fn run_centrality(cx: &Context) -> Result<(), PipelineError> {
    for (_, name) in cx.levels() {
        let (distances, similarity) = load_pfnet(cx, name)?;
        let report = CentralityReport::compute(&similarity, Some(&distances));
        cx.write_json(&format!("{name}_centrality.json"), &report)?;
    }
    Ok(())
}

fn run_cluster(cx: &Context) -> Result<(), PipelineError> {
    let rules = &cx.config.rules;
    for (_, name) in cx.levels() {
        let (_, similarity) = load_pfnet(cx, name)?;
        // An empty network has no communities to find.
        let partition = if similarity.is_empty() {
            CommunityPartition::default()
        } else {
            louvain_communities(&similarity, rules.resolution, rules.seed).map_err(|e| cx.fail(e))?
        };
        cx.write_json(&format!("{name}_communities.json"), &partition)?;
    }
    Ok(())
}

fn run_tables(cx: &Context) -> Result<(), PipelineError> {
    let records = cx.read_citations(Stage::Filter)?;
    let index = cx.index()?;
    let vocabulary = cx.vocabulary()?;
    let distributions = stats::distribution_tables(&records).map_err(|e| cx.fail(e))?;
    export::write_distribution_csv(&distributions, &cx.output("table1_distributions.csv")).map_err(|e| cx.fail(e))?;
    let specialties = stats::specialty_table(&records);
    export::write_table_csv(&specialties, &cx.output("table2_specialties.csv")).map_err(|e| cx.fail(e))?;
    let journals = stats::journal_ranking(&records, &index, cx.config.rules.top_k);
    export::write_table_csv(&journals, &cx.output("table3_journals.csv")).map_err(|e| cx.fail(e))?;
    let aggregates = stats::scopus_aggregates(&index, &vocabulary);
    let coverage = stats::coverage_table(&records, &aggregates).map_err(|e| cx.fail(e))?;
    export::write_table_csv(&coverage, &cx.output("table4_coverage.csv")).map_err(|e| cx.fail(e))?;
    export::write_table_csv(&stats::annual_series(&records), &cx.output("annual_series.csv")).map_err(|e| cx.fail(e))
}

fn run_plot(cx: &Context) -> Result<(), PipelineError> {
    let series = stats::annual_series(&cx.read_citations(Stage::Filter)?);
    export::render_annual_svg(&series, &cx.output("annual_series.svg")).map_err(|e| cx.fail(e))
}

fn write_graph_formats(cx: &Context, doc: &GraphDocument, stem: &str) -> Result<(), PipelineError> {
    export::write_pajek(doc, &cx.output(&format!("{stem}.net"))).map_err(|e| cx.fail(e))?;
    export::write_gexf(doc, &cx.output(&format!("{stem}.gexf"))).map_err(|e| cx.fail(e))?;
    export::write_dot(doc, &cx.output(&format!("{stem}.dot"))).map_err(|e| cx.fail(e))
}

fn run_export(cx: &Context) -> Result<(), PipelineError> {
    for (level, name) in cx.levels() {
        let (_, similarity) = load_pfnet(cx, name)?;
        let centrality: CentralityReport = cx.read_json(Stage::Centrality, &format!("{name}_centrality.json"))?;
        let communities: CommunityPartition = cx.read_json(Stage::Cluster, &format!("{name}_communities.json"))?;
        let doc = GraphDocument::new(similarity).with_centrality(&centrality).with_communities(&communities);
        write_graph_formats(cx, &doc, &format!("{name}_pfnet"))?;
        if level == Level::Journal {
            let main = cx.read_graph(Stage::Prune, "journal_main_component.json")?;
            write_graph_formats(cx, &GraphDocument::new(main), "journal_main_component")?;
        }
    }
    Ok(())
}

/// Runs one stage, replacing its directory. Earlier stages' files must be present.
pub fn run_stage(config: &PipelineConfig, stage: Stage) -> Result<(), PipelineError> {
    let cx = Context { config, stage };
    let dir = cx.dir(stage);
    if dir.exists() {
        fs::remove_dir_all(&dir).map_err(|e| cx.fail(e))?;
    }
    fs::create_dir_all(&dir).map_err(|e| cx.fail(e))?;
    match stage {
        Stage::Ingest => run_ingest(&cx),
        Stage::Enrich => run_enrich(&cx),
        Stage::Link => run_link(&cx),
        Stage::Dedupe => run_dedupe(&cx),
        Stage::Filter => run_filter(&cx),
        Stage::Summary => run_summary(&cx),
        Stage::Cocite => run_cocite(&cx),
        Stage::Prune => run_prune(&cx),
        Stage::Pathfinder => run_pathfinder(&cx),
        Stage::Centrality => run_centrality(&cx),
        Stage::Cluster => run_cluster(&cx),
        Stage::Tables => run_tables(&cx),
        Stage::Plot => run_plot(&cx),
        Stage::Export => run_export(&cx),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RunStatus {
    Complete,
    Partial,
    Failed,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ManifestEntry {
    /// Relative to the output directory, with `/` separators.
    pub path: String,
    pub sha256: String,
    pub bytes: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub status: RunStatus,
    pub failed_stage: Option<Stage>,
    pub rules: Rules,
    /// Digest of each input file by role.
    pub inputs: BTreeMap<String, String>,
    pub outputs: Vec<ManifestEntry>,
}

pub const MANIFEST_NAME: &str = "manifest.json";

fn sha256_file(path: &Path) -> std::io::Result<(String, u64)> {
    let bytes = fs::read(path)?;
    Ok((hex::encode(Sha256::digest(&bytes)), bytes.len() as u64))
}

fn stage_files(dir: &Path, prefix: &str, out: &mut Vec<(String, PathBuf)>) -> std::io::Result<()> {
    let mut entries: Vec<_> = fs::read_dir(dir)?.collect::<Result<_, _>>()?;
    entries.sort_by_key(|e| e.file_name());
    for entry in entries {
        let name = format!("{prefix}/{}", entry.file_name().to_string_lossy());
        if entry.file_type()?.is_dir() {
            stage_files(&entry.path(), &name, out)?;
        } else {
            out.push((name, entry.path()));
        }
    }
    Ok(())
}

/// Digests every file under the stage directories and writes `manifest.json`.
///
/// The manifest holds no paths outside the output directory, no times, and nothing about
/// thread counts, so equal inputs and rules give an identical manifest.
pub fn write_manifest(config: &PipelineConfig, failed: Option<Stage>) -> Result<Manifest, PipelineError> {
    let io = |e: std::io::Error| PipelineError::Config(format!("manifest: {e}"));
    let mut inputs = BTreeMap::new();
    for (role, path) in [
        ("mentions", &config.inputs.mentions),
        ("sources", &config.inputs.sources),
        ("labels", &config.inputs.labels),
    ] {
        inputs.insert(role.to_string(), sha256_file(path).map_err(io)?.0);
    }
    let mut files = Vec::new();
    let mut present = 0;
    for stage in Stage::ALL {
        let dir = config.output_dir.join(stage.dir_name());
        if dir.is_dir() {
            present += 1;
            stage_files(&dir, &stage.dir_name(), &mut files).map_err(io)?;
        }
    }
    let mut outputs = Vec::with_capacity(files.len());
    for (path, full) in files {
        let (sha256, bytes) = sha256_file(&full).map_err(io)?;
        outputs.push(ManifestEntry { path, sha256, bytes });
    }
    let status = match failed {
        Some(_) => RunStatus::Failed,
        None if present == Stage::ALL.len() => RunStatus::Complete,
        None => RunStatus::Partial,
    };
    let manifest = Manifest { status, failed_stage: failed, rules: config.rules.clone(), inputs, outputs };
    let mut text = serde_json::to_string_pretty(&manifest).map_err(|e| PipelineError::Config(e.to_string()))?;
    text.push('\n');
    fs::create_dir_all(&config.output_dir).map_err(io)?;
    fs::write(config.output_dir.join(MANIFEST_NAME), text).map_err(io)?;
    Ok(manifest)
}

/// Runs `f` on a pool of `jobs` threads, or on the global pool when `jobs` is unset.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> Result<T, PipelineError> {
    match jobs {
        None => Ok(f()),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| PipelineError::Config(format!("thread pool: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

/// Runs a single stage and refreshes the manifest, marking the stage on failure.
pub fn run_single_stage(config: &PipelineConfig, stage: Stage) -> Result<Manifest, PipelineError> {
    config.validate()?;
    with_jobs(config.jobs, || match run_stage(config, stage) {
        Ok(()) => write_manifest(config, None),
        Err(e) => {
            write_manifest(config, Some(stage))?;
            Err(e)
        }
    })?
}

/// Every stage in order. Stops at the first failing stage, keeping what was written so far.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Manifest, PipelineError> {
    config.validate()?;
    with_jobs(config.jobs, || {
        for stage in Stage::ALL {
            if let Err(e) = run_stage(config, stage) {
                write_manifest(config, Some(stage))?;
                return Err(e);
            }
        }
        write_manifest(config, None)
    })?
}
