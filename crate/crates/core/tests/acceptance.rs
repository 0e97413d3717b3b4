//! End-to-end acceptance checks. Prints one line per criterion and fails if any fails.

mod oracles;

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::io::BufReader;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::sync::OnceLock;
use std::time::{Duration, Instant};

use chrono::{Datelike, NaiveDate};
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sciomap::catalog::normalize_issn;
use sciomap::cocite::{
    build_cocitation_graph, largest_component, normalize_weights, prune_threshold, Counting, Level, WeightedGraph,
};
use sciomap::corpus::{dedupe_citations, read_corpus_tsv, CitationRecord, EntryId};
use sciomap::export::{gexf_string, pajek_string, parse_gexf, parse_pajek, GraphDocument};
use sciomap::netalgo::{
    betweenness_centrality, modularity, pathfinder, pathfinder_mst, CentralityReport, DistanceGraph, Minkowski,
    PathLength, PathfinderParams,
};
use sciomap::pipeline::{run_pipeline, PipelineConfig};

use oracles::*;

const CASES: usize = 200;

fn fixtures() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn load_config(relative: &str, out: &Path) -> PipelineConfig {
    let mut config = PipelineConfig::load(&fixtures().join(relative)).unwrap();
    config.output_dir = out.to_path_buf();
    config
}

/// Full runs of both bundled configs, shared by several criteria.
struct Runs {
    _dir: tempfile::TempDir,
    small: PathBuf,
    shape: PathBuf,
}

fn runs() -> &'static Runs {
    static RUNS: OnceLock<Runs> = OnceLock::new();
    RUNS.get_or_init(|| {
        let dir = tempfile::tempdir().unwrap();
        let small = dir.path().join("small");
        let shape = dir.path().join("shape");
        run_pipeline(&load_config("small.toml", &small)).unwrap();
        run_pipeline(&load_config("shape/shape.toml", &shape)).unwrap();
        Runs { _dir: dir, small, shape }
    })
}

fn read_graph(path: &Path) -> WeightedGraph {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn citations(out: &Path) -> Vec<CitationRecord> {
    let file = fs::File::open(out.join("stage-05-filter/citations.tsv")).unwrap();
    read_corpus_tsv(BufReader::new(file)).unwrap()
}

fn random_corpus(rng: &mut ChaCha8Rng) -> Vec<CitationRecord> {
    let labels = ["History", "Philosophy", "Music", "Classics", "Museology", "Literature"];
    let journal_count = rng.random_range(1..=20);
    let journals: Vec<(String, BTreeSet<String>)> = (0..journal_count)
        .map(|j| {
            let k = rng.random_range(1..=3);
            let set = (0..k).map(|_| labels.choose(rng).unwrap().to_string()).collect();
            (issn_from_body(2_000_000 + 13 * j as u32), set)
        })
        .collect();
    let date = NaiveDate::from_ymd_opt(2012, 5, 1).unwrap();
    let mut out = Vec::new();
    for e in 0..rng.random_range(1..=50) {
        let entry = EntryId { language: ["en", "de"][e % 2].into(), title: format!("Page {}", e / 2) };
        let mut articles = BTreeSet::new();
        for _ in 0..rng.random_range(1..=6) {
            let j = rng.random_range(0..journals.len());
            articles.insert((j, rng.random_range(0..4)));
        }
        for (j, a) in articles {
            let (issn, specialties) = &journals[j];
            out.push(CitationRecord {
                entry: entry.clone(),
                article_id: format!("{issn}/{a}"),
                mention_id: format!("m{}", out.len()),
                journal: normalize_issn(issn).unwrap(),
                specialties: specialties.iter().cloned().collect(),
                date,
                year: date.year(),
            });
        }
    }
    out
}

fn cocitation_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..CASES {
        let records = random_corpus(&mut rng);
        for level in [Level::Journal, Level::Specialty] {
            for counting in [Counting::Entries, Counting::Pairs] {
                let g = build_cocitation_graph(&records, level, counting);
                let got: BTreeMap<(String, String), f64> =
                    g.edges().map(|(a, b, w)| ((a.clone(), b.clone()), w)).collect();
                let expected: BTreeMap<(String, String), f64> =
                    cocitation_weights(&records, level, counting).into_iter().map(|(k, w)| (k, w as f64)).collect();
                assert_eq!(got, expected, "case {case}, {level:?}, {counting:?}");
                let endpoints: BTreeSet<&String> = expected.keys().flat_map(|(a, b)| [a, b]).collect();
                assert_eq!(g.node_ids().collect::<BTreeSet<_>>(), endpoints, "case {case} node set");
            }
        }
    }
    assert!(start.elapsed() < Duration::from_secs(10), "took {:?}", start.elapsed());
}

fn named(edges: &BTreeSet<(usize, usize)>) -> BTreeSet<(String, String)> {
    edges.iter().map(|&(a, b)| (node_name(a), node_name(b))).collect()
}

fn pathfinder_oracle() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..CASES {
        let n = rng.random_range(2..=10);
        let density = rng.random_range(0.2..0.7);
        let edges = random_edges(&mut rng, n, density, 1..=9);
        let g = DistanceGraph::from_distances(to_graph(n, &edges));
        for (r, oracle_r) in [(Minkowski::Finite(1.0), Some(1)), (Minkowski::Finite(2.0), Some(2)), (Minkowski::Infinite, None)] {
            for q in [2, n - 1] {
                let expected = named(&pathfinder_edges(n, &edges, oracle_r, q));
                let got = pathfinder(&g, PathfinderParams { r, q: PathLength::Edges(q) }).unwrap();
                assert_eq!(edge_set(got.graph()), expected, "case {case}: n={n} r={r} q={q}");
                if q == n - 1 {
                    let max = pathfinder(&g, PathfinderParams { r, q: PathLength::Max }).unwrap();
                    assert_eq!(edge_set(max.graph()), expected, "case {case}: q=max");
                }
            }
        }
    }

    let full = PathfinderParams { r: Minkowski::Infinite, q: PathLength::Max };
    for case in 0..CASES {
        let n = rng.random_range(2..=12);
        let density = rng.random_range(0.2..0.9);
        let edges = random_edges(&mut rng, n, density, 1..=5);
        let g = DistanceGraph::from_distances(to_graph(n, &edges));
        let reference = edge_set(pathfinder(&g, full).unwrap().graph());
        assert_eq!(edge_set(pathfinder_mst(&g).graph()), reference, "case {case}: spanning-tree union");
        for transform in [|d: f64| d * d, |d: f64| 10.0 * d + 3.0] {
            let moved = DistanceGraph::from_distances(g.graph().map_weights(transform).unwrap());
            assert_eq!(edge_set(pathfinder(&moved, full).unwrap().graph()), reference, "case {case}: monotone transform");
        }
    }
    assert!(start.elapsed() < Duration::from_secs(60), "took {:?}", start.elapsed());
}

fn betweenness_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..CASES {
        let n = rng.random_range(1..=10);
        let density = rng.random_range(0.15..0.8);
        let edges = random_edges(&mut rng, n, density, 1..=4);
        let g = to_graph(n, &edges);
        for weighted in [false, true] {
            let got = betweenness_centrality(&g, weighted);
            let expected = betweenness(n, &edges, weighted);
            for (i, e) in expected.iter().enumerate() {
                let b = got[&node_name(i)];
                assert!((b - e).abs() <= 1e-9, "case {case} weighted={weighted} node {i}: {b} vs {e}");
            }
        }
    }
    let p3 = to_graph(3, &[(0, 1, 1.0), (1, 2, 1.0)]);
    assert_eq!(betweenness_centrality(&p3, false)[&node_name(1)], 1.0);
    for k in 2..=9 {
        let star: Vec<_> = (1..=k).map(|leaf| (0, leaf, 1.0)).collect();
        let b = betweenness_centrality(&to_graph(k + 1, &star), false);
        assert_eq!(b[&node_name(0)], (k * (k - 1) / 2) as f64, "star with {k} leaves");
    }
}

fn pipeline_rules() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let issns: Vec<String> = (0..3).map(|i| issn_from_body(3_000_000 + i)).collect();
    for case in 0..300 {
        let records: Vec<CitationRecord> = (0..rng.random_range(0..40))
            .map(|i| {
                let date = NaiveDate::from_ymd_opt(2010, 1, 1).unwrap() + chrono::Days::new(rng.random_range(0..4));
                CitationRecord {
                    entry: EntryId { language: "en".into(), title: format!("P{}", rng.random_range(0..4)) },
                    article_id: format!("a{}", rng.random_range(0..4)),
                    mention_id: format!("m{:02}", rng.random_range(0..60) + i % 2),
                    journal: normalize_issn(issns.choose(&mut rng).unwrap()).unwrap(),
                    specialties: ["History".to_string()].into_iter().collect(),
                    date,
                    year: date.year(),
                }
            })
            .collect();
        let mut expected: BTreeMap<(String, String), &CitationRecord> = BTreeMap::new();
        for r in &records {
            let key = (r.entry.title.clone(), r.article_id.clone());
            let better = match expected.get(&key) {
                None => true,
                Some(kept) => r.date > kept.date || (r.date == kept.date && r.mention_id < kept.mention_id),
            };
            if better {
                expected.insert(key, r);
            }
        }
        let (kept, report) = dedupe_citations(records.clone());
        let expected: Vec<CitationRecord> = expected.into_values().cloned().collect();
        assert_eq!(kept, expected, "case {case}");
        assert_eq!(report.removed, records.len() - kept.len());
    }

    for case in 0..CASES {
        let n = rng.random_range(1..=14);
        let density = rng.random_range(0.05..0.6);
        let edges = random_edges(&mut rng, n, density, 1..=12);
        let g = to_graph(n, &edges);

        let pruned = prune_threshold(&g, 6.0);
        let heavy: BTreeSet<_> = edges.iter().filter(|e| e.2 >= 6.0).map(|&(a, b, _)| (node_name(a), node_name(b))).collect();
        assert_eq!(edge_set(&pruned), heavy, "case {case}: prune");
        assert!(pruned.edges().all(|(_, _, w)| w >= 6.0));

        let normalized = normalize_weights(&g);
        if !edges.is_empty() {
            assert_eq!(normalized.edges().map(|e| e.2).fold(0.0, f64::max), 1.0, "case {case}: max weight");
        }
        let before: Vec<f64> = g.edges().map(|e| e.2).collect();
        let after: Vec<f64> = normalized.edges().map(|e| e.2).collect();
        for i in 0..before.len() {
            for j in 0..before.len() {
                assert_eq!(before[i].partial_cmp(&before[j]), after[i].partial_cmp(&after[j]), "case {case}: order");
            }
        }

        let main = largest_component(&g);
        let groups = component_sets(&g);
        let biggest = groups.iter().map(BTreeSet::len).max().unwrap_or(0);
        let members: BTreeSet<String> = main.node_ids().cloned().collect();
        assert_eq!(members.len(), biggest, "case {case}: size");
        assert!(groups.contains(&members) || members.is_empty(), "case {case}: not a component");
        assert!(component_sets(&main).len() <= 1, "case {case}: disconnected");
        let induced: BTreeSet<_> = edge_set(&g).into_iter().filter(|(a, b)| members.contains(a) && members.contains(b)).collect();
        assert_eq!(edge_set(&main), induced);
    }
}

fn close(a: &str, b: f64, what: &str) {
    let a: f64 = a.parse().unwrap_or_else(|_| panic!("{what}: {a:?} is not a number"));
    assert!((a - b).abs() <= 1e-9, "{what}: emitted {a}, expected {b}");
}

fn check_tables(out: &Path, config: &PipelineConfig) {
    let records = citations(out);
    let tables = out.join("stage-12-tables");

    let per_entry: Vec<f64> = tally(records.iter().map(|r| &r.entry)).values().map(|&c| c as f64).collect();
    let per_article: Vec<f64> = tally(records.iter().map(|r| &r.article_id)).values().map(|&c| c as f64).collect();
    let rows = read_csv_rows(&tables.join("table1_distributions.csv"));
    for (row, values) in rows.iter().zip([per_entry, per_article]) {
        let (n, mean, median, mode, std, min, max) = summary(&values);
        assert_eq!(row["n"], n.to_string());
        for (key, v) in [("mean", mean), ("median", median), ("mode", mode), ("std_dev", std), ("min", min), ("max", max), ("range", max - min)] {
            close(&row[key], v, &format!("{} {key}", row["distribution"]));
        }
    }

    let labels: BTreeSet<&str> = records.iter().flat_map(|r| r.specialties.iter()).collect();
    let total_journals = records.iter().map(|r| &r.journal).collect::<BTreeSet<_>>().len() as f64;
    let rows = read_csv_rows(&tables.join("table2_specialties.csv"));
    assert_eq!(rows.len(), labels.len());
    let mut expanded = (0.0, 0.0);
    let mut per_label = Vec::new();
    for label in &labels {
        let under: Vec<&CitationRecord> = records.iter().filter(|r| r.specialties.contains(label)).collect();
        let journals = under.iter().map(|r| &r.journal).collect::<BTreeSet<_>>().len() as f64;
        let counts: Vec<f64> = tally(under.iter().map(|r| &r.article_id)).values().map(|&c| c as f64).collect();
        expanded.0 += journals;
        expanded.1 += under.len() as f64;
        per_label.push((label, journals, counts, under.len() as f64));
    }
    for (row, (label, journals, counts, cites)) in rows.iter().zip(&per_label) {
        assert_eq!(&row["specialty"], *label);
        assert_eq!(row["journals_cited"], journals.to_string());
        assert_eq!(row["articles_cited"], counts.len().to_string());
        assert_eq!(row["citations"], cites.to_string());
        close(&row["share_journals"], journals / total_journals, "share_journals");
        close(&row["share_journals_normalized"], journals / expanded.0, "share_journals_normalized");
        close(&row["share_citations"], cites / records.len() as f64, "share_citations");
        close(&row["share_citations_normalized"], cites / expanded.1, "share_citations_normalized");
        close(&row["mean_citations_per_article"], cites / counts.len() as f64, "mean per article");
        close(&row["std_citations_per_article"], summary(counts).4, "std per article");
    }

    let sources = source_rows(&config.inputs.sources, &config.inputs.labels);
    let by_issn: BTreeMap<&str, &SourceRow> =
        sources.iter().flat_map(|s| s.issns.iter().map(move |i| (i.as_str(), s))).collect();
    let mut ranking: Vec<(usize, String, String, usize)> = tally(records.iter().map(|r| r.journal.hyphenated()))
        .into_iter()
        .map(|(issn, cites)| {
            let articles = records.iter().filter(|r| r.journal.hyphenated() == issn).map(|r| &r.article_id).collect::<BTreeSet<_>>().len();
            (cites, by_issn[issn.as_str()].title.clone(), issn, articles)
        })
        .collect();
    ranking.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    ranking.truncate(config.rules.top_k);
    let rows = read_csv_rows(&tables.join("table3_journals.csv"));
    assert_eq!(rows.len(), ranking.len());
    for (i, (row, (cites, title, issn, articles))) in rows.iter().zip(&ranking).enumerate() {
        let source = by_issn[issn.as_str()];
        assert_eq!(row["rank"], (i + 1).to_string());
        assert_eq!((&row["issn"], &row["title"]), (issn, title));
        assert_eq!((row["citations"].clone(), row["articles_cited"].clone()), (cites.to_string(), articles.to_string()));
        close(&row["mean_citations"], *cites as f64 / *articles as f64, "mean citations");
        assert_eq!(row["open_access"], source.open_access.to_string());
        assert_eq!(row["top_journal"], (source.percentile <= 10.0).to_string());
    }

    let mut scopus: BTreeMap<&str, (f64, f64)> = BTreeMap::new();
    for s in &sources {
        for label in &s.labels {
            let entry = scopus.entry(label.as_str()).or_default();
            entry.0 += s.output as f64;
            entry.1 += s.citations as f64;
        }
    }
    let present: Vec<(f64, f64, f64, f64)> = per_label
        .iter()
        .map(|(label, _, counts, cites)| (counts.len() as f64, *cites, scopus[*label].0, scopus[*label].1))
        .collect();
    let sums = present.iter().fold((0.0, 0.0, 0.0, 0.0), |s, p| (s.0 + p.0, s.1 + p.1, s.2 + p.2, s.3 + p.3));
    let rows = read_csv_rows(&tables.join("table4_coverage.csv"));
    assert_eq!(rows.len(), present.len());
    for (row, p) in rows.iter().zip(&present) {
        close(&row["wiki_article_share"], p.0 / sums.0, "wiki article share");
        close(&row["wiki_citation_share"], p.1 / sums.1, "wiki citation share");
        close(&row["scopus_article_share"], p.2 / sums.2, "scopus article share");
        close(&row["scopus_citation_share"], p.3 / sums.3, "scopus citation share");
    }

    let rows = read_csv_rows(&tables.join("annual_series.csv"));
    let years = tally(records.iter().map(|r| r.year));
    assert_eq!(rows.len(), years.len());
    for (row, (year, cites)) in rows.iter().zip(years) {
        let articles = records.iter().filter(|r| r.year == year).map(|r| &r.article_id).collect::<BTreeSet<_>>().len();
        assert_eq!((row["year"].clone(), row["citations"].clone()), (year.to_string(), cites.to_string()));
        close(&row["mean_citations_per_article"], cites as f64 / articles as f64, "annual mean");
    }
}

fn statistics_oracle() {
    let runs = runs();
    check_tables(&runs.small, &load_config("small.toml", &runs.small));
    check_tables(&runs.shape, &load_config("shape/shape.toml", &runs.shape));

    let triangles = to_graph(6, &[(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)]);
    let cliques: BTreeMap<String, usize> = (0..6).map(|i| (node_name(i), i / 3)).collect();
    assert_eq!(modularity(&triangles, &cliques).unwrap(), 0.5);
}

fn determinism_and_round_trip() {
    let runs = runs();
    let dir = tempfile::tempdir().unwrap();
    for (name, first) in [("small.toml", &runs.small), ("shape/shape.toml", &runs.shape)] {
        let manifest = fs::read(first.join("manifest.json")).unwrap();
        for jobs in [Some(1), Some(8)] {
            let out = dir.path().join(format!("{}-{jobs:?}", name.replace('/', "-")));
            let mut config = load_config(name, &out);
            config.jobs = jobs;
            run_pipeline(&config).unwrap();
            assert!(fs::read(out.join("manifest.json")).unwrap() == manifest, "{name} with {jobs:?} jobs differs");
        }
    }

    for out in [&runs.small, &runs.shape] {
        for entry in fs::read_dir(out.join("stage-14-export")).unwrap() {
            let path = entry.unwrap().path();
            let text = fs::read_to_string(&path).unwrap();
            match path.extension().and_then(|e| e.to_str()) {
                Some("net") => assert_eq!(pajek_string(&parse_pajek(&text).unwrap()), text, "{}", path.display()),
                Some("gexf") => assert_eq!(gexf_string(&parse_gexf(&text).unwrap()), text, "{}", path.display()),
                _ => {}
            }
        }
    }

    let mut rng = ChaCha8Rng::seed_from_u64(6);
    for _ in 0..50 {
        let n = rng.random_range(0..12);
        let edges = random_edges(&mut rng, n, 0.4, 1..=1000);
        let g = to_graph(n, &edges.iter().map(|&(a, b, w)| (a, b, w / 7.0)).collect::<Vec<_>>());
        let report = CentralityReport::compute(&g, None);
        let mut doc = GraphDocument::new(g).with_centrality(&report);
        for (i, id) in doc.graph.node_ids().enumerate() {
            doc.community.insert(id.clone(), i % 3);
        }
        let pajek = pajek_string(&doc);
        assert_eq!(pajek_string(&parse_pajek(&pajek).unwrap()), pajek);
        let gexf = gexf_string(&doc);
        assert_eq!(gexf_string(&parse_gexf(&gexf).unwrap()), gexf);
    }
}

fn hub_shape() {
    let out = &runs().shape;
    let network = read_graph(&out.join("stage-08-prune/specialty_network.json"));
    let pfnet = read_graph(&out.join("stage-09-pathfinder/specialty_pfnet.json"));
    let n = pfnet.node_count();
    assert!(n > 2, "specialty map has only {n} nodes");
    assert_eq!(component_sets(&pfnet).len(), 1, "PFNET is not connected");

    let ids: Vec<String> = network.node_ids().cloned().collect();
    let position: BTreeMap<&str, usize> = ids.iter().enumerate().map(|(i, id)| (id.as_str(), i)).collect();
    let distances: Vec<(usize, usize, f64)> =
        network.edges().map(|(a, b, w)| (position[a.as_str()], position[b.as_str()], 1.0 / w)).collect();
    let oracle = pathfinder_edges(ids.len(), &distances, None, ids.len() - 1);
    let edges = pfnet.edge_count();
    assert!(n - 1 <= edges && edges <= oracle.len(), "{edges} edges on {n} nodes, oracle {}", oracle.len());

    let centrality: CentralityReport =
        serde_json::from_str(&fs::read_to_string(out.join("stage-10-centrality/specialty_centrality.json")).unwrap()).unwrap();
    let hub = "History";
    let top_degree = centrality.degree.values().max().unwrap();
    let top_betweenness = centrality.betweenness.values().fold(0.0, |a: f64, &b| a.max(b));
    assert_eq!(centrality.degree[hub], *top_degree, "hub degree");
    assert_eq!(centrality.betweenness[hub], top_betweenness, "hub betweenness");
    println!("    hub linked to {} specialties on a {n}-node map", centrality.degree[hub]);
}

fn main() {
    let criteria: [(&str, fn()); 7] = [
        ("co-citation counts match pair enumeration", cocitation_oracle),
        ("Pathfinder matches exhaustive path search", pathfinder_oracle),
        ("betweenness matches shortest-path listing", betweenness_oracle),
        ("dedup, threshold, normalization and component rules", pipeline_rules),
        ("tables match independent regrouping", statistics_oracle),
        ("runs are deterministic and graph files round-trip", determinism_and_round_trip),
        ("synthetic hub corpus gives a hub-and-spoke map", hub_shape),
    ];
    let suite = Instant::now();
    let mut failures = 0;
    for (i, (name, check)) in criteria.into_iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(()) => println!("criterion {} PASS  {name} ({secs:.2}s)", i + 1),
            Err(cause) => {
                failures += 1;
                let message = cause
                    .downcast_ref::<String>()
                    .cloned()
                    .or_else(|| cause.downcast_ref::<&str>().map(|s| s.to_string()))
                    .unwrap_or_default();
                println!("criterion {} FAIL  {name}: {message}", i + 1);
            }
        }
    }
    println!("{} of 7 criteria passed in {:.2}s", 7 - failures, suite.elapsed().as_secs_f64());
    if failures > 0 {
        std::process::exit(1);
    }
}
