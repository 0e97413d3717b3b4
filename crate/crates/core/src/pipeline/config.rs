use std::fmt::Display;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::PipelineError;
use crate::cocite::{Counting, Level};
use crate::corpus::DateSource;
use crate::netalgo::{Minkowski, PathLength, PathfinderParams};

/// Input files. Relative paths in a config file resolve against the file's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputPaths {
    pub mentions: PathBuf,
    pub sources: PathBuf,
    pub labels: PathBuf,
    /// Directory of `{title, issns}` JSON files answering ISSN lookups offline.
    #[serde(default)]
    pub lookup_fixtures: Option<PathBuf>,
    /// MediaWiki API endpoint used when not offline and no fixtures are given.
    #[serde(default)]
    pub lookup_endpoint: Option<String>,
    #[serde(default)]
    pub cache: Option<PathBuf>,
}

/// Every parameter that affects results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Rules {
    /// Keep citations of journals with a label of this discipline.
    pub discipline: Option<String>,
    pub year_window: Option<(i32, i32)>,
    pub date_source: DateSource,
    pub min_weight: f64,
    pub counting: Counting,
    pub levels: Vec<Level>,
    #[serde(serialize_with = "as_display", deserialize_with = "parse_token")]
    pub pathfinder_r: Minkowski,
    #[serde(serialize_with = "as_display", deserialize_with = "parse_token")]
    pub pathfinder_q: PathLength,
    pub resolution: f64,
    pub seed: u64,
    pub top_k: usize,
}

impl Default for Rules {
    fn default() -> Self {
        Rules {
            discipline: None,
            year_window: Some((2007, 2017)),
            date_source: DateSource::Mention,
            min_weight: 6.0,
            counting: Counting::Entries,
            levels: vec![Level::Journal, Level::Specialty],
            pathfinder_r: Minkowski::Infinite,
            pathfinder_q: PathLength::Max,
            resolution: 1.0,
            seed: 1,
            top_k: 25,
        }
    }
}

impl Rules {
    pub fn pathfinder_params(&self) -> PathfinderParams {
        PathfinderParams { r: self.pathfinder_r, q: self.pathfinder_q }
    }
}

fn as_display<T: Display, S: Serializer>(value: &T, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&value.to_string())
}

/// Accepts either a string token (`"inf"`, `"max"`) or a bare number.
fn parse_token<'de, T, D>(d: D) -> Result<T, D::Error>
where
    T: FromStr,
    T::Err: Display,
    D: Deserializer<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Token {
        Int(u64),
        Float(f64),
        Text(String),
    }
    let text = match Token::deserialize(d)? {
        Token::Int(i) => i.to_string(),
        Token::Float(f) => f.to_string(),
        Token::Text(s) => s,
    };
    text.parse().map_err(serde::de::Error::custom)
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub inputs: InputPaths,
    #[serde(default)]
    pub rules: Rules,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    /// Never contact the lookup endpoint.
    #[serde(default)]
    pub offline: bool,
    /// Worker threads; results do not depend on it.
    #[serde(default)]
    pub jobs: Option<usize>,
}

impl PipelineConfig {
    pub fn from_toml(text: &str) -> Result<Self, PipelineError> {
        toml::from_str(text).map_err(|e| PipelineError::Config(e.to_string()))
    }

    /// Reads a config file and makes its relative paths absolute against its directory.
    pub fn load(path: &Path) -> Result<Self, PipelineError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PipelineError::Config(format!("{}: {e}", path.display())))?;
        let mut config = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        config.resolve_paths(base);
        Ok(config)
    }

    pub fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        fix(&mut self.inputs.mentions);
        fix(&mut self.inputs.sources);
        fix(&mut self.inputs.labels);
        if let Some(p) = self.inputs.lookup_fixtures.as_mut() {
            fix(p);
        }
        if let Some(p) = self.inputs.cache.as_mut() {
            fix(p);
        }
        fix(&mut self.output_dir);
    }

    pub fn validate(&self) -> Result<(), PipelineError> {
        let inputs = &self.inputs;
        for (role, path) in [("mentions", &inputs.mentions), ("sources", &inputs.sources), ("labels", &inputs.labels)] {
            if !path.is_file() {
                return Err(PipelineError::Config(format!("{role} file {} does not exist", path.display())));
            }
        }
        if let Some(dir) = &inputs.lookup_fixtures {
            if !dir.is_dir() {
                return Err(PipelineError::Config(format!("lookup fixture directory {} does not exist", dir.display())));
            }
        }
        let rules = &self.rules;
        if rules.min_weight.is_nan() || rules.min_weight < 0.0 {
            return Err(PipelineError::Config(format!("min_weight {} must be >= 0", rules.min_weight)));
        }
        if let Some((lo, hi)) = rules.year_window {
            if lo > hi {
                return Err(PipelineError::Config(format!("year window {lo}:{hi} is reversed")));
            }
        }
        if rules.levels.is_empty() {
            return Err(PipelineError::Config("no network level selected".into()));
        }
        if self.jobs == Some(0) {
            return Err(PipelineError::Config("jobs must be at least 1".into()));
        }
        rules.pathfinder_params().validate().map_err(|e| PipelineError::Config(e.to_string()))
    }
}
