//! Run configuration: the analysis pipeline, search settings and paths,
//! read from TOML and overridable from the command line.

use std::path::{Path, PathBuf};

use jpegcompat::{
    make_pipeline, BoundMode, ColorImpl, CostNorm, DctImpl, Pipeline, QuantTable, SearchConfig, Stage, StageKind,
    UnsolvedPolicy,
};
use serde::{Deserialize, Serialize};

use crate::CliError;

/// One pipeline stage: a quality factor or an explicit 64/192-entry table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    pub kind: StageKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub qf: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub table: Option<Vec<u16>>,
    #[serde(default)]
    pub dct: DctImpl,
    #[serde(default)]
    pub color: ColorImpl,
}

impl StageConfig {
    pub fn to_stage(&self, channels: usize) -> Result<Stage, CliError> {
        let table = match (&self.qf, &self.table) {
            (Some(qf), None) => QuantTable::from_qf(*qf, channels)?,
            (None, Some(t)) => QuantTable::from_steps(t, channels)?,
            _ => return Err(CliError::Config("each stage needs exactly one of `qf` or `table`".into())),
        };
        Ok(match self.kind {
            StageKind::Compress => Stage::compress(table, self.dct, self.color),
            StageKind::Decompress => Stage::decompress(table, self.dct, self.color),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SearchSettings {
    pub max_iterations: u32,
    pub norm: CostNorm,
    pub bound: BoundMode,
    pub unsolved_policy: UnsolvedPolicy,
}

impl Default for SearchSettings {
    fn default() -> Self {
        let s = SearchConfig::default();
        SearchSettings {
            max_iterations: s.max_iterations,
            norm: s.norm,
            bound: s.bound,
            unsolved_policy: UnsolvedPolicy::default(),
        }
    }
}

impl SearchSettings {
    pub fn search_config(&self) -> SearchConfig {
        SearchConfig { max_iterations: self.max_iterations, norm: self.norm, bound: self.bound }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub pipeline: Vec<StageConfig>,
    pub search: SearchSettings,
    pub workers: usize,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            pipeline: Vec::new(),
            search: SearchSettings::default(),
            workers: 1,
            seed: 0,
            input: None,
            output_dir: None,
        }
    }
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.search.max_iterations < 1 {
            return Err(CliError::Config("max_iterations must be at least 1".into()));
        }
        if self.workers < 1 {
            return Err(CliError::Config("workers must be at least 1".into()));
        }
        if let Some(p) = &self.input {
            if !p.exists() {
                return Err(CliError::Config(format!("input {} does not exist", p.display())));
            }
        }
        Ok(())
    }

    pub fn build_pipeline(&self, channels: usize) -> Result<Pipeline, CliError> {
        let stages = self.pipeline.iter().map(|s| s.to_stage(channels)).collect::<Result<Vec<_>, _>>()?;
        Ok(make_pipeline(stages)?)
    }
}
