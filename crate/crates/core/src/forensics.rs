//! Whole-image analysis: parallel per-block search and mask reconstruction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::image::{split_into_blocks, ImagePlane};
use crate::metrics::Label;
use crate::pipeline::Pipeline;
use crate::search::{find_antecedent, SearchConfig, Verdict};

/// Verdict and provenance for one block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockReport {
    pub x: usize,
    pub y: usize,
    pub verdict: Verdict,
    pub iterations: u32,
    pub clipped: bool,
    /// Lowest output distance reached (0 for compatible blocks).
    pub cost: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub grid_w: usize,
    pub grid_h: usize,
    /// Row-major, one entry per block.
    pub blocks: Vec<BlockReport>,
}

impl AnalysisReport {
    pub fn count(&self, verdict: Verdict) -> usize {
        self.blocks.iter().filter(|b| b.verdict == verdict).count()
    }
}

/// Runs the antecedent search on every block of `img` using `workers`
/// threads. The report does not depend on the worker count.
pub fn analyze_image(img: &ImagePlane, pipeline: &Pipeline, cfg: &SearchConfig, workers: usize) -> Result<AnalysisReport> {
    use rayon::prelude::*;

    if img.domain() != pipeline.output_domain() {
        return Err(Error::DomainMismatch { expected: pipeline.output_domain().name(), got: img.domain().name() });
    }
    if img.channels() != pipeline.channels() {
        return Err(Error::ChannelMismatch { expected: pipeline.channels(), got: img.channels() });
    }
    if workers == 0 {
        return Err(Error::InvalidConfig("worker count must be at least 1".into()));
    }
    let blocks = split_into_blocks(img, false)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::InvalidConfig(e.to_string()))?;
    let results: Result<Vec<BlockReport>> = pool.install(|| {
        blocks
            .par_iter()
            .map(|gb| {
                let out = find_antecedent(&gb.block, pipeline, cfg)?;
                Ok(BlockReport {
                    x: gb.x,
                    y: gb.y,
                    verdict: out.verdict,
                    iterations: out.iterations,
                    clipped: out.clipped,
                    cost: out.cost,
                })
            })
            .collect()
    });
    let (grid_w, grid_h) = img.grid();
    Ok(AnalysisReport { grid_w, grid_h, blocks: results? })
}

/// How unsolved blocks enter the binary mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum UnsolvedPolicy {
    #[default]
    Manipulated,
    Authentic,
    /// Kept as their own class and left out of scoring.
    Separate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskLabel {
    Authentic,
    Manipulated,
    Unsolved,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Mask {
    pub grid_w: usize,
    pub grid_h: usize,
    pub labels: Vec<MaskLabel>,
    /// The tri-state verdicts the labels were derived from.
    pub verdicts: Vec<Verdict>,
}

impl Mask {
    /// Predicted labels paired with `truth`, skipping blocks left unsolved
    /// under [`UnsolvedPolicy::Separate`].
    pub fn scored_pairs(&self, truth: &[Label]) -> (Vec<Label>, Vec<Label>) {
        self.labels
            .iter()
            .zip(truth)
            .filter_map(|(l, &t)| match l {
                MaskLabel::Authentic => Some((Label::Authentic, t)),
                MaskLabel::Manipulated => Some((Label::Manipulated, t)),
                MaskLabel::Unsolved => None,
            })
            .unzip()
    }
}

/// Incompatible blocks are manipulated, compatible ones authentic, and
/// unsolved ones follow `policy`.
pub fn build_mask(report: &AnalysisReport, policy: UnsolvedPolicy) -> Mask {
    let labels = report
        .blocks
        .iter()
        .map(|b| match (b.verdict, policy) {
            (Verdict::Compatible, _) => MaskLabel::Authentic,
            (Verdict::Incompatible, _) => MaskLabel::Manipulated,
            (Verdict::Unsolved, UnsolvedPolicy::Manipulated) => MaskLabel::Manipulated,
            (Verdict::Unsolved, UnsolvedPolicy::Authentic) => MaskLabel::Authentic,
            (Verdict::Unsolved, UnsolvedPolicy::Separate) => MaskLabel::Unsolved,
        })
        .collect();
    Mask {
        grid_w: report.grid_w,
        grid_h: report.grid_h,
        labels,
        verdicts: report.blocks.iter().map(|b| b.verdict).collect(),
    }
}
