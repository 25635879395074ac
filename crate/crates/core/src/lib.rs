//! Block-level JPEG compatibility analysis.
//!
//! A block of an observed image is *compatible* with a compression pipeline
//! if some input block produces it exactly. The library models pipelines
//! bit-exactly, searches for antecedents with a bounded best-first search,
//! and turns per-block verdicts into forgery localization masks.

pub mod codec;
pub mod error;
pub mod experiment;
pub mod forensics;
pub mod image;
pub mod io;
pub mod metrics;
pub mod pipeline;
pub mod scenarios;
pub mod search;

pub use codec::{
    compress_block, decompress_block, Block, CodecSettings, CoefBlock, ColorImpl, DctImpl, Domain,
    FloatBlock, PixelBlock, QuantTable,
};
pub use error::{Error, Result};
pub use forensics::{analyze_image, build_mask, AnalysisReport, BlockReport, Mask, MaskLabel, UnsolvedPolicy};
pub use image::{compress_image, decompress_image, split_into_blocks, ImagePlane};
pub use metrics::{collapse_to_blocks, evaluate, ConfusionCounts, Evaluation, Label};
pub use pipeline::{make_pipeline, pipeline_bound, run_backward, run_forward, Pipeline, Stage, StageKind};
pub use search::{
    find_antecedent, is_clipped, neighbors, BoundMode, CostNorm, SearchConfig, SearchOutcome, Verdict,
};
pub use scenarios::{forge, recompress_scenario, synthetic_image, ForgeryKind, ForgerySpec, GroundTruth, MismatchClass, Rect};
