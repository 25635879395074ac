//! Compression pipelines: ordered stages, bit-exact forward evaluation,
//! exact real-valued backward estimation, and the search radius.

use serde::{Deserialize, Serialize};

use crate::codec::{color, exact, Block, ColorImpl, DctImpl, Domain, FloatBlock, Kernel, QuantTable};
use crate::error::{Error, Result};

/// Direction of a stage.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StageKind {
    /// Pixels to quantized coefficients.
    Compress,
    /// Quantized coefficients to pixels.
    Decompress,
}

/// One compression or decompression step.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Stage {
    pub kind: StageKind,
    pub table: QuantTable,
    pub dct: DctImpl,
    pub color: ColorImpl,
}

/// Contribution of one rounding-to-pixels step to the search radius.
pub const PIXEL_ROUNDING_TERM: f64 = 4.0;
/// Contribution of one integer color conversion to the search radius.
pub const COLOR_ROUNDING_TERM: f64 = 4.0;

impl Stage {
    pub fn compress(table: QuantTable, dct: DctImpl, color: ColorImpl) -> Self {
        Stage { kind: StageKind::Compress, table, dct, color }
    }

    pub fn decompress(table: QuantTable, dct: DctImpl, color: ColorImpl) -> Self {
        Stage { kind: StageKind::Decompress, table, dct, color }
    }

    pub fn channels(&self) -> usize {
        self.table.channels()
    }

    pub fn input_domain(&self) -> Domain {
        match self.kind {
            StageKind::Compress => Domain::Pixel,
            StageKind::Decompress => Domain::Dct,
        }
    }

    pub fn output_domain(&self) -> Domain {
        match self.kind {
            StageKind::Compress => Domain::Dct,
            StageKind::Decompress => Domain::Pixel,
        }
    }

    /// Whether the stage rounds color-converted values to integers. Only the
    /// exact matrix feeding (or fed by) the exact DCT avoids it.
    pub fn rounds_color(&self) -> bool {
        self.channels() == 3
            && !(self.color == ColorImpl::ExactMatrix && self.dct == DctImpl::ExactOrthonormal)
    }

    /// This stage's additive term in the search radius.
    pub fn bound_term(&self) -> f64 {
        let base = match self.kind {
            StageKind::Compress => self.table.half_step_norm(),
            StageKind::Decompress => PIXEL_ROUNDING_TERM,
        };
        base + if self.rounds_color() { COLOR_ROUNDING_TERM } else { 0.0 }
    }

    /// Exact inverse of the stage, applied in place to a real-valued block.
    fn invert(&self, v: &mut [f64]) {
        let ch = self.channels();
        match self.kind {
            StageKind::Decompress => {
                if ch == 3 {
                    map_pixels(v, color::rgb_to_ycc_exact);
                }
                for c in 0..ch {
                    let plane = &mut v[c * 64..(c + 1) * 64];
                    let mut shifted = [0f64; 64];
                    for p in 0..64 {
                        shifted[p] = plane[p] - 128.0;
                    }
                    exact::fdct(&shifted, plane);
                    for (k, x) in plane.iter_mut().enumerate() {
                        *x /= self.table.channel(c)[k] as f64;
                    }
                }
            }
            StageKind::Compress => {
                self.dequantize_idct(v);
                if ch == 3 {
                    map_pixels(v, color::ycc_to_rgb_exact);
                }
            }
        }
    }

    /// The stage without any rounding or clamping, applied in place.
    fn apply_exact(&self, v: &mut [f64]) {
        let ch = self.channels();
        match self.kind {
            StageKind::Compress => {
                if ch == 3 {
                    map_pixels(v, color::rgb_to_ycc_exact);
                }
                for c in 0..ch {
                    let plane = &mut v[c * 64..(c + 1) * 64];
                    let mut shifted = [0f64; 64];
                    for p in 0..64 {
                        shifted[p] = plane[p] - 128.0;
                    }
                    exact::fdct(&shifted, plane);
                    for (k, x) in plane.iter_mut().enumerate() {
                        *x /= self.table.channel(c)[k] as f64;
                    }
                }
            }
            StageKind::Decompress => {
                self.dequantize_idct(v);
                if ch == 3 {
                    map_pixels(v, color::ycc_to_rgb_exact);
                }
            }
        }
    }

    fn dequantize_idct(&self, v: &mut [f64]) {
        for c in 0..self.channels() {
            let plane = &mut v[c * 64..(c + 1) * 64];
            let mut deq = [0f64; 64];
            for k in 0..64 {
                deq[k] = plane[k] * self.table.channel(c)[k] as f64;
            }
            exact::idct(&deq, plane);
            for x in plane.iter_mut() {
                *x += 128.0;
            }
        }
    }
}

fn map_pixels(v: &mut [f64], f: impl Fn([f64; 3]) -> [f64; 3]) {
    for p in 0..64 {
        let out = f([v[p], v[64 + p], v[128 + p]]);
        for c in 0..3 {
            v[c * 64 + p] = out[c];
        }
    }
}

/// A validated sequence of stages with precomputed kernels.
#[derive(Clone, Debug)]
pub struct Pipeline {
    stages: Vec<Stage>,
    kernels: Vec<Kernel>,
}

/// Validates and builds a pipeline. Stages must share a channel count and
/// each stage must consume the domain the previous one produces.
pub fn make_pipeline(stages: Vec<Stage>) -> Result<Pipeline> {
    let first = stages.first().ok_or(Error::EmptyPipeline)?;
    let channels = first.channels();
    for pair in stages.windows(2) {
        if pair[1].channels() != channels {
            return Err(Error::ChannelMismatch { expected: channels, got: pair[1].channels() });
        }
        if pair[0].output_domain() != pair[1].input_domain() {
            return Err(Error::InvalidConfig(format!(
                "stage produces {} values but the next stage expects {}",
                pair[0].output_domain().name(),
                pair[1].input_domain().name()
            )));
        }
    }
    let kernels = stages.iter().map(|s| Kernel::new(&s.table, s.dct, s.color)).collect();
    Ok(Pipeline { stages, kernels })
}

impl Pipeline {
    pub fn stages(&self) -> &[Stage] {
        &self.stages
    }

    pub fn channels(&self) -> usize {
        self.stages[0].channels()
    }

    /// Number of integers in a block.
    pub fn block_len(&self) -> usize {
        self.channels() * 64
    }

    pub fn input_domain(&self) -> Domain {
        self.stages[0].input_domain()
    }

    pub fn output_domain(&self) -> Domain {
        self.stages[self.stages.len() - 1].output_domain()
    }

    /// Search radius in the input metric.
    pub fn bound(&self) -> f64 {
        self.stages.iter().map(Stage::bound_term).sum()
    }

    /// Per-entry weights of the input metric: the first stage's squared
    /// steps for coefficient inputs, 1 for pixel inputs.
    pub fn input_weights(&self) -> Vec<f64> {
        let first = &self.stages[0];
        match first.kind {
            StageKind::Decompress => first.table.steps().iter().map(|&q| (q as f64).powi(2)).collect(),
            StageKind::Compress => vec![1.0; self.block_len()],
        }
    }

    /// Linear color map applied to pixel-domain inputs before measuring
    /// distances: rounding errors are bounded per YCbCr channel.
    pub fn input_color_mix(&self) -> Option<[[f64; 3]; 3]> {
        (self.input_domain() == Domain::Pixel && self.channels() == 3).then_some(color::RGB_TO_YCC)
    }

    /// Distance of `x` from `center` in the input metric: the largest
    /// per-channel norm, with coefficient inputs weighted by their steps and
    /// color pixel inputs measured in YCbCr.
    pub fn input_distance(&self, x: &[f64], center: &[f64]) -> f64 {
        crate::search::SearchSpace::for_pipeline(self).distance(x, center)
    }

    /// Bit-exact evaluation without heap allocation. `input` and `out` hold
    /// `block_len()` integers.
    pub fn forward_into(&self, input: &[i32], out: &mut [i32]) {
        let n = self.block_len();
        let mut a = [0i32; 192];
        let mut b = [0i32; 192];
        a[..n].copy_from_slice(&input[..n]);
        for (stage, kernel) in self.stages.iter().zip(&self.kernels) {
            match stage.kind {
                StageKind::Compress => kernel.compress(&a[..n], &mut b[..n]),
                StageKind::Decompress => kernel.decompress(&a[..n], &mut b[..n]),
            }
            std::mem::swap(&mut a, &mut b);
        }
        out[..n].copy_from_slice(&a[..n]);
    }

    pub fn forward(&self, input: &[i32]) -> Vec<i32> {
        let mut out = vec![0; self.block_len()];
        self.forward_into(input, &mut out);
        out
    }

    /// Exact real-valued estimates at every stage boundary, from the input
    /// estimate (index 0) to the observation itself (last index).
    pub fn backward_trace(&self, observed: &[i32]) -> Vec<Vec<f64>> {
        let mut trace = vec![Vec::new(); self.stages.len() + 1];
        let mut v: Vec<f64> = observed.iter().map(|&x| x as f64).collect();
        trace[self.stages.len()] = v.clone();
        for (i, stage) in self.stages.iter().enumerate().rev() {
            stage.invert(&mut v);
            trace[i] = v.clone();
        }
        trace
    }

    /// Whether a decompression anywhere in the pipeline has (or, for
    /// intermediate stages, is estimated to have) hit the `0`/`255` clamp,
    /// which voids the radius guarantee.
    pub fn trace_clipped(&self, trace: &[Vec<f64>]) -> bool {
        let hits = |v: f64| {
            let r = v.round();
            r <= 0.0 || r >= 255.0
        };
        self.stages.iter().enumerate().any(|(i, stage)| {
            if stage.kind != StageKind::Decompress {
                return false;
            }
            let out = &trace[i + 1];
            if out.iter().any(|&v| hits(v)) {
                return true;
            }
            stage.channels() == 3
                && (0..64).any(|p| {
                    color::rgb_to_ycc_exact([out[p], out[64 + p], out[128 + p]])
                        .into_iter()
                        .any(hits)
                })
        })
    }

    /// The pipeline with every rounding and clamp removed.
    pub fn forward_exact(&self, input: &[f64]) -> Vec<f64> {
        let mut v = input.to_vec();
        for stage in &self.stages {
            stage.apply_exact(&mut v);
        }
        v
    }

    fn check_block(&self, block: &Block, domain: Domain) -> Result<()> {
        if block.domain() != domain {
            return Err(Error::DomainMismatch { expected: domain.name(), got: block.domain().name() });
        }
        if block.channels() != self.channels() {
            return Err(Error::ChannelMismatch { expected: self.channels(), got: block.channels() });
        }
        Ok(())
    }
}

/// Bit-exact evaluation of the pipeline on one block.
pub fn run_forward(pipeline: &Pipeline, input: &Block) -> Result<Block> {
    pipeline.check_block(input, pipeline.input_domain())?;
    let out = pipeline.forward(&input.to_ints());
    Block::from_ints(pipeline.output_domain(), pipeline.channels(), out)
}

/// Exact real-valued inverse of the pipeline: the search starting point.
pub fn run_backward(pipeline: &Pipeline, observed: &Block) -> Result<FloatBlock> {
    pipeline.check_block(observed, pipeline.output_domain())?;
    let trace = pipeline.backward_trace(&observed.to_ints());
    Ok(FloatBlock {
        channels: pipeline.channels(),
        domain: pipeline.input_domain(),
        data: trace.into_iter().next().unwrap_or_default(),
    })
}

/// Exact forward evaluation with no rounding or clamping.
pub fn run_forward_exact(pipeline: &Pipeline, input: &FloatBlock) -> Result<FloatBlock> {
    if input.domain != pipeline.input_domain() {
        return Err(Error::DomainMismatch {
            expected: pipeline.input_domain().name(),
            got: input.domain.name(),
        });
    }
    if input.data.len() != pipeline.block_len() {
        return Err(Error::LengthMismatch { expected: pipeline.block_len(), got: input.data.len() });
    }
    Ok(FloatBlock {
        channels: pipeline.channels(),
        domain: pipeline.output_domain(),
        data: pipeline.forward_exact(&input.data),
    })
}

/// Search radius `M` for a pipeline.
pub fn pipeline_bound(pipeline: &Pipeline) -> f64 {
    pipeline.bound()
}
