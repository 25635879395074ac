//! Bounded best-first antecedent search.

use std::cmp::Reverse;
use std::collections::BinaryHeap;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::codec::{Block, Domain, PixelBlock};
use crate::error::{Error, Result};
use crate::pipeline::Pipeline;

/// Distance between a candidate's output and the observation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum CostNorm {
    #[default]
    L1,
    Linf,
}

/// Whether candidates are restricted to the radius around the start point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum BoundMode {
    #[default]
    Enforced,
    Disabled,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchConfig {
    /// Expansion budget `N`.
    pub max_iterations: u32,
    pub norm: CostNorm,
    pub bound: BoundMode,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig { max_iterations: 5000, norm: CostNorm::L1, bound: BoundMode::Enforced }
    }
}

/// Per-block decision.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    /// An antecedent was found.
    Compatible,
    /// The bounded search space was exhausted without a match.
    Incompatible,
    /// The budget ran out, or the space was unbounded and exhausted.
    Unsolved,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    pub verdict: Verdict,
    /// The input block that reproduces the observation, if found.
    pub antecedent: Option<Block>,
    /// Expansions performed; 0 when the start point already matches.
    pub iterations: u32,
    /// Whether clamping voided the radius, disabling the bound.
    pub clipped: bool,
    /// Lowest cost seen among tested candidates.
    pub cost: u64,
    /// Number of distinct candidates tested.
    pub visited: usize,
}

/// True if any sample sits on the clamp limits.
pub fn is_clipped(block: &PixelBlock) -> bool {
    block.data().iter().any(|&v| v == 0 || v == 255)
}

const COEF_LIMIT: i32 = i16::MAX as i32;

/// The lattice searched: value box and input metric. The radius applies to
/// every channel separately: channel `k` of a candidate `x` lies at
/// `sqrt(sum_p w_p * r_kp^2)` from the center, where `r` is `x - center`,
/// first mixed across channels by `color_mix` when present.
#[derive(Clone, Debug, PartialEq)]
pub struct SearchSpace {
    pub domain: Domain,
    pub channels: usize,
    pub weights: Vec<f64>,
    pub color_mix: Option<[[f64; 3]; 3]>,
}

impl SearchSpace {
    pub fn for_pipeline(pipeline: &Pipeline) -> Self {
        SearchSpace {
            domain: pipeline.input_domain(),
            channels: pipeline.channels(),
            weights: pipeline.input_weights(),
            color_mix: pipeline.input_color_mix(),
        }
    }

    /// A per-channel weighted metric without color mixing.
    pub fn weighted(domain: Domain, weights: Vec<f64>) -> Self {
        SearchSpace { domain, channels: weights.len() / 64, weights, color_mix: None }
    }

    fn limits(&self) -> (i32, i32) {
        match self.domain {
            Domain::Pixel => (0, 255),
            Domain::Dct => (-COEF_LIMIT, COEF_LIMIT),
        }
    }

    /// Residual in the metric's channel space, then the squared distance of
    /// each channel.
    fn residual(&self, x: &[f64], center: &[f64], mixed: &mut [f64]) -> [f64; 3] {
        let n = self.channels * 64;
        for i in 0..n {
            mixed[i] = x[i] - center[i];
        }
        if let Some(t) = self.color_mix {
            for p in 0..64 {
                let r = [mixed[p], mixed[64 + p], mixed[128 + p]];
                for k in 0..3 {
                    mixed[k * 64 + p] = t[k][0] * r[0] + t[k][1] * r[1] + t[k][2] * r[2];
                }
            }
        }
        let mut d2 = [0.0; 3];
        for i in 0..n {
            d2[i / 64] += self.weights[i] * mixed[i] * mixed[i];
        }
        d2
    }

    /// Largest per-channel distance between `x` and `center`.
    pub fn distance(&self, x: &[f64], center: &[f64]) -> f64 {
        let mut mixed = vec![0.0; self.channels * 64];
        let d2 = self.residual(x, center, &mut mixed);
        d2.iter().fold(0.0f64, |a, &b| a.max(b)).sqrt()
    }

    /// Whether moving entry `i` by `d` keeps every channel within `r2`,
    /// given the current residual and squared distances.
    #[inline]
    fn step_ok(&self, i: usize, d: f64, mixed: &[f64], d2: &[f64; 3], r2: f64) -> bool {
        match self.color_mix {
            None => {
                let w = self.weights[i];
                d2[i / 64] + w * (2.0 * d * mixed[i] + 1.0) <= r2
            }
            Some(t) => {
                let (c, p) = (i / 64, i % 64);
                (0..3).all(|k| {
                    let a = t[k][c];
                    d2[k] + self.weights[k * 64 + p] * a * (2.0 * d * mixed[k * 64 + p] + a) <= r2
                })
            }
        }
    }
}

/// Slack on the radius so that rounding in the incremental distance update
/// never drops a point that lies exactly on the boundary.
fn inflate(r2: f64) -> f64 {
    r2 * (1.0 + 1e-12) + 1e-9
}

/// The +-1 neighbours of `x` along each axis that stay in the value box and,
/// unless the observation is clipped, within `radius` of `center`.
pub fn neighbors(
    x: &[i32],
    center: &[f64],
    radius: f64,
    observed_clipped: bool,
    space: &SearchSpace,
) -> Vec<Vec<i32>> {
    let (lo, hi) = space.limits();
    let r = radius * (1.0 + 1e-12) + 1e-9;
    let mut out = Vec::new();
    for i in 0..x.len() {
        for d in [1, -1] {
            let v = x[i] + d;
            if v < lo || v > hi {
                continue;
            }
            let mut n = x.to_vec();
            n[i] = v;
            let nf: Vec<f64> = n.iter().map(|&a| a as f64).collect();
            if !observed_clipped && space.distance(&nf, center) > r {
                continue;
            }
            out.push(n);
        }
    }
    out
}

#[inline(always)]
fn mix(i: usize, v: i32) -> u64 {
    let mut z = ((i as u64) << 32 | v as u32 as u64).wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn hash_block(x: &[i32]) -> u64 {
    x.iter().enumerate().fold(0u64, |h, (i, &v)| h.wrapping_add(mix(i, v)))
}

/// A candidate stored as an expanded node plus one unit move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
struct Move {
    parent: u32,
    pos: u16,
    delta: i8,
}

/// Candidates already generated, keyed by an additive hash and confirmed by
/// full comparison so that distinct blocks are never conflated.
struct Visited {
    map: FxHashMap<u64, Move>,
    overflow: Vec<(u64, Move)>,
}

impl Visited {
    fn matches(m: Move, nodes: &[i32], n: usize, x: &[i32], pos: usize, v: i32) -> bool {
        let base = &nodes[m.parent as usize * n..(m.parent as usize + 1) * n];
        (0..n).all(|j| {
            let a = base[j] + if j == m.pos as usize { m.delta as i32 } else { 0 };
            let b = if j == pos { v } else { x[j] };
            a == b
        })
    }

    /// Records the candidate; returns false if it was already present.
    fn insert(&mut self, h: u64, m: Move, nodes: &[i32], n: usize, x: &[i32], pos: usize, v: i32) -> bool {
        match self.map.get(&h) {
            None => {
                self.map.insert(h, m);
                true
            }
            Some(&old) => {
                if Self::matches(old, nodes, n, x, pos, v) {
                    return false;
                }
                if self
                    .overflow
                    .iter()
                    .any(|&(oh, om)| oh == h && Self::matches(om, nodes, n, x, pos, v))
                {
                    return false;
                }
                self.overflow.push((h, m));
                true
            }
        }
    }
}

fn cost(norm: CostNorm, a: &[i32], b: &[i32]) -> u64 {
    let diffs = a.iter().zip(b).map(|(&x, &y)| (x as i64 - y as i64).unsigned_abs());
    match norm {
        CostNorm::L1 => diffs.sum(),
        CostNorm::Linf => diffs.max().unwrap_or(0),
    }
}

/// Searches for an input block that the pipeline maps exactly onto
/// `observed`.
pub fn find_antecedent(observed: &Block, pipeline: &Pipeline, config: &SearchConfig) -> Result<SearchOutcome> {
    search(observed, pipeline, config, |_| {})
}

/// Like [`find_antecedent`], also returning every tested candidate in order.
pub fn find_antecedent_traced(
    observed: &Block,
    pipeline: &Pipeline,
    config: &SearchConfig,
) -> Result<(SearchOutcome, Vec<Vec<i32>>)> {
    let mut seen = Vec::new();
    let outcome = search(observed, pipeline, config, |x| seen.push(x.to_vec()))?;
    Ok((outcome, seen))
}

fn search(
    observed: &Block,
    pipeline: &Pipeline,
    config: &SearchConfig,
    mut on_test: impl FnMut(&[i32]),
) -> Result<SearchOutcome> {
    if observed.domain() != pipeline.output_domain() {
        return Err(Error::DomainMismatch {
            expected: pipeline.output_domain().name(),
            got: observed.domain().name(),
        });
    }
    if observed.channels() != pipeline.channels() {
        return Err(Error::ChannelMismatch { expected: pipeline.channels(), got: observed.channels() });
    }
    let n = pipeline.block_len();
    let y = observed.to_ints();
    let trace = pipeline.backward_trace(&y);
    let clipped = pipeline.trace_clipped(&trace);
    let center = &trace[0];
    let space = SearchSpace::for_pipeline(pipeline);
    let (lo, hi) = space.limits();
    let radius2 = match config.bound {
        BoundMode::Enforced if !clipped => Some(inflate(pipeline.bound().powi(2))),
        _ => None,
    };

    let start: Vec<i32> = center.iter().map(|&c| (c.round() as i32).clamp(lo, hi)).collect();
    let mut out = vec![0i32; n];
    pipeline.forward_into(&start, &mut out);
    on_test(&start);
    let mut best = cost(config.norm, &out, &y);
    let finish = |verdict, antecedent: Option<Vec<i32>>, iterations, best, visited| -> Result<SearchOutcome> {
        let antecedent = match antecedent {
            Some(a) => Some(Block::from_ints(pipeline.input_domain(), pipeline.channels(), a)?),
            None => None,
        };
        Ok(SearchOutcome { verdict, antecedent, iterations, clipped, cost: best, visited })
    };
    if best == 0 {
        return finish(Verdict::Compatible, Some(start), 0, 0, 1);
    }

    // Node 0 is the start point; its move is the identity.
    let mut nodes: Vec<i32> = start.clone();
    let root = Move { parent: 0, pos: 0, delta: 0 };
    let mut visited = Visited { map: FxHashMap::default(), overflow: Vec::new() };
    visited.map.insert(hash_block(&start), root);
    let mut n_visited = 1usize;
    let mut heap = BinaryHeap::new();
    let mut seq = 0u64;
    heap.push(Reverse((best, seq, root)));

    let mut x = vec![0i32; n];
    let mut cand = vec![0i32; n];
    let mut xf = vec![0f64; n];
    let mut mixed = vec![0f64; n];
    let mut d2 = [0f64; 3];
    let mut k = 0u32;
    while let Some(Reverse((_, _, m))) = heap.pop() {
        if k >= config.max_iterations {
            return finish(Verdict::Unsolved, None, k, best, n_visited);
        }
        k += 1;

        let p = m.parent as usize;
        x.copy_from_slice(&nodes[p * n..(p + 1) * n]);
        x[m.pos as usize] += m.delta as i32;
        let id = if m.delta == 0 && p == 0 && k == 1 {
            0
        } else {
            nodes.extend_from_slice(&x);
            (nodes.len() / n - 1) as u32
        };
        let h = hash_block(&x);
        if radius2.is_some() {
            for i in 0..n {
                xf[i] = x[i] as f64;
            }
            d2 = space.residual(&xf, center, &mut mixed);
        }

        for i in 0..n {
            for d in [1i32, -1] {
                let v = x[i] + d;
                if v < lo || v > hi {
                    continue;
                }
                if let Some(r2) = radius2 {
                    if !space.step_ok(i, d as f64, &mixed, &d2, r2) {
                        continue;
                    }
                }
                let hv = h.wrapping_sub(mix(i, x[i])).wrapping_add(mix(i, v));
                let mv = Move { parent: id, pos: i as u16, delta: d as i8 };
                if !visited.insert(hv, mv, &nodes, n, &x, i, v) {
                    continue;
                }
                n_visited += 1;
                cand.copy_from_slice(&x);
                cand[i] = v;
                on_test(&cand);
                pipeline.forward_into(&cand, &mut out);
                let c = cost(config.norm, &out, &y);
                if c == 0 {
                    return finish(Verdict::Compatible, Some(cand), k, 0, n_visited);
                }
                best = best.min(c);
                seq += 1;
                heap.push(Reverse((c, seq, mv)));
            }
        }
    }
    let verdict = if radius2.is_some() { Verdict::Incompatible } else { Verdict::Unsolved };
    finish(verdict, None, k, best, n_visited)
}
