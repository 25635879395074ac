//! Batch experiments: forge a corpus, recompress, analyze, and score over a
//! grid of quality factors.

use serde::{Deserialize, Serialize};

use crate::codec::{CodecSettings, ColorImpl, DctImpl, QuantTable};
use crate::error::{Error, Result};
use crate::forensics::{analyze_image, build_mask, AnalysisReport, UnsolvedPolicy};
use crate::image::ImagePlane;
use crate::metrics::{evaluate, ConfusionCounts, Label};
use crate::pipeline::{make_pipeline, Pipeline, Stage};
use crate::scenarios::{forge, recompress_scenario, sample_forgery, synthetic_image, GroundTruth, SurrogateKind};
use crate::search::{SearchConfig, Verdict};

/// Which image of the double-compression chain is analyzed.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum Observation {
    /// Decompressed pixels (`D` for single, `F` for double compression).
    #[default]
    Pixels,
    /// Recompressed coefficients `E`; needs a second quality factor.
    Coefficients,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentConfig {
    pub qf1: Vec<u32>,
    /// Second quality factors; empty for single compression.
    pub qf2: Vec<u32>,
    pub forgery: SurrogateKind,
    pub observe: Observation,
    pub search: SearchConfig,
    pub policy: UnsolvedPolicy,
    pub dct: DctImpl,
    pub color: ColorImpl,
    pub workers: usize,
    pub seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            qf1: vec![60, 75, 90],
            qf2: vec![50, 60, 75, 90, 95],
            forgery: SurrogateKind::Blur,
            observe: Observation::Pixels,
            search: SearchConfig::default(),
            policy: UnsolvedPolicy::Manipulated,
            dct: DctImpl::IntegerSlow,
            color: ColorImpl::IntegerLibStyle,
            workers: 1,
            seed: 0,
        }
    }
}

/// Share of non-clipped blocks per verdict.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct VerdictRates {
    pub compatible: f64,
    pub incompatible: f64,
    pub unsolved: f64,
    /// Non-clipped blocks counted.
    pub blocks: u64,
    /// Clipped blocks left out.
    pub clipped: u64,
}

#[derive(Clone, Copy, Debug, Default)]
struct Tally {
    counts: [u64; 3],
    clipped: u64,
}

impl Tally {
    fn add(&mut self, verdict: Verdict, clipped: bool) {
        if clipped {
            self.clipped += 1;
            return;
        }
        self.counts[match verdict {
            Verdict::Compatible => 0,
            Verdict::Incompatible => 1,
            Verdict::Unsolved => 2,
        }] += 1;
    }

    fn rates(&self) -> VerdictRates {
        let n: u64 = self.counts.iter().sum();
        let f = |c: u64| if n == 0 { 0.0 } else { c as f64 / n as f64 };
        VerdictRates {
            compatible: f(self.counts[0]),
            incompatible: f(self.counts[1]),
            unsolved: f(self.counts[2]),
            blocks: n,
            clipped: self.clipped,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ImageScore {
    pub acc: f64,
    pub fpr: f64,
    pub inverted: bool,
    pub n_manipulated: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub qf1: u32,
    pub qf2: Option<u32>,
    /// Mean over images of the permuted block-level balanced accuracy.
    pub acc: f64,
    /// Mean over images of the false positive rate.
    pub fpr: f64,
    /// Confusion counts pooled over images, before permutation.
    pub counts: ConfusionCounts,
    pub manipulated: VerdictRates,
    pub authentic: VerdictRates,
    pub images: Vec<ImageScore>,
}

/// Share of authentic non-clipped blocks still unsolved after a number of
/// iterations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CdfPoint {
    pub iterations: u32,
    pub unsolved: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub n_images: usize,
    pub cells: Vec<CellReport>,
    pub iteration_cdf: Vec<CdfPoint>,
}

/// A seeded corpus of synthetic images.
pub fn synthetic_corpus(n: usize, width: usize, height: usize, channels: usize, seed: u64) -> Result<Vec<ImagePlane>> {
    (0..n).map(|i| synthetic_image(width, height, channels, seed.wrapping_add(i as u64 * 0x9E37_79B9))).collect()
}

fn stage_table(qf: u32, channels: usize) -> Result<QuantTable> {
    QuantTable::from_qf(qf, channels)
}

/// The analysis pipeline for a cell and observation.
pub fn cell_pipeline(cfg: &ExperimentConfig, channels: usize, qf1: u32, qf2: Option<u32>) -> Result<Pipeline> {
    let st = |qf| stage_table(qf, channels);
    let mut stages = vec![Stage::decompress(st(qf1)?, cfg.dct, cfg.color)];
    match (qf2, cfg.observe) {
        (None, Observation::Coefficients) => {
            return Err(Error::InvalidConfig("observing coefficients needs a second quality factor".into()))
        }
        (None, Observation::Pixels) => {}
        (Some(q2), obs) => {
            stages.push(Stage::compress(st(q2)?, cfg.dct, cfg.color));
            if obs == Observation::Pixels {
                stages.push(Stage::decompress(st(q2)?, cfg.dct, cfg.color));
            }
        }
    }
    make_pipeline(stages)
}

/// One forged, possibly recompressed image ready for analysis.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub observed: ImagePlane,
    pub truth: GroundTruth,
}

/// Builds the observation for image `index` of a cell: compress at `qf1`,
/// forge, optionally recompress at `qf2`.
pub fn build_scenario(
    original: &ImagePlane,
    index: usize,
    cfg: &ExperimentConfig,
    qf1: u32,
    qf2: Option<u32>,
) -> Result<Scenario> {
    let ch = original.channels();
    let w = original.width() / 8 * 8;
    let h = original.height() / 8 * 8;
    let a = original.cropped(w, h)?;
    let s1 = CodecSettings::new(stage_table(qf1, ch)?, cfg.dct, cfg.color);
    let (_, c) = recompress_scenario(&a, &s1)?;
    let spec = sample_forgery(cfg.forgery, w, h, cfg.seed ^ (index as u64).wrapping_mul(0xA24B_AED4_963E_E407));
    let (d, truth) = forge(&c, &spec, &s1, None)?;
    let observed = match qf2 {
        None => d,
        Some(q2) => {
            let s2 = CodecSettings::new(stage_table(q2, ch)?, cfg.dct, cfg.color);
            let (e, f) = recompress_scenario(&d, &s2)?;
            match cfg.observe {
                Observation::Pixels => f,
                Observation::Coefficients => e,
            }
        }
    };
    Ok(Scenario { observed, truth })
}

/// Scores one analyzed image against its ground truth.
pub fn score_image(report: &AnalysisReport, truth: &GroundTruth, policy: UnsolvedPolicy) -> Result<ImageScore> {
    let mask = build_mask(report, policy);
    let (pred, t) = mask.scored_pairs(&truth.labels);
    let e = evaluate(&pred, &t, true)?;
    Ok(ImageScore { acc: e.acc, fpr: e.fpr, inverted: e.inverted, n_manipulated: truth.n_manipulated() })
}

const CDF_STEPS: [u32; 14] = [0, 1, 2, 5, 10, 20, 50, 100, 200, 500, 1000, 2000, 5000, 10000];

/// Unsolved share of authentic non-clipped blocks at standard iteration
/// checkpoints up to `max_iterations`.
pub fn iteration_cdf(iterations: &[Option<u32>], max_iterations: u32) -> Vec<CdfPoint> {
    let mut steps: Vec<u32> = CDF_STEPS.iter().copied().filter(|&k| k < max_iterations).collect();
    steps.push(max_iterations);
    steps
        .into_iter()
        .map(|k| {
            let open = iterations.iter().filter(|it| !matches!(it, Some(i) if *i <= k)).count();
            let unsolved = if iterations.is_empty() { 0.0 } else { open as f64 / iterations.len() as f64 };
            CdfPoint { iterations: k, unsolved }
        })
        .collect()
}

/// Runs the full grid on `corpus` (original, uncompressed images).
pub fn run_experiment(corpus: &[ImagePlane], cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidConfig("empty corpus".into()));
    }
    if cfg.qf1.is_empty() {
        return Err(Error::InvalidConfig("no first quality factor".into()));
    }
    let qf2s: Vec<Option<u32>> =
        if cfg.qf2.is_empty() { vec![None] } else { cfg.qf2.iter().map(|&q| Some(q)).collect() };
    let mut cells = Vec::new();
    let mut authentic_iterations = Vec::new();
    for &qf1 in &cfg.qf1 {
        for &qf2 in &qf2s {
            let mut images = Vec::with_capacity(corpus.len());
            let (mut manip, mut auth) = (Tally::default(), Tally::default());
            let mut counts = ConfusionCounts::default();
            for (i, original) in corpus.iter().enumerate() {
                let sc = build_scenario(original, i, cfg, qf1, qf2)?;
                let pipeline = cell_pipeline(cfg, original.channels(), qf1, qf2)?;
                let report = analyze_image(&sc.observed, &pipeline, &cfg.search, cfg.workers)?;
                for (b, &label) in report.blocks.iter().zip(&sc.truth.labels) {
                    if label == Label::Manipulated {
                        manip.add(b.verdict, b.clipped);
                    } else {
                        auth.add(b.verdict, b.clipped);
                        if !b.clipped {
                            authentic_iterations.push((b.verdict == Verdict::Compatible).then_some(b.iterations));
                        }
                    }
                }
                let mask = build_mask(&report, cfg.policy);
                let (pred, truth) = mask.scored_pairs(&sc.truth.labels);
                let raw = evaluate(&pred, &truth, false)?.counts;
                counts.tp += raw.tp;
                counts.fp += raw.fp;
                counts.tn += raw.tn;
                counts.fn_ += raw.fn_;
                images.push(score_image(&report, &sc.truth, cfg.policy)?);
            }
            let n = images.len() as f64;
            cells.push(CellReport {
                qf1,
                qf2,
                acc: images.iter().map(|s| s.acc).sum::<f64>() / n,
                fpr: images.iter().map(|s| s.fpr).sum::<f64>() / n,
                counts,
                manipulated: manip.rates(),
                authentic: auth.rates(),
                images,
            });
        }
    }
    Ok(ExperimentReport {
        config: cfg.clone(),
        n_images: corpus.len(),
        cells,
        iteration_cdf: iteration_cdf(&authentic_iterations, cfg.search.max_iterations),
    })
}

/// Plain-text table: one ACC row and one FPR row per first quality factor,
/// in percent. Cells whose second quality factor is below the first are
/// marked with `*`.
pub fn format_table(report: &ExperimentReport) -> String {
    let mut qf2s: Vec<Option<u32>> = Vec::new();
    for c in &report.cells {
        if !qf2s.contains(&c.qf2) {
            qf2s.push(c.qf2);
        }
    }
    let mut out = String::from("QF1  metric");
    for q in &qf2s {
        match q {
            Some(q) => out.push_str(&format!(" {:>8}", format!("QF2={q}"))),
            None => out.push_str(&format!(" {:>8}", "single")),
        }
    }
    out.push('\n');
    let mut qf1s: Vec<u32> = report.cells.iter().map(|c| c.qf1).collect();
    qf1s.dedup();
    for qf1 in qf1s {
        for (name, get) in [("ACC", (|c: &CellReport| c.acc) as fn(&CellReport) -> f64), ("FPR", |c| c.fpr)] {
            out.push_str(&format!("{qf1:<4} {name:<6}"));
            for q in &qf2s {
                let cell = report.cells.iter().find(|c| c.qf1 == qf1 && c.qf2 == *q);
                match cell {
                    Some(c) => {
                        let mark = if c.qf2.is_some_and(|q2| q2 < qf1) { "*" } else { " " };
                        out.push_str(&format!(" {:>7.1}{mark}", 100.0 * get(c)));
                    }
                    None => out.push_str(&format!(" {:>8}", "-")),
                }
            }
            out.push('\n');
        }
    }
    out
}

/// Verdict rate grids (manipulated and authentic blocks) as text.
pub fn format_rates(report: &ExperimentReport) -> String {
    let mut out = String::from("QF1  QF2    | manipulated: comp   incomp unsolved | authentic: comp   incomp unsolved\n");
    for c in &report.cells {
        let q2 = c.qf2.map_or("-".to_string(), |q| q.to_string());
        let (m, a) = (&c.manipulated, &c.authentic);
        out.push_str(&format!(
            "{:<4} {:<6} |              {:>5.3}  {:>5.3}  {:>5.3}    |             {:>5.3}  {:>5.3}  {:>5.3}\n",
            c.qf1, q2, m.compatible, m.incompatible, m.unsolved, a.compatible, a.incompatible, a.unsolved
        ));
    }
    out
}
