//! Subcommand implementations.

use std::path::{Path, PathBuf};
use std::time::Instant;

use jpegcompat::experiment::{format_rates, format_table, run_experiment, synthetic_corpus, ExperimentConfig};
use jpegcompat::forensics::Mask;
use jpegcompat::io::{encode_jpeg, parse_jpeg, read_png, render_binary_mask, render_verdict_mask, write_png, EncodeOptions};
use jpegcompat::scenarios::{sample_forgery, SurrogateKind};
use jpegcompat::{
    analyze_image, build_mask, compress_image, decompress_image, recompress_scenario, synthetic_image,
    AnalysisReport, BlockReport, CodecSettings, ForgerySpec, GroundTruth, ImagePlane, Label, MaskLabel, QuantTable,
    StageKind, Verdict,
};
use serde::{Deserialize, Serialize};

use crate::config::{RunConfig, StageConfig};
use crate::output::{read, sibling, write_atomic, write_json};
use crate::{AnalyzeArgs, BenchArgs, CliError, ExperimentArgs, ForgeArgs, ObserveArg};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Serialize, Deserialize, Debug)]
pub struct Grid {
    pub w: usize,
    pub h: usize,
}

#[derive(Serialize, Deserialize, Debug)]
pub struct Summary {
    pub n_compatible: usize,
    pub n_incompatible: usize,
    pub n_unsolved: usize,
    pub wall_time_ms: u128,
}

/// The analysis report written next to the masks.
#[derive(Serialize, Deserialize, Debug)]
pub struct Report {
    pub schema_version: u32,
    pub config: RunConfig,
    pub observation: String,
    pub grid: Grid,
    pub blocks: Vec<BlockReport>,
    pub summary: Summary,
}

fn is_jpeg(path: &Path) -> bool {
    matches!(
        path.extension().and_then(|e| e.to_str()).map(str::to_ascii_lowercase).as_deref(),
        Some("jpg" | "jpeg" | "jpe" | "jfif")
    )
}

/// A JPEG file as coefficients plus its table, or a PNG as pixels.
enum Loaded {
    Jpeg { coefs: ImagePlane, table: QuantTable },
    Pixels(ImagePlane),
}

fn load(path: &Path) -> Result<Loaded, CliError> {
    let bytes = read(path)?;
    if is_jpeg(path) {
        let model = parse_jpeg(&bytes)?;
        Ok(Loaded::Jpeg { coefs: model.to_coef_image()?, table: model.quant_table()? })
    } else {
        Ok(Loaded::Pixels(read_png(&bytes)?))
    }
}

fn default_stage(kind: StageKind, qf: Option<u32>, table: Option<Vec<u16>>, a: &AnalyzeArgs) -> StageConfig {
    StageConfig { kind, qf, table, dct: a.dct.into(), color: a.color.into() }
}

pub fn analyze(a: AnalyzeArgs) -> Result<(), CliError> {
    let mut cfg = match &a.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    a.search.apply(&mut cfg);
    cfg.input = Some(a.input.clone());
    if a.out_dir.is_some() {
        cfg.output_dir = a.out_dir.clone();
    }
    cfg.validate()?;

    let observe = match a.observe {
        ObserveArg::Auto if is_jpeg(&a.input) => ObserveArg::Coefficients,
        ObserveArg::Auto => ObserveArg::Pixels,
        o => o,
    };
    let (image, file_table) = match (load(&a.input)?, observe) {
        (Loaded::Jpeg { coefs, table }, ObserveArg::Coefficients) => (coefs, Some(table)),
        (Loaded::Jpeg { coefs, table }, _) => {
            let settings = CodecSettings::new(table, Default::default(), Default::default());
            (decompress_image(&coefs, &settings)?, None)
        }
        (Loaded::Pixels(_), ObserveArg::Coefficients) => {
            return Err(CliError::Config("coefficient observation needs a JPEG input".into()))
        }
        (Loaded::Pixels(img), _) => (img, None),
    };

    if cfg.pipeline.is_empty() {
        let file_steps = file_table.as_ref().map(|t| t.steps().to_vec());
        cfg.pipeline = match (a.qf, file_steps) {
            (Some(qf), None) => vec![default_stage(StageKind::Decompress, Some(qf), None, &a)],
            (Some(qf), Some(steps)) => vec![
                default_stage(StageKind::Decompress, Some(qf), None, &a),
                default_stage(StageKind::Compress, None, Some(steps), &a),
            ],
            (None, Some(steps)) => vec![default_stage(StageKind::Compress, None, Some(steps), &a)],
            (None, None) => {
                return Err(CliError::Config("no pipeline: pass --qf or a config with [[pipeline]] stages".into()))
            }
        };
    }
    let pipeline = cfg.build_pipeline(image.channels())?;

    let start = Instant::now();
    let report = analyze_image(&image, &pipeline, &cfg.search.search_config(), cfg.workers)?;
    let wall_time_ms = start.elapsed().as_millis();
    let mask = build_mask(&report, cfg.search.unsolved_policy);

    let out_dir = cfg.output_dir.clone();
    let summary = Summary {
        n_compatible: report.count(Verdict::Compatible),
        n_incompatible: report.count(Verdict::Incompatible),
        n_unsolved: report.count(Verdict::Unsolved),
        wall_time_ms,
    };
    println!(
        "{}: {} blocks, {} compatible, {} incompatible, {} unsolved in {} ms",
        a.input.display(),
        report.blocks.len(),
        summary.n_compatible,
        summary.n_incompatible,
        summary.n_unsolved,
        wall_time_ms
    );
    let doc = Report {
        schema_version: SCHEMA_VERSION,
        config: cfg,
        observation: match observe {
            ObserveArg::Coefficients => "coefficients".into(),
            _ => "pixels".into(),
        },
        grid: Grid { w: report.grid_w, h: report.grid_h },
        blocks: report.blocks,
        summary,
    };
    let dir = out_dir.as_deref();
    write_atomic(&sibling(&a.input, dir, "mask.png"), &render_verdict_mask(&mask)?)?;
    write_atomic(&sibling(&a.input, dir, "binary.png"), &render_binary_mask(&mask)?)?;
    write_json(&sibling(&a.input, dir, "report.json"), &doc)?;
    Ok(())
}

fn load_spec(path: &Path) -> Result<ForgerySpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let parsed = if path.extension().is_some_and(|e| e == "json") {
        serde_json::from_str(&text).map_err(|e| e.to_string())
    } else {
        toml::from_str(&text).map_err(|e| e.to_string())
    };
    parsed.map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn surrogate(name: &str) -> SurrogateKind {
    if name == "shift" {
        SurrogateKind::Shift
    } else {
        SurrogateKind::Blur
    }
}

fn truth_mask(truth: &GroundTruth) -> Mask {
    let manipulated = |l: &Label| *l == Label::Manipulated;
    Mask {
        grid_w: truth.grid_w,
        grid_h: truth.grid_h,
        labels: truth
            .labels
            .iter()
            .map(|l| if manipulated(l) { MaskLabel::Manipulated } else { MaskLabel::Authentic })
            .collect(),
        verdicts: truth
            .labels
            .iter()
            .map(|l| if manipulated(l) { Verdict::Incompatible } else { Verdict::Compatible })
            .collect(),
    }
}

#[derive(Serialize)]
struct TruthSidecar<'a> {
    schema_version: u32,
    spec: &'a ForgerySpec,
    qf1: Option<u32>,
    qf2: Option<u32>,
    truth: &'a GroundTruth,
}

pub fn forge(a: ForgeArgs) -> Result<(), CliError> {
    let (host_img, host) = match load(&a.input)? {
        Loaded::Jpeg { coefs, table } => {
            let settings = CodecSettings::new(table, Default::default(), Default::default());
            (decompress_image(&coefs, &settings)?, settings)
        }
        Loaded::Pixels(img) => {
            let qf1 = a.qf1.ok_or_else(|| CliError::Config("PNG hosts need --qf1".into()))?;
            let settings = CodecSettings::from_qf(qf1, img.channels())?;
            let img = img.cropped(img.width() / 8 * 8, img.height() / 8 * 8)?;
            if a.decompressed {
                (img, settings)
            } else {
                (decompress_image(&compress_image(&img, &settings)?, &settings)?, settings)
            }
        }
    };
    let spec = match (&a.spec, &a.random) {
        (Some(p), None) => load_spec(p)?,
        (None, Some(kind)) => sample_forgery(surrogate(kind), host_img.width(), host_img.height(), a.seed),
        _ => return Err(CliError::Config("pass exactly one of --spec or --random".into())),
    };
    let (d, truth) = jpegcompat::forge(&host_img, &spec, &host, None)?;
    let dir = a.out_dir.as_deref();
    write_atomic(&sibling(&a.input, dir, "forged.png"), &write_png(&d)?)?;
    write_atomic(&sibling(&a.input, dir, "truth.png"), &render_binary_mask(&truth_mask(&truth))?)?;
    if let Some(qf2) = a.qf2 {
        let s2 = CodecSettings::from_qf(qf2, d.channels())?;
        let (e, f) = recompress_scenario(&d, &s2)?;
        let jpeg = encode_jpeg(&e, &s2.table, &EncodeOptions::default())?;
        write_atomic(&sibling(&a.input, dir, "recompressed.jpg"), &jpeg)?;
        write_atomic(&sibling(&a.input, dir, "recompressed.png"), &write_png(&f)?)?;
    }
    let sidecar = TruthSidecar { schema_version: SCHEMA_VERSION, spec: &spec, qf1: a.qf1, qf2: a.qf2, truth: &truth };
    write_json(&sibling(&a.input, dir, "truth.json"), &sidecar)?;
    println!("{}: {} manipulated blocks", a.input.display(), truth.n_manipulated());
    Ok(())
}

/// Where the experiment images come from.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorpusConfig {
    /// Directory of PNG originals; synthetic images when absent.
    pub dir: Option<PathBuf>,
    pub images: usize,
    pub width: usize,
    pub height: usize,
    pub channels: usize,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig { dir: None, images: 20, width: 256, height: 256, channels: 1 }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ExperimentFile {
    pub corpus: CorpusConfig,
    #[serde(flatten)]
    pub experiment: ExperimentConfig,
}

fn load_corpus(c: &CorpusConfig, seed: u64) -> Result<Vec<ImagePlane>, CliError> {
    match &c.dir {
        Some(dir) => {
            let entries = std::fs::read_dir(dir).map_err(|e| CliError::io(dir, e))?;
            let mut paths: Vec<PathBuf> = entries
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.extension().is_some_and(|x| x.eq_ignore_ascii_case("png")))
                .collect();
            paths.sort();
            if paths.is_empty() {
                return Err(CliError::Config(format!("empty corpus: no PNG files in {}", dir.display())));
            }
            paths.iter().map(|p| Ok(read_png(&read(p)?)?)).collect()
        }
        None => {
            if c.images == 0 {
                return Err(CliError::Config("empty corpus".into()));
            }
            Ok(synthetic_corpus(c.images, c.width, c.height, c.channels, seed)?)
        }
    }
}

pub fn experiment(a: ExperimentArgs) -> Result<(), CliError> {
    let mut file = match &a.config {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| CliError::io(p, e))?;
            toml::from_str::<ExperimentFile>(&text).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => ExperimentFile::default(),
    };
    let (c, e) = (&mut file.corpus, &mut file.experiment);
    if let Some(d) = &a.corpus {
        c.dir = Some(d.clone());
    }
    if let Some(n) = a.images {
        c.images = n;
    }
    if let Some(s) = &a.size {
        let (w, h) = s
            .split_once('x')
            .and_then(|(w, h)| Some((w.parse().ok()?, h.parse().ok()?)))
            .ok_or_else(|| CliError::Config(format!("bad --size {s}, expected WIDTHxHEIGHT")))?;
        c.width = w;
        c.height = h;
    }
    if let Some(ch) = a.channels {
        c.channels = ch;
    }
    if let Some(q) = &a.qf1 {
        e.qf1 = q.clone();
    }
    if let Some(q) = &a.qf2 {
        e.qf2 = if q == "none" {
            Vec::new()
        } else {
            q.split(',')
                .map(|v| v.trim().parse().map_err(|_| CliError::Config(format!("bad --qf2 value {v}"))))
                .collect::<Result<_, _>>()?
        };
    }
    if let Some(f) = &a.forgery {
        e.forgery = surrogate(f);
    }
    if let Some(s) = a.seed {
        e.seed = s;
    }
    let mut run = RunConfig { search: crate::config::SearchSettings { unsolved_policy: e.policy, ..Default::default() }, ..Default::default() };
    run.search.max_iterations = e.search.max_iterations;
    run.search.norm = e.search.norm;
    run.search.bound = e.search.bound;
    run.workers = e.workers.max(1);
    a.search.apply(&mut run);
    run.validate()?;
    e.search = run.search.search_config();
    e.policy = run.search.unsolved_policy;
    e.workers = run.workers;

    let corpus = load_corpus(c, e.seed)?;
    let report = run_experiment(&corpus, e)?;
    let mut text = format_table(&report);
    text.push('\n');
    text.push_str(&format_rates(&report));
    text.push_str("\nunsolved share of authentic blocks by iteration\n");
    for p in &report.iteration_cdf {
        text.push_str(&format!("{:>6} {:.5}\n", p.iterations, p.unsolved));
    }
    print!("{text}");
    #[derive(Serialize)]
    struct Doc<'a> {
        schema_version: u32,
        corpus: &'a CorpusConfig,
        #[serde(flatten)]
        report: &'a jpegcompat::experiment::ExperimentReport,
    }
    write_json(&a.out_dir.join("experiment.json"), &Doc { schema_version: SCHEMA_VERSION, corpus: c, report: &report })?;
    write_atomic(&a.out_dir.join("tables.txt"), text.as_bytes())?;
    Ok(())
}

pub fn bench(a: BenchArgs) -> Result<(), CliError> {
    if a.size == 0 || !a.size.is_multiple_of(8) {
        return Err(CliError::Config("--size must be a positive multiple of 8".into()));
    }
    let settings = CodecSettings::from_qf(a.qf, a.channels)?;
    let original = synthetic_image(a.size, a.size, a.channels, a.seed)?;
    let (_, authentic) = recompress_scenario(&original, &settings)?;
    let spec = sample_forgery(SurrogateKind::Blur, a.size, a.size, a.seed);
    let (forged, truth) = jpegcompat::forge(&authentic, &spec, &settings, None)?;
    let pipeline = jpegcompat::make_pipeline(vec![jpegcompat::Stage::decompress(
        settings.table.clone(),
        settings.dct,
        settings.color,
    )])?;
    let cfg = jpegcompat::SearchConfig { max_iterations: a.iterations, ..Default::default() };
    for (name, img) in [("authentic", &authentic), ("forged", &forged)] {
        let start = Instant::now();
        let report: AnalysisReport = analyze_image(img, &pipeline, &cfg, a.workers)?;
        let secs = start.elapsed().as_secs_f64();
        let compatible: Vec<&BlockReport> = report.blocks.iter().filter(|b| b.verdict == Verdict::Compatible).collect();
        let mean_it = if compatible.is_empty() {
            0.0
        } else {
            compatible.iter().map(|b| b.iterations as f64).sum::<f64>() / compatible.len() as f64
        };
        println!(
            "{name:<9} {} blocks in {:.3} s ({:.0} blocks/s): {} compatible (mean {:.2} iterations), {} incompatible, {} unsolved",
            report.blocks.len(),
            secs,
            report.blocks.len() as f64 / secs.max(1e-9),
            compatible.len(),
            mean_it,
            report.count(Verdict::Incompatible),
            report.count(Verdict::Unsolved)
        );
    }
    println!("forged region covers {} blocks", truth.n_manipulated());
    Ok(())
}
