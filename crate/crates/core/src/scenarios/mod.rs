//! Forgery simulator: grid-shift, blur, copy-move and splice manipulations
//! with exact block-level ground truth, plus recompression.

pub mod synth;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::codec::{CodecSettings, ColorImpl, DctImpl, Domain, QuantTable};
use crate::error::{Error, Result};
use crate::image::{compress_image, decompress_image, ImagePlane};
use crate::metrics::Label;
pub use synth::synthetic_image;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Rect {
    pub x: usize,
    pub y: usize,
    pub w: usize,
    pub h: usize,
}

impl Rect {
    pub fn is_aligned(&self) -> bool {
        self.x.is_multiple_of(8) && self.y.is_multiple_of(8) && self.w.is_multiple_of(8) && self.h.is_multiple_of(8)
    }

    pub fn contains(&self, x: usize, y: usize) -> bool {
        x >= self.x && x < self.x + self.w && y >= self.y && y < self.y + self.h
    }

    fn fits(&self, width: usize, height: usize) -> bool {
        self.w > 0 && self.h > 0 && self.x + self.w <= width && self.y + self.h <= height
    }
}

/// Codec used to produce spliced content.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DonorSpec {
    pub qf: u32,
    #[serde(default)]
    pub dct: DctImpl,
    #[serde(default)]
    pub color: ColorImpl,
    /// Donor pixel `(x + offset_x, y + offset_y)` lands on host pixel `(x, y)`.
    #[serde(default)]
    pub offset_x: i64,
    #[serde(default)]
    pub offset_y: i64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ForgeryKind {
    /// Region filled from the host at offset `(dx, dy)`.
    GridShift { dx: i64, dy: i64 },
    /// Region replaced by its box blur.
    Blur {
        #[serde(default = "default_blur_radius")]
        radius: usize,
    },
    /// Region filled from the host starting at `(src_x, src_y)`.
    CopyMove { src_x: usize, src_y: usize },
    /// Region filled from a donor image compressed and decompressed with
    /// `donor`.
    Splice { donor: DonorSpec },
}

fn default_blur_radius() -> usize {
    2
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForgerySpec {
    pub kind: ForgeryKind,
    pub region: Rect,
    #[serde(default)]
    pub aligned: bool,
    #[serde(default)]
    pub seed: u64,
}

/// Why a manipulated block is (or is not) detectable.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MismatchClass {
    Grid,
    Quantization,
    Pipeline,
    /// Aligned content from an identical pipeline: no mismatch.
    None,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub grid_w: usize,
    pub grid_h: usize,
    /// Row-major block labels.
    pub labels: Vec<Label>,
    /// Mismatch class of each manipulated block; `None` for authentic ones.
    pub classes: Vec<Option<MismatchClass>>,
}

impl GroundTruth {
    pub fn n_manipulated(&self) -> usize {
        self.labels.iter().filter(|&&l| l == Label::Manipulated).count()
    }
}

fn offset_of(spec: &ForgerySpec) -> Option<(i64, i64)> {
    match &spec.kind {
        ForgeryKind::GridShift { dx, dy } => Some((*dx, *dy)),
        ForgeryKind::Blur { .. } => None,
        ForgeryKind::CopyMove { src_x, src_y } => {
            Some((*src_x as i64 - spec.region.x as i64, *src_y as i64 - spec.region.y as i64))
        }
        ForgeryKind::Splice { donor } => Some((donor.offset_x, donor.offset_y)),
    }
}

fn validate(spec: &ForgerySpec, width: usize, height: usize) -> Result<()> {
    let r = spec.region;
    if !r.fits(width, height) {
        return Err(Error::InvalidGeometry(format!("region {r:?} outside {width}x{height} image")));
    }
    let offset = offset_of(spec);
    if let ForgeryKind::GridShift { dx, dy } = spec.kind {
        if dx.rem_euclid(8) == 0 && dy.rem_euclid(8) == 0 {
            return Err(Error::InvalidConfig("grid shift must not be a multiple of 8".into()));
        }
    }
    if let ForgeryKind::Blur { radius } = spec.kind {
        if radius == 0 {
            return Err(Error::InvalidConfig("blur radius must be at least 1".into()));
        }
    }
    if let (Some((dx, dy)), false) = (offset, matches!(spec.kind, ForgeryKind::Splice { .. })) {
        let (x0, y0) = (r.x as i64 + dx, r.y as i64 + dy);
        if x0 < 0 || y0 < 0 || x0 + r.w as i64 > width as i64 || y0 + r.h as i64 > height as i64 {
            return Err(Error::InvalidGeometry("source region outside image".into()));
        }
    }
    if spec.aligned {
        let phase_ok = offset.is_none_or(|(dx, dy)| dx.rem_euclid(8) == 0 && dy.rem_euclid(8) == 0);
        if !r.is_aligned() || !phase_ok {
            return Err(Error::InvalidGeometry(
                "aligned forgery needs a block-aligned region and a zero grid offset".into(),
            ));
        }
    }
    Ok(())
}

/// Applies a forgery to the decompressed host `img_c`, whose codec is
/// `host`. Splices draw on `donor` or, when absent, a synthetic image seeded
/// by `spec.seed`.
pub fn forge(
    img_c: &ImagePlane,
    spec: &ForgerySpec,
    host: &CodecSettings,
    donor: Option<&ImagePlane>,
) -> Result<(ImagePlane, GroundTruth)> {
    if img_c.domain() != Domain::Pixel {
        return Err(Error::DomainMismatch { expected: "pixel", got: img_c.domain().name() });
    }
    let (w, h, ch) = (img_c.width(), img_c.height(), img_c.channels());
    if w % 8 != 0 || h % 8 != 0 {
        return Err(Error::InvalidGeometry(format!("{w}x{h} is not a multiple of 8")));
    }
    validate(spec, w, h)?;
    let r = spec.region;
    let mut d = img_c.clone();

    match &spec.kind {
        ForgeryKind::GridShift { dx, dy } => copy_region(img_c, &mut d, r, *dx, *dy),
        ForgeryKind::CopyMove { src_x, src_y } => {
            copy_region(img_c, &mut d, r, *src_x as i64 - r.x as i64, *src_y as i64 - r.y as i64)
        }
        ForgeryKind::Blur { radius } => {
            let rad = *radius as i64;
            for c in 0..ch {
                for y in r.y..r.y + r.h {
                    for x in r.x..r.x + r.w {
                        let (mut sum, mut n) = (0i64, 0i64);
                        for yy in (y as i64 - rad).max(0)..=(y as i64 + rad).min(h as i64 - 1) {
                            for xx in (x as i64 - rad).max(0)..=(x as i64 + rad).min(w as i64 - 1) {
                                sum += img_c.get(c, xx as usize, yy as usize) as i64;
                                n += 1;
                            }
                        }
                        d.set(c, x, y, ((sum + n / 2) / n) as i32);
                    }
                }
            }
        }
        ForgeryKind::Splice { donor: ds } => {
            let donor_table = QuantTable::from_qf(ds.qf, ch)?;
            let settings = CodecSettings::new(donor_table, ds.dct, ds.color);
            let owned;
            let source = match donor {
                Some(img) => img,
                None => {
                    owned = synthetic_image(w, h, ch, spec.seed ^ 0xD0_40_0D)?;
                    &owned
                }
            };
            if source.channels() != ch || source.domain() != Domain::Pixel {
                return Err(Error::InvalidConfig("donor must be a pixel image with the host's channels".into()));
            }
            let (x0, y0) = (r.x as i64 + ds.offset_x, r.y as i64 + ds.offset_y);
            if x0 < 0
                || y0 < 0
                || x0 + r.w as i64 > source.width() as i64
                || y0 + r.h as i64 > source.height() as i64
            {
                return Err(Error::InvalidGeometry("donor region outside donor image".into()));
            }
            let sw = source.width() / 8 * 8;
            let sh = source.height() / 8 * 8;
            let decoded = decompress_image(&compress_image(&source.cropped(sw, sh)?, &settings)?, &settings)?;
            if x0 + r.w as i64 > sw as i64 || y0 + r.h as i64 > sh as i64 {
                return Err(Error::InvalidGeometry("donor region outside donor image".into()));
            }
            copy_region(&decoded, &mut d, r, ds.offset_x, ds.offset_y);
        }
    }

    let truth = ground_truth(img_c, &d, spec, host);
    Ok((d, truth))
}

fn copy_region(src: &ImagePlane, dst: &mut ImagePlane, r: Rect, dx: i64, dy: i64) {
    for c in 0..src.channels() {
        for y in r.y..r.y + r.h {
            for x in r.x..r.x + r.w {
                let v = src.get(c, (x as i64 + dx) as usize, (y as i64 + dy) as usize);
                dst.set(c, x, y, v);
            }
        }
    }
}

fn ground_truth(c: &ImagePlane, d: &ImagePlane, spec: &ForgerySpec, host: &CodecSettings) -> GroundTruth {
    let (gw, gh) = c.grid();
    let r = spec.region;
    let in_phase = offset_of(spec).is_some_and(|(dx, dy)| dx.rem_euclid(8) == 0 && dy.rem_euclid(8) == 0);
    let aligned_class = match &spec.kind {
        ForgeryKind::CopyMove { .. } => MismatchClass::None,
        ForgeryKind::Splice { donor } => {
            let table = QuantTable::from_qf(donor.qf, c.channels()).ok();
            if table.as_ref() != Some(&host.table) {
                MismatchClass::Quantization
            } else if donor.dct != host.dct || (c.channels() == 3 && donor.color != host.color) {
                MismatchClass::Pipeline
            } else {
                MismatchClass::None
            }
        }
        _ => MismatchClass::Grid,
    };
    let mut labels = vec![Label::Authentic; gw * gh];
    let mut classes = vec![None; gw * gh];
    for by in 0..gh {
        for bx in 0..gw {
            let changed = (0..c.channels()).any(|ch| {
                (0..8).any(|j| (0..8).any(|i| c.get(ch, bx * 8 + i, by * 8 + j) != d.get(ch, bx * 8 + i, by * 8 + j)))
            });
            if !changed {
                continue;
            }
            let covered = r.contains(bx * 8, by * 8) && r.contains(bx * 8 + 7, by * 8 + 7);
            let idx = by * gw + bx;
            labels[idx] = Label::Manipulated;
            classes[idx] = Some(if covered && in_phase { aligned_class } else { MismatchClass::Grid });
        }
    }
    GroundTruth { grid_w: gw, grid_h: gh, labels, classes }
}

/// Second compression of a (possibly forged) image: returns the
/// coefficient image `E` and its decompression `F`.
pub fn recompress_scenario(img_d: &ImagePlane, settings: &CodecSettings) -> Result<(ImagePlane, ImagePlane)> {
    let e = compress_image(img_d, settings)?;
    let f = decompress_image(&e, settings)?;
    Ok((e, f))
}

/// Seeded rectangle covering 5-20% of the image, with aspect ratio in
/// [1/2, 2]. `aligned` snaps it to the block grid.
pub fn sample_region(width: usize, height: usize, aligned: bool, rng: &mut impl Rng) -> Rect {
    let area = rng.random_range(0.05..0.20) * (width * height) as f64;
    let aspect = rng.random_range(-std::f64::consts::LN_2..std::f64::consts::LN_2).exp();
    let mut w = ((area * aspect).sqrt().round() as usize).clamp(1, width);
    let mut h = ((area / w as f64).round() as usize).clamp(1, height);
    if aligned {
        w = (w / 8).max(1) * 8;
        h = (h / 8).max(1) * 8;
        w = w.min(width / 8 * 8);
        h = h.min(height / 8 * 8);
    }
    let mut x = rng.random_range(0..=width - w);
    let mut y = rng.random_range(0..=height - h);
    if aligned {
        x = x / 8 * 8;
        y = y / 8 * 8;
    }
    Rect { x, y, w, h }
}

/// Surrogate manipulations used in batch experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SurrogateKind {
    #[default]
    Blur,
    Shift,
}

/// A seeded blur or grid-shift forgery on a `width x height` image.
pub fn sample_forgery(kind: SurrogateKind, width: usize, height: usize, seed: u64) -> ForgerySpec {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    match kind {
        SurrogateKind::Blur => {
            let region = sample_region(width, height, false, &mut rng);
            ForgerySpec { kind: ForgeryKind::Blur { radius: default_blur_radius() }, region, aligned: false, seed }
        }
        SurrogateKind::Shift => loop {
            let region = sample_region(width, height, false, &mut rng);
            let dx: i64 = rng.random_range(-12..=12);
            let dy: i64 = rng.random_range(-12..=12);
            if dx.rem_euclid(8) == 0 && dy.rem_euclid(8) == 0 {
                continue;
            }
            let spec = ForgerySpec { kind: ForgeryKind::GridShift { dx, dy }, region, aligned: false, seed };
            if validate(&spec, width, height).is_ok() {
                break spec;
            }
        },
    }
}
