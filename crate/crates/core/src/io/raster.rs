//! Lossless 8-bit PNG rasters and mask rendering.

use crate::codec::Domain;
use crate::error::{Error, Result};
use crate::forensics::{Mask, MaskLabel};
use crate::image::ImagePlane;
use crate::search::Verdict;

/// Verdict mask palette: compatible, incompatible, unsolved.
pub const MASK_PALETTE: [[u8; 3]; 3] = [[70, 110, 200], [220, 30, 30], [255, 150, 200]];

fn png_error(e: png::DecodingError) -> Error {
    match e {
        png::DecodingError::IoError(io) => Error::Io(io),
        other => Error::Malformed(format!("PNG: {other}")),
    }
}

/// Reads an 8-bit grayscale or RGB PNG.
pub fn read_png(bytes: &[u8]) -> Result<ImagePlane> {
    let decoder = png::Decoder::new(std::io::Cursor::new(bytes));
    let mut reader = decoder.read_info().map_err(png_error)?;
    let info = reader.info();
    if info.bit_depth != png::BitDepth::Eight {
        return Err(Error::Unsupported(format!("{:?}-bit PNG", info.bit_depth as u8)));
    }
    let channels = match info.color_type {
        png::ColorType::Grayscale => 1,
        png::ColorType::Rgb => 3,
        other => return Err(Error::Unsupported(format!("PNG color type {other:?}"))),
    };
    let (w, h) = (info.width as usize, info.height as usize);
    let mut buf = vec![0u8; reader.output_buffer_size().ok_or_else(|| Error::Malformed("PNG too large".into()))?];
    let frame = reader.next_frame(&mut buf).map_err(png_error)?;
    buf.truncate(frame.buffer_size());
    ImagePlane::from_interleaved(w, h, channels, &buf)
}

fn encode(width: usize, height: usize, color: png::ColorType, palette: Option<Vec<u8>>, data: &[u8]) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    {
        let mut enc = png::Encoder::new(&mut out, width as u32, height as u32);
        enc.set_color(color);
        enc.set_depth(png::BitDepth::Eight);
        if let Some(p) = palette {
            enc.set_palette(p);
        }
        let mut writer = enc.write_header().map_err(|e| Error::Malformed(format!("PNG: {e}")))?;
        writer.write_image_data(data).map_err(|e| Error::Malformed(format!("PNG: {e}")))?;
    }
    Ok(out)
}

/// Encodes a pixel image as an 8-bit PNG.
pub fn write_png(img: &ImagePlane) -> Result<Vec<u8>> {
    if img.domain() != Domain::Pixel {
        return Err(Error::DomainMismatch { expected: "pixel", got: img.domain().name() });
    }
    let color = if img.channels() == 1 { png::ColorType::Grayscale } else { png::ColorType::Rgb };
    encode(img.width(), img.height(), color, None, &img.to_interleaved())
}

/// Upsamples one value per block to an 8x8 square per block.
fn upsample(grid_w: usize, grid_h: usize, values: impl Fn(usize) -> u8) -> Vec<u8> {
    let w = grid_w * 8;
    let mut data = vec![0u8; w * grid_h * 8];
    for (i, px) in data.iter_mut().enumerate() {
        let (x, y) = (i % w, i / w);
        *px = values((y / 8) * grid_w + x / 8);
    }
    data
}

/// Indexed PNG with one 8x8 square per block, colored by verdict with
/// [`MASK_PALETTE`].
pub fn render_verdict_mask(mask: &Mask) -> Result<Vec<u8>> {
    let data = upsample(mask.grid_w, mask.grid_h, |b| match mask.verdicts[b] {
        Verdict::Compatible => 0,
        Verdict::Incompatible => 1,
        Verdict::Unsolved => 2,
    });
    let palette = MASK_PALETTE.iter().flatten().copied().collect();
    encode(mask.grid_w * 8, mask.grid_h * 8, png::ColorType::Indexed, Some(palette), &data)
}

/// Grayscale PNG: 255 for manipulated blocks, 128 for unsolved blocks kept
/// apart, 0 for authentic ones.
pub fn render_binary_mask(mask: &Mask) -> Result<Vec<u8>> {
    let data = upsample(mask.grid_w, mask.grid_h, |b| match mask.labels[b] {
        MaskLabel::Authentic => 0,
        MaskLabel::Manipulated => 255,
        MaskLabel::Unsolved => 128,
    });
    encode(mask.grid_w * 8, mask.grid_h * 8, png::ColorType::Grayscale, None, &data)
}
