//! File formats: baseline JPEG bitstreams and lossless PNG rasters.

mod huffman;
pub mod jpeg;
pub mod raster;

pub use jpeg::{encode_jpeg, parse_jpeg, EncodeOptions, JpegComponent, JpegFileModel};
pub use raster::{read_png, render_binary_mask, render_verdict_mask, write_png, MASK_PALETTE};
