//! Baseline sequential JPEG: parsing to quantized coefficients and encoding
//! from them. Only 8-bit, Huffman-coded, non-subsampled streams are
//! accepted.

use super::huffman::{self, DecodeTable, EncodeTable};
use crate::codec::{Domain, QuantTable};
use crate::error::{Error, Result};
use crate::image::ImagePlane;

/// Natural (row-major) index of each zigzag position.
pub const ZIGZAG: [usize; 64] = [
    0, 1, 8, 16, 9, 2, 3, 10, 17, 24, 32, 25, 18, 11, 4, 5, 12, 19, 26, 33, 40, 48, 41, 34, 27, 20, 13, 6, 7, 14, 21,
    28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23, 30, 37, 44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61,
    54, 47, 55, 62, 63,
];

const SOI: u8 = 0xD8;
const EOI: u8 = 0xD9;
const SOS: u8 = 0xDA;
const DQT: u8 = 0xDB;
const DHT: u8 = 0xC4;
const DRI: u8 = 0xDD;
const DAC: u8 = 0xCC;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JpegComponent {
    pub id: u8,
    pub h_samp: u8,
    pub v_samp: u8,
    pub table_id: u8,
    pub blocks_w: usize,
    pub blocks_h: usize,
}

/// A parsed stream. Coefficient planes hold every coded block, including
/// the padding blocks past the frame edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct JpegFileModel {
    pub width: usize,
    pub height: usize,
    pub components: Vec<JpegComponent>,
    /// Quantization steps of each component, natural order.
    pub qtables: Vec<[u16; 64]>,
    /// Per component: blocks in raster order, 64 coefficients each in
    /// natural order.
    pub coefficients: Vec<Vec<i32>>,
    pub restart_interval: u16,
    /// Marker codes in order of appearance, restart markers excluded.
    pub markers: Vec<u8>,
}

impl JpegFileModel {
    pub fn quant_table(&self) -> Result<QuantTable> {
        let steps: Vec<u16> = self.qtables.iter().flatten().copied().collect();
        QuantTable::from_steps(&steps, self.components.len())
    }

    /// The coefficients as a DCT-domain image covering every coded block.
    pub fn to_coef_image(&self) -> Result<ImagePlane> {
        let c0 = &self.components[0];
        let (w, h) = (c0.blocks_w * 8, c0.blocks_h * 8);
        let mut img = ImagePlane::new(w, h, self.components.len(), Domain::Dct, vec![0; w * h * self.components.len()])?;
        let n = self.components.len() * 64;
        let mut block = vec![0i32; n];
        for by in 0..c0.blocks_h {
            for bx in 0..c0.blocks_w {
                for (c, plane) in self.coefficients.iter().enumerate() {
                    let b = by * c0.blocks_w + bx;
                    block[c * 64..(c + 1) * 64].copy_from_slice(&plane[b * 64..(b + 1) * 64]);
                }
                img.set_block_ints(bx, by, &block);
            }
        }
        Ok(img)
    }
}

fn marker_name(m: u8) -> String {
    match m {
        0xC0..=0xCF if m != DHT && m != 0xC8 && m != DAC => format!("SOF{}", m - 0xC0),
        DAC => "DAC".into(),
        _ => format!("0xFF{m:02X}"),
    }
}

struct Reader<'a> {
    data: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    fn byte(&mut self) -> Result<u8> {
        let b = *self.data.get(self.pos).ok_or_else(|| Error::Malformed("truncated stream".into()))?;
        self.pos += 1;
        Ok(b)
    }

    fn u16(&mut self) -> Result<u16> {
        Ok(u16::from_be_bytes([self.byte()?, self.byte()?]))
    }

    fn take(&mut self, n: usize) -> Result<&'a [u8]> {
        let s = self.data.get(self.pos..self.pos + n).ok_or_else(|| Error::Malformed("truncated segment".into()))?;
        self.pos += n;
        Ok(s)
    }

    fn segment(&mut self) -> Result<&'a [u8]> {
        let len = self.u16()? as usize;
        if len < 2 {
            return Err(Error::Malformed("segment length below 2".into()));
        }
        self.take(len - 2)
    }

    /// Next marker code, skipping fill bytes.
    fn marker(&mut self) -> Result<u8> {
        if self.byte()? != 0xFF {
            return Err(Error::Malformed(format!("expected a marker at byte {}", self.pos - 1)));
        }
        loop {
            match self.byte()? {
                0xFF => continue,
                0 => return Err(Error::Malformed("stuffed zero outside entropy data".into())),
                m => return Ok(m),
            }
        }
    }
}

/// Bit-level reader over entropy-coded data.
struct Bits<'a> {
    data: &'a [u8],
    pos: usize,
    acc: u32,
    n: u32,
}

impl Bits<'_> {
    fn bit(&mut self) -> Result<u32> {
        if self.n == 0 {
            let b = *self.data.get(self.pos).ok_or_else(|| Error::Malformed("truncated entropy-coded data".into()))?;
            if b == 0xFF {
                match self.data.get(self.pos + 1) {
                    Some(0) => self.pos += 2,
                    Some(_) => return Err(Error::Malformed("entropy-coded data ends early".into())),
                    None => return Err(Error::Malformed("truncated entropy-coded data".into())),
                }
            } else {
                self.pos += 1;
            }
            self.acc = b as u32;
            self.n = 8;
        }
        self.n -= 1;
        Ok((self.acc >> self.n) & 1)
    }

    fn bits(&mut self, count: u32) -> Result<i32> {
        let mut v = 0i32;
        for _ in 0..count {
            v = (v << 1) | self.bit()? as i32;
        }
        Ok(v)
    }

    /// Reads a restart marker after discarding the partial byte.
    fn restart(&mut self, expected: u8) -> Result<()> {
        self.n = 0;
        while self.data.get(self.pos) == Some(&0xFF) && self.data.get(self.pos + 1) == Some(&0xFF) {
            self.pos += 1;
        }
        match (self.data.get(self.pos), self.data.get(self.pos + 1)) {
            (Some(0xFF), Some(&m)) if m == 0xD0 + expected => {
                self.pos += 2;
                Ok(())
            }
            (Some(0xFF), Some(&m)) => Err(Error::Malformed(format!("expected RST{expected}, found {}", marker_name(m)))),
            _ => Err(Error::Malformed("missing restart marker".into())),
        }
    }
}

fn extend(v: i32, s: u32) -> i32 {
    if s == 0 {
        0
    } else if v < 1 << (s - 1) {
        v - (1 << s) + 1
    } else {
        v
    }
}

/// Parses a baseline JPEG stream.
pub fn parse_jpeg(bytes: &[u8]) -> Result<JpegFileModel> {
    let mut r = Reader { data: bytes, pos: 0 };
    if r.marker()? != SOI {
        return Err(Error::Malformed("missing SOI marker".into()));
    }
    let mut markers = vec![SOI];
    let mut qtables: [Option<[u16; 64]>; 4] = [None; 4];
    let mut dc_tables: [Option<DecodeTable>; 4] = Default::default();
    let mut ac_tables: [Option<DecodeTable>; 4] = Default::default();
    let mut frame: Option<(usize, usize, Vec<JpegComponent>)> = None;
    let mut coefficients: Vec<Vec<i32>> = Vec::new();
    let mut decoded: Vec<bool> = Vec::new();
    let mut restart_interval = 0u16;

    loop {
        let m = r.marker()?;
        markers.push(m);
        match m {
            EOI => break,
            DQT => {
                let mut s = Reader { data: r.segment()?, pos: 0 };
                while s.pos < s.data.len() {
                    let pq_tq = s.byte()?;
                    let (pq, tq) = (pq_tq >> 4, (pq_tq & 15) as usize);
                    if tq > 3 || pq > 1 {
                        return Err(Error::Malformed(format!("bad DQT header byte {pq_tq:#04x}")));
                    }
                    let mut t = [0u16; 64];
                    for &z in &ZIGZAG {
                        t[z] = if pq == 0 { s.byte()? as u16 } else { s.u16()? };
                    }
                    if t.contains(&0) {
                        return Err(Error::Malformed("zero quantization step".into()));
                    }
                    qtables[tq] = Some(t);
                }
            }
            DHT => {
                let mut s = Reader { data: r.segment()?, pos: 0 };
                while s.pos < s.data.len() {
                    let tc_th = s.byte()?;
                    let (tc, th) = (tc_th >> 4, (tc_th & 15) as usize);
                    if tc > 1 || th > 3 {
                        return Err(Error::Malformed(format!("bad DHT header byte {tc_th:#04x}")));
                    }
                    let mut bits = [0u8; 16];
                    bits.copy_from_slice(s.take(16)?);
                    let total = bits.iter().map(|&b| b as usize).sum();
                    let table = DecodeTable::new(&bits, s.take(total)?)?;
                    if tc == 0 {
                        dc_tables[th] = Some(table);
                    } else {
                        ac_tables[th] = Some(table);
                    }
                }
            }
            DRI => {
                let s = r.segment()?;
                if s.len() != 2 {
                    return Err(Error::Malformed("DRI segment length".into()));
                }
                restart_interval = u16::from_be_bytes([s[0], s[1]]);
            }
            0xC0 | 0xC1 => {
                if frame.is_some() {
                    return Err(Error::Malformed("multiple frame headers".into()));
                }
                let mut s = Reader { data: r.segment()?, pos: 0 };
                let precision = s.byte()?;
                if precision != 8 {
                    return Err(Error::Unsupported(format!(
                        "{}-bit samples ({} precision {precision})",
                        precision,
                        marker_name(m)
                    )));
                }
                let height = s.u16()? as usize;
                let width = s.u16()? as usize;
                let nc = s.byte()? as usize;
                if height == 0 {
                    return Err(Error::Unsupported("height defined by DNL".into()));
                }
                if width == 0 || !(nc == 1 || nc == 3) {
                    return Err(Error::Unsupported(format!("{nc} components ({})", marker_name(m))));
                }
                let (bw, bh) = (width.div_ceil(8), height.div_ceil(8));
                let mut comps = Vec::with_capacity(nc);
                for _ in 0..nc {
                    let id = s.byte()?;
                    let hv = s.byte()?;
                    let tq = s.byte()?;
                    if tq > 3 {
                        return Err(Error::Malformed("quantization table id above 3".into()));
                    }
                    comps.push(JpegComponent {
                        id,
                        h_samp: hv >> 4,
                        v_samp: hv & 15,
                        table_id: tq,
                        blocks_w: bw,
                        blocks_h: bh,
                    });
                }
                if nc > 1 && comps.iter().any(|c| c.h_samp != 1 || c.v_samp != 1) {
                    let f: Vec<String> = comps.iter().map(|c| format!("{}x{}", c.h_samp, c.v_samp)).collect();
                    return Err(Error::Unsupported(format!(
                        "chroma subsampling ({} sampling factors {})",
                        marker_name(m),
                        f.join(",")
                    )));
                }
                coefficients = vec![vec![0; bw * bh * 64]; nc];
                decoded = vec![false; nc];
                frame = Some((width, height, comps));
            }
            0xC2..=0xC3 | 0xC5..=0xC7 | 0xC9..=0xCB | 0xCD..=0xCF => {
                let what = match m {
                    0xC2 | 0xC6 => "progressive DCT",
                    0xC3 | 0xC7 => "lossless",
                    0xC5 => "hierarchical",
                    0xCA | 0xCE => "progressive arithmetic coding",
                    0xCB | 0xCF => "lossless arithmetic coding",
                    _ => "arithmetic coding",
                };
                return Err(Error::Unsupported(format!("{what} ({})", marker_name(m))));
            }
            DAC => return Err(Error::Unsupported("arithmetic coding (DAC)".into())),
            SOS => {
                let (_, _, comps) = frame.as_ref().ok_or_else(|| Error::Malformed("SOS before frame header".into()))?;
                let mut s = Reader { data: r.segment()?, pos: 0 };
                let ns = s.byte()? as usize;
                if ns == 0 || ns > comps.len() {
                    return Err(Error::Malformed(format!("scan with {ns} components")));
                }
                let mut scan = Vec::with_capacity(ns);
                for _ in 0..ns {
                    let id = s.byte()?;
                    let t = s.byte()?;
                    let idx = comps
                        .iter()
                        .position(|c| c.id == id)
                        .ok_or_else(|| Error::Malformed(format!("scan names unknown component {id}")))?;
                    let dc = dc_tables[(t >> 4) as usize & 3]
                        .as_ref()
                        .ok_or_else(|| Error::Malformed("scan uses an undefined DC table".into()))?;
                    let ac = ac_tables[(t & 15) as usize & 3]
                        .as_ref()
                        .ok_or_else(|| Error::Malformed("scan uses an undefined AC table".into()))?;
                    scan.push((idx, dc, ac));
                }
                let (ss, se, a) = (s.byte()?, s.byte()?, s.byte()?);
                if ss != 0 || se != 63 || a != 0 {
                    return Err(Error::Unsupported("spectral selection or successive approximation".into()));
                }
                let (bw, bh) = (comps[0].blocks_w, comps[0].blocks_h);
                let mut bits = Bits { data: bytes, pos: r.pos, acc: 0, n: 0 };
                let mut pred = vec![0i32; ns];
                let mut block = [0i32; 64];
                let (mut left, mut next_rst) = (restart_interval as usize, 0u8);
                for mcu in 0..bw * bh {
                    if restart_interval > 0 && left == 0 {
                        bits.restart(next_rst)?;
                        next_rst = (next_rst + 1) & 7;
                        pred.iter_mut().for_each(|p| *p = 0);
                        left = restart_interval as usize;
                    }
                    left = left.wrapping_sub(1);
                    for (j, &(idx, dc, ac)) in scan.iter().enumerate() {
                        block.fill(0);
                        let t = dc.decode(|| bits.bit())? as u32;
                        if t > 11 {
                            return Err(Error::Malformed("DC magnitude category above 11".into()));
                        }
                        pred[j] += extend(bits.bits(t)?, t);
                        block[0] = pred[j];
                        let mut k = 1;
                        while k < 64 {
                            let rs = ac.decode(|| bits.bit())?;
                            let (run, size) = ((rs >> 4) as usize, (rs & 15) as u32);
                            if size == 0 {
                                if run != 15 {
                                    break;
                                }
                                k += 16;
                                continue;
                            }
                            k += run;
                            if k > 63 {
                                return Err(Error::Malformed("AC run past the end of the block".into()));
                            }
                            block[ZIGZAG[k]] = extend(bits.bits(size)?, size);
                            k += 1;
                        }
                        coefficients[idx][mcu * 64..(mcu + 1) * 64].copy_from_slice(&block);
                    }
                }
                for &(idx, _, _) in &scan {
                    decoded[idx] = true;
                }
                // Skip to the next non-restart marker.
                let mut p = bits.pos;
                loop {
                    match (bytes.get(p), bytes.get(p + 1)) {
                        (Some(0xFF), Some(&n)) if n != 0 && !(0xD0..=0xD7).contains(&n) && n != 0xFF => break,
                        (Some(_), Some(_)) => p += 1,
                        _ => return Err(Error::Malformed("missing EOI marker".into())),
                    }
                }
                r.pos = p;
            }
            0xD0..=0xD7 => return Err(Error::Malformed("restart marker outside entropy data".into())),
            0x01 => {}
            _ => {
                r.segment()?;
            }
        }
    }

    let (width, height, components) = frame.ok_or_else(|| Error::Malformed("no frame header".into()))?;
    if let Some(i) = decoded.iter().position(|&d| !d) {
        return Err(Error::Malformed(format!("component {} has no scan", components[i].id)));
    }
    let qt = components
        .iter()
        .map(|c| qtables[c.table_id as usize].ok_or_else(|| Error::Malformed(format!("table {} undefined", c.table_id))))
        .collect::<Result<Vec<_>>>()?;
    Ok(JpegFileModel { width, height, components, qtables: qt, coefficients, restart_interval, markers })
}

/// Encoder settings.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EncodeOptions {
    /// Frame size to declare; defaults to the coefficient image size. Must
    /// not need more blocks than the image holds.
    pub frame: Option<(usize, usize)>,
    /// MCUs between restart markers; 0 disables them.
    pub restart_interval: u16,
}

struct BitWriter {
    out: Vec<u8>,
    acc: u32,
    n: u32,
}

impl BitWriter {
    fn put(&mut self, code: u32, len: u32) {
        for i in (0..len).rev() {
            self.acc = (self.acc << 1) | ((code >> i) & 1);
            self.n += 1;
            if self.n == 8 {
                self.emit(self.acc as u8);
                self.acc = 0;
                self.n = 0;
            }
        }
    }

    fn emit(&mut self, b: u8) {
        self.out.push(b);
        if b == 0xFF {
            self.out.push(0);
        }
    }

    fn flush(&mut self) {
        if self.n > 0 {
            let pad = 8 - self.n;
            self.put((1 << pad) - 1, pad);
        }
    }
}

fn category(v: i32) -> u32 {
    32 - v.unsigned_abs().leading_zeros()
}

fn put_value(w: &mut BitWriter, table: &EncodeTable, symbol: u8, v: i32, size: u32) -> Result<()> {
    let (code, len) = table
        .code(symbol)
        .ok_or_else(|| Error::Unsupported(format!("coefficient {v} outside the baseline range")))?;
    w.put(code as u32, len as u32);
    if size > 0 {
        let bits = if v < 0 { v - 1 } else { v };
        w.put(bits as u32 & ((1 << size) - 1), size);
    }
    Ok(())
}

fn push_segment(out: &mut Vec<u8>, marker: u8, body: &[u8]) {
    out.extend_from_slice(&[0xFF, marker]);
    out.extend_from_slice(&((body.len() + 2) as u16).to_be_bytes());
    out.extend_from_slice(body);
}

/// Writes a JFIF stream with the standard Huffman tables from a coefficient
/// image. Grayscale uses one table set; color uses the chrominance set for
/// the second and third components.
pub fn encode_jpeg(coefs: &ImagePlane, table: &QuantTable, opts: &EncodeOptions) -> Result<Vec<u8>> {
    if coefs.domain() != Domain::Dct {
        return Err(Error::DomainMismatch { expected: "dct", got: coefs.domain().name() });
    }
    let nc = coefs.channels();
    if table.channels() != nc {
        return Err(Error::ChannelMismatch { expected: nc, got: table.channels() });
    }
    if !coefs.width().is_multiple_of(8) || !coefs.height().is_multiple_of(8) {
        return Err(Error::InvalidGeometry("coefficient image is not a whole number of blocks".into()));
    }
    let (gw, gh) = coefs.grid();
    let (fw, fh) = opts.frame.unwrap_or((coefs.width(), coefs.height()));
    if fw == 0 || fh == 0 || fw.div_ceil(8) != gw || fh.div_ceil(8) != gh || fw > 65535 || fh > 65535 {
        return Err(Error::InvalidGeometry(format!("frame {fw}x{fh} does not match a {gw}x{gh} block grid")));
    }

    // One quantization table slot per distinct channel table.
    let mut slots: Vec<&[u16]> = Vec::new();
    let mut slot_of = Vec::with_capacity(nc);
    for c in 0..nc {
        let t = table.channel(c);
        let s = slots.iter().position(|&x| x == t).unwrap_or_else(|| {
            slots.push(t);
            slots.len() - 1
        });
        slot_of.push(s as u8);
    }
    let extended = slots.iter().any(|t| t.iter().any(|&q| q > 255));

    let mut out = vec![0xFF, SOI];
    push_segment(&mut out, 0xE0, &[b'J', b'F', b'I', b'F', 0, 1, 1, 0, 0, 1, 0, 1, 0, 0]);
    let mut dqt = Vec::new();
    for (i, t) in slots.iter().enumerate() {
        dqt.push(((extended as u8) << 4) | i as u8);
        for &z in &ZIGZAG {
            if extended {
                dqt.extend_from_slice(&t[z].to_be_bytes());
            } else {
                dqt.push(t[z] as u8);
            }
        }
    }
    push_segment(&mut out, DQT, &dqt);
    let mut sof = vec![8];
    sof.extend_from_slice(&(fh as u16).to_be_bytes());
    sof.extend_from_slice(&(fw as u16).to_be_bytes());
    sof.push(nc as u8);
    for c in 0..nc {
        sof.extend_from_slice(&[c as u8 + 1, 0x11, slot_of[c]]);
    }
    push_segment(&mut out, if extended { 0xC1 } else { 0xC0 }, &sof);

    let dc = [
        EncodeTable::new(&huffman::DC_LUMA_BITS, &huffman::DC_VALUES),
        EncodeTable::new(&huffman::DC_CHROMA_BITS, &huffman::DC_VALUES),
    ];
    let ac = [
        EncodeTable::new(&huffman::AC_LUMA_BITS, &huffman::AC_LUMA_VALUES),
        EncodeTable::new(&huffman::AC_CHROMA_BITS, &huffman::AC_CHROMA_VALUES),
    ];
    let n_sets = if nc == 1 { 1 } else { 2 };
    let mut dht = Vec::new();
    for s in 0..n_sets {
        for (class, t) in [(0u8, &dc[s]), (1u8, &ac[s])] {
            dht.push((class << 4) | s as u8);
            dht.extend_from_slice(&t.bits);
            dht.extend_from_slice(&t.values);
        }
    }
    push_segment(&mut out, DHT, &dht);
    if opts.restart_interval > 0 {
        push_segment(&mut out, DRI, &opts.restart_interval.to_be_bytes());
    }
    let mut sos = vec![nc as u8];
    for c in 0..nc {
        let s = (c > 0) as u8;
        sos.extend_from_slice(&[c as u8 + 1, (s << 4) | s]);
    }
    sos.extend_from_slice(&[0, 63, 0]);
    push_segment(&mut out, SOS, &sos);

    let mut w = BitWriter { out, acc: 0, n: 0 };
    let mut pred = vec![0i32; nc];
    let mut block = vec![0i32; nc * 64];
    let ri = opts.restart_interval as usize;
    let mut rst = 0u8;
    for mcu in 0..gw * gh {
        if ri > 0 && mcu > 0 && mcu % ri == 0 {
            w.flush();
            w.out.extend_from_slice(&[0xFF, 0xD0 + rst]);
            rst = (rst + 1) & 7;
            pred.fill(0);
        }
        coefs.block_ints(mcu % gw, mcu / gw, &mut block);
        for c in 0..nc {
            let s = (c > 0) as usize;
            let b = &block[c * 64..(c + 1) * 64];
            let diff = b[0] - pred[c];
            pred[c] = b[0];
            let size = category(diff);
            if size > 11 {
                return Err(Error::Unsupported(format!("DC difference {diff} outside the baseline range")));
            }
            put_value(&mut w, &dc[s], size as u8, diff, size)?;
            let mut run = 0u8;
            for k in 1..64 {
                let v = b[ZIGZAG[k]];
                if v == 0 {
                    run += 1;
                    continue;
                }
                while run >= 16 {
                    put_value(&mut w, &ac[s], 0xF0, 0, 0)?;
                    run -= 16;
                }
                let size = category(v);
                if size > 10 {
                    return Err(Error::Unsupported(format!("AC coefficient {v} outside the baseline range")));
                }
                put_value(&mut w, &ac[s], (run << 4) | size as u8, v, size)?;
                run = 0;
            }
            if run > 0 {
                put_value(&mut w, &ac[s], 0x00, 0, 0)?;
            }
        }
    }
    w.flush();
    let mut out = w.out;
    out.extend_from_slice(&[0xFF, EOI]);
    Ok(out)
}
