use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Annex K luminance table, natural order.
pub const STD_LUMINANCE: [u16; 64] = [
    16, 11, 10, 16, 24, 40, 51, 61, 12, 12, 14, 19, 26, 58, 60, 55, 14, 13, 16, 24, 40, 57, 69,
    56, 14, 17, 22, 29, 51, 87, 80, 62, 18, 22, 37, 56, 68, 109, 103, 77, 24, 35, 55, 64, 81, 104,
    113, 92, 49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99,
];

/// Annex K chrominance table, natural order.
pub const STD_CHROMINANCE: [u16; 64] = [
    17, 18, 24, 47, 99, 99, 99, 99, 18, 21, 26, 66, 99, 99, 99, 99, 24, 26, 56, 99, 99, 99, 99,
    99, 47, 66, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
    99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99, 99,
];

/// Quantization steps for one block: 64 entries per channel, natural order.
/// Channel 0 is luminance; channels 1 and 2 are chrominance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QuantTable {
    channels: usize,
    steps: Vec<u16>,
}

/// Scale factor applied to the base tables for a quality factor.
pub fn quality_scaling(qf: u32) -> Result<u32> {
    if !(1..=100).contains(&qf) {
        return Err(Error::InvalidQuality(qf));
    }
    Ok(if qf < 50 { 5000 / qf } else { 200 - 2 * qf })
}

fn scale_table(base: &[u16; 64], scale: u32) -> impl Iterator<Item = u16> + '_ {
    base.iter()
        .map(move |&b| ((b as u32 * scale + 50) / 100).clamp(1, 255) as u16)
}

impl QuantTable {
    /// Standard table for a quality factor in 1..=100 (baseline-limited to 255).
    pub fn from_qf(qf: u32, channels: usize) -> Result<Self> {
        check_channels(channels)?;
        let scale = quality_scaling(qf)?;
        let mut steps: Vec<u16> = scale_table(&STD_LUMINANCE, scale).collect();
        for _ in 1..channels {
            steps.extend(scale_table(&STD_CHROMINANCE, scale));
        }
        Ok(QuantTable { channels, steps })
    }

    /// Explicit table. A 64-entry table is replicated across all channels.
    pub fn from_steps(steps: &[u16], channels: usize) -> Result<Self> {
        check_channels(channels)?;
        if let Some(&bad) = steps.iter().find(|&&s| !(1..=255).contains(&s)) {
            return Err(Error::InvalidQuantStep(bad as u32));
        }
        let steps = match steps.len() {
            64 => steps.repeat(channels),
            n if n == 64 * channels => steps.to_vec(),
            n => return Err(Error::LengthMismatch { expected: 64 * channels, got: n }),
        };
        Ok(QuantTable { channels, steps })
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    /// All steps, channel-major.
    pub fn steps(&self) -> &[u16] {
        &self.steps
    }

    /// The 64 steps of one channel.
    pub fn channel(&self, ch: usize) -> &[u16] {
        &self.steps[ch * 64..(ch + 1) * 64]
    }

    /// Euclidean norm of half the steps over every entry.
    pub fn half_step_norm(&self) -> f64 {
        self.steps
            .iter()
            .map(|&q| (q as f64 / 2.0).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

pub(crate) fn check_channels(channels: usize) -> Result<()> {
    match channels {
        1 | 3 => Ok(()),
        c => Err(Error::InvalidChannels(c)),
    }
}
