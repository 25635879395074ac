//! Block-level evaluation: mask collapsing, balanced accuracy and false
//! positive rate.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Authentic,
    Manipulated,
}

impl Label {
    pub fn inverted(self) -> Self {
        match self {
            Label::Authentic => Label::Manipulated,
            Label::Manipulated => Label::Authentic,
        }
    }
}

/// Manipulated is the positive class.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionCounts {
    pub tp: u64,
    pub fp: u64,
    pub tn: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
}

impl ConfusionCounts {
    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.tn + self.fn_
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    /// Balanced accuracy `(TPR + TNR) / 2`.
    pub acc: f64,
    pub fpr: f64,
    pub tpr: f64,
    pub tnr: f64,
    /// True when the inverted prediction scored better and was used.
    pub inverted: bool,
    pub counts: ConfusionCounts,
}

/// `num / den`, or 1.0 for the degenerate `0 / 0`.
pub fn rate(num: u64, den: u64) -> f64 {
    if den == 0 {
        if num == 0 {
            1.0
        } else {
            0.0
        }
    } else {
        num as f64 / den as f64
    }
}

/// A block is manipulated iff any of its 64 pixels is marked.
pub fn collapse_to_blocks(pixel_mask: &[bool], width: usize, height: usize) -> Result<Vec<Label>> {
    if !width.is_multiple_of(8) || !height.is_multiple_of(8) || width == 0 || height == 0 {
        return Err(Error::InvalidGeometry(format!("{width}x{height} mask is not a multiple of 8")));
    }
    if pixel_mask.len() != width * height {
        return Err(Error::LengthMismatch { expected: width * height, got: pixel_mask.len() });
    }
    let gw = width / 8;
    let mut out = vec![Label::Authentic; gw * (height / 8)];
    for (i, _) in pixel_mask.iter().enumerate().filter(|(_, &m)| m) {
        let (x, y) = (i % width, i / width);
        out[(y / 8) * gw + x / 8] = Label::Manipulated;
    }
    Ok(out)
}

fn score(pred: impl Iterator<Item = Label>, truth: &[Label]) -> Evaluation {
    let mut c = ConfusionCounts::default();
    for (p, &t) in pred.zip(truth) {
        match (p, t) {
            (Label::Manipulated, Label::Manipulated) => c.tp += 1,
            (Label::Manipulated, Label::Authentic) => c.fp += 1,
            (Label::Authentic, Label::Authentic) => c.tn += 1,
            (Label::Authentic, Label::Manipulated) => c.fn_ += 1,
        }
    }
    let tpr = rate(c.tp, c.tp + c.fn_);
    let tnr = rate(c.tn, c.fp + c.tn);
    let fpr = rate(c.fp, c.fp + c.tn);
    Evaluation { acc: (tpr + tnr) / 2.0, fpr, tpr, tnr, inverted: false, counts: c }
}

/// Scores a prediction against the truth. With `permuted`, the inverted
/// prediction is also scored and the better of the two is reported (ties keep
/// the prediction as given).
pub fn evaluate(pred: &[Label], truth: &[Label], permuted: bool) -> Result<Evaluation> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch { expected: truth.len(), got: pred.len() });
    }
    let direct = score(pred.iter().copied(), truth);
    if !permuted {
        return Ok(direct);
    }
    let inverted = score(pred.iter().map(|l| l.inverted()), truth);
    Ok(if inverted.acc > direct.acc { Evaluation { inverted: true, ..inverted } } else { direct })
}
