//! Loader for the UCI optical-digits dataset.
//!
//! Each line holds 64 pixel intensities in 0..=16 (an 8×8 down-sampled
//! handwritten digit) followed by the class label 0..=9, all comma-separated.
//! The canonical files are `optdigits.tra` (3823 samples) and `optdigits.tes`
//! (1797 samples).

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::DataError;

/// The pixel count of one image.
pub const PIXELS: usize = 64;
/// The number of digit classes.
pub const CLASSES: usize = 10;
/// Digits used for the reduced four-class task.
pub const DEFAULT_DIGIT_SUBSET: [u8; 4] = [0, 1, 2, 3];

/// Which half of the dataset a file is expected to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Split {
    Train,
    Test,
}

/// One labelled image.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Sample {
    /// Row-major 8×8 intensities, each in 0..=16.
    pub pixels: [u8; PIXELS],
    /// Class label in 0..=9.
    pub label: u8,
}

/// A loaded split.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Dataset {
    pub samples: Vec<Sample>,
    pub split: Split,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// Samples per class, indexed by label.
    pub fn class_counts(&self) -> [usize; CLASSES] {
        let mut counts = [0usize; CLASSES];
        for s in &self.samples {
            counts[s.label as usize] += 1;
        }
        counts
    }

    /// Keeps only the listed digits, preserving file order.
    pub fn subset_digits(&self, digits: &[u8]) -> Result<Dataset, DataError> {
        if digits.is_empty() {
            return Err(DataError::EmptyDigitSet);
        }
        if let Some(&bad) = digits.iter().find(|&&d| d as usize >= CLASSES) {
            return Err(DataError::BadDigit(bad));
        }
        let samples: Vec<Sample> = self
            .samples
            .iter()
            .filter(|s| digits.contains(&s.label))
            .copied()
            .collect();
        if samples.is_empty() {
            return Err(DataError::EmptySubset {
                digits: digits.to_vec(),
            });
        }
        Ok(Dataset {
            samples,
            split: self.split,
        })
    }

    /// Renders the dataset back to its on-disk form (one sample per line,
    /// 65 comma-separated integers, trailing newline).
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.samples.len() * PIXELS * 3);
        for s in &self.samples {
            for p in s.pixels {
                let _ = write!(out, "{p},");
            }
            let _ = writeln!(out, "{}", s.label);
        }
        out
    }
}

/// Loads one split from disk, validating every field.
///
/// Blank lines are skipped; carriage returns are tolerated.
pub fn load_optdigits(path: &Path, split: Split) -> Result<Dataset, DataError> {
    let display = path.display().to_string();
    let text = fs::read_to_string(path).map_err(|source| DataError::Io {
        path: display.clone(),
        source,
    })?;
    let mut samples = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let trimmed = raw.trim_end_matches('\r').trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != PIXELS + 1 {
            return Err(DataError::FieldCount {
                path: display,
                line,
                found: fields.len(),
            });
        }
        let mut values = [0i64; PIXELS + 1];
        for (slot, field) in values.iter_mut().zip(&fields) {
            *slot = field.trim().parse().map_err(|_| DataError::BadInt {
                path: display.clone(),
                line,
                text: field.to_string(),
            })?;
        }
        let mut pixels = [0u8; PIXELS];
        for (px, &v) in pixels.iter_mut().zip(&values[..PIXELS]) {
            if !(0..=16).contains(&v) {
                return Err(DataError::PixelRange {
                    path: display,
                    line,
                    value: v,
                });
            }
            *px = v as u8;
        }
        let label = values[PIXELS];
        if !(0..CLASSES as i64).contains(&label) {
            return Err(DataError::LabelRange {
                path: display,
                line,
                value: label,
            });
        }
        samples.push(Sample {
            pixels,
            label: label as u8,
        });
    }
    if samples.is_empty() {
        return Err(DataError::EmptyFile { path: display });
    }
    Ok(Dataset { samples, split })
}
