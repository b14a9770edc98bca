//! CSV renderings of sample tables and histograms.
//!
//! Numbers are written with 9 significant digits, `.` as decimal separator
//! and LF line endings.

use std::fmt::Write as _;

use serde::Serialize;

use crate::monte_carlo::{SampleBatch, SimulationError};
use crate::scalar::Scalar;

/// Formats `x` with 9 significant digits. Fixed notation for magnitudes in
/// `[1e-5, 1e9)`, scientific otherwise.
pub fn format_sig9(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    if !x.is_finite() {
        return x.to_string();
    }
    let sci = format!("{x:.8e}");
    let exp: i32 = sci
        .rsplit_once('e')
        .and_then(|(_, e)| e.parse().ok())
        .expect("`{:e}` output always carries an exponent");
    if !(-5..=8).contains(&exp) {
        return sci;
    }
    let decimals = (8 - exp) as usize;
    format!("{x:.decimals$}")
}

/// `index,<dimension names...>,<fc name>` followed by one row per realization.
pub fn samples_csv<T: Scalar>(batch: &SampleBatch<T>) -> String {
    let mut out = String::with_capacity(batch.n * 16 * (batch.per_dimension.len() + 2));
    out.push_str("index");
    for col in &batch.per_dimension {
        out.push(',');
        out.push_str(&col.name);
    }
    out.push(',');
    out.push_str(&batch.fc_name);
    out.push('\n');
    for k in 0..batch.n {
        write!(out, "{k}").unwrap();
        for col in &batch.per_dimension {
            out.push(',');
            out.push_str(&format_sig9(col.values[k].as_f64()));
        }
        out.push(',');
        out.push_str(&format_sig9(batch.fc_samples[k].as_f64()));
        out.push('\n');
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HistogramBin<T> {
    pub lower: T,
    pub upper: T,
    pub count: usize,
}

/// Equal-width histogram over `[min(samples), max(samples)]`. The last bin is
/// closed on the right. A constant sample puts every count in the first bin.
pub fn histogram<T: Scalar>(
    samples: &[T],
    bins: usize,
) -> Result<Vec<HistogramBin<T>>, SimulationError> {
    if bins == 0 {
        return Err(SimulationError::NoBins);
    }
    let first = *samples.first().ok_or(SimulationError::EmptySamples)?;
    let (lo, hi) = samples
        .iter()
        .fold((first, first), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    let nb = T::from_usize(bins).expect("bin count fits the scalar type");
    let width = (hi - lo) / nb;

    let mut out: Vec<HistogramBin<T>> = (0..bins)
        .map(|j| {
            let lower = lo + width * T::from_usize(j).unwrap();
            let upper = if j + 1 == bins {
                hi
            } else {
                lo + width * T::from_usize(j + 1).unwrap()
            };
            HistogramBin {
                lower,
                upper,
                count: 0,
            }
        })
        .collect();

    for &x in samples {
        let j = if width > T::zero() {
            ((x - lo) / width)
                .floor()
                .to_usize()
                .unwrap_or(0)
                .min(bins - 1)
        } else {
            0
        };
        out[j].count += 1;
    }
    Ok(out)
}

/// `bin_lower,bin_upper,count` rows.
pub fn histogram_csv<T: Scalar>(bins: &[HistogramBin<T>]) -> String {
    let mut out = String::from("bin_lower,bin_upper,count\n");
    for b in bins {
        writeln!(
            out,
            "{},{},{}",
            format_sig9(b.lower.as_f64()),
            format_sig9(b.upper.as_f64()),
            b.count
        )
        .unwrap();
    }
    out
}
