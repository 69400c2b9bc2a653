//! Sets on the real line as indexed sequences `a_k ≤ a_{k+1}`: counting
//! function, interval discrepancy and the split `a_k = D·k + f(k)`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{PointMultiSet, Window};

/// Nondecreasing sequence `a_k` with multiplicities repeated; `a_0` is the
/// smallest element `>= 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct SortedLine {
    values: Vec<f64>,
    zero: usize,
    window: Window,
}

impl SortedLine {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn k_min(&self) -> i64 {
        -(self.zero as i64)
    }

    pub fn k_max(&self) -> i64 {
        (self.values.len() - self.zero) as i64 - 1
    }

    pub fn get(&self, k: i64) -> Option<f64> {
        let i = k + self.zero as i64;
        (i >= 0).then(|| self.values.get(i as usize).copied()).flatten()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `a_0`, the offset of the anchor from the origin.
    pub fn anchor_offset(&self) -> f64 {
        self.values[self.zero]
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    fn upto(&self, t: f64) -> i64 {
        self.values.partition_point(|v| *v <= t) as i64
    }

    /// `card(A ∩ (x, x + h])`.
    pub fn card_interval(&self, x: f64, h: f64) -> i64 {
        self.upto(x + h) - self.upto(x)
    }
}

pub fn sort_line(a: &PointMultiSet) -> Result<SortedLine> {
    if a.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: a.dim(),
        });
    }
    if a.is_signed() {
        return Err(Error::SignedSetUnsupported);
    }
    let values = a.expanded_line();
    let zero = values.partition_point(|v| *v < 0.0);
    if zero == values.len() {
        return Err(Error::NoAnchor);
    }
    Ok(SortedLine {
        values,
        zero,
        window: a.window().clone(),
    })
}

/// `n(t) = card(A ∩ (0, t])` for `t > 0`, `-card(A ∩ (t, 0])` for `t < 0`.
pub fn counting(s: &SortedLine, t: f64) -> Result<i64> {
    let (lo, hi) = (s.window.lower().x(), s.window.upper().x());
    if !(lo..=hi).contains(&t) || !(lo..=hi).contains(&0.0) {
        return Err(Error::RegionExceedsWindow);
    }
    Ok(s.upto(t) - s.upto(0.0))
}

/// `sup |card(A ∩ (x, x+h]) - density·h|` over the sampled `(x, h)` pairs.
pub fn discrepancy(s: &SortedLine, density: f64, samples: &[(f64, f64)]) -> Result<f64> {
    let (lo, hi) = (s.window.lower().x(), s.window.upper().x());
    let mut worst = 0.0f64;
    for &(x, h) in samples {
        if h <= 0.0 || x < lo || x + h > hi {
            return Err(Error::RegionExceedsWindow);
        }
        worst = worst.max((s.card_interval(x, h) as f64 - density * h).abs());
    }
    Ok(worst)
}

/// Values `f(k)` for consecutive integers `k_min..`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IntegerSamples {
    pub k_min: i64,
    pub values: Vec<f64>,
}

impl IntegerSamples {
    pub fn k_max(&self) -> i64 {
        self.k_min + self.values.len() as i64 - 1
    }

    pub fn get(&self, k: i64) -> Option<f64> {
        let i = k - self.k_min;
        (i >= 0).then(|| self.values.get(i as usize).copied()).flatten()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Decomposition {
    /// Fitted slope `D̂` of `a_k` against `k` (mean spacing).
    pub slope: f64,
    /// `(a_kmax - a_kmin) / (kmax - kmin)`, the starting estimate.
    pub endpoint_slope: f64,
    /// Points per unit length, `1 / D̂`.
    pub density: f64,
    pub anchor_offset: f64,
    /// `f(k) = a_k - D̂·k`.
    pub f: IntegerSamples,
    /// Interval discrepancy against `1 / D̂` on the built-in sample set.
    pub discrepancy: f64,
}

/// Deterministic `(x, h)` pairs across the window, lengths `h` integer
/// multiples of the spacing.
pub fn standard_samples(s: &SortedLine, spacing: f64) -> Vec<(f64, f64)> {
    let (lo, hi) = (s.window.lower().x(), s.window.upper().x());
    let span = hi - lo;
    let mut out = Vec::new();
    for mult in [1.0, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 300.0, 1000.0] {
        let h = mult * spacing;
        if h >= span {
            break;
        }
        let n = 64;
        for j in 0..n {
            let x = lo + (span - h) * (j as f64 + 0.5) / n as f64;
            out.push((x, h));
        }
    }
    out
}

/// Least-squares split `a_k = D̂·k + f(k)`.
pub fn decompose(s: &SortedLine) -> Result<Decomposition> {
    let n = s.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let (k0, k1) = (s.k_min(), s.k_max());
    let endpoint_slope = (s.values[n - 1] - s.values[0]) / (k1 - k0) as f64;
    // regress a_k - endpoint·k on centered k to keep the sums small
    let k_mean = 0.5 * (k0 + k1) as f64;
    let mut num = 0.0;
    let mut den = 0.0;
    let resid_mean = (k0..=k1)
        .map(|k| s.get(k).expect("in range") - endpoint_slope * k as f64)
        .sum::<f64>()
        / n as f64;
    for k in k0..=k1 {
        let dk = k as f64 - k_mean;
        let r = s.get(k).expect("in range") - endpoint_slope * k as f64 - resid_mean;
        num += dk * r;
        den += dk * dk;
    }
    let slope = endpoint_slope + num / den;
    let values = (k0..=k1)
        .map(|k| s.get(k).expect("in range") - slope * k as f64)
        .collect();
    let samples = standard_samples(s, slope);
    Ok(Decomposition {
        slope,
        endpoint_slope,
        density: 1.0 / slope,
        anchor_offset: s.anchor_offset(),
        f: IntegerSamples { k_min: k0, values },
        discrepancy: discrepancy(s, 1.0 / slope, &samples)?,
    })
}

/// `sup_m |f(m + q) - f(m)|` over all `m` with both indices sampled.
pub fn f_shift_quality(f: &IntegerSamples, q: i64) -> Result<f64> {
    let n = f.values.len() as i64;
    if q.abs() >= n {
        return Err(Error::IndexOutOfRange(q));
    }
    let q = q.unsigned_abs() as usize;
    Ok(f.values
        .iter()
        .zip(&f.values[q..])
        .map(|(a, b)| (b - a).abs())
        .fold(0.0, f64::max))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShiftCount {
    pub tau: f64,
    /// Integer index shift paired with `τ`, `round(τ / D̂)`.
    pub q: i64,
    pub quality: f64,
}

/// Pairs every accepted almost period `τ` of the set with the index shift
/// `q = round(τ / D̂)` and reports how well `f` repeats under it.
pub fn shift_counts(d: &Decomposition, taus: &[f64]) -> Result<Vec<ShiftCount>> {
    taus.iter()
        .map(|&tau| {
            let q = (tau / d.slope).round() as i64;
            Ok(ShiftCount {
                tau,
                q,
                quality: f_shift_quality(&d.f, q)?,
            })
        })
        .collect()
}
