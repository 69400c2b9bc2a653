//! Sets built from the 2-adic valuation: a signed set whose convolutions are
//! almost periodic although its local variation is unbounded, and a positive
//! set that is not almost periodic although its signed counterpart is.

use rayon::prelude::*;
use serde::Serialize;

use crate::ap_functions::Grid;
use crate::error::{Error, Result};
use crate::matching::{eps_star, MatchPolicy};
use crate::measures::{variation_in_ball, weak_ap_sup_diff, Mollifier};
use crate::model::{Point, PointMultiSet, Window};

/// Largest `k` with `2^k | n`, for even nonzero `n`.
pub fn two_adic(n: i64) -> Result<u32> {
    if n == 0 || n % 2 != 0 {
        return Err(Error::OddOrZeroInput(n));
    }
    Ok(n.trailing_zeros())
}

/// Even nonzero index together with its 2-adic valuation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DyadicIndex {
    pub n: i64,
    pub alpha: u32,
}

impl DyadicIndex {
    pub fn new(n: i64) -> Result<Self> {
        Ok(DyadicIndex {
            n,
            alpha: two_adic(n)?,
        })
    }

    /// Distance `1/(α+1)²` of the two points from `n`.
    pub fn offset(&self) -> f64 {
        let a = (self.alpha + 1) as f64;
        1.0 / (a * a)
    }

    pub fn upper(&self) -> f64 {
        self.n as f64 + self.offset()
    }

    pub fn lower(&self) -> f64 {
        self.n as f64 - self.offset()
    }
}

fn indices(n_max: i64) -> Result<Vec<DyadicIndex>> {
    if n_max < 2 {
        return Err(Error::InvalidParameter(format!("N must be at least 2, got {n_max}")));
    }
    let top = n_max - n_max.rem_euclid(2);
    (-top..=top)
        .step_by(2)
        .filter(|n| *n != 0)
        .map(DyadicIndex::new)
        .collect()
}

fn window(n_max: i64) -> Result<Window> {
    Window::interval(-(n_max as f64) - 1.0, n_max as f64 + 1.0)
}

fn build(n_max: i64, signed: bool, mass: impl Fn(&DyadicIndex) -> (i64, i64)) -> Result<PointMultiSet> {
    let mut items = Vec::new();
    for d in indices(n_max)? {
        let (up, down) = mass(&d);
        items.push((Point::scalar(d.upper()), up));
        items.push((Point::scalar(d.lower()), down));
    }
    PointMultiSet::new(window(n_max)?, items, signed)
}

/// Mass `+α(n)` at `n + 1/(α+1)²` and `-α(n)` at `n - 1/(α+1)²` for even
/// nonzero `n` in `[-N, N]`; window `[-N-1, N+1]`.
pub fn theorem1_set(n_max: i64) -> Result<PointMultiSet> {
    build(n_max, true, |d| (d.alpha as i64, -(d.alpha as i64)))
}

/// Same points as [`theorem1_set`] with masses `+1` and `-1`.
pub fn theorem2_set(n_max: i64) -> Result<PointMultiSet> {
    build(n_max, true, |_| (1, -1))
}

/// Every point of [`theorem2_set`] with multiplicity one.
pub fn corollary_set(n_max: i64) -> Result<PointMultiSet> {
    build(n_max, false, |_| (1, 1))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationRow {
    pub k: u32,
    pub center: f64,
    pub variation: i64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VariationTable {
    pub rows: Vec<VariationRow>,
    /// Every row has variation `>= 2k` and the sequence strictly increases.
    pub holds: bool,
}

/// Variation of the set in the open unit ball around `2^k`, `k = 1..=K`.
pub fn verify_unbounded_variation(a: &PointMultiSet, k_max: u32) -> Result<VariationTable> {
    if a.dim() != 1 {
        return Err(Error::DimensionMismatch {
            expected: 1,
            got: a.dim(),
        });
    }
    if k_max == 0 || k_max > 62 {
        return Err(Error::InvalidParameter(format!("K must lie in 1..=62, got {k_max}")));
    }
    if !a.window().contains_ball(&Point::scalar((1i64 << k_max) as f64), 1.0) {
        return Err(Error::WindowTooSmall);
    }
    let rows = (1..=k_max)
        .map(|k| {
            let center = (1i64 << k) as f64;
            Ok(VariationRow {
                k,
                center,
                variation: variation_in_ball(a, &Point::scalar(center), 1.0)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let holds = rows.iter().all(|r| r.variation >= 2 * r.k as i64)
        && rows.windows(2).all(|w| w[0].variation < w[1].variation);
    Ok(VariationTable { rows, holds })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakApRow {
    pub level: u32,
    pub tau: f64,
    pub sup_diff: f64,
    pub bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WeakApTable {
    pub deriv_sup: f64,
    pub tolerance: f64,
    pub rows: Vec<WeakApRow>,
    pub holds: bool,
}

/// For each level `ℓ` and `j = 1..=multiples`, the shift `τ = j·2^ℓ` of the
/// convolution with `φ` is compared against `4M/ℓ`, where `M = sup |φ'|`.
/// Shifts whose translated grid leaves the window are skipped.
pub fn verify_distributional_ap(
    a: &PointMultiSet,
    phi: &Mollifier,
    levels: &[u32],
    multiples: u32,
    grid: &Grid,
    tolerance: f64,
) -> Result<WeakApTable> {
    if phi.scale() >= 0.5 {
        return Err(Error::InvalidParameter(format!(
            "bump support must lie in (-1/2, 1/2), got scale {}",
            phi.scale()
        )));
    }
    if levels.contains(&0) || levels.iter().any(|l| *l > 62) {
        return Err(Error::InvalidParameter("levels must lie in 1..=62".into()));
    }
    let m = phi.deriv_sup();
    let reach = grid.window.expand(phi.scale());
    let mut rows = Vec::new();
    for &level in levels {
        let bound = 4.0 * m / level as f64;
        for j in 1..=multiples.max(1) {
            let tau = Point::scalar(j as f64 * (1i64 << level) as f64);
            if !a.window().contains_window(&reach.translate(&tau)) {
                break;
            }
            let sup_diff = weak_ap_sup_diff(a, phi, &tau, grid)?;
            rows.push(WeakApRow {
                level,
                tau: tau.x(),
                sup_diff,
                bound,
                holds: sup_diff <= bound + tolerance,
            });
        }
    }
    let holds = !rows.is_empty() && rows.iter().all(|r| r.holds);
    Ok(WeakApTable {
        deriv_sup: m,
        tolerance,
        rows,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonApEntry {
    pub tau: f64,
    /// `None` when the bottleneck exceeds the margin.
    pub eps_star: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct NonApWitness {
    pub entries: Vec<NonApEntry>,
    /// Smallest `ε*` over the candidates; candidates beyond the margin count
    /// as the margin itself, which is a lower bound for them.
    pub min_eps_star: f64,
    pub witness_tau: f64,
    pub eps: f64,
    pub margin: f64,
    /// No candidate is an `ε`-almost period.
    pub holds: bool,
}

/// Bottleneck scan of the positive part of [`theorem2_set`] over the given
/// shifts.
pub fn verify_aplus_not_ap(n_max: i64, eps: f64, candidates: &[f64], margin: f64) -> Result<NonApWitness> {
    let (plus, _) = theorem2_set(n_max)?.split_signs();
    verify_not_ap(&plus, eps, candidates, margin)
}

/// `ε*(τ)` over shifts bounded away from zero, for a positive set on the line.
pub fn verify_not_ap(a: &PointMultiSet, eps: f64, candidates: &[f64], margin: f64) -> Result<NonApWitness> {
    if !(eps > 0.0 && eps < 0.25) {
        return Err(Error::InvalidParameter(format!("eps must lie in (0, 1/4), got {eps}")));
    }
    if candidates.is_empty() {
        return Err(Error::InvalidParameter("no candidate shifts".into()));
    }
    if candidates.iter().any(|t| t.abs() < 0.5) {
        return Err(Error::InvalidParameter("candidates must stay away from 0".into()));
    }
    let policy = MatchPolicy::new(margin)?;
    let entries = candidates
        .par_iter()
        .map(|&tau| {
            let e = match eps_star(a, &Point::scalar(tau), &policy) {
                Ok(e) => Some(e),
                Err(Error::MarginTooSmall { .. }) => None,
                Err(err) => return Err(err),
            };
            Ok(NonApEntry { tau, eps_star: e })
        })
        .collect::<Result<Vec<_>>>()?;
    let (witness_tau, min_eps_star) = entries
        .iter()
        .map(|e| (e.tau, e.eps_star.unwrap_or(margin)))
        .fold((f64::NAN, f64::INFINITY), |best, cur| if cur.1 < best.1 { cur } else { best });
    Ok(NonApWitness {
        entries,
        min_eps_star,
        witness_tau,
        eps,
        margin,
        holds: min_eps_star >= eps,
    })
}

/// Largest `|x - y - 2·round((x - y)/2)|` over all pairs of distinct points,
/// checked exhaustively.
pub fn max_even_offset(a: &PointMultiSet) -> f64 {
    let xs: Vec<f64> = a.items().iter().map(|w| w.point.x()).collect();
    (0..xs.len())
        .into_par_iter()
        .map(|i| {
            xs[i + 1..]
                .iter()
                .map(|y| {
                    let d = xs[i] - y;
                    (d - 2.0 * (d / 2.0).round()).abs()
                })
                .fold(0.0, f64::max)
        })
        .reduce(|| 0.0, f64::max)
}
