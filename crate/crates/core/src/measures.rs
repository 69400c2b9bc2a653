//! Associate measures `μ_A = Σ m(x) δ_x` seen through smooth bumps: the
//! convolution `g(x) = Σ m(a) φ(x - a)`, its shift differences, local
//! variation and signed density.

use std::sync::OnceLock;

use rayon::prelude::*;

use crate::ap_functions::Grid;
use crate::error::{Error, Result};
use crate::matching::{density_with, DensityTable};
use crate::model::{euclid, Point, PointMultiSet, Region};

/// Volume of the unit ball of `R^d`, `π^{d/2} / Γ(d/2 + 1)`.
pub fn unit_ball_volume(d: usize) -> Result<f64> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    // V_d = V_{d-2} · 2π / d, V_0 = 1, V_1 = 2
    let mut v = if d % 2 == 0 { 1.0 } else { 2.0 };
    let mut k = if d % 2 == 0 { 2 } else { 3 };
    while k <= d {
        v *= std::f64::consts::TAU / k as f64;
        k += 2;
    }
    Ok(v)
}

/// Radial bump `φ(x) = exp(1 - 1/(1 - |x/s|²))` on `|x| < s`, zero outside.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mollifier {
    scale: f64,
    deriv_sup: f64,
    deriv_argmax: f64,
}

/// Grid step (in units of the scale) of the derivative maximisation.
pub const DERIV_GRID_STEP: f64 = 1e-6;

fn unit_profile(u: f64) -> f64 {
    let q = 1.0 - u * u;
    if q <= 0.0 {
        0.0
    } else {
        (1.0 - 1.0 / q).exp()
    }
}

/// `|d/du unit_profile(u)|` for `u` in `[0, 1)`.
fn unit_slope(u: f64) -> f64 {
    let q = 1.0 - u * u;
    if q <= 0.0 {
        0.0
    } else {
        2.0 * u.abs() * unit_profile(u) / (q * q)
    }
}

impl Mollifier {
    pub fn new(scale: f64) -> Result<Self> {
        if !(scale > 0.0 && scale.is_finite()) {
            return Err(Error::InvalidParameter(format!("mollifier scale {scale}")));
        }
        static UNIT: OnceLock<(f64, f64)> = OnceLock::new();
        let (u, m) = *UNIT.get_or_init(maximise_unit_slope);
        Ok(Mollifier {
            scale,
            deriv_sup: m / scale,
            deriv_argmax: u * scale,
        })
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `sup |φ'|`.
    pub fn deriv_sup(&self) -> f64 {
        self.deriv_sup
    }

    /// Positive point where `|φ'|` peaks; by symmetry `-x` is another.
    pub fn deriv_argmax(&self) -> f64 {
        self.deriv_argmax
    }

    /// Value at distance `r` from the center.
    pub fn radial(&self, r: f64) -> f64 {
        unit_profile(r / self.scale)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        self.radial(x.iter().map(|c| c * c).sum::<f64>().sqrt())
    }

    /// `φ'(x)` on the line.
    pub fn derivative(&self, x: f64) -> f64 {
        let u = x / self.scale;
        -u.signum() * unit_slope(u) / self.scale
    }
}

/// Dense scan on `(0, 1)` followed by golden-section refinement.
fn maximise_unit_slope() -> (f64, f64) {
    let n = (1.0 / DERIV_GRID_STEP) as usize;
    let (mut best_u, mut best) = (0.0, 0.0);
    for i in 1..n {
        let u = i as f64 * DERIV_GRID_STEP;
        let v = unit_slope(u);
        if v > best {
            best = v;
            best_u = u;
        }
    }
    let (mut a, mut b) = (best_u - DERIV_GRID_STEP, best_u + DERIV_GRID_STEP);
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..80 {
        let c = b - inv_phi * (b - a);
        let d = a + inv_phi * (b - a);
        if unit_slope(c) > unit_slope(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let u = 0.5 * (a + b);
    let v = unit_slope(u);
    if v > best {
        (u, v)
    } else {
        (best_u, best)
    }
}

/// Value of the convolution and whether its support reached outside the
/// sampling window.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Convolution {
    pub value: f64,
    pub partial: bool,
}

/// `g(x) = Σ m(a) φ(x - a)`.
pub fn convolve(a: &PointMultiSet, phi: &Mollifier, x: &Point) -> Result<Convolution> {
    x.check_dim(a.dim())?;
    let s = phi.scale;
    let value = a
        .slab(x.x() - s, x.x() + s)
        .iter()
        .map(|w| w.multiplicity as f64 * phi.radial(euclid(x.coords(), w.point.coords())))
        .sum();
    Ok(Convolution {
        value,
        partial: !a.window().contains_ball(x, s),
    })
}

/// `g` at sorted points on the line, sweeping the set once.
pub fn convolve_line(a: &PointMultiSet, phi: &Mollifier, xs: &[f64]) -> Vec<f64> {
    let pts: Vec<(f64, f64)> = a
        .items()
        .iter()
        .map(|w| (w.point.x(), w.multiplicity as f64))
        .collect();
    sweep(&pts, phi, xs)
}

fn sweep(pts: &[(f64, f64)], phi: &Mollifier, xs: &[f64]) -> Vec<f64> {
    let s = phi.scale;
    let mut lo = xs.first().map_or(0, |x0| pts.partition_point(|p| p.0 <= x0 - s));
    xs.iter()
        .map(|&x| {
            while lo < pts.len() && pts[lo].0 <= x - s {
                lo += 1;
            }
            let mut g = 0.0;
            let mut j = lo;
            while j < pts.len() && pts[j].0 < x + s {
                g += pts[j].1 * phi.radial((x - pts[j].0).abs());
                j += 1;
            }
            g
        })
        .collect()
}

const CHUNK: usize = 1 << 14;

/// `max_{x in grid} |g(x + τ) - g(x)|`.
pub fn weak_ap_sup_diff(a: &PointMultiSet, phi: &Mollifier, tau: &Point, grid: &Grid) -> Result<f64> {
    tau.check_dim(a.dim())?;
    grid.window.lower().check_dim(a.dim())?;
    let reach = grid.window.expand(phi.scale);
    if !a.window().contains_window(&reach) || !a.window().contains_window(&reach.translate(tau)) {
        return Err(Error::RegionExceedsWindow);
    }
    let n = grid.len();
    if a.dim() == 1 {
        let pts: Vec<(f64, f64)> = a
            .items()
            .iter()
            .map(|w| (w.point.x(), w.multiplicity as f64))
            .collect();
        let lo = grid.window.lower().x();
        let t = tau.x();
        let chunks = n.div_ceil(CHUNK);
        return Ok((0..chunks)
            .into_par_iter()
            .map(|c| {
                let xs: Vec<f64> = (c * CHUNK..((c + 1) * CHUNK).min(n))
                    .map(|i| lo + i as f64 * grid.step)
                    .collect();
                let shifted: Vec<f64> = xs.iter().map(|x| x + t).collect();
                let g0 = sweep(&pts, phi, &xs);
                let g1 = sweep(&pts, phi, &shifted);
                g0.iter()
                    .zip(&g1)
                    .map(|(p, q)| (q - p).abs())
                    .fold(0.0, f64::max)
            })
            .reduce(|| 0.0, f64::max));
    }
    (0..n)
        .into_par_iter()
        .map(|i| {
            let x = Point::new(grid.node(i))?;
            let xt = &x + tau;
            Ok((convolve(a, phi, &xt)?.value - convolve(a, phi, &x)?.value).abs())
        })
        .try_reduce(|| 0.0, |p, q| Ok(f64::max(p, q)))
}

/// `Σ |m(a)|` over the open ball `B(c, r)`.
pub fn variation_in_ball(a: &PointMultiSet, c: &Point, r: f64) -> Result<i64> {
    Ok(a.variation_in(&Region::ball(c.clone(), r))?.value)
}

/// Signed analogue of the density table: `μ(B(x, R)) / (ω_d R^d)`.
pub fn signed_density(a: &PointMultiSet, centers: &[Point], radii: &[f64]) -> Result<DensityTable> {
    density_with(a, centers, radii, |region| Ok(a.card_in(region)?.value))
}
