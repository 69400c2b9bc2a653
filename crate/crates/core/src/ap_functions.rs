//! Exponential polynomials `P(x) = Σ c_m e^{i<x, λ_m>}` and shift-difference
//! bounds.
//!
//! [`ExpPolynomial::shift_bound`] is a certified majorant of
//! `sup_x |P(x+τ) - P(x)|`; [`grid_sup_diff`] is a grid lower bound usable for
//! any sampled function.

use std::cmp::Ordering;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::model::{Point, Window};

/// Tolerance used when checking that conjugate-paired terms cancel.
pub const REAL_TOL: f64 = 1e-12;

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub frequency: Vec<f64>,
    pub coefficient: Complex64,
}

/// Finite trigonometric sum with pairwise distinct frequencies.
#[derive(Clone, Debug, PartialEq)]
pub struct ExpPolynomial {
    dim: usize,
    terms: Vec<Term>,
}

fn freq_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| *o != Ordering::Equal)
        .unwrap_or(Ordering::Equal)
}

/// `|e^{iθ} - 1|`, computed as `2|sin(θ/2)|` to keep small values accurate.
pub fn chord(theta: f64) -> f64 {
    2.0 * (0.5 * theta).sin().abs()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

impl ExpPolynomial {
    pub fn new<I>(dim: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<f64>, Complex64)>,
    {
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        let mut raw = Vec::new();
        for (mut frequency, coefficient) in terms {
            if frequency.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: frequency.len(),
                });
            }
            if frequency.iter().any(|f| !f.is_finite())
                || !coefficient.re.is_finite()
                || !coefficient.im.is_finite()
            {
                return Err(Error::NonFinite);
            }
            // -0.0 and 0.0 are the same frequency
            for f in frequency.iter_mut() {
                if *f == 0.0 {
                    *f = 0.0;
                }
            }
            raw.push(Term {
                frequency,
                coefficient,
            });
        }
        raw.sort_by(|a, b| freq_cmp(&a.frequency, &b.frequency));
        let mut terms: Vec<Term> = Vec::with_capacity(raw.len());
        for t in raw {
            match terms.last_mut() {
                Some(last) if last.frequency == t.frequency => last.coefficient += t.coefficient,
                _ => terms.push(t),
            }
        }
        terms.retain(|t| t.coefficient != Complex64::new(0.0, 0.0));
        Ok(ExpPolynomial { dim, terms })
    }

    pub fn zero(dim: usize) -> Self {
        ExpPolynomial {
            dim,
            terms: Vec::new(),
        }
    }

    pub fn constant(dim: usize, c: f64) -> Self {
        ExpPolynomial::new(dim, [(vec![0.0; dim], Complex64::new(c, 0.0))]).expect("valid constant")
    }

    /// `a_sin · sin<λ, x> + b_cos · cos<λ, x>`.
    pub fn trig(frequency: Vec<f64>, a_sin: f64, b_cos: f64) -> Result<Self> {
        let dim = frequency.len();
        let neg: Vec<f64> = frequency.iter().map(|f| -f).collect();
        // sin θ = (e^{iθ} - e^{-iθ}) / 2i,  cos θ = (e^{iθ} + e^{-iθ}) / 2
        let plus = Complex64::new(0.5 * b_cos, -0.5 * a_sin);
        let minus = Complex64::new(0.5 * b_cos, 0.5 * a_sin);
        ExpPolynomial::new(dim, [(frequency, plus), (neg, minus)])
    }

    pub fn sine(frequency: Vec<f64>, amplitude: f64) -> Result<Self> {
        ExpPolynomial::trig(frequency, amplitude, 0.0)
    }

    pub fn cosine(frequency: Vec<f64>, amplitude: f64) -> Result<Self> {
        ExpPolynomial::trig(frequency, 0.0, amplitude)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn frequencies(&self) -> impl Iterator<Item = &[f64]> {
        self.terms.iter().map(|t| t.frequency.as_slice())
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &ExpPolynomial) -> Result<Self> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        ExpPolynomial::new(
            self.dim,
            self.terms
                .iter()
                .chain(&other.terms)
                .map(|t| (t.frequency.clone(), t.coefficient))
                .collect::<Vec<_>>(),
        )
    }

    pub fn scale(&self, factor: f64) -> Self {
        ExpPolynomial::new(
            self.dim,
            self.terms
                .iter()
                .map(|t| (t.frequency.clone(), t.coefficient * factor))
                .collect::<Vec<_>>(),
        )
        .expect("scaling keeps validity")
    }

    /// Terms closed under `(λ, c) -> (-λ, conj c)`.
    pub fn is_real_valued(&self) -> bool {
        self.terms.iter().all(|t| {
            let neg: Vec<f64> = t
                .frequency
                .iter()
                .map(|f| if *f == 0.0 { 0.0 } else { -f })
                .collect();
            self.terms
                .binary_search_by(|s| freq_cmp(&s.frequency, &neg))
                .map(|i| (self.terms[i].coefficient - t.coefficient.conj()).norm() <= REAL_TOL)
                .unwrap_or(false)
        })
    }

    /// `Σ |c_m|`, an upper bound for `sup |P|`.
    pub fn coefficient_mass(&self) -> f64 {
        self.terms.iter().map(|t| t.coefficient.norm()).sum()
    }

    pub(crate) fn eval_slice(&self, x: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|t| t.coefficient * Complex64::cis(dot(x, &t.frequency)))
            .sum()
    }

    pub fn eval(&self, x: &Point) -> Result<Complex64> {
        x.check_dim(self.dim)?;
        Ok(self.eval_slice(x.coords()))
    }

    /// Real part of the value; the imaginary part vanishes for real-valued
    /// polynomials up to rounding.
    pub fn eval_real(&self, x: &Point) -> Result<f64> {
        Ok(self.eval(x)?.re)
    }

    pub(crate) fn shift_bound_slice(&self, tau: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| t.coefficient.norm() * chord(dot(tau, &t.frequency)))
            .sum()
    }

    /// `Σ |c_m| |e^{i<τ, λ_m>} - 1|`, never below `sup_x |P(x+τ) - P(x)|`.
    pub fn shift_bound(&self, tau: &Point) -> Result<f64> {
        tau.check_dim(self.dim)?;
        Ok(self.shift_bound_slice(tau.coords()))
    }
}

/// Something that can be evaluated at points of its domain.
pub trait Sampled: Sync {
    fn dim(&self) -> usize;
    /// `None` outside the domain.
    fn value(&self, x: &[f64]) -> Option<Complex64>;
}

impl Sampled for ExpPolynomial {
    fn dim(&self) -> usize {
        self.dim
    }

    fn value(&self, x: &[f64]) -> Option<Complex64> {
        Some(self.eval_slice(x))
    }
}

/// Piecewise-linear interpolant of equally spaced samples on the line.
#[derive(Clone, Debug, PartialEq)]
pub struct SampledLine {
    pub origin: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl Sampled for SampledLine {
    fn dim(&self) -> usize {
        1
    }

    fn value(&self, x: &[f64]) -> Option<Complex64> {
        let n = self.values.len();
        if n == 0 {
            return None;
        }
        let s = (x[0] - self.origin) / self.step;
        let last = (n - 1) as f64;
        if !(-1e-9..=last + 1e-9).contains(&s) {
            return None;
        }
        let s = s.clamp(0.0, last);
        let i = (s.floor() as usize).min(n.saturating_sub(2));
        let v = if n == 1 {
            self.values[0]
        } else {
            let frac = s - i as f64;
            self.values[i] * (1.0 - frac) + self.values[i + 1] * frac
        };
        Some(Complex64::new(v, 0.0))
    }
}

/// Closure-backed function with an explicit domain box.
pub struct FnSampled<F> {
    pub domain: Window,
    pub f: F,
}

impl<F> Sampled for FnSampled<F>
where
    F: Fn(&[f64]) -> f64 + Sync,
{
    fn dim(&self) -> usize {
        self.domain.dim()
    }

    fn value(&self, x: &[f64]) -> Option<Complex64> {
        let p = Point::new(x.to_vec()).ok()?;
        self.domain
            .contains(&p)
            .then(|| Complex64::new((self.f)(x), 0.0))
    }
}

/// Regular grid `lower + i·step` covering a box.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub window: Window,
    pub step: f64,
}

impl Grid {
    pub fn new(window: Window, step: f64) -> Result<Self> {
        if !(step > 0.0 && step.is_finite()) {
            return Err(Error::InvalidParameter(format!("grid step {step}")));
        }
        Ok(Grid { window, step })
    }

    /// Default step: 1e-3 on the line, 1e-2 per axis otherwise.
    pub fn with_default_step(window: Window) -> Self {
        let step = if window.dim() == 1 { 1e-3 } else { 1e-2 };
        Grid { window, step }
    }

    fn counts(&self) -> Vec<usize> {
        self.window
            .lower()
            .coords()
            .iter()
            .zip(self.window.upper().coords())
            .map(|(l, u)| ((u - l) / self.step + 1e-9).floor() as usize + 1)
            .collect()
    }

    pub fn len(&self) -> usize {
        self.counts().iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Coordinates of node `index` in row-major order.
    pub fn node(&self, index: usize) -> Vec<f64> {
        let counts = self.counts();
        let mut rest = index;
        let mut out = vec![0.0; counts.len()];
        for axis in (0..counts.len()).rev() {
            let i = rest % counts[axis];
            rest /= counts[axis];
            out[axis] = self.window.lower().coords()[axis] + i as f64 * self.step;
        }
        out
    }

    pub fn nodes(&self) -> impl Iterator<Item = Vec<f64>> + '_ {
        (0..self.len()).map(move |i| self.node(i))
    }
}

/// `max_{x in grid} |f(x+τ) - f(x)|`: a lower bound for the true supremum.
pub fn grid_sup_diff<S: Sampled + ?Sized>(f: &S, tau: &Point, grid: &Grid) -> Result<f64> {
    tau.check_dim(f.dim())?;
    grid.window.lower().check_dim(f.dim())?;
    let tau = tau.coords();
    (0..grid.len())
        .into_par_iter()
        .map(|i| {
            let x = grid.node(i);
            let shifted: Vec<f64> = x.iter().zip(tau).map(|(a, b)| a + b).collect();
            match (f.value(&shifted), f.value(&x)) {
                (Some(a), Some(b)) => Ok((a - b).norm()),
                _ => Err(Error::RegionExceedsWindow),
            }
        })
        .try_reduce(|| 0.0, |a, b| Ok(a.max(b)))
}
