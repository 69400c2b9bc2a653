//! Integer solutions of Kronecker systems `|e^{i<r, λ_n>} - 1| < δ` and the
//! common integer almost periods they certify for exponential polynomials.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::ap_functions::{chord, ExpPolynomial};
use crate::error::{Error, Result};

/// Exhaustive scans are limited to this many lattice points.
pub const MAX_SCAN_POINTS: u64 = 200_000_000;
pub const MAX_SEARCH_DIM: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct KroneckerSystem {
    frequencies: Vec<Vec<f64>>,
    delta: f64,
    search_bound: i64,
    dim: usize,
}

impl KroneckerSystem {
    pub fn new(frequencies: Vec<Vec<f64>>, delta: f64, search_bound: i64) -> Result<Self> {
        let dim = frequencies
            .first()
            .map(Vec::len)
            .ok_or_else(|| Error::InvalidParameter("at least one frequency is required".into()))?;
        KroneckerSystem::with_dim(dim, frequencies, delta, search_bound)
    }

    /// Like [`KroneckerSystem::new`] but allows an empty frequency list, in
    /// which case every integer vector solves the system.
    pub fn with_dim(
        dim: usize,
        frequencies: Vec<Vec<f64>>,
        delta: f64,
        search_bound: i64,
    ) -> Result<Self> {
        if !(delta > 0.0) {
            return Err(Error::InvalidParameter(format!("delta must be positive, got {delta}")));
        }
        if search_bound < 1 {
            return Err(Error::InvalidParameter(format!(
                "search bound must be at least 1, got {search_bound}"
            )));
        }
        if dim == 0 {
            return Err(Error::InvalidParameter("dimension must be positive".into()));
        }
        for f in &frequencies {
            if f.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: f.len(),
                });
            }
            if f.iter().any(|x| !x.is_finite()) {
                return Err(Error::NonFinite);
            }
        }
        Ok(KroneckerSystem {
            frequencies,
            delta,
            search_bound,
            dim,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn search_bound(&self) -> i64 {
        self.search_bound
    }

    /// `max_n |e^{i<r, λ_n>} - 1|`.
    pub fn residual(&self, r: &[i64]) -> f64 {
        self.frequencies
            .iter()
            .map(|f| chord(phase(r, f)))
            .fold(0.0, f64::max)
    }

    fn accepts(&self, r: &[i64]) -> bool {
        self.residual(r) < self.delta
    }

    /// Second route through the complex exponential itself.
    fn verify(&self, r: &[i64]) -> bool {
        self.frequencies
            .iter()
            .all(|f| (Complex64::cis(phase(r, f)) - 1.0).norm() < self.delta * (1.0 + 1e-9))
    }
}

fn phase(r: &[i64], f: &[f64]) -> f64 {
    r.iter().zip(f).map(|(k, l)| *k as f64 * l).sum()
}

pub fn sup_norm(r: &[i64]) -> i64 {
    r.iter().map(|k| k.abs()).max().unwrap_or(0)
}

fn check_limits(dim: usize, bound: i64) -> Result<()> {
    if dim > MAX_SEARCH_DIM {
        return Err(Error::SearchLimit(format!(
            "exhaustive search supports dimension <= {MAX_SEARCH_DIM}, got {dim}"
        )));
    }
    let side = 2 * bound as u64 + 1;
    let total = side.checked_pow(dim as u32).unwrap_or(u64::MAX);
    if total > MAX_SCAN_POINTS {
        return Err(Error::SearchLimit(format!(
            "box of {total} lattice points exceeds {MAX_SCAN_POINTS}"
        )));
    }
    Ok(())
}

/// All `r` with `|r|_∞ <= B` solving the system, sorted by `|r|_∞` and then
/// lexicographically.
pub fn solve_system(sys: &KroneckerSystem) -> Result<Vec<Vec<i64>>> {
    let d = sys.dim;
    let b = sys.search_bound;
    check_limits(d, b)?;
    let side = (2 * b + 1) as usize;
    let mut found: Vec<Vec<i64>> = (-b..=b)
        .into_par_iter()
        .flat_map_iter(|first| {
            let inner = side.pow(d as u32 - 1);
            (0..inner).filter_map(move |mut idx| {
                let mut r = vec![first; d];
                for axis in (1..d).rev() {
                    r[axis] = (idx % side) as i64 - b;
                    idx /= side;
                }
                sys.accepts(&r).then_some(r)
            })
        })
        .collect();
    found.retain(|r| sys.verify(r));
    found.sort_by(|x, y| sup_norm(x).cmp(&sup_norm(y)).then_with(|| x.cmp(y)));
    Ok(found)
}

/// Denominators `q <= max_den` of the continued-fraction convergents of `x`.
pub fn convergent_denominators(x: f64, max_den: i64) -> Vec<i64> {
    let mut out = Vec::new();
    let (mut q_prev, mut q) = (1i64, 0i64);
    let mut rest = x.abs();
    for _ in 0..64 {
        let a = rest.floor();
        if a > i64::MAX as f64 {
            break;
        }
        let q_next = match (a as i64).checked_mul(q).and_then(|v| v.checked_add(q_prev)) {
            Some(v) => v,
            None => break,
        };
        if q_next > max_den {
            break;
        }
        if out.last() != Some(&q_next) {
            out.push(q_next);
        }
        q_prev = q;
        q = q_next;
        let frac = rest - a;
        if frac < 1e-15 {
            break;
        }
        rest = 1.0 / frac;
    }
    out
}

/// Candidate integer solutions for a single frequency on the line: the
/// convergent denominators of `λ / 2π` and their negatives, plus zero. Each
/// candidate still has to be checked against the system.
pub fn convergent_candidates(lambda: f64, bound: i64) -> Vec<i64> {
    let mut out = vec![0];
    for q in convergent_denominators(lambda / std::f64::consts::TAU, bound) {
        out.push(q);
        out.push(-q);
    }
    out.sort_by_key(|q| (q.abs(), *q));
    out.dedup();
    out
}

/// Integer vectors `r`, `|r|_∞ <= B`, that are certified common
/// `eps`-almost periods of every component.
pub fn common_integer_almost_periods(
    components: &[ExpPolynomial],
    eps: f64,
    bound: i64,
) -> Result<Vec<Vec<i64>>> {
    if !(eps > 0.0) {
        return Err(Error::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    let dim = components
        .first()
        .map(ExpPolynomial::dim)
        .ok_or_else(|| Error::InvalidParameter("no components".into()))?;
    if let Some(bad) = components.iter().find(|c| c.dim() != dim) {
        return Err(Error::DimensionMismatch {
            expected: dim,
            got: bad.dim(),
        });
    }
    let mut freqs: Vec<Vec<f64>> = components
        .iter()
        .flat_map(|c| c.frequencies().map(<[f64]>::to_vec))
        .collect();
    freqs.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    freqs.dedup();
    let mass = components
        .iter()
        .map(ExpPolynomial::coefficient_mass)
        .fold(0.0, f64::max);
    let delta = if mass > 0.0 { eps / mass } else { f64::INFINITY };
    let sys = KroneckerSystem::with_dim(dim, freqs, delta, bound)?;
    let mut found = solve_system(&sys)?;
    found.retain(|r| {
        let tau: Vec<f64> = r.iter().map(|k| *k as f64).collect();
        components.iter().all(|c| c.shift_bound_slice(&tau) < eps)
    });
    Ok(found)
}

/// Largest gap between consecutive values inside `[lo, hi]`; infinite when
/// fewer than two values fall in the range.
pub fn max_gap(sorted: &[f64], lo: f64, hi: f64) -> f64 {
    let inside: Vec<f64> = sorted
        .iter()
        .copied()
        .filter(|v| (lo..=hi).contains(v))
        .collect();
    if inside.len() < 2 {
        return f64::INFINITY;
    }
    inside
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(0.0, f64::max)
}

/// First coordinates of integer vectors, sorted.
pub fn project_first(periods: &[Vec<i64>]) -> Vec<f64> {
    let mut v: Vec<f64> = periods.iter().map(|r| r[0] as f64).collect();
    v.sort_by(f64::total_cmp);
    v
}
