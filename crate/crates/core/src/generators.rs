//! Point sets built as perturbations `a_k = kΓ + F(k)` of full-rank lattices,
//! plus separation and covering diagnostics.

use rayon::prelude::*;

use crate::ap_functions::ExpPolynomial;
use crate::error::{Error, Result};
use crate::kronecker::common_integer_almost_periods;
use crate::model::{Point, PointMultiSet, Window};
use crate::spatial::SpatialIndex;

/// Non-degenerate `d×d` matrix; lattice points are the row combinations `kΓ`.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeMatrix {
    rows: Vec<Vec<f64>>,
}

impl LatticeMatrix {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let d = rows.len();
        if d == 0 {
            return Err(Error::InvalidParameter("empty lattice matrix".into()));
        }
        if let Some(r) = rows.iter().find(|r| r.len() != d) {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: r.len(),
            });
        }
        if rows.iter().flatten().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        let m = LatticeMatrix { rows };
        let det = m.det();
        if det.abs() <= 1e-9 {
            return Err(Error::DegenerateLattice { det });
        }
        Ok(m)
    }

    pub fn identity(d: usize) -> Self {
        LatticeMatrix {
            rows: (0..d)
                .map(|i| (0..d).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
        }
    }

    /// `g·I` in dimension `d`.
    pub fn scalar(d: usize, g: f64) -> Result<Self> {
        LatticeMatrix::new(
            (0..d)
                .map(|i| (0..d).map(|j| if i == j { g } else { 0.0 }).collect())
                .collect(),
        )
    }

    pub fn dim(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn det(&self) -> f64 {
        let n = self.rows.len();
        let mut a = self.rows.clone();
        let mut det = 1.0;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .expect("non-empty");
            if a[pivot][col] == 0.0 {
                return 0.0;
            }
            if pivot != col {
                a.swap(pivot, col);
                det = -det;
            }
            det *= a[col][col];
            for r in col + 1..n {
                let f = a[r][col] / a[col][col];
                for c in col..n {
                    a[r][c] -= f * a[col][c];
                }
            }
        }
        det
    }

    fn inverse(&self) -> Vec<Vec<f64>> {
        let n = self.rows.len();
        let mut a: Vec<Vec<f64>> = self
            .rows
            .iter()
            .enumerate()
            .map(|(i, r)| {
                let mut row = r.clone();
                row.extend((0..n).map(|j| if i == j { 1.0 } else { 0.0 }));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
                .expect("non-empty");
            a.swap(pivot, col);
            let p = a[col][col];
            for c in 0..2 * n {
                a[col][c] /= p;
            }
            for r in 0..n {
                if r != col {
                    let f = a[r][col];
                    for c in 0..2 * n {
                        a[r][c] -= f * a[col][c];
                    }
                }
            }
        }
        a.into_iter().map(|r| r[n..].to_vec()).collect()
    }

    /// `kΓ`.
    pub fn apply(&self, k: &[i64]) -> Vec<f64> {
        let d = self.rows.len();
        (0..d)
            .map(|j| k.iter().zip(&self.rows).map(|(ki, row)| *ki as f64 * row[j]).sum())
            .collect()
    }
}

fn row_times(v: &[f64], m: &[Vec<f64>]) -> Vec<f64> {
    let d = m.len();
    (0..d)
        .map(|j| v.iter().zip(m).map(|(x, row)| x * row[j]).sum())
        .collect()
}

/// Non-empty integer box `lower <= k <= upper`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IndexBox {
    lower: Vec<i64>,
    upper: Vec<i64>,
}

impl IndexBox {
    pub fn new(lower: Vec<i64>, upper: Vec<i64>) -> Result<Self> {
        if lower.is_empty() || lower.len() != upper.len() {
            return Err(Error::InvalidParameter("index box bounds must have equal, positive length".into()));
        }
        if lower.iter().zip(&upper).any(|(l, u)| l > u) {
            return Err(Error::InvalidParameter("empty index box".into()));
        }
        Ok(IndexBox { lower, upper })
    }

    /// `[-k, k]^d`.
    pub fn symmetric(d: usize, k: i64) -> Result<Self> {
        IndexBox::new(vec![-k; d], vec![k; d])
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[i64] {
        &self.lower
    }

    pub fn upper(&self) -> &[i64] {
        &self.upper
    }

    pub fn len(&self) -> usize {
        self.lower
            .iter()
            .zip(&self.upper)
            .map(|(l, u)| (u - l + 1) as usize)
            .product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn index(&self, mut flat: usize) -> Vec<i64> {
        let d = self.lower.len();
        let mut k = vec![0; d];
        for axis in (0..d).rev() {
            let side = (self.upper[axis] - self.lower[axis] + 1) as usize;
            k[axis] = self.lower[axis] + (flat % side) as i64;
            flat /= side;
        }
        k
    }

    fn corners(&self) -> impl Iterator<Item = Vec<i64>> + '_ {
        let d = self.lower.len();
        (0..1usize << d).map(move |mask| {
            (0..d)
                .map(|a| if mask >> a & 1 == 1 { self.upper[a] } else { self.lower[a] })
                .collect()
        })
    }
}

/// An integer almost period `r` of the perturbation together with the
/// lattice shift `τ = rΓ` it induces.
#[derive(Clone, Debug, PartialEq)]
pub struct CertifiedPeriod {
    pub r: Vec<i64>,
    pub tau: Point,
    /// Bound on every component shift difference.
    pub component_eps: f64,
    /// Bound on the displacement `|a_k + τ - a_{k+r}|` (`d · component_eps`).
    pub set_eps: f64,
}

/// A generated perturbed lattice and the data that produced it.
#[derive(Clone, Debug)]
pub struct PerturbedLattice {
    pub set: PointMultiSet,
    pub lattice: LatticeMatrix,
    pub perturbation: Vec<ExpPolynomial>,
    pub index_box: IndexBox,
    /// Points generated inside the window before coincidences were merged.
    pub raw_count: usize,
}

impl PerturbedLattice {
    /// Points were never merged, i.e. `k -> a_k` was injective on the window.
    pub fn is_injective(&self) -> bool {
        self.raw_count == self.set.len()
    }

    /// Certified integer almost periods with `|r|_∞ <= bound`.
    pub fn certified_periods(&self, eps: f64, bound: i64) -> Result<Vec<CertifiedPeriod>> {
        let d = self.lattice.dim();
        Ok(common_integer_almost_periods(&self.perturbation, eps, bound)?
            .into_iter()
            .map(|r| CertifiedPeriod {
                tau: Point::new(self.lattice.apply(&r)).expect("finite"),
                r,
                component_eps: eps,
                set_eps: d as f64 * eps,
            })
            .collect())
    }
}

/// `a_k = kΓ + F(k)` sampled on the window spanned by `kΓ`, `k ∈ K`.
///
/// The window is the bounding box of the image of the index box. Indices
/// outside `K` whose points land in it are generated too, so the sample holds
/// every point of the infinite set inside the window.
pub fn perturbed_lattice(
    lattice: &LatticeMatrix,
    perturbation: &[ExpPolynomial],
    index_box: &IndexBox,
) -> Result<PerturbedLattice> {
    let d = lattice.dim();
    if perturbation.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: perturbation.len(),
        });
    }
    if index_box.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: index_box.dim(),
        });
    }
    for f in perturbation {
        if f.dim() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: f.dim(),
            });
        }
        if !f.is_real_valued() {
            return Err(Error::NotRealValued);
        }
    }

    let mut lo = vec![f64::INFINITY; d];
    let mut hi = vec![f64::NEG_INFINITY; d];
    for k in index_box.corners() {
        let y = lattice.apply(&k);
        for a in 0..d {
            lo[a] = lo[a].min(y[a]);
            hi[a] = hi[a].max(y[a]);
        }
    }
    let window = Window::new(Point::new(lo.clone())?, Point::new(hi.clone())?).map_err(|_| {
        Error::InvalidParameter("index box must span every axis".into())
    })?;

    // every k with kΓ + F(k) in the window has kΓ within `reach` of it
    let reach = perturbation
        .iter()
        .map(ExpPolynomial::coefficient_mass)
        .fold(0.0, f64::max);
    let inv = lattice.inverse();
    let mut klo = vec![i64::MAX; d];
    let mut khi = vec![i64::MIN; d];
    for mask in 0..1usize << d {
        let y: Vec<f64> = (0..d)
            .map(|a| {
                if mask >> a & 1 == 1 {
                    hi[a] + reach
                } else {
                    lo[a] - reach
                }
            })
            .collect();
        let k = row_times(&y, &inv);
        for a in 0..d {
            klo[a] = klo[a].min(k[a].floor() as i64 - 1);
            khi[a] = khi[a].max(k[a].ceil() as i64 + 1);
        }
    }
    let search = IndexBox::new(klo, khi)?;

    let points: Vec<Point> = (0..search.len())
        .into_par_iter()
        .filter_map(|flat| {
            let k = search.index(flat);
            let kf: Vec<f64> = k.iter().map(|x| *x as f64).collect();
            let mut a = lattice.apply(&k);
            for (j, f) in perturbation.iter().enumerate() {
                a[j] += f.eval_slice(&kf).re;
            }
            let p = Point::new(a).ok()?;
            window.contains(&p).then_some(p)
        })
        .collect();
    let raw_count = points.len();
    let set = PointMultiSet::from_points(window, points)?;
    Ok(PerturbedLattice {
        set,
        lattice: lattice.clone(),
        perturbation: perturbation.to_vec(),
        index_box: index_box.clone(),
        raw_count,
    })
}

/// The period-free set `k + (1/5)(sin k_1, …, sin k_d)`.
pub fn sine_example(d: usize, index_box: &IndexBox) -> Result<PerturbedLattice> {
    if d == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    let f = (0..d)
        .map(|j| {
            let mut freq = vec![0.0; d];
            freq[j] = 1.0;
            ExpPolynomial::sine(freq, 0.2)
        })
        .collect::<Result<Vec<_>>>()?;
    perturbed_lattice(&LatticeMatrix::identity(d), &f, index_box)
}

fn coords(a: &PointMultiSet) -> Vec<Vec<f64>> {
    a.items().iter().map(|w| w.point.coords().to_vec()).collect()
}

/// Minimum distance between distinct points of the set.
pub fn min_separation(a: &PointMultiSet) -> Result<f64> {
    let n = a.len();
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    if a.dim() == 1 {
        let xs: Vec<f64> = a.items().iter().map(|w| w.point.x()).collect();
        return Ok(xs.windows(2).map(|w| w[1] - w[0]).fold(f64::INFINITY, f64::min));
    }
    let pts = coords(a);
    let w = a.window();
    let volume: f64 = w
        .lower()
        .coords()
        .iter()
        .zip(w.upper().coords())
        .map(|(l, u)| u - l)
        .product();
    let mut cell = (volume / n as f64).powf(1.0 / a.dim() as f64);
    loop {
        let index = SpatialIndex::new(pts.clone(), cell);
        let best = (0..n)
            .into_par_iter()
            .map(|i| {
                index
                    .within(&pts[i], cell)
                    .into_iter()
                    .filter(|&j| j != i)
                    .map(|j| crate::model::euclid(&pts[i], index.point(j)))
                    .fold(f64::INFINITY, f64::min)
            })
            .reduce(|| f64::INFINITY, f64::min);
        // any pair at distance <= cell was examined
        if best <= cell {
            return Ok(best);
        }
        cell *= 2.0;
    }
}

/// Largest distance from a node of the grid over the inner window (shrunk by
/// `margin`) to the nearest point of the set.
pub fn covering_radius_window(a: &PointMultiSet, margin: f64, step: f64) -> Result<f64> {
    if a.is_empty() {
        return Err(Error::TooFewPoints { needed: 1, got: 0 });
    }
    let inner = a.window().shrink(margin)?;
    let grid = crate::ap_functions::Grid::new(inner, step)?;
    if a.dim() == 1 {
        let xs: Vec<f64> = a.items().iter().map(|w| w.point.x()).collect();
        return Ok((0..grid.len())
            .into_par_iter()
            .map(|i| {
                let x = grid.node(i)[0];
                let j = xs.partition_point(|v| *v < x);
                let right = xs.get(j).map_or(f64::INFINITY, |v| v - x);
                let left = if j > 0 { x - xs[j - 1] } else { f64::INFINITY };
                right.min(left)
            })
            .reduce(|| 0.0, f64::max));
    }
    let pts = coords(a);
    let n = pts.len();
    let w = a.window();
    let volume: f64 = w
        .lower()
        .coords()
        .iter()
        .zip(w.upper().coords())
        .map(|(l, u)| u - l)
        .product();
    let index = SpatialIndex::new(pts, (volume / n as f64).powf(1.0 / a.dim() as f64));
    Ok((0..grid.len())
        .into_par_iter()
        .map(|i| index.nearest(&grid.node(i)).map_or(f64::INFINITY, |(_, d)| d))
        .reduce(|| 0.0, f64::max))
}
