//! Uniform bucket grid for neighbour queries in small dimensions.

use std::collections::HashMap;

use crate::model::euclid;

pub(crate) struct SpatialIndex {
    dim: usize,
    cell: f64,
    points: Vec<Vec<f64>>,
    buckets: HashMap<Vec<i64>, Vec<usize>>,
    key_lo: Vec<i64>,
    key_hi: Vec<i64>,
}

impl SpatialIndex {
    pub(crate) fn new(points: Vec<Vec<f64>>, cell: f64) -> Self {
        assert!(cell > 0.0 && cell.is_finite());
        let dim = points.first().map_or(1, Vec::len);
        let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
        let mut key_lo = vec![i64::MAX; dim];
        let mut key_hi = vec![i64::MIN; dim];
        for (i, p) in points.iter().enumerate() {
            let key = key_of(p, cell);
            for a in 0..dim {
                key_lo[a] = key_lo[a].min(key[a]);
                key_hi[a] = key_hi[a].max(key[a]);
            }
            buckets.entry(key).or_default().push(i);
        }
        SpatialIndex {
            dim,
            cell,
            points,
            buckets,
            key_lo,
            key_hi,
        }
    }

    pub(crate) fn point(&self, i: usize) -> &[f64] {
        &self.points[i]
    }

    fn for_cells_in(&self, lo: &[i64], hi: &[i64], mut visit: impl FnMut(&[usize])) {
        let lo: Vec<i64> = lo.iter().zip(&self.key_lo).map(|(a, b)| *a.max(b)).collect();
        let hi: Vec<i64> = hi.iter().zip(&self.key_hi).map(|(a, b)| *a.min(b)).collect();
        if lo.iter().zip(&hi).any(|(a, b)| a > b) {
            return;
        }
        let mut key = lo.clone();
        loop {
            if let Some(ids) = self.buckets.get(&key) {
                visit(ids);
            }
            let mut axis = 0;
            loop {
                if axis == self.dim {
                    return;
                }
                key[axis] += 1;
                if key[axis] <= hi[axis] {
                    break;
                }
                key[axis] = lo[axis];
                axis += 1;
            }
        }
    }

    /// Indices of points at Euclidean distance `<= r` from `q`, ascending.
    pub(crate) fn within(&self, q: &[f64], r: f64) -> Vec<usize> {
        let lo: Vec<i64> = q.iter().map(|x| ((x - r) / self.cell).floor() as i64).collect();
        let hi: Vec<i64> = q.iter().map(|x| ((x + r) / self.cell).floor() as i64).collect();
        let mut out = Vec::new();
        self.for_cells_in(&lo, &hi, |ids| {
            out.extend(ids.iter().copied().filter(|&i| euclid(&self.points[i], q) <= r));
        });
        out.sort_unstable();
        out
    }

    /// Nearest point and its distance.
    pub(crate) fn nearest(&self, q: &[f64]) -> Option<(usize, f64)> {
        if self.points.is_empty() {
            return None;
        }
        let center = key_of(q, self.cell);
        let mut best: Option<(usize, f64)> = None;
        let mut ring = 0i64;
        loop {
            let lo: Vec<i64> = center.iter().map(|c| c - ring).collect();
            let hi: Vec<i64> = center.iter().map(|c| c + ring).collect();
            self.for_cells_in(&lo, &hi, |ids| {
                for &i in ids {
                    let d = euclid(&self.points[i], q);
                    if best.map_or(true, |(bi, bd)| d < bd || (d == bd && i < bi)) {
                        best = Some((i, d));
                    }
                }
            });
            // points in rings beyond `ring` are farther than ring * cell
            if let Some((_, d)) = best {
                if d <= ring as f64 * self.cell {
                    return best;
                }
            }
            let covers_all = (0..self.dim)
                .all(|a| lo[a] <= self.key_lo[a] && hi[a] >= self.key_hi[a]);
            if covers_all {
                return best;
            }
            ring += 1;
        }
    }
}

fn key_of(p: &[f64], cell: f64) -> Vec<i64> {
    p.iter().map(|x| (x / cell).floor() as i64).collect()
}
