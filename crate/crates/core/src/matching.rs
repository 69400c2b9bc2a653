//! Windowed bottleneck matching: how far a set must move so that its shift by
//! `τ` and the set itself can be matched point to point.
//!
//! On a window the bijection of the infinite set is replaced by two injective
//! matchings. Let `C` be the intersection of the window with its translate by
//! `τ`, shrunk by the policy margin. Every point of `A + τ` inside `C` must be
//! matched into `A`, and every point of `A` inside `C` into `A + τ`;
//! `ε*(τ)` is the larger of the two bottleneck values. Points of
//! multiplicity `m` take `m` slots.
//!
//! On the line the bottleneck is found by a greedy feasibility test and an
//! exact bisection over the binary64 representation of candidate values. In
//! higher dimension the candidates are the pairwise distances, tested with
//! Hopcroft–Karp.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::kronecker::max_gap;
use crate::measures::unit_ball_volume;
use crate::model::{euclid, Point, PointMultiSet, Region, Window};
use crate::spatial::SpatialIndex;

const NONE: usize = usize::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatchPolicy {
    /// Boundary margin; bottleneck values above it are not trusted.
    pub margin: f64,
}

impl MatchPolicy {
    pub fn new(margin: f64) -> Result<Self> {
        if !(margin >= 0.0) || !margin.is_finite() {
            return Err(Error::InvalidParameter(format!("margin {margin}")));
        }
        Ok(MatchPolicy { margin })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Direction {
    /// A point of `A + τ` matched into `A`.
    Forward,
    /// A point of `A` matched into `A + τ`.
    Backward,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchedPair {
    pub direction: Direction,
    pub source: Vec<f64>,
    pub target: Vec<f64>,
    pub distance: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MatchReport {
    pub tau: Vec<f64>,
    pub eps_star: f64,
    pub forward_eps: f64,
    pub backward_eps: f64,
    /// Inner source slots of the forward and backward matchings.
    pub inner_counts: (usize, usize),
    pub matched_pairs: Vec<MatchedPair>,
    pub policy: MatchPolicy,
}

/// Bottleneck value and matching of a sorted source line into a sorted
/// target line, or `None` if no injection exists with all distances `<= cap`.
/// Pairs are `(source index, target index)`; among optimal matchings the
/// lexicographically smallest is returned.
pub fn bottleneck_line(sources: &[f64], targets: &[f64], cap: f64) -> Option<(f64, Vec<(usize, usize)>)> {
    let eps = bottleneck_line_value(sources, targets, cap)?;
    let mut pairs = Vec::with_capacity(sources.len());
    let ok = greedy_line(sources, targets, eps, Some(&mut pairs));
    debug_assert!(ok);
    Some((eps, pairs))
}

fn bottleneck_line_value(sources: &[f64], targets: &[f64], cap: f64) -> Option<f64> {
    if sources.is_empty() {
        return Some(0.0);
    }
    if sources.len() > targets.len() {
        return None;
    }
    // each source needs at least its nearest target
    let mut lower = 0.0f64;
    let mut j = 0;
    for &s in sources {
        while j + 1 < targets.len() && targets[j + 1] <= s {
            j += 1;
        }
        let mut best = (s - targets[j]).abs();
        if j + 1 < targets.len() {
            best = best.min((s - targets[j + 1]).abs());
        }
        lower = lower.max(best);
    }
    if lower > cap {
        return None;
    }
    if greedy_line(sources, targets, lower, None) {
        return Some(lower);
    }
    if !greedy_line(sources, targets, cap, None) {
        return None;
    }
    // feasibility only changes at computed distances, so the smallest
    // feasible binary64 value is attained by some pair
    let (mut lo, mut hi) = (lower.to_bits(), cap.to_bits());
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if greedy_line(sources, targets, f64::from_bits(mid), None) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Some(f64::from_bits(hi))
}

/// Each source takes the leftmost unused target within `eps`.
fn greedy_line(sources: &[f64], targets: &[f64], eps: f64, mut pairs: Option<&mut Vec<(usize, usize)>>) -> bool {
    let mut j = 0;
    for (i, &s) in sources.iter().enumerate() {
        while j < targets.len() && targets[j] < s && s - targets[j] > eps {
            j += 1;
        }
        if j == targets.len() || (targets[j] - s).abs() > eps {
            return false;
        }
        if let Some(p) = pairs.as_deref_mut() {
            p.push((i, j));
        }
        j += 1;
    }
    true
}

/// Bottleneck injective matching of `sources` into `targets` in any
/// dimension; `None` if infeasible with distances `<= cap`. Among optimal
/// matchings the lexicographically smallest `(source, target)` list is
/// returned.
pub fn bottleneck_general(
    sources: &[Vec<f64>],
    targets: &[Vec<f64>],
    cap: f64,
) -> Option<(f64, Vec<(usize, usize)>)> {
    let (eps, adj) = bottleneck_general_value(sources, targets, cap)?;
    if sources.is_empty() {
        return Some((0.0, Vec::new()));
    }
    let graph: Vec<Vec<usize>> = adj
        .iter()
        .map(|row| row.iter().filter(|(_, d)| *d <= eps).map(|(t, _)| *t).collect())
        .collect();
    let (size, mut match_l, mut match_r) = hopcroft_karp(&graph, targets.len());
    debug_assert_eq!(size, sources.len());
    lexicographic_refine(&graph, &mut match_l, &mut match_r);
    Some((eps, match_l.into_iter().enumerate().collect()))
}

type Adjacency = Vec<Vec<(usize, f64)>>;

fn bottleneck_general_value(sources: &[Vec<f64>], targets: &[Vec<f64>], cap: f64) -> Option<(f64, Adjacency)> {
    if sources.is_empty() {
        return Some((0.0, Vec::new()));
    }
    if sources.len() > targets.len() {
        return None;
    }
    let dim = sources[0].len();
    let spread = bounding_volume(targets).max(1e-300);
    let cell = (spread / targets.len() as f64).powf(1.0 / dim as f64).max(1e-9);
    let index = SpatialIndex::new(targets.to_vec(), cell);
    let mut lower = 0.0f64;
    for s in sources {
        let (_, d) = index.nearest(s)?;
        lower = lower.max(d);
    }
    if lower > cap {
        return None;
    }
    let mut radius = if lower > 0.0 { lower } else { cell.min(cap) };
    loop {
        radius = radius.min(cap);
        let adj: Adjacency = sources
            .iter()
            .map(|s| {
                index
                    .within(s, radius)
                    .into_iter()
                    .map(|t| (t, euclid(s, &targets[t])))
                    .collect()
            })
            .collect();
        let mut candidates: Vec<f64> = adj.iter().flatten().map(|(_, d)| *d).filter(|d| *d >= lower).collect();
        candidates.sort_by(f64::total_cmp);
        candidates.dedup();
        let feasible = |eps: f64| {
            let graph: Vec<Vec<usize>> = adj
                .iter()
                .map(|row| row.iter().filter(|(_, d)| *d <= eps).map(|(t, _)| *t).collect())
                .collect();
            hopcroft_karp(&graph, targets.len()).0 == sources.len()
        };
        if let Some(&top) = candidates.last() {
            if feasible(top) {
                let (mut lo, mut hi) = (0usize, candidates.len() - 1);
                while lo < hi {
                    let mid = (lo + hi) / 2;
                    if feasible(candidates[mid]) {
                        hi = mid;
                    } else {
                        lo = mid + 1;
                    }
                }
                return Some((candidates[lo], adj));
            }
        }
        if radius >= cap {
            return None;
        }
        radius *= 2.0;
    }
}

fn bounding_volume(points: &[Vec<f64>]) -> f64 {
    let d = points[0].len();
    (0..d)
        .map(|a| {
            let (lo, hi) = points
                .iter()
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), p| (l.min(p[a]), h.max(p[a])));
            (hi - lo).max(1.0)
        })
        .product()
}

/// Maximum bipartite matching; returns `(size, match_left, match_right)`.
pub(crate) fn hopcroft_karp(adj: &[Vec<usize>], n_right: usize) -> (usize, Vec<usize>, Vec<usize>) {
    let n_left = adj.len();
    let mut match_l = vec![NONE; n_left];
    let mut match_r = vec![NONE; n_right];
    let mut size = 0;
    let mut dist = vec![u32::MAX; n_left];
    let mut queue = Vec::with_capacity(n_left);
    loop {
        queue.clear();
        for u in 0..n_left {
            if match_l[u] == NONE {
                dist[u] = 0;
                queue.push(u);
            } else {
                dist[u] = u32::MAX;
            }
        }
        let mut found = false;
        let mut head = 0;
        while head < queue.len() {
            let u = queue[head];
            head += 1;
            for &v in &adj[u] {
                let w = match_r[v];
                if w == NONE {
                    found = true;
                } else if dist[w] == u32::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push(w);
                }
            }
        }
        if !found {
            return (size, match_l, match_r);
        }
        let mut it = vec![0usize; n_left];
        let mut stack = Vec::new();
        for root in 0..n_left {
            if match_l[root] != NONE {
                continue;
            }
            stack.clear();
            stack.push(root);
            while let Some(&x) = stack.last() {
                if it[x] == adj[x].len() {
                    dist[x] = u32::MAX;
                    stack.pop();
                    continue;
                }
                let v = adj[x][it[x]];
                let w = match_r[v];
                if w == NONE {
                    for &y in &stack {
                        let vv = adj[y][it[y]];
                        match_l[y] = vv;
                        match_r[vv] = y;
                    }
                    size += 1;
                    break;
                } else if dist[w] != u32::MAX && dist[w] == dist[x] + 1 {
                    stack.push(w);
                } else {
                    it[x] += 1;
                }
            }
        }
    }
}

/// Alternating-path search from left vertex `start` to a free right vertex,
/// avoiding `banned` and using only left vertices accepted by `allowed`.
/// Applies the augmentation and returns `true` on success.
fn reroute(
    start: usize,
    banned: usize,
    adj: &[Vec<usize>],
    match_l: &mut [usize],
    match_r: &mut [usize],
    allowed: impl Fn(usize) -> bool,
) -> bool {
    let mut seen_r = vec![false; match_r.len()];
    let mut seen_l = vec![false; match_l.len()];
    let mut stack: Vec<(usize, usize)> = vec![(start, 0)];
    seen_l[start] = true;
    while let Some(&mut (x, ref mut pos)) = stack.last_mut() {
        if *pos == adj[x].len() {
            stack.pop();
            continue;
        }
        let v = adj[x][*pos];
        *pos += 1;
        if v == banned || seen_r[v] {
            continue;
        }
        seen_r[v] = true;
        let w = match_r[v];
        if w == NONE {
            // each stacked vertex takes the target it last advanced past
            for &(y, p) in &stack {
                let vv = adj[y][p - 1];
                match_l[y] = vv;
                match_r[vv] = y;
            }
            return true;
        }
        if allowed(w) && !seen_l[w] {
            seen_l[w] = true;
            stack.push((w, 0));
        }
    }
    false
}

/// Turns a maximum matching saturating the left side into the
/// lexicographically smallest one on the same graph.
fn lexicographic_refine(adj: &[Vec<usize>], match_l: &mut [usize], match_r: &mut [usize]) {
    for i in 0..adj.len() {
        let mut options = adj[i].clone();
        options.sort_unstable();
        for t in options {
            let old = match_l[i];
            if t >= old {
                break;
            }
            let owner = match_r[t];
            if owner != NONE && owner < i {
                continue;
            }
            match_r[old] = NONE;
            match_l[i] = NONE;
            if owner == NONE {
                match_l[i] = t;
                match_r[t] = i;
                break;
            }
            match_r[t] = NONE;
            match_l[owner] = NONE;
            if reroute(owner, t, adj, match_l, match_r, |w| w > i) {
                match_l[i] = t;
                match_r[t] = i;
                break;
            }
            match_r[t] = owner;
            match_l[owner] = t;
            match_l[i] = old;
            match_r[old] = i;
        }
    }
}

struct Sides {
    forward_sources: Vec<Vec<f64>>,
    backward_sources: Vec<Vec<f64>>,
    plain: Vec<Vec<f64>>,
    shifted: Vec<Vec<f64>>,
}

fn interior(a: &PointMultiSet, tau: &Point, policy: &MatchPolicy) -> Result<Window> {
    if a.is_signed() {
        return Err(Error::SignedSetUnsupported);
    }
    tau.check_dim(a.dim())?;
    let w = a.window();
    w.intersect(&w.translate(tau))
        .ok_or(Error::WindowTooSmall)?
        .shrink(policy.margin)
        .map_err(|_| Error::WindowTooSmall)
}

fn expanded(a: &PointMultiSet) -> Vec<Vec<f64>> {
    let mut out = Vec::with_capacity(a.len());
    for w in a.items() {
        for _ in 0..w.multiplicity {
            out.push(w.point.coords().to_vec());
        }
    }
    out
}

fn sides(a: &PointMultiSet, tau: &Point, inner: &Window) -> Sides {
    let plain = expanded(a);
    let shifted: Vec<Vec<f64>> = plain
        .iter()
        .map(|p| p.iter().zip(tau.coords()).map(|(x, t)| x + t).collect())
        .collect();
    let inside = |p: &Vec<f64>| {
        p.iter()
            .zip(inner.lower().coords().iter().zip(inner.upper().coords()))
            .all(|(x, (l, u))| l <= x && x <= u)
    };
    Sides {
        forward_sources: shifted.iter().filter(|p| inside(p)).cloned().collect(),
        backward_sources: plain.iter().filter(|p| inside(p)).cloned().collect(),
        plain,
        shifted,
    }
}

fn line_sides(a: &PointMultiSet, tau: f64, inner: &Window) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
    let plain = a.expanded_line();
    let shifted: Vec<f64> = plain.iter().map(|x| x + tau).collect();
    let (lo, hi) = (inner.lower().x(), inner.upper().x());
    let fwd: Vec<f64> = shifted.iter().copied().filter(|x| (lo..=hi).contains(x)).collect();
    let bwd: Vec<f64> = plain.iter().copied().filter(|x| (lo..=hi).contains(x)).collect();
    (fwd, bwd, plain, shifted)
}

/// `ε*(τ)` without recording the matching.
pub fn eps_star(a: &PointMultiSet, tau: &Point, policy: &MatchPolicy) -> Result<f64> {
    let inner = interior(a, tau, policy)?;
    let too_small = Error::MarginTooSmall { margin: policy.margin };
    if a.dim() == 1 {
        let (fwd, bwd, plain, shifted) = line_sides(a, tau.x(), &inner);
        let f = bottleneck_line_value(&fwd, &plain, policy.margin).ok_or(too_small.clone())?;
        let b = bottleneck_line_value(&bwd, &shifted, policy.margin).ok_or(too_small)?;
        return Ok(f.max(b));
    }
    let s = sides(a, tau, &inner);
    let f = bottleneck_general_value(&s.forward_sources, &s.plain, policy.margin)
        .ok_or(too_small.clone())?
        .0;
    let b = bottleneck_general_value(&s.backward_sources, &s.shifted, policy.margin)
        .ok_or(too_small)?
        .0;
    Ok(f.max(b))
}

/// Full windowed bottleneck report for the shift `τ`.
pub fn bottleneck_eps(a: &PointMultiSet, tau: &Point, policy: &MatchPolicy) -> Result<MatchReport> {
    let inner = interior(a, tau, policy)?;
    let too_small = Error::MarginTooSmall { margin: policy.margin };
    let (fwd_src, fwd_tgt, bwd_src, bwd_tgt) = if a.dim() == 1 {
        let (f, b, p, s) = line_sides(a, tau.x(), &inner);
        let wrap = |v: Vec<f64>| v.into_iter().map(|x| vec![x]).collect::<Vec<_>>();
        (wrap(f), wrap(p), wrap(b), wrap(s))
    } else {
        let s = sides(a, tau, &inner);
        (s.forward_sources, s.plain, s.backward_sources, s.shifted)
    };
    let solve = |src: &[Vec<f64>], tgt: &[Vec<f64>]| {
        if a.dim() == 1 {
            let s: Vec<f64> = src.iter().map(|p| p[0]).collect();
            let t: Vec<f64> = tgt.iter().map(|p| p[0]).collect();
            bottleneck_line(&s, &t, policy.margin)
        } else {
            bottleneck_general(src, tgt, policy.margin)
        }
    };
    let (forward_eps, fwd_pairs) = solve(&fwd_src, &fwd_tgt).ok_or(too_small.clone())?;
    let (backward_eps, bwd_pairs) = solve(&bwd_src, &bwd_tgt).ok_or(too_small)?;
    let mut matched_pairs = Vec::with_capacity(fwd_pairs.len() + bwd_pairs.len());
    for (direction, pairs, src, tgt) in [
        (Direction::Forward, &fwd_pairs, &fwd_src, &fwd_tgt),
        (Direction::Backward, &bwd_pairs, &bwd_src, &bwd_tgt),
    ] {
        for &(i, j) in pairs {
            matched_pairs.push(MatchedPair {
                direction,
                source: src[i].clone(),
                target: tgt[j].clone(),
                distance: euclid(&src[i], &tgt[j]),
            });
        }
    }
    Ok(MatchReport {
        tau: tau.coords().to_vec(),
        eps_star: forward_eps.max(backward_eps),
        forward_eps,
        backward_eps,
        inner_counts: (fwd_src.len(), bwd_src.len()),
        matched_pairs,
        policy: *policy,
    })
}

/// `ε*(τ) < ε`. The threshold may not exceed the policy margin.
pub fn is_eps_period(a: &PointMultiSet, tau: &Point, eps: f64, policy: &MatchPolicy) -> Result<bool> {
    if eps > policy.margin {
        return Err(Error::MarginTooSmall { margin: policy.margin });
    }
    match eps_star(a, tau, policy) {
        Ok(e) => Ok(e < eps),
        Err(Error::MarginTooSmall { .. }) => Ok(false),
        Err(e) => Err(e),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ScanEntry {
    pub tau: Vec<f64>,
    /// `None` when the bottleneck exceeded the margin.
    pub eps_star: Option<f64>,
    pub accepted: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PeriodScan {
    pub entries: Vec<ScanEntry>,
    pub accepted: Vec<Vec<f64>>,
    /// Largest gap between accepted shifts along the first axis, over the
    /// candidate range.
    pub max_gap: f64,
}

/// Filters candidate shifts by `ε*(τ) < ε`, in parallel.
pub fn scan_periods(a: &PointMultiSet, eps: f64, candidates: &[Point], policy: &MatchPolicy) -> Result<PeriodScan> {
    if eps > policy.margin {
        return Err(Error::MarginTooSmall { margin: policy.margin });
    }
    let entries = candidates
        .par_iter()
        .map(|tau| {
            let e = match eps_star(a, tau, policy) {
                Ok(e) => Some(e),
                Err(Error::MarginTooSmall { .. }) => None,
                Err(err) => return Err(err),
            };
            Ok(ScanEntry {
                tau: tau.coords().to_vec(),
                eps_star: e,
                accepted: e.is_some_and(|e| e < eps),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let accepted: Vec<Vec<f64>> = entries.iter().filter(|e| e.accepted).map(|e| e.tau.clone()).collect();
    let mut firsts: Vec<f64> = accepted.iter().map(|t| t[0]).collect();
    firsts.sort_by(f64::total_cmp);
    let (lo, hi) = candidates
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(l, h), t| (l.min(t.x()), h.max(t.x())));
    Ok(PeriodScan {
        max_gap: max_gap(&firsts, lo, hi),
        entries,
        accepted,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityRow {
    pub center: Vec<f64>,
    pub radius: f64,
    pub count: i64,
    pub density: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DensityTable {
    pub rows: Vec<DensityRow>,
    /// Mean over centers at the largest radius.
    pub estimate: f64,
}

pub(crate) fn density_with(
    a: &PointMultiSet,
    centers: &[Point],
    radii: &[f64],
    count: impl Fn(&Region) -> Result<i64>,
) -> Result<DensityTable> {
    if centers.is_empty() || radii.is_empty() {
        return Err(Error::InvalidParameter("need at least one center and one radius".into()));
    }
    if radii.windows(2).any(|w| w[0] >= w[1]) || radii[0] <= 0.0 {
        return Err(Error::InvalidParameter("radii must be positive and increasing".into()));
    }
    let omega = unit_ball_volume(a.dim())?;
    let mut rows = Vec::new();
    for c in centers {
        c.check_dim(a.dim())?;
        for &r in radii {
            if !a.window().contains_ball(c, r) {
                return Err(Error::RegionExceedsWindow);
            }
            let n = count(&Region::ball(c.clone(), r))?;
            rows.push(DensityRow {
                center: c.coords().to_vec(),
                radius: r,
                count: n,
                density: n as f64 / (omega * r.powi(a.dim() as i32)),
            });
        }
    }
    let top = *radii.last().expect("non-empty");
    let at_top: Vec<f64> = rows.iter().filter(|r| r.radius == top).map(|r| r.density).collect();
    Ok(DensityTable {
        estimate: at_top.iter().sum::<f64>() / at_top.len() as f64,
        rows,
    })
}

/// `card(A ∩ B(x, R)) / (ω_d R^d)` for every center and radius.
pub fn density(a: &PointMultiSet, centers: &[Point], radii: &[f64]) -> Result<DensityTable> {
    density_with(a, centers, radii, |region| Ok(a.card_in(region)?.value))
}

/// Largest unit-ball variation over the given centers.
pub fn card_bound(a: &PointMultiSet, centers: &[Point]) -> Result<i64> {
    centers
        .par_iter()
        .map(|c| {
            c.check_dim(a.dim())?;
            if !a.window().contains_ball(c, 1.0) {
                return Err(Error::RegionExceedsWindow);
            }
            Ok(a.variation_in(&Region::ball(c.clone(), 1.0))?.value)
        })
        .try_reduce(|| 0, |x, y| Ok(x.max(y)))
}

/// Grid of centers over the window shrunk by `margin`.
pub fn center_sweep(window: &Window, margin: f64, step: f64) -> Result<Vec<Point>> {
    let grid = crate::ap_functions::Grid::new(window.shrink(margin)?, step)?;
    grid.nodes().map(Point::new).collect()
}
