//! Finite window samples of multiple (possibly signed) discrete sets.
//!
//! A [`PointMultiSet`] is a list of distinct points in `R^d`, each carrying a
//! nonzero integer multiplicity, together with the box it was sampled on.
//! Boxes are half-open `(lower, upper]` when used as counting regions and
//! balls are open, so counts over disjoint boxes add up exactly.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, Result};

/// Two points closer than this in sup-norm are treated as one point.
pub const COINCIDENCE_TOL: f64 = 1e-12;

/// A point of `R^d` with finite coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Point(coords))
    }

    /// One-dimensional point. Panics on a non-finite value.
    pub fn scalar(x: f64) -> Self {
        assert!(x.is_finite(), "non-finite coordinate");
        Point(vec![x])
    }

    pub fn origin(dim: usize) -> Self {
        Point(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|c| c * c).sum::<f64>().sqrt()
    }

    pub fn sup_norm(&self) -> f64 {
        self.0.iter().fold(0.0, |m, c| m.max(c.abs()))
    }

    pub fn dist(&self, other: &Point) -> f64 {
        euclid(&self.0, &other.0)
    }

    pub fn sup_dist(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .fold(0.0, |m, (a, b)| m.max((a - b).abs()))
    }

    pub(crate) fn check_dim(&self, dim: usize) -> Result<()> {
        if self.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: self.dim(),
            });
        }
        Ok(())
    }

    pub(crate) fn lex_cmp(&self, other: &Point) -> Ordering {
        for (a, b) in self.0.iter().zip(&other.0) {
            match a.total_cmp(b) {
                Ordering::Equal => continue,
                ord => return ord,
            }
        }
        Ordering::Equal
    }
}

pub(crate) fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

impl Add<&Point> for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a + b).collect())
    }
}

impl Sub<&Point> for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        Point(self.0.iter().zip(&rhs.0).map(|(a, b)| a - b).collect())
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point(self.0.iter().map(|a| -a).collect())
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A point with its nonzero integer multiplicity.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightedPoint {
    pub point: Point,
    pub multiplicity: i64,
}

/// Axis-aligned box with `lower[i] < upper[i]` on every axis.
#[derive(Clone, Debug, PartialEq)]
pub struct Window {
    lower: Point,
    upper: Point,
}

impl Window {
    pub fn new(lower: Point, upper: Point) -> Result<Self> {
        lower.check_dim(upper.dim())?;
        if lower.dim() == 0 || lower.0.iter().zip(&upper.0).any(|(l, u)| l >= u) {
            return Err(Error::InvalidWindow);
        }
        Ok(Window { lower, upper })
    }

    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Window::new(Point::new(vec![lo])?, Point::new(vec![hi])?)
    }

    /// The cube `[lo, hi]^dim`.
    pub fn cube(dim: usize, lo: f64, hi: f64) -> Result<Self> {
        Window::new(Point::new(vec![lo; dim])?, Point::new(vec![hi; dim])?)
    }

    pub fn dim(&self) -> usize {
        self.lower.dim()
    }

    pub fn lower(&self) -> &Point {
        &self.lower
    }

    pub fn upper(&self) -> &Point {
        &self.upper
    }

    pub fn min_side(&self) -> f64 {
        self.lower
            .0
            .iter()
            .zip(&self.upper.0)
            .map(|(l, u)| u - l)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn center(&self) -> Point {
        Point(
            self.lower
                .0
                .iter()
                .zip(&self.upper.0)
                .map(|(l, u)| 0.5 * (l + u))
                .collect(),
        )
    }

    /// Closed containment `lower <= p <= upper`.
    pub fn contains(&self, p: &Point) -> bool {
        p.0.iter()
            .zip(self.lower.0.iter().zip(&self.upper.0))
            .all(|(x, (l, u))| *l <= *x && *x <= *u)
    }

    /// Half-open containment `lower < p <= upper`.
    pub fn contains_half_open(&self, p: &Point) -> bool {
        p.0.iter()
            .zip(self.lower.0.iter().zip(&self.upper.0))
            .all(|(x, (l, u))| *l < *x && *x <= *u)
    }

    pub fn contains_window(&self, other: &Window) -> bool {
        self.contains(&other.lower) && self.contains(&other.upper)
    }

    /// Whether the open ball `B(center, radius)` lies in the closed box.
    pub fn contains_ball(&self, center: &Point, radius: f64) -> bool {
        center
            .0
            .iter()
            .zip(self.lower.0.iter().zip(&self.upper.0))
            .all(|(c, (l, u))| c - radius >= *l && c + radius <= *u)
    }

    /// Sup-norm distance from an interior point to the boundary.
    pub fn depth(&self, p: &Point) -> f64 {
        p.0.iter()
            .zip(self.lower.0.iter().zip(&self.upper.0))
            .map(|(x, (l, u))| (x - l).min(u - x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn shrink(&self, margin: f64) -> Result<Window> {
        if margin < 0.0 || 2.0 * margin >= self.min_side() {
            return Err(Error::MarginTooLarge { margin });
        }
        Window::new(
            Point(self.lower.0.iter().map(|l| l + margin).collect()),
            Point(self.upper.0.iter().map(|u| u - margin).collect()),
        )
    }

    pub fn expand(&self, margin: f64) -> Window {
        Window {
            lower: Point(self.lower.0.iter().map(|l| l - margin).collect()),
            upper: Point(self.upper.0.iter().map(|u| u + margin).collect()),
        }
    }

    pub fn translate(&self, by: &Point) -> Window {
        Window {
            lower: &self.lower + by,
            upper: &self.upper + by,
        }
    }

    pub fn intersect(&self, other: &Window) -> Option<Window> {
        let lower = Point(
            self.lower
                .0
                .iter()
                .zip(&other.lower.0)
                .map(|(a, b)| a.max(*b))
                .collect(),
        );
        let upper = Point(
            self.upper
                .0
                .iter()
                .zip(&other.upper.0)
                .map(|(a, b)| a.min(*b))
                .collect(),
        );
        Window::new(lower, upper).ok()
    }
}

/// Counting region: a half-open box or an open ball.
#[derive(Clone, Debug, PartialEq)]
pub enum Region {
    Box(Window),
    Ball { center: Point, radius: f64 },
}

impl Region {
    pub fn ball(center: Point, radius: f64) -> Self {
        Region::Ball { center, radius }
    }

    fn dim(&self) -> usize {
        match self {
            Region::Box(w) => w.dim(),
            Region::Ball { center, .. } => center.dim(),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        match self {
            Region::Box(w) => w.contains_half_open(p),
            Region::Ball { center, radius } => center.dist(p) < *radius,
        }
    }

    /// Range of the first coordinate that can hold points of the region.
    fn first_axis_span(&self) -> (f64, f64) {
        match self {
            Region::Box(w) => (w.lower.x(), w.upper.x()),
            Region::Ball { center, radius } => (center.x() - radius, center.x() + radius),
        }
    }

    fn inside(&self, window: &Window) -> bool {
        match self {
            Region::Box(w) => window.contains_window(w),
            Region::Ball { center, radius } => window.contains_ball(center, *radius),
        }
    }
}

/// A weighted count together with a flag telling whether the region left
/// the sampling window (in which case the count may be incomplete).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Count {
    pub value: i64,
    pub partial: bool,
}

/// Finite window sample of a multiple discrete set.
///
/// Items are kept sorted lexicographically by coordinates; points closer than
/// [`COINCIDENCE_TOL`] are merged by summing multiplicities and zero sums are
/// dropped.
#[derive(Clone, Debug, PartialEq)]
pub struct PointMultiSet {
    dim: usize,
    window: Window,
    items: Vec<WeightedPoint>,
    signed: bool,
}

impl PointMultiSet {
    pub fn new<I>(window: Window, items: I, signed: bool) -> Result<Self>
    where
        I: IntoIterator<Item = (Point, i64)>,
    {
        let dim = window.dim();
        let mut raw = Vec::new();
        for (point, multiplicity) in items {
            point.check_dim(dim)?;
            if !window.contains(&point) {
                return Err(Error::PointOutsideWindow);
            }
            if !signed && multiplicity < 0 {
                return Err(Error::NegativeMultiplicity);
            }
            if multiplicity != 0 {
                raw.push(WeightedPoint {
                    point,
                    multiplicity,
                });
            }
        }
        Ok(PointMultiSet {
            dim,
            window,
            items: merge_coincident(raw),
            signed,
        })
    }

    /// Positive set with unit multiplicities.
    pub fn from_points<I>(window: Window, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = Point>,
    {
        PointMultiSet::new(window, points.into_iter().map(|p| (p, 1)), false)
    }

    pub fn empty(window: Window, signed: bool) -> Self {
        PointMultiSet {
            dim: window.dim(),
            window,
            items: Vec::new(),
            signed,
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn window(&self) -> &Window {
        &self.window
    }

    pub fn items(&self) -> &[WeightedPoint] {
        &self.items
    }

    pub fn is_signed(&self) -> bool {
        self.signed
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn total_mass(&self) -> i64 {
        self.items.iter().map(|w| w.multiplicity).sum()
    }

    /// Items whose first coordinate lies in `[lo, hi]`.
    pub(crate) fn slab(&self, lo: f64, hi: f64) -> &[WeightedPoint] {
        let start = self.items.partition_point(|w| w.point.x() < lo);
        let end = self.items.partition_point(|w| w.point.x() <= hi);
        &self.items[start..end.max(start)]
    }

    fn sum_in(&self, region: &Region, weight: impl Fn(i64) -> i64) -> Count {
        let (lo, hi) = region.first_axis_span();
        let value = self
            .slab(lo, hi)
            .iter()
            .filter(|w| region.contains(&w.point))
            .map(|w| weight(w.multiplicity))
            .sum();
        Count {
            value,
            partial: !region.inside(&self.window),
        }
    }

    /// Multiplicity-weighted count; a signed sum for signed sets.
    pub fn card_in(&self, region: &Region) -> Result<Count> {
        if region.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: region.dim(),
            });
        }
        Ok(self.sum_in(region, |m| m))
    }

    /// Total variation `Σ |m|` over the region.
    pub fn variation_in(&self, region: &Region) -> Result<Count> {
        if region.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: region.dim(),
            });
        }
        Ok(self.sum_in(region, i64::abs))
    }

    pub fn translate(&self, by: &Point) -> Result<Self> {
        by.check_dim(self.dim)?;
        let items = self
            .items
            .iter()
            .map(|w| (&w.point + by, w.multiplicity))
            .collect::<Vec<_>>();
        PointMultiSet::new(self.window.translate(by), items, self.signed)
    }

    /// Splits into `(A+, A-)`, both returned as positive sets (the negative
    /// part has its multiplicities negated).
    pub fn split_signs(&self) -> (Self, Self) {
        let part = |sign: i64| PointMultiSet {
            dim: self.dim,
            window: self.window.clone(),
            items: self
                .items
                .iter()
                .filter(|w| w.multiplicity.signum() == sign)
                .map(|w| WeightedPoint {
                    point: w.point.clone(),
                    multiplicity: w.multiplicity * sign,
                })
                .collect(),
            signed: false,
        };
        (part(1), part(-1))
    }

    /// Signed set `positive - negative` over a common window.
    pub fn from_parts(positive: &Self, negative: &Self) -> Result<Self> {
        if positive.window != negative.window {
            return Err(Error::InvalidParameter(
                "parts must share a window".to_string(),
            ));
        }
        let items = positive
            .items
            .iter()
            .map(|w| (w.point.clone(), w.multiplicity))
            .chain(
                negative
                    .items
                    .iter()
                    .map(|w| (w.point.clone(), -w.multiplicity)),
            );
        PointMultiSet::new(positive.window.clone(), items.collect::<Vec<_>>(), true)
    }

    /// Keeps the items at sup-distance at least `margin` from the boundary.
    pub fn inner_window(&self, margin: f64) -> Result<Self> {
        if margin == 0.0 {
            return Ok(self.clone());
        }
        let window = self.window.shrink(margin)?;
        let items = self
            .items
            .iter()
            .filter(|w| window.contains(&w.point))
            .cloned()
            .collect();
        Ok(PointMultiSet {
            dim: self.dim,
            window,
            items,
            signed: self.signed,
        })
    }

    /// Same items, different declared window (must still contain every item).
    pub fn with_window(&self, window: Window) -> Result<Self> {
        if window.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: window.dim(),
            });
        }
        if self.items.iter().any(|w| !window.contains(&w.point)) {
            return Err(Error::PointOutsideWindow);
        }
        Ok(PointMultiSet {
            window,
            ..self.clone()
        })
    }

    /// First coordinates repeated by multiplicity, in nondecreasing order.
    /// Only meaningful for positive sets.
    pub(crate) fn expanded_line(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.items.len());
        for w in &self.items {
            for _ in 0..w.multiplicity.max(0) {
                out.push(w.point.x());
            }
        }
        out
    }
}

fn merge_coincident(mut raw: Vec<WeightedPoint>) -> Vec<WeightedPoint> {
    raw.sort_by(|a, b| a.point.lex_cmp(&b.point));
    let mut consumed = vec![false; raw.len()];
    let mut out = Vec::with_capacity(raw.len());
    for i in 0..raw.len() {
        if consumed[i] {
            continue;
        }
        let mut mass = raw[i].multiplicity;
        let mut j = i + 1;
        while j < raw.len() && raw[j].point.x() - raw[i].point.x() <= COINCIDENCE_TOL {
            if !consumed[j] && raw[j].point.sup_dist(&raw[i].point) <= COINCIDENCE_TOL {
                consumed[j] = true;
                mass += raw[j].multiplicity;
            }
            j += 1;
        }
        if mass != 0 {
            out.push(WeightedPoint {
                point: raw[i].point.clone(),
                multiplicity: mass,
            });
        }
    }
    out
}
