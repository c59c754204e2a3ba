//! Orthant partial orders, antichains and the lower/upper-closed sets they
//! represent.
//!
//! Every set in this crate is stored by its extremal points: a lower-closed
//! set by the antichain of its maximal elements, an upper-closed set by the
//! antichain of its minimal elements. The order on `R^n` is the orthant order
//! `x <= y  iff  s_i * x_i <= s_i * y_i` for a fixed sign vector `s`.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of `R^n`. Coordinates are raw (not sign-adjusted).
#[derive(Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point(coords)
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for Point {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Point(v)
    }
}

impl<const N: usize> From<[f64; N]> for Point {
    fn from(v: [f64; N]) -> Self {
        Point(v.to_vec())
    }
}

impl From<&[f64]> for Point {
    fn from(v: &[f64]) -> Self {
        Point(v.to_vec())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.0.iter()).finish()
    }
}

/// Axis-aligned box `[lo, hi]` in raw coordinates. Bounds may be infinite
/// when the box describes an ambient region rather than a working area.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    #[serde(with = "crate::serde_ext::ext_f64_vec")]
    lo: Vec<f64>,
    #[serde(with = "crate::serde_ext::ext_f64_vec")]
    hi: Vec<f64>,
}

impl AxisBox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::Dimension {
                expected: lo.len(),
                got: hi.len(),
            });
        }
        if lo.is_empty() {
            return Err(Error::Invalid("box must have at least one dimension".into()));
        }
        for (i, (l, h)) in lo.iter().zip(&hi).enumerate() {
            if l.is_nan() || h.is_nan() || l > h {
                return Err(Error::Invalid(format!(
                    "box bound {i}: lower {l} exceeds upper {h}"
                )));
            }
        }
        Ok(AxisBox { lo, hi })
    }

    /// Builds a box from `[lo, hi]` pairs, one per dimension.
    pub fn from_bounds(bounds: &[[f64; 2]]) -> Result<Self> {
        let lo = bounds.iter().map(|b| b[0]).collect();
        let hi = bounds.iter().map(|b| b[1]).collect();
        AxisBox::new(lo, hi)
    }

    /// The nonnegative orthant `[0, inf)^dim`.
    pub fn nonnegative(dim: usize) -> Self {
        AxisBox {
            lo: vec![0.0; dim],
            hi: vec![f64::INFINITY; dim],
        }
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn is_bounded(&self) -> bool {
        self.lo.iter().chain(&self.hi).all(|v| v.is_finite())
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.lo.len()
            && x
                .iter()
                .zip(self.lo.iter().zip(&self.hi))
                .all(|(v, (l, h))| *l <= *v && *v <= *h)
    }

    pub fn center(&self) -> Point {
        Point(
            self.lo
                .iter()
                .zip(&self.hi)
                .map(|(l, h)| l + 0.5 * (h - l))
                .collect(),
        )
    }

    /// L-infinity diameter: the longest side.
    pub fn diameter(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| h - l)
            .fold(0.0, f64::max)
    }

    /// Corner that is maximal under the signed order.
    pub fn top(&self, signs: &[i8]) -> Point {
        Point(
            signs
                .iter()
                .enumerate()
                .map(|(i, s)| if *s > 0 { self.hi[i] } else { self.lo[i] })
                .collect(),
        )
    }

    /// Corner that is minimal under the signed order.
    pub fn bottom(&self, signs: &[i8]) -> Point {
        Point(
            signs
                .iter()
                .enumerate()
                .map(|(i, s)| if *s > 0 { self.lo[i] } else { self.hi[i] })
                .collect(),
        )
    }

    /// Splits at the center into `2^dim` children, enumerated with
    /// dimension 0 as the least significant bit (bit clear = lower half).
    pub fn split(&self) -> Vec<AxisBox> {
        let n = self.dim();
        let mid = self.center();
        (0..1usize << n)
            .map(|mask| {
                let mut lo = Vec::with_capacity(n);
                let mut hi = Vec::with_capacity(n);
                for i in 0..n {
                    if mask & (1 << i) == 0 {
                        lo.push(self.lo[i]);
                        hi.push(mid[i]);
                    } else {
                        lo.push(mid[i]);
                        hi.push(self.hi[i]);
                    }
                }
                AxisBox { lo, hi }
            })
            .collect()
    }
}

/// Dimension, per-coordinate order signs, and an optional ambient region.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrderedSpace {
    dim: usize,
    signs: Vec<i8>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    base_box: Option<AxisBox>,
    /// Dominance slack; `x <= y` holds when `s_i (x_i - y_i) <= tolerance`.
    #[serde(default, skip_serializing_if = "is_zero")]
    tolerance: f64,
}

fn is_zero(v: &f64) -> bool {
    *v == 0.0
}

impl OrderedSpace {
    pub fn new(signs: Vec<i8>, base_box: Option<AxisBox>) -> Result<Self> {
        if signs.is_empty() {
            return Err(Error::Invalid("dimension must be positive".into()));
        }
        if let Some(s) = signs.iter().find(|s| **s != 1 && **s != -1) {
            return Err(Error::Invalid(format!("order sign {s} is not +1 or -1")));
        }
        if let Some(b) = &base_box {
            if b.dim() != signs.len() {
                return Err(Error::Dimension {
                    expected: signs.len(),
                    got: b.dim(),
                });
            }
        }
        Ok(OrderedSpace {
            dim: signs.len(),
            signs,
            base_box,
            tolerance: 0.0,
        })
    }

    /// The componentwise order on `R^dim` with no ambient region.
    pub fn standard(dim: usize) -> Self {
        OrderedSpace {
            dim,
            signs: vec![1; dim],
            base_box: None,
            tolerance: 0.0,
        }
    }

    pub fn with_tolerance(mut self, tolerance: f64) -> Self {
        self.tolerance = tolerance.max(0.0);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn base_box(&self) -> Option<&AxisBox> {
        self.base_box.as_ref()
    }

    pub fn tolerance(&self) -> f64 {
        self.tolerance
    }

    /// The same space with every sign flipped.
    pub fn dual(&self) -> Self {
        OrderedSpace {
            signs: self.signs.iter().map(|s| -s).collect(),
            ..self.clone()
        }
    }

    pub fn in_base(&self, x: &[f64]) -> bool {
        self.base_box.as_ref().map_or(true, |b| b.contains(x))
    }

    fn check_dim(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::Dimension {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(())
    }

    /// `x <= y` under the signed order.
    pub fn leq(&self, x: &[f64], y: &[f64]) -> Result<bool> {
        self.check_dim(x)?;
        self.check_dim(y)?;
        Ok(self.le(x, y))
    }

    /// Unchecked `leq` for inner loops; lengths must already match.
    #[inline]
    pub fn le(&self, x: &[f64], y: &[f64]) -> bool {
        debug_assert_eq!(x.len(), self.dim);
        debug_assert_eq!(y.len(), self.dim);
        let tol = self.tolerance;
        self.signs
            .iter()
            .zip(x.iter().zip(y))
            .all(|(s, (a, b))| f64::from(*s) * (a - b) <= tol)
    }

    /// Componentwise meet (greatest lower bound).
    pub fn meet(&self, x: &[f64], y: &[f64]) -> Point {
        Point(
            self.signs
                .iter()
                .zip(x.iter().zip(y))
                .map(|(s, (a, b))| if *s > 0 { a.min(*b) } else { a.max(*b) })
                .collect(),
        )
    }

    /// Componentwise join (least upper bound).
    pub fn join(&self, x: &[f64], y: &[f64]) -> Point {
        Point(
            self.signs
                .iter()
                .zip(x.iter().zip(y))
                .map(|(s, (a, b))| if *s > 0 { a.max(*b) } else { a.min(*b) })
                .collect(),
        )
    }

    /// Smallest signed slack `min_i s_i (y_i - x_i)`; nonnegative iff `x <= y`
    /// (exactly, ignoring tolerance). It is the largest `r` with
    /// `B_r(x) <= y` in the L-infinity norm.
    pub fn margin(&self, x: &[f64], y: &[f64]) -> f64 {
        self.signs
            .iter()
            .zip(x.iter().zip(y))
            .map(|(s, (a, b))| f64::from(*s) * (b - a))
            .fold(f64::INFINITY, f64::min)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Orientation {
    /// Maximal elements of a lower-closed set.
    Max,
    /// Minimal elements of an upper-closed set.
    Min,
}

/// A finite set of pairwise incomparable points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "AntichainRecord")]
pub struct Antichain {
    space: Arc<OrderedSpace>,
    orientation: Orientation,
    elements: Vec<Point>,
}

#[derive(Deserialize)]
struct AntichainRecord {
    space: Arc<OrderedSpace>,
    orientation: Orientation,
    elements: Vec<Point>,
}

impl TryFrom<AntichainRecord> for Antichain {
    type Error = Error;

    fn try_from(rec: AntichainRecord) -> Result<Self> {
        let out = Antichain::from_points(rec.space, rec.orientation, rec.elements)?;
        Ok(out)
    }
}

impl Antichain {
    pub fn new(space: Arc<OrderedSpace>, orientation: Orientation) -> Self {
        Antichain {
            space,
            orientation,
            elements: Vec::new(),
        }
    }

    /// Extremal elements of `points`. Elements are kept sorted by their
    /// first coordinate in the antichain's direction.
    pub fn from_points<I, P>(space: Arc<OrderedSpace>, orientation: Orientation, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: Into<Point>,
    {
        let mut a = Antichain::new(space, orientation);
        for p in points {
            a.insert(p.into())?;
        }
        Ok(a)
    }

    pub fn space(&self) -> &Arc<OrderedSpace> {
        &self.space
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn elements(&self) -> &[Point] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Point> {
        self.elements.iter()
    }

    /// `a` is at least as extreme as `b` in this antichain's direction.
    #[inline]
    fn beats(&self, a: &[f64], b: &[f64]) -> bool {
        match self.orientation {
            Orientation::Max => self.space.le(b, a),
            Orientation::Min => self.space.le(a, b),
        }
    }

    /// Sort key: the first coordinate, signed so that covering elements
    /// have keys at least the key of what they cover (up to tolerance).
    #[inline]
    fn key(&self, p: &[f64]) -> f64 {
        let s = f64::from(self.space.signs()[0]);
        match self.orientation {
            Orientation::Max => s * p[0],
            Orientation::Min => -s * p[0],
        }
    }

    /// Inserts `x`, keeping only extremal elements. Returns whether `x`
    /// was kept.
    pub fn insert(&mut self, x: Point) -> Result<bool> {
        if x.len() != self.space.dim() {
            return Err(Error::Dimension {
                expected: self.space.dim(),
                got: x.len(),
            });
        }
        Ok(self.insert_unchecked(x))
    }

    pub(crate) fn insert_unchecked(&mut self, x: Point) -> bool {
        if self.cover(&x).is_some() {
            return false;
        }
        // Only elements with keys up to key(x) + tol can be covered by x.
        let kx = self.key(&x);
        let tol = self.space.tolerance();
        let end = self.elements.partition_point(|e| self.key(e) <= kx + tol);
        let (space, orientation) = (&self.space, self.orientation);
        let mut i = 0;
        let mut kept = end;
        while i < kept {
            let e = &self.elements[i];
            let covered = match orientation {
                Orientation::Max => space.le(e, &x),
                Orientation::Min => space.le(&x, e),
            };
            if covered {
                self.elements.remove(i);
                kept -= 1;
            } else {
                i += 1;
            }
        }
        let at = self.elements.partition_point(|e| self.key(e) <= kx);
        self.elements.insert(at, x);
        true
    }

    /// Functional form of [`Antichain::insert`].
    pub fn insert_extremal(&self, x: Point) -> Result<Self> {
        let mut out = self.clone();
        out.insert(x)?;
        Ok(out)
    }

    /// An element that covers `x` (dominates it for `Max`, is dominated
    /// by it for `Min`).
    pub fn cover(&self, x: &[f64]) -> Option<&Point> {
        let start = self
            .elements
            .partition_point(|e| self.key(e) < self.key(x) - self.space.tolerance());
        let candidates = &self.elements[start..];
        if self.space.dim() <= 2 {
            // Sorted by the first coordinate, a planar antichain is strictly
            // monotone in the second, so the first candidate is the best one.
            return candidates.first().filter(|e| self.beats(e, x));
        }
        candidates.iter().find(|e| self.beats(e, x))
    }

    /// Exhaustive pairwise incomparability check.
    pub fn is_antichain(&self) -> bool {
        let s = &self.space;
        for (i, p) in self.elements.iter().enumerate() {
            for q in &self.elements[i + 1..] {
                if s.le(p, q) || s.le(q, p) {
                    return false;
                }
            }
        }
        true
    }

    /// Elements sorted lexicographically by raw coordinates; handy for
    /// stable exports.
    pub fn sorted(&self) -> Vec<Point> {
        let mut v = self.elements.clone();
        v.sort_by(|a, b| {
            a.iter()
                .zip(b.iter())
                .map(|(x, y)| x.total_cmp(y))
                .find(|o| o.is_ne())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        v
    }
}

/// A lower-closed set `base ∩ ↓boundary`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LowerSet {
    boundary: Antichain,
}

impl LowerSet {
    pub fn new(boundary: Antichain) -> Result<Self> {
        if boundary.orientation != Orientation::Max {
            return Err(Error::Invalid("lower sets need a Max antichain".into()));
        }
        Ok(LowerSet { boundary })
    }

    pub fn empty(space: Arc<OrderedSpace>) -> Self {
        LowerSet {
            boundary: Antichain::new(space, Orientation::Max),
        }
    }

    pub fn from_points<I, P>(space: Arc<OrderedSpace>, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: Into<Point>,
    {
        Ok(LowerSet {
            boundary: Antichain::from_points(space, Orientation::Max, points)?,
        })
    }

    pub fn boundary(&self) -> &Antichain {
        &self.boundary
    }

    pub fn space(&self) -> &Arc<OrderedSpace> {
        &self.boundary.space
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.witness(x).is_some()
    }

    /// A boundary element dominating `x`, if `x` is in the set.
    pub fn witness(&self, x: &[f64]) -> Option<&Point> {
        if x.len() != self.space().dim() || !self.space().in_base(x) {
            return None;
        }
        self.boundary.cover(x)
    }

    /// Adds `↓x` to the set.
    pub fn insert(&mut self, x: Point) -> Result<bool> {
        self.boundary.insert(x)
    }

    pub fn union(&self, other: &LowerSet) -> Result<LowerSet> {
        if self.space() != other.space() {
            return Err(Error::SpaceMismatch);
        }
        let mut out = self.clone();
        for p in other.boundary.iter() {
            out.boundary.insert_unchecked(p.clone());
        }
        Ok(out)
    }

    /// L-infinity distance from `x` to `↓boundary` (the ambient region is
    /// ignored). Zero when `x` is dominated; infinite for an empty set.
    pub fn distance_inf(&self, x: &[f64]) -> f64 {
        let s = self.space();
        self.boundary
            .iter()
            .map(|m| (-s.margin(x, m)).max(0.0))
            .fold(f64::INFINITY, f64::min)
    }
}

/// An upper-closed set `↑boundary`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpperSet {
    boundary: Antichain,
}

impl UpperSet {
    pub fn new(boundary: Antichain) -> Result<Self> {
        if boundary.orientation != Orientation::Min {
            return Err(Error::Invalid("upper sets need a Min antichain".into()));
        }
        Ok(UpperSet { boundary })
    }

    pub fn empty(space: Arc<OrderedSpace>) -> Self {
        UpperSet {
            boundary: Antichain::new(space, Orientation::Min),
        }
    }

    pub fn from_points<I, P>(space: Arc<OrderedSpace>, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: Into<Point>,
    {
        Ok(UpperSet {
            boundary: Antichain::from_points(space, Orientation::Min, points)?,
        })
    }

    pub fn boundary(&self) -> &Antichain {
        &self.boundary
    }

    pub fn space(&self) -> &Arc<OrderedSpace> {
        &self.boundary.space
    }

    pub fn is_empty(&self) -> bool {
        self.boundary.is_empty()
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        x.len() == self.space().dim() && self.boundary.cover(x).is_some()
    }

    pub fn insert(&mut self, x: Point) -> Result<bool> {
        self.boundary.insert(x)
    }

    pub fn union(&self, other: &UpperSet) -> Result<UpperSet> {
        if self.space() != other.space() {
            return Err(Error::SpaceMismatch);
        }
        let mut out = self.clone();
        for p in other.boundary.iter() {
            out.boundary.insert_unchecked(p.clone());
        }
        Ok(out)
    }
}

/// True when the whole box lies in `f1`, or in `f2` or the complement of `x`.
pub fn box_resolved(bx: &AxisBox, f1: &LowerSet, f2: &UpperSet, x: &LowerSet) -> bool {
    let signs = x.space().signs();
    if f1.contains(&bx.top(signs)) {
        return true;
    }
    let bottom = bx.bottom(signs);
    f2.contains(&bottom) || !x.contains(&bottom)
}

/// Largest L-infinity diameter among boxes not yet resolved into
/// `f1` or `f2 ∪ complement(x)`; zero when all are resolved.
pub fn gap(f1: &LowerSet, f2: &UpperSet, x: &LowerSet, undecided: &[AxisBox]) -> f64 {
    undecided
        .iter()
        .filter(|b| !box_resolved(b, f1, f2, x))
        .map(AxisBox::diameter)
        .fold(0.0, f64::max)
}
