//! A grid-based safety fixed point used to cross-check synthesis.
//!
//! The working box is tiled with equal cells and each grid node stands for
//! its lower closure within the box: the upper corner of a cell, or a point
//! on the box's lower faces (which is where equilibria such as standstill
//! live). A node survives while some input maps it (under every
//! disturbance) below a surviving node; monotonicity makes the node's image
//! an upper bound for everything below it. This deliberately avoids the
//! antichain machinery it is meant to validate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::dynamics::MonotoneSystem;
use crate::error::{Error, Result};
use crate::order::{AxisBox, LowerSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridStats {
    /// Cells per dimension; there is one more node than cells per axis.
    pub shape: Vec<usize>,
    pub nodes: usize,
    pub alive: usize,
    pub sweeps: usize,
    /// Nodes removed over all sweeps.
    pub removals: usize,
    /// Successor evaluations (each node's image is computed once).
    pub evaluations: usize,
}

struct Grid {
    lo: Vec<f64>,
    width: Vec<f64>,
    /// Cells per dimension.
    shape: Vec<usize>,
    signs: Vec<i8>,
}

impl Grid {
    fn nodes(&self) -> usize {
        self.shape.iter().map(|n| n + 1).product()
    }

    fn unflatten(&self, mut idx: usize) -> Vec<usize> {
        self.shape
            .iter()
            .map(|&n| {
                let i = idx % (n + 1);
                idx /= n + 1;
                i
            })
            .collect()
    }

    fn flatten(&self, ranks: &[usize]) -> usize {
        ranks
            .iter()
            .zip(&self.shape)
            .rev()
            .fold(0, |acc, (&i, &n)| acc * (n + 1) + i)
    }

    fn bound(&self, dim: usize, i: usize) -> f64 {
        if i == self.shape[dim] {
            // Land exactly on the far edge.
            self.lo[dim] + self.width[dim] * self.shape[dim] as f64
        } else {
            self.lo[dim] + self.width[dim] * i as f64
        }
    }

    /// Coordinate of the node with the given rank along `dim`, ranks
    /// increasing in the signed order.
    fn node(&self, dim: usize, rank: usize) -> f64 {
        if self.signs[dim] > 0 {
            self.bound(dim, rank)
        } else {
            self.bound(dim, self.shape[dim] - rank)
        }
    }

    fn point(&self, ranks: &[usize]) -> Vec<f64> {
        ranks.iter().enumerate().map(|(k, &r)| self.node(k, r)).collect()
    }

    /// Least rank along `dim` whose node is at or above `y`.
    fn dominating_rank(&self, dim: usize, y: f64) -> Option<usize> {
        let s = f64::from(self.signs[dim]);
        let (mut lo, mut hi) = (0, self.shape[dim] + 1);
        while lo < hi {
            let mid = (lo + hi) / 2;
            if s * (self.node(dim, mid) - y) >= 0.0 {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        (lo <= self.shape[dim]).then_some(lo)
    }
}

/// Lower closure of the grid nodes surviving the safety fixed point.
/// `resolution` is the largest allowed cell side; sides are shrunk so cells
/// tile the working box exactly.
pub fn grid_fixed_point(sys: &MonotoneSystem, x: &LowerSet, resolution: f64) -> Result<(LowerSet, GridStats)> {
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::Invalid(format!("grid resolution must be positive, got {resolution}")));
    }
    let space = sys.space();
    let wb = sys.work_box();
    let shape: Vec<usize> = wb
        .lo()
        .iter()
        .zip(wb.hi())
        .map(|(l, h)| (((h - l) / resolution).ceil() as usize).max(1))
        .collect();
    let grid = Grid {
        lo: wb.lo().to_vec(),
        width: wb
            .lo()
            .iter()
            .zip(wb.hi())
            .zip(&shape)
            .map(|((l, h), &n)| (h - l) / n as f64)
            .collect(),
        shape: shape.clone(),
        signs: space.signs().to_vec(),
    };
    let n = grid.nodes();
    if n >= u32::MAX as usize {
        return Err(Error::Invalid(format!("grid with {n} nodes is too large")));
    }
    let inputs: Vec<usize> = if sys.class().control_monotone() {
        sys.minimal_inputs()
    } else {
        (0..sys.inputs().len()).collect()
    };
    let n_d = sys.disturbances().len();
    let per_node = inputs.len() * n_d;

    let target = |y: &[f64]| -> u32 {
        if !space.in_base(y) {
            return NONE;
        }
        let mut ranks = Vec::with_capacity(y.len());
        for (k, v) in y.iter().enumerate() {
            match grid.dominating_rank(k, *v) {
                Some(r) => ranks.push(r),
                None => return NONE,
            }
        }
        grid.flatten(&ranks) as u32
    };

    // Images never change, so they are computed once for the nodes of X.
    let mut alive = vec![false; n];
    let mut images = vec![NONE; n * per_node];
    let mut evaluations = 0;
    for c in 0..n {
        let p = grid.point(&grid.unflatten(c));
        if !x.contains(&p) {
            continue;
        }
        alive[c] = true;
        for (a, &u) in inputs.iter().enumerate() {
            for (b, d) in sys.disturbances().iter().enumerate() {
                images[c * per_node + a * n_d + b] = target(&sys.step(&p, u, d)?);
                evaluations += 1;
            }
        }
    }

    // Removals are applied in place; any removal order reaches the same
    // greatest fixed point, and in-place updates need far fewer sweeps.
    let mut sweeps = 0;
    let mut removals = 0;
    loop {
        sweeps += 1;
        let mut changed = false;
        for c in 0..n {
            if !alive[c] {
                continue;
            }
            let ok = images[c * per_node..(c + 1) * per_node]
                .chunks(n_d)
                .any(|cells| cells.iter().all(|&t| t != NONE && alive[t as usize]));
            if !ok {
                alive[c] = false;
                removals += 1;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // The surviving set is lower-closed in the grid, so its maximal nodes
    // are those with no surviving successor along any axis.
    let count = alive.iter().filter(|&&a| a).count();
    let mut result = LowerSet::empty(space.clone());
    for c in (0..n).filter(|&c| alive[c]) {
        let ranks = grid.unflatten(c);
        let maximal = (0..ranks.len()).all(|k| {
            ranks[k] == grid.shape[k] || {
                let mut up = ranks.clone();
                up[k] += 1;
                !alive[grid.flatten(&up)]
            }
        });
        if maximal {
            result.insert(grid.point(&ranks).into())?;
        }
    }
    Ok((
        result,
        GridStats {
            shape,
            nodes: n,
            alive: count,
            sweeps,
            removals,
            evaluations,
        },
    ))
}

const NONE: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Comparison {
    pub samples: usize,
    pub a_minus_b: usize,
    pub b_minus_a: usize,
    /// Largest L-infinity distance from a disagreeing sample to the set that
    /// excludes it.
    pub max_boundary_gap: f64,
    /// Exact `sup` over `a` of the distance to `b`, and vice versa.
    pub excess: (f64, f64),
}

impl Comparison {
    /// Exact width of the disagreement band: no point of either set is
    /// farther than this from the other set.
    pub fn band(&self) -> f64 {
        self.excess.0.max(self.excess.1)
    }
}

/// `sup_{x in a} d(x, b)` in the L-infinity norm. For lower sets the
/// distance to `b` grows along the order, so the supremum is attained on
/// the maximal points of `a`.
pub fn excess(a: &LowerSet, b: &LowerSet) -> f64 {
    a.boundary().iter().map(|p| b.distance_inf(p)).fold(0.0, f64::max)
}

/// Membership disagreement between two lower sets on uniform samples from
/// `bx` (ChaCha8 seeded with `seed`).
pub fn compare(a: &LowerSet, b: &LowerSet, bx: &AxisBox, samples: usize, seed: u64) -> Result<Comparison> {
    if a.space() != b.space() {
        return Err(Error::SpaceMismatch);
    }
    if !bx.is_bounded() || bx.dim() != a.space().dim() {
        return Err(Error::Invalid("comparison box must be bounded and match the space".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Comparison {
        samples,
        a_minus_b: 0,
        b_minus_a: 0,
        max_boundary_gap: 0.0,
        excess: (excess(a, b), excess(b, a)),
    };
    for _ in 0..samples {
        let p: Vec<f64> = bx
            .lo()
            .iter()
            .zip(bx.hi())
            .map(|(l, h)| if l == h { *l } else { rng.gen_range(*l..=*h) })
            .collect();
        match (a.contains(&p), b.contains(&p)) {
            (true, false) => {
                out.a_minus_b += 1;
                out.max_boundary_gap = out.max_boundary_gap.max(b.distance_inf(&p));
            }
            (false, true) => {
                out.b_minus_a += 1;
                out.max_boundary_gap = out.max_boundary_gap.max(a.distance_inf(&p));
            }
            _ => {}
        }
    }
    Ok(out)
}
