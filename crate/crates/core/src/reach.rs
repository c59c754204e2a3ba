//! Reach layers under the finite disturbance set, pruned to their maximal
//! elements, and closed-loop simulation.
//!
//! For state-monotone systems a dominated point has dominated successors,
//! so the lower closure of a pruned layer contains the exact reach set of
//! every later step. Containment in a lower set and intersection with an
//! upper set are both decided by maximal elements, so nothing downstream
//! loses precision.

use serde::{Deserialize, Serialize};

use crate::dynamics::MonotoneSystem;
use crate::error::{Error, Result};
use crate::order::{Antichain, LowerSet, Orientation, Point};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReachLayer {
    pub k: usize,
    pub frontier: Antichain,
    /// Points generated before pruning.
    pub raw_count: usize,
}

impl ReachLayer {
    pub fn initial(sys: &MonotoneSystem, x0: Point) -> Result<Self> {
        let mut frontier = Antichain::new(sys.space().clone(), Orientation::Max);
        frontier.insert(x0)?;
        Ok(ReachLayer {
            k: 0,
            frontier,
            raw_count: 1,
        })
    }
}

/// One step of every frontier point under input `u` and every disturbance.
pub fn propagate(sys: &MonotoneSystem, layer: &ReachLayer, u: usize) -> Result<ReachLayer> {
    let mut frontier = Antichain::new(sys.space().clone(), Orientation::Max);
    let mut raw_count = 0;
    for p in layer.frontier.iter() {
        for d in sys.disturbances() {
            frontier.insert_unchecked(sys.step(p, u, d)?);
            raw_count += 1;
        }
    }
    Ok(ReachLayer {
        k: layer.k + 1,
        frontier,
        raw_count,
    })
}

/// Layers `0..=word.len()`, layer 0 being `{x0}`.
pub fn reach_tube(sys: &MonotoneSystem, x0: &[f64], word: &[usize]) -> Result<Vec<ReachLayer>> {
    let mut layers = Vec::with_capacity(word.len() + 1);
    layers.push(ReachLayer::initial(sys, x0.into())?);
    for &u in word {
        let next = propagate(sys, layers.last().expect("nonempty"), u)?;
        layers.push(next);
    }
    Ok(layers)
}

/// Every frontier point lies in `l`.
pub fn layer_within(layer: &ReachLayer, l: &LowerSet) -> bool {
    layer.frontier.iter().all(|p| l.contains(p))
}

/// A state feedback `x -> input index`.
pub trait Policy {
    fn choose(&mut self, x: &[f64]) -> Result<usize>;
}

/// Always applies the same input.
#[derive(Clone, Copy, Debug)]
pub struct ConstantPolicy(pub usize);

impl Policy for ConstantPolicy {
    fn choose(&mut self, _x: &[f64]) -> Result<usize> {
        Ok(self.0)
    }
}

impl<F: FnMut(&[f64]) -> Result<usize>> Policy for F {
    fn choose(&mut self, x: &[f64]) -> Result<usize> {
        self(x)
    }
}

/// `x(k+1) = f(x(k), policy(x(k)), d(k))` for `steps` steps; `d_word` may
/// hold arbitrary disturbance values, not only the reduced set.
pub fn simulate_closed_loop<P: Policy + ?Sized>(
    sys: &MonotoneSystem,
    policy: &mut P,
    x0: &[f64],
    d_word: &[Point],
    steps: usize,
) -> Result<Vec<Point>> {
    if d_word.len() < steps {
        return Err(Error::Invalid(format!(
            "disturbance word has {} entries for {steps} steps",
            d_word.len()
        )));
    }
    let mut traj = Vec::with_capacity(steps + 1);
    traj.push(Point::from(x0));
    for (k, d) in d_word.iter().take(steps).enumerate() {
        let x = traj.last().expect("nonempty");
        let u = policy.choose(x).map_err(|e| Error::Simulation {
            step: k,
            source: Box::new(e),
        })?;
        let next = sys.step(x, u, d)?;
        traj.push(next);
    }
    Ok(traj)
}
