//! Open-loop feasibility and leads-to-unsafe searches.
//!
//! A point `x0` is open-loop feasible when some input word `u` of length
//! `N` keeps every layer `1..N-1` of its reach tube inside `X` and the
//! layer at `N` is dominated by the union of layers `0..N-1`. The lower
//! closure of such a tube is a robust controlled invariant, which is what
//! the synthesis loop commits.
//!
//! A point leads to unsafe when for every input there is a disturbance
//! sending the successor to `F2 ∪ complement(X)` or to another point that
//! leads to unsafe.

use serde::{Deserialize, Serialize};

use crate::dynamics::MonotoneSystem;
use crate::error::{Error, Result};
use crate::order::{LowerSet, Point, UpperSet};
use crate::reach::{propagate, reach_tube, ReachLayer};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SearchOptions {
    /// Longest input word (feasibility) or tree depth (unsafe) explored.
    pub n_max: usize,
    /// Reach steps a single search may compute before giving up.
    pub node_budget: usize,
    /// Only try the minimal inputs in the feasibility search. Sound
    /// whenever it returns a certificate, complete only under the extra
    /// margin hypothesis for control-monotone systems, hence opt-in.
    pub restrict_to_u_min: bool,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            n_max: 50,
            node_budget: 200_000,
            restrict_to_u_min: false,
        }
    }
}

impl SearchOptions {
    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeasibilityCertificate {
    pub x0: Point,
    /// Input indices, one per step.
    pub u_word: Vec<usize>,
    pub horizon: usize,
    /// Layers `0..=horizon`.
    pub layers: Vec<ReachLayer>,
    /// Domination slack of the final layer.
    pub eps_n: f64,
    /// Margin of the intermediate layers inside `X`; infinite when there
    /// are none.
    #[serde(with = "crate::serde_ext::ext_f64")]
    pub gamma: f64,
}

impl FeasibilityCertificate {
    /// Frontier points of layers `0..N-1`, whose lower closure is the
    /// certified invariant.
    pub fn tube_points(&self) -> impl Iterator<Item = &Point> {
        self.layers[..self.horizon]
            .iter()
            .flat_map(|l| l.frontier.iter())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HitReason {
    OutsideX,
    InF2,
}

/// One leaf of the input tree: replaying `inputs` with the disturbances
/// `disturbances` (indices into the system's finite set) from `x0` reaches
/// `point` after `inputs.len()` steps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnsafeWitness {
    pub inputs: Vec<usize>,
    pub disturbances: Vec<usize>,
    pub point: Point,
    pub reason: HitReason,
}

impl UnsafeWitness {
    pub fn step(&self) -> usize {
        self.inputs.len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnsafeCertificate {
    pub x0: Point,
    /// Depth of the deepest witness.
    pub horizon: usize,
    /// Input indices the tree branches over at every node.
    pub branch_inputs: Vec<usize>,
    pub witnesses: Vec<UnsafeWitness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verdict {
    Feasible(FeasibilityCertificate),
    Unsafe(UnsafeCertificate),
    /// Neither search concluded within `horizon` steps and the node budget.
    Undecided { horizon: usize, nodes: usize },
}

impl Verdict {
    pub fn is_feasible(&self) -> bool {
        matches!(self, Verdict::Feasible(_))
    }

    pub fn is_unsafe(&self) -> bool {
        matches!(self, Verdict::Unsafe(_))
    }

    pub fn is_undecided(&self) -> bool {
        matches!(self, Verdict::Undecided { .. })
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Verdict::Feasible(_) => "feasible",
            Verdict::Unsafe(_) => "unsafe",
            Verdict::Undecided { .. } => "undecided",
        }
    }
}

fn dominated_by_tube(layers: &[ReachLayer], p: &[f64]) -> bool {
    layers.iter().any(|l| l.frontier.cover(p).is_some())
}

fn meets(layer: &ReachLayer, f2: Option<&UpperSet>) -> bool {
    f2.is_some_and(|f2| layer.frontier.iter().any(|p| f2.contains(p)))
}

fn feasibility_inputs(sys: &MonotoneSystem, opts: &SearchOptions) -> Vec<usize> {
    if opts.restrict_to_u_min {
        sys.minimal_inputs()
    } else {
        (0..sys.inputs().len()).collect()
    }
}

/// Depth-first search over input words in declaration order, returning the
/// first certificate found or `Undecided`.
pub fn open_loop_feasible(
    sys: &MonotoneSystem,
    x: &LowerSet,
    x0: &[f64],
    opts: &SearchOptions,
) -> Result<Verdict> {
    open_loop_feasible_avoiding(sys, x, None, x0, opts)
}

/// As [`open_loop_feasible`], additionally pruning words whose tube meets
/// `f2`. Such a tube could never be certified anyway since `f2` only holds
/// points that lead to unsafe.
pub fn open_loop_feasible_avoiding(
    sys: &MonotoneSystem,
    x: &LowerSet,
    f2: Option<&UpperSet>,
    x0: &[f64],
    opts: &SearchOptions,
) -> Result<Verdict> {
    let mut search = FeasSearch {
        sys,
        x,
        f2,
        inputs: feasibility_inputs(sys, opts),
        n_max: opts.n_max,
        budget: opts.node_budget,
        nodes: 0,
        layers: vec![ReachLayer::initial(sys, x0.into())?],
        word: Vec::new(),
    };
    if !x.contains(x0) || meets(&search.layers[0], f2) || opts.n_max == 0 {
        return Ok(Verdict::Undecided {
            horizon: opts.n_max,
            nodes: 0,
        });
    }
    if search.descend()? {
        let layers = search.layers;
        let (eps_n, gamma) = extract_slacks(&layers, x);
        return Ok(Verdict::Feasible(FeasibilityCertificate {
            x0: x0.into(),
            horizon: search.word.len(),
            u_word: search.word,
            layers,
            eps_n,
            gamma,
        }));
    }
    Ok(Verdict::Undecided {
        horizon: opts.n_max,
        nodes: search.nodes,
    })
}

struct FeasSearch<'a> {
    sys: &'a MonotoneSystem,
    x: &'a LowerSet,
    f2: Option<&'a UpperSet>,
    inputs: Vec<usize>,
    n_max: usize,
    budget: usize,
    nodes: usize,
    layers: Vec<ReachLayer>,
    word: Vec<usize>,
}

impl FeasSearch<'_> {
    /// Extends the current word; on success `layers` and `word` hold the
    /// certificate.
    fn descend(&mut self) -> Result<bool> {
        for i in 0..self.inputs.len() {
            if self.nodes >= self.budget {
                return Ok(false);
            }
            let u = self.inputs[i];
            let next = propagate(self.sys, self.layers.last().expect("nonempty"), u)?;
            self.nodes += 1;
            if next
                .frontier
                .iter()
                .all(|p| dominated_by_tube(&self.layers, p))
            {
                self.layers.push(next);
                self.word.push(u);
                return Ok(true);
            }
            let depth = self.word.len() + 1;
            if depth >= self.n_max || !next.frontier.iter().all(|p| self.x.contains(p)) || meets(&next, self.f2) {
                continue;
            }
            self.layers.push(next);
            self.word.push(u);
            if self.descend()? {
                return Ok(true);
            }
            self.layers.pop();
            self.word.pop();
        }
        Ok(false)
    }
}

/// Inputs that must all be refuted at each node of the unsafe search. For
/// control-monotone systems the minimal inputs suffice: the set of points
/// leading to unsafe is upper-closed and larger inputs give larger
/// successors.
fn unsafe_inputs(sys: &MonotoneSystem) -> Vec<usize> {
    if sys.class().control_monotone() {
        sys.minimal_inputs()
    } else {
        (0..sys.inputs().len()).collect()
    }
}

pub fn leads_to_unsafe(
    sys: &MonotoneSystem,
    x: &LowerSet,
    f2: &UpperSet,
    x0: &[f64],
    opts: &SearchOptions,
) -> Result<Verdict> {
    leads_to_unsafe_given(sys, x, f2, None, x0, opts)
}

/// As [`leads_to_unsafe`], treating points of `f1` (a known controlled
/// invariant) as safe so those branches are cut immediately.
pub fn leads_to_unsafe_given(
    sys: &MonotoneSystem,
    x: &LowerSet,
    f2: &UpperSet,
    f1: Option<&LowerSet>,
    x0: &[f64],
    opts: &SearchOptions,
) -> Result<Verdict> {
    let mut search = UnsafeSearch {
        sys,
        x,
        f2,
        f1,
        inputs: unsafe_inputs(sys),
        n_max: opts.n_max,
        budget: opts.node_budget,
        nodes: 0,
        inputs_path: Vec::new(),
        dist_path: Vec::new(),
        witnesses: Vec::new(),
    };
    if search.unsafe_at(x0)? {
        let horizon = search.witnesses.iter().map(UnsafeWitness::step).max().unwrap_or(0);
        return Ok(Verdict::Unsafe(UnsafeCertificate {
            x0: x0.into(),
            horizon,
            branch_inputs: search.inputs,
            witnesses: search.witnesses,
        }));
    }
    Ok(Verdict::Undecided {
        horizon: opts.n_max,
        nodes: search.nodes,
    })
}

struct UnsafeSearch<'a> {
    sys: &'a MonotoneSystem,
    x: &'a LowerSet,
    f2: &'a UpperSet,
    f1: Option<&'a LowerSet>,
    inputs: Vec<usize>,
    n_max: usize,
    budget: usize,
    nodes: usize,
    inputs_path: Vec<usize>,
    dist_path: Vec<usize>,
    witnesses: Vec<UnsafeWitness>,
}

impl UnsafeSearch<'_> {
    fn hit(&self, p: &[f64]) -> Option<HitReason> {
        if !self.x.contains(p) {
            Some(HitReason::OutsideX)
        } else if self.f2.contains(p) {
            Some(HitReason::InF2)
        } else {
            None
        }
    }

    /// Witnesses for the subtree rooted at `p` are appended on success and
    /// rolled back on failure.
    fn unsafe_at(&mut self, p: &[f64]) -> Result<bool> {
        if let Some(reason) = self.hit(p) {
            self.witnesses.push(UnsafeWitness {
                inputs: self.inputs_path.clone(),
                disturbances: self.dist_path.clone(),
                point: p.into(),
                reason,
            });
            return Ok(true);
        }
        if self.inputs_path.len() >= self.n_max || self.f1.is_some_and(|f1| f1.contains(p)) {
            return Ok(false);
        }
        let mark = self.witnesses.len();
        for i in 0..self.inputs.len() {
            let u = self.inputs[i];
            let mut succ = Vec::with_capacity(self.sys.disturbances().len());
            for (j, d) in self.sys.disturbances().iter().enumerate() {
                if self.nodes >= self.budget {
                    self.witnesses.truncate(mark);
                    return Ok(false);
                }
                self.nodes += 1;
                succ.push((j, self.sys.step(p, u, d)?));
            }
            // Direct hits first: they need no further search.
            succ.sort_by_key(|(_, y)| self.hit(y).is_none());
            let mut refuted = false;
            for (j, y) in succ {
                self.inputs_path.push(u);
                self.dist_path.push(j);
                let found = self.unsafe_at(&y)?;
                self.inputs_path.pop();
                self.dist_path.pop();
                if found {
                    refuted = true;
                    break;
                }
            }
            if !refuted {
                self.witnesses.truncate(mark);
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// `(eps_N, gamma)` for a tube satisfying the feasibility conditions:
/// the coordinate margin of the final layer below the earlier layers, and
/// of the intermediate layers below the boundary of `X`. Both are clipped
/// at zero; `gamma` is infinite when there are no intermediate layers.
pub fn extract_slacks(layers: &[ReachLayer], x: &LowerSet) -> (f64, f64) {
    let Some((last, earlier)) = layers.split_last() else {
        return (0.0, f64::INFINITY);
    };
    let space = x.space();
    let best_margin = |p: &Point, candidates: &mut dyn Iterator<Item = &Point>| {
        candidates
            .filter(|q| space.le(p, q))
            .map(|q| space.margin(p, q))
            .fold(f64::NEG_INFINITY, f64::max)
    };
    let eps_n = last
        .frontier
        .iter()
        .map(|p| best_margin(p, &mut earlier.iter().flat_map(|l| l.frontier.iter())))
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    let eps_n = if eps_n.is_finite() { eps_n } else { 0.0 };
    let gamma = earlier
        .iter()
        .skip(1)
        .flat_map(|l| l.frontier.iter())
        .map(|p| best_margin(p, &mut x.boundary().iter()))
        .fold(f64::INFINITY, f64::min)
        .max(0.0);
    (eps_n, gamma)
}

/// Radius `beta` such that every point above `x0` within `beta` (L-inf)
/// inherits the certificate's input word, for an `l`-Lipschitz system.
pub fn feasibility_radius(eps_n: f64, gamma: f64, l: f64, n: usize) -> Result<f64> {
    if !(l > 0.0) || eps_n.is_nan() || eps_n < 0.0 || gamma.is_nan() || gamma < 0.0 || n == 0 {
        return Err(Error::Invalid(format!(
            "feasibility radius needs L > 0, N >= 1 and nonnegative slacks (got L={l}, N={n}, eps={eps_n}, gamma={gamma})"
        )));
    }
    let mut beta_k = eps_n.min(gamma);
    let mut beta = beta_k;
    for _ in 1..n {
        beta_k = (beta_k / l).min(gamma);
        beta = beta.min(beta_k);
    }
    Ok(beta)
}

/// Recomputes the tube from `x0` and the word and rechecks both
/// feasibility conditions and the recorded slacks.
pub fn check_certificate(sys: &MonotoneSystem, x: &LowerSet, cert: &FeasibilityCertificate) -> Result<bool> {
    if cert.horizon == 0 || cert.u_word.len() != cert.horizon || !x.contains(&cert.x0) {
        return Ok(false);
    }
    let layers = reach_tube(sys, &cert.x0, &cert.u_word)?;
    if layers != cert.layers {
        return Ok(false);
    }
    let n = cert.horizon;
    let within = layers[1..n].iter().all(|l| l.frontier.iter().all(|p| x.contains(p)));
    let dominated = layers[n]
        .frontier
        .iter()
        .all(|p| dominated_by_tube(&layers[..n], p));
    let (eps_n, gamma) = extract_slacks(&layers, x);
    Ok(within && dominated && eps_n == cert.eps_n && gamma == cert.gamma)
}

/// Replays every witness and confirms it lands where recorded, and that
/// the witnesses cover every branch of the input tree.
pub fn check_unsafe_certificate(
    sys: &MonotoneSystem,
    x: &LowerSet,
    f2: &UpperSet,
    cert: &UnsafeCertificate,
) -> Result<bool> {
    for w in &cert.witnesses {
        if w.inputs.len() != w.disturbances.len() {
            return Ok(false);
        }
        let mut p = cert.x0.clone();
        for (&u, &j) in w.inputs.iter().zip(&w.disturbances) {
            let Some(d) = sys.disturbances().get(j) else {
                return Ok(false);
            };
            p = sys.step(&p, u, d)?;
        }
        let landed = match w.reason {
            HitReason::OutsideX => !x.contains(&p),
            HitReason::InF2 => f2.contains(&p),
        };
        if !landed || p != w.point {
            return Ok(false);
        }
    }
    Ok(covers_tree(&cert.witnesses, &cert.branch_inputs, &[]))
}

/// Every input at every internal node along the witness paths leads to a
/// witness.
fn covers_tree(witnesses: &[UnsafeWitness], inputs: &[usize], prefix: &[(usize, usize)]) -> bool {
    let below: Vec<&UnsafeWitness> = witnesses
        .iter()
        .filter(|w| {
            w.inputs.len() >= prefix.len()
                && prefix
                    .iter()
                    .enumerate()
                    .all(|(k, &(u, d))| w.inputs[k] == u && w.disturbances[k] == d)
        })
        .collect();
    if below.iter().any(|w| w.inputs.len() == prefix.len()) {
        return true;
    }
    if below.is_empty() {
        return false;
    }
    let k = prefix.len();
    inputs.iter().all(|&u| {
        below
            .iter()
            .filter(|w| w.inputs[k] == u)
            .map(|w| w.disturbances[k])
            .any(|d| {
                let mut next = prefix.to_vec();
                next.push((u, d));
                covers_tree(witnesses, inputs, &next)
            })
    })
}
