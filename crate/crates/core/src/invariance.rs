//! Verification and synthesis of robust controlled invariants.
//!
//! Synthesis keeps two sets: `F1`, a union of certified feasible tubes
//! (itself a controlled invariant), and `F2`, points known to lead to
//! unsafe. The working box is subdivided until every box not resolved into
//! one of them has diameter at most `epsilon`.

use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dynamics::MonotoneSystem;
use crate::error::{Error, Result};
use crate::feasibility::{leads_to_unsafe_given, open_loop_feasible_avoiding, SearchOptions, Verdict};
use crate::order::{box_resolved, gap, AxisBox, LowerSet, Point, UpperSet};
use crate::reach::Policy;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InputOutcome {
    pub input: usize,
    /// Successors over the finite disturbance set.
    pub successors: Vec<Point>,
    /// First successor outside the candidate set, if any.
    pub escaped: Option<Point>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateCheck {
    pub state: Point,
    /// First input (in declaration order) keeping every successor inside.
    pub chosen: Option<usize>,
    pub outcomes: Vec<InputOutcome>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub is_invariant: bool,
    pub per_state: Vec<StateCheck>,
    pub states_checked: usize,
    pub successor_evaluations: usize,
}

impl VerifyReport {
    /// The first boundary state with no admissible input.
    pub fn failure(&self) -> Option<&StateCheck> {
        self.per_state.iter().find(|s| s.chosen.is_none())
    }
}

/// Inputs worth checking: the minimal ones suffice for control-monotone
/// systems because `K` is lower-closed.
fn candidate_inputs(sys: &MonotoneSystem) -> Vec<usize> {
    if sys.class().control_monotone() {
        sys.minimal_inputs()
    } else {
        (0..sys.inputs().len()).collect()
    }
}

fn check_state(sys: &MonotoneSystem, k: &LowerSet, m: &Point, inputs: &[usize]) -> Result<(StateCheck, usize)> {
    let mut evaluations = 0;
    let mut outcomes = Vec::with_capacity(inputs.len());
    for &u in inputs {
        let successors = sys
            .disturbances()
            .iter()
            .map(|d| sys.step(m, u, d))
            .collect::<Result<Vec<_>>>()?;
        evaluations += successors.len();
        let escaped = successors.iter().find(|y| !k.contains(y)).cloned();
        outcomes.push(InputOutcome {
            input: u,
            successors,
            escaped,
        });
    }
    let chosen = outcomes.iter().find(|o| o.escaped.is_none()).map(|o| o.input);
    Ok((
        StateCheck {
            state: m.clone(),
            chosen,
            outcomes,
        },
        evaluations,
    ))
}

fn check_subset(x: &LowerSet, k: &LowerSet) -> Result<()> {
    if x.space() != k.space() {
        return Err(Error::SpaceMismatch);
    }
    match k.boundary().iter().find(|m| !x.contains(m)) {
        Some(m) => Err(Error::Precondition {
            message: "candidate set is not contained in the constraint set".into(),
            point: m.clone(),
        }),
        None => Ok(()),
    }
}

fn assemble(checks: Vec<(StateCheck, usize)>) -> VerifyReport {
    let successor_evaluations = checks.iter().map(|(_, n)| n).sum();
    let per_state: Vec<StateCheck> = checks.into_iter().map(|(s, _)| s).collect();
    VerifyReport {
        is_invariant: per_state.iter().all(|s| s.chosen.is_some()),
        states_checked: per_state.len(),
        successor_evaluations,
        per_state,
    }
}

/// Checks that every maximal element of `K` has an input keeping all of its
/// worst-case successors in `K`. Every candidate input is evaluated so the
/// report shows each one's outcome.
pub fn verify_invariant(sys: &MonotoneSystem, x: &LowerSet, k: &LowerSet) -> Result<VerifyReport> {
    check_subset(x, k)?;
    let inputs = candidate_inputs(sys);
    let checks = k
        .boundary()
        .iter()
        .map(|m| check_state(sys, k, m, &inputs))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(checks))
}

/// [`verify_invariant`] with the boundary elements checked in parallel.
/// The report is identical to the sequential one.
pub fn verify_invariant_par(sys: &MonotoneSystem, x: &LowerSet, k: &LowerSet) -> Result<VerifyReport> {
    check_subset(x, k)?;
    let inputs = candidate_inputs(sys);
    let checks = k
        .boundary()
        .elements()
        .par_iter()
        .map(|m| check_state(sys, k, m, &inputs))
        .collect::<Result<Vec<_>>>()?;
    Ok(assemble(checks))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SynthOptions {
    pub epsilon: f64,
    pub search: SearchOptions,
    /// Extra candidate points classified alongside the minimal point of `X`.
    pub seeds: Vec<Point>,
}

impl Default for SynthOptions {
    fn default() -> Self {
        SynthOptions {
            epsilon: 1.0,
            search: SearchOptions::default(),
            seeds: Vec::new(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    /// Every maximal point of `X` is feasible, so `K = X`.
    AllFeasible,
    /// The minimal candidates all lead to unsafe, so `K` is empty.
    NoneFeasible,
    /// Every remaining box is within `epsilon` of `K`.
    EpsilonOptimal,
    /// Some remaining boxes have an unresolved lower corner; `K` is sound
    /// but may be far from the maximal invariant there.
    Conservative,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UndecidedBox {
    #[serde(rename = "box")]
    pub bx: AxisBox,
    pub stalled: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SynthCounters {
    pub points_classified: usize,
    pub feasible: usize,
    pub unsafe_points: usize,
    pub undecided: usize,
    pub search_nodes: usize,
    pub boxes_split: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExploredPoint {
    pub point: Point,
    pub verdict: Verdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvariantResult {
    pub k: LowerSet,
    pub f1: LowerSet,
    pub f2: UpperSet,
    pub undecided: Vec<UndecidedBox>,
    pub gap_final: f64,
    /// Gap before each subdivision, then the final gap.
    pub gap_trace: Vec<f64>,
    pub certificates: Vec<ExploredPoint>,
    pub epsilon: f64,
    pub outcome: Outcome,
    pub counters: SynthCounters,
}

impl InvariantResult {
    pub fn stalled_boxes(&self) -> usize {
        self.undecided.iter().filter(|b| b.stalled).count()
    }
}

/// Max-heap entry: larger diameter first, then lexicographically smaller
/// lower corner.
struct Queued(AxisBox, f64);

impl PartialEq for Queued {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Queued {}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        self.1.total_cmp(&other.1).then_with(|| {
            other
                .0
                .lo()
                .iter()
                .zip(self.0.lo())
                .map(|(a, b)| a.total_cmp(b))
                .find(|o| o.is_ne())
                .unwrap_or(Ordering::Equal)
        })
    }
}

fn point_key(p: &[f64]) -> Vec<u64> {
    p.iter().map(|v| v.to_bits()).collect()
}

struct Synth<'a> {
    sys: &'a MonotoneSystem,
    x: &'a LowerSet,
    opts: &'a SynthOptions,
    f1: LowerSet,
    f2: UpperSet,
    certificates: Vec<ExploredPoint>,
    undecided_points: HashSet<Vec<u64>>,
    counters: SynthCounters,
}

impl Synth<'_> {
    fn known(&self, p: &[f64]) -> bool {
        self.f1.contains(p) || self.f2.contains(p) || !self.x.contains(p)
    }

    /// Classifies `p` and commits the outcome. Returns the verdict kind, or
    /// `None` when `p` was already known.
    fn classify(&mut self, p: &Point) -> Result<Option<&'static str>> {
        if self.known(p) {
            return Ok(None);
        }
        let key = point_key(p);
        if self.undecided_points.contains(&key) {
            return Ok(Some("undecided"));
        }
        let sys = self.sys;
        let search = &self.opts.search;
        // For control-monotone systems the unsafe search only follows the
        // minimal inputs and is cheap, so it goes first.
        let unsafe_first = sys.class().control_monotone();
        let mut verdict = None;
        for pass in 0..2 {
            let v = if (pass == 0) == unsafe_first {
                leads_to_unsafe_given(sys, self.x, &self.f2, Some(&self.f1), p, search)?
            } else {
                open_loop_feasible_avoiding(sys, self.x, Some(&self.f2), p, search)?
            };
            if let Verdict::Undecided { nodes, .. } = v {
                self.counters.search_nodes += nodes;
            } else {
                verdict = Some(v);
                break;
            }
        }
        self.counters.points_classified += 1;
        let verdict = match verdict {
            Some(Verdict::Feasible(cert)) => {
                self.counters.feasible += 1;
                for q in cert.tube_points() {
                    self.f1.insert(q.clone())?;
                }
                Verdict::Feasible(cert)
            }
            Some(Verdict::Unsafe(cert)) => {
                self.counters.unsafe_points += 1;
                self.f2.insert(p.clone())?;
                Verdict::Unsafe(cert)
            }
            _ => {
                self.counters.undecided += 1;
                self.undecided_points.insert(key);
                Verdict::Undecided {
                    horizon: search.n_max,
                    nodes: search.node_budget,
                }
            }
        };
        let kind = verdict.kind();
        self.certificates.push(ExploredPoint {
            point: p.clone(),
            verdict,
        });
        Ok(Some(kind))
    }

    fn resolved(&self, b: &AxisBox) -> bool {
        box_resolved(b, &self.f1, &self.f2, self.x)
    }

    fn finish(self, undecided: Vec<UndecidedBox>, gap_final: f64, gap_trace: Vec<f64>, outcome: Outcome) -> InvariantResult {
        InvariantResult {
            k: self.f1.clone(),
            f1: self.f1,
            f2: self.f2,
            undecided,
            gap_final,
            gap_trace,
            certificates: self.certificates,
            epsilon: self.opts.epsilon,
            outcome,
            counters: self.counters,
        }
    }
}

/// Approximates the maximal robust controlled invariant inside `X`.
///
/// Boxes are processed largest first. Each processed box is split and the
/// lower corner of every unresolved child is classified; the parent's
/// center is the lower corner of its top child and is classified first.
/// A classification commits a feasible tube to `F1` or an unsafe point to
/// `F2`. Points that stay undecided are cached and leave their boxes
/// flagged as stalled when the loop ends.
pub fn synthesize(sys: &MonotoneSystem, x: &LowerSet, opts: &SynthOptions) -> Result<InvariantResult> {
    if !(opts.epsilon > 0.0) {
        return Err(Error::Invalid(format!("epsilon must be positive, got {}", opts.epsilon)));
    }
    if x.space() != sys.space() {
        return Err(Error::SpaceMismatch);
    }
    let space = sys.space().clone();
    let signs = space.signs().to_vec();
    let mut st = Synth {
        sys,
        x,
        opts,
        f1: LowerSet::empty(space.clone()),
        f2: UpperSet::empty(space.clone()),
        certificates: Vec::new(),
        undecided_points: HashSet::new(),
        counters: SynthCounters::default(),
    };

    // Maximal points of X.
    let mut all_feasible = !x.is_empty();
    for m in x.boundary().elements().to_vec() {
        st.classify(&m)?;
        all_feasible &= st.f1.contains(&m);
    }
    if all_feasible {
        // F1 now covers X; the tubes only add points already inside it.
        let k = x.clone();
        let mut r = st.finish(Vec::new(), 0.0, vec![0.0], Outcome::AllFeasible);
        r.k = k.clone();
        r.f1 = k;
        return Ok(r);
    }

    // Minimal point of X within the working box, plus user seeds.
    let bottom = sys.work_box().bottom(&signs);
    let mut candidates: Vec<Point> = Vec::new();
    if x.contains(&bottom) {
        candidates.push(bottom);
    }
    candidates.extend(opts.seeds.iter().filter(|s| x.contains(s)).cloned());
    for c in &candidates {
        st.classify(c)?;
    }
    if !candidates.is_empty() && candidates.iter().all(|c| st.f2.contains(c)) {
        let r = st.finish(Vec::new(), 0.0, vec![0.0], Outcome::NoneFeasible);
        return Ok(r);
    }

    let mut heap = BinaryHeap::new();
    let mut settled: Vec<AxisBox> = Vec::new();
    let mut gap_trace = Vec::new();
    let root = sys.work_box().clone();
    if !st.resolved(&root) {
        let d = root.diameter();
        if d <= opts.epsilon {
            settled.push(root);
        } else {
            heap.push(Queued(root, d));
        }
    }
    while let Some(Queued(bx, diameter)) = heap.pop() {
        if st.resolved(&bx) {
            continue;
        }
        gap_trace.push(diameter);
        st.counters.boxes_split += 1;
        let mut children = bx.split();
        // The parent's center is the lower corner of the all-upper child.
        let center = children.len() - 1;
        children.swap(0, center);
        for child in children {
            if st.resolved(&child) {
                continue;
            }
            st.classify(&child.bottom(&signs))?;
            if st.resolved(&child) {
                continue;
            }
            let d = child.diameter();
            if d <= opts.epsilon {
                settled.push(child);
            } else {
                heap.push(Queued(child, d));
            }
        }
    }

    let remaining: Vec<AxisBox> = settled.into_iter().filter(|b| !st.resolved(b)).collect();
    let gap_final = gap(&st.f1, &st.f2, x, &remaining);
    gap_trace.push(gap_final);
    let undecided: Vec<UndecidedBox> = remaining
        .into_iter()
        .map(|b| UndecidedBox {
            stalled: !st.f1.contains(&b.bottom(&signs)),
            bx: b,
        })
        .collect();
    let outcome = if undecided.iter().any(|b| b.stalled) {
        Outcome::Conservative
    } else {
        Outcome::EpsilonOptimal
    };
    Ok(st.finish(undecided, gap_final, gap_trace, outcome))
}

/// A state feedback on `K` built on demand: the first input whose worst-case
/// successors all stay in `K`, memoized per queried point.
#[derive(Clone, Debug)]
pub struct Controller {
    sys: MonotoneSystem,
    k: LowerSet,
    table: HashMap<Vec<u64>, usize>,
}

impl Controller {
    pub fn invariant(&self) -> &LowerSet {
        &self.k
    }

    pub fn cached(&self) -> usize {
        self.table.len()
    }

    pub fn query(&mut self, x: &[f64]) -> Result<usize> {
        if !self.k.contains(x) {
            return Err(Error::Domain(x.into()));
        }
        let key = point_key(x);
        if let Some(&u) = self.table.get(&key) {
            return Ok(u);
        }
        for u in 0..self.sys.inputs().len() {
            let mut inside = true;
            for d in self.sys.disturbances() {
                if !self.k.contains(&self.sys.step(x, u, d)?) {
                    inside = false;
                    break;
                }
            }
            if inside {
                self.table.insert(key, u);
                return Ok(u);
            }
        }
        Err(Error::NoSafeInput(x.into()))
    }
}

impl Policy for Controller {
    fn choose(&mut self, x: &[f64]) -> Result<usize> {
        self.query(x)
    }
}

/// Builds the controller after confirming `K` is a controlled invariant.
pub fn extract_controller(sys: &MonotoneSystem, k: &LowerSet) -> Result<Controller> {
    let report = verify_invariant(sys, k, k)?;
    if let Some(fail) = report.failure() {
        return Err(Error::Precondition {
            message: "set is not a controlled invariant".into(),
            point: fail.state.clone(),
        });
    }
    Ok(Controller {
        sys: sys.clone(),
        k: k.clone(),
        table: HashMap::new(),
    })
}

/// Invariance with fewer inputs and more disturbances implies invariance
/// with more inputs and fewer disturbances. Returns whether that
/// implication holds on `k`.
pub fn check_containment_lemma(
    sys: &MonotoneSystem,
    x: &LowerSet,
    u_sub: &[usize],
    u_sup: &[usize],
    d_sub: &[Point],
    d_sup: &[Point],
    k: &LowerSet,
) -> Result<bool> {
    if let Some(u) = u_sub.iter().find(|u| !u_sup.contains(u)) {
        return Err(Error::Invalid(format!("input {u} is not in the larger input set")));
    }
    if let Some(d) = d_sup.iter().find(|d| !d_sub.contains(d)) {
        return Err(Error::Invalid(format!("disturbance {d:?} is not in the larger disturbance set")));
    }
    let small = sys.clone().with_input_subset(u_sub)?.with_disturbances(d_sub.to_vec())?;
    let large = sys.clone().with_input_subset(u_sup)?.with_disturbances(d_sup.to_vec())?;
    let premise = verify_invariant(&small, x, k)?.is_invariant;
    Ok(!premise || verify_invariant(&large, x, k)?.is_invariant)
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::{switched2d, Dynamics, Input, MonoClass};
    use crate::order::OrderedSpace;

    fn hand_built_k(sys: &MonotoneSystem) -> LowerSet {
        LowerSet::from_points(sys.space().clone(), [[50.0, 25.0], [25.0, 50.0], [36.0, 31.0]]).unwrap()
    }

    fn box_x(sys: &MonotoneSystem) -> LowerSet {
        LowerSet::from_points(sys.space().clone(), [[60.0, 60.0]]).unwrap()
    }

    fn scalar(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> MonotoneSystem {
        MonotoneSystem::new(
            Arc::new(OrderedSpace::new(vec![1], Some(AxisBox::nonnegative(1))).unwrap()),
            AxisBox::from_bounds(&[[0.0, 1.0]]).unwrap(),
            vec![Input::new("0", vec![0.0])],
            vec![Point::from([0.0])],
            Dynamics::native(move |x, _, _| vec![f(x[0])]),
            MonoClass::Cdsm,
        )
        .unwrap()
        .with_input_signs(vec![1])
    }

    #[test]
    fn hand_built_set_is_invariant() {
        let sys = switched2d();
        let k = hand_built_k(&sys);
        let r = verify_invariant(&sys, &box_x(&sys), &k).unwrap();
        assert!(r.is_invariant);
        assert_eq!(r.states_checked, 3);
        assert_eq!(r.successor_evaluations, 6);
        let chosen: Vec<(Point, usize)> = r.per_state.iter().map(|s| (s.state.clone(), s.chosen.unwrap())).collect();
        for (state, u) in chosen {
            let expected = if state.coords() == [50.0, 25.0] { 1 } else { 0 };
            assert_eq!(u, expected, "{state:?}");
        }
        assert_eq!(verify_invariant_par(&sys, &box_x(&sys), &k).unwrap(), r);
    }

    #[test]
    fn removing_a3_breaks_invariance() {
        let sys = switched2d();
        let k = LowerSet::from_points(sys.space().clone(), [[50.0, 25.0], [25.0, 50.0]]).unwrap();
        let r = verify_invariant(&sys, &box_x(&sys), &k).unwrap();
        assert!(!r.is_invariant);
        let fail = r.failure().unwrap();
        assert_eq!(fail.state.coords(), &[25.0, 50.0]);
        let esc: Vec<Point> = fail.outcomes.iter().map(|o| o.escaped.clone().unwrap()).collect();
        assert!((esc[0][0] - 35.2).abs() < 1e-9 && (esc[0][1] - 30.2).abs() < 1e-9);
        assert!((esc[1][0] - 15.2).abs() < 1e-9 && (esc[1][1] - 57.7).abs() < 1e-9);
    }

    #[test]
    fn origin_is_fixed_without_disturbance() {
        let sys = switched2d().with_disturbances(vec![Point::from([0.0, 0.0])]).unwrap();
        let k = LowerSet::from_points(sys.space().clone(), [[0.0, 0.0]]).unwrap();
        assert!(verify_invariant(&sys, &box_x(&sys), &k).unwrap().is_invariant);
    }

    #[test]
    fn k_outside_x_is_a_precondition_error() {
        let sys = switched2d();
        let x = LowerSet::from_points(sys.space().clone(), [[40.0, 40.0]]).unwrap();
        let err = verify_invariant(&sys, &x, &hand_built_k(&sys)).unwrap_err();
        assert!(matches!(err, Error::Precondition { .. }));
    }

    #[test]
    fn contraction_gives_all_of_x() {
        let sys = scalar(|x| 0.5 * x);
        let x = LowerSet::from_points(sys.space().clone(), [[1.0]]).unwrap();
        let r = synthesize(&sys, &x, &SynthOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::AllFeasible);
        assert_eq!(r.k, x);
    }

    #[test]
    fn drift_gives_empty_set() {
        let sys = scalar(|x| x + 1.0);
        let x = LowerSet::from_points(sys.space().clone(), [[1.0]]).unwrap();
        let r = synthesize(&sys, &x, &SynthOptions::default()).unwrap();
        assert_eq!(r.outcome, Outcome::NoneFeasible);
        assert!(r.k.is_empty());
    }

    #[test]
    fn threshold_dynamics_resolved_to_epsilon() {
        // x+ = max(0, 2x - 0.5) under X = [0, 1]: 0.5 is a repelling fixed
        // point, so the maximal invariant is [0, 0.5].
        let sys = scalar(|x| (2.0 * x - 0.5).max(0.0));
        let x = LowerSet::from_points(sys.space().clone(), [[1.0]]).unwrap();
        let opts = SynthOptions {
            epsilon: 0.01,
            ..SynthOptions::default()
        };
        let r = synthesize(&sys, &x, &opts).unwrap();
        assert!(verify_invariant(&sys, &x, &r.k).unwrap().is_invariant);
        let top = r.k.boundary().elements()[0][0];
        assert!(top <= 0.5 + 1e-12 && top >= 0.5 - 0.01, "{top}");
        assert!(r.gap_final <= 0.01);
        assert!(r.gap_trace.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn epsilon_must_be_positive() {
        let sys = switched2d();
        let opts = SynthOptions {
            epsilon: 0.0,
            ..SynthOptions::default()
        };
        assert!(synthesize(&sys, &box_x(&sys), &opts).is_err());
    }

    #[test]
    fn controller_examples() {
        let sys = switched2d();
        let mut c = extract_controller(&sys, &hand_built_k(&sys)).unwrap();
        assert_eq!(c.query(&[50.0, 25.0]).unwrap(), 1);
        assert_eq!(c.query(&[0.0, 0.0]).unwrap(), 0);
        assert!(matches!(c.query(&[60.0, 60.0]), Err(Error::Domain(_))));
        assert_eq!(c.cached(), 2);
    }

    #[test]
    fn controller_requires_invariance() {
        let sys = switched2d();
        let k = LowerSet::from_points(sys.space().clone(), [[50.0, 25.0], [25.0, 50.0]]).unwrap();
        assert!(extract_controller(&sys, &k).is_err());
    }

    #[test]
    fn containment_lemma_examples() {
        let sys = switched2d();
        let k = hand_built_k(&sys);
        let x = box_x(&sys);
        let d = vec![Point::from([0.2, 0.2])];
        assert!(check_containment_lemma(&sys, &x, &[1, 0], &[0, 1], &d, &d, &k).unwrap());
        assert!(check_containment_lemma(&sys, &x, &[0, 1], &[0, 1], &d, &d, &k).unwrap());
        assert!(check_containment_lemma(&sys, &x, &[0, 1], &[1], &d, &d, &k).is_err());
    }

    #[test]
    fn queue_prefers_large_then_low_boxes() {
        let a = Queued(AxisBox::from_bounds(&[[0.0, 1.0]]).unwrap(), 1.0);
        let b = Queued(AxisBox::from_bounds(&[[1.0, 2.0]]).unwrap(), 1.0);
        let c = Queued(AxisBox::from_bounds(&[[5.0, 7.0]]).unwrap(), 2.0);
        let mut h = BinaryHeap::from(vec![b, a, c]);
        assert_eq!(h.pop().unwrap().0.lo(), &[5.0]);
        assert_eq!(h.pop().unwrap().0.lo(), &[0.0]);
        assert_eq!(h.pop().unwrap().0.lo(), &[1.0]);
    }
}
