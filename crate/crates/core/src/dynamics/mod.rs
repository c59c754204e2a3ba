//! System models: `x(k+1) = f(x(k), u(k), d(k))` with finite reduced input
//! and disturbance sets, monotonicity metadata, and the two built-in
//! benchmark systems.

pub mod config;
pub mod expr;
mod validate;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::order::{AxisBox, OrderedSpace, Point};

pub use expr::{Arity, Expr, ExprError};
pub use validate::{validate_monotonicity, Counterexample, MonotonicityReport};

/// Which arguments of `f` preserve the order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MonoClass {
    /// Monotone in the state only.
    #[serde(rename = "SM")]
    Sm,
    /// State and control.
    #[serde(rename = "CSM")]
    Csm,
    /// State and disturbance.
    #[serde(rename = "DSM")]
    Dsm,
    /// State, control and disturbance.
    #[serde(rename = "CDSM")]
    Cdsm,
}

impl MonoClass {
    pub fn control_monotone(self) -> bool {
        matches!(self, MonoClass::Csm | MonoClass::Cdsm)
    }

    pub fn disturbance_monotone(self) -> bool {
        matches!(self, MonoClass::Dsm | MonoClass::Cdsm)
    }

    pub fn from_flags(control: bool, disturbance: bool) -> Self {
        match (control, disturbance) {
            (false, false) => MonoClass::Sm,
            (true, false) => MonoClass::Csm,
            (false, true) => MonoClass::Dsm,
            (true, true) => MonoClass::Cdsm,
        }
    }
}

impl fmt::Display for MonoClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MonoClass::Sm => "SM",
            MonoClass::Csm => "CSM",
            MonoClass::Dsm => "DSM",
            MonoClass::Cdsm => "CDSM",
        })
    }
}

/// One admissible control value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Input {
    pub label: String,
    pub value: Vec<f64>,
}

impl Input {
    pub fn new(label: impl Into<String>, value: Vec<f64>) -> Self {
        Input {
            label: label.into(),
            value,
        }
    }
}

/// Vehicle parameters plus the sampling period.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AccParams {
    pub mass: f64,
    pub f0: f64,
    pub f2: f64,
    pub u_min: f64,
    pub u_max: f64,
    pub v_max: f64,
    /// Smallest admissible headway (m).
    pub d_min: f64,
    /// Headway upper bound of the working box (m).
    pub headway_max: f64,
    pub tau: f64,
}

impl Default for AccParams {
    fn default() -> Self {
        AccParams {
            mass: 1370.0,
            f0: 51.0709,
            f2: 0.4161,
            u_min: -4031.9,
            u_max: 2687.9,
            v_max: 15.0,
            d_min: 10.0,
            headway_max: 70.0,
            tau: 0.5,
        }
    }
}

impl AccParams {
    /// `d(v+)/dv` at `v_max`; must stay nonnegative for monotonicity.
    pub fn velocity_slope(&self) -> f64 {
        1.0 - 2.0 * self.tau * self.f2 * self.v_max / self.mass
    }

    /// Net force `alpha(u, v)`.
    pub fn force(&self, u: f64, v: f64) -> f64 {
        if v > 0.0 {
            u - self.f0 - self.f2 * v * v
        } else {
            (u - self.f0).max(0.0)
        }
    }
}

type NativeFn = dyn Fn(&[f64], &[f64], &[f64]) -> Vec<f64> + Send + Sync;

#[derive(Clone)]
pub enum Dynamics {
    /// `f(x, u, d) = A_u x + B d + c`, input `u` selecting the matrix.
    SwitchedAffine {
        matrices: Vec<Vec<Vec<f64>>>,
        offset: Vec<f64>,
        dist: Vec<Vec<f64>>,
    },
    /// Forward-Euler car-following model in `(z, v) = (-h, v)` coordinates,
    /// disturbance `d' = -lead velocity`.
    Acc(AccParams),
    /// One parsed expression per state coordinate.
    Expr(Vec<Expr>),
    /// Arbitrary Rust closure `(x, u, d) -> x+`.
    Native(Arc<NativeFn>),
}

impl fmt::Debug for Dynamics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Dynamics::SwitchedAffine { matrices, offset, dist } => f
                .debug_struct("SwitchedAffine")
                .field("matrices", matrices)
                .field("offset", offset)
                .field("dist", dist)
                .finish(),
            Dynamics::Acc(p) => f.debug_tuple("Acc").field(p).finish(),
            Dynamics::Expr(e) => {
                let shown: Vec<String> = e.iter().map(ToString::to_string).collect();
                f.debug_tuple("Expr").field(&shown).finish()
            }
            Dynamics::Native(_) => f.write_str("Native(..)"),
        }
    }
}

impl Dynamics {
    pub fn native<F>(f: F) -> Self
    where
        F: Fn(&[f64], &[f64], &[f64]) -> Vec<f64> + Send + Sync + 'static,
    {
        Dynamics::Native(Arc::new(f))
    }

    fn eval(&self, x: &[f64], u_idx: usize, u: &[f64], d: &[f64]) -> Vec<f64> {
        match self {
            Dynamics::SwitchedAffine { matrices, offset, dist } => {
                let a = &matrices[u_idx];
                (0..x.len())
                    .map(|i| {
                        let ax: f64 = a[i].iter().zip(x).map(|(aij, xj)| aij * xj).sum();
                        let bd: f64 = dist[i].iter().zip(d).map(|(bij, dj)| bij * dj).sum();
                        ax + bd + offset[i]
                    })
                    .collect()
            }
            Dynamics::Acc(p) => {
                let (z, v) = (x[0], x[1]);
                let z_next = z + p.tau * (v + d[0]);
                let v_next = (v + p.tau / p.mass * p.force(u[0], v)).max(0.0);
                vec![z_next, v_next]
            }
            Dynamics::Expr(es) => es.iter().map(|e| e.eval(x, u, d)).collect(),
            Dynamics::Native(f) => f(x, u, d),
        }
    }
}

/// A discrete-time monotone system with its finite reduced sets.
#[derive(Clone, Debug)]
pub struct MonotoneSystem {
    space: Arc<OrderedSpace>,
    work_box: AxisBox,
    inputs: Vec<Input>,
    input_signs: Option<Vec<i8>>,
    disturbances: Vec<Point>,
    dist_signs: Option<Vec<i8>>,
    dist_box: Option<AxisBox>,
    dynamics: Dynamics,
    class: MonoClass,
    lipschitz: Option<f64>,
}

impl MonotoneSystem {
    /// `disturbances` is the finite set used by every analysis (normally
    /// `max(D)` for DSM systems). Inputs are tried in the given order.
    pub fn new(
        space: Arc<OrderedSpace>,
        work_box: AxisBox,
        inputs: Vec<Input>,
        disturbances: Vec<Point>,
        dynamics: Dynamics,
        class: MonoClass,
    ) -> Result<Self> {
        if !work_box.is_bounded() {
            return Err(Error::Invalid("working box must be bounded".into()));
        }
        if work_box.dim() != space.dim() {
            return Err(Error::Dimension {
                expected: space.dim(),
                got: work_box.dim(),
            });
        }
        if inputs.is_empty() {
            return Err(Error::Invalid("at least one input is required".into()));
        }
        if disturbances.is_empty() {
            return Err(Error::Invalid("at least one disturbance point is required".into()));
        }
        let m = inputs[0].value.len();
        if let Some(bad) = inputs.iter().find(|i| i.value.len() != m) {
            return Err(Error::Dimension {
                expected: m,
                got: bad.value.len(),
            });
        }
        let p = disturbances[0].len();
        if let Some(bad) = disturbances.iter().find(|d| d.len() != p) {
            return Err(Error::Dimension {
                expected: p,
                got: bad.len(),
            });
        }
        if let Dynamics::Expr(es) = &dynamics {
            if es.len() != space.dim() {
                return Err(Error::Invalid(format!(
                    "{} expressions for a {}-dimensional state",
                    es.len(),
                    space.dim()
                )));
            }
        }
        Ok(MonotoneSystem {
            space,
            work_box,
            inputs,
            input_signs: None,
            disturbances,
            dist_signs: None,
            dist_box: None,
            dynamics,
            class,
            lipschitz: None,
        })
    }

    pub fn with_lipschitz(mut self, l: f64) -> Self {
        self.lipschitz = Some(l);
        self
    }

    pub fn with_input_signs(mut self, signs: Vec<i8>) -> Self {
        self.input_signs = Some(signs);
        self
    }

    pub fn with_dist_signs(mut self, signs: Vec<i8>) -> Self {
        self.dist_signs = Some(signs);
        self
    }

    /// Full disturbance region, used for random simulation and sampling.
    pub fn with_dist_box(mut self, b: AxisBox) -> Self {
        self.dist_box = Some(b);
        self
    }

    /// Replaces the finite disturbance set.
    pub fn with_disturbances(mut self, d: Vec<Point>) -> Result<Self> {
        if d.is_empty() {
            return Err(Error::Invalid("at least one disturbance point is required".into()));
        }
        self.disturbances = d;
        Ok(self)
    }

    /// Keeps only the inputs at `indices`, in that order.
    pub fn with_input_subset(mut self, indices: &[usize]) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Invalid("input subset is empty".into()));
        }
        let mut picked = Vec::with_capacity(indices.len());
        for &i in indices {
            let inp = self
                .inputs
                .get(i)
                .ok_or_else(|| Error::Invalid(format!("input index {i} out of range")))?;
            picked.push(inp.clone());
        }
        if let Dynamics::SwitchedAffine { matrices, .. } = &mut self.dynamics {
            *matrices = indices.iter().map(|&i| matrices[i].clone()).collect();
        }
        self.inputs = picked;
        Ok(self)
    }

    pub fn space(&self) -> &Arc<OrderedSpace> {
        &self.space
    }

    pub fn work_box(&self) -> &AxisBox {
        &self.work_box
    }

    pub fn inputs(&self) -> &[Input] {
        &self.inputs
    }

    pub fn input_signs(&self) -> Option<&[i8]> {
        self.input_signs.as_deref()
    }

    pub fn disturbances(&self) -> &[Point] {
        &self.disturbances
    }

    pub fn dist_signs(&self) -> Option<&[i8]> {
        self.dist_signs.as_deref()
    }

    pub fn dist_box(&self) -> Option<&AxisBox> {
        self.dist_box.as_ref()
    }

    pub fn dynamics(&self) -> &Dynamics {
        &self.dynamics
    }

    pub fn class(&self) -> MonoClass {
        self.class
    }

    pub fn lipschitz(&self) -> Option<f64> {
        self.lipschitz
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    /// `f(x, u, d)`; fails on dimension errors and non-finite results.
    pub fn step(&self, x: &[f64], u: usize, d: &[f64]) -> Result<Point> {
        if x.len() != self.dim() {
            return Err(Error::Dimension {
                expected: self.dim(),
                got: x.len(),
            });
        }
        let input = self
            .inputs
            .get(u)
            .ok_or_else(|| Error::Invalid(format!("input index {u} out of range")))?;
        let p = self.disturbances[0].len();
        if d.len() != p {
            return Err(Error::Dimension { expected: p, got: d.len() });
        }
        let y = self.dynamics.eval(x, u, &input.value, d);
        if y.len() != self.dim() || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::Evaluation {
                x: x.to_vec(),
                input: u,
                d: d.to_vec(),
            });
        }
        Ok(Point::new(y))
    }

    /// Indices of the inputs that are minimal under the input order, in
    /// declaration order. All inputs when no input order is declared.
    pub fn minimal_inputs(&self) -> Vec<usize> {
        let Some(signs) = self.input_signs.as_deref() else {
            return (0..self.inputs.len()).collect();
        };
        let le = |a: &[f64], b: &[f64]| {
            signs
                .iter()
                .zip(a.iter().zip(b))
                .all(|(s, (x, y))| f64::from(*s) * (x - y) <= 0.0)
        };
        (0..self.inputs.len())
            .filter(|&i| {
                !(0..self.inputs.len()).any(|j| {
                    j != i
                        && le(&self.inputs[j].value, &self.inputs[i].value)
                        && !(le(&self.inputs[i].value, &self.inputs[j].value) && j > i)
                })
            })
            .collect()
    }
}

/// Switched affine system `A_u x + B d + c`, checked for monotonicity
/// under the state signs (and nonnegative disturbance signs for DSM).
pub fn make_switched_affine(
    space: Arc<OrderedSpace>,
    work_box: AxisBox,
    matrices: Vec<Vec<Vec<f64>>>,
    offset: Vec<f64>,
    dist: Vec<Vec<f64>>,
    disturbances: Vec<Point>,
) -> Result<MonotoneSystem> {
    let n = space.dim();
    let signs = space.signs().to_vec();
    if matrices.is_empty() {
        return Err(Error::Invalid("at least one matrix is required".into()));
    }
    if offset.len() != n || dist.len() != n {
        return Err(Error::Dimension {
            expected: n,
            got: if offset.len() != n { offset.len() } else { dist.len() },
        });
    }
    for (k, a) in matrices.iter().enumerate() {
        if a.len() != n || a.iter().any(|r| r.len() != n) {
            return Err(Error::Invalid(format!("matrix {} is not {n}x{n}", k + 1)));
        }
        for i in 0..n {
            for j in 0..n {
                let conj = f64::from(signs[i] * signs[j]) * a[i][j];
                if conj < 0.0 {
                    return Err(Error::SignViolation {
                        matrix: k + 1,
                        row: i + 1,
                        col: j + 1,
                        value: conj,
                    });
                }
            }
        }
    }
    let p = dist.first().map_or(0, Vec::len);
    if p == 0 || dist.iter().any(|r| r.len() != p) {
        return Err(Error::Invalid("disturbance matrix rows must share a positive width".into()));
    }
    let dsm = (0..n).all(|i| (0..p).all(|j| f64::from(signs[i]) * dist[i][j] >= 0.0));
    let inputs = (1..=matrices.len())
        .map(|k| Input::new(k.to_string(), vec![k as f64]))
        .collect();
    let lipschitz = matrices
        .iter()
        .flat_map(|a| a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()))
        .fold(0.0, f64::max);
    let sys = MonotoneSystem::new(
        space,
        work_box,
        inputs,
        disturbances,
        Dynamics::SwitchedAffine {
            matrices,
            offset,
            dist,
        },
        if dsm { MonoClass::Dsm } else { MonoClass::Sm },
    )?
    .with_lipschitz(lipschitz);
    Ok(if dsm { sys.with_dist_signs(vec![1; p]) } else { sys })
}

/// The two-mode switched system with `A1 = (1.2 0.1; 0.2 0.5)`,
/// `A2 = (0.4 0.1; 0.1 1.1)`, `B = I` and `max(D) = (0.2, 0.2)` on the
/// nonnegative orthant.
pub fn switched2d() -> MonotoneSystem {
    let space = Arc::new(
        OrderedSpace::new(vec![1, 1], Some(AxisBox::nonnegative(2))).expect("valid space"),
    );
    let work = AxisBox::from_bounds(&[[0.0, 60.0], [0.0, 60.0]]).expect("valid box");
    make_switched_affine(
        space,
        work,
        vec![
            vec![vec![1.2, 0.1], vec![0.2, 0.5]],
            vec![vec![0.4, 0.1], vec![0.1, 1.1]],
        ],
        vec![0.0, 0.0],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![Point::from([0.2, 0.2])],
    )
    .expect("switched2d is monotone")
    .with_dist_box(AxisBox::from_bounds(&[[0.0, 0.2], [0.0, 0.2]]).expect("valid box"))
}

/// Forward-Euler discretization of the car-following model in
/// `(z, v) = (-headway, velocity)` with `d' = -lead velocity`.
///
/// State order is componentwise on `(z, v)`; larger `u` and larger `d'`
/// give larger successors, so the system is CDSM. The worst disturbance is
/// `d' = 0` (stopped leader). Inputs are `[u_min, u_max]`, braking first.
pub fn make_acc(params: AccParams) -> Result<MonotoneSystem> {
    if !(params.tau > 0.0) || !(params.mass > 0.0) {
        return Err(Error::Invalid("tau and mass must be positive".into()));
    }
    let slope = params.velocity_slope();
    if slope < 0.0 {
        return Err(Error::Discretization {
            tau: params.tau,
            slope,
        });
    }
    let region = AxisBox::new(
        vec![f64::NEG_INFINITY, 0.0],
        vec![f64::INFINITY, f64::INFINITY],
    )?;
    let space = Arc::new(OrderedSpace::new(vec![1, 1], Some(region))?);
    let work = AxisBox::from_bounds(&[
        [-params.headway_max, -params.d_min],
        [0.0, params.v_max],
    ])?;
    let inputs = vec![
        Input::new("u_min", vec![params.u_min]),
        Input::new("u_max", vec![params.u_max]),
    ];
    let lipschitz = 1.0 + params.tau;
    let dist_box = AxisBox::from_bounds(&[[-params.v_max, 0.0]])?;
    Ok(MonotoneSystem::new(
        space,
        work,
        inputs,
        vec![Point::from([0.0])],
        Dynamics::Acc(params),
        MonoClass::Cdsm,
    )?
    .with_input_signs(vec![1])
    .with_dist_signs(vec![1])
    .with_dist_box(dist_box)
    .with_lipschitz(lipschitz))
}

/// The constraint `h >= d_min, v <= v_max` as a lower set in `(z, v)`.
pub fn acc_constraint(params: &AccParams, space: Arc<OrderedSpace>) -> crate::order::LowerSet {
    crate::order::LowerSet::from_points(space, [[-params.d_min, params.v_max]])
        .expect("two-dimensional point")
}
