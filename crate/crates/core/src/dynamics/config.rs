//! TOML problem description: system, constraint set and synthesis settings.
//! The grammar is documented in `docs/config.md`.

use std::sync::Arc;

use serde::{Deserialize, Serialize};
use toml::Spanned;

use super::expr::{Arity, Expr};
use super::{acc_constraint, make_acc, switched2d, AccParams, Dynamics, Input, MonoClass, MonotoneSystem};
use crate::error::{Error, Result};
use crate::order::{AxisBox, LowerSet, OrderedSpace, Point};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    builtin: Option<String>,
    params: Option<AccParams>,
    state: Option<RawState>,
    inputs: Option<RawInputs>,
    disturbances: Option<RawDisturbances>,
    dynamics: Option<RawDynamics>,
    constraint: Option<RawConstraint>,
    #[serde(default)]
    synthesis: Settings,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawState {
    signs: Vec<i8>,
    #[serde(rename = "box")]
    work_box: Vec<[f64; 2]>,
    region: Option<Vec<[f64; 2]>>,
    #[serde(default)]
    tolerance: f64,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInputs {
    values: Vec<Vec<f64>>,
    labels: Option<Vec<String>>,
    signs: Option<Vec<i8>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDisturbances {
    max: Vec<Vec<f64>>,
    signs: Option<Vec<i8>>,
    #[serde(rename = "box")]
    dist_box: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDynamics {
    class: MonoClass,
    f: Vec<Spanned<String>>,
    lipschitz: Option<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConstraint {
    max: Vec<Vec<f64>>,
}

/// Synthesis and simulation knobs carried by the config file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Settings {
    pub epsilon: f64,
    pub nmax: usize,
    /// Node budget per point classification.
    pub budget: u64,
    pub seed: u64,
    /// Extra candidate feasible points explored alongside `min(X)`.
    pub seeds: Vec<Vec<f64>>,
    /// Restrict searches to the minimal inputs.
    pub u_min_only: bool,
}

impl Default for Settings {
    fn default() -> Self {
        Settings {
            epsilon: 1.0,
            nmax: 50,
            budget: 200_000,
            seed: 0,
            seeds: Vec::new(),
            u_min_only: false,
        }
    }
}

/// A fully built problem: the system, the lower-closed constraint `X`, and
/// the settings.
#[derive(Clone, Debug)]
pub struct Problem {
    pub system: MonotoneSystem,
    pub constraint: LowerSet,
    pub settings: Settings,
}

fn line_col(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.rsplit('\n').next().map_or(0, |l| l.chars().count()) + 1;
    (line, column)
}

fn to_box(bounds: &[[f64; 2]], what: &str) -> Result<AxisBox> {
    AxisBox::from_bounds(bounds).map_err(|e| Error::Config(format!("{what}: {e}")))
}

fn check_dim(what: &str, expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::Config(format!("{what}: expected dimension {expected}, got {got}")));
    }
    Ok(())
}

fn check_signs(what: &str, signs: &[i8]) -> Result<()> {
    if signs.iter().any(|s| *s != 1 && *s != -1) {
        return Err(Error::Config(format!("{what}: signs must be +1 or -1")));
    }
    Ok(())
}

pub fn parse_config(text: &str) -> Result<Problem> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let (line, column) = e.span().map_or((1, 1), |s| line_col(text, s.start));
        Error::Parse {
            line,
            column,
            message: e.message().to_string(),
        }
    })?;
    if raw.synthesis.nmax == 0 {
        return Err(Error::Config("synthesis.nmax must be at least 1".into()));
    }

    let (system, default_constraint) = match raw.builtin.as_deref() {
        Some(name) => {
            if raw.state.is_some() || raw.inputs.is_some() || raw.disturbances.is_some() || raw.dynamics.is_some() {
                return Err(Error::Config(format!(
                    "builtin {name:?} cannot be combined with [state], [inputs], [disturbances] or [dynamics]"
                )));
            }
            builtin(name, raw.params.clone())?
        }
        None => {
            if raw.params.is_some() {
                return Err(Error::Config("[params] only applies to builtin systems".into()));
            }
            (custom(text, &raw)?, None)
        }
    };

    let space = system.space().clone();
    let constraint = match (&raw.constraint, default_constraint) {
        (Some(c), _) => {
            for p in &c.max {
                check_dim("constraint.max", space.dim(), p.len())?;
            }
            LowerSet::from_points(space.clone(), c.max.iter().map(|p| Point::new(p.clone())))?
        }
        (None, Some(c)) => c,
        (None, None) => return Err(Error::Config("missing [constraint] section".into())),
    };
    for s in &raw.synthesis.seeds {
        check_dim("synthesis.seeds", space.dim(), s.len())?;
    }
    Ok(Problem {
        system,
        constraint,
        settings: raw.synthesis,
    })
}

/// Parses a config and returns only its system.
pub fn parse_system(text: &str) -> Result<MonotoneSystem> {
    parse_config(text).map(|p| p.system)
}

fn builtin(name: &str, params: Option<AccParams>) -> Result<(MonotoneSystem, Option<LowerSet>)> {
    match name {
        "switched2d" => {
            if params.is_some() {
                return Err(Error::Config("switched2d takes no [params]".into()));
            }
            let sys = switched2d();
            let x = LowerSet::from_points(sys.space().clone(), [[60.0, 60.0]])?;
            Ok((sys, Some(x)))
        }
        "acc" => {
            let p = params.unwrap_or_default();
            let sys = make_acc(p.clone())?;
            let x = acc_constraint(&p, sys.space().clone());
            Ok((sys, Some(x)))
        }
        other => Err(Error::Config(format!(
            "unknown builtin {other:?} (expected \"switched2d\" or \"acc\")"
        ))),
    }
}

fn custom(text: &str, raw: &RawConfig) -> Result<MonotoneSystem> {
    let missing = |s: &str| Error::Config(format!("missing [{s}] section"));
    let state = raw.state.as_ref().ok_or_else(|| missing("state"))?;
    let inputs = raw.inputs.as_ref().ok_or_else(|| missing("inputs"))?;
    let dist = raw.disturbances.as_ref().ok_or_else(|| missing("disturbances"))?;
    let dynamics = raw.dynamics.as_ref().ok_or_else(|| missing("dynamics"))?;

    let n = state.signs.len();
    check_signs("state.signs", &state.signs)?;
    check_dim("state.box", n, state.work_box.len())?;
    let work = to_box(&state.work_box, "state.box")?;
    let region = match &state.region {
        Some(r) => {
            check_dim("state.region", n, r.len())?;
            to_box(r, "state.region")?
        }
        None => AxisBox::nonnegative(n),
    };
    let space = Arc::new(OrderedSpace::new(state.signs.clone(), Some(region))?.with_tolerance(state.tolerance));

    if inputs.values.is_empty() {
        return Err(Error::Config("inputs.values is empty".into()));
    }
    let m = inputs.values[0].len();
    for v in &inputs.values {
        check_dim("inputs.values", m, v.len())?;
    }
    let labels: Vec<String> = match &inputs.labels {
        Some(l) if l.len() != inputs.values.len() => {
            return Err(Error::Config("inputs.labels must match inputs.values".into()))
        }
        Some(l) => l.clone(),
        None => (1..=inputs.values.len()).map(|i| i.to_string()).collect(),
    };
    let input_list = labels
        .into_iter()
        .zip(&inputs.values)
        .map(|(l, v)| Input::new(l, v.clone()))
        .collect();

    if dist.max.is_empty() {
        return Err(Error::Config("disturbances.max is empty".into()));
    }
    let p = dist.max[0].len();
    for d in &dist.max {
        check_dim("disturbances.max", p, d.len())?;
    }

    let arity = Arity {
        states: n,
        inputs: m,
        disturbances: p,
    };
    if dynamics.f.len() != n {
        return Err(Error::Config(format!(
            "dynamics.f has {} expressions for a {n}-dimensional state (arity mismatch)",
            dynamics.f.len()
        )));
    }
    let mut exprs = Vec::with_capacity(n);
    for src in &dynamics.f {
        let e = Expr::parse(src.get_ref(), arity).map_err(|e| {
            // span starts at the opening quote
            let (line, column) = line_col(text, src.span().start + 1);
            Error::Parse {
                line,
                column: column + e.column - 1,
                message: e.message,
            }
        })?;
        exprs.push(e);
    }

    let mut sys = MonotoneSystem::new(
        space,
        work,
        input_list,
        dist.max.iter().map(|d| Point::new(d.clone())).collect(),
        Dynamics::Expr(exprs),
        dynamics.class,
    )?;
    if let Some(s) = &inputs.signs {
        check_signs("inputs.signs", s)?;
        check_dim("inputs.signs", m, s.len())?;
        sys = sys.with_input_signs(s.clone());
    }
    if let Some(s) = &dist.signs {
        check_signs("disturbances.signs", s)?;
        check_dim("disturbances.signs", p, s.len())?;
        sys = sys.with_dist_signs(s.clone());
    }
    if let Some(b) = &dist.dist_box {
        check_dim("disturbances.box", p, b.len())?;
        sys = sys.with_dist_box(to_box(b, "disturbances.box")?);
    }
    if let Some(l) = dynamics.lipschitz {
        if !(l >= 0.0) {
            return Err(Error::Config("dynamics.lipschitz must be nonnegative".into()));
        }
        sys = sys.with_lipschitz(l);
    }
    Ok(sys)
}
