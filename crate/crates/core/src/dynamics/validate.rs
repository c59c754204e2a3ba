use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::MonotoneSystem;
use crate::error::Result;
use crate::order::{AxisBox, Point};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub x1: Point,
    pub u1: usize,
    pub d1: Point,
    pub x2: Point,
    pub u2: usize,
    pub d2: Point,
    pub y1: Point,
    pub y2: Point,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonotonicityReport {
    pub class_confirmed: bool,
    /// No samples were drawn; `class_confirmed` is vacuous.
    pub untested: bool,
    pub samples: usize,
    pub counterexample: Option<Counterexample>,
}

fn uniform_in(rng: &mut ChaCha8Rng, b: &AxisBox) -> Vec<f64> {
    b.lo()
        .iter()
        .zip(b.hi())
        .map(|(l, h)| if l == h { *l } else { rng.gen_range(*l..=*h) })
        .collect()
}

fn signed_le(signs: &[i8], a: &[f64], b: &[f64]) -> bool {
    signs
        .iter()
        .zip(a.iter().zip(b))
        .all(|(s, (x, y))| f64::from(*s) * (x - y) <= 0.0)
}

fn ordered_pair(signs: &[i8], a: Vec<f64>, b: Vec<f64>) -> (Vec<f64>, Vec<f64>) {
    let lo = signs
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(s, (x, y))| if *s > 0 { x.min(*y) } else { x.max(*y) })
        .collect();
    let hi = signs
        .iter()
        .zip(a.iter().zip(&b))
        .map(|(s, (x, y))| if *s > 0 { x.max(*y) } else { x.min(*y) })
        .collect();
    (lo, hi)
}

/// Samples ordered tuples `(x1, u1, d1) <= (x2, u2, d2)` and checks
/// `f(x1, u1, d1) <= f(x2, u2, d2)`. Inputs (disturbances) are only varied
/// independently when the declared class is monotone in them.
///
/// Randomness: ChaCha8 seeded with `seed`.
pub fn validate_monotonicity(sys: &MonotoneSystem, n_samples: usize, seed: u64) -> Result<MonotonicityReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let space = sys.space();
    let class = sys.class();
    let n_inputs = sys.inputs().len();
    for k in 0..n_samples {
        let (x1, x2) = ordered_pair(
            space.signs(),
            uniform_in(&mut rng, sys.work_box()),
            uniform_in(&mut rng, sys.work_box()),
        );

        let i = rng.gen_range(0..n_inputs);
        let (u1, u2) = match sys.input_signs() {
            Some(signs) if class.control_monotone() => {
                let j = rng.gen_range(0..n_inputs);
                let (a, b) = (&sys.inputs()[i].value, &sys.inputs()[j].value);
                if signed_le(signs, a, b) {
                    (i, j)
                } else if signed_le(signs, b, a) {
                    (j, i)
                } else {
                    (i, i)
                }
            }
            _ => (i, i),
        };

        let (d1, d2) = draw_disturbances(sys, &mut rng);

        let y1 = sys.step(&x1, u1, &d1)?;
        let y2 = sys.step(&x2, u2, &d2)?;
        if !space.le(&y1, &y2) {
            return Ok(MonotonicityReport {
                class_confirmed: false,
                untested: false,
                samples: k + 1,
                counterexample: Some(Counterexample {
                    x1: x1.into(),
                    u1,
                    d1: d1.into(),
                    x2: x2.into(),
                    u2,
                    d2: d2.into(),
                    y1,
                    y2,
                }),
            });
        }
    }
    Ok(MonotonicityReport {
        class_confirmed: true,
        untested: n_samples == 0,
        samples: n_samples,
        counterexample: None,
    })
}

fn draw_disturbances(sys: &MonotoneSystem, rng: &mut ChaCha8Rng) -> (Vec<f64>, Vec<f64>) {
    let monotone = sys.class().disturbance_monotone();
    match (sys.dist_box(), sys.dist_signs()) {
        (Some(b), Some(signs)) if monotone => {
            ordered_pair(signs, uniform_in(rng, b), uniform_in(rng, b))
        }
        (Some(b), _) => {
            let d = uniform_in(rng, b);
            (d.clone(), d)
        }
        (None, signs) => {
            let ds = sys.disturbances();
            let i = rng.gen_range(0..ds.len());
            let j = rng.gen_range(0..ds.len());
            match signs {
                Some(s) if monotone && signed_le(s, &ds[i], &ds[j]) => (ds[i].to_vec(), ds[j].to_vec()),
                Some(s) if monotone && signed_le(s, &ds[j], &ds[i]) => (ds[j].to_vec(), ds[i].to_vec()),
                _ => (ds[i].to_vec(), ds[i].to_vec()),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::dynamics::{make_acc, switched2d, AccParams, Dynamics, Input, MonoClass};
    use crate::order::OrderedSpace;

    #[test]
    fn switched_system_confirmed() {
        let r = validate_monotonicity(&switched2d(), 1000, 7).unwrap();
        assert!(r.class_confirmed && !r.untested);
    }

    #[test]
    fn acc_confirmed() {
        let r = validate_monotonicity(&make_acc(AccParams::default()).unwrap(), 5000, 3).unwrap();
        assert!(r.class_confirmed, "{r:?}");
    }

    #[test]
    fn order_reversal_found() {
        let sys = MonotoneSystem::new(
            Arc::new(OrderedSpace::standard(1)),
            AxisBox::from_bounds(&[[0.0, 1.0]]).unwrap(),
            vec![Input::new("0", vec![0.0])],
            vec![Point::from([0.0])],
            Dynamics::native(|x, _, _| vec![-x[0]]),
            MonoClass::Sm,
        )
        .unwrap();
        let r = validate_monotonicity(&sys, 10, 1).unwrap();
        assert!(!r.class_confirmed);
        assert!(r.counterexample.is_some());
    }

    #[test]
    fn zero_samples_is_untested() {
        let r = validate_monotonicity(&switched2d(), 0, 1).unwrap();
        assert!(r.class_confirmed && r.untested);
    }

    #[test]
    fn deterministic_given_seed() {
        let a = validate_monotonicity(&switched2d(), 100, 42).unwrap();
        let b = validate_monotonicity(&switched2d(), 100, 42).unwrap();
        assert_eq!(a, b);
    }
}
