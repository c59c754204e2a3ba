use std::sync::Arc;

use monocis_core::io::{antichain_from_csv, antichain_from_json, antichain_to_csv, antichain_to_json};
use monocis_core::{Antichain, LowerSet, OrderedSpace, Orientation, Point, UpperSet};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn space(signs: Vec<i8>) -> Arc<OrderedSpace> {
    Arc::new(OrderedSpace::new(signs, None).unwrap())
}

/// Coarse coordinates so that comparable and equal points are common.
fn coarse_points(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    prop::collection::vec(prop::collection::vec((0i32..6).prop_map(f64::from), dim), 0..12)
}

fn signs(dim: usize) -> impl Strategy<Value = Vec<i8>> {
    prop::collection::vec(prop_oneof![Just(1i8), Just(-1i8)], dim)
}

fn case() -> impl Strategy<Value = (Vec<i8>, Vec<Vec<f64>>, Vec<f64>)> {
    (1usize..4).prop_flat_map(|d| (signs(d), coarse_points(d), prop::collection::vec((0i32..6).prop_map(f64::from), d)))
}

/// Lower-closure membership of `x` in the set generated by `points`,
/// straight from the definition.
fn dominated_by_any(s: &OrderedSpace, points: &[Vec<f64>], x: &[f64]) -> bool {
    points.iter().any(|p| s.le(x, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn antichain_laws((sg, pts, probe) in case()) {
        let s = space(sg);
        let a = Antichain::from_points(s.clone(), Orientation::Max, pts.clone()).unwrap();
        // Incomparability.
        prop_assert!(a.is_antichain());
        // Every element is one of the inputs and every input is covered.
        for e in a.iter() {
            prop_assert!(pts.iter().any(|p| p.as_slice() == e.coords()));
        }
        for p in &pts {
            prop_assert!(a.cover(p).is_some());
        }
        // Idempotence: reinserting any member changes nothing.
        for e in a.iter() {
            prop_assert_eq!(&a.insert_extremal(e.clone()).unwrap(), &a);
        }
        // Absorption: inserting a dominated point changes nothing.
        if let Some(e) = a.iter().next() {
            let below: Vec<f64> = e.iter().zip(s.signs()).map(|(v, sg)| v - f64::from(*sg)).collect();
            prop_assert_eq!(&a.insert_extremal(below.into()).unwrap(), &a);
        }
        // Membership matches the definition.
        let l = LowerSet::new(a.clone()).unwrap();
        prop_assert_eq!(l.contains(&probe), dominated_by_any(&s, &pts, &probe));
        let u = UpperSet::from_points(s.clone(), pts.clone()).unwrap();
        prop_assert!(u.boundary().is_antichain());
        prop_assert_eq!(u.contains(&probe), pts.iter().any(|p| s.le(p, &probe)));
    }
}

fn random_set(rng: &mut ChaCha8Rng, s: &Arc<OrderedSpace>) -> LowerSet {
    let n = rng.gen_range(0..8);
    LowerSet::from_points(
        s.clone(),
        (0..n).map(|_| (0..s.dim()).map(|_| f64::from(rng.gen_range(0..8))).collect::<Vec<_>>()),
    )
    .unwrap()
}

#[test]
fn union_is_commutative_and_associative() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let s = space(vec![1, -1]);
    for _ in 0..1000 {
        let (a, b, c) = (random_set(&mut rng, &s), random_set(&mut rng, &s), random_set(&mut rng, &s));
        let ab = a.union(&b).unwrap();
        let ba = b.union(&a).unwrap();
        let left = ab.union(&c).unwrap();
        let right = a.union(&b.union(&c).unwrap()).unwrap();
        assert_eq!(ab.boundary().sorted(), ba.boundary().sorted());
        assert_eq!(left.boundary().sorted(), right.boundary().sorted());
        for _ in 0..5 {
            let p: Vec<f64> = (0..2).map(|_| rng.gen_range(-1.0..9.0)).collect();
            assert_eq!(ab.contains(&p), a.contains(&p) || b.contains(&p));
        }
    }
}

#[test]
fn csv_and_json_round_trip_bit_exactly() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let s = space(vec![1, 1, -1]);
    for _ in 0..100 {
        let pts: Vec<Point> = (0..rng.gen_range(1..20))
            .map(|_| Point::new((0..3).map(|_| rng.gen_range(-1e3..1e3) * rng.gen::<f64>()).collect()))
            .collect();
        let a = Antichain::from_points(s.clone(), Orientation::Min, pts).unwrap();
        let back = antichain_from_csv(s.clone(), Orientation::Min, &antichain_to_csv(&a)).unwrap();
        assert_eq!(back, a);
        for (x, y) in back.iter().zip(a.iter()) {
            for (u, v) in x.iter().zip(y.iter()) {
                assert_eq!(u.to_bits(), v.to_bits());
            }
        }
        assert_eq!(antichain_from_json(&antichain_to_json(&a).unwrap()).unwrap(), a);
    }
}

#[test]
fn lower_sets_are_closed_under_domination() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let s = space(vec![1, 1]);
    let k = random_set(&mut rng, &s);
    let mut checked = 0;
    while checked < 1000 {
        let y: Vec<f64> = (0..2).map(|_| rng.gen_range(0.0..8.0)).collect();
        if !k.contains(&y) {
            continue;
        }
        let x: Vec<f64> = y.iter().map(|v| v - rng.gen_range(0.0..3.0)).collect();
        assert!(k.contains(&x));
        checked += 1;
    }
}
