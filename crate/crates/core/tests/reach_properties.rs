use std::sync::Arc;

use monocis_core::dynamics::{acc_constraint, make_acc, make_switched_affine, switched2d, AccParams};
use monocis_core::feasibility::check_certificate;
use monocis_core::{
    check_containment_lemma, extract_controller, feasibility_radius, open_loop_feasible, reach_tube,
    simulate_closed_loop, verify_invariant, Antichain, AxisBox, LowerSet, MonotoneSystem, OrderedSpace,
    Orientation, Point, SearchOptions, Verdict,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn nonneg_space(dim: usize) -> Arc<OrderedSpace> {
    Arc::new(OrderedSpace::new(vec![1; dim], Some(AxisBox::nonnegative(dim))).unwrap())
}

/// A random switched affine system with nonnegative coefficients (hence
/// state- and disturbance-monotone under the standard order).
fn random_system(rng: &mut ChaCha8Rng, dim: usize, modes: usize, disturbances: Vec<Point>, scale: f64) -> MonotoneSystem {
    let matrices = (0..modes)
        .map(|_| {
            (0..dim)
                .map(|_| (0..dim).map(|_| rng.gen_range(0.0..scale)).collect())
                .collect()
        })
        .collect();
    let dist = (0..dim)
        .map(|i| (0..dim).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    let bounds: Vec<[f64; 2]> = vec![[0.0, 10.0]; dim];
    make_switched_affine(
        nonneg_space(dim),
        AxisBox::from_bounds(&bounds).unwrap(),
        matrices,
        vec![0.0; dim],
        dist,
        disturbances,
    )
    .unwrap()
}

fn random_point(rng: &mut ChaCha8Rng, dim: usize, hi: f64) -> Point {
    Point::new((0..dim).map(|_| rng.gen_range(0.0..hi)).collect())
}

#[test]
fn pruned_tube_matches_brute_force_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for case in 0..200 {
        let dim = 1 + case % 2;
        let n_d = 1 + (case / 2) % 2;
        let ds: Vec<Point> = (0..n_d).map(|_| random_point(&mut rng, dim, 1.0)).collect();
        let sys = random_system(&mut rng, dim, 2, ds.clone(), 0.7);
        let horizon = 1 + case % 4;
        let word: Vec<usize> = (0..horizon).map(|_| rng.gen_range(0..2)).collect();
        let x0 = random_point(&mut rng, dim, 5.0);
        let tube = reach_tube(&sys, &x0, &word).unwrap();

        // Every disturbance word, no pruning.
        let mut cloud = vec![x0.clone()];
        for (k, &u) in word.iter().enumerate() {
            cloud = cloud
                .iter()
                .flat_map(|p| ds.iter().map(|d| sys.step(p, u, d).unwrap()).collect::<Vec<_>>())
                .collect();
            assert_eq!(cloud.len(), n_d.pow(k as u32 + 1));
            let brute = Antichain::from_points(sys.space().clone(), Orientation::Max, cloud.clone()).unwrap();
            assert_eq!(brute.sorted(), tube[k + 1].frontier.sorted(), "case {case} step {k}");
            assert!(tube[k + 1].raw_count >= tube[k + 1].frontier.len());
        }
    }
}

#[test]
fn ordered_states_stay_ordered() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let systems = [switched2d(), make_acc(AccParams::default()).unwrap()];
    for sys in &systems {
        let s = sys.space();
        let dist = sys.dist_box().unwrap().clone();
        for _ in 0..100 {
            let a: Vec<f64> = sys.work_box().lo().iter().zip(sys.work_box().hi()).map(|(l, h)| rng.gen_range(*l..*h)).collect();
            let b: Vec<f64> = sys.work_box().lo().iter().zip(sys.work_box().hi()).map(|(l, h)| rng.gen_range(*l..*h)).collect();
            let (mut x, mut y) = (s.meet(&a, &b), s.join(&a, &b));
            for _ in 0..50 {
                let u = rng.gen_range(0..sys.inputs().len());
                let d1: Vec<f64> = dist.lo().iter().zip(dist.hi()).map(|(l, h)| rng.gen_range(*l..=*h)).collect();
                let d2: Vec<f64> = d1.iter().zip(dist.hi()).map(|(v, h)| rng.gen_range(*v..=*h)).collect();
                x = sys.step(&x, u, &d1).unwrap();
                y = sys.step(&y, u, &d2).unwrap();
                assert!(s.le(&x, &y), "{x:?} {y:?}");
            }
        }
    }
}

#[test]
fn larger_start_gives_larger_tube() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let sys = switched2d();
    let s = sys.space();
    for _ in 0..100 {
        let a = random_point(&mut rng, 2, 40.0);
        let b: Vec<f64> = a.iter().map(|v| v + rng.gen_range(0.0..5.0)).collect();
        let word: Vec<usize> = (0..6).map(|_| rng.gen_range(0..2)).collect();
        let low = reach_tube(&sys, &a, &word).unwrap();
        let high = reach_tube(&sys, &b, &word).unwrap();
        for (l, h) in low.iter().zip(&high) {
            let hl = LowerSet::new(h.frontier.clone()).unwrap();
            assert!(l.frontier.iter().all(|p| s.le(p, p) && hl.contains(p)));
        }
    }
}

fn verdict_word(v: &Verdict) -> Option<Vec<usize>> {
    match v {
        Verdict::Feasible(c) => Some(c.u_word.clone()),
        _ => None,
    }
}

#[test]
fn maximal_disturbances_decide_feasibility() {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut feasible = 0;
    for case in 0..300 {
        let dim = 1 + case % 2;
        // Up to three disturbances; their maximal elements form the reduced set.
        let ds: Vec<Point> = (0..1 + case % 3).map(|_| random_point(&mut rng, dim, 1.0)).collect();
        let full = random_system(&mut rng, dim, 2, ds.clone(), 0.8);
        let dmax = Antichain::from_points(full.space().clone(), Orientation::Max, ds.clone()).unwrap();
        let reduced = full.clone().with_disturbances(dmax.elements().to_vec()).unwrap();
        let x = LowerSet::from_points(full.space().clone(), [random_point(&mut rng, dim, 10.0)]).unwrap();
        let x0 = random_point(&mut rng, dim, 6.0);
        if !x.contains(&x0) {
            continue;
        }
        let opts = SearchOptions::default().with_n_max(3);
        let a = open_loop_feasible(&full, &x, &x0, &opts).unwrap();
        let b = open_loop_feasible(&reduced, &x, &x0, &opts).unwrap();
        assert_eq!(verdict_word(&a), verdict_word(&b), "case {case}");
        feasible += usize::from(a.is_feasible());
    }
    assert!(feasible > 20, "too few feasible cases ({feasible}) to be meaningful");
}

#[test]
fn invariance_transfers_to_more_inputs_and_fewer_disturbances() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut premises = 0;
    for _ in 0..20 {
        let ds: Vec<Point> = (0..3).map(|_| random_point(&mut rng, 1, 1.0)).collect();
        let sys = random_system(&mut rng, 1, 3, ds.clone(), 1.2);
        let x = LowerSet::from_points(sys.space().clone(), [[10.0]]).unwrap();
        let k = LowerSet::from_points(sys.space().clone(), [[rng.gen_range(1.0..10.0)]]).unwrap();
        let u_sup = vec![0, 1, 2];
        let u_sub: Vec<usize> = u_sup.iter().copied().filter(|_| rng.gen_bool(0.6)).collect();
        let u_sub = if u_sub.is_empty() { vec![0] } else { u_sub };
        let d_sup: Vec<Point> = ds.iter().filter(|_| rng.gen_bool(0.6)).cloned().collect();
        let d_sup = if d_sup.is_empty() { vec![ds[0].clone()] } else { d_sup };
        assert!(check_containment_lemma(&sys, &x, &u_sub, &u_sup, &ds, &d_sup, &k).unwrap());
        let small = sys.clone().with_input_subset(&u_sub).unwrap().with_disturbances(ds.clone()).unwrap();
        premises += usize::from(verify_invariant(&small, &x, &k).unwrap().is_invariant);
    }
    assert!(premises > 0, "no instance exercised the implication");
}

#[test]
fn points_within_the_radius_are_feasible() {
    // Contractive (L <= 1 in the max norm) affine system.
    let sys = make_switched_affine(
        nonneg_space(2),
        AxisBox::from_bounds(&[[0.0, 10.0], [0.0, 10.0]]).unwrap(),
        vec![
            vec![vec![0.5, 0.4], vec![0.1, 0.6]],
            vec![vec![0.9, 0.0], vec![0.3, 0.3]],
        ],
        vec![0.0, 0.0],
        vec![vec![1.0, 0.0], vec![0.0, 1.0]],
        vec![Point::from([0.3, 0.3])],
    )
    .unwrap();
    let l = sys.lipschitz().unwrap();
    assert!(l <= 1.0);
    let x = LowerSet::from_points(sys.space().clone(), [[9.0, 6.0], [6.0, 9.0]]).unwrap();
    let opts = SearchOptions::default().with_n_max(10);
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut certificates = 0;
    let mut multi_step = 0;
    for _ in 0..200 {
        let x0 = random_point(&mut rng, 2, 9.0);
        let Verdict::Feasible(c) = open_loop_feasible(&sys, &x, &x0, &opts).unwrap() else {
            continue;
        };
        assert!(check_certificate(&sys, &x, &c).unwrap());
        if !(c.eps_n > 0.0 && c.gamma > 0.0) {
            continue;
        }
        certificates += 1;
        multi_step += usize::from(c.horizon > 1);
        let beta = feasibility_radius(c.eps_n, c.gamma, l, c.horizon).unwrap();
        // Feasibility is only defined for starting points inside X, and the
        // radius guards the later layers, not the starting point itself.
        let (mut tried, mut attempts) = (0, 0);
        while tried < 50 && attempts < 10_000 {
            attempts += 1;
            let y: Vec<f64> = x0.iter().map(|v| v + rng.gen_range(0.0..=beta)).collect();
            if !x.contains(&y) {
                continue;
            }
            tried += 1;
            let v = open_loop_feasible(&sys, &x, &y, &opts).unwrap();
            assert!(v.is_feasible(), "x0={x0:?} beta={beta} y={y:?}");
        }
    }
    assert!(certificates >= 10 && multi_step >= 1, "{certificates} {multi_step}");
}

#[test]
fn single_disturbance_certificates_give_controllers() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let sys = switched2d();
    let x = LowerSet::from_points(sys.space().clone(), [[60.0, 60.0]]).unwrap();
    let dist = sys.dist_box().unwrap().clone();
    let mut checked = 0;
    for _ in 0..100 {
        let x0 = random_point(&mut rng, 2, 60.0);
        let Verdict::Feasible(c) = open_loop_feasible(&sys, &x, &x0, &SearchOptions::default().with_n_max(8)).unwrap() else {
            continue;
        };
        let k = LowerSet::from_points(sys.space().clone(), c.tube_points().cloned()).unwrap();
        let mut ctrl = extract_controller(&sys, &k).unwrap();
        let word: Vec<Point> = (0..50)
            .map(|_| Point::new(dist.lo().iter().zip(dist.hi()).map(|(l, h)| rng.gen_range(*l..=*h)).collect()))
            .collect();
        let traj = simulate_closed_loop(&sys, &mut ctrl, &x0, &word, 50).unwrap();
        assert!(traj.iter().all(|p| k.contains(p)));
        checked += 1;
    }
    assert!(checked >= 10);
}

#[test]
fn acc_certificates_replay() {
    let p = AccParams::default();
    let sys = make_acc(p.clone()).unwrap();
    let x = acc_constraint(&p, sys.space().clone());
    let Verdict::Feasible(c) = open_loop_feasible(&sys, &x, &[-60.0, 10.0], &SearchOptions::default()).unwrap() else {
        panic!("a long headway at moderate speed can brake to a stop");
    };
    assert!(c.u_word.iter().all(|&u| u == 0));
    assert!(check_certificate(&sys, &x, &c).unwrap());
}
