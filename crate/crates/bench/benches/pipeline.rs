use criterion::{black_box, criterion_group, criterion_main, Criterion};
use monocis_core::dynamics::{acc_constraint, make_acc, switched2d, AccParams};
use monocis_core::{grid_fixed_point, synthesize, verify_invariant, LowerSet, SynthOptions};

fn verification(c: &mut Criterion) {
    let sys = switched2d();
    let x = LowerSet::from_points(sys.space().clone(), [[60.0, 60.0]]).unwrap();
    let k = LowerSet::from_points(sys.space().clone(), [[50.0, 25.0], [25.0, 50.0], [36.0, 31.0]]).unwrap();
    c.bench_function("verify/switched2d", |b| b.iter(|| verify_invariant(&sys, &x, black_box(&k)).unwrap()));
}

fn synthesis(c: &mut Criterion) {
    let p = AccParams::default();
    let sys = make_acc(p.clone()).unwrap();
    let x = acc_constraint(&p, sys.space().clone());
    let mut group = c.benchmark_group("synth/acc");
    group.sample_size(10);
    for eps in [1.5, 0.1] {
        let opts = SynthOptions { epsilon: eps, ..Default::default() };
        group.bench_function(format!("eps={eps}"), |b| b.iter(|| synthesize(&sys, &x, black_box(&opts)).unwrap()));
    }
    group.finish();
}

fn grid(c: &mut Criterion) {
    let sys = switched2d();
    let x = LowerSet::from_points(sys.space().clone(), [[60.0, 60.0]]).unwrap();
    let mut group = c.benchmark_group("grid/switched2d");
    group.sample_size(10);
    for res in [1.0, 0.5] {
        group.bench_function(format!("res={res}"), |b| b.iter(|| grid_fixed_point(&sys, &x, black_box(res)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, verification, synthesis, grid);
criterion_main!(benches);
