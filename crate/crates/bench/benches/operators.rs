use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};

use pqheis_bench::{nonstandard_rep, DIMS};
use pqheis_core::commutation::{fn_x_residual, FSpec};
use pqheis_core::heisenberg::pq_commutator_residual;
use pqheis_core::{
    a_k_eval, build_h, run_verify_suite, AkMethod, DeformationParams, EtaSpec, GaugeSpec, HamiltonianForm,
    PositionMomentumPair, StructureFunctionKind, VerifyConfig,
};

fn representation(c: &mut Criterion) {
    let mut group = c.benchmark_group("build_rep");
    for dim in DIMS {
        group.bench_with_input(BenchmarkId::from_parameter(dim), &dim, |b, &dim| {
            b.iter(|| nonstandard_rep(black_box(dim), GaugeSpec::case_a()))
        });
    }
    group.finish();
}

fn heisenberg(c: &mut Criterion) {
    let mut group = c.benchmark_group("pq_commutator_residual");
    for dim in DIMS {
        let rep = nonstandard_rep(dim, GaugeSpec::symmetric());
        let pair = PositionMomentumPair::new(&rep).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(dim), &pair, |b, pair| {
            b.iter(|| pq_commutator_residual(pair, rep.params(), None, 4).unwrap())
        });
    }
    group.finish();
}

fn hamiltonian_forms(c: &mut Criterion) {
    let rep = nonstandard_rep(48, GaugeSpec::symmetric());
    let pair = PositionMomentumPair::new(&rep).unwrap();
    let mut group = c.benchmark_group("build_h");
    for form in HamiltonianForm::ALL {
        group.bench_function(form.name(), |b| b.iter(|| build_h(&pair, black_box(form)).unwrap()));
    }
    group.finish();
}

fn permutation(c: &mut Criterion) {
    let rep = nonstandard_rep(48, GaugeSpec::symmetric());
    let pair = PositionMomentumPair::new(&rep).unwrap();
    let f = FSpec::QPow(EtaSpec::from_integers(1, 0, 0));
    c.bench_function("fn_x_residual/qpow", |b| b.iter(|| fn_x_residual(&pair, black_box(&f), 3).unwrap()));
    c.bench_function("a_k_eval/recurrence k=40", |b| {
        b.iter(|| a_k_eval(black_box(40), black_box(1000), AkMethod::Recurrence))
    });
}

fn suite(c: &mut Criterion) {
    let config = VerifyConfig::new(StructureFunctionKind::NonstandardPQ, DeformationParams::new(1.1, 0.9).unwrap());
    let mut group = c.benchmark_group("verify_suite");
    group.sample_size(10);
    group.bench_function("nonstandard D=48", |b| b.iter(|| run_verify_suite(black_box(&config)).unwrap()));
    group.finish();
}

criterion_group!(benches, representation, heisenberg, hamiltonian_forms, permutation, suite);
criterion_main!(benches);
