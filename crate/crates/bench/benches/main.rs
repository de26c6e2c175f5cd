use bubbletower::*;
use criterion::{black_box, criterion_group, criterion_main, Criterion};

fn bench_shoot(c: &mut Criterion) {
    let params = derive_params(6, 1e-3).unwrap();
    c.bench_function("shoot_heteroclinic eps=1e-3 bumps=3", |b| {
        b.iter(|| shoot_heteroclinic(&params, 3).unwrap())
    });
}

fn bench_first_return(c: &mut Criterion) {
    let params = derive_params(6, 1e-4).unwrap();
    c.bench_function("first_return eta=c_p/2", |b| {
        b.iter(|| first_return(&params, 0.5 * params.c_p).unwrap())
    });
}

fn bench_match_all(c: &mut Criterion) {
    let cfg = MatchConfig {
        n: 6,
        eps: 1e-3,
        mu: 1.0,
        ell: 2,
        xi: 0.0,
    };
    c.bench_function("match_all ell=2 mu=1", |b| {
        b.iter(|| match_all(&cfg).unwrap())
    });
}

fn bench_reduced(c: &mut Criterion) {
    let cp = scenario_exterior_pair(6, 1).unwrap();
    c.bench_function("hessian_f exterior pair", |b| {
        b.iter(|| hessian_f(&cp.config).unwrap())
    });
    let mat = interaction_matrix(DomainGeometry::ExteriorUnitBall, &cp.config.points).unwrap();
    c.bench_function("least_eigenpair 2x2", |b| {
        b.iter(|| least_eigenpair(&mat).unwrap())
    });
}

fn bench_constants(c: &mut Criterion) {
    c.bench_function("constants table N=7 (uncached path)", |b| {
        b.iter(|| {
            // the memo table makes repeated lookups cheap; exercise the
            // quadrature route through the closed-form cross-check instead
            closed_form(black_box(ConstantKind::C5), black_box(7)).unwrap()
        })
    });
}

criterion_group!(
    benches,
    bench_shoot,
    bench_first_return,
    bench_match_all,
    bench_reduced,
    bench_constants
);
criterion_main!(benches);
