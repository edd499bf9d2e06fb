use criterion::{criterion_group, criterion_main, Criterion};

use dimca::abstraction::{sigma, translate_program};
use dimca::concrete::{build_ts, Sizes};
use dimca::corpus;
use dimca::lang::BoolExpr;
use dimca::quotient::build_quotient_ts;
use dimca::ts::{ExploreMode, ExploreOptions, Scope};

fn modes() -> [(&'static str, ExploreOptions); 2] {
    let base = ExploreOptions::default();
    [
        ("sequential", ExploreOptions { mode: ExploreMode::Sequential, ..base }),
        ("parallel", ExploreOptions { mode: ExploreMode::Parallel, ..base }),
    ]
}

fn quotient_ftmem(c: &mut Criterion) {
    let p = corpus::ftmem();
    let sharp = translate_program(&p).unwrap();
    let constraint = BoolExpr::conj([sigma(&p), p.init.clone(), BoolExpr::var("at_start")]);
    let mut group = c.benchmark_group("quotient_ftmem");
    group.sample_size(10);
    for (name, opts) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| build_quotient_ts(&sharp, &constraint, opts).unwrap().1.ts.len())
        });
    }
    group.finish();
}

fn concrete_ftmem(c: &mut Criterion) {
    let p = corpus::ftmem();
    let scope = Scope::Reachable(BoolExpr::and(p.init.clone(), BoolExpr::var("at_start")));
    let mut group = c.benchmark_group("concrete_ftmem_2x2");
    group.sample_size(10);
    for (name, opts) in modes() {
        group.bench_function(name, |b| {
            b.iter(|| build_ts(&p, Sizes::new(2, 2), &scope, opts).unwrap().1.ts.len())
        });
    }
    group.finish();
}

criterion_group!(benches, quotient_ftmem, concrete_ftmem);
criterion_main!(benches);
