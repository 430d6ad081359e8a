use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use floorsum_bench::{bench_specs, FACTOR_INPUTS, SIEVE_LIMITS, SUM_XS};
use floorsum_core::arith::{build_sieve, factorize};
use floorsum_core::floorsum::floor_sum;
use floorsum_core::{ArithFnSpec, FloorSumOptions, MemoryBudget};

fn sums(c: &mut Criterion) {
    let mut group = c.benchmark_group("floor_sum_phi");
    group.sample_size(10);
    for threads in [1, 4] {
        let opts = FloorSumOptions::with_threads(threads);
        for x in SUM_XS {
            group.bench_with_input(
                BenchmarkId::new(format!("threads_{threads}"), x),
                &x,
                |b, &x| b.iter(|| floor_sum(&ArithFnSpec::phi(), black_box(x), &opts).unwrap()),
            );
        }
    }
    group.finish();

    let mut group = c.benchmark_group("floor_sum_functions");
    group.sample_size(10);
    let opts = FloorSumOptions::sequential();
    for spec in bench_specs() {
        group.bench_function(spec.to_string(), |b| {
            b.iter(|| floor_sum(&spec, black_box(100_000_000), &opts).unwrap())
        });
    }
    group.finish();
}

fn sieves(c: &mut Criterion) {
    let mut group = c.benchmark_group("sieve");
    group.sample_size(10);
    for spec in bench_specs() {
        for limit in SIEVE_LIMITS {
            group.bench_with_input(
                BenchmarkId::new(spec.to_string(), limit),
                &limit,
                |b, &limit| {
                    b.iter(|| {
                        build_sieve(&spec, black_box(limit), MemoryBudget::unlimited()).unwrap()
                    })
                },
            );
        }
    }
    group.finish();
}

fn factoring(c: &mut Criterion) {
    let mut group = c.benchmark_group("factorize");
    for (name, n) in FACTOR_INPUTS {
        group.bench_function(name, |b| b.iter(|| factorize(black_box(n)).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, sums, sieves, factoring);
criterion_main!(benches);
