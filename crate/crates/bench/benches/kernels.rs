use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use swapval_bench::{economics, reference_day, sine_year, swap_terms};
use swapval_core::lp::{solve_lp, DEFAULT_TOL};
use swapval_core::{build_daily_lp, simulate_lifecycle, solve_day, BatterySpec, Scenario};

fn lp_kernel(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_lp");
    for reserve in [false, true] {
        let lp = build_daily_lp(&reference_day(reserve)).expect("valid day");
        group.bench_with_input(BenchmarkId::new("daily", reserve), &lp, |b, lp| {
            b.iter(|| solve_lp(black_box(lp), DEFAULT_TOL).unwrap())
        });
    }
    group.finish();
}

fn daily(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_day");
    for reserve in [false, true] {
        let input = reference_day(reserve);
        group.bench_with_input(BenchmarkId::new("reserve", reserve), &input, |b, input| {
            b.iter(|| solve_day(black_box(input)).unwrap())
        });
    }
    group.finish();
}

fn lifecycle(c: &mut Criterion) {
    let prices = sine_year(7);
    let mut group = c.benchmark_group("simulate_lifecycle");
    group.sample_size(10);
    for mu in [0.0, 35.0] {
        let scenario = Scenario {
            battery: BatterySpec::reference_station(),
            economics: economics(),
            prices: &prices,
            swap: swap_terms(),
            reserve_enabled: false,
        };
        group.bench_with_input(BenchmarkId::new("mu", mu), &mu, |b, &mu| {
            b.iter(|| simulate_lifecycle(black_box(&scenario), mu).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, lp_kernel, daily, lifecycle);
criterion_main!(benches);
