use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use fireball_bench::moving_state;
use fireball_core::analytic::{angular_quadrature, polar_pipeline, AngularSolution};
use fireball_core::hydro::{default_probes, pde_residuals, total_energy};
use fireball_core::{integrate, IntegratorConfig, ModelKind, PhysicalParams};

fn bench_integrate(c: &mut Criterion) {
    let mut group = c.benchmark_group("integrate");
    let config = IntegratorConfig::default().with_t_end(10.0);
    for kind in ModelKind::ALL {
        let state = moving_state(kind);
        group.bench_with_input(BenchmarkId::from_parameter(kind), &state, |b, s| {
            b.iter(|| integrate(black_box(s), &config).unwrap())
        });
    }
    group.finish();
}

fn bench_analytic(c: &mut Criterion) {
    let grid: Vec<f64> = (0..200).map(|i| i as f64 * 0.01).collect();
    let sol = AngularSolution { invariant: 3.0, phi0: std::f64::consts::FRAC_PI_4, sign0: 1.0 };
    c.bench_function("angular_quadrature", |b| {
        b.iter(|| angular_quadrature(black_box(&sol), ModelKind::TwoD, &grid).unwrap())
    });

    let state = moving_state(ModelKind::TwoD);
    let times: Vec<f64> = (0..=1000).map(|i| i as f64 * 0.01).collect();
    c.bench_function("polar_pipeline", |b| b.iter(|| polar_pipeline(black_box(&state), &times).unwrap()));
}

fn bench_hydro(c: &mut Criterion) {
    let params = PhysicalParams::unit(ModelKind::TwoD);
    let state = moving_state(ModelKind::TwoD);
    c.bench_function("total_energy", |b| b.iter(|| total_energy(&params, black_box(&state)).unwrap()));

    let traj = integrate(&state, &IntegratorConfig::default().with_t_end(1.0)).unwrap();
    let probes = default_probes(ModelKind::TwoD);
    c.bench_function("pde_residuals", |b| b.iter(|| pde_residuals(&params, black_box(&traj), &probes).unwrap()));
}

criterion_group!(benches, bench_integrate, bench_analytic, bench_hydro);
criterion_main!(benches);
