use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phgen_core::operators::{build_eta, build_hamiltonian, intertwining_residual};
use phgen_core::{catalog, derive, Grid, ParamEnv};

fn pipeline(c: &mut Criterion) {
    let env: ParamEnv = [("A".to_string(), 2.0)].into_iter().collect();
    let entry = catalog::get("scarf2", &env).unwrap();
    c.bench_function("derive/scarf2", |b| b.iter(|| derive(&entry.spec).unwrap()));

    let model = derive(&entry.spec).unwrap();
    let mut group = c.benchmark_group("operators");
    for n in [200, 800] {
        let grid = Grid::new(entry.grid.a(), entry.grid.b(), n).unwrap();
        group.bench_with_input(BenchmarkId::new("hamiltonian", n), &grid, |b, g| {
            b.iter(|| build_hamiltonian(&model, g).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("eta", n), &grid, |b, g| b.iter(|| build_eta(&model, g).unwrap()));
        let h = build_hamiltonian(&model, &grid).unwrap();
        let eta = build_eta(&model, &grid).unwrap();
        group.bench_with_input(BenchmarkId::new("intertwining", n), &(h, eta), |b, (h, eta)| {
            b.iter(|| intertwining_residual(h, eta).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, pipeline);
criterion_main!(benches);
