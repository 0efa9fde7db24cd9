use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use phgen_core::eigen::VectorSelection;
use phgen_core::operators::build_hamiltonian;
use phgen_core::{catalog, derive, eig_with, CMatrix, Complex64, EigOptions, ParamEnv};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_matrix(n: usize) -> CMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    CMatrix::from_fn(n, n, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
}

fn scarf_hamiltonian(n: usize) -> CMatrix {
    let env: ParamEnv = [("A".to_string(), 2.0)].into_iter().collect();
    let entry = catalog::get("scarf2", &env).unwrap();
    let model = derive(&entry.spec).unwrap();
    let grid = phgen_core::Grid::new(entry.grid.a(), entry.grid.b(), n).unwrap();
    build_hamiltonian(&model, &grid).unwrap().into_matrix()
}

fn eigenvalues(c: &mut Criterion) {
    let mut group = c.benchmark_group("eig");
    group.sample_size(10);
    let values_only = EigOptions::default();
    let with_vectors = EigOptions::default().with_vectors(VectorSelection::All);
    for n in [100, 200, 400] {
        let dense = random_matrix(n);
        group.bench_with_input(BenchmarkId::new("random", n), &dense, |b, m| b.iter(|| eig_with(m, &values_only)));
        let h = scarf_hamiltonian(n);
        group.bench_with_input(BenchmarkId::new("scarf_values", n), &h, |b, m| b.iter(|| eig_with(m, &values_only)));
        group.bench_with_input(BenchmarkId::new("scarf_vectors", n), &h, |b, m| b.iter(|| eig_with(m, &with_vectors)));
    }
    group.finish();
}

criterion_group!(benches, eigenvalues);
criterion_main!(benches);
