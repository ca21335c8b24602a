//! Sequential against thread-pool execution of the data-parallel kernels.

use criterion::{black_box, criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use vmdgap::hamiltonian::{build_matrix, invariant_closure};
use vmdgap::spectra;
use vmdgap::tiling::Family;
use vmdgap::{Bc, Config, Exec, Hamiltonian, Params, Sector, SolverOptions};

const MODES: [(&str, Exec); 2] = [("sequential", Exec::Sequential), ("parallel", Exec::Parallel)];

fn params(bc: Bc) -> Params {
    Params::polar(1.0, 0.5, std::f64::consts::PI, bc).expect("valid couplings")
}

fn assembly(c: &mut Criterion) {
    let ham = Hamiltonian::full(params(Bc::Periodic), 12).unwrap();
    let basis = Sector::new(12, 6, 6, Bc::Periodic).unwrap().configs();
    let mut group = c.benchmark_group("build_matrix");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, basis.len()), |b| {
            b.iter(|| build_matrix(black_box(&basis), &ham, exec).unwrap())
        });
    }
    group.finish();
}

fn matvec(c: &mut Criterion) {
    let ham = Hamiltonian::full(params(Bc::Periodic), 12).unwrap();
    let basis = Sector::new(12, 6, 6, Bc::Periodic).unwrap().configs();
    let a = build_matrix(&basis, &ham, Exec::Parallel).unwrap();
    let x: Vec<Complex64> = (0..a.dim()).map(|i| Complex64::new((i % 7) as f64, 1.0)).collect();
    let mut y = vec![Complex64::new(0.0, 0.0); a.dim()];
    let mut group = c.benchmark_group("matvec");
    for (name, exec) in MODES {
        group.bench_function(BenchmarkId::new(name, a.dim()), |b| {
            b.iter(|| a.matvec(black_box(&x), &mut y, exec))
        });
    }
    group.finish();
}

fn closure(c: &mut Criterion) {
    let ham = Hamiltonian::full(params(Bc::Open), 20).unwrap();
    let seed: Config = "20020020020020020020".parse().unwrap();
    let mut group = c.benchmark_group("invariant_closure");
    group.sample_size(10);
    for (name, exec) in MODES {
        group.bench_function(name, |b| {
            b.iter(|| invariant_closure(black_box(&[seed]), &ham, None, exec).unwrap())
        });
    }
    group.finish();
}

fn blocks(c: &mut Criterion) {
    let obc = params(Bc::Open);
    let sector = Sector::new(10, 6, 4, Bc::Open).unwrap();
    let mut group = c.benchmark_group("blocks");
    group.sample_size(10);
    for (name, exec) in MODES {
        let opts = SolverOptions { exec, ..Default::default() };
        group.bench_function(BenchmarkId::new("subspace_gap", name), |b| {
            b.iter(|| spectra::subspace_gap(12, &obc, Family::ObcBulk, &opts).unwrap())
        });
        group.bench_function(BenchmarkId::new("complement", name), |b| {
            b.iter(|| spectra::complement_ground_energy(&obc, &sector, &opts).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, assembly, matvec, closure, blocks);
criterion_main!(benches);
