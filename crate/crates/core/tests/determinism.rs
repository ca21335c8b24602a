//! Sequential and thread-pool execution give the same results.

use vmdgap::hamiltonian::{build_matrix, invariant_closure};
use vmdgap::spectra;
use vmdgap::tiling::Family;
use vmdgap::{Bc, Config, Exec, Hamiltonian, Params, Sector, SolverOptions};

fn both<T>(f: impl Fn(Exec) -> T) -> (T, T) {
    (f(Exec::Sequential), f(Exec::Parallel))
}

#[test]
fn assembly_is_identical() {
    let params = Params::polar(1.2, 0.7, 0.4, Bc::Periodic).unwrap();
    let ham = Hamiltonian::full(params, 10).unwrap();
    let basis = Sector::new(10, 5, 5, Bc::Periodic).unwrap().configs();
    let (a, b) = both(|e| build_matrix(&basis, &ham, e).unwrap());
    assert_eq!(a, b);
    let seed: Config = "2001002000".parse::<Config>().unwrap().with_bc(Bc::Periodic);
    let (a, b) = both(|e| invariant_closure(&[seed], &ham, None, e).unwrap());
    assert_eq!(a, b);
}

#[test]
fn spectra_are_identical() {
    let params = Params::polar(1.0, 0.6, 1.0, Bc::Open).unwrap();
    let run = |exec| {
        let opts = SolverOptions { exec, ..Default::default() };
        let sector = Sector::new(9, 4, 4, Bc::Open).unwrap();
        let s = spectra::sector_spectrum(&params, &sector, 6, &opts).unwrap();
        let g = spectra::subspace_gap(9, &params, Family::ObcBulk, &opts).unwrap();
        let c = spectra::complement_ground_energy(&params, &sector, &opts).unwrap().unwrap();
        (s.eigenvalues, g.gap.unwrap(), c.energy)
    };
    let (a, b) = both(run);
    for (x, y) in a.0.iter().zip(&b.0) {
        assert!((x - y).abs() < 1e-12);
    }
    assert!((a.1 - b.1).abs() < 1e-12);
    assert!((a.2 - b.2).abs() < 1e-12);
}

#[test]
fn krylov_runs_repeat_exactly() {
    let params = Params::polar(1.0, 0.6, 1.0, Bc::Periodic).unwrap();
    let opts = SolverOptions::default();
    let sector = Sector::new(9, 4, 3, Bc::Periodic).unwrap();
    let (_, a) = spectra::sector_matrix(&params, &sector, &opts).unwrap();
    let first = spectra::lanczos_pairs(&a, 3, &[], &opts).unwrap();
    let again = spectra::lanczos_pairs(&a, 3, &[], &opts).unwrap();
    assert_eq!(first.values, again.values);
}
