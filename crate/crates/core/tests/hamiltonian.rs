mod common;

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use proptest::prelude::*;
use vmdgap::hamiltonian::{self, build_matrix, classify_nontiling, electrostatic_energy, invariant_closure, NonTilingClass};
use vmdgap::{bounds, Bc, Config, Exec, Hamiltonian, Params, Sector, SparseState};

fn cfg(s: &str) -> Config {
    s.parse().unwrap()
}

fn close(a: C, b: C) -> bool {
    (a - b).norm() < 1e-12
}

#[test]
fn electrostatic_examples() {
    assert_eq!(electrostatic_energy(&cfg("1010")), 0.0);
    assert_eq!(electrostatic_energy(&cfg("1200")), 2.0);
    assert_eq!(electrostatic_energy(&cfg("1002:per")), 2.0);
    assert_eq!(electrostatic_energy(&cfg("1002")), 0.0);
}

#[test]
fn hopping_examples() {
    let lambda = C::new(0.7, -0.2);
    let q = |s: &str| hamiltonian::apply_qx(&SparseState::basis(cfg(s)), 2, lambda).unwrap();
    let out = q("020");
    assert_eq!(out.num_terms(), 1);
    assert!(close(out.amplitude(&cfg("000")), C::new(2f64.sqrt(), 0.0)));
    let out = q("101");
    assert!(close(out.amplitude(&cfg("000")), -lambda));
    let out = q("030");
    assert!(close(out.amplitude(&cfg("010")), C::new(6f64.sqrt(), 0.0)));
    // q_x|101⟩ = −(λ/√2) q_x|020⟩
    let lhs = q("101");
    let mut rhs = q("020");
    rhs.scale(-lambda / 2f64.sqrt());
    assert!(lhs.distance(&rhs).unwrap() < 1e-14);
    assert!(hamiltonian::apply_qx(&SparseState::basis(cfg("020")), 1, lambda).is_err());
}

#[test]
fn adjoint_hopping_is_the_conjugate_transpose() {
    let lambda = C::new(0.3, 0.9);
    let basis = Sector::new(5, 4, 4, Bc::Open).unwrap().configs();
    let small = Sector::new(5, 2, 4, Bc::Open).unwrap().configs();
    for site in 2..=4 {
        for big in &basis {
            let down = hamiltonian::apply_qx(&SparseState::basis(*big), site, lambda).unwrap();
            for s in &small {
                let up = hamiltonian::apply_qx_adjoint(&SparseState::basis(*s), site, lambda).unwrap();
                assert!(close(up.amplitude(big), down.amplitude(s).conj()), "{big} {s} x={site}");
            }
        }
    }
}

/// The sparse matrix equals the Kronecker-product Hamiltonian restricted to
/// the fixed-particle sector, where the local dimension N+1 is exact.
#[test]
fn sector_matrix_matches_kronecker_reference() {
    let lambda = C::new(-0.6, 0.45);
    for (len, particles, bc) in [
        (3, 2, Bc::Open),
        (4, 2, Bc::Open),
        (4, 3, Bc::Open),
        (5, 2, Bc::Open),
        (5, 3, Bc::Open),
        (4, 3, Bc::Periodic),
        (5, 2, Bc::Periodic),
        (6, 2, Bc::Periodic),
        (7, 2, Bc::Periodic),
    ] {
        let dim = particles as usize + 1;
        let sector = Sector::new(len, particles, particles as u8, bc).unwrap();
        let basis = sector.configs();
        let occ: Vec<Vec<u8>> = basis.iter().map(Config::occupations).collect();
        let want = common::kron_hamiltonian(len, dim, 1.3, lambda, bc == Bc::Periodic, &occ);
        let ham = Hamiltonian::full(Params::new(1.3, lambda, bc).unwrap(), len).unwrap();
        let got = build_matrix(&basis, &ham, Exec::Sequential).unwrap().to_dense();
        assert!((&got - &want).norm() < 1e-12, "L={len} N={particles} {bc}");
    }
}

#[test]
fn closure_examples() {
    let params = Params::new(1.0, C::new(0.5, 0.0), Bc::Open).unwrap();
    let h6 = Hamiltonian::full(params, 6).unwrap();
    let m3 = invariant_closure(&[cfg("101010")], &h6, None, Exec::Sequential).unwrap();
    assert_eq!(m3, vec![cfg("020010"), cfg("100200"), cfg("101010")]);
    let h5 = Hamiltonian::full(params, 5).unwrap();
    let edge = invariant_closure(&[cfg("20100")], &h5, None, Exec::Sequential).unwrap();
    assert_eq!(edge, vec![cfg("12000"), cfg("20100")]);
    let h4 = Hamiltonian::full(params, 4).unwrap();
    assert_eq!(invariant_closure(&[cfg("0000")], &h4, None, Exec::Sequential).unwrap().len(), 1);
    let big = Hamiltonian::full(params, 12).unwrap();
    assert!(invariant_closure(&[cfg("003300000000")], &big, Some(5), Exec::Sequential).is_err());
}

#[test]
fn monomer_pair_block() {
    let lambda = C::new(0.8, 0.35);
    let kappa = 1.7;
    let ham = Hamiltonian::full(Params::new(kappa, lambda, Bc::Open).unwrap(), 4).unwrap();
    let a = build_matrix(&[cfg("1010"), cfg("0200")], &ham, Exec::Sequential).unwrap().to_dense();
    let s2 = 2f64.sqrt();
    let want = DMatrix::from_row_slice(
        2,
        2,
        &[
            C::new(kappa * lambda.norm_sqr(), 0.0),
            -lambda.conj() * s2 * kappa,
            -lambda * s2 * kappa,
            C::new(2.0 * kappa, 0.0),
        ],
    );
    assert!((&a - &want).norm() < 1e-13);
    let ev = common::eigenvalues(&a);
    assert!(ev[0].abs() < 1e-13);
    assert!((ev[1] - kappa * (lambda.norm_sqr() + 2.0)).abs() < 1e-12);
}

#[test]
fn edge_block_eigenvalues() {
    for (kappa, abs_lambda) in [(0.5, 0.3), (1.0, 0.7), (3.0, 1.5)] {
        let lambda = C::from_polar(abs_lambda, 2.1);
        let ham = Hamiltonian::full(Params::new(kappa, lambda, Bc::Open).unwrap(), 5).unwrap();
        let a = build_matrix(&[cfg("12000"), cfg("20100")], &ham, Exec::Sequential).unwrap();
        let ev = common::eigenvalues(&a.to_dense());
        let (lo, hi) = bounds::edge_eigenvalues(kappa, abs_lambda * abs_lambda);
        assert!((ev[0] - lo).abs() < 1e-12 && (ev[1] - hi).abs() < 1e-12);
    }
}

/// The three-configuration block seeded by 1011002 (the printed matrix has
/// 1 + κ|λ|² in its first entry).
#[test]
fn excited_three_block() {
    let lambda = C::new(0.25, -0.4);
    let kappa = 1.4;
    let r = lambda.norm_sqr();
    let ham = Hamiltonian::full(Params::new(kappa, lambda, Bc::Open).unwrap(), 7).unwrap();
    let basis = invariant_closure(&[cfg("1011002")], &ham, None, Exec::Sequential).unwrap();
    assert_eq!(basis.len(), 3);
    let a = build_matrix(&basis, &ham, Exec::Sequential).unwrap().to_dense();
    let s2 = 2f64.sqrt();
    let printed = DMatrix::from_row_slice(
        3,
        3,
        &[
            C::new(1.0 + kappa * r, 0.0),
            -lambda.conj() * s2 * kappa,
            C::new(0.0, 0.0),
            -lambda * s2 * kappa,
            C::new(2.0 * kappa * (1.0 + r), 0.0),
            -lambda.conj() * 2.0 * kappa,
            C::new(0.0, 0.0),
            -lambda * 2.0 * kappa,
            C::new(2.0 * (1.0 + kappa), 0.0),
        ],
    );
    let got = common::eigenvalues(&a);
    let want = common::eigenvalues(&printed);
    for (g, w) in got.iter().zip(&want) {
        assert!((g - w).abs() < 1e-12, "{got:?} vs {want:?}");
    }
}

#[test]
fn nontiling_classes() {
    assert_eq!(classify_nontiling(&cfg("11000000:per")).unwrap(), NonTilingClass::AdjacentPair);
    assert_eq!(classify_nontiling(&cfg("03000000:per")).unwrap(), NonTilingClass::Overfilled);
    assert_eq!(classify_nontiling(&cfg("20020000:per")).unwrap(), NonTilingClass::DimerPair);
    assert!(classify_nontiling(&cfg("10100000:per")).is_err());
    assert!(classify_nontiling(&cfg("1100000:per")).is_err());
}

/// Every non-tiling configuration falls in some class, on both boundaries.
#[test]
fn nontiling_partition_is_complete() {
    for (len, bc) in [(8, Bc::Periodic), (9, Bc::Periodic), (5, Bc::Open), (7, Bc::Open)] {
        for particles in 0..=5 {
            for c in Sector::new(len, particles, 5, bc).unwrap().configs() {
                let tiling = vmdgap::tiling::is_tiling(&c).unwrap();
                assert_eq!(classify_nontiling(&c).is_ok(), !tiling, "{c}");
            }
        }
    }
}

fn random_state(len: usize, bc: Bc, particles: u32, seed: u64) -> SparseState {
    let basis = Sector::new(len, particles, 4, bc).unwrap().configs();
    let mut x = seed | 1;
    let v: Vec<C> = basis
        .iter()
        .map(|_| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            C::new((x % 1000) as f64 / 500.0 - 1.0, ((x >> 20) % 1000) as f64 / 500.0 - 1.0)
        })
        .collect();
    SparseState::from_dense(&basis, &v).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn matrix_is_hermitian_and_positive(
        len in 4usize..=7,
        particles in 1u32..=4,
        per in any::<bool>(),
        kappa in 0.0f64..3.0,
        abs_lambda in 0.05f64..2.0,
        phase in 0.0f64..6.3,
    ) {
        let bc = if per { Bc::Periodic } else { Bc::Open };
        let params = Params::polar(kappa, abs_lambda, phase, bc).unwrap();
        let ham = Hamiltonian::full(params, len).unwrap();
        let basis = Sector::new(len, particles, particles as u8, bc).unwrap().configs();
        let a = build_matrix(&basis, &ham, Exec::Sequential).unwrap();
        prop_assert!(a.is_hermitian(1e-12));
        let ev = common::eigenvalues(&a.to_dense());
        prop_assert!(ev[0] > -1e-10);
    }

    #[test]
    fn fused_and_two_pass_application_agree(
        len in 4usize..=7,
        particles in 1u32..=4,
        per in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let bc = if per { Bc::Periodic } else { Bc::Open };
        let params = Params::polar(0.8, 0.6, 1.0, bc).unwrap();
        let ham = Hamiltonian::full(params, len).unwrap();
        let psi = random_state(len, bc, particles, seed);
        let fused = ham.apply_with(&psi, Exec::Sequential).unwrap();
        let parallel = ham.apply_with(&psi, Exec::Parallel).unwrap();
        let two = ham.apply_two_pass(&psi).unwrap();
        prop_assert!(fused.distance(&two).unwrap() < 1e-10 * (1.0 + fused.norm()));
        prop_assert!(fused.distance(&parallel).unwrap() < 1e-12 * (1.0 + fused.norm()));
        let q = ham.rayleigh(&psi).unwrap();
        prop_assert!(q >= -1e-12);
    }

    /// H commutes with particle number and dipole moment (mod L on rings).
    #[test]
    fn couplings_conserve_charges(occ in prop::collection::vec(0u8..=3, 4..=12), per in any::<bool>()) {
        let bc = if per { Bc::Periodic } else { Bc::Open };
        let c = Config::new(&occ, bc).unwrap();
        let ham = Hamiltonian::full(Params::polar(1.0, 0.9, 0.4, bc).unwrap(), occ.len()).unwrap();
        for t in ham.neighbours(&c).unwrap() {
            prop_assert_eq!(t.particle_number(), c.particle_number());
            if per {
                prop_assert_eq!(t.dipole_mod(), c.dipole_mod());
            } else {
                prop_assert_eq!(t.dipole(), c.dipole());
            }
        }
    }
}

#[test]
fn bench_seed_closure_is_nontrivial() {
    let ham = Hamiltonian::full(Params::polar(1.0, 0.5, std::f64::consts::PI, Bc::Open).unwrap(), 20).unwrap();
    let closure = invariant_closure(&[cfg("20020020020020020020")], &ham, None, Exec::Sequential).unwrap();
    assert_eq!(closure.len(), 1121);
}
