mod common;

use num_complex::Complex64 as C;
use proptest::prelude::*;
use vmdgap::fock::{self, enumerate_configs, placements};
use vmdgap::{Bc, Config, Sector, SparseState};

fn cfg(s: &str) -> Config {
    s.parse().unwrap()
}

#[test]
fn enumeration_examples() {
    let two = enumerate_configs(2, 1, 2, Bc::Open).unwrap();
    let occ: Vec<Vec<u8>> = two.iter().map(Config::occupations).collect();
    assert_eq!(occ, vec![vec![0, 1], vec![1, 0]]);
    assert_eq!(enumerate_configs(4, 2, 2, Bc::Open).unwrap().len(), 10);
    let vac = enumerate_configs(3, 0, 5, Bc::Open).unwrap();
    assert_eq!(vac.len(), 1);
    assert_eq!(vac[0].occupations(), vec![0, 0, 0]);
}

#[test]
fn enumeration_matches_reference_recursion() {
    for len in 1..=7 {
        for particles in 0..=6 {
            for cap in 1..=4u8 {
                let lib: Vec<Vec<u8>> = enumerate_configs(len, particles, cap, Bc::Open)
                    .unwrap()
                    .iter()
                    .map(Config::occupations)
                    .collect();
                let reference = common::occupations(len, particles, cap);
                assert_eq!(lib, reference, "L={len} N={particles} cap={cap}");
                assert_eq!(placements(len, particles, cap), reference.len() as u64);
            }
        }
    }
}

#[test]
fn ladder_examples() {
    assert_eq!(cfg("101").raise(2).unwrap(), cfg("111"));
    assert_eq!(cfg("020").lower(2).unwrap(), Some(cfg("010")));
    assert_eq!(cfg("00").lower(1).unwrap(), None);
    let (up, amp) = fock::create(&cfg("020"), 2).unwrap().unwrap();
    assert_eq!(up, cfg("030"));
    assert!((amp - 3f64.sqrt()).abs() < 1e-15);
    let (down, amp) = fock::annihilate(&cfg("020"), 2).unwrap().unwrap();
    assert_eq!(down, cfg("010"));
    assert!((amp - 2f64.sqrt()).abs() < 1e-15);
    assert!(fock::annihilate(&cfg("00"), 1).unwrap().is_none());
}

#[test]
fn observable_examples() {
    let o = cfg("1010").observables();
    assert_eq!((o.particles, o.dipole), (2, 4));
    let o = cfg("0200").observables();
    assert_eq!((o.particles, o.dipole), (2, 4));
    let o = cfg("300").observables();
    assert_eq!((o.particles, o.dipole), (3, 3));
}

#[test]
fn inner_product_examples() {
    let a = SparseState::basis(cfg("101"));
    let b = SparseState::basis(cfg("020"));
    assert_eq!(a.inner(&a).unwrap(), C::new(1.0, 0.0));
    assert_eq!(a.inner(&b).unwrap(), C::new(0.0, 0.0));
    let mut phi2 = SparseState::basis(cfg("1010"));
    phi2.add_term(cfg("0200"), C::new(1.0 / 2f64.sqrt(), 0.0)).unwrap();
    assert!((phi2.inner(&phi2).unwrap().re - 1.5).abs() < 1e-15);
    let other = SparseState::basis(cfg("0110:per"));
    assert!(phi2.inner(&other).is_err());
    assert!(phi2.inner(&SparseState::basis(cfg("10100"))).is_err());
}

#[test]
fn rejects_out_of_range() {
    assert!(Config::new(&[16], Bc::Open).is_err());
    assert!(Config::new(&[0; 33], Bc::Open).is_err());
    let full = Config::new(&[15, 0], Bc::Open).unwrap();
    assert!(full.raise(1).is_err());
    assert!(full.raise(3).is_err());
    assert!(full.lower(0).is_err());
    assert!("1a0".parse::<Config>().is_err());
    assert!("10:ring".parse::<Config>().is_err());
}

#[test]
fn sector_rank_is_enumeration_order() {
    let sector = Sector::new(6, 5, 3, Bc::Periodic).unwrap();
    let configs = sector.configs();
    assert_eq!(configs.len() as u64, sector.size());
    for (i, c) in configs.iter().enumerate() {
        assert_eq!(sector.rank(c), Some(i as u64));
        assert_eq!(sector.unrank(i as u64), Some(*c));
    }
    assert_eq!(sector.unrank(sector.size()), None);
    assert_eq!(sector.rank(&cfg("500000:per")), None);
}

fn occupation_vec() -> impl Strategy<Value = (Vec<u8>, bool)> {
    (prop::collection::vec(0u8..=15, 1..=32), any::<bool>())
}

proptest! {
    #[test]
    fn text_round_trip((occ, per) in occupation_vec()) {
        let bc = if per { Bc::Periodic } else { Bc::Open };
        let c = Config::new(&occ, bc).unwrap();
        let back: Config = c.to_string().parse().unwrap();
        prop_assert_eq!(back, c);
        let json = serde_json::to_string(&c).unwrap();
        prop_assert_eq!(serde_json::from_str::<Config>(&json).unwrap(), c);
        prop_assert_eq!(c.occupations(), occ);
    }

    #[test]
    fn observables_match_definition((occ, per) in occupation_vec()) {
        let bc = if per { Bc::Periodic } else { Bc::Open };
        let c = Config::new(&occ, bc).unwrap();
        let particles: u32 = occ.iter().map(|&v| v as u32).sum();
        let dipole: u64 = occ.iter().enumerate().map(|(i, &v)| (i as u64 + 1) * v as u64).sum();
        prop_assert_eq!(c.particle_number(), particles);
        prop_assert_eq!(c.dipole(), dipole);
        if per {
            prop_assert_eq!(c.dipole_mod(), dipole % occ.len() as u64);
        }
    }

    #[test]
    fn ladder_round_trip((occ, _) in occupation_vec(), site in 0usize..32) {
        let c = Config::new(&occ, Bc::Open).unwrap();
        let site = site % occ.len() + 1;
        if occ[site - 1] < 15 {
            let (up, a_up) = fock::create(&c, site).unwrap().unwrap();
            let (back, a_down) = fock::annihilate(&up, site).unwrap().unwrap();
            prop_assert_eq!(back, c);
            prop_assert!((a_up - a_down).abs() < 1e-14);
            prop_assert!((a_up * a_up - (occ[site - 1] as f64 + 1.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn rank_unrank_round_trip(len in 1usize..=8, particles in 0u32..=8, cap in 1u8..=4, pick in any::<u64>()) {
        let sector = Sector::new(len, particles, cap, Bc::Open).unwrap();
        prop_assume!(sector.size() > 0);
        let r = pick % sector.size();
        let c = sector.unrank(r).unwrap();
        prop_assert_eq!(sector.rank(&c), Some(r));
        prop_assert_eq!(c.particle_number(), particles);
        prop_assert!(c.max_occupation() <= cap);
    }

    #[test]
    fn dense_round_trip(len in 2usize..=5, particles in 1u32..=4, seed in any::<u64>()) {
        let basis = Sector::new(len, particles, 4, Bc::Open).unwrap().configs();
        let v: Vec<C> = (0..basis.len())
            .map(|i| C::new(((seed >> (i % 60)) & 7) as f64 - 3.0, (i % 3) as f64))
            .collect();
        let s = SparseState::from_dense(&basis, &v).unwrap();
        prop_assert_eq!(s.to_dense(&basis).unwrap(), v);
    }
}
