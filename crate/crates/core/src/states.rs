//! Frustration-free ground states, the excited vectors used by the
//! martingale argument, scar states and the variational excited ansatz.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fock::{Bc, Config, SparseState};
use crate::tiling::{self, Family, Tile, Tiling};

fn re(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

fn basis(pattern: &[u8]) -> SparseState {
    SparseState::basis(Config::new(pattern, Bc::Open).expect("short literal pattern"))
}

/// Σ_T (λ/√2)^{d(T)} |σ(T)⟩ over a class of tilings.
pub fn bvmd_from_class(class: &[Tiling], lambda: Complex64) -> Result<SparseState> {
    let first = class.first().ok_or(Error::ZeroVector)?;
    let weight = lambda / 2f64.sqrt();
    let mut psi = SparseState::zero(first.len(), first.bc());
    for t in class {
        psi.add_term(t.to_config(), weight.powu(t.dimer_count() as u32))?;
    }
    Ok(psi)
}

/// The (unnormalised) BVMD state of `root` within `family`.
pub fn bvmd_state(root: &Tiling, family: Family, lambda: Complex64) -> Result<SparseState> {
    bvmd_from_class(&tiling::expand_class(root, family)?, lambda)
}

/// The product state on the root configuration.
pub fn tao_thouless(root: &Tiling) -> SparseState {
    SparseState::basis(root.to_config())
}

/// a_0..=a_n with a_0 = a_1 = 1 and a_k = a_{k−1} + (r/2)a_{k−2}, r = |λ|²;
/// a_n = ‖φ_n‖².
pub fn norm_sequence(lambda_sq: f64, n: usize) -> Vec<f64> {
    let mut a = vec![1.0; n.max(1) + 1];
    for k in 2..=n {
        a[k] = a[k - 1] + 0.5 * lambda_sq * a[k - 2];
    }
    a.truncate(n + 1);
    a
}

/// a_n from the characteristic roots (1 ± √(1+2r))/2.
pub fn norm_closed_form(lambda_sq: f64, n: usize) -> f64 {
    let s = (1.0 + 2.0 * lambda_sq).sqrt();
    let (p, m) = ((1.0 + s) / 2.0, (1.0 - s) / 2.0);
    (p.powi(n as i32 + 1) - m.powi(n as i32 + 1)) / (p - m)
}

/// β_n = a_{n−1}/a_n for n ≥ 1.
pub fn beta(lambda_sq: f64, n: usize) -> f64 {
    assert!(n >= 1, "β_n needs n ≥ 1");
    let a = norm_sequence(lambda_sq, n);
    a[n - 1] / a[n]
}

/// φ_n^{(i)}: the BVMD state of n − 1 monomers followed by an end monomer
/// (i = 1) or a monomer (i = 2). φ_0 is the scalar 1.
pub fn phi(n: usize, kind: u8, lambda: Complex64) -> Result<SparseState> {
    if n == 0 {
        return Ok(SparseState::scalar(re(1.0)));
    }
    bvmd_state(&tiling::monomer_chain(n, kind)?, Family::ObcBulk, lambda)
}

/// η_n^{(i)} = −(λ̄/√2) β_{n−1} φ_{n−1} ⊗ φ_1^{(i)} + φ_{n−2} ⊗ σ^{(i)},
/// with σ^{(1)} = 020 and σ^{(2)} = 0200; orthogonal to φ_n^{(i)}.
pub fn eta(n: usize, kind: u8, lambda: Complex64) -> Result<SparseState> {
    if n < 2 || !(1..=2).contains(&kind) {
        return Err(Error::InvalidParameter(format!("η_{n}^({kind}) is undefined")));
    }
    let b = beta(lambda.norm_sqr(), n - 1);
    let tail = if kind == 1 { basis(&[0, 2, 0]) } else { basis(&[0, 2, 0, 0]) };
    let mut out = phi(n - 1, 2, lambda)?.tensor(&phi(1, kind, lambda)?)?;
    out.scale(-lambda.conj() / 2f64.sqrt() * b);
    out.axpy(re(1.0), &phi(n - 2, 2, lambda)?.tensor(&tail)?)?;
    Ok(out)
}

/// The mirrored excitation −(λ̄/√2) β_{n−1} |10⟩ ⊗ φ_{n−1} + |0200⟩ ⊗ φ_{n−2}.
pub fn eta_mirror(n: usize, lambda: Complex64) -> Result<SparseState> {
    if n < 2 {
        return Err(Error::InvalidParameter(format!("mirrored η_{n} is undefined")));
    }
    let b = beta(lambda.norm_sqr(), n - 1);
    let mut out = basis(&[1, 0]).tensor(&phi(n - 1, 2, lambda)?)?;
    out.scale(-lambda.conj() / 2f64.sqrt() * b);
    out.axpy(re(1.0), &basis(&[0, 2, 0, 0]).tensor(&phi(n - 2, 2, lambda)?)?)?;
    Ok(out)
}

/// Splits an open root into the part before its maximal trailing monomer
/// run and that run's length and end kind.
pub fn trailing_run(root: &Tiling) -> (Vec<Tile>, usize, u8) {
    let tiles = root.tiles();
    let kind = match tiles.last() {
        Some(Tile::EndMonomer) => 1,
        Some(Tile::Monomer) => 2,
        _ => return (tiles.to_vec(), 0, 0),
    };
    let mut start = tiles.len() - 1;
    while start > 0 && tiles[start - 1] == Tile::Monomer {
        start -= 1;
    }
    (tiles[..start].to_vec(), tiles.len() - start, kind)
}

/// ξ(R) = ψ(R̃) ⊗ η_n^{(i)}, where the root ends in a run of n ≥ 2 monomers
/// of end kind i and R̃ is the rest.
pub fn xi_state(root: &Tiling, lambda: Complex64) -> Result<SparseState> {
    if root.bc() != Bc::Open {
        return Err(Error::InvalidParameter("ξ is defined on open chains".into()));
    }
    let (rest, n, kind) = trailing_run(root);
    if n < 2 {
        return Err(Error::InvalidParameter(format!(
            "{root} does not end in two or more monomers"
        )));
    }
    let head = if rest.is_empty() {
        SparseState::scalar(re(1.0))
    } else {
        let prefix = Tiling::open(rest)?;
        bvmd_state(&prefix, Family::ObcAll { n_cap: crate::fock::MAX_OCCUPATION }, lambda)?
    };
    head.tensor(&eta(n, kind, lambda)?)
}

/// φ_left ⊗ (0110)^count (0) ⊗ φ_right^{(1)}, an eigenstate of energy `count`.
pub fn scar_state(left: usize, count: usize, right: usize, lambda: Complex64) -> Result<SparseState> {
    let mut core = vec![];
    for _ in 0..count {
        core.extend([0, 1, 1, 0]);
    }
    core.push(0);
    let right_part = if right == 0 {
        SparseState::scalar(re(1.0))
    } else {
        phi(right, 1, lambda)?
    };
    phi(left, 2, lambda)?
        .tensor(&SparseState::basis(Config::new(&core, Bc::Open)?))?
        .tensor(&right_part)
}

/// Coefficients of the two-parameter excited ansatz.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Ansatz {
    /// |020⟩ weight −√2κλ/(2κ−1), η weight −√2λ/(2κ−1).
    Printed,
    /// First-order perturbative weights √2κλ/(2κ−1) and λ/(√2(2κ−1)).
    FirstOrder,
}

/// φ_l ⊗ |0⟩ ⊗ ψ with ψ = (|101⟩ + b|020⟩) ⊗ φ_r + c |101⟩ ⊗ η_r, on
/// 2(l + 2 + r) sites.
pub fn variational_excited(
    left: usize,
    right: usize,
    kappa: f64,
    lambda: Complex64,
    ansatz: Ansatz,
) -> Result<SparseState> {
    if right < 2 {
        return Err(Error::InvalidParameter("the ansatz needs r ≥ 2".into()));
    }
    if kappa <= 0.5 {
        return Err(Error::InvalidParameter(format!("the ansatz needs κ > 1/2, got {kappa}")));
    }
    let denom = 2.0 * kappa - 1.0;
    let (b, c) = match ansatz {
        Ansatz::Printed => (
            -(2f64.sqrt()) * kappa * lambda / denom,
            -(2f64.sqrt()) * lambda / denom,
        ),
        Ansatz::FirstOrder => (
            2f64.sqrt() * kappa * lambda / denom,
            lambda / (2f64.sqrt() * denom),
        ),
    };
    let mut head = basis(&[1, 0, 1]);
    head.axpy(b, &basis(&[0, 2, 0]))?;
    let mut psi = head.tensor(&phi(right, 2, lambda)?)?;
    psi.axpy(c, &basis(&[1, 0, 1]).tensor(&eta_mirror(right, lambda)?)?)?;
    phi(left, 2, lambda)?.tensor(&basis(&[0]))?.tensor(&psi)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lam() -> Complex64 {
        Complex64::new(-0.4, 0.3)
    }

    #[test]
    fn norms_follow_the_recursion() {
        let r = lam().norm_sqr();
        let a = norm_sequence(r, 8);
        for n in 0..=6 {
            let p = phi(n, 2, lam()).unwrap();
            assert!((p.norm_sqr() - a[n]).abs() < 1e-13 * a[n]);
            assert!((norm_closed_form(r, n) - a[n]).abs() < 1e-13 * a[n]);
            assert!((phi(n.max(1), 1, lam()).unwrap().norm_sqr() - a[n.max(1)]).abs() < 1e-13);
        }
    }

    #[test]
    fn eta_is_orthogonal_with_known_norm() {
        let r = lam().norm_sqr();
        for kind in 1..=2 {
            for n in 2..=6 {
                let e = eta(n, kind, lam()).unwrap();
                let p = phi(n, kind, lam()).unwrap();
                assert!(p.inner(&e).unwrap().norm() < 1e-14);
                let want = beta(r, n - 1) * norm_sequence(r, n)[n];
                assert!((e.norm_sqr() - want).abs() < 1e-13 * want, "n={n} i={kind}");
            }
        }
    }

    #[test]
    fn mirrored_eta_matches_its_recursive_form() {
        let l = lam();
        let r = l.norm_sqr();
        for n in 3..=6 {
            let direct = eta_mirror(n, l).unwrap();
            let mut rec = eta_mirror(2, l).unwrap().tensor(&phi(n - 2, 2, l).unwrap()).unwrap();
            let tail = basis(&[1, 0]).tensor(&eta_mirror(n - 1, l).unwrap()).unwrap();
            rec.axpy(re(-beta(r, n - 1) * r / 2.0), &tail).unwrap();
            assert!(direct.distance(&rec).unwrap() < 1e-14);
            let nrm = beta(r, n - 1) * norm_sequence(r, n)[n];
            assert!((direct.norm_sqr() - nrm).abs() < 1e-13 * nrm);
        }
    }

    #[test]
    fn xi_needs_a_monomer_run() {
        let root: Tiling = "(200)(0)(10)(10)(1)".parse().unwrap();
        let x = xi_state(&root, lam()).unwrap();
        assert_eq!(x.len(), 9);
        let bad: Tiling = "(10)(0)".parse().unwrap();
        assert!(xi_state(&bad, lam()).is_err());
    }
}
