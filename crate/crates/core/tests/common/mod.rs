//! Reference implementations shared by the integration tests. Everything
//! here works on plain `Vec<u8>` occupations and dense matrices, without
//! going through the crate's packed configurations or sparse assembly.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;

pub fn c(re: f64) -> C {
    C::new(re, 0.0)
}

/// All occupation vectors of `len` sites with `particles` bosons and at most
/// `cap` per site, site 1 first, in lexicographic order.
pub fn occupations(len: usize, particles: u32, cap: u8) -> Vec<Vec<u8>> {
    fn go(prefix: &mut Vec<u8>, left: usize, rest: u32, cap: u8, out: &mut Vec<Vec<u8>>) {
        if left == 0 {
            if rest == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        for v in 0..=cap.min(rest.min(255) as u8) {
            prefix.push(v);
            go(prefix, left - 1, rest - v as u32, cap, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), len, particles, cap, &mut out);
    out
}

/// Every occupation vector of `len` sites with entries in `0..=cap`.
pub fn all_occupations(len: usize, cap: u8) -> Vec<Vec<u8>> {
    let mut out = vec![vec![]];
    for _ in 0..len {
        out = out
            .into_iter()
            .flat_map(|p: Vec<u8>| {
                (0..=cap).map(move |v| {
                    let mut q = p.clone();
                    q.push(v);
                    q
                })
            })
            .collect();
    }
    out
}

fn annihilator(dim: usize) -> DMatrix<C> {
    DMatrix::from_fn(dim, dim, |i, j| if j == i + 1 { c((j as f64).sqrt()) } else { c(0.0) })
}

fn number(dim: usize) -> DMatrix<C> {
    DMatrix::from_fn(dim, dim, |i, j| if i == j { c(i as f64) } else { c(0.0) })
}

/// Product of single-site operators placed on distinct sites (0-based) of a
/// `len`-site chain with local dimension `dim`.
fn embed_all(ops: &[(&DMatrix<C>, usize)], len: usize, dim: usize) -> DMatrix<C> {
    let id = DMatrix::<C>::identity(dim, dim);
    let mut out = DMatrix::<C>::identity(1, 1);
    for s in 0..len {
        let factor = ops.iter().find(|(_, site)| *site == s).map_or(&id, |(op, _)| *op);
        out = out.kronecker(factor);
    }
    out
}

pub fn kron_index(occ: &[u8], dim: usize) -> usize {
    occ.iter().fold(0, |acc, &v| acc * dim + v as usize)
}

/// The Hamiltonian built from Kronecker products of single-site ladder
/// matrices (local dimension `dim`), restricted to the listed occupation
/// vectors. Basis index is the base-`dim` number with site 1 most
/// significant. The hopping part is assembled as Q†Q from the columns of q_x
/// on the basis, which is exact whenever q_x cannot leave the truncation.
pub fn kron_hamiltonian(
    len: usize,
    dim: usize,
    kappa: f64,
    lambda: C,
    periodic: bool,
    basis: &[Vec<u8>],
) -> DMatrix<C> {
    let a = annihilator(dim);
    let n = number(dim);
    let idx: Vec<usize> = basis.iter().map(|o| kron_index(o, dim)).collect();
    let m = idx.len();
    let mut h = DMatrix::<C>::zeros(m, m);
    let bonds = if periodic { len } else { len - 1 };
    for b in 0..bonds {
        let nn = embed_all(&[(&n, b), (&n, (b + 1) % len)], len, dim);
        h += DMatrix::from_fn(m, m, |i, j| nn[(idx[i], idx[j])]);
    }
    let centres: Vec<usize> = if periodic { (0..len).collect() } else { (1..len - 1).collect() };
    let a2 = &a * &a;
    for x in centres {
        let l = (x + len - 1) % len;
        let r = (x + 1) % len;
        let q = embed_all(&[(&a2, x)], len, dim) - embed_all(&[(&a, l), (&a, r)], len, dim) * lambda;
        let qs = DMatrix::from_fn(q.nrows(), m, |i, j| q[(i, idx[j])]);
        h += qs.adjoint() * &qs * c(kappa);
    }
    h
}

/// Ascending eigenvalues of a Hermitian matrix.
pub fn eigenvalues(h: &DMatrix<C>) -> Vec<f64> {
    let mut v: Vec<f64> = h.clone().symmetric_eigen().eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Tile patterns available at each position of an open chain.
fn open_tiles(start: usize, len: usize, occ: &[u8]) -> Vec<Vec<u8>> {
    let mut pats: Vec<Vec<u8>> = vec![vec![0], vec![1, 0], vec![0, 2, 0, 0]];
    if start == 0 && occ[0] >= 2 {
        pats.push(vec![occ[0], 0, 0]);
    }
    let rest = len - start;
    pats.push(vec![1]);
    pats.push(vec![0, 2, 0]);
    if rest == 2 && occ[len - 1] >= 2 {
        pats.push(vec![0, occ[len - 1]]);
    }
    pats
}

/// Whether an open chain can be covered left to right by void, monomer,
/// dimer and boundary tiles; tiles cut by the right end must end it.
pub fn open_cover_exists(occ: &[u8]) -> bool {
    fn go(occ: &[u8], pos: usize) -> bool {
        let len = occ.len();
        if pos == len {
            return true;
        }
        for p in open_tiles(pos, len, occ) {
            let end = pos + p.len();
            if end > len || occ[pos..end] != p[..] {
                continue;
            }
            let cut_tile = p == [1] || p == [0, 2, 0] || (p.len() == 2 && p[0] == 0 && p[1] >= 2);
            if cut_tile && end != len {
                continue;
            }
            if go(occ, end) {
                return true;
            }
        }
        false
    }
    go(occ, 0)
}

/// Whether a ring can be covered by void, monomer and dimer tiles.
pub fn ring_cover_exists(occ: &[u8]) -> bool {
    let len = occ.len();
    let tiles: [&[u8]; 3] = [&[0], &[1, 0], &[0, 2, 0, 0]];
    fn go(rot: &[u8], pos: usize, tiles: &[&[u8]; 3]) -> bool {
        if pos == rot.len() {
            return true;
        }
        tiles.iter().any(|p| {
            let end = pos + p.len();
            end <= rot.len() && rot[pos..end] == p[..] && go(rot, end, tiles)
        })
    }
    (0..len).any(|s| {
        let rot: Vec<u8> = occ[s..].iter().chain(&occ[..s]).copied().collect();
        go(&rot, 0, &tiles)
    })
}

/// Number of ways to write `n` as an ordered sum of ones and twos.
pub fn compositions(n: usize) -> usize {
    let (mut a, mut b) = (1usize, 1usize);
    for _ in 0..n {
        (a, b) = (b, a + b);
    }
    a
}
