//! Dense and Krylov eigensolvers, and the gap quantities built on them:
//! gaps above a verified kernel, tiling-subspace gaps, complement ground
//! energies and sector spectra.

use std::collections::HashSet;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{Config, Sector, SparseState};
use crate::hamiltonian::{self, Hamiltonian, Params};
use crate::matrix::SparseMatrix;
use crate::states;
use crate::tiling::{self, Family, Tiling};

type C = Complex64;

const ZERO: C = C { re: 0.0, im: 0.0 };

/// Knobs shared by every solver entry point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverOptions {
    /// Blocks up to this dimension are diagonalised densely (never below 64).
    pub dense_limit: usize,
    /// Eigenvalues at or below this are numerical zeros.
    pub kernel_tol: f64,
    /// Seed of the Krylov start vectors.
    pub seed: u64,
    /// Krylov subspace size per restart.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Convergence when ‖Av − θv‖ < residual_tol · ‖A‖₁.
    pub residual_tol: f64,
    /// Largest admissible number of stored matrix entries.
    pub budget_nnz: usize,
    pub exec: Exec,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            dense_limit: 160,
            kernel_tol: 1e-10,
            seed: 0x5EED,
            krylov_dim: 120,
            max_restarts: 400,
            residual_tol: 1e-11,
            budget_nnz: 2_000_000,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Dense,
    Iterative,
}

/// Lowest eigenpairs with their residual norms.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<C>>,
    pub residuals: Vec<f64>,
    pub method: Method,
}

/// Serializable summary of a spectral computation.
#[derive(Clone, Debug, Serialize)]
pub struct SpectralResult {
    pub schema: u32,
    pub eigenvalues: Vec<f64>,
    pub kernel_dim: usize,
    pub gap: Option<f64>,
    pub method: Method,
    pub residuals: Vec<f64>,
    pub n_max: Option<u8>,
    pub seed: u64,
    pub dim: usize,
}

fn dot(a: &[C], b: &[C]) -> C {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn norm(a: &[C]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn axpy(y: &mut [C], alpha: C, x: &[C]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn scale(y: &mut [C], alpha: f64) {
    for yi in y.iter_mut() {
        *yi *= alpha;
    }
}

/// Removes the components of `v` along the orthonormal `basis`, twice.
fn project_out(v: &mut [C], basis: &[Vec<C>]) {
    for _ in 0..2 {
        for q in basis {
            let c = dot(q, v);
            axpy(v, -c, q);
        }
    }
}

/// Orthonormalises `vectors`, dropping those dependent to relative 1e-8.
pub fn orthonormalize(vectors: &[Vec<C>]) -> Vec<Vec<C>> {
    let mut out: Vec<Vec<C>> = Vec::new();
    for v in vectors {
        let n0 = norm(v);
        if n0 == 0.0 {
            continue;
        }
        let mut w = v.clone();
        project_out(&mut w, &out);
        let n = norm(&w);
        if n > 1e-8 * n0 {
            scale(&mut w, 1.0 / n);
            out.push(w);
        }
    }
    out
}

/// Residual ‖Av − θv‖ for a unit vector.
fn residual(a: &SparseMatrix, v: &[C], theta: f64, exec: Exec) -> f64 {
    let mut av = a.apply(v, exec);
    axpy(&mut av, C::new(-theta, 0.0), v);
    norm(&av)
}

/// All eigenpairs of a Hermitian dense matrix, ascending.
pub fn dense_eigh(a: &DMatrix<C>) -> (Vec<f64>, DMatrix<C>) {
    let n = a.nrows();
    if n == 0 {
        return (vec![], DMatrix::zeros(0, 0));
    }
    let eig = a.clone().symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

fn check_hermitian(a: &SparseMatrix) -> Result<()> {
    let tol = 1e-12 * a.norm_one().max(1.0);
    if !a.is_hermitian(tol) {
        return Err(Error::InvalidParameter("matrix is not Hermitian".into()));
    }
    Ok(())
}

/// The `k` lowest eigenpairs of `a` restricted to the orthogonal complement
/// of `deflate` (which must span an invariant subspace).
pub fn lowest_pairs(
    a: &SparseMatrix,
    k: usize,
    deflate: &[Vec<C>],
    opts: &SolverOptions,
) -> Result<EigenPairs> {
    check_hermitian(a)?;
    if a.dim() <= opts.dense_limit.max(64) {
        dense_pairs(a, k, deflate)
    } else {
        lanczos_pairs(a, k, deflate, opts)
    }
}

/// Dense route; deflated directions are shifted above the spectrum.
pub fn dense_pairs(a: &SparseMatrix, k: usize, deflate: &[Vec<C>]) -> Result<EigenPairs> {
    let n = a.dim();
    let locked = orthonormalize(deflate);
    let k = k.min(n - locked.len());
    let mut m = a.to_dense();
    if !locked.is_empty() {
        let shift = 2.0 * a.norm_one() + 1.0;
        let mut p = DMatrix::<C>::identity(n, n);
        for q in &locked {
            for i in 0..n {
                for j in 0..n {
                    p[(i, j)] -= q[i] * q[j].conj();
                }
            }
        }
        m = &p * m * &p + (DMatrix::<C>::identity(n, n) - &p) * C::new(shift, 0.0);
    }
    let (vals, vecs) = dense_eigh(&m);
    let mut out = EigenPairs {
        values: Vec::with_capacity(k),
        vectors: Vec::with_capacity(k),
        residuals: Vec::with_capacity(k),
        method: Method::Dense,
    };
    for (c, &val) in vals.iter().enumerate().take(k) {
        let v: Vec<C> = vecs.column(c).iter().copied().collect();
        out.residuals.push(residual(a, &v, val, Exec::Sequential));
        out.values.push(val);
        out.vectors.push(v);
    }
    Ok(out)
}

/// Restarted Lanczos with full reorthogonalisation and locking.
pub fn lanczos_pairs(
    a: &SparseMatrix,
    k: usize,
    deflate: &[Vec<C>],
    opts: &SolverOptions,
) -> Result<EigenPairs> {
    let n = a.dim();
    let anorm = a.norm_one().max(f64::MIN_POSITIVE);
    let tol = opts.residual_tol * anorm;
    let mut locked = orthonormalize(deflate);
    let base = locked.len();
    let k = k.min(n - base);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let random = |rng: &mut ChaCha8Rng| -> Vec<C> {
        (0..n)
            .map(|_| C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect()
    };
    let mut out = EigenPairs {
        values: vec![],
        vectors: vec![],
        residuals: vec![],
        method: Method::Iterative,
    };
    let mut start = random(&mut rng);
    while out.values.len() < k {
        let mut converged = None;
        for _ in 0..opts.max_restarts {
            let (theta, y) = match krylov_lowest(a, &start, &locked, opts.krylov_dim, anorm, opts.exec) {
                Some(pair) => pair,
                None => {
                    start = random(&mut rng);
                    continue;
                }
            };
            let res = residual(a, &y, theta, opts.exec);
            if res < tol {
                converged = Some((theta, y, res));
                break;
            }
            start = y;
        }
        let (theta, y, res) = converged.ok_or_else(|| {
            Error::NoConvergence(format!(
                "eigenpair {} of a {n}-dimensional matrix after {} restarts",
                out.values.len() + 1,
                opts.max_restarts
            ))
        })?;
        out.values.push(theta);
        out.residuals.push(res);
        out.vectors.push(y.clone());
        locked.push(y);
        start = random(&mut rng);
    }
    // Lowest-first order is not guaranteed across locking passes.
    let mut order: Vec<usize> = (0..out.values.len()).collect();
    order.sort_by(|&i, &j| out.values[i].total_cmp(&out.values[j]));
    Ok(EigenPairs {
        values: order.iter().map(|&i| out.values[i]).collect(),
        vectors: order.iter().map(|&i| out.vectors[i].clone()).collect(),
        residuals: order.iter().map(|&i| out.residuals[i]).collect(),
        method: Method::Iterative,
    })
}

/// One Lanczos pass; returns the lowest Ritz pair in the complement of `locked`.
fn krylov_lowest(
    a: &SparseMatrix,
    start: &[C],
    locked: &[Vec<C>],
    m: usize,
    anorm: f64,
    exec: Exec,
) -> Option<(f64, Vec<C>)> {
    let n = a.dim();
    let room = n - locked.len();
    if room == 0 {
        return None;
    }
    let m = m.min(room).max(1);
    let mut q0 = start.to_vec();
    project_out(&mut q0, locked);
    let n0 = norm(&q0);
    if n0 < 1e-12 {
        return None;
    }
    scale(&mut q0, 1.0 / n0);
    let mut basis = vec![q0];
    let mut alpha = Vec::with_capacity(m);
    let mut beta: Vec<f64> = Vec::with_capacity(m);
    let mut w = vec![ZERO; n];
    for j in 0..m {
        a.matvec(&basis[j], &mut w, exec);
        let aj = dot(&basis[j], &w).re;
        alpha.push(aj);
        axpy(&mut w, C::new(-aj, 0.0), &basis[j]);
        if j > 0 {
            axpy(&mut w, C::new(-beta[j - 1], 0.0), &basis[j - 1]);
        }
        project_out(&mut w, locked);
        project_out(&mut w, &basis);
        let b = norm(&w);
        if j + 1 == m || b < 1e-13 * anorm {
            break;
        }
        beta.push(b);
        let mut next = w.clone();
        scale(&mut next, 1.0 / b);
        basis.push(next);
    }
    let s = alpha.len();
    let mut t = DMatrix::<f64>::zeros(s, s);
    for i in 0..s {
        t[(i, i)] = alpha[i];
        if i + 1 < s {
            t[(i, i + 1)] = beta[i];
            t[(i + 1, i)] = beta[i];
        }
    }
    let eig = t.symmetric_eigen();
    let (imin, &theta) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.total_cmp(y.1))?;
    let mut y = vec![ZERO; n];
    for (i, q) in basis.iter().enumerate().take(s) {
        axpy(&mut y, C::new(eig.eigenvectors[(i, imin)], 0.0), q);
    }
    project_out(&mut y, locked);
    let ny = norm(&y);
    scale(&mut y, 1.0 / ny);
    Some((theta, y))
}

/// The `k` lowest eigenvalues with residual certificates.
pub fn eigen_lowest(a: &SparseMatrix, k: usize, opts: &SolverOptions) -> Result<SpectralResult> {
    let pairs = lowest_pairs(a, k, &[], opts)?;
    Ok(summarize(a.dim(), &pairs, None, opts))
}

fn summarize(dim: usize, pairs: &EigenPairs, n_max: Option<u8>, opts: &SolverOptions) -> SpectralResult {
    let kernel_dim = pairs.values.iter().filter(|&&v| v <= opts.kernel_tol).count();
    SpectralResult {
        schema: 1,
        eigenvalues: pairs.values.clone(),
        kernel_dim,
        gap: pairs.values.iter().copied().find(|&v| v > opts.kernel_tol),
        method: pairs.method,
        residuals: pairs.residuals.clone(),
        n_max,
        seed: opts.seed,
        dim,
    }
}

/// Smallest eigenvalue of `a` orthogonal to `kernel`; `None` when the kernel
/// fills the space. Each kernel vector must satisfy ‖Av‖ ≤ tol·‖v‖ and the
/// returned value must exceed the tolerance, otherwise the kernel basis is
/// rejected.
pub fn gap_above_kernel(a: &SparseMatrix, kernel: &[Vec<C>], opts: &SolverOptions) -> Result<Option<f64>> {
    for (i, v) in kernel.iter().enumerate() {
        let r = norm(&a.apply(v, opts.exec));
        if r > opts.kernel_tol * norm(v).max(f64::MIN_POSITIVE) {
            return Err(Error::InvalidParameter(format!(
                "kernel certificate failed: vector {i} has ‖Av‖/‖v‖ = {:.3e}",
                r / norm(v)
            )));
        }
    }
    let locked = orthonormalize(kernel);
    if locked.len() == a.dim() {
        return Ok(None);
    }
    let pairs = lowest_pairs(a, 1, &locked, opts)?;
    let gap = pairs.values[0];
    if gap <= opts.kernel_tol {
        return Err(Error::InvalidParameter(format!(
            "kernel basis is incomplete: eigenvalue {gap:.3e} remains after deflation"
        )));
    }
    Ok(Some(gap))
}

/// Eigenvalues of `a` up to and including the first one above the kernel
/// tolerance, component by component. Returns (kernel dimension, lowest
/// eigenvalue above tolerance).
pub fn kernel_and_gap(a: &SparseMatrix, opts: &SolverOptions) -> Result<(usize, Option<f64>)> {
    let comps = a.components();
    let inner = SolverOptions {
        exec: Exec::Sequential,
        ..*opts
    };
    let per = opts.exec.map(&comps, |idx| -> Result<(usize, Option<f64>)> {
        let block = a.submatrix(idx);
        block_kernel_and_gap(&block, &inner)
    });
    let mut kernel = 0;
    let mut gap: Option<f64> = None;
    for r in per {
        let (k, g) = r?;
        kernel += k;
        if let Some(g) = g {
            gap = Some(gap.map_or(g, |h: f64| h.min(g)));
        }
    }
    Ok((kernel, gap))
}

fn block_kernel_and_gap(block: &SparseMatrix, opts: &SolverOptions) -> Result<(usize, Option<f64>)> {
    if block.dim() <= opts.dense_limit.max(64) {
        let (vals, _) = dense_eigh(&block.to_dense());
        let k = vals.iter().filter(|&&v| v <= opts.kernel_tol).count();
        return Ok((k, vals.get(k).copied()));
    }
    let mut locked: Vec<Vec<C>> = Vec::new();
    loop {
        if locked.len() == block.dim() {
            return Ok((locked.len(), None));
        }
        let p = lanczos_pairs(block, 1, &locked, opts)?;
        if p.values[0] > opts.kernel_tol {
            return Ok((locked.len(), Some(p.values[0])));
        }
        locked.push(p.vectors[0].clone());
    }
}

/// Lowest eigenvalue over the connected components of `a`.
pub fn ground_energy(a: &SparseMatrix, opts: &SolverOptions) -> Result<Option<f64>> {
    if a.dim() == 0 {
        return Ok(None);
    }
    let comps = a.components();
    let inner = SolverOptions {
        exec: Exec::Sequential,
        ..*opts
    };
    let per = opts.exec.map(&comps, |idx| {
        lowest_pairs(&a.submatrix(idx), 1, &[], &inner).map(|p| p.values[0])
    });
    let mut best = f64::INFINITY;
    for v in per {
        best = best.min(v?);
    }
    Ok(Some(best))
}

/// Kernel basis of a sector matrix, as sparse states.
pub fn sector_kernel(params: &Params, sector: &Sector, opts: &SolverOptions) -> Result<Vec<SparseState>> {
    let (basis, a) = sector_matrix(params, sector, opts)?;
    let comps = a.components();
    let inner = SolverOptions {
        exec: Exec::Sequential,
        ..*opts
    };
    let per = opts.exec.map(&comps, |idx| -> Result<Vec<SparseState>> {
        let block = a.submatrix(idx);
        let local: Vec<Config> = idx.iter().map(|&i| basis[i]).collect();
        let mut vecs = Vec::new();
        if block.dim() <= inner.dense_limit.max(64) {
            let (vals, v) = dense_eigh(&block.to_dense());
            for (c, &val) in vals.iter().enumerate() {
                if val <= inner.kernel_tol {
                    let col: Vec<C> = v.column(c).iter().copied().collect();
                    vecs.push(SparseState::from_dense(&local, &col)?);
                }
            }
        } else {
            let mut locked: Vec<Vec<C>> = Vec::new();
            while locked.len() < block.dim() {
                let p = lanczos_pairs(&block, 1, &locked, &inner)?;
                if p.values[0] > inner.kernel_tol {
                    break;
                }
                vecs.push(SparseState::from_dense(&local, &p.vectors[0])?);
                locked.push(p.vectors[0].clone());
            }
        }
        Ok(vecs)
    });
    let mut out = Vec::new();
    for v in per {
        out.extend(v?);
    }
    Ok(out)
}

/// Sector basis and the Hamiltonian on it, couplings beyond the cap dropped.
pub fn sector_matrix(params: &Params, sector: &Sector, opts: &SolverOptions) -> Result<(Vec<Config>, SparseMatrix)> {
    if params.bc != sector.bc {
        return Err(Error::InvalidParameter("sector and parameters disagree on the boundary".into()));
    }
    let size = sector.size() as usize;
    if size > opts.budget_nnz {
        return Err(Error::Budget {
            needed: size,
            budget: opts.budget_nnz,
        });
    }
    let ham = Hamiltonian::full(*params, sector.len)?;
    let basis = sector.configs();
    let a = hamiltonian::build_matrix_truncated(&basis, &ham, sector.n_max, opts.exec)?;
    if a.nnz() > opts.budget_nnz {
        return Err(Error::Budget {
            needed: a.nnz(),
            budget: opts.budget_nnz,
        });
    }
    Ok((basis, a))
}

/// Lowest `k` eigenvalues of a sector, merged over components.
pub fn sector_spectrum(params: &Params, sector: &Sector, k: usize, opts: &SolverOptions) -> Result<SpectralResult> {
    let (_, a) = sector_matrix(params, sector, opts)?;
    let comps = a.components();
    let inner = SolverOptions {
        exec: Exec::Sequential,
        ..*opts
    };
    let per = opts.exec.map(&comps, |idx| lowest_pairs(&a.submatrix(idx), k, &[], &inner));
    let mut vals: Vec<(f64, f64)> = Vec::new();
    let mut iterative = false;
    for p in per {
        let p = p?;
        iterative |= p.method == Method::Iterative;
        vals.extend(p.values.iter().copied().zip(p.residuals.iter().copied()));
    }
    vals.sort_by(|x, y| x.0.total_cmp(&y.0));
    vals.truncate(k);
    let pairs = EigenPairs {
        values: vals.iter().map(|v| v.0).collect(),
        vectors: vec![],
        residuals: vals.iter().map(|v| v.1).collect(),
        method: if iterative { Method::Iterative } else { Method::Dense },
    };
    Ok(summarize(a.dim(), &pairs, Some(sector.n_max), opts))
}

/// Smallest nonzero eigenvalue over the sectors with at most `max_particles`
/// bosons and occupations capped at `n_max`.
pub fn first_excited_energy(
    params: &Params,
    len: usize,
    max_particles: u32,
    n_max: u8,
    opts: &SolverOptions,
) -> Result<Option<f64>> {
    let mut best: Option<f64> = None;
    for n in 0..=max_particles {
        let sector = Sector::new(len, n, n_max, params.bc)?;
        let (_, a) = sector_matrix(params, &sector, opts)?;
        let (_, gap) = kernel_and_gap(&a, opts)?;
        if let Some(g) = gap {
            best = Some(best.map_or(g, |b: f64| b.min(g)));
        }
    }
    Ok(best)
}

/// Per-class spectral data of a tiling family.
#[derive(Clone, Debug, Serialize)]
pub struct BlockSummary {
    pub root: String,
    pub dim: usize,
    /// Lowest eigenvalue above the BVMD kernel vector (kernel families) or
    /// above the ground energy (other families).
    pub gap: Option<f64>,
    pub ground: f64,
}

/// Minimum block gap of a tiling family together with the per-block data.
#[derive(Clone, Debug, Serialize)]
pub struct SubspaceGap {
    pub schema: u32,
    pub family: String,
    pub len: usize,
    pub gap: Option<f64>,
    pub blocks: Vec<BlockSummary>,
}

/// E₁ of H restricted to the span of a tiling family: for the ground-state
/// families the BVMD vector of each class is certified and deflated.
pub fn subspace_gap(len: usize, params: &Params, family: Family, opts: &SolverOptions) -> Result<SubspaceGap> {
    if params.bc != family.bc() {
        return Err(Error::InvalidParameter(format!(
            "family {family} needs {} parameters",
            family.bc()
        )));
    }
    let ham = Hamiltonian::full(*params, len)?;
    let classes = tiling::classes(len, family)?;
    let inner = SolverOptions {
        exec: Exec::Sequential,
        ..*opts
    };
    let kernel_family = matches!(family, Family::ObcAll { .. } | Family::ObcBulk | Family::Periodic);
    let blocks = opts.exec.map(&classes, |(root, class)| -> Result<BlockSummary> {
        let basis: Vec<Config> = class.iter().map(Tiling::to_config).collect();
        let a = hamiltonian::build_matrix(&basis, &ham, Exec::Sequential)?;
        if kernel_family {
            let psi = states::bvmd_from_class(class, params.lambda)?;
            let v = psi.to_dense(&basis)?;
            let gap = gap_above_kernel(&a, &[v], &inner)?;
            Ok(BlockSummary {
                root: root.to_string(),
                dim: basis.len(),
                gap,
                ground: 0.0,
            })
        } else {
            let p = lowest_pairs(&a, 2, &[], &inner)?;
            Ok(BlockSummary {
                root: root.to_string(),
                dim: basis.len(),
                gap: p.values.get(1).map(|v| v - p.values[0]),
                ground: p.values[0],
            })
        }
    });
    let blocks = blocks.into_iter().collect::<Result<Vec<_>>>()?;
    let gap = blocks
        .iter()
        .filter_map(|b| b.gap)
        .fold(None, |acc: Option<f64>, g| Some(acc.map_or(g, |a| a.min(g))));
    Ok(SubspaceGap {
        schema: 1,
        family: family.to_string(),
        len,
        gap,
        blocks,
    })
}

/// Ground energy of the Hamiltonian closure generated by `seeds`.
#[derive(Clone, Debug, Serialize)]
pub struct ClosureSpectrum {
    pub schema: u32,
    pub configs: Vec<Config>,
    pub eigenvalues: Vec<f64>,
    pub residuals: Vec<f64>,
    pub method: Method,
}

/// Closure of `seeds` under H and its lowest `k` eigenvalues.
pub fn closure_spectrum(
    len: usize,
    params: &Params,
    seeds: &[Config],
    k: usize,
    opts: &SolverOptions,
) -> Result<ClosureSpectrum> {
    let ham = Hamiltonian::full(*params, len)?;
    let configs = hamiltonian::invariant_closure(seeds, &ham, Some(opts.budget_nnz), opts.exec)?;
    let a = hamiltonian::build_matrix(&configs, &ham, opts.exec)?;
    let p = lowest_pairs(&a, k, &[], opts)?;
    Ok(ClosureSpectrum {
        schema: 1,
        configs,
        eigenvalues: p.values,
        residuals: p.residuals,
        method: p.method,
    })
}

/// Lowest eigenvalue on the span of the non-tiling configurations of a sector.
#[derive(Clone, Debug, Serialize)]
pub struct ComplementEnergy {
    pub schema: u32,
    pub energy: f64,
    pub dim: usize,
    pub components: usize,
    pub n_max: u8,
}

/// E₀ of H compressed to the non-tiling configurations of `sector`;
/// `None` when every configuration is a tiling.
pub fn complement_ground_energy(
    params: &Params,
    sector: &Sector,
    opts: &SolverOptions,
) -> Result<Option<ComplementEnergy>> {
    if params.bc != sector.bc {
        return Err(Error::InvalidParameter("sector and parameters disagree on the boundary".into()));
    }
    let size = sector.size() as usize;
    if size > opts.budget_nnz {
        return Err(Error::Budget {
            needed: size,
            budget: opts.budget_nnz,
        });
    }
    let all = sector.configs();
    let flags = opts.exec.map(&all, tiling::is_tiling);
    let mut basis = Vec::new();
    for (c, f) in all.iter().zip(flags) {
        if !f? {
            basis.push(*c);
        }
    }
    if basis.is_empty() {
        return Ok(None);
    }
    let ham = Hamiltonian::full(*params, sector.len)?;
    let allowed: HashSet<Config> = basis.iter().copied().collect();
    let a = compress(&basis, &allowed, &ham, opts.exec)?;
    let components = a.components().len();
    let energy = ground_energy(&a, opts)?.expect("nonempty basis");
    Ok(Some(ComplementEnergy {
        schema: 1,
        energy,
        dim: basis.len(),
        components,
        n_max: sector.n_max,
    }))
}

/// P H P for the coordinate projection P onto `basis`.
fn compress(basis: &[Config], allowed: &HashSet<Config>, ham: &Hamiltonian, exec: Exec) -> Result<SparseMatrix> {
    let index: std::collections::HashMap<Config, usize> =
        basis.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    let rows = exec.map_range(basis.len(), |i| -> Result<Vec<(usize, C)>> {
        let c = &basis[i];
        let mut row = vec![(i, C::new(ham.diagonal(c), 0.0))];
        ham.for_each_offdiagonal(c, |t, v| {
            if allowed.contains(&t) {
                row.push((index[&t], v.conj()));
            }
        })?;
        Ok(row)
    });
    Ok(SparseMatrix::from_rows(rows.into_iter().collect::<Result<_>>()?, true))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fock::Bc;

    fn herm(entries: &[&[f64]]) -> SparseMatrix {
        let rows = entries
            .iter()
            .map(|r| r.iter().enumerate().map(|(j, &v)| (j, C::new(v, 0.0))).collect())
            .collect();
        SparseMatrix::from_rows(rows, true)
    }

    #[test]
    fn monomer_pair_block() {
        let (kappa, lam) = (1.3, C::new(0.0, 0.7));
        let params = Params::new(kappa, lam, Bc::Open).unwrap();
        let ham = Hamiltonian::full(params, 4).unwrap();
        let basis: Vec<Config> = vec!["0200".parse().unwrap(), "1010".parse().unwrap()];
        let a = hamiltonian::build_matrix(&basis, &ham, Exec::Sequential).unwrap();
        let r = eigen_lowest(&a, 2, &SolverOptions::default()).unwrap();
        assert!(r.eigenvalues[0].abs() < 1e-14);
        assert!((r.eigenvalues[1] - kappa * (lam.norm_sqr() + 2.0)).abs() < 1e-12);
        let psi = states::bvmd_state(&"(10)(10)".parse().unwrap(), Family::ObcBulk, lam).unwrap();
        let gap = gap_above_kernel(&a, &[psi.to_dense(&basis).unwrap()], &SolverOptions::default())
            .unwrap()
            .unwrap();
        assert!((gap - kappa * (lam.norm_sqr() + 2.0)).abs() < 1e-12);
    }

    #[test]
    fn bad_kernel_vector_is_rejected() {
        let a = herm(&[&[1.0, 0.0], &[0.0, 2.0]]);
        let v = vec![C::new(1.0, 0.0), ZERO];
        assert!(gap_above_kernel(&a, &[v], &SolverOptions::default()).is_err());
    }

    #[test]
    fn lanczos_agrees_with_dense() {
        let n = 40;
        let mut rows = vec![Vec::new(); n];
        for i in 0..n {
            rows[i].push((i, C::new((i % 7) as f64, 0.0)));
            if i + 1 < n {
                let v = C::new(0.3, 0.1 * i as f64);
                rows[i].push((i + 1, v));
                rows[i + 1].push((i, v.conj()));
            }
        }
        let a = SparseMatrix::from_rows(rows, true);
        let opts = SolverOptions {
            krylov_dim: 12,
            ..SolverOptions::default()
        };
        let d = dense_pairs(&a, 4, &[]).unwrap();
        let l = lanczos_pairs(&a, 4, &[], &opts).unwrap();
        for i in 0..4 {
            assert!((d.values[i] - l.values[i]).abs() < 1e-9);
            assert!(l.residuals[i] < 1e-10);
        }
    }

    #[test]
    fn vacuum_sector_has_no_gap() {
        let params = Params::new(1.0, C::new(0.3, 0.0), Bc::Open).unwrap();
        let sector = Sector::new(5, 0, 2, Bc::Open).unwrap();
        let (_, a) = sector_matrix(&params, &sector, &SolverOptions::default()).unwrap();
        assert_eq!(kernel_and_gap(&a, &SolverOptions::default()).unwrap(), (1, None));
        assert!(complement_ground_energy(&params, &sector, &SolverOptions::default())
            .unwrap()
            .is_none());
    }
}
