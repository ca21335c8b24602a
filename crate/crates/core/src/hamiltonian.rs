//! The truncated dipole-conserving Hamiltonian, its restrictions to
//! intervals, invariant closures and sparse assembly.

use std::collections::{HashMap, HashSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{Bc, Config, SparseState, MAX_OCCUPATION};
use crate::matrix::SparseMatrix;
use crate::tiling;

/// Coupling constants and boundary condition.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub kappa: f64,
    pub lambda: Complex64,
    pub bc: Bc,
}

impl Params {
    /// Requires κ ≥ 0 and λ ≠ 0; see [`Params::degenerate`] for λ = 0.
    pub fn new(kappa: f64, lambda: Complex64, bc: Bc) -> Result<Self> {
        if lambda == Complex64::new(0.0, 0.0) {
            return Err(Error::InvalidParameter(
                "λ = 0 decouples the hopping; use Params::degenerate".into(),
            ));
        }
        Params::degenerate(kappa, lambda, bc)
    }

    /// Like [`Params::new`] but admits λ = 0.
    pub fn degenerate(kappa: f64, lambda: Complex64, bc: Bc) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(Error::InvalidParameter(format!("κ must be finite and ≥ 0, got {kappa}")));
        }
        if !(lambda.re.is_finite() && lambda.im.is_finite()) {
            return Err(Error::InvalidParameter("λ must be finite".into()));
        }
        Ok(Params { kappa, lambda, bc })
    }

    /// λ = |λ| e^{iθ}.
    pub fn polar(kappa: f64, abs_lambda: f64, phase: f64, bc: Bc) -> Result<Self> {
        Params::new(kappa, Complex64::from_polar(abs_lambda, phase), bc)
    }

    /// |λ|².
    pub fn lambda_sq(&self) -> f64 {
        self.lambda.norm_sqr()
    }

    pub fn with_bc(mut self, bc: Bc) -> Self {
        self.bc = bc;
        self
    }
}

/// Σ_bonds w·n_i n_{i+1} + κ Σ_hops w·q_x† q_x with q_x = a_x² − λ a_{x−1} a_{x+1}.
///
/// Bonds are stored by their left slot and hops by their centre slot
/// (0-based); neighbours wrap on periodic chains.
#[derive(Clone, Debug, PartialEq)]
pub struct Hamiltonian {
    params: Params,
    len: usize,
    bonds: Vec<(usize, f64)>,
    hops: Vec<(usize, f64)>,
}

impl Hamiltonian {
    /// The full Hamiltonian of a chain of `len` sites.
    pub fn full(params: Params, len: usize) -> Result<Self> {
        let min = if params.bc == Bc::Periodic { 3 } else { 1 };
        if len < min || len > crate::fock::MAX_SITES {
            return Err(Error::UnsupportedLength {
                len,
                min,
                max: crate::fock::MAX_SITES,
            });
        }
        let (bonds, hops): (Vec<_>, Vec<_>) = match params.bc {
            Bc::Open => ((0..len - 1).collect(), (1..len.saturating_sub(1)).collect()),
            Bc::Periodic => ((0..len).collect(), (0..len).collect()),
        };
        Ok(Hamiltonian {
            params,
            len,
            bonds: bonds.into_iter().map(|b| (b, 1.0)).collect(),
            hops: hops.into_iter().map(|h| (h, 1.0)).collect(),
        })
    }

    /// The open-boundary restriction to sites `first..=last` (1-based) of a
    /// chain of `len` sites.
    pub fn interval(params: Params, len: usize, first: usize, last: usize) -> Result<Self> {
        if first == 0 || first > last || last > len {
            return Err(Error::SiteOutOfRange { site: last, len });
        }
        let mut h = Hamiltonian::empty(params, len);
        h.add_interval(first, last, 1.0)?;
        Ok(h)
    }

    /// The zero operator on a chain of `len` sites.
    pub fn empty(params: Params, len: usize) -> Self {
        Hamiltonian {
            params,
            len,
            bonds: Vec::new(),
            hops: Vec::new(),
        }
    }

    /// Adds `weight · H_[first,last]`.
    pub fn add_interval(&mut self, first: usize, last: usize, weight: f64) -> Result<()> {
        if first == 0 || first > last || last > self.len {
            return Err(Error::SiteOutOfRange {
                site: last,
                len: self.len,
            });
        }
        for x in first..last {
            push_weight(&mut self.bonds, x - 1, weight);
        }
        for x in first + 1..last {
            push_weight(&mut self.hops, x - 1, weight);
        }
        Ok(())
    }

    /// Adds `weight · other`.
    pub fn add(&mut self, other: &Hamiltonian, weight: f64) -> Result<()> {
        if other.len != self.len || other.params != self.params {
            return Err(Error::InvalidParameter(
                "operators act on different chains".into(),
            ));
        }
        for &(b, w) in &other.bonds {
            push_weight(&mut self.bonds, b, w * weight);
        }
        for &(h, w) in &other.hops {
            push_weight(&mut self.hops, h, w * weight);
        }
        Ok(())
    }

    pub fn params(&self) -> &Params {
        &self.params
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.bonds.is_empty() && self.hops.is_empty()
    }

    #[inline]
    fn right(&self, i: usize) -> usize {
        (i + 1) % self.len
    }

    #[inline]
    fn left(&self, i: usize) -> usize {
        (i + self.len - 1) % self.len
    }

    fn check(&self, c: &Config) -> Result<()> {
        if c.len() != self.len || c.bc() != self.params.bc {
            return Err(Error::ShapeMismatch {
                left: format!("{} sites {}", self.len, self.params.bc),
                right: c.to_string(),
            });
        }
        Ok(())
    }

    /// ⟨μ|H|μ⟩.
    pub fn diagonal(&self, c: &Config) -> f64 {
        let r = self.params.lambda_sq();
        let mut e = 0.0;
        for &(b, w) in &self.bonds {
            e += w * (c.get(b) as f64) * (c.get(self.right(b)) as f64);
        }
        for &(x, w) in &self.hops {
            let m = c.get(x) as f64;
            let ml = c.get(self.left(x)) as f64;
            let mr = c.get(self.right(x)) as f64;
            e += w * self.params.kappa * (m * (m - 1.0) + r * ml * mr);
        }
        e
    }

    /// Calls `emit` with every nonzero ⟨ν|H|μ⟩, ν ≠ μ; a target may appear
    /// more than once when hop terms share it.
    pub fn for_each_offdiagonal<F>(&self, c: &Config, mut emit: F) -> Result<()>
    where
        F: FnMut(Config, Complex64),
    {
        let lam = self.params.lambda;
        if lam == Complex64::new(0.0, 0.0) || self.params.kappa == 0.0 {
            return Ok(());
        }
        for &(x, w) in &self.hops {
            let (l, r) = (self.left(x), self.right(x));
            let (m, ml, mr) = (c.get(x), c.get(l), c.get(r));
            let k = w * self.params.kappa;
            if m >= 2 {
                if ml >= MAX_OCCUPATION || mr >= MAX_OCCUPATION {
                    return Err(overflow(ml.max(mr)));
                }
                let mut t = *c;
                t.set(x, m - 2);
                t.set(l, ml + 1);
                t.set(r, mr + 1);
                let amp = (m as f64 * (m as f64 - 1.0) * (ml as f64 + 1.0) * (mr as f64 + 1.0)).sqrt();
                emit(t, -k * lam.conj() * amp);
            }
            if ml >= 1 && mr >= 1 {
                if m + 2 > MAX_OCCUPATION {
                    return Err(overflow(m + 1));
                }
                let mut t = *c;
                t.set(x, m + 2);
                t.set(l, ml - 1);
                t.set(r, mr - 1);
                let amp = (ml as f64 * mr as f64 * (m as f64 + 1.0) * (m as f64 + 2.0)).sqrt();
                emit(t, -k * lam * amp);
            }
        }
        Ok(())
    }

    /// Configurations reachable from `c` in one step.
    pub fn neighbours(&self, c: &Config) -> Result<Vec<Config>> {
        let mut out = Vec::new();
        self.for_each_offdiagonal(c, |t, _| out.push(t))?;
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// H|ψ⟩ using the closed-form matrix elements.
    pub fn apply(&self, psi: &SparseState) -> Result<SparseState> {
        self.apply_with(psi, Exec::Sequential)
    }

    pub fn apply_with(&self, psi: &SparseState, exec: Exec) -> Result<SparseState> {
        if psi.len() != self.len || psi.bc() != self.params.bc {
            return Err(Error::ShapeMismatch {
                left: format!("{} sites {}", self.len, self.params.bc),
                right: format!("{} sites {}", psi.len(), psi.bc()),
            });
        }
        let terms: Vec<(Config, Complex64)> = psi.iter().map(|(c, a)| (*c, *a)).collect();
        let parts = exec.map(&terms, |(c, a)| {
            let mut local = Vec::new();
            local.push((*c, a * self.diagonal(c)));
            self.for_each_offdiagonal(c, |t, v| local.push((t, v * a)))
                .map(|_| local)
        });
        let mut out = SparseState::zero(self.len, self.params.bc);
        for part in parts {
            for (t, v) in part? {
                out.add_unchecked(t, v);
            }
        }
        Ok(out)
    }

    /// H|ψ⟩ assembled as Σ n n + κ Σ q†(q ψ) from ladder operators; an
    /// independent route to [`Hamiltonian::apply`].
    pub fn apply_two_pass(&self, psi: &SparseState) -> Result<SparseState> {
        let mut out = SparseState::zero(self.len, self.params.bc);
        for (c, a) in psi.iter() {
            self.check(c)?;
            let mut e = 0.0;
            for &(b, w) in &self.bonds {
                e += w * (c.get(b) as f64) * (c.get(self.right(b)) as f64);
            }
            out.add_unchecked(*c, a * e);
        }
        for &(x, w) in &self.hops {
            let (l, r) = (self.left(x), self.right(x));
            let q = q_slot(psi, x, l, r, self.params.lambda)?;
            let back = q_adjoint_slot(&q, x, l, r, self.params.lambda)?;
            out.axpy(Complex64::new(w * self.params.kappa, 0.0), &back)?;
        }
        Ok(out)
    }

    /// ⟨ψ|H|ψ⟩ / ⟨ψ|ψ⟩.
    pub fn rayleigh(&self, psi: &SparseState) -> Result<f64> {
        let h = self.apply(psi)?;
        Ok(psi.inner(&h)?.re / psi.norm_sqr())
    }
}

fn push_weight(list: &mut Vec<(usize, f64)>, slot: usize, w: f64) {
    match list.iter_mut().find(|(s, _)| *s == slot) {
        Some(e) => e.1 += w,
        None => list.push((slot, w)),
    }
}

fn overflow(v: u8) -> Error {
    Error::OccupationOverflow {
        value: v as u32 + 1,
        limit: MAX_OCCUPATION,
    }
}

fn hop_slots(len: usize, bc: Bc, site: usize) -> Result<(usize, usize, usize)> {
    let valid = match bc {
        Bc::Open => site >= 2 && site < len,
        Bc::Periodic => site >= 1 && site <= len && len >= 3,
    };
    if !valid {
        return Err(Error::SiteOutOfRange { site, len });
    }
    let x = site - 1;
    Ok(((x + len - 1) % len, x, (x + 1) % len))
}

fn q_slot(psi: &SparseState, x: usize, l: usize, r: usize, lambda: Complex64) -> Result<SparseState> {
    let mut out = SparseState::zero(psi.len(), psi.bc());
    for (c, a) in psi.iter() {
        let m = c.get(x) as f64;
        if m >= 2.0 {
            let mut t = *c;
            t.set(x, c.get(x) - 2);
            out.add_unchecked(t, a * (m * (m - 1.0)).sqrt());
        }
        let (ml, mr) = (c.get(l), c.get(r));
        if ml >= 1 && mr >= 1 {
            let mut t = *c;
            t.set(l, ml - 1);
            t.set(r, mr - 1);
            out.add_unchecked(t, -lambda * a * ((ml as f64) * (mr as f64)).sqrt());
        }
    }
    Ok(out)
}

fn q_adjoint_slot(psi: &SparseState, x: usize, l: usize, r: usize, lambda: Complex64) -> Result<SparseState> {
    let mut out = SparseState::zero(psi.len(), psi.bc());
    for (c, a) in psi.iter() {
        let m = c.get(x);
        if m + 2 > MAX_OCCUPATION {
            return Err(overflow(m + 1));
        }
        let mut t = *c;
        t.set(x, m + 2);
        out.add_unchecked(t, a * ((m as f64 + 1.0) * (m as f64 + 2.0)).sqrt());
        let (ml, mr) = (c.get(l), c.get(r));
        if ml >= MAX_OCCUPATION || mr >= MAX_OCCUPATION {
            return Err(overflow(ml.max(mr)));
        }
        let mut t = *c;
        t.set(l, ml + 1);
        t.set(r, mr + 1);
        out.add_unchecked(
            t,
            -lambda.conj() * a * ((ml as f64 + 1.0) * (mr as f64 + 1.0)).sqrt(),
        );
    }
    Ok(out)
}

/// q_site |ψ⟩ for a 1-based centre site with both neighbours on the chain.
pub fn apply_qx(psi: &SparseState, site: usize, lambda: Complex64) -> Result<SparseState> {
    let (l, x, r) = hop_slots(psi.len(), psi.bc(), site)?;
    q_slot(psi, x, l, r, lambda)
}

/// q_site† |ψ⟩.
pub fn apply_qx_adjoint(psi: &SparseState, site: usize, lambda: Complex64) -> Result<SparseState> {
    let (l, x, r) = hop_slots(psi.len(), psi.bc(), site)?;
    q_adjoint_slot(psi, x, l, r, lambda)
}

/// Σ n_x n_{x+1} over the bonds of the configuration's own chain.
pub fn electrostatic_energy(c: &Config) -> f64 {
    let n = c.len();
    let bonds = match c.bc() {
        Bc::Open => n.saturating_sub(1),
        Bc::Periodic if n >= 2 => n,
        Bc::Periodic => 0,
    };
    (0..bonds)
        .map(|i| c.get(i) as f64 * c.get((i + 1) % n) as f64)
        .sum()
}

/// Smallest set containing `seeds` and closed under the off-diagonal
/// couplings of `ham`, sorted.
pub fn invariant_closure(
    seeds: &[Config],
    ham: &Hamiltonian,
    budget: Option<usize>,
    exec: Exec,
) -> Result<Vec<Config>> {
    let mut seen: HashSet<Config> = HashSet::new();
    let mut frontier = Vec::new();
    for s in seeds {
        ham.check(s)?;
        if seen.insert(*s) {
            frontier.push(*s);
        }
    }
    while !frontier.is_empty() {
        let found = exec.map(&frontier, |c| ham.neighbours(c));
        let mut next = Vec::new();
        for list in found {
            for t in list? {
                if seen.insert(t) {
                    next.push(t);
                }
            }
        }
        if let Some(b) = budget {
            if seen.len() > b {
                return Err(Error::Budget {
                    needed: seen.len(),
                    budget: b,
                });
            }
        }
        frontier = next;
    }
    let mut out: Vec<Config> = seen.into_iter().collect();
    out.sort();
    Ok(out)
}

/// Sparse matrix of `ham` on `basis`. Every coupling must stay inside the
/// basis; otherwise [`Error::NotInvariant`] names the leaking pair.
pub fn build_matrix(basis: &[Config], ham: &Hamiltonian, exec: Exec) -> Result<SparseMatrix> {
    assemble(basis, ham, exec, None)
}

/// Like [`build_matrix`] but drops couplings to configurations whose
/// maximal occupation exceeds `n_max`. Any other leak is still an error.
pub fn build_matrix_truncated(
    basis: &[Config],
    ham: &Hamiltonian,
    n_max: u8,
    exec: Exec,
) -> Result<SparseMatrix> {
    assemble(basis, ham, exec, Some(n_max))
}

fn assemble(
    basis: &[Config],
    ham: &Hamiltonian,
    exec: Exec,
    cap: Option<u8>,
) -> Result<SparseMatrix> {
    for c in basis {
        ham.check(c)?;
    }
    let index: HashMap<Config, usize> = basis.iter().enumerate().map(|(i, c)| (*c, i)).collect();
    if index.len() != basis.len() {
        return Err(Error::InvalidParameter("basis contains duplicates".into()));
    }
    // Row i holds conj of the column H|μ_i⟩, so A_ij = ⟨μ_i|H|μ_j⟩.
    let rows = exec.map_range(basis.len(), |i| {
        let c = &basis[i];
        let mut row = vec![(i, Complex64::new(ham.diagonal(c), 0.0))];
        let mut leak = None;
        ham.for_each_offdiagonal(c, |t, v| match index.get(&t) {
            Some(&j) => row.push((j, v.conj())),
            None if cap.is_some_and(|n| t.max_occupation() > n) => {}
            None => {
                leak.get_or_insert(t);
            }
        })?;
        match leak {
            Some(to) => Err(Error::NotInvariant { from: *c, to }),
            None => Ok(row),
        }
    });
    let rows = rows.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(SparseMatrix::from_rows(rows, true))
}

/// Obstruction classes for configurations outside every tiling.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NonTilingClass {
    /// Two adjacent occupied sites.
    AdjacentPair,
    /// A site (interior, for open chains) holding three or more bosons.
    Overfilled,
    /// Two doubly occupied sites three apart.
    DimerPair,
    /// A doubly occupied site with an occupied next-nearest neighbour.
    NextNearest,
    /// An open-chain end whose next-nearest pair weighs two or more.
    Edge,
}

impl NonTilingClass {
    /// Position in the evaluation order, starting at 1.
    pub fn index(self) -> u8 {
        self as u8 + 1
    }
}

impl fmt::Display for NonTilingClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "S{}", self.index())
    }
}

/// First obstruction class containing `c`; fails on tiling configurations.
pub fn classify_nontiling(c: &Config) -> Result<NonTilingClass> {
    let n = c.len();
    match c.bc() {
        Bc::Periodic if n < 8 => {
            return Err(Error::UnsupportedLength {
                len: n,
                min: 8,
                max: crate::fock::MAX_SITES,
            })
        }
        Bc::Open if n < 5 => {
            return Err(Error::UnsupportedLength {
                len: n,
                min: 5,
                max: crate::fock::MAX_SITES,
            })
        }
        _ => {}
    }
    if tiling::is_tiling(c)? {
        return Err(Error::IsTiling { config: *c });
    }
    let at = |site: isize| c.occ(site);
    let len = n as isize;
    let class = match c.bc() {
        Bc::Periodic => {
            let sites = 1..=len;
            if sites.clone().any(|x| at(x) * at(x + 1) >= 1) {
                Some(NonTilingClass::AdjacentPair)
            } else if sites.clone().any(|x| at(x) >= 3) {
                Some(NonTilingClass::Overfilled)
            } else if sites.clone().any(|x| at(x) == 2 && at(x + 3) == 2) {
                Some(NonTilingClass::DimerPair)
            } else if sites.clone().any(|x| at(x) as u32 * at(x + 2) as u32 >= 2) {
                Some(NonTilingClass::NextNearest)
            } else {
                None
            }
        }
        Bc::Open => {
            if (1..len).any(|x| at(x) * at(x + 1) >= 1) {
                Some(NonTilingClass::AdjacentPair)
            } else if (2..len).any(|x| at(x) >= 3) {
                Some(NonTilingClass::Overfilled)
            } else if (1..=len - 3).any(|x| at(x).min(at(x + 3)) == 2) {
                Some(NonTilingClass::DimerPair)
            } else if (2..len).any(|x| at(x) == 2 && at(x - 2).max(at(x + 2)) >= 1) {
                Some(NonTilingClass::NextNearest)
            } else if at(1) as u32 * at(3) as u32 >= 2 || at(len - 2) as u32 * at(len) as u32 >= 2 {
                Some(NonTilingClass::Edge)
            } else {
                None
            }
        }
    };
    class.ok_or_else(|| {
        Error::InvalidParameter(format!("{c} violates a tiling condition but fits no class"))
    })
}
