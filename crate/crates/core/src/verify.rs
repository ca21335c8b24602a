//! The acceptance criteria as runnable checks. Each criterion returns its
//! sub-checks with measured values; informational sub-checks never decide
//! the outcome.

use std::f64::consts::PI;
use std::fmt;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::bounds::{self, FVariant};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::fock::{Bc, Config, Sector, SparseState};
use crate::hamiltonian::{self, Hamiltonian, Params};
use crate::spectra::{self, SolverOptions};
use crate::states::{self, Ansatz};
use crate::tiling::{self, Family, Tiling};
use crate::tolerances as tol;

type C = Complex64;

/// Parameter overrides for a suite run; `None` selects the criterion's own grid.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub lens: Option<Vec<usize>>,
    pub kappas: Option<Vec<f64>>,
    pub abs_lambdas: Option<Vec<f64>>,
    /// Drops default chain lengths above this.
    pub lmax: Option<usize>,
    /// Phase of λ; the physical sign is π.
    pub phase: f64,
    /// Smaller default grids.
    pub quick: bool,
}

impl Default for Grid {
    fn default() -> Self {
        Grid {
            lens: None,
            kappas: None,
            abs_lambdas: None,
            lmax: None,
            phase: PI,
            quick: false,
        }
    }
}

impl Grid {
    pub fn quick() -> Self {
        Grid {
            quick: true,
            ..Grid::default()
        }
    }

    fn lens(&self, full: RangeInclusive<usize>, quick: RangeInclusive<usize>) -> Vec<usize> {
        let default = if self.quick { quick } else { full };
        match &self.lens {
            Some(v) => v.clone(),
            None => default.filter(|&l| self.lmax.is_none_or(|m| l <= m)).collect(),
        }
    }

    fn kappas(&self, default: &[f64]) -> Vec<f64> {
        self.kappas.clone().unwrap_or_else(|| default.to_vec())
    }

    fn lambdas(&self, default: &[f64]) -> Vec<f64> {
        self.abs_lambdas.clone().unwrap_or_else(|| default.to_vec())
    }

    fn params(&self, kappa: f64, abs_lambda: f64, bc: Bc) -> Result<Params> {
        Params::polar(kappa, abs_lambda, self.phase, bc)
    }
}

/// One measured sub-check.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub informational: bool,
    pub detail: String,
}

impl Check {
    fn new(name: &str, passed: bool, detail: String) -> Self {
        Check {
            name: name.into(),
            passed,
            informational: false,
            detail,
        }
    }

    fn info(name: &str, passed: bool, detail: String) -> Self {
        Check {
            informational: true,
            ..Check::new(name, passed, detail)
        }
    }
}

/// A criterion and its sub-checks.
#[derive(Clone, Debug, Serialize)]
pub struct Criterion {
    pub id: String,
    pub title: String,
    pub checks: Vec<Check>,
    pub seconds: f64,
}

impl Criterion {
    pub fn passed(&self) -> bool {
        self.checks.iter().filter(|c| !c.informational).all(|c| c.passed)
    }

    fn failed(id: &str, title: &str, err: Error) -> Self {
        Criterion {
            id: id.into(),
            title: title.into(),
            checks: vec![Check::new("run", false, format!("error: {err}"))],
            seconds: 0.0,
        }
    }
}

impl fmt::Display for Criterion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        write!(f, "{} {status} {} ({:.1}s)", self.id, self.title, self.seconds)?;
        for c in &self.checks {
            let tag = match (c.informational, c.passed) {
                (true, _) => "info",
                (false, true) => "ok",
                (false, false) => "FAILED",
            };
            write!(f, "\n    [{tag}] {}: {}", c.name, c.detail)?;
        }
        Ok(())
    }
}

/// Named groups of criteria.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Gss,
    Martingale,
    Electro,
    Knabe,
    Excited,
    Scars,
    All,
}

impl Suite {
    pub fn criteria(self) -> &'static [&'static str] {
        match self {
            Suite::Gss => &["AC-1", "AC-2", "AC-3", "AC-4"],
            Suite::Martingale => &["AC-5", "AC-7"],
            Suite::Electro => &["AC-6", "AC-8", "AC-12"],
            Suite::Knabe => &["AC-9"],
            Suite::Excited => &["AC-10"],
            Suite::Scars => &["AC-11"],
            Suite::All => &[
                "AC-1", "AC-2", "AC-3", "AC-4", "AC-5", "AC-6", "AC-7", "AC-8", "AC-9", "AC-10", "AC-11", "AC-12",
                "AC-13",
            ],
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "gss" => Suite::Gss,
            "martingale" => Suite::Martingale,
            "electro" => Suite::Electro,
            "knabe" => Suite::Knabe,
            "excited" => Suite::Excited,
            "scars" => Suite::Scars,
            "all" => Suite::All,
            _ => {
                return Err(Error::Parse {
                    input: s.into(),
                    reason: "unknown suite".into(),
                })
            }
        })
    }
}

type Runner = fn(&Grid, &SolverOptions) -> Result<Vec<Check>>;

fn lookup(id: &str) -> Option<(&'static str, Runner)> {
    Some(match id {
        "AC-1" => ("ground space equals the BVMD span", ac1 as Runner),
        "AC-2" => ("periodic ground-space dimension", ac2),
        "AC-3" => ("closed-form blocks", ac3),
        "AC-4" => ("norm recursion and β", ac4),
        "AC-5" => ("f below 1/3 and f_n against the projector", ac5),
        "AC-6" => ("open-chain gap bounds", ac6),
        "AC-7" => ("martingale conditions", ac7),
        "AC-8" => ("electrostatic complement bounds", ac8),
        "AC-9" => ("finite-size criterion", ac9),
        "AC-10" => ("excited-state expansion", ac10),
        "AC-11" => ("scar eigenstates", ac11),
        "AC-12" => ("Yrast bound", ac12),
        "AC-13" => ("conservation laws and gauge invariance", ac13),
        _ => return None,
    })
}

/// Runs one criterion by id ("AC-1" … "AC-13").
pub fn run_criterion(id: &str, grid: &Grid, opts: &SolverOptions) -> Result<Criterion> {
    let (title, runner) = lookup(id).ok_or_else(|| Error::Parse {
        input: id.into(),
        reason: "unknown criterion".into(),
    })?;
    let start = std::time::Instant::now();
    let mut crit = match runner(grid, opts) {
        Ok(checks) => Criterion {
            id: id.into(),
            title: title.into(),
            checks,
            seconds: 0.0,
        },
        Err(e) => Criterion::failed(id, title, e),
    };
    crit.seconds = start.elapsed().as_secs_f64();
    Ok(crit)
}

pub fn run_suite(suite: Suite, grid: &Grid, opts: &SolverOptions) -> Result<Vec<Criterion>> {
    suite.criteria().iter().map(|id| run_criterion(id, grid, opts)).collect()
}

fn fmt_params(p: &Params) -> String {
    format!("κ={} |λ|={:.4}", p.kappa, p.lambda.norm())
}

/// Kernel dimension of every small open sector equals the number of BVMD
/// roots, and every kernel vector lies in the BVMD span.
pub fn ac1(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for kappa in grid.kappas(&[1.0]) {
        for abs in grid.lambdas(&[0.5]) {
            let params = grid.params(kappa, abs, Bc::Open)?;
            let mut mismatches = Vec::new();
            let mut worst_span: f64 = 0.0;
            let mut total = 0;
            for len in grid.lens(5..=9, 5..=7) {
                for particles in 0..=4u32 {
                    let cap = particles.max(2) as u8;
                    let sector = Sector::new(len, particles, cap, Bc::Open)?;
                    let kernel = spectra::sector_kernel(&params, &sector, opts)?;
                    let roots: Vec<Tiling> = tiling::enumerate_roots(len, Family::ObcAll { n_cap: cap })?
                        .into_iter()
                        .filter(|r| r.to_config().particle_number() == particles)
                        .collect();
                    total += kernel.len();
                    if kernel.len() != roots.len() {
                        mismatches.push(format!("L={len} N={particles}: {} vs {}", kernel.len(), roots.len()));
                        continue;
                    }
                    let basis = sector.configs();
                    let bvmd: Vec<Vec<C>> = roots
                        .iter()
                        .map(|r| {
                            states::bvmd_state(r, Family::ObcAll { n_cap: cap }, params.lambda)?.to_dense(&basis)
                        })
                        .collect::<Result<_>>()?;
                    let span = spectra::orthonormalize(&bvmd);
                    if span.len() != roots.len() {
                        mismatches.push(format!("L={len} N={particles}: BVMD states are dependent"));
                    }
                    for v in &kernel {
                        let mut x = v.normalized()?.to_dense(&basis)?;
                        for q in &span {
                            let c: C = q.iter().zip(&x).map(|(a, b)| a.conj() * b).sum();
                            for (xi, qi) in x.iter_mut().zip(q) {
                                *xi -= c * qi;
                            }
                        }
                        let rest = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
                        worst_span = worst_span.max(rest);
                    }
                }
            }
            let label = fmt_params(&params);
            checks.push(Check::new(
                &format!("kernel dimension = root count ({label})"),
                mismatches.is_empty(),
                if mismatches.is_empty() {
                    format!("{total} kernel vectors, all counts match")
                } else {
                    mismatches.join("; ")
                },
            ));
            checks.push(Check::new(
                &format!("kernel inside BVMD span ({label})"),
                worst_span <= tol::KERNEL_SPAN,
                format!("max distance {worst_span:.2e} (limit {:.0e})", tol::KERNEL_SPAN),
            ));
        }
    }
    Ok(checks)
}

/// Summed periodic kernel dimension is r_L + r_{L−2}.
pub fn ac2(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for kappa in grid.kappas(&[1.0]) {
        for abs in grid.lambdas(&[0.5]) {
            let params = grid.params(kappa, abs, Bc::Periodic)?;
            let mut rows = Vec::new();
            let mut ok = true;
            for len in grid.lens(4..=10, 4..=8) {
                let mut kernel = 0;
                for particles in 0..=(len / 2 + 1) as u32 {
                    let cap = particles.clamp(1, 4) as u8;
                    let sector = Sector::new(len, particles, cap, Bc::Periodic)?;
                    let (_, a) = spectra::sector_matrix(&params, &sector, opts)?;
                    kernel += spectra::kernel_and_gap(&a, opts)?.0;
                }
                let formula = tiling::count_roots(len) + tiling::count_roots(len - 2);
                let listed = tiling::enumerate_roots(len, Family::Periodic)?.len() as u128;
                ok &= kernel as u128 == formula && listed == formula;
                rows.push(format!("L={len}: {kernel}/{formula}/{listed}"));
            }
            checks.push(Check::new(
                &format!("kernel = r_L + r_(L-2) = enumerated roots ({})", fmt_params(&params)),
                ok,
                rows.join(", "),
            ));
        }
    }
    Ok(checks)
}

fn class_matrix(root: &str, family: Family, params: &Params) -> Result<(Vec<Config>, crate::SparseMatrix, SparseState)> {
    let root: Tiling = root.parse()?;
    let class = tiling::expand_class(&root, family)?;
    let basis: Vec<Config> = class.iter().map(Tiling::to_config).collect();
    let ham = Hamiltonian::full(*params, root.len())?;
    let a = hamiltonian::build_matrix(&basis, &ham, Exec::Sequential)?;
    let psi = states::bvmd_from_class(&class, params.lambda)?;
    Ok((basis, a, psi))
}

/// Edge, monomer-pair and three-monomer blocks against their closed forms.
pub fn ac3(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let (mut edge, mut mm, mut three): (f64, f64, f64) = (0.0, 0.0, 0.0);
    let mut dims_ok = true;
    let kappas = grid.kappas(&[0.5, 1.0, 2.0, 8.0]);
    let lambdas = grid.lambdas(&[0.05, 0.2, 0.5, 1.0]);
    for &kappa in &kappas {
        for &abs in &lambdas {
            let params = grid.params(kappa, abs, Bc::Open)?;
            let r = params.lambda_sq();
            let seed: Config = "20100".parse()?;
            let block = spectra::closure_spectrum(5, &params, &[seed], 2, opts)?;
            dims_ok &= block.configs.len() == 2;
            let (em, ep) = bounds::edge_eigenvalues(kappa, r);
            edge = edge.max((block.eigenvalues[0] - em).abs()).max((block.eigenvalues[1] - ep).abs());

            for (root, want, slot) in [
                ("(10)(10)", kappa * (r + 2.0), &mut mm),
                ("(10)(10)(10)", 2.0 * kappa, &mut three),
            ] {
                let (basis, a, psi) = class_matrix(root, Family::ObcBulk, &params)?;
                let gap = spectra::gap_above_kernel(&a, &[psi.to_dense(&basis)?], opts)?
                    .ok_or(Error::ZeroVector)?;
                let direct = spectra::eigen_lowest(&a, 2, opts)?;
                *slot = slot.max((gap - want).abs()).max((direct.eigenvalues[1] - want).abs());
            }
        }
    }
    let points = kappas.len() * lambdas.len();
    Ok(vec![
        Check::new(
            "edge block = E±",
            dims_ok && edge <= tol::CLOSED_FORM,
            format!("{points} points, max error {edge:.2e}, closure of 20100 has dimension 2: {dims_ok}"),
        ),
        Check::new(
            "MM block gap = κ(|λ|²+2)",
            mm <= tol::CLOSED_FORM,
            format!("{points} points, max error {mm:.2e}"),
        ),
        Check::new(
            "three-monomer block gap = 2κ",
            three <= tol::CLOSED_FORM,
            format!("{points} points, max error {three:.2e}"),
        ),
    ])
}

/// Norm recursion against the Binet form, and β from three routes.
pub fn ac4(grid: &Grid, _opts: &SolverOptions) -> Result<Vec<Check>> {
    let (mut norm_err, mut beta_err): (f64, f64) = (0.0, 0.0);
    for abs in grid.lambdas(&[0.1, 1.0, 3.0]) {
        let r = abs * abs;
        let seq = states::norm_sequence(r, 50);
        let frac = bounds::beta_sequence(r, 50);
        for n in 0..=50 {
            let closed = states::norm_closed_form(r, n);
            norm_err = norm_err.max((seq[n] - closed).abs() / closed);
            if n >= 1 {
                let binet = states::norm_closed_form(r, n - 1) / closed;
                beta_err = beta_err
                    .max((states::beta(r, n) - binet).abs())
                    .max((frac[n] - binet).abs());
            }
        }
    }
    Ok(vec![
        Check::new(
            "a_n recursion = closed form",
            norm_err <= tol::RECURSION,
            format!("n ≤ 50, max relative error {norm_err:.2e}"),
        ),
        Check::new(
            "β_n ratio = Binet ratio = continued fraction",
            beta_err <= tol::RECURSION,
            format!("n ≤ 50, max error {beta_err:.2e}"),
        ),
    ])
}

/// Scans f over the s-grid; returns (max value, first s with f ≥ 1/3).
pub fn f_scan(variant: FVariant) -> (f64, Option<f64>) {
    let steps = (tol::F_GRID_MAX / tol::F_GRID_STEP).round() as usize;
    let mut worst: f64 = 0.0;
    let mut first = None;
    for i in 0..=steps {
        let s = i as f64 * tol::F_GRID_STEP;
        let v = bounds::f_value(s, variant);
        worst = worst.max(v);
        if first.is_none() && v >= tol::F_THRESHOLD {
            first = Some(s);
        }
    }
    (worst, first)
}

/// Largest |projector − analytic| and where it occurs.
fn brute_force_error(variant: FVariant, lambdas: &[f64], phase: f64, opts: &SolverOptions) -> Result<(f64, String)> {
    let mut worst: f64 = 0.0;
    let mut at = String::new();
    for &abs in lambdas {
        let lambda = C::from_polar(abs, phase);
        let s = abs * abs / 2.0;
        for n in 4..=8 {
            for kind in 1..=2u8 {
                let numeric = bounds::f_n_projector(n, kind, lambda, opts)?;
                let analytic = bounds::f_n(n, s, variant);
                let err = (numeric - analytic).abs();
                if err > worst {
                    worst = err;
                    at = format!("n={n} i={kind} |λ|={abs} (projector {numeric:.6e}, formula {analytic:.6e})");
                }
            }
        }
    }
    Ok((worst, at))
}

pub fn ac5(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let describe = |(worst, first): (f64, Option<f64>)| match first {
        Some(s) => format!("max {worst:.6} on [0, {}]; f ≥ 1/3 from s = {s:.3}", tol::F_GRID_MAX),
        None => format!("max {worst:.6} on [0, {}]", tol::F_GRID_MAX),
    };
    let thm = f_scan(FVariant::Theorem);
    checks.push(Check::new("f < 1/3 on the grid (theorem form)", thm.1.is_none(), describe(thm)));
    let zero = [FVariant::Theorem, FVariant::Proof, FVariant::Exact]
        .iter()
        .all(|&v| bounds::f_value(0.0, v) == 0.0);
    checks.push(Check::new("f(0) = 0", zero, "all three forms vanish exactly".into()));
    let lambdas = grid.lambdas(&[0.5, 1.0, 2.0]);
    let (err, at) = brute_force_error(FVariant::Proof, &lambdas, grid.phase, opts)?;
    checks.push(Check::new(
        "f_n (proof form) = projector norm, n ∈ [4, 8]",
        err <= tol::F_BRUTE_FORCE,
        format!("max error {err:.3e} at {at}"),
    ));
    let exact = f_scan(FVariant::Exact);
    checks.push(Check::info("f < 1/3 on the grid (exact form)", exact.1.is_none(), describe(exact)));
    let proof = f_scan(FVariant::Proof);
    checks.push(Check::info("f < 1/3 on the grid (proof form)", proof.1.is_none(), describe(proof)));
    let (err, at) = brute_force_error(FVariant::Exact, &lambdas, grid.phase, opts)?;
    checks.push(Check::info(
        "f_n (exact form) = projector norm, n ∈ [4, 8]",
        err <= tol::F_BRUTE_FORCE,
        format!("max error {err:.3e} at {at}"),
    ));
    Ok(checks)
}

/// Open-chain bounds: the tiling-space gap and the full first excited energy.
pub fn ac6(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut tiling_rows = Vec::new();
    let mut full_rows = Vec::new();
    let (mut tiling_ok, mut full_ok, mut conv_ok) = (true, true, true);
    let mut conv_worst: f64 = 0.0;
    let lens = grid.lens(7..=11, 7..=9);
    for kappa in grid.kappas(&[0.5, 1.0, 2.0]) {
        for abs in grid.lambdas(&[0.05, 0.2, 0.5]) {
            let params = grid.params(kappa, abs, Bc::Open)?;
            let rhs = bounds::theorem_rhs(kappa, abs * abs, FVariant::Theorem);
            let mut min_tiling = f64::INFINITY;
            let mut min_full = f64::INFINITY;
            for &len in &lens {
                let sub = spectra::subspace_gap(len, &params, Family::ObcBulk, opts)?;
                let gap = sub.gap.unwrap_or(f64::INFINITY);
                min_tiling = min_tiling.min(gap);
                tiling_ok &= gap >= rhs.tiling - tol::ONE_SIDED;

                let cap_n = (len / 2 + 2) as u32;
                let e6 = spectra::first_excited_energy(&params, len, cap_n, 6, opts)?.unwrap_or(f64::INFINITY);
                let e5 = spectra::first_excited_energy(&params, len, cap_n, 5, opts)?.unwrap_or(f64::INFINITY);
                let diff = (e6 - e5).abs();
                conv_worst = conv_worst.max(diff);
                conv_ok &= diff < tol::CAP_CONVERGENCE;
                min_full = min_full.min(e6);
                full_ok &= rhs.hypothesis_ok && e6 >= rhs.obc - tol::ONE_SIDED;
            }
            tiling_rows.push(format!("κ={kappa} |λ|={abs}: {min_tiling:.5} ≥ {:.5}", rhs.tiling));
            full_rows.push(format!("κ={kappa} |λ|={abs}: {min_full:.6} ≥ {:.6}", rhs.obc));
        }
    }
    let lens_text = format!("L ∈ {:?}", lens);
    Ok(vec![
        Check::new(
            "E₁(bulk tiling space) ≥ (2κ/3)(1−√(3f))²",
            tiling_ok,
            format!("{lens_text}; min over L: {}", tiling_rows.join("; ")),
        ),
        Check::new(
            "E₁(open chain) ≥ open-chain theorem bound",
            full_ok,
            format!("{lens_text}, N ≤ ⌊L/2⌋+2, n_max = 6; {}", full_rows.join("; ")),
        ),
        Check::new(
            "E₁ converged in n_max (5 → 6)",
            conv_ok,
            format!("max change {conv_worst:.2e} (limit {:.0e})", tol::CAP_CONVERGENCE),
        ),
    ])
}

pub fn ac7(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let mut info = Vec::new();
    for kappa in grid.kappas(&[0.5, 1.0]) {
        for abs in grid.lambdas(&[0.2, 0.5, 1.0]) {
            let params = grid.params(kappa, abs, Bc::Open)?;
            let mut fails = Vec::new();
            let mut worst_overlap: f64 = 0.0;
            let mut worst_comm: f64 = 0.0;
            let mut min_gap = f64::INFINITY;
            let mut sandwich: f64 = f64::INFINITY;
            let mut f = 0.0;
            let mut squared = true;
            for len in grid.lens(7..=10, 7..=8) {
                let rep = bounds::martingale_check(len, &params, opts.exec)?;
                if !rep.passed() {
                    fails.push(format!("L={len}: {}", rep.failures.join(", ")));
                }
                worst_overlap = worst_overlap.max(rep.overlap);
                worst_comm = worst_comm.max(rep.commutator);
                min_gap = min_gap.min(rep.local_gap);
                sandwich = sandwich.min(rep.lower_sandwich).min(rep.upper_sandwich);
                f = rep.f;
                squared &= rep.overlap_sq_below_f;
            }
            checks.push(Check::new(
                &format!("conditions 1–3 and sandwich ({})", fmt_params(&params)),
                fails.is_empty(),
                if fails.is_empty() {
                    format!(
                        "min local gap {min_gap:.6} ≥ 2κ, max commutator {worst_comm:.1e}, max ‖gE‖ {worst_overlap:.4e} ≤ √f = {:.4e}, sandwich min eig {sandwich:.1e}",
                        f.sqrt()
                    )
                } else {
                    fails.join("; ")
                },
            ));
            info.push(format!("κ={kappa} |λ|={abs}: {squared}"));
        }
    }
    checks.push(Check::info("‖gE‖² ≤ f as well", true, info.join(", ")));
    Ok(checks)
}

/// Complement ground energies against γ_per and γ_obc.
pub fn ac8(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (bc, full, quick) in [(Bc::Periodic, 8..=10, 8..=8), (Bc::Open, 5..=9, 5..=7)] {
        let mut ok = true;
        let mut worst = String::new();
        let mut worst_margin = f64::INFINITY;
        let mut count = 0;
        let lens = grid.lens(full, quick);
        for kappa in grid.kappas(&[0.5, 1.0, 2.0, 8.0]) {
            for abs in grid.lambdas(&[0.05, 0.2, 0.5, 1.0]) {
                let params = grid.params(kappa, abs, bc)?;
                let g = bounds::gamma_bounds(kappa, abs * abs);
                let bound = if bc == Bc::Periodic { g.per } else { g.obc };
                for &len in &lens {
                    for particles in 0..=(len / 2 + 2) as u32 {
                        let sector = Sector::new(len, particles, 4, bc)?;
                        let Some(e) = spectra::complement_ground_energy(&params, &sector, opts)? else {
                            continue;
                        };
                        count += 1;
                        let margin = e.energy - bound;
                        ok &= margin >= -tol::ONE_SIDED;
                        if margin < worst_margin {
                            worst_margin = margin;
                            worst = format!("κ={kappa} |λ|={abs} L={len} N={particles}: E₀ {:.6} vs {bound:.6}", e.energy);
                        }
                    }
                }
            }
        }
        let name = if bc == Bc::Periodic {
            "complement E₀ ≥ γ_per (periodic)"
        } else {
            "complement E₀ ≥ γ_obc (open)"
        };
        checks.push(Check::new(
            name,
            ok,
            format!("L ∈ {lens:?}, {count} sectors, n_max = 4; tightest {worst}"),
        ));
    }
    Ok(checks)
}

pub fn ac9(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let n = 2;
    let len = grid.lens.as_ref().and_then(|l| l.first().copied()).unwrap_or(12);
    for kappa in grid.kappas(&[1.0]) {
        for abs in grid.lambdas(&[0.2, 0.5]) {
            let open = grid.params(kappa, abs, Bc::Open)?;
            let ring = grid.params(kappa, abs, Bc::Periodic)?;
            let gaps: Vec<f64> = (1..=3)
                .map(|l| {
                    spectra::subspace_gap(3 * n + l, &open, Family::ObcBulk, opts)
                        .map(|s| s.gap.unwrap_or(f64::INFINITY))
                })
                .collect::<Result<_>>()?;
            let bound = bounds::knabe_bound(n, &gaps, kappa, abs * abs)?;
            let measured = spectra::subspace_gap(len, &ring, Family::Periodic, opts)?
                .gap
                .unwrap_or(f64::INFINITY);
            let ok = bound <= 0.0 || measured >= bound - tol::ONE_SIDED;
            checks.push(Check::new(
                &format!("E₁(periodic tilings, L={len}) ≥ criterion ({})", fmt_params(&open)),
                ok,
                format!(
                    "gaps L=7,8,9: {:.6?}; bound {bound:.6}{}; measured {measured:.6}",
                    gaps,
                    if bound <= 0.0 { " (vacuous)" } else { "" }
                ),
            ));
        }
    }
    Ok(checks)
}

/// Least-squares slope of ln y against ln x.
pub fn loglog_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.abs().ln()).collect();
    let n = lx.len() as f64;
    let (mx, my) = (lx.iter().sum::<f64>() / n, ly.iter().sum::<f64>() / n);
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

fn slope_grid() -> Vec<f64> {
    (0..=8).map(|k| 10f64.powf(-3.0 + 2.0 * k as f64 / 8.0)).collect()
}

fn slope_check(name: &str, slopes: &[(f64, f64)], informational: bool) -> Check {
    let ok = slopes
        .iter()
        .all(|(_, s)| (s - tol::SLOPE_TARGET).abs() <= tol::SLOPE_WIDTH);
    let detail = slopes
        .iter()
        .map(|(k, s)| format!("κ={k}: slope {s:.3}"))
        .collect::<Vec<_>>()
        .join(", ");
    let detail = format!("{detail} (target {} ± {})", tol::SLOPE_TARGET, tol::SLOPE_WIDTH);
    if informational {
        Check::info(name, ok, detail)
    } else {
        Check::new(name, ok, detail)
    }
}

pub fn ac10(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let xs = slope_grid();
    let mut block = Vec::new();
    let mut small = Vec::new();
    let mut printed = Vec::new();
    let mut first_order = Vec::new();
    let mut dims = Vec::new();
    for kappa in grid.kappas(&[1.0, 2.0]) {
        let mut ys = (vec![], vec![], vec![], vec![]);
        for &abs in &xs {
            let params = grid.params(kappa, abs, Bc::Open)?;
            let r = abs * abs;
            let expansion = bounds::excited_perturbative(kappa, r)?;
            let six = spectra::closure_spectrum(7, &params, &["1011010".parse()?], 1, opts)?;
            let three = spectra::closure_spectrum(7, &params, &["1011002".parse()?], 1, opts)?;
            dims.push((six.configs.len(), three.configs.len()));
            ys.0.push(six.eigenvalues[0] - expansion);
            ys.1.push(three.eigenvalues[0] - (1.0 - kappa * r / (2.0 * kappa - 1.0)));
            for (ansatz, out) in [(Ansatz::Printed, &mut ys.2), (Ansatz::FirstOrder, &mut ys.3)] {
                let psi = states::variational_excited(3, 3, kappa, params.lambda, ansatz)?;
                let ham = Hamiltonian::full(params, psi.len())?;
                out.push(ham.rayleigh(&psi)? - expansion);
            }
        }
        block.push((kappa, loglog_slope(&xs, &ys.0)));
        small.push((kappa, loglog_slope(&xs, &ys.1)));
        printed.push((kappa, loglog_slope(&xs, &ys.2)));
        first_order.push((kappa, loglog_slope(&xs, &ys.3)));
    }
    let dims_ok = dims.iter().all(|&d| d == (6, 3));
    let mut checks = vec![
        Check::new(
            "closures of 1011010 and 1011002 have dimensions 6 and 3",
            dims_ok,
            format!("{:?}", dims.first()),
        ),
        slope_check("lowest eigenvalue of the 6×6 block − expansion ~ |λ|⁴", &block, false),
        slope_check("Rayleigh quotient of the two-parameter ansatz − expansion ~ |λ|⁴", &printed, false),
        slope_check("Rayleigh quotient with first-order coefficients − expansion ~ |λ|⁴", &first_order, true),
        slope_check("3×3 block − (1 − κ|λ|²/(2κ−1)) ~ |λ|⁴", &small, true),
    ];

    let mut rows = Vec::new();
    let mut ok = true;
    for kappa in grid.kappas(&[0.75, 1.0, 2.0, 8.0]) {
        for abs in [0.02, 0.05, 0.1] {
            let params = grid.params(kappa, abs, Bc::Open)?;
            let mut energies = Vec::new();
            for gap in 1..=3 {
                let root = tiling::excited_root(3, gap, 3)?;
                let spec = spectra::closure_spectrum(root.len(), &params, &[root.to_config()], 1, opts)?;
                energies.push(spec.eigenvalues[0]);
            }
            let best = (0..3).min_by(|&a, &b| energies[a].total_cmp(&energies[b])).unwrap_or(0) + 1;
            ok &= best == 2;
            rows.push(format!("κ={kappa} |λ|={abs}: m={best} ({:.6}, {:.6}, {:.6})", energies[0], energies[1], energies[2]));
        }
    }
    checks.push(Check::new("m = 2 minimises the excited-root block energy (l = r = 3)", ok, rows.join("; ")));
    Ok(checks)
}

pub fn ac11(grid: &Grid, _opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for kappa in grid.kappas(&[1.0, 2.0]) {
        for abs in grid.lambdas(&[0.3, 1.0]) {
            let params = grid.params(kappa, abs, Bc::Open)?;
            for left in 0..=4 {
                for right in 0..=4 {
                    for n in 1..=3 {
                        let psi = states::scar_state(left, n, right, params.lambda)?;
                        let ham = Hamiltonian::full(params, psi.len())?;
                        let mut res = ham.apply(&psi)?;
                        res.axpy(C::new(-(n as f64), 0.0), &psi)?;
                        worst = worst.max(res.norm() / psi.norm());
                        count += 1;
                    }
                }
            }
        }
    }
    Ok(vec![Check::new(
        "H ψ = n ψ for φ_l ⊗ (0110)^n(0) ⊗ φ_r",
        worst <= tol::SCAR_RESIDUAL,
        format!("{count} states, l, r ≤ 4, n ≤ 3; max relative residual {worst:.2e}"),
    )])
}

pub fn ac12(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    let kappa = 8.0;
    let r: f64 = 0.1;
    let params = grid.params(kappa, r.sqrt(), Bc::Periodic)?;
    for len in grid.lens(4..=5, 4..=5) {
        let particles = 2 * len as u32;
        let sector = Sector::new(len, particles, particles as u8, Bc::Periodic)?;
        let (_, a) = spectra::sector_matrix(&params, &sector, opts)?;
        let e0 = spectra::ground_energy(&a, opts)?.unwrap_or(f64::INFINITY);
        let (bound, hyp) = bounds::yrast_bound(2.0, len, kappa, r);
        checks.push(Check::new(
            &format!("E₀(N = 2L) ≥ Yrast bound, L={len}"),
            hyp && e0 >= bound - tol::YRAST,
            format!("κ=8 |λ|²=0.1, dim {}: E₀ {e0:.6} ≥ {bound:.6}, hypothesis {hyp}", a.dim()),
        ));
    }
    Ok(checks)
}

fn random_state(rng: &mut ChaCha8Rng, len: usize, bc: Bc) -> Result<SparseState> {
    let mut psi = SparseState::zero(len, bc);
    let terms = rng.gen_range(1..=8);
    for _ in 0..terms {
        let occ: Vec<u8> = (0..len)
            .map(|_| if rng.gen_bool(0.5) { 0 } else { rng.gen_range(1..=3) })
            .collect();
        let c = Config::new(&occ, bc)?;
        psi.add_term(c, C::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))?;
    }
    Ok(psi)
}

fn diagonal_op(psi: &SparseState, f: impl Fn(&Config) -> f64) -> Result<SparseState> {
    SparseState::from_terms(psi.len(), psi.bc(), psi.iter().map(|(c, a)| (*c, a * f(c))))
}

/// Every eigenvalue of the capped sector matrix, ascending.
pub fn sector_eigenvalues(params: &Params, sector: &Sector, opts: &SolverOptions) -> Result<Vec<f64>> {
    let (_, a) = spectra::sector_matrix(params, sector, opts)?;
    let mut out = Vec::with_capacity(a.dim());
    for idx in a.components() {
        out.extend(spectra::dense_eigh(&a.submatrix(&idx).to_dense()).0);
    }
    out.sort_by(f64::total_cmp);
    Ok(out)
}

pub fn ac13(grid: &Grid, opts: &SolverOptions) -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut structural = true;
    let mut comm: f64 = 0.0;
    for i in 0..100 {
        let bc = if i % 2 == 0 { Bc::Open } else { Bc::Periodic };
        let len = rng.gen_range(6..=10);
        let params = grid.params(rng.gen_range(0.3..3.0), rng.gen_range(0.05..2.0), bc)?;
        let ham = Hamiltonian::full(params, len)?;
        let psi = random_state(&mut rng, len, bc)?;
        // On a ring only the dipole moment modulo L is conserved.
        let dipole = |c: &Config| match bc {
            Bc::Open => c.dipole() as f64,
            Bc::Periodic => c.dipole_mod() as f64,
        };
        let number = |c: &Config| c.particle_number() as f64;
        for (c, _) in psi.iter() {
            ham.for_each_offdiagonal(c, |t, _| {
                structural &= number(&t) == number(c) && dipole(&t) == dipole(c);
            })?;
        }
        let h_psi = ham.apply(&psi)?;
        for op in [&number as &dyn Fn(&Config) -> f64, &dipole] {
            let forward = ham.apply(&diagonal_op(&psi, op)?)?;
            let backward = diagonal_op(&h_psi, op)?;
            let scale = forward.norm() + backward.norm();
            if scale > 0.0 {
                comm = comm.max(forward.distance(&backward)? / scale);
            }
        }
    }
    let mut gauge: f64 = 0.0;
    let mut sectors = 0;
    for len in grid.lens(4..=8, 4..=6) {
        for abs in grid.lambdas(&[0.3, 1.2]) {
            let phase = 1.1;
            let twisted = Params::polar(1.3, abs, phase, Bc::Open)?;
            let plain = Params::polar(1.3, abs, 0.0, Bc::Open)?;
            for particles in 0..=4u32 {
                let sector = Sector::new(len, particles, particles.max(1) as u8, Bc::Open)?;
                let a = sector_eigenvalues(&twisted, &sector, opts)?;
                let b = sector_eigenvalues(&plain, &sector, opts)?;
                sectors += 1;
                for (x, y) in a.iter().zip(&b) {
                    gauge = gauge.max((x - y).abs());
                }
            }
        }
    }
    Ok(vec![
        Check::new(
            "H conserves N and the dipole moment",
            structural && comm <= tol::COMMUTATOR,
            format!("100 random states: every coupling preserves (N, dipole): {structural}; max relative ‖[H, O]ψ‖ {comm:.1e}"),
        ),
        Check::new(
            "open-chain spectra independent of arg λ",
            gauge <= tol::GAUGE,
            format!("{sectors} sectors, L ≤ 8: max eigenvalue difference {gauge:.2e}"),
        ),
    ])
}
