//! Executes a [`RunSpec`] and renders its report.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::json;
use thiserror::Error;
use vmdgap::bounds::{self, BoundReport};
use vmdgap::spectra::{self, SolverOptions};
use vmdgap::tiling::{self, Family};
use vmdgap::verify::{self, Grid, Suite};
use vmdgap::{tolerances, Bc, Config, Params, Sector};

use crate::spec::{Command, Format, RunSpec};

#[derive(Debug, Error)]
pub enum Failure {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Budget(String),
    #[error("{0}")]
    Runtime(String),
}

impl Failure {
    pub fn code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
            Failure::Runtime(_) => 1,
        }
    }
}

impl From<vmdgap::Error> for Failure {
    fn from(e: vmdgap::Error) -> Self {
        use vmdgap::Error as E;
        let text = e.to_string();
        match e {
            E::Budget { .. } => Failure::Budget(text),
            E::UnsupportedLength { .. }
            | E::OccupationOverflow { .. }
            | E::SiteOutOfRange { .. }
            | E::Parse { .. }
            | E::InvalidParameter(_)
            | E::InvalidTiling(_)
            | E::NotTiling { .. }
            | E::IsTiling { .. } => Failure::Usage(text),
            _ => Failure::Runtime(text),
        }
    }
}

/// Rendered output and whether every check it carries passed.
pub struct Report {
    pub text: String,
    pub passed: bool,
}

pub fn execute(spec: &RunSpec) -> Result<Report, Failure> {
    let opts = SolverOptions {
        seed: spec.seed,
        budget_nnz: spec.budget,
        ..SolverOptions::default()
    };
    match &spec.command {
        Command::Tilings {
            len,
            family,
            roots_only,
        } => tilings(spec, *len, family, *roots_only),
        Command::Spectrum { .. } => spectrum(spec, &opts),
        Command::Verify {
            suite,
            lens,
            kappas,
            abs_lambdas,
            lmax,
            phase,
            quick,
        } => {
            let suite: Suite = suite.parse()?;
            let grid = Grid {
                lens: lens.clone(),
                kappas: kappas.clone(),
                abs_lambdas: abs_lambdas.clone(),
                lmax: *lmax,
                phase: *phase,
                quick: *quick,
            };
            let criteria = verify::run_suite(suite, &grid, &opts)?;
            for c in &criteria {
                eprintln!("{c}");
            }
            let passed = criteria.iter().all(|c| c.passed());
            let text = match spec.format {
                Format::Json => to_json(&json!({
                    "schema": 1,
                    "spec": spec,
                    "passed": passed,
                    "criteria": criteria,
                })),
                Format::Csv => {
                    let mut out = String::from("id,check,passed,informational,detail\n");
                    for c in &criteria {
                        for k in &c.checks {
                            let _ = writeln!(
                                out,
                                "{},{},{},{},{}",
                                c.id,
                                csv_field(&k.name),
                                k.passed,
                                k.informational,
                                csv_field(&k.detail)
                            );
                        }
                    }
                    out
                }
            };
            Ok(Report { text, passed })
        }
        Command::Bounds { kappas, abs_lambdas } => {
            let mut reports = Vec::new();
            for &kappa in kappas {
                for &abs_lambda in abs_lambdas {
                    if !(kappa > 0.0 && kappa.is_finite() && abs_lambda.is_finite() && abs_lambda >= 0.0) {
                        return Err(Failure::Usage(format!(
                            "bounds need κ > 0 and |λ| ≥ 0, got κ={kappa} |λ|={abs_lambda}"
                        )));
                    }
                    reports.extend(bounds::all_bounds(kappa, abs_lambda));
                }
            }
            let mut buf = Vec::new();
            let written = match spec.format {
                Format::Json => bounds::write_json_lines(&reports, &mut buf),
                Format::Csv => bounds::write_csv(&reports, &mut buf),
            };
            written.map_err(|e| Failure::Runtime(e.to_string()))?;
            Ok(Report {
                text: String::from_utf8(buf).expect("reports are UTF-8"),
                passed: true,
            })
        }
    }
}

fn to_json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("reports serialise") + "\n"
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn parse<T: std::str::FromStr<Err = vmdgap::Error>>(text: &str) -> Result<T, Failure> {
    text.parse::<T>().map_err(Failure::from)
}

#[derive(Serialize)]
struct RootRow {
    root: String,
    config: String,
    particles: u32,
    #[serde(skip_serializing_if = "Option::is_none")]
    class_size: Option<usize>,
}

fn tilings(spec: &RunSpec, len: usize, family: &str, roots_only: bool) -> Result<Report, Failure> {
    let family: Family = parse(family)?;
    let rows: Vec<RootRow> = if roots_only {
        tiling::enumerate_roots(len, family)?
            .iter()
            .map(|root| {
                let c = root.to_config();
                RootRow {
                    root: root.to_string(),
                    config: c.occupation_string(),
                    particles: c.particle_number(),
                    class_size: None,
                }
            })
            .collect()
    } else {
        tiling::classes(len, family)?
            .iter()
            .map(|(root, class)| {
                let c = root.to_config();
                RootRow {
                    root: root.to_string(),
                    config: c.occupation_string(),
                    particles: c.particle_number(),
                    class_size: Some(class.len()),
                }
            })
            .collect()
    };
    let expected = match family {
        Family::Periodic => Some(tiling::count_periodic_roots(len)),
        Family::ObcBulk => Some(tiling::count_bulk_roots(len)),
        _ => None,
    };
    let text = match spec.format {
        Format::Json => {
            let tilings: Option<usize> = rows.iter().map(|r| r.class_size).sum();
            to_json(&json!({
                "schema": 1,
                "spec": spec,
                "family": family.to_string(),
                "L": len,
                "root_count": rows.len(),
                "expected_root_count": expected.map(|e| e.to_string()),
                "tiling_count": tilings,
                "roots": rows,
            }))
        }
        Format::Csv => {
            let mut out = String::from("root,config,particles,class_size\n");
            for r in &rows {
                let size = r.class_size.map_or(String::new(), |s| s.to_string());
                let _ = writeln!(out, "{},{},{},{}", r.root, csv_field(&r.config), r.particles, size);
            }
            out
        }
    };
    Ok(Report { text, passed: true })
}

fn eigen_csv(values: &[f64]) -> String {
    let mut out = String::from("index,eigenvalue\n");
    for (i, v) in values.iter().enumerate() {
        let _ = writeln!(out, "{i},{v:e}");
    }
    out
}

fn pick_bound(kappa: f64, abs_lambda: f64, name: &str) -> BoundReport {
    bounds::all_bounds(kappa, abs_lambda)
        .into_iter()
        .find(|b| b.name == name)
        .expect("named bound exists")
}

fn spectrum(spec: &RunSpec, opts: &SolverOptions) -> Result<Report, Failure> {
    let Command::Spectrum {
        len,
        bc,
        kappa,
        abs_lambda,
        phase,
        n_max,
        family,
        particles,
        seed_config,
        complement,
        count,
    } = &spec.command
    else {
        unreachable!("dispatched on the spectrum command")
    };
    let bc: Bc = parse(bc)?;
    let need_len = || len.ok_or_else(|| Failure::Usage("--L is required".into()));
    let need_particles = || particles.ok_or_else(|| Failure::Usage("--N is required".into()));
    let modes = [seed_config.is_some(), family.is_some(), *complement];
    if modes.iter().filter(|&&m| m).count() > 1 {
        return Err(Failure::Usage(
            "--seed-config, --family and --complement are mutually exclusive".into(),
        ));
    }

    let (result, values, passed) = if let Some(text) = seed_config {
        let seed = parse::<Config>(text)?.with_bc(bc);
        if len.is_some_and(|l| l != seed.len()) {
            return Err(Failure::Usage(format!("--L disagrees with the seed length {}", seed.len())));
        }
        let params = Params::polar(*kappa, *abs_lambda, *phase, bc)?;
        let r = spectra::closure_spectrum(seed.len(), &params, &[seed], *count, opts)?;
        let values = r.eigenvalues.clone();
        (json!({ "mode": "closure", "result": r }), values, true)
    } else if let Some(text) = family {
        let family: Family = parse(text)?;
        let len = family.fixed_len().map_or_else(need_len, Ok)?;
        let params = Params::polar(*kappa, *abs_lambda, *phase, family.bc())?;
        let r = spectra::subspace_gap(len, &params, family, opts)?;
        let bound = match family {
            Family::Periodic => Some(pick_bound(*kappa, *abs_lambda, "per_gap")),
            Family::ObcBulk => Some(pick_bound(*kappa, *abs_lambda, "tiling_gap")),
            Family::ObcAll { .. } => Some(pick_bound(*kappa, *abs_lambda, "obc_gap")),
            _ => None,
        };
        let satisfied = match (&bound, r.gap) {
            (Some(b), Some(g)) if b.hypothesis_ok => Some(g >= b.value - tolerances::ONE_SIDED),
            _ => None,
        };
        let values = r.gap.into_iter().collect();
        (
            json!({ "mode": "family", "result": r, "bound": bound, "satisfied": satisfied }),
            values,
            satisfied != Some(false),
        )
    } else {
        let params = Params::polar(*kappa, *abs_lambda, *phase, bc)?;
        let sector = Sector::new(need_len()?, need_particles()?, *n_max, bc)?;
        if *complement {
            let r = spectra::complement_ground_energy(&params, &sector, opts)?;
            let name = match bc {
                Bc::Periodic => "gamma_per",
                Bc::Open => "gamma_obc",
            };
            let bound = pick_bound(*kappa, *abs_lambda, name);
            let satisfied = r.as_ref().map(|r| r.energy >= bound.value - tolerances::ONE_SIDED);
            let values = r.iter().map(|r| r.energy).collect();
            (
                json!({ "mode": "complement", "result": r, "bound": bound, "satisfied": satisfied }),
                values,
                satisfied != Some(false),
            )
        } else {
            let r = spectra::sector_spectrum(&params, &sector, *count, opts)?;
            let values = r.eigenvalues.clone();
            (json!({ "mode": "sector", "result": r }), values, true)
        }
    };
    let text = match spec.format {
        Format::Json => {
            let mut doc = json!({ "schema": 1, "spec": spec });
            if let (Some(doc), Some(extra)) = (doc.as_object_mut(), result.as_object()) {
                doc.extend(extra.clone());
            }
            to_json(&doc)
        }
        Format::Csv => eigen_csv(&values),
    };
    Ok(Report { text, passed })
}
