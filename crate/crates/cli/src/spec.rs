//! The serializable description of one CLI run.

use serde::{Deserialize, Serialize};

pub const SCHEMA: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Everything that determines a run's output. Serialised with `serde_json`,
/// whose shortest round-trip float formatting makes the text form exact.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunSpec {
    pub schema: u32,
    #[serde(flatten)]
    pub command: Command,
    pub format: Format,
    pub seed: u64,
    pub threads: Option<usize>,
    /// Largest admissible number of stored matrix entries.
    pub budget: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "command", rename_all = "lowercase")]
pub enum Command {
    Tilings {
        #[serde(rename = "L")]
        len: usize,
        family: String,
        roots_only: bool,
    },
    Spectrum {
        #[serde(rename = "L")]
        len: Option<usize>,
        bc: String,
        kappa: f64,
        abs_lambda: f64,
        phase: f64,
        n_max: u8,
        family: Option<String>,
        #[serde(rename = "N")]
        particles: Option<u32>,
        seed_config: Option<String>,
        complement: bool,
        /// Number of eigenvalues reported.
        count: usize,
    },
    Verify {
        suite: String,
        #[serde(rename = "L")]
        lens: Option<Vec<usize>>,
        /// Drops default chain lengths above this.
        #[serde(rename = "Lmax")]
        lmax: Option<usize>,
        kappas: Option<Vec<f64>>,
        abs_lambdas: Option<Vec<f64>>,
        phase: f64,
        quick: bool,
    },
    Bounds {
        kappas: Vec<f64>,
        abs_lambdas: Vec<f64>,
    },
}

impl RunSpec {
    pub fn to_text(&self) -> String {
        serde_json::to_string(self).expect("RunSpec serialises")
    }

    pub fn from_text(text: &str) -> Result<RunSpec, String> {
        let spec: RunSpec = serde_json::from_str(text).map_err(|e| format!("bad run spec: {e}"))?;
        if spec.schema != SCHEMA {
            return Err(format!("unsupported run-spec schema {}", spec.schema));
        }
        Ok(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn specs() -> Vec<RunSpec> {
        let base = |command| RunSpec {
            schema: SCHEMA,
            command,
            format: Format::Json,
            seed: 42,
            threads: Some(3),
            budget: 1000,
        };
        vec![
            base(Command::Tilings {
                len: 6,
                family: "obc-bulk".into(),
                roots_only: true,
            }),
            base(Command::Spectrum {
                len: Some(8),
                bc: "per".into(),
                kappa: 0.1 + 0.2,
                abs_lambda: std::f64::consts::E,
                phase: std::f64::consts::PI,
                n_max: 3,
                family: None,
                particles: Some(3),
                seed_config: None,
                complement: true,
                count: 4,
            }),
            base(Command::Verify {
                suite: "gss".into(),
                lens: Some(vec![7, 8]),
                lmax: None,
                kappas: None,
                abs_lambdas: Some(vec![1e-300, 5e-324, 0.2]),
                phase: 1.0 / 3.0,
                quick: false,
            }),
            base(Command::Bounds {
                kappas: vec![0.5, 1.0],
                abs_lambdas: vec![0.05],
            }),
        ]
    }

    #[test]
    fn text_round_trip_is_exact() {
        for spec in specs() {
            let text = spec.to_text();
            let back = RunSpec::from_text(&text).unwrap();
            assert_eq!(back, spec);
            assert_eq!(back.to_text(), text);
        }
    }

    #[test]
    fn rejects_other_schemas() {
        let text = specs()[0].to_text().replace("\"schema\":1", "\"schema\":2");
        assert!(RunSpec::from_text(&text).is_err());
    }
}
