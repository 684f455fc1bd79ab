use escape_core::{IterationBudget, Rational};

use crate::CliError;

pub const BUDGET_ENV: &str = "ESCAPE_ITER_BUDGET";

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Mode {
    Exact,
    Interval {
        n_known: u64,
        eps: Rational,
        jitter: Rational,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum OutputFormat {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum ModeName {
    Exact,
    Interval,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub mode: Mode,
    pub output: OutputFormat,
    pub budget: IterationBudget,
}

impl RunConfig {
    /// Builds a config from loosely typed flags: the interval parameters are
    /// required in interval mode and rejected in exact mode.
    pub fn from_flags(
        mode: ModeName,
        n_known: Option<u64>,
        eps: Option<Rational>,
        jitter: Option<Rational>,
        output: OutputFormat,
        budget: u64,
    ) -> Result<Self, CliError> {
        let budget = IterationBudget::new(budget)
            .ok_or_else(|| CliError::Config("iteration budget must be at least 1".into()))?;
        let mode = match mode {
            ModeName::Exact => {
                if n_known.is_some() || eps.is_some() || jitter.is_some() {
                    return Err(CliError::Config(
                        "--n-known, --eps and --jitter only apply to --mode interval".into(),
                    ));
                }
                Mode::Exact
            }
            ModeName::Interval => {
                let n_known = n_known
                    .ok_or_else(|| CliError::Config("--mode interval requires --n-known".into()))?;
                let eps =
                    eps.ok_or_else(|| CliError::Config("--mode interval requires --eps".into()))?;
                if n_known == 0 {
                    return Err(CliError::Config("--n-known must be at least 1".into()));
                }
                if !eps.is_positive() {
                    return Err(CliError::Config(format!("--eps must be positive, got {eps}")));
                }
                let jitter = jitter.unwrap_or_else(Rational::zero);
                if jitter.is_negative() {
                    return Err(CliError::Config(format!(
                        "--jitter must be nonnegative, got {jitter}"
                    )));
                }
                Mode::Interval {
                    n_known,
                    eps,
                    jitter,
                }
            }
        };
        Ok(RunConfig {
            mode,
            output,
            budget,
        })
    }
}
