//! Batch experiments: α-sweeps, mixed-sign sweeps and the surface oracle
//! check.
//!
//! Every sample is processed independently and rows are emitted in sample
//! order, so reports do not depend on how many workers ran them.

mod oracle;
mod sampling;

use std::io::{self, Write};

use serde::{Deserialize, Serialize};

pub use oracle::{
    random_rational_spec, random_unit_rational, run_oracle_check, OracleConfig, OracleReport,
    OracleStats,
};
pub use rand_chacha::rand_core::RngCore;
pub use sampling::{below, between, random_dyadic, sample_alpha, sample_rng};

use crate::dynamics::{idoc_check, ue_diagnostic, DiagnosticConfig, DynamicsError, UeReport};
use crate::exec::Execution;
use crate::iet::{build_composition, CompositionSpec, Iet, IetError, SignMode};
use crate::io::{config_hash, CsvHeader, SpecJson};
use crate::numerics::{NumericsConfig, Scalar};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ExperimentError {
    #[error("sample count must be at least 1")]
    NoSamples,
    #[error("negative coefficients need the mixed-sign sweep")]
    NeedsMixedMode,
    #[error(transparent)]
    Iet(#[from] IetError),
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("bad alpha {0:?}")]
    BadAlpha(String),
}

/// Where the parameters of a sweep come from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AlphaSource {
    /// `samples` uniform draws of `P` random bits each.
    Uniform { samples: usize },
    /// Fixed values, one row each.
    Given(Vec<String>),
}

impl AlphaSource {
    pub fn len(&self) -> usize {
        match self {
            AlphaSource::Uniform { samples } => *samples,
            AlphaSource::Given(values) => values.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig<S> {
    pub spec: CompositionSpec<S>,
    pub alphas: AlphaSource,
    pub seed: u64,
    pub numerics: NumericsConfig,
    pub diagnostic: DiagnosticConfig,
}

/// The hashed description of a run: everything that determines its rows.
#[derive(Debug, Serialize)]
struct RunDescription<'a> {
    kind: &'a str,
    spec: SpecJson,
    alphas: &'a AlphaSource,
    seed: u64,
    backend: String,
    precision: u32,
    diagnostic: &'a DiagnosticConfig,
}

impl<S: Scalar> ExperimentConfig<S> {
    pub fn new(
        spec: CompositionSpec<S>,
        samples: usize,
        seed: u64,
        numerics: NumericsConfig,
    ) -> Self {
        ExperimentConfig {
            spec,
            alphas: AlphaSource::Uniform { samples },
            seed,
            numerics,
            diagnostic: DiagnosticConfig::default(),
        }
    }

    pub fn config_hash(&self, kind: &str) -> String {
        config_hash(&RunDescription {
            kind,
            spec: SpecJson::from_spec(&self.spec),
            alphas: &self.alphas,
            seed: self.seed,
            backend: S::BACKEND.to_string(),
            precision: self.numerics.precision_bits(),
            diagnostic: &self.diagnostic,
        })
    }

    /// The parameter of row `index`.
    pub fn alpha(&self, index: usize) -> Result<S, ExperimentError> {
        match &self.alphas {
            AlphaSource::Uniform { .. } => {
                Ok(sample_alpha(self.seed, index as u64, &self.numerics))
            }
            AlphaSource::Given(values) => {
                let text = &values[index];
                let a = S::parse(text, &self.numerics)
                    .map_err(|_| ExperimentError::BadAlpha(text.clone()))?;
                if a.is_negative() || a >= a.int_like(1) {
                    return Err(ExperimentError::BadAlpha(text.clone()));
                }
                Ok(a)
            }
        }
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub sample: usize,
    pub alpha: String,
    /// `N_max`.
    pub n: u64,
    pub dstar: f64,
    pub max_birkhoff_dev: f64,
    pub spread: f64,
    /// NaN when the fit was not possible.
    pub beta_hat: f64,
    pub idoc: String,
    pub occupancy: f64,
    pub converged: bool,
    pub singular_starts: usize,
}

impl SweepRow {
    pub const CSV_COLUMNS: &'static str =
        "alpha,N,Dstar,max_birkhoff_dev,spread,beta_hat,idoc,occupancy";

    fn csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.alpha,
            self.n,
            self.dstar,
            self.max_birkhoff_dev,
            self.spread,
            self.beta_hat,
            self.idoc,
            self.occupancy
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Quantiles {
    pub median: f64,
    pub p95: f64,
}

impl Quantiles {
    /// Nearest-rank quantiles of the finite values; NaN when there are none.
    pub fn of(values: impl IntoIterator<Item = f64>) -> Self {
        let mut v: Vec<f64> = values.into_iter().filter(|x| x.is_finite()).collect();
        v.sort_by(f64::total_cmp);
        let rank = |p: f64| -> f64 {
            if v.is_empty() {
                return f64::NAN;
            }
            let k = ((p * v.len() as f64).ceil() as usize).clamp(1, v.len());
            v[k - 1]
        };
        Quantiles {
            median: rank(0.5),
            p95: rank(0.95),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aggregates {
    pub dstar: Quantiles,
    pub spread: Quantiles,
    pub beta_hat: Quantiles,
    pub nonconvergent: usize,
    /// Orbits stopped by a discontinuity, summed over samples.
    pub singular_orbits: usize,
}

impl Aggregates {
    pub fn from_rows(rows: &[SweepRow]) -> Self {
        Aggregates {
            dstar: Quantiles::of(rows.iter().map(|r| r.dstar)),
            spread: Quantiles::of(rows.iter().map(|r| r.spread)),
            beta_hat: Quantiles::of(rows.iter().map(|r| r.beta_hat)),
            nonconvergent: rows.iter().filter(|r| !r.converged).count(),
            singular_orbits: rows.iter().map(|r| r.singular_starts).sum(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub kind: String,
    pub config_hash: String,
    pub seed: u64,
    pub backend: String,
    pub precision: u32,
    pub mode: SignMode,
    pub rows: Vec<SweepRow>,
    pub aggregates: Aggregates,
}

impl SweepReport {
    pub fn header(&self, timestamp: Option<String>) -> CsvHeader {
        CsvHeader {
            title: format!("ietlab {}", self.kind),
            timestamp,
            config_hash: self.config_hash.clone(),
            seed: self.seed,
            backend: self.backend.clone(),
            precision: self.precision,
        }
    }

    pub fn write_csv<W: Write>(&self, w: &mut W, timestamp: Option<String>) -> io::Result<()> {
        self.header(timestamp).write(w)?;
        writeln!(w, "{}", SweepRow::CSV_COLUMNS)?;
        for row in &self.rows {
            writeln!(w, "{}", row.csv_line())?;
        }
        Ok(())
    }
}

/// Full diagnostics of `S_α` for a single parameter.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Diagnosis {
    pub alpha: String,
    pub intervals: usize,
    pub report: UeReport,
    pub row: SweepRow,
}

fn diagnose_composition<S: Scalar>(
    spec: &CompositionSpec<S>,
    alpha: &S,
    sample: usize,
    diagnostic: &DiagnosticConfig,
    exec: Execution,
) -> Result<(Iet<S>, UeReport, SweepRow), ExperimentError> {
    let s = build_composition(spec, alpha)?;
    let report = ue_diagnostic(&s, diagnostic, exec)?;
    let idoc = idoc_check(&s, diagnostic.idoc_depth)?;
    let summary = &report.summary;
    let row = SweepRow {
        sample,
        alpha: alpha.to_string(),
        n: summary.n_max,
        dstar: summary.max_dstar,
        max_birkhoff_dev: summary.max_birkhoff_dev,
        spread: summary.spread,
        beta_hat: summary.deviation.map_or(f64::NAN, |d| d.beta_hat),
        idoc: idoc.label(),
        occupancy: summary.min_occupancy,
        converged: summary.converged,
        singular_starts: summary.singular_starts,
    };
    Ok((s, report, row))
}

/// Diagnoses `S_α` at one parameter, spreading the starts over `exec`.
pub fn diagnose<S: Scalar>(
    spec: &CompositionSpec<S>,
    alpha: &S,
    diagnostic: &DiagnosticConfig,
    exec: Execution,
) -> Result<Diagnosis, ExperimentError> {
    let (s, report, row) = diagnose_composition(spec, alpha, 0, diagnostic, exec)?;
    Ok(Diagnosis {
        alpha: alpha.to_string(),
        intervals: s.len(),
        report,
        row,
    })
}

fn run_sweep<S: Scalar>(
    config: &ExperimentConfig<S>,
    kind: &str,
    exec: Execution,
) -> Result<SweepReport, ExperimentError> {
    let n = config.alphas.len();
    if n == 0 {
        return Err(ExperimentError::NoSamples);
    }
    let rows = exec
        .map_range(n, |i| {
            let alpha = config.alpha(i)?;
            diagnose_composition(
                &config.spec,
                &alpha,
                i,
                &config.diagnostic,
                Execution::Sequential,
            )
            .map(|(_, _, row)| row)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SweepReport {
        kind: kind.to_string(),
        config_hash: config.config_hash(kind),
        seed: config.seed,
        backend: S::BACKEND.to_string(),
        precision: config.numerics.precision_bits(),
        mode: config.spec.mode(),
        aggregates: Aggregates::from_rows(&rows),
        rows,
    })
}

/// Samples `α`, builds `S_α`, and runs the unique-ergodicity diagnostics,
/// the distinct-orbit check and the deviation fit on each.
pub fn run_alpha_sweep<S: Scalar>(
    config: &ExperimentConfig<S>,
    exec: Execution,
) -> Result<SweepReport, ExperimentError> {
    if config.spec.mode() == SignMode::Mixed {
        return Err(ExperimentError::NeedsMixedMode);
    }
    run_sweep(config, "sweep", exec)
}

/// The same pipeline for coefficients of either sign; `Σ c_i` must be
/// nonzero.
pub fn run_mixed_sign_sweep<S: Scalar>(
    config: &ExperimentConfig<S>,
    exec: Execution,
) -> Result<SweepReport, ExperimentError> {
    let sum = config.spec.coefficient_sum();
    if sum.near(&sum.int_like(0)) {
        return Err(IetError::ZeroCoefficientSum.into());
    }
    run_sweep(config, "mixed-sweep", exec)
}
