use serde::{Deserialize, Serialize};

use crate::exec::Execution;
use crate::iet::Iet;
use crate::numerics::Scalar;

use super::birkhoff::{check_ladder, deviation_exponent_fit, DeviationFit, TestFunction};
use super::discrepancy::star_discrepancy_f64;
use super::orbit::{check_start, Stepper};
use super::DynamicsError;

/// Convergence thresholds used to label results; they never certify
/// anything.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    pub dstar: f64,
    pub spread: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            dstar: 0.01,
            spread: 0.01,
        }
    }
}

/// Orbit lengths `2^lo, 2^(lo+1), …, 2^hi`.
pub fn default_ladder(lo: u32, hi: u32) -> Vec<u64> {
    (lo..=hi).map(|e| 1u64 << e).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticConfig {
    pub ladder: Vec<u64>,
    /// Start points as scalar literals, parsed at the experiment's precision.
    pub starts: Vec<String>,
    pub functions: Vec<TestFunction>,
    pub bins: usize,
    pub idoc_depth: usize,
    pub thresholds: Thresholds,
}

impl Default for DiagnosticConfig {
    fn default() -> Self {
        DiagnosticConfig {
            ladder: default_ladder(10, 20),
            starts: ["1/7", "1/3", "2/3", "0.123456789"]
                .map(String::from)
                .to_vec(),
            functions: TestFunction::family(3),
            bins: 1000,
            idoc_depth: 10_000,
            thresholds: Thresholds::default(),
        }
    }
}

impl DiagnosticConfig {
    /// Replaces the ladder by `2^10 … 2^max_exp` (or `2^max_exp` alone when
    /// `max_exp < 10`).
    pub fn with_ladder_max(mut self, max_exp: u32) -> Self {
        self.ladder = default_ladder(10.min(max_exp), max_exp);
        self
    }

    pub fn parse_starts<S: Scalar>(
        &self,
        cfg: &crate::numerics::NumericsConfig,
    ) -> Result<Vec<S>, DynamicsError> {
        self.starts
            .iter()
            .map(|s| S::parse(s, cfg).map_err(|e| DynamicsError::Iet(e.into())))
            .collect()
    }
}

/// Diagnostics at one ladder length.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LadderEntry {
    pub n: u64,
    /// Star discrepancy of the first `n` orbit points.
    pub dstar: f64,
    /// `S_n f` for each configured test function.
    pub sums: Vec<f64>,
    /// `max_{m ≤ n} max_f |S_m f|`.
    pub running_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrbitDiagnostics {
    pub start: String,
    pub ladder: Vec<LadderEntry>,
    /// Step at which the orbit met a discontinuity, if it did.
    pub singularity: Option<usize>,
    /// Fraction of the bins visited by the computed orbit.
    pub occupancy: f64,
}

/// One pass over the orbit of `x0`: discrepancy and Birkhoff sums at every
/// ladder length, plus bin occupancy of the whole orbit.
pub fn orbit_diagnostics<S: Scalar>(
    iet: &Iet<S>,
    x0: &S,
    ladder: &[u64],
    functions: &[TestFunction],
    bins: usize,
) -> Result<OrbitDiagnostics, DynamicsError> {
    check_ladder(ladder)?;
    check_start(x0)?;
    if bins < 2 {
        return Err(DynamicsError::TooFewBins(bins));
    }
    let stepper = Stepper::new(iet);
    let n_max = *ladder.last().expect("non-empty ladder");
    let mut points = Vec::with_capacity(n_max as usize);
    let mut scratch = Vec::with_capacity(n_max as usize);
    let mut sums = vec![0.0; functions.len()];
    let mut running_max = 0.0f64;
    let mut visited = vec![false; bins];
    let mut entries = Vec::with_capacity(ladder.len());
    let mut rungs = ladder.iter().copied().peekable();
    let mut singularity = None;
    let mut x = x0.clone();

    for n in 1..=n_max {
        let xf = x.to_f64();
        points.push(xf);
        visited[((xf * bins as f64) as usize).min(bins - 1)] = true;
        for (s, f) in sums.iter_mut().zip(functions) {
            *s += f.eval(xf);
            running_max = running_max.max(s.abs());
        }
        if rungs.next_if_eq(&n).is_some() {
            scratch.clear();
            scratch.extend_from_slice(&points);
            entries.push(LadderEntry {
                n,
                dstar: star_discrepancy_f64(&mut scratch)?,
                sums: sums.clone(),
                running_max,
            });
        }
        if n == n_max {
            break;
        }
        if stepper.is_singular(&x) {
            singularity = Some(n as usize - 1);
            break;
        }
        x = stepper.step(&x);
    }
    let occupancy = visited.iter().filter(|&&v| v).count() as f64 / bins as f64;
    Ok(OrbitDiagnostics {
        start: x0.to_string(),
        ladder: entries,
        singularity,
        occupancy,
    })
}

/// Fraction of `bins` equal cells of `[0, 1)` visited by the first `n`
/// orbit points. A value of 1 is consistent with minimality.
pub fn minimality_heuristic<S: Scalar>(
    iet: &Iet<S>,
    x0: &S,
    n: usize,
    bins: usize,
) -> Result<f64, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::EmptyOrbit);
    }
    check_start(x0)?;
    if bins < 2 {
        return Err(DynamicsError::TooFewBins(bins));
    }
    let stepper = Stepper::new(iet);
    let mut visited = vec![false; bins];
    let mut x = x0.clone();
    for j in 0..n {
        visited[((x.to_f64() * bins as f64) as usize).min(bins - 1)] = true;
        if j + 1 == n || stepper.is_singular(&x) {
            break;
        }
        x = stepper.step(&x);
    }
    Ok(visited.iter().filter(|&&v| v).count() as f64 / bins as f64)
}

/// Aggregate over the non-singular starts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeSummary {
    pub n_max: u64,
    /// Largest `D*_{N_max}` over starts.
    pub max_dstar: f64,
    /// Largest `|S_{N_max} f| / N_max` over starts and functions.
    pub max_birkhoff_dev: f64,
    /// Largest, over functions, of the range of `S_{N_max} f / N_max` across
    /// starts.
    pub spread: f64,
    pub min_occupancy: f64,
    pub valid_starts: usize,
    pub singular_starts: usize,
    /// Fit of the running maximum (over starts) of Birkhoff deviations.
    pub deviation: Option<DeviationFit>,
    /// `max_dstar` and `spread` are both below their thresholds.
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UeReport {
    pub starts: Vec<OrbitDiagnostics>,
    pub summary: UeSummary,
}

/// Runs [`orbit_diagnostics`] from every configured start and summarizes.
///
/// Unique ergodicity shows up as small discrepancy from every start and a
/// small spread of Birkhoff averages across starts. Starts whose orbit meets
/// a discontinuity before `N_max` are reported but left out of the summary.
pub fn ue_diagnostic<S: Scalar>(
    iet: &Iet<S>,
    config: &DiagnosticConfig,
    exec: Execution,
) -> Result<UeReport, DynamicsError> {
    let starts: Vec<S> = config.parse_starts(&iet.config())?;
    let mut distinct = starts.clone();
    distinct.sort();
    distinct.dedup();
    if distinct.len() < 2 {
        return Err(DynamicsError::TooFewStarts(distinct.len()));
    }
    check_ladder(&config.ladder)?;
    let per_start = exec
        .map(&starts, |_, x0| {
            orbit_diagnostics(iet, x0, &config.ladder, &config.functions, config.bins)
        })
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(&per_start, &config.ladder, config.thresholds);
    Ok(UeReport {
        starts: per_start,
        summary,
    })
}

fn summarize(per_start: &[OrbitDiagnostics], ladder: &[u64], thresholds: Thresholds) -> UeSummary {
    let n_max = *ladder.last().expect("non-empty ladder");
    let valid: Vec<&OrbitDiagnostics> = per_start
        .iter()
        .filter(|d| d.singularity.is_none())
        .collect();
    let finals: Vec<&LadderEntry> = valid.iter().filter_map(|d| d.ladder.last()).collect();
    let nf = n_max as f64;
    let fold_max = |it: &mut dyn Iterator<Item = f64>| it.fold(f64::NAN, f64::max);

    let max_dstar = fold_max(&mut finals.iter().map(|e| e.dstar));
    let max_birkhoff_dev = fold_max(
        &mut finals
            .iter()
            .flat_map(|e| e.sums.iter().map(|s| s.abs() / nf)),
    );
    let n_functions = finals.first().map_or(0, |e| e.sums.len());
    let spread = if finals.len() < 2 {
        f64::NAN
    } else {
        fold_max(&mut (0..n_functions).map(|j| {
            let averages = finals.iter().map(|e| e.sums[j] / nf);
            let hi = averages.clone().fold(f64::NEG_INFINITY, f64::max);
            let lo = averages.fold(f64::INFINITY, f64::min);
            hi - lo
        }))
    };
    let min_occupancy = valid.iter().map(|d| d.occupancy).fold(f64::NAN, f64::min);
    let deviation = (!valid.is_empty() && ladder.len() >= 4)
        .then(|| {
            let series: Vec<(u64, f64)> = ladder
                .iter()
                .enumerate()
                .map(|(i, &n)| {
                    (
                        n,
                        valid
                            .iter()
                            .map(|d| d.ladder[i].running_max)
                            .fold(0.0, f64::max),
                    )
                })
                .collect();
            deviation_exponent_fit(&series).ok()
        })
        .flatten();
    UeSummary {
        n_max,
        max_dstar,
        max_birkhoff_dev,
        spread,
        min_occupancy,
        valid_starts: valid.len(),
        singular_starts: per_start.len() - valid.len(),
        deviation,
        converged: max_dstar < thresholds.dstar && spread < thresholds.spread,
    }
}
