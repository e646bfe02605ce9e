//! Cross-check of `build_composition` against first returns on the stacked
//! surface.
//!
//! Each random configuration is checked three ways: exactly in rational
//! arithmetic, in fixed point (surface against composition), and fixed point
//! against the exact value of the same dyadic data.

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand_chacha::rand_core::RngCore;
use serde::{Deserialize, Serialize};

use super::sampling::{below, between, random_dyadic, sample_rng};
use super::ExperimentError;
use crate::exec::Execution;
use crate::iet::{build_composition, CompositionSpec, Iet, Permutation};
use crate::io::config_hash;
use crate::numerics::{circle_distance, Fixed, NumericsConfig, Rational, Scalar};
use crate::surface::{first_return, return_time, Direction, StackedSurface, SurfaceError};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleConfig {
    pub configs: usize,
    pub starts: usize,
    pub seed: u64,
    pub max_k: usize,
    pub max_intervals: usize,
    pub numerics: NumericsConfig,
    /// Fixed-point `α` for every configuration instead of a random one.
    pub fixed_alpha: Option<String>,
    /// Fixed-point comparisons pass below `2^-tolerance_bits`.
    pub tolerance_bits: u32,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig {
            configs: 100,
            starts: 1000,
            seed: 0,
            max_k: 4,
            max_intervals: 4,
            numerics: NumericsConfig::default(),
            fixed_alpha: None,
            tolerance_bits: 200,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct OracleStats {
    pub comparisons: usize,
    /// Starts whose trajectory hit a cone point.
    pub singular_skipped: usize,
    pub mismatches: usize,
    /// Largest circle distance between the two return points.
    pub max_deviation: f64,
    /// Largest difference between measured and predicted return times
    /// (squared times in rational mode).
    pub max_time_deviation: f64,
}

impl OracleStats {
    fn merge(&mut self, other: &OracleStats) {
        self.comparisons += other.comparisons;
        self.singular_skipped += other.singular_skipped;
        self.mismatches += other.mismatches;
        self.max_deviation = self.max_deviation.max(other.max_deviation);
        self.max_time_deviation = self.max_time_deviation.max(other.max_time_deviation);
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub config_hash: String,
    pub seed: u64,
    pub precision: u32,
    pub tolerance: f64,
    pub rational: OracleStats,
    pub fixed: OracleStats,
    /// Fixed-point composition against exact arithmetic on the same data.
    pub reference: OracleStats,
    /// Up to ten mismatch descriptions.
    pub failures: Vec<String>,
    pub passed: bool,
}

/// A rational in `[0, 1)` with denominator at most `max_den`.
pub fn random_unit_rational<R: RngCore>(rng: &mut R, max_den: u64) -> Rational {
    let den = between(rng, 1, max_den);
    Rational::new(below(rng, den) as i64, den as i64)
}

/// A random positive composition with rational data: `k ≤ max_k` IETs of at
/// most `max_intervals` pieces each, lengths and coefficients with small
/// denominators.
pub fn random_rational_spec<R: RngCore>(
    rng: &mut R,
    max_k: usize,
    max_intervals: usize,
) -> CompositionSpec<Rational> {
    let k = between(rng, 1, max_k as u64) as usize;
    let mut iets = Vec::with_capacity(k);
    let mut coefficients = Vec::with_capacity(k);
    for _ in 0..k {
        let m = between(rng, 1, max_intervals as u64) as usize;
        let weights: Vec<i64> = (0..m).map(|_| between(rng, 1, 64) as i64).collect();
        let total: i64 = weights.iter().sum();
        let lengths = weights.iter().map(|&w| Rational::new(w, total)).collect();
        let mut images: Vec<usize> = (0..m).collect();
        for i in (1..m).rev() {
            images.swap(i, below(rng, i as u64 + 1) as usize);
        }
        let perm = Permutation::from_zero_based(images).expect("shuffle is a bijection");
        iets.push(Iet::new(lengths, perm).expect("valid random IET"));
        coefficients.push(Rational::new(
            between(rng, 1, 48) as i64,
            between(rng, 1, 16) as i64,
        ));
    }
    CompositionSpec::new(iets, coefficients).expect("positive coefficients")
}

fn to_fixed(r: &Rational, cfg: &NumericsConfig) -> Fixed {
    Fixed::from_big_ratio(r.numer(), r.denom(), cfg)
}

fn to_exact(f: &Fixed) -> Rational {
    Rational::new(f.mantissa(), BigInt::from(1) << f.frac_bits())
}

fn fixed_f64(f: &Fixed) -> f64 {
    f.mantissa().to_f64().unwrap_or(f64::INFINITY) * (-(f.frac_bits() as f64)).exp2()
}

fn fixed_spec(spec: &CompositionSpec<Rational>, cfg: &NumericsConfig) -> CompositionSpec<Fixed> {
    let iets = spec
        .iets()
        .iter()
        .map(|t| {
            let lengths = t.lengths().iter().map(|l| to_fixed(l, cfg)).collect();
            Iet::new(lengths, t.permutation().clone()).expect("rounded IET stays valid")
        })
        .collect();
    let coefficients = spec
        .coefficients()
        .iter()
        .map(|c| to_fixed(c, cfg))
        .collect();
    CompositionSpec::new(iets, coefficients).expect("positive coefficients")
}

fn exact_spec(spec: &CompositionSpec<Fixed>) -> CompositionSpec<Rational> {
    let iets = spec
        .iets()
        .iter()
        .map(|t| {
            Iet::new(
                t.lengths().iter().map(to_exact).collect(),
                t.permutation().clone(),
            )
            .expect("exact IET")
        })
        .collect();
    CompositionSpec::new(iets, spec.coefficients().iter().map(to_exact).collect())
        .expect("positive coefficients")
}

struct ConfigOutcome {
    rational: OracleStats,
    fixed: OracleStats,
    reference: OracleStats,
    failures: Vec<String>,
}

fn check_config(
    config: &OracleConfig,
    index: usize,
    tolerance: &Fixed,
) -> Result<ConfigOutcome, ExperimentError> {
    let cfg = config.numerics;
    let mut rng = sample_rng(config.seed, index as u64);
    let spec = random_rational_spec(&mut rng, config.max_k, config.max_intervals);
    let alpha = random_unit_rational(&mut rng, 1_000_000);
    let mut failures = Vec::new();

    let mut rational = OracleStats::default();
    let surface = StackedSurface::build(&spec).expect("positive spec");
    let dir = Direction::new(alpha.clone()).expect("non-negative alpha");
    let s = build_composition(&spec, &alpha)?;
    let sum = spec.coefficient_sum();
    let predicted = sum.clone() * &sum * &dir.speed_squared();
    let time_gap = (return_time(&surface, &dir).squared() - &predicted).abs();
    rational.max_time_deviation = time_gap.to_f64();
    for _ in 0..config.starts {
        let x0 = random_unit_rational(&mut rng, 1_000_000);
        match first_return(&surface, &dir, &x0) {
            Err(SurfaceError::Singularity { .. }) => rational.singular_skipped += 1,
            Err(e) => panic!("unexpected surface error {e}"),
            Ok(fr) => {
                rational.comparisons += 1;
                let expected = s.map(&x0);
                let gap = circle_distance(&fr.x1, &expected);
                let time_gap = (fr.time.squared() - &predicted).abs();
                rational.max_deviation = rational.max_deviation.max(gap.to_f64());
                rational.max_time_deviation = rational.max_time_deviation.max(time_gap.to_f64());
                if !gap.is_zero() || !time_gap.is_zero() {
                    rational.mismatches += 1;
                    failures.push(format!(
                        "config {index}, alpha {alpha}, x0 {x0}: surface {} vs {expected}",
                        fr.x1
                    ));
                }
            }
        }
    }

    let mut fixed = OracleStats::default();
    let mut reference = OracleStats::default();
    let fspec = fixed_spec(&spec, &cfg);
    let falpha = match &config.fixed_alpha {
        Some(text) => {
            Fixed::parse(text, &cfg).map_err(|_| ExperimentError::BadAlpha(text.clone()))?
        }
        None => random_dyadic(&mut rng, &cfg),
    };
    let fsurface = StackedSurface::build(&fspec).expect("positive spec");
    let fdir = Direction::new(falpha.clone()).expect("non-negative alpha");
    let fs = build_composition(&fspec, &falpha)?;
    let total_time = return_time(&fsurface, &fdir)
        .elapsed
        .expect("fixed point has square roots");
    let espec = exact_spec(&fspec);
    let es = build_composition(&espec, &to_exact(&falpha))?;
    for _ in 0..config.starts {
        let x0: Fixed = random_dyadic(&mut rng, &cfg);
        match first_return(&fsurface, &fdir, &x0) {
            Err(SurfaceError::Singularity { .. }) => {
                fixed.singular_skipped += 1;
                reference.singular_skipped += 1;
            }
            Err(e) => panic!("unexpected surface error {e}"),
            Ok(fr) => {
                fixed.comparisons += 1;
                reference.comparisons += 1;
                let composed = fs.map(&x0);
                let gap = circle_distance(&fr.x1, &composed);
                let elapsed = fr.time.elapsed.expect("fixed point has square roots");
                let time_gap = (elapsed - &total_time).abs();
                fixed.max_deviation = fixed.max_deviation.max(fixed_f64(&gap));
                fixed.max_time_deviation = fixed.max_time_deviation.max(fixed_f64(&time_gap));
                if gap >= *tolerance || time_gap >= *tolerance {
                    fixed.mismatches += 1;
                    failures.push(format!(
                        "config {index}, fixed alpha {falpha}, x0 {x0}: deviation {gap}"
                    ));
                }
                let exact = es.map(&to_exact(&x0));
                let drift = circle_distance(&to_exact(&composed), &exact);
                reference.max_deviation = reference.max_deviation.max(drift.to_f64());
                if drift >= to_exact(tolerance) {
                    reference.mismatches += 1;
                    failures.push(format!(
                        "config {index}, fixed alpha {falpha}, x0 {x0}: drift {drift}"
                    ));
                }
            }
        }
    }
    Ok(ConfigOutcome {
        rational,
        fixed,
        reference,
        failures,
    })
}

/// Compares first returns on random stacked surfaces with
/// `build_composition`, exactly and in fixed point.
pub fn run_oracle_check(
    config: &OracleConfig,
    exec: Execution,
) -> Result<OracleReport, ExperimentError> {
    if config.configs == 0 || config.starts == 0 {
        return Err(ExperimentError::NoSamples);
    }
    let tolerance = Fixed::from_big_ratio(
        &BigInt::from(1),
        &(BigInt::from(1) << config.tolerance_bits),
        &config.numerics,
    );
    let outcomes = exec
        .map_range(config.configs, |i| check_config(config, i, &tolerance))
        .into_iter()
        .collect::<Result<Vec<_>, _>>()?;
    let mut rational = OracleStats::default();
    let mut fixed = OracleStats::default();
    let mut reference = OracleStats::default();
    let mut failures = Vec::new();
    for o in &outcomes {
        rational.merge(&o.rational);
        fixed.merge(&o.fixed);
        reference.merge(&o.reference);
        failures.extend(o.failures.iter().cloned());
    }
    failures.truncate(10);
    let passed = [&rational, &fixed, &reference]
        .iter()
        .all(|s| s.mismatches == 0 && s.comparisons > 0);
    Ok(OracleReport {
        config_hash: config_hash(config),
        seed: config.seed,
        precision: config.numerics.precision_bits(),
        tolerance: (-(config.tolerance_bits as f64)).exp2(),
        rational,
        fixed,
        reference,
        failures,
        passed,
    })
}
