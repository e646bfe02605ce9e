use std::f64::consts::TAU;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::iet::Iet;
use crate::numerics::Scalar;

use super::orbit::{check_start, Stepper};
use super::DynamicsError;

/// Mean-zero observables `cos(2πkx)` and `sin(2πkx)`, `k ≥ 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub enum TestFunction {
    Cos(u32),
    Sin(u32),
}

impl TestFunction {
    /// `cos 2πx, sin 2πx, …, cos 2πKx, sin 2πKx`.
    pub fn family(k_max: u32) -> Vec<TestFunction> {
        (1..=k_max)
            .flat_map(|k| [TestFunction::Cos(k), TestFunction::Sin(k)])
            .collect()
    }

    pub fn frequency(&self) -> u32 {
        match *self {
            TestFunction::Cos(k) | TestFunction::Sin(k) => k,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        let phase = TAU * (self.frequency() as f64 * x).fract();
        match self {
            TestFunction::Cos(_) => phase.cos(),
            TestFunction::Sin(_) => phase.sin(),
        }
    }
}

impl fmt::Display for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TestFunction::Cos(k) => write!(f, "cos{k}"),
            TestFunction::Sin(k) => write!(f, "sin{k}"),
        }
    }
}

impl FromStr for TestFunction {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || format!("unknown test function {s:?}; expected cos<k> or sin<k> with k >= 1");
        let (kind, k) = s.split_at(s.len().min(3));
        let k: u32 = k.parse().map_err(|_| bad())?;
        if k == 0 {
            return Err(bad());
        }
        match kind {
            "cos" => Ok(TestFunction::Cos(k)),
            "sin" => Ok(TestFunction::Sin(k)),
            _ => Err(bad()),
        }
    }
}

impl TryFrom<String> for TestFunction {
    type Error = String;
    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl From<TestFunction> for String {
    fn from(f: TestFunction) -> String {
        f.to_string()
    }
}

/// Birkhoff sum `S_N f(x_0) = Σ_{i<N} f(T^i x_0)` at one ladder length.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LadderSum {
    pub n: u64,
    pub sum: f64,
}

/// Birkhoff sums of one observable at every ladder length, in one pass.
///
/// If the orbit reaches a discontinuity the sums stop there; the returned
/// singularity index says where, and only ladder lengths reached are listed.
pub fn birkhoff_ladder<S: Scalar>(
    iet: &Iet<S>,
    f: TestFunction,
    x0: &S,
    ladder: &[u64],
) -> Result<(Vec<LadderSum>, Option<usize>), DynamicsError> {
    check_ladder(ladder)?;
    check_start(x0)?;
    let stepper = Stepper::new(iet);
    let mut out = Vec::with_capacity(ladder.len());
    let mut rungs = ladder.iter().copied().peekable();
    let mut x = x0.clone();
    let mut sum = 0.0;
    let n_max = *ladder.last().expect("non-empty ladder");
    for n in 1..=n_max {
        sum += f.eval(x.to_f64());
        if rungs.next_if_eq(&n).is_some() {
            out.push(LadderSum { n, sum });
        }
        if n == n_max {
            break;
        }
        if stepper.is_singular(&x) {
            return Ok((out, Some(n as usize - 1)));
        }
        x = stepper.step(&x);
    }
    Ok((out, None))
}

pub(super) fn check_ladder(ladder: &[u64]) -> Result<(), DynamicsError> {
    if ladder.is_empty() || ladder[0] == 0 || ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(DynamicsError::BadLadder);
    }
    Ok(())
}

/// Least-squares growth exponent of Birkhoff deviations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DeviationFit {
    /// Slope of `log max(1, M_N)` against `log N`.
    pub beta_hat: f64,
    pub r_squared: f64,
    /// First and last ladder length used.
    pub window: (u64, u64),
    /// All deviations were zero; `beta_hat` is reported as 0.
    pub degenerate: bool,
}

/// Fits `β̂` from `(N, |S_N|)` pairs.
///
/// Deviations are first made monotone (cumulative maximum along the ladder)
/// and floored at 1; the fit uses the upper half of the ladder. Callers
/// normally pass the running maximum over `n ≤ N` and over a function
/// family, see [`super::LadderEntry::running_max`].
pub fn deviation_exponent_fit(series: &[(u64, f64)]) -> Result<DeviationFit, DynamicsError> {
    if series.len() < 4 {
        return Err(DynamicsError::ShortLadder(series.len()));
    }
    if series[0].0 == 0 || series.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(DynamicsError::BadLadder);
    }
    let start = series.len() / 2;
    let window = (series[start].0, series[series.len() - 1].0);
    if series.iter().all(|&(_, s)| s == 0.0) {
        return Ok(DeviationFit {
            beta_hat: 0.0,
            r_squared: 1.0,
            window,
            degenerate: true,
        });
    }
    let mut running = 0.0f64;
    let points: Vec<(f64, f64)> = series
        .iter()
        .map(|&(n, s)| {
            running = running.max(s.abs());
            ((n as f64).ln(), running.max(1.0).ln())
        })
        .skip(start)
        .collect();
    let k = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / k;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = points
        .iter()
        .map(|p| (p.1 - mean_y - slope * (p.0 - mean_x)).powi(2))
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(DeviationFit {
        beta_hat: slope,
        r_squared,
        window,
        degenerate: false,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{NumericsConfig, Rational};

    fn q(s: &str) -> Rational {
        Rational::parse(s, &NumericsConfig::default()).unwrap()
    }

    #[test]
    fn family_and_names() {
        let fam = TestFunction::family(3);
        assert_eq!(fam.len(), 6);
        assert_eq!(fam[2].to_string(), "cos2");
        assert_eq!(
            "sin3".parse::<TestFunction>().unwrap(),
            TestFunction::Sin(3)
        );
        assert!("cos0".parse::<TestFunction>().is_err());
        assert!("tan1".parse::<TestFunction>().is_err());
        assert!("c".parse::<TestFunction>().is_err());
    }

    #[test]
    fn family_is_mean_zero() {
        // midpoint rule on a grid is exact for trigonometric polynomials of low degree
        let n = 997;
        for f in TestFunction::family(3) {
            let mean = (0..n)
                .map(|i| f.eval((i as f64 + 0.5) / n as f64))
                .sum::<f64>()
                / n as f64;
            assert!(mean.abs() < 1e-12, "{f}: {mean}");
        }
    }

    #[test]
    fn identity_sums_grow_linearly() {
        let id = Iet::identity(&NumericsConfig::default());
        let ladder = [1, 2, 5, 10];
        let (sums, sing) = birkhoff_ladder(&id, TestFunction::Cos(1), &q("0"), &ladder).unwrap();
        assert_eq!(sing, None);
        for s in sums {
            assert_eq!(s.sum, s.n as f64);
        }
    }

    #[test]
    fn half_rotation_sums_alternate() {
        let r = Iet::rotation(&q("1/2"));
        let ladder: Vec<u64> = (1..=8).collect();
        let (sums, _) = birkhoff_ladder(&r, TestFunction::Cos(1), &q("0"), &ladder).unwrap();
        let values: Vec<f64> = sums.iter().map(|s| s.sum.round()).collect();
        assert_eq!(values, vec![1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
        assert!(sums.iter().all(|s| s.sum.abs() <= 1.0 + 1e-12));
    }

    #[test]
    fn ladder_validation() {
        let id = Iet::<Rational>::identity(&NumericsConfig::default());
        for bad in [&[][..], &[0, 4][..], &[4, 4][..], &[8, 4][..]] {
            assert_eq!(
                birkhoff_ladder(&id, TestFunction::Cos(1), &q("0"), bad).unwrap_err(),
                DynamicsError::BadLadder
            );
        }
    }

    fn dyadic(f: impl Fn(u64) -> f64) -> Vec<(u64, f64)> {
        (10..=20).map(|e| 1u64 << e).map(|n| (n, f(n))).collect()
    }

    #[test]
    fn fit_examples() {
        let zero = deviation_exponent_fit(&dyadic(|_| 0.0)).unwrap();
        assert_eq!(zero.beta_hat, 0.0);
        assert!(zero.degenerate);

        let linear = deviation_exponent_fit(&dyadic(|n| n as f64)).unwrap();
        assert!((linear.beta_hat - 1.0).abs() < 1e-12);
        assert!((linear.r_squared - 1.0).abs() < 1e-12);
        assert_eq!(linear.window, (1 << 15, 1 << 20));

        let root = deviation_exponent_fit(&dyadic(|n| (n as f64).sqrt())).unwrap();
        assert!((root.beta_hat - 0.5).abs() < 1e-12);

        let bounded = deviation_exponent_fit(&dyadic(|_| 0.7)).unwrap();
        assert_eq!(bounded.beta_hat, 0.0);
        assert!(!bounded.degenerate);

        assert_eq!(
            deviation_exponent_fit(&[(1, 1.0), (2, 1.0), (4, 1.0)]),
            Err(DynamicsError::ShortLadder(3))
        );
    }

    #[test]
    fn fit_enforces_monotone_ladder() {
        // a dip in |S_N| is ignored: the cumulative maximum is fitted
        let mut series = dyadic(|n| n as f64);
        series[8].1 = 1.0;
        let fit = deviation_exponent_fit(&series).unwrap();
        let clean = deviation_exponent_fit(&dyadic(|n| n as f64)).unwrap();
        assert!(fit.beta_hat < clean.beta_hat);
        assert!(fit.beta_hat > 0.5);
    }
}
