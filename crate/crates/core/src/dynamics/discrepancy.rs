use crate::numerics::Scalar;

use super::DynamicsError;

/// Exact star discrepancy
/// `D*_N = max_i max(i/N - x_(i), x_(i) - (i-1)/N)` of points in `[0, 1)`.
pub fn star_discrepancy<S: Scalar>(points: &[S]) -> Result<S, DynamicsError> {
    if points.is_empty() {
        return Err(DynamicsError::EmptyInput);
    }
    let cfg = points[0].config();
    let n = points.len() as i64;
    let mut sorted = points.to_vec();
    sorted.sort_unstable();
    let mut worst = S::zero(&cfg);
    for (idx, x) in sorted.iter().enumerate() {
        let i = idx as i64 + 1;
        let above = S::from_ratio(i, n, &cfg) - x;
        let below = x.clone() - &S::from_ratio(i - 1, n, &cfg);
        worst = worst.max(above).max(below);
    }
    Ok(worst)
}

/// Star discrepancy of `f64` samples; sorts `points` in place.
///
/// Used for long orbits where the points have been rounded to `f64`; the
/// result differs from the exact value by at most the rounding of the points.
pub fn star_discrepancy_f64(points: &mut [f64]) -> Result<f64, DynamicsError> {
    if points.is_empty() {
        return Err(DynamicsError::EmptyInput);
    }
    points.sort_unstable_by(f64::total_cmp);
    let n = points.len() as f64;
    Ok(points.iter().enumerate().fold(0.0f64, |worst, (idx, &x)| {
        let i = idx as f64;
        worst.max((i + 1.0) / n - x).max(x - i / n)
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{NumericsConfig, Rational};

    fn qs(v: &[&str]) -> Vec<Rational> {
        v.iter()
            .map(|s| Rational::parse(s, &NumericsConfig::default()).unwrap())
            .collect()
    }

    #[test]
    fn examples() {
        assert_eq!(
            star_discrepancy(&qs(&["1/4", "3/4"])).unwrap(),
            qs(&["1/4"])[0]
        );
        assert_eq!(
            star_discrepancy(&qs(&["0", "1/2"])).unwrap(),
            qs(&["1/2"])[0]
        );
        assert_eq!(star_discrepancy(&qs(&["0"])).unwrap(), qs(&["1"])[0]);
        assert_eq!(
            star_discrepancy::<Rational>(&[]),
            Err(DynamicsError::EmptyInput)
        );
    }

    #[test]
    fn float_path_agrees() {
        let exact = qs(&["1/3", "1/7", "5/6", "2/9", "1/2"]);
        let mut floats: Vec<f64> = exact.iter().map(Scalar::to_f64).collect();
        let d = star_discrepancy(&exact).unwrap().to_f64();
        assert!((star_discrepancy_f64(&mut floats).unwrap() - d).abs() < 1e-15);
        assert_eq!(
            star_discrepancy_f64(&mut []),
            Err(DynamicsError::EmptyInput)
        );
    }

    #[test]
    fn repeated_point() {
        // N copies of x: the worst gap is max(1 - x, x)
        let pts = qs(&["1/4", "1/4", "1/4", "1/4"]);
        assert_eq!(star_discrepancy(&pts).unwrap(), qs(&["3/4"])[0]);
    }
}
