use serde::Serialize;

use crate::iet::Iet;
use crate::numerics::Scalar;

use super::DynamicsError;

/// Outcome of the finite-depth distinct-orbit check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "lowercase")]
pub enum IdocVerdict<S> {
    /// No breakpoint orbit met a breakpoint within `depth` steps. Evidence,
    /// not proof.
    Pass { depth: usize },
    /// `T^steps(breakpoint) = hit`, where `hit` is an interior breakpoint.
    Fail { breakpoint: S, steps: usize, hit: S },
}

impl<S> IdocVerdict<S> {
    pub fn passed(&self) -> bool {
        matches!(self, IdocVerdict::Pass { .. })
    }

    /// `"PASS"` or `"FAIL@n"`, as written to CSV.
    pub fn label(&self) -> String {
        match self {
            IdocVerdict::Pass { .. } => "PASS".to_string(),
            IdocVerdict::Fail { steps, .. } => format!("FAIL@{steps}"),
        }
    }
}

/// Keane's infinite distinct orbit condition, checked to a finite depth.
///
/// Uses the interior breakpoints of the canonical form. Since `T` is
/// injective, two breakpoint orbits can only merge if one orbit passes
/// through another breakpoint, so checking `T^n(d) ∉ {breakpoints}` for all
/// `n ≤ depth` also rules out collisions up to that depth. Orbits are
/// advanced together so the reported witness has the smallest `n`.
pub fn idoc_check<S: Scalar>(iet: &Iet<S>, depth: usize) -> Result<IdocVerdict<S>, DynamicsError> {
    if depth == 0 {
        return Err(DynamicsError::ZeroDepth);
    }
    let t = iet.canonicalize();
    let breakpoints = t.interior_breakpoints().to_vec();
    let mut current = breakpoints.clone();
    for n in 1..=depth {
        for (d, x) in breakpoints.iter().zip(current.iter_mut()) {
            *x = t.map(x);
            if let Some(hit) = find_match(&breakpoints, x) {
                return Ok(IdocVerdict::Fail {
                    breakpoint: d.clone(),
                    steps: n,
                    hit: hit.clone(),
                });
            }
        }
    }
    Ok(IdocVerdict::Pass { depth })
}

fn find_match<'a, S: Scalar>(sorted: &'a [S], x: &S) -> Option<&'a S> {
    let idx = sorted.partition_point(|b| b <= x);
    [idx.checked_sub(1), Some(idx)]
        .into_iter()
        .flatten()
        .filter_map(|i| sorted.get(i))
        .find(|b| b.near(x))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{NumericsConfig, Rational};

    fn q(s: &str) -> Rational {
        Rational::parse(s, &NumericsConfig::default()).unwrap()
    }

    #[test]
    fn half_rotation_fails_at_two() {
        let v = idoc_check(&Iet::rotation(&q("1/2")), 10).unwrap();
        assert_eq!(
            v,
            IdocVerdict::Fail {
                breakpoint: q("1/2"),
                steps: 2,
                hit: q("1/2")
            }
        );
        assert_eq!(v.label(), "FAIL@2");
    }

    #[test]
    fn identity_passes_vacuously() {
        let v = idoc_check(&Iet::<Rational>::identity(&NumericsConfig::default()), 5).unwrap();
        assert_eq!(v, IdocVerdict::Pass { depth: 5 });
    }

    #[test]
    fn rational_lengths_are_eventually_periodic() {
        let t = Iet::<Rational>::parse(
            &["1/2", "1/4", "1/4"],
            &[3, 2, 1],
            &NumericsConfig::default(),
        )
        .unwrap();
        let v = idoc_check(&t, 100).unwrap();
        let IdocVerdict::Fail {
            breakpoint,
            steps,
            hit,
        } = v
        else {
            panic!("expected a failure")
        };
        // replay the witness
        let mut x = breakpoint;
        for _ in 0..steps {
            x = t.map(&x);
        }
        assert_eq!(x, hit);
    }

    #[test]
    fn zero_depth_rejected() {
        assert_eq!(
            idoc_check(&Iet::rotation(&q("1/3")), 0),
            Err(DynamicsError::ZeroDepth)
        );
    }
}
