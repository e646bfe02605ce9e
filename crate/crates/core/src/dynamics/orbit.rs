use crate::iet::Iet;
use crate::numerics::Scalar;

use super::DynamicsError;

/// A finite forward orbit `x_0, T x_0, …`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit<S> {
    pub points: Vec<S>,
    /// Index `j` of the first point at which `T` is discontinuous; the orbit
    /// stops there (the point itself is included).
    pub singularity: Option<usize>,
}

/// Iterates an IET while watching for its discontinuities.
///
/// A point is singular when it coincides with (rational backend) or lies
/// within the tolerance of (fixed-point backend) a discontinuity of the map
/// viewed on the circle; see [`Iet::circle_discontinuities`].
#[derive(Debug, Clone)]
pub struct Stepper<'a, S> {
    iet: &'a Iet<S>,
    singular: Vec<S>,
}

impl<'a, S: Scalar> Stepper<'a, S> {
    pub fn new(iet: &'a Iet<S>) -> Self {
        Stepper {
            iet,
            singular: iet.circle_discontinuities(),
        }
    }

    pub fn iet(&self) -> &Iet<S> {
        self.iet
    }

    #[inline]
    pub fn step(&self, x: &S) -> S {
        self.iet.map(x)
    }

    #[inline]
    pub fn is_singular(&self, x: &S) -> bool {
        let s = &self.singular;
        if s.is_empty() {
            return false;
        }
        let idx = s.partition_point(|b| b <= x);
        let hit = |i: usize| s[i].near_mod_one(x);
        (idx > 0 && hit(idx - 1)) || (idx < s.len() && hit(idx)) || hit(0) || hit(s.len() - 1)
    }
}

/// `(x_0, T x_0, …, T^{N-1} x_0)`, stopping early at a singular point.
pub fn orbit<S: Scalar>(iet: &Iet<S>, x0: &S, n: usize) -> Result<Orbit<S>, DynamicsError> {
    if n == 0 {
        return Err(DynamicsError::EmptyOrbit);
    }
    check_start(x0)?;
    let stepper = Stepper::new(iet);
    let mut points = Vec::with_capacity(n);
    let mut x = x0.clone();
    for j in 0..n {
        points.push(x.clone());
        if j + 1 == n {
            break;
        }
        if stepper.is_singular(&x) {
            return Ok(Orbit {
                points,
                singularity: Some(j),
            });
        }
        x = stepper.step(&x);
    }
    Ok(Orbit {
        points,
        singularity: None,
    })
}

pub(super) fn check_start<S: Scalar>(x0: &S) -> Result<(), DynamicsError> {
    if x0.is_negative() || *x0 >= x0.int_like(1) {
        return Err(DynamicsError::StartOutOfRange(x0.to_string()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{Fixed, NumericsConfig, Rational};

    fn q(s: &str) -> Rational {
        Rational::parse(s, &NumericsConfig::default()).unwrap()
    }

    #[test]
    fn identity_orbit_is_constant() {
        let id = Iet::identity(&NumericsConfig::default());
        let o = orbit(&id, &q("2/5"), 5).unwrap();
        assert_eq!(o.points, vec![q("2/5"); 5]);
        assert_eq!(o.singularity, None);
    }

    #[test]
    fn rotation_orbits() {
        let o = orbit(&Iet::rotation(&q("1/4")), &q("0"), 4).unwrap();
        assert_eq!(o.points, vec![q("0"), q("1/4"), q("1/2"), q("3/4")]);
        let o = orbit(&Iet::rotation(&q("1/2")), &q("1/2"), 3).unwrap();
        assert_eq!(o.points, vec![q("1/2"), q("0"), q("1/2")]);
        assert_eq!(o.singularity, None);
    }

    #[test]
    fn stops_at_discontinuity() {
        let t = Iet::<Rational>::parse(
            &["1/2", "1/4", "1/4"],
            &[3, 2, 1],
            &NumericsConfig::default(),
        )
        .unwrap();
        // 1/4 -> 3/4, a jump of the map
        let o = orbit(&t, &q("1/4"), 10).unwrap();
        assert_eq!(o.points, vec![q("1/4"), q("3/4")]);
        assert_eq!(o.singularity, Some(1));
        // the last requested point may be singular without being flagged
        let o = orbit(&t, &q("1/4"), 2).unwrap();
        assert_eq!(o.singularity, None);
    }

    #[test]
    fn fixed_point_singularity_uses_tolerance() {
        let cfg = NumericsConfig::new(64).unwrap();
        let t = Iet::<Fixed>::parse(&["1/2", "1/4", "1/4"], &[3, 2, 1], &cfg).unwrap();
        let eps = Fixed::from_mantissa(&num_bigint::BigInt::from(1000), 64);
        let x = Fixed::parse("0.5", &cfg).unwrap() + &eps;
        assert!(Stepper::new(&t).is_singular(&x));
        // within tolerance of 1 is within tolerance of the wrap point 0
        let y = Fixed::one(&cfg) - &eps;
        assert!(Stepper::new(&t).is_singular(&y));
        assert!(!Stepper::new(&t).is_singular(&Fixed::parse("0.6", &cfg).unwrap()));
    }

    #[test]
    fn rejects_bad_input() {
        let id = Iet::<Rational>::identity(&NumericsConfig::default());
        assert_eq!(
            orbit(&id, &q("1"), 3),
            Err(DynamicsError::StartOutOfRange("1/1".into()))
        );
        assert_eq!(orbit(&id, &q("0"), 0), Err(DynamicsError::EmptyOrbit));
    }
}
