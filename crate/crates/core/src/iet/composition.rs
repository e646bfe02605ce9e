use serde::{Deserialize, Serialize};

use super::{compose, Iet, IetError};
use crate::numerics::Scalar;

/// Whether a composition was built with all-positive coefficients or in the
/// mixed-sign exploration mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignMode {
    Positive,
    Mixed,
}

/// IETs `T_1 … T_k` and nonzero coefficients `c_1 … c_k`, defining
/// `α ↦ S_α = T_k ∘ R_{c_k α} ∘ … ∘ T_1 ∘ R_{c_1 α}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompositionSpec<S> {
    iets: Vec<Iet<S>>,
    coefficients: Vec<S>,
    mode: SignMode,
}

impl<S: Scalar> CompositionSpec<S> {
    /// All coefficients must be positive.
    pub fn new(iets: Vec<Iet<S>>, coefficients: Vec<S>) -> Result<Self, IetError> {
        Self::build(iets, coefficients, SignMode::Positive)
    }

    /// Coefficients may have either sign but must be nonzero.
    pub fn mixed(iets: Vec<Iet<S>>, coefficients: Vec<S>) -> Result<Self, IetError> {
        Self::build(iets, coefficients, SignMode::Mixed)
    }

    fn build(
        iets: Vec<Iet<S>>,
        coefficients: Vec<S>,
        requested: SignMode,
    ) -> Result<Self, IetError> {
        if iets.is_empty() {
            return Err(IetError::EmptyComposition);
        }
        if iets.len() != coefficients.len() {
            return Err(IetError::CoefficientCount {
                iets: iets.len(),
                coefficients: coefficients.len(),
            });
        }
        let precision = iets[0].precision();
        for p in iets
            .iter()
            .map(Iet::precision)
            .chain(coefficients.iter().map(Scalar::precision))
        {
            if p != precision {
                return Err(IetError::BackendMismatch(precision, p));
            }
        }
        for (index, c) in coefficients.iter().enumerate() {
            if c.is_zero() {
                return Err(IetError::ZeroCoefficient(index));
            }
            if requested == SignMode::Positive && c.is_negative() {
                return Err(IetError::NegativeCoefficient {
                    index,
                    value: c.to_string(),
                });
            }
        }
        let mode = if coefficients.iter().all(Scalar::is_positive) {
            SignMode::Positive
        } else {
            SignMode::Mixed
        };
        Ok(CompositionSpec {
            iets,
            coefficients,
            mode,
        })
    }

    /// `k` copies of the identity with the given coefficients.
    pub fn identities(coefficients: Vec<S>) -> Result<Self, IetError> {
        let cfg = coefficients
            .first()
            .ok_or(IetError::EmptyComposition)?
            .config();
        let iets = vec![Iet::identity(&cfg); coefficients.len()];
        Self::mixed(iets, coefficients)
    }

    pub fn len(&self) -> usize {
        self.iets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iets.is_empty()
    }

    pub fn iets(&self) -> &[Iet<S>] {
        &self.iets
    }

    pub fn coefficients(&self) -> &[S] {
        &self.coefficients
    }

    /// `Positive` iff every coefficient is positive.
    pub fn mode(&self) -> SignMode {
        self.mode
    }

    pub fn coefficient_sum(&self) -> S {
        let first = self.coefficients[0].clone();
        self.coefficients[1..].iter().fold(first, |acc, c| acc + c)
    }

    pub fn precision(&self) -> Option<u32> {
        self.iets[0].precision()
    }
}

/// Builds `S_α` as one canonical IET.
///
/// Works right to left: rotate by `c_1 α mod 1`, apply `T_1`, rotate by
/// `c_2 α mod 1`, and so on. Negative coefficients are reduced modulo 1 like
/// any other.
pub fn build_composition<S: Scalar>(
    spec: &CompositionSpec<S>,
    alpha: &S,
) -> Result<Iet<S>, IetError> {
    if alpha.precision() != spec.precision() {
        return Err(IetError::BackendMismatch(
            spec.precision(),
            alpha.precision(),
        ));
    }
    let mut acc = Iet::identity(&alpha.config());
    for (t, c) in spec.iets.iter().zip(&spec.coefficients) {
        let shift = (c.clone() * alpha).mod_one();
        acc = compose(&Iet::rotation(&shift), &acc)?;
        acc = compose(t, &acc)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{NumericsConfig, Rational};

    fn q(s: &str) -> Rational {
        Rational::parse(s, &NumericsConfig::default()).unwrap()
    }

    fn flip() -> Iet<Rational> {
        Iet::parse(&["1/2", "1/2"], &[2, 1], &NumericsConfig::default()).unwrap()
    }

    #[test]
    fn single_identity_gives_rotation() {
        let spec = CompositionSpec::identities(vec![q("1")]).unwrap();
        assert_eq!(
            build_composition(&spec, &q("2/7")).unwrap(),
            Iet::rotation(&q("2/7"))
        );
    }

    #[test]
    fn identities_collapse_to_total_rotation() {
        let spec = CompositionSpec::identities(vec![q("1/2"), q("3"), q("5/3")]).unwrap();
        let alpha = q("3/11");
        let total = spec.coefficient_sum() * &alpha;
        assert_eq!(
            build_composition(&spec, &alpha).unwrap(),
            Iet::rotation(&total)
        );
    }

    #[test]
    fn two_flips_match_sequential_application() {
        let spec = CompositionSpec::new(vec![flip(), flip()], vec![q("1"), q("1")]).unwrap();
        let alpha = q("1/5");
        let s = build_composition(&spec, &alpha).unwrap();
        for j in 0..1000 {
            let x = Rational::new(j, 1000);
            let mut y = x.clone();
            for t in spec.iets() {
                y = t.map(&(y + &alpha).mod_one());
            }
            assert_eq!(s.map(&x), y, "x = {x}");
        }
    }

    #[test]
    fn coefficient_validation() {
        assert!(matches!(
            CompositionSpec::<Rational>::new(vec![], vec![]),
            Err(IetError::EmptyComposition)
        ));
        assert!(matches!(
            CompositionSpec::new(vec![flip()], vec![q("0")]),
            Err(IetError::ZeroCoefficient(0))
        ));
        assert!(matches!(
            CompositionSpec::new(vec![flip()], vec![q("-1")]),
            Err(IetError::NegativeCoefficient { index: 0, .. })
        ));
        assert!(matches!(
            CompositionSpec::new(vec![flip()], vec![q("1"), q("2")]),
            Err(IetError::CoefficientCount { .. })
        ));
        let mixed = CompositionSpec::mixed(vec![flip(), flip()], vec![q("1"), q("-1/2")]).unwrap();
        assert_eq!(mixed.mode(), SignMode::Mixed);
        assert_eq!(mixed.coefficient_sum(), q("1/2"));
        let positive = CompositionSpec::mixed(vec![flip()], vec![q("2")]).unwrap();
        assert_eq!(positive.mode(), SignMode::Positive);
    }

    #[test]
    fn negative_coefficients_reduce_mod_one() {
        let spec = CompositionSpec::identities(vec![q("2"), q("-1")]).unwrap();
        let alpha = q("3/8");
        assert_eq!(
            build_composition(&spec, &alpha).unwrap(),
            Iet::rotation(&alpha)
        );
    }
}
