use std::fmt;

use super::IetError;

/// A bijection of `{0, …, m-1}`; `image(i)` is the slot interval `i`
/// occupies after the exchange.
///
/// Externally (JSON, display) permutations are written one-based, matching
/// the usual `π = (3, 2, 1)` notation.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Builds a permutation from one-based images.
    pub fn from_one_based(images: &[usize]) -> Result<Self, IetError> {
        let zero_based = images
            .iter()
            .map(|&p| {
                p.checked_sub(1)
                    .ok_or(IetError::NotBijective(images.to_vec()))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_zero_based(zero_based).map_err(|_| IetError::NotBijective(images.to_vec()))
    }

    pub fn from_zero_based(images: Vec<usize>) -> Result<Self, IetError> {
        let m = images.len();
        let mut seen = vec![false; m];
        for &p in &images {
            if p >= m || std::mem::replace(&mut seen[p], true) {
                return Err(IetError::NotBijective(
                    images.iter().map(|p| p + 1).collect(),
                ));
            }
        }
        Ok(Permutation(images))
    }

    pub fn identity(m: usize) -> Self {
        Permutation((0..m).collect())
    }

    /// The order-reversing permutation `(m, m-1, …, 1)`.
    pub fn reversal(m: usize) -> Self {
        Permutation((0..m).rev().collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn image(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    pub fn to_one_based(&self) -> Vec<usize> {
        self.0.iter().map(|p| p + 1).collect()
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.0.len()];
        for (i, &p) in self.0.iter().enumerate() {
            inv[p] = i;
        }
        Permutation(inv)
    }

    /// True when no proper prefix `{1..k}` is mapped onto itself.
    pub fn is_irreducible(&self) -> bool {
        let mut max_image = 0;
        for (k, &p) in self
            .0
            .iter()
            .enumerate()
            .take(self.0.len().saturating_sub(1))
        {
            max_image = max_image.max(p);
            if max_image == k {
                return false;
            }
        }
        true
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        f.write_str(")")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn perm(images: &[usize]) -> Permutation {
        Permutation::from_one_based(images).unwrap()
    }

    #[test]
    fn irreducibility() {
        assert!(perm(&[2, 1]).is_irreducible());
        assert!(!perm(&[1, 2]).is_irreducible());
        assert!(!perm(&[2, 1, 3]).is_irreducible());
        assert!(perm(&[3, 2, 1]).is_irreducible());
        assert!(perm(&[2, 3, 1]).is_irreducible());
        assert!(perm(&[1]).is_irreducible());
    }

    #[test]
    fn rejects_non_bijections() {
        assert!(Permutation::from_one_based(&[1, 1]).is_err());
        assert!(Permutation::from_one_based(&[0, 1]).is_err());
        assert!(Permutation::from_one_based(&[1, 3]).is_err());
    }

    #[test]
    fn inverse_round_trip() {
        let p = perm(&[2, 3, 1]);
        assert_eq!(p.inverse().to_one_based(), vec![3, 1, 2]);
        assert_eq!(p.inverse().inverse(), p);
        assert_eq!(p.to_string(), "(2,3,1)");
    }
}
