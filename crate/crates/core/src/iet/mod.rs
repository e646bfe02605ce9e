//! Interval exchange transformations.
//!
//! An IET on `[0, 1)` cuts the interval into `m` pieces of lengths `λ_i` and
//! reassembles them in the order given by a permutation. Every interval is
//! left-closed and right-open, so a breakpoint belongs to the piece on its
//! right and [`Iet::map`] is total on `[0, 1)`.

mod composition;
mod permutation;

use crate::numerics::{NumericsConfig, NumericsError, Scalar};

pub use composition::{build_composition, CompositionSpec, SignMode};
pub use permutation::Permutation;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum IetError {
    #[error("an IET needs at least one interval")]
    Empty,
    #[error("{lengths} lengths given for a permutation of size {permutation}")]
    SizeMismatch { lengths: usize, permutation: usize },
    #[error("length {index} is not positive: {value}")]
    NonPositiveLength { index: usize, value: String },
    #[error("lengths sum to {sum}, not 1")]
    LengthSum { sum: String },
    #[error("not a permutation: {0:?}")]
    NotBijective(Vec<usize>),
    #[error("point {0} lies outside [0, 1)")]
    OutOfRange(String),
    #[error("operands use different precisions ({0:?} vs {1:?})")]
    BackendMismatch(Option<u32>, Option<u32>),
    #[error("a composition needs at least one IET")]
    EmptyComposition,
    #[error("{iets} IETs given with {coefficients} coefficients")]
    CoefficientCount { iets: usize, coefficients: usize },
    #[error("coefficient {0} is zero")]
    ZeroCoefficient(usize),
    #[error("coefficient {index} is {value}; negative coefficients need the mixed-sign mode")]
    NegativeCoefficient { index: usize, value: String },
    #[error("coefficients sum to zero")]
    ZeroCoefficientSum,
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

/// An interval exchange transformation `T_{λ,π}`.
///
/// Stores the lengths and permutation plus the derived breakpoints
/// `0 = b_0 < … < b_m = 1` and per-interval translations `δ_i`, so that
/// `T(x) = x + δ_i` on `[b_i, b_{i+1})`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Iet<S> {
    lengths: Vec<S>,
    permutation: Permutation,
    breakpoints: Vec<S>,
    offsets: Vec<S>,
}

impl<S: Scalar> Iet<S> {
    /// Validates lengths and permutation.
    ///
    /// In fixed-point mode the lengths may miss 1 by the comparison
    /// tolerance; the last length then absorbs the difference.
    pub fn new(mut lengths: Vec<S>, permutation: Permutation) -> Result<Self, IetError> {
        if lengths.is_empty() {
            return Err(IetError::Empty);
        }
        if lengths.len() != permutation.len() {
            return Err(IetError::SizeMismatch {
                lengths: lengths.len(),
                permutation: permutation.len(),
            });
        }
        let precision = lengths[0].precision();
        if let Some(other) = lengths.iter().find(|l| l.precision() != precision) {
            return Err(IetError::BackendMismatch(precision, other.precision()));
        }
        if let Some((index, value)) = lengths.iter().enumerate().find(|(_, l)| !l.is_positive()) {
            return Err(IetError::NonPositiveLength {
                index,
                value: value.to_string(),
            });
        }
        let one = lengths[0].int_like(1);
        let sum = lengths
            .iter()
            .skip(1)
            .fold(lengths[0].clone(), |acc, l| acc + l);
        if !sum.near(&one) {
            return Err(IetError::LengthSum {
                sum: sum.to_string(),
            });
        }
        if sum != one {
            let m = lengths.len();
            let head = lengths[..m - 1]
                .iter()
                .fold(one.int_like(0), |acc, l| acc + l);
            let last = one - &head;
            if !last.is_positive() {
                return Err(IetError::NonPositiveLength {
                    index: m - 1,
                    value: last.to_string(),
                });
            }
            lengths[m - 1] = last;
        }
        Ok(Self::from_parts(lengths, permutation))
    }

    /// Parses one-based permutation images and length literals.
    pub fn parse(
        lengths: &[&str],
        permutation: &[usize],
        cfg: &NumericsConfig,
    ) -> Result<Self, IetError> {
        let lengths = lengths
            .iter()
            .map(|s| S::parse(s, cfg))
            .collect::<Result<Vec<_>, _>>()?;
        Self::new(lengths, Permutation::from_one_based(permutation)?)
    }

    /// Trusted constructor: lengths are positive and sum to exactly 1.
    fn from_parts(lengths: Vec<S>, permutation: Permutation) -> Self {
        let m = lengths.len();
        let zero = lengths[0].int_like(0);
        let mut breakpoints = Vec::with_capacity(m + 1);
        breakpoints.push(zero.clone());
        for l in &lengths[..m - 1] {
            let next = breakpoints.last().cloned().expect("non-empty") + l;
            breakpoints.push(next);
        }
        breakpoints.push(zero.int_like(1));

        let slots = permutation.inverse();
        let mut image_start = vec![zero.clone(); m];
        let mut acc = zero;
        for (slot, start) in image_start.iter_mut().enumerate() {
            *start = acc.clone();
            acc = acc + &lengths[slots.image(slot)];
        }
        let offsets = (0..m)
            .map(|i| image_start[permutation.image(i)].clone() - &breakpoints[i])
            .collect();
        Iet {
            lengths,
            permutation,
            breakpoints,
            offsets,
        }
    }

    /// The identity map as a one-interval IET.
    pub fn identity(cfg: &NumericsConfig) -> Self {
        Self::from_parts(vec![S::one(cfg)], Permutation::identity(1))
    }

    /// The rotation `x ↦ x + α mod 1`.
    ///
    /// Returns the identity when `α` is an integer, otherwise the two-interval
    /// exchange with lengths `(1 - α, α)` and permutation `(2, 1)`.
    pub fn rotation(alpha: &S) -> Self {
        let a = alpha.mod_one();
        if a.is_zero() {
            return Self::from_parts(vec![a.int_like(1)], Permutation::identity(1));
        }
        let rest = a.int_like(1) - &a;
        Self::from_parts(vec![rest, a], Permutation::reversal(2))
    }

    pub fn len(&self) -> usize {
        self.lengths.len()
    }

    pub fn is_empty(&self) -> bool {
        self.lengths.is_empty()
    }

    pub fn lengths(&self) -> &[S] {
        &self.lengths
    }

    pub fn permutation(&self) -> &Permutation {
        &self.permutation
    }

    /// `b_0, …, b_m` with `b_0 = 0` and `b_m = 1`.
    pub fn breakpoints(&self) -> &[S] {
        &self.breakpoints
    }

    /// `b_1, …, b_{m-1}`.
    pub fn interior_breakpoints(&self) -> &[S] {
        &self.breakpoints[1..self.len()]
    }

    pub fn offsets(&self) -> &[S] {
        &self.offsets
    }

    pub fn precision(&self) -> Option<u32> {
        self.lengths[0].precision()
    }

    pub fn config(&self) -> NumericsConfig {
        self.lengths[0].config()
    }

    pub fn is_identity(&self) -> bool {
        self.offsets.iter().all(|d| d.is_zero())
    }

    /// Index of the interval containing `x`; `x` must lie in `[0, 1)`.
    #[inline]
    pub fn interval_index(&self, x: &S) -> usize {
        self.breakpoints[1..self.len()].partition_point(|b| b <= x)
    }

    /// `T(x)` without the range check.
    #[inline]
    pub fn map(&self, x: &S) -> S {
        x.clone() + &self.offsets[self.interval_index(x)]
    }

    /// `T(x)` for `x ∈ [0, 1)`.
    pub fn apply(&self, x: &S) -> Result<S, IetError> {
        if x.is_negative() || *x >= x.int_like(1) {
            return Err(IetError::OutOfRange(x.to_string()));
        }
        Ok(self.map(x))
    }

    pub fn invert(&self) -> Self {
        let slots = self.permutation.inverse();
        let lengths = (0..self.len())
            .map(|slot| self.lengths[slots.image(slot)].clone())
            .collect();
        Self::from_parts(lengths, slots)
    }

    /// Breakpoints `b_j` (including `b_0 = 0`) where `T` is discontinuous as a
    /// map of the circle `ℝ/ℤ`, i.e. where the translations of the two
    /// adjacent pieces differ modulo 1.
    ///
    /// A rotation presented as a two-interval exchange has none.
    pub fn circle_discontinuities(&self) -> Vec<S> {
        let m = self.len();
        (0..m)
            .filter(|&j| {
                let prev = if j == 0 { m - 1 } else { j - 1 };
                !self.offsets[prev].near_mod_one(&self.offsets[j])
            })
            .map(|j| self.breakpoints[j].clone())
            .collect()
    }

    /// Drops degenerate pieces and merges neighbours that translate together.
    ///
    /// Pieces of zero length (or below the fixed-point tolerance) are folded
    /// into their left neighbour. Adjacent pieces whose images are adjacent
    /// and whose translations agree are merged. Idempotent.
    pub fn canonicalize(&self) -> Self {
        canonical_from_cells(self.lengths.clone(), self.permutation.images().to_vec())
    }

    /// Whether both maps have the same canonical form (lengths compared up
    /// to the fixed-point tolerance).
    pub fn equivalent(&self, other: &Self) -> Result<bool, IetError> {
        if self.precision() != other.precision() {
            return Err(IetError::BackendMismatch(
                self.precision(),
                other.precision(),
            ));
        }
        let a = self.canonicalize();
        let b = other.canonicalize();
        Ok(a.permutation == b.permutation
            && a.lengths.iter().zip(&b.lengths).all(|(x, y)| x.near(y)))
    }
}

/// `outer ∘ inner` before canonicalization.
///
/// The domain is cut at the breakpoints of `inner` and at the `inner`-preimages
/// of the breakpoints of `outer`; both maps are translations on each cell.
pub fn compose_raw<S: Scalar>(outer: &Iet<S>, inner: &Iet<S>) -> Result<Iet<S>, IetError> {
    if outer.precision() != inner.precision() {
        return Err(IetError::BackendMismatch(
            outer.precision(),
            inner.precision(),
        ));
    }
    let inner_inv = inner.invert();
    let mut cuts: Vec<S> = inner.breakpoints[..inner.len()].to_vec();
    cuts.extend(
        outer
            .interior_breakpoints()
            .iter()
            .map(|d| inner_inv.map(d)),
    );
    cuts.sort_unstable();
    cuts.dedup();

    let one = cuts[0].int_like(1);
    let lengths: Vec<S> = cuts
        .iter()
        .zip(cuts.iter().skip(1).chain(std::iter::once(&one)))
        .map(|(a, b)| b.clone() - a)
        .collect();
    let image_starts: Vec<S> = cuts.iter().map(|p| outer.map(&inner.map(p))).collect();
    let ranks = ranks_of(&image_starts);
    Ok(Iet::from_parts(
        lengths,
        Permutation::from_zero_based(ranks)?,
    ))
}

/// `outer ∘ inner`, canonicalized. Has at most `m_outer + m_inner - 1` pieces.
pub fn compose<S: Scalar>(outer: &Iet<S>, inner: &Iet<S>) -> Result<Iet<S>, IetError> {
    Ok(compose_raw(outer, inner)?.canonicalize())
}

/// Canonical-form equality of two IETs.
pub fn iet_equal<S: Scalar>(a: &Iet<S>, b: &Iet<S>) -> Result<bool, IetError> {
    a.equivalent(b)
}

fn ranks_of<S: Ord>(values: &[S]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].cmp(&values[b]));
    let mut ranks = vec![0; values.len()];
    for (rank, i) in order.into_iter().enumerate() {
        ranks[i] = rank;
    }
    ranks
}

fn rerank(ranks: &mut [usize]) {
    let fresh = ranks_of(ranks);
    ranks.copy_from_slice(&fresh);
}

/// Translation of each cell given lengths and image ranks.
fn cell_offsets<S: Scalar>(lengths: &[S], ranks: &[usize]) -> Vec<S> {
    let m = lengths.len();
    let zero = lengths[0].int_like(0);
    let mut by_rank = vec![0; m];
    for (i, &r) in ranks.iter().enumerate() {
        by_rank[r] = i;
    }
    let mut image_start = vec![zero.clone(); m];
    let mut acc = zero.clone();
    for &i in &by_rank {
        image_start[i] = acc.clone();
        acc = acc + &lengths[i];
    }
    let mut start = zero;
    let mut out = Vec::with_capacity(m);
    for i in 0..m {
        out.push(image_start[i].clone() - &start);
        start = start + &lengths[i];
    }
    out
}

fn canonical_from_cells<S: Scalar>(mut lengths: Vec<S>, mut ranks: Vec<usize>) -> Iet<S> {
    let tol = lengths[0].tolerance();
    let degenerate = |l: &S| match &tol {
        None => !l.is_positive(),
        Some(t) => l < t,
    };
    loop {
        if lengths.len() > 1 {
            if let Some(i) = lengths.iter().position(degenerate) {
                let width = lengths.remove(i);
                ranks.remove(i);
                rerank(&mut ranks);
                let target = i.saturating_sub(1);
                lengths[target] = lengths[target].clone() + &width;
                continue;
            }
        }
        let offsets = cell_offsets(&lengths, &ranks);
        let mergeable = (0..lengths.len().saturating_sub(1))
            .find(|&i| ranks[i + 1] == ranks[i] + 1 && offsets[i].near(&offsets[i + 1]));
        match mergeable {
            Some(i) => {
                let width = lengths.remove(i + 1);
                lengths[i] = lengths[i].clone() + &width;
                ranks.remove(i + 1);
                rerank(&mut ranks);
            }
            None => break,
        }
    }
    Iet::from_parts(
        lengths,
        Permutation::from_zero_based(ranks).expect("ranks form a permutation"),
    )
}
