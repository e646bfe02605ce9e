use std::collections::BTreeSet;
use std::ops::Bound;

use serde::Serialize;

use crate::iet::Iet;
use crate::numerics::Scalar;

use super::DynamicsError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyPRow<S> {
    pub n: usize,
    /// Smallest cell of the partition cut at 0 and `T^{-j}(d)`, `j < n`.
    pub epsilon: S,
    pub n_epsilon: S,
}

/// The profile `(n, ε_n, n·ε_n)` for `n = 1..n_max`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PropertyPReport<S> {
    pub rows: Vec<PropertyPRow<S>>,
    /// First `n` at which a new backward image coincided with an existing
    /// cut point (a periodic breakpoint orbit). Coinciding points are merged,
    /// so `ε_n` stays positive.
    pub first_collision: Option<usize>,
}

impl<S: Scalar> PropertyPReport<S> {
    pub fn min_n_epsilon(&self) -> &S {
        self.rows
            .iter()
            .map(|r| &r.n_epsilon)
            .min()
            .expect("n_max >= 1")
    }

    pub fn last(&self) -> &PropertyPRow<S> {
        self.rows.last().expect("n_max >= 1")
    }
}

/// Minimal partition gaps under backward refinement by the breakpoints.
///
/// Cut points are kept in an ordered set; each insertion splits one cell,
/// so the minimal gap is updated from the two new neighbours only.
pub fn property_p_profile<S: Scalar>(
    iet: &Iet<S>,
    n_max: usize,
) -> Result<PropertyPReport<S>, DynamicsError> {
    if n_max == 0 {
        return Err(DynamicsError::ZeroDepth);
    }
    let t = iet.canonicalize();
    let inverse = t.invert();
    let cfg = t.config();
    let one = S::one(&cfg);
    let mut cuts = BTreeSet::new();
    let mut min_gap = one.clone();
    let mut first_collision = None;

    let insert = |p: S, cuts: &mut BTreeSet<S>, min_gap: &mut S| -> bool {
        let below = cuts.range(..=&p).next_back().cloned();
        let above = cuts
            .range((Bound::Excluded(&p), Bound::Unbounded))
            .next()
            .cloned();
        if below.as_ref().is_some_and(|b| b.near(&p)) || above.as_ref().is_some_and(|a| a.near(&p))
        {
            return false;
        }
        if let Some(b) = &below {
            *min_gap = min_gap.clone().min(p.clone() - b);
        }
        let right = above.unwrap_or_else(|| one.clone());
        *min_gap = min_gap.clone().min(right - &p);
        cuts.insert(p);
        true
    };

    insert(S::zero(&cfg), &mut cuts, &mut min_gap);
    let mut frontier = t.interior_breakpoints().to_vec();
    let mut rows = Vec::with_capacity(n_max);
    for n in 1..=n_max {
        if n > 1 {
            for x in frontier.iter_mut() {
                *x = inverse.map(x);
            }
        }
        for p in &frontier {
            if !insert(p.clone(), &mut cuts, &mut min_gap) && first_collision.is_none() {
                first_collision = Some(n);
            }
        }
        let n_epsilon = min_gap.clone() * &S::from_integer(n as i64, &cfg);
        rows.push(PropertyPRow {
            n,
            epsilon: min_gap.clone(),
            n_epsilon,
        });
    }
    Ok(PropertyPReport {
        rows,
        first_collision,
    })
}
