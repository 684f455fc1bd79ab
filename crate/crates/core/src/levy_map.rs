//! The map `g(x) = sup_M sum_{n in M} 2^-n`, with `M` ranging over finite
//! sets of indices whose values are all `< x`.
//!
//! The weights are positive, so the supremum over finite subsets of the
//! eligible set is the total sum over that set. [`g_exact`] evaluates that
//! total in closed form; [`g_bounds`] brackets it when `f` is only known
//! through intervals.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::enumeration::{EnumerationSpec, IntervalEnumeration};
use crate::numerics::{weight_sum, Rational, Tribool};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundsError {
    #[error("n_known must be at least 1")]
    NoKnownIndices,
    #[error("eps must be positive, got {0}")]
    NonPositiveEps(Rational),
}

pub fn g_exact(spec: &EnumerationSpec, x: &Rational) -> Rational {
    weight_sum(&spec.eligible_prefix_indices(x)) + spec.tail_weight_sum(x)
}

/// Bracket on `g(x)` for an interval-valued enumeration.
///
/// `decided` holds the indices certainly below `x`; `undecided` those whose
/// interval straddles `x`. Indices `>= n_known` are never queried and are
/// covered by `tail_allowance = 2^-(n_known - 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GBoundsReport {
    pub lower: Rational,
    pub upper: Rational,
    pub decided: BTreeSet<u64>,
    pub undecided: BTreeSet<u64>,
    pub tail_allowance: Rational,
}

pub(crate) fn check_bounds_args(n_known: u64, eps: &Rational) -> Result<(), BoundsError> {
    if n_known == 0 {
        return Err(BoundsError::NoKnownIndices);
    }
    if !eps.is_positive() {
        return Err(BoundsError::NonPositiveEps(eps.clone()));
    }
    Ok(())
}

pub fn g_bounds(
    ienum: &IntervalEnumeration,
    n_known: u64,
    eps: &Rational,
    x: &Rational,
) -> Result<GBoundsReport, BoundsError> {
    check_bounds_args(n_known, eps)?;
    let mut decided = BTreeSet::new();
    let mut undecided = BTreeSet::new();
    for n in 0..n_known {
        match ienum.approx(n, eps).strictly_below(x) {
            Tribool::CertainTrue => {
                decided.insert(n);
            }
            Tribool::Unknown => {
                undecided.insert(n);
            }
            Tribool::CertainFalse => {}
        }
    }
    let lower = weight_sum(&decided);
    let tail_allowance = Rational::tail_from(n_known);
    let upper = &lower + weight_sum(&undecided) + &tail_allowance;
    Ok(GBoundsReport {
        lower,
        upper,
        decided,
        undecided,
        tail_allowance,
    })
}
