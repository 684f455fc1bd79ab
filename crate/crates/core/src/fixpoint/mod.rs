//! Greatest postfixpoint of `g` on `[0, 2]`, computed three ways.
//!
//! * [`gfp_descend`] iterates `z <- g(z)` down from the top element 2.
//! * [`sup_postfix_oracle`] takes the supremum of `{x | x <= g(x)}` by
//!   sampling every step of `g` that meets `[0, 2]`.
//! * [`subset_fixpoint_oracle`] enumerates every candidate value
//!   `weight_sum(S) + t` and keeps the largest exact fixed point.
//!
//! All three agree exactly. [`lattice`] holds a generic finite Knaster-Tarski
//! engine used to test Knaster-Tarski iteration itself.

pub mod lattice;

use std::collections::BTreeSet;

use num_bigint::BigInt;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{affine_cutoff, EnumerationSpec, TailRule};
use crate::levy_map::g_exact;
use crate::numerics::{geometric_block_sum, range_weight_sum, Rational};

pub use lattice::{kt_finite, FiniteLattice, LatticeError, MonotoneTable};

pub const DEFAULT_ITERATION_BUDGET: u64 = 1_000_000;

/// Upper bound on the size of prefixes the subset oracle will enumerate.
pub const SUBSET_ORACLE_MAX: usize = 16;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FixpointError {
    #[error("iteration budget of {budget} steps exceeded without reaching a fixed point")]
    BudgetExceeded { budget: u64 },
    #[error("subset oracle scope: prefix length {len} with k_max {k_max} (k_max must be <= {SUBSET_ORACLE_MAX} and >= prefix length)")]
    OracleScope { len: usize, k_max: usize },
    #[error("subset oracle found no fixed point among its candidates")]
    OracleExhausted,
}

/// Maximum number of map evaluations a descent may perform.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct IterationBudget(u64);

impl IterationBudget {
    /// `None` for a zero budget.
    pub fn new(steps: u64) -> Option<Self> {
        (steps >= 1).then_some(IterationBudget(steps))
    }

    pub fn steps(self) -> u64 {
        self.0
    }
}

impl Default for IterationBudget {
    fn default() -> Self {
        IterationBudget(DEFAULT_ITERATION_BUDGET)
    }
}

/// Iterates of a descent from 2. When terminated, the last two entries are
/// equal and everything before them is strictly decreasing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FixpointTrace {
    pub iterates: Vec<Rational>,
    pub terminated: bool,
}

impl FixpointTrace {
    /// Number of map evaluations performed.
    pub fn steps(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    pub fn last(&self) -> &Rational {
        self.iterates.last().expect("a trace always starts at 2")
    }
}

/// Kleene descent `z <- map(z)` from 2.
///
/// `map` must be monotone with `map(2) <= 2` and take finitely many values on
/// `[0, 2]`; then the iterates strictly decrease until they stop, and the stop
/// is the greatest postfixpoint of `map` (every postfixpoint `p` satisfies
/// `p <= map^k(2)` for all `k`).
pub fn descend<F>(
    budget: IterationBudget,
    mut map: F,
) -> Result<(Rational, FixpointTrace), FixpointError>
where
    F: FnMut(&Rational) -> Rational,
{
    let mut z = Rational::two();
    let mut iterates = vec![z.clone()];
    for _ in 0..budget.steps() {
        let next = map(&z);
        debug_assert!(next <= z, "descent went up: {z} -> {next}");
        iterates.push(next.clone());
        if next == z {
            return Ok((
                z,
                FixpointTrace {
                    iterates,
                    terminated: true,
                },
            ));
        }
        z = next;
    }
    Err(FixpointError::BudgetExceeded {
        budget: budget.steps(),
    })
}

/// The greatest postfixpoint `x0` of `g`, with `g(x0) = x0`.
pub fn gfp_descend(
    spec: &EnumerationSpec,
    budget: IterationBudget,
) -> Result<(Rational, FixpointTrace), FixpointError> {
    descend(budget, |z| g_exact(spec, z))
}

/// Tail indices `n >= L` whose value lies in `[lo, hi]`, for an affine tail.
fn affine_indices_in(
    a: &Rational,
    b: &Rational,
    lo: &Rational,
    hi: &Rational,
    len: u64,
) -> std::ops::RangeInclusive<u64> {
    let at_lo = &(lo - b) / a;
    let at_hi = &(hi - b) / a;
    let (first, last) = if at_lo <= at_hi {
        (at_lo, at_hi)
    } else {
        (at_hi, at_lo)
    };
    let last = last.floor();
    if last < BigInt::from(len) {
        #[allow(clippy::reversed_empty_ranges)]
        return 1..=0;
    }
    let first = crate::numerics::clamp_to_index(&first.ceil()).max(len);
    first..=crate::numerics::clamp_to_index(&last)
}

/// Points in `[0, 2]` where `g` may jump: every value `f(n)` in that range.
pub fn breakpoints(spec: &EnumerationSpec) -> BTreeSet<Rational> {
    let zero = Rational::zero();
    let two = Rational::two();
    let in_range = |v: &Rational| &zero <= v && v <= &two;
    let mut points: BTreeSet<Rational> =
        spec.prefix().iter().filter(|v| in_range(v)).cloned().collect();
    match spec.tail() {
        TailRule::Constant(c) => {
            if in_range(c) {
                points.insert(c.clone());
            }
        }
        TailRule::Cycle => {}
        TailRule::Affine { a, b } => {
            for n in affine_indices_in(a, b, &zero, &two, spec.tail_start()) {
                points.insert(spec.value_at(n));
            }
        }
    }
    points
}

/// `sup { x in [0, 2] | x <= g(x) }`.
///
/// `g` is a left-continuous step function that is constant on each piece
/// `(t_i, t_{i+1}]` between consecutive breakpoints. On a piece with value `c`
/// the postfixpoints are `(t_i, min(c, t_{i+1})]`, so the supremum is attained
/// at a value of `g`; sampling `0`, `2` and one interior point per piece
/// collects every such value.
pub fn sup_postfix_oracle(spec: &EnumerationSpec) -> Rational {
    let mut grid = breakpoints(spec);
    grid.insert(Rational::zero());
    grid.insert(Rational::two());
    let grid: Vec<Rational> = grid.into_iter().collect();

    let mut samples = grid.clone();
    samples.extend(grid.windows(2).map(|w| w[0].midpoint(&w[1])));

    samples
        .iter()
        .map(|p| g_exact(spec, p))
        .chain(std::iter::once(Rational::zero()))
        .filter(|v| v <= &g_exact(spec, v))
        .max()
        .expect("zero is always a postfixpoint")
}

/// Every value `tail_weight_sum(spec, x)` can take for `x` in `[0, 2]`,
/// listed per rule (possibly with a few extra values from outside `[0, 2]`).
fn tail_states(spec: &EnumerationSpec) -> BTreeSet<Rational> {
    let len = spec.tail_start();
    match spec.tail() {
        TailRule::Constant(_) => [Rational::zero(), Rational::tail_from(len)].into(),
        TailRule::Cycle => {
            // residue i is eligible iff prefix[i] < x, so the eligible
            // residues are always "all values up to some threshold"
            let mut thresholds: Vec<&Rational> = spec.prefix().iter().collect();
            thresholds.sort();
            thresholds.dedup();
            let block = |i: usize| {
                geometric_block_sum(len + i as u64, len).expect("cycle period is nonzero")
            };
            let mut states = BTreeSet::from([Rational::zero()]);
            for t in thresholds {
                states.insert(
                    spec.prefix()
                        .iter()
                        .enumerate()
                        .filter(|(_, v)| *v <= t)
                        .map(|(i, _)| block(i))
                        .sum(),
                );
            }
            states
        }
        TailRule::Affine { a, b } => {
            let at_zero = affine_cutoff(a, b, &Rational::zero(), len);
            let at_two = affine_cutoff(a, b, &Rational::two(), len);
            if a.is_positive() {
                (at_zero..=at_two).map(|m| range_weight_sum(len, m)).collect()
            } else {
                (at_two..=at_zero).map(Rational::tail_from).collect()
            }
        }
    }
}

/// Largest `v = weight_sum(S) + t` with `g(v) = v`, over all subsets `S` of
/// the prefix indices and all tail states `t`.
///
/// Every value of `g` has that shape, so this is the greatest fixed point by
/// exhaustion. Candidates above the best fixed point found so far are the
/// only ones evaluated.
pub fn subset_fixpoint_oracle(
    spec: &EnumerationSpec,
    k_max: usize,
) -> Result<Rational, FixpointError> {
    let len = spec.prefix().len();
    if k_max > SUBSET_ORACLE_MAX || len > k_max {
        return Err(FixpointError::OracleScope { len, k_max });
    }
    let two = Rational::two();
    // weight_sum(S) = 2 * mask / 2^len where bit (len - 1 - i) of mask
    // encodes i in S; counting mask down lists the sums in descending order.
    let scale = BigInt::from(1u64 << len);
    let subset_sum = |mask: u64| {
        Rational::new(BigInt::from(mask) * 2, scale.clone()).expect("nonzero denominator")
    };

    let mut best: Option<Rational> = None;
    for t in tail_states(spec).into_iter().rev() {
        for mask in (0..1u64 << len).rev() {
            let v = subset_sum(mask) + &t;
            if best.as_ref().is_some_and(|b| &v <= b) {
                break;
            }
            if v > two {
                continue;
            }
            if g_exact(spec, &v) == v {
                best = Some(v);
                break;
            }
        }
    }
    best.ok_or(FixpointError::OracleExhausted)
}
