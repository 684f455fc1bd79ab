//! The enumeration `f: N -> Q`, either described exactly by a finite prefix
//! and a closed-form tail rule, or known only through shrinking intervals.

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::One;
use thiserror::Error;

use crate::numerics::{
    clamp_to_index, geometric_block_sum, range_weight_sum, RatInterval, Rational,
};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EnumerationError {
    #[error("cycle tail needs a nonempty prefix")]
    CycleWithoutPrefix,
    #[error("jitter must be nonnegative, got {0}")]
    NegativeJitter(Rational),
}

/// How `f` continues past its explicit prefix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TailRule {
    /// `f(n) = c` for every `n >= L`.
    Constant(Rational),
    /// `f(n) = prefix[n mod L]`.
    Cycle,
    /// `f(n) = a*n + b`; `a` is never zero after construction.
    Affine { a: Rational, b: Rational },
}

impl fmt::Display for TailRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TailRule::Constant(c) => write!(f, "constant {c}"),
            TailRule::Cycle => write!(f, "cycle"),
            TailRule::Affine { a, b } => write!(f, "affine {a}*n + {b}"),
        }
    }
}

/// A total map `N -> Q`: the values `f(0), ..., f(L-1)` followed by a tail rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EnumerationSpec {
    prefix: Vec<Rational>,
    tail: TailRule,
}

impl EnumerationSpec {
    /// Validates the spec and normalizes `Affine { a: 0, b }` to `Constant(b)`.
    pub fn new(prefix: Vec<Rational>, tail: TailRule) -> Result<Self, EnumerationError> {
        let tail = match tail {
            TailRule::Cycle if prefix.is_empty() => {
                return Err(EnumerationError::CycleWithoutPrefix)
            }
            TailRule::Affine { a, b } if a.is_zero() => TailRule::Constant(b),
            other => other,
        };
        Ok(EnumerationSpec { prefix, tail })
    }

    pub fn prefix(&self) -> &[Rational] {
        &self.prefix
    }

    pub fn tail(&self) -> &TailRule {
        &self.tail
    }

    /// `L`, the index where the tail rule takes over.
    pub fn tail_start(&self) -> u64 {
        self.prefix.len() as u64
    }

    pub fn value_at(&self, n: u64) -> Rational {
        let len = self.tail_start();
        if n < len {
            return self.prefix[n as usize].clone();
        }
        match &self.tail {
            TailRule::Constant(c) => c.clone(),
            TailRule::Cycle => self.prefix[(n % len) as usize].clone(),
            TailRule::Affine { a, b } => a * Rational::from_integer(n) + b,
        }
    }

    /// `{ n < L | f(n) < x }`.
    pub fn eligible_prefix_indices(&self, x: &Rational) -> BTreeSet<u64> {
        self.prefix
            .iter()
            .enumerate()
            .filter(|(_, v)| *v < x)
            .map(|(n, _)| n as u64)
            .collect()
    }

    /// Exact `sum { 2^-n | n >= L, f(n) < x }` in closed form.
    pub fn tail_weight_sum(&self, x: &Rational) -> Rational {
        let len = self.tail_start();
        match &self.tail {
            TailRule::Constant(c) => {
                if c < x {
                    Rational::tail_from(len)
                } else {
                    Rational::zero()
                }
            }
            TailRule::Cycle => self
                .prefix
                .iter()
                .enumerate()
                .filter(|(_, v)| *v < x)
                .map(|(i, _)| {
                    // residue i first reappears at n = L + i
                    geometric_block_sum(len + i as u64, len).expect("cycle period is nonzero")
                })
                .sum(),
            TailRule::Affine { a, b } => {
                let cutoff = affine_cutoff(a, b, x, len);
                if a.is_positive() {
                    range_weight_sum(len, cutoff)
                } else {
                    Rational::tail_from(cutoff)
                }
            }
        }
    }

    /// Whether some tail index `n >= L` has `f(n) = v`.
    pub fn tail_hits(&self, v: &Rational) -> bool {
        match &self.tail {
            TailRule::Constant(c) => c == v,
            TailRule::Cycle => self.prefix.iter().any(|p| p == v),
            TailRule::Affine { a, b } => {
                let solved = &(v - b) / a;
                solved.is_integer()
                    && !solved.is_negative()
                    && solved.numer() >= &BigInt::from(self.tail_start())
            }
        }
    }
}

/// Boundary index of the tail set `{ n >= L | a*n + b < x }`.
///
/// For `a > 0` the set is `[L, cutoff)`; for `a < 0` it is `[cutoff, inf)`.
/// Strictness at integer solutions is resolved exactly: `n < t` is
/// `n <= ceil(t) - 1` and `n > t` is `n >= floor(t) + 1`.
pub(crate) fn affine_cutoff(a: &Rational, b: &Rational, x: &Rational, len: u64) -> u64 {
    let threshold = &(x - b) / a;
    let bound = if a.is_positive() {
        threshold.ceil()
    } else {
        threshold.floor() + BigInt::one()
    };
    clamp_to_index(&bound).max(len)
}

type Oracle = dyn Fn(u64, &Rational) -> RatInterval + Send + Sync;

/// `f` given only through an approximation oracle `(n, eps) -> interval`.
///
/// Oracles must be deterministic: identical `(n, eps)` yield identical
/// intervals. Callers rely on width `<= eps`, nesting as `eps` shrinks, and
/// a common point per index.
#[derive(Clone)]
pub struct IntervalEnumeration {
    oracle: Arc<Oracle>,
}

impl IntervalEnumeration {
    pub fn from_fn<F>(oracle: F) -> Self
    where
        F: Fn(u64, &Rational) -> RatInterval + Send + Sync + 'static,
    {
        IntervalEnumeration {
            oracle: Arc::new(oracle),
        }
    }

    pub fn approx(&self, n: u64, eps: &Rational) -> RatInterval {
        (self.oracle)(n, eps)
    }
}

impl fmt::Debug for IntervalEnumeration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("IntervalEnumeration { .. }")
    }
}

/// Per-index skew in `[-1, 1]` with step 1/100, fixed for each `n`.
fn skew(n: u64) -> Rational {
    let bucket = (n.wrapping_mul(2_654_435_761) % 201) as i64 - 100;
    Rational::new(bucket, 100).expect("nonzero denominator")
}

/// Interval view of an exact spec.
///
/// `oracle(n, eps)` has width exactly `eps` and contains `f(n)`; its center
/// sits `skew(n) * min(jitter, eps/2)` away from `f(n)`. Both regimes of the
/// `min` nest as `eps` shrinks and agree at `eps = 2*jitter`, so the whole
/// family is nested.
pub fn intervalize(
    spec: &EnumerationSpec,
    jitter: Rational,
) -> Result<IntervalEnumeration, EnumerationError> {
    if jitter.is_negative() {
        return Err(EnumerationError::NegativeJitter(jitter));
    }
    let spec = spec.clone();
    let half = Rational::new(1, 2).expect("nonzero denominator");
    Ok(IntervalEnumeration::from_fn(move |n, eps| {
        let value = spec.value_at(n);
        let half_width = eps * &half;
        let shift = skew(n) * jitter.clone().min(half_width.clone());
        let center = value + shift;
        RatInterval::new(&center - &half_width, &center + &half_width)
            .expect("eps is positive so lo <= hi")
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::weight_sum;

    fn q(s: &str) -> Rational {
        s.parse().unwrap()
    }

    fn worked() -> EnumerationSpec {
        EnumerationSpec::new(vec![q("3/2"), q("1/8")], TailRule::Constant(q("2"))).unwrap()
    }

    fn identity() -> EnumerationSpec {
        EnumerationSpec::new(vec![], TailRule::Affine { a: q("1"), b: q("0") }).unwrap()
    }

    fn cycle01() -> EnumerationSpec {
        EnumerationSpec::new(vec![q("0"), q("1")], TailRule::Cycle).unwrap()
    }

    fn set(xs: &[u64]) -> BTreeSet<u64> {
        xs.iter().copied().collect()
    }

    #[test]
    fn value_at_examples() {
        assert_eq!(worked().value_at(1), q("1/8"));
        assert_eq!(worked().value_at(7), q("2"));
        assert_eq!(identity().value_at(5), q("5"));
        assert_eq!(cycle01().value_at(5), q("1"));
        assert_eq!(cycle01().value_at(4), q("0"));
    }

    #[test]
    fn cycle_needs_prefix() {
        assert_eq!(
            EnumerationSpec::new(vec![], TailRule::Cycle),
            Err(EnumerationError::CycleWithoutPrefix)
        );
    }

    #[test]
    fn affine_zero_slope_normalizes() {
        let spec =
            EnumerationSpec::new(vec![], TailRule::Affine { a: q("0"), b: q("3/4") }).unwrap();
        assert_eq!(spec.tail(), &TailRule::Constant(q("3/4")));
    }

    #[test]
    fn eligibility_examples() {
        assert_eq!(worked().eligible_prefix_indices(&q("1/2")), set(&[1]));
        assert_eq!(worked().eligible_prefix_indices(&q("2")), set(&[0, 1]));
        assert_eq!(worked().eligible_prefix_indices(&q("-1")), set(&[]));
        // strict: f(0) = 3/2 is not below 3/2
        assert_eq!(worked().eligible_prefix_indices(&q("3/2")), set(&[1]));
    }

    #[test]
    fn tail_weight_sum_examples() {
        assert_eq!(worked().tail_weight_sum(&q("5/2")), q("1/2"));
        assert_eq!(worked().tail_weight_sum(&q("2")), q("0"));
        assert_eq!(cycle01().tail_weight_sum(&q("1/2")), q("1/3"));
        assert_eq!(cycle01().tail_weight_sum(&q("1/2")), geometric_block_sum(2, 2).unwrap());
        assert_eq!(identity().tail_weight_sum(&q("3/2")), weight_sum(&set(&[0, 1])));
        // integer boundary: n < 2 exactly
        assert_eq!(identity().tail_weight_sum(&q("2")), q("3/2"));
        assert_eq!(identity().tail_weight_sum(&q("0")), q("0"));
    }

    #[test]
    fn constant_tail_with_empty_prefix_is_the_whole_series() {
        let spec = EnumerationSpec::new(vec![], TailRule::Constant(q("0"))).unwrap();
        assert_eq!(spec.tail_weight_sum(&q("1")), q("2"));
    }

    #[test]
    fn decreasing_affine_tail_is_cofinite() {
        // f(n) = 10 - n from n = 1: f(n) < 7 iff n >= 4
        let spec = EnumerationSpec::new(
            vec![q("100")],
            TailRule::Affine { a: q("-1"), b: q("10") },
        )
        .unwrap();
        assert_eq!(spec.tail_weight_sum(&q("7")), Rational::tail_from(4));
        assert_eq!(spec.tail_weight_sum(&q("15")), Rational::tail_from(1));
        assert!(spec.tail_hits(&q("7")));
        assert!(!spec.tail_hits(&q("10")));
        assert!(!spec.tail_hits(&q("13/2")));
    }

    #[test]
    fn decreasing_affine_with_deep_cutoff() {
        // f(n) = 10 - n/100 crosses 1 between n = 900 and n = 901
        let spec = EnumerationSpec::new(
            vec![],
            TailRule::Affine { a: q("-1/100"), b: q("10") },
        )
        .unwrap();
        assert_eq!(spec.tail_weight_sum(&q("1")), Rational::tail_from(901));
        let direct: Rational = (0..1000u64)
            .filter(|&n| spec.value_at(n) < q("1"))
            .map(Rational::dyadic)
            .sum();
        assert!(spec.tail_weight_sum(&q("1")) - direct <= Rational::tail_from(1000));
    }

    #[test]
    fn tail_hits_examples() {
        assert!(!identity().tail_hits(&q("3/2")));
        assert!(identity().tail_hits(&q("3")));
        assert!(!identity().tail_hits(&q("-1")));
        assert!(worked().tail_hits(&q("2")));
        assert!(!cycle01().tail_hits(&q("2")));
        assert!(cycle01().tail_hits(&q("1")));
        // solution n = 1 lies in the prefix, not the tail
        let shifted = EnumerationSpec::new(
            vec![q("9"), q("9")],
            TailRule::Affine { a: q("1"), b: q("0") },
        )
        .unwrap();
        assert!(!shifted.tail_hits(&q("1")));
        assert!(shifted.tail_hits(&q("2")));
    }

    #[test]
    fn intervalize_examples() {
        let spec = EnumerationSpec::new(vec![q("1/2")], TailRule::Constant(q("0"))).unwrap();
        let ienum = intervalize(&spec, q("0")).unwrap();
        let i = ienum.approx(0, &q("1/100"));
        assert!(i.width() <= q("1/100"));
        assert!(i.contains(&q("1/2")));
        assert!(ienum.approx(0, &q("1/10")).contains_interval(&ienum.approx(0, &q("1/1000"))));
        for n in 0..20 {
            assert!(ienum.approx(n, &q("1/3")).contains(&spec.value_at(n)));
        }
        assert!(intervalize(&spec, q("-1")).is_err());
    }

    #[test]
    fn jittered_intervals_nest_and_contain() {
        let spec = worked();
        let ienum = intervalize(&spec, q("1/50")).unwrap();
        let epsilons = ["1", "1/10", "1/25", "1/50", "1/100", "1/1000"].map(q);
        for n in 0..40 {
            let value = spec.value_at(n);
            for pair in epsilons.windows(2) {
                let outer = ienum.approx(n, &pair[0]);
                let inner = ienum.approx(n, &pair[1]);
                assert!(outer.contains_interval(&inner), "n={n} {outer} vs {inner}");
                assert!(inner.contains(&value));
                assert_eq!(inner.width(), pair[1]);
                let center = inner.lo().midpoint(inner.hi());
                assert!((center - &value).abs() <= q("1/50"));
            }
        }
    }
}
