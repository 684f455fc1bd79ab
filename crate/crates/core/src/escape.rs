//! Escape points: the greatest postfixpoint `x0` of `g`, certified to differ
//! from every value of the enumeration.
//!
//! If `x0 = f(n0)` held, index `n0` would be ineligible at `x0` but eligible at
//! every `y > x0`, so `g(x0 + 2^-n0) >= g(x0) + 2^-n0 = x0 + 2^-n0` would be a
//! larger postfixpoint. [`compute_escape`] checks the conclusion exactly for
//! every prefix index and every tail component.

use std::fmt;

use serde::de::{self, Deserializer};
use serde::ser::Serializer;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::enumeration::{affine_cutoff, EnumerationSpec, IntervalEnumeration, TailRule};
use crate::fixpoint::{descend, gfp_descend, sup_postfix_oracle, FixpointError, FixpointTrace, IterationBudget};
use crate::levy_map::{check_bounds_args, g_bounds, g_exact, BoundsError};
use crate::numerics::{RatInterval, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EscapeError {
    #[error(transparent)]
    Fixpoint(#[from] FixpointError),
    #[error(transparent)]
    Bounds(#[from] BoundsError),
    #[error("escape violated: {location} takes the value x0 = {x0}")]
    TheoremViolation { location: Location, x0: Rational },
    #[error("adjoin demo not applicable: {0}")]
    DemoNotApplicable(String),
}

/// Where a verdict applies: one prefix index, or (part of) the tail.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Location {
    Index(u64),
    Tail,
}

impl fmt::Display for Location {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Location::Index(n) => write!(f, "index {n}"),
            Location::Tail => f.write_str("the tail"),
        }
    }
}

impl Serialize for Location {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Location::Index(n) => serializer.serialize_u64(*n),
            Location::Tail => serializer.serialize_str("tail"),
        }
    }
}

impl<'de> Deserialize<'de> for Location {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Index(u64),
            Word(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Index(n) => Ok(Location::Index(n)),
            Raw::Word(w) if w == "tail" => Ok(Location::Tail),
            Raw::Word(w) => Err(de::Error::custom(format!(
                "expected an index or \"tail\", got {w:?}"
            ))),
        }
    }
}

/// What the verdict compares against `x0`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum VerdictValue {
    Exact(Rational),
    /// The affine tail values `a*n + b` for `n` in `[from, to]`
    /// (`to = None` for an unbounded run).
    AffineRun(AffineRun),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AffineRun {
    pub kind: AffineKind,
    pub a: Rational,
    pub b: Rational,
    pub from: u64,
    pub to: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum AffineKind {
    Affine,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Relation {
    Below,
    Above,
}

/// `f` differs from `x0` at `location`, on the `relation` side, by at least `gap`.
///
/// For a single value `gap = |f(n) - x0|`; for an affine run it is the
/// smallest distance attained on the run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Verdict {
    #[serde(rename = "where")]
    pub location: Location,
    pub value: VerdictValue,
    pub relation: Relation,
    pub gap: Rational,
}

impl Verdict {
    fn exact(location: Location, value: Rational, x0: &Rational) -> Result<Self, EscapeError> {
        let relation = match value.cmp(x0) {
            std::cmp::Ordering::Less => Relation::Below,
            std::cmp::Ordering::Greater => Relation::Above,
            std::cmp::Ordering::Equal => {
                return Err(EscapeError::TheoremViolation {
                    location,
                    x0: x0.clone(),
                })
            }
        };
        let gap = (&value - x0).abs();
        Ok(Verdict {
            location,
            value: VerdictValue::Exact(value),
            relation,
            gap,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EscapeCertificate {
    pub x0: Rational,
    pub fixpoint_witness: Rational,
    pub trace: Vec<Rational>,
    pub verdicts: Vec<Verdict>,
    pub oracle_agreement: bool,
}

fn tail_verdicts(spec: &EnumerationSpec, x0: &Rational) -> Result<Vec<Verdict>, EscapeError> {
    let len = spec.tail_start();
    match spec.tail() {
        TailRule::Constant(c) => Ok(vec![Verdict::exact(Location::Tail, c.clone(), x0)?]),
        TailRule::Cycle => spec
            .prefix()
            .iter()
            .map(|v| Verdict::exact(Location::Tail, v.clone(), x0))
            .collect(),
        TailRule::Affine { a, b } => {
            // tail indices below x0 form [len, cutoff) when a > 0 and
            // [cutoff, inf) when a < 0; the rest lie above (no hit, checked)
            let cutoff = affine_cutoff(a, b, x0, len);
            let run = |from: u64, to: Option<u64>, relation: Relation, nearest: u64| {
                let gap = (spec.value_at(nearest) - x0).abs();
                Verdict {
                    location: Location::Tail,
                    value: VerdictValue::AffineRun(AffineRun {
                        kind: AffineKind::Affine,
                        a: a.clone(),
                        b: b.clone(),
                        from,
                        to,
                    }),
                    relation,
                    gap,
                }
            };
            let mut out = Vec::with_capacity(2);
            if a.is_positive() {
                if cutoff > len {
                    out.push(run(len, Some(cutoff - 1), Relation::Below, cutoff - 1));
                }
                out.push(run(cutoff, None, Relation::Above, cutoff));
            } else {
                if cutoff > len {
                    out.push(run(len, Some(cutoff - 1), Relation::Above, cutoff - 1));
                }
                out.push(run(cutoff, None, Relation::Below, cutoff));
            }
            Ok(out)
        }
    }
}

/// Computes `x0` and certifies `f(n) != x0` for all `n`.
pub fn compute_escape(
    spec: &EnumerationSpec,
    budget: IterationBudget,
) -> Result<EscapeCertificate, EscapeError> {
    let (x0, trace) = gfp_descend(spec, budget)?;
    let fixpoint_witness = g_exact(spec, &x0);

    let mut verdicts = spec
        .prefix()
        .iter()
        .enumerate()
        .map(|(n, v)| Verdict::exact(Location::Index(n as u64), v.clone(), &x0))
        .collect::<Result<Vec<_>, _>>()?;
    if spec.tail_hits(&x0) {
        return Err(EscapeError::TheoremViolation {
            location: Location::Tail,
            x0,
        });
    }
    verdicts.extend(tail_verdicts(spec, &x0)?);
    if verdicts.iter().any(|v| v.gap.is_zero()) {
        return Err(EscapeError::TheoremViolation {
            location: Location::Tail,
            x0,
        });
    }

    let oracle_agreement = sup_postfix_oracle(spec) == x0;
    Ok(EscapeCertificate {
        x0,
        fixpoint_witness,
        trace: trace.iterates,
        verdicts,
        oracle_agreement,
    })
}

/// Result of appending `x0` to the prefix of a constant-tail spec.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AdjoinDemo {
    pub extended: EnumerationSpec,
    pub x0: Rational,
    pub new_x0: Rational,
    /// `2^-k` with `k` the index that now holds `x0`.
    pub weight: Rational,
}

/// Forces `f(k) = x0` and shows the greatest postfixpoint jumps by `2^-k`.
///
/// Requires a `Constant(c)` tail with `c >= x0 + 2^-k` (`k` = prefix length)
/// so that no tail index becomes eligible on `(x0, x0 + 2^-k]`.
pub fn adjoin_escape_demo(
    spec: &EnumerationSpec,
    budget: IterationBudget,
) -> Result<AdjoinDemo, EscapeError> {
    let TailRule::Constant(c) = spec.tail() else {
        return Err(EscapeError::DemoNotApplicable(format!(
            "needs a constant tail, found {}",
            spec.tail()
        )));
    };
    let (x0, _) = gfp_descend(spec, budget)?;
    let k = spec.tail_start();
    let weight = Rational::dyadic(k);
    let target = &x0 + &weight;
    if c < &target {
        return Err(EscapeError::DemoNotApplicable(format!(
            "constant tail {c} is below x0 + 2^-{k} = {target}"
        )));
    }
    let mut prefix = spec.prefix().to_vec();
    prefix.push(x0.clone());
    let extended = EnumerationSpec::new(prefix, spec.tail().clone())
        .expect("constant tail is valid with any prefix");
    let (new_x0, _) = gfp_descend(&extended, budget)?;
    debug_assert!(new_x0 >= target);
    Ok(AdjoinDemo {
        extended,
        x0,
        new_x0,
        weight,
    })
}

/// Enclosure of `x0` from interval data, with the descents of both bound maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Enclosure {
    pub interval: RatInterval,
    pub lower_trace: FixpointTrace,
    pub upper_trace: FixpointTrace,
}

/// `[gfp(lower bound map), gfp(upper bound map)]`.
///
/// Both bound maps are monotone step functions with at most `n_known` jumps,
/// and `lower <= g <= upper` pointwise, so their greatest postfixpoints
/// bracket that of `g`.
pub fn enclose_escape(
    ienum: &IntervalEnumeration,
    n_known: u64,
    eps: &Rational,
    budget: IterationBudget,
) -> Result<Enclosure, EscapeError> {
    check_bounds_args(n_known, eps)?;
    let bounds = |x: &Rational| g_bounds(ienum, n_known, eps, x).expect("arguments checked");
    let (lo, lower_trace) = descend(budget, |x| bounds(x).lower)?;
    let (hi, upper_trace) = descend(budget, |x| bounds(x).upper)?;
    let interval = RatInterval::new(lo, hi).expect("lower bound map lies below upper bound map");
    Ok(Enclosure {
        interval,
        lower_trace,
        upper_trace,
    })
}
