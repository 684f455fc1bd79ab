//! Escape points of enumerations of reals.
//!
//! Given `f: N -> Q`, the map `g(x) = sum { 2^-n | f(n) < x }` is monotone on
//! `[0, 2]` and its greatest postfixpoint `x0` is never a value of `f`. This
//! crate computes `x0` exactly, certifies `f(n) != x0` for every `n`, checks
//! the result against two independent oracles, and encloses `x0` when `f` is
//! only known through intervals.

pub mod enumeration;
pub mod escape;
pub mod fixpoint;
pub mod levy_map;
pub mod numerics;

pub use enumeration::{intervalize, EnumerationError, EnumerationSpec, IntervalEnumeration, TailRule};
pub use escape::{
    adjoin_escape_demo, compute_escape, enclose_escape, AdjoinDemo, Enclosure, EscapeCertificate,
    EscapeError, Location, Relation, Verdict, VerdictValue,
};
pub use fixpoint::{
    gfp_descend, kt_finite, subset_fixpoint_oracle, sup_postfix_oracle, FiniteLattice,
    FixpointError, FixpointTrace, IterationBudget, MonotoneTable,
};
pub use levy_map::{g_bounds, g_exact, GBoundsReport};
pub use numerics::{make_rational, RatInterval, Rational, Tribool};
