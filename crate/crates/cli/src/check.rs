//! Invariant battery for a single spec, behind the `check` subcommand.
//!
//! Every property is evaluated with exact arithmetic on seeded random probes;
//! a property passes only with zero violations.

use escape_core::fixpoint::SUBSET_ORACLE_MAX;
use escape_core::numerics::weight_sum;
use escape_core::*;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckOutcome {
    pub property: &'static str,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct CheckReport {
    pub seed: u64,
    pub outcomes: Vec<CheckOutcome>,
}

impl CheckReport {
    pub fn all_passed(&self) -> bool {
        self.outcomes.iter().all(|o| o.passed)
    }
}

/// Random rational in `[lo, hi]` on a grid of step `1/den`.
fn probe(rng: &mut ChaCha8Rng, lo: i64, hi: i64, den: i64) -> Rational {
    Rational::new(rng.gen_range(lo * den..=hi * den), den).expect("den >= 1")
}

fn outcome(property: &'static str, violation: Option<String>, ok_detail: String) -> CheckOutcome {
    match violation {
        Some(detail) => CheckOutcome {
            property,
            passed: false,
            detail,
        },
        None => CheckOutcome {
            property,
            passed: true,
            detail: ok_detail,
        },
    }
}

const SAMPLES: usize = 256;

pub fn run_checks(spec: &EnumerationSpec, budget: IterationBudget, seed: u64) -> CheckReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut outcomes = Vec::new();
    let len = spec.tail_start();

    outcomes.push(outcome(
        "value-at-totality",
        (0..SAMPLES)
            .map(|_| rng.gen_range(0..=10_000u64))
            .find(|&n| n < len && spec.value_at(n) != spec.prefix()[n as usize])
            .map(|n| format!("value_at({n}) disagrees with the prefix")),
        format!("{SAMPLES} indices up to 10^4"),
    ));

    let mut violation = None;
    for _ in 0..SAMPLES {
        let x = probe(&mut rng, -1, 3, 97);
        let y = probe(&mut rng, -1, 3, 89);
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        let subset = spec.eligible_prefix_indices(&x).is_subset(&spec.eligible_prefix_indices(&y));
        if !subset || spec.tail_weight_sum(&x) > spec.tail_weight_sum(&y) {
            violation = Some(format!("eligibility shrinks from x = {x} to y = {y}"));
            break;
        }
    }
    outcomes.push(outcome("eligibility-monotone", violation, format!("{SAMPLES} pairs")));

    let mut violation = None;
    'tail: for _ in 0..64 {
        let x = probe(&mut rng, -1, 3, 61);
        let closed = spec.tail_weight_sum(&x);
        let mut truncated = Rational::zero();
        for k in 0..=96u64 {
            if closed < truncated || &closed - &truncated > Rational::tail_from(len + k) {
                violation = Some(format!("closed-form tail at x = {x} is off after {k} terms"));
                break 'tail;
            }
            if spec.value_at(len + k) < x {
                truncated = truncated + Rational::dyadic(len + k);
            }
        }
    }
    outcomes.push(outcome("tail-closed-form", violation, "64 arguments, 96 terms".into()));

    let horizon = len + 4 * len + 64;
    let mut violation = None;
    for n in len..=horizon {
        let v = spec.value_at(n);
        let shifted = &v + Rational::new(1, 3).expect("nonzero");
        for candidate in [v, shifted] {
            let scanned = (len..=horizon).any(|m| spec.value_at(m) == candidate);
            let decidable = match spec.tail() {
                TailRule::Affine { a, b } => (&(&candidate - b) / a)
                    .to_natural()
                    .is_some_and(|m| m <= horizon),
                _ => true,
            };
            if decidable && spec.tail_hits(&candidate) != scanned {
                violation = Some(format!("tail_hits({candidate}) disagrees with a scan"));
            }
        }
    }
    outcomes.push(outcome("tail-hits-scan", violation, format!("indices {len}..={horizon}")));

    let mut violation = None;
    for _ in 0..SAMPLES {
        let x = probe(&mut rng, -1, 3, 101);
        let y = probe(&mut rng, -1, 3, 103);
        let (x, y) = if x <= y { (x, y) } else { (y, x) };
        if g_exact(spec, &x) > g_exact(spec, &y) {
            violation = Some(format!("g({x}) > g({y})"));
            break;
        }
    }
    outcomes.push(outcome("g-monotone", violation, format!("{SAMPLES} pairs")));

    let mut violation = None;
    let g0 = g_exact(spec, &Rational::zero());
    if g0.is_negative() {
        violation = Some(format!("g(0) = {g0} < 0"));
    }
    for _ in 0..SAMPLES {
        let x = probe(&mut rng, -2, 4, 37);
        let gx = g_exact(spec, &x);
        if gx.is_negative() || gx > Rational::two() {
            violation = Some(format!("g({x}) = {gx} outside [0, 2]"));
        }
        if x <= gx && x > Rational::two() {
            violation = Some(format!("postfixpoint {x} above 2"));
        }
    }
    outcomes.push(outcome("g-range-and-postfix-bounds", violation, format!("{SAMPLES} arguments")));

    let mut violation = None;
    for _ in 0..SAMPLES {
        let n0 = rng.gen_range(0..len + 32);
        let v = spec.value_at(n0);
        let x = &v - Rational::new(rng.gen_range(0..=64), 32).expect("nonzero");
        let y = &v + Rational::new(rng.gen_range(1..=64), 32).expect("nonzero");
        if g_exact(spec, &y) < g_exact(spec, &x) + Rational::dyadic(n0) {
            violation = Some(format!("jump at index {n0} missing between {x} and {y}"));
            break;
        }
    }
    outcomes.push(outcome("jump-lemma", violation, format!("{SAMPLES} triples")));

    let descent = gfp_descend(spec, budget);
    let (x0, trace) = match descent {
        Ok(pair) => pair,
        Err(e) => {
            outcomes.push(outcome("gfp-descend", Some(e.to_string()), String::new()));
            return CheckReport { seed, outcomes };
        }
    };

    let witness = g_exact(spec, &x0);
    outcomes.push(outcome(
        "fixpoint-equation",
        (witness != x0).then(|| format!("g(x0) = {witness} but x0 = {x0}")),
        format!("g({x0}) = {x0}"),
    ));
    outcomes.push(outcome(
        "x0-in-range",
        (x0.is_negative() || x0 > Rational::two()).then(|| format!("x0 = {x0}")),
        "0 <= x0 <= 2".into(),
    ));

    let strictly_descending = trace.iterates.windows(2).rev().skip(1).all(|w| w[0] > w[1]);
    let dominates = trace.iterates.iter().all(|z| z >= &x0);
    outcomes.push(outcome(
        "trace-shape",
        (!trace.terminated || !strictly_descending || !dominates)
            .then(|| "trace is not a strictly descending chain onto x0".to_string()),
        format!("{} steps", trace.steps()),
    ));

    let mut violation = None;
    // probes land in (x0, 2], or in (2, 3] when x0 = 2
    let room = (Rational::two() - &x0).max(Rational::one());
    for _ in 0..64 {
        let y = &x0 + &room * Rational::new(rng.gen_range(1..=1000), 1000).expect("nonzero");
        if y <= g_exact(spec, &y) {
            violation = Some(format!("{y} > x0 is a postfixpoint"));
        }
    }
    outcomes.push(outcome("greatest-postfixpoint", violation, "64 probes above x0".into()));

    let sup = sup_postfix_oracle(spec);
    let subset = if spec.prefix().len() <= SUBSET_ORACLE_MAX {
        Some(subset_fixpoint_oracle(spec, SUBSET_ORACLE_MAX))
    } else {
        None
    };
    let violation = match (&subset, sup == x0) {
        (_, false) => Some(format!("sup oracle gives {sup}, descent gives {x0}")),
        (Some(Err(e)), _) => Some(e.to_string()),
        (Some(Ok(v)), _) if v != &x0 => Some(format!("subset oracle gives {v}, descent gives {x0}")),
        _ => None,
    };
    let detail = if subset.is_some() {
        "descent = sup oracle = subset oracle".to_string()
    } else {
        format!("descent = sup oracle (subset oracle skipped: prefix longer than {SUBSET_ORACLE_MAX})")
    };
    outcomes.push(outcome("proof-equivalence", violation, detail));

    let violation = match compute_escape(spec, budget) {
        Err(e) => Some(e.to_string()),
        Ok(cert) => {
            if !cert.oracle_agreement || cert.fixpoint_witness != cert.x0 {
                Some("certificate is not self-consistent".into())
            } else {
                (0..len + 256)
                    .find(|&n| spec.value_at(n) == cert.x0)
                    .map(|n| format!("f({n}) = x0"))
            }
        }
    };
    outcomes.push(outcome("escape", violation, format!("no index below {} hits x0", len + 256)));

    let violation = match adjoin_escape_demo(spec, budget) {
        Ok(demo) => {
            let target = &demo.x0 + &demo.weight;
            if demo.new_x0 < target {
                Some(format!("x0' = {} < {}", demo.new_x0, target))
            } else {
                match compute_escape(&demo.extended, budget) {
                    Ok(c) if c.x0 == demo.new_x0 => None,
                    Ok(_) => Some("re-certified x0' differs".into()),
                    Err(e) => Some(e.to_string()),
                }
            }
        }
        Err(EscapeError::DemoNotApplicable(_)) => None,
        Err(e) => Some(e.to_string()),
    };
    let detail = match spec.tail() {
        TailRule::Constant(_) => "applied when c >= x0 + 2^-L".into(),
        _ => "skipped: needs a constant tail".into(),
    };
    outcomes.push(outcome("adjoin-strict-increase", violation, detail));

    let mut violation = None;
    let epsilons = ["1/10", "1/100", "1/10000"].map(|e| e.parse::<Rational>().expect("literal"));
    'enclose: for jitter in ["0", "1/200"] {
        let ienum = intervalize(spec, jitter.parse().expect("literal")).expect("jitter >= 0");
        let mut previous: Option<Vec<RatInterval>> = None;
        for n_known in [1u64, 2, 4, 8, 16] {
            let mut row = Vec::new();
            for eps in &epsilons {
                match enclose_escape(&ienum, n_known, eps, budget) {
                    Ok(enc) => row.push(enc.interval),
                    Err(e) => {
                        violation = Some(e.to_string());
                        break 'enclose;
                    }
                }
            }
            let sound = row.iter().all(|i| i.contains(&x0));
            let narrows_in_eps = row.windows(2).all(|w| w[0].contains_interval(&w[1]));
            let narrows_in_n = previous
                .as_ref()
                .is_none_or(|prev| prev.iter().zip(&row).all(|(a, b)| a.contains_interval(b)));
            if !(sound && narrows_in_eps && narrows_in_n) {
                violation = Some(format!("enclosure grid fails at n_known = {n_known}, jitter {jitter}"));
                break 'enclose;
            }
            previous = Some(row);
        }
    }
    outcomes.push(outcome("enclosure-sound-and-narrowing", violation, "15-point grid, 2 jitters".into()));

    let mut violation = None;
    let ienum = intervalize(spec, Rational::zero()).expect("zero jitter");
    for _ in 0..64 {
        let x = probe(&mut rng, -1, 3, 53);
        let n_known = rng.gen_range(1..=16);
        let eps = Rational::new(1, rng.gen_range(1..=1000)).expect("nonzero");
        let r = g_bounds(&ienum, n_known, &eps, &x).expect("valid arguments");
        let g = g_exact(spec, &x);
        let width_ok = &r.upper - &r.lower == weight_sum(&r.undecided) + &r.tail_allowance;
        if !(r.lower <= g && g <= r.upper && width_ok) {
            violation = Some(format!("bounds at x = {x} do not bracket g"));
            break;
        }
    }
    outcomes.push(outcome("g-bounds-sound", violation, "64 configurations".into()));

    CheckReport { seed, outcomes }
}
