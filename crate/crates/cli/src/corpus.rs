//! Seeded random inputs for the property batteries: enumeration specs and
//! finite lattices with monotone maps.

use escape_core::{EnumerationSpec, FiniteLattice, MonotoneTable, Rational, TailRule};
use rand::seq::SliceRandom;
use rand::Rng;

/// Largest numerator or denominator magnitude in generated specs.
pub const MAX_PART: i64 = 1000;

/// A value `p/q` with `q <= 1000`, `|p| <= 1000`, usually inside
/// `[-1/2, 5/2]` so that it interacts with `g` on `[0, 2]`.
pub fn random_value<R: Rng>(rng: &mut R) -> Rational {
    let q = match rng.gen_range(0..4) {
        0 => rng.gen_range(1..=8),
        1 => rng.gen_range(1..=64),
        _ => rng.gen_range(1..=MAX_PART),
    };
    let p = if rng.gen_bool(0.9) {
        rng.gen_range((-q / 2)..=(5 * q / 2).min(MAX_PART))
    } else {
        rng.gen_range(-MAX_PART..=MAX_PART)
    };
    Rational::new(p, q).expect("q >= 1")
}

/// Slopes keep denominators at most 64 so the crossing of `[0, 2]` happens
/// within a few hundred indices.
fn random_slope<R: Rng>(rng: &mut R) -> Rational {
    let q = rng.gen_range(1..=64);
    let p = rng.gen_range(1..=q.max(4) * 2);
    let sign = if rng.gen_bool(0.5) { 1 } else { -1 };
    Rational::new(sign * p, q).expect("q >= 1")
}

fn random_intercept<R: Rng>(rng: &mut R) -> Rational {
    let q = rng.gen_range(1..=64);
    Rational::new(rng.gen_range(-4 * q..=6 * q), q).expect("q >= 1")
}

/// A spec with `prefix.len() <= max_len`, cycling through the three tail
/// rules by `kind % 3` so batteries cover all of them evenly.
pub fn random_spec<R: Rng>(rng: &mut R, max_len: usize, kind: usize) -> EnumerationSpec {
    let min_len = usize::from(kind % 3 == 1);
    let len = rng.gen_range(min_len..=max_len.max(min_len));
    let mut prefix: Vec<Rational> = (0..len).map(|_| random_value(rng)).collect();
    // repeated values exercise the "several indices, one threshold" cases
    if len >= 2 && rng.gen_bool(0.25) {
        let i = rng.gen_range(0..len);
        let j = rng.gen_range(0..len);
        prefix[i] = prefix[j].clone();
    }
    let tail = match kind % 3 {
        0 => TailRule::Constant(random_value(rng)),
        1 => TailRule::Cycle,
        _ => TailRule::Affine {
            a: random_slope(rng),
            b: random_intercept(rng),
        },
    };
    EnumerationSpec::new(prefix, tail).expect("cycle specs get a nonempty prefix")
}

/// Family of finite lattices used by the Knaster-Tarski self-test. Elements
/// are component vectors; products concatenate components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LatticeFamily {
    Chain(u32),
    /// Divisors of `n` ordered by divisibility.
    Divisors(u32),
    /// Subsets of a `k`-element set, as bitmasks.
    Powerset(u32),
    Product(Box<LatticeFamily>, Box<LatticeFamily>),
}

impl LatticeFamily {
    fn arity(&self) -> usize {
        match self {
            LatticeFamily::Product(a, b) => a.arity() + b.arity(),
            _ => 1,
        }
    }

    pub fn elements(&self) -> Vec<Vec<u32>> {
        match self {
            LatticeFamily::Chain(n) => (0..*n).map(|i| vec![i]).collect(),
            LatticeFamily::Divisors(n) => (1..=*n).filter(|d| n % d == 0).map(|d| vec![d]).collect(),
            LatticeFamily::Powerset(k) => (0..1u32 << k).map(|m| vec![m]).collect(),
            LatticeFamily::Product(a, b) => {
                let right = b.elements();
                a.elements()
                    .into_iter()
                    .flat_map(|l| {
                        right.iter().map(move |r| {
                            let mut e = l.clone();
                            e.extend_from_slice(r);
                            e
                        })
                    })
                    .collect()
            }
        }
    }

    pub fn leq(&self, x: &[u32], y: &[u32]) -> bool {
        match self {
            LatticeFamily::Chain(_) => x[0] <= y[0],
            LatticeFamily::Divisors(_) => y[0].is_multiple_of(x[0]),
            LatticeFamily::Powerset(_) => x[0] & !y[0] == 0,
            LatticeFamily::Product(a, b) => {
                let k = a.arity();
                a.leq(&x[..k], &y[..k]) && b.leq(&x[k..], &y[k..])
            }
        }
    }

    pub fn build(&self) -> FiniteLattice<Vec<u32>> {
        FiniteLattice::new(self.elements(), |x, y| self.leq(x, y))
            .expect("every family is a lattice")
    }
}

fn random_factor<R: Rng>(rng: &mut R, budget: u32) -> LatticeFamily {
    match rng.gen_range(0..3) {
        0 => LatticeFamily::Chain(rng.gen_range(1..=budget.clamp(1, 12))),
        1 => {
            let n = rng.gen_range(1..=budget.clamp(1, 360));
            LatticeFamily::Divisors(n)
        }
        _ => {
            let max_k = (budget.max(2) as f64).log2().floor() as u32;
            LatticeFamily::Powerset(rng.gen_range(0..=max_k.clamp(0, 4)))
        }
    }
}

/// Divisor lattices of `n <= 5040`, powersets up to `2^8`, and products.
pub fn random_lattice_family<R: Rng>(rng: &mut R) -> LatticeFamily {
    match rng.gen_range(0..3) {
        0 => LatticeFamily::Divisors(rng.gen_range(1..=5040)),
        1 => LatticeFamily::Powerset(rng.gen_range(0..=8)),
        _ => LatticeFamily::Product(
            Box::new(random_factor(rng, 16)),
            Box::new(random_factor(rng, 16)),
        ),
    }
}

/// A random monotone map: `f(e) = join { h(a) | a <= e }` for a random
/// `h`, optionally clipped by a meet with a fixed element (still monotone).
pub fn random_monotone<R: Rng, T>(rng: &mut R, lat: &FiniteLattice<T>) -> MonotoneTable {
    let n = lat.len();
    let h: Vec<usize> = (0..n)
        .map(|_| {
            // mostly pick low elements so the joins do not saturate at top
            if rng.gen_bool(0.7) {
                lat.bottom()
            } else {
                rng.gen_range(0..n)
            }
        })
        .collect();
    let clip = rng.gen_bool(0.5).then(|| rng.gen_range(0..n));
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mapping = (0..n)
        .map(|e| {
            let up = order
                .iter()
                .filter(|&&a| lat.leq(a, e))
                .fold(lat.bottom(), |acc, &a| lat.join(acc, h[a]));
            match clip {
                Some(c) => lat.meet(up, c),
                None => up,
            }
        })
        .collect();
    MonotoneTable::new(lat, mapping).expect("join of a down-set image is monotone")
}
