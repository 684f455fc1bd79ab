//! Knaster-Tarski battery: iteration from bottom and top against brute-force
//! fixed-point scans on random finite lattices.

use escape_core::{kt_finite, FiniteLattice, MonotoneTable};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{random_lattice_family, random_monotone, LatticeFamily};

/// Least and greatest elements of `{e | f(e) = e}`, found by scanning.
pub fn brute_force_extremes<T>(lat: &FiniteLattice<T>, f: &MonotoneTable) -> (usize, usize) {
    let fixed: Vec<usize> = (0..lat.len()).filter(|&e| f.apply(e) == e).collect();
    let least = fixed
        .iter()
        .copied()
        .find(|&e| fixed.iter().all(|&o| lat.leq(e, o)))
        .expect("a monotone map on a finite lattice has a least fixed point");
    let greatest = fixed
        .iter()
        .copied()
        .find(|&e| fixed.iter().all(|&o| lat.leq(o, e)))
        .expect("a monotone map on a finite lattice has a greatest fixed point");
    (least, greatest)
}

#[derive(Debug, Clone, Serialize)]
pub struct KtCase {
    pub family: String,
    pub size: usize,
    pub fixed_points: usize,
    pub passed: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct KtReport {
    pub seed: u64,
    pub cases: usize,
    pub passed: usize,
    pub failures: Vec<KtCase>,
}

impl KtReport {
    pub fn all_passed(&self) -> bool {
        self.failures.is_empty() && self.passed == self.cases
    }
}

fn describe(family: &LatticeFamily) -> String {
    match family {
        LatticeFamily::Chain(n) => format!("chain({n})"),
        LatticeFamily::Divisors(n) => format!("divisors({n})"),
        LatticeFamily::Powerset(k) => format!("powerset({k})"),
        LatticeFamily::Product(a, b) => format!("{} x {}", describe(a), describe(b)),
    }
}

pub fn run_kt_selftest(count: usize, seed: u64) -> KtReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut passed = 0;
    let mut failures = Vec::new();
    for _ in 0..count {
        let family = random_lattice_family(&mut rng);
        let lat = family.build();
        let f = random_monotone(&mut rng, &lat);
        let ok = kt_finite(&lat, &f) == brute_force_extremes(&lat, &f);
        if ok {
            passed += 1;
        } else {
            failures.push(KtCase {
                family: describe(&family),
                size: lat.len(),
                fixed_points: (0..lat.len()).filter(|&e| f.apply(e) == e).count(),
                passed: ok,
            });
        }
    }
    KtReport {
        seed,
        cases: count,
        passed,
        failures,
    }
}
