//! Finite lattices, monotone maps on them, and Knaster-Tarski by iteration.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("a lattice needs at least one element")]
    Empty,
    #[error("order is not reflexive at element {0}")]
    NotReflexive(usize),
    #[error("order is not antisymmetric: elements {0} and {1} are mutually below each other")]
    NotAntisymmetric(usize, usize),
    #[error("order is not transitive: {0} <= {1} <= {2} but not {0} <= {2}")]
    NotTransitive(usize, usize, usize),
    #[error("elements {0} and {1} have no least upper bound")]
    MissingJoin(usize, usize),
    #[error("elements {0} and {1} have no greatest lower bound")]
    MissingMeet(usize, usize),
    #[error("table has {found} entries for a lattice of {expected} elements")]
    TableSize { expected: usize, found: usize },
    #[error("table maps element {0} outside the lattice")]
    OutOfRange(usize),
    #[error("map is not monotone: {0} <= {1} but f({0}) is not <= f({1})")]
    NotMonotone(usize, usize),
}

/// A finite lattice over `elements`, with the order materialized as a matrix.
///
/// Elements are addressed by position. Construction checks the partial-order
/// axioms and that every pair has a join and a meet.
#[derive(Debug, Clone)]
pub struct FiniteLattice<T> {
    elements: Vec<T>,
    leq: Vec<Vec<bool>>,
    join: Vec<Vec<usize>>,
    meet: Vec<Vec<usize>>,
    top: usize,
    bottom: usize,
}

/// Least element of `candidates` under `leq`, if one exists. The least element
/// has the strictly smallest down-set, so only that one needs checking.
fn least_of(candidates: &[usize], leq: &[Vec<bool>], below: &[usize]) -> Option<usize> {
    let &pick = candidates.iter().min_by_key(|&&k| below[k])?;
    candidates.iter().all(|&w| leq[pick][w]).then_some(pick)
}

impl<T> FiniteLattice<T> {
    #[allow(clippy::needless_range_loop)]
    pub fn new<F>(elements: Vec<T>, leq: F) -> Result<Self, LatticeError>
    where
        F: Fn(&T, &T) -> bool,
    {
        let n = elements.len();
        if n == 0 {
            return Err(LatticeError::Empty);
        }
        let order: Vec<Vec<bool>> = elements
            .iter()
            .map(|a| elements.iter().map(|b| leq(a, b)).collect())
            .collect();

        for i in 0..n {
            if !order[i][i] {
                return Err(LatticeError::NotReflexive(i));
            }
            for j in (i + 1)..n {
                if order[i][j] && order[j][i] {
                    return Err(LatticeError::NotAntisymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            for j in 0..n {
                if !order[i][j] {
                    continue;
                }
                for k in 0..n {
                    if order[j][k] && !order[i][k] {
                        return Err(LatticeError::NotTransitive(i, j, k));
                    }
                }
            }
        }

        let below: Vec<usize> = (0..n).map(|k| (0..n).filter(|&i| order[i][k]).count()).collect();
        let above: Vec<usize> = (0..n).map(|k| (0..n).filter(|&i| order[k][i]).count()).collect();
        let flipped: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| order[j][i]).collect()).collect();

        let mut join = vec![vec![0; n]; n];
        let mut meet = vec![vec![0; n]; n];
        let mut scratch = Vec::with_capacity(n);
        for i in 0..n {
            for j in i..n {
                scratch.clear();
                scratch.extend((0..n).filter(|&k| order[i][k] && order[j][k]));
                let up = least_of(&scratch, &order, &below).ok_or(LatticeError::MissingJoin(i, j))?;
                scratch.clear();
                scratch.extend((0..n).filter(|&k| order[k][i] && order[k][j]));
                let down =
                    least_of(&scratch, &flipped, &above).ok_or(LatticeError::MissingMeet(i, j))?;
                join[i][j] = up;
                join[j][i] = up;
                meet[i][j] = down;
                meet[j][i] = down;
            }
        }

        let top = (1..n).fold(0, |acc, k| join[acc][k]);
        let bottom = (1..n).fold(0, |acc, k| meet[acc][k]);
        Ok(FiniteLattice {
            elements,
            leq: order,
            join,
            meet,
            top,
            bottom,
        })
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn elements(&self) -> &[T] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &T {
        &self.elements[i]
    }

    pub fn leq(&self, i: usize, j: usize) -> bool {
        self.leq[i][j]
    }

    pub fn join(&self, i: usize, j: usize) -> usize {
        self.join[i][j]
    }

    pub fn meet(&self, i: usize, j: usize) -> usize {
        self.meet[i][j]
    }

    pub fn top(&self) -> usize {
        self.top
    }

    pub fn bottom(&self) -> usize {
        self.bottom
    }
}

/// A monotone self-map of a [`FiniteLattice`], by element position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MonotoneTable {
    mapping: Vec<usize>,
}

impl MonotoneTable {
    pub fn new<T>(lat: &FiniteLattice<T>, mapping: Vec<usize>) -> Result<Self, LatticeError> {
        let n = lat.len();
        if mapping.len() != n {
            return Err(LatticeError::TableSize {
                expected: n,
                found: mapping.len(),
            });
        }
        if let Some(i) = mapping.iter().position(|&m| m >= n) {
            return Err(LatticeError::OutOfRange(i));
        }
        for i in 0..n {
            for j in 0..n {
                if lat.leq(i, j) && !lat.leq(mapping[i], mapping[j]) {
                    return Err(LatticeError::NotMonotone(i, j));
                }
            }
        }
        Ok(MonotoneTable { mapping })
    }

    pub fn apply(&self, i: usize) -> usize {
        self.mapping[i]
    }

    pub fn mapping(&self) -> &[usize] {
        &self.mapping
    }
}

fn iterate_from(f: &MonotoneTable, start: usize) -> usize {
    let mut x = start;
    loop {
        let next = f.apply(x);
        if next == x {
            return x;
        }
        x = next;
    }
}

/// Least and greatest fixed points (as positions) by ascending iteration from
/// bottom and descending iteration from top. Monotonicity makes both chains
/// strictly monotone until they stop, so each takes at most `len` steps.
pub fn kt_finite<T>(lat: &FiniteLattice<T>, f: &MonotoneTable) -> (usize, usize) {
    (iterate_from(f, lat.bottom()), iterate_from(f, lat.top()))
}
