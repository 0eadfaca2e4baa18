//! Point permutations on `0..m`.

use std::fmt;

use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A bijection on `0..len`, stored in one-line notation: position `i` holds
/// the image of `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    /// Validates that `mapping` is a bijection on `0..mapping.len()`.
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; mapping.len()];
        for &image in &mapping {
            match seen.get_mut(image) {
                Some(slot) if !*slot => *slot = true,
                _ => return Err(Error::NotABijection(mapping)),
            }
        }
        Ok(Self(mapping))
    }

    pub(crate) fn from_vec_unchecked(mapping: Vec<usize>) -> Self {
        debug_assert!(Self::new(mapping.clone()).is_ok());
        Self(mapping)
    }

    pub fn identity(len: usize) -> Self {
        Self((0..len).collect())
    }

    /// The transposition swapping `a` and `b` (identity when `a == b`).
    pub fn transposition(len: usize, a: usize, b: usize) -> Self {
        let mut mapping: Vec<usize> = (0..len).collect();
        mapping.swap(a, b);
        Self(mapping)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    #[inline]
    pub fn image(&self, point: usize) -> usize {
        self.0[point]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    /// Diagrammatic composition: `self` acts first, then `other`.
    ///
    /// Panics if the lengths differ.
    pub fn then(&self, other: &Self) -> Self {
        assert_eq!(self.len(), other.len(), "permutation lengths differ");
        Self(self.0.iter().map(|&i| other.0[i]).collect())
    }

    pub fn inverse(&self) -> Self {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Self(inv)
    }

    /// Lengths of all cycles, fixed points included, in order of their
    /// smallest element.
    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.len()];
        let mut lengths = Vec::new();
        for start in 0..self.len() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.0[x];
                len += 1;
            }
            lengths.push(len);
        }
        lengths
    }

    /// Disjoint cycles of length at least two, each starting at its smallest
    /// element.
    pub fn cycles(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.len()];
        let mut cycles = Vec::new();
        for start in 0..self.len() {
            if seen[start] || self.0[start] == start {
                seen[start] = true;
                continue;
            }
            let mut cycle = Vec::new();
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                cycle.push(x);
                x = self.0[x];
            }
            cycles.push(cycle);
        }
        cycles
    }

    /// Least `m ≥ 1` with `self^m = id`: the lcm of the cycle lengths.
    ///
    /// Panics if the order does not fit in a `u64`, which needs more than
    /// forty-odd points.
    pub fn order(&self) -> u64 {
        self.cycle_lengths()
            .into_iter()
            .fold(1u64, |acc, len| checked_lcm(acc, len as u64).expect("permutation order overflows u64"))
    }

    /// `self` composed with itself `k` times; negative `k` uses the inverse.
    pub fn pow(&self, k: i64) -> Self {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut exp = k.unsigned_abs();
        let mut acc = Self::identity(self.len());
        let mut sq = base;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc.then(&sq);
            }
            sq = sq.then(&sq);
            exp >>= 1;
        }
        acc
    }

    /// Lexicographic rank among all permutations of the same length.
    ///
    /// Panics when `len()! ` overflows a `u64` (more than 20 points).
    pub fn rank(&self) -> u64 {
        let n = self.len();
        assert!(n <= 20, "rank is only defined up to 20 points");
        let mut rank = 0u64;
        for i in 0..n {
            let smaller = self.0[i + 1..].iter().filter(|&&x| x < self.0[i]).count() as u64;
            rank += smaller * factorial_u64(n - 1 - i).unwrap();
        }
        rank
    }

    /// Inverse of [`Permutation::rank`]. Returns `None` if `rank ≥ len!`.
    pub fn from_rank(len: usize, rank: u64) -> Option<Self> {
        let total = factorial_u64(len)?;
        if rank >= total {
            return None;
        }
        let mut remaining: Vec<usize> = (0..len).collect();
        let mut rest = rank;
        let mut mapping = Vec::with_capacity(len);
        for i in 0..len {
            let block = factorial_u64(len - 1 - i).unwrap();
            let digit = (rest / block) as usize;
            rest %= block;
            mapping.push(remaining.remove(digit));
        }
        Some(Self(mapping))
    }

    /// Every permutation of `0..len` in lexicographic order.
    pub fn all(len: usize) -> AllPermutations {
        AllPermutations {
            next: Some((0..len).collect()),
        }
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{x}")?;
        }
        f.write_str("]")
    }
}

impl<'de> Deserialize<'de> for Permutation {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let mapping = Vec::<usize>::deserialize(deserializer)?;
        Permutation::new(mapping).map_err(serde::de::Error::custom)
    }
}

/// Lexicographic iterator returned by [`Permutation::all`].
#[derive(Debug, Clone)]
pub struct AllPermutations {
    next: Option<Vec<usize>>,
}

impl Iterator for AllPermutations {
    type Item = Permutation;

    fn next(&mut self) -> Option<Permutation> {
        let current = self.next.take()?;
        let mut succ = current.clone();
        if next_lexicographic(&mut succ) {
            self.next = Some(succ);
        }
        Some(Permutation(current))
    }
}

fn next_lexicographic(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

pub(crate) fn factorial_u64(n: usize) -> Option<u64> {
    (1..=n as u64).try_fold(1u64, |acc, k| acc.checked_mul(k))
}

pub(crate) fn checked_lcm(a: u64, b: u64) -> Option<u64> {
    if a == 0 || b == 0 {
        return Some(0);
    }
    (a / a.gcd(&b)).checked_mul(b)
}
