//! Pool-update maps and the group they form under composition.
//!
//! A group element assigns one permutation of the pool indices `0..r` to
//! every node. Composition is per node and diagrammatic: in `a.compose(&b)`
//! the update `a` acts first.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigUint;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::perm::{factorial_u64, Permutation};

/// Number of nodes and pools of a blockchain group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupParams {
    node_count: usize,
    pool_count: usize,
}

impl GroupParams {
    pub fn new(node_count: usize, pool_count: usize) -> Result<Self> {
        if node_count == 0 {
            return Err(Error::InvalidParams("node count must be at least 1".into()));
        }
        if pool_count == 0 {
            return Err(Error::InvalidParams("pool count must be at least 1".into()));
        }
        Ok(Self {
            node_count,
            pool_count,
        })
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn pool_count(&self) -> usize {
        self.pool_count
    }

    /// `(r!)^n` if it fits in a `u64`.
    pub fn group_size(&self) -> Option<u64> {
        let per_node = factorial_u64(self.pool_count)?;
        per_node.checked_pow(u32::try_from(self.node_count).ok()?)
    }

    /// `r^n`, the number of configurations, if it fits in a `u64`.
    pub fn configuration_count(&self) -> Option<u64> {
        (self.pool_count as u64).checked_pow(u32::try_from(self.node_count).ok()?)
    }
}

impl fmt::Display for GroupParams {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "B_{{{},{}}}", self.node_count, self.pool_count)
    }
}

/// One node's relabeling of pool indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PoolPermutation(Permutation);

impl PoolPermutation {
    pub fn new(mapping: Vec<usize>) -> Result<Self> {
        Permutation::new(mapping).map(Self)
    }

    pub fn identity(pool_count: usize) -> Self {
        Self(Permutation::identity(pool_count))
    }

    /// Swap pools `a` and `b`, fixing every other pool.
    pub fn transposition(pool_count: usize, a: usize, b: usize) -> Self {
        Self(Permutation::transposition(pool_count, a, b))
    }

    pub fn pool_count(&self) -> usize {
        self.0.len()
    }

    #[inline]
    pub fn image(&self, pool: usize) -> usize {
        self.0.image(pool)
    }

    pub fn as_permutation(&self) -> &Permutation {
        &self.0
    }

    pub fn mapping(&self) -> &[usize] {
        self.0.as_slice()
    }

    pub fn is_identity(&self) -> bool {
        self.0.is_identity()
    }

    pub fn then(&self, other: &Self) -> Self {
        Self(self.0.then(&other.0))
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.inverse())
    }

    pub fn order(&self) -> u64 {
        self.0.order()
    }
}

impl From<Permutation> for PoolPermutation {
    fn from(p: Permutation) -> Self {
        Self(p)
    }
}

impl fmt::Display for PoolPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Validated constructor for a single node's pool map.
pub fn make_pool_permutation(mapping: Vec<usize>) -> Result<PoolPermutation> {
    PoolPermutation::new(mapping)
}

/// A group element: one [`PoolPermutation`] per node.
///
/// Elements are ordered by their position in [`enumerate_group`], which
/// treats node 0 as the fastest-varying coordinate.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "PoolUpdateWire", into = "PoolUpdateWire")]
pub struct PoolUpdate {
    params: GroupParams,
    per_node: Vec<PoolPermutation>,
}

#[derive(Serialize, Deserialize)]
struct PoolUpdateWire {
    n: usize,
    r: usize,
    perms: Vec<Vec<usize>>,
}

impl TryFrom<PoolUpdateWire> for PoolUpdate {
    type Error = Error;

    fn try_from(wire: PoolUpdateWire) -> Result<Self> {
        let params = GroupParams::new(wire.n, wire.r)?;
        PoolUpdate::from_mappings(params, wire.perms)
    }
}

impl From<PoolUpdate> for PoolUpdateWire {
    fn from(update: PoolUpdate) -> Self {
        PoolUpdateWire {
            n: update.params.node_count,
            r: update.params.pool_count,
            perms: update.per_node.into_iter().map(|p| p.0.into_vec()).collect(),
        }
    }
}

impl PoolUpdate {
    pub fn new(params: GroupParams, per_node: Vec<PoolPermutation>) -> Result<Self> {
        if per_node.len() != params.node_count {
            return Err(Error::LengthMismatch {
                expected: params.node_count,
                found: per_node.len(),
            });
        }
        if let Some(p) = per_node.iter().find(|p| p.pool_count() != params.pool_count) {
            return Err(Error::LengthMismatch {
                expected: params.pool_count,
                found: p.pool_count(),
            });
        }
        Ok(Self { params, per_node })
    }

    /// Builds an element from raw per-node mappings, validating each one.
    pub fn from_mappings(params: GroupParams, mappings: Vec<Vec<usize>>) -> Result<Self> {
        let per_node = mappings
            .into_iter()
            .map(PoolPermutation::new)
            .collect::<Result<Vec<_>>>()?;
        Self::new(params, per_node)
    }

    /// Every node carries the same pool permutation.
    pub fn uniform(params: GroupParams, perm: PoolPermutation) -> Result<Self> {
        Self::new(params, vec![perm; params.node_count])
    }

    /// Identity on every node except `node`, which carries `perm`.
    pub fn single_node(params: GroupParams, node: usize, perm: PoolPermutation) -> Result<Self> {
        if node >= params.node_count {
            return Err(Error::InvalidParams(format!(
                "node {node} out of range for {} nodes",
                params.node_count
            )));
        }
        let mut per_node = vec![PoolPermutation::identity(params.pool_count); params.node_count];
        per_node[node] = perm;
        Self::new(params, per_node)
    }

    pub fn identity(params: GroupParams) -> Self {
        Self {
            params,
            per_node: vec![PoolPermutation::identity(params.pool_count); params.node_count],
        }
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn per_node(&self) -> &[PoolPermutation] {
        &self.per_node
    }

    pub fn node(&self, node: usize) -> &PoolPermutation {
        &self.per_node[node]
    }

    pub fn is_identity(&self) -> bool {
        self.per_node.iter().all(PoolPermutation::is_identity)
    }

    /// `self ★ other`: every node applies `self` first, then `other`.
    pub fn compose(&self, other: &Self) -> Result<Self> {
        if self.params != other.params {
            return Err(Error::ParamsMismatch);
        }
        Ok(self.compose_unchecked(other))
    }

    pub(crate) fn compose_unchecked(&self, other: &Self) -> Self {
        Self {
            params: self.params,
            per_node: self
                .per_node
                .iter()
                .zip(&other.per_node)
                .map(|(a, b)| a.then(b))
                .collect(),
        }
    }

    pub fn invert(&self) -> Self {
        Self {
            params: self.params,
            per_node: self.per_node.iter().map(PoolPermutation::inverse).collect(),
        }
    }

    /// `k`-fold composition; `power(0)` is the identity and negative
    /// exponents use the inverse.
    pub fn power(&self, k: i64) -> Self {
        Self {
            params: self.params,
            per_node: self
                .per_node
                .iter()
                .map(|p| PoolPermutation(p.0.pow(k)))
                .collect(),
        }
    }

    /// Least `m ≥ 1` with `self^m = e`, i.e. the lcm of every per-node cycle
    /// length.
    pub fn element_order(&self) -> u64 {
        self.per_node.iter().fold(1u64, |acc, p| {
            crate::perm::checked_lcm(acc, p.order()).expect("element order overflows u64")
        })
    }

    /// Moves every node along its own pool map.
    pub fn apply(&self, cfg: &Configuration) -> Result<Configuration> {
        if self.params != cfg.params {
            return Err(Error::ParamsMismatch);
        }
        Ok(Configuration {
            params: self.params,
            assignment: cfg
                .assignment
                .iter()
                .zip(&self.per_node)
                .map(|(&pool, p)| p.image(pool))
                .collect(),
        })
    }

    /// Position of this element in [`enumerate_group`].
    pub fn rank(&self) -> Option<u64> {
        let base = factorial_u64(self.params.pool_count)?;
        let mut rank = 0u64;
        for p in self.per_node.iter().rev() {
            rank = rank.checked_mul(base)?.checked_add(p.0.rank())?;
        }
        Some(rank)
    }

    /// Inverse of [`PoolUpdate::rank`].
    pub fn from_rank(params: GroupParams, rank: u64) -> Option<Self> {
        let size = params.group_size()?;
        if rank >= size {
            return None;
        }
        let base = factorial_u64(params.pool_count)?;
        let mut rest = rank;
        let per_node = (0..params.node_count)
            .map(|_| {
                let digit = rest % base;
                rest /= base;
                PoolPermutation(Permutation::from_rank(params.pool_count, digit).unwrap())
            })
            .collect();
        Some(Self { params, per_node })
    }

    /// Uniform element drawn from `rng`, one Fisher-Yates shuffle per node.
    pub fn random<R: Rng + ?Sized>(params: GroupParams, rng: &mut R) -> Self {
        let per_node = (0..params.node_count)
            .map(|_| {
                let mut mapping: Vec<usize> = (0..params.pool_count).collect();
                mapping.shuffle(rng);
                PoolPermutation(Permutation::from_vec_unchecked(mapping))
            })
            .collect();
        Self { params, per_node }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("pool updates always serialize")
    }
}

impl Ord for PoolUpdate {
    fn cmp(&self, other: &Self) -> Ordering {
        self.params
            .cmp(&other.params)
            .then_with(|| self.per_node.iter().rev().cmp(other.per_node.iter().rev()))
    }
}

impl PartialOrd for PoolUpdate {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for PoolUpdate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, p) in self.per_node.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            p.fmt(f)?;
        }
        f.write_str(")")
    }
}

/// Which pool every node currently belongs to.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "ConfigurationWire", into = "ConfigurationWire")]
pub struct Configuration {
    params: GroupParams,
    assignment: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct ConfigurationWire {
    n: usize,
    r: usize,
    pools: Vec<usize>,
}

impl TryFrom<ConfigurationWire> for Configuration {
    type Error = Error;

    fn try_from(wire: ConfigurationWire) -> Result<Self> {
        Configuration::new(GroupParams::new(wire.n, wire.r)?, wire.pools)
    }
}

impl From<Configuration> for ConfigurationWire {
    fn from(cfg: Configuration) -> Self {
        ConfigurationWire {
            n: cfg.params.node_count,
            r: cfg.params.pool_count,
            pools: cfg.assignment,
        }
    }
}

impl Configuration {
    pub fn new(params: GroupParams, assignment: Vec<usize>) -> Result<Self> {
        if assignment.len() != params.node_count {
            return Err(Error::LengthMismatch {
                expected: params.node_count,
                found: assignment.len(),
            });
        }
        if let Some(&index) = assignment.iter().find(|&&p| p >= params.pool_count) {
            return Err(Error::PoolOutOfRange {
                index,
                pool_count: params.pool_count,
            });
        }
        Ok(Self { params, assignment })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn pool_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    /// Moves one node; the caller guarantees `pool < r`.
    pub(crate) fn set_pool(&mut self, node: usize, pool: usize) {
        debug_assert!(pool < self.params.pool_count);
        self.assignment[node] = pool;
    }

    /// Mixed-radix index with node 0 as the least significant digit.
    pub fn index(&self) -> Option<u64> {
        let base = self.params.pool_count as u64;
        self.assignment
            .iter()
            .rev()
            .try_fold(0u64, |acc, &p| acc.checked_mul(base)?.checked_add(p as u64))
    }

    /// Inverse of [`Configuration::index`].
    pub fn from_index(params: GroupParams, index: u64) -> Option<Self> {
        if index >= params.configuration_count()? {
            return None;
        }
        let base = params.pool_count as u64;
        let mut rest = index;
        let assignment = (0..params.node_count)
            .map(|_| {
                let digit = (rest % base) as usize;
                rest /= base;
                digit
            })
            .collect();
        Some(Self { params, assignment })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("configurations always serialize")
    }
}

/// Every element of the group in canonical order: lexicographic in the
/// per-node permutation ranks, node 0 varying fastest.
pub fn enumerate_group(params: GroupParams, cap: u64) -> Result<GroupElements> {
    let size = match params.group_size() {
        Some(size) if size <= cap => size,
        _ => {
            return Err(Error::GroupTooLarge {
                order: concrete_order_string(params),
                cap,
            })
        }
    };
    let per_node: Vec<PoolPermutation> = Permutation::all(params.pool_count)
        .map(PoolPermutation)
        .collect();
    Ok(GroupElements {
        params,
        per_node,
        digits: vec![0; params.node_count],
        remaining: size,
    })
}

fn concrete_order_string(params: GroupParams) -> String {
    let fact: BigUint = (1..=params.pool_count as u64).map(BigUint::from).product();
    num_traits::pow(fact, params.node_count).to_string()
}

/// Iterator returned by [`enumerate_group`].
#[derive(Debug, Clone)]
pub struct GroupElements {
    params: GroupParams,
    per_node: Vec<PoolPermutation>,
    digits: Vec<usize>,
    remaining: u64,
}

impl Iterator for GroupElements {
    type Item = PoolUpdate;

    fn next(&mut self) -> Option<PoolUpdate> {
        if self.remaining == 0 {
            return None;
        }
        self.remaining -= 1;
        let item = PoolUpdate {
            params: self.params,
            per_node: self.digits.iter().map(|&d| self.per_node[d].clone()).collect(),
        };
        for d in self.digits.iter_mut() {
            *d += 1;
            if *d < self.per_node.len() {
                break;
            }
            *d = 0;
        }
        Some(item)
    }

    fn size_hint(&self) -> (usize, Option<usize>) {
        let n = usize::try_from(self.remaining).unwrap_or(usize::MAX);
        (n, Some(n))
    }
}

impl ExactSizeIterator for GroupElements {}

/// Deterministic uniform element for a given seed.
pub fn random_element(params: GroupParams, seed: u64) -> PoolUpdate {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    PoolUpdate::random(params, &mut rng)
}

/// Every configuration, node 0 varying fastest.
pub fn enumerate_configurations(params: GroupParams, cap: u64) -> Result<Vec<Configuration>> {
    match params.configuration_count() {
        Some(size) if size <= cap => Ok((0..size)
            .map(|i| Configuration::from_index(params, i).unwrap())
            .collect()),
        _ => {
            let size = num_traits::pow(BigUint::from(params.pool_count), params.node_count);
            Err(Error::StateSpaceTooLarge {
                size: size.to_string(),
                cap,
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(n: usize, r: usize) -> GroupParams {
        GroupParams::new(n, r).unwrap()
    }

    fn upd(params: GroupParams, maps: &[&[usize]]) -> PoolUpdate {
        PoolUpdate::from_mappings(params, maps.iter().map(|m| m.to_vec()).collect()).unwrap()
    }

    #[test]
    fn params_reject_zero() {
        assert!(GroupParams::new(0, 1).is_err());
        assert!(GroupParams::new(1, 0).is_err());
        assert_eq!(p(2, 3).group_size(), Some(36));
    }

    #[test]
    fn make_pool_permutation_examples() {
        assert!(make_pool_permutation(vec![0, 1, 2]).unwrap().is_identity());
        assert_eq!(make_pool_permutation(vec![1, 0]).unwrap().mapping(), &[1, 0]);
        assert_eq!(
            make_pool_permutation(vec![0, 0, 1]),
            Err(Error::NotABijection(vec![0, 0, 1]))
        );
    }

    #[test]
    fn identity_layout() {
        let e = PoolUpdate::identity(p(2, 2));
        assert_eq!(e, upd(p(2, 2), &[&[0, 1], &[0, 1]]));
    }

    #[test]
    fn compose_is_diagrammatic() {
        let params = p(1, 3);
        let a = upd(params, &[&[1, 2, 0]]);
        let b = upd(params, &[&[0, 2, 1]]);
        assert_eq!(a.compose(&b).unwrap(), upd(params, &[&[2, 1, 0]]));

        // node maps 0 -> 1 in a and 1 -> 2 in b, so 0 -> 2 in the product
        let a = upd(params, &[&[1, 0, 2]]);
        let b = upd(params, &[&[0, 2, 1]]);
        assert_eq!(a.compose(&b).unwrap().node(0).image(0), 2);
    }

    #[test]
    fn compose_rejects_foreign_params() {
        let a = PoolUpdate::identity(p(1, 3));
        let b = PoolUpdate::identity(p(2, 3));
        assert_eq!(a.compose(&b), Err(Error::ParamsMismatch));
        let cfg = Configuration::new(p(2, 3), vec![0, 0]).unwrap();
        assert_eq!(a.apply(&cfg), Err(Error::ParamsMismatch));
    }

    #[test]
    fn invert_examples() {
        let params = p(1, 3);
        let e = PoolUpdate::identity(params);
        assert_eq!(e.invert(), e);
        assert_eq!(upd(p(1, 2), &[&[1, 0]]).invert(), upd(p(1, 2), &[&[1, 0]]));
        assert_eq!(upd(params, &[&[1, 2, 0]]).invert(), upd(params, &[&[2, 0, 1]]));
    }

    #[test]
    fn power_examples() {
        let params = p(1, 3);
        let c = upd(params, &[&[1, 2, 0]]);
        assert!(c.power(0).is_identity());
        assert!(c.power(3).is_identity());
        assert_eq!(c.power(-1), c.invert());
        assert_eq!(c.power(4), c);
    }

    #[test]
    fn element_order_examples() {
        assert_eq!(PoolUpdate::identity(p(3, 3)).element_order(), 1);
        assert_eq!(upd(p(2, 3), &[&[1, 2, 0], &[1, 0, 2]]).element_order(), 6);
        assert_eq!(upd(p(1, 2), &[&[1, 0]]).element_order(), 2);
    }

    #[test]
    fn apply_examples() {
        let params = p(2, 2);
        let cfg = Configuration::new(params, vec![0, 1]).unwrap();
        assert_eq!(PoolUpdate::identity(params).apply(&cfg).unwrap(), cfg);
        let a = upd(params, &[&[1, 0], &[0, 1]]);
        let start = Configuration::new(params, vec![0, 0]).unwrap();
        assert_eq!(a.apply(&start).unwrap().assignment(), &[1, 0]);
    }

    #[test]
    fn enumeration_counts_and_order() {
        assert_eq!(enumerate_group(p(2, 2), 100).unwrap().count(), 4);
        assert_eq!(enumerate_group(p(1, 3), 100).unwrap().count(), 6);
        assert!(matches!(
            enumerate_group(p(10, 5), 1_000_000),
            Err(Error::GroupTooLarge { .. })
        ));
        let elems: Vec<_> = enumerate_group(p(2, 3), 100).unwrap().collect();
        for (i, g) in elems.iter().enumerate() {
            assert_eq!(g.rank(), Some(i as u64));
            assert_eq!(PoolUpdate::from_rank(p(2, 3), i as u64).as_ref(), Some(g));
        }
        assert!(elems.windows(2).all(|w| w[0] < w[1]));
        // node 0 varies fastest
        assert_eq!(elems[1], upd(p(2, 3), &[&[0, 2, 1], &[0, 1, 2]]));
    }

    #[test]
    fn random_element_is_deterministic() {
        let params = p(4, 4);
        assert_eq!(random_element(params, 7), random_element(params, 7));
        for seed in 0..10 {
            assert!(random_element(p(3, 1), seed).is_identity());
        }
    }

    #[test]
    fn json_formats() {
        let a = upd(p(2, 2), &[&[1, 0], &[0, 1]]);
        assert_eq!(a.to_json(), r#"{"n":2,"r":2,"perms":[[1,0],[0,1]]}"#);
        let back: PoolUpdate = serde_json::from_str(&a.to_json()).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<PoolUpdate>(r#"{"n":1,"r":2,"perms":[[0,0]]}"#).is_err());
        assert!(serde_json::from_str::<PoolUpdate>(r#"{"n":2,"r":2,"perms":[[0,1]]}"#).is_err());
        assert!(serde_json::from_str::<PoolUpdate>(r#"{"n":1,"r":2,"perms":[[0,1,2]]}"#).is_err());

        let cfg = Configuration::new(p(3, 2), vec![0, 1, 1]).unwrap();
        assert_eq!(cfg.to_json(), r#"{"n":3,"r":2,"pools":[0,1,1]}"#);
        assert!(serde_json::from_str::<Configuration>(r#"{"n":2,"r":2,"pools":[0,2]}"#).is_err());
    }

    #[test]
    fn configuration_enumeration() {
        let cfgs = enumerate_configurations(p(2, 3), 100).unwrap();
        assert_eq!(cfgs.len(), 9);
        assert_eq!(cfgs[1].assignment(), &[1, 0]);
        assert!(matches!(
            enumerate_configurations(p(30, 4), 1000),
            Err(Error::StateSpaceTooLarge { .. })
        ));
    }
}
