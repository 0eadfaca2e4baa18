//! Subgroups of small concrete groups: closure, lattice search, cosets,
//! normality, Sylow subgroups and Cauchy witnesses.
//!
//! Every listing is in canonical enumeration order (see
//! [`crate::group::enumerate_group`]), so results are reproducible across
//! runs.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::hash::Hash;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{enumerate_group, GroupParams, PoolPermutation, PoolUpdate};
use crate::order::{is_prime, legendre_exponent};
use crate::perm::{factorial_u64, Permutation};

/// Default cap on the number of elements an exhaustive operation may list.
pub const DEFAULT_CAP: u64 = 200;

/// Largest per-node permutation group searched when building Sylow
/// subgroups (`8!`).
pub const SYLOW_SEARCH_LIMIT: u64 = 40_320;

/// An explicitly listed subgroup, elements sorted in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subgroup {
    params: GroupParams,
    elements: Vec<PoolUpdate>,
}

impl Subgroup {
    fn from_set(params: GroupParams, elements: impl IntoIterator<Item = PoolUpdate>) -> Self {
        let set: BTreeSet<PoolUpdate> = elements.into_iter().collect();
        Self {
            params,
            elements: set.into_iter().collect(),
        }
    }

    pub fn trivial(params: GroupParams) -> Self {
        Self {
            params,
            elements: vec![PoolUpdate::identity(params)],
        }
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[PoolUpdate] {
        &self.elements
    }

    pub fn contains(&self, x: &PoolUpdate) -> bool {
        self.elements.binary_search(x).is_ok()
    }

    pub fn is_subset_of(&self, other: &Subgroup) -> bool {
        self.order() <= other.order() && self.elements.iter().all(|x| other.contains(x))
    }

    /// Checks the subgroup axioms directly: identity present, closed under
    /// composition and under inversion.
    pub fn satisfies_axioms(&self) -> bool {
        self.contains(&PoolUpdate::identity(self.params))
            && self.elements.iter().all(|a| self.contains(&a.invert()))
            && self
                .elements
                .iter()
                .all(|a| self.elements.iter().all(|b| self.contains(&a.compose_unchecked(b))))
    }
}

/// Breadth-first closure of `generators` under `mul`, starting from
/// `identity`. Fails once more than `cap` elements have been found.
fn closure<T, F>(identity: T, generators: &[T], cap: u64, mul: F) -> Result<Vec<T>>
where
    T: Clone + Eq + Hash,
    F: Fn(&T, &T) -> T,
{
    let mut seen: HashSet<T> = HashSet::new();
    let mut order = Vec::new();
    let mut queue = VecDeque::new();
    seen.insert(identity.clone());
    order.push(identity.clone());
    queue.push_back(identity);
    while let Some(x) = queue.pop_front() {
        for g in generators {
            let y = mul(&x, g);
            if seen.insert(y.clone()) {
                if seen.len() as u64 > cap {
                    return Err(Error::ClosureExceedsCap { cap });
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(order)
}

/// Smallest subgroup containing `generators`.
///
/// In a finite group the monoid generated by a set is already a subgroup,
/// so closing under right multiplication by the generators suffices.
pub fn generate_subgroup(params: GroupParams, generators: &[PoolUpdate], cap: u64) -> Result<Subgroup> {
    if generators.iter().any(|g| g.params() != params) {
        return Err(Error::ParamsMismatch);
    }
    let elements = closure(PoolUpdate::identity(params), generators, cap, |a, b| a.compose_unchecked(b))?;
    Ok(Subgroup::from_set(params, elements))
}

/// `{a^0, a^1, …}`, of order `element_order(a)`.
pub fn cyclic_subgroup(a: &PoolUpdate) -> Subgroup {
    let params = a.params();
    let mut elements = vec![PoolUpdate::identity(params)];
    let mut x = a.clone();
    while !x.is_identity() {
        elements.push(x.clone());
        x = x.compose_unchecked(a);
    }
    Subgroup::from_set(params, elements)
}

/// An enumerated group with its multiplication table over canonical indices.
#[derive(Debug, Clone)]
pub struct GroupTable {
    params: GroupParams,
    elements: Vec<PoolUpdate>,
    product: Vec<u32>,
    inverse: Vec<u32>,
}

impl GroupTable {
    pub fn new(params: GroupParams, cap: u64) -> Result<Self> {
        let elements: Vec<PoolUpdate> = enumerate_group(params, cap)?.collect();
        let size = elements.len();
        let index = |x: &PoolUpdate| x.rank().expect("enumerated elements have a rank") as u32;
        let mut product = Vec::with_capacity(size * size);
        for a in &elements {
            for b in &elements {
                product.push(index(&a.compose_unchecked(b)));
            }
        }
        let inverse = elements.iter().map(|a| index(&a.invert())).collect();
        Ok(Self {
            params,
            elements,
            product,
            inverse,
        })
    }

    pub fn params(&self) -> GroupParams {
        self.params
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn elements(&self) -> &[PoolUpdate] {
        &self.elements
    }

    pub fn element(&self, i: usize) -> &PoolUpdate {
        &self.elements[i]
    }

    /// Canonical index of `x`, or `None` if it belongs to another group.
    pub fn index_of(&self, x: &PoolUpdate) -> Option<usize> {
        if x.params() != self.params {
            return None;
        }
        x.rank().map(|r| r as usize)
    }

    /// Index of `elements[a] ★ elements[b]`.
    #[inline]
    pub fn product(&self, a: usize, b: usize) -> usize {
        self.product[a * self.size() + b] as usize
    }

    #[inline]
    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a] as usize
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
struct Bits(Vec<u64>);

impl Bits {
    fn new(size: usize) -> Self {
        Self(vec![0; size.div_ceil(64)])
    }
    fn insert(&mut self, i: usize) -> bool {
        let (w, b) = (i / 64, 1u64 << (i % 64));
        let fresh = self.0[w] & b == 0;
        self.0[w] |= b;
        fresh
    }
    fn contains(&self, i: usize) -> bool {
        self.0[i / 64] & (1u64 << (i % 64)) != 0
    }
    fn is_subset_of(&self, other: &Bits) -> bool {
        self.0.iter().zip(&other.0).all(|(a, b)| a & !b == 0)
    }
    fn indices(&self) -> Vec<usize> {
        (0..self.0.len() * 64).filter(|&i| self.contains(i)).collect()
    }
}

fn closure_in_table(table: &GroupTable, generators: &[usize]) -> Bits {
    let mut bits = Bits::new(table.size());
    let mut queue = VecDeque::from([0usize]);
    bits.insert(0);
    while let Some(x) = queue.pop_front() {
        for &g in generators {
            let y = table.product(x, g);
            if bits.insert(y) {
                queue.push_back(y);
            }
        }
    }
    bits
}

/// Every subgroup of the group, each exactly once, sorted by order and then
/// by the canonical indices of their elements.
///
/// Starts from the cyclic subgroups and joins each known subgroup with each
/// cyclic one until nothing new appears. Every subgroup is reached because
/// it is an iterated join of the cyclic subgroups of its own elements.
pub fn all_subgroups(params: GroupParams, cap: u64) -> Result<Vec<Subgroup>> {
    let table = GroupTable::new(params, cap)?;
    Ok(all_subgroup_indices(&table)
        .into_iter()
        .map(|idx| Subgroup {
            params,
            elements: idx.into_iter().map(|i| table.element(i).clone()).collect(),
        })
        .collect())
}

fn all_subgroup_indices(table: &GroupTable) -> Vec<Vec<usize>> {
    let mut known: HashMap<Bits, usize> = HashMap::new();
    let mut found: Vec<(Bits, Vec<usize>)> = Vec::new();

    let mut cyclic: Vec<(Bits, usize)> = Vec::new();
    for g in 0..table.size() {
        let bits = closure_in_table(table, &[g]);
        if !known.contains_key(&bits) {
            known.insert(bits.clone(), found.len());
            found.push((bits.clone(), vec![g]));
            cyclic.push((bits, g));
        }
    }

    let mut k = 0;
    while k < found.len() {
        for (cbits, g) in &cyclic {
            if cbits.is_subset_of(&found[k].0) {
                continue;
            }
            let mut gens = found[k].1.clone();
            gens.push(*g);
            let bits = closure_in_table(table, &gens);
            if !known.contains_key(&bits) {
                known.insert(bits.clone(), found.len());
                found.push((bits, gens));
            }
        }
        k += 1;
    }

    let mut listings: Vec<Vec<usize>> = found.into_iter().map(|(bits, _)| bits.indices()).collect();
    listings.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    listings
}

/// Covering pairs `(i, j)` of the containment order: `subgroups[i]` is a
/// maximal proper subgroup of `subgroups[j]`.
pub fn containment_covers(subgroups: &[Subgroup]) -> Vec<(usize, usize)> {
    let n = subgroups.len();
    let below = |i: usize, j: usize| {
        i != j && subgroups[i].order() < subgroups[j].order() && subgroups[i].is_subset_of(&subgroups[j])
    };
    let mut strict = vec![vec![false; n]; n];
    for (i, row) in strict.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = below(i, j);
        }
    }
    let mut covers = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if strict[i][j] && !(0..n).any(|k| strict[i][k] && strict[k][j]) {
                covers.push((i, j));
            }
        }
    }
    covers
}

/// Direct conjugation test: `g·x·g⁻¹ ∈ h` for every group element `g` and
/// every `x ∈ h`.
pub fn is_normal(h: &Subgroup, cap: u64) -> Result<bool> {
    for g in enumerate_group(h.params, cap)? {
        let g_inv = g.invert();
        for x in &h.elements {
            if !h.contains(&g.compose_unchecked(x).compose_unchecked(&g_inv)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum CosetSide {
    /// Translates `g·H`.
    Left,
    /// Translates `H·g`.
    Right,
}

/// The group split into the translates of one subgroup.
///
/// Cosets are listed by their smallest element and are themselves sorted,
/// so two partitions are equal as partitions iff they compare equal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CosetPartition {
    pub subgroup: Subgroup,
    pub side: CosetSide,
    pub cosets: Vec<Vec<PoolUpdate>>,
}

impl CosetPartition {
    pub fn count(&self) -> usize {
        self.cosets.len()
    }

    /// Same cosets regardless of side.
    pub fn same_partition(&self, other: &CosetPartition) -> bool {
        self.cosets == other.cosets
    }
}

pub fn cosets(h: &Subgroup, side: CosetSide, cap: u64) -> Result<CosetPartition> {
    let mut covered: HashSet<PoolUpdate> = HashSet::new();
    let mut parts = Vec::new();
    for g in enumerate_group(h.params, cap)? {
        if covered.contains(&g) {
            continue;
        }
        let coset: BTreeSet<PoolUpdate> = h
            .elements
            .iter()
            .map(|x| match side {
                CosetSide::Left => g.compose_unchecked(x),
                CosetSide::Right => x.compose_unchecked(&g),
            })
            .collect();
        covered.extend(coset.iter().cloned());
        parts.push(coset.into_iter().collect());
    }
    Ok(CosetPartition {
        subgroup: h.clone(),
        side,
        cosets: parts,
    })
}

fn check_prime_divides(params: GroupParams, p: u64) -> Result<()> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    // p | (r!)^n  iff  p ≤ r
    if p > params.pool_count() as u64 {
        return Err(Error::PrimeNotPresent {
            prime: p,
            order: crate::order::concrete_order(params).to_string(),
        });
    }
    Ok(())
}

fn is_power_of(mut x: u64, p: u64) -> bool {
    while x > 1 && x % p == 0 {
        x /= p;
    }
    x == 1
}

/// Generators of one Sylow `p`-subgroup of the permutations of `0..r`.
///
/// Grows a `p`-subgroup greedily: any `p`-subgroup that is not maximal is
/// properly contained in a Sylow subgroup, whose normalizer of it supplies
/// an extending `p`-element, so the scan never gets stuck below full order.
pub fn pool_sylow_generators(pool_count: usize, p: u64) -> Result<Vec<Permutation>> {
    if !is_prime(p) {
        return Err(Error::NotPrime(p));
    }
    let size = factorial_u64(pool_count).filter(|&s| s <= SYLOW_SEARCH_LIMIT);
    if size.is_none() {
        return Err(Error::GroupTooLarge {
            order: crate::order::factorial(pool_count as u64).to_string(),
            cap: SYLOW_SEARCH_LIMIT,
        });
    }
    let target = p.pow(legendre_exponent(pool_count as u64, p) as u32);
    let identity = Permutation::identity(pool_count);
    let mul = |a: &Permutation, b: &Permutation| a.then(b);
    let mut gens: Vec<Permutation> = Vec::new();
    let mut current: HashSet<Permutation> = HashSet::from([identity.clone()]);
    while (current.len() as u64) < target {
        let mut extended = false;
        for g in Permutation::all(pool_count) {
            if current.contains(&g) || !is_power_of(g.order(), p) {
                continue;
            }
            let mut trial = gens.clone();
            trial.push(g);
            if let Ok(elems) = closure(identity.clone(), &trial, target, mul) {
                if is_power_of(elems.len() as u64, p) {
                    gens = trial;
                    current = elems.into_iter().collect();
                    extended = true;
                    break;
                }
            }
        }
        assert!(extended, "maximal p-subgroups are Sylow subgroups");
    }
    Ok(gens)
}

/// A Sylow `p`-subgroup of the concrete group: the direct product of one
/// per-node Sylow subgroup of the pool permutations, listed explicitly.
pub fn sylow_subgroup(params: GroupParams, p: u64, cap: u64) -> Result<Subgroup> {
    check_prime_divides(params, p)?;
    let pool_gens = pool_sylow_generators(params.pool_count(), p)?;
    let mut gens = Vec::new();
    for node in 0..params.node_count() {
        for g in &pool_gens {
            gens.push(PoolUpdate::single_node(params, node, PoolPermutation::from(g.clone()))?);
        }
    }
    let h = generate_subgroup(params, &gens, cap)?;
    let expected = crate::order::sylow_form(&crate::order::concrete_order_factorization(params), p)?.p_part;
    debug_assert_eq!(num_bigint::BigUint::from(h.order()), expected);
    Ok(h)
}

/// The first element of order `p` in canonical enumeration order.
///
/// Elements whose only non-identity coordinate is node 0 come first in that
/// order, so the search only scans one node's `r!` permutations.
pub fn cauchy_witness(params: GroupParams, p: u64, cap: u64) -> Result<PoolUpdate> {
    check_prime_divides(params, p)?;
    let r = params.pool_count();
    match factorial_u64(r) {
        Some(size) if size <= cap => {}
        _ => {
            return Err(Error::GroupTooLarge {
                order: crate::order::factorial(r as u64).to_string(),
                cap,
            })
        }
    }
    let perm = Permutation::all(r)
        .find(|g| g.order() == p)
        .expect("a p-cycle exists for every prime p ≤ r");
    PoolUpdate::single_node(params, 0, perm.into())
}

/// JSON shape of one subgroup in reports.
#[derive(Debug, Clone, Serialize)]
pub struct SubgroupReport {
    pub order: usize,
    pub elements: Vec<PoolUpdate>,
    pub normal: bool,
    pub index: u64,
}

impl SubgroupReport {
    pub fn new(h: &Subgroup, cap: u64) -> Result<Self> {
        let group_size = h.params.group_size().ok_or_else(|| Error::GroupTooLarge {
            order: crate::order::concrete_order(h.params).to_string(),
            cap,
        })?;
        Ok(Self {
            order: h.order(),
            elements: h.elements.clone(),
            normal: is_normal(h, cap)?,
            index: group_size / h.order() as u64,
        })
    }
}

/// The full subgroup lattice with covering pairs.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeReport {
    pub subgroups: Vec<SubgroupReport>,
    pub containment: Vec<(usize, usize)>,
}

pub fn lattice_report(params: GroupParams, cap: u64) -> Result<LatticeReport> {
    let subgroups = all_subgroups(params, cap)?;
    let containment = containment_covers(&subgroups);
    let subgroups = subgroups
        .iter()
        .map(|h| SubgroupReport::new(h, cap))
        .collect::<Result<Vec<_>>>()?;
    Ok(LatticeReport {
        subgroups,
        containment,
    })
}
