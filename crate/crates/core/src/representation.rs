//! Permutation representations of the group and small isomorphism tests.

use std::collections::VecDeque;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::group::{enumerate_configurations, Configuration, GroupParams, PoolPermutation, PoolUpdate};
use crate::perm::{factorial_u64, Permutation};
use crate::subgroup::{GroupTable, Subgroup};

/// Exhaustive isomorphism search is attempted up to this order.
pub const EXHAUSTIVE_ISO_LIMIT: usize = 24;
/// Invariant screening is attempted up to this order.
pub const SCREENING_ISO_LIMIT: usize = 200;

/// The right-regular representation: `g ↦ (x ↦ x ★ g)` on canonical indices.
#[derive(Debug, Clone)]
pub struct CayleyEmbedding {
    table: GroupTable,
    images: Vec<Permutation>,
}

impl CayleyEmbedding {
    pub fn elements(&self) -> &[PoolUpdate] {
        self.table.elements()
    }

    pub fn images(&self) -> &[Permutation] {
        &self.images
    }

    pub fn image(&self, g: &PoolUpdate) -> Option<&Permutation> {
        self.table.index_of(g).map(|i| &self.images[i])
    }

    pub fn table(&self) -> &GroupTable {
        &self.table
    }

    /// Pairwise distinct images.
    pub fn is_injective(&self) -> bool {
        let mut sorted: Vec<&Permutation> = self.images.iter().collect();
        sorted.sort();
        sorted.windows(2).all(|w| w[0] != w[1])
    }

    /// `image(a ★ b) = image(a) then image(b)` for every pair.
    pub fn is_homomorphism(&self) -> bool {
        let n = self.images.len();
        (0..n).all(|a| (0..n).all(|b| self.images[self.table.product(a, b)] == self.images[a].then(&self.images[b])))
    }
}

pub fn cayley_embedding(params: GroupParams, cap: u64) -> Result<CayleyEmbedding> {
    let table = GroupTable::new(params, cap)?;
    let n = table.size();
    let images = (0..n)
        .map(|g| Permutation::from_vec_unchecked((0..n).map(|x| table.product(x, g)).collect()))
        .collect();
    Ok(CayleyEmbedding { table, images })
}

/// The permutation each element induces on the `r^n` configurations.
///
/// Only the homomorphism property is guaranteed by construction.
#[derive(Debug, Clone)]
pub struct ConfigurationAction {
    params: GroupParams,
    configurations: Vec<Configuration>,
}

pub fn action_on_configurations(params: GroupParams, cap: u64) -> Result<ConfigurationAction> {
    Ok(ConfigurationAction {
        params,
        configurations: enumerate_configurations(params, cap)?,
    })
}

impl ConfigurationAction {
    pub fn configurations(&self) -> &[Configuration] {
        &self.configurations
    }

    pub fn image(&self, g: &PoolUpdate) -> Result<Permutation> {
        if g.params() != self.params {
            return Err(Error::ParamsMismatch);
        }
        let mapping = self
            .configurations
            .iter()
            .map(|cfg| {
                g.apply(cfg)
                    .expect("params checked above")
                    .index()
                    .expect("configuration space fits the cap") as usize
            })
            .collect();
        Ok(Permutation::from_vec_unchecked(mapping))
    }
}

/// Updates where every node carries the same pool permutation: a global
/// relabeling of pools, isomorphic to the permutations of `r` points.
pub fn uniform_relabel_subgroup(params: GroupParams, cap: u64) -> Result<Subgroup> {
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
    let gens: Vec<PoolUpdate> = Permutation::all(r)
        .map(|p| PoolUpdate::uniform(params, PoolPermutation::from(p)))
        .collect::<Result<_>>()?;
    // the generators are already the whole subgroup; closing keeps the
    // listing canonical and doubles as a closure check
    crate::subgroup::generate_subgroup(params, &gens, cap)
}

/// A finite group as a Cayley table over indices `0..size`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MultiplicationTable {
    size: usize,
    table: Vec<Vec<usize>>,
}

impl MultiplicationTable {
    /// Validates the Latin-square property and the presence of a two-sided
    /// identity.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let size = table.len();
        if size == 0 {
            return Err(Error::InvalidTable("empty table".into()));
        }
        for row in &table {
            if row.len() != size {
                return Err(Error::InvalidTable("table is not square".into()));
            }
            if Permutation::new(row.clone()).is_err() {
                return Err(Error::InvalidTable("row is not a permutation".into()));
            }
        }
        for c in 0..size {
            let column: Vec<usize> = table.iter().map(|row| row[c]).collect();
            if Permutation::new(column).is_err() {
                return Err(Error::InvalidTable("column is not a permutation".into()));
            }
        }
        let t = Self { size, table };
        if t.identity().is_none() {
            return Err(Error::InvalidTable("no two-sided identity".into()));
        }
        Ok(t)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn rows(&self) -> &[Vec<usize>] {
        &self.table
    }

    #[inline]
    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn identity(&self) -> Option<usize> {
        (0..self.size).find(|&e| (0..self.size).all(|x| self.table[e][x] == x && self.table[x][e] == x))
    }

    pub fn is_associative(&self) -> bool {
        let n = self.size;
        (0..n).all(|a| (0..n).all(|b| (0..n).all(|c| self.mul(self.mul(a, b), c) == self.mul(a, self.mul(b, c)))))
    }

    pub fn is_commutative(&self) -> bool {
        (0..self.size).all(|a| (0..a).all(|b| self.mul(a, b) == self.mul(b, a)))
    }

    pub fn element_order(&self, a: usize) -> usize {
        let e = self.identity().expect("validated table has an identity");
        let mut x = a;
        let mut k = 1;
        while x != e {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Sorted multiset of element orders.
    pub fn order_profile(&self) -> Vec<usize> {
        let mut profile: Vec<usize> = (0..self.size).map(|a| self.element_order(a)).collect();
        profile.sort_unstable();
        profile
    }

    /// Plain-text matrix, one row per line, entries separated by spaces.
    pub fn to_text(&self) -> String {
        let width = (self.size.saturating_sub(1)).to_string().len();
        let mut out = String::new();
        for row in &self.table {
            let line: Vec<String> = row.iter().map(|x| format!("{x:>width$}")).collect();
            out.push_str(&line.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Table of all permutations of `m` points, in lexicographic order, under
/// diagrammatic composition.
pub fn symmetric_group_table(m: usize, cap: u64) -> Result<MultiplicationTable> {
    match factorial_u64(m) {
        Some(size) if size <= cap => {}
        _ => {
            return Err(Error::GroupTooLarge {
                order: crate::order::factorial(m as u64).to_string(),
                cap,
            })
        }
    }
    let perms: Vec<Permutation> = Permutation::all(m).collect();
    let table = perms
        .iter()
        .map(|a| perms.iter().map(|b| a.then(b).rank() as usize).collect())
        .collect();
    MultiplicationTable::new(table)
}

/// Addition table of the integers modulo `m`.
pub fn cyclic_group_table(m: usize) -> Result<MultiplicationTable> {
    if m == 0 {
        return Err(Error::InvalidTable("cyclic group of order 0".into()));
    }
    MultiplicationTable::new((0..m).map(|a| (0..m).map(|b| (a + b) % m).collect()).collect())
}

/// Table of a subgroup over its canonical element order.
pub fn to_table(g: &Subgroup) -> MultiplicationTable {
    let elems = g.elements();
    let table = elems
        .iter()
        .map(|a| {
            elems
                .iter()
                .map(|b| {
                    elems
                        .binary_search(&a.compose_unchecked(b))
                        .expect("subgroup is closed under composition")
                })
                .collect()
        })
        .collect();
    MultiplicationTable::new(table).expect("closed subgroups give group tables")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum IsoVerdict {
    Isomorphic,
    NotIsomorphic,
    /// Invariants agree but the tables are too large for exhaustive search.
    Unknown,
}

/// Decides whether two tables describe isomorphic groups.
///
/// Up to [`EXHAUSTIVE_ISO_LIMIT`] elements the answer is exact; up to
/// [`SCREENING_ISO_LIMIT`] only invariants are compared and a match yields
/// [`IsoVerdict::Unknown`].
pub fn is_isomorphic_small(a: &MultiplicationTable, b: &MultiplicationTable) -> Result<IsoVerdict> {
    if a.size != b.size {
        return Ok(IsoVerdict::NotIsomorphic);
    }
    if a.size > SCREENING_ISO_LIMIT {
        return Err(Error::TooLargeForExhaustive(a.size));
    }
    let orders_a: Vec<usize> = (0..a.size).map(|x| a.element_order(x)).collect();
    let orders_b: Vec<usize> = (0..b.size).map(|x| b.element_order(x)).collect();
    let mut profile_a = orders_a.clone();
    let mut profile_b = orders_b.clone();
    profile_a.sort_unstable();
    profile_b.sort_unstable();
    if profile_a != profile_b || a.is_commutative() != b.is_commutative() {
        return Ok(IsoVerdict::NotIsomorphic);
    }
    if a.size > EXHAUSTIVE_ISO_LIMIT {
        return Ok(IsoVerdict::Unknown);
    }
    let gens = generating_set(a);
    let mut images = Vec::with_capacity(gens.len());
    Ok(if search_generator_images(a, b, &gens, &orders_a, &orders_b, &mut images) {
        IsoVerdict::Isomorphic
    } else {
        IsoVerdict::NotIsomorphic
    })
}

/// Greedy generating set: repeatedly add the first element outside the
/// span of what has been chosen so far.
fn generating_set(t: &MultiplicationTable) -> Vec<usize> {
    let mut gens = Vec::new();
    let mut span = span_of(t, &gens);
    while let Some(x) = (0..t.size).find(|&x| !span[x]) {
        gens.push(x);
        span = span_of(t, &gens);
    }
    gens
}

fn span_of(t: &MultiplicationTable, gens: &[usize]) -> Vec<bool> {
    let e = t.identity().unwrap();
    let mut seen = vec![false; t.size];
    seen[e] = true;
    let mut queue = VecDeque::from([e]);
    while let Some(x) = queue.pop_front() {
        for &g in gens {
            let y = t.mul(x, g);
            if !seen[y] {
                seen[y] = true;
                queue.push_back(y);
            }
        }
    }
    seen
}

/// Backtracks over images of the generators, pruned by element order, and
/// checks each full assignment by extending it along words.
fn search_generator_images(
    a: &MultiplicationTable,
    b: &MultiplicationTable,
    gens: &[usize],
    orders_a: &[usize],
    orders_b: &[usize],
    images: &mut Vec<usize>,
) -> bool {
    if images.len() == gens.len() {
        return extends_to_isomorphism(a, b, gens, images);
    }
    let g = gens[images.len()];
    for candidate in 0..b.size {
        if orders_b[candidate] != orders_a[g] || images.contains(&candidate) {
            continue;
        }
        images.push(candidate);
        if search_generator_images(a, b, gens, orders_a, orders_b, images) {
            return true;
        }
        images.pop();
    }
    false
}

fn extends_to_isomorphism(a: &MultiplicationTable, b: &MultiplicationTable, gens: &[usize], images: &[usize]) -> bool {
    const UNSET: usize = usize::MAX;
    let ea = a.identity().unwrap();
    let eb = b.identity().unwrap();
    let mut map = vec![UNSET; a.size];
    map[ea] = eb;
    let mut queue = VecDeque::from([ea]);
    while let Some(x) = queue.pop_front() {
        for (&g, &h) in gens.iter().zip(images) {
            let y = a.mul(x, g);
            let fy = b.mul(map[x], h);
            if map[y] == UNSET {
                map[y] = fy;
                queue.push_back(y);
            } else if map[y] != fy {
                return false;
            }
        }
    }
    if map.contains(&UNSET) {
        return false;
    }
    let mut hit = vec![false; b.size];
    for &y in &map {
        if std::mem::replace(&mut hit[y], true) {
            return false;
        }
    }
    (0..a.size).all(|x| (0..a.size).all(|y| map[a.mul(x, y)] == b.mul(map[x], map[y])))
}

/// Report for the uniform-relabel subgroup.
#[derive(Debug, Clone, Serialize)]
pub struct RelabelReport {
    pub n: usize,
    pub r: usize,
    pub order: usize,
    pub expected_order: u64,
    pub isomorphic_to_pool_symmetric_group: IsoVerdict,
    pub node_symmetric_claim: &'static str,
    pub elements: Vec<PoolUpdate>,
}

pub fn relabel_report(params: GroupParams, cap: u64) -> Result<RelabelReport> {
    let h = uniform_relabel_subgroup(params, cap)?;
    let verdict = is_isomorphic_small(&to_table(&h), &symmetric_group_table(params.pool_count(), cap)?)?;
    Ok(RelabelReport {
        n: params.node_count(),
        r: params.pool_count(),
        order: h.order(),
        expected_order: factorial_u64(params.pool_count()).expect("bounded by cap"),
        isomorphic_to_pool_symmetric_group: verdict,
        node_symmetric_claim: "unverified: the relabel subgroup permutes the r pools, not the n nodes",
        elements: h.elements().to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::subgroup::DEFAULT_CAP;

    fn p(n: usize, r: usize) -> GroupParams {
        GroupParams::new(n, r).unwrap()
    }

    fn upd(params: GroupParams, maps: &[&[usize]]) -> PoolUpdate {
        PoolUpdate::from_mappings(params, maps.iter().map(|m| m.to_vec()).collect()).unwrap()
    }

    #[test]
    fn cayley_examples() {
        let emb = cayley_embedding(p(2, 2), DEFAULT_CAP).unwrap();
        assert!(emb.image(&PoolUpdate::identity(p(2, 2))).unwrap().is_identity());
        for (g, img) in emb.elements().iter().zip(emb.images()) {
            if g.is_identity() {
                continue;
            }
            assert_eq!(img.cycle_lengths(), vec![2, 2]);
        }
        let emb = cayley_embedding(p(1, 3), DEFAULT_CAP).unwrap();
        assert!(emb.is_injective());
        assert!(emb.is_homomorphism());
        assert_eq!(emb.images().len(), 6);
        assert!(cayley_embedding(p(3, 3), DEFAULT_CAP).is_err());
    }

    #[test]
    fn configuration_action_examples() {
        let params = p(2, 2);
        let act = action_on_configurations(params, DEFAULT_CAP).unwrap();
        assert!(act.image(&PoolUpdate::identity(params)).unwrap().is_identity());
        let both = act.image(&upd(params, &[&[1, 0], &[1, 0]])).unwrap();
        assert_eq!(both.cycle_lengths(), vec![2, 2]);
        let one = act.image(&upd(params, &[&[1, 0], &[0, 1]])).unwrap();
        assert_eq!(one.cycles(), vec![vec![0, 1], vec![2, 3]]);
        assert!(matches!(
            action_on_configurations(p(20, 4), 1000),
            Err(Error::StateSpaceTooLarge { .. })
        ));
    }

    #[test]
    fn relabel_examples() {
        assert_eq!(uniform_relabel_subgroup(p(4, 1), DEFAULT_CAP).unwrap().order(), 1);
        let h = uniform_relabel_subgroup(p(3, 2), DEFAULT_CAP).unwrap();
        assert_eq!(h.elements(), &[PoolUpdate::identity(p(3, 2)), upd(p(3, 2), &[&[1, 0], &[1, 0], &[1, 0]])]);
        assert_eq!(uniform_relabel_subgroup(p(2, 3), DEFAULT_CAP).unwrap().order(), 6);
    }

    #[test]
    fn table_examples() {
        assert_eq!(symmetric_group_table(1, DEFAULT_CAP).unwrap().size(), 1);
        let s2 = symmetric_group_table(2, DEFAULT_CAP).unwrap();
        assert_eq!(s2.rows(), &[vec![0, 1], vec![1, 0]]);
        let s3 = symmetric_group_table(3, DEFAULT_CAP).unwrap();
        assert_eq!(s3.size(), 6);
        assert!(!s3.is_commutative());
        assert!(s3.is_associative());
        assert!(symmetric_group_table(6, DEFAULT_CAP).is_err());
        assert!(MultiplicationTable::new(vec![vec![0, 1], vec![0, 1]]).is_err());
    }

    #[test]
    fn to_table_examples() {
        let trivial = Subgroup::trivial(p(2, 2));
        assert_eq!(to_table(&trivial).size(), 1);
        let full = crate::subgroup::all_subgroups(p(2, 2), DEFAULT_CAP).unwrap().pop().unwrap();
        let klein = to_table(&full);
        // elements in canonical order: e, a, b, ab with a·b = ab
        assert_eq!(
            klein.rows(),
            &[vec![0, 1, 2, 3], vec![1, 0, 3, 2], vec![2, 3, 0, 1], vec![3, 2, 1, 0]]
        );
        assert_eq!(to_table(&uniform_relabel_subgroup(p(3, 2), DEFAULT_CAP).unwrap()).size(), 2);
    }

    #[test]
    fn isomorphism_examples() {
        let s3 = symmetric_group_table(3, DEFAULT_CAP).unwrap();
        assert_eq!(is_isomorphic_small(&s3, &s3).unwrap(), IsoVerdict::Isomorphic);
        let relabel = to_table(&uniform_relabel_subgroup(p(2, 3), DEFAULT_CAP).unwrap());
        assert_eq!(is_isomorphic_small(&relabel, &s3).unwrap(), IsoVerdict::Isomorphic);
        let full = crate::subgroup::all_subgroups(p(2, 2), DEFAULT_CAP).unwrap().pop().unwrap();
        let c4 = cyclic_group_table(4).unwrap();
        assert_eq!(c4.order_profile(), vec![1, 2, 4, 4]);
        assert_eq!(is_isomorphic_small(&c4, &to_table(&full)).unwrap(), IsoVerdict::NotIsomorphic);
        assert_eq!(is_isomorphic_small(&c4, &s3).unwrap(), IsoVerdict::NotIsomorphic);
        let c6 = cyclic_group_table(6).unwrap();
        assert_eq!(is_isomorphic_small(&c6, &s3).unwrap(), IsoVerdict::NotIsomorphic);
    }

    #[test]
    fn isomorphism_tiers() {
        let s5 = symmetric_group_table(5, DEFAULT_CAP).unwrap();
        assert_eq!(is_isomorphic_small(&s5, &s5).unwrap(), IsoVerdict::Unknown);
        let big = cyclic_group_table(201).unwrap();
        assert_eq!(is_isomorphic_small(&big, &big), Err(Error::TooLargeForExhaustive(201)));
    }

    #[test]
    fn text_export() {
        let s2 = symmetric_group_table(2, DEFAULT_CAP).unwrap();
        assert_eq!(s2.to_text(), "0 1\n1 0\n");
    }
}
