use blockgroup::group::{enumerate_group, GroupParams};
use blockgroup::perm::Permutation;
use blockgroup::representation::{
    action_on_configurations, cayley_embedding, is_isomorphic_small, symmetric_group_table, to_table,
    uniform_relabel_subgroup, IsoVerdict, MultiplicationTable,
};
use blockgroup::subgroup::{all_subgroups, DEFAULT_CAP};

fn p(n: usize, r: usize) -> GroupParams {
    GroupParams::new(n, r).unwrap()
}

/// Tries every bijection of the underlying sets.
fn naive_isomorphic(a: &MultiplicationTable, b: &MultiplicationTable) -> bool {
    a.size() == b.size()
        && Permutation::all(a.size()).any(|f| {
            (0..a.size()).all(|x| (0..a.size()).all(|y| f.image(a.mul(x, y)) == b.mul(f.image(x), f.image(y))))
        })
}

fn latin(t: &MultiplicationTable) -> bool {
    let n = t.size();
    (0..n).all(|i| Permutation::new(t.rows()[i].clone()).is_ok())
        && (0..n).all(|j| Permutation::new((0..n).map(|i| t.mul(i, j)).collect()).is_ok())
}

#[test]
fn cayley_embedding_is_faithful_homomorphism() {
    for n in 1..=7 {
        for r in 1..=5 {
            let params = p(n, r);
            if params.group_size().is_none_or(|s| s > DEFAULT_CAP) {
                continue;
            }
            let emb = cayley_embedding(params, DEFAULT_CAP).unwrap();
            assert!(emb.is_injective());
            assert!(emb.is_homomorphism());
        }
    }
}

#[test]
fn configuration_action_is_homomorphism() {
    for (n, r) in [(2, 2), (1, 3), (2, 3), (3, 2), (1, 4)] {
        let params = p(n, r);
        let act = action_on_configurations(params, DEFAULT_CAP).unwrap();
        let all: Vec<_> = enumerate_group(params, DEFAULT_CAP).unwrap().collect();
        for a in &all {
            for b in &all {
                let lhs = act.image(&a.compose(b).unwrap()).unwrap();
                let rhs = act.image(a).unwrap().then(&act.image(b).unwrap());
                assert_eq!(lhs, rhs);
            }
        }
    }
}

#[test]
fn relabel_subgroup_is_symmetric_on_pools() {
    for n in 1..=4 {
        for r in 1..=4 {
            let params = p(n, r);
            let h = uniform_relabel_subgroup(params, DEFAULT_CAP).unwrap();
            assert!(h.satisfies_axioms());
            assert_eq!(h.order(), (1..=r).product::<usize>());
            let table = to_table(&h);
            let sym = symmetric_group_table(r, DEFAULT_CAP).unwrap();
            assert_eq!(is_isomorphic_small(&table, &sym).unwrap(), IsoVerdict::Isomorphic);
        }
    }
}

#[test]
fn fast_isomorphism_agrees_with_naive_bijections() {
    let mut tables = Vec::new();
    for (n, r) in [(2, 2), (1, 3), (1, 2), (2, 3)] {
        for h in all_subgroups(p(n, r), DEFAULT_CAP).unwrap() {
            if h.order() <= 6 {
                tables.push(to_table(&h));
            }
        }
    }
    tables.push(blockgroup::representation::cyclic_group_table(4).unwrap());
    tables.push(blockgroup::representation::cyclic_group_table(6).unwrap());
    for a in &tables {
        assert!(latin(a));
        for b in &tables {
            let fast = is_isomorphic_small(a, b).unwrap() == IsoVerdict::Isomorphic;
            assert_eq!(fast, naive_isomorphic(a, b));
        }
    }
}

#[test]
fn relabel_matches_naive_for_s3() {
    let relabel = to_table(&uniform_relabel_subgroup(p(2, 3), DEFAULT_CAP).unwrap());
    let s3 = symmetric_group_table(3, DEFAULT_CAP).unwrap();
    assert!(naive_isomorphic(&relabel, &s3));
}

#[test]
fn produced_tables_are_latin_squares() {
    for m in 1..=4 {
        assert!(latin(&symmetric_group_table(m, DEFAULT_CAP).unwrap()));
    }
    for (n, r) in [(2, 2), (1, 3), (2, 3), (3, 2)] {
        for h in all_subgroups(p(n, r), DEFAULT_CAP).unwrap() {
            let t = to_table(&h);
            assert!(latin(&t));
            assert!(t.is_associative());
        }
    }
}
