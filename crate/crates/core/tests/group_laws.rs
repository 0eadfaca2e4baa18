use std::collections::HashSet;

use blockgroup::group::{enumerate_group, random_element, Configuration, GroupParams, PoolUpdate};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn params() -> impl Strategy<Value = GroupParams> {
    (1usize..=6, 1usize..=5).prop_map(|(n, r)| GroupParams::new(n, r).unwrap())
}

fn element(params: GroupParams) -> impl Strategy<Value = PoolUpdate> {
    any::<u64>().prop_map(move |seed| random_element(params, seed))
}

fn config(params: GroupParams) -> impl Strategy<Value = Configuration> {
    prop::collection::vec(0..params.pool_count(), params.node_count())
        .prop_map(move |pools| Configuration::new(params, pools).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn associativity((a, b, c) in params().prop_flat_map(|p| (element(p), element(p), element(p)))) {
        let left = a.compose(&b).unwrap().compose(&c).unwrap();
        let right = a.compose(&b.compose(&c).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn identity_and_inverse(a in params().prop_flat_map(element)) {
        let e = PoolUpdate::identity(a.params());
        prop_assert_eq!(&e.compose(&a).unwrap(), &a);
        prop_assert_eq!(&a.compose(&e).unwrap(), &a);
        prop_assert_eq!(&a.compose(&a.invert()).unwrap(), &e);
        prop_assert_eq!(&a.invert().compose(&a).unwrap(), &e);
        prop_assert_eq!(&a.invert().invert(), &a);
    }

    #[test]
    fn action_respects_composition((a, b, cfg) in params().prop_flat_map(|p| (element(p), element(p), config(p)))) {
        let lhs = a.compose(&b).unwrap().apply(&cfg).unwrap();
        let rhs = b.apply(&a.apply(&cfg).unwrap()).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn element_order_matches_iteration(a in params().prop_flat_map(element)) {
        // oracle: multiply until the identity reappears
        let mut x = a.clone();
        let mut m = 1u64;
        while !x.is_identity() {
            x = x.compose(&a).unwrap();
            m += 1;
        }
        prop_assert_eq!(a.element_order(), m);
        prop_assert!(a.power(m as i64).is_identity());
    }

    #[test]
    fn power_laws(a in params().prop_flat_map(element), j in -8i64..8, k in -8i64..8) {
        prop_assert_eq!(a.power(j).compose(&a.power(k)).unwrap(), a.power(j + k));
        prop_assert_eq!(a.power(-k), a.invert().power(k));
    }
}

#[test]
fn compose_matches_pointwise_oracle() {
    let params = GroupParams::new(1, 3).unwrap();
    let a = [1usize, 2, 0];
    let b = [0usize, 2, 1];
    let oracle: Vec<usize> = (0..3).map(|i| b[a[i]]).collect();
    assert_eq!(oracle, vec![2, 1, 0]);
    let ua = PoolUpdate::from_mappings(params, vec![a.to_vec()]).unwrap();
    let ub = PoolUpdate::from_mappings(params, vec![b.to_vec()]).unwrap();
    assert_eq!(ua.compose(&ub).unwrap().node(0).mapping(), oracle.as_slice());
}

#[test]
fn inverse_matches_exhaustive_search() {
    let params = GroupParams::new(1, 3).unwrap();
    let a = PoolUpdate::from_mappings(params, vec![vec![1, 2, 0]]).unwrap();
    let e = PoolUpdate::identity(params);
    let inverses: Vec<PoolUpdate> = enumerate_group(params, 10)
        .unwrap()
        .filter(|x| a.compose(x).unwrap() == e && x.compose(&a).unwrap() == e)
        .collect();
    assert_eq!(inverses.len(), 1);
    assert_eq!(inverses[0].node(0).mapping(), &[2, 0, 1]);
    assert_eq!(a.invert(), inverses[0]);
}

#[test]
fn commutativity_boundary() {
    // r ≤ 2: abelian, checked exhaustively
    for n in 1..=4 {
        for r in 1..=2 {
            let params = GroupParams::new(n, r).unwrap();
            let all: Vec<_> = enumerate_group(params, 5000).unwrap().collect();
            for a in &all {
                for b in &all {
                    assert_eq!(a.compose(b).unwrap(), b.compose(a).unwrap());
                }
            }
        }
    }
    // r ≥ 3: a non-commuting pair exists for every n
    for n in 1..=6 {
        for r in 3..=6 {
            let params = GroupParams::new(n, r).unwrap();
            let mut s = PoolUpdate::identity(params).per_node().to_vec();
            let mut t = s.clone();
            s[0] = blockgroup::PoolPermutation::transposition(r, 0, 1);
            t[0] = blockgroup::PoolPermutation::transposition(r, 1, 2);
            let a = PoolUpdate::new(params, s).unwrap();
            let b = PoolUpdate::new(params, t).unwrap();
            assert_ne!(a.compose(&b).unwrap(), b.compose(&a).unwrap(), "n={n} r={r}");
        }
    }
}

#[test]
fn element_orders_divide_group_size() {
    for n in 1..=6 {
        for r in 1..=5 {
            let params = GroupParams::new(n, r).unwrap();
            let Some(size) = params.group_size().filter(|&s| s <= 5000) else { continue };
            let mut count = 0u64;
            for g in enumerate_group(params, 5000).unwrap() {
                assert_eq!(size % g.element_order(), 0);
                count += 1;
            }
            assert_eq!(count, size);
        }
    }
}

#[test]
fn enumeration_has_no_duplicates() {
    for (n, r) in [(2, 2), (1, 3), (2, 3), (3, 2), (1, 4)] {
        let params = GroupParams::new(n, r).unwrap();
        let all: Vec<_> = enumerate_group(params, 200).unwrap().collect();
        let set: HashSet<_> = all.iter().cloned().collect();
        assert_eq!(set.len(), all.len());
        assert_eq!(all.len() as u64, params.group_size().unwrap());
    }
}

#[test]
fn random_elements_are_uniform() {
    // 6000 draws over the 6 permutations of 3 pools: each ≈ 1000 ± 150,
    // and the chi-square statistic (5 d.o.f.) stays below the 0.999 quantile
    let params = GroupParams::new(1, 3).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut counts = [0u32; 6];
    for _ in 0..6000 {
        let g = PoolUpdate::random(params, &mut rng);
        counts[g.rank().unwrap() as usize] += 1;
    }
    for c in counts {
        assert!((850..=1150).contains(&c), "{counts:?}");
    }
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - 1000.0).powi(2) / 1000.0).sum();
    assert!(chi2 < 20.52, "chi2 = {chi2}");

    let mut seeded = [0u32; 6];
    for seed in 0..6000 {
        seeded[random_element(params, seed).rank().unwrap() as usize] += 1;
    }
    for c in seeded {
        assert!((850..=1150).contains(&c), "{seeded:?}");
    }
}
