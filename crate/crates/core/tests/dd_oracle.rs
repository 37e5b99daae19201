use std::sync::Arc;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tri3::cone::{
    brute_force_extreme_rays, enumerate_observed, enumerate_with, Adjacency, Bits, ConeProblem, DdOptions, RayTrie,
};

fn random_problem(rng: &mut ChaCha8Rng) -> ConeProblem {
    let d = rng.gen_range(2..=10);
    let m = rng.gen_range(1..=6);
    let rows = (0..m)
        .map(|_| (0..d).map(|_| rng.gen_range(-3..=3)).collect())
        .collect();
    ConeProblem::new(d, rows).unwrap()
}

/// Extreme rays of random small cones agree with the support oracle, for
/// every adjacency test and for a shuffled hyperplane order.
#[test]
fn random_systems_match_brute_force() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut nonempty = 0;
    for case in 0..600 {
        let p = random_problem(&mut rng);
        let expected = brute_force_extreme_rays(&p);
        let (trie, _) = enumerate_with(&p, &DdOptions::default()).unwrap();
        assert_eq!(trie, expected, "case {case}: {:?}", p.rows);

        let scan = DdOptions {
            adjacency: Adjacency::Scan,
            order: None,
        };
        assert_eq!(enumerate_with(&p, &scan).unwrap().0, expected, "case {case}");

        let mut order: Vec<usize> = (0..p.rows.len()).collect();
        order.shuffle(&mut rng);
        let cross = DdOptions {
            adjacency: Adjacency::CrossCheck,
            order: Some(order),
        };
        let (rays, stats) = enumerate_with(&p, &cross).unwrap();
        assert_eq!(rays, expected, "case {case}");
        assert_eq!(stats.adjacency_mismatches, 0, "case {case}");
        nonempty += !expected.is_empty() as usize;
    }
    assert!(nonempty > 100, "too few non-trivial cones: {nonempty}");
}

/// A filter closed under taking subsets prunes exactly the rays it forbids.
#[test]
fn random_systems_with_block_filter() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in 0..300 {
        let p = random_problem(&mut rng);
        let d = p.dim;
        let filter = Arc::new(move |s: &Bits| {
            (0..d).step_by(3).all(|b| (b..(b + 3).min(d)).filter(|&i| s.get(i)).count() <= 1)
        });
        let p = p.with_filter(filter);
        let expected = brute_force_extreme_rays(&p);
        let (rays, _) = enumerate_with(&p, &DdOptions::default()).unwrap();
        assert_eq!(rays, expected, "case {case}: {:?}", p.rows);
    }
}

/// Trie adjacency agrees with the all-pairs scan on every intermediate cone,
/// not only on the pairs the enumeration happens to test.
#[test]
fn trie_adjacency_matches_scan_on_intermediate_cones() {
    let mut rng = ChaCha8Rng::seed_from_u64(99);
    let mut checked = 0usize;
    for _ in 0..500 {
        let p = random_problem(&mut rng);
        enumerate_observed(&p, &DdOptions::default(), |set| {
            for i in 0..set.rays.len() {
                for j in i + 1..set.rays.len() {
                    assert_eq!(set.adjacent(i, j).unwrap(), set.adjacent_scan(i, j));
                    checked += 1;
                }
            }
        })
        .unwrap();
    }
    assert!(checked > 10_000, "{checked}");
}

#[test]
fn rows_of_wrong_length_rejected() {
    assert!(ConeProblem::new(3, vec![vec![1, 2]]).is_err());
}

fn bits(d: usize, mask: u32) -> Bits {
    let mut b = Bits::new(d);
    for i in (0..d).filter(|&i| mask >> i & 1 == 1) {
        b.set(i);
    }
    b
}

proptest! {
    /// Trie counts agree with a linear scan over the stored zero sets.
    #[test]
    fn trie_count_matches_scan(
        d in 1usize..12,
        masks in prop::collection::vec(any::<u32>(), 0..40),
        query in any::<u32>(),
        cap in 1usize..6,
    ) {
        let stored: Vec<Bits> = masks.iter().map(|&m| bits(d, m)).collect();
        let mut trie = RayTrie::new(d);
        for z in &stored {
            trie.insert(z);
        }
        let q = bits(d, query);
        let scan = stored.iter().filter(|z| q.is_subset(z)).count();
        prop_assert_eq!(trie.count_containing(&q, cap), scan.min(cap));
        prop_assert_eq!(trie.len(), stored.len());
    }
}
