use tri3::census::{brute_force_census, enumerate_census, CensusSpec};
use tri3::isosig;

fn specs(n: usize) -> Vec<CensusSpec> {
    let mut out = Vec::new();
    for closed in [true, false] {
        for orientable in [true, false] {
            for finite in [true, false] {
                out.push(CensusSpec {
                    tetrahedra: n,
                    closed,
                    orientable,
                    finite,
                });
            }
        }
    }
    out
}

#[test]
fn matches_brute_force_up_to_two_tetrahedra() {
    for n in 1..=2 {
        for spec in specs(n) {
            assert_eq!(enumerate_census(&spec), brute_force_census(&spec), "{spec:?}");
        }
    }
}

#[test]
fn closed_orientable_counts() {
    let counts: Vec<usize> = (1..=3)
        .map(|n| enumerate_census(&CensusSpec::closed_orientable(n)).len())
        .collect();
    assert_eq!(counts, [4, 16, 76]);
}

#[test]
fn signatures_round_trip_and_are_distinct() {
    for spec in specs(2).into_iter().chain([CensusSpec::closed_orientable(3)]) {
        let sigs = enumerate_census(&spec);
        for s in &sigs {
            let t = isosig::decode(s).unwrap();
            assert_eq!(&isosig::encode(&t), s);
            assert!(spec.accepts(&t));
        }
        let mut dedup = sigs.clone();
        dedup.dedup();
        assert_eq!(dedup.len(), sigs.len());
    }
}
