use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use tri3::angles::{angle_system, enumerate_taut, enumerate_vertex_angle_structures, AngleVector};
use tri3::census::{enumerate_census, CensusSpec};
use tri3::cone::brute_force_extreme_rays;
use tri3::{examples, isosig, Triangulation};

/// Ideal triangulations with torus or Klein bottle cusps, up to `n`
/// tetrahedra.
fn cusped(n: usize) -> Vec<Triangulation> {
    (1..=n)
        .flat_map(|k| {
            enumerate_census(&CensusSpec {
                tetrahedra: k,
                closed: true,
                orientable: false,
                finite: false,
            })
        })
        .map(|s| isosig::decode(&s).unwrap())
        .filter(|t| angle_system(t).is_ok())
        .collect()
}

/// Tries every choice of one angle π per tetrahedron.
fn taut_by_search(t: &Triangulation) -> BTreeSet<AngleVector> {
    let n = t.size();
    let mut out = BTreeSet::new();
    for code in 0..3usize.pow(n as u32) {
        let mut angles = vec![BigRational::zero(); 3 * n];
        let mut c = code;
        for i in 0..n {
            angles[3 * i + c % 3] = BigRational::one();
            c /= 3;
        }
        let a = AngleVector { angles };
        if a.satisfies(t) {
            out.insert(a);
        }
    }
    out
}

fn by_brute_force(t: &Triangulation) -> Vec<AngleVector> {
    let n = t.size();
    let mut out: Vec<AngleVector> = brute_force_extreme_rays(&angle_system(t).unwrap())
        .into_iter()
        .map(|r| {
            let s = r.coords[3 * n].clone();
            assert!(s > BigInt::zero());
            AngleVector {
                angles: r.coords[..3 * n]
                    .iter()
                    .map(|x| BigRational::new(x.clone(), s.clone()))
                    .collect(),
            }
        })
        .collect();
    out.sort();
    out
}

#[test]
fn figure_eight_vertices_match_brute_force() {
    let t = examples::figure_eight();
    assert_eq!(angle_system(&t).unwrap().dim, 7);
    let dd = enumerate_vertex_angle_structures(&t).unwrap();
    assert_eq!(dd, by_brute_force(&t));
    // Three taut structures, one π per tetrahedron on matching edge pairs.
    let taut = enumerate_taut(&t).unwrap();
    assert_eq!(taut.len(), dd.iter().filter(|a| a.is_taut()).count());
    assert_eq!(taut.iter().cloned().collect::<BTreeSet<_>>(), taut_by_search(&t));
    for a in &taut {
        assert!(a.to_string().split(" || ").count() == 2, "{a}");
    }
}

#[test]
fn census_vertices_match_brute_force() {
    let inputs = cusped(3);
    assert!(inputs.len() > 200);
    for t in inputs.iter().filter(|t| t.size() <= 2) {
        assert_eq!(
            enumerate_vertex_angle_structures(t).unwrap(),
            by_brute_force(t),
            "{}",
            isosig::encode(t)
        );
    }
}

/// The filtered enumeration finds exactly the 0/π solutions.
#[test]
fn taut_enumeration_equals_exhaustive_search() {
    for t in cusped(3) {
        let dd: BTreeSet<_> = enumerate_taut(&t).unwrap().into_iter().collect();
        assert_eq!(dd, taut_by_search(&t), "{}", isosig::encode(&t));
        for a in &dd {
            assert!(a.satisfies(&t) && a.is_taut());
        }
    }
}

#[test]
fn triangulation_without_taut_structure() {
    let t = isosig::decode("abcbcaccbdcbj").unwrap();
    assert!(t.skeleton().classify().orientable);
    assert!(taut_by_search(&t).is_empty());
    assert!(enumerate_taut(&t).unwrap().is_empty());
    // No angle structure at all: the polytope is empty.
    assert!(enumerate_vertex_angle_structures(&t).unwrap().is_empty());
}

#[test]
fn closed_and_bounded_inputs_rejected() {
    assert!(angle_system(&examples::rp3()).is_err());
    assert!(angle_system(&examples::tetrahedron()).is_err());
    assert!(enumerate_taut(&examples::rp3()).is_err());
}
