use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use tri3::census::{enumerate_census, CensusSpec};
use tri3::highlevel::{
    connected_sum_decomposition, is_ball, is_three_sphere, is_three_sphere_traced,
    is_zero_efficient,
};
use tri3::simplify::{inflate, simplify_fast};
use tri3::{examples, first_homology, isosig, Triangulation};

fn census(n: usize) -> Vec<Triangulation> {
    enumerate_census(&CensusSpec::closed_orientable(n))
        .iter()
        .map(|s| isosig::decode(s).unwrap())
        .collect()
}

fn sig(s: &str) -> Triangulation {
    isosig::decode(s).unwrap()
}

/// Two-tetrahedron 3-spheres with one, two and three vertices, and a
/// coned tetrahedron. (The one-tetrahedron spheres admit no 2-3 move.)
fn sphere_seeds() -> Vec<Triangulation> {
    let mut v: Vec<Triangulation> = ["abcbcaccbhcbf", "abcbcaccbdcbb", "abcbcaccbacbc", "abcbcaccbtcbb"]
        .into_iter()
        .map(sig)
        .collect();
    v.push(examples::tetrahedron().cone_boundary().unwrap());
    v
}

#[test]
fn inflated_spheres_are_recognised() {
    let seeds = sphere_seeds();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in 0..100 {
        let base = &seeds[i % seeds.len()];
        let k = rng.gen_range(1..=12 - base.size());
        let t = inflate(base, k, rng.gen()).unwrap();
        assert!(t.size() <= 12);
        let s = isosig::encode(&t);
        assert!(is_three_sphere(&t).unwrap(), "{s}");
        assert!(connected_sum_decomposition(&t).unwrap().is_empty(), "{s}");
    }
}

#[test]
fn census_recognition_matches_homology() {
    for t in (1..=3).flat_map(census) {
        let trivial = first_homology(&t).unwrap().is_trivial();
        let (s3, trace) = is_three_sphere_traced(&t).unwrap();
        assert_eq!(s3, trivial, "{}", isosig::encode(&t));
        for (before, after) in trace.crushes {
            assert!(after.0 <= before.0 && after.1 <= before.1 && after.2 <= before.2);
        }
    }
}

#[test]
fn rp3_is_not_a_sphere() {
    let t = examples::rp3();
    assert!(!is_three_sphere(&t).unwrap());
    let d = connected_sum_decomposition(&t).unwrap();
    assert!(!d.is_empty());
    assert_ne!(d.render(), "S3");
}

#[test]
fn connected_sums() {
    let l31 = sig("abcbcaccbacbj");
    let rp3 = examples::rp3();
    let sum = simplify_fast(&l31.connected_sum(&rp3).unwrap(), 0).unwrap().result;
    assert_eq!(first_homology(&sum).unwrap().invariants(), (0, 1, 1));
    assert!(!is_three_sphere(&sum).unwrap());
    let d = connected_sum_decomposition(&sum).unwrap();
    let t2: usize = d.rp3 + d.summands.iter().map(|s| first_homology(s).unwrap().t2()).sum::<usize>();
    let t3: usize = d.l31 + d.summands.iter().map(|s| first_homology(s).unwrap().t3()).sum::<usize>();
    assert_eq!((t2, t3), (1, 1));
    assert_eq!(d.s2xs1, 0);

    let s3 = sig("abcbcaccbhcbf");
    let double = s3.connected_sum(&sphere_seeds()[4]).unwrap();
    assert!(is_three_sphere(&double).unwrap());
}

#[test]
fn s2_cross_s1_is_counted_by_homology() {
    let t = sig("abcbcajcbacbj");
    assert_eq!(first_homology(&t).unwrap().invariants(), (1, 0, 0));
    assert!(!is_three_sphere(&t).unwrap());
    let d = connected_sum_decomposition(&t).unwrap();
    let rank: usize = d.s2xs1 + d.summands.iter().map(|s| first_homology(s).unwrap().rank).sum::<usize>();
    assert_eq!(rank, 1);
}

/// Indices of two tetrahedra sharing no vertex.
fn vertex_disjoint_pair(t: &Triangulation) -> (usize, usize) {
    let skel = t.skeleton();
    for i in 0..t.size() {
        for j in i + 1..t.size() {
            let a = skel.tet_vertices[i];
            if skel.tet_vertices[j].iter().all(|v| !a.contains(v)) {
                return (i, j);
            }
        }
    }
    panic!("no vertex-disjoint pair");
}

#[test]
fn balls() {
    assert!(is_ball(&examples::tetrahedron()).unwrap());
    let sphere = examples::tetrahedron()
        .cone_boundary()
        .unwrap()
        .barycentric_subdivision();

    let mut ball = sphere.clone();
    ball.remove_tetrahedra(&[0]);
    assert!(is_ball(&ball).unwrap());

    // A 3-sphere minus two disjoint balls: connected, two boundary spheres.
    let (i, j) = vertex_disjoint_pair(&sphere);
    let mut shell = sphere.clone();
    shell.remove_tetrahedra(&[i, j]);
    let skel = shell.skeleton();
    let c = skel.classify();
    assert!(c.valid && c.connected);
    assert_eq!(skel.boundary_components.len(), 2);
    assert!(!is_ball(&shell).unwrap());

    // Punctured RP3 has sphere boundary but is not a ball.
    let mut punctured = examples::rp3().barycentric_subdivision();
    punctured.remove_tetrahedra(&[0]);
    assert!(punctured.skeleton().classify().valid);
    assert!(!is_ball(&punctured).unwrap());

    // Two separate balls.
    assert!(!is_ball(&Triangulation::with_tetrahedra(2)).unwrap());
}

#[test]
fn zero_efficiency() {
    assert!(is_zero_efficient(&examples::tetrahedron()).is_err());
    assert!(!is_zero_efficient(&examples::rp3()).unwrap());
    let t = sig("abebbbcbtcdjccsccvcdj");
    assert_eq!(t.skeleton().vertices.len(), 2);
    assert!(is_zero_efficient(&t).unwrap());
    assert!(is_three_sphere(&t).unwrap());
}
