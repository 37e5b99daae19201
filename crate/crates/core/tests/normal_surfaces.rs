use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use tri3::census::{enumerate_census, CensusSpec};
use tri3::normal::{
    analyze, crush, enumerate_vertex_surfaces, euler_char_cells, euler_char_linear,
    find_almost_normal_sphere, find_nontrivial_normal_sphere, matching_equations,
    reconstruct_standard, satisfies_matching, CoordSystem, SurfaceVector,
};
use tri3::{examples, first_homology, isosig, Triangulation};

fn census(n: usize) -> Vec<Triangulation> {
    enumerate_census(&CensusSpec::closed_orientable(n))
        .iter()
        .map(|s| isosig::decode(s).unwrap())
        .collect()
}

/// Reduced row echelon form over the rationals; returns pivot columns.
fn rref(m: &mut Vec<Vec<BigRational>>) -> Vec<usize> {
    let cols = m.first().map_or(0, |r| r.len());
    let mut pivots = Vec::new();
    let mut row = 0;
    for c in 0..cols {
        let Some(p) = (row..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(row, p);
        let inv = m[row][c].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        let pr = m[row].clone();
        for (r, other) in m.iter_mut().enumerate() {
            if r != row && !other[c].is_zero() {
                let f = other[c].clone();
                for (x, y) in other.iter_mut().zip(&pr) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(c);
        row += 1;
    }
    m.truncate(row);
    pivots
}

/// A basis of the kernel of `rows` in `cols` dimensions.
fn kernel(rows: &[Vec<i64>], cols: usize) -> Vec<Vec<BigRational>> {
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigRational::from_integer(x.into())).collect())
        .collect();
    let pivots = rref(&mut m);
    let mut out = Vec::new();
    for free in (0..cols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![BigRational::zero(); cols];
        v[free] = BigRational::one();
        for (r, &p) in pivots.iter().enumerate() {
            v[p] = -m[r][free].clone();
        }
        out.push(v);
    }
    out
}

fn rank(vs: Vec<Vec<BigRational>>) -> usize {
    let mut m = vs;
    rref(&mut m).len()
}

/// For closed triangulations the quadrilateral (and quadrilateral-octagon)
/// equations cut out exactly the projection of the standard solution space.
#[test]
fn quad_equations_are_projection_of_standard() {
    let mut inputs: Vec<Triangulation> = (1..=3).flat_map(census).collect();
    inputs.push(examples::figure_eight());
    let pairs = [
        (CoordSystem::Standard, CoordSystem::Quad),
        (CoordSystem::StandardAlmostNormal, CoordSystem::QuadOct),
    ];
    for t in inputs {
        for (big, small) in pairs {
            let n = t.size();
            let (pb, ps) = (big.per_tet(), small.per_tet());
            let std = matching_equations(&t, big).unwrap();
            let quad = matching_equations(&t, small).unwrap();
            let projected: Vec<Vec<BigRational>> = kernel(&std, pb * n)
                .into_iter()
                .map(|v| (0..n).flat_map(|i| v[pb * i + 4..pb * (i + 1)].to_vec()).collect())
                .collect();
            for v in &projected {
                for r in &quad {
                    let dot: BigRational = r
                        .iter()
                        .zip(v)
                        .map(|(&a, x)| x * BigRational::from_integer(a.into()))
                        .sum();
                    assert!(dot.is_zero(), "{}", isosig::encode(&t));
                }
            }
            let (proj, full) = (rank(projected), kernel(&quad, ps * n).len());
            // Ideal triangulations also carry spun surfaces with no finite
            // triangle completion, so there the projection can be smaller.
            if t.skeleton().classify().closed {
                assert_eq!(proj, full, "{} {small:?}", isosig::encode(&t));
            } else {
                assert!(proj <= full);
            }
        }
    }
}

#[test]
fn euler_characteristic_three_ways() {
    let mut inputs: Vec<Triangulation> = (1..=3).flat_map(census).collect();
    inputs.push(examples::tetrahedron());
    for t in &inputs {
        for sys in [CoordSystem::Standard, CoordSystem::StandardAlmostNormal] {
            for s in enumerate_vertex_surfaces(t, sys).unwrap() {
                assert!(satisfies_matching(t, &s).unwrap());
                assert!(s.satisfies_constraints());
                let a = analyze(t, &s).unwrap();
                let lin = euler_char_linear(t, &s).unwrap();
                let cells = euler_char_cells(t, &s).unwrap();
                assert_eq!(BigInt::from(a.euler_char), lin, "{s}");
                assert_eq!(a.euler_char, cells, "{s}");
            }
        }
    }
}

#[test]
fn quad_count_at_most_standard_count() {
    for t in (1..=3).flat_map(census) {
        let q = enumerate_vertex_surfaces(&t, CoordSystem::Quad).unwrap().len();
        let s = enumerate_vertex_surfaces(&t, CoordSystem::Standard).unwrap().len();
        assert!(q <= s);
    }
}

/// Reconstructing the quadrilateral part of a standard surface gives the
/// same surface with some vertex links removed.
#[test]
fn reconstruction_agrees_with_standard_enumeration() {
    for t in (1..=3).flat_map(census) {
        let skel = t.skeleton();
        for s in enumerate_vertex_surfaces(&t, CoordSystem::Standard).unwrap() {
            let n = t.size();
            let q: Vec<BigInt> = (0..n)
                .flat_map(|i| (0..3).map(move |k| (i, k)))
                .map(|(i, k)| s.quad(i, k))
                .collect();
            let q = SurfaceVector::new(CoordSystem::Quad, q).unwrap();
            let r = reconstruct_standard(&t, &q).unwrap();
            assert!(satisfies_matching(&t, &r).unwrap());
            for vertex in &skel.vertices {
                let diffs: Vec<BigInt> = vertex
                    .corners
                    .iter()
                    .map(|&(i, v)| s.triangle(i, v) - r.triangle(i, v))
                    .collect();
                assert!(diffs.iter().all(|d| *d == diffs[0] && *d >= BigInt::zero()));
            }
        }
    }
}

#[test]
fn vertex_links_are_spheres() {
    for t in (1..=3).flat_map(census) {
        for s in enumerate_vertex_surfaces(&t, CoordSystem::Standard).unwrap() {
            if s.is_vertex_linking() {
                let a = analyze(&t, &s).unwrap();
                assert!(a.is_two_sphere() && a.vertex_linking);
            }
        }
    }
}

#[test]
fn rp3_projective_plane_and_its_double() {
    let t = examples::rp3();
    let quads = enumerate_vertex_surfaces(&t, CoordSystem::Quad).unwrap();
    let mut saw = false;
    for q in quads {
        let s = reconstruct_standard(&t, &q).unwrap();
        let a = analyze(&t, &s).unwrap();
        if a.euler_char == 1 {
            saw = true;
            assert!(a.is_projective_plane());
            let d = reconstruct_standard(&t, &q.scaled(2)).unwrap();
            let b = analyze(&t, &d).unwrap();
            assert!(b.is_two_sphere() && b.components[0].orientable);
        }
    }
    assert!(saw);
    let sphere = find_nontrivial_normal_sphere(&t).unwrap().unwrap();
    assert!(!sphere.is_vertex_linking());
    let crushed = crush(&t, &sphere).unwrap();
    assert!(crushed.size() < 2);
    for c in crushed.split_components() {
        let c_skel = c.skeleton().classify();
        assert!(c_skel.valid && c_skel.closed);
    }
}

#[test]
fn sphere_search_rejects_bounded_input() {
    assert!(find_nontrivial_normal_sphere(&examples::tetrahedron()).is_err());
}

#[test]
fn crushing_reduces_and_keeps_homology_bookkeeping() {
    for t in (1..=3).flat_map(census) {
        let Some(s) = find_nontrivial_normal_sphere(&t).unwrap() else { continue };
        let out = crush(&t, &s).unwrap();
        assert!(out.size() < t.size());
        let h = first_homology(&t).unwrap().invariants();
        let mut sum = (0, 0, 0);
        for c in out.split_components() {
            let cl = c.skeleton().classify();
            assert!(cl.valid && cl.closed && cl.orientable, "{}", isosig::encode(&t));
            let (r, t2, t3) = first_homology(&c).unwrap().invariants();
            sum = (sum.0 + r, sum.1 + t2, sum.2 + t3);
        }
        // Crushing only deletes summands, each carrying at most one unit.
        assert!(sum.0 <= h.0 && sum.1 <= h.1 && sum.2 <= h.2, "{}", isosig::encode(&t));
    }
}

#[test]
fn one_vertex_spheres_have_almost_normal_spheres() {
    let mut checked = 0;
    for t in (1..=3).flat_map(census) {
        if t.skeleton().vertices.len() != 1 || !first_homology(&t).unwrap().is_trivial() {
            continue;
        }
        if find_nontrivial_normal_sphere(&t).unwrap().is_some() {
            continue;
        }
        let s = find_almost_normal_sphere(&t).unwrap();
        let s = s.unwrap_or_else(|| panic!("{}", isosig::encode(&t)));
        assert!(s.octagon_total().is_one());
        checked += 1;
    }
    assert!(checked > 0);
}
