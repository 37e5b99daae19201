//! Angle structures on ideal triangulations.
//!
//! Each tetrahedron carries three angles, one per pair of opposite edges,
//! stored as rational multiples of π. Pair `k` is the pair of edges that
//! quadrilateral type `k` does not meet. The three angles in a tetrahedron
//! sum to π and the angles around each edge sum to 2π. An extra projective
//! coordinate turns the polytope into a cone whose extreme rays with a
//! positive last coordinate are the vertex angle structures.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::cone::{self, Bits, ConeProblem};
use crate::error::{Error, Result};
use crate::perm::quad_pairing;
use crate::skeleton::LinkType;
use crate::triangulation::Triangulation;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AngleVector {
    /// `3n` angles in units of π.
    pub angles: Vec<BigRational>,
}

impl AngleVector {
    pub fn tetrahedra(&self) -> usize {
        self.angles.len() / 3
    }

    pub fn angle(&self, tet: usize, pair: usize) -> &BigRational {
        &self.angles[3 * tet + pair]
    }

    /// Every angle is exactly 0 or π.
    pub fn is_taut(&self) -> bool {
        self.angles.iter().all(|a| a.is_zero() || a.is_one())
    }

    /// Checks non-negativity and both sum conditions exactly.
    pub fn satisfies(&self, tri: &Triangulation) -> bool {
        if self.angles.len() != 3 * tri.size() || self.angles.iter().any(|a| a.is_negative()) {
            return false;
        }
        let one = BigRational::one();
        for t in 0..tri.size() {
            let s: BigRational = (0..3).map(|k| self.angle(t, k)).sum();
            if s != one {
                return false;
            }
        }
        let skel = tri.skeleton();
        let two = BigRational::from_integer(BigInt::from(2));
        skel.edges.iter().filter(|e| !e.boundary).all(|e| {
            let s: BigRational = e
                .embeddings
                .iter()
                .map(|emb| self.angle(emb.tet, pair_of(emb.perm.apply(0), emb.perm.apply(1))))
                .sum();
            s == two
        })
    }
}

impl fmt::Display for AngleVector {
    /// Per tetrahedron `a0 ; a1 ; a2` in units of π, joined by ` || `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let blocks: Vec<String> = self
            .angles
            .chunks(3)
            .map(|c| c.iter().map(|a| a.to_string()).collect::<Vec<_>>().join(" ; "))
            .collect();
        f.write_str(&blocks.join(" || "))
    }
}

/// The angle pair containing the edge from `a` to `b`.
fn pair_of(a: usize, b: usize) -> usize {
    quad_pairing(a, b)
}

fn require_ideal(tri: &Triangulation) -> Result<()> {
    let skel = tri.skeleton();
    let c = skel.classify();
    if tri.is_empty() || !c.valid || tri.has_boundary_faces() {
        return Err(Error::Precondition(
            "angle structures need a valid triangulation with no boundary faces".into(),
        ));
    }
    let ok = skel.vertices.iter().all(|v| {
        matches!(v.link.classification, LinkType::Torus | LinkType::KleinBottle)
    });
    if !ok {
        return Err(Error::Precondition(
            "every vertex link must be a torus or Klein bottle".into(),
        ));
    }
    Ok(())
}

/// The projectivised angle cone in `3n + 1` coordinates, the last being
/// the projective coordinate.
pub fn angle_system(tri: &Triangulation) -> Result<ConeProblem> {
    require_ideal(tri)?;
    let n = tri.size();
    let d = 3 * n + 1;
    let mut rows = Vec::new();
    for t in 0..n {
        let mut r = vec![0i64; d];
        r[3 * t..3 * t + 3].fill(1);
        r[3 * n] = -1;
        rows.push(r);
    }
    let skel = tri.skeleton();
    for e in skel.edges.iter().filter(|e| !e.boundary) {
        let mut r = vec![0i64; d];
        for emb in &e.embeddings {
            r[3 * emb.tet + pair_of(emb.perm.apply(0), emb.perm.apply(1))] += 1;
        }
        r[3 * n] = -2;
        rows.push(r);
    }
    ConeProblem::new(d, rows)
}

fn dehomogenise(n: usize, ray: &cone::Ray) -> Option<AngleVector> {
    let s = &ray.coords[3 * n];
    if !s.is_positive() {
        return None;
    }
    Some(AngleVector {
        angles: ray.coords[..3 * n]
            .iter()
            .map(|x| BigRational::new(x.clone(), s.clone()))
            .collect(),
    })
}

pub fn enumerate_vertex_angle_structures(tri: &Triangulation) -> Result<Vec<AngleVector>> {
    let p = angle_system(tri)?;
    let n = tri.size();
    let mut out: Vec<AngleVector> = cone::enumerate_extreme_rays(&p)?
        .iter()
        .filter_map(|r| dehomogenise(n, r))
        .collect();
    out.sort();
    Ok(out)
}

/// At most one positive angle per tetrahedron in the merged support.
pub fn taut_filter(n: usize) -> Arc<cone::PairFilter> {
    Arc::new(move |s: &Bits| (0..n).all(|t| (0..3).filter(|&k| s.get(3 * t + k)).count() <= 1))
}

/// Taut angle structures. Every taut structure is a vertex of the angle
/// polytope, and two rays combine into one only if together they use at
/// most one angle per tetrahedron, so the enumeration can discard every
/// other pair.
pub fn enumerate_taut(tri: &Triangulation) -> Result<Vec<AngleVector>> {
    let n = tri.size();
    let p = angle_system(tri)?.with_filter(taut_filter(n));
    let mut out: Vec<AngleVector> = cone::enumerate_extreme_rays(&p)?
        .iter()
        .filter_map(|r| dehomogenise(n, r))
        .filter(AngleVector::is_taut)
        .collect();
    out.sort();
    Ok(out)
}
