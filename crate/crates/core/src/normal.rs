//! Normal and almost normal surfaces: coordinates, matching equations,
//! vertex enumeration, reconstruction from quadrilaterals, analysis of the
//! resulting surface, sphere searches and crushing.
//!
//! Within a tetrahedron, triangle `v` cuts off vertex `v`; quadrilateral `k`
//! separates the vertex pairs described by [`QUAD_PARTNER`]; octagon `k`
//! separates the same pairs as quadrilateral `k` and meets each of the two
//! edges joining paired vertices twice.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::cone::{self, Bits, ConeProblem, PairFilter};
use crate::error::{Error, Result};
use crate::perm::{quad_pairing, Perm4, QUAD_PARTNER};
use crate::skeleton::Skeleton;
use crate::triangulation::Triangulation;
use crate::union_find::ParityUnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CoordSystem {
    Standard,
    Quad,
    StandardAlmostNormal,
    QuadOct,
}

impl CoordSystem {
    pub const ALL: [CoordSystem; 4] = [
        CoordSystem::Standard,
        CoordSystem::Quad,
        CoordSystem::StandardAlmostNormal,
        CoordSystem::QuadOct,
    ];

    pub fn per_tet(self) -> usize {
        match self {
            CoordSystem::Standard => 7,
            CoordSystem::Quad => 3,
            CoordSystem::StandardAlmostNormal => 10,
            CoordSystem::QuadOct => 6,
        }
    }

    pub fn dim(self, n: usize) -> usize {
        self.per_tet() * n
    }

    pub fn has_triangles(self) -> bool {
        matches!(self, CoordSystem::Standard | CoordSystem::StandardAlmostNormal)
    }

    pub fn has_octagons(self) -> bool {
        matches!(self, CoordSystem::StandardAlmostNormal | CoordSystem::QuadOct)
    }

    /// The system with triangle coordinates added.
    pub fn standard(self) -> CoordSystem {
        if self.has_octagons() {
            CoordSystem::StandardAlmostNormal
        } else {
            CoordSystem::Standard
        }
    }

    /// Offset of the first quadrilateral coordinate within a block.
    fn quad_offset(self) -> usize {
        if self.has_triangles() {
            4
        } else {
            0
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            CoordSystem::Standard => "standard",
            CoordSystem::Quad => "quad",
            CoordSystem::StandardAlmostNormal => "standardan",
            CoordSystem::QuadOct => "quadoct",
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            CoordSystem::Standard => "Standard normal (tri-quad)",
            CoordSystem::Quad => "Quad normal",
            CoordSystem::StandardAlmostNormal => "Standard almost normal (tri-quad-oct)",
            CoordSystem::QuadOct => "Quad-oct almost normal",
        }
    }
}

impl std::str::FromStr for CoordSystem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CoordSystem::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Precondition(format!("unknown coordinate system {s:?}")))
    }
}

/// Column indices of one coordinate system.
#[derive(Clone, Copy)]
struct Layout {
    sys: CoordSystem,
}

impl Layout {
    fn tri(self, t: usize, v: usize) -> Option<usize> {
        self.sys.has_triangles().then(|| self.sys.per_tet() * t + v)
    }

    fn quad(self, t: usize, k: usize) -> usize {
        self.sys.per_tet() * t + self.sys.quad_offset() + k
    }

    fn oct(self, t: usize, k: usize) -> Option<usize> {
        self.sys
            .has_octagons()
            .then(|| self.sys.per_tet() * t + self.sys.quad_offset() + 3 + k)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SurfaceVector {
    pub system: CoordSystem,
    pub coords: Vec<BigInt>,
}

impl PartialOrd for CoordSystem {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for CoordSystem {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

impl SurfaceVector {
    pub fn new(system: CoordSystem, coords: Vec<BigInt>) -> Result<Self> {
        if !coords.len().is_multiple_of(system.per_tet()) {
            return Err(Error::DimensionMismatch {
                expected: coords.len().next_multiple_of(system.per_tet()),
                found: coords.len(),
            });
        }
        if coords.iter().any(|c| c.is_negative()) {
            return Err(Error::NotAdmissible("negative coordinate".into()));
        }
        Ok(SurfaceVector { system, coords })
    }

    pub fn from_i64(system: CoordSystem, coords: &[i64]) -> Result<Self> {
        Self::new(system, coords.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn tetrahedra(&self) -> usize {
        self.coords.len() / self.system.per_tet()
    }

    fn layout(&self) -> Layout {
        Layout { sys: self.system }
    }

    pub fn triangle(&self, t: usize, v: usize) -> BigInt {
        self.layout()
            .tri(t, v)
            .map_or_else(BigInt::zero, |i| self.coords[i].clone())
    }

    pub fn quad(&self, t: usize, k: usize) -> BigInt {
        self.coords[self.layout().quad(t, k)].clone()
    }

    pub fn octagon(&self, t: usize, k: usize) -> BigInt {
        self.layout()
            .oct(t, k)
            .map_or_else(BigInt::zero, |i| self.coords[i].clone())
    }

    pub fn octagon_total(&self) -> BigInt {
        (0..self.tetrahedra())
            .flat_map(|t| (0..3).map(move |k| (t, k)))
            .map(|(t, k)| self.octagon(t, k))
            .sum()
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Zero::is_zero)
    }

    /// Non-zero with no quadrilaterals or octagons.
    pub fn is_vertex_linking(&self) -> bool {
        !self.is_zero()
            && (0..self.tetrahedra()).all(|t| {
                (0..3).all(|k| self.quad(t, k).is_zero() && self.octagon(t, k).is_zero())
            })
    }

    pub fn scaled(&self, k: u32) -> SurfaceVector {
        SurfaceVector {
            system: self.system,
            coords: self.coords.iter().map(|c| c * k).collect(),
        }
    }

    /// At most one non-zero quadrilateral or octagon coordinate per
    /// tetrahedron, and at most one non-zero octagon coordinate overall.
    pub fn satisfies_constraints(&self) -> bool {
        constraint_ok(&self.support(), self.tetrahedra(), self.system)
    }

    pub fn support(&self) -> Bits {
        let mut b = Bits::new(self.coords.len());
        for (i, c) in self.coords.iter().enumerate() {
            if !c.is_zero() {
                b.set(i);
            }
        }
        b
    }
}

impl fmt::Display for SurfaceVector {
    /// Per tetrahedron `t0 t1 t2 t3 ; q0 q1 q2 [; o0 o1 o2]`, joined by ` || `.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let per = self.system.per_tet();
        let q = self.system.quad_offset();
        for (t, block) in self.coords.chunks(per).enumerate() {
            if t > 0 {
                f.write_str(" || ")?;
            }
            let join = |xs: &[BigInt]| {
                xs.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(" ")
            };
            let mut groups = Vec::new();
            if q > 0 {
                groups.push(join(&block[..4]));
            }
            groups.push(join(&block[q..q + 3]));
            if self.system.has_octagons() {
                groups.push(join(&block[q + 3..q + 6]));
            }
            f.write_str(&groups.join(" ; "))?;
        }
        Ok(())
    }
}

fn constraint_ok(support: &Bits, n: usize, sys: CoordSystem) -> bool {
    let l = Layout { sys };
    let mut octs = 0;
    for t in 0..n {
        let mut here = 0;
        for k in 0..3 {
            if support.get(l.quad(t, k)) {
                here += 1;
            }
            if let Some(o) = l.oct(t, k) {
                if support.get(o) {
                    here += 1;
                    octs += 1;
                }
            }
        }
        if here > 1 || octs > 1 {
            return false;
        }
    }
    true
}

/// The quadrilateral (and octagon) constraints as a pair filter.
pub fn constraint_filter(n: usize, sys: CoordSystem) -> Arc<PairFilter> {
    Arc::new(move |s: &Bits| constraint_ok(s, n, sys))
}

fn require_valid(skel: &Skeleton) -> Result<()> {
    if !skel.classify().valid {
        return Err(Error::Precondition("triangulation is not valid".into()));
    }
    Ok(())
}

/// Side A of a quadrilateral or octagon type: the side containing vertex 0.
fn on_side_a(k: usize, v: usize) -> bool {
    v == 0 || QUAD_PARTNER[k][0] == v
}

/// Adds the arcs of each disc type meeting corner `v` of face `f` of
/// tetrahedron `t`, with sign `sign`, into `row`.
fn add_corner(row: &mut [i64], l: Layout, t: usize, f: usize, v: usize, sign: i64) {
    if let Some(i) = l.tri(t, v) {
        row[i] += sign;
    }
    let k = quad_pairing(v, f);
    row[l.quad(t, k)] += sign;
    for other in 0..3 {
        if other != k {
            if let Some(i) = l.oct(t, other) {
                row[i] += sign;
            }
        }
    }
}

/// Matching equations: arc matching across internal faces in the standard
/// systems, and the quadrilateral equations around internal edges in the
/// quad systems. Rows that cancel to zero are dropped.
pub fn matching_equations(tri: &Triangulation, sys: CoordSystem) -> Result<Vec<Vec<i64>>> {
    let skel = tri.skeleton();
    require_valid(&skel)?;
    Ok(matching_equations_with(tri, &skel, sys))
}

fn matching_equations_with(tri: &Triangulation, skel: &Skeleton, sys: CoordSystem) -> Vec<Vec<i64>> {
    let n = tri.size();
    let d = sys.dim(n);
    let l = Layout { sys };
    let mut rows = Vec::new();
    if sys.has_triangles() {
        for face in &skel.faces {
            if face.is_boundary() {
                continue;
            }
            let (t, f) = face.embeddings[0];
            let g = tri.gluing(t, f).expect("internal face");
            for v in (0..4).filter(|&v| v != f) {
                let mut row = vec![0i64; d];
                add_corner(&mut row, l, t, f, v, 1);
                add_corner(&mut row, l, g.tet, g.perm.apply(f), g.perm.apply(v), -1);
                if row.iter().any(|&x| x != 0) {
                    rows.push(row);
                }
            }
        }
    } else {
        for edge in &skel.edges {
            if edge.boundary {
                continue;
            }
            let mut row = vec![0i64; d];
            for emb in &edge.embeddings {
                let p = emb.perm;
                let (a, c, dd) = (p.apply(0), p.apply(2), p.apply(3));
                row[l.quad(emb.tet, quad_pairing(a, c))] += 1;
                row[l.quad(emb.tet, quad_pairing(a, dd))] -= 1;
                if let (Some(o1), Some(o2)) = (
                    l.oct(emb.tet, quad_pairing(a, dd)),
                    l.oct(emb.tet, quad_pairing(a, c)),
                ) {
                    row[o1] += 1;
                    row[o2] -= 1;
                }
            }
            if row.iter().any(|&x| x != 0) {
                rows.push(row);
            }
        }
    }
    rows
}

/// The cone of admissible vectors, with the constraint filter attached.
pub fn matching_system(tri: &Triangulation, sys: CoordSystem) -> Result<ConeProblem> {
    let rows = matching_equations(tri, sys)?;
    Ok(ConeProblem::new(sys.dim(tri.size()), rows)?.with_filter(constraint_filter(tri.size(), sys)))
}

/// Every row is satisfied exactly.
pub fn satisfies_matching(tri: &Triangulation, s: &SurfaceVector) -> Result<bool> {
    if s.tetrahedra() != tri.size() {
        return Err(Error::DimensionMismatch {
            expected: s.system.dim(tri.size()),
            found: s.coords.len(),
        });
    }
    let rows = matching_equations(tri, s.system)?;
    Ok(rows.iter().all(|r| {
        r.iter()
            .zip(&s.coords)
            .map(|(&a, x)| x * a)
            .sum::<BigInt>()
            .is_zero()
    }))
}

/// Vertex surfaces: primitive vectors on the extreme rays of the admissible
/// cone, in canonical ray order.
pub fn enumerate_vertex_surfaces(tri: &Triangulation, sys: CoordSystem) -> Result<Vec<SurfaceVector>> {
    let p = matching_system(tri, sys)?;
    let rays = cone::enumerate_extreme_rays(&p)?;
    Ok(rays
        .into_iter()
        .map(|r| SurfaceVector {
            system: sys,
            coords: r.coords,
        })
        .collect())
}

/// Arcs of non-triangle discs at corner `v` of face `f`, given the single
/// non-triangle type present in the tetrahedron.
fn piece_at_corner(piece: Piece, f: usize, v: usize) -> bool {
    match piece {
        Piece::None => false,
        Piece::Quad(k) => quad_pairing(v, f) == k,
        Piece::Oct(k) => quad_pairing(v, f) != k,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Piece {
    None,
    Quad(usize),
    Oct(usize),
}

/// The non-triangle disc type present in tetrahedron `t`, with its count.
fn piece_of(s: &SurfaceVector, t: usize) -> Result<(Piece, BigInt)> {
    let mut found = (Piece::None, BigInt::zero());
    for k in 0..3 {
        for (piece, x) in [(Piece::Quad(k), s.quad(t, k)), (Piece::Oct(k), s.octagon(t, k))] {
            if !x.is_zero() {
                if found.0 != Piece::None {
                    return Err(Error::NotAdmissible(format!(
                        "tetrahedron {t} has more than one quadrilateral or octagon type"
                    )));
                }
                found = (piece, x);
            }
        }
    }
    Ok(found)
}

/// The minimal non-negative triangle completion of a quadrilateral (or
/// quadrilateral-octagon) vector. The result has no vertex-linking summand.
pub fn reconstruct_standard(tri: &Triangulation, v: &SurfaceVector) -> Result<SurfaceVector> {
    let n = tri.size();
    if v.system.has_triangles() {
        return Err(Error::Precondition("vector already has triangle coordinates".into()));
    }
    if v.tetrahedra() != n {
        return Err(Error::DimensionMismatch {
            expected: v.system.dim(n),
            found: v.coords.len(),
        });
    }
    if !v.satisfies_constraints() {
        return Err(Error::NotAdmissible("quadrilateral constraints violated".into()));
    }
    let skel = tri.skeleton();
    require_valid(&skel)?;
    let sys = v.system.standard();
    let l = Layout { sys };
    let mut coords = vec![BigInt::zero(); sys.dim(n)];
    for t in 0..n {
        for k in 0..3 {
            coords[l.quad(t, k)] = v.quad(t, k);
            if let Some(o) = l.oct(t, k) {
                coords[o] = v.octagon(t, k);
            }
        }
    }
    let out = SurfaceVector { system: sys, coords };
    // Non-triangle arcs at a corner, from the vector's own quads and octagons.
    let arcs = |t: usize, f: usize, v: usize| -> BigInt {
        let k = quad_pairing(v, f);
        let mut x = out.quad(t, k);
        for o in (0..3).filter(|&o| o != k) {
            x += out.octagon(t, o);
        }
        x
    };
    // Triangle values relative to the first corner of each vertex class.
    let mut value: Vec<[Option<BigInt>; 4]> = vec![[None, None, None, None]; n];
    for vertex in &skel.vertices {
        let &(t0, v0) = &vertex.corners[0];
        value[t0][v0] = Some(BigInt::zero());
        let mut stack = vec![(t0, v0)];
        while let Some((t, vv)) = stack.pop() {
            let here = value[t][vv].clone().unwrap();
            for f in (0..4).filter(|&f| f != vv) {
                let Some(g) = tri.gluing(t, f) else { continue };
                let (u, w, h) = (g.tet, g.perm.apply(vv), g.perm.apply(f));
                let there = &here + arcs(t, f, vv) - arcs(u, h, w);
                match &value[u][w] {
                    None => {
                        value[u][w] = Some(there);
                        stack.push((u, w));
                    }
                    Some(x) if *x != there => {
                        return Err(Error::NotAdmissible(
                            "no consistent triangle completion".into(),
                        ))
                    }
                    Some(_) => {}
                }
            }
        }
        let min = vertex
            .corners
            .iter()
            .map(|&(t, v)| value[t][v].clone().unwrap())
            .min()
            .unwrap();
        for &(t, v) in &vertex.corners {
            let x = value[t][v].take().unwrap();
            value[t][v] = Some(x - &min);
        }
    }
    let mut out = out;
    for (t, vals) in value.into_iter().enumerate() {
        for (v, x) in vals.into_iter().enumerate() {
            out.coords[l.tri(t, v).unwrap()] = x.expect("every corner lies in a vertex class");
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceComponent {
    pub euler_char: i64,
    pub orientable: bool,
    /// No arcs on boundary faces of the triangulation.
    pub closed: bool,
    pub discs: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SurfaceAnalysis {
    pub euler_char: i64,
    pub components: Vec<SurfaceComponent>,
    pub vertex_linking: bool,
}

impl SurfaceAnalysis {
    pub fn is_connected(&self) -> bool {
        self.components.len() == 1
    }

    pub fn is_two_sphere(&self) -> bool {
        self.is_connected() && self.euler_char == 2 && self.components[0].closed
    }

    pub fn is_projective_plane(&self) -> bool {
        self.is_connected()
            && self.euler_char == 1
            && self.components[0].closed
            && !self.components[0].orientable
    }

    pub fn is_orientable(&self) -> bool {
        self.components.iter().all(|c| c.orientable)
    }
}

/// Refuses to expand surfaces with more discs than this.
pub const MAX_DISCS: usize = 20_000_000;

fn to_count(x: &BigInt) -> Result<usize> {
    x.to_usize()
        .filter(|&c| c <= MAX_DISCS)
        .ok_or(Error::CoordinateOverflow)
}

/// Assigns each disc an index: per tetrahedron the four triangle types in
/// order, then the copies of the non-triangle piece.
struct DiscIndex {
    base: Vec<usize>,
    tri_counts: Vec<[usize; 4]>,
    piece: Vec<(Piece, usize)>,
    total: usize,
}

impl DiscIndex {
    fn new(s: &SurfaceVector) -> Result<Self> {
        let n = s.tetrahedra();
        let mut base = Vec::with_capacity(n);
        let mut tri_counts = Vec::with_capacity(n);
        let mut piece = Vec::with_capacity(n);
        let mut total = 0usize;
        for t in 0..n {
            base.push(total);
            let mut tc = [0usize; 4];
            for (v, c) in tc.iter_mut().enumerate() {
                *c = to_count(&s.triangle(t, v))?;
            }
            let (p, c) = piece_of(s, t)?;
            let c = to_count(&c)?;
            total += tc.iter().sum::<usize>() + c;
            if total > MAX_DISCS {
                return Err(Error::CoordinateOverflow);
            }
            tri_counts.push(tc);
            piece.push((p, c));
        }
        Ok(DiscIndex {
            base,
            tri_counts,
            piece,
            total,
        })
    }

    /// Number of arcs at corner `v` of face `f` of tetrahedron `t`.
    fn arcs(&self, t: usize, f: usize, v: usize) -> usize {
        let (p, c) = self.piece[t];
        self.tri_counts[t][v] + if piece_at_corner(p, f, v) { c } else { 0 }
    }

    /// The disc owning arc `i` (counted outward from vertex `v`) at corner
    /// `v` of any face, with the sign of its normal relative to `v`.
    fn disc_at(&self, t: usize, v: usize, i: usize) -> (usize, bool) {
        let tc = self.tri_counts[t];
        if i < tc[v] {
            let offset: usize = tc[..v].iter().sum();
            return (self.base[t] + offset + i, true);
        }
        let j = i - tc[v];
        let (p, c) = self.piece[t];
        let k = match p {
            Piece::Quad(k) | Piece::Oct(k) => k,
            Piece::None => unreachable!("arc index beyond triangles without a piece"),
        };
        let side_a = on_side_a(k, v);
        let copy = if side_a { j } else { c - 1 - j };
        (self.base[t] + tc.iter().sum::<usize>() + copy, side_a)
    }
}

/// (face, corner) arcs and (a, b, multiplicity) edge points of one disc.
type DiscShape = (Vec<(usize, usize)>, Vec<(usize, usize, usize)>);

/// The disc types of a tetrahedron with their arc and point incidences, for
/// the fractional Euler characteristic.
fn disc_shape(piece: Piece) -> DiscShape {
    // Returns (face, corner) arcs and (a, b, multiplicity) edge points.
    let mut arcs = Vec::new();
    let mut points = Vec::new();
    match piece {
        Piece::Quad(k) => {
            for f in 0..4 {
                let v = QUAD_PARTNER[k][f];
                arcs.push((f, v));
            }
            for a in 0..4 {
                for b in a + 1..4 {
                    if quad_pairing(a, b) != k {
                        points.push((a, b, 1));
                    }
                }
            }
        }
        Piece::Oct(k) => {
            for f in 0..4 {
                for v in (0..4).filter(|&v| v != f && quad_pairing(v, f) != k) {
                    arcs.push((f, v));
                }
            }
            for a in 0..4 {
                for b in a + 1..4 {
                    points.push((a, b, if quad_pairing(a, b) == k { 2 } else { 1 }));
                }
            }
        }
        Piece::None => {}
    }
    (arcs, points)
}

fn triangle_shape(v: usize) -> DiscShape {
    let arcs = (0..4).filter(|&f| f != v).map(|f| (f, v)).collect();
    let points = (0..4).filter(|&x| x != v).map(|x| (v.min(x), v.max(x), 1)).collect();
    (arcs, points)
}

/// Contribution of one disc to the Euler characteristic: itself, minus its
/// share of each arc, plus its share of each point.
fn disc_euler(
    tri: &Triangulation,
    skel: &Skeleton,
    t: usize,
    shape: &DiscShape,
) -> BigRational {
    let mut x = BigRational::one();
    for &(f, _) in &shape.0 {
        let m = if tri.gluing(t, f).is_some() { 2 } else { 1 };
        x -= BigRational::new(BigInt::one(), BigInt::from(m));
    }
    for &(a, b, mult) in &shape.1 {
        let e = skel.tet_edges[t][crate::perm::EDGE_NUMBER[a][b]];
        let deg = skel.edges[e].degree();
        x += BigRational::new(BigInt::from(mult), BigInt::from(deg));
    }
    x
}

/// Euler characteristic as a linear function of the coordinates.
pub fn euler_char_linear(tri: &Triangulation, s: &SurfaceVector) -> Result<BigInt> {
    if !s.system.has_triangles() {
        return Err(Error::Precondition("needs triangle coordinates".into()));
    }
    let skel = tri.skeleton();
    require_valid(&skel)?;
    let mut total = BigRational::zero();
    for t in 0..s.tetrahedra() {
        for v in 0..4 {
            total += disc_euler(tri, &skel, t, &triangle_shape(v))
                * BigRational::from_integer(s.triangle(t, v));
        }
        for k in 0..3 {
            total += disc_euler(tri, &skel, t, &disc_shape(Piece::Quad(k)))
                * BigRational::from_integer(s.quad(t, k));
            if s.system.has_octagons() {
                total += disc_euler(tri, &skel, t, &disc_shape(Piece::Oct(k)))
                    * BigRational::from_integer(s.octagon(t, k));
            }
        }
    }
    if !total.is_integer() {
        return Err(Error::NotAdmissible("fractional Euler characteristic".into()));
    }
    Ok(total.to_integer())
}

/// Builds the surface as discs glued along arcs and reads off its
/// components, their Euler characteristics and orientability.
pub fn analyze(tri: &Triangulation, s: &SurfaceVector) -> Result<SurfaceAnalysis> {
    if !s.system.has_triangles() {
        return Err(Error::Precondition("analysis needs triangle coordinates".into()));
    }
    if !s.satisfies_constraints() {
        return Err(Error::NotAdmissible("quadrilateral constraints violated".into()));
    }
    if !satisfies_matching(tri, s)? {
        return Err(Error::NotAdmissible("matching equations violated".into()));
    }
    let skel = tri.skeleton();
    let n = tri.size();
    let idx = DiscIndex::new(s)?;
    let mut uf = ParityUnionFind::new(idx.total);
    let mut twisted = Vec::new();
    let mut boundary_disc = vec![false; idx.total];
    for t in 0..n {
        for f in 0..4 {
            let g = tri.gluing(t, f);
            for v in (0..4).filter(|&v| v != f) {
                let count = idx.arcs(t, f, v);
                let Some(g) = g else {
                    for i in 0..count {
                        boundary_disc[idx.disc_at(t, v, i).0] = true;
                    }
                    continue;
                };
                let (u, h, w) = (g.tet, g.perm.apply(f), g.perm.apply(v));
                // Each gluing is visited from both sides; once is enough.
                if (u, h) < (t, f) {
                    continue;
                }
                debug_assert_eq!(count, idx.arcs(u, h, w));
                let perm_odd = !g.perm.is_even();
                for i in 0..count {
                    let (d1, s1) = idx.disc_at(t, v, i);
                    let (d2, s2) = idx.disc_at(u, w, i);
                    let differ = (s1 == s2) != perm_odd;
                    if !uf.relate(d1, d2, differ) {
                        twisted.push(d1);
                    }
                }
            }
        }
    }
    let twisted_roots: std::collections::HashSet<usize> =
        twisted.into_iter().map(|d| uf.find(d).0).collect();
    // Components and the discs' fractional Euler characteristics.
    let mut root_index = std::collections::HashMap::new();
    let mut comps: Vec<(BigRational, bool, usize)> = Vec::new();
    let mut shapes: Vec<[_; 4]> = Vec::new();
    let mut piece_shapes = Vec::new();
    for t in 0..n {
        shapes.push([0, 1, 2, 3].map(|v| disc_euler(tri, &skel, t, &triangle_shape(v))));
        piece_shapes.push(disc_euler(tri, &skel, t, &disc_shape(idx.piece[t].0)));
    }
    for t in 0..n {
        let mut d = idx.base[t];
        for v in 0..4 {
            for _ in 0..idx.tri_counts[t][v] {
                add_disc(&mut uf, &mut root_index, &mut comps, d, &shapes[t][v], boundary_disc[d]);
                d += 1;
            }
        }
        for _ in 0..idx.piece[t].1 {
            add_disc(&mut uf, &mut root_index, &mut comps, d, &piece_shapes[t], boundary_disc[d]);
            d += 1;
        }
    }
    let mut components = Vec::new();
    let mut roots: Vec<(usize, usize)> = root_index.into_iter().collect();
    roots.sort_by_key(|&(_, i)| i);
    for (root, i) in roots {
        let (chi, closed, discs) = &comps[i];
        if !chi.is_integer() {
            return Err(Error::Internal("fractional component Euler characteristic".into()));
        }
        components.push(SurfaceComponent {
            euler_char: chi.to_integer().to_i64().ok_or(Error::CoordinateOverflow)?,
            orientable: !twisted_roots.contains(&root),
            closed: *closed,
            discs: *discs,
        });
    }
    let euler_char = components.iter().map(|c| c.euler_char).sum();
    Ok(SurfaceAnalysis {
        euler_char,
        components,
        vertex_linking: s.is_vertex_linking(),
    })
}

fn add_disc(
    uf: &mut ParityUnionFind,
    root_index: &mut std::collections::HashMap<usize, usize>,
    comps: &mut Vec<(BigRational, bool, usize)>,
    d: usize,
    chi: &BigRational,
    on_boundary: bool,
) {
    let root = uf.find(d).0;
    let i = *root_index.entry(root).or_insert_with(|| {
        comps.push((BigRational::zero(), true, 0));
        comps.len() - 1
    });
    comps[i].0 += chi;
    comps[i].1 &= !on_boundary;
    comps[i].2 += 1;
}

/// Euler characteristic by counting cells: points on edges, arcs on faces,
/// and discs.
pub fn euler_char_cells(tri: &Triangulation, s: &SurfaceVector) -> Result<i64> {
    if !s.system.has_triangles() {
        return Err(Error::Precondition("needs triangle coordinates".into()));
    }
    let skel = tri.skeleton();
    require_valid(&skel)?;
    let idx = DiscIndex::new(s)?;
    let mut v = 0i64;
    for edge in &skel.edges {
        let emb = edge.embeddings[0];
        let (a, b) = (emb.perm.apply(0), emb.perm.apply(1));
        let t = emb.tet;
        let mut w = idx.tri_counts[t][a] + idx.tri_counts[t][b];
        match idx.piece[t] {
            (Piece::Quad(k), c) if quad_pairing(a, b) != k => w += c,
            (Piece::Oct(k), c) => w += if quad_pairing(a, b) == k { 2 * c } else { c },
            _ => {}
        }
        v += w as i64;
    }
    let mut e = 0i64;
    for face in &skel.faces {
        let (t, f) = face.embeddings[0];
        for c in (0..4).filter(|&c| c != f) {
            e += idx.arcs(t, f, c) as i64;
        }
    }
    Ok(v - e + idx.total as i64)
}

fn require_closed(skel: &Skeleton) -> Result<()> {
    let c = skel.classify();
    if !c.valid || !c.closed {
        return Err(Error::Precondition("needs a closed valid triangulation".into()));
    }
    Ok(())
}

/// A normal sphere that is not vertex-linking, searched for among the
/// quadrilateral vertex surfaces: such a surface with positive Euler
/// characteristic is either a sphere or a projective plane, and in the
/// second case its double is a sphere. Returns standard coordinates.
pub fn find_nontrivial_normal_sphere(tri: &Triangulation) -> Result<Option<SurfaceVector>> {
    require_closed(&tri.skeleton())?;
    for q in enumerate_vertex_surfaces(tri, CoordSystem::Quad)? {
        if let Some(s) = sphere_from_quad(tri, &q)? {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

fn sphere_from_quad(tri: &Triangulation, q: &SurfaceVector) -> Result<Option<SurfaceVector>> {
    let s = reconstruct_standard(tri, q)?;
    if s.is_vertex_linking() || s.is_zero() {
        return Ok(None);
    }
    let a = analyze(tri, &s)?;
    if a.is_two_sphere() {
        return Ok(Some(s));
    }
    if a.is_projective_plane() {
        let d = reconstruct_standard(tri, &q.scaled(2))?;
        if analyze(tri, &d)?.is_two_sphere() {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// Every quadrilateral vertex surface with positive Euler characteristic,
/// in standard coordinates.
pub fn positive_quad_vertex_surfaces(tri: &Triangulation) -> Result<Vec<(SurfaceVector, SurfaceAnalysis)>> {
    let mut out = Vec::new();
    for q in enumerate_vertex_surfaces(tri, CoordSystem::Quad)? {
        let s = reconstruct_standard(tri, &q)?;
        let a = analyze(tri, &s)?;
        if a.euler_char > 0 {
            out.push((s, a));
        }
    }
    Ok(out)
}

/// An almost normal sphere with exactly one octagon among the
/// quadrilateral-octagon vertex surfaces. Returns standard almost normal
/// coordinates.
pub fn find_almost_normal_sphere(tri: &Triangulation) -> Result<Option<SurfaceVector>> {
    let skel = tri.skeleton();
    require_closed(&skel)?;
    if skel.vertices.len() != 1 {
        return Err(Error::Precondition("needs a one-vertex triangulation".into()));
    }
    for q in enumerate_vertex_surfaces(tri, CoordSystem::QuadOct)? {
        if !q.octagon_total().is_one() {
            continue;
        }
        let s = reconstruct_standard(tri, &q)?;
        if analyze(tri, &s)?.is_two_sphere() {
            return Ok(Some(s));
        }
    }
    Ok(None)
}

/// Crushes a normal surface: every tetrahedron holding a quadrilateral is
/// deleted, and each face that was glued into the deleted region is
/// reglued to wherever its image emerges after pushing through the
/// quadrilateral tetrahedra. The result may be disconnected or empty.
pub fn crush(tri: &Triangulation, s: &SurfaceVector) -> Result<Triangulation> {
    let n = tri.size();
    if s.tetrahedra() != n {
        return Err(Error::DimensionMismatch {
            expected: s.system.dim(n),
            found: s.coords.len(),
        });
    }
    if s.is_vertex_linking() || s.is_zero() {
        return Err(Error::Precondition("nothing to crush: surface has no quadrilaterals".into()));
    }
    if !s.octagon_total().is_zero() {
        return Err(Error::Precondition("cannot crush a surface with octagons".into()));
    }
    if !s.satisfies_constraints() {
        return Err(Error::NotAdmissible("quadrilateral constraints violated".into()));
    }
    let quad: Vec<Option<usize>> = (0..n)
        .map(|t| (0..3).find(|&k| !s.quad(t, k).is_zero()))
        .collect();
    let kept: Vec<usize> = (0..n).filter(|&t| quad[t].is_none()).collect();
    let mut new_index = vec![usize::MAX; n];
    for (i, &t) in kept.iter().enumerate() {
        new_index[t] = i;
    }
    let mut out = Triangulation::with_tetrahedra(kept.len());
    for &t in &kept {
        for f in 0..4 {
            let Some(g) = tri.gluing(t, f) else { continue };
            // Push through quadrilateral tetrahedra until we emerge.
            let mut cur = g;
            let mut steps = 0;
            let target = loop {
                let Some(k) = quad[cur.tet] else { break Some(cur) };
                let face = cur.perm.apply(f);
                let partner = QUAD_PARTNER[k][face];
                let through = Perm4::transposition(face, partner) * cur.perm;
                match tri.gluing(cur.tet, partner) {
                    None => break None,
                    Some(h) => {
                        cur = crate::triangulation::Gluing::new(h.tet, h.perm * through);
                    }
                }
                steps += 1;
                if steps > 4 * n {
                    return Err(Error::Internal("crushing walk did not terminate".into()));
                }
            };
            let Some(target) = target else { continue };
            let (a, fa) = (new_index[t], f);
            let (b, fb) = (new_index[target.tet], target.perm.apply(f));
            if (a, fa) == (b, fb) {
                return Err(Error::Internal("crushing would fold a face onto itself".into()));
            }
            match out.gluing(a, fa) {
                Some(existing) => {
                    if existing.tet != b || existing.perm != target.perm {
                        return Err(Error::Internal("inconsistent regluing after crushing".into()));
                    }
                }
                None => out.join(a, fa, b, target.perm)?,
            }
        }
    }
    Ok(out)
}
