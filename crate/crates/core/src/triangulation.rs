//! Generalised triangulations: tetrahedra with affine face gluings.
//!
//! Face `f` of a tetrahedron is the face opposite vertex `f`. A gluing of
//! face `f` of tetrahedron `t` is a target tetrahedron `u` plus a
//! permutation `p` sending each vertex of `t` to the vertex of `u` it is
//! identified with; the face `f` lands on face `p[f]` of `u`.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::perm::Perm4;
use crate::skeleton::Skeleton;
use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Gluing {
    pub tet: usize,
    pub perm: Perm4,
}

impl Gluing {
    pub fn new(tet: usize, perm: Perm4) -> Self {
        Gluing { tet, perm }
    }
}

pub type GluingRow = [Option<Gluing>; 4];

/// Column order of the text gluing table: faces 012, 013, 023, 123.
pub const TABLE_FACE_ORDER: [usize; 4] = [3, 2, 1, 0];

#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Triangulation {
    tets: Vec<GluingRow>,
}

impl Triangulation {
    pub fn new() -> Self {
        Triangulation { tets: Vec::new() }
    }

    /// `n` tetrahedra with every face on the boundary.
    pub fn with_tetrahedra(n: usize) -> Self {
        Triangulation {
            tets: vec![[None; 4]; n],
        }
    }

    /// Builds a triangulation from a complete table of gluings, checking
    /// that every gluing is matched by its inverse on the partner face.
    pub fn from_gluings(table: Vec<GluingRow>) -> Result<Self> {
        let n = table.len();
        for (t, row) in table.iter().enumerate() {
            for (f, g) in row.iter().enumerate() {
                let Some(g) = g else { continue };
                if g.tet >= n {
                    return Err(Error::TetOutOfRange(g.tet));
                }
                let back_face = g.perm.apply(f);
                if g.tet == t && back_face == f {
                    return Err(Error::SelfGluedFace { tet: t, face: f });
                }
                match table[g.tet][back_face] {
                    Some(back) if back.tet == t && back.perm == g.perm.inverse() => {}
                    _ => return Err(Error::NonInvolutive { tet: t, face: f }),
                }
            }
        }
        Ok(Triangulation { tets: table })
    }

    pub fn size(&self) -> usize {
        self.tets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tets.is_empty()
    }

    pub fn rows(&self) -> &[GluingRow] {
        &self.tets
    }

    #[inline]
    pub fn gluing(&self, tet: usize, face: usize) -> Option<Gluing> {
        self.tets[tet][face]
    }

    pub fn add_tetrahedron(&mut self) -> usize {
        self.tets.push([None; 4]);
        self.tets.len() - 1
    }

    /// Glues face `face` of `tet` to face `perm[face]` of `target`.
    pub fn join(&mut self, tet: usize, face: usize, target: usize, perm: Perm4) -> Result<()> {
        let n = self.tets.len();
        if tet >= n {
            return Err(Error::TetOutOfRange(tet));
        }
        if target >= n {
            return Err(Error::TetOutOfRange(target));
        }
        let back = perm.apply(face);
        if tet == target && back == face {
            return Err(Error::SelfGluedFace { tet, face });
        }
        if self.tets[tet][face].is_some() {
            return Err(Error::AlreadyGlued { tet, face });
        }
        if self.tets[target][back].is_some() {
            return Err(Error::AlreadyGlued {
                tet: target,
                face: back,
            });
        }
        self.tets[tet][face] = Some(Gluing::new(target, perm));
        self.tets[target][back] = Some(Gluing::new(tet, perm.inverse()));
        Ok(())
    }

    pub fn unjoin(&mut self, tet: usize, face: usize) -> Option<Gluing> {
        let g = self.tets[tet][face].take()?;
        self.tets[g.tet][g.perm.apply(face)] = None;
        Some(g)
    }

    pub fn has_boundary_faces(&self) -> bool {
        self.tets.iter().any(|row| row.iter().any(Option::is_none))
    }

    pub fn boundary_face_count(&self) -> usize {
        self.tets
            .iter()
            .map(|row| row.iter().filter(|g| g.is_none()).count())
            .sum()
    }

    /// Deletes the given tetrahedra. Faces glued to them become boundary and
    /// the survivors are reindexed downwards, preserving their order.
    pub fn remove_tetrahedra(&mut self, doomed: &[usize]) {
        let n = self.tets.len();
        let mut gone = vec![false; n];
        for &t in doomed {
            gone[t] = true;
        }
        let mut new_index = vec![usize::MAX; n];
        let mut next = 0;
        for t in 0..n {
            if !gone[t] {
                new_index[t] = next;
                next += 1;
            }
        }
        let mut out = Vec::with_capacity(next);
        for t in 0..n {
            if gone[t] {
                continue;
            }
            let mut row = self.tets[t];
            for g in row.iter_mut() {
                if let Some(gl) = g {
                    if gone[gl.tet] {
                        *g = None;
                    } else {
                        gl.tet = new_index[gl.tet];
                    }
                }
            }
            out.push(row);
        }
        self.tets = out;
    }

    /// Appends a copy of `other`, returning the index of its first
    /// tetrahedron.
    pub fn insert_triangulation(&mut self, other: &Triangulation) -> usize {
        let offset = self.tets.len();
        for row in &other.tets {
            let mut r = *row;
            for g in r.iter_mut().flatten() {
                g.tet += offset;
            }
            self.tets.push(r);
        }
        offset
    }

    /// Tetrahedron indices of each connected component, in order of their
    /// smallest tetrahedron.
    pub fn component_tets(&self) -> Vec<Vec<usize>> {
        let n = self.tets.len();
        let mut uf = UnionFind::new(n);
        for (t, row) in self.tets.iter().enumerate() {
            for g in row.iter().flatten() {
                uf.union(t, g.tet);
            }
        }
        let mut root_to_comp = vec![usize::MAX; n];
        let mut comps: Vec<Vec<usize>> = Vec::new();
        for t in 0..n {
            let r = uf.find(t);
            if root_to_comp[r] == usize::MAX {
                root_to_comp[r] = comps.len();
                comps.push(Vec::new());
            }
            comps[root_to_comp[r]].push(t);
        }
        comps
    }

    pub fn component_count(&self) -> usize {
        self.component_tets().len()
    }

    /// Splits into connected components, each reindexed from zero.
    pub fn split_components(&self) -> Vec<Triangulation> {
        self.component_tets()
            .into_iter()
            .map(|tets| self.sub_triangulation(&tets))
            .collect()
    }

    /// The triangulation formed by the listed tetrahedra (which must be a
    /// union of components, or gluings leaving the set become boundary).
    pub fn sub_triangulation(&self, tets: &[usize]) -> Triangulation {
        let mut index = vec![usize::MAX; self.tets.len()];
        for (i, &t) in tets.iter().enumerate() {
            index[t] = i;
        }
        let rows = tets
            .iter()
            .map(|&t| {
                let mut row = self.tets[t];
                for g in row.iter_mut() {
                    if let Some(gl) = g {
                        if index[gl.tet] == usize::MAX {
                            *g = None;
                        } else {
                            gl.tet = index[gl.tet];
                        }
                    }
                }
                row
            })
            .collect();
        Triangulation { tets: rows }
    }

    /// Relabels tetrahedron `t` as `tet_map[t]`, with its vertex `i` becoming
    /// vertex `vertex_maps[t][i]`. The result is combinatorially isomorphic.
    pub fn relabel(&self, tet_map: &[usize], vertex_maps: &[Perm4]) -> Triangulation {
        let n = self.tets.len();
        let mut rows = vec![[None; 4]; n];
        for t in 0..n {
            let nt = tet_map[t];
            let vm = vertex_maps[t];
            for f in 0..4 {
                if let Some(g) = self.tets[t][f] {
                    let perm = vertex_maps[g.tet] * g.perm * vm.inverse();
                    rows[nt][vm.apply(f)] = Some(Gluing::new(tet_map[g.tet], perm));
                }
            }
        }
        Triangulation { tets: rows }
    }

    pub fn skeleton(&self) -> Skeleton {
        Skeleton::new(self)
    }

    /// Cones every boundary component to a single new vertex by attaching one
    /// tetrahedron to each boundary face.
    pub fn cone_boundary(&self) -> Result<Triangulation> {
        if self.is_empty() {
            return Ok(Triangulation::new());
        }
        if !self.has_boundary_faces() {
            return Err(Error::Precondition(
                "triangulation has no boundary to cone".into(),
            ));
        }
        let mut out = self.clone();
        // Vertex i < 3 of a cone tetrahedron sits on the i-th vertex of its
        // boundary face (in increasing order); vertex 3 is the cone point.
        let mut cone_of = vec![[usize::MAX; 4]; self.size()];
        let mut face_verts = vec![[[0usize; 3]; 4]; self.size()];
        for t in 0..self.size() {
            for f in 0..4 {
                if self.tets[t][f].is_some() {
                    continue;
                }
                let verts: Vec<usize> = (0..4).filter(|&v| v != f).collect();
                let c = out.add_tetrahedron();
                cone_of[t][f] = c;
                face_verts[t][f] = [verts[0], verts[1], verts[2]];
                let perm = Perm4::new([verts[0] as u8, verts[1] as u8, verts[2] as u8, f as u8])
                    .expect("distinct vertices");
                out.join(c, 3, t, perm)?;
            }
        }
        for t in 0..self.size() {
            for f in 0..4 {
                if self.tets[t][f].is_some() {
                    continue;
                }
                let c = cone_of[t][f];
                let fv = face_verts[t][f];
                for (i, &z) in fv.iter().enumerate() {
                    if out.tets[c][i].is_some() {
                        continue;
                    }
                    // The side of the cone over edge {x, y} of this face,
                    // where z is the remaining face vertex.
                    let (x, y) = {
                        let others: Vec<usize> =
                            fv.iter().copied().filter(|&v| v != z).collect();
                        (others[0], others[1])
                    };
                    let (et, ex, ey, ea) = self.walk_to_boundary(t, x, y, f, z);
                    let c2 = cone_of[et][ea_face(ex, ey, ea)];
                    let fv2 = face_verts[et][ea_face(ex, ey, ea)];
                    let pos = |v: usize, fv: &[usize; 3]| fv.iter().position(|&w| w == v).unwrap();
                    let mut img = [0u8; 4];
                    img[pos(x, &fv)] = pos(ex, &fv2) as u8;
                    img[pos(y, &fv)] = pos(ey, &fv2) as u8;
                    img[i] = pos(ea, &fv2) as u8;
                    img[3] = 3;
                    let perm = Perm4::new(img).ok_or_else(|| Error::Internal("cone perm".into()))?;
                    if c2 == c && perm.apply(i) == i {
                        return Err(Error::Precondition(
                            "boundary face is adjacent to itself along an edge".into(),
                        ));
                    }
                    out.join(c, i, c2, perm)?;
                }
            }
        }
        Ok(out)
    }

    /// Walks around the boundary edge `xy` of tetrahedron `t`, starting at
    /// boundary face `f` whose third vertex is `z`, until reaching the other
    /// boundary face. Returns the final tetrahedron, the images of `x` and
    /// `y`, and the third vertex of the final boundary face.
    fn walk_to_boundary(
        &self,
        t: usize,
        x: usize,
        y: usize,
        f: usize,
        z: usize,
    ) -> (usize, usize, usize, usize) {
        // State: in tetrahedron `tet`, edge `ex ey`, we entered through the
        // face opposite `a` and will leave through the face opposite `b`.
        let (mut tet, mut ex, mut ey, mut a, mut b) = (t, x, y, f, z);
        loop {
            match self.tets[tet][b] {
                None => return (tet, ex, ey, a),
                Some(g) => {
                    let p = g.perm;
                    let na = p.apply(b);
                    let nb = p.apply(a);
                    tet = g.tet;
                    ex = p.apply(ex);
                    ey = p.apply(ey);
                    a = na;
                    b = nb;
                }
            }
        }
    }

    /// Barycentric subdivision: each tetrahedron becomes 24, one per flag
    /// (vertex, edge, face, tetrahedron).
    pub fn barycentric_subdivision(&self) -> Triangulation {
        let n = self.size();
        let mut rows = vec![[None; 4]; 24 * n];
        let swaps = [
            Perm4::transposition(0, 1),
            Perm4::transposition(1, 2),
            Perm4::transposition(2, 3),
        ];
        for t in 0..n {
            for (pi, p) in crate::perm::ALL_PERMS.iter().enumerate() {
                let me = 24 * t + pi;
                for (i, s) in swaps.iter().enumerate() {
                    let q = *p * *s;
                    rows[me][i] = Some(Gluing::new(24 * t + q.index(), Perm4::IDENTITY));
                }
                if let Some(g) = self.tets[t][p.apply(3)] {
                    let q = g.perm * *p;
                    rows[me][3] = Some(Gluing::new(24 * g.tet + q.index(), Perm4::IDENTITY));
                }
            }
        }
        Triangulation { tets: rows }
    }

    /// Connected sum of two closed connected triangulations. Both are
    /// subdivided barycentrically so that tetrahedron 0 is an embedded ball,
    /// which is then cut out of each and the two boundary spheres glued.
    /// The result is large; simplify it before doing anything expensive.
    pub fn connected_sum(&self, other: &Triangulation) -> Result<Triangulation> {
        for t in [self, other] {
            let c = t.skeleton().classify();
            if t.is_empty() || !c.valid || !c.closed || !c.connected {
                return Err(Error::Precondition(
                    "connected sum needs closed connected triangulations".into(),
                ));
            }
        }
        let a = self.barycentric_subdivision();
        let b = other.barycentric_subdivision();
        let glue_a: Vec<Gluing> = (0..4).map(|f| a.tets[0][f].expect("closed")).collect();
        let glue_b: Vec<Gluing> = (0..4).map(|f| b.tets[0][f].expect("closed")).collect();
        let both_orientable =
            self.skeleton().classify().orientable && other.skeleton().classify().orientable;
        let mut cut_a = a.clone();
        cut_a.remove_tetrahedra(&[0]);
        let mut cut_b = b.clone();
        cut_b.remove_tetrahedra(&[0]);
        // Tetrahedron 0 of one side is identified with tetrahedron 0 of the
        // other through `sigma`; an odd choice may be needed for the result
        // to be orientable.
        for sigma in [Perm4::IDENTITY, Perm4::transposition(0, 1)] {
            let mut out = cut_a.clone();
            let offset = out.insert_triangulation(&cut_b);
            for (f, pa) in glue_a.iter().enumerate() {
                let pb = glue_b[sigma.apply(f)];
                let perm = pb.perm * sigma * pa.perm.inverse();
                out.join(pa.tet - 1, pa.perm.apply(f), offset + pb.tet - 1, perm)?;
            }
            if !both_orientable || out.skeleton().classify().orientable {
                return Ok(out);
            }
        }
        Err(Error::Internal("no orientable connected sum gluing".into()))
    }

    /// Parses the text gluing format (`tets N` header, one row per
    /// tetrahedron with fields for faces 012, 013, 023, 123).
    pub fn from_gluing_text(text: &str) -> Result<Triangulation> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let (hl, header) = lines.next().ok_or(Error::Parse {
            line: 0,
            msg: "missing `tets N` header".into(),
        })?;
        let n: usize = header
            .strip_prefix("tets")
            .map(str::trim)
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse {
                line: hl,
                msg: format!("expected `tets N`, found {header:?}"),
            })?;
        let mut rows = Vec::with_capacity(n);
        for (ln, line) in lines {
            if rows.len() == n {
                return Err(Error::Parse {
                    line: ln,
                    msg: "more rows than declared".into(),
                });
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 4 {
                return Err(Error::Parse {
                    line: ln,
                    msg: format!("expected 4 fields, found {}", fields.len()),
                });
            }
            let mut row = [None; 4];
            for (col, field) in fields.iter().enumerate() {
                let face = TABLE_FACE_ORDER[col];
                row[face] = parse_cell(field, face).map_err(|msg| Error::Parse { line: ln, msg })?;
            }
            rows.push(row);
        }
        if rows.len() != n {
            return Err(Error::Parse {
                line: 0,
                msg: format!("declared {n} tetrahedra but found {} rows", rows.len()),
            });
        }
        Triangulation::from_gluings(rows)
    }

    pub fn to_gluing_text(&self) -> String {
        let mut out = format!("tets {}\n", self.size());
        for row in &self.tets {
            let cells: Vec<String> = TABLE_FACE_ORDER
                .iter()
                .map(|&f| match row[f] {
                    None => "-".to_string(),
                    Some(g) => {
                        let mut s = format!("{}(", g.tet);
                        for v in (0..4).filter(|&v| v != f) {
                            let _ = write!(s, "{}", g.perm.apply(v));
                        }
                        s.push(')');
                        s
                    }
                })
                .collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
        out
    }
}

fn ea_face(ex: usize, ey: usize, ea: usize) -> usize {
    6 - ex - ey - ea
}

fn parse_cell(field: &str, face: usize) -> std::result::Result<Option<Gluing>, String> {
    if field == "-" {
        return Ok(None);
    }
    let open = field.find('(').ok_or_else(|| format!("bad cell {field:?}"))?;
    if !field.ends_with(')') {
        return Err(format!("bad cell {field:?}"));
    }
    let tet: usize = field[..open]
        .parse()
        .map_err(|_| format!("bad tetrahedron index in {field:?}"))?;
    let digits: Vec<u8> = field[open + 1..field.len() - 1]
        .chars()
        .map(|c| c.to_digit(10).filter(|&d| d < 4).map(|d| d as u8))
        .collect::<Option<Vec<u8>>>()
        .ok_or_else(|| format!("bad vertex images in {field:?}"))?;
    if digits.len() != 3 {
        return Err(format!("expected three vertex images in {field:?}"));
    }
    let mut img = [0u8; 4];
    for (k, v) in (0..4).filter(|&v| v != face).enumerate() {
        img[v] = digits[k];
    }
    let used: u8 = digits.iter().map(|d| 1u8 << d).fold(0, |a, b| a | b);
    if used.count_ones() != 3 {
        return Err(format!("repeated vertex image in {field:?}"));
    }
    img[face] = (0..4u8).find(|d| used & (1 << d) == 0).unwrap();
    Perm4::new(img)
        .map(|p| Some(Gluing::new(tet, p)))
        .ok_or_else(|| format!("invalid permutation in {field:?}"))
}
