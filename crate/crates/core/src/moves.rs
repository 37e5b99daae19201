//! Local moves: Pachner-type flips, low-degree edge and vertex moves,
//! boundary moves and edge collapses, each with its safety test.
//!
//! Every move except the book moves is carried out by the same engine: a set
//! of old tetrahedra is removed, some new tetrahedra are added, and every
//! face of a removed tetrahedron is told what becomes of it (it is inside
//! the region, it reappears as a face of a new tetrahedron, it is flattened
//! onto another removed face, or it is exposed as boundary). The engine then
//! follows each chain of such identifications from end to end and glues the
//! two ends together.

use std::collections::HashSet;
use std::fmt;

use crate::error::{Error, Result};
use crate::perm::{Perm4, EDGE_NUMBER};
use crate::skeleton::{LinkType, Skeleton};
use crate::triangulation::Triangulation;
use crate::union_find::UnionFind;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MoveKind {
    Pachner23,
    Pachner32,
    FourFour,
    TwoZeroVertex,
    TwoZeroEdge,
    TwoOneEdge,
    BookOpen,
    BookClose,
    Shell,
    CollapseEdge,
}

impl MoveKind {
    pub const ALL: [MoveKind; 10] = [
        MoveKind::Pachner23,
        MoveKind::Pachner32,
        MoveKind::FourFour,
        MoveKind::TwoZeroVertex,
        MoveKind::TwoZeroEdge,
        MoveKind::TwoOneEdge,
        MoveKind::BookOpen,
        MoveKind::BookClose,
        MoveKind::Shell,
        MoveKind::CollapseEdge,
    ];

    /// Change in the number of tetrahedra, where it does not depend on the
    /// location (edge collapses remove one tetrahedron per unit of degree).
    pub fn tet_delta(&self) -> Option<isize> {
        match self {
            MoveKind::Pachner23 => Some(1),
            MoveKind::Pachner32 => Some(-1),
            MoveKind::FourFour => Some(0),
            MoveKind::TwoZeroVertex | MoveKind::TwoZeroEdge => Some(-2),
            MoveKind::TwoOneEdge => Some(-1),
            MoveKind::BookOpen | MoveKind::BookClose => Some(0),
            MoveKind::Shell => Some(-1),
            MoveKind::CollapseEdge => None,
        }
    }
}

/// A move together with its location. Locations index into the skeleton of
/// the triangulation the move is applied to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Pachner23 { face: usize },
    Pachner32 { edge: usize },
    FourFour { edge: usize, axis: usize },
    TwoZeroVertex { vertex: usize },
    TwoZeroEdge { edge: usize },
    TwoOneEdge { edge: usize, end: usize },
    BookOpen { face: usize },
    BookClose { edge: usize },
    Shell { tet: usize },
    CollapseEdge { edge: usize },
}

impl Move {
    pub fn kind(&self) -> MoveKind {
        match self {
            Move::Pachner23 { .. } => MoveKind::Pachner23,
            Move::Pachner32 { .. } => MoveKind::Pachner32,
            Move::FourFour { .. } => MoveKind::FourFour,
            Move::TwoZeroVertex { .. } => MoveKind::TwoZeroVertex,
            Move::TwoZeroEdge { .. } => MoveKind::TwoZeroEdge,
            Move::TwoOneEdge { .. } => MoveKind::TwoOneEdge,
            Move::BookOpen { .. } => MoveKind::BookOpen,
            Move::BookClose { .. } => MoveKind::BookClose,
            Move::Shell { .. } => MoveKind::Shell,
            Move::CollapseEdge { .. } => MoveKind::CollapseEdge,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Move::Pachner23 { face } => write!(f, "2-3 face {face}"),
            Move::Pachner32 { edge } => write!(f, "3-2 edge {edge}"),
            Move::FourFour { edge, axis } => write!(f, "4-4 edge {edge} axis {axis}"),
            Move::TwoZeroVertex { vertex } => write!(f, "2-0 vertex {vertex}"),
            Move::TwoZeroEdge { edge } => write!(f, "2-0 edge {edge}"),
            Move::TwoOneEdge { edge, end } => write!(f, "2-1 edge {edge} end {end}"),
            Move::BookOpen { face } => write!(f, "open book face {face}"),
            Move::BookClose { edge } => write!(f, "close book edge {edge}"),
            Move::Shell { tet } => write!(f, "shell tetrahedron {tet}"),
            Move::CollapseEdge { edge } => write!(f, "collapse edge {edge}"),
        }
    }
}

/// What becomes of one face of a removed tetrahedron.
#[derive(Clone, Copy, Debug)]
enum Link {
    /// Glued to another removed face inside the region; disappears.
    Interior,
    /// Reappears as a face of new tetrahedron `tet`; `perm` maps old vertex
    /// labels to new ones.
    ToNew { tet: usize, perm: Perm4 },
    /// Flattened onto face `face` of removed tetrahedron `tet`.
    Flatten { tet: usize, face: usize, perm: Perm4 },
    /// Whatever was glued here becomes boundary.
    Expose,
}

#[derive(Clone, Debug)]
enum Plan {
    Rebuild {
        region: Vec<usize>,
        links: Vec<[Link; 4]>,
        new_tets: usize,
        /// (new tet, face, new tet, perm) gluings among new tetrahedra.
        internal: Vec<(usize, usize, usize, Perm4)>,
    },
    Join(usize, usize, usize, Perm4),
    Unjoin(usize, usize),
}

fn perm(images: [usize; 4]) -> Perm4 {
    Perm4::new(images.map(|x| x as u8)).expect("valid permutation")
}

fn bad_index(what: &'static str, index: usize) -> Error {
    Error::BadIndex { what, index }
}

fn all_distinct(xs: &[usize]) -> bool {
    let mut v = xs.to_vec();
    v.sort_unstable();
    v.windows(2).all(|w| w[0] != w[1])
}

/// Retriangulates a ball whose vertices carry abstract labels. `old` lists
/// the tetrahedra to remove with the label of each of their vertices; `new`
/// lists the new tetrahedra by the labels of their vertices. Every boundary
/// triangle of the ball must be determined by its three labels.
fn labelled_plan(tri: &Triangulation, old: &[(usize, [usize; 4])], new: &[[usize; 4]]) -> Plan {
    let mask = |labels: &[usize; 4], f: usize| -> u32 {
        (0..4)
            .filter(|&v| v != f)
            .map(|v| 1u32 << labels[v])
            .fold(0, |a, b| a | b)
    };
    let mut internal = Vec::new();
    let mut new_faces: Vec<(u32, usize, usize)> = Vec::new();
    for (j, labels) in new.iter().enumerate() {
        for f in 0..4 {
            new_faces.push((mask(labels, f), j, f));
        }
    }
    let map_between = |from: &[usize; 4], to: &[usize; 4], f: usize, tf: usize| -> Perm4 {
        let mut img = [0usize; 4];
        img[f] = tf;
        for v in (0..4).filter(|&v| v != f) {
            img[v] = to.iter().position(|&l| l == from[v]).unwrap();
        }
        perm(img)
    };
    let mut external_new = HashSet::new();
    for &(m, j, f) in &new_faces {
        let partners: Vec<&(u32, usize, usize)> = new_faces
            .iter()
            .filter(|&&(m2, j2, f2)| m2 == m && (j2, f2) != (j, f))
            .collect();
        match partners.first() {
            Some(&&(_, j2, f2)) => {
                if (j, f) < (j2, f2) {
                    internal.push((j, f, j2, map_between(&new[j], &new[j2], f, f2)));
                }
            }
            None => {
                external_new.insert(m);
            }
        }
    }
    let region: Vec<usize> = old.iter().map(|&(t, _)| t).collect();
    let mut links = Vec::with_capacity(old.len());
    for &(t, labels) in old {
        let mut row = [Link::Interior; 4];
        for (f, slot) in row.iter_mut().enumerate() {
            let m = mask(&labels, f);
            let interior = tri.gluing(t, f).is_some_and(|g| {
                old.iter()
                    .find(|&&(u, _)| u == g.tet)
                    .is_some_and(|(_, ul)| mask(ul, g.perm.apply(f)) == m)
            });
            if interior {
                *slot = Link::Interior;
            } else {
                let &(_, j, nf) = new_faces
                    .iter()
                    .find(|&&(m2, _, _)| m2 == m)
                    .expect("boundary triangle present in new region");
                debug_assert!(external_new.contains(&m));
                *slot = Link::ToNew {
                    tet: j,
                    perm: map_between(&labels, &new[j], f, nf),
                };
            }
        }
        links.push(row);
    }
    Plan::Rebuild {
        region,
        links,
        new_tets: new.len(),
        internal,
    }
}

enum End {
    Boundary,
    Face(usize, usize, Perm4),
}

/// Follows a chain of identifications starting at a removed face. If
/// `cross` is set we first leave through the old gluing of that face,
/// otherwise we first apply its link.
fn trace(
    tri: &Triangulation,
    region_index: &[usize],
    links: &[[Link; 4]],
    base: usize,
    mut slot: (usize, usize),
    mut cur: Perm4,
    mut cross: bool,
) -> Result<End> {
    let limit = 8 * links.len() + 8;
    for _ in 0..limit {
        if cross {
            match tri.gluing(slot.0, slot.1) {
                None => return Ok(End::Boundary),
                Some(g) => {
                    cur = g.perm * cur;
                    let face = g.perm.apply(slot.1);
                    if region_index[g.tet] == usize::MAX {
                        return Ok(End::Face(g.tet, face, cur));
                    }
                    slot = (g.tet, face);
                }
            }
        }
        match links[region_index[slot.0]][slot.1] {
            Link::Interior => {
                return Err(Error::Internal(
                    "face chain entered the interior of a move region".into(),
                ))
            }
            Link::Expose => return Ok(End::Boundary),
            Link::ToNew { tet, perm } => {
                return Ok(End::Face(base + tet, perm.apply(slot.1), perm * cur))
            }
            Link::Flatten { tet, face, perm } => {
                cur = perm * cur;
                slot = (tet, face);
                cross = true;
            }
        }
    }
    Err(Error::Internal("face chain does not terminate".into()))
}

fn apply_plan(tri: &Triangulation, plan: &Plan) -> Result<Triangulation> {
    match plan {
        Plan::Join(t, f, u, p) => {
            let mut out = tri.clone();
            out.join(*t, *f, *u, *p)
                .map_err(|e| Error::MoveRefused(e.to_string()))?;
            Ok(out)
        }
        Plan::Unjoin(t, f) => {
            let mut out = tri.clone();
            out.unjoin(*t, *f);
            Ok(out)
        }
        Plan::Rebuild {
            region,
            links,
            new_tets,
            internal,
        } => {
            let n = tri.size();
            let mut region_index = vec![usize::MAX; n];
            for (i, &t) in region.iter().enumerate() {
                region_index[t] = i;
            }
            let base = n;
            let mut done: HashSet<(usize, usize)> = HashSet::new();
            let mut joins = Vec::new();
            fn record(
                start: (usize, usize),
                end: End,
                done: &mut HashSet<(usize, usize)>,
                joins: &mut Vec<(usize, usize, usize, Perm4)>,
            ) -> Result<()> {
                if let End::Face(t, f, p) = end {
                    if (t, f) == start {
                        return Err(Error::MoveRefused(
                            "move would glue a face to itself".into(),
                        ));
                    }
                    if done.insert((t, f)) {
                        joins.push((start.0, start.1, t, p));
                    }
                }
                Ok(())
            }
            for (i, &t) in region.iter().enumerate() {
                for f in 0..4 {
                    match links[i][f] {
                        Link::ToNew { tet, perm } => {
                            let start = (base + tet, perm.apply(f));
                            if !done.insert(start) {
                                continue;
                            }
                            let end = trace(
                                tri,
                                &region_index,
                                links,
                                base,
                                (t, f),
                                perm.inverse(),
                                true,
                            )?;
                            record(start, end, &mut done, &mut joins)?;
                        }
                        _ => {
                            if let Some(g) = tri.gluing(t, f) {
                                if region_index[g.tet] != usize::MAX {
                                    continue;
                                }
                                let start = (g.tet, g.perm.apply(f));
                                if !done.insert(start) {
                                    continue;
                                }
                                let end = trace(
                                    tri,
                                    &region_index,
                                    links,
                                    base,
                                    (t, f),
                                    g.perm.inverse(),
                                    false,
                                )?;
                                record(start, end, &mut done, &mut joins)?;
                            }
                        }
                    }
                }
            }
            let mut out = tri.clone();
            for &t in region {
                for f in 0..4 {
                    out.unjoin(t, f);
                }
            }
            for _ in 0..*new_tets {
                out.add_tetrahedron();
            }
            let refuse = |e: Error| Error::MoveRefused(e.to_string());
            for &(a, f, b, p) in internal {
                out.join(base + a, f, base + b, p).map_err(refuse)?;
            }
            for (a, f, b, p) in joins {
                out.join(a, f, b, p).map_err(refuse)?;
            }
            out.remove_tetrahedra(region);
            Ok(out)
        }
    }
}

/// Builds the plan for a move, or `None` if its safety conditions fail.
fn plan_move(tri: &Triangulation, skel: &Skeleton, m: &Move) -> Result<Option<Plan>> {
    match *m {
        Move::Pachner23 { face } => {
            let fc = skel.faces.get(face).ok_or(bad_index("face", face))?;
            if fc.is_boundary() {
                return Ok(None);
            }
            let (t0, f0) = fc.embeddings[0];
            let (t1, _) = fc.embeddings[1];
            if t0 == t1 {
                return Ok(None);
            }
            let g = tri.gluing(t0, f0).unwrap();
            let mut la = [3usize; 4];
            let mut lb = [4usize; 4];
            for (k, x) in (0..4).filter(|&x| x != f0).enumerate() {
                la[x] = k;
                lb[g.perm.apply(x)] = k;
            }
            Ok(Some(labelled_plan(
                tri,
                &[(t0, la), (t1, lb)],
                &[[0, 1, 3, 4], [0, 2, 3, 4], [1, 2, 3, 4]],
            )))
        }
        Move::Pachner32 { edge } | Move::FourFour { edge, .. } => {
            let (deg, axis) = match *m {
                Move::FourFour { axis, .. } => {
                    if axis > 1 {
                        return Err(bad_index("4-4 axis", axis));
                    }
                    (4, axis)
                }
                _ => (3, 0),
            };
            let e = skel.edges.get(edge).ok_or(bad_index("edge", edge))?;
            if e.boundary || e.reversed || e.degree() != deg {
                return Ok(None);
            }
            let tets: Vec<usize> = e.embeddings.iter().map(|x| x.tet).collect();
            if !all_distinct(&tets) {
                return Ok(None);
            }
            let old: Vec<(usize, [usize; 4])> = e
                .embeddings
                .iter()
                .enumerate()
                .map(|(i, emb)| {
                    let mut l = [0usize; 4];
                    l[emb.perm.apply(0)] = deg;
                    l[emb.perm.apply(1)] = deg + 1;
                    l[emb.perm.apply(2)] = i;
                    l[emb.perm.apply(3)] = (i + 1) % deg;
                    (emb.tet, l)
                })
                .collect();
            let new: Vec<[usize; 4]> = if deg == 3 {
                vec![[0, 1, 2, 3], [0, 1, 2, 4]]
            } else {
                let (a, b, cycle) = if axis == 0 {
                    (0, 2, [4, 1, 5, 3])
                } else {
                    (1, 3, [0, 4, 2, 5])
                };
                (0..4)
                    .map(|k| [a, b, cycle[k], cycle[(k + 1) % 4]])
                    .collect()
            };
            Ok(Some(labelled_plan(tri, &old, &new)))
        }
        Move::TwoZeroVertex { vertex } => {
            let v = skel.vertices.get(vertex).ok_or(bad_index("vertex", vertex))?;
            if v.degree() != 2 || v.link.classification != LinkType::Sphere {
                return Ok(None);
            }
            let (ta, a) = v.corners[0];
            let (tb, b) = v.corners[1];
            if ta == tb {
                return Ok(None);
            }
            // Vertex correspondence between the two tetrahedra of the pillow.
            let mut img = [usize::MAX; 4];
            img[a] = b;
            for x in (0..4).filter(|&x| x != a) {
                let Some(g) = tri.gluing(ta, x) else {
                    return Ok(None);
                };
                if g.tet != tb || g.perm.apply(a) != b {
                    return Ok(None);
                }
                for y in (0..4).filter(|&y| y != a && y != x) {
                    let w = g.perm.apply(y);
                    if img[y] != usize::MAX && img[y] != w {
                        return Ok(None);
                    }
                    img[y] = w;
                }
            }
            let p = perm(img);
            let fa = skel.tet_faces[ta][a];
            let fb = skel.tet_faces[tb][b];
            if fa == fb || (skel.faces[fa].is_boundary() && skel.faces[fb].is_boundary()) {
                return Ok(None);
            }
            let mut la = [Link::Interior; 4];
            let mut lb = [Link::Interior; 4];
            la[a] = Link::Flatten {
                tet: tb,
                face: b,
                perm: p,
            };
            lb[b] = Link::Flatten {
                tet: ta,
                face: a,
                perm: p.inverse(),
            };
            Ok(Some(Plan::Rebuild {
                region: vec![ta, tb],
                links: vec![la, lb],
                new_tets: 0,
                internal: vec![],
            }))
        }
        Move::TwoZeroEdge { edge } => {
            let e = skel.edges.get(edge).ok_or(bad_index("edge", edge))?;
            if e.boundary || e.reversed || e.degree() != 2 {
                return Ok(None);
            }
            let (ea, eb) = (e.embeddings[0], e.embeddings[1]);
            if ea.tet == eb.tet {
                return Ok(None);
            }
            let (v, w) = (ea.perm, eb.perm);
            let p = w * Perm4::transposition(2, 3) * v.inverse();
            let g = skel.tet_edges[ea.tet][EDGE_NUMBER[v.apply(2)][v.apply(3)]];
            let h = skel.tet_edges[eb.tet][EDGE_NUMBER[w.apply(2)][w.apply(3)]];
            if g == h || (skel.edges[g].boundary && skel.edges[h].boundary) {
                return Ok(None);
            }
            let face = |t: usize, f: usize| skel.tet_faces[t][f];
            let bdry = |f: usize| skel.faces[f].is_boundary();
            let pairs = [
                (face(ea.tet, v.apply(0)), face(eb.tet, w.apply(0))),
                (face(ea.tet, v.apply(1)), face(eb.tet, w.apply(1))),
            ];
            for &(x, y) in &pairs {
                if x == y || (bdry(x) && bdry(y)) {
                    return Ok(None);
                }
            }
            let [(f1, f2), (f3, f4)] = pairs;
            for (x, y, o1, o2) in [
                (f1, f3, f2, f4),
                (f1, f4, f2, f3),
                (f2, f3, f1, f4),
                (f2, f4, f1, f3),
            ] {
                if x == y && (o1 == o2 || (bdry(o1) && bdry(o2))) {
                    return Ok(None);
                }
            }
            let mut la = [Link::Interior; 4];
            let mut lb = [Link::Interior; 4];
            for k in 0..2 {
                la[v.apply(k)] = Link::Flatten {
                    tet: eb.tet,
                    face: w.apply(k),
                    perm: p,
                };
                lb[w.apply(k)] = Link::Flatten {
                    tet: ea.tet,
                    face: v.apply(k),
                    perm: p.inverse(),
                };
            }
            Ok(Some(Plan::Rebuild {
                region: vec![ea.tet, eb.tet],
                links: vec![la, lb],
                new_tets: 0,
                internal: vec![],
            }))
        }
        Move::TwoOneEdge { edge, end } => {
            if end > 1 {
                return Err(bad_index("2-1 edge end", end));
            }
            let e = skel.edges.get(edge).ok_or(bad_index("edge", edge))?;
            if e.boundary || e.reversed || e.degree() != 1 {
                return Ok(None);
            }
            let emb = e.embeddings[0];
            let (d, v) = (emb.tet, emb.perm);
            let other = 1 - end;
            let Some(tg) = tri.gluing(d, v.apply(end)) else {
                return Ok(None);
            };
            let top = tg.tet;
            if top == d {
                return Ok(None);
            }
            let tp = tg.perm;
            let g0 = tp.apply(v.apply(2));
            let g1 = tp.apply(v.apply(3));
            let apex = tp.apply(v.apply(end));
            let o = tp.apply(v.apply(other));
            let e0 = skel.tet_edges[top][EDGE_NUMBER[g0][apex]];
            let e1 = skel.tet_edges[top][EDGE_NUMBER[g1][apex]];
            if e0 == e1 || (skel.edges[e0].boundary && skel.edges[e1].boundary) {
                return Ok(None);
            }
            let fa = skel.tet_faces[top][g0];
            let fb = skel.tet_faces[top][g1];
            if fa == fb || (skel.faces[fa].is_boundary() && skel.faces[fb].is_boundary()) {
                return Ok(None);
            }
            let mut ld = [Link::Interior; 4];
            let mut img = [0usize; 4];
            img[v.apply(end)] = 0;
            img[v.apply(other)] = 1;
            img[v.apply(2)] = 2;
            img[v.apply(3)] = 3;
            ld[v.apply(other)] = Link::ToNew {
                tet: 0,
                perm: perm(img),
            };
            let mut lt = [Link::Interior; 4];
            let mut img = [0usize; 4];
            img[o] = 0;
            img[apex] = 1;
            img[g0] = 2;
            img[g1] = 3;
            lt[o] = Link::ToNew {
                tet: 0,
                perm: perm(img),
            };
            let tau = Perm4::transposition(g0, g1);
            lt[g0] = Link::Flatten {
                tet: top,
                face: g1,
                perm: tau,
            };
            lt[g1] = Link::Flatten {
                tet: top,
                face: g0,
                perm: tau,
            };
            Ok(Some(Plan::Rebuild {
                region: vec![d, top],
                links: vec![ld, lt],
                new_tets: 1,
                internal: vec![(0, 2, 0, Perm4::transposition(2, 3))],
            }))
        }
        Move::BookOpen { face } => {
            let fc = skel.faces.get(face).ok_or(bad_index("face", face))?;
            if fc.is_boundary() {
                return Ok(None);
            }
            let (t, f) = fc.embeddings[0];
            let verts: Vec<usize> = (0..4).filter(|&v| v != f).collect();
            let boundary_edges = [(0, 1), (0, 2), (1, 2)]
                .iter()
                .filter(|&&(i, j)| {
                    skel.edges[skel.tet_edges[t][EDGE_NUMBER[verts[i]][verts[j]]]].boundary
                })
                .count();
            if boundary_edges != 2 {
                return Ok(None);
            }
            Ok(Some(Plan::Unjoin(t, f)))
        }
        Move::BookClose { edge } => {
            let e = skel.edges.get(edge).ok_or(bad_index("edge", edge))?;
            if !e.boundary || e.reversed {
                return Ok(None);
            }
            let first = e.embeddings[0];
            let last = *e.embeddings.last().unwrap();
            let (t, fa) = (first.tet, first.perm.apply(3));
            let (u, fb) = (last.tet, last.perm.apply(2));
            let face_a = skel.tet_faces[t][fa];
            let face_b = skel.tet_faces[u][fb];
            if face_a == face_b {
                return Ok(None);
            }
            let bc = skel
                .boundary_components
                .iter()
                .find(|bc| bc.faces.contains(&face_a))
                .expect("boundary face lies in a boundary component");
            if bc.faces.len() <= 2 {
                return Ok(None);
            }
            let va = skel.tet_vertices[t][first.perm.apply(2)];
            let vb = skel.tet_vertices[u][last.perm.apply(3)];
            if va == vb {
                return Ok(None);
            }
            let p = last.perm * Perm4::transposition(2, 3) * first.perm.inverse();
            Ok(Some(Plan::Join(t, fa, u, p)))
        }
        Move::Shell { tet } => {
            if tet >= tri.size() {
                return Err(bad_index("tetrahedron", tet));
            }
            let bfaces: Vec<usize> = (0..4).filter(|&f| tri.gluing(tet, f).is_none()).collect();
            let ok = match bfaces.len() {
                3 => true,
                2 => {
                    let (a, b) = (bfaces[0], bfaces[1]);
                    let edge_internal = !skel.edges[skel.tet_edges[tet][EDGE_NUMBER[a][b]]].boundary;
                    let rest: Vec<usize> = (0..4).filter(|f| !bfaces.contains(f)).collect();
                    let identified =
                        skel.tet_faces[tet][rest[0]] == skel.tet_faces[tet][rest[1]];
                    edge_internal && !identified
                }
                1 => {
                    let a = bfaces[0];
                    let internal_vertex = skel.vertices[skel.tet_vertices[tet][a]]
                        .link
                        .classification
                        == LinkType::Sphere;
                    let es: Vec<usize> = (0..4)
                        .filter(|&x| x != a)
                        .map(|x| skel.tet_edges[tet][EDGE_NUMBER[a][x]])
                        .collect();
                    internal_vertex && all_distinct(&es)
                }
                _ => false,
            };
            if !ok {
                return Ok(None);
            }
            Ok(Some(Plan::Rebuild {
                region: vec![tet],
                links: vec![[Link::Expose; 4]],
                new_tets: 0,
                internal: vec![],
            }))
        }
        Move::CollapseEdge { edge } => collapse_plan(tri, skel, edge),
    }
}

fn collapse_plan(tri: &Triangulation, skel: &Skeleton, edge: usize) -> Result<Option<Plan>> {
    let e = skel.edges.get(edge).ok_or(bad_index("edge", edge))?;
    if e.boundary {
        return Err(Error::Precondition(
            "collapsing boundary edges is not supported".into(),
        ));
    }
    if e.reversed {
        return Ok(None);
    }
    let first = e.embeddings[0];
    let vv = skel.tet_vertices[first.tet][first.perm.apply(0)];
    let vw = skel.tet_vertices[first.tet][first.perm.apply(1)];
    if vv == vw {
        return Ok(None);
    }
    // (1) distinct tetrahedra.
    let tets: Vec<usize> = e.embeddings.iter().map(|x| x.tet).collect();
    if !all_distinct(&tets) {
        return Ok(None);
    }
    // (2) endpoints not both on the boundary.
    let on_boundary = |v: usize| skel.vertices[v].link.classification != LinkType::Sphere;
    if on_boundary(vv) && on_boundary(vw) {
        return Ok(None);
    }
    // (3) edge multigraph, (4) face multigraph: no cycles.
    let ne = skel.edges.len();
    let mut euf = UnionFind::with_compression(ne + 1, false);
    for (i, x) in skel.edges.iter().enumerate() {
        if x.boundary {
            euf.union(ne, i);
        }
    }
    for emb in &e.embeddings {
        let p = emb.perm;
        let g = skel.tet_edges[emb.tet][EDGE_NUMBER[p.apply(0)][p.apply(3)]];
        let h = skel.tet_edges[emb.tet][EDGE_NUMBER[p.apply(1)][p.apply(3)]];
        if !euf.union(g, h) {
            return Ok(None);
        }
    }
    let nf = skel.faces.len();
    let mut fuf = UnionFind::with_compression(nf + 1, false);
    for (i, x) in skel.faces.iter().enumerate() {
        if x.is_boundary() {
            fuf.union(nf, i);
        }
    }
    for emb in &e.embeddings {
        let p = emb.perm;
        let upper = skel.tet_faces[emb.tet][p.apply(1)];
        let lower = skel.tet_faces[emb.tet][p.apply(0)];
        if !fuf.union(upper, lower) {
            return Ok(None);
        }
    }
    let links = e
        .embeddings
        .iter()
        .map(|emb| {
            let p = emb.perm;
            let (a, b) = (p.apply(0), p.apply(1));
            let tau = Perm4::transposition(a, b);
            let mut row = [Link::Interior; 4];
            row[a] = Link::Flatten {
                tet: emb.tet,
                face: b,
                perm: tau,
            };
            row[b] = Link::Flatten {
                tet: emb.tet,
                face: a,
                perm: tau,
            };
            row
        })
        .collect();
    let _ = tri;
    Ok(Some(Plan::Rebuild {
        region: tets,
        links,
        new_tets: 0,
        internal: vec![],
    }))
}

/// Whether the move's safety conditions hold. Uses a precomputed skeleton so
/// that the test is constant time for all kinds except edge collapses.
pub fn test_move_with(tri: &Triangulation, skel: &Skeleton, m: &Move) -> Result<bool> {
    Ok(plan_move(tri, skel, m)?.is_some())
}

pub fn test_move(tri: &Triangulation, m: &Move) -> Result<bool> {
    test_move_with(tri, &tri.skeleton(), m)
}

pub fn perform_move_with(tri: &Triangulation, skel: &Skeleton, m: &Move) -> Result<Triangulation> {
    match plan_move(tri, skel, m)? {
        Some(plan) => apply_plan(tri, &plan),
        None => Err(Error::MoveRefused(format!("{m} fails its safety conditions"))),
    }
}

pub fn perform_move(tri: &Triangulation, m: &Move) -> Result<Triangulation> {
    perform_move_with(tri, &tri.skeleton(), m)
}

/// Candidate locations of a kind, before safety testing.
fn candidates(tri: &Triangulation, skel: &Skeleton, kind: MoveKind) -> Vec<Move> {
    match kind {
        MoveKind::Pachner23 => (0..skel.faces.len())
            .filter(|&f| !skel.faces[f].is_boundary())
            .map(|face| Move::Pachner23 { face })
            .collect(),
        MoveKind::Pachner32 => edges_of_degree(skel, 3)
            .map(|edge| Move::Pachner32 { edge })
            .collect(),
        MoveKind::FourFour => edges_of_degree(skel, 4)
            .flat_map(|edge| (0..2).map(move |axis| Move::FourFour { edge, axis }))
            .collect(),
        MoveKind::TwoZeroVertex => (0..skel.vertices.len())
            .filter(|&v| skel.vertices[v].degree() == 2)
            .map(|vertex| Move::TwoZeroVertex { vertex })
            .collect(),
        MoveKind::TwoZeroEdge => edges_of_degree(skel, 2)
            .map(|edge| Move::TwoZeroEdge { edge })
            .collect(),
        MoveKind::TwoOneEdge => edges_of_degree(skel, 1)
            .flat_map(|edge| (0..2).map(move |end| Move::TwoOneEdge { edge, end }))
            .collect(),
        MoveKind::BookOpen => (0..skel.faces.len())
            .filter(|&f| !skel.faces[f].is_boundary())
            .map(|face| Move::BookOpen { face })
            .collect(),
        MoveKind::BookClose => (0..skel.edges.len())
            .filter(|&e| skel.edges[e].boundary)
            .map(|edge| Move::BookClose { edge })
            .collect(),
        MoveKind::Shell => (0..tri.size()).map(|tet| Move::Shell { tet }).collect(),
        MoveKind::CollapseEdge => (0..skel.edges.len())
            .filter(|&e| !skel.edges[e].boundary)
            .map(|edge| Move::CollapseEdge { edge })
            .collect(),
    }
}

fn edges_of_degree(skel: &Skeleton, d: usize) -> impl Iterator<Item = usize> + '_ {
    (0..skel.edges.len()).filter(move |&e| !skel.edges[e].boundary && skel.edges[e].degree() == d)
}

/// Every location of the given kinds that passes its safety test, in kind
/// order and then by location.
pub fn enumerate_moves_with(tri: &Triangulation, skel: &Skeleton, kinds: &[MoveKind]) -> Vec<Move> {
    let mut out = Vec::new();
    for &kind in kinds {
        for m in candidates(tri, skel, kind) {
            if matches!(plan_move(tri, skel, &m), Ok(Some(_))) {
                out.push(m);
            }
        }
    }
    out
}

pub fn enumerate_moves(tri: &Triangulation, kinds: &[MoveKind]) -> Vec<Move> {
    enumerate_moves_with(tri, &tri.skeleton(), kinds)
}

/// The first safe move of the given kinds, in the same order as
/// [`enumerate_moves_with`], performed.
pub fn first_move_with(
    tri: &Triangulation,
    skel: &Skeleton,
    kinds: &[MoveKind],
) -> Option<(Move, Triangulation)> {
    for &kind in kinds {
        for m in candidates(tri, skel, kind) {
            if let Ok(Some(plan)) = plan_move(tri, skel, &m) {
                return apply_plan(tri, &plan).ok().map(|t| (m, t));
            }
        }
    }
    None
}

#[derive(Clone, Debug)]
pub struct CollapseOutcome {
    pub ok: bool,
    pub result: Option<Triangulation>,
}

/// Tests (and unless `dry_run`, performs) the collapse of an internal edge.
pub fn collapse_edge(tri: &Triangulation, edge: usize, dry_run: bool) -> Result<CollapseOutcome> {
    let skel = tri.skeleton();
    match collapse_plan(tri, &skel, edge)? {
        None => Ok(CollapseOutcome {
            ok: false,
            result: None,
        }),
        Some(plan) => {
            let result = if dry_run {
                None
            } else {
                Some(apply_plan(tri, &plan)?)
            };
            Ok(CollapseOutcome { ok: true, result })
        }
    }
}
