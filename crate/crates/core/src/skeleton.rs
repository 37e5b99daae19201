//! Vertices, edges, faces and boundary components of a triangulation, with
//! vertex link classification.

use crate::error::{Error, Result};
use crate::perm::{Perm4, EDGE_NUMBER, EDGE_VERTICES};
use crate::triangulation::Triangulation;
use crate::union_find::{ParityUnionFind, UnionFind};

/// One appearance of an edge inside a tetrahedron. `perm[0]` and `perm[1]`
/// are the endpoints; walking around the edge crosses the face opposite
/// `perm[2]` to reach the next embedding.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct EdgeEmbedding {
    pub tet: usize,
    pub perm: Perm4,
}

impl EdgeEmbedding {
    pub fn edge(&self) -> usize {
        EDGE_NUMBER[self.perm.apply(0)][self.perm.apply(1)]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum LinkType {
    Sphere,
    Disc,
    Torus,
    KleinBottle,
    OtherClosed,
    OtherBounded,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct LinkClass {
    pub euler_char: i64,
    pub orientable: bool,
    pub has_boundary: bool,
    pub classification: LinkType,
}

#[derive(Clone, Debug)]
pub struct Vertex {
    /// (tetrahedron, vertex) corners, in increasing order.
    pub corners: Vec<(usize, usize)>,
    pub link: LinkClass,
}

impl Vertex {
    pub fn degree(&self) -> usize {
        self.corners.len()
    }
}

#[derive(Clone, Debug)]
pub struct Edge {
    /// Embeddings in walking order. For boundary edges the walk starts and
    /// ends on boundary faces.
    pub embeddings: Vec<EdgeEmbedding>,
    pub boundary: bool,
    /// The edge is identified with itself in reverse.
    pub reversed: bool,
}

impl Edge {
    pub fn degree(&self) -> usize {
        self.embeddings.len()
    }

    pub fn is_valid(&self) -> bool {
        !self.reversed
    }
}

#[derive(Clone, Debug)]
pub struct Face {
    /// One (boundary) or two (internal) (tetrahedron, face) slots.
    pub embeddings: Vec<(usize, usize)>,
}

impl Face {
    pub fn is_boundary(&self) -> bool {
        self.embeddings.len() == 1
    }
}

#[derive(Clone, Debug)]
pub struct BoundaryComponent {
    pub faces: Vec<usize>,
    pub edges: Vec<usize>,
    pub vertices: Vec<usize>,
}

impl BoundaryComponent {
    pub fn euler_char(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.faces.len() as i64
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub struct Classification {
    pub valid: bool,
    pub closed: bool,
    pub bounded: bool,
    pub ideal: bool,
    pub orientable: bool,
    pub connected: bool,
}

#[derive(Clone, Debug)]
pub struct Skeleton {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
    pub faces: Vec<Face>,
    pub boundary_components: Vec<BoundaryComponent>,
    pub tet_vertices: Vec<[usize; 4]>,
    pub tet_edges: Vec<[usize; 6]>,
    pub tet_faces: Vec<[usize; 4]>,
    pub tet_component: Vec<usize>,
    pub component_count: usize,
    /// Per tetrahedron: does it agree with the orientation of the first
    /// tetrahedron of its component (meaningful only when orientable).
    pub tet_orientation: Vec<bool>,
    pub orientable: bool,
}

impl Skeleton {
    pub fn new(tri: &Triangulation) -> Skeleton {
        let n = tri.size();

        // Faces.
        let mut tet_faces = vec![[usize::MAX; 4]; n];
        let mut faces = Vec::new();
        for t in 0..n {
            for f in 0..4 {
                if tet_faces[t][f] != usize::MAX {
                    continue;
                }
                let idx = faces.len();
                tet_faces[t][f] = idx;
                let mut emb = vec![(t, f)];
                if let Some(g) = tri.gluing(t, f) {
                    let back = g.perm.apply(f);
                    tet_faces[g.tet][back] = idx;
                    emb.push((g.tet, back));
                }
                faces.push(Face { embeddings: emb });
            }
        }

        // Vertices.
        let mut uf = UnionFind::new(4 * n);
        for t in 0..n {
            for f in 0..4 {
                if let Some(g) = tri.gluing(t, f) {
                    for v in (0..4).filter(|&v| v != f) {
                        uf.union(4 * t + v, 4 * g.tet + g.perm.apply(v));
                    }
                }
            }
        }
        let mut tet_vertices = vec![[usize::MAX; 4]; n];
        let mut root_index = vec![usize::MAX; 4 * n];
        let mut vertex_corners: Vec<Vec<(usize, usize)>> = Vec::new();
        for t in 0..n {
            for v in 0..4 {
                let r = uf.find(4 * t + v);
                if root_index[r] == usize::MAX {
                    root_index[r] = vertex_corners.len();
                    vertex_corners.push(Vec::new());
                }
                tet_vertices[t][v] = root_index[r];
                vertex_corners[root_index[r]].push((t, v));
            }
        }

        // Edges.
        let mut tet_edges = vec![[usize::MAX; 6]; n];
        let mut edges = Vec::new();
        for t in 0..n {
            for e in 0..6 {
                if tet_edges[t][e] != usize::MAX {
                    continue;
                }
                let edge = walk_edge(tri, t, e);
                let idx = edges.len();
                for emb in &edge.embeddings {
                    tet_edges[emb.tet][emb.edge()] = idx;
                }
                edges.push(edge);
            }
        }

        // Components and orientation.
        let mut puf = ParityUnionFind::new(n);
        let mut orientable = true;
        for t in 0..n {
            for f in 0..4 {
                if let Some(g) = tri.gluing(t, f) {
                    if !puf.relate(t, g.tet, g.perm.is_even()) {
                        orientable = false;
                    }
                }
            }
        }
        let mut tet_component = vec![usize::MAX; n];
        let mut tet_orientation = vec![true; n];
        let mut comp_of_root = vec![usize::MAX; n];
        let mut component_count = 0;
        for t in 0..n {
            let (r, parity) = puf.find(t);
            if comp_of_root[r] == usize::MAX {
                comp_of_root[r] = component_count;
                component_count += 1;
            }
            tet_component[t] = comp_of_root[r];
            tet_orientation[t] = !parity;
        }
        // Normalise so that the first tetrahedron of each component is
        // positively oriented.
        let mut first_parity = vec![None; component_count];
        for t in 0..n {
            let c = tet_component[t];
            let base = *first_parity[c].get_or_insert(tet_orientation[t]);
            tet_orientation[t] = tet_orientation[t] == base;
        }

        // Vertex links. Link vertices are the ends of edges at each vertex.
        let mut link_vertices = vec![0i64; vertex_corners.len()];
        for edge in &edges {
            let emb = edge.embeddings[0];
            link_vertices[tet_vertices[emb.tet][emb.perm.apply(0)]] += 1;
            if !edge.reversed {
                link_vertices[tet_vertices[emb.tet][emb.perm.apply(1)]] += 1;
            }
        }
        let vertices: Vec<Vertex> = vertex_corners
            .into_iter()
            .zip(link_vertices)
            .map(|(corners, lv)| {
                let link = vertex_link_class(tri, &corners, lv);
                Vertex { corners, link }
            })
            .collect();

        // Boundary components.
        let mut buf = UnionFind::new(faces.len());
        for edge in edges.iter().filter(|e| e.boundary) {
            let first = edge.embeddings[0];
            let last = *edge.embeddings.last().unwrap();
            let fa = tet_faces[first.tet][first.perm.apply(3)];
            let fb = tet_faces[last.tet][last.perm.apply(2)];
            buf.union(fa, fb);
        }
        let mut bc_of_root = vec![usize::MAX; faces.len()];
        let mut boundary_components: Vec<BoundaryComponent> = Vec::new();
        let mut face_bc = vec![usize::MAX; faces.len()];
        for (fi, face) in faces.iter().enumerate() {
            if !face.is_boundary() {
                continue;
            }
            let r = buf.find(fi);
            if bc_of_root[r] == usize::MAX {
                bc_of_root[r] = boundary_components.len();
                boundary_components.push(BoundaryComponent {
                    faces: Vec::new(),
                    edges: Vec::new(),
                    vertices: Vec::new(),
                });
            }
            face_bc[fi] = bc_of_root[r];
            boundary_components[bc_of_root[r]].faces.push(fi);
        }
        for (ei, edge) in edges.iter().enumerate() {
            if edge.boundary {
                let first = edge.embeddings[0];
                let fa = tet_faces[first.tet][first.perm.apply(3)];
                boundary_components[face_bc[fa]].edges.push(ei);
            }
        }
        for bc in boundary_components.iter_mut() {
            let mut vs: Vec<usize> = bc
                .faces
                .iter()
                .flat_map(|&fi| {
                    let (t, f) = faces[fi].embeddings[0];
                    (0..4).filter(move |&v| v != f).map(move |v| (t, v))
                })
                .map(|(t, v)| tet_vertices[t][v])
                .collect();
            vs.sort_unstable();
            vs.dedup();
            bc.vertices = vs;
        }

        Skeleton {
            vertices,
            edges,
            faces,
            boundary_components,
            tet_vertices,
            tet_edges,
            tet_faces,
            tet_component,
            component_count,
            tet_orientation,
            orientable,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn vertex_link(&self, v: usize) -> Result<LinkClass> {
        self.vertices
            .get(v)
            .map(|x| x.link)
            .ok_or(Error::BadIndex {
                what: "vertex",
                index: v,
            })
    }

    pub fn has_boundary_faces(&self) -> bool {
        self.faces.iter().any(Face::is_boundary)
    }

    pub fn classify(&self) -> Classification {
        let edges_ok = self.edges.iter().all(Edge::is_valid);
        let links_ok = self.vertices.iter().all(|v| {
            !matches!(v.link.classification, LinkType::OtherBounded)
        });
        let valid = edges_ok && links_ok;
        let ideal_vertex = self.vertices.iter().any(|v| {
            matches!(
                v.link.classification,
                LinkType::Torus | LinkType::KleinBottle | LinkType::OtherClosed
            )
        });
        let has_bdry = self.has_boundary_faces();
        let all_sphere = self
            .vertices
            .iter()
            .all(|v| v.link.classification == LinkType::Sphere);
        let all_sphere_disc = self.vertices.iter().all(|v| {
            matches!(v.link.classification, LinkType::Sphere | LinkType::Disc)
        });
        Classification {
            valid,
            closed: valid && !has_bdry && all_sphere,
            bounded: valid && has_bdry && all_sphere_disc,
            ideal: valid && ideal_vertex,
            orientable: self.orientable,
            connected: self.component_count <= 1,
        }
    }
}

/// Walks around edge `e` of tetrahedron `t`, first backwards to a boundary
/// face (if any), then forwards collecting every embedding.
fn walk_edge(tri: &Triangulation, t: usize, e: usize) -> Edge {
    let [a, b] = EDGE_VERTICES[e];
    let [c, d] = EDGE_VERTICES[5 - e];
    let start = EdgeEmbedding {
        tet: t,
        perm: Perm4::new([a as u8, b as u8, c as u8, d as u8]).unwrap(),
    };
    let swap23 = Perm4::transposition(2, 3);
    let n = tri.size();
    let limit = 6 * n + 2;

    // Back up to the boundary, if the edge reaches it.
    let mut cur = start;
    let mut closed = false;
    let mut steps = 0;
    loop {
        match tri.gluing(cur.tet, cur.perm.apply(3)) {
            None => break,
            Some(g) => {
                let prev = EdgeEmbedding {
                    tet: g.tet,
                    perm: g.perm * cur.perm * swap23,
                };
                if prev.tet == start.tet && prev.edge() == start.edge() {
                    closed = true;
                    break;
                }
                cur = prev;
                steps += 1;
                if steps > limit {
                    break;
                }
            }
        }
    }
    let first = if closed { start } else { cur };

    let mut embeddings = vec![first];
    let mut seen = std::collections::HashSet::new();
    seen.insert((first.tet, first.edge()));
    let mut reversed = false;
    let mut boundary = false;
    let mut cur = first;
    loop {
        match tri.gluing(cur.tet, cur.perm.apply(2)) {
            None => {
                boundary = true;
                break;
            }
            Some(g) => {
                let next = EdgeEmbedding {
                    tet: g.tet,
                    perm: g.perm * cur.perm * swap23,
                };
                if next.tet == first.tet && next.edge() == first.edge() {
                    if next.perm.apply(0) != first.perm.apply(0) {
                        reversed = true;
                    }
                    break;
                }
                if !seen.insert((next.tet, next.edge())) {
                    // Revisiting a tetrahedron edge on a path that never
                    // returns to its start: the edge meets itself reversed.
                    reversed = true;
                    break;
                }
                embeddings.push(next);
                cur = next;
            }
        }
    }
    if reversed {
        // Make sure every slot of this edge is recorded, including those
        // only reached in the opposite direction.
        let mut cur = first;
        while let Some(g) = tri.gluing(cur.tet, cur.perm.apply(3)) {
            let prev = EdgeEmbedding {
                tet: g.tet,
                perm: g.perm * cur.perm * swap23,
            };
            if !seen.insert((prev.tet, prev.edge())) {
                break;
            }
            embeddings.push(prev);
            cur = prev;
        }
    }
    Edge {
        embeddings,
        boundary,
        reversed,
    }
}

fn vertex_link_class(tri: &Triangulation, corners: &[(usize, usize)], v_count: i64) -> LinkClass {
    let f = corners.len() as i64;
    let mut index = std::collections::HashMap::with_capacity(corners.len());
    for (i, &c) in corners.iter().enumerate() {
        index.insert(c, i);
    }
    let mut boundary_arcs = 0i64;
    let mut puf = ParityUnionFind::new(corners.len());
    let mut orientable = true;
    for (i, &(t, v)) in corners.iter().enumerate() {
        for face in (0..4).filter(|&x| x != v) {
            match tri.gluing(t, face) {
                None => boundary_arcs += 1,
                Some(g) => {
                    let j = index[&(g.tet, g.perm.apply(v))];
                    if !puf.relate(i, j, g.perm.is_even()) {
                        orientable = false;
                    }
                }
            }
        }
    }
    let e = (3 * f + boundary_arcs) / 2;
    let chi = v_count - e + f;
    let has_boundary = boundary_arcs > 0;
    let classification = match (has_boundary, chi, orientable) {
        (false, 2, _) => LinkType::Sphere,
        (false, 0, true) => LinkType::Torus,
        (false, 0, false) => LinkType::KleinBottle,
        (false, _, _) => LinkType::OtherClosed,
        (true, 1, true) => LinkType::Disc,
        (true, _, _) => LinkType::OtherBounded,
    };
    LinkClass {
        euler_char: chi,
        orientable,
        has_boundary,
        classification,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn single_tetrahedron() {
        let t = Triangulation::with_tetrahedra(1);
        let s = t.skeleton();
        assert_eq!(s.vertex_count(), 4);
        assert_eq!(s.edge_count(), 6);
        assert_eq!(s.face_count(), 4);
        assert_eq!(s.boundary_components.len(), 1);
        assert_eq!(s.boundary_components[0].euler_char(), 2);
        for v in &s.vertices {
            assert_eq!(v.link.classification, LinkType::Disc);
        }
        let c = s.classify();
        assert!(c.valid && c.bounded && c.orientable && c.connected && !c.closed);
    }

    #[test]
    fn empty() {
        let s = Triangulation::new().skeleton();
        assert_eq!(
            (s.vertex_count(), s.edge_count(), s.face_count()),
            (0, 0, 0)
        );
        assert!(s.boundary_components.is_empty());
    }

    #[test]
    fn rp3_is_closed_with_sphere_links() {
        let s = examples::rp3().skeleton();
        let c = s.classify();
        assert!(c.valid && c.closed && c.orientable && c.connected);
        assert_eq!(s.face_count(), 4);
        let deg: usize = s.edges.iter().map(Edge::degree).sum();
        assert_eq!(deg, 12);
        for v in &s.vertices {
            assert_eq!(v.link.classification, LinkType::Sphere);
        }
    }

    #[test]
    fn figure_eight_has_torus_link() {
        let s = examples::figure_eight().skeleton();
        assert_eq!(s.vertex_count(), 1);
        assert_eq!(s.edge_count(), 2);
        assert_eq!(s.vertices[0].link.classification, LinkType::Torus);
        let c = s.classify();
        assert!(c.valid && c.ideal && c.orientable && !c.closed);
    }

    #[test]
    fn cone_and_subdivide() {
        let cone = Triangulation::with_tetrahedra(1).cone_boundary().unwrap();
        assert_eq!(cone.size(), 5);
        let c = cone.skeleton().classify();
        assert!(c.closed && c.orientable && c.connected);
        assert!(crate::first_homology(&cone).unwrap().is_trivial());
        let sub = examples::rp3().barycentric_subdivision();
        let c = sub.skeleton().classify();
        assert!(c.closed && c.orientable && c.connected);
        assert_eq!(crate::first_homology(&sub).unwrap().to_string(), "Z_2");
        let fig = examples::figure_eight();
        assert_eq!(crate::first_homology(&fig).unwrap().to_string(), "Z");
        assert!(examples::rp3().cone_boundary().is_err());
    }
}
