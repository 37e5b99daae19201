//! Census enumeration: every connected triangulation with a given number of
//! tetrahedra and the requested properties, once per isomorphism class.
//!
//! The search glues the first unglued face at each step, either to an
//! unglued face of a tetrahedron already in use or to the next unused
//! tetrahedron. Relabelling symmetry lets the second option use a single
//! fixed target face and permutation, and when orientability is requested
//! every gluing can be taken orientation-reversing. Duplicates that survive
//! this normalisation are removed by isomorphism signature.

use std::collections::BTreeSet;

use rayon::prelude::*;

use crate::isosig;
use crate::perm::{Perm4, ALL_PERMS};
use crate::triangulation::Triangulation;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CensusSpec {
    pub tetrahedra: usize,
    /// Every face is glued (no boundary).
    pub closed: bool,
    pub orientable: bool,
    /// No ideal vertices.
    pub finite: bool,
}

impl CensusSpec {
    pub fn closed_orientable(n: usize) -> Self {
        CensusSpec {
            tetrahedra: n,
            closed: true,
            orientable: true,
            finite: true,
        }
    }

    /// Whether a (connected) triangulation satisfies the filters.
    pub fn accepts(&self, tri: &Triangulation) -> bool {
        let skel = tri.skeleton();
        let c = skel.classify();
        if !c.valid || !c.connected || tri.size() != self.tetrahedra {
            return false;
        }
        if self.closed && tri.has_boundary_faces() {
            return false;
        }
        if self.orientable && !c.orientable {
            return false;
        }
        if self.finite && c.ideal {
            return false;
        }
        true
    }
}

/// The gluing permutation used when a face meets a fresh tetrahedron.
fn fresh_perm(face: usize, orientable: bool) -> Perm4 {
    ALL_PERMS
        .iter()
        .copied()
        .find(|p| p.apply(face) == 3 && (!orientable || !p.is_even()))
        .unwrap()
}

struct Search<'a> {
    spec: &'a CensusSpec,
    tri: Triangulation,
    used: usize,
    /// Faces deliberately left as boundary.
    open: Vec<[bool; 4]>,
}

impl Search<'_> {
    fn first_free(&self) -> Option<(usize, usize)> {
        (0..self.used)
            .flat_map(|t| (0..4).map(move |f| (t, f)))
            .find(|&(t, f)| self.tri.gluing(t, f).is_none() && !self.open[t][f])
    }

    /// The choices available for the first free face.
    fn choices(&self, t: usize, f: usize) -> Vec<Choice> {
        let mut out = Vec::new();
        if !self.spec.closed {
            out.push(Choice::Boundary);
        }
        for u in t..self.used {
            for g in 0..4 {
                if (u, g) <= (t, f) || self.tri.gluing(u, g).is_some() || self.open[u][g] {
                    continue;
                }
                for p in ALL_PERMS {
                    if p.apply(f) != g || (self.spec.orientable && p.is_even()) {
                        continue;
                    }
                    out.push(Choice::Glue(u, p));
                }
            }
        }
        if self.used < self.spec.tetrahedra {
            out.push(Choice::Fresh);
        }
        out
    }

    fn run(&mut self, found: &mut BTreeSet<String>) {
        let Some((t, f)) = self.first_free() else {
            if self.used == self.spec.tetrahedra && self.spec.accepts(&self.tri) {
                found.insert(isosig::encode(&self.tri));
            }
            return;
        };
        for c in self.choices(t, f) {
            self.apply(t, f, c);
            self.run(found);
            self.undo(t, f, c);
        }
    }

    fn apply(&mut self, t: usize, f: usize, c: Choice) {
        match c {
            Choice::Boundary => self.open[t][f] = true,
            Choice::Glue(u, p) => self.tri.join(t, f, u, p).unwrap(),
            Choice::Fresh => {
                let u = self.used;
                self.used += 1;
                self.tri
                    .join(t, f, u, fresh_perm(f, self.spec.orientable))
                    .unwrap();
            }
        }
    }

    fn undo(&mut self, t: usize, f: usize, c: Choice) {
        match c {
            Choice::Boundary => self.open[t][f] = false,
            Choice::Glue(..) => {
                self.tri.unjoin(t, f);
            }
            Choice::Fresh => {
                self.tri.unjoin(t, f);
                self.used -= 1;
            }
        }
    }
}

#[derive(Clone, Copy, Debug)]
enum Choice {
    Boundary,
    Glue(usize, Perm4),
    Fresh,
}

/// Signatures of all triangulations matching `spec`, sorted.
pub fn enumerate_census(spec: &CensusSpec) -> Vec<String> {
    let n = spec.tetrahedra;
    if n == 0 {
        return Vec::new();
    }
    let root = Search {
        spec,
        tri: Triangulation::with_tetrahedra(n),
        used: 1,
        open: vec![[false; 4]; n],
    };
    // Split the search two levels deep for parallelism.
    let mut branches: Vec<Search> = Vec::new();
    let mut leaves = BTreeSet::new();
    let (t, f) = root.first_free().unwrap();
    for c in root.choices(t, f) {
        let mut s = Search {
            spec,
            tri: root.tri.clone(),
            used: root.used,
            open: root.open.clone(),
        };
        s.apply(t, f, c);
        match s.first_free() {
            None => s.run(&mut leaves),
            Some((t2, f2)) => {
                for c2 in s.choices(t2, f2) {
                    let mut s2 = Search {
                        spec,
                        tri: s.tri.clone(),
                        used: s.used,
                        open: s.open.clone(),
                    };
                    s2.apply(t2, f2, c2);
                    branches.push(s2);
                }
            }
        }
    }
    let sets: Vec<BTreeSet<String>> = branches
        .into_par_iter()
        .map(|mut s| {
            let mut found = BTreeSet::new();
            s.run(&mut found);
            found
        })
        .collect();
    for s in sets {
        leaves.extend(s);
    }
    leaves.into_iter().collect()
}

/// Every gluing table on `n` tetrahedra, with no symmetry reduction, reduced
/// to signatures. Only practical for `n <= 2`; used to check the census.
pub fn brute_force_census(spec: &CensusSpec) -> Vec<String> {
    let n = spec.tetrahedra;
    let mut found = BTreeSet::new();
    if n == 0 {
        return Vec::new();
    }
    fn rec(
        tri: &mut Triangulation,
        spec: &CensusSpec,
        open: &mut Vec<[bool; 4]>,
        found: &mut BTreeSet<String>,
    ) {
        let n = tri.size();
        let first = (0..n)
            .flat_map(|t| (0..4).map(move |f| (t, f)))
            .find(|&(t, f)| tri.gluing(t, f).is_none() && !open[t][f]);
        let Some((t, f)) = first else {
            if spec.accepts(tri) {
                found.insert(isosig::encode(tri));
            }
            return;
        };
        if !spec.closed {
            open[t][f] = true;
            rec(tri, spec, open, found);
            open[t][f] = false;
        }
        for u in 0..n {
            for g in 0..4 {
                if (u, g) <= (t, f) || tri.gluing(u, g).is_some() || open[u][g] {
                    continue;
                }
                for p in ALL_PERMS {
                    if p.apply(f) != g {
                        continue;
                    }
                    tri.join(t, f, u, p).unwrap();
                    rec(tri, spec, open, found);
                    tri.unjoin(t, f);
                }
            }
        }
    }
    let mut tri = Triangulation::with_tetrahedra(n);
    let mut open = vec![[false; 4]; n];
    rec(&mut tri, spec, &mut open, &mut found);
    found.into_iter().collect()
}
