//! Decision procedures built on crushing: 0-efficiency, 3-sphere and
//! 3-ball recognition, and connected sum decomposition.
//!
//! Crushing a normal sphere may silently delete S²×S¹, RP³ and L(3,1)
//! summands, so homology is used both as an entry gate (for the 3-sphere)
//! and as a final correction (for the decomposition).

use crate::error::{Error, Result};
use crate::homology::first_homology;
use crate::isosig;
use crate::normal::{crush, find_almost_normal_sphere, find_nontrivial_normal_sphere};
use crate::simplify::simplify_fast;
use crate::triangulation::Triangulation;

/// Seed used for the internal simplification calls.
const SEED: u64 = 0;

/// (rank, Z_2 rank, Z_3 rank) of first homology.
pub type HomologyRanks = (usize, usize, usize);

fn ranks(t: &Triangulation) -> Result<HomologyRanks> {
    Ok(first_homology(t)?.invariants())
}

fn add(a: HomologyRanks, b: HomologyRanks) -> HomologyRanks {
    (a.0 + b.0, a.1 + b.1, a.2 + b.2)
}

fn simplified(t: &Triangulation) -> Result<Triangulation> {
    Ok(simplify_fast(t, SEED)?.result)
}

/// Whether the only normal 2-spheres are vertex links.
pub fn is_zero_efficient(tri: &Triangulation) -> Result<bool> {
    let c = tri.skeleton().classify();
    if !c.valid || !c.closed || !c.orientable {
        return Err(Error::Precondition(
            "0-efficiency needs a closed orientable triangulation".into(),
        ));
    }
    Ok(find_nontrivial_normal_sphere(tri)?.is_none())
}

/// What happened while processing the list of pieces.
#[derive(Clone, Debug, Default)]
pub struct Trace {
    /// Homology ranks before and after each crush (summed over the
    /// resulting components).
    pub crushes: Vec<(HomologyRanks, HomologyRanks)>,
    /// Signatures of multi-vertex pieces with no normal sphere, which the
    /// algorithm drops without a verdict.
    pub dropped: Vec<String>,
    /// Signatures of one-vertex pieces with no normal sphere in which an
    /// almost normal sphere was found.
    pub spheres_confirmed: Vec<String>,
}

/// Outcome of examining one piece with no normal sphere left to crush.
enum Leftover {
    /// A one-vertex piece with an almost normal sphere: a 3-sphere.
    Sphere,
    /// A one-vertex piece with no almost normal sphere: not a 3-sphere.
    NotSphere,
    /// A multi-vertex piece: no further test applies.
    Unknown,
}

fn examine_leftover(n: &Triangulation, trace: &mut Trace) -> Result<Leftover> {
    if n.skeleton().vertices.len() != 1 {
        trace.dropped.push(isosig::encode(n));
        return Ok(Leftover::Unknown);
    }
    if find_almost_normal_sphere(n)?.is_some() {
        trace.spheres_confirmed.push(isosig::encode(n));
        Ok(Leftover::Sphere)
    } else {
        Ok(Leftover::NotSphere)
    }
}

/// Crushes `n` along `sphere` and returns the simplified non-empty
/// components.
fn crush_and_split(
    n: &Triangulation,
    sphere: &crate::normal::SurfaceVector,
    trace: &mut Trace,
) -> Result<Vec<Triangulation>> {
    let before = ranks(n)?;
    let crushed = crush(n, sphere)?;
    if crushed.size() >= n.size() {
        return Err(Error::Internal("crushing did not reduce the size".into()));
    }
    let mut out = Vec::new();
    let mut after = (0, 0, 0);
    for c in crushed.split_components() {
        let c = simplified(&c)?;
        after = add(after, ranks(&c)?);
        out.push(c);
    }
    trace.crushes.push((before, after));
    Ok(out)
}

pub fn is_three_sphere(tri: &Triangulation) -> Result<bool> {
    Ok(is_three_sphere_traced(tri)?.0)
}

pub fn is_three_sphere_traced(tri: &Triangulation) -> Result<(bool, Trace)> {
    let mut trace = Trace::default();
    let c = tri.skeleton().classify();
    if tri.is_empty() || !c.valid || !c.closed || !c.connected || !c.orientable {
        return Ok((false, trace));
    }
    let t = simplified(tri)?;
    if !first_homology(&t)?.is_trivial() {
        return Ok((false, trace));
    }
    let mut list = vec![t];
    while let Some(n) = list.pop() {
        match find_nontrivial_normal_sphere(&n)? {
            Some(sphere) => list.extend(crush_and_split(&n, &sphere, &mut trace)?),
            None => {
                if let Leftover::NotSphere = examine_leftover(&n, &mut trace)? {
                    return Ok((false, trace));
                }
            }
        }
    }
    Ok((true, trace))
}

pub fn is_ball(tri: &Triangulation) -> Result<bool> {
    let skel = tri.skeleton();
    let c = skel.classify();
    if tri.is_empty() || !c.valid || c.ideal || !c.connected || !c.orientable {
        return Ok(false);
    }
    if skel.boundary_components.len() != 1 || skel.boundary_components[0].euler_char() != 2 {
        return Ok(false);
    }
    let t = simplified(tri)?;
    let coned = simplified(&t.cone_boundary()?)?;
    is_three_sphere(&coned)
}

#[derive(Clone, Debug, Default)]
pub struct DecompositionResult {
    pub summands: Vec<Triangulation>,
    /// Copies of S²×S¹, RP³ and L(3,1) added so that homology ranks add up.
    pub s2xs1: usize,
    pub rp3: usize,
    pub l31: usize,
    pub trace: Trace,
}

impl DecompositionResult {
    pub fn is_empty(&self) -> bool {
        self.summands.is_empty() && self.s2xs1 == 0 && self.rp3 == 0 && self.l31 == 0
    }

    /// `connected-sum: [sig, ...] + k×S2xS1 + m×RP3 + j×L(3,1)`, or `S3`
    /// when there are no summands.
    pub fn render(&self) -> String {
        if self.is_empty() {
            return "S3".into();
        }
        let sigs: Vec<String> = self.summands.iter().map(isosig::encode).collect();
        format!(
            "connected-sum: [{}] + {}×S2xS1 + {}×RP3 + {}×L(3,1)",
            sigs.join(", "),
            self.s2xs1,
            self.rp3,
            self.l31
        )
    }
}

pub fn connected_sum_decomposition(tri: &Triangulation) -> Result<DecompositionResult> {
    let c = tri.skeleton().classify();
    if tri.is_empty() || !c.valid || !c.closed || !c.connected || !c.orientable {
        return Err(Error::Precondition(
            "decomposition needs a closed connected orientable triangulation".into(),
        ));
    }
    let t = simplified(tri)?;
    let (r, t2, t3) = ranks(&t)?;
    let mut trace = Trace::default();
    let mut list = vec![t];
    let mut out = Vec::new();
    while let Some(n) = list.pop() {
        match find_nontrivial_normal_sphere(&n)? {
            Some(sphere) => list.extend(crush_and_split(&n, &sphere, &mut trace)?),
            None => {
                if !first_homology(&n)?.is_trivial() {
                    out.push(n);
                } else if let Leftover::NotSphere = examine_leftover(&n, &mut trace)? {
                    out.push(n);
                }
            }
        }
    }
    let found = out.iter().try_fold((0, 0, 0), |acc, s| Ok::<_, Error>(add(acc, ranks(s)?)))?;
    if found.0 > r || found.1 > t2 || found.2 > t3 {
        return Err(Error::Internal("summand homology exceeds the input's".into()));
    }
    Ok(DecompositionResult {
        summands: out,
        s2xs1: r - found.0,
        rp3: t2 - found.1,
        l31: t3 - found.2,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    #[test]
    fn rp3() {
        let t = examples::rp3();
        assert!(!is_zero_efficient(&t).unwrap());
        assert!(!is_three_sphere(&t).unwrap());
        assert!(!is_ball(&t).unwrap());
        let d = connected_sum_decomposition(&t).unwrap();
        let t2: usize = d.summands.iter().map(|s| ranks(s).unwrap().1).sum::<usize>() + d.rp3;
        assert_eq!(t2, 1);
        assert_eq!(d.summands.len() + d.rp3, 1);
    }

    #[test]
    fn cone_on_tetrahedron_is_sphere() {
        let s = examples::tetrahedron().cone_boundary().unwrap();
        assert!(is_three_sphere(&s).unwrap());
        assert!(connected_sum_decomposition(&s).unwrap().is_empty());
    }

    #[test]
    fn tetrahedron_is_ball() {
        assert!(is_ball(&examples::tetrahedron()).unwrap());
        assert!(!is_three_sphere(&examples::tetrahedron()).unwrap());
    }

    #[test]
    fn two_boundary_components_is_not_ball() {
        // Two separate tetrahedra: disconnected, and two boundary spheres.
        let t = Triangulation::with_tetrahedra(2);
        assert!(!is_ball(&t).unwrap());
    }
}
