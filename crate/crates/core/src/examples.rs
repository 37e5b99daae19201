//! Small standard triangulations used throughout tests, benches and the CLI.

use crate::perm::Perm4;
use crate::triangulation::Triangulation;

fn p(images: [u8; 4]) -> Perm4 {
    Perm4::new(images).expect("valid permutation")
}

/// The two-tetrahedron closed triangulation of real projective space.
pub fn rp3() -> Triangulation {
    let mut t = Triangulation::with_tetrahedra(2);
    t.join(0, 3, 1, Perm4::IDENTITY).unwrap();
    t.join(0, 2, 1, Perm4::IDENTITY).unwrap();
    t.join(0, 1, 1, p([1, 0, 3, 2])).unwrap();
    t.join(0, 0, 1, p([1, 0, 3, 2])).unwrap();
    t
}

/// A single tetrahedron with no gluings (a 3-ball).
pub fn tetrahedron() -> Triangulation {
    Triangulation::with_tetrahedra(1)
}

/// The standard two-tetrahedron ideal triangulation of the figure-eight
/// knot complement.
pub fn figure_eight() -> Triangulation {
    let mut t = Triangulation::with_tetrahedra(2);
    t.join(0, 0, 1, p([1, 3, 0, 2])).unwrap();
    t.join(0, 1, 1, p([2, 0, 3, 1])).unwrap();
    t.join(0, 2, 1, p([0, 3, 2, 1])).unwrap();
    t.join(0, 3, 1, p([2, 1, 0, 3])).unwrap();
    t
}
