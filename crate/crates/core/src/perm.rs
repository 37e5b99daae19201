use std::fmt;

/// A permutation of `{0, 1, 2, 3}`, stored as its images.
///
/// `p[i]` is the image of `i`. Composition follows function notation:
/// `(a * b)[i] == a[b[i]]`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Perm4([u8; 4]);

/// All 24 permutations in lexicographic order of their image arrays.
pub const ALL_PERMS: [Perm4; 24] = {
    let mut out = [Perm4([0, 1, 2, 3]); 24];
    let mut idx = 0;
    let mut a = 0;
    while a < 4 {
        let mut b = 0;
        while b < 4 {
            let mut c = 0;
            while c < 4 {
                if a != b && a != c && b != c {
                    let d = 6 - a - b - c;
                    out[idx] = Perm4([a, b, c, d]);
                    idx += 1;
                }
                c += 1;
            }
            b += 1;
        }
        a += 1;
    }
    out
};

impl Perm4 {
    pub const IDENTITY: Perm4 = Perm4([0, 1, 2, 3]);

    /// Builds a permutation from its images, returning `None` unless the
    /// images are a bijection on `{0,1,2,3}`.
    pub fn new(images: [u8; 4]) -> Option<Perm4> {
        let mut seen = [false; 4];
        for &x in &images {
            if x > 3 || seen[x as usize] {
                return None;
            }
            seen[x as usize] = true;
        }
        Some(Perm4(images))
    }

    pub fn transposition(a: usize, b: usize) -> Perm4 {
        let mut p = [0u8, 1, 2, 3];
        p.swap(a, b);
        Perm4(p)
    }

    pub fn images(&self) -> [u8; 4] {
        self.0
    }

    #[inline]
    pub fn apply(&self, i: usize) -> usize {
        self.0[i] as usize
    }

    pub fn inverse(&self) -> Perm4 {
        let mut inv = [0u8; 4];
        for i in 0..4 {
            inv[self.0[i] as usize] = i as u8;
        }
        Perm4(inv)
    }

    /// `self ∘ other`.
    #[inline]
    pub fn compose(&self, other: &Perm4) -> Perm4 {
        Perm4([
            self.0[other.0[0] as usize],
            self.0[other.0[1] as usize],
            self.0[other.0[2] as usize],
            self.0[other.0[3] as usize],
        ])
    }

    /// +1 for even permutations, -1 for odd.
    pub fn sign(&self) -> i32 {
        let mut inversions = 0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                if self.0[i] > self.0[j] {
                    inversions += 1;
                }
            }
        }
        if inversions % 2 == 0 {
            1
        } else {
            -1
        }
    }

    pub fn is_even(&self) -> bool {
        self.sign() == 1
    }

    /// Position of this permutation in [`ALL_PERMS`].
    pub fn index(&self) -> usize {
        let a = self.0[0] as usize;
        let b = self.0[1] as usize;
        let c = self.0[2] as usize;
        let rb = b - (b > a) as usize;
        let rc = c - (c > a) as usize - (c > b) as usize;
        a * 6 + rb * 2 + rc
    }

    pub fn from_index(i: usize) -> Perm4 {
        ALL_PERMS[i]
    }
}

impl std::ops::Mul for Perm4 {
    type Output = Perm4;
    fn mul(self, rhs: Perm4) -> Perm4 {
        self.compose(&rhs)
    }
}

impl std::ops::Index<usize> for Perm4 {
    type Output = u8;
    fn index(&self, i: usize) -> &u8 {
        &self.0[i]
    }
}

impl fmt::Debug for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}{}{}", self.0[0], self.0[1], self.0[2], self.0[3])
    }
}

impl fmt::Display for Perm4 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Vertex pairs of the six edges of a tetrahedron: 01, 02, 03, 12, 13, 23.
pub const EDGE_VERTICES: [[usize; 2]; 6] = [[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]];

/// `EDGE_NUMBER[a][b]` is the edge joining vertices `a` and `b` (a != b).
pub const EDGE_NUMBER: [[usize; 4]; 4] = [
    [usize::MAX, 0, 1, 2],
    [0, usize::MAX, 3, 4],
    [1, 3, usize::MAX, 5],
    [2, 4, 5, usize::MAX],
];

/// `QUAD_PARTNER[q][v]` is the vertex on the same side as `v` of a
/// quadrilateral of type `q`. Type 0 splits 01|23, type 1 splits 02|13 and
/// type 2 splits 03|12.
pub const QUAD_PARTNER: [[usize; 4]; 3] = [[1, 0, 3, 2], [2, 3, 0, 1], [3, 2, 1, 0]];

/// The quadrilateral type that keeps vertices `a` and `b` on the same side.
pub fn quad_pairing(a: usize, b: usize) -> usize {
    debug_assert!(a != b);
    (0..3).find(|&q| QUAD_PARTNER[q][a] == b).unwrap()
}
