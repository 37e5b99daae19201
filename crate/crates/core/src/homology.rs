//! First homology via a presentation read off the dual 1-skeleton, reduced
//! to Smith normal form over exact integers.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::triangulation::Triangulation;
use crate::union_find::UnionFind;

/// A finitely generated abelian group `Z^rank + Z_d1 + ... + Z_dk` with
/// `d1 | d2 | ... | dk` and every `di > 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct HomologySummary {
    pub rank: usize,
    pub torsion: Vec<BigInt>,
}

impl HomologySummary {
    pub fn trivial() -> Self {
        HomologySummary {
            rank: 0,
            torsion: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    /// Rank of the Z_2 torsion: the number of even invariant factors.
    pub fn t2(&self) -> usize {
        self.torsion.iter().filter(|d| d.is_even()).count()
    }

    /// Rank of the Z_3 torsion.
    pub fn t3(&self) -> usize {
        let three = BigInt::from(3);
        self.torsion.iter().filter(|d| (*d % &three).is_zero()).count()
    }

    /// The triple `(rank, t2, t3)` used to track connected sum summands.
    pub fn invariants(&self) -> (usize, usize, usize) {
        (self.rank, self.t2(), self.t3())
    }

    /// Builds the group from the invariant factors of a relation matrix with
    /// `generators` columns.
    pub fn from_invariant_factors(generators: usize, factors: &[BigInt]) -> Self {
        let nonzero = factors.iter().filter(|d| !d.is_zero()).count();
        let mut torsion: Vec<BigInt> = factors
            .iter()
            .filter(|d| !d.is_zero() && !d.is_one())
            .cloned()
            .collect();
        torsion.sort();
        HomologySummary {
            rank: generators - nonzero,
            torsion,
        }
    }
}

impl fmt::Display for HomologySummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        if self.rank == 1 {
            parts.push("Z".to_string());
        } else if self.rank > 1 {
            parts.push(format!("{} Z", self.rank));
        }
        let mut i = 0;
        while i < self.torsion.len() {
            let mut j = i;
            while j < self.torsion.len() && self.torsion[j] == self.torsion[i] {
                j += 1;
            }
            let mult = j - i;
            if mult > 1 {
                parts.push(format!("{} Z_{}", mult, self.torsion[i]));
            } else {
                parts.push(format!("Z_{}", self.torsion[i]));
            }
            i = j;
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The relation matrix presenting H_1: one column per dual edge outside a
/// spanning forest of the dual graph, one row per internal edge.
pub fn relation_matrix(tri: &Triangulation) -> (usize, Vec<Vec<i64>>) {
    let skel = tri.skeleton();
    let n = tri.size();
    // Spanning forest of the dual graph.
    let mut uf = UnionFind::new(n);
    let mut generator = vec![usize::MAX; skel.faces.len()];
    let mut gens = 0;
    for (fi, face) in skel.faces.iter().enumerate() {
        if face.is_boundary() {
            continue;
        }
        let (a, _) = face.embeddings[0];
        let (b, _) = face.embeddings[1];
        if !uf.union(a, b) {
            generator[fi] = gens;
            gens += 1;
        }
    }
    let mut rows = Vec::new();
    for edge in skel.edges.iter().filter(|e| !e.boundary) {
        let mut row = vec![0i64; gens];
        for emb in &edge.embeddings {
            let slot = (emb.tet, emb.perm.apply(2));
            let fi = skel.tet_faces[slot.0][slot.1];
            let g = generator[fi];
            if g == usize::MAX {
                continue;
            }
            if skel.faces[fi].embeddings[0] == slot {
                row[g] += 1;
            } else {
                row[g] -= 1;
            }
        }
        rows.push(row);
    }
    (gens, rows)
}

pub fn first_homology(tri: &Triangulation) -> Result<HomologySummary> {
    let c = tri.skeleton().classify();
    if !c.valid {
        return Err(Error::Precondition(
            "homology requires a valid triangulation".into(),
        ));
    }
    let (gens, rows) = relation_matrix(tri);
    let factors = invariant_factors(&rows, gens);
    Ok(HomologySummary::from_invariant_factors(gens, &factors))
}

/// Invariant factors (diagonal of the Smith normal form, zeros omitted) of an
/// integer matrix with `cols` columns.
pub fn invariant_factors(rows: &[Vec<i64>], cols: usize) -> Vec<BigInt> {
    let small: Vec<Vec<i128>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    if let Some(d) = smith_diagonal(small, cols) {
        return d.into_iter().map(BigInt::from).collect();
    }
    let big: Vec<Vec<BigInt>> = rows
        .iter()
        .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    smith_diagonal(big, cols).expect("arbitrary precision never overflows")
}

/// Exact Smith normal form diagonal. Returns `None` if an intermediate value
/// overflows `T`.
pub fn smith_diagonal<T>(mut m: Vec<Vec<T>>, cols: usize) -> Option<Vec<T>>
where
    T: Clone + Integer + Signed + CheckedAdd + CheckedSub + CheckedMul + ToPrimitive,
{
    let nrows = m.len();
    let mut diag = Vec::new();
    let mut k = 0;
    while k < nrows && k < cols {
        // Smallest nonzero entry in the remaining block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in k..nrows {
            for j in k..cols {
                if !m[i][j].is_zero()
                    && best.is_none_or(|(bi, bj)| m[i][j].abs() < m[bi][bj].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        m.swap(k, pi);
        for row in m.iter_mut() {
            row.swap(k, pj);
        }
        loop {
            let mut dirty = false;
            // Clear the column below the pivot.
            for i in (k + 1)..nrows {
                if m[i][k].is_zero() {
                    continue;
                }
                let q = m[i][k].div_floor(&m[k][k]);
                for j in k..cols {
                    let v = m[i][j].checked_sub(&q.checked_mul(&m[k][j])?)?;
                    m[i][j] = v;
                }
                if !m[i][k].is_zero() {
                    dirty = true;
                }
            }
            // Clear the row right of the pivot.
            for j in (k + 1)..cols {
                if m[k][j].is_zero() {
                    continue;
                }
                let q = m[k][j].div_floor(&m[k][k]);
                for i in k..nrows {
                    let v = m[i][j].checked_sub(&q.checked_mul(&m[i][k])?)?;
                    m[i][j] = v;
                }
                if !m[k][j].is_zero() {
                    dirty = true;
                }
            }
            if dirty {
                // Some remainder is smaller than the pivot; move it into place.
                let mut best = (k, k);
                for i in k..nrows {
                    if !m[i][k].is_zero() && m[i][k].abs() < m[best.0][best.1].abs() {
                        best = (i, k);
                    }
                }
                for j in k..cols {
                    if !m[k][j].is_zero() && m[k][j].abs() < m[best.0][best.1].abs() {
                        best = (k, j);
                    }
                }
                m.swap(k, best.0);
                for row in m.iter_mut() {
                    row.swap(k, best.1);
                }
                continue;
            }
            // Enforce divisibility of the remaining block by the pivot.
            let mut bad_row = None;
            'search: for i in (k + 1)..nrows {
                for j in (k + 1)..cols {
                    if !m[i][j].is_multiple_of(&m[k][k]) {
                        bad_row = Some(i);
                        break 'search;
                    }
                }
            }
            match bad_row {
                Some(i) => {
                    for j in k..cols {
                        let v = m[k][j].checked_add(&m[i][j])?;
                        m[k][j] = v;
                    }
                }
                None => break,
            }
        }
        diag.push(m[k][k].abs());
        k += 1;
    }
    Some(diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn snf_small_cases() {
        assert_eq!(invariant_factors(&[vec![2, 4], vec![6, 8]], 2), big(&[2, 4]));
        assert_eq!(invariant_factors(&[vec![4, 0], vec![0, 6]], 2), big(&[2, 12]));
        assert_eq!(invariant_factors(&[], 3), big(&[]));
        assert_eq!(invariant_factors(&[vec![0, 0]], 2), big(&[]));
    }

    #[test]
    fn rendering() {
        let g = HomologySummary::from_invariant_factors(3, &big(&[1, 2]));
        assert_eq!(g.to_string(), "Z + Z_2");
        let g = HomologySummary::from_invariant_factors(4, &big(&[2, 2]));
        assert_eq!(g.to_string(), "2 Z + 2 Z_2");
        assert_eq!(HomologySummary::trivial().to_string(), "0");
        let g = HomologySummary::from_invariant_factors(2, &big(&[6, 12]));
        assert_eq!((g.t2(), g.t3()), (2, 2));
    }

    #[test]
    fn rp3_and_ball() {
        assert_eq!(first_homology(&examples::rp3()).unwrap().to_string(), "Z_2");
        let ball = Triangulation::with_tetrahedra(1);
        assert!(first_homology(&ball).unwrap().is_trivial());
    }
}
