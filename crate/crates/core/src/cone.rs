//! Extreme rays of `{x : Ax = 0, x >= 0}` by the double description method.
//!
//! Rays are exact (arbitrary precision) and primitive. Adjacency of two rays
//! is decided combinatorially: they are adjacent iff no third ray vanishes
//! everywhere both of them vanish. That query is answered with a binary trie
//! over zero/non-zero patterns, or by a plain scan for cross-checking.

use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};

/// A fixed-length bitset.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    words: Vec<u64>,
    len: usize,
}

impl Bits {
    pub fn new(len: usize) -> Self {
        Bits {
            words: vec![0; len.div_ceil(64)],
            len,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn and(&self, other: &Bits) -> Bits {
        Bits {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
            len: self.len,
        }
    }

    pub fn or(&self, other: &Bits) -> Bits {
        Bits {
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
            len: self.len,
        }
    }

    /// Every bit of `self` is also set in `other`.
    pub fn is_subset(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    /// Index of the highest set bit.
    pub fn last(&self) -> Option<usize> {
        for (wi, &w) in self.words.iter().enumerate().rev() {
            if w != 0 {
                return Some(wi * 64 + 63 - w.leading_zeros() as usize);
            }
        }
        None
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.len).filter(move |&i| self.get(i))
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.len {
            write!(f, "{}", self.get(i) as u8)?;
        }
        Ok(())
    }
}

/// Predicate on the union of two rays' supports; `false` forbids combining
/// them.
pub type PairFilter = dyn Fn(&Bits) -> bool + Send + Sync;

#[derive(Clone)]
pub struct ConeProblem {
    pub dim: usize,
    pub rows: Vec<Vec<i64>>,
    pub filter: Option<Arc<PairFilter>>,
}

impl fmt::Debug for ConeProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ConeProblem")
            .field("dim", &self.dim)
            .field("rows", &self.rows)
            .field("filter", &self.filter.is_some())
            .finish()
    }
}

impl ConeProblem {
    pub fn new(dim: usize, rows: Vec<Vec<i64>>) -> Result<Self> {
        for r in &rows {
            if r.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: r.len(),
                });
            }
        }
        Ok(ConeProblem {
            dim,
            rows,
            filter: None,
        })
    }

    pub fn with_filter(mut self, filter: Arc<PairFilter>) -> Self {
        self.filter = Some(filter);
        self
    }

    fn allows(&self, support: &Bits) -> bool {
        self.filter.as_ref().is_none_or(|f| f(support))
    }
}

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Ray {
    pub coords: Vec<BigInt>,
}

impl fmt::Debug for Ray {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coords.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl Ray {
    pub fn from_i64(v: &[i64]) -> Ray {
        Ray {
            coords: v.iter().map(|&x| BigInt::from(x)).collect(),
        }
    }

    pub fn zero_set(&self) -> Bits {
        let mut b = Bits::new(self.coords.len());
        for (i, c) in self.coords.iter().enumerate() {
            if c.is_zero() {
                b.set(i);
            }
        }
        b
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

    /// Divides through by the gcd of the entries.
    pub fn normalise(&mut self) {
        let g = self
            .coords
            .iter()
            .fold(BigInt::zero(), |acc, c| acc.gcd(c));
        if !g.is_zero() && !g.is_one() {
            for c in self.coords.iter_mut() {
                *c /= &g;
            }
        }
    }

    pub fn dot(&self, row: &[i64]) -> BigInt {
        self.coords
            .iter()
            .zip(row)
            .filter(|(_, &a)| a != 0)
            .map(|(c, &a)| c * a)
            .sum()
    }
}

/// Binary trie over zero/non-zero patterns. Depth `i` branches on whether
/// coordinate `i` is zero; a ray is stored at the node for its last
/// non-zero coordinate, since everything below it is zero.
#[derive(Clone, Debug)]
pub struct RayTrie {
    dim: usize,
    nodes: Vec<TrieNode>,
}

#[derive(Clone, Debug, Default)]
struct TrieNode {
    /// Children for "coordinate is zero" and "coordinate is non-zero".
    child: [Option<usize>; 2],
    /// Rays in this subtree, including those stored here.
    count: usize,
    /// Rays whose last non-zero coordinate is this node's.
    here: usize,
}

impl RayTrie {
    pub fn new(dim: usize) -> Self {
        RayTrie {
            dim,
            nodes: vec![TrieNode::default()],
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn len(&self) -> usize {
        self.nodes[0].count
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn insert(&mut self, zero_set: &Bits) {
        let last_nonzero = (0..self.dim).rev().find(|&i| !zero_set.get(i));
        let mut node = 0;
        self.nodes[0].count += 1;
        if let Some(last) = last_nonzero {
            for i in 0..=last {
                let b = (!zero_set.get(i)) as usize;
                let next = match self.nodes[node].child[b] {
                    Some(c) => c,
                    None => {
                        self.nodes.push(TrieNode::default());
                        let c = self.nodes.len() - 1;
                        self.nodes[node].child[b] = Some(c);
                        c
                    }
                };
                node = next;
                self.nodes[node].count += 1;
            }
        }
        self.nodes[node].here += 1;
    }

    /// Number of stored rays vanishing on all of `zeros`, counting at most
    /// up to `cap`.
    pub fn count_containing(&self, zeros: &Bits, cap: usize) -> usize {
        let last = match zeros.last() {
            Some(l) => l,
            None => return self.len().min(cap),
        };
        let mut total = 0;
        // Stack of (node, depth of the coordinate this node branches on).
        let mut stack = vec![(0usize, 0usize)];
        while let Some((node, depth)) = stack.pop() {
            let nd = &self.nodes[node];
            if depth > last {
                total += nd.count;
            } else {
                total += nd.here;
                if let Some(z) = nd.child[0] {
                    stack.push((z, depth + 1));
                }
                if !zeros.get(depth) {
                    if let Some(nz) = nd.child[1] {
                        stack.push((nz, depth + 1));
                    }
                }
            }
            if total >= cap {
                return cap;
            }
        }
        total
    }

    /// Adjacency of two stored rays with zero sets `z1`, `z2`: no third ray
    /// vanishes on their common zero set.
    pub fn adjacent(&self, z1: &Bits, z2: &Bits) -> bool {
        self.count_containing(&z1.and(z2), 3) < 3
    }
}

/// Adjacency by scanning every other ray.
pub fn adjacent_by_scan(zero_sets: &[Bits], i: usize, j: usize) -> bool {
    let common = zero_sets[i].and(&zero_sets[j]);
    !zero_sets
        .iter()
        .enumerate()
        .any(|(k, z)| k != i && k != j && common.is_subset(z))
}

/// A set of rays with its trie, supporting adjacency queries by index.
#[derive(Clone, Debug)]
pub struct RaySet {
    pub rays: Vec<Ray>,
    zero_sets: Vec<Bits>,
    trie: RayTrie,
}

impl RaySet {
    pub fn new(dim: usize, rays: Vec<Ray>) -> Self {
        let zero_sets: Vec<Bits> = rays.iter().map(Ray::zero_set).collect();
        let mut trie = RayTrie::new(dim);
        for z in &zero_sets {
            trie.insert(z);
        }
        RaySet {
            rays,
            zero_sets,
            trie,
        }
    }

    pub fn adjacent(&self, i: usize, j: usize) -> Result<bool> {
        for k in [i, j] {
            if k >= self.rays.len() {
                return Err(Error::BadIndex {
                    what: "ray",
                    index: k,
                });
            }
        }
        Ok(self.trie.adjacent(&self.zero_sets[i], &self.zero_sets[j]))
    }

    pub fn adjacent_scan(&self, i: usize, j: usize) -> bool {
        adjacent_by_scan(&self.zero_sets, i, j)
    }

    pub fn trie(&self) -> &RayTrie {
        &self.trie
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Adjacency {
    #[default]
    Trie,
    Scan,
    /// Run both and count disagreements.
    CrossCheck,
}

#[derive(Clone, Debug, Default)]
pub struct DdOptions {
    pub adjacency: Adjacency,
    /// Order in which to intersect with the hyperplanes (default: as given).
    pub order: Option<Vec<usize>>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DdStats {
    pub pairs_tested: usize,
    pub adjacency_mismatches: usize,
    pub max_intermediate_rays: usize,
}

/// Incrementally maintained row space, for the dimension bound used to
/// discard pairs that cannot be adjacent.
struct RowSpace {
    basis: Vec<(usize, Vec<BigRational>)>,
}

impl RowSpace {
    fn add(&mut self, row: &[i64]) {
        let mut r: Vec<BigRational> = row.iter().map(|&x| BigRational::from_integer(x.into())).collect();
        for (pivot, b) in &self.basis {
            if !r[*pivot].is_zero() {
                let factor = r[*pivot].clone() / &b[*pivot];
                for (x, y) in r.iter_mut().zip(b) {
                    *x -= &factor * y;
                }
            }
        }
        if let Some(p) = r.iter().position(|x| !x.is_zero()) {
            self.basis.push((p, r));
        }
    }

    fn rank(&self) -> usize {
        self.basis.len()
    }
}

pub fn enumerate_extreme_rays(p: &ConeProblem) -> Result<Vec<Ray>> {
    Ok(enumerate_with(p, &DdOptions::default())?.0)
}

pub fn enumerate_with(p: &ConeProblem, opts: &DdOptions) -> Result<(Vec<Ray>, DdStats)> {
    enumerate_observed(p, opts, |_| {})
}

/// As [`enumerate_with`], calling `observe` with the ray set before each
/// hyperplane is applied.
pub fn enumerate_observed(
    p: &ConeProblem,
    opts: &DdOptions,
    mut observe: impl FnMut(&RaySet),
) -> Result<(Vec<Ray>, DdStats)> {
    let d = p.dim;
    for r in &p.rows {
        if r.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                found: r.len(),
            });
        }
    }
    let order: Vec<usize> = match &opts.order {
        Some(o) => o.clone(),
        None => (0..p.rows.len()).collect(),
    };
    let mut stats = DdStats::default();
    let mut rays: Vec<Ray> = (0..d)
        .map(|i| {
            let mut v = vec![BigInt::zero(); d];
            v[i] = BigInt::one();
            Ray { coords: v }
        })
        .filter(|r| p.allows(&r.support()))
        .collect();
    let mut space = RowSpace { basis: Vec::new() };
    for &ri in &order {
        let row = p.rows.get(ri).ok_or(Error::BadIndex {
            what: "hyperplane",
            index: ri,
        })?;
        let set = RaySet::new(d, rays);
        observe(&set);
        stats.max_intermediate_rays = stats.max_intermediate_rays.max(set.rays.len());
        let min_common = (d - space.rank()).saturating_sub(2);
        space.add(row);

        let values: Vec<BigInt> = set.rays.iter().map(|r| r.dot(row)).collect();
        let pos: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_positive()).collect();
        let neg: Vec<usize> = (0..values.len()).filter(|&i| values[i].is_negative()).collect();
        let mut next: Vec<Ray> = (0..values.len())
            .filter(|&i| values[i].is_zero())
            .map(|i| set.rays[i].clone())
            .collect();

        let results: Vec<(Vec<Ray>, usize, usize)> = pos
            .par_iter()
            .map(|&i| {
                let mut out = Vec::new();
                let mut tested = 0;
                let mut mismatches = 0;
                for &j in &neg {
                    let common = set.zero_sets[i].and(&set.zero_sets[j]);
                    if common.count() < min_common {
                        continue;
                    }
                    if !p.allows(&set.rays[i].support().or(&set.rays[j].support())) {
                        continue;
                    }
                    tested += 1;
                    let adj = match opts.adjacency {
                        Adjacency::Trie => set.trie.count_containing(&common, 3) < 3,
                        Adjacency::Scan => set.adjacent_scan(i, j),
                        Adjacency::CrossCheck => {
                            let a = set.trie.count_containing(&common, 3) < 3;
                            if a != set.adjacent_scan(i, j) {
                                mismatches += 1;
                            }
                            a
                        }
                    };
                    if !adj {
                        continue;
                    }
                    let vi = &values[i];
                    let vj = &values[j];
                    let mut r = Ray {
                        coords: set.rays[i]
                            .coords
                            .iter()
                            .zip(&set.rays[j].coords)
                            .map(|(a, b)| a * (-vj) + b * vi)
                            .collect(),
                    };
                    r.normalise();
                    out.push(r);
                }
                (out, tested, mismatches)
            })
            .collect();
        for (out, tested, mismatches) in results {
            next.extend(out);
            stats.pairs_tested += tested;
            stats.adjacency_mismatches += mismatches;
        }
        rays = next;
    }
    rays.sort();
    Ok((rays, stats))
}

/// Brute-force extreme rays: for every set of coordinates forced to zero,
/// check whether the solution space restricted to the remaining coordinates
/// is one-dimensional and spanned by a non-negative vector. Exponential in
/// the dimension; intended as a test oracle.
pub fn brute_force_extreme_rays(p: &ConeProblem) -> Vec<Ray> {
    let d = p.dim;
    let mut found = std::collections::BTreeSet::new();
    for mask in 1u64..(1u64 << d) {
        let support: Vec<usize> = (0..d).filter(|&i| mask >> i & 1 == 1).collect();
        if let Some(r) = one_dim_kernel(&p.rows, d, &support) {
            if r.coords.iter().all(|c| !c.is_negative())
                && support.iter().all(|&i| !r.coords[i].is_zero())
                && p.allows(&r.support())
            {
                found.insert(r);
            }
        }
    }
    found.into_iter().collect()
}

/// If the kernel of `rows` restricted to `support` columns is exactly one
/// dimensional, returns a primitive spanning vector with a positive entry.
fn one_dim_kernel(rows: &[Vec<i64>], d: usize, support: &[usize]) -> Option<Ray> {
    let k = support.len();
    let mut m: Vec<Vec<BigRational>> = rows
        .iter()
        .map(|r| {
            support
                .iter()
                .map(|&c| BigRational::from_integer(r[c].into()))
                .collect()
        })
        .collect();
    // Reduced row echelon form.
    let mut pivots = Vec::new();
    let mut row = 0;
    for col in 0..k {
        let Some(pr) = (row..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(row, pr);
        let inv = m[row][col].recip();
        for x in m[row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..m.len() {
            if r != row && !m[r][col].is_zero() {
                let f = m[r][col].clone();
                let pivot_row = m[row].clone();
                for (x, y) in m[r].iter_mut().zip(&pivot_row) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        row += 1;
    }
    if k - pivots.len() != 1 {
        return None;
    }
    let free = (0..k).find(|c| !pivots.contains(c)).unwrap();
    let mut sol = vec![BigRational::zero(); k];
    sol[free] = BigRational::one();
    for (r, &pc) in pivots.iter().enumerate() {
        sol[pc] = -m[r][free].clone();
    }
    // Clear denominators.
    let lcm = sol
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let mut coords = vec![BigInt::zero(); d];
    for (i, &c) in support.iter().enumerate() {
        coords[c] = (sol[i].clone() * BigRational::from_integer(lcm.clone())).to_integer();
    }
    let mut r = Ray { coords };
    if r.coords.iter().any(|c| c.is_negative()) {
        for c in r.coords.iter_mut() {
            *c = -c.clone();
        }
    }
    r.normalise();
    Some(r)
}
