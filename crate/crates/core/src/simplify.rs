//! Simplification: a fast greedy heuristic with random 4-4 moves and book
//! moves, and an exhaustive breadth-first search through one-vertex
//! triangulations connected by 2-3 and 3-2 moves.

use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::isosig;
use crate::moves::{enumerate_moves_with, first_move_with, perform_move, Move, MoveKind};
use crate::triangulation::Triangulation;

/// Greedy moves in priority order; each group is tried in full before the
/// next.
const GREEDY: [&[MoveKind]; 4] = [
    &[MoveKind::CollapseEdge],
    &[MoveKind::Pachner32, MoveKind::TwoZeroEdge, MoveKind::TwoOneEdge],
    &[MoveKind::TwoZeroVertex],
    &[MoveKind::Shell],
];

#[derive(Clone, Debug)]
pub struct SimplifyOptions {
    pub seed: u64,
    /// Random 4-4 moves allowed per phase, as a multiple of the largest
    /// number of 4-4 moves seen available during the phase.
    pub four_four_coefficient: usize,
}

impl Default for SimplifyOptions {
    fn default() -> Self {
        SimplifyOptions {
            seed: 0,
            four_four_coefficient: 5,
        }
    }
}

#[derive(Clone, Debug)]
pub struct SimplifyReport {
    pub initial_n: usize,
    pub final_n: usize,
    /// Every move applied, in order; replaying them from the input gives
    /// `result` exactly.
    pub moves_applied: Vec<Move>,
    pub rng_seed: u64,
    pub result: Triangulation,
}

impl SimplifyReport {
    pub fn move_kinds(&self) -> Vec<MoveKind> {
        self.moves_applied.iter().map(Move::kind).collect()
    }
}

/// Applies `moves` in order.
pub fn replay(tri: &Triangulation, moves: &[Move]) -> Result<Triangulation> {
    let mut t = tri.clone();
    for m in moves {
        t = perform_move(&t, m)?;
    }
    Ok(t)
}

fn greedy_step(tri: &Triangulation) -> Option<(Move, Triangulation)> {
    let skel = tri.skeleton();
    GREEDY.iter().find_map(|kinds| first_move_with(tri, &skel, kinds))
}

pub fn simplify_fast(tri: &Triangulation, seed: u64) -> Result<SimplifyReport> {
    simplify_fast_with(
        tri,
        &SimplifyOptions {
            seed,
            ..SimplifyOptions::default()
        },
    )
}

pub fn simplify_fast_with(tri: &Triangulation, opts: &SimplifyOptions) -> Result<SimplifyReport> {
    if !tri.skeleton().classify().valid {
        return Err(Error::Precondition("cannot simplify an invalid triangulation".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut cur = tri.clone();
    let mut moves = Vec::new();
    'outer: loop {
        // Greedy reduction.
        while let Some((m, next)) = greedy_step(&cur) {
            moves.push(m);
            cur = next;
        }

        // Random 4-4 moves, abandoned as soon as a greedy move appears.
        let mut most_seen = 0;
        let mut made = 0;
        loop {
            let skel = cur.skeleton();
            let available = enumerate_moves_with(&cur, &skel, &[MoveKind::FourFour]);
            most_seen = most_seen.max(available.len());
            if available.is_empty() || made >= opts.four_four_coefficient * most_seen {
                break;
            }
            let m = *available.choose(&mut rng).unwrap();
            cur = crate::moves::perform_move_with(&cur, &skel, &m)?;
            moves.push(m);
            made += 1;
            if greedy_step(&cur).is_some() {
                continue 'outer;
            }
        }

        // Book openings, kept only if they let an edge collapse.
        if cur.has_boundary_faces() {
            let mut scratch = cur.clone();
            let mut opened = Vec::new();
            loop {
                let skel = scratch.skeleton();
                match first_move_with(&scratch, &skel, &[MoveKind::BookOpen]) {
                    Some((m, next)) => {
                        opened.push(m);
                        scratch = next;
                    }
                    None => break,
                }
            }
            if !opened.is_empty() {
                let skel = scratch.skeleton();
                if let Some((m, next)) = first_move_with(&scratch, &skel, &[MoveKind::CollapseEdge]) {
                    moves.extend(opened);
                    moves.push(m);
                    cur = next;
                    continue 'outer;
                }
            }
        }

        // One book closing, then start again.
        let skel = cur.skeleton();
        match first_move_with(&cur, &skel, &[MoveKind::BookClose]) {
            Some((m, next)) => {
                moves.push(m);
                cur = next;
            }
            None => break,
        }
    }
    Ok(SimplifyReport {
        initial_n: tri.size(),
        final_n: cur.size(),
        moves_applied: moves,
        rng_seed: opts.seed,
        result: cur,
    })
}

#[derive(Clone, Debug)]
pub struct ExhaustiveOptions {
    pub height: usize,
    /// Stop after this many distinct nodes (reported as not reduced).
    pub max_nodes: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug)]
pub struct ExhaustiveReport {
    /// Moves from the input: the search path, then the fast
    /// simplification of the node found.
    pub report: SimplifyReport,
    /// Whether a node below the starting level was reached. If not, a
    /// larger height may help.
    pub reduced: bool,
    pub nodes_visited: usize,
    /// Number of nodes seen at each level (level = tetrahedron count).
    pub level_sizes: Vec<usize>,
    /// The node limit was hit before the search finished.
    pub truncated: bool,
}

/// A node of the search: its triangulation as reached along the recorded
/// path, so that moves found from it replay exactly.
struct Node {
    sig: String,
    tri: Triangulation,
}

/// Breadth-first search from `tri` through one-vertex triangulations
/// related by 2-3 and 3-2 moves, restricted to at most `n + height`
/// tetrahedra, stopping at the first node with fewer than `n`.
pub fn simplify_exhaustive(tri: &Triangulation, opts: &ExhaustiveOptions) -> Result<ExhaustiveReport> {
    let skel = tri.skeleton();
    let c = skel.classify();
    if !c.valid || !c.closed || !c.connected {
        return Err(Error::Precondition("needs a closed connected triangulation".into()));
    }
    if skel.vertices.len() != 1 {
        return Err(Error::Precondition("needs a one-vertex triangulation".into()));
    }
    let n = tri.size();
    let ceiling = n + opts.height;
    let start = isosig::encode(tri);
    // Child signature -> (parent signature, move applied to the parent).
    let mut parent: HashMap<String, Option<(String, Move)>> = HashMap::new();
    parent.insert(start.clone(), None);
    let mut level_sizes = vec![0usize; ceiling + 1];
    level_sizes[n] = 1;
    let mut frontier = vec![Node {
        sig: start,
        tri: tri.clone(),
    }];
    let mut found: Option<Node> = None;
    let mut truncated = false;
    'search: while !frontier.is_empty() {
        let expanded: Vec<Vec<(Move, Node)>> = frontier
            .par_iter()
            .map(|node| {
                let skel = node.tri.skeleton();
                let mut kinds = vec![MoveKind::Pachner32];
                if node.tri.size() < ceiling {
                    kinds.push(MoveKind::Pachner23);
                }
                enumerate_moves_with(&node.tri, &skel, &kinds)
                    .into_iter()
                    .filter_map(|m| {
                        let t = crate::moves::perform_move_with(&node.tri, &skel, &m).ok()?;
                        Some((
                            m,
                            Node {
                                sig: isosig::encode(&t),
                                tri: t,
                            },
                        ))
                    })
                    .collect()
            })
            .collect();
        let mut next = Vec::new();
        for (node, children) in frontier.iter().zip(expanded) {
            for (m, child) in children {
                if parent.contains_key(&child.sig) {
                    continue;
                }
                parent.insert(child.sig.clone(), Some((node.sig.clone(), m)));
                level_sizes[child.tri.size()] += 1;
                if child.tri.size() < n {
                    found = Some(child);
                    break 'search;
                }
                if opts.max_nodes.is_some_and(|cap| parent.len() >= cap) {
                    truncated = true;
                    break 'search;
                }
                next.push(child);
            }
        }
        frontier = next;
    }
    let nodes_visited = parent.len();
    let Some(found) = found else {
        return Ok(ExhaustiveReport {
            report: SimplifyReport {
                initial_n: n,
                final_n: n,
                moves_applied: Vec::new(),
                rng_seed: opts.seed,
                result: tri.clone(),
            },
            reduced: false,
            nodes_visited,
            level_sizes,
            truncated,
        });
    };
    let mut path = Vec::new();
    let mut sig = found.sig.clone();
    while let Some(Some((p, m))) = parent.get(&sig) {
        path.push(*m);
        sig = p.clone();
    }
    path.reverse();
    let fast = simplify_fast(&found.tri, opts.seed)?;
    path.extend(fast.moves_applied);
    Ok(ExhaustiveReport {
        report: SimplifyReport {
            initial_n: n,
            final_n: fast.final_n,
            moves_applied: path,
            rng_seed: opts.seed,
            result: fast.result,
        },
        reduced: true,
        nodes_visited,
        level_sizes,
        truncated: false,
    })
}

/// Applies `k` random 2-3 moves.
pub fn inflate(tri: &Triangulation, k: usize, seed: u64) -> Result<Triangulation> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = tri.clone();
    for _ in 0..k {
        let skel = t.skeleton();
        let avail = enumerate_moves_with(&t, &skel, &[MoveKind::Pachner23]);
        let Some(m) = avail.choose(&mut rng) else { break };
        t = crate::moves::perform_move_with(&t, &skel, m)?;
    }
    Ok(t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::examples;
    use crate::homology::first_homology;

    #[test]
    fn rp3_is_already_minimal() {
        let r = simplify_fast(&examples::rp3(), 1).unwrap();
        assert_eq!(r.final_n, 2);
    }

    #[test]
    fn single_tetrahedron_keeps_one_tetrahedron() {
        // No move removes it; a book closing may still fold two faces.
        let r = simplify_fast(&examples::tetrahedron(), 1).unwrap();
        assert_eq!(r.final_n, 1);
        assert!(r.moves_applied.iter().all(|m| m.kind() == MoveKind::BookClose));
        let c = r.result.skeleton().classify();
        assert!(c.valid && c.bounded && c.orientable);
    }

    #[test]
    fn undoes_a_two_three_move() {
        let t = inflate(&examples::rp3(), 1, 3).unwrap();
        assert_eq!(t.size(), 3);
        let r = simplify_fast(&t, 3).unwrap();
        assert_eq!(r.final_n, 2);
        assert_eq!(first_homology(&r.result).unwrap().to_string(), "Z_2");
    }

    #[test]
    fn replay_reproduces_result() {
        let t = inflate(&examples::rp3().barycentric_subdivision(), 0, 0).unwrap();
        let r = simplify_fast(&t, 7).unwrap();
        let again = replay(&t, &r.moves_applied).unwrap();
        assert_eq!(again, r.result);
        assert!(r.final_n < 48);
    }
}
