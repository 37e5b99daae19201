//! Isomorphism signatures: canonical strings that are constant on
//! combinatorial isomorphism classes.
//!
//! Format (version `a`): the version character, then one block per connected
//! component, sorted and separated by `.`. A block is a width character `w`
//! (value 1..), the tetrahedron count in `w` digits, and then one action per
//! face visited in canonical order:
//!
//! * `a`: boundary face,
//! * `b`: glued to the next unseen tetrahedron by the identity,
//! * `c` followed by `w` digits of the target tetrahedron and one digit
//!   giving the gluing permutation's index.
//!
//! Faces already glued from an earlier action are skipped. Digits use the
//! alphabet `a-z A-Z 0-9 + -`, least significant first.

use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::perm::{Perm4, ALL_PERMS};
use crate::triangulation::Triangulation;

pub const VERSION: char = 'a';

const ALPHABET: &[u8; 64] = b"abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789+-";

fn digit_value(c: u8) -> Option<usize> {
    ALPHABET.iter().position(|&a| a == c)
}

const BOUNDARY: u32 = 0;
const NEW_TET: u32 = 1;
const GLUE: u32 = 2;

/// Canonical action sequence of one connected triangulation starting from
/// tetrahedron `start` with vertex labelling `start_perm`, aborting as soon as
/// it compares greater than `best`.
fn actions_from(
    tri: &Triangulation,
    start: usize,
    start_perm: Perm4,
    best: Option<&[u32]>,
    out: &mut Vec<u32>,
) -> bool {
    let n = tri.size();
    out.clear();
    let mut new_of_old = vec![usize::MAX; n];
    let mut old_of_new = Vec::with_capacity(n);
    // sigma[k] maps new vertex labels of tetrahedron k to old labels.
    let mut sigma = Vec::with_capacity(n);
    new_of_old[start] = 0;
    old_of_new.push(start);
    sigma.push(start_perm);
    let mut less = best.is_none();
    let push = |x: u32, out: &mut Vec<u32>, less: &mut bool| -> bool {
        if !*less {
            let b = best.unwrap();
            let pos = out.len();
            match b.get(pos).map(|&y| x.cmp(&y)) {
                Some(Ordering::Greater) => return false,
                Some(Ordering::Less) | None => *less = true,
                Some(Ordering::Equal) => {}
            }
        }
        out.push(x);
        true
    };
    let mut k = 0;
    while k < old_of_new.len() {
        let t = old_of_new[k];
        let s = sigma[k];
        for f in 0..4 {
            let of = s.apply(f);
            match tri.gluing(t, of) {
                None => {
                    if !push(BOUNDARY, out, &mut less) {
                        return false;
                    }
                }
                Some(g) => {
                    let dest_new = new_of_old[g.tet];
                    if dest_new == usize::MAX {
                        let m = old_of_new.len();
                        new_of_old[g.tet] = m;
                        old_of_new.push(g.tet);
                        sigma.push(g.perm * s);
                        if !push(NEW_TET, out, &mut less) {
                            return false;
                        }
                    } else {
                        let p = sigma[dest_new].inverse() * g.perm * s;
                        let back_face = p.apply(f);
                        if (dest_new, back_face) < (k, f) {
                            continue;
                        }
                        if !push(GLUE, out, &mut less)
                            || !push(dest_new as u32, out, &mut less)
                            || !push(p.index() as u32, out, &mut less)
                        {
                            return false;
                        }
                    }
                }
            }
        }
        k += 1;
    }
    // Equal sequences are not an improvement.
    less
}

fn width_for(n: usize) -> usize {
    let mut w = 1;
    while n >= 64usize.pow(w as u32) {
        w += 1;
    }
    w
}

fn push_number(s: &mut String, mut x: usize, width: usize) {
    for _ in 0..width {
        s.push(ALPHABET[x % 64] as char);
        x /= 64;
    }
}

fn encode_connected(tri: &Triangulation) -> String {
    let n = tri.size();
    let mut best: Option<Vec<u32>> = None;
    let mut buf = Vec::with_capacity(8 * n);
    for start in 0..n {
        for p in ALL_PERMS {
            if actions_from(tri, start, p, best.as_deref(), &mut buf) {
                best = Some(buf.clone());
            }
        }
    }
    let best = best.unwrap_or_default();
    let w = width_for(n);
    let mut s = String::new();
    s.push(ALPHABET[w] as char);
    push_number(&mut s, n, w);
    let mut i = 0;
    while i < best.len() {
        match best[i] {
            BOUNDARY => s.push('a'),
            NEW_TET => s.push('b'),
            _ => {
                s.push('c');
                push_number(&mut s, best[i + 1] as usize, w);
                s.push(ALPHABET[best[i + 2] as usize] as char);
                i += 2;
            }
        }
        i += 1;
    }
    s
}

/// The isomorphism signature of `tri`.
pub fn encode(tri: &Triangulation) -> String {
    let mut blocks: Vec<String> = tri
        .split_components()
        .iter()
        .map(encode_connected)
        .collect();
    blocks.sort();
    let mut s = String::new();
    s.push(VERSION);
    s.push_str(&blocks.join("."));
    s
}

fn malformed(msg: &str) -> Error {
    Error::MalformedSignature(msg.to_string())
}

fn decode_block(block: &[u8], out: &mut Triangulation) -> Result<()> {
    let mut pos = 0;
    let mut next = |what: &str| -> Result<usize> {
        let c = *block
            .get(pos)
            .ok_or_else(|| malformed(&format!("truncated while reading {what}")))?;
        pos += 1;
        digit_value(c).ok_or_else(|| malformed(&format!("bad character {:?}", c as char)))
    };
    let w = next("width")?;
    if w == 0 || w > 4 {
        return Err(malformed("bad width"));
    }
    let read_number = |next: &mut dyn FnMut(&str) -> Result<usize>| -> Result<usize> {
        let mut x = 0usize;
        let mut scale = 1usize;
        for _ in 0..w {
            x += next("number")? * scale;
            scale *= 64;
        }
        Ok(x)
    };
    let n = read_number(&mut next)?;
    if n == 0 {
        return Err(malformed("component with no tetrahedra"));
    }
    let base = out.size();
    out.add_tetrahedron();
    let mut introduced = 1;
    let mut k = 0;
    while k < introduced {
        for f in 0..4 {
            if out.gluing(base + k, f).is_some() {
                continue;
            }
            match next("action")? {
                0 => {}
                1 => {
                    if introduced >= n {
                        return Err(malformed("more tetrahedra than declared"));
                    }
                    let m = out.add_tetrahedron();
                    introduced += 1;
                    out.join(base + k, f, m, Perm4::IDENTITY)
                        .map_err(|e| malformed(&e.to_string()))?;
                }
                2 => {
                    let dest = read_number(&mut next)?;
                    let pi = next("permutation")?;
                    if dest >= introduced || pi >= 24 {
                        return Err(malformed("gluing target out of range"));
                    }
                    out.join(base + k, f, base + dest, ALL_PERMS[pi])
                        .map_err(|e| malformed(&e.to_string()))?;
                }
                _ => return Err(malformed("unknown action")),
            }
        }
        k += 1;
    }
    if introduced != n {
        return Err(malformed("fewer tetrahedra than declared"));
    }
    if pos != block.len() {
        return Err(malformed("trailing characters"));
    }
    Ok(())
}

pub fn decode(sig: &str) -> Result<Triangulation> {
    let bytes = sig.trim().as_bytes();
    let (&v, rest) = bytes.split_first().ok_or_else(|| malformed("empty string"))?;
    if digit_value(v).is_none() {
        return Err(malformed(&format!("bad character {:?}", v as char)));
    }
    if v as char != VERSION {
        return Err(Error::UnsupportedVersion(v as char));
    }
    let mut out = Triangulation::new();
    if rest.is_empty() {
        return Ok(out);
    }
    for block in rest.split(|&c| c == b'.') {
        decode_block(block, &mut out)?;
    }
    Ok(out)
}

pub fn is_isomorphic(a: &Triangulation, b: &Triangulation) -> bool {
    a.size() == b.size() && encode(a) == encode(b)
}
