//! Exact chord arrangements in the disk.
//!
//! The 2n boundary stubs are placed in convex position (on a parabola, so all
//! coordinates stay rational); a chord per strand runs straight between its
//! stubs. Two chords cross exactly when their stub pairs interleave, which
//! realizes any lens-free wiring diagram. The complementary faces two-color
//! with the terminal arcs shaded, giving the reduced graph: shaded faces are
//! nodes, and the two opposite shaded faces at each crossing carry an edge.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Signed, Zero};

use crate::error::Error;

type Coord = (BigRational, BigRational);

fn rat(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeKind {
    /// segment of chord `ci`
    Chord(usize),
    /// boundary arc from stub s to its clockwise successor
    Arc(u32),
}

#[derive(Debug, Clone)]
struct AEdge {
    u: usize,
    v: usize,
    kind: EdgeKind,
}

/// a dart is (edge index, direction); direction 0 = u->v
type Dart = (usize, u8);

#[derive(Debug, Clone)]
pub struct ChordArrangement {
    n: usize,
    coords: Vec<Coord>,
    edges: Vec<AEdge>,
    /// faces as dart cycles, counterclockwise (outer face clockwise)
    faces: Vec<Vec<Dart>>,
    outer: usize,
    /// shading per face (None for outer)
    color: Vec<Option<bool>>,
    face_of: BTreeMap<Dart, usize>,
    /// terminal t -> its shaded face
    term_face: BTreeMap<u32, usize>,
    /// crossing vertex -> (chord a, chord b)
    crossings: BTreeMap<usize, (usize, usize)>,
}

impl ChordArrangement {
    /// `chords` pair up stubs 1..=2n; every stub at most once.
    pub fn build(chords: &[(u32, u32)], n: usize) -> Result<Self, Error> {
        // retry with perturbed abscissas if three chords meet in a point
        for attempt in 0..32 {
            match Self::try_build(chords, n, attempt) {
                Ok(a) => return Ok(a),
                Err(Error::Parse(_)) if attempt < 31 => continue,
                Err(e) => return Err(e),
            }
        }
        unreachable!("perturbation retries exhausted");
    }

    fn try_build(chords: &[(u32, u32)], n: usize, attempt: usize) -> Result<Self, Error> {
        let m = 2 * n as i64;
        // stub k at x = k (+ k^2 * eps to break degeneracies), y = x^2
        let mut coords: Vec<Coord> = Vec::with_capacity(2 * n);
        for k in 1..=m {
            let mut x = rat(k);
            if attempt > 0 {
                x += BigRational::new(BigInt::from(k * k), BigInt::from(1013 + 37 * attempt as i64));
            }
            let y = &x * &x;
            coords.push((x, y));
        }
        let mut edges: Vec<AEdge> = Vec::new();
        let mut crossings: BTreeMap<usize, (usize, usize)> = BTreeMap::new();

        // crossing points per chord, keyed by x
        let mut events: Vec<Vec<(BigRational, usize)>> = vec![Vec::new(); chords.len()];
        for i in 0..chords.len() {
            for j in (i + 1)..chords.len() {
                if !interleave(chords[i], chords[j]) {
                    continue;
                }
                let p = line_intersection(
                    &coords[chords[i].0 as usize - 1],
                    &coords[chords[i].1 as usize - 1],
                    &coords[chords[j].0 as usize - 1],
                    &coords[chords[j].1 as usize - 1],
                )
                .ok_or_else(|| Error::Parse("parallel interleaved chords".into()))?;
                let vid = coords.len();
                coords.push(p.clone());
                crossings.insert(vid, (i, j));
                events[i].push((p.0.clone(), vid));
                events[j].push((p.0, vid));
            }
        }
        // chord segments
        for (ci, &(a, b)) in chords.iter().enumerate() {
            let (a, b) = (a as usize - 1, b as usize - 1);
            let (lo, hi) = if coords[a].0 <= coords[b].0 { (a, b) } else { (b, a) };
            let mut seq = vec![(coords[lo].0.clone(), lo)];
            seq.extend(events[ci].iter().cloned());
            seq.push((coords[hi].0.clone(), hi));
            seq.sort_by(|x, y| x.0.cmp(&y.0));
            for w in seq.windows(2) {
                if w[0].0 == w[1].0 {
                    // concurrent crossings: perturb and retry
                    return Err(Error::Parse("degenerate arrangement".into()));
                }
                edges.push(AEdge { u: w[0].1, v: w[1].1, kind: EdgeKind::Chord(ci) });
            }
        }
        // boundary arcs stub s -> s+1 (clockwise), plus the closing arc
        for s in 0..2 * n {
            edges.push(AEdge { u: s, v: (s + 1) % (2 * n), kind: EdgeKind::Arc(s as u32 + 1) });
        }

        // rotation system: darts sorted counterclockwise at each vertex
        let mut at: BTreeMap<usize, Vec<Dart>> = BTreeMap::new();
        for (ei, e) in edges.iter().enumerate() {
            at.entry(e.u).or_default().push((ei, 0));
            at.entry(e.v).or_default().push((ei, 1));
        }
        let dir = |d: &Dart| -> Coord {
            let e = &edges[d.0];
            let (from, to) = if d.1 == 0 { (e.u, e.v) } else { (e.v, e.u) };
            (&coords[to].0 - &coords[from].0, &coords[to].1 - &coords[from].1)
        };
        for (_, ds) in at.iter_mut() {
            ds.sort_by(|d1, d2| ccw_cmp(&dir(d1), &dir(d2)));
        }
        let next_ccw: BTreeMap<Dart, Dart> = at
            .values()
            .flat_map(|ds| {
                (0..ds.len()).map(move |k| (ds[k], ds[(k + 1) % ds.len()]))
            })
            .collect();

        // trace faces: next dart in face = ccw-next at the head after reversal
        let mut faces: Vec<Vec<Dart>> = Vec::new();
        let mut face_of: BTreeMap<Dart, usize> = BTreeMap::new();
        for ei in 0..edges.len() {
            for d0 in [(ei, 0u8), (ei, 1u8)] {
                if face_of.contains_key(&d0) {
                    continue;
                }
                let fid = faces.len();
                let mut cyc = Vec::new();
                let mut d = d0;
                loop {
                    face_of.insert(d, fid);
                    cyc.push(d);
                    let rev = (d.0, 1 - d.1);
                    d = next_ccw[&rev];
                    if d == d0 {
                        break;
                    }
                }
                faces.push(cyc);
            }
        }

        // outer face: the unique clockwise (negative-area) cycle
        let mut outer = None;
        for (fid, cyc) in faces.iter().enumerate() {
            let mut area = BigRational::zero();
            for d in cyc {
                let e = &edges[d.0];
                let (u, v) = if d.1 == 0 { (e.u, e.v) } else { (e.v, e.u) };
                area += &coords[u].0 * &coords[v].1 - &coords[v].0 * &coords[u].1;
            }
            if area.is_negative() {
                if outer.is_some() {
                    return Err(Error::Parse("degenerate arrangement".into()));
                }
                outer = Some(fid);
            }
        }
        let outer = outer.ok_or_else(|| Error::Parse("degenerate arrangement".into()))?;

        // two-color: flip across chord segments; terminal arc faces shaded
        let mut color: Vec<Option<bool>> = vec![None; faces.len()];
        let inner_face_of_arc = |s: u32| -> usize {
            let ei = edges
                .iter()
                .position(|e| e.kind == EdgeKind::Arc(s))
                .expect("arc edge exists");
            let f0 = face_of[&(ei, 0)];
            if f0 != outer {
                f0
            } else {
                face_of[&(ei, 1)]
            }
        };
        let start = inner_face_of_arc(1);
        color[start] = Some(true);
        let mut queue = std::collections::VecDeque::from([start]);
        while let Some(f) = queue.pop_front() {
            let c = color[f].unwrap();
            for d in &faces[f] {
                let other = face_of[&(d.0, 1 - d.1)];
                if other == outer {
                    continue;
                }
                let want = match edges[d.0].kind {
                    EdgeKind::Chord(_) => !c,
                    EdgeKind::Arc(_) => continue,
                };
                match color[other] {
                    None => {
                        color[other] = Some(want);
                        queue.push_back(other);
                    }
                    Some(have) => debug_assert_eq!(have, want, "two-coloring inconsistent"),
                }
            }
        }
        // every inner face is reachable from the start through chord segments
        // except isolated lens-offcuts; color them via their arcs
        let mut term_face = BTreeMap::new();
        for t in 1..=n as u32 {
            let f = inner_face_of_arc(2 * t - 1);
            match color[f] {
                None => color[f] = Some(true),
                Some(c) => debug_assert!(c, "terminal arc face must shade"),
            }
            term_face.insert(t, f);
        }
        for s in 1..=2 * n as u32 {
            if s % 2 == 0 {
                let f = inner_face_of_arc(s);
                match color[f] {
                    None => color[f] = Some(false),
                    Some(c) => debug_assert!(!c, "mid arc face must not shade"),
                }
            }
        }

        Ok(ChordArrangement { n, coords, edges, faces, outer, color, face_of, term_face, crossings })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn face_count(&self) -> usize {
        self.faces.len()
    }

    pub fn is_outer(&self, f: usize) -> bool {
        f == self.outer
    }

    pub fn is_shaded(&self, f: usize) -> bool {
        self.color[f] == Some(true)
    }

    pub fn face_terminal(&self, f: usize) -> Option<u32> {
        self.term_face.iter().find(|(_, &ff)| ff == f).map(|(&t, _)| t)
    }

    pub fn terminal_face(&self, t: u32) -> usize {
        self.term_face[&t]
    }

    /// All inner-face adjacencies across chord segments: (face, face, chord).
    pub fn face_adjacencies(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            if let EdgeKind::Chord(ci) = e.kind {
                let f0 = self.face_of[&(ei, 0)];
                let f1 = self.face_of[&(ei, 1)];
                if f0 != self.outer && f1 != self.outer && f0 != f1 {
                    out.push((f0.min(f1), f0.max(f1), ci));
                }
            }
        }
        out.sort_unstable();
        out.dedup();
        out
    }

    /// The four faces around a crossing vertex in counterclockwise order.
    fn faces_around(&self, vid: usize) -> Vec<usize> {
        let mut ds: Vec<Dart> = Vec::new();
        for (ei, e) in self.edges.iter().enumerate() {
            if e.u == vid {
                ds.push((ei, 0));
            }
            if e.v == vid {
                ds.push((ei, 1));
            }
        }
        let dir = |d: &Dart| -> Coord {
            let e = &self.edges[d.0];
            let (from, to) = if d.1 == 0 { (e.u, e.v) } else { (e.v, e.u) };
            (
                &self.coords[to].0 - &self.coords[from].0,
                &self.coords[to].1 - &self.coords[from].1,
            )
        };
        ds.sort_by(|a, b| ccw_cmp(&dir(a), &dir(b)));
        // face between consecutive darts d_k, d_{k+1} is the face of dart d_{k+1}
        // traced inbound... use face of the outbound dart: the face on its left
        ds.iter().map(|d| self.face_of[d]).collect()
    }

    /// Edges of the shaded-face graph, one per crossing joining the two
    /// opposite shaded faces (crossings whose shaded faces coincide yield
    /// nothing). Returned as (face_a, face_b, crossing vertex).
    pub fn shaded_edges(&self) -> Vec<(usize, usize, usize)> {
        let mut out = Vec::new();
        for (&vid, _) in &self.crossings {
            let around = self.faces_around(vid);
            debug_assert_eq!(around.len(), 4);
            let shaded: Vec<usize> = around
                .iter()
                .copied()
                .filter(|&f| self.color[f] == Some(true))
                .collect();
            if shaded.len() == 2 && shaded[0] != shaded[1] {
                out.push((shaded[0].min(shaded[1]), shaded[0].max(shaded[1]), vid));
            }
        }
        out
    }

    /// Crossing vertices along a shaded face's boundary, in clockwise order
    /// around the face. For a terminal face the walk starts just after its
    /// boundary arc, so the first entry is the crossing nearest the terminal's
    /// clockwise stub.
    pub fn face_crossings_clockwise(&self, f: usize) -> Vec<usize> {
        let cyc = &self.faces[f];
        // rotate so a boundary-arc dart (odd arc = terminal arc) comes first
        let start = cyc
            .iter()
            .position(|d| matches!(self.edges[d.0].kind, EdgeKind::Arc(s) if s % 2 == 1))
            .unwrap_or(0);
        let mut walk: Vec<usize> = Vec::new();
        for k in 0..cyc.len() {
            let d = cyc[(start + 1 + k) % cyc.len()];
            let e = &self.edges[d.0];
            let head = if d.1 == 0 { e.v } else { e.u };
            if self.crossings.contains_key(&head) {
                walk.push(head);
            }
        }
        walk.reverse(); // ccw walk -> clockwise rotation
        walk
    }
}

fn interleave(a: (u32, u32), b: (u32, u32)) -> bool {
    let (a0, a1) = (a.0.min(a.1), a.0.max(a.1));
    let (b0, b1) = (b.0.min(b.1), b.0.max(b.1));
    (a0 < b0 && b0 < a1 && a1 < b1) || (b0 < a0 && a0 < b1 && b1 < a1)
}

fn line_intersection(p1: &Coord, p2: &Coord, p3: &Coord, p4: &Coord) -> Option<Coord> {
    let d1 = (&p2.0 - &p1.0, &p2.1 - &p1.1);
    let d2 = (&p4.0 - &p3.0, &p4.1 - &p3.1);
    let den = &d1.0 * &d2.1 - &d1.1 * &d2.0;
    if den.is_zero() {
        return None;
    }
    let t = ((&p3.0 - &p1.0) * &d2.1 - (&p3.1 - &p1.1) * &d2.0) / den;
    Some((&p1.0 + &t * &d1.0, &p1.1 + &t * &d1.1))
}

/// Counterclockwise comparison of direction vectors from the positive x-axis.
fn ccw_cmp(a: &Coord, b: &Coord) -> std::cmp::Ordering {
    let half = |v: &Coord| -> u8 {
        if v.1.is_negative() || (v.1.is_zero() && v.0.is_negative()) {
            1
        } else {
            0
        }
    };
    half(a).cmp(&half(b)).then_with(|| {
        let cross = &a.0 * &b.1 - &a.1 * &b.0;
        // positive cross: a is ccw-before b
        if cross.is_positive() {
            std::cmp::Ordering::Less
        } else if cross.is_negative() {
            std::cmp::Ordering::Greater
        } else {
            std::cmp::Ordering::Equal
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_crossing_two_terminals() {
        // matching {{1,3},{2,4}}: one crossing, edge between the terminal faces
        let arr = ChordArrangement::build(&[(1, 3), (2, 4)], 2).unwrap();
        let edges = arr.shaded_edges();
        assert_eq!(edges.len(), 1);
        let (a, b, _) = edges[0];
        assert_eq!(
            [a, b],
            {
                let mut t = [arr.terminal_face(1), arr.terminal_face(2)];
                t.sort_unstable();
                t
            }
        );
    }

    #[test]
    fn non_crossing_matching_disconnects() {
        let arr = ChordArrangement::build(&[(1, 2), (3, 4)], 2).unwrap();
        assert!(arr.shaded_edges().is_empty());
        assert_ne!(arr.terminal_face(1), arr.terminal_face(2));
    }

    #[test]
    fn five_terminal_wiring() {
        // the worked example's matching gives 7 nodes and 7 edges
        let arr =
            ChordArrangement::build(&[(1, 7), (2, 8), (3, 5), (4, 9), (6, 10)], 5).unwrap();
        let shaded = (0..arr.face_count())
            .filter(|&f| !arr.is_outer(f) && arr.is_shaded(f))
            .count();
        assert_eq!(shaded, 7);
        assert_eq!(arr.shaded_edges().len(), 7);
    }
}
