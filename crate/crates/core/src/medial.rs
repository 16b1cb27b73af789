//! Medial graph strands traced combinatorially from a rotation system.
//!
//! Stubs 1..2n sit on the boundary circle, numbered clockwise starting just
//! counterclockwise of terminal 1, so terminal t is flanked by stubs 2t-1 and
//! 2t. Each network edge is a 4-valent medial vertex; a strand enters one of
//! its four corner slots and leaves through the slot at the other endpoint on
//! the same rotational side ("no turning"). Two strands cross wherever they
//! share a medial vertex; a pair crossing more than once is a lens and marks
//! the network as non-minimal.

use std::collections::BTreeMap;

use crate::error::Error;
use crate::network::Network;

/// Perfect matching on the 2n boundary stubs.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct StrandMatching {
    n: usize,
    pairs: Vec<(u32, u32)>,
}

impl StrandMatching {
    pub fn new(n: usize, mut pairs: Vec<(u32, u32)>) -> Result<Self, Error> {
        let mut seen = vec![false; 2 * n + 1];
        for p in pairs.iter_mut() {
            if p.0 > p.1 {
                *p = (p.1, p.0);
            }
        }
        pairs.sort_unstable();
        if pairs.len() != n {
            return Err(Error::InvalidMatching(format!(
                "expected {n} strands, got {}",
                pairs.len()
            )));
        }
        for &(a, b) in &pairs {
            for s in [a, b] {
                if s == 0 || s as usize > 2 * n {
                    return Err(Error::InvalidMatching(format!("stub {s} out of range")));
                }
                if seen[s as usize] {
                    return Err(Error::InvalidMatching(format!("stub {s} used twice")));
                }
                seen[s as usize] = true;
            }
            if a == b {
                return Err(Error::InvalidMatching(format!("stub {a} matched to itself")));
            }
        }
        Ok(StrandMatching { n, pairs })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }

    pub fn partner(&self, stub: u32) -> u32 {
        for &(a, b) in &self.pairs {
            if a == stub {
                return b;
            }
            if b == stub {
                return a;
            }
        }
        panic!("stub {stub} not in matching");
    }
}

impl std::fmt::Display for StrandMatching {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> =
            self.pairs.iter().map(|(a, b)| format!("{{{a},{b}}}")).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// A medial edge: a corner between consecutive darts at a vertex, or the edge
/// tying a boundary stub to the medial vertex of its adjacent network edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum MEdge {
    Corner { v: u32, k: usize },
    Stub { s: u32 },
}

/// One end of a medial edge: end 0 is the dart-k / stub side, end 1 the other.
type MEnd = (MEdge, u8);

pub fn medial_strand_matching(net: &Network) -> Result<(StrandMatching, bool), Error> {
    let rot = net.rotations().ok_or(Error::MissingEmbedding)?;
    let n = net.boundary().len();
    let boundary: BTreeMap<u32, usize> =
        net.boundary().iter().enumerate().map(|(i, &t)| (t, i + 1)).collect();
    for &v in net.interior().iter().chain(net.boundary()) {
        if !net.neighbors(v).is_empty() && !rot.contains_key(&v) {
            return Err(Error::MissingEmbedding);
        }
    }

    let mut edge_ix: BTreeMap<(u32, u32), usize> = BTreeMap::new();
    for (i, e) in net.edges().iter().enumerate() {
        edge_ix.insert((e.u.min(e.v), e.u.max(e.v)), i);
    }
    let eix = |a: u32, b: u32| -> usize { edge_ix[&(a.min(b), a.max(b))] };

    // Slots at each medial vertex (one per network edge), keyed by endpoint:
    //   before dart (v,k) = corner (v,k-1) arriving at its end 1 (or the
    //     clockwise stub edge at a terminal's first dart),
    //   after dart (v,k) = corner (v,k) leaving from its end 0 (or the
    //     counterclockwise stub edge at the last dart).
    // A strand entering the before-slot at one endpoint exits the before-slot
    // at the other endpoint; same for after.
    #[derive(Default, Clone)]
    struct Slots {
        before: Vec<(u32, MEnd)>,
        after: Vec<(u32, MEnd)>,
    }
    let mut slots: Vec<Slots> = vec![Slots::default(); net.edges().len()];
    let mut graph_end: BTreeMap<MEnd, usize> = BTreeMap::new();

    for (&v, ns) in rot {
        let deg = ns.len();
        if deg == 0 {
            continue;
        }
        let cyclic = !boundary.contains_key(&v);
        for k in 0..deg {
            if k + 1 < deg || cyclic {
                let c = MEdge::Corner { v, k };
                let e0 = eix(v, ns[k]);
                let e1 = eix(v, ns[(k + 1) % deg]);
                graph_end.insert((c, 0), e0);
                graph_end.insert((c, 1), e1);
                slots[e0].after.push((v, (c, 0)));
                slots[e1].before.push((v, (c, 1)));
            }
        }
        if let Some(&t) = boundary.get(&v) {
            let cw = MEdge::Stub { s: 2 * t as u32 };
            let first = eix(v, ns[0]);
            graph_end.insert((cw, 1), first);
            slots[first].before.push((v, (cw, 1)));
            let ccw = MEdge::Stub { s: 2 * t as u32 - 1 };
            let last = eix(v, ns[deg - 1]);
            graph_end.insert((ccw, 1), last);
            slots[last].after.push((v, (ccw, 1)));
        }
    }

    for (i, s) in slots.iter().enumerate() {
        if s.before.len() != 2 || s.after.len() != 2 {
            let e = &net.edges()[i];
            return Err(Error::InvalidNetwork(format!(
                "embedding inconsistent around edge {}-{}",
                e.u, e.v
            )));
        }
    }

    let pair_out = |e: usize, v: u32, is_before: bool| -> MEnd {
        let bank = if is_before { &slots[e].before } else { &slots[e].after };
        match bank.iter().find(|(w, _)| *w != v) {
            Some((_, m)) => *m,
            None => bank[1].1,
        }
    };
    let slot_of = |e: usize, end: MEnd| -> (u32, bool) {
        for (v, m) in &slots[e].before {
            if *m == end {
                return (*v, true);
            }
        }
        for (v, m) in &slots[e].after {
            if *m == end {
                return (*v, false);
            }
        }
        panic!("medial end not registered at its vertex");
    };

    let mut strands: Vec<(u32, u32, Vec<usize>)> = Vec::new();
    let mut seen_stub = vec![false; 2 * n + 1];
    // isolated terminals: both stubs join directly
    for (&t, &i) in &boundary {
        if net.neighbors(t).is_empty() {
            let (a, b) = (2 * i as u32 - 1, 2 * i as u32);
            strands.push((a, b, vec![]));
            seen_stub[a as usize] = true;
            seen_stub[b as usize] = true;
        }
    }
    for s0 in 1..=(2 * n as u32) {
        if seen_stub[s0 as usize] {
            continue;
        }
        let mut cur: MEnd = (MEdge::Stub { s: s0 }, 1);
        let mut visited: Vec<usize> = Vec::new();
        let end_stub;
        loop {
            let e = graph_end[&cur];
            visited.push(e);
            let (v, is_before) = slot_of(e, cur);
            let out = pair_out(e, v, is_before);
            let other: MEnd = (out.0, 1 - out.1);
            if let MEdge::Stub { s } = other.0 {
                if other.1 == 0 {
                    end_stub = s;
                    break;
                }
            }
            cur = other;
        }
        seen_stub[s0 as usize] = true;
        seen_stub[end_stub as usize] = true;
        strands.push((s0, end_stub, visited));
    }

    // lens detection: the two passes through each medial vertex cross there
    let mut passes: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (si, (_, _, vs)) in strands.iter().enumerate() {
        for &e in vs {
            passes.entry(e).or_default().push(si);
        }
    }
    let mut lens = false;
    let mut cross_count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for (_, ss) in passes {
        debug_assert_eq!(ss.len(), 2, "each medial vertex carries two strand passes");
        if ss[0] == ss[1] {
            lens = true;
        } else {
            let key = (ss[0].min(ss[1]), ss[0].max(ss[1]));
            let c = cross_count.entry(key).or_insert(0);
            *c += 1;
            if *c > 1 {
                lens = true;
            }
        }
    }

    let matching = StrandMatching::new(n, strands.iter().map(|&(a, b, _)| (a, b)).collect())?;
    Ok((matching, lens))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::network::example_network;
    use crate::scalar::Scalar;

    #[test]
    fn published_matching() {
        let (m, lens) = medial_strand_matching(&example_network()).unwrap();
        assert_eq!(m.pairs(), &[(1, 7), (2, 8), (3, 5), (4, 9), (6, 10)]);
        assert!(!lens);
    }

    #[test]
    fn single_edge_two_terminals() {
        let net = Network::new(vec![1, 2], vec![], vec![(1, 2, Some(Scalar::from_int(1)))])
            .unwrap()
            .with_rotations([(1, vec![2]), (2, vec![1])].into_iter().collect())
            .unwrap();
        let (m, lens) = medial_strand_matching(&net).unwrap();
        assert_eq!(m.pairs(), &[(1, 3), (2, 4)]);
        assert!(!lens);
    }

    #[test]
    fn series_chain_is_a_lens() {
        // interior degree-2 node: the two medial vertices form a bigon
        let net = Network::new(
            vec![1, 2],
            vec![3],
            vec![(1, 3, Some(Scalar::from_int(1))), (3, 2, Some(Scalar::from_int(1)))],
        )
        .unwrap()
        .with_rotations([(1, vec![3]), (2, vec![3]), (3, vec![1, 2])].into_iter().collect())
        .unwrap();
        let (m, lens) = medial_strand_matching(&net).unwrap();
        assert!(lens);
        assert_eq!(m.pairs(), &[(1, 3), (2, 4)]);
    }

    #[test]
    fn missing_embedding_errors() {
        let net = Network::new(vec![1, 2], vec![], vec![(1, 2, Some(Scalar::from_int(1)))]).unwrap();
        assert!(matches!(medial_strand_matching(&net), Err(Error::MissingEmbedding)));
    }

    #[test]
    fn isolated_terminal_gets_trivial_strand() {
        let net = Network::new(
            vec![1, 2, 3],
            vec![],
            vec![(1, 2, Some(Scalar::from_int(1)))],
        )
        .unwrap()
        .with_rotations([(1, vec![2]), (2, vec![1])].into_iter().collect())
        .unwrap();
        let (m, _) = medial_strand_matching(&net).unwrap();
        assert!(m.pairs().contains(&(5, 6)));
    }
}
