//! Seeded random generators: circular planar networks (for the property
//! suites) and 1-nested cactus networks (for the obstruction suite).

use std::collections::BTreeMap;

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use crate::network::Network;
use crate::scalar::Scalar;

/// A connected circular planar network with embedding: boundary 1..n clockwise
/// plus `interior` interior nodes, random small-rational conductances.
/// Deterministic per seed.
///
/// Construction: triangulate the n-gon by random ear cuts, stack interior
/// nodes into random faces, then prune random edges subject to connectivity.
pub fn random_circular_planar(n: usize, interior: usize, seed: u64) -> Network {
    assert!(n >= 3, "need at least 3 terminals");
    let mut rng = StdRng::seed_from_u64(seed);

    // faces as clockwise triangles (boundary 1..n is clockwise)
    let mut faces: Vec<[u32; 3]> = Vec::new();
    let mut poly: Vec<u32> = (1..=n as u32).collect();
    while poly.len() > 3 {
        let i = rng.gen_range(0..poly.len());
        let prev = poly[(i + poly.len() - 1) % poly.len()];
        let next = poly[(i + 1) % poly.len()];
        faces.push([prev, poly[i], next]);
        poly.remove(i);
    }
    faces.push([poly[0], poly[1], poly[2]]);

    let mut next_id = n as u32 + 1;
    for _ in 0..interior {
        let f = rng.gen_range(0..faces.len());
        let [a, b, c] = faces.swap_remove(f);
        let x = next_id;
        next_id += 1;
        faces.push([a, b, x]);
        faces.push([b, c, x]);
        faces.push([c, a, x]);
    }

    // rotation lists from the face structure: clockwise-next dart after v->w
    // is v->prev_F(v) in the face traversing v->w
    let mut next_cw: BTreeMap<(u32, u32), u32> = BTreeMap::new();
    for f in &faces {
        for k in 0..3 {
            let v = f[k];
            let w = f[(k + 1) % 3];
            let prev = f[(k + 2) % 3];
            next_cw.insert((v, w), prev);
        }
    }
    let mut rotations: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    let mut edges: std::collections::BTreeSet<(u32, u32)> = std::collections::BTreeSet::new();
    for v in 1..next_id {
        let mut darts: Vec<u32> = Vec::new();
        let outgoing: Vec<u32> = next_cw
            .keys()
            .filter(|&&(a, _)| a == v)
            .map(|&(_, b)| b)
            .collect();
        if outgoing.is_empty() {
            continue;
        }
        // chain start: a dart that is no other dart's successor
        let start = outgoing
            .iter()
            .copied()
            .find(|&w| !outgoing.iter().any(|&u| next_cw.get(&(v, u)) == Some(&w)))
            .unwrap_or(outgoing[0]);
        let mut w = start;
        loop {
            darts.push(w);
            edges.insert((v.min(w), v.max(w)));
            match next_cw.get(&(v, w)) {
                Some(&nw) if nw != start => w = nw,
                _ => break,
            }
        }
        rotations.insert(v, darts);
    }

    // prune random edges, keeping the graph connected
    let mut edge_list: Vec<(u32, u32)> = edges.into_iter().collect();
    for i in (1..edge_list.len()).rev() {
        let j = rng.gen_range(0..=i);
        edge_list.swap(i, j);
    }
    let mut kept = edge_list.clone();
    for (i, &(u, v)) in edge_list.iter().enumerate() {
        if !rng.gen_bool(0.35) {
            continue;
        }
        let trial: Vec<(u32, u32)> = kept
            .iter()
            .copied()
            .filter(|&e| e != (u, v))
            .collect();
        if connected(next_id - 1, &trial) {
            kept = trial;
            let _ = i;
        }
    }
    for (v, rot) in rotations.iter_mut() {
        rot.retain(|w| kept.contains(&((*v).min(*w), (*v).max(*w))));
    }

    let edges_weighted: Vec<(u32, u32, Option<Scalar>)> = kept
        .iter()
        .map(|&(u, v)| {
            let num = rng.gen_range(1..=9i64);
            let den = rng.gen_range(1..=9i64);
            (u, v, Some(Scalar::from_ratio(num, den)))
        })
        .collect();
    let boundary: Vec<u32> = (1..=n as u32).collect();
    let interior_ids: Vec<u32> = (n as u32 + 1..next_id).collect();
    Network::new(boundary, interior_ids, edges_weighted)
        .expect("generator invariants")
        .with_rotations(rotations)
        .expect("generator rotations")
}

fn connected(node_count: u32, edges: &[(u32, u32)]) -> bool {
    if node_count == 0 {
        return true;
    }
    let mut adj: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(u, v) in edges {
        adj.entry(u).or_default().push(v);
        adj.entry(v).or_default().push(u);
    }
    let mut seen = std::collections::BTreeSet::new();
    let mut stack = vec![1u32];
    seen.insert(1u32);
    while let Some(u) = stack.pop() {
        for &w in adj.get(&u).map(|v| v.as_slice()).unwrap_or(&[]) {
            if seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == node_count as usize
}

/// A random 1-nested (cactus) circular planar network: a laminar family of
/// arcs becomes a tree, and each internal tree node of degree >= 3 turns into
/// a cycle with probability 1/2. Terminals 1..n clockwise.
pub fn random_one_nested(n: usize, seed: u64) -> Network {
    assert!(n >= 3);
    let mut rng = StdRng::seed_from_u64(seed);
    let mut next_id = n as u32 + 1;
    let mut edges: Vec<(u32, u32, Option<Scalar>)> = Vec::new();

    // recursively split the arc of terminals lo..=hi; returns the node that
    // represents the arc (a hub, cycle, or single terminal)
    fn build(
        lo: usize,
        hi: usize,
        rng: &mut StdRng,
        next_id: &mut u32,
        edges: &mut Vec<(u32, u32, Option<Scalar>)>,
    ) -> u32 {
        if lo == hi {
            return lo as u32;
        }
        let span = hi - lo + 1;
        // split into 2..=min(4, span) consecutive blocks
        let parts = rng.gen_range(2..=span.min(4));
        let mut cuts = vec![lo];
        let mut remaining = parts - 1;
        let mut pos = lo;
        while remaining > 0 {
            let max_start = hi - remaining + 1;
            pos = rng.gen_range(pos + 1..=max_start);
            cuts.push(pos);
            remaining -= 1;
        }
        cuts.push(hi + 1);
        let children: Vec<u32> = (0..parts)
            .map(|k| build(cuts[k], cuts[k + 1] - 1, rng, next_id, edges))
            .collect();
        let conduct = |rng: &mut StdRng| {
            Some(Scalar::from_ratio(rng.gen_range(1..=9), rng.gen_range(1..=9)))
        };
        if children.len() >= 3 && rng.gen_bool(0.5) {
            // cycle through fresh nodes, one per child, in circular order
            let ring: Vec<u32> = (0..children.len())
                .map(|_| {
                    let v = *next_id;
                    *next_id += 1;
                    v
                })
                .collect();
            for k in 0..ring.len() {
                let c = conduct(rng);
                edges.push((ring[k], ring[(k + 1) % ring.len()], c));
            }
            for (k, &ch) in children.iter().enumerate() {
                edges.push((ring[k], ch, conduct(rng)));
            }
            ring[0]
        } else {
            let hub = *next_id;
            *next_id += 1;
            for &ch in &children {
                edges.push((hub, ch, conduct(rng)));
            }
            hub
        }
    }

    let _root = build(1, n, &mut rng, &mut next_id, &mut edges);
    let boundary: Vec<u32> = (1..=n as u32).collect();
    let interior: Vec<u32> = (n as u32 + 1..next_id).collect();
    Network::new(boundary, interior, edges).expect("cactus invariants")
}
