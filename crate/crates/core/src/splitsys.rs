//! Structural analysis of a weighted circular split system: crossing
//! relations, bridge/blob decomposition, the equal-weight obstruction to
//! 1-nested realizability, and DOT rendering.

use std::collections::{BTreeMap, BTreeSet};

use crate::arrangement::ChordArrangement;
use crate::circular::CircularOrder;
use crate::error::Error;
use crate::kalmanson::{WeightedSplit, WeightedSplitSystem};
use crate::scalar::Scalar;

/// Two splits cross iff all four pairwise part intersections are nonempty
/// (their arcs interleave on the circle).
pub fn splits_cross(s1: &WeightedSplit, s2: &WeightedSplit, order: &CircularOrder) -> bool {
    let ground: BTreeSet<u32> = order.seq().iter().copied().collect();
    let a1 = s1.side();
    let b1 = s1.other_side(&ground);
    let a2 = s2.side();
    let b2 = s2.other_side(&ground);
    let inter = |x: &BTreeSet<u32>, y: &BTreeSet<u32>| x.intersection(y).next().is_some();
    inter(a1, a2) && inter(a1, &b2) && inter(&b1, a2) && inter(&b1, &b2)
}

/// A maximal group of mutually linked crossing splits.
#[derive(Debug, Clone)]
pub struct Blob {
    /// indices into the system's split list
    pub split_indices: Vec<usize>,
    /// laminar-tree node the blob occupies
    pub home: usize,
}

/// Bridge candidates, trivial splits, blobs, and the laminar tree that holds
/// them together. Contracting each blob to its home node leaves a tree whose
/// edges are the non-crossing splits.
#[derive(Debug, Clone)]
pub struct BlobDecomposition {
    pub system: WeightedSplitSystem,
    /// nontrivial splits crossed by no other split (potential bridges)
    pub bridge_candidates: Vec<usize>,
    /// trivial splits (always non-crossing)
    pub trivial: Vec<usize>,
    pub blobs: Vec<Blob>,
    pub tree: LaminarTree,
}

impl BlobDecomposition {
    pub fn split(&self, idx: usize) -> &WeightedSplit {
        &self.system.splits()[idx]
    }

    /// Bridge candidates incident to a blob: tree edges at its home node.
    pub fn incident_candidates(&self, blob: &Blob) -> Vec<usize> {
        let node = &self.tree.nodes[blob.home];
        let mut out: Vec<usize> = node
            .children
            .iter()
            .map(|&(s, _)| s)
            .chain(node.parent.map(|(s, _)| s))
            .filter(|s| self.bridge_candidates.contains(s))
            .collect();
        out.sort_unstable();
        out
    }
}

/// Rooted tree of the non-crossing splits, viewed as nested arcs. Each node
/// is a region of the circle partition; each non-crossing split is the edge
/// between its arc's node and the parent region.
#[derive(Debug, Clone)]
pub struct LaminarTree {
    pub nodes: Vec<LamNode>,
    /// tree node for each non-crossing split index (the child side)
    pub node_of_split: BTreeMap<usize, usize>,
    /// tree node each terminal sits at
    pub node_of_terminal: BTreeMap<u32, usize>,
}

#[derive(Debug, Clone, Default)]
pub struct LamNode {
    /// terminals lying in this region (not separated further)
    pub terminals: Vec<u32>,
    /// (split index, child node)
    pub children: Vec<(usize, usize)>,
    pub parent: Option<(usize, usize)>,
    /// blob index if a crossing component lives here
    pub blob: Option<usize>,
}

impl LaminarTree {
    /// Build from the non-crossing splits of a system (indices given), using
    /// the arc representation that avoids the position of the smallest label.
    fn build(system: &WeightedSplitSystem, noncrossing: &[usize]) -> LaminarTree {
        let order = &system.order;
        let n = order.len();
        let min_label = *order.seq().iter().min().unwrap();
        let min_pos = order.position(min_label).unwrap();
        // arcs as position sets avoiding min_pos
        let mut arcs: Vec<(usize, BTreeSet<usize>)> = noncrossing
            .iter()
            .map(|&si| {
                let s = &system.splits()[si];
                let (start, len) = s
                    .arc_positions(order)
                    .expect("system split must be an arc");
                let mut set: BTreeSet<usize> = (0..len).map(|k| (start + k) % n).collect();
                if set.contains(&min_pos) {
                    set = (0..n).filter(|p| !set.contains(p)).collect();
                }
                (si, set)
            })
            .collect();
        // sort by size descending so parents come first
        arcs.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.1.cmp(&b.1)));

        let mut nodes = vec![LamNode::default()]; // 0 = root region (contains min label)
        let mut node_of_split = BTreeMap::new();
        // region of each arc = its node; find parent as the smallest arc strictly containing it
        let mut arc_node: Vec<(BTreeSet<usize>, usize)> = Vec::new();
        for (si, set) in &arcs {
            let parent = arc_node
                .iter()
                .filter(|(ps, _)| ps.is_superset(set) && ps.len() > set.len())
                .min_by_key(|(ps, _)| ps.len())
                .map(|(_, nid)| *nid)
                .unwrap_or(0);
            let nid = nodes.len();
            nodes.push(LamNode { parent: Some((*si, parent)), ..Default::default() });
            nodes[parent].children.push((*si, nid));
            node_of_split.insert(*si, nid);
            arc_node.push((set.clone(), nid));
        }
        // place each terminal at the node of the smallest arc containing it
        let mut node_of_terminal = BTreeMap::new();
        for p in 0..n {
            let label = order.at(p);
            let nid = arc_node
                .iter()
                .filter(|(s, _)| s.contains(&p))
                .min_by_key(|(s, _)| s.len())
                .map(|(_, nid)| *nid)
                .unwrap_or(0);
            nodes[nid].terminals.push(label);
            node_of_terminal.insert(label, nid);
        }
        LaminarTree { nodes, node_of_split, node_of_terminal }
    }

    /// Tree path between the nodes of two terminals: (edge splits, inner nodes).
    pub fn route(&self, a: u32, b: u32) -> (Vec<usize>, Vec<usize>) {
        let na = self.node_of_terminal[&a];
        let nb = self.node_of_terminal[&b];
        let pa = self.path_to_root(na);
        let pb = self.path_to_root(nb);
        // drop common suffix
        let mut ia = pa.len();
        let mut ib = pb.len();
        while ia > 0 && ib > 0 && pa[ia - 1].0 == pb[ib - 1].0 {
            ia -= 1;
            ib -= 1;
        }
        let mut edges = Vec::new();
        let mut inner: Vec<usize> = Vec::new();
        for (node, edge) in &pa[..ia] {
            inner.push(*node);
            if let Some(e) = edge {
                edges.push(*e);
            }
        }
        let meet = if ia < pa.len() { pa[ia].0 } else { na };
        inner.push(meet);
        for (node, edge) in pb[..ib].iter().rev() {
            if let Some(e) = edge {
                edges.push(*e);
            }
            inner.push(*node);
        }
        (edges, inner)
    }

    fn path_to_root(&self, mut node: usize) -> Vec<(usize, Option<usize>)> {
        // (node, edge split climbing out of it)
        let mut out = Vec::new();
        loop {
            match self.nodes[node].parent {
                Some((split, parent)) => {
                    out.push((node, Some(split)));
                    node = parent;
                }
                None => {
                    out.push((node, None));
                    return out;
                }
            }
        }
    }
}

/// Bridge candidates = nontrivial splits crossing nothing; blobs = connected
/// components of the crossing graph on the rest.
pub fn decompose(system: &WeightedSplitSystem) -> BlobDecomposition {
    let order = &system.order;
    let k = system.splits().len();
    let mut crossing_adj: Vec<Vec<usize>> = vec![vec![]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            if splits_cross(&system.splits()[i], &system.splits()[j], order) {
                crossing_adj[i].push(j);
                crossing_adj[j].push(i);
            }
        }
    }
    let ground = system.ground();
    let mut bridge_candidates = Vec::new();
    let mut trivial = Vec::new();
    let mut crossing: Vec<usize> = Vec::new();
    for i in 0..k {
        if !crossing_adj[i].is_empty() {
            crossing.push(i);
        } else if system.splits()[i].is_trivial(&ground) {
            trivial.push(i);
        } else {
            bridge_candidates.push(i);
        }
    }
    // blobs: components of the crossing graph
    let mut seen = BTreeSet::new();
    let mut blob_groups: Vec<Vec<usize>> = Vec::new();
    for &s in &crossing {
        if seen.contains(&s) {
            continue;
        }
        let mut comp = vec![];
        let mut stack = vec![s];
        seen.insert(s);
        while let Some(x) = stack.pop() {
            comp.push(x);
            for &y in &crossing_adj[x] {
                if seen.insert(y) {
                    stack.push(y);
                }
            }
        }
        comp.sort_unstable();
        blob_groups.push(comp);
    }
    blob_groups.sort();

    let noncrossing: Vec<usize> = (0..k).filter(|i| crossing_adj[*i].is_empty()).collect();
    let mut tree = LaminarTree::build(system, &noncrossing);

    // home node of each blob: node of the smallest laminar arc containing any
    // of its splits' arcs (all splits of a blob agree)
    let n = order.len();
    let min_pos = order.position(*order.seq().iter().min().unwrap()).unwrap();
    let mut blobs = Vec::new();
    for (bi, group) in blob_groups.iter().enumerate() {
        let s = &system.splits()[group[0]];
        let (start, len) = s.arc_positions(order).expect("split must be an arc");
        let mut set: BTreeSet<usize> = (0..len).map(|k2| (start + k2) % n).collect();
        if set.contains(&min_pos) {
            set = (0..n).filter(|p| !set.contains(p)).collect();
        }
        // walk the laminar tree: deepest node whose arc contains the blob arc
        let mut home = 0usize;
        'descend: loop {
            for &(split, child) in &tree.nodes[home].children {
                let cs = &system.splits()[split];
                let (cstart, clen) = cs.arc_positions(order).unwrap();
                let mut cset: BTreeSet<usize> =
                    (0..clen).map(|k2| (cstart + k2) % n).collect();
                if cset.contains(&min_pos) {
                    cset = (0..n).filter(|p| !cset.contains(p)).collect();
                }
                if cset.is_superset(&set) {
                    home = child;
                    continue 'descend;
                }
            }
            break;
        }
        tree.nodes[home].blob = Some(bi);
        blobs.push(Blob { split_indices: group.clone(), home });
    }

    BlobDecomposition { system: system.clone(), bridge_candidates, trivial, blobs, tree }
}

/// Witness for the equal-weight obstruction: arcs A,B,C,D (clockwise) such
/// that (A∪B)|(C∪D) and (A∪D)|(B∪C) are crossing splits of equal weight a,
/// (A∪B∪C)|D and (A∪D∪C)|B are non-crossing splits of equal weight b, and
/// a != b. Such a system is not the image of any 1-nested network. A `None`
/// result means only that no obstruction of this form exists.
#[derive(Debug, Clone)]
pub struct ObstructionWitness {
    pub blocks: [Vec<u32>; 4],
    pub crossing_weight: Scalar,
    pub flanking_weight: Scalar,
}

pub fn one_nested_obstruction(system: &WeightedSplitSystem) -> Option<ObstructionWitness> {
    let order = &system.order;
    let n = order.len();
    if n < 6 {
        return None;
    }
    let arc = |from: usize, to: usize| -> BTreeSet<u32> {
        // positions from..=to cyclically
        let len = (to + n - from) % n + 1;
        (0..len).map(|k| order.at(from + k)).collect()
    };
    // cut positions c0 < c1 < c2 < c3: A = [c0+1..c1], B = [c1+1..c2], C = [c2+1..c3], D = [c3+1..c0]
    for c0 in 0..n {
        for c1 in (c0 + 1)..n {
            for c2 in (c1 + 1)..n {
                for c3 in (c2 + 1)..n {
                    let a = arc((c0 + 1) % n, c1 % n);
                    let b = arc((c1 + 1) % n, c2 % n);
                    let c = arc((c2 + 1) % n, c3 % n);
                    let d = arc((c3 + 1) % n, c0 % n);
                    if b.len() < 2 || d.len() < 2 {
                        continue; // flanking splits must be nontrivial
                    }
                    let ab: BTreeSet<u32> = a.union(&b).copied().collect();
                    let ad: BTreeSet<u32> = a.union(&d).copied().collect();
                    let abc: BTreeSet<u32> = ab.union(&c).copied().collect();
                    let adc: BTreeSet<u32> = ad.union(&c).copied().collect();
                    let (Some(s1), Some(s2), Some(s3), Some(s4)) = (
                        system.find(&ab),
                        system.find(&ad),
                        system.find(&abc),
                        system.find(&adc),
                    ) else {
                        continue;
                    };
                    if !s1.weight.approx_eq(&s2.weight) || !s3.weight.approx_eq(&s4.weight) {
                        continue;
                    }
                    if s1.weight.approx_eq(&s3.weight) {
                        continue; // a == b: no obstruction
                    }
                    return Some(ObstructionWitness {
                        blocks: [
                            a.into_iter().collect(),
                            b.into_iter().collect(),
                            c.into_iter().collect(),
                            d.into_iter().collect(),
                        ],
                        crossing_weight: s1.weight.clone(),
                        flanking_weight: s3.weight.clone(),
                    });
                }
            }
        }
    }
    None
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderStyle {
    /// split network: one parallel edge class per split
    Network,
    /// labeled n-gon with weighted diagonals
    Polygon,
}

/// Graph-description (DOT) text for a split system.
pub fn render_dot(system: &WeightedSplitSystem, style: RenderStyle) -> String {
    match style {
        RenderStyle::Polygon => render_polygon(system),
        RenderStyle::Network => render_network(system),
    }
}

fn render_polygon(system: &WeightedSplitSystem) -> String {
    let order = &system.order;
    let n = order.len();
    let mut s = String::from("graph splits {\n  layout=circo;\n");
    for p in 0..n {
        s.push_str(&format!("  g{p} [shape=point, xlabel=\"{}\"];\n", order.at(p)));
    }
    for p in 0..n {
        s.push_str(&format!("  g{} -- g{} [label=\"{}\"];\n", p, (p + 1) % n, order.at(p)));
    }
    for sp in system.splits() {
        let (start, len) = sp.arc_positions(order).expect("consistent split");
        // diagonal from the gap before the arc to the gap after it
        let from = (start + n - 1) % n;
        let to = (start + len - 1) % n;
        s.push_str(&format!(
            "  g{from} -- g{to} [style=dashed, label=\"{}\"];\n",
            sp.weight
        ));
    }
    s.push_str("}\n");
    s
}

fn render_network(system: &WeightedSplitSystem) -> String {
    // Buneman-style drawing: regions of the chord arrangement are vertices,
    // chord segments are the parallel edge class of their split.
    let order = &system.order;
    let n = order.len();
    let chords: Vec<(u32, u32)> = system
        .splits()
        .iter()
        .map(|sp| {
            let (start, len) = sp.arc_positions(order).expect("consistent split");
            // endpoints on the 2n stub circle: gaps before and after the arc
            let a = (2 * start + 2 * n - 1) % (2 * n);
            let b = (2 * (start + len - 1) + 1) % (2 * n);
            (a as u32 + 1, b as u32 + 1)
        })
        .collect();
    let arr = ChordArrangement::build(&chords, n).expect("split chords are realizable");
    let mut s = String::from("graph splitnetwork {\n");
    for f in 0..arr.face_count() {
        if arr.is_outer(f) {
            continue;
        }
        match arr.face_terminal(f) {
            Some(t) => s.push_str(&format!(
                "  f{f} [shape=doublecircle, label=\"{}\"];\n",
                order.at(t as usize - 1)
            )),
            None => s.push_str(&format!("  f{f} [shape=point, label=\"\"];\n")),
        }
    }
    for (a, b, chord_idx) in arr.face_adjacencies() {
        let w = &system.splits()[chord_idx].weight;
        s.push_str(&format!("  f{a} -- f{b} [label=\"{w}\"];\n"));
    }
    s.push_str("}\n");
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kalmanson::split_decomposition;
    use crate::matrix::SquareMatrix;
    use crate::response::ResistanceMatrix;
    use crate::scalar::Mode;

    fn mats_system() -> WeightedSplitSystem {
        let w = ResistanceMatrix::new_unchecked(
            SquareMatrix::parse(
                "5\n0 11/4 7/4 7/4 17/12\n11/4 0 1 2 2\n7/4 1 0 1 1\n7/4 2 1 0 2/3\n17/12 2 1 2/3 0\n",
                Mode::Exact,
            )
            .unwrap(),
        );
        split_decomposition(&w, &CircularOrder::counting(5)).unwrap()
    }

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    #[test]
    fn crossing_examples() {
        let order = CircularOrder::counting(5);
        let ground = set(&[1, 2, 3, 4, 5]);
        let s1 = WeightedSplit::new(set(&[1, 5]), &ground, Scalar::from_int(1));
        let s2 = WeightedSplit::new(set(&[4, 5]), &ground, Scalar::from_int(1));
        assert!(splits_cross(&s1, &s2, &order));
        assert!(!splits_cross(&s1, &s1, &order));
        let triv = WeightedSplit::new(set(&[4]), &ground, Scalar::from_int(1));
        assert!(!splits_cross(&triv, &s1, &order));
        assert!(!splits_cross(&triv, &s2, &order));
    }

    #[test]
    fn decompose_example() {
        let s = mats_system();
        let d = decompose(&s);
        // one bridge candidate {2,3}, one blob of two crossing splits
        assert_eq!(d.bridge_candidates.len(), 1);
        assert_eq!(d.split(d.bridge_candidates[0]).side(), &set(&[2, 3]));
        assert_eq!(d.split(d.bridge_candidates[0]).weight, Scalar::from_ratio(1, 2));
        assert_eq!(d.blobs.len(), 1);
        assert_eq!(d.blobs[0].split_indices.len(), 2);
        assert_eq!(d.trivial.len(), 4);
        // blob tree: the blob's home node carries no terminals, terminal 3
        // hangs past the bridge, terminal 1 at the root
        let home = d.blobs[0].home;
        assert!(d.tree.nodes[home].terminals.is_empty());
        assert_eq!(d.incident_candidates(&d.blobs[0]).len(), 1);
    }

    #[test]
    fn tree_system_has_no_blobs() {
        let ground = set(&[1, 2, 3, 4]);
        let order = CircularOrder::counting(4);
        let splits = vec![
            WeightedSplit::new(set(&[1]), &ground, Scalar::from_int(1)),
            WeightedSplit::new(set(&[2]), &ground, Scalar::from_int(1)),
            WeightedSplit::new(set(&[3]), &ground, Scalar::from_int(1)),
            WeightedSplit::new(set(&[4]), &ground, Scalar::from_int(1)),
            WeightedSplit::new(set(&[1, 2]), &ground, Scalar::from_int(2)),
        ];
        let s = WeightedSplitSystem::new(order, splits).unwrap();
        let d = decompose(&s);
        assert!(d.blobs.is_empty());
        assert_eq!(d.bridge_candidates.len(), 1);
        // route from 1 to 3 crosses the middle split and both leaf splits
        let (edges, _) = d.tree.route(1, 3);
        assert_eq!(edges.len(), 3);
    }

    #[test]
    fn obstruction_fires_on_unequal_pattern() {
        // blocks A={1}, B={2,3}, C={4}, D={5,6}; crossing pair weight 1,
        // flanking pair weight 2 -> witness
        let ground = set(&[1, 2, 3, 4, 5, 6]);
        let order = CircularOrder::counting(6);
        let one = Scalar::from_int(1);
        let two = Scalar::from_int(2);
        let splits = vec![
            WeightedSplit::new(set(&[1, 2, 3]), &ground, one.clone()),
            WeightedSplit::new(set(&[1, 5, 6]), &ground, one.clone()),
            WeightedSplit::new(set(&[1, 2, 3, 4]), &ground, two.clone()),
            WeightedSplit::new(set(&[1, 4, 5, 6]), &ground, two.clone()),
        ];
        let s = WeightedSplitSystem::new(order, splits).unwrap();
        let w = one_nested_obstruction(&s).expect("pattern with a != b must fire");
        assert_eq!(w.crossing_weight, one);
        assert_eq!(w.flanking_weight, two);
    }

    #[test]
    fn obstruction_silent_when_weights_equal() {
        let ground = set(&[1, 2, 3, 4, 5, 6]);
        let order = CircularOrder::counting(6);
        let one = Scalar::from_int(1);
        let splits = vec![
            WeightedSplit::new(set(&[1, 2, 3]), &ground, one.clone()),
            WeightedSplit::new(set(&[1, 5, 6]), &ground, one.clone()),
            WeightedSplit::new(set(&[1, 2, 3, 4]), &ground, one.clone()),
            WeightedSplit::new(set(&[1, 4, 5, 6]), &ground, one.clone()),
        ];
        let s = WeightedSplitSystem::new(order, splits).unwrap();
        assert!(one_nested_obstruction(&s).is_none());
    }

    #[test]
    fn obstruction_silent_on_trees() {
        let s = WeightedSplitSystem::new(
            CircularOrder::counting(6),
            vec![WeightedSplit::new(
                set(&[2, 3]),
                &set(&[1, 2, 3, 4, 5, 6]),
                Scalar::from_int(1),
            )],
        )
        .unwrap();
        assert!(one_nested_obstruction(&s).is_none());
    }

    #[test]
    fn dot_outputs_parse() {
        let s = mats_system();
        for style in [RenderStyle::Polygon, RenderStyle::Network] {
            let text = render_dot(&s, style);
            assert!(text.starts_with("graph "));
            assert_eq!(text.matches('{').count(), text.matches('}').count());
            // every non-brace line is a node or edge statement ending in ;
            for line in text.lines().skip(1) {
                let t = line.trim();
                if t == "}" || t.is_empty() {
                    continue;
                }
                assert!(t.ends_with(';'), "bad DOT line: {t}");
            }
        }
    }
}
