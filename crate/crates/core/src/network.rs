//! Network data model, Laplacian/response/resistance computation, and the
//! brute-force vertex-disjoint connection oracle.

use std::collections::{BTreeMap, BTreeSet};

use crate::circular::{enumerate_circular_pairs, CircularOrder, CircularPair};
use crate::error::Error;
use crate::matrix::SquareMatrix;
use crate::response::{w_from_m, ResponseMatrix};
use crate::scalar::{Mode, Scalar};

/// Exhaustive connection search is exponential; keep it to desk scale.
pub const CONNECTION_SEARCH_BOUND: usize = 14;

#[derive(Debug, Clone, PartialEq)]
pub struct Edge {
    pub u: u32,
    pub v: u32,
    /// None marks a recovered edge whose conductance is unknown.
    pub conductance: Option<Scalar>,
}

/// Undirected weighted graph with circularly ordered boundary terminals.
///
/// The optional embedding is a rotation system: for interior nodes the
/// clockwise cyclic order of neighbors, for boundary nodes the clockwise list
/// starting from the outer face (first neighbor adjacent to the clockwise
/// stub of the terminal).
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    boundary: Vec<u32>,
    interior: Vec<u32>,
    edges: Vec<Edge>,
    rotations: Option<BTreeMap<u32, Vec<u32>>>,
}

impl Network {
    /// Parallel edges are merged by conductance addition; self-loops rejected.
    pub fn new(
        boundary: Vec<u32>,
        interior: Vec<u32>,
        edges: Vec<(u32, u32, Option<Scalar>)>,
    ) -> Result<Self, Error> {
        let mut seen = BTreeSet::new();
        for &b in &boundary {
            if !seen.insert(b) {
                return Err(Error::InvalidNetwork(format!("repeated boundary node {b}")));
            }
        }
        for &i in &interior {
            if !seen.insert(i) {
                return Err(Error::InvalidNetwork(format!("node {i} listed twice")));
            }
        }
        let mut merged: BTreeMap<(u32, u32), Option<Scalar>> = BTreeMap::new();
        for (u, v, c) in edges {
            if u == v {
                return Err(Error::InvalidNetwork(format!("self-loop at {u}")));
            }
            if !seen.contains(&u) || !seen.contains(&v) {
                return Err(Error::InvalidNetwork(format!("edge {u}-{v} uses unknown node")));
            }
            if let Some(ref c) = c {
                if !c.is_positive() {
                    return Err(Error::InvalidNetwork(format!(
                        "edge {u}-{v} has non-positive conductance {c}"
                    )));
                }
            }
            let key = (u.min(v), u.max(v));
            match merged.entry(key) {
                std::collections::btree_map::Entry::Vacant(e) => {
                    e.insert(c);
                }
                std::collections::btree_map::Entry::Occupied(mut e) => {
                    let cur = e.get_mut();
                    *cur = match (cur.take(), c) {
                        (Some(a), Some(b)) => Some(a + b),
                        _ => None,
                    };
                }
            }
        }
        let edges = merged
            .into_iter()
            .map(|((u, v), c)| Edge { u, v, conductance: c })
            .collect();
        Ok(Network { boundary, interior, edges, rotations: None })
    }

    pub fn with_rotations(mut self, rot: BTreeMap<u32, Vec<u32>>) -> Result<Self, Error> {
        for (v, ns) in &rot {
            let deg = self.edges.iter().filter(|e| e.u == *v || e.v == *v).count();
            if ns.len() != deg {
                return Err(Error::InvalidNetwork(format!(
                    "rotation at {v} lists {} neighbors, degree is {deg}",
                    ns.len()
                )));
            }
            for &w in ns {
                if !self.has_edge(*v, w) {
                    return Err(Error::InvalidNetwork(format!(
                        "rotation at {v} names non-neighbor {w}"
                    )));
                }
            }
        }
        self.rotations = Some(rot);
        Ok(self)
    }

    pub fn boundary(&self) -> &[u32] {
        &self.boundary
    }

    pub fn interior(&self) -> &[u32] {
        &self.interior
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn rotations(&self) -> Option<&BTreeMap<u32, Vec<u32>>> {
        self.rotations.as_ref()
    }

    pub fn node_count(&self) -> usize {
        self.boundary.len() + self.interior.len()
    }

    /// Boundary in circular order, then interior ascending.
    pub fn node_order(&self) -> Vec<u32> {
        let mut v = self.boundary.clone();
        let mut ints = self.interior.clone();
        ints.sort_unstable();
        v.extend(ints);
        v
    }

    pub fn circular_order(&self) -> CircularOrder {
        CircularOrder::new(self.boundary.clone())
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.edges.iter().any(|e| (e.u == u && e.v == v) || (e.u == v && e.v == u))
    }

    pub fn neighbors(&self, v: u32) -> Vec<u32> {
        let mut out: Vec<u32> = self
            .edges
            .iter()
            .filter_map(|e| {
                if e.u == v {
                    Some(e.v)
                } else if e.v == v {
                    Some(e.u)
                } else {
                    None
                }
            })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn is_connected(&self) -> bool {
        let nodes = self.node_order();
        if nodes.is_empty() {
            return true;
        }
        let mut seen = BTreeSet::new();
        let mut stack = vec![nodes[0]];
        seen.insert(nodes[0]);
        while let Some(u) = stack.pop() {
            for w in self.neighbors(u) {
                if seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        seen.len() == nodes.len()
    }

    /// Weighted graph Laplacian with the sign convention of non-positive
    /// diagonals: off-diagonal (i,j) is the conductance of edge {i,j}, the
    /// diagonal makes every row sum to zero.
    pub fn laplacian(&self, mode: Mode) -> Result<SquareMatrix, Error> {
        let order = self.node_order();
        let pos: BTreeMap<u32, usize> =
            order.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let mut l = SquareMatrix::zeros(order.clone(), mode);
        for e in &self.edges {
            let c = e
                .conductance
                .as_ref()
                .ok_or_else(|| {
                    Error::InvalidNetwork(format!("edge {}-{} has unknown conductance", e.u, e.v))
                })?
                .clone();
            let c = match mode {
                Mode::Exact => {
                    if !c.is_exact() {
                        return Err(Error::InvalidNetwork("float conductance in exact run".into()));
                    }
                    c
                }
                Mode::Float { tol } => c.to_float_mode(tol),
            };
            let (i, j) = (pos[&e.u], pos[&e.v]);
            l.set(i, j, l.get(i, j).clone() + c.clone());
            l.set(j, i, l.get(j, i).clone() + c.clone());
            l.set(i, i, l.get(i, i).clone() - c.clone());
            l.set(j, j, l.get(j, j).clone() - c);
        }
        Ok(l)
    }

    /// Kron reduction of the Laplacian onto the boundary terminals.
    pub fn response_matrix(&self, mode: Mode) -> Result<ResponseMatrix, Error> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let l = self.laplacian(mode)?;
        let keep: Vec<usize> = (0..self.boundary.len()).collect();
        let m = l.schur_complement(&keep)?;
        Ok(ResponseMatrix::new_unchecked(m))
    }

    /// Full pairwise effective-resistance matrix on all nodes.
    pub fn resistance_matrix(&self, mode: Mode) -> Result<SquareMatrix, Error> {
        if !self.is_connected() {
            return Err(Error::Disconnected);
        }
        let l = self.laplacian(mode)?;
        let r = w_from_m(&ResponseMatrix::new_unchecked(l))?;
        Ok(r.0)
    }

    /// All circular pairs of size <= max_k admitting vertex-disjoint path
    /// systems through interior nodes only.
    pub fn enumerate_connections(&self, max_k: usize) -> Result<BTreeSet<CircularPair>, Error> {
        if self.node_count() > CONNECTION_SEARCH_BOUND {
            return Err(Error::SizeGuard(self.node_count(), CONNECTION_SEARCH_BOUND));
        }
        let order = self.circular_order();
        let terminals: BTreeSet<u32> = self.boundary.iter().copied().collect();
        let adj: BTreeMap<u32, Vec<u32>> =
            self.node_order().into_iter().map(|v| (v, self.neighbors(v))).collect();
        let mut out = BTreeSet::new();
        for pair in enumerate_circular_pairs(&order, max_k) {
            if has_disjoint_paths(&adj, &terminals, &pair.p, &pair.q) {
                out.insert(pair);
            }
        }
        Ok(out)
    }

    /// Network text format: `node <id> boundary|interior`, `edge <u> <v> <c>`,
    /// optional `rot <id> <neighbors clockwise>`; `#` comments.
    pub fn parse(text: &str, mode: Mode) -> Result<Network, Error> {
        let mut boundary = Vec::new();
        let mut interior = Vec::new();
        let mut edges = Vec::new();
        let mut rotations: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
        for (lno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let toks: Vec<&str> = line.split_whitespace().collect();
            let err = |msg: &str| Error::Parse(format!("line {}: {msg}", lno + 1));
            match toks[0] {
                "node" => {
                    if toks.len() != 3 {
                        return Err(err("expected `node <id> boundary|interior`"));
                    }
                    let id: u32 = toks[1].parse().map_err(|_| err("bad node id"))?;
                    match toks[2] {
                        "boundary" => boundary.push(id),
                        "interior" => interior.push(id),
                        _ => return Err(err("node kind must be boundary or interior")),
                    }
                }
                "edge" => {
                    if toks.len() != 4 {
                        return Err(err("expected `edge <u> <v> <conductance>`"));
                    }
                    let u: u32 = toks[1].parse().map_err(|_| err("bad node id"))?;
                    let v: u32 = toks[2].parse().map_err(|_| err("bad node id"))?;
                    let c = Scalar::parse(toks[3], mode)?;
                    edges.push((u, v, Some(c)));
                }
                "rot" => {
                    let id: u32 = toks
                        .get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or_else(|| err("bad rot id"))?;
                    let ns: Result<Vec<u32>, _> = toks[2..].iter().map(|t| t.parse()).collect();
                    rotations.insert(id, ns.map_err(|_| err("bad rot neighbor"))?);
                }
                _ => return Err(err("unknown directive")),
            }
        }
        let net = Network::new(boundary, interior, edges)?;
        if rotations.is_empty() {
            Ok(net)
        } else {
            net.with_rotations(rotations)
        }
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for &b in &self.boundary {
            s.push_str(&format!("node {b} boundary\n"));
        }
        let mut ints = self.interior.clone();
        ints.sort_unstable();
        for i in ints {
            s.push_str(&format!("node {i} interior\n"));
        }
        for e in &self.edges {
            match &e.conductance {
                Some(c) => s.push_str(&format!("edge {} {} {}\n", e.u, e.v, c)),
                None => s.push_str(&format!("edge {} {} ?\n", e.u, e.v)),
            }
        }
        if let Some(rot) = &self.rotations {
            for (v, ns) in rot {
                let list: Vec<String> = ns.iter().map(|x| x.to_string()).collect();
                s.push_str(&format!("rot {v} {}\n", list.join(" ")));
            }
        }
        s
    }
}

/// Vertex-disjoint path system: path i runs from p[i] to q[i], intermediate
/// nodes are interior only, no node reused across paths.
fn has_disjoint_paths(
    adj: &BTreeMap<u32, Vec<u32>>,
    terminals: &BTreeSet<u32>,
    p: &[u32],
    q: &[u32],
) -> bool {
    fn route(
        adj: &BTreeMap<u32, Vec<u32>>,
        terminals: &BTreeSet<u32>,
        pairs: &[(u32, u32)],
        idx: usize,
        cur: u32,
        used: &mut BTreeSet<u32>,
    ) -> bool {
        let (_, target) = pairs[idx];
        for &nb in adj.get(&cur).map(|v| v.as_slice()).unwrap_or(&[]) {
            if nb == target {
                if idx + 1 == pairs.len() {
                    return true;
                }
                let (next_src, _) = pairs[idx + 1];
                if route(adj, terminals, pairs, idx + 1, next_src, used) {
                    return true;
                }
                continue;
            }
            if terminals.contains(&nb) || used.contains(&nb) {
                continue;
            }
            used.insert(nb);
            if route(adj, terminals, pairs, idx, nb, used) {
                return true;
            }
            used.remove(&nb);
        }
        false
    }
    let pairs: Vec<(u32, u32)> = p.iter().copied().zip(q.iter().copied()).collect();
    let mut used = BTreeSet::new();
    route(adj, terminals, &pairs, 0, pairs[0].0, &mut used)
}

/// The 7-node worked example used across the test suite.
#[cfg(test)]
pub(crate) fn example_network() -> Network {
    let edges = vec![
        (1, 6, Some(Scalar::from_int(1))),
        (2, 3, Some(Scalar::from_int(1))),
        (3, 7, Some(Scalar::from_int(3))),
        (4, 5, Some(Scalar::from_int(1))),
        (4, 7, Some(Scalar::from_int(1))),
        (5, 6, Some(Scalar::from_int(2))),
        (6, 7, Some(Scalar::from_int(2))),
    ];
    let rot: BTreeMap<u32, Vec<u32>> = [
        (1, vec![6]),
        (2, vec![3]),
        (3, vec![7, 2]),
        (4, vec![5, 7]),
        (5, vec![6, 4]),
        (6, vec![1, 7, 5]),
        (7, vec![3, 4, 6]),
    ]
    .into_iter()
    .collect();
    Network::new(vec![1, 2, 3, 4, 5], vec![6, 7], edges)
        .unwrap()
        .with_rotations(rot)
        .unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circular::CircularPair;
    use crate::response::ResistanceMatrix;

    #[test]
    fn laplacian_matches_published() {
        let net = example_network();
        let l = net.laplacian(Mode::Exact).unwrap();
        let want = SquareMatrix::parse(
            "7\n-1 0 0 0 0 1 0\n0 -1 1 0 0 0 0\n0 1 -4 0 0 0 3\n0 0 0 -2 1 0 1\n0 0 0 1 -3 2 0\n1 0 0 0 2 -5 2\n0 0 3 1 0 2 -6\n",
            Mode::Exact,
        )
        .unwrap();
        assert_eq!(l, want);
        assert_eq!(*l.by_labels(3, 7), Scalar::from_int(3));
        assert_eq!(*l.by_labels(6, 6), Scalar::from_int(-5));
    }

    #[test]
    fn single_edge_laplacian() {
        let net = Network::new(vec![1, 2], vec![], vec![(1, 2, Some(Scalar::from_int(2)))]).unwrap();
        let l = net.laplacian(Mode::Exact).unwrap();
        assert_eq!(*l.get(0, 0), Scalar::from_int(-2));
        assert_eq!(*l.get(0, 1), Scalar::from_int(2));
    }

    #[test]
    fn response_matches_published() {
        let net = example_network();
        let m = net.response_matrix(Mode::Exact).unwrap();
        assert_eq!(*m.0.by_labels(5, 5), Scalar::from_ratio(-27, 13));
        let want = SquareMatrix::parse(
            "5\n-10/13 0 3/13 1/13 6/13\n0 -1 1 0 0\n3/13 1 -59/26 15/26 6/13\n1/13 0 15/26 -47/26 15/13\n6/13 0 6/13 15/13 -27/13\n",
            Mode::Exact,
        )
        .unwrap();
        assert_eq!(m.0, want);
    }

    #[test]
    fn all_boundary_response_is_laplacian() {
        let net = Network::new(
            vec![1, 2, 3],
            vec![],
            vec![
                (1, 2, Some(Scalar::from_int(1))),
                (2, 3, Some(Scalar::from_int(2))),
            ],
        )
        .unwrap();
        assert_eq!(net.response_matrix(Mode::Exact).unwrap().0, net.laplacian(Mode::Exact).unwrap());
    }

    #[test]
    fn resistance_matches_published() {
        let net = example_network();
        let r = net.resistance_matrix(Mode::Exact).unwrap();
        assert_eq!(*r.by_labels(1, 2), Scalar::from_ratio(11, 4));
        assert_eq!(*r.by_labels(6, 7), Scalar::from_ratio(5, 12));
        // restriction to the boundary equals W
        let m = net.response_matrix(Mode::Exact).unwrap();
        let w = w_from_m(&m).unwrap();
        let idx: Vec<usize> = (0..5).collect();
        assert_eq!(r.minor_matrix(&idx, &idx), w.0);
        let _ = ResistanceMatrix::new(w.0).unwrap();
    }

    #[test]
    fn disconnected_rejected() {
        let net = Network::new(
            vec![1, 2, 3],
            vec![],
            vec![(1, 2, Some(Scalar::from_int(1)))],
        )
        .unwrap();
        assert!(matches!(net.response_matrix(Mode::Exact), Err(Error::Disconnected)));
    }

    #[test]
    fn connections_match_published_counts() {
        let net = example_network();
        let conns = net.enumerate_connections(2).unwrap();
        let ones = conns.iter().filter(|c| c.size() == 1).count();
        let twos = conns.iter().filter(|c| c.size() == 2).count();
        // 14 ordered 1-connections (the nonzero off-diagonals), five 2-connections
        assert_eq!(ones, 14);
        assert_eq!(twos, 10); // ordered; 5 unordered
        assert!(conns.contains(&CircularPair::new(vec![1, 3], vec![5, 4])));
        assert!(!conns.contains(&CircularPair::new(vec![2, 3], vec![1, 4])));
    }

    #[test]
    fn parallel_edges_merge() {
        let net = Network::new(
            vec![1, 2],
            vec![],
            vec![
                (1, 2, Some(Scalar::from_int(1))),
                (2, 1, Some(Scalar::from_int(2))),
            ],
        )
        .unwrap();
        assert_eq!(net.edges().len(), 1);
        assert_eq!(net.edges()[0].conductance, Some(Scalar::from_int(3)));
    }

    #[test]
    fn text_roundtrip() {
        let net = example_network();
        let t = net.to_text();
        let back = Network::parse(&t, Mode::Exact).unwrap();
        assert_eq!(net, back);
    }
}
