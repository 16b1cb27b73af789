//! Kalmanson testing, circular-order discovery, and the exact correspondence
//! between Kalmanson resistance metrics and weighted circular split systems.

use std::collections::{BTreeMap, BTreeSet};

use crate::circular::CircularOrder;
use crate::error::Error;
use crate::matrix::SquareMatrix;
use crate::response::ResistanceMatrix;
use crate::scalar::{Mode, Scalar, ABS_FLOOR};

/// Exhaustive order search keeps to (n-1)!/2 with pruning below this size.
pub const ORDER_SEARCH_BOUND: usize = 10;

/// A bipartition of the terminal set with a positive weight. The stored side
/// is the part NOT containing the smallest terminal label (canonical form).
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSplit {
    side: BTreeSet<u32>,
    pub weight: Scalar,
}

impl WeightedSplit {
    pub fn new(part: BTreeSet<u32>, ground: &BTreeSet<u32>, weight: Scalar) -> Self {
        let min = *ground.iter().next().expect("empty ground set");
        let side = if part.contains(&min) {
            ground.difference(&part).copied().collect()
        } else {
            part
        };
        WeightedSplit { side, weight }
    }

    /// The canonical side (not containing the smallest terminal).
    pub fn side(&self) -> &BTreeSet<u32> {
        &self.side
    }

    pub fn other_side(&self, ground: &BTreeSet<u32>) -> BTreeSet<u32> {
        ground.difference(&self.side).copied().collect()
    }

    pub fn is_trivial(&self, ground: &BTreeSet<u32>) -> bool {
        self.side.len() == 1 || self.side.len() + 1 == ground.len()
    }

    pub fn separates(&self, a: u32, b: u32) -> bool {
        self.side.contains(&a) != self.side.contains(&b)
    }

    /// The side as a contiguous arc of positions under `order`, if it is one:
    /// (first position, length) clockwise.
    pub fn arc_positions(&self, order: &CircularOrder) -> Option<(usize, usize)> {
        let n = order.len();
        let len = self.side.len();
        if len == 0 || len >= n {
            return None;
        }
        let inside: Vec<bool> = (0..n).map(|p| self.side.contains(&order.at(p))).collect();
        // find a position where the arc starts (previous position outside)
        let start = (0..n).find(|&p| inside[p] && !inside[(p + n - 1) % n])?;
        if (0..len).all(|k| inside[(start + k) % n]) && len == inside.iter().filter(|&&b| b).count()
        {
            Some((start, len))
        } else {
            None
        }
    }

    pub fn is_consistent(&self, order: &CircularOrder) -> bool {
        self.arc_positions(order).is_some()
    }
}

impl std::fmt::Display for WeightedSplit {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let side: Vec<String> = self.side.iter().map(|x| x.to_string()).collect();
        write!(f, "{{{}}} w={}", side.join(","), self.weight)
    }
}

/// A set of weighted splits all consistent with one circular order.
#[derive(Debug, Clone)]
pub struct WeightedSplitSystem {
    pub order: CircularOrder,
    splits: Vec<WeightedSplit>,
}

impl WeightedSplitSystem {
    pub fn new(order: CircularOrder, splits: Vec<WeightedSplit>) -> Result<Self, Error> {
        let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
        for s in &splits {
            if !s.is_consistent(&order) {
                return Err(Error::InvalidNetwork(format!(
                    "split {s} is not an arc of the circular order"
                )));
            }
            if !seen.insert(s.side.iter().copied().collect()) {
                return Err(Error::InvalidNetwork(format!("duplicate split {s}")));
            }
        }
        let mut splits = splits;
        splits.sort_by(|a, b| {
            (a.side.len(), a.side.iter().collect::<Vec<_>>())
                .cmp(&(b.side.len(), b.side.iter().collect::<Vec<_>>()))
        });
        Ok(WeightedSplitSystem { order, splits })
    }

    pub fn splits(&self) -> &[WeightedSplit] {
        &self.splits
    }

    pub fn ground(&self) -> BTreeSet<u32> {
        self.order.seq().iter().copied().collect()
    }

    pub fn find(&self, side: &BTreeSet<u32>) -> Option<&WeightedSplit> {
        let ground = self.ground();
        let min = *ground.iter().next().unwrap();
        let canon: BTreeSet<u32> = if side.contains(&min) {
            ground.difference(side).copied().collect()
        } else {
            side.clone()
        };
        self.splits.iter().find(|s| s.side == canon)
    }

    /// Split-system text format: header `order <labels>`, then one line per
    /// split `weight part1 | part2`.
    pub fn to_text(&self) -> String {
        let order: Vec<String> = self.order.seq().iter().map(|x| x.to_string()).collect();
        let ground = self.ground();
        let mut s = format!("order {}\n", order.join(" "));
        for sp in &self.splits {
            let a: Vec<String> = sp.side.iter().map(|x| x.to_string()).collect();
            let b: Vec<String> = sp.other_side(&ground).iter().map(|x| x.to_string()).collect();
            s.push_str(&format!("{} {} | {}\n", sp.weight, a.join(" "), b.join(" ")));
        }
        s
    }

    pub fn parse(text: &str, mode: Mode) -> Result<Self, Error> {
        let mut order: Option<CircularOrder> = None;
        let mut splits = Vec::new();
        for (lno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let err = |m: &str| Error::Parse(format!("line {}: {m}", lno + 1));
            if let Some(rest) = line.strip_prefix("order ") {
                let seq: Result<Vec<u32>, _> =
                    rest.split_whitespace().map(|t| t.parse()).collect();
                order = Some(CircularOrder::new(seq.map_err(|_| err("bad order"))?));
                continue;
            }
            let ord = order.as_ref().ok_or_else(|| err("order line must come first"))?;
            let ground: BTreeSet<u32> = ord.seq().iter().copied().collect();
            let (w_tok, rest) =
                line.split_once(' ').ok_or_else(|| err("expected `weight part | part`"))?;
            let weight = Scalar::parse(w_tok, mode)?;
            let (a, _b) = rest.split_once('|').ok_or_else(|| err("missing `|`"))?;
            let part: Result<BTreeSet<u32>, _> =
                a.split_whitespace().map(|t| t.parse()).collect();
            splits.push(WeightedSplit::new(
                part.map_err(|_| err("bad terminal label"))?,
                &ground,
                weight,
            ));
        }
        let order = order.ok_or_else(|| Error::Parse("missing order header".into()))?;
        WeightedSplitSystem::new(order, splits)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KalmansonVerdict {
    Kalmanson,
    Violated { witness: [u32; 4] },
}

impl KalmansonVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, KalmansonVerdict::Kalmanson)
    }
}

/// Both quadruple inequalities for every 4-subset in circular order:
/// W_ik + W_jl >= W_ij + W_kl and W_ik + W_jl >= W_jk + W_il.
pub fn is_kalmanson(w: &SquareMatrix, order: &CircularOrder) -> KalmansonVerdict {
    let n = order.len();
    let pos: Vec<usize> = order
        .seq()
        .iter()
        .map(|&l| w.position_of(l).expect("order label missing from matrix"))
        .collect();
    for a in 0..n {
        for b in (a + 1)..n {
            for c in (b + 1)..n {
                for d in (c + 1)..n {
                    if !quad_ok(w, pos[a], pos[b], pos[c], pos[d]) {
                        return KalmansonVerdict::Violated {
                            witness: [order.at(a), order.at(b), order.at(c), order.at(d)],
                        };
                    }
                }
            }
        }
    }
    KalmansonVerdict::Kalmanson
}

fn quad_ok(w: &SquareMatrix, i: usize, j: usize, k: usize, l: usize) -> bool {
    let lhs = w.get(i, k).clone() + w.get(j, l).clone();
    let r1 = w.get(i, j).clone() + w.get(k, l).clone();
    let r2 = w.get(j, k).clone() + w.get(i, l).clone();
    ge_with_tol(&lhs, &r1) && ge_with_tol(&lhs, &r2)
}

fn ge_with_tol(a: &Scalar, b: &Scalar) -> bool {
    match (a, b) {
        (Scalar::Exact(x), Scalar::Exact(y)) => x >= y,
        (Scalar::Float { value: x, tol: tx }, Scalar::Float { value: y, tol: ty }) => {
            let tol = tx.max(*ty);
            *x >= *y - (tol * x.abs().max(y.abs())).max(ABS_FLOOR)
        }
        _ => panic!("mixed exact/float comparison"),
    }
}

#[derive(Debug, Clone)]
pub enum OrderSearch {
    /// A Kalmanson order was found; `consistent_orders` counts the distinct
    /// orders (up to rotation/reflection) when the search was exhaustive.
    Found { order: CircularOrder, consistent_orders: Option<usize> },
    /// Exhaustive search proved no circular order works.
    NoneExists,
    /// Beyond the exhaustive bound and the heuristic candidate failed.
    Undetermined,
}

impl OrderSearch {
    pub fn found(&self) -> Option<&CircularOrder> {
        match self {
            OrderSearch::Found { order, .. } => Some(order),
            _ => None,
        }
    }
}

/// Find a circular order under which `w` is Kalmanson. Exhaustive
/// branch-and-bound up to `ORDER_SEARCH_BOUND` terminals (counting all
/// solutions), nearest-neighbor heuristic plus verification beyond.
pub fn find_circular_order(w: &SquareMatrix) -> OrderSearch {
    let labels = w.labels().to_vec();
    let n = labels.len();
    if n <= 3 {
        // Kalmanson is vacuous below 4 terminals
        return OrderSearch::Found {
            order: CircularOrder::new(labels).canonical(),
            consistent_orders: Some(1),
        };
    }
    if n <= ORDER_SEARCH_BOUND {
        let mut found: Vec<CircularOrder> = Vec::new();
        let mut prefix: Vec<usize> = vec![0]; // positions into labels; fix smallest first
        let mut used = vec![false; n];
        used[0] = true;
        search_orders(w, &labels, &mut prefix, &mut used, &mut found);
        if found.is_empty() {
            OrderSearch::NoneExists
        } else {
            let count = found.len();
            OrderSearch::Found { order: found.swap_remove(0), consistent_orders: Some(count) }
        }
    } else {
        // nearest-neighbor chain from the first label
        let mut seq = vec![0usize];
        let mut used = vec![false; n];
        used[0] = true;
        while seq.len() < n {
            let cur = *seq.last().unwrap();
            let next = (0..n)
                .filter(|&i| !used[i])
                .min_by(|&a, &b| w.get(cur, a).cmp_value(w.get(cur, b)))
                .unwrap();
            used[next] = true;
            seq.push(next);
        }
        let order = CircularOrder::new(seq.into_iter().map(|i| labels[i]).collect());
        if is_kalmanson(w, &order).holds() {
            OrderSearch::Found { order: order.canonical(), consistent_orders: None }
        } else {
            OrderSearch::Undetermined
        }
    }
}

fn search_orders(
    w: &SquareMatrix,
    labels: &[u32],
    prefix: &mut Vec<usize>,
    used: &mut Vec<bool>,
    found: &mut Vec<CircularOrder>,
) {
    let n = labels.len();
    if prefix.len() == n {
        // reflection symmetry: keep the representative with prefix[1] < prefix[n-1]
        if prefix[1] < prefix[n - 1] {
            found.push(CircularOrder::new(prefix.iter().map(|&i| labels[i]).collect()));
        }
        return;
    }
    for cand in 1..n {
        if used[cand] {
            continue;
        }
        prefix.push(cand);
        let p = prefix.len() - 1;
        // every new quadruple ending at the candidate must satisfy Kalmanson
        let mut ok = true;
        'quads: for a in 0..p {
            for b in (a + 1)..p {
                for c in (b + 1)..p {
                    if !quad_ok(w, prefix[a], prefix[b], prefix[c], prefix[p]) {
                        ok = false;
                        break 'quads;
                    }
                }
            }
        }
        if ok {
            used[cand] = true;
            search_orders(w, labels, prefix, used, found);
            used[cand] = false;
        }
        prefix.pop();
    }
}

/// The unique weighted circular split system of a Kalmanson metric, via the
/// closed-form arc weights: for the split whose side is the arc of positions
/// i..=j, weight = (d(i-1,j) + d(i,j+1) - d(i-1,j+1) - d(i,j)) / 2.
/// Zero-weight splits are omitted; a significantly negative weight reports
/// the order as not Kalmanson.
pub fn split_decomposition(
    w: &ResistanceMatrix,
    order: &CircularOrder,
) -> Result<WeightedSplitSystem, Error> {
    let wm = w.matrix();
    let n = order.len();
    let mode = wm.mode();
    let ground: BTreeSet<u32> = order.seq().iter().copied().collect();
    let min_label = *ground.iter().next().ok_or_else(|| Error::Dimension("empty".into()))?;
    let min_pos = order.position(min_label).unwrap();
    let pos: Vec<usize> = (0..n)
        .map(|p| wm.position_of(order.at(p)).expect("order label missing"))
        .collect();
    let d = |a: i64, b: i64| -> Scalar {
        let a = a.rem_euclid(n as i64) as usize;
        let b = b.rem_euclid(n as i64) as usize;
        wm.get(pos[a], pos[b]).clone()
    };
    let half = match mode {
        Mode::Exact => Scalar::from_ratio(1, 2),
        Mode::Float { tol } => Scalar::from_f64(0.5, tol),
    };
    let zero_gate = match mode {
        Mode::Exact => 0.0,
        Mode::Float { tol } => (tol * wm.max_abs().max(1.0)).max(ABS_FLOOR),
    };
    let mut splits = Vec::new();
    for start in 0..n {
        for len in 1..n {
            // canonical side: the arc not containing the smallest label
            if (0..len).any(|k| (start + k) % n == min_pos) {
                continue;
            }
            let (i, j) = (start as i64, (start + len - 1) as i64);
            let alpha = (d(i - 1, j) + d(i, j + 1) - d(i - 1, j + 1) - d(i, j)) * half.clone();
            let af = alpha.to_f64();
            if af < -zero_gate.max(ABS_FLOOR) && alpha.is_negative() {
                let arc: Vec<String> =
                    (0..len).map(|k| order.at(start + k).to_string()).collect();
                return Err(Error::NotKalmanson(arc.join(",")));
            }
            let keep = match mode {
                Mode::Exact => !alpha.is_zero(),
                Mode::Float { .. } => af > zero_gate,
            };
            if keep {
                let side: BTreeSet<u32> = (0..len).map(|k| order.at(start + k)).collect();
                splits.push(WeightedSplit::new(side, &ground, alpha));
            }
        }
    }
    WeightedSplitSystem::new(order.clone(), splits)
}

/// d(i,j) = sum of the weights of splits separating i and j.
pub fn split_metric(s: &WeightedSplitSystem) -> ResistanceMatrix {
    let labels: Vec<u32> = {
        let mut v: Vec<u32> = s.order.seq().to_vec();
        v.sort_unstable();
        v
    };
    let mode = s
        .splits
        .first()
        .map(|sp| sp.weight.mode())
        .unwrap_or(Mode::Exact);
    let mut m = SquareMatrix::zeros(labels.clone(), mode);
    for (i, &a) in labels.iter().enumerate() {
        for (j, &b) in labels.iter().enumerate() {
            if i == j {
                continue;
            }
            let mut acc = mode.zero();
            for sp in &s.splits {
                if sp.separates(a, b) {
                    acc += sp.weight.clone();
                }
            }
            m.set(i, j, acc);
        }
    }
    ResistanceMatrix::new_unchecked(m)
}

/// Brute-force oracle: solve the linear system expressing the metric as a sum
/// of arc-split weights (test support for the closed-form decomposition).
pub fn split_decomposition_oracle(
    w: &ResistanceMatrix,
    order: &CircularOrder,
) -> Result<WeightedSplitSystem, Error> {
    let n = order.len();
    let ground: BTreeSet<u32> = order.seq().iter().copied().collect();
    let min_label = *ground.iter().next().unwrap();
    let min_pos = order.position(min_label).unwrap();
    // unknowns: all arcs avoiding min_pos
    let mut arcs: Vec<BTreeSet<u32>> = Vec::new();
    for start in 0..n {
        for len in 1..n {
            if (0..len).any(|k| (start + k) % n == min_pos) {
                continue;
            }
            arcs.push((0..len).map(|k| order.at(start + k)).collect());
        }
    }
    // equations: one per unordered terminal pair
    let mut pairs = Vec::new();
    let seq = order.seq();
    for i in 0..n {
        for j in (i + 1)..n {
            pairs.push((seq[i], seq[j]));
        }
    }
    assert_eq!(arcs.len(), pairs.len());
    let dim = arcs.len();
    let mode = w.matrix().mode();
    let mut a = SquareMatrix::zeros((1..=dim as u32).collect(), mode);
    for (r, &(x, y)) in pairs.iter().enumerate() {
        for (c, arc) in arcs.iter().enumerate() {
            if arc.contains(&x) != arc.contains(&y) {
                a.set(r, c, mode.one());
            }
        }
    }
    let inv = a.inverse().map_err(|_| Error::Dimension("split system singular".into()))?;
    let mut splits = Vec::new();
    for (c, arc) in arcs.iter().enumerate() {
        let mut weight = mode.zero();
        for (r, &(x, y)) in pairs.iter().enumerate() {
            let wxy = w.matrix().by_labels(x, y).clone();
            weight += inv.get(c, r).clone() * wxy;
        }
        if !weight.is_zero() && weight.to_f64().abs() > ABS_FLOOR {
            splits.push(WeightedSplit::new(arc.clone(), &ground, weight));
        }
    }
    WeightedSplitSystem::new(order.clone(), splits)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mats_w() -> ResistanceMatrix {
        ResistanceMatrix::new(
            SquareMatrix::parse(
                "5\n0 11/4 7/4 7/4 17/12\n11/4 0 1 2 2\n7/4 1 0 1 1\n7/4 2 1 0 2/3\n17/12 2 1 2/3 0\n",
                Mode::Exact,
            )
            .unwrap(),
        )
        .unwrap()
    }

    fn set(v: &[u32]) -> BTreeSet<u32> {
        v.iter().copied().collect()
    }

    #[test]
    fn kalmanson_verdicts() {
        let w = mats_w();
        assert!(is_kalmanson(w.matrix(), &CircularOrder::counting(5)).holds());

        // constructed violation: W13+W24 < W12+W34
        let bad = SquareMatrix::parse("4\n0 5 1 2\n5 0 2 5\n1 2 0 5\n2 5 5 0\n", Mode::Exact).unwrap();
        match is_kalmanson(&bad, &CircularOrder::counting(4)) {
            KalmansonVerdict::Violated { witness } => assert_eq!(witness, [1, 2, 3, 4]),
            _ => panic!("expected violation"),
        }
    }

    #[test]
    fn decomposition_of_example() {
        let w = mats_w();
        let s = split_decomposition(&w, &CircularOrder::counting(5)).unwrap();
        assert_eq!(s.splits().len(), 7);
        let ground = s.ground();
        assert_eq!(s.find(&set(&[1, 5])).unwrap().weight, Scalar::from_ratio(1, 6));
        assert_eq!(s.find(&set(&[4])).unwrap().weight, Scalar::from_ratio(1, 3));
        assert_eq!(s.find(&set(&[2, 3])).unwrap().weight, Scalar::from_ratio(1, 2));
        assert!(s.find(&set(&[3])).is_none(), "no trivial split at terminal 3");
        // the full expected system
        assert_eq!(s.find(&set(&[2])).unwrap().weight, Scalar::from_int(1));
        assert_eq!(s.find(&set(&[5])).unwrap().weight, Scalar::from_ratio(1, 6));
        assert_eq!(s.find(&set(&[4, 5])).unwrap().weight, Scalar::from_ratio(1, 6));
        assert_eq!(
            s.find(&set(&[2, 3, 4, 5])).unwrap().weight,
            Scalar::from_ratio(13, 12),
            "trivial split at terminal 1"
        );
        let _ = ground;
        // metric round trip, and the published W15 path sum
        let back = split_metric(&s);
        assert_eq!(back.matrix().by_labels(1, 5), w.matrix().by_labels(1, 5));
        assert_eq!(back.matrix(), w.matrix());
        let w15 = Scalar::from_ratio(1, 6) + Scalar::from_ratio(1, 6) + Scalar::from_ratio(13, 12);
        assert_eq!(*w.matrix().by_labels(1, 5), w15);
    }

    #[test]
    fn decomposition_matches_linear_system_oracle() {
        let w = mats_w();
        let order = CircularOrder::counting(5);
        let a = split_decomposition(&w, &order).unwrap();
        let b = split_decomposition_oracle(&w, &order).unwrap();
        assert_eq!(a.splits().len(), b.splits().len());
        for s in a.splits() {
            assert_eq!(b.find(s.side()).unwrap().weight, s.weight);
        }
    }

    #[test]
    fn star_tree_metric() {
        // star with unit legs on 4 leaves: d(i,j) = 2
        let mut m = SquareMatrix::zeros((1..=4).collect(), Mode::Exact);
        for i in 0..4 {
            for j in 0..4 {
                if i != j {
                    m.set(i, j, Scalar::from_int(2));
                }
            }
        }
        let w = ResistanceMatrix::new_unchecked(m);
        let s = split_decomposition(&w, &CircularOrder::counting(4)).unwrap();
        assert_eq!(s.splits().len(), 4);
        for sp in s.splits() {
            assert!(sp.is_trivial(&s.ground()));
            assert_eq!(sp.weight, Scalar::from_int(1));
        }
    }

    #[test]
    fn empty_system_metric_is_zero() {
        let s = WeightedSplitSystem::new(CircularOrder::counting(3), vec![]).unwrap();
        let m = split_metric(&s);
        assert!(m.matrix().get(0, 1).is_zero());
    }

    #[test]
    fn order_search_small() {
        let w = mats_w();
        match find_circular_order(w.matrix()) {
            OrderSearch::Found { order, consistent_orders } => {
                assert!(is_kalmanson(w.matrix(), &order).holds());
                assert!(consistent_orders.unwrap() >= 1);
            }
            other => panic!("expected Found, got {other:?}"),
        }
        // any 3-point metric: counting order
        let m3 = SquareMatrix::parse("3\n0 1 2\n1 0 3\n2 3 0\n", Mode::Exact).unwrap();
        let found = find_circular_order(&m3);
        assert!(found.found().unwrap().same_cycle(&CircularOrder::counting(3)));
    }

    #[test]
    fn text_roundtrip() {
        let w = mats_w();
        let s = split_decomposition(&w, &CircularOrder::counting(5)).unwrap();
        let t = s.to_text();
        let back = WeightedSplitSystem::parse(&t, Mode::Exact).unwrap();
        assert_eq!(back.splits().len(), s.splits().len());
        assert_eq!(split_metric(&back).matrix(), split_metric(&s).matrix());
    }
}
