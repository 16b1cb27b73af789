//! Circular orders, circular pairs, circular minors, and the planarity test.

use std::cmp::Ordering;

use crate::error::Error;
use crate::matrix::SquareMatrix;
use crate::scalar::{Mode, Scalar, ABS_FLOOR};

/// Guard for full planarity scans; the number of circular pairs explodes.
pub const DEFAULT_PLANARITY_BOUND: usize = 12;

/// A cyclic sequence of terminal labels. Two orders are equal iff related by
/// rotation or reflection; `canonical` picks the representative starting at
/// the smallest label in the lexicographically smaller direction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CircularOrder {
    seq: Vec<u32>,
}

impl CircularOrder {
    pub fn new(seq: Vec<u32>) -> Self {
        CircularOrder { seq }
    }

    pub fn counting(n: usize) -> Self {
        CircularOrder { seq: (1..=n as u32).collect() }
    }

    pub fn len(&self) -> usize {
        self.seq.len()
    }

    pub fn is_empty(&self) -> bool {
        self.seq.is_empty()
    }

    pub fn seq(&self) -> &[u32] {
        &self.seq
    }

    pub fn at(&self, pos: usize) -> u32 {
        let n = self.seq.len();
        self.seq[pos.rem_euclid(n)]
    }

    pub fn position(&self, label: u32) -> Option<usize> {
        self.seq.iter().position(|&l| l == label)
    }

    pub fn canonical(&self) -> CircularOrder {
        let n = self.seq.len();
        if n == 0 {
            return self.clone();
        }
        let start = self.seq.iter().enumerate().min_by_key(|(_, &l)| l).unwrap().0;
        let fwd: Vec<u32> = (0..n).map(|k| self.seq[(start + k) % n]).collect();
        let bwd: Vec<u32> = (0..n).map(|k| self.seq[(start + n - k % n) % n]).collect();
        if fwd <= bwd {
            CircularOrder { seq: fwd }
        } else {
            CircularOrder { seq: bwd }
        }
    }

    pub fn same_cycle(&self, other: &CircularOrder) -> bool {
        self.canonical().seq == other.canonical().seq
    }
}

/// Two disjoint equal-length ordered terminal lists, non-interlaced on the
/// ambient circular order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CircularPair {
    pub p: Vec<u32>,
    pub q: Vec<u32>,
}

impl CircularPair {
    pub fn new(p: Vec<u32>, q: Vec<u32>) -> Self {
        CircularPair { p, q }
    }

    pub fn size(&self) -> usize {
        self.p.len()
    }
}

impl std::fmt::Display for CircularPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let ps: Vec<String> = self.p.iter().map(|x| x.to_string()).collect();
        let qs: Vec<String> = self.q.iter().map(|x| x.to_string()).collect();
        write!(f, "({};{})", ps.join(","), qs.join(","))
    }
}

/// True iff (P;Q) is a valid circular pair under `order`: disjoint, equal
/// length, and the concatenation (p1..pk, qk..q1) goes around the circle at
/// most once.
pub fn is_circular_pair(p: &[u32], q: &[u32], order: &CircularOrder) -> bool {
    if p.is_empty() || p.len() != q.len() {
        return false;
    }
    let mut concat: Vec<u32> = p.to_vec();
    concat.extend(q.iter().rev());
    let mut seen = std::collections::BTreeSet::new();
    for &t in &concat {
        if order.position(t).is_none() || !seen.insert(t) {
            return false;
        }
    }
    let n = order.len();
    let base = order.position(concat[0]).unwrap();
    let mut prev = 0usize;
    for &t in &concat[1..] {
        let rel = (order.position(t).unwrap() + n - base) % n;
        if rel <= prev {
            return false;
        }
        prev = rel;
    }
    true
}

/// Every circular pair of size 1..=max_k, sizes ascending. For each 2k-subset
/// of positions (lexicographic) each of its 2k rotations yields one ordered
/// pair: P = the first k chosen points clockwise, Q = the rest reversed.
pub fn enumerate_circular_pairs(
    order: &CircularOrder,
    max_k: usize,
) -> impl Iterator<Item = CircularPair> + '_ {
    let n = order.len();
    (1..=max_k).flat_map(move |k| {
        subsets(n, 2 * k).into_iter().flat_map(move |sub: Vec<usize>| {
            (0..2 * k).map(move |r| {
                let rot: Vec<usize> =
                    (0..2 * k).map(|i| sub[(r + i) % (2 * k)]).collect();
                let p: Vec<u32> = rot[..k].iter().map(|&i| order.at(i)).collect();
                let q: Vec<u32> = rot[k..].iter().rev().map(|&i| order.at(i)).collect();
                CircularPair::new(p, q)
            })
        })
    })
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    if k > n {
        return out;
    }
    let mut cur: Vec<usize> = (0..k).collect();
    loop {
        out.push(cur.clone());
        // next combination
        let mut i = k;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if cur[i] != i + n - k {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        cur[i] += 1;
        for j in i + 1..k {
            cur[j] = cur[j - 1] + 1;
        }
    }
}

/// Determinant of the submatrix with rows in P-order and columns in Q-order.
pub fn circular_minor(m: &SquareMatrix, pair: &CircularPair) -> Scalar {
    let rows: Vec<usize> =
        pair.p.iter().map(|&l| m.position_of(l).expect("label not in matrix")).collect();
    let cols: Vec<usize> =
        pair.q.iter().map(|&l| m.position_of(l).expect("label not in matrix")).collect();
    m.minor_matrix(&rows, &cols).determinant()
}

/// Scale-aware threshold for classifying a float minor against zero:
/// tol * k! * prod over P-rows of the row max-abs (Leibniz term bound),
/// floored at ABS_FLOOR. Exact mode returns 0.
pub fn minor_threshold(m: &SquareMatrix, pair: &CircularPair) -> f64 {
    match m.mode() {
        Mode::Exact => 0.0,
        Mode::Float { tol } => {
            let mut scale = 1.0f64;
            for (i, _) in pair.p.iter().enumerate() {
                scale *= (i + 1) as f64; // k!
            }
            for &l in &pair.p {
                let row = m.position_of(l).expect("label not in matrix");
                scale *= m.row_max_abs(row);
            }
            (tol * scale).max(ABS_FLOOR)
        }
    }
}

/// Sign of a circular minor with the float threshold applied.
pub fn minor_sign(m: &SquareMatrix, pair: &CircularPair) -> Ordering {
    let d = circular_minor(m, pair);
    d.sign_with_threshold(minor_threshold(m, pair))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Planarity {
    Planar,
    NonPlanar { witness: CircularPair },
}

/// Checks all circular minors of sizes 1..=⌊n/2⌋ for non-negativity; stops at
/// the first negative witness (minimal size first).
pub fn is_circular_planar(
    m: &SquareMatrix,
    order: &CircularOrder,
    bound: usize,
) -> Result<Planarity, Error> {
    let n = order.len();
    if n > bound {
        return Err(Error::SizeGuard(n, bound));
    }
    for pair in enumerate_circular_pairs(order, n / 2) {
        if minor_sign(m, &pair) == Ordering::Less {
            return Ok(Planarity::NonPlanar { witness: pair });
        }
    }
    Ok(Planarity::Planar)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Scalar;

    fn mats_m() -> SquareMatrix {
        let rows = [
            ["-10/13", "0", "3/13", "1/13", "6/13"],
            ["0", "-1", "1", "0", "0"],
            ["3/13", "1", "-59/26", "15/26", "6/13"],
            ["1/13", "0", "15/26", "-47/26", "15/13"],
            ["6/13", "0", "6/13", "15/13", "-27/13"],
        ];
        SquareMatrix::from_rows(
            (1..=5).collect(),
            rows.iter()
                .map(|r| r.iter().map(|s| Scalar::parse(s, Mode::Exact).unwrap()).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn pair_validity() {
        let order = CircularOrder::counting(5);
        assert!(is_circular_pair(&[1, 3], &[5, 4], &order));
        assert!(!is_circular_pair(&[1, 3], &[2, 4], &order));
        assert!(is_circular_pair(&[2, 3], &[1, 4], &order));
    }

    #[test]
    fn minors_match_published_values() {
        let m = mats_m();
        let p = CircularPair::new(vec![1, 3], vec![5, 4]);
        assert_eq!(circular_minor(&m, &p), Scalar::from_ratio(39, 169));
        let z = CircularPair::new(vec![2, 3], vec![1, 4]);
        assert_eq!(circular_minor(&m, &z), Scalar::from_int(0));
    }

    #[test]
    fn enumeration_counts() {
        let o4 = CircularOrder::counting(4);
        assert_eq!(enumerate_circular_pairs(&o4, 1).count(), 12);
        let o3 = CircularOrder::counting(3);
        assert_eq!(enumerate_circular_pairs(&o3, 1).count(), 6);
        // no size-2 pairs exist on 3 terminals
        assert_eq!(enumerate_circular_pairs(&o3, 1).count(), enumerate_circular_pairs(&o3, 2).count());
        for pair in enumerate_circular_pairs(&o4, 2) {
            assert!(is_circular_pair(&pair.p, &pair.q, &o4), "{pair}");
        }
    }

    #[test]
    fn planarity_verdicts() {
        let m = mats_m();
        let order = CircularOrder::counting(5);
        assert_eq!(is_circular_planar(&m, &order, 12).unwrap(), Planarity::Planar);

        let counter = SquareMatrix::parse(
            "5\n-5 2 1 0 2\n2 -5 2 1 0\n1 2 -5 2 0\n0 1 2 -5 2\n2 0 0 2 -4\n",
            Mode::Exact,
        )
        .unwrap();
        match is_circular_planar(&counter, &order, 12).unwrap() {
            Planarity::NonPlanar { witness } => {
                assert_eq!(witness, CircularPair::new(vec![1, 2], vec![4, 3]));
                assert_eq!(circular_minor(&counter, &witness), Scalar::from_int(-1));
            }
            Planarity::Planar => panic!("counterexample must be non-planar"),
        }
        assert!(matches!(
            is_circular_planar(&m, &CircularOrder::counting(13), 12),
            Err(Error::SizeGuard(13, 12))
        ));
    }

    #[test]
    fn canonical_order() {
        let a = CircularOrder::new(vec![3, 4, 5, 1, 2]);
        assert!(a.same_cycle(&CircularOrder::counting(5)));
        let r = CircularOrder::new(vec![2, 1, 5, 4, 3]);
        assert!(r.same_cycle(&CircularOrder::counting(5)));
        assert!(!CircularOrder::new(vec![1, 3, 2, 4, 5]).same_cycle(&CircularOrder::counting(5)));
    }
}
