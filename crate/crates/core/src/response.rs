//! Response/resistance matrix validation and the conversion formulas between
//! them (Kron-reduced Laplacian <-> effective-resistance metric).

use crate::error::Error;
use crate::matrix::SquareMatrix;
use crate::scalar::{Mode, Scalar, ABS_FLOOR};

/// Kron-reduced weighted Laplacian on the boundary terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseMatrix(pub SquareMatrix);

/// Pairwise effective resistances on the boundary terminals.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceMatrix(pub SquareMatrix);

impl ResponseMatrix {
    /// Validated constructor; in float mode symmetry is enforced by averaging
    /// (see `validate_response`).
    pub fn new(m: SquareMatrix) -> Result<Self, Error> {
        let report = validate_response(&m);
        if !report.is_valid() {
            return Err(Error::InvalidResponse(report.failures().join("; ")));
        }
        Ok(ResponseMatrix(report.symmetrized_matrix.unwrap_or(m)))
    }

    /// Wrap without validation (raw minor computations on measured data).
    pub fn new_unchecked(m: SquareMatrix) -> Self {
        ResponseMatrix(m)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }
}

impl ResistanceMatrix {
    pub fn new(m: SquareMatrix) -> Result<Self, Error> {
        let n = m.n();
        if !m.is_symmetric() {
            return Err(Error::NotResistanceMetric);
        }
        for i in 0..n {
            if !m.get(i, i).is_zero() {
                return Err(Error::NotResistanceMetric);
            }
            for j in 0..n {
                if i != j && !m.get(i, j).is_positive() {
                    return Err(Error::NotResistanceMetric);
                }
            }
        }
        // triangle inequality (with float slack)
        let slack = match m.mode() {
            Mode::Exact => 0.0,
            Mode::Float { tol } => tol * m.max_abs().max(1.0),
        };
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let d = m.get(i, j).to_f64() - m.get(i, k).to_f64() - m.get(k, j).to_f64();
                    if d > slack.max(ABS_FLOOR) {
                        if let (Some(a), Some(b), Some(c)) = (
                            m.get(i, j).rational(),
                            m.get(i, k).rational(),
                            m.get(k, j).rational(),
                        ) {
                            if a <= &(b + c) {
                                continue;
                            }
                        }
                        return Err(Error::NotResistanceMetric);
                    }
                }
            }
        }
        Ok(ResistanceMatrix(m))
    }

    pub fn new_unchecked(m: SquareMatrix) -> Self {
        ResistanceMatrix(m)
    }

    pub fn matrix(&self) -> &SquareMatrix {
        &self.0
    }
}

/// Structured validation result for a would-be response matrix.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub n: usize,
    pub symmetric: bool,
    /// set when float mode repaired asymmetry by averaging
    pub symmetrized: bool,
    pub sign_ok: bool,
    pub sign_violation: Option<(u32, u32)>,
    pub row_sums_zero: bool,
    pub worst_row_sum: f64,
    pub connected: bool,
    /// connected components of K(N) by terminal label
    pub components: Vec<Vec<u32>>,
    /// cut-point terminals of K(N) with the components they separate
    pub cut_points: Vec<(u32, Vec<Vec<u32>>)>,
    pub(crate) symmetrized_matrix: Option<SquareMatrix>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        (self.symmetric || self.symmetrized) && self.sign_ok && self.row_sums_zero && self.connected
    }

    pub fn failures(&self) -> Vec<String> {
        let mut v = Vec::new();
        if !self.symmetric && !self.symmetrized {
            v.push("symmetry".to_string());
        }
        if !self.sign_ok {
            match self.sign_violation {
                Some((i, j)) => v.push(format!("sign pattern at ({i},{j})")),
                None => v.push("sign pattern".to_string()),
            }
        }
        if !self.row_sums_zero {
            v.push(format!("row sums (worst {})", self.worst_row_sum));
        }
        if !self.connected {
            v.push("disconnected".to_string());
        }
        v
    }
}

/// Check symmetry, sign pattern, zero row sums, and connectivity of the
/// clique graph K(N); report the boundary cut-points of K(N).
pub fn validate_response(m: &SquareMatrix) -> ValidationReport {
    let n = m.n();
    let mode = m.mode();
    let scale = m.max_abs().max(1.0);
    let mut symmetric = true;
    for i in 0..n {
        for j in (i + 1)..n {
            if !m.get(i, j).approx_eq(m.get(j, i)) {
                symmetric = false;
            }
        }
    }
    let (work, symmetrized) = if !symmetric && matches!(mode, Mode::Float { .. }) {
        // measured data: average M and M^T
        let mut w = m.clone();
        let half = Scalar::from_f64(0.5, mode.tol());
        for i in 0..n {
            for j in 0..n {
                let avg = (m.get(i, j).clone() + m.get(j, i).clone()) * half.clone();
                w.set(i, j, avg);
            }
        }
        (w, true)
    } else {
        (m.clone(), false)
    };

    let entry_floor = match mode {
        Mode::Exact => 0.0,
        Mode::Float { tol } => (tol * scale).max(ABS_FLOOR),
    };
    let mut sign_ok = true;
    let mut sign_violation = None;
    for i in 0..n {
        for j in 0..n {
            let v = work.get(i, j).to_f64();
            let bad = if i == j { v > entry_floor } else { v < -entry_floor };
            if bad && sign_ok {
                sign_ok = false;
                sign_violation = Some((work.labels()[i], work.labels()[j]));
            }
        }
    }

    let mut row_sums_zero = true;
    let mut worst = 0.0f64;
    for i in 0..n {
        let rs = work.row_sum(i);
        let ok = match &rs {
            Scalar::Exact(r) => num::Zero::is_zero(r),
            Scalar::Float { value, tol } => value.abs() <= (n as f64) * tol * scale,
        };
        worst = worst.max(rs.to_f64().abs());
        if !ok {
            row_sums_zero = false;
        }
    }

    // K(N): edge {i,j} iff off-diagonal entry is (significantly) positive
    let mut adj = vec![vec![]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j && work.get(i, j).to_f64() > entry_floor {
                adj[i].push(j);
            }
        }
    }
    let components = components_of(&adj, &(0..n).collect::<Vec<_>>())
        .into_iter()
        .map(|c| c.into_iter().map(|i| work.labels()[i]).collect())
        .collect::<Vec<Vec<u32>>>();
    let connected = components.len() <= 1;

    let mut cut_points = Vec::new();
    if connected && n > 2 {
        for v in 0..n {
            let rest: Vec<usize> = (0..n).filter(|&i| i != v).collect();
            let comps = components_of(&adj, &rest);
            if comps.len() > 1 {
                cut_points.push((
                    work.labels()[v],
                    comps
                        .into_iter()
                        .map(|c| c.into_iter().map(|i| work.labels()[i]).collect())
                        .collect(),
                ));
            }
        }
    }

    ValidationReport {
        n,
        symmetric,
        symmetrized,
        sign_ok,
        sign_violation,
        row_sums_zero,
        worst_row_sum: worst,
        connected,
        components,
        cut_points,
        symmetrized_matrix: if symmetrized { Some(work) } else { None },
    }
}

fn components_of(adj: &[Vec<usize>], verts: &[usize]) -> Vec<Vec<usize>> {
    let inset: std::collections::BTreeSet<usize> = verts.iter().copied().collect();
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for &s in verts {
        if seen.contains(&s) {
            continue;
        }
        let mut comp = vec![];
        let mut stack = vec![s];
        seen.insert(s);
        while let Some(u) = stack.pop() {
            comp.push(u);
            for &w in &adj[u] {
                if inset.contains(&w) && seen.insert(w) {
                    stack.push(w);
                }
            }
        }
        comp.sort_unstable();
        out.push(comp);
    }
    out
}

/// W(M) = ((−M)†)_D J + J((−M)†)_D − 2(−M)†.
pub fn w_from_m(m: &ResponseMatrix) -> Result<ResistanceMatrix, Error> {
    let neg = m.0.neg();
    let p = neg.laplacian_pseudoinverse()?;
    let n = p.n();
    let mut w = SquareMatrix::zeros(m.0.labels().to_vec(), m.0.mode());
    for i in 0..n {
        for j in 0..n {
            let v = p.get(i, i).clone() + p.get(j, j).clone()
                - (p.get(i, j).clone() + p.get(j, i).clone());
            w.set(i, j, v);
        }
    }
    Ok(ResistanceMatrix(w))
}

/// M(W) = (½(W − (WJ + JW)/n + trace(WJ)/n² · J))†.
pub fn m_from_w(w: &ResistanceMatrix) -> Result<ResponseMatrix, Error> {
    let wm = &w.0;
    let n = wm.n();
    let mode = wm.mode();
    let ninv = match mode {
        Mode::Exact => Scalar::from_ratio(1, n as i64),
        Mode::Float { tol } => Scalar::from_f64(1.0 / n as f64, tol),
    };
    let half = match mode {
        Mode::Exact => Scalar::from_ratio(1, 2),
        Mode::Float { tol } => Scalar::from_f64(0.5, tol),
    };
    let row_sums: Vec<Scalar> = (0..n).map(|i| wm.row_sum(i)).collect();
    let mut total = mode.zero();
    for rs in &row_sums {
        total += rs.clone();
    }
    let mut inner = SquareMatrix::zeros(wm.labels().to_vec(), mode);
    for i in 0..n {
        for j in 0..n {
            // W_ij − (rowsum_i + rowsum_j)/n + total/n²
            let v = wm.get(i, j).clone()
                - (row_sums[i].clone() + row_sums[j].clone()) * ninv.clone()
                + total.clone() * ninv.clone() * ninv.clone();
            inner.set(i, j, v * half.clone());
        }
    }
    let m = inner.laplacian_pseudoinverse().map_err(|_| Error::NotResistanceMetric)?;
    let report = validate_response(&m);
    if !report.is_valid() {
        return Err(Error::NotResistanceMetric);
    }
    Ok(ResponseMatrix(m))
}

/// The submatrix of W on the given terminal labels (order preserved).
pub fn restrict_resistance(w: &ResistanceMatrix, subset: &[u32]) -> ResistanceMatrix {
    let idx: Vec<usize> =
        subset.iter().map(|&l| w.0.position_of(l).expect("label not in matrix")).collect();
    ResistanceMatrix(w.0.minor_matrix(&idx, &idx))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_exact(text: &str) -> SquareMatrix {
        SquareMatrix::parse(text, Mode::Exact).unwrap()
    }

    fn mats_m() -> SquareMatrix {
        parse_exact(
            "5\n-10/13 0 3/13 1/13 6/13\n0 -1 1 0 0\n3/13 1 -59/26 15/26 6/13\n1/13 0 15/26 -47/26 15/13\n6/13 0 6/13 15/13 -27/13\n",
        )
    }

    fn mats_w() -> SquareMatrix {
        parse_exact(
            "5\n0 11/4 7/4 7/4 17/12\n11/4 0 1 2 2\n7/4 1 0 1 1\n7/4 2 1 0 2/3\n17/12 2 1 2/3 0\n",
        )
    }

    #[test]
    fn validate_mats() {
        let r = validate_response(&mats_m());
        assert!(r.is_valid());
        assert!(r.connected);
        assert_eq!(r.cut_points.len(), 1);
        let (cp, comps) = &r.cut_points[0];
        assert_eq!(*cp, 3);
        assert!(comps.iter().any(|c| c == &vec![2]));
    }

    #[test]
    fn validate_rejects_positive_diagonal() {
        let m = parse_exact("2\n1 -1\n-1 1\n");
        let r = validate_response(&m);
        assert!(!r.sign_ok);
        assert!(r.failures().iter().any(|f| f.contains("sign pattern")));
    }

    #[test]
    fn w_from_m_mats() {
        let m = ResponseMatrix::new(mats_m()).unwrap();
        let w = w_from_m(&m).unwrap();
        assert_eq!(w.0, mats_w());
        assert_eq!(*w.0.by_labels(1, 5), Scalar::from_ratio(17, 12));
    }

    #[test]
    fn two_terminal_resistance() {
        let m = ResponseMatrix::new(parse_exact("2\n-4 4\n4 -4\n")).unwrap();
        let w = w_from_m(&m).unwrap();
        assert_eq!(*w.0.get(0, 1), Scalar::from_ratio(1, 4));
    }

    #[test]
    fn m_w_roundtrip() {
        let m = ResponseMatrix::new(mats_m()).unwrap();
        let w = w_from_m(&m).unwrap();
        let m2 = m_from_w(&w).unwrap();
        assert_eq!(m2.0, m.0);
    }

    #[test]
    fn counterexample_m_from_w() {
        let w = ResistanceMatrix::new(parse_exact(
            "5\n0 16/51 19/51 7/17 6/17\n16/51 0 5/17 19/51 25/51\n19/51 5/17 0 16/51 25/51\n7/17 19/51 16/51 0 6/17\n6/17 25/51 25/51 6/17 0\n",
        ))
        .unwrap();
        let m = m_from_w(&w).unwrap();
        let want = parse_exact("5\n-5 2 1 0 2\n2 -5 2 1 0\n1 2 -5 2 0\n0 1 2 -5 2\n2 0 0 2 -4\n");
        assert_eq!(m.0, want);
        assert_eq!(*m.0.by_labels(1, 2), Scalar::from_int(2));
    }

    #[test]
    fn restriction_is_plain_submatrix() {
        let w = ResistanceMatrix::new(mats_w()).unwrap();
        let r = restrict_resistance(&w, &[1, 2, 3, 4, 5]);
        assert_eq!(r.0, w.0);
        let r2 = restrict_resistance(&w, &[2, 4]);
        assert_eq!(*r2.0.by_labels(2, 4), Scalar::from_int(2));
        assert_eq!(r2.0.labels(), &[2, 4]);
    }

    #[test]
    fn float_symmetrization_warns() {
        let mut m = mats_m().to_float_mode(1e-9);
        let v = m.get(0, 2).to_f64();
        m.set(0, 2, Scalar::from_f64(v + 1e-5, 1e-9));
        let r = validate_response(&m);
        assert!(!r.symmetric);
        assert!(r.symmetrized);
    }
}
