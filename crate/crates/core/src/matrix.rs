//! Labeled square matrices with exact or float entries: determinants, inverses,
//! Schur complements, and the pseudoinverse used for Laplacian-like matrices.

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{Integer, One, Zero};

use crate::error::Error;
use crate::scalar::{Mode, Scalar};

/// A square matrix whose rows/columns are labeled by node identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct SquareMatrix {
    n: usize,
    labels: Vec<u32>,
    entries: Vec<Scalar>, // row-major
}

impl SquareMatrix {
    pub fn zeros(labels: Vec<u32>, mode: Mode) -> Self {
        let n = labels.len();
        SquareMatrix { n, labels, entries: vec![mode.zero(); n * n] }
    }

    pub fn identity(n: usize, mode: Mode) -> Self {
        let mut m = SquareMatrix::zeros((1..=n as u32).collect(), mode);
        for i in 0..n {
            m.set(i, i, mode.one());
        }
        m
    }

    /// Build from rows; all entries must share one mode.
    pub fn from_rows(labels: Vec<u32>, rows: Vec<Vec<Scalar>>) -> Result<Self, Error> {
        let n = labels.len();
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension(format!("expected {n}x{n} entries")));
        }
        let entries: Vec<Scalar> = rows.into_iter().flatten().collect();
        if n > 0 {
            let exact = entries[0].is_exact();
            if entries.iter().any(|e| e.is_exact() != exact) {
                return Err(Error::Parse("mixed exact/float entries".into()));
            }
        }
        Ok(SquareMatrix { n, labels, entries })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn mode(&self) -> Mode {
        if self.n == 0 { Mode::Exact } else { self.entries[0].mode() }
    }

    pub fn get(&self, i: usize, j: usize) -> &Scalar {
        &self.entries[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: Scalar) {
        self.entries[i * self.n + j] = v;
    }

    pub fn position_of(&self, label: u32) -> Option<usize> {
        self.labels.iter().position(|&l| l == label)
    }

    pub fn by_labels(&self, a: u32, b: u32) -> &Scalar {
        let i = self.position_of(a).expect("unknown row label");
        let j = self.position_of(b).expect("unknown column label");
        self.get(i, j)
    }

    pub fn is_symmetric(&self) -> bool {
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if !self.get(i, j).approx_eq(self.get(j, i)) {
                    return false;
                }
            }
        }
        true
    }

    pub fn row_sum(&self, i: usize) -> Scalar {
        let mut s = self.mode().zero();
        for j in 0..self.n {
            s += self.get(i, j).clone();
        }
        s
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|e| e.to_f64().abs()).fold(0.0, f64::max)
    }

    pub fn row_max_abs(&self, i: usize) -> f64 {
        (0..self.n).map(|j| self.get(i, j).to_f64().abs()).fold(0.0, f64::max)
    }

    /// Rectangular submatrix by row/column positions (kept in the given order).
    pub fn minor_matrix(&self, rows: &[usize], cols: &[usize]) -> SquareMatrix {
        assert_eq!(rows.len(), cols.len(), "minor must be square");
        let labels = rows.iter().map(|&r| self.labels[r]).collect();
        let mut out = SquareMatrix::zeros(labels, self.mode());
        for (a, &i) in rows.iter().enumerate() {
            for (b, &j) in cols.iter().enumerate() {
                out.set(a, b, self.get(i, j).clone());
            }
        }
        out
    }

    pub fn transpose(&self) -> SquareMatrix {
        let mut out = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(j, i).clone());
            }
        }
        out
    }

    pub fn scale(&self, s: &Scalar) -> SquareMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = e.clone() * s.clone();
        }
        out
    }

    pub fn add(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, other.n);
        let mut out = self.clone();
        for (a, b) in out.entries.iter_mut().zip(other.entries.iter()) {
            *a = a.clone() + b.clone();
        }
        out
    }

    pub fn neg(&self) -> SquareMatrix {
        let mut out = self.clone();
        for e in &mut out.entries {
            *e = -e.clone();
        }
        out
    }

    pub fn mul(&self, other: &SquareMatrix) -> SquareMatrix {
        assert_eq!(self.n, other.n);
        let mode = self.mode();
        let mut out = SquareMatrix::zeros(self.labels.clone(), mode);
        for i in 0..self.n {
            for j in 0..self.n {
                let mut s = mode.zero();
                for k in 0..self.n {
                    s += self.get(i, k).clone() * other.get(k, j).clone();
                }
                out.set(i, j, s);
            }
        }
        out
    }

    /// Determinant: fraction-free Bareiss elimination over cleared denominators
    /// in exact mode, partially pivoted LU in float mode.
    pub fn determinant(&self) -> Scalar {
        match self.mode() {
            Mode::Exact => self.determinant_exact(),
            Mode::Float { tol } => Scalar::Float { value: self.determinant_float(), tol },
        }
    }

    fn determinant_exact(&self) -> Scalar {
        let n = self.n;
        if n == 0 {
            return Scalar::from_int(1);
        }
        // clear denominators row by row, track the product
        let mut a: Vec<Vec<BigInt>> = Vec::with_capacity(n);
        let mut denom = BigRational::one();
        for i in 0..n {
            let mut lcm = BigInt::one();
            for j in 0..n {
                let r = self.get(i, j).rational().expect("exact mode");
                lcm = lcm.lcm(r.denom());
            }
            let row: Vec<BigInt> = (0..n)
                .map(|j| {
                    let r = self.get(i, j).rational().unwrap();
                    r.numer() * (&lcm / r.denom())
                })
                .collect();
            denom *= BigRational::from_integer(lcm);
            a.push(row);
        }
        // Bareiss
        let mut sign = 1i64;
        let mut prev = BigInt::one();
        for k in 0..n {
            if a[k][k].is_zero() {
                match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                    Some(r) => {
                        a.swap(k, r);
                        sign = -sign;
                    }
                    None => return Scalar::Exact(BigRational::zero()),
                }
            }
            for i in (k + 1)..n {
                for j in (k + 1)..n {
                    let v = (&a[i][j] * &a[k][k] - &a[i][k] * &a[k][j]) / &prev;
                    a[i][j] = v;
                }
                a[i][k] = BigInt::zero();
            }
            prev = a[k][k].clone();
        }
        let det_int = BigRational::from_integer(a[n - 1][n - 1].clone() * BigInt::from(sign));
        Scalar::Exact(det_int / denom)
    }

    fn determinant_float(&self) -> f64 {
        let n = self.n;
        let mut a: Vec<Vec<f64>> = (0..n)
            .map(|i| (0..n).map(|j| self.get(i, j).to_f64()).collect())
            .collect();
        let mut det = 1.0f64;
        for c in 0..n {
            let piv = (c..n)
                .max_by(|&x, &y| a[x][c].abs().partial_cmp(&a[y][c].abs()).unwrap())
                .unwrap();
            if a[piv][c] == 0.0 {
                return 0.0;
            }
            if piv != c {
                a.swap(piv, c);
                det = -det;
            }
            det *= a[c][c];
            let inv = 1.0 / a[c][c];
            for r in (c + 1)..n {
                let f = a[r][c] * inv;
                if f != 0.0 {
                    for j in c..n {
                        a[r][j] -= f * a[c][j];
                    }
                }
            }
        }
        det
    }

    /// Gauss-Jordan inverse with pivoting. Errors on singular input.
    pub fn inverse(&self) -> Result<SquareMatrix, Error> {
        let n = self.n;
        let mode = self.mode();
        let mut a: Vec<Vec<Scalar>> = (0..n)
            .map(|i| {
                let mut row: Vec<Scalar> = (0..n).map(|j| self.get(i, j).clone()).collect();
                row.extend((0..n).map(|j| if i == j { mode.one() } else { mode.zero() }));
                row
            })
            .collect();
        for c in 0..n {
            let piv = match mode {
                Mode::Exact => (c..n).find(|&r| !a[r][c].is_zero()),
                Mode::Float { .. } => {
                    let best = (c..n).max_by(|&x, &y| {
                        a[x][c].to_f64().abs().partial_cmp(&a[y][c].to_f64().abs()).unwrap()
                    });
                    best.filter(|&r| a[r][c].to_f64() != 0.0)
                }
            };
            let piv = piv.ok_or_else(|| Error::Dimension("singular matrix".into()))?;
            a.swap(c, piv);
            let inv = a[c][c].recip();
            for j in 0..2 * n {
                a[c][j] = a[c][j].clone() * inv.clone();
            }
            for r in 0..n {
                if r != c {
                    let f = a[r][c].clone();
                    if f.to_f64() != 0.0 {
                        for j in 0..2 * n {
                            let sub = f.clone() * a[c][j].clone();
                            a[r][j] = a[r][j].clone() - sub;
                        }
                    }
                }
            }
        }
        let mut out = SquareMatrix::zeros(self.labels.clone(), mode);
        for i in 0..n {
            for j in 0..n {
                out.set(i, j, a[i][j + n].clone());
            }
        }
        Ok(out)
    }

    /// Schur complement keeping the given row/column positions: A − B C⁻¹ Bᵀ.
    /// Labels of the kept block are preserved.
    pub fn schur_complement(&self, keep: &[usize]) -> Result<SquareMatrix, Error> {
        let drop: Vec<usize> = (0..self.n).filter(|i| !keep.contains(i)).collect();
        if drop.is_empty() {
            return Ok(self.minor_matrix(keep, keep));
        }
        let c = self.minor_matrix(&drop, &drop);
        let c_inv = c.inverse().map_err(|_| {
            let names: Vec<String> = drop.iter().map(|&i| self.labels[i].to_string()).collect();
            Error::SingularBlock(names.join(","))
        })?;
        let mode = self.mode();
        let k = keep.len();
        let d = drop.len();
        let mut out = SquareMatrix::zeros(keep.iter().map(|&i| self.labels[i]).collect(), mode);
        // B C^-1 B^T with B = self[keep, drop]
        for a in 0..k {
            // row vector B[a,:] * C^-1
            let mut bc: Vec<Scalar> = vec![mode.zero(); d];
            for t in 0..d {
                let mut s = mode.zero();
                for u in 0..d {
                    s += self.get(keep[a], drop[u]).clone() * c_inv.get(u, t).clone();
                }
                bc[t] = s;
            }
            for b in 0..k {
                let mut s = self.get(keep[a], keep[b]).clone();
                for t in 0..d {
                    s -= bc[t].clone() * self.get(keep[b], drop[t]).clone();
                }
                out.set(a, b, s);
            }
        }
        Ok(out)
    }

    /// Moore-Penrose pseudoinverse for a symmetric matrix whose kernel is
    /// exactly the all-ones line, computed as (X + J/n)⁻¹ − J/n.
    ///
    /// Errors if the input is not symmetric, does not kill the all-ones
    /// vector, or has a larger kernel (disconnected network).
    pub fn laplacian_pseudoinverse(&self) -> Result<SquareMatrix, Error> {
        if !self.is_symmetric() {
            return Err(Error::InvalidResponse("pseudoinverse input not symmetric".into()));
        }
        let scale = self.max_abs().max(1.0);
        for i in 0..self.n {
            let rs = self.row_sum(i);
            let ok = match rs {
                Scalar::Exact(ref r) => r.is_zero(),
                Scalar::Float { value, tol } => value.abs() <= (self.n as f64) * tol * scale,
            };
            if !ok {
                return Err(Error::InvalidResponse(format!(
                    "row {} does not sum to zero (sum {})",
                    self.labels[i], rs
                )));
            }
        }
        let mode = self.mode();
        let jn = match mode {
            Mode::Exact => Scalar::from_ratio(1, self.n as i64),
            Mode::Float { tol } => Scalar::Float { value: 1.0 / self.n as f64, tol },
        };
        let mut shifted = self.clone();
        for i in 0..self.n {
            for j in 0..self.n {
                shifted.set(i, j, self.get(i, j).clone() + jn.clone());
            }
        }
        let inv = shifted.inverse().map_err(|_| Error::Disconnected)?;
        let mut out = inv;
        for i in 0..self.n {
            for j in 0..self.n {
                let v = out.get(i, j).clone() - jn.clone();
                out.set(i, j, v);
            }
        }
        Ok(out)
    }

    /// Convert every entry to float mode with the given tolerance.
    pub fn to_float_mode(&self, tol: f64) -> SquareMatrix {
        let mut out = SquareMatrix::zeros(self.labels.clone(), Mode::Float { tol });
        for i in 0..self.n {
            for j in 0..self.n {
                out.set(i, j, self.get(i, j).to_float_mode(tol));
            }
        }
        out
    }

    /// Matrix text format: first line `n`, then n whitespace-separated rows.
    pub fn parse(text: &str, mode: Mode) -> Result<SquareMatrix, Error> {
        let mut tokens = text.split_whitespace();
        let n: usize = tokens
            .next()
            .ok_or_else(|| Error::Parse("empty matrix file".into()))?
            .parse()
            .map_err(|_| Error::Parse("first token must be the dimension".into()))?;
        let mut entries = Vec::with_capacity(n * n);
        for t in tokens {
            entries.push(Scalar::parse(t, mode)?);
        }
        if entries.len() != n * n {
            return Err(Error::Parse(format!(
                "expected {} entries for a {n}x{n} matrix, found {}",
                n * n,
                entries.len()
            )));
        }
        Ok(SquareMatrix { n, labels: (1..=n as u32).collect(), entries })
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.n);
        for i in 0..self.n {
            let row: Vec<String> = (0..self.n).map(|j| self.get(i, j).to_string()).collect();
            s.push_str(&row.join(" "));
            s.push('\n');
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(rows: &[&[(i64, i64)]]) -> SquareMatrix {
        let labels = (1..=rows.len() as u32).collect();
        SquareMatrix::from_rows(
            labels,
            rows.iter()
                .map(|r| r.iter().map(|&(p, q)| Scalar::from_ratio(p, q)).collect())
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn determinant_examples() {
        // circular minor of the 5-terminal example: 39/169
        let a = m(&[&[(6, 13), (1, 13)], &[(6, 13), (15, 26)]]);
        assert_eq!(a.determinant(), Scalar::from_ratio(39, 169));
        assert_eq!(SquareMatrix::identity(3, Mode::Exact).determinant(), Scalar::from_int(1));
        let z = m(&[&[(0, 1), (0, 1)], &[(3, 13), (15, 26)]]);
        assert_eq!(z.determinant(), Scalar::from_int(0));
    }

    #[test]
    fn determinant_float_matches_exact() {
        let a = m(&[&[(2, 1), (1, 3), (5, 7)], &[(1, 2), (4, 1), (0, 1)], &[(3, 5), (1, 1), (2, 9)]]);
        let ex = a.determinant().to_f64();
        let fl = a.to_float_mode(1e-9).determinant().to_f64();
        assert!((ex - fl).abs() < 1e-12 * ex.abs().max(1.0));
    }

    #[test]
    fn schur_keep_all_is_identity_op() {
        let a = m(&[&[(1, 1), (2, 1)], &[(2, 1), (5, 1)]]);
        let s = a.schur_complement(&[0, 1]).unwrap();
        assert_eq!(s, a);
    }

    #[test]
    fn schur_quotient_property() {
        // dropping {3} then {2} equals dropping {2,3} at once (positions)
        let a = m(&[
            &[(4, 1), (1, 1), (0, 1)],
            &[(1, 1), (3, 1), (1, 1)],
            &[(0, 1), (1, 1), (5, 1)],
        ]);
        let via_two = a.schur_complement(&[0, 1]).unwrap().schur_complement(&[0]).unwrap();
        let direct = a.schur_complement(&[0]).unwrap();
        assert_eq!(via_two, direct);
    }

    #[test]
    fn schur_singular_block_names_dropped_labels() {
        let a = m(&[&[(1, 1), (0, 1)], &[(0, 1), (0, 1)]]);
        match a.schur_complement(&[0]) {
            Err(Error::SingularBlock(s)) => assert_eq!(s, "2"),
            other => panic!("expected SingularBlock, got {other:?}"),
        }
    }

    #[test]
    fn pseudoinverse_single_edge() {
        let a = m(&[&[(1, 1), (-1, 1)], &[(-1, 1), (1, 1)]]);
        let p = a.laplacian_pseudoinverse().unwrap();
        let want = m(&[&[(1, 4), (-1, 4)], &[(-1, 4), (1, 4)]]);
        assert_eq!(p, want);
    }

    #[test]
    fn pseudoinverse_moore_penrose_axioms() {
        // path laplacian on 4 nodes (negated convention: PSD)
        let x = m(&[
            &[(1, 1), (-1, 1), (0, 1), (0, 1)],
            &[(-1, 1), (3, 1), (-2, 1), (0, 1)],
            &[(0, 1), (-2, 1), (5, 1), (-3, 1)],
            &[(0, 1), (0, 1), (-3, 1), (3, 1)],
        ]);
        let p = x.laplacian_pseudoinverse().unwrap();
        let xpx = x.mul(&p).mul(&x);
        let pxp = p.mul(&x).mul(&p);
        assert_eq!(xpx, x);
        assert_eq!(pxp, p);
        assert!(x.mul(&p).is_symmetric());
        assert!(p.mul(&x).is_symmetric());
    }

    #[test]
    fn pseudoinverse_rejects_disconnected() {
        // two components: kernel has dimension 2
        let x = m(&[
            &[(1, 1), (-1, 1), (0, 1), (0, 1)],
            &[(-1, 1), (1, 1), (0, 1), (0, 1)],
            &[(0, 1), (0, 1), (2, 1), (-2, 1)],
            &[(0, 1), (0, 1), (-2, 1), (2, 1)],
        ]);
        assert!(matches!(x.laplacian_pseudoinverse(), Err(Error::Disconnected)));
    }

    #[test]
    fn text_roundtrip() {
        let a = m(&[&[(6, 13), (1, 13)], &[(6, 13), (15, 26)]]);
        let t = a.to_text();
        let b = SquareMatrix::parse(&t, Mode::Exact).unwrap();
        assert_eq!(a, b);
        // decimals parse to exact rationals in exact mode
        let c = SquareMatrix::parse("1\n0.25\n", Mode::Exact).unwrap();
        assert_eq!(*c.get(0, 0), Scalar::from_ratio(1, 4));
    }
}
