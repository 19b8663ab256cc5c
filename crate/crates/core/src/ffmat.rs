//! Dense matrices over a small prime field F_p.
//!
//! Every kernel, cokernel, Hom space and splitting test in the crate bottoms
//! out here. Matrices are tiny (universe objects have total dimension at most
//! six), so storage is dense row-major bytes and elimination is plain
//! Gauss-Jordan with first-nonzero pivoting.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest prime accepted for the scalar field.
pub const MAX_PRIME: u8 = 7;

/// A prime field F_p with `2 <= p <= 7`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u8", into = "u8")]
pub struct FieldPrime(u8);

impl FieldPrime {
    pub fn new(p: u8) -> Result<Self> {
        match p {
            2 | 3 | 5 | 7 => Ok(FieldPrime(p)),
            _ => Err(Error::Usage(format!(
                "unsupported prime {p}: expected one of 2, 3, 5, 7"
            ))),
        }
    }

    #[inline]
    pub fn p(self) -> u8 {
        self.0
    }

    #[inline]
    pub fn add(self, a: u8, b: u8) -> u8 {
        (a + b) % self.0
    }

    #[inline]
    pub fn sub(self, a: u8, b: u8) -> u8 {
        (a + self.0 - b) % self.0
    }

    #[inline]
    pub fn neg(self, a: u8) -> u8 {
        (self.0 - a) % self.0
    }

    #[inline]
    pub fn mul(self, a: u8, b: u8) -> u8 {
        ((a as u16 * b as u16) % self.0 as u16) as u8
    }

    /// Multiplicative inverse of a nonzero element (Fermat).
    pub fn inv(self, a: u8) -> u8 {
        debug_assert!(a % self.0 != 0, "inverse of zero");
        let mut r = 1u8;
        for _ in 0..self.0 - 2 {
            r = self.mul(r, a);
        }
        r
    }
}

impl TryFrom<u8> for FieldPrime {
    type Error = Error;
    fn try_from(p: u8) -> Result<Self> {
        FieldPrime::new(p)
    }
}

impl From<FieldPrime> for u8 {
    fn from(f: FieldPrime) -> u8 {
        f.0
    }
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix {
    field: FieldPrime,
    rows: usize,
    cols: usize,
    data: Vec<u8>,
}

/// Output of [`Matrix::rref`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Rref {
    pub reduced: Matrix,
    pub rank: usize,
    pub pivots: Vec<usize>,
}

/// Solution set of `A X = B`: one particular solution plus a basis of the
/// homogeneous solutions (each of the same shape as `X`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub particular: Matrix,
    pub kernel: Vec<Matrix>,
}

impl Matrix {
    pub fn zeros(field: FieldPrime, rows: usize, cols: usize) -> Self {
        Matrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: FieldPrime, n: usize) -> Self {
        let mut m = Matrix::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds a matrix from row-major entries, reducing each entry mod p.
    pub fn from_rows(field: FieldPrime, rows: usize, cols: usize, entries: &[u8]) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Shape(format!(
                "{} entries for a {rows}x{cols} matrix",
                entries.len()
            )));
        }
        let data = entries.iter().map(|&e| e % field.p()).collect();
        Ok(Matrix { field, rows, cols, data })
    }

    /// Like [`Matrix::from_rows`] but rejects out-of-range entries instead of
    /// reducing them. Used by loaders.
    pub fn from_rows_strict(field: FieldPrime, rows: usize, cols: usize, entries: &[u8]) -> Result<Self> {
        if let Some(&bad) = entries.iter().find(|&&e| e >= field.p()) {
            return Err(Error::Corrupt(format!("matrix entry {bad} not in F_{}", field.p())));
        }
        Matrix::from_rows(field, rows, cols, entries)
    }

    pub fn from_nested(field: FieldPrime, rows: &[Vec<u8>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        let mut data = Vec::with_capacity(r * c);
        for row in rows {
            assert_eq!(row.len(), c, "ragged matrix literal");
            data.extend(row.iter().map(|&e| e % field.p()));
        }
        Matrix { field, rows: r, cols: c, data }
    }

    /// A column vector.
    pub fn column(field: FieldPrime, entries: &[u8]) -> Self {
        Matrix::from_rows(field, entries.len(), 1, entries).expect("column shape")
    }

    #[inline]
    pub fn field(&self) -> FieldPrime {
        self.field
    }
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }
    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }
    #[inline]
    pub fn get(&self, r: usize, c: usize) -> u8 {
        self.data[r * self.cols + c]
    }
    #[inline]
    pub fn set(&mut self, r: usize, c: usize, v: u8) {
        self.data[r * self.cols + c] = v % self.field.p();
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&e| e == 0)
    }

    pub fn is_identity(&self) -> bool {
        self.rows == self.cols
            && (0..self.rows).all(|i| (0..self.cols).all(|j| self.get(i, j) == u8::from(i == j)))
    }

    pub fn to_nested(&self) -> Vec<Vec<u8>> {
        self.data.chunks(self.cols.max(1)).take(self.rows).map(|r| r[..self.cols].to_vec()).collect()
    }

    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul shape mismatch");
        let f = self.field;
        let p = f.p() as u32;
        let mut out = Matrix::zeros(f, self.rows, other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc = 0u32;
                for k in 0..self.cols {
                    acc += self.data[i * self.cols + k] as u32 * other.data[k * other.cols + j] as u32;
                }
                out.data[i * other.cols + j] = (acc % p) as u8;
            }
        }
        out
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "add shape mismatch");
        let f = self.field;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f.add(a, b)).collect();
        Matrix { field: f, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Matrix {
        self.scale(self.field.neg(1))
    }

    pub fn scale(&self, c: u8) -> Matrix {
        let f = self.field;
        let data = self.data.iter().map(|&a| f.mul(a, c)).collect();
        Matrix { field: f, rows: self.rows, cols: self.cols, data }
    }

    pub fn transpose(&self) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        out
    }

    /// `[self | other]`
    pub fn hcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.rows, other.rows);
        let mut out = Matrix::zeros(self.field, self.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.data[i * out.cols + j] = self.get(i, j);
            }
            for j in 0..other.cols {
                out.data[i * out.cols + self.cols + j] = other.get(i, j);
            }
        }
        out
    }

    /// `[self ; other]`
    pub fn vcat(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.cols);
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Matrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data }
    }

    /// Block-diagonal `diag(self, other)`.
    pub fn block_diag(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.field, self.rows + other.rows, self.cols + other.cols);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out.set(i, j, self.get(i, j));
            }
        }
        for i in 0..other.rows {
            for j in 0..other.cols {
                out.set(self.rows + i, self.cols + j, other.get(i, j));
            }
        }
        out
    }

    pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Matrix {
        let mut out = Matrix::zeros(self.field, rows.len(), cols.len());
        for (oi, i) in rows.clone().enumerate() {
            for (oj, j) in cols.clone().enumerate() {
                out.data[oi * out.cols + oj] = self.get(i, j);
            }
        }
        out
    }

    /// Reduced row-echelon form with first-nonzero pivoting.
    pub fn rref(&self) -> Rref {
        let f = self.field;
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut row = 0;
        for col in 0..m.cols {
            if row == m.rows {
                break;
            }
            let Some(pr) = (row..m.rows).find(|&r| m.get(r, col) != 0) else {
                continue;
            };
            if pr != row {
                for j in 0..m.cols {
                    m.data.swap(pr * m.cols + j, row * m.cols + j);
                }
            }
            let inv = f.inv(m.get(row, col));
            for j in 0..m.cols {
                let v = f.mul(m.get(row, j), inv);
                m.data[row * m.cols + j] = v;
            }
            for r in 0..m.rows {
                if r == row {
                    continue;
                }
                let c = m.get(r, col);
                if c == 0 {
                    continue;
                }
                for j in 0..m.cols {
                    let v = f.sub(m.get(r, j), f.mul(c, m.get(row, j)));
                    m.data[r * m.cols + j] = v;
                }
            }
            pivots.push(col);
            row += 1;
        }
        Rref { reduced: m, rank: pivots.len(), pivots }
    }

    pub fn rank(&self) -> usize {
        self.rref().rank
    }

    /// Basis of the null space as column vectors, one per free column.
    pub fn kernel_basis(&self) -> Vec<Matrix> {
        let Rref { reduced, pivots, .. } = self.rref();
        let f = self.field;
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&fc| {
                let mut v = Matrix::zeros(f, self.cols, 1);
                v.data[fc] = 1;
                for (r, &pc) in pivots.iter().enumerate() {
                    v.data[pc] = f.neg(reduced.get(r, fc));
                }
                v
            })
            .collect()
    }

    /// Null space basis packed as the columns of one `cols x nullity` matrix.
    pub fn kernel_matrix(&self) -> Matrix {
        let basis = self.kernel_basis();
        let mut out = Matrix::zeros(self.field, self.cols, basis.len());
        for (j, v) in basis.iter().enumerate() {
            for i in 0..self.cols {
                out.set(i, j, v.data[i]);
            }
        }
        out
    }

    /// All solutions of `self * X = b`, or `None` when inconsistent.
    pub fn solve_all(&self, b: &Matrix) -> Option<Solution> {
        assert_eq!(self.rows, b.rows, "solve_all: row mismatch");
        let f = self.field;
        let aug = self.hcat(b);
        let Rref { reduced, pivots, .. } = aug.rref();
        if pivots.iter().any(|&c| c >= self.cols) {
            return None;
        }
        let mut particular = Matrix::zeros(f, self.cols, b.cols);
        for (r, &pc) in pivots.iter().enumerate() {
            for j in 0..b.cols {
                particular.set(pc, j, reduced.get(r, self.cols + j));
            }
        }
        let null = self.kernel_basis();
        let mut kernel = Vec::with_capacity(null.len() * b.cols);
        for v in &null {
            for j in 0..b.cols {
                let mut k = Matrix::zeros(f, self.cols, b.cols);
                for i in 0..self.cols {
                    k.set(i, j, v.data[i]);
                }
                kernel.push(k);
            }
        }
        Some(Solution { particular, kernel })
    }

    /// Returns the inverse when the matrix is square of full rank. The result
    /// is checked against both products before it is returned.
    pub fn inverse(&self) -> Option<Matrix> {
        if self.rows != self.cols {
            return None;
        }
        let n = self.rows;
        let sol = self.solve_all(&Matrix::identity(self.field, n))?;
        if !sol.kernel.is_empty() {
            return None;
        }
        let inv = sol.particular;
        assert!(self.matmul(&inv).is_identity() && inv.matmul(self).is_identity());
        Some(inv)
    }

    pub fn is_invertible(&self) -> bool {
        self.rows == self.cols && self.rank() == self.rows
    }

    /// Full column rank (injective as a linear map).
    pub fn is_injective(&self) -> bool {
        self.rank() == self.cols
    }

    /// Full row rank (surjective as a linear map).
    pub fn is_surjective(&self) -> bool {
        self.rank() == self.rows
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "F{}{:?}", self.field.p(), self.to_nested())
    }
}

/// Iterates all coefficient vectors in `F_p^len` in lexicographic order
/// (last coordinate fastest), starting from zero.
pub struct CoefficientIter {
    p: u8,
    cur: Vec<u8>,
    done: bool,
}

impl CoefficientIter {
    pub fn new(field: FieldPrime, len: usize) -> Self {
        CoefficientIter { p: field.p(), cur: vec![0; len], done: false }
    }
}

impl Iterator for CoefficientIter {
    type Item = Vec<u8>;
    fn next(&mut self) -> Option<Vec<u8>> {
        if self.done {
            return None;
        }
        let out = self.cur.clone();
        let mut i = self.cur.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            self.cur[i] += 1;
            if self.cur[i] < self.p {
                break;
            }
            self.cur[i] = 0;
        }
        Some(out)
    }
}

/// `p^k`, saturating.
pub fn space_size(field: FieldPrime, k: usize) -> u64 {
    (field.p() as u64).checked_pow(k as u32).unwrap_or(u64::MAX)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f2() -> FieldPrime {
        FieldPrime::new(2).unwrap()
    }

    /// Brute-force solutions of `a X = b` over F_p by enumerating every X.
    fn brute_solutions(a: &Matrix, b: &Matrix) -> Vec<Matrix> {
        let f = a.field();
        let (r, c) = (a.cols(), b.cols());
        CoefficientIter::new(f, r * c)
            .map(|e| Matrix::from_rows(f, r, c, &e).unwrap())
            .filter(|x| a.matmul(x) == *b)
            .collect()
    }

    fn span_size(sol: &Solution) -> usize {
        let f = sol.particular.field();
        let mut set = std::collections::HashSet::new();
        for coeffs in CoefficientIter::new(f, sol.kernel.len()) {
            let mut x = sol.particular.clone();
            for (c, k) in coeffs.iter().zip(&sol.kernel) {
                x = x.add(&k.scale(*c));
            }
            set.insert(x);
        }
        set.len()
    }

    #[test]
    fn prime_validation() {
        assert!(FieldPrime::new(4).is_err());
        assert!(FieldPrime::new(11).is_err());
        assert!(FieldPrime::new(1).is_err());
        for p in [2, 3, 5, 7] {
            let f = FieldPrime::new(p).unwrap();
            for a in 1..p {
                assert_eq!(f.mul(a, f.inv(a)), 1);
            }
        }
    }

    #[test]
    fn rref_examples() {
        let f = f2();
        let id = Matrix::identity(f, 2);
        let r = id.rref();
        assert_eq!((r.reduced.clone(), r.rank, r.pivots.clone()), (id.clone(), 2, vec![0, 1]));

        let z = Matrix::zeros(f, 3, 2);
        let r = z.rref();
        assert_eq!((r.reduced, r.rank, r.pivots), (z, 0, vec![]));

        // [[1,1],[1,1]] reduces by R2 <- R2 + R1 to [[1,1],[0,0]].
        let m = Matrix::from_nested(f, &[vec![1, 1], vec![1, 1]]);
        let r = m.rref();
        assert_eq!(r.rank, 1);
        assert_eq!(r.pivots, vec![0]);
        assert_eq!(r.reduced, Matrix::from_nested(f, &[vec![1, 1], vec![0, 0]]));
    }

    #[test]
    fn solve_all_examples() {
        let f = f2();
        let b = Matrix::from_nested(f, &[vec![1, 0, 1], vec![0, 1, 1]]);
        let s = Matrix::identity(f, 2).solve_all(&b).unwrap();
        assert_eq!(s.particular, b);
        assert!(s.kernel.is_empty());

        let z = Matrix::zeros(f, 2, 2);
        let s = z.solve_all(&z).unwrap();
        assert!(s.particular.is_zero());
        assert_eq!(s.kernel.len(), 4);

        // [[1,1]] X = [[1]]: the four candidate X are 00, 01, 10, 11; the
        // solutions are 01 and 10, so particular = (1,0)^T and kernel {(1,1)^T}.
        let a = Matrix::from_nested(f, &[vec![1, 1]]);
        let s = a.solve_all(&Matrix::from_nested(f, &[vec![1]])).unwrap();
        assert_eq!(s.particular, Matrix::column(f, &[1, 0]));
        assert_eq!(s.kernel, vec![Matrix::column(f, &[1, 1])]);
        let brute = brute_solutions(&a, &Matrix::from_nested(f, &[vec![1]]));
        assert_eq!(brute.len(), 2);

        assert!(z.solve_all(&Matrix::identity(f, 2)).is_none());
    }

    #[test]
    fn kernel_and_inverse_examples() {
        let f = f2();
        assert!(Matrix::identity(f, 3).kernel_basis().is_empty());
        let kb = Matrix::zeros(f, 3, 3).kernel_basis();
        assert_eq!(kb.len(), 3);
        for (i, v) in kb.iter().enumerate() {
            let mut e = vec![0; 3];
            e[i] = 1;
            assert_eq!(*v, Matrix::column(f, &e));
        }
        assert_eq!(Matrix::from_nested(f, &[vec![1, 1]]).kernel_basis(), vec![Matrix::column(f, &[1, 1])]);

        assert!(Matrix::identity(f, 2).is_invertible());
        assert!(!Matrix::zeros(f, 2, 3).is_invertible());
        assert!(Matrix::zeros(f, 2, 3).inverse().is_none());
        let m = Matrix::from_nested(f, &[vec![1, 1], vec![0, 1]]);
        assert_eq!(m.inverse().unwrap(), m);
        assert_eq!(m.matmul(&m), Matrix::identity(f, 2));
    }

    #[test]
    fn solve_all_matches_brute_force_small() {
        // Exhaustive over all 1x2, 2x2 and 2x1 systems with 1-column right sides over F2,
        // plus all 3x3 coefficient matrices against a fixed right side.
        let f = f2();
        for (r, c) in [(1, 2), (2, 2), (2, 1), (3, 2), (2, 3)] {
            for a_e in CoefficientIter::new(f, r * c) {
                let a = Matrix::from_rows(f, r, c, &a_e).unwrap();
                for b_e in CoefficientIter::new(f, r) {
                    let b = Matrix::from_rows(f, r, 1, &b_e).unwrap();
                    let brute = brute_solutions(&a, &b);
                    match a.solve_all(&b) {
                        None => assert!(brute.is_empty()),
                        Some(sol) => {
                            assert_eq!(a.matmul(&sol.particular), b);
                            assert_eq!(span_size(&sol), brute.len());
                        }
                    }
                }
            }
        }
        let b = Matrix::column(f, &[1, 0, 1]);
        for a_e in CoefficientIter::new(f, 9) {
            let a = Matrix::from_rows(f, 3, 3, &a_e).unwrap();
            let brute = brute_solutions(&a, &b);
            match a.solve_all(&b) {
                None => assert!(brute.is_empty()),
                Some(sol) => assert_eq!(span_size(&sol), brute.len()),
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_matrix() -> impl Strategy<Value = Matrix> {
            (prop::sample::select(vec![2u8, 3, 5, 7]), 0usize..5, 0usize..5).prop_flat_map(|(p, r, c)| {
                prop::collection::vec(0..p, r * c).prop_map(move |e| {
                    Matrix::from_rows(FieldPrime::new(p).unwrap(), r, c, &e).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn rref_is_idempotent(m in arb_matrix()) {
                let once = m.rref().reduced;
                prop_assert_eq!(once.rref().reduced, once.clone());
            }

            #[test]
            fn rank_nullity(m in arb_matrix()) {
                prop_assert_eq!(m.rank() + m.kernel_basis().len(), m.cols());
                for k in m.kernel_basis() {
                    prop_assert!(m.matmul(&k).is_zero());
                }
            }

            #[test]
            fn solutions_verify(m in arb_matrix(), seed in any::<u64>()) {
                let f = m.field();
                let x_e: Vec<u8> = (0..m.cols() * 2).map(|i| ((seed >> (i % 60)) as u8) % f.p()).collect();
                let x = Matrix::from_rows(f, m.cols(), 2, &x_e).unwrap();
                let b = m.matmul(&x);
                let sol = m.solve_all(&b).expect("consistent by construction");
                prop_assert_eq!(m.matmul(&sol.particular), b);
                for k in &sol.kernel {
                    prop_assert!(m.matmul(k).is_zero());
                }
            }
        }
    }
}
