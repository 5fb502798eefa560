//! Exact integer and rational linear algebra.
//!
//! Everything downstream (fans, cone indices, intersection forms) reduces to
//! the types here. No floating point is used anywhere in this module.

use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("zero vector has no primitive representative")]
    ZeroVector,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (entry ({row},{col}) differs from its transpose)")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is singular; kernel witness {kernel:?}")]
    Singular { kernel: Vec<String> },
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
}

/// A vector of the lattice `Z^d`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct LatticeVector(pub Vec<i64>);

impl LatticeVector {
    pub fn new(coords: impl Into<Vec<i64>>) -> Self {
        LatticeVector(coords.into())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[i64] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&c| c == 0)
    }

    /// gcd of the coordinates (0 for the zero vector).
    pub fn content(&self) -> i64 {
        self.0.iter().fold(0i64, |g, &c| g.gcd(&c))
    }

    pub fn is_primitive(&self) -> bool {
        self.content() == 1
    }

    pub fn neg(&self) -> Self {
        LatticeVector(self.0.iter().map(|c| -c).collect())
    }
}

impl From<[i64; 2]> for LatticeVector {
    fn from(v: [i64; 2]) -> Self {
        LatticeVector(v.to_vec())
    }
}

impl fmt::Display for LatticeVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// Divides `v` by the gcd of its coordinates.
pub fn primitive(v: &LatticeVector) -> Result<LatticeVector, LatticeError> {
    let g = v.content();
    if g == 0 {
        return Err(LatticeError::ZeroVector);
    }
    Ok(LatticeVector(v.0.iter().map(|c| c / g).collect()))
}

/// Oriented area `a0*b1 - a1*b0` of two plane vectors.
pub fn det2(a: &LatticeVector, b: &LatticeVector) -> Result<i64, LatticeError> {
    for v in [a, b] {
        if v.dim() != 2 {
            return Err(LatticeError::DimensionMismatch {
                expected: 2,
                got: v.dim(),
            });
        }
    }
    let d = cross([a.0[0], a.0[1]], [b.0[0], b.0[1]]);
    i64::try_from(d).map_err(|_| LatticeError::Overflow)
}

/// Unchecked 2x2 determinant on raw pairs, widened so it cannot overflow.
#[inline]
pub fn cross(a: [i64; 2], b: [i64; 2]) -> i128 {
    a[0] as i128 * b[1] as i128 - a[1] as i128 * b[0] as i128
}

/// Dense row-major integer matrix.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.as_ref().len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.as_ref().len(), c, "ragged rows");
            for (j, &x) in row.as_ref().iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
            }
        }
        m
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[&LatticeVector]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |v| v.dim());
        let mut m = Self::zeros(r, c);
        for (j, v) in cols.iter().enumerate() {
            assert_eq!(v.dim(), r, "columns of unequal dimension");
            for (i, &x) in v.0.iter().enumerate() {
                m[(i, j)] = BigInt::from(x);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn to_i64_rows(&self) -> Option<Vec<Vec<i64>>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].to_i64()).collect())
            .collect()
    }

    pub fn apply(&self, v: &LatticeVector) -> Result<LatticeVector, LatticeError> {
        if v.dim() != self.cols {
            return Err(LatticeError::DimensionMismatch {
                expected: self.cols,
                got: v.dim(),
            });
        }
        (0..self.rows)
            .map(|i| {
                let s: BigInt = (0..self.cols).map(|j| &self[(i, j)] * v.0[j]).sum();
                s.to_i64().ok_or(LatticeError::Overflow)
            })
            .collect::<Result<Vec<_>, _>>()
            .map(LatticeVector)
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, LatticeError> {
        if self.rows != self.cols {
            return Err(LatticeError::NotSquare {
                rows: self.rows,
                cols: self.cols,
            });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a[(i, k)].is_zero()) else {
                    return Ok(BigInt::zero());
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * &a[(n - 1, n - 1)])
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = &self[(src, j)] * k;
            self[(dst, j)] += v;
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = &self[(i, src)] * k;
            self[(i, dst)] += v;
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -&self[(r, j)];
            self[(r, j)] = v;
        }
    }

    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.rows.min(self.cols))
            .map(|i| self[(i, i)].clone())
            .collect()
    }
}

impl Index<(usize, usize)> for IntMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for IntMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &IntMatrix {
    type Output = IntMatrix;
    fn mul(self, rhs: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, rhs.rows, "incompatible shapes");
        let mut out = IntMatrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * &rhs[(k, j)];
                }
            }
        }
        out
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "[{}]", row.join(" "))?;
        }
        Ok(())
    }
}

/// `U * M * V = S` with `U`, `V` unimodular and `S` diagonal.
#[derive(Debug, Clone)]
pub struct SmithDecomposition {
    pub u: IntMatrix,
    pub s: IntMatrix,
    pub v: IntMatrix,
}

impl SmithDecomposition {
    /// Nonzero diagonal entries of `S`, each dividing the next.
    pub fn invariant_factors(&self) -> Vec<BigInt> {
        self.s
            .diagonal()
            .into_iter()
            .filter(|d| !d.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariant_factors().len()
    }
}

/// Smith normal form by alternating row and column elimination.
pub fn smith_normal_form(m: &IntMatrix) -> SmithDecomposition {
    let (rows, cols) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMatrix::identity(rows);
    let mut v = IntMatrix::identity(cols);

    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block becomes the pivot
        let Some((pi, pj)) = min_abs_entry(&s, t) else {
            break;
        };
        s.swap_rows(t, pi);
        u.swap_rows(t, pi);
        s.swap_cols(t, pj);
        v.swap_cols(t, pj);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if s[(i, t)].is_zero() {
                    continue;
                }
                let q = -s[(i, t)].div_floor(&s[(t, t)]);
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                if !s[(i, t)].is_zero() {
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if s[(t, j)].is_zero() {
                    continue;
                }
                let q = -s[(t, j)].div_floor(&s[(t, t)]);
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                if !s[(t, j)].is_zero() {
                    dirty = true;
                }
            }
            if !dirty {
                // pivot row/column cleared; enforce divisibility on the block
                let bad = (t + 1..rows)
                    .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                    .find(|&(i, j)| !s[(i, j)].is_multiple_of(&s[(t, t)]));
                match bad {
                    None => break,
                    Some((i, _)) => {
                        let one = BigInt::one();
                        s.add_row(t, i, &one);
                        u.add_row(t, i, &one);
                    }
                }
            }
            // re-select the smallest entry in the pivot row/column
            let (mut bi, mut bj) = (t, t);
            for i in t..rows {
                if !s[(i, t)].is_zero() && s[(i, t)].abs() < s[(bi, bj)].abs() {
                    (bi, bj) = (i, t);
                }
            }
            for j in t..cols {
                if !s[(t, j)].is_zero() && s[(t, j)].abs() < s[(bi, bj)].abs() {
                    (bi, bj) = (t, j);
                }
            }
            s.swap_rows(t, bi);
            u.swap_rows(t, bi);
            s.swap_cols(t, bj);
            v.swap_cols(t, bj);
        }
        if s[(t, t)].is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    SmithDecomposition { u, s, v }
}

fn min_abs_entry(s: &IntMatrix, t: usize) -> Option<(usize, usize)> {
    let mut best: Option<(usize, usize)> = None;
    for i in t..s.rows {
        for j in t..s.cols {
            if s[(i, j)].is_zero() {
                continue;
            }
            if best.is_none_or(|(bi, bj)| s[(i, j)].abs() < s[(bi, bj)].abs()) {
                best = Some((i, j));
            }
        }
    }
    best
}

/// Dense row-major matrix of reduced rationals.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RationalMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

impl RationalMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        RationalMatrix {
            rows,
            cols,
            data: vec![BigRational::zero(); rows * cols],
        }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> BigRational) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        RationalMatrix { rows, cols, data }
    }

    pub fn from_i64_rows<R: AsRef<[i64]>>(rows: &[R]) -> Self {
        let c = rows.first().map_or(0, |r| r.as_ref().len());
        Self::from_fn(rows.len(), c, |i, j| {
            BigRational::from_integer(rows[i].as_ref()[j].into())
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[BigRational] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// First off-diagonal position where `G != G^T`, if any.
    pub fn asymmetry(&self) -> Option<(usize, usize)> {
        (0..self.rows)
            .flat_map(|i| (i + 1..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self[(i, j)] != self[(j, i)])
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && self.asymmetry().is_none()
    }

    /// Principal submatrix on the given index list.
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        Self::from_fn(idx.len(), idx.len(), |i, j| self[(idx[i], idx[j])].clone())
    }

    pub fn mul_vec(&self, x: &[BigRational]) -> Vec<BigRational> {
        assert_eq!(x.len(), self.cols, "vector length mismatch");
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// `x^T G y`
    pub fn bilinear(&self, x: &[BigRational], y: &[BigRational]) -> BigRational {
        x.iter().zip(self.mul_vec(y)).map(|(a, b)| a * b).sum()
    }

    /// Grows a square matrix by one row and column, filled with zero except
    /// the new diagonal entry.
    pub fn bordered(&self, diag: BigRational) -> Self {
        let mut out = self.clone();
        out.border(diag);
        out
    }

    /// In-place form of [`RationalMatrix::bordered`].
    pub fn border(&mut self, diag: BigRational) {
        assert!(self.is_square(), "bordering needs a square matrix");
        let n = self.rows;
        let old = std::mem::take(&mut self.data);
        let mut data = Vec::with_capacity((n + 1) * (n + 1));
        let mut it = old.into_iter();
        for _ in 0..n {
            data.extend(it.by_ref().take(n));
            data.push(BigRational::zero());
        }
        data.extend(std::iter::repeat_with(BigRational::zero).take(n));
        data.push(diag);
        self.rows = n + 1;
        self.cols = n + 1;
        self.data = data;
    }
}

impl Index<(usize, usize)> for RationalMatrix {
    type Output = BigRational;
    fn index(&self, (i, j): (usize, usize)) -> &BigRational {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for RationalMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigRational {
        assert!(i < self.rows && j < self.cols, "index out of bounds");
        &mut self.data[i * self.cols + j]
    }
}

pub fn rational(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(n.into())
}

/// `p/q` string, or plain `p` for integers.
pub fn fmt_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Exact solution of `G x = rhs`.
pub fn solve_rational(
    g: &RationalMatrix,
    rhs: &[BigRational],
) -> Result<Vec<BigRational>, LatticeError> {
    if !g.is_square() {
        return Err(LatticeError::NotSquare {
            rows: g.rows,
            cols: g.cols,
        });
    }
    let n = g.rows;
    if rhs.len() != n {
        return Err(LatticeError::DimensionMismatch {
            expected: n,
            got: rhs.len(),
        });
    }
    // reduced row echelon form of [G | rhs]
    let w = n + 1;
    let mut a: Vec<BigRational> = Vec::with_capacity(n * w);
    for i in 0..n {
        a.extend(g.row(i).iter().cloned());
        a.push(rhs[i].clone());
    }
    let mut pivots = Vec::with_capacity(n);
    let mut r = 0;
    for c in 0..n {
        let Some(p) = (r..n).find(|&i| !a[i * w + c].is_zero()) else {
            continue;
        };
        for j in 0..w {
            a.swap(r * w + j, p * w + j);
        }
        let inv = a[r * w + c].recip();
        // intersection matrices are sparse; only touch nonzero pivot-row entries
        let support: Vec<usize> = (c..w).filter(|&j| !a[r * w + j].is_zero()).collect();
        for &j in &support {
            a[r * w + j] = &a[r * w + j] * &inv;
        }
        for i in 0..n {
            if i == r || a[i * w + c].is_zero() {
                continue;
            }
            let f = a[i * w + c].clone();
            for &j in &support {
                let v = &a[r * w + j] * &f;
                a[i * w + j] -= v;
            }
        }
        pivots.push(c);
        r += 1;
    }
    if pivots.len() < n {
        // free column gives a kernel vector
        let free = (0..n).find(|c| !pivots.contains(c)).unwrap_or(0);
        let mut kernel = vec![BigRational::zero(); n];
        kernel[free] = BigRational::one();
        for (row, &pc) in pivots.iter().enumerate() {
            kernel[pc] = -a[row * w + free].clone();
        }
        return Err(LatticeError::Singular {
            kernel: kernel.iter().map(fmt_rational).collect(),
        });
    }
    Ok((0..n).map(|i| a[i * w + n].clone()).collect())
}

/// Index `k` (1-based) of the first leading principal minor violating
/// `(-1)^k * minor_k > 0`, or `None` when `G` is negative definite.
pub fn negative_definite_witness(g: &RationalMatrix) -> Result<Option<usize>, LatticeError> {
    if !g.is_square() {
        return Err(LatticeError::NotSquare {
            rows: g.rows,
            cols: g.cols,
        });
    }
    if let Some((row, col)) = g.asymmetry() {
        return Err(LatticeError::NotSymmetric { row, col });
    }
    // Without pivoting, the k-th pivot is minor_k / minor_{k-1}, so the sign
    // pattern holds iff every pivot is negative.
    let n = g.rows;
    let mut a = g.data.clone();
    for k in 0..n {
        let pivot = a[k * n + k].clone();
        if !pivot.is_negative() {
            return Ok(Some(k + 1));
        }
        for i in k + 1..n {
            if a[i * n + k].is_zero() {
                continue;
            }
            let f = &a[i * n + k] / &pivot;
            for j in k..n {
                if a[k * n + j].is_zero() {
                    continue;
                }
                let v = &a[k * n + j] * &f;
                a[i * n + j] -= v;
            }
        }
    }
    Ok(None)
}

pub fn is_negative_definite(g: &RationalMatrix) -> Result<bool, LatticeError> {
    negative_definite_witness(g).map(|w| w.is_none())
}

/// Deterministic element of `GL(d, Z)` built from shears with `|k| <= 5`,
/// row swaps and sign flips.
pub fn random_unimodular(seed: u64, d: usize) -> IntMatrix {
    assert!(d >= 1, "dimension must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut m = IntMatrix::identity(d);
    if d == 1 {
        if rng.gen_bool(0.5) {
            m.negate_row(0);
        }
        return m;
    }
    for _ in 0..3 * d {
        let i = rng.gen_range(0..d);
        let mut j = rng.gen_range(0..d - 1);
        if j >= i {
            j += 1;
        }
        match rng.gen_range(0..4) {
            0 => m.swap_rows(i, j),
            1 => m.negate_row(i),
            _ => {
                let k = loop {
                    let k: i64 = rng.gen_range(-5..=5);
                    if k != 0 {
                        break k;
                    }
                };
                m.add_row(i, j, &BigInt::from(k));
            }
        }
    }
    m
}
