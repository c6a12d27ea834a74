//! Dense exact linear algebra over the integers and the rationals.
//!
//! Everything here is fraction-free or exact-rational; there is no floating
//! point anywhere in the crate.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

pub type Rational = BigRational;

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

/// `q mod 1`, as a representative in `[0, 1)`.
pub fn frac(q: &Rational) -> Rational {
    q - q.floor()
}

/// Row-major dense matrix.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: Clone> Matrix<T> {
    pub fn filled(rows: usize, cols: usize, value: T) -> Self {
        Matrix { rows, cols, data: vec![value; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<T>>) -> Self {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|r| r.len() == n_cols), "ragged matrix");
        Matrix { rows: n_rows, cols: n_cols, data: rows.into_iter().flatten().collect() }
    }

    pub fn map<U, F: Fn(&T) -> U>(&self, f: F) -> Matrix<U> {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// The submatrix on the given row and column index lists.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Self {
        Matrix {
            rows: rows.len(),
            cols: cols.len(),
            data: rows
                .iter()
                .flat_map(|&i| cols.iter().map(move |&j| self[(i, j)].clone()))
                .collect(),
        }
    }
}

impl<T> Matrix<T> {
    pub fn n_rows(&self) -> usize {
        self.rows
    }

    pub fn n_cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
}

impl<T: Clone + Zero + One> Matrix<T> {
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::filled(n, n, T::zero());
        for i in 0..n {
            m[(i, i)] = T::one();
        }
        m
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (i, j): (usize, usize)) -> &T {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut T {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<T: fmt::Display> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "[")?;
        for i in 0..self.rows {
            write!(f, "  [")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ", ")?;
                }
                write!(f, "{}", self.data[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        write!(f, "]")
    }
}

impl Matrix<BigInt> {
    pub fn mul(&self, other: &Matrix<BigInt>) -> Matrix<BigInt> {
        assert_eq!(self.cols, other.rows);
        let mut out = Matrix::filled(self.rows, other.cols, BigInt::zero());
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * &other[(k, j)];
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[BigInt]) -> Vec<BigInt> {
        assert_eq!(self.cols, v.len());
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

pub fn to_big(m: &Matrix<i64>) -> Matrix<BigInt> {
    m.map(|&x| BigInt::from(x))
}

/// Determinant by fraction-free (Bareiss) elimination with row pivoting.
pub fn determinant(m: &Matrix<i64>) -> BigInt {
    assert!(m.is_square());
    let n = m.n_rows();
    if n == 0 {
        return BigInt::one();
    }
    let mut a = to_big(m);
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if a[(k, k)].is_zero() {
            match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                Some(p) => {
                    a.swap_rows(k, p);
                    sign = -sign;
                }
                None => return BigInt::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
            a[(i, k)] = BigInt::zero();
        }
        prev = a[(k, k)].clone();
    }
    sign * &a[(n - 1, n - 1)]
}

/// Determinant of a rational matrix by Gaussian elimination.
pub fn determinant_rational(m: &Matrix<Rational>) -> Rational {
    assert!(m.is_square());
    let n = m.n_rows();
    let mut a = m.clone();
    let mut det = Rational::one();
    for k in 0..n {
        let Some(p) = (k..n).find(|&i| !a[(i, k)].is_zero()) else {
            return Rational::zero();
        };
        if p != k {
            a.swap_rows(k, p);
            det = -det;
        }
        let pivot = a[(k, k)].clone();
        det *= &pivot;
        for i in k + 1..n {
            if a[(i, k)].is_zero() {
                continue;
            }
            let f = &a[(i, k)] / &pivot;
            for j in k..n {
                let d = &f * &a[(k, j)];
                a[(i, j)] -= d;
            }
        }
    }
    det
}

/// Leading principal minors `det(m[..k, ..k])` for `k = 1..=n`, computed by
/// Bareiss elimination without pivoting. The list stops early at the first
/// zero minor (later minors are not reachable without pivoting); the zero
/// is included.
pub fn leading_principal_minors(m: &Matrix<i64>) -> Vec<BigInt> {
    assert!(m.is_square());
    let n = m.n_rows();
    let mut a = to_big(m);
    let mut prev = BigInt::one();
    let mut minors = Vec::with_capacity(n);
    for k in 0..n {
        let pivot = a[(k, k)].clone();
        minors.push(pivot.clone());
        if pivot.is_zero() {
            break;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&a[(i, j)] * &pivot - &a[(i, k)] * &a[(k, j)]) / &prev;
                a[(i, j)] = v;
            }
        }
        prev = pivot;
    }
    minors
}

/// Exact inverse of an integer matrix, `None` when singular.
pub fn inverse(m: &Matrix<i64>) -> Option<Matrix<Rational>> {
    assert!(m.is_square());
    let n = m.n_rows();
    let mut a = m.map(|&x| rat(x));
    let mut inv = Matrix::<Rational>::identity(n);
    for k in 0..n {
        let p = (k..n).find(|&i| !a[(i, k)].is_zero())?;
        a.swap_rows(k, p);
        inv.swap_rows(k, p);
        let pivot = a[(k, k)].clone();
        for j in 0..n {
            a[(k, j)] = &a[(k, j)] / &pivot;
            inv[(k, j)] = &inv[(k, j)] / &pivot;
        }
        for i in 0..n {
            if i == k || a[(i, k)].is_zero() {
                continue;
            }
            let f = a[(i, k)].clone();
            for j in 0..n {
                let da = &f * &a[(k, j)];
                a[(i, j)] -= da;
                let di = &f * &inv[(k, j)];
                inv[(i, j)] -= di;
            }
        }
    }
    Some(inv)
}

/// `m · v` with an integer matrix and a rational vector.
pub fn apply(m: &Matrix<i64>, v: &[Rational]) -> Vec<Rational> {
    assert_eq!(m.n_cols(), v.len());
    (0..m.n_rows())
        .map(|i| {
            m.row(i)
                .iter()
                .zip(v)
                .filter(|(a, _)| **a != 0)
                .map(|(a, x)| x * BigInt::from(*a))
                .sum()
        })
        .collect()
}

pub fn apply_rational(m: &Matrix<Rational>, v: &[Rational]) -> Vec<Rational> {
    assert_eq!(m.n_cols(), v.len());
    (0..m.n_rows())
        .map(|i| m.row(i).iter().zip(v).map(|(a, x)| a * x).sum())
        .collect()
}

/// Smith normal form `u · m · v = s` of an integer matrix.
#[derive(Clone, Debug)]
pub struct Smith {
    pub u: Matrix<BigInt>,
    /// Inverse of `u`, accumulated alongside it.
    pub u_inv: Matrix<BigInt>,
    pub v: Matrix<BigInt>,
    pub s: Matrix<BigInt>,
}

impl Smith {
    /// Diagonal entries of `s` (length `min(rows, cols)`), nonnegative and
    /// each dividing the next.
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.n_rows().min(self.s.n_cols())).map(|i| self.s[(i, i)].clone()).collect()
    }
}

/// Row operations on the working matrix, mirrored onto `u` and `u_inv`.
struct RowOps<'a> {
    a: &'a mut Matrix<BigInt>,
    u: &'a mut Matrix<BigInt>,
    u_inv: &'a mut Matrix<BigInt>,
}

impl RowOps<'_> {
    fn swap(&mut self, i: usize, t: usize) {
        self.a.swap_rows(i, t);
        self.u.swap_rows(i, t);
        self.u_inv.swap_cols(i, t);
    }

    /// row_i -= q * row_t
    fn sub(&mut self, i: usize, t: usize, q: &BigInt) {
        for j in 0..self.a.n_cols() {
            let d = q * &self.a[(t, j)];
            self.a[(i, j)] -= d;
        }
        for j in 0..self.u.n_cols() {
            let d = q * &self.u[(t, j)];
            self.u[(i, j)] -= d;
        }
        // inverse op is row_i += q * row_t, i.e. col_t += q * col_i on u_inv
        for r in 0..self.u_inv.n_rows() {
            let d = q * &self.u_inv[(r, i)];
            self.u_inv[(r, t)] += d;
        }
    }

    fn negate(&mut self, t: usize) {
        for j in 0..self.a.n_cols() {
            self.a[(t, j)] = -&self.a[(t, j)];
        }
        for j in 0..self.u.n_cols() {
            self.u[(t, j)] = -&self.u[(t, j)];
        }
        for r in 0..self.u_inv.n_rows() {
            self.u_inv[(r, t)] = -&self.u_inv[(r, t)];
        }
    }
}

fn col_sub(a: &mut Matrix<BigInt>, v: &mut Matrix<BigInt>, j: usize, t: usize, q: &BigInt) {
    for i in 0..a.n_rows() {
        let d = q * &a[(i, t)];
        a[(i, j)] -= d;
    }
    for i in 0..v.n_rows() {
        let d = q * &v[(i, t)];
        v[(i, j)] -= d;
    }
}

/// Smith normal form by repeated Euclidean row/column reduction.
pub fn smith_normal_form(m: &Matrix<BigInt>) -> Smith {
    let (rows, cols) = (m.n_rows(), m.n_cols());
    let mut a = m.clone();
    let mut u = Matrix::<BigInt>::identity(rows);
    let mut u_inv = Matrix::<BigInt>::identity(rows);
    let mut v = Matrix::<BigInt>::identity(cols);

    for t in 0..rows.min(cols) {
        // smallest nonzero entry of the trailing block
        let pivot = (t..rows)
            .flat_map(|i| (t..cols).map(move |j| (i, j)))
            .filter(|&(i, j)| !a[(i, j)].is_zero())
            .min_by(|&p, &q| a[p].abs().cmp(&a[q].abs()));
        let Some((pi, pj)) = pivot else { break };
        RowOps { a: &mut a, u: &mut u, u_inv: &mut u_inv }.swap(pi, t);
        a.swap_cols(pj, t);
        v.swap_cols(pj, t);

        loop {
            let mut dirty = false;
            for i in t + 1..rows {
                if a[(i, t)].is_zero() {
                    continue;
                }
                let q = a[(i, t)].div_floor(&a[(t, t)]);
                RowOps { a: &mut a, u: &mut u, u_inv: &mut u_inv }.sub(i, t, &q);
                if !a[(i, t)].is_zero() {
                    RowOps { a: &mut a, u: &mut u, u_inv: &mut u_inv }.swap(i, t);
                    dirty = true;
                }
            }
            for j in t + 1..cols {
                if a[(t, j)].is_zero() {
                    continue;
                }
                let q = a[(t, j)].div_floor(&a[(t, t)]);
                col_sub(&mut a, &mut v, j, t, &q);
                if !a[(t, j)].is_zero() {
                    a.swap_cols(j, t);
                    v.swap_cols(j, t);
                    dirty = true;
                }
            }
            if dirty {
                continue;
            }
            // divisibility of the trailing block by the pivot
            let bad = (t + 1..rows)
                .flat_map(|i| (t + 1..cols).map(move |j| (i, j)))
                .find(|&(i, j)| !a[(i, j)].is_multiple_of(&a[(t, t)]));
            match bad {
                Some((i, _)) => {
                    // row_t += row_i, then the column-t entry of row t is
                    // reduced again by the loop
                    RowOps { a: &mut a, u: &mut u, u_inv: &mut u_inv }.sub(t, i, &-BigInt::one());
                }
                None => break,
            }
        }
        if a[(t, t)].is_negative() {
            RowOps { a: &mut a, u: &mut u, u_inv: &mut u_inv }.negate(t);
        }
    }
    Smith { u, u_inv, v, s: a }
}
