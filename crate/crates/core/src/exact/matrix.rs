use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::ser::SerializeSeq;
use serde::{Serialize, Serializer};

use super::cycq::{Cyclotomic, CycQ, Rational};
use super::ExactError;

/// Dense matrix over the cyclotomic rationals, row-major.
#[derive(Clone, PartialEq, Eq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<CycQ>,
}

impl Matrix {
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> CycQ) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: Vec<Vec<CycQ>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Matrix { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_ints(rows: &[&[i64]]) -> Self {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&x| CycQ::from_int(x)).collect()).collect())
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix { rows, cols, data: vec![CycQ::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |i, j| if i == j { CycQ::one() } else { CycQ::zero() })
    }

    pub fn diagonal(entries: &[CycQ]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |i, j| if i == j { entries[i].clone() } else { CycQ::zero() })
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

    pub fn get(&self, i: usize, j: usize) -> &CycQ {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: CycQ) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[CycQ] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<CycQ> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn entries(&self) -> &[CycQ] {
        &self.data
    }

    pub fn map(&self, f: impl Fn(&CycQ) -> CycQ) -> Matrix {
        Matrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(f).collect() }
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i).clone())
    }

    /// Entrywise complex conjugate.
    pub fn conj(&self) -> Matrix {
        self.map(CycQ::conj)
    }

    pub fn scale(&self, s: &CycQ) -> Matrix {
        self.map(|x| if x.is_zero() { x.clone() } else { x * s })
    }

    pub fn add(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, other: &Matrix) -> Matrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Matrix { rows: self.rows, cols: self.cols, data }
    }

    pub fn trace(&self) -> CycQ {
        assert!(self.is_square(), "trace of a non-square matrix");
        let mut t = CycQ::zero();
        for i in 0..self.rows {
            t += self.get(i, i);
        }
        t
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(CycQ::is_zero)
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| if i == j { self.get(i, j).is_one() } else { self.get(i, j).is_zero() })
            })
    }

    pub fn mul_vec(&self, v: &[CycQ]) -> Vec<CycQ> {
        assert_eq!(self.cols, v.len(), "shape mismatch in mul_vec");
        (0..self.rows)
            .map(|i| {
                let mut acc = CycQ::zero();
                for (a, x) in self.row(i).iter().zip(v) {
                    if !a.is_zero() && !x.is_zero() {
                        acc += &(a * x);
                    }
                }
                acc
            })
            .collect()
    }

    /// Exact product. Uses a scaled-integer kernel when the entries allow it
    /// and falls back to field arithmetic otherwise; both are exact.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        self.mul_scaled(other).unwrap_or_else(|| self.mul_generic(other))
    }

    pub(crate) fn mul_generic(&self, other: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        let idx = i * out.cols + j;
                        out.data[idx] += &(a * b);
                    }
                }
            }
        }
        out
    }

    fn mul_scaled(&self, other: &Matrix) -> Option<Matrix> {
        let field = common_field(self.data.iter().chain(&other.data));
        let d = field.degree;
        let a = Scaled::new(self, &field)?;
        let b = Scaled::new(other, &field)?;
        let max_power = field.powers.iter().flatten().map(|p| p.unsigned_abs()).max().unwrap_or(1).max(1);
        let bound = a.max_abs as f64 * b.max_abs as f64 * self.cols as f64 * d as f64 * max_power as f64 * d as f64;
        if bound >= 1e36 {
            return None;
        }
        let n = field.n as usize;
        let width = 2 * d - 1;
        let denom = &a.denom * &b.denom;
        let mut data = Vec::with_capacity(self.rows * other.cols);
        let mut acc = vec![0i128; other.cols * width];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|x| *x = 0);
            for k in 0..self.cols {
                if !a.nonzero[i * self.cols + k] {
                    continue;
                }
                let av = &a.vals[(i * self.cols + k) * d..][..d];
                for j in 0..other.cols {
                    if !b.nonzero[k * other.cols + j] {
                        continue;
                    }
                    let bv = &b.vals[(k * other.cols + j) * d..][..d];
                    let slot = &mut acc[j * width..][..width];
                    for (p, &x) in av.iter().enumerate() {
                        if x == 0 {
                            continue;
                        }
                        for (q, &y) in bv.iter().enumerate() {
                            slot[p + q] += x as i128 * y as i128;
                        }
                    }
                }
            }
            for j in 0..other.cols {
                let slot = &acc[j * width..][..width];
                let mut red = vec![0i128; d];
                for (s, &v) in slot.iter().enumerate() {
                    if v == 0 {
                        continue;
                    }
                    if s < d {
                        red[s] += v;
                    } else {
                        for (t, &p) in field.powers[s % n].iter().enumerate() {
                            red[t] += v * p as i128;
                        }
                    }
                }
                let coeffs = red.into_iter().map(|v| Rational::new(BigInt::from(v), denom.clone())).collect();
                data.push(CycQ::from_parts(field.clone(), coeffs));
            }
        }
        Some(Matrix { rows: self.rows, cols: other.cols, data })
    }

    pub fn pow(&self, e: u32) -> Matrix {
        assert!(self.is_square(), "power of a non-square matrix");
        let mut acc = Matrix::identity(self.rows);
        let mut sq = self.clone();
        let mut e = e;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&sq);
            }
            e >>= 1;
            if e > 0 {
                sq = sq.mul(&sq);
            }
        }
        acc
    }

    /// Reduced row echelon form and its pivot columns.
    pub fn rref(&self) -> (Matrix, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let Some(p) = (r..m.rows).find(|&i| !m.get(i, c).is_zero()) else {
                continue;
            };
            m.swap_rows(r, p);
            let inv = m.get(r, c).inv().expect("pivot is nonzero");
            for j in c..m.cols {
                let v = m.get(r, j) * &inv;
                m.set(r, j, v);
            }
            for i in 0..m.rows {
                if i == r || m.get(i, c).is_zero() {
                    continue;
                }
                let f = m.get(i, c).clone();
                for j in c..m.cols {
                    let pv = m.get(r, j);
                    if pv.is_zero() {
                        continue;
                    }
                    let v = m.get(i, j) - &(pv * &f);
                    m.set(i, j, v);
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel {x : A x = 0}.
    pub fn kernel(&self) -> Vec<Vec<CycQ>> {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut x = vec![CycQ::zero(); self.cols];
                x[f] = CycQ::one();
                for (row, &p) in pivots.iter().enumerate() {
                    x[p] = -r.get(row, f);
                }
                x
            })
            .collect()
    }

    pub fn inverse(&self) -> Result<Matrix, ExactError> {
        if !self.is_square() {
            return Err(ExactError::Shape(format!("{}x{} matrix has no inverse", self.rows, self.cols)));
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |i, j| {
            if j < n {
                self.get(i, j).clone()
            } else if j - n == i {
                CycQ::one()
            } else {
                CycQ::zero()
            }
        });
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(ExactError::Singular);
        }
        Ok(Matrix::from_fn(n, n, |i, j| r.get(i, n + j).clone()))
    }

    /// The same matrix with every entry moved to its minimal conductor.
    pub fn simplify(&self) -> Matrix {
        self.map(CycQ::simplify)
    }
}

fn common_field<'a>(entries: impl Iterator<Item = &'a CycQ>) -> Arc<Cyclotomic> {
    let mut best: Option<&Arc<Cyclotomic>> = None;
    let mut lcm = 1u32;
    for e in entries {
        let n = e.conductor();
        if !lcm.is_multiple_of(n) {
            lcm = lcm.lcm(&n);
        }
        if n == lcm {
            best = Some(e.field());
        }
    }
    match best {
        Some(f) if f.n == lcm => f.clone(),
        _ => Cyclotomic::new(lcm),
    }
}

/// A matrix scaled by a common denominator into small integer coordinates.
struct Scaled {
    denom: BigInt,
    vals: Vec<i64>,
    nonzero: Vec<bool>,
    max_abs: u64,
}

impl Scaled {
    fn new(m: &Matrix, field: &Arc<Cyclotomic>) -> Option<Scaled> {
        let embedded: Vec<CycQ> = m.data.iter().map(|e| e.embed_into(field)).collect();
        let mut denom = BigInt::one();
        for e in &embedded {
            for c in e.coeffs() {
                if !c.denom().is_one() {
                    denom = denom.lcm(c.denom());
                }
            }
        }
        let d = field.degree;
        let mut vals = Vec::with_capacity(embedded.len() * d);
        let mut nonzero = Vec::with_capacity(embedded.len());
        let mut max_abs = 0u64;
        for e in &embedded {
            nonzero.push(!e.is_zero());
            for c in e.coeffs() {
                let v = (c.numer() * (&denom / c.denom())).to_i64()?;
                max_abs = max_abs.max(v.unsigned_abs());
                vals.push(v);
            }
        }
        if denom.is_negative() || denom.to_i64().is_none() {
            return None;
        }
        Some(Scaled { denom, vals, nonzero, max_abs })
    }
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl Serialize for Matrix {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.rows))?;
        for i in 0..self.rows {
            seq.serialize_element(self.row(i))?;
        }
        seq.end()
    }
}

/// A subspace of an ambient coordinate space, held as a basis in reduced
/// row echelon form: basis vector `i` has a 1 at `pivots[i]` and zeros at
/// every other pivot position.
#[derive(Clone, Debug)]
pub struct Subspace {
    ambient: usize,
    basis: Vec<Vec<CycQ>>,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn span(ambient: usize, vectors: &[Vec<CycQ>]) -> Subspace {
        if vectors.is_empty() {
            return Subspace { ambient, basis: Vec::new(), pivots: Vec::new() };
        }
        assert!(vectors.iter().all(|v| v.len() == ambient), "vector length differs from ambient dimension");
        let m = Matrix::from_rows(vectors.to_vec());
        let (r, pivots) = m.rref();
        let basis = (0..pivots.len()).map(|i| r.row(i).to_vec()).collect();
        Subspace { ambient, basis, pivots }
    }

    /// The column space of `m`.
    pub fn column_space(m: &Matrix) -> Subspace {
        let cols: Vec<Vec<CycQ>> = (0..m.cols()).map(|j| m.column(j)).collect();
        Subspace::span(m.rows(), &cols)
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn basis(&self) -> &[Vec<CycQ>] {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Coordinates of `v` in the echelon basis, or `None` when `v` is not in the subspace.
    pub fn coordinates(&self, v: &[CycQ]) -> Option<Vec<CycQ>> {
        let coords: Vec<CycQ> = self.pivots.iter().map(|&p| v[p].clone()).collect();
        let mut residual = v.to_vec();
        for (c, b) in coords.iter().zip(&self.basis) {
            if c.is_zero() {
                continue;
            }
            for (r, x) in residual.iter_mut().zip(b) {
                if !x.is_zero() {
                    *r = &*r - &(c * x);
                }
            }
        }
        residual.iter().all(CycQ::is_zero).then_some(coords)
    }

    pub fn contains(&self, v: &[CycQ]) -> bool {
        self.coordinates(v).is_some()
    }

    /// Matrix of `map` restricted to this subspace, in the echelon basis.
    /// Fails when the subspace is not invariant.
    pub fn restrict(&self, map: &Matrix) -> Result<Matrix, ExactError> {
        let mut cols = Vec::with_capacity(self.dim());
        for b in &self.basis {
            let image = map.mul_vec(b);
            let c = self.coordinates(&image).ok_or(ExactError::NotInvariant)?;
            cols.push(c);
        }
        Ok(Matrix::from_fn(self.dim(), self.dim(), |i, j| cols[j][i].clone()))
    }

    /// Projection-free trace of a map known to preserve the subspace.
    pub fn trace_of(&self, map: &Matrix) -> Result<CycQ, ExactError> {
        Ok(self.restrict(map)?.trace())
    }
}

impl fmt::Display for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = self.row(i).iter().map(ToString::to_string).collect();
            writeln!(f, "[{}]", row.join(", "))?;
        }
        Ok(())
    }
}

/// Zero rational convenience used when building matrices from rationals.
pub fn rational_matrix(rows: &[Vec<Rational>]) -> Matrix {
    Matrix::from_rows(rows.iter().map(|r| r.iter().map(|x| CycQ::from_rational(x.clone())).collect()).collect())
}
