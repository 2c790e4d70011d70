//! Exact arithmetic over a prime field and dense linear algebra.
//!
//! Everything downstream (module actions, Hom systems, resolutions) reduces
//! to rank and kernel computations over `F_p`, so elimination here is written
//! with lazy modular reduction: row updates accumulate in `u64` and are only
//! reduced when the accumulated bound could overflow.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default modulus for a session.
pub const DEFAULT_PRIME: u32 = 101;

/// The prime field `F_p`, `3 <= p < 2^31`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "u32", into = "u32")]
pub struct PrimeField {
    p: u32,
}

impl TryFrom<u32> for PrimeField {
    type Error = Error;

    fn try_from(p: u32) -> Result<Self> {
        PrimeField::new(p)
    }
}

impl From<PrimeField> for u32 {
    fn from(f: PrimeField) -> u32 {
        f.p
    }
}

impl Default for PrimeField {
    fn default() -> Self {
        PrimeField { p: DEFAULT_PRIME }
    }
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= n as u64 {
        if (n as u64).is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl PrimeField {
    pub fn new(p: u32) -> Result<Self> {
        if !(3..1 << 31).contains(&p) || !is_prime(p) {
            return Err(Error::Input(format!("modulus {p} is not an odd prime below 2^31")));
        }
        Ok(PrimeField { p })
    }

    #[inline]
    pub fn p(&self) -> u32 {
        self.p
    }

    #[inline]
    pub fn reduce(&self, v: i64) -> u32 {
        v.rem_euclid(self.p as i64) as u32
    }

    #[inline]
    pub fn add(&self, a: u32, b: u32) -> u32 {
        let s = a as u64 + b as u64;
        (s % self.p as u64) as u32
    }

    #[inline]
    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.add(a, self.neg(b))
    }

    #[inline]
    pub fn neg(&self, a: u32) -> u32 {
        if a == 0 {
            0
        } else {
            self.p - a
        }
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        ((a as u64 * b as u64) % self.p as u64) as u32
    }

    pub fn pow(&self, mut a: u32, mut e: u64) -> u32 {
        let mut acc = 1u32;
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(acc, a);
            }
            a = self.mul(a, a);
            e >>= 1;
        }
        acc
    }

    /// Multiplicative inverse; panics on zero.
    pub fn inv(&self, a: u32) -> u32 {
        assert!(!a.is_multiple_of(self.p), "inverse of zero in F_{}", self.p);
        self.pow(a, self.p as u64 - 2)
    }

    pub fn random<R: Rng + ?Sized>(&self, rng: &mut R) -> u32 {
        rng.gen_range(0..self.p)
    }

    /// Signed representative in `(-p/2, p/2]`, for display.
    pub fn signed(&self, a: u32) -> i64 {
        if a > self.p / 2 {
            a as i64 - self.p as i64
        } else {
            a as i64
        }
    }

    /// Number of `acc += f * b` steps (with `f, b < p`) that fit in a `u64`
    /// accumulator starting from a reduced value.
    #[inline]
    fn lazy_budget(&self) -> u64 {
        let q = (self.p - 1) as u64;
        (u64::MAX - q) / (q * q).max(1)
    }

    pub fn dot(&self, a: &[u32], b: &[u32]) -> u32 {
        let budget = self.lazy_budget();
        let mut acc = 0u64;
        let mut n = 0u64;
        for (x, y) in a.iter().zip(b) {
            acc += *x as u64 * *y as u64;
            n += 1;
            if n == budget {
                acc %= self.p as u64;
                n = 0;
            }
        }
        (acc % self.p as u64) as u32
    }

    /// `y += c * x`, reduced.
    pub fn axpy(&self, c: u32, x: &[u32], y: &mut [u32]) {
        if c == 0 {
            return;
        }
        let p = self.p as u64;
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = ((*yi as u64 + c as u64 * *xi as u64) % p) as u32;
        }
    }

    pub fn scale_vec(&self, c: u32, x: &mut [u32]) {
        let p = self.p as u64;
        for xi in x.iter_mut() {
            *xi = ((*xi as u64 * c as u64) % p) as u32;
        }
    }
}

/// Dense row-major matrix over `F_p`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct FMatrix {
    field: PrimeField,
    rows: usize,
    cols: usize,
    data: Vec<u32>,
}

impl fmt::Debug for FMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "FMatrix {}x{} over F_{}", self.rows, self.cols, self.field.p)?;
        for i in 0..self.rows.min(12) {
            let row: Vec<i64> = self.row(i).iter().take(16).map(|&v| self.field.signed(v)).collect();
            writeln!(f, "  {row:?}")?;
        }
        Ok(())
    }
}

impl FMatrix {
    pub fn zeros(field: PrimeField, rows: usize, cols: usize) -> Self {
        FMatrix { field, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(field: PrimeField, n: usize) -> Self {
        let mut m = Self::zeros(field, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1;
        }
        m
    }

    /// Builds from raw (possibly unreduced, possibly negative) integer rows.
    pub fn from_rows(field: PrimeField, rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data = rows.iter().flatten().map(|&v| field.reduce(v)).collect();
        Ok(FMatrix { field, rows: r, cols: c, data })
    }

    /// Builds from already-reduced row-major data.
    pub fn from_data(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", data.len())));
        }
        if data.iter().any(|&v| v >= field.p) {
            return Err(Error::Input("matrix entry not reduced mod p".into()));
        }
        Ok(FMatrix { field, rows, cols, data })
    }

    /// Stacks equal-length vectors as rows.
    pub fn from_row_vecs(field: PrimeField, cols: usize, rows: &[Vec<u32>]) -> Self {
        let mut data = Vec::with_capacity(rows.len() * cols);
        for r in rows {
            debug_assert_eq!(r.len(), cols);
            data.extend_from_slice(r);
        }
        FMatrix { field, rows: rows.len(), cols, data }
    }

    pub fn random<R: Rng + ?Sized>(field: PrimeField, rows: usize, cols: usize, rng: &mut R) -> Self {
        let data = (0..rows * cols).map(|_| field.random(rng)).collect();
        FMatrix { field, rows, cols, data }
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
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
    pub fn data(&self) -> &[u32] {
        &self.data
    }
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.data[i * self.cols + j]
    }
    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: u32) {
        self.data[i * self.cols + j] = v;
    }
    #[inline]
    pub fn add_at(&mut self, i: usize, j: usize, v: u32) {
        let k = i * self.cols + j;
        self.data[k] = self.field.add(self.data[k], v);
    }
    #[inline]
    pub fn row(&self, i: usize) -> &[u32] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }
    #[inline]
    pub fn row_mut(&mut self, i: usize) -> &mut [u32] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<u32> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn row_vecs(&self) -> Vec<Vec<u32>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&v| v == 0)
    }

    pub fn transpose(&self) -> FMatrix {
        let mut t = FMatrix::zeros(self.field, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn mul(&self, other: &FMatrix) -> Result<FMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(self.mul_unchecked(other))
    }

    pub(crate) fn mul_unchecked(&self, other: &FMatrix) -> FMatrix {
        let f = self.field;
        let p = f.p as u64;
        let budget = f.lazy_budget();
        let mut out = FMatrix::zeros(f, self.rows, other.cols);
        let mut acc = vec![0u64; other.cols];
        for i in 0..self.rows {
            acc.iter_mut().for_each(|a| *a = 0);
            let mut n = 0u64;
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k] as u64;
                if a == 0 {
                    continue;
                }
                let brow = other.row(k);
                for (acc_j, &b) in acc.iter_mut().zip(brow) {
                    *acc_j += a * b as u64;
                }
                n += 1;
                if n == budget {
                    acc.iter_mut().for_each(|v| *v %= p);
                    n = 0;
                }
            }
            for (o, a) in out.row_mut(i).iter_mut().zip(&acc) {
                *o = (*a % p) as u32;
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[u32]) -> Vec<u32> {
        debug_assert_eq!(v.len(), self.cols);
        (0..self.rows).map(|i| self.field.dot(self.row(i), v)).collect()
    }

    /// `y += self * v`.
    pub fn mul_vec_acc(&self, v: &[u32], y: &mut [u32]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = self.field.add(*yi, self.field.dot(self.row(i), v));
        }
    }

    pub fn add(&self, other: &FMatrix) -> Result<FMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.add(a, b)).collect();
        Ok(self.with_data(data))
    }

    pub fn sub(&self, other: &FMatrix) -> Result<FMatrix> {
        self.check_same_shape(other)?;
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| self.field.sub(a, b)).collect();
        Ok(self.with_data(data))
    }

    pub fn scale(&self, c: u32) -> FMatrix {
        let data = self.data.iter().map(|&a| self.field.mul(a, c)).collect();
        self.with_data(data)
    }

    /// `self += c * other`.
    pub fn add_scaled(&mut self, c: u32, other: &FMatrix) {
        debug_assert!(self.rows == other.rows && self.cols == other.cols);
        self.field.axpy(c, &other.data, &mut self.data);
    }

    fn with_data(&self, data: Vec<u32>) -> FMatrix {
        FMatrix { field: self.field, rows: self.rows, cols: self.cols, data }
    }

    fn check_same_shape(&self, other: &FMatrix) -> Result<()> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension(format!(
                "shape {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        Ok(())
    }

    pub fn vstack(&self, other: &FMatrix) -> Result<FMatrix> {
        if self.cols != other.cols {
            return Err(Error::Dimension("vstack column mismatch".into()));
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Ok(FMatrix { field: self.field, rows: self.rows + other.rows, cols: self.cols, data })
    }

    pub fn hstack(&self, other: &FMatrix) -> Result<FMatrix> {
        if self.rows != other.rows {
            return Err(Error::Dimension("hstack row mismatch".into()));
        }
        let cols = self.cols + other.cols;
        let mut data = Vec::with_capacity(self.rows * cols);
        for i in 0..self.rows {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(FMatrix { field: self.field, rows: self.rows, cols, data })
    }

    pub fn select_columns(&self, cols: &[usize]) -> FMatrix {
        let mut out = FMatrix::zeros(self.field, self.rows, cols.len());
        for i in 0..self.rows {
            for (k, &j) in cols.iter().enumerate() {
                out.data[i * cols.len() + k] = self.get(i, j);
            }
        }
        out
    }

    /// Reduced row echelon form and rank.
    pub fn rref(&self) -> (FMatrix, usize) {
        let e = self.echelon();
        let rank = e.pivots.len();
        let mut full = FMatrix::zeros(self.field, self.rows, self.cols);
        full.data[..rank * self.cols].copy_from_slice(&e.rows.data);
        (full, rank)
    }

    pub fn rank(&self) -> usize {
        eliminate(self.field, self.rows, self.cols, self.data.clone(), false).1.len()
    }

    /// Nonzero rows of the reduced echelon form with their pivot columns.
    pub(crate) fn echelon(&self) -> Echelon {
        let (data, pivots) = eliminate(self.field, self.rows, self.cols, self.data.clone(), true);
        let rank = pivots.len();
        let rows = FMatrix { field: self.field, rows: rank, cols: self.cols, data: data[..rank * self.cols].to_vec() };
        Echelon { rows, pivots }
    }

    /// Basis of `{v : self * v = 0}` in pivoted form: the pivots are the
    /// free columns of the echelon form and the basis restricted to them is
    /// the identity.
    pub(crate) fn kernel_pivoted(&self) -> PivotBasis {
        let e = self.echelon();
        let n = self.cols;
        let f = self.field;
        let mut is_pivot = vec![false; n];
        for &c in &e.pivots {
            is_pivot[c] = true;
        }
        let free: Vec<usize> = (0..n).filter(|&c| !is_pivot[c]).collect();
        let mut basis = FMatrix::zeros(f, free.len(), n);
        for (k, &fc) in free.iter().enumerate() {
            basis.set(k, fc, 1);
            for (i, &pc) in e.pivots.iter().enumerate() {
                basis.set(k, pc, f.neg(e.rows.get(i, fc)));
            }
        }
        PivotBasis { rows: basis, pivots: free }
    }
}

/// Gauss-Jordan (or forward-only) elimination with lazy reduction.
/// Returns the reduced data and the pivot columns; the first `rank` rows hold
/// the echelon rows.
fn eliminate(field: PrimeField, rows: usize, cols: usize, data: Vec<u32>, full: bool) -> (Vec<u32>, Vec<usize>) {
    let p = field.p as u64;
    let budget = field.lazy_budget();
    let mut a: Vec<u64> = data.into_iter().map(u64::from).collect();
    let mut counts = vec![0u64; rows];
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(sel) = (r..rows).find(|&i| !a[i * cols + c].is_multiple_of(p)) else {
            continue;
        };
        if sel != r {
            for j in 0..cols {
                a.swap(sel * cols + j, r * cols + j);
            }
            counts.swap(sel, r);
        }
        let inv = field.inv((a[r * cols + c] % p) as u32) as u64;
        for j in c..cols {
            a[r * cols + j] = (a[r * cols + j] % p) * inv % p;
        }
        counts[r] = 0;
        let (start, end) = if full { (0, rows) } else { (r + 1, rows) };
        for i in start..end {
            if i == r {
                continue;
            }
            let v = a[i * cols + c] % p;
            if v == 0 {
                a[i * cols + c] = 0;
                continue;
            }
            if counts[i] >= budget {
                for j in c..cols {
                    a[i * cols + j] %= p;
                }
                counts[i] = 0;
            }
            let factor = p - v;
            let (pivot_row, target) = if i < r {
                let (lo, hi) = a.split_at_mut(r * cols);
                (&hi[c..cols], &mut lo[i * cols + c..i * cols + cols])
            } else {
                let (lo, hi) = a.split_at_mut(i * cols);
                (&lo[r * cols + c..r * cols + cols], &mut hi[c..cols])
            };
            for (t, &pv) in target.iter_mut().zip(pivot_row) {
                *t += factor * pv;
            }
            counts[i] += 1;
        }
        pivots.push(c);
        r += 1;
    }
    let out = a.into_iter().map(|v| (v % p) as u32).collect();
    (out, pivots)
}

/// Echelon rows with sorted pivot columns.
#[derive(Clone, Debug)]
pub(crate) struct Echelon {
    pub rows: FMatrix,
    pub pivots: Vec<usize>,
}

/// A basis whose restriction to the `pivots` columns is the identity.
/// Coordinates of a vector in the span are read off those columns.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PivotBasis {
    rows: FMatrix,
    pivots: Vec<usize>,
}

impl PivotBasis {
    pub fn empty(field: PrimeField, ambient: usize) -> Self {
        PivotBasis { rows: FMatrix::zeros(field, 0, ambient), pivots: Vec::new() }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        PivotBasis { rows: FMatrix::identity(field, ambient), pivots: (0..ambient).collect() }
    }

    pub(crate) fn from_echelon(e: Echelon) -> Self {
        PivotBasis { rows: e.rows, pivots: e.pivots }
    }

    /// Row-reduces arbitrary spanning vectors.
    pub fn span(field: PrimeField, ambient: usize, vectors: &[Vec<u32>]) -> Self {
        let m = FMatrix::from_row_vecs(field, ambient, vectors);
        Self::from_echelon(m.echelon())
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.rows.cols
    }
    #[inline]
    pub fn vector(&self, k: usize) -> &[u32] {
        self.rows.row(k)
    }
    #[inline]
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    #[inline]
    pub fn matrix(&self) -> &FMatrix {
        &self.rows
    }

    /// Coordinates of `v`, assumed to lie in the span (not checked).
    #[inline]
    pub fn coords_unchecked(&self, v: &[u32]) -> Vec<u32> {
        self.pivots.iter().map(|&c| v[c]).collect()
    }

    /// Coordinates of `v`, or `None` when `v` is outside the span.
    pub fn coords(&self, v: &[u32]) -> Option<Vec<u32>> {
        let c = self.coords_unchecked(v);
        let mut back = vec![0u32; self.ambient_dim()];
        self.combine_into(&c, &mut back);
        (back == v).then_some(c)
    }

    /// `sum_k c[k] * basis[k]` accumulated into `out`.
    pub fn combine_into(&self, c: &[u32], out: &mut [u32]) {
        for (k, &ck) in c.iter().enumerate() {
            self.rows.field.axpy(ck, self.rows.row(k), out);
        }
    }

    pub fn combine(&self, c: &[u32]) -> Vec<u32> {
        let mut out = vec![0u32; self.ambient_dim()];
        self.combine_into(c, &mut out);
        out
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        self.coords(v).is_some()
    }

    pub fn to_subspace(&self) -> Subspace {
        Subspace::from_vectors(self.rows.field, self.ambient_dim(), &self.rows.row_vecs())
    }
}

/// Incremental semi-echelon basis: each stored row has a pivot column at
/// which every later row vanishes. Used to test spans vector by vector with
/// early exit.
pub(crate) struct EchelonBuilder {
    field: PrimeField,
    n: usize,
    rows: Vec<Vec<u32>>,
    pivots: Vec<usize>,
    scratch: Vec<u64>,
}

impl EchelonBuilder {
    pub fn new(field: PrimeField, n: usize) -> Self {
        EchelonBuilder { field, n, rows: Vec::new(), pivots: Vec::new(), scratch: vec![0; n] }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    /// Inserts `v`; returns true when it was independent of the current rows.
    pub fn insert(&mut self, v: &[u32]) -> bool {
        debug_assert_eq!(v.len(), self.n);
        let p = self.field.p as u64;
        let budget = self.field.lazy_budget();
        for (s, &x) in self.scratch.iter_mut().zip(v) {
            *s = x as u64;
        }
        let mut count = 0u64;
        for (row, &pc) in self.rows.iter().zip(&self.pivots) {
            let c = self.scratch[pc] % p;
            if c == 0 {
                continue;
            }
            if count >= budget {
                self.scratch.iter_mut().for_each(|s| *s %= p);
                count = 0;
            }
            let factor = p - c;
            for (s, &r) in self.scratch.iter_mut().zip(row) {
                *s += factor * r as u64;
            }
            count += 1;
        }
        let reduced: Vec<u32> = self.scratch.iter().map(|&s| (s % p) as u32).collect();
        match reduced.iter().position(|&x| x != 0) {
            None => false,
            Some(pc) => {
                let inv = self.field.inv(reduced[pc]);
                let mut row = reduced;
                self.field.scale_vec(inv, &mut row);
                self.rows.push(row);
                self.pivots.push(pc);
                true
            }
        }
    }
}

/// A linear subspace of `F_p^n`, stored by its reduced echelon basis, which
/// is canonical: two subspaces are equal iff their bases are identical.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Subspace {
    basis: FMatrix,
    pivots: Vec<usize>,
}

impl Subspace {
    pub fn from_vectors(field: PrimeField, ambient: usize, vectors: &[Vec<u32>]) -> Self {
        let e = FMatrix::from_row_vecs(field, ambient, vectors).echelon();
        Subspace { basis: e.rows, pivots: e.pivots }
    }

    pub fn zero(field: PrimeField, ambient: usize) -> Self {
        Subspace { basis: FMatrix::zeros(field, 0, ambient), pivots: Vec::new() }
    }

    pub fn full(field: PrimeField, ambient: usize) -> Self {
        Subspace { basis: FMatrix::identity(field, ambient), pivots: (0..ambient).collect() }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.pivots.len()
    }
    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.basis.cols
    }
    #[inline]
    pub fn field(&self) -> PrimeField {
        self.basis.field
    }
    /// Echelon basis, one vector per row.
    pub fn basis(&self) -> &FMatrix {
        &self.basis
    }
    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }
    pub fn vectors(&self) -> Vec<Vec<u32>> {
        self.basis.row_vecs()
    }

    fn pivot_basis(&self) -> PivotBasis {
        PivotBasis { rows: self.basis.clone(), pivots: self.pivots.clone() }
    }

    pub fn contains(&self, v: &[u32]) -> bool {
        v.len() == self.ambient_dim() && self.pivot_basis().contains(v)
    }

    pub fn coords(&self, v: &[u32]) -> Option<Vec<u32>> {
        self.pivot_basis().coords(v)
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient_dim() == other.ambient_dim() && (0..self.dim()).all(|k| other.contains(self.basis.row(k)))
    }

    pub fn sum(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let mut vs = self.vectors();
        vs.extend(other.vectors());
        Ok(Subspace::from_vectors(self.field(), self.ambient_dim(), &vs))
    }

    /// Orthogonal complement under the standard dot product.
    pub fn annihilator(&self) -> Subspace {
        self.basis.kernel_pivoted().to_subspace()
    }

    pub fn intersection(&self, other: &Subspace) -> Result<Subspace> {
        self.check_ambient(other)?;
        let ann = self.annihilator().sum(&other.annihilator())?;
        Ok(ann.annihilator())
    }

    fn check_ambient(&self, other: &Subspace) -> Result<()> {
        if self.ambient_dim() != other.ambient_dim() || self.field() != other.field() {
            return Err(Error::Dimension(format!(
                "subspaces of F^{} and F^{}",
                self.ambient_dim(),
                other.ambient_dim()
            )));
        }
        Ok(())
    }
}

/// Reduced row echelon form and rank.
pub fn rref(m: &FMatrix) -> (FMatrix, usize) {
    m.rref()
}

pub fn kernel_basis(m: &FMatrix) -> Subspace {
    m.kernel_pivoted().to_subspace()
}

/// Column space of `m` as a subspace of `F^rows`.
pub fn image_basis(m: &FMatrix) -> Subspace {
    let e = m.transpose().echelon();
    Subspace { basis: e.rows, pivots: e.pivots }
}

/// Some `x` with `m x = b`, if one exists.
pub fn solve(m: &FMatrix, b: &[u32]) -> Result<Option<Vec<u32>>> {
    if b.len() != m.rows() {
        return Err(Error::Dimension(format!("rhs of length {} for {} rows", b.len(), m.rows())));
    }
    let f = m.field();
    let col = FMatrix::from_data(f, b.len(), 1, b.iter().map(|&v| v % f.p()).collect())?;
    let e = m.hstack(&col)?.echelon();
    let n = m.cols();
    if e.pivots.last() == Some(&n) {
        return Ok(None);
    }
    let mut x = vec![0u32; n];
    for (i, &pc) in e.pivots.iter().enumerate() {
        x[pc] = e.rows.get(i, n);
    }
    Ok(Some(x))
}

pub fn subspace_equal(a: &Subspace, b: &Subspace) -> Result<bool> {
    a.check_ambient(b)?;
    Ok(a == b)
}

pub fn subspace_sum(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.sum(b)
}

pub fn subspace_intersection(a: &Subspace, b: &Subspace) -> Result<Subspace> {
    a.intersection(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn f(p: u32) -> PrimeField {
        PrimeField::new(p).unwrap()
    }

    #[test]
    fn rejects_bad_moduli() {
        assert!(PrimeField::new(2).is_err());
        assert!(PrimeField::new(9).is_err());
        assert!(PrimeField::new(1).is_err());
        assert_eq!(PrimeField::new(101).unwrap().p(), 101);
    }

    #[test]
    fn rref_identity_and_zero() {
        let id = FMatrix::identity(f(7), 3);
        assert_eq!(rref(&id), (id.clone(), 3));
        let z = FMatrix::zeros(f(7), 2, 4);
        assert_eq!(rref(&z), (z.clone(), 0));
    }

    #[test]
    fn rref_by_hand_over_f5() {
        let m = FMatrix::from_rows(f(5), &[vec![2, 4], vec![1, 2]]).unwrap();
        let expect = FMatrix::from_rows(f(5), &[vec![1, 2], vec![0, 0]]).unwrap();
        assert_eq!(rref(&m), (expect, 1));
    }

    #[test]
    fn kernel_edge_cases() {
        let fld = f(101);
        assert_eq!(kernel_basis(&FMatrix::identity(fld, 4)).dim(), 0);
        let k = kernel_basis(&FMatrix::zeros(fld, 2, 3));
        assert_eq!(k, Subspace::full(fld, 3));
    }

    #[test]
    fn rank_nullity_on_random_matrices() {
        let fld = f(101);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..100 {
            let m = FMatrix::random(fld, 6, 9, &mut rng);
            let k = kernel_basis(&m);
            assert_eq!(k.dim() + m.rank(), 9);
            for v in k.vectors() {
                assert!(m.mul_vec(&v).iter().all(|&x| x == 0));
            }
        }
    }

    #[test]
    fn image_and_solve_basics() {
        let fld = f(13);
        assert_eq!(image_basis(&FMatrix::identity(fld, 3)), Subspace::full(fld, 3));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let m = FMatrix::random(fld, 4, 5, &mut rng);
        let x = solve(&m, &[0, 0, 0, 0]).unwrap().unwrap();
        assert!(m.mul_vec(&x).iter().all(|&v| v == 0));
        let target = m.mul_vec(&[1, 2, 3, 4, 5]);
        let y = solve(&m, &target).unwrap().unwrap();
        assert_eq!(m.mul_vec(&y), target);
        assert!(matches!(solve(&m, &[1, 2]), Err(Error::Dimension(_))));
    }

    #[test]
    fn solve_reports_inconsistency() {
        let fld = f(7);
        let m = FMatrix::from_rows(fld, &[vec![1, 1], vec![2, 2]]).unwrap();
        assert_eq!(solve(&m, &[1, 0]).unwrap(), None);
    }

    /// All vectors of `F_3^n`.
    fn all_vectors(n: usize) -> Vec<Vec<u32>> {
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|v: Vec<u32>| {
                    (0..3).map(move |x| {
                        let mut w = v.clone();
                        w.push(x);
                        w
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn intersection_matches_enumeration_over_f3() {
        let fld = f(3);
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=4 {
            for _ in 0..10 {
                let m = FMatrix::random(fld, n, n, &mut rng);
                let ker = kernel_basis(&m);
                let im_t = image_basis(&m.transpose());
                let inter = ker.intersection(&im_t).unwrap();
                // count vectors lying in both by brute force
                let count = all_vectors(n)
                    .into_iter()
                    .filter(|v| m.mul_vec(v).iter().all(|&x| x == 0) && im_t.contains(v))
                    .count();
                assert_eq!(3usize.pow(inter.dim() as u32), count);
            }
        }
    }

    #[test]
    fn subspace_equality_is_canonical() {
        let fld = f(11);
        let a = Subspace::from_vectors(fld, 3, &[vec![1, 2, 3], vec![0, 1, 1]]);
        let b = Subspace::from_vectors(fld, 3, &[vec![1, 3, 4], vec![2, 4, 6], vec![0, 5, 5]]);
        assert!(subspace_equal(&a, &b).unwrap());
        let c = Subspace::from_vectors(fld, 4, &[vec![1, 0, 0, 0]]);
        assert!(subspace_equal(&a, &c).is_err());
    }

    #[test]
    fn echelon_builder_tracks_rank() {
        let fld = f(101);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let m = FMatrix::random(fld, 5, 8, &mut rng);
        let m = m.vstack(&m.scale(3)).unwrap();
        let mut b = EchelonBuilder::new(fld, 8);
        for i in 0..m.rows() {
            b.insert(m.row(i));
        }
        assert_eq!(b.rank(), m.rank());
    }

    #[test]
    fn lazy_reduction_with_large_prime() {
        // forces frequent intermediate reductions
        let fld = f(2_147_483_629);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = FMatrix::random(fld, 12, 12, &mut rng);
        let (r, rank) = m.rref();
        assert_eq!(rank, 12);
        assert_eq!(r, FMatrix::identity(fld, 12));
        let prod = m.mul(&FMatrix::identity(fld, 12)).unwrap();
        assert_eq!(prod, m);
    }

    proptest! {
        #[test]
        fn rref_is_idempotent(seed in any::<u64>(), rows in 1usize..7, cols in 1usize..7) {
            let fld = f(101);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = FMatrix::random(fld, rows, cols, &mut rng);
            // inject dependencies
            if rows > 1 {
                let r0 = m.row(0).to_vec();
                m.row_mut(rows - 1).copy_from_slice(&r0);
            }
            let (once, rank) = m.rref();
            let (twice, rank2) = once.rref();
            prop_assert_eq!(&once, &twice);
            prop_assert_eq!(rank, rank2);
            prop_assert_eq!(kernel_basis(&m).dim() + rank, cols);
        }

        #[test]
        fn subspace_sum_and_intersection_dims(seed in any::<u64>()) {
            let fld = f(7);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let a = Subspace::from_vectors(fld, 5, &FMatrix::random(fld, 2, 5, &mut rng).row_vecs());
            let b = Subspace::from_vectors(fld, 5, &FMatrix::random(fld, 3, 5, &mut rng).row_vecs());
            let s = a.sum(&b).unwrap();
            let i = a.intersection(&b).unwrap();
            prop_assert_eq!(s.dim() + i.dim(), a.dim() + b.dim());
            prop_assert!(i.is_subspace_of(&a) && i.is_subspace_of(&b));
        }
    }
}
