//! Graded modules over a [`GradedAlgebra`], presentations, module maps and
//! minimal graded free resolutions.
//!
//! A module is stored by per-degree dimensions and the matrices by which the
//! basis of `R1` (and of `R2`) acts. Free modules used inside resolutions are
//! never densified: their action is computed from the structure constants,
//! and syzygies are kept as subspaces of the free module in each degree.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, GradedAlgebra};
use crate::error::{Error, Result};
use crate::exactla::{EchelonBuilder, FMatrix, PivotBasis, PrimeField};

/// Default resolution depth.
pub const DEFAULT_DEPTH: usize = 8;

/// Shape data identifying the ring a module lives over.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RingTag {
    pub p: u32,
    pub dim1: usize,
    pub dim2: usize,
    pub hash: String,
}

impl RingTag {
    pub fn of(ring: &GradedAlgebra) -> Self {
        RingTag { p: ring.field().p(), dim1: ring.dim1(), dim2: ring.dim2(), hash: ring.content_hash() }
    }
}

/// Finitely generated graded module, `M = sum_d M_d`.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ModuleJson", into = "ModuleJson")]
pub struct GradedModule {
    field: PrimeField,
    ring: RingTag,
    base: i32,
    dims: Vec<usize>,
    /// `act1[k][a]`: `M_{base+k} -> M_{base+k+1}` for the basis vector `v_a` of `R1`.
    act1: Vec<Vec<FMatrix>>,
    /// `act2[k][b]`: `M_{base+k} -> M_{base+k+2}` for the basis vector `w_b` of `R2`.
    act2: Vec<Vec<FMatrix>>,
}

impl fmt::Debug for GradedModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GradedModule(base={}, dims={:?})", self.base, self.dims)
    }
}

impl GradedModule {
    /// Assembles a module from action matrices; shapes are checked, ring
    /// compatibility is checked by [`GradedModule::validate`].
    pub fn from_parts(
        ring: &GradedAlgebra,
        base: i32,
        dims: Vec<usize>,
        act1: Vec<Vec<FMatrix>>,
        act2: Vec<Vec<FMatrix>>,
    ) -> Result<Self> {
        let m = GradedModule { field: ring.field(), ring: RingTag::of(ring), base, dims, act1, act2 };
        m.check_shapes()?;
        Ok(m.trimmed())
    }

    pub fn zero(ring: &GradedAlgebra) -> Self {
        GradedModule {
            field: ring.field(),
            ring: RingTag::of(ring),
            base: 0,
            dims: Vec::new(),
            act1: Vec::new(),
            act2: Vec::new(),
        }
    }

    fn check_shapes(&self) -> Result<()> {
        let n = self.dims.len();
        if self.act1.len() != n || self.act2.len() != n {
            return Err(Error::Schema("one list of action matrices per degree expected".into()));
        }
        for k in 0..n {
            if self.act1[k].len() != self.ring.dim1 || self.act2[k].len() != self.ring.dim2 {
                return Err(Error::Schema(format!("degree slot {k}: wrong number of action matrices")));
            }
            let t1 = self.dims.get(k + 1).copied().unwrap_or(0);
            let t2 = self.dims.get(k + 2).copied().unwrap_or(0);
            for m in &self.act1[k] {
                if m.rows() != t1 || m.cols() != self.dims[k] || m.field() != self.field {
                    return Err(Error::Schema(format!("degree slot {k}: act1 matrix has wrong shape")));
                }
            }
            for m in &self.act2[k] {
                if m.rows() != t2 || m.cols() != self.dims[k] || m.field() != self.field {
                    return Err(Error::Schema(format!("degree slot {k}: act2 matrix has wrong shape")));
                }
            }
        }
        Ok(())
    }

    /// Drops zero pieces at both ends, adjusting the base degree.
    fn trimmed(mut self) -> Self {
        let lead = self.dims.iter().take_while(|&&d| d == 0).count();
        if lead == self.dims.len() {
            self.dims.clear();
            self.act1.clear();
            self.act2.clear();
            self.base = 0;
            return self;
        }
        let trail = self.dims.iter().rev().take_while(|&&d| d == 0).count();
        let keep = self.dims.len() - lead - trail;
        self.dims = self.dims[lead..lead + keep].to_vec();
        self.act1 = self.act1.drain(lead..lead + keep).collect();
        self.act2 = self.act2.drain(lead..lead + keep).collect();
        self.base += lead as i32;
        // targets beyond the new top are empty already; re-shape for exactness
        for k in 0..keep {
            let t1 = self.dims.get(k + 1).copied().unwrap_or(0);
            let t2 = self.dims.get(k + 2).copied().unwrap_or(0);
            for m in &mut self.act1[k] {
                if m.rows() != t1 {
                    *m = FMatrix::zeros(self.field, t1, self.dims[k]);
                }
            }
            for m in &mut self.act2[k] {
                if m.rows() != t2 {
                    *m = FMatrix::zeros(self.field, t2, self.dims[k]);
                }
            }
        }
        self
    }

    /// Checks the action against the ring: shapes, `act2(v_i v_j) =
    /// act1(v_j) act1(v_i)`, symmetry of that composite, and vanishing of
    /// triple products.
    pub fn validate(&self, ring: &GradedAlgebra) -> Result<()> {
        if self.ring != RingTag::of(ring) {
            return Err(Error::Input("module lives over a different ring".into()));
        }
        self.check_shapes()?;
        let f = self.field;
        for k in 0..self.dims.len() {
            if k + 1 >= self.dims.len() {
                continue;
            }
            for i in 0..ring.dim1() {
                for j in 0..ring.dim1() {
                    let comp = self.act1[k + 1][j].mul_unchecked(&self.act1[k][i]);
                    let mut via2 = FMatrix::zeros(f, comp.rows(), comp.cols());
                    for (b, &c) in ring.product(i, j).iter().enumerate() {
                        via2.add_scaled(c, &self.act2[k][b]);
                    }
                    if comp != via2 {
                        return Err(Error::Input(format!(
                            "action incompatible with multiplication at degree {} for ({i}, {j})",
                            self.base + k as i32
                        )));
                    }
                }
            }
            if k + 2 < self.dims.len() {
                for a in 0..ring.dim1() {
                    for b in 0..ring.dim2() {
                        let t = self.act1[k + 2][a].mul_unchecked(&self.act2[k][b]);
                        if !t.is_zero() {
                            return Err(Error::Input("triple products must act as zero".into()));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    #[inline]
    pub fn field(&self) -> PrimeField {
        self.field
    }
    pub fn ring_tag(&self) -> &RingTag {
        &self.ring
    }
    /// Lowest degree with a nonzero piece (0 for the zero module).
    #[inline]
    pub fn base_degree(&self) -> i32 {
        self.base
    }
    /// Dimensions from the base degree up.
    pub fn dims(&self) -> &[usize] {
        &self.dims
    }
    pub fn top_degree(&self) -> i32 {
        self.base + self.dims.len() as i32 - 1
    }
    pub fn is_zero(&self) -> bool {
        self.dims.is_empty()
    }

    #[inline]
    pub fn dim(&self, d: i32) -> usize {
        let k = d - self.base;
        if k < 0 {
            0
        } else {
            self.dims.get(k as usize).copied().unwrap_or(0)
        }
    }

    /// Dimensions as `(degree, dim)` pairs.
    pub fn hilbert(&self) -> Vec<(i32, usize)> {
        self.dims.iter().enumerate().map(|(k, &d)| (self.base + k as i32, d)).collect()
    }

    /// Length as an `R`-module, the total dimension.
    pub fn length(&self) -> usize {
        self.dims.iter().sum()
    }

    /// `act1(v_a)` from degree `d`, if the piece exists.
    pub fn act1(&self, d: i32, a: usize) -> Option<&FMatrix> {
        let k = d - self.base;
        (k >= 0 && (k as usize) < self.dims.len()).then(|| &self.act1[k as usize][a])
    }

    pub fn act2(&self, d: i32, b: usize) -> Option<&FMatrix> {
        let k = d - self.base;
        (k >= 0 && (k as usize) < self.dims.len()).then(|| &self.act2[k as usize][b])
    }

    /// Matrix of multiplication by a homogeneous element, `M_d -> M_{d+deg}`.
    pub fn act_element(&self, e: &Element, d: i32) -> FMatrix {
        let f = self.field;
        let src = self.dim(d);
        let tgt = self.dim(d + e.degree() as i32);
        let mut m = FMatrix::zeros(f, tgt, src);
        if src == 0 || tgt == 0 {
            return m;
        }
        match e.degree() {
            0 => return FMatrix::identity(f, src).scale(e.coords()[0]),
            1 => {
                for (a, &c) in e.coords().iter().enumerate() {
                    if c != 0 {
                        m.add_scaled(c, self.act1(d, a).expect("piece exists"));
                    }
                }
            }
            2 => {
                for (b, &c) in e.coords().iter().enumerate() {
                    if c != 0 {
                        m.add_scaled(c, self.act2(d, b).expect("piece exists"));
                    }
                }
            }
            _ => {}
        }
        m
    }

    /// Same module with every degree moved by `shift`.
    pub fn shifted(&self, shift: i32) -> Self {
        let mut m = self.clone();
        if !m.is_zero() {
            m.base += shift;
        }
        m
    }

    /// Copy with the lowest nonzero degree placed at 0.
    pub fn normalized(&self) -> Self {
        self.shifted(-self.base)
    }

    pub fn direct_sum(&self, other: &GradedModule) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::Input("direct sum of modules over different rings".into()));
        }
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let lo = self.base.min(other.base);
        let hi = self.top_degree().max(other.top_degree());
        let f = self.field;
        let dims: Vec<usize> = (lo..=hi).map(|d| self.dim(d) + other.dim(d)).collect();
        let block = |a: Option<&FMatrix>, b: Option<&FMatrix>, rows: (usize, usize), cols: (usize, usize)| {
            let mut m = FMatrix::zeros(f, rows.0 + rows.1, cols.0 + cols.1);
            if let Some(a) = a {
                for i in 0..a.rows() {
                    for j in 0..a.cols() {
                        m.set(i, j, a.get(i, j));
                    }
                }
            }
            if let Some(b) = b {
                for i in 0..b.rows() {
                    for j in 0..b.cols() {
                        m.set(rows.0 + i, cols.0 + j, b.get(i, j));
                    }
                }
            }
            m
        };
        let mut act1 = Vec::new();
        let mut act2 = Vec::new();
        for d in lo..=hi {
            let cols = (self.dim(d), other.dim(d));
            let r1 = (self.dim(d + 1), other.dim(d + 1));
            let r2 = (self.dim(d + 2), other.dim(d + 2));
            act1.push((0..self.ring.dim1).map(|a| block(self.act1(d, a), other.act1(d, a), r1, cols)).collect());
            act2.push((0..self.ring.dim2).map(|b| block(self.act2(d, b), other.act2(d, b), r2, cols)).collect());
        }
        let m = GradedModule { field: f, ring: self.ring.clone(), base: lo, dims, act1, act2 };
        Ok(m.trimmed())
    }
}

#[derive(Serialize, Deserialize)]
struct ModuleJson {
    schema: u32,
    ring: String,
    p: u32,
    dim1: usize,
    dim2: usize,
    base: i32,
    dims: Vec<usize>,
    act1: Vec<Vec<Vec<Vec<i64>>>>,
    act2: Vec<Vec<Vec<Vec<i64>>>>,
}

fn matrix_rows(m: &FMatrix) -> Vec<Vec<i64>> {
    (0..m.rows()).map(|i| m.row(i).iter().map(|&v| v as i64).collect()).collect()
}

fn matrix_from_json(field: PrimeField, rows: usize, cols: usize, data: &[Vec<i64>]) -> Result<FMatrix> {
    if data.len() != rows || data.iter().any(|r| r.len() != cols) {
        return Err(Error::Schema(format!("expected a {rows}x{cols} action matrix")));
    }
    if rows == 0 {
        return Ok(FMatrix::zeros(field, 0, cols));
    }
    FMatrix::from_rows(field, data)
}

impl From<GradedModule> for ModuleJson {
    fn from(m: GradedModule) -> Self {
        ModuleJson {
            schema: 1,
            ring: m.ring.hash.clone(),
            p: m.field.p(),
            dim1: m.ring.dim1,
            dim2: m.ring.dim2,
            base: m.base,
            dims: m.dims.clone(),
            act1: m.act1.iter().map(|per| per.iter().map(matrix_rows).collect()).collect(),
            act2: m.act2.iter().map(|per| per.iter().map(matrix_rows).collect()).collect(),
        }
    }
}

impl TryFrom<ModuleJson> for GradedModule {
    type Error = Error;

    fn try_from(j: ModuleJson) -> Result<Self> {
        if j.schema != 1 {
            return Err(Error::Schema(format!("unsupported module schema {}", j.schema)));
        }
        let field = PrimeField::new(j.p)?;
        let n = j.dims.len();
        if j.act1.len() != n || j.act2.len() != n {
            return Err(Error::Schema("one list of action matrices per degree expected".into()));
        }
        let mut act1 = Vec::with_capacity(n);
        let mut act2 = Vec::with_capacity(n);
        for k in 0..n {
            let t1 = j.dims.get(k + 1).copied().unwrap_or(0);
            let t2 = j.dims.get(k + 2).copied().unwrap_or(0);
            if j.act1[k].len() != j.dim1 || j.act2[k].len() != j.dim2 {
                return Err(Error::Schema(format!("degree slot {k}: wrong number of action matrices")));
            }
            act1.push(j.act1[k].iter().map(|m| matrix_from_json(field, t1, j.dims[k], m)).collect::<Result<Vec<_>>>()?);
            act2.push(j.act2[k].iter().map(|m| matrix_from_json(field, t2, j.dims[k], m)).collect::<Result<Vec<_>>>()?);
        }
        let m = GradedModule {
            field,
            ring: RingTag { p: j.p, dim1: j.dim1, dim2: j.dim2, hash: j.ring },
            base: j.base,
            dims: j.dims,
            act1,
            act2,
        };
        m.check_shapes()?;
        Ok(m.trimmed())
    }
}

/// Something the ring acts on degree by degree: dense modules and free modules.
pub(crate) trait Ambient {
    fn field(&self) -> PrimeField;
    fn dim(&self, d: i32) -> usize;
    /// `v_a * v` for `v` in degree `d`.
    fn act1(&self, a: usize, d: i32, v: &[u32]) -> Vec<u32>;
    /// `w_b * v` for `v` in degree `d`.
    fn act2(&self, b: usize, d: i32, v: &[u32]) -> Vec<u32>;
}

impl Ambient for GradedModule {
    fn field(&self) -> PrimeField {
        self.field
    }
    fn dim(&self, d: i32) -> usize {
        GradedModule::dim(self, d)
    }
    fn act1(&self, a: usize, d: i32, v: &[u32]) -> Vec<u32> {
        match GradedModule::act1(self, d, a) {
            Some(m) => m.mul_vec(v),
            None => vec![0; self.dim(d + 1)],
        }
    }
    fn act2(&self, b: usize, d: i32, v: &[u32]) -> Vec<u32> {
        match GradedModule::act2(self, d, b) {
            Some(m) => m.mul_vec(v),
            None => vec![0; self.dim(d + 2)],
        }
    }
}

/// Graded free module `sum_t R(-s_t)`, acted on through the structure
/// constants. Degree-`e` coordinates list, generator by generator, the
/// coefficients in the basis of `R_{e - s_t}`.
#[derive(Clone, Debug)]
pub struct FreeModule {
    ring: GradedAlgebra,
    shifts: Vec<i32>,
    offsets: BTreeMap<i32, Vec<usize>>,
}

impl FreeModule {
    pub fn new(ring: &GradedAlgebra, shifts: Vec<i32>) -> Self {
        let mut offsets = BTreeMap::new();
        if let (Some(&lo), Some(&hi)) = (shifts.iter().min(), shifts.iter().max()) {
            for e in lo..=hi + 2 {
                let mut off = Vec::with_capacity(shifts.len() + 1);
                let mut acc = 0;
                off.push(0);
                for &s in &shifts {
                    acc += ring.piece_dim(e - s);
                    off.push(acc);
                }
                offsets.insert(e, off);
            }
        }
        FreeModule { ring: ring.clone(), shifts, offsets }
    }

    pub fn shifts(&self) -> &[i32] {
        &self.shifts
    }
    pub fn rank(&self) -> usize {
        self.shifts.len()
    }
    pub fn ring(&self) -> &GradedAlgebra {
        &self.ring
    }

    /// Start of generator `t`'s block in degree `e`.
    #[inline]
    pub fn offset(&self, e: i32, t: usize) -> usize {
        self.offsets.get(&e).map_or(0, |o| o[t])
    }

    pub fn degree_range(&self) -> Option<(i32, i32)> {
        Some((*self.shifts.iter().min()?, *self.shifts.iter().max()? + 2))
    }

    /// The degree-`d` element `rho` times generator `t`, as a vector in
    /// degree `s_t + d`.
    pub fn basis_times(&self, t: usize, rho: &Element) -> Vec<u32> {
        let e = self.shifts[t] + rho.degree() as i32;
        let mut v = vec![0u32; Ambient::dim(self, e)];
        let off = self.offset(e, t);
        v[off..off + rho.coords().len()].copy_from_slice(rho.coords());
        v
    }

    /// Entries of the vector `v` in degree `e`, split by generator.
    pub fn split(&self, e: i32, v: &[u32]) -> Vec<Option<Element>> {
        (0..self.shifts.len())
            .map(|t| {
                let j = e - self.shifts[t];
                if !(0..=2).contains(&j) {
                    return None;
                }
                let off = self.offset(e, t);
                Some(Element::new(j as u8, v[off..off + self.ring.piece_dim(j)].to_vec()).expect("homogeneous"))
            })
            .collect()
    }

    /// Dense copy of this free module.
    pub fn to_module(&self) -> GradedModule {
        let Some((lo, hi)) = self.degree_range() else {
            return GradedModule::zero(&self.ring);
        };
        let f = self.ring.field();
        let dims: Vec<usize> = (lo..=hi).map(|e| Ambient::dim(self, e)).collect();
        let mut act1 = Vec::new();
        let mut act2 = Vec::new();
        for e in lo..=hi {
            let src = Ambient::dim(self, e);
            let mut per1 = Vec::new();
            for a in 0..self.ring.dim1() {
                let tgt = Ambient::dim(self, e + 1);
                let mut m = FMatrix::zeros(f, tgt, src);
                for j in 0..src {
                    let mut unit = vec![0u32; src];
                    unit[j] = 1;
                    for (i, c) in Ambient::act1(self, a, e, &unit).into_iter().enumerate() {
                        m.set(i, j, c);
                    }
                }
                per1.push(m);
            }
            let mut per2 = Vec::new();
            for b in 0..self.ring.dim2() {
                let tgt = Ambient::dim(self, e + 2);
                let mut m = FMatrix::zeros(f, tgt, src);
                for j in 0..src {
                    let mut unit = vec![0u32; src];
                    unit[j] = 1;
                    for (i, c) in Ambient::act2(self, b, e, &unit).into_iter().enumerate() {
                        m.set(i, j, c);
                    }
                }
                per2.push(m);
            }
            act1.push(per1);
            act2.push(per2);
        }
        GradedModule::from_parts(&self.ring, lo, dims, act1, act2).expect("free module shapes")
    }
}

impl Ambient for FreeModule {
    fn field(&self) -> PrimeField {
        self.ring.field()
    }
    fn dim(&self, d: i32) -> usize {
        self.offsets.get(&d).map_or(0, |o| *o.last().unwrap())
    }
    fn act1(&self, a: usize, e: i32, v: &[u32]) -> Vec<u32> {
        let f = self.ring.field();
        let mut out = vec![0u32; Ambient::dim(self, e + 1)];
        for (t, &s) in self.shifts.iter().enumerate() {
            let off = self.offset(e, t);
            let out_off = self.offset(e + 1, t);
            match e - s {
                0 => {
                    let c = v[off];
                    if c != 0 {
                        out[out_off + a] = f.add(out[out_off + a], c);
                    }
                }
                1 => {
                    let n2 = self.ring.dim2();
                    for cidx in 0..self.ring.dim1() {
                        let c = v[off + cidx];
                        if c == 0 {
                            continue;
                        }
                        f.axpy(c, self.ring.product(a, cidx), &mut out[out_off..out_off + n2]);
                    }
                }
                _ => {}
            }
        }
        out
    }
    fn act2(&self, b: usize, e: i32, v: &[u32]) -> Vec<u32> {
        let f = self.ring.field();
        let mut out = vec![0u32; Ambient::dim(self, e + 2)];
        for (t, &s) in self.shifts.iter().enumerate() {
            if e - s == 0 {
                let c = v[self.offset(e, t)];
                let o = self.offset(e + 2, t) + b;
                out[o] = f.add(out[o], c);
            }
        }
        out
    }
}

/// Vector times a homogeneous element in any ambient.
pub(crate) fn act_by<A: Ambient>(amb: &A, e: &Element, d: i32, v: &[u32]) -> Vec<u32> {
    let f = amb.field();
    let mut out = vec![0u32; amb.dim(d + e.degree() as i32)];
    match e.degree() {
        0 => {
            out.copy_from_slice(v);
            f.scale_vec(e.coords()[0], &mut out);
        }
        1 => {
            for (a, &c) in e.coords().iter().enumerate() {
                if c != 0 {
                    f.axpy(c, &amb.act1(a, d, v), &mut out);
                }
            }
        }
        2 => {
            for (b, &c) in e.coords().iter().enumerate() {
                if c != 0 {
                    f.axpy(c, &amb.act2(b, d, v), &mut out);
                }
            }
        }
        _ => {}
    }
    out
}

/// Basis of `R_j` as homogeneous elements.
pub(crate) fn ring_basis(ring: &GradedAlgebra, j: i32) -> Vec<Element> {
    let n = ring.piece_dim(j);
    (0..n)
        .map(|i| {
            let mut c = vec![0u32; n];
            c[i] = 1;
            Element::new(j as u8, c).expect("degree in range")
        })
        .collect()
}

/// Degree-preserving or degree-shifting graded homomorphism, stored as one
/// matrix per source degree (`M_d -> N_{d+degree}`).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleMap {
    degree: i32,
    #[serde(with = "crate::serde_pairs::flat")]
    blocks: BTreeMap<i32, FMatrix>,
}

impl ModuleMap {
    pub fn new(degree: i32, blocks: BTreeMap<i32, FMatrix>) -> Self {
        ModuleMap { degree, blocks }
    }

    pub fn zero(source: &GradedModule, target: &GradedModule, degree: i32) -> Self {
        let blocks = source
            .hilbert()
            .into_iter()
            .map(|(d, n)| (d, FMatrix::zeros(source.field(), target.dim(d + degree), n)))
            .collect();
        ModuleMap { degree, blocks }
    }

    pub fn identity(m: &GradedModule) -> Self {
        let blocks = m.hilbert().into_iter().map(|(d, n)| (d, FMatrix::identity(m.field(), n))).collect();
        ModuleMap { degree: 0, blocks }
    }

    pub fn degree(&self) -> i32 {
        self.degree
    }
    pub fn blocks(&self) -> &BTreeMap<i32, FMatrix> {
        &self.blocks
    }

    /// Block from source degree `d`, or a zero block of the right shape.
    pub fn block(&self, source: &GradedModule, target: &GradedModule, d: i32) -> FMatrix {
        match self.blocks.get(&d) {
            Some(b) => b.clone(),
            None => FMatrix::zeros(source.field(), target.dim(d + self.degree), source.dim(d)),
        }
    }

    pub fn apply(&self, d: i32, v: &[u32]) -> Option<Vec<u32>> {
        self.blocks.get(&d).map(|b| b.mul_vec(v))
    }

    /// Shapes match the modules in every degree.
    pub fn fits(&self, source: &GradedModule, target: &GradedModule) -> bool {
        self.blocks.iter().all(|(&d, b)| b.cols() == source.dim(d) && b.rows() == target.dim(d + self.degree))
            && source
                .hilbert()
                .iter()
                .all(|&(d, n)| n == 0 || target.dim(d + self.degree) == 0 || self.blocks.contains_key(&d))
    }

    /// Commutes with the action of `R1` and `R2`.
    pub fn is_homomorphism(&self, source: &GradedModule, target: &GradedModule, ring: &GradedAlgebra) -> bool {
        if !self.fits(source, target) {
            return false;
        }
        for (d, _) in source.hilbert() {
            let here = self.block(source, target, d);
            for (j, gens) in [(1, ring.dim1()), (2, ring.dim2())] {
                let next = self.block(source, target, d + j);
                for g in 0..gens {
                    let (ms, mt) = if j == 1 {
                        (source.act1(d, g), target.act1(d + self.degree, g))
                    } else {
                        (source.act2(d, g), target.act2(d + self.degree, g))
                    };
                    let Some(ms) = ms else { continue };
                    let lhs = next.mul_unchecked(ms);
                    let rhs = match mt {
                        Some(mt) => mt.mul_unchecked(&here),
                        None => FMatrix::zeros(source.field(), lhs.rows(), lhs.cols()),
                    };
                    if lhs != rhs {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// `other` after `self`.
    pub fn then(&self, other: &ModuleMap, middle: &GradedModule) -> ModuleMap {
        let mut blocks = BTreeMap::new();
        for (&d, b) in &self.blocks {
            let mid = d + self.degree;
            if middle.dim(mid) == 0 {
                continue;
            }
            if let Some(o) = other.blocks.get(&mid) {
                blocks.insert(d, o.mul_unchecked(b));
            }
        }
        ModuleMap { degree: self.degree + other.degree, blocks }
    }

    pub fn is_injective(&self, source: &GradedModule) -> bool {
        source.hilbert().iter().all(|&(d, n)| n == 0 || self.blocks.get(&d).is_some_and(|b| b.rank() == n))
    }

    pub fn is_surjective(&self, target: &GradedModule) -> bool {
        target
            .hilbert()
            .iter()
            .all(|&(e, n)| n == 0 || self.blocks.get(&(e - self.degree)).is_some_and(|b| b.rank() == n))
    }

    /// Defines a map by the images of generators; fails when the assignment
    /// does not respect the relations of `source`.
    pub fn from_generator_images(
        ring: &GradedAlgebra,
        source: &GradedModule,
        generators: &[(i32, Vec<u32>)],
        target: &GradedModule,
        images: &[Vec<u32>],
        degree: i32,
    ) -> Result<ModuleMap> {
        if generators.len() != images.len() {
            return Err(Error::Dimension("one image per generator expected".into()));
        }
        let f = source.field();
        let mut blocks = BTreeMap::new();
        for (d, n) in source.hilbert() {
            if n == 0 {
                continue;
            }
            let mut src_cols = Vec::new();
            let mut tgt_cols = Vec::new();
            for ((gd, g), img) in generators.iter().zip(images) {
                let j = d - gd;
                if !(0..=2).contains(&j) {
                    continue;
                }
                for rho in ring_basis(ring, j) {
                    src_cols.push(act_by(source, &rho, *gd, g));
                    tgt_cols.push(act_by(target, &rho, *gd + degree, img));
                }
            }
            let c = FMatrix::from_row_vecs(f, n, &src_cols).transpose();
            let dmat = FMatrix::from_row_vecs(f, target.dim(d + degree), &tgt_cols).transpose();
            if c.rank() != n {
                return Err(Error::Input(format!("generators do not span degree {d}")));
            }
            // columns of c at the pivot positions of its echelon form form a basis of M_d
            let basis_cols = independent_columns(&c);
            let csub = c.select_columns(&basis_cols);
            let dsub = dmat.select_columns(&basis_cols);
            let inv = invert(&csub)?;
            let block = dsub.mul_unchecked(&inv);
            if block.mul_unchecked(&c) != dmat {
                return Err(Error::Input(format!("generator images violate a relation in degree {d}")));
            }
            blocks.insert(d, block);
        }
        Ok(ModuleMap { degree, blocks })
    }
}

/// Indices of a maximal set of independent columns, greedily from the left.
pub(crate) fn independent_columns(m: &FMatrix) -> Vec<usize> {
    let mut b = EchelonBuilder::new(m.field(), m.rows());
    let mut out = Vec::new();
    for j in 0..m.cols() {
        if b.insert(&m.column(j)) {
            out.push(j);
        }
    }
    out
}

/// Inverse of a square matrix.
pub(crate) fn invert(m: &FMatrix) -> Result<FMatrix> {
    let n = m.rows();
    if m.cols() != n {
        return Err(Error::Dimension("inverse of a non-square matrix".into()));
    }
    let aug = m.hstack(&FMatrix::identity(m.field(), n))?;
    let (r, rank) = aug.rref();
    if rank < n || (0..n).any(|i| r.get(i, i) != 1) {
        return Err(Error::Input("matrix is singular".into()));
    }
    let cols: Vec<usize> = (n..2 * n).collect();
    let full = r.select_columns(&cols);
    Ok(FMatrix::from_row_vecs(m.field(), n, &full.row_vecs()[..n]))
}

/// Matrix with homogeneous ring entries.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ElementMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Element>,
}

impl ElementMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<Element>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!("{} entries for a {rows}x{cols} matrix", entries.len())));
        }
        Ok(ElementMatrix { rows, cols, entries })
    }

    /// Square matrix with every entry zero in degree `deg`.
    pub fn zeros(ring: &GradedAlgebra, rows: usize, cols: usize, deg: u8) -> Self {
        let e = Element::zero(deg, ring.piece_dim(deg as i32));
        ElementMatrix { rows, cols, entries: vec![e; rows * cols] }
    }

    /// Matrix whose entries are all of degree one.
    pub fn linear(rows: usize, cols: usize, entries: Vec<Vec<u32>>) -> Result<Self> {
        Self::new(rows, cols, entries.into_iter().map(Element::linear).collect())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn get(&self, i: usize, j: usize) -> &Element {
        &self.entries[i * self.cols + j]
    }
    pub fn set(&mut self, i: usize, j: usize, e: Element) {
        self.entries[i * self.cols + j] = e;
    }
    pub fn entries(&self) -> &[Element] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        let mut entries = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                entries.push(self.get(i, j).clone());
            }
        }
        ElementMatrix { rows: self.cols, cols: self.rows, entries }
    }

    /// Every entry has degree `d` (zero entries count for any degree).
    pub fn is_homogeneous_of_degree(&self, ring: &GradedAlgebra, d: u8) -> bool {
        self.entries.iter().all(|e| {
            (e.degree() == d && e.coords().len() == ring.piece_dim(d as i32)) || (e.is_zero() && e.degree() <= 2)
        })
    }

    /// Product over `R`; entries must be homogeneous of one degree each.
    pub fn mul(&self, other: &ElementMatrix, ring: &GradedAlgebra) -> Result<ElementMatrix> {
        if self.cols != other.rows {
            return Err(Error::Dimension("element matrix product shape mismatch".into()));
        }
        let f = ring.field();
        let mut entries = Vec::with_capacity(self.rows * other.cols);
        for i in 0..self.rows {
            for j in 0..other.cols {
                let mut acc: Option<Element> = None;
                for k in 0..self.cols {
                    let (a, b) = (self.get(i, k), other.get(k, j));
                    if a.is_zero() || b.is_zero() {
                        continue;
                    }
                    let p = ring.mul(a, b)?;
                    acc = Some(match acc {
                        None => p,
                        Some(s) if s.degree() == p.degree() => s.add(&p, f)?,
                        Some(_) => return Err(Error::Input("inhomogeneous matrix product".into())),
                    });
                }
                entries.push(acc.unwrap_or_else(|| Element::zero(0, 1)));
            }
        }
        Ok(ElementMatrix { rows: self.rows, cols: other.cols, entries })
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Element::is_zero)
    }

    pub fn add(&self, other: &ElementMatrix, ring: &GradedAlgebra) -> Result<ElementMatrix> {
        if self.rows != other.rows || self.cols != other.cols {
            return Err(Error::Dimension("element matrix sum shape mismatch".into()));
        }
        let f = ring.field();
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| {
                if a.is_zero() {
                    Ok(b.clone())
                } else if b.is_zero() {
                    Ok(a.clone())
                } else {
                    a.add(b, f)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(ElementMatrix { rows: self.rows, cols: self.cols, entries })
    }

    /// Matrix of the `k`-linear map `R_j^cols -> R_{j+1}^rows` given by
    /// this matrix of degree-one entries (column vector convention).
    pub fn degree_piece(&self, ring: &GradedAlgebra, j: i32) -> FMatrix {
        let free_src = FreeModule::new(ring, vec![0; self.cols]);
        let free_tgt = FreeModule::new(ring, vec![0; self.rows]);
        let f = ring.field();
        let src_dim = Ambient::dim(&free_src, j);
        let tgt_dim = Ambient::dim(&free_tgt, j + 1);
        let mut m = FMatrix::zeros(f, tgt_dim, src_dim);
        let pd = ring.piece_dim(j);
        for s in 0..self.cols {
            for bi in 0..pd {
                let col = s * pd + bi;
                let mut basis_el = vec![0u32; pd];
                basis_el[bi] = 1;
                let rho = Element::new(j as u8, basis_el).expect("degree in range");
                for t in 0..self.rows {
                    let entry = self.get(t, s);
                    if entry.is_zero() {
                        continue;
                    }
                    let prod = ring.mul(entry, &rho).expect("homogeneous entries");
                    if prod.degree() > 2 {
                        continue;
                    }
                    let off = t * ring.piece_dim(j + 1);
                    for (k, &c) in prod.coords().iter().enumerate() {
                        m.add_at(off + k, col, c);
                    }
                }
            }
        }
        m
    }
}

/// Generator degrees and a relation matrix; column `s` is a relation of
/// degree `rel_degrees[s]` and entry `(t, s)` has degree
/// `rel_degrees[s] - gens[t]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub gens: Vec<i32>,
    pub rel_degrees: Vec<i32>,
    pub matrix: ElementMatrix,
}

impl Presentation {
    /// `R(-1)^cols -> R^rows` given by a matrix of linear forms.
    pub fn linear(matrix: ElementMatrix) -> Self {
        Presentation { gens: vec![0; matrix.rows()], rel_degrees: vec![1; matrix.cols()], matrix }
    }

    pub fn check(&self, ring: &GradedAlgebra) -> Result<()> {
        if self.matrix.rows() != self.gens.len() || self.matrix.cols() != self.rel_degrees.len() {
            return Err(Error::Input("presentation matrix shape disagrees with degree lists".into()));
        }
        for t in 0..self.gens.len() {
            for s in 0..self.rel_degrees.len() {
                let e = self.matrix.get(t, s);
                let want = self.rel_degrees[s] - self.gens[t];
                if e.is_zero() {
                    continue;
                }
                if e.degree() as i32 != want || e.coords().len() != ring.piece_dim(want) {
                    return Err(Error::Input(format!(
                        "entry ({t}, {s}) has degree {} but the grading requires {want}",
                        e.degree()
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A cokernel together with the data to project from its free cover.
#[derive(Clone, Debug)]
pub struct Coker {
    pub module: GradedModule,
    pub free: FreeModule,
    relations: BTreeMap<i32, PivotBasis>,
    kept: BTreeMap<i32, Vec<usize>>,
}

impl Coker {
    /// Image in `M_e` of a vector of the free module in degree `e`.
    pub fn project(&self, e: i32, v: &[u32]) -> Vec<u32> {
        let f = self.free.ring().field();
        let Some(kept) = self.kept.get(&e) else {
            return Vec::new();
        };
        let mut r = v.to_vec();
        if let Some(rel) = self.relations.get(&e) {
            let c: Vec<u32> = rel.coords_unchecked(v).into_iter().map(|x| f.neg(x)).collect();
            rel.combine_into(&c, &mut r);
        }
        kept.iter().map(|&c| r[c]).collect()
    }

    /// Images of the free generators, as `(degree, vector)` in `M`.
    pub fn generators(&self) -> Vec<(i32, Vec<u32>)> {
        (0..self.free.rank())
            .map(|t| {
                let s = self.free.shifts()[t];
                (s, self.project(s, &self.free.basis_times(t, &Element::scalar(1))))
            })
            .collect()
    }
}

/// Quotient of the free module on `pres.gens` by the column span.
pub fn coker(ring: &GradedAlgebra, pres: &Presentation) -> Result<Coker> {
    pres.check(ring)?;
    let f = ring.field();
    let free = FreeModule::new(ring, pres.gens.clone());
    let Some((lo, hi)) = free.degree_range() else {
        return Ok(Coker { module: GradedModule::zero(ring), free, relations: BTreeMap::new(), kept: BTreeMap::new() });
    };
    // relation vectors in the free module
    let rel_vecs: Vec<(i32, Vec<u32>)> = (0..pres.rel_degrees.len())
        .map(|s| {
            let q = pres.rel_degrees[s];
            let mut v = vec![0u32; Ambient::dim(&free, q)];
            for t in 0..pres.gens.len() {
                let e = pres.matrix.get(t, s);
                if e.is_zero() {
                    continue;
                }
                let off = free.offset(q, t);
                for (k, &c) in e.coords().iter().enumerate() {
                    v[off + k] = f.add(v[off + k], c);
                }
            }
            (q, v)
        })
        .collect();
    let mut relations = BTreeMap::new();
    let mut kept = BTreeMap::new();
    for e in lo..=hi {
        let n = Ambient::dim(&free, e);
        let mut span = Vec::new();
        for (q, v) in &rel_vecs {
            let j = e - q;
            if !(0..=2).contains(&j) {
                continue;
            }
            for rho in ring_basis(ring, j) {
                span.push(act_by(&free, &rho, *q, v));
            }
        }
        let basis = PivotBasis::span(f, n, &span);
        let mut is_piv = vec![false; n];
        for &c in basis.pivots() {
            is_piv[c] = true;
        }
        kept.insert(e, (0..n).filter(|&c| !is_piv[c]).collect::<Vec<_>>());
        relations.insert(e, basis);
    }
    let mut partial = Coker { module: GradedModule::zero(ring), free, relations, kept };
    let dims: Vec<usize> = (lo..=hi).map(|e| partial.kept[&e].len()).collect();
    let mut act1 = Vec::new();
    let mut act2 = Vec::new();
    for e in lo..=hi {
        let src = partial.kept[&e].clone();
        let mk = |j: i32, g: usize, one: bool| -> FMatrix {
            let tgt = partial.kept.get(&(e + j)).map_or(0, |k| k.len());
            let mut m = FMatrix::zeros(f, tgt, src.len());
            if tgt == 0 {
                return m;
            }
            for (col, &c) in src.iter().enumerate() {
                let mut unit = vec![0u32; Ambient::dim(&partial.free, e)];
                unit[c] = 1;
                let img = if one {
                    Ambient::act1(&partial.free, g, e, &unit)
                } else {
                    Ambient::act2(&partial.free, g, e, &unit)
                };
                for (row, val) in partial.project(e + j, &img).into_iter().enumerate() {
                    m.set(row, col, val);
                }
            }
            m
        };
        act1.push((0..ring.dim1()).map(|a| mk(1, a, true)).collect::<Vec<_>>());
        act2.push((0..ring.dim2()).map(|b| mk(2, b, false)).collect::<Vec<_>>());
    }
    partial.module = GradedModule::from_parts(ring, lo, dims, act1, act2)?;
    Ok(partial)
}

/// Direct sum of shifted copies of `R`.
pub fn free_module(ring: &GradedAlgebra, shifts: &[i32]) -> GradedModule {
    FreeModule::new(ring, shifts.to_vec()).to_module()
}

/// The residue field `k = R/m`, in degree `d`.
pub fn residue_field(ring: &GradedAlgebra, d: i32) -> GradedModule {
    let f = ring.field();
    let act1 = vec![(0..ring.dim1()).map(|_| FMatrix::zeros(f, 0, 1)).collect()];
    let act2 = vec![(0..ring.dim2()).map(|_| FMatrix::zeros(f, 0, 1)).collect()];
    GradedModule::from_parts(ring, d, vec![1], act1, act2).expect("residue field shapes")
}

/// Matlis dual `Hom_k(R, k)`, graded in degrees `-2, -1, 0`; the action of
/// `v` is the transpose of multiplication by `v` on `R`.
pub fn canonical_module(ring: &GradedAlgebra) -> GradedModule {
    let f = ring.field();
    let (n1, n2) = (ring.dim1(), ring.dim2());
    // degree -2: R2^*, degree -1: R1^*, degree 0: R0^*
    let dims = vec![n2, n1, 1];
    let mut act1 = Vec::new();
    let mut act2 = Vec::new();
    // from R2^* to R1^*: phi -> (u -> phi(v_a u)), i.e. transpose of v_a: R1 -> R2
    act1.push((0..n1).map(|a| ring.mul_by_linear(&unit(n1, a)).transpose()).collect::<Vec<_>>());
    act2.push(
        (0..n2)
            .map(|b| {
                // R2^* -> R0^*: phi -> phi(w_b)
                let mut m = FMatrix::zeros(f, 1, n2);
                m.set(0, b, 1);
                m
            })
            .collect::<Vec<_>>(),
    );
    // from R1^* to R0^*: phi -> phi(v_a)
    act1.push(
        (0..n1)
            .map(|a| {
                let mut m = FMatrix::zeros(f, 1, n1);
                m.set(0, a, 1);
                m
            })
            .collect::<Vec<_>>(),
    );
    act2.push((0..n2).map(|_| FMatrix::zeros(f, 0, n1)).collect());
    act1.push((0..n1).map(|_| FMatrix::zeros(f, 0, 1)).collect());
    act2.push((0..n2).map(|_| FMatrix::zeros(f, 0, 1)).collect());
    GradedModule::from_parts(ring, -2, dims, act1, act2).expect("canonical module shapes")
}

fn unit(n: usize, i: usize) -> Vec<u32> {
    let mut v = vec![0u32; n];
    v[i] = 1;
    v
}

/// Minimal generators: a lift of a basis of `M / mM`, chosen degree by degree
/// as the first basis vectors of `M_d` independent of `(mM)_d`.
pub fn minimal_generators(m: &GradedModule) -> (usize, Vec<(i32, Vec<u32>)>) {
    let full: BTreeMap<i32, PivotBasis> =
        m.hilbert().into_iter().map(|(d, n)| (d, PivotBasis::full(m.field(), n))).collect();
    let gens = generators_of_submodule(m, &full, m.ring.dim1, m.ring.dim2, true);
    (gens.len(), gens)
}

/// Generators of the submodule `K` (given degreewise) of an ambient module.
pub(crate) fn generators_of_submodule<A: Ambient>(
    amb: &A,
    sub: &BTreeMap<i32, PivotBasis>,
    dim1: usize,
    dim2: usize,
    standard: bool,
) -> Vec<(i32, Vec<u32>)> {
    let f = amb.field();
    let mut gens = Vec::new();
    for (&e, k_e) in sub {
        let k = k_e.dim();
        if k == 0 {
            continue;
        }
        let mut builder = EchelonBuilder::new(f, amb.dim(e));
        'products: {
            if let Some(prev) = sub.get(&(e - 1)) {
                for i in 0..prev.dim() {
                    for a in 0..dim1 {
                        builder.insert(&amb.act1(a, e - 1, prev.vector(i)));
                        if builder.rank() == k {
                            break 'products;
                        }
                    }
                }
            }
            if !standard {
                if let Some(prev2) = sub.get(&(e - 2)) {
                    for i in 0..prev2.dim() {
                        for b in 0..dim2 {
                            builder.insert(&amb.act2(b, e - 2, prev2.vector(i)));
                            if builder.rank() == k {
                                break 'products;
                            }
                        }
                    }
                }
            }
        }
        if builder.rank() == k {
            continue;
        }
        for i in 0..k {
            let v = k_e.vector(i);
            if builder.insert(v) {
                gens.push((e, v.to_vec()));
                if builder.rank() == k {
                    break;
                }
            }
        }
    }
    gens
}

/// Kernel, degree by degree, of the cover `F -> amb` sending generator `t`
/// to `images[t]`.
fn cover_kernel<A: Ambient>(amb: &A, free: &FreeModule, images: &[(i32, Vec<u32>)]) -> BTreeMap<i32, PivotBasis> {
    let f = amb.field();
    let ring = free.ring();
    let mut out = BTreeMap::new();
    let Some((lo, hi)) = free.degree_range() else {
        return out;
    };
    // products of each generator image with the ring basis, by degree offset
    let products: Vec<[Vec<Vec<u32>>; 3]> = images
        .iter()
        .map(|(d, g)| {
            [
                vec![g.clone()],
                (0..ring.dim1()).map(|a| amb.act1(a, *d, g)).collect(),
                (0..ring.dim2()).map(|b| amb.act2(b, *d, g)).collect(),
            ]
        })
        .collect();
    for e in lo..=hi {
        let cols = Ambient::dim(free, e);
        if cols == 0 {
            continue;
        }
        let rows = amb.dim(e);
        let mut m = FMatrix::zeros(f, rows, cols);
        if rows > 0 {
            for (t, &s) in free.shifts().iter().enumerate() {
                let j = e - s;
                if !(0..=2).contains(&j) {
                    continue;
                }
                let off = free.offset(e, t);
                for (bi, v) in products[t][j as usize].iter().enumerate() {
                    for (r, &c) in v.iter().enumerate() {
                        if c != 0 {
                            m.set(r, off + bi, c);
                        }
                    }
                }
            }
        }
        out.insert(e, m.kernel_pivoted());
    }
    out
}

/// Graded Betti numbers `beta(i, j)`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct BettiTable {
    #[serde(with = "crate::serde_pairs::nested")]
    entries: BTreeMap<usize, BTreeMap<i32, usize>>,
    length: usize,
}

impl BettiTable {
    pub fn get(&self, i: usize, j: i32) -> usize {
        self.entries.get(&i).and_then(|r| r.get(&j)).copied().unwrap_or(0)
    }

    /// Number of homological steps recorded (`0..length`).
    pub fn length(&self) -> usize {
        self.length
    }

    /// `sum_j beta(i, j)`, the rank of the `i`-th free module.
    pub fn total(&self, i: usize) -> usize {
        self.entries.get(&i).map_or(0, |r| r.values().sum())
    }

    pub fn totals(&self) -> Vec<usize> {
        (0..self.length).map(|i| self.total(i)).collect()
    }

    /// `beta(i, i + shift)` for each step.
    pub fn diagonal(&self, shift: i32) -> Vec<usize> {
        (0..self.length).map(|i| self.get(i, i as i32 + shift)).collect()
    }

    /// Everything sits on the line `j = i + shift`.
    pub fn is_linear(&self, shift: i32) -> bool {
        self.entries.iter().all(|(&i, row)| row.iter().all(|(&j, &b)| b == 0 || j == i as i32 + shift))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, i32, usize)> + '_ {
        self.entries.iter().flat_map(|(&i, row)| row.iter().map(move |(&j, &b)| (i, j, b)))
    }

    fn push_step(&mut self, i: usize, shifts: &[i32]) {
        let row = self.entries.entry(i).or_default();
        for &s in shifts {
            *row.entry(s).or_insert(0) += 1;
        }
        self.length = self.length.max(i + 1);
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,j,beta\n");
        for (i, j, b) in self.iter() {
            s.push_str(&format!("{i},{j},{b}\n"));
        }
        s
    }
}

/// Prefix `F_0 <- F_1 <- ... <- F_N` of a minimal graded free resolution.
#[derive(Clone, Debug)]
pub struct Resolution {
    ring: GradedAlgebra,
    frees: Vec<FreeModule>,
    /// `augmentation[t]`: image in `M` of generator `t` of `F_0`.
    augmentation: Vec<(i32, Vec<u32>)>,
    /// `differentials[i-1]` is `d_i : F_i -> F_{i-1}`.
    differentials: Vec<ElementMatrix>,
    betti: BettiTable,
}

impl Resolution {
    pub fn ring(&self) -> &GradedAlgebra {
        &self.ring
    }
    pub fn free(&self, i: usize) -> &FreeModule {
        &self.frees[i]
    }
    pub fn len(&self) -> usize {
        self.frees.len()
    }
    pub fn is_empty(&self) -> bool {
        self.frees.is_empty()
    }
    pub fn betti(&self) -> &BettiTable {
        &self.betti
    }
    pub fn augmentation(&self) -> &[(i32, Vec<u32>)] {
        &self.augmentation
    }
    /// `d_i : F_i -> F_{i-1}` for `i >= 1`.
    pub fn differential(&self, i: usize) -> &ElementMatrix {
        &self.differentials[i - 1]
    }
    pub fn differentials(&self) -> &[ElementMatrix] {
        &self.differentials
    }

    /// Matrix of `d_i` on the degree-`e` pieces.
    pub fn differential_piece(&self, i: usize, e: i32) -> FMatrix {
        let src = &self.frees[i];
        let tgt = &self.frees[i - 1];
        let f = self.ring.field();
        let d = &self.differentials[i - 1];
        let mut m = FMatrix::zeros(f, Ambient::dim(tgt, e), Ambient::dim(src, e));
        for (s, &ss) in src.shifts().iter().enumerate() {
            let j = e - ss;
            if !(0..=2).contains(&j) {
                continue;
            }
            let image: Vec<u32> = {
                let mut v = vec![0u32; Ambient::dim(tgt, ss)];
                for t in 0..tgt.rank() {
                    let entry = d.get(t, s);
                    if entry.is_zero() {
                        continue;
                    }
                    let off = tgt.offset(ss, t);
                    for (k, &c) in entry.coords().iter().enumerate() {
                        v[off + k] = f.add(v[off + k], c);
                    }
                }
                v
            };
            for (bi, rho) in ring_basis(&self.ring, j).into_iter().enumerate() {
                let col = src.offset(e, s) + bi;
                for (r, c) in act_by(tgt, &rho, ss, &image).into_iter().enumerate() {
                    m.set(r, col, c);
                }
            }
        }
        m
    }
}

/// First `n` free modules `F_0..F_{n-1}` of the minimal resolution of `m`.
/// `n = N + 1` gives Betti numbers through homological degree `N`.
pub fn resolve(ring: &GradedAlgebra, m: &GradedModule, n: usize) -> Resolution {
    let f = ring.field();
    let standard = ring.is_standard();
    let mut res = Resolution {
        ring: ring.clone(),
        frees: Vec::new(),
        augmentation: Vec::new(),
        differentials: Vec::new(),
        betti: BettiTable::default(),
    };
    if n == 0 {
        return res;
    }
    let full: BTreeMap<i32, PivotBasis> = m.hilbert().into_iter().map(|(d, k)| (d, PivotBasis::full(f, k))).collect();
    let gens = generators_of_submodule(m, &full, ring.dim1(), ring.dim2(), standard);
    let shifts: Vec<i32> = gens.iter().map(|(d, _)| *d).collect();
    let mut free = FreeModule::new(ring, shifts.clone());
    res.betti.push_step(0, &shifts);
    let mut kernel = cover_kernel(m, &free, &gens);
    res.augmentation = gens;
    res.frees.push(free.clone());
    for i in 1..n {
        let gens = generators_of_submodule(&free, &kernel, ring.dim1(), ring.dim2(), standard);
        let shifts: Vec<i32> = gens.iter().map(|(d, _)| *d).collect();
        res.betti.push_step(i, &shifts);
        let next = FreeModule::new(ring, shifts);
        let mut d = ElementMatrix::zeros(ring, free.rank(), next.rank(), 0);
        for (s, (deg, v)) in gens.iter().enumerate() {
            for (t, piece) in free.split(*deg, v).into_iter().enumerate() {
                if let Some(el) = piece {
                    d.set(t, s, el);
                }
            }
        }
        res.differentials.push(d);
        if i + 1 < n {
            kernel = cover_kernel(&free, &next, &gens);
        }
        free = next;
        res.frees.push(free.clone());
    }
    res
}

/// Minimal resolution through homological degree `n` (`F_0..F_n`).
pub fn minimal_resolution(ring: &GradedAlgebra, m: &GradedModule, n: usize) -> Resolution {
    resolve(ring, m, n + 1)
}

/// First syzygy `Omega M` as a dense module, with the minimal free cover
/// `F_0 -> M` (whose kernel it is).
pub fn syzygy(ring: &GradedAlgebra, m: &GradedModule) -> (GradedModule, GradedModule, ModuleMap) {
    let f = ring.field();
    let full: BTreeMap<i32, PivotBasis> = m.hilbert().into_iter().map(|(d, k)| (d, PivotBasis::full(f, k))).collect();
    let gens = generators_of_submodule(m, &full, ring.dim1(), ring.dim2(), ring.is_standard());
    let free = FreeModule::new(ring, gens.iter().map(|(d, _)| *d).collect());
    let dense_free = free.to_module();
    let kernel = cover_kernel(m, &free, &gens);
    let omega = submodule_to_module(ring, &free, &kernel);
    // cover blocks: degree-e matrix F_e -> M_e
    let mut blocks = BTreeMap::new();
    for (e, n) in dense_free.hilbert() {
        let mut blk = FMatrix::zeros(f, m.dim(e), n);
        if m.dim(e) > 0 {
            for (t, &s) in free.shifts().iter().enumerate() {
                let j = e - s;
                if !(0..=2).contains(&j) {
                    continue;
                }
                for (bi, rho) in ring_basis(ring, j).into_iter().enumerate() {
                    let col = free.offset(e, t) + bi;
                    for (r, c) in act_by(m, &rho, s, &gens[t].1).into_iter().enumerate() {
                        blk.set(r, col, c);
                    }
                }
            }
        }
        blocks.insert(e, blk);
    }
    (omega, dense_free, ModuleMap::new(0, blocks))
}

/// Dense module structure on a submodule given by pivoted bases.
pub(crate) fn submodule_to_module<A: Ambient>(
    ring: &GradedAlgebra,
    amb: &A,
    sub: &BTreeMap<i32, PivotBasis>,
) -> GradedModule {
    let f = ring.field();
    let nonzero: Vec<i32> = sub.iter().filter(|(_, b)| b.dim() > 0).map(|(&e, _)| e).collect();
    let (Some(&lo), Some(&hi)) = (nonzero.first(), nonzero.last()) else {
        return GradedModule::zero(ring);
    };
    let dim_at = |e: i32| sub.get(&e).map_or(0, |b| b.dim());
    let dims: Vec<usize> = (lo..=hi).map(dim_at).collect();
    let mut act1 = Vec::new();
    let mut act2 = Vec::new();
    for e in lo..=hi {
        let src = dim_at(e);
        let mut per1 = Vec::new();
        for a in 0..ring.dim1() {
            let tgt = dim_at(e + 1);
            let mut m = FMatrix::zeros(f, tgt, src);
            if tgt > 0 {
                let (b_src, b_tgt) = (&sub[&e], &sub[&(e + 1)]);
                for k in 0..src {
                    let img = amb.act1(a, e, b_src.vector(k));
                    for (r, c) in b_tgt.coords_unchecked(&img).into_iter().enumerate() {
                        m.set(r, k, c);
                    }
                }
            }
            per1.push(m);
        }
        let mut per2 = Vec::new();
        for b in 0..ring.dim2() {
            let tgt = dim_at(e + 2);
            let mut m = FMatrix::zeros(f, tgt, src);
            if tgt > 0 {
                let (b_src, b_tgt) = (&sub[&e], &sub[&(e + 2)]);
                for k in 0..src {
                    let img = amb.act2(b, e, b_src.vector(k));
                    for (r, c) in b_tgt.coords_unchecked(&img).into_iter().enumerate() {
                        m.set(r, k, c);
                    }
                }
            }
            per2.push(m);
        }
        act1.push(per1);
        act2.push(per2);
    }
    GradedModule::from_parts(ring, lo, dims, act1, act2).expect("submodule shapes")
}

/// `M` is free iff its first syzygy vanishes.
pub fn is_free(ring: &GradedAlgebra, m: &GradedModule) -> bool {
    syzygy(ring, m).0.is_zero()
}

/// Subspace `mM` in each degree.
pub fn maximal_ideal_times(ring: &GradedAlgebra, m: &GradedModule) -> BTreeMap<i32, PivotBasis> {
    let f = ring.field();
    let mut out = BTreeMap::new();
    for (d, n) in m.hilbert() {
        let mut span = Vec::new();
        for a in 0..ring.dim1() {
            if let Some(mat) = m.act1(d - 1, a) {
                span.extend(mat.transpose().row_vecs());
            }
        }
        for b in 0..ring.dim2() {
            if let Some(mat) = m.act2(d - 2, b) {
                span.extend(mat.transpose().row_vecs());
            }
        }
        out.insert(d, PivotBasis::span(f, n, &span));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{build_circulant_ring, quotient_by_quadric, random_regular_quadric, QuadraticForm};

    fn fld() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    fn good_ring(r: usize) -> GradedAlgebra {
        let s = build_circulant_ring(fld(), r).unwrap();
        let f = random_regular_quadric(&s, 5).unwrap();
        quotient_by_quadric(&s, &f).unwrap()
    }

    fn square_zero() -> GradedAlgebra {
        let vars = ['x', 'y'];
        let qs: Vec<_> = ["x^2", "xy", "y^2"].iter().map(|s| QuadraticForm::parse(s, &vars).unwrap()).collect();
        crate::algebra::build_quadratic_quotient(fld(), 2, &qs).unwrap()
    }

    #[test]
    fn free_module_dims() {
        let r = good_ring(2);
        let m = free_module(&r, &[0]);
        assert_eq!(m.dims(), &[1, 3, 2]);
        assert_eq!(m.length(), 6);
        m.validate(&r).unwrap();
        let shifted = free_module(&r, &[1]);
        assert_eq!(shifted.base_degree(), 1);
        assert_eq!(shifted.dims(), &[1, 3, 2]);
        let two = free_module(&r, &[0, 0]);
        assert_eq!(two.dims(), &[2, 6, 4]);
        assert!(is_free(&r, &two));
    }

    #[test]
    fn coker_edge_cases() {
        let r = good_ring(2);
        let none =
            Presentation { gens: vec![0, 0], rel_degrees: vec![], matrix: ElementMatrix::new(2, 0, vec![]).unwrap() };
        assert_eq!(coker(&r, &none).unwrap().module, free_module(&r, &[0, 0]));
        let id = Presentation {
            gens: vec![0],
            rel_degrees: vec![0],
            matrix: ElementMatrix::new(1, 1, vec![Element::scalar(1)]).unwrap(),
        };
        assert!(coker(&r, &id).unwrap().module.is_zero());
        // wrong entry degree
        let bad = Presentation {
            gens: vec![0],
            rel_degrees: vec![2],
            matrix: ElementMatrix::linear(1, 1, vec![vec![1, 0, 0]]).unwrap(),
        };
        assert!(matches!(coker(&r, &bad), Err(Error::Input(_))));
    }

    #[test]
    fn residue_field_resolution_over_square_zero_ring() {
        // over k[x,y]/(x,y)^2 the residue field has Betti numbers 2^i on the diagonal
        let r = square_zero();
        let k = residue_field(&r, 0);
        let res = minimal_resolution(&r, &k, 5);
        assert_eq!(res.betti().diagonal(0), vec![1, 2, 4, 8, 16, 32]);
        assert!(res.betti().is_linear(0));
    }

    #[test]
    fn residue_field_syzygy_is_maximal_ideal() {
        let r = good_ring(2);
        let (omega, cover_src, cover) = syzygy(&r, &residue_field(&r, 0));
        assert_eq!(omega.base_degree(), 1);
        assert_eq!(omega.dims(), &[3, 2]);
        assert_eq!(cover_src.length() - 1, omega.length());
        assert!(cover.is_homomorphism(&cover_src, &residue_field(&r, 0), &r));
        omega.validate(&r).unwrap();
    }

    #[test]
    fn minimal_generators_counts() {
        let r = good_ring(2);
        assert_eq!(minimal_generators(&free_module(&r, &[0, 0, 1])).0, 3);
        assert_eq!(minimal_generators(&GradedModule::zero(&r)).0, 0);
    }

    #[test]
    fn resolution_is_a_minimal_complex() {
        let r = good_ring(2);
        let k = residue_field(&r, 0);
        let res = minimal_resolution(&r, &k, 4);
        for i in 1..res.len() {
            let d = res.differential(i);
            // minimality: no unit entries
            assert!(d.entries().iter().all(|e| e.degree() > 0 || e.is_zero()));
            if i + 1 < res.len() {
                assert!(d.mul(res.differential(i + 1), &r).unwrap().is_zero());
            }
        }
        // exactness at F_1..F_{n-1}: kernel of d_i equals image of d_{i+1}
        for i in 1..res.len() - 1 {
            let lo = res.free(i).shifts().iter().min().copied().unwrap();
            for e in lo..lo + 4 {
                let di = res.differential_piece(i, e);
                let dnext = res.differential_piece(i + 1, e);
                let ker = crate::exactla::kernel_basis(&di);
                let im = crate::exactla::image_basis(&dnext);
                assert_eq!(ker, im, "step {i}, degree {e}");
            }
        }
    }

    #[test]
    fn module_json_roundtrip_and_validation() {
        let r = good_ring(3);
        let m = free_module(&r, &[0, 1]);
        let json = serde_json::to_string(&m).unwrap();
        let back: GradedModule = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
        back.validate(&r).unwrap();
        assert!(back.validate(&good_ring(2)).is_err());
    }

    #[test]
    fn generator_images_define_maps() {
        let r = good_ring(2);
        let x = Element::linear(vec![1, 0, 0]);
        let pres = Presentation::linear(ElementMatrix::new(1, 1, vec![x]).unwrap());
        let c = coker(&r, &pres).unwrap();
        let free = free_module(&r, &[0]);
        // R -> R/xR, 1 -> 1
        let gens = vec![(0, vec![1])];
        let map = ModuleMap::from_generator_images(
            &r,
            &free,
            &gens,
            &c.module,
            &c.generators().into_iter().map(|g| g.1).collect::<Vec<_>>(),
            0,
        )
        .unwrap();
        assert!(map.is_homomorphism(&free, &c.module, &r));
        assert!(map.is_surjective(&c.module));
        // R/xR -> R, 1 -> 1 is not well defined
        assert!(ModuleMap::from_generator_images(&r, &c.module, &c.generators(), &free, &[vec![1]], 0).is_err());
    }

    #[test]
    fn direct_sum_dims() {
        let r = good_ring(2);
        let a = free_module(&r, &[0]);
        let k = residue_field(&r, 1);
        let s = a.direct_sum(&k).unwrap();
        assert_eq!(s.dims(), &[1, 4, 2]);
        s.validate(&r).unwrap();
    }

    #[test]
    fn canonical_module_is_a_module() {
        let r = good_ring(3);
        let w = canonical_module(&r);
        w.validate(&r).unwrap();
        assert_eq!(w.base_degree(), -2);
        assert_eq!(minimal_generators(&w).0, 3);
    }
}
