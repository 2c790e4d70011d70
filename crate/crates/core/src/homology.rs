//! Hom spaces, duals, the biduality map, Ext against a module, Bass numbers
//! and the Koszul test.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::GradedAlgebra;
use crate::error::{Error, Result};
use crate::exactla::{FMatrix, PivotBasis, PrimeField};
use crate::gmodule::{
    canonical_module, minimal_resolution, residue_field, BettiTable, GradedModule, ModuleMap, RingTag,
};

/// Coordinates of a degree-`e` map `M -> N`: one `N_{d+e} x M_d` block per
/// nonzero `M_d`, flattened row-major in increasing `d`.
#[derive(Clone, Debug)]
struct Layout {
    blocks: Vec<(i32, usize, usize, usize)>, // (d, rows, cols, offset)
    total: usize,
}

impl Layout {
    fn new(m: &GradedModule, n: &GradedModule, e: i32) -> Self {
        let mut blocks = Vec::new();
        let mut off = 0;
        for (d, cols) in m.hilbert() {
            let rows = n.dim(d + e);
            if rows > 0 && cols > 0 {
                blocks.push((d, rows, cols, off));
                off += rows * cols;
            }
        }
        Layout { blocks, total: off }
    }

    fn find(&self, d: i32) -> Option<(usize, usize, usize)> {
        self.blocks.iter().find(|b| b.0 == d).map(|&(_, r, c, o)| (r, c, o))
    }

    fn to_map(&self, field: PrimeField, v: &[u32], e: i32) -> ModuleMap {
        let mut blocks = BTreeMap::new();
        for &(d, rows, cols, off) in &self.blocks {
            let data = v[off..off + rows * cols].to_vec();
            blocks.insert(d, FMatrix::from_data(field, rows, cols, data).expect("block shape"));
        }
        ModuleMap::new(e, blocks)
    }

    fn flatten(&self, map: &ModuleMap) -> Vec<u32> {
        let mut v = vec![0u32; self.total];
        for &(d, rows, cols, off) in &self.blocks {
            if let Some(b) = map.blocks().get(&d) {
                if b.rows() == rows && b.cols() == cols {
                    v[off..off + rows * cols].copy_from_slice(b.data());
                }
            }
        }
        v
    }
}

/// `Hom_R(M, N)` as a graded vector space, one kernel per internal degree.
#[derive(Clone, Debug)]
pub struct HomSpace {
    field: PrimeField,
    layouts: BTreeMap<i32, Layout>,
    pieces: BTreeMap<i32, PivotBasis>,
}

impl HomSpace {
    pub fn dim_at(&self, e: i32) -> usize {
        self.pieces.get(&e).map_or(0, |p| p.dim())
    }

    pub fn dim(&self) -> usize {
        self.pieces.values().map(|p| p.dim()).sum()
    }

    /// Nonzero graded pieces, degree to dimension.
    pub fn graded_dims(&self) -> BTreeMap<i32, usize> {
        self.pieces.iter().filter(|(_, p)| p.dim() > 0).map(|(&e, p)| (e, p.dim())).collect()
    }

    pub fn basis_at(&self, e: i32) -> Vec<ModuleMap> {
        match (self.pieces.get(&e), self.layouts.get(&e)) {
            (Some(p), Some(l)) => (0..p.dim()).map(|k| l.to_map(self.field, p.vector(k), e)).collect(),
            _ => Vec::new(),
        }
    }

    /// All basis maps, lowest degree first.
    pub fn basis(&self) -> Vec<ModuleMap> {
        self.pieces.keys().flat_map(|&e| self.basis_at(e)).collect()
    }

    /// Coordinates of a homogeneous map in the degree-`map.degree()` basis.
    pub fn coords(&self, map: &ModuleMap) -> Option<Vec<u32>> {
        let e = map.degree();
        match (self.pieces.get(&e), self.layouts.get(&e)) {
            (Some(p), Some(l)) => p.coords(&l.flatten(map)),
            // no degree-e piece: only the zero map has coordinates
            _ => map.blocks().values().all(|b| b.is_zero()).then(Vec::new),
        }
    }
}

/// Degree-`e` homomorphisms `M -> N` as the kernel of the commutation
/// constraints with `R1` and `R2`.
fn hom_piece(ring: &GradedAlgebra, m: &GradedModule, n: &GradedModule, e: i32) -> (Layout, PivotBasis) {
    let f = ring.field();
    let layout = Layout::new(m, n, e);
    let mut rows: Vec<Vec<u32>> = Vec::new();
    for (d, cols) in m.hilbert() {
        for j in [1i32, 2] {
            let gens = if j == 1 { ring.dim1() } else { ring.dim2() };
            let out_rows = n.dim(d + j + e);
            if out_rows == 0 || cols == 0 {
                continue;
            }
            let hi = layout.find(d + j);
            let lo = layout.find(d);
            for g in 0..gens {
                // f_{d+j} * A_M - A_N * f_d, where A_M: M_d -> M_{d+j}
                let am = if j == 1 { m.act1(d, g) } else { m.act2(d, g) };
                let an = if j == 1 { n.act1(d + e, g) } else { n.act2(d + e, g) };
                for i in 0..out_rows {
                    for c in 0..cols {
                        let mut eq = vec![0u32; layout.total];
                        if let (Some((_, hc, ho)), Some(am)) = (hi, am) {
                            for k in 0..hc {
                                let a = am.get(k, c);
                                if a != 0 {
                                    eq[ho + i * hc + k] = f.add(eq[ho + i * hc + k], a);
                                }
                            }
                        }
                        if let (Some((_, lc, lo_off)), Some(an)) = (lo, an) {
                            let lr = n.dim(d + e);
                            for k in 0..lr {
                                let b = an.get(i, k);
                                if b != 0 {
                                    let idx = lo_off + k * lc + c;
                                    eq[idx] = f.sub(eq[idx], b);
                                }
                            }
                        }
                        if eq.iter().any(|&x| x != 0) {
                            rows.push(eq);
                        }
                    }
                }
            }
        }
    }
    let sys = FMatrix::from_row_vecs(f, layout.total, &rows);
    let basis = if rows.is_empty() { PivotBasis::full(f, layout.total) } else { sys.kernel_pivoted() };
    (layout, basis)
}

fn same_ring(ring: &GradedAlgebra, m: &GradedModule, n: &GradedModule) -> Result<()> {
    let tag = RingTag::of(ring);
    if m.ring_tag() != &tag || n.ring_tag() != &tag {
        return Err(Error::Input("modules live over different rings".into()));
    }
    Ok(())
}

/// All graded homomorphisms `M -> N`.
pub fn hom_space(ring: &GradedAlgebra, m: &GradedModule, n: &GradedModule) -> Result<HomSpace> {
    same_ring(ring, m, n)?;
    let mut layouts = BTreeMap::new();
    let mut pieces = BTreeMap::new();
    if !m.is_zero() && !n.is_zero() {
        for e in (n.base_degree() - m.top_degree())..=(n.top_degree() - m.base_degree()) {
            let (l, p) = hom_piece(ring, m, n, e);
            layouts.insert(e, l);
            pieces.insert(e, p);
        }
    }
    Ok(HomSpace { field: ring.field(), layouts, pieces })
}

/// `M* = Hom_R(M, R)` with its natural grading, and the Hom space behind it.
pub fn dual_raw(ring: &GradedAlgebra, m: &GradedModule) -> Result<(GradedModule, HomSpace)> {
    let r = crate::gmodule::free_module(ring, &[0]);
    let hom = hom_space(ring, m, &r)?;
    let f = ring.field();
    let degs: Vec<i32> = hom.graded_dims().keys().copied().collect();
    let (Some(&lo), Some(&hi)) = (degs.first(), degs.last()) else {
        return Ok((GradedModule::zero(ring), hom));
    };
    let dims: Vec<usize> = (lo..=hi).map(|e| hom.dim_at(e)).collect();
    let mut act1 = Vec::new();
    let mut act2 = Vec::new();
    for e in lo..=hi {
        let basis = hom.basis_at(e);
        let src = basis.len();
        let image = |j: i32, g: usize| -> FMatrix {
            let tgt = hom.dim_at(e + j);
            let mut out = FMatrix::zeros(f, tgt, src);
            if tgt == 0 {
                return out;
            }
            for (col, phi) in basis.iter().enumerate() {
                let mut blocks = BTreeMap::new();
                for (&d, b) in phi.blocks() {
                    let a = if j == 1 { r.act1(d + e, g) } else { r.act2(d + e, g) };
                    if let Some(a) = a {
                        blocks.insert(d, a.mul_unchecked(b));
                    }
                }
                let moved = ModuleMap::new(e + j, blocks);
                let c = hom.coords(&moved).expect("ring multiple of a homomorphism is a homomorphism");
                for (row, v) in c.into_iter().enumerate() {
                    out.set(row, col, v);
                }
            }
            out
        };
        act1.push((0..ring.dim1()).map(|a| image(1, a)).collect());
        act2.push((0..ring.dim2()).map(|b| image(2, b)).collect());
    }
    let dual = GradedModule::from_parts(ring, lo, dims, act1, act2)?;
    Ok((dual, hom))
}

/// `M*` renormalized so its lowest nonzero piece sits in degree 0.
pub fn dual(ring: &GradedAlgebra, m: &GradedModule) -> Result<GradedModule> {
    Ok(dual_raw(ring, m)?.0.normalized())
}

/// Evaluation map `M -> M**` and whether it is bijective in every degree.
pub fn bidual_check(ring: &GradedAlgebra, m: &GradedModule) -> Result<(bool, ModuleMap)> {
    let f = ring.field();
    let r = crate::gmodule::free_module(ring, &[0]);
    let (mstar, hom1) = dual_raw(ring, m)?;
    let (mss, hom2) = dual_raw(ring, &mstar)?;
    let mut blocks = BTreeMap::new();
    for (d, n) in m.hilbert() {
        let mut blk = FMatrix::zeros(f, mss.dim(d), n);
        for c in 0..n {
            // image of the basis vector m_c: phi -> phi(m_c)
            let mut eval_blocks = BTreeMap::new();
            for (e, _) in mstar.hilbert() {
                let phis = hom1.basis_at(e);
                let rows = r.dim(d + e);
                let mut b = FMatrix::zeros(f, rows, phis.len());
                if rows > 0 {
                    for (k, phi) in phis.iter().enumerate() {
                        if let Some(pb) = phi.blocks().get(&d) {
                            for i in 0..rows {
                                b.set(i, k, pb.get(i, c));
                            }
                        }
                    }
                }
                eval_blocks.insert(e, b);
            }
            let ev = ModuleMap::new(d, eval_blocks);
            let coords = match hom2.coords(&ev) {
                Some(c) => c,
                None => return Err(Error::Construction("evaluation is not R-linear".into())),
            };
            for (row, v) in coords.into_iter().enumerate() {
                blk.set(row, c, v);
            }
        }
        blocks.insert(d, blk);
    }
    let map = ModuleMap::new(0, blocks);
    let iso = m.length() == mss.length() && mss.hilbert().iter().all(|&(d, k)| m.dim(d) == k) && map.is_injective(m);
    Ok((iso, map))
}

/// `dim Ext^i(M, N)` by homological degree `i` and internal degree.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtReport {
    pub imax: usize,
    #[serde(with = "crate::serde_pairs::nested")]
    pub dims: BTreeMap<usize, BTreeMap<i32, usize>>,
}

impl ExtReport {
    pub fn total(&self, i: usize) -> usize {
        self.dims.get(&i).map_or(0, |r| r.values().sum())
    }

    pub fn totals(&self) -> Vec<usize> {
        (0..=self.imax).map(|i| self.total(i)).collect()
    }

    /// `Ext^i = 0` for `1 <= i <= imax`.
    pub fn vanishes_above_zero(&self) -> bool {
        (1..=self.imax).all(|i| self.total(i) == 0)
    }

    /// Smallest `i >= 1` with `Ext^i != 0`.
    pub fn first_nonvanishing(&self) -> Option<usize> {
        (1..=self.imax).find(|&i| self.total(i) != 0)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("i,degree,dim\n");
        for (i, row) in &self.dims {
            for (e, d) in row {
                if *d > 0 {
                    s.push_str(&format!("{i},{e},{d}\n"));
                }
            }
        }
        s
    }
}

/// `Ext^i_R(M, N)` for `0 <= i <= imax`, from `Hom(F, N)` over a minimal
/// resolution `F` of `M` through step `imax + 1`.
pub fn ext(ring: &GradedAlgebra, m: &GradedModule, n: &GradedModule, imax: usize) -> Result<ExtReport> {
    same_ring(ring, m, n)?;
    let f = ring.field();
    let res = minimal_resolution(ring, m, imax + 1);
    let mut report = ExtReport { imax, dims: BTreeMap::new() };
    if n.is_zero() || m.is_zero() {
        return Ok(report);
    }
    // internal degrees where some cochain group is nonzero
    let mut degrees = std::collections::BTreeSet::new();
    for i in 0..=imax.min(res.len() - 1) {
        for &s in res.free(i).shifts() {
            for (d, _) in n.hilbert() {
                degrees.insert(d - s);
            }
        }
    }
    let cochain_dim = |i: usize, e: i32| -> usize { res.free(i).shifts().iter().map(|&s| n.dim(s + e)).sum::<usize>() };
    // d*_{i}: C^{i-1}_e -> C^i_e, block (s, t) = action of D_{t,s} on N
    let coboundary_rank = |i: usize, e: i32| -> usize {
        if i == 0 || i >= res.len() {
            return 0;
        }
        let src = res.free(i - 1);
        let tgt = res.free(i);
        let rows = cochain_dim(i, e);
        let cols = cochain_dim(i - 1, e);
        if rows == 0 || cols == 0 {
            return 0;
        }
        let d = res.differential(i);
        let mut mat = FMatrix::zeros(f, rows, cols);
        let mut row_off = 0;
        for (s, &ss) in tgt.shifts().iter().enumerate() {
            let rdim = n.dim(ss + e);
            if rdim == 0 {
                continue;
            }
            let mut col_off = 0;
            for (t, &st) in src.shifts().iter().enumerate() {
                let cdim = n.dim(st + e);
                if cdim == 0 {
                    continue;
                }
                let entry = d.get(t, s);
                if !entry.is_zero() {
                    let a = n.act_element(entry, st + e);
                    for i2 in 0..rdim {
                        for j2 in 0..cdim {
                            mat.set(row_off + i2, col_off + j2, a.get(i2, j2));
                        }
                    }
                }
                col_off += cdim;
            }
            row_off += rdim;
        }
        mat.rank()
    };
    for i in 0..=imax {
        let mut row = BTreeMap::new();
        for &e in &degrees {
            let c = cochain_dim(i, e);
            if c == 0 {
                continue;
            }
            let dimension = c - coboundary_rank(i + 1, e) - coboundary_rank(i, e);
            if dimension > 0 {
                row.insert(e, dimension);
            }
        }
        report.dims.insert(i, row);
    }
    Ok(report)
}

/// Bass numbers `mu_i = dim_k Ext^i_R(k, R)` for `0 <= i <= n`, read off as
/// the Betti numbers of the canonical module `Hom_k(R, k)`.
pub fn bass_numbers(ring: &GradedAlgebra, n: usize) -> Vec<usize> {
    let omega = canonical_module(ring);
    minimal_resolution(ring, &omega, n).betti().totals()
}

/// Bass numbers straight from `Ext(k, R)`; slower, used as a cross-check.
pub fn bass_numbers_direct(ring: &GradedAlgebra, n: usize) -> Result<Vec<usize>> {
    let k = residue_field(ring, 0);
    let r = crate::gmodule::free_module(ring, &[0]);
    Ok(ext(ring, &k, &r, n)?.totals())
}

/// Whether `k` has a linear resolution through step `n`, with its Betti table.
pub fn koszul_check(ring: &GradedAlgebra, n: usize) -> (bool, BettiTable) {
    let k = residue_field(ring, 0);
    let betti = minimal_resolution(ring, &k, n).betti().clone();
    (betti.is_linear(0), betti)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::{
        build_circulant_ring, build_quadratic_quotient, quotient_by_quadric, random_regular_quadric, Element,
        QuadraticForm,
    };
    use crate::gmodule::{coker, free_module, ElementMatrix, Presentation};
    use rand::SeedableRng;

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
        build_quadratic_quotient(fld(), 2, &qs).unwrap()
    }

    fn cyclic(ring: &GradedAlgebra, x: Vec<u32>) -> GradedModule {
        let pres = Presentation::linear(ElementMatrix::new(1, 1, vec![Element::linear(x)]).unwrap());
        coker(ring, &pres).unwrap().module
    }

    #[test]
    fn bidual_of_two_generated_modules_over_square_zero_ring() {
        let ring = crate::preset::square_zero_ring(PrimeField::new(101).unwrap()).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        for _ in 0..5 {
            let m = crate::preset::random_two_generated(&ring, &mut rng).unwrap();
            let (iso, map) = bidual_check(&ring, &m).unwrap();
            assert!(!iso);
            assert_eq!(map.degree(), 0);
        }
    }

    #[test]
    fn hom_from_free_is_target() {
        let r = good_ring(2);
        let m = cyclic(&r, vec![1, 2, 3]);
        let h = hom_space(&r, &free_module(&r, &[0]), &m).unwrap();
        assert_eq!(h.graded_dims(), m.hilbert().into_iter().collect());
        for phi in h.basis() {
            assert!(phi.is_homomorphism(&free_module(&r, &[0]), &m, &r));
        }
    }

    #[test]
    fn hom_from_residue_field_is_socle() {
        for rr in 2..=3 {
            let r = good_ring(rr);
            let h = hom_space(&r, &residue_field(&r, 0), &free_module(&r, &[0])).unwrap();
            assert_eq!(h.dim(), rr);
            assert_eq!(h.graded_dims(), BTreeMap::from([(2, rr)]));
        }
    }

    #[test]
    fn duals() {
        let r = good_ring(2);
        let rs = dual(&r, &free_module(&r, &[0])).unwrap();
        assert_eq!(rs.dims(), &[1, 3, 2]);
        let (kstar, _) = dual_raw(&r, &residue_field(&r, 0)).unwrap();
        assert_eq!(kstar.hilbert(), vec![(2, 2)]);
        let m = cyclic(&r, vec![1, 2, 3]);
        let ms = dual(&r, &m).unwrap();
        assert_eq!(ms.length(), m.length());
    }

    #[test]
    fn biduality() {
        let r = good_ring(2);
        let (ok, map) = bidual_check(&r, &free_module(&r, &[0, 1])).unwrap();
        assert!(ok);
        assert!(map.is_homomorphism(&free_module(&r, &[0, 1]), &free_module(&r, &[0, 1]), &r));
        assert!(bidual_check(&r, &cyclic(&r, vec![1, 2, 3])).unwrap().0);
        assert!(!bidual_check(&r, &residue_field(&r, 0)).unwrap().0);
        let sz = square_zero();
        assert!(!bidual_check(&sz, &residue_field(&sz, 0)).unwrap().0);
    }

    #[test]
    fn ext_values() {
        let r = good_ring(2);
        let rr = free_module(&r, &[0]);
        assert!(ext(&r, &free_module(&r, &[0, 2]), &rr, 3).unwrap().vanishes_above_zero());
        let k = residue_field(&r, 0);
        let e = ext(&r, &k, &rr, 2).unwrap();
        assert_eq!(e.totals(), vec![2, 3, 6]);
        assert!(ext(&r, &cyclic(&r, vec![1, 2, 3]), &rr, 4).unwrap().vanishes_above_zero());
    }

    #[test]
    fn bass_numbers_agree_with_direct_ext() {
        let r = good_ring(2);
        assert_eq!(bass_numbers(&r, 6), vec![2, 3, 6, 12, 24, 48, 96]);
        assert_eq!(bass_numbers_direct(&r, 4).unwrap(), bass_numbers(&r, 4));
        let r3 = good_ring(3);
        assert_eq!(bass_numbers(&r3, 4), vec![3, 8, 24, 72, 216]);
        assert_eq!(bass_numbers_direct(&r3, 3).unwrap(), vec![3, 8, 24, 72]);
    }

    #[test]
    fn koszul() {
        let (ok, b) = koszul_check(&good_ring(2), 5);
        assert!(ok);
        assert_eq!(b.diagonal(0), vec![1, 3, 7, 15, 31, 63]);
        let (ok, b) = koszul_check(&good_ring(3), 4);
        assert!(ok);
        assert_eq!(b.diagonal(0), vec![1, 4, 13, 40, 121]);
        let (ok, b) = koszul_check(&square_zero(), 4);
        assert!(ok);
        assert_eq!(b.diagonal(0), vec![1, 2, 4, 8, 16]);
    }

    #[test]
    fn hom_dims_match_dual_hom() {
        let r = good_ring(2);
        let m = cyclic(&r, vec![1, 2, 3]);
        let n = cyclic(&r, vec![4, 0, 1]);
        let hmn = hom_space(&r, &m, &n).unwrap().dim();
        let hdual = hom_space(&r, &dual(&r, &n).unwrap(), &dual(&r, &m).unwrap()).unwrap().dim();
        assert_eq!(hmn, hdual);
    }

    #[test]
    fn ring_mismatch_is_input_error() {
        let a = good_ring(2);
        let b = good_ring(3);
        let err = hom_space(&a, &free_module(&a, &[0]), &free_module(&b, &[0])).unwrap_err();
        assert!(err.is_input_error());
    }
}
