//! Module factories: matrix factorizations over the exterior algebra, the
//! bidiagonal family, and the invariants used to tell modules apart
//! (generator counts, the degree-one Fitting subspace, endomorphism rings).

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{veliche_ring, DegreeTwoRingData, Element, GradedAlgebra, Hypersurface};
use crate::error::{Error, Result};
use crate::exactla::{kernel_basis, FMatrix, PrimeField, Subspace};
use crate::gdim::{
    cyclic_quotient_certificate, verify_periodic_cr, FiltrationStep, GdimCertificate, ShortExactSequence,
};
use crate::gmodule::{
    coker, minimal_generators, minimal_resolution, ElementMatrix, GradedModule, ModuleMap, Presentation,
};
use crate::homology::{hom_space, HomSpace};

/// Sign rule for the contraction `phi`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum Contraction {
    /// `(-1)^(number of indices of I below j)` on the term dropping `e_j`.
    #[default]
    Alternating,
    /// No signs at all. Only a matrix factorization when `n = 1`.
    Unsigned,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFactorizationData {
    pub n_terms: usize,
    pub pairs: Vec<(Element, Element)>,
    pub f: Element,
    /// Matrices on the exterior basis, subsets ordered by bitmask.
    pub phi: ElementMatrix,
    pub psi: ElementMatrix,
}

fn below(mask: usize, j: usize) -> u32 {
    (mask & ((1 << j) - 1)).count_ones()
}

fn sign(field: PrimeField, e: &Element, odd: bool) -> Element {
    if odd {
        e.neg(field)
    } else {
        e.clone()
    }
}

/// Builds `phi` (contraction by the `x_i`) and `psi` (wedge with
/// `sum y_i e_i`) and checks `phi^2 = psi^2 = 0`, `phi psi + psi phi = f`.
pub fn exterior_phi_psi(
    s: &DegreeTwoRingData,
    pairs: &[(Element, Element)],
    contraction: Contraction,
) -> Result<MatrixFactorizationData> {
    let alg = s.as_algebra();
    let field = alg.field();
    if pairs.is_empty() {
        return Err(Error::Input("at least one pair is needed (f = 0 otherwise)".into()));
    }
    for (x, y) in pairs {
        if x.degree() != 1 || y.degree() != 1 {
            return Err(Error::Input("pairs must consist of degree-one elements".into()));
        }
        alg.check_element(x)?;
        alg.check_element(y)?;
    }
    let n = pairs.len();
    if n > 10 {
        return Err(Error::Input("at most 10 pairs".into()));
    }
    let size = 1usize << n;
    let zero = Element::zero(1, alg.dim1());
    let mut phi = ElementMatrix::new(size, size, vec![zero.clone(); size * size])?;
    let mut psi = phi.clone();
    for mask in 0..size {
        for (j, (x, y)) in pairs.iter().enumerate() {
            let odd = contraction == Contraction::Alternating && below(mask, j) % 2 == 1;
            if mask & (1 << j) != 0 {
                phi.set(mask ^ (1 << j), mask, sign(field, x, odd));
            } else {
                psi.set(mask | (1 << j), mask, sign(field, y, below(mask, j) % 2 == 1));
            }
        }
    }
    let mut f = Element::zero(2, alg.dim2());
    for (x, y) in pairs {
        f = f.add(&alg.mul(x, y)?, field)?;
    }
    if f.is_zero() {
        return Err(Error::Input("f = sum x_i y_i vanishes".into()));
    }
    let pp = phi.mul(&phi, alg)?;
    let ss = psi.mul(&psi, alg)?;
    let anti = phi.mul(&psi, alg)?.add(&psi.mul(&phi, alg)?, alg)?;
    if !pp.is_zero() {
        return Err(Error::Construction("phi^2 != 0".into()));
    }
    if !ss.is_zero() {
        return Err(Error::Construction("psi^2 != 0".into()));
    }
    for i in 0..size {
        for j in 0..size {
            let e = anti.get(i, j);
            let ok = if i == j { e.coords() == f.coords() } else { e.is_zero() };
            if !ok {
                return Err(Error::Construction(format!("phi psi + psi phi differs from f at ({i}, {j})")));
            }
        }
    }
    Ok(MatrixFactorizationData { n_terms: n, pairs: pairs.to_vec(), f, phi, psi })
}

/// Seeded pairs of degree-one elements of `S`.
pub fn random_pairs(s: &DegreeTwoRingData, n: usize, rng: &mut ChaCha8Rng) -> Vec<(Element, Element)> {
    let field = s.field();
    let mut v = || Element::linear((0..s.dim_s1()).map(|_| field.random(rng)).collect());
    (0..n).map(|_| (v(), v())).collect()
}

#[derive(Clone, Debug)]
pub struct MfModule {
    pub hypersurface: Hypersurface,
    pub data: MatrixFactorizationData,
    pub module: GradedModule,
    pub certificate: GdimCertificate,
}

/// `R = S/fS` and `M = coker(phi + psi)` over `R`, certified by the
/// 1-periodic complete resolution `phi + psi`.
pub fn matrix_factorization_module(s: &DegreeTwoRingData, pairs: &[(Element, Element)]) -> Result<MfModule> {
    let data = exterior_phi_psi(s, pairs, Contraction::Alternating)?;
    let hypersurface = Hypersurface::new(s.clone(), data.f.clone())?;
    let ring = &hypersurface.ring;
    let d = data.phi.add(&data.psi, s.as_algebra())?;
    let (certificate, module) = verify_periodic_cr(ring, &[d])?;
    let size = 1usize << data.n_terms;
    let r = hypersurface.r();
    if module.dims() != [size, size * r] || module.base_degree() != 0 {
        return Err(Error::Construction(format!(
            "Hilbert coefficients {:?}, expected {:?}",
            module.dims(),
            [size, size * r]
        )));
    }
    Ok(MfModule { hypersurface, data, module, certificate })
}

/// Seeded pairs with `f = sum x_i y_i` regular on `S`.
pub fn random_matrix_factorization(s: &DegreeTwoRingData, n: usize, seed: u64) -> Result<MfModule> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last = None;
    for _ in 0..crate::algebra::REDUCTION_SAMPLE_BUDGET {
        let pairs = random_pairs(s, n, &mut rng);
        match matrix_factorization_module(s, &pairs) {
            Ok(m) => return Ok(m),
            Err(e @ Error::Input(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or(Error::SearchExhausted {
        samples: crate::algebra::REDUCTION_SAMPLE_BUDGET,
        what: "pairs with a regular f".into(),
    }))
}

/// Parameters of `M([x], n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FamilySpec {
    pub x: Vec<u32>,
    pub z: Vec<u32>,
    pub n: usize,
}

impl FamilySpec {
    pub fn check(&self, h: &Hypersurface) -> Result<()> {
        let dim1 = h.ring.dim1();
        if self.x.len() != dim1 || self.z.len() != dim1 {
            return Err(Error::Dimension("x and z must lie in degree one".into()));
        }
        if self.n == 0 {
            return Err(Error::Input("n must be positive".into()));
        }
        if !h.is_reduction_of_s(&self.x) {
            return Err(Error::Input("x is not a minimal reduction of S".into()));
        }
        if Subspace::from_vectors(h.ring.field(), dim1, &[self.x.clone(), self.z.clone()]).dim() != 2 {
            return Err(Error::Input("x and z are linearly dependent".into()));
        }
        Ok(())
    }
}

/// `Phi_x`: `x` on the diagonal, `z` just above it.
pub fn bidiagonal(spec: &FamilySpec) -> ElementMatrix {
    let n = spec.n;
    let zero = Element::zero(1, spec.x.len());
    let mut m = ElementMatrix::new(n, n, vec![zero; n * n]).expect("square");
    for i in 0..n {
        m.set(i, i, Element::linear(spec.x.clone()));
        if i + 1 < n {
            m.set(i, i + 1, Element::linear(spec.z.clone()));
        }
    }
    m
}

/// `M([x], n) = coker(Phi_x)` with a filtration certificate whose
/// subquotients are all `R/xR`.
pub fn family_module(h: &Hypersurface, spec: &FamilySpec) -> Result<(GradedModule, GdimCertificate)> {
    spec.check(h)?;
    let ring = &h.ring;
    let (first, quotient) = cyclic_quotient_certificate(ring, &spec.x)?;
    let mut prev = coker(ring, &Presentation::linear(bidiagonal(&FamilySpec { n: 1, ..spec.clone() })))?;
    if prev.module != quotient {
        return Err(Error::Construction("R/xR built two ways disagrees".into()));
    }
    let quotient_gens =
        coker(ring, &Presentation::linear(bidiagonal(&FamilySpec { n: 1, ..spec.clone() })))?.generators();
    let mut steps = Vec::new();
    for i in 2..=spec.n {
        let next = coker(ring, &Presentation::linear(bidiagonal(&FamilySpec { n: i, ..spec.clone() })))?;
        let next_gens = next.generators();
        let sub_gens = prev.generators();
        let inclusion = ModuleMap::from_generator_images(
            ring,
            &prev.module,
            &sub_gens,
            &next.module,
            &next_gens[..i - 1].iter().map(|g| g.1.clone()).collect::<Vec<_>>(),
            0,
        )?;
        let mut images: Vec<Vec<u32>> = vec![vec![0]; i - 1];
        images.push(quotient_gens[0].1.clone());
        let projection = ModuleMap::from_generator_images(ring, &next.module, &next_gens, &quotient, &images, 0)?;
        let ses = ShortExactSequence {
            sub: prev.module.clone(),
            middle: next.module.clone(),
            quotient: quotient.clone(),
            inclusion,
            projection,
        };
        ses.check(ring).map_err(|e| Error::Construction(format!("filtration step {i}: {e}")))?;
        steps.push(FiltrationStep { quotient: first.clone(), ses });
        prev = next;
    }
    let cert = GdimCertificate::Filtration { ring: ring.content_hash(), first: Box::new(first), steps };
    let m = cert.verify(ring)?;
    Ok((m, cert))
}

/// Span in `R1` of the degree-one entries of a minimal presentation matrix.
pub fn fitting_degree1(ring: &GradedAlgebra, m: &GradedModule) -> Subspace {
    let field = ring.field();
    let res = minimal_resolution(ring, m, 1);
    let mut vecs = Vec::new();
    if res.len() > 1 {
        for e in res.differential(1).entries() {
            if e.degree() == 1 && !e.is_zero() {
                vecs.push(e.coords().to_vec());
            }
        }
    }
    Subspace::from_vectors(field, ring.dim1(), &vecs)
}

/// `End_R(M)` with its multiplication table in a basis of graded maps.
#[derive(Clone, Debug)]
pub struct EndoAlgebra {
    field: PrimeField,
    basis: Vec<ModuleMap>,
    /// `mult[(i * dim + j) * dim + k]`: coefficient of `b_k` in `b_i b_j`
    /// (`b_j` applied first).
    mult: Vec<u32>,
    identity: Vec<u32>,
}

impl EndoAlgebra {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }
    pub fn basis(&self) -> &[ModuleMap] {
        &self.basis
    }
    pub fn identity(&self) -> &[u32] {
        &self.identity
    }
    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> u32 {
        let d = self.dim();
        self.mult[(i * d + j) * d + k]
    }

    /// Product of two elements in basis coordinates.
    pub fn mul(&self, a: &[u32], b: &[u32]) -> Vec<u32> {
        let d = self.dim();
        let f = self.field;
        let mut out = vec![0u32; d];
        for (i, &ai) in a.iter().enumerate().filter(|(_, &c)| c != 0) {
            for (j, &bj) in b.iter().enumerate().filter(|(_, &c)| c != 0) {
                let c = f.mul(ai, bj);
                f.axpy(c, &self.mult[(i * d + j) * d..(i * d + j + 1) * d], &mut out);
            }
        }
        out
    }

    /// Jacobson radical as the kernel of the trace form
    /// `(a, b) -> tr(L_{ab})`; exact when `p > dim`.
    pub fn radical(&self) -> Result<Subspace> {
        let d = self.dim();
        let f = self.field;
        if f.p() as usize <= d {
            return Err(Error::FieldTooSmall { p: f.p(), dim: d });
        }
        // tr(L_{b_l}) = sum_k coefficient of b_k in b_l b_k
        let traces: Vec<u32> =
            (0..d).map(|l| (0..d).fold(0u32, |acc, k| f.add(acc, self.structure_constant(l, k, k)))).collect();
        let mut gram = FMatrix::zeros(f, d, d);
        for i in 0..d {
            for j in 0..d {
                let row = &self.mult[(i * d + j) * d..(i * d + j + 1) * d];
                gram.set(j, i, f.dot(row, &traces));
            }
        }
        Ok(kernel_basis(&gram))
    }

    /// Local iff the radical has codimension one.
    pub fn is_local(&self) -> Result<bool> {
        Ok(self.dim() > 0 && self.radical()?.dim() + 1 == self.dim())
    }
}

fn compose_coords(hom: &HomSpace, g: &ModuleMap, h: &ModuleMap, m: &GradedModule) -> Result<Vec<u32>> {
    let comp = h.then(g, m);
    let d: usize = hom.dim();
    if comp.blocks().values().all(|b| b.is_zero()) {
        return Ok(vec![0; d]);
    }
    let local = hom.coords(&comp).ok_or_else(|| Error::Construction("composite left the Hom space".into()))?;
    // place degree-local coordinates into the global basis order
    let mut out = vec![0u32; d];
    let mut offset = 0;
    for (&e, &n) in &hom.graded_dims() {
        if e == comp.degree() {
            out[offset..offset + n].copy_from_slice(&local);
            break;
        }
        offset += n;
    }
    Ok(out)
}

/// `End_R(M)` with composition.
pub fn endomorphism_algebra(ring: &GradedAlgebra, m: &GradedModule) -> Result<EndoAlgebra> {
    let field = ring.field();
    let hom = hom_space(ring, m, m)?;
    let basis = hom.basis();
    let d = basis.len();
    let mut mult = vec![0u32; d * d * d];
    for i in 0..d {
        for j in 0..d {
            let c = compose_coords(&hom, &basis[i], &basis[j], m)?;
            mult[(i * d + j) * d..(i * d + j + 1) * d].copy_from_slice(&c);
        }
    }
    let identity = compose_coords(&hom, &ModuleMap::identity(m), &ModuleMap::identity(m), m)?;
    Ok(EndoAlgebra { field, basis, mult, identity })
}

/// Exact isomorphism test for a module `m` with local endomorphism ring:
/// `m` is isomorphic to `n` iff the lengths agree and some composite
/// `g f` of degree-zero maps is outside the radical of `End(m)`.
pub fn isomorphic_to_local(ring: &GradedAlgebra, m: &GradedModule, n: &GradedModule) -> Result<bool> {
    if m.hilbert() != n.hilbert() {
        return Ok(false);
    }
    let end = endomorphism_algebra(ring, m)?;
    if !end.is_local()? {
        return Err(Error::Input("endomorphism ring of the first module is not local".into()));
    }
    let rad = end.radical()?;
    let hom_end = hom_space(ring, m, m)?;
    let fs = hom_space(ring, m, n)?.basis_at(0);
    let gs = hom_space(ring, n, m)?.basis_at(0);
    for f in &fs {
        for g in &gs {
            let c = compose_coords(&hom_end, g, f, n)?;
            if !rad.contains(&c) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Seeded sample of `count` points `x` (minimal reductions of `S`) whose
/// planes `span{x, z}` are pairwise distinct and avoid `[z]`.
pub fn sample_family_points(h: &Hypersurface, z: &[u32], count: usize, seed: u64) -> Result<Vec<Vec<u32>>> {
    let field = h.ring.field();
    let dim1 = h.ring.dim1();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out: Vec<Vec<u32>> = Vec::new();
    while out.len() < count {
        let taken = out.clone();
        let x = h.sample_reduction(&mut rng, |x| {
            let with_z = Subspace::from_vectors(field, dim1, &[x.to_vec(), z.to_vec()]);
            with_z.dim() == 2
                && taken.iter().all(|p| Subspace::from_vectors(field, dim1, &[p.clone(), z.to_vec()]) != with_z)
        })?;
        out.push(Element::linear(x).projective_normal(field).coords().to_vec());
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepEntry {
    pub index: usize,
    pub x: Vec<u32>,
    pub n: usize,
    pub dims: Vec<usize>,
    pub generators: usize,
    pub fitting_dim: usize,
    pub local: bool,
    pub certificate: String,
    pub certificate_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepPair {
    pub a: usize,
    pub b: usize,
    pub isomorphic: bool,
    pub witness: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub z: Vec<u32>,
    pub duplicates: Vec<(usize, usize)>,
    pub entries: Vec<SweepEntry>,
    pub pairs: Vec<SweepPair>,
}

impl SweepReport {
    pub fn all_distinct(&self) -> bool {
        self.pairs.iter().all(|p| !p.isomorphic)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("a,b,isomorphic,witness\n");
        for p in &self.pairs {
            s.push_str(&format!("{},{},{},{}\n", p.a, p.b, p.isomorphic, p.witness));
        }
        s
    }
}

/// Builds `M([x], n)` for every `x` and `n`, then separates each pair by
/// generator count, then by the Fitting subspace, then by the exact
/// isomorphism test.
pub fn pairwise_noniso_sweep(h: &Hypersurface, xs: &[Vec<u32>], ns: &[usize], z: &[u32]) -> Result<SweepReport> {
    let ring = &h.ring;
    let field = ring.field();
    let normal: Vec<Vec<u32>> =
        xs.iter().map(|x| Element::linear(x.clone()).projective_normal(field).coords().to_vec()).collect();
    let mut duplicates = Vec::new();
    for i in 0..normal.len() {
        for j in i + 1..normal.len() {
            if normal[i] == normal[j] {
                duplicates.push((i, j));
            }
        }
    }
    let mut entries = Vec::new();
    let mut modules = Vec::new();
    let mut fittings = Vec::new();
    let mut keys = Vec::new();
    for x in &normal {
        for &n in ns {
            let spec = FamilySpec { x: x.clone(), z: z.to_vec(), n };
            let (m, cert) = family_module(h, &spec)?;
            let fit = fitting_degree1(ring, &m);
            let local = endomorphism_algebra(ring, &m)?.is_local()?;
            entries.push(SweepEntry {
                index: entries.len(),
                x: x.clone(),
                n,
                dims: m.dims().to_vec(),
                generators: minimal_generators(&m).0,
                fitting_dim: fit.dim(),
                local,
                certificate: cert.kind().to_string(),
                certificate_ok: cert.verify(ring).is_ok(),
            });
            keys.push((x.clone(), n));
            modules.push(m);
            fittings.push(fit);
        }
    }
    let mut pairs = Vec::new();
    for a in 0..modules.len() {
        for b in a + 1..modules.len() {
            let (isomorphic, witness) = if keys[a] == keys[b] {
                (true, "identical data".to_string())
            } else if entries[a].generators != entries[b].generators {
                (false, format!("generators {} vs {}", entries[a].generators, entries[b].generators))
            } else if fittings[a] != fittings[b] {
                (false, "fitting subspaces differ".to_string())
            } else {
                let iso = isomorphic_to_local(ring, &modules[a], &modules[b])?;
                (iso, "exact isomorphism test".to_string())
            };
            pairs.push(SweepPair { a, b, isomorphic, witness });
        }
    }
    Ok(SweepReport { z: z.to_vec(), duplicates, entries, pairs })
}

/// The Veliche ring with `M = coker(d1)`, certified by the 2-periodic
/// complex `d1 = [[z, x], [w, y]]`, `d2 = [[y, -x], [-w, z]]`.
pub fn veliche_fixture(field: PrimeField) -> Result<(GradedAlgebra, GradedModule, GdimCertificate)> {
    let ring = veliche_ring(field)?;
    let var = |i: usize, c: u32| {
        let mut v = vec![0u32; 4];
        v[i] = c;
        Element::linear(v)
    };
    let m1 = field.neg(1);
    let (x, y, z, w) = (0, 1, 2, 3);
    let d1 = ElementMatrix::new(2, 2, vec![var(z, 1), var(x, 1), var(w, 1), var(y, 1)])?;
    let d2 = ElementMatrix::new(2, 2, vec![var(y, 1), var(x, m1), var(w, m1), var(z, 1)])?;
    let (cert, m) = verify_periodic_cr(&ring, &[d1, d2])?;
    Ok((ring, m, cert))
}

/// First basis vector of `R1` independent from `x`.
pub fn default_z(dim1: usize, field: PrimeField, x: &[u32]) -> Vec<u32> {
    (0..dim1)
        .map(|i| {
            let mut e = vec![0u32; dim1];
            e[i] = 1;
            e
        })
        .find(|e| Subspace::from_vectors(field, dim1, &[x.to_vec(), e.clone()]).dim() == 2)
        .expect("dim R1 >= 2")
}

/// Degree-zero part of `End(M)` as a map count per degree, for reports.
pub fn endomorphism_degrees(ring: &GradedAlgebra, m: &GradedModule) -> Result<BTreeMap<i32, usize>> {
    Ok(hom_space(ring, m, m)?.graded_dims())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_circulant_ring;
    use crate::gmodule::free_module;

    fn fld() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    #[test]
    fn one_pair_by_hand() {
        let s = build_circulant_ring(fld(), 2).unwrap();
        let x = Element::linear(vec![1, 0, 0]);
        let y = Element::linear(vec![0, 1, 0]);
        let mf = exterior_phi_psi(&s, &[(x.clone(), y.clone())], Contraction::Alternating).unwrap();
        // basis {1, e1}: phi(e1) = x, psi(1) = y e1
        assert_eq!(mf.phi.get(0, 1), &x);
        assert!(mf.phi.get(1, 0).is_zero() && mf.phi.get(0, 0).is_zero());
        assert_eq!(mf.psi.get(1, 0), &y);
        assert!(mf.psi.get(0, 1).is_zero());
        assert_eq!(mf.f, s.mul(&x, &y).unwrap());
        // both conventions agree for one pair
        assert!(exterior_phi_psi(&s, &[(x, y)], Contraction::Unsigned).is_ok());
    }

    #[test]
    fn unsigned_contraction_is_rejected_for_two_pairs() {
        let s = build_circulant_ring(fld(), 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let pairs = random_pairs(&s, 2, &mut rng);
        assert!(exterior_phi_psi(&s, &pairs, Contraction::Alternating).is_ok());
        assert!(matches!(exterior_phi_psi(&s, &pairs, Contraction::Unsigned), Err(Error::Construction(_))));
    }

    #[test]
    fn named_split_quadric() {
        // f = x0 x1 + x2 x2 over the r = 2 circulant ring
        let s = build_circulant_ring(fld(), 2).unwrap();
        let e = |i: usize| {
            let mut v = vec![0; 3];
            v[i] = 1;
            Element::linear(v)
        };
        let mf = exterior_phi_psi(&s, &[(e(0), e(1)), (e(2), e(2))], Contraction::Alternating).unwrap();
        assert_eq!(mf.phi.rows(), 4);
        assert!(exterior_phi_psi(&s, &[], Contraction::Alternating).unwrap_err().is_input_error());
    }

    #[test]
    fn mf_module_hilbert() {
        for (r, n) in [(2, 1), (2, 2), (3, 2)] {
            let s = build_circulant_ring(fld(), r).unwrap();
            let mf = random_matrix_factorization(&s, n, 9).unwrap();
            assert_eq!(mf.module.dims(), &[1 << n, (1 << n) * r]);
            assert_eq!(mf.certificate.verify(&mf.hypersurface.ring).unwrap(), mf.module);
        }
    }

    fn family_setup() -> (Hypersurface, Vec<Vec<u32>>, Vec<u32>) {
        let h = Hypersurface::circulant(fld(), 2, 42).unwrap();
        let z = vec![1, 0, 0];
        let xs = sample_family_points(&h, &z, 3, 42).unwrap();
        (h, xs, z)
    }

    #[test]
    fn family_modules() {
        let (h, xs, z) = family_setup();
        for n in 1..=3 {
            let spec = FamilySpec { x: xs[0].clone(), z: z.clone(), n };
            let (m, cert) = family_module(&h, &spec).unwrap();
            assert_eq!(m.dims(), &[n, 2 * n]);
            assert_eq!(cert.kind(), "Filtration");
            assert_eq!(minimal_generators(&m).0, n);
            assert_eq!(fitting_degree1(&h.ring, &m).dim(), if n == 1 { 1 } else { 2 });
            let end = endomorphism_algebra(&h.ring, &m).unwrap();
            assert!(end.is_local().unwrap());
            assert_eq!(hom_space(&h.ring, &m, &m).unwrap().dim_at(0), n);
        }
        let bad = FamilySpec { x: xs[0].clone(), z: xs[0].clone(), n: 2 };
        assert!(family_module(&h, &bad).unwrap_err().is_input_error());
    }

    #[test]
    fn free_modules_are_not_local_and_have_no_fitting_entries() {
        let h = Hypersurface::circulant(fld(), 2, 1).unwrap();
        let r2 = free_module(&h.ring, &[0, 0]);
        assert!(!endomorphism_algebra(&h.ring, &r2).unwrap().is_local().unwrap());
        assert_eq!(fitting_degree1(&h.ring, &r2).dim(), 0);
        let small = PrimeField::new(3).unwrap();
        let h3 = Hypersurface::circulant(small, 2, 1);
        if let Ok(h3) = h3 {
            let e = endomorphism_algebra(&h3.ring, &free_module(&h3.ring, &[0, 0])).unwrap();
            assert!(matches!(e.radical(), Err(Error::FieldTooSmall { .. })));
        }
    }

    #[test]
    fn sweep_separates_and_flags_duplicates() {
        let (h, xs, z) = family_setup();
        let rep = pairwise_noniso_sweep(&h, &xs[..2], &[1, 2], &z).unwrap();
        assert_eq!(rep.entries.len(), 4);
        assert!(rep.all_distinct());
        let scaled: Vec<u32> = xs[0].iter().map(|&c| h.ring.field().mul(c, 5)).collect();
        let rep = pairwise_noniso_sweep(&h, &[xs[0].clone(), scaled], &[2], &z).unwrap();
        assert_eq!(rep.duplicates, vec![(0, 1)]);
        assert!(rep.pairs[0].isomorphic);
    }

    #[test]
    fn veliche_module_is_certified() {
        let (ring, m, cert) = veliche_fixture(fld()).unwrap();
        assert_eq!(ring.hilbert_coeffs(), [1, 4, 3]);
        assert_eq!(m.dims(), &[2, 6]);
        assert_eq!(cert.kind(), "PeriodicCR");
        let rep = crate::gdim::verify_theorem31(&ring, &m, &cert, 3);
        assert!(rep.all_ok(), "{rep:?}");
        assert_eq!((rep.r, rep.b), (3, 2));
    }

    #[test]
    fn exact_iso_test() {
        let (h, xs, z) = family_setup();
        let m = family_module(&h, &FamilySpec { x: xs[0].clone(), z: z.clone(), n: 2 }).unwrap().0;
        let n = family_module(&h, &FamilySpec { x: xs[1].clone(), z: z.clone(), n: 2 }).unwrap().0;
        assert!(isomorphic_to_local(&h.ring, &m, &m).unwrap());
        assert!(!isomorphic_to_local(&h.ring, &m, &n).unwrap());
    }
}
