//! Evidence that a module has G-dimension zero.
//!
//! Three kinds of certificate are exact: a 1- or 2-periodic complete
//! resolution, an extension of two certified modules, and a filtration whose
//! subquotients are certified. The fourth kind, [`BoundedExtReport`], only
//! checks reflexivity and vanishing of Ext up to a fixed homological degree.

use serde::{Deserialize, Serialize};

use crate::algebra::{Element, GradedAlgebra};
use crate::error::{Error, Result};
use crate::exactla::{image_basis, kernel_basis, FMatrix, Subspace};
use crate::gmodule::{
    coker, free_module, is_free, maximal_ideal_times, minimal_generators, minimal_resolution, ElementMatrix,
    GradedModule, ModuleMap, Presentation,
};
use crate::homology::{bass_numbers, bidual_check, dual, ext, koszul_check, ExtReport};

/// `0 -> sub -> middle -> quotient -> 0` with its two maps.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShortExactSequence {
    pub sub: GradedModule,
    pub middle: GradedModule,
    pub quotient: GradedModule,
    pub inclusion: ModuleMap,
    pub projection: ModuleMap,
}

impl ShortExactSequence {
    /// Checks that both maps are homomorphisms of degree zero and that the
    /// sequence is exact in every degree.
    pub fn check(&self, ring: &GradedAlgebra) -> Result<()> {
        let (a, e, b) = (&self.sub, &self.middle, &self.quotient);
        if self.inclusion.degree() != 0 || self.projection.degree() != 0 {
            return Err(Error::Input("sequence maps must preserve degree".into()));
        }
        if !self.inclusion.is_homomorphism(a, e, ring) {
            return Err(Error::Input("first map is not a homomorphism".into()));
        }
        if !self.projection.is_homomorphism(e, b, ring) {
            return Err(Error::Input("second map is not a homomorphism".into()));
        }
        if !self.inclusion.is_injective(a) {
            return Err(Error::Input("first map is not injective".into()));
        }
        if !self.projection.is_surjective(b) {
            return Err(Error::Input("second map is not surjective".into()));
        }
        for (d, n) in e.hilbert() {
            let i = self.inclusion.block(a, e, d);
            let p = self.projection.block(e, b, d);
            if !p.mul_unchecked(&i).is_zero() {
                return Err(Error::Input(format!("composite is nonzero in degree {d}")));
            }
            if i.rank() + p.rank() != n {
                return Err(Error::Input(format!("kernel differs from image in degree {d}")));
            }
        }
        Ok(())
    }
}

/// One step `0 -> M_{i-1} -> M_i -> Q_i -> 0` of a filtration.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FiltrationStep {
    pub quotient: GdimCertificate,
    pub ses: ShortExactSequence,
}

/// Result of the bounded check: reflexivity plus `Ext^i(M, R) = 0` and
/// `Ext^i(M*, R) = 0` for `1 <= i <= n`. A semi-decision only.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundedExtReport {
    pub n: usize,
    pub semi_decision: bool,
    pub bidual_iso: bool,
    pub ext_module: ExtReport,
    pub ext_dual: ExtReport,
    pub passed: bool,
    pub first_failure: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
#[serde(tag = "kind")]
pub enum GdimCertificate {
    PeriodicCR { ring: String, matrices: Vec<ElementMatrix> },
    Extension { ring: String, sub: Box<GdimCertificate>, quotient: Box<GdimCertificate>, ses: ShortExactSequence },
    Filtration { ring: String, first: Box<GdimCertificate>, steps: Vec<FiltrationStep> },
    BoundedExt { ring: String, module: GradedModule, report: BoundedExtReport },
}

impl GdimCertificate {
    pub fn kind(&self) -> &'static str {
        match self {
            GdimCertificate::PeriodicCR { .. } => "PeriodicCR",
            GdimCertificate::Extension { .. } => "Extension",
            GdimCertificate::Filtration { .. } => "Filtration",
            GdimCertificate::BoundedExt { .. } => "BoundedExt",
        }
    }

    /// Exact proofs, as opposed to the bounded semi-decision.
    pub fn is_exact(&self) -> bool {
        !matches!(self, GdimCertificate::BoundedExt { .. })
    }

    pub fn ring_hash(&self) -> &str {
        match self {
            GdimCertificate::PeriodicCR { ring, .. }
            | GdimCertificate::Extension { ring, .. }
            | GdimCertificate::Filtration { ring, .. }
            | GdimCertificate::BoundedExt { ring, .. } => ring,
        }
    }

    /// Re-runs every check and returns the certified module.
    pub fn verify(&self, ring: &GradedAlgebra) -> Result<GradedModule> {
        if self.ring_hash() != ring.content_hash() {
            return Err(Error::Input("certificate refers to a different ring".into()));
        }
        match self {
            GdimCertificate::PeriodicCR { matrices, .. } => Ok(verify_periodic_cr(ring, matrices)?.1),
            GdimCertificate::Extension { sub, quotient, ses, .. } => {
                let a = sub.verify(ring)?;
                let b = quotient.verify(ring)?;
                check_extension(ring, &a, &b, ses)?;
                Ok(ses.middle.clone())
            }
            GdimCertificate::Filtration { first, steps, .. } => {
                let mut current = first.verify(ring)?;
                for (i, step) in steps.iter().enumerate() {
                    let q = step.quotient.verify(ring)?;
                    check_extension(ring, &current, &q, &step.ses)
                        .map_err(|e| Error::CertificateRejected(format!("filtration step {}: {e}", i + 1)))?;
                    current = step.ses.middle.clone();
                }
                Ok(current)
            }
            GdimCertificate::BoundedExt { module, report, .. } => {
                module.validate(ring)?;
                let fresh = bounded_report(ring, module, report.n)?;
                if &fresh != report {
                    return Err(Error::CertificateRejected("stored bounded report does not reproduce".into()));
                }
                if !fresh.passed {
                    return Err(Error::CertificateRejected(
                        fresh.first_failure.unwrap_or_else(|| "bounded check failed".into()),
                    ));
                }
                Ok(module.clone())
            }
        }
    }
}

fn check_extension(ring: &GradedAlgebra, a: &GradedModule, b: &GradedModule, ses: &ShortExactSequence) -> Result<()> {
    if &ses.sub != a {
        return Err(Error::Input("submodule differs from the module certified for it".into()));
    }
    if &ses.quotient != b {
        return Err(Error::Input("quotient differs from the module certified for it".into()));
    }
    ses.check(ring)
}

/// Kernel equals image in each degree of `R^m`, for maps given by matrices
/// of linear forms: `ker(a) = im(b)` where `b` feeds into `a`.
fn exact_at(ring: &GradedAlgebra, a: &ElementMatrix, b: &ElementMatrix) -> Option<i32> {
    for j in 0..=2 {
        let ker = kernel_basis(&a.degree_piece(ring, j));
        let im = if j == 0 {
            Subspace::zero(ring.field(), ker.ambient_dim())
        } else {
            image_basis(&b.degree_piece(ring, j - 1))
        };
        if ker != im {
            return Some(j);
        }
    }
    None
}

/// Verifies a 1-periodic (`[d]`) or 2-periodic (`[d1, d2]`) complete
/// resolution by free modules, and its dual, and returns `coker(d1)`.
pub fn verify_periodic_cr(ring: &GradedAlgebra, matrices: &[ElementMatrix]) -> Result<(GdimCertificate, GradedModule)> {
    let (d1, d2) = match matrices {
        [d] => (d, d),
        [d1, d2] => (d1, d2),
        _ => return Err(Error::Input("a periodic certificate has one or two matrices".into())),
    };
    for d in [d1, d2] {
        if !d.is_homogeneous_of_degree(ring, 1) {
            return Err(Error::Input("periodic certificate entries must be linear forms".into()));
        }
    }
    if d1.cols() != d2.rows() || d2.cols() != d1.rows() {
        return Err(Error::Dimension("periodic matrices do not compose".into()));
    }
    if !d1.mul(d2, ring)?.is_zero() || !d2.mul(d1, ring)?.is_zero() {
        return Err(Error::NotAComplex("consecutive maps do not compose to zero".into()));
    }
    let (t1, t2) = (d1.transpose(), d2.transpose());
    let checks = [
        (d1, d2, "ker d1 = im d2"),
        (d2, d1, "ker d2 = im d1"),
        (&t2, &t1, "ker d2^T = im d1^T"),
        (&t1, &t2, "ker d1^T = im d2^T"),
    ];
    for (a, b, what) in checks {
        if let Some(j) = exact_at(ring, a, b) {
            return Err(Error::CertificateRejected(format!("{what} fails in degree {j}")));
        }
    }
    let m = coker(ring, &Presentation::linear(d1.clone()))?.module;
    let cert = GdimCertificate::PeriodicCR { ring: ring.content_hash(), matrices: matrices.to_vec() };
    Ok((cert, m))
}

/// Certificate for `R/xR`: the 2-periodic resolution by `x` and a generator
/// `y` of its annihilator in degree one, or the 1-periodic one when `y` is
/// proportional to `x`.
pub fn cyclic_quotient_certificate(ring: &GradedAlgebra, x: &[u32]) -> Result<(GdimCertificate, GradedModule)> {
    if x.len() != ring.dim1() {
        return Err(Error::Dimension("x must lie in R1".into()));
    }
    if !ring.is_minimal_reduction(x) {
        return Err(Error::Input("x is not a minimal reduction".into()));
    }
    let ann = kernel_basis(&ring.mul_by_linear(x));
    if ann.dim() != 1 {
        return Err(Error::Input(format!("annihilator of x in R1 has dimension {}, expected 1", ann.dim())));
    }
    let y = ann.vectors().remove(0);
    let dx = ElementMatrix::new(1, 1, vec![Element::linear(x.to_vec())])?;
    let dy = ElementMatrix::new(1, 1, vec![Element::linear(y.clone())])?;
    let proportional = Subspace::from_vectors(ring.field(), ring.dim1(), &[x.to_vec(), y]).dim() == 1;
    if proportional {
        verify_periodic_cr(ring, &[dx])
    } else {
        verify_periodic_cr(ring, &[dx, dy])
    }
}

/// Extension certificate for `ses.middle` from certificates of its ends.
pub fn verify_extension(
    ring: &GradedAlgebra,
    sub_cert: &GdimCertificate,
    quotient_cert: &GdimCertificate,
    ses: ShortExactSequence,
) -> Result<GdimCertificate> {
    let a = sub_cert.verify(ring)?;
    let b = quotient_cert.verify(ring)?;
    check_extension(ring, &a, &b, &ses)?;
    Ok(GdimCertificate::Extension {
        ring: ring.content_hash(),
        sub: Box::new(sub_cert.clone()),
        quotient: Box::new(quotient_cert.clone()),
        ses,
    })
}

/// Split sequence `0 -> A -> A + B -> B -> 0`.
pub fn split_sequence(a: &GradedModule, b: &GradedModule) -> Result<ShortExactSequence> {
    let middle = a.direct_sum(b)?;
    let f = a.field();
    let mut inc = std::collections::BTreeMap::new();
    for (d, n) in a.hilbert() {
        let mut m = FMatrix::zeros(f, middle.dim(d), n);
        for i in 0..n {
            m.set(i, i, 1);
        }
        inc.insert(d, m);
    }
    let mut proj = std::collections::BTreeMap::new();
    for (d, n) in middle.hilbert() {
        let mut m = FMatrix::zeros(f, b.dim(d), n);
        for i in 0..b.dim(d) {
            m.set(i, a.dim(d) + i, 1);
        }
        proj.insert(d, m);
    }
    Ok(ShortExactSequence {
        sub: a.clone(),
        middle,
        quotient: b.clone(),
        inclusion: ModuleMap::new(0, inc),
        projection: ModuleMap::new(0, proj),
    })
}

fn bounded_report(ring: &GradedAlgebra, m: &GradedModule, n: usize) -> Result<BoundedExtReport> {
    let r = free_module(ring, &[0]);
    let (bidual_iso, _) = bidual_check(ring, m)?;
    let ext_module = ext(ring, m, &r, n)?;
    let mstar = dual(ring, m)?;
    let ext_dual = ext(ring, &mstar, &r, n)?;
    let first_failure = if !bidual_iso {
        Some("bidual map is not an isomorphism".to_string())
    } else if let Some(i) = ext_module.first_nonvanishing() {
        Some(format!("Ext^{i}(M, R) has dimension {}", ext_module.total(i)))
    } else {
        ext_dual.first_nonvanishing().map(|i| format!("Ext^{i}(M*, R) has dimension {}", ext_dual.total(i)))
    };
    Ok(BoundedExtReport {
        n,
        semi_decision: true,
        bidual_iso,
        passed: first_failure.is_none(),
        first_failure,
        ext_module,
        ext_dual,
    })
}

/// Bounded evidence: reflexivity and vanishing of `Ext^i(M, R)` and
/// `Ext^i(M*, R)` for `1 <= i <= n`. Never an error for a negative answer.
pub fn check_gdim_zero_bounded(ring: &GradedAlgebra, m: &GradedModule, n: usize) -> Result<GdimCertificate> {
    m.validate(ring)?;
    let report = bounded_report(ring, m, n)?;
    Ok(GdimCertificate::BoundedExt { ring: ring.content_hash(), module: m.clone(), report })
}

/// Each conclusion about a good ring and a nonfree module of G-dimension
/// zero, with the numbers behind it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Theorem31Report {
    pub n: usize,
    pub r: usize,
    pub certificate_ok: bool,
    pub nonfree: bool,
    pub hilbert: [usize; 3],
    pub hilbert_ok: bool,
    pub socle_dim: usize,
    pub socle_ok: bool,
    pub module_dims: Vec<usize>,
    pub b: usize,
    pub a: usize,
    pub module_shape_ok: bool,
    pub a_eq_rb: bool,
    pub length: usize,
    pub dual_length: usize,
    pub dual_length_ok: bool,
    pub betti_diagonal: Vec<usize>,
    pub linear_resolution_ok: bool,
    pub bass: Vec<usize>,
    pub bass_expected: Vec<usize>,
    pub bass_ok: bool,
    pub koszul_diagonal: Vec<usize>,
    pub koszul_expected: Vec<usize>,
    pub koszul_ok: bool,
}

impl Theorem31Report {
    pub fn all_ok(&self) -> bool {
        self.certificate_ok
            && self.nonfree
            && self.hilbert_ok
            && self.socle_ok
            && self.module_shape_ok
            && self.a_eq_rb
            && self.dual_length_ok
            && self.linear_resolution_ok
            && self.bass_ok
            && self.koszul_ok
    }
}

/// `mu_0 = r`, `mu_i = r^{i-1}(r^2 - 1)`.
pub fn expected_bass(r: usize, n: usize) -> Vec<usize> {
    (0..=n).map(|i| if i == 0 { r } else { r.pow(i as u32 - 1) * (r * r - 1) }).collect()
}

/// `1 + r + ... + r^i`.
pub fn expected_koszul_betti(r: usize, n: usize) -> Vec<usize> {
    (0..=n).map(|i| (0..=i as u32).map(|k| r.pow(k)).sum()).collect()
}

pub fn verify_theorem31(ring: &GradedAlgebra, m: &GradedModule, cert: &GdimCertificate, n: usize) -> Theorem31Report {
    let hilbert = ring.hilbert_coeffs();
    let r = hilbert[2];
    let certificate_ok = cert.verify(ring).map(|c| &c == m).unwrap_or(false);
    let nonfree = !is_free(ring, m);
    let socle = ring.socle();
    let socle_ok = socle == ring.top_piece();
    let (b, _) = minimal_generators(m);
    let a: usize = maximal_ideal_times(ring, m).values().map(|s| s.dim()).sum();
    let module_dims = m.dims().to_vec();
    let length = m.length();
    let dual_length = dual(ring, m).map(|d| d.length()).unwrap_or(usize::MAX);
    let res = minimal_resolution(ring, m, n);
    let betti_diagonal = res.betti().diagonal(m.base_degree());
    let linear_resolution_ok = res.betti().is_linear(m.base_degree()) && betti_diagonal.iter().all(|&x| x == b);
    let bass = bass_numbers(ring, n);
    let bass_expected = expected_bass(r, n);
    let (koszul, kb) = koszul_check(ring, n);
    let koszul_diagonal = kb.diagonal(0);
    let koszul_expected = expected_koszul_betti(r, n);
    Theorem31Report {
        n,
        r,
        certificate_ok,
        nonfree,
        hilbert,
        hilbert_ok: r >= 1 && hilbert == [1, r + 1, r],
        socle_dim: socle.dim(),
        socle_ok,
        b,
        a,
        module_shape_ok: module_dims == vec![b, r * b],
        a_eq_rb: a == r * b,
        module_dims,
        length,
        dual_length,
        dual_length_ok: dual_length == length,
        betti_diagonal,
        linear_resolution_ok,
        bass_ok: bass == bass_expected,
        bass,
        bass_expected,
        koszul_ok: koszul && koszul_diagonal == koszul_expected,
        koszul_diagonal,
        koszul_expected,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Hypersurface;
    use crate::exactla::PrimeField;
    use crate::gmodule::residue_field;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn fld() -> PrimeField {
        PrimeField::new(101).unwrap()
    }

    fn hyp(r: usize) -> Hypersurface {
        Hypersurface::circulant(fld(), r, 5).unwrap()
    }

    fn good_ring(r: usize) -> GradedAlgebra {
        hyp(r).ring
    }

    fn reduction(r: &GradedAlgebra, seed: u64) -> Vec<u32> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let h = hyp(r.dim2());
        assert_eq!(&h.ring, r);
        h.sample_reduction(&mut rng, |_| true).unwrap()
    }

    #[test]
    fn zero_matrix_is_rejected() {
        let r = good_ring(2);
        let d = ElementMatrix::new(1, 1, vec![Element::linear(vec![0, 0, 0])]).unwrap();
        assert!(matches!(verify_periodic_cr(&r, &[d]), Err(Error::CertificateRejected(_))));
    }

    #[test]
    fn non_complex_is_rejected() {
        let r = good_ring(2);
        let d = ElementMatrix::new(1, 1, vec![Element::linear(vec![1, 2, 3])]).unwrap();
        assert!(matches!(verify_periodic_cr(&r, &[d]), Err(Error::NotAComplex(_))));
    }

    #[test]
    fn cyclic_quotient_is_certified() {
        let r = good_ring(2);
        let x = reduction(&r, 7);
        let (cert, m) = cyclic_quotient_certificate(&r, &x).unwrap();
        assert_eq!(m.dims(), &[1, 2]);
        assert_eq!(cert.verify(&r).unwrap(), m);
        let bounded = check_gdim_zero_bounded(&r, &m, 4).unwrap();
        assert!(bounded.verify(&r).is_ok());
    }

    #[test]
    fn residue_field_fails_bounded_check() {
        let r = good_ring(2);
        let cert = check_gdim_zero_bounded(&r, &residue_field(&r, 0), 3).unwrap();
        let GdimCertificate::BoundedExt { report, .. } = &cert else { unreachable!() };
        assert!(!report.passed);
        assert!(!report.bidual_iso);
        assert_eq!(report.ext_module.total(1), 3);
        assert!(matches!(cert.verify(&r), Err(Error::CertificateRejected(_))));
    }

    #[test]
    fn free_modules_pass_bounded_check() {
        let r = good_ring(2);
        let cert = check_gdim_zero_bounded(&r, &free_module(&r, &[0; 5]), 3).unwrap();
        assert!(cert.verify(&r).is_ok());
    }

    #[test]
    fn split_extension() {
        let r = good_ring(2);
        let x = reduction(&r, 3);
        let (c, m) = cyclic_quotient_certificate(&r, &x).unwrap();
        let ses = split_sequence(&m, &m).unwrap();
        let ext_cert = verify_extension(&r, &c, &c, ses.clone()).unwrap();
        assert_eq!(ext_cert.verify(&r).unwrap().dims(), &[2, 4]);
        let mut broken = ses;
        broken.projection = ModuleMap::zero(&broken.middle, &broken.quotient, 0);
        assert!(verify_extension(&r, &c, &c, broken).unwrap_err().is_input_error());
    }

    #[test]
    fn certificate_json_roundtrip() {
        let r = good_ring(3);
        let x = reduction(&r, 1);
        let (c, m) = cyclic_quotient_certificate(&r, &x).unwrap();
        let s = serde_json::to_string(&c).unwrap();
        assert!(s.contains("\"kind\":\"PeriodicCR\""));
        let back: GdimCertificate = serde_json::from_str(&s).unwrap();
        assert_eq!(back.verify(&r).unwrap(), m);
        assert!(back.verify(&good_ring(2)).is_err());
    }

    #[test]
    fn theorem31_on_cyclic_quotient() {
        let r = good_ring(2);
        let x = reduction(&r, 11);
        let (c, m) = cyclic_quotient_certificate(&r, &x).unwrap();
        let rep = verify_theorem31(&r, &m, &c, 5);
        assert!(rep.all_ok(), "{rep:?}");
        let free = free_module(&r, &[0]);
        let rep = verify_theorem31(&r, &free, &c, 2);
        assert!(!rep.nonfree && !rep.all_ok());
    }
}
