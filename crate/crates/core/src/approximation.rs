//! Approximations of the residue field by modules of G-dimension zero over
//! `R = S / x^2 S`: the Ext^1 test, the exactness forced on the kernel, and
//! the dimension count that rules every candidate out.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::algebra::{DegreeTwoRingData, Element, GradedAlgebra, Hypersurface};
use crate::constructions::{default_z, family_module, matrix_factorization_module, FamilySpec};
use crate::error::{Error, Result};
use crate::exactla::{image_basis, kernel_basis, FMatrix, PivotBasis};
use crate::gdim::{cyclic_quotient_certificate, GdimCertificate, ShortExactSequence};
use crate::gmodule::{residue_field, submodule_to_module, GradedModule, ModuleMap};
use crate::homology::ext;

/// `R = S / x^2 S` for a minimal reduction `x` of `S`.
pub fn build_r_from_reduction(s: &DegreeTwoRingData, x: &[u32]) -> Result<Hypersurface> {
    if x.len() != s.dim_s1() {
        return Err(Error::Dimension("x must lie in S1".into()));
    }
    if !s.as_algebra().is_minimal_reduction(x) {
        return Err(Error::Input("x is not a minimal reduction of S".into()));
    }
    let xe = Element::linear(x.to_vec());
    let f = s.mul(&xe, &xe)?;
    if f.is_zero() {
        return Err(Error::Input("x^2 = 0 in S".into()));
    }
    Hypersurface::new(s.clone(), f)
}

/// `dim Ext^1_R(X', Y)`, after checking that the certificate proves `X'`.
pub fn wakamatsu_ext1(
    ring: &GradedAlgebra,
    xprime: &GradedModule,
    cert: &GdimCertificate,
    y: &GradedModule,
) -> Result<usize> {
    let certified = cert.verify(ring)?;
    if &certified != xprime {
        return Err(Error::Input("certificate proves a different module".into()));
    }
    Ok(ext(ring, xprime, y, 1)?.total(1))
}

/// `Ext^1_R(X', Y) = 0`.
pub fn wakamatsu_check(
    ring: &GradedAlgebra,
    xprime: &GradedModule,
    cert: &GdimCertificate,
    y: &GradedModule,
) -> Result<bool> {
    Ok(wakamatsu_ext1(ring, xprime, cert, y)? == 0)
}

/// `... -x-> Y -x-> Y -x-> ...` is exact: `ker(x) = im(x)` in every degree.
pub fn x_exact(y: &GradedModule, x: &[u32]) -> bool {
    let xe = Element::linear(x.to_vec());
    let lo = y.base_degree() - 1;
    let hi = y.top_degree() + 1;
    if y.is_zero() {
        return true;
    }
    (lo..=hi).all(|d| {
        let out = y.act_element(&xe, d);
        let inc = y.act_element(&xe, d - 1);
        let ker = kernel_basis(&out);
        let im = image_basis(&inc);
        ker == im
    })
}

/// Dimensions forced on `Y` when `X` has `u` free summands and nonfree
/// summands with `s_j` generators.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct YConstraints {
    pub r: usize,
    pub u: usize,
    pub s: Vec<usize>,
    pub y0: usize,
    pub y1: usize,
    pub y2: usize,
    /// `y0 + y2 = y1`, needed for `0 -> Y0 -> Y1 -> Y2 -> 0` to be exact.
    pub exactness_holds: bool,
    /// `y1 - y0 - y2`.
    pub margin: i64,
}

pub fn y_dimension_constraints(r: usize, u: usize, s: &[usize]) -> Result<YConstraints> {
    if r == 0 {
        return Err(Error::Input("r must be positive".into()));
    }
    if s.contains(&0) {
        return Err(Error::Input("generator counts s_j must be positive".into()));
    }
    if u == 0 && s.is_empty() {
        return Err(Error::Input("X = 0 cannot surject onto k".into()));
    }
    let sum: usize = s.iter().sum();
    let y0 = u + sum - 1;
    let y1 = u * (r + 1) + r * sum;
    let y2 = r * u;
    Ok(YConstraints {
        r,
        u,
        s: s.to_vec(),
        y0,
        y1,
        y2,
        exactness_holds: y0 + y2 == y1,
        margin: y1 as i64 - y0 as i64 - y2 as i64,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ObstructionTable {
    pub r: usize,
    pub u_max: usize,
    pub s_max: usize,
    pub len_max: usize,
    /// `r < 2`: outside the non-Gorenstein hypothesis.
    pub out_of_hypothesis: bool,
    pub instances: usize,
    pub satisfiable: usize,
    /// Every margin equals `(r - 1) * sum(s) + 1`.
    pub closed_form_matches: bool,
    pub reduction: String,
    pub rows: Vec<YConstraints>,
}

impl ObstructionTable {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("r,u,s,y0,y1,y2,exact,margin\n");
        for row in &self.rows {
            let s: Vec<String> = row.s.iter().map(|v| v.to_string()).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                row.r,
                row.u,
                s.join(" "),
                row.y0,
                row.y1,
                row.y2,
                row.exactness_holds,
                row.margin
            ));
        }
        out
    }
}

/// Every `(u, s)` with `u <= u_max`, entries of `s` in `1..=s_max` and
/// `len(s) <= len_max`, checked against the exactness equation.
pub fn obstruction_unsatisfiable(r: usize, u_max: usize, s_max: usize, len_max: usize) -> Result<ObstructionTable> {
    if r == 0 {
        return Err(Error::Input("r must be positive".into()));
    }
    let mut seqs: Vec<Vec<usize>> = vec![Vec::new()];
    let mut frontier: Vec<Vec<usize>> = vec![Vec::new()];
    for _ in 0..len_max {
        let mut next = Vec::new();
        for base in &frontier {
            for v in 1..=s_max {
                let mut t = base.clone();
                t.push(v);
                next.push(t);
            }
        }
        seqs.extend(next.iter().cloned());
        frontier = next;
    }
    let mut rows = Vec::new();
    for u in 0..=u_max {
        for s in &seqs {
            if u == 0 && s.is_empty() {
                continue;
            }
            rows.push(y_dimension_constraints(r, u, s)?);
        }
    }
    let satisfiable = rows.iter().filter(|c| c.exactness_holds).count();
    let closed_form_matches = rows.iter().all(|c| c.margin == (r as i64 - 1) * c.s.iter().sum::<usize>() as i64 + 1);
    Ok(ObstructionTable {
        r,
        u_max,
        s_max,
        len_max,
        out_of_hypothesis: r < 2,
        instances: rows.len(),
        satisfiable,
        closed_form_matches,
        reduction: "y0 + y2 = y1  <=>  (1 - r) * sum(s) = 1".into(),
        rows,
    })
}

/// Certified modules over `R = S / x^2 S` to test `Ext^1(X', Y)` against:
/// `R/xR`, the family member `M([x], 2)` and the matrix factorization
/// module of the pair `(x, x)`.
pub fn default_battery(h: &Hypersurface, x: &[u32]) -> Result<Vec<(String, GradedModule, GdimCertificate)>> {
    let ring = &h.ring;
    let (cert, rx) = cyclic_quotient_certificate(ring, x)?;
    let mut out = vec![("R/xR".to_string(), rx, cert)];
    let z = default_z(ring.dim1(), ring.field(), x);
    let (fam, fam_cert) = family_module(h, &FamilySpec { x: x.to_vec(), z, n: 2 })?;
    out.push(("M([x], 2)".to_string(), fam, fam_cert));
    let xe = Element::linear(x.to_vec());
    let mf = matrix_factorization_module(&h.s, &[(xe.clone(), xe)])?;
    if mf.hypersurface.ring != *ring {
        return Err(Error::Construction("x * x factorization lives over another ring".into()));
    }
    out.push(("MF(x, x)".to_string(), mf.module, mf.certificate));
    Ok(out)
}

/// A proposed `X -> k` to audit.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ApproximationCandidate {
    pub x_module: GradedModule,
    pub certificate: Option<GdimCertificate>,
    pub pi: ModuleMap,
    /// `(u, s)` as declared by the user; re-checked against dimensions.
    pub declared: Option<(usize, Vec<usize>)>,
}

impl ApproximationCandidate {
    /// `pi` sends every basis vector of `X_0` to `1`.
    pub fn with_sum_projection(
        ring: &GradedAlgebra,
        x_module: GradedModule,
        certificate: Option<GdimCertificate>,
    ) -> Self {
        let mut blocks = BTreeMap::new();
        let n0 = x_module.dim(0);
        if n0 > 0 {
            let data = vec![1u32; n0];
            blocks.insert(0, FMatrix::from_data(ring.field(), 1, n0, data).expect("row"));
        }
        ApproximationCandidate { x_module, certificate, pi: ModuleMap::new(0, blocks), declared: None }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatteryResult {
    pub name: String,
    pub ext1: usize,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditReport {
    pub x_dims: Vec<usize>,
    pub y_dims: Vec<usize>,
    pub sequence_exact: bool,
    pub certificate_ok: Option<bool>,
    pub battery: Vec<BatteryResult>,
    pub y_x_exact: bool,
    pub structure: Option<YConstraints>,
    pub dimension_equation_holds: bool,
    pub first_failure: Option<String>,
}

impl AuditReport {
    pub fn survives(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Dimensions of a module in degrees 0, 1, 2.
fn dims012(m: &GradedModule) -> [usize; 3] {
    [m.dim(0), m.dim(1), m.dim(2)]
}

/// Checks a candidate `0 -> Y -> X -> k -> 0`: exactness, the Ext^1
/// battery, `x`-exactness of `Y`, and the dimension equation. All checks
/// are recorded; `first_failure` names the earliest in that order.
pub fn candidate_audit(
    h: &Hypersurface,
    x: &[u32],
    candidate: &ApproximationCandidate,
    battery: &[(String, GradedModule, GdimCertificate)],
) -> Result<AuditReport> {
    let ring = &h.ring;
    let xm = &candidate.x_module;
    xm.validate(ring)?;
    let k = residue_field(ring, 0);
    let pi = &candidate.pi;
    if !pi.is_homomorphism(xm, &k, ring) {
        return Err(Error::Input("pi is not a homomorphism X -> k".into()));
    }
    if !pi.is_surjective(&k) {
        return Err(Error::Input("pi is not surjective onto k".into()));
    }
    let field = ring.field();
    // Y = ker(pi) with its inclusion
    let mut kernel = BTreeMap::new();
    let mut inc_blocks = BTreeMap::new();
    for (d, n) in xm.hilbert() {
        let blk = pi.block(xm, &k, d);
        let kb = if blk.rows() == 0 { PivotBasis::full(field, n) } else { blk.kernel_pivoted() };
        let mut inc = FMatrix::zeros(field, n, kb.dim());
        for c in 0..kb.dim() {
            for (r, &v) in kb.vector(c).iter().enumerate() {
                inc.set(r, c, v);
            }
        }
        kernel.insert(d, kb);
        inc_blocks.insert(d, inc);
    }
    let y = submodule_to_module(ring, xm, &kernel);
    // the dense Y keeps the kernel's degrees; drop blocks of empty degrees
    let inc_blocks: BTreeMap<i32, FMatrix> = inc_blocks.into_iter().filter(|(d, _)| y.dim(*d) > 0).collect();
    let ses = ShortExactSequence {
        sub: y.clone(),
        middle: xm.clone(),
        quotient: k.clone(),
        inclusion: ModuleMap::new(0, inc_blocks),
        projection: pi.clone(),
    };
    let sequence_exact = ses.check(ring).is_ok();
    let certificate_ok = candidate.certificate.as_ref().map(|c| c.verify(ring).map(|m| &m == xm).unwrap_or(false));
    let mut results = Vec::new();
    for (name, xp, cert) in battery {
        let e1 = wakamatsu_ext1(ring, xp, cert, &y)?;
        results.push(BatteryResult { name: name.clone(), ext1: e1, passed: e1 == 0 });
    }
    let y_x_exact = x_exact(&y, x);
    // u and s: declared, or read off from the dimensions of X
    let r = h.r();
    let xd = dims012(xm);
    let structure = match &candidate.declared {
        Some((u, s)) => {
            let c = y_dimension_constraints(r, *u, s)?;
            let sum: usize = s.iter().sum();
            if xd != [u + sum, u * (r + 1) + r * sum, r * u] {
                return Err(Error::Input("declared structure disagrees with the dimensions of X".into()));
            }
            Some(c)
        }
        None => infer_structure(r, &xd),
    };
    let yd = dims012(&y).to_vec();
    let dimension_equation_holds = yd[0] + yd[2] == yd[1];
    let first_failure = if !sequence_exact {
        Some("sequence 0 -> Y -> X -> k -> 0 is not exact".to_string())
    } else if certificate_ok == Some(false) {
        Some("certificate for X does not verify".to_string())
    } else if let Some(b) = results.iter().find(|b| !b.passed) {
        Some(format!("Ext^1({}, Y) has dimension {}", b.name, b.ext1))
    } else if !y_x_exact {
        Some("multiplication by x on Y is not exact".to_string())
    } else if !dimension_equation_holds {
        Some(format!("dim Y0 + dim Y2 = {} but dim Y1 = {}", yd[0] + yd[2], yd[1]))
    } else {
        None
    };
    Ok(AuditReport {
        x_dims: xd.to_vec(),
        y_dims: yd,
        sequence_exact,
        certificate_ok,
        battery: results,
        y_x_exact,
        structure,
        dimension_equation_holds,
        first_failure,
    })
}

/// `u = dim X2 / r`, `sum s = dim X0 - u`, if consistent with `dim X1`.
fn infer_structure(r: usize, xd: &[usize; 3]) -> Option<YConstraints> {
    if !xd[2].is_multiple_of(r) {
        return None;
    }
    let u = xd[2] / r;
    let sum = xd[0].checked_sub(u)?;
    if xd[1] != u * (r + 1) + r * sum {
        return None;
    }
    let s = if sum == 0 { Vec::new() } else { vec![sum] };
    y_dimension_constraints(r, u, &s).ok()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_circulant_ring;
    use crate::exactla::PrimeField;
    use crate::gdim::verify_periodic_cr;
    use crate::gmodule::free_module;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn setup(r: usize) -> (Hypersurface, Vec<u32>) {
        let s = build_circulant_ring(PrimeField::new(101).unwrap(), r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let x = crate::algebra::sample_minimal_reduction(s.as_algebra(), &mut rng, |_| true).unwrap();
        let h = build_r_from_reduction(&s, x.coords()).unwrap();
        (h, x.coords().to_vec())
    }

    #[test]
    fn ring_shapes() {
        for r in 2..=3 {
            let (h, _) = setup(r);
            assert_eq!(h.ring.hilbert_coeffs(), [1, r + 1, r]);
        }
        let s = build_circulant_ring(PrimeField::new(101).unwrap(), 2).unwrap();
        assert!(build_r_from_reduction(&s, &[0, 0, 0]).unwrap_err().is_input_error());
    }

    #[test]
    fn cyclic_quotient_is_one_periodic_here() {
        let (h, x) = setup(2);
        let (cert, m) = cyclic_quotient_certificate(&h.ring, &x).unwrap();
        let GdimCertificate::PeriodicCR { matrices, .. } = &cert else { panic!() };
        assert_eq!(matrices.len(), 1);
        assert_eq!(m.dims(), &[1, 2]);
    }

    #[test]
    fn wakamatsu_basics() {
        let (h, x) = setup(2);
        let ring = &h.ring;
        let (cert, rx) = cyclic_quotient_certificate(ring, &x).unwrap();
        let k = residue_field(ring, 0);
        assert!(!wakamatsu_check(ring, &rx, &cert, &k).unwrap());
        // free X' passes against anything
        let one = crate::gmodule::ElementMatrix::new(1, 1, vec![Element::linear(x.clone())]).unwrap();
        let _ = verify_periodic_cr(ring, &[one]).unwrap();
        let free = free_module(ring, &[0]);
        let fc = crate::gdim::check_gdim_zero_bounded(ring, &free, 2).unwrap();
        assert!(wakamatsu_check(ring, &free, &fc, &k).unwrap());
        assert!(wakamatsu_check(ring, &free, &fc, &rx).unwrap());
    }

    #[test]
    fn constraint_examples() {
        let c = y_dimension_constraints(2, 1, &[1]).unwrap();
        assert_eq!((c.y0, c.y1, c.y2), (1, 5, 2));
        assert!(!c.exactness_holds);
        let c = y_dimension_constraints(3, 0, &[2]).unwrap();
        assert_eq!((c.y0, c.y1, c.y2), (1, 6, 0));
        assert!(y_dimension_constraints(2, 0, &[]).unwrap_err().is_input_error());
    }

    #[test]
    fn obstruction_tables() {
        for r in 2..=6 {
            let t = obstruction_unsatisfiable(r, 3, 3, 3).unwrap();
            assert_eq!(t.satisfiable, 0);
            assert!(t.closed_form_matches && !t.out_of_hypothesis);
            // 4 values of u times 40 sequences, minus the empty X
            assert_eq!(t.instances, 4 * 40 - 1);
        }
        let t = obstruction_unsatisfiable(1, 2, 2, 2).unwrap();
        assert!(t.out_of_hypothesis);
        assert_eq!(t.satisfiable, 0);
    }

    #[test]
    fn audits() {
        let (h, x) = setup(2);
        let ring = &h.ring;
        let (cert, rx) = cyclic_quotient_certificate(ring, &x).unwrap();
        let battery = vec![("R/xR".to_string(), rx.clone(), cert.clone())];
        let free = free_module(ring, &[0]);
        let rep =
            candidate_audit(&h, &x, &ApproximationCandidate::with_sum_projection(ring, free.clone(), None), &battery)
                .unwrap();
        assert!(rep.sequence_exact);
        assert!(!rep.battery[0].passed);
        assert!(rep.first_failure.unwrap().contains("R/xR"));

        let sum = rx.direct_sum(&free).unwrap();
        let rep =
            candidate_audit(&h, &x, &ApproximationCandidate::with_sum_projection(ring, sum, None), &battery).unwrap();
        assert!(rep.sequence_exact);
        assert!(!rep.dimension_equation_holds);
        assert_eq!(rep.structure.as_ref().map(|s| (s.u, s.s.clone())), Some((1, vec![1])));

        let battery = default_battery(&h, &x).unwrap();
        assert_eq!(battery.len(), 3);
        let free = free_module(ring, &[0]);
        let rep =
            candidate_audit(&h, &x, &ApproximationCandidate::with_sum_projection(ring, free, None), &battery).unwrap();
        assert!(rep.battery.iter().all(|b| !b.passed), "{:?}", rep.battery);

        let zero = GradedModule::zero(ring);
        let bad = ApproximationCandidate::with_sum_projection(ring, zero, None);
        assert!(candidate_audit(&h, &x, &bad, &battery).unwrap_err().is_input_error());
    }
}
