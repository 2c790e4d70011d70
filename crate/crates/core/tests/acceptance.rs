//! Acceptance criteria, one line each. Every tolerance is exact equality over F_p.

use std::process::ExitCode;
use std::time::Instant;

use gdimlab::algebra::GradedAlgebra;
use gdimlab::algebra::{build_circulant_ring, build_quadratic_quotient, Element, Hypersurface, QuadraticForm};
use gdimlab::approximation::obstruction_unsatisfiable;
use gdimlab::constructions::{
    endomorphism_algebra, family_module, pairwise_noniso_sweep, random_matrix_factorization, sample_family_points,
    FamilySpec,
};
use gdimlab::exactla::PrimeField;
use gdimlab::gdim::{check_gdim_zero_bounded, verify_periodic_cr, GdimCertificate};
use gdimlab::gmodule::{
    free_module, is_free, maximal_ideal_times, minimal_generators, minimal_resolution, residue_field, ElementMatrix,
    GradedModule,
};
use gdimlab::homology::{bass_numbers, bidual_check, dual, ext, koszul_check};
use gdimlab::preset::{random_two_generated, run_preset, square_zero_ring, ExperimentPreset, PresetName};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn field() -> PrimeField {
    PrimeField::new(101).unwrap()
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn ring_shape() -> Outcome {
    for r in [2usize, 3, 4] {
        let h = Hypersurface::circulant(field(), r, 2024).map_err(e2s)?;
        let hc = h.ring.hilbert_coeffs();
        ensure(hc == [1, r + 1, r], || format!("r={r}: hilbert {hc:?}"))?;
        ensure(h.ring.socle() == h.ring.top_piece(), || format!("r={r}: socle differs from R2"))?;
    }
    Ok("r = 2, 3, 4: hilbert (1, r+1, r), socle = m^2".into())
}

/// The certified module families of suites 2 and 3: (ring, module, certificate, label).
fn certified_modules() -> Result<Vec<(GradedAlgebra, GradedModule, GdimCertificate, String)>, String> {
    let mut out = Vec::new();
    for r in [2usize, 3] {
        let s = build_circulant_ring(field(), r).map_err(e2s)?;
        for n in 1..=3 {
            let mf = random_matrix_factorization(&s, n, 100 + n as u64).map_err(e2s)?;
            out.push((mf.hypersurface.ring.clone(), mf.module, mf.certificate, format!("MF r={r} n={n}")));
        }
    }
    let h = Hypersurface::circulant(field(), 2, 42).map_err(e2s)?;
    let z = vec![1, 0, 0];
    for (i, x) in sample_family_points(&h, &z, 5, 42).map_err(e2s)?.into_iter().enumerate() {
        for n in 1..=3 {
            let (m, cert) = family_module(&h, &FamilySpec { x: x.clone(), z: z.clone(), n }).map_err(e2s)?;
            out.push((h.ring.clone(), m, cert, format!("M(x{i}, {n})")));
        }
    }
    Ok(out)
}

fn matrix_factorization() -> Outcome {
    for r in [2usize, 3] {
        let s = build_circulant_ring(field(), r).map_err(e2s)?;
        for n in 1..=3usize {
            let mf = random_matrix_factorization(&s, n, 100 + n as u64).map_err(e2s)?;
            let alg = s.as_algebra();
            let size = 1usize << n;
            let phi2 = mf.data.phi.mul(&mf.data.phi, alg).map_err(e2s)?;
            let psi2 = mf.data.psi.mul(&mf.data.psi, alg).map_err(e2s)?;
            let anti = mf
                .data
                .phi
                .mul(&mf.data.psi, alg)
                .and_then(|a| a.add(&mf.data.psi.mul(&mf.data.phi, alg)?, alg))
                .map_err(e2s)?;
            ensure(phi2.is_zero() && psi2.is_zero(), || format!("r={r} n={n}: phi^2 or psi^2 nonzero"))?;
            for i in 0..size {
                for j in 0..size {
                    let e = anti.get(i, j);
                    let ok = if i == j { e.coords() == mf.data.f.coords() } else { e.is_zero() };
                    ensure(ok, || format!("r={r} n={n}: phi psi + psi phi differs from f at ({i}, {j})"))?;
                }
            }
            let GdimCertificate::PeriodicCR { matrices, .. } = &mf.certificate else {
                return Err(format!("r={r} n={n}: certificate kind {}", mf.certificate.kind()));
            };
            ensure(matrices.len() == 1, || format!("r={r} n={n}: period {}", matrices.len()))?;
            let m = mf.certificate.verify(&mf.hypersurface.ring).map_err(e2s)?;
            ensure(m.dims() == [size, size * r], || format!("r={r} n={n}: hilbert {:?}", m.dims()))?;
        }
    }
    Ok("r = 2, 3; n = 1, 2, 3: identities, 1-periodic certificate, H = 2^n (1, r)".into())
}

fn family() -> Outcome {
    let h = Hypersurface::circulant(field(), 2, 42).map_err(e2s)?;
    let z = vec![1, 0, 0];
    let xs = sample_family_points(&h, &z, 5, 42).map_err(e2s)?;
    for x in &xs {
        for n in 1..=3 {
            let (m, cert) = family_module(&h, &FamilySpec { x: x.clone(), z: z.clone(), n }).map_err(e2s)?;
            ensure(cert.kind() == "Filtration", || format!("certificate kind {}", cert.kind()))?;
            ensure(cert.verify(&h.ring).map_err(e2s)? == m, || "certificate proves another module".into())?;
            ensure(minimal_generators(&m).0 == n, || format!("n={n}: generators {}", minimal_generators(&m).0))?;
            let local = endomorphism_algebra(&h.ring, &m).and_then(|e| e.is_local()).map_err(e2s)?;
            ensure(local, || format!("n={n}: endomorphism algebra not local"))?;
        }
    }
    let sweep = pairwise_noniso_sweep(&h, &xs, &[1, 2, 3], &z).map_err(e2s)?;
    ensure(sweep.entries.len() == 15 && sweep.pairs.len() == 105, || "sweep size".into())?;
    ensure(sweep.all_distinct(), || "an isomorphic pair was found".into())?;
    let exact = sweep.pairs.iter().filter(|p| p.witness.contains("exact")).count();
    Ok(format!("15 modules certified, local, pairwise distinct ({exact} pairs needed the exact test)"))
}

fn series() -> Outcome {
    let want2 = vec![2, 3, 6, 12, 24, 48, 96];
    let want3 = vec![3, 8, 24, 72, 216, 648, 1944];
    for (r, want) in [(2usize, want2), (3, want3)] {
        let h = Hypersurface::circulant(field(), r, 7).map_err(e2s)?;
        let bass = bass_numbers(&h.ring, 6);
        ensure(bass == want, || format!("r={r}: bass {bass:?}"))?;
        let (koszul, table) = koszul_check(&h.ring, 5);
        let expected: Vec<usize> = (0..=5u32).map(|i| ((r.pow(i + 1)) - 1) / (r - 1)).collect();
        ensure(koszul, || format!("r={r}: off-diagonal Tor"))?;
        ensure(table.diagonal(0) == expected, || format!("r={r}: betti {:?}", table.diagonal(0)))?;
        ensure(table.iter().all(|(i, j, b)| b == 0 || i as i32 == j), || "off-diagonal entry".into())?;
    }
    Ok("bass r=2 [2,3,6,12,24,48,96], r=3 [3,8,24,72,216,648,1944]; k Koszul, r=2 [1,3,7,15,31,63]".into())
}

fn linear_resolutions() -> Outcome {
    let mods = certified_modules()?;
    for (ring, m, cert, label) in &mods {
        ensure(cert.verify(ring).map_err(e2s)? == *m, || format!("{label}: certificate"))?;
        ensure(!is_free(ring, m), || format!("{label}: free"))?;
        let r = ring.dim2();
        let b = minimal_generators(m).0;
        ensure(m.dims() == [b, r * b], || format!("{label}: dims {:?}", m.dims()))?;
        let a: usize = maximal_ideal_times(ring, m).values().map(|s| s.dim()).sum();
        ensure(a == r * b, || format!("{label}: a = {a}"))?;
        let dl = dual(ring, m).map_err(e2s)?.length();
        ensure(dl == m.length(), || format!("{label}: length(M*) = {dl}"))?;
        let res = minimal_resolution(ring, m, 6);
        let diag = res.betti().diagonal(0);
        ensure(res.betti().is_linear(0) && diag == vec![b; 7], || format!("{label}: betti {diag:?}"))?;
    }
    Ok(format!("{} certified modules: linear, constant b to N=6, (b, rb), length(M*) = length(M), a = rb", mods.len()))
}

fn veliche() -> Outcome {
    let vars = ['x', 'y', 'z', 'w'];
    let qs: Vec<QuadraticForm> = ["x^2", "xy-zw", "xy-w^2", "xz-yw", "xw-y^2", "xw-yz", "xw-z^2"]
        .iter()
        .map(|q| QuadraticForm::parse(q, &vars))
        .collect::<Result<_, _>>()
        .map_err(e2s)?;
    let ring = build_quadratic_quotient(field(), 4, &qs).map_err(e2s)?;
    ensure(ring.hilbert_coeffs() == [1, 4, 3], || format!("hilbert {:?}", ring.hilbert_coeffs()))?;
    let var = |i: usize, neg: bool| {
        let mut v = vec![0u32; 4];
        v[i] = if neg { 100 } else { 1 };
        Element::linear(v)
    };
    let (x, y, z, w) = (0, 1, 2, 3);
    let d1 = ElementMatrix::new(2, 2, vec![var(z, false), var(x, false), var(w, false), var(y, false)]).unwrap();
    let d2 = ElementMatrix::new(2, 2, vec![var(y, false), var(x, true), var(w, true), var(z, false)]).unwrap();
    let (cert, m) = verify_periodic_cr(&ring, &[d1, d2]).map_err(e2s)?;
    ensure(m.dims() == [2, 6], || format!("module {:?}", m.dims()))?;
    Ok(format!("hilbert (1, 4, 3); 2-periodic {} certificate accepted; M dims (2, 6)", cert.kind()))
}

fn obstruction() -> Outcome {
    let mut total = 0;
    for r in 2..=6 {
        let t = obstruction_unsatisfiable(r, 3, 3, 3).map_err(e2s)?;
        ensure(t.satisfiable == 0, || format!("r={r}: {} satisfiable", t.satisfiable))?;
        ensure(t.closed_form_matches, || format!("r={r}: margin formula"))?;
        for row in &t.rows {
            let sum: usize = row.s.iter().sum();
            ensure(row.margin == ((r - 1) * sum + 1) as i64, || format!("r={r}: margin at {:?}", row.s))?;
        }
        total += t.instances;
    }
    Ok(format!("r = 2..6: {total} instances, none satisfiable, margin (r-1) sum(s) + 1 everywhere"))
}

fn negative_controls() -> Outcome {
    let ring = square_zero_ring(field()).map_err(e2s)?;
    let k = residue_field(&ring, 0);
    let (iso, _) = bidual_check(&ring, &k).map_err(e2s)?;
    ensure(!iso, || "k passed the bidual check".into())?;
    let e1 = ext(&ring, &k, &free_module(&ring, &[0]), 1).map_err(e2s)?.total(1);
    ensure(e1 > 0, || "Ext^1(k, R) = 0".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(2718);
    for i in 0..50 {
        let m = random_two_generated(&ring, &mut rng).map_err(e2s)?;
        ensure(minimal_generators(&m).0 == 2 && !is_free(&ring, &m), || format!("module {i} malformed"))?;
        let cert = check_gdim_zero_bounded(&ring, &m, 4).map_err(e2s)?;
        let GdimCertificate::BoundedExt { report, .. } = cert else { unreachable!() };
        ensure(!report.passed, || format!("module {i} passed the bounded check"))?;
    }
    Ok(format!("k not reflexive, Ext^1(k, R) dim {e1}; 50 random nonfree modules fail at N=4"))
}

fn determinism() -> Outcome {
    let preset = ExperimentPreset { seed: 42, ..ExperimentPreset::defaults(PresetName::Thm51) };
    let a = run_preset(&preset).map_err(e2s)?;
    let b = run_preset(&preset).map_err(e2s)?;
    let ja = serde_json::to_string_pretty(&a).unwrap();
    let jb = serde_json::to_string_pretty(&b).unwrap();
    ensure(ja == jb, || "JSON reports differ".into())?;
    ensure(a.checks_csv().map_err(e2s)? == b.checks_csv().map_err(e2s)?, || "CSV reports differ".into())?;
    ensure(a.tables == b.tables, || "tables differ".into())?;
    ensure(a.passed, || "thm51 failed".into())?;
    Ok(format!("thm51 seed 42 twice: identical reports ({} bytes JSON)", ja.len()))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 9] = [
        ("ring shape", ring_shape),
        ("matrix factorization", matrix_factorization),
        ("family", family),
        ("series identities", series),
        ("linear resolutions", linear_resolutions),
        ("Veliche fixture", veliche),
        ("obstruction", obstruction),
        ("negative controls", negative_controls),
        ("determinism", determinism),
    ];
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = run();
        let secs = t.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {} {name}: PASS ({secs:.2}s) {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("criterion {} {name}: FAIL ({secs:.2}s) {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
