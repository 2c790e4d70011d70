//! Named experiment suites with pass/fail checks, JSON and CSV reports.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::algebra::{build_circulant_ring, build_quadratic_quotient, GradedAlgebra, Hypersurface, QuadraticForm};
use crate::approximation::{
    build_r_from_reduction, candidate_audit, default_battery, obstruction_unsatisfiable, ApproximationCandidate,
};
use crate::constructions::{
    pairwise_noniso_sweep, random_matrix_factorization, sample_family_points, veliche_fixture, FamilySpec,
};
use crate::error::{Error, Result};
use crate::exactla::PrimeField;
use crate::gdim::{
    check_gdim_zero_bounded, cyclic_quotient_certificate, expected_bass, expected_koszul_betti, GdimCertificate,
};
use crate::gmodule::{
    coker, free_module, is_free, maximal_ideal_times, minimal_generators, minimal_resolution, residue_field,
    ElementMatrix, GradedModule, Presentation,
};
use crate::homology::{bass_numbers, bidual_check, dual, ext, koszul_check};
use crate::session::SessionStore;

/// Largest `beta_N(omega) * dim R` the Bass computation is allowed to reach.
pub const BASS_BUDGET: usize = 20_000;

pub fn bass_within_budget(r: usize, dim_r: usize, n: usize) -> bool {
    expected_bass(r, n).last().copied().unwrap_or(0).saturating_mul(dim_r) <= BASS_BUDGET
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PresetName {
    Thm31,
    Thm42,
    Thm51,
    Thm61,
    Negcontrols,
}

impl PresetName {
    pub const ALL: [PresetName; 5] =
        [PresetName::Thm31, PresetName::Thm42, PresetName::Thm51, PresetName::Thm61, PresetName::Negcontrols];

    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Thm31 => "thm31",
            PresetName::Thm42 => "thm42",
            PresetName::Thm51 => "thm51",
            PresetName::Thm61 => "thm61",
            PresetName::Negcontrols => "negcontrols",
        }
    }
}

impl fmt::Display for PresetName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for PresetName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        PresetName::ALL
            .into_iter()
            .find(|p| p.as_str() == s)
            .ok_or_else(|| Error::Input(format!("unknown preset {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExperimentPreset {
    pub name: PresetName,
    pub p: u32,
    pub rs: Vec<usize>,
    /// Largest `n` (matrix factorization terms, family rank, obstruction bounds).
    pub n_max: usize,
    /// Resolution depth `N`.
    pub depth: usize,
    /// Family points, or random modules for the negative controls.
    pub count: usize,
    pub seed: u64,
}

impl ExperimentPreset {
    pub fn defaults(name: PresetName) -> Self {
        let base = ExperimentPreset { name, p: 101, rs: vec![2], n_max: 3, depth: 6, count: 5, seed: 0 };
        match name {
            PresetName::Thm31 => ExperimentPreset { rs: vec![2, 3], ..base },
            PresetName::Thm42 => ExperimentPreset { rs: vec![2, 3, 4], ..base },
            PresetName::Thm51 => ExperimentPreset { seed: 42, ..base },
            PresetName::Thm61 => ExperimentPreset { rs: (2..=6).collect(), ..base },
            PresetName::Negcontrols => ExperimentPreset { rs: vec![], depth: 4, count: 50, ..base },
        }
    }

    /// Desk-scale bounds; `r = 1` is Gorenstein and rejected.
    pub fn validate(&self) -> Result<()> {
        PrimeField::new(self.p)?;
        if self.rs.contains(&1) {
            return Err(Error::Input("r = 1 gives a Gorenstein ring; every preset needs r >= 2".into()));
        }
        if let Some(&r) = self.rs.iter().find(|&&r| r == 0 || r > 6) {
            return Err(Error::Input(format!("r = {r} outside 2..=6")));
        }
        if self.n_max == 0 || self.n_max > 5 {
            return Err(Error::Input(format!("n = {} outside 1..=5", self.n_max)));
        }
        if self.depth == 0 || self.depth > 8 {
            return Err(Error::Input(format!("depth {} outside 1..=8", self.depth)));
        }
        if self.count == 0 || self.count > 64 {
            return Err(Error::Input(format!("count {} outside 1..=64", self.count)));
        }
        if self.name == PresetName::Thm31 {
            for &r in &self.rs {
                if !bass_within_budget(r, r + 2, self.depth) {
                    return Err(Error::Input(format!(
                        "Bass numbers for r = {r} to N = {} exceed the budget",
                        self.depth
                    )));
                }
            }
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub suite: String,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
}

fn check(suite: &str, name: &str, passed: bool, detail: impl Into<String>) -> Check {
    Check { suite: suite.to_string(), name: name.to_string(), passed, detail: detail.into(), witness: None }
}

/// A failed math step becomes a failed check; input errors propagate.
fn failed(suite: &str, name: &str, e: Error) -> Result<Check> {
    if e.is_input_error() {
        return Err(e);
    }
    Ok(check(suite, name, false, e.to_string()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PresetReport {
    pub schema: u32,
    pub preset: ExperimentPreset,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub first_failure: Option<Check>,
    /// Named CSV tables.
    pub tables: BTreeMap<String, String>,
}

impl PresetReport {
    fn new(preset: &ExperimentPreset, checks: Vec<Check>, tables: BTreeMap<String, String>) -> Self {
        let first_failure = checks.iter().find(|c| !c.passed).cloned();
        PresetReport {
            schema: 1,
            preset: preset.clone(),
            passed: first_failure.is_none(),
            checks,
            first_failure,
            tables,
        }
    }

    pub fn checks_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["suite", "check", "passed", "detail"])?;
        for c in &self.checks {
            w.write_record([
                c.suite.as_str(),
                c.name.as_str(),
                if c.passed { "true" } else { "false" },
                c.detail.as_str(),
            ])?;
        }
        let bytes = w.into_inner().map_err(|e| Error::Input(e.to_string()))?;
        Ok(String::from_utf8(bytes).expect("utf-8"))
    }

    /// `<preset>.report.json`, `<preset>.csv` and one CSV per table.
    pub fn write(&self, store: &SessionStore) -> Result<Vec<std::path::PathBuf>> {
        let stem = self.preset.name.as_str();
        let (j, c) = store.write_report(stem, self, &self.checks_csv()?)?;
        let mut out = vec![j, c];
        for (name, table) in &self.tables {
            let path = store.dir().join(format!("{stem}.{name}.csv"));
            std::fs::write(&path, table)?;
            out.push(path);
        }
        Ok(out)
    }
}

/// Checks every consequence for a certified nonfree module over a good ring:
/// shape `(b, rb)`, `a = rb`, `l(M*) = l(M)`, linear resolution with constant `b`.
pub fn module_checks(
    suite: &str,
    ring: &GradedAlgebra,
    m: &GradedModule,
    cert: &GdimCertificate,
    depth: usize,
) -> Vec<Check> {
    let r = ring.dim2();
    let mut out = Vec::new();
    let certified = cert.verify(ring).map(|c| &c == m);
    out.push(match certified {
        Ok(true) => check(suite, "certificate", true, cert.kind()),
        Ok(false) => check(suite, "certificate", false, "certificate proves a different module"),
        Err(e) => check(suite, "certificate", false, e.to_string()),
    });
    out.push(check(suite, "nonfree", !is_free(ring, m), ""));
    let (b, _) = minimal_generators(m);
    let dims = m.dims().to_vec();
    out.push(check(suite, "shape (b, rb)", dims == [b, r * b], format!("dims {dims:?}, b = {b}")));
    let a: usize = maximal_ideal_times(ring, m).values().map(|s| s.dim()).sum();
    out.push(check(suite, "a = rb", a == r * b, format!("a = {a}")));
    match dual(ring, m) {
        Ok(d) => out.push(check(
            suite,
            "length(M*) = length(M)",
            d.length() == m.length(),
            format!("{} vs {}", d.length(), m.length()),
        )),
        Err(e) => out.push(check(suite, "length(M*) = length(M)", false, e.to_string())),
    }
    let res = minimal_resolution(ring, m, depth);
    let diag = res.betti().diagonal(m.base_degree());
    let linear = res.betti().is_linear(m.base_degree()) && diag.iter().all(|&x| x == b);
    out.push(check(suite, "linear resolution", linear, format!("diagonal {diag:?}")));
    if out.iter().any(|c| !c.passed) {
        let w = serde_json::to_value(m).ok();
        for c in out.iter_mut().filter(|c| !c.passed) {
            c.witness = w.clone();
        }
    }
    out
}

pub fn run_preset(preset: &ExperimentPreset) -> Result<PresetReport> {
    preset.validate()?;
    match preset.name {
        PresetName::Thm31 => run_thm31(preset),
        PresetName::Thm42 => run_thm42(preset),
        PresetName::Thm51 => run_thm51(preset),
        PresetName::Thm61 => run_thm61(preset),
        PresetName::Negcontrols => run_negcontrols(preset),
    }
}

fn field_of(preset: &ExperimentPreset) -> PrimeField {
    PrimeField::new(preset.p).expect("validated")
}

fn run_thm31(preset: &ExperimentPreset) -> Result<PresetReport> {
    let field = field_of(preset);
    let per_r: Vec<Result<Vec<Check>>> = preset
        .rs
        .par_iter()
        .map(|&r| {
            let suite = format!("r={r}");
            let h = Hypersurface::circulant(field, r, preset.seed)?;
            let ring = &h.ring;
            let mut out = Vec::new();
            let hc = ring.hilbert_coeffs();
            out.push(check(&suite, "hilbert (1, r+1, r)", hc == [1, r + 1, r], format!("{hc:?}")));
            let soc = ring.socle();
            out.push(check(&suite, "socle = R2", soc == ring.top_piece(), format!("dim {}", soc.dim())));
            let bass = bass_numbers(ring, preset.depth);
            let want = expected_bass(r, preset.depth);
            out.push(check(&suite, "bass numbers", bass == want, format!("{bass:?}")));
            let kd = preset.depth.saturating_sub(1);
            let (koszul, table) = koszul_check(ring, kd);
            let diag = table.diagonal(0);
            out.push(check(
                &suite,
                "koszul betti",
                koszul && diag == expected_koszul_betti(r, kd),
                format!("{diag:?}"),
            ));
            let mut rng = ChaCha8Rng::seed_from_u64(preset.seed);
            let x = h.sample_reduction(&mut rng, |_| true)?;
            match cyclic_quotient_certificate(ring, &x) {
                Ok((cert, m)) => out.extend(module_checks(&format!("{suite} R/xR"), ring, &m, &cert, preset.depth)),
                Err(e) => out.push(failed(&suite, "R/xR certificate", e)?),
            }
            Ok(out)
        })
        .collect();
    let mut checks = Vec::new();
    for c in per_r {
        checks.extend(c?);
    }
    Ok(PresetReport::new(preset, checks, BTreeMap::new()))
}

fn run_thm42(preset: &ExperimentPreset) -> Result<PresetReport> {
    let field = field_of(preset);
    let jobs: Vec<(usize, usize)> = preset.rs.iter().flat_map(|&r| (1..=preset.n_max).map(move |n| (r, n))).collect();
    let per_job: Vec<Result<Vec<Check>>> = jobs
        .par_iter()
        .map(|&(r, n)| {
            let suite = format!("r={r} n={n}");
            let s = build_circulant_ring(field, r)?;
            let mf = match random_matrix_factorization(&s, n, preset.seed.wrapping_add(n as u64)) {
                Ok(mf) => mf,
                Err(e) => return Ok(vec![failed(&suite, "matrix factorization", e)?]),
            };
            let ring = &mf.hypersurface.ring;
            let size = 1usize << n;
            let mut out =
                vec![check(&suite, "phi^2 = psi^2 = 0, phi psi + psi phi = f", true, "checked on construction")];
            out.push(check(
                &suite,
                "hilbert 2^n (1, r)",
                mf.module.dims() == [size, size * r],
                format!("{:?}", mf.module.dims()),
            ));
            out.extend(module_checks(&suite, ring, &mf.module, &mf.certificate, preset.depth));
            Ok(out)
        })
        .collect();
    let mut checks = Vec::new();
    for c in per_job {
        checks.extend(c?);
    }
    match veliche_fixture(field) {
        Ok((ring, m, cert)) => {
            let hc = ring.hilbert_coeffs();
            checks.push(check("veliche", "hilbert (1, 4, 3)", hc == [1, 4, 3], format!("{hc:?}")));
            checks.extend(module_checks("veliche", &ring, &m, &cert, preset.depth));
        }
        Err(e) => checks.push(failed("veliche", "2-periodic certificate", e)?),
    }
    Ok(PresetReport::new(preset, checks, BTreeMap::new()))
}

fn run_thm51(preset: &ExperimentPreset) -> Result<PresetReport> {
    let field = field_of(preset);
    let mut checks = Vec::new();
    let mut tables = BTreeMap::new();
    for &r in &preset.rs {
        let suite = format!("r={r}");
        let h = Hypersurface::circulant(field, r, preset.seed)?;
        let ring = &h.ring;
        let mut z = vec![0u32; ring.dim1()];
        z[0] = 1;
        let xs = sample_family_points(&h, &z, preset.count, preset.seed)?;
        let ns: Vec<usize> = (1..=preset.n_max).collect();
        let sweep = match pairwise_noniso_sweep(&h, &xs, &ns, &z) {
            Ok(s) => s,
            Err(e) => {
                checks.push(failed(&suite, "family sweep", e)?);
                continue;
            }
        };
        for e in &sweep.entries {
            let name = format!("M(x{}, {})", e.index / ns.len(), e.n);
            checks.push(check(&suite, &format!("{name} certificate"), e.certificate_ok, e.certificate.clone()));
            checks.push(check(
                &suite,
                &format!("{name} generators = n"),
                e.generators == e.n,
                e.generators.to_string(),
            ));
            checks.push(check(&suite, &format!("{name} local"), e.local, ""));
        }
        let distinct = sweep.all_distinct();
        checks.push(check(
            &suite,
            "pairwise non-isomorphic",
            distinct,
            format!("{} modules, {} pairs", sweep.entries.len(), sweep.pairs.len()),
        ));
        let ranks: Vec<Result<Vec<Check>>> = sweep
            .entries
            .par_iter()
            .filter(|e| e.index < ns.len())
            .map(|e| {
                let spec = FamilySpec { x: e.x.clone(), z: z.clone(), n: e.n };
                let (m, cert) = crate::constructions::family_module(&h, &spec)?;
                Ok(module_checks(&format!("{suite} M(x0, {})", e.n), ring, &m, &cert, preset.depth))
            })
            .collect();
        for c in ranks {
            checks.extend(c?);
        }
        tables.insert(format!("sweep_r{r}"), sweep.to_csv());
    }
    Ok(PresetReport::new(preset, checks, tables))
}

fn run_thm61(preset: &ExperimentPreset) -> Result<PresetReport> {
    let field = field_of(preset);
    let mut checks = Vec::new();
    let mut tables = BTreeMap::new();
    let k = preset.n_max;
    for &r in &preset.rs {
        let t = obstruction_unsatisfiable(r, k, k, k)?;
        checks.push(check(
            &format!("r={r}"),
            "no (u, s) satisfies the exactness equation",
            t.satisfiable == 0,
            format!("{} instances", t.instances),
        ));
        checks.push(check(&format!("r={r}"), "margin = (r-1) sum(s) + 1", t.closed_form_matches, ""));
        tables.insert(format!("obstruction_r{r}"), t.to_csv());
    }
    // concrete audits over S / x^2 S for the smallest r
    if let Some(&r) = preset.rs.iter().min() {
        let suite = format!("audit r={r}");
        let s = build_circulant_ring(field, r)?;
        let mut rng = ChaCha8Rng::seed_from_u64(preset.seed);
        let x = crate::algebra::sample_minimal_reduction(s.as_algebra(), &mut rng, |_| true)?.coords().to_vec();
        let h = build_r_from_reduction(&s, &x)?;
        let ring = &h.ring;
        let battery = default_battery(&h, &x)?;
        let rx = battery[0].1.clone();
        let free = free_module(ring, &[0]);
        let candidates = [("X = R", free.clone()), ("X = R/xR + R", rx.direct_sum(&free)?)];
        for (name, xm) in candidates {
            let cand = ApproximationCandidate::with_sum_projection(ring, xm, None);
            let rep = candidate_audit(&h, &x, &cand, &battery)?;
            checks.push(check(
                &suite,
                &format!("{name} is rejected"),
                !rep.survives(),
                rep.first_failure.clone().unwrap_or_default(),
            ));
        }
    }
    Ok(PresetReport::new(preset, checks, tables))
}

/// `k[x, y] / (x, y)^2`.
pub fn square_zero_ring(field: PrimeField) -> Result<GradedAlgebra> {
    let vars = ['x', 'y'];
    let qs = ["x^2", "xy", "y^2"].iter().map(|s| QuadraticForm::parse(s, &vars)).collect::<Result<Vec<_>>>()?;
    build_quadratic_quotient(field, 2, &qs)
}

/// `R^2 / U` for a random nonzero `U` inside `m R^2`, seeded.
pub fn random_two_generated(ring: &GradedAlgebra, rng: &mut ChaCha8Rng) -> Result<GradedModule> {
    let field = ring.field();
    let dim1 = ring.dim1();
    let cols = rng.gen_range(1..=2 * dim1);
    loop {
        let entries: Vec<crate::algebra::Element> = (0..2 * cols)
            .map(|_| crate::algebra::Element::linear((0..dim1).map(|_| field.random(rng)).collect()))
            .collect();
        if entries.iter().all(|e| e.is_zero()) {
            continue;
        }
        let matrix = ElementMatrix::new(2, cols, entries)?;
        return Ok(coker(ring, &Presentation::linear(matrix))?.module);
    }
}

fn run_negcontrols(preset: &ExperimentPreset) -> Result<PresetReport> {
    let field = field_of(preset);
    let ring = square_zero_ring(field)?;
    let suite = "k[x,y]/(x,y)^2";
    let mut checks = Vec::new();
    let k = residue_field(&ring, 0);
    let (iso, _) = bidual_check(&ring, &k)?;
    checks.push(check(suite, "k is not reflexive", !iso, ""));
    let e = ext(&ring, &k, &free_module(&ring, &[0]), 1)?;
    checks.push(check(suite, "Ext^1(k, R) != 0", e.total(1) > 0, format!("dim {}", e.total(1))));
    let mut rng = ChaCha8Rng::seed_from_u64(preset.seed);
    let modules: Vec<GradedModule> =
        (0..preset.count).map(|_| random_two_generated(&ring, &mut rng)).collect::<Result<_>>()?;
    let results: Vec<Result<Check>> = modules
        .par_iter()
        .enumerate()
        .map(|(i, m)| {
            let gens = minimal_generators(m).0;
            let cert = check_gdim_zero_bounded(&ring, m, preset.depth)?;
            let GdimCertificate::BoundedExt { report, .. } = &cert else { unreachable!() };
            let ok = gens == 2 && !is_free(&ring, m) && !report.passed;
            let mut c = check(
                suite,
                &format!("random module {i} fails the bounded check"),
                ok,
                report.first_failure.clone().unwrap_or_else(|| "passed the bounded check".into()),
            );
            if !ok {
                c.witness = serde_json::to_value(m).ok();
            }
            Ok(c)
        })
        .collect();
    for c in results {
        checks.push(c?);
    }
    Ok(PresetReport::new(preset, checks, BTreeMap::new()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for p in PresetName::ALL {
            assert_eq!(p.as_str().parse::<PresetName>().unwrap(), p);
        }
        assert!("thm99".parse::<PresetName>().unwrap_err().is_input_error());
    }

    #[test]
    fn r_one_is_rejected() {
        for name in PresetName::ALL {
            let p = ExperimentPreset { rs: vec![1], ..ExperimentPreset::defaults(name) };
            assert!(run_preset(&p).unwrap_err().is_input_error());
        }
        let p = ExperimentPreset { rs: vec![4], ..ExperimentPreset::defaults(PresetName::Thm31) };
        assert!(p.validate().unwrap_err().is_input_error());
    }

    #[test]
    fn thm61_passes() {
        let rep = run_preset(&ExperimentPreset::defaults(PresetName::Thm61)).unwrap();
        assert!(rep.passed, "{:?}", rep.first_failure);
        assert_eq!(rep.tables.len(), 5);
    }

    #[test]
    fn small_negcontrols() {
        let p = ExperimentPreset { count: 5, ..ExperimentPreset::defaults(PresetName::Negcontrols) };
        let rep = run_preset(&p).unwrap();
        assert!(rep.passed, "{:?}", rep.first_failure);
        assert_eq!(rep.checks.len(), 7);
    }
}
