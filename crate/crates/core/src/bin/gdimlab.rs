use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use gdimlab::algebra::{
    build_circulant_ring, build_quadratic_quotient, sample_minimal_reduction, veliche_ring, GradedAlgebra,
    Hypersurface, QuadraticForm,
};
use gdimlab::approximation::{
    build_r_from_reduction, candidate_audit, default_battery, obstruction_unsatisfiable, ApproximationCandidate,
};
use gdimlab::constructions::{
    family_module, pairwise_noniso_sweep, random_matrix_factorization, sample_family_points, FamilySpec,
};
use gdimlab::error::{Error, Result};
use gdimlab::exactla::PrimeField;
use gdimlab::gdim::{check_gdim_zero_bounded, cyclic_quotient_certificate, verify_periodic_cr, GdimCertificate};
use gdimlab::gmodule::{canonical_module, free_module, minimal_resolution, residue_field, ElementMatrix};
use gdimlab::homology::{bass_numbers, ext, koszul_check};
use gdimlab::preset::{bass_within_budget, run_preset, square_zero_ring, ExperimentPreset, PresetName};
use gdimlab::session::{Artifact, SessionStore, OUT_ENV};

#[derive(Parser)]
#[command(name = "gdimlab", version, about = "Modules of G-dimension zero over graded rings with m^3 = 0")]
struct Cli {
    /// Characteristic of the coefficient field.
    #[arg(long, global = true, default_value_t = 101)]
    p: u32,
    /// Seed for every random choice.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Resolution depth N.
    #[arg(long, global = true, default_value_t = 8)]
    n: usize,
    /// Output directory for artifacts and reports.
    #[arg(long, global = true, env = OUT_ENV, default_value = "gdimlab-out")]
    out: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum RingKind {
    Circulant,
    Hypersurface,
    Veliche,
    SquareZero,
    Quadrics,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModuleKind {
    Residue,
    Free,
    Canonical,
    Cyclic,
}

#[derive(Args)]
struct RingArgs {
    #[arg(long, value_enum, default_value = "hypersurface")]
    kind: RingKind,
    #[arg(long, default_value_t = 2)]
    r: usize,
    /// Variable letters for `--kind quadrics`.
    #[arg(long, default_value = "xyzw")]
    vars: String,
    /// Quadric relations for `--kind quadrics`, e.g. `xy-zw`.
    #[arg(long = "quadric")]
    quadrics: Vec<String>,
    #[arg(long, default_value = "ring")]
    name: String,
}

#[derive(Subcommand)]
enum Cmd {
    /// Build and store a ring.
    Ring(RingArgs),
    /// Build and store a module over a stored ring.
    Module {
        #[arg(long, default_value = "ring")]
        ring: String,
        #[arg(long, value_enum)]
        kind: ModuleKind,
        /// Generator shifts for `--kind free`.
        #[arg(long, value_delimiter = ',', default_value = "0")]
        shifts: Vec<i32>,
        /// Coordinates of x in R1 for `--kind cyclic`; sampled when omitted.
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<u32>>,
        #[arg(long, default_value = "module")]
        name: String,
    },
    /// Minimal free resolution and Betti table.
    Resolve {
        #[arg(long, default_value = "module")]
        module: String,
    },
    /// Ext^i(M, N) for i <= n; N defaults to R.
    Ext {
        #[arg(long, default_value = "module")]
        module: String,
        #[arg(long)]
        target: Option<String>,
    },
    /// Bass numbers of a stored ring.
    Bass {
        #[arg(long, default_value = "ring")]
        ring: String,
    },
    /// Betti numbers of the residue field and the Koszul test.
    Koszul {
        #[arg(long, default_value = "ring")]
        ring: String,
    },
    /// Verify a periodic complete resolution read from a JSON list of matrices.
    Certify {
        #[arg(long, default_value = "ring")]
        ring: String,
        #[arg(long)]
        matrices: PathBuf,
        #[arg(long, default_value = "certified")]
        name: String,
    },
    /// Re-verify a stored certificate, or run the bounded Ext check on a module.
    Check {
        #[arg(long, default_value = "module")]
        name: String,
    },
    /// Matrix factorization module from n random pairs.
    Mf {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        terms: usize,
        #[arg(long, default_value = "mf")]
        name: String,
    },
    /// One family module M([x], rank).
    Family {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 2)]
        rank: usize,
        #[arg(long, value_delimiter = ',')]
        x: Option<Vec<u32>>,
        #[arg(long, default_value = "family")]
        name: String,
    },
    /// Pairwise non-isomorphism over sampled family points.
    Sweep {
        #[arg(long, default_value_t = 2)]
        r: usize,
        #[arg(long, default_value_t = 5)]
        count: usize,
        #[arg(long, default_value_t = 3)]
        nmax: usize,
    },
    /// Exhaustive dimension obstruction table.
    Obstruction {
        #[arg(long, value_delimiter = ',', default_value = "2,3,4,5,6")]
        r: Vec<usize>,
        #[arg(long, default_value_t = 3)]
        umax: usize,
        #[arg(long, default_value_t = 3)]
        smax: usize,
        #[arg(long, default_value_t = 3)]
        lenmax: usize,
    },
    /// Audit approximation candidates over S / x^2 S.
    Audit {
        #[arg(long, default_value_t = 2)]
        r: usize,
        /// JSON candidate; the built-in candidates R and R/xR + R when omitted.
        #[arg(long)]
        candidate: Option<PathBuf>,
    },
    /// Run a named verification suite.
    Preset {
        name: String,
        #[arg(long, value_delimiter = ',')]
        r: Option<Vec<usize>>,
        #[arg(long)]
        count: Option<usize>,
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long)]
        depth: Option<usize>,
    },
}

struct Ctx {
    field: PrimeField,
    seed: u64,
    n: usize,
    store: SessionStore,
}

/// Outcome of a subcommand: `Ok(None)` when every check passed, `Ok(Some(witness))` otherwise.
type Outcome = Result<Option<String>>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(None) => ExitCode::from(0),
        Ok(Some(witness)) => {
            eprintln!("check failed: {witness}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_input_error() { 2 } else { 1 })
        }
    }
}

fn run(cli: Cli) -> Outcome {
    let ctx = Ctx {
        field: PrimeField::new(cli.p)?,
        seed: cli.seed.unwrap_or(0),
        n: cli.n,
        store: SessionStore::open(&cli.out)?,
    };
    match cli.cmd {
        Cmd::Ring(a) => cmd_ring(&ctx, a),
        Cmd::Module { ring, kind, shifts, x, name } => cmd_module(&ctx, &ring, kind, &shifts, x, &name),
        Cmd::Resolve { module } => cmd_resolve(&ctx, &module),
        Cmd::Ext { module, target } => cmd_ext(&ctx, &module, target.as_deref()),
        Cmd::Bass { ring } => cmd_bass(&ctx, &ring),
        Cmd::Koszul { ring } => cmd_koszul(&ctx, &ring),
        Cmd::Certify { ring, matrices, name } => cmd_certify(&ctx, &ring, &matrices, &name),
        Cmd::Check { name } => cmd_check(&ctx, &name),
        Cmd::Mf { r, terms, name } => cmd_mf(&ctx, r, terms, &name),
        Cmd::Family { r, rank, x, name } => cmd_family(&ctx, r, rank, x, &name),
        Cmd::Sweep { r, count, nmax } => cmd_sweep(&ctx, r, count, nmax),
        Cmd::Obstruction { r, umax, smax, lenmax } => cmd_obstruction(&ctx, &r, umax, smax, lenmax),
        Cmd::Audit { r, candidate } => cmd_audit(&ctx, r, candidate),
        Cmd::Preset { name, r, count, nmax, depth } => {
            let name: PresetName = name.parse()?;
            let d = ExperimentPreset::defaults(name);
            let preset = ExperimentPreset {
                name,
                p: ctx.field.p(),
                rs: r.unwrap_or(d.rs),
                n_max: nmax.unwrap_or(d.n_max),
                depth: depth.unwrap_or(d.depth),
                count: count.unwrap_or(d.count),
                seed: cli.seed.unwrap_or(d.seed),
            };
            let report = run_preset(&preset)?;
            for path in report.write(&ctx.store)? {
                println!("wrote {}", path.display());
            }
            let failed = report.checks.iter().filter(|c| !c.passed).count();
            println!("{}: {} checks, {} failed", preset.name, report.checks.len(), failed);
            Ok(report.first_failure.map(|c| serde_json::to_string(&c).expect("check serializes")))
        }
    }
}

fn report<T: Serialize>(ctx: &Ctx, stem: &str, value: &T, csv: &str) -> Result<()> {
    let (j, c) = ctx.store.write_report(stem, value, csv)?;
    println!("wrote {} and {}", j.display(), c.display());
    Ok(())
}

fn verdict(ok: bool, witness: impl FnOnce() -> String) -> Outcome {
    Ok(if ok { None } else { Some(witness()) })
}

fn hypersurface(ctx: &Ctx, r: usize) -> Result<Hypersurface> {
    if r < 2 {
        return Err(Error::Input("r must be at least 2".into()));
    }
    Hypersurface::circulant(ctx.field, r, ctx.seed)
}

fn cmd_ring(ctx: &Ctx, a: RingArgs) -> Outcome {
    let artifact = match a.kind {
        RingKind::Circulant => Artifact::Ring(build_circulant_ring(ctx.field, a.r)?.as_algebra().clone()),
        RingKind::Hypersurface => Artifact::Hypersurface(hypersurface(ctx, a.r)?),
        RingKind::Veliche => Artifact::Ring(veliche_ring(ctx.field)?),
        RingKind::SquareZero => Artifact::Ring(square_zero_ring(ctx.field)?),
        RingKind::Quadrics => {
            let vars: Vec<char> = a.vars.chars().collect();
            let qs = a.quadrics.iter().map(|q| QuadraticForm::parse(q, &vars)).collect::<Result<Vec<_>>>()?;
            Artifact::Ring(build_quadratic_quotient(ctx.field, vars.len(), &qs)?)
        }
    };
    let ring = match &artifact {
        Artifact::Ring(r) => r.clone(),
        Artifact::Hypersurface(h) => h.ring.clone(),
        _ => unreachable!(),
    };
    let path = ctx.store.save(&a.name, &artifact)?;
    println!("hilbert {:?}", ring.hilbert_coeffs());
    println!("socle dim {} (m^2 dim {})", ring.socle().dim(), ring.top_piece().dim());
    println!("good shape {}", ring.is_good_shape());
    println!("hash {}", ring.content_hash());
    println!("wrote {}", path.display());
    Ok(None)
}

fn cmd_module(
    ctx: &Ctx,
    ring_name: &str,
    kind: ModuleKind,
    shifts: &[i32],
    x: Option<Vec<u32>>,
    name: &str,
) -> Outcome {
    let ring = ctx.store.load_ring(ring_name)?;
    let m = match kind {
        ModuleKind::Residue => residue_field(&ring, 0),
        ModuleKind::Free => free_module(&ring, shifts),
        ModuleKind::Canonical => canonical_module(&ring),
        ModuleKind::Cyclic => {
            let x = match x {
                Some(x) => x,
                None => match ctx.store.load(ring_name)? {
                    Artifact::Hypersurface(h) => {
                        h.sample_reduction(&mut ChaCha8Rng::seed_from_u64(ctx.seed), |_| true)?
                    }
                    _ => sample_minimal_reduction(&ring, &mut ChaCha8Rng::seed_from_u64(ctx.seed), |_| true)?
                        .coords()
                        .to_vec(),
                },
            };
            let (cert, m) = cyclic_quotient_certificate(&ring, &x)?;
            let path = ctx.store.save(&format!("{name}.cert"), &Artifact::Certificate(cert))?;
            println!("wrote {}", path.display());
            m
        }
    };
    let path = ctx.store.save(name, &Artifact::Module(m.clone()))?;
    println!("hilbert {:?}", m.hilbert());
    println!("wrote {}", path.display());
    Ok(None)
}

fn cmd_resolve(ctx: &Ctx, name: &str) -> Outcome {
    let (m, ring) = ctx.store.load_module(name)?;
    let res = minimal_resolution(&ring, &m, ctx.n);
    let betti = res.betti();
    print!("{}", betti.to_csv());
    report(ctx, &format!("{name}.betti"), betti, &betti.to_csv())?;
    Ok(None)
}

fn cmd_ext(ctx: &Ctx, name: &str, target: Option<&str>) -> Outcome {
    let (m, ring) = ctx.store.load_module(name)?;
    let n = match target {
        Some(t) => ctx.store.load_module(t)?.0,
        None => free_module(&ring, &[0]),
    };
    let e = ext(&ring, &m, &n, ctx.n)?;
    println!("totals {:?}", e.totals());
    report(ctx, &format!("{name}.ext"), &e, &e.to_csv())?;
    Ok(None)
}

fn cmd_bass(ctx: &Ctx, ring_name: &str) -> Outcome {
    let ring = ctx.store.load_ring(ring_name)?;
    let r = ring.dim2();
    if !bass_within_budget(r.max(1), ring.dim(), ctx.n) {
        return Err(Error::Input(format!("Bass numbers to N = {} exceed the desk-scale budget", ctx.n)));
    }
    let bass = bass_numbers(&ring, ctx.n);
    println!("bass {bass:?}");
    let csv: String = std::iter::once("i,mu\n".to_string())
        .chain(bass.iter().enumerate().map(|(i, b)| format!("{i},{b}\n")))
        .collect();
    report(ctx, &format!("{ring_name}.bass"), &bass, &csv)?;
    Ok(None)
}

fn cmd_koszul(ctx: &Ctx, ring_name: &str) -> Outcome {
    let ring = ctx.store.load_ring(ring_name)?;
    let (ok, betti) = koszul_check(&ring, ctx.n);
    println!("koszul {ok}, diagonal {:?}", betti.diagonal(0));
    report(ctx, &format!("{ring_name}.koszul"), &betti, &betti.to_csv())?;
    verdict(ok, || "off-diagonal Betti numbers of k".into())
}

fn cmd_certify(ctx: &Ctx, ring_name: &str, path: &PathBuf, name: &str) -> Outcome {
    let ring = ctx.store.load_ring(ring_name)?;
    let matrices: Vec<ElementMatrix> =
        serde_json::from_str(&std::fs::read_to_string(path)?).map_err(|e| Error::Schema(e.to_string()))?;
    match verify_periodic_cr(&ring, &matrices) {
        Ok((cert, m)) => {
            ctx.store.save(&format!("{name}.cert"), &Artifact::Certificate(cert))?;
            ctx.store.save(name, &Artifact::Module(m.clone()))?;
            println!("accepted; module hilbert {:?}", m.hilbert());
            Ok(None)
        }
        Err(e @ (Error::NotAComplex(_) | Error::CertificateRejected(_))) => Ok(Some(e.to_string())),
        Err(e) => Err(e),
    }
}

fn cmd_check(ctx: &Ctx, name: &str) -> Outcome {
    match ctx.store.load(name)? {
        Artifact::Certificate(c) => {
            println!("{} certificate re-verified", c.kind());
            Ok(None)
        }
        Artifact::Module(_) => {
            let (m, ring) = ctx.store.load_module(name)?;
            let cert = check_gdim_zero_bounded(&ring, &m, ctx.n)?;
            let GdimCertificate::BoundedExt { report: rep, .. } = &cert else { unreachable!() };
            println!(
                "bidual iso {}, Ext(M,R) {:?}, Ext(M*,R) {:?}",
                rep.bidual_iso,
                rep.ext_module.totals(),
                rep.ext_dual.totals()
            );
            report(ctx, &format!("{name}.check"), &cert, &rep.ext_module.to_csv())?;
            verdict(rep.passed, || rep.first_failure.clone().unwrap_or_default())
        }
        other => Err(Error::Input(format!("{name} is a {}; expected a module or certificate", other.kind()))),
    }
}

fn cmd_mf(ctx: &Ctx, r: usize, terms: usize, name: &str) -> Outcome {
    let s = build_circulant_ring(ctx.field, r)?;
    let mf = random_matrix_factorization(&s, terms, ctx.seed)?;
    ctx.store.save(&format!("{name}.ring"), &Artifact::Hypersurface(mf.hypersurface.clone()))?;
    ctx.store.save(name, &Artifact::Module(mf.module.clone()))?;
    ctx.store.save(&format!("{name}.cert"), &Artifact::Certificate(mf.certificate.clone()))?;
    println!("module hilbert {:?}, certificate {}", mf.module.hilbert(), mf.certificate.kind());
    Ok(None)
}

fn cmd_family(ctx: &Ctx, r: usize, rank: usize, x: Option<Vec<u32>>, name: &str) -> Outcome {
    let h = hypersurface(ctx, r)?;
    let mut z = vec![0u32; h.ring.dim1()];
    z[0] = 1;
    let x = match x {
        Some(x) => x,
        None => sample_family_points(&h, &z, 1, ctx.seed)?.remove(0),
    };
    let (m, cert) = family_module(&h, &FamilySpec { x, z, n: rank })?;
    ctx.store.save(&format!("{name}.ring"), &Artifact::Hypersurface(h))?;
    ctx.store.save(name, &Artifact::Module(m.clone()))?;
    ctx.store.save(&format!("{name}.cert"), &Artifact::Certificate(cert))?;
    println!("module hilbert {:?}", m.hilbert());
    Ok(None)
}

fn cmd_sweep(ctx: &Ctx, r: usize, count: usize, nmax: usize) -> Outcome {
    let h = hypersurface(ctx, r)?;
    let mut z = vec![0u32; h.ring.dim1()];
    z[0] = 1;
    let xs = sample_family_points(&h, &z, count, ctx.seed)?;
    let ns: Vec<usize> = (1..=nmax).collect();
    let sweep = pairwise_noniso_sweep(&h, &xs, &ns, &z)?;
    print!("{}", sweep.to_csv());
    report(ctx, "sweep", &sweep, &sweep.to_csv())?;
    verdict(sweep.all_distinct(), || {
        let p = sweep.pairs.iter().find(|p| p.isomorphic).expect("a failing pair");
        format!("modules {} and {} are isomorphic ({})", p.a, p.b, p.witness)
    })
}

fn cmd_obstruction(ctx: &Ctx, rs: &[usize], umax: usize, smax: usize, lenmax: usize) -> Outcome {
    let mut tables = Vec::new();
    let mut csv = String::new();
    for &r in rs {
        let t = obstruction_unsatisfiable(r, umax, smax, lenmax)?;
        println!(
            "r={r}: {} instances, {} satisfy the equation, closed form {}{}",
            t.instances,
            t.satisfiable,
            t.closed_form_matches,
            if t.out_of_hypothesis { " (r < 2: outside the hypothesis)" } else { "" }
        );
        let body = t.to_csv();
        csv.push_str(if csv.is_empty() { &body } else { body.split_once('\n').map_or("", |x| x.1) });
        tables.push(t);
    }
    report(ctx, "obstruction", &tables, &csv)?;
    let bad = tables.iter().find(|t| !t.out_of_hypothesis && (t.satisfiable > 0 || !t.closed_form_matches));
    verdict(bad.is_none(), || format!("r = {}", bad.expect("set").r))
}

fn cmd_audit(ctx: &Ctx, r: usize, candidate: Option<PathBuf>) -> Outcome {
    let s = build_circulant_ring(ctx.field, r)?;
    let x =
        sample_minimal_reduction(s.as_algebra(), &mut ChaCha8Rng::seed_from_u64(ctx.seed), |_| true)?.coords().to_vec();
    let h = build_r_from_reduction(&s, &x)?;
    let ring: &GradedAlgebra = &h.ring;
    let battery = default_battery(&h, &x)?;
    let rx = battery[0].1.clone();
    let candidates: Vec<(String, ApproximationCandidate)> = match candidate {
        Some(path) => {
            let c: ApproximationCandidate =
                serde_json::from_str(&std::fs::read_to_string(&path)?).map_err(|e| Error::Schema(e.to_string()))?;
            vec![(path.display().to_string(), c)]
        }
        None => {
            let free = free_module(ring, &[0]);
            vec![
                ("R".into(), ApproximationCandidate::with_sum_projection(ring, free.clone(), None)),
                ("R/xR + R".into(), ApproximationCandidate::with_sum_projection(ring, rx.direct_sum(&free)?, None)),
            ]
        }
    };
    let mut reports = Vec::new();
    for (label, c) in &candidates {
        let rep = candidate_audit(&h, &x, c, &battery)?;
        println!("{label}: {}", rep.first_failure.as_deref().unwrap_or("survived every check"));
        reports.push(rep);
    }
    let csv: String =
        std::iter::once("candidate,first_failure\n".to_string())
            .chain(candidates.iter().zip(&reports).map(|((l, _), r)| {
                format!("{l},\"{}\"\n", r.first_failure.clone().unwrap_or_default().replace('"', "'"))
            }))
            .collect();
    report(ctx, "audit", &reports, &csv)?;
    // a surviving candidate contradicts the obstruction and is the witness
    let survivor = reports.iter().position(|r| r.survives());
    verdict(survivor.is_none(), || format!("candidate {} survived", candidates[survivor.expect("set")].0))
}
