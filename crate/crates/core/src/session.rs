//! JSON import/export and a directory-backed store of named artifacts.
//!
//! Everything on disk is wrapped in `{"schema": 1, "artifact": {"kind": ..., "data": ...}}`.
//! Loading re-runs every validation: rings and hypersurfaces through their
//! constructors, modules and presentations against the ring they name by
//! content hash, certificates through their verifier.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::algebra::{GradedAlgebra, Hypersurface};
use crate::error::{Error, Result};
use crate::gdim::GdimCertificate;
use crate::gmodule::{GradedModule, Presentation};

pub const SCHEMA: u32 = 1;
pub const OUT_ENV: &str = "GDIMLAB_OUT";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StoredPresentation {
    pub ring: String,
    pub presentation: Presentation,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[allow(clippy::large_enum_variant)]
#[serde(tag = "kind", content = "data", rename_all = "snake_case")]
pub enum Artifact {
    Ring(GradedAlgebra),
    Hypersurface(Hypersurface),
    Module(GradedModule),
    Presentation(StoredPresentation),
    Certificate(GdimCertificate),
}

impl Artifact {
    pub fn kind(&self) -> &'static str {
        match self {
            Artifact::Ring(_) => "ring",
            Artifact::Hypersurface(_) => "hypersurface",
            Artifact::Module(_) => "module",
            Artifact::Presentation(_) => "presentation",
            Artifact::Certificate(_) => "certificate",
        }
    }

    /// Hash of the ring this artifact is or refers to.
    pub fn ring_hash(&self) -> String {
        match self {
            Artifact::Ring(r) => r.content_hash(),
            Artifact::Hypersurface(h) => h.ring.content_hash(),
            Artifact::Module(m) => m.ring_tag().hash.clone(),
            Artifact::Presentation(p) => p.ring.clone(),
            Artifact::Certificate(c) => c.ring_hash().to_string(),
        }
    }

    fn as_ring(&self) -> Option<&GradedAlgebra> {
        match self {
            Artifact::Ring(r) => Some(r),
            Artifact::Hypersurface(h) => Some(&h.ring),
            _ => None,
        }
    }
}

#[derive(Serialize, Deserialize)]
struct Envelope {
    schema: u32,
    artifact: Artifact,
}

pub fn export_json(artifact: &Artifact) -> Result<String> {
    let env = Envelope { schema: SCHEMA, artifact: artifact.clone() };
    Ok(serde_json::to_string_pretty(&env)? + "\n")
}

/// Parses and checks structural invariants. Artifacts that refer to a ring
/// still need [`revalidate`].
pub fn import_json(text: &str) -> Result<Artifact> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    match value.get("schema").and_then(|v| v.as_u64()) {
        Some(s) if s == SCHEMA as u64 => {}
        Some(s) => return Err(Error::Schema(format!("unsupported schema {s}"))),
        None => return Err(Error::Schema("missing \"schema\" field".into())),
    }
    let env: Envelope = serde_json::from_value(value)
        .map_err(|e| Error::Schema(e.to_string().trim_start_matches("schema error: ").to_string()))?;
    Ok(env.artifact)
}

/// Checks an artifact against `ring`; certificates are re-verified.
pub fn revalidate(artifact: &Artifact, ring: &GradedAlgebra) -> Result<()> {
    if artifact.ring_hash() != ring.content_hash() {
        return Err(Error::Input("artifact refers to a different ring".into()));
    }
    match artifact {
        Artifact::Ring(_) | Artifact::Hypersurface(_) => Ok(()),
        Artifact::Module(m) => m.validate(ring),
        Artifact::Presentation(p) => p.presentation.check(ring),
        Artifact::Certificate(c) => c.verify(ring).map(|_| ()),
    }
}

fn check_name(name: &str) -> Result<()> {
    if name.is_empty() || !name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.') {
        return Err(Error::Input(format!("artifact name {name:?} must be alphanumeric, '_', '-' or '.'")));
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct SessionStore {
    dir: PathBuf,
}

impl SessionStore {
    pub fn open(dir: impl AsRef<Path>) -> Result<Self> {
        fs::create_dir_all(dir.as_ref())?;
        Ok(SessionStore { dir: dir.as_ref().to_path_buf() })
    }

    /// `$GDIMLAB_OUT` if set, else `default`.
    pub fn from_env_or(default: impl AsRef<Path>) -> Result<Self> {
        match std::env::var_os(OUT_ENV) {
            Some(d) if !d.is_empty() => Self::open(PathBuf::from(d)),
            _ => Self::open(default),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_of(&self, name: &str) -> PathBuf {
        self.dir.join(format!("{name}.json"))
    }

    pub fn save(&self, name: &str, artifact: &Artifact) -> Result<PathBuf> {
        check_name(name)?;
        let path = self.path_of(name);
        fs::write(&path, export_json(artifact)?)?;
        Ok(path)
    }

    /// Loads and re-validates; referenced rings are looked up in the store.
    pub fn load(&self, name: &str) -> Result<Artifact> {
        check_name(name)?;
        let artifact = import_json(&fs::read_to_string(self.path_of(name))?)?;
        if artifact.as_ring().is_none() {
            let ring = self.find_ring(&artifact.ring_hash())?;
            revalidate(&artifact, &ring)?;
        }
        Ok(artifact)
    }

    pub fn load_ring(&self, name: &str) -> Result<GradedAlgebra> {
        match self.load(name)? {
            Artifact::Ring(r) => Ok(r),
            Artifact::Hypersurface(h) => Ok(h.ring),
            other => Err(Error::Input(format!("{name} is a {}, not a ring", other.kind()))),
        }
    }

    pub fn load_module(&self, name: &str) -> Result<(GradedModule, GradedAlgebra)> {
        match self.load(name)? {
            Artifact::Module(m) => {
                let ring = self.find_ring(&m.ring_tag().hash)?;
                Ok((m, ring))
            }
            other => Err(Error::Input(format!("{name} is a {}, not a module", other.kind()))),
        }
    }

    /// Names of stored artifacts (reports excluded), sorted.
    pub fn names(&self) -> Result<Vec<String>> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            if path.extension().and_then(|e| e.to_str()) == Some("json") {
                if let Some(stem) = path.file_stem().and_then(|s| s.to_str()).filter(|s| !s.ends_with(".report")) {
                    out.push(stem.to_string());
                }
            }
        }
        out.sort();
        Ok(out)
    }

    /// First stored ring (or hypersurface) with the given content hash.
    pub fn find_ring(&self, hash: &str) -> Result<GradedAlgebra> {
        for name in self.names()? {
            let Ok(text) = fs::read_to_string(self.path_of(&name)) else { continue };
            if let Ok(a) = import_json(&text) {
                if let Some(r) = a.as_ring() {
                    if r.content_hash() == hash {
                        return Ok(r.clone());
                    }
                }
            }
        }
        Err(Error::Input(format!("no ring with hash {hash} in {}", self.dir.display())))
    }

    /// Writes `<stem>.report.json` and `<stem>.csv`.
    pub fn write_report<T: Serialize>(&self, stem: &str, report: &T, csv: &str) -> Result<(PathBuf, PathBuf)> {
        check_name(stem)?;
        let json_path = self.dir.join(format!("{stem}.report.json"));
        let csv_path = self.dir.join(format!("{stem}.csv"));
        fs::write(&json_path, serde_json::to_string_pretty(report)? + "\n")?;
        fs::write(&csv_path, csv)?;
        Ok((json_path, csv_path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::build_circulant_ring;
    use crate::exactla::PrimeField;
    use crate::gdim::cyclic_quotient_certificate;
    use rand::SeedableRng;

    #[test]
    fn ring_round_trip_and_tamper() {
        let s = build_circulant_ring(PrimeField::new(101).unwrap(), 3).unwrap();
        let a = Artifact::Ring(s.as_algebra().clone());
        let text = export_json(&a).unwrap();
        assert_eq!(import_json(&text).unwrap(), a);
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let t = &mut v["artifact"]["data"]["mult11"];
        let old = t[0][1][0].as_i64().unwrap();
        t[0][1][0] = serde_json::json!(old + 1);
        let err = import_json(&v.to_string()).unwrap_err();
        assert!(err.is_input_error());
        let mut v: serde_json::Value = serde_json::from_str(&text).unwrap();
        v["schema"] = serde_json::json!(2);
        assert!(matches!(import_json(&v.to_string()), Err(Error::Schema(_))));
    }

    #[test]
    fn store_reverifies_certificates() {
        let dir = tempfile::tempdir().unwrap();
        let store = SessionStore::open(dir.path()).unwrap();
        let h = Hypersurface::circulant(PrimeField::new(101).unwrap(), 2, 3).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let x = h.sample_reduction(&mut rng, |_| true).unwrap();
        let (cert, m) = cyclic_quotient_certificate(&h.ring, &x).unwrap();
        store.save("hyp", &Artifact::Hypersurface(h.clone())).unwrap();
        store.save("m", &Artifact::Module(m.clone())).unwrap();
        store.save("c", &Artifact::Certificate(cert.clone())).unwrap();
        assert_eq!(store.load("hyp").unwrap(), Artifact::Hypersurface(h.clone()));
        assert_eq!(store.load_module("m").unwrap(), (m, h.ring.clone()));
        assert_eq!(store.load("c").unwrap(), Artifact::Certificate(cert));
        assert_eq!(store.names().unwrap(), ["c", "hyp", "m"]);
        assert!(store.save("../x", &Artifact::Ring(h.ring)).unwrap_err().is_input_error());
    }
}
