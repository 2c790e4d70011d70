//! Saving, loading and re-verifying artifacts.

use gdimlab::algebra::Hypersurface;
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use gdimlab::gdim::cyclic_quotient_certificate;
use gdimlab::session::{export_json, import_json, Artifact, SessionStore};
use rand::SeedableRng;

fn main() -> Result<()> {
    let dir = std::env::temp_dir().join("gdimlab-example-store");
    let store = SessionStore::open(&dir)?;
    let h = Hypersurface::circulant(PrimeField::new(101)?, 3, 0)?;
    let x = h.sample_reduction(&mut rand_chacha::ChaCha8Rng::seed_from_u64(0), |_| true)?;
    let (cert, m) = cyclic_quotient_certificate(&h.ring, &x)?;

    store.save("ring", &Artifact::Hypersurface(h.clone()))?;
    store.save("rx", &Artifact::Module(m))?;
    store.save("rx.cert", &Artifact::Certificate(cert))?;
    println!("stored: {:?}", store.names()?);
    println!("certificate reloaded and re-verified: {}", store.load("rx.cert")?.kind());

    let text = export_json(&Artifact::Ring(h.ring.clone()))?;
    let broken = text.replacen("\"mult11\": [", "\"mult11\": [[[1]],", 1);
    println!("tampered ring: {}", import_json(&broken).unwrap_err());
    Ok(())
}
