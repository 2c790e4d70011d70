//! Minimal free resolutions and Betti tables.

use gdimlab::algebra::Hypersurface;
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use gdimlab::gdim::cyclic_quotient_certificate;
use gdimlab::gmodule::{minimal_resolution, residue_field};
use rand::SeedableRng;

fn main() -> Result<()> {
    let field = PrimeField::new(101)?;
    let h = Hypersurface::circulant(field, 3, 2)?;
    let ring = &h.ring;

    let k = residue_field(ring, 0);
    let res = minimal_resolution(ring, &k, 5);
    println!("Betti table of k:\n{}", res.betti().to_csv());

    let x = h.sample_reduction(&mut rand_chacha::ChaCha8Rng::seed_from_u64(3), |_| true)?;
    let (_, m) = cyclic_quotient_certificate(ring, &x)?;
    let res = minimal_resolution(ring, &m, 6);
    println!("R/xR: diagonal {:?}, linear {}", res.betti().diagonal(0), res.betti().is_linear(0));
    Ok(())
}
