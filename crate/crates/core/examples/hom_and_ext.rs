//! Hom spaces, duals, the bidual map and Ext.

use gdimlab::algebra::Hypersurface;
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use gdimlab::gdim::cyclic_quotient_certificate;
use gdimlab::gmodule::{free_module, residue_field};
use gdimlab::homology::{bidual_check, dual, ext, hom_space};
use rand::SeedableRng;

fn main() -> Result<()> {
    let field = PrimeField::new(101)?;
    let h = Hypersurface::circulant(field, 2, 4)?;
    let ring = &h.ring;
    let r = free_module(ring, &[0]);
    let k = residue_field(ring, 0);

    println!("Hom(k, R) by degree: {:?}", hom_space(ring, &k, &r)?.graded_dims());
    println!("Ext^i(k, R), i <= 4: {:?}", ext(ring, &k, &r, 4)?.totals());
    println!("k reflexive: {}", bidual_check(ring, &k)?.0);

    let x = h.sample_reduction(&mut rand_chacha::ChaCha8Rng::seed_from_u64(1), |_| true)?;
    let (_, m) = cyclic_quotient_certificate(ring, &x)?;
    println!("(R/xR)* {:?}", dual(ring, &m)?.hilbert());
    println!("R/xR reflexive: {}", bidual_check(ring, &m)?.0);
    println!("Ext^i(R/xR, R), i <= 4: {:?}", ext(ring, &m, &r, 4)?.totals());
    Ok(())
}
