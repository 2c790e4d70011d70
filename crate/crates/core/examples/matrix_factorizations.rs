//! Exterior-algebra matrix factorizations and their modules.

use gdimlab::algebra::build_circulant_ring;
use gdimlab::constructions::{exterior_phi_psi, random_matrix_factorization, random_pairs, Contraction};
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use rand::SeedableRng;

fn main() -> Result<()> {
    let field = PrimeField::new(101)?;
    let s = build_circulant_ring(field, 3)?;
    for n in 1..=3 {
        let mf = random_matrix_factorization(&s, n, 11)?;
        println!(
            "n = {n}: {}x{} matrices, module {:?}, {}",
            mf.data.phi.rows(),
            mf.data.phi.cols(),
            mf.module.dims(),
            mf.certificate.kind()
        );
    }
    let pairs = random_pairs(&s, 2, &mut rand_chacha::ChaCha8Rng::seed_from_u64(0));
    match exterior_phi_psi(&s, &pairs, Contraction::Unsigned) {
        Ok(_) => println!("unsigned contraction accepted"),
        Err(e) => println!("unsigned contraction, two pairs: {e}"),
    }
    Ok(())
}
