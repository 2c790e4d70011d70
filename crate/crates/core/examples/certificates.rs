//! Exact certificates of G-dimension zero and how bad ones are rejected.

use gdimlab::algebra::{Element, Hypersurface};
use gdimlab::constructions::veliche_fixture;
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use gdimlab::gdim::{cyclic_quotient_certificate, verify_periodic_cr, verify_theorem31};
use gdimlab::gmodule::ElementMatrix;
use rand::SeedableRng;

fn main() -> Result<()> {
    let field = PrimeField::new(101)?;
    let h = Hypersurface::circulant(field, 2, 5)?;
    let ring = &h.ring;
    let x = h.sample_reduction(&mut rand_chacha::ChaCha8Rng::seed_from_u64(0), |_| true)?;

    let (cert, m) = cyclic_quotient_certificate(ring, &x)?;
    println!("R/xR: {} certificate, module {:?}", cert.kind(), m.hilbert());
    let report = verify_theorem31(ring, &m, &cert, 4);
    println!("consequences all hold: {}", report.all_ok());

    // (x) alone is a complex only when x^2 = 0 in R
    let single = ElementMatrix::new(1, 1, vec![Element::linear(x)])?;
    match verify_periodic_cr(ring, &[single]) {
        Ok(_) => println!("(x) accepted"),
        Err(e) => println!("(x) rejected: {e}"),
    }

    let (vring, vm, vcert) = veliche_fixture(field)?;
    println!("Veliche: ring {:?}, module {:?}, {}", vring.hilbert_coeffs(), vm.hilbert(), vcert.kind());
    Ok(())
}
