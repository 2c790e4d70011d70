//! Bass numbers of R and Betti numbers of k against their closed forms.

use gdimlab::algebra::Hypersurface;
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use gdimlab::gdim::{expected_bass, expected_koszul_betti};
use gdimlab::homology::{bass_numbers, koszul_check};

fn main() -> Result<()> {
    let field = PrimeField::new(101)?;
    for r in [2, 3] {
        let h = Hypersurface::circulant(field, r, 0)?;
        let bass = bass_numbers(&h.ring, 6);
        println!("r = {r}: bass {bass:?} (closed form agrees: {})", bass == expected_bass(r, 6));
        let (koszul, betti) = koszul_check(&h.ring, 5);
        let diag = betti.diagonal(0);
        println!("        k: {diag:?}, Koszul {koszul}, closed form agrees: {}", diag == expected_koszul_betti(r, 5));
    }
    Ok(())
}
