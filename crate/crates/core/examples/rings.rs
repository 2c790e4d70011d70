//! Building rings: circulant truncations, hypersurfaces, explicit quadrics.

use gdimlab::algebra::{build_circulant_ring, build_quadratic_quotient, veliche_ring, Hypersurface, QuadraticForm};
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;

fn main() -> Result<()> {
    let field = PrimeField::new(101)?;

    for r in 2..=4 {
        let s = build_circulant_ring(field, r)?;
        let h = Hypersurface::circulant(field, r, 7)?;
        println!(
            "r = {r}: S truncation {:?}, R = S/fS {:?}, socle = m^2: {}",
            s.as_algebra().hilbert_coeffs(),
            h.ring.hilbert_coeffs(),
            h.ring.socle() == h.ring.top_piece()
        );
    }

    let v = veliche_ring(field)?;
    println!("Veliche ring: {:?}, good shape {}", v.hilbert_coeffs(), v.is_good_shape());

    let vars = ['x', 'y'];
    let qs = ["x^2", "y^2"].iter().map(|q| QuadraticForm::parse(q, &vars)).collect::<Result<Vec<_>>>()?;
    let ci = build_quadratic_quotient(field, 2, &qs)?;
    println!("k[x,y]/(x^2, y^2): {:?}, good shape {}", ci.hilbert_coeffs(), ci.is_good_shape());
    Ok(())
}
