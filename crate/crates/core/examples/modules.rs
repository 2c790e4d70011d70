//! Graded modules from presentations, plus the standard ones.

use gdimlab::algebra::{Element, Hypersurface};
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use gdimlab::gmodule::{
    canonical_module, coker, free_module, is_free, minimal_generators, residue_field, ElementMatrix, Presentation,
};

fn main() -> Result<()> {
    let field = PrimeField::new(101)?;
    let h = Hypersurface::circulant(field, 2, 1)?;
    let ring = &h.ring;

    let k = residue_field(ring, 0);
    let f = free_module(ring, &[0, 1]);
    let omega = canonical_module(ring);
    println!("k {:?}", k.hilbert());
    println!("R + R(-1) {:?}, free {}", f.hilbert(), is_free(ring, &f));
    println!("omega {:?}, generators {}", omega.hilbert(), minimal_generators(&omega).0);

    // R^2 modulo one linear relation
    let a = Element::linear(vec![1, 2, 0]);
    let b = Element::linear(vec![0, 1, 5]);
    let pres = Presentation::linear(ElementMatrix::new(2, 1, vec![a, b])?);
    let m = coker(ring, &pres)?.module;
    println!("coker {:?}, generators {}, free {}", m.hilbert(), minimal_generators(&m).0, is_free(ring, &m));

    let sum = m.direct_sum(&k)?;
    println!("coker + k {:?}", sum.hilbert());
    Ok(())
}
