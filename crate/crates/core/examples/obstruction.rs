//! Why no module of G-dimension zero approximates k over S / x^2 S.

use gdimlab::algebra::{build_circulant_ring, sample_minimal_reduction};
use gdimlab::approximation::{
    build_r_from_reduction, candidate_audit, obstruction_unsatisfiable, y_dimension_constraints, ApproximationCandidate,
};
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use gdimlab::gdim::cyclic_quotient_certificate;
use gdimlab::gmodule::free_module;
use rand::SeedableRng;

fn main() -> Result<()> {
    for r in 2..=6 {
        let t = obstruction_unsatisfiable(r, 3, 3, 3)?;
        println!(
            "r = {r}: {} shapes, {} satisfiable, margin formula {}",
            t.instances, t.satisfiable, t.closed_form_matches
        );
    }
    let c = y_dimension_constraints(2, 1, &[2])?;
    println!("r = 2, u = 1, s = [2]: Y dims ({}, {}, {}), margin {}", c.y0, c.y1, c.y2, c.margin);

    let field = PrimeField::new(101)?;
    let s = build_circulant_ring(field, 2)?;
    let x = sample_minimal_reduction(s.as_algebra(), &mut rand_chacha::ChaCha8Rng::seed_from_u64(0), |_| true)?;
    let x = x.coords().to_vec();
    let h = build_r_from_reduction(&s, &x)?;
    let (cert, rx) = cyclic_quotient_certificate(&h.ring, &x)?;
    let battery = vec![("R/xR".to_string(), rx.clone(), cert)];
    let free = free_module(&h.ring, &[0]);
    for (name, xm) in [("R", free.clone()), ("R/xR + R", rx.direct_sum(&free)?)] {
        let cand = ApproximationCandidate::with_sum_projection(&h.ring, xm, None);
        let rep = candidate_audit(&h, &x, &cand, &battery)?;
        println!(
            "X = {name}: Y dims {:?}, dimension equation {}, first failure: {}",
            rep.y_dims,
            rep.dimension_equation_holds,
            rep.first_failure.unwrap_or_default()
        );
    }
    Ok(())
}
