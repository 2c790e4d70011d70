//! The family M([x], n): filtration certificates, indecomposability and a
//! pairwise non-isomorphism sweep.

use gdimlab::algebra::Hypersurface;
use gdimlab::constructions::{
    endomorphism_algebra, family_module, fitting_degree1, pairwise_noniso_sweep, sample_family_points, FamilySpec,
};
use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use gdimlab::gmodule::minimal_generators;

fn main() -> Result<()> {
    let field = PrimeField::new(101)?;
    let h = Hypersurface::circulant(field, 2, 42)?;
    let z = vec![1, 0, 0];
    let xs = sample_family_points(&h, &z, 5, 42)?;

    for n in 1..=3 {
        let (m, cert) = family_module(&h, &FamilySpec { x: xs[0].clone(), z: z.clone(), n })?;
        let end = endomorphism_algebra(&h.ring, &m)?;
        println!(
            "M(x0, {n}): {:?}, {} generators, {} certificate, End dim {} local {}, Fitting dim {}",
            m.dims(),
            minimal_generators(&m).0,
            cert.kind(),
            end.dim(),
            end.is_local()?,
            fitting_degree1(&h.ring, &m).dim()
        );
    }

    let sweep = pairwise_noniso_sweep(&h, &xs, &[1, 2, 3], &z)?;
    println!("{} modules, pairwise distinct: {}", sweep.entries.len(), sweep.all_distinct());
    Ok(())
}
