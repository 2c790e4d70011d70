//! Over k[x,y]/(x,y)^2 only free modules have G-dimension zero.

use gdimlab::error::Result;
use gdimlab::exactla::PrimeField;
use gdimlab::gdim::{check_gdim_zero_bounded, GdimCertificate};
use gdimlab::gmodule::{free_module, residue_field};
use gdimlab::homology::{bidual_check, ext};
use gdimlab::preset::{random_two_generated, square_zero_ring};
use rand::SeedableRng;

fn main() -> Result<()> {
    let ring = square_zero_ring(PrimeField::new(101)?)?;
    let k = residue_field(&ring, 0);
    println!("k reflexive: {}", bidual_check(&ring, &k)?.0);
    println!("Ext^1(k, R) dim {}", ext(&ring, &k, &free_module(&ring, &[0]), 1)?.total(1));

    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
    for i in 0..5 {
        let m = random_two_generated(&ring, &mut rng)?;
        if let GdimCertificate::BoundedExt { report, .. } = check_gdim_zero_bounded(&ring, &m, 4)? {
            println!("module {i} {:?}: {}", m.hilbert(), report.first_failure.unwrap_or("passed".into()));
        }
    }
    Ok(())
}
