//! Oracles shared by the integration tests. Nothing here calls the library's
//! linear algebra.

#![allow(dead_code)]

use gdimlab::algebra::{build_circulant_ring, sample_minimal_reduction, Hypersurface};
use gdimlab::approximation::build_r_from_reduction;
use gdimlab::exactla::PrimeField;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn field() -> PrimeField {
    PrimeField::new(101).unwrap()
}

fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = r * a % p;
        }
        a = a * a % p;
        e >>= 1;
    }
    r
}

/// Rank by textbook Gaussian elimination mod `p`.
pub fn rank_mod_p(rows: &[Vec<u64>], p: u64) -> usize {
    let mut m: Vec<Vec<u64>> = rows.iter().map(|r| r.iter().map(|&x| x % p).collect()).collect();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&i| m[i][c] != 0) else { continue };
        m.swap(rank, piv);
        let inv = pow_mod(m[rank][c], p - 2, p);
        for x in m[rank].iter_mut() {
            *x = *x * inv % p;
        }
        for i in 0..m.len() {
            if i != rank && m[i][c] != 0 {
                let f = m[i][c];
                let pivot = m[rank].clone();
                for (x, y) in m[i].iter_mut().zip(&pivot) {
                    *x = (*x + p * p - f * y) % p;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Every vector of `F_q^n`.
pub fn all_vectors(q: u64, n: usize) -> Vec<Vec<u64>> {
    let mut out = vec![vec![]];
    for _ in 0..n {
        out = out.into_iter().flat_map(|v| (0..q).map(move |a| [v.clone(), vec![a]].concat())).collect();
    }
    out
}

/// `R = S/x^2 S` over the circulant `S` for a seeded minimal reduction `x`.
pub fn good_ring(r: usize, seed: u64) -> (Hypersurface, Vec<u32>) {
    let s = build_circulant_ring(field(), r).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let x = sample_minimal_reduction(s.as_algebra(), &mut rng, |_| true).unwrap();
    let h = build_r_from_reduction(&s, x.coords()).unwrap();
    (h, x.coords().to_vec())
}
