//! Seeded random symbols and vectors for property checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fourier::FourierCoeffs;
use crate::ordered_group::{box_elements, GroupElement, OrderSpec};

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real and imaginary parts uniform in [−1, 1).
pub fn complex(rng: &mut SampleRng) -> Complex64 {
    Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

pub fn unit_complex(rng: &mut SampleRng) -> Complex64 {
    Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI))
}

pub fn vector(rng: &mut SampleRng, len: usize) -> Vec<Complex64> {
    (0..len).map(|_| complex(rng)).collect()
}

/// Which part of the box the support is drawn from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Region {
    Box,
    Positive,
    Negative,
}

/// Up to `terms` distinct frequencies from `[−radius, radius]^d` within
/// `region`, with random complex coefficients.
pub fn sparse_symbol(
    rng: &mut SampleRng,
    spec: &OrderSpec,
    radius: i64,
    terms: usize,
    region: Region,
) -> FourierCoeffs {
    let pool: Vec<GroupElement> = box_elements(spec.dim(), radius)
        .into_iter()
        .filter(|n| match region {
            Region::Box => true,
            Region::Positive => !spec.is_negative(n),
            Region::Negative => spec.is_negative(n),
        })
        .collect();
    let mut f = FourierCoeffs::zero(spec.dim());
    for n in pool.choose_multiple(rng, terms.min(pool.len())) {
        f.set(n.clone(), complex(rng));
    }
    f
}

/// Every frequency of the box (restricted to `region`) with a random
/// coefficient.
pub fn dense_symbol(rng: &mut SampleRng, spec: &OrderSpec, radius: i64, region: Region) -> FourierCoeffs {
    let n = box_elements(spec.dim(), radius).len();
    sparse_symbol(rng, spec, radius, n, region)
}

/// Hankel data on `0..=degree` ⊂ Z with unit-modulus coefficients.
pub fn unit_data_1d(rng: &mut SampleRng, degree: i64) -> FourierCoeffs {
    let mut a = FourierCoeffs::zero(1);
    for k in 0..=degree {
        a.set(GroupElement::from([k]), unit_complex(rng));
    }
    a
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_draws_repeat() {
        let spec = OrderSpec::lex(2).unwrap();
        let a = sparse_symbol(&mut rng(7), &spec, 3, 5, Region::Positive);
        let b = sparse_symbol(&mut rng(7), &spec, 3, 5, Region::Positive);
        assert_eq!(a, b);
        assert_eq!(a.len(), 5);
        assert!(a.support().all(|n| !spec.is_negative(n) && n.sup_norm() <= 3));
    }

    #[test]
    fn unit_data_has_unit_coefficients() {
        let a = unit_data_1d(&mut rng(1), 3);
        assert_eq!(a.len(), 4);
        assert!(a.iter().all(|(_, c)| (c.norm() - 1.0).abs() < 1e-15));
    }
}
