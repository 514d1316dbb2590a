//! Deterministic low-discrepancy sampling.
//!
//! Certification and Lipschitz estimation sweep bounded regions with Halton
//! sequences rather than a PRNG so that reruns with the same seed are
//! bit-reproducible and coverage is even at modest sample counts. The `seed`
//! is folded in as a start offset into the sequence.

use num_complex::Complex64;

const PRIMES: [u64; 16] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];

/// Radical-inverse of `index` in the given base: the classic van der Corput map.
fn radical_inverse(mut index: u64, base: u64) -> f64 {
    let mut inv = 0.0;
    let mut denom = 1.0;
    while index > 0 {
        denom *= base as f64;
        inv += (index % base) as f64 / denom;
        index /= base;
    }
    inv
}

/// Halton sequence in `dim` dimensions over the unit cube [0,1)^dim.
#[derive(Debug, Clone)]
pub struct Halton {
    dim: usize,
    index: u64,
}

impl Halton {
    /// `seed` offsets the start index so distinct seeds yield distinct but
    /// reproducible point sets. Index 0 (the origin) is always skipped.
    pub fn new(dim: usize, seed: u64) -> Self {
        assert!(dim <= PRIMES.len(), "Halton dimension limited to {}", PRIMES.len());
        Halton {
            dim,
            index: seed.wrapping_mul(7919) % 1_000_003 + 1,
        }
    }

    pub fn next_point(&mut self) -> Vec<f64> {
        let i = self.index;
        self.index += 1;
        (0..self.dim).map(|d| radical_inverse(i, PRIMES[d])).collect()
    }

    /// Next point mapped to the centred cube [-half, half]^dim.
    pub fn next_in_cube(&mut self, half: f64) -> Vec<f64> {
        self.next_point().into_iter().map(|u| (2.0 * u - 1.0) * half).collect()
    }

    /// Next point inside the Euclidean ball of given radius (rejection from
    /// the bounding cube; deterministic because the sequence is).
    pub fn next_in_ball(&mut self, radius: f64) -> Vec<f64> {
        loop {
            let x = self.next_in_cube(radius);
            let r2: f64 = x.iter().map(|v| v * v).sum();
            if r2 <= radius * radius {
                return x;
            }
        }
    }
}

/// Interleave a real vector of length 2n into n complex components.
pub fn reals_to_complex(x: &[f64]) -> Vec<Complex64> {
    assert!(x.len() % 2 == 0);
    x.chunks_exact(2).map(|p| Complex64::new(p[0], p[1])).collect()
}

/// Complex field points in the ball max over sqrt(sum |phi_i|^2) <= radius,
/// i.e. the Euclidean ball in the realified 2n coordinates.
pub fn complex_ball(n: usize, radius: f64, count: usize, seed: u64) -> Vec<Vec<Complex64>> {
    let mut h = Halton::new(2 * n, seed);
    (0..count).map(|_| reals_to_complex(&h.next_in_ball(radius))).collect()
}
