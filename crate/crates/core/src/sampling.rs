//! Seeded sample generators shared by the property tests and the harness.

use nalgebra::DMatrix;
use rand::Rng;

/// Magnitudes log-uniform on `[lo, hi]` with independent random signs.
pub fn signed_log_uniform<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    (0..n)
        .map(|_| {
            let mag = log_uniform(rng, lo, hi);
            if rng.gen::<bool>() {
                mag
            } else {
                -mag
            }
        })
        .collect()
}

pub fn log_uniform<R: Rng + ?Sized>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.gen_range(lo.ln()..=hi.ln())).exp()
}

/// Entries uniform on `[-half_width, half_width]`.
pub fn uniform_box<R: Rng + ?Sized>(rng: &mut R, n: usize, half_width: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-half_width..=half_width)).collect()
}

/// Strictly positive entries, log-uniform on `[lo, hi]`, sorted descending.
pub fn convex_sorted<R: Rng + ?Sized>(rng: &mut R, n: usize, lo: f64, hi: f64) -> Vec<f64> {
    let mut v: Vec<f64> = (0..n).map(|_| log_uniform(rng, lo, hi)).collect();
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Positive descending curvatures in the pinching regime
/// `kappa_l >= delta kappa_1`, `kappa_{l+1} <= delta' kappa_1`.
///
/// `kappa_1` is log-uniform on `[1, 1e3]`; indices are 1-based in the
/// description, so entries `2..=l` lie in `[delta kappa_1, kappa_1]` and the
/// rest in `(0, delta' kappa_1]`.
pub fn pinched<R: Rng + ?Sized>(rng: &mut R, n: usize, l: usize, delta: f64, delta_prime: f64) -> Vec<f64> {
    let k1 = log_uniform(rng, 1.0, 1e3);
    let mut v = Vec::with_capacity(n);
    v.push(k1);
    for _ in 1..l.min(n) {
        v.push(rng.gen_range(delta * k1..=k1));
    }
    while v.len() < n {
        // (0, delta' k1]
        let x = delta_prime * k1 * (1.0 - rng.gen::<f64>());
        v.push(x);
    }
    v.sort_by(|a, b| b.partial_cmp(a).unwrap());
    v
}

/// Symmetric matrix with standard-normal-like entries (sum of uniforms).
pub fn symmetric<R: Rng + ?Sized>(rng: &mut R, n: usize, scale: f64) -> DMatrix<f64> {
    let mut m = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let x = scale * rng.gen_range(-1.0..=1.0);
            m[(i, j)] = x;
            m[(j, i)] = x;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pinched_samples_respect_the_regime() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..500 {
            let v = pinched(&mut rng, 6, 3, 0.2, 0.01);
            assert!(v.windows(2).all(|w| w[0] >= w[1]));
            assert!(v[2] >= 0.2 * v[0]);
            assert!(v[3] <= 0.01 * v[0] && v[5] > 0.0);
        }
    }

    #[test]
    fn log_uniform_stays_in_range() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for x in signed_log_uniform(&mut rng, 1000, 1e-2, 10.0) {
            assert!((1e-2..=10.0).contains(&x.abs()));
        }
    }
}
