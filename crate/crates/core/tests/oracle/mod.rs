//! Reference computations written without the library's decompositions.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub type M = DMatrix<Complex64>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian(rows: usize, cols: usize, rng: &mut ChaCha8Rng) -> M {
    M::from_fn(rows, cols, |_, _| {
        let re: f64 = StandardNormal.sample(rng);
        let im: f64 = StandardNormal.sample(rng);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    })
}

/// `ln |det a|` by Gaussian elimination with partial pivoting.
pub fn ln_abs_det(a: &M) -> f64 {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut acc = 0.0;
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[(x, col)].norm().total_cmp(&m[(y, col)].norm()))
            .unwrap();
        if m[(pivot, col)].norm() == 0.0 {
            return f64::NEG_INFINITY;
        }
        m.swap_rows(col, pivot);
        let p = m[(col, col)];
        acc += p.norm().ln();
        for r in col + 1..n {
            let f = m[(r, col)] / p;
            for c in col..n {
                let v = m[(col, c)];
                m[(r, c)] -= f * v;
            }
        }
    }
    acc
}

pub fn log2_det_ratio(num: &M, den: &M) -> f64 {
    (ln_abs_det(num) - ln_abs_det(den)) / std::f64::consts::LN_2
}

/// Covariance `sum_i s_i A_i A_iᴴ` plus `base * I`.
pub fn covariance(base: f64, terms: &[(f64, M)]) -> M {
    let n = terms.first().map_or(0, |(_, a)| a.nrows());
    let mut c = M::identity(n, n) * Complex64::new(base, 0.0);
    for (s, a) in terms {
        c += a * a.adjoint() * Complex64::new(*s, 0.0);
    }
    c
}

/// Bob `j`'s rate with every covariance built from raw channels and
/// precoders: `y = H_j (sum_i W_i s_i + W v) + n`.
pub fn bob_rate(h: &M, precoders: &[M], noise: &M, sigma_u: &[f64], sigma_v: f64, j: usize) -> f64 {
    let mut interference: Vec<(f64, M)> = precoders
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(i, w)| (sigma_u[i], h * w))
        .collect();
    interference.push((sigma_v, h * noise));
    let mut all = interference.clone();
    all.push((sigma_u[j], h * &precoders[j]));
    log2_det_ratio(&covariance(1.0, &all), &covariance(1.0, &interference))
}

pub fn eve_rate(g: &M, precoders: &[M], noise: &M, sigma_u: &[f64], sigma_v: f64, j: usize, eps: f64) -> f64 {
    let mut interference: Vec<(f64, M)> = precoders
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != j)
        .map(|(i, w)| (sigma_u[i], g * w))
        .collect();
    interference.push((sigma_v, g * noise));
    let mut all = interference.clone();
    all.push((sigma_u[j], g * &precoders[j]));
    log2_det_ratio(&covariance(eps, &all), &covariance(eps, &interference))
}

/// Water-filling by bisection on the water level.
pub fn waterfill_bisect(gains: &[f64], budget: f64) -> Vec<f64> {
    let used = |mu: f64| gains.iter().map(|g| (mu - 1.0 / g).max(0.0)).sum::<f64>();
    let mut lo = 0.0;
    let mut hi = budget + gains.iter().map(|g| 1.0 / g).fold(0.0, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if used(mid) < budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mu = 0.5 * (lo + hi);
    gains.iter().map(|g| (mu - 1.0 / g).max(0.0)).collect()
}

pub fn capacity(gains: &[f64], powers: &[f64]) -> f64 {
    gains.iter().zip(powers).map(|(g, p)| (1.0 + g * p).log2()).sum()
}

/// Orthonormal basis of the complement of the column span of `a`, by
/// modified Gram-Schmidt over `[a | I]`.
pub fn complement_gram_schmidt(a: &M, tol: f64) -> M {
    let n = a.nrows();
    let mut basis: Vec<nalgebra::DVector<Complex64>> = Vec::new();
    let candidates = a.column_iter().map(|c| (c.into_owned(), true)).chain(
        (0..n).map(|k| (M::identity(n, n).column(k).into_owned(), false)),
    );
    let mut complement = Vec::new();
    for (mut v, from_a) in candidates {
        for _ in 0..2 {
            for b in &basis {
                let proj = b.dotc(&v);
                v -= b * proj;
            }
        }
        let norm = v.norm();
        if norm > tol {
            let u = v / Complex64::new(norm, 0.0);
            if !from_a {
                complement.push(u.clone());
            }
            basis.push(u);
        }
    }
    M::from_columns(&complement)
}

pub fn max_abs(a: &M) -> f64 {
    a.iter().map(|z| z.norm()).fold(0.0, f64::max)
}
