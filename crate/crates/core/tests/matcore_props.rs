mod oracle;

use num_complex::Complex64;
use oracle::{gaussian, ln_abs_det, max_abs, rng, M};
use proptest::prelude::*;
use secrecy_core::matcore::{logdet_hermitian_psd, numerical_rank, orth_complement, whitener};
use secrecy_core::Tolerances;

fn projector(t: &M) -> M {
    t * t.adjoint()
}

/// `rows x cols` matrix of rank at most `rank`.
fn low_rank(rows: usize, cols: usize, rank: usize, seed: u64) -> M {
    let mut r = rng(seed);
    gaussian(rows, rank, &mut r) * gaussian(rank, cols, &mut r)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn complement_rank_nullity(n in 1usize..8, m in 1usize..8, rank in 1usize..8, seed: u64) {
        let tol = Tolerances::default();
        let a = low_rank(n, m, rank.min(n).min(m), seed);
        let r = numerical_rank(&a, &tol);
        if r == n {
            prop_assert!(orth_complement(&a, &tol).is_err());
            return Ok(());
        }
        let t = orth_complement(&a, &tol).unwrap();
        prop_assert_eq!(t.ncols() + r, n);
        prop_assert!(max_abs(&(t.adjoint() * &t - M::identity(t.ncols(), t.ncols()))) < 1e-10);
        prop_assert!(max_abs(&(a.adjoint() * &t)) < 1e-8 * max_abs(&a).max(1.0));
        let gs = oracle::complement_gram_schmidt(&a, 1e-8);
        prop_assert!(max_abs(&(projector(&t) - projector(&gs))) < 1e-8);
    }

    #[test]
    fn complement_follows_unitary_rotation(n in 2usize..7, m in 1usize..4, seed: u64) {
        let tol = Tolerances::default();
        let mut r = rng(seed);
        let a = gaussian(n, m.min(n - 1), &mut r);
        let q = orth_complement(&M::zeros(n, 0), &tol).unwrap();
        let u = {
            let raw = gaussian(n, n, &mut r);
            raw.qr().q()
        };
        prop_assert!(max_abs(&(q - M::identity(n, n))) < 1e-12);
        let t = orth_complement(&a, &tol).unwrap();
        let tu = orth_complement(&(&u * &a), &tol).unwrap();
        let rotated = &u * projector(&t) * u.adjoint();
        prop_assert!(max_abs(&(rotated - projector(&tu))) < 1e-8);
    }

    #[test]
    fn logdet_matches_elimination(n in 1usize..7, seed: u64, c in 0.01f64..100.0) {
        let tol = Tolerances::default();
        let mut r = rng(seed);
        let g = gaussian(n, n + 2, &mut r);
        let m = &g * g.adjoint() + M::identity(n, n);
        let ld = logdet_hermitian_psd(&m, &tol).unwrap();
        prop_assert!((ld - ln_abs_det(&m)).abs() < 1e-9 * ld.abs().max(1.0));
        let scaled = logdet_hermitian_psd(&(&m * Complex64::new(c, 0.0)), &tol).unwrap();
        prop_assert!((scaled - ld - n as f64 * c.ln()).abs() < 1e-9 * scaled.abs().max(1.0));
    }
}

#[test]
fn whitener_over_random_pd_matrices() {
    let tol = Tolerances::default();
    for seed in 0..100 {
        let mut r = rng(seed);
        let n = 1 + (seed as usize % 6);
        let g = gaussian(n, n, &mut r);
        let m = &g * g.adjoint() + M::identity(n, n) * Complex64::new(0.1, 0.0);
        let f = whitener(&m, &tol).unwrap();
        let residual = max_abs(&(&f * &m * f.adjoint() - M::identity(n, n)));
        assert!(residual < 1e-9, "seed {seed}: {residual}");
    }
}

#[test]
fn whitener_rejects_singular() {
    let tol = Tolerances::default();
    let a = low_rank(4, 4, 2, 3);
    assert!(whitener(&(&a * a.adjoint()), &tol).is_err());
}
