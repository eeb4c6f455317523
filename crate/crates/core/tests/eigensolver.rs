use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use coulomb2d::assembly::{build_problem, combine_problem, LengthScale};
use coulomb2d::basis::{enumerate_basis, Symmetry};
use coulomb2d::eigensolver::{dense_reference_solve, lanczos_generalized, BlockFactorization, SolveRequest};
use coulomb2d::hamiltonian::SystemParams;
use coulomb2d::sparse::{Scalar, SparseSymMatrix};
use coulomb2d::spectra::solve_problem;

/// Symmetric banded matrix with a dominant diagonal.
fn banded<T: Scalar>(n: usize, band: usize, seed: u64, draw: impl Fn(&mut ChaCha8Rng) -> T, diag: impl Fn(f64) -> T) -> SparseSymMatrix<T> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut entries = Vec::new();
    for j in 0..n {
        entries.push((j as u32, j as u32, diag(4.0 * band as f64 + rng.gen::<f64>())));
        for i in j.saturating_sub(band)..j {
            entries.push((i as u32, j as u32, draw(&mut rng)));
        }
    }
    SparseSymMatrix::from_upper_triplets(n, entries).unwrap()
}

fn residual<T: Scalar>(k: &SparseSymMatrix<T>, x: &[T], b: &[T]) -> f64 {
    let kx = k.mul_vec(x);
    let r: f64 = kx.iter().zip(b).map(|(p, q)| (*p - *q).modulus().powi(2)).sum::<f64>().sqrt();
    let s: f64 = b.iter().map(|q| q.modulus().powi(2)).sum::<f64>().sqrt();
    r / s
}

#[test]
fn banded_factorization_real() {
    for seed in 0..10 {
        let k = banded(50, 6, seed, |r| r.gen_range(-1.0..1.0), |d| d);
        let fact = BlockFactorization::new(&k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(100 + seed);
        let b: Vec<f64> = (0..50).map(|_| rng.gen_range(-1.0..1.0)).collect();
        assert!(residual(&k, &fact.solve(&b), &b) < 1e-12);
    }
}

#[test]
fn banded_factorization_complex() {
    for seed in 0..10 {
        let k = banded(
            50,
            6,
            seed,
            |r| Complex64::new(r.gen_range(-1.0..1.0), r.gen_range(-1.0..1.0)),
            |d| Complex64::new(d, -0.3 * d),
        );
        let fact = BlockFactorization::new(&k).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(200 + seed);
        let b: Vec<Complex64> = (0..50).map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        assert!(residual(&k, &fact.solve(&b), &b) < 1e-12);
    }
}

fn helium(ml: i64, sym: Symmetry, n_base: u32) -> coulomb2d::assembly::ProblemMatrices {
    build_problem(&SystemParams::helium_infinite(), &enumerate_basis(ml, sym, n_base)).unwrap()
}

fn nearest(values: &[Complex64], z: Complex64) -> f64 {
    values.iter().map(|v| (v - z).norm()).fold(f64::INFINITY, f64::min)
}

#[test]
fn lanczos_matches_dense_reference() {
    for (ml, sym) in [(0, Symmetry::Singlet), (0, Symmetry::Triplet), (1, Symmetry::Singlet)] {
        let p = helium(ml, sym, 28);
        let (a, m) = combine_problem::<f64>(&p, LengthScale::real(0.4), 1.0, 0.0).unwrap();
        let dense = dense_reference_solve(&a, &m).unwrap();
        let res = lanczos_generalized(&a, &m, &SolveRequest::new(-12.0, 4)).unwrap();
        for z in &res.eigenvalues {
            assert!(nearest(&dense, *z) < 1e-8 * z.norm(), "{z}");
        }
        let mut sorted: Vec<f64> = dense.iter().map(|z| z.re).collect();
        sorted.sort_by(|x, y| (x + 12.0).abs().total_cmp(&(y + 12.0).abs()));
        for (z, d) in res.eigenvalues.iter().zip(&sorted) {
            assert!((z.re - d).abs() < 1e-8 * d.abs());
        }
    }
}

#[test]
fn complex_lanczos_matches_dense_reference() {
    let p = helium(0, Symmetry::Singlet, 24);
    let (a, m) = combine_problem::<Complex64>(&p, LengthScale::rotated(0.4, 0.3), 1.0, 0.0).unwrap();
    let dense = dense_reference_solve(&a, &m).unwrap();
    let res = lanczos_generalized(&a, &m, &SolveRequest::complex(Complex64::new(-3.0, -0.5), 5)).unwrap();
    assert_eq!(res.eigenvalues.len(), 5);
    for z in &res.eigenvalues {
        assert!(nearest(&dense, *z) < 1e-8 * z.norm(), "{z}");
    }
}

#[test]
fn residual_contract() {
    let p = helium(0, Symmetry::Singlet, 60);
    for scale in [LengthScale::real(0.4), LengthScale::rotated(0.4, 0.3)] {
        let shift = if scale.is_real() { Complex64::new(-12.0, 0.0) } else { Complex64::new(-3.0, -0.3) };
        let req = SolveRequest { shift, ..SolveRequest::new(0.0, 6) };
        let res = solve_problem(&p, scale, 1.0, 0.0, &req).unwrap();
        assert_eq!(res.residuals.len(), res.eigenvalues.len());
        assert!(res.residuals.iter().all(|&r| r <= req.tol), "{:?}", res.residuals);
        let d: Vec<f64> = res.eigenvalues.iter().map(|z| (z - shift).norm()).collect();
        assert!(d.windows(2).all(|w| w[0] <= w[1]));
    }
}

#[test]
fn real_problem_gives_real_eigenvalues() {
    let p = helium(2, Symmetry::Triplet, 48);
    let res = solve_problem(&p, LengthScale::real(0.45), 1.0, 0.0, &SolveRequest::new(-9.0, 6)).unwrap();
    assert!(res.eigenvalues.iter().all(|z| z.im == 0.0));
}

#[test]
fn shift_does_not_move_eigenvalues() {
    let p = helium(0, Symmetry::Singlet, 48);
    let scale = LengthScale::real(0.4);
    let a = solve_problem(&p, scale, 1.0, 0.0, &SolveRequest::new(-12.5, 1)).unwrap();
    let b = solve_problem(&p, scale, 1.0, 0.0, &SolveRequest::new(-11.0, 1)).unwrap();
    assert!((a.eigenvalues[0].re - b.eigenvalues[0].re).abs() < 1e-9);
}

#[test]
fn bound_state_is_stable_under_rotation() {
    let p = helium(0, Symmetry::Singlet, 80);
    let e = |theta: f64| {
        let req = SolveRequest::complex(Complex64::new(-11.9, 0.0), 1);
        solve_problem(&p, LengthScale::rotated(0.4, theta), 1.0, 0.0, &req).unwrap().eigenvalues[0]
    };
    let (a, b) = (e(0.1), e(0.2));
    assert!((a - b).norm() < 1e-8, "{a} {b}");
}

#[test]
fn ground_state_is_variational() {
    let mut last = f64::INFINITY;
    for n_base in [20, 40, 60, 80] {
        let p = helium(0, Symmetry::Singlet, n_base);
        let e = solve_problem(&p, LengthScale::real(0.4), 1.0, 0.0, &SolveRequest::new(-12.5, 1)).unwrap().eigenvalues[0].re;
        assert!(e <= last + 1e-12, "{n_base}: {e} > {last}");
        assert!(e > -16.0);
        last = e;
    }
}

#[test]
fn convergence_failure_is_reported() {
    let p = helium(0, Symmetry::Singlet, 60);
    let req = SolveRequest { max_iter: 3, tol: 1e-14, ..SolveRequest::new(-5.0, 3) };
    let err = solve_problem(&p, LengthScale::real(0.4), 1.0, 0.0, &req).unwrap_err();
    assert!(err.is_convergence(), "{err}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn random_pencils_match_dense(seed in 0u64..1000, n in 10usize..60, band in 1usize..5, shift in -2.0f64..2.0) {
        let a = banded(n, band, seed, |r| r.gen_range(-1.0..1.0), |d| d - 2.0 * band as f64);
        let m = banded(n, band, seed + 7, |r| 0.1 * r.gen_range(-1.0..1.0), |_| 1.0);
        let dense = dense_reference_solve(&a, &m).unwrap();
        let k = 3.min(n);
        let res = match lanczos_generalized(&a, &m, &SolveRequest::new(shift, k)) {
            Ok(r) => r,
            Err(e) => return Err(TestCaseError::reject(e.to_string())),
        };
        let mut by_distance: Vec<f64> = dense.iter().map(|z| z.re).collect();
        by_distance.sort_by(|x, y| (x - shift).abs().total_cmp(&(y - shift).abs()));
        for (z, d) in res.eigenvalues.iter().zip(&by_distance) {
            prop_assert!((z.re - d).abs() < 1e-7 * (1.0 + d.abs()), "{} vs {}", z.re, d);
        }
    }
}
