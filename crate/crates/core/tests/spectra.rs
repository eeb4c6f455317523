use num_complex::Complex64;
use proptest::prelude::*;

use coulomb2d::assembly::{build_problem, LengthScale, ProblemMatrices};
use coulomb2d::basis::{enumerate_basis, Symmetry};
use coulomb2d::eigensolver::{SolveRequest, SpectrumResult};
use coulomb2d::hamiltonian::SystemParams;
use coulomb2d::spectra::{
    b_norm, defect_energy, hydrogen2d_energy, inverse_r12_expectation, label_series, lowest_energy, quantum_defect,
    resonance_filter, solve_problem, HELIUM_THRESHOLD,
};

fn helium(ml: i64, sym: Symmetry, n_base: u32) -> ProblemMatrices {
    build_problem(&SystemParams::helium_infinite(), &enumerate_basis(ml, sym, n_base)).unwrap()
}

fn real_levels(p: &ProblemMatrices, shift: f64, k: usize) -> Vec<f64> {
    let res = solve_problem(p, LengthScale::real(0.4), 1.0, 0.0, &SolveRequest::new(shift, k)).unwrap();
    let mut e: Vec<f64> = res.eigenvalues.iter().map(|z| z.re).collect();
    e.sort_by(f64::total_cmp);
    e
}

#[test]
fn kramers_pairs_coincide() {
    for sym in [Symmetry::Singlet, Symmetry::Triplet] {
        for ml in 1..=2 {
            let plus = real_levels(&helium(ml, sym, 40), -9.0, 4);
            let minus = real_levels(&helium(-ml, sym, 40), -9.0, 4);
            for (a, b) in plus.iter().zip(&minus) {
                assert!((a - b).abs() <= 1e-10 * a.abs(), "{sym} {ml}: {a} {b}");
            }
        }
    }
}

#[test]
fn hellmann_feynman_matches_slope() {
    let p = helium(0, Symmetry::Singlet, 40);
    let alpha = 0.4;
    let res = solve_problem(&p, LengthScale::real(alpha), 1.0, 0.0, &SolveRequest::new(-12.5, 1)).unwrap();
    let c: Vec<f64> = res.vectors[0].iter().map(|z| z.re).collect();
    let expectation = inverse_r12_expectation(&p, alpha, &c).unwrap();
    let h = 1e-4;
    let slope = (lowest_energy(&p, alpha, 1.0 + h, -12.5).unwrap() - lowest_energy(&p, alpha, 1.0 - h, -12.5).unwrap()) / (2.0 * h);
    assert!((slope - expectation).abs() < 1e-4, "{slope} {expectation}");
    assert!(expectation > 0.0);
}

#[test]
fn b_norm_scaling() {
    let p = helium(0, Symmetry::Singlet, 12);
    let c: Vec<f64> = (0..p.dim()).map(|i| 1.0 / (1.0 + i as f64)).collect();
    let two: Vec<f64> = c.iter().map(|x| 2.0 * x).collect();
    assert_eq!(b_norm(&vec![0.0; p.dim()], &p.metric).unwrap(), 0.0);
    let n = b_norm(&c, &p.metric).unwrap();
    assert!(n > 0.0);
    assert!((b_norm(&two, &p.metric).unwrap() - 4.0 * n).abs() <= 1e-14 * n);
    assert!(b_norm(&c[1..], &p.metric).is_err());
}

#[test]
fn hydrogen_series() {
    for n in 1..10 {
        let want = -2.0 * 4.0 / ((2 * n - 1) as f64).powi(2);
        assert!((hydrogen2d_energy(n, 2.0).unwrap() - want).abs() < 1e-14);
        assert!((defect_energy(n, 0.0) - HELIUM_THRESHOLD - hydrogen2d_energy(n, 1.0).unwrap()).abs() < 1e-12);
    }
}

#[test]
fn series_labels_count_from_start() {
    let levels = label_series(&[-8.5, -11.9, -7.0, -8.2], 0, Symmetry::Singlet).unwrap();
    let n: Vec<u32> = levels.iter().map(|l| l.label.n).collect();
    assert_eq!(n, [1, 2, 3]);
    assert_eq!(levels[0].energy, -11.9);
}

fn spectrum(values: &[Complex64]) -> SpectrumResult {
    SpectrumResult {
        eigenvalues: values.to_vec(),
        residuals: vec![0.0; values.len()],
        iterations: 0,
        restarts: 0,
        dimension: values.len(),
        request: SolveRequest::new(0.0, values.len().max(1)),
        problem: None,
        vectors: Vec::new(),
    }
}

#[test]
fn filter_matches_greedily() {
    let z = |re: f64, im: f64| Complex64::new(re, im);
    let first = spectrum(&[z(-11.9, 0.0), z(-1.41, -0.0012), z(-5.0, -2.0)]);
    let second = spectrum(&[z(-5.3, -2.4), z(-1.41, -0.0012 + 1e-7), z(-11.9, 0.0)]);
    let kept = resonance_filter(&first, &second, 1e-5);
    assert_eq!(kept.len(), 2);
    assert_eq!(kept[0].energy, z(-11.9, 0.0));
    assert!(kept[1].drift < 2e-7);
    assert!(resonance_filter(&first, &spectrum(&[]), 1.0).is_empty());
}

/// Eigenvalues near the `n = 1` continuum at two rotation angles.
fn rotated(p: &ProblemMatrices, theta: f64, shift: Complex64, k: usize) -> SpectrumResult {
    solve_problem(p, LengthScale::rotated(0.4, theta), 1.0, 0.0, &SolveRequest::complex(shift, k)).unwrap()
}

/// Pseudo-continuum levels above the first threshold with their exponent
/// `p` in `E + 8 ~ alpha^(-4p)`, from two nearby real length scales.
fn scaling_exponents(p: &ProblemMatrices, alpha: f64) -> Vec<(f64, f64)> {
    let levels = |a: f64| {
        let res = solve_problem(p, LengthScale::real(a), 1.0, 0.0, &SolveRequest::new(-5.0, 8)).unwrap();
        let mut e: Vec<f64> = res.eigenvalues.iter().map(|z| z.re).filter(|&e| e > HELIUM_THRESHOLD).collect();
        e.sort_by(f64::total_cmp);
        e
    };
    let ratio = 1.001f64;
    let (a, b) = (levels(alpha), levels(alpha * ratio));
    assert_eq!(a.len(), b.len());
    a.iter()
        .zip(&b)
        .map(|(x, y)| (*x, -((y + 8.0) / (x + 8.0)).ln() / (4.0 * ratio.ln())))
        .collect()
}

#[test]
fn continuum_turns_with_its_scaling_exponent() {
    let p = helium(0, Symmetry::Singlet, 60);
    let theta = 0.05;
    let exps = scaling_exponents(&p, 0.4);
    assert!(exps.len() >= 5);
    let res = rotated(&p, theta, HELIUM_THRESHOLD + Complex64::from_polar(3.0, -theta), 8);
    for &(e, pexp) in &exps {
        assert!(pexp > 0.9 && pexp < 2.0, "{e}: {pexp}");
        let d = e - HELIUM_THRESHOLD;
        let want = HELIUM_THRESHOLD + Complex64::from_polar(d, -pexp * theta);
        let got = res.eigenvalues.iter().min_by(|x, y| (*x - want).norm().total_cmp(&(*y - want).norm())).unwrap();
        let arg = (got - HELIUM_THRESHOLD).arg();
        assert!((got - want).norm() < 0.01 * d, "{e}: {got} vs {want}");
        assert!(arg < -0.9 * theta && arg > -2.0 * theta, "{e}: {arg}");
    }
}

#[test]
fn rotated_continuum_is_rejected() {
    let p = helium(0, Symmetry::Singlet, 60);
    let shift = HELIUM_THRESHOLD + Complex64::from_polar(5.0, -0.7);
    let a = rotated(&p, 0.3, shift, 6);
    let b = rotated(&p, 0.4, shift, 6);
    assert!(resonance_filter(&a, &b, 1e-4).is_empty());
    let ground = Complex64::new(-11.9, 0.0);
    let a = rotated(&p, 0.3, ground, 1);
    let b = rotated(&p, 0.4, ground, 1);
    assert_eq!(resonance_filter(&a, &b, 1e-6).len(), 1);
}

proptest! {
    // past n = 9 the rounding of E near -8 alone exceeds 1e-12 in delta
    #[test]
    fn defect_round_trip(n in 2u32..=9, delta in -0.45f64..0.45) {
        let e = defect_energy(n, delta);
        prop_assert!(e < HELIUM_THRESHOLD);
        prop_assert!((quantum_defect(e, n).unwrap() - delta).abs() < 1e-12);
    }
}
