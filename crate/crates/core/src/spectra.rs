//! Physics post-processing: hydrogenic oracles, thresholds, quantum
//! defects, perturbative slopes, metric norms and resonance matching.

use std::collections::BTreeMap;

use num_complex::Complex64;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::assembly::{combine_problem, LengthScale, ProblemMatrices};
use crate::basis::Symmetry;
use crate::eigensolver::{lanczos_generalized, ProblemInfo, SolveRequest, SpectrumResult};
use crate::sparse::SparseSymMatrix;
use crate::Error;

/// First ionization threshold of the planar helium atom.
pub const HELIUM_THRESHOLD: f64 = -8.0;

/// `-Q^2 / (2 (N - 1/2)^2)`.
pub fn hydrogen2d_energy(n: u32, charge: f64) -> Result<f64, Error> {
    if n == 0 {
        return Err(Error::InvalidParameter("principal quantum number starts at 1".into()));
    }
    let h = n as f64 - 0.5;
    Ok(-charge * charge / (2.0 * h * h))
}

/// Single ionization thresholds `I_1 .. I_{n_max}` of helium.
pub fn thresholds(n_max: u32) -> Vec<f64> {
    (1..=n_max).map(|n| hydrogen2d_energy(n, 2.0).expect("n >= 1")).collect()
}

/// A level of two non-interacting electrons.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IndependentLevel {
    pub energy: f64,
    pub multiplicity: usize,
    /// Shell pairs `(N1, N2)` with `N1 <= N2` contributing to the level.
    pub shells: Vec<(u32, u32)>,
}

fn exchange_count(n1: u32, n2: u32, ml: i64, symmetry: Symmetry) -> usize {
    let (l1, l2) = (n1 as i64 - 1, n2 as i64 - 1);
    let mut count = 0;
    for m1 in -l1..=l1 {
        let m2 = ml - m1;
        if m2.abs() > l2 {
            continue;
        }
        if n1 != n2 {
            count += 1;
        } else if m1 < m2 {
            count += 1;
        } else if m1 == m2 && symmetry == Symmetry::Singlet {
            count += 1;
        }
    }
    count
}

/// Levels with shells up to `n_max` and energy at most `cutoff`, lowest
/// first, for a nucleus of charge `charge`.
pub fn independent_electron_levels(
    ml: i64,
    symmetry: Symmetry,
    cutoff: f64,
    n_max: u32,
    charge: f64,
) -> Result<Vec<IndependentLevel>, Error> {
    if n_max == 0 {
        return Err(Error::InvalidParameter("n_max must be at least 1".into()));
    }
    let mut levels: BTreeMap<Ratio<i64>, IndependentLevel> = BTreeMap::new();
    for n1 in 1..=n_max {
        for n2 in n1..=n_max {
            let count = exchange_count(n1, n2, ml, symmetry);
            if count == 0 {
                continue;
            }
            let energy = hydrogen2d_energy(n1, charge)? + hydrogen2d_energy(n2, charge)?;
            if energy > cutoff {
                continue;
            }
            let inv = |n: u32| Ratio::new(1, ((2 * n - 1) * (2 * n - 1)) as i64);
            let key = inv(n1) + inv(n2);
            let level = levels.entry(key).or_insert(IndependentLevel { energy, multiplicity: 0, shells: Vec::new() });
            level.multiplicity += count;
            level.shells.push((n1, n2));
        }
    }
    let mut out: Vec<_> = levels.into_values().collect();
    out.sort_by(|a, b| a.energy.total_cmp(&b.energy));
    Ok(out)
}

/// `delta` in `E = -8 - 1 / (2 (n - 1/2 - delta)^2)`.
pub fn quantum_defect(energy: f64, n: u32) -> Result<f64, Error> {
    if n == 0 {
        return Err(Error::InvalidParameter("principal quantum number starts at 1".into()));
    }
    if !(energy < HELIUM_THRESHOLD) {
        return Err(Error::InvalidParameter(format!("energy {energy} is not below the threshold")));
    }
    Ok(n as f64 - 0.5 - 1.0 / (2.0 * (HELIUM_THRESHOLD - energy)).sqrt())
}

/// Energy of the level `n` with defect `delta`.
pub fn defect_energy(n: u32, delta: f64) -> f64 {
    let h = n as f64 - 0.5 - delta;
    HELIUM_THRESHOLD - 1.0 / (2.0 * h * h)
}

/// Least-squares slope of `y` against `x`.
pub fn least_squares_slope(points: &[(f64, f64)]) -> Result<f64, Error> {
    if points.len() < 2 {
        return Err(Error::InvalidParameter("a slope needs two points".into()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InvalidParameter("abscissae coincide".into()));
    }
    Ok(sxy / sxx)
}

/// Physical squared norm `c^T B c / 16`.
pub fn b_norm(c: &[f64], b: &SparseSymMatrix) -> Result<f64, Error> {
    if c.len() != b.dim() {
        return Err(Error::InvalidParameter(format!("vector of length {} for dimension {}", c.len(), b.dim())));
    }
    let bc = b.mul_vec(c);
    Ok(c.iter().zip(&bc).map(|(x, y)| x * y).sum::<f64>() / 16.0)
}

/// Solves the field-free or field-dressed problem at one length scale,
/// switching to complex arithmetic for a rotated scale or shift.
pub fn solve_problem(
    p: &ProblemMatrices,
    scale: LengthScale,
    epsilon: f64,
    field: f64,
    req: &SolveRequest,
) -> Result<SpectrumResult, Error> {
    let mut res = if scale.is_real() && req.shift.im == 0.0 {
        let (a, m) = combine_problem::<f64>(p, scale, epsilon, field)?;
        lanczos_generalized(&a, &m, req)?
    } else {
        let (a, m) = combine_problem::<Complex64>(p, scale, epsilon, field)?;
        lanczos_generalized(&a, &m, req)?
    };
    res.problem = Some(ProblemInfo {
        alpha: scale.modulus,
        theta: scale.theta,
        epsilon,
        field,
        n_base: p.n_base,
        ml: p.ml,
        symmetry: p.symmetry.name().to_string(),
        reflection: p.reflection,
    });
    Ok(res)
}

/// Eigenvalue nearest `shift` at a real length scale.
pub fn lowest_energy(p: &ProblemMatrices, alpha: f64, epsilon: f64, shift: f64) -> Result<f64, Error> {
    let res = solve_problem(p, LengthScale::real(alpha), epsilon, 0.0, &SolveRequest::new(shift, 1))?;
    Ok(res.eigenvalues[0].re)
}

/// Golden-section minimization of the eigenvalue nearest `shift` over the
/// length scale.
pub fn optimize_alpha(p: &ProblemMatrices, epsilon: f64, shift: f64, lo: f64, hi: f64, tol: f64) -> Result<(f64, f64), Error> {
    if !(lo > 0.0 && hi > lo) {
        return Err(Error::InvalidParameter("alpha bracket must satisfy 0 < lo < hi".into()));
    }
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let f = |a: f64| lowest_energy(p, a, epsilon, shift);
    let (mut a, mut b) = (lo, hi);
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c)?, f(d)?);
    while b - a > tol {
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d)?;
        }
    }
    Ok(if fc < fd { (c, fc) } else { (d, fd) })
}

/// Ground-state energy at each `epsilon`.
pub fn epsilon_scan(p: &ProblemMatrices, alpha: f64, eps_points: &[f64], shift: f64) -> Result<Vec<(f64, f64)>, Error> {
    eps_points.iter().map(|&e| Ok((e, lowest_energy(p, alpha, e, shift)?))).collect()
}

/// Slope of the ground-state energy against `epsilon`.
pub fn epsilon_scan_slope(p: &ProblemMatrices, alpha: f64, eps_points: &[f64], shift: f64) -> Result<f64, Error> {
    least_squares_slope(&epsilon_scan(p, alpha, eps_points, shift)?)
}

/// Expectation value of `1/r12` for a real eigenvector at unit coupling
/// strength, from the metric and the repulsion matrix.
pub fn inverse_r12_expectation(p: &ProblemMatrices, alpha: f64, c: &[f64]) -> Result<f64, Error> {
    let a8 = alpha.powi(8);
    let a12 = alpha.powi(12);
    let num = {
        let rc = p.repulsion.mul_vec(c);
        16.0 * a8 * c.iter().zip(&rc).map(|(x, y)| x * y).sum::<f64>()
    };
    let den = 16.0 * a12 * b_norm(c, &p.metric)?;
    Ok(num / den)
}

mod complex_pair {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(z: &Complex64, s: S) -> Result<S::Ok, S::Error> {
        [z.re, z.im].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Complex64, D::Error> {
        let [re, im] = <[f64; 2]>::deserialize(d)?;
        Ok(Complex64::new(re, im))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResonanceCandidate {
    #[serde(with = "complex_pair")]
    pub energy: Complex64,
    #[serde(with = "complex_pair")]
    pub partner: Complex64,
    pub drift: f64,
}

/// Eigenvalues that stay put between two rotation angles, matched greedily
/// by distance.
pub fn resonance_filter(first: &SpectrumResult, second: &SpectrumResult, tol: f64) -> Vec<ResonanceCandidate> {
    let mut pairs: Vec<(f64, usize, usize)> = Vec::new();
    for (i, a) in first.eigenvalues.iter().enumerate() {
        for (j, b) in second.eigenvalues.iter().enumerate() {
            let d = (a - b).norm();
            if d < tol {
                pairs.push((d, i, j));
            }
        }
    }
    pairs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut used_a = vec![false; first.eigenvalues.len()];
    let mut used_b = vec![false; second.eigenvalues.len()];
    let mut out = Vec::new();
    for (d, i, j) in pairs {
        if used_a[i] || used_b[j] {
            continue;
        }
        used_a[i] = true;
        used_b[j] = true;
        out.push(ResonanceCandidate { energy: first.eigenvalues[i], partner: second.eigenvalues[j], drift: d });
    }
    out.sort_by(|x, y| x.energy.re.total_cmp(&y.energy.re));
    out
}

/// `(N, M)` of the inner electron and `(n, m)` of the outer one.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LevelLabel {
    pub inner_n: u32,
    pub inner_m: i64,
    pub n: u32,
    pub m: i64,
    pub ml: i64,
    pub symmetry: Symmetry,
}

impl std::fmt::Display for LevelLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{},{},{},{}", self.inner_n, self.inner_m, self.n, self.m)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RydbergLevel {
    pub label: LevelLabel,
    pub energy: f64,
    pub defect: f64,
}

/// Lowest outer principal quantum number of a series.
pub fn series_start(ml: i64, symmetry: Symmetry) -> u32 {
    if ml == 0 && symmetry == Symmetry::Singlet {
        1
    } else {
        (ml.unsigned_abs() as u32 + 1).max(2)
    }
}

/// Labels bound energies below the threshold by their position in the
/// series.
pub fn label_series(energies: &[f64], ml: i64, symmetry: Symmetry) -> Result<Vec<RydbergLevel>, Error> {
    let mut bound: Vec<f64> = energies.iter().copied().filter(|&e| e < HELIUM_THRESHOLD).collect();
    bound.sort_by(f64::total_cmp);
    let start = series_start(ml, symmetry);
    bound
        .into_iter()
        .enumerate()
        .map(|(k, energy)| {
            let n = start + k as u32;
            Ok(RydbergLevel {
                label: LevelLabel { inner_n: 1, inner_m: 0, n, m: ml, ml, symmetry },
                energy,
                defect: quantum_defect(energy, n)?,
            })
        })
        .collect()
}

/// The first `count` members of a helium Rydberg series.
pub fn rydberg_table(
    p: &ProblemMatrices,
    alpha: f64,
    ml: i64,
    symmetry: Symmetry,
    count: usize,
    req: &SolveRequest,
) -> Result<Vec<RydbergLevel>, Error> {
    let start = series_start(ml, symmetry);
    let mut energies = Vec::new();
    let mut first = start;
    if start == 1 {
        let ground = SolveRequest { shift: Complex64::new(HELIUM_THRESHOLD - 8.0, 0.0), k: 1, ..req.clone() };
        energies.push(solve_problem(p, LengthScale::real(alpha), 1.0, 0.0, &ground)?.eigenvalues[0].re);
        first = 2;
    }
    let remaining = count.saturating_sub(energies.len());
    if remaining > 0 {
        // shift just below the first excited member of the series
        let guess = defect_energy(first, 0.0);
        let shift = guess - 0.5 * (HELIUM_THRESHOLD - guess).abs();
        let window = SolveRequest { shift: Complex64::new(shift, 0.0), k: remaining + 4, ..req.clone() };
        let res = solve_problem(p, LengthScale::real(alpha), 1.0, 0.0, &window)?;
        // members below the hydrogenic n = first - 1 level belong to earlier solves
        let floor = defect_energy(first - 1, 0.0);
        let mut excited: Vec<f64> =
            res.eigenvalues.iter().map(|z| z.re).filter(|&e| e > floor && e < HELIUM_THRESHOLD).collect();
        excited.sort_by(f64::total_cmp);
        excited.truncate(remaining);
        energies.extend(excited);
    }
    label_series(&energies, ml, symmetry)
}
