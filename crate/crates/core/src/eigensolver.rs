//! Shift-invert Lanczos for `A c = lambda M c`.
//!
//! The shifted matrix `A - sigma M` is factored once by a direct block
//! elimination that follows the block-tridiagonal profile of the
//! total-quanta ordering. Lanczos then runs on `(A - sigma M)^-1 M` with the
//! bilinear form `u^T M v`, which is an inner product for real symmetric
//! problems and the standard pseudo inner product for complex-symmetric
//! ones.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::lu::partial_pivoting::{factor as lu_factor, solve as lu_solve};
use faer::linalg::matmul::matmul;
use faer::perm::PermRef;
use faer::{Accum, Mat, MatMut, Par, Side};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::sparse::{Scalar, SparseSymMatrix};
use crate::Error;

/// Dense reference solves are refused above this dimension.
pub const DENSE_LIMIT: usize = 3000;

/// Per-field hooks for the small dense problems inside the solvers.
pub trait DenseScalar: Scalar {
    /// Eigenpairs of a small symmetric (real) or complex-symmetric matrix.
    fn small_eigen(t: &Mat<Self>) -> Result<Vec<(Complex64, Vec<Self>)>, Error>;
    /// Every eigenvalue of the pencil `(a, m)`.
    fn pencil_eigenvalues(a: &Mat<Self>, m: &Mat<Self>) -> Result<Vec<Complex64>, Error>;
    fn sample<R: Rng>(rng: &mut R) -> Self;
    /// Principal square root.
    fn root(self) -> Option<Self>;
}

impl DenseScalar for f64 {
    fn small_eigen(t: &Mat<f64>) -> Result<Vec<(Complex64, Vec<f64>)>, Error> {
        let evd = t.self_adjoint_eigen(Side::Lower).map_err(|_| Error::NotConverged { converged: 0, requested: t.nrows(), iterations: 0 })?;
        let (s, u) = (evd.S(), evd.U());
        Ok((0..t.nrows())
            .map(|j| (Complex64::new(s[j], 0.0), (0..t.nrows()).map(|i| u[(i, j)]).collect()))
            .collect())
    }

    fn pencil_eigenvalues(a: &Mat<f64>, m: &Mat<f64>) -> Result<Vec<Complex64>, Error> {
        let llt = m.llt(Side::Lower).map_err(|_| Error::NotPositiveDefinite)?;
        let l = llt.L();
        let n = a.nrows();
        // C = L^-1 A L^-T
        let mut c = a.clone();
        faer::linalg::triangular_solve::solve_lower_triangular_in_place(l, c.as_mut(), Par::Seq);
        let mut ct = c.transpose().to_owned();
        faer::linalg::triangular_solve::solve_lower_triangular_in_place(l, ct.as_mut(), Par::Seq);
        let sym = Mat::from_fn(n, n, |i, j| 0.5 * (ct[(i, j)] + ct[(j, i)]));
        let vals = sym
            .self_adjoint_eigenvalues(Side::Lower)
            .map_err(|_| Error::NotConverged { converged: 0, requested: n, iterations: 0 })?;
        Ok(vals.into_iter().map(|v| Complex64::new(v, 0.0)).collect())
    }

    fn sample<R: Rng>(rng: &mut R) -> Self {
        rng.gen_range(-1.0..1.0)
    }

    fn root(self) -> Option<Self> {
        (self > 0.0).then(|| self.sqrt())
    }
}

impl DenseScalar for Complex64 {
    fn small_eigen(t: &Mat<Complex64>) -> Result<Vec<(Complex64, Vec<Complex64>)>, Error> {
        let evd = t.eigen().map_err(|_| Error::NotConverged { converged: 0, requested: t.nrows(), iterations: 0 })?;
        let (s, u) = (evd.S(), evd.U());
        Ok((0..t.nrows()).map(|j| (s[j], (0..t.nrows()).map(|i| u[(i, j)]).collect())).collect())
    }

    fn pencil_eigenvalues(a: &Mat<Complex64>, m: &Mat<Complex64>) -> Result<Vec<Complex64>, Error> {
        let lu = m.partial_piv_lu();
        let mut x = a.clone();
        faer::linalg::solvers::Solve::solve_in_place(&lu, x.as_mut());
        x.eigenvalues().map_err(|_| Error::NotConverged { converged: 0, requested: a.nrows(), iterations: 0 })
    }

    fn sample<R: Rng>(rng: &mut R) -> Self {
        Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
    }

    fn root(self) -> Option<Self> {
        (self.norm() > 0.0).then(|| self.sqrt())
    }
}

fn dot<T: Scalar>(u: &[T], v: &[T]) -> T {
    let mut acc = T::zero();
    for (a, b) in u.iter().zip(v) {
        acc += *a * *b;
    }
    acc
}

fn norm2<T: Scalar>(u: &[T]) -> f64 {
    u.iter().map(|x| x.modulus().powi(2)).sum::<f64>().sqrt()
}

fn axpy<T: Scalar>(alpha: T, x: &[T], y: &mut [T]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * *xi;
    }
}

/// `A - sigma M` for matrices of one field.
pub fn shifted<T: Scalar>(a: &SparseSymMatrix<T>, m: &SparseSymMatrix<T>, sigma: T) -> Result<SparseSymMatrix<T>, Error> {
    if a.dim() != m.dim() {
        return Err(Error::InvalidParameter("A and M differ in dimension".into()));
    }
    let mut entries: Vec<(u32, u32, T)> = Vec::with_capacity(a.nnz() + m.nnz());
    entries.extend(a.iter().map(|(i, j, v)| (i as u32, j as u32, v)));
    entries.extend(m.iter().map(|(i, j, v)| (i as u32, j as u32, -(sigma * v))));
    SparseSymMatrix::from_upper_triplets(a.dim(), entries)
}

/// Contiguous index blocks such that every nonzero couples a block only to
/// itself and its two neighbours.
pub fn block_partition(reach: &[usize]) -> Vec<(usize, usize)> {
    let n = reach.len();
    let mut prefix = Vec::with_capacity(n);
    let mut run = 0;
    for &r in reach {
        run = run.max(r);
        prefix.push(run);
    }
    let mut bounds = vec![0usize];
    if n > 0 {
        bounds.push(1);
    }
    while *bounds.last().unwrap() < n {
        let last = *bounds.last().unwrap();
        let next = (prefix[last - 1] + 1).max(last + 1).min(n);
        bounds.push(next);
    }
    bounds.windows(2).map(|w| (w[0], w[1])).collect()
}

struct PackedLu<T> {
    lu: Mat<T>,
    fwd: Vec<usize>,
    bwd: Vec<usize>,
}

impl<T: Scalar> PackedLu<T> {
    fn new(mut a: Mat<T>, block: usize) -> Result<Self, Error> {
        let n = a.nrows();
        let scale = (0..n)
            .flat_map(|j| (0..n).map(move |i| (i, j)))
            .map(|(i, j)| a[(i, j)].modulus())
            .fold(0.0f64, f64::max);
        let mut fwd = vec![0usize; n];
        let mut bwd = vec![0usize; n];
        let par = Par::Seq;
        let mut mem = MemBuffer::new(lu_factor::lu_in_place_scratch::<usize, T>(n, n, par, Default::default()));
        lu_factor::lu_in_place(a.as_mut(), &mut fwd, &mut bwd, par, MemStack::new(&mut mem), Default::default());
        for i in 0..n {
            let p = a[(i, i)].modulus();
            if !p.is_finite() || p <= 1e-14 * scale {
                return Err(Error::SingularShift { block });
            }
        }
        Ok(Self { lu: a, fwd, bwd })
    }

    fn solve_in_place(&self, rhs: MatMut<'_, T>) {
        let n = self.lu.nrows();
        let par = Par::Seq;
        let perm = unsafe { PermRef::new_unchecked(&self.fwd, &self.bwd, n) };
        let mut mem = MemBuffer::new(lu_solve::solve_in_place_scratch::<usize, T>(n, rhs.ncols(), par));
        lu_solve::solve_in_place(self.lu.as_ref(), self.lu.as_ref(), perm, rhs, par, MemStack::new(&mut mem));
    }

    fn solve_vec(&self, v: &mut [T]) {
        let mut m = Mat::<T>::from_fn(v.len(), 1, |i, _| v[i]);
        self.solve_in_place(m.as_mut());
        for (i, x) in v.iter_mut().enumerate() {
            *x = m[(i, 0)];
        }
    }
}

/// Direct factorization of a symmetric block-tridiagonal matrix by block
/// elimination, `S_k = D_k - E_k^T S_{k-1}^-1 E_k`.
pub struct BlockFactorization<T> {
    dim: usize,
    ranges: Vec<(usize, usize)>,
    pivots: Vec<PackedLu<T>>,
    /// Entries of `E_k` as `(row in block k-1, column in block k, value)`.
    couplings: Vec<Vec<(u32, u32, T)>>,
}

impl<T: Scalar> BlockFactorization<T> {
    pub fn new(k: &SparseSymMatrix<T>) -> Result<Self, Error> {
        let ranges = block_partition(&k.reach());
        let mut pivots: Vec<PackedLu<T>> = Vec::with_capacity(ranges.len());
        let mut couplings = Vec::with_capacity(ranges.len());
        for (b, &(lo, hi)) in ranges.iter().enumerate() {
            let size = hi - lo;
            let mut d = Mat::<T>::zeros(size, size);
            let prev_lo = if b > 0 { ranges[b - 1].0 } else { lo };
            let mut e = Vec::new();
            for j in lo..hi {
                for (i, v) in k.column(j) {
                    if i >= lo {
                        d[(i - lo, j - lo)] = v;
                        d[(j - lo, i - lo)] = v;
                    } else if i >= prev_lo {
                        e.push(((i - prev_lo) as u32, (j - lo) as u32, v));
                    } else {
                        return Err(Error::InvalidParameter("matrix profile is not block tridiagonal".into()));
                    }
                }
            }
            if b > 0 && !e.is_empty() {
                let (plo, phi) = ranges[b - 1];
                let mut x = Mat::<T>::zeros(phi - plo, size);
                for &(i, j, v) in &e {
                    x[(i as usize, j as usize)] = v;
                }
                let mut et = Mat::<T>::zeros(size, phi - plo);
                for &(i, j, v) in &e {
                    et[(j as usize, i as usize)] = v;
                }
                pivots[b - 1].solve_in_place(x.as_mut());
                matmul(d.as_mut(), Accum::Add, et.as_ref(), x.as_ref(), -T::one(), Par::Seq);
            }
            pivots.push(PackedLu::new(d, b)?);
            couplings.push(e);
        }
        Ok(Self { dim: k.dim(), ranges, pivots, couplings })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.ranges.iter().map(|(a, b)| b - a).collect()
    }

    /// Solves `K x = b` in place.
    pub fn solve_in_place(&self, rhs: &mut [T]) {
        assert_eq!(rhs.len(), self.dim);
        // forward: y_k = S_k^-1 (b_k - E_k^T y_{k-1})
        for (b, &(lo, hi)) in self.ranges.iter().enumerate() {
            if b > 0 {
                let plo = self.ranges[b - 1].0;
                let (head, tail) = rhs.split_at_mut(lo);
                for &(i, j, v) in &self.couplings[b] {
                    tail[j as usize] -= v * head[plo + i as usize];
                }
            }
            self.pivots[b].solve_vec(&mut rhs[lo..hi]);
        }
        // backward: x_k = y_k - S_k^-1 E_{k+1} x_{k+1}
        for b in (0..self.ranges.len().saturating_sub(1)).rev() {
            let (lo, hi) = self.ranges[b];
            let nlo = self.ranges[b + 1].0;
            let mut t = vec![T::zero(); hi - lo];
            for &(i, j, v) in &self.couplings[b + 1] {
                t[i as usize] += v * rhs[nlo + j as usize];
            }
            self.pivots[b].solve_vec(&mut t);
            for (x, d) in rhs[lo..hi].iter_mut().zip(&t) {
                *x -= *d;
            }
        }
    }

    pub fn solve(&self, rhs: &[T]) -> Vec<T> {
        let mut x = rhs.to_vec();
        self.solve_in_place(&mut x);
        x
    }
}

/// Factorization of `A - sigma M`.
pub fn factorize<T: Scalar>(a: &SparseSymMatrix<T>, m: &SparseSymMatrix<T>, sigma: T) -> Result<BlockFactorization<T>, Error> {
    BlockFactorization::new(&shifted(a, m, sigma)?)
}

mod complex_pairs {
    use num_complex::Complex64;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Complex64], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Complex64>, D::Error> {
        let pairs = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(pairs.into_iter().map(|[re, im]| Complex64::new(re, im)).collect())
    }
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
pub struct SolveRequest {
    #[serde(with = "complex_pair")]
    pub shift: Complex64,
    pub k: usize,
    pub tol: f64,
    /// Largest Krylov dimension.
    pub max_iter: usize,
    pub seed: u64,
}

impl SolveRequest {
    pub fn new(shift: f64, k: usize) -> Self {
        Self { shift: Complex64::new(shift, 0.0), k, tol: 1e-8, max_iter: 400, seed: 1 }
    }

    pub fn complex(shift: Complex64, k: usize) -> Self {
        Self { shift, ..Self::new(0.0, k) }
    }

    pub fn validate(&self) -> Result<(), Error> {
        if self.k == 0 {
            return Err(Error::InvalidParameter("k must be at least 1".into()));
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter("tol must be positive".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter("max_iter must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumResult {
    /// Sorted by distance to the shift.
    #[serde(with = "complex_pairs")]
    pub eigenvalues: Vec<Complex64>,
    /// `||A c - lambda M c|| / ||A c||` per eigenpair.
    pub residuals: Vec<f64>,
    pub iterations: usize,
    pub restarts: usize,
    pub dimension: usize,
    pub request: SolveRequest,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub problem: Option<ProblemInfo>,
    #[serde(skip)]
    pub vectors: Vec<Vec<Complex64>>,
}

/// Physical parameters behind a spectrum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProblemInfo {
    pub alpha: f64,
    pub theta: f64,
    pub epsilon: f64,
    pub field: f64,
    pub n_base: u32,
    pub ml: Option<i64>,
    pub symmetry: String,
    pub reflection: Option<i8>,
}

impl SpectrumResult {
    pub fn lowest_real(&self) -> Option<f64> {
        self.eigenvalues.iter().map(|z| z.re).min_by(f64::total_cmp)
    }
}

fn relative_residual<T: Scalar>(a: &SparseSymMatrix<T>, m: &SparseSymMatrix<T>, lambda: T, y: &[T]) -> f64 {
    let ay = a.mul_vec(y);
    let my = m.mul_vec(y);
    let r: Vec<T> = ay.iter().zip(&my).map(|(p, q)| *p - lambda * *q).collect();
    let scale = norm2(&ay).max(f64::MIN_POSITIVE);
    norm2(&r) / scale
}

/// `k` eigenpairs of `A c = lambda M c` closest to the shift.
pub fn lanczos_generalized<T: DenseScalar>(a: &SparseSymMatrix<T>, m: &SparseSymMatrix<T>, req: &SolveRequest) -> Result<SpectrumResult, Error> {
    req.validate()?;
    let sigma = T::from_complex(req.shift).ok_or_else(|| Error::InvalidParameter("complex shift on a real problem".into()))?;
    let fact = factorize(a, m, sigma)?;
    lanczos_with(a, m, &fact, sigma, req)
}

/// Lanczos on a precomputed factorization of `A - sigma M`.
pub fn lanczos_with<T: DenseScalar>(
    a: &SparseSymMatrix<T>,
    m: &SparseSymMatrix<T>,
    fact: &BlockFactorization<T>,
    sigma: T,
    req: &SolveRequest,
) -> Result<SpectrumResult, Error> {
    req.validate()?;
    let n = a.dim();
    let k = req.k.min(n);
    let max_dim = req.max_iter.min(n).max(k);
    let mut restarts = 0;
    let mut seed = req.seed;
    loop {
        match lanczos_run(a, m, fact, sigma, req, k, max_dim, seed)? {
            Some(mut res) => {
                res.restarts = restarts;
                return Ok(res);
            }
            None if restarts < 3 => {
                restarts += 1;
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            }
            None => {
                return Err(Error::NotConverged { converged: 0, requested: k, iterations: max_dim });
            }
        }
    }
}

/// One Lanczos run; `None` signals a breakdown that calls for a new start.
#[allow(clippy::too_many_arguments)]
fn lanczos_run<T: DenseScalar>(
    a: &SparseSymMatrix<T>,
    m: &SparseSymMatrix<T>,
    fact: &BlockFactorization<T>,
    sigma: T,
    req: &SolveRequest,
    k: usize,
    max_dim: usize,
    seed: u64,
) -> Result<Option<SpectrumResult>, Error> {
    let n = a.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut r: Vec<T> = (0..n).map(|_| T::sample(&mut rng)).collect();
    // One application of the operator filters the start toward the window.
    r = fact.solve(&m.mul_vec(&r));
    let mr = m.mul_vec(&r);
    let Some(beta0) = normalizer(&r, &mr)? else { return Ok(None) };
    let inv = T::one() / beta0;
    let mut qs: Vec<Vec<T>> = vec![r.iter().map(|x| *x * inv).collect()];
    let mut mqs: Vec<Vec<T>> = vec![mr.iter().map(|x| *x * inv).collect()];
    let mut alphas: Vec<T> = Vec::new();
    let mut betas: Vec<T> = Vec::new();
    let check_every = 5;
    loop {
        let j = qs.len() - 1;
        let mut w = fact.solve(&mqs[j]);
        let mut alpha = T::zero();
        for pass in 0..2 {
            let coeffs: Vec<T> = mqs.iter().map(|mq| dot(mq, &w)).collect();
            for (i, c) in coeffs.iter().enumerate() {
                axpy(-*c, &qs[i], &mut w);
            }
            alpha += coeffs[j];
            let _ = pass;
        }
        alphas.push(alpha);
        let dim_now = qs.len();
        let mw = m.mul_vec(&w);
        let wnorm = norm2(&w);
        let qnorm = norm2(&qs[j]);
        let exhausted = dim_now >= max_dim || wnorm <= 1e-13 * qnorm;
        let beta = if exhausted {
            None
        } else {
            match normalizer(&w, &mw)? {
                Some(b) => Some(b),
                None => return Ok(None),
            }
        };
        if exhausted || (dim_now >= k && dim_now % check_every == 0) {
            let result = ritz(a, m, &qs, &alphas, &betas, beta, sigma, req, k)?;
            if let Some(res) = result {
                return Ok(Some(res));
            }
            if exhausted {
                return Err(Error::NotConverged { converged: 0, requested: k, iterations: dim_now });
            }
        }
        let b = beta.expect("beta present when not exhausted");
        let inv = T::one() / b;
        betas.push(b);
        qs.push(w.iter().map(|x| *x * inv).collect());
        mqs.push(mw.iter().map(|x| *x * inv).collect());
    }
}

/// `sqrt(w^T M w)`, `None` on a self-orthogonal vector.
fn normalizer<T: DenseScalar>(w: &[T], mw: &[T]) -> Result<Option<T>, Error> {
    let s = dot(w, mw);
    let scale = norm2(w) * norm2(mw);
    if !T::IS_COMPLEX && s.to_complex().re <= 0.0 && scale > 0.0 {
        return Err(Error::NotPositiveDefinite);
    }
    if s.modulus() <= 1e-10 * scale {
        return Ok(None);
    }
    Ok(s.root())
}

#[allow(clippy::too_many_arguments)]
fn ritz<T: DenseScalar>(
    a: &SparseSymMatrix<T>,
    m: &SparseSymMatrix<T>,
    qs: &[Vec<T>],
    alphas: &[T],
    betas: &[T],
    next_beta: Option<T>,
    sigma: T,
    req: &SolveRequest,
    k: usize,
) -> Result<Option<SpectrumResult>, Error> {
    let dim = alphas.len();
    let t = Mat::<T>::from_fn(dim, dim, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j {
            betas[i]
        } else if j + 1 == i {
            betas[j]
        } else {
            T::zero()
        }
    });
    let mut pairs = T::small_eigen(&t)?;
    // Largest |theta| lies closest to the shift.
    pairs.sort_by(|x, y| y.0.norm().total_cmp(&x.0.norm()));
    let sig = sigma.to_complex();
    let mut eigenvalues = Vec::with_capacity(k);
    let mut residuals = Vec::with_capacity(k);
    let mut vectors = Vec::with_capacity(k);
    for (theta, s) in pairs.iter().take(k) {
        if theta.norm() == 0.0 {
            return Ok(None);
        }
        // cheap estimate first: |beta_{m+1} s_m| relative to |theta|
        if let Some(b) = next_beta {
            let est = (b * s[dim - 1]).modulus() / (norm2(s) * theta.norm());
            if est > req.tol.sqrt() {
                return Ok(None);
            }
        }
        let mut y = vec![T::zero(); a.dim()];
        for (i, q) in qs.iter().enumerate().take(dim) {
            axpy(s[i], q, &mut y);
        }
        let nrm = norm2(&y);
        y.iter_mut().for_each(|v| *v = v.scale(1.0 / nrm));
        let lambda_c = sig + Complex64::new(1.0, 0.0) / theta;
        let lambda = T::from_complex(lambda_c).unwrap_or_else(|| T::from_real(lambda_c.re));
        let res = relative_residual(a, m, lambda, &y);
        if res > req.tol && next_beta.is_some() {
            return Ok(None);
        }
        eigenvalues.push(lambda.to_complex());
        residuals.push(res);
        vectors.push(y.iter().map(|v| v.to_complex()).collect::<Vec<_>>());
    }
    if residuals.iter().any(|&r| r > req.tol) {
        return Err(Error::NotConverged {
            converged: residuals.iter().filter(|&&r| r <= req.tol).count(),
            requested: k,
            iterations: dim,
        });
    }
    let mut order: Vec<usize> = (0..eigenvalues.len()).collect();
    order.sort_by(|&x, &y| (eigenvalues[x] - sig).norm().total_cmp(&(eigenvalues[y] - sig).norm()));
    Ok(Some(SpectrumResult {
        eigenvalues: order.iter().map(|&i| eigenvalues[i]).collect(),
        residuals: order.iter().map(|&i| residuals[i]).collect(),
        iterations: dim,
        restarts: 0,
        dimension: a.dim(),
        request: req.clone(),
        problem: None,
        vectors: order.iter().map(|&i| vectors[i].clone()).collect(),
    }))
}

/// Complex-symmetric problems from a rotated length scale.
pub fn complex_spectrum(a: &SparseSymMatrix<Complex64>, m: &SparseSymMatrix<Complex64>, req: &SolveRequest) -> Result<SpectrumResult, Error> {
    lanczos_generalized(a, m, req)
}

/// Every eigenvalue by dense reduction, sorted by real part.
pub fn dense_reference_solve<T: DenseScalar>(a: &SparseSymMatrix<T>, m: &SparseSymMatrix<T>) -> Result<Vec<Complex64>, Error> {
    if a.dim() > DENSE_LIMIT {
        return Err(Error::TooLarge { dim: a.dim(), limit: DENSE_LIMIT });
    }
    if a.dim() != m.dim() {
        return Err(Error::InvalidParameter("A and M differ in dimension".into()));
    }
    let mut vals = T::pencil_eigenvalues(&a.to_dense(), &m.to_dense())?;
    vals.sort_by(|x, y| x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)));
    Ok(vals)
}
