//! Projection of ladder operators onto symmetrized bases and composition of
//! the generalized eigenproblem.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::basis::{KetBasis, StarkBasis, SymBasis, Symmetry};
use crate::hamiltonian::{build_operator, OperatorKind, SystemParams};
use crate::oscillator::{FockKet, LadderMonomial, OperatorPolynomial, Shift, MODES};
use crate::sparse::{Scalar, SparseSymMatrix};
use crate::{threads, Error};

/// Exact integer tables for `n!/(n-j)!` and floating `sqrt(n!/(n-j)!)`.
struct FallingTable {
    width: usize,
    ints: Vec<Option<i128>>,
    roots: Vec<f64>,
}

impl FallingTable {
    fn new(max_n: usize, max_j: usize) -> Self {
        let width = max_j + 1;
        let mut ints = Vec::with_capacity((max_n + 1) * width);
        let mut roots = Vec::with_capacity((max_n + 1) * width);
        for n in 0..=max_n {
            let mut acc: Option<i128> = Some(1);
            let mut root = 1.0f64;
            for j in 0..width {
                ints.push(acc);
                roots.push(root);
                let factor = n as i128 - j as i128;
                acc = acc.and_then(|a| a.checked_mul(factor.max(0)));
                root *= (factor.max(0) as f64).sqrt();
            }
        }
        Self { width, ints, roots }
    }

    fn int(&self, n: u32, j: u8) -> Option<i128> {
        self.ints[n as usize * self.width + j as usize]
    }

    fn root(&self, n: u32, j: u32) -> f64 {
        self.roots[n as usize * self.width + j as usize]
    }
}

#[derive(Clone, Debug)]
struct CompiledTerm {
    create: [u8; MODES],
    annihilate: [u8; MODES],
    coeff: i128,
}

#[derive(Clone, Debug)]
struct ShiftGroup {
    shift: Shift,
    terms: Vec<CompiledTerm>,
}

/// Real operator with coefficients over a common denominator, grouped by
/// occupation shift, ready for fast matrix elements.
#[derive(Clone, Debug)]
pub struct CompiledOperator {
    groups: Vec<ShiftGroup>,
    inv_den: f64,
    max_degree: u32,
}

impl CompiledOperator {
    pub fn new(op: &OperatorPolynomial) -> Result<Self, Error> {
        let mut den = BigInt::one();
        for (_, c) in op.terms() {
            if !c.is_real() {
                return Err(Error::InvalidParameter("operator has complex coefficients".into()));
            }
            den = den.lcm(c.re.denom());
        }
        let mut groups: Vec<ShiftGroup> = Vec::new();
        let mut index: HashMap<Shift, usize> = HashMap::new();
        for (m, c) in op.terms() {
            let scaled = (&c.re * BigRational::from_integer(den.clone())).to_integer();
            let coeff: i128 = scaled.try_into().map_err(|_| Error::Overflow)?;
            let shift = m.shift();
            let g = *index.entry(shift).or_insert_with(|| {
                groups.push(ShiftGroup { shift, terms: Vec::new() });
                groups.len() - 1
            });
            groups[g].terms.push(CompiledTerm { create: m.create, annihilate: m.annihilate, coeff });
        }
        let inv_den = 1.0 / den.to_f64().ok_or(Error::Overflow)?;
        Ok(Self { groups, inv_den, max_degree: op.max_degree() })
    }

    pub fn shift_count(&self) -> usize {
        self.groups.len()
    }

    pub fn shifts(&self) -> impl Iterator<Item = &Shift> {
        self.groups.iter().map(|g| &g.shift)
    }

    fn group_element(&self, g: &ShiftGroup, ket: &FockKet, table: &FallingTable) -> Result<f64, Error> {
        let mut sum: i128 = 0;
        for t in &g.terms {
            let mut prod = t.coeff;
            let mut alive = true;
            for i in 0..MODES {
                let n = ket.0[i];
                if n < t.annihilate[i] as u32 {
                    alive = false;
                    break;
                }
                let lo = n.min((n as i64 + g.shift[i] as i64) as u32);
                let f = table.int(lo, t.create[i].min(t.annihilate[i])).ok_or(Error::Overflow)?;
                prod = prod.checked_mul(f).ok_or(Error::Overflow)?;
            }
            if alive {
                sum = sum.checked_add(prod).ok_or(Error::Overflow)?;
            }
        }
        if sum == 0 {
            return Ok(0.0);
        }
        let mut radical = 1.0;
        for i in 0..MODES {
            let n = ket.0[i];
            let m = (n as i64 + g.shift[i] as i64) as u32;
            radical *= table.root(n.max(m), g.shift[i].unsigned_abs());
        }
        Ok(sum as f64 * radical * self.inv_den)
    }

    fn table(&self, max_quanta: u32) -> FallingTable {
        FallingTable::new(max_quanta as usize + self.max_degree as usize + 1, self.max_degree.max(1) as usize)
    }

    /// `<bra| op |ket>` in double precision, rounded once from the exact
    /// integer sum.
    pub fn element(&self, bra: &FockKet, ket: &FockKet) -> Result<f64, Error> {
        let shift: Shift = std::array::from_fn(|i| bra.0[i] as i32 - ket.0[i] as i32);
        let Some(g) = self.groups.iter().find(|g| g.shift == shift) else {
            return Ok(0.0);
        };
        let table = self.table(bra.total().max(ket.total()));
        self.group_element(g, ket, &table)
    }
}

/// Operator unchanged when the two planes trade places, `(1,2) <-> (3,4)`.
pub fn is_plane_swap_invariant(op: &OperatorPolynomial) -> bool {
    let swap = |e: [u8; 4]| [e[2], e[3], e[0], e[1]];
    op.terms().all(|(m, c)| {
        op.coefficient(&LadderMonomial::new(swap(m.create), swap(m.annihilate))) == Some(c)
    })
}

/// Operator unchanged under `(1,2,3,4) -> (2,1,4,3)`.
pub fn is_reflection_invariant(op: &OperatorPolynomial) -> bool {
    let swap = |e: [u8; 4]| [e[1], e[0], e[3], e[2]];
    op.terms().all(|(m, c)| {
        op.coefficient(&LadderMonomial::new(swap(m.create), swap(m.annihilate))) == Some(c)
    })
}

/// Matrix of a Hermitian operator between symmetrized kets. Entry `(s', s)`
/// sums the weighted Fock matrix elements over all component pairs.
pub fn assemble<B: KetBasis + Sync>(op: &OperatorPolynomial, basis: &B) -> Result<SparseSymMatrix, Error> {
    if !op.is_hermitian() {
        return Err(Error::InvalidParameter("operator is not Hermitian".into()));
    }
    if !is_plane_swap_invariant(op) {
        return Err(Error::InconsistentSymmetry("operator does not commute with the plane exchange used by the basis".into()));
    }
    let compiled = CompiledOperator::new(op)?;
    let dim = basis.dim();
    let mut owner: HashMap<FockKet, (u32, f64)> = HashMap::with_capacity(2 * dim);
    let mut max_quanta = 0;
    for j in 0..dim {
        for &(k, w) in basis.components(j) {
            owner.insert(k, (j as u32, w));
            max_quanta = max_quanta.max(k.total());
        }
    }
    let table = compiled.table(max_quanta);
    let column = |j: usize| -> Result<Vec<(u32, f64)>, Error> {
        let mut acc: Vec<(u32, f64)> = Vec::new();
        for &(ket, wk) in basis.components(j) {
            for g in &compiled.groups {
                let Some(bra) = ket.shifted(&g.shift) else { continue };
                let Some(&(i, wb)) = owner.get(&bra) else { continue };
                if i as usize > j {
                    continue;
                }
                let v = compiled.group_element(g, &ket, &table)?;
                if v != 0.0 {
                    acc.push((i, wb * wk * v));
                }
            }
        }
        acc.sort_by_key(|e| e.0);
        let mut col: Vec<(u32, f64)> = Vec::with_capacity(acc.len());
        for (i, v) in acc {
            match col.last_mut() {
                Some(last) if last.0 == i => last.1 += v,
                _ => col.push((i, v)),
            }
        }
        col.retain(|e| e.1 != 0.0);
        Ok(col)
    };
    let columns = parallel_columns(dim, &column)?;
    Ok(SparseSymMatrix::from_columns(dim, columns))
}

fn parallel_columns<F>(dim: usize, column: &F) -> Result<Vec<Vec<(u32, f64)>>, Error>
where
    F: Fn(usize) -> Result<Vec<(u32, f64)>, Error> + Sync,
{
    let workers = threads().min(dim.max(1));
    if workers <= 1 {
        return (0..dim).map(column).collect();
    }
    // Interleaved chunks balance the growth of column cost with N.
    let chunk = 64;
    let parts: Vec<Result<Vec<(usize, Vec<(u32, f64)>)>, Error>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                s.spawn(move || {
                    let mut out = Vec::new();
                    let mut start = w * chunk;
                    while start < dim {
                        for j in start..(start + chunk).min(dim) {
                            out.push((j, column(j)?));
                        }
                        start += workers * chunk;
                    }
                    Ok(out)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("assembly worker panicked")).collect()
    });
    let mut columns = vec![Vec::new(); dim];
    for part in parts {
        for (j, col) in part? {
            columns[j] = col;
        }
    }
    Ok(columns)
}

/// Complex length scale. The quartic power carries the full rotation,
/// `alpha^4 = modulus^4 e^{i theta}`, so that continua turn by `2 theta`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LengthScale {
    pub modulus: f64,
    pub theta: f64,
}

impl LengthScale {
    pub fn real(modulus: f64) -> Self {
        Self { modulus, theta: 0.0 }
    }

    pub fn rotated(modulus: f64, theta: f64) -> Self {
        Self { modulus, theta }
    }

    pub fn is_real(&self) -> bool {
        self.theta == 0.0
    }

    /// `alpha^(4k)`.
    pub fn power4(&self, k: i32) -> Complex64 {
        Complex64::from_polar(self.modulus.powi(4 * k), self.theta * k as f64)
    }

    /// Raw complex `alpha` with this convention.
    pub fn alpha(&self) -> Complex64 {
        Complex64::from_polar(self.modulus, self.theta / 4.0)
    }
}

/// Assembled pieces of `{alpha^4 T + alpha^8 V} c = alpha^12 E B c`.
#[derive(Clone, Debug)]
pub struct ProblemMatrices {
    pub params: SystemParams,
    /// Mass-weighted kinetic sum.
    pub kinetic: SparseSymMatrix,
    /// Attraction to the third particle, charge weights included.
    pub attraction: SparseSymMatrix,
    /// Bare `r1 r2` matrix; `16 eps Q1 Q2` is applied on combination.
    pub repulsion: SparseSymMatrix,
    pub metric: SparseSymMatrix,
    /// Bare `16 r1 r2 r12 (x1 + x2)`; the field strength is applied on
    /// combination.
    pub stark: Option<SparseSymMatrix>,
    pub n_base: u32,
    pub symmetry: Symmetry,
    /// Fixed angular momentum of a rotation-adapted basis.
    pub ml: Option<i64>,
    /// Reflection parity of a field-dressed basis.
    pub reflection: Option<i8>,
}

impl ProblemMatrices {
    pub fn dim(&self) -> usize {
        self.metric.dim()
    }
}

fn weighted(terms: &[(OperatorKind, f64)], basis: &(impl KetBasis + Sync)) -> Result<SparseSymMatrix, Error> {
    let mut mats = Vec::with_capacity(terms.len());
    for &(kind, w) in terms {
        if w != 0.0 {
            mats.push((w, assemble(build_operator(kind)?, basis)?));
        }
    }
    if mats.is_empty() {
        return Ok(SparseSymMatrix::zeros(basis.dim()));
    }
    let refs: Vec<(f64, &SparseSymMatrix)> = mats.iter().map(|(w, m)| (*w, m)).collect();
    SparseSymMatrix::linear_combination(&refs)
}

fn build_common(params: &SystemParams, basis: &(impl KetBasis + Sync)) -> Result<ProblemMatrices, Error> {
    params.validate()?;
    if !params.identical_pair() {
        return Err(Error::InconsistentSymmetry(
            "exchange-adapted bases require m1 = m2 and Q1 = Q2".into(),
        ));
    }
    let pot = params.potential_weights(1.0);
    let attraction: Vec<(OperatorKind, f64)> = pot.terms().into_iter().filter(|(k, _)| *k != OperatorKind::R1R2).collect();
    Ok(ProblemMatrices {
        params: *params,
        kinetic: weighted(&params.kinetic_weights(), basis)?,
        attraction: weighted(&attraction, basis)?,
        repulsion: assemble(build_operator(OperatorKind::R1R2)?, basis)?,
        metric: assemble(build_operator(OperatorKind::B)?, basis)?,
        stark: None,
        n_base: 0,
        symmetry: Symmetry::Singlet,
        ml: None,
        reflection: None,
    })
}

/// Field-free matrices over a rotation-adapted basis.
pub fn build_problem(params: &SystemParams, basis: &SymBasis) -> Result<ProblemMatrices, Error> {
    let mut p = build_common(params, basis)?;
    p.n_base = basis.n_base;
    p.symmetry = basis.symmetry;
    p.ml = Some(basis.ml);
    Ok(p)
}

/// Matrices including the field term over a reflection-adapted basis.
pub fn build_stark_problem(params: &SystemParams, basis: &StarkBasis) -> Result<ProblemMatrices, Error> {
    for kind in [OperatorKind::T1PlusT2, OperatorKind::R1R12PlusR2R12, OperatorKind::R1R2, OperatorKind::B, OperatorKind::StarkX1PlusX2] {
        if !is_reflection_invariant(build_operator(kind)?) {
            return Err(Error::InconsistentSymmetry(format!("{kind} is not reflection invariant")));
        }
    }
    let mut p = build_common(params, basis)?;
    p.stark = Some(assemble(build_operator(OperatorKind::StarkX1PlusX2)?, basis)?);
    p.n_base = basis.n_base;
    p.symmetry = basis.symmetry;
    p.reflection = Some(basis.eps);
    Ok(p)
}

/// `(A, M)` with `A = alpha^4 T + alpha^8 (V_attr + 16 eps Q1 Q2 R1R2) +
/// alpha^16 F S` and `M = alpha^12 B`, so that the generalized eigenvalues
/// are the energies.
pub fn combine_problem<T: Scalar>(
    p: &ProblemMatrices,
    scale: LengthScale,
    epsilon: f64,
    field: f64,
) -> Result<(SparseSymMatrix<T>, SparseSymMatrix<T>), Error> {
    let lift = |z: Complex64| {
        T::from_complex(z).ok_or_else(|| Error::InvalidParameter("complex length scale requires complex arithmetic".into()))
    };
    let a4 = lift(scale.power4(1))?;
    let a8 = lift(scale.power4(2))?;
    let a12 = lift(scale.power4(3))?;
    let a16 = lift(scale.power4(4))?;
    let rep = a8.scale(16.0 * epsilon * p.params.q1 * p.params.q2);
    let mut terms = vec![(a4, &p.kinetic), (a8, &p.attraction), (rep, &p.repulsion)];
    if field != 0.0 {
        let s = p.stark.as_ref().ok_or_else(|| {
            Error::InconsistentSymmetry("a field mixes M_L; assemble over a reflection-adapted basis".into())
        })?;
        terms.push((a16.scale(field), s));
    }
    let a = SparseSymMatrix::linear_combination(&terms)?;
    let m = SparseSymMatrix::linear_combination(&[(a12, &p.metric)])?;
    Ok((a, m))
}

/// Pair count of a symmetrized ket, used only for sanity checks.
pub fn pair_weight<B: KetBasis>(basis: &B, i: usize) -> f64 {
    basis.components(i).iter().map(|(_, w)| w * w).sum()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::{enumerate_basis, Symmetry};

    #[test]
    fn vacuum_kinetic_entry() {
        let b = enumerate_basis(0, Symmetry::Singlet, 0);
        let m = assemble(build_operator(OperatorKind::T1PlusT2).unwrap(), &b).unwrap();
        // <0000|T1+T2|0000> = 2, times pair weight 4
        assert_eq!(m.get(0, 0), 8.0);
        assert_eq!(pair_weight(&b, 0), 4.0);
    }

    #[test]
    fn lz_is_diagonal() {
        for ml in 0..3 {
            let b = enumerate_basis(ml, Symmetry::Triplet, 16);
            let m = assemble(build_operator(OperatorKind::Lz4).unwrap(), &b).unwrap();
            for (i, j, v) in m.iter() {
                assert_eq!(i, j);
                assert_eq!(v, 4.0 * ml as f64 * pair_weight(&b, i));
            }
        }
    }

    #[test]
    fn compiled_matches_exact() {
        let op = build_operator(OperatorKind::R1R2).unwrap();
        let c = CompiledOperator::new(op).unwrap();
        let ket = FockKet::new(3, 1, 2, 4);
        for shift in c.shifts().copied().collect::<Vec<_>>() {
            let Some(bra) = ket.shifted(&shift) else { continue };
            let exact = op.matrix_element(&bra, &ket).to_f64_pair().0;
            let fast = c.element(&bra, &ket).unwrap();
            assert!((exact - fast).abs() <= 1e-12 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let op = OperatorPolynomial::creation(0);
        let b = enumerate_basis(0, Symmetry::Singlet, 4);
        assert!(assemble(&op, &b).is_err());
    }

    #[test]
    fn scale_powers() {
        let s = LengthScale::rotated(0.5, 0.3);
        let a = s.alpha();
        assert!((a.powi(4) - s.power4(1)).norm() < 1e-15);
        assert!((s.power4(2) - Complex64::from_polar(0.5f64.powi(8), 0.6)).norm() < 1e-15);
    }
}
