//! Normal-ordered polynomials in the ladder operators of four oscillators.
//!
//! A monomial `a1†^p1 a2†^p2 a3†^p3 a4†^p4 a1^q1 a2^q2 a3^q3 a4^q4` keeps
//! every creation operator to the left of every annihilation operator.
//! Coefficients are exact Gaussian rationals, so cancellations between
//! terms are exact and term counts are well defined.

mod coordinate;

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::exact::{parse_ratio, Coefficient};
use crate::Error;

pub use coordinate::{from_coordinate_polynomial, CoordinatePolynomial, Var};

pub const MODES: usize = 4;

/// Occupation shift `p - q` produced by a monomial.
pub type Shift = [i32; MODES];

/// `a†^p a^q` in per-mode exponent form.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LadderMonomial {
    pub create: [u8; MODES],
    pub annihilate: [u8; MODES],
}

impl LadderMonomial {
    pub const IDENTITY: Self = Self { create: [0; MODES], annihilate: [0; MODES] };

    pub fn new(create: [u8; MODES], annihilate: [u8; MODES]) -> Self {
        Self { create, annihilate }
    }

    pub fn creation(mode: usize) -> Self {
        let mut m = Self::IDENTITY;
        m.create[mode] = 1;
        m
    }

    pub fn annihilation(mode: usize) -> Self {
        let mut m = Self::IDENTITY;
        m.annihilate[mode] = 1;
        m
    }

    pub fn number(mode: usize) -> Self {
        let mut m = Self::IDENTITY;
        m.create[mode] = 1;
        m.annihilate[mode] = 1;
        m
    }

    pub fn degree(&self) -> u32 {
        self.create.iter().chain(&self.annihilate).map(|&e| e as u32).sum()
    }

    pub fn shift(&self) -> Shift {
        std::array::from_fn(|i| self.create[i] as i32 - self.annihilate[i] as i32)
    }

    pub fn adjoint(&self) -> Self {
        Self { create: self.annihilate, annihilate: self.create }
    }
}

// Graded lexicographic: total degree first, then creation then annihilation
// exponents.
impl Ord for LadderMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.create.cmp(&other.create))
            .then_with(|| self.annihilate.cmp(&other.annihilate))
    }
}

impl PartialOrd for LadderMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Occupation numbers `(n1, n2, n3, n4)` of the circular modes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FockKet(pub [u32; MODES]);

impl FockKet {
    pub fn new(n1: u32, n2: u32, n3: u32, n4: u32) -> Self {
        Self([n1, n2, n3, n4])
    }

    pub fn total(&self) -> u32 {
        self.0.iter().sum()
    }

    /// Ket reached by applying a shift, `None` when an occupation would go
    /// negative.
    pub fn shifted(&self, shift: &Shift) -> Option<Self> {
        let mut out = [0u32; MODES];
        for i in 0..MODES {
            let v = self.0[i] as i64 + shift[i] as i64;
            if v < 0 {
                return None;
            }
            out[i] = v as u32;
        }
        Some(Self(out))
    }
}

/// Canonical normal-ordered operator: each monomial at most once, no zero
/// coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct OperatorPolynomial {
    terms: BTreeMap<LadderMonomial, Coefficient>,
}

impl OperatorPolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn identity() -> Self {
        Self::monomial(LadderMonomial::IDENTITY, Coefficient::one())
    }

    pub fn monomial(m: LadderMonomial, c: Coefficient) -> Self {
        let mut p = Self::zero();
        p.add_term(m, &c);
        p
    }

    pub fn creation(mode: usize) -> Self {
        Self::monomial(LadderMonomial::creation(mode), Coefficient::one())
    }

    pub fn annihilation(mode: usize) -> Self {
        Self::monomial(LadderMonomial::annihilation(mode), Coefficient::one())
    }

    pub fn number(mode: usize) -> Self {
        Self::monomial(LadderMonomial::number(mode), Coefficient::one())
    }

    pub fn from_terms<I: IntoIterator<Item = (LadderMonomial, Coefficient)>>(terms: I) -> Self {
        let mut p = Self::zero();
        for (m, c) in terms {
            p.add_term(m, &c);
        }
        p
    }

    /// Accumulates `c * m`, dropping the term when it cancels.
    pub fn add_term(&mut self, m: LadderMonomial, c: &Coefficient) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&m) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&m);
                }
            }
            None => {
                self.terms.insert(m, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&LadderMonomial, &Coefficient)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, m: &LadderMonomial) -> Option<&Coefficient> {
        self.terms.get(m)
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn max_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Coefficient) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, v)| (*m, v * c)))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(*m, &-c);
        }
        out
    }

    /// Normal-ordered product `self * rhs`.
    pub fn multiply(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (ml, cl) in &self.terms {
            for (mr, cr) in &rhs.terms {
                let c = cl * cr;
                for (m, k) in reorder_product(ml, mr) {
                    out.add_term(m, &c.scale_int(k));
                }
            }
        }
        out
    }

    /// Hermitian adjoint: exponents swap and coefficients conjugate. The
    /// adjoint of a normal-ordered monomial is again normal ordered.
    pub fn adjoint(&self) -> Self {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.adjoint(), c.conj())))
    }

    pub fn is_hermitian(&self) -> bool {
        self.adjoint() == *self
    }

    pub fn shift_signature(&self) -> BTreeSet<Shift> {
        self.terms.keys().map(LadderMonomial::shift).collect()
    }

    /// Exact `<bra| self |ket>` as `coefficient * sqrt(radicand)`.
    pub fn matrix_element(&self, bra: &FockKet, ket: &FockKet) -> RadicalValue {
        let shift: Shift = std::array::from_fn(|i| bra.0[i] as i32 - ket.0[i] as i32);
        let radicand = shift_radicand(ket, &shift);
        let mut coeff = Coefficient::zero();
        for (m, c) in &self.terms {
            if m.shift() != shift {
                continue;
            }
            if let Some(factor) = monomial_integer_factor(m, ket) {
                coeff += &c.scale(&BigRational::from_integer(BigInt::from(factor)));
            }
        }
        if coeff.is_zero() {
            return RadicalValue::zero();
        }
        RadicalValue { coeff, radicand }
    }

    /// Canonical text form, one monomial per line:
    /// `p1 p2 p3 p4 q1 q2 q3 q4 re_num/re_den im_num/im_den`.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (m, c) in &self.terms {
            let p = m.create;
            let q = m.annihilate;
            let _ = writeln!(
                s,
                "{} {} {} {} {} {} {} {} {}",
                p[0], p[1], p[2], p[3], q[0], q[1], q[2], q[3], c
            );
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self, Error> {
        let mut out = Self::zero();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = || Error::Parse(format!("operator line {}: {line:?}", lineno + 1));
            let fields: Vec<&str> = line.split_whitespace().collect();
            if fields.len() != 10 {
                return Err(bad());
            }
            let mut exps = [0u8; 8];
            for (e, f) in exps.iter_mut().zip(&fields[..8]) {
                *e = f.parse().map_err(|_| bad())?;
            }
            let re = parse_ratio(fields[8]).ok_or_else(bad)?;
            let im = parse_ratio(fields[9]).ok_or_else(bad)?;
            let m = LadderMonomial::new(
                [exps[0], exps[1], exps[2], exps[3]],
                [exps[4], exps[5], exps[6], exps[7]],
            );
            out.add_term(m, &Coefficient::new(re, im));
        }
        Ok(out)
    }
}

/// Canonical linear combination `sum_k weights[k] * ops[k]`.
pub fn combine(ops: &[&OperatorPolynomial], weights: &[Coefficient]) -> Result<OperatorPolynomial, Error> {
    if ops.len() != weights.len() {
        return Err(Error::LengthMismatch { left: ops.len(), right: weights.len() });
    }
    let mut out = OperatorPolynomial::zero();
    for (op, w) in ops.iter().zip(weights) {
        for (m, c) in op.terms() {
            out.add_term(*m, &(c * w));
        }
    }
    Ok(out)
}

/// Exact value `coeff * sqrt(radicand)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RadicalValue {
    pub coeff: Coefficient,
    pub radicand: BigUint,
}

impl RadicalValue {
    pub fn zero() -> Self {
        Self { coeff: Coefficient::zero(), radicand: BigUint::one() }
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.is_zero()
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        let (re, im) = self.coeff.to_f64_pair();
        let root = self.radicand.to_f64().unwrap_or(f64::INFINITY).sqrt();
        (re * root, im * root)
    }

    /// The value as an exact rational when the radicand is a perfect square.
    pub fn as_rational(&self) -> Option<Coefficient> {
        let root = self.radicand.sqrt();
        if &root * &root != self.radicand {
            return None;
        }
        Some(self.coeff.scale(&BigRational::from_integer(BigInt::from(root))))
    }
}

/// `n (n-1) ... (n-j+1)`.
pub fn falling(n: u64, j: u64) -> BigUint {
    let mut acc = BigUint::one();
    for t in 0..j {
        if t >= n {
            return BigUint::zero();
        }
        acc *= n - t;
    }
    acc
}

/// Integer part of `<n+p-q| a†^p a^q |n>`: the product over modes of
/// `lo!/(n-q)!` with `lo = min(n, n+p-q)`. `None` when the monomial
/// annihilates the ket.
fn monomial_integer_factor(m: &LadderMonomial, ket: &FockKet) -> Option<BigUint> {
    let mut acc = BigUint::one();
    for i in 0..MODES {
        let n = ket.0[i] as u64;
        let (p, q) = (m.create[i] as u64, m.annihilate[i] as u64);
        if n < q {
            return None;
        }
        let lo = n.min(n + p - q);
        acc *= falling(lo, p.min(q));
    }
    Some(acc)
}

/// Common radical `prod_i hi_i!/lo_i!` shared by every monomial with the
/// given shift.
fn shift_radicand(ket: &FockKet, shift: &Shift) -> BigUint {
    let mut acc = BigUint::one();
    for i in 0..MODES {
        let n = ket.0[i] as i64;
        let m = n + shift[i] as i64;
        if m < 0 {
            return BigUint::one();
        }
        let hi = n.max(m) as u64;
        acc *= falling(hi, shift[i].unsigned_abs() as u64);
    }
    acc
}

/// Expansion of `(a†^p1 a^q1)(a†^p2 a^q2)` into normal-ordered monomials with
/// integer multiplicities. Per mode,
/// `a^q a†^p = sum_k C(q,k) C(p,k) k! a†^(p-k) a^(q-k)`.
fn reorder_product(left: &LadderMonomial, right: &LadderMonomial) -> Vec<(LadderMonomial, u64)> {
    let mut acc = vec![(LadderMonomial::IDENTITY, 1u64)];
    for i in 0..MODES {
        let (p1, q1) = (left.create[i] as u64, left.annihilate[i] as u64);
        let (p2, q2) = (right.create[i] as u64, right.annihilate[i] as u64);
        let kmax = q1.min(p2);
        let mut next = Vec::with_capacity(acc.len() * (kmax as usize + 1));
        for k in 0..=kmax {
            let w = binomial(q1, k) * binomial(p2, k) * factorial(k);
            for (m, c) in &acc {
                let mut m = *m;
                m.create[i] = (p1 + p2 - k) as u8;
                m.annihilate[i] = (q1 + q2 - k) as u8;
                next.push((m, c * w));
            }
        }
        acc = next;
    }
    acc
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

fn factorial(n: u64) -> u64 {
    (1..=n).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    fn c(n: i64) -> Coefficient {
        Coefficient::from_integer(n)
    }

    fn a(i: usize) -> OperatorPolynomial {
        OperatorPolynomial::annihilation(i)
    }

    fn ad(i: usize) -> OperatorPolynomial {
        OperatorPolynomial::creation(i)
    }

    #[test]
    fn canonical_commutator() {
        let prod = a(0).multiply(&ad(0));
        let expect = OperatorPolynomial::number(0).add(&OperatorPolynomial::identity());
        assert_eq!(prod, expect);
    }

    #[test]
    fn distinct_modes_commute() {
        let prod = a(0).multiply(&ad(1));
        let expect = OperatorPolynomial::monomial(
            LadderMonomial::new([0, 1, 0, 0], [1, 0, 0, 0]),
            Coefficient::one(),
        );
        assert_eq!(prod, expect);
    }

    #[test]
    fn number_operator_squared() {
        let n = OperatorPolynomial::number(0);
        let sq = n.multiply(&n);
        let expect = OperatorPolynomial::monomial(LadderMonomial::new([2, 0, 0, 0], [2, 0, 0, 0]), c(1))
            .add(&n);
        assert_eq!(sq, expect);
        // n^2 on |n>, n = 0..3
        for k in 0..4u32 {
            let ket = FockKet::new(k, 0, 0, 0);
            let v = sq.matrix_element(&ket, &ket).as_rational().unwrap();
            assert_eq!(v, c((k * k) as i64));
        }
    }

    #[test]
    fn combine_identity_and_cancellation() {
        let op = a(0).multiply(&ad(2)).add(&OperatorPolynomial::number(3));
        assert_eq!(combine(&[&op], &[c(1)]).unwrap(), op);
        let zero = combine(&[&op, &op], &[c(1), c(-1)]).unwrap();
        assert!(zero.is_zero());
        assert_eq!(zero.term_count(), 0);
        assert!(matches!(
            combine(&[&op], &[c(1), c(2)]),
            Err(Error::LengthMismatch { left: 1, right: 2 })
        ));
    }

    #[test]
    fn adjoint_conjugates() {
        assert_eq!(a(0).adjoint(), ad(0));
        let op = OperatorPolynomial::monomial(LadderMonomial::new([0, 1, 0, 0], [1, 0, 0, 0]), Coefficient::i());
        let expect = OperatorPolynomial::monomial(
            LadderMonomial::new([1, 0, 0, 0], [0, 1, 0, 0]),
            Coefficient::from_ints(0, 1, -1, 1),
        );
        assert_eq!(op.adjoint(), expect);
    }

    #[test]
    fn shift_of_number_operator() {
        let sig = OperatorPolynomial::number(0).shift_signature();
        assert_eq!(sig.into_iter().collect::<Vec<_>>(), vec![[0, 0, 0, 0]]);
    }

    #[test]
    fn matrix_element_of_creation() {
        // <3| a† |2> = sqrt 3
        let v = ad(0).matrix_element(&FockKet::new(3, 0, 0, 0), &FockKet::new(2, 0, 0, 0));
        assert_eq!(v.coeff, c(1));
        assert_eq!(v.radicand, BigUint::from(3u32));
        assert!(a(0).matrix_element(&FockKet::new(1, 0, 0, 0), &FockKet::new(0, 0, 0, 0)).is_zero());
    }

    #[test]
    fn text_roundtrip_and_order() {
        let op = a(0)
            .multiply(&ad(0))
            .multiply(&ad(1))
            .scale(&Coefficient::new(ratio(3, 4), ratio(-1, 2)));
        let text = op.to_text();
        assert_eq!(OperatorPolynomial::from_text(&text).unwrap(), op);
        let first = text.lines().next().unwrap();
        // identity-degree terms come first in graded order
        assert!(first.starts_with("0 1 0 0 0 0 0 0"));
        assert!(OperatorPolynomial::from_text("1 2 3").is_err());
    }

    #[test]
    fn graded_order() {
        let lo = LadderMonomial::new([0, 0, 0, 1], [0; 4]);
        let hi = LadderMonomial::new([1, 0, 0, 0], [0; 4]);
        let deg2 = LadderMonomial::new([0; 4], [1, 1, 0, 0]);
        assert!(lo < hi);
        assert!(hi < deg2);
    }
}
