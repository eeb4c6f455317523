//! Differential operators with polynomial coefficients in `(x_p, y_p, x_m, y_m)`
//! and their conversion to ladder form.
//!
//! A term `c x^a d^b` stores the coordinate exponents `a` and the derivative
//! exponents `b`; coordinates always stand to the left of derivatives.
//! Coefficients live in Q(sqrt 2) so that orthogonal substitutions with
//! `1/sqrt 2` entries stay exact.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{LadderMonomial, OperatorPolynomial};
use crate::exact::{ratio, Coefficient, Surd2};
use crate::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Var {
    Xp,
    Yp,
    Xm,
    Ym,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::Xp, Var::Yp, Var::Xm, Var::Ym];

    pub fn index(self) -> usize {
        self as usize
    }
}

/// Exponent layout: `[x_p, y_p, x_m, y_m, d_xp, d_yp, d_xm, d_ym]`.
pub type CoordinateExponents = [u8; 8];

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CoordinatePolynomial {
    terms: BTreeMap<CoordinateExponents, Surd2>,
}

impl CoordinatePolynomial {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: Surd2) -> Self {
        let mut p = Self::zero();
        p.add_term([0; 8], &c);
        p
    }

    pub fn rational(num: i64, den: i64) -> Self {
        Self::constant(Surd2::rational(ratio(num, den)))
    }

    pub fn one() -> Self {
        Self::rational(1, 1)
    }

    pub fn coord(v: Var) -> Self {
        let mut e = [0u8; 8];
        e[v.index()] = 1;
        let mut p = Self::zero();
        p.add_term(e, &Surd2::one());
        p
    }

    pub fn deriv(v: Var) -> Self {
        let mut e = [0u8; 8];
        e[4 + v.index()] = 1;
        let mut p = Self::zero();
        p.add_term(e, &Surd2::one());
        p
    }

    pub fn add_term(&mut self, e: CoordinateExponents, c: &Surd2) {
        if c.is_zero() {
            return;
        }
        match self.terms.get_mut(&e) {
            Some(existing) => {
                *existing += c;
                if existing.is_zero() {
                    self.terms.remove(&e);
                }
            }
            None => {
                self.terms.insert(e, c.clone());
            }
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&CoordinateExponents, &Surd2)> {
        self.terms.iter()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn has_derivatives(&self) -> bool {
        self.terms.keys().any(|e| e[4..].iter().any(|&k| k > 0))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, c);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(*e, &-c);
        }
        out
    }

    pub fn scale(&self, c: &Surd2) -> Self {
        let mut out = Self::zero();
        for (e, v) in &self.terms {
            out.add_term(*e, &(v * c));
        }
        out
    }

    pub fn scale_rational(&self, num: i64, den: i64) -> Self {
        self.scale(&Surd2::rational(ratio(num, den)))
    }

    /// Operator product. Derivatives of the left factor act on the
    /// coordinates of the right factor:
    /// `d^k x^m = sum_j C(k,j) m!/(m-j)! x^(m-j) d^(k-j)`.
    pub fn mul(&self, rhs: &Self) -> Self {
        let mut out = Self::zero();
        for (el, cl) in &self.terms {
            for (er, cr) in &rhs.terms {
                let c = cl * cr;
                let mut acc: Vec<(CoordinateExponents, u64)> = vec![([0; 8], 1)];
                for v in 0..4 {
                    let (xl, dl) = (el[v] as u64, el[4 + v] as u64);
                    let (xr, dr) = (er[v] as u64, er[4 + v] as u64);
                    let mut next = Vec::new();
                    for j in 0..=dl.min(xr) {
                        let w = binomial(dl, j) * falling(xr, j);
                        for (e, m) in &acc {
                            let mut e = *e;
                            e[v] = (xl + xr - j) as u8;
                            e[4 + v] = (dl + dr - j) as u8;
                            next.push((e, m * w));
                        }
                    }
                    acc = next;
                }
                for (e, m) in acc {
                    out.add_term(e, &c.scale_int(m));
                }
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..n {
            out = out.mul(self);
        }
        out
    }

    /// Substitutes `v_i -> sum_j map[i][j] v_j` in the coordinates and the
    /// same map in the derivatives, which is the correct transformation of
    /// the derivatives when `map` is orthogonal.
    pub fn substitute(&self, map: &[[Surd2; 4]; 4]) -> Self {
        let images: Vec<CoordinatePolynomial> = (0..4)
            .map(|i| {
                let mut p = Self::zero();
                for j in 0..4 {
                    let mut e = [0u8; 8];
                    e[j] = 1;
                    p.add_term(e, &map[i][j]);
                }
                p
            })
            .collect();
        let mut coord_pow: HashMap<(usize, u8), CoordinatePolynomial> = HashMap::new();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            // Coordinates and derivatives form two commuting families, so
            // each family expands independently and the results concatenate.
            let mut xs = Self::one();
            let mut ds = Self::one();
            for i in 0..4 {
                if e[i] > 0 {
                    let p = coord_pow
                        .entry((i, e[i]))
                        .or_insert_with(|| images[i].pow(e[i] as u32));
                    xs = xs.mul(p);
                }
                if e[4 + i] > 0 {
                    let p = coord_pow
                        .entry((i, e[4 + i]))
                        .or_insert_with(|| images[i].pow(e[4 + i] as u32));
                    ds = ds.mul(p);
                }
            }
            for (ex, cx) in &xs.terms {
                for (ed, cd) in &ds.terms {
                    let mut t = *ex;
                    for k in 0..4 {
                        t[4 + k] = ed[k];
                    }
                    out.add_term(t, &(&(c * cx) * cd));
                }
            }
        }
        out
    }

    /// Value of a derivative-free polynomial at a point.
    pub fn evaluate(&self, q: [f64; 4]) -> Option<f64> {
        if self.has_derivatives() {
            return None;
        }
        let mut acc = 0.0;
        for (e, c) in &self.terms {
            let mut t = c.to_f64();
            for i in 0..4 {
                t *= q[i].powi(e[i] as i32);
            }
            acc += t;
        }
        Some(acc)
    }

    /// Partial derivative of a derivative-free polynomial with respect to one
    /// coordinate.
    pub fn partial(&self, v: Var) -> Self {
        let i = v.index();
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            if e[i] == 0 {
                continue;
            }
            let mut e2 = *e;
            e2[i] -= 1;
            out.add_term(e2, &c.scale_int(e[i] as u64));
        }
        out
    }
}

/// Ladder form of a single coordinate or derivative in circular modes.
/// Plane `0` uses modes 1, 2 and plane `1` uses modes 3, 4:
/// `x = (a1 + a2 + a1† + a2†)/2`, `y = i(a1 - a2 - a1† + a2†)/2`,
/// `dx = (a1 + a2 - a1† - a2†)/2`, `dy = i(a1 - a2 + a1† - a2†)/2`.
fn linear_form(plane: usize, axis: usize, derivative: bool) -> OperatorPolynomial {
    let (m1, m2) = (2 * plane, 2 * plane + 1);
    let half = |re: i64, im: i64| Coefficient::from_ints(re, 2, im, 2);
    // (coefficient of a1, a2, a1†, a2†)
    let coeffs = match (axis, derivative) {
        (0, false) => [half(1, 0), half(1, 0), half(1, 0), half(1, 0)],
        (1, false) => [half(0, 1), half(0, -1), half(0, -1), half(0, 1)],
        (0, true) => [half(1, 0), half(1, 0), half(-1, 0), half(-1, 0)],
        _ => [half(0, 1), half(0, -1), half(0, 1), half(0, -1)],
    };
    let [c1, c2, c3, c4] = coeffs;
    OperatorPolynomial::from_terms([
        (LadderMonomial::annihilation(m1), c1),
        (LadderMonomial::annihilation(m2), c2),
        (LadderMonomial::creation(m1), c3),
        (LadderMonomial::creation(m2), c4),
    ])
}

/// Memoized products `x^a y^b dx^c dy^d` in one plane.
pub(crate) struct PlaneCache {
    powers: HashMap<(usize, usize, bool, u8), OperatorPolynomial>,
    products: HashMap<(usize, [u8; 4]), OperatorPolynomial>,
}

impl PlaneCache {
    pub(crate) fn new() -> Self {
        Self { powers: HashMap::new(), products: HashMap::new() }
    }

    fn power(&mut self, plane: usize, axis: usize, derivative: bool, n: u8) -> OperatorPolynomial {
        if n == 0 {
            return OperatorPolynomial::identity();
        }
        if let Some(p) = self.powers.get(&(plane, axis, derivative, n)) {
            return p.clone();
        }
        let lower = self.power(plane, axis, derivative, n - 1);
        let p = lower.multiply(&linear_form(plane, axis, derivative));
        self.powers.insert((plane, axis, derivative, n), p.clone());
        p
    }

    fn product(&mut self, plane: usize, e: [u8; 4]) -> OperatorPolynomial {
        if let Some(p) = self.products.get(&(plane, e)) {
            return p.clone();
        }
        let p = self
            .power(plane, 0, false, e[0])
            .multiply(&self.power(plane, 1, false, e[1]))
            .multiply(&self.power(plane, 0, true, e[2]))
            .multiply(&self.power(plane, 1, true, e[3]));
        self.products.insert((plane, e), p.clone());
        p
    }
}

/// Converts a coordinate operator to normal-ordered ladder form. The
/// irrational part of the coefficients must cancel.
pub fn from_coordinate_polynomial(p: &CoordinatePolynomial) -> Result<OperatorPolynomial, Error> {
    let mut cache = PlaneCache::new();
    match convert_dyadic(p, &mut cache) {
        Some(result) => result,
        None => convert_exact(p, &mut cache),
    }
}

/// Reference conversion with arbitrary-precision accumulation.
pub(crate) fn convert_exact(p: &CoordinatePolynomial, cache: &mut PlaneCache) -> Result<OperatorPolynomial, Error> {
    let mut rational = OperatorPolynomial::zero();
    let mut irrational = OperatorPolynomial::zero();
    for (e, c) in p.terms() {
        let plus = cache.product(0, [e[0], e[1], e[4], e[5]]);
        let minus = cache.product(1, [e[2], e[3], e[6], e[7]]);
        // Planes act on disjoint modes, so exponents simply add.
        for (mp, cp) in plus.terms() {
            for (mm, cm) in minus.terms() {
                let m = disjoint(mp, mm);
                let base = cp * cm;
                if !c.rat.is_zero() {
                    rational.add_term(m, &base.scale(&c.rat));
                }
                if !c.sqrt2.is_zero() {
                    irrational.add_term(m, &base.scale(&c.sqrt2));
                }
            }
        }
    }
    if !irrational.is_zero() {
        return Err(Error::IrrationalCoefficient);
    }
    Ok(rational)
}

fn disjoint(a: &LadderMonomial, b: &LadderMonomial) -> LadderMonomial {
    LadderMonomial::new(
        std::array::from_fn(|i| a.create[i] + b.create[i]),
        std::array::from_fn(|i| a.annihilate[i] + b.annihilate[i]),
    )
}

/// `k` with `r = n / 2^k`, or `None` for other denominators.
fn dyadic_exponent(r: &BigRational) -> Option<u32> {
    let den = r.denom();
    let k = den.trailing_zeros().unwrap_or(0);
    (*den == BigInt::from(1) << k).then_some(k as u32)
}

/// Gaussian integers `2^d c` for a plane product of degree `d`.
fn integer_plane(op: &OperatorPolynomial, degree: u32) -> Option<Vec<(LadderMonomial, i128, i128)>> {
    let scale = BigRational::from_integer(BigInt::from(1) << degree);
    op.terms()
        .map(|(m, c)| {
            let re = &c.re * &scale;
            let im = &c.im * &scale;
            if !re.is_integer() || !im.is_integer() {
                return None;
            }
            Some((*m, re.to_integer().try_into().ok()?, im.to_integer().try_into().ok()?))
        })
        .collect()
}

/// Exact conversion accumulated in `i128` over the common denominator
/// `2^s`. Returns `None` when a coefficient is not dyadic or a sum could
/// overflow, in which case the caller falls back to [`convert_exact`].
fn convert_dyadic(p: &CoordinatePolynomial, cache: &mut PlaneCache) -> Option<Result<OperatorPolynomial, Error>> {
    let mut s = 0u32;
    for (e, c) in p.terms() {
        let d: u32 = e.iter().map(|&k| k as u32).sum();
        s = s.max(d + dyadic_exponent(&c.rat)?.max(dyadic_exponent(&c.sqrt2)?));
    }
    if s > 100 {
        return None;
    }
    let mut planes: HashMap<(usize, [u8; 4]), Vec<(LadderMonomial, i128, i128)>> = HashMap::new();
    let mut acc: [HashMap<LadderMonomial, (i128, i128)>; 2] = [HashMap::new(), HashMap::new()];
    for (e, c) in p.terms() {
        let ep = [e[0], e[1], e[4], e[5]];
        let em = [e[2], e[3], e[6], e[7]];
        for (plane, key) in [(0usize, ep), (1, em)] {
            if !planes.contains_key(&(plane, key)) {
                let deg = key.iter().map(|&k| k as u32).sum();
                let op = integer_plane(&cache.product(plane, key), deg)?;
                planes.insert((plane, key), op);
            }
        }
        let plus = &planes[&(0, ep)];
        let minus = &planes[&(1, em)];
        let d: u32 = e.iter().map(|&k| k as u32).sum();
        for (slot, part) in acc.iter_mut().zip([&c.rat, &c.sqrt2]) {
            if part.is_zero() {
                continue;
            }
            let shift = s - d - dyadic_exponent(part)?;
            let num: i128 = (part.numer() << shift).try_into().ok()?;
            for (mp, pr, pi) in plus {
                for (mm, mr, mi) in minus {
                    let re = pr.checked_mul(*mr)?.checked_sub(pi.checked_mul(*mi)?)?;
                    let im = pr.checked_mul(*mi)?.checked_add(pi.checked_mul(*mr)?)?;
                    let entry = slot.entry(disjoint(mp, mm)).or_insert((0, 0));
                    entry.0 = entry.0.checked_add(num.checked_mul(re)?)?;
                    entry.1 = entry.1.checked_add(num.checked_mul(im)?)?;
                }
            }
        }
    }
    if acc[1].values().any(|&(re, im)| re != 0 || im != 0) {
        return Some(Err(Error::IrrationalCoefficient));
    }
    let den = BigInt::from(1) << s;
    let terms = std::mem::take(&mut acc[0]).into_iter().filter(|(_, (re, im))| *re != 0 || *im != 0).map(|(m, (re, im))| {
        let c = Coefficient::new(
            BigRational::new(BigInt::from(re), den.clone()),
            BigRational::new(BigInt::from(im), den.clone()),
        );
        (m, c)
    });
    Some(Ok(OperatorPolynomial::from_terms(terms)))
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let mut r = 1u64;
    for i in 0..k {
        r = r * (n - i) / (i + 1);
    }
    r
}

fn falling(n: u64, j: u64) -> u64 {
    (0..j).map(|t| n - t).product()
}

impl From<i64> for CoordinatePolynomial {
    fn from(n: i64) -> Self {
        Self::constant(Surd2::rational(BigRational::from_integer(BigInt::from(n))))
    }
}
