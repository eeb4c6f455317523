//! Physical operators of the regularized three-body equation.
//!
//! After multiplication by `16 r1 r2 r12` the Schrödinger equation reads
//! `{T1/(2 mu13) + T2/(2 mu23) + T12/m3 + V} psi = E B psi` with polynomial
//! coefficients only. Each operator is written as a [`CoordinatePolynomial`]
//! and converted once to ladder form.

use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::exact::{Coefficient, Surd2};
use crate::oscillator::{from_coordinate_polynomial, CoordinatePolynomial, OperatorPolynomial, Var};
use crate::Error;

/// Mass of the third particle.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mass {
    Finite(f64),
    Infinite,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub m1: f64,
    pub m2: f64,
    pub m3: Mass,
    pub q1: f64,
    pub q2: f64,
    pub q3: f64,
}

impl SystemParams {
    pub fn new(m1: f64, m2: f64, m3: Mass, q1: f64, q2: f64, q3: f64) -> Result<Self, Error> {
        let p = Self { m1, m2, m3, q1, q2, q3 };
        p.validate()?;
        Ok(p)
    }

    /// Two electrons bound to a fixed nucleus of charge 2.
    pub fn helium_infinite() -> Self {
        Self { m1: 1.0, m2: 1.0, m3: Mass::Infinite, q1: -1.0, q2: -1.0, q3: 2.0 }
    }

    /// Two electrons bound to a fixed proton.
    pub fn hminus_infinite() -> Self {
        Self { m1: 1.0, m2: 1.0, m3: Mass::Infinite, q1: -1.0, q2: -1.0, q3: 1.0 }
    }

    pub fn validate(&self) -> Result<(), Error> {
        let ok = |m: f64| m.is_finite() && m > 0.0;
        if !ok(self.m1) || !ok(self.m2) || matches!(self.m3, Mass::Finite(m) if !ok(m)) {
            return Err(Error::InvalidParameter("masses must be positive".into()));
        }
        if ![self.q1, self.q2, self.q3].iter().all(|q| q.is_finite()) {
            return Err(Error::InvalidParameter("charges must be finite".into()));
        }
        Ok(())
    }

    pub fn mu13(&self) -> f64 {
        match self.m3 {
            Mass::Infinite => self.m1,
            Mass::Finite(m3) => self.m1 * m3 / (self.m1 + m3),
        }
    }

    pub fn mu23(&self) -> f64 {
        match self.m3 {
            Mass::Infinite => self.m2,
            Mass::Finite(m3) => self.m2 * m3 / (self.m2 + m3),
        }
    }

    /// Particles 1 and 2 are interchangeable.
    pub fn identical_pair(&self) -> bool {
        self.m1 == self.m2 && self.q1 == self.q2
    }

    /// Weighted kinetic operators `T1/(2 mu13) + T2/(2 mu23) + T12/m3`. The
    /// mass-polarization term is absent for an infinite third mass.
    pub fn kinetic_weights(&self) -> Vec<(OperatorKind, f64)> {
        let mut w = if self.mu13() == self.mu23() {
            vec![(OperatorKind::T1PlusT2, 0.5 / self.mu13())]
        } else {
            vec![(OperatorKind::T1, 0.5 / self.mu13()), (OperatorKind::T2, 0.5 / self.mu23())]
        };
        if let Mass::Finite(m3) = self.m3 {
            w.push((OperatorKind::T12, 1.0 / m3));
        }
        w
    }

    /// Weights of `V = 16 (Q1 Q3 r2 r12 + Q2 Q3 r1 r12 + eps Q1 Q2 r1 r2)`,
    /// with `eps` scaling only the repulsion between particles 1 and 2.
    pub fn potential_weights(&self, epsilon: f64) -> PotentialWeights {
        PotentialWeights {
            r1r12: 16.0 * self.q2 * self.q3,
            r2r12: 16.0 * self.q1 * self.q3,
            r1r2: 16.0 * epsilon * self.q1 * self.q2,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PotentialWeights {
    pub r1r12: f64,
    pub r2r12: f64,
    pub r1r2: f64,
}

impl PotentialWeights {
    /// Operator list, merging the two attraction terms when their weights
    /// agree.
    pub fn terms(&self) -> Vec<(OperatorKind, f64)> {
        let mut t = if self.r1r12 == self.r2r12 {
            vec![(OperatorKind::R1R12PlusR2R12, self.r1r12)]
        } else {
            vec![(OperatorKind::R1R12, self.r1r12), (OperatorKind::R2R12, self.r2r12)]
        };
        t.push((OperatorKind::R1R2, self.r1r2));
        t
    }
}

pub fn potential_polynomial(params: &SystemParams, epsilon: f64) -> PotentialWeights {
    params.potential_weights(epsilon)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct QPoint {
    pub xp: f64,
    pub yp: f64,
    pub xm: f64,
    pub ym: f64,
}

impl QPoint {
    pub fn new(xp: f64, yp: f64, xm: f64, ym: f64) -> Self {
        Self { xp, yp, xm, ym }
    }

    pub fn to_array(self) -> [f64; 4] {
        [self.xp, self.yp, self.xm, self.ym]
    }
}

/// Cartesian positions `(x1, y1, x2, y2)` of particles 1 and 2 relative to
/// particle 3.
pub fn to_cartesian(q: QPoint) -> (f64, f64, f64, f64) {
    let QPoint { xp, yp, xm, ym } = q;
    let a = xp * xp - yp * yp;
    let b = xm * xm - ym * ym;
    let x1 = (a - 2.0 * xp * yp + b - 2.0 * xm * ym) * (a + 2.0 * xp * yp + b + 2.0 * xm * ym) / 16.0;
    let y1 = (a + b) * (xp * yp + xm * ym) / 4.0;
    let x2 = (a + 2.0 * xp * yp - b - 2.0 * xm * ym) * (a - 2.0 * xp * yp - b + 2.0 * xm * ym) / 16.0;
    let y2 = (a - b) * (xp * yp - xm * ym) / 4.0;
    (x1, y1, x2, y2)
}

/// `(r1, r2, r12)`.
pub fn distances(q: QPoint) -> (f64, f64, f64) {
    let QPoint { xp, yp, xm, ym } = q;
    let sq = |u: f64, v: f64| u * u + v * v;
    let r1 = sq(xp - ym, yp + xm) * sq(xp + ym, yp - xm) / 16.0;
    let r2 = sq(xp + xm, yp + ym) * sq(xp - xm, yp - ym) / 16.0;
    let r12 = sq(xp, yp) * sq(xm, ym) / 4.0;
    (r1, r2, r12)
}

/// Determinant of `d(x1, y1, x2, y2)/d(x_p, y_p, x_m, y_m)`.
pub fn jacobian_det(q: QPoint) -> f64 {
    let maps = cartesian_polynomials();
    let point = q.to_array();
    let mut jac = [[0.0; 4]; 4];
    for (i, f) in maps.iter().enumerate() {
        for (j, v) in Var::ALL.iter().enumerate() {
            jac[i][j] = f.partial(*v).evaluate(point).unwrap_or(0.0);
        }
    }
    det4(&jac)
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    let mut a = *m;
    let mut det = 1.0;
    for col in 0..4 {
        let pivot = (col..4).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs())).unwrap();
        if a[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            a.swap(pivot, col);
            det = -det;
        }
        det *= a[col][col];
        for r in col + 1..4 {
            let f = a[r][col] / a[col][col];
            for c in col..4 {
                a[r][c] -= f * a[col][c];
            }
        }
    }
    det
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum OperatorKind {
    T1,
    T2,
    T12,
    T1PlusT2,
    R1R12,
    R2R12,
    R1R12PlusR2R12,
    R1R2,
    B,
    Lz4,
    StarkX1PlusX2,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 11] = [
        OperatorKind::T1,
        OperatorKind::T2,
        OperatorKind::T12,
        OperatorKind::T1PlusT2,
        OperatorKind::R1R12,
        OperatorKind::R2R12,
        OperatorKind::R1R12PlusR2R12,
        OperatorKind::R1R2,
        OperatorKind::B,
        OperatorKind::Lz4,
        OperatorKind::StarkX1PlusX2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::T1 => "T1",
            OperatorKind::T2 => "T2",
            OperatorKind::T12 => "T12",
            OperatorKind::T1PlusT2 => "T1_plus_T2",
            OperatorKind::R1R12 => "R1R12",
            OperatorKind::R2R12 => "R2R12",
            OperatorKind::R1R12PlusR2R12 => "R1R12_plus_R2R12",
            OperatorKind::R1R2 => "R1R2",
            OperatorKind::B => "B",
            OperatorKind::Lz4 => "LZ4",
            OperatorKind::StarkX1PlusX2 => "STARK_X1_PLUS_X2",
        }
    }

    fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for OperatorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for OperatorKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self, Error> {
        Self::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Parse(format!("unknown operator kind {s:?}")))
    }
}

fn x(v: Var) -> CoordinatePolynomial {
    CoordinatePolynomial::coord(v)
}

fn d(v: Var) -> CoordinatePolynomial {
    CoordinatePolynomial::deriv(v)
}

fn sum_sq(a: &CoordinatePolynomial, b: &CoordinatePolynomial) -> CoordinatePolynomial {
    a.mul(a).add(&b.mul(b))
}

/// `16 r1 = ((x_p - y_m)^2 + (y_p + x_m)^2)((x_p + y_m)^2 + (y_p - x_m)^2)`.
fn sixteen_r1() -> CoordinatePolynomial {
    use Var::*;
    sum_sq(&x(Xp).sub(&x(Ym)), &x(Yp).add(&x(Xm))).mul(&sum_sq(&x(Xp).add(&x(Ym)), &x(Yp).sub(&x(Xm))))
}

/// `16 r2 = ((x_p + x_m)^2 + (y_p + y_m)^2)((x_p - x_m)^2 + (y_p - y_m)^2)`.
fn sixteen_r2() -> CoordinatePolynomial {
    use Var::*;
    sum_sq(&x(Xp).add(&x(Xm)), &x(Yp).add(&x(Ym))).mul(&sum_sq(&x(Xp).sub(&x(Xm)), &x(Yp).sub(&x(Ym))))
}

/// `4 r12 = (x_p^2 + y_p^2)(x_m^2 + y_m^2)`.
fn four_r12() -> CoordinatePolynomial {
    use Var::*;
    sum_sq(&x(Xp), &x(Yp)).mul(&sum_sq(&x(Xm), &x(Ym)))
}

pub fn r1_polynomial() -> CoordinatePolynomial {
    sixteen_r1().scale_rational(1, 16)
}

pub fn r2_polynomial() -> CoordinatePolynomial {
    sixteen_r2().scale_rational(1, 16)
}

pub fn r12_polynomial() -> CoordinatePolynomial {
    four_r12().scale_rational(1, 4)
}

/// `(x1, y1, x2, y2)` as quartic polynomials.
pub fn cartesian_polynomials() -> [CoordinatePolynomial; 4] {
    use Var::*;
    let a = x(Xp).mul(&x(Xp)).sub(&x(Yp).mul(&x(Yp)));
    let b = x(Xm).mul(&x(Xm)).sub(&x(Ym).mul(&x(Ym)));
    let pp = x(Xp).mul(&x(Yp)).scale_rational(2, 1);
    let mm = x(Xm).mul(&x(Ym)).scale_rational(2, 1);
    let x1 = a.sub(&pp).add(&b).sub(&mm).mul(&a.add(&pp).add(&b).add(&mm)).scale_rational(1, 16);
    let y1 = a.add(&b).mul(&pp.add(&mm)).scale_rational(1, 8);
    let x2 = a.add(&pp).sub(&b).sub(&mm).mul(&a.sub(&pp).sub(&b).add(&mm)).scale_rational(1, 16);
    let y2 = a.sub(&b).mul(&pp.sub(&mm)).scale_rational(1, 8);
    [x1, y1, x2, y2]
}

/// Angular bracket of `T1` (`sign = +1`) and `T2` (`sign = -1`).
fn kinetic_bracket(sign: i64) -> CoordinatePolynomial {
    use Var::*;
    let lap_p = d(Xp).mul(&d(Xp)).add(&d(Yp).mul(&d(Yp)));
    let lap_m = d(Xm).mul(&d(Xm)).add(&d(Ym).mul(&d(Ym)));
    let dot = x(Xp).mul(&x(Xm)).add(&x(Yp).mul(&x(Ym)));
    let cross = x(Xp).mul(&x(Ym)).sub(&x(Yp).mul(&x(Xm)));
    let d_dot = d(Xp).mul(&d(Xm)).add(&d(Yp).mul(&d(Ym)));
    let d_cross = d(Xp).mul(&d(Ym)).sub(&d(Yp).mul(&d(Xm)));
    let rho_p = sum_sq(&x(Xp), &x(Yp));
    let rho_m = sum_sq(&x(Xm), &x(Ym));
    rho_m
        .mul(&lap_p)
        .add(&rho_p.mul(&lap_m))
        .add(&dot.mul(&d_dot).scale_rational(2 * sign, 1))
        .sub(&cross.mul(&d_cross).scale_rational(2 * sign, 1))
}

fn t12_polynomial() -> CoordinatePolynomial {
    use Var::*;
    let lap_p = d(Xp).mul(&d(Xp)).add(&d(Yp).mul(&d(Yp)));
    let lap_m = d(Xm).mul(&d(Xm)).add(&d(Ym).mul(&d(Ym)));
    let rho_p = sum_sq(&x(Xp), &x(Yp));
    let rho_m = sum_sq(&x(Xm), &x(Ym));
    let dot = x(Xp).mul(&x(Xm)).add(&x(Yp).mul(&x(Ym)));
    let cross = x(Xp).mul(&x(Ym)).sub(&x(Yp).mul(&x(Xm)));
    let d_dot = d(Xp).mul(&d(Xm)).add(&d(Yp).mul(&d(Ym)));
    let d_cross = d(Yp).mul(&d(Xm)).sub(&d(Xp).mul(&d(Ym)));
    let radial = rho_p
        .mul(&rho_p)
        .sub(&rho_m.mul(&rho_m))
        .mul(&rho_m.mul(&lap_p).sub(&rho_p.mul(&lap_m)))
        .scale_rational(-1, 16);
    let angular = dot
        .mul(&cross)
        .mul(&dot.mul(&d_cross).sub(&cross.mul(&d_dot)))
        .scale_rational(-1, 2);
    radial.add(&angular)
}

/// Coordinate form of an operator, with coordinates left of derivatives.
pub fn coordinate_polynomial(kind: OperatorKind) -> CoordinatePolynomial {
    use Var::*;
    match kind {
        OperatorKind::T1 => sixteen_r2().mul(&kinetic_bracket(1)).scale_rational(-1, 16),
        OperatorKind::T2 => sixteen_r1().mul(&kinetic_bracket(-1)).scale_rational(-1, 16),
        OperatorKind::T12 => t12_polynomial(),
        OperatorKind::T1PlusT2 => coordinate_polynomial(OperatorKind::T1).add(&coordinate_polynomial(OperatorKind::T2)),
        OperatorKind::R1R12 => r1_polynomial().mul(&r12_polynomial()),
        OperatorKind::R2R12 => r2_polynomial().mul(&r12_polynomial()),
        OperatorKind::R1R12PlusR2R12 => r1_polynomial().add(&r2_polynomial()).mul(&r12_polynomial()),
        OperatorKind::R1R2 => r1_polynomial().mul(&r2_polynomial()),
        OperatorKind::B => r1_polynomial().mul(&r2_polynomial()).mul(&r12_polynomial()).scale_rational(16, 1),
        OperatorKind::Lz4 => x(Xp).mul(&d(Yp)).sub(&x(Yp).mul(&d(Xp))).add(&x(Xm).mul(&d(Ym))).sub(&x(Ym).mul(&d(Xm))),
        OperatorKind::StarkX1PlusX2 => {
            let [x1, _, x2, _] = cartesian_polynomials();
            coordinate_polynomial(OperatorKind::B).mul(&x1.add(&x2))
        }
    }
}

fn convert(kind: OperatorKind) -> Result<OperatorPolynomial, Error> {
    let op = from_coordinate_polynomial(&coordinate_polynomial(kind))?;
    Ok(match kind {
        // 4 L_z = -i (x_p d_yp - y_p d_xp + x_m d_ym - y_m d_xm)
        OperatorKind::Lz4 => op.scale(&Coefficient::from_ints(0, 1, -1, 1)),
        _ => op,
    })
}

static CACHE: [OnceLock<OperatorPolynomial>; 11] = [const { OnceLock::new() }; 11];

/// Ladder form of an operator, built once per process.
pub fn build_operator(kind: OperatorKind) -> Result<&'static OperatorPolynomial, Error> {
    let cell = &CACHE[kind.index()];
    if let Some(op) = cell.get() {
        return Ok(op);
    }
    let op = convert(kind)?;
    Ok(cell.get_or_init(|| op))
}

/// Convenience for weighted real combinations of cached operators.
pub fn weighted_sum(terms: &[(OperatorKind, i64, i64)]) -> Result<OperatorPolynomial, Error> {
    let mut out = OperatorPolynomial::zero();
    for &(kind, num, den) in terms {
        out = out.add(&build_operator(kind)?.scale(&Coefficient::from_ints(num, den, 0, 1)));
    }
    Ok(out)
}

/// Checks that a polynomial is unchanged by a linear substitution.
pub fn is_invariant(p: &CoordinatePolynomial, map: &[[Surd2; 4]; 4]) -> bool {
    p.substitute(map) == *p
}
