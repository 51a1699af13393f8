//! Truncated q-expansions with exponents in (1/3)Z and cyclotomic
//! coefficients: powers of eta, level-3 Eisenstein series of weight 4 and
//! the normalized Eisenstein series of the obstruction space.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::exact::{int, rat, CycQ, Matrix, Rational};
use crate::fqm::TypeClass;
use crate::numeric::approx;
use crate::weil::WeilRep;

/// Exponent denominator used throughout.
pub const THIRDS: u32 = 3;
/// Default precision: exponents through q^10.
pub const DEFAULT_PRECISION: i64 = 30;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QSeriesError {
    #[error("series with exponent denominators {left} and {right} cannot be combined")]
    MixedDenominators { left: u32, right: u32 },
    #[error("coefficient of q^({numerator}/{denom}) lies beyond the precision {precision}")]
    BeyondPrecision { numerator: i64, denom: u32, precision: i64 },
    #[error("precision {0} is not positive")]
    InvalidPrecision(i64),
    #[error("the Eisenstein series index (0, 0) is excluded")]
    ZeroIndex,
    #[error("constant-term normalization has no unique solution")]
    NormalizationSingular,
    #[error("numeric check needs {0}")]
    NumericDomain(String),
    #[error("form has {found} components, representation has dimension {expected}")]
    ComponentCount { expected: usize, found: usize },
}

/// Σ c_n q^{n/denom} with every coefficient of exponent numerator at most
/// `precision` known; absent keys are zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QSeries {
    denom: u32,
    coeffs: BTreeMap<i64, CycQ>,
    precision: i64,
}

impl QSeries {
    pub fn zero(precision: i64) -> Self {
        QSeries { denom: THIRDS, coeffs: BTreeMap::new(), precision }
    }

    pub fn with_denom(denom: u32, precision: i64) -> Self {
        QSeries { denom, coeffs: BTreeMap::new(), precision }
    }

    pub fn monomial(numerator: i64, c: CycQ, precision: i64) -> Self {
        let mut s = QSeries::zero(precision);
        s.set(numerator, c);
        s
    }

    pub fn from_coeffs(coeffs: impl IntoIterator<Item = (i64, CycQ)>, precision: i64) -> Self {
        let mut s = QSeries::zero(precision);
        for (n, c) in coeffs {
            s.set(n, c);
        }
        s
    }

    /// Stores c at q^{n/denom}; terms beyond the precision are dropped.
    pub fn set(&mut self, numerator: i64, c: CycQ) {
        if numerator > self.precision {
            return;
        }
        if c.is_zero() {
            self.coeffs.remove(&numerator);
        } else {
            self.coeffs.insert(numerator, c.simplify());
        }
    }

    pub fn denom(&self) -> u32 {
        self.denom
    }

    pub fn precision(&self) -> i64 {
        self.precision
    }

    pub fn coefficient(&self, numerator: i64) -> Result<CycQ, QSeriesError> {
        if numerator > self.precision {
            return Err(QSeriesError::BeyondPrecision { numerator, denom: self.denom, precision: self.precision });
        }
        Ok(self.coeffs.get(&numerator).cloned().unwrap_or_else(CycQ::zero))
    }

    /// Nonzero terms in increasing exponent order.
    pub fn terms(&self) -> impl Iterator<Item = (i64, &CycQ)> {
        self.coeffs.iter().map(|(&n, c)| (n, c))
    }

    pub fn leading(&self) -> Option<(i64, &CycQ)> {
        self.terms().next()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn truncate(&self, precision: i64) -> QSeries {
        let precision = precision.min(self.precision);
        QSeries {
            denom: self.denom,
            coeffs: self.coeffs.range(..=precision).map(|(&n, c)| (n, c.clone())).collect(),
            precision,
        }
    }

    fn check(&self, other: &QSeries) -> Result<i64, QSeriesError> {
        if self.denom != other.denom {
            return Err(QSeriesError::MixedDenominators { left: self.denom, right: other.denom });
        }
        Ok(self.precision.min(other.precision))
    }

    pub fn add(&self, other: &QSeries) -> Result<QSeries, QSeriesError> {
        let precision = self.check(other)?;
        let mut out = self.truncate(precision);
        for (n, c) in other.terms().filter(|&(n, _)| n <= precision) {
            let sum = &out.coefficient(n)? + c;
            out.set(n, sum);
        }
        Ok(out)
    }

    pub fn sub(&self, other: &QSeries) -> Result<QSeries, QSeriesError> {
        self.add(&other.scale(&CycQ::from_int(-1)))
    }

    pub fn mul(&self, other: &QSeries) -> Result<QSeries, QSeriesError> {
        let precision = self.check(other)?;
        let mut acc: BTreeMap<i64, CycQ> = BTreeMap::new();
        for (n, a) in self.terms() {
            for (m, b) in other.terms().take_while(|&(m, _)| n + m <= precision) {
                *acc.entry(n + m).or_insert_with(CycQ::zero) += &(a * b);
            }
        }
        let mut out = QSeries::with_denom(self.denom, precision);
        for (n, c) in acc {
            out.set(n, c);
        }
        Ok(out)
    }

    pub fn scale(&self, c: &CycQ) -> QSeries {
        let mut out = QSeries::with_denom(self.denom, self.precision);
        for (n, x) in self.terms() {
            out.set(n, x * c);
        }
        out
    }

    /// Σ c_n e^{2πi n τ / denom} in floating point.
    pub fn evaluate(&self, tau: Complex64) -> Complex64 {
        let step = Complex64::i() * std::f64::consts::TAU * tau / f64::from(self.denom);
        self.terms().map(|(n, c)| approx(c) * (step * n as f64).exp()).sum()
    }
}

impl fmt::Display for QSeries {
    /// Human form such as `15·q^(1/3) + 0·q^(2/3) + …`, starting at the
    /// first nonzero term.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let Some((start, _)) = self.leading() else {
            return write!(f, "0 + …");
        };
        for n in start..=self.precision {
            let c = self.coefficient(n).map_err(|_| fmt::Error)?;
            let coeff = c.to_string();
            let coeff = if c.coeffs().iter().filter(|x| !num_traits::Zero::is_zero(*x)).count() > 1 {
                format!("({coeff})")
            } else if c.is_zero() {
                "0".to_string()
            } else {
                coeff
            };
            let r = rat(n, i64::from(self.denom));
            let power = if n == 0 {
                String::new()
            } else if r == int(1) {
                "·q".to_string()
            } else if r.is_integer() {
                format!("·q^{r}")
            } else {
                format!("·q^({r})")
            };
            write!(f, "{coeff}{power} + ")?;
        }
        write!(f, "…")
    }
}

impl Serialize for QSeries {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let coeffs: BTreeMap<String, &CycQ> = self.terms().map(|(n, c)| (n.to_string(), c)).collect();
        let mut st = s.serialize_struct("QSeries", 3)?;
        st.serialize_field("denom", &self.denom)?;
        st.serialize_field("precision", &self.precision)?;
        st.serialize_field("coeffs", &coeffs)?;
        st.end()
    }
}

fn check_precision(precision: i64) -> Result<(), QSeriesError> {
    if precision < 1 {
        return Err(QSeriesError::InvalidPrecision(precision));
    }
    Ok(())
}

/// Π_{n≥1} (1 − x^n)^8 through x^degree, by repeated multiplication with (1 − x^n).
fn eta8_product(degree: usize) -> Vec<BigInt> {
    let mut a = vec![BigInt::from(0); degree + 1];
    a[0] = BigInt::from(1);
    for n in 1..=degree {
        for _ in 0..8 {
            for i in (n..=degree).rev() {
                let t = a[i - n].clone();
                a[i] -= t;
            }
        }
    }
    a
}

/// η(τ)⁸ = q^{1/3}·Π(1 − q^n)^8 in powers of q^{1/3}.
pub fn eta_power_8(precision: i64) -> Result<QSeries, QSeriesError> {
    check_precision(precision)?;
    let degree = ((precision - 1) / 3) as usize;
    let prod = eta8_product(degree);
    Ok(QSeries::from_coeffs(
        prod.into_iter().enumerate().map(|(i, c)| (1 + 3 * i as i64, CycQ::from_rational(Rational::from(c)))),
        precision,
    ))
}

/// G₄(τ, a, b; 3) divided by (2π)⁴/(2·3⁵). The constant term is 1/3 when
/// a ≡ 0 and zero otherwise; q^{N/3} collects r³ζ₃^{rb} over m·r = N with
/// m ≡ a and r³ζ₃^{−rb} over m·r = N with m ≡ −a (m, r > 0).
pub fn eisenstein_g4(a: u8, b: u8, precision: i64) -> Result<QSeries, QSeriesError> {
    check_precision(precision)?;
    let (a, b) = (i64::from(a % 3), i64::from(b % 3));
    if a == 0 && b == 0 {
        return Err(QSeriesError::ZeroIndex);
    }
    let roots: Vec<CycQ> = (0..3).map(|k| CycQ::root_of_unity(k, 3)).collect();
    let mut out = QSeries::zero(precision);
    if a == 0 {
        out.set(0, CycQ::from_rational(rat(1, 3)));
    }
    for n in 1..=precision {
        let mut c = CycQ::zero();
        for m in (1..=n).filter(|m| n % m == 0) {
            let r = n / m;
            let cube = int(r * r * r);
            if (m - a).rem_euclid(3) == 0 {
                c += &roots[(r * b).rem_euclid(3) as usize].scale(&cube);
            }
            if (m + a).rem_euclid(3) == 0 {
                c += &roots[(-r * b).rem_euclid(3) as usize].scale(&cube);
            }
        }
        out.set(n, c);
    }
    Ok(out)
}

/// A type-aggregated vector-valued form (f_00, f_0, f_1, f_2) with the
/// size of each type, so per-element coefficients are f_t / |t|.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VVForm {
    components: [QSeries; 4],
    cardinalities: [usize; 4],
}

impl VVForm {
    pub fn new(components: [QSeries; 4], cardinalities: [usize; 4]) -> Self {
        VVForm { components, cardinalities }
    }

    pub fn component(&self, t: TypeClass) -> &QSeries {
        &self.components[t.position()]
    }

    pub fn components(&self) -> &[QSeries; 4] {
        &self.components
    }

    pub fn cardinality(&self, t: TypeClass) -> usize {
        self.cardinalities[t.position()]
    }

    /// Coefficient of one element of type t at q^{numerator/3}.
    pub fn element_coefficient(&self, t: TypeClass, numerator: i64) -> Result<CycQ, QSeriesError> {
        let c = self.component(t).coefficient(numerator)?;
        Ok(c.scale(&rat(1, self.cardinality(t).max(1) as i64)))
    }

    pub fn constant_terms(&self) -> [CycQ; 4] {
        self.components.clone().map(|s| s.coefficient(0).unwrap_or_else(|_| CycQ::zero()))
    }
}

/// The normalized Eisenstein series with its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObstructionEisenstein {
    /// coefficient of E₁/c
    pub a: Rational,
    /// coefficient of (E₂ + E₃ + E₄)/c
    pub b: Rational,
    pub form: VVForm,
}

struct Basis {
    e1: QSeries,
    sum: QSeries,
    twist1: QSeries,
    twist2: QSeries,
}

fn eisenstein_basis(precision: i64) -> Result<Basis, QSeriesError> {
    let e1 = eisenstein_g4(0, 1, precision)?;
    let e2 = eisenstein_g4(1, 0, precision)?;
    let e3 = eisenstein_g4(1, 1, precision)?;
    let e4 = eisenstein_g4(1, 2, precision)?;
    let w = CycQ::root_of_unity(1, 3);
    let w2 = CycQ::root_of_unity(2, 3);
    Ok(Basis {
        sum: e2.add(&e3)?.add(&e4)?,
        twist1: e2.add(&e3.scale(&w))?.add(&e4.scale(&w2))?,
        twist2: e2.add(&e3.scale(&w2))?.add(&e4.scale(&w))?,
        e1,
    })
}

/// The two-parameter family of weight-4 Eisenstein forms of the aggregated
/// type, with a, b the coefficients of E₁/c and (E₂+E₃+E₄)/c in f_00.
pub fn eisenstein_family(
    a: &Rational,
    b: &Rational,
    precision: i64,
    cardinalities: [usize; 4],
) -> Result<VVForm, QSeriesError> {
    let basis = eisenstein_basis(precision)?;
    family_from(&basis, a, b, cardinalities)
}

fn family_from(basis: &Basis, a: &Rational, b: &Rational, cardinalities: [usize; 4]) -> Result<VVForm, QSeriesError> {
    let c = |r: Rational| CycQ::from_rational(r);
    let twisted = -int(3) * a + int(3) * b;
    let f00 = basis.e1.scale(&c(a.clone())).add(&basis.sum.scale(&c(b.clone())))?;
    let f0 = basis
        .e1
        .scale(&c(-a - int(9) * b))
        .add(&basis.sum.scale(&c(-int(3) * a - int(7) * b)))?;
    let f1 = basis.twist1.scale(&c(twisted.clone()));
    let f2 = basis.twist2.scale(&c(twisted));
    Ok(VVForm::new([f00, f0, f1, f2], cardinalities))
}

/// The unique member of the family with constant terms −1/2 on the zero
/// element and 0 elsewhere.
pub fn obstruction_eisenstein(precision: i64, cardinalities: [usize; 4]) -> Result<ObstructionEisenstein, QSeriesError> {
    let basis = eisenstein_basis(precision)?;
    let at_a = family_from(&basis, &int(1), &int(0), cardinalities)?.constant_terms();
    let at_b = family_from(&basis, &int(0), &int(1), cardinalities)?.constant_terms();
    let target = [rat(-1, 2), int(0), int(0), int(0)];
    let rows: Vec<Vec<CycQ>> = (0..4)
        .map(|t| vec![at_a[t].clone(), at_b[t].clone(), CycQ::from_rational(target[t].clone())])
        .collect();
    let system = Matrix::from_rows(rows);
    let (reduced, pivots) = system.rref();
    if pivots != [0, 1] {
        return Err(QSeriesError::NormalizationSingular);
    }
    let solve = |i: usize| reduced.get(i, 2).to_rational().ok_or(QSeriesError::NormalizationSingular);
    let (a, b) = (solve(0)?, solve(1)?);
    let form = family_from(&basis, &a, &b, cardinalities)?;
    Ok(ObstructionEisenstein { a, b, form })
}

/// Componentwise product c_α·s of a coefficient vector with one series.
pub fn scalar_vector_form(coeffs: &[CycQ], s: &QSeries) -> Vec<QSeries> {
    coeffs.iter().map(|c| s.scale(c)).collect()
}

/// Smallest series precision accepted by `numeric_transform_check`.
pub const MIN_NUMERIC_PRECISION: i64 = 60;

/// Max deviation in f(τ + 1) = ρ(T)f(τ) and f(−1/τ) = τ⁴ρ(S)f(τ), each side
/// evaluated from the truncated series.
pub fn numeric_transform_check(form: &[QSeries], rep: &WeilRep, tau: Complex64) -> Result<f64, QSeriesError> {
    if form.len() != rep.dim() {
        return Err(QSeriesError::ComponentCount { expected: rep.dim(), found: form.len() });
    }
    let inv = -tau.inv();
    if tau.im < 0.8 || inv.im < 0.5 {
        return Err(QSeriesError::NumericDomain(format!("Im(tau) >= 0.8 and Im(-1/tau) >= 0.5, got tau = {tau}")));
    }
    if let Some(p) = form.iter().map(QSeries::precision).min().filter(|&p| p < MIN_NUMERIC_PRECISION) {
        return Err(QSeriesError::NumericDomain(format!("precision >= {MIN_NUMERIC_PRECISION}, got {p}")));
    }
    let at = |z: Complex64| form.iter().map(|s| s.evaluate(z)).collect::<Vec<_>>();
    let (base, shifted, inverted) = (at(tau), at(tau + 1.0), at(inv));
    let apply = |m: &Matrix, v: &[Complex64]| -> Vec<Complex64> {
        (0..m.rows()).map(|i| m.row(i).iter().zip(v).map(|(c, x)| approx(c) * x).sum()).collect()
    };
    let t_side = apply(rep.t(), &base);
    let s_side: Vec<Complex64> = apply(rep.s(), &base).into_iter().map(|x| x * tau.powi(4)).collect();
    let dev = |a: &[Complex64], b: &[Complex64]| a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    Ok(dev(&shifted, &t_side).max(dev(&inverted, &s_side)))
}
