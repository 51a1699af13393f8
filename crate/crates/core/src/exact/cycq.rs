use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::ExactError;

/// Exact rational numbers, always in lowest terms with a positive denominator.
pub type Rational = BigRational;

pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Reduction data for Q(ζ_n): the degree φ(n) and the image of every power
/// ζ^k, 0 <= k < n, in the power basis 1, ζ, ..., ζ^(φ(n)-1).
#[derive(Debug)]
pub(crate) struct Cyclotomic {
    pub(crate) n: u32,
    pub(crate) degree: usize,
    pub(crate) powers: Vec<Vec<i64>>,
}

/// Integer coefficients of Φ_n, lowest degree first.
pub fn cyclotomic_polynomial(n: u32) -> Vec<i64> {
    assert!(n >= 1, "cyclotomic polynomial of order 0");
    // x^n - 1
    let mut num = vec![0i64; n as usize + 1];
    num[0] = -1;
    num[n as usize] = 1;
    for d in 1..n {
        if n.is_multiple_of(d) {
            num = exact_div_monic(&num, &cyclotomic_polynomial(d));
        }
    }
    num
}

fn exact_div_monic(num: &[i64], den: &[i64]) -> Vec<i64> {
    let mut rem = num.to_vec();
    let dd = den.len() - 1;
    let qd = rem.len() - 1 - dd;
    let mut quot = vec![0i64; qd + 1];
    for i in (0..=qd).rev() {
        let c = rem[i + dd];
        quot[i] = c;
        for (j, &dc) in den.iter().enumerate() {
            rem[i + j] -= c * dc;
        }
    }
    debug_assert!(rem.iter().all(|&r| r == 0));
    quot
}

impl Cyclotomic {
    pub(crate) fn new(n: u32) -> Arc<Self> {
        let phi = cyclotomic_polynomial(n);
        let degree = phi.len() - 1;
        let mut powers = Vec::with_capacity(n as usize);
        let mut cur = vec![0i64; degree];
        cur[0] = 1;
        for _ in 0..n {
            powers.push(cur.clone());
            // multiply by x and reduce by the monic Φ_n
            let top = cur[degree - 1];
            let mut next = vec![0i64; degree];
            next[1..degree].copy_from_slice(&cur[..degree - 1]);
            for (j, slot) in next.iter_mut().enumerate() {
                *slot -= top * phi[j];
            }
            cur = next;
        }
        Arc::new(Cyclotomic { n, degree, powers })
    }
}

/// An exact element of the cyclotomic field Q(ζ_n), stored as rational
/// coordinates in the power basis 1, ζ_n, ..., ζ_n^(φ(n)-1).
///
/// Values of different conductors may be mixed freely: binary operations
/// first embed both operands into Q(ζ_lcm).
#[derive(Clone)]
pub struct CycQ {
    field: Arc<Cyclotomic>,
    coeffs: Vec<Rational>,
}

impl CycQ {
    pub(crate) fn from_parts(field: Arc<Cyclotomic>, coeffs: Vec<Rational>) -> Self {
        debug_assert_eq!(field.degree, coeffs.len());
        CycQ { field, coeffs }
    }

    pub(crate) fn field(&self) -> &Arc<Cyclotomic> {
        &self.field
    }

    pub fn from_rational(r: Rational) -> Self {
        CycQ { field: Cyclotomic::new(1), coeffs: vec![r] }
    }

    pub fn from_int(n: i64) -> Self {
        Self::from_rational(int(n))
    }

    pub fn zero() -> Self {
        Self::from_int(0)
    }

    pub fn one() -> Self {
        Self::from_int(1)
    }

    /// ζ_n^k = e^(2πik/n), with conductor n.
    pub fn root_of_unity(k: i64, n: u32) -> Self {
        assert!(n >= 1, "root of unity of order 0");
        let field = Cyclotomic::new(n);
        let e = k.rem_euclid(n as i64) as usize;
        let coeffs = field.powers[e].iter().map(|&c| int(c)).collect();
        CycQ { field, coeffs }
    }

    /// Zero element of Q(ζ_n).
    pub fn zero_of(n: u32) -> Self {
        let field = Cyclotomic::new(n);
        let coeffs = vec![Rational::zero(); field.degree];
        CycQ { field, coeffs }
    }

    pub fn conductor(&self) -> u32 {
        self.field.n
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs[1..].iter().all(Zero::is_zero)
    }

    pub fn to_rational(&self) -> Option<Rational> {
        self.is_rational().then(|| self.coeffs[0].clone())
    }

    /// Embeds into Q(ζ_lcm(conductor, n)). Never fails.
    pub fn embed(&self, n: u32) -> CycQ {
        let target = self.field.n.lcm(&n);
        if target == self.field.n {
            return self.clone();
        }
        self.embed_into(&Cyclotomic::new(target))
    }

    pub(crate) fn embed_into(&self, target: &Arc<Cyclotomic>) -> CycQ {
        if target.n == self.field.n {
            return CycQ { field: target.clone(), coeffs: self.coeffs.clone() };
        }
        assert!(target.n.is_multiple_of(self.field.n), "embedding into a non-multiple conductor");
        let step = (target.n / self.field.n) as usize;
        let mut out = vec![Rational::zero(); target.degree];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let image = &target.powers[(i * step) % target.n as usize];
            for (slot, &p) in out.iter_mut().zip(image) {
                if p != 0 {
                    *slot += c * int(p);
                }
            }
        }
        CycQ { field: target.clone(), coeffs: out }
    }

    /// The preimage of `self` in Q(ζ_m) when `m` divides the conductor and
    /// `self` lies in that subfield.
    pub fn restrict(&self, m: u32) -> Option<CycQ> {
        let n = self.field.n;
        if m == 0 || !n.is_multiple_of(m) {
            return None;
        }
        if m == n {
            return Some(self.clone());
        }
        let sub = Cyclotomic::new(m);
        // columns: images of the basis of Q(ζ_m) in Q(ζ_n)
        let columns: Vec<Vec<Rational>> = (0..sub.degree)
            .map(|i| {
                let basis = CycQ::from_parts(sub.clone(), unit_vector(sub.degree, i));
                basis.embed_into(&self.field).coeffs
            })
            .collect();
        let x = solve_rational(&columns, &self.coeffs)?;
        Some(CycQ { field: sub, coeffs: x })
    }

    /// The same element expressed over the smallest conductor containing it.
    pub fn simplify(&self) -> CycQ {
        let n = self.field.n;
        for d in 1..n {
            if n.is_multiple_of(d) {
                if let Some(r) = self.restrict(d) {
                    return r;
                }
            }
        }
        self.clone()
    }

    /// Complex conjugation, ζ ↦ ζ^(-1).
    pub fn conj(&self) -> CycQ {
        let n = self.field.n as usize;
        let mut out = vec![Rational::zero(); self.field.degree];
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let image = &self.field.powers[(n - i) % n];
            for (slot, &p) in out.iter_mut().zip(image) {
                if p != 0 {
                    *slot += c * int(p);
                }
            }
        }
        CycQ { field: self.field.clone(), coeffs: out }
    }

    pub fn scale(&self, r: &Rational) -> CycQ {
        CycQ { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| c * r).collect() }
    }

    pub fn inv(&self) -> Result<CycQ, ExactError> {
        if self.is_zero() {
            return Err(ExactError::DivisionByZero);
        }
        if self.is_rational() {
            let mut coeffs = vec![Rational::zero(); self.field.degree];
            coeffs[0] = self.coeffs[0].recip();
            return Ok(CycQ { field: self.field.clone(), coeffs });
        }
        // Solve self * x = 1 using the multiplication-by-self matrix.
        let d = self.field.degree;
        let columns: Vec<Vec<Rational>> = (0..d)
            .map(|i| {
                let basis = CycQ::from_parts(self.field.clone(), unit_vector(d, i));
                (self * &basis).coeffs
            })
            .collect();
        let x = solve_rational(&columns, &unit_vector(d, 0)).ok_or(ExactError::DivisionByZero)?;
        Ok(CycQ { field: self.field.clone(), coeffs: x })
    }

    pub fn div(&self, other: &CycQ) -> Result<CycQ, ExactError> {
        Ok(self * &other.inv()?)
    }

    pub fn pow(&self, e: i64) -> Result<CycQ, ExactError> {
        let base = if e < 0 { self.inv()? } else { self.clone() };
        let mut e = e.unsigned_abs();
        let mut acc = CycQ::one().embed(self.conductor());
        let mut sq = base;
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &sq;
            }
            sq = &sq * &sq;
            e >>= 1;
        }
        Ok(acc)
    }

    /// Norm squared |z|^2 = z * conj(z); always a non-negative rational.
    pub fn abs_squared(&self) -> Rational {
        (self * &self.conj())
            .to_rational()
            .expect("z * conj(z) is real and lies in a cyclotomic field, hence rational coordinates")
    }

    fn aligned<'a>(a: &'a CycQ, b: &'a CycQ) -> (std::borrow::Cow<'a, CycQ>, std::borrow::Cow<'a, CycQ>) {
        use std::borrow::Cow;
        let (na, nb) = (a.field.n, b.field.n);
        if na == nb {
            (Cow::Borrowed(a), Cow::Borrowed(b))
        } else if nb % na == 0 {
            (Cow::Owned(a.embed_into(&b.field)), Cow::Borrowed(b))
        } else if na % nb == 0 {
            (Cow::Borrowed(a), Cow::Owned(b.embed_into(&a.field)))
        } else {
            let target = Cyclotomic::new(na.lcm(&nb));
            (Cow::Owned(a.embed_into(&target)), Cow::Owned(b.embed_into(&target)))
        }
    }
}

fn unit_vector(d: usize, i: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); d];
    v[i] = Rational::one();
    v
}

/// Solves `Σ_j x_j * columns[j] = rhs` over Q, returning `None` when the
/// system is inconsistent. Columns are assumed linearly independent.
fn solve_rational(columns: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let rows = rhs.len();
    let cols = columns.len();
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|r| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[r].clone()).collect();
            row.push(rhs[r].clone());
            row
        })
        .collect();
    let mut pivot_row = 0;
    let mut pivots = Vec::new();
    for c in 0..cols {
        let Some(p) = (pivot_row..rows).find(|&r| !m[r][c].is_zero()) else {
            continue;
        };
        m.swap(pivot_row, p);
        let inv = m[pivot_row][c].recip();
        for x in m[pivot_row].iter_mut() {
            *x *= &inv;
        }
        for r in 0..rows {
            if r != pivot_row && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in c..=cols {
                    let t = &m[pivot_row][k] * &f;
                    m[r][k] -= t;
                }
            }
        }
        pivots.push(c);
        pivot_row += 1;
    }
    if m[pivot_row..].iter().any(|row| !row[cols].is_zero()) {
        return None;
    }
    let mut x = vec![Rational::zero(); cols];
    for (r, &c) in pivots.iter().enumerate() {
        x[c] = m[r][cols].clone();
    }
    Some(x)
}

impl PartialEq for CycQ {
    fn eq(&self, other: &Self) -> bool {
        let (a, b) = CycQ::aligned(self, other);
        a.coeffs == b.coeffs
    }
}

impl Eq for CycQ {}

impl<'a> Add<&'a CycQ> for &'a CycQ {
    type Output = CycQ;
    fn add(self, rhs: &'a CycQ) -> CycQ {
        let (a, b) = CycQ::aligned(self, rhs);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x + y).collect();
        CycQ { field: a.field.clone(), coeffs }
    }
}

impl<'a> Sub<&'a CycQ> for &'a CycQ {
    type Output = CycQ;
    fn sub(self, rhs: &'a CycQ) -> CycQ {
        let (a, b) = CycQ::aligned(self, rhs);
        let coeffs = a.coeffs.iter().zip(&b.coeffs).map(|(x, y)| x - y).collect();
        CycQ { field: a.field.clone(), coeffs }
    }
}

impl<'a> Mul<&'a CycQ> for &'a CycQ {
    type Output = CycQ;
    fn mul(self, rhs: &'a CycQ) -> CycQ {
        let (a, b) = CycQ::aligned(self, rhs);
        let field = a.field.clone();
        let d = field.degree;
        let n = field.n as usize;
        let mut raw = vec![Rational::zero(); 2 * d - 1];
        for (i, x) in a.coeffs.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            for (j, y) in b.coeffs.iter().enumerate() {
                if !y.is_zero() {
                    raw[i + j] += x * y;
                }
            }
        }
        let mut out = vec![Rational::zero(); d];
        for (k, c) in raw.into_iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if k < d {
                out[k] += c;
                continue;
            }
            for (slot, &p) in out.iter_mut().zip(&field.powers[k % n]) {
                if p != 0 {
                    *slot += &c * int(p);
                }
            }
        }
        CycQ { field, coeffs: out }
    }
}

impl Neg for &CycQ {
    type Output = CycQ;
    fn neg(self) -> CycQ {
        CycQ { field: self.field.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr<CycQ> for CycQ {
            type Output = CycQ;
            fn $m(self, rhs: CycQ) -> CycQ {
                (&self).$m(&rhs)
            }
        }
        impl<'a> $tr<&'a CycQ> for CycQ {
            type Output = CycQ;
            fn $m(self, rhs: &'a CycQ) -> CycQ {
                (&self).$m(rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl Neg for CycQ {
    type Output = CycQ;
    fn neg(self) -> CycQ {
        -&self
    }
}

impl AddAssign<&CycQ> for CycQ {
    fn add_assign(&mut self, rhs: &CycQ) {
        if self.field.n == rhs.field.n {
            for (x, y) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
                *x += y;
            }
        } else {
            *self = &*self + rhs;
        }
    }
}

impl From<Rational> for CycQ {
    fn from(r: Rational) -> Self {
        CycQ::from_rational(r)
    }
}

impl From<i64> for CycQ {
    fn from(n: i64) -> Self {
        CycQ::from_int(n)
    }
}

impl fmt::Debug for CycQ {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CycQ[{}]({})", self.field.n, self)
    }
}

impl fmt::Display for CycQ {
    /// Writes the element as a polynomial in ζ_n; conductor 3 uses ω.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let symbol = if self.field.n == 3 { "ω".to_string() } else { format!("ζ{}", self.field.n) };
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let (sign, mag) = if c.is_negative() { ("-", -c) } else { ("+", c.clone()) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let power = match i {
                0 => String::new(),
                1 => symbol.clone(),
                _ => format!("{symbol}^{i}"),
            };
            if i == 0 {
                write!(f, "{mag}")?;
            } else if mag.is_one() {
                write!(f, "{power}")?;
            } else {
                write!(f, "{mag}·{power}")?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycQJson {
    conductor: u32,
    coeffs: Vec<String>,
}

impl Serialize for CycQ {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CycQJson { conductor: self.field.n, coeffs: self.coeffs.iter().map(|c| c.to_string()).collect() }
            .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CycQ {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let raw = CycQJson::deserialize(d)?;
        if raw.conductor == 0 {
            return Err(D::Error::custom("conductor must be positive"));
        }
        let field = Cyclotomic::new(raw.conductor);
        if raw.coeffs.len() != field.degree {
            return Err(D::Error::custom(format!(
                "expected {} coefficients for conductor {}, got {}",
                field.degree,
                raw.conductor,
                raw.coeffs.len()
            )));
        }
        let coeffs = raw
            .coeffs
            .iter()
            .map(|s| Rational::from_str(s).map_err(|e| D::Error::custom(format!("bad fraction {s:?}: {e}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(CycQ { field, coeffs })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn omega() -> CycQ {
        CycQ::root_of_unity(1, 3)
    }

    #[test]
    fn cyclotomic_polynomials() {
        assert_eq!(cyclotomic_polynomial(1), vec![-1, 1]);
        assert_eq!(cyclotomic_polynomial(3), vec![1, 1, 1]);
        assert_eq!(cyclotomic_polynomial(4), vec![1, 0, 1]);
        assert_eq!(cyclotomic_polynomial(6), vec![1, -1, 1]);
        assert_eq!(cyclotomic_polynomial(12), vec![1, 0, -1, 0, 1]);
    }

    #[test]
    fn omega_relations() {
        let w = omega();
        let w2 = &w * &w;
        assert!((&w * &w2).is_one());
        assert!((&(&CycQ::one() + &w) + &w2).is_zero());
        assert_eq!(w.conj(), w2);
    }

    #[test]
    fn roots_of_unity() {
        assert!(CycQ::root_of_unity(0, 1).is_one());
        assert_eq!(CycQ::root_of_unity(1, 3), omega());
        let minus_one = CycQ::root_of_unity(3, 6);
        assert_eq!(minus_one.conductor(), 6);
        assert_eq!(minus_one.to_rational(), Some(int(-1)));
        assert_eq!(CycQ::root_of_unity(-1, 3), CycQ::root_of_unity(2, 3));
    }

    #[test]
    fn mixed_conductors_use_lcm() {
        let i = CycQ::root_of_unity(1, 4);
        let w = omega();
        let p = &i * &w;
        assert_eq!(p.conductor(), 12);
        assert_eq!(p, CycQ::root_of_unity(3 + 4, 12));
        assert_eq!(p.pow(12).unwrap(), CycQ::one());
    }

    #[test]
    fn embed_and_restrict_round_trip() {
        let z = &omega().scale(&rat(3, 7)) + &CycQ::from_rational(rat(-1, 2));
        let up = z.embed(12);
        assert_eq!(up.conductor(), 12);
        let back = up.restrict(3).unwrap();
        assert_eq!(back.conductor(), 3);
        assert_eq!(back.coeffs(), z.coeffs());
        assert!(CycQ::root_of_unity(1, 4).embed(12).restrict(3).is_none());
    }

    #[test]
    fn simplify_finds_minimal_conductor() {
        let z = CycQ::root_of_unity(1, 6);
        let s = z.simplify();
        assert_eq!(s.conductor(), 3);
        assert_eq!(s, -(&omega() * &omega()));
        assert_eq!(CycQ::root_of_unity(3, 6).simplify().conductor(), 1);
    }

    #[test]
    fn inverse_and_zero_division() {
        let z = &omega() + &CycQ::from_int(2);
        assert!((&z * &z.inv().unwrap()).is_one());
        assert!(matches!(CycQ::zero().inv(), Err(ExactError::DivisionByZero)));
        let u = CycQ::root_of_unity(5, 12) + CycQ::from_int(1);
        assert!((&u * &u.inv().unwrap()).is_one());
    }

    #[test]
    fn display_uses_omega() {
        let z = &CycQ::from_rational(rat(-1, 9)) + &omega().scale(&int(2));
        assert_eq!(z.to_string(), "-1/9 + 2·ω");
        assert_eq!(CycQ::zero().to_string(), "0");
    }

    #[test]
    fn json_round_trip() {
        let z = &CycQ::from_rational(rat(-1, 9)) + &omega();
        let s = serde_json::to_string(&z).unwrap();
        assert_eq!(s, r#"{"conductor":3,"coeffs":["-1/9","1"]}"#);
        let back: CycQ = serde_json::from_str(&s).unwrap();
        assert_eq!(back, z);
        assert!(serde_json::from_str::<CycQ>(r#"{"conductor":3,"coeffs":["1"]}"#).is_err());
    }
}
