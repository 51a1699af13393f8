//! Finite quadratic modules: a finite abelian group with a Q/2Z-valued
//! quadratic form and its Q/Z-valued bilinear pairing.

mod classify;
mod orthogonal;

pub use classify::{classify, pairing_table, Classification, PairingTable};
pub use orthogonal::{
    isotropic_incidence, orthogonal_bases, orthogonal_group, reflect, Isometry, OrthoBasis, OrthogonalGroup,
};

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::exact::{int, CycQ, Rational};

/// Largest module handled with precomputed tables.
pub const MAX_SIZE: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FqmError {
    #[error("invalid generator gram: {0}")]
    InvalidGram(String),
    #[error("pairing is degenerate: {element} pairs trivially with everything")]
    Degenerate { element: String },
    #[error("module of order {size} exceeds the supported size {MAX_SIZE}")]
    TooLarge { size: usize },
    #[error("operation needs an elementary abelian 3-group with q in (2/3)Z")]
    NotTernary,
    #[error("element {element} has q = {q}, outside the four type classes")]
    Unclassified { element: String, q: String },
    #[error("pairing counts for ({u}, {v}) depend on the representative of {u}")]
    RepresentativeDependent { u: String, v: String },
    #[error("{element} is isotropic and has no reflection")]
    Isotropic { element: String },
    #[error("orthogonal completion of {anchor} is not unique up to signs ({count} completions)")]
    NonUniqueCompletion { anchor: String, count: usize },
    #[error("{anchor} has no orthogonal completion")]
    NoCompletion { anchor: String },
    #[error("map is not an isometry of the module")]
    NotIsometry,
    #[error("cannot parse element label {0:?}")]
    BadLabel(String),
}

/// An element of a quadratic module, as its index in lexicographic
/// coordinate order. Only meaningful together with its module.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Element(pub(crate) u32);

impl Element {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// The four value classes of a module whose q-values lie in (2/3)Z/2Z.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum TypeClass {
    /// the zero element
    Zero,
    /// nonzero with q = 0
    Isotropic,
    /// q = −4/3
    Long,
    /// q = −2/3
    Short,
}

impl TypeClass {
    pub const ALL: [TypeClass; 4] = [TypeClass::Zero, TypeClass::Isotropic, TypeClass::Long, TypeClass::Short];

    /// Short table label: "00", "0", "1", "2".
    pub fn label(self) -> &'static str {
        match self {
            TypeClass::Zero => "00",
            TypeClass::Isotropic => "0",
            TypeClass::Long => "1",
            TypeClass::Short => "2",
        }
    }

    /// q-value as a representative in (−2, 0].
    pub fn q_value(self) -> Rational {
        match self {
            TypeClass::Zero | TypeClass::Isotropic => int(0),
            TypeClass::Long => Rational::new((-4).into(), 3.into()),
            TypeClass::Short => Rational::new((-2).into(), 3.into()),
        }
    }

    pub fn position(self) -> usize {
        self as usize
    }
}

impl fmt::Display for TypeClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// A finite quadratic module presented as ⊕ Z/d_i with the Gram matrix of
/// its generators. Values are stored scaled by the level N:
/// q(x) = q_num(x)/N mod 2 and b(x, y) = b_num(x, y)/N mod 1.
#[derive(Clone)]
pub struct QuadraticModule {
    orders: Vec<u32>,
    strides: Vec<usize>,
    level: i64,
    gram: Vec<Vec<i64>>,
    size: usize,
    q_table: Vec<i64>,
    b_table: Vec<i64>,
    ternary: bool,
}

impl QuadraticModule {
    /// Builds the module from invariant factors and the rational Gram matrix
    /// of the generators; factors equal to 1 are dropped.
    pub fn new(orders: &[u32], gram: &[Vec<Rational>]) -> Result<Self, FqmError> {
        if gram.len() != orders.len() || gram.iter().any(|r| r.len() != orders.len()) {
            return Err(FqmError::InvalidGram("gram shape does not match the number of generators".into()));
        }
        let keep: Vec<usize> = (0..orders.len()).filter(|&i| orders[i] > 1).collect();
        let orders: Vec<u32> = keep.iter().map(|&i| orders[i]).collect();
        let gram: Vec<Vec<Rational>> = keep.iter().map(|&i| keep.iter().map(|&j| gram[i][j].clone()).collect()).collect();

        for i in 0..gram.len() {
            for j in 0..gram.len() {
                if gram[i][j] != gram[j][i] {
                    return Err(FqmError::InvalidGram("gram is not symmetric".into()));
                }
                if !(&gram[i][j] * int(orders[i] as i64)).is_integer() {
                    return Err(FqmError::InvalidGram(format!("pairing of generator {i} is not {}-torsion", orders[i])));
                }
            }
            let d = int(orders[i] as i64);
            let top = &gram[i][i] * &d * &d;
            if !top.is_integer() || top.to_integer().is_odd() {
                return Err(FqmError::InvalidGram(format!("q is not well defined on generator {i}")));
            }
        }

        let mut level = BigInt::one();
        for row in &gram {
            for x in row {
                level = level.lcm(x.denom());
            }
        }
        let level = level.to_i64().ok_or_else(|| FqmError::InvalidGram("level too large".into()))?;
        let scaled: Vec<Vec<i64>> = gram
            .iter()
            .map(|row| row.iter().map(|x| (x * int(level)).to_integer().to_i64().expect("scaled gram entry fits")).collect())
            .collect();

        let size = orders.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d as usize)).unwrap_or(usize::MAX);
        if size > MAX_SIZE {
            return Err(FqmError::TooLarge { size });
        }
        let mut strides = vec![1usize; orders.len()];
        for i in (0..orders.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * orders[i + 1] as usize;
        }

        let mut m = QuadraticModule {
            orders,
            strides,
            level,
            gram: scaled,
            size,
            q_table: Vec::new(),
            b_table: Vec::new(),
            ternary: false,
        };
        let coords: Vec<Vec<i64>> = (0..size).map(|i| m.coords_of(i)).collect();
        m.q_table = coords.iter().map(|c| m.q_from_coords(c)).collect();
        m.b_table = Vec::with_capacity(size * size);
        for x in &coords {
            for y in &coords {
                m.b_table.push(m.b_from_coords(x, y));
            }
        }
        for x in 1..size {
            if (0..size).all(|y| m.b_table[x * size + y] == 0) {
                return Err(FqmError::Degenerate { element: m.label(Element(x as u32)) });
            }
        }
        m.ternary = m.orders.iter().all(|&d| d == 3) && m.q_table.iter().all(|&q| (3 * q) % (2 * m.level) == 0);
        Ok(m)
    }

    pub fn trivial() -> Self {
        QuadraticModule::new(&[], &[]).expect("trivial module")
    }

    /// Diagonal F₃-module with q(e_i) = 2·t_i/3 mod 2 and e_i pairwise orthogonal.
    pub fn ternary_diagonal(values: &[i64]) -> Result<Self, FqmError> {
        let n = values.len();
        let gram: Vec<Vec<Rational>> = (0..n)
            .map(|i| (0..n).map(|j| if i == j { Rational::new((2 * values[i]).into(), 3.into()) } else { int(0) }).collect())
            .collect();
        QuadraticModule::new(&vec![3; n], &gram)
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn orders(&self) -> &[u32] {
        &self.orders
    }

    pub fn rank(&self) -> usize {
        self.orders.len()
    }

    pub fn level(&self) -> i64 {
        self.level
    }

    /// True for (Z/3)^n with every q-value in (2/3)Z/2Z.
    pub fn is_ternary(&self) -> bool {
        self.ternary
    }

    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        (0..self.size as u32).map(Element)
    }

    pub fn zero(&self) -> Element {
        Element(0)
    }

    pub fn generator(&self, i: usize) -> Element {
        Element(self.strides[i] as u32)
    }

    fn coords_of(&self, mut idx: usize) -> Vec<i64> {
        let mut c = vec![0i64; self.orders.len()];
        for i in 0..self.orders.len() {
            c[i] = (idx / self.strides[i]) as i64;
            idx %= self.strides[i];
        }
        c
    }

    pub fn coords(&self, e: Element) -> Vec<i64> {
        self.coords_of(e.index())
    }

    /// Element with the given coordinates, reduced modulo the orders.
    pub fn element(&self, coords: &[i64]) -> Element {
        assert_eq!(coords.len(), self.orders.len(), "coordinate length differs from rank");
        let idx: usize = coords
            .iter()
            .zip(&self.orders)
            .zip(&self.strides)
            .map(|((&c, &d), &s)| c.rem_euclid(d as i64) as usize * s)
            .sum();
        Element(idx as u32)
    }

    pub fn add(&self, a: Element, b: Element) -> Element {
        let (x, y) = (self.coords(a), self.coords(b));
        self.element(&x.iter().zip(&y).map(|(p, q)| p + q).collect::<Vec<_>>())
    }

    pub fn neg(&self, a: Element) -> Element {
        self.element(&self.coords(a).iter().map(|p| -p).collect::<Vec<_>>())
    }

    pub fn mul(&self, k: i64, a: Element) -> Element {
        self.element(&self.coords(a).iter().map(|p| k * p).collect::<Vec<_>>())
    }

    fn q_from_coords(&self, x: &[i64]) -> i64 {
        let n = x.len();
        let mut s = 0i64;
        for i in 0..n {
            s += self.gram[i][i] * x[i] * x[i];
            for j in i + 1..n {
                s += 2 * self.gram[i][j] * x[i] * x[j];
            }
        }
        s.rem_euclid(2 * self.level)
    }

    fn b_from_coords(&self, x: &[i64], y: &[i64]) -> i64 {
        let mut s = 0i64;
        for (i, xi) in x.iter().enumerate() {
            for (j, yj) in y.iter().enumerate() {
                s += self.gram[i][j] * xi * yj;
            }
        }
        s.rem_euclid(self.level)
    }

    /// N·q(e), in [0, 2N).
    pub fn q_scaled(&self, e: Element) -> i64 {
        self.q_table[e.index()]
    }

    /// N·b(e, f), in [0, N).
    pub fn b_scaled(&self, e: Element, f: Element) -> i64 {
        self.b_table[e.index() * self.size + f.index()]
    }

    /// q(e) in [0, 2).
    pub fn q(&self, e: Element) -> Rational {
        Rational::new(self.q_scaled(e).into(), self.level.into())
    }

    /// q(e) in (−2, 0].
    pub fn q_nonpositive(&self, e: Element) -> Rational {
        let q = self.q(e);
        if q.is_zero() {
            q
        } else {
            q - int(2)
        }
    }

    /// b(e, f) in [0, 1).
    pub fn b(&self, e: Element, f: Element) -> Rational {
        Rational::new(self.b_scaled(e, f).into(), self.level.into())
    }

    /// The F₃ value t with q(e) = 2t/3 mod 2.
    pub fn q3(&self, e: Element) -> Result<u8, FqmError> {
        if !self.ternary {
            return Err(FqmError::NotTernary);
        }
        Ok(((3 * self.q_scaled(e)) / (2 * self.level)).rem_euclid(3) as u8)
    }

    /// 3·b(e, f) mod 3.
    pub fn b3(&self, e: Element, f: Element) -> Result<u8, FqmError> {
        if !self.ternary {
            return Err(FqmError::NotTernary);
        }
        Ok(((3 * self.b_scaled(e, f)) / self.level).rem_euclid(3) as u8)
    }

    pub fn type_class(&self, e: Element) -> Option<TypeClass> {
        if e == self.zero() {
            return Some(TypeClass::Zero);
        }
        let q = self.q_scaled(e);
        if q == 0 {
            return Some(TypeClass::Isotropic);
        }
        if 3 * q == 2 * self.level {
            Some(TypeClass::Long)
        } else if 3 * q == 4 * self.level {
            Some(TypeClass::Short)
        } else {
            None
        }
    }

    /// Histogram of q-values, keyed by their representative in (−2, 0].
    pub fn q_histogram(&self) -> std::collections::BTreeMap<Rational, usize> {
        let mut h = std::collections::BTreeMap::new();
        for e in self.elements() {
            *h.entry(self.q_nonpositive(e)).or_insert(0) += 1;
        }
        h
    }

    /// Σ_x e^{πi q(x)}, exactly.
    pub fn gauss_sum(&self) -> CycQ {
        let mut counts: std::collections::BTreeMap<i64, i64> = std::collections::BTreeMap::new();
        for e in self.elements() {
            *counts.entry(self.q_scaled(e)).or_insert(0) += 1;
        }
        let mut sum = CycQ::zero();
        for (k, c) in counts {
            sum += &CycQ::root_of_unity(k, 2 * self.level as u32).scale(&int(c));
        }
        sum
    }

    /// The lexicographically least of e and −e.
    pub fn sign_canonical(&self, e: Element) -> Element {
        e.min(self.neg(e))
    }

    /// Concatenated digits when every order is at most 10, otherwise comma separated.
    pub fn label(&self, e: Element) -> String {
        let c = self.coords(e);
        if self.orders.iter().all(|&d| d <= 10) {
            c.iter().map(|d| d.to_string()).collect()
        } else {
            c.iter().map(|d| d.to_string()).collect::<Vec<_>>().join(",")
        }
    }

    pub fn parse_label(&self, s: &str) -> Result<Element, FqmError> {
        let bad = || FqmError::BadLabel(s.to_string());
        let digits: Vec<i64> = if s.contains(',') {
            s.split(',').map(|p| p.trim().parse().map_err(|_| bad())).collect::<Result<_, _>>()?
        } else {
            s.chars().map(|ch| ch.to_digit(10).map(i64::from).ok_or_else(bad)).collect::<Result<_, _>>()?
        };
        if digits.len() != self.rank() || digits.iter().zip(&self.orders).any(|(&c, &d)| c < 0 || c >= d as i64) {
            return Err(bad());
        }
        Ok(self.element(&digits))
    }
}

impl fmt::Debug for QuadraticModule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("QuadraticModule")
            .field("orders", &self.orders)
            .field("level", &self.level)
            .field("gram", &self.gram)
            .finish()
    }
}
