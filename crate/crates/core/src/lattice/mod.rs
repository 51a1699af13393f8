//! Even integral lattices with an order-3 isometry, the hermitian form it
//! induces, root reflections, and discriminant forms.

mod discriminant;
mod smith;

pub use discriminant::{discriminant_form, discriminant_form_with_generators, milgram_signature, DiscriminantForm};
pub use smith::{smith_normal_form, SmithForm};

use std::fmt;
use std::str::FromStr;

use serde::Serialize;
use thiserror::Error;

use crate::exact::{rat, CycQ, Rational};
use crate::fqm::FqmError;

pub type IntMatrix = Vec<Vec<i64>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("gram matrix is not square and symmetric")]
    NotSymmetric,
    #[error("gram matrix is not even: diagonal entry {index} is odd")]
    NotEven { index: usize },
    #[error("gram matrix is degenerate")]
    Degenerate,
    #[error("isometry matrix has the wrong shape")]
    IsometryShape,
    #[error("isometry does not preserve the gram matrix")]
    NotIsometry,
    #[error("isometry does not have order 3")]
    IsometryOrder,
    #[error("isometry fixes a nonzero vector")]
    FixedVector,
    #[error("lattice has no order-3 isometry")]
    NoIsometry,
    #[error("root has norm {found}, expected {expected}")]
    WrongNorm { expected: i64, found: i64 },
    #[error("reflection coefficient is not integral on basis vector {index}")]
    NonIntegral { index: usize },
    #[error("vector has length {found}, expected {expected}")]
    Dimension { expected: usize, found: usize },
    #[error("invalid discriminant generators: {0}")]
    Generators(String),
    #[error("unknown preset {0:?}")]
    UnknownPreset(String),
    #[error("Gauss sum is not a unit multiple of sqrt(|M|)")]
    GaussSum,
    #[error(transparent)]
    Fqm(#[from] FqmError),
}

/// An integer vector in lattice coordinates.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct LatticeVec(pub Vec<i64>);

impl LatticeVec {
    pub fn zero(n: usize) -> Self {
        LatticeVec(vec![0; n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = vec![0; n];
        v[i] = 1;
        LatticeVec(v)
    }

    pub fn add(&self, other: &LatticeVec) -> LatticeVec {
        LatticeVec(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, k: i64) -> LatticeVec {
        LatticeVec(self.0.iter().map(|a| k * a).collect())
    }
}

/// Named lattice presets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Preset {
    /// A₂ ⊕ A₂(−1)³ with the Coxeter rotation on each block
    #[serde(rename = "paper")]
    Standard,
    /// U ⊕ U(3) ⊕ A₂(−1)², no isometry
    AltDecomposition,
}

impl Preset {
    pub const ALL: [Preset; 2] = [Preset::Standard, Preset::AltDecomposition];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Standard => "paper",
            Preset::AltDecomposition => "alt-decomposition",
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = LatticeError;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| LatticeError::UnknownPreset(s.to_string()))
    }
}

const A2: [[i64; 2]; 2] = [[2, -1], [-1, 2]];
const COXETER: [[i64; 2]; 2] = [[0, -1], [1, -1]];

fn block_diagonal(blocks: &[[[i64; 2]; 2]]) -> IntMatrix {
    let n = 2 * blocks.len();
    let mut m = vec![vec![0; n]; n];
    for (k, b) in blocks.iter().enumerate() {
        for i in 0..2 {
            for j in 0..2 {
                m[2 * k + i][2 * k + j] = b[i][j];
            }
        }
    }
    m
}

fn negate(b: [[i64; 2]; 2]) -> [[i64; 2]; 2] {
    b.map(|r| r.map(|x| -x))
}

/// An even lattice given by its Gram matrix, optionally with a
/// fixed-point-free isometry of order 3, and optionally with preferred
/// generators of its discriminant group.
#[derive(Debug, Clone, Serialize)]
pub struct LatticeSpec {
    pub name: String,
    pub gram: IntMatrix,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub iota: Option<IntMatrix>,
    #[serde(skip)]
    discriminant_generators: Option<(Vec<u32>, Vec<Vec<Rational>>)>,
}

impl LatticeSpec {
    pub fn new(name: &str, gram: IntMatrix, iota: Option<IntMatrix>) -> Result<Self, LatticeError> {
        let n = gram.len();
        if gram.iter().any(|r| r.len() != n) || (0..n).any(|i| (0..n).any(|j| gram[i][j] != gram[j][i])) {
            return Err(LatticeError::NotSymmetric);
        }
        if let Some(index) = (0..n).find(|&i| gram[i][i] % 2 != 0) {
            return Err(LatticeError::NotEven { index });
        }
        if determinant(&gram) == 0 {
            return Err(LatticeError::Degenerate);
        }
        if let Some(t) = &iota {
            if t.len() != n || t.iter().any(|r| r.len() != n) {
                return Err(LatticeError::IsometryShape);
            }
            if mat_mul(&mat_mul(&transpose(t), &gram), t) != gram {
                return Err(LatticeError::NotIsometry);
            }
            if mat_mul(&mat_mul(t, t), t) != identity(n) {
                return Err(LatticeError::IsometryOrder);
            }
            let shifted: IntMatrix = (0..n).map(|i| (0..n).map(|j| t[i][j] - i64::from(i == j)).collect()).collect();
            if determinant(&shifted) == 0 {
                return Err(LatticeError::FixedVector);
            }
        }
        Ok(LatticeSpec { name: name.to_string(), gram, iota, discriminant_generators: None })
    }

    pub fn preset(p: Preset) -> Self {
        match p {
            Preset::Standard => {
                let neg = negate(A2);
                let gram = block_diagonal(&[A2, neg, neg, neg]);
                let iota = block_diagonal(&[COXETER; 4]);
                let mut spec = LatticeSpec::new(p.name(), gram, Some(iota)).expect("standard preset is valid");
                // dual basis vector of the first basis vector in each block
                let mut gens = Vec::new();
                for k in 0..4 {
                    let sign = if k == 0 { 1 } else { -1 };
                    let mut g = vec![rat(0, 1); 8];
                    g[2 * k] = rat(2 * sign, 3);
                    g[2 * k + 1] = rat(sign, 3);
                    gens.push(g);
                }
                spec.discriminant_generators = Some((vec![3; 4], gens));
                spec
            }
            Preset::AltDecomposition => {
                let u = [[0, 1], [1, 0]];
                let u3 = [[0, 3], [3, 0]];
                let neg = negate(A2);
                LatticeSpec::new(p.name(), block_diagonal(&[u, u3, neg, neg]), None).expect("alt preset is valid")
            }
        }
    }

    pub fn rank(&self) -> usize {
        self.gram.len()
    }

    pub fn determinant(&self) -> i64 {
        determinant(&self.gram)
    }

    /// Number of positive and negative eigenvalues of the gram matrix.
    pub fn signature(&self) -> (usize, usize) {
        let n = self.rank();
        // Sylvester: count sign changes of leading minors after a congruence
        // to diagonal form over the rationals
        let mut m: Vec<Vec<Rational>> = self.gram.iter().map(|r| r.iter().map(|&x| rat(x, 1)).collect()).collect();
        let (mut pos, mut neg) = (0, 0);
        for k in 0..n {
            if num_traits::Zero::is_zero(&m[k][k]) {
                if let Some(j) = (k + 1..n).find(|&j| !num_traits::Zero::is_zero(&m[k][j])) {
                    // replace e_k by e_k + e_j, or e_k + 2 e_j if that is isotropic
                    let t = if num_traits::Zero::is_zero(&(&m[j][j] + &m[k][j] * rat(2, 1))) { 2 } else { 1 };
                    for i in 0..n {
                        let v = &m[i][k] + &m[i][j] * rat(t, 1);
                        m[i][k] = v;
                    }
                    for i in 0..n {
                        let v = &m[k][i] + &m[j][i] * rat(t, 1);
                        m[k][i] = v;
                    }
                }
            }
            let p = m[k][k].clone();
            if num_traits::Zero::is_zero(&p) {
                continue;
            }
            if num_traits::Signed::is_positive(&p) {
                pos += 1;
            } else {
                neg += 1;
            }
            for i in k + 1..n {
                let f = &m[i][k] / &p;
                for j in k..n {
                    let v = &m[i][j] - &f * &m[k][j];
                    m[i][j] = v;
                }
            }
            for j in k + 1..n {
                let f = &m[k][j] / &p;
                for i in k..n {
                    let v = &m[i][j] - &f * &m[i][k];
                    m[i][j] = v;
                }
            }
        }
        (pos, neg)
    }

    fn check_len(&self, v: &LatticeVec) -> Result<(), LatticeError> {
        if v.0.len() != self.rank() {
            return Err(LatticeError::Dimension { expected: self.rank(), found: v.0.len() });
        }
        Ok(())
    }

    pub fn inner(&self, x: &LatticeVec, y: &LatticeVec) -> i64 {
        let mut s = 0;
        for (i, xi) in x.0.iter().enumerate() {
            if *xi == 0 {
                continue;
            }
            for (j, yj) in y.0.iter().enumerate() {
                s += xi * self.gram[i][j] * yj;
            }
        }
        s
    }

    pub fn iota(&self) -> Result<&IntMatrix, LatticeError> {
        self.iota.as_ref().ok_or(LatticeError::NoIsometry)
    }

    pub fn apply_iota(&self, x: &LatticeVec) -> Result<LatticeVec, LatticeError> {
        Ok(apply(self.iota()?, x))
    }

    /// h(x, y) = ½{(√−3/3)⟨2ι(x) + x, y⟩ + ⟨x, y⟩} with √−3 = 2ω + 1.
    pub fn hermitian_value(&self, x: &LatticeVec, y: &LatticeVec) -> Result<CycQ, LatticeError> {
        self.check_len(x)?;
        self.check_len(y)?;
        let ix = self.apply_iota(x)?;
        let skew = self.inner(&ix.scale(2).add(x), y);
        let sqrt_m3 = &CycQ::root_of_unity(1, 3).scale(&rat(2, 1)) + &CycQ::one();
        let value = &sqrt_m3.scale(&rat(skew, 3)) + &CycQ::from_int(self.inner(x, y));
        Ok(value.scale(&rat(1, 2)))
    }

    /// s_r ∘ s_{ι(r)} for a (−2)-vector r, with s_v(x) = x + ⟨x, v⟩v.
    pub fn trireflection(&self, r: &LatticeVec) -> Result<LatticeMap, LatticeError> {
        self.check_len(r)?;
        let norm = self.inner(r, r);
        if norm != -2 {
            return Err(LatticeError::WrongNorm { expected: -2, found: norm });
        }
        let ir = self.apply_iota(r)?;
        let s_r = self.root_reflection(r);
        let s_ir = self.root_reflection(&ir);
        Ok(s_r.compose(&s_ir))
    }

    /// x ↦ x + ⟨x, v⟩v; an isometry when ⟨v, v⟩ = −2.
    fn root_reflection(&self, v: &LatticeVec) -> LatticeMap {
        let n = self.rank();
        LatticeMap::from_images(
            (0..n)
                .map(|i| {
                    let e = LatticeVec::unit(n, i);
                    e.add(&v.scale(self.inner(&e, v)))
                })
                .collect(),
        )
    }

    /// x ↦ x + c⟨(r + 2ι(r))/3, x⟩ι(r) + c⟨(2r + ι(r))/3, x⟩r with c = 2 for
    /// short roots and c = 1 for long roots.
    pub fn reflection_minus_one(&self, r: &LatticeVec, kind: RootKind) -> Result<LatticeMap, LatticeError> {
        self.check_len(r)?;
        let norm = self.inner(r, r);
        if norm != kind.norm() {
            return Err(LatticeError::WrongNorm { expected: kind.norm(), found: norm });
        }
        let ir = self.apply_iota(r)?;
        let a = r.add(&ir.scale(2));
        let b = r.scale(2).add(&ir);
        let c = kind.coefficient();
        let n = self.rank();
        let mut images = Vec::with_capacity(n);
        for i in 0..n {
            let e = LatticeVec::unit(n, i);
            let (pa, pb) = (self.inner(&a, &e), self.inner(&b, &e));
            if pa % 3 != 0 || pb % 3 != 0 {
                return Err(LatticeError::NonIntegral { index: i });
            }
            images.push(e.add(&ir.scale(c * pa / 3)).add(&r.scale(c * pb / 3)));
        }
        Ok(LatticeMap::from_images(images))
    }

    /// The discriminant form, using preset generators when present and
    /// Smith normal form generators otherwise.
    pub fn discriminant(&self) -> Result<DiscriminantForm, LatticeError> {
        match &self.discriminant_generators {
            Some((orders, gens)) => discriminant_form_with_generators(&self.gram, orders, gens),
            None => discriminant_form(&self.gram),
        }
    }

    /// Vectors of the given norm with every coordinate in [−bound, bound],
    /// in lexicographic order.
    pub fn vectors_with_norm(&self, norm: i64, bound: i64) -> Vec<LatticeVec> {
        let n = self.rank();
        let mut out = Vec::new();
        let mut c = vec![-bound; n];
        loop {
            let v = LatticeVec(c.clone());
            if self.inner(&v, &v) == norm {
                out.push(v);
            }
            let Some(i) = (0..n).rev().find(|&i| c[i] < bound) else {
                return out;
            };
            c[i] += 1;
            c[i + 1..].iter_mut().for_each(|x| *x = -bound);
        }
    }

    /// JSON export of the gram and isometry matrices.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("lattice spec serializes")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum RootKind {
    Short,
    Long,
}

impl RootKind {
    pub fn norm(self) -> i64 {
        match self {
            RootKind::Short => -2,
            RootKind::Long => -4,
        }
    }

    fn coefficient(self) -> i64 {
        match self {
            RootKind::Short => 2,
            RootKind::Long => 1,
        }
    }
}

/// A Z-linear endomorphism of the lattice, stored as the matrix whose
/// columns are the images of the basis vectors.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct LatticeMap(pub IntMatrix);

impl LatticeMap {
    fn from_images(images: Vec<LatticeVec>) -> Self {
        let n = images.len();
        LatticeMap((0..n).map(|i| (0..n).map(|j| images[j].0[i]).collect()).collect())
    }

    pub fn apply(&self, x: &LatticeVec) -> LatticeVec {
        apply(&self.0, x)
    }

    /// self ∘ other.
    pub fn compose(&self, other: &LatticeMap) -> LatticeMap {
        LatticeMap(mat_mul(&self.0, &other.0))
    }

    pub fn is_identity(&self) -> bool {
        self.0 == identity(self.0.len())
    }

    pub fn preserves(&self, gram: &IntMatrix) -> bool {
        mat_mul(&mat_mul(&transpose(&self.0), gram), &self.0) == *gram
    }

    /// Least k ≤ bound with self^k = 1.
    pub fn order(&self, bound: usize) -> Option<usize> {
        let mut p = self.clone();
        for k in 1..=bound {
            if p.is_identity() {
                return Some(k);
            }
            p = self.compose(&p);
        }
        None
    }
}

fn apply(m: &IntMatrix, x: &LatticeVec) -> LatticeVec {
    LatticeVec(m.iter().map(|row| row.iter().zip(&x.0).map(|(a, b)| a * b).sum()).collect())
}

pub(crate) fn identity(n: usize) -> IntMatrix {
    (0..n).map(|i| (0..n).map(|j| i64::from(i == j)).collect()).collect()
}

pub(crate) fn transpose(a: &IntMatrix) -> IntMatrix {
    let (r, c) = (a.len(), a.first().map_or(0, Vec::len));
    (0..c).map(|j| (0..r).map(|i| a[i][j]).collect()).collect()
}

pub(crate) fn mat_mul(a: &IntMatrix, b: &IntMatrix) -> IntMatrix {
    let c = b.first().map_or(0, Vec::len);
    a.iter()
        .map(|row| (0..c).map(|j| row.iter().zip(b).map(|(x, brow)| x * brow[j]).sum()).collect())
        .collect()
}

/// Bareiss fraction-free determinant.
pub(crate) fn determinant(a: &IntMatrix) -> i64 {
    let n = a.len();
    if n == 0 {
        return 1;
    }
    let mut m: Vec<Vec<i128>> = a.iter().map(|r| r.iter().map(|&x| x as i128).collect()).collect();
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n - 1 {
        if m[k][k] == 0 {
            match (k + 1..n).find(|&i| m[i][k] != 0) {
                Some(i) => {
                    m.swap(k, i);
                    sign = -sign;
                }
                None => return 0,
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
            }
        }
        prev = m[k][k];
    }
    (sign * m[n - 1][n - 1]) as i64
}
