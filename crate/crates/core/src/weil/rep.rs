use std::sync::OnceLock;

use serde::Serialize;

use crate::exact::{rat, CycQ, Matrix, Subspace};
use crate::fqm::{classify, Element, Isometry, QuadraticModule, TypeClass};

use super::characters::{CharacterTable, CLASS_SIZES};
use super::group::{class_of, elements_with_words, ClassName, Gen, SL2F3};
use super::WeilError;

/// The Weil representation of SL(2, F₃) on C[A] for a ternary module A,
/// with basis e_x in the element order of the module.
#[derive(Debug, Clone)]
pub struct WeilRep {
    module: QuadraticModule,
    s: Matrix,
    t: Matrix,
    /// all 24 images, built on first use
    elements: OnceLock<Vec<(SL2F3, Vec<Gen>, Matrix)>>,
}

impl WeilRep {
    pub fn module(&self) -> &QuadraticModule {
        &self.module
    }

    pub fn dim(&self) -> usize {
        self.module.size()
    }

    pub fn t(&self) -> &Matrix {
        &self.t
    }

    pub fn s(&self) -> &Matrix {
        &self.s
    }

    /// ρ(g), computed once from the canonical word of g.
    pub fn rho(&self, g: &SL2F3) -> &Matrix {
        &self.all().iter().find(|(h, _, _)| h == g).expect("every element is enumerated").2
    }

    fn all(&self) -> &[(SL2F3, Vec<Gen>, Matrix)] {
        self.elements.get_or_init(|| {
            // breadth-first words: each image extends the image of its prefix
            let mut out: Vec<(SL2F3, Vec<Gen>, Matrix)> = Vec::with_capacity(24);
            for (g, w) in elements_with_words() {
                let mat = match w.split_last() {
                    None => Matrix::identity(self.dim()),
                    Some((last, prefix)) => {
                        let parent = &out.iter().find(|(_, pw, _)| pw.as_slice() == prefix).expect("prefix precedes").2;
                        parent.mul(match last {
                            Gen::S => &self.s,
                            Gen::T => &self.t,
                        })
                    }
                };
                out.push((g, w, mat));
            }
            out
        })
    }

    /// Product of generator images along an arbitrary word.
    pub fn rho_word(&self, word: &[Gen]) -> Matrix {
        word.iter().fold(Matrix::identity(self.dim()), |acc, &g| acc.mul(self.rho(&SL2F3::generator(g))))
    }

    /// (element, canonical word, ρ(element)) in breadth-first order.
    pub fn elements(&self) -> impl Iterator<Item = (&SL2F3, &[Gen], &Matrix)> {
        self.all().iter().map(|(g, w, m)| (g, w.as_slice(), m))
    }

    pub fn class_trace(&self, c: ClassName) -> CycQ {
        self.rho(&c.representative()).trace()
    }

    /// Permutation matrix of e_x ↦ e_{g(x)}.
    pub fn permutation(&self, g: &Isometry) -> Matrix {
        let n = self.dim();
        let mut p = Matrix::zeros(n, n);
        for x in self.module.elements() {
            p.set(g.apply(x).index(), x.index(), CycQ::one());
        }
        p
    }
}

/// ρ(T)e_x = e^{πi q(x)} e_x and ρ(S)e_x = G⁻¹ Σ_y e^{−2πi b(y, x)} e_y, where
/// G is the Gauss sum; all defining relations are checked.
pub fn build_weil(m: &QuadraticModule) -> Result<WeilRep, WeilError> {
    if !m.is_ternary() {
        return Err(WeilError::NotTernary);
    }
    let n = m.size();
    let level = m.level() as u32;
    let gauss = m.gauss_sum();
    let scalar = gauss.inv()?.simplify();

    let roots_2n: Vec<CycQ> = (0..2 * level as i64).map(|k| CycQ::root_of_unity(k, 2 * level).simplify()).collect();
    let t_diag: Vec<CycQ> = m.elements().map(|x| roots_2n[m.q_scaled(x) as usize].clone()).collect();
    let t = Matrix::diagonal(&t_diag);
    let phases: Vec<CycQ> = (0..level as i64).map(|k| &CycQ::root_of_unity(-k, level) * &scalar).collect();
    let s = Matrix::from_fn(n, n, |i, j| {
        let (y, x) = (Element(i as u32), Element(j as u32));
        phases[m.b_scaled(y, x) as usize].clone()
    });

    let s2 = s.mul(&s);
    let negation = Matrix::from_fn(n, n, |i, j| {
        let x = Element(j as u32);
        if m.neg(x).index() == i {
            CycQ::one()
        } else {
            CycQ::zero()
        }
    });
    if !s2.mul(&s2).is_identity() {
        return Err(WeilError::Relation("S^4 = 1"));
    }
    let st = s.mul(&t);
    if st.mul(&st).mul(&st) != s2 {
        return Err(WeilError::Relation("(ST)^3 = S^2"));
    }
    if !t.pow(3).is_identity() {
        return Err(WeilError::Relation("T^3 = 1"));
    }
    if s2 != negation {
        return Err(WeilError::Relation("S^2 = negation"));
    }

    Ok(WeilRep { module: m.clone(), s, t, elements: OnceLock::new() })
}

/// Traces on the seven classes and the multiplicities of χ₁..χ₇.
#[derive(Debug, Clone, Serialize)]
pub struct Decomposition {
    pub traces: Vec<CycQ>,
    pub multiplicities: Vec<u32>,
}

pub fn character_decompose(rep: &WeilRep) -> Result<Decomposition, WeilError> {
    let table = CharacterTable::standard();
    table.verify()?;
    let traces: Vec<CycQ> = ClassName::ALL.iter().map(|&c| rep.class_trace(c)).collect();
    let mut multiplicities = Vec::with_capacity(7);
    for i in 0..7 {
        let mut s = CycQ::zero();
        for c in ClassName::ALL {
            let term = &traces[c.position()] * &table.value(i, c).conj();
            s += &term.scale(&rat(CLASS_SIZES[c.position()] as i64, 1));
        }
        let s = s.scale(&rat(1, 24));
        let m = s
            .to_rational()
            .filter(|r| r.is_integer() && *r >= rat(0, 1))
            .and_then(|r| u32::try_from(r.to_integer()).ok())
            .ok_or_else(|| WeilError::NonIntegralMultiplicity { index: i + 1, value: s.to_string() })?;
        multiplicities.push(m);
    }
    Ok(Decomposition { traces, multiplicities })
}

/// The aggregated dual action on the type sums (f_00, f_0, f_1, f_2):
/// entry (t, u) is (1/|u|)·Σ_{x∈t, y∈u} conj(ρ(g))_{x,y}.
pub fn aggregate(rep: &WeilRep, g: &Matrix) -> Result<Matrix, WeilError> {
    let cls = classify(rep.module())?;
    Ok(Matrix::from_fn(4, 4, |ti, ui| {
        let (t, u) = (TypeClass::ALL[ti], TypeClass::ALL[ui]);
        let mut s = CycQ::zero();
        for x in cls.elements(t) {
            for y in cls.elements(u) {
                s += g.get(x.index(), y.index());
            }
        }
        s.conj().scale(&rat(1, cls.count(u).max(1) as i64)).simplify()
    }))
}

/// Expected aggregated matrices for the rank-4 ternary module of signature 4.
pub fn expected_dual() -> (Matrix, Matrix) {
    let w = CycQ::root_of_unity(1, 3);
    let t = Matrix::diagonal(&[CycQ::one(), CycQ::one(), w.conj(), w]);
    let s = Matrix::from_ints(&[&[1, 1, 1, 1], &[20, -7, 2, 2], &[30, 3, 3, -6], &[30, 3, -6, 3]])
        .scale(&CycQ::from_rational(rat(-1, 9)));
    (t, s)
}

/// (ρ*(T), ρ*(S)), checked against `expected_dual`.
pub fn aggregated_dual(rep: &WeilRep) -> Result<(Matrix, Matrix), WeilError> {
    let t = aggregate(rep, rep.t())?;
    let s = aggregate(rep, rep.s())?;
    let (et, es) = expected_dual();
    for (name, got, want) in [("T", &t, &et), ("S", &s, &es)] {
        if got != want {
            return Err(WeilError::Mismatch { what: name, expected: want.to_string(), actual: got.to_string() });
        }
    }
    Ok((t, s))
}

/// Projector (1/24)·Σ_g conj(χ(g))·ρ(g) for a linear character χ (0-based row).
pub fn isotypic_projector(rep: &WeilRep, character: usize) -> Result<Matrix, WeilError> {
    let table = CharacterTable::standard();
    let deg = table.degree(character);
    let n = rep.dim();
    let mut p = Matrix::zeros(n, n);
    for (g, _, m) in rep.elements() {
        let c = table.value(character, class_of(g)).conj();
        p = p.add(&m.scale(&c));
    }
    Ok(p.scale(&CycQ::from_rational(rat(deg, 24))).simplify())
}

/// Row of χ₃ in the character table.
pub const CHI3: usize = 2;

/// Image of the χ₃ projector; fails unless it is idempotent of rank 5.
pub fn isotypic_v(rep: &WeilRep) -> Result<Subspace, WeilError> {
    let p = isotypic_projector(rep, CHI3)?;
    if p.mul(&p) != p {
        return Err(WeilError::Relation("projector is idempotent"));
    }
    let v = Subspace::column_space(&p);
    if v.dim() != 5 {
        return Err(WeilError::WrongRank { expected: 5, found: v.dim() });
    }
    Ok(v)
}
