use std::collections::HashMap;

use num_traits::Signed;

use super::{smith_normal_form, IntMatrix, LatticeError, LatticeMap, LatticeSpec, LatticeVec};
use crate::exact::{int, rat, CycQ, Rational};
use crate::fqm::{Element, Isometry, QuadraticModule};
use crate::numeric::approx;

/// L*/L for an even lattice L, with rational representatives of the chosen
/// generators in lattice coordinates.
#[derive(Debug, Clone)]
pub struct DiscriminantForm {
    gram: IntMatrix,
    module: QuadraticModule,
    generators: Vec<Vec<Rational>>,
    lookup: HashMap<Vec<Rational>, Element>,
}

fn fract(x: &Rational) -> Rational {
    x - x.floor()
}

fn gram_apply(gram: &IntMatrix, x: &[Rational]) -> Vec<Rational> {
    gram.iter()
        .map(|row| row.iter().zip(x).fold(int(0), |acc, (&g, xi)| acc + xi * int(g)))
        .collect()
}

fn pair(gram: &IntMatrix, x: &[Rational], y: &[Rational]) -> Rational {
    gram_apply(gram, x).iter().zip(y).fold(int(0), |acc, (a, b)| acc + a * b)
}

pub fn discriminant_form_with_generators(
    gram: &IntMatrix,
    orders: &[u32],
    generators: &[Vec<Rational>],
) -> Result<DiscriminantForm, LatticeError> {
    let n = gram.len();
    if orders.len() != generators.len() || generators.iter().any(|g| g.len() != n) {
        return Err(LatticeError::Generators("shape mismatch".into()));
    }
    for (g, &d) in generators.iter().zip(orders) {
        if gram_apply(gram, g).iter().any(|y| !y.is_integer()) {
            return Err(LatticeError::Generators("generator is not in the dual lattice".into()));
        }
        if g.iter().any(|x| !(x * int(d as i64)).is_integer()) {
            return Err(LatticeError::Generators(format!("generator is not {d}-torsion modulo L")));
        }
    }
    let pairing: Vec<Vec<Rational>> =
        generators.iter().map(|g| generators.iter().map(|h| pair(gram, g, h)).collect()).collect();
    let module = QuadraticModule::new(orders, &pairing)?;
    let kept: Vec<Vec<Rational>> =
        generators.iter().zip(orders).filter(|(_, &d)| d > 1).map(|(g, _)| g.clone()).collect();

    let mut form = DiscriminantForm { gram: gram.clone(), module, generators: kept, lookup: HashMap::new() };
    let det = super::determinant(gram).unsigned_abs() as usize;
    if form.module.size() != det {
        return Err(LatticeError::Generators(format!("generators span {} classes, expected {det}", form.module.size())));
    }
    for e in form.module.elements() {
        let key: Vec<Rational> = form.representative(e).iter().map(fract).collect();
        if form.lookup.insert(key, e).is_some() {
            return Err(LatticeError::Generators("generators are dependent modulo L".into()));
        }
    }
    Ok(form)
}

/// Discriminant form with Smith normal form generators V·e_i/d_i.
pub fn discriminant_form(gram: &IntMatrix) -> Result<DiscriminantForm, LatticeError> {
    let n = gram.len();
    let s = smith_normal_form(gram);
    if s.d.contains(&0) {
        return Err(LatticeError::Degenerate);
    }
    let mut orders = Vec::new();
    let mut gens = Vec::new();
    for (i, &d) in s.d.iter().enumerate() {
        if d > 1 {
            orders.push(d as u32);
            gens.push((0..n).map(|k| rat(s.v[k][i], d)).collect());
        }
    }
    discriminant_form_with_generators(gram, &orders, &gens)
}

impl DiscriminantForm {
    pub fn module(&self) -> &QuadraticModule {
        &self.module
    }

    pub fn into_module(self) -> QuadraticModule {
        self.module
    }

    pub fn generators(&self) -> &[Vec<Rational>] {
        &self.generators
    }

    /// Σ c_i g_i for the coordinates c of `e`.
    pub fn representative(&self, e: Element) -> Vec<Rational> {
        let n = self.gram.len();
        let mut x = vec![int(0); n];
        for (c, g) in self.module.coords(e).into_iter().zip(&self.generators) {
            for (xi, gi) in x.iter_mut().zip(g) {
                *xi += gi * int(c);
            }
        }
        x
    }

    /// The class of a dual lattice vector.
    pub fn reduce(&self, x: &[Rational]) -> Result<Element, LatticeError> {
        let key: Vec<Rational> = x.iter().map(fract).collect();
        self.lookup.get(&key).copied().ok_or_else(|| LatticeError::Generators("vector is not in the dual lattice".into()))
    }

    /// Class of (2r + ι(r))/3, the preimage of r under 1 − ι.
    pub fn root_class(&self, spec: &LatticeSpec, r: &LatticeVec) -> Result<Element, LatticeError> {
        let ir = spec.apply_iota(r)?;
        let x: Vec<Rational> = r.0.iter().zip(&ir.0).map(|(&a, &b)| rat(2 * a + b, 3)).collect();
        self.reduce(&x)
    }

    /// Permutation of L*/L induced by a lattice isometry.
    pub fn induced(&self, map: &LatticeMap) -> Result<Isometry, LatticeError> {
        let m = &self.module;
        // the induced map is additive, so generator images determine it
        let gen_images = (0..m.rank())
            .map(|i| {
                let x = self.representative(m.generator(i));
                let y: Vec<Rational> = map
                    .0
                    .iter()
                    .map(|row| row.iter().zip(&x).fold(int(0), |acc, (&a, xi)| acc + xi * int(a)))
                    .collect();
                self.reduce(&y)
            })
            .collect::<Result<Vec<_>, _>>()?;
        let images = m
            .elements()
            .map(|e| {
                m.coords(e).iter().zip(&gen_images).fold(m.zero(), |acc, (&c, &g)| m.add(acc, m.mul(c, g)))
            })
            .collect();
        Ok(Isometry::from_images(m, images)?)
    }
}

/// sig mod 8 with Σ_x e^{πi q(x)} = √|M| · e^{2πi sig/8}.
pub fn milgram_signature(m: &QuadraticModule) -> Result<u8, LatticeError> {
    let gauss = m.gauss_sum();
    let size = int(m.size() as i64);
    let mut found = None;
    for s in 0..8u8 {
        let c = &gauss * &CycQ::root_of_unity(-(s as i64), 8);
        if c != c.conj() || (&c * &c) != CycQ::from_rational(size.clone()) {
            continue;
        }
        // exactly two candidates ±√|M| remain; the sign of the real value
        // picks one
        let positive = match c.to_rational() {
            Some(r) => r.is_positive(),
            None => approx(&c).re > 0.0,
        };
        if positive {
            found = Some(s);
        }
    }
    found.ok_or(LatticeError::GaussSum)
}
