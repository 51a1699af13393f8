use serde::Serialize;

use crate::exact::{int, CycQ, Matrix, Rational, Subspace};
use crate::fqm::{reflect, Element, OrthoBasis, OrthogonalGroup, QuadraticModule};

use super::rep::WeilRep;
use super::WeilError;

/// A vector in C[A] with coefficients in {−1, 0, 1}, built from an
/// orthogonal basis by the F₃ product of pairings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpecialVector {
    pub basis: OrthoBasis,
    coeffs: Vec<i8>,
}

impl SpecialVector {
    pub fn coeff(&self, e: Element) -> i8 {
        self.coeffs[e.index()]
    }

    pub fn coeffs(&self) -> &[i8] {
        &self.coeffs
    }

    pub fn support(&self) -> Vec<Element> {
        (0..self.coeffs.len()).filter(|&i| self.coeffs[i] != 0).map(|i| Element(i as u32)).collect()
    }

    pub fn to_vector(&self) -> Vec<CycQ> {
        self.coeffs.iter().map(|&c| CycQ::from_int(c as i64)).collect()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }

    pub fn negated(&self) -> SpecialVector {
        SpecialVector { basis: self.basis.clone(), coeffs: self.coeffs.iter().map(|c| -c).collect() }
    }
}

/// c_x = Π_i B₃(x, β_i) over the basis members β_i, read in F₃ as {0, 1, −1}.
pub fn special_vector(m: &QuadraticModule, basis: &OrthoBasis) -> Result<SpecialVector, WeilError> {
    let mut coeffs = Vec::with_capacity(m.size());
    for x in m.elements() {
        let mut p = 1u8;
        for b in basis.members() {
            p = (p * m.b3(x, b)?) % 3;
        }
        coeffs.push(match p {
            0 => 0,
            1 => 1,
            _ => -1,
        });
    }
    Ok(SpecialVector { basis: basis.clone(), coeffs })
}

/// Vector with explicit coefficients, for inputs that do not come from a basis.
pub fn special_vector_from_coeffs(basis: OrthoBasis, coeffs: Vec<i8>) -> SpecialVector {
    SpecialVector { basis, coeffs }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: String,
    pub holds: bool,
}

/// Checks ρ(S)v = v, ρ(T)v = ωv and that the reflection in every basis
/// member negates v.
pub fn verify_special(v: &SpecialVector, rep: &WeilRep) -> Result<Vec<IdentityCheck>, WeilError> {
    let m = rep.module();
    let x = v.to_vector();
    let w = CycQ::root_of_unity(1, 3);
    let mut out = vec![
        IdentityCheck { name: "rho(S) v = v".into(), holds: rep.s().mul_vec(&x) == x },
        IdentityCheck {
            name: "rho(T) v = omega v".into(),
            holds: rep.t().mul_vec(&x) == x.iter().map(|c| c * &w).collect::<Vec<_>>(),
        },
    ];
    for b in v.basis.members() {
        let r = reflect(m, b)?;
        let holds = m.elements().all(|e| v.coeff(r.apply(e)) == -v.coeff(e));
        out.push(IdentityCheck { name: format!("reflection in {} negates v", m.label(b)), holds });
    }
    Ok(out)
}

/// (1/|O|)·Σ_g |tr(g on V)|² for the permutation action e_x ↦ e_{g(x)}.
/// Equals 1 exactly when V is irreducible.
pub fn o_q_character_norm(group: &OrthogonalGroup, v: &Subspace) -> Result<Rational, WeilError> {
    for g in group.generators() {
        for b in v.basis() {
            if !v.contains(&permute(g, b)) {
                return Err(WeilError::NotInvariant);
            }
        }
    }
    let mut total = int(0);
    for g in group.elements() {
        let inv = g.inverse();
        // (P_g b)_p = b_{g⁻¹(p)}; read the echelon coordinate at each pivot
        let mut tr = CycQ::zero();
        for (b, &p) in v.basis().iter().zip(v.pivots()) {
            tr += &b[inv.apply(Element(p as u32)).index()];
        }
        total += tr.abs_squared();
    }
    Ok(total / int(group.order() as i64))
}

fn permute(g: &crate::fqm::Isometry, x: &[CycQ]) -> Vec<CycQ> {
    let mut out = vec![CycQ::zero(); x.len()];
    for (i, c) in x.iter().enumerate() {
        out[g.apply(Element(i as u32)).index()] = c.clone();
    }
    out
}

/// Commutators of ρ(S), ρ(T) with the permutation action of `g` vanish.
pub fn commutes_with(rep: &WeilRep, g: &crate::fqm::Isometry) -> bool {
    let p: Matrix = rep.permutation(g);
    rep.s().mul(&p) == p.mul(rep.s()) && rep.t().mul(&p) == p.mul(rep.t())
}
