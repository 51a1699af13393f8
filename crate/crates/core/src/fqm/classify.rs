use std::collections::BTreeMap;

use serde::Serialize;

use super::{Element, FqmError, QuadraticModule, TypeClass};

/// Elements of a ternary module partitioned by type class, each list in
/// lexicographic order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Classification {
    classes: BTreeMap<TypeClass, Vec<Element>>,
}

impl Classification {
    pub fn elements(&self, t: TypeClass) -> &[Element] {
        self.classes.get(&t).map_or(&[], Vec::as_slice)
    }

    pub fn count(&self, t: TypeClass) -> usize {
        self.elements(t).len()
    }

    pub fn counts(&self) -> [usize; 4] {
        TypeClass::ALL.map(|t| self.count(t))
    }

    pub fn iter(&self) -> impl Iterator<Item = (TypeClass, &[Element])> {
        TypeClass::ALL.into_iter().map(|t| (t, self.elements(t)))
    }
}

pub fn classify(m: &QuadraticModule) -> Result<Classification, FqmError> {
    let mut classes: BTreeMap<TypeClass, Vec<Element>> = BTreeMap::new();
    for e in m.elements() {
        let t = m.type_class(e).ok_or_else(|| FqmError::Unclassified { element: m.label(e), q: m.q(e).to_string() })?;
        classes.entry(t).or_default().push(e);
    }
    Ok(Classification { classes })
}

/// counts[u][v][j] = #{y of type v : b(x, y) = 2j/3 mod 1} for any x of type u.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct PairingTable {
    pub counts: [[[usize; 3]; 4]; 4],
}

impl PairingTable {
    pub fn get(&self, u: TypeClass, v: TypeClass) -> [usize; 3] {
        self.counts[u.position()][v.position()]
    }
}

/// Pairing-class index: b = 0 ↦ 0, b = 2/3 ↦ 1, b = 1/3 ↦ 2.
fn pairing_class(m: &QuadraticModule, x: Element, y: Element) -> Result<usize, FqmError> {
    Ok((2 * m.b3(x, y)? as usize) % 3)
}

pub fn pairing_table(m: &QuadraticModule) -> Result<PairingTable, FqmError> {
    if !m.is_ternary() {
        return Err(FqmError::NotTernary);
    }
    let cls = classify(m)?;
    let mut counts = [[[0usize; 3]; 4]; 4];
    for (u, xs) in cls.iter() {
        for (v, ys) in cls.iter() {
            let mut first: Option<[usize; 3]> = None;
            for &x in xs {
                let mut row = [0usize; 3];
                for &y in ys {
                    row[pairing_class(m, x, y)?] += 1;
                }
                match first {
                    None => first = Some(row),
                    Some(r) if r != row => {
                        return Err(FqmError::RepresentativeDependent { u: u.label().into(), v: v.label().into() })
                    }
                    Some(_) => {}
                }
            }
            counts[u.position()][v.position()] = first.unwrap_or_default();
        }
    }
    Ok(PairingTable { counts })
}
