use crate::exact::{int, CycQ, Rational};

use super::group::{class_of, class_sizes, elements_with_words, ClassName};
use super::WeilError;

/// Class sizes in `ClassName::ALL` order.
pub const CLASS_SIZES: [usize; 7] = [1, 1, 6, 4, 4, 4, 4];

/// Entry codes: integers n, or n·ω^k written as (n, k).
type Entry = (i64, u8);

const TABLE: [[Entry; 7]; 7] = [
    [(1, 0), (1, 0), (1, 0), (1, 0), (1, 0), (1, 0), (1, 0)],
    [(3, 0), (3, 0), (-1, 0), (0, 0), (0, 0), (0, 0), (0, 0)],
    [(1, 0), (1, 0), (1, 0), (1, 2), (1, 2), (1, 1), (1, 1)],
    [(1, 0), (1, 0), (1, 0), (1, 1), (1, 1), (1, 2), (1, 2)],
    [(2, 0), (-2, 0), (0, 0), (-1, 1), (1, 1), (1, 2), (-1, 2)],
    [(2, 0), (-2, 0), (0, 0), (-1, 0), (1, 0), (1, 0), (-1, 0)],
    [(2, 0), (-2, 0), (0, 0), (-1, 2), (1, 2), (1, 1), (-1, 1)],
];

/// The irreducible characters χ₁..χ₇ of SL(2, F₃), rows over `ClassName::ALL`.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    rows: Vec<Vec<CycQ>>,
}

impl CharacterTable {
    pub fn standard() -> Self {
        let rows = TABLE
            .iter()
            .map(|row| row.iter().map(|&(n, k)| CycQ::root_of_unity(k as i64, 3).scale(&int(n))).collect())
            .collect();
        CharacterTable { rows }
    }

    pub fn rows(&self) -> &[Vec<CycQ>] {
        &self.rows
    }

    /// χ_i at a class, 0-based i.
    pub fn value(&self, i: usize, c: ClassName) -> &CycQ {
        &self.rows[i][c.position()]
    }

    pub fn degree(&self, i: usize) -> i64 {
        self.rows[i][0].to_rational().map_or(0, |r| r.to_integer().try_into().unwrap_or(0))
    }

    /// Consistency gate: class sizes match the group, both orthogonality
    /// relations hold, and the linear characters are homomorphisms.
    pub fn verify(&self) -> Result<(), WeilError> {
        let sizes = class_sizes();
        if sizes != CLASS_SIZES {
            return Err(WeilError::CharacterTable(format!("class sizes {sizes:?}")));
        }
        let n = ClassName::ALL.len();
        for i in 0..n {
            for j in 0..n {
                let mut s = CycQ::zero();
                for c in ClassName::ALL {
                    let term = self.value(i, c) * &self.value(j, c).conj();
                    s += &term.scale(&int(sizes[c.position()] as i64));
                }
                let expected = if i == j { 24 } else { 0 };
                if s != CycQ::from_int(expected) {
                    return Err(WeilError::CharacterTable(format!("row orthogonality fails for χ{} and χ{}", i + 1, j + 1)));
                }
            }
        }
        for a in ClassName::ALL {
            for b in ClassName::ALL {
                let mut s = CycQ::zero();
                for i in 0..n {
                    s += &(self.value(i, a) * &self.value(i, b).conj());
                }
                let expected = if a == b { Rational::new(24.into(), (sizes[a.position()] as i64).into()) } else { int(0) };
                if s != CycQ::from_rational(expected) {
                    return Err(WeilError::CharacterTable(format!(
                        "column orthogonality fails for {} and {}",
                        a.label(),
                        b.label()
                    )));
                }
            }
        }
        let group = elements_with_words();
        let classes: Vec<ClassName> = group.iter().map(|(g, _)| class_of(g)).collect();
        for i in (0..n).filter(|&i| self.degree(i) == 1) {
            for (x, cx) in group.iter().zip(&classes) {
                for (y, cy) in group.iter().zip(&classes) {
                    let lhs = self.value(i, class_of(&x.0.mul(&y.0)));
                    let rhs = self.value(i, *cx) * self.value(i, *cy);
                    if *lhs != rhs {
                        return Err(WeilError::CharacterTable(format!("χ{} is not multiplicative", i + 1)));
                    }
                }
            }
        }
        Ok(())
    }
}
