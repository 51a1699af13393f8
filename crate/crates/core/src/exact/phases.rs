use std::collections::BTreeMap;

use num_traits::{Signed, Zero};

use super::{int, CycQ, ExactError, Matrix, Rational};

/// Eigenvalue multiplicities keyed by phase t in [0, 1), for eigenvalue e^{2πit}.
pub type PhaseMultiplicities = BTreeMap<Rational, usize>;

/// Smallest m in 1..=bound with A^m = I.
pub fn matrix_order(a: &Matrix, bound: u32) -> Result<u32, ExactError> {
    let mut p = a.clone();
    for m in 1..=bound {
        if p.is_identity() {
            return Ok(m);
        }
        p = p.mul(a);
    }
    Err(ExactError::InfiniteOrder { bound })
}

/// Multiplicity of each eigenvalue ζ_order^j of a matrix with A^order = I,
/// by the discrete Fourier transform of the power traces.
pub fn phase_multiplicities(a: &Matrix, order: u32) -> Result<PhaseMultiplicities, ExactError> {
    if !a.is_square() {
        return Err(ExactError::Shape(format!("{}x{} matrix has no eigenvalues", a.rows(), a.cols())));
    }
    assert!(order >= 1, "order must be positive");
    let mut traces = Vec::with_capacity(order as usize);
    let mut p = Matrix::identity(a.rows());
    for _ in 0..order {
        traces.push(p.trace());
        p = p.mul(a);
    }
    if !p.is_identity() {
        return Err(ExactError::NotOfOrder { power: order });
    }
    let mut out = PhaseMultiplicities::new();
    for j in 0..order {
        let mut acc = CycQ::zero();
        for (m, t) in traces.iter().enumerate() {
            let e = -((j as i64 * m as i64) % order as i64);
            acc += &(t * &CycQ::root_of_unity(e, order));
        }
        let value = acc.scale(&Rational::new(1.into(), order.into()));
        let count = value
            .to_rational()
            .filter(|r| r.is_integer() && !r.is_negative())
            .ok_or_else(|| ExactError::NonIntegralMultiplicity { j, value: value.to_string() })?;
        if !count.is_zero() {
            let n: usize = count.to_integer().try_into().expect("multiplicity fits in usize");
            out.insert(Rational::new(j.into(), order.into()), n);
        }
    }
    Ok(out)
}

/// Σ multiplicity · phase.
pub fn alpha_invariant(mults: &PhaseMultiplicities) -> Rational {
    mults.iter().fold(int(0), |acc, (t, &m)| acc + t * int(m as i64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;

    #[test]
    fn identity_has_phase_zero() {
        let m = phase_multiplicities(&Matrix::identity(4), 1).unwrap();
        assert_eq!(m, PhaseMultiplicities::from([(int(0), 4)]));
    }

    #[test]
    fn diagonal_cube_roots() {
        let w = CycQ::root_of_unity(1, 3);
        let t = Matrix::diagonal(&[CycQ::one(), CycQ::one(), w.conj(), w]);
        let m = phase_multiplicities(&t, 3).unwrap();
        assert_eq!(m, PhaseMultiplicities::from([(int(0), 2), (rat(1, 3), 1), (rat(2, 3), 1)]));
        assert_eq!(alpha_invariant(&m), int(1));
        assert_eq!(matrix_order(&t, 12), Ok(3));
    }

    #[test]
    fn minus_identity() {
        let m = phase_multiplicities(&Matrix::identity(4).scale(&CycQ::from_int(-1)), 2).unwrap();
        assert_eq!(m, PhaseMultiplicities::from([(rat(1, 2), 4)]));
    }

    #[test]
    fn wrong_order_is_reported() {
        let w = CycQ::root_of_unity(1, 3);
        let t = Matrix::diagonal(&[w]);
        assert_eq!(phase_multiplicities(&t, 2), Err(ExactError::NotOfOrder { power: 2 }));
        let shear = Matrix::from_ints(&[&[1, 1], &[0, 1]]);
        assert_eq!(matrix_order(&shear, 20), Err(ExactError::InfiniteOrder { bound: 20 }));
    }
}
