//! Dimensions of spaces of vector-valued modular forms for a finite-order
//! representation of SL(2, Z), given by the images of T and S.

use serde::Serialize;
use thiserror::Error;

use crate::exact::{
    alpha_invariant, int, matrix_order, phase_multiplicities, serialize_rational, CycQ, ExactError, Matrix, Rational,
    Subspace,
};

/// Orders above this are treated as infinite.
const ORDER_BOUND: u32 = 1000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VvmfError {
    #[error("weight {0} is outside the supported range k >= 3")]
    WeightOutOfRange(i64),
    #[error("T and S images must be square matrices of the same size")]
    Shape,
    #[error("relation {0} fails for the supplied images")]
    Relation(&'static str),
    #[error("dimension formula gave the non-integer {0}")]
    NonIntegral(String),
    #[error("cusp dimension would be negative ({modular} - {eisenstein})")]
    NegativeCusp { modular: i64, eisenstein: usize },
    #[error(transparent)]
    Exact(#[from] ExactError),
}

/// Images of T and S together with the weight k.
#[derive(Debug, Clone)]
pub struct RepSpec {
    t: Matrix,
    s: Matrix,
    weight: i64,
}

impl RepSpec {
    /// Requires S⁴ = 1 and (ST)³ = S², the relations of the modular group.
    pub fn new(t: Matrix, s: Matrix, weight: i64) -> Result<Self, VvmfError> {
        if !t.is_square() || !s.is_square() || t.rows() != s.rows() || t.rows() == 0 {
            return Err(VvmfError::Shape);
        }
        if weight < 3 {
            return Err(VvmfError::WeightOutOfRange(weight));
        }
        let s2 = s.mul(&s);
        if !s2.mul(&s2).is_identity() {
            return Err(VvmfError::Relation("S^4 = 1"));
        }
        let st = s.mul(&t);
        if st.pow(3) != s2 {
            return Err(VvmfError::Relation("(ST)^3 = S^2"));
        }
        matrix_order(&t, ORDER_BOUND)?;
        Ok(RepSpec { t, s, weight })
    }

    /// The trivial one-dimensional representation.
    pub fn trivial(weight: i64) -> Result<Self, VvmfError> {
        RepSpec::new(Matrix::identity(1), Matrix::identity(1), weight)
    }

    pub fn dim(&self) -> usize {
        self.t.rows()
    }

    pub fn weight(&self) -> i64 {
        self.weight
    }

    pub fn t_image(&self) -> &Matrix {
        &self.t
    }

    pub fn s_image(&self) -> &Matrix {
        &self.s
    }

    /// Simultaneous base change x ↦ P⁻¹xP.
    pub fn conjugate(&self, p: &Matrix) -> Result<RepSpec, VvmfError> {
        let pi = p.inverse()?;
        RepSpec::new(pi.mul(&self.t).mul(p), pi.mul(&self.s).mul(p), self.weight)
    }

    fn parity_sign(&self) -> CycQ {
        CycQ::from_int(if self.weight % 2 == 0 { 1 } else { -1 })
    }

    /// {x : S²x = (−1)^k x}, the part on which forms of weight k can live.
    fn parity_space(&self) -> Subspace {
        let s2 = self.s.mul(&self.s);
        let shifted = s2.sub(&Matrix::identity(self.dim()).scale(&self.parity_sign()));
        Subspace::span(self.dim(), &shifted.kernel())
    }
}

/// α of the restriction of `a` to `space`.
fn alpha_on(a: &Matrix, space: &Subspace) -> Result<Rational, VvmfError> {
    if space.dim() == 0 {
        return Ok(int(0));
    }
    let r = space.restrict(a)?;
    let order = matrix_order(&r, ORDER_BOUND)?;
    Ok(alpha_invariant(&phase_multiplicities(&r, order)?))
}

/// Intermediate and final values of the dimension formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DimensionReport {
    pub weight: i64,
    pub d: usize,
    #[serde(serialize_with = "serialize_rational")]
    pub alpha_s: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub alpha_st: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub alpha_t: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub dim_modular: Rational,
    pub dim_eisenstein: usize,
    pub dim_cusp: usize,
}

/// α(e^{πik/2}S), α((e^{πik/3}ST)⁻¹), α(T), each on the parity space.
pub fn alpha_terms(spec: &RepSpec) -> Result<(Rational, Rational, Rational), VvmfError> {
    let space = spec.parity_space();
    let k = spec.weight;
    let s_term = spec.s.scale(&CycQ::root_of_unity(k, 4));
    let st_term = spec.s.mul(&spec.t).scale(&CycQ::root_of_unity(k, 6)).inverse()?;
    Ok((alpha_on(&s_term, &space)?, alpha_on(&st_term, &space)?, alpha_on(&spec.t, &space)?))
}

/// d + dk/12 − α(e^{πik/2}S) − α((e^{πik/3}ST)⁻¹) − α(T), returned exactly.
pub fn dimension_modular(spec: &RepSpec) -> Result<Rational, VvmfError> {
    let d = int(spec.parity_space().dim() as i64);
    let (a_s, a_st, a_t) = alpha_terms(spec)?;
    Ok(&d + &d * Rational::new(spec.weight.into(), 12.into()) - a_s - a_st - a_t)
}

/// dim{x : Tx = x, S²x = (−1)^k x}.
pub fn dimension_eisenstein(spec: &RepSpec) -> usize {
    let n = spec.dim();
    let id = Matrix::identity(n);
    let t_fix = spec.t.sub(&id);
    let parity = spec.s.mul(&spec.s).sub(&id.scale(&spec.parity_sign()));
    let stacked = Matrix::from_rows(
        (0..n).map(|i| t_fix.row(i).to_vec()).chain((0..n).map(|i| parity.row(i).to_vec())).collect(),
    );
    n - stacked.rank()
}

pub fn dimension_cusp(spec: &RepSpec) -> Result<usize, VvmfError> {
    let modular = integral(&dimension_modular(spec)?)?;
    let eis = dimension_eisenstein(spec);
    usize::try_from(modular - eis as i64)
        .map_err(|_| VvmfError::NegativeCusp { modular, eisenstein: eis })
}

fn integral(r: &Rational) -> Result<i64, VvmfError> {
    if !r.is_integer() {
        return Err(VvmfError::NonIntegral(r.to_string()));
    }
    r.to_integer().try_into().map_err(|_| VvmfError::NonIntegral(r.to_string()))
}

pub fn dimension_report(spec: &RepSpec) -> Result<DimensionReport, VvmfError> {
    let (alpha_s, alpha_st, alpha_t) = alpha_terms(spec)?;
    Ok(DimensionReport {
        weight: spec.weight,
        d: spec.parity_space().dim(),
        alpha_s,
        alpha_st,
        alpha_t,
        dim_modular: dimension_modular(spec)?,
        dim_eisenstein: dimension_eisenstein(spec),
        dim_cusp: dimension_cusp(spec)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::weil::expected_dual;

    fn aggregated(k: i64) -> RepSpec {
        let (t, s) = expected_dual();
        RepSpec::new(t, s, k).unwrap()
    }

    #[test]
    fn aggregated_weight_four() {
        let r = dimension_report(&aggregated(4)).unwrap();
        assert_eq!(r.d, 4);
        assert_eq!((r.alpha_s, r.alpha_st, r.alpha_t), (int(1), rat(4, 3), int(1)));
        assert_eq!(r.dim_modular, int(2));
        assert_eq!((r.dim_eisenstein, r.dim_cusp), (2, 0));
    }

    #[test]
    fn odd_weight_vanishes() {
        for k in [3, 5, 7] {
            let r = dimension_report(&aggregated(k)).unwrap();
            assert_eq!((r.d, r.dim_modular.clone(), r.dim_eisenstein, r.dim_cusp), (0, int(0), 0, 0));
            let r = dimension_report(&RepSpec::trivial(k).unwrap()).unwrap();
            assert_eq!((r.dim_modular, r.dim_eisenstein), (int(0), 0));
        }
    }

    #[test]
    fn classical_levels() {
        let expected = [(4, 1, 0), (6, 1, 0), (8, 1, 0), (10, 1, 0), (12, 2, 1), (14, 1, 0), (24, 3, 2)];
        for (k, m, c) in expected {
            let spec = RepSpec::trivial(k).unwrap();
            assert_eq!(dimension_modular(&spec).unwrap(), int(m), "weight {k}");
            assert_eq!(dimension_cusp(&spec).unwrap(), c, "weight {k}");
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(RepSpec::trivial(2), Err(VvmfError::WeightOutOfRange(2))));
        let t = Matrix::from_ints(&[&[1, 1], &[0, 1]]);
        assert!(RepSpec::new(t, Matrix::identity(2), 4).is_err());
        assert!(matches!(RepSpec::new(Matrix::identity(2), Matrix::identity(3), 4), Err(VvmfError::Shape)));
    }

    #[test]
    fn base_change_invariance() {
        let p = Matrix::from_ints(&[&[1, 2, 0, 0], &[0, 1, 0, 3], &[1, 0, 1, 0], &[0, 0, 0, 1]]);
        let spec = aggregated(4);
        let conj = spec.conjugate(&p).unwrap();
        assert_eq!(dimension_report(&conj).unwrap(), dimension_report(&spec).unwrap());
    }

    #[test]
    fn report_json() {
        let j = serde_json::to_value(dimension_report(&aggregated(4)).unwrap()).unwrap();
        assert_eq!(j["alpha_st"], "4/3");
        assert_eq!(j["dim_modular"], "2");
    }
}
