//! Heegner divisor combinations, the obstruction check, the weight formula
//! and its restriction to the ball, the nonvanishing witness for lifts of
//! η⁸·v, and the divisor/weight accounting of the linear system.

use std::collections::BTreeMap;

use num_traits::Signed;
use serde::Serialize;
use thiserror::Error;

use crate::exact::{int, rat, serialize_rational, CycQ, Rational};
use crate::fqm::{isotropic_incidence, Element, OrthoBasis, QuadraticModule, TypeClass};
use crate::qseries::{QSeries, QSeriesError, VVForm};
use crate::weil::SpecialVector;

/// Weight of the lift of η⁸·v, and of each product restricted to the ball.
pub const LIFT_WEIGHT: i64 = 6;
/// Heegner divisors meet the ball with this multiplicity.
pub const BALL_MULTIPLICITY: i64 = 3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BorcherdsError {
    #[error("divisor index n = {n} for type {label} must be negative")]
    NonNegativeIndex { label: &'static str, n: String },
    #[error("n = {n} is not congruent to q = {q} mod 2 for type {label}")]
    NotHeegner { label: &'static str, n: String, q: String },
    #[error("exponent {0} is not a multiple of 1/3")]
    ExponentNotInThirds(String),
    #[error("cusp space has dimension {expected} but {found} basis forms were supplied")]
    CuspBasis { expected: usize, found: usize },
    #[error("weight {0} is not divisible by 3 after restriction")]
    NotRestrictable(String),
    #[error("weight {0} is not rational")]
    NonRational(String),
    #[error("special vector has no nonzero coefficient on a long element")]
    NoWitness,
    #[error("eta power has leading term {0}, expected q^(1/3)")]
    EtaLeading(String),
    #[error("accounting mismatch: {0}")]
    Accounting(String),
    #[error(transparent)]
    Series(#[from] QSeriesError),
}

/// Integer combination Σ c·D_{t,n} of Heegner divisors, constant on types.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct DivisorSpec {
    entries: BTreeMap<(TypeClass, Rational), i64>,
}

impl DivisorSpec {
    pub fn empty() -> Self {
        DivisorSpec::default()
    }

    /// Long elements at n = −4/3 with multiplicity 1.
    pub fn long_root() -> Self {
        DivisorSpec::single(TypeClass::Long, rat(-4, 3), 1).expect("valid Heegner index")
    }

    /// Short elements at n = −2/3 with multiplicity 1.
    pub fn short_root() -> Self {
        DivisorSpec::single(TypeClass::Short, rat(-2, 3), 1).expect("valid Heegner index")
    }

    pub fn single(t: TypeClass, n: Rational, c: i64) -> Result<Self, BorcherdsError> {
        let mut d = DivisorSpec::empty();
        d.insert(t, n, c)?;
        Ok(d)
    }

    /// Adds c to the multiplicity at (t, n); n must be negative and ≡ q(t) mod 2.
    pub fn insert(&mut self, t: TypeClass, n: Rational, c: i64) -> Result<(), BorcherdsError> {
        if !n.is_negative() {
            return Err(BorcherdsError::NonNegativeIndex { label: t.label(), n: n.to_string() });
        }
        let q = t.q_value();
        let diff: Rational = (&n - &q) / int(2);
        if !diff.is_integer() {
            return Err(BorcherdsError::NotHeegner { label: t.label(), n: n.to_string(), q: q.to_string() });
        }
        let slot = self.entries.entry((t, n)).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.entries.retain(|_, c| *c != 0);
        }
        Ok(())
    }

    pub fn plus(&self, other: &DivisorSpec) -> DivisorSpec {
        let mut out = self.clone();
        for ((t, n), &c) in &other.entries {
            out.insert(*t, n.clone(), c).expect("entries of a valid spec are valid");
        }
        out
    }

    pub fn entries(&self) -> impl Iterator<Item = (TypeClass, &Rational, i64)> {
        self.entries.iter().map(|((t, n), &c)| (*t, n, c))
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Numerator of −n/2 in thirds.
fn pairing_exponent(n: &Rational) -> Result<i64, BorcherdsError> {
    let e: Rational = -n * rat(3, 2);
    if !e.is_integer() {
        return Err(BorcherdsError::ExponentNotInThirds((-n / int(2)).to_string()));
    }
    Ok(e.to_integer().try_into().expect("exponent fits in i64"))
}

/// Σ over entries and over the elements α of each type of c·(coefficient of
/// f_α at q^{−n/2}).
fn pair(d: &DivisorSpec, f: &VVForm) -> Result<CycQ, BorcherdsError> {
    let mut total = CycQ::zero();
    for (t, n, c) in d.entries() {
        let per_element = f.element_coefficient(t, pairing_exponent(n)?)?;
        total += &per_element.scale(&int(c * f.cardinality(t) as i64));
    }
    Ok(total.simplify())
}

/// The divisor is realized when every cusp form in the obstruction space
/// pairs to zero with it; vacuous when the cusp space is zero.
pub fn obstruction_check(d: &DivisorSpec, cusp_dim: usize, cusp_basis: &[VVForm]) -> Result<bool, BorcherdsError> {
    if cusp_basis.len() != cusp_dim {
        return Err(BorcherdsError::CuspBasis { expected: cusp_dim, found: cusp_basis.len() });
    }
    for f in cusp_basis {
        if !pair(d, f)?.is_zero() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// k = Σ c·b_{α,−n/2} summed over entries (t, n, c) and all α of type t, with
/// b the coefficients of the normalized Eisenstein series.
pub fn borcherds_weight(d: &DivisorSpec, eisenstein: &VVForm) -> Result<Rational, BorcherdsError> {
    let k = pair(d, eisenstein)?;
    k.to_rational().ok_or_else(|| BorcherdsError::NonRational(k.to_string()))
}

/// Weight after restriction to the ball and taking the cube root.
pub fn ball_weight(k: &Rational) -> Result<Rational, BorcherdsError> {
    let w = k / int(BALL_MULTIPLICITY);
    if !w.is_integer() {
        return Err(BorcherdsError::NotRestrictable(k.to_string()));
    }
    Ok(w)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BorcherdsReport {
    #[serde(rename = "weight_on_D", serialize_with = "serialize_rational")]
    pub weight_on_d: Rational,
    #[serde(serialize_with = "serialize_rational")]
    pub weight_on_ball: Rational,
    pub obstruction_ok: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub fn borcherds_report(d: &DivisorSpec, eisenstein: &VVForm, cusp_dim: usize) -> Result<BorcherdsReport, BorcherdsError> {
    let obstruction_ok = obstruction_check(d, cusp_dim, &[])?;
    let weight_on_d = borcherds_weight(d, eisenstein)?;
    let weight_on_ball = ball_weight(&weight_on_d)?;
    Ok(BorcherdsReport { weight_on_d, weight_on_ball, obstruction_ok, notes: Vec::new() })
}

/// A long element α with c_α ≠ 0 and the coefficient c_α·(leading eta
/// coefficient) of q^{1/3} at α in η⁸·v.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftWitness {
    pub element: Element,
    pub coefficient: CycQ,
}

/// The first long element in the support of v, in element order.
pub fn lift_witness(m: &QuadraticModule, v: &SpecialVector, eta8: &QSeries) -> Result<LiftWitness, BorcherdsError> {
    let leading = eta8.coefficient(1)?;
    if eta8.leading().map(|(n, _)| n) != Some(1) {
        return Err(BorcherdsError::EtaLeading(eta8.to_string()));
    }
    let element = v
        .support()
        .into_iter()
        .find(|&e| m.type_class(e) == Some(TypeClass::Long))
        .ok_or(BorcherdsError::NoWitness)?;
    let coefficient = leading.scale(&int(i64::from(v.coeff(element))));
    if coefficient.is_zero() {
        return Err(BorcherdsError::NoWitness);
    }
    Ok(LiftWitness { element, coefficient })
}

/// Counts behind the degree and multiplicity bookkeeping of the linear system
/// spanned by the restricted lifts.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AccountingReport {
    pub bases: usize,
    pub lift_weight: i64,
    pub total_weight: i64,
    pub long_weight: i64,
    pub short_weight: i64,
    /// bases containing each short class, in element order of the classes
    pub short_incidence: Vec<usize>,
    pub long_incidence: Vec<usize>,
    pub short_multiplicity: i64,
    pub incidence_ok: bool,
    pub cusps: usize,
}

/// Reproduces Σ_bases 6 = 45 + m·5 with the short-root multiplicity m read
/// off the enumerated incidence (each basis vanishes to order 3 along each
/// of its short members), and counts cusps as isotropic classes up to sign.
pub fn accounting_report(
    m: &QuadraticModule,
    bases: &[OrthoBasis],
    long_weight: &Rational,
    short_weight: &Rational,
) -> Result<AccountingReport, BorcherdsError> {
    let as_int = |r: &Rational| -> Result<i64, BorcherdsError> {
        if !r.is_integer() {
            return Err(BorcherdsError::Accounting(format!("weight {r} is not integral")));
        }
        r.to_integer().try_into().map_err(|_| BorcherdsError::Accounting(format!("weight {r} overflows")))
    };
    let (long_weight, short_weight) = (as_int(long_weight)?, as_int(short_weight)?);
    let classes = |t: TypeClass| -> Vec<Element> {
        let mut v: Vec<Element> =
            m.elements().filter(|&e| m.type_class(e) == Some(t)).map(|e| m.sign_canonical(e)).collect();
        v.sort();
        v.dedup();
        v
    };
    let (long_classes, short_classes) = (classes(TypeClass::Long), classes(TypeClass::Short));
    let incidence = |cls: &[Element], pick: &dyn Fn(&OrthoBasis) -> Vec<Element>| -> Vec<usize> {
        cls.iter().map(|c| bases.iter().filter(|b| pick(b).contains(c)).count()).collect()
    };
    let long_incidence = incidence(&long_classes, &|b| vec![b.long_root]);
    let short_incidence = incidence(&short_classes, &|b| b.short_roots.clone());

    // total vanishing order along short divisors, shared among the classes
    let order_sum = short_incidence.iter().sum::<usize>() as i64 * BALL_MULTIPLICITY;
    if short_classes.is_empty() || order_sum % short_classes.len() as i64 != 0 {
        return Err(BorcherdsError::Accounting(format!(
            "{order_sum} does not split evenly over {} short classes",
            short_classes.len()
        )));
    }
    let short_multiplicity = order_sum / short_classes.len() as i64;
    let total_weight = bases.len() as i64 * LIFT_WEIGHT;
    let cusps = m.elements().filter(|&e| m.type_class(e) == Some(TypeClass::Isotropic)).count() / 2;
    let report = AccountingReport {
        bases: bases.len(),
        lift_weight: LIFT_WEIGHT,
        total_weight,
        long_weight,
        short_weight,
        incidence_ok: bases.iter().all(|b| isotropic_incidence(m, b)),
        short_incidence,
        long_incidence,
        short_multiplicity,
        cusps,
    };
    if total_weight != long_weight + short_multiplicity * short_weight {
        return Err(BorcherdsError::Accounting(format!(
            "{total_weight} != {long_weight} + {short_multiplicity}·{short_weight}"
        )));
    }
    if report.long_incidence.iter().any(|&c| c != 1) {
        return Err(BorcherdsError::Accounting("long classes and bases are not in bijection".into()));
    }
    if report.short_incidence.iter().any(|&c| c != report.short_incidence[0]) {
        return Err(BorcherdsError::Accounting("short classes lie in unequal numbers of bases".into()));
    }
    if !report.incidence_ok {
        return Err(BorcherdsError::Accounting("some basis misses an isotropic element".into()));
    }
    Ok(report)
}
