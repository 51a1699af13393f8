//! The end-to-end verification gate: one exact check per claim, each
//! reported as expected/actual strings.

use std::cell::OnceCell;
use std::collections::BTreeSet;
use std::fmt::Display;

use num_complex::Complex64;
use serde::Serialize;

use crate::borcherds::{accounting_report, borcherds_report, lift_witness, DivisorSpec};
use crate::exact::{CycQ, Matrix, Subspace};
use crate::fqm::{
    classify, isotropic_incidence, orthogonal_bases, orthogonal_group, pairing_table, reflect, OrthoBasis,
    OrthogonalGroup, QuadraticModule, TypeClass,
};
use crate::lattice::{milgram_signature, LatticeSpec, Preset, RootKind};
use crate::numeric::{approx, g4_lattice_sum};
use crate::qseries::{
    eta_power_8, numeric_transform_check, obstruction_eisenstein, scalar_vector_form, ObstructionEisenstein, QSeries,
    MIN_NUMERIC_PRECISION,
};
use crate::vvmf::{dimension_report, DimensionReport, RepSpec};
use crate::weil::{
    aggregate, build_weil, character_decompose, expected_dual, isotypic_v, o_q_character_norm, special_vector,
    verify_special, SpecialVector, WeilRep,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub status: Status,
    pub expected: String,
    pub actual: String,
    pub source: String,
}

impl CheckResult {
    fn new(name: &str, source: &str, expected: String, actual: Result<String, String>) -> Self {
        let actual = actual.unwrap_or_else(|e| format!("error: {e}"));
        let status = if actual == expected { Status::Pass } else { Status::Fail };
        CheckResult { name: name.into(), status, expected, actual, source: source.into() }
    }

    pub fn passed(&self) -> bool {
        self.status == Status::Pass
    }
}

type Shared<T> = OnceCell<Result<T, String>>;

fn get<T>(cell: &Shared<T>, init: impl FnOnce() -> Result<T, String>) -> Result<&T, String> {
    cell.get_or_init(init).as_ref().map_err(Clone::clone)
}

fn err(e: impl Display) -> String {
    e.to_string()
}

/// Shared inputs computed on first use.
pub struct Session {
    precision: i64,
    module: Shared<QuadraticModule>,
    rep: Shared<WeilRep>,
    bases: Shared<Vec<OrthoBasis>>,
    group: Shared<OrthogonalGroup>,
    specials: Shared<Vec<SpecialVector>>,
    isotypic: Shared<Subspace>,
    dimension: Shared<DimensionReport>,
    eisenstein: Shared<ObstructionEisenstein>,
}

/// Type sizes of the rank-4 ternary module of signature 4 mod 8.
pub const TYPE_COUNTS: [usize; 4] = [1, 20, 30, 30];

/// Element lists by support pattern: each nonzero position takes ±1.
const TYPE_PATTERNS: [(TypeClass, &[&str]); 3] = [
    (TypeClass::Isotropic, &["1100", "1010", "1001", "0111"]),
    (TypeClass::Long, &["1000", "1111", "0110", "0101", "0011"]),
    (TypeClass::Short, &["0100", "0010", "0001", "1110", "1101", "1011"]),
];

/// (m₀, m₁, m₂) for (u-type, v-type) in `TypeClass::ALL` order.
pub const PAIRING_TABLE: [[[usize; 3]; 4]; 4] = [
    [[1, 0, 0], [20, 0, 0], [30, 0, 0], [30, 0, 0]],
    [[1, 0, 0], [2, 9, 9], [12, 9, 9], [12, 9, 9]],
    [[1, 0, 0], [8, 6, 6], [12, 9, 9], [6, 12, 12]],
    [[1, 0, 0], [8, 6, 6], [6, 12, 12], [12, 9, 9]],
];

fn expand(pattern: &str) -> Vec<Vec<i64>> {
    let mut out = vec![Vec::new()];
    for ch in pattern.chars() {
        let choices: &[i64] = if ch == '1' { &[1, 2] } else { &[0] };
        out = out.into_iter().flat_map(|v| choices.iter().map(move |&c| [v.clone(), vec![c]].concat())).collect();
    }
    out
}

fn leading_term(s: &QSeries) -> String {
    match s.leading() {
        Some((n, c)) => QSeries::monomial(n, c.clone(), n).to_string().trim_end_matches(" + …").to_string(),
        None => "0".into(),
    }
}

impl Session {
    pub fn new(precision: i64) -> Self {
        Session {
            precision,
            module: OnceCell::new(),
            rep: OnceCell::new(),
            bases: OnceCell::new(),
            group: OnceCell::new(),
            specials: OnceCell::new(),
            isotypic: OnceCell::new(),
            dimension: OnceCell::new(),
            eisenstein: OnceCell::new(),
        }
    }

    pub fn module(&self) -> Result<&QuadraticModule, String> {
        get(&self.module, || Ok(LatticeSpec::preset(Preset::Standard).discriminant().map_err(err)?.into_module()))
    }

    pub fn rep(&self) -> Result<&WeilRep, String> {
        get(&self.rep, || build_weil(self.module()?).map_err(err))
    }

    pub fn bases(&self) -> Result<&Vec<OrthoBasis>, String> {
        get(&self.bases, || orthogonal_bases(self.module()?).map_err(err))
    }

    pub fn group(&self) -> Result<&OrthogonalGroup, String> {
        get(&self.group, || Ok(orthogonal_group(self.module()?)))
    }

    pub fn specials(&self) -> Result<&Vec<SpecialVector>, String> {
        get(&self.specials, || {
            let m = self.module()?;
            self.bases()?.iter().map(|b| special_vector(m, b).map_err(err)).collect()
        })
    }

    pub fn isotypic(&self) -> Result<&Subspace, String> {
        get(&self.isotypic, || isotypic_v(self.rep()?).map_err(err))
    }

    pub fn dimension(&self) -> Result<&DimensionReport, String> {
        get(&self.dimension, || {
            let rep = self.rep()?;
            let t = aggregate(rep, rep.t()).map_err(err)?;
            let s = aggregate(rep, rep.s()).map_err(err)?;
            dimension_report(&RepSpec::new(t, s, 4).map_err(err)?).map_err(err)
        })
    }

    pub fn eisenstein(&self) -> Result<&ObstructionEisenstein, String> {
        get(&self.eisenstein, || {
            let counts = classify(self.module()?).map_err(err)?.counts();
            obstruction_eisenstein(self.precision, counts).map_err(err)
        })
    }

    fn types(&self) -> CheckResult {
        let expected = format!("counts {TYPE_COUNTS:?}; element lists as enumerated");
        let actual = (|| {
            let m = self.module()?;
            let cls = classify(m).map_err(err)?;
            let mut mismatched = Vec::new();
            for (t, patterns) in TYPE_PATTERNS {
                let want: BTreeSet<Vec<i64>> = patterns.iter().flat_map(|p| expand(p)).collect();
                let got: BTreeSet<Vec<i64>> = cls.elements(t).iter().map(|&e| m.coords(e)).collect();
                if want != got {
                    mismatched.push(t.label());
                }
            }
            let lists = if mismatched.is_empty() {
                "element lists as enumerated".to_string()
            } else {
                format!("element lists differ for types {mismatched:?}")
            };
            Ok(format!("counts {:?}; {lists}", cls.counts()))
        })();
        CheckResult::new("type classification", "types", expected, actual)
    }

    fn pairing(&self) -> CheckResult {
        let render = |f: &dyn Fn(TypeClass, TypeClass) -> [usize; 3]| {
            let mut out = Vec::new();
            for u in TypeClass::ALL {
                for v in TypeClass::ALL {
                    let [a, b, c] = f(u, v);
                    out.push(format!("{}/{}:{a},{b},{c}", u.label(), v.label()));
                }
            }
            out.join(" ")
        };
        let expected = render(&|u, v| PAIRING_TABLE[u.position()][v.position()]);
        let actual = (|| {
            let table = pairing_table(self.module()?).map_err(err)?;
            Ok(render(&|u, v| table.get(u, v)))
        })();
        CheckResult::new("pairing table", "pairing-table", expected, actual)
    }

    fn traces(&self) -> CheckResult {
        let expected = "traces 81 1 1 -9 1 1 -9; multiplicities 1 10 5 5 5 10 5".to_string();
        let actual = (|| {
            let d = character_decompose(self.rep()?).map_err(err)?;
            let tr: Vec<String> = d.traces.iter().map(|c| c.to_string()).collect();
            let mu: Vec<String> = d.multiplicities.iter().map(|c| c.to_string()).collect();
            Ok(format!("traces {}; multiplicities {}", tr.join(" "), mu.join(" ")))
        })();
        CheckResult::new("Weil traces and decomposition", "weil-traces", expected, actual)
    }

    fn dual(&self) -> CheckResult {
        let (et, es) = expected_dual();
        let expected = format!("T = {}; S = {}", one_line(&et), one_line(&es));
        let actual = (|| {
            let rep = self.rep()?;
            let t = aggregate(rep, rep.t()).map_err(err)?;
            let s = aggregate(rep, rep.s()).map_err(err)?;
            Ok(format!("T = {}; S = {}", one_line(&t), one_line(&s)))
        })();
        CheckResult::new("aggregated dual matrices", "aggregated-dual", expected, actual)
    }

    fn dimensions(&self) -> CheckResult {
        let expected = "d = 4; alpha = (1, 4/3, 1); modular 2, Eisenstein 2, cusp 0".to_string();
        let actual = self.dimension().map(|r| {
            format!(
                "d = {}; alpha = ({}, {}, {}); modular {}, Eisenstein {}, cusp {}",
                r.d, r.alpha_s, r.alpha_st, r.alpha_t, r.dim_modular, r.dim_eisenstein, r.dim_cusp
            )
        });
        CheckResult::new("dimension report", "dimension", expected, actual)
    }

    fn eisenstein_check(&self) -> CheckResult {
        let expected =
            "f00 = -1/2 + …; f0 = 270·q + …; f1 = 135·q^(2/3) + …; f2 = 15·q^(1/3) + …; f00 q-coefficient within 1e-6 of lattice sum"
                .to_string();
        let actual = (|| {
            let sol = self.eisenstein()?;
            let f = &sol.form;
            let c = f.components();
            let oracle = f00_oracle_deviation(sol)?;
            let verdict = if oracle < 1e-6 {
                "within 1e-6 of lattice sum".to_string()
            } else {
                format!("off from lattice sum by {oracle:e}")
            };
            Ok(format!(
                "f00 = {} + …; f0 = {} + …; f1 = {} + …; f2 = {} + …; f00 q-coefficient {verdict}",
                leading_term(&c[0]),
                leading_term(&c[1]),
                leading_term(&c[2]),
                leading_term(&c[3])
            ))
        })();
        CheckResult::new("normalized Eisenstein series", "eisenstein", expected, actual)
    }

    fn weights(&self) -> CheckResult {
        let expected = "long: 135 on D, 45 on ball; short: 15 on D, 5 on ball; obstruction ok".to_string();
        let actual = (|| {
            let cusp = self.dimension()?.dim_cusp;
            let f = &self.eisenstein()?.form;
            let l = borcherds_report(&DivisorSpec::long_root(), f, cusp).map_err(err)?;
            let s = borcherds_report(&DivisorSpec::short_root(), f, cusp).map_err(err)?;
            let ok = if l.obstruction_ok && s.obstruction_ok { "obstruction ok" } else { "obstructed" };
            Ok(format!(
                "long: {} on D, {} on ball; short: {} on D, {} on ball; {ok}",
                l.weight_on_d, l.weight_on_ball, s.weight_on_d, s.weight_on_ball
            ))
        })();
        CheckResult::new("Borcherds weights", "weights", expected, actual)
    }

    fn orthogonal(&self) -> CheckResult {
        let expected = "order 1440; orbits [20, 30, 30]; -1 central; 30 reflections involutive".to_string();
        let actual = (|| {
            let m = self.module()?;
            let g = self.group()?;
            let mut orbits: Vec<usize> = g.orbits().iter().map(Vec::len).collect();
            orbits.sort();
            let minus = crate::fqm::Isometry::negation(m);
            let central = if g.contains(&minus) && g.is_central(&minus) { "-1 central" } else { "-1 not central" };
            let mut reps = BTreeSet::new();
            for e in m.elements() {
                if matches!(m.type_class(e), Some(TypeClass::Long | TypeClass::Short)) {
                    reps.insert(m.sign_canonical(e));
                }
            }
            let mut good = 0;
            for &a in &reps {
                let r = reflect(m, a).map_err(err)?;
                if r.compose(&r).is_identity() && !r.is_identity() && g.contains(&r) {
                    good += 1;
                }
            }
            let refl = if good == reps.len() {
                format!("{good} reflections involutive")
            } else {
                format!("{good} of {} reflections involutive", reps.len())
            };
            Ok(format!("order {}; orbits {orbits:?}; {central}; {refl}", g.order()))
        })();
        CheckResult::new("orthogonal group", "orthogonal-group", expected, actual)
    }

    fn bases_check(&self) -> CheckResult {
        let expected =
            "15 bases with unique completions; each short class in 3 bases; isotropic incidence 15/15; cusps 10".to_string();
        let actual = (|| {
            let m = self.module()?;
            let bases = self.bases()?;
            let mut shorts: BTreeSet<_> = BTreeSet::new();
            for e in m.elements().filter(|&e| m.type_class(e) == Some(TypeClass::Short)) {
                shorts.insert(m.sign_canonical(e));
            }
            let incidence: BTreeSet<usize> =
                shorts.iter().map(|c| bases.iter().filter(|b| b.short_roots.contains(c)).count()).collect();
            let incidence = match incidence.iter().collect::<Vec<_>>()[..] {
                [k] => format!("each short class in {k} bases"),
                _ => format!("short class incidences {incidence:?}"),
            };
            let iso = bases.iter().filter(|b| isotropic_incidence(m, b)).count();
            let cusps = m.elements().filter(|&e| m.type_class(e) == Some(TypeClass::Isotropic)).count() / 2;
            Ok(format!(
                "{} bases with unique completions; {incidence}; isotropic incidence {iso}/{}; cusps {cusps}",
                bases.len(),
                bases.len()
            ))
        })();
        CheckResult::new("orthogonal bases", "orthogonal-bases", expected, actual)
    }

    fn specials_check(&self) -> CheckResult {
        let expected = "15 vectors; S, T and reflection identities hold; all in V (dim 5); span rank 5; O(q) norm of V = 1"
            .to_string();
        let actual = (|| {
            let rep = self.rep()?;
            let vs = self.specials()?;
            let v_space = self.isotypic()?;
            let mut failures = 0;
            for v in vs {
                failures += verify_special(v, rep).map_err(err)?.iter().filter(|c| !c.holds).count();
            }
            let identities =
                if failures == 0 { "S, T and reflection identities hold".into() } else { format!("{failures} identities fail") };
            let inside = vs.iter().filter(|v| v_space.contains(&v.to_vector())).count();
            let inside = if inside == vs.len() {
                format!("all in V (dim {})", v_space.dim())
            } else {
                format!("{inside} in V (dim {})", v_space.dim())
            };
            let span = Matrix::from_rows(vs.iter().map(|v| v.to_vector()).collect()).rank();
            let norm = o_q_character_norm(self.group()?, v_space).map_err(err)?;
            Ok(format!("{} vectors; {identities}; {inside}; span rank {span}; O(q) norm of V = {norm}", vs.len()))
        })();
        CheckResult::new("special vectors", "special-vectors", expected, actual)
    }

    fn witness(&self) -> CheckResult {
        let expected = "15/15 special vectors have a long witness with coefficient ±1".to_string();
        let actual = (|| {
            let m = self.module()?;
            let eta = eta_power_8(self.precision).map_err(err)?;
            let vs = self.specials()?;
            let unit = [CycQ::one(), CycQ::from_int(-1)];
            let mut ok = 0;
            for v in vs {
                if let Ok(w) = lift_witness(m, v, &eta) {
                    if unit.contains(&w.coefficient) {
                        ok += 1;
                    }
                }
            }
            Ok(format!("{ok}/{} special vectors have a long witness with coefficient ±1", vs.len()))
        })();
        CheckResult::new("lift witness", "lift-witness", expected, actual)
    }

    fn lattice_check(&self) -> CheckResult {
        let expected = "trireflections: isometries inducing identity; short and long reflections: isometries inducing F3 reflections; q-histograms equal; Milgram 4, 4"
            .to_string();
        CheckResult::new("lattice layer", "lattice", expected, lattice_layer())
    }

    fn numeric(&self) -> CheckResult {
        let expected = "deviation < 1e-8".to_string();
        let actual = (|| {
            let m = self.module()?;
            let standard = m.element(&[1, 0, 0, 0]);
            let basis = self
                .bases()?
                .iter()
                .find(|b| b.long_root == standard)
                .ok_or("no basis through (1,0,0,0)")?;
            let v = special_vector(m, basis).map_err(err)?;
            let eta = eta_power_8(self.precision.max(MIN_NUMERIC_PRECISION)).map_err(err)?;
            let form = scalar_vector_form(&v.to_vector(), &eta);
            let dev = numeric_transform_check(&form, self.rep()?, Complex64::new(0.3, 1.1)).map_err(err)?;
            Ok(if dev < 1e-8 { "deviation < 1e-8".to_string() } else { format!("deviation {dev:e}") })
        })();
        CheckResult::new("numeric transformation of eta^8 v", "numeric-transform", expected, actual)
    }

    fn accounting(&self) -> CheckResult {
        let expected = "15·6 = 90 = 45 + 9·5; cusps 10".to_string();
        let actual = (|| {
            let cusp = self.dimension()?.dim_cusp;
            let f = &self.eisenstein()?.form;
            let l = borcherds_report(&DivisorSpec::long_root(), f, cusp).map_err(err)?;
            let s = borcherds_report(&DivisorSpec::short_root(), f, cusp).map_err(err)?;
            let r = accounting_report(self.module()?, self.bases()?, &l.weight_on_ball, &s.weight_on_ball)
                .map_err(err)?;
            Ok(format!(
                "{}·{} = {} = {} + {}·{}; cusps {}",
                r.bases, r.lift_weight, r.total_weight, r.long_weight, r.short_multiplicity, r.short_weight, r.cusps
            ))
        })();
        CheckResult::new("weight accounting", "accounting", expected, actual)
    }

    /// All checks in a fixed order.
    pub fn run_all(&self) -> Vec<CheckResult> {
        self.run_each().into_iter().map(|f| f(self)).collect()
    }

    /// The checks as functions, in reporting order.
    pub fn run_each(&self) -> Vec<fn(&Session) -> CheckResult> {
        vec![
            Session::types,
            Session::pairing,
            Session::traces,
            Session::dual,
            Session::dimensions,
            Session::eisenstein_check,
            Session::weights,
            Session::orthogonal,
            Session::bases_check,
            Session::specials_check,
            Session::witness,
            Session::lattice_check,
            Session::numeric,
            Session::accounting,
        ]
    }
}

fn one_line(m: &Matrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|i| format!("[{}]", m.row(i).iter().map(|c| c.to_string()).collect::<Vec<_>>().join(", ")))
        .collect();
    format!("[{}]", rows.join(", "))
}

/// The f_00 q-coefficient read off the lattice sums at τ = 1.3i, with all
/// other terms taken from the series.
pub fn f00_lattice_coefficient(sol: &ObstructionEisenstein) -> Result<Complex64, String> {
    let tau = Complex64::new(0.0, 1.3);
    let bound = 2000;
    let sums: Vec<Complex64> = [(0, 1), (1, 0), (1, 1), (1, 2)].iter().map(|&(a, b)| g4_lattice_sum(a, b, tau, bound)).collect();
    let (a, b) = (crate::numeric::rational_to_f64(&sol.a), crate::numeric::rational_to_f64(&sol.b));
    let lattice_f00 = sums[0] * a + (sums[1] + sums[2] + sums[3]) * b;
    let f00 = &sol.form.components()[0];
    let coeff = f00.coefficient(3).map_err(err)?;
    let q = (Complex64::i() * std::f64::consts::TAU * tau).exp();
    let rest = f00.evaluate(tau) - approx(&coeff) * q;
    Ok((lattice_f00 - rest) / q)
}

/// Relative deviation between the exact f_00 q-coefficient and
/// `f00_lattice_coefficient`.
pub fn f00_oracle_deviation(sol: &ObstructionEisenstein) -> Result<f64, String> {
    let read_off = f00_lattice_coefficient(sol)?;
    let c = approx(&sol.form.components()[0].coefficient(3).map_err(err)?);
    Ok((read_off - c).norm() / c.norm().max(f64::MIN_POSITIVE))
}

/// Reflections and trireflections in roots with coordinates in [−1, 1],
/// compared on the discriminant group; then both decompositions.
pub fn lattice_layer() -> Result<String, String> {
    let spec = LatticeSpec::preset(Preset::Standard);
    let disc = spec.discriminant().map_err(err)?;
    let m = disc.module();
    let mut tri = (0, 0);
    let mut refl = (0, 0);
    for r in spec.vectors_with_norm(-2, 1) {
        let t = spec.trireflection(&r).map_err(err)?;
        tri.0 += 1;
        if t.preserves(&spec.gram) && disc.induced(&t).map_err(err)?.is_identity() {
            tri.1 += 1;
        }
        let s = spec.reflection_minus_one(&r, RootKind::Short).map_err(err)?;
        let target = reflect(m, disc.root_class(&spec, &r).map_err(err)?).map_err(err)?;
        refl.0 += 1;
        if s.preserves(&spec.gram) && disc.induced(&s).map_err(err)? == target {
            refl.1 += 1;
        }
    }
    for r in spec.vectors_with_norm(-4, 1) {
        let Ok(s) = spec.reflection_minus_one(&r, RootKind::Long) else { continue };
        let target = reflect(m, disc.root_class(&spec, &r).map_err(err)?).map_err(err)?;
        refl.0 += 1;
        if s.preserves(&spec.gram) && disc.induced(&s).map_err(err)? == target {
            refl.1 += 1;
        }
    }
    let alt = LatticeSpec::preset(Preset::AltDecomposition).discriminant().map_err(err)?;
    let hist = if m.q_histogram() == alt.module().q_histogram() { "q-histograms equal" } else { "q-histograms differ" };
    let (s1, s2) = (milgram_signature(m).map_err(err)?, milgram_signature(alt.module()).map_err(err)?);
    let part = |name: &str, (n, ok): (usize, usize), what: &str| {
        if n > 0 && n == ok {
            format!("{name}: isometries inducing {what}")
        } else {
            format!("{name}: {ok} of {n} isometries inducing {what}")
        }
    };
    Ok(format!(
        "{}; {}; {hist}; Milgram {s1}, {s2}",
        part("trireflections", tri, "identity"),
        part("short and long reflections", refl, "F3 reflections")
    ))
}

/// Convenience: the full gate at the given series precision.
pub fn verify_all(precision: i64) -> Vec<CheckResult> {
    Session::new(precision).run_all()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn patterns_expand() {
        assert_eq!(expand("1100").len(), 4);
        assert_eq!(expand("1111").len(), 16);
        let total: usize = TYPE_PATTERNS.iter().flat_map(|(_, ps)| ps.iter().map(|p| expand(p).len())).sum();
        assert_eq!(total, 80);
    }

    #[test]
    fn status_follows_strings() {
        let pass = CheckResult::new("x", "s", "a".into(), Ok("a".into()));
        let fail = CheckResult::new("x", "s", "a".into(), Err("boom".into()));
        assert!(pass.passed());
        assert_eq!((fail.status, fail.actual.as_str()), (Status::Fail, "error: boom"));
        assert_eq!(leading_term(&QSeries::monomial(2, CycQ::from_int(135), 9)), "135·q^(2/3)");
    }
}
