//! Command-line front end: text or JSON reports for every table and claim,
//! and the `verify-all` gate.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::borcherds::{accounting_report, borcherds_report, lift_witness, DivisorSpec};
use crate::exact::CycQ;
use crate::fqm::{classify, orthogonal_bases, pairing_table, QuadraticModule, TypeClass};
use crate::lattice::{LatticeSpec, Preset};
use crate::qseries::{eisenstein_g4, eta_power_8, obstruction_eisenstein, DEFAULT_PRECISION};
use crate::verify::{f00_lattice_coefficient, CheckResult, Session};
use crate::vvmf::{dimension_report, RepSpec};
use crate::weil::{
    aggregate, build_weil, character_decompose, special_vector, verify_special, CharacterTable, ClassName, WeilRep,
    CLASS_SIZES,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PresetArg {
    #[value(name = "paper")]
    Standard,
    AltDecomposition,
}

impl From<PresetArg> for Preset {
    fn from(p: PresetArg) -> Preset {
        match p {
            PresetArg::Standard => Preset::Standard,
            PresetArg::AltDecomposition => Preset::AltDecomposition,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DivisorArg {
    Long,
    Short,
}

#[derive(Debug, Parser)]
#[command(name = "segre", version, about = "Exact checks for Borcherds products on a 4-ball quotient")]
pub struct Cli {
    #[arg(long, global = true, value_enum, default_value = "text")]
    pub format: Format,
    /// Lattice decomposition whose discriminant form is used by the reports.
    #[arg(long, global = true, value_enum, default_value = "paper")]
    pub preset: PresetArg,
    /// Series precision in thirds of a power of q.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION, value_parser = clap::value_parser!(i64).range(1..=600))]
    pub precision: i64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Elements of the discriminant group by type.
    Classify,
    /// Counts of same-type partners by pairing value.
    PairingTable,
    /// Weil representation data and the type-aggregated dual action.
    Weil,
    /// Character table of SL(2, F3) and the decomposition of the Weil representation.
    Character,
    /// Dimension formula for the aggregated representation.
    Dimension {
        #[arg(long, default_value_t = 4)]
        weight: i64,
    },
    /// The normalized Eisenstein series of the obstruction space.
    Eisenstein,
    /// Obstruction check and weights for a Heegner divisor.
    Borcherds {
        #[arg(long, value_enum)]
        divisor: DivisorArg,
    },
    /// The fifteen special vectors and their identities.
    SpecialVectors,
    /// Weight and multiplicity bookkeeping of the linear system.
    Accounting,
    /// Every check, one line each; exit status 1 if any fails.
    VerifyAll,
}

/// Failure while producing a report.
#[derive(Debug)]
struct ReportError(String);

impl<E: std::fmt::Display> From<E> for ReportError {
    fn from(e: E) -> Self {
        ReportError(e.to_string())
    }
}

type Report = Result<(String, Value, bool), ReportError>;

/// Parses `argv` and runs the command, writing the report to `out` and
/// diagnostics to `err`. Returns the process exit code.
pub fn run<I, T>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let target: &mut dyn Write = if code == 0 { out } else { err };
            let _ = write!(target, "{}", e.render());
            return if code == 0 { 0 } else { 2 };
        }
    };
    match execute(&cli) {
        Ok((text, value, ok)) => {
            let rendered = match cli.format {
                Format::Text => text,
                Format::Json => {
                    let mut s = serde_json::to_string_pretty(&value).expect("report serializes");
                    s.push('\n');
                    s
                }
            };
            let _ = out.write_all(rendered.as_bytes());
            if ok {
                0
            } else {
                1
            }
        }
        Err(ReportError(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            1
        }
    }
}

fn module_for(preset: Preset) -> Result<QuadraticModule, ReportError> {
    Ok(LatticeSpec::preset(preset).discriminant()?.into_module())
}

fn execute(cli: &Cli) -> Report {
    let preset: Preset = cli.preset.into();
    match &cli.command {
        Command::Classify => classify_report(&module_for(preset)?),
        Command::PairingTable => pairing_report(&module_for(preset)?),
        Command::Weil => weil_report(&build_weil(&module_for(preset)?)?),
        Command::Character => character_report(&build_weil(&module_for(preset)?)?),
        Command::Dimension { weight } => dimension_text(&build_weil(&module_for(preset)?)?, *weight),
        Command::Eisenstein => eisenstein_report(&module_for(preset)?, cli.precision),
        Command::Borcherds { divisor } => borcherds_text(&module_for(preset)?, *divisor, cli.precision),
        Command::SpecialVectors => specials_report(&module_for(preset)?, cli.precision),
        Command::Accounting => accounting_text(&module_for(preset)?, cli.precision),
        Command::VerifyAll => verify_report(&Session::new(cli.precision).run_all()),
    }
}

fn cyc(c: &CycQ) -> Value {
    serde_json::to_value(c.simplify()).expect("cyclotomic values serialize")
}

fn classify_report(m: &QuadraticModule) -> Report {
    let cls = classify(m)?;
    let mut text = format!("{:<5} {:<6} {:>5}  elements\n", "type", "q", "count");
    let mut rows = Vec::new();
    for (t, elems) in cls.iter() {
        let labels: Vec<String> = elems.iter().map(|&e| m.label(e)).collect();
        let _ = writeln!(text, "{:<5} {:<6} {:>5}  {}", t.label(), t.q_value().to_string(), elems.len(), labels.join(" "));
        rows.push(json!({"type": t.label(), "q": t.q_value().to_string(), "count": elems.len(), "elements": labels}));
    }
    Ok((text, Value::Array(rows), true))
}

fn pairing_report(m: &QuadraticModule) -> Report {
    let table = pairing_table(m)?;
    let mut lines = [String::from("u "), String::from("v "), String::from("m0"), String::from("m1"), String::from("m2")];
    let mut rows = Vec::new();
    for u in TypeClass::ALL {
        for v in TypeClass::ALL {
            let counts = table.get(u, v);
            let _ = write!(lines[0], " {:>3}", u.label());
            let _ = write!(lines[1], " {:>3}", v.label());
            for (j, c) in counts.iter().enumerate() {
                let _ = write!(lines[2 + j], " {c:>3}");
            }
            rows.push(json!({"u": u.label(), "v": v.label(), "m": counts}));
        }
    }
    let mut text = String::from("m_j = #{v of the given type : <u, v> = 2j/3}\n");
    for l in lines {
        text.push_str(&l);
        text.push('\n');
    }
    Ok((text, Value::Array(rows), true))
}

fn weil_report(rep: &WeilRep) -> Report {
    let m = rep.module();
    let gauss = m.gauss_sum();
    let scalar = gauss.inv()?.simplify();
    let t_aggr = aggregate(rep, rep.t())?;
    let s_aggr = aggregate(rep, rep.s())?;
    let mut text = format!(
        "dimension {}\nGauss sum {}\nrho(S) scalar 1/G = {}\nrelations S^4 = 1, (ST)^3 = S^2, T^3 = 1, S^2 = negation: ok\n",
        rep.dim(),
        gauss,
        scalar
    );
    let mut traces = serde_json::Map::new();
    text.push_str("class traces:");
    for c in ClassName::ALL {
        let tr = rep.class_trace(c);
        let _ = write!(text, " {}={}", c.label(), tr);
        traces.insert(c.label().into(), cyc(&tr));
    }
    let _ = write!(text, "\naggregated rho*(T):\n{t_aggr}aggregated rho*(S):\n{s_aggr}");
    let diag: Vec<Value> = (0..rep.dim()).map(|i| cyc(rep.t().get(i, i))).collect();
    let value = json!({
        "dimension": rep.dim(),
        "gauss_sum": cyc(&gauss),
        "s_scalar": cyc(&scalar),
        "t_diagonal": diag,
        "class_traces": traces,
        "aggregated": {"T": matrix_json(&t_aggr), "S": matrix_json(&s_aggr)},
    });
    Ok((text, value, true))
}

fn matrix_json(m: &crate::exact::Matrix) -> Value {
    Value::Array((0..m.rows()).map(|i| Value::Array(m.row(i).iter().map(cyc).collect())).collect())
}

fn character_report(rep: &WeilRep) -> Report {
    let table = CharacterTable::standard();
    table.verify()?;
    let d = character_decompose(rep)?;
    let mut text = format!("{:<6}", "class");
    for c in ClassName::ALL {
        let _ = write!(text, " {:>8}", c.label());
    }
    let _ = write!(text, "\n{:<6}", "size");
    for s in CLASS_SIZES {
        let _ = write!(text, " {s:>8}");
    }
    text.push('\n');
    for (i, row) in table.rows().iter().enumerate() {
        let _ = write!(text, "{:<6}", format!("chi{}", i + 1));
        for v in row {
            let _ = write!(text, " {:>8}", v.to_string());
        }
        text.push('\n');
    }
    let _ = write!(text, "{:<6}", "trace");
    for t in &d.traces {
        let _ = write!(text, " {:>8}", t.to_string());
    }
    let mults: Vec<String> = d.multiplicities.iter().map(u32::to_string).collect();
    let _ = writeln!(text, "\nmultiplicities {}", mults.join(" "));
    let value = json!({
        "classes": ClassName::ALL.iter().zip(CLASS_SIZES).map(|(c, s)| json!({"name": c.label(), "size": s})).collect::<Vec<_>>(),
        "characters": table.rows().iter().map(|r| r.iter().map(cyc).collect::<Vec<_>>()).collect::<Vec<_>>(),
        "traces": d.traces.iter().map(cyc).collect::<Vec<_>>(),
        "multiplicities": d.multiplicities,
    });
    Ok((text, value, true))
}

fn aggregated_spec(rep: &WeilRep, weight: i64) -> Result<RepSpec, ReportError> {
    Ok(RepSpec::new(aggregate(rep, rep.t())?, aggregate(rep, rep.s())?, weight)?)
}

fn dimension_text(rep: &WeilRep, weight: i64) -> Report {
    let r = dimension_report(&aggregated_spec(rep, weight)?)?;
    let text = format!(
        "weight {}\nd = {}\nalpha(e^(pi i k/2) rho*(S)) = {}\nalpha((e^(pi i k/3) rho*(ST))^-1) = {}\nalpha(rho*(T)) = {}\n\
         dim modular = {}\ndim Eisenstein = {}\ndim cusp = {}\n",
        r.weight, r.d, r.alpha_s, r.alpha_st, r.alpha_t, r.dim_modular, r.dim_eisenstein, r.dim_cusp
    );
    Ok((text, serde_json::to_value(&r)?, true))
}

fn eisenstein_report(m: &QuadraticModule, precision: i64) -> Report {
    let counts = classify(m)?.counts();
    let sol = obstruction_eisenstein(precision, counts)?;
    let e1_q = eisenstein_g4(0, 1, precision.max(3))?.coefficient(3)?;
    let mut text = format!("a = {}, b = {} (coefficients of E1/c and (E2+E3+E4)/c)\n", sol.a, sol.b);
    let mut comps = serde_json::Map::new();
    for t in TypeClass::ALL {
        let s = sol.form.component(t);
        let _ = writeln!(text, "f_{} = {}", t.label(), s);
        comps.insert(t.label().into(), serde_json::to_value(s)?);
    }
    let read_off = f00_lattice_coefficient(&sol)?.re;
    let _ = writeln!(text, "E1/c has q-coefficient {e1_q} by direct summation");
    let _ = writeln!(text, "f_00 q-coefficient from lattice sums at tau = 1.3i: {read_off:.7}");
    let value = json!({
        "a": sol.a.to_string(),
        "b": sol.b.to_string(),
        "components": comps,
        "e1_q_coefficient": cyc(&e1_q),
        "f00_q_coefficient_lattice_sum": read_off,
    });
    Ok((text, value, true))
}

fn divisor_of(d: DivisorArg) -> (DivisorSpec, &'static str) {
    match d {
        DivisorArg::Long => (DivisorSpec::long_root(), "type 1, n = -4/3, c = 1"),
        DivisorArg::Short => (DivisorSpec::short_root(), "type 2, n = -2/3, c = 1"),
    }
}

fn cusp_dim(m: &QuadraticModule) -> Result<usize, ReportError> {
    Ok(dimension_report(&aggregated_spec(&build_weil(m)?, 4)?)?.dim_cusp)
}

fn borcherds_text(m: &QuadraticModule, divisor: DivisorArg, precision: i64) -> Report {
    let (d, label) = divisor_of(divisor);
    let cusp = cusp_dim(m)?;
    let f = obstruction_eisenstein(precision, classify(m)?.counts())?.form;
    let r = borcherds_report(&d, &f, cusp)?;
    let text = format!(
        "divisor: {label}\nobstruction: cusp space of dimension {cusp}, {}\nweight {} on D, {} on B\n",
        if r.obstruction_ok { "no obstruction" } else { "obstructed" },
        r.weight_on_d,
        r.weight_on_ball
    );
    let ok = r.obstruction_ok;
    Ok((text, serde_json::to_value(&r)?, ok))
}

fn specials_report(m: &QuadraticModule, precision: i64) -> Report {
    let rep = build_weil(m)?;
    let eta = eta_power_8(precision)?;
    let mut text = String::new();
    let mut rows = Vec::new();
    let mut all_ok = true;
    for b in orthogonal_bases(m)? {
        let v = special_vector(m, &b)?;
        let checks = verify_special(&v, &rep)?;
        let witness = lift_witness(m, &v, &eta)?;
        let ok = checks.iter().all(|c| c.holds);
        all_ok &= ok;
        let shorts: Vec<String> = b.short_roots.iter().map(|&e| m.label(e)).collect();
        let _ = writeln!(
            text,
            "{} | {}: support {}, identities {}, witness {} -> {}",
            m.label(b.long_root),
            shorts.join(" "),
            v.support().len(),
            if ok { "hold" } else { "FAIL" },
            m.label(witness.element),
            witness.coefficient
        );
        let support = v.support();
        rows.push(json!({
            "basis": b.members().map(|e| m.label(e)).collect::<Vec<_>>(),
            "support": support.iter().map(|&e| m.label(e)).collect::<Vec<_>>(),
            "coefficients": support.iter().map(|&e| v.coeff(e)).collect::<Vec<_>>(),
            "sign": v.coeff(witness.element),
            "checks": checks,
            "witness": {"element": m.label(witness.element), "coefficient": cyc(&witness.coefficient)},
        }));
    }
    Ok((text, Value::Array(rows), all_ok))
}

fn accounting_text(m: &QuadraticModule, precision: i64) -> Report {
    let cusp = cusp_dim(m)?;
    let f = obstruction_eisenstein(precision, classify(m)?.counts())?.form;
    let long = borcherds_report(&DivisorSpec::long_root(), &f, cusp)?;
    let short = borcherds_report(&DivisorSpec::short_root(), &f, cusp)?;
    let bases = orthogonal_bases(m)?;
    let r = accounting_report(m, &bases, &long.weight_on_ball, &short.weight_on_ball)?;
    let text = format!(
        "{} bases x weight {} = {}\n{} = {} + {}*{}\nshort-class multiplicity {} (each short class in {} bases, vanishing order 3)\n\
         long classes in bijection with bases: {}\nisotropic incidence for every basis: {}\ncusps {}\n",
        r.bases,
        r.lift_weight,
        r.total_weight,
        r.total_weight,
        r.long_weight,
        r.short_multiplicity,
        r.short_weight,
        r.short_multiplicity,
        r.short_incidence.first().copied().unwrap_or(0),
        r.long_incidence.iter().all(|&c| c == 1),
        r.incidence_ok,
        r.cusps
    );
    Ok((text, serde_json::to_value(&r)?, true))
}

fn verify_report(results: &[CheckResult]) -> Report {
    let mut text = String::new();
    for (i, r) in results.iter().enumerate() {
        let tag = if r.passed() { "PASS" } else { "FAIL" };
        let _ = writeln!(text, "{tag} {:>2} {}: {}", i + 1, r.name, r.actual);
        if !r.passed() {
            let _ = writeln!(text, "        expected: {}", r.expected);
        }
    }
    let passed = results.iter().filter(|r| r.passed()).count();
    let _ = writeln!(text, "{passed}/{} checks passed", results.len());
    Ok((text, serde_json::to_value(results)?, passed == results.len()))
}
