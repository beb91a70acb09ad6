//! Text, JSON and CSV renderings of command results.

use std::fmt::Write as _;

use dl_core::algebra::GradedElement;
use dl_core::dyer_lashof::OperationSum;
use dl_core::fp::Prime;
use dl_core::module::TableCell;
use dl_core::schema::{ElementDoc, ReportDoc, SolveDoc, TableDoc};
use dl_core::solver::SolveOutcome;
use dl_core::verify::VerificationReport;
use serde::Serialize;
use serde_json::json;

use crate::Format;

/// ANSI styling, disabled by `DL_COLOR=0` or when stdout is not a terminal.
pub struct Styler {
    color: bool,
}

impl Styler {
    pub fn from_env() -> Self {
        use std::io::IsTerminal;
        let color = match std::env::var("DL_COLOR").as_deref() {
            Ok("0") => false,
            Ok("1") => true,
            _ => std::io::stdout().is_terminal(),
        };
        Styler { color }
    }

    fn paint(&self, code: &str, s: &str) -> String {
        if self.color {
            format!("\x1b[{code}m{s}\x1b[0m")
        } else {
            s.to_string()
        }
    }

    pub fn ok(&self, s: &str) -> String {
        self.paint("32", s)
    }

    pub fn error(&self, s: &str) -> String {
        self.paint("31", s)
    }
}

pub fn json<T: Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("documents serialise")
}

pub fn element(e: &GradedElement, format: Format) -> String {
    match format {
        Format::Json => json(&ElementDoc::from_element(e)),
        _ => e.to_string(),
    }
}

pub fn operation_sum(s: &OperationSum, format: Format) -> String {
    match format {
        Format::Json => {
            let terms: Vec<_> = s
                .terms()
                .map(|(w, c)| json!({ "word": w.indices(), "coeff": c }))
                .collect();
            json(&json!({ "p": s.prime().get(), "terms": terms }))
        }
        _ => s.to_string(),
    }
}

/// Text and CSV put generators on rows and operation indices on columns.
pub fn table(
    p: Prime,
    max_op: u32,
    max_gen: u64,
    cells: &[TableCell],
    format: Format,
) -> Result<String, String> {
    let row = |gen: u64| cells.iter().filter(move |c| c.gen == gen);
    match format {
        Format::Json => Ok(json(&TableDoc::new(p, max_op, max_gen, cells)) + "\n"),
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            let header =
                std::iter::once("gen".to_string()).chain((0..=max_op).map(|op| format!("Q_{op}")));
            w.write_record(header).map_err(|e| e.to_string())?;
            for gen in 0..=max_gen {
                let rec =
                    std::iter::once(gen.to_string()).chain(row(gen).map(|c| c.coeff.to_string()));
                w.write_record(rec).map_err(|e| e.to_string())?;
            }
            let bytes = w.into_inner().map_err(|e| e.to_string())?;
            String::from_utf8(bytes).map_err(|e| e.to_string())
        }
        Format::Text => {
            let width = (max_op.to_string().len() + 2).max(3);
            let mut out = format!("{:>5}", "gen");
            for op in 0..=max_op {
                write!(out, " {:>width$}", format!("Q_{op}")).unwrap();
            }
            out.push('\n');
            for gen in 0..=max_gen {
                write!(out, "{:>5}", format!("x_{gen}")).unwrap();
                for c in row(gen) {
                    write!(out, " {:>width$}", c.coeff).unwrap();
                }
                out.push('\n');
            }
            Ok(out)
        }
    }
}

pub fn report(label: &str, r: &VerificationReport, format: Format, styler: &Styler) -> String {
    if format == Format::Json {
        return json(&ReportDoc::from_report(r)) + "\n";
    }
    let mut out = String::new();
    for f in &r.failures {
        writeln!(
            out,
            "{} {}\n  lhs: {}\n  rhs: {}",
            styler.error("FAIL"),
            f.description,
            f.lhs,
            f.rhs
        )
        .unwrap();
    }
    let status = if r.passed() {
        styler.ok("ok")
    } else {
        styler.error("FAILED")
    };
    writeln!(
        out,
        "{label}: {status}, {} checked, {} failures ({} ms)",
        r.checked,
        r.failures.len(),
        r.elapsed.as_millis()
    )
    .unwrap();
    out
}

pub fn solve(
    outcome: &SolveOutcome,
    checks: Option<&[(VerificationReport, VerificationReport)]>,
    format: Format,
    styler: &Styler,
) -> String {
    if format == Format::Json {
        return json(&SolveDoc::from_outcome(outcome)) + "\n";
    }
    let space = match outcome {
        SolveOutcome::NoConstraints { unknowns, deferred } => {
            return format!(
                "no constraints generated: {unknowns} unknowns, {deferred} identities deferred beyond max-degree\n"
            )
        }
        SolveOutcome::Solved(s) => s,
    };
    let sys = &space.system;
    let mut out = String::new();
    writeln!(out, "p = {}, max degree {}", sys.p, sys.max_degree).unwrap();
    writeln!(
        out,
        "{} unknowns, {} equations, rank {}, {} deferred",
        sys.unknowns.len(),
        sys.matrix.num_rows(),
        space.rank,
        sys.deferred
    )
    .unwrap();
    writeln!(out, "solution space dimension {}", space.dimension()).unwrap();
    let slot = |i: usize| {
        let s = sys.unknowns[i];
        format!("c({},{})", s.a, s.b)
    };
    let free: Vec<String> = space
        .free
        .iter()
        .map(|s| format!("c({},{})", s.a, s.b))
        .collect();
    writeln!(
        out,
        "free variables: {}",
        if free.is_empty() {
            "none".into()
        } else {
            free.join(", ")
        }
    )
    .unwrap();
    for (k, v) in space.basis.iter().enumerate() {
        let support: Vec<String> = v
            .iter()
            .enumerate()
            .filter(|(_, &c)| c != 0)
            .map(|(i, &c)| {
                if c == 1 {
                    slot(i)
                } else {
                    format!("{c} {}", slot(i))
                }
            })
            .collect();
        write!(out, "basis {k}: {}", support.join(" + ")).unwrap();
        if let Some((cartan, signs)) = checks.and_then(|c| c.get(k)) {
            let ok = cartan.passed() && signs.passed();
            write!(
                out,
                "  [{}]",
                if ok {
                    styler.ok("verified")
                } else {
                    styler.error("FAILED")
                }
            )
            .unwrap();
        }
        out.push('\n');
    }
    writeln!(out, "zero solution: every product vanishes").unwrap();
    out
}
