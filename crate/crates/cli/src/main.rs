//! `dlq`: compute Dyer-Lashof actions, print coefficient tables, verify
//! relations and search for join-product tables.
//!
//! Exit codes: 0 success, 1 verification failures, 2 usage error, 3 data error.

mod render;

use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dl_core::algebra::{JoinAlgebraSpec, S1Candidate};
use dl_core::dyer_lashof::{OperationWord, ReductionOrder, RelationTable, DEFAULT_STEP_BUDGET};
use dl_core::fp::Prime;
use dl_core::module::{coefficient_table, ModuleSpec};
use dl_core::schema::{self, RelationFileDoc};
use dl_core::solver::{solve_product_table, SolveOutcome};
use dl_core::verify::{
    verify_adem_with, verify_cartan, verify_cartan_to_degree, verify_sign_laws, VerificationReport,
};

use crate::render::Styler;

const BUILTIN_MODULES: &[&str] = &["s1_p2"];

#[derive(Parser)]
#[command(
    name = "dlq",
    version,
    about = "Join-product algebra and lower-indexed Dyer-Lashof operations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Apply an operation word to a generator.
    Compute {
        #[command(flatten)]
        module: ModuleArg,
        /// Comma-separated indices, leftmost applied last: "2,0" is Q_2 Q_0.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long)]
        gen: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Coefficient of Q_op(x_gen) for every op and gen in a rectangle.
    Table {
        #[command(flatten)]
        module: ModuleArg,
        #[arg(long)]
        max_op: u32,
        #[arg(long)]
        max_gen: u64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Check Adem relations, the Cartan formula or the sign law.
    Verify {
        #[command(subcommand)]
        kind: VerifyKind,
    },
    /// Solve for product tables compatible with the Cartan formula.
    Solve {
        #[command(flatten)]
        module: ModuleArg,
        #[arg(long)]
        max_degree: i64,
        /// Re-verify every basis solution (Cartan and sign law).
        #[arg(long)]
        check: bool,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Rewrite a word to admissible form.
    Rewrite {
        /// Comma-separated indices, leftmost applied last.
        #[arg(long, allow_hyphen_values = true)]
        word: String,
        #[arg(long, default_value_t = 2)]
        p: u32,
        /// Relation file (JSON); defaults to the built-in table for p.
        #[arg(long)]
        relations: Option<String>,
        #[arg(long, value_enum, default_value_t = Order::Leftmost)]
        order: Order,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Print a relation table in the relation-file format.
    Relations {
        #[arg(long, default_value_t = 2)]
        p: u32,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Order {
    Leftmost,
    Rightmost,
}

#[derive(Args, Clone)]
struct ModuleArg {
    /// Built-in module name (s1_p2) or path to a module JSON file.
    #[arg(long, default_value = "s1_p2")]
    module: String,
    /// Product table: shift, binomial, zero, or a path to an algebra JSON file.
    #[arg(long)]
    table: Option<String>,
}

#[derive(Subcommand)]
enum VerifyKind {
    /// Q_r Q_s against its admissible rewrite on every generator.
    Adem {
        #[command(flatten)]
        module: ModuleArg,
        #[arg(long, default_value_t = 24)]
        max_index: u32,
        #[arg(long, default_value_t = 12)]
        max_gen: u64,
        #[arg(long)]
        relations: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Q_n(x_a * x_b) against the Cartan sum.
    Cartan {
        #[command(flatten)]
        module: ModuleArg,
        #[arg(long, default_value_t = 16)]
        max_n: u32,
        #[arg(long, default_value_t = 8)]
        max_gen: u64,
        /// Check every identity with target degree at most this instead of a rectangle.
        #[arg(long)]
        max_degree: Option<i64>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Sign law and forced vanishing of diagonal entries.
    Signs {
        /// Algebra JSON file.
        #[arg(long, conflicts_with = "module")]
        spec: Option<String>,
        #[command(flatten)]
        module: ModuleArg,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Data(String),
}

impl From<dl_core::Error> for CliError {
    fn from(e: dl_core::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

type CliResult<T> = Result<T, CliError>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let styler = Styler::from_env();
    match run(cli.command, &styler) {
        Ok(code) => ExitCode::from(code),
        Err(CliError::Usage(msg)) => {
            eprintln!("{}: {msg}", styler.error("usage error"));
            ExitCode::from(2)
        }
        Err(CliError::Data(msg)) => {
            eprintln!("{}: {msg}", styler.error("error"));
            ExitCode::from(3)
        }
    }
}

fn run(command: Command, styler: &Styler) -> CliResult<u8> {
    match command {
        Command::Compute {
            module,
            word,
            gen,
            format,
        } => {
            reject_csv(format)?;
            let m = load_module(&module, None)?;
            let w = parse_word(m.prime(), &word)?;
            let x = m.generator(gen)?;
            let y = m.apply_word(&w, &x)?;
            println!("{}", render::element(&y, format));
            Ok(0)
        }
        Command::Table {
            module,
            max_op,
            max_gen,
            format,
        } => {
            let m = load_module(&module, None)?;
            let cells = coefficient_table(&m, max_op, max_gen)?;
            print!(
                "{}",
                render::table(m.prime(), max_op, max_gen, &cells, format)
                    .map_err(CliError::Data)?
            );
            Ok(0)
        }
        Command::Verify { kind } => verify(kind, styler),
        Command::Solve {
            module,
            max_degree,
            check,
            format,
        } => {
            reject_csv(format)?;
            let m = load_module(&module, None)?;
            let outcome = solve_product_table(&m, max_degree)?;
            let checks = match (&outcome, check) {
                (SolveOutcome::Solved(space), true) => {
                    let mut out = Vec::new();
                    for v in &space.basis {
                        let table = space.table(m.algebra(), v)?;
                        let with = m.with_algebra(table.clone())?;
                        out.push((
                            verify_cartan_to_degree(&with, max_degree)?,
                            verify_sign_laws(&table),
                        ));
                    }
                    Some(out)
                }
                _ => None,
            };
            print!(
                "{}",
                render::solve(&outcome, checks.as_deref(), format, styler)
            );
            let failed = checks
                .iter()
                .flatten()
                .any(|(c, s)| !c.passed() || !s.passed());
            Ok(u8::from(failed))
        }
        Command::Rewrite {
            word,
            p,
            relations,
            order,
            format,
        } => {
            reject_csv(format)?;
            let p = Prime::new(p).map_err(|e| CliError::Usage(e.to_string()))?;
            let table = load_relations(p, relations.as_deref())?;
            let w = parse_word(p, &word)?;
            let order = match order {
                Order::Leftmost => ReductionOrder::Leftmost,
                Order::Rightmost => ReductionOrder::Rightmost,
            };
            let sum = table.rewrite_with(&w, order, DEFAULT_STEP_BUDGET)?;
            println!("{}", render::operation_sum(&sum, format));
            Ok(0)
        }
        Command::Relations { p } => {
            let p = Prime::new(p).map_err(|e| CliError::Usage(e.to_string()))?;
            let table = RelationTable::builtin(p)?;
            println!("{}", render::json(&RelationFileDoc::from_table(&table)));
            Ok(0)
        }
    }
}

fn verify(kind: VerifyKind, styler: &Styler) -> CliResult<u8> {
    let (label, report, format) = match kind {
        VerifyKind::Adem {
            module,
            max_index,
            max_gen,
            relations,
            format,
        } => {
            reject_csv(format)?;
            let m = load_module(&module, None)?;
            let table = load_relations(m.prime(), relations.as_deref())?;
            (
                "adem",
                verify_adem_with(&m, &table, max_index, max_gen)?,
                format,
            )
        }
        VerifyKind::Cartan {
            module,
            max_n,
            max_gen,
            max_degree,
            format,
        } => {
            reject_csv(format)?;
            // builtin candidate tables are generated just large enough
            let bound = match max_degree {
                Some(d) => d.max(0) as u64 / 2 + 1,
                None => 2 * max_gen + max_n as u64 + 2,
            };
            let m = load_module(&module, Some(bound))?;
            if !m.algebra().has_table() {
                return Err(CliError::Data(
                    "the module has no product table (pass --table or a module file with one); \
                     product undefined for pair (0, 0)"
                        .into(),
                ));
            }
            let report = match max_degree {
                Some(d) => verify_cartan_to_degree(&m, d)?,
                None => verify_cartan(&m, max_n, max_gen)?,
            };
            ("cartan", report, format)
        }
        VerifyKind::Signs {
            spec,
            module,
            format,
        } => {
            reject_csv(format)?;
            let algebra = match spec {
                Some(path) => load_algebra(&path)?,
                None => load_module(&module, Some(32))?.algebra().clone(),
            };
            ("signs", verify_sign_laws(&algebra), format)
        }
    };
    print!("{}", render::report(label, &report, format, styler));
    Ok(exit_for(&report))
}

fn exit_for(report: &VerificationReport) -> u8 {
    u8::from(!report.passed())
}

fn reject_csv(format: Format) -> CliResult<()> {
    if format == Format::Csv {
        Err(CliError::Usage(
            "csv output is only available for `table`".into(),
        ))
    } else {
        Ok(())
    }
}

fn parse_word(p: Prime, s: &str) -> CliResult<OperationWord> {
    OperationWord::parse(p, s).map_err(|e| CliError::Usage(e.to_string()))
}

fn read_file(path: &str) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|e| CliError::Data(format!("{path}: {e}")))
}

fn load_algebra(path: &str) -> CliResult<JoinAlgebraSpec> {
    if !Path::new(path).exists() {
        return Err(CliError::Usage(format!("no such algebra file {path:?}")));
    }
    schema::algebra_from_json(&read_file(path)?).map_err(|e| CliError::Data(format!("{path}: {e}")))
}

fn load_relations(p: Prime, path: Option<&str>) -> CliResult<RelationTable> {
    match path {
        None => Ok(RelationTable::builtin(p)?),
        Some(path) => {
            if !Path::new(path).exists() {
                return Err(CliError::Usage(format!("no such relation file {path:?}")));
            }
            let table = schema::relations_from_json(&read_file(path)?)
                .map_err(|e| CliError::Data(format!("{path}: {e}")))?;
            if table.p != p {
                return Err(CliError::Data(format!(
                    "{path}: relations are over F_{}, expected F_{p}",
                    table.p
                )));
            }
            Ok(table)
        }
    }
}

/// Resolves `--module` (built-in names first) and applies `--table`.
/// `table_bound` sizes generated candidate tables.
fn load_module(arg: &ModuleArg, table_bound: Option<u64>) -> CliResult<ModuleSpec> {
    let name = arg.module.as_str();
    let m = if BUILTIN_MODULES.contains(&name) {
        if Path::new(name).exists() {
            eprintln!(
                "warning: {name:?} names a built-in module; ignoring the file of the same name"
            );
        }
        ModuleSpec::s1_p2()
    } else if Path::new(name).exists() {
        schema::module_from_json(&read_file(name)?)
            .map_err(|e| CliError::Data(format!("{name}: {e}")))?
    } else {
        return Err(CliError::Usage(format!(
            "unknown module {name:?} (built-in: {}; otherwise a path to a module file)",
            BUILTIN_MODULES.join(", ")
        )));
    };
    let Some(table) = &arg.table else {
        return Ok(m);
    };
    let algebra = match S1Candidate::from_name(table) {
        Some(c) => c.spec(table_bound.unwrap_or(32)),
        None if Path::new(table).exists() => load_algebra(table)?,
        None => {
            return Err(CliError::Usage(format!(
                "unknown table {table:?} (built-in: shift, binomial, zero; otherwise a path to an algebra file)"
            )))
        }
    };
    Ok(m.with_algebra(algebra)?)
}
