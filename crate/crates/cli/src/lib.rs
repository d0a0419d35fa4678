//! The `tql` command-line driver: load a repository, compile a query, run
//! the solver, and print results.
//!
//! Exit codes: 0 when at least one result was printed, 1 when no input
//! satisfies the query, 2 for usage, query, or repository errors, and 3 when
//! the engine faults or `--oracle` finds a disagreement.

use std::fmt::Write as _;
use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, ValueEnum};
use tql_core::frontend::{self, Expr, ExprKind, Program, Span, StmtKind};
use tql_core::imprat::{Diagnostic, Stmt as IrStmt};
use tql_core::oracle::{self, DatasetSet, OracleError};
use tql_core::relation::{ColumnKind, Dataset};
use tql_core::repository::{load_repository, LoadError};
use tql_core::solver::{
    self, CandidateInput, ChoiceFunction, DiscoveryProgram, Feedback, ProgramError, Solution,
    SolveError, SolveResult, Solver,
};
use tql_core::Evaluator;

pub const EXIT_FOUND: u8 = 0;
pub const EXIT_EXHAUSTED: u8 = 1;
pub const EXIT_USAGE: u8 = 2;
pub const EXIT_FAULT: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    /// Stop at the first solution.
    #[default]
    First,
    /// Stream every solution.
    All,
    /// Every solution, checked against the enumeration oracle.
    OracleDiff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum QuerySource {
    File(PathBuf),
    Inline(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RunConfig {
    pub repo: Option<PathBuf>,
    pub query: QuerySource,
    pub mode: Mode,
    pub choice: String,
    pub emit_ir: bool,
    pub trace: bool,
    pub step_limit: u64,
    pub format: Format,
}

/// Find the datasets that make a TQL query succeed.
///
/// Exit status: 0 results found, 1 no satisfying input, 2 usage, query or
/// repository error, 3 engine fault or oracle disagreement.
#[derive(Debug, Parser)]
#[command(name = "tql", version)]
pub struct Args {
    /// Directory of CSV files, one dataset per file.
    #[arg(long, value_name = "DIR", required_unless_present = "emit_ir")]
    pub repo: Option<PathBuf>,
    /// Read the query from a file.
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with = "eval",
        required_unless_present = "eval"
    )]
    pub query: Option<PathBuf>,
    /// Query text given inline.
    #[arg(long, value_name = "TEXT")]
    pub eval: Option<String>,
    /// Print every solution in enumeration order.
    #[arg(long)]
    pub all: bool,
    /// Print every solution and compare them with the enumeration oracle.
    #[arg(long, conflicts_with = "all")]
    pub oracle: bool,
    /// Choice function used to propose inputs.
    #[arg(long, default_value = "backtracking", value_parser = clap::builder::PossibleValuesParser::new(solver::CHOICE_FUNCTIONS))]
    pub choice: String,
    /// Print the compiled ImpRAT program and exit.
    #[arg(long)]
    pub emit_ir: bool,
    /// Trace every evaluation step to stderr.
    #[arg(long)]
    pub trace: bool,
    /// Maximum evaluator steps per candidate.
    #[arg(long, env = "TQL_STEP_LIMIT", default_value_t = tql_core::eval::DEFAULT_STEP_LIMIT, value_parser = clap::value_parser!(u64).range(1..))]
    pub step_limit: u64,
    /// Output format for result rows.
    #[arg(long, value_enum, default_value_t)]
    pub format: Format,
}

impl From<Args> for RunConfig {
    fn from(a: Args) -> Self {
        let query = match (a.query, a.eval) {
            (Some(path), _) => QuerySource::File(path),
            (None, Some(text)) => QuerySource::Inline(text),
            (None, None) => unreachable!("clap requires one query source"),
        };
        let mode = if a.oracle {
            Mode::OracleDiff
        } else if a.all {
            Mode::All
        } else {
            Mode::First
        };
        RunConfig {
            repo: a.repo,
            query,
            mode,
            choice: a.choice,
            emit_ir: a.emit_ir,
            trace: a.trace,
            step_limit: a.step_limit,
            format: a.format,
        }
    }
}

/// Renders a dataset with rows in canonical sorted order.
///
/// `Table` left-aligns text and right-aligns numbers under a header rule.
/// `Csv` quotes only where needed and reads back through
/// [`tql_core::parse_csv`] as long as every text column holds at least one
/// non-numeric cell, which is true of anything loaded from CSV.
pub fn render_dataset(d: &Dataset, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut w = csv::WriterBuilder::new()
                .terminator(csv::Terminator::Any(b'\n'))
                .from_writer(vec![]);
            w.write_record(d.attrs()).unwrap();
            for row in d.rows() {
                w.write_record(row.iter().map(|v| v.to_string())).unwrap();
            }
            String::from_utf8(w.into_inner().unwrap()).unwrap()
        }
        Format::Table => {
            let cells: Vec<Vec<String>> = d
                .rows()
                .iter()
                .map(|r| r.iter().map(|v| v.to_string()).collect())
                .collect();
            let widths: Vec<usize> = d
                .attrs()
                .iter()
                .enumerate()
                .map(|(i, a)| {
                    cells
                        .iter()
                        .map(|r| r[i].chars().count())
                        .chain([a.chars().count()])
                        .max()
                        .unwrap()
                })
                .collect();
            let line = |vals: &[String], out: &mut String| {
                let padded: Vec<String> = vals
                    .iter()
                    .zip(&widths)
                    .zip(d.kinds())
                    .map(|((v, &w), k)| match k {
                        ColumnKind::Number => format!("{v:>w$}"),
                        ColumnKind::Text => format!("{v:<w$}"),
                    })
                    .collect();
                writeln!(out, "{}", padded.join("  ").trim_end()).unwrap();
            };
            let mut out = String::new();
            line(d.attrs(), &mut out);
            let rule: Vec<String> = widths.iter().map(|&w| "-".repeat(w)).collect();
            writeln!(out, "{}", rule.join("  ")).unwrap();
            for r in &cells {
                line(r, &mut out);
            }
            out
        }
    }
}

/// `x ← people, y ← sales`.
pub fn assignment(vars: &[String], input: &CandidateInput) -> String {
    if vars.is_empty() {
        return "(no free variables)".to_owned();
    }
    vars.iter()
        .zip(input.names())
        .map(|(x, d)| format!("{x} ← {d}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// Where a static problem shows up in the query source.
fn locate(program: &Program, source: &str, diag: &Diagnostic) -> Span {
    let end = eof_span(source);
    let stmts = &program.stmts;
    let found = match diag {
        Diagnostic::NoReturn => None,
        Diagnostic::UseBeforeDefinition(x) => stmts.iter().find_map(|s| match &s.kind {
            StmtKind::Assign(_, e) | StmtKind::AssignTyped(_, _, e) | StmtKind::Return(e) => {
                find_var(e, x)
            }
            _ => None,
        }),
        Diagnostic::DuplicateDeclaration(x) => stmts
            .iter()
            .filter_map(|s| match &s.kind {
                StmtKind::Free(n) | StmtKind::FreeTyped(n, _) if n.text == *x => Some(n.span),
                _ => None,
            })
            .nth(1),
        Diagnostic::UnreachableAfterReturn => stmts
            .iter()
            .position(|s| matches!(s.kind, StmtKind::Return(_)))
            .and_then(|i| stmts.get(i + 1))
            .map(|s| s.span),
    };
    found.unwrap_or(end)
}

fn find_var(e: &Expr, x: &str) -> Option<Span> {
    find_expr(e, &|k| matches!(k, ExprKind::Var(n) if n.text == x))
}

fn find_lit(program: &Program, name: &str) -> Option<Span> {
    let is = |k: &ExprKind| matches!(k, ExprKind::Lit(n) if n.text == name);
    program.stmts.iter().find_map(|s| match &s.kind {
        StmtKind::Assign(_, e) | StmtKind::AssignTyped(_, _, e) | StmtKind::Return(e) => {
            find_expr(e, &is)
        }
        _ => None,
    })
}

fn find_expr(e: &Expr, hit: &dyn Fn(&ExprKind) -> bool) -> Option<Span> {
    if hit(&e.kind) {
        return Some(e.span);
    }
    match &e.kind {
        ExprKind::Var(_) | ExprKind::Lit(_) => None,
        ExprKind::Binary(_, l, r) => find_expr(l, hit).or_else(|| find_expr(r, hit)),
        ExprKind::Rename(x, ..) | ExprKind::Filter(x, _) | ExprKind::Project(x, _) => {
            find_expr(x, hit)
        }
    }
}

fn eof_span(source: &str) -> Span {
    let line = source.matches('\n').count() as u32 + 1;
    let column = source.rsplit('\n').next().unwrap_or("").chars().count() as u32 + 1;
    Span {
        start: source.len(),
        end: source.len(),
        line,
        column,
    }
}

/// Wraps a choice function to trace each proposed candidate's run.
struct Tracing {
    inner: Box<dyn ChoiceFunction>,
    evaluator: Evaluator,
    err: io::Stderr,
}

impl ChoiceFunction for Tracing {
    fn name(&self) -> &str {
        self.inner.name()
    }

    fn next_candidate(&mut self, dp: &DiscoveryProgram, fb: &Feedback) -> Option<CandidateInput> {
        let c = self.inner.next_candidate(dp, fb)?;
        let _ = writeln!(self.err, "candidate {c}");
        if let Ok(inputs) = dp.bind(&c) {
            let err = &mut self.err;
            let _ = self
                .evaluator
                .run_observed(dp.resolved(), &inputs, |conf, rules| {
                    let names: Vec<String> = rules.iter().map(|r| format!("{r:?}")).collect();
                    if names.is_empty() {
                        let _ = writeln!(err, "  {conf}");
                    } else {
                        let _ = writeln!(err, "  -> {conf}    [{}]", names.join(", "));
                    }
                });
        }
        Some(c)
    }
}

struct Driver<'a> {
    cfg: &'a RunConfig,
    origin: String,
    source: String,
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Driver<'_> {
    fn diag(&mut self, span: Span, message: impl std::fmt::Display) {
        let _ = writeln!(
            self.err,
            "{}:{}:{}: error: {message}",
            self.origin, span.line, span.column
        );
    }

    fn compile(&mut self) -> Result<(Program, IrStmt), u8> {
        match frontend::parse_program(&self.source) {
            Ok(p) => {
                let ir = frontend::translate(&p);
                Ok((p, ir))
            }
            Err(e) => {
                let msg = match &e {
                    frontend::FrontendError::Lex(_) => format!("lexical error: {}", e.message()),
                    frontend::FrontendError::Parse(_) => format!("syntax error: {}", e.message()),
                };
                self.diag(e.span(), msg);
                Err(EXIT_USAGE)
            }
        }
    }

    fn print_solution(
        &mut self,
        dp: &DiscoveryProgram,
        s: &Solution,
        first: bool,
    ) -> io::Result<()> {
        if !first {
            writeln!(self.out)?;
        }
        writeln!(self.out, "{}", assignment(dp.free_variables(), &s.input))?;
        write!(self.out, "{}", render_dataset(&s.output, self.cfg.format))
    }

    fn fault(&mut self, e: SolveError) -> u8 {
        let _ = writeln!(self.err, "{}: error: {e}", self.origin);
        EXIT_FAULT
    }

    fn run(&mut self) -> Result<u8, io::Error> {
        let (program, ir) = match self.compile() {
            Ok(v) => v,
            Err(code) => return Ok(code),
        };
        if self.cfg.emit_ir {
            writeln!(self.out, "{ir}")?;
            return Ok(EXIT_FOUND);
        }
        let Some(dir) = self.cfg.repo.clone() else {
            let _ = writeln!(self.err, "error: --repo is required");
            return Ok(EXIT_USAGE);
        };
        let repo = match load_repository(&dir) {
            Ok(r) => r,
            Err(LoadError::Files(files)) => {
                for (path, e) in files {
                    let col = e.column.unwrap_or(1);
                    let _ = writeln!(
                        self.err,
                        "{}:{}:{col}: error: {}",
                        path.display(),
                        e.line,
                        e.kind
                    );
                }
                return Ok(EXIT_USAGE);
            }
            Err(LoadError::Io { path, source }) => {
                let _ = writeln!(
                    self.err,
                    "{}: error: cannot read repository: {source}",
                    path.display()
                );
                return Ok(EXIT_USAGE);
            }
        };
        let dp = match DiscoveryProgram::new(ir, repo) {
            Ok(dp) => dp,
            Err(ProgramError::Invalid(diags)) => {
                for d in &diags {
                    let span = locate(&program, &self.source, d);
                    self.diag(span, d);
                }
                return Ok(EXIT_USAGE);
            }
            Err(ProgramError::UnknownDataset(e)) => {
                let span = find_lit(&program, &e.name).unwrap_or_else(|| eof_span(&self.source));
                self.diag(span, e);
                return Ok(EXIT_USAGE);
            }
        };

        let evaluator = Evaluator::new(self.cfg.step_limit);
        let solver = Solver::new(evaluator);
        let inner = solver::choice_function(&self.cfg.choice).expect("clap restricts choice names");
        let mut traced;
        let mut plain;
        let choice: &mut dyn ChoiceFunction = if self.cfg.trace {
            traced = Tracing {
                inner,
                evaluator,
                err: io::stderr(),
            };
            &mut traced
        } else {
            plain = inner;
            &mut *plain
        };

        if self.cfg.mode == Mode::First {
            return match solver.solve_with_stats(&dp, choice) {
                (Ok(SolveResult::Success(s)), _) => {
                    self.print_solution(&dp, &s, true)?;
                    Ok(EXIT_FOUND)
                }
                (Ok(SolveResult::Exhausted), stats) => {
                    let _ = writeln!(
                        self.err,
                        "{}: no input satisfies the query ({} candidates tried)",
                        self.origin, stats.evaluations
                    );
                    Ok(EXIT_EXHAUSTED)
                }
                (Err(e), _) => Ok(self.fault(e)),
            };
        }

        let mut found = DatasetSet::new();
        let mut printed = 0;
        let mut all = solver.solve_all(&dp, choice);
        for s in all.by_ref() {
            match s {
                Ok(s) => {
                    self.print_solution(&dp, &s, printed == 0)?;
                    printed += 1;
                    found.insert(s.output);
                }
                Err(e) => return Ok(self.fault(e)),
            }
        }
        let stats = all.stats();
        if self.cfg.mode == Mode::OracleDiff {
            let expected = match oracle::tcra_eval(&dp) {
                Ok(set) => set,
                Err(e @ OracleError::CeilingExceeded { .. }) => {
                    let _ = writeln!(self.err, "{}: error: {e}", self.origin);
                    return Ok(EXIT_USAGE);
                }
                Err(OracleError::Eval(e)) => {
                    let _ = writeln!(self.err, "{}: error: oracle failed: {e}", self.origin);
                    return Ok(EXIT_FAULT);
                }
            };
            let missing: Vec<_> = expected.difference(&found).collect();
            let extra: Vec<_> = found.difference(&expected).collect();
            writeln!(
                self.out,
                "oracle: {} solver results, {} oracle results, {} differences",
                found.len(),
                expected.len(),
                missing.len() + extra.len()
            )?;
            for d in &missing {
                let _ = writeln!(
                    self.err,
                    "oracle only:\n{}",
                    render_dataset(d, self.cfg.format)
                );
            }
            for d in &extra {
                let _ = writeln!(
                    self.err,
                    "solver only:\n{}",
                    render_dataset(d, self.cfg.format)
                );
            }
            if !missing.is_empty() || !extra.is_empty() {
                return Ok(EXIT_FAULT);
            }
        }
        if printed == 0 {
            let _ = writeln!(
                self.err,
                "{}: no input satisfies the query ({} candidates tried)",
                self.origin, stats.evaluations
            );
            return Ok(EXIT_EXHAUSTED);
        }
        Ok(EXIT_FOUND)
    }
}

/// Runs one invocation, writing results to `out` and diagnostics to `err`.
/// Returns the exit code.
pub fn run(cfg: &RunConfig, out: &mut dyn Write, err: &mut dyn Write) -> u8 {
    let (origin, source) = match &cfg.query {
        QuerySource::Inline(text) => ("<eval>".to_owned(), text.clone()),
        QuerySource::File(path) => match fs::read_to_string(path) {
            Ok(text) => (path.display().to_string(), text),
            Err(e) => {
                let _ = writeln!(err, "{}: error: cannot read query: {e}", path.display());
                return EXIT_USAGE;
            }
        },
    };
    let mut driver = Driver {
        cfg,
        origin,
        source,
        out,
        err,
    };
    match driver.run() {
        Ok(code) => code,
        // a closed stdout is not worth a diagnostic
        Err(e) if e.kind() == io::ErrorKind::BrokenPipe => EXIT_FOUND,
        Err(e) => {
            let _ = writeln!(driver.err, "error: {e}");
            EXIT_USAGE
        }
    }
}
