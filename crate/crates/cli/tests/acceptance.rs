//! Acceptance suite: one PASS/FAIL line per criterion. Exits non-zero if any
//! criterion fails.

use std::collections::BTreeSet;
use std::panic::{self, AssertUnwindSafe};
use std::path::PathBuf;
use std::process::{Command, ExitCode};
use std::sync::Arc;
use std::time::{Duration, Instant};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use tql_core::eval::{self, Evaluator, Outcome, Rule};
use tql_core::frontend::{self, pretty_print, EraseSpans};
use tql_core::imprat::{free_variables, RelExpr, Stmt};
use tql_core::oracle::{bigstep, tcra_eval, DatasetSet};
use tql_core::reference::gen::{self, Limits};
use tql_core::reference::naive;
use tql_core::relation::{CmpOp, Dataset, Predicate, TypeTest, Value};
use tql_core::solver::{
    Backtracking, CandidateInput, ChoiceFunction, DiscoveryProgram, Feedback, SolveResult, Solver,
};
use tql_core::Repository;

type Verdict = Result<String, String>;
type Criterion = (&'static str, fn() -> Verdict);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

// 1 ------------------------------------------------------------------------

fn rule_coverage() -> Verdict {
    let people = Arc::new(
        Dataset::from_rows(
            &["name", "age"],
            vec![
                vec![Value::text("ann"), Value::num(30.0)],
                vec![Value::text("bob"), Value::num(10.0)],
            ],
        )
        .unwrap(),
    );
    let skus = Arc::new(Dataset::from_rows(&["sku"], vec![vec![Value::text("k1")]]).unwrap());
    let x = || RelExpr::var("x");
    let age = |op, n: f64| Predicate::attr_cmp_val("age", op, Value::num(n));
    let has = |a: &str| TypeTest::HasAttributes(vec![a.to_owned()]);
    let ret = Stmt::ret;

    // (rule, statements after `!x; !q`, expected success)
    let fixtures: Vec<(Rule, Vec<Stmt>, bool)> = vec![
        (Rule::Var, vec![ret(x())], true),
        (Rule::UnionOk, vec![ret(RelExpr::union(x(), x()))], true),
        (
            Rule::UnionNull,
            vec![ret(RelExpr::union(x(), RelExpr::var("q")))],
            false,
        ),
        (
            Rule::DifferenceOk,
            vec![ret(RelExpr::difference(
                x(),
                RelExpr::select(age(CmpOp::Gt, 20.0), x()),
            ))],
            true,
        ),
        (
            Rule::DifferenceNull,
            vec![ret(RelExpr::difference(x(), RelExpr::var("q")))],
            false,
        ),
        (
            Rule::ProductOk,
            vec![ret(RelExpr::product(x(), RelExpr::var("q")))],
            true,
        ),
        (
            Rule::ExistsOk,
            vec![ret(RelExpr::test(
                x(),
                vec![TypeTest::Exists(age(CmpOp::Gt, 20.0))],
            ))],
            true,
        ),
        (
            Rule::ExistsNull,
            vec![ret(RelExpr::test(
                x(),
                vec![TypeTest::Exists(age(CmpOp::Gt, 99.0))],
            ))],
            false,
        ),
        (
            Rule::ForallOk,
            vec![ret(RelExpr::test(
                x(),
                vec![TypeTest::Forall(age(CmpOp::Gt, 0.0))],
            ))],
            true,
        ),
        (
            Rule::ForallNull,
            vec![ret(RelExpr::test(
                x(),
                vec![TypeTest::Forall(age(CmpOp::Gt, 20.0))],
            ))],
            false,
        ),
        (
            Rule::AttrsOk,
            vec![ret(RelExpr::test(x(), vec![has("age")]))],
            true,
        ),
        (
            Rule::AttrsNull,
            vec![ret(RelExpr::test(x(), vec![has("zip")]))],
            false,
        ),
        (
            Rule::ProjectOk,
            vec![ret(RelExpr::project(["name"], x()))],
            true,
        ),
        (
            Rule::ProjectNull,
            vec![ret(RelExpr::project(["zip"], x()))],
            false,
        ),
        (
            Rule::SelectOk,
            vec![ret(RelExpr::select(age(CmpOp::Lt, 18.0), x()))],
            true,
        ),
        (
            Rule::SelectNull,
            vec![ret(RelExpr::select(age(CmpOp::Gt, 99.0), x()))],
            false,
        ),
        (
            Rule::RenameTargetExists,
            vec![ret(RelExpr::rename("name", "age", x()))],
            false,
        ),
        (
            Rule::RenameSourceMissing,
            vec![ret(RelExpr::rename("zip", "code", x()))],
            false,
        ),
        (
            Rule::RenameOk,
            vec![ret(RelExpr::rename("name", "who", x()))],
            true,
        ),
        (
            Rule::TestChainOk,
            vec![ret(RelExpr::test(
                x(),
                vec![has("age"), TypeTest::Forall(age(CmpOp::Ge, 10.0))],
            ))],
            true,
        ),
        (
            Rule::TestChainNull,
            vec![ret(RelExpr::test(x(), vec![has("zip"), has("age")]))],
            false,
        ),
        (Rule::Declare, vec![ret(x())], true),
        (
            Rule::AssignValue,
            vec![Stmt::assign("y", x()), ret(RelExpr::var("y"))],
            true,
        ),
        (
            Rule::AssignNull,
            vec![
                Stmt::assign("y", RelExpr::project(["zip"], x())),
                ret(RelExpr::var("y")),
            ],
            false,
        ),
        (Rule::SeqTop, vec![Stmt::Top, ret(x())], true),
        (Rule::SeqBottom, vec![Stmt::Bottom, ret(x())], false),
        (Rule::SeqReturn, vec![ret(x()), Stmt::Bottom], true),
        (Rule::ReturnNull, vec![ret(RelExpr::Null)], false),
        (Rule::ReturnStep, vec![ret(RelExpr::union(x(), x()))], true),
        (
            Rule::AssignStep,
            vec![
                Stmt::assign("y", RelExpr::union(x(), x())),
                ret(RelExpr::var("y")),
            ],
            true,
        ),
        (
            Rule::SeqStep,
            vec![Stmt::assign("y", x()), ret(RelExpr::var("y"))],
            true,
        ),
    ];

    let evaluator = Evaluator::default();
    let inputs = [Arc::clone(&people), skus];
    let mut covered = BTreeSet::new();
    let mut slowest = Duration::ZERO;
    let (mut ok, mut failed) = (0, 0);
    for (rule, body, succeeds) in fixtures {
        let s = Stmt::seq(
            [Stmt::declare("x"), Stmt::declare("q")]
                .into_iter()
                .chain(body),
        );
        let mut fired = BTreeSet::new();
        let start = Instant::now();
        let run = evaluator
            .run_observed(&s, &inputs, |_, rules| fired.extend(rules.iter().copied()))
            .map_err(|e| format!("{rule:?}: {e}"))?;
        slowest = slowest.max(start.elapsed());
        ensure(fired.contains(&rule), || {
            format!("{rule:?} not fired by {s}")
        })?;
        ensure(
            matches!(run.outcome, Outcome::Success(_)) == succeeds,
            || format!("{rule:?}: unexpected {:?} for {s}", run.outcome),
        )?;
        if succeeds {
            ok += 1;
        } else {
            failed += 1;
        }
        covered.extend(fired);
    }
    let missing: Vec<_> = Rule::CORE
        .iter()
        .filter(|r| !covered.contains(r))
        .collect();
    ensure(missing.is_empty(), || {
        format!("rules never fired: {missing:?}")
    })?;
    ensure(slowest < Duration::from_millis(50), || {
        format!("slowest fixture took {slowest:?}")
    })?;
    Ok(format!(
        "{}/{} rules fired; {ok} success and {failed} failure fixtures; slowest {:.3} ms",
        Rule::CORE.len(),
        Rule::CORE.len(),
        slowest.as_secs_f64() * 1e3
    ))
}

// 2 ------------------------------------------------------------------------

fn small_step_big_step() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0002);
    let limits = Limits::default();
    let mut outcomes = [0usize; 2];
    for i in 0..1000 {
        let repo = gen::repository(&mut rng, &limits);
        let s = gen::resolve(&gen::program(&mut rng, &repo, &limits), &repo);
        ensure(s.flatten().len() <= 6 && repo.len() <= 4, || {
            format!("program {i} over the size bounds")
        })?;
        let inputs = gen::inputs(&mut rng, &repo, free_variables(&s).unwrap().len());
        let small = eval::run(&s, &inputs).map_err(|e| format!("program {i}: {e}"))?;
        let big = bigstep::run(&s, &inputs).map_err(|e| format!("program {i}: {e}"))?;
        ensure(small == big, || format!("program {i} disagrees: {s}"))?;
        outcomes[usize::from(matches!(small, Outcome::Success(_)))] += 1;
    }
    Ok(format!(
        "1000 programs, 0 disagreements ({} succeed, {} fail)",
        outcomes[1], outcomes[0]
    ))
}

// 3 ------------------------------------------------------------------------

fn closed_programs() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0003);
    let limits = Limits::default();
    let mut singletons = 0;
    for i in 0..500 {
        let repo = gen::repository(&mut rng, &limits);
        let dp =
            DiscoveryProgram::new(gen::closed_program(&mut rng, &repo, &limits), repo).unwrap();
        let out = tcra_eval(&dp).map_err(|e| e.to_string())?;
        ensure(out.len() <= 1, || {
            format!("program {i}: {} outputs", out.len())
        })?;
        let direct = naive::run(dp.resolved(), &[]).map(|t| t.canonical());
        let got = out.iter().next().map(|d| d.structural_key());
        ensure(got == direct, || {
            format!(
                "program {i} differs from direct evaluation: {}",
                dp.program()
            )
        })?;
        singletons += out.len();
    }
    Ok(format!(
        "500 closed programs, 0 violations ({singletons} with one output)"
    ))
}

// 4 ------------------------------------------------------------------------

fn solver_vs_oracle() -> Verdict {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0004);
    let limits = Limits {
        max_free: 3,
        ..Limits::default()
    };
    let solver = Solver::default();
    let (mut witnesses, mut max_arity) = (0, 0);
    for i in 0..1000 {
        let repo = gen::repository(&mut rng, &limits);
        let dp = DiscoveryProgram::new(gen::program(&mut rng, &repo, &limits), repo).unwrap();
        ensure(dp.repo().len() <= 4 && dp.arity() <= 3, || {
            format!("fixture {i} over the size bounds")
        })?;
        max_arity = max_arity.max(dp.arity());
        let mut choice = Backtracking::new();
        let mut found = DatasetSet::new();
        for sol in solver.solve_all(&dp, &mut choice) {
            let sol = sol.map_err(|e| format!("fixture {i}: {e}"))?;
            let again = bigstep::run(dp.resolved(), &dp.bind(&sol.input).unwrap()).unwrap();
            ensure(again == Outcome::Success(Arc::clone(&sol.output)), || {
                format!("fixture {i}: witness {} does not re-run", sol.input)
            })?;
            witnesses += 1;
            found.insert(sol.output);
        }
        let expected = tcra_eval(&dp).map_err(|e| e.to_string())?;
        ensure(found == expected, || {
            format!("fixture {i}: solver {found} vs oracle {expected}")
        })?;
    }
    let elapsed = start.elapsed();
    ensure(elapsed < Duration::from_secs(10), || {
        format!("took {elapsed:?}")
    })?;
    Ok(format!(
        "1000 fixtures (arity up to {max_arity}), {witnesses} witnesses re-run, {:.2} s",
        elapsed.as_secs_f64()
    ))
}

// 5 ------------------------------------------------------------------------

struct Recording(Backtracking, Vec<CandidateInput>);

impl ChoiceFunction for Recording {
    fn name(&self) -> &str {
        "recording"
    }

    fn next_candidate(&mut self, dp: &DiscoveryProgram, fb: &Feedback) -> Option<CandidateInput> {
        let c = self.0.next_candidate(dp, fb)?;
        self.1.push(c.clone());
        Some(c)
    }
}

fn enumeration_order() -> Verdict {
    let one = |v: f64| Dataset::from_rows(&["n"], vec![vec![Value::num(v)]]).unwrap();
    let repo = Repository::from_datasets([("A", one(1.0)), ("B", one(2.0))]);
    // unsatisfiable: no dataset has a `zip` attribute
    let s = frontend::compile("x; y; return x['zip'] + y").unwrap();
    let dp = DiscoveryProgram::new(s, repo).unwrap();
    let mut rec = Recording(Backtracking::new(), vec![]);
    let (result, stats) = Solver::default().solve_with_stats(&dp, &mut rec);
    let order: Vec<String> = rec.1.iter().map(|c| c.to_string()).collect();
    ensure(order == ["(A, A)", "(A, B)", "(B, A)", "(B, B)"], || {
        format!("order {order:?}")
    })?;
    ensure(
        matches!(result, Ok(SolveResult::Exhausted)) && stats.evaluations == 4,
        || format!("{result:?} after {} evaluations", stats.evaluations),
    )?;

    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0005);
    let limits = Limits {
        max_free: 3,
        ..Limits::default()
    };
    let mut unsat = 0;
    for _ in 0..1000 {
        let repo = gen::repository(&mut rng, &limits);
        let dp = DiscoveryProgram::new(gen::program(&mut rng, &repo, &limits), repo).unwrap();
        let (result, stats) = Solver::default().solve_with_stats(&dp, &mut Backtracking::new());
        if let Ok(SolveResult::Exhausted) = result {
            unsat += 1;
            let bound = (dp.repo().len() as u64).pow(dp.arity() as u32);
            ensure(stats.evaluations <= bound, || {
                format!("{} evaluations over bound {bound}", stats.evaluations)
            })?;
        }
    }
    Ok(format!(
        "order {}; {unsat} unsatisfiable fixtures within |repo|^arity",
        order.join(" ")
    ))
}

// 6 ------------------------------------------------------------------------

const GOLDENS: &[(&str, &str)] = &[
    // sequencing
    ("x; y; return x", "!x; !y; ret x"),
    // free variable
    ("x; return x", "!x; ret x"),
    // typed free variable
    (
        "t:{/\\('age' > 0)}; return t",
        "!t; t := t{forall(age > 0)}; ret t",
    ),
    // assignment
    ("x = \"d\"; return x", "x := \"d\"; ret x"),
    // typed assignment
    (
        "x:{['a']} = \"d\"; return x",
        "x := \"d\"; x := x{a}; ret x",
    ),
    // return
    ("return \"d\"", "ret \"d\""),
    // binary operators
    ("return \"a\" + \"b\"", "ret (\"a\" union \"b\")"),
    ("return \"a\" - \"b\"", "ret (\"a\" minus \"b\")"),
    ("return \"a\" * \"b\"", "ret (\"a\" times \"b\")"),
    (
        "return \"a\" - \"b\" * \"c\"",
        "ret (\"a\" minus (\"b\" times \"c\"))",
    ),
    // rename
    (
        "x = \"d\"['a'->'b']; return x",
        "x := rho[a/b](\"d\"); ret x",
    ),
    // selection
    ("return \"d\"['age' >= 18]", "ret sigma[age >= 18](\"d\")"),
    // projection
    ("return \"d\"['a'; 'b']", "ret pi[a, b](\"d\")"),
    // property lists
    ("t:{['a']; ['b']}; return t", "!t; t := t{a, b}; ret t"),
    // exists
    (
        "t:{\\/('a' == 'b')}; return t",
        "!t; t := t{exists(a == b)}; ret t",
    ),
    // forall
    (
        "t:{/\\('a' != 2)}; return t",
        "!t; t := t{forall(a != 2)}; ret t",
    ),
    // attribute property
    ("t:{['age']}; return t", "!t; t := t{age}; ret t"),
    // predicates
    (
        "return \"d\"[!('a' > 1 && 'b' <= 'c') || 'a' < -2]",
        "ret sigma[(!((a > 1 && b <= c)) || a < -2)](\"d\")",
    ),
];

fn translation_goldens() -> Verdict {
    for (src, want) in GOLDENS {
        let got = frontend::compile(src)
            .map_err(|e| format!("{src:?}: {e}"))?
            .to_string();
        ensure(got == *want, || {
            format!("{src:?} printed {got:?}, expected {want:?}")
        })?;
    }
    Ok(format!("{} goldens byte-exact", GOLDENS.len()))
}

// 7 ------------------------------------------------------------------------

const ERROR_SPANS: &[(&str, (u32, u32))] = &[
    ("return", (1, 7)),
    ("x = ;", (1, 5)),
    ("x y", (1, 3)),
    ("t:{}", (1, 4)),
    ("return x[]", (1, 10)),
    ("return x['a' 'b']", (1, 14)),
    ("x;;", (1, 3)),
    ("return x['a' > ]", (1, 16)),
    ("x = \"a\";\nreturn (x", (2, 10)),
    ("x = \"a\"\nreturn x", (2, 1)),
    ("x = 'a", (1, 5)),
    ("x;\n  return x # y", (2, 12)),
    ("return \"d\"['a' > 1e999]", (1, 18)),
    ("-- comment only\nx = \"unterminated", (2, 5)),
];

fn frontend_round_trip() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(0xACCE_0007);
    for i in 0..1000 {
        let ast = gen::tql_program(&mut rng);
        let text = pretty_print(&ast);
        let back = frontend::parse_program(&text).map_err(|e| format!("ast {i}: {e}\n{text}"))?;
        ensure(back.without_spans() == ast, || {
            format!("ast {i} changed:\n{text}")
        })?;
    }
    for (src, want) in ERROR_SPANS {
        let err = match frontend::parse_program(src) {
            Ok(_) => return Err(format!("{src:?} parsed")),
            Err(e) => e,
        };
        let got = (err.span().line, err.span().column);
        ensure(got == *want, || {
            format!("{src:?}: error at {got:?}, expected {want:?} ({err})")
        })?;
    }
    Ok(format!(
        "1000 round trips; {} error fixtures at the right line:column",
        ERROR_SPANS.len()
    ))
}

// 8 ------------------------------------------------------------------------

fn end_to_end() -> Verdict {
    let fixtures = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures");
    let repo = fixtures.join("repo");
    let csvs = std::fs::read_dir(&repo)
        .unwrap()
        .filter(|e| {
            e.as_ref()
                .unwrap()
                .path()
                .extension()
                .is_some_and(|x| x == "csv")
        })
        .count();
    ensure(csvs == 3, || {
        format!("{csvs} CSV files in the fixture repository")
    })?;
    let query = "t:{['age']; /\\('age' >= 18)}; return t";
    let tql = |extra: &[&str]| {
        let out = Command::new(env!("CARGO_BIN_EXE_tql"))
            .arg("--repo")
            .arg(&repo)
            .args(["--eval", query, "--format", "csv"])
            .args(extra)
            .output()
            .unwrap();
        (
            out.status.code(),
            String::from_utf8(out.stdout).unwrap(),
            String::from_utf8(out.stderr).unwrap(),
        )
    };

    let (code, out, err) = tql(&[]);
    let adults = "t ← adults\nname,age\nAda,36\nGrace,45\nLinus,21\n";
    ensure(code == Some(0) && out == adults, || {
        format!("exit {code:?}\n{out}{err}")
    })?;

    let (code, out, err) = tql(&["--all"]);
    ensure(code == Some(0) && out == adults, || {
        format!("--all is not unique: exit {code:?}\n{out}{err}")
    })?;

    let (code, out, err) = tql(&["--oracle"]);
    let summary = "oracle: 1 solver results, 1 oracle results, 0 differences";
    ensure(
        code == Some(0) && out.ends_with(&format!("{summary}\n")),
        || format!("exit {code:?}\n{out}{err}"),
    )?;

    let (code, out, _) = {
        let out = Command::new(env!("CARGO_BIN_EXE_tql"))
            .arg("--repo")
            .arg(&repo)
            .arg("--query")
            .arg(fixtures.join("adults.tql"))
            .output()
            .unwrap();
        (
            out.status.code(),
            String::from_utf8(out.stdout).unwrap(),
            (),
        )
    };
    ensure(code == Some(0) && out.starts_with("t ← adults\n"), || {
        format!("query file: exit {code:?}\n{out}")
    })?;
    Ok(format!("exit 0, unique result t ← adults, {summary}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 8] = [
        ("semantics rule coverage", rule_coverage),
        ("small-step/big-step agreement", small_step_big_step),
        (
            "relational completeness on closed programs",
            closed_programs,
        ),
        ("solver soundness and completeness", solver_vs_oracle),
        ("enumeration order and bound", enumeration_order),
        ("translation goldens", translation_goldens),
        ("frontend round trip and error spans", frontend_round_trip),
        ("end-to-end CLI scenario", end_to_end),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let verdict = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        match verdict {
            Ok(detail) => println!("PASS {} {name}: {detail}", i + 1),
            Err(why) => {
                failures += 1;
                println!("FAIL {} {name}: {why}", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
