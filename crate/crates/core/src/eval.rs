//! Small-step evaluator for ImpRAT.
//!
//! A [`Configuration`] pairs a statement with an environment; [`step`] fires
//! exactly one reduction rule. Relational sub-expressions reduce
//! left-operand first, and an operand that reduces to ⊥ makes the enclosing
//! expression ⊥ on the next step.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

use crate::imprat::{free_variables, Environment, RelExpr, Stmt, ValidationError};
use crate::relation::{self, Dataset, Null, TypeTest};

pub const DEFAULT_STEP_LIMIT: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Configuration {
    pub stmt: Stmt,
    pub env: Environment,
}

impl Configuration {
    pub fn new(stmt: Stmt, env: Environment) -> Self {
        Configuration { stmt, env }
    }

    pub fn is_terminal(&self) -> bool {
        self.stmt.is_terminal()
    }
}

impl fmt::Display for Configuration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{}, {}>", self.stmt, self.env)
    }
}

/// How a run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Outcome {
    /// Terminal `ret D`.
    Success(Arc<Dataset>),
    /// Terminal ⊥.
    Failure,
    /// Terminal ⊤: the program finished without returning.
    CompletedWithoutReturn,
}

impl Outcome {
    pub fn dataset(&self) -> Option<&Arc<Dataset>> {
        match self {
            Outcome::Success(d) => Some(d),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("variable `{0}` is unbound")]
    UnboundVariable(String),
    #[error("dataset literal \"{0}\" was not resolved before evaluation")]
    UnresolvedLiteral(String),
    #[error("no rule applies: {0}")]
    Stuck(String),
    #[error("evaluation exceeded the step limit of {0}")]
    StepLimit(u64),
    #[error("program takes {expected} inputs but {found} were supplied")]
    ArityMismatch { expected: usize, found: usize },
    #[error(transparent)]
    Invalid(#[from] ValidationError),
}

/// The reduction rules. Every rule of the ImpRAT semantics has a
/// variant; the last three cover the operand plumbing those rules leave
/// implicit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Rule {
    // relational expressions
    Var,
    UnionOk,
    UnionNull,
    DifferenceOk,
    DifferenceNull,
    ProductOk,
    ExistsOk,
    ExistsNull,
    ForallOk,
    ForallNull,
    AttrsOk,
    AttrsNull,
    ProjectOk,
    ProjectNull,
    SelectOk,
    SelectNull,
    RenameTargetExists,
    RenameSourceMissing,
    RenameOk,
    TestChainOk,
    TestChainNull,
    // statements
    Declare,
    AssignValue,
    AssignNull,
    SeqTop,
    SeqBottom,
    SeqReturn,
    ReturnNull,
    ReturnStep,
    AssignStep,
    SeqStep,
    // implicit
    ProductNull,
    Congruence,
    NullOperand,
}

impl Rule {
    /// The rules of the semantics proper, without the implicit three.
    pub const CORE: [Rule; 31] = [
        Rule::Var,
        Rule::UnionOk,
        Rule::UnionNull,
        Rule::DifferenceOk,
        Rule::DifferenceNull,
        Rule::ProductOk,
        Rule::ExistsOk,
        Rule::ExistsNull,
        Rule::ForallOk,
        Rule::ForallNull,
        Rule::AttrsOk,
        Rule::AttrsNull,
        Rule::ProjectOk,
        Rule::ProjectNull,
        Rule::SelectOk,
        Rule::SelectNull,
        Rule::RenameTargetExists,
        Rule::RenameSourceMissing,
        Rule::RenameOk,
        Rule::TestChainOk,
        Rule::TestChainNull,
        Rule::Declare,
        Rule::AssignValue,
        Rule::AssignNull,
        Rule::SeqTop,
        Rule::SeqBottom,
        Rule::SeqReturn,
        Rule::ReturnNull,
        Rule::ReturnStep,
        Rule::AssignStep,
        Rule::SeqStep,
    ];
}

/// Rules used by one step, outermost first. The last entry is the axiom
/// that did the work.
pub type Derivation = Vec<Rule>;

/// One reduction of a relational expression.
pub fn step_rel(r: RelExpr, env: &Environment) -> Result<RelExpr, EvalError> {
    let mut derivation = Vec::new();
    step_rel_with(r, env, &mut derivation)
}

/// Like [`step_rel`], recording the rules that fired.
pub fn step_rel_with(
    r: RelExpr,
    env: &Environment,
    rules: &mut Derivation,
) -> Result<RelExpr, EvalError> {
    match r {
        RelExpr::Var(x) => {
            rules.push(Rule::Var);
            env.get(&x)
                .cloned()
                .map(RelExpr::Resolved)
                .ok_or(EvalError::UnboundVariable(x))
        }
        RelExpr::Literal(name) => Err(EvalError::UnresolvedLiteral(name)),
        RelExpr::Null | RelExpr::Resolved(_) => {
            Err(EvalError::Stuck(format!("`{r}` is already a value")))
        }
        RelExpr::Union(l, r) => step_binary(*l, *r, env, rules, RelExpr::Union, |a, b| {
            tag(relation::union(a, b), Rule::UnionOk, Rule::UnionNull)
        }),
        RelExpr::Difference(l, r) => {
            step_binary(*l, *r, env, rules, RelExpr::Difference, |a, b| {
                tag(
                    relation::difference(a, b),
                    Rule::DifferenceOk,
                    Rule::DifferenceNull,
                )
            })
        }
        RelExpr::Product(l, r) => step_binary(*l, *r, env, rules, RelExpr::Product, |a, b| {
            tag(relation::product(a, b), Rule::ProductOk, Rule::ProductNull)
        }),
        RelExpr::Project(attrs, e) => match *e {
            RelExpr::Resolved(d) => {
                let premise = TypeTest::HasAttributes(attrs.clone());
                if relation::check(&d, &premise).is_err() {
                    rules.push(Rule::ProjectNull);
                    return Ok(RelExpr::Null);
                }
                rules.push(Rule::ProjectOk);
                Ok(value(relation::project(&d, &attrs)))
            }
            e => step_operand(e, env, rules, |e| RelExpr::Project(attrs, e)),
        },
        RelExpr::Select(phi, e) => match *e {
            RelExpr::Resolved(d) => {
                if relation::check(&d, &TypeTest::Exists(phi.clone())).is_err() {
                    rules.push(Rule::SelectNull);
                    return Ok(RelExpr::Null);
                }
                rules.push(Rule::SelectOk);
                Ok(value(relation::select(&d, &phi)))
            }
            e => step_operand(e, env, rules, |e| RelExpr::Select(phi, e)),
        },
        RelExpr::Rename { from, to, expr } => match *expr {
            RelExpr::Resolved(d) => {
                if relation::check(&d, &TypeTest::has(to.as_str())).is_ok() {
                    rules.push(Rule::RenameTargetExists);
                    return Ok(RelExpr::Null);
                }
                if relation::check(&d, &TypeTest::has(from.as_str())).is_err() {
                    rules.push(Rule::RenameSourceMissing);
                    return Ok(RelExpr::Null);
                }
                rules.push(Rule::RenameOk);
                Ok(value(relation::rename(&d, &from, &to)))
            }
            e => step_operand(e, env, rules, |e| RelExpr::Rename { from, to, expr: e }),
        },
        RelExpr::Test(e, mut tests) => match *e {
            RelExpr::Resolved(d) => {
                if tests.is_empty() {
                    return Err(EvalError::Stuck("test with no types".into()));
                }
                let passed = relation::check(&d, &tests[0]).is_ok();
                if tests.len() == 1 {
                    rules.push(single_test_rule(&tests[0], passed));
                    Ok(if passed {
                        RelExpr::Resolved(d)
                    } else {
                        RelExpr::Null
                    })
                } else if passed {
                    rules.push(Rule::TestChainOk);
                    tests.remove(0);
                    Ok(RelExpr::Test(Box::new(RelExpr::Resolved(d)), tests))
                } else {
                    rules.push(Rule::TestChainNull);
                    Ok(RelExpr::Null)
                }
            }
            e => step_operand(e, env, rules, |e| RelExpr::Test(e, tests)),
        },
    }
}

fn single_test_rule(t: &TypeTest, passed: bool) -> Rule {
    match (t, passed) {
        (TypeTest::HasAttributes(_), true) => Rule::AttrsOk,
        (TypeTest::HasAttributes(_), false) => Rule::AttrsNull,
        (TypeTest::Exists(_), true) => Rule::ExistsOk,
        (TypeTest::Exists(_), false) => Rule::ExistsNull,
        (TypeTest::Forall(_), true) => Rule::ForallOk,
        (TypeTest::Forall(_), false) => Rule::ForallNull,
    }
}

fn tag(r: Result<Dataset, Null>, ok: Rule, null: Rule) -> (RelExpr, Rule) {
    match r {
        Ok(d) => (RelExpr::resolved(d), ok),
        Err(_) => (RelExpr::Null, null),
    }
}

fn value(r: Result<Dataset, Null>) -> RelExpr {
    match r {
        Ok(d) => RelExpr::resolved(d),
        Err(_) => RelExpr::Null,
    }
}

/// Reduces the operand of a unary form, or collapses to ⊥ when the operand
/// already is ⊥.
fn step_operand(
    e: RelExpr,
    env: &Environment,
    rules: &mut Derivation,
    rebuild: impl FnOnce(Box<RelExpr>) -> RelExpr,
) -> Result<RelExpr, EvalError> {
    if let RelExpr::Null = e {
        rules.push(Rule::NullOperand);
        return Ok(RelExpr::Null);
    }
    rules.push(Rule::Congruence);
    Ok(rebuild(Box::new(step_rel_with(e, env, rules)?)))
}

fn step_binary(
    l: RelExpr,
    r: RelExpr,
    env: &Environment,
    rules: &mut Derivation,
    rebuild: fn(Box<RelExpr>, Box<RelExpr>) -> RelExpr,
    apply: impl FnOnce(&Dataset, &Dataset) -> (RelExpr, Rule),
) -> Result<RelExpr, EvalError> {
    match (l, r) {
        (RelExpr::Null, _) | (RelExpr::Resolved(_), RelExpr::Null) => {
            rules.push(Rule::NullOperand);
            Ok(RelExpr::Null)
        }
        (RelExpr::Resolved(a), RelExpr::Resolved(b)) => {
            let (out, rule) = apply(&a, &b);
            rules.push(rule);
            Ok(out)
        }
        (l @ RelExpr::Resolved(_), r) => {
            rules.push(Rule::Congruence);
            let r = step_rel_with(r, env, rules)?;
            Ok(rebuild(Box::new(l), Box::new(r)))
        }
        (l, r) => {
            rules.push(Rule::Congruence);
            let l = step_rel_with(l, env, rules)?;
            Ok(rebuild(Box::new(l), Box::new(r)))
        }
    }
}

/// One reduction of a configuration.
pub fn step(c: Configuration) -> Result<Configuration, EvalError> {
    let mut rules = Vec::new();
    step_with(c, &mut rules)
}

/// Like [`step`], recording the rules that fired.
pub fn step_with(c: Configuration, rules: &mut Derivation) -> Result<Configuration, EvalError> {
    let Configuration { stmt, mut env } = c;
    let stmt = match stmt {
        Stmt::Top | Stmt::Bottom | Stmt::Return(RelExpr::Resolved(_)) => {
            return Err(EvalError::Stuck(format!("`{stmt}` is terminal")));
        }
        Stmt::Declare(_) => {
            rules.push(Rule::Declare);
            Stmt::Top
        }
        Stmt::Assign(x, RelExpr::Resolved(d)) => {
            rules.push(Rule::AssignValue);
            env.bind(x, d);
            Stmt::Top
        }
        Stmt::Assign(_, RelExpr::Null) => {
            rules.push(Rule::AssignNull);
            Stmt::Bottom
        }
        Stmt::Assign(x, e) => {
            rules.push(Rule::AssignStep);
            Stmt::Assign(x, step_rel_with(e, &env, rules)?)
        }
        Stmt::Return(RelExpr::Null) => {
            rules.push(Rule::ReturnNull);
            Stmt::Bottom
        }
        Stmt::Return(e) => {
            rules.push(Rule::ReturnStep);
            Stmt::Return(step_rel_with(e, &env, rules)?)
        }
        Stmt::Seq(first, rest) => match *first {
            Stmt::Top => {
                rules.push(Rule::SeqTop);
                *rest
            }
            Stmt::Bottom => {
                rules.push(Rule::SeqBottom);
                Stmt::Bottom
            }
            ret @ Stmt::Return(RelExpr::Resolved(_)) => {
                rules.push(Rule::SeqReturn);
                ret
            }
            first => {
                rules.push(Rule::SeqStep);
                let next = step_with(Configuration::new(first, env), rules)?;
                env = next.env;
                Stmt::Seq(Box::new(next.stmt), rest)
            }
        },
    };
    Ok(Configuration::new(stmt, env))
}

/// Result of a complete run.
#[derive(Debug, Clone, PartialEq)]
pub struct Run {
    pub outcome: Outcome,
    pub steps: u64,
}

/// Drives configurations to a terminal state.
#[derive(Debug, Clone, Copy)]
pub struct Evaluator {
    step_limit: u64,
}

impl Default for Evaluator {
    fn default() -> Self {
        Evaluator {
            step_limit: DEFAULT_STEP_LIMIT,
        }
    }
}

impl Evaluator {
    pub fn new(step_limit: u64) -> Self {
        Evaluator { step_limit }
    }

    pub fn step_limit(&self) -> u64 {
        self.step_limit
    }

    /// Binds the i-th free variable of `s` to `inputs[i]` and runs to a
    /// terminal configuration.
    pub fn run(&self, s: &Stmt, inputs: &[Arc<Dataset>]) -> Result<Outcome, EvalError> {
        self.run_observed(s, inputs, |_, _| {}).map(|r| r.outcome)
    }

    /// Runs while reporting every configuration to `observe`: first the
    /// initial one with no rules, then each successor with its derivation.
    pub fn run_observed(
        &self,
        s: &Stmt,
        inputs: &[Arc<Dataset>],
        mut observe: impl FnMut(&Configuration, &[Rule]),
    ) -> Result<Run, EvalError> {
        let vars = free_variables(s)?;
        if vars.len() != inputs.len() {
            return Err(EvalError::ArityMismatch {
                expected: vars.len(),
                found: inputs.len(),
            });
        }
        let mut env = Environment::new();
        for (x, d) in vars.into_iter().zip(inputs) {
            env.bind(x, Arc::clone(d));
        }
        let mut config = Configuration::new(s.clone(), env);
        observe(&config, &[]);
        let mut steps = 0u64;
        let mut rules = Vec::new();
        while !config.is_terminal() {
            if steps >= self.step_limit {
                return Err(EvalError::StepLimit(self.step_limit));
            }
            rules.clear();
            config = step_with(config, &mut rules)?;
            steps += 1;
            observe(&config, &rules);
        }
        let outcome = match config.stmt {
            Stmt::Return(RelExpr::Resolved(d)) => Outcome::Success(d),
            Stmt::Bottom => Outcome::Failure,
            Stmt::Top => Outcome::CompletedWithoutReturn,
            _ => unreachable!("loop exits on terminal configurations"),
        };
        Ok(Run { outcome, steps })
    }
}

/// [`Evaluator::run`] with the default step limit.
pub fn run(s: &Stmt, inputs: &[Arc<Dataset>]) -> Result<Outcome, EvalError> {
    Evaluator::default().run(s, inputs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::relation::{CmpOp, Predicate, Value};

    fn n(x: f64) -> Value {
        Value::num(x)
    }

    fn ages(values: &[f64]) -> Arc<Dataset> {
        Arc::new(
            Dataset::from_rows(&["age"], values.iter().map(|&v| vec![n(v)]).collect()).unwrap(),
        )
    }

    fn people() -> Arc<Dataset> {
        Arc::new(
            Dataset::from_rows(
                &["name", "age"],
                vec![
                    vec![Value::text("ann"), n(30.0)],
                    vec![Value::text("bob"), n(17.0)],
                ],
            )
            .unwrap(),
        )
    }

    fn res(d: &Arc<Dataset>) -> RelExpr {
        RelExpr::Resolved(Arc::clone(d))
    }

    fn gt(attr: &str, v: f64) -> Predicate {
        Predicate::attr_cmp_val(attr, CmpOp::Gt, n(v))
    }

    /// One relational step, returning the result and the axiom that fired.
    fn rel(e: RelExpr, env: &Environment) -> (RelExpr, Rule) {
        let mut rules = Vec::new();
        let out = step_rel_with(e, env, &mut rules).unwrap();
        (out, *rules.last().unwrap())
    }

    fn stmt(s: Stmt, env: Environment) -> (Configuration, Vec<Rule>) {
        let mut rules = Vec::new();
        let out = step_with(Configuration::new(s, env), &mut rules).unwrap();
        (out, rules)
    }

    #[test]
    fn var_lookup() {
        let mut env = Environment::new();
        env.bind("x", ages(&[1.0]));
        let (out, rule) = rel(RelExpr::var("x"), &env);
        assert_eq!(rule, Rule::Var);
        assert_eq!(out, res(&ages(&[1.0])));
    }

    #[test]
    fn unbound_var_is_an_error() {
        assert_eq!(
            step_rel(RelExpr::var("x"), &Environment::new()),
            Err(EvalError::UnboundVariable("x".into()))
        );
    }

    #[test]
    fn union_rules() {
        let env = Environment::new();
        let (out, rule) = rel(RelExpr::union(res(&ages(&[1.0])), res(&ages(&[2.0]))), &env);
        assert_eq!(rule, Rule::UnionOk);
        assert_eq!(out, res(&ages(&[1.0, 2.0])));
        let (out, rule) = rel(RelExpr::union(res(&ages(&[1.0])), res(&people())), &env);
        assert_eq!((out, rule), (RelExpr::Null, Rule::UnionNull));
    }

    #[test]
    fn difference_rules() {
        let env = Environment::new();
        let (out, rule) = rel(
            RelExpr::difference(res(&ages(&[1.0, 2.0])), res(&ages(&[2.0]))),
            &env,
        );
        assert_eq!((out, rule), (res(&ages(&[1.0])), Rule::DifferenceOk));
        let (out, rule) = rel(
            RelExpr::difference(res(&ages(&[1.0])), res(&people())),
            &env,
        );
        assert_eq!((out, rule), (RelExpr::Null, Rule::DifferenceNull));
    }

    #[test]
    fn product_rules() {
        let env = Environment::new();
        let other = Arc::new(Dataset::from_rows(&["b"], vec![vec![n(5.0)]]).unwrap());
        let (out, rule) = rel(RelExpr::product(res(&ages(&[1.0, 2.0])), res(&other)), &env);
        assert_eq!(rule, Rule::ProductOk);
        assert_eq!(
            out,
            RelExpr::resolved(relation::product(&ages(&[1.0, 2.0]), &other).unwrap())
        );
        let (out, rule) = rel(
            RelExpr::product(res(&ages(&[1.0])), res(&ages(&[1.0]))),
            &env,
        );
        assert_eq!((out, rule), (RelExpr::Null, Rule::ProductNull));
    }

    #[test]
    fn single_test_rules() {
        let env = Environment::new();
        let d = ages(&[25.0, 30.0]);
        let cases = [
            (TypeTest::Exists(gt("age", 26.0)), res(&d), Rule::ExistsOk),
            (
                TypeTest::Exists(gt("age", 99.0)),
                RelExpr::Null,
                Rule::ExistsNull,
            ),
            (TypeTest::Forall(gt("age", 20.0)), res(&d), Rule::ForallOk),
            (
                TypeTest::Forall(gt("age", 26.0)),
                RelExpr::Null,
                Rule::ForallNull,
            ),
            (TypeTest::has("age"), res(&d), Rule::AttrsOk),
            (TypeTest::has("name"), RelExpr::Null, Rule::AttrsNull),
        ];
        for (t, expected, expected_rule) in cases {
            let (out, rule) = rel(RelExpr::test(res(&d), vec![t]), &env);
            assert_eq!((out, rule), (expected, expected_rule));
        }
    }

    #[test]
    fn test_chain_rules() {
        let env = Environment::new();
        let d = ages(&[25.0, 30.0]);
        let t0 = TypeTest::has("age");
        let t1 = TypeTest::Forall(gt("age", 20.0));
        let (out, rule) = rel(RelExpr::test(res(&d), vec![t0, t1.clone()]), &env);
        assert_eq!(
            (out, rule),
            (RelExpr::test(res(&d), vec![t1.clone()]), Rule::TestChainOk)
        );
        let (out, rule) = rel(
            RelExpr::test(res(&d), vec![TypeTest::has("name"), t1]),
            &env,
        );
        assert_eq!((out, rule), (RelExpr::Null, Rule::TestChainNull));
    }

    #[test]
    fn project_rules() {
        let env = Environment::new();
        let (out, rule) = rel(RelExpr::project(["age"], res(&people())), &env);
        assert_eq!((out, rule), (res(&ages(&[17.0, 30.0])), Rule::ProjectOk));
        let (out, rule) = rel(RelExpr::project(["salary"], res(&people())), &env);
        assert_eq!((out, rule), (RelExpr::Null, Rule::ProjectNull));
    }

    #[test]
    fn select_rules() {
        let env = Environment::new();
        let (out, rule) = rel(
            RelExpr::select(gt("age", 26.0), res(&ages(&[25.0, 30.0]))),
            &env,
        );
        assert_eq!((out, rule), (res(&ages(&[30.0])), Rule::SelectOk));
        let (out, rule) = rel(RelExpr::select(gt("age", 99.0), res(&ages(&[25.0]))), &env);
        assert_eq!((out, rule), (RelExpr::Null, Rule::SelectNull));
    }

    #[test]
    fn rename_rules() {
        let env = Environment::new();
        let (out, rule) = rel(RelExpr::rename("age", "years", res(&ages(&[1.0]))), &env);
        assert_eq!(rule, Rule::RenameOk);
        assert_eq!(
            out,
            RelExpr::resolved(Dataset::from_rows(&["years"], vec![vec![n(1.0)]]).unwrap())
        );
        let (out, rule) = rel(RelExpr::rename("name", "age", res(&people())), &env);
        assert_eq!((out, rule), (RelExpr::Null, Rule::RenameTargetExists));
        let (out, rule) = rel(RelExpr::rename("salary", "pay", res(&people())), &env);
        assert_eq!((out, rule), (RelExpr::Null, Rule::RenameSourceMissing));
    }

    #[test]
    fn null_operand_propagates() {
        let env = Environment::new();
        let (out, rule) = rel(RelExpr::union(RelExpr::Null, RelExpr::var("unbound")), &env);
        assert_eq!((out, rule), (RelExpr::Null, Rule::NullOperand));
        let (out, rule) = rel(RelExpr::union(res(&ages(&[1.0])), RelExpr::Null), &env);
        assert_eq!((out, rule), (RelExpr::Null, Rule::NullOperand));
        let (out, rule) = rel(RelExpr::project(["a"], RelExpr::Null), &env);
        assert_eq!((out, rule), (RelExpr::Null, Rule::NullOperand));
    }

    #[test]
    fn left_operand_reduces_first() {
        let mut env = Environment::new();
        env.bind("x", ages(&[1.0]));
        env.bind("y", ages(&[2.0]));
        let (out, _) = rel(RelExpr::union(RelExpr::var("x"), RelExpr::var("y")), &env);
        assert_eq!(out, RelExpr::union(res(&ages(&[1.0])), RelExpr::var("y")));
        let (out, _) = rel(out, &env);
        assert_eq!(out, RelExpr::union(res(&ages(&[1.0])), res(&ages(&[2.0]))));
    }

    #[test]
    fn declare_steps_to_top() {
        let (c, rules) = stmt(Stmt::declare("x"), Environment::new());
        assert_eq!(c.stmt, Stmt::Top);
        assert_eq!(rules, vec![Rule::Declare]);
    }

    #[test]
    fn assignment_rules() {
        let d = ages(&[1.0]);
        let (c, rules) = stmt(Stmt::assign("x", res(&d)), Environment::new());
        assert_eq!(c.stmt, Stmt::Top);
        assert_eq!(c.env.get("x"), Some(&d));
        assert_eq!(rules, vec![Rule::AssignValue]);

        let (c, rules) = stmt(Stmt::assign("x", RelExpr::Null), Environment::new());
        assert_eq!(c.stmt, Stmt::Bottom);
        assert!(c.env.is_empty());
        assert_eq!(rules, vec![Rule::AssignNull]);

        let mut env = Environment::new();
        env.bind("y", Arc::clone(&d));
        let (c, rules) = stmt(Stmt::assign("x", RelExpr::var("y")), env);
        assert_eq!(c.stmt, Stmt::assign("x", res(&d)));
        assert_eq!(rules, vec![Rule::AssignStep, Rule::Var]);
    }

    #[test]
    fn return_rules() {
        let (c, rules) = stmt(Stmt::ret(RelExpr::Null), Environment::new());
        assert_eq!((c.stmt, rules), (Stmt::Bottom, vec![Rule::ReturnNull]));
        let d = ages(&[1.0]);
        let (c, rules) = stmt(
            Stmt::ret(RelExpr::test(res(&d), vec![TypeTest::has("age")])),
            Environment::new(),
        );
        assert_eq!(
            (c.stmt, rules),
            (Stmt::ret(res(&d)), vec![Rule::ReturnStep, Rule::AttrsOk])
        );
    }

    #[test]
    fn sequence_rules() {
        let d = ages(&[1.0]);
        let rest = Stmt::ret(RelExpr::var("x"));
        let (c, rules) = stmt(Stmt::Top.then(rest.clone()), Environment::new());
        assert_eq!((c.stmt, rules), (rest.clone(), vec![Rule::SeqTop]));
        let (c, rules) = stmt(Stmt::Bottom.then(rest.clone()), Environment::new());
        assert_eq!((c.stmt, rules), (Stmt::Bottom, vec![Rule::SeqBottom]));
        let (c, rules) = stmt(Stmt::ret(res(&d)).then(rest.clone()), Environment::new());
        assert_eq!((c.stmt, rules), (Stmt::ret(res(&d)), vec![Rule::SeqReturn]));
        let (c, rules) = stmt(
            Stmt::assign("x", res(&d)).then(rest.clone()),
            Environment::new(),
        );
        assert_eq!(c.stmt, Stmt::Top.then(rest));
        assert_eq!(c.env.get("x"), Some(&d));
        assert_eq!(rules, vec![Rule::SeqStep, Rule::AssignValue]);
    }

    #[test]
    fn terminal_configuration_does_not_step() {
        for s in [Stmt::Top, Stmt::Bottom, Stmt::ret(res(&ages(&[1.0])))] {
            assert!(matches!(
                step(Configuration::new(s, Environment::new())),
                Err(EvalError::Stuck(_))
            ));
        }
    }

    #[test]
    fn identity_program() {
        let s = Stmt::seq([Stmt::declare("x"), Stmt::ret(RelExpr::var("x"))]);
        let d = people();
        assert_eq!(run(&s, &[Arc::clone(&d)]).unwrap(), Outcome::Success(d));
    }

    #[test]
    fn failing_selection_program() {
        let s = Stmt::seq([
            Stmt::declare("x"),
            Stmt::ret(RelExpr::select(gt("age", 99.0), RelExpr::var("x"))),
        ]);
        assert_eq!(run(&s, &[people()]).unwrap(), Outcome::Failure);
    }

    #[test]
    fn program_without_return() {
        let s = Stmt::seq([Stmt::declare("x"), Stmt::assign("x", RelExpr::var("x"))]);
        assert_eq!(
            run(&s, &[people()]).unwrap(),
            Outcome::CompletedWithoutReturn
        );
    }

    #[test]
    fn arity_mismatch() {
        let s = Stmt::seq([Stmt::declare("x"), Stmt::ret(RelExpr::var("x"))]);
        assert_eq!(
            run(&s, &[]),
            Err(EvalError::ArityMismatch {
                expected: 1,
                found: 0
            })
        );
    }

    #[test]
    fn early_return_ignores_rest() {
        let s = Stmt::seq([
            Stmt::declare("x"),
            Stmt::ret(RelExpr::var("x")),
            Stmt::assign("x", RelExpr::Null),
            Stmt::Bottom,
        ]);
        let d = people();
        assert_eq!(run(&s, &[Arc::clone(&d)]).unwrap(), Outcome::Success(d));
    }

    #[test]
    fn step_limit_is_enforced() {
        let s = Stmt::seq([Stmt::declare("x"), Stmt::ret(RelExpr::var("x"))]);
        assert_eq!(
            Evaluator::new(1).run(&s, &[people()]),
            Err(EvalError::StepLimit(1))
        );
        assert!(Evaluator::new(4).run(&s, &[people()]).is_ok());
    }

    #[test]
    fn observer_sees_every_configuration() {
        let s = Stmt::seq([Stmt::declare("x"), Stmt::ret(RelExpr::var("x"))]);
        let mut seen = Vec::new();
        let run = Evaluator::default()
            .run_observed(&s, &[people()], |c, _| seen.push(c.to_string()))
            .unwrap();
        assert_eq!(seen.len() as u64, run.steps + 1);
        assert!(seen[0].starts_with("<!x; ret x, {x = [name, age; 2 rows]}>"));
    }
}
