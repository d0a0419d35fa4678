//! Workloads shared by the engine benchmarks.

use std::fmt::Write;

use tql_core::relation::{Dataset, Value};
use tql_core::solver::DiscoveryProgram;
use tql_core::{frontend, Repository};

/// `n` datasets. Even-numbered ones are people tables with ages `0..rows`,
/// odd-numbered ones are product tables; names are `d00`, `d01`, ...
pub fn repository(n: usize, rows: usize) -> Repository {
    Repository::from_datasets((0..n).map(|i| {
        let d = if i % 2 == 0 {
            let rows = (0..rows)
                .map(|r| vec![Value::text(format!("p{r}")), Value::num((r + i) as f64)])
                .collect();
            Dataset::from_rows(&["name", "age"], rows).unwrap()
        } else {
            let rows = (0..rows)
                .map(|r| vec![Value::text(format!("s{r}")), Value::num(r as f64 * 1.5)])
                .collect();
            Dataset::from_rows(&["sku", "price"], rows).unwrap()
        };
        (format!("d{i:02}"), d)
    }))
}

/// People joined with products where at least one adult exists, with
/// `arity` free variables overall.
pub fn join_query(arity: usize) -> String {
    assert!(arity >= 2);
    let mut q = String::from("p:{['age']; \\/('age' >= 18)};\ns:{['price']};\n");
    for i in 2..arity {
        writeln!(q, "v{i}:{{['name']}};").unwrap();
    }
    q.push_str("return p['age' < 40] * s['price'->'cost']");
    for i in 2..arity {
        write!(q, " - v{i}['name'->'n{i}'] * s['sku'; 'price']").unwrap();
    }
    q
}

pub fn discovery(repo_size: usize, rows: usize, arity: usize) -> DiscoveryProgram {
    let program = frontend::compile(&join_query(arity)).unwrap();
    DiscoveryProgram::new(program, repository(repo_size, rows)).unwrap()
}

/// A CSV document with a text and two numeric columns.
pub fn csv_text(rows: usize) -> String {
    let mut s = String::from("name,age,score\n");
    for r in 0..rows {
        writeln!(s, "\"n{r}, x\",{},{}", r % 90, r as f64 / 7.0).unwrap();
    }
    s
}
