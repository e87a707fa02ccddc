//! Golden-file harness.
//!
//! A case is a pair `NAME.in.json` / `NAME.out.json` in one directory. The
//! input holds `{"args": [...]}` (arguments after the program name, values
//! may be nested JSON which is passed inline); the expected output holds
//! `{"exit": code, "stdout": report-or-null}`. Both sides are compared as
//! canonical pretty-printed JSON, byte for byte.

use std::fs;
use std::io;
use std::path::Path;

use serde_json::{json, Value};
use similar::TextDiff;

/// Outcome of one case.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CaseResult {
    pub name: String,
    pub passed: bool,
    /// Unified diff (expected vs actual) when the case failed.
    pub diff: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct GoldenSummary {
    pub cases: Vec<CaseResult>,
}

impl GoldenSummary {
    pub fn passed(&self) -> usize {
        self.cases.iter().filter(|c| c.passed).count()
    }

    pub fn failed(&self) -> usize {
        self.cases.len() - self.passed()
    }

    pub fn all_passed(&self) -> bool {
        self.failed() == 0
    }

    pub fn to_json(&self) -> Value {
        json!({
            "passed": self.passed(),
            "failed": self.failed(),
            "cases": self.cases.iter().map(|c| json!({"name": c.name, "passed": c.passed})).collect::<Vec<_>>(),
        })
    }

    /// All diffs of failing cases, for standard error.
    pub fn diffs(&self) -> String {
        self.cases.iter().filter(|c| !c.passed).map(|c| format!("FAIL {}\n{}", c.name, c.diff)).collect()
    }
}

/// Pretty, key-sorted rendering used for comparison and diffs.
pub fn canonical_pretty(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("JSON values serialize");
    s.push('\n');
    s
}

fn to_arg(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Runs one case through [`crate::run`] and returns `{"exit", "stdout"}`.
pub fn run_case(input: &Value) -> io::Result<Value> {
    let args = input
        .get("args")
        .and_then(Value::as_array)
        .ok_or_else(|| io::Error::new(io::ErrorKind::InvalidData, "case input needs an \"args\" array"))?;
    let argv: Vec<String> = std::iter::once("nodal-theta".to_string()).chain(args.iter().map(to_arg)).collect();
    let out = crate::run(argv);
    let stdout = if out.stdout.trim().is_empty() {
        Value::Null
    } else {
        serde_json::from_str(&out.stdout).unwrap_or(Value::String(out.stdout))
    };
    Ok(json!({"exit": out.code, "stdout": stdout}))
}

fn read_value(path: &Path) -> io::Result<Value> {
    let text = fs::read_to_string(path)?;
    serde_json::from_str(&text).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, format!("{}: {e}", path.display())))
}

/// Runs every case in `dir`, in name order.
pub fn golden_suite(dir: &Path) -> io::Result<GoldenSummary> {
    let mut names: Vec<String> = fs::read_dir(dir)?
        .filter_map(|e| e.ok())
        .filter_map(|e| e.file_name().to_str().and_then(|n| n.strip_suffix(".in.json")).map(String::from))
        .collect();
    names.sort();
    let mut cases = Vec::with_capacity(names.len());
    for name in names {
        let input = read_value(&dir.join(format!("{name}.in.json")))?;
        let expected = read_value(&dir.join(format!("{name}.out.json")))?;
        let actual = run_case(&input)?;
        let (e, a) = (canonical_pretty(&expected), canonical_pretty(&actual));
        let passed = e == a;
        let diff = if passed {
            String::new()
        } else {
            TextDiff::from_lines(&e, &a).unified_diff().header("expected", "actual").to_string()
        };
        cases.push(CaseResult { name, passed, diff });
    }
    Ok(GoldenSummary { cases })
}
