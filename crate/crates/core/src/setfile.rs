//! Plain-text set files.
//!
//! One element per line, integers or `p/q` rationals. An optional first line
//! `# field=prime p=<p>` selects `F_p`; without it the set lives in the
//! rationals. Blank lines are ignored. [`write_set`] emits the canonical form,
//! so parsing and re-serializing a canonical file is byte-stable.

use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::field::{FieldKind, GroundField};
use crate::set::FiniteSet;

pub(crate) fn parse_header(line: &str) -> Option<Result<GroundField>> {
    let rest = line.trim().strip_prefix('#')?.trim();
    let mut field = None;
    let mut p = None;
    for tok in rest.split_whitespace() {
        match tok.split_once('=') {
            Some(("field", v)) => field = Some(v.to_string()),
            Some(("p", v)) => p = Some(v.to_string()),
            _ => {}
        }
    }
    let field = field?;
    Some(match field.as_str() {
        "char0" | "rational" => Ok(GroundField::char0()),
        "prime" => {
            let Some(p) = p else {
                return Some(Err(Error::Parse { line: 1, msg: "prime field header without p=".into() }));
            };
            p.parse::<u64>()
                .map_err(|_| Error::Parse { line: 1, msg: format!("bad modulus {p:?}") })
                .and_then(GroundField::prime)
        }
        other => Err(Error::Parse { line: 1, msg: format!("unknown field {other:?}") }),
    })
}

pub fn parse_set(text: &str) -> Result<FiniteSet> {
    let mut field = GroundField::char0();
    let mut elems = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let t = line.trim();
        if i == 0 {
            if let Some(h) = parse_header(t) {
                field = h?;
                continue;
            }
        }
        if t.is_empty() || t.starts_with('#') {
            continue;
        }
        let x = field.parse(t).map_err(|e| match e {
            Error::Parse { msg, .. } => Error::Parse { line: i + 1, msg },
            other => other,
        })?;
        elems.push(x);
    }
    FiniteSet::new(field, elems)
}

pub fn write_set(set: &FiniteSet) -> String {
    let mut out = String::new();
    if let FieldKind::Prime(p) = set.field().kind() {
        writeln!(out, "# field=prime p={p}").unwrap();
    }
    for x in set {
        writeln!(out, "{x}").unwrap();
    }
    out
}

pub fn read_set_file(path: impl AsRef<Path>) -> Result<FiniteSet> {
    parse_set(&std::fs::read_to_string(path)?)
}

pub fn write_set_file(path: impl AsRef<Path>, set: &FiniteSet) -> Result<()> {
    Ok(std::fs::write(path, write_set(set))?)
}
