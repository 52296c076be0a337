//! Program corpus files: records of `@ <index> [name]` followed by assembly text.

use super::nat::Nat;
use super::program::{assemble, Program};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub name: String,
    pub index: Nat,
    pub program: Program,
}

pub fn write(records: &[(&str, Program)]) -> String {
    let mut out = String::new();
    for (name, p) in records {
        out.push_str(&format!("@ {} {}\n", p.encode(), name));
        out.push_str(&p.disassemble());
        out.push('\n');
    }
    out
}

/// Parses a corpus and checks each stated index against the assembled program.
pub fn parse(text: &str) -> Result<Vec<Record>> {
    let mut records = Vec::new();
    let mut header: Option<(usize, Nat, String)> = None;
    let mut body = String::new();
    let mut flush = |header: Option<(usize, Nat, String)>, body: &str| -> Result<()> {
        if let Some((line, index, name)) = header {
            let program = assemble(body).map_err(|e| match e {
                Error::Assemble { line: l, msg } => Error::Assemble { line: line + l, msg },
                other => other,
            })?;
            if program.encode() != index {
                return Err(Error::Assemble {
                    line,
                    msg: format!("record {name}: stated index does not match the program"),
                });
            }
            records.push(Record { name, index, program });
        }
        Ok(())
    };
    for (ln, raw) in text.lines().enumerate() {
        if let Some(rest) = raw.trim_start().strip_prefix('@') {
            flush(header.take(), &body)?;
            body.clear();
            let mut parts = rest.split_whitespace();
            let index: Nat = parts
                .next()
                .ok_or_else(|| Error::Assemble { line: ln + 1, msg: "missing index".into() })?
                .parse()
                .map_err(|m| Error::Assemble { line: ln + 1, msg: m })?;
            let name = parts.next().unwrap_or("").to_string();
            header = Some((ln + 1, index, name));
        } else if header.is_some() {
            body.push_str(raw);
            body.push('\n');
        } else if !raw.trim().is_empty() && !raw.trim_start().starts_with('#') {
            return Err(Error::Assemble { line: ln + 1, msg: "text before the first record".into() });
        }
    }
    flush(header, &body)?;
    Ok(records)
}
