//! Text, CSV and JSON renderings of a schedule.
//!
//! Text: one entry per line, `f<L>` or `g<L>`, with ` -> u<i>` appended when
//! bit `i` is decided after the entry.
//! CSV: header `cc,entry,emit`, `cc` counting from 1, `emit` empty or `u<i>`.
//! JSON: an array of `{"cc": .., "entry": "..", "emit": ..}` objects, `emit`
//! being the bit index or `null`.
//!
//! Writers take any iterator of steps so the online generator can stream.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use super::{Schedule, Step};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Text,
    Csv,
    Json,
}

#[derive(Serialize, Deserialize)]
struct JsonStep {
    cc: u64,
    entry: String,
    emit: Option<u64>,
}

pub fn write_steps<W: Write>(
    out: &mut W,
    steps: impl IntoIterator<Item = Step>,
    format: Format,
) -> Result<()> {
    match format {
        Format::Text => write_text(out, steps),
        Format::Csv => write_csv(out, steps),
        Format::Json => write_json(out, steps),
    }
}

pub fn write_text<W: Write>(out: &mut W, steps: impl IntoIterator<Item = Step>) -> Result<()> {
    for step in steps {
        match step.emit {
            Some(bit) => writeln!(out, "{} -> u{bit}", step.entry)?,
            None => writeln!(out, "{}", step.entry)?,
        }
    }
    Ok(())
}

pub fn write_csv<W: Write>(out: &mut W, steps: impl IntoIterator<Item = Step>) -> Result<()> {
    writeln!(out, "cc,entry,emit")?;
    for (idx, step) in steps.into_iter().enumerate() {
        match step.emit {
            Some(bit) => writeln!(out, "{},{},u{bit}", idx + 1, step.entry)?,
            None => writeln!(out, "{},{},", idx + 1, step.entry)?,
        }
    }
    Ok(())
}

pub fn write_json<W: Write>(out: &mut W, steps: impl IntoIterator<Item = Step>) -> Result<()> {
    write!(out, "[")?;
    for (idx, step) in steps.into_iter().enumerate() {
        if idx > 0 {
            write!(out, ",")?;
        }
        write!(out, "\n  ")?;
        let js = JsonStep {
            cc: idx as u64 + 1,
            entry: step.entry.to_string(),
            emit: step.emit,
        };
        serde_json::to_writer(&mut *out, &js)?;
    }
    writeln!(out, "\n]")?;
    Ok(())
}

/// Parses the text form back into a schedule; structural invariants are checked.
pub fn parse_text<R: BufRead>(n: u32, input: R) -> Result<Schedule> {
    let mut steps = Vec::new();
    for (lineno, line) in input.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let (entry, emit) = match line.split_once("->") {
            Some((e, mark)) => {
                let mark = mark.trim();
                let bit = mark
                    .strip_prefix('u')
                    .and_then(|b| b.parse::<u64>().ok())
                    .ok_or_else(|| {
                        Error::InvalidParameter(format!("line {}: bad mark {mark:?}", lineno + 1))
                    })?;
                (e.trim(), Some(bit))
            }
            None => (line, None),
        };
        steps.push(Step {
            entry: entry.parse()?,
            emit,
        });
    }
    Schedule::from_steps(n, steps)
}

/// Parses the JSON array form.
pub fn parse_json(n: u32, input: &str) -> Result<Schedule> {
    let raw: Vec<JsonStep> = serde_json::from_str(input)?;
    let mut steps = Vec::with_capacity(raw.len());
    for (idx, js) in raw.into_iter().enumerate() {
        if js.cc != idx as u64 + 1 {
            return Err(Error::InvalidParameter(format!(
                "cc {} out of sequence at position {}",
                js.cc,
                idx + 1
            )));
        }
        steps.push(Step {
            entry: js.entry.parse()?,
            emit: js.emit,
        });
    }
    Schedule::from_steps(n, steps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schedule::generate_online;

    fn render(format: Format, n: u32) -> String {
        let mut buf = Vec::new();
        write_steps(
            &mut buf,
            generate_online(n).unwrap().steps().to_vec(),
            format,
        )
        .unwrap();
        String::from_utf8(buf).unwrap()
    }

    #[test]
    fn text_n1() {
        assert_eq!(render(Format::Text, 1), "f1\nf2 -> u1\ng2 -> u2\n");
    }

    #[test]
    fn csv_n1() {
        assert_eq!(
            render(Format::Csv, 1),
            "cc,entry,emit\n1,f1,\n2,f2,u1\n3,g2,u2\n"
        );
    }

    #[test]
    fn json_n1() {
        let s = render(Format::Json, 1);
        let v: serde_json::Value = serde_json::from_str(&s).unwrap();
        assert_eq!(v[0]["entry"], "f1");
        assert_eq!(v[0]["emit"], serde_json::Value::Null);
        assert_eq!(v[2]["cc"], 3);
        assert_eq!(v[2]["emit"], 2);
    }

    #[test]
    fn text_and_json_parse_back() {
        for n in 1..=6 {
            let s = generate_online(n).unwrap();
            assert_eq!(
                parse_text(n, render(Format::Text, n).as_bytes()).unwrap(),
                s
            );
            assert_eq!(parse_json(n, &render(Format::Json, n)).unwrap(), s);
        }
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_text(1, "f1\nf2 -> x1\ng2 -> u2\n".as_bytes()).is_err());
        assert!(parse_text(1, "f1\nf2 -> u1\n".as_bytes()).is_err());
        assert!(parse_text(1, "f1\ng2 -> u1\nf2 -> u2\n".as_bytes()).is_ok());
    }
}
