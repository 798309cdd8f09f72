//! Line-oriented machine definition format.
//!
//! ```text
//! machine writer2
//! tapes 1
//! blank _
//! input_alphabet 1
//! work_alphabet 1 _
//! start q0
//! accept accept
//! reject reject
//! delta q0 _ -> q1 1 R
//! ```

use std::fmt::Write as _;

use thiserror::Error;

use crate::machine::{MachineBuilder, MachineError, MachineSpec, Move, Rule};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("line {line}: invalid move `{token}`")]
    InvalidMove { line: usize, token: String },
    #[error("missing `{0}` directive")]
    Missing(&'static str),
    #[error(transparent)]
    Machine(#[from] MachineError),
}

fn syntax(line: usize, message: impl Into<String>) -> ParseError {
    ParseError::Syntax {
        line,
        message: message.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    let mut prev_ws = true;
    for (i, c) in line.char_indices() {
        if c == '#' && prev_ws {
            return &line[..i];
        }
        prev_ws = c.is_whitespace();
    }
    line
}

pub fn parse_machine(text: &str) -> Result<MachineSpec, ParseError> {
    let mut b = MachineBuilder::default();
    let mut seen_tapes = false;
    let mut seen = [false; 7];
    const DIRECTIVES: [&str; 7] = [
        "machine",
        "blank",
        "input_alphabet",
        "work_alphabet",
        "start",
        "accept",
        "reject",
    ];

    for (no, raw) in text.lines().enumerate() {
        let line = no + 1;
        let toks: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        let Some((&head, rest)) = toks.split_first() else {
            continue;
        };
        let single = |what: &str| -> Result<String, ParseError> {
            match rest {
                [one] => Ok((*one).to_owned()),
                _ => Err(syntax(line, format!("`{what}` takes exactly one argument"))),
            }
        };
        if let Some(i) = DIRECTIVES.iter().position(|&d| d == head) {
            if seen[i] {
                return Err(syntax(line, format!("duplicate `{head}` directive")));
            }
            seen[i] = true;
        }
        match head {
            "machine" => b.name = single("machine")?,
            "tapes" => {
                if seen_tapes {
                    return Err(syntax(line, "duplicate `tapes` directive"));
                }
                seen_tapes = true;
                let n = single("tapes")?;
                b.tapes = n
                    .parse()
                    .map_err(|_| syntax(line, format!("bad tape count `{n}`")))?;
                if b.tapes == 0 {
                    return Err(syntax(line, "tape count must be at least 1"));
                }
            }
            "blank" => b.blank = single("blank")?,
            "input_alphabet" => b.input_alphabet = rest.iter().map(|s| (*s).to_owned()).collect(),
            "work_alphabet" => b.work_alphabet = rest.iter().map(|s| (*s).to_owned()).collect(),
            "start" => b.start = single("start")?,
            "accept" => b.accept = single("accept")?,
            "reject" => b.reject = single("reject")?,
            "delta" => b.rules.push(parse_delta(line, rest, b.tapes, seen_tapes)?),
            other => return Err(syntax(line, format!("unknown directive `{other}`"))),
        }
    }

    if !seen_tapes {
        return Err(ParseError::Missing("tapes"));
    }
    for (i, d) in DIRECTIVES.iter().enumerate() {
        if !seen[i] {
            return Err(ParseError::Missing(d));
        }
    }
    Ok(b.build()?)
}

fn parse_delta(line: usize, rest: &[&str], k: usize, have_k: bool) -> Result<Rule, ParseError> {
    if !have_k {
        return Err(syntax(line, "`delta` before `tapes`"));
    }
    let arrow = rest
        .iter()
        .position(|&t| t == "->")
        .ok_or_else(|| syntax(line, "expected `->`"))?;
    let (lhs, rhs) = (&rest[..arrow], &rest[arrow + 1..]);
    if lhs.len() != k + 1 {
        return Err(syntax(
            line,
            format!("expected state and {k} read symbols before `->`"),
        ));
    }
    if rhs.len() != 2 * k + 1 {
        return Err(syntax(
            line,
            format!("expected state, {k} writes and {k} moves after `->`"),
        ));
    }
    let moves = rhs[k + 1..]
        .iter()
        .map(|&tok| {
            Move::from_token(tok).ok_or_else(|| ParseError::InvalidMove {
                line,
                token: tok.to_owned(),
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Rule {
        state: lhs[0].to_owned(),
        reads: lhs[1..].iter().map(|s| (*s).to_owned()).collect(),
        next: rhs[0].to_owned(),
        writes: rhs[1..=k].iter().map(|s| (*s).to_owned()).collect(),
        moves,
    })
}

/// Canonical text form; `parse_machine(serialize_machine(m)) == m`.
pub fn serialize_machine(m: &MachineSpec) -> String {
    let mut out = String::new();
    let input: Vec<&str> = m
        .input_alphabet()
        .iter()
        .map(|&s| m.symbol_name(s))
        .collect();
    writeln!(out, "machine {}", m.name()).unwrap();
    writeln!(out, "tapes {}", m.tapes()).unwrap();
    writeln!(out, "blank {}", m.symbol_name(m.blank())).unwrap();
    writeln!(out, "input_alphabet {}", input.join(" ")).unwrap();
    writeln!(out, "work_alphabet {}", m.work_alphabet().join(" ")).unwrap();
    writeln!(out, "start {}", m.state_name(m.start())).unwrap();
    writeln!(out, "accept {}", m.state_name(m.accept())).unwrap();
    writeln!(out, "reject {}", m.state_name(m.reject())).unwrap();
    for r in m.rules() {
        let moves: Vec<&str> = r.moves.iter().map(|mv| mv.token()).collect();
        writeln!(
            out,
            "delta {} {} -> {} {} {}",
            r.state,
            r.reads.join(" "),
            r.next,
            r.writes.join(" "),
            moves.join(" ")
        )
        .unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const WRITER: &str = "\
# two steps then accept
machine w
tapes 1
blank _
input_alphabet 1
work_alphabet 1 _
start q0
accept yes
reject no
delta q0 _ -> q1 1 R
delta q0 1 -> no 1 S
delta q1 _ -> yes 1 S   # halts
delta q1 1 -> no 1 S
";

    #[test]
    fn parses_and_round_trips() {
        let m = parse_machine(WRITER).unwrap();
        assert_eq!(m.tapes(), 1);
        assert_eq!(m.states().len(), 4);
        let again = parse_machine(&serialize_machine(&m)).unwrap();
        assert_eq!(m, again);
        assert_eq!(serialize_machine(&m), serialize_machine(&again));
    }

    #[test]
    fn reports_line_numbers() {
        let bad = WRITER.replace("delta q1 1 -> no 1 S", "delta q1 1 -> no 1 +2");
        match parse_machine(&bad) {
            Err(e @ ParseError::InvalidMove { line: 13, .. }) => {
                assert!(e.to_string().contains("invalid move"))
            }
            other => panic!("unexpected {other:?}"),
        }
        let bad = WRITER.replace("tapes 1", "tapes one");
        assert!(matches!(
            parse_machine(&bad),
            Err(ParseError::Syntax { line: 3, .. })
        ));
    }

    #[test]
    fn missing_directive() {
        let bad = WRITER.replace("reject no\n", "");
        assert_eq!(parse_machine(&bad), Err(ParseError::Missing("reject")));
    }
}
