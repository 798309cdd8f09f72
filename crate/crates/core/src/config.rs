//! Instantaneous descriptions and the single-step relation.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::machine::{MachineSpec, StateId, Symbol};

/// Closed cell interval `[lo, lo + len - 1]`; `len == 0` is empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Span {
    pub lo: i64,
    pub len: u64,
}

impl Span {
    pub const EMPTY: Span = Span { lo: 0, len: 0 };

    pub fn point(c: i64) -> Span {
        Span { lo: c, len: 1 }
    }

    pub fn from_bounds(lo: i64, hi: i64) -> Span {
        if hi < lo {
            Span::EMPTY
        } else {
            Span {
                lo,
                len: (hi - lo) as u64 + 1,
            }
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Last cell; meaningless for an empty span.
    pub fn hi(&self) -> i64 {
        self.lo + self.len as i64 - 1
    }

    pub fn contains(&self, c: i64) -> bool {
        self.len > 0 && c >= self.lo && c <= self.hi()
    }

    pub fn contains_span(&self, other: &Span) -> bool {
        other.is_empty() || (self.contains(other.lo) && self.contains(other.hi()))
    }

    pub fn include(&self, c: i64) -> Span {
        if self.is_empty() {
            Span::point(c)
        } else {
            Span::from_bounds(self.lo.min(c), self.hi().max(c))
        }
    }

    pub fn hull(&self, other: &Span) -> Span {
        match (self.is_empty(), other.is_empty()) {
            (true, _) => *other,
            (_, true) => *self,
            _ => Span::from_bounds(self.lo.min(other.lo), self.hi().max(other.hi())),
        }
    }

    pub fn intersect(&self, other: &Span) -> Span {
        if self.is_empty() || other.is_empty() {
            return Span::EMPTY;
        }
        Span::from_bounds(self.lo.max(other.lo), self.hi().min(other.hi()))
    }

    pub fn cells(&self) -> impl Iterator<Item = i64> {
        let lo = self.lo;
        (0..self.len as i64).map(move |i| lo + i)
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_empty() {
            f.write_str("[]")
        } else {
            write!(f, "[{},{}]", self.lo, self.hi())
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Tape {
    pub head: i64,
    /// Non-blank cells only, so equal tapes have equal maps.
    pub cells: BTreeMap<i64, Symbol>,
    pub touched: Span,
}

impl Tape {
    pub fn read(&self, c: i64, blank: Symbol) -> Symbol {
        self.cells.get(&c).copied().unwrap_or(blank)
    }

    pub fn write(&mut self, c: i64, s: Symbol, blank: Symbol) {
        if s == blank {
            self.cells.remove(&c);
        } else {
            self.cells.insert(c, s);
        }
    }

    pub fn window(&self, span: Span, blank: Symbol) -> Vec<Symbol> {
        span.cells().map(|c| self.read(c, blank)).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Configuration {
    pub time: u64,
    pub state: StateId,
    pub tapes: Vec<Tape>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum StepError {
    #[error("cannot step from halting state `{0}`")]
    Halted(String),
}

impl Configuration {
    /// C_0: input on tape 1 from cell 0, every head at 0, start state.
    pub fn initial(m: &MachineSpec, input: &[Symbol]) -> Configuration {
        let mut tapes: Vec<Tape> = (0..m.tapes())
            .map(|_| Tape {
                head: 0,
                cells: BTreeMap::new(),
                touched: Span::point(0),
            })
            .collect();
        for (i, &s) in input.iter().enumerate() {
            tapes[0].write(i as i64, s, m.blank());
        }
        Configuration {
            time: 0,
            state: m.start(),
            tapes,
        }
    }

    pub fn heads(&self) -> Vec<i64> {
        self.tapes.iter().map(|t| t.head).collect()
    }

    /// Applies δ in place.
    pub fn advance(&mut self, m: &MachineSpec) -> Result<(), StepError> {
        let blank = m.blank();
        let reads: Vec<Symbol> = self
            .tapes
            .iter()
            .map(|t| t.read(t.head, blank))
            .collect();
        let tr = m
            .transition(self.state, &reads)
            .ok_or_else(|| StepError::Halted(m.state_name(self.state).to_owned()))?;
        for (i, tape) in self.tapes.iter_mut().enumerate() {
            let h = tape.head;
            tape.write(h, tr.writes[i], blank);
            tape.head = h + tr.moves[i].delta();
            tape.touched = tape.touched.include(tape.head);
        }
        self.state = tr.next;
        self.time += 1;
        Ok(())
    }

    pub fn render(&self, m: &MachineSpec) -> String {
        let mut out = format!("time={} state={}", self.time, m.state_name(self.state));
        for (i, t) in self.tapes.iter().enumerate() {
            let syms = t.window(t.touched, m.blank());
            out.push_str(&format!(
                "\ntape{} head={} touched={} cells={}",
                i + 1,
                t.head,
                t.touched,
                m.format_symbols(&syms)
            ));
        }
        out
    }
}

pub fn step(m: &MachineSpec, c: &Configuration) -> Result<Configuration, StepError> {
    let mut next = c.clone();
    next.advance(m)?;
    Ok(next)
}
