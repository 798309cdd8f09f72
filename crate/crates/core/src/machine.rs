//! Deterministic multitape machine descriptions.
//!
//! Symbols and states are dense indices into the machine's declared
//! alphabets; the transition table is stored flat so that a lookup is a
//! single multiply-add over the tape symbols.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

/// Index of a symbol in the machine's work alphabet, in declared order.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u16);

/// Index of a control state in [`MachineSpec::states`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateId(pub u32);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Move {
    Left,
    Stay,
    Right,
}

impl Move {
    pub fn delta(self) -> i64 {
        match self {
            Move::Left => -1,
            Move::Stay => 0,
            Move::Right => 1,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Move::Left => "L",
            Move::Stay => "S",
            Move::Right => "R",
        }
    }

    pub fn from_token(tok: &str) -> Option<Move> {
        match tok {
            "L" | "-1" => Some(Move::Left),
            "S" | "0" => Some(Move::Stay),
            "R" | "+1" | "1" => Some(Move::Right),
            _ => None,
        }
    }
}

impl fmt::Display for Move {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.token())
    }
}

/// A borrowed view of one table entry.
#[derive(Clone, Copy, Debug)]
pub struct Transition<'a> {
    pub next: StateId,
    pub writes: &'a [Symbol],
    pub moves: &'a [Move],
}

/// One transition as supplied to [`MachineBuilder`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub state: String,
    pub reads: Vec<String>,
    pub next: String,
    pub writes: Vec<String>,
    pub moves: Vec<Move>,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum MachineError {
    #[error("tape count must be at least 1")]
    NoTapes,
    #[error("duplicate symbol `{0}`")]
    DuplicateSymbol(String),
    #[error("unknown symbol `{0}`")]
    UnknownSymbol(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("blank symbol `{0}` must be in the work alphabet and not in the input alphabet")]
    BadBlank(String),
    #[error("start, accept and reject must be three distinct states")]
    IndistinctSpecialStates,
    #[error("halting state `{0}` has an outgoing transition")]
    TransitionFromHalting(String),
    #[error("duplicate transition for state `{state}` on {reads:?}")]
    DuplicateTransition { state: String, reads: Vec<String> },
    #[error("transition for state `{state}` expects {expected} symbols per side, got {got}")]
    Arity {
        state: String,
        expected: usize,
        got: usize,
    },
    #[error("transition table is not total: missing state `{state}` on {reads:?}")]
    NotTotal { state: String, reads: Vec<String> },
    #[error("too many {0}")]
    TooLarge(&'static str),
}

/// A validated machine: states, alphabets and a total transition table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MachineSpec {
    name: String,
    tapes: usize,
    states: Vec<String>,
    start: StateId,
    accept: StateId,
    reject: StateId,
    input_alphabet: Vec<Symbol>,
    work_alphabet: Vec<String>,
    blank: Symbol,
    // Flat table indexed by `state * |Γ|^k + Σ sym_i |Γ|^i`.
    next: Vec<u32>,
    writes: Vec<Symbol>,
    moves: Vec<Move>,
}

const NO_ENTRY: u32 = u32::MAX;

impl MachineSpec {
    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn tapes(&self) -> usize {
        self.tapes
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn start(&self) -> StateId {
        self.start
    }

    pub fn accept(&self) -> StateId {
        self.accept
    }

    pub fn reject(&self) -> StateId {
        self.reject
    }

    pub fn blank(&self) -> Symbol {
        self.blank
    }

    pub fn input_alphabet(&self) -> &[Symbol] {
        &self.input_alphabet
    }

    pub fn work_alphabet(&self) -> &[String] {
        &self.work_alphabet
    }

    pub fn is_halting(&self, q: StateId) -> bool {
        q == self.accept || q == self.reject
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q.0 as usize]
    }

    pub fn symbol_name(&self, s: Symbol) -> &str {
        &self.work_alphabet[s.0 as usize]
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states
            .iter()
            .position(|s| s == name)
            .map(|i| StateId(i as u32))
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        self.work_alphabet
            .iter()
            .position(|s| s == name)
            .map(|i| Symbol(i as u16))
    }

    /// Parses an input string: whitespace-separated tokens if it contains
    /// whitespace, otherwise one symbol per character.
    pub fn parse_input(&self, text: &str) -> Result<Vec<Symbol>, MachineError> {
        let tokens: Vec<String> = if text.chars().any(char::is_whitespace) {
            text.split_whitespace().map(str::to_owned).collect()
        } else {
            text.chars().map(|c| c.to_string()).collect()
        };
        tokens
            .iter()
            .map(|tok| {
                self.symbol(tok)
                    .filter(|s| self.input_alphabet.contains(s))
                    .ok_or_else(|| MachineError::UnknownSymbol(tok.clone()))
            })
            .collect()
    }

    pub fn format_symbols(&self, syms: &[Symbol]) -> String {
        let single = self.work_alphabet.iter().all(|s| s.chars().count() == 1);
        let names = syms.iter().map(|&s| self.symbol_name(s));
        if single {
            names.collect()
        } else {
            names.collect::<Vec<_>>().join(" ")
        }
    }

    fn row_width(&self) -> usize {
        self.work_alphabet.len().pow(self.tapes as u32)
    }

    fn index(&self, q: StateId, reads: &[Symbol]) -> usize {
        let g = self.work_alphabet.len();
        let mut idx = 0usize;
        for s in reads.iter().rev() {
            idx = idx * g + s.0 as usize;
        }
        q.0 as usize * self.row_width() + idx
    }

    /// Looks up δ(q, reads). `None` for halting states.
    pub fn transition(&self, q: StateId, reads: &[Symbol]) -> Option<Transition<'_>> {
        debug_assert_eq!(reads.len(), self.tapes);
        let i = self.index(q, reads);
        let next = self.next[i];
        if next == NO_ENTRY {
            return None;
        }
        let k = self.tapes;
        Some(Transition {
            next: StateId(next),
            writes: &self.writes[i * k..(i + 1) * k],
            moves: &self.moves[i * k..(i + 1) * k],
        })
    }

    /// All defined transitions in canonical order (state index, then reads
    /// with tape 1 as the most significant symbol).
    pub fn rules(&self) -> Vec<Rule> {
        let k = self.tapes;
        let g = self.work_alphabet.len();
        let mut out = Vec::new();
        let mut reads = vec![Symbol(0); k];
        for q in 0..self.states.len() {
            let q = StateId(q as u32);
            if self.is_halting(q) {
                continue;
            }
            for combo in 0..self.row_width() {
                let mut c = combo;
                for i in (0..k).rev() {
                    reads[i] = Symbol((c % g) as u16);
                    c /= g;
                }
                if let Some(tr) = self.transition(q, &reads) {
                    out.push(Rule {
                        state: self.state_name(q).to_owned(),
                        reads: reads.iter().map(|&s| self.symbol_name(s).to_owned()).collect(),
                        next: self.state_name(tr.next).to_owned(),
                        writes: tr
                            .writes
                            .iter()
                            .map(|&s| self.symbol_name(s).to_owned())
                            .collect(),
                        moves: tr.moves.to_vec(),
                    });
                }
            }
        }
        out
    }
}

/// Assembles and validates a [`MachineSpec`].
#[derive(Clone, Debug, Default)]
pub struct MachineBuilder {
    pub name: String,
    pub tapes: usize,
    pub blank: String,
    pub input_alphabet: Vec<String>,
    pub work_alphabet: Vec<String>,
    pub start: String,
    pub accept: String,
    pub reject: String,
    pub rules: Vec<Rule>,
}

impl MachineBuilder {
    pub fn new(name: impl Into<String>, tapes: usize) -> Self {
        MachineBuilder {
            name: name.into(),
            tapes,
            ..Default::default()
        }
    }

    pub fn rule(
        &mut self,
        state: &str,
        reads: &[&str],
        next: &str,
        writes: &[&str],
        moves: &[Move],
    ) -> &mut Self {
        self.rules.push(Rule {
            state: state.to_owned(),
            reads: reads.iter().map(|s| (*s).to_owned()).collect(),
            next: next.to_owned(),
            writes: writes.iter().map(|s| (*s).to_owned()).collect(),
            moves: moves.to_vec(),
        });
        self
    }

    /// State order: start, then non-halting states by first appearance as a
    /// rule source, then accept, reject, then any remaining targets.
    fn state_order(&self) -> Vec<String> {
        let mut order: Vec<String> = vec![self.start.clone()];
        let push = |s: &String, order: &mut Vec<String>| {
            if !order.contains(s) {
                order.push(s.clone());
            }
        };
        for r in &self.rules {
            if r.state != self.accept && r.state != self.reject {
                push(&r.state, &mut order);
            }
        }
        push(&self.accept, &mut order);
        push(&self.reject, &mut order);
        for r in &self.rules {
            push(&r.state, &mut order);
            push(&r.next, &mut order);
        }
        order
    }

    pub fn build(&self) -> Result<MachineSpec, MachineError> {
        let k = self.tapes;
        if k == 0 {
            return Err(MachineError::NoTapes);
        }
        let mut sym_index: HashMap<&str, Symbol> = HashMap::new();
        for (i, s) in self.work_alphabet.iter().enumerate() {
            if sym_index.insert(s.as_str(), Symbol(i as u16)).is_some() {
                return Err(MachineError::DuplicateSymbol(s.clone()));
            }
        }
        if self.work_alphabet.len() > u16::MAX as usize {
            return Err(MachineError::TooLarge("work symbols"));
        }
        let lookup_sym = |s: &str| {
            sym_index
                .get(s)
                .copied()
                .ok_or_else(|| MachineError::UnknownSymbol(s.to_owned()))
        };
        let blank = lookup_sym(&self.blank)?;
        let mut input_alphabet = Vec::with_capacity(self.input_alphabet.len());
        for s in &self.input_alphabet {
            let sym = lookup_sym(s)?;
            if input_alphabet.contains(&sym) {
                return Err(MachineError::DuplicateSymbol(s.clone()));
            }
            if sym == blank {
                return Err(MachineError::BadBlank(s.clone()));
            }
            input_alphabet.push(sym);
        }
        if self.start == self.accept || self.start == self.reject || self.accept == self.reject {
            return Err(MachineError::IndistinctSpecialStates);
        }

        let states = self.state_order();
        if states.len() >= NO_ENTRY as usize {
            return Err(MachineError::TooLarge("states"));
        }
        let state_index: HashMap<&str, StateId> = states
            .iter()
            .enumerate()
            .map(|(i, s)| (s.as_str(), StateId(i as u32)))
            .collect();
        let accept = state_index[self.accept.as_str()];
        let reject = state_index[self.reject.as_str()];
        let start = state_index[self.start.as_str()];

        let g = self.work_alphabet.len();
        let width = g
            .checked_pow(k as u32)
            .ok_or(MachineError::TooLarge("table entries"))?;
        let entries = width
            .checked_mul(states.len())
            .ok_or(MachineError::TooLarge("table entries"))?;
        let mut spec = MachineSpec {
            name: self.name.clone(),
            tapes: k,
            states: states.clone(),
            start,
            accept,
            reject,
            input_alphabet,
            work_alphabet: self.work_alphabet.clone(),
            blank,
            next: vec![NO_ENTRY; entries],
            writes: vec![blank; entries * k],
            moves: vec![Move::Stay; entries * k],
        };

        let mut reads = Vec::with_capacity(k);
        for r in &self.rules {
            if r.reads.len() != k || r.writes.len() != k || r.moves.len() != k {
                let got = [r.reads.len(), r.writes.len(), r.moves.len()]
                    .into_iter()
                    .find(|&n| n != k)
                    .unwrap_or(k);
                return Err(MachineError::Arity {
                    state: r.state.clone(),
                    expected: k,
                    got,
                });
            }
            let q = state_index[r.state.as_str()];
            if q == accept || q == reject {
                return Err(MachineError::TransitionFromHalting(r.state.clone()));
            }
            reads.clear();
            for s in &r.reads {
                reads.push(lookup_sym(s)?);
            }
            let i = spec.index(q, &reads);
            if spec.next[i] != NO_ENTRY {
                return Err(MachineError::DuplicateTransition {
                    state: r.state.clone(),
                    reads: r.reads.clone(),
                });
            }
            spec.next[i] = state_index[r.next.as_str()].0;
            for (j, w) in r.writes.iter().enumerate() {
                spec.writes[i * k + j] = lookup_sym(w)?;
                spec.moves[i * k + j] = r.moves[j];
            }
        }

        // Totality over non-halting states.
        for (qi, name) in states.iter().enumerate() {
            let q = StateId(qi as u32);
            if q == accept || q == reject {
                continue;
            }
            for combo in 0..width {
                if spec.next[qi * width + combo] == NO_ENTRY {
                    let mut c = combo;
                    let mut missing = Vec::with_capacity(k);
                    for _ in 0..k {
                        missing.push(self.work_alphabet[c % g].clone());
                        c /= g;
                    }
                    return Err(MachineError::NotTotal {
                        state: name.clone(),
                        reads: missing,
                    });
                }
            }
        }
        Ok(spec)
    }
}
