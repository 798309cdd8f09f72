//! Linear-space reference execution.
//!
//! A [`RunRecord`] keeps the head, state and write traces of a run plus
//! periodic snapshots, and rebuilds any C_τ on demand.

use std::fmt;

use crate::config::{Configuration, Span};
use crate::machine::{MachineSpec, StateId, Symbol};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HaltCause {
    Accept,
    Reject,
    StepBudget,
}

impl fmt::Display for HaltCause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            HaltCause::Accept => "accept",
            HaltCause::Reject => "reject",
            HaltCause::StepBudget => "step-budget",
        })
    }
}

const SNAPSHOT_STRIDE: u64 = 256;

#[derive(Clone, Debug)]
pub struct RunRecord<'m> {
    machine: &'m MachineSpec,
    input: Vec<Symbol>,
    t: u64,
    halted: HaltCause,
    heads: Vec<i64>,
    states: Vec<StateId>,
    writes: Vec<Symbol>,
    snapshots: Vec<Configuration>,
}

pub fn run<'m>(m: &'m MachineSpec, input: &[Symbol], max_steps: u64) -> RunRecord<'m> {
    let k = m.tapes();
    let mut c = Configuration::initial(m, input);
    let mut rec = RunRecord {
        machine: m,
        input: input.to_vec(),
        t: 0,
        halted: HaltCause::StepBudget,
        heads: c.heads(),
        states: vec![c.state],
        writes: Vec::new(),
        snapshots: vec![c.clone()],
    };
    let blank = m.blank();
    let mut reads = vec![blank; k];
    while rec.t < max_steps {
        if c.state == m.accept() || c.state == m.reject() {
            break;
        }
        for (r, tape) in reads.iter_mut().zip(&c.tapes) {
            *r = tape.read(tape.head, blank);
        }
        let tr = m
            .transition(c.state, &reads)
            .expect("non-halting state has a total row");
        rec.writes.extend_from_slice(tr.writes);
        c.advance(m).expect("non-halting state");
        rec.t += 1;
        rec.heads.extend(c.tapes.iter().map(|t| t.head));
        rec.states.push(c.state);
        if rec.t.is_multiple_of(SNAPSHOT_STRIDE) {
            rec.snapshots.push(c.clone());
        }
    }
    rec.halted = if c.state == m.accept() {
        HaltCause::Accept
    } else if c.state == m.reject() {
        HaltCause::Reject
    } else {
        HaltCause::StepBudget
    };
    rec
}

impl<'m> RunRecord<'m> {
    pub fn machine(&self) -> &'m MachineSpec {
        self.machine
    }

    pub fn input(&self) -> &[Symbol] {
        &self.input
    }

    pub fn t(&self) -> u64 {
        self.t
    }

    pub fn halted(&self) -> HaltCause {
        self.halted
    }

    pub fn state(&self, tau: u64) -> StateId {
        self.states[tau as usize]
    }

    pub fn head(&self, tau: u64, tape: usize) -> i64 {
        self.heads[tau as usize * self.machine.tapes() + tape]
    }

    pub fn heads(&self, tau: u64) -> Vec<i64> {
        let k = self.machine.tapes();
        self.heads[tau as usize * k..(tau as usize + 1) * k].to_vec()
    }

    /// Symbol written on `tape` by step `tau` (1-based), at `head(tau - 1)`.
    pub fn written(&self, tau: u64, tape: usize) -> Symbol {
        assert!(tau >= 1 && tau <= self.t);
        self.writes[(tau as usize - 1) * self.machine.tapes() + tape]
    }

    pub fn initial(&self) -> &Configuration {
        &self.snapshots[0]
    }

    fn apply_step(&self, c: &mut Configuration) {
        let tau = c.time + 1;
        let blank = self.machine.blank();
        for (i, tape) in c.tapes.iter_mut().enumerate() {
            tape.write(tape.head, self.written(tau, i), blank);
            tape.head = self.head(tau, i);
            tape.touched = tape.touched.include(tape.head);
        }
        c.state = self.state(tau);
        c.time = tau;
    }

    pub fn config_at(&self, tau: u64) -> Configuration {
        assert!(tau <= self.t, "τ={tau} beyond run length {}", self.t);
        let mut c = self.snapshots[(tau / SNAPSHOT_STRIDE) as usize].clone();
        while c.time < tau {
            self.apply_step(&mut c);
        }
        c
    }

    /// Calls `f` on C_from, …, C_to in order.
    pub fn walk(&self, from: u64, to: u64, mut f: impl FnMut(&Configuration)) {
        if from > to {
            return;
        }
        let mut c = self.config_at(from);
        f(&c);
        while c.time < to {
            self.apply_step(&mut c);
            f(&c);
        }
    }

    pub fn history(&self) -> Vec<Configuration> {
        let mut out = Vec::with_capacity(self.t as usize + 1);
        self.walk(0, self.t, |c| out.push(c.clone()));
        out
    }

    pub fn final_config(&self) -> Configuration {
        self.config_at(self.t)
    }

    /// Hull of the positions of head `tape` over times `from..=to`.
    pub fn head_hull(&self, from: u64, to: u64, tape: usize) -> Span {
        (from..=to).fold(Span::EMPTY, |s, tau| s.include(self.head(tau, tape)))
    }

    /// C_τ as seen from inside an interval starting at step `l`: cells
    /// restricted to `spans`, touched spans reset to the head hull over
    /// `l-1..=τ`.
    pub fn interval_view(&self, l: u64, tau: u64, spans: &[Span]) -> Configuration {
        assert!(l >= 1 && l - 1 <= tau);
        let mut c = self.config_at(tau);
        for (i, tape) in c.tapes.iter_mut().enumerate() {
            let span = spans[i];
            tape.cells.retain(|&cell, _| span.contains(cell));
            tape.touched = self.head_hull(l - 1, tau, i);
        }
        c
    }
}
