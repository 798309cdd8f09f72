//! Windowed replay: stepping a machine using only a block's interface
//! window.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::boundary::{IntervalSummary, Policy, SideWindow};
use crate::config::{Configuration, Span, Tape};
use crate::machine::{MachineSpec, StateId, Symbol};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReplayError {
    #[error("head on tape {tape} left the window at cell {cell}", tape = .tape + 1)]
    WindowEscape { tape: usize, cell: i64 },
    #[error("machine halted {remaining} steps before the end of the replay")]
    Halted { remaining: u64 },
    #[error("replay needs a full-window summary")]
    NotFull,
    #[error("step {tau} outside [{lo},{hi}]")]
    OutOfRange { tau: u64, lo: u64, hi: u64 },
    #[error("summary does not match the machine: {0}")]
    Mismatch(&'static str),
}

/// Control data plus per-tape window contents at one instant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WindowState {
    pub time: u64,
    pub state: StateId,
    pub heads: Vec<i64>,
    pub windows: Vec<SideWindow>,
    /// Hull of head positions since the replay started.
    pub touched: Vec<Span>,
}

impl WindowState {
    pub fn new(time: u64, state: StateId, heads: Vec<i64>, windows: Vec<SideWindow>) -> Self {
        let touched = heads.iter().map(|&h| Span::point(h)).collect();
        WindowState {
            time,
            state,
            heads,
            windows,
            touched,
        }
    }

    /// The configuration seen through the windows: cells outside them are
    /// absent.
    pub fn configuration(&self, blank: Symbol) -> Configuration {
        let tapes = self
            .windows
            .iter()
            .zip(&self.heads)
            .zip(&self.touched)
            .map(|((w, &head), &touched)| {
                let cells: BTreeMap<i64, Symbol> = w
                    .span
                    .cells()
                    .zip(&w.symbols)
                    .filter(|&(_, &s)| s != blank)
                    .map(|(c, &s)| (c, s))
                    .collect();
                Tape {
                    head,
                    cells,
                    touched,
                }
            })
            .collect();
        Configuration {
            time: self.time,
            state: self.state,
            tapes,
        }
    }

    fn step(&mut self, m: &MachineSpec, reads: &mut Vec<Symbol>) -> Result<(), ReplayError> {
        reads.clear();
        for (i, w) in self.windows.iter().enumerate() {
            let h = self.heads[i];
            reads.push(w.get(h).ok_or(ReplayError::WindowEscape { tape: i, cell: h })?);
        }
        let tr = m
            .transition(self.state, reads)
            .ok_or(ReplayError::Halted { remaining: 0 })?;
        for (i, w) in self.windows.iter_mut().enumerate() {
            let h = self.heads[i];
            w.symbols[(h - w.span.lo) as usize] = tr.writes[i];
            let next = h + tr.moves[i].delta();
            if !w.span.contains(next) {
                return Err(ReplayError::WindowEscape { tape: i, cell: next });
            }
            self.heads[i] = next;
            self.touched[i] = self.touched[i].include(next);
        }
        self.state = tr.next;
        self.time += 1;
        Ok(())
    }
}

/// Advances `entry` by `steps` inside its windows, calling `emit` on every
/// configuration after the first.
pub fn replay_block(
    m: &MachineSpec,
    entry: &WindowState,
    steps: u64,
    mut emit: impl FnMut(&Configuration),
) -> Result<WindowState, ReplayError> {
    let mut cur = entry.clone();
    for (i, h) in cur.heads.iter().enumerate() {
        if !cur.windows[i].span.contains(*h) {
            return Err(ReplayError::WindowEscape { tape: i, cell: *h });
        }
    }
    let mut reads = Vec::with_capacity(m.tapes());
    for done in 0..steps {
        cur.step(m, &mut reads).map_err(|e| match e {
            ReplayError::Halted { .. } => ReplayError::Halted {
                remaining: steps - done,
            },
            e => e,
        })?;
        emit(&cur.configuration(m.blank()));
    }
    Ok(cur)
}

pub fn summary_entry(s: &IntervalSummary) -> WindowState {
    WindowState::new(
        s.l - 1,
        s.q_in,
        s.heads_in.clone(),
        s.window.tapes.iter().map(|w| w.entry.clone()).collect(),
    )
}

fn check_summary(m: &MachineSpec, s: &IntervalSummary) -> Result<(), ReplayError> {
    if s.policy != Policy::Full {
        return Err(ReplayError::NotFull);
    }
    if s.tapes() != m.tapes() || s.heads_out.len() != m.tapes() || s.window.tapes.len() != m.tapes() {
        return Err(ReplayError::Mismatch("tape count"));
    }
    if s.q_in.0 as usize >= m.states().len() {
        return Err(ReplayError::Mismatch("state"));
    }
    let g = m.work_alphabet().len();
    for w in &s.window.tapes {
        if w.entry.symbols.len() as u64 != w.entry.span.len
            || w.entry.symbols.iter().any(|sym| sym.0 as usize >= g)
        {
            return Err(ReplayError::Mismatch("window symbols"));
        }
    }
    if s.l == 0 || s.r < s.l {
        return Err(ReplayError::Mismatch("interval"));
    }
    Ok(())
}

/// C_τ for `τ ∈ [L-1, R]`, seen through the summary's window.
pub fn replay_from_summary(
    m: &MachineSpec,
    s: &IntervalSummary,
    tau: u64,
) -> Result<Configuration, ReplayError> {
    check_summary(m, s)?;
    if tau + 1 < s.l || tau > s.r {
        return Err(ReplayError::OutOfRange {
            tau,
            lo: s.l - 1,
            hi: s.r,
        });
    }
    let end = replay_block(m, &summary_entry(s), tau + 1 - s.l, |_| {})?;
    Ok(end.configuration(m.blank()))
}
