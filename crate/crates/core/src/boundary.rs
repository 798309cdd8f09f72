//! Time blocks, interface windows, interval summaries and their merge.
//!
//! A summary of the step interval `[L, R]` records the configuration data
//! at time `L - 1` (entry) and at time `R` (exit), so that adjacent
//! intervals share exactly one boundary configuration.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::Span;
use crate::machine::{StateId, Symbol};
use crate::run::RunRecord;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BoundaryError {
    #[error("block size must be at least 1")]
    ZeroBlockSize,
    #[error("c_int must be at least 1")]
    ZeroCInt,
    #[error("block {block} out of range 1..={count}")]
    NoSuchBlock { block: u64, count: u64 },
    #[error("block {block} is not block-respecting: tape {tape} visits {span} ({len} cells > limit {limit})", tape = .tape + 1, len = .span.len)]
    NonBlockRespecting {
        block: u64,
        tape: usize,
        span: Span,
        limit: u64,
    },
    #[error("intervals [{left_l},{left_r}] and [{right_l},{right_r}] are not adjacent")]
    NotAdjacent {
        left_l: u64,
        left_r: u64,
        right_l: u64,
        right_r: u64,
    },
    #[error("cannot merge summaries with different policies or tape counts")]
    PolicyMismatch,
    #[error("incompatible summaries: {0}")]
    Incompatible(Incompatibility),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Incompatibility {
    State,
    Heads { tape: usize },
    Window { tape: usize, cell: i64 },
    Gap { tape: usize },
}

impl fmt::Display for Incompatibility {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Incompatibility::State => f.write_str("state"),
            Incompatibility::Heads { tape } => write!(f, "heads (tape {})", tape + 1),
            Incompatibility::Window { tape, cell } => {
                write!(f, "window contents (tape {}, cell {cell})", tape + 1)
            }
            Incompatibility::Gap { tape } => write!(f, "disjoint windows (tape {})", tape + 1),
        }
    }
}

/// Blocks `I_k = [(k-1)b + 1, min(kb, t)]` for `k = 1..=T`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct BlockDecomposition {
    pub t: u64,
    pub b: u64,
    pub count: u64,
}

pub fn decompose(t: u64, b: u64) -> Result<BlockDecomposition, BoundaryError> {
    if b == 0 {
        return Err(BoundaryError::ZeroBlockSize);
    }
    Ok(BlockDecomposition {
        t,
        b,
        count: t.div_ceil(b),
    })
}

impl BlockDecomposition {
    /// Step interval of block `k` (1-based).
    pub fn block(&self, k: u64) -> Result<(u64, u64), BoundaryError> {
        if k == 0 || k > self.count {
            return Err(BoundaryError::NoSuchBlock {
                block: k,
                count: self.count,
            });
        }
        Ok(((k - 1) * self.b + 1, (k * self.b).min(self.t)))
    }

    pub fn blocks(&self) -> impl Iterator<Item = (u64, u64)> + '_ {
        (1..=self.count).map(|k| self.block(k).expect("in range"))
    }

    pub fn block_of(&self, tau: u64) -> u64 {
        tau.div_ceil(self.b)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Policy {
    Boundary,
    Full,
}

impl Policy {
    pub fn tag(self) -> u8 {
        match self {
            Policy::Boundary => 0,
            Policy::Full => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SideWindow {
    pub span: Span,
    pub symbols: Vec<Symbol>,
}

impl SideWindow {
    pub fn get(&self, cell: i64) -> Option<Symbol> {
        self.span
            .contains(cell)
            .then(|| self.symbols[(cell - self.span.lo) as usize])
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TapeWindow {
    pub entry: SideWindow,
    pub exit: SideWindow,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InterfaceWindow {
    pub tapes: Vec<TapeWindow>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntervalSummary {
    pub l: u64,
    pub r: u64,
    pub q_in: StateId,
    pub q_out: StateId,
    pub heads_in: Vec<i64>,
    pub heads_out: Vec<i64>,
    pub window: InterfaceWindow,
    pub policy: Policy,
}

impl IntervalSummary {
    pub fn tapes(&self) -> usize {
        self.heads_in.len()
    }
}

/// Cells encoded by the window: a tape whose entry and exit sides share a
/// span counts it once, otherwise both sides count.
pub fn screen_area(s: &IntervalSummary) -> u64 {
    s.window
        .tapes
        .iter()
        .map(|w| {
            if w.entry.span == w.exit.span {
                w.entry.span.len
            } else {
                w.entry.span.len + w.exit.span.len
            }
        })
        .sum()
}

fn side(run: &RunRecord<'_>, tau: u64, spans: &[Span]) -> Vec<SideWindow> {
    let c = run.config_at(tau);
    let blank = run.machine().blank();
    c.tapes
        .iter()
        .zip(spans)
        .map(|(tape, &span)| SideWindow {
            span,
            symbols: tape.window(span, blank),
        })
        .collect()
}

fn block_spans(run: &RunRecord<'_>, l: u64, r: u64) -> Vec<Span> {
    (0..run.machine().tapes())
        .map(|i| run.head_hull(l - 1, r, i))
        .collect()
}

/// Summary of `[l, r]` read straight from the oracle. Under `Full` the
/// window is every cell visited during the interval; under `Boundary` the
/// sides are the windows of the first and last blocks.
pub fn direct_summary(
    run: &RunRecord<'_>,
    blocks: &BlockDecomposition,
    first: u64,
    last: u64,
    policy: Policy,
) -> Result<IntervalSummary, BoundaryError> {
    let (l, _) = blocks.block(first)?;
    let (_, r) = blocks.block(last)?;
    let (entry_spans, exit_spans) = match policy {
        Policy::Full => {
            let s = block_spans(run, l, r);
            (s.clone(), s)
        }
        Policy::Boundary => {
            let (_, first_r) = blocks.block(first)?;
            let (last_l, _) = blocks.block(last)?;
            (block_spans(run, l, first_r), block_spans(run, last_l, r))
        }
    };
    let entry = side(run, l - 1, &entry_spans);
    let exit = side(run, r, &exit_spans);
    Ok(IntervalSummary {
        l,
        r,
        q_in: run.state(l - 1),
        q_out: run.state(r),
        heads_in: run.heads(l - 1),
        heads_out: run.heads(r),
        window: InterfaceWindow {
            tapes: entry
                .into_iter()
                .zip(exit)
                .map(|(entry, exit)| TapeWindow { entry, exit })
                .collect(),
        },
        policy,
    })
}

/// Summary of block `k`, failing if any tape's window exceeds `c_int * b`.
pub fn leaf_summary(
    run: &RunRecord<'_>,
    blocks: &BlockDecomposition,
    k: u64,
    c_int: u64,
    policy: Policy,
) -> Result<IntervalSummary, BoundaryError> {
    if c_int == 0 {
        return Err(BoundaryError::ZeroCInt);
    }
    let (l, r) = blocks.block(k)?;
    let limit = c_int * blocks.b;
    for (tape, span) in block_spans(run, l, r).into_iter().enumerate() {
        if span.len > limit {
            return Err(BoundaryError::NonBlockRespecting {
                block: k,
                tape,
                span,
                limit,
            });
        }
    }
    direct_summary(run, blocks, k, k, policy)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockCheck {
    pub block: u64,
    pub l: u64,
    pub r: u64,
    pub spans: Vec<Span>,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockReport {
    pub b: u64,
    pub c_int: u64,
    pub limit: u64,
    pub blocks: Vec<BlockCheck>,
}

impl BlockReport {
    pub fn verdict(&self) -> bool {
        self.blocks.iter().all(|b| b.ok)
    }

    pub fn failures(&self) -> impl Iterator<Item = &BlockCheck> {
        self.blocks.iter().filter(|b| !b.ok)
    }
}

pub fn check_block_respecting(
    run: &RunRecord<'_>,
    b: u64,
    c_int: u64,
) -> Result<BlockReport, BoundaryError> {
    let blocks = decompose(run.t(), b)?;
    let limit = c_int * b;
    let checks = blocks
        .blocks()
        .enumerate()
        .map(|(i, (l, r))| {
            let spans = block_spans(run, l, r);
            let ok = spans.iter().all(|s| s.len <= limit);
            BlockCheck {
                block: i as u64 + 1,
                l,
                r,
                spans,
                ok,
            }
        })
        .collect();
    Ok(BlockReport {
        b,
        c_int,
        limit,
        blocks: checks,
    })
}

fn check_overlap(tape: usize, a: &SideWindow, b: &SideWindow) -> Result<(), BoundaryError> {
    let overlap = a.span.intersect(&b.span);
    if overlap.is_empty() {
        return Err(BoundaryError::Incompatible(Incompatibility::Gap { tape }));
    }
    for cell in overlap.cells() {
        if a.get(cell) != b.get(cell) {
            return Err(BoundaryError::Incompatible(Incompatibility::Window {
                tape,
                cell,
            }));
        }
    }
    Ok(())
}

/// `left ⊕ right` for adjacent intervals under the same policy.
pub fn merge(
    left: &IntervalSummary,
    right: &IntervalSummary,
) -> Result<IntervalSummary, BoundaryError> {
    if left.r + 1 != right.l {
        return Err(BoundaryError::NotAdjacent {
            left_l: left.l,
            left_r: left.r,
            right_l: right.l,
            right_r: right.r,
        });
    }
    if left.policy != right.policy || left.tapes() != right.tapes() {
        return Err(BoundaryError::PolicyMismatch);
    }
    if left.q_out != right.q_in {
        return Err(BoundaryError::Incompatible(Incompatibility::State));
    }
    for (tape, (a, b)) in left.heads_out.iter().zip(&right.heads_in).enumerate() {
        if a != b {
            return Err(BoundaryError::Incompatible(Incompatibility::Heads { tape }));
        }
    }
    let mut tapes = Vec::with_capacity(left.tapes());
    for (tape, (lw, rw)) in left.window.tapes.iter().zip(&right.window.tapes).enumerate() {
        check_overlap(tape, &lw.exit, &rw.entry)?;
        tapes.push(match left.policy {
            Policy::Boundary => TapeWindow {
                entry: lw.entry.clone(),
                exit: rw.exit.clone(),
            },
            Policy::Full => {
                // Right-only cells are untouched during the left interval and
                // left-only cells during the right one.
                let span = lw.entry.span.hull(&rw.exit.span);
                let entry = span
                    .cells()
                    .map(|c| lw.entry.get(c).or_else(|| rw.entry.get(c)).expect("contiguous"))
                    .collect();
                let exit = span
                    .cells()
                    .map(|c| rw.exit.get(c).or_else(|| lw.exit.get(c)).expect("contiguous"))
                    .collect();
                TapeWindow {
                    entry: SideWindow {
                        span,
                        symbols: entry,
                    },
                    exit: SideWindow {
                        span,
                        symbols: exit,
                    },
                }
            }
        });
    }
    Ok(IntervalSummary {
        l: left.l,
        r: right.r,
        q_in: left.q_in,
        q_out: right.q_out,
        heads_in: left.heads_in.clone(),
        heads_out: right.heads_out.clone(),
        window: InterfaceWindow { tapes },
        policy: left.policy,
    })
}
