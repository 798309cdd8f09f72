//! Rolling-boundary simulation over the causal tree.
//!
//! The simulator walks the balanced tree depth first. Each tape is a ring
//! of exactly `c_int·b` slots holding a contiguous live window around the
//! head; cells entering the window for the first time are read from the
//! initial tape. Finished subtrees shrink to (entry state, exit state)
//! digests, so besides the ring the simulator holds one digest per open
//! left sibling plus the entry window of block 1.
//!
//! Each step is reported to the sink as a [`Frame`] carrying the control
//! data and the cells written; [`HistoryAssembler`] turns frames back into
//! full configurations on the sink side.

use thiserror::Error;

use crate::boundary::{
    decompose, BlockDecomposition, InterfaceWindow, IntervalSummary, Policy, SideWindow,
    TapeWindow,
};
use crate::config::{Configuration, Span};
use crate::ledger::{Category, ScreenLedger, Widths};
use crate::machine::{MachineSpec, StateId, Symbol};
use crate::tree::{build_tree, ceil_log2, time_to_leaf, DfsCursor, Phase, TreeError};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HoloError {
    #[error("b and c_int must be at least 1")]
    ZeroParameter,
    #[error("the machine halts at step 0; there is nothing to simulate")]
    EmptyRun,
    #[error("block {block} is not block-respecting: tape {tape} visits {span} ({len} cells > limit {limit}); try a larger b or c_int", tape = .tape + 1, len = .span.len)]
    NonBlockRespecting {
        block: u64,
        tape: usize,
        span: Span,
        limit: u64,
    },
    #[error("block {block}: tape {tape} returns to cell {cell}, which was evicted from the window; try a larger c_int", tape = .tape + 1)]
    RevisitedCell { block: u64, tape: usize, cell: i64 },
    #[error("internal: block {block} window {span} on tape {tape} is not held by the frontier", tape = .tape + 1)]
    WindowEscape { block: u64, tape: usize, span: Span },
    #[error("internal: digests of node {node} disagree on the boundary state")]
    Incompatible { node: u64 },
    #[error("internal: ledger drift at step {tau}: running {running:?}, recount {recount:?}")]
    LedgerDrift {
        tau: u64,
        running: [u64; 3],
        recount: [u64; 3],
    },
    #[error("internal: {captures} captures for step {tau}, expected exactly one")]
    CaptureCount { tau: u64, captures: u64 },
    #[error(transparent)]
    Tree(#[from] TreeError),
}

/// One tape's live window: `cap` slots, cell `c` at slot `c mod cap`.
#[derive(Clone, Debug)]
struct Ring {
    slots: Vec<Symbol>,
    live: Span,
    /// Every cell the head has been on so far.
    hull: Span,
}

impl Ring {
    fn new(cap: u64, first: Symbol, blank: Symbol) -> Ring {
        let mut slots = vec![blank; cap as usize];
        slots[0] = first;
        Ring {
            slots,
            live: Span::point(0),
            hull: Span::point(0),
        }
    }

    fn slot(&self, c: i64) -> usize {
        c.rem_euclid(self.slots.len() as i64) as usize
    }

    fn get(&self, c: i64) -> Option<Symbol> {
        self.live.contains(c).then(|| self.slots[self.slot(c)])
    }

    fn set(&mut self, c: i64, s: Symbol) {
        debug_assert!(self.live.contains(c));
        let i = self.slot(c);
        self.slots[i] = s;
    }

    /// Brings the neighbouring cell `c` into the window. Returns false if
    /// `c` was visited before but has since been evicted.
    fn ensure(&mut self, c: i64, initial: Symbol) -> bool {
        if self.live.contains(c) {
            return true;
        }
        if self.hull.contains(c) {
            return false;
        }
        let cap = self.slots.len() as u64;
        debug_assert!(c == self.live.lo - 1 || c == self.live.hi() + 1);
        if self.live.len == cap {
            self.live = if c > self.live.hi() {
                Span::from_bounds(self.live.lo + 1, self.live.hi())
            } else {
                Span::from_bounds(self.live.lo, self.live.hi() - 1)
            };
        }
        self.live = self.live.include(c);
        self.hull = self.hull.include(c);
        let i = self.slot(c);
        self.slots[i] = initial;
        true
    }
}

struct InitialTape<'a> {
    input: &'a [Symbol],
    blank: Symbol,
}

impl InitialTape<'_> {
    fn get(&self, tape: usize, c: i64) -> Symbol {
        if tape == 0 && c >= 0 && (c as usize) < self.input.len() {
            self.input[c as usize]
        } else {
            self.blank
        }
    }
}

/// State, heads and rings at the current instant.
struct Frontier {
    time: u64,
    state: StateId,
    heads: Vec<i64>,
    rings: Vec<Ring>,
    cap: u64,
    reads: Vec<Symbol>,
    writes: Vec<(i64, Symbol)>,
}

enum Stepped {
    Ok,
    Halted,
}

impl Frontier {
    fn new(m: &MachineSpec, init: &InitialTape<'_>, cap: u64) -> Frontier {
        let k = m.tapes();
        Frontier {
            time: 0,
            state: m.start(),
            heads: vec![0; k],
            rings: (0..k)
                .map(|i| Ring::new(cap, init.get(i, 0), m.blank()))
                .collect(),
            cap,
            reads: Vec::with_capacity(k),
            writes: Vec::with_capacity(k),
        }
    }

    /// One step of δ; `span` is the running block window, checked against
    /// the ring capacity before anything is evicted.
    fn step(
        &mut self,
        m: &MachineSpec,
        init: &InitialTape<'_>,
        block: u64,
        span: &mut [Span],
    ) -> Result<Stepped, HoloError> {
        self.reads.clear();
        for (ring, &h) in self.rings.iter().zip(&self.heads) {
            self.reads.push(ring.get(h).expect("head inside live window"));
        }
        let Some(tr) = m.transition(self.state, &self.reads) else {
            return Ok(Stepped::Halted);
        };
        self.writes.clear();
        #[allow(clippy::needless_range_loop)]
        for i in 0..self.heads.len() {
            let h = self.heads[i];
            self.rings[i].set(h, tr.writes[i]);
            self.writes.push((h, tr.writes[i]));
            let next = h + tr.moves[i].delta();
            span[i] = span[i].include(next);
            if span[i].len > self.cap {
                return Err(HoloError::NonBlockRespecting {
                    block,
                    tape: i,
                    span: span[i],
                    limit: self.cap,
                });
            }
            if !self.rings[i].ensure(next, init.get(i, next)) {
                return Err(HoloError::RevisitedCell {
                    block,
                    tape: i,
                    cell: next,
                });
            }
            self.heads[i] = next;
        }
        self.state = tr.next;
        self.time += 1;
        Ok(Stepped::Ok)
    }
}

/// What the simulator reports for step `tau`.
pub struct Frame<'a> {
    pub tau: u64,
    pub leaf: u64,
    pub offset: u64,
    pub state: StateId,
    pub heads: &'a [i64],
    /// Cell written on each tape by this step and the symbol written.
    pub writes: &'a [(i64, Symbol)],
    rings: &'a [Ring],
}

impl Frame<'_> {
    /// Cells ever visited on `tape`.
    pub fn touched(&self, tape: usize) -> Span {
        self.rings[tape].hull
    }

    /// The part of `tape` the simulator currently holds.
    pub fn window(&self, tape: usize) -> Span {
        self.rings[tape].live
    }

    /// Reads `cell` if it lies in the held window.
    pub fn cell(&self, tape: usize, cell: i64) -> Option<Symbol> {
        self.rings[tape].get(cell)
    }
}

/// Rebuilds full configurations from C_0 and the frame stream.
#[derive(Clone, Debug)]
pub struct HistoryAssembler {
    blank: Symbol,
    current: Configuration,
}

impl HistoryAssembler {
    pub fn new(m: &MachineSpec, input: &[Symbol]) -> Self {
        HistoryAssembler {
            blank: m.blank(),
            current: Configuration::initial(m, input),
        }
    }

    pub fn apply(&mut self, f: &Frame<'_>) -> &Configuration {
        let c = &mut self.current;
        for (i, tape) in c.tapes.iter_mut().enumerate() {
            let (cell, sym) = f.writes[i];
            tape.write(cell, sym, self.blank);
            tape.head = f.heads[i];
            tape.touched = f.touched(i);
        }
        c.state = f.state;
        c.time = f.tau;
        &self.current
    }

    pub fn current(&self) -> &Configuration {
        &self.current
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct Digest {
    q_in: StateId,
    q_out: StateId,
}

struct LeafBuilder {
    q_in: StateId,
    span: Vec<Span>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HoloOutcome {
    /// σ([1, t]) under the boundary policy.
    pub root: IntervalSummary,
    pub t: u64,
    pub b: u64,
    pub c_int: u64,
    pub leaves: u64,
    pub depth: u32,
    pub emitted: u64,
    pub max_pending: usize,
    pub widths: Widths,
}

/// Runs the probe pass: how many steps the machine takes, up to `horizon`,
/// using the same bounded window.
fn probe(
    m: &MachineSpec,
    init: &InitialTape<'_>,
    horizon: u64,
    b: u64,
    cap: u64,
) -> Result<u64, HoloError> {
    let mut f = Frontier::new(m, init, cap);
    let mut span: Vec<Span> = f.heads.iter().map(|&h| Span::point(h)).collect();
    while f.time < horizon {
        if f.time.is_multiple_of(b) {
            for (s, &h) in span.iter_mut().zip(&f.heads) {
                *s = Span::point(h);
            }
        }
        let block = f.time / b + 1;
        if let Stepped::Halted = f.step(m, init, block, &mut span)? {
            break;
        }
    }
    Ok(f.time)
}

struct Costs {
    w: Widths,
    k: u64,
}

impl Costs {
    fn replay(&self, cap: u64) -> u64 {
        self.k * (cap + self.w.position + self.w.length + self.w.position) + self.w.state
    }

    fn builder(&self) -> u64 {
        self.w.state + self.k * 2 * self.w.length
    }

    fn digest(&self) -> u64 {
        2 * self.w.state
    }

    fn retained(&self, spans: &[Span]) -> u64 {
        spans
            .iter()
            .map(|s| self.w.position + self.w.length + s.len)
            .sum()
    }

    fn book(&self) -> u64 {
        let w = &self.w;
        // t and b, τ and the offset, node id, leaf range, depth, path, phase,
        // and the visited hull per tape.
        2 * w.time + w.time + w.offset + w.node + 2 * w.leaf + w.depth + w.path + 1
            + self.k * 2 * w.position
    }
}

/// Streams the run of `m` on `input` for up to `horizon` steps.
pub fn holo_run(
    m: &MachineSpec,
    input: &[Symbol],
    horizon: u64,
    b: u64,
    c_int: u64,
    sink: &mut dyn FnMut(&Frame<'_>),
    ledger: &mut ScreenLedger,
) -> Result<HoloOutcome, HoloError> {
    if b == 0 || c_int == 0 {
        return Err(HoloError::ZeroParameter);
    }
    let init = InitialTape {
        input,
        blank: m.blank(),
    };
    let cap = c_int * b;
    let t = probe(m, &init, horizon, b, cap)?;
    if t == 0 {
        return Err(HoloError::EmptyRun);
    }
    let blocks: BlockDecomposition = decompose(t, b).expect("b >= 1");
    let tree = build_tree(&blocks)?;
    let k = m.tapes();
    let costs = Costs {
        w: Widths::new(
            m.work_alphabet().len(),
            m.states().len(),
            t,
            b,
            cap,
            blocks.count,
            tree.depth,
        ),
        k: k as u64,
    };
    ledger.begin(costs.w);
    ledger.charge(Category::Replay, costs.replay(cap));
    ledger.charge(Category::Bookkeeping, costs.book());

    let mut front = Frontier::new(m, &init, cap);
    let mut pending: Vec<Digest> = Vec::new();
    let mut last: Option<Digest> = None;
    let mut builder: Option<LeafBuilder> = None;
    let mut retained: Option<Vec<SideWindow>> = None;
    let mut exit_sides: Option<Vec<SideWindow>> = None;
    let mut root: Option<Digest> = None;
    let mut max_pending = 0usize;
    let mut emitted = 0u64;

    let recount = |pending: &Vec<Digest>,
                   last: &Option<Digest>,
                   builder: &Option<LeafBuilder>,
                   retained: &Option<Vec<SideWindow>>,
                   front: &Frontier| {
        let spans: Vec<Span> = retained
            .iter()
            .flatten()
            .map(|w| {
                debug_assert_eq!(w.symbols.len() as u64, w.span.len);
                w.span
            })
            .collect();
        let summary = (pending.len() as u64 + last.is_some() as u64) * costs.digest()
            + builder.as_ref().map_or(0, |_| costs.builder())
            + costs.retained(&spans);
        let slots: u64 = front.rings.iter().map(|r| r.slots.len() as u64).sum();
        let replay = slots + costs.replay(0);
        [summary, replay, costs.book()]
    };

    for step in DfsCursor::new(&tree) {
        let node = step.node;
        match step.phase {
            Phase::Enter => {
                if node.is_leaf() {
                    builder = Some(LeafBuilder {
                        q_in: front.state,
                        span: front.heads.iter().map(|&h| Span::point(h)).collect(),
                    });
                    ledger.charge(Category::Summary, costs.builder());
                }
            }
            Phase::LeafEmit { leaf, offset, tau } => {
                let b_state = builder.as_mut().expect("inside a leaf");
                match front.step(m, &init, leaf, &mut b_state.span)? {
                    Stepped::Ok => {}
                    Stepped::Halted => unreachable!("probe measured the run length"),
                }
                debug_assert_eq!(front.time, tau);
                emitted += 1;
                sink(&Frame {
                    tau,
                    leaf,
                    offset,
                    state: front.state,
                    heads: &front.heads,
                    writes: &front.writes,
                    rings: &front.rings,
                });
                ledger.record(tau);
                let counted = recount(&pending, &last, &builder, &retained, &front);
                if let Err(running) = ledger.audit(counted) {
                    return Err(HoloError::LedgerDrift {
                        tau,
                        running,
                        recount: counted,
                    });
                }
            }
            Phase::Exit => {
                let digest = if node.is_leaf() {
                    let lb = builder.take().expect("leaf builder");
                    // The block window must still be held by the frontier.
                    for (i, (span, ring)) in lb.span.iter().zip(&front.rings).enumerate() {
                        if !ring.live.contains_span(span) {
                            return Err(HoloError::WindowEscape {
                                block: node.first,
                                tape: i,
                                span: *span,
                            });
                        }
                    }
                    if node.first == 1 {
                        let sides: Vec<SideWindow> = lb
                            .span
                            .iter()
                            .enumerate()
                            .map(|(i, &span)| SideWindow {
                                span,
                                symbols: span.cells().map(|c| init.get(i, c)).collect(),
                            })
                            .collect();
                        ledger.charge(Category::Summary, costs.retained(&lb.span));
                        retained = Some(sides);
                    }
                    if node.last == blocks.count {
                        exit_sides = Some(
                            lb.span
                                .iter()
                                .zip(&front.rings)
                                .map(|(&span, ring)| SideWindow {
                                    span,
                                    symbols: span
                                        .cells()
                                        .map(|c| ring.get(c).expect("held"))
                                        .collect(),
                                })
                                .collect(),
                        );
                    }
                    ledger.release(Category::Summary, costs.builder());
                    Digest {
                        q_in: lb.q_in,
                        q_out: front.state,
                    }
                } else {
                    let right = last.take().expect("right child digest");
                    let left = pending.pop().expect("left child digest");
                    ledger.release(Category::Summary, 2 * costs.digest());
                    if left.q_out != right.q_in {
                        return Err(HoloError::Incompatible { node: node.id });
                    }
                    Digest {
                        q_in: left.q_in,
                        q_out: right.q_out,
                    }
                };
                if step.depth == 0 {
                    root = Some(digest);
                } else {
                    ledger.charge(Category::Summary, costs.digest());
                    if step.is_left {
                        pending.push(digest);
                        max_pending = max_pending.max(pending.len());
                    } else {
                        last = Some(digest);
                    }
                }
            }
        }
    }

    let root_digest = root.expect("root exited");
    let entry = retained.expect("block 1 finished");
    let exit = exit_sides.expect("last block finished");
    Ok(HoloOutcome {
        root: IntervalSummary {
            l: 1,
            r: t,
            q_in: root_digest.q_in,
            q_out: root_digest.q_out,
            heads_in: vec![0; k],
            heads_out: front.heads.clone(),
            window: InterfaceWindow {
                tapes: entry
                    .into_iter()
                    .zip(exit)
                    .map(|(entry, exit)| TapeWindow { entry, exit })
                    .collect(),
            },
            policy: Policy::Boundary,
        },
        t,
        b,
        c_int,
        leaves: blocks.count,
        depth: tree.depth,
        emitted,
        max_pending,
        widths: costs.w,
    })
}

/// C_τ obtained by a full streaming pass that keeps only the visit to
/// `time_to_leaf(τ)`.
pub fn reconstruct_at(
    m: &MachineSpec,
    input: &[Symbol],
    horizon: u64,
    b: u64,
    c_int: u64,
    tau: u64,
) -> Result<Configuration, HoloError> {
    if b == 0 {
        return Err(HoloError::ZeroParameter);
    }
    let probe_blocks = decompose(horizon, b).expect("b >= 1");
    let (leaf, offset) = time_to_leaf(tau, &probe_blocks)?;
    let mut asm = HistoryAssembler::new(m, input);
    let mut captured: Option<Configuration> = None;
    let mut captures = 0u64;
    let mut ledger = ScreenLedger::new();
    let out = holo_run(
        m,
        input,
        horizon,
        b,
        c_int,
        &mut |f| {
            let c = asm.apply(f);
            if f.leaf == leaf && f.offset == offset {
                captures += 1;
                captured = Some(c.clone());
            }
        },
        &mut ledger,
    )?;
    if tau > out.t {
        return Err(TreeError::TimeOutOfRange { tau, t: out.t }.into());
    }
    match (captures, captured) {
        (1, Some(c)) => Ok(c),
        _ => Err(HoloError::CaptureCount { tau, captures }),
    }
}

/// Largest pending-stack length the tree over `leaves` blocks allows.
pub fn pending_bound(leaves: u64) -> usize {
    ceil_log2(leaves) as usize
}
