//! Model-level memory meter for the streaming simulator.
//!
//! Every structure the simulator keeps is charged to one of three
//! categories. Symbol slots cost one cell each; a fixed-width integer of
//! `w` bits costs `⌈w / log₂|Γ|⌉` cells, the smallest `c` with
//! `|Γ|^c ≥ 2^w`. The oracle, sinks and the read-only input are not
//! metered.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    /// Interval summaries and digests on the current path.
    Summary,
    /// The replay window and its control registers.
    Replay,
    /// Node ids, counters, flags and other integers.
    Bookkeeping,
}

impl Category {
    fn index(self) -> usize {
        match self {
            Category::Summary => 0,
            Category::Replay => 1,
            Category::Bookkeeping => 2,
        }
    }
}

/// Bits needed to write `n` in binary (at least 1).
pub fn bits(n: u64) -> u32 {
    (64 - n.leading_zeros()).max(1)
}

/// Cells over an alphabet of size `g` holding a `bits`-bit integer.
pub fn int_cells(bits: u32, g: usize) -> u64 {
    let g = g.max(2) as u128;
    let target: u128 = 1u128 << bits.min(127);
    let mut cells = 0;
    let mut reach: u128 = 1;
    while reach < target {
        reach = reach.saturating_mul(g);
        cells += 1;
    }
    cells
}

/// Cell costs of the simulator's integer registers, fixed per run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Widths {
    pub alphabet: usize,
    /// A step index in `0..=t`.
    pub time: u64,
    /// A signed cell index in `-t..=t`.
    pub position: u64,
    /// A window length in `0..=c_int·b`.
    pub length: u64,
    pub state: u64,
    pub node: u64,
    pub leaf: u64,
    pub depth: u64,
    pub offset: u64,
    /// One bit per tree level.
    pub path: u64,
}

impl Widths {
    pub fn new(alphabet: usize, states: usize, t: u64, b: u64, cap: u64, leaves: u64, depth: u32) -> Self {
        let c = |w: u32| int_cells(w, alphabet);
        Widths {
            alphabet,
            time: c(bits(t)),
            position: c(1 + bits(t)),
            length: c(bits(cap)),
            state: c(bits(states.saturating_sub(1) as u64)),
            node: c(bits(2 * leaves)),
            leaf: c(bits(leaves)),
            depth: c(bits(depth as u64 + 1)),
            offset: c(bits(b)),
            path: c(depth.max(1)),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct LedgerRow {
    pub tau: u64,
    pub s_screen: u64,
    pub s_book: u64,
    pub s_total: u64,
}

#[derive(Clone, Debug, Default)]
pub struct ScreenLedger {
    live: [u64; 3],
    max_screen: u64,
    max_book: u64,
    max_total: u64,
    recorded: u64,
    chain_violations: u64,
    audits: u64,
    keep_rows: bool,
    rows: Vec<LedgerRow>,
    widths: Option<Widths>,
}

impl ScreenLedger {
    pub fn new() -> Self {
        ScreenLedger::default()
    }

    /// A ledger that also keeps one row per recorded step.
    pub fn with_rows() -> Self {
        ScreenLedger {
            keep_rows: true,
            ..Default::default()
        }
    }

    /// Clears all state for a fresh run.
    pub fn begin(&mut self, widths: Widths) {
        let keep_rows = self.keep_rows;
        *self = ScreenLedger {
            keep_rows,
            widths: Some(widths),
            ..Default::default()
        };
    }

    pub fn widths(&self) -> Option<&Widths> {
        self.widths.as_ref()
    }

    pub fn charge(&mut self, cat: Category, cells: u64) {
        self.live[cat.index()] += cells;
    }

    pub fn release(&mut self, cat: Category, cells: u64) {
        let slot = &mut self.live[cat.index()];
        *slot = slot
            .checked_sub(cells)
            .expect("released more cells than were charged");
    }

    pub fn live(&self, cat: Category) -> u64 {
        self.live[cat.index()]
    }

    pub fn s_screen(&self) -> u64 {
        self.live(Category::Summary) + self.live(Category::Replay)
    }

    pub fn s_book(&self) -> u64 {
        self.live(Category::Bookkeeping)
    }

    pub fn s_total(&self) -> u64 {
        self.s_screen() + self.s_book()
    }

    /// Samples the current footprint as the one for step `tau`.
    pub fn record(&mut self, tau: u64) {
        let row = LedgerRow {
            tau,
            s_screen: self.s_screen(),
            s_book: self.s_book(),
            s_total: self.s_total(),
        };
        if row.s_screen > row.s_total {
            self.chain_violations += 1;
        }
        self.max_screen = self.max_screen.max(row.s_screen);
        self.max_book = self.max_book.max(row.s_book);
        self.max_total = self.max_total.max(row.s_total);
        self.recorded += 1;
        if self.keep_rows {
            self.rows.push(row);
        }
    }

    /// Compares the running totals against an independent recount.
    pub fn audit(&mut self, recount: [u64; 3]) -> Result<(), [u64; 3]> {
        self.audits += 1;
        if recount == self.live {
            Ok(())
        } else {
            Err(self.live)
        }
    }

    pub fn max_screen(&self) -> u64 {
        self.max_screen
    }

    pub fn max_book(&self) -> u64 {
        self.max_book
    }

    pub fn max_total(&self) -> u64 {
        self.max_total
    }

    pub fn recorded(&self) -> u64 {
        self.recorded
    }

    pub fn audits(&self) -> u64 {
        self.audits
    }

    pub fn chain_violations(&self) -> u64 {
        self.chain_violations
    }

    pub fn rows(&self) -> &[LedgerRow] {
        &self.rows
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        if let Some(w) = &self.widths {
            writeln!(
                out,
                "# cells over an alphabet of {} symbols; integers cost ceil(bits/log2({})) cells",
                w.alphabet,
                w.alphabet.max(2)
            )
            .unwrap();
        }
        out.push_str("tau,s_screen,s_book,s_total\n");
        for r in &self.rows {
            writeln!(out, "{},{},{},{}", r.tau, r.s_screen, r.s_book, r.s_total).unwrap();
        }
        out
    }
}
