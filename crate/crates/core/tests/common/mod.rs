#![allow(dead_code)]

use std::collections::HashMap;

use holotm::holo::{holo_run, HistoryAssembler, HoloError, HoloOutcome};
use holotm::ledger::ScreenLedger;
use holotm::samples;
use holotm::{Configuration, MachineSpec, RunRecord, Span, Symbol};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Next state, writes, moves.
type Action = (String, Vec<String>, Vec<i64>);

/// A second interpreter with string-keyed tables and hash-map tapes,
/// sharing nothing with the library's stepping code.
pub struct RefMachine {
    table: HashMap<(String, Vec<String>), Action>,
    blank: String,
    accept: String,
    reject: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RefConfig {
    pub state: String,
    pub heads: Vec<i64>,
    pub tapes: Vec<HashMap<i64, String>>,
}

impl RefMachine {
    pub fn from_text(text: &str) -> RefMachine {
        let mut table = HashMap::new();
        let mut blank = String::new();
        let mut accept = String::new();
        let mut reject = String::new();
        let mut k = 0usize;
        for line in text.lines() {
            let toks: Vec<&str> = line.split_whitespace().collect();
            match toks.first() {
                Some(&"tapes") => k = toks[1].parse().unwrap(),
                Some(&"blank") => blank = toks[1].to_string(),
                Some(&"accept") => accept = toks[1].to_string(),
                Some(&"reject") => reject = toks[1].to_string(),
                Some(&"delta") => {
                    let q = toks[1].to_string();
                    let reads: Vec<String> = toks[2..2 + k].iter().map(|s| s.to_string()).collect();
                    let next = toks[3 + k].to_string();
                    let writes: Vec<String> =
                        toks[4 + k..4 + 2 * k].iter().map(|s| s.to_string()).collect();
                    let moves: Vec<i64> = toks[4 + 2 * k..4 + 3 * k]
                        .iter()
                        .map(|m| match *m {
                            "L" => -1,
                            "S" => 0,
                            "R" => 1,
                            other => panic!("move {other}"),
                        })
                        .collect();
                    table.insert((q, reads), (next, writes, moves));
                }
                _ => {}
            }
        }
        RefMachine {
            table,
            blank,
            accept,
            reject,
        }
    }

    pub fn initial(&self, start: &str, k: usize, input: &[String]) -> RefConfig {
        let mut tapes = vec![HashMap::new(); k];
        for (i, s) in input.iter().enumerate() {
            tapes[0].insert(i as i64, s.clone());
        }
        RefConfig {
            state: start.to_string(),
            heads: vec![0; k],
            tapes,
        }
    }

    pub fn halted(&self, c: &RefConfig) -> bool {
        c.state == self.accept || c.state == self.reject
    }

    pub fn step(&self, c: &mut RefConfig) {
        let reads: Vec<String> = c
            .heads
            .iter()
            .zip(&c.tapes)
            .map(|(h, t)| t.get(h).cloned().unwrap_or_else(|| self.blank.clone()))
            .collect();
        let (next, writes, moves) = self.table[&(c.state.clone(), reads)].clone();
        for i in 0..c.heads.len() {
            c.tapes[i].insert(c.heads[i], writes[i].clone());
            c.heads[i] += moves[i];
        }
        c.state = next;
    }

    /// Projects a library configuration into this interpreter's terms.
    pub fn view(&self, m: &MachineSpec, c: &Configuration) -> RefConfig {
        RefConfig {
            state: m.state_name(c.state).to_string(),
            heads: c.heads(),
            tapes: c
                .tapes
                .iter()
                .map(|t| {
                    t.cells
                        .iter()
                        .map(|(&cell, &s)| (cell, m.symbol_name(s).to_string()))
                        .collect()
                })
                .collect(),
        }
    }

    /// Drops blank cells so tapes compare by content.
    pub fn normalize(&self, mut c: RefConfig) -> RefConfig {
        for t in &mut c.tapes {
            t.retain(|_, s| *s != self.blank);
        }
        c
    }
}

/// Per-block visited spans by scanning every configuration of the run.
pub fn brute_force_spans(run: &RunRecord<'_>, b: u64) -> Vec<Vec<Span>> {
    let t = run.t();
    let k = run.machine().tapes();
    let mut heads_at: Vec<Vec<i64>> = Vec::with_capacity(t as usize + 1);
    run.walk(0, t, |c| heads_at.push(c.tapes.iter().map(|tape| tape.head).collect()));
    let blocks = t.div_ceil(b);
    (1..=blocks)
        .map(|kk| {
            let l = (kk - 1) * b + 1;
            let r = (kk * b).min(t);
            (0..k)
                .map(|i| {
                    let cells: Vec<i64> = (l - 1..=r).map(|tau| heads_at[tau as usize][i]).collect();
                    let lo = *cells.iter().min().unwrap();
                    let hi = *cells.iter().max().unwrap();
                    Span::from_bounds(lo, hi)
                })
                .collect()
        })
        .collect()
}

pub struct Streamed {
    pub configs: Vec<Configuration>,
    pub visits: Vec<(u64, u64, u64)>,
    pub outcome: HoloOutcome,
    pub ledger: ScreenLedger,
}

/// Runs the streaming simulator and rebuilds every emitted configuration.
pub fn stream(
    m: &MachineSpec,
    input: &[Symbol],
    horizon: u64,
    b: u64,
    c_int: u64,
    keep_rows: bool,
) -> Result<Streamed, HoloError> {
    let mut asm = HistoryAssembler::new(m, input);
    let mut configs = Vec::new();
    let mut visits = Vec::new();
    let mut ledger = if keep_rows {
        ScreenLedger::with_rows()
    } else {
        ScreenLedger::new()
    };
    let outcome = holo_run(
        m,
        input,
        horizon,
        b,
        c_int,
        &mut |f| {
            visits.push((f.leaf, f.offset, f.tau));
            configs.push(asm.apply(f).clone());
        },
        &mut ledger,
    )?;
    Ok(Streamed {
        configs,
        visits,
        outcome,
        ledger,
    })
}

/// A bundled machine with an input that keeps it busy for about `t` steps.
pub fn workload(name: &str, t: u64, seed: u64) -> (MachineSpec, Vec<Symbol>) {
    match name {
        "writer2" => (samples::writer2(), vec![]),
        "sweep" => (samples::sweep(t as usize), vec![]),
        "counter" => {
            let m = samples::counter();
            let x = samples::counter_input(&m, 20);
            (m, x)
        }
        "palin" => {
            let m = samples::palin();
            let len = samples::palin_length_for(t) as usize;
            let x = samples::palindrome(&m, len, &mut rng(seed));
            (m, x)
        }
        other => panic!("unknown workload {other}"),
    }
}

pub fn random_input<R: Rng>(m: &MachineSpec, len: usize, rng: &mut R) -> Vec<Symbol> {
    let alpha = m.input_alphabet();
    (0..len).map(|_| alpha[rng.gen_range(0..alpha.len())]).collect()
}
