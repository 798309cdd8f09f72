//! Self-delimiting byte encodings of summaries, configurations and
//! histories.
//!
//! Every record starts with a magic byte and a version byte, followed by
//! varint fields in declared order. Symbols are work-alphabet indices.

use std::collections::BTreeMap;

use crate::boundary::{InterfaceWindow, IntervalSummary, Policy, SideWindow, TapeWindow};
use crate::config::{Configuration, Span, Tape};
use crate::machine::{StateId, Symbol};
use crate::varint::{put_i64, put_u64, DecodeError, Reader};

pub const VERSION: u8 = 0x01;
pub const SUMMARY_MAGIC: u8 = 0x53;
pub const CONFIG_MAGIC: u8 = 0x43;
pub const HISTORY_MAGIC: u8 = 0x48;

fn put_span(out: &mut Vec<u8>, s: Span) {
    put_i64(out, s.lo);
    put_u64(out, s.len);
}

fn read_span(r: &mut Reader<'_>) -> Result<Span, DecodeError> {
    let lo = r.i64()?;
    let len = r.u64()?;
    if len == 0 && lo != 0 {
        return Err(DecodeError::NonCanonical("empty span with nonzero origin"));
    }
    if len > i64::MAX as u64 || (len > 0 && lo.checked_add(len as i64 - 1).is_none()) {
        return Err(DecodeError::Overflow);
    }
    Ok(Span { lo, len })
}

fn read_symbol(r: &mut Reader<'_>) -> Result<Symbol, DecodeError> {
    let v = r.u64()?;
    u16::try_from(v)
        .map(Symbol)
        .map_err(|_| DecodeError::InvalidTag { what: "symbol", value: v })
}

fn read_state(r: &mut Reader<'_>) -> Result<StateId, DecodeError> {
    let v = r.u64()?;
    u32::try_from(v)
        .map(StateId)
        .map_err(|_| DecodeError::InvalidTag { what: "state", value: v })
}

fn put_side(out: &mut Vec<u8>, w: &SideWindow) {
    put_span(out, w.span);
    for s in &w.symbols {
        put_u64(out, s.0 as u64);
    }
}

fn read_side(r: &mut Reader<'_>) -> Result<SideWindow, DecodeError> {
    let span = read_span(r)?;
    if span.len > r.remaining() as u64 {
        return Err(DecodeError::Truncated);
    }
    let symbols = (0..span.len)
        .map(|_| read_symbol(r))
        .collect::<Result<_, _>>()?;
    Ok(SideWindow { span, symbols })
}

pub fn write_summary(out: &mut Vec<u8>, s: &IntervalSummary) {
    out.push(SUMMARY_MAGIC);
    out.push(VERSION);
    put_u64(out, s.l);
    put_u64(out, s.r);
    put_u64(out, s.q_in.0 as u64);
    put_u64(out, s.q_out.0 as u64);
    put_u64(out, s.tapes() as u64);
    for (i, w) in s.window.tapes.iter().enumerate() {
        put_i64(out, s.heads_in[i]);
        put_i64(out, s.heads_out[i]);
        put_side(out, &w.entry);
        put_side(out, &w.exit);
    }
    out.push(s.policy.tag());
}

pub fn encode_summary(s: &IntervalSummary) -> Vec<u8> {
    let mut out = Vec::new();
    write_summary(&mut out, s);
    out
}

pub fn read_summary(r: &mut Reader<'_>) -> Result<IntervalSummary, DecodeError> {
    r.expect_header(SUMMARY_MAGIC, VERSION)?;
    let l = r.u64()?;
    let right = r.u64()?;
    let q_in = read_state(r)?;
    let q_out = read_state(r)?;
    let k = r.count(4)?;
    let mut heads_in = Vec::with_capacity(k);
    let mut heads_out = Vec::with_capacity(k);
    let mut tapes = Vec::with_capacity(k);
    for _ in 0..k {
        heads_in.push(r.i64()?);
        heads_out.push(r.i64()?);
        let entry = read_side(r)?;
        let exit = read_side(r)?;
        tapes.push(TapeWindow { entry, exit });
    }
    let policy = match r.byte()? {
        0 => Policy::Boundary,
        1 => Policy::Full,
        v => {
            return Err(DecodeError::InvalidTag {
                what: "policy",
                value: v as u64,
            })
        }
    };
    Ok(IntervalSummary {
        l,
        r: right,
        q_in,
        q_out,
        heads_in,
        heads_out,
        window: InterfaceWindow { tapes },
        policy,
    })
}

/// Decodes one summary from the front of `bytes`, returning it with the
/// number of bytes consumed.
pub fn decode_summary(bytes: &[u8]) -> Result<(IntervalSummary, usize), DecodeError> {
    let mut r = Reader::new(bytes);
    let s = read_summary(&mut r)?;
    Ok((s, r.pos()))
}

pub fn decode_summary_exact(bytes: &[u8]) -> Result<IntervalSummary, DecodeError> {
    let mut r = Reader::new(bytes);
    let s = read_summary(&mut r)?;
    r.finish()?;
    Ok(s)
}

pub fn write_configuration(out: &mut Vec<u8>, c: &Configuration) {
    out.push(CONFIG_MAGIC);
    out.push(VERSION);
    put_u64(out, c.time);
    put_u64(out, c.state.0 as u64);
    put_u64(out, c.tapes.len() as u64);
    for tape in &c.tapes {
        put_i64(out, tape.head);
        put_span(out, tape.touched);
        put_u64(out, tape.cells.len() as u64);
        let mut prev: Option<i64> = None;
        for (&cell, &sym) in &tape.cells {
            match prev {
                None => put_i64(out, cell),
                Some(p) => put_u64(out, (cell as i128 - p as i128 - 1) as u64),
            }
            put_u64(out, sym.0 as u64);
            prev = Some(cell);
        }
    }
}

pub fn encode_configuration(c: &Configuration) -> Vec<u8> {
    let mut out = Vec::new();
    write_configuration(&mut out, c);
    out
}

pub fn read_configuration(r: &mut Reader<'_>) -> Result<Configuration, DecodeError> {
    r.expect_header(CONFIG_MAGIC, VERSION)?;
    let time = r.u64()?;
    let state = read_state(r)?;
    let k = r.count(4)?;
    let mut tapes = Vec::with_capacity(k);
    for _ in 0..k {
        let head = r.i64()?;
        let touched = read_span(r)?;
        let n = r.count(2)?;
        let mut cells = BTreeMap::new();
        let mut prev: Option<i64> = None;
        for _ in 0..n {
            let cell = match prev {
                None => r.i64()?,
                Some(p) => {
                    let gap = r.u64()?;
                    i64::try_from(p as i128 + gap as i128 + 1).map_err(|_| DecodeError::Overflow)?
                }
            };
            cells.insert(cell, read_symbol(r)?);
            prev = Some(cell);
        }
        tapes.push(Tape {
            head,
            cells,
            touched,
        });
    }
    Ok(Configuration { time, state, tapes })
}

pub fn decode_configuration(bytes: &[u8]) -> Result<(Configuration, usize), DecodeError> {
    let mut r = Reader::new(bytes);
    let c = read_configuration(&mut r)?;
    Ok((c, r.pos()))
}

pub fn decode_configuration_exact(bytes: &[u8]) -> Result<Configuration, DecodeError> {
    let mut r = Reader::new(bytes);
    let c = read_configuration(&mut r)?;
    r.finish()?;
    Ok(c)
}

/// Streaming history encoder: header and count up front, then one
/// length-prefixed configuration per [`HistoryWriter::push`].
pub struct HistoryWriter {
    out: Vec<u8>,
    scratch: Vec<u8>,
}

impl HistoryWriter {
    pub fn new(count: u64) -> Self {
        let mut out = vec![HISTORY_MAGIC, VERSION];
        put_u64(&mut out, count);
        HistoryWriter {
            out,
            scratch: Vec::new(),
        }
    }

    pub fn push(&mut self, c: &Configuration) {
        self.scratch.clear();
        write_configuration(&mut self.scratch, c);
        put_u64(&mut self.out, self.scratch.len() as u64);
        self.out.extend_from_slice(&self.scratch);
    }

    pub fn finish(self) -> Vec<u8> {
        self.out
    }
}

pub fn encode_history(configs: &[Configuration]) -> Vec<u8> {
    let mut w = HistoryWriter::new(configs.len() as u64);
    for c in configs {
        w.push(c);
    }
    w.finish()
}

pub fn read_history(r: &mut Reader<'_>) -> Result<Vec<Configuration>, DecodeError> {
    r.expect_header(HISTORY_MAGIC, VERSION)?;
    let n = r.count(3)?;
    let mut out = Vec::with_capacity(n);
    for _ in 0..n {
        let len = r.count(1)?;
        let body = r.take(len)?;
        let mut inner = Reader::new(body);
        out.push(read_configuration(&mut inner)?);
        inner.finish()?;
    }
    Ok(out)
}

pub fn decode_history(bytes: &[u8]) -> Result<(Vec<Configuration>, usize), DecodeError> {
    let mut r = Reader::new(bytes);
    let h = read_history(&mut r)?;
    Ok((h, r.pos()))
}

pub fn decode_history_exact(bytes: &[u8]) -> Result<Vec<Configuration>, DecodeError> {
    let mut r = Reader::new(bytes);
    let h = read_history(&mut r)?;
    r.finish()?;
    Ok(h)
}
