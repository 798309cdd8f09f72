//! Fixed-size reconstruction programs.
//!
//! A witness is data: a driver tag plus the machine's canonical text. The
//! driver is this module's interpreter. Given a full-window summary it
//! rebuilds one configuration (pointwise) or every configuration of the
//! interval (history), so the witness length depends only on the machine.

use thiserror::Error;

use crate::boundary::IntervalSummary;
use crate::encoding::{
    decode_summary, decode_summary_exact, encode_configuration, HistoryWriter, VERSION,
};
use crate::format::{parse_machine, serialize_machine, ParseError};
use crate::machine::MachineSpec;
use crate::replay::{replay_from_summary, ReplayError};
use crate::varint::{put_u64, DecodeError, Reader};

pub const WITNESS_MAGIC: u8 = 0x57;
pub const POINTWISE_TAG: u8 = 0x2A;
pub const HISTORY_TAG: u8 = 0x2B;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum WitnessKind {
    Pointwise,
    History,
}

impl WitnessKind {
    pub fn tag(self) -> u8 {
        match self {
            WitnessKind::Pointwise => POINTWISE_TAG,
            WitnessKind::History => HISTORY_TAG,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WitnessProgram {
    pub kind: WitnessKind,
    pub bytes: Vec<u8>,
}

#[derive(Debug, Error)]
pub enum WitnessError {
    #[error("malformed witness or conditional input: {0}")]
    Decode(#[from] DecodeError),
    #[error("witness carries an invalid machine: {0}")]
    Machine(#[from] ParseError),
    #[error("witness machine text is not UTF-8")]
    Utf8,
    #[error(transparent)]
    Replay(#[from] ReplayError),
}

pub fn build_witness(m: &MachineSpec, kind: WitnessKind) -> WitnessProgram {
    let text = serialize_machine(m);
    let mut bytes = vec![WITNESS_MAGIC, VERSION, kind.tag()];
    put_u64(&mut bytes, text.len() as u64);
    bytes.extend_from_slice(text.as_bytes());
    WitnessProgram { kind, bytes }
}

fn load(bytes: &[u8]) -> Result<(WitnessKind, MachineSpec), WitnessError> {
    let mut r = Reader::new(bytes);
    r.expect_header(WITNESS_MAGIC, VERSION)?;
    let kind = match r.byte()? {
        POINTWISE_TAG => WitnessKind::Pointwise,
        HISTORY_TAG => WitnessKind::History,
        v => {
            return Err(DecodeError::InvalidTag {
                what: "witness kind",
                value: v as u64,
            }
            .into())
        }
    };
    let len = r.count(1)?;
    let text = std::str::from_utf8(r.take(len)?).map_err(|_| WitnessError::Utf8)?;
    r.finish()?;
    Ok((kind, parse_machine(text)?))
}

/// Pointwise conditional input: the summary followed by a varint τ.
pub fn pointwise_input(s: &IntervalSummary, tau: u64) -> Vec<u8> {
    let mut out = crate::encoding::encode_summary(s);
    put_u64(&mut out, tau);
    out
}

pub fn run_witness(w: &WitnessProgram, conditional: &[u8]) -> Result<Vec<u8>, WitnessError> {
    let (kind, m) = load(&w.bytes)?;
    match kind {
        WitnessKind::Pointwise => {
            let (s, used) = decode_summary(conditional)?;
            let mut r = Reader::new(&conditional[used..]);
            let tau = r.u64()?;
            r.finish()?;
            Ok(encode_configuration(&replay_from_summary(&m, &s, tau)?))
        }
        WitnessKind::History => {
            let s = decode_summary_exact(conditional)?;
            if s.l == 0 || s.r < s.l {
                return Err(ReplayError::Mismatch("interval").into());
            }
            let mut out = HistoryWriter::new(s.r + 2 - s.l);
            for tau in s.l - 1..=s.r {
                out.push(&replay_from_summary(&m, &s, tau)?);
            }
            Ok(out.finish())
        }
    }
}
