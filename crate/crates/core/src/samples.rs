//! Bundled sample machines and their input families.

use rand::{Rng, SeedableRng};

use crate::format::parse_machine;
use crate::machine::{MachineBuilder, MachineSpec, Move, Symbol};

pub const WRITER2_TM: &str = include_str!("../samples/writer2.tm");
pub const SWEEP8_TM: &str = include_str!("../samples/sweep8.tm");
pub const COUNTER_TM: &str = include_str!("../samples/counter.tm");
pub const PALIN_TM: &str = include_str!("../samples/palin.tm");

/// Names accepted by [`builtin`].
pub const NAMES: [&str; 4] = ["writer2", "sweep", "counter", "palin"];

pub fn writer2() -> MachineSpec {
    parse_machine(WRITER2_TM).expect("bundled writer2 parses")
}

pub fn counter() -> MachineSpec {
    parse_machine(COUNTER_TM).expect("bundled counter parses")
}

pub fn palin() -> MachineSpec {
    parse_machine(PALIN_TM).expect("bundled palin parses")
}

/// Head walks right over `n` blank cells writing `1`, then accepts.
pub fn sweep(n: usize) -> MachineSpec {
    if n == 8 {
        return parse_machine(SWEEP8_TM).expect("bundled sweep8 parses");
    }
    build_sweep(n).build().expect("sweep is well formed")
}

fn base(name: &str, tapes: usize, input: &[&str], work: &[&str], start: &str) -> MachineBuilder {
    let mut b = MachineBuilder::new(name, tapes);
    b.blank = "_".into();
    b.input_alphabet = input.iter().map(|s| (*s).to_owned()).collect();
    b.work_alphabet = work.iter().map(|s| (*s).to_owned()).collect();
    b.start = start.into();
    b.accept = "accept".into();
    b.reject = "reject".into();
    b
}

pub fn build_writer2() -> MachineBuilder {
    use Move::*;
    let mut b = base("writer2", 1, &["1"], &["1", "_"], "q0");
    b.rule("q0", &["1"], "reject", &["1"], &[Stay]);
    b.rule("q0", &["_"], "q1", &["1"], &[Right]);
    b.rule("q1", &["1"], "reject", &["1"], &[Stay]);
    b.rule("q1", &["_"], "accept", &["1"], &[Stay]);
    b
}

pub fn build_sweep(n: usize) -> MachineBuilder {
    assert!(n >= 1, "sweep needs at least one step");
    let name = format!("sweep{n}");
    let mut b = base(&name, 1, &["1"], &["1", "_"], "q0");
    for i in 0..n {
        let q = format!("q{i}");
        let next = if i + 1 == n {
            "accept".to_owned()
        } else {
            format!("q{}", i + 1)
        };
        b.rule(&q, &["1"], "reject", &["1"], &[Move::Stay]);
        b.rule(&q, &["_"], &next, &["1"], &[Move::Right]);
    }
    b
}

/// Binary increment loop, least significant bit at cell 0. Accepts when
/// the carry runs off the end, i.e. after counting to 2^n on input 0^n.
pub fn build_counter() -> MachineBuilder {
    use Move::*;
    let mut b = base("counter", 1, &["0", "1"], &["0", "1", "_"], "inc");
    b.rule("inc", &["0"], "back", &["1"], &[Left]);
    b.rule("inc", &["1"], "inc", &["0"], &[Right]);
    b.rule("inc", &["_"], "accept", &["_"], &[Stay]);
    b.rule("back", &["0"], "back", &["0"], &[Left]);
    b.rule("back", &["1"], "back", &["1"], &[Left]);
    b.rule("back", &["_"], "inc", &["_"], &[Right]);
    b
}

/// Two-tape palindrome checker. Tape 1 is consumed from both ends; tape 2
/// gains an `x` per matched pair.
pub fn build_palin() -> MachineBuilder {
    use Move::*;
    let mut b = base("palin", 2, &["a", "b"], &["a", "b", "x", "_"], "start");
    let all = ["a", "b", "x", "_"];
    for s2 in all {
        b.rule("start", &["a", s2], "seek_a", &["_", s2], &[Right, Stay]);
        b.rule("start", &["b", s2], "seek_b", &["_", s2], &[Right, Stay]);
        b.rule("start", &["x", s2], "reject", &["x", s2], &[Stay, Stay]);
        b.rule("start", &["_", s2], "accept", &["_", s2], &[Stay, Stay]);
    }
    for (seek, check) in [("seek_a", "check_a"), ("seek_b", "check_b")] {
        for s2 in all {
            for s1 in ["a", "b", "x"] {
                b.rule(seek, &[s1, s2], seek, &[s1, s2], &[Right, Stay]);
            }
            b.rule(seek, &["_", s2], check, &["_", s2], &[Left, Stay]);
        }
    }
    for (check, want, other) in [("check_a", "a", "b"), ("check_b", "b", "a")] {
        for s2 in all {
            b.rule(check, &[want, s2], "return", &["_", "x"], &[Left, Right]);
            b.rule(check, &[other, s2], "reject", &[other, s2], &[Stay, Stay]);
            b.rule(check, &["x", s2], "reject", &["x", s2], &[Stay, Stay]);
            b.rule(check, &["_", s2], "accept", &["_", s2], &[Stay, Stay]);
        }
    }
    for s2 in all {
        for s1 in ["a", "b", "x"] {
            b.rule("return", &[s1, s2], "return", &[s1, s2], &[Left, Stay]);
        }
        b.rule("return", &["_", s2], "start", &["_", s2], &[Right, Stay]);
    }
    b
}

/// Input `0^n` for the counter.
pub fn counter_input(m: &MachineSpec, n: usize) -> Vec<Symbol> {
    vec![m.symbol("0").expect("counter alphabet"); n]
}

/// Random palindrome over {a, b} of length `len`.
pub fn palindrome<R: Rng>(m: &MachineSpec, len: usize, rng: &mut R) -> Vec<Symbol> {
    let a = m.symbol("a").expect("palin alphabet");
    let b = m.symbol("b").expect("palin alphabet");
    let mut v = vec![a; len];
    for i in 0..len.div_ceil(2) {
        let s = if rng.gen::<bool>() { a } else { b };
        v[i] = s;
        v[len - 1 - i] = s;
    }
    v
}

/// Steps `palin` takes to accept a palindrome of length `len`.
pub fn palin_steps(len: u64) -> u64 {
    // Each round over r remaining cells: r-1 seeks, the step onto the blank,
    // the check, r-2 returns and the step back onto the remainder.
    let mut r = len;
    let mut steps = 0;
    while r >= 2 {
        steps += 1 + (r - 1) + 1 + 1 + (r - 2) + 1;
        r -= 2;
    }
    steps + if r == 1 { 3 } else { 1 }
}

/// Smallest palindrome length whose accepting run takes at least `t` steps.
pub fn palin_length_for(t: u64) -> u64 {
    let mut len = 0;
    while palin_steps(len) < t {
        len += 1;
    }
    len
}

/// Machine and default input for a builtin name; `param` is the sweep
/// length or the counter width.
pub fn builtin(name: &str, param: Option<u64>) -> Option<(MachineSpec, Vec<Symbol>)> {
    match name {
        "writer2" => Some((writer2(), Vec::new())),
        "sweep" => Some((sweep(param.unwrap_or(8) as usize), Vec::new())),
        "counter" => {
            let m = counter();
            let input = counter_input(&m, param.unwrap_or(20) as usize);
            Some((m, input))
        }
        "palin" => {
            let m = palin();
            let len = param.unwrap_or(8) as usize;
            let input = palindrome(&m, len, &mut rand_chacha::ChaCha8Rng::seed_from_u64(0));
            Some((m, input))
        }
        _ => None,
    }
}
