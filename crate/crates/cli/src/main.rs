use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use holotm::boundary::{check_block_respecting, decompose, Policy};
use holotm::encoding::{encode_history, encode_summary};
use holotm::holo::{holo_run, reconstruct_at, HistoryAssembler, HoloError};
use holotm::ledger::ScreenLedger;
use holotm::scaling::{area_law_study, ceil_sqrt, parse_grid, report_csv, report_svg, BlockRule};
use holotm::spacetime::{build_dag, export_dag, DagFormat};
use holotm::tree::{build_tree, label_tree, time_to_leaf, tree_json};
use holotm::witness::{build_witness, WitnessKind};
use holotm::{parse_machine, run, samples, Configuration, MachineSpec, Symbol};

const USAGE: u8 = 2;
const MODEL: u8 = 3;
const INTERNAL: u8 = 4;

/// An error with the exit code it maps to.
struct Failure {
    code: u8,
    error: anyhow::Error,
}

impl Failure {
    fn usage(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: USAGE,
            error: error.into(),
        }
    }

    fn model(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: MODEL,
            error: error.into(),
        }
    }

    fn internal(error: impl Into<anyhow::Error>) -> Self {
        Failure {
            code: INTERNAL,
            error: error.into(),
        }
    }
}

impl From<HoloError> for Failure {
    fn from(e: HoloError) -> Self {
        match e {
            HoloError::NonBlockRespecting { .. } | HoloError::RevisitedCell { .. } => {
                Failure::model(e)
            }
            HoloError::ZeroParameter | HoloError::EmptyRun | HoloError::Tree(_) => {
                Failure::usage(e)
            }
            _ => Failure::internal(e),
        }
    }
}

type CmdResult = Result<(), Failure>;

#[derive(Parser)]
#[command(name = "holotm", version, about = "Streaming simulation of multitape Turing machines")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Target {
    /// Machine file, or `builtin:<name>[:<n>]` with name writer2, sweep, counter or palin
    machine: String,
    /// Input string; symbols are characters, or whitespace-separated names.
    /// Builtins default to their bundled input.
    input: Option<String>,
}

#[derive(Args)]
struct Blocks {
    /// Step horizon
    #[arg(long, default_value_t = 10_000)]
    t: u64,
    /// Block size (default ⌈√t⌉)
    #[arg(long)]
    b: Option<u64>,
    /// Per-block window limit factor
    #[arg(long = "c-int", default_value_t = 2)]
    c_int: u64,
}

impl Blocks {
    fn b(&self) -> u64 {
        self.b.unwrap_or_else(|| ceil_sqrt(self.t))
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Boundary,
    Full,
}

impl From<PolicyArg> for Policy {
    fn from(p: PolicyArg) -> Self {
        match p {
            PolicyArg::Boundary => Policy::Boundary,
            PolicyArg::Full => Policy::Full,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Pointwise,
    History,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Dot,
}

#[derive(Clone, Copy, ValueEnum)]
enum Family {
    /// The given (or bundled) input at every grid point
    Fixed,
    /// A random palindrome sized to keep the machine busy for about t steps
    Palindrome,
}

#[derive(Subcommand)]
enum Command {
    /// Run the machine directly and report how it halted
    Run {
        #[command(flatten)]
        target: Target,
        #[arg(long = "max-steps", default_value_t = 10_000)]
        max_steps: u64,
        /// Write the encoded history C_0..C_t to this file
        #[arg(long = "emit-history")]
        emit_history: Option<PathBuf>,
    },
    /// Stream the run through the causal tree with bounded memory
    Simulate {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        blocks: Blocks,
        /// Compare every emitted configuration with a direct run
        #[arg(long)]
        verify: bool,
        /// Write the per-step footprint as CSV
        #[arg(long)]
        ledger: Option<PathBuf>,
    },
    /// Report each block's visited span against the limit
    #[command(name = "check-blocks", alias = "check")]
    CheckBlocks {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        blocks: Blocks,
    },
    /// Print the causal tree as JSON
    #[command(alias = "inspect")]
    Tree {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        blocks: Blocks,
        /// Attach encoded summaries under this policy
        #[arg(long)]
        labels: Option<PolicyArg>,
    },
    /// Rebuild one configuration from a streaming pass
    #[command(name = "replay-at")]
    ReplayAt {
        #[command(flatten)]
        target: Target,
        #[command(flatten)]
        blocks: Blocks,
        #[arg(long)]
        tau: u64,
    },
    /// Write a reconstruction program for the machine
    Witness {
        machine: String,
        #[arg(long, value_enum, default_value = "pointwise")]
        kind: KindArg,
        /// Output file (default stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measure peak footprints over a grid of horizons
    #[command(alias = "study")]
    Scaling {
        #[command(flatten)]
        target: Target,
        /// Horizons, e.g. `2^10..2^18` or `1000,2000,4000`
        #[arg(long = "t-grid", default_value = "2^10..2^16")]
        t_grid: String,
        /// Block size rule: sqrt, 2sqrt, or a fixed number
        #[arg(long = "b-rule", default_value = "sqrt")]
        b_rule: String,
        #[arg(long = "c-int", default_value_t = 2)]
        c_int: u64,
        /// Print the fitted exponent
        #[arg(long)]
        fit: bool,
        /// Write the CSV here instead of stdout
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long)]
        svg: Option<PathBuf>,
        #[arg(long = "input-family", value_enum, default_value = "fixed")]
        input_family: Family,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Export the spacetime graph of a run
    #[command(name = "export-dag", alias = "export")]
    ExportDag {
        #[command(flatten)]
        target: Target,
        #[arg(long = "max-steps", default_value_t = 10_000)]
        max_steps: u64,
        #[arg(long, value_enum, default_value = "json")]
        format: FormatArg,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load_machine(arg: &str) -> Result<(MachineSpec, Vec<Symbol>), Failure> {
    if let Some(rest) = arg.strip_prefix("builtin:") {
        let (name, param) = match rest.split_once(':') {
            Some((name, n)) => {
                let n = n
                    .parse()
                    .map_err(|_| Failure::usage(anyhow!("bad builtin parameter `{n}`")))?;
                (name, Some(n))
            }
            None => (rest, None),
        };
        return samples::builtin(name, param).ok_or_else(|| {
            Failure::usage(anyhow!(
                "unknown builtin `{name}` (expected one of {})",
                samples::NAMES.join(", ")
            ))
        });
    }
    let text = fs::read_to_string(arg)
        .with_context(|| format!("cannot read {arg}"))
        .map_err(Failure::usage)?;
    let m = parse_machine(&text)
        .with_context(|| format!("cannot parse {arg}"))
        .map_err(Failure::usage)?;
    Ok((m, Vec::new()))
}

fn load(target: &Target) -> Result<(MachineSpec, Vec<Symbol>), Failure> {
    let (m, default_input) = load_machine(&target.machine)?;
    let input = match &target.input {
        Some(text) => m
            .parse_input(text)
            .context("invalid input")
            .map_err(Failure::usage)?,
        None => default_input,
    };
    Ok((m, input))
}

fn write_out(path: &Path, bytes: &[u8]) -> CmdResult {
    fs::write(path, bytes)
        .with_context(|| format!("cannot write {}", path.display()))
        .map_err(Failure::usage)
}

fn hash_hex(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

fn cmd_run(target: &Target, max_steps: u64, emit: Option<&Path>) -> CmdResult {
    let (m, input) = load(target)?;
    let rec = run(&m, &input, max_steps);
    println!("t={} {}", rec.t(), rec.halted());
    println!("state={}", m.state_name(rec.state(rec.t())));
    if let Some(path) = emit {
        write_out(path, &encode_history(&rec.history()))?;
    }
    Ok(())
}

fn cmd_simulate(target: &Target, blocks: &Blocks, verify: bool, ledger_out: Option<&Path>) -> CmdResult {
    let (m, input) = load(target)?;
    let b = blocks.b();
    let mut ledger = if ledger_out.is_some() {
        ScreenLedger::with_rows()
    } else {
        ScreenLedger::new()
    };
    let mut asm = HistoryAssembler::new(&m, &input);
    let mut oracle = Configuration::initial(&m, &input);
    let mut verified = 0u64;
    let mut emitted = 0u64;
    let mut first_mismatch = None;
    let outcome = holo_run(
        &m,
        &input,
        blocks.t,
        b,
        blocks.c_int,
        &mut |f| {
            emitted += 1;
            if !verify {
                return;
            }
            let got = asm.apply(f);
            if oracle.advance(&m).is_ok() && *got == oracle {
                verified += 1;
            } else if first_mismatch.is_none() {
                first_mismatch = Some(f.tau);
            }
        },
        &mut ledger,
    )?;
    println!(
        "t={} b={} c_int={} leaves={} depth={}",
        outcome.t, outcome.b, outcome.c_int, outcome.leaves, outcome.depth
    );
    println!(
        "max_screen={} max_book={} max_total={} max_pending={}",
        ledger.max_screen(),
        ledger.max_book(),
        ledger.max_total(),
        outcome.max_pending
    );
    println!("root={}", hash_hex(&encode_summary(&outcome.root)));
    if let Some(path) = ledger_out {
        write_out(path, ledger.to_csv().as_bytes())?;
    }
    if verify {
        println!("verified {verified}/{emitted}");
        if let Some(tau) = first_mismatch {
            return Err(Failure::internal(anyhow!(
                "streamed configuration differs from the direct run at step {tau}"
            )));
        }
    }
    Ok(())
}

fn cmd_check(target: &Target, blocks: &Blocks) -> CmdResult {
    let (m, input) = load(target)?;
    let rec = run(&m, &input, blocks.t);
    let report = check_block_respecting(&rec, blocks.b(), blocks.c_int).map_err(Failure::usage)?;
    println!("t={} b={} c_int={} limit={}", rec.t(), report.b, report.c_int, report.limit);
    for blk in &report.blocks {
        let spans: Vec<String> = blk
            .spans
            .iter()
            .map(|s| format!("{s}:{}", s.len))
            .collect();
        println!(
            "block {} [{},{}] {} {}",
            blk.block,
            blk.l,
            blk.r,
            spans.join(" "),
            if blk.ok { "ok" } else { "FAIL" }
        );
    }
    let failed: Vec<u64> = report.failures().map(|f| f.block).collect();
    if failed.is_empty() {
        println!("block-respecting");
        Ok(())
    } else {
        Err(Failure::model(anyhow!(
            "not block-respecting: {} block(s) exceed the limit, first is block {}; try a larger b or c_int",
            failed.len(),
            failed[0]
        )))
    }
}

fn cmd_tree(target: &Target, blocks: &Blocks, labels: Option<PolicyArg>) -> CmdResult {
    let (m, input) = load(target)?;
    let rec = run(&m, &input, blocks.t);
    let d = decompose(rec.t(), blocks.b()).map_err(Failure::usage)?;
    let mut tree = build_tree(&d).map_err(Failure::usage)?;
    if let Some(policy) = labels {
        tree = label_tree(&tree, &rec, blocks.c_int, policy.into()).map_err(Failure::model)?;
    }
    let json = serde_json::to_string_pretty(&tree_json(&tree)).map_err(Failure::internal)?;
    println!("{json}");
    Ok(())
}

fn cmd_replay_at(target: &Target, blocks: &Blocks, tau: u64) -> CmdResult {
    let (m, input) = load(target)?;
    let b = blocks.b();
    let c = reconstruct_at(&m, &input, blocks.t, b, blocks.c_int, tau)?;
    let d = decompose(blocks.t, b).map_err(Failure::usage)?;
    let (leaf, offset) = time_to_leaf(tau, &d).map_err(Failure::usage)?;
    println!("leaf={leaf} offset={offset}");
    println!("{}", c.render(&m));
    Ok(())
}

fn cmd_witness(machine: &str, kind: KindArg, out: Option<&Path>) -> CmdResult {
    let (m, _) = load_machine(machine)?;
    let kind = match kind {
        KindArg::Pointwise => WitnessKind::Pointwise,
        KindArg::History => WitnessKind::History,
    };
    let w = build_witness(&m, kind);
    match out {
        Some(path) => write_out(path, &w.bytes),
        None => io::stdout()
            .write_all(&w.bytes)
            .context("cannot write to stdout")
            .map_err(Failure::usage),
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_scaling(
    target: &Target,
    grid: &str,
    b_rule: &str,
    c_int: u64,
    fit: bool,
    csv: Option<&Path>,
    svg: Option<&Path>,
    family: Family,
    seed: u64,
) -> CmdResult {
    let (m, input) = load(target)?;
    let grid = parse_grid(grid).map_err(Failure::usage)?;
    let rule = match b_rule {
        "sqrt" => BlockRule::Sqrt,
        "2sqrt" => BlockRule::TwiceSqrt,
        n => BlockRule::Fixed(
            n.parse()
                .ok()
                .filter(|&b| b > 0)
                .ok_or_else(|| Failure::usage(anyhow!("bad block rule `{n}`")))?,
        ),
    };
    let input_for = |t: u64| match family {
        Family::Fixed => input.clone(),
        Family::Palindrome => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ t);
            samples::palindrome(&m, samples::palin_length_for(t) as usize, &mut rng)
        }
    };
    let report = area_law_study(&m, &input_for, &grid, rule, c_int);
    let text = report_csv(&report);
    match csv {
        Some(path) => write_out(path, text.as_bytes())?,
        None => print!("{text}"),
    }
    if let Some(path) = svg {
        write_out(path, report_svg(&report).as_bytes())?;
    }
    if fit {
        match report.fit {
            Some(f) => eprintln!(
                "exponent={:.4} intercept={:.4} residual={:.4}",
                f.slope, f.intercept, f.residual
            ),
            None => eprintln!("exponent unavailable: fewer than 4 grid points succeeded"),
        }
    }
    if let Some((t, e)) = report.failures.into_iter().next() {
        let f = Failure::from(e);
        return Err(Failure {
            code: f.code,
            error: f.error.context(format!("grid point t={t} failed")),
        });
    }
    Ok(())
}

fn cmd_export(target: &Target, max_steps: u64, format: FormatArg, out: Option<&Path>) -> CmdResult {
    let (m, input) = load(target)?;
    let rec = run(&m, &input, max_steps);
    let format = match format {
        FormatArg::Json => DagFormat::Json,
        FormatArg::Dot => DagFormat::Dot,
    };
    let text = export_dag(&build_dag(&rec), format);
    match out {
        Some(path) => write_out(path, text.as_bytes()),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn dispatch(cli: Cli) -> CmdResult {
    match cli.command {
        Command::Run {
            target,
            max_steps,
            emit_history,
        } => cmd_run(&target, max_steps, emit_history.as_deref()),
        Command::Simulate {
            target,
            blocks,
            verify,
            ledger,
        } => cmd_simulate(&target, &blocks, verify, ledger.as_deref()),
        Command::CheckBlocks { target, blocks } => cmd_check(&target, &blocks),
        Command::Tree {
            target,
            blocks,
            labels,
        } => cmd_tree(&target, &blocks, labels),
        Command::ReplayAt { target, blocks, tau } => cmd_replay_at(&target, &blocks, tau),
        Command::Witness { machine, kind, out } => cmd_witness(&machine, kind, out.as_deref()),
        Command::Scaling {
            target,
            t_grid,
            b_rule,
            c_int,
            fit,
            csv,
            svg,
            input_family,
            seed,
        } => cmd_scaling(
            &target,
            &t_grid,
            &b_rule,
            c_int,
            fit,
            csv.as_deref(),
            svg.as_deref(),
            input_family,
            seed,
        ),
        Command::ExportDag {
            target,
            max_steps,
            format,
            out,
        } => cmd_export(&target, max_steps, format, out.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {:#}", f.error);
            ExitCode::from(f.code)
        }
    }
}
