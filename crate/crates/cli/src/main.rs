mod commands;
mod report;

use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use revcipher_core::builders::Variant;
use revcipher_core::Cipher;

/// Reversible circuits for LBlock and LiCi: synthesis, construction,
/// verification, resource counts and Grover cost estimates.
#[derive(Debug, Parser)]
#[command(name = "revcipher", version)]
pub struct Cli {
    /// Report format written to stdout.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    pub format: Format,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Text,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PolicyArg {
    AllGates,
    CliffordOnly,
    Both,
}

#[derive(Debug, clap::Args)]
pub struct CipherArgs {
    #[arg(long, value_parser = parse_cipher)]
    pub cipher: Cipher,
    /// LBlock only; ignored for LiCi.
    #[arg(long, value_parser = parse_variant, default_value = "improved")]
    pub variant: Variant,
    /// Defaults to the full round count.
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Replace a bundled S-box circuit with a `synth` output file.
    #[arg(long = "sbox", value_name = "NAME=FILE")]
    pub sboxes: Vec<String>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize an in-place circuit for a 4-bit S-box.
    Synth {
        /// 16 hex digits, image of 0 first; whitespace is ignored.
        #[arg(long)]
        table: String,
        #[arg(long, default_value = "custom")]
        name: String,
        /// Require the last gate to be a Toffoli.
        #[arg(long)]
        trailing_toffoli: bool,
        /// Cost bound in half-units (NOT=1, CNOT=2, Toffoli=10 by default).
        #[arg(long, default_value_t = 80)]
        budget: u32,
        /// Give up once the search holds this many states (about 65 bytes
        /// each).
        #[arg(long, default_value_t = 40_000_000)]
        max_states: usize,
        /// Gate weights as NOT,CNOT,TOFFOLI in half-units.
        #[arg(long, value_name = "N,C,T")]
        weights: Option<String>,
        /// Circuit JSON output file.
        #[arg(long)]
        out: Option<String>,
        /// Gate listing output file.
        #[arg(long)]
        listing: Option<String>,
    },
    /// Build a full cipher circuit.
    Build {
        #[command(flatten)]
        cipher: CipherArgs,
        /// Circuit JSON output file.
        #[arg(long)]
        out: Option<String>,
    },
    /// Compare a circuit with the reference cipher on random inputs.
    Verify {
        #[command(flatten)]
        cipher: CipherArgs,
        /// Verify this circuit file instead of building one.
        #[arg(long)]
        circuit: Option<String>,
        #[arg(long, default_value_t = 100)]
        samples: usize,
        #[arg(long, default_value_t = report::DEFAULT_SEED)]
        seed: u64,
        /// Test hook: delete the gate at this index before simulating.
        #[arg(long, value_name = "GATE_INDEX")]
        inject_fault: Option<usize>,
    },
    /// Clifford+T resource counts of a circuit file.
    Count {
        #[arg(long)]
        circuit: String,
        /// Row label for the text table.
        #[arg(long)]
        name: Option<String>,
        /// Report output file (consumable by `estimate`).
        #[arg(long)]
        out: Option<String>,
    },
    /// Grover key-search cost from a resource summary.
    Estimate {
        /// `count` report or bare resource summary (JSON).
        #[arg(long)]
        summary: String,
        #[arg(long)]
        key_bits: u32,
        #[arg(long, default_value_t = 64)]
        block_bits: u32,
        #[arg(long, value_enum, default_value_t = PolicyArg::Both)]
        policy: PolicyArg,
        /// Threshold configuration `{"levels": {...}}`.
        #[arg(long)]
        thresholds: Option<String>,
        #[arg(long)]
        name: Option<String>,
    },
    /// Write a circuit file as OpenQASM 2.0.
    ExportQasm {
        #[arg(long)]
        circuit: String,
        #[arg(long)]
        out: Option<String>,
    },
    /// Build all three circuits and print the resource, comparison and
    /// attack-cost tables.
    Tables {
        #[arg(long)]
        thresholds: Option<String>,
    },
}

fn parse_cipher(s: &str) -> Result<Cipher, String> {
    s.parse()
}

fn parse_variant(s: &str) -> Result<Variant, String> {
    s.parse()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(commands::exit_code_for(&e) as u8)
        }
    }
}
