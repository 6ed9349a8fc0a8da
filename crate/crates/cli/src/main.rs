//! `cqi`: decide cyclic-quasi-injectivity of finite abelian groups, count
//! the cyclic subgroups carrying non-extendable homomorphisms, and
//! cross-check every closed form against brute force.
//!
//! Reports go to standard output (or `--out`); diagnostics go to standard
//! error. Exit codes: 0 success/verified, 1 mismatch, 2 usage or parse
//! error, 3 cap exceeded in a required check.

mod commands;

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use cqi_core::extension::DEFAULT_ENDOMORPHISM_CAP;
use cqi_core::group::DEFAULT_ENUMERATION_CAP;

#[derive(Parser)]
#[command(
    name = "cqi",
    version,
    about = "Cyclic-quasi-injectivity of finite abelian groups: analysis, exact counts, verification, sweeps"
)]
struct Cli {
    /// Write the report to this path instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Add a unix-epoch timestamp field to JSON reports (off by default so
    /// identical runs stay byte-identical).
    #[arg(long, global = true)]
    timestamps: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Classes,
    Subgroups,
    Cqi,
    Verify,
}

#[derive(Subcommand)]
enum Command {
    /// Decompose a group into p-components and report homocyclic verdicts
    /// and the overall cyclic-quasi-injectivity verdict.
    Analyze {
        /// Group spec: "Z(6)+Z(12)", "p=2: 2^1+4^1", or JSON {"p":2,"parts":[[1,1],[2,1]]}.
        spec: String,
    },

    /// Count the cyclic subgroups with non-extendable homomorphisms, with
    /// per-term breakdowns (closed forms for p-groups, inclusion-exclusion
    /// for composite orders).
    Count {
        spec: String,
        /// Cross-check the counts against brute-force enumeration.
        #[arg(long)]
        oracle: bool,
        /// Cap on group order for element-level enumeration.
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap_enum: u64,
        /// Cap on the endomorphism search space for the oracle.
        #[arg(long, default_value_t = DEFAULT_ENDOMORPHISM_CAP)]
        cap_end: u64,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },

    /// Run the invariant checks for one spec: closed forms vs enumeration,
    /// fiber sums, condition equivalence, and (under the caps) the
    /// brute-force oracle.
    Verify {
        spec: String,
        /// Treat cap-skipped checks as required (exit 3 instead of a warning).
        #[arg(long)]
        oracle: bool,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap_enum: u64,
        #[arg(long, default_value_t = DEFAULT_ENDOMORPHISM_CAP)]
        cap_end: u64,
    },

    /// Check the max-jump identity for one n: the jump sum over all
    /// permutations equals the staircase group's class count.
    Perm {
        n: u32,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap_enum: u64,
    },

    /// Emit one count report per signature with group order up to
    /// --max-order, for each prime, in deterministic order.
    Sweep {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        max_order: u64,
        /// Primes to sweep, comma separated.
        #[arg(long, value_delimiter = ',', default_values_t = vec![2u64, 3, 5])]
        primes: Vec<u64>,
        /// Which fields to compute; "verify" additionally cross-checks each
        /// row against enumeration where the caps allow.
        #[arg(long, value_enum, value_delimiter = ',',
              default_values_t = vec![Mode::Classes, Mode::Subgroups, Mode::Cqi])]
        modes: Vec<Mode>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
        #[arg(long, default_value_t = DEFAULT_ENUMERATION_CAP)]
        cap_enum: u64,
        #[arg(long, default_value_t = DEFAULT_ENDOMORPHISM_CAP)]
        cap_end: u64,
    },
}

fn emit(text: &str, out: Option<&PathBuf>) -> std::io::Result<()> {
    match out {
        Some(path) => std::fs::write(path, text),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze { ref spec } => commands::cmd_analyze(spec, cli.timestamps),
        Command::Count {
            ref spec,
            oracle,
            cap_enum,
            cap_end,
            format,
        } => commands::cmd_count(spec, oracle, cap_enum, cap_end, format, cli.timestamps),
        Command::Verify {
            ref spec,
            oracle,
            cap_enum,
            cap_end,
        } => commands::cmd_verify(spec, oracle, cap_enum, cap_end, cli.timestamps),
        Command::Perm { n, cap_enum } => commands::cmd_perm(n, cap_enum, cli.timestamps),
        Command::Sweep {
            max_order,
            ref primes,
            ref modes,
            format,
            cap_enum,
            cap_end,
        } => commands::cmd_sweep(
            max_order,
            primes,
            modes,
            format,
            cap_enum,
            cap_end,
            cli.timestamps,
        ),
    };
    match result {
        Ok((text, code)) => {
            if let Err(io_error) = emit(&text, cli.out.as_ref()) {
                eprintln!("cqi: cannot write report: {io_error}");
                return ExitCode::from(2);
            }
            ExitCode::from(code)
        }
        Err(error) => {
            eprintln!("cqi: {error}");
            ExitCode::from(commands::exit_code_for(&error))
        }
    }
}
