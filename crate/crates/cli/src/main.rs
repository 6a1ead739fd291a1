use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use twolocal_cli::{
    parse_problem, run_problem, Overrides, ProblemFile, SelftestStanza, EXIT_DATA, EXIT_USAGE,
};

#[derive(Parser)]
#[command(
    name = "twolocal",
    version,
    about = "Exact residues on two-dimensional local fields: reciprocity ledgers, differents and dualizing-module membership"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit the machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Override the working p-adic precision N.
    #[arg(long, global = true, value_name = "N")]
    prec: Option<i64>,

    /// Override the exponent window, as LO:HI (e.g. -64:64).
    #[arg(long, global = true, value_name = "LO:HI", allow_hyphen_values = true)]
    window: Option<String>,

    /// Override the vanishing threshold for reciprocity verdicts.
    #[arg(long, global = true, value_name = "T")]
    threshold: Option<i64>,

    /// Override the seed for randomised batteries and spot checks.
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a residue problem file.
    Residue { file: PathBuf },
    /// Check residue/trace functoriality diagrams.
    Functoriality { file: PathBuf },
    /// Verify the sum-zero reciprocity ledger over O_K[[T]].
    Reciprocity { file: PathBuf },
    /// Compute a different via Jacobian and trace-integrality oracle.
    Different { file: PathBuf },
    /// Dualizing-module membership and codifferent certificates.
    Dualizing { file: PathBuf },
    /// Run the built-in verification batteries (file optional).
    Selftest { file: Option<PathBuf> },
}

fn command_kind(cmd: &Command) -> (&'static str, Option<&PathBuf>) {
    match cmd {
        Command::Residue { file } => ("residue", Some(file)),
        Command::Functoriality { file } => ("functoriality", Some(file)),
        Command::Reciprocity { file } => ("reciprocity", Some(file)),
        Command::Different { file } => ("different", Some(file)),
        Command::Dualizing { file } => ("dualizing", Some(file)),
        Command::Selftest { file } => ("selftest", file.as_ref()),
    }
}

fn parse_window(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once(':')
        .ok_or_else(|| format!("window `{s}` must have the form LO:HI"))?;
    let lo: i64 = lo.parse().map_err(|_| format!("bad window bound `{lo}`"))?;
    let hi: i64 = hi.parse().map_err(|_| format!("bad window bound `{hi}`"))?;
    Ok((lo, hi))
}

fn real_main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            // clap's own exit codes collide with the verdict contract;
            // usage problems are 64
            let is_help = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if is_help { 0 } else { EXIT_USAGE };
        }
    };
    let window = match cli.window.as_deref().map(parse_window).transpose() {
        Ok(w) => w,
        Err(m) => {
            eprintln!("error: {m}");
            return EXIT_USAGE;
        }
    };
    let overrides = Overrides {
        prec: cli.prec,
        window,
        threshold: cli.threshold,
        seed: cli.seed,
    };
    let (kind, file) = command_kind(&cli.command);
    let pf: ProblemFile = match file {
        Some(path) => {
            let text = match std::fs::read_to_string(path) {
                Ok(t) => t,
                Err(e) => {
                    eprintln!("error: cannot read {}: {e}", path.display());
                    return EXIT_DATA;
                }
            };
            match parse_problem(&text) {
                Ok(pf) => pf,
                Err(e) => {
                    eprintln!("error: {e}");
                    return EXIT_DATA;
                }
            }
        }
        None => ProblemFile {
            version: 1,
            kind: "selftest".into(),
            options: Default::default(),
            residue: None,
            functoriality: None,
            reciprocity: None,
            different: None,
            dualizing: None,
            selftest: Some(SelftestStanza::default()),
        },
    };
    if pf.kind != kind {
        eprintln!(
            "error: subcommand `{kind}` does not match problem kind `{}`",
            pf.kind
        );
        return EXIT_DATA;
    }
    match run_problem(&pf, &overrides) {
        Ok(report) => {
            if cli.json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            report.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_DATA
        }
    }
}

fn main() -> ExitCode {
    ExitCode::from(real_main() as u8)
}
