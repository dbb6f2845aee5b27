use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rfgrowth::experiments::{fit_csv, run, Command, ExperimentConfig};
use rfgrowth::fit::Model;
use rfgrowth::groupfile::load_group;
use rfgrowth::separator::PrimeMode;
use rfgrowth::Error;

#[derive(Parser)]
#[command(name = "rfg", version, about = "Residual finiteness growth experiments for M-groups")]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Word-metric ball sizes.
    Ball(Common),
    /// Exact RF(r) from the oracle next to the separator upper bound.
    RfCurve(Common),
    /// Separator upper bound with witnesses and certificates.
    UpperCurve(Common),
    /// D(g^lcm(1..r)) for a fixed element.
    WitnessCurve(Common),
    /// delta_p over a sample of admissible primes.
    Delta(Common),
    /// Separating quotient certificate for one element.
    Separate(Common),
    /// Coefficient growth over the ball.
    CoeffStats(Common),
    /// All of the above over the built-in catalog.
    Suite(Common),
    /// Fit a growth exponent to a column of a CSV table.
    Fit(FitArgs),
}

#[derive(Args)]
struct Common {
    /// Group file, or the name of a catalog group (bs12, z2_fibonacci, heisenberg, z2_trivial, heis_x_z2A).
    #[arg(long, default_value = "bs12")]
    group: String,
    #[arg(long, default_value_t = 6)]
    rmax: usize,
    /// Oracle search bound B.
    #[arg(long, default_value_t = 200)]
    bound: u64,
    #[arg(long, default_value = "paper")]
    mode: PrimeMode,
    /// Number of primes sampled by `delta`.
    #[arg(long, default_value_t = 10)]
    primes: usize,
    /// Output directory; tables go to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Element as comma-separated coordinates k1,..,km[,h1,..,hn[,f]].
    #[arg(long, allow_hyphen_values = true)]
    element: Option<String>,
}

#[derive(Args)]
struct FitArgs {
    csv: PathBuf,
    #[arg(long)]
    column: String,
    #[arg(long, default_value = "polynomial")]
    model: Model,
    /// Group whose declared bound the fit is compared against.
    #[arg(long)]
    group: Option<String>,
}

fn config(command: Command, c: Common) -> ExperimentConfig {
    ExperimentConfig {
        group: c.group,
        command,
        r_max: c.rmax,
        bound: c.bound,
        mode: c.mode,
        primes: c.primes,
        out: c.out,
        threads: c.threads,
        seed: c.seed,
        element: c.element,
    }
}

fn execute(cmd: Cmd) -> Result<bool, Error> {
    let (command, common) = match cmd {
        Cmd::Fit(f) => {
            let contents = std::fs::read_to_string(&f.csv).map_err(|e| Error::Io(format!("{}: {e}", f.csv.display())))?;
            let g = f.group.as_deref().map(load_group).transpose()?;
            let rep = fit_csv(&contents, &f.column, f.model, g.as_ref())?;
            println!("{}", serde_json::to_string_pretty(&rep).unwrap());
            return Ok(true);
        }
        Cmd::Ball(c) => (Command::Ball, c),
        Cmd::RfCurve(c) => (Command::RfCurve, c),
        Cmd::UpperCurve(c) => (Command::UpperCurve, c),
        Cmd::WitnessCurve(c) => (Command::WitnessCurve, c),
        Cmd::Delta(c) => (Command::Delta, c),
        Cmd::Separate(c) => (Command::Separate, c),
        Cmd::CoeffStats(c) => (Command::CoeffStats, c),
        Cmd::Suite(c) => (Command::Suite, c),
    };
    let cfg = config(command, common);
    let out = run(&cfg)?;
    if cfg.out.is_none() {
        let mut stdout = std::io::stdout().lock();
        for a in &out.artifacts {
            if out.artifacts.len() > 1 {
                let _ = writeln!(stdout, "# {}", a.name);
            }
            let _ = stdout.write_all(a.contents.as_bytes());
        }
        eprintln!("{}", serde_json::to_string(&out.manifest).unwrap());
    }
    if !out.verified {
        eprintln!(
            "{}",
            serde_json::json!({ "kind": "verification_failed", "failures": out.manifest["failures"] })
        );
    }
    Ok(out.verified)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "kind": e.kind(), "message": e.to_string() }));
            ExitCode::from(2)
        }
    }
}
