use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ekert_core::bell::{chsh_s, optimal_s, ChshConfig};
use ekert_core::channels::KrausChannel;
use ekert_core::entanglement::concurrence;
use ekert_core::protocol::{
    run_ekert91_with, KeyMeasurement, ProtocolConfig, ProtocolReport, Verdict,
};
use ekert_core::states::{key_statistics, NoiseFamily};
use ekert_core::sweep::{
    find_critical, format_number, run_sweep, write_critical_csv, write_sweep_csv, Quantity,
    SweepSpec,
};
use ekert_core::{Error, Execution};

const EXIT_FAILURE: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BELL_FAILED: u8 = 3;
const EXIT_INSUFFICIENT: u8 = 4;

#[derive(Parser)]
#[command(
    name = "ekert",
    version,
    about = "Entanglement and Bell-test analysis of the E91 protocol under qubit noise"
)]
struct Cli {
    /// Evaluate on a single thread.
    #[arg(long, global = true)]
    sequential: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Tabulate analytic quantities over a grid of error rates.
    ///
    /// CSV columns: family, p (GAD only, else empty), d, concurrence, s_plane
    /// (|S| at the canonical angles 0, π/2; π/4, 3π/4), s_optimal (|S| over all
    /// directions), qber. Unrequested quantities are left empty. Numbers carry
    /// 9 significant digits.
    Sweep(SweepArgs),
    /// Find the error rate where |S| at the canonical angles falls to 2.
    ///
    /// CSV columns: family, p, d_c, concurrence_at_d_c.
    Critical(CriticalArgs),
    /// Monte Carlo E91 session. Exit code 0 when secure, 3 when the Bell test
    /// fails, 4 when a CHSH cell or the sifted key is empty.
    ///
    /// Optional CSV columns: channel, p, d, n_pairs, seed, sifted_key_length,
    /// qber, qber_standard_error, s, s_standard_error, verdict.
    Protocol(ProtocolArgs),
    /// Print one noisy singlet with its concurrence, S-factors and QBER.
    State(StateArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Depolarizing,
    Bitflip,
    Gad,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ChannelArg {
    Identity,
    Depolarizing,
    Bitflip,
    Gad,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum KeyBasisArg {
    Computational,
    InPlane,
}

#[derive(Args)]
struct SweepArgs {
    /// Noise families, comma separated.
    #[arg(long, alias = "channel", value_delimiter = ',', required = true)]
    family: Vec<FamilyArg>,
    /// GAD population parameters, comma separated; one curve each.
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long, default_value_t = 0.0)]
    d_min: f64,
    /// Defaults to the family's largest error rate.
    #[arg(long)]
    d_max: Option<f64>,
    #[arg(long, default_value_t = 0.01)]
    d_step: f64,
    /// Subset of concurrence,s_plane,s_optimal,qber.
    #[arg(long, value_delimiter = ',')]
    quantities: Vec<String>,
    /// Output file (default stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CriticalArgs {
    #[arg(long, alias = "channel", value_delimiter = ',', required = true)]
    family: Vec<FamilyArg>,
    #[arg(long, value_delimiter = ',')]
    p: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ProtocolArgs {
    #[arg(long, alias = "family", value_enum)]
    channel: ChannelArg,
    #[arg(long)]
    p: Option<f64>,
    /// Error rate; required unless the channel is `identity`.
    #[arg(long)]
    d: Option<f64>,
    #[arg(long, default_value_t = 1_000_000)]
    pairs: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 2.0)]
    s_threshold: f64,
    #[arg(long, value_enum, default_value_t = KeyBasisArg::Computational)]
    key_basis: KeyBasisArg,
    /// Also write the report as a one-row CSV.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct StateArgs {
    #[arg(long, alias = "channel", value_enum)]
    family: FamilyArg,
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    d: f64,
}

/// Failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::OutOfRange { .. } | Error::Config(_) => EXIT_USAGE,
            _ => EXIT_FAILURE,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure {
            code: EXIT_FAILURE,
            message: e.to_string(),
        }
    }
}

fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = match cli.command {
        Command::Sweep(args) => sweep(args, exec),
        Command::Critical(args) => critical(args),
        Command::Protocol(args) => protocol(args, exec),
        Command::State(args) => state(args),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn output(path: Option<&PathBuf>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(io::stdout().lock()),
    })
}

/// Expands families and `--p` values into concrete noise families.
fn families(fams: &[FamilyArg], ps: &[f64]) -> Result<Vec<NoiseFamily>, Failure> {
    let has_gad = fams.contains(&FamilyArg::Gad);
    if has_gad && ps.is_empty() {
        return Err(usage("--p is required for gad"));
    }
    if !has_gad && !ps.is_empty() {
        return Err(usage("--p only applies to gad"));
    }
    let mut out = Vec::new();
    for &f in fams {
        match f {
            FamilyArg::Depolarizing => out.push(NoiseFamily::Depolarizing),
            FamilyArg::Bitflip => out.push(NoiseFamily::BitFlip),
            FamilyArg::Gad => out.extend(ps.iter().map(|&p| NoiseFamily::Gad { p })),
        }
    }
    Ok(out)
}

fn single_family(f: FamilyArg, p: Option<f64>) -> Result<NoiseFamily, Failure> {
    let fams = families(&[f], p.as_slice())?;
    Ok(fams[0])
}

fn sweep(args: SweepArgs, exec: Execution) -> Result<u8, Failure> {
    let quantities = if args.quantities.is_empty() {
        Quantity::ALL.to_vec()
    } else {
        args.quantities
            .iter()
            .map(|q| q.parse())
            .collect::<Result<_, Error>>()?
    };
    let mut rows = Vec::new();
    for family in families(&args.family, &args.p)? {
        let spec = SweepSpec {
            family,
            d_min: args.d_min,
            d_max: args.d_max.unwrap_or(family.max_error_rate()),
            d_step: args.d_step,
            quantities: quantities.clone(),
        };
        rows.extend(run_sweep(&spec, exec)?);
    }
    write_sweep_csv(&rows, output(args.out.as_ref())?)?;
    Ok(0)
}

fn critical(args: CriticalArgs) -> Result<u8, Failure> {
    let reports = families(&args.family, &args.p)?
        .into_iter()
        .map(find_critical)
        .collect::<Result<Vec<_>, _>>()?;
    write_critical_csv(&reports, output(args.out.as_ref())?)?;
    Ok(0)
}

fn protocol(args: ProtocolArgs, exec: Execution) -> Result<u8, Failure> {
    let (label, p, d, channel) = match args.channel {
        ChannelArg::Identity => {
            if args.p.is_some() || args.d.is_some() {
                return Err(usage("the identity channel takes no --p or --d"));
            }
            ("identity", None, 0.0, KrausChannel::identity())
        }
        other => {
            let fam = match other {
                ChannelArg::Depolarizing => FamilyArg::Depolarizing,
                ChannelArg::Bitflip => FamilyArg::Bitflip,
                _ => FamilyArg::Gad,
            };
            let family = single_family(fam, args.p)?;
            let d = args.d.ok_or_else(|| usage("--d is required"))?;
            let label = match fam {
                FamilyArg::Depolarizing => "depolarizing",
                FamilyArg::Bitflip => "bitflip",
                FamilyArg::Gad => "gad",
            };
            (label, family.p(), d, family.channel(d)?)
        }
    };
    let mut cfg = ProtocolConfig::new(channel, args.pairs, args.seed);
    cfg.s_threshold = args.s_threshold;
    cfg.key_measurement = match args.key_basis {
        KeyBasisArg::Computational => KeyMeasurement::Computational,
        KeyBasisArg::InPlane => KeyMeasurement::InPlane,
    };
    let r = run_ekert91_with(&cfg, exec)?;

    let mut stdout = io::stdout().lock();
    print_report(&mut stdout, label, p, d, &cfg, &r)?;
    if let Some(path) = &args.out {
        write_protocol_csv(File::create(path)?, label, p, d, &cfg, &r)?;
    }
    Ok(match r.verdict {
        Verdict::Secure => 0,
        Verdict::BellViolationFailed => EXIT_BELL_FAILED,
        Verdict::InsufficientSamples => EXIT_INSUFFICIENT,
    })
}

fn print_report(
    w: &mut impl Write,
    label: &str,
    p: Option<f64>,
    d: f64,
    cfg: &ProtocolConfig,
    r: &ProtocolReport,
) -> io::Result<()> {
    let f = format_number;
    match p {
        Some(p) => writeln!(w, "channel            {label} (p = {}, d = {})", f(p), f(d))?,
        None if label == "identity" => writeln!(w, "channel            identity")?,
        None => writeln!(w, "channel            {label} (d = {})", f(d))?,
    }
    writeln!(w, "pairs              {}", r.n_pairs)?;
    writeln!(w, "seed               {}", cfg.rng_seed)?;
    writeln!(w, "sifted key length  {}", r.sifted_key_length)?;
    writeln!(
        w,
        "qber               {} ± {}",
        f(r.qber_estimate),
        f(r.qber_standard_error)
    )?;
    writeln!(
        w,
        "S                  {} ± {}",
        f(r.s_estimate),
        f(r.s_standard_error)
    )?;
    writeln!(w, "threshold          {}", f(cfg.s_threshold))?;
    writeln!(w, "verdict            {}", r.verdict)
}

fn write_protocol_csv(
    w: impl Write,
    label: &str,
    p: Option<f64>,
    d: f64,
    cfg: &ProtocolConfig,
    r: &ProtocolReport,
) -> io::Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(
        w,
        "channel,p,d,n_pairs,seed,sifted_key_length,qber,qber_standard_error,s,s_standard_error,verdict"
    )?;
    let f = format_number;
    writeln!(
        w,
        "{label},{},{},{},{},{},{},{},{},{},{}",
        p.map(f).unwrap_or_default(),
        f(d),
        r.n_pairs,
        cfg.rng_seed,
        r.sifted_key_length,
        f(r.qber_estimate),
        f(r.qber_standard_error),
        f(r.s_estimate),
        f(r.s_standard_error),
        r.verdict
    )?;
    w.flush()
}

fn state(args: StateArgs) -> Result<u8, Failure> {
    let family = single_family(args.family, args.p)?;
    let rho = family.state(args.d)?;
    let spectrum = concurrence(&rho)?;
    let f = format_number;
    let mut w = io::stdout().lock();
    match family.p() {
        Some(p) => writeln!(w, "{family} p = {} d = {}", f(p), f(args.d))?,
        None => writeln!(w, "{family} d = {}", f(args.d))?,
    }
    writeln!(w, "density matrix (basis 00, 01, 10, 11):")?;
    let m = rho.matrix();
    for i in 0..4 {
        let cells: Vec<String> = (0..4)
            .map(|j| {
                let z = m[(i, j)];
                if z.im.abs() < 1e-15 {
                    format!("{:>14}", f(z.re))
                } else {
                    format!("{:>14}", format!("{}{:+}i", f(z.re), f(z.im)))
                }
            })
            .collect();
        writeln!(w, "  {}", cells.join(" "))?;
    }
    let lambdas: Vec<String> = spectrum.lambdas.iter().map(|&l| f(l)).collect();
    writeln!(w, "wootters roots     {}", lambdas.join(" "))?;
    writeln!(w, "concurrence        {}", f(spectrum.concurrence))?;
    writeln!(
        w,
        "|S| canonical      {}",
        f(chsh_s(&rho, &ChshConfig::canonical()).abs())
    )?;
    writeln!(w, "|S| optimal        {}", f(optimal_s(&rho)?))?;
    writeln!(
        w,
        "qber               {}",
        f(key_statistics(&rho).error_rate)
    )?;
    Ok(0)
}
