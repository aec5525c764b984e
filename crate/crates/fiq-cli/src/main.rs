//! Command-line front end for the fiq library.
//!
//! Exit codes: 0 on success, 2 on usage errors (argument parsing), 3 on
//! domain or resource errors (bad documents, refused windows, enumeration
//! caps, I/O failures).

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fiq::analysis::{bit_entropy, digit_histogram, information_content, unit_change_audit};
use fiq::exact::{joint_add, joint_mul_constant};
use fiq::format::{
    audit_json_string, decimal_approx, emit_joint_law, histogram_csv, parse_fiq, render_audit,
    render_marginal, render_oracle_check, render_sample_report,
};
use fiq::marginal::{add_marginal, mul_constant_marginal, CarryModel};
use fiq::oracle::{sample_law, truncation_law_mul, OracleConfig, SampleOp};
use fiq::{Fiq, Tail, WideMarginal};

#[derive(Parser)]
#[command(
    name = "fiq",
    about = "Arithmetic and audits on finite-information quantities",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Add two quantities.
    Add(AddArgs),
    /// Multiply a quantity by a positive integer constant.
    Mul(MulArgs),
    /// Audit the information a unit change loses in the marginal picture.
    Audit(AuditArgs),
    /// Emit the digit-distribution histogram as CSV.
    Hist(HistArgs),
    /// Compare the exact engine against the truncation oracle.
    OracleCheck(OracleCheckArgs),
    /// Summarize a quantity: depth, information content, per-bit entropies.
    Info(InfoArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum EngineChoice {
    /// Per-bit propensity propagation under the independence assumption.
    Marginal,
    /// Exact joint law of the result bits.
    Exact,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModelChoice {
    /// Fair tails: carry-in 1/2 below the explicit region.
    Fair,
    /// Zero tails: carry-in 0 (ordinary binary arithmetic embedding).
    Zero,
}

impl ModelChoice {
    fn to_model(self) -> CarryModel {
        match self {
            ModelChoice::Fair => CarryModel::FairTailFixedPoint,
            ModelChoice::Zero => CarryModel::TruncateZero,
        }
    }
}

#[derive(Args)]
struct AddArgs {
    /// Left addend document (.fiq).
    q: PathBuf,
    /// Right addend document (.fiq).
    r: PathBuf,
    /// Carry model; defaults to the model matching the operands' tails.
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    #[arg(long, value_enum, default_value = "marginal")]
    engine: EngineChoice,
    /// Fractional window depth for the exact engine; defaults to the
    /// aligned explicit depth.
    #[arg(long)]
    window: Option<u32>,
}

#[derive(Args)]
struct MulArgs {
    /// Quantity document (.fiq).
    q: PathBuf,
    /// Positive integer scale factor.
    #[arg(long)]
    by: u64,
    #[arg(long, value_enum)]
    model: Option<ModelChoice>,
    #[arg(long, value_enum, default_value = "marginal")]
    engine: EngineChoice,
    #[arg(long)]
    window: Option<u32>,
}

#[derive(Args)]
struct AuditArgs {
    q: PathBuf,
    /// Positive integer scale factor of the unit change.
    #[arg(long)]
    by: u64,
    /// Label for the new unit.
    #[arg(long)]
    unit: Option<String>,
    /// Also write the machine-readable report to this JSON file.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct HistArgs {
    q: PathBuf,
    /// Truncation depth of the fair tail.
    #[arg(long)]
    depth: u32,
    /// Number of bins; must be a power of two no finer than 2^depth.
    #[arg(long)]
    bins: u64,
    /// Output CSV path.
    #[arg(long)]
    csv: PathBuf,
}

#[derive(Args)]
struct OracleCheckArgs {
    q: PathBuf,
    #[arg(long)]
    by: u64,
    /// Tail-extension depth of the truncation oracle.
    #[arg(long)]
    extension: u32,
    /// Also run a seeded Monte Carlo pass with this many samples.
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long, default_value = "0")]
    seed: u64,
    #[arg(long)]
    window: Option<u32>,
}

#[derive(Args)]
struct InfoArgs {
    q: PathBuf,
}

fn load(path: &Path) -> Result<Fiq, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    parse_fiq(&text).map_err(|e| format!("{}: {e}", path.display()))
}

fn default_model(tails: &[Tail]) -> Result<CarryModel, String> {
    if tails.iter().all(|&t| t == Tail::Fair) {
        Ok(CarryModel::FairTailFixedPoint)
    } else if tails.iter().all(|&t| t == Tail::Zero) {
        Ok(CarryModel::TruncateZero)
    } else {
        Err(
            "operands mix fair and zero tails; the marginal engine needs matching tails \
             (the exact engine supports mixed tails)"
                .into(),
        )
    }
}

fn run_add(args: &AddArgs) -> Result<(), String> {
    let q = load(&args.q)?;
    let r = load(&args.r)?;
    match args.engine {
        EngineChoice::Marginal => {
            let model = match args.model {
                Some(choice) => choice.to_model(),
                None => default_model(&[q.tail(), r.tail()])?,
            };
            let sum = add_marginal(&WideMarginal::from(&q), &WideMarginal::from(&r), model)
                .map_err(|e| e.to_string())?;
            print!("{}", render_marginal(&sum));
        }
        EngineChoice::Exact => {
            let window = args.window.unwrap_or_else(|| q.depth().max(r.depth()));
            let law = joint_add(&q, &r, window).map_err(|e| e.to_string())?;
            print!("{}", emit_joint_law(&law));
        }
    }
    Ok(())
}

fn run_mul(args: &MulArgs) -> Result<(), String> {
    let q = load(&args.q)?;
    match args.engine {
        EngineChoice::Marginal => {
            let model = match args.model {
                Some(choice) => choice.to_model(),
                None => default_model(&[q.tail()])?,
            };
            let product = mul_constant_marginal(&q, args.by, model).map_err(|e| e.to_string())?;
            print!("{}", render_marginal(&product));
        }
        EngineChoice::Exact => {
            let window = args.window.unwrap_or_else(|| q.depth());
            let law = joint_mul_constant(&q, args.by, window).map_err(|e| e.to_string())?;
            print!("{}", emit_joint_law(&law));
        }
    }
    Ok(())
}

fn run_audit(args: &AuditArgs) -> Result<(), String> {
    let q = load(&args.q)?;
    let report = unit_change_audit(&q, args.by, args.unit.as_deref()).map_err(|e| e.to_string())?;
    print!("{}", render_audit(&report));
    if let Some(path) = &args.out {
        fs::write(path, audit_json_string(&report))
            .map_err(|e| format!("cannot write {}: {e}", path.display()))?;
    }
    Ok(())
}

fn run_hist(args: &HistArgs) -> Result<(), String> {
    let q = load(&args.q)?;
    let hist = digit_histogram(&q, args.depth, args.bins).map_err(|e| e.to_string())?;
    let csv = histogram_csv(&hist);
    fs::write(&args.csv, csv).map_err(|e| format!("cannot write {}: {e}", args.csv.display()))?;
    println!(
        "wrote {} bins at depth {} to {}",
        hist.bin_count,
        hist.depth,
        args.csv.display()
    );
    Ok(())
}

fn run_oracle_check(args: &OracleCheckArgs) -> Result<(), String> {
    let q = load(&args.q)?;
    let window = args.window.unwrap_or_else(|| q.depth());
    let exact = joint_mul_constant(&q, args.by, window).map_err(|e| e.to_string())?;
    let oracle =
        truncation_law_mul(&q, args.by, window, args.extension).map_err(|e| e.to_string())?;
    let check =
        render_oracle_check(&exact, &oracle, args.by, args.extension).map_err(|e| e.to_string())?;
    print!("{check}");
    if let Some(samples) = args.samples {
        let config =
            OracleConfig::new(args.extension, samples, args.seed).map_err(|e| e.to_string())?;
        let report = sample_law(
            &q,
            &SampleOp::MulConstant { scale: args.by },
            window,
            &config,
        )
        .map_err(|e| e.to_string())?;
        println!();
        print!("{}", render_sample_report(&report));
    }
    Ok(())
}

fn run_info(args: &InfoArgs) -> Result<(), String> {
    let q = load(&args.q)?;
    println!("explicit depth M    {}", q.depth());
    println!("tail                {}", q.tail().label());
    println!("unit                {}", q.unit_label().unwrap_or("(none)"));
    println!(
        "information content {} bits",
        decimal_approx(information_content(q.propensities()), 12)
    );
    if q.depth() > 0 {
        println!("position  propensity  entropy(bits)");
        for (i, p) in q.propensities().iter().enumerate() {
            println!(
                "{:<8}  {:<10}  {}",
                i + 1,
                p.to_string(),
                decimal_approx(bit_entropy(p), 12)
            );
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Add(args) => run_add(args),
        Command::Mul(args) => run_mul(args),
        Command::Audit(args) => run_audit(args),
        Command::Hist(args) => run_hist(args),
        Command::OracleCheck(args) => run_oracle_check(args),
        Command::Info(args) => run_info(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(3)
        }
    }
}
