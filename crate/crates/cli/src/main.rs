//! Command-line front end: orders, exact success probabilities, lower
//! bounds, oracle verification, amplitude dumps, and threshold searches.
//!
//! Everything is driven by flags (no config files), numeric text output uses
//! 17 significant digits, and JSON output re-parses to bit-identical floats.
//!
//! Exit codes: 0 success, 2 invalid input, 3 precondition failure,
//! 4 verification failure.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{self, BufWriter};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use shor_prob::bounds::{
    asymptotic_bound, integral_lower_bound_p, integral_lower_bound_window, series_lower_bound,
    threshold_search, AsymptoticKind, BoundKind, BoundReport, SearchVar, ThresholdQuery,
};
use shor_prob::modular::{multiplicative_order, register_sizes};
use shor_prob::state::{self, ProbabilityReport, TargetSet};
use shor_prob::{oracle, Error, OrderInstance};

const SCHEMA_VERSION: u32 = 1;

#[derive(Parser)]
#[command(
    name = "shor-prob",
    about = "Success probabilities and lower bounds for Shor's order finding",
    version
)]
struct Cli {
    /// Output format for the structured commands.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Args)]
struct InstanceArgs {
    /// Modulus N.
    #[arg(long = "N", visible_alias = "modulus")]
    modulus: u64,
    /// Base b with 1 < b < N, coprime to N.
    #[arg(long = "b", visible_alias = "base")]
    base: u64,
    /// Offset of the periodic state (defaults to 0, as in the published
    /// constants).
    #[arg(long, default_value_t = 0)]
    x0: u64,
    /// Extra input-register qubits.
    #[arg(long = "q", default_value_t = 0)]
    q_pad: u32,
}

impl InstanceArgs {
    fn build(&self) -> Result<OrderInstance, Error> {
        OrderInstance::new(self.modulus, self.base, self.x0, self.q_pad)
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SetChoice {
    /// Nearest integers to s 2^(n+q)/r.
    Nearest,
    /// Distance-2 window on the unpadded register.
    Window,
    /// Distance-2^(1+q) window on the padded register.
    WindowQ,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BoundChoice {
    /// Integral bound on P.
    IntegralP,
    /// Integral bound on the window probability.
    Window,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SearchChoice {
    RPrime,
    Modulus,
}

#[derive(Subcommand)]
enum Command {
    /// Multiplicative order of b modulo N, with its register sizes.
    Order {
        #[arg(long = "N", visible_alias = "modulus")]
        modulus: u64,
        #[arg(long = "b", visible_alias = "base")]
        base: u64,
    },
    /// Exact success probability on a chosen target set.
    Exact {
        #[command(flatten)]
        instance: InstanceArgs,
        #[arg(long, value_enum, default_value_t = SetChoice::Nearest)]
        set: SetChoice,
        /// Permit the window sets on a prime-power modulus (r < N/2 is still
        /// checked).
        #[arg(long)]
        allow_prime_power: bool,
    },
    /// Evaluate every applicable lower bound plus the asymptotic constants.
    Bounds {
        #[arg(long = "N", visible_alias = "modulus")]
        modulus: u64,
        /// Derive kappa and r' from the order of this base.
        #[arg(
            long = "b",
            visible_alias = "base",
            conflicts_with_all = ["kappa", "r_prime"],
            required_unless_present_all = ["kappa", "r_prime"]
        )]
        base: Option<u64>,
        #[arg(long, requires = "r_prime")]
        kappa: Option<u32>,
        #[arg(long = "r-prime", requires = "kappa")]
        r_prime: Option<u64>,
        #[arg(long = "q", default_value_t = 0)]
        q_pad: u32,
    },
    /// Compare the closed-form engine against the transform oracles.
    Verify {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Largest acceptable deviation between backends.
        #[arg(long, default_value_t = 1e-12)]
        tolerance: f64,
    },
    /// Dump per-outcome probabilities as CSV (y,frac,prob,flag).
    Amplitudes {
        #[command(flatten)]
        instance: InstanceArgs,
        /// Output path; stdout when omitted.
        #[arg(long)]
        out: Option<std::path::PathBuf>,
    },
    /// Least odd r' (or least power-of-two N) at which a bound exceeds a
    /// target.
    Thresholds {
        #[arg(long, value_enum)]
        bound: BoundChoice,
        #[arg(long = "N", visible_alias = "modulus", default_value_t = 0)]
        modulus: u64,
        #[arg(long, default_value_t = 0)]
        kappa: u32,
        #[arg(long = "r-prime", default_value_t = 0)]
        r_prime: u64,
        #[arg(long = "q", default_value_t = 0)]
        q_pad: u32,
        #[arg(long)]
        target: f64,
        #[arg(long, value_enum, default_value_t = SearchChoice::RPrime)]
        search: SearchChoice,
        /// Largest value of the search variable to try.
        #[arg(long, default_value_t = 1_000_001)]
        cap: u64,
    },
}

fn main() -> ExitCode {
    // die quietly when the read end of a pipe closes (`... | head`)
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            exit_code_for(&err)
        }
    }
}

fn exit_code_for(err: &Error) -> ExitCode {
    match err {
        Error::BaseOutOfRange { .. }
        | Error::OffsetOutOfRange { .. }
        | Error::QPadTooLarge { .. }
        | Error::WindowNeedsUnpaddedRegister { .. }
        | Error::UnsupportedSearch => ExitCode::from(2),
        _ => ExitCode::from(3),
    }
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    match &cli.command {
        Command::Order { modulus, base } => cmd_order(cli.format, *modulus, *base),
        Command::Exact {
            instance,
            set,
            allow_prime_power,
        } => cmd_exact(cli.format, instance, *set, *allow_prime_power),
        Command::Bounds {
            modulus,
            base,
            kappa,
            r_prime,
            q_pad,
        } => cmd_bounds(cli.format, *modulus, *base, *kappa, *r_prime, *q_pad),
        Command::Verify {
            instance,
            tolerance,
        } => cmd_verify(cli.format, instance, *tolerance),
        Command::Amplitudes { instance, out } => cmd_amplitudes(instance, out.as_deref()),
        Command::Thresholds {
            bound,
            modulus,
            kappa,
            r_prime,
            q_pad,
            target,
            search,
            cap,
        } => cmd_thresholds(
            cli.format, *bound, *modulus, *kappa, *r_prime, *q_pad, *target, *search, *cap,
        ),
    }
}

/// 17 significant digits: enough to reproduce the f64 bit pattern on parse.
fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn emit_json<T: Serialize>(value: &T) {
    println!(
        "{}",
        serde_json::to_string_pretty(value).expect("serializable output")
    );
}

// ---------------------------------------------------------------- order

#[derive(Serialize)]
struct OrderOutput {
    schema_version: u32,
    command: &'static str,
    modulus: u64,
    base: u64,
    order: u64,
    kappa: u32,
    r_prime: u64,
    n: u32,
    n0: u32,
}

fn cmd_order(format: Format, modulus: u64, base: u64) -> Result<ExitCode, Error> {
    let order = multiplicative_order(base, modulus)?;
    let (kappa, r_prime) = shor_prob::modular::decompose_order(order);
    let (n, n0) = register_sizes(modulus);
    let out = OrderOutput {
        schema_version: SCHEMA_VERSION,
        command: "order",
        modulus,
        base,
        order,
        kappa,
        r_prime,
        n,
        n0,
    };
    match format {
        Format::Json => emit_json(&out),
        Format::Csv => {
            println!("key,value");
            println!("order,{order}");
            println!("kappa,{kappa}");
            println!("r_prime,{r_prime}");
            println!("n,{n}");
            println!("n0,{n0}");
        }
        Format::Text => {
            println!("{order}");
            println!("# r = 2^{kappa} * {r_prime}, registers n = {n}, n0 = {n0}");
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- exact

#[derive(Serialize)]
struct ExactOutput {
    schema_version: u32,
    command: &'static str,
    set: &'static str,
    instance: OrderInstance,
    report: ProbabilityReport,
}

fn cmd_exact(
    format: Format,
    args: &InstanceArgs,
    set: SetChoice,
    allow_prime_power: bool,
) -> Result<ExitCode, Error> {
    let inst = args.build()?;
    let (set_name, report) = match set {
        SetChoice::Nearest => ("nearest", state::exact_p(&inst)?),
        SetChoice::Window => ("window", state::exact_p_tilde(&inst, allow_prime_power)?),
        SetChoice::WindowQ => (
            "window-q",
            state::exact_p_tilde_q(&inst, allow_prime_power)?,
        ),
    };
    let out = ExactOutput {
        schema_version: SCHEMA_VERSION,
        command: "exact",
        set: set_name,
        instance: inst,
        report,
    };
    match format {
        Format::Json => emit_json(&out),
        Format::Csv => {
            println!("key,value");
            println!("P,{}", num(out.report.p));
            if let Some(v) = out.report.p1_pair {
                println!("2P1,{}", num(v));
            }
            if let Some(v) = out.report.pt {
                println!("Pt,{}", num(v));
            }
            if let Some(v) = out.report.p_tilde {
                println!("P_tilde,{}", num(v));
            }
        }
        Format::Text => {
            print_instance_line(&inst);
            println!("P        = {}", num(out.report.p));
            if let Some(v) = out.report.p1_pair {
                println!("2P1      = {}", num(v));
            }
            if let Some(v) = out.report.pt {
                println!("Pt       = {}", num(v));
            }
            if let Some(v) = out.report.p_tilde {
                println!("P~       = {}", num(v));
            }
            println!(
                "  multiples term = {}",
                num(out.report.components.multiples_term)
            );
            for (h, v) in &out.report.components.per_h {
                println!("  window term h = {h:>4}: {}", num(*v));
            }
            if out.report.components.fringe_term != 0.0 {
                println!(
                    "  fringe term    = {}",
                    num(out.report.components.fringe_term)
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn print_instance_line(inst: &OrderInstance) {
    println!(
        "# N = {}, b = {}, r = {} = 2^{} * {}, n = {}, n0 = {}, q = {}, x0 = {}, m = {}",
        inst.modulus,
        inst.base,
        inst.order,
        inst.kappa,
        inst.r_prime,
        inst.n,
        inst.n0,
        inst.q_pad,
        inst.x0,
        inst.m
    );
}

// ---------------------------------------------------------------- bounds

#[derive(Serialize)]
struct AsymptoticRow {
    kind: &'static str,
    q_pad: u32,
    value: f64,
}

#[derive(Serialize)]
struct BoundsOutput {
    schema_version: u32,
    command: &'static str,
    modulus: u64,
    kappa: u32,
    r_prime: u64,
    q_pad: u32,
    n: u32,
    n0: u32,
    bounds: Vec<BoundReport>,
    asymptotics: Vec<AsymptoticRow>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_bounds(
    format: Format,
    modulus: u64,
    base: Option<u64>,
    kappa: Option<u32>,
    r_prime: Option<u64>,
    q_pad: u32,
) -> Result<ExitCode, Error> {
    let (kappa, r_prime) = match (base, kappa, r_prime) {
        (Some(b), _, _) => {
            let order = multiplicative_order(b, modulus)?;
            shor_prob::modular::decompose_order(order)
        }
        (None, Some(k), Some(rp)) => (k, rp),
        // clap enforces base xor (kappa, r-prime)
        _ => unreachable!(),
    };
    let (n, n0) = register_sizes(modulus);
    let bounds = vec![
        series_lower_bound(n + q_pad, n0, kappa, r_prime),
        integral_lower_bound_p(modulus, kappa, r_prime),
        integral_lower_bound_window(modulus, kappa, r_prime, q_pad),
    ];
    let asymptotics = vec![
        AsymptoticRow {
            kind: "nearest",
            q_pad: 0,
            value: asymptotic_bound(AsymptoticKind::Nearest, 0),
        },
        AsymptoticRow {
            kind: "window",
            q_pad,
            value: asymptotic_bound(AsymptoticKind::WindowQ, q_pad),
        },
    ];
    let out = BoundsOutput {
        schema_version: SCHEMA_VERSION,
        command: "bounds",
        modulus,
        kappa,
        r_prime,
        q_pad,
        n,
        n0,
        bounds,
        asymptotics,
    };
    match format {
        Format::Json => emit_json(&out),
        Format::Csv => {
            println!("bound,value,sound");
            for b in &out.bounds {
                println!("{:?},{},{}", b.kind, num(b.value), b.sound_context());
            }
            for a in &out.asymptotics {
                println!("Asymptotic-{}-q{},{},true", a.kind, a.q_pad, num(a.value));
            }
        }
        Format::Text => {
            println!(
                "# N = {}, kappa = {}, r' = {}, q = {}, registers ({}, {})",
                modulus, kappa, r_prime, q_pad, n, n0
            );
            for b in &out.bounds {
                let mut flags = String::new();
                for p in &b.preconditions {
                    if !p.held {
                        let _ = write!(flags, " [unmet: {}]", p.name);
                    }
                }
                println!("{:<16} {}{}", b.kind.to_string(), num(b.value), flags);
            }
            for a in &out.asymptotics {
                println!(
                    "asymptotic {:<7} (q = {}) {}",
                    a.kind,
                    a.q_pad,
                    num(a.value)
                );
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- verify

#[derive(Serialize)]
struct VerifyOutput {
    schema_version: u32,
    command: &'static str,
    instance: OrderInstance,
    tolerance: f64,
    max_entry_deviation: f64,
    unitarity_defect: f64,
    nearest_mass_deviation: f64,
    window_mass_deviation: Option<f64>,
    naive_checked: bool,
    max_naive_deviation: Option<f64>,
    pass: bool,
}

fn cmd_verify(format: Format, args: &InstanceArgs, tolerance: f64) -> Result<ExitCode, Error> {
    let inst = args.build()?;
    let fft = oracle::full_transform(&inst)?;

    let mut max_entry = 0.0f64;
    for y in 0..inst.register_len() {
        let dev = (fft.probabilities[y as usize] - oracle::amplitude_sq(y, &inst)).abs();
        max_entry = max_entry.max(dev);
    }
    let unitarity = (fft.total_mass() - 1.0).abs();

    let nearest = state::target_set_members(&inst, TargetSet::Nearest, false)?;
    let p_formula = state::exact_p(&inst)?.p;
    let nearest_dev = (p_formula - fft.mass_on(&nearest)).abs();

    let window_dev = match state::exact_p_tilde_q(&inst, false) {
        Ok(report) => {
            let members = state::target_set_members(&inst, TargetSet::WindowQ, false)?;
            Some((report.p_tilde.unwrap() - fft.mass_on(&members)).abs())
        }
        Err(Error::GerjuoyInapplicable { .. }) => None,
        Err(e) => return Err(e),
    };

    let (naive_checked, naive_dev) = if inst.total_qubits() <= oracle::MAX_NAIVE_QUBITS {
        let naive = oracle::naive_transform(&inst)?;
        let mut worst = 0.0f64;
        for (a, b) in naive.probabilities.iter().zip(&fft.probabilities) {
            worst = worst.max((a - b).abs());
        }
        (true, Some(worst))
    } else {
        (false, None)
    };

    let pass = max_entry <= tolerance
        && unitarity <= tolerance.max(1e-10)
        && nearest_dev <= tolerance
        && window_dev.is_none_or(|d| d <= tolerance)
        && naive_dev.is_none_or(|d| d <= tolerance);

    let out = VerifyOutput {
        schema_version: SCHEMA_VERSION,
        command: "verify",
        instance: inst,
        tolerance,
        max_entry_deviation: max_entry,
        unitarity_defect: unitarity,
        nearest_mass_deviation: nearest_dev,
        window_mass_deviation: window_dev,
        naive_checked,
        max_naive_deviation: naive_dev,
        pass,
    };
    match format {
        Format::Json => emit_json(&out),
        Format::Csv => {
            println!("key,value");
            println!("max_entry_deviation,{}", num(max_entry));
            println!("unitarity_defect,{}", num(unitarity));
            println!("nearest_mass_deviation,{}", num(nearest_dev));
            if let Some(d) = window_dev {
                println!("window_mass_deviation,{}", num(d));
            }
            if let Some(d) = naive_dev {
                println!("max_naive_deviation,{}", num(d));
            }
            println!("pass,{pass}");
        }
        Format::Text => {
            print_instance_line(&inst);
            println!(
                "max entry deviation (closed form vs FFT): {}",
                num(max_entry)
            );
            println!(
                "unitarity defect:                         {}",
                num(unitarity)
            );
            println!(
                "nearest-set mass deviation:               {}",
                num(nearest_dev)
            );
            if let Some(d) = window_dev {
                println!("window-set mass deviation:                {}", num(d));
            }
            if let Some(d) = naive_dev {
                println!("max naive-DFT deviation:                  {}", num(d));
            }
            println!("{}", if pass { "PASS" } else { "FAIL" });
        }
    }
    Ok(if pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(4)
    })
}

// ---------------------------------------------------------------- amplitudes

fn cmd_amplitudes(args: &InstanceArgs, out: Option<&std::path::Path>) -> Result<ExitCode, Error> {
    let inst = args.build()?;
    let rows = oracle::figure1_dump(&inst)?;
    let written = match out {
        Some(path) => File::create(path)
            .and_then(|file| oracle::write_figure1_csv(&rows, BufWriter::new(file))),
        None => oracle::write_figure1_csv(&rows, BufWriter::new(io::stdout().lock())),
    };
    if let Err(err) = written {
        eprintln!("error: cannot write amplitude dump: {err}");
        return Ok(ExitCode::from(3));
    }
    Ok(ExitCode::SUCCESS)
}

// ---------------------------------------------------------------- thresholds

#[derive(Serialize)]
struct ThresholdOutput {
    schema_version: u32,
    command: &'static str,
    query: ThresholdQuery,
    result: u64,
}

#[allow(clippy::too_many_arguments)]
fn cmd_thresholds(
    format: Format,
    bound: BoundChoice,
    modulus: u64,
    kappa: u32,
    r_prime: u64,
    q_pad: u32,
    target: f64,
    search: SearchChoice,
    cap: u64,
) -> Result<ExitCode, Error> {
    let kind = match bound {
        BoundChoice::IntegralP => BoundKind::IntegralP,
        BoundChoice::Window => {
            if q_pad == 0 {
                BoundKind::IntegralPTilde
            } else {
                BoundKind::IntegralPTildeQ
            }
        }
    };
    let query = ThresholdQuery {
        kind,
        modulus,
        kappa,
        r_prime,
        q_pad,
        target,
        var: match search {
            SearchChoice::RPrime => SearchVar::RPrime,
            SearchChoice::Modulus => SearchVar::Modulus,
        },
        cap,
    };
    let result = threshold_search(&query)?;
    let out = ThresholdOutput {
        schema_version: SCHEMA_VERSION,
        command: "thresholds",
        query,
        result,
    };
    match format {
        Format::Json => emit_json(&out),
        Format::Csv => {
            println!("key,value");
            println!("result,{result}");
        }
        Format::Text => {
            let var = match search {
                SearchChoice::RPrime => "r'",
                SearchChoice::Modulus => "N",
            };
            println!("{result}");
            println!("# least {var} with {kind} > {target}");
        }
    }
    Ok(ExitCode::SUCCESS)
}
