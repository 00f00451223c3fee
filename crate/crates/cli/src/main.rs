//! `fdes`: simulations, record entry, reports, invariant checks and the HTTP
//! service for the fuzzy descriptive evaluation engine.
//!
//! Exit codes: 0 success, 1 failed verdict or rejected record, 2 usage or
//! configuration error, 3 I/O error.

mod render;

use std::io::Write;
use std::net::SocketAddr;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use fdes_core::check::{self, Verdict};
use fdes_core::config::FuzzyConfig;
use fdes_core::simulation::{
    fdes_csv_header, run_fdes_simulation, run_psi_scenarios, write_fdes_csv, write_scenario_csv,
    ScenarioConfig, TrajectoryConfig, DEFAULT_JITTER,
};
use fdes_core::{
    day_of, EvaluationRecord, FdesEngine, IndicatorId, Month, RecordValue, UniverseSpec,
};
use fdes_evalstore::{EvalStore, StoreError};

use render::Format;

#[derive(Debug, Parser)]
#[command(name = "fdes", version, about = "Fuzzy descriptive evaluation of student performance")]
struct Cli {
    /// Fuzzy configuration (universe, terms, rule tables) in TOML.
    #[arg(long, global = true, env = "FDES_UNIVERSE", value_name = "PATH")]
    universe: Option<PathBuf>,

    /// Evaluation log used by record, status, report and serve.
    #[arg(long, global = true, env = "FDES_LOG", value_name = "PATH", default_value = "fdes-log.ndjson")]
    log: PathBuf,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a simulation and write CSV output.
    #[command(subcommand)]
    Simulate(Simulate),
    /// Append one evaluation record and print the updated status.
    Record(RecordArgs),
    /// Print a student's live status.
    Status(StudentArgs),
    /// Print a student's end-of-term report.
    Report(StudentArgs),
    /// Serve the HTTP/JSON API.
    Serve {
        #[arg(long, env = "FDES_ADDR", default_value = "127.0.0.1:8080")]
        addr: SocketAddr,
    },
    /// Run the invariant suite and print measured bounds.
    Check,
}

#[derive(Debug, Subcommand)]
enum Simulate {
    /// Two-input system under the four daily-input scenarios.
    Psi {
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Half-width of the uniform daily jitter, in grade units.
        #[arg(long, default_value_t = DEFAULT_JITTER)]
        jitter: f64,
    },
    /// Whole school year for the five indicators.
    Fdes {
        /// Trajectory configuration in TOML; defaults to the bundled one.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, default_value = "out")]
        out: PathBuf,
        /// Days between samples of each indicator.
        #[arg(long, default_value_t = 1)]
        interval: u16,
    },
}

#[derive(Debug, Args)]
struct RecordArgs {
    #[arg(long)]
    student: String,
    #[arg(long)]
    indicator: IndicatorId,
    /// School day 1..150.
    #[arg(long, required_unless_present = "month", conflicts_with = "month")]
    day: Option<u16>,
    /// Month name (MEHR..BAHMAN), used with --day-of-month.
    #[arg(long, requires = "day_of_month")]
    month: Option<Month>,
    #[arg(long, requires = "month")]
    day_of_month: Option<u16>,
    /// Crisp score or term label (NME, AE, G, VG).
    #[arg(long, allow_hyphen_values = true)]
    value: RecordValue,
    #[arg(long, default_value = "")]
    note: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug, Args)]
struct StudentArgs {
    #[arg(long)]
    student: String,
    #[arg(long, value_enum, default_value_t = Format::Table)]
    format: Format,
}

#[derive(Debug)]
enum Failure {
    Verdict,
    Rejected(String),
    Usage(String),
    Io(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verdict | Failure::Rejected(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Io(_) => 3,
        }
    }
}

impl From<fdes_core::Error> for Failure {
    fn from(e: fdes_core::Error) -> Self {
        match e {
            fdes_core::Error::Io(m) => Failure::Io(m),
            other => Failure::Usage(other.to_string()),
        }
    }
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::Io { .. } | StoreError::Corrupt { .. } => Failure::Io(e.to_string()),
            StoreError::OutOfOrder { .. } => Failure::Rejected(e.to_string()),
            StoreError::Invalid(_) | StoreError::Engine(_) => Failure::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Verdict => {}
                Failure::Rejected(m) | Failure::Usage(m) | Failure::Io(m) => eprintln!("fdes: {m}"),
            }
            ExitCode::from(f.code())
        }
    }
}

fn load_engine(path: Option<&Path>) -> Result<FdesEngine, Failure> {
    match path {
        None => Ok(FdesEngine::standard(UniverseSpec::grades())),
        Some(p) => Ok(FuzzyConfig::load(p)?.build_engine()?),
    }
}

fn print_verdicts(out: &mut impl Write, verdicts: &[Verdict]) -> Result<(), Failure> {
    for v in verdicts {
        writeln!(out, "{v}")?;
    }
    if verdicts.iter().all(|v| v.passed) {
        Ok(())
    } else {
        Err(Failure::Verdict)
    }
}

fn run(cli: Cli) -> Result<(), Failure> {
    let engine = load_engine(cli.universe.as_deref())?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match cli.command {
        Command::Simulate(Simulate::Psi { seed, out: dir, jitter }) => {
            if !(jitter.is_finite() && jitter >= 0.0) {
                return Err(Failure::Usage(format!("jitter must be a non-negative number, got {jitter}")));
            }
            std::fs::create_dir_all(&dir)?;
            let var = engine.variable();
            let configs = ScenarioConfig::defaults(var, jitter, seed);
            let runs = run_psi_scenarios(engine.psi(), &configs)?;
            for run in &runs {
                let path = dir.join(format!("psi_{}.csv", run.kind.name()));
                write_scenario_csv(run, &path)?;
                writeln!(
                    out,
                    "wrote {} (mean output {:.4}, {})",
                    path.display(),
                    run.mean_output(),
                    var.round_to_term(run.mean_output())
                )?;
            }
            print_verdicts(&mut out, &[check::scenario_verdict(&runs, var)])
        }
        Command::Simulate(Simulate::Fdes { config, out: dir, interval }) => {
            let cfg = match config {
                Some(p) => TrajectoryConfig::load(&p)?,
                None => TrajectoryConfig::default_school_year(),
            };
            std::fs::create_dir_all(&dir)?;
            let run = run_fdes_simulation(&engine, &cfg, interval)?;
            let path = dir.join("fdes.csv");
            write_fdes_csv(&run, &path)?;
            writeln!(
                out,
                "wrote {} ({} days, {} records, columns: {})",
                path.display(),
                run.rows.len(),
                run.records.len(),
                fdes_csv_header().join(",")
            )?;
            writeln!(
                out,
                "max day-to-day change of final: {:.4} (bound {})",
                check::max_daily_jump(&run),
                check::DAILY_JUMP_BOUND * engine.variable().universe().width() / 10.0
            )?;
            print_verdicts(&mut out, &check::school_year_checkpoints(&run, engine.variable()))
        }
        Command::Record(args) => {
            let day = match (args.day, args.month, args.day_of_month) {
                (Some(d), _, _) => d,
                (None, Some(m), Some(dom)) => day_of(m, dom)?,
                _ => return Err(Failure::Usage("give --day or --month with --day-of-month".into())),
            };
            let mut store = EvalStore::open(engine, &cli.log)?;
            let outcome = store.append(EvaluationRecord {
                student_id: args.student.clone(),
                indicator: args.indicator,
                day,
                value: args.value,
                note: args.note,
            })?;
            if args.format == Format::Table {
                let clamp_note = if outcome.clamped { " (value clamped into the universe)" } else { "" };
                writeln!(out, "recorded #{}{clamp_note}", outcome.seq)?;
            }
            render::write_status(&mut out, store.engine(), &args.student, &outcome.state, args.format)?;
            Ok(())
        }
        Command::Status(args) => {
            let store = EvalStore::open(engine, &cli.log)?;
            let state = store
                .state(&args.student)
                .ok_or_else(|| Failure::Rejected(format!("no records for student {:?}", args.student)))?;
            render::write_status(&mut out, store.engine(), &args.student, state, args.format)?;
            Ok(())
        }
        Command::Report(args) => {
            let store = EvalStore::open(engine, &cli.log)?;
            let state = store
                .state(&args.student)
                .ok_or_else(|| Failure::Rejected(format!("no records for student {:?}", args.student)))?;
            let course = store
                .roster()
                .get(&args.student)
                .map(|r| r.course.clone())
                .unwrap_or_default();
            let report = store.engine().report(state);
            render::write_report(&mut out, &args.student, &course, &report, args.format)?;
            Ok(())
        }
        Command::Serve { addr } => {
            let store = EvalStore::open(engine, &cli.log)?;
            drop(out);
            let rt = tokio::runtime::Runtime::new()?;
            rt.block_on(fdes_evalstore::http::serve(addr, store))?;
            Ok(())
        }
        Command::Check => {
            let verdicts = check::invariant_suite(&engine)?;
            print_verdicts(&mut out, &verdicts)
        }
    }
}
