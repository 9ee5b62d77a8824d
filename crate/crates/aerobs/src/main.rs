use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use aerobs::config::{load_scenario, Ledger};
use aerobs::reproduce::bundled_scenario;
use aerobs::{emit, reproduce, scenario_rows, Format, Overrides, ScenarioConfig, Stages, TableId};
use clap::{Args, Parser, Subcommand};

/// Power, endurance, coverage and dimensioning of aerial base stations.
#[derive(Parser)]
#[command(name = "aerobs", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Power breakdown of a platform carrying a base station.
    Power(ScenarioArgs),
    /// Service time and harvest ratio.
    Endurance(ScenarioArgs),
    /// Monte Carlo coverage radius.
    Coverage(ScenarioArgs),
    /// Fleet size and backup batteries for a service area.
    Dimension(ScenarioArgs),
    /// Every stage the scenario enables.
    Emit(ScenarioArgs),
    /// Recompute a published table and compare cell by cell.
    Reproduce {
        /// I, II, III, V or fig2-sweep
        table: TableId,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct ScenarioArgs {
    /// Scenario file, or the id of a bundled scenario such as `rwd-pico`.
    #[arg(long)]
    scenario: String,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OutputArgs {
    /// Override the Monte Carlo seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the Monte Carlo draws per radius.
    #[arg(long)]
    samples: Option<usize>,
    /// pretty-table, csv or plot-data.
    #[arg(long, default_value = "pretty-table")]
    format: Format,
    /// Directory for output files; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl OutputArgs {
    fn overrides(&self) -> Overrides {
        Overrides {
            seed: self.seed,
            samples: self.samples,
        }
    }
}

const EXIT_TOLERANCE: u8 = 1;
const EXIT_INVALID: u8 = 2;

fn load(arg: &str) -> Result<ScenarioConfig, String> {
    let path = Path::new(arg);
    if path.exists() {
        return load_scenario(path).map_err(|e| e.to_string());
    }
    let ledger = Ledger::builtin().map_err(|e| e.to_string())?;
    match bundled_scenario(arg, &ledger) {
        Some(config) => config.map_err(|e| e.to_string()),
        None => Err(format!("no scenario file or bundled scenario named `{arg}`")),
    }
}

fn report_files(files: &[PathBuf]) {
    for f in files {
        eprintln!("wrote {}", f.display());
    }
}

fn run_stage(args: &ScenarioArgs, stages: Stages) -> ExitCode {
    let mut config = match load(&args.scenario) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };
    args.output.overrides().apply(&mut config);
    let rows = match scenario_rows(&config, stages) {
        Ok(rows) => rows,
        Err(e) => {
            eprintln!("error: {}: {e}", config.id);
            return ExitCode::from(EXIT_INVALID);
        }
    };
    match emit(&rows, args.output.format, args.output.out.as_deref(), &mut io::stdout().lock()) {
        Ok(files) => {
            report_files(&files);
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_INVALID)
        }
    }
}

fn run_reproduce(table: TableId, output: &OutputArgs) -> ExitCode {
    let report = match reproduce(table, output.overrides()) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    };

    let mut stdout = io::stdout().lock();
    let emitted = match (output.format, &output.out) {
        // a bare table view shows the comparisons themselves
        (aerobs::Format::PrettyTable, None) => Ok(Vec::new()),
        (format, out) => emit(&report.rows, format, out.as_deref(), &mut stdout),
    };
    match emitted {
        Ok(files) => report_files(&files),
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(EXIT_INVALID);
        }
    }
    if let Some(dir) = &output.out {
        let path = dir.join("checks.csv");
        if let Err(e) = report.write_checks_file(&path) {
            eprintln!("error: cannot write {}: {e}", path.display());
            return ExitCode::from(EXIT_INVALID);
        }
        report_files(&[path]);
    }

    // keep stdout clean for csv output
    let summary: &mut dyn Write = if output.format == Format::Csv && output.out.is_none() {
        &mut io::stderr()
    } else {
        &mut stdout
    };
    for check in &report.checks {
        let _ = writeln!(summary, "{check}");
    }
    let failed = report.failures().count();
    let _ = writeln!(
        summary,
        "table {}: {} of {} checks passed",
        table,
        report.checks.len() - failed,
        report.checks.len()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(EXIT_TOLERANCE)
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_INVALID)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match &cli.command {
        Command::Power(a) => run_stage(a, Stages::POWER),
        Command::Endurance(a) => run_stage(a, Stages::ENDURANCE),
        Command::Coverage(a) => run_stage(a, Stages::COVERAGE),
        Command::Dimension(a) => run_stage(a, Stages::DIMENSIONING),
        Command::Emit(a) => run_stage(a, Stages::ALL),
        Command::Reproduce { table, output } => run_reproduce(*table, output),
    }
}
