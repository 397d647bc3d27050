use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};

use vcsra::analytic::{
    asymptotic_sinr_cb, asymptotic_sinr_zf, calibrate_lambda, p_av_multi, p_av_single,
    ra_interference_expectation, AnalyticParams, CalibrationTarget,
};
use vcsra::beamforming::BeamformerKind;
use vcsra::channel::ModelTag;
use vcsra::config::ScenarioConfig;
use vcsra::montecarlo::{
    analytic_rate, parse_grid, reproduce_figure, simulate, sweep, AvailabilitySamples, Cell,
    Execution, FigureId, SweepAxis, Table,
};
use vcsra::Error;

#[derive(Debug, Parser)]
#[command(
    name = "vcsra",
    version,
    about = "Virtual-carrier-sensing random access simulator"
)]
struct Cli {
    /// Scenario file (flat TOML); defaults apply to missing keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// CSV output path; stdout when omitted.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Overrides the scenario seed.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Worker threads for the trial pool.
    #[arg(long, global = true, env = "VCSRA_DEFAULT_THREADS")]
    threads: Option<usize>,

    /// `key=value` scenario override, applied after the config file.
    #[arg(long = "set", global = true, value_name = "KEY=VALUE")]
    overrides: Vec<String>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Closed-form availability, interference and rates (simplified model).
    Analytic,
    /// Monte Carlo estimates for one scenario.
    Simulate,
    /// Monte Carlo estimates along one scenario axis.
    Sweep {
        /// lambda_db, n_r, m or n_c
        #[arg(long)]
        axis: String,
        /// `start:end:step` or a comma-separated list
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
    },
    /// Regenerates the data behind one figure (fig5 to fig13).
    Reproduce {
        figure: String,
        /// Fraction of the full 10^4 trials per point.
        #[arg(long, default_value_t = 1.0)]
        trials_scale: f64,
    },
    /// Threshold giving a target multi-channel availability.
    Calibrate {
        #[arg(long)]
        target_pav: f64,
        #[arg(long, default_value_t = 1)]
        nc: usize,
    },
}

impl Command {
    fn label(&self) -> String {
        match self {
            Command::Analytic => "analytic".into(),
            Command::Simulate => "simulate".into(),
            Command::Sweep { axis, grid } => format!("sweep --axis {axis} --grid {grid}"),
            Command::Reproduce {
                figure,
                trials_scale,
            } => format!("reproduce {figure} --trials-scale {trials_scale}"),
            Command::Calibrate { target_pav, nc } => {
                format!("calibrate --target-pav {target_pav} --nc {nc}")
            }
        }
    }
}

enum Failure {
    Usage(String),
    Runtime(Error),
    Io(io::Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_usage() {
            Failure::Usage(format!("error[{}]: {e}", e.category()))
        } else {
            Failure::Runtime(e)
        }
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Io(e)
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error[{}]: {e}", e.category());
            ExitCode::from(1)
        }
        Err(Failure::Io(e)) => {
            eprintln!("error[io]: {e}");
            ExitCode::from(1)
        }
    }
}

fn load_config(cli: &Cli) -> Result<ScenarioConfig, Failure> {
    let text = match &cli.config {
        Some(path) => std::fs::read_to_string(path).map_err(|e| {
            Failure::Usage(format!(
                "error[config]: cannot read {}: {e}",
                path.display()
            ))
        })?,
        None => String::new(),
    };
    let mut cfg = ScenarioConfig::parse(&text, &cli.overrides)?;
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn run(cli: &Cli) -> Result<(), Failure> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(Failure::Usage(
                "error[validation]: --threads must be positive".into(),
            ));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| Failure::Runtime(Error::Validation(e.to_string())))?;
    }
    let exec = Execution::default();
    let cfg = load_config(cli)?;
    let start = Instant::now();

    let (table, header_cfg) = match &cli.command {
        Command::Analytic => (analytic_table(&cfg)?, Some(&cfg)),
        Command::Simulate => (simulate(&cfg, exec)?, Some(&cfg)),
        Command::Sweep { axis, grid } => {
            let axis: SweepAxis = axis.parse()?;
            let grid = parse_grid(grid)?;
            (sweep(&cfg, axis, &grid, exec)?, Some(&cfg))
        }
        Command::Reproduce {
            figure,
            trials_scale,
        } => {
            let fig: FigureId = figure.parse()?;
            (reproduce_figure(fig, *trials_scale, cfg.seed, exec)?, None)
        }
        Command::Calibrate { target_pav, nc } => {
            (calibrate_table(&cfg, *target_pav, *nc, exec)?, Some(&cfg))
        }
    };

    let mut sink: Box<dyn Write> = match &cli.out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    };
    write_header(&mut sink, cli, header_cfg, &table)?;
    write_csv(&mut sink, &table)?;
    sink.flush()?;
    drop(sink);

    eprintln!(
        "{}: {} row(s){} in {:.1} s",
        cli.command.label(),
        table.rows.len(),
        cli.out
            .as_deref()
            .map(|p: &Path| format!(" -> {}", p.display()))
            .unwrap_or_default(),
        start.elapsed().as_secs_f64()
    );
    Ok(())
}

fn write_header(
    w: &mut dyn Write,
    cli: &Cli,
    cfg: Option<&ScenarioConfig>,
    table: &Table,
) -> io::Result<()> {
    writeln!(w, "# vcsra {}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# command: {}", cli.command.label())?;
    for o in &cli.overrides {
        writeln!(w, "# override: {o}")?;
    }
    if let Some(cfg) = cfg {
        writeln!(w, "# seed: {}", cfg.seed)?;
        writeln!(w, "# trials: {}", cfg.trials)?;
        for line in cfg.to_toml().lines().filter(|l| !l.trim().is_empty()) {
            writeln!(w, "# config: {line}")?;
        }
    }
    for (key, value) in &table.notes {
        writeln!(w, "# {key}: {value}")?;
    }
    Ok(())
}

fn write_csv(w: &mut dyn Write, table: &Table) -> io::Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(&table.columns)?;
    for row in &table.rows {
        out.write_record(row.iter().map(Cell::to_string))?;
    }
    out.flush()
}

fn analytic_table(cfg: &ScenarioConfig) -> Result<Table, Failure> {
    let params = cfg.analytic_params()?;
    let mut table = Table::new(&[
        "lambda_db",
        "lambda_bar",
        "m",
        "q",
        "n_a",
        "n_c",
        "n_r",
        "rho_u_db",
        "p_av_single",
        "p_av_multi",
        "ra_interference",
        "sinr_cb",
        "rate_cb",
        "sinr_zf",
        "rate_zf",
    ]);
    let p_sc = p_av_single(&params)?;
    let defined = |r: vcsra::Result<f64>| match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::DegenerateThreshold { .. } | Error::Domain(_)) => Ok(None),
        Err(e) => Err(e),
    };
    table.push(vec![
        cfg.lambda_db.into(),
        params.lambda_bar().into(),
        cfg.m.into(),
        cfg.q().into(),
        cfg.n_a.into(),
        cfg.n_c.into(),
        cfg.n_r.into(),
        cfg.rho_u_db.into(),
        p_sc.into(),
        p_av_multi(p_sc, cfg.n_c)?.into(),
        defined(ra_interference_expectation(&params))?.into(),
        defined(asymptotic_sinr_cb(&params))?.into(),
        analytic_rate(BeamformerKind::Cb, &params)?.into(),
        defined(asymptotic_sinr_zf(&params))?.into(),
        analytic_rate(BeamformerKind::Zf, &params)?.into(),
    ]);
    Ok(table)
}

fn calibrate_table(
    cfg: &ScenarioConfig,
    p: f64,
    n_c: usize,
    exec: Execution,
) -> Result<Table, Failure> {
    if !(p > 0.0 && p < 1.0) || n_c == 0 {
        return Err(Failure::Usage(format!(
            "error[validation]: --target-pav must lie in (0, 1) and --nc be positive (got {p}, {n_c})"
        )));
    }
    let (method, lambda_db, achieved) = match cfg.model {
        ModelTag::Simplified => {
            let params = cfg.analytic_params()?;
            let db = calibrate_lambda(CalibrationTarget::Availability { p, n_c }, &params)?;
            let p_sc = p_av_single(&AnalyticParams {
                lambda_db: db,
                ..params
            })?;
            ("analytic", db, p_av_multi(p_sc, n_c)?)
        }
        ModelTag::Practical => {
            let samples = AvailabilitySamples::draw(cfg, cfg.trials, 1, exec)?;
            let ecdf = samples.empirical()?;
            let db = ecdf.calibrate(p, n_c)?;
            ("empirical", db, p_av_multi(ecdf.p_sc(db), n_c)?)
        }
    };
    let mut table = Table::new(&[
        "model",
        "method",
        "target_pav",
        "n_c",
        "lambda_db",
        "p_av_achieved",
    ]);
    table.push(vec![
        cfg.model.to_string().into(),
        method.into(),
        p.into(),
        n_c.into(),
        lambda_db.into(),
        achieved.into(),
    ]);
    Ok(table)
}
