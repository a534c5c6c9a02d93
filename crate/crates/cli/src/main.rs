use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rof_core::dimensioning::{dimension_sweep_with, linspace, parse_ratio, CpriCoding, MimoGeometry, ModulationScheme};
use rof_core::exec::{self, Execution};
use rof_core::harness::{run_evm_sweep_with, run_figure3, run_figure4, run_link_with, OutputFormat, RunConfig, RunDir, Table};
use rof_core::powermodel::{power_sweep_with, PowerParams};
use rof_core::{Error, Result};

#[derive(Parser)]
#[command(name = "rof-bench", version, about = "A-RoF vs D-RoF fronthaul dimensioning, power and link simulation")]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Override a configuration key, e.g. `fiber.length_km=10`.
    #[arg(long = "set", value_name = "KEY=VALUE", global = true)]
    set: Vec<String>,
    #[arg(long, value_enum, default_value_t = Format::Csv, global = true)]
    output: Format,
    /// Output directory; `dimension` and `power` treat it as a file path and print to stdout without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed for every random component.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

impl From<Format> for OutputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Csv => OutputFormat::Csv,
            Format::Json => OutputFormat::Json,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Aggregate bandwidth and bit rate of both fronthaul types.
    Dimension(DimensionArgs),
    /// CU + RRH power of both chains.
    Power(PowerArgs),
    /// Simulate one link and report per-channel EVM.
    Link,
    /// EVM versus launch power over link kinds and WDM counts.
    Sweep,
    /// Aggregate-bandwidth table over the per-wavelength bandwidth.
    Figure3,
    /// Power table over the antenna count.
    Figure4,
}

#[derive(Args)]
struct DimensionArgs {
    #[arg(long)]
    carrier_ghz: Option<f64>,
    /// Scalar or `start:stop:count`.
    #[arg(long)]
    bw_per_wavelength_ghz: Option<String>,
    #[arg(long)]
    tx: Option<u32>,
    #[arg(long)]
    sectors: Option<u32>,
    /// Constellation size.
    #[arg(long)]
    qam: Option<u32>,
    #[arg(long)]
    resolution_bits: Option<u32>,
    /// Number or fraction, e.g. `16/15`.
    #[arg(long)]
    control_overhead: Option<String>,
    #[arg(long)]
    line_code_rate: Option<String>,
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    Arof,
    Drof,
    Both,
}

#[derive(Args)]
struct PowerArgs {
    /// TOML file of power coefficients.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long)]
    tx: Option<u32>,
    #[arg(long)]
    sectors: Option<u32>,
    #[arg(long, value_enum, default_value_t = KindArg::Both)]
    kind: KindArg,
    /// `start:stop:step` antenna counts.
    #[arg(long)]
    sweep_tx: Option<String>,
}

fn config_error(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}

fn parse_bw_axis(text: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = text.split(':').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|_| config_error(format!("bad bandwidth '{text}'")));
    match parts.as_slice() {
        [v] => Ok(vec![num(v)?]),
        [a, b, n] => {
            let count: usize = n.trim().parse().map_err(|_| config_error(format!("bad point count in '{text}'")))?;
            if count == 0 {
                return Err(config_error("bandwidth sweep needs at least one point"));
            }
            Ok(linspace(num(a)?, num(b)?, count))
        }
        _ => Err(config_error(format!("expected value or start:stop:count, got '{text}'"))),
    }
}

fn parse_tx_axis(text: &str) -> Result<Vec<u32>> {
    let bad = || config_error(format!("expected start:stop:step, got '{text}'"));
    let v: Vec<u32> = text.split(':').map(|s| s.trim().parse().map_err(|_| bad())).collect::<Result<_>>()?;
    match v.as_slice() {
        [a, b, s] if *s > 0 && a <= b => Ok((*a..=*b).step_by(*s as usize).collect()),
        _ => Err(bad()),
    }
}

fn emit(table: &Table, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let text = table.render(format)?;
    match out {
        Some(p) => std::fs::write(p, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

fn dimension(cfg: &RunConfig, a: &DimensionArgs, exec: Execution, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let s = &cfg.scenario;
    let geom = MimoGeometry::new(
        a.tx.unwrap_or(s.geom.tx_antennas),
        s.geom.rx_antennas,
        a.sectors.unwrap_or(s.geom.sectors),
    )?;
    let modulation = a.qam.map_or(Ok(s.modulation), ModulationScheme::new)?;
    let coding = CpriCoding::new(
        a.resolution_bits.unwrap_or(s.coding.resolution_bits),
        a.control_overhead.as_deref().map_or(Ok(s.coding.control_overhead), parse_ratio)?,
        a.line_code_rate.as_deref().map_or(Ok(s.coding.line_code_rate), parse_ratio)?,
    )?;
    let bws = match &a.bw_per_wavelength_ghz {
        Some(t) => parse_bw_axis(t)?,
        None => vec![s.band.rf_bandwidth_ghz()],
    };
    let carrier = a.carrier_ghz.unwrap_or(s.band.carrier_freq_ghz());
    let rows = dimension_sweep_with(exec, carrier, &geom, &coding, &modulation, &bws)?;
    emit(&Table::dimensioning("dimension", &rows), format, out)
}

fn power(cfg: &RunConfig, a: &PowerArgs, exec: Execution, format: OutputFormat, out: Option<&Path>) -> Result<()> {
    let params = match &a.params {
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|e| config_error(format!("{}: {e}", p.display())))?;
            PowerParams::from_toml(&text)?
        }
        None => cfg.power,
    };
    params.validate()?;
    let g = &cfg.scenario.geom;
    let sectors = a.sectors.unwrap_or(g.sectors);
    let counts = match &a.sweep_tx {
        Some(t) => parse_tx_axis(t)?,
        None => vec![a.tx.unwrap_or(g.tx_antennas)],
    };
    let geom = MimoGeometry::new(g.tx_antennas, g.rx_antennas, sectors)?;
    let rows = power_sweep_with(exec, &params, &geom, &counts)?;
    let mut table = Table::power("power", &rows);
    let drop = match a.kind {
        KindArg::Arof => Some(2),
        KindArg::Drof => Some(1),
        KindArg::Both => None,
    };
    if let Some(col) = drop {
        table.columns.remove(col);
        table.rows.iter_mut().for_each(|r| {
            r.remove(col);
        });
    }
    emit(&table, format, out)
}

fn run(cli: Cli) -> Result<()> {
    let mut cfg = RunConfig::load(cli.config.as_deref(), &cli.set)?;
    if let Some(seed) = cli.seed {
        cfg = cfg.with_seed(seed);
    }
    if cli.jobs == Some(0) {
        return Err(config_error("--jobs must be at least 1"));
    }
    let exec = Execution::Parallel;
    let format = OutputFormat::from(cli.output);
    let results_root = cli.out.clone().unwrap_or_else(|| PathBuf::from("results"));
    let run_dir = || RunDir::create(&results_root, &cfg.hash());

    exec::with_jobs(cli.jobs, || match &cli.command {
        Command::Dimension(a) => dimension(&cfg, a, exec, format, cli.out.as_deref()),
        Command::Power(a) => power(&cfg, a, exec, format, cli.out.as_deref()),
        Command::Figure3 => {
            let s = &cfg.scenario;
            let rows = run_figure3(exec, &cfg.figure3, &s.geom, &s.coding, &s.modulation)?;
            let dir = run_dir()?;
            dir.append(&Table::dimensioning("figure3", &rows), format)?;
            println!("{}", dir.path().display());
            Ok(())
        }
        Command::Figure4 => {
            let rows = run_figure4(exec, &cfg.figure4, &cfg.power, &cfg.scenario.geom)?;
            let dir = run_dir()?;
            dir.append(&Table::power("figure4", &rows), format)?;
            println!("{}", dir.path().display());
            Ok(())
        }
        Command::Link => {
            let report = run_link_with(exec, &cfg.scenario)?;
            let dir = run_dir()?;
            dir.append(&Table::link(&report), format)?;
            for c in &report.channels {
                eprintln!("channel {}: EVM {:.3}%", c.channel, c.evm_percent);
            }
            println!("{}", dir.path().display());
            Ok(())
        }
        Command::Sweep => {
            let result = run_evm_sweep_with(exec, &cfg.scenario, &cfg.sweep)?;
            let dir = run_dir()?;
            dir.append(&Table::sweep(&result), format)?;
            dir.append(&Table::dynamic_range(&result), format)?;
            if let Some(f) = Table::failures(&result) {
                eprintln!("{} sweep points failed", f.rows.len());
                dir.append(&f, format)?;
            }
            for d in &result.dynamic_ranges {
                eprintln!("{} x{}: dynamic range {} dB", d.kind, d.wdm, d.dynamic_range_db);
            }
            println!("{}", dir.path().display());
            Ok(())
        }
    })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
