//! Command-line front end.
//!
//! Exit codes: 0 success, 1 failed self-check, 2 invalid input (arguments or
//! state specification), 3 computation or I/O failure. Every failure prints
//! one line `error[<kind>]: <reason>` to stderr.

pub mod output;
pub mod spec;
pub mod verify;

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use thiserror::Error;

use crate::angular::HalfInteger;
use crate::measures::{
    area_report, build_grid, coherent_area_k, hidden_from_report, DEFAULT_DIPOLE_THRESHOLD, DEFAULT_HIGHER_THRESHOLD,
};
use crate::multipole::extract_multipoles;
use crate::qfunction::evaluate_field;
use crate::sphere::SphereGrid;
use crate::state::{stokes_mean, stokes_uncertainty, PolarizationState};

use output::Format;
use spec::{BuiltState, StateSpec};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("error[schema]: {0}")]
    Schema(String),
    #[error("error[computation]: {0}")]
    Computation(#[from] crate::error::Error),
    #[error("error[io]: {0}")]
    Io(String),
    #[error("error[verify]: failed checks: {}", .0.join(", "))]
    Verify(Vec<&'static str>),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Verify(_) => 1,
            CliError::Schema(_) => 2,
            CliError::Computation(_) | CliError::Io(_) => 3,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "polsphere", version, about = "Polarization multipoles, Q functions and effective areas")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, clap::Args)]
pub struct Common {
    /// State specification (JSON).
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// Output file.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Highest multipole rank; defaults to 2S_max.
    #[arg(long)]
    pub kmax: Option<u32>,
    /// Grid override, `NTHETAxNPHI`.
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write the multipole table of a state.
    Multipoles(Common),
    /// Sample Q and its components on a grid.
    Qgrid(Common),
    /// Effective areas, or the coherent-state law with --coherent-sweep.
    Areas {
        #[command(flatten)]
        common: Common,
        /// Comma-separated spins, e.g. `1,5,10` or `0.5,1.5`.
        #[arg(long, value_delimiter = ',')]
        coherent_sweep: Option<Vec<f64>>,
    },
    /// Run the invariant self-check.
    Verify {
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, hide = true)]
        inject_fault: bool,
    },
    /// Summarize a state.
    Info(Common),
}

pub fn parse_grid(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Schema(format!("grid must look like NTHETAxNPHI, got {text:?}"));
    let (a, b) = text.split_once(['x', 'X']).ok_or_else(bad)?;
    let nt = a.trim().parse::<usize>().map_err(|_| bad())?;
    let np = b.trim().parse::<usize>().map_err(|_| bad())?;
    if nt == 0 || np == 0 {
        return Err(bad());
    }
    Ok((nt, np))
}

fn load_state(common: &Common) -> Result<BuiltState, CliError> {
    let path = common.state.as_ref().ok_or_else(|| CliError::Schema("--state is required".into()))?;
    let text = fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    let spec = StateSpec::from_json(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))?;
    let built = spec.build().map_err(|e| match e {
        crate::error::Error::Domain(msg) => CliError::Schema(msg),
        other => CliError::Computation(other),
    })?;
    for t in &built.truncations {
        eprintln!(
            "note: two-mode coherent state truncated at 2S = {}, retained weight {:.17e}, tail bound {:.3e}",
            t.raw_weights.last().map_or(0, |(s, _)| s.twice()),
            t.retained_weight,
            t.discarded_bound
        );
    }
    Ok(built)
}

fn grid_for(common: &Common, state: &PolarizationState) -> Result<SphereGrid, CliError> {
    match &common.grid {
        None => Ok(build_grid(state.max_spin())),
        Some(text) => {
            let (nt, np) = parse_grid(text)?;
            let grid = SphereGrid::new(nt, np)?;
            if let Some(w) = grid.check_degree(2 * state.max_spin().twice() as u32) {
                eprintln!("warning: {w}; areas and integrals are not exact");
            }
            Ok(grid)
        }
    }
}

fn write_out(path: Option<&Path>, contents: &str) -> Result<(), CliError> {
    let path = path.ok_or_else(|| CliError::Schema("--out is required".into()))?;
    fs::write(path, contents).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn cmd_multipoles(common: &Common, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    let built = load_state(common)?;
    let table = extract_multipoles(&built.state, common.kmax)?;
    let text = match common.format {
        Format::Csv => output::multipoles_csv(&table),
        Format::Json => output::multipoles_json(&table),
    };
    write_out(common.out.as_deref(), &text)?;
    for (k, s) in output::strengths(&table) {
        writeln!(stdout, "K={k} strength={s:.16e}").ok();
    }
    Ok(())
}

fn cmd_qgrid(common: &Common) -> Result<(), CliError> {
    let built = load_state(common)?;
    let grid = grid_for(common, &built.state)?;
    let field = evaluate_field(&built.state, &grid, common.kmax)?;
    let text = match common.format {
        Format::Csv => output::field_csv(&field),
        Format::Json => output::field_json(&field),
    };
    write_out(common.out.as_deref(), &text)
}

fn cmd_areas(common: &Common, sweep: Option<&[f64]>, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    if let Some(spins) = sweep {
        let mut rows = Vec::new();
        for &s in spins {
            let spin = HalfInteger::from_f64(s)
                .filter(|h| h.twice() > 0)
                .ok_or_else(|| CliError::Schema(format!("sweep spin {s} is not a positive half-integer")))?;
            for k in 0..=spin.twice() as u32 {
                rows.push(output::SweepRow { spin, k, area: coherent_area_k(spin, k)? });
            }
        }
        let text = match common.format {
            Format::Csv => output::sweep_csv(&rows),
            Format::Json => output::sweep_json(&rows),
        };
        return write_out(common.out.as_deref(), &text);
    }
    let built = load_state(common)?;
    let grid = grid_for(common, &built.state)?;
    let report = area_report(&built.state, &grid, common.kmax)?;
    let hidden = hidden_from_report(&report, DEFAULT_DIPOLE_THRESHOLD, DEFAULT_HIGHER_THRESHOLD);
    let text = match common.format {
        Format::Csv => output::areas_csv(&report),
        Format::Json => output::areas_json(&report, &hidden),
    };
    write_out(common.out.as_deref(), &text)?;
    writeln!(
        stdout,
        "total={:.16e} dipole={:.16e} higher={:.16e} hidden_polarization={}",
        report.total_area, hidden.dipole_area, hidden.higher_area, hidden.verdict
    )
    .ok();
    Ok(())
}

fn cmd_verify(
    seed: u64,
    out: Option<&Path>,
    inject_fault: bool,
    stdout: &mut dyn std::io::Write,
) -> Result<(), CliError> {
    let fault = inject_fault.then_some(verify::Fault::SENSITIVITY);
    let report = verify::run(seed, fault)?;
    let text = report.render();
    write!(stdout, "{text}").ok();
    if let Some(path) = out {
        write_out(Some(path), &text)?;
    }
    if report.all_passed() {
        Ok(())
    } else {
        Err(CliError::Verify(report.failed()))
    }
}

fn cmd_info(common: &Common, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    let built = load_state(common)?;
    let state = &built.state;
    let mut text = String::new();
    use std::fmt::Write as _;
    writeln!(text, "sectors: {}", state.sectors().len()).unwrap();
    for b in state.sectors() {
        writeln!(text, "  S={} weight={:.16e} purity={:.16e}", b.spin(), b.trace(), b.purity()).unwrap();
    }
    let s = stokes_mean(state);
    let u = stokes_uncertainty(state);
    writeln!(text, "stokes_mean: {:.16e} {:.16e} {:.16e}", s.s1, s.s2, s.s3).unwrap();
    writeln!(text, "variance_sum={:.16e} bound={:.16e}", u.variance_sum, u.half_mean_photon_number).unwrap();
    write!(stdout, "{text}").ok();
    if let Some(path) = &common.out {
        write_out(Some(path), &text)?;
    }
    Ok(())
}

/// Runs a parsed command.
pub fn run(cli: &Cli, stdout: &mut dyn std::io::Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Multipoles(c) => cmd_multipoles(c, stdout),
        Command::Qgrid(c) => cmd_qgrid(c),
        Command::Areas { common, coherent_sweep } => cmd_areas(common, coherent_sweep.as_deref(), stdout),
        Command::Verify { seed, out, inject_fault } => cmd_verify(*seed, out.as_deref(), *inject_fault, stdout),
        Command::Info(c) => cmd_info(c, stdout),
    }
}

/// Parses `args`, runs, and returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) {
                print!("{e}");
                return 0;
            }
            let first = e.to_string();
            let line = first.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            eprintln!("error[schema]: {line}");
            return 2;
        }
    };
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            lock.flush().ok();
            eprintln!("{}", e.to_string().replace('\n', " "));
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_argument() {
        assert_eq!(parse_grid("16x32").unwrap(), (16, 32));
        assert!(parse_grid("16").is_err());
        assert!(parse_grid("0x3").is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(CliError::Schema(String::new()).exit_code(), 2);
        assert_eq!(CliError::Verify(vec!["x"]).exit_code(), 1);
        let c: CliError = crate::error::Error::Consistency("x".into()).into();
        assert_eq!(c.exit_code(), 3);
        assert!(c.to_string().starts_with("error[computation]:"));
    }
}
