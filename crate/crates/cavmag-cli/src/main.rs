//! Command-line front end: deterministic CSV emission for spectra, gap
//! location, dispersive quantities, gauge reports, transmission maps, and
//! field-map form factors.
//!
//! Exit codes: 0 success, 1 usage/input error, 2 compute error (e.g. a
//! dispersive singularity).

#![allow(clippy::needless_range_loop)]

use std::f64::consts::PI;
use std::fmt::Write as _;
use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use cavmag::config::parse_graph;
use cavmag::dispersive::{effective_hamiltonian, validity_margin, ValidityMargin};
use cavmag::fmt_e12;
use cavmag::formfactor::{
    coupling_phase, coupling_strength, form_factor, z_component_check, FieldMap, MaterialConstants,
    SampleRegion,
};
use cavmag::gauge::reduce_phases;
use cavmag::inout::{transmission_map, ProbeGrid};
use cavmag::spectrum::{minimum_gap, sweep_spectrum, SweepParameter, SweepSpec};
use cavmag::SystemParams;

#[derive(Parser)]
#[command(
    name = "cavmag",
    version,
    about = "Multimode cavity-magnonics: spectra, loop phases, dispersive couplings, and S21 maps"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep the polariton spectrum and write a CSV table
    Spectrum(SpectrumArgs),
    /// Locate the minimal middle-branch gap over a parameter sweep
    Gap(GapArgs),
    /// Dispersive effective Hamiltonian: shifts, couplings, validity
    Dispersive(DispersiveArgs),
    /// Gauge-fix a coupling-graph config and report loop phases
    Gauge(GaugeArgs),
    /// Microwave transmission |S21| map over probe x sweep grid
    S21map(S21Args),
    /// Form factor, coupling phase, and coupling strength from a field CSV
    Formfactor(FormFactorArgs),
}

/// Two-sphere system parameters (GHz unless noted). Defaults reproduce the
/// reference system: cavities at 4 and 6 GHz, magnons at 5 GHz, g = 150 MHz,
/// gamma = 5 MHz per port, kappa = 1 MHz.
#[derive(Args, Clone)]
struct ParamArgs {
    /// Mean cavity frequency in GHz
    #[arg(long, default_value_t = 5.0)]
    omega_c: f64,
    /// Cavity half-splitting in GHz
    #[arg(long, default_value_t = 1.0)]
    delta_c: f64,
    /// Mean magnon frequency in GHz
    #[arg(long, default_value_t = 5.0)]
    omega_m: f64,
    /// Magnon half-splitting in GHz
    #[arg(long, default_value_t = 0.0)]
    delta_m: f64,
    /// Coupling to cavity mode 0 in GHz
    #[arg(long, default_value_t = 0.15)]
    g0: f64,
    /// Coupling to cavity mode 1 in GHz
    #[arg(long, default_value_t = 0.15)]
    g1: f64,
    /// Loop phase: `0`, `pi`, or a value in radians
    #[arg(long, value_parser = parse_theta, default_value = "0")]
    theta: f64,
    /// Intrinsic dissipation of every mode in MHz
    #[arg(long, default_value_t = 1.0)]
    kappa: f64,
    /// Bath coupling of each cavity mode to each port in MHz
    #[arg(long, default_value_t = 5.0)]
    gamma: f64,
}

impl ParamArgs {
    fn to_params(&self) -> SystemParams {
        let gamma_ghz = self.gamma * 1e-3;
        SystemParams {
            omega_c: self.omega_c,
            delta_c: self.delta_c,
            omega_m: self.omega_m,
            delta_m: self.delta_m,
            g0: self.g0,
            g1: self.g1,
            theta: self.theta,
            kappa: self.kappa * 1e-3,
            gamma_a: [gamma_ghz, gamma_ghz],
            gamma_b: [gamma_ghz, gamma_ghz],
        }
    }

    fn describe(&self) -> String {
        format!(
            "omega_c={} delta_c={} omega_m={} delta_m={} g0={} g1={} theta={} kappa_mhz={} gamma_mhz={}",
            self.omega_c,
            self.delta_c,
            self.omega_m,
            self.delta_m,
            self.g0,
            self.g1,
            self.theta,
            self.kappa,
            self.gamma
        )
    }
}

#[derive(Args)]
struct SpectrumArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Swept parameter
    #[arg(long, value_parser = ["omega-m", "delta-m"], default_value = "omega-m")]
    param: String,
    /// Sweep range as start:stop:steps (GHz)
    #[arg(long, value_parser = parse_range, default_value = "3.4:6.6:601")]
    sweep: Range,
    /// Output format (only `csv` in this version)
    #[arg(long, value_parser = ["csv"], default_value = "csv")]
    format: String,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GapArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Swept parameter
    #[arg(long, value_parser = ["omega-m", "delta-m"], default_value = "delta-m")]
    param: String,
    /// Sweep range as start:stop:steps (GHz)
    #[arg(long, value_parser = parse_range, default_value = "-0.25:0.25:501")]
    sweep: Range,
    /// Lower branch index
    #[arg(long, default_value_t = 1)]
    branch_low: usize,
    /// Upper branch index
    #[arg(long, default_value_t = 2)]
    branch_high: usize,
    /// Output format (only `csv` in this version)
    #[arg(long, value_parser = ["csv"], default_value = "csv")]
    format: String,
    /// Also write the swept spectrum CSV here
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DispersiveArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Output format (only `csv` in this version)
    #[arg(long, value_parser = ["csv"], default_value = "csv")]
    format: String,
    /// Output CSV path for (quantity,k,kprime,re_ghz,im_ghz) rows
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct GaugeArgs {
    /// Coupling-graph config file
    #[arg(long)]
    config: PathBuf,
    /// Optional CSV with (cycle_index, mode_sequence, theta_rad)
    #[arg(long)]
    csv: Option<PathBuf>,
}

#[derive(Args)]
struct S21Args {
    #[command(flatten)]
    params: ParamArgs,
    /// Swept parameter
    #[arg(long, value_parser = ["omega-m", "delta-m"], default_value = "omega-m")]
    param: String,
    /// Probe frequency range as start:stop:steps (GHz)
    #[arg(long, value_parser = parse_range, default_value = "3.4:6.6:601")]
    probe: Range,
    /// Sweep range as start:stop:steps (GHz)
    #[arg(long, value_parser = parse_range, default_value = "3.4:6.6:601")]
    sweep: Range,
    /// Output format (only `csv` in this version)
    #[arg(long, value_parser = ["csv"], default_value = "csv")]
    format: String,
    /// Output CSV path (stdout when omitted)
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct FormFactorArgs {
    /// Field map CSV (x_m,y_m,z_m,re_hx,im_hx,re_hy,im_hy,re_hz,im_hz,cell_volume_m3)
    #[arg(long)]
    field: PathBuf,
    /// Sphere center as x,y,z in meters
    #[arg(long, value_parser = parse_center)]
    center: Center,
    /// Sphere radius in meters
    #[arg(long)]
    radius: f64,
    /// Cavity frequency (GHz) used for the coupling strength
    #[arg(long, default_value_t = 5.0)]
    omega_c: f64,
}

#[derive(Clone, Copy, Debug)]
struct Range {
    start: f64,
    stop: f64,
    steps: usize,
}

#[derive(Clone, Copy, Debug)]
struct Center([f64; 3]);

fn parse_theta(s: &str) -> Result<f64, String> {
    match s {
        "pi" => Ok(PI),
        "-pi" => Ok(-PI),
        other => other
            .parse()
            .map_err(|_| format!("theta must be `0`, `pi`, or radians, got `{other}`")),
    }
}

fn parse_range(s: &str) -> Result<Range, String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("expected start:stop:steps, got `{s}`"));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| format!("bad start `{}`", parts[0]))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| format!("bad stop `{}`", parts[1]))?;
    let steps: usize = parts[2]
        .parse()
        .map_err(|_| format!("bad steps `{}`", parts[2]))?;
    if steps < 2 {
        return Err("steps must be >= 2".into());
    }
    if !(start.is_finite() && stop.is_finite() && start < stop) {
        return Err(format!("need finite start < stop, got {start}..{stop}"));
    }
    Ok(Range { start, stop, steps })
}

fn parse_center(s: &str) -> Result<Center, String> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z, got `{s}`"));
    }
    let mut c = [0.0; 3];
    for (slot, p) in c.iter_mut().zip(&parts) {
        *slot = p.parse().map_err(|_| format!("bad coordinate `{p}`"))?;
    }
    Ok(Center(c))
}

fn sweep_parameter(name: &str) -> SweepParameter {
    match name {
        "delta-m" => SweepParameter::DeltaM,
        _ => SweepParameter::OmegaM,
    }
}

enum CliError {
    Usage(String),
    Compute(cavmag::Error),
}

impl From<cavmag::Error> for CliError {
    fn from(e: cavmag::Error) -> Self {
        CliError::Compute(e)
    }
}

fn usage(message: impl Into<String>) -> CliError {
    CliError::Usage(message.into())
}

fn emit(output: Option<&PathBuf>, content: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, content)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn run_spectrum(args: &SpectrumArgs) -> Result<(), CliError> {
    let params = args.params.to_params();
    let sweep = SweepSpec::new(
        sweep_parameter(&args.param),
        args.sweep.start,
        args.sweep.stop,
        args.sweep.steps,
    )?;
    let table = sweep_spectrum(&params, &sweep)?;
    let mut out = String::new();
    let _ = writeln!(
        out,
        "# cavmag spectrum param={} sweep={}:{}:{} {}",
        sweep.parameter.as_str(),
        args.sweep.start,
        args.sweep.stop,
        args.sweep.steps,
        args.params.describe()
    );
    out.push_str(
        "param_ghz,omega0_ghz,omega1_ghz,omega2_ghz,omega3_ghz,bright0,bright1,bright2,bright3\n",
    );
    for row in &table.rows {
        let mut cols = vec![fmt_e12(row.value)];
        cols.extend(row.frequencies.iter().map(|&x| fmt_e12(x)));
        cols.extend(row.brightness.iter().map(|&x| fmt_e12(x)));
        out.push_str(&cols.join(","));
        out.push('\n');
    }
    emit(args.output.as_ref(), &out)
}

fn run_gap(args: &GapArgs) -> Result<(), CliError> {
    let params = args.params.to_params();
    let sweep = SweepSpec::new(
        sweep_parameter(&args.param),
        args.sweep.start,
        args.sweep.stop,
        args.sweep.steps,
    )?;
    let table = sweep_spectrum(&params, &sweep)?;
    let found = minimum_gap(&table, args.branch_low, args.branch_high)?;
    println!(
        "min_gap_ghz = {} at {} = {}",
        fmt_e12(found.gap),
        sweep.parameter.as_str(),
        fmt_e12(found.parameter)
    );
    if let Some(path) = &args.output {
        let spectrum_args = SpectrumArgs {
            params: args.params.clone(),
            param: args.param.clone(),
            sweep: args.sweep,
            format: args.format.clone(),
            output: Some(path.clone()),
        };
        run_spectrum(&spectrum_args)?;
    }
    Ok(())
}

fn run_dispersive(args: &DispersiveArgs) -> Result<(), CliError> {
    let params = args.params.to_params();
    let eff = effective_hamiltonian(&params)?;

    println!("dispersive effective Hamiltonian (GHz)");
    println!(
        "  shifted cavity:  c0 {:>20}  c1 {:>20}",
        fmt_e12(eff.shifted_cavity[0]),
        fmt_e12(eff.shifted_cavity[1])
    );
    println!(
        "  shifted magnon:  m0 {:>20}  m1 {:>20}",
        fmt_e12(eff.shifted_magnon[0]),
        fmt_e12(eff.shifted_magnon[1])
    );
    let g = eff.magnon_coupling();
    println!(
        "  magnon-magnon G_theta: {} + {} i  (|G| = {})",
        fmt_e12(g.re),
        fmt_e12(g.im),
        fmt_e12(g.norm())
    );
    let k01 = eff.photon_photon[0][1];
    println!(
        "  photon-photon kappa_01: {} + {} i",
        fmt_e12(k01.re),
        fmt_e12(k01.im)
    );
    match validity_margin(&params) {
        ValidityMargin::Finite(m) => {
            println!(
                "  validity margin max|lambda| = {} (trust <= 0.1)",
                fmt_e12(m)
            )
        }
        ValidityMargin::Singular { cavity, magnon } => {
            println!("  validity margin: singular at cavity {cavity} / magnon {magnon}")
        }
    }

    if let Some(path) = &args.output {
        let mut out = String::new();
        let _ = writeln!(out, "# cavmag dispersive {}", args.params.describe());
        out.push_str("quantity,k,kprime,re_ghz,im_ghz\n");
        for k in 0..2 {
            let _ = writeln!(
                out,
                "shifted_cavity,{k},,{},{}",
                fmt_e12(eff.shifted_cavity[k]),
                fmt_e12(0.0)
            );
        }
        for k in 0..2 {
            let _ = writeln!(
                out,
                "shifted_magnon,{k},,{},{}",
                fmt_e12(eff.shifted_magnon[k]),
                fmt_e12(0.0)
            );
        }
        for (name, block) in [
            ("photon_photon", &eff.photon_photon),
            ("magnon_magnon", &eff.magnon_magnon),
        ] {
            for k in 0..2 {
                for kp in 0..2 {
                    if k != kp {
                        let _ = writeln!(
                            out,
                            "{name},{k},{kp},{},{}",
                            fmt_e12(block[k][kp].re),
                            fmt_e12(block[k][kp].im)
                        );
                    }
                }
            }
        }
        for k in 0..2 {
            for kp in 0..2 {
                let _ = writeln!(
                    out,
                    "detuning,{k},{kp},{},{}",
                    fmt_e12(eff.detunings[k][kp]),
                    fmt_e12(0.0)
                );
                let _ = writeln!(
                    out,
                    "lambda,{k},{kp},{},{}",
                    fmt_e12(eff.small_parameters[k][kp].re),
                    fmt_e12(eff.small_parameters[k][kp].im)
                );
            }
        }
        emit(Some(path), &out)?;
    }
    Ok(())
}

fn run_gauge(args: &GaugeArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.config)
        .map_err(|e| usage(format!("cannot read {}: {e}", args.config.display())))?;
    let graph = match parse_graph(&text) {
        Ok(g) => g,
        Err(e @ cavmag::Error::ConfigParse { .. }) => return Err(usage(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let report = reduce_phases(&graph);

    println!("gauge report for {}", args.config.display());
    println!("  mode rotations (rad):");
    for (id, psi) in &report.mode_rotations {
        println!("    {id:<12} {}", fmt_e12(*psi));
    }
    println!("  canonical residual phases:");
    for c in report.canonical_graph.couplings() {
        println!(
            "    {:<6} -> {:<6} g = {:<20} phase = {}",
            c.from,
            c.to,
            fmt_e12(c.strength),
            fmt_e12(c.phase)
        );
    }
    if report.cycles.is_empty() {
        println!("  no cycles: every coupling phase is removable");
    } else {
        println!("  fundamental cycles:");
        for (i, lp) in report.cycles.iter().enumerate() {
            println!(
                "    [{}] {}  theta = {}",
                i,
                lp.cycle.join(" -> "),
                fmt_e12(lp.theta)
            );
        }
    }

    if let Some(path) = &args.csv {
        let mut out = String::new();
        let _ = writeln!(out, "# cavmag gauge config={}", args.config.display());
        out.push_str("cycle_index,mode_sequence,theta_rad\n");
        for (i, lp) in report.cycles.iter().enumerate() {
            let _ = writeln!(out, "{i},{},{}", lp.cycle.join("-"), fmt_e12(lp.theta));
        }
        emit(Some(path), &out)?;
    }
    Ok(())
}

fn run_s21map(args: &S21Args) -> Result<(), CliError> {
    let params = args.params.to_params();
    let sweep = SweepSpec::new(
        sweep_parameter(&args.param),
        args.sweep.start,
        args.sweep.stop,
        args.sweep.steps,
    )?;
    let grid = ProbeGrid::uniform(args.probe.start, args.probe.stop, args.probe.steps, sweep)?;
    let trace = transmission_map(&params, &grid)?;

    let mut out = String::with_capacity(trace.sweep_values.len() * trace.probe_ghz.len() * 96);
    let _ = writeln!(
        out,
        "# cavmag s21map param={} probe={}:{}:{} sweep={}:{}:{} {}",
        sweep.parameter.as_str(),
        args.probe.start,
        args.probe.stop,
        args.probe.steps,
        args.sweep.start,
        args.sweep.stop,
        args.sweep.steps,
        args.params.describe()
    );
    out.push_str("param_ghz,probe_ghz,re_s21,im_s21,abs_s21\n");
    for (i, &p) in trace.sweep_values.iter().enumerate() {
        for (j, &w) in trace.probe_ghz.iter().enumerate() {
            let s = trace.s21[i][j];
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                fmt_e12(p),
                fmt_e12(w),
                fmt_e12(s.re),
                fmt_e12(s.im),
                fmt_e12(s.norm())
            );
        }
    }
    emit(args.output.as_ref(), &out)
}

fn run_formfactor(args: &FormFactorArgs) -> Result<(), CliError> {
    let text = fs::read_to_string(&args.field)
        .map_err(|e| usage(format!("cannot read {}: {e}", args.field.display())))?;
    let field = match FieldMap::from_csv_str(&text) {
        Ok(f) => f,
        Err(e @ cavmag::Error::FieldCsv { .. }) => return Err(usage(e.to_string())),
        Err(e) => return Err(e.into()),
    };
    let region = SampleRegion::new(args.center.0, args.radius)?;
    let eta = form_factor(&field, &region)?;
    let phi = coupling_phase(&field, &region)?;
    let g = coupling_strength(eta, args.omega_c, &MaterialConstants::default())?;
    let z = z_component_check(&field, &region)?;
    println!("eta = {}", fmt_e12(eta));
    println!("phi_rad = {}", fmt_e12(phi));
    println!("g_ghz = {}", fmt_e12(g));
    println!("z_check = {}", fmt_e12(z));
    if z > 0.05 {
        eprintln!(
            "warning: axial field fraction {} exceeds 0.05; the transverse-coupling formulas assume no z dependence",
            fmt_e12(z)
        );
    }
    Ok(())
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Spectrum(args) => run_spectrum(args),
        Command::Gap(args) => run_gap(args),
        Command::Dispersive(args) => run_dispersive(args),
        Command::Gauge(args) => run_gauge(args),
        Command::S21map(args) => run_s21map(args),
        Command::Formfactor(args) => run_formfactor(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
        Err(CliError::Compute(e)) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
