use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use heslot_core::acoustic::{solve_acoustic_mode, zero_point_normalize, SlotGrid};
use heslot_core::capillary::{
    fill_energy_delta, fill_transition_thickness, CapillaryModel, FillTransition, HELIUM_SURFACE_TENSION,
    HELIUM_VDW_COEFFICIENT,
};
use heslot_core::coupling::{brillouin_shift, uniform_field_oracle};
use heslot_core::field_io::{acoustic_dump, optical_dump};
use heslot_core::materials::{hz_to_rad, optical_omega, rad_to_hz};
use heslot_core::mesh::{build_mesh, BoundaryTag};
use heslot_core::metrics::{coherence_check, cooperativity, lasing_threshold, sideband_resolved, thermal_occupancy};
use heslot_core::optical::resonance_order;
use heslot_core::sweep::{emit_csv, emit_svg, load_config, run_sweep, solve_optical, solve_point, SweepConfig};
use heslot_core::{ConfigIssue, Error, Result};

#[derive(Parser, Debug)]
#[command(name = "heslot", version, about = "Superfluid-helium slot-ring Brillouin simulator")]
struct Cli {
    /// TOML configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Write sweep rows as CSV to this path.
    #[arg(long, global = true)]
    out_csv: Option<PathBuf>,
    /// Write the two-panel SVG plot to this path.
    #[arg(long, global = true)]
    out_svg: Option<PathBuf>,
    /// Concurrent sweep points (default: available cores).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, short, global = true)]
    verbose: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct Point {
    /// Slot width in nm (default: first configured width).
    #[arg(long)]
    width_nm: Option<f64>,
    #[arg(long, default_value = "sealed")]
    bc: BoundaryTag,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Solve the fundamental TE-like optical mode.
    OpticalMode {
        #[command(flatten)]
        point: Point,
        /// Dump the field to a text file.
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Solve the fundamental acoustic mode at a given azimuthal order.
    AcousticMode {
        #[command(flatten)]
        point: Point,
        /// Azimuthal order; by default twice the optical resonance order.
        #[arg(long)]
        order: Option<u64>,
        #[arg(long)]
        dump: Option<PathBuf>,
    },
    /// Full single-point chain up to the coupling rate and report rows.
    Couple {
        #[command(flatten)]
        point: Point,
    },
    /// Figures of merit from given rates.
    Metrics {
        #[arg(long, default_value_t = 250e3)]
        g0_hz: f64,
        #[arg(long, default_value_t = 1e9)]
        kappa_hz: f64,
        /// Acoustic frequency Omega/2pi.
        #[arg(long, default_value_t = 400e6)]
        omega_hz: f64,
        #[arg(long, default_value_t = 1e5)]
        q: f64,
        #[arg(long, default_value_t = 0.02)]
        temperature: f64,
        #[arg(long, default_value_t = 1550e-9)]
        wavelength: f64,
        /// Intracavity photon number for the coherence check.
        #[arg(long, default_value_t = 1.0)]
        photons: f64,
    },
    /// Capillary filling energy balance.
    Capillary {
        #[arg(long, default_value_t = 50.0)]
        width_nm: f64,
        #[arg(long, default_value_t = 220.0)]
        height_nm: f64,
        /// Film thickness at which to evaluate the energy change.
        #[arg(long, default_value_t = 2.0)]
        film_nm: f64,
        #[arg(long, default_value_t = HELIUM_SURFACE_TENSION)]
        surface_tension: f64,
        #[arg(long, default_value_t = HELIUM_VDW_COEFFICIENT)]
        vdw_coefficient: f64,
    },
    /// Sweep slot widths and boundary conditions.
    Sweep,
}

fn load(cli: &Cli) -> Result<SweepConfig> {
    let mut cfg = match &cli.config {
        Some(path) => load_config(path)?,
        None => SweepConfig::default(),
    };
    cfg.apply_env(|k| std::env::var(k).ok())?;
    if let Some(p) = &cli.out_csv {
        cfg.out_csv = Some(p.clone());
    }
    if let Some(p) = &cli.out_svg {
        cfg.out_svg = Some(p.clone());
    }
    if let Some(n) = cli.workers {
        if n == 0 {
            return Err(Error::Config(vec![ConfigIssue {
                path: "--workers".into(),
                message: "must be at least 1".into(),
            }]));
        }
        cfg.workers = Some(n);
    }
    Ok(cfg)
}

fn single_point(cfg: &SweepConfig, p: &Point) -> Result<SweepConfig> {
    let width = match p.width_nm {
        Some(nm) => nm * 1e-9,
        None => cfg.widths[0],
    };
    let mut one = cfg.clone();
    one.widths = vec![width];
    one.boundaries = vec![p.bc];
    one.geometry = cfg.geometry.with_slot_width(width).with_top(p.bc);
    one.geometry.validate()?;
    Ok(one)
}

fn write_outputs(cfg: &SweepConfig, rows: &[heslot_core::sweep::SweepRow]) -> Result<()> {
    if let Some(path) = &cfg.out_csv {
        emit_csv(rows, path)?;
        info!("wrote {}", path.display());
    }
    if let Some(path) = &cfg.out_svg {
        if emit_svg(rows, path)? {
            info!("wrote {}", path.display());
        }
    }
    Ok(())
}

fn dump_to(path: &Path, dump: &heslot_core::field_io::FieldDump) -> Result<()> {
    dump.save(path)?;
    info!("field written to {}", path.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<ExitCode> {
    let cfg = load(cli)?;
    if cli.verbose {
        eprintln!("# effective configuration\n{}", cfg.echo());
    }
    match &cli.command {
        Command::OpticalMode { point, dump } => {
            let one = single_point(&cfg, point)?;
            let (mesh, mode) = solve_optical(&one.geometry, &one.point_settings())?;
            let order = resonance_order(mode.n_eff, one.geometry.slot_center_radius(), mode.wavelength)?;
            println!("width_m = {:e}", one.geometry.slot_width);
            println!("mesh_cells = {}x{}", mesh.nx(), mesh.ny());
            println!("n_eff = {:.9}", mode.n_eff);
            println!("polarization = {}", mode.polarization.as_str());
            println!("eta_slot = {:.9}", mode.slot_fraction);
            println!("m_opt = {} ({:.4})", order.nearest, order.exact);
            println!("residual = {:e}", mode.residual);
            if let Some(path) = dump {
                dump_to(path, &optical_dump(&mode, &mesh))?;
            }
        }
        Command::AcousticMode { point, order, dump } => {
            let one = single_point(&cfg, point)?;
            let settings = one.point_settings();
            let mut spec = settings.mesh.clone();
            spec.wavelength = settings.wavelength;
            let m = match order {
                Some(m) => *m,
                None => {
                    let (_, mode) = solve_optical(&one.geometry, &settings)?;
                    2 * resonance_order(mode.n_eff, one.geometry.slot_center_radius(), settings.wavelength)?.nearest
                }
            };
            let mesh = build_mesh(&one.geometry, &spec)?;
            let grid = SlotGrid::from_mesh(&mesh, settings.acoustic_refine)?;
            let fill = &one.geometry.fill;
            let mut mode = solve_acoustic_mode(&one.geometry, fill, m, point.bc, &grid)?;
            println!("m = {m}");
            println!("k = {:e}", mode.wavenumber);
            println!("omega_Hz = {:.9e}", rad_to_hz(mode.omega));
            println!("propagating = {}", mode.propagating);
            if mode.propagating {
                let bulk = fill
                    .bulk_modulus()
                    .ok_or_else(|| Error::Domain("fill has no bulk modulus".into()))?;
                let p = zero_point_normalize(&mut mode, bulk)?;
                println!("p_zp_Pa = {p:.9e}");
            }
            if let Some(path) = dump {
                dump_to(path, &acoustic_dump(&mode))?;
            }
        }
        Command::Couple { point } => {
            let one = single_point(&cfg, point)?;
            let p = solve_point(&one.geometry, &one.point_settings())?;
            let bulk = one.geometry.fill.bulk_modulus().unwrap_or(f64::NAN);
            let p_zp = p.acoustic.zero_point_pressure.unwrap_or(0.0);
            let estimate = uniform_field_oracle(
                p.optical.slot_fraction,
                p_zp,
                bulk,
                p.optical.omega,
                one.geometry.fill.permittivity,
            )?;
            let shift = brillouin_shift(p.optical.n_eff, p.acoustic.sound_speed, p.optical.wavelength)?;
            println!("n_eff = {:.9}", p.optical.n_eff);
            println!("eta_slot = {:.9}", p.optical.slot_fraction);
            println!("m_opt = {}", p.phase.optical_order);
            println!("m_ac = {}", p.phase.acoustic_order);
            println!("brillouin_shift_Hz = {:.9e}", rad_to_hz(shift));
            println!("omega_ac_Hz = {:.9e}", rad_to_hz(p.acoustic.omega));
            println!("p_zp_Pa = {p_zp:.9e}");
            println!("g0_Hz = {:.9e}", rad_to_hz(p.coupling.g0));
            println!("g0_uniform_estimate_Hz = {:.9e}", rad_to_hz(estimate));
            if let Some(w) = &p.order_warning {
                warn!("{w}");
            }
            if one.out_csv.is_some() {
                let rows = run_sweep(&one)?;
                write_outputs(&one, &rows)?;
            }
        }
        Command::Metrics {
            g0_hz,
            kappa_hz,
            omega_hz,
            q,
            temperature,
            wavelength,
            photons,
        } => {
            let (g0, kappa, omega) = (hz_to_rad(*g0_hz), hz_to_rad(*kappa_hz), hz_to_rad(*omega_hz));
            let gamma = heslot_core::acoustic::acoustic_linewidth(omega, *q)?;
            let c0 = cooperativity(g0, kappa, gamma)?;
            let p_th = lasing_threshold(g0, kappa, 0.5 * kappa, gamma, optical_omega(*wavelength), 0.0)?;
            let n_m = thermal_occupancy(omega, *temperature)?;
            let coh = coherence_check(c0, *photons, n_m)?;
            println!("Gamma_Hz = {:.9e}", rad_to_hz(gamma));
            println!("C0 = {c0:.9e}");
            println!("P_th_W = {p_th:.9e}");
            println!("n_m = {n_m:.9e}");
            println!("sideband_resolved = {}", sideband_resolved(omega, kappa));
            println!("coherent = {} (margin {:.6e})", coh.satisfied, coh.margin);
        }
        Command::Capillary {
            width_nm,
            height_nm,
            film_nm,
            surface_tension,
            vdw_coefficient,
        } => {
            let model = CapillaryModel {
                vdw_coefficient: *vdw_coefficient,
                surface_tension: *surface_tension,
                slot_width: width_nm * 1e-9,
                slot_height: height_nm * 1e-9,
                film_thickness: film_nm * 1e-9,
            };
            println!("delta_E_J_per_m = {:.9e}", fill_energy_delta(&model)?);
            match fill_transition_thickness(&model)? {
                FillTransition::Root(d) => println!("d_crit_m = {d:.9e}"),
                FillTransition::AlwaysFilled => println!("d_crit_m = always-filled"),
                FillTransition::NeverFilled => println!("d_crit_m = never-filled"),
            }
        }
        Command::Sweep => {
            let rows = run_sweep(&cfg)?;
            write_outputs(&cfg, &rows)?;
            let failed = rows.iter().filter(|r| !r.is_ok()).count();
            eprintln!("{} rows, {} failed", rows.len(), failed);
            if cfg.out_csv.is_none() {
                print!("{}", heslot_core::sweep::output::csv_string(&rows));
            }
            if failed == rows.len() {
                return Ok(ExitCode::from(1));
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = if cli.verbose { "info" } else { "warn" };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level))
        .format_timestamp(None)
        .init();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
