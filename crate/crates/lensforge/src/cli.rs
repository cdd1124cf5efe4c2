//! Batch front-end: parse a JSON run configuration, execute one
//! subcommand, write CSV results (and optional SVG plots).
//!
//! Exit codes: 0 success, 1 validation error, 2 completed with a
//! warning (e.g. the fitted phase front is not well formed).

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{RunConfig, ValidatedRun};
use crate::error::{Error, Result};
use crate::lens::{
    lens_gain_with, theoretical_max_gain, trace_bundle_rows, GainMode, LensPlacement,
    PatternGridSpec, RayStatus,
};
use crate::phasecenter::{find_phase_center_of_grid, max_phase_error, sample_phase};
use crate::report::{fmt_sig6, write_csv, write_svg_line_chart};
use crate::sweep::{comparison_report, gain_vs_separation};

#[derive(Parser)]
#[command(
    name = "lensforge",
    version,
    about = "Dielectric lens antenna design toolkit"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonArgs {
    /// Path to a JSON run configuration.
    #[arg(long, conflicts_with = "default")]
    config: Option<PathBuf>,
    /// Use the built-in reference configuration.
    #[arg(long)]
    default: bool,
    /// Output directory (overrides output.directory).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Print and save the synthesized patch and lens dimensions.
    Design(CommonArgs),
    /// Scan the phase functional and locate the phase center.
    PhaseCenter(CommonArgs),
    /// Gain vs separation sweep plus the three-way comparison.
    Sweep(CommonArgs),
    /// Far-field pattern of the lens fed at the fitted phase center.
    Pattern(CommonArgs),
    /// Ray-trace dump through the lens at the fitted phase center.
    Trace(CommonArgs),
}

/// Parses std::env args, runs, and returns the process exit code.
pub fn run() -> i32 {
    let cli = Cli::parse();
    let (args, body): (&CommonArgs, fn(&ValidatedRun) -> Result<i32>) = match &cli.command {
        Command::Design(a) => (a, cmd_design),
        Command::PhaseCenter(a) => (a, cmd_phase_center),
        Command::Sweep(a) => (a, cmd_sweep),
        Command::Pattern(a) => (a, cmd_pattern),
        Command::Trace(a) => (a, cmd_trace),
    };
    match load(args).and_then(|v| body(&v)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}

fn load(args: &CommonArgs) -> Result<ValidatedRun> {
    let cfg = match (&args.config, args.default) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)?;
            RunConfig::from_json(&text)?
        }
        (None, true) => RunConfig::default(),
        (None, false) => return Err(Error::invalid("pass --config <path> or --default")),
    };
    let mut v = cfg.validate()?;
    if let Some(out) = &args.out {
        v.out_dir = out.clone();
    }
    Ok(v)
}

fn out_path(v: &ValidatedRun, name: &str) -> PathBuf {
    v.out_dir.join(name)
}

fn cmd_design(v: &ValidatedRun) -> Result<i32> {
    let g_max = theoretical_max_gain(&v.lens, &v.wave);
    let rows = vec![
        ("frequency_ghz", v.wave.frequency, "GHz"),
        ("wavelength_mm", v.wave.wavelength, "mm"),
        ("patch_width_mm", v.patch.width, "mm"),
        ("patch_length_mm", v.patch.length, "mm"),
        ("patch_eps_eff", v.patch.eps_eff, ""),
        ("patch_delta_l_mm", v.patch.delta_l, "mm"),
        ("lens_eps_r", v.lens.eps_r, ""),
        ("lens_n", v.lens.n, ""),
        ("lens_radius_mm", v.lens.radius_r, "mm"),
        ("lens_b_mm", v.lens.b, "mm"),
        ("lens_extension_mm", v.lens.extension_l, "mm"),
        ("theoretical_max_gain_dbi", g_max, "dBi"),
    ];
    println!(
        "patch {} x {} mm ({}), lens b = {} mm, L = {} mm, theoretical gain {} dBi",
        fmt_sig6(v.patch.width),
        fmt_sig6(v.patch.length),
        if v.patch_was_synthesized {
            "synthesized"
        } else {
            "explicit"
        },
        fmt_sig6(v.lens.b),
        fmt_sig6(v.lens.extension_l),
        fmt_sig6(g_max)
    );
    write_csv(
        &out_path(v, "design.csv"),
        "parameter,value,unit",
        &rows
            .into_iter()
            .map(|(n, x, u)| vec![n.to_string(), fmt_sig6(x), u.to_string()])
            .collect::<Vec<_>>(),
    )?;
    Ok(0)
}

fn cmd_phase_center(v: &ValidatedRun) -> Result<i32> {
    let grid = sample_phase(&v.antenna, &v.plane)?;
    let result = find_phase_center_of_grid(&grid, v.scan.0, v.scan.1, v.scan.2)?;
    let mut rows = Vec::with_capacity(result.s_curve.len());
    for &(d, s) in &result.s_curve {
        let err = max_phase_error(&grid, d)?;
        rows.push(vec![fmt_sig6(d), fmt_sig6(s), fmt_sig6(err)]);
    }
    write_csv(
        &out_path(v, "phase_function.csv"),
        "D_mm,S_rad2,max_phase_err_deg",
        &rows,
    )?;
    if v.emit_plots {
        write_svg_line_chart(
            &out_path(v, "phase_function.svg"),
            "Phase functional S vs candidate height D",
            "D (mm)",
            "S (rad^2)",
            &result.s_curve,
        )?;
    }
    println!(
        "phase center d_star = {} mm, max phase error {} deg, well formed: {}",
        fmt_sig6(result.d_star),
        fmt_sig6(result.max_phase_error_deg),
        result.well_formed
    );
    Ok(if result.well_formed { 0 } else { 2 })
}

fn cmd_sweep(v: &ValidatedRun) -> Result<i32> {
    let sweep = gain_vs_separation(
        &v.antenna,
        &v.lens,
        &v.wave,
        &v.plane,
        &v.sweep_d,
        v.sampled_mode,
        &v.ray_opts,
        v.scan,
    )?;
    let rows: Vec<Vec<String>> = sweep
        .rows
        .iter()
        .map(|r| {
            vec![
                fmt_sig6(r.d_mm),
                fmt_sig6(r.gain_dbi),
                fmt_sig6(r.spillover_eff),
                fmt_sig6(r.transmission_eff),
            ]
        })
        .collect();
    write_csv(
        &out_path(v, "gain_sweep.csv"),
        "D_mm,gain_dbi,spillover_eff,transmission_eff",
        &rows,
    )?;
    let cmp = comparison_report(
        &v.antenna,
        &v.lens,
        &v.wave,
        &v.plane,
        v.sampled_mode,
        &v.ray_opts,
        v.scan,
    )?;
    write_csv(
        &out_path(v, "comparison.csv"),
        "config,gain_dbi",
        &[
            vec!["no_lens".into(), fmt_sig6(cmp.no_lens_dbi)],
            vec!["lens_d0".into(), fmt_sig6(cmp.lens_at_zero_dbi)],
            vec!["lens_dstar".into(), fmt_sig6(cmp.lens_at_dstar_dbi)],
        ],
    )?;
    if v.emit_plots {
        write_svg_line_chart(
            &out_path(v, "gain_sweep.svg"),
            "Gain vs separation D",
            "D (mm)",
            "gain (dBi)",
            &sweep
                .rows
                .iter()
                .map(|r| (r.d_mm, r.gain_dbi))
                .collect::<Vec<_>>(),
        )?;
    }
    if v.emit_rays {
        let d_gap = sweep.d_star_phase_center.max(0.0);
        let placement = LensPlacement::new(v.lens, d_gap)?;
        let source =
            crate::emcore::Vec3::new(0.0, 0.0, sweep.d_star_phase_center.min(d_gap).max(0.0));
        write_rays_csv(v, &placement, source)?;
    }
    println!(
        "peak gain {} dBi at D = {} mm (phase center {} mm); improvement over D = 0: {} dB ({} % of peak dB)",
        fmt_sig6(sweep.gain_peak_dbi),
        fmt_sig6(sweep.d_peak),
        fmt_sig6(sweep.d_star_phase_center),
        fmt_sig6(sweep.improvement_db),
        fmt_sig6(sweep.improvement_pct_of_db)
    );
    Ok(0)
}

fn fitted_center(v: &ValidatedRun) -> Result<(f64, bool)> {
    let grid = sample_phase(&v.antenna, &v.plane)?;
    let result = find_phase_center_of_grid(&grid, v.scan.0, v.scan.1, v.scan.2)?;
    Ok((result.d_star, result.well_formed))
}

fn cmd_pattern(v: &ValidatedRun) -> Result<i32> {
    let (d_star, well_formed) = fitted_center(v)?;
    let d_gap = d_star.max(0.0);
    let placement = LensPlacement::new(v.lens, d_gap)?;
    let mode = if v.sampled_mode {
        GainMode::SampledField {
            phase_center: d_star,
        }
    } else {
        GainMode::PointSource {
            phase_center: d_star.min(d_gap),
        }
    };
    let ff = lens_gain_with(
        &v.antenna,
        &placement,
        &v.wave,
        mode,
        &v.ray_opts,
        Some(PatternGridSpec::default()),
    )?;
    let mut rows = Vec::with_capacity(ff.n_theta * ff.n_phi);
    for it in 0..ff.n_theta {
        for ip in 0..ff.n_phi {
            rows.push(vec![
                fmt_sig6((it as f64 * ff.theta_step).to_degrees()),
                fmt_sig6((ip as f64 * ff.phi_step).to_degrees()),
                fmt_sig6(ff.gain_dbi_at(it, ip)),
            ]);
        }
    }
    write_csv(
        &out_path(v, "pattern.csv"),
        "theta_deg,phi_deg,gain_dbi",
        &rows,
    )?;
    println!(
        "gain estimate {} dBi at D = {} mm (directivity {}, spillover {}, transmission {})",
        fmt_sig6(ff.gain_estimate_dbi),
        fmt_sig6(d_gap),
        fmt_sig6(ff.boresight_directivity_dbi),
        fmt_sig6(ff.spillover_efficiency),
        fmt_sig6(ff.transmission_efficiency)
    );
    Ok(if well_formed { 0 } else { 2 })
}

fn write_rays_csv(
    v: &ValidatedRun,
    placement: &LensPlacement,
    source: crate::emcore::Vec3,
) -> Result<(usize, usize)> {
    let rows_raw = trace_bundle_rows(placement, source, v.ray_opts.ray_count.min(20_000))?;
    let mut rows = Vec::with_capacity(rows_raw.len());
    let mut exited = 0usize;
    for (lr, ray) in &rows_raw {
        let status = match ray.status {
            RayStatus::Exited => "exited",
            RayStatus::SpilloverMissed => "spillover_missed",
            RayStatus::TotalInternalReflection => "total_internal_reflection",
            RayStatus::SideWall => "side_wall",
        };
        if ray.status == RayStatus::Exited {
            exited += 1;
        }
        let (ex, ey, edz) = match &ray.exit {
            Some(e) => (
                fmt_sig6(e.exit_point.x),
                fmt_sig6(e.exit_point.y),
                fmt_sig6(e.exit_direction.z),
            ),
            None => (String::new(), String::new(), String::new()),
        };
        rows.push(vec![
            fmt_sig6(lr.theta.to_degrees()),
            fmt_sig6(lr.phi.to_degrees()),
            status.to_string(),
            ex,
            ey,
            edz,
            fmt_sig6(ray.optical_path),
            fmt_sig6(ray.amplitude_factor),
        ]);
    }
    write_csv(
        &out_path(v, "rays.csv"),
        "launch_theta_deg,launch_phi_deg,status,exit_x_mm,exit_y_mm,exit_dirz,opt_path_mm,amp_factor",
        &rows,
    )?;
    Ok((rows.len(), exited))
}

fn cmd_trace(v: &ValidatedRun) -> Result<i32> {
    let (d_star, _) = fitted_center(v)?;
    let d_gap = d_star.max(0.0);
    let placement = LensPlacement::new(v.lens, d_gap)?;
    let source = crate::emcore::Vec3::new(0.0, 0.0, d_star.min(d_gap).max(0.0));
    let (n_rays, exited) = write_rays_csv(v, &placement, source)?;
    println!("traced {n_rays} rays, {exited} exited");
    Ok(0)
}
