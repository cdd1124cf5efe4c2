//! Gain-vs-separation experiment: sweep the air gap D, find the
//! optimal separation, and compare no-lens / lens-at-contact /
//! lens-at-phase-center configurations.

use rayon::prelude::*;

use crate::emcore::WaveSpec;
use crate::error::{Error, Result};
use crate::lens::{lens_gain_with, GainMode, LensPlacement, LensSpec, RayBundleOptions};
use crate::phasecenter::{find_phase_center, MeasurementPlane, PhaseCenterResult};
use crate::radiators::{far_field_directivity, ArrayAntenna};
use crate::search::golden_section_max;

/// One sweep row.
#[derive(Debug, Clone, Copy)]
pub struct SweepRow {
    pub d_mm: f64,
    pub gain_dbi: f64,
    pub spillover_eff: f64,
    pub transmission_eff: f64,
}

/// Result of a separation sweep.
#[derive(Debug, Clone)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
    /// Separation of the best row, mm.
    pub d_peak: f64,
    pub gain_peak_dbi: f64,
    /// Gain at the first sweep point (D = 0 for the default grid).
    pub gain_at_zero_dbi: f64,
    /// Antenna directivity without the lens, dBi.
    pub no_lens_gain_dbi: f64,
    /// Fitted phase-center height, mm.
    pub d_star_phase_center: f64,
    /// gain_peak - gain_at_zero, dB.
    pub improvement_db: f64,
    /// 100 * improvement_db / gain_peak_dbi.
    pub improvement_pct_of_db: f64,
}

fn finish_sweep(rows: Vec<SweepRow>, no_lens_gain_dbi: f64, d_star: f64) -> Result<SweepResult> {
    let best = rows
        .iter()
        .cloned()
        .max_by(|a, b| a.gain_dbi.total_cmp(&b.gain_dbi))
        .ok_or_else(|| Error::invalid("empty sweep"))?;
    let first = rows[0];
    let improvement_db = best.gain_dbi - first.gain_dbi;
    Ok(SweepResult {
        d_peak: best.d_mm,
        gain_peak_dbi: best.gain_dbi,
        gain_at_zero_dbi: first.gain_dbi,
        no_lens_gain_dbi,
        d_star_phase_center: d_star,
        improvement_db,
        improvement_pct_of_db: 100.0 * improvement_db / best.gain_dbi,
        rows,
    })
}

/// Computes the phase center once, then evaluates the lens gain at each
/// separation in `d_values` (sorted ascending, all >= 0).
#[allow(clippy::too_many_arguments)]
pub fn gain_vs_separation(
    antenna: &ArrayAntenna,
    lens: &LensSpec,
    wave: &WaveSpec,
    plane: &MeasurementPlane,
    d_values: &[f64],
    sampled_mode: bool,
    opts: &RayBundleOptions,
    scan: (f64, f64, f64),
) -> Result<SweepResult> {
    if d_values.is_empty() {
        return Err(Error::invalid("d_values must be non-empty"));
    }
    if d_values.windows(2).any(|w| w[0] >= w[1]) || d_values[0] < 0.0 {
        return Err(Error::invalid("d_values must be sorted ascending and >= 0"));
    }
    let pc = find_phase_center(antenna, plane, scan.0, scan.1, scan.2)?;
    let rows = sweep_rows(antenna, lens, wave, &pc, d_values, sampled_mode, opts)?;
    let (_, no_lens) = far_field_directivity(antenna, 1.0f64.to_radians())?;
    finish_sweep(rows, no_lens, pc.d_star)
}

fn gain_mode(pc: &PhaseCenterResult, sampled: bool, d_gap: f64) -> GainMode {
    if sampled {
        GainMode::SampledField {
            phase_center: pc.d_star,
        }
    } else {
        // the point model needs the source at or below the face
        GainMode::PointSource {
            phase_center: pc.d_star.min(d_gap),
        }
    }
}

fn sweep_rows(
    antenna: &ArrayAntenna,
    lens: &LensSpec,
    wave: &WaveSpec,
    pc: &PhaseCenterResult,
    d_values: &[f64],
    sampled_mode: bool,
    opts: &RayBundleOptions,
) -> Result<Vec<SweepRow>> {
    d_values
        .par_iter()
        .map(|&d| {
            let placement = LensPlacement::new(*lens, d)?;
            let ff = lens_gain_with(
                antenna,
                &placement,
                wave,
                gain_mode(pc, sampled_mode, d),
                opts,
                None,
            )?;
            Ok(SweepRow {
                d_mm: d,
                gain_dbi: ff.gain_estimate_dbi,
                spillover_eff: ff.spillover_efficiency,
                transmission_eff: ff.transmission_efficiency,
            })
        })
        .collect()
}

/// Coarse scan plus golden-section refinement of the gain maximum over
/// [d_lo, d_hi]; returns (d_opt, gain_opt).
#[allow(clippy::too_many_arguments)]
pub fn optimize_separation(
    antenna: &ArrayAntenna,
    lens: &LensSpec,
    wave: &WaveSpec,
    plane: &MeasurementPlane,
    d_lo: f64,
    d_hi: f64,
    coarse_step: f64,
    sampled_mode: bool,
    opts: &RayBundleOptions,
    scan: (f64, f64, f64),
) -> Result<(f64, f64)> {
    if d_lo >= d_hi || coarse_step <= 0.0 {
        return Err(Error::invalid("require d_lo < d_hi and coarse_step > 0"));
    }
    let pc = find_phase_center(antenna, plane, scan.0, scan.1, scan.2)?;
    let n = ((d_hi - d_lo) / coarse_step).floor() as usize + 1;
    let ds: Vec<f64> = (0..n).map(|i| d_lo + i as f64 * coarse_step).collect();
    let gains: Vec<(f64, f64)> = ds
        .par_iter()
        .map(|&d| {
            let placement = LensPlacement::new(*lens, d)?;
            let ff = lens_gain_with(
                antenna,
                &placement,
                wave,
                gain_mode(&pc, sampled_mode, d),
                opts,
                None,
            )?;
            Ok((d, ff.gain_estimate_dbi))
        })
        .collect::<Result<_>>()?;
    let (i_best, &(d_best, g_best)) = gains
        .iter()
        .enumerate()
        .max_by(|a, b| a.1 .1.total_cmp(&b.1 .1))
        .expect("non-empty scan");
    let lo = if i_best == 0 {
        d_best
    } else {
        gains[i_best - 1].0
    };
    let hi = if i_best + 1 == gains.len() {
        d_best
    } else {
        gains[i_best + 1].0
    };
    if hi <= lo {
        return Ok((d_best, g_best));
    }
    let eval = |d: f64| -> f64 {
        LensPlacement::new(*lens, d)
            .and_then(|p| {
                lens_gain_with(
                    antenna,
                    &p,
                    wave,
                    gain_mode(&pc, sampled_mode, d),
                    opts,
                    None,
                )
            })
            .map(|ff| ff.gain_estimate_dbi)
            .unwrap_or(f64::NEG_INFINITY)
    };
    let (d_ref, g_ref) = golden_section_max(eval, lo, hi, 0.05);
    if g_ref >= g_best {
        Ok((d_ref, g_ref))
    } else {
        Ok((d_best, g_best))
    }
}

/// Three-configuration comparison: bare antenna, lens at contact, lens
/// at the fitted phase center (clamped to contact when the center sits
/// below the antenna surface).
#[derive(Debug, Clone)]
pub struct ComparisonReport {
    pub no_lens_dbi: f64,
    pub lens_at_zero_dbi: f64,
    pub lens_at_dstar_dbi: f64,
    pub d_star: f64,
    pub improvement_db: f64,
    pub improvement_pct_of_db: f64,
}

pub fn comparison_report(
    antenna: &ArrayAntenna,
    lens: &LensSpec,
    wave: &WaveSpec,
    plane: &MeasurementPlane,
    sampled_mode: bool,
    opts: &RayBundleOptions,
    scan: (f64, f64, f64),
) -> Result<ComparisonReport> {
    let pc = find_phase_center(antenna, plane, scan.0, scan.1, scan.2)?;
    let (_, no_lens) = far_field_directivity(antenna, 1.0f64.to_radians())?;
    let d_star_gap = pc.d_star.max(0.0);
    let mut gains = [0.0f64; 2];
    for (g, d) in gains.iter_mut().zip([0.0, d_star_gap]) {
        let placement = LensPlacement::new(*lens, d)?;
        let ff = lens_gain_with(
            antenna,
            &placement,
            wave,
            gain_mode(&pc, sampled_mode, d),
            opts,
            None,
        )?;
        *g = ff.gain_estimate_dbi;
    }
    let improvement_db = gains[1] - gains[0];
    Ok(ComparisonReport {
        no_lens_dbi: no_lens,
        lens_at_zero_dbi: gains[0],
        lens_at_dstar_dbi: gains[1],
        d_star: pc.d_star,
        improvement_db,
        improvement_pct_of_db: 100.0 * improvement_db / gains[1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degenerate_single_value_sweep() {
        let rows = vec![SweepRow {
            d_mm: 5.0,
            gain_dbi: 17.0,
            spillover_eff: 0.9,
            transmission_eff: 0.85,
        }];
        let r = finish_sweep(rows, 12.0, 4.4).unwrap();
        assert_eq!(r.d_peak, 5.0);
        assert_eq!(r.improvement_db, 0.0);
        assert_eq!(r.gain_at_zero_dbi, r.gain_peak_dbi);
    }

    #[test]
    fn improvement_percentage_matches_reported_numbers() {
        // arithmetic on the reference values: 100*(19.4-14.7)/19.4 = 24.2%
        let rows = vec![
            SweepRow {
                d_mm: 0.0,
                gain_dbi: 14.7,
                spillover_eff: 1.0,
                transmission_eff: 1.0,
            },
            SweepRow {
                d_mm: 4.4,
                gain_dbi: 19.4,
                spillover_eff: 1.0,
                transmission_eff: 1.0,
            },
        ];
        let r = finish_sweep(rows, 12.62, 4.4).unwrap();
        assert!((r.improvement_db - 4.7).abs() < 1e-12);
        assert!((r.improvement_pct_of_db - 24.226_804_123_711_34).abs() < 1e-9);
    }
}
