//! 2-D phase unwrapping on a masked square lattice.
//!
//! Strategy: unwrap the center row outward in both directions from the
//! center sample, then unwrap each column outward from the center row.
//! That covers any mask whose columns are contiguous segments crossing
//! the center row (true for the solid-angle disk used by `phasecenter`).
//! Correctness requires true neighbor phase steps below pi (caller
//! contract; sampling must be dense enough).

/// Wraps `x` into (-pi, pi].
pub fn wrap_to_pi(x: f64) -> f64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut w = x % two_pi;
    if w <= -std::f64::consts::PI {
        w += two_pi;
    } else if w > std::f64::consts::PI {
        w -= two_pi;
    }
    w
}

/// Unwraps `phase` (row-major `n` x `n`, entries valid where `mask` is
/// true) in place, starting from `center` = (row, col). Masked-out
/// entries are left untouched. Output differs from input by integer
/// multiples of 2*pi per sample; the center sample is unchanged.
pub fn unwrap_phase_radial(n: usize, center: (usize, usize), mask: &[bool], phase: &mut [f64]) {
    assert_eq!(mask.len(), n * n);
    assert_eq!(phase.len(), n * n);
    let (cr, cc) = center;
    assert!(
        cr < n && cc < n && mask[cr * n + cc],
        "center must be a valid sample"
    );

    let idx = |r: usize, c: usize| r * n + c;

    // Center row, rightwards then leftwards.
    let mut prev = phase[idx(cr, cc)];
    for c in cc + 1..n {
        let i = idx(cr, c);
        if !mask[i] {
            break;
        }
        phase[i] = prev + wrap_to_pi(phase[i] - prev);
        prev = phase[i];
    }
    prev = phase[idx(cr, cc)];
    for c in (0..cc).rev() {
        let i = idx(cr, c);
        if !mask[i] {
            break;
        }
        phase[i] = prev + wrap_to_pi(phase[i] - prev);
        prev = phase[i];
    }

    // Each column, upward and downward from the center row.
    for c in 0..n {
        if !mask[idx(cr, c)] {
            continue;
        }
        let mut prev = phase[idx(cr, c)];
        for r in cr + 1..n {
            let i = idx(r, c);
            if !mask[i] {
                break;
            }
            phase[i] = prev + wrap_to_pi(phase[i] - prev);
            prev = phase[i];
        }
        prev = phase[idx(cr, c)];
        for r in (0..cr).rev() {
            let i = idx(r, c);
            if !mask[i] {
                break;
            }
            phase[i] = prev + wrap_to_pi(phase[i] - prev);
            prev = phase[i];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn full_mask(n: usize) -> Vec<bool> {
        vec![true; n * n]
    }

    #[test]
    fn constant_grid_unchanged() {
        let n = 5;
        let mask = full_mask(n);
        let mut phase = vec![1.234; n * n];
        unwrap_phase_radial(n, (2, 2), &mask, &mut phase);
        assert!(phase.iter().all(|&p| (p - 1.234).abs() < 1e-15));
    }

    #[test]
    fn ramp_recovered_exactly() {
        // 1-D ramp with true step 0.4*pi, stored wrapped.
        let n = 21;
        let mask = full_mask(n);
        let step = 0.4 * std::f64::consts::PI;
        let truth: Vec<f64> = (0..n * n)
            .map(|i| {
                let c = (i % n) as f64;
                c * step
            })
            .collect();
        let mut wrapped: Vec<f64> = truth.iter().map(|&p| wrap_to_pi(p)).collect();
        unwrap_phase_radial(n, (10, 10), &mask, &mut wrapped);
        // unwrapped equals truth up to the constant fixed by the center sample
        let offset = wrapped[10 * n + 10] - truth[10 * n + 10];
        for (u, t) in wrapped.iter().zip(truth.iter()) {
            assert!((u - t - offset).abs() < 1e-12);
        }
    }

    #[test]
    fn unwrapped_smooth_grid_is_identity() {
        let n = 15;
        let mask = full_mask(n);
        let smooth: Vec<f64> = (0..n * n)
            .map(|i| {
                let r = (i / n) as f64 - 7.0;
                let c = (i % n) as f64 - 7.0;
                0.1 * (r * r + c * c).sqrt()
            })
            .collect();
        let mut phase = smooth.clone();
        unwrap_phase_radial(n, (7, 7), &mask, &mut phase);
        for (a, b) in phase.iter().zip(smooth.iter()) {
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn spherical_phase_recovered_on_disk() {
        // Synthetic spherical phase -k*r(x,y) wrapped then unwrapped,
        // compared to the analytic value after matching the center sample.
        let n = 41;
        let k = 0.6329451966294078;
        let z = 99.26902582781457;
        let radius = z * (22.5f64.to_radians()).tan();
        let spacing = 2.0 * radius / (n - 1) as f64;
        let half = (n / 2) as isize;
        let mut mask = vec![false; n * n];
        let mut truth = vec![0.0; n * n];
        let mut wrapped = vec![0.0; n * n];
        for r in 0..n {
            for c in 0..n {
                let x = (c as isize - half) as f64 * spacing;
                let y = (r as isize - half) as f64 * spacing;
                if x.hypot(y) <= radius + 1e-9 {
                    let i = r * n + c;
                    mask[i] = true;
                    truth[i] = -k * (x * x + y * y + z * z).sqrt();
                    wrapped[i] = wrap_to_pi(truth[i]);
                }
            }
        }
        let ci = (half as usize) * n + half as usize;
        unwrap_phase_radial(n, (half as usize, half as usize), &mask, &mut wrapped);
        let offset = wrapped[ci] - truth[ci];
        for i in 0..n * n {
            if mask[i] {
                assert!(
                    (wrapped[i] - truth[i] - offset).abs() < 1e-9,
                    "mismatch at {i}: {} vs {}",
                    wrapped[i] - offset,
                    truth[i]
                );
            }
        }
    }
}
