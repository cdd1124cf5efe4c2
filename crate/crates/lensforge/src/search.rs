//! 1-D golden-section search used by the phase-center fit and the
//! separation optimizer.

const INV_GOLDEN: f64 = 0.618_033_988_749_894_9; // (sqrt(5)-1)/2

/// Minimizes `f` on [lo, hi] to within `xtol`; returns (x, f(x)).
/// The interval shrinks by the golden ratio each iteration, so the
/// result never exceeds the smaller of the two interior probes.
pub fn golden_section_min<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> (f64, f64) {
    assert!(lo <= hi, "golden_section_min requires lo <= hi");
    let (mut a, mut b) = (lo, hi);
    let mut x1 = b - INV_GOLDEN * (b - a);
    let mut x2 = a + INV_GOLDEN * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > xtol {
        if f1 <= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_GOLDEN * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_GOLDEN * (b - a);
            f2 = f(x2);
        }
    }
    if f1 <= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Maximizes `f` on [lo, hi] to within `xtol`; returns (x, f(x)).
pub fn golden_section_max<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    xtol: f64,
) -> (f64, f64) {
    let (x, neg) = golden_section_min(|x| -f(x), lo, hi, xtol);
    (x, -neg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn finds_parabola_minimum() {
        let (x, fx) = golden_section_min(|x| (x - 0.37).powi(2) + 2.0, -1.0, 1.0, 1e-9);
        // localization floor is sqrt(eps)*scale for a quadratic
        assert!((x - 0.37).abs() < 1e-6);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn finds_maximum() {
        let (x, fx) = golden_section_max(|x| -(x - 1.5).powi(2) + 4.0, 0.0, 3.0, 1e-9);
        assert!((x - 1.5).abs() < 1e-6);
        assert!((fx - 4.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_minimum_converges_to_edge() {
        let (x, _) = golden_section_min(|x| x, 2.0, 5.0, 1e-9);
        assert!((x - 2.0).abs() < 1e-6);
    }
}
