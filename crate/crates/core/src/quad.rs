//! Adaptive quadrature over finite windows.
//!
//! Every density in this crate is a finite combination of Gaussians, so
//! integrals are taken over `[lo, hi]` windows wide enough that the truncated
//! tails are below 1e-12. Adaptive Simpson subdivision handles the rest.

/// Adaptive Simpson integration of `f` over `[lo, hi]` to absolute tolerance `tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, tol: f64) -> f64 {
    let mid = 0.5 * (lo + hi);
    let (fl, fm, fh) = (f(lo), f(mid), f(hi));
    let whole = simpson(lo, hi, fl, fm, fh);
    adaptive(f, lo, hi, fl, fm, fh, whole, tol, 50)
}

fn simpson(lo: f64, hi: f64, fl: f64, fm: f64, fh: f64) -> f64 {
    (hi - lo) / 6.0 * (fl + 4.0 * fm + fh)
}

#[allow(clippy::too_many_arguments)]
fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    lo: f64,
    hi: f64,
    fl: f64,
    fm: f64,
    fh: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let mid = 0.5 * (lo + hi);
    let lmid = 0.5 * (lo + mid);
    let rmid = 0.5 * (mid + hi);
    let (flm, frm) = (f(lmid), f(rmid));
    let left = simpson(lo, mid, fl, flm, fm);
    let right = simpson(mid, hi, fm, frm, fh);
    let err = left + right - whole;
    if depth == 0 || err.abs() <= 15.0 * tol {
        left + right + err / 15.0
    } else {
        adaptive(f, lo, mid, fl, flm, fm, left, 0.5 * tol, depth - 1)
            + adaptive(f, mid, hi, fm, frm, fh, right, 0.5 * tol, depth - 1)
    }
}

/// Nested adaptive integration over an axis-aligned box.
///
/// Cost grows exponentially with dimension; intended for the 1-3 dimensional
/// reading spaces that occur here.
pub fn integrate_nd<F: Fn(&[f64]) -> f64>(f: &F, windows: &[(f64, f64)], tol: f64) -> f64 {
    let mut point = vec![0.0; windows.len()];
    integrate_nd_rec(f, windows, tol, 0, &mut point)
}

fn integrate_nd_rec<F: Fn(&[f64]) -> f64>(
    f: &F,
    windows: &[(f64, f64)],
    tol: f64,
    dim: usize,
    point: &mut Vec<f64>,
) -> f64 {
    let (lo, hi) = windows[dim];
    if dim + 1 == windows.len() {
        let g = |x: f64| {
            let mut p = point.clone();
            p[dim] = x;
            f(&p)
        };
        integrate(&g, lo, hi, tol)
    } else {
        let g = |x: f64| {
            let mut p = point.clone();
            p[dim] = x;
            integrate_nd_rec(f, windows, tol / (hi - lo).max(1.0), dim + 1, &mut p)
        };
        integrate(&g, lo, hi, tol)
    }
}

/// Golden-section search for the maximum of a unimodal `f` on `[lo, hi]`.
pub fn argmax<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, xtol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let (mut a, mut b) = (lo, hi);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > xtol {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    0.5 * (a + b)
}

/// Coarse grid scan followed by golden-section refinement of the global
/// maximum of `f` on `[lo, hi]`.
pub fn argmax_scan<F: Fn(f64) -> f64>(f: &F, lo: f64, hi: f64, grid: usize, xtol: f64) -> f64 {
    let step = (hi - lo) / grid as f64;
    let mut best_i = 0;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=grid {
        let v = f(lo + step * i as f64);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let a = lo + step * best_i.saturating_sub(1) as f64;
    let b = (lo + step * (best_i + 1) as f64).min(hi);
    argmax(f, a, b, xtol)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomial_exactly() {
        let v = integrate(&|x| x * x, 0.0, 1.0, 1e-12);
        assert!((v - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn integrates_gaussian_to_one() {
        let sigma: f64 = 0.7;
        let g = move |x: f64| (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * std::f64::consts::PI).sqrt());
        let v = integrate(&g, -10.0, 10.0, 1e-12);
        assert!((v - 1.0).abs() < 1e-11, "got {v}");
    }

    #[test]
    fn integrates_2d_product() {
        let f = |p: &[f64]| p[0] * p[1] * p[1];
        let v = integrate_nd(&f, &[(0.0, 1.0), (0.0, 2.0)], 1e-12);
        assert!((v - 0.5 * 8.0 / 3.0).abs() < 1e-9, "got {v}");
    }

    #[test]
    fn argmax_finds_peak() {
        let f = |x: f64| -(x - 0.3).powi(2);
        let x = argmax(&f, -1.0, 1.0, 1e-10);
        assert!((x - 0.3).abs() < 1e-8);
        let f2 = |x: f64| (-(x - 2.0) * (x - 2.0)).exp() + 0.5 * (-(x + 1.0) * (x + 1.0)).exp();
        let x2 = argmax_scan(&f2, -5.0, 5.0, 200, 1e-10);
        assert!((x2 - 2.0).abs() < 1e-4, "got {x2}");
    }
}
