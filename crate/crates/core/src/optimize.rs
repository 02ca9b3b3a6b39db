//! One-dimensional search helpers: grid-seeded golden-section maximization
//! and sign-change bisection.

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Maximizes `f` on `[lo, hi]`.
///
/// A uniform grid of `grid_points` samples (endpoints included) picks the
/// best bracket, then golden-section search refines it until the bracket is
/// narrower than `tol`. Infeasible points should return `f64::NEG_INFINITY`.
/// The returned point is never worse than the best grid sample.
pub fn maximize<F>(mut f: F, lo: f64, hi: f64, grid_points: usize, tol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let n = grid_points.max(3);
    let step = (hi - lo) / (n - 1) as f64;
    let mut best_i = 0;
    let mut best_f = f64::NEG_INFINITY;
    for i in 0..n {
        let x = if i == n - 1 { hi } else { lo + step * i as f64 };
        let fx = f(x);
        if fx > best_f {
            best_f = fx;
            best_i = i;
        }
    }
    let best_x = if best_i == n - 1 { hi } else { lo + step * best_i as f64 };
    if !best_f.is_finite() {
        return (best_x, best_f);
    }

    let mut a = (best_x - step).max(lo);
    let mut b = (best_x + step).min(hi);
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while b - a > tol {
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let (x, fx) = if f1 >= f2 { (x1, f1) } else { (x2, f2) };
    if fx > best_f {
        (x, fx)
    } else {
        (best_x, best_f)
    }
}

/// Locates a sign change of `f` in `[lo, hi]` by bisection. Returns `None`
/// when `f(lo)` and `f(hi)` have the same sign.
pub fn bisect<F>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let mut f_lo = f(lo);
    let f_hi = f(hi);
    if f_lo == 0.0 {
        return Some(lo);
    }
    if f_hi == 0.0 {
        return Some(hi);
    }
    if (f_lo > 0.0) == (f_hi > 0.0) {
        return None;
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = fm;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}
