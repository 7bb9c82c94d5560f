//! Scalar root finding shared by the branch solvers.

/// Bisection on a sign-changing bracket until the bracket is below `tol`.
pub fn bisect<F: Fn(f64) -> f64>(f: F, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    let mut f_lo = f(lo);
    for _ in 0..200 {
        if (hi - lo).abs() <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        let f_mid = f(mid);
        if f_mid == 0.0 {
            return mid;
        }
        if (f_mid > 0.0) == (f_lo > 0.0) {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// All sign changes of `f` on a uniform grid of `n` intervals in `[a, b]`,
/// refined by bisection to `tol` and polished with a few Newton steps.
///
/// An interval where `df` changes sign is split at the critical point
/// first, so a close pair of roots inside one grid cell is still found.
/// Newton updates are only kept when they reduce `|f|` and stay in the
/// bracket, so a poor derivative never makes a root worse.
pub fn scan_roots<F, D>(f: F, df: D, a: f64, b: f64, n: usize, tol: f64) -> Vec<f64>
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut roots = Vec::new();
    if !(b > a) || n == 0 {
        return roots;
    }
    let h = (b - a) / n as f64;
    let mut x0 = a;
    let mut f0 = f(a);
    let mut d0 = df(a);
    for i in 1..=n {
        let x1 = if i == n { b } else { a + h * i as f64 };
        let f1 = f(x1);
        let d1 = df(x1);
        if f0 == 0.0 {
            roots.push(x0);
        }
        let turns =
            d0.is_finite() && d1.is_finite() && d0 != 0.0 && d1 != 0.0 && (d0 > 0.0) != (d1 > 0.0);
        if turns {
            let c = bisect(&df, x0, x1, tol);
            let fc = f(c);
            if fc == 0.0 {
                roots.push(c);
            } else {
                bracket(&f, &df, x0, f0, c, fc, tol, &mut roots);
                bracket(&f, &df, c, fc, x1, f1, tol, &mut roots);
            }
        } else {
            bracket(&f, &df, x0, f0, x1, f1, tol, &mut roots);
        }
        x0 = x1;
        f0 = f1;
        d0 = d1;
    }
    if f0 == 0.0 {
        roots.push(x0);
    }
    roots
}

#[allow(clippy::too_many_arguments)]
fn bracket<F, D>(f: &F, df: &D, x0: f64, f0: f64, x1: f64, f1: f64, tol: f64, roots: &mut Vec<f64>)
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    if f0.is_finite() && f1.is_finite() && f0 != 0.0 && f1 != 0.0 && (f0 > 0.0) != (f1 > 0.0) {
        let r = bisect(f, x0, x1, tol);
        roots.push(newton_polish(f, df, r, x0, x1));
    }
}

pub fn newton_polish<F, D>(f: F, df: D, mut x: f64, lo: f64, hi: f64) -> f64
where
    F: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    let mut fx = f(x);
    for _ in 0..4 {
        let d = df(x);
        if d == 0.0 || !d.is_finite() {
            break;
        }
        let next = x - fx / d;
        if !(next >= lo && next <= hi) {
            break;
        }
        let f_next = f(next);
        if f_next.abs() < fx.abs() {
            x = next;
            fx = f_next;
        } else {
            break;
        }
    }
    x
}
