//! Bracketed scalar root refinement (Brent's method).

/// Outcome of a bracketed refinement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Root {
    pub x: f64,
    pub fx: f64,
    pub iterations: usize,
}

/// Brent's method on `[lo, hi]` given the end-point values.
///
/// Inverse quadratic interpolation and secant steps are accepted only while
/// they stay inside the current bracket; otherwise the step falls back to
/// bisection. Stops when `|f| <= ftol` or the bracket half-width drops below
/// `2·EPS·|x| + xtol_abs`.
pub fn brent<F>(mut f: F, lo: f64, hi: f64, f_lo: f64, f_hi: f64, ftol: f64, xtol_abs: f64) -> Root
where
    F: FnMut(f64) -> f64,
{
    const MAX_ITER: usize = 300;
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f_lo, f_hi);
    if fa == 0.0 {
        return Root { x: a, fx: 0.0, iterations: 0 };
    }
    if fb == 0.0 {
        return Root { x: b, fx: 0.0, iterations: 0 };
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for iter in 1..=MAX_ITER {
        if (fb > 0.0) == (fc > 0.0) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * xtol_abs;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol || fb.abs() <= ftol {
            return Root { x: b, fx: fb, iterations: iter };
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol * q).abs();
            let min2 = (e * q).abs();
            if 2.0 * p < min1.min(min2) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(xm) };
        fb = f(b);
        if fb == 0.0 {
            return Root { x: b, fx: 0.0, iterations: iter };
        }
    }
    Root { x: b, fx: fb, iterations: MAX_ITER }
}
