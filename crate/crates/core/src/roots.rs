//! Scalar root finders on a bracketing interval.

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

/// A bracketed root: `value` lies in `[lo, hi]` and the function changes sign
/// across the interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bracket {
    pub value: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Bracket {
    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }
}

fn check_bracket(flo: f64, fhi: f64) -> Result<()> {
    if !(flo.is_finite() && fhi.is_finite()) {
        return Err(Error::domain("non-finite function value at a bracket end"));
    }
    if flo * fhi > 0.0 {
        return Err(Error::invalid("interval does not bracket a sign change"));
    }
    Ok(())
}

/// Plain bisection until the bracket is narrower than `tol`.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<Bracket> {
    let mut flo = f(lo);
    let fhi = f(hi);
    check_bracket(flo, fhi)?;
    if flo == 0.0 {
        return Ok(Bracket { value: lo, lo, hi: lo });
    }
    if fhi == 0.0 {
        return Ok(Bracket { value: hi, lo: hi, hi });
    }
    for _ in 0..400 {
        if hi - lo <= tol {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(Bracket { value: mid, lo: mid, hi: mid });
        }
        if (fm < 0.0) == (flo < 0.0) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(Bracket {
        value: 0.5 * (lo + hi),
        lo,
        hi,
    })
}

/// [`bisect`] for a fallible function; the first error aborts the search.
pub fn try_bisect<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Bracket> {
    let mut err = None;
    let out = bisect(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol,
    );
    match err {
        Some(e) => Err(e),
        None => out,
    }
}

/// [`brent`] for a fallible function; the first error aborts the search.
pub fn try_brent<F: FnMut(f64) -> Result<f64>>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Bracket> {
    let mut err = None;
    let out = brent(
        |x| match f(x) {
            Ok(v) => v,
            Err(e) => {
                err.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        tol,
    );
    match err {
        Some(e) => Err(e),
        None => out,
    }
}

/// Brent's method (inverse quadratic interpolation with bisection fallback).
/// The returned bracket is the final sign-change interval.
pub fn brent<F: FnMut(f64) -> f64>(mut f: F, lo: f64, hi: f64, tol: f64) -> Result<Bracket> {
    let (mut a, mut b) = (lo, hi);
    let (mut fa, mut fb) = (f(a), f(b));
    check_bracket(fa, fb)?;
    if fa == 0.0 {
        return Ok(Bracket { value: a, lo: a, hi: a });
    }
    if fb == 0.0 {
        return Ok(Bracket { value: b, lo: b, hi: b });
    }
    let (mut c, mut fc) = (a, fa);
    let mut d = b - a;
    let mut e = d;
    for _ in 0..200 {
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
        let tol1 = 2.0 * f64::EPSILON * b.abs() + 0.5 * tol;
        let xm = 0.5 * (c - b);
        if xm.abs() <= tol1 || fb == 0.0 {
            let (l, h) = if b < c { (b, c) } else { (c, b) };
            return Ok(Bracket { value: b, lo: l, hi: h });
        }
        if e.abs() >= tol1 && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                let qq = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            }
            p = p.abs();
            let min1 = 3.0 * xm * q - (tol1 * q).abs();
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
        b += if d.abs() > tol1 { d } else { tol1.copysign(xm) };
        fb = f(b);
    }
    Err(Error::no_convergence("brent iteration limit", (c - b).abs()))
}

/// Secant iteration from two starting points; no bracket is maintained.
pub fn secant<F: FnMut(f64) -> f64>(mut f: F, x0: f64, x1: f64, tol: f64, max_iter: usize) -> Result<f64> {
    let (mut a, mut b) = (x0, x1);
    let (mut fa, mut fb) = (f(a), f(b));
    for _ in 0..max_iter {
        if fb == 0.0 {
            return Ok(b);
        }
        let denom = fb - fa;
        if denom == 0.0 {
            break;
        }
        let c = b - fb * (b - a) / denom;
        if !c.is_finite() {
            break;
        }
        a = b;
        fa = fb;
        b = c;
        fb = f(b);
        if (b - a).abs() <= tol * b.abs().max(1.0) {
            return Ok(b);
        }
    }
    Err(Error::no_convergence("secant iteration", (b - a).abs()))
}

/// Scan `f` on the ascending sample points and return every interval across
/// which the sign changes, together with the values at its ends.
pub fn sign_changes(xs: &[f64], ys: &[f64]) -> alloc::vec::Vec<(usize, f64, f64)> {
    let mut out = alloc::vec::Vec::new();
    for i in 1..xs.len() {
        if (ys[i - 1] < 0.0) != (ys[i] < 0.0) {
            out.push((i - 1, xs[i - 1], xs[i]));
        }
    }
    out
}
