use crate::error::{GmeError, Result};

pub const DEFAULT_ROOT_MAX_ITER: usize = 200;

/// A sign-change interval for a scalar function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootBracket {
    pub lo: f64,
    pub hi: f64,
    pub f_lo: f64,
    pub f_hi: f64,
}

impl RootBracket {
    pub fn new(lo: f64, hi: f64, f_lo: f64, f_hi: f64) -> Result<Self> {
        if lo.partial_cmp(&hi) != Some(std::cmp::Ordering::Less)
            || !f_lo.is_finite()
            || !f_hi.is_finite()
            || f_lo * f_hi > 0.0
        {
            return Err(GmeError::InvalidBracket { lo, hi, f_lo, f_hi });
        }
        Ok(Self { lo, hi, f_lo, f_hi })
    }

    /// Evaluates `f` at both ends and checks for a sign change.
    pub fn evaluate(f: impl Fn(f64) -> f64, lo: f64, hi: f64) -> Result<Self> {
        Self::new(lo, hi, f(lo), f(hi))
    }
}

/// Brent's method with the default iteration cap.
pub fn find_root(f: impl Fn(f64) -> f64, bracket: RootBracket, tol: f64) -> Result<f64> {
    find_root_with(f, bracket, tol, DEFAULT_ROOT_MAX_ITER)
}

/// Brent's method (inverse quadratic interpolation and secant steps with a
/// bisection fallback). Returns once the bracket has shrunk to `tol` or an
/// exact zero is hit; the result always lies in `[bracket.lo, bracket.hi]`.
pub fn find_root_with(
    f: impl Fn(f64) -> f64,
    bracket: RootBracket,
    tol: f64,
    max_iter: usize,
) -> Result<f64> {
    let RootBracket { lo, hi, f_lo, f_hi } =
        RootBracket::new(bracket.lo, bracket.hi, bracket.f_lo, bracket.f_hi)?;
    if f_lo == 0.0 {
        return Ok(lo);
    }
    if f_hi == 0.0 {
        return Ok(hi);
    }

    let (mut a, mut b, mut fa, mut fb) = (lo, hi, f_lo, f_hi);
    let (mut c, mut fc) = (b, fb);
    let (mut d, mut e) = (0.0f64, 0.0f64);

    for _ in 0..max_iter {
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
            return Ok(b.clamp(lo, hi));
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
        if !fb.is_finite() {
            return Err(GmeError::RootNotConverged {
                best: a,
                iterations: max_iter,
            });
        }
    }
    Err(GmeError::RootNotConverged {
        best: b.clamp(lo, hi),
        iterations: max_iter,
    })
}
