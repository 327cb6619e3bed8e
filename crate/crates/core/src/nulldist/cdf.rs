use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::mgf::ln_abs_mgf;
use super::spectral::{eigenvalue_unchecked, null_moments};
use crate::error::{Error, Result};
use crate::gofstats::Family;
use crate::numeric::integrate;
use crate::numeric::special::ln_sin;
use crate::polybasis::check_order;

/// A truncated series or sum of integrals with a bound on what was dropped.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SeriesValue {
    pub value: f64,
    pub error_bound: f64,
}

const MAX_INTERVALS: usize = 200;
const TAIL_TOL: f64 = 1e-13;

#[derive(Clone, Copy, PartialEq)]
enum Kernel {
    Tail,
    Density,
}

/// Alternating sum over the gaps between consecutive poles of the MGF:
/// `P(L > x) = (1/pi) sum_k (-1)^{k-1} int e^{-xs} |E e^{sL}| / s ds` over
/// `(lambda_{2k-1}/2, lambda_{2k}/2)`. Each gap is split at its midpoint and
/// mapped with `s = end +- u^2` to remove the inverse square-root ends.
fn slepian(family: Family, m: usize, x: f64, kernel: Kernel) -> Result<SeriesValue> {
    let mut total = 0.0;
    let mut last = f64::INFINITY;
    let mut quad_error = 0.0;
    for k in 1..=MAX_INTERVALS {
        let lo = eigenvalue_unchecked(family, m, 2 * k - 1) / 2.0;
        let hi = eigenvalue_unchecked(family, m, 2 * k) / 2.0;
        let half = (hi - lo) / 2.0;
        let mut failure = None;
        let mut integrand = |s: f64| -> f64 {
            match ln_abs_mgf(family, m, s) {
                Ok(l) => {
                    let v = (l - x * s).exp();
                    if kernel == Kernel::Tail {
                        v / s
                    } else {
                        v
                    }
                }
                Err(e) => {
                    failure.get_or_insert(e);
                    0.0
                }
            }
        };
        // Scale the tolerance by the size of the leading exponential so far
        // intervals do not demand absolute accuracy below the noise floor.
        let scale = (-x * lo).exp().max(1e-300);
        let abs_tol = TAIL_TOL * scale * 1e-2;
        // Near an endpoint |E| grows like d^{-1/2}, so h(u) = 2u f(end + u^2)
        // is smooth in d = u^2. The mgf loses digits like eps * s / d there,
        // so inside `floor` h is extrapolated linearly from [floor, 2 floor].
        let mut side = |end: f64, dir: f64, u: f64| -> f64 {
            let d = u * u;
            let floor = (1e-5 * end.abs()).min(1e-2 * half);
            let h = |integrand: &mut dyn FnMut(f64) -> f64, d: f64| integrand(end + dir * d) * 2.0 * d.sqrt();
            if d < floor {
                let h1 = h(&mut integrand, floor);
                let h2 = h(&mut integrand, 2.0 * floor);
                h1 + (h2 - h1) * (d - floor) / floor
            } else {
                h(&mut integrand, d)
            }
        };
        let left = integrate(|u| side(lo, 1.0, u), 0.0, half.sqrt(), abs_tol, 1e-12);
        let right = integrate(|u| side(hi, -1.0, u), 0.0, half.sqrt(), abs_tol, 1e-12);
        if let Some(e) = failure {
            return Err(e);
        }
        if !(left.converged && right.converged) {
            return Err(Error::NonConvergence(format!("tail integral over gap {k}")));
        }
        let piece = (left.value + right.value) / PI;
        quad_error += (left.abs_error + right.abs_error) / PI;
        total += if k % 2 == 1 { piece } else { -piece };
        last = piece.abs();
        if last < TAIL_TOL / 10.0 {
            return Ok(SeriesValue { value: total, error_bound: last + quad_error });
        }
    }
    Err(Error::NonConvergence(format!(
        "tail series at x = {x} still contributes {last:e} after {MAX_INTERVALS} gaps"
    )))
}

/// Residue coefficients of the circular family: the tail is
/// `sum_p Re(A_p) exp(-r_p x)` with `r_p = (2 p pi)^{2m} / 2`.
fn watson_terms(family: Family, m: usize) -> impl Iterator<Item = (f64, f64)> {
    let start = if family.is_truncated() { m } else { 1 };
    (start..).map(move |p| {
        let pf = p as f64;
        let mut ln_a = Complex64::new((2.0 * m as f64).ln() + (m as f64 - 1.0) * (pf * PI).ln(), (m as f64 - 1.0) * PI / 2.0);
        if p % 2 == 0 {
            ln_a += Complex64::new(0.0, PI);
        }
        for j in 1..m {
            let w = Complex64::from_polar(1.0, j as f64 * PI / m as f64);
            ln_a -= ln_sin(pf * PI * w);
        }
        let mut a = ln_a.exp().re;
        if family.is_truncated() {
            for q in 1..m {
                a *= 1.0 - (pf / q as f64).powi(2 * m as i32);
            }
        }
        (a, 0.5 * (2.0 * pf * PI).powi(2 * m as i32))
    })
}

const MAX_SERIES_TERMS: usize = 1_000_000;

fn watson_series(family: Family, m: usize, x: f64, kernel: Kernel) -> Result<SeriesValue> {
    let mut total = 0.0;
    let mut terms = watson_terms(family, m).peekable();
    for _ in 0..MAX_SERIES_TERMS {
        let (a, r) = terms.next().expect("infinite iterator");
        let weight = if kernel == Kernel::Density { a * r } else { a };
        let term = weight * (-r * x).exp();
        total += term;
        let &(a_next, r_next) = terms.peek().expect("infinite iterator");
        // Past the peak the exponentials shrink by at least half per term,
        // so twice the next term bounds the rest.
        let w_next = if kernel == Kernel::Density { a_next * r_next } else { a_next };
        let next = (w_next * (-r_next * x).exp()).abs();
        if (r_next - r) * x > 2f64.ln() && next < 1e-18 * total.abs().max(1e-300) {
            return Ok(SeriesValue { value: total, error_bound: 2.0 * next });
        }
        if next == 0.0 && r_next * x > 1.0 {
            return Ok(SeriesValue { value: total, error_bound: 0.0 });
        }
    }
    Err(Error::NonConvergence(format!("residue series at x = {x}")))
}

/// Upper tail `P(L > x)` of the limit law.
pub fn null_tail(family: Family, m: usize, x: f64) -> Result<SeriesValue> {
    check_order(m)?;
    if x.is_nan() {
        return Err(Error::InvalidArgument("x is NaN".into()));
    }
    if x <= 0.0 {
        return Ok(SeriesValue { value: 1.0, error_bound: 0.0 });
    }
    if x.is_infinite() {
        return Ok(SeriesValue { value: 0.0, error_bound: 0.0 });
    }
    if family.is_circular() {
        watson_series(family, m, x, Kernel::Tail)
    } else {
        slepian(family, m, x, Kernel::Tail)
    }
}

/// `P(L <= x)`, clamped to [0, 1].
pub fn null_cdf(family: Family, m: usize, x: f64) -> Result<f64> {
    Ok((1.0 - null_tail(family, m, x)?.value).clamp(0.0, 1.0))
}

/// Density of the limit law.
pub fn null_pdf(family: Family, m: usize, x: f64) -> Result<SeriesValue> {
    check_order(m)?;
    if x.is_nan() {
        return Err(Error::InvalidArgument("x is NaN".into()));
    }
    if x <= 0.0 || x.is_infinite() {
        return Ok(SeriesValue { value: 0.0, error_bound: 0.0 });
    }
    let v = if family.is_circular() {
        watson_series(family, m, x, Kernel::Density)?
    } else {
        slepian(family, m, x, Kernel::Density)?
    };
    Ok(SeriesValue { value: v.value.max(0.0), ..v })
}

/// Residue series for the circular family's distribution function.
pub fn watson_cdf(m: usize, truncated: bool, x: f64) -> Result<SeriesValue> {
    let family = Family::Gw.with_truncation(truncated)?;
    let t = null_tail(family, m, x)?;
    Ok(SeriesValue { value: 1.0 - t.value, error_bound: t.error_bound })
}

pub fn watson_density(m: usize, truncated: bool, x: f64) -> Result<SeriesValue> {
    null_pdf(Family::Gw.with_truncation(truncated)?, m, x)
}

/// Observed significance `P(L >= statistic)`.
pub fn p_value(family: Family, m: usize, statistic: f64) -> Result<f64> {
    check_order(m)?;
    if statistic <= 0.0 {
        return Ok(1.0);
    }
    match null_tail(family, m, statistic) {
        Ok(t) => Ok(t.value.clamp(0.0, 1.0)),
        Err(Error::NonConvergence(msg)) => {
            // Only far below the mean can the series run out of terms; the
            // lower tail there is negligible.
            let (mean, _) = null_moments(family, m)?;
            if statistic < 0.01 * mean {
                Ok(1.0)
            } else {
                Err(Error::NonConvergence(msg))
            }
        }
        Err(e) => Err(e),
    }
}

/// Smallest level whose critical value is resolved: below it the tail is
/// dominated by the absolute error of its evaluation.
pub const MIN_ALPHA: f64 = 1e-12;

/// Upper `alpha` point: `q` with `P(L > q) = alpha` to within 1e-8.
pub fn critical_value(family: Family, m: usize, alpha: f64) -> Result<f64> {
    check_order(m)?;
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!("alpha must lie in (0, 1), got {alpha:e}")));
    }
    if alpha < MIN_ALPHA {
        return Err(Error::Inversion(format!("alpha = {alpha:e} is below the resolvable tail ({MIN_ALPHA:e})")));
    }
    let tail = |x: f64| -> Result<f64> { Ok(null_tail(family, m, x)?.value) };
    let target = alpha.ln();
    let g = |x: f64| -> Result<f64> {
        let t = tail(x)?;
        Ok(t.max(1e-300).ln() - target)
    };
    let (mean, _) = null_moments(family, m)?;
    let (mut lo, mut hi) = (mean, mean);
    let mut g_lo = g(lo)?;
    let mut g_hi = g_lo;
    for _ in 0..200 {
        if g_lo < 0.0 {
            hi = lo;
            g_hi = g_lo;
            lo /= 2.0;
            g_lo = g(lo)?;
        } else if g_hi > 0.0 {
            lo = hi;
            g_lo = g_hi;
            hi *= 2.0;
            g_hi = g(hi)?;
        } else {
            break;
        }
    }
    if !(g_lo >= 0.0 && g_hi <= 0.0) {
        return Err(Error::Inversion(format!("no bracket for alpha = {alpha:e}")));
    }
    // Illinois variant of regula falsi.
    let mut side = 0i32;
    let mut q = 0.5 * (lo + hi);
    for _ in 0..200 {
        q = if g_lo == g_hi { 0.5 * (lo + hi) } else { (lo * g_hi - hi * g_lo) / (g_hi - g_lo) };
        if !(q > lo && q < hi) {
            q = 0.5 * (lo + hi);
        }
        let gq = g(q)?;
        if (tail(q)? - alpha).abs() <= 1e-11 || hi - lo <= 1e-15 * hi {
            break;
        }
        if gq > 0.0 {
            lo = q;
            g_lo = gq;
            if side == -1 {
                g_hi /= 2.0;
            }
            side = -1;
        } else {
            hi = q;
            g_hi = gq;
            if side == 1 {
                g_lo /= 2.0;
            }
            side = 1;
        }
    }
    let achieved = tail(q)?;
    if (achieved - alpha).abs() > 1e-8 {
        return Err(Error::Inversion(format!("reached tail {achieved} for alpha = {alpha}")));
    }
    Ok(q)
}
