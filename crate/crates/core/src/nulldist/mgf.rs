use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use super::spectral::{eigenvalue_unchecked, mgf_infinite_product, multiplicity};
use crate::error::{Error, Result};
use crate::gofstats::Family;
use crate::numeric::roots::polynomial_roots;
use crate::numeric::special::{ln_sin, ln_z_over_sin};
use crate::polybasis::check_order;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MgfMethod {
    /// Closed forms with finitely many factors.
    FiniteProduct,
    /// The eigenvalue product cut after this many distinct factors, with a
    /// tail correction.
    InfiniteProduct(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MgfEvaluation {
    #[serde(serialize_with = "ser_complex")]
    pub s: Complex64,
    #[serde(serialize_with = "ser_complex")]
    pub value: Complex64,
    /// For real `s`: `|Im value| / |value|`. For complex `s`: the largest
    /// phase step along the continuation path from 0, in radians.
    pub branch_certificate: f64,
}

fn ser_complex<S: serde::Serializer>(z: &Complex64, ser: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    let mut t = ser.serialize_tuple(2)?;
    t.serialize_element(&z.re)?;
    t.serialize_element(&z.im)?;
    t.end()
}

fn half_square(j: usize) -> f64 {
    (j as f64 + 0.5).powi(2)
}

/// Roots of `prod_{j<m} (z - (j + 1/2)^2) - 2s`.
pub fn solve_eta(m: usize, s: Complex64) -> Result<Vec<Complex64>> {
    check_order(m)?;
    Ok(refined_eta(m, s)?.into_iter().map(|r| r.eta).collect())
}

struct EtaRoot {
    eta: Complex64,
    // index of the nearest (j + 1/2)^2 and the offset from it
    j: usize,
    offset: Complex64,
}

fn refined_eta(m: usize, s: Complex64) -> Result<Vec<EtaRoot>> {
    let mut coeffs = vec![Complex64::new(1.0, 0.0)];
    for j in 0..m {
        let c = half_square(j);
        let mut next = vec![Complex64::new(0.0, 0.0); coeffs.len() + 1];
        for (i, &a) in coeffs.iter().enumerate() {
            next[i + 1] += a;
            next[i] -= c * a;
        }
        coeffs = next;
    }
    coeffs[0] -= 2.0 * s;
    let roots = if m == 1 { vec![0.25 + 2.0 * s] } else { polynomial_roots(&coeffs)? };
    let mut out = Vec::with_capacity(m);
    for eta in roots {
        let j = (0..m)
            .min_by(|&a, &b| (eta - half_square(a)).norm().total_cmp(&(eta - half_square(b)).norm()))
            .expect("m >= 1");
        let cj = half_square(j);
        // Newton on eps * prod_{i != j} (c_j - c_i + eps) = 2s, which keeps
        // relative accuracy in the offset when it is small.
        let mut eps = eta - cj;
        for _ in 0..6 {
            let mut p = Complex64::new(1.0, 0.0);
            let mut dlog = Complex64::new(0.0, 0.0);
            for i in (0..m).filter(|&i| i != j) {
                let f = cj - half_square(i) + eps;
                p *= f;
                dlog += 1.0 / f;
            }
            let f = eps * p - 2.0 * s;
            let df = p + eps * p * dlog;
            if df.norm() == 0.0 {
                break;
            }
            let step = f / df;
            eps -= step;
            if step.norm() <= 1e-16 * eps.norm() {
                break;
            }
        }
        out.push(EtaRoot { eta: cj + eps, j, offset: eps });
    }
    Ok(out)
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|i| (i as f64).ln()).sum()
}

/// A logarithm of the "inner" MGF: the square of the MGF for GAD and GCvM
/// and the MGF itself for GW. Imaginary part correct modulo 2 pi.
fn log_inner(family: Family, m: usize, s: Complex64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    match family {
        Family::Gad => {
            // cos(pi sqrt(eta)) = -(-1)^j sin(pi delta), delta = sqrt(eta) - j - 1/2
            acc += m as f64 * (-2.0 * PI * s).ln();
            acc -= (0..2 * m).map(ln_factorial).sum::<f64>();
            for root in refined_eta(m, s)? {
                let delta = root.offset / (root.eta.sqrt() + root.j as f64 + 0.5);
                let n = delta.re.round();
                let reduced = delta - n;
                let flips = root.j as i64 + 1 + n as i64;
                let sign_log = if flips % 2 == 0 { 0.0 } else { PI };
                acc -= ln_sin(PI * reduced) + Complex64::new(0.0, sign_log);
            }
        }
        Family::Gw | Family::GwTrunc | Family::Gcvm | Family::GcvmTrunc => {
            let root = (2.0 * s).powf(1.0 / (2 * m) as f64);
            let sigma = if family.is_circular() { 0.5 * root } else { root };
            for j in 0..m {
                let w = Complex64::from_polar(1.0, j as f64 * PI / m as f64);
                acc += ln_z_over_sin(sigma * w);
            }
            if family.is_truncated() {
                let mult = multiplicity(family);
                for i in 0..m - 1 {
                    let lam = eigenvalue_unchecked(family.untruncated(), m, i * mult + 1);
                    acc += (1.0 - 2.0 * s / lam).ln();
                }
            }
        }
    }
    if !(acc.re.is_finite() && acc.im.is_finite()) {
        return Err(Error::Pole { s: s.re });
    }
    Ok(acc)
}

fn takes_root(family: Family) -> bool {
    !family.is_circular()
}

fn check_pole(family: Family, m: usize, s: Complex64) -> Result<()> {
    if s.im != 0.0 || s.re <= 0.0 {
        return Ok(());
    }
    let mult = multiplicity(family);
    for i in 0.. {
        let half = eigenvalue_unchecked(family, m, i * mult + 1) / 2.0;
        if (s.re - half).abs() <= 1e-13 * half {
            return Err(Error::Pole { s: s.re });
        }
        if half > s.re {
            break;
        }
    }
    Ok(())
}

fn reduce_phase(theta: f64) -> f64 {
    theta - 2.0 * PI * (theta / (2.0 * PI)).round()
}

const PATH_STEPS: usize = 64;

/// `E exp(s L)` for the limit law `L` of the family.
pub fn mgf(family: Family, m: usize, s: Complex64, method: MgfMethod) -> Result<MgfEvaluation> {
    check_order(m)?;
    if !(s.re.is_finite() && s.im.is_finite()) {
        return Err(Error::InvalidArgument("mgf argument must be finite".into()));
    }
    check_pole(family, m, s)?;
    if s == Complex64::new(0.0, 0.0) {
        return Ok(MgfEvaluation { s, value: Complex64::new(1.0, 0.0), branch_certificate: 0.0 });
    }
    let power = if takes_root(family) { 0.5 } else { 1.0 };
    let real_certificate = |value: Complex64| value.im.abs() / value.norm();
    match method {
        MgfMethod::InfiniteProduct(terms) => {
            let value = mgf_infinite_product(family, m, s, terms)?;
            let cert = if s.im == 0.0 { real_certificate(value) } else { 0.0 };
            Ok(MgfEvaluation { s, value, branch_certificate: cert })
        }
        MgfMethod::FiniteProduct if s.im == 0.0 => {
            let l = log_inner(family, m, s)?;
            let value = (power * Complex64::new(l.re, reduce_phase(l.im))).exp();
            Ok(MgfEvaluation { s, value, branch_certificate: real_certificate(value) })
        }
        MgfMethod::FiniteProduct => {
            // Follow the phase continuously from s = 0, where it is 0.
            let mut phase = 0.0;
            let mut worst = 0.0f64;
            let mut l = Complex64::new(0.0, 0.0);
            for step in 1..=PATH_STEPS {
                let t = step as f64 / PATH_STEPS as f64;
                l = log_inner(family, m, s * t)?;
                let next = phase + reduce_phase(l.im - phase);
                worst = worst.max((next - phase).abs());
                phase = next;
            }
            let value = (power * Complex64::new(l.re, phase)).exp();
            Ok(MgfEvaluation { s, value, branch_certificate: worst })
        }
    }
}

/// `ln |E exp(s L)|` for real `s`; finite between poles, which is what the
/// tail inversion needs.
pub fn ln_abs_mgf(family: Family, m: usize, s: f64) -> Result<f64> {
    if s == 0.0 {
        return Ok(0.0);
    }
    let power = if takes_root(family) { 0.5 } else { 1.0 };
    Ok(power * log_inner(family, m, Complex64::new(s, 0.0))?.re)
}

/// The order-two GAD moment generating function written with the roots
/// `5/4 +- sqrt(1 + 2s)`.
pub fn gad_mgf_order_two(s: Complex64) -> Complex64 {
    if s == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    let r = (1.0 + 2.0 * s).sqrt();
    let a = (PI / 2.0 * (5.0 - 4.0 * r).sqrt()).cos();
    let b = (PI / 2.0 * (5.0 + 4.0 * r).sqrt()).cos();
    // The square is single-valued; its principal root is the positive value on the real axis.
    (PI * PI * s * s / (3.0 * a * b)).sqrt()
}

/// The order-three GAD moment generating function through the radical
/// formulas for the three roots.
pub fn gad_mgf_order_three(s: Complex64) -> Complex64 {
    if s == Complex64::new(0.0, 0.0) {
        return Complex64::new(1.0, 0.0);
    }
    let i = Complex64::i();
    let eta = (27.0 * s + 80.0 + 3.0 * (81.0 * s * s + 480.0 * s - 1728.0).sqrt()).powf(1.0 / 3.0);
    let e1 = (4.0 * eta * eta + 35.0 * eta + 112.0) / (12.0 * eta);
    let rot = (-i * PI / 3.0).exp();
    let e2 = (4.0 * rot * eta * eta - 35.0 * eta + 112.0 / rot) / (12.0 * eta);
    let e3 = (4.0 / rot * eta * eta - 35.0 * eta + 112.0 * rot) / (12.0 * eta);
    let den = -4320.0 * (PI * e1.sqrt()).cos() * (PI * e2.sqrt()).cosh() * (PI * e3.sqrt()).cosh();
    ((PI * s).powi(3) / den).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(s: f64) -> Complex64 {
        Complex64::new(s, 0.0)
    }

    #[test]
    fn eta_examples() {
        let r = solve_eta(1, real(1.0)).unwrap();
        assert!((r[0] - 2.25).norm() < 1e-15);
        let mut r = solve_eta(2, real(0.0)).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        assert!((r[0] - 0.25).norm() < 1e-13 && (r[1] - 2.25).norm() < 1e-13);
        let s = 0.7;
        let mut r = solve_eta(2, real(s)).unwrap();
        r.sort_by(|a, b| a.re.total_cmp(&b.re));
        let q = (1.0 + 2.0 * s as f64).sqrt();
        assert!((r[0] - (1.25 - q)).norm() < 1e-13 && (r[1] - (1.25 + q)).norm() < 1e-13);
    }

    #[test]
    fn zero_is_one() {
        for family in Family::ALL {
            for m in 1..=4 {
                let v = mgf(family, m, real(0.0), MgfMethod::FiniteProduct).unwrap();
                assert_eq!(v.value, Complex64::new(1.0, 0.0));
            }
        }
    }

    #[test]
    fn gad_order_one_closed_form() {
        let v = mgf(Family::Gad, 1, real(-1.0), MgfMethod::FiniteProduct).unwrap().value;
        let expected = (2.0 * PI / (PI * 7f64.sqrt() / 2.0).cosh()).sqrt();
        assert!((v.re - expected).abs() < 1e-14 * expected);
        let inf = mgf(Family::Gad, 1, real(-1.0), MgfMethod::InfiniteProduct(1_000_000)).unwrap().value;
        assert!((inf.re - expected).abs() < 1e-8 * expected);
    }

    #[test]
    fn watson_order_one_example() {
        let v = mgf(Family::Gw, 1, real(0.02), MgfMethod::FiniteProduct).unwrap().value;
        assert!((v.re - 0.1 / 0.1f64.sin()).abs() < 1e-15);
        assert!((v.re - 1.0016686131634777).abs() < 1e-15);
    }

    #[test]
    fn pole_rejected() {
        let lam = eigenvalue_unchecked(Family::Gad, 1, 1);
        assert!(matches!(mgf(Family::Gad, 1, real(lam / 2.0), MgfMethod::FiniteProduct), Err(Error::Pole { .. })));
    }

    #[test]
    fn complex_argument_matches_product() {
        let s = Complex64::new(-3.0, 2.5);
        for family in Family::ALL {
            for m in 1..=3 {
                let a = mgf(family, m, s, MgfMethod::FiniteProduct).unwrap().value;
                let b = mgf(family, m, s, MgfMethod::InfiniteProduct(20000)).unwrap().value;
                assert!((a - b).norm() < 1e-8 * b.norm(), "{family} {m}: {a} vs {b}");
            }
        }
    }
}
