//! Exact polynomial bases on the unit interval.
//!
//! Coefficients are kept as big rationals so that identities can be checked
//! exactly; floating evaluation goes through cached `f64` tables for low
//! degrees and three-term recurrences for high degrees.

use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Largest integration order supported by the template and statistic code.
pub const MAX_ORDER: usize = 10;
/// Largest polynomial degree served from exact tables.
pub const MAX_DEGREE: usize = 64;

/// Univariate polynomial with rational coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct RationalPoly {
    coeffs: Vec<BigRational>,
}

pub fn rat(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: impl Into<BigInt>) -> BigRational {
    BigRational::from_integer(n.into())
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

pub fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// H_n = 1 + 1/2 + ... + 1/n, with H_0 = 0.
pub fn harmonic(n: usize) -> BigRational {
    (1..=n).fold(BigRational::zero(), |acc, j| acc + rat(1, j as i64))
}

impl RationalPoly {
    pub fn from_coeffs(mut coeffs: Vec<BigRational>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn zero() -> Self {
        Self { coeffs: Vec::new() }
    }

    pub fn constant(c: BigRational) -> Self {
        Self::from_coeffs(vec![c])
    }

    pub fn monomial(degree: usize, c: BigRational) -> Self {
        let mut coeffs = vec![BigRational::zero(); degree + 1];
        coeffs[degree] = c;
        Self::from_coeffs(coeffs)
    }

    /// The polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(1, BigRational::one())
    }

    pub fn coeffs(&self) -> &[BigRational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigRational {
        self.coeffs.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn pow(&self, e: usize) -> Self {
        let mut acc = Self::constant(BigRational::one());
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut out = Vec::with_capacity(self.coeffs.len() + 1);
        out.push(BigRational::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            out.push(c / int(i as i64 + 1));
        }
        Self::from_coeffs(out)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * int(i as i64))
                .collect(),
        )
    }

    /// Integral over [0, 1].
    pub fn integral_unit(&self) -> BigRational {
        self.coeffs
            .iter()
            .enumerate()
            .fold(BigRational::zero(), |acc, (i, c)| acc + c / int(i as i64 + 1))
    }

    pub fn eval(&self, x: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * x + c)
    }

    /// `p(a x + b)`.
    pub fn compose_affine(&self, a: &BigRational, b: &BigRational) -> Self {
        let lin = Self::from_coeffs(vec![b.clone(), a.clone()]);
        self.coeffs.iter().rev().fold(Self::zero(), |acc, c| {
            &(&acc * &lin) + &Self::constant(c.clone())
        })
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect()
    }

    /// Horner evaluation on rounded coefficients.
    pub fn eval_f64(&self, x: f64) -> f64 {
        horner(&self.to_f64_coeffs(), x)
    }
}

pub fn horner(coeffs: &[f64], x: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        RationalPoly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        if self.is_zero() || rhs.is_zero() {
            return RationalPoly::zero();
        }
        let mut out = vec![BigRational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        RationalPoly::from_coeffs(out)
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        RationalPoly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

/// `sqrt(radicand) * poly`; the square root is carried symbolically so the
/// coefficients stay rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RootScaledPoly {
    pub radicand: u64,
    pub poly: RationalPoly,
}

impl RootScaledPoly {
    pub fn eval_f64(&self, x: f64) -> f64 {
        (self.radicand as f64).sqrt() * self.poly.eval_f64(x)
    }

    /// Exact product of two scaled polynomials, returned as (radicand, poly).
    pub fn mul(&self, other: &Self) -> (u64, RationalPoly) {
        (self.radicand * other.radicand, &self.poly * &other.poly)
    }
}

fn check_degree(k: usize) -> Result<()> {
    if k > MAX_DEGREE {
        return Err(Error::OrderOutOfRange { order: k, max: MAX_DEGREE });
    }
    Ok(())
}

pub fn check_order(m: usize) -> Result<()> {
    if m == 0 || m > MAX_ORDER {
        return Err(Error::OrderOutOfRange { order: m, max: MAX_ORDER });
    }
    Ok(())
}

/// Shifted Legendre polynomial on [0, 1], orthonormal in L2(0, 1).
pub fn legendre(k: usize) -> Result<RootScaledPoly> {
    check_degree(k)?;
    let coeffs = (0..=k)
        .map(|l| {
            let c = binomial(k, l) * binomial(k + l, l);
            let c = if (k + l) % 2 == 1 { -c } else { c };
            BigRational::from_integer(c)
        })
        .collect();
    Ok(RootScaledPoly { radicand: 2 * k as u64 + 1, poly: RationalPoly::from_coeffs(coeffs) })
}

/// m-fold integral of the shifted Legendre polynomial, anchored at zero.
pub fn legendre_integrated(k: usize, m: usize) -> Result<RootScaledPoly> {
    check_degree(k)?;
    let mut coeffs = vec![BigRational::zero(); m + k + 1];
    for j in 0..=k {
        let num = factorial(k + j);
        let den = factorial(j) * factorial(k - j) * factorial(m + j);
        let c = BigRational::new(num, den);
        coeffs[m + j] = if (k + j) % 2 == 1 { -c } else { c };
    }
    Ok(RootScaledPoly { radicand: 2 * k as u64 + 1, poly: RationalPoly::from_coeffs(coeffs) })
}

/// Normalized Bernoulli polynomial: b_0 = 1, b_{m+1}' = b_m, mean zero.
pub fn bernoulli_normalized(m: usize) -> Result<RationalPoly> {
    if m > 2 * MAX_ORDER {
        return Err(Error::OrderOutOfRange { order: m, max: 2 * MAX_ORDER });
    }
    Ok(bernoulli_table()[m].clone())
}

fn bernoulli_table() -> &'static [RationalPoly] {
    static TABLE: OnceLock<Vec<RationalPoly>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut out = vec![RationalPoly::constant(BigRational::one())];
        for _ in 0..2 * MAX_ORDER {
            let prim = out.last().unwrap().antiderivative();
            let shift = prim.integral_unit();
            out.push(&prim - &RationalPoly::constant(shift));
        }
        out
    })
}

fn bernoulli_f64_table() -> &'static [Vec<f64>] {
    static TABLE: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    TABLE.get_or_init(|| bernoulli_table().iter().map(RationalPoly::to_f64_coeffs).collect())
}

/// Floating evaluation of `b_m(x)` for any real `x` (no periodic reduction).
pub fn bernoulli_value(m: usize, x: f64) -> f64 {
    horner(&bernoulli_f64_table()[m], x)
}

/// Floating evaluation of the shifted orthonormal Legendre polynomial.
pub fn legendre_value(k: usize, x: f64) -> f64 {
    let u = 2.0 * x - 1.0;
    let (mut prev, mut cur) = (1.0, u);
    if k == 0 {
        return 1.0;
    }
    for n in 1..k {
        let n = n as f64;
        let next = ((2.0 * n + 1.0) * u * cur - n * prev) / (n + 1.0);
        prev = cur;
        cur = next;
    }
    (2.0 * k as f64 + 1.0).sqrt() * cur
}

/// Values of the first `count` shifted orthonormal Legendre polynomials at `x`.
pub fn legendre_values(count: usize, x: f64, out: &mut Vec<f64>) {
    out.clear();
    let u = 2.0 * x - 1.0;
    let (mut prev, mut cur) = (0.0, 1.0);
    for n in 0..count {
        out.push((2.0 * n as f64 + 1.0).sqrt() * cur);
        let nf = n as f64;
        let next = ((2.0 * nf + 1.0) * u * cur - nf * prev) / (nf + 1.0);
        prev = cur;
        cur = next;
    }
}

/// j-th derivative of the shifted orthonormal Legendre polynomial, through
/// the Gegenbauer recurrence.
pub fn legendre_derivative_value(k: usize, j: usize, x: f64) -> f64 {
    if j > k {
        return 0.0;
    }
    if j == 0 {
        return legendre_value(k, x);
    }
    let u = 2.0 * x - 1.0;
    let lambda = j as f64 + 0.5;
    let n_max = k - j;
    let (mut prev, mut cur) = (1.0, 2.0 * lambda * u);
    let c = if n_max == 0 {
        1.0
    } else {
        for n in 2..=n_max {
            let nf = n as f64;
            let next = (2.0 * (nf + lambda - 1.0) * u * cur - (nf + 2.0 * lambda - 2.0) * prev) / nf;
            prev = cur;
            cur = next;
        }
        cur
    };
    let double_fact: f64 = (1..=j).map(|i| (2 * i - 1) as f64).product();
    (2.0 * k as f64 + 1.0).sqrt() * 2f64.powi(j as i32) * double_fact * c
}

/// (k-m)!/(k+m)! in floating point.
pub fn factorial_ratio(k: usize, m: usize) -> f64 {
    ((k - m + 1)..=(k + m)).fold(1.0, |acc, i| acc / i as f64)
}

fn integrated_low_table() -> &'static [Vec<Vec<f64>>] {
    static TABLE: OnceLock<Vec<Vec<Vec<f64>>>> = OnceLock::new();
    TABLE.get_or_init(|| {
        (0..=MAX_ORDER)
            .map(|m| {
                (0..m)
                    .map(|k| {
                        let p = legendre_integrated(k, m).expect("degree within table");
                        let mut c = p.poly.to_f64_coeffs();
                        let r = (p.radicand as f64).sqrt();
                        c.iter_mut().for_each(|v| *v *= r);
                        c
                    })
                    .collect()
            })
            .collect()
    })
}

/// Floating evaluation of the m-fold integrated Legendre polynomial.
pub fn legendre_integrated_value(k: usize, m: usize, x: f64) -> f64 {
    if k < m && m <= MAX_ORDER {
        return horner(&integrated_low_table()[m][k], x);
    }
    if k < m {
        return legendre_integrated(k, m).map(|p| p.eval_f64(x)).unwrap_or(f64::NAN);
    }
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    sign * factorial_ratio(k, m) * (x * (1.0 - x)).powi(m as i32) * legendre_derivative_value(k, m, x)
}

/// Associated Legendre function on [0, 1]; orthonormal in k for fixed m.
pub fn legendre_associated(k: usize, m: usize, x: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::OutOfDomain { value: x, lo: 0.0, hi: 1.0 });
    }
    if k < m {
        return Err(Error::InvalidArgument(format!("associated Legendre needs k >= m, got k={k}, m={m}")));
    }
    let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
    Ok(sign
        * factorial_ratio(k, m).sqrt()
        * (x * (1.0 - x)).powf(m as f64 / 2.0)
        * legendre_derivative_value(k, m, x))
}

/// Exact inner product as a rational, valid when the radicands multiply to a
/// perfect square; `None` otherwise.
pub fn inner_product_exact(p: &RootScaledPoly, q: &RootScaledPoly) -> Option<BigRational> {
    let (r, poly) = p.mul(q);
    let root = (r as f64).sqrt().round() as u64;
    (root * root == r).then(|| poly.integral_unit() * int(root as i64))
}
