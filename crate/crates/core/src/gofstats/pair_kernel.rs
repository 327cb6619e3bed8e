//! Closed-form pair kernel of the generalized Anderson-Darling statistic.
//!
//! With `a = 1 - min(s, t)` and `b = max(s, t)` the kernel is
//! `-R(a, b) (ln a + ln b) + Q(a, b)` for bivariate rational polynomials
//! `R`, `Q` of degree at most `m - 1` in each variable.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::Result;
use crate::polybasis::{binomial, check_order, factorial, harmonic, int, MAX_ORDER};

/// Dense bivariate polynomial, `coeffs[i][j]` multiplying `a^i b^j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BiPoly {
    pub coeffs: Vec<Vec<BigRational>>,
}

impl BiPoly {
    pub fn zero(deg: usize) -> Self {
        Self { coeffs: vec![vec![BigRational::zero(); deg + 1]; deg + 1] }
    }

    fn degree_bound(&self) -> usize {
        self.coeffs.len() - 1
    }

    fn one(deg: usize) -> Self {
        let mut p = Self::zero(deg);
        p.coeffs[0][0] = BigRational::one();
        p
    }

    /// `1 - a - b`.
    fn diag(deg: usize) -> Self {
        let mut p = Self::one(deg);
        p.coeffs[1][0] = -BigRational::one();
        p.coeffs[0][1] = -BigRational::one();
        p
    }

    fn mul(&self, other: &Self) -> Self {
        let d = self.degree_bound();
        let mut out = Self::zero(d);
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if c.is_zero() {
                    continue;
                }
                for (k, orow) in other.coeffs.iter().enumerate() {
                    for (l, oc) in orow.iter().enumerate() {
                        if oc.is_zero() {
                            continue;
                        }
                        assert!(i + k <= d && j + l <= d, "bivariate degree overflow");
                        out.coeffs[i + k][j + l] += c * oc;
                    }
                }
            }
        }
        out
    }

    fn pow(&self, e: usize) -> Self {
        (0..e).fold(Self::one(self.degree_bound()), |acc, _| acc.mul(self))
    }

    fn add_scaled(&mut self, other: &Self, c: &BigRational) {
        for (row, orow) in self.coeffs.iter_mut().zip(&other.coeffs) {
            for (v, o) in row.iter_mut().zip(orow) {
                *v += o * c;
            }
        }
    }

    fn monomial(deg: usize, i: usize, j: usize) -> Self {
        let mut p = Self::zero(deg);
        p.coeffs[i][j] = BigRational::one();
        p
    }

    pub fn eval(&self, a: &BigRational, b: &BigRational) -> BigRational {
        let mut total = BigRational::zero();
        for (i, row) in self.coeffs.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                total += c * num_traits::pow(a.clone(), i) * num_traits::pow(b.clone(), j);
            }
        }
        total
    }

    pub fn to_f64(&self) -> Vec<Vec<f64>> {
        self.coeffs
            .iter()
            .map(|row| row.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect())
            .collect()
    }

    pub fn is_symmetric(&self) -> bool {
        let n = self.coeffs.len();
        (0..n).all(|i| (0..n).all(|j| self.coeffs[i][j] == self.coeffs[j][i]))
    }
}

fn sgn(e: usize) -> BigRational {
    if e % 2 == 1 {
        -BigRational::one()
    } else {
        BigRational::one()
    }
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Coefficient multiplying `[b^{m-1-r} + a^{m-1-r}] (ab)^l (1-a-b)^{r-l}`.
pub fn coefficient_c(m: usize, l: usize, r: usize) -> BigRational {
    let fm = factorial(m - 1);
    if r + 2 <= m {
        let num = binomial(m - 1, r) * binomial(r, l) * binomial(m - 1 + l, r);
        sgn(r) * ratio(num, &fm * &fm * BigInt::from(m - 1 - r))
    } else {
        let num = binomial(m - 1, l) * binomial(m - 1 + l, l);
        sgn(m - 1) * ratio(num, &fm * &fm) * (harmonic(m - 1) + harmonic(l) - harmonic(m - 1 + l))
    }
}

/// Coefficient of the free monomial `a^k b^l`.
pub fn coefficient_d(m: usize, k: usize, l: usize) -> BigRational {
    let mut s = int(factorial(k + l)) * (harmonic(m + l) - harmonic(l));
    for r in 0..m {
        if r == l {
            continue;
        }
        let inner = ratio(factorial(m + l), factorial(m + r)) - ratio(factorial(l), factorial(r));
        s += int(factorial(k + r)) * inner / int(l as i64 - r as i64);
    }
    let den = factorial(k).pow(2) * factorial(l).pow(2) * factorial(m - 1 - k) * factorial(m - 1 - l);
    sgn(m + k + l) * s / int(den)
}

#[derive(Clone, Debug)]
pub struct PairKernel {
    pub m: usize,
    pub log_coeff: BiPoly,
    pub free: BiPoly,
    pub log_coeff_f64: Vec<Vec<f64>>,
    pub free_f64: Vec<Vec<f64>>,
}

/// Exact assembly of the kernel polynomials for order `m`.
pub fn build_pair_kernel(m: usize) -> Result<PairKernel> {
    check_order(m)?;
    let deg = m - 1;
    // Per-variable degree never exceeds m - 1; pad to 1 so `1 - a - b` fits.
    let big = deg.max(1);
    let d = BiPoly::diag(big);
    let ab = BiPoly::monomial(big, 1, 1);
    let reduce = |p: BiPoly| {
        let mut out = BiPoly::zero(deg);
        for i in 0..=deg {
            for j in 0..=deg {
                out.coeffs[i][j] = p.coeffs[i][j].clone();
            }
        }
        out
    };

    let fm = factorial(m - 1);
    let mut r_poly = BiPoly::zero(big);
    for l in 0..m {
        let c = sgn(m - 1) * ratio(binomial(m - 1, l) * binomial(m - 1 + l, l), &fm * &fm);
        r_poly.add_scaled(&ab.pow(l).mul(&d.pow(m - 1 - l)), &c);
    }

    let mut q_poly = BiPoly::zero(big);
    for r in 0..m {
        let e = m - 1 - r;
        let mut edge = BiPoly::monomial(big, 0, e);
        edge.add_scaled(&BiPoly::monomial(big, e, 0), &BigRational::one());
        for l in 0..=r {
            let term = edge.mul(&ab.pow(l)).mul(&d.pow(r - l));
            q_poly.add_scaled(&term, &coefficient_c(m, l, r));
        }
    }
    for k in 0..m {
        for l in 0..m {
            q_poly.coeffs[k][l] += coefficient_d(m, k, l);
        }
    }
    let log_coeff = reduce(r_poly);
    let free = reduce(q_poly);
    Ok(PairKernel {
        m,
        log_coeff_f64: log_coeff.to_f64(),
        free_f64: free.to_f64(),
        log_coeff,
        free,
    })
}

/// Cached kernel for order `m`.
pub fn pair_kernel(m: usize) -> Result<&'static PairKernel> {
    check_order(m)?;
    static CACHE: OnceLock<Vec<OnceLock<PairKernel>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| (0..=MAX_ORDER).map(|_| OnceLock::new()).collect());
    Ok(cache[m].get_or_init(|| build_pair_kernel(m).expect("order checked")))
}

fn eval_f64(c: &[Vec<f64>], a: f64, b: f64) -> f64 {
    c.iter()
        .rev()
        .fold(0.0, |acc, row| acc * a + row.iter().rev().fold(0.0, |s, v| s * b + v))
}

impl PairKernel {
    /// Kernel value for observations `s`, `t` in (0, 1).
    pub fn value(&self, s: f64, t: f64) -> f64 {
        let a = 1.0 - s.min(t);
        let b = s.max(t);
        -eval_f64(&self.log_coeff_f64, a, b) * (a.ln() + b.ln()) + eval_f64(&self.free_f64, a, b)
    }
}
