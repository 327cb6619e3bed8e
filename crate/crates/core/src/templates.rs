//! Template functions: the kernels whose sample averages give the m-fold
//! integrated empirical processes, one per statistic family.

use std::f64::consts::PI;

use num_rational::BigRational;
use num_traits::One;

use crate::error::{Error, Result};
use crate::gofstats::Family;
use crate::numeric::{integrate_breaks, Integral};
use crate::polybasis::{
    bernoulli_value, check_order, factorial, int, legendre, legendre_integrated,
    legendre_integrated_value, legendre_value, RationalPoly,
};

fn factorial_f64(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, i| acc * i as f64)
}

fn sign(m: usize) -> f64 {
    if m % 2 == 1 {
        -1.0
    } else {
        1.0
    }
}

fn leading_term(m: usize, t: f64, x: f64) -> f64 {
    if t <= x {
        (x - t).powi(m as i32 - 1) / factorial_f64(m - 1)
    } else {
        0.0
    }
}

/// Value of the template `tau(t; x)` for `t, x` in [0, 1].
pub fn template_eval(family: Family, m: usize, t: f64, x: f64) -> Result<f64> {
    check_order(m)?;
    for v in [t, x] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::OutOfDomain { value: v, lo: 0.0, hi: 1.0 });
        }
    }
    Ok(template_unchecked(family, m, t, x))
}

pub(crate) fn template_unchecked(family: Family, m: usize, t: f64, x: f64) -> f64 {
    match family {
        Family::Gad => {
            let proj: f64 = (0..m).map(|k| legendre_value(k, t) * legendre_integrated_value(k, m, x)).sum();
            leading_term(m, t, x) - proj
        }
        Family::Gw | Family::GwTrunc => {
            let arg = if t <= x { t - x + 1.0 } else { t - x };
            let mut v = -sign(m) * bernoulli_value(m, arg);
            if family == Family::GwTrunc {
                for k in 1..m {
                    let w = 2.0 * k as f64 * PI;
                    v -= 2.0 * w.powi(-(m as i32)) * (w * (t - x) + m as f64 * PI / 2.0).cos();
                }
            }
            v
        }
        Family::Gcvm | Family::GcvmTrunc => {
            let g = 2f64.powi(m as i32 - 1)
                * (bernoulli_value(m, (t + x) / 2.0) + sign(m) * bernoulli_value(m, (t - x) / 2.0));
            let mut v = leading_term(m, t, x) - g;
            if family == Family::GcvmTrunc {
                for k in 1..m {
                    let w = k as f64 * PI;
                    v -= 2.0 * w.powi(-(m as i32)) * (w * x - m as f64 * PI / 2.0).cos() * (w * t).cos();
                }
            }
            v
        }
    }
}

/// `int_0^1 tau(t; x) t^j dt` by quadrature split at `t = x`. Zero for GAD
/// when `j < m`, and for every family when `j = 0`.
pub fn template_orthogonality_defect(family: Family, m: usize, x: f64, j: usize) -> Result<f64> {
    template_eval(family, m, 0.0, x)?;
    let r = integrate_breaks(|t| template_unchecked(family, m, t, x) * t.powi(j as i32), &[0.0, x, 1.0], 1e-13, 1e-13);
    if !r.converged {
        return Err(Error::NonConvergence(format!("template moment, error {:e}", r.abs_error)));
    }
    Ok(r.value)
}

/// Exact pieces of the GAD template in `x` for rational `t`: the first
/// polynomial holds on `x < t`, the second on `x >= t`.
pub fn gad_template_exact(m: usize, t: &BigRational) -> Result<(RationalPoly, RationalPoly)> {
    check_order(m)?;
    let mut proj = RationalPoly::zero();
    for k in 0..m {
        let p = legendre(k)?;
        let q = legendre_integrated(k, m)?;
        // sqrt(2k+1) * sqrt(2k+1) is the integer radicand.
        let scale = p.poly.eval(t) * int(p.radicand as i64);
        proj = &proj + &q.poly.scale(&scale);
    }
    let left = -&proj;
    let shift = RationalPoly::from_coeffs(vec![-t.clone(), BigRational::one()]);
    let lead = shift.pow(m - 1).scale(&BigRational::new(One::one(), factorial(m - 1)));
    let right = &lead - &proj;
    Ok((left, right))
}

/// The scaled process `N^{-1/2} sum_i tau(X_i; x)`, evaluated in O(m) per
/// point after an O(N m) setup on the sorted sample.
pub struct EmpiricalProcess {
    family: Family,
    m: usize,
    sorted: Vec<f64>,
    inv_sqrt_n: f64,
    // prefix[r][j] = sum over the first r sorted points of X^j
    prefix_pow: Vec<Vec<f64>>,
    // prefix sums of b_{m-j}(X) over the first r sorted points
    prefix_bern: Vec<Vec<f64>>,
    total_bern: Vec<f64>,
    // totals of b_{m-j}(X / 2)
    half_bern: Vec<f64>,
    legendre_sums: Vec<f64>,
    trig_cos: Vec<f64>,
    trig_sin: Vec<f64>,
}

impl EmpiricalProcess {
    pub fn new(family: Family, m: usize, sample: &[f64]) -> Result<Self> {
        check_order(m)?;
        if sample.is_empty() {
            return Err(Error::EmptySample);
        }
        let mut sorted = sample.to_vec();
        sorted.sort_by(f64::total_cmp);
        let n = sorted.len();
        let mut prefix_pow = vec![vec![0.0; m]; n + 1];
        let mut prefix_bern = vec![vec![0.0; m + 1]; n + 1];
        for (r, &x) in sorted.iter().enumerate() {
            for j in 0..m {
                prefix_pow[r + 1][j] = prefix_pow[r][j] + x.powi(j as i32);
            }
            for j in 0..=m {
                prefix_bern[r + 1][j] = prefix_bern[r][j] + bernoulli_value(m - j, x);
            }
        }
        let total_bern = prefix_bern[n].clone();
        let half_bern = (0..=m)
            .map(|j| sorted.iter().map(|&x| bernoulli_value(m - j, x / 2.0)).sum())
            .collect();
        let legendre_sums = (0..m).map(|k| sorted.iter().map(|&x| legendre_value(k, x)).sum()).collect();
        let freq = |k: usize| match family {
            Family::GwTrunc => 2.0 * k as f64 * PI,
            _ => k as f64 * PI,
        };
        let trig_cos = (0..m).map(|k| sorted.iter().map(|&x| (freq(k) * x).cos()).sum()).collect();
        let trig_sin = (0..m).map(|k| sorted.iter().map(|&x| (freq(k) * x).sin()).sum()).collect();
        Ok(Self {
            family,
            m,
            inv_sqrt_n: 1.0 / (n as f64).sqrt(),
            sorted,
            prefix_pow,
            prefix_bern,
            total_bern,
            half_bern,
            legendre_sums,
            trig_cos,
            trig_sin,
        })
    }

    pub fn sorted(&self) -> &[f64] {
        &self.sorted
    }

    fn leading_sum(&self, r: usize, x: f64) -> f64 {
        // sum over X_i <= x of (x - X_i)^{m-1} / (m-1)!
        let m = self.m;
        (0..m)
            .map(|j| {
                let c = sign(j) / (factorial_f64(j) * factorial_f64(m - 1 - j));
                c * x.powi((m - 1 - j) as i32) * self.prefix_pow[r][j]
            })
            .sum()
    }

    pub fn eval(&self, x: f64) -> f64 {
        let m = self.m;
        let r = self.sorted.partition_point(|&v| v <= x);
        let raw = match self.family {
            Family::Gad => {
                let proj: f64 = (0..m)
                    .map(|k| self.legendre_sums[k] * legendre_integrated_value(k, m, x))
                    .sum();
                self.leading_sum(r, x) - proj
            }
            Family::Gw | Family::GwTrunc => {
                let mut v = 0.0;
                let (mut below_h, mut above_h) = (1.0, 1.0);
                for j in 0..=m {
                    let below = self.prefix_bern[r][j];
                    let above = self.total_bern[j] - below;
                    v += below_h * below + above_h * above;
                    below_h *= (1.0 - x) / (j + 1) as f64;
                    above_h *= -x / (j + 1) as f64;
                }
                let mut v = -sign(m) * v;
                if self.family == Family::GwTrunc {
                    for k in 1..m {
                        let w = 2.0 * k as f64 * PI;
                        let phi = w * x - m as f64 * PI / 2.0;
                        let s = phi.cos() * self.trig_cos[k] + phi.sin() * self.trig_sin[k];
                        v -= 2.0 * w.powi(-(m as i32)) * s;
                    }
                }
                v
            }
            Family::Gcvm | Family::GcvmTrunc => {
                let mut plus = 0.0;
                let mut minus = 0.0;
                let (mut hp, mut hm) = (1.0, 1.0);
                for j in 0..=m {
                    plus += hp * self.half_bern[j];
                    minus += hm * self.half_bern[j];
                    hp *= x / 2.0 / (j + 1) as f64;
                    hm *= -x / 2.0 / (j + 1) as f64;
                }
                let g = 2f64.powi(m as i32 - 1) * (plus + sign(m) * minus);
                let mut v = self.leading_sum(r, x) - g;
                if self.family == Family::GcvmTrunc {
                    for k in 1..m {
                        let w = k as f64 * PI;
                        v -= 2.0 * w.powi(-(m as i32)) * (w * x - m as f64 * PI / 2.0).cos() * self.trig_cos[k];
                    }
                }
                v
            }
        };
        raw * self.inv_sqrt_n
    }

    /// Literal O(N) sum of templates; reference for [`Self::eval`].
    pub fn eval_direct(&self, x: f64) -> f64 {
        self.sorted
            .iter()
            .map(|&t| template_unchecked(self.family, self.m, t, x))
            .sum::<f64>()
            * self.inv_sqrt_n
    }

    pub fn weight(&self, x: f64) -> f64 {
        match self.family {
            Family::Gad => (x * (1.0 - x)).powi(-(self.m as i32)),
            _ => 1.0,
        }
    }
}

/// The statistic as the weighted L2 norm of the process, by adaptive
/// quadrature with breakpoints at the observations. Slow reference route.
pub fn integrated_statistic(family: Family, m: usize, sample: &[f64]) -> Result<Integral> {
    let process = EmpiricalProcess::new(family, m, sample)?;
    let mut points = Vec::with_capacity(sample.len() + 2);
    points.push(0.0);
    points.extend(process.sorted().iter().copied().filter(|&v| v > 0.0 && v < 1.0));
    points.push(1.0);
    points.dedup();
    let r = integrate_breaks(
        |x| {
            let b = process.eval(x);
            b * b * process.weight(x)
        },
        &points,
        1e-14,
        1e-11,
    );
    if !r.converged {
        return Err(Error::NonConvergence(format!("process quadrature, error {:e}", r.abs_error)));
    }
    Ok(r)
}
