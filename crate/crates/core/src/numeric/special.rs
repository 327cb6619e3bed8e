use num_complex::Complex64;

pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `z / sin z`, accurate near the origin.
pub fn z_over_sin(z: Complex64) -> Complex64 {
    if z.norm() < 1e-4 {
        let z2 = z * z;
        1.0 + z2 / 6.0 + z2 * z2 * (7.0 / 360.0)
    } else {
        z / z.sin()
    }
}

/// A logarithm of `sin z` that stays finite for large imaginary parts. The
/// imaginary part is correct modulo 2 pi.
pub fn ln_sin(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return z.sin().ln();
    }
    let i = Complex64::i();
    if z.im > 0.0 {
        // sin z = (i/2) e^{-iz} (1 - e^{2iz})
        (i / 2.0).ln() - i * z + (1.0 - (2.0 * i * z).exp()).ln()
    } else {
        (-i / 2.0).ln() + i * z + (1.0 - (-2.0 * i * z).exp()).ln()
    }
}

/// `ln(z / sin z)`, accurate near the origin.
pub fn ln_z_over_sin(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        z_over_sin(z).ln()
    } else {
        z.ln() - ln_sin(z)
    }
}

/// Hurwitz zeta `sum_{k >= 0} (k + a)^{-p}` for `p > 1`, by summing up to a
/// shifted start and closing with Euler-Maclaurin.
pub fn hurwitz_zeta(p: f64, a: f64) -> f64 {
    const SHIFT: usize = 20;
    let mut head = 0.0;
    for k in 0..SHIFT {
        head += (k as f64 + a).powf(-p);
    }
    let n = SHIFT as f64 + a;
    // B_2/2!, B_4/4!, B_6/6!, B_8/8!
    const B: [f64; 4] = [1.0 / 12.0, -1.0 / 720.0, 1.0 / 30240.0, -1.0 / 1209600.0];
    let mut tail = n.powf(1.0 - p) / (p - 1.0) + 0.5 * n.powf(-p);
    let mut rising = p;
    let mut power = n.powf(-p - 1.0);
    for (j, b) in B.iter().enumerate() {
        tail += b * rising * power;
        let q = (2 * j + 1) as f64;
        rising *= (p + q) * (p + q + 1.0);
        power /= n * n;
    }
    head + tail
}
