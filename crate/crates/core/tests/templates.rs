use iemgof::nulldist::covariance_kernel;
use iemgof::numeric::integrate_breaks;
use iemgof::polybasis::{legendre_integrated_value, legendre_value};
use iemgof::templates::{template_eval, template_orthogonality_defect};
use iemgof::Family;
use proptest::prelude::*;

#[test]
fn point_values() {
    assert!((template_eval(Family::Gad, 1, 0.2, 0.5).unwrap() - 0.5).abs() < 1e-15);
    assert!((template_eval(Family::Gw, 1, 0.2, 0.5).unwrap() - 0.2).abs() < 1e-15);
    assert!((template_eval(Family::Gcvm, 1, 0.7, 0.5).unwrap() + 0.5).abs() < 1e-15);
}

#[test]
fn truncation_is_empty_at_first_order() {
    for (t, x) in [(0.1, 0.4), (0.8, 0.3), (0.5, 0.5)] {
        assert_eq!(template_eval(Family::Gw, 1, t, x).unwrap(), template_eval(Family::GwTrunc, 1, t, x).unwrap());
        assert_eq!(template_eval(Family::Gcvm, 1, t, x).unwrap(), template_eval(Family::GcvmTrunc, 1, t, x).unwrap());
    }
}

#[test]
fn rejects_bad_arguments() {
    assert!(template_eval(Family::Gad, 0, 0.2, 0.5).is_err());
    assert!(template_eval(Family::Gad, 1, -0.1, 0.5).is_err());
    assert!(template_eval(Family::Gw, 1, 0.2, 1.5).is_err());
}

#[test]
fn moment_defects() {
    assert!(template_orthogonality_defect(Family::Gad, 2, 0.3, 1).unwrap().abs() < 1e-10);
    assert!(template_orthogonality_defect(Family::Gad, 1, 0.5, 0).unwrap().abs() < 1e-12);
    assert!(template_orthogonality_defect(Family::Gw, 3, 0.8, 0).unwrap().abs() < 1e-10);
    for m in 1..=5 {
        for j in 0..m {
            for x in [0.05, 0.37, 0.91] {
                let d = template_orthogonality_defect(Family::Gad, m, x, j).unwrap();
                assert!(d.abs() < 1e-10, "m={m} j={j} x={x}: {d}");
            }
        }
        for family in [Family::Gw, Family::GwTrunc, Family::Gcvm, Family::GcvmTrunc] {
            let d = template_orthogonality_defect(family, m, 0.62, 0).unwrap();
            assert!(d.abs() < 1e-10, "{family} m={m}: {d}");
        }
    }
    // Degree m is no longer annihilated.
    assert!(template_orthogonality_defect(Family::Gad, 1, 0.3, 1).unwrap().abs() > 1e-3);
}

// Jump of the (m-1)-st t-derivative across t = x, by one-sided differences.
fn derivative_jump(m: usize, x: f64, h: f64) -> f64 {
    let f = |t: f64| template_eval(Family::Gad, m, t, x).unwrap();
    let one_sided = |dir: f64| -> f64 {
        // Forward differences of order m-1 starting at x + dir * h.
        let order = m - 1;
        let mut acc = 0.0;
        for i in 0..=order {
            let c = (0..i).fold(1.0, |c, j| c * (order - j) as f64 / (j + 1) as f64);
            let sign = if (order - i) % 2 == 1 { -1.0 } else { 1.0 };
            acc += sign * c * f(x + dir * (h + i as f64 * h));
        }
        acc / (dir * h).powi(order as i32)
    };
    one_sided(-1.0) - one_sided(1.0)
}

#[test]
fn gad_smoothness_at_the_diagonal() {
    for (m, h, tol) in [(1, 1e-9, 1e-6), (2, 1e-6, 1e-4), (3, 1e-4, 2e-3)] {
        for x in [0.3, 0.55] {
            let jump = derivative_jump(m, x, h);
            let expected = if m % 2 == 0 { -1.0 } else { 1.0 };
            assert!((jump - expected).abs() < tol, "m={m} x={x}: {jump}");
        }
    }
    // Continuity for m >= 2.
    for m in 2..=4 {
        let x = 0.4;
        let l = template_eval(Family::Gad, m, x - 1e-12, x).unwrap();
        let r = template_eval(Family::Gad, m, x + 1e-12, x).unwrap();
        assert!((l - r).abs() < 1e-10);
    }
}

#[test]
fn gad_eigen_expansion_converges() {
    for m in 1..=2 {
        let mut prev = f64::INFINITY;
        for terms in [10usize, 40, 160] {
            let mut sq = 0.0;
            let grid = 40;
            for i in 0..grid {
                for j in 0..grid {
                    let t = (i as f64 + 0.5) / grid as f64;
                    let x = (j as f64 + 0.5) / grid as f64;
                    let partial: f64 = (m..m + terms)
                        .map(|k| legendre_value(k, t) * legendre_integrated_value(k, m, x))
                        .sum();
                    sq += (template_eval(Family::Gad, m, t, x).unwrap() - partial).powi(2);
                }
            }
            let l2 = (sq / (grid * grid) as f64).sqrt();
            assert!(l2 <= 2.0 * (terms as f64).powf(-0.5), "m={m} K={terms}: {l2}");
            assert!(l2 < prev);
            prev = l2;
        }
    }
}

#[test]
fn gcvm_reflection_grid() {
    for family in [Family::Gcvm, Family::GcvmTrunc] {
        for m in 1..=4 {
            let sign = if m % 2 == 1 { -1.0 } else { 1.0 };
            for i in 0..50 {
                for j in 0..50 {
                    let t = i as f64 / 49.0;
                    let x = j as f64 / 49.0;
                    if t == x {
                        continue;
                    }
                    let a = template_eval(family, m, 1.0 - t, 1.0 - x).unwrap();
                    let b = template_eval(family, m, t, x).unwrap();
                    assert!((a - sign * b).abs() < 1e-12, "{family} m={m} t={t} x={x}");
                }
            }
        }
    }
}

#[test]
fn covariance_reproduction() {
    let grid = [0.07, 0.3, 0.52, 0.81];
    for family in Family::ALL {
        for m in 1..=3 {
            for &x in &grid {
                for &y in &grid {
                    let (lo, hi) = if x < y { (x, y) } else { (y, x) };
                    let r = integrate_breaks(
                        |t| template_eval(family, m, t, x).unwrap() * template_eval(family, m, t, y).unwrap(),
                        &[0.0, lo, hi, 1.0],
                        1e-14,
                        1e-12,
                    );
                    let mut k = covariance_kernel(family, m, x, y).unwrap();
                    if family == Family::Gad {
                        // The GAD kernel is that of the weighted process.
                        k *= (x * (1.0 - x) * y * (1.0 - y)).powf(m as f64 / 2.0);
                    }
                    assert!((r.value - k).abs() < 1e-8, "{family} m={m} ({x},{y}): {} vs {k}", r.value);
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn watson_shift(m in 1usize..=4, t in 0.0f64..1.0, x in 0.0f64..1.0, a in 0.0f64..1.0, trunc: bool) {
        let family = if trunc { Family::GwTrunc } else { Family::Gw };
        let shifted = |v: f64| (v + a).fract();
        let (ts, xs) = (shifted(t), shifted(x));
        // Exclude draws where rounding flips the order of t and x.
        prop_assume!((t - x).abs() > 1e-9 && (ts - xs).abs() > 1e-9);
        let lhs = template_eval(family, m, t, x).unwrap();
        let rhs = template_eval(family, m, ts, xs).unwrap();
        prop_assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn gad_template_is_orthogonal_to_constants(m in 1usize..=6, x in 0.01f64..0.99) {
        prop_assert!(template_orthogonality_defect(Family::Gad, m, x, 0).unwrap().abs() < 1e-10);
    }
}
