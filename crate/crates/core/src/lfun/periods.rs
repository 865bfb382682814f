use std::f64::consts::PI;

use super::{EllipticCurveData, LfunError};

pub fn agm(mut a: f64, mut b: f64) -> f64 {
    for _ in 0..64 {
        if (a - b).abs() <= 1e-16 * a.abs() {
            break;
        }
        (a, b) = (0.5 * (a + b), (a * b).sqrt());
    }
    0.5 * (a + b)
}

/// Real roots of `4x³ + b2 x² + 2b4 x + b6`, decreasing.
fn real_roots(e: &EllipticCurveData) -> Vec<f64> {
    let (b2, b4, b6) = (e.b2() as f64, e.b4() as f64, e.b6() as f64);
    let f = |x: f64| ((4.0 * x + b2) * x + 2.0 * b4) * x + b6;
    let df = |x: f64| (12.0 * x + 2.0 * b2) * x + 2.0 * b4;
    // x³ + A x² + B x + C
    let (a, b, c) = (b2 / 4.0, b4 / 2.0, b6 / 4.0);
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = q * q / 4.0 + p * p * p / 27.0;
    let shift = -a / 3.0;
    let mut roots = if disc < 0.0 {
        let r = (-p / 3.0).sqrt();
        let phi = (-q / (2.0 * r * r * r)).clamp(-1.0, 1.0).acos();
        (0..3)
            .map(|k| 2.0 * r * ((phi + 2.0 * PI * k as f64) / 3.0).cos() + shift)
            .collect::<Vec<_>>()
    } else {
        let s = disc.sqrt();
        vec![(-q / 2.0 + s).cbrt() + (-q / 2.0 - s).cbrt() + shift]
    };
    for x in roots.iter_mut() {
        for _ in 0..8 {
            let d = df(*x);
            if d == 0.0 {
                break;
            }
            let step = f(*x) / d;
            *x -= step;
            if step.abs() <= 1e-17 * x.abs().max(1.0) {
                break;
            }
        }
    }
    roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
    roots
}

/// `(Ω₊, |Ω₋|)`: generators of `Λ ∩ ℝ` and `Λ ∩ iℝ` for the period lattice
/// of the invariant differential, by AGM.
pub fn compute_periods(e: &EllipticCurveData) -> Result<(f64, f64), LfunError> {
    let disc = e.discriminant();
    if disc == 0 {
        return Err(LfunError::SingularCurve(e.label.clone()));
    }
    let roots = real_roots(e);
    if disc > 0 {
        let (e1, e2, e3) = (roots[0], roots[1], roots[2]);
        let w1 = PI / agm((e1 - e3).sqrt(), (e1 - e2).sqrt());
        let w2 = PI / agm((e1 - e3).sqrt(), (e2 - e3).sqrt());
        Ok((w1, w2))
    } else {
        let e1 = roots[0];
        let b2 = e.b2() as f64;
        let b4 = e.b4() as f64;
        let a = 3.0 * e1 + b2 / 4.0;
        let b = (3.0 * e1 * e1 + b2 / 2.0 * e1 + b4 / 2.0).sqrt();
        let w1 = 2.0 * PI / agm(2.0 * b.sqrt(), (2.0 * b + a).sqrt());
        // ω₂ = -ω₁/2 + iπ/AGM(2√b, √(2b - a)); Λ ∩ iℝ is spanned by ω₁ + 2ω₂.
        let w_im = 2.0 * PI / agm(2.0 * b.sqrt(), (2.0 * b - a).sqrt());
        Ok((w1, w_im))
    }
}
