//! Error function family for complex and real arguments.
//!
//! Everything is built on the Faddeeva function `w(z) = exp(-z²) erfc(-iz)`,
//! evaluated in the closed upper half plane with a trapezoidal sum over a
//! Gaussian-weighted Cauchy integral plus its pole correction. That sum is
//! uniformly accurate to a few ulps for every `Im z >= 0`, so no region
//! switching is needed for `w` itself. `erf` switches to a Kummer series near
//! the origin, where `1 - exp(-z²) w(iz)` would cancel.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type ComplexScalar = Complex64;

/// `2 / sqrt(pi)`.
pub const FRAC_2_SQRT_PI: f64 = std::f64::consts::FRAC_2_SQRT_PI;

/// `1 / sqrt(pi)`.
pub const FRAC_1_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Largest `|z|` accepted by [`erf_complex`].
pub const ERF_MAX_MODULUS: f64 = 50.0;

/// Largest `|x|` accepted by [`erfi_real`].
pub const ERFI_MAX_ARG: f64 = 12.0;

const STEP: f64 = 0.5;
const HALF_NODES: i32 = 15;
const SERIES_RADIUS: f64 = 1.0;

struct TrapezoidNodes {
    aligned: Vec<(f64, f64)>,
    shifted: Vec<(f64, f64)>,
}

fn nodes() -> &'static TrapezoidNodes {
    static NODES: OnceLock<TrapezoidNodes> = OnceLock::new();
    NODES.get_or_init(|| {
        let make = |offset: f64| {
            (-HALF_NODES..=HALF_NODES)
                .map(|n| {
                    let t = (n as f64 + offset) * STEP;
                    (t, (-t * t).exp())
                })
                .collect()
        };
        TrapezoidNodes { aligned: make(0.0), shifted: make(0.5) }
    })
}

/// Faddeeva function for `Im z >= 0`. Always finite there (`|w| <= 1`).
pub(crate) fn faddeeva_upper(z: Complex64) -> Complex64 {
    debug_assert!(z.im >= 0.0);
    // Pick the node lattice whose points sit furthest from Re z so that the
    // sum and the pole correction never divide by something tiny.
    let frac = (z.re / STEP).rem_euclid(1.0);
    let shifted = frac.min(1.0 - frac) < 0.25;
    let lattice = if shifted { &nodes().shifted } else { &nodes().aligned };

    let mut sum = Complex64::new(0.0, 0.0);
    for &(t, weight) in lattice {
        sum += weight / (z - t);
    }
    let mut w = Complex64::new(0.0, STEP / PI) * sum;

    if z.im < PI / STEP {
        let phase = (Complex64::new(0.0, -2.0 * PI / STEP) * z).exp();
        let denom = if shifted { 1.0 + phase } else { 1.0 - phase };
        w += 2.0 * (-z * z).exp() / denom;
    }
    w
}

/// Faddeeva function `w(z) = exp(-z²) erfc(-iz)` on the whole plane.
///
/// In the lower half plane `w` grows like `exp(|Im z|²)`; results that do not
/// fit in a double are reported as [`Error::Overflow`].
pub fn faddeeva(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain("faddeeva", format!("non-finite argument {z}")));
    }
    if z.im >= 0.0 {
        return Ok(faddeeva_upper(z));
    }
    let value = 2.0 * scaled_exp(-z * z, Complex64::new(1.0, 0.0)) - faddeeva_upper(-z);
    if value.re.is_finite() && value.im.is_finite() {
        Ok(value)
    } else {
        Err(Error::Overflow { op: "faddeeva", detail: format!("w({z}) exceeds double range") })
    }
}

/// `exp(e) * factor` without overflowing in the intermediate `exp(e)`.
fn scaled_exp(e: Complex64, factor: Complex64) -> Complex64 {
    if e.re < 700.0 || factor == Complex64::new(0.0, 0.0) {
        e.exp() * factor
    } else {
        (e + factor.ln()).exp()
    }
}

/// Kummer-transformed Maclaurin series,
/// `erf z = (2/√π) e^{-z²} Σ 2ⁿ z^{2n+1} / (2n+1)!!`.
fn erf_series(z: Complex64) -> Complex64 {
    let two_z2 = 2.0 * z * z;
    let mut term = z;
    let mut sum = z;
    for n in 1..80 {
        term *= two_z2 / (2 * n + 1) as f64;
        sum += term;
        if term.norm() <= 1e-17 * sum.norm() {
            break;
        }
    }
    FRAC_2_SQRT_PI * (-z * z).exp() * sum
}

/// erf on the closed first quadrant.
fn erf_first_quadrant(x: f64, y: f64) -> Complex64 {
    let z = Complex64::new(x, y);
    if x * x + y * y < SERIES_RADIUS * SERIES_RADIUS {
        let v = erf_series(z);
        return if y == 0.0 { Complex64::new(v.re, 0.0) } else { v };
    }
    let w = faddeeva_upper(Complex64::new(-y, x));
    let v = Complex64::new(1.0, 0.0) - scaled_exp(-z * z, w);
    if y == 0.0 {
        Complex64::new(v.re, 0.0)
    } else {
        v
    }
}

/// Error function of a complex argument.
///
/// Accepts `|z| <= 50`. Odd and conjugation symmetries are applied by
/// reflecting into the first quadrant, so `erf(-z) == -erf(z)` and
/// `erf(conj z) == conj(erf z)` hold bit for bit.
pub fn erf_complex(z: Complex64) -> Result<Complex64> {
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::domain("erf_complex", format!("non-finite argument {z}")));
    }
    if z.norm() > ERF_MAX_MODULUS {
        return Err(Error::domain(
            "erf_complex",
            format!("|z| = {} exceeds the validity window {ERF_MAX_MODULUS}", z.norm()),
        ));
    }
    let mut v = erf_first_quadrant(z.re.abs(), z.im.abs());
    if !v.re.is_finite() || !v.im.is_finite() {
        return Err(Error::Overflow { op: "erf_complex", detail: format!("erf({z}) exceeds double range") });
    }
    if z.re.is_sign_negative() != z.im.is_sign_negative() {
        v = v.conj();
    }
    if z.re.is_sign_negative() {
        v = -v;
    }
    Ok(v)
}

/// Complementary error function of a real argument.
///
/// For `x >= 1` this is `exp(-x²) Re w(ix)`, which never forms `1 - erf x`.
/// Underflows to zero beyond `x ≈ 26.6`.
pub fn erfc_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("erfc_real", format!("non-finite argument {x}")));
    }
    Ok(erfc_nonneg_or_reflect(x))
}

fn erfc_nonneg_or_reflect(x: f64) -> f64 {
    if x < 0.0 {
        return 2.0 - erfc_nonneg_or_reflect(-x);
    }
    if x < SERIES_RADIUS {
        1.0 - erf_series(Complex64::new(x, 0.0)).re
    } else {
        (-x * x).exp() * faddeeva_upper(Complex64::new(0.0, x)).re
    }
}

/// Scaled complementary error function `exp(x²) erfc(x)` for `x >= 0`.
pub(crate) fn erfcx_nonneg(x: f64) -> f64 {
    debug_assert!(x >= 0.0);
    faddeeva_upper(Complex64::new(0.0, x)).re
}

/// Imaginary error function `erfi x = -i erf(ix)` for `|x| <= 12`.
pub fn erfi_real(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::domain("erfi_real", format!("non-finite argument {x}")));
    }
    if x.abs() > ERFI_MAX_ARG {
        return Err(Error::Overflow {
            op: "erfi_real",
            detail: format!("|x| = {} exceeds the validity window {ERFI_MAX_ARG}", x.abs()),
        });
    }
    Ok(erf_complex(Complex64::new(0.0, x))?.im)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Plain Maclaurin series `(2/√π) Σ (-1)ⁿ z^{2n+1} / (n! (2n+1))`.
    fn maclaurin_erf(z: Complex64, terms: usize) -> Complex64 {
        let z2 = z * z;
        let mut power = z;
        let mut factorial = 1.0;
        let mut sum = Complex64::new(0.0, 0.0);
        for n in 0..terms {
            if n > 0 {
                power *= -z2;
                factorial *= n as f64;
            }
            sum += power / (factorial * (2 * n + 1) as f64);
        }
        FRAC_2_SQRT_PI * sum
    }

    /// erfi by its positive-term series.
    fn erfi_series(x: f64) -> f64 {
        // term_n = x^{2n+1} / n!
        let mut term = x;
        let mut sum = x;
        for n in 1..400 {
            term *= x * x / n as f64;
            sum += term / (2 * n + 1) as f64;
        }
        FRAC_2_SQRT_PI * sum
    }

    /// Asymptotic expansion of erfc for large x, truncated at the smallest term.
    fn erfc_asymptotic(x: f64) -> f64 {
        let mut term = 1.0;
        let mut sum = 1.0;
        for n in 1..200 {
            let next = term * -((2 * n - 1) as f64) / (2.0 * x * x);
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            sum += term;
        }
        (-x * x).exp() / (x * PI.sqrt()) * sum
    }

    /// Laplace continued fraction evaluated bottom-up.
    fn erfc_continued_fraction(x: f64) -> f64 {
        let mut tail = x;
        for k in (1..400).rev() {
            tail = x + (k as f64 / 2.0) / tail;
        }
        (-x * x).exp() / (PI.sqrt() * tail)
    }

    fn rel(a: Complex64, b: Complex64) -> f64 {
        (a - b).norm() / b.norm()
    }

    #[test]
    fn erf_reference_values() {
        assert_eq!(erf_complex(Complex64::new(0.0, 0.0)).unwrap(), Complex64::new(0.0, 0.0));
        let one = erf_complex(Complex64::new(1.0, 0.0)).unwrap();
        assert!((one.re - 0.842_700_792_949_714_9).abs() < 1e-15);
        assert_eq!(one.im, 0.0);
        let i = erf_complex(Complex64::new(0.0, 1.0)).unwrap();
        assert!(i.re.abs() < 1e-15);
        assert!((i.im - 1.650_425_758_797_542_9).abs() < 1e-14);
    }

    #[test]
    fn erf_matches_high_precision_values_off_axis() {
        // 30-digit reference values.
        let cases = [
            (Complex64::new(2.0, 1.0), Complex64::new(1.003_606_342_725_651_8, -0.011_259_006_028_815_025)),
            (Complex64::new(0.3, -2.5), Complex64::new(114.494_509_474_596_58, -26.191_395_067_040_959)),
        ];
        for (z, expected) in cases {
            let got = erf_complex(z).unwrap();
            assert!(rel(got, expected) < 1e-13, "erf({z}) = {got}, expected {expected}");
        }
    }

    #[test]
    fn erf_agrees_with_maclaurin_oracle_inside_radius_three() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let mut worst = 0.0_f64;
        for _ in 0..5000 {
            let r = 3.0 * rng.random::<f64>().sqrt();
            let phi = rng.random_range(-PI..PI);
            let z = Complex64::from_polar(r, phi);
            let got = erf_complex(z).unwrap();
            let oracle = maclaurin_erf(z, 60);
            worst = worst.max(rel(got, oracle));
        }
        assert!(worst < 1e-12, "worst relative deviation {worst:e}");
    }

    #[test]
    fn erf_is_odd_and_conjugation_symmetric() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10_000 {
            let r = 10.0 * rng.random::<f64>().sqrt();
            let z = Complex64::from_polar(r, rng.random_range(-PI..PI));
            let v = erf_complex(z).unwrap();
            let odd = erf_complex(-z).unwrap();
            let conj = erf_complex(z.conj()).unwrap();
            assert!((odd + v).norm() <= 1e-14, "oddness at {z}");
            assert!((conj - v.conj()).norm() <= 1e-14, "conjugation at {z}");
        }
    }

    #[test]
    fn erf_on_real_axis_is_real_and_complements_erfc() {
        for k in -400..=400 {
            let x = k as f64 * 0.015;
            let v = erf_complex(Complex64::new(x, 0.0)).unwrap();
            assert!(v.im.abs() <= 1e-15);
            assert!((v.re - (1.0 - erfc_real(x).unwrap())).abs() <= 1e-13, "x = {x}");
        }
    }

    #[test]
    fn erf_rejects_outside_window() {
        assert!(matches!(erf_complex(Complex64::new(f64::NAN, 0.0)), Err(Error::Domain { .. })));
        assert!(matches!(erf_complex(Complex64::new(40.0, 40.0)), Err(Error::Domain { .. })));
        assert!(matches!(erf_complex(Complex64::new(1.0, 45.0)), Err(Error::Overflow { .. })));
        // Large real part stays finite anywhere in the window.
        assert_eq!(erf_complex(Complex64::new(49.0, 0.5)).unwrap(), Complex64::new(1.0, 0.0));
    }

    #[test]
    fn erfc_reference_values() {
        assert_eq!(erfc_real(0.0).unwrap(), 1.0);
        assert!((erfc_real(1.0).unwrap() - 0.157_299_207_050_285_1).abs() < 1e-16);
        let ten = erfc_real(10.0).unwrap();
        let asym = erfc_asymptotic(10.0);
        let cf = erfc_continued_fraction(10.0);
        assert!(((asym - cf) / cf).abs() < 1e-14);
        assert!(((ten - cf) / cf).abs() < 1e-13);
        assert!(((ten - 2.088_487_583_762_545e-45) / ten).abs() < 1e-13);
    }

    #[test]
    fn erfc_large_branch_tracks_continued_fraction() {
        for k in 0..=60 {
            let x = 5.0 + 0.25 * k as f64;
            let got = erfc_real(x).unwrap();
            let cf = erfc_continued_fraction(x);
            assert!(((got - cf) / cf).abs() < 1e-13, "x = {x}");
            assert!(got > 0.0 && got < 2.0);
        }
        assert!((erfc_real(-3.0).unwrap() + erfc_real(3.0).unwrap() - 2.0).abs() < 1e-15);
        assert!(erfc_real(f64::INFINITY).is_err());
    }

    #[test]
    fn erfi_reference_values() {
        assert_eq!(erfi_real(0.0).unwrap(), 0.0);
        let oracle = erfi_series(1.0);
        assert!((oracle - 1.650_425_758_797_542_9).abs() < 1e-15);
        assert!((erfi_real(1.0).unwrap() - oracle).abs() < 1e-14);
        assert_eq!(erfi_real(-1.0).unwrap(), -erfi_real(1.0).unwrap());
        for k in 1..=24 {
            let x = 0.5 * k as f64;
            let got = erfi_real(x).unwrap();
            let oracle = erfi_series(x);
            assert!(((got - oracle) / oracle).abs() < 1e-13, "x = {x}: {got} vs {oracle}");
        }
        assert!(matches!(erfi_real(12.5), Err(Error::Overflow { .. })));
    }

    #[test]
    fn faddeeva_reflection_into_lower_half_plane() {
        let z = Complex64::new(0.7, -0.4);
        let w = faddeeva(z).unwrap();
        // w(z) = exp(-z²) erfc(-iz) = exp(-z²) (1 - erf(-iz)).
        let direct = (-z * z).exp() * (1.0 - erf_complex(Complex64::new(0.0, -1.0) * z).unwrap());
        assert!(rel(w, direct) < 1e-14);
        assert!(faddeeva(Complex64::new(0.0, -40.0)).is_err());
        // Purely imaginary argument gives the scaled complementary function.
        let x: f64 = 2.5;
        let expected = (x * x).exp() * erfc_real(x).unwrap();
        assert!((erfcx_nonneg(x) - expected).abs() < 1e-15);
    }
}
