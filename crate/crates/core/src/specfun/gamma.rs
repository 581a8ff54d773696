use std::f64::consts::PI;

use super::{is_nonpositive_integer, Result, SpecialError};

const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Exact factorials up to 170! fit in f64; small integer arguments of the
/// Gamma function are served from here.
fn factorial_table() -> &'static [f64; 171] {
    use std::sync::OnceLock;
    static TABLE: OnceLock<[f64; 171]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; 171];
        for k in 1..171 {
            t[k] = t[k - 1] * k as f64;
        }
        t
    })
}

/// Euler Gamma function. Returns `±inf` at the poles.
pub fn gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x == x.round() {
        if x <= 0.0 {
            return f64::INFINITY;
        }
        if x <= 171.0 {
            return factorial_table()[x as usize - 1];
        }
        return f64::INFINITY;
    }
    if x < 0.5 {
        return PI / ((PI * x).sin() * gamma(1.0 - x));
    }
    if x > 171.7 {
        return f64::INFINITY;
    }
    let xm = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = xm + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (xm + i as f64);
    }
    // Split the power to keep t^(xm+0.5) finite near the top of the range.
    let half = t.powf(0.5 * (xm + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * acc
}

/// ln|Γ(x)|.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if is_nonpositive_integer(x) {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    if x < 20.0 {
        return gamma(x).abs().ln();
    }
    let xm = x - 1.0;
    let mut acc = LANCZOS[0];
    let t = xm + LANCZOS_G + 0.5;
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (xm + i as f64);
    }
    0.5 * (2.0 * PI).ln() + (xm + 0.5) * t.ln() - t + acc.ln()
}

/// 1/Γ(x), which is entire: zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        0.0
    } else {
        1.0 / gamma(x)
    }
}

/// Complete Beta function B(a, b) = Γ(a)Γ(b)/Γ(a+b).
pub fn beta(a: f64, b: f64) -> f64 {
    if a > 0.0 && b > 0.0 && a + b > 40.0 {
        return (ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)).exp();
    }
    gamma(a) * gamma(b) * rgamma(a + b)
}

/// Barnes G-function at a positive integer: G(1) = G(2) = 1 and
/// G(n+1) = Γ(n) G(n).
pub fn barnes_g(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(super::domain("barnes_g", "n must be >= 1"));
    }
    let mut g = 1.0_f64;
    for k in 1..n.saturating_sub(1) {
        g *= gamma(k as f64 + 1.0);
        if !g.is_finite() {
            return Err(SpecialError::Overflow { function: "barnes_g" });
        }
    }
    Ok(g)
}

/// ln G(n), usable where [`barnes_g`] overflows.
pub fn ln_barnes_g(n: u32) -> Result<f64> {
    if n == 0 {
        return Err(super::domain("ln_barnes_g", "n must be >= 1"));
    }
    Ok((1..n.saturating_sub(1)).map(|k| ln_gamma(k as f64 + 1.0)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gamma_known_values() {
        assert_eq!(gamma(1.0), 1.0);
        assert_eq!(gamma(5.0), 24.0);
        assert_relative_eq!(gamma(0.5), PI.sqrt(), max_relative = 1e-15);
        assert_relative_eq!(gamma(2.5), 0.75 * PI.sqrt(), max_relative = 1e-14);
        assert_relative_eq!(gamma(-0.5), -2.0 * PI.sqrt(), max_relative = 1e-14);
        assert!(gamma(0.0).is_infinite());
        assert!(gamma(-3.0).is_infinite());
    }

    #[test]
    fn ln_gamma_matches_gamma() {
        for &x in &[0.1, 0.7, 3.3, 12.5, 19.9, 25.0, 60.5] {
            assert_relative_eq!(ln_gamma(x), gamma(x).ln(), max_relative = 1e-13);
        }
        assert_relative_eq!(ln_gamma(-2.5), gamma(-2.5).abs().ln(), max_relative = 1e-13);
    }

    #[test]
    fn recurrence_holds_off_integers() {
        for &x in &[0.3, 1.7, 4.2, 9.9] {
            assert_relative_eq!(gamma(x + 1.0), x * gamma(x), max_relative = 1e-14);
        }
    }

    #[test]
    fn rgamma_vanishes_at_poles() {
        assert_eq!(rgamma(0.0), 0.0);
        assert_eq!(rgamma(-4.0), 0.0);
        assert_relative_eq!(rgamma(3.0), 0.5);
    }

    #[test]
    fn barnes_g_values() {
        assert_eq!(barnes_g(1).unwrap(), 1.0);
        assert_eq!(barnes_g(2).unwrap(), 1.0);
        assert_eq!(barnes_g(3).unwrap(), 1.0);
        assert_eq!(barnes_g(4).unwrap(), 2.0);
        // Γ(1)Γ(2)Γ(3)Γ(4)Γ(5) = 1·1·2·6·24
        assert_eq!(barnes_g(6).unwrap(), 288.0);
        assert!(barnes_g(0).is_err());
        assert_relative_eq!(ln_barnes_g(6).unwrap(), 288f64.ln(), max_relative = 1e-14);
        assert!(barnes_g(200).is_err());
        assert!(ln_barnes_g(200).unwrap().is_finite());
    }

    #[test]
    fn beta_symmetry_and_value() {
        assert_relative_eq!(beta(2.0, 3.0), 1.0 / 12.0, max_relative = 1e-15);
        assert_relative_eq!(beta(0.3, 4.1), beta(4.1, 0.3), max_relative = 1e-14);
        assert_relative_eq!(beta(30.0, 25.5), gamma(30.0) * gamma(25.5) / gamma(55.5), max_relative = 1e-12);
    }
}
