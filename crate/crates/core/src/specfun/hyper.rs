use super::{beta, domain, gamma, is_nonpositive_integer, rgamma, Result, SeriesControl, SpecialError};
use crate::quadrature::{integrate, QuadOptions};

/// Gauss series Σ (a)_k (b)_k / ((c)_k k!) z^k, stopped once the geometric
/// tail bound of the remaining terms drops below tolerance.
fn series(a: f64, b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..ctl.max_terms {
        let kf = k as f64;
        let ratio = (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        term *= ratio;
        sum += term;
        if term == 0.0 {
            return Ok(sum);
        }
        // Past the peak the terms shrink at least geometrically with the
        // asymptotic ratio |z|, so the tail is bounded by term·|z|/(1−|z|).
        if ratio.abs() < 1.0 && kf > (a.abs() + b.abs() + c.abs()) {
            let tail = term.abs() / (1.0 - z.abs()).max(f64::EPSILON);
            if ctl.converged(tail, sum) {
                return Ok(sum);
            }
        }
    }
    Err(SpecialError::NonConvergence { function: "hyp2f1", terms: ctl.max_terms })
}

/// Finite sum when a is a non-positive integer.
fn polynomial(a: f64, b: f64, c: f64, z: f64) -> f64 {
    let m = (-a).round() as usize;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 0..m {
        let kf = k as f64;
        term *= (a + kf) * (b + kf) / ((c + kf) * (kf + 1.0)) * z;
        sum += term;
    }
    sum
}

/// 2F1 for w in (0, 1).
fn positive_arg(a: f64, b: f64, c: f64, w: f64, ctl: &SeriesControl) -> Result<f64> {
    if w <= 0.5 {
        return series(a, b, c, w, ctl);
    }
    let d = c - a - b;
    if (d - d.round()).abs() > 1e-6 {
        // Connection formula to 1 − w.
        let t = 1.0 - w;
        let mut out = 0.0;
        let c1 = gamma(c) * gamma(d) * rgamma(c - a) * rgamma(c - b);
        if c1 != 0.0 {
            out += c1 * series(a, b, a + b - c + 1.0, t, ctl)?;
        }
        let c2 = gamma(c) * gamma(-d) * rgamma(a) * rgamma(b);
        if c2 != 0.0 {
            out += c2 * t.powf(d) * series(c - a, c - b, d + 1.0, t, ctl)?;
        }
        return Ok(out);
    }
    // Integer or near-integer c − a − b: the connection formula degenerates,
    // so sum at w directly, after an Euler transform when that makes the
    // coefficients decay.
    if d < 0.0 {
        Ok((1.0 - w).powf(d) * series(c - a, c - b, c, w, ctl)?)
    } else {
        series(a, b, c, w, ctl)
    }
}

/// Gauss hypergeometric function with default series control.
pub fn hyp2f1(a: f64, b: f64, c: f64, z: f64) -> Result<f64> {
    hyp2f1_with(a, b, c, z, &SeriesControl::default())
}

/// Gauss hypergeometric function ₂F₁(a, b; c; z) for real z < 1 (and z = 1
/// when c − a − b > 0).
pub fn hyp2f1_with(a: f64, b: f64, c: f64, z: f64, ctl: &SeriesControl) -> Result<f64> {
    if [a, b, c, z].iter().any(|v| !v.is_finite()) {
        return Err(domain("hyp2f1", format!("non-finite input ({a}, {b}; {c}; {z})")));
    }
    let a_term = is_nonpositive_integer(a);
    let b_term = is_nonpositive_integer(b);
    if is_nonpositive_integer(c) {
        // Only a polynomial that stops before the pole is well defined.
        let ok = (a_term && a > c) || (b_term && b > c);
        if !ok {
            return Err(SpecialError::Pole { function: "hyp2f1", c });
        }
    }
    if a_term || b_term {
        let (p, q) = match (a_term, b_term) {
            (true, true) => if a >= b { (a, b) } else { (b, a) },
            (true, false) => (a, b),
            _ => (b, a),
        };
        return Ok(polynomial(p, q, c, z));
    }
    if z == 0.0 {
        return Ok(1.0);
    }
    if z >= 1.0 {
        if z == 1.0 && c - a - b > 0.0 {
            return Ok(gamma(c) * gamma(c - a - b) * rgamma(c - a) * rgamma(c - b));
        }
        return Err(domain("hyp2f1", format!("z = {z} outside the real cut-free domain")));
    }
    if z > 0.0 {
        return positive_arg(a, b, c, z, ctl);
    }
    if z >= -0.5 && a.abs().max(b.abs()) <= 2.0 {
        return series(a, b, c, z, ctl);
    }
    // Pfaff transformation onto w = z/(z−1) ∈ (0,1); pick the variant whose
    // series has non-negative coefficients when there is one.
    let w = z / (z - 1.0);
    let first_ok = c - b >= 0.0 && a >= 0.0;
    let second_ok = c - a >= 0.0 && b >= 0.0;
    if first_ok || !second_ok {
        Ok((1.0 - z).powf(-a) * positive_arg(a, c - b, c, w, ctl)?)
    } else {
        Ok((1.0 - z).powf(-b) * positive_arg(c - a, b, c, w, ctl)?)
    }
}

/// Incomplete Beta function B(z; a, b) = ∫_0^z t^(a−1) (1−t)^(b−1) dt for
/// z ∈ [0, 1], a > 0 and any real b (z < 1 when b ≤ 0).
pub fn beta_inc(z: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !b.is_finite() {
        return Err(domain("beta_inc", format!("need a > 0, got a = {a}, b = {b}")));
    }
    if !(0.0..=1.0).contains(&z) {
        return Err(domain("beta_inc", format!("z = {z} outside [0, 1]")));
    }
    if z == 0.0 {
        return Ok(0.0);
    }
    if b > 0.0 {
        if z == 1.0 {
            return Ok(beta(a, b));
        }
        if z > 0.5 {
            return Ok(beta(a, b) - beta_inc(1.0 - z, b, a)?);
        }
    } else if z == 1.0 {
        return Err(domain("beta_inc", "divergent at z = 1 for b <= 0"));
    }
    Ok(z.powf(a) / a * hyp2f1(a, 1.0 - b, a + 1.0, z)?)
}

/// ∫_0^r u^(a−1) (1+u)^(b−1) du for r ∈ [0, ∞], a > 0.
///
/// This is the incomplete Beta function at the negative argument −r with
/// its complex phase stripped: B(−r; a, b) = (−1)^a ∫_0^r u^(a−1)(1+u)^(b−1) du.
/// For r > 1 with a convergent total (a + b < 1) the value is the total
/// B(a, 1−a−b) minus the tail, which is again of this form in 1/r.
pub fn beta_inc_negarg(r: f64, a: f64, b: f64) -> Result<f64> {
    if !(a > 0.0) || !b.is_finite() {
        return Err(domain("beta_inc_negarg", format!("need a > 0, got a = {a}, b = {b}")));
    }
    if r.is_nan() || r < 0.0 {
        return Err(domain("beta_inc_negarg", format!("r = {r} must be non-negative")));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    let convergent = a + b < 1.0;
    if r.is_infinite() {
        if convergent {
            return Ok(beta(a, 1.0 - a - b));
        }
        return Err(domain("beta_inc_negarg", "divergent integral at infinity"));
    }
    if r > 1.0 && convergent {
        let total = beta(a, 1.0 - a - b);
        return Ok(total - beta_inc_negarg(1.0 / r, 1.0 - a - b, b)?);
    }
    Ok(r.powf(a) / a * hyp2f1(a, 1.0 - b, a + 1.0, -r)?)
}

/// ∫_r^∞ u^(a−1) (1+u)^(b−1) du, the upper tail of [`beta_inc_negarg`],
/// computed directly rather than by subtraction.
pub fn beta_tail_negarg(r: f64, a: f64, b: f64) -> Result<f64> {
    if !(a + b < 1.0) {
        return Err(domain("beta_tail", "tail diverges unless a + b < 1"));
    }
    if r.is_nan() || r < 0.0 {
        return Err(domain("beta_tail", format!("r = {r} must be non-negative")));
    }
    if r == 0.0 {
        if !(a > 0.0) {
            return Err(domain("beta_tail", "a must be positive when r = 0"));
        }
        return Ok(beta(a, 1.0 - a - b));
    }
    if r.is_infinite() {
        return Ok(0.0);
    }
    if r < 1.0 && a > 0.0 {
        return Ok(beta(a, 1.0 - a - b) - beta_inc_negarg(r, a, b)?);
    }
    beta_inc_negarg(1.0 / r, 1.0 - a - b, b)
}

/// Appell F₁(a; b1, b2; c; x, y) for x, y < 1 and c > a > 0, from its Euler
/// integral representation.
pub fn appell_f1(a: f64, b1: f64, b2: f64, c: f64, x: f64, y: f64) -> Result<f64> {
    if !(a > 0.0 && c > a) {
        return Err(domain("appell_f1", format!("need c > a > 0, got a = {a}, c = {c}")));
    }
    if !(x < 1.0 && y < 1.0) || !x.is_finite() || !y.is_finite() {
        return Err(domain("appell_f1", format!("need x, y < 1, got x = {x}, y = {y}")));
    }
    if x == 0.0 && y == 0.0 {
        return Ok(1.0);
    }
    if y == 0.0 || b2 == 0.0 {
        return hyp2f1(a, b1, c, x);
    }
    if x == 0.0 || b1 == 0.0 {
        return hyp2f1(a, b2, c, y);
    }
    let e = c - a;
    let smooth = |t: f64| (1.0 - x * t).powf(-b1) * (1.0 - y * t).powf(-b2);
    let opts = QuadOptions { rel_tol: 1e-13, abs_tol: 0.0, ..QuadOptions::default() };
    let fail = |e: crate::quadrature::QuadError| SpecialError::Quadrature {
        function: "appell_f1",
        detail: e.to_string(),
    };
    // t = s^(1/a) on [0, 1/2] absorbs t^(a−1); t = 1 − v^(1/e) on [1/2, 1]
    // absorbs (1−t)^(e−1).
    let left = integrate(
        |s| {
            let t = s.powf(1.0 / a);
            (1.0 - t).powf(e - 1.0) * smooth(t)
        },
        0.0,
        0.5f64.powf(a),
        &opts,
    )
    .map_err(fail)?
    .value
        / a;
    let right = integrate(
        |v| {
            let t = 1.0 - v.powf(1.0 / e);
            t.powf(a - 1.0) * smooth(t)
        },
        0.0,
        0.5f64.powf(e),
        &opts,
    )
    .map_err(fail)?
    .value
        / e;
    Ok((left + right) / beta(a, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn log_identity() {
        // 2F1(1,1;2;z) = −ln(1−z)/z
        assert_relative_eq!(hyp2f1(1.0, 1.0, 2.0, 0.5).unwrap(), 1.386_294_361_1, max_relative = 1e-10);
        for &z in &[-30.0, -3.0, -0.9, -0.2, 0.3, 0.7, 0.95] {
            let want = -(1.0f64 - z).ln() / z;
            assert_relative_eq!(hyp2f1(1.0, 1.0, 2.0, z).unwrap(), want, max_relative = 1e-13);
        }
    }

    #[test]
    fn arctan_and_arcsin_identities() {
        // 2F1(1/2,1;3/2;−x²) = atan(x)/x, 2F1(1/2,1/2;3/2;x²) = asin(x)/x
        for &x in &[0.1, 0.6, 1.0, 2.5, 10.0] {
            let z: f64 = -x * x;
            assert_relative_eq!(hyp2f1(0.5, 1.0, 1.5, z).unwrap(), x.atan() / x, max_relative = 1e-13);
        }
        for &x in &[0.2f64, 0.75, 0.9, 0.99] {
            assert_relative_eq!(hyp2f1(0.5, 0.5, 1.5, x * x).unwrap(), x.asin() / x, max_relative = 1e-12);
        }
    }

    #[test]
    fn binomial_and_polynomial_cases() {
        // 2F1(a,b;b;z) = (1−z)^(−a)
        for &z in &[-5.0, -0.7, 0.4, 0.8] {
            assert_relative_eq!(hyp2f1(2.3, 1.7, 1.7, z).unwrap(), (1.0f64 - z).powf(-2.3), max_relative = 1e-12);
        }
        // terminating: 2F1(−2, b; c; z) = 1 − 2bz/c + b(b+1)z²/(c(c+1))
        let (b, c, z) = (1.5, 2.5, 3.0);
        let want = 1.0 - 2.0 * b * z / c + b * (b + 1.0) * z * z / (c * (c + 1.0));
        assert_relative_eq!(hyp2f1(-2.0, b, c, z).unwrap(), want, max_relative = 1e-14);
        assert!(matches!(hyp2f1(1.0, 1.0, -2.0, 0.3), Err(SpecialError::Pole { .. })));
        assert!(hyp2f1(1.0, 1.0, 2.0, 1.5).is_err());
    }

    #[test]
    fn gauss_sum_at_one() {
        let (a, b, c) = (0.3, 0.8, 2.9);
        let want = gamma(c) * gamma(c - a - b) / (gamma(c - a) * gamma(c - b));
        assert_relative_eq!(hyp2f1(a, b, c, 1.0).unwrap(), want, max_relative = 1e-14);
        assert_relative_eq!(hyp2f1(a, b, c, 0.999_999).unwrap(), want, max_relative = 1e-5);
    }

    #[test]
    fn integer_excess_near_one() {
        // c − a − b = 0: 2F1(1,1;2;z) already covered; here c − a − b = −1
        // 2F1(1,2;2;z) = 1/(1−z)
        assert_relative_eq!(hyp2f1(1.0, 2.0, 2.0, 0.9).unwrap(), 10.0, max_relative = 1e-12);
        assert_relative_eq!(hyp2f1(2.0, 2.0, 3.0, 0.8).unwrap(), {
            // 2F1(2,2;3;z) = 2/z² (z/(1−z) + ln(1−z))
            let z: f64 = 0.8;
            2.0 / (z * z) * (z / (1.0 - z) + (1.0 - z).ln())
        }, max_relative = 1e-11);
    }

    #[test]
    fn incomplete_beta_values() {
        assert_relative_eq!(beta_inc(0.5, 2.0, 3.0).unwrap(), 0.057_291_666_7, max_relative = 1e-9);
        // B(z;2,3) = z²/2 − 2z³/3 + z⁴/4
        for &z in &[0.1f64, 0.5, 0.8, 0.99, 1.0] {
            let want = z * z / 2.0 - 2.0 * z * z * z / 3.0 + z.powi(4) / 4.0;
            assert_relative_eq!(beta_inc(z, 2.0, 3.0).unwrap(), want, max_relative = 1e-13);
        }
        assert_relative_eq!(beta_inc(0.7, 0.4, 1.3).unwrap() + beta_inc(0.3, 1.3, 0.4).unwrap(), beta(0.4, 1.3), max_relative = 1e-13);
        assert!(beta_inc(1.2, 1.0, 1.0).is_err());
    }

    #[test]
    fn negative_argument_beta() {
        // ∫_0^r (1+u)^(−2) du = r/(1+r)
        for &r in &[0.3, 1.0, 4.0, 1e4] {
            assert_relative_eq!(beta_inc_negarg(r, 1.0, -1.0).unwrap(), r / (1.0 + r), max_relative = 1e-13);
        }
        // ∫_0^r u^(−1/2)/(1+u) du = 2 atan(√r)
        for &r in &[0.01f64, 0.5, 3.0, 250.0] {
            let want = 2.0 * r.sqrt().atan();
            assert_relative_eq!(beta_inc_negarg(r, 0.5, 0.0).unwrap(), want, max_relative = 1e-13);
            let tail = std::f64::consts::PI - want;
            assert_relative_eq!(beta_tail_negarg(r, 0.5, 0.0).unwrap(), tail, max_relative = 1e-12);
        }
        assert_relative_eq!(beta_inc_negarg(f64::INFINITY, 0.5, 0.0).unwrap(), std::f64::consts::PI, max_relative = 1e-14);
        // divergent total, polynomial growth: ∫_0^r (1+u) du
        assert_relative_eq!(beta_inc_negarg(3.0, 1.0, 2.0).unwrap(), 7.5, max_relative = 1e-13);
    }

    #[test]
    fn appell_reduces_to_gauss() {
        // F1(a; b1, b2; c; x, x) = 2F1(a, b1+b2; c; x)
        let (a, b1, b2, c) = (1.7, -0.6, 2.2, 3.1);
        for &x in &[-2.0, -0.3, 0.4, 0.85] {
            let want = hyp2f1(a, b1 + b2, c, x).unwrap();
            assert_relative_eq!(appell_f1(a, b1, b2, c, x, x).unwrap(), want, max_relative = 1e-11);
        }
    }

    #[test]
    fn appell_double_series_oracle() {
        // Direct double series Σ (a)_{m+n}(b1)_m(b2)_n/((c)_{m+n} m! n!) x^m y^n
        let (a, b1, b2, c, x, y) = (0.7, 1.3, -0.4, 2.6, 0.3, -0.45);
        let mut sum = 0.0;
        for m in 0..80 {
            for n in 0..80 {
                let mut t = 1.0;
                for i in 0..m + n {
                    t *= (a + i as f64) / (c + i as f64);
                }
                for i in 0..m {
                    t *= (b1 + i as f64) / (i as f64 + 1.0) * x;
                }
                for i in 0..n {
                    t *= (b2 + i as f64) / (i as f64 + 1.0) * y;
                }
                sum += t;
            }
        }
        assert_relative_eq!(appell_f1(a, b1, b2, c, x, y).unwrap(), sum, max_relative = 1e-11);
        assert!(appell_f1(2.0, 1.0, 1.0, 1.5, 0.1, 0.1).is_err());
    }
}
