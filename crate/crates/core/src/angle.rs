//! The half kite angle f_θ(x) = −arg(1 − e^{x+iθ}) and its derivative.

use crate::error::{Error, Result};
use std::f64::consts::PI;

fn check_theta(theta: f64) -> Result<()> {
    if theta.is_finite() && theta > 0.0 && theta < PI {
        Ok(())
    } else {
        Err(Error::Domain(format!("theta = {theta} not in (0, pi)")))
    }
}

/// f_θ(x) without domain checks. Values lie in (0, π).
pub fn f_theta(x: f64, theta: f64) -> f64 {
    if x > 0.0 {
        // functional equation keeps e^x bounded
        return PI - theta - f_theta(-x, theta);
    }
    let e = x.exp();
    (e * theta.sin()).atan2(1.0 - e * theta.cos())
}

/// f′_θ(x) = sin θ / (2 (cosh x − cos θ)).
pub fn f_theta_prime(x: f64, theta: f64) -> f64 {
    let c = x.cosh();
    if !c.is_finite() {
        return 0.0;
    }
    theta.sin() / (2.0 * (c - theta.cos()))
}

/// Checked entry point: `order` 0 gives f_θ(x), order 1 gives f′_θ(x).
pub fn angle_function(x: f64, theta: f64, order: u8) -> Result<f64> {
    check_theta(theta)?;
    if !x.is_finite() {
        return Err(Error::Domain(format!("x = {x} is not finite")));
    }
    match order {
        0 => Ok(f_theta(x, theta)),
        1 => Ok(f_theta_prime(x, theta)),
        o => Err(Error::Domain(format!("order {o} not in {{0, 1}}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn oracle(x: f64, theta: f64) -> f64 {
        -(Complex64::new(1.0, 0.0) - Complex64::new(x, theta).exp()).arg()
    }

    #[test]
    fn examples() {
        assert!((angle_function(0.0, PI / 2.0, 0).unwrap() - PI / 4.0).abs() < 1e-15);
        let v = angle_function(2f64.ln(), PI / 2.0, 0).unwrap();
        assert!((v - 2f64.atan()).abs() < 1e-14);
        assert!((v - oracle(2f64.ln(), PI / 2.0)).abs() < 1e-14);
        assert!((angle_function(0.0, PI / 2.0, 1).unwrap() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn domain() {
        assert!(angle_function(0.0, 0.0, 0).is_err());
        assert!(angle_function(0.0, PI, 0).is_err());
        assert!(angle_function(f64::NAN, 1.0, 0).is_err());
        assert!(angle_function(0.0, 1.0, 2).is_err());
    }

    #[test]
    fn large_arguments_stay_in_range() {
        for &x in &[-800.0, -50.0, 50.0, 800.0] {
            let v = f_theta(x, 1.0);
            assert!(v.is_finite() && (0.0..=PI).contains(&v));
        }
        assert!((f_theta(800.0, 1.0) - (PI - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn matches_complex_log_for_negative_x() {
        for i in 0..50 {
            let x = -5.0 + 0.1 * i as f64;
            let t = 0.05 + 3.0 * (i as f64) / 50.0;
            assert!((f_theta(x, t) - oracle(x, t)).abs() < 1e-13);
        }
    }
}
