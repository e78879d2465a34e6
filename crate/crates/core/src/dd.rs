//! Double-double helpers.
//!
//! The Z^γ recursions amplify rounding noise geometrically with the number of
//! generations, so they run in ~106-bit arithmetic. Only the arithmetic of
//! `twofloat` is used; the trig functions below are evaluated by Taylor series
//! because the library versions lose a few bits.

use num_complex::{Complex, Complex64};
use twofloat::TwoFloat;

pub type Dd = TwoFloat;
pub type Cdd = Complex<TwoFloat>;

pub fn dd(x: f64) -> Dd {
    TwoFloat::from(x)
}

pub fn cdd(z: Complex64) -> Cdd {
    Complex::new(dd(z.re), dd(z.im))
}

pub fn to_c64(z: Cdd) -> Complex64 {
    Complex64::new(z.re.hi() + z.re.lo(), z.im.hi() + z.im.lo())
}

pub fn to_f64(x: Dd) -> f64 {
    x.hi() + x.lo()
}

pub fn pi() -> Dd {
    twofloat::consts::PI
}

fn frac_pi_2() -> Dd {
    twofloat::consts::FRAC_PI_2
}

fn taylor_sin_cos(r: Dd) -> (Dd, Dd) {
    // |r| <= π/4: 28 terms are well past 1e-32
    let r2 = r * r;
    let mut term = r;
    let mut s = r;
    for k in 1..28 {
        let k = k as f64;
        term = -term * r2 / ((2.0 * k) * (2.0 * k + 1.0));
        s += term;
    }
    let mut term = dd(1.0);
    let mut c = dd(1.0);
    for k in 1..28 {
        let k = k as f64;
        term = -term * r2 / ((2.0 * k - 1.0) * (2.0 * k));
        c += term;
    }
    (s, c)
}

/// (sin x, cos x) to roughly double-double accuracy for moderate |x|.
pub fn sin_cos(x: Dd) -> (Dd, Dd) {
    let q = (to_f64(x) / std::f64::consts::FRAC_PI_2).round();
    let r = x - frac_pi_2() * q;
    let (s, c) = taylor_sin_cos(r);
    match (q as i64).rem_euclid(4) {
        0 => (s, c),
        1 => (c, -s),
        2 => (-s, -c),
        _ => (-c, s),
    }
}

/// e^{iθ}.
pub fn expi(theta: Dd) -> Cdd {
    let (s, c) = sin_cos(theta);
    Complex::new(c, s)
}

/// Argument of a nonzero complex number, refined to double-double accuracy.
pub fn arg(z: Cdd) -> Dd {
    let t0 = dd(to_c64(z).arg());
    let w = z * expi(-t0);
    // w is within ~1e-16 of the positive real axis
    t0 + div(w.im, w.re)
}

/// Quotient by long division. The library's `Div` for two double-doubles
/// only reaches double accuracy on targets without a fused multiply-add.
pub fn div(a: Dd, b: Dd) -> Dd {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    TwoFloat::new_add(q1, q2) + q3
}

pub fn cdiv(a: Cdd, b: Cdd) -> Cdd {
    let n = b.re * b.re + b.im * b.im;
    let num = a * b.conj();
    Complex::new(div(num.re, n), div(num.im, n))
}

pub fn sqrt(x: Dd) -> Dd {
    if x.hi() <= 0.0 {
        return dd(0.0);
    }
    let s = x.hi().sqrt();
    // one Newton step from the double root
    let r = x - TwoFloat::new_mul(s, s);
    TwoFloat::from(s) + r.hi() / (2.0 * s)
}

pub fn norm(z: Cdd) -> Dd {
    sqrt(z.re * z.re + z.im * z.im)
}

pub fn abs(z: Cdd) -> f64 {
    to_f64(norm(z))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pythagoras_to_double_double() {
        for i in 0..40 {
            let x = dd(-7.0 + 0.37 * i as f64);
            let (s, c) = sin_cos(x);
            let e = s * s + c * c - 1.0;
            assert!(to_f64(e).abs() < 1e-30, "{:?}", e);
            assert!((to_f64(s) - to_f64(x).sin()).abs() < 1e-15);
        }
    }

    #[test]
    fn sin_of_pi_over_six() {
        let (s, _) = sin_cos(pi() / 6.0);
        assert!(to_f64(s - 0.5).abs() < 1e-31);
    }

    #[test]
    fn division_and_root() {
        let a = dd(0.3) + 1e-20;
        let b = dd(-1.1) - 3e-21;
        assert!(to_f64(div(a, b) * b - a).abs() < 1e-31);
        let z = cdiv(cdd(Complex64::new(0.3, 0.7)), cdd(Complex64::new(-1.1, 0.2)));
        let back = z * cdd(Complex64::new(-1.1, 0.2)) - cdd(Complex64::new(0.3, 0.7));
        assert!(to_f64(norm(back)) < 1e-31);
        let s = sqrt(dd(2.0));
        assert!(to_f64(s * s - 2.0).abs() < 1e-31);
    }

    #[test]
    fn arg_refines() {
        let z = cdd(Complex64::new(0.3, 0.7));
        let a = arg(z);
        let back = expi(a) * norm(z);
        assert!(to_f64(back.re - z.re).abs() < 1e-30);
        assert!(to_f64(back.im - z.im).abs() < 1e-30);
    }
}
