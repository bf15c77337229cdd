use num_complex::Complex64;

use super::bessel::{bessel_row, signed_lookup, MAX_ORDER};
use super::{check_finite, SpecialFunctionError};
use crate::phase::PowerTable;

/// Smallest tolerance accepted for the bilateral sum.
pub const MIN_TOL: f64 = 1e-14;

/// Hard cap on the half-width `K` of the `k`-sum.
pub const K_CAP: usize = 10_000;

const K_MARGIN: usize = 40;
const K_GROWTH: usize = 20;
const UNIT_MODULUS_TOL: f64 = 1e-12;

/// Arguments of `J_n(x, y; s)`.
///
/// `s` must lie on the unit circle: off it, `s^k` grows without bound on one
/// side of the bilateral sum and the tail estimate no longer holds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GBesselParams {
    n: i64,
    x: f64,
    y: f64,
    s: Complex64,
}

impl GBesselParams {
    pub fn new(n: i64, x: f64, y: f64, s: Complex64) -> Result<Self, SpecialFunctionError> {
        check_finite("x", x)?;
        check_finite("y", y)?;
        check_parameter(s)?;
        if n.unsigned_abs() > MAX_ORDER {
            return Err(SpecialFunctionError::OrderTooLarge {
                order: n,
                max: MAX_ORDER,
            });
        }
        Ok(Self { n, x, y, s })
    }

    pub fn n(&self) -> i64 {
        self.n
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    pub fn s(&self) -> Complex64 {
        self.s
    }
}

/// Result of a truncated bilateral sum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GBesselValue {
    pub value: Complex64,
    /// Half-width `K` of the `k`-sum actually used.
    pub truncation_k: usize,
    /// Upper bound on the discarded tail `Σ_{|k|>K}`.
    pub est_error: f64,
}

fn check_parameter(s: Complex64) -> Result<(), SpecialFunctionError> {
    check_finite("Re s", s.re)?;
    check_finite("Im s", s.im)?;
    if s.re == 0.0 && s.im == 0.0 {
        return Err(SpecialFunctionError::InvalidParameter(
            "s must be non-zero".into(),
        ));
    }
    if (s.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
        return Err(SpecialFunctionError::InvalidParameter(format!(
            "|s| must be 1, got {}",
            s.norm()
        )));
    }
    Ok(())
}

fn check_tol(tol: f64) -> Result<(), SpecialFunctionError> {
    if tol.is_finite() && tol >= MIN_TOL {
        Ok(())
    } else {
        Err(SpecialFunctionError::InvalidParameter(format!(
            "tolerance must be at least {MIN_TOL:e}, got {tol:e}"
        )))
    }
}

/// Upper bound on `Σ_{|k|>K} |J_k(y)|` from `|J_k(y)| <= (|y|/2)^k / k!`.
fn tail_bound(y: f64, k: usize) -> f64 {
    if y == 0.0 {
        return 0.0;
    }
    let half = 0.5 * y.abs();
    let next = (k + 1) as f64;
    // Stirling lower bound on ln((K+1)!).
    let ln_fact = next * next.ln() - next + 0.5 * (2.0 * std::f64::consts::PI * next).ln();
    let ln_term = next * half.ln() - ln_fact;
    let ratio = half / (next + 1.0);
    2.0 * ln_term.exp() / (1.0 - ratio)
}

/// Picks `K` such that the last retained term and the discarded tail are
/// both below tolerance. Since `|s| = 1` and `|J_m(x)| <= 1`, a term of order
/// `k` is bounded by `|J_k(y)|`.
fn truncation(x: f64, y: f64, tol: f64) -> Result<(usize, f64), SpecialFunctionError> {
    let mut k = x.abs().max(y.abs()).ceil() as usize + K_MARGIN;
    loop {
        if k > K_CAP {
            return Err(SpecialFunctionError::NoConvergence { tol, cap: K_CAP });
        }
        let last = bessel_row(y, k)?[k].abs();
        let tail = tail_bound(y, k);
        if last < 0.1 * tol && tail <= tol {
            return Ok((k, tail));
        }
        k += K_GROWTH;
    }
}

#[inline]
fn bilateral_sum(n: i64, k_max: usize, jx: &[f64], jy: &[f64], powers: &PowerTable) -> Complex64 {
    let k_max = k_max as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in -k_max..=k_max {
        let product = signed_lookup(jx, n - 2 * k) * signed_lookup(jy, k);
        acc += powers.get(k) * product;
    }
    acc
}

/// `J_n(x, y; s) = Σ_k s^k J_{n-2k}(x) J_k(y)`, truncated at `|k| <= K`.
pub fn gbessel_j(p: &GBesselParams, tol: f64) -> Result<GBesselValue, SpecialFunctionError> {
    check_tol(tol)?;
    let (k_max, est_error) = truncation(p.x, p.y, tol)?;
    let jx = bessel_row(p.x, p.n.unsigned_abs() as usize + 2 * k_max)?;
    let jy = bessel_row(p.y, k_max)?;
    let powers = PowerTable::new(p.s, k_max);
    Ok(GBesselValue {
        value: bilateral_sum(p.n, k_max, &jx, &jy, &powers),
        truncation_k: k_max,
        est_error,
    })
}

/// `J_n(x, y; s)` for every `n` in `[-n_max, n_max]`, sharing the Bessel
/// rows of `x` and `y` across orders.
#[derive(Debug, Clone)]
pub struct GBesselRow {
    n_max: usize,
    truncation_k: usize,
    est_error: f64,
    values: Vec<Complex64>,
}

impl GBesselRow {
    pub fn new(
        x: f64,
        y: f64,
        s: Complex64,
        n_max: usize,
        tol: f64,
    ) -> Result<Self, SpecialFunctionError> {
        check_finite("x", x)?;
        check_finite("y", y)?;
        check_parameter(s)?;
        check_tol(tol)?;
        if n_max as u64 > MAX_ORDER {
            return Err(SpecialFunctionError::OrderTooLarge {
                order: n_max as i64,
                max: MAX_ORDER,
            });
        }
        let (k_max, est_error) = truncation(x, y, tol)?;
        let jx = bessel_row(x, n_max + 2 * k_max)?;
        let jy = bessel_row(y, k_max)?;
        let powers = PowerTable::new(s, k_max);
        let values = (-(n_max as i64)..=n_max as i64)
            .map(|n| bilateral_sum(n, k_max, &jx, &jy, &powers))
            .collect();
        Ok(Self {
            n_max,
            truncation_k: k_max,
            est_error,
            values,
        })
    }

    /// Value at order `n`; panics if `|n| > n_max`.
    #[inline]
    pub fn get(&self, n: i64) -> Complex64 {
        self.values[(n + self.n_max as i64) as usize]
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn truncation_k(&self) -> usize {
        self.truncation_k
    }

    pub fn est_error(&self) -> f64 {
        self.est_error
    }
}

/// Partial sum `Σ_{n=-n_max}^{n_max} t^n J_n(x, y; s)` of the generating
/// function, which should approach
/// `exp[(x/2)(t - 1/t) + (y/2)(s t^2 - 1/(s t^2))]`.
pub fn gbessel_generating_lhs(
    t: Complex64,
    x: f64,
    y: f64,
    s: Complex64,
    n_max: usize,
) -> Result<Complex64, SpecialFunctionError> {
    check_finite("Re t", t.re)?;
    check_finite("Im t", t.im)?;
    if (t.norm() - 1.0).abs() > UNIT_MODULUS_TOL {
        return Err(SpecialFunctionError::InvalidParameter(format!(
            "|t| must be 1, got {}",
            t.norm()
        )));
    }
    if n_max < 1 {
        return Err(SpecialFunctionError::InvalidParameter(
            "n_max must be at least 1".into(),
        ));
    }
    let row = GBesselRow::new(x, y, s, n_max, MIN_TOL)?;
    let t_pow = PowerTable::new(t, n_max);
    let n_max = n_max as i64;
    Ok((-n_max..=n_max).map(|n| t_pow.get(n) * row.get(n)).sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::special_functions::bessel_j;
    use std::f64::consts::PI;

    const MINUS_I: Complex64 = Complex64::new(0.0, -1.0);
    const PLUS_I: Complex64 = Complex64::new(0.0, 1.0);

    fn gj(n: i64, x: f64, y: f64, s: Complex64) -> Complex64 {
        gbessel_j(&GBesselParams::new(n, x, y, s).unwrap(), MIN_TOL)
            .unwrap()
            .value
    }

    fn generating_rhs(t: Complex64, x: f64, y: f64, s: Complex64) -> Complex64 {
        let st2 = s * t * t;
        ((x / 2.0) * (t - t.inv()) + (y / 2.0) * (st2 - st2.inv())).exp()
    }

    /// Coefficient of `t^n` in the generating function by trapezoid rule on
    /// the unit circle.
    fn contour_oracle(n: i64, x: f64, y: f64, s: Complex64) -> Complex64 {
        let points = 4096;
        let h = 2.0 * PI / points as f64;
        let sum: Complex64 = (0..points)
            .map(|i| {
                let theta = i as f64 * h;
                let t = Complex64::from_polar(1.0, theta);
                generating_rhs(t, x, y, s) * Complex64::from_polar(1.0, -(n as f64) * theta)
            })
            .sum();
        sum / points as f64
    }

    #[test]
    fn all_zero_arguments() {
        assert_eq!(gj(0, 0.0, 0.0, MINUS_I), Complex64::new(1.0, 0.0));
        assert_eq!(gj(4, 0.0, 0.0, MINUS_I), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn collapses_to_bessel_when_y_vanishes() {
        let v = gj(2, 1.3, 0.0, MINUS_I);
        assert_eq!(v.re, bessel_j(2, 1.3).unwrap());
        assert_eq!(v.im, 0.0);
        for n in -12..=12 {
            for x in [-9.0, -1.0, 0.7, 5.5] {
                let d = (gj(n, x, 0.0, MINUS_I) - bessel_j(n, x).unwrap()).norm();
                assert!(d < 1e-14, "n = {n}, x = {x}");
            }
        }
    }

    #[test]
    fn sign_relation_at_minus_i() {
        let v = gj(1, -1.0, -0.5, MINUS_I);
        let w = gj(-1, -1.0, -0.5, MINUS_I);
        assert!((w + v).norm() < 1e-15);
        assert!(v.norm() > 0.1);
    }

    #[test]
    fn third_order_matches_contour_extraction() {
        let v = gj(3, -2.0, -1.0, MINUS_I);
        let oracle = contour_oracle(3, -2.0, -1.0, MINUS_I);
        assert!((v - oracle).norm() < 1e-12, "{v} vs {oracle}");
    }

    #[test]
    fn generic_unit_parameter_matches_contour_extraction() {
        let s = Complex64::from_polar(1.0, 1.1);
        for n in [-7, -2, 0, 3, 9] {
            let d = (gj(n, 3.5, -2.5, s) - contour_oracle(n, 3.5, -2.5, s)).norm();
            assert!(d < 1e-12, "n = {n}, diff = {d:e}");
        }
    }

    #[test]
    fn generating_partial_sums() {
        let one = Complex64::new(1.0, 0.0);
        let v = gbessel_generating_lhs(one, 0.0, 0.0, MINUS_I, 5).unwrap();
        assert_eq!(v, one);

        let t = PLUS_I;
        let lhs = gbessel_generating_lhs(t, -2.0, -1.0, MINUS_I, 60).unwrap();
        assert!((lhs - generating_rhs(t, -2.0, -1.0, MINUS_I)).norm() < 1e-10);

        let t = Complex64::from_polar(1.0, 0.7);
        let lhs = gbessel_generating_lhs(t, -4.0, -2.0, MINUS_I, 80).unwrap();
        assert!((lhs - generating_rhs(t, -4.0, -2.0, MINUS_I)).norm() < 1e-10);
    }

    #[test]
    fn generating_identity_on_circle() {
        for &(x, y) in &[(-10.0, -10.0), (10.0, -3.0), (-6.5, 8.0), (0.3, 10.0)] {
            for i in 0..16 {
                let t = Complex64::from_polar(1.0, 2.0 * PI * (i as f64 + 0.25) / 16.0);
                let lhs = gbessel_generating_lhs(t, x, y, MINUS_I, 80).unwrap();
                let d = (lhs - generating_rhs(t, x, y, MINUS_I)).norm();
                assert!(d < 1e-10, "x = {x}, y = {y}, i = {i}, diff = {d:e}");
            }
        }
    }

    #[test]
    fn row_matches_scalar() {
        let row = GBesselRow::new(-8.0, -4.0, MINUS_I, 30, MIN_TOL).unwrap();
        for n in -30..=30 {
            assert!((row.get(n) - gj(n, -8.0, -4.0, MINUS_I)).norm() < 1e-14);
        }
        assert!(row.est_error() <= MIN_TOL);
    }

    #[test]
    fn unit_norm() {
        for &(x, y) in &[(-2.0, -1.0), (-8.0, -4.0), (-20.0, -10.0), (5.0, -7.5)] {
            let big_n = (f64::abs(x) + 2.0 * f64::abs(y) + 40.0).ceil() as usize;
            let row = GBesselRow::new(x, y, MINUS_I, big_n, MIN_TOL).unwrap();
            let total: f64 = (-(big_n as i64)..=big_n as i64)
                .map(|n| row.get(n).norm_sqr())
                .sum();
            assert!(
                (total - 1.0).abs() < 1e-8,
                "x = {x}, y = {y}, total = {total}"
            );
        }
    }

    #[test]
    fn reported_error_is_within_tolerance() {
        for tol in [1e-14, 1e-10, 1e-4] {
            let p = GBesselParams::new(5, -12.0, 9.0, MINUS_I).unwrap();
            let v = gbessel_j(&p, tol).unwrap();
            assert!(v.est_error <= tol);
            assert!(v.truncation_k >= 52);
        }
    }

    #[test]
    fn rejects_bad_parameters() {
        let zero = Complex64::new(0.0, 0.0);
        assert!(matches!(
            GBesselParams::new(0, 1.0, 1.0, zero),
            Err(SpecialFunctionError::InvalidParameter(_))
        ));
        assert!(matches!(
            GBesselParams::new(0, 1.0, 1.0, Complex64::new(0.0, -1.5)),
            Err(SpecialFunctionError::InvalidParameter(_))
        ));
        assert!(matches!(
            GBesselParams::new(0, f64::NAN, 1.0, MINUS_I),
            Err(SpecialFunctionError::NonFinite { .. })
        ));
        let p = GBesselParams::new(0, 1.0, 1.0, MINUS_I).unwrap();
        assert!(matches!(
            gbessel_j(&p, 1e-15),
            Err(SpecialFunctionError::InvalidParameter(_))
        ));
        let far = Complex64::new(1.0, 1e-4);
        assert!(gbessel_generating_lhs(far, 1.0, 1.0, MINUS_I, 3).is_err());
        assert!(gbessel_generating_lhs(Complex64::new(1.0, 0.0), 1.0, 1.0, MINUS_I, 0).is_err());
    }

    #[test]
    fn truncation_cap() {
        let p = GBesselParams::new(0, 1.0, 2.0e4, MINUS_I).unwrap();
        assert!(matches!(
            gbessel_j(&p, 1e-12),
            Err(SpecialFunctionError::NoConvergence { .. })
        ));
    }
}
