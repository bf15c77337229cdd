//! Exact integer powers of unit phases.

use num_complex::Complex64;

/// `i^n` for any integer `n`, taken from the 4-cycle `{1, i, -1, -i}`.
#[inline]
pub fn i_pow(n: i64) -> Complex64 {
    match n.rem_euclid(4) {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// Table of `s^k` for `k` in `[-k_max, k_max]`.
///
/// When `s` is exactly one of `±1`, `±i` the entries come from the exact
/// 4-cycle. Otherwise they are built by repeated multiplication with `s` and
/// `1/s`.
#[derive(Debug, Clone)]
pub struct PowerTable {
    k_max: usize,
    values: Vec<Complex64>,
}

impl PowerTable {
    pub fn new(s: Complex64, k_max: usize) -> Self {
        let mut values = vec![Complex64::new(0.0, 0.0); 2 * k_max + 1];
        if let Some(quarter) = quarter_turns(s) {
            for (idx, v) in values.iter_mut().enumerate() {
                let k = idx as i64 - k_max as i64;
                *v = i_pow(quarter * k);
            }
        } else {
            let inv = s.inv();
            values[k_max] = Complex64::new(1.0, 0.0);
            for k in 1..=k_max {
                values[k_max + k] = values[k_max + k - 1] * s;
                values[k_max - k] = values[k_max - k + 1] * inv;
            }
        }
        Self { k_max, values }
    }

    #[inline]
    pub fn get(&self, k: i64) -> Complex64 {
        self.values[(k + self.k_max as i64) as usize]
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }
}

/// Returns `q` such that `s == i^q` exactly, if `s` is one of the four units.
fn quarter_turns(s: Complex64) -> Option<i64> {
    match (s.re, s.im) {
        (re, im) if re == 1.0 && im == 0.0 => Some(0),
        (re, im) if re == 0.0 && im == 1.0 => Some(1),
        (re, im) if re == -1.0 && im == 0.0 => Some(2),
        (re, im) if re == 0.0 && im == -1.0 => Some(3),
        _ => None,
    }
}
