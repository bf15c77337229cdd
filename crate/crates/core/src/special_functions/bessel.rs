use super::{check_finite, SpecialFunctionError};

/// Largest `|n|` accepted by [`bessel_j`].
pub const MAX_ORDER: u64 = 1_000_000;

/// Below this argument the ascending power series is summed directly. Its
/// largest term is bounded by `I_0(|x|)`, about 11.3 at the threshold, which
/// keeps cancellation well under `1e-14`.
const SERIES_RADIUS: f64 = 4.0;

/// Orders whose upper bound `(x/2)^n / n!` falls below `e^-700` are zero in f64.
const NEGLIGIBLE_LOG: f64 = -700.0;

const RESCALE_ABOVE: f64 = 1e250;
const RESCALE_BY: f64 = 1e-250;

/// Bessel function of the first kind `J_n(x)` for integer `n`.
///
/// The value is computed for `|n|` and `|x|` and the sign is then restored
/// from `J_{-n}(x) = (-1)^n J_n(x)` and `J_n(-x) = (-1)^n J_n(x)`, so both
/// parities hold exactly.
pub fn bessel_j(n: i64, x: f64) -> Result<f64, SpecialFunctionError> {
    check_finite("x", x)?;
    let m = n.unsigned_abs();
    if m > MAX_ORDER {
        return Err(SpecialFunctionError::OrderTooLarge {
            order: n,
            max: MAX_ORDER,
        });
    }
    let v = nonneg(m as usize, x.abs());
    let flip = m % 2 == 1 && ((n < 0) != (x < 0.0));
    Ok(if flip { -v } else { v })
}

/// `J_0(x), J_1(x), …, J_{n_max}(x)` from a single evaluation pass.
pub fn bessel_row(x: f64, n_max: usize) -> Result<Vec<f64>, SpecialFunctionError> {
    check_finite("x", x)?;
    let mut row = row_abs(x.abs(), n_max);
    if x < 0.0 {
        row.iter_mut().skip(1).step_by(2).for_each(|v| *v = -*v);
    }
    Ok(row)
}

/// `J_m(x)` for signed `m` looked up in a row of non-negative orders.
#[inline]
pub(crate) fn signed_lookup(row: &[f64], m: i64) -> f64 {
    let v = row[m.unsigned_abs() as usize];
    if m < 0 && m % 2 != 0 {
        -v
    } else {
        v
    }
}

fn negligible(m: usize, x: f64) -> bool {
    if m == 0 {
        return false;
    }
    let mf = m as f64;
    if x >= mf {
        return false;
    }
    // ln n! >= n ln n - n, so this bounds ln[(x/2)^n / n!] from above.
    mf * ((0.5 * x).ln() - mf.ln() + 1.0) < NEGLIGIBLE_LOG
}

fn nonneg(m: usize, x: f64) -> f64 {
    if x == 0.0 {
        return if m == 0 { 1.0 } else { 0.0 };
    }
    if negligible(m, x) {
        return 0.0;
    }
    if x <= SERIES_RADIUS {
        let half = 0.5 * x;
        let lead = (1..=m).fold(1.0, |acc, i| acc * half / i as f64);
        series(m, x, lead)
    } else {
        miller(x, m)[m]
    }
}

/// Ascending series `Σ_k (-1)^k (x/2)^{2k+m} / (k! (k+m)!)` given its first term.
fn series(m: usize, x: f64, lead: f64) -> f64 {
    let q = -0.25 * x * x;
    let mut term = lead;
    let mut sum = lead;
    for k in 1..500 {
        term *= q / (k as f64 * (k + m) as f64);
        sum += term;
        if term == 0.0 || term.abs() <= 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

fn row_abs(x: f64, n_max: usize) -> Vec<f64> {
    let mut row = vec![0.0; n_max + 1];
    if x == 0.0 {
        row[0] = 1.0;
        return row;
    }
    // Every order from `live` on is zero to f64 precision.
    let live = (0..=n_max).find(|&m| negligible(m, x)).unwrap_or(n_max + 1);
    if x <= SERIES_RADIUS {
        let half = 0.5 * x;
        let mut lead = 1.0;
        for m in 0..live {
            if m > 0 {
                lead *= half / m as f64;
            }
            row[m] = series(m, x, lead);
        }
    } else {
        let top = live.saturating_sub(1);
        let computed = miller(x, top);
        row[..live].copy_from_slice(&computed[..live]);
    }
    row
}

/// Miller backward recurrence `J_{k-1} = (2k/x) J_k - J_{k+1}` started well
/// above both `n_max` and `x`, normalized with `J_0 + 2 Σ J_{2k} = 1`.
fn miller(x: f64, n_max: usize) -> Vec<f64> {
    let top = n_max.max(x.ceil() as usize);
    let start = top + 20 + (12.0 * (top as f64).sqrt()).ceil() as usize;
    let mut out = vec![0.0; n_max + 1];
    let two_over_x = 2.0 / x;
    let mut above = 0.0;
    let mut current = 1.0;
    let mut sum = 0.0;
    for k in (1..=start).rev() {
        let below = k as f64 * two_over_x * current - above;
        above = current;
        current = below;
        let order = k - 1;
        if order <= n_max {
            out[order] = current;
        }
        if order % 2 == 0 {
            sum += if order == 0 { current } else { 2.0 * current };
        }
        if current.abs() > RESCALE_ABOVE {
            current *= RESCALE_BY;
            above *= RESCALE_BY;
            sum *= RESCALE_BY;
            if order <= n_max {
                out[order..].iter_mut().for_each(|v| *v *= RESCALE_BY);
            }
        }
    }
    let norm = 1.0 / sum;
    out.iter_mut().for_each(|v| *v *= norm);
    out
}
