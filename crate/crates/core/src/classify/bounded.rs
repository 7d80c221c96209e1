//! Finite-sample reading of "x(t) = O(1)" on a geometric grid.

use super::super::karamata::{ls_slope, Status, TriVerdict};

/// Relative slack for the monotone-growth test.
const MONO_SLACK: f64 = 1e-9;

fn median(v: &[f64]) -> f64 {
    let mut s: Vec<f64> = v.to_vec();
    s.sort_by(|a, b| a.total_cmp(b));
    let n = s.len();
    if n % 2 == 1 {
        s[n / 2]
    } else {
        0.5 * (s[n / 2 - 1] + s[n / 2])
    }
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

/// Boundedness of a positive diagnostic sampled toward the limit point.
///
/// `depth` is the logarithmic abscissa, increasing toward the limit (ln y for
/// y → ∞, ln 1/x for x ↓ 0). `+∞` values are markers for a vanishing
/// denominator. Holds when the final-quarter sup stays within 10× the median of
/// the first quarter and the fitted slope of ln v against depth is ≤ 0.05.
/// Fails on monotone growth with slope ≥ 0.3, or monotone growth whose
/// per-unit-depth increments do not decay (last-quarter mean ≥ 0.8× the
/// second-quarter mean). Everything else is inconclusive.
pub fn boundedness_verdict(depth: &[f64], values: &[f64]) -> TriVerdict {
    let n = values.len();
    let evidence: Vec<(f64, f64)> = depth.iter().copied().zip(values.iter().copied()).collect();
    let verdict = |status, trend, final_value, note: &str| TriVerdict {
        status,
        trend,
        final_value,
        evidence: evidence.clone(),
        note: note.to_string(),
    };
    if n < 8 {
        return verdict(Status::Inconclusive, f64::NAN, f64::NAN, "too few samples");
    }
    if values[n / 2..].iter().any(|v| *v == f64::INFINITY) {
        return verdict(Status::Fails, f64::NAN, f64::INFINITY, "unbounded: denominator vanishes on the grid");
    }
    let (d, v): (Vec<f64>, Vec<f64>) = depth
        .iter()
        .zip(values)
        .filter(|(_, v)| v.is_finite() && **v > 0.0)
        .map(|(d, v)| (*d, *v))
        .unzip();
    let m = v.len();
    if m < 8 || 4 * m < 3 * n {
        return verdict(Status::Inconclusive, f64::NAN, f64::NAN, "too many invalid samples");
    }
    let q = (m / 4).max(2);
    let first = median(&v[..q]);
    let fsup = v[m - q..].iter().copied().fold(0.0, f64::max);
    let lnv: Vec<f64> = v.iter().map(|x| x.ln()).collect();
    let slope = ls_slope(&d, &lnv);
    if fsup <= 10.0 * first && slope <= 0.05 {
        return verdict(Status::Holds, slope, fsup, "");
    }
    let monotone = v.windows(2).all(|w| w[1] >= w[0] * (1.0 - MONO_SLACK));
    if monotone {
        if slope >= 0.3 {
            return verdict(Status::Fails, slope, fsup, "monotone power-like growth");
        }
        let inc: Vec<f64> = v.windows(2).zip(d.windows(2)).map(|(a, b)| (a[1] - a[0]) / (b[1] - b[0])).collect();
        let k = inc.len();
        let second = mean(&inc[k / 4..k / 2]);
        let last = mean(&inc[k - k / 4..]);
        if second > 0.0 && last >= 0.8 * second {
            return verdict(Status::Fails, slope, fsup, "monotone growth with non-decaying increments");
        }
    }
    verdict(Status::Inconclusive, slope, fsup, "")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid(n: usize) -> Vec<f64> {
        (0..n).map(|k| 1.0 + 0.5 * k as f64).collect()
    }

    #[test]
    fn constant_and_decaying_hold() {
        let d = grid(20);
        assert_eq!(boundedness_verdict(&d, &vec![3.0; 20]).status, Status::Holds);
        let v: Vec<f64> = d.iter().map(|t| 1.0 + (-t).exp()).collect();
        assert_eq!(boundedness_verdict(&d, &v).status, Status::Holds);
    }

    #[test]
    fn power_and_linear_growth_fail() {
        let d = grid(20);
        let v: Vec<f64> = d.iter().map(|t| (0.5 * t).exp()).collect();
        assert_eq!(boundedness_verdict(&d, &v).status, Status::Fails);
        // logarithmic growth in the original variable: linear in depth
        let v: Vec<f64> = d.iter().map(|t| 2.0 + t).collect();
        let r = boundedness_verdict(&d, &v);
        assert_eq!(r.status, Status::Fails, "{r:?}");
    }

    #[test]
    fn markers_fail() {
        let d = grid(12);
        assert_eq!(boundedness_verdict(&d, &vec![f64::INFINITY; 12]).status, Status::Fails);
    }

    #[test]
    fn short_grids_are_inconclusive() {
        assert_eq!(boundedness_verdict(&[1.0, 2.0], &[1.0, 1.0]).status, Status::Inconclusive);
    }
}
