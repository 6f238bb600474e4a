use crate::error::{Error, Result};

/// `P(X >= k)` for `X ~ Poisson(lambda)`.
pub fn poisson_tail(k: u32, lambda: f64) -> f64 {
    if k == 0 {
        return 1.0;
    }
    let mut term = (-lambda).exp();
    if lambda < k as f64 {
        // sum the upper terms directly to keep small tails accurate
        for i in 1..=k {
            term *= lambda / i as f64;
        }
        let mut sum = 0.0;
        let mut i = k;
        while term > sum * 1e-18 && term > 0.0 {
            sum += term;
            i += 1;
            term *= lambda / i as f64;
        }
        sum
    } else {
        let mut lower = 0.0;
        for i in 0..k {
            lower += term;
            term *= lambda / (i + 1) as f64;
        }
        1.0 - lower
    }
}

/// The Poisson parameter whose upper tail at `k` equals `prob`.
pub fn implied_lambda(k: u32, prob: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidParam("implied lambda needs k >= 1".into()));
    }
    if !(prob > 0.0 && prob < 1.0) {
        return Err(Error::InvalidParam(format!(
            "implied lambda needs a probability in (0, 1), got {prob}"
        )));
    }
    let mut hi = 1.0;
    while poisson_tail(k, hi) < prob {
        hi *= 2.0;
    }
    let mut lo = 0.0;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if poisson_tail(k, mid) < prob {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

pub fn alpha3_cubic(t: f64) -> f64 {
    ((t - 42.0) * t + 12.0) * t + 1.0
}

/// Root of `t^3 - 42t^2 + 12t + 1` on `(0, 1)`.
pub fn alpha3_root() -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if alpha3_cubic(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lambda_closed_forms() {
        let e = std::f64::consts::E;
        assert!((implied_lambda(1, 1.0 - 1.0 / e).unwrap() - 1.0).abs() < 1e-10);
        assert!((implied_lambda(1, 0.5).unwrap() - 2f64.ln()).abs() < 1e-10);
        assert!((implied_lambda(2, 1.0 - 2.0 / e).unwrap() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn lambda_residual_is_small() {
        for k in 1..6 {
            for &p in &[1e-6, 0.01, 0.3, 0.9, 0.999] {
                let l = implied_lambda(k, p).unwrap();
                assert!((poisson_tail(k, l) - p).abs() <= 1e-10, "k={k} p={p}");
            }
        }
    }

    #[test]
    fn lambda_errors() {
        assert!(implied_lambda(0, 0.5).is_err());
        assert!(implied_lambda(1, 0.0).is_err());
        assert!(implied_lambda(1, 1.0).is_err());
    }

    #[test]
    fn tail_agrees_across_branches() {
        for k in 1..8 {
            let below = poisson_tail(k, k as f64 - 1e-9);
            let at = poisson_tail(k, k as f64);
            assert!((below - at).abs() < 1e-8);
        }
    }

    #[test]
    fn alpha3() {
        assert_eq!(alpha3_cubic(0.0), 1.0);
        assert_eq!(alpha3_cubic(1.0), -28.0);
        let t = alpha3_root();
        assert!(alpha3_cubic(t).abs() <= 1e-12);
        assert!((t - 0.356).abs() < 5e-4);
    }
}
