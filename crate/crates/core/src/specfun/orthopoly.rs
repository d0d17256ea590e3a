/// Jacobi polynomial `P_n^{(0, alpha - 1)}(x)` by the three-term recurrence.
///
/// Arguments above one are the typical use, where the recurrence has no
/// cancellation.
pub fn jacobi_eval(n: u32, alpha: f64, x: f64) -> f64 {
    let a = 0.0;
    let b = alpha - 1.0;
    let mut prev = 1.0;
    if n == 0 {
        return prev;
    }
    let mut cur = (a + 1.0) + (a + b + 2.0) * (x - 1.0) / 2.0;
    for k in 2..=n {
        let k = k as f64;
        let s = 2.0 * k + a + b;
        let lead = 2.0 * k * (k + a + b) * (s - 2.0);
        let mid = (s - 1.0) * (s * (s - 2.0) * x + a * a - b * b);
        let back = 2.0 * (k + a - 1.0) * (k + b - 1.0) * s;
        let next = (mid * cur - back * prev) / lead;
        prev = cur;
        cur = next;
    }
    cur
}

/// `L_n(-y) = sum_k C(n, k) y^k / k!`, a sum of nonnegative terms for
/// `y >= 0`.
pub fn laguerre_eval(n: u32, y: f64) -> f64 {
    // Horner on the coefficient ratios c_{k+1}/c_k = (n-k) / (k+1)^2
    let mut acc = 1.0;
    for k in (0..n).rev() {
        let k = k as f64;
        acc = 1.0 + acc * y * (n as f64 - k) / ((k + 1.0) * (k + 1.0));
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specfun::hypergeom::{hypergeom_terminating, HypergeomParams};
    use approx::assert_relative_eq;

    #[test]
    fn low_degrees() {
        assert_eq!(jacobi_eval(0, 3.3, 7.0), 1.0);
        let (alpha, x) = (2.5, 1.7);
        assert_relative_eq!(
            jacobi_eval(1, alpha, x),
            1.0 + (alpha + 1.0) * (x - 1.0) / 2.0
        );
        assert_eq!(laguerre_eval(0, 4.0), 1.0);
        assert_relative_eq!(laguerre_eval(1, 2.5), 3.5);
        // L_2(-y) = 1 + 2y + y^2/2
        assert_relative_eq!(laguerre_eval(2, 3.0), 1.0 + 6.0 + 4.5);
    }

    #[test]
    fn jacobi_form_of_profile_polynomial() {
        let (n, alpha, t) = (3u32, 2.0, 0.3f64);
        let via_jacobi = (1.0 - t).powi(n as i32) * jacobi_eval(n, alpha, (1.0 + t) / (1.0 - t));
        let nf = n as f64;
        let direct =
            hypergeom_terminating(&HypergeomParams::new(1.0 - alpha - nf, -nf, 1.0), t).unwrap();
        assert!((via_jacobi - direct).abs() <= 1e-12);
    }

    #[test]
    fn jacobi_form_across_grid() {
        for n in 0..8u32 {
            for alpha in [1.5, 2.0, 3.5, 7.0] {
                for i in 0..20 {
                    let t = 0.045 * i as f64;
                    let nf = n as f64;
                    let lhs =
                        (1.0 - t).powi(n as i32) * jacobi_eval(n, alpha, (1.0 + t) / (1.0 - t));
                    let rhs =
                        hypergeom_terminating(&HypergeomParams::new(1.0 - alpha - nf, -nf, 1.0), t)
                            .unwrap();
                    assert_relative_eq!(lhs, rhs, max_relative = 1e-11);
                }
            }
        }
    }

    #[test]
    fn laguerre_is_large_parameter_limit() {
        let (n, y, r) = (2.0, 1.0, 1e6);
        let p = hypergeom_terminating(&HypergeomParams::new(1.0 - r - n, -n, 1.0), y / r).unwrap();
        assert!((p - laguerre_eval(2, y)).abs() <= 1e-5);
    }
}
