//! Complete elliptic integral of the first kind.

use core::f64::consts::FRAC_PI_2;

/// `K(k)` for modulus `0 <= k < 1`, by the arithmetic-geometric mean.
///
/// Returns `f64::INFINITY` at `k = 1` and NaN outside `[0, 1]`.
pub fn ellipk(k: f64) -> f64 {
    if !(0.0..=1.0).contains(&k) {
        return f64::NAN;
    }
    if k == 1.0 {
        return f64::INFINITY;
    }
    let mut a = 1.0;
    let mut b = (1.0 - k * k).sqrt();
    for _ in 0..64 {
        if (a - b).abs() <= 1e-15 * a {
            break;
        }
        let an = 0.5 * (a + b);
        b = (a * b).sqrt();
        a = an;
    }
    FRAC_PI_2 / a
}

/// Complementary modulus `sqrt(1 - k^2)`.
pub fn complement(k: f64) -> f64 {
    (1.0 - k * k).sqrt()
}

/// `K(k') / K(k)`, the ratio that sets coplanar impedances.
pub fn ratio(k: f64) -> f64 {
    ellipk(complement(k)) / ellipk(k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn known_values() {
        assert!((ellipk(0.0) - FRAC_PI_2).abs() < 1e-15);
        // K(1/sqrt 2) = Gamma(1/4)^2 / (4 sqrt(pi))
        let g = 3.625_609_908_221_908_3_f64;
        let want = g * g / (4.0 * core::f64::consts::PI.sqrt());
        assert!((ellipk(core::f64::consts::FRAC_1_SQRT_2) - want).abs() < 1e-13);
    }

    #[test]
    fn out_of_range() {
        assert!(ellipk(-0.1).is_nan());
        assert!(ellipk(1.0).is_infinite());
    }
}
