//! Real polynomials with coefficients in ascending order (`c[k]` multiplies `z^k`).

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;

/// `p(z)` and `p'(z)` by Horner's rule.
pub fn eval_with_derivative(c: &[f64], z: Complex64) -> (Complex64, Complex64) {
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    for &ck in c.iter().rev() {
        dp = dp * z + p;
        p = p * z + ck;
    }
    (p, dp)
}

pub fn eval(c: &[f64], z: Complex64) -> Complex64 {
    eval_with_derivative(c, z).0
}

/// Coefficients of `lead * prod (z - r_k)`; imaginary parts are dropped, so
/// the roots should be closed under conjugation.
pub fn from_roots(lead: f64, roots: &[Complex64]) -> Vec<f64> {
    let mut c = vec![Complex64::new(lead, 0.0)];
    for r in roots {
        let mut next = vec![Complex64::new(0.0, 0.0); c.len() + 1];
        for (k, ck) in c.iter().enumerate() {
            next[k + 1] += ck;
            next[k] -= ck * r;
        }
        c = next;
    }
    c.into_iter().map(|z| z.re).collect()
}

/// Degree after stripping zero leading coefficients.
pub fn degree(c: &[f64]) -> Option<usize> {
    c.iter().rposition(|&x| x != 0.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_value_and_derivative() {
        // 3 z^2 - 2 z + 1 at z = 1 + i
        let z = Complex64::new(1.0, 1.0);
        let (p, dp) = eval_with_derivative(&[1.0, -2.0, 3.0], z);
        assert!((p - (3.0 * z * z - 2.0 * z + 1.0)).norm() < 1e-14);
        assert!((dp - (6.0 * z - 2.0)).norm() < 1e-14);
    }

    #[test]
    fn expansion_of_conjugate_pair() {
        let r = [Complex64::new(0.0, 1.0), Complex64::new(0.0, -1.0)];
        assert_eq!(from_roots(2.0, &r), vec![2.0, 0.0, 2.0]);
        assert_eq!(degree(&[1.0, 2.0, 0.0]), Some(1));
        assert_eq!(degree(&[0.0]), None);
    }
}
