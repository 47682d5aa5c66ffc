//! Polynomial roots: eigenvalues of the balanced companion matrix by the
//! Francis double-shift QR iteration, with Aberth–Ehrlich iteration as a
//! fallback and a Newton polish on the polynomial itself.

use alloc::vec;
use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;

use crate::poly;
use crate::{Error, Result};

fn sign(a: f64, b: f64) -> f64 {
    if b >= 0.0 {
        a.abs()
    } else {
        -a.abs()
    }
}

/// Diagonal similarity scaling by powers of two, reducing the norm before QR.
fn balance(a: &mut [Vec<f64>]) {
    const RADIX: f64 = 2.0;
    let n = a.len();
    let sqrdx = RADIX * RADIX;
    let mut done = false;
    while !done {
        done = true;
        for i in 0..n {
            let (mut r, mut c) = (0.0, 0.0);
            for j in 0..n {
                if j != i {
                    c += a[j][i].abs();
                    r += a[i][j].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let mut g = r / RADIX;
            let mut f = 1.0;
            let s = c + r;
            while c < g {
                f *= RADIX;
                c *= sqrdx;
            }
            g = r * RADIX;
            while c > g {
                f /= RADIX;
                c /= sqrdx;
            }
            if (c + r) / f < 0.95 * s {
                done = false;
                let g = 1.0 / f;
                for j in 0..n {
                    a[i][j] *= g;
                }
                for j in 0..n {
                    a[j][i] *= f;
                }
            }
        }
    }
}

/// Eigenvalues of an upper Hessenberg matrix (destroyed).
pub fn hessenberg_eigenvalues(a: &mut [Vec<f64>]) -> Result<Vec<Complex64>> {
    let n = a.len();
    let mut wr = vec![0.0; n];
    let mut wi = vec![0.0; n];
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += a[i][j].abs();
        }
    }
    let mut nn = n as isize - 1;
    let mut t = 0.0;
    while nn >= 0 {
        let u = nn as usize;
        let mut its = 0;
        loop {
            let mut l = u;
            while l >= 1 {
                let mut s = a[l - 1][l - 1].abs() + a[l][l].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if a[l][l - 1].abs() + s == s {
                    a[l][l - 1] = 0.0;
                    break;
                }
                l -= 1;
            }
            let mut x = a[u][u];
            if l == u {
                wr[u] = x + t;
                wi[u] = 0.0;
                nn -= 1;
                break;
            }
            let mut y = a[u - 1][u - 1];
            let mut w = a[u][u - 1] * a[u - 1][u];
            if l == u - 1 {
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let z = p + sign(z, p);
                    wr[u - 1] = x + z;
                    wr[u] = if z != 0.0 { x - w / z } else { x + z };
                    wi[u - 1] = 0.0;
                    wi[u] = 0.0;
                } else {
                    wr[u - 1] = x + p;
                    wr[u] = x + p;
                    wi[u - 1] = -z;
                    wi[u] = z;
                }
                nn -= 2;
                break;
            }
            if its == 60 {
                return Err(Error::ResidualTooLarge { residual: a[u][u - 1].abs(), limit: anorm * f64::EPSILON });
            }
            if its == 10 || its == 20 {
                t += x;
                for i in 0..=u {
                    a[i][i] -= x;
                }
                let s = a[u][u - 1].abs() + a[u - 1][u - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;
            let (mut p, mut q, mut r);
            let mut m = u - 2;
            loop {
                let z = a[m][m];
                let rr = x - z;
                let ss = y - z;
                p = (rr * ss - w) / a[m + 1][m] + a[m][m + 1];
                q = a[m + 1][m + 1] - z - rr - ss;
                r = a[m + 2][m + 1];
                let s = p.abs() + q.abs() + r.abs();
                p /= s;
                q /= s;
                r /= s;
                if m == l {
                    break;
                }
                let uu = a[m][m - 1].abs() * (q.abs() + r.abs());
                let vv = p.abs() * (a[m - 1][m - 1].abs() + z.abs() + a[m + 1][m + 1].abs());
                if uu + vv == vv {
                    break;
                }
                m -= 1;
            }
            for i in m + 2..=u {
                a[i][i - 2] = 0.0;
                if i != m + 2 {
                    a[i][i - 3] = 0.0;
                }
            }
            let mut k = m;
            while k < u {
                if k != m {
                    p = a[k][k - 1];
                    q = a[k + 1][k - 1];
                    r = if k != u - 1 { a[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let s = sign((p * p + q * q + r * r).sqrt(), p);
                if s != 0.0 {
                    if k == m {
                        if l != m {
                            a[k][k - 1] = -a[k][k - 1];
                        }
                    } else {
                        a[k][k - 1] = -s * x;
                    }
                    p += s;
                    x = p / s;
                    y = q / s;
                    let z = r / s;
                    q /= p;
                    r /= p;
                    for j in k..=u {
                        let mut pp = a[k][j] + q * a[k + 1][j];
                        if k != u - 1 {
                            pp += r * a[k + 2][j];
                            a[k + 2][j] -= pp * z;
                        }
                        a[k + 1][j] -= pp * y;
                        a[k][j] -= pp * x;
                    }
                    let mmin = if u < k + 3 { u } else { k + 3 };
                    for i in l..=mmin {
                        let mut pp = x * a[i][k] + y * a[i][k + 1];
                        if k != u - 1 {
                            pp += z * a[i][k + 2];
                            a[i][k + 2] -= pp * r;
                        }
                        a[i][k + 1] -= pp * q;
                        a[i][k] -= pp;
                    }
                }
                k += 1;
            }
        }
    }
    Ok(wr.into_iter().zip(wi).map(|(re, im)| Complex64::new(re, im)).collect())
}

fn check_degree(c: &[f64]) -> Result<usize> {
    match poly::degree(c) {
        Some(d) if c.iter().all(|x| x.is_finite()) => Ok(d),
        _ => Err(Error::InvalidInputs(alloc::string::String::from("polynomial is zero or not finite"))),
    }
}

/// Roots of `sum c[k] z^k` as eigenvalues of the balanced companion matrix.
pub fn companion_roots(c: &[f64]) -> Result<Vec<Complex64>> {
    let n = check_degree(c)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    let lead = c[n];
    let mut a = vec![vec![0.0; n]; n];
    for j in 0..n {
        a[0][j] = -c[n - 1 - j] / lead;
    }
    for j in 1..n {
        a[j][j - 1] = 1.0;
    }
    balance(&mut a);
    hessenberg_eigenvalues(&mut a)
}

/// Simultaneous Aberth–Ehrlich iteration from points on a circle.
pub fn aberth(c: &[f64], max_iter: usize, tol: f64) -> Result<Vec<Complex64>> {
    let n = check_degree(c)?;
    if n == 0 {
        return Ok(Vec::new());
    }
    // Cauchy-type bound on the root moduli
    let radius = 1.0 + c[..n].iter().map(|x| (x / c[n]).abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> =
        (0..n).map(|k| Complex64::from_polar(0.5 * radius, 0.4 + 2.0 * core::f64::consts::PI * k as f64 / n as f64)).collect();
    // a root is settled once |p(z)| is within the rounding error of Horner's rule
    let noise = |zi: Complex64| {
        let r = zi.norm();
        8.0 * n as f64 * f64::EPSILON * c[..=n].iter().rev().fold(0.0, |acc, ck| acc * r + ck.abs())
    };
    for _ in 0..max_iter {
        let mut worst: f64 = 0.0;
        let mut settled = true;
        for i in 0..n {
            let (p, dp) = poly::eval_with_derivative(&c[..=n], z[i]);
            if p.norm() <= noise(z[i]) {
                continue;
            }
            settled = false;
            let ratio = p / dp;
            let sum: Complex64 = (0..n).filter(|&j| j != i).map(|j| (z[i] - z[j]).inv()).sum();
            let step = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            z[i] -= step;
            worst = worst.max(step.norm() / z[i].norm().max(1.0));
        }
        if settled || worst < tol {
            return Ok(z);
        }
    }
    let residual = z.iter().map(|&zi| poly::eval(&c[..=n], zi).norm()).fold(0.0, f64::max);
    Err(Error::ResidualTooLarge { residual, limit: tol })
}

/// A few Newton steps on the polynomial, kept only while they reduce `|p|`.
pub fn polish(c: &[f64], z: Complex64) -> Complex64 {
    let mut best = z;
    let mut best_val = poly::eval(c, z).norm();
    for _ in 0..8 {
        let (p, dp) = poly::eval_with_derivative(c, best);
        if dp.norm() == 0.0 || best_val == 0.0 {
            break;
        }
        let cand = best - p / dp;
        let v = poly::eval(c, cand).norm();
        if v < best_val {
            best = cand;
            best_val = v;
        } else {
            break;
        }
    }
    best
}

/// Companion-matrix roots, falling back to Aberth when the QR iteration
/// stalls or produces non-finite values; every root is polished.
pub fn roots(c: &[f64]) -> Result<Vec<Complex64>> {
    let raw = match companion_roots(c) {
        Ok(r) if r.iter().all(|z| z.re.is_finite() && z.im.is_finite()) => r,
        _ => aberth(c, 500, 1e-13)?,
    };
    Ok(raw.into_iter().map(|z| polish(c, z)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close_sets(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().all(|x| b.iter().any(|y| (x - y).norm() < tol))
    }

    #[test]
    fn quadratic_and_cubic() {
        // z^2 + 1/3
        let r = companion_roots(&[1.0 / 3.0, 0.0, 1.0]).unwrap();
        let s = 1.0 / 3f64.sqrt();
        assert!(close_sets(&r, &[Complex64::new(0.0, s), Complex64::new(0.0, -s)], 1e-14));
        // (z - 1)(z - 2)(z + 3) = z^3 - 7 z + 6
        let r = companion_roots(&[6.0, -7.0, 0.0, 1.0]).unwrap();
        let e = [1.0, 2.0, -3.0].map(|x| Complex64::new(x, 0.0));
        assert!(close_sets(&r, &e, 1e-12));
    }

    #[test]
    fn wilkinson_like_degree_eight() {
        let e: Vec<Complex64> = (1..=8).map(|k| Complex64::new(k as f64, 0.0)).collect();
        let c = poly::from_roots(1.0, &e);
        let r = roots(&c).unwrap();
        assert!(close_sets(&r, &e, 1e-8));
        let r = aberth(&c, 500, 1e-13).unwrap();
        assert!(close_sets(&r, &e, 1e-8));
    }

    #[test]
    fn complex_pairs() {
        let e = [
            Complex64::new(0.3, 0.7),
            Complex64::new(0.3, -0.7),
            Complex64::new(-1.2, 0.1),
            Complex64::new(-1.2, -0.1),
            Complex64::new(0.5, 0.0),
        ];
        let c = poly::from_roots(3.0, &e);
        assert!(close_sets(&roots(&c).unwrap(), &e, 1e-12));
        assert!(close_sets(&aberth(&c, 500, 1e-13).unwrap(), &e, 1e-12));
    }

    #[test]
    fn degenerate_inputs() {
        assert!(companion_roots(&[0.0, 0.0]).is_err());
        assert!(companion_roots(&[2.0]).unwrap().is_empty());
        let r = companion_roots(&[1.0, 3.0]).unwrap();
        assert!((r[0] + Complex64::new(1.0 / 3.0, 0.0)).norm() < 1e-15);
    }
}
