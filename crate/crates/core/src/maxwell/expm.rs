//! Small dense real matrix exponentials and the `φ`-functions used by the
//! exponential integrators.

/// Row-major square matrix product.
fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut c = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                c[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    c
}

fn norm1(a: &[f64], n: usize) -> f64 {
    (0..n).map(|j| (0..n).map(|i| a[i * n + j].abs()).sum::<f64>()).fold(0.0, f64::max)
}

/// `exp(A)` for a row-major `n × n` matrix by scaling and squaring with a
/// truncated Taylor series.
pub fn expm(a: &[f64], n: usize) -> Vec<f64> {
    assert_eq!(a.len(), n * n, "matrix shape");
    let nrm = norm1(a, n);
    let mut s = 0u32;
    if nrm > 0.25 {
        s = (nrm / 0.25).log2().ceil() as u32;
    }
    let scale = (-(s as f64)).exp2();
    let x: Vec<f64> = a.iter().map(|v| v * scale).collect();
    // Σ_{k<=20} X^k / k!, evaluated by Horner's rule
    let mut r = identity(n);
    for k in (1..=20).rev() {
        let mut t = matmul(&x, &r, n);
        let inv = 1.0 / k as f64;
        for v in t.iter_mut() {
            *v *= inv;
        }
        for i in 0..n {
            t[i * n + i] += 1.0;
        }
        r = t;
    }
    for _ in 0..s {
        r = matmul(&r, &r, n);
    }
    r
}

pub fn identity(n: usize) -> Vec<f64> {
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        m[i * n + i] = 1.0;
    }
    m
}

/// `e^z`, `φ1(z) = (e^z - 1)/z` and `φ2(z) = (e^z - 1 - z)/z^2` for real `z`.
pub fn phi_scalar(z: f64) -> (f64, f64, f64) {
    let e = z.exp();
    if z.abs() < 0.2 {
        // series Σ z^k/(k+1)!, Σ z^k/(k+2)!
        let mut p1 = 0.0;
        let mut p2 = 0.0;
        let mut term1 = 1.0; // z^k/(k+1)!
        let mut term2 = 0.5; // z^k/(k+2)!
        for k in 0..20 {
            p1 += term1;
            p2 += term2;
            term1 *= z / (k as f64 + 2.0);
            term2 *= z / (k as f64 + 3.0);
        }
        (e, p1, p2)
    } else {
        let p1 = (e - 1.0) / z;
        (e, p1, (e - 1.0 - z) / (z * z))
    }
}

/// `(e^{A}, φ1(A), φ2(A))` for a real 2×2 matrix `A` (row-major), read off
/// the exponential of the block matrix `[[A, I, 0], [0, 0, I], [0, 0, 0]]`.
pub fn phi_2x2(a: [f64; 4]) -> ([f64; 4], [f64; 4], [f64; 4]) {
    let n = 6;
    let mut big = vec![0.0; n * n];
    big[0] = a[0];
    big[1] = a[1];
    big[n] = a[2];
    big[n + 1] = a[3];
    big[2] = 1.0;
    big[n + 3] = 1.0;
    big[2 * n + 4] = 1.0;
    big[3 * n + 5] = 1.0;
    let e = expm(&big, n);
    let block = |c0: usize| [e[c0], e[c0 + 1], e[n + c0], e[n + c0 + 1]];
    (block(0), block(2), block(4))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rotation_generator() {
        let t = 2.3f64;
        let e = expm(&[0.0, t, -t, 0.0], 2);
        assert!((e[0] - t.cos()).abs() < 1e-14);
        assert!((e[1] - t.sin()).abs() < 1e-14);
    }

    #[test]
    fn phi_series_matches_closed_form() {
        for z in [-0.19, -1e-6, 0.0, 1e-6, 0.19] {
            let (_, p1, p2) = phi_scalar(z);
            let w = 0.21f64.copysign(z);
            let (_, q1, q2) = phi_scalar(w);
            // continuity across the branch point
            assert!((p1 - q1).abs() < 0.2 && (p2 - q2).abs() < 0.2);
        }
        let (_, p1, p2) = phi_scalar(0.0);
        assert_eq!((p1, p2), (1.0, 0.5));
    }

    #[test]
    fn phi_2x2_diagonal_matches_scalar() {
        let (e, p1, p2) = phi_2x2([-3.0, 0.0, 0.0, 0.5]);
        let (a, b, c) = phi_scalar(-3.0);
        let (x, y, z) = phi_scalar(0.5);
        assert!((e[0] - a).abs() < 1e-14 && (e[3] - x).abs() < 1e-14);
        assert!((p1[0] - b).abs() < 1e-14 && (p1[3] - y).abs() < 1e-14);
        assert!((p2[0] - c).abs() < 1e-14 && (p2[3] - z).abs() < 1e-14);
    }
}

/// `(φ1(z), φ2(z))` for complex `z`.
pub fn phi_complex(z: crate::scalar::Cplx<f64>) -> (crate::scalar::Cplx<f64>, crate::scalar::Cplx<f64>) {
    use crate::scalar::Cplx;
    if z.norm() < 0.2 {
        let mut p1 = Cplx::new(0.0, 0.0);
        let mut p2 = Cplx::new(0.0, 0.0);
        let mut t1 = Cplx::new(1.0, 0.0);
        let mut t2 = Cplx::new(0.5, 0.0);
        for k in 0..20 {
            p1 += t1;
            p2 += t2;
            t1 = t1 * z / (k as f64 + 2.0);
            t2 = t2 * z / (k as f64 + 3.0);
        }
        (p1, p2)
    } else {
        let e = z.exp();
        let one = Cplx::new(1.0, 0.0);
        ((e - one) / z, (e - one - z) / (z * z))
    }
}
