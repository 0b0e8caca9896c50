//! Eigenvalues of Hermitian matrices via cyclic Jacobi rotations on the real
//! symmetric embedding `[[Re A, -Im A], [Im A, Re A]]`.
//!
//! Every eigenvalue of the `n × n` Hermitian matrix appears twice in the
//! spectrum of the `2n × 2n` embedding.

use super::CMatrix;

const MAX_SWEEPS: usize = 100;

/// Eigenvalues of a Hermitian matrix in ascending order. Only the Hermitian
/// part of the input is used.
pub fn hermitian_eigenvalues(a: &CMatrix) -> Vec<f64> {
    let n = a.rows();
    let m = 2 * n;
    let mut s = vec![0.0f64; m * m];
    let h = a.hermitian_part();
    for i in 0..n {
        for j in 0..n {
            let z = h[(i, j)];
            s[i * m + j] = z.re;
            s[(i + n) * m + (j + n)] = z.re;
            s[i * m + (j + n)] = -z.im;
            s[(i + n) * m + j] = z.im;
        }
    }
    let mut evs = jacobi_symmetric(&mut s, m);
    evs.sort_by(f64::total_cmp);
    // Each eigenvalue is duplicated; keep one of each pair.
    evs.chunks(2).map(|p| 0.5 * (p[0] + p[1])).collect()
}

pub fn min_eigenvalue(a: &CMatrix) -> f64 {
    hermitian_eigenvalues(a)
        .first()
        .copied()
        .unwrap_or(0.0)
}

fn jacobi_symmetric(s: &mut [f64], m: usize) -> Vec<f64> {
    let scale = s.iter().map(|x| x.abs()).fold(0.0, f64::max).max(1e-300);
    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..m)
            .flat_map(|i| (0..m).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| s[i * m + j] * s[i * m + j])
            .sum();
        if off.sqrt() <= 1e-15 * scale {
            break;
        }
        for p in 0..m {
            for q in (p + 1)..m {
                let apq = s[p * m + q];
                if apq.abs() <= 1e-300 {
                    continue;
                }
                let app = s[p * m + p];
                let aqq = s[q * m + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                for k in 0..m {
                    let akp = s[k * m + p];
                    let akq = s[k * m + q];
                    s[k * m + p] = c * akp - sn * akq;
                    s[k * m + q] = sn * akp + c * akq;
                }
                for k in 0..m {
                    let apk = s[p * m + k];
                    let aqk = s[q * m + k];
                    s[p * m + k] = c * apk - sn * aqk;
                    s[q * m + k] = sn * apk + c * aqk;
                }
            }
        }
    }
    (0..m).map(|i| s[i * m + i]).collect()
}
