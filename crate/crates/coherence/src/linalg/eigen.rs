//! Hermitian eigendecomposition via cyclic Jacobi rotations.
//!
//! Adequate and numerically robust at the dimensions this crate targets.
//! Termination: off-diagonal Frobenius norm ≤ 1e-12 or 100·d² sweeps,
//! whichever comes first.

use num_complex::Complex64;

use super::CMatrix;
use crate::error::{Error, Result};
use crate::tol;

/// Eigenvalues (descending) and matching eigenvectors (columns).
#[derive(Clone, Debug)]
pub struct HermEigen {
    pub values: Vec<f64>,
    pub vectors: CMatrix,
}

/// Eigenvalues of a Hermitian matrix, sorted descending.
pub fn herm_eigenvalues(m: &CMatrix) -> Result<Vec<f64>> {
    Ok(herm_eigen(m)?.values)
}

/// Full eigendecomposition of a Hermitian matrix.
pub fn herm_eigen(m: &CMatrix) -> Result<HermEigen> {
    let dev = m.hermiticity_deviation();
    if dev > tol::HERMITIAN {
        return Err(Error::NotHermitian { deviation: dev });
    }
    let d = m.dim();
    let mut a = m.clone();
    // Symmetrize once so rotations act on an exactly Hermitian matrix.
    for i in 0..d {
        a[(i, i)] = Complex64::new(a[(i, i)].re, 0.0);
        for j in (i + 1)..d {
            let avg = 0.5 * (a[(i, j)] + a[(j, i)].conj());
            a[(i, j)] = avg;
            a[(j, i)] = avg.conj();
        }
    }
    // Accumulate w with a_k = w·m·w†; eigenvectors are columns of w†.
    let mut w = CMatrix::identity(d);

    let max_sweeps = 100 * d * d;
    for _ in 0..max_sweeps {
        if off_diag_frobenius(&a) <= tol::EIGEN_OFFDIAG {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                rotate(&mut a, &mut w, p, q);
            }
        }
    }

    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&i, &j| {
        a[(j, j)]
            .re
            .partial_cmp(&a[(i, i)].re)
            .expect("eigenvalues are finite")
    });

    let values: Vec<f64> = order.iter().map(|&i| a[(i, i)].re).collect();
    let wd = w.dagger();
    let mut vectors = CMatrix::zeros(d);
    for (col, &src) in order.iter().enumerate() {
        for row in 0..d {
            vectors[(row, col)] = wd[(row, src)];
        }
    }
    Ok(HermEigen { values, vectors })
}

fn off_diag_frobenius(a: &CMatrix) -> f64 {
    let d = a.dim();
    let mut sum = 0.0;
    for i in 0..d {
        for j in 0..d {
            if i != j {
                sum += a[(i, j)].norm_sqr();
            }
        }
    }
    sum.sqrt()
}

/// One Jacobi rotation annihilating the (p, q) entry of a Hermitian matrix.
fn rotate(a: &mut CMatrix, w: &mut CMatrix, p: usize, q: usize) {
    let b = a[(p, q)];
    let m = b.norm();
    if m <= f64::EPSILON {
        return;
    }
    let phase = b / m;
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    let tau = (app - aqq) / (2.0 * m);
    let sign = if tau >= 0.0 { 1.0 } else { -1.0 };
    let t = -1.0 / (tau + sign * (tau * tau + 1.0).sqrt());
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // Unitary update rows/cols p, q of a: a <- u·a·u† with
    // u = [[c, -s·phase], [s·conj(phase), c]] on the (p, q) plane.
    let d = a.dim();
    let se_pos = s * phase; // s·e^{iφ}
    let se_neg = s * phase.conj(); // s·e^{-iφ}

    for j in 0..d {
        let rp = a[(p, j)];
        let rq = a[(q, j)];
        a[(p, j)] = c * rp - se_pos * rq;
        a[(q, j)] = se_neg * rp + c * rq;
    }
    for i in 0..d {
        let cp = a[(i, p)];
        let cq = a[(i, q)];
        a[(i, p)] = c * cp - se_neg * cq;
        a[(i, q)] = se_pos * cp + c * cq;
    }
    // The pivot pair is exactly annihilated; remove residual round-off.
    a[(p, q)] = Complex64::ZERO;
    a[(q, p)] = Complex64::ZERO;
    a[(p, p)] = Complex64::new(a[(p, p)].re, 0.0);
    a[(q, q)] = Complex64::new(a[(q, q)].re, 0.0);

    for j in 0..d {
        let rp = w[(p, j)];
        let rq = w[(q, j)];
        w[(p, j)] = c * rp - se_pos * rq;
        w[(q, j)] = se_neg * rp + c * rq;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::Permutation;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_hermitian(d: usize, seed: u64) -> CMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = CMatrix::zeros(d);
        for i in 0..d {
            m[(i, i)] = c(rng.gen_range(-1.0..1.0), 0.0);
            for j in (i + 1)..d {
                let z = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
                m[(i, j)] = z;
                m[(j, i)] = z.conj();
            }
        }
        m
    }

    /// Roots of the characteristic cubic of a 3×3 Hermitian matrix, solved
    /// with the trigonometric method. Independent of the Jacobi path.
    fn cubic_eigen_oracle(m: &CMatrix) -> Vec<f64> {
        assert_eq!(m.dim(), 3);
        // char poly: x^3 - tr·x^2 + m2·x - det, m2 = sum of principal minors.
        let tr = m.trace().re;
        let a = m[(0, 0)].re;
        let b = m[(1, 1)].re;
        let cc = m[(2, 2)].re;
        let f = m[(0, 1)];
        let g = m[(0, 2)];
        let h = m[(1, 2)];
        let m2 = a * b - f.norm_sqr() + a * cc - g.norm_sqr() + b * cc - h.norm_sqr();
        let det = (m[(0, 0)] * (m[(1, 1)] * m[(2, 2)] - m[(1, 2)] * m[(2, 1)])
            - m[(0, 1)] * (m[(1, 0)] * m[(2, 2)] - m[(1, 2)] * m[(2, 0)])
            + m[(0, 2)] * (m[(1, 0)] * m[(2, 1)] - m[(1, 1)] * m[(2, 0)]))
            .re;
        // x^3 - tr x^2 + m2 x - det = 0; depressed with x = y + tr/3.
        let p = m2 - tr * tr / 3.0;
        let q = -2.0 * tr * tr * tr / 27.0 + tr * m2 / 3.0 - det;
        // y^3 + p y + q = 0, three real roots for Hermitian input.
        let inner = (-p / 3.0).max(0.0);
        let r = 2.0 * inner.sqrt();
        let mut roots = if r < 1e-14 {
            vec![0.0, 0.0, 0.0]
        } else {
            let arg = (3.0 * q / (p * r)).clamp(-1.0, 1.0);
            let phi = arg.acos() / 3.0;
            (0..3)
                .map(|k| r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
                .collect()
        };
        for y in roots.iter_mut() {
            *y += tr / 3.0;
        }
        roots.sort_by(|x, y| y.partial_cmp(x).unwrap());
        roots
    }

    #[test]
    fn diagonal_input_is_returned_sorted() {
        let m = CMatrix::diagonal(&[0.5, 0.5]);
        assert_eq!(herm_eigenvalues(&m).unwrap(), vec![0.5, 0.5]);
        let m = CMatrix::diagonal(&[0.1, 0.9, 0.4]);
        assert_eq!(herm_eigenvalues(&m).unwrap(), vec![0.9, 0.4, 0.1]);
    }

    #[test]
    fn rank_one_projector() {
        let mut m = CMatrix::zeros(2);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = c(0.5, 0.0);
            }
        }
        let vals = herm_eigenvalues(&m).unwrap();
        assert!((vals[0] - 1.0).abs() < 1e-12);
        assert!(vals[1].abs() < 1e-12);
    }

    #[test]
    fn matches_cubic_root_oracle_on_random_3x3() {
        for seed in 0..50 {
            let m = random_hermitian(3, seed);
            let jacobi = herm_eigenvalues(&m).unwrap();
            let oracle = cubic_eigen_oracle(&m);
            for (a, b) in jacobi.iter().zip(&oracle) {
                assert!(
                    (a - b).abs() < 1e-8,
                    "seed {seed}: jacobi {jacobi:?} vs oracle {oracle:?}"
                );
            }
        }
    }

    #[test]
    fn eigenvalues_sum_to_trace() {
        for seed in 0..20 {
            let d = 2 + (seed as usize % 7);
            let m = random_hermitian(d, 1000 + seed);
            let vals = herm_eigenvalues(&m).unwrap();
            let sum: f64 = vals.iter().sum();
            assert!((sum - m.trace().re).abs() < 1e-9);
        }
    }

    #[test]
    fn reconstruction_residual_small() {
        for seed in 0..10 {
            let d = 2 + (seed as usize % 6);
            let m = random_hermitian(d, 77 + seed);
            let eig = herm_eigen(&m).unwrap();
            let mut rebuilt = CMatrix::zeros(d);
            for (k, &lambda) in eig.values.iter().enumerate() {
                for i in 0..d {
                    for j in 0..d {
                        rebuilt[(i, j)] +=
                            lambda * eig.vectors[(i, k)] * eig.vectors[(j, k)].conj();
                    }
                }
            }
            assert!(
                rebuilt.max_abs_diff(&m) <= tol::EIGEN_RESIDUAL,
                "seed {seed}: residual {}",
                rebuilt.max_abs_diff(&m)
            );
        }
    }

    #[test]
    fn permuted_diagonal_keeps_spectrum() {
        let m = CMatrix::diagonal(&[0.6, 0.25, 0.15]);
        let p = crate::linalg::perm_matrix(&Permutation::from_one_based(&[2, 3, 1]).unwrap());
        let rotated = m.conjugate_by(&p).unwrap();
        assert_eq!(herm_eigenvalues(&rotated).unwrap(), vec![0.6, 0.25, 0.15]);
    }

    #[test]
    fn non_hermitian_rejected() {
        let mut m = CMatrix::zeros(2);
        m[(0, 1)] = c(1.0, 0.0);
        assert!(matches!(
            herm_eigenvalues(&m),
            Err(Error::NotHermitian { .. })
        ));
    }
}
