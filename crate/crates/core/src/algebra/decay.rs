//! Off-diagonal decay norms of matrices, on the index window `{0, …, n-1}`.

use crate::error::{Error, Result};
use crate::group::section::lp_of;
use crate::matrix::ComplexMatrix;

fn check_p(p: f64) -> Result<()> {
    if p >= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!("exponent p = {p} < 1")))
    }
}

fn nu(alpha: f64, i: usize, j: usize) -> f64 {
    (1.0 + i.abs_diff(j) as f64).powf(alpha)
}

/// `max{ sup_i ‖(a(i,j) ν(i,j))_j‖_p, sup_j ‖(a(i,j) ν(i,j))_i‖_p }`.
pub fn groschur_norm(a: &ComplexMatrix, p: f64, alpha: f64) -> Result<f64> {
    check_p(p)?;
    let n = a.dim();
    let mut best: f64 = 0.0;
    let mut buf = vec![0.0; n];
    for i in 0..n {
        for (j, b) in buf.iter_mut().enumerate() {
            *b = a[(i, j)].norm() * nu(alpha, i, j);
        }
        best = best.max(lp_of(&buf, p));
        for (j, b) in buf.iter_mut().enumerate() {
            *b = a[(j, i)].norm() * nu(alpha, i, j);
        }
        best = best.max(lp_of(&buf, p));
    }
    Ok(best)
}

/// Weighted sup along each diagonal, indexed by `k = i - j + (n - 1)`.
fn diagonal_sups(a: &ComplexMatrix, alpha: f64) -> Vec<f64> {
    let n = a.dim();
    let mut d = vec![0.0f64; 2 * n - 1];
    for i in 0..n {
        for j in 0..n {
            let k = i + n - 1 - j;
            d[k] = d[k].max(a[(i, j)].norm() * nu(alpha, i, j));
        }
    }
    d
}

/// `‖(sup_{i-j=k} |a(i,j)| ν(i,j))_k‖_p`.
pub fn bgs_norm(a: &ComplexMatrix, p: f64, alpha: f64) -> Result<f64> {
    check_p(p)?;
    Ok(lp_of(&diagonal_sups(a, alpha), p))
}

/// `‖(sup_{|i-j| ≥ |k|} |a(i,j)| ν(i,j))_k‖_p`, `k` over the realized differences.
pub fn beurling_norm(a: &ComplexMatrix, p: f64, alpha: f64) -> Result<f64> {
    check_p(p)?;
    let n = a.dim();
    let d = diagonal_sups(a, alpha);
    // tail[m] = sup over |i - j| ≥ m.
    let mut tail = vec![0.0f64; n + 1];
    for m in (0..n).rev() {
        tail[m] = tail[m + 1].max(d[n - 1 + m]).max(d[n - 1 - m]);
    }
    let seq: Vec<f64> = (0..2 * n - 1).map(|k| tail[k.abs_diff(n - 1)]).collect();
    Ok(lp_of(&seq, p))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn ones(n: usize) -> ComplexMatrix {
        ComplexMatrix::from_fn(n, |_, _| Complex64::new(1.0, 0.0))
    }

    fn single(n: usize, i: usize, j: usize) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(n);
        m[(i, j)] = Complex64::new(1.0, 0.0);
        m
    }

    /// Literal transcription of the three definitions, with `k` ranging over a wide band.
    fn brute(a: &ComplexMatrix, p: f64, alpha: f64) -> (f64, f64, f64) {
        let n = a.dim() as i64;
        let w = |i: i64, j: i64| a[(i as usize, j as usize)].norm() * (1.0 + (i - j).abs() as f64).powf(alpha);
        let lp = |v: Vec<f64>| -> f64 {
            if p.is_infinite() {
                v.into_iter().fold(0.0, f64::max)
            } else {
                v.into_iter().map(|x| x.powf(p)).sum::<f64>().powf(1.0 / p)
            }
        };
        let mut gs: f64 = 0.0;
        for i in 0..n {
            gs = gs.max(lp((0..n).map(|j| w(i, j)).collect()));
            gs = gs.max(lp((0..n).map(|j| w(j, i)).collect()));
        }
        let band = -(n - 1)..=(n - 1);
        let bgs = lp(band
            .clone()
            .map(|k| {
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .filter(|(i, j)| i - j == k)
                    .map(|(i, j)| w(i, j))
                    .fold(0.0, f64::max)
            })
            .collect());
        let beur = lp(band
            .map(|k| {
                (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .filter(|(i, j)| (i - j).abs() >= k.abs())
                    .map(|(i, j)| w(i, j))
                    .fold(0.0, f64::max)
            })
            .collect());
        (gs, bgs, beur)
    }

    #[test]
    fn identity_gives_one() {
        for p in [1.0, 2.0, f64::INFINITY] {
            for alpha in [0.0, 1.0, 2.5] {
                let i = ComplexMatrix::identity(5);
                assert_eq!(groschur_norm(&i, p, alpha).unwrap(), 1.0);
                assert_eq!(bgs_norm(&i, p, alpha).unwrap(), 1.0);
                assert_eq!(beurling_norm(&i, p, alpha).unwrap(), 1.0);
            }
        }
    }

    #[test]
    fn small_examples() {
        assert_eq!(groschur_norm(&single(4, 0, 3), 2.0, 1.5).unwrap(), 4f64.powf(1.5));
        assert_eq!(groschur_norm(&ones(3), 1.0, 1.0).unwrap(), 6.0);
        let mut two = ComplexMatrix::zeros(3);
        two[(0, 1)] = Complex64::new(1.0, 0.0);
        two[(1, 2)] = Complex64::new(1.0, 0.0);
        assert_eq!(bgs_norm(&two, 1.0, 0.0).unwrap(), 1.0);
        // Diagonals k = -2..2 carry sups 1 with weights 3, 2, 1, 2, 3.
        assert_eq!(bgs_norm(&ones(3), 1.0, 1.0).unwrap(), 11.0);
        assert_eq!(beurling_norm(&single(3, 0, 2), 1.0, 0.0).unwrap(), 5.0);
        assert_eq!(beurling_norm(&ComplexMatrix::zeros(3), 1.0, 0.0).unwrap(), 0.0);
        assert!(groschur_norm(&ones(3), 0.5, 1.0).is_err());
    }

    #[test]
    fn matches_literal_definitions() {
        let mut rng = crate::rng::sample_rng(7, 0);
        for n in [1usize, 2, 5, 9] {
            let a = crate::rng::random_matrix(&mut rng, n);
            for p in [1.0, 1.5, 2.0, f64::INFINITY] {
                for alpha in [0.0, 0.7, 2.0] {
                    let (gs, bgs, beur) = brute(&a, p, alpha);
                    let tol = 1e-12 * (1.0 + beur);
                    assert!((groschur_norm(&a, p, alpha).unwrap() - gs).abs() <= tol);
                    assert!((bgs_norm(&a, p, alpha).unwrap() - bgs).abs() <= tol);
                    assert!((beurling_norm(&a, p, alpha).unwrap() - beur).abs() <= tol);
                }
            }
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn arb_matrix() -> impl Strategy<Value = ComplexMatrix> {
            (1usize..8).prop_flat_map(|n| {
                prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), n * n).prop_map(move |v| {
                    ComplexMatrix::new(n, v.into_iter().map(|(a, b)| Complex64::new(a, b)).collect()).unwrap()
                })
            })
        }

        proptest! {
            #[test]
            fn nesting(a in arb_matrix(), p in prop::sample::select(vec![1.0, 1.5, 2.0, 4.0, f64::INFINITY]), alpha in 0.0f64..3.0) {
                let gs = groschur_norm(&a, p, alpha).unwrap();
                let bgs = bgs_norm(&a, p, alpha).unwrap();
                let beur = beurling_norm(&a, p, alpha).unwrap();
                prop_assert!(beur >= bgs - 1e-9);
                prop_assert!(bgs >= gs - 1e-9);
            }

            #[test]
            fn sup_collapse(a in arb_matrix(), alpha in 0.0f64..3.0) {
                let gs = groschur_norm(&a, f64::INFINITY, alpha).unwrap();
                prop_assert!((bgs_norm(&a, f64::INFINITY, alpha).unwrap() - gs).abs() <= 1e-12 * (1.0 + gs));
                prop_assert!((beurling_norm(&a, f64::INFINITY, alpha).unwrap() - gs).abs() <= 1e-12 * (1.0 + gs));
            }

            #[test]
            fn involution_is_isometric(a in arb_matrix(), p in 1.0f64..5.0, alpha in 0.0f64..3.0) {
                let adj = a.adjoint();
                for f in [groschur_norm, bgs_norm, beurling_norm] {
                    let x = f(&a, p, alpha).unwrap();
                    prop_assert!((f(&adj, p, alpha).unwrap() - x).abs() <= 1e-12 * (1.0 + x));
                }
            }
        }
    }
}
