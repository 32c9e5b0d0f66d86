//! Compressions of the left regular representation to balls.
//!
//! For a section `f` and radius `r`, `T = P λ(f) P` acts on `ℓ²(B(e, r))`
//! with matrix entries `T[x, z] = f(x z⁻¹)`. Its norm increases with `r` and
//! bounds `‖λ(f)‖` from below.

use std::collections::HashMap;

use num_complex::Complex64;

use super::model::{Element, GroupFamily, GroupModel};
use super::section::WeightedSection;
use crate::error::Result;
use crate::matrix::{operator_norm, ComplexMatrix};

const NONE: u32 = u32::MAX;
/// Ball sizes up to this are handled by a dense SVD.
const DENSE_LIMIT: usize = 400;
/// Free-group walks with at most this many entries are cached as a sparse matrix.
const CSR_ENTRY_CAP: usize = 40_000_000;

enum Kernel {
    /// `(x, z, coefficient)` triples sorted by `z`.
    Sparse(Vec<(u32, u32, Complex64)>),
    /// Free groups: left-multiplication table plus a trie of reversed support words.
    FreeWalk {
        left: Vec<u32>,
        gens: usize,
        trie: Vec<TrieNode>,
    },
    /// Entries grouped by column `z`: rows and indices into `coeffs`.
    Csr {
        offsets: Vec<usize>,
        rows: Vec<u32>,
        which: Vec<u32>,
        coeffs: Vec<Complex64>,
    },
}

struct TrieNode {
    coeff: Complex64,
    children: Vec<(usize, usize)>,
}

/// The operator `P λ(f) P` on `ℓ²(B(e, r))`.
pub struct BallOperator {
    size: usize,
    kernel: Kernel,
}

fn letter_index(letter: i64) -> usize {
    let a = (letter.unsigned_abs() as usize - 1) * 2;
    if letter > 0 {
        a
    } else {
        a + 1
    }
}

impl BallOperator {
    pub fn new(f: &WeightedSection, r: usize) -> Result<Self> {
        let g = f.group();
        let ball = g.ball(r)?;
        let index: HashMap<&Element, u32> = ball.iter().enumerate().map(|(i, x)| (x, i as u32)).collect();
        let size = ball.len();
        let kernel = match g.family() {
            GroupFamily::Free { rank } => Self::free_kernel(g, rank, &ball, &index, f),
            _ => {
                let mut triples = Vec::new();
                for (zi, z) in ball.iter().enumerate() {
                    for (y, v) in f.terms() {
                        if let Some(&xi) = index.get(&g.multiply(y, z)) {
                            triples.push((xi, zi as u32, *v));
                        }
                    }
                }
                Kernel::Sparse(triples)
            }
        };
        let mut op = Self { size, kernel };
        if size > DENSE_LIMIT {
            op.cache_walk();
        }
        Ok(op)
    }

    /// Replaces a free-group walk by its explicit entries when they fit the cap.
    fn cache_walk(&mut self) {
        let Kernel::FreeWalk { trie, .. } = &self.kernel else {
            return;
        };
        let mut count = 0usize;
        self.walk(|_, _, _| count += 1);
        if count > CSR_ENTRY_CAP {
            return;
        }
        let coeffs: Vec<Complex64> = trie.iter().map(|t| t.coeff).collect();
        let mut offsets = vec![0usize; self.size + 1];
        let mut rows = Vec::with_capacity(count);
        let mut which = Vec::with_capacity(count);
        self.walk(|x, z, node| {
            offsets[z + 1] += 1;
            rows.push(x as u32);
            which.push(node as u32);
        });
        for z in 0..self.size {
            offsets[z + 1] += offsets[z];
        }
        self.kernel = Kernel::Csr {
            offsets,
            rows,
            which,
            coeffs,
        };
    }

    /// Free-group walk: `visit(x, z, trie node)` for every nonzero entry, in increasing `z`.
    fn walk(&self, mut visit: impl FnMut(usize, usize, usize)) {
        let Kernel::FreeWalk { left, gens, trie } = &self.kernel else {
            return;
        };
        let mut stack: Vec<(usize, u32)> = Vec::new();
        for z in 0..self.size {
            stack.clear();
            stack.push((0, z as u32));
            while let Some((node, pos)) = stack.pop() {
                let t = &trie[node];
                if t.coeff.re != 0.0 || t.coeff.im != 0.0 {
                    visit(pos as usize, z, node);
                }
                for &(li, child) in &t.children {
                    let next = left[pos as usize * gens + li];
                    // Once a partial product leaves the ball, the full one does too.
                    if next != NONE {
                        stack.push((child, next));
                    }
                }
            }
        }
    }

    fn free_kernel(
        g: &GroupModel,
        rank: usize,
        ball: &[Element],
        index: &HashMap<&Element, u32>,
        f: &WeightedSection,
    ) -> Kernel {
        let gens = 2 * rank;
        let letters: Vec<Element> = (1..=rank as i64).flat_map(|i| [Element(vec![i]), Element(vec![-i])]).collect();
        let mut left = vec![NONE; ball.len() * gens];
        for (zi, z) in ball.iter().enumerate() {
            for (gi, a) in letters.iter().enumerate() {
                left[zi * gens + gi] = index.get(&g.multiply(a, z)).copied().unwrap_or(NONE);
            }
        }
        // y z = y_1 (y_2 (... (y_m z))): walk the letters of y from the right.
        let mut trie = vec![TrieNode {
            coeff: Complex64::new(0.0, 0.0),
            children: Vec::new(),
        }];
        for (y, v) in f.terms() {
            let mut node = 0;
            for &letter in y.0.iter().rev() {
                let li = letter_index(letter);
                node = match trie[node].children.iter().find(|c| c.0 == li) {
                    Some(&(_, child)) => child,
                    None => {
                        trie.push(TrieNode {
                            coeff: Complex64::new(0.0, 0.0),
                            children: Vec::new(),
                        });
                        let child = trie.len() - 1;
                        trie[node].children.push((li, child));
                        child
                    }
                };
            }
            trie[node].coeff += v;
        }
        Kernel::FreeWalk { left, gens, trie }
    }

    pub fn dim(&self) -> usize {
        self.size
    }

    /// Calls `visit(x, z, f(x z⁻¹))` for every nonzero matrix entry.
    fn for_each_entry(&self, mut visit: impl FnMut(usize, usize, Complex64)) {
        match &self.kernel {
            Kernel::Sparse(t) => {
                for &(x, z, v) in t {
                    visit(x as usize, z as usize, v);
                }
            }
            Kernel::FreeWalk { trie, .. } => self.walk(|x, z, node| visit(x, z, trie[node].coeff)),
            Kernel::Csr {
                offsets,
                rows,
                which,
                coeffs,
            } => {
                for z in 0..self.size {
                    for e in offsets[z]..offsets[z + 1] {
                        visit(rows[e] as usize, z, coeffs[which[e] as usize]);
                    }
                }
            }
        }
    }

    /// `out = T v`.
    pub fn apply(&self, v: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        self.for_each_entry(|x, z, c| out[x] += c * v[z]);
    }

    /// `out = T* w`.
    pub fn apply_adjoint(&self, w: &[Complex64], out: &mut [Complex64]) {
        out.iter_mut().for_each(|o| *o = Complex64::new(0.0, 0.0));
        self.for_each_entry(|x, z, c| out[z] += c.conj() * w[x]);
    }

    pub fn to_dense(&self) -> ComplexMatrix {
        let mut m = ComplexMatrix::zeros(self.size);
        self.for_each_entry(|x, z, c| m[(x, z)] += c);
        m
    }

    /// Operator norm: dense for small balls, two-pass Lanczos on `T*T` otherwise.
    ///
    /// The Lanczos value is `‖T u‖ / ‖u‖` for an explicit Ritz vector `u`,
    /// hence never above the true norm beyond rounding.
    pub fn norm(&self) -> f64 {
        if self.size <= DENSE_LIMIT {
            operator_norm(&self.to_dense())
        } else {
            self.lanczos_norm(200)
        }
    }

    fn gram_apply(&self, v: &[Complex64], tmp: &mut [Complex64], out: &mut [Complex64]) {
        self.apply(v, tmp);
        self.apply_adjoint(tmp, out);
    }

    pub(crate) fn lanczos_norm(&self, max_iter: usize) -> f64 {
        let n = self.size;
        let k_max = max_iter.min(n);
        let start = start_vector(n);
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut tmp = vec![Complex64::new(0.0, 0.0); n];
        let mut w = vec![Complex64::new(0.0, 0.0); n];
        let mut q = start.clone();
        let mut q_prev = vec![Complex64::new(0.0, 0.0); n];
        let mut last = f64::NEG_INFINITY;
        for j in 0..k_max {
            self.gram_apply(&q, &mut tmp, &mut w);
            let alpha: f64 = q.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
            let beta_prev = if j > 0 { betas[j - 1] } else { 0.0 };
            for i in 0..n {
                w[i] -= q[i] * alpha + q_prev[i] * beta_prev;
            }
            alphas.push(alpha);
            let beta = norm2(&w);
            if (j + 1) % 5 == 0 || beta <= 1e-13 * alpha.abs().max(1e-300) {
                let top = tridiag_top(&alphas, &betas);
                let done = top - last <= 1e-11 * top.abs() || beta <= 1e-13 * alpha.abs().max(1e-300);
                last = top;
                if done {
                    break;
                }
            }
            if j + 1 == k_max {
                break;
            }
            betas.push(beta);
            std::mem::swap(&mut q_prev, &mut q);
            for i in 0..n {
                q[i] = w[i] / beta;
            }
        }
        let k = alphas.len();
        betas.truncate(k.saturating_sub(1));
        let top = tridiag_top(&alphas, &betas);
        let s = tridiag_vector(&alphas, &betas, top);
        // Second pass: rebuild the Ritz vector from the same recurrence.
        let mut u = vec![Complex64::new(0.0, 0.0); n];
        let mut q = start;
        let mut q_prev = vec![Complex64::new(0.0, 0.0); n];
        for j in 0..k {
            for i in 0..n {
                u[i] += q[i] * s[j];
            }
            if j + 1 == k {
                break;
            }
            self.gram_apply(&q, &mut tmp, &mut w);
            let beta_prev = if j > 0 { betas[j - 1] } else { 0.0 };
            for i in 0..n {
                w[i] -= q[i] * alphas[j] + q_prev[i] * beta_prev;
            }
            std::mem::swap(&mut q_prev, &mut q);
            for i in 0..n {
                q[i] = w[i] / betas[j];
            }
        }
        let nu = norm2(&u);
        if nu == 0.0 {
            return 0.0;
        }
        self.apply(&u, &mut tmp);
        norm2(&tmp) / nu
    }
}

fn norm2(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Deterministic, strictly positive, non-constant start vector.
fn start_vector(n: usize) -> Vec<Complex64> {
    let mut v: Vec<Complex64> = (0..n)
        .map(|i| {
            let h = crate::rng::splitmix64(i as u64) as f64 / u64::MAX as f64;
            Complex64::new(1.0 + 0.5 * h, 0.0)
        })
        .collect();
    let s = norm2(&v);
    v.iter_mut().for_each(|z| *z /= s);
    v
}

/// Largest eigenvalue of the symmetric tridiagonal matrix, by Sturm bisection.
fn tridiag_top(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { b[i - 1].abs() } else { 0.0 } + if i + 1 < n { b[i].abs() } else { 0.0 };
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    // Number of eigenvalues strictly above x.
    let count_above = |x: f64| -> usize {
        let mut c = 0;
        let mut d = 1.0f64;
        for i in 0..n {
            let bb = if i > 0 { b[i - 1] * b[i - 1] } else { 0.0 };
            d = a[i] - x - bb / d;
            if d == 0.0 {
                d = -1e-300;
            }
            if d > 0.0 {
                c += 1;
            }
        }
        c
    };
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_above(mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    lo
}

/// Eigenvector for the top eigenvalue `theta`, by inverse iteration.
fn tridiag_vector(a: &[f64], b: &[f64], theta: f64) -> Vec<f64> {
    let n = a.len();
    let scale = a.iter().chain(b).fold(0.0f64, |m, x| m.max(x.abs())).max(1e-300);
    // Shifting above the spectrum makes `T - σ` negative definite, so no pivoting is needed.
    let sigma = theta + 1e-10 * scale;
    let mut s = vec![1.0; n];
    for _ in 0..4 {
        let mut d = vec![0.0; n];
        let mut y = s.clone();
        d[0] = a[0] - sigma;
        for i in 1..n {
            let l = b[i - 1] / d[i - 1];
            d[i] = a[i] - sigma - l * b[i - 1];
            y[i] -= l * y[i - 1];
        }
        let mut x = vec![0.0; n];
        x[n - 1] = y[n - 1] / d[n - 1];
        for i in (0..n - 1).rev() {
            x[i] = (y[i] - b[i] * x[i + 1]) / d[i];
        }
        let nx = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        s = x.iter().map(|v| v / nx).collect();
    }
    s
}

/// `‖P_r λ(f) P_r‖` on `ℓ²(B(e, r))`.
pub fn regular_rep_norm(f: &WeightedSection, r: usize) -> Result<f64> {
    Ok(BallOperator::new(f, r)?.norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::sync::Arc;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn brute_dense(f: &WeightedSection, r: usize) -> ComplexMatrix {
        let g = f.group();
        let ball = g.ball(r).unwrap();
        ComplexMatrix::from_fn(ball.len(), |i, j| f.get(&g.multiply(&ball[i], &g.inverse(&ball[j]))))
    }

    fn sample_section(g: &Arc<GroupModel>, radius: usize) -> WeightedSection {
        let ball = g.ball(radius).unwrap();
        WeightedSection::from_terms(
            g.clone(),
            ball.iter()
                .enumerate()
                .map(|(i, x)| (x.clone(), c(((i * 7) % 5) as f64 - 2.0, ((i * 3) % 4) as f64 - 1.5))),
        )
        .unwrap()
    }

    #[test]
    fn matrix_matches_brute_force() {
        for g in [GroupModel::free(2), GroupModel::lattice(2), GroupModel::heisenberg(), GroupModel::cyclic(7)] {
            let g = Arc::new(g);
            let f = sample_section(&g, 2);
            for r in 0..=3 {
                let op = BallOperator::new(&f, r).unwrap();
                assert_eq!(op.to_dense().max_abs_diff(&brute_dense(&f, r)), 0.0);
            }
        }
    }

    #[test]
    fn lanczos_matches_dense() {
        let g = Arc::new(GroupModel::free(2));
        let f = sample_section(&g, 2);
        let op = BallOperator::new(&f, 4).unwrap();
        let dense = operator_norm(&op.to_dense());
        let lz = op.lanczos_norm(400);
        assert!(lz <= dense * (1.0 + 1e-12));
        assert!(lz >= dense * (1.0 - 1e-8), "{lz} vs {dense}");
    }

    #[test]
    fn free_generator_sum_matches_radial_model() {
        let g = Arc::new(GroupModel::free(2));
        let gens: Vec<(Element, Complex64)> = g.generators().iter().map(|x| (x.clone(), c(1.0, 0.0))).collect();
        let f = WeightedSection::from_terms(g, gens).unwrap();
        for r in [2usize, 4, 6] {
            // The Perron vector is radial: tridiagonal with off-diagonals 2, √3, √3, ...
            let mut off = vec![2.0];
            off.extend(std::iter::repeat_n(3f64.sqrt(), r - 1));
            let want = tridiag_top(&vec![0.0; r + 1], &off);
            let got = regular_rep_norm(&f, r).unwrap();
            assert!((got - want).abs() < 1e-9, "r = {r}: {got} vs {want}");
            assert!(got <= 2.0 * 3f64.sqrt());
        }
    }

    #[test]
    fn monotone_in_radius() {
        let g = Arc::new(GroupModel::free(2));
        let f = sample_section(&g, 1);
        let mut prev = 0.0;
        for r in 0..=6 {
            let v = regular_rep_norm(&f, r).unwrap();
            assert!(v >= prev - 1e-9);
            prev = v;
        }
    }

    #[test]
    fn abelian_compressions_approach_cstar_norm() {
        let g = Arc::new(GroupModel::lattice(1));
        let f = WeightedSection::on_integers(g, &[(1, c(1.0, 0.0)), (-1, c(1.0, 0.0))]).unwrap();
        // Path graph on 2r+1 vertices: 2 cos(π / (2r + 2)).
        for r in [3usize, 10, 300] {
            let want = 2.0 * (std::f64::consts::PI / (2 * r + 2) as f64).cos();
            assert!((regular_rep_norm(&f, r).unwrap() - want).abs() < 1e-9);
        }
    }

    #[test]
    fn tridiagonal_helpers() {
        let a = [2.0, -1.0, 0.5, 3.0];
        let b = [1.0, 0.3, -0.7];
        let m = ComplexMatrix::from_fn(4, |i, j| {
            let v = if i == j {
                a[i]
            } else if i + 1 == j {
                b[i]
            } else if j + 1 == i {
                b[j]
            } else {
                0.0
            };
            c(v, 0.0)
        });
        let eig = crate::matrix::hermitian_eig(&m).unwrap();
        let top = *eig.eigenvalues.last().unwrap();
        assert!((tridiag_top(&a, &b) - top).abs() < 1e-12);
        let s = tridiag_vector(&a, &b, top);
        for i in 0..4 {
            let mut row = a[i] * s[i];
            if i > 0 {
                row += b[i - 1] * s[i - 1];
            }
            if i < 3 {
                row += b[i] * s[i + 1];
            }
            assert!((row - top * s[i]).abs() < 1e-9);
        }
    }
}
