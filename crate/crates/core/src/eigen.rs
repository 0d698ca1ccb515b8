//! Shift-and-invert Arnoldi iteration for a few eigenpairs of a real sparse
//! matrix closest to a target shift.
//!
//! The operator `(A - sigma I)^{-1}` is applied through one sparse LU
//! factorization; its dominant eigenvalues `theta` map back to the
//! eigenvalues `sigma + 1/theta` of `A` nearest `sigma`. The Krylov basis is
//! built with two-pass Gram-Schmidt and restarted explicitly from the sum of
//! the wanted Ritz vectors until every wanted pair has converged.

use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::sparse::{CsrMatrix, ShiftedLu};

#[derive(Debug, Clone, PartialEq)]
pub struct EigenOptions {
    /// Krylov subspace dimension; raised to at least `2 * count + 8`.
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Relative Ritz residual required for convergence.
    pub tol: f64,
    /// Seed of the deterministic start vector.
    pub seed: u64,
}

impl Default for EigenOptions {
    fn default() -> Self {
        EigenOptions {
            krylov_dim: 24,
            max_restarts: 40,
            tol: 1e-11,
            seed: 0x5eed_51a7,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub value: f64,
    /// Unit 2-norm eigenvector.
    pub vector: Vec<f64>,
    /// `||A v - value v|| / (||A||_inf ||v||)`.
    pub residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn scale(a: &mut [f64], s: f64) {
    a.iter_mut().for_each(|x| *x *= s);
}

/// Finds the `count` eigenvalues of `a` nearest `shift`, ordered by distance.
pub fn eigs_near(a: &CsrMatrix, shift: f64, count: usize, opts: &EigenOptions) -> Result<Vec<EigenPair>> {
    let n = a.dim();
    if count == 0 || count >= n {
        return Err(Error::domain(format!(
            "requested {count} eigenpairs of a {n}x{n} matrix"
        )));
    }
    let lu = ShiftedLu::new(a, shift)?;
    let m = opts.krylov_dim.max(2 * count + 8).min(n);

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();

    let mut last_residuals = Vec::new();
    for _restart in 0..opts.max_restarts {
        let (basis, h, steps) = arnoldi(&lu, &start, m);
        let ritz = ritz_pairs(&h, steps)?;

        let beta = if steps < h.nrows() {
            h[(steps, steps - 1)].abs()
        } else {
            0.0
        };
        let wanted: Vec<&Ritz> = ritz.iter().filter(|r| r.is_real()).take(count).collect();
        last_residuals = wanted
            .iter()
            .map(|r| beta * r.last_component.abs() / r.theta_abs)
            .collect();

        let converged = wanted.len() == count && last_residuals.iter().all(|&e| e <= opts.tol);
        if converged || steps < m {
            if wanted.len() < count {
                break;
            }
            return Ok(finish(a, shift, &basis, &wanted));
        }

        // explicit restart from the combined wanted Ritz vectors
        start = vec![0.0; n];
        for r in &wanted {
            let x = r.lift(&basis);
            start.iter_mut().zip(&x).for_each(|(s, v)| *s += v);
        }
        if norm(&start) == 0.0 {
            start = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
        }
    }
    Err(Error::Convergence {
        iterations: opts.max_restarts,
        residuals: last_residuals,
    })
}

/// Runs up to `m` Arnoldi steps; returns the basis, the `(m+1) x m`
/// Hessenberg matrix and the number of steps taken before any breakdown.
fn arnoldi(lu: &ShiftedLu, start: &[f64], m: usize) -> (Vec<Vec<f64>>, Mat<f64>, usize) {
    let mut h = Mat::<f64>::zeros(m + 1, m);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut v = start.to_vec();
    let nv = norm(&v);
    scale(&mut v, 1.0 / nv);
    basis.push(v);

    for j in 0..m {
        let mut w = basis[j].clone();
        lu.solve_in_place(&mut w);
        let wnorm0 = norm(&w);
        for _pass in 0..2 {
            for (i, q) in basis.iter().enumerate() {
                let c = dot(q, &w);
                h[(i, j)] += c;
                w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= c * qi);
            }
        }
        let hn = norm(&w);
        h[(j + 1, j)] = hn;
        if hn <= 1e-14 * wnorm0 {
            return (basis, h, j + 1);
        }
        scale(&mut w, 1.0 / hn);
        basis.push(w);
    }
    (basis, h, m)
}

struct Ritz {
    theta_re: f64,
    theta_im: f64,
    theta_abs: f64,
    /// Real coefficient vector in the Krylov basis (phase aligned).
    coeffs: Vec<f64>,
    last_component: f64,
}

impl Ritz {
    fn is_real(&self) -> bool {
        self.theta_im.abs() <= 1e-8 * self.theta_abs
    }

    fn lift(&self, basis: &[Vec<f64>]) -> Vec<f64> {
        let n = basis[0].len();
        let mut x = vec![0.0; n];
        for (c, q) in self.coeffs.iter().zip(basis) {
            x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += c * qi);
        }
        x
    }
}

fn ritz_pairs(h: &Mat<f64>, steps: usize) -> Result<Vec<Ritz>> {
    let hm = Mat::<f64>::from_fn(steps, steps, |i, j| h[(i, j)]);
    let evd = hm
        .eigen()
        .map_err(|e| Error::Linalg(format!("dense eigendecomposition: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let mut out: Vec<Ritz> = (0..steps)
        .map(|k| {
            let theta = s[k];
            // rotate the (complex) eigenvector onto the real axis
            let (mut pr, mut pi) = (0.0, 0.0);
            let mut best = 0.0;
            for i in 0..steps {
                let z = u[(i, k)];
                let mag = z.re * z.re + z.im * z.im;
                if mag > best {
                    best = mag;
                    pr = z.re;
                    pi = z.im;
                }
            }
            let pm = (pr * pr + pi * pi).sqrt();
            let (cr, ci) = (pr / pm, -pi / pm);
            let mut coeffs: Vec<f64> = (0..steps)
                .map(|i| {
                    let z = u[(i, k)];
                    z.re * cr - z.im * ci
                })
                .collect();
            let cn = norm(&coeffs);
            scale(&mut coeffs, 1.0 / cn);
            // residual estimate uses the full complex magnitude
            let zl = u[(steps - 1, k)];
            let full: f64 = (0..steps)
                .map(|i| {
                    let z = u[(i, k)];
                    z.re * z.re + z.im * z.im
                })
                .sum::<f64>()
                .sqrt();
            Ritz {
                theta_re: theta.re,
                theta_im: theta.im,
                theta_abs: (theta.re * theta.re + theta.im * theta.im).sqrt(),
                last_component: (zl.re * zl.re + zl.im * zl.im).sqrt() / full,
                coeffs,
            }
        })
        .collect();
    // dominant theta first; ties broken by value for determinism
    out.sort_by(|a, b| {
        b.theta_abs
            .total_cmp(&a.theta_abs)
            .then(b.theta_re.total_cmp(&a.theta_re))
    });
    Ok(out)
}

fn finish(a: &CsrMatrix, shift: f64, basis: &[Vec<f64>], wanted: &[&Ritz]) -> Vec<EigenPair> {
    let scale_a = a.norm_inf().max(shift.abs()).max(f64::MIN_POSITIVE);
    let n = a.dim();
    wanted
        .iter()
        .map(|r| {
            let mut x = r.lift(&basis[..r.coeffs.len()]);
            let nx = norm(&x);
            scale(&mut x, 1.0 / nx);
            // sign convention: largest component positive
            let imax = x
                .iter()
                .enumerate()
                .max_by(|p, q| p.1.abs().total_cmp(&q.1.abs()))
                .map(|(i, _)| i)
                .unwrap_or(0);
            if x[imax] < 0.0 {
                scale(&mut x, -1.0);
            }
            let mut ax = vec![0.0; n];
            a.matvec(&x, &mut ax);
            // Rayleigh quotient refines the eigenvalue past the shift mapping
            let value = dot(&x, &ax);
            let value = if value.is_finite() {
                value
            } else {
                shift + 1.0 / r.theta_re
            };
            let res: f64 = ax
                .iter()
                .zip(&x)
                .map(|(y, xi)| (y - value * xi).powi(2))
                .sum::<f64>()
                .sqrt();
            EigenPair {
                value,
                vector: x,
                residual: res / scale_a,
            }
        })
        .collect()
}
