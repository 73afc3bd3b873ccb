//! Reference implementations used as oracles. Deliberately naive: plain
//! loops, no shared code with the library.

#![allow(dead_code)]

use geneval_core::EmbeddingSet;
use ndarray::{Array1, Array2};
use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn normal_matrix(rng: &mut ChaCha8Rng, n: usize, d: usize) -> Array2<f64> {
    Array2::from_shape_fn((n, d), |_| StandardNormal.sample(rng))
}

pub fn set(data: Array2<f64>, backbone: &str) -> EmbeddingSet {
    EmbeddingSet::new(data, backbone, "x").unwrap()
}

/// `B Bᵀ / cols` for a random `d × cols` matrix `B`; rank min(d, cols).
pub fn random_psd(rng: &mut ChaCha8Rng, d: usize, cols: usize) -> Array2<f64> {
    let b = normal_matrix(rng, d, cols);
    let mut s = b.dot(&b.t()) / cols as f64;
    symmetrize(&mut s);
    s
}

pub fn symmetrize(s: &mut Array2<f64>) {
    let d = s.nrows();
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (s[(i, j)] + s[(j, i)]);
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
}

/// Random orthogonal matrix from Gram–Schmidt on a Gaussian matrix.
pub fn random_rotation(rng: &mut ChaCha8Rng, d: usize) -> Array2<f64> {
    let mut q = normal_matrix(rng, d, d);
    for j in 0..d {
        for k in 0..j {
            let dot: f64 = (0..d).map(|i| q[(i, j)] * q[(i, k)]).sum();
            for i in 0..d {
                q[(i, j)] -= dot * q[(i, k)];
            }
        }
        let norm: f64 = (0..d).map(|i| q[(i, j)] * q[(i, j)]).sum::<f64>().sqrt();
        for i in 0..d {
            q[(i, j)] /= norm;
        }
    }
    q
}

/// Cyclic Jacobi eigenvalue iteration for symmetric matrices.
pub fn jacobi_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut a = a.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[(i, j)] * a[(i, j)])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[(p, q)].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * a[(p, q)]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[(k, p)], a[(k, q)]);
                    a[(k, p)] = c * akp - s * akq;
                    a[(k, q)] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[(p, k)], a[(q, k)]);
                    a[(p, k)] = c * apk - s * aqk;
                    a[(q, k)] = s * apk + c * aqk;
                }
                for k in 0..n {
                    let (vkp, vkq) = (v[(k, p)], v[(k, q)]);
                    v[(k, p)] = c * vkp - s * vkq;
                    v[(k, q)] = s * vkp + c * vkq;
                }
            }
        }
    }
    ((0..n).map(|i| a[(i, i)]).collect(), v)
}

/// Principal square root of a PSD matrix via Jacobi.
pub fn sqrt_psd(a: &Array2<f64>) -> Array2<f64> {
    let (w, v) = jacobi_eigen(a);
    let n = a.nrows();
    Array2::from_shape_fn((n, n), |(i, j)| {
        (0..n).map(|k| v[(i, k)] * w[k].max(0.0).sqrt() * v[(j, k)]).sum()
    })
}

/// `Tr((A B)^{1/2})` as `Tr((A^{1/2} B A^{1/2})^{1/2})`, all via Jacobi.
pub fn trace_sqrt_jacobi(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let s = sqrt_psd(a);
    let mut m = s.dot(b).dot(&s);
    symmetrize(&mut m);
    jacobi_eigen(&m).0.iter().map(|&l| l.max(0.0).sqrt()).sum()
}

fn inverse(a: &Array2<f64>) -> Array2<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    let mut inv = Array2::<f64>::eye(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| m[(x, col)].abs().total_cmp(&m[(y, col)].abs()))
            .unwrap();
        for k in 0..n {
            m.swap((col, k), (pivot, k));
            inv.swap((col, k), (pivot, k));
        }
        let p = m[(col, col)];
        for k in 0..n {
            m[(col, k)] /= p;
            inv[(col, k)] /= p;
        }
        for r in 0..n {
            if r != col {
                let f = m[(r, col)];
                for k in 0..n {
                    m[(r, k)] -= f * m[(col, k)];
                    inv[(r, k)] -= f * inv[(col, k)];
                }
            }
        }
    }
    inv
}

/// `Tr((A B)^{1/2})` by Denman–Beavers iteration on the non-symmetric
/// product. Needs A B nonsingular.
pub fn trace_sqrt_denman_beavers(a: &Array2<f64>, b: &Array2<f64>) -> f64 {
    let n = a.nrows();
    let mut y = a.dot(b);
    let mut z = Array2::<f64>::eye(n);
    for _ in 0..100 {
        let yi = inverse(&y);
        let zi = inverse(&z);
        let y_next = (&y + &zi) * 0.5;
        let z_next = (&z + &yi) * 0.5;
        let delta = (&y_next - &y).iter().fold(0.0f64, |m, v| m.max(v.abs()));
        y = y_next;
        z = z_next;
        if delta < 1e-15 * y.iter().fold(1.0f64, |m, v| m.max(v.abs())) {
            break;
        }
    }
    y.diag().sum()
}

pub fn frechet_dense(
    mu_r: &Array1<f64>,
    sigma_r: &Array2<f64>,
    mu_g: &Array1<f64>,
    sigma_g: &Array2<f64>,
) -> f64 {
    let mean: f64 = mu_r.iter().zip(mu_g).map(|(a, b)| (a - b) * (a - b)).sum();
    mean + sigma_r.diag().sum() + sigma_g.diag().sum() - 2.0 * trace_sqrt_jacobi(sigma_r, sigma_g)
}

/// Unbiased MMD² by explicit triple loops over pairs and coordinates.
pub fn kid_triple_sum(x: &Array2<f64>, y: &Array2<f64>, gamma: f64, coef: f64, degree: u32) -> f64 {
    let m = x.nrows();
    let d = x.ncols();
    let k = |a: &Array2<f64>, i: usize, b: &Array2<f64>, j: usize| {
        let mut dot = 0.0;
        for c in 0..d {
            dot += a[(i, c)] * b[(j, c)];
        }
        (gamma * dot + coef).powi(degree as i32)
    };
    let (mut xx, mut yy, mut xy) = (0.0, 0.0, 0.0);
    for i in 0..m {
        for j in 0..m {
            if i != j {
                xx += k(x, i, x, j);
                yy += k(y, i, y, j);
            }
            xy += k(x, i, y, j);
        }
    }
    let mf = m as f64;
    xx / (mf * (mf - 1.0)) + yy / (mf * (mf - 1.0)) - 2.0 * xy / (mf * mf)
}

/// Precision and recall by sorting every distance list.
pub fn pr_brute_force(real: &Array2<f64>, gen: &Array2<f64>, k: usize) -> (f64, f64) {
    let d2 = |a: &Array2<f64>, i: usize, b: &Array2<f64>, j: usize| -> f64 {
        (0..a.ncols()).map(|c| (a[(i, c)] - b[(j, c)]).powi(2)).sum()
    };
    let radii = |s: &Array2<f64>| -> Vec<f64> {
        (0..s.nrows())
            .map(|i| {
                let mut all: Vec<f64> =
                    (0..s.nrows()).filter(|&j| j != i).map(|j| d2(s, i, s, j)).collect();
                all.sort_by(f64::total_cmp);
                all[k - 1]
            })
            .collect()
    };
    let cover = |q: &Array2<f64>, r: &Array2<f64>, radii: &[f64]| -> f64 {
        let hits = (0..q.nrows())
            .filter(|&i| (0..r.nrows()).any(|j| d2(q, i, r, j) <= radii[j]))
            .count();
        hits as f64 / q.nrows() as f64
    };
    let rr = radii(real);
    let gr = radii(gen);
    (cover(gen, real, &rr), cover(real, gen, &gr))
}

/// Inception score of one split, straight from the definition.
pub fn inception_brute_force(p: &Array2<f64>) -> f64 {
    let (n, c) = p.dim();
    let marginal: Vec<f64> = (0..c).map(|j| (0..n).map(|i| p[(i, j)]).sum::<f64>() / n as f64).collect();
    let mut kl = 0.0;
    for i in 0..n {
        for j in 0..c {
            if p[(i, j)] > 0.0 {
                kl += p[(i, j)] * (p[(i, j)] / marginal[j]).ln();
            }
        }
    }
    (kl / n as f64).exp()
}

/// Random row-stochastic matrix; `peaked` sharpens rows toward one class.
pub fn random_probabilities(rng: &mut ChaCha8Rng, n: usize, c: usize, peaked: bool) -> Array2<f64> {
    let mut p = Array2::from_shape_fn((n, c), |_| {
        let u: f64 = rng.random_range(0.0..1.0);
        if peaked {
            u.powi(8)
        } else {
            u
        }
    });
    for mut row in p.rows_mut() {
        if row.sum() == 0.0 {
            row[0] = 1.0;
        }
        let s = row.sum();
        row.mapv_inplace(|v| v / s);
    }
    p
}

pub fn integer_points(rng: &mut ChaCha8Rng, n: usize, lo: i32, hi: i32) -> Array2<f64> {
    Array2::from_shape_fn((n, 2), |_| rng.random_range(lo..hi) as f64)
}
