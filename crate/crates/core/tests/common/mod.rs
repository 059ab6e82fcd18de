//! Test-only reference implementations. Nothing here calls into the crate's
//! algorithm code; matrices are plain `Vec<Vec<f64>>` multiplied by hand.

#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Mat = Vec<Vec<f64>>;

pub fn gaussian(beta: f64, u: &[f64], v: &[f64]) -> f64 {
    let sq: f64 = u.iter().zip(v).map(|(a, b)| (a - b) * (a - b)).sum();
    (-beta * sq).exp()
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut c = vec![vec![0.0; n]; n];
    for i in 0..n {
        for k in 0..n {
            for j in 0..n {
                c[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    c
}

pub fn identity(n: usize) -> Mat {
    (0..n).map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect()).collect()
}

/// Metropolis weights straight from the formula, for a self-inclusive adjacency.
pub fn metropolis(adj: &[Vec<bool>]) -> Mat {
    let n = adj.len();
    let deg: Vec<usize> = adj.iter().map(|r| r.iter().filter(|&&b| b).count()).collect();
    let mut a = vec![vec![0.0; n]; n];
    for k in 0..n {
        let mut off = 0.0;
        for l in 0..n {
            if l != k && adj[k][l] {
                a[k][l] = 1.0 / deg[k].max(deg[l]) as f64;
                off += a[k][l];
            }
        }
        a[k][k] = 1.0 - off;
    }
    a
}

/// Iterates `f_n = A (f_{n-1} + g(n) κ(x(n), ·))` on explicit coefficient
/// tables: `table[k][(i, l)]` is the coefficient of `κ(x_l(i), ·)` in `f_{k,n}`.
/// With `mask` set, coefficients of centers outside `N_k` are dropped after
/// every combine.
pub struct CoefficientTable {
    a: Mat,
    mu: Vec<f64>,
    beta: f64,
    mask: Option<Vec<Vec<bool>>>,
    centers: Vec<Vec<Vec<f64>>>,
    table: Vec<Vec<f64>>,
}

impl CoefficientTable {
    pub fn new(a: Mat, mu: Vec<f64>, beta: f64, mask: Option<Vec<Vec<bool>>>) -> Self {
        let k = a.len();
        CoefficientTable {
            a,
            mu,
            beta,
            mask,
            centers: Vec::new(),
            table: vec![Vec::new(); k],
        }
    }

    pub fn predict(&self, inputs: &[Vec<f64>]) -> Vec<f64> {
        let k_nodes = self.a.len();
        (0..k_nodes)
            .map(|k| {
                let mut acc = 0.0;
                for (i, slot) in self.centers.iter().enumerate() {
                    for l in 0..k_nodes {
                        acc += self.table[k][i * k_nodes + l] * gaussian(self.beta, &slot[l], &inputs[k]);
                    }
                }
                acc
            })
            .collect()
    }

    /// Returns the a-priori errors.
    pub fn step(&mut self, inputs: &[Vec<f64>], desired: &[f64]) -> Vec<f64> {
        let k_nodes = self.a.len();
        let pred = self.predict(inputs);
        let e: Vec<f64> = desired.iter().zip(&pred).map(|(d, p)| d - p).collect();
        // f'_j = f_{j,n-1} + μ_j e_j κ(x_j(n), ·)
        let mut adapted = self.table.clone();
        for (j, row) in adapted.iter_mut().enumerate() {
            row.resize(row.len() + k_nodes, 0.0);
            let len = row.len();
            row[len - k_nodes + j] += self.mu[j] * e[j];
        }
        let width = adapted[0].len();
        let mut next = vec![vec![0.0; width]; k_nodes];
        for k in 0..k_nodes {
            for j in 0..k_nodes {
                if self.a[k][j] == 0.0 {
                    continue;
                }
                for c in 0..width {
                    next[k][c] += self.a[k][j] * adapted[j][c];
                }
            }
            if let Some(mask) = &self.mask {
                for c in 0..width {
                    if !mask[k][c % k_nodes] {
                        next[k][c] = 0.0;
                    }
                }
            }
        }
        self.table = next;
        self.centers.push(inputs.to_vec());
        e
    }
}

/// Closed form with explicit powers: the prediction at step `n` sums slots
/// `i ∈ [max(1, n - window), n - 1]` with weight `[A^{n-i}]_{kl}`.
pub struct ClosedForm {
    powers: Vec<Mat>,
    mu: Vec<f64>,
    beta: f64,
    window: usize,
    centers: Vec<Vec<Vec<f64>>>,
    scaled: Vec<Vec<f64>>,
}

impl ClosedForm {
    pub fn new(a: &Mat, mu: Vec<f64>, beta: f64, window: usize, max_steps: usize) -> Self {
        let mut powers = vec![identity(a.len())];
        for _ in 0..max_steps {
            let next = matmul(powers.last().unwrap(), a);
            powers.push(next);
        }
        ClosedForm {
            powers,
            mu,
            beta,
            window,
            centers: Vec::new(),
            scaled: Vec::new(),
        }
    }

    pub fn predict(&self, inputs: &[Vec<f64>]) -> Vec<f64> {
        let n = self.centers.len() + 1;
        let k_nodes = inputs.len();
        let first = n.saturating_sub(self.window).max(1);
        (0..k_nodes)
            .map(|k| {
                let mut acc = 0.0;
                for i in first..n {
                    let p = &self.powers[n - i];
                    for l in 0..k_nodes {
                        acc += p[k][l] * self.scaled[i - 1][l] * gaussian(self.beta, &self.centers[i - 1][l], &inputs[k]);
                    }
                }
                acc
            })
            .collect()
    }

    pub fn step(&mut self, inputs: &[Vec<f64>], desired: &[f64]) -> Vec<f64> {
        let pred = self.predict(inputs);
        let e: Vec<f64> = desired.iter().zip(&pred).map(|(d, p)| d - p).collect();
        self.scaled.push(e.iter().zip(&self.mu).map(|(e, m)| e * m).collect());
        self.centers.push(inputs.to_vec());
        e
    }
}

/// Random connected self-inclusive adjacency on `k` nodes (spanning path
/// over a random permutation plus extra random edges).
pub fn random_adjacency(k: usize, rng: &mut impl Rng) -> Vec<Vec<bool>> {
    let mut adj = vec![vec![false; k]; k];
    for (i, row) in adj.iter_mut().enumerate() {
        row[i] = true;
    }
    let mut order: Vec<usize> = (0..k).collect();
    for i in (1..k).rev() {
        order.swap(i, rng.random_range(0..=i));
    }
    for w in order.windows(2) {
        adj[w[0]][w[1]] = true;
        adj[w[1]][w[0]] = true;
    }
    for a in 0..k {
        for b in a + 1..k {
            if rng.random::<f64>() < 0.3 {
                adj[a][b] = true;
                adj[b][a] = true;
            }
        }
    }
    adj
}

pub fn edges_of(adj: &[Vec<bool>]) -> Vec<[usize; 2]> {
    let mut e = Vec::new();
    for a in 0..adj.len() {
        for b in a + 1..adj.len() {
            if adj[a][b] {
                e.push([a, b]);
            }
        }
    }
    e
}

/// Random network data: `steps × K` regressors of dimension `dim` in [-1, 1]
/// and desired values in [-1, 1].
pub struct RandomData {
    pub inputs: Vec<Vec<Vec<f64>>>,
    pub desired: Vec<Vec<f64>>,
}

impl RandomData {
    pub fn new(steps: usize, k: usize, dim: usize, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs = (0..steps)
            .map(|_| (0..k).map(|_| (0..dim).map(|_| rng.random_range(-1.0..1.0)).collect()).collect())
            .collect();
        let desired = (0..steps)
            .map(|_| (0..k).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        RandomData { inputs, desired }
    }
}

pub fn rel_err(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-12)
}
