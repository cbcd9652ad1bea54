//! Fixtures and independent oracles shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use graphpum::{Graph, Signal, VertexSet};
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

pub fn data_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data").join(name)
}

pub fn minnesota() -> Graph {
    graphpum::io::read_graph_file(&data_path("minnesota.edges")).unwrap()
}

pub fn minnesota_signal(g: &Graph) -> Signal {
    graphpum::io::read_signal_file(&data_path("minnesota_signal.csv"), g.vertex_count()).unwrap()
}

pub fn path(n: usize) -> Graph {
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    Graph::from_edges(n, &edges).unwrap()
}

pub fn two_triangles() -> Graph {
    Graph::from_edges(6, &[(0, 1), (0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (4, 5)]).unwrap()
}

pub struct Rng(ChaCha8Rng);

impl Rng {
    pub fn new(seed: u64) -> Self {
        Rng(ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn below(&mut self, bound: usize) -> usize {
        (self.0.next_u64() % bound as u64) as usize
    }

    pub fn unit(&mut self) -> f64 {
        (self.0.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    /// Random subset of `0..n` with `k` elements.
    pub fn subset(&mut self, n: usize, k: usize) -> VertexSet {
        let mut ids: Vec<usize> = (0..n).collect();
        for i in 0..k {
            let j = i + self.below(n - i);
            ids.swap(i, j);
        }
        VertexSet::from_unsorted(ids[..k].iter().copied())
    }
}

/// Random spanning tree plus each remaining pair with probability `p`.
pub fn random_connected(n: usize, p: f64, rng: &mut Rng) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.below(v), v));
    }
    for u in 0..n {
        for v in (u + 1)..n {
            if rng.unit() < p {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, &edges).unwrap()
}

/// Connected unit-square geometric graph; redraws until connected.
pub fn random_geometric(n: usize, radius: f64, seed: u64) -> Graph {
    let mut rng = Rng::new(seed);
    loop {
        let pts: Vec<(f64, f64)> = (0..n).map(|_| (rng.unit(), rng.unit())).collect();
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let (dx, dy) = (pts[i].0 - pts[j].0, pts[i].1 - pts[j].1);
                if dx * dx + dy * dy <= radius * radius {
                    edges.push((i, j));
                }
            }
        }
        if let Ok(g) = Graph::from_edges(n, &edges) {
            return g;
        }
    }
}

pub fn dense_adjacency(g: &Graph) -> Vec<Vec<f64>> {
    let n = g.vertex_count();
    let mut a = vec![vec![0.0; n]; n];
    for (u, v) in g.edges() {
        a[u][v] = 1.0;
        a[v][u] = 1.0;
    }
    a
}

pub fn dense_laplacian(g: &Graph) -> Vec<Vec<f64>> {
    let mut a = dense_adjacency(g);
    for (i, row) in a.iter_mut().enumerate() {
        let d: f64 = row.iter().sum();
        for x in row.iter_mut() {
            *x = -*x;
        }
        row[i] = d;
    }
    a
}

/// `(1/2m) Σ_ij [A_ij − k_i k_j / 2m] δ(c_i, c_j)`.
pub fn brute_modularity(g: &Graph, labels: &[usize]) -> f64 {
    let a = dense_adjacency(g);
    let n = g.vertex_count();
    let k: Vec<f64> = a.iter().map(|r| r.iter().sum()).collect();
    let two_m: f64 = k.iter().sum();
    let mut q = 0.0;
    for i in 0..n {
        for j in 0..n {
            if labels[i] == labels[j] {
                q += a[i][j] - k[i] * k[j] / two_m;
            }
        }
    }
    q / two_m
}

/// `Σ_{k=1}^{terms} α^k A^k 1` by repeated dense products.
pub fn katz_series(g: &Graph, alpha: f64, terms: usize) -> Vec<f64> {
    let a = dense_adjacency(g);
    let n = g.vertex_count();
    let mut walk = vec![1.0; n];
    let mut total = vec![0.0; n];
    for _ in 0..terms {
        walk = (0..n)
            .map(|i| alpha * a[i].iter().zip(&walk).map(|(x, y)| x * y).sum::<f64>())
            .collect();
        for (t, w) in total.iter_mut().zip(&walk) {
            *t += w;
        }
    }
    total
}

/// Inverse by Gauss-Jordan elimination with partial pivoting.
pub fn inverse(m: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let d = a[col][col];
        for j in 0..n {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for r in 0..n {
            if r != col && a[r][col] != 0.0 {
                let f = a[r][col];
                for j in 0..n {
                    a[r][j] -= f * a[col][j];
                    inv[r][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}

pub fn matmul(a: &[Vec<f64>], b: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let m = b[0].len();
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| a[i][k] * b[k][j]).sum())
                .collect()
        })
        .collect()
}

/// `(εI + L)^{-s}` for integer `s` by explicit inversion and powers.
pub fn kernel_oracle(g: &Graph, epsilon: f64, s: u32) -> Vec<Vec<f64>> {
    let mut m = dense_laplacian(g);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] += epsilon;
    }
    let inv = inverse(&m);
    let mut k = inv.clone();
    for _ in 1..s {
        k = matmul(&k, &inv);
    }
    k
}

/// Global kernel interpolant computed from [`kernel_oracle`].
pub fn global_interpolant_oracle(g: &Graph, y: &Signal, w: &VertexSet, epsilon: f64, s: u32) -> Vec<f64> {
    let k = kernel_oracle(g, epsilon, s);
    let idx = w.as_slice();
    let sys: Vec<Vec<f64>> = idx.iter().map(|&i| idx.iter().map(|&j| k[i][j]).collect()).collect();
    let inv = inverse(&sys);
    let coeffs: Vec<f64> = inv
        .iter()
        .map(|row| row.iter().zip(idx).map(|(x, &j)| x * y.get(j)).sum())
        .collect();
    (0..g.vertex_count())
        .map(|v| idx.iter().zip(&coeffs).map(|(&j, a)| k[v][j] * a).sum())
        .collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}
