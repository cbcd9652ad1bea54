//! Structural measures used by community detection: Katz centrality,
//! modularity and Jaccard similarity.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, VertexSet};

/// How the Katz series is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "mode")]
pub enum KatzMode {
    /// Exact sum of the series via the linear system `(I - αA) x = 1`.
    ClosedForm,
    /// First `terms` powers of `αA` only.
    TruncatedSeries { terms: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KatzParams {
    pub alpha: f64,
    pub mode: KatzMode,
}

impl KatzParams {
    pub fn closed_form(alpha: f64) -> Self {
        Self {
            alpha,
            mode: KatzMode::ClosedForm,
        }
    }

    pub fn truncated(alpha: f64, terms: usize) -> Self {
        Self {
            alpha,
            mode: KatzMode::TruncatedSeries { terms },
        }
    }

    /// `min(0.5, 0.85 / Δ)` with Δ the maximum degree, an upper bound on the
    /// adjacency spectral radius.
    pub fn default_for(g: &Graph) -> Self {
        Self::closed_form(default_alpha(g))
    }

    pub fn validate(&self, g: &Graph) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::InvalidParam(format!(
                "Katz alpha must be positive, got {}",
                self.alpha
            )));
        }
        match self.mode {
            KatzMode::ClosedForm => {
                let bound = spectral_radius_bound(g);
                if self.alpha * bound >= 1.0 {
                    return Err(Error::AlphaDiverges {
                        alpha: self.alpha,
                        bound,
                    });
                }
            }
            KatzMode::TruncatedSeries { terms } => {
                if terms == 0 {
                    return Err(Error::InvalidParam("series_terms must be positive".into()));
                }
            }
        }
        Ok(())
    }
}

pub fn default_alpha(g: &Graph) -> f64 {
    0.5_f64.min(0.85 / spectral_radius_bound(g))
}

/// Upper bound on λ_max(A): the maximum degree.
pub fn spectral_radius_bound(g: &Graph) -> f64 {
    g.max_degree().max(1) as f64
}

/// Katz centrality `Σ_{k≥1} α^k A^k 1`, per vertex.
pub fn katz_centrality(g: &Graph, p: &KatzParams) -> Result<Vec<f64>> {
    p.validate(g)?;
    let n = g.vertex_count();
    match p.mode {
        KatzMode::TruncatedSeries { terms } => {
            let mut power = vec![1.0; n];
            let mut total = vec![0.0; n];
            for _ in 0..terms {
                power = g.adjacency_mul(&power);
                for (t, x) in total.iter_mut().zip(power.iter_mut()) {
                    *x *= p.alpha;
                    *t += *x;
                }
            }
            Ok(total)
        }
        KatzMode::ClosedForm => {
            let x = katz_system_solve(g, p.alpha)?;
            Ok(x.into_iter().map(|v| (v - 1.0).max(0.0)).collect())
        }
    }
}

/// Conjugate gradient on the sparse SPD operator `I - αA` with right-hand side 1.
fn katz_system_solve(g: &Graph, alpha: f64) -> Result<Vec<f64>> {
    const REL_TOL: f64 = 1e-14;
    let n = g.vertex_count();
    let apply = |x: &[f64]| -> Vec<f64> {
        let ax = g.adjacency_mul(x);
        x.iter().zip(ax).map(|(xi, axi)| xi - alpha * axi).collect()
    };
    let dot = |a: &[f64], b: &[f64]| a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>();

    let b = vec![1.0; n];
    let b_norm = (n as f64).sqrt();
    let mut x = b.clone();
    let ax = apply(&x);
    let mut r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    let max_iter = 10 * n + 100;
    for _ in 0..max_iter {
        if rr.sqrt() <= REL_TOL * b_norm {
            return Ok(x);
        }
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if pap.is_nan() || pap <= 0.0 {
            return Err(Error::SolveFailure(
                "Katz system is not positive definite".into(),
            ));
        }
        let step = rr / pap;
        for i in 0..n {
            x[i] += step * p[i];
            r[i] -= step * ap[i];
        }
        let rr_next = dot(&r, &r);
        let beta = rr_next / rr;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
    }
    if rr.sqrt() <= REL_TOL * b_norm * 1e2 {
        Ok(x)
    } else {
        Err(Error::SolveFailure(format!(
            "conjugate gradient stalled at residual {:.3e}",
            rr.sqrt() / b_norm
        )))
    }
}

/// Disjoint community labels, contiguous `0..k`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CommunityAssignment {
    membership: Vec<usize>,
    count: usize,
}

impl CommunityAssignment {
    pub fn new(membership: Vec<usize>) -> Result<Self> {
        let count = membership.iter().max().map_or(0, |m| m + 1);
        let mut seen = vec![false; count];
        for &c in &membership {
            seen[c] = true;
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidParam(format!(
                "community ids must be contiguous, id {missing} is unused"
            )));
        }
        Ok(Self { membership, count })
    }

    /// Labels vertices by the index of the set containing them.
    pub fn from_cores(n: usize, cores: &[VertexSet]) -> Result<Self> {
        let mut membership = vec![usize::MAX; n];
        for (c, core) in cores.iter().enumerate() {
            for v in core.iter() {
                if v >= n {
                    return Err(Error::OutOfRange { vertex: v, n });
                }
                if membership[v] != usize::MAX {
                    return Err(Error::InvalidParam(format!("vertex {v} is in two cores")));
                }
                membership[v] = c;
            }
        }
        if let Some(v) = membership.iter().position(|&c| c == usize::MAX) {
            return Err(Error::UncoveredVertex(v));
        }
        Self::new(membership)
    }

    pub fn membership(&self) -> &[usize] {
        &self.membership
    }

    pub fn community_count(&self) -> usize {
        self.count
    }
}

/// Newman modularity, aggregated per community:
/// `Q = Σ_c [ L_c / m - (D_c / 2m)² ]` with `L_c` internal edges and `D_c`
/// the degree total of community `c`.
pub fn modularity(g: &Graph, c: &CommunityAssignment) -> Result<f64> {
    let n = g.vertex_count();
    if c.membership.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: c.membership.len(),
        });
    }
    let m = g.edge_count() as f64;
    if m == 0.0 {
        return Ok(0.0);
    }
    let mut internal = vec![0usize; c.count];
    let mut degree_sum = vec![0usize; c.count];
    for u in 0..n {
        let cu = c.membership[u];
        degree_sum[cu] += g.neighbors(u).len();
        internal[cu] += g
            .neighbors(u)
            .iter()
            .filter(|&&v| v > u && c.membership[v] == cu)
            .count();
    }
    Ok(internal
        .iter()
        .zip(&degree_sum)
        .map(|(&l, &d)| {
            let frac = d as f64 / (2.0 * m);
            l as f64 / m - frac * frac
        })
        .sum())
}

/// `|N(u) ∩ N(v)| / |N(u) ∪ N(v)|` over open neighbourhoods.
pub fn jaccard_vertices(g: &Graph, u: VertexId, v: VertexId) -> Result<f64> {
    g.degree(u)?;
    g.degree(v)?;
    Ok(jaccard_unchecked(g, u, v))
}

fn jaccard_unchecked(g: &Graph, u: VertexId, v: VertexId) -> f64 {
    let (a, b) = (g.neighbors(u), g.neighbors(v));
    let (mut i, mut j, mut common) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - common;
    if union == 0 {
        0.0
    } else {
        common as f64 / union as f64
    }
}

/// Mean of `jaccard_vertices(u, v)` over all `|U|·|V|` pairs.
///
/// Exact: pairs with no common neighbour contribute zero, so only the
/// two-hop ball of each `u` is visited.
pub fn jaccard_communities(g: &Graph, us: &VertexSet, vs: &VertexSet) -> Result<f64> {
    if us.is_empty() || vs.is_empty() {
        return Err(Error::EmptySet);
    }
    let n = g.vertex_count();
    for set in [us, vs] {
        if let Some(&max) = set.as_slice().last() {
            if max >= n {
                return Err(Error::OutOfRange { vertex: max, n });
            }
        }
    }
    let mut total = 0.0;
    let mut candidates = Vec::new();
    for u in us.iter() {
        candidates.clear();
        for &x in g.neighbors(u) {
            candidates.extend_from_slice(g.neighbors(x));
        }
        candidates.sort_unstable();
        candidates.dedup();
        total += candidates
            .iter()
            .filter(|&&v| vs.contains(v))
            .map(|&v| jaccard_unchecked(g, u, v))
            .sum::<f64>();
    }
    Ok(total / (us.len() as f64 * vs.len() as f64))
}
