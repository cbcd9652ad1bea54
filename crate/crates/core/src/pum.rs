//! Partition-of-unity interpolation with local graph basis function fits.
//!
//! Every community of a [`Cover`] gets its own kernel interpolant built on the
//! Laplacian of its subdomain. The global approximant is the weighted sum of
//! the local ones, with weights `1 / multiplicity` on overlapping vertices.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::community::{detect_communities, Community, Cover, DetectionParams};
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, VertexSet};
use crate::kernel::{gbf_kernel, KernelParams};
use crate::numerics::{norm2, sym_eigen, Cholesky};

pub const RESULT_FORMAT_VERSION: u32 = 1;

/// Real value per vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct Signal(Vec<f64>);

impl Signal {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(v) = values.iter().position(|x| !x.is_finite()) {
            return Err(Error::InvalidParam(format!("signal value at vertex {v} is not finite")));
        }
        Ok(Self(values))
    }

    /// Checks that the signal has one value per vertex of `g`.
    pub fn for_graph(g: &Graph, values: Vec<f64>) -> Result<Self> {
        if values.len() != g.vertex_count() {
            return Err(Error::LengthMismatch {
                expected: g.vertex_count(),
                found: values.len(),
            });
        }
        Self::new(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn get(&self, v: VertexId) -> f64 {
        self.0[v]
    }
}

impl TryFrom<Vec<f64>> for Signal {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Signal::new(values)
    }
}

impl From<Signal> for Vec<f64> {
    fn from(s: Signal) -> Self {
        s.0
    }
}

/// Weights `φ_j` on each subdomain, aligned with the sorted subdomain vertices.
#[derive(Debug, Clone)]
pub struct PartitionOfUnity {
    subdomains: Vec<VertexSet>,
    weights: Vec<Vec<f64>>,
}

impl PartitionOfUnity {
    pub fn community_count(&self) -> usize {
        self.subdomains.len()
    }

    pub fn subdomain(&self, j: usize) -> &VertexSet {
        &self.subdomains[j]
    }

    pub fn weights(&self, j: usize) -> &[f64] {
        &self.weights[j]
    }

    /// `φ_j(v)`, zero outside subdomain `j`.
    pub fn weight(&self, j: usize, v: VertexId) -> f64 {
        self.subdomains[j]
            .index_of(v)
            .map_or(0.0, |i| self.weights[j][i])
    }
}

/// Uniform weights `φ_j(v) = 1 / |{k : v ∈ subdomain_k}|`.
pub fn build_pu(cover: &Cover) -> Result<PartitionOfUnity> {
    let n = cover.n_vertices;
    let subdomains: Vec<VertexSet> = cover.communities.iter().map(Community::subdomain).collect();
    let mut multiplicity = vec![0usize; n];
    for sub in &subdomains {
        for v in sub.iter() {
            if v >= n {
                return Err(Error::OutOfRange { vertex: v, n });
            }
            multiplicity[v] += 1;
        }
    }
    if let Some(v) = multiplicity.iter().position(|&m| m == 0) {
        return Err(Error::UncoveredVertex(v));
    }
    let weights = subdomains
        .iter()
        .map(|sub| sub.iter().map(|v| 1.0 / multiplicity[v] as f64).collect())
        .collect();
    Ok(PartitionOfUnity {
        subdomains,
        weights,
    })
}

/// Local interpolant on one subdomain.
#[derive(Debug, Clone)]
pub struct LocalApproximant {
    pub community: usize,
    pub subdomain: VertexSet,
    /// Values aligned with `subdomain`.
    pub values: Vec<f64>,
    pub sample_count: usize,
    /// `‖K_WW a − y_W‖₂ / ‖y_W‖₂` (absolute when `y_W = 0`).
    pub residual: f64,
}

impl LocalApproximant {
    pub fn value_at(&self, v: VertexId) -> Option<f64> {
        self.subdomain.index_of(v).map(|i| self.values[i])
    }
}

/// Kernel interpolant of `y` on the subdomain of `c`, exact at its
/// interpolation nodes. Only sample values inside the subdomain are read.
pub fn local_interpolant(
    g: &Graph,
    c: &Community,
    y: &Signal,
    p: &KernelParams,
) -> Result<LocalApproximant> {
    if y.len() != g.vertex_count() {
        return Err(Error::LengthMismatch {
            expected: g.vertex_count(),
            found: y.len(),
        });
    }
    if c.interpolation_nodes.is_empty() {
        return Err(Error::NoSamples(c.id));
    }
    let subdomain = c.subdomain();
    let sub = g.induced_subgraph(&subdomain)?;
    let kernel = gbf_kernel(&sub.graph.laplacian(), p)?;

    let local_nodes = c
        .interpolation_nodes
        .iter()
        .map(|w| {
            sub.to_local(w).ok_or_else(|| {
                Error::InvalidCover(format!(
                    "interpolation node {w} lies outside the subdomain of community {}",
                    c.id
                ))
            })
        })
        .collect::<Result<Vec<usize>>>()?;
    let y_nodes: Vec<f64> = c.interpolation_nodes.iter().map(|w| y.get(w)).collect();

    let system = kernel.principal_submatrix(&local_nodes);
    let coeffs = Cholesky::factor(&system)?.solve(&y_nodes);

    let values: Vec<f64> = (0..subdomain.len())
        .map(|i| {
            let row = kernel.row(i);
            local_nodes.iter().zip(&coeffs).map(|(&j, a)| a * row[j]).sum()
        })
        .collect();

    let fitted = system.mul_vec(&coeffs);
    let diff: Vec<f64> = fitted.iter().zip(&y_nodes).map(|(f, t)| f - t).collect();
    let y_norm = norm2(&y_nodes);
    let residual = if y_norm > 0.0 {
        norm2(&diff) / y_norm
    } else {
        norm2(&diff)
    };

    Ok(LocalApproximant {
        community: c.id,
        subdomain,
        values,
        sample_count: local_nodes.len(),
        residual,
    })
}

/// `x̂(v) = Σ_j φ_j(v) s_j(v)`, summed in community-id order.
pub fn assemble_global(cover: &Cover, pu: &PartitionOfUnity, locals: &[LocalApproximant]) -> Result<Signal> {
    let n = cover.n_vertices;
    if locals.len() != pu.community_count() || locals.len() != cover.len() {
        return Err(Error::LengthMismatch {
            expected: cover.len(),
            found: locals.len(),
        });
    }
    let mut out = vec![0.0; n];
    let mut covered = vec![false; n];
    for (j, local) in locals.iter().enumerate() {
        if local.subdomain != *pu.subdomain(j) {
            return Err(Error::InvalidCover(format!(
                "local approximant {j} does not match its subdomain"
            )));
        }
        for ((v, w), s) in local.subdomain.iter().zip(pu.weights(j)).zip(&local.values) {
            out[v] += w * s;
            covered[v] = true;
        }
    }
    if let Some(v) = covered.iter().position(|c| !c) {
        return Err(Error::UncoveredVertex(v));
    }
    Signal::new(out)
}

/// Relative ℓ₂ error `‖truth − approx‖₂ / ‖truth‖₂`.
pub fn rrmse(truth: &Signal, approx: &Signal) -> Result<f64> {
    if truth.len() != approx.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            found: approx.len(),
        });
    }
    let norm = norm2(truth.values());
    if norm == 0.0 {
        return Err(Error::ZeroSignal);
    }
    let diff: Vec<f64> = truth
        .values()
        .iter()
        .zip(approx.values())
        .map(|(t, a)| t - a)
        .collect();
    Ok(norm2(&diff) / norm)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CommunityDiagnostics {
    pub id: usize,
    pub core_size: usize,
    pub subdomain_size: usize,
    pub sample_count: usize,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct WallTimes {
    pub partition_s: f64,
    pub interpolate_s: f64,
    pub total_s: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunParams {
    pub epsilon: f64,
    pub s: f64,
    pub alpha: Option<f64>,
    pub seed: Option<u64>,
    pub small_fraction: Option<f64>,
    pub n_samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PumResult {
    pub format_version: u32,
    pub rrmse: f64,
    pub n_communities: usize,
    pub per_community: Vec<CommunityDiagnostics>,
    pub wall_times: WallTimes,
    pub params: RunParams,
    #[serde(skip)]
    pub approximant: Option<Signal>,
}

impl PumResult {
    pub fn approximant(&self) -> &Signal {
        self.approximant.as_ref().expect("approximant is set by the pipeline")
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Interpolation half of the pipeline: PU weights, local fits and assembly on a
/// given cover. Samples are read from `y_full` at the cover's interpolation nodes.
pub fn interpolate_with_cover(
    g: &Graph,
    cover: &Cover,
    y_full: &Signal,
    kp: &KernelParams,
) -> Result<PumResult> {
    kp.validate()?;
    cover.validate(g)?;
    let start = Instant::now();
    let pu = build_pu(cover)?;
    let locals = cover
        .communities
        .iter()
        .map(|c| local_interpolant(g, c, y_full, kp))
        .collect::<Result<Vec<_>>>()?;
    let approximant = assemble_global(cover, &pu, &locals)?;
    let interpolate_s = start.elapsed().as_secs_f64();

    let error = rrmse(y_full, &approximant)?;
    let per_community = cover
        .communities
        .iter()
        .zip(&locals)
        .map(|(c, l)| CommunityDiagnostics {
            id: c.id,
            core_size: c.core.len(),
            subdomain_size: l.subdomain.len(),
            sample_count: l.sample_count,
            residual: l.residual,
        })
        .collect();
    Ok(PumResult {
        format_version: RESULT_FORMAT_VERSION,
        rrmse: error,
        n_communities: cover.len(),
        per_community,
        wall_times: WallTimes {
            partition_s: 0.0,
            interpolate_s,
            total_s: interpolate_s,
        },
        params: RunParams {
            epsilon: kp.epsilon,
            s: kp.s,
            alpha: cover.params.katz.map(|k| k.alpha),
            seed: None,
            small_fraction: Some(cover.params.small_fraction),
            n_samples: cover.samples.len(),
        },
        approximant: Some(approximant),
    })
}

/// Community detection followed by partition-of-unity interpolation.
pub fn run_pipeline(
    g: &Graph,
    y_full: &Signal,
    w: &VertexSet,
    dp: &DetectionParams,
    kp: &KernelParams,
) -> Result<(Cover, PumResult)> {
    kp.validate()?;
    let start = Instant::now();
    let cover = detect_communities(g, w, dp)?;
    let partition_s = start.elapsed().as_secs_f64();
    let mut result = interpolate_with_cover(g, &cover, y_full, kp)?;
    result.wall_times.partition_s = partition_s;
    result.wall_times.total_s = start.elapsed().as_secs_f64();
    Ok((cover, result))
}

/// Single-domain interpolation with the dense kernel of the whole graph.
pub fn global_gbf_baseline(g: &Graph, y_full: &Signal, w: &VertexSet, kp: &KernelParams) -> Result<PumResult> {
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    let cover = Cover::single(g, w)?;
    let mut result = interpolate_with_cover(g, &cover, y_full, kp)?;
    result.params.alpha = None;
    result.params.small_fraction = None;
    Ok(result)
}

/// Number of low-frequency eigenvectors summed by [`reference_signal`].
pub const REFERENCE_MODES: usize = 10;

/// Smooth test signal: the sum of the Laplacian eigenvectors belonging to the
/// [`REFERENCE_MODES`] smallest nonzero eigenvalues, each with unit
/// coefficient. Every eigenvector is signed so that its largest-magnitude
/// entry (first one on ties) is positive.
pub fn reference_signal(g: &Graph) -> Result<Signal> {
    let eig = sym_eigen(&g.laplacian())?;
    let n = g.vertex_count();
    let mut values = vec![0.0; n];
    // connected graph: only the first eigenvalue is zero
    for k in 1..n.min(REFERENCE_MODES + 1) {
        let u = eig.vector(k);
        let pivot = u
            .iter()
            .enumerate()
            .fold(0, |best, (i, x)| if x.abs() > u[best].abs() { i } else { best });
        let sign = if u[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (acc, x) in values.iter_mut().zip(u) {
            *acc += sign * x;
        }
    }
    Signal::new(values)
}
