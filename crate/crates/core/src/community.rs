//! Node-binded overlapping community detection.
//!
//! Communities are split around their two most Katz-central interpolation
//! nodes for as long as a pass over the communities raises the global
//! modularity. Small communities are then merged into their most similar big
//! community (mean Jaccard index), and finally every community is grown by an
//! overlap ring whose depth depends on how many of a vertex's neighbours lie
//! outside its community.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, VertexId, VertexSet};
use crate::metrics::{jaccard_communities, katz_centrality, modularity, CommunityAssignment, KatzParams};

pub const COVER_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectionParams {
    /// Communities with fewer than `ceil(small_fraction * n)` core vertices are merged away.
    pub small_fraction: f64,
    /// Katz settings; `None` picks [`KatzParams::default_for`] the graph.
    pub katz: Option<KatzParams>,
    /// `r(v) <= t_low` expands by the 2-hop neighbourhood.
    pub t_low: f64,
    /// `t_low < r(v) <= t_high` expands by the 1-hop neighbourhood.
    pub t_high: f64,
}

impl Default for DetectionParams {
    fn default() -> Self {
        Self {
            small_fraction: 0.02,
            katz: None,
            t_low: 0.4,
            t_high: 0.8,
        }
    }
}

impl DetectionParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.small_fraction > 0.0 && self.small_fraction < 1.0) {
            return Err(Error::InvalidParam(format!(
                "small_fraction must lie in (0, 1), got {}",
                self.small_fraction
            )));
        }
        if !(0.0 < self.t_low && self.t_low < self.t_high && self.t_high <= 1.0) {
            return Err(Error::InvalidParam(format!(
                "expansion thresholds must satisfy 0 < t_low < t_high <= 1, got {} and {}",
                self.t_low, self.t_high
            )));
        }
        Ok(())
    }

    /// Minimum core size of a "big" community on `n` vertices.
    pub fn big_threshold(&self, n: usize) -> usize {
        // the tolerance keeps e.g. 0.02 * 100 from rounding up to 3
        ((self.small_fraction * n as f64 - 1e-9).ceil() as usize).max(1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Community {
    pub id: usize,
    pub core: VertexSet,
    pub overlap: VertexSet,
    pub interpolation_nodes: VertexSet,
}

impl Community {
    /// `core ∪ overlap`.
    pub fn subdomain(&self) -> VertexSet {
        self.core.union(&self.overlap)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Action {
    KatzComputed,
    SplitAccepted,
    SplitRejected,
    Merge,
    Expand,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceEntry {
    pub action: Action,
    pub q_before: f64,
    pub q_after: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub community: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub partner: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub warning: Option<String>,
}

impl ProvenanceEntry {
    fn new(action: Action, q_before: f64, q_after: f64) -> Self {
        Self {
            action,
            q_before,
            q_after,
            community: None,
            partner: None,
            detail: None,
            warning: None,
        }
    }
}

/// Overlapping communities with the log of how they were obtained.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cover {
    pub format_version: u32,
    pub n_vertices: usize,
    pub params: DetectionParams,
    pub samples: VertexSet,
    pub communities: Vec<Community>,
    pub provenance: Vec<ProvenanceEntry>,
}

impl Cover {
    /// One community spanning the whole graph, without overlap.
    pub fn single(g: &Graph, samples: &VertexSet) -> Result<Self> {
        let n = g.vertex_count();
        let samples = VertexSet::checked(samples.iter(), n)?;
        Ok(Self {
            format_version: COVER_FORMAT_VERSION,
            n_vertices: n,
            params: DetectionParams::default(),
            communities: vec![Community {
                id: 0,
                core: VertexSet::all(n),
                overlap: VertexSet::new(),
                interpolation_nodes: samples.clone(),
            }],
            samples,
            provenance: Vec::new(),
        })
    }

    pub fn len(&self) -> usize {
        self.communities.len()
    }

    pub fn is_empty(&self) -> bool {
        self.communities.is_empty()
    }

    pub fn cores(&self) -> Vec<VertexSet> {
        self.communities.iter().map(|c| c.core.clone()).collect()
    }

    /// Modularity of the disjoint cores.
    pub fn core_modularity(&self, g: &Graph) -> Result<f64> {
        let assignment = CommunityAssignment::from_cores(g.vertex_count(), &self.cores())?;
        modularity(g, &assignment)
    }

    /// `q_after` of every accepted split, in order.
    pub fn accepted_split_log(&self) -> Vec<f64> {
        self.provenance
            .iter()
            .filter(|e| e.action == Action::SplitAccepted)
            .map(|e| e.q_after)
            .collect()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cover: Cover = serde_json::from_str(text)?;
        if cover.format_version != COVER_FORMAT_VERSION {
            return Err(Error::InvalidCover(format!(
                "unsupported format_version {}",
                cover.format_version
            )));
        }
        Ok(cover)
    }

    /// Checks every structural invariant of a cover against `g`.
    pub fn validate(&self, g: &Graph) -> Result<()> {
        let n = g.vertex_count();
        let fail = |msg: String| Err(Error::InvalidCover(msg));
        if self.n_vertices != n {
            return fail(format!("cover has {} vertices, graph has {n}", self.n_vertices));
        }
        if self.communities.is_empty() {
            return fail("no communities".into());
        }
        if self.communities.len() > self.samples.len().max(1) {
            return fail(format!(
                "{} communities exceed {} samples",
                self.communities.len(),
                self.samples.len()
            ));
        }
        let mut core_owner = vec![usize::MAX; n];
        let mut covered = vec![false; n];
        for (idx, c) in self.communities.iter().enumerate() {
            if c.id != idx {
                return fail(format!("community at position {idx} has id {}", c.id));
            }
            if c.core.is_empty() {
                return fail(format!("community {idx} has an empty core"));
            }
            if !c.core.is_disjoint(&c.overlap) {
                return fail(format!("community {idx}: core and overlap intersect"));
            }
            let sub = c.subdomain();
            if sub.as_slice().last().is_some_and(|&v| v >= n) {
                return fail(format!("community {idx} references a vertex out of range"));
            }
            for v in c.core.iter() {
                if core_owner[v] != usize::MAX {
                    return fail(format!("vertex {v} is in cores {} and {idx}", core_owner[v]));
                }
                core_owner[v] = idx;
            }
            for v in sub.iter() {
                covered[v] = true;
            }
            if c.interpolation_nodes != self.samples.intersection(&sub) {
                return fail(format!("community {idx}: interpolation nodes out of date"));
            }
            if c.interpolation_nodes.is_empty() {
                return fail(format!("community {idx} contains no interpolation node"));
            }
        }
        if let Some(v) = core_owner.iter().position(|&o| o == usize::MAX) {
            return fail(format!("vertex {v} is in no core"));
        }
        if let Some(v) = covered.iter().position(|c| !c) {
            return Err(Error::UncoveredVertex(v));
        }
        Ok(())
    }

    fn refresh_interpolation_nodes(&mut self) {
        for c in &mut self.communities {
            c.interpolation_nodes = self.samples.intersection(&c.subdomain());
        }
    }
}

/// Runs the full detection: divisive splitting, small-community merging and
/// overlap expansion.
pub fn detect_communities(g: &Graph, w: &VertexSet, p: &DetectionParams) -> Result<Cover> {
    p.validate()?;
    let n = g.vertex_count();
    if w.is_empty() {
        return Err(Error::EmptySet);
    }
    let w = VertexSet::checked(w.iter(), n)?;
    let katz_params = p.katz.unwrap_or_else(|| KatzParams::default_for(g));
    let katz = katz_centrality(g, &katz_params)?;

    let mut params = *p;
    params.katz = Some(katz_params);

    let mut cores = vec![VertexSet::all(n)];
    let mut labels = vec![0usize; n];
    let mut q_current = modularity(g, &CommunityAssignment::new(labels.clone())?)?;

    let mut provenance = Vec::new();
    let mut katz_entry = ProvenanceEntry::new(Action::KatzComputed, q_current, q_current);
    katz_entry.detail = Some(format!(
        "computed once on the global graph, alpha={}",
        katz_params.alpha
    ));
    provenance.push(katz_entry);

    // A split's modularity gain depends only on the community being split, so
    // a rejected community stays rejected until it changes.
    let mut settled = vec![false];
    let (mut q, mut q_next) = (-1.0_f64, -0.5_f64);
    while cores.len() <= w.len() && q_next > q {
        q = q_current;
        let pass_len = cores.len();
        for id in 0..pass_len {
            if cores.len() >= w.len() {
                break;
            }
            if settled[id] {
                continue;
            }
            let Some((keep, moved)) = split_community(g, &cores[id], &w, &katz)? else {
                settled[id] = true;
                continue;
            };
            let new_id = cores.len();
            for v in moved.iter() {
                labels[v] = new_id;
            }
            let q_candidate = modularity(g, &CommunityAssignment::new(labels.clone())?)?;
            let mut entry = ProvenanceEntry::new(Action::SplitRejected, q_current, q_candidate);
            entry.community = Some(id);
            entry.detail = Some(format!("sides of size {} and {}", keep.len(), moved.len()));
            if q_candidate > q_current {
                entry.action = Action::SplitAccepted;
                entry.partner = Some(new_id);
                cores[id] = keep;
                cores.push(moved);
                settled[id] = false;
                settled.push(false);
                q_current = q_candidate;
            } else {
                for v in moved.iter() {
                    labels[v] = id;
                }
                settled[id] = true;
            }
            provenance.push(entry);
        }
        q_next = q_current;
    }

    let cover = Cover {
        format_version: COVER_FORMAT_VERSION,
        n_vertices: n,
        params,
        communities: cores
            .into_iter()
            .enumerate()
            .map(|(id, core)| Community {
                id,
                interpolation_nodes: w.intersection(&core),
                core,
                overlap: VertexSet::new(),
            })
            .collect(),
        samples: w,
        provenance,
    };
    let cover = merge_small(g, cover, &params)?;
    expand_overlap(g, cover, &params)
}

/// Splits a connected core around its two most Katz-central interpolation
/// nodes. Returns `None` when the core holds fewer than two of them.
///
/// Every vertex joins the seed it is fewer hops from inside the core; ties go
/// to the higher-Katz seed, then to the lower vertex id. The first side
/// contains the preferred seed.
pub fn split_community(
    g: &Graph,
    core: &VertexSet,
    w: &VertexSet,
    katz: &[f64],
) -> Result<Option<(VertexSet, VertexSet)>> {
    let mut seeds: Vec<VertexId> = core.iter().filter(|&v| w.contains(v)).collect();
    if seeds.len() < 2 {
        return Ok(None);
    }
    seeds.sort_by(|&a, &b| katz[b].total_cmp(&katz[a]).then(a.cmp(&b)));
    let (s1, s2) = (seeds[0], seeds[1]);

    let sub = g.induced_subgraph(core)?;
    let d1 = sub.graph.bfs_distances(sub.to_local(s1).expect("seed in core"));
    let d2 = sub.graph.bfs_distances(sub.to_local(s2).expect("seed in core"));
    let mut first = Vec::new();
    let mut second = Vec::new();
    for (local, v) in core.iter().enumerate() {
        match (d1[local], d2[local]) {
            (usize::MAX, usize::MAX) => {
                return Err(Error::Disconnected {
                    components: sub.graph.component_count(),
                })
            }
            (a, b) if a <= b => first.push(v),
            _ => second.push(v),
        }
    }
    Ok(Some((VertexSet::from_unsorted(first), VertexSet::from_unsorted(second))))
}

/// Merges every community whose core is smaller than
/// [`DetectionParams::big_threshold`] into the big community with the highest
/// mean Jaccard similarity (lowest id on ties). When no big community exists,
/// the largest community repeatedly absorbs its most similar partner until one
/// becomes big or only one remains. Ids are renumbered afterwards.
pub fn merge_small(g: &Graph, cover: Cover, p: &DetectionParams) -> Result<Cover> {
    p.validate()?;
    let n = g.vertex_count();
    let threshold = p.big_threshold(n);
    let Cover {
        format_version,
        n_vertices,
        params,
        samples,
        communities,
        mut provenance,
    } = cover;
    let mut slots: Vec<Option<(VertexSet, VertexSet)>> = communities
        .into_iter()
        .map(|c| Some((c.core, c.overlap)))
        .collect();

    let alive = |slots: &[Option<(VertexSet, VertexSet)>]| -> Vec<usize> {
        (0..slots.len()).filter(|&i| slots[i].is_some()).collect()
    };
    let core_of = |slots: &[Option<(VertexSet, VertexSet)>], i: usize| -> VertexSet {
        slots[i].as_ref().expect("alive slot").0.clone()
    };
    let slot_modularity = |slots: &[Option<(VertexSet, VertexSet)>]| -> Result<f64> {
        let cores: Vec<VertexSet> = slots.iter().flatten().map(|(c, _)| c.clone()).collect();
        modularity(g, &CommunityAssignment::from_cores(n, &cores)?)
    };
    // absorb `from` into `into`, logging the modularity change
    let merge = |slots: &mut Vec<Option<(VertexSet, VertexSet)>>,
                     provenance: &mut Vec<ProvenanceEntry>,
                     from: usize,
                     into: usize,
                     similarity: f64|
     -> Result<()> {
        let q_before = slot_modularity(slots)?;
        let (small_core, small_overlap) = slots[from].take().expect("alive slot");
        let (core, overlap) = slots[into].as_mut().expect("alive slot");
        *core = core.union(&small_core);
        *overlap = overlap.union(&small_overlap).difference(core);
        let connected = g.induced_subgraph(core)?.graph.is_connected();
        let q_after = slot_modularity(slots)?;
        let mut entry = ProvenanceEntry::new(Action::Merge, q_before, q_after);
        entry.community = Some(from);
        entry.partner = Some(into);
        entry.detail = Some(format!(
            "merged {} vertices, jaccard {similarity}",
            small_core.len()
        ));
        if !connected {
            entry.warning = Some("merged core is disconnected".into());
        }
        provenance.push(entry);
        Ok(())
    };

    loop {
        let ids = alive(&slots);
        if ids.len() <= 1 {
            break;
        }
        let size = |i: usize| slots[i].as_ref().map_or(0, |(c, _)| c.len());
        let (bigs, smalls): (Vec<usize>, Vec<usize>) =
            ids.iter().partition(|&&i| size(i) >= threshold);
        if smalls.is_empty() {
            break;
        }
        if bigs.is_empty() {
            // largest-first fallback
            let target = *ids
                .iter()
                .max_by(|&&a, &&b| size(a).cmp(&size(b)).then(b.cmp(&a)))
                .expect("non-empty");
            let target_core = core_of(&slots, target);
            let (partner, sim) = most_similar(g, &target_core, &slots, ids.iter().copied().filter(|&i| i != target))?;
            merge(&mut slots, &mut provenance, partner, target, sim)?;
            continue;
        }
        for small in smalls {
            let small_core = core_of(&slots, small);
            let (target, sim) = most_similar(g, &small_core, &slots, bigs.iter().copied())?;
            merge(&mut slots, &mut provenance, small, target, sim)?;
        }
    }

    let mut cover = Cover {
        format_version,
        n_vertices,
        params,
        communities: slots
            .into_iter()
            .flatten()
            .enumerate()
            .map(|(id, (core, overlap))| Community {
                id,
                core,
                overlap,
                interpolation_nodes: VertexSet::new(),
            })
            .collect(),
        samples,
        provenance,
    };
    cover.refresh_interpolation_nodes();
    Ok(cover)
}

/// Candidate with the highest mean Jaccard similarity to `set`; lowest id wins ties.
fn most_similar(
    g: &Graph,
    set: &VertexSet,
    slots: &[Option<(VertexSet, VertexSet)>],
    candidates: impl Iterator<Item = usize>,
) -> Result<(usize, f64)> {
    let mut best: Option<(usize, f64)> = None;
    for i in candidates {
        let core = &slots[i].as_ref().expect("alive slot").0;
        let (small, large) = if set.len() <= core.len() { (set, core) } else { (core, set) };
        let sim = jaccard_communities(g, small, large)?;
        if best.is_none_or(|(_, b)| sim > b) {
            best = Some((i, sim));
        }
    }
    best.ok_or(Error::EmptySet)
}

/// Grows each community by an overlap ring. For every core vertex `v` with
/// `r(v) = |N(v) ∩ core| / |N(v)|`: `r <= t_low` adds its 2-hop
/// neighbourhood, `r <= t_high` its 1-hop neighbourhood, anything above adds
/// nothing. Cores are left untouched and newly added vertices are not expanded
/// further.
pub fn expand_overlap(g: &Graph, cover: Cover, p: &DetectionParams) -> Result<Cover> {
    p.validate()?;
    let n = g.vertex_count();
    let mut cover = cover;
    let cores = cover.cores();
    let assignment = CommunityAssignment::from_cores(n, &cores)?;
    let labels = assignment.membership();
    let q = modularity(g, &assignment)?;

    for (idx, c) in cover.communities.iter_mut().enumerate() {
        let mut added = Vec::new();
        for v in c.core.iter() {
            let nb = g.neighbors(v);
            if nb.is_empty() {
                continue;
            }
            let inside = nb.iter().filter(|&&u| labels[u] == idx).count();
            let ratio = inside as f64 / nb.len() as f64;
            let radius = if ratio <= p.t_low {
                2
            } else if ratio <= p.t_high {
                1
            } else {
                continue;
            };
            added.extend(
                g.neighborhood(v, radius)?
                    .iter()
                    .filter(|&u| labels[u] != idx),
            );
        }
        let before = c.overlap.len();
        c.overlap = c.overlap.union(&VertexSet::from_unsorted(added));
        let mut entry = ProvenanceEntry::new(Action::Expand, q, q);
        entry.community = Some(idx);
        entry.detail = Some(format!(
            "overlap grew from {before} to {} vertices",
            c.overlap.len()
        ));
        cover.provenance.push(entry);
    }
    cover.refresh_interpolation_nodes();
    Ok(cover)
}
