//! Size-constrained label-propagation clustering and contraction.

use std::collections::hash_map::Entry;
use std::collections::HashMap;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::Result;
use crate::hypergraph::{EdgeWeight, Hypergraph, VertexId};
use crate::partition::{NormalizationContext, WEIGHT_TOLERANCE};

/// Edges larger than this are ignored when rating clusters.
pub const MAX_RATED_EDGE_SIZE: usize = 1000;

#[derive(Debug, Clone, PartialEq)]
pub struct CoarseningConfig {
    /// Per-dimension cap on a cluster's normalized weight.
    pub cluster_limit: f64,
    /// Coarsening stops once at most `contraction_factor * k` vertices remain.
    pub contraction_factor: usize,
    /// Lower bound on the contraction limit, independent of `k`.
    pub contraction_floor: usize,
    pub max_levels: usize,
    /// A level that removes less than this fraction of vertices ends coarsening.
    pub min_shrink: f64,
}

impl Default for CoarseningConfig {
    fn default() -> Self {
        Self {
            cluster_limit: 1.0 / 160.0,
            contraction_factor: 160,
            contraction_floor: 0,
            max_levels: 64,
            min_shrink: 0.01,
        }
    }
}

impl CoarseningConfig {
    pub fn contraction_limit(&self, k: usize) -> usize {
        (self.contraction_factor * k).max(self.contraction_floor)
    }
}

/// One contraction step: the coarse hypergraph and, for every vertex of the
/// finer level, the coarse vertex it was merged into.
#[derive(Debug, Clone)]
pub struct Level {
    pub hypergraph: Hypergraph,
    pub projection: Vec<VertexId>,
}

/// Contraction levels, finest first. `levels[0]` was built from the input.
#[derive(Debug, Clone, Default)]
pub struct Hierarchy {
    pub levels: Vec<Level>,
}

impl Hierarchy {
    pub fn depth(&self) -> usize {
        self.levels.len()
    }

    pub fn coarsest<'a>(&'a self, input: &'a Hypergraph) -> &'a Hypergraph {
        self.levels.last().map_or(input, |l| &l.hypergraph)
    }

    /// The hypergraph one level finer than `levels[i]`.
    pub fn finer<'a>(&'a self, input: &'a Hypergraph, i: usize) -> &'a Hypergraph {
        if i == 0 {
            input
        } else {
            &self.levels[i - 1].hypergraph
        }
    }
}

/// One pass of label propagation. Vertices are visited in a random order;
/// a vertex that is still a singleton joins the neighboring cluster with the
/// largest heavy-edge rating `sum w(e) / (|e| - 1)` among those that stay
/// within `limit` in every dimension. Returns a cluster representative per
/// vertex. The pass stops early once only `target` clusters remain.
pub fn cluster_level<R: Rng>(
    hg: &Hypergraph,
    scale: &[f64],
    limit: f64,
    target: usize,
    rng: &mut R,
) -> Vec<VertexId> {
    let n = hg.num_vertices();
    let d = hg.dims();
    let mut cluster: Vec<VertexId> = (0..n).collect();
    let mut size = vec![1usize; n];
    let mut weight: Vec<f64> = (0..n * d).map(|i| hg.flat_weights()[i] * scale[i % d]).collect();
    let mut remaining = n;

    let mut order: Vec<VertexId> = (0..n).collect();
    order.shuffle(rng);

    let mut rating = vec![0.0f64; n];
    let mut mark = vec![usize::MAX; n];
    let mut touched = Vec::new();
    let mut stamp = 0usize;
    for u in order {
        if remaining <= target {
            break;
        }
        if cluster[u] != u || size[u] > 1 {
            continue;
        }
        for &e in hg.incident_edges(u) {
            let s = hg.edge_size(e);
            if !(2..=MAX_RATED_EDGE_SIZE).contains(&s) {
                continue;
            }
            let r = hg.edge_weight(e) as f64 / (s - 1) as f64;
            stamp += 1;
            for &p in hg.pins(e) {
                let c = cluster[p];
                if c == u || mark[c] == stamp {
                    continue;
                }
                mark[c] = stamp;
                if rating[c] == 0.0 {
                    touched.push(c);
                }
                rating[c] += r;
            }
        }
        let wu = &hg.weight(u);
        let mut best: Option<(VertexId, f64)> = None;
        for &c in &touched {
            let fits = (0..d).all(|j| weight[c * d + j] + wu[j] * scale[j] <= limit + WEIGHT_TOLERANCE);
            let better = match best {
                None => true,
                Some((bc, br)) => rating[c] > br || (rating[c] == br && c < bc),
            };
            if fits && better {
                best = Some((c, rating[c]));
            }
        }
        for &c in &touched {
            rating[c] = 0.0;
        }
        touched.clear();
        if let Some((c, _)) = best {
            cluster[u] = c;
            size[c] += 1;
            size[u] = 0;
            for j in 0..d {
                weight[c * d + j] += wu[j] * scale[j];
            }
            remaining -= 1;
        }
    }
    cluster
}

/// Contracts every cluster into one vertex. Coarse ids follow the order in
/// which clusters first appear by vertex id. Pins collapsing onto the same
/// coarse vertex are merged, single-pin edges are dropped and parallel edges
/// are merged with summed weights.
pub fn contract(hg: &Hypergraph, clusters: &[VertexId]) -> Result<Level> {
    let n = hg.num_vertices();
    let d = hg.dims();
    let mut id_of = vec![usize::MAX; n];
    let mut projection = vec![0; n];
    let mut next = 0;
    for v in 0..n {
        let c = clusters[v];
        if id_of[c] == usize::MAX {
            id_of[c] = next;
            next += 1;
        }
        projection[v] = id_of[c];
    }

    let mut weights = vec![0.0; next * d];
    for v in 0..n {
        for (j, w) in hg.weight(v).iter().enumerate() {
            weights[projection[v] * d + j] += w;
        }
    }

    let mut index: HashMap<Vec<VertexId>, usize> = HashMap::new();
    let mut edges: Vec<Vec<VertexId>> = Vec::new();
    let mut edge_weights: Vec<EdgeWeight> = Vec::new();
    for e in 0..hg.num_edges() {
        let mut pins: Vec<VertexId> = hg.pins(e).iter().map(|&p| projection[p]).collect();
        pins.sort_unstable();
        pins.dedup();
        if pins.len() < 2 {
            continue;
        }
        match index.entry(pins) {
            Entry::Occupied(o) => edge_weights[*o.get()] += hg.edge_weight(e),
            Entry::Vacant(slot) => {
                edges.push(slot.key().clone());
                edge_weights.push(hg.edge_weight(e));
                slot.insert(edges.len() - 1);
            }
        }
    }
    let hypergraph = Hypergraph::from_flat(next, d, weights, &edges, &edge_weights)?;
    Ok(Level {
        hypergraph,
        projection,
    })
}

/// Builds the hierarchy until the contraction limit is reached, a level
/// barely shrinks, or `max_levels` levels exist.
pub fn coarsen<R: Rng>(
    hg: &Hypergraph,
    ctx: &NormalizationContext,
    config: &CoarseningConfig,
    rng: &mut R,
) -> Result<Hierarchy> {
    let target = config.contraction_limit(ctx.k());
    let mut hierarchy = Hierarchy::default();
    while hierarchy.depth() < config.max_levels {
        let current = hierarchy.coarsest(hg);
        let n = current.num_vertices();
        if n <= target {
            break;
        }
        let clusters = cluster_level(current, ctx.scale(), config.cluster_limit, target, rng);
        let level = contract(current, &clusters)?;
        let coarse_n = level.hypergraph.num_vertices();
        if (n - coarse_n) as f64 <= config.min_shrink * n as f64 {
            break;
        }
        log::debug!("coarsening level {}: {} -> {} vertices", hierarchy.depth() + 1, n, coarse_n);
        hierarchy.levels.push(level);
    }
    Ok(hierarchy)
}
