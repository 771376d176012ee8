//! Static hypergraph with d-dimensional vertex weights.
//!
//! Pins and incidence lists are stored in CSR form. Vertex weights live in
//! one flat array with `d` consecutive entries per vertex, since nearly every
//! consumer reads all dimensions of a vertex at once.

use crate::error::{Error, Result};

pub type VertexId = usize;
pub type EdgeId = usize;
pub type BlockId = usize;
pub type EdgeWeight = i64;

#[derive(Debug, Clone, PartialEq)]
pub struct Hypergraph {
    num_vertices: usize,
    dims: usize,
    edge_offsets: Vec<usize>,
    pins: Vec<VertexId>,
    vertex_offsets: Vec<usize>,
    incidence: Vec<EdgeId>,
    weights: Vec<f64>,
    edge_weights: Vec<EdgeWeight>,
}

impl Hypergraph {
    /// Builds a hypergraph from per-edge pin lists, per-vertex weight rows and
    /// edge weights. The vertex count is the number of weight rows.
    pub fn new(
        edges: &[Vec<VertexId>],
        weights: &[Vec<f64>],
        edge_weights: &[EdgeWeight],
    ) -> Result<Self> {
        let dims = weights.first().map_or(1, Vec::len);
        let mut flat = Vec::with_capacity(weights.len() * dims);
        for (v, row) in weights.iter().enumerate() {
            if row.len() != dims {
                return Err(Error::WeightDimensionMismatch {
                    vertex: v,
                    expected: dims,
                    found: row.len(),
                });
            }
            flat.extend_from_slice(row);
        }
        Self::from_flat(weights.len(), dims, flat, edges, edge_weights)
    }

    /// Builds a hypergraph from a flat `n * dims` weight array.
    pub fn from_flat(
        num_vertices: usize,
        dims: usize,
        weights: Vec<f64>,
        edges: &[Vec<VertexId>],
        edge_weights: &[EdgeWeight],
    ) -> Result<Self> {
        if dims == 0 {
            return Err(Error::NoDimensions);
        }
        if weights.len() != num_vertices * dims {
            let found = if num_vertices == 0 { 0 } else { weights.len() / num_vertices };
            return Err(Error::WeightDimensionMismatch {
                vertex: 0,
                expected: dims,
                found,
            });
        }
        for (i, &w) in weights.iter().enumerate() {
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::InvalidVertexWeight {
                    vertex: i / dims,
                    dim: i % dims,
                    weight: w,
                });
            }
        }
        if edge_weights.len() != edges.len() {
            return Err(Error::EdgeWeightCountMismatch {
                expected: edges.len(),
                found: edge_weights.len(),
            });
        }

        let mut edge_offsets = Vec::with_capacity(edges.len() + 1);
        edge_offsets.push(0);
        let mut pins = Vec::with_capacity(edges.iter().map(Vec::len).sum());
        let mut seen = vec![usize::MAX; num_vertices];
        let mut degree = vec![0usize; num_vertices];
        for (e, edge) in edges.iter().enumerate() {
            if edge.is_empty() {
                return Err(Error::EmptyEdge { edge: e });
            }
            if edge_weights[e] <= 0 {
                return Err(Error::NonPositiveEdgeWeight {
                    edge: e,
                    weight: edge_weights[e],
                });
            }
            for &v in edge {
                if v >= num_vertices {
                    return Err(Error::PinOutOfRange {
                        edge: e,
                        vertex: v,
                        num_vertices,
                    });
                }
                if seen[v] == e {
                    return Err(Error::DuplicatePin { edge: e, vertex: v });
                }
                seen[v] = e;
                degree[v] += 1;
                pins.push(v);
            }
            edge_offsets.push(pins.len());
        }

        let mut vertex_offsets = Vec::with_capacity(num_vertices + 1);
        vertex_offsets.push(0);
        for &deg in &degree {
            vertex_offsets.push(vertex_offsets.last().unwrap() + deg);
        }
        let mut fill = vertex_offsets[..num_vertices].to_vec();
        let mut incidence = vec![0; pins.len()];
        for e in 0..edges.len() {
            for &v in &pins[edge_offsets[e]..edge_offsets[e + 1]] {
                incidence[fill[v]] = e;
                fill[v] += 1;
            }
        }

        Ok(Self {
            num_vertices,
            dims,
            edge_offsets,
            pins,
            vertex_offsets,
            incidence,
            weights,
            edge_weights: edge_weights.to_vec(),
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edge_weights.len()
    }

    pub fn num_pins(&self) -> usize {
        self.pins.len()
    }

    pub fn dims(&self) -> usize {
        self.dims
    }

    pub fn pins(&self, e: EdgeId) -> &[VertexId] {
        &self.pins[self.edge_offsets[e]..self.edge_offsets[e + 1]]
    }

    pub fn edge_size(&self, e: EdgeId) -> usize {
        self.edge_offsets[e + 1] - self.edge_offsets[e]
    }

    pub fn edge_weight(&self, e: EdgeId) -> EdgeWeight {
        self.edge_weights[e]
    }

    pub fn edge_weights(&self) -> &[EdgeWeight] {
        &self.edge_weights
    }

    pub fn incident_edges(&self, v: VertexId) -> &[EdgeId] {
        &self.incidence[self.vertex_offsets[v]..self.vertex_offsets[v + 1]]
    }

    pub fn degree(&self, v: VertexId) -> usize {
        self.vertex_offsets[v + 1] - self.vertex_offsets[v]
    }

    /// Raw (unnormalized) weight row of `v`.
    pub fn weight(&self, v: VertexId) -> &[f64] {
        &self.weights[v * self.dims..(v + 1) * self.dims]
    }

    pub fn flat_weights(&self) -> &[f64] {
        &self.weights
    }

    /// Per-dimension sum of raw vertex weights.
    pub fn total_weight(&self) -> Vec<f64> {
        let mut total = vec![0.0; self.dims];
        for row in self.weights.chunks_exact(self.dims) {
            for (t, w) in total.iter_mut().zip(row) {
                *t += w;
            }
        }
        total
    }

    pub fn edges(&self) -> impl Iterator<Item = &[VertexId]> + '_ {
        (0..self.num_edges()).map(move |e| self.pins(e))
    }

    /// Pin lists as owned vectors, in edge order.
    pub fn edge_lists(&self) -> Vec<Vec<VertexId>> {
        self.edges().map(<[VertexId]>::to_vec).collect()
    }

    /// Same structure with a different weight matrix (flat, `dims` per vertex).
    pub fn with_weights(&self, dims: usize, weights: Vec<f64>) -> Result<Self> {
        Self::from_flat(
            self.num_vertices,
            dims,
            weights,
            &self.edge_lists(),
            &self.edge_weights,
        )
    }
}
