//! Conforming triangular meshes with cell/edge connectivity and geometry.
//!
//! A [`TriMesh`] stores counterclockwise triangles, one record per unique
//! edge, and the derived per-cell geometry the finite-volume updates need.
//! Interior edges carry a left and a right cell; boundary edges have no
//! right cell and their normal points out of the domain.

mod delaunay;
mod distmesh;
pub mod io;

use std::collections::HashMap;

use thiserror::Error;

use crate::scalar::Scalar;

pub use distmesh::{generate_unit_square_mesh, DistMeshOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeshError {
    #[error("cell {cell} references vertex {vertex}, but only {n_vertices} vertices exist")]
    VertexOutOfRange {
        cell: usize,
        vertex: usize,
        n_vertices: usize,
    },
    #[error("cell {cell} repeats a vertex")]
    RepeatedVertex { cell: usize },
    #[error("cell {cell} duplicates cell {other}")]
    DuplicateCell { cell: usize, other: usize },
    #[error("cell {cell} is inverted (clockwise), signed area {signed_area:e}")]
    InvertedCell { cell: usize, signed_area: f64 },
    #[error("cell {cell} is degenerate (zero area)")]
    DegenerateCell { cell: usize },
    #[error("edge ({a}, {b}) is shared by more than two cells (cell {cell} is the third)")]
    NonManifoldEdge { a: usize, b: usize, cell: usize },
    #[error("edge ({a}, {b}) has the same orientation in cells {left} and {right}")]
    InconsistentOrientation {
        a: usize,
        b: usize,
        left: usize,
        right: usize,
    },
    #[error("mesh has no cells")]
    Empty,
    #[error("total cell area {total} differs from expected {expected}")]
    AreaMismatch { total: f64, expected: f64 },
    #[error("Euler characteristic V - E + F = {chi}, expected 2")]
    EulerMismatch { chi: i64 },
    #[error("edge {edge}: stored normal inconsistent with its vertex pair")]
    NormalMismatch { edge: usize },
    #[error("cell {cell} has {count} neighbours")]
    Adjacency { cell: usize, count: usize },
    #[error("mesh generation failed: {0}")]
    Generation(String),
}

/// One unique mesh edge.
#[derive(Debug, Clone, PartialEq)]
pub struct Edge<T> {
    /// Cell that owns the edge in counterclockwise order.
    pub left: usize,
    /// Neighbouring cell; `None` on the domain boundary.
    pub right: Option<usize>,
    /// Endpoints, ordered as traversed by `left`.
    pub vertices: [usize; 2],
    pub length: T,
    /// Unit normal pointing out of `left` (into `right` when present).
    pub normal: [T; 2],
}

impl<T: Scalar> Edge<T> {
    pub fn is_boundary(&self) -> bool {
        self.right.is_none()
    }
}

#[derive(Debug, Clone)]
pub struct TriMesh<T> {
    vertices: Vec<[T; 2]>,
    cells: Vec<[usize; 3]>,
    edges: Vec<Edge<T>>,
    cell_areas: Vec<T>,
    cell_centroids: Vec<[T; 2]>,
    adjacency: Vec<Vec<usize>>,
    cell_edges: Vec<[usize; 3]>,
}

fn signed_area<T: Scalar>(a: [T; 2], b: [T; 2], c: [T; 2]) -> T {
    ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])) * T::lit(0.5)
}

/// Outward unit normal of the directed segment `a -> b` for a CCW polygon, and its length.
fn edge_normal<T: Scalar>(a: [T; 2], b: [T; 2]) -> ([T; 2], T) {
    let dx = b[0] - a[0];
    let dy = b[1] - a[1];
    let len = dx.hypot(dy);
    ([dy / len, -dx / len], len)
}

impl<T: Scalar> TriMesh<T> {
    /// Derives edges, normals, areas, centroids and adjacency from raw lists.
    ///
    /// Cells must be counterclockwise. Non-manifold edges, inverted or
    /// degenerate cells and duplicate cells are rejected, naming the cell.
    pub fn build_connectivity(
        vertices: Vec<[T; 2]>,
        cells: Vec<[usize; 3]>,
    ) -> Result<Self, MeshError> {
        if cells.is_empty() {
            return Err(MeshError::Empty);
        }
        let nv = vertices.len();
        let mut seen: HashMap<[usize; 3], usize> = HashMap::with_capacity(cells.len());
        let mut cell_areas = Vec::with_capacity(cells.len());
        let mut cell_centroids = Vec::with_capacity(cells.len());
        for (ci, cell) in cells.iter().enumerate() {
            for &vi in cell {
                if vi >= nv {
                    return Err(MeshError::VertexOutOfRange {
                        cell: ci,
                        vertex: vi,
                        n_vertices: nv,
                    });
                }
            }
            if cell[0] == cell[1] || cell[1] == cell[2] || cell[0] == cell[2] {
                return Err(MeshError::RepeatedVertex { cell: ci });
            }
            let mut key = *cell;
            key.sort_unstable();
            if let Some(&other) = seen.get(&key) {
                return Err(MeshError::DuplicateCell { cell: ci, other });
            }
            seen.insert(key, ci);

            let [a, b, c] = cell.map(|i| vertices[i]);
            let area = signed_area(a, b, c);
            if area < T::zero() {
                return Err(MeshError::InvertedCell {
                    cell: ci,
                    signed_area: area.to_f64_lossy(),
                });
            }
            if area == T::zero() || !area.is_finite() {
                return Err(MeshError::DegenerateCell { cell: ci });
            }
            cell_areas.push(area);
            let third = T::lit(3.0);
            cell_centroids.push([(a[0] + b[0] + c[0]) / third, (a[1] + b[1] + c[1]) / third]);
        }

        let mut edges: Vec<Edge<T>> = Vec::with_capacity(cells.len() * 3 / 2 + 4);
        let mut edge_index: HashMap<(usize, usize), usize> =
            HashMap::with_capacity(cells.len() * 2);
        let mut cell_edges = vec![[usize::MAX; 3]; cells.len()];
        for (ci, cell) in cells.iter().enumerate() {
            for k in 0..3 {
                let (a, b) = (cell[k], cell[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                match edge_index.get(&key) {
                    None => {
                        let (normal, length) = edge_normal(vertices[a], vertices[b]);
                        edge_index.insert(key, edges.len());
                        cell_edges[ci][k] = edges.len();
                        edges.push(Edge {
                            left: ci,
                            right: None,
                            vertices: [a, b],
                            length,
                            normal,
                        });
                    }
                    Some(&ei) => {
                        let e = &mut edges[ei];
                        if e.right.is_some() {
                            return Err(MeshError::NonManifoldEdge {
                                a: key.0,
                                b: key.1,
                                cell: ci,
                            });
                        }
                        if e.vertices != [b, a] {
                            return Err(MeshError::InconsistentOrientation {
                                a,
                                b,
                                left: e.left,
                                right: ci,
                            });
                        }
                        e.right = Some(ci);
                        cell_edges[ci][k] = ei;
                    }
                }
            }
        }

        let mut adjacency = vec![Vec::with_capacity(3); cells.len()];
        for e in &edges {
            if let Some(r) = e.right {
                adjacency[e.left].push(r);
                adjacency[r].push(e.left);
            }
        }
        for adj in &mut adjacency {
            adj.sort_unstable();
        }

        Ok(Self {
            vertices,
            cells,
            edges,
            cell_areas,
            cell_centroids,
            adjacency,
            cell_edges,
        })
    }

    /// The unit square split along the diagonal (0,0)-(1,1).
    pub fn two_triangle_square() -> Self {
        let (z, o) = (T::zero(), T::one());
        let vertices = vec![[z, z], [o, z], [o, o], [z, o]];
        let cells = vec![[0, 1, 2], [0, 2, 3]];
        Self::build_connectivity(vertices, cells).expect("fixture mesh is valid")
    }

    pub fn vertices(&self) -> &[[T; 2]] {
        &self.vertices
    }

    pub fn cells(&self) -> &[[usize; 3]] {
        &self.cells
    }

    pub fn edges(&self) -> &[Edge<T>] {
        &self.edges
    }

    pub fn n_cells(&self) -> usize {
        self.cells.len()
    }

    pub fn n_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn n_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn cell_areas(&self) -> &[T] {
        &self.cell_areas
    }

    pub fn cell_area(&self, cell: usize) -> T {
        self.cell_areas[cell]
    }

    pub fn cell_centroids(&self) -> &[[T; 2]] {
        &self.cell_centroids
    }

    pub fn centroid(&self, cell: usize) -> [T; 2] {
        self.cell_centroids[cell]
    }

    /// Edge-sharing neighbours of `cell`, sorted ascending.
    pub fn neighbors(&self, cell: usize) -> &[usize] {
        &self.adjacency[cell]
    }

    /// Edge indices of `cell`, in local vertex order.
    pub fn cell_edges(&self, cell: usize) -> [usize; 3] {
        self.cell_edges[cell]
    }

    pub fn interior_edges(&self) -> impl Iterator<Item = (usize, &Edge<T>)> {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| !e.is_boundary())
    }

    pub fn total_area(&self) -> T {
        self.cell_areas.iter().copied().sum()
    }

    /// Largest vertex-to-vertex extent of the bounding box diagonal.
    pub fn diameter(&self) -> T {
        let mut lo = [T::infinity(); 2];
        let mut hi = [T::neg_infinity(); 2];
        for p in &self.vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }
        (hi[0] - lo[0]).hypot(hi[1] - lo[1])
    }

    /// V - E + F with F counting the outer face.
    pub fn euler_characteristic(&self) -> i64 {
        self.vertices.len() as i64 - self.edges.len() as i64 + self.cells.len() as i64 + 1
    }

    /// 2 * inradius / circumradius of a cell; 1 for equilateral triangles.
    pub fn cell_quality(&self, cell: usize) -> T {
        let [a, b, c] = self.cells[cell].map(|i| self.vertices[i]);
        let la = (b[0] - c[0]).hypot(b[1] - c[1]);
        let lb = (a[0] - c[0]).hypot(a[1] - c[1]);
        let lc = (a[0] - b[0]).hypot(a[1] - b[1]);
        (lb + lc - la) * (lc + la - lb) * (la + lb - lc) / (la * lb * lc)
    }

    pub fn min_quality(&self) -> T {
        (0..self.n_cells())
            .map(|c| self.cell_quality(c))
            .fold(T::infinity(), T::min)
    }

    /// Longest edge of any cell; a cell "diameter" scale for comparisons.
    pub fn max_edge_length(&self) -> T {
        self.edges.iter().map(|e| e.length).fold(T::zero(), T::max)
    }

    /// Checks the structural invariants every simulation mesh must satisfy.
    ///
    /// `expected_area` is the domain measure (1 for the unit square); the
    /// area check uses an absolute tolerance of 1e-10, widened to the
    /// accumulated rounding of the scalar type when that is coarser.
    pub fn verify(&self, expected_area: T) -> Result<(), MeshError> {
        let total = self.total_area();
        let eps = T::epsilon();
        let area_tol =
            T::lit(1e-10).max(T::lit(16.0) * T::from_usize_lossy(self.cells.len()) * eps);
        if (total - expected_area).abs() > area_tol {
            return Err(MeshError::AreaMismatch {
                total: total.to_f64_lossy(),
                expected: expected_area.to_f64_lossy(),
            });
        }
        for (ci, &a) in self.cell_areas.iter().enumerate() {
            if !(a > T::zero()) {
                return Err(MeshError::DegenerateCell { cell: ci });
            }
        }
        let chi = self.euler_characteristic();
        if chi != 2 {
            return Err(MeshError::EulerMismatch { chi });
        }
        let tol = T::lit(1e-12).max(T::lit(16.0) * eps);
        for (ei, e) in self.edges.iter().enumerate() {
            let [a, b] = e.vertices.map(|i| self.vertices[i]);
            let (n, len) = edge_normal(a, b);
            let norm = e.normal[0].hypot(e.normal[1]);
            if (norm - T::one()).abs() > tol
                || (n[0] - e.normal[0]).abs() > tol
                || (n[1] - e.normal[1]).abs() > tol
                || len != e.length
            {
                return Err(MeshError::NormalMismatch { edge: ei });
            }
            if let Some(r) = e.right {
                // Seen from the right cell, the edge is traversed b -> a.
                let (nr, lr) = edge_normal(b, a);
                if nr[0] != -e.normal[0] || nr[1] != -e.normal[1] || lr != e.length {
                    return Err(MeshError::NormalMismatch { edge: ei });
                }
                // Normal must point from the left centroid's side to the right one's.
                let cl = self.cell_centroids[e.left];
                let cr = self.cell_centroids[r];
                let d = (cr[0] - cl[0]) * e.normal[0] + (cr[1] - cl[1]) * e.normal[1];
                if !(d > T::zero()) {
                    return Err(MeshError::NormalMismatch { edge: ei });
                }
            }
        }
        let mut edge_uses = vec![0usize; self.edges.len()];
        for ce in &self.cell_edges {
            for &ei in ce {
                edge_uses[ei] += 1;
            }
        }
        for (ei, e) in self.edges.iter().enumerate() {
            let want = if e.is_boundary() { 1 } else { 2 };
            if edge_uses[ei] != want {
                return Err(MeshError::NormalMismatch { edge: ei });
            }
        }
        for (ci, adj) in self.adjacency.iter().enumerate() {
            if adj.len() > 3 {
                return Err(MeshError::Adjacency {
                    cell: ci,
                    count: adj.len(),
                });
            }
        }
        Ok(())
    }
}
