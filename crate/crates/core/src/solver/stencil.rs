//! Two-cell edge gradients shared by the flux computations and diagnostics.

use serde::{Deserialize, Serialize};

use crate::mesh::TriMesh;
use crate::scalar::Scalar;

/// How a cell-centred field is differentiated across an interior edge.
///
/// Both schemes produce `grad u = (u_right - u_left) * factor`, with a
/// per-edge `factor` fixed by the geometry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GradientScheme {
    /// `((u_j - u_i)/|x_j - x_i|, (u_j - u_i)/|y_j - y_i|)`, each component
    /// set to zero when its centroid offset is below `1e-12 * diameter`.
    ComponentQuotient,
    /// `(u_j - u_i) * d / |d|^2` with `d` the centroid offset, so that
    /// `grad u . d = u_j - u_i`.
    TwoPoint,
}

/// Geometry of one interior edge as seen by the two-cell stencil.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StencilEdge<T> {
    pub edge: usize,
    pub left: usize,
    pub right: usize,
    pub length: T,
    pub normal: [T; 2],
    pub grad_factor: [T; 2],
    /// `grad_factor . normal`: normal derivative per unit jump.
    pub transmissibility: T,
    /// Distance between the two centroids.
    pub dist: T,
    pub min_area: T,
}

#[derive(Debug, Clone)]
pub struct EdgeStencil<T> {
    scheme: GradientScheme,
    edges: Vec<StencilEdge<T>>,
    guarded_components: usize,
}

fn grad_factor<T: Scalar>(scheme: GradientScheme, d: [T; 2], delta: T) -> ([T; 2], usize) {
    match scheme {
        GradientScheme::ComponentQuotient => {
            let mut guarded = 0;
            let mut f = [T::zero(); 2];
            for k in 0..2 {
                if d[k].abs() > delta {
                    f[k] = T::one() / d[k].abs();
                } else {
                    guarded += 1;
                }
            }
            (f, guarded)
        }
        GradientScheme::TwoPoint => {
            let d2 = d[0] * d[0] + d[1] * d[1];
            ([d[0] / d2, d[1] / d2], 0)
        }
    }
}

impl<T: Scalar> EdgeStencil<T> {
    pub fn new(mesh: &TriMesh<T>, scheme: GradientScheme) -> Self {
        let delta = T::lit(1e-12) * mesh.diameter();
        let mut guarded_components = 0;
        let edges = mesh
            .interior_edges()
            .map(|(ei, e)| {
                let right = e.right.expect("interior edge");
                let (cl, cr) = (mesh.centroid(e.left), mesh.centroid(right));
                let d = [cr[0] - cl[0], cr[1] - cl[1]];
                let (f, g) = grad_factor(scheme, d, delta);
                guarded_components += g;
                StencilEdge {
                    edge: ei,
                    left: e.left,
                    right,
                    length: e.length,
                    normal: e.normal,
                    grad_factor: f,
                    transmissibility: f[0] * e.normal[0] + f[1] * e.normal[1],
                    dist: d[0].hypot(d[1]),
                    min_area: mesh.cell_area(e.left).min(mesh.cell_area(right)),
                }
            })
            .collect();
        Self {
            scheme,
            edges,
            guarded_components,
        }
    }

    pub fn scheme(&self) -> GradientScheme {
        self.scheme
    }

    /// Interior edges in mesh edge order.
    pub fn edges(&self) -> &[StencilEdge<T>] {
        &self.edges
    }

    /// Number of gradient components zeroed by the near-axis guard.
    pub fn guarded_components(&self) -> usize {
        self.guarded_components
    }

    /// Edges whose normal derivative has the wrong sign relative to the jump.
    pub fn negative_transmissibility_count(&self) -> usize {
        self.edges
            .iter()
            .filter(|e| e.transmissibility < T::zero())
            .count()
    }
}

/// Gradient of `field` across mesh edge `edge`, oriented left to right.
///
/// Boundary edges return zero (no-flux).
pub fn edge_gradient<T: Scalar>(
    mesh: &TriMesh<T>,
    field: &[T],
    edge: usize,
    scheme: GradientScheme,
) -> [T; 2] {
    let e = &mesh.edges()[edge];
    let Some(right) = e.right else {
        return [T::zero(); 2];
    };
    let (cl, cr) = (mesh.centroid(e.left), mesh.centroid(right));
    let d = [cr[0] - cl[0], cr[1] - cl[1]];
    let (f, _) = grad_factor(scheme, d, T::lit(1e-12) * mesh.diameter());
    let jump = field[right] - field[e.left];
    [jump * f[0], jump * f[1]]
}
