//! Scalar monitors computed from a snapshot.

use crate::mesh::TriMesh;
use crate::scalar::Scalar;
use crate::solver::EdgeStencil;
use crate::state::SimState;

/// Column order of the diagnostics CSV.
pub const CSV_HEADER: &str =
    "t,mass_c,min_c,max_c,min_v,max_v,entropy,grad_energy,support_fraction_c,zero_set_violations,aux_u_mass,front_radius";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsConfig<T> {
    /// Threshold above which a cell counts as occupied by tumour cells.
    pub c_tol: T,
    /// Reference point for [`front_radius`].
    pub center: [T; 2],
}

impl<T: Scalar> Default for DiagnosticsConfig<T> {
    fn default() -> Self {
        Self {
            c_tol: T::lit(1e-6),
            center: [T::lit(0.5), T::lit(0.5)],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagnosticsRecord<T> {
    pub t: T,
    pub mass_c: T,
    pub min_c: T,
    pub max_c: T,
    pub min_v: T,
    pub max_v: T,
    /// `sum |cell| (c ln c - c)`, with `0 ln 0 = 0`.
    pub entropy: T,
    /// Discrete `int |grad sqrt(v)|^2 / (1 + v)^2`.
    pub grad_energy: T,
    pub support_fraction_c: T,
    /// Cells with `v0 = 0` but `v > 0`.
    pub zero_set_violations: usize,
    /// `sum |cell| ln(1 + sqrt(v) c)`.
    pub aux_u_mass: T,
    pub front_radius: T,
}

impl<T: Scalar> DiagnosticsRecord<T> {
    pub fn values(&self) -> [f64; 12] {
        [
            self.t.to_f64_lossy(),
            self.mass_c.to_f64_lossy(),
            self.min_c.to_f64_lossy(),
            self.max_c.to_f64_lossy(),
            self.min_v.to_f64_lossy(),
            self.max_v.to_f64_lossy(),
            self.entropy.to_f64_lossy(),
            self.grad_energy.to_f64_lossy(),
            self.support_fraction_c.to_f64_lossy(),
            self.zero_set_violations as f64,
            self.aux_u_mass.to_f64_lossy(),
            self.front_radius.to_f64_lossy(),
        ]
    }

    pub fn all_finite(&self) -> bool {
        self.values().iter().all(|x| x.is_finite())
    }
}

pub fn record<T: Scalar>(
    mesh: &TriMesh<T>,
    stencil: &EdgeStencil<T>,
    state: &SimState<T>,
    v0: &[T],
    cfg: &DiagnosticsConfig<T>,
) -> DiagnosticsRecord<T> {
    let areas = mesh.cell_areas();
    let n = mesh.n_cells();
    let (c, v) = (&state.c, &state.v);

    let mut entropy = T::zero();
    let mut aux = T::zero();
    let mut occupied = 0usize;
    for i in 0..n {
        let ci = c[i];
        let clnc = if ci > T::zero() {
            ci * ci.ln()
        } else {
            T::zero()
        };
        entropy = entropy + areas[i] * (clnc - ci);
        aux = aux + areas[i] * (T::one() + v[i].max(T::zero()).sqrt() * ci).ln();
        if ci > cfg.c_tol {
            occupied += 1;
        }
    }

    let zero_set_violations = v0
        .iter()
        .zip(v.iter())
        .filter(|(&a, &b)| a == T::zero() && b > T::zero())
        .count();

    DiagnosticsRecord {
        t: state.t,
        mass_c: c.integral(mesh),
        min_c: c.min(),
        max_c: c.max(),
        min_v: v.min(),
        max_v: v.max(),
        entropy,
        grad_energy: grad_energy(mesh, stencil, v),
        support_fraction_c: T::from_usize_lossy(occupied) / T::from_usize_lossy(n),
        zero_set_violations,
        aux_u_mass: aux,
        front_radius: front_radius(mesh, c, cfg.center, cfg.c_tol),
    }
}

/// Edge quadrature of `int |grad sqrt(v)|^2 / (1 + v)^2`.
///
/// Each interior edge carries the weight `(|cell_l| + |cell_r|) / (2 * 1.5)`,
/// 1.5 being the number of edges per triangle once shared edges are split
/// between their two cells. The gradient is the solver's two-cell stencil
/// applied to `sqrt(v)`; `1 / (1 + v)^2` is averaged arithmetically.
pub fn grad_energy<T: Scalar>(mesh: &TriMesh<T>, stencil: &EdgeStencil<T>, v: &[T]) -> T {
    let areas = mesh.cell_areas();
    let three = T::lit(3.0);
    let half = T::lit(0.5);
    let damp = |x: T| {
        let s = T::one() + x;
        (s * s).recip()
    };
    stencil.edges().iter().fold(T::zero(), |acc, e| {
        let jump = v[e.right].max(T::zero()).sqrt() - v[e.left].max(T::zero()).sqrt();
        let g2 = jump
            * jump
            * (e.grad_factor[0] * e.grad_factor[0] + e.grad_factor[1] * e.grad_factor[1]);
        let w = (areas[e.left] + areas[e.right]) / three;
        acc + w * g2 * half * (damp(v[e.left]) + damp(v[e.right]))
    })
}

/// Largest centroid distance from `center` among cells with `c > c_tol`; 0 if none.
pub fn front_radius<T: Scalar>(mesh: &TriMesh<T>, c: &[T], center: [T; 2], c_tol: T) -> T {
    c.iter()
        .zip(mesh.cell_centroids())
        .filter(|(&ci, _)| ci > c_tol)
        .map(|(_, p)| (p[0] - center[0]).hypot(p[1] - center[1]))
        .fold(T::zero(), T::max)
}
