//! Force-equilibrium mesh generation on the unit square (Persson-Strang style).
//!
//! Points start on a jittered equilateral lattice, are connected by a Delaunay
//! triangulation, and relax under repulsive bar forces toward the target edge
//! length. Points that leave the square are projected back along the gradient
//! of its signed distance function. The four corners are fixed.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{delaunay::triangulate, MeshError, TriMesh};
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct DistMeshOptions {
    /// Seed for the interior-point jitter.
    pub seed: u64,
    /// Jitter amplitude as a fraction of the target edge length.
    pub jitter: f64,
    pub dptol: f64,
    pub ttol: f64,
    pub fscale: f64,
    pub deltat: f64,
    /// Minimum accepted 2*inradius/circumradius.
    pub min_quality: f64,
}

impl Default for DistMeshOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            jitter: 0.05,
            dptol: 1e-3,
            ttol: 0.1,
            fscale: 1.2,
            deltat: 0.2,
            min_quality: 0.3,
        }
    }
}

/// Signed distance to the unit square boundary, negative inside.
fn sdf<T: Scalar>(p: [T; 2]) -> T {
    let one = T::one();
    -(p[1].min(one - p[1]).min(p[0]).min(one - p[0]))
}

/// Generates a mesh of the unit square with uniform target edge length.
pub fn generate_unit_square_mesh<T: Scalar>(
    target_edge_length: T,
    relaxation_iters: usize,
    opts: &DistMeshOptions,
) -> Result<TriMesh<T>, MeshError> {
    let h0 = target_edge_length;
    if !(h0 > T::zero() && h0 <= T::lit(0.5)) {
        return Err(MeshError::Generation(format!(
            "target edge length {h0} outside (0, 0.5]"
        )));
    }
    let (zero, one) = (T::zero(), T::one());
    let geps = T::lit(1e-3) * h0;
    let deps = T::epsilon().sqrt() * h0;
    let dptol = T::lit(opts.dptol);
    let ttol = T::lit(opts.ttol);
    let fscale = T::lit(opts.fscale);
    let deltat = T::lit(opts.deltat);

    let fixed = [[zero, zero], [one, zero], [one, one], [zero, one]];
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut p: Vec<[T; 2]> = fixed.to_vec();
    let dy = h0 * T::lit(3f64.sqrt() / 2.0);
    let ny = (one / dy).ceil().to_usize().unwrap_or(0);
    let nx = (one / h0).ceil().to_usize().unwrap_or(0);
    let amp = T::lit(opts.jitter) * h0;
    for row in 0..=ny {
        let y = dy * T::from_usize_lossy(row);
        let shift = if row % 2 == 1 { h0 * T::lit(0.5) } else { zero };
        for col in 0..=nx {
            let x = shift + h0 * T::from_usize_lossy(col);
            let mut q = [x, y];
            if sdf(q) >= geps {
                continue;
            }
            if fixed
                .iter()
                .any(|f| (f[0] - q[0]).hypot(f[1] - q[1]) < T::lit(0.3) * h0)
            {
                continue;
            }
            let jx: f64 = rng.random_range(-1.0..1.0);
            let jy: f64 = rng.random_range(-1.0..1.0);
            q[0] = (q[0] + amp * T::lit(jx)).max(zero).min(one);
            q[1] = (q[1] + amp * T::lit(jy)).max(zero).min(one);
            p.push(q);
        }
    }
    let n_fixed = fixed.len();

    let project = |q: &mut [T; 2]| {
        let d = sdf(*q);
        if d > zero {
            let gx = (sdf([q[0] + deps, q[1]]) - d) / deps;
            let gy = (sdf([q[0], q[1] + deps]) - d) / deps;
            q[0] = q[0] - d * gx;
            q[1] = q[1] - d * gy;
        }
    };

    let mut pold: Vec<[T; 2]> = vec![[T::infinity(); 2]; p.len()];
    let mut bars: Vec<[usize; 2]> = Vec::new();
    let mut ftot = vec![[zero; 2]; p.len()];
    for _ in 0..relaxation_iters {
        let moved = p
            .iter()
            .zip(&pold)
            .map(|(a, b)| (a[0] - b[0]).hypot(a[1] - b[1]))
            .fold(zero, |m, d| if d.is_nan() || d > m { d } else { m });
        if !(moved / h0 <= ttol) {
            pold.clone_from(&p);
            bars = interior_bars(&p, geps);
        }

        let mut sum_l2 = zero;
        let lens: Vec<T> = bars
            .iter()
            .map(|&[a, b]| {
                let l = (p[a][0] - p[b][0]).hypot(p[a][1] - p[b][1]);
                sum_l2 = sum_l2 + l * l;
                l
            })
            .collect();
        let l0 = fscale * (sum_l2 / T::from_usize_lossy(bars.len().max(1))).sqrt();
        ftot.fill([zero; 2]);
        for (&[a, b], &l) in bars.iter().zip(&lens) {
            let f = (l0 - l).max(zero);
            if f == zero || l == zero {
                continue;
            }
            let s = f / l;
            let fx = s * (p[a][0] - p[b][0]);
            let fy = s * (p[a][1] - p[b][1]);
            ftot[a][0] = ftot[a][0] + fx;
            ftot[a][1] = ftot[a][1] + fy;
            ftot[b][0] = ftot[b][0] - fx;
            ftot[b][1] = ftot[b][1] - fy;
        }
        let mut max_step = zero;
        for (i, q) in p.iter_mut().enumerate().skip(n_fixed) {
            q[0] = q[0] + deltat * ftot[i][0];
            q[1] = q[1] + deltat * ftot[i][1];
            project(q);
            if sdf(*q) < -geps {
                max_step = max_step.max(deltat * ftot[i][0].hypot(ftot[i][1]));
            }
        }
        if max_step / h0 < dptol {
            break;
        }
    }

    // Boundary points land on the square up to roundoff; make that exact.
    for q in p.iter_mut().skip(n_fixed) {
        for c in q.iter_mut() {
            if *c < geps {
                *c = zero;
            } else if *c > one - geps {
                *c = one;
            }
        }
    }

    let tris = filtered_triangles(&p, geps, h0);
    let (vertices, cells) = compact(p, tris);
    let mesh = TriMesh::build_connectivity(vertices, cells)?;
    mesh.verify(one)
        .map_err(|e| MeshError::Generation(format!("invalid triangulation: {e}")))?;
    let q = mesh.min_quality();
    if q < T::lit(opts.min_quality) {
        return Err(MeshError::Generation(format!(
            "minimum cell quality {q} below {} after {relaxation_iters} iterations",
            opts.min_quality
        )));
    }
    Ok(mesh)
}

fn tri_area<T: Scalar>(p: &[[T; 2]], t: [usize; 3]) -> T {
    let [a, b, c] = t.map(|i| p[i]);
    ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1])) * T::lit(0.5)
}

fn filtered_triangles<T: Scalar>(p: &[[T; 2]], geps: T, h0: T) -> Vec<[usize; 3]> {
    let third = T::lit(1.0 / 3.0);
    let min_area = T::lit(1e-12) * h0 * h0;
    triangulate(p)
        .into_iter()
        .filter(|&t| {
            let [a, b, c] = t.map(|i| p[i]);
            let centroid = [(a[0] + b[0] + c[0]) * third, (a[1] + b[1] + c[1]) * third];
            sdf(centroid) < -geps && tri_area(p, t) > min_area
        })
        .collect()
}

fn interior_bars<T: Scalar>(p: &[[T; 2]], geps: T) -> Vec<[usize; 2]> {
    let tris = filtered_triangles(p, geps, T::one());
    let mut bars: Vec<[usize; 2]> = tris
        .iter()
        .flat_map(|t| [[t[0], t[1]], [t[1], t[2]], [t[2], t[0]]])
        .map(|[a, b]| [a.min(b), a.max(b)])
        .collect();
    bars.sort_unstable();
    bars.dedup();
    bars
}

/// Drops vertices no cell references and renumbers the rest in order.
fn compact<T: Scalar>(p: Vec<[T; 2]>, tris: Vec<[usize; 3]>) -> (Vec<[T; 2]>, Vec<[usize; 3]>) {
    let mut map = vec![usize::MAX; p.len()];
    for t in &tris {
        for &i in t {
            map[i] = 0;
        }
    }
    let mut vertices = Vec::with_capacity(p.len());
    for (i, q) in p.into_iter().enumerate() {
        if map[i] == 0 {
            map[i] = vertices.len();
            vertices.push(q);
        }
    }
    let cells = tris.into_iter().map(|t| t.map(|i| map[i])).collect();
    (vertices, cells)
}
