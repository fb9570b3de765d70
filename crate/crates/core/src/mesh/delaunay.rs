//! Incremental Bowyer-Watson Delaunay triangulation of a planar point set.

use std::collections::HashMap;

use crate::scalar::Scalar;

struct Tri<T> {
    v: [usize; 3],
    center: [T; 2],
    radius2: T,
}

fn circumcircle<T: Scalar>(a: [T; 2], b: [T; 2], c: [T; 2]) -> ([T; 2], T) {
    let two = T::lit(2.0);
    let bx = b[0] - a[0];
    let by = b[1] - a[1];
    let cx = c[0] - a[0];
    let cy = c[1] - a[1];
    let d = two * (bx * cy - by * cx);
    let b2 = bx * bx + by * by;
    let c2 = cx * cx + cy * cy;
    let ux = (cy * b2 - by * c2) / d;
    let uy = (bx * c2 - cx * b2) / d;
    ([a[0] + ux, a[1] + uy], ux * ux + uy * uy)
}

fn make_tri<T: Scalar>(pts: &[[T; 2]], v: [usize; 3]) -> Tri<T> {
    let (center, radius2) = circumcircle(pts[v[0]], pts[v[1]], pts[v[2]]);
    Tri { v, center, radius2 }
}

/// Returns counterclockwise triangles over `points` (indices into the input).
///
/// Points are inserted in input order, so the output is deterministic.
pub(crate) fn triangulate<T: Scalar>(points: &[[T; 2]]) -> Vec<[usize; 3]> {
    let n = points.len();
    if n < 3 {
        return Vec::new();
    }
    let mut lo = [T::infinity(); 2];
    let mut hi = [T::neg_infinity(); 2];
    for p in points {
        for d in 0..2 {
            lo[d] = lo[d].min(p[d]);
            hi[d] = hi[d].max(p[d]);
        }
    }
    let half = T::lit(0.5);
    let cx = (lo[0] + hi[0]) * half;
    let cy = (lo[1] + hi[1]) * half;
    let m = (hi[0] - lo[0])
        .max(hi[1] - lo[1])
        .max(T::min_positive_value());
    let big = T::lit(20.0) * m;
    let ten = T::lit(10.0) * m;

    let mut pts: Vec<[T; 2]> = points.to_vec();
    pts.push([cx - big, cy - ten]);
    pts.push([cx + big, cy - ten]);
    pts.push([cx, cy + big]);

    let mut tris = vec![make_tri(&pts, [n, n + 1, n + 2])];
    let mut boundary: HashMap<(usize, usize), (usize, usize, u8)> = HashMap::new();
    let mut edge_order: Vec<(usize, usize)> = Vec::new();

    for (pi, &p) in points.iter().enumerate() {
        boundary.clear();
        edge_order.clear();
        let mut k = 0;
        while k < tris.len() {
            let t = &tris[k];
            let dx = p[0] - t.center[0];
            let dy = p[1] - t.center[1];
            if dx * dx + dy * dy < t.radius2 {
                let v = t.v;
                for j in 0..3 {
                    let (a, b) = (v[j], v[(j + 1) % 3]);
                    let key = (a.min(b), a.max(b));
                    boundary
                        .entry(key)
                        .and_modify(|e| e.2 += 1)
                        .or_insert_with(|| {
                            edge_order.push(key);
                            (a, b, 1)
                        });
                }
                tris.swap_remove(k);
            } else {
                k += 1;
            }
        }
        for key in &edge_order {
            let (a, b, count) = boundary[key];
            if count == 1 {
                tris.push(make_tri(&pts, [a, b, pi]));
            }
        }
    }

    let mut out: Vec<[usize; 3]> = tris
        .into_iter()
        .map(|t| t.v)
        .filter(|v| v.iter().all(|&i| i < n))
        .collect();
    // Stable, index-based order independent of cavity bookkeeping.
    for t in &mut out {
        let r = (0..3).min_by_key(|&j| t[j]).unwrap();
        t.rotate_left(r);
    }
    out.sort_unstable();
    out
}
