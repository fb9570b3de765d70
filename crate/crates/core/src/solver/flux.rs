//! Godunov flux for the linear haptotactic transport term.

use crate::scalar::Scalar;

/// Upwind value of the linear flux `u -> a u` between `c_i` (upstream side
/// when `a > 0`) and `c_j`.
#[inline]
pub fn upwind_flux<T: Scalar>(a: T, c_i: T, c_j: T) -> T {
    if a > T::zero() {
        a * c_i
    } else if a < T::zero() {
        a * c_j
    } else {
        T::zero()
    }
}

/// Godunov flux from cell `i` to cell `j` for `f(u) n_x + g(u) n_y` with
/// `f(u) = u V_x`, `g(u) = u V_y`.
///
/// Because the flux is linear in `u` the extremum over `[c_i, c_j]` sits at
/// an endpoint, which reduces the Godunov rule to upwinding on `a = V . n`.
#[inline]
pub fn godunov_edge_flux<T: Scalar>(c_i: T, c_j: T, velocity: [T; 2], normal: [T; 2]) -> T {
    upwind_flux(velocity[0] * normal[0] + velocity[1] * normal[1], c_i, c_j)
}

/// The Godunov definition taken literally: minimum of the flux over
/// `[c_i, c_j]` when `c_i <= c_j`, maximum over `[c_j, c_i]` otherwise,
/// evaluated at the interval endpoints.
pub fn godunov_flux_minmax<T: Scalar>(c_i: T, c_j: T, velocity: [T; 2], normal: [T; 2]) -> T {
    let a = velocity[0] * normal[0] + velocity[1] * normal[1];
    let flux = |u: T| a * u;
    if a == T::zero() {
        return T::zero();
    }
    if c_i <= c_j {
        flux(c_i).min(flux(c_j))
    } else {
        flux(c_i).max(flux(c_j))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn consistency() {
        let n = [0.6, 0.8];
        let v = [1.5, -0.25];
        let a = v[0] * n[0] + v[1] * n[1];
        assert_eq!(godunov_edge_flux(0.7, 0.7, v, n), a * 0.7);
    }

    #[test]
    fn positive_speed_takes_left_state() {
        assert_eq!(godunov_edge_flux(0.3, 0.9, [2.0, 0.0], [1.0, 0.0]), 0.6);
        assert_eq!(godunov_flux_minmax(0.3, 0.9, [2.0, 0.0], [1.0, 0.0]), 0.6);
    }

    #[test]
    fn negative_speed_takes_right_state() {
        assert_eq!(godunov_edge_flux(0.3, 0.9, [-2.0, 0.0], [1.0, 0.0]), -1.8);
        assert_eq!(godunov_flux_minmax(0.9, 0.3, [-2.0, 0.0], [1.0, 0.0]), -0.6);
    }

    #[test]
    fn zero_speed() {
        assert_eq!(godunov_edge_flux(0.3, 0.9, [0.0, 0.0], [1.0, 0.0]), 0.0);
    }
}
