//! Per-cell fields and the simulation state.

use std::ops::{Deref, DerefMut};

use crate::mesh::TriMesh;
use crate::model::V_CLAMP_SLACK;
use crate::scalar::Scalar;

/// One value per mesh cell, in mesh cell order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CellField<T>(Vec<T>);

impl<T: Scalar> CellField<T> {
    pub fn new(values: Vec<T>) -> Self {
        Self(values)
    }

    pub fn constant(n: usize, value: T) -> Self {
        Self(vec![value; n])
    }

    pub fn into_inner(self) -> Vec<T> {
        self.0
    }

    /// `sum_i |cell_i| * u_i`, summed in cell order.
    pub fn integral(&self, mesh: &TriMesh<T>) -> T {
        self.0
            .iter()
            .zip(mesh.cell_areas())
            .fold(T::zero(), |acc, (&u, &a)| acc + a * u)
    }

    pub fn mean(&self, mesh: &TriMesh<T>) -> T {
        self.integral(mesh) / mesh.total_area()
    }

    pub fn min(&self) -> T {
        self.0.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.0.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Index of the first non-finite entry.
    pub fn first_non_finite(&self) -> Option<usize> {
        self.0.iter().position(|x| !x.is_finite())
    }

    /// `sum_i |cell_i| * |u_i - w_i|`.
    pub fn l1_distance(&self, other: &Self, mesh: &TriMesh<T>) -> T {
        self.0
            .iter()
            .zip(&other.0)
            .zip(mesh.cell_areas())
            .fold(T::zero(), |acc, ((&a, &b), &area)| {
                acc + area * (a - b).abs()
            })
    }
}

impl<T> Deref for CellField<T> {
    type Target = [T];
    fn deref(&self) -> &[T] {
        &self.0
    }
}

impl<T> DerefMut for CellField<T> {
    fn deref_mut(&mut self) -> &mut [T] {
        &mut self.0
    }
}

impl<T> From<Vec<T>> for CellField<T> {
    fn from(v: Vec<T>) -> Self {
        Self(v)
    }
}

/// Which invariant a [`SimState`] broke.
#[derive(Debug, Clone, PartialEq)]
pub enum StateViolation {
    LengthMismatch { c: usize, v: usize, cells: usize },
    NonFiniteC { cell: usize },
    NonFiniteV { cell: usize },
    NegativeC { cell: usize, value: f64 },
    VOutOfRange { cell: usize, value: f64 },
}

impl std::fmt::Display for StateViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::LengthMismatch { c, v, cells } => {
                write!(f, "field lengths c={c}, v={v} do not match {cells} cells")
            }
            Self::NonFiniteC { cell } => write!(f, "c is not finite in cell {cell}"),
            Self::NonFiniteV { cell } => write!(f, "v is not finite in cell {cell}"),
            Self::NegativeC { cell, value } => write!(f, "c = {value:e} < 0 in cell {cell}"),
            Self::VOutOfRange { cell, value } => {
                write!(f, "v = {value} outside [0, 1] in cell {cell}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimState<T> {
    pub t: T,
    pub c: CellField<T>,
    pub v: CellField<T>,
}

impl<T: Scalar> SimState<T> {
    pub fn new(t: T, c: CellField<T>, v: CellField<T>) -> Self {
        Self { t, c, v }
    }

    /// Checks `c >= 0`, `0 <= v <= 1` and finiteness; `v` within the clamp
    /// slack of `[0, 1]` is clamped in place.
    pub fn enforce_invariants(&mut self, n_cells: usize) -> Result<(), StateViolation> {
        if self.c.len() != n_cells || self.v.len() != n_cells {
            return Err(StateViolation::LengthMismatch {
                c: self.c.len(),
                v: self.v.len(),
                cells: n_cells,
            });
        }
        for (i, &c) in self.c.iter().enumerate() {
            if !c.is_finite() {
                return Err(StateViolation::NonFiniteC { cell: i });
            }
            if c < T::zero() {
                return Err(StateViolation::NegativeC {
                    cell: i,
                    value: c.to_f64_lossy(),
                });
            }
        }
        let slack = T::lit(V_CLAMP_SLACK);
        for (i, v) in self.v.iter_mut().enumerate() {
            if !v.is_finite() {
                return Err(StateViolation::NonFiniteV { cell: i });
            }
            if *v < -slack || *v > T::one() + slack {
                return Err(StateViolation::VOutOfRange {
                    cell: i,
                    value: v.to_f64_lossy(),
                });
            }
            *v = v.max(T::zero()).min(T::one());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integral_and_extrema() {
        let m = TriMesh::<f64>::two_triangle_square();
        let f = CellField::new(vec![1.0, 3.0]);
        assert_eq!(f.integral(&m), 2.0);
        assert_eq!(f.min(), 1.0);
        assert_eq!(f.max(), 3.0);
        assert_eq!(f.l1_distance(&CellField::new(vec![0.0, 0.0]), &m), 2.0);
    }

    #[test]
    fn invariant_enforcement() {
        let mut s = SimState::new(
            0.0,
            CellField::new(vec![0.0, 1.0]),
            CellField::new(vec![1.0 + 1e-13, -1e-13]),
        );
        s.enforce_invariants(2).unwrap();
        assert_eq!(&s.v[..], &[1.0, 0.0]);
        let mut bad = SimState::new(
            0.0,
            CellField::new(vec![-1e-300, 1.0]),
            CellField::new(vec![0.5, 0.5]),
        );
        assert!(matches!(
            bad.enforce_invariants(2),
            Err(StateViolation::NegativeC { cell: 0, .. })
        ));
        let mut bad = SimState::new(
            0.0,
            CellField::new(vec![0.0, 1.0]),
            CellField::new(vec![0.5, 1.0 + 1e-9]),
        );
        assert!(matches!(
            bad.enforce_invariants(2),
            Err(StateViolation::VOutOfRange { cell: 1, .. })
        ));
        let mut bad = SimState::new(
            0.0,
            CellField::new(vec![0.0, f64::NAN]),
            CellField::new(vec![0.5, 0.5]),
        );
        assert!(matches!(
            bad.enforce_invariants(2),
            Err(StateViolation::NonFiniteC { cell: 1 })
        ));
    }
}
