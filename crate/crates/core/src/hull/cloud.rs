use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A finite set of points in `R^dim`, stored row-major, each carrying a
/// stable integer label.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    ids: Vec<u64>,
}

impl PointCloud {
    /// Empty cloud in `R^dim`.
    pub fn empty(dim: usize) -> Self {
        assert!(dim > 0, "dimension must be positive");
        Self { dim, coords: Vec::new(), ids: Vec::new() }
    }

    /// Builds a cloud from a flat coordinate buffer; ids are `0..n`.
    pub fn new(dim: usize, coords: Vec<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::OutOfRange("dimension must be positive".into()));
        }
        if !coords.len().is_multiple_of(dim) {
            return Err(Error::DimensionMismatch { expected: dim, got: coords.len() % dim });
        }
        let n = coords.len() / dim;
        Ok(Self { dim, coords, ids: (0..n as u64).collect() })
    }

    pub fn with_ids(dim: usize, coords: Vec<f64>, ids: Vec<u64>) -> Result<Self> {
        let mut cloud = Self::new(dim, coords)?;
        if ids.len() != cloud.len() {
            return Err(Error::DimensionMismatch { expected: cloud.len(), got: ids.len() });
        }
        let unique: HashSet<u64> = ids.iter().copied().collect();
        if unique.len() != ids.len() {
            return Err(Error::OutOfRange("point ids must be unique".into()));
        }
        cloud.ids = ids;
        Ok(cloud)
    }

    pub fn from_points<P: AsRef<[f64]>>(dim: usize, points: &[P]) -> Result<Self> {
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            let p = p.as_ref();
            if p.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
            }
            coords.extend_from_slice(p);
        }
        Self::new(dim, coords)
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn id(&self, i: usize) -> u64 {
        self.ids[i]
    }

    pub fn ids(&self) -> &[u64] {
        &self.ids
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.dim)
    }

    /// Appends a point with the next free id (max id + 1).
    pub fn push(&mut self, p: &[f64]) -> u64 {
        assert_eq!(p.len(), self.dim, "point dimension mismatch");
        let id = self.ids.iter().max().map_or(0, |m| m + 1);
        self.coords.extend_from_slice(p);
        self.ids.push(id);
        id
    }

    /// Index of the point carrying `id`.
    pub fn index_of(&self, id: u64) -> Option<usize> {
        self.ids.iter().position(|&x| x == id)
    }

    /// Sub-cloud of the given indices, ids preserved.
    pub fn select(&self, indices: &[usize]) -> Self {
        let mut coords = Vec::with_capacity(indices.len() * self.dim);
        let mut ids = Vec::with_capacity(indices.len());
        for &i in indices {
            coords.extend_from_slice(self.point(i));
            ids.push(self.ids[i]);
        }
        Self { dim: self.dim, coords, ids }
    }

    /// Largest absolute coordinate, used to scale tolerances.
    pub fn coord_scale(&self) -> f64 {
        self.coords.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300)
    }

    /// Applies `f` to every point, producing a cloud of dimension `new_dim`.
    pub fn map_points<F>(&self, new_dim: usize, mut f: F) -> Self
    where
        F: FnMut(&[f64], &mut [f64]),
    {
        let mut coords = vec![0.0; self.len() * new_dim];
        for (src, dst) in self.points().zip(coords.chunks_exact_mut(new_dim)) {
            f(src, dst);
        }
        Self { dim: new_dim, coords, ids: self.ids.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_ragged_and_duplicate_ids() {
        assert!(PointCloud::new(2, vec![1.0, 2.0, 3.0]).is_err());
        assert!(PointCloud::with_ids(1, vec![1.0, 2.0], vec![4, 4]).is_err());
        let c = PointCloud::with_ids(1, vec![1.0, 2.0], vec![4, 9]).unwrap();
        assert_eq!(c.index_of(9), Some(1));
    }

    #[test]
    fn push_allocates_fresh_ids() {
        let mut c = PointCloud::with_ids(2, vec![0.0, 0.0], vec![5]).unwrap();
        assert_eq!(c.push(&[1.0, 1.0]), 6);
        assert_eq!(c.len(), 2);
        assert_eq!(c.point(1), &[1.0, 1.0]);
    }
}
