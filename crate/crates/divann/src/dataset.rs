//! The in-memory point set: flat f32 coordinates plus one color per point.

use crate::error::{Error, Result};
use crate::metric::l2;

/// An immutable set of `n` points of fixed dimension, each carrying a
/// categorical color id. Coordinates are stored row-major in one flat buffer.
#[derive(Debug, Clone)]
pub struct VectorDataset {
    dim: usize,
    data: Vec<f32>,
    colors: Vec<u32>,
}

impl VectorDataset {
    /// Validates shape and finiteness. `data.len()` must be a nonzero
    /// multiple of `dim` and `colors` must carry exactly one entry per point.
    pub fn new(dim: usize, data: Vec<f32>, colors: Vec<u32>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::usage("dimension must be at least 1"));
        }
        if data.is_empty() || data.len() % dim != 0 {
            return Err(Error::usage(format!(
                "coordinate buffer length {} is not a positive multiple of dim {}",
                data.len(),
                dim
            )));
        }
        let n = data.len() / dim;
        if colors.len() != n {
            return Err(Error::usage(format!(
                "got {} colors for {} points",
                colors.len(),
                n
            )));
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::degenerate(format!(
                "non-finite coordinate at point {}, component {}",
                pos / dim,
                pos % dim
            )));
        }
        Ok(VectorDataset { dim, data, colors })
    }

    pub fn n(&self) -> usize {
        self.data.len() / self.dim
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn point(&self, id: u32) -> &[f32] {
        let i = id as usize * self.dim;
        &self.data[i..i + self.dim]
    }

    #[inline]
    pub fn color(&self, id: u32) -> u32 {
        self.colors[id as usize]
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn raw_data(&self) -> &[f32] {
        &self.data
    }

    /// Replaces the color assignment (e.g. after loading a colors file).
    pub fn with_colors(mut self, colors: Vec<u32>) -> Result<Self> {
        if colors.len() != self.n() {
            return Err(Error::usage(format!(
                "got {} colors for {} points",
                colors.len(),
                self.n()
            )));
        }
        self.colors = colors;
        Ok(self)
    }

    /// Euclidean distance between two stored points (ids assumed valid).
    #[inline]
    pub fn dist(&self, a: u32, b: u32) -> f64 {
        l2(self.point(a), self.point(b))
    }

    /// Euclidean distance from an external query to a stored point.
    #[inline]
    pub fn dist_to(&self, q: &[f32], id: u32) -> f64 {
        debug_assert_eq!(q.len(), self.dim);
        l2(q, self.point(id))
    }

    /// Colors of the given ids, in order.
    pub fn colors_of(&self, ids: &[u32]) -> Vec<u32> {
        ids.iter().map(|&id| self.color(id)).collect()
    }
}
