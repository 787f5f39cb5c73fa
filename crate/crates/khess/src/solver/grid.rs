//! Uniform rectangular grids in dimension 2 and 3, with optional node masks
//! for discretized balls and sublevel sets.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 3;

/// Node coordinates; unused trailing entries are zero.
pub type Coords = [usize; MAX_DIM];
/// Physical point; unused trailing entries are zero.
pub type Point = [f64; MAX_DIM];

/// Uniform tensor grid over a box with identical spacing on every axis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridDomain {
    dim: usize,
    lows: Point,
    highs: Point,
    resolution: usize,
    spacing: f64,
}

impl GridDomain {
    /// `resolution` is the node count per axis (>= 5); spacing must come out
    /// identical on every axis.
    pub fn new(lows: &[f64], highs: &[f64], resolution: usize) -> Result<Self> {
        let dim = lows.len();
        if dim < 2 || dim > MAX_DIM {
            return Err(Error::domain(format!("grid dimension must be 2 or 3, got {dim}")));
        }
        if highs.len() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: highs.len(),
            });
        }
        if resolution < 5 {
            return Err(Error::domain(format!(
                "resolution must be >= 5 nodes per axis, got {resolution}"
            )));
        }
        let h0 = (highs[0] - lows[0]) / (resolution - 1) as f64;
        if !(h0 > 0.0) {
            return Err(Error::domain("domain box has nonpositive extent".to_string()));
        }
        let mut l = [0.0; MAX_DIM];
        let mut u = [0.0; MAX_DIM];
        for a in 0..dim {
            let ha = (highs[a] - lows[a]) / (resolution - 1) as f64;
            if ((ha - h0) / h0).abs() > 1e-12 {
                return Err(Error::domain(format!(
                    "spacing differs across axes: {ha} vs {h0}"
                )));
            }
            l[a] = lows[a];
            u[a] = highs[a];
        }
        Ok(GridDomain {
            dim,
            lows: l,
            highs: u,
            resolution,
            spacing: h0,
        })
    }

    /// Cube [low, high]^dim.
    pub fn cube(dim: usize, low: f64, high: f64, resolution: usize) -> Result<Self> {
        GridDomain::new(&vec![low; dim], &vec![high; dim], resolution)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn lows(&self) -> &[f64] {
        &self.lows[..self.dim]
    }

    pub fn highs(&self) -> &[f64] {
        &self.highs[..self.dim]
    }

    pub fn node_count(&self) -> usize {
        self.resolution.pow(self.dim as u32)
    }

    /// Row-major index; the last axis is fastest.
    pub fn index(&self, c: Coords) -> usize {
        let r = self.resolution;
        match self.dim {
            2 => c[0] * r + c[1],
            _ => (c[0] * r + c[1]) * r + c[2],
        }
    }

    pub fn coords(&self, idx: usize) -> Coords {
        let r = self.resolution;
        match self.dim {
            2 => [idx / r, idx % r, 0],
            _ => [idx / (r * r), (idx / r) % r, idx % r],
        }
    }

    pub fn position(&self, c: Coords) -> Point {
        let mut p = [0.0; MAX_DIM];
        for a in 0..self.dim {
            p[a] = self.lows[a] + c[a] as f64 * self.spacing;
        }
        p
    }

    pub fn center(&self) -> Point {
        let mut p = [0.0; MAX_DIM];
        for a in 0..self.dim {
            p[a] = 0.5 * (self.lows[a] + self.highs[a]);
        }
        p
    }

    pub fn is_box_boundary(&self, c: Coords) -> bool {
        (0..self.dim).any(|a| c[a] == 0 || c[a] == self.resolution - 1)
    }

    /// Squared distance from the domain center to the farthest corner.
    pub fn max_center_radius2(&self) -> f64 {
        (0..self.dim)
            .map(|a| (0.5 * (self.highs[a] - self.lows[a])).powi(2))
            .sum()
    }

    pub fn node_indices(&self) -> impl Iterator<Item = usize> {
        0..self.node_count()
    }
}

/// Which nodes belong to the computational region.
///
/// `Full` solves on the whole box. `Masked` pins nodes outside the mask to
/// boundary data (nearest-node Dirichlet clamping, first-order accurate at
/// curved boundaries).
#[derive(Debug, Clone, PartialEq)]
pub enum DomainShape {
    Full,
    Masked(Vec<bool>),
}

impl DomainShape {
    pub fn inside(&self, idx: usize) -> bool {
        match self {
            DomainShape::Full => true,
            DomainShape::Masked(mask) => mask[idx],
        }
    }

    /// Unknowns are strictly interior to the box and inside the mask.
    pub fn is_unknown(&self, domain: &GridDomain, c: Coords) -> bool {
        !domain.is_box_boundary(c) && self.inside(domain.index(c))
    }

    pub fn unknown_indices(&self, domain: &GridDomain) -> Vec<usize> {
        domain
            .node_indices()
            .filter(|&i| self.is_unknown(domain, domain.coords(i)))
            .collect()
    }
}
