//! Lattice addressing: vertices, canonical edge ids, axis-aligned regions.

use crate::error::{Error, Result};

/// A vertex of the square lattice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    pub x: i64,
    pub y: i64,
}

impl Vertex {
    pub const fn new(x: i64, y: i64) -> Self {
        Vertex { x, y }
    }

    /// L1 distance to `other`.
    pub fn l1(&self, other: Vertex) -> i64 {
        (self.x - other.x).abs() + (self.y - other.y).abs()
    }
}

/// Orientation of a canonical edge: from `base` to `base + (1,0)` or `base + (0,1)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Axis {
    East,
    North,
}

/// Canonical id of an undirected nearest-neighbor edge. `base` is the
/// lexicographically smaller endpoint, so every edge has exactly one id and
/// is sampled exactly once.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct EdgeId {
    pub base: Vertex,
    pub axis: Axis,
}

impl EdgeId {
    /// Canonical id of the edge between two adjacent vertices.
    ///
    /// Panics if the vertices are not nearest neighbors.
    pub fn between(u: Vertex, v: Vertex) -> EdgeId {
        let (a, b) = if (u.x, u.y) <= (v.x, v.y) { (u, v) } else { (v, u) };
        let axis = match (b.x - a.x, b.y - a.y) {
            (1, 0) => Axis::East,
            (0, 1) => Axis::North,
            _ => panic!("EdgeId::between called on non-adjacent vertices"),
        };
        EdgeId { base: a, axis }
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        let other = match self.axis {
            Axis::East => Vertex::new(self.base.x + 1, self.base.y),
            Axis::North => Vertex::new(self.base.x, self.base.y + 1),
        };
        (self.base, other)
    }
}

/// Axis-aligned lattice box, bounds inclusive. Passage-time queries are
/// restricted to paths inside the region; see `clip_region` for how regions
/// are sized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Region {
    pub xmin: i64,
    pub xmax: i64,
    pub ymin: i64,
    pub ymax: i64,
}

impl Region {
    pub fn new(xmin: i64, xmax: i64, ymin: i64, ymax: i64) -> Result<Region> {
        if xmin > xmax || ymin > ymax {
            return Err(Error::InvalidSpec(alloc::format!(
                "empty region [{xmin},{xmax}]x[{ymin},{ymax}]"
            )));
        }
        Ok(Region { xmin, xmax, ymin, ymax })
    }

    pub fn width(&self) -> usize {
        (self.xmax - self.xmin + 1) as usize
    }

    pub fn height(&self) -> usize {
        (self.ymax - self.ymin + 1) as usize
    }

    pub fn len(&self) -> usize {
        self.width() * self.height()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: Vertex) -> bool {
        v.x >= self.xmin && v.x <= self.xmax && v.y >= self.ymin && v.y <= self.ymax
    }

    /// Strictly inside, not on the bounding ring.
    pub fn interior_contains(&self, v: Vertex) -> bool {
        v.x > self.xmin && v.x < self.xmax && v.y > self.ymin && v.y < self.ymax
    }

    pub fn on_boundary(&self, v: Vertex) -> bool {
        self.contains(v) && !self.interior_contains(v)
    }

    /// Row-major index of an in-region vertex.
    #[inline]
    pub fn index(&self, v: Vertex) -> usize {
        debug_assert!(self.contains(v));
        (v.y - self.ymin) as usize * self.width() + (v.x - self.xmin) as usize
    }

    #[inline]
    pub fn vertex(&self, idx: usize) -> Vertex {
        let w = self.width();
        Vertex::new(self.xmin + (idx % w) as i64, self.ymin + (idx / w) as i64)
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.len()).map(move |i| self.vertex(i))
    }
}
