//! Uniform finite-difference lattice over a rectangle.
//!
//! Nodes sit at (i*h, j*h), indexed row-major from the origin
//! (index = j*nx + i). A node is *interior* when it is strictly inside the
//! rectangle; every other lattice node is a *boundary* node. The discrete
//! boundary used by the upwind eikonal scheme consists of the boundary nodes
//! that are axis-adjacent to an interior node; the four lattice corners touch
//! interior nodes only diagonally and are treated specially (see
//! [`Grid::stencil`]).

use crate::error::{Error, Result};

/// Relative tolerance used when checking that lengths are integer multiples
/// of the spacing and that points sit on the lattice.
const SNAP_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct Grid {
    /// Physical extents of the rectangle.
    pub lx: f64,
    pub lz: f64,
    /// Grid spacing (same in both axes).
    pub h: f64,
    /// Node counts per axis; nx*nz nodes in total.
    pub nx: usize,
    pub nz: usize,
    /// Node index of the primary source.
    pub source: usize,
}

/// One side of the rectangle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Wall {
    Left,
    Right,
    Bottom,
    Top,
}

/// Which boundary nodes act as receivers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SegmentSpec {
    /// The whole boundary, ordered as a closed counterclockwise loop.
    FullBoundary,
    /// A single wall, ordered along the wall (by increasing coordinate).
    Wall(Wall),
}

/// Ordered receiver nodes along a boundary path with trapezoidal weights.
///
/// Interior weights are ½(|x_i − x_{i−1}| + |x_i − x_{i+1}|); a closed loop
/// uses cyclic neighbors, an open segment uses the one-sided half-weight at
/// its endpoints. Either way the weights sum to the polygonal length of the
/// path.
#[derive(Debug, Clone)]
pub struct ReceiverSegment {
    pub nodes: Vec<usize>,
    pub weights: Vec<f64>,
    pub closed: bool,
}

impl Grid {
    /// Builds the lattice. `lx`, `lz` must be integer multiples of `h` and
    /// `source` must coincide with a lattice node.
    pub fn build(lx: f64, lz: f64, h: f64, source: (f64, f64)) -> Result<Grid> {
        let nx = axis_count(lx, h)?;
        let nz = axis_count(lz, h)?;
        let mut grid = Grid { lx, lz, h, nx, nz, source: 0 };
        grid.source = grid.node_at(source.0, source.1)?;
        Ok(grid)
    }

    pub fn n_nodes(&self) -> usize {
        self.nx * self.nz
    }

    #[inline]
    pub fn index(&self, i: usize, j: usize) -> usize {
        debug_assert!(i < self.nx && j < self.nz);
        j * self.nx + i
    }

    #[inline]
    pub fn ij(&self, idx: usize) -> (usize, usize) {
        (idx % self.nx, idx / self.nx)
    }

    /// Exact node coordinates (i*h, j*h); no accumulated rounding.
    #[inline]
    pub fn coords(&self, idx: usize) -> (f64, f64) {
        let (i, j) = self.ij(idx);
        (i as f64 * self.h, j as f64 * self.h)
    }

    #[inline]
    pub fn is_interior(&self, idx: usize) -> bool {
        let (i, j) = self.ij(idx);
        i > 0 && i + 1 < self.nx && j > 0 && j + 1 < self.nz
    }

    #[inline]
    pub fn is_boundary(&self, idx: usize) -> bool {
        !self.is_interior(idx)
    }

    /// True for the four lattice corners, which touch interior nodes only
    /// diagonally.
    #[inline]
    pub fn is_corner(&self, idx: usize) -> bool {
        let (i, j) = self.ij(idx);
        (i == 0 || i + 1 == self.nx) && (j == 0 || j + 1 == self.nz)
    }

    /// The node nearest to (x, z), clamped to the lattice.
    pub fn nearest_node(&self, x: f64, z: f64) -> usize {
        let i = ((x / self.h).round().max(0.0) as usize).min(self.nx - 1);
        let j = ((z / self.h).round().max(0.0) as usize).min(self.nz - 1);
        self.index(i, j)
    }

    /// The node at exactly (x, z); errors if the point is off-lattice.
    pub fn node_at(&self, x: f64, z: f64) -> Result<usize> {
        let idx = self.nearest_node(x, z);
        let (nx, nz) = self.coords(idx);
        let tol = SNAP_TOL * self.lx.max(self.lz);
        if (x - nx).abs() > tol || (z - nz).abs() > tol {
            return Err(Error::OffLattice { x, z, h: self.h });
        }
        Ok(idx)
    }

    #[inline]
    fn axis_neighbors(&self, idx: usize) -> [Option<usize>; 4] {
        let (i, j) = self.ij(idx);
        [
            (i > 0).then(|| self.index(i - 1, j)),
            (i + 1 < self.nx).then(|| self.index(i + 1, j)),
            (j > 0).then(|| self.index(i, j - 1)),
            (j + 1 < self.nz).then(|| self.index(i, j + 1)),
        ]
    }

    /// Neighbor sets of the discrete outflow boundary condition: interior
    /// nodes see all axis neighbors, boundary nodes see interior neighbors
    /// only (so no information flows back in through the boundary). Lattice
    /// corners have no interior axis neighbor and get an empty set.
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        let interior = self.is_interior(idx);
        self.axis_neighbors(idx)
            .into_iter()
            .flatten()
            .filter(|&n| interior || self.is_interior(n))
            .collect()
    }

    /// Upwind stencil actually used by the forward/adjoint solvers. Identical
    /// to [`Grid::neighbors`] except at the four corners, which take their
    /// values from the two adjacent wall nodes. Without this the corners have
    /// no equation at all, yet closed receiver loops need times there; corner
    /// values never feed any other node (no stencil contains a corner).
    pub fn stencil(&self, idx: usize) -> Vec<usize> {
        if self.is_corner(idx) {
            self.axis_neighbors(idx).into_iter().flatten().collect()
        } else {
            self.neighbors(idx)
        }
    }

    /// Nodes of one wall ordered by increasing coordinate, corners included.
    pub fn wall_nodes(&self, wall: Wall) -> Vec<usize> {
        match wall {
            Wall::Left => (0..self.nz).map(|j| self.index(0, j)).collect(),
            Wall::Right => (0..self.nz).map(|j| self.index(self.nx - 1, j)).collect(),
            Wall::Bottom => (0..self.nx).map(|i| self.index(i, 0)).collect(),
            Wall::Top => (0..self.nx).map(|i| self.index(i, self.nz - 1)).collect(),
        }
    }

    /// Builds the receiver segment for `spec`, with trapezoidal weights.
    pub fn receiver_segment(&self, spec: SegmentSpec) -> ReceiverSegment {
        let (nodes, closed) = match spec {
            SegmentSpec::Wall(w) => (self.wall_nodes(w), false),
            SegmentSpec::FullBoundary => {
                // Counterclockwise loop: bottom, right, top (reversed),
                // left (reversed); each corner appears exactly once.
                let mut nodes = Vec::with_capacity(2 * (self.nx + self.nz) - 4);
                nodes.extend((0..self.nx).map(|i| self.index(i, 0)));
                nodes.extend((1..self.nz).map(|j| self.index(self.nx - 1, j)));
                nodes.extend((0..self.nx - 1).rev().map(|i| self.index(i, self.nz - 1)));
                nodes.extend((1..self.nz - 1).rev().map(|j| self.index(0, j)));
                (nodes, true)
            }
        };
        let weights = self.path_weights(&nodes, closed);
        ReceiverSegment { nodes, weights, closed }
    }

    fn path_weights(&self, nodes: &[usize], closed: bool) -> Vec<f64> {
        let n = nodes.len();
        let dist = |a: usize, b: usize| {
            let (xa, za) = self.coords(nodes[a]);
            let (xb, zb) = self.coords(nodes[b]);
            (xa - xb).hypot(za - zb)
        };
        (0..n)
            .map(|k| {
                let prev = if k > 0 {
                    Some(dist(k - 1, k))
                } else if closed {
                    Some(dist(n - 1, 0))
                } else {
                    None
                };
                let next = if k + 1 < n {
                    Some(dist(k, k + 1))
                } else if closed {
                    Some(dist(n - 1, 0))
                } else {
                    None
                };
                0.5 * (prev.unwrap_or(0.0) + next.unwrap_or(0.0))
            })
            .collect()
    }
}

fn axis_count(extent: f64, h: f64) -> Result<usize> {
    if !(extent > 0.0) || !(h > 0.0) {
        return Err(Error::NonCommensurate { extent, spacing: h });
    }
    let cells = extent / h;
    if (cells - cells.round()).abs() > 1e-12 * cells.max(1.0) || cells.round() < 1.0 {
        return Err(Error::NonCommensurate { extent, spacing: h });
    }
    Ok(cells.round() as usize + 1)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn unit_grid(h: f64) -> Grid {
        Grid::build(1.0, 1.0, h, (0.5, 0.5)).unwrap()
    }

    #[test]
    fn three_by_three_classification() {
        let g = unit_grid(0.5);
        assert_eq!((g.nx, g.nz), (3, 3));
        let interior: Vec<usize> = (0..g.n_nodes()).filter(|&n| g.is_interior(n)).collect();
        assert_eq!(interior, vec![g.index(1, 1)]);
        assert_eq!((0..g.n_nodes()).filter(|&n| g.is_boundary(n)).count(), 8);
        assert_eq!(g.source, g.index(1, 1));
    }

    #[test]
    fn paper_scale_lattice_size() {
        let g = unit_grid(1.0 / 160.0);
        assert_eq!((g.nx, g.nz), (161, 161));
        assert_eq!(g.n_nodes(), 161 * 161);
    }

    #[test]
    fn non_commensurate_spacing_rejected() {
        assert!(matches!(
            Grid::build(1.0, 1.0, 0.3, (0.0, 0.0)),
            Err(Error::NonCommensurate { .. })
        ));
    }

    #[test]
    fn off_lattice_source_rejected() {
        assert!(matches!(
            Grid::build(1.0, 1.0, 0.5, (0.3, 0.5)),
            Err(Error::OffLattice { .. })
        ));
    }

    #[test]
    fn coordinates_are_exact_multiples() {
        let g = unit_grid(1.0 / 80.0);
        let idx = g.index(37, 21);
        let (x, z) = g.coords(idx);
        assert_eq!(x, 37.0 * g.h);
        assert_eq!(z, 21.0 * g.h);
    }

    #[test]
    fn neighbor_rules_on_three_by_three() {
        let g = unit_grid(0.5);
        // Interior center: all four axis neighbors.
        let mut nbrs = g.neighbors(g.index(1, 1));
        nbrs.sort_unstable();
        let mut expect = vec![g.index(0, 1), g.index(2, 1), g.index(1, 0), g.index(1, 2)];
        expect.sort_unstable();
        assert_eq!(nbrs, expect);
        // Edge midpoint: exactly the one interior neighbor.
        assert_eq!(g.neighbors(g.index(1, 0)), vec![g.index(1, 1)]);
        // Corner: no interior axis neighbor.
        assert!(g.neighbors(g.index(0, 0)).is_empty());
        // Solver stencil at the corner falls back to the two wall nodes.
        let mut st = g.stencil(g.index(0, 0));
        st.sort_unstable();
        assert_eq!(st, vec![g.index(1, 0), g.index(0, 1)]);
    }

    #[test]
    fn interior_neighbor_relation_is_symmetric() {
        let g = Grid::build(1.0, 1.0, 0.2, (0.4, 0.6)).unwrap();
        for a in 0..g.n_nodes() {
            for b in g.neighbors(a) {
                if g.is_interior(a) && g.is_interior(b) {
                    assert!(g.neighbors(b).contains(&a), "asymmetric pair ({a}, {b})");
                }
            }
        }
    }

    #[test]
    fn no_stencil_contains_a_corner() {
        let g = unit_grid(0.25);
        for n in 0..g.n_nodes() {
            for m in g.stencil(n) {
                assert!(!g.is_corner(m));
            }
        }
    }

    #[test]
    fn full_boundary_loop_weights() {
        let g = unit_grid(0.25);
        let seg = g.receiver_segment(SegmentSpec::FullBoundary);
        assert_eq!(seg.nodes.len(), 16);
        assert!(seg.closed);
        for &w in &seg.weights {
            assert_relative_eq!(w, 0.25);
        }
        assert_relative_eq!(seg.weights.iter().sum::<f64>(), 4.0);
        // No repeats.
        let mut sorted = seg.nodes.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 16);
    }

    #[test]
    fn open_wall_weights() {
        let g = unit_grid(0.25);
        let seg = g.receiver_segment(SegmentSpec::Wall(Wall::Right));
        assert_eq!(seg.nodes.len(), 5);
        assert_relative_eq!(seg.weights[0], 0.125);
        assert_relative_eq!(seg.weights[4], 0.125);
        for k in 1..4 {
            assert_relative_eq!(seg.weights[k], 0.25);
        }
        assert_relative_eq!(seg.weights.iter().sum::<f64>(), 1.0);
    }

    #[test]
    fn degenerate_two_node_wall() {
        let g = Grid::build(1.0, 1.0, 1.0, (0.0, 0.0)).unwrap();
        let seg = g.receiver_segment(SegmentSpec::Wall(Wall::Left));
        assert_eq!(seg.nodes.len(), 2);
        assert_relative_eq!(seg.weights[0], 0.5);
        assert_relative_eq!(seg.weights[1], 0.5);
    }
}
