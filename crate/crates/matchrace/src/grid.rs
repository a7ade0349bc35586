use crate::config::GameConfig;

/// Uniform node-centred grid on the box [-b1, b1] x [-b2, b2] x [-b3, b3].
///
/// Each axis carries `n_cells + 1` nodes; node 0 sits exactly on the lower
/// face and node `n_cells` exactly on the upper face.
#[derive(Debug, Clone, PartialEq)]
pub struct Grid3 {
    pub b1: f64,
    pub b2: f64,
    pub b3: f64,
    pub n_cells: usize,
    pub dx1: f64,
    pub dx2: f64,
    pub dtheta: f64,
}

impl Grid3 {
    pub fn new(b1: f64, b2: f64, b3: f64, n_cells: usize) -> Self {
        let n = n_cells as f64;
        Grid3 {
            b1,
            b2,
            b3,
            n_cells,
            dx1: 2.0 * b1 / n,
            dx2: 2.0 * b2 / n,
            dtheta: 2.0 * b3 / n,
        }
    }

    pub fn from_config(cfg: &GameConfig) -> Self {
        Self::new(cfg.b1, cfg.b2, cfg.b3, cfg.n_cells)
    }

    /// Nodes per dimension.
    #[inline]
    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }

    /// Axis coordinate of node `i` on [-b, b].
    ///
    /// Computed as (i/n)*2b - b so that the endpoints are exact: i = 0 gives
    /// -b and i = n_cells gives +b at full precision.
    #[inline]
    fn axis_node(b: f64, i: usize, n_cells: usize) -> f64 {
        (i as f64 / n_cells as f64) * (2.0 * b) - b
    }

    #[inline]
    pub fn node_x1(&self, i: usize) -> f64 {
        Self::axis_node(self.b1, i, self.n_cells)
    }

    #[inline]
    pub fn node_x2(&self, j: usize) -> f64 {
        Self::axis_node(self.b2, j, self.n_cells)
    }

    #[inline]
    pub fn node_theta(&self, k: usize) -> f64 {
        Self::axis_node(self.b3, k, self.n_cells)
    }

    /// Flat index of node (i, j, k) in row-major (i, j, k) order.
    #[inline]
    pub fn flat(&self, i: usize, j: usize, k: usize) -> usize {
        (i * self.n_nodes() + j) * self.n_nodes() + k
    }

    /// Total number of nodes.
    #[inline]
    pub fn node_count(&self) -> usize {
        let m = self.n_nodes();
        m * m * m
    }

    /// True if (i, j, k) touches no face of the box.
    #[inline]
    pub fn is_interior(&self, i: usize, j: usize, k: usize) -> bool {
        let n = self.n_cells;
        (1..n).contains(&i) && (1..n).contains(&j) && (1..n).contains(&k)
    }

    /// Upper-integer-part projection of a coordinate onto its axis index:
    /// i = ceil((x + b)/dx), clamped to [0, n_cells]. The lower face -b maps
    /// exactly to index 0 (ceil(0) = 0); coordinates outside the box clamp to
    /// the nearest face.
    #[inline]
    fn axis_project(x: f64, b: f64, dx: f64, n_cells: usize) -> usize {
        let raw = ((x + b) / dx).ceil();
        if raw <= 0.0 {
            0
        } else if raw >= n_cells as f64 {
            n_cells
        } else {
            raw as usize
        }
    }

    #[inline]
    pub fn project_x1(&self, x: f64) -> usize {
        Self::axis_project(x, self.b1, self.dx1, self.n_cells)
    }

    #[inline]
    pub fn project_x2(&self, x: f64) -> usize {
        Self::axis_project(x, self.b2, self.dx2, self.n_cells)
    }

    #[inline]
    pub fn project_theta(&self, theta: f64) -> usize {
        Self::axis_project(theta, self.b3, self.dtheta, self.n_cells)
    }
}
