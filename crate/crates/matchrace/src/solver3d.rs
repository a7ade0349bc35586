//! Monotone upwind/centred discretization of the switching-game QVI and the
//! value-iteration fixed point on the 3-D grid.
//!
//! At every interior node the discrete operator is
//!
//!   T[v] = max{ v(q^, r) - c_A, min{ v(q, r^) + c_B, S[v] } }
//!
//! with the scheme value
//!
//!   S[v] = (alpha1 v(i_up,j,k) + alpha2 v(i,j_up,k)
//!           + (alpha4/2)(v(i,j,k-1) + v(i,j,k+1)) + ell) / Lambda,
//!
//! alpha1 = |f1|/dx1, alpha2 = |f2|/dx2, alpha4 = sigma^2/dtheta^2 and
//! Lambda = lambda + alpha1 + alpha2 + alpha3 + alpha4. The upwind neighbor
//! i_up = i + sgn(f1) leans into the drift, which keeps every coefficient
//! non-negative: T is monotone and a sup-norm contraction toward the unique
//! discrete fixed point. The wind angle itself is driftless (f3 = 0, so
//! alpha3 = 0 and k_up = k); its centred second difference carries the
//! diffusion.

use crate::config::GameConfig;
use crate::error::{Error, Result};
use crate::field::{SweepMode, SwitchingMaps, ValueField};
use crate::grid::Grid3;
use crate::model::{boat_velocity, PlayerId, Tack};
use crate::qvi1d::BoundaryTable;

use rayon::prelude::*;
use std::time::{Duration, Instant};

/// Options of one `value_iteration` run.
#[derive(Debug, Clone)]
pub struct SolverOptions {
    pub mode: SweepMode,
    /// Sweep cap; defaults to 100 * n_cells.
    pub max_iters: Option<usize>,
    /// Resolution of the 1-D far-field solves behind the boundary table.
    pub m_cells: usize,
    /// Worker threads for Jacobi sweeps; None uses the global pool.
    /// Gauss-Seidel is single-threaded by contract.
    pub threads: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            mode: SweepMode::GaussSeidel,
            max_iters: None,
            m_cells: 2000,
            threads: None,
        }
    }
}

/// Convergence record of one solve.
#[derive(Debug, Clone)]
pub struct SolveReport {
    pub iterations: usize,
    /// Sup-norm of the final sweep's update.
    pub residual: f64,
    pub converged: bool,
    pub wall_time: Duration,
    /// Residual after each sweep, first sweep onward.
    pub residual_history: Vec<f64>,
    /// Sup-norm of the iterate after each sweep.
    pub supnorm_history: Vec<f64>,
}

/// Per-node, per-mode-pair scheme coefficients, precomputed once per solve.
///
/// Soa layout indexed by `pair * node_count + flat(i, j, k)` with
/// pair = q.index()*2 + r.index().
#[derive(Debug, Clone)]
pub struct SchemeCoefficients {
    pub grid: Grid3,
    pub lambda: f64,
    /// sigma^2 / dtheta^2, shared by every node.
    pub alpha4: f64,
    a1: Vec<f64>,
    a2: Vec<f64>,
    ell: Vec<f64>,
    lam_tot: Vec<f64>,
    sg1: Vec<i8>,
    sg2: Vec<i8>,
}

/// Coefficients of a single node, for inspection and tests.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeScheme {
    pub alpha1: f64,
    pub alpha2: f64,
    /// |f3|/dtheta, identically zero: the wind angle has no drift.
    pub alpha3: f64,
    pub alpha4: f64,
    /// lambda + alpha1 + alpha2 + alpha3 + alpha4 >= lambda > 0.
    pub lambda_total: f64,
    pub ell: f64,
    pub i_up: usize,
    pub j_up: usize,
    /// Equals k: sgn(f3) = sgn(0) = 0.
    pub k_up: usize,
}

#[inline]
fn sgn(f: f64) -> i8 {
    if f > 0.0 {
        1
    } else if f < 0.0 {
        -1
    } else {
        0
    }
}

/// Drift-dependent coefficients at one node. Shared by the precompute pass
/// and the public single-node entry points so both produce identical bits.
#[inline]
fn node_coefficients(
    cfg: &GameConfig,
    grid: &Grid3,
    x: [f64; 2],
    theta: f64,
    q: Tack,
    r: Tack,
    alpha4: f64,
) -> (f64, f64, f64, f64, i8, i8) {
    let fa = boat_velocity(PlayerId::A, x, theta, q, cfg);
    let fb = boat_velocity(PlayerId::B, x, theta, r, cfg);
    let f1 = fa[0] - fb[0];
    let f2 = fa[1] - fb[1];
    let ell = f2;
    let a1 = f1.abs() / grid.dx1;
    let a2 = f2.abs() / grid.dx2;
    let lam_tot = cfg.lambda + a1 + a2 + alpha4;
    (a1, a2, ell, lam_tot, sgn(f1), sgn(f2))
}

/// The scheme average at one interior node of one mode pair's value block.
#[inline(always)]
#[allow(clippy::too_many_arguments)]
fn scheme_value(
    pair_values: &[f64],
    m: usize,
    i: usize,
    j: usize,
    k: usize,
    sg1: i8,
    sg2: i8,
    a1: f64,
    a2: f64,
    half_a4: f64,
    ell: f64,
    lam_tot: f64,
) -> f64 {
    let i_up = (i as isize + sg1 as isize) as usize;
    let j_up = (j as isize + sg2 as isize) as usize;
    let centre = (i * m + j) * m + k;
    let v_up1 = pair_values[(i_up * m + j) * m + k];
    let v_up2 = pair_values[(i * m + j_up) * m + k];
    let v_km = pair_values[centre - 1];
    let v_kp = pair_values[centre + 1];
    (a1 * v_up1 + a2 * v_up2 + half_a4 * (v_km + v_kp) + ell) / lam_tot
}

impl SchemeCoefficients {
    pub fn new(cfg: &GameConfig) -> Self {
        let grid = Grid3::from_config(cfg);
        let m = grid.n_nodes();
        let nodes = grid.node_count();
        let alpha4 = cfg.sigma * cfg.sigma / (grid.dtheta * grid.dtheta);

        let mut a1 = vec![0.0; 4 * nodes];
        let mut a2 = vec![0.0; 4 * nodes];
        let mut ell = vec![0.0; 4 * nodes];
        let mut lam_tot = vec![0.0; 4 * nodes];
        let mut sg1 = vec![0i8; 4 * nodes];
        let mut sg2 = vec![0i8; 4 * nodes];

        for q in Tack::BOTH {
            for r in Tack::BOTH {
                let base = (q.index() * 2 + r.index()) * nodes;
                for i in 0..m {
                    let x1 = grid.node_x1(i);
                    for j in 0..m {
                        let x2 = grid.node_x2(j);
                        for k in 0..m {
                            let theta = grid.node_theta(k);
                            let idx = base + grid.flat(i, j, k);
                            let (c_a1, c_a2, c_ell, c_lam, s1, s2) =
                                node_coefficients(cfg, &grid, [x1, x2], theta, q, r, alpha4);
                            a1[idx] = c_a1;
                            a2[idx] = c_a2;
                            ell[idx] = c_ell;
                            lam_tot[idx] = c_lam;
                            sg1[idx] = s1;
                            sg2[idx] = s2;
                        }
                    }
                }
            }
        }
        SchemeCoefficients {
            grid,
            lambda: cfg.lambda,
            alpha4,
            a1,
            a2,
            ell,
            lam_tot,
            sg1,
            sg2,
        }
    }

    /// Coefficients of one node, for inspection.
    pub fn node(&self, i: usize, j: usize, k: usize, q: Tack, r: Tack) -> NodeScheme {
        let idx = (q.index() * 2 + r.index()) * self.grid.node_count() + self.grid.flat(i, j, k);
        NodeScheme {
            alpha1: self.a1[idx],
            alpha2: self.a2[idx],
            alpha3: 0.0,
            alpha4: self.alpha4,
            lambda_total: self.lam_tot[idx],
            ell: self.ell[idx],
            i_up: (i as isize + self.sg1[idx] as isize) as usize,
            j_up: (j as isize + self.sg2[idx] as isize) as usize,
            k_up: k,
        }
    }
}

/// Check that a node is strictly interior, panicking otherwise: the scheme
/// is defined only where all neighbors exist.
fn assert_interior(grid: &Grid3, i: usize, j: usize, k: usize) {
    assert!(
        grid.is_interior(i, j, k),
        "scheme requires an interior node; got ({i}, {j}, {k}) on an n_cells={} grid",
        grid.n_cells
    );
}

/// The scheme average S[v] at one interior node, recomputing the node's
/// coefficients from the configuration.
pub fn scheme_update(
    v: &ValueField,
    i: usize,
    j: usize,
    k: usize,
    q: Tack,
    r: Tack,
    cfg: &GameConfig,
) -> f64 {
    let grid = &v.grid;
    assert_interior(grid, i, j, k);
    let alpha4 = cfg.sigma * cfg.sigma / (grid.dtheta * grid.dtheta);
    let x = [grid.node_x1(i), grid.node_x2(j)];
    let (a1, a2, ell, lam_tot, s1, s2) =
        node_coefficients(cfg, grid, x, grid.node_theta(k), q, r, alpha4);
    let nodes = grid.node_count();
    let base = v.pair_offset(q, r);
    scheme_value(
        &v.raw()[base..base + nodes],
        grid.n_nodes(),
        i,
        j,
        k,
        s1,
        s2,
        a1,
        a2,
        0.5 * alpha4,
        ell,
        lam_tot,
    )
}

/// The full fixed-point operator at one interior node:
/// max{A's switch branch, min{B's switch branch, S[v]}}.
pub fn operator_t(
    v: &ValueField,
    i: usize,
    j: usize,
    k: usize,
    q: Tack,
    r: Tack,
    cfg: &GameConfig,
) -> f64 {
    let s = scheme_update(v, i, j, k, q, r, cfg);
    let switch_a = v.get(i, j, k, q.other(), r) - cfg.c_a;
    let switch_b = v.get(i, j, k, q, r.other()) + cfg.c_b;
    switch_a.max(switch_b.min(s))
}

/// One in-place Gauss-Seidel sweep in lexicographic (q, r, i, j, k) order.
/// Returns the sup-norm of the updates.
fn gauss_seidel_sweep(values: &mut [f64], co: &SchemeCoefficients, c_a: f64, c_b: f64) -> f64 {
    let m = co.grid.n_nodes();
    let n = co.grid.n_cells;
    let nodes = co.grid.node_count();
    let half_a4 = 0.5 * co.alpha4;
    let mut residual = 0.0_f64;
    for pair in 0..4 {
        let base = pair * nodes;
        let base_qo = (pair ^ 2) * nodes; // q flipped
        let base_ro = (pair ^ 1) * nodes; // r flipped
        for i in 1..n {
            for j in 1..n {
                let row = (i * m + j) * m;
                for k in 1..n {
                    let node = row + k;
                    let idx = base + node;
                    let s = scheme_value(
                        &values[base..base + nodes],
                        m,
                        i,
                        j,
                        k,
                        co.sg1[idx],
                        co.sg2[idx],
                        co.a1[idx],
                        co.a2[idx],
                        half_a4,
                        co.ell[idx],
                        co.lam_tot[idx],
                    );
                    let switch_a = values[base_qo + node] - c_a;
                    let switch_b = values[base_ro + node] + c_b;
                    let new = switch_a.max(switch_b.min(s));
                    let delta = (new - values[idx]).abs();
                    if delta > residual {
                        residual = delta;
                    }
                    values[idx] = new;
                }
            }
        }
    }
    residual
}

/// One Jacobi sweep: `new` is written from `old` only. Interior planes of
/// each mode pair are independent, so they run in parallel; every output
/// element is a pure function of `old`, which makes the result identical
/// for any thread count.
fn jacobi_sweep(old: &[f64], new: &mut [f64], co: &SchemeCoefficients, c_a: f64, c_b: f64) -> f64 {
    let m = co.grid.n_nodes();
    let n = co.grid.n_cells;
    let nodes = co.grid.node_count();
    let half_a4 = 0.5 * co.alpha4;
    let plane = m * m;
    let mut residual = 0.0_f64;
    for pair in 0..4 {
        let base = pair * nodes;
        let base_qo = (pair ^ 2) * nodes;
        let base_ro = (pair ^ 1) * nodes;
        let old_pair = &old[base..base + nodes];
        let pair_res = new[base..base + nodes]
            .par_chunks_exact_mut(plane)
            .enumerate()
            .map(|(i, out_plane)| {
                if i == 0 || i == n {
                    return 0.0;
                }
                let mut plane_res = 0.0_f64;
                for j in 1..n {
                    let row = j * m;
                    for k in 1..n {
                        let node = (i * m + j) * m + k;
                        let s = scheme_value(
                            old_pair,
                            m,
                            i,
                            j,
                            k,
                            co.sg1[base + node],
                            co.sg2[base + node],
                            co.a1[base + node],
                            co.a2[base + node],
                            half_a4,
                            co.ell[base + node],
                            co.lam_tot[base + node],
                        );
                        let switch_a = old[base_qo + node] - c_a;
                        let switch_b = old[base_ro + node] + c_b;
                        let new_value = switch_a.max(switch_b.min(s));
                        let delta = (new_value - old[base + node]).abs();
                        if delta > plane_res {
                            plane_res = delta;
                        }
                        out_plane[row + k] = new_value;
                    }
                }
                plane_res
            })
            .reduce(|| 0.0, f64::max);
        residual = residual.max(pair_res);
    }
    residual
}

/// Iterate T to its fixed point.
///
/// The boundary table supplies all six face values (spatial faces by the
/// far-field identity; the theta faces use the same decoupled values, which
/// is consistent with the clamped wind excursions in simulation) and the
/// default interior initial guess. Faces are held fixed throughout. On cap
/// exhaustion the field is still returned with `converged = false`.
pub fn value_iteration(
    cfg: &GameConfig,
    boundary: &BoundaryTable,
    initial: Option<ValueField>,
    opts: &SolverOptions,
) -> Result<(ValueField, SwitchingMaps, SolveReport)> {
    cfg.validate()?;
    let grid = Grid3::from_config(cfg);
    if boundary.n_nodes != grid.n_nodes() {
        return Err(Error::InvalidConfig(format!(
            "boundary table has {} theta nodes, grid needs {}",
            boundary.n_nodes,
            grid.n_nodes()
        )));
    }
    let mut v = match initial {
        Some(field) => {
            if field.grid != grid {
                return Err(Error::InvalidConfig(
                    "initial field grid does not match the configuration".into(),
                ));
            }
            field
        }
        None => ValueField::from_boundary(grid.clone(), boundary),
    };

    let start = Instant::now();
    let co = SchemeCoefficients::new(cfg);
    let cap = opts.max_iters.unwrap_or(100 * cfg.n_cells).max(1);
    let mut residual_history = Vec::new();
    let mut supnorm_history = Vec::new();
    let mut converged = false;
    let mut residual = f64::INFINITY;

    match opts.mode {
        SweepMode::GaussSeidel => {
            for _ in 0..cap {
                residual = gauss_seidel_sweep(v.raw_mut(), &co, cfg.c_a, cfg.c_b);
                residual_history.push(residual);
                supnorm_history.push(v.sup_norm());
                if residual < cfg.tol {
                    converged = true;
                    break;
                }
            }
        }
        SweepMode::Jacobi => {
            let pool = match opts.threads {
                Some(t) => Some(
                    rayon::ThreadPoolBuilder::new()
                        .num_threads(t.max(1))
                        .build()
                        .map_err(|e| Error::InvalidConfig(format!("thread pool: {e}")))?,
                ),
                None => None,
            };
            let run_sweep = |old: &ValueField, new: &mut ValueField| match &pool {
                Some(p) => {
                    p.install(|| jacobi_sweep(old.raw(), new.raw_mut(), &co, cfg.c_a, cfg.c_b))
                }
                None => jacobi_sweep(old.raw(), new.raw_mut(), &co, cfg.c_a, cfg.c_b),
            };
            // The spare buffer starts as a copy so its faces are already right.
            let mut spare = v.clone();
            for _ in 0..cap {
                residual = run_sweep(&v, &mut spare);
                std::mem::swap(&mut v, &mut spare);
                residual_history.push(residual);
                supnorm_history.push(v.sup_norm());
                if residual < cfg.tol {
                    converged = true;
                    break;
                }
            }
        }
    }

    let maps = crate::strategy::extract_switching_maps(&v, cfg);
    let report = SolveReport {
        iterations: residual_history.len(),
        residual,
        converged,
        wall_time: start.elapsed(),
        residual_history,
        supnorm_history,
    };
    Ok((v, maps, report))
}
