//! Single-player far-field switching problem on the wind circle.
//!
//! When the boats are far apart the interaction terms vanish and each
//! player's value decouples into a one-dimensional optimal-switching problem
//! in the wind angle alone. This module solves that problem numerically on
//! the periodic grid over [-pi, pi], evaluates the closed-form double-obstacle
//! solution for the mode difference, and assembles the boundary table the 3-D
//! solver holds fixed on the box faces.

use crate::config::GameConfig;
use crate::error::{Error, Result};
use crate::grid::Grid3;
use crate::model::{PlayerId, Tack};

use std::f64::consts::{FRAC_PI_2, PI};

/// Converged single-player value function on the periodic wind grid.
///
/// `values[p][k]` is the value in mode p+1 at node theta_k = -pi + k*dtheta,
/// k = 0..m_cells-1 (node m_cells coincides with node 0).
#[derive(Debug, Clone)]
pub struct Value1D {
    pub m_cells: usize,
    pub dtheta: f64,
    values: [Vec<f64>; 2],
}

impl Value1D {
    #[inline]
    pub fn node_theta(&self, k: usize) -> f64 {
        -PI + self.dtheta * k as f64
    }

    #[inline]
    pub fn value(&self, mode: Tack, k: usize) -> f64 {
        self.values[mode.index()][k % self.m_cells]
    }

    /// Mode-value difference v(2, k) - v(1, k).
    #[inline]
    pub fn diff(&self, k: usize) -> f64 {
        self.value(Tack::Starboard, k) - self.value(Tack::Port, k)
    }

    /// Linear interpolation at an arbitrary angle, periodic over [-pi, pi].
    pub fn interpolate(&self, mode: Tack, theta: f64) -> f64 {
        let m = self.m_cells;
        let pos = (theta + PI) / self.dtheta;
        let base = pos.floor();
        let frac = pos - base;
        // rem_euclid maps any finite angle into the node range.
        let k0 = (base as i64).rem_euclid(m as i64) as usize;
        let k1 = (k0 + 1) % m;
        self.values[mode.index()][k0] * (1.0 - frac) + self.values[mode.index()][k1] * frac
    }

    /// True where the optimal action in `mode` is to switch to the other
    /// mode: the value touches the switching obstacle within `eps`.
    #[inline]
    pub fn wants_switch(&self, mode: Tack, k: usize, switch_cost: f64, eps: f64) -> bool {
        self.value(mode, k) <= self.value(mode.other(), k) - switch_cost + eps
    }
}

/// Closed-form solution of the symmetric double-obstacle problem for the
/// mode-value difference v(2, theta) - v(1, theta).
///
/// Inside the contact-free region the difference solves
/// lambda w - (sigma^2/2) w'' = 2 s_bar sin(a*) sin(theta) and pastes C^1
/// onto the obstacles +-c_bar at +-theta*.
#[derive(Debug, Clone)]
pub struct ObstacleSolution {
    /// Homogeneous rate sqrt(2 lambda)/sigma.
    pub omega_star: f64,
    /// Particular amplitude 4 s_bar sin(a*)/(2 lambda + sigma^2); equals
    /// 2 sqrt(2) s_bar/(2 lambda + sigma^2) at the default a* = pi/4.
    pub big_omega_star: f64,
    /// Contact point in (0, pi/2).
    pub theta_star: f64,
    /// Obstacle level (the switching cost).
    pub c_bar: f64,
    /// Coefficient of sinh(omega* theta) in the interior branch.
    pub c2: f64,
}

impl ObstacleSolution {
    /// Evaluate the piecewise closed form: -c_bar below -theta*, the smooth
    /// interior branch 2 c2 sinh(omega* theta) + Omega* sin(theta) inside,
    /// +c_bar above theta*.
    pub fn eval(&self, theta: f64) -> f64 {
        if theta < -self.theta_star {
            -self.c_bar
        } else if theta > self.theta_star {
            self.c_bar
        } else {
            2.0 * self.c2 * (self.omega_star * theta).sinh() + self.big_omega_star * theta.sin()
        }
    }
}

/// Left side of the contact equation Omega* sin t - (Omega*/omega*) tanh(omega* t) cos t.
#[inline]
fn contact_lhs(omega: f64, big_omega: f64, t: f64) -> f64 {
    big_omega * t.sin() - (big_omega / omega) * (omega * t).tanh() * t.cos()
}

/// Contact point of the double-obstacle problem for one player's far-field
/// switching problem, from that player's top speed and switching cost.
///
/// Bisection on [0, pi/2] to absolute tolerance 1e-10; the left side is
/// strictly increasing there, so the root is unique when it exists.
pub fn theta_star_for(s_bar: f64, sigma: f64, lambda: f64, c_bar: f64, a_star: f64) -> Result<f64> {
    let omega = (2.0 * lambda).sqrt() / sigma;
    let big_omega = 4.0 * s_bar * a_star.sin() / (2.0 * lambda + sigma * sigma);
    let at_half_pi = contact_lhs(omega, big_omega, FRAC_PI_2);
    if at_half_pi.is_nan() || at_half_pi <= c_bar {
        return Err(Error::ObstacleNeverReached { at_half_pi, c_bar });
    }
    let (mut lo, mut hi) = (0.0_f64, FRAC_PI_2);
    while hi - lo > 1e-10 {
        let mid = 0.5 * (lo + hi);
        if contact_lhs(omega, big_omega, mid) - c_bar < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Contact point for the symmetric configuration (both players share s_bar
/// and c_bar, so there is a single threshold).
pub fn theta_star(cfg: &GameConfig) -> Result<f64> {
    theta_star_for(cfg.s_bar_a, cfg.sigma, cfg.lambda, cfg.c_a, cfg.a_star)
}

/// Closed-form double-obstacle solution for one player's parameters.
pub fn obstacle_solution_for(
    s_bar: f64,
    sigma: f64,
    lambda: f64,
    c_bar: f64,
    a_star: f64,
) -> Result<ObstacleSolution> {
    let omega_star = (2.0 * lambda).sqrt() / sigma;
    let big_omega_star = 4.0 * s_bar * a_star.sin() / (2.0 * lambda + sigma * sigma);
    let t_star = theta_star_for(s_bar, sigma, lambda, c_bar, a_star)?;
    // v*(0) = 0 forces C1 = -C2, i.e. an odd sinh profile; C1 smooth pasting
    // v*'(theta*) = 0 fixes the amplitude.
    let c2 = -big_omega_star * t_star.cos() / (2.0 * omega_star * (omega_star * t_star).cosh());
    Ok(ObstacleSolution {
        omega_star,
        big_omega_star,
        theta_star: t_star,
        c_bar,
        c2,
    })
}

/// Closed form for the symmetric configuration.
pub fn obstacle_solution(cfg: &GameConfig) -> Result<ObstacleSolution> {
    obstacle_solution_for(cfg.s_bar_a, cfg.sigma, cfg.lambda, cfg.c_a, cfg.a_star)
}

/// Far-field running reward of one mode: the windward speed
/// s_bar cos(heading) with heading = theta + a* on port, theta - a* on
/// starboard tack.
#[inline]
fn far_reward(s_bar: f64, a_star: f64, mode: Tack, theta: f64) -> f64 {
    s_bar * crate::model::heading(mode, theta, a_star).cos()
}

/// Solve the single-player switching problem for `player` on a periodic grid
/// of `m_cells` cells over [-pi, pi].
///
/// Gauss-Seidel sweeps (ascending k, mode inner) on the fixed-point form
/// v_p^k = max{v_{3-p}^k - c_P, S1[v]}. The sweep stops once the residual
/// drops below tol*(lambda)/(lambda + alpha): since S1 contracts with factor
/// gamma = alpha/(lambda + alpha), that leaves the iterate within tol of the
/// exact discrete fixed point rather than merely updating by less than tol.
pub fn solve_1d(player: PlayerId, cfg: &GameConfig, m_cells: usize) -> Result<Value1D> {
    assert!(m_cells >= 8, "m_cells must be at least 8, got {m_cells}");
    cfg.validate()?;

    let s_bar = player.s_bar(cfg);
    let c_p = player.switch_cost(cfg);
    let dtheta = 2.0 * PI / m_cells as f64;
    let alpha = cfg.sigma * cfg.sigma / (dtheta * dtheta);
    let denom = cfg.lambda + alpha;
    let gamma = alpha / denom;
    let tol_eff = cfg.tol * (1.0 - gamma);

    let reward: [Vec<f64>; 2] = [
        (0..m_cells)
            .map(|k| far_reward(s_bar, cfg.a_star, Tack::Port, -PI + dtheta * k as f64))
            .collect(),
        (0..m_cells)
            .map(|k| far_reward(s_bar, cfg.a_star, Tack::Starboard, -PI + dtheta * k as f64))
            .collect(),
    ];

    let mut v: [Vec<f64>; 2] = [vec![0.0; m_cells], vec![0.0; m_cells]];
    let cap = 100 * m_cells.max(2000);
    for _sweep in 0..cap {
        let mut residual = 0.0_f64;
        for k in 0..m_cells {
            let km = (k + m_cells - 1) % m_cells;
            let kp = (k + 1) % m_cells;
            for p in 0..2 {
                let s1 = (0.5 * alpha * (v[p][km] + v[p][kp]) + reward[p][k]) / denom;
                let obstacle = v[1 - p][k] - c_p;
                let new = obstacle.max(s1);
                residual = residual.max((new - v[p][k]).abs());
                v[p][k] = new;
            }
        }
        if residual < tol_eff {
            return Ok(Value1D {
                m_cells,
                dtheta,
                values: v,
            });
        }
    }
    Err(Error::NoConvergence {
        iterations: cap,
        residual: f64::NAN,
        tol: cfg.tol,
    })
}

/// Far-field boundary values v^A(q, theta) - v^B(r, theta) sampled at the
/// 3-D grid's theta nodes.
///
/// The table is indexed by (q, r, k) and reused for all four mode pairs on
/// every box face as well as for the interior initial guess.
#[derive(Debug, Clone)]
pub struct BoundaryTable {
    pub n_nodes: usize,
    /// values[q.index()*2 + r.index()][k]
    values: [Vec<f64>; 4],
}

impl BoundaryTable {
    #[inline]
    pub fn get(&self, q: Tack, r: Tack, k: usize) -> f64 {
        self.values[q.index() * 2 + r.index()][k]
    }

    #[inline]
    pub fn mode_pair(&self, q: Tack, r: Tack) -> &[f64] {
        &self.values[q.index() * 2 + r.index()]
    }
}

/// Solve both players' far-field problems and evaluate the boundary table at
/// the 3-D grid's theta nodes by periodic linear interpolation.
///
/// In the far field the mode penalty decays to nothing, so the 1-D problems
/// depend only on (s_bar, c, sigma, lambda, a*); when both players share
/// those constants the second solve is skipped.
pub fn boundary_field(cfg: &GameConfig, grid: &Grid3, m_cells: usize) -> Result<BoundaryTable> {
    assert!(
        grid.b3 <= PI,
        "wind half-width {} exceeds the 1-D domain",
        grid.b3
    );
    let v_a = solve_1d(PlayerId::A, cfg, m_cells)?;
    let v_b = if cfg.s_bar_a == cfg.s_bar_b && cfg.c_a == cfg.c_b {
        None
    } else {
        Some(solve_1d(PlayerId::B, cfg, m_cells)?)
    };
    let v_b_ref = v_b.as_ref().unwrap_or(&v_a);

    let n_nodes = grid.n_nodes();
    let mut values: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n_nodes]);
    for q in Tack::BOTH {
        for r in Tack::BOTH {
            let slot = &mut values[q.index() * 2 + r.index()];
            for (k, value) in slot.iter_mut().enumerate() {
                let theta = grid.node_theta(k);
                *value = v_a.interpolate(q, theta) - v_b_ref.interpolate(r, theta);
            }
        }
    }
    Ok(BoundaryTable { n_nodes, values })
}
