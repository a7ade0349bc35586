use crate::error::{Error, Result};
use sha2::{Digest, Sha256};

/// Physical and numerical parameters of the match-race game.
///
/// Units: lengths in units of 1000 m, times in units of 10 s, angles in
/// radians. Speeds are therefore in (1000 m)/(10 s) = 100 m/s units; the
/// benchmark boat speed 0.05 corresponds to 5 m/s.
#[derive(Debug, Clone, PartialEq)]
pub struct GameConfig {
    /// Half-width of the relative-position box along x1.
    pub b1: f64,
    /// Half-width of the relative-position box along x2 (the windward axis).
    pub b2: f64,
    /// Half-width of the wind-angle interval.
    pub b3: f64,
    /// Cells per grid dimension; nodes per dimension = n_cells + 1.
    pub n_cells: usize,
    /// Maximum boat speed of player A.
    pub s_bar_a: f64,
    /// Maximum boat speed of player B.
    pub s_bar_b: f64,
    /// Wind-shadow strength (dimensionless).
    pub s0: f64,
    /// Wind-shadow spatial decay (1/length^2).
    pub s1: f64,
    /// Port-tack penalty amplitude in [0, 1]; 0 disables the penalty.
    pub nu1: f64,
    /// Port-tack penalty spatial scale (length^2).
    pub nu2: f64,
    /// Switching cost paid by player A; strictly positive.
    pub c_a: f64,
    /// Switching cost paid by player B; strictly positive.
    pub c_b: f64,
    /// Efficient sailing angle away from the wind axis.
    pub a_star: f64,
    /// Wind angle standard deviation (radians per sqrt time-unit).
    pub sigma: f64,
    /// Discount rate (1/time-unit).
    pub lambda: f64,
    /// Fixed-point stopping tolerance (sup-norm of one sweep's update).
    pub tol: f64,
    /// Simulation time step.
    pub dt: f64,
    /// Default RNG seed for simulations.
    pub seed: u64,
}

impl GameConfig {
    /// The symmetric benchmark configuration: box half-widths 1 x 1 x pi/4,
    /// equal boats with s_bar = 0.05, shadow constants s0 = 20, s1 = 300,
    /// switching costs 0.02 for both players, sigma = 0.03, lambda = 0.1.
    pub fn symmetric_benchmark(n_cells: usize) -> Self {
        GameConfig {
            b1: 1.0,
            b2: 1.0,
            b3: std::f64::consts::FRAC_PI_4,
            n_cells,
            s_bar_a: 0.05,
            s_bar_b: 0.05,
            s0: 20.0,
            s1: 300.0,
            nu1: 0.0,
            nu2: 1.0,
            c_a: 0.02,
            c_b: 0.02,
            a_star: std::f64::consts::FRAC_PI_4,
            sigma: 0.03,
            lambda: 0.1,
            tol: 1e-5,
            dt: 0.2,
            seed: 0,
        }
    }

    /// The asymmetric benchmark: identical to [`symmetric_benchmark`] except
    /// player B pays a doubled switching cost c_b = 0.04.
    ///
    /// [`symmetric_benchmark`]: GameConfig::symmetric_benchmark
    pub fn asymmetric_benchmark(n_cells: usize) -> Self {
        GameConfig {
            c_b: 0.04,
            ..Self::symmetric_benchmark(n_cells)
        }
    }

    /// Check every field invariant; returns the first violation found.
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("b1", self.b1),
            ("b2", self.b2),
            ("b3", self.b3),
            ("sigma", self.sigma),
            ("lambda", self.lambda),
            ("tol", self.tol),
            ("dt", self.dt),
            ("c_a", self.c_a),
            ("c_b", self.c_b),
            ("nu2", self.nu2),
        ];
        for (name, value) in positive {
            if value <= 0.0 || !value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be positive and finite, got {value}"
                )));
            }
        }
        let non_negative = [
            ("s_bar_a", self.s_bar_a),
            ("s_bar_b", self.s_bar_b),
            ("s0", self.s0),
            ("s1", self.s1),
        ];
        for (name, value) in non_negative {
            if value < 0.0 || !value.is_finite() {
                return Err(Error::InvalidConfig(format!(
                    "{name} must be non-negative and finite, got {value}"
                )));
            }
        }
        if self.n_cells < 2 {
            return Err(Error::InvalidConfig(format!(
                "n_cells must be at least 2, got {}",
                self.n_cells
            )));
        }
        if !(self.a_star > 0.0 && self.a_star < std::f64::consts::FRAC_PI_2) {
            return Err(Error::InvalidConfig(format!(
                "a_star must lie in (0, pi/2), got {}",
                self.a_star
            )));
        }
        // The mode-2 speed factor (1 - nu1 e^{-|x|^2/nu2}) must stay in [0, 1]
        // or speeds would leave [0, s_bar].
        if !(0.0..=1.0).contains(&self.nu1) || !self.nu1.is_finite() {
            return Err(Error::InvalidConfig(format!(
                "nu1 must lie in [0, 1], got {}",
                self.nu1
            )));
        }
        // The far-field boundary table is built on the circle [-pi, pi]; the
        // wind box must fit inside it.
        if self.b3 > std::f64::consts::PI {
            return Err(Error::InvalidConfig(format!(
                "b3 must not exceed pi, got {}",
                self.b3
            )));
        }
        Ok(())
    }

    /// True when the two players are interchangeable: equal speeds, equal
    /// switching costs, and no mode penalty.
    pub fn is_symmetric(&self) -> bool {
        self.s_bar_a == self.s_bar_b && self.c_a == self.c_b && self.nu1 == 0.0
    }

    /// Upper bound on the running cost magnitude: the relative vertical speed
    /// can never exceed the sum of the two top speeds.
    pub fn ell_max(&self) -> f64 {
        self.s_bar_a + self.s_bar_b
    }

    /// A-priori sup-norm bound on any discounted value function of this game:
    /// ell_max/lambda plus one switching cost for each player.
    pub fn value_bound(&self) -> f64 {
        self.ell_max() / self.lambda + self.c_a + self.c_b
    }

    /// SHA-256 over every parameter the solved field depends on (game
    /// constants, grid geometry, tolerance, and the 1-D boundary resolution
    /// `m_cells`). Simulation-only fields (dt, seed) are excluded so a field
    /// artifact stays valid across simulation settings.
    pub fn param_hash(&self, m_cells: usize) -> [u8; 32] {
        let mut hasher = Sha256::new();
        let mut feed = |name: &str, value: f64| {
            hasher.update(name.as_bytes());
            hasher.update(b"=");
            hasher.update(value.to_le_bytes());
            hasher.update(b";");
        };
        feed("b1", self.b1);
        feed("b2", self.b2);
        feed("b3", self.b3);
        feed("s_bar_a", self.s_bar_a);
        feed("s_bar_b", self.s_bar_b);
        feed("s0", self.s0);
        feed("s1", self.s1);
        feed("nu1", self.nu1);
        feed("nu2", self.nu2);
        feed("c_a", self.c_a);
        feed("c_b", self.c_b);
        feed("a_star", self.a_star);
        feed("sigma", self.sigma);
        feed("lambda", self.lambda);
        feed("tol", self.tol);
        hasher.update(b"n_cells=");
        hasher.update((self.n_cells as u64).to_le_bytes());
        hasher.update(b";m_cells=");
        hasher.update((m_cells as u64).to_le_bytes());
        hasher.update(b";");
        hasher.finalize().into()
    }

    /// Hex rendering of [`param_hash`], as embedded in text artifacts.
    ///
    /// [`param_hash`]: GameConfig::param_hash
    pub fn param_hash_hex(&self, m_cells: usize) -> String {
        let hash = self.param_hash(m_cells);
        let mut out = String::with_capacity(64);
        for byte in hash {
            out.push_str(&format!("{byte:02x}"));
        }
        out
    }
}
