use crate::config::GameConfig;

/// Discrete sailing mode of one boat. Port tack is mode 1, starboard tack
/// mode 2; the opposite mode is always `3 - q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tack {
    Port = 1,
    Starboard = 2,
}

impl Tack {
    /// The opposite tack (3 - q in the numeric encoding).
    #[inline]
    pub fn other(self) -> Tack {
        match self {
            Tack::Port => Tack::Starboard,
            Tack::Starboard => Tack::Port,
        }
    }

    /// Zero-based index, for array storage.
    #[inline]
    pub fn index(self) -> usize {
        match self {
            Tack::Port => 0,
            Tack::Starboard => 1,
        }
    }

    #[inline]
    pub fn from_index(idx: usize) -> Tack {
        match idx {
            0 => Tack::Port,
            1 => Tack::Starboard,
            other => panic!("tack index must be 0 or 1, got {other}"),
        }
    }

    /// Numeric mode label in {1, 2}.
    #[inline]
    pub fn number(self) -> u8 {
        self as u8
    }

    #[inline]
    pub fn from_number(n: u8) -> Option<Tack> {
        match n {
            1 => Some(Tack::Port),
            2 => Some(Tack::Starboard),
            _ => None,
        }
    }

    pub const BOTH: [Tack; 2] = [Tack::Port, Tack::Starboard];
}

impl std::fmt::Display for Tack {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.number())
    }
}

/// The two competitors. Player A maximizes the vertical relative lead
/// x2^A - x2^B; player B minimizes it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PlayerId {
    A,
    B,
}

impl PlayerId {
    #[inline]
    pub fn s_bar(self, cfg: &GameConfig) -> f64 {
        match self {
            PlayerId::A => cfg.s_bar_a,
            PlayerId::B => cfg.s_bar_b,
        }
    }

    /// Switching cost paid by this player.
    #[inline]
    pub fn switch_cost(self, cfg: &GameConfig) -> f64 {
        match self {
            PlayerId::A => cfg.c_a,
            PlayerId::B => cfg.c_b,
        }
    }
}

impl std::fmt::Display for PlayerId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PlayerId::A => write!(f, "A"),
            PlayerId::B => write!(f, "B"),
        }
    }
}

/// Heading of a boat on tack `mode` when the wind blows from angle `theta`:
/// theta + a_star on port tack, theta - a_star on starboard tack. On port
/// tack the wind comes over the port side, pushing the boat to the right of
/// the wind axis.
#[inline]
pub fn heading(mode: Tack, theta: f64, a_star: f64) -> f64 {
    match mode {
        Tack::Port => theta + a_star,
        Tack::Starboard => theta - a_star,
    }
}

/// Boat speed under the wind-shadow interaction.
///
/// `x` is the position of this boat relative to its opponent: the caller
/// passes x = x^A - x^B for player A and -(x^A - x^B) for player B. The
/// shadow factor 1 + min{s0 (x . w(theta)) e^{-s1 |x|^2}, 0}, with
/// w = (sin theta, cos theta) the downwind direction, slows a boat sitting
/// downwind of its opponent and does nothing upwind. On starboard tack the
/// speed is further scaled by (1 - nu1 e^{-|x|^2 / nu2}).
///
/// Result lies in [0, s_bar]: the parenthesis is floored at zero so shadowing
/// can stop a boat but never push it backwards.
#[inline]
pub fn speed(player: PlayerId, x: [f64; 2], theta: f64, own_mode: Tack, cfg: &GameConfig) -> f64 {
    debug_assert!(
        x[0].is_finite() && x[1].is_finite() && theta.is_finite(),
        "speed inputs must be finite"
    );
    let r2 = x[0] * x[0] + x[1] * x[1];
    let dot = x[0] * theta.sin() + x[1] * theta.cos();
    let shadow = 1.0 + (cfg.s0 * dot * (-cfg.s1 * r2).exp()).min(0.0);
    let s_bar_eff = match own_mode {
        Tack::Port => player.s_bar(cfg),
        Tack::Starboard => player.s_bar(cfg) * (1.0 - cfg.nu1 * (-r2 / cfg.nu2).exp()),
    };
    (s_bar_eff * shadow).max(0.0)
}

/// Velocity vector of one boat: its speed times the unit heading vector
/// (sin h, cos h).
///
/// `x` is always the relative position x^A - x^B; for player B the shadow is
/// evaluated at -x internally, while theta and the mode are B's own.
#[inline]
pub fn boat_velocity(
    player: PlayerId,
    x: [f64; 2],
    theta: f64,
    own_mode: Tack,
    cfg: &GameConfig,
) -> [f64; 2] {
    let x_rel = match player {
        PlayerId::A => x,
        PlayerId::B => [-x[0], -x[1]],
    };
    let s = speed(player, x_rel, theta, own_mode, cfg);
    let h = heading(own_mode, theta, cfg.a_star);
    [s * h.sin(), s * h.cos()]
}

/// Drift of the reduced state (x1, x2, theta): the difference of the two
/// boat velocities in the first two components; the wind angle carries no
/// drift, so the third component is identically zero.
#[inline]
pub fn coupled_drift(x: [f64; 2], theta: f64, q: Tack, r: Tack, cfg: &GameConfig) -> [f64; 3] {
    let fa = boat_velocity(PlayerId::A, x, theta, q, cfg);
    let fb = boat_velocity(PlayerId::B, x, theta, r, cfg);
    [fa[0] - fb[0], fa[1] - fb[1], 0.0]
}

/// Running reward rate: the vertical component of the relative velocity,
/// f2^A - f2^B. Player A accumulates lead at this rate.
#[inline]
pub fn running_cost(x: [f64; 2], theta: f64, q: Tack, r: Tack, cfg: &GameConfig) -> f64 {
    let fa = boat_velocity(PlayerId::A, x, theta, q, cfg);
    let fb = boat_velocity(PlayerId::B, x, theta, r, cfg);
    fa[1] - fb[1]
}
