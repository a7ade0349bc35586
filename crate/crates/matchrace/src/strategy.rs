//! Switching strategies, race simulation under Brownian wind, and trace
//! output.
//!
//! The solved value field encodes each player's optimal tack decision at
//! every node: A prefers switching wherever the value already sits on its
//! switch obstacle, and symmetrically for B. `extract_switching_maps` bakes
//! those decisions into byte maps; `simulate` rolls races forward under any
//! mix of strategies.

use crate::config::GameConfig;
use crate::error::{Error, Result};
use crate::field::{SwitchingMaps, ValueField};
use crate::grid::Grid3;
use crate::model::{boat_velocity, speed, PlayerId, Tack};
use crate::qvi1d::theta_star_for;
use crate::rng::{WindRng, NORMAL_TRANSFORM, RNG_ALGORITHM};

use std::io::{self, Write};
use std::path::Path;

/// Band half-width, in units of the solver tolerance, inside which a value
/// is considered to touch its switching obstacle.
pub const SWITCH_EPS_FACTOR: f64 = 10.0;

/// Read the optimal switching decisions off a solved value field.
///
/// At every node (faces included — the simulator projects outside states
/// onto them) and every mode pair, player A's map says to hold q unless
/// v(q, r) has dropped to v(q^, r) - c_A within eps = 10 tol, and player B's
/// map says to hold r unless v(q, r) has risen to v(q, r^) + c_B within eps.
pub fn extract_switching_maps(v: &ValueField, cfg: &GameConfig) -> SwitchingMaps {
    let grid = v.grid.clone();
    let nodes = grid.node_count();
    let eps = SWITCH_EPS_FACTOR * cfg.tol;
    let mut s_a = vec![0u8; 4 * nodes];
    let mut s_b = vec![0u8; 4 * nodes];
    for q in Tack::BOTH {
        for r in Tack::BOTH {
            let base = v.pair_offset(q, r);
            let cur = &v.raw()[base..base + nodes];
            let flip_q = &v.raw()[v.pair_offset(q.other(), r)..][..nodes];
            let flip_r = &v.raw()[v.pair_offset(q, r.other())..][..nodes];
            for n in 0..nodes {
                let a_switches = cur[n] <= flip_q[n] - cfg.c_a + eps;
                let b_switches = cur[n] >= flip_r[n] + cfg.c_b - eps;
                s_a[base + n] = if a_switches { q.other() } else { q }.number();
                s_b[base + n] = if b_switches { r.other() } else { r }.number();
            }
        }
    }
    SwitchingMaps::new(grid, s_a, s_b)
}

/// How a player picks its tack during simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    /// Follow the switching map extracted from the game value field.
    GameOptimal,
    /// Ignore the opponent: switch at the closed-form far-field thresholds
    /// +-theta* of this player's own speed and switching cost.
    SinglePlayerOptimal,
    /// Never switch.
    FixedMode,
}

impl Strategy {
    pub fn from_name(name: &str) -> Option<Strategy> {
        match name {
            "game-optimal" => Some(Strategy::GameOptimal),
            "single-player-optimal" => Some(Strategy::SinglePlayerOptimal),
            "fixed-mode" => Some(Strategy::FixedMode),
            _ => None,
        }
    }
}

impl std::fmt::Display for Strategy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            Strategy::GameOptimal => "game-optimal",
            Strategy::SinglePlayerOptimal => "single-player-optimal",
            Strategy::FixedMode => "fixed-mode",
        };
        write!(f, "{name}")
    }
}

/// Initial conditions and strategy choice of one simulated race.
#[derive(Debug, Clone)]
pub struct SimConfig {
    pub x_a0: [f64; 2],
    pub x_b0: [f64; 2],
    pub theta0: f64,
    pub q0: Tack,
    pub r0: Tack,
    pub horizon_steps: usize,
    pub seed: u64,
    pub strategy_a: Strategy,
    pub strategy_b: Strategy,
}

impl SimConfig {
    /// The benchmark start: boats abreast inside wind-shadow range (the
    /// shadow's spatial scale is 1/sqrt(s1) ~ 0.058), A on the left, calm
    /// wind angle, both on port tack, both playing the game-optimal strategy.
    pub fn benchmark() -> Self {
        SimConfig {
            x_a0: [-0.025, 0.0],
            x_b0: [0.025, 0.0],
            theta0: 0.0,
            q0: Tack::Port,
            r0: Tack::Port,
            horizon_steps: 5000,
            seed: 0,
            strategy_a: Strategy::GameOptimal,
            strategy_b: Strategy::GameOptimal,
        }
    }

    /// Check the start state against the solved box.
    pub fn validate(&self, cfg: &GameConfig) -> Result<()> {
        let rel = [self.x_a0[0] - self.x_b0[0], self.x_a0[1] - self.x_b0[1]];
        for (v, name) in [
            (self.x_a0[0], "x_a"),
            (self.x_a0[1], "x_a"),
            (self.x_b0[0], "x_b"),
            (self.x_b0[1], "x_b"),
            (self.theta0, "theta0"),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidConfig(format!("{name} must be finite")));
            }
        }
        if rel[0].abs() > cfg.b1 || rel[1].abs() > cfg.b2 {
            return Err(Error::InvalidConfig(format!(
                "relative start position ({}, {}) is outside the box [{}, {}] x [{}, {}]",
                rel[0], rel[1], -cfg.b1, cfg.b1, -cfg.b2, cfg.b2
            )));
        }
        if self.theta0.abs() > cfg.b3 {
            return Err(Error::InvalidConfig(format!(
                "theta0 = {} is outside [-{}, {}]",
                self.theta0, cfg.b3, cfg.b3
            )));
        }
        Ok(())
    }
}

/// One recorded simulation step.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub t: f64,
    pub x_a: [f64; 2],
    pub x_b: [f64; 2],
    pub theta: f64,
    pub q: Tack,
    pub r: Tack,
    pub speed_a: f64,
    pub speed_b: f64,
    pub switch_a: bool,
    pub switch_b: bool,
}

/// A complete simulated race.
#[derive(Debug, Clone, PartialEq)]
pub struct RaceTrace {
    pub dt: f64,
    pub seed: u64,
    /// horizon + 1 rows (t = 0 included); empty when the horizon is zero.
    pub steps: Vec<TraceStep>,
}

impl RaceTrace {
    /// A's lead over B at the finish: the windward-progress gap x2^A - x2^B.
    pub fn final_lead(&self) -> f64 {
        self.steps
            .last()
            .map(|s| s.x_a[1] - s.x_b[1])
            .unwrap_or(0.0)
    }
}

/// Per-player closed-form far-field thresholds, resolved once per run.
struct Thresholds {
    a: Option<f64>,
    b: Option<f64>,
}

fn hysteresis(mode: Tack, theta: f64, threshold: f64) -> Tack {
    match mode {
        Tack::Port if theta >= threshold => Tack::Starboard,
        Tack::Starboard if theta <= -threshold => Tack::Port,
        other => other,
    }
}

/// Roll one race forward with the Euler-Maruyama step.
///
/// Each step advances both boats with the velocities of the *current* state
/// and modes, then draws the wind increment (clamping the angle to the solved
/// band), and only then lets the players react: A retacks first from the map
/// at the projected new state, and B decides seeing A's new mode. Recorded
/// speeds are those of the new state under the new modes.
pub fn simulate(maps: &SwitchingMaps, sim: &SimConfig, cfg: &GameConfig) -> Result<RaceTrace> {
    cfg.validate()?;
    sim.validate(cfg)?;
    let grid = &maps.grid;
    if *grid != Grid3::from_config(cfg) {
        return Err(Error::InvalidConfig(
            "switching maps were extracted on a different grid".into(),
        ));
    }

    let thresholds = Thresholds {
        a: match sim.strategy_a {
            Strategy::SinglePlayerOptimal => Some(theta_star_for(
                cfg.s_bar_a,
                cfg.sigma,
                cfg.lambda,
                cfg.c_a,
                cfg.a_star,
            )?),
            _ => None,
        },
        b: match sim.strategy_b {
            Strategy::SinglePlayerOptimal => Some(theta_star_for(
                cfg.s_bar_b,
                cfg.sigma,
                cfg.lambda,
                cfg.c_b,
                cfg.a_star,
            )?),
            _ => None,
        },
    };

    let mut trace = RaceTrace {
        dt: cfg.dt,
        seed: sim.seed,
        steps: Vec::new(),
    };
    if sim.horizon_steps == 0 {
        return Ok(trace);
    }
    trace.steps.reserve(sim.horizon_steps + 1);

    let mut rng = WindRng::seed_from_u64(sim.seed);
    let noise_scale = cfg.sigma * cfg.dt.sqrt();
    let mut x_a = sim.x_a0;
    let mut x_b = sim.x_b0;
    let mut theta = sim.theta0;
    let mut q = sim.q0;
    let mut r = sim.r0;

    let record =
        |steps: &mut Vec<TraceStep>, t, x_a: [f64; 2], x_b: [f64; 2], theta, q, r, sa, sb| {
            let rel = [x_a[0] - x_b[0], x_a[1] - x_b[1]];
            steps.push(TraceStep {
                t,
                x_a,
                x_b,
                theta,
                q,
                r,
                speed_a: speed(PlayerId::A, rel, theta, q, cfg),
                speed_b: speed(PlayerId::B, [-rel[0], -rel[1]], theta, r, cfg),
                switch_a: sa,
                switch_b: sb,
            });
        };
    record(&mut trace.steps, 0.0, x_a, x_b, theta, q, r, false, false);

    for n in 1..=sim.horizon_steps {
        let rel = [x_a[0] - x_b[0], x_a[1] - x_b[1]];
        let va = boat_velocity(PlayerId::A, rel, theta, q, cfg);
        let vb = boat_velocity(PlayerId::B, rel, theta, r, cfg);
        x_a[0] += cfg.dt * va[0];
        x_a[1] += cfg.dt * va[1];
        x_b[0] += cfg.dt * vb[0];
        x_b[1] += cfg.dt * vb[1];
        let w = rng.standard_normal();
        theta = (theta + noise_scale * w).clamp(-cfg.b3, cfg.b3);
        if !(x_a[0].is_finite()
            && x_a[1].is_finite()
            && x_b[0].is_finite()
            && x_b[1].is_finite()
            && theta.is_finite())
        {
            return Err(Error::NonFiniteState { step: n });
        }

        let rel_new = [x_a[0] - x_b[0], x_a[1] - x_b[1]];
        let (i, j, k) = (
            grid.project_x1(rel_new[0]),
            grid.project_x2(rel_new[1]),
            grid.project_theta(theta),
        );
        let q_prev = q;
        let r_prev = r;
        q = match sim.strategy_a {
            Strategy::GameOptimal => maps.a_target(i, j, k, q_prev, r_prev),
            Strategy::SinglePlayerOptimal => {
                hysteresis(q_prev, theta, thresholds.a.expect("threshold resolved"))
            }
            Strategy::FixedMode => q_prev,
        };
        r = match sim.strategy_b {
            // B reacts to the tack A has just chosen.
            Strategy::GameOptimal => maps.b_target(i, j, k, q, r_prev),
            Strategy::SinglePlayerOptimal => {
                hysteresis(r_prev, theta, thresholds.b.expect("threshold resolved"))
            }
            Strategy::FixedMode => r_prev,
        };
        record(
            &mut trace.steps,
            n as f64 * cfg.dt,
            x_a,
            x_b,
            theta,
            q,
            r,
            q != q_prev,
            r != r_prev,
        );
    }
    Ok(trace)
}

/// Summary of one race.
#[derive(Debug, Clone, PartialEq)]
pub struct RaceSummary {
    pub seed: u64,
    pub final_lead: f64,
    pub switches_a: usize,
    pub switches_b: usize,
    pub mean_speed_a: f64,
    pub mean_speed_b: f64,
    /// Fraction of recorded rows whose speed sat strictly below the top
    /// speed, i.e. the boat was feeling the opponent's wind shadow.
    pub frac_slowed_a: f64,
    pub frac_slowed_b: f64,
}

/// Aggregate over a batch of races.
#[derive(Debug, Clone, PartialEq)]
pub struct RaceStatistics {
    pub races: usize,
    pub wins_a: usize,
    pub wins_b: usize,
    pub draws: usize,
    pub mean_final_lead: f64,
    pub mean_switches_a: f64,
    pub mean_switches_b: f64,
    pub per_race: Vec<RaceSummary>,
}

fn summarize(trace: &RaceTrace, cfg: &GameConfig) -> RaceSummary {
    let n = trace.steps.len();
    let mut sum_a = 0.0;
    let mut sum_b = 0.0;
    let mut slow_a = 0usize;
    let mut slow_b = 0usize;
    let mut switches_a = 0usize;
    let mut switches_b = 0usize;
    for s in &trace.steps {
        sum_a += s.speed_a;
        sum_b += s.speed_b;
        if s.speed_a < cfg.s_bar_a {
            slow_a += 1;
        }
        if s.speed_b < cfg.s_bar_b {
            slow_b += 1;
        }
        switches_a += s.switch_a as usize;
        switches_b += s.switch_b as usize;
    }
    let denom = if n == 0 { 1.0 } else { n as f64 };
    RaceSummary {
        seed: trace.seed,
        final_lead: trace.final_lead(),
        switches_a,
        switches_b,
        mean_speed_a: sum_a / denom,
        mean_speed_b: sum_b / denom,
        frac_slowed_a: slow_a as f64 / denom,
        frac_slowed_b: slow_b as f64 / denom,
    }
}

/// Aggregate per-race summaries. A race counts as a win for A when the final
/// lead is positive, for B when negative, a draw at exactly zero. An empty
/// batch yields all-zero statistics.
pub fn race_statistics(traces: &[RaceTrace], cfg: &GameConfig) -> RaceStatistics {
    let per_race: Vec<RaceSummary> = traces.iter().map(|t| summarize(t, cfg)).collect();
    let races = per_race.len();
    let denom = if races == 0 { 1.0 } else { races as f64 };
    let mut stats = RaceStatistics {
        races,
        wins_a: 0,
        wins_b: 0,
        draws: 0,
        mean_final_lead: 0.0,
        mean_switches_a: 0.0,
        mean_switches_b: 0.0,
        per_race,
    };
    for s in &stats.per_race {
        if s.final_lead > 0.0 {
            stats.wins_a += 1;
        } else if s.final_lead < 0.0 {
            stats.wins_b += 1;
        } else {
            stats.draws += 1;
        }
        stats.mean_final_lead += s.final_lead;
        stats.mean_switches_a += s.switches_a as f64;
        stats.mean_switches_b += s.switches_b as f64;
    }
    stats.mean_final_lead /= denom;
    stats.mean_switches_a /= denom;
    stats.mean_switches_b /= denom;
    stats
}

/// Write one race as CSV with a commented provenance header.
///
/// Floats use Rust's shortest round-trip formatting, so a written trace
/// reloads bit-exactly. Lengths are in units of 1000 m, times in units of
/// 10 s.
pub fn write_trace_csv<W: Write>(
    mut out: W,
    trace: &RaceTrace,
    param_hash_hex: &str,
) -> io::Result<()> {
    writeln!(out, "# matchrace race trace")?;
    writeln!(out, "# params_hash {param_hash_hex}")?;
    writeln!(out, "# seed {}", trace.seed)?;
    writeln!(out, "# rng {RNG_ALGORITHM} {NORMAL_TRANSFORM}")?;
    writeln!(out, "# units length 1000 m, time 10 s")?;
    writeln!(out, "# dt {}", trace.dt)?;
    writeln!(
        out,
        "t,xA1,xA2,xB1,xB2,theta,q,r,speedA,speedB,switchA,switchB"
    )?;
    for s in &trace.steps {
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{}",
            s.t,
            s.x_a[0],
            s.x_a[1],
            s.x_b[0],
            s.x_b[1],
            s.theta,
            s.q.number(),
            s.r.number(),
            s.speed_a,
            s.speed_b,
            s.switch_a as u8,
            s.switch_b as u8,
        )?;
    }
    Ok(())
}

/// Write the plot-friendly decomposition of one trace: wind angle,
/// trajectories, lead/separation, and speeds as separate CSV files in `dir`.
pub fn write_plot_data(dir: &Path, trace: &RaceTrace) -> io::Result<()> {
    std::fs::create_dir_all(dir)?;

    let mut wind = std::fs::File::create(dir.join("wind.csv"))?;
    writeln!(wind, "t,theta")?;
    for s in &trace.steps {
        writeln!(wind, "{},{}", s.t, s.theta)?;
    }

    let mut traj = std::fs::File::create(dir.join("trajectories.csv"))?;
    writeln!(traj, "t,xA1,xA2,xB1,xB2")?;
    for s in &trace.steps {
        writeln!(
            traj,
            "{},{},{},{},{}",
            s.t, s.x_a[0], s.x_a[1], s.x_b[0], s.x_b[1]
        )?;
    }

    let mut dist = std::fs::File::create(dir.join("distance.csv"))?;
    writeln!(dist, "t,lead,separation")?;
    for s in &trace.steps {
        let dx = s.x_a[0] - s.x_b[0];
        let dy = s.x_a[1] - s.x_b[1];
        writeln!(dist, "{},{},{}", s.t, dy, (dx * dx + dy * dy).sqrt())?;
    }

    let mut spd = std::fs::File::create(dir.join("speeds.csv"))?;
    writeln!(spd, "t,speedA,speedB")?;
    for s in &trace.steps {
        writeln!(spd, "{},{},{}", s.t, s.speed_a, s.speed_b)?;
    }
    Ok(())
}

/// Write batch statistics: aggregate counters as comment lines, then one row
/// per race.
pub fn write_statistics_csv<W: Write>(mut out: W, stats: &RaceStatistics) -> io::Result<()> {
    writeln!(out, "# races {}", stats.races)?;
    writeln!(
        out,
        "# wins_a {} wins_b {} draws {}",
        stats.wins_a, stats.wins_b, stats.draws
    )?;
    writeln!(out, "# mean_final_lead {}", stats.mean_final_lead)?;
    writeln!(
        out,
        "# mean_switches_a {} mean_switches_b {}",
        stats.mean_switches_a, stats.mean_switches_b
    )?;
    writeln!(
        out,
        "seed,final_lead,winner,switches_a,switches_b,mean_speed_a,mean_speed_b,frac_slowed_a,frac_slowed_b"
    )?;
    for s in &stats.per_race {
        let winner = if s.final_lead > 0.0 {
            "A"
        } else if s.final_lead < 0.0 {
            "B"
        } else {
            "draw"
        };
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            s.seed,
            s.final_lead,
            winner,
            s.switches_a,
            s.switches_b,
            s.mean_speed_a,
            s.mean_speed_b,
            s.frac_slowed_a,
            s.frac_slowed_b,
        )?;
    }
    Ok(())
}
