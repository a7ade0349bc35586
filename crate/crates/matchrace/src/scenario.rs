//! Plain-text scenario files.
//!
//! A scenario is an INI-style file with four sections:
//!
//! ```text
//! [grid]
//! b1 = 1.0
//! b2 = 1.0
//! b3 = 0.7853981633974483
//! n_cells = 200
//!
//! [game]
//! s_bar_a = 0.05
//! c_b = 0.04
//!
//! [solver]
//! tol = 1e-5
//! mode = gauss-seidel
//!
//! [simulation]
//! x_a = -0.05 0.0
//! strategy_b = single-player-optimal
//! ```
//!
//! Every key is optional and overrides the symmetric benchmark defaults.
//! `#` starts a comment (whole-line or trailing); `;` comments a whole line.
//! Keys may not repeat, must follow a section header, and unknown keys or
//! sections are rejected with their line number.

use crate::config::GameConfig;
use crate::error::{Error, Result};
use crate::field::SweepMode;
use crate::model::Tack;
use crate::solver3d::SolverOptions;
use crate::strategy::{SimConfig, Strategy};

use std::collections::HashSet;
use std::path::Path;

/// A fully resolved run description: game constants, solver options, and
/// simulation setup.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub game: GameConfig,
    pub solver: SolverOptions,
    pub sim: SimConfig,
}

impl Default for Scenario {
    fn default() -> Self {
        Scenario {
            game: GameConfig::symmetric_benchmark(200),
            solver: SolverOptions::default(),
            sim: SimConfig::benchmark(),
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Section {
    Grid,
    Game,
    Solver,
    Simulation,
}

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::ScenarioParse {
        line,
        message: message.into(),
    }
}

fn parse_f64(line: usize, key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .map_err(|_| err(line, format!("invalid number for {key}: '{value}'")))
}

fn parse_usize(line: usize, key: &str, value: &str) -> Result<usize> {
    value
        .parse::<usize>()
        .map_err(|_| err(line, format!("invalid integer for {key}: '{value}'")))
}

fn parse_u64(line: usize, key: &str, value: &str) -> Result<u64> {
    value
        .parse::<u64>()
        .map_err(|_| err(line, format!("invalid integer for {key}: '{value}'")))
}

fn parse_pair(line: usize, key: &str, value: &str) -> Result<[f64; 2]> {
    let parts: Vec<&str> = value.split_whitespace().collect();
    if parts.len() != 2 {
        return Err(err(
            line,
            format!("{key} needs two whitespace-separated numbers, got '{value}'"),
        ));
    }
    Ok([
        parse_f64(line, key, parts[0])?,
        parse_f64(line, key, parts[1])?,
    ])
}

fn parse_tack(line: usize, key: &str, value: &str) -> Result<Tack> {
    match value {
        "1" | "port" => Ok(Tack::Port),
        "2" | "starboard" => Ok(Tack::Starboard),
        _ => Err(err(
            line,
            format!("{key} must be 1/port or 2/starboard, got '{value}'"),
        )),
    }
}

fn parse_strategy(line: usize, key: &str, value: &str) -> Result<Strategy> {
    Strategy::from_name(value).ok_or_else(|| {
        err(
            line,
            format!(
                "{key} must be game-optimal, single-player-optimal or fixed-mode, got '{value}'"
            ),
        )
    })
}

fn parse_mode(line: usize, value: &str) -> Result<SweepMode> {
    match value {
        "gauss-seidel" => Ok(SweepMode::GaussSeidel),
        "jacobi" => Ok(SweepMode::Jacobi),
        _ => Err(err(
            line,
            format!("mode must be gauss-seidel or jacobi, got '{value}'"),
        )),
    }
}

/// Parse a scenario from text. Unset keys keep their benchmark defaults;
/// the assembled configuration is validated before it is returned.
pub fn parse_scenario(text: &str) -> Result<Scenario> {
    let mut sc = Scenario::default();
    let mut section: Option<Section> = None;
    let mut seen: HashSet<(u8, String)> = HashSet::new();

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        // Trailing '#' comments; whole-line ';' comments.
        let line = raw_line.split('#').next().unwrap_or("").trim();
        if line.is_empty() || line.starts_with(';') {
            continue;
        }

        if let Some(name) = line.strip_prefix('[') {
            let name = name
                .strip_suffix(']')
                .ok_or_else(|| err(lineno, format!("unterminated section header '{line}'")))?
                .trim();
            section = Some(match name {
                "grid" => Section::Grid,
                "game" => Section::Game,
                "solver" => Section::Solver,
                "simulation" => Section::Simulation,
                _ => return Err(err(lineno, format!("unknown section [{name}]"))),
            });
            continue;
        }

        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| err(lineno, format!("expected 'key = value', got '{line}'")))?;
        let key = key.trim();
        let value = value.trim();
        if key.is_empty() {
            return Err(err(lineno, "empty key"));
        }
        if value.is_empty() {
            return Err(err(lineno, format!("empty value for {key}")));
        }
        let sec = section
            .ok_or_else(|| err(lineno, format!("key '{key}' appears before any [section]")))?;
        if !seen.insert((sec as u8, key.to_string())) {
            return Err(err(lineno, format!("duplicate key '{key}'")));
        }

        match sec {
            Section::Grid => match key {
                "b1" => sc.game.b1 = parse_f64(lineno, key, value)?,
                "b2" => sc.game.b2 = parse_f64(lineno, key, value)?,
                "b3" => sc.game.b3 = parse_f64(lineno, key, value)?,
                "n_cells" => sc.game.n_cells = parse_usize(lineno, key, value)?,
                _ => return Err(err(lineno, format!("unknown key '{key}' in [grid]"))),
            },
            Section::Game => match key {
                "s_bar_a" => sc.game.s_bar_a = parse_f64(lineno, key, value)?,
                "s_bar_b" => sc.game.s_bar_b = parse_f64(lineno, key, value)?,
                "s0" => sc.game.s0 = parse_f64(lineno, key, value)?,
                "s1" => sc.game.s1 = parse_f64(lineno, key, value)?,
                "nu1" => sc.game.nu1 = parse_f64(lineno, key, value)?,
                "nu2" => sc.game.nu2 = parse_f64(lineno, key, value)?,
                "c_a" => sc.game.c_a = parse_f64(lineno, key, value)?,
                "c_b" => sc.game.c_b = parse_f64(lineno, key, value)?,
                "a_star" => sc.game.a_star = parse_f64(lineno, key, value)?,
                "sigma" => sc.game.sigma = parse_f64(lineno, key, value)?,
                "lambda" => sc.game.lambda = parse_f64(lineno, key, value)?,
                _ => return Err(err(lineno, format!("unknown key '{key}' in [game]"))),
            },
            Section::Solver => match key {
                "tol" => sc.game.tol = parse_f64(lineno, key, value)?,
                "m_cells" => sc.solver.m_cells = parse_usize(lineno, key, value)?,
                "max_iters" => sc.solver.max_iters = Some(parse_usize(lineno, key, value)?),
                "mode" => sc.solver.mode = parse_mode(lineno, value)?,
                "threads" => sc.solver.threads = Some(parse_usize(lineno, key, value)?),
                _ => return Err(err(lineno, format!("unknown key '{key}' in [solver]"))),
            },
            Section::Simulation => match key {
                "dt" => sc.game.dt = parse_f64(lineno, key, value)?,
                "seed" => sc.sim.seed = parse_u64(lineno, key, value)?,
                "horizon_steps" => sc.sim.horizon_steps = parse_usize(lineno, key, value)?,
                "x_a" => sc.sim.x_a0 = parse_pair(lineno, key, value)?,
                "x_b" => sc.sim.x_b0 = parse_pair(lineno, key, value)?,
                "theta0" => sc.sim.theta0 = parse_f64(lineno, key, value)?,
                "q0" => sc.sim.q0 = parse_tack(lineno, key, value)?,
                "r0" => sc.sim.r0 = parse_tack(lineno, key, value)?,
                "strategy_a" => sc.sim.strategy_a = parse_strategy(lineno, key, value)?,
                "strategy_b" => sc.sim.strategy_b = parse_strategy(lineno, key, value)?,
                _ => return Err(err(lineno, format!("unknown key '{key}' in [simulation]"))),
            },
        }
    }

    sc.game.validate()?;
    sc.sim.validate(&sc.game)?;
    if sc.solver.m_cells < 8 {
        return Err(Error::InvalidConfig(format!(
            "m_cells must be at least 8, got {}",
            sc.solver.m_cells
        )));
    }
    Ok(sc)
}

/// Read and parse a scenario file.
pub fn load_scenario(path: &Path) -> Result<Scenario> {
    let text = std::fs::read_to_string(path)?;
    parse_scenario(&text)
}
