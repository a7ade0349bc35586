//! Match-race solver: the value function of a two-boat sailing duel under a
//! stochastic wind, the optimal tack-switching strategies it induces, and a
//! race simulator that plays them out.
//!
//! The model tracks the relative position of two boats beating upwind, each
//! choosing when to tack while a Brownian wind angle wanders inside a band.
//! Tacking costs time; sitting in an opponent's wind shadow costs speed. The
//! leader's expected discounted lead solves a quasi-variational inequality
//! with one switching obstacle per player, discretized here with a monotone
//! upwind scheme on a uniform 3-D grid over (relative position, wind angle)
//! and iterated to its fixed point.
//!
//! Crate layout:
//!
//! - [`model`]: boat speeds, headings, wind-shadow interaction, drift and
//!   running reward of the coupled system.
//! - [`qvi1d`]: the far-field single-boat switching problem on the wind
//!   circle — its closed form, thresholds, and the boundary table the 3-D
//!   solve pins to the box faces.
//! - [`solver3d`]: the discrete operator and Gauss-Seidel/Jacobi value
//!   iteration.
//! - [`strategy`]: switching-map extraction, race simulation, statistics,
//!   and CSV output.
//! - [`field`]: value-field storage, switching maps, and the binary artifact
//!   codec.
//! - [`scenario`]: the plain-text run-description format.
//!
//! ```no_run
//! use matchrace::{boundary_field, value_iteration, GameConfig, Grid3, SolverOptions};
//!
//! let cfg = GameConfig::symmetric_benchmark(60);
//! let grid = Grid3::from_config(&cfg);
//! let table = boundary_field(&cfg, &grid, 2000)?;
//! let (field, maps, report) = value_iteration(&cfg, &table, None, &SolverOptions::default())?;
//! assert!(report.converged);
//! # Ok::<(), matchrace::Error>(())
//! ```

pub mod config;
pub mod error;
pub mod field;
pub mod grid;
pub mod model;
pub mod qvi1d;
pub mod rng;
pub mod scenario;
pub mod solver3d;
pub mod strategy;

pub use config::GameConfig;
pub use error::{Error, Result};
pub use field::{FieldArtifact, SweepMode, SwitchingMaps, ValueField};
pub use grid::Grid3;
pub use model::{PlayerId, Tack};
pub use qvi1d::{boundary_field, solve_1d, theta_star, BoundaryTable, ObstacleSolution, Value1D};
pub use rng::WindRng;
pub use scenario::{load_scenario, parse_scenario, Scenario};
pub use solver3d::{operator_t, scheme_update, value_iteration, SolveReport, SolverOptions};
pub use strategy::{
    extract_switching_maps, race_statistics, simulate, write_plot_data, write_statistics_csv,
    write_trace_csv, RaceStatistics, RaceTrace, SimConfig, Strategy, TraceStep,
};
