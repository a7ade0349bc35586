//! End-to-end acceptance suite.
//!
//! One test per release criterion. Every test prints exactly one
//! `acceptance <n> (<label>): PASS/FAIL — <details>` line (run with
//! `cargo test --test acceptance -- --nocapture` to see them) and then
//! asserts the same condition, so a red test always names the criterion and
//! the measured numbers that sank it.
//!
//! The two 61^3 production solves (symmetric and asymmetric benchmark) are
//! shared across tests through lazy statics, so the suite pays for each of
//! them once no matter how the test harness schedules the criteria.

use std::time::Instant;

use once_cell::sync::Lazy;

use matchrace::model::{PlayerId, Tack};
use matchrace::qvi1d::{
    boundary_field, obstacle_solution, solve_1d, theta_star, theta_star_for, BoundaryTable,
};
use matchrace::solver3d::{operator_t, value_iteration, SolveReport, SolverOptions};
use matchrace::strategy::{simulate, write_trace_csv, SimConfig, Strategy, SWITCH_EPS_FACTOR};
use matchrace::{FieldArtifact, GameConfig, Grid3, SwitchingMaps, ValueField};

// ---------------------------------------------------------------------------
// Shared production solves.

struct Solved {
    cfg: GameConfig,
    grid: Grid3,
    table: BoundaryTable,
    field: ValueField,
    maps: SwitchingMaps,
    report: SolveReport,
    solve_secs: f64,
}

fn solve_benchmark(cfg: GameConfig) -> Solved {
    let grid = Grid3::from_config(&cfg);
    let opts = SolverOptions::default();
    let start = Instant::now();
    let table = boundary_field(&cfg, &grid, opts.m_cells).expect("far-field table");
    let (field, maps, report) =
        value_iteration(&cfg, &table, None, &opts).expect("value iteration");
    let solve_secs = start.elapsed().as_secs_f64();
    Solved {
        cfg,
        grid,
        table,
        field,
        maps,
        report,
        solve_secs,
    }
}

/// Symmetric benchmark game on the 61^3 production grid.
static SYMMETRIC: Lazy<Solved> = Lazy::new(|| solve_benchmark(GameConfig::symmetric_benchmark(60)));

/// Asymmetric benchmark (B pays c_b = 0.04) on the same grid.
static ASYMMETRIC: Lazy<Solved> =
    Lazy::new(|| solve_benchmark(GameConfig::asymmetric_benchmark(60)));

fn verdict(id: usize, label: &str, pass: bool, detail: &str) {
    let word = if pass { "PASS" } else { "FAIL" };
    println!("acceptance {id} ({label}): {word} — {detail}");
    assert!(pass, "acceptance {id} ({label}) failed: {detail}");
}

// ---------------------------------------------------------------------------
// 1. Hysteresis threshold from the closed form.

#[test]
fn criterion_1_contact_point_value_and_speed() {
    let cfg = GameConfig::symmetric_benchmark(60);
    let start = Instant::now();
    let t_star = theta_star(&cfg).expect("threshold");
    let elapsed = start.elapsed();

    let err = (t_star - 0.085722).abs();
    let pass = err <= 1e-4 && elapsed.as_secs_f64() < 1e-3;
    verdict(
        1,
        "contact point",
        pass,
        &format!(
            "theta* = {t_star:.6} (|delta| = {err:.2e}, bound 1e-4), computed in {:.1} us (bound 1000 us)",
            elapsed.as_secs_f64() * 1e6
        ),
    );
}

// ---------------------------------------------------------------------------
// 2. 1-D solver converges to the closed form with order >= 1.5.

/// Max node deviation of v(2,.) - v(1,.) from the closed form over the
/// central band |theta| <= pi/4.
fn closed_form_error(cfg: &GameConfig, m_cells: usize) -> f64 {
    let v = solve_1d(PlayerId::A, cfg, m_cells).expect("1-D solve");
    let sol = obstacle_solution(cfg).expect("closed form");
    let band = std::f64::consts::FRAC_PI_4 + 1e-12;
    let mut worst = 0.0_f64;
    for k in 0..m_cells {
        let theta = v.node_theta(k);
        if theta.abs() <= band {
            worst = worst.max((v.diff(k) - sol.eval(theta)).abs());
        }
    }
    worst
}

#[test]
fn criterion_2_closed_form_convergence_order() {
    let mut cfg = GameConfig::symmetric_benchmark(60);
    cfg.tol = 1e-9;
    let start = Instant::now();
    let e_coarse = closed_form_error(&cfg, 1000);
    let e_fine = closed_form_error(&cfg, 2000);
    let secs = start.elapsed().as_secs_f64();
    let order = (e_coarse / e_fine).log2();

    let pass = e_fine <= 2e-3 && order >= 1.5 && secs < 10.0;
    verdict(
        2,
        "closed-form convergence",
        pass,
        &format!(
            "err(m=1000) = {e_coarse:.3e}, err(m=2000) = {e_fine:.3e} (bound 2e-3), \
             observed order {order:.2} (bound 1.5), both solves in {secs:.2} s (bound 10 s)"
        ),
    );
}

// ---------------------------------------------------------------------------
// 3. Obstacle bounds hold at every node of the converged 1-D and 3-D fields.

#[test]
fn criterion_3_obstacle_bounds_everywhere() {
    let s = &*SYMMETRIC;
    let cfg = &s.cfg;
    let eps = SWITCH_EPS_FACTOR * cfg.tol;

    // 1-D: each player's own switch obstacle, both modes, every node.
    let mut bad_1d = 0usize;
    let m = 2000;
    for player in [PlayerId::A, PlayerId::B] {
        let v = solve_1d(player, cfg, m).expect("1-D solve");
        let cost = match player {
            PlayerId::A => cfg.c_a,
            PlayerId::B => cfg.c_b,
        };
        for k in 0..m {
            for p in Tack::BOTH {
                if v.value(p, k) < v.value(p.other(), k) - cost - eps {
                    bad_1d += 1;
                }
            }
        }
    }
    // 1-D mode-difference table: both game obstacles at every theta node.
    for k in 0..s.grid.n_nodes() {
        for q in Tack::BOTH {
            for r in Tack::BOTH {
                let w = s.table.get(q, r, k);
                if w < s.table.get(q.other(), r, k) - cfg.c_a - eps
                    || w > s.table.get(q, r.other(), k) + cfg.c_b + eps
                {
                    bad_1d += 1;
                }
            }
        }
    }

    // 3-D: both obstacles at 100% of nodes (faces included).
    let n = s.grid.n_nodes();
    let mut bad_3d = 0usize;
    let mut checked = 0usize;
    for q in Tack::BOTH {
        for r in Tack::BOTH {
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        let v = s.field.get(i, j, k, q, r);
                        let lower = s.field.get(i, j, k, q.other(), r) - cfg.c_a;
                        let upper = s.field.get(i, j, k, q, r.other()) + cfg.c_b;
                        if v < lower - eps || v > upper + eps {
                            bad_3d += 1;
                        }
                        checked += 1;
                    }
                }
            }
        }
    }

    let pass = bad_1d == 0 && bad_3d == 0 && s.report.converged && s.solve_secs < 300.0;
    verdict(
        3,
        "obstacle bounds",
        pass,
        &format!(
            "1-D violations {bad_1d}, 3-D violations {bad_3d} of {checked} node checks \
             (slack {eps:.1e}); 61^3 solve converged = {} in {} sweeps, {:.1} s (bound 300 s)",
            s.report.converged, s.report.iterations, s.solve_secs
        ),
    );
}

// ---------------------------------------------------------------------------
// 4. Far-field agreement on the layers adjacent to the spatial faces.

#[test]
fn criterion_4_far_field_layers() {
    let s = &*SYMMETRIC;
    let g = &s.grid;
    let n = g.n_nodes();
    let margin = 5.0 * g.dx1.max(g.dx2) * (s.cfg.s_bar_a + s.cfg.s_bar_b) / s.cfg.lambda;

    // Every node one layer in from a spatial face: i in {1, n-2} (all j, k)
    // plus j in {1, n-2} (all i, k).
    let mut layer_nodes: Vec<(usize, usize, usize)> = Vec::new();
    for &i in &[1, n - 2] {
        for j in 0..n {
            for k in 0..n {
                layer_nodes.push((i, j, k));
            }
        }
    }
    for &j in &[1, n - 2] {
        for i in 0..n {
            for k in 0..n {
                layer_nodes.push((i, j, k));
            }
        }
    }

    let mut worst_gap = 0.0_f64;
    let mut worst_diag = 0.0_f64;
    for &(i, j, k) in &layer_nodes {
        for q in Tack::BOTH {
            for r in Tack::BOTH {
                let gap = (s.field.get(i, j, k, q, r) - s.table.get(q, r, k)).abs();
                worst_gap = worst_gap.max(gap);
            }
        }
        worst_diag = worst_diag.max(s.field.get(i, j, k, Tack::Port, Tack::Port).abs());
        worst_diag = worst_diag.max(s.field.get(i, j, k, Tack::Starboard, Tack::Starboard).abs());
    }

    let pass = worst_gap <= margin && worst_diag <= 1e-2;
    verdict(
        4,
        "far-field layers",
        pass,
        &format!(
            "max |v - far-field| = {worst_gap:.3e} (bound {margin:.3e}) and max diagonal-pair \
             magnitude = {worst_diag:.3e} (bound 1e-2) over {} layer nodes",
            layer_nodes.len()
        ),
    );
}

// ---------------------------------------------------------------------------
// 5. Operator monotonicity and sweep stability.

#[test]
fn criterion_5_monotonicity_and_stability() {
    // (a) Order preservation of T on 1000 random ordered field pairs.
    let cfg = GameConfig::symmetric_benchmark(6);
    let grid = Grid3::from_config(&cfg);
    let mut rng = matchrace::rng::WindRng::seed_from_u64(5);
    let mut violations = 0usize;
    for _ in 0..1000 {
        let mut lo = ValueField::constant(grid.clone(), 0.0);
        let mut hi = ValueField::constant(grid.clone(), 0.0);
        for idx in 0..lo.raw().len() {
            let base = 2.0 * rng.uniform_unit() - 1.0;
            let gap = 0.5 * rng.uniform_unit();
            lo.raw_mut()[idx] = base;
            hi.raw_mut()[idx] = base + gap;
        }
        for q in Tack::BOTH {
            for r in Tack::BOTH {
                for i in 1..grid.n_nodes() - 1 {
                    for j in 1..grid.n_nodes() - 1 {
                        for k in 1..grid.n_nodes() - 1 {
                            let t_lo = operator_t(&lo, i, j, k, q, r, &cfg);
                            let t_hi = operator_t(&hi, i, j, k, q, r, &cfg);
                            if t_lo > t_hi + 1e-15 {
                                violations += 1;
                            }
                        }
                    }
                }
            }
        }
    }

    // (b) Residual history non-increasing after the first sweep, and the
    //     sup norm never exceeds the discounted-reward bound.
    let s = &*SYMMETRIC;
    let hist = &s.report.residual_history;
    let mut residual_backslides = 0usize;
    for w in hist.windows(2).skip(1) {
        if w[1] > w[0] + 1e-12 {
            residual_backslides += 1;
        }
    }
    let bound = s.cfg.value_bound();
    let worst_supnorm = s
        .report
        .supnorm_history
        .iter()
        .fold(0.0_f64, |a, &b| a.max(b));

    let pass = violations == 0 && residual_backslides == 0 && worst_supnorm <= bound;
    verdict(
        5,
        "monotonicity and stability",
        pass,
        &format!(
            "order violations {violations}/1000 pairs; residual backslides {residual_backslides} \
             over {} sweeps (slack 1e-12); max sup-norm {worst_supnorm:.4} (bound {bound:.4})",
            hist.len()
        ),
    );
}

// ---------------------------------------------------------------------------
// 6. Single-player simulation switches exactly at the hysteresis thresholds.

#[test]
fn criterion_6_single_player_hysteresis() {
    let s = &*SYMMETRIC;
    let sim = SimConfig {
        horizon_steps: 100_000,
        seed: 2024,
        strategy_a: Strategy::SinglePlayerOptimal,
        strategy_b: Strategy::SinglePlayerOptimal,
        ..SimConfig::benchmark()
    };
    let trace = simulate(&s.maps, &sim, &s.cfg).expect("simulation");
    let thr_a = theta_star_for(
        s.cfg.s_bar_a,
        s.cfg.sigma,
        s.cfg.lambda,
        s.cfg.c_a,
        s.cfg.a_star,
    )
    .unwrap();
    let thr_b = theta_star_for(
        s.cfg.s_bar_b,
        s.cfg.sigma,
        s.cfg.lambda,
        s.cfg.c_b,
        s.cfg.a_star,
    )
    .unwrap();

    // Switches must happen exactly when the wind crosses +-theta* in the
    // hysteresis direction (never early, never late), and the realized
    // switching corners must pin the thresholds down to within one theta
    // cell: the closest up-switch lands within one cell above +theta*, the
    // closest down-switch within one cell below -theta*.
    let mut bad_rows = 0usize;
    let mut switches = 0usize;
    let mut corner_up = f64::INFINITY;
    let mut corner_down = f64::INFINITY;
    for w in trace.steps.windows(2) {
        let (prev, cur) = (&w[0], &w[1]);
        for (mode_prev, mode_cur, switched, thr) in [
            (prev.q, cur.q, cur.switch_a, thr_a),
            (prev.r, cur.r, cur.switch_b, thr_b),
        ] {
            let should_switch = match mode_prev {
                Tack::Port => cur.theta >= thr,
                Tack::Starboard => cur.theta <= -thr,
            };
            let expect = if should_switch {
                mode_prev.other()
            } else {
                mode_prev
            };
            if mode_cur != expect || switched != should_switch {
                bad_rows += 1;
            }
            if switched {
                switches += 1;
                // The wind crossed the threshold within this one step: the
                // previous sample still sat on the holding side.
                match mode_prev {
                    Tack::Port => {
                        if !(prev.theta < thr && cur.theta >= thr) {
                            bad_rows += 1;
                        }
                        corner_up = corner_up.min(cur.theta - thr);
                    }
                    Tack::Starboard => {
                        if !(prev.theta > -thr && cur.theta <= -thr) {
                            bad_rows += 1;
                        }
                        corner_down = corner_down.min(-thr - cur.theta);
                    }
                }
            }
        }
    }
    let cell = s.grid.dtheta;
    let corners_localized =
        (0.0..=cell).contains(&corner_up) && (0.0..=cell).contains(&corner_down);

    let pass = bad_rows == 0 && switches >= 10 && corners_localized;
    verdict(
        6,
        "single-player hysteresis",
        pass,
        &format!(
            "{} rows checked, {bad_rows} inconsistent; {switches} switches, all at threshold \
             crossings; loop corners overshoot theta* by {corner_up:.2e} (up) and \
             {corner_down:.2e} (down), both within one cell ({cell:.4})",
            trace.steps.len() - 1
        ),
    );
}

// ---------------------------------------------------------------------------
// 7. Race outcome statistics for the three benchmark match-ups.

fn run_batch(
    solved: &Solved,
    seeds: std::ops::Range<u64>,
    strategy_a: Strategy,
    strategy_b: Strategy,
) -> matchrace::RaceStatistics {
    let traces: Vec<_> = seeds
        .map(|seed| {
            let sim = SimConfig {
                seed,
                strategy_a,
                strategy_b,
                ..SimConfig::benchmark()
            };
            simulate(&solved.maps, &sim, &solved.cfg).expect("race")
        })
        .collect();
    matchrace::race_statistics(&traces, &solved.cfg)
}

#[test]
fn criterion_7_race_outcomes() {
    // Test 1: symmetric game, equal start, both game-optimal. Both outcomes
    // must occur across 50 seeds.
    let sym = &*SYMMETRIC;
    let start1 = Instant::now();
    let stats1 = run_batch(sym, 0..50, Strategy::GameOptimal, Strategy::GameOptimal);
    let secs1 = sym.solve_secs + start1.elapsed().as_secs_f64();
    let test1 = stats1.wins_a > 0 && stats1.wins_b > 0;

    // Test 2: A game-optimal vs B single-player; A should out-race B on
    // average because A alone reacts to the interaction terms.
    let start2 = Instant::now();
    let stats2 = run_batch(
        sym,
        0..200,
        Strategy::GameOptimal,
        Strategy::SinglePlayerOptimal,
    );
    let secs2 = sym.solve_secs + start2.elapsed().as_secs_f64();
    let test2 = stats2.mean_final_lead > 0.0;

    // Test 3: asymmetric costs (B pays double per tack), both game-optimal;
    // A must win more than half the races.
    let asym = &*ASYMMETRIC;
    let start3 = Instant::now();
    let stats3 = run_batch(asym, 0..200, Strategy::GameOptimal, Strategy::GameOptimal);
    let secs3 = asym.solve_secs + start3.elapsed().as_secs_f64();
    let frac_a = stats3.wins_a as f64 / stats3.races as f64;
    let test3 = frac_a > 0.5;

    let in_time = secs1 < 900.0 && secs2 < 900.0 && secs3 < 900.0;
    let pass = test1 && test2 && test3 && in_time;
    verdict(
        7,
        "race outcomes",
        pass,
        &format!(
            "test1 wins A/B/draw = {}/{}/{} of 50 (need both players to win some, {secs1:.0} s); \
             test2 mean final lead = {:+.4} over 200 seeds (need > 0, {secs2:.0} s); \
             test3 A win fraction = {frac_a:.2} over 200 seeds (need > 0.5, {secs3:.0} s); \
             batch budget 900 s each",
            stats1.wins_a, stats1.wins_b, stats1.draws, stats2.mean_final_lead
        ),
    );
}

// ---------------------------------------------------------------------------
// 8. Bitwise determinism of traces and of parallel Jacobi solves.

#[test]
fn criterion_8_bitwise_determinism() {
    // (a) Same scenario + seed => byte-identical trace files.
    let s = &*SYMMETRIC;
    let sim = SimConfig {
        seed: 7,
        ..SimConfig::benchmark()
    };
    let hash_hex = s.cfg.param_hash_hex(SolverOptions::default().m_cells);
    let mut csv_a = Vec::new();
    let mut csv_b = Vec::new();
    write_trace_csv(
        &mut csv_a,
        &simulate(&s.maps, &sim, &s.cfg).unwrap(),
        &hash_hex,
    )
    .unwrap();
    write_trace_csv(
        &mut csv_b,
        &simulate(&s.maps, &sim, &s.cfg).unwrap(),
        &hash_hex,
    )
    .unwrap();
    let traces_identical = csv_a == csv_b;

    // (b) Jacobi solves encode byte-identically across worker-thread counts.
    let cfg = GameConfig::symmetric_benchmark(24);
    let grid = Grid3::from_config(&cfg);
    let table = boundary_field(&cfg, &grid, 256).expect("far-field table");
    let encode = |threads: usize| {
        let opts = SolverOptions {
            mode: matchrace::SweepMode::Jacobi,
            threads: Some(threads),
            m_cells: 256,
            ..SolverOptions::default()
        };
        let (field, maps, report) =
            value_iteration(&cfg, &table, None, &opts).expect("Jacobi solve");
        FieldArtifact {
            field,
            maps,
            param_hash: cfg.param_hash(256),
            converged: report.converged,
            mode: matchrace::SweepMode::Jacobi,
            iterations: report.iterations as u64,
            residual: report.residual,
            tol: cfg.tol,
        }
        .encode()
    };
    let one = encode(1);
    let four = encode(4);
    let solves_identical = one == four;

    let pass = traces_identical && solves_identical;
    verdict(
        8,
        "bitwise determinism",
        pass,
        &format!(
            "trace bytes identical across reruns = {traces_identical} ({} bytes); Jacobi artifact \
             bytes identical for 1 vs 4 threads = {solves_identical} ({} bytes)",
            csv_a.len(),
            one.len()
        ),
    );
}
