//! Monte Carlo checks of the solver against the baselines and oracles.

use pim_core::alternating::{solve, SolveOptions, Status, WaterfillMethod};
use pim_core::baselines::{global_search, grid_oracle, random_phase_baseline, GlobalSearchOptions};
use pim_core::experiments::{
    aggregate, convergence_report, run_experiment, ExperimentKind, ExperimentSpec, GroupKey, Method, ScenarioPoint,
    SolverSettings,
};
use pim_core::phase_mm::{build_reduced_map, mm_loop, MmMode, Weighting};
use pim_core::scenario::{generate_channels, snr_config, ChannelSet, Dims, RateFloorMode, RngSeed, Stream};
use pim_core::zf::PhaseVector;

fn spec(experiment: ExperimentKind, scenarios: Vec<ScenarioPoint>, methods: Vec<Method>, realizations: usize, floor: RateFloorMode) -> ExperimentSpec {
    ExperimentSpec {
        experiment,
        scenarios,
        realizations,
        rate_floor: floor,
        methods,
        solver: SolverSettings::default(),
        master_seed: 99,
        output_path: None,
    }
}

fn wins_over_random_phases(dims: Dims, master: u64) -> usize {
    let cfg = snr_config(dims, 10.0, RateFloorMode::Fixed { value: 0.0 }).unwrap();
    let mut wins = 0;
    for s in 0..200 {
        let seed = RngSeed::new(master, s);
        let ch = generate_channels(&cfg, seed);
        let sol = solve(&ch, &cfg, seed, &SolveOptions::default()).unwrap();
        assert!(sol.sum_rate >= sol.outer_trace[0].sum_rate - 1e-9);
        let rnd = random_phase_baseline(&ch, &cfg, seed, WaterfillMethod::Exact).unwrap();
        wins += (sol.sum_rate >= rnd.sum_rate - 1e-9) as usize;
    }
    wins
}

// With K < N the phase step minimizes an upper bound of the power cost,
// not the cost itself.
#[test]
fn solver_beats_random_phases_with_more_units_than_users() {
    let wins = wins_over_random_phases(Dims::new(2, 4, 4), 31);
    assert!(wins >= 190, "beat random phases on {wins}/200");
}

#[test]
fn solver_beats_random_phases_with_units_equal_to_users() {
    let wins = wins_over_random_phases(Dims::new(4, 4, 4), 31);
    assert!(wins >= 190, "beat random phases on {wins}/200");
}

#[test]
fn mm_converges_within_cap() {
    let dims = Dims::new(16, 8, 16);
    let mut converged = 0;
    for r in 0..100 {
        let seed = RngSeed::new(32, r);
        let ch = ChannelSet::generate(dims, seed);
        let map = build_reduced_map(&ch, Weighting::Unweighted, 1e-10).unwrap();
        let x0 = PhaseVector::random(16, &mut seed.rng(Stream::InitialPhases));
        let st = mm_loop(&map, &x0, 1e-4, 200, MmMode::Spectral);
        converged += st.converged as usize;
    }
    assert!(converged >= 95, "converged on {converged}/100");
}

#[test]
fn single_unit_global_search_matches_solver() {
    let cfg = snr_config(Dims::new(1, 2, 1), 10.0, RateFloorMode::Fixed { value: 1.0 }).unwrap();
    for s in 0..5 {
        let seed = RngSeed::new(33, s);
        let ch = generate_channels(&cfg, seed);
        let sol = solve(&ch, &cfg, seed, &SolveOptions::default()).unwrap();
        let opts = GlobalSearchOptions { restarts: 3, ..Default::default() };
        let gs = global_search(&ch, &cfg, &opts, seed).unwrap();
        assert!((gs.sum_rate - sol.sum_rate).abs() <= 1e-6 * sol.sum_rate.max(1.0));
    }
}

#[test]
fn global_search_matches_grid_on_two_units() {
    let cfg = snr_config(Dims::new(2, 4, 2), 20.0, RateFloorMode::Fixed { value: 2.0 }).unwrap();
    let opts = GlobalSearchOptions { restarts: 20, ..Default::default() };
    for s in 0..10 {
        let seed = RngSeed::new(34, s);
        let ch = generate_channels(&cfg, seed);
        let grid = grid_oracle(&ch, &cfg, 3600, WaterfillMethod::Exact);
        let gs = global_search(&ch, &cfg, &opts, seed);
        match (grid, gs) {
            (Ok(g), Ok(s)) => assert!((s.sum_rate - g.sum_rate).abs() <= 1e-3 * g.sum_rate, "{} vs {}", s.sum_rate, g.sum_rate),
            (Err(a), Err(b)) => assert_eq!(a.to_string(), b.to_string()),
            (a, b) => panic!("grid {a:?} vs global search {b:?}"),
        }
    }
}

#[test]
fn global_search_dominates_solver() {
    let cfg = snr_config(Dims::new(2, 4, 4), 10.0, RateFloorMode::Fixed { value: 0.0 }).unwrap();
    let opts = GlobalSearchOptions::default();
    let mut shortfalls = Vec::new();
    for s in 0..20 {
        let seed = RngSeed::new(35, s);
        let ch = generate_channels(&cfg, seed);
        let sol = solve(&ch, &cfg, seed, &SolveOptions::default()).unwrap();
        let gs = global_search(&ch, &cfg, &opts, seed).unwrap();
        if gs.sum_rate < sol.sum_rate - 1e-6 {
            shortfalls.push((s, gs.sum_rate, sol.sum_rate));
        }
    }
    assert!(shortfalls.is_empty(), "search-budget shortfalls: {shortfalls:?}");
}

#[test]
fn solver_reaches_grid_optimum_on_two_units() {
    let cfg = snr_config(Dims::new(2, 4, 2), 20.0, RateFloorMode::Fixed { value: 2.0 }).unwrap();
    let seed = RngSeed::new(36, 0);
    let ch = generate_channels(&cfg, seed);
    let sol = solve(&ch, &cfg, seed, &SolveOptions::default()).unwrap();
    assert_ne!(sol.status, Status::Infeasible);
    let grid = grid_oracle(&ch, &cfg, 3600, WaterfillMethod::Exact).unwrap();
    let gap = (grid.sum_rate - sol.sum_rate) / grid.sum_rate;
    assert!(gap <= 1e-4, "solver {} vs grid {}", sol.sum_rate, grid.sum_rate);
}

#[test]
fn random_phases_trail_solver_at_high_snr() {
    let s = spec(
        ExperimentKind::SweepSnr,
        vec![ScenarioPoint { k: 8, m: 8, n: 8, snr_db: 20.0 }],
        vec![Method::Algorithm1, Method::RandomPhase],
        100,
        RateFloorMode::SnrScaled,
    );
    let rows = run_experiment(&s).unwrap();
    let summary = aggregate(&rows, &[GroupKey::Method]).unwrap();
    let alg = summary[0].stats.unwrap().mean;
    let rnd = summary[1].stats.unwrap().mean;
    assert!(rnd < alg, "random {rnd} vs solver {alg}");
}

#[test]
fn median_mm_iterations_grow_with_mirror_size() {
    let mut s = spec(
        ExperimentKind::Convergence,
        [16, 32, 64].iter().map(|&n| ScenarioPoint { k: 16, m: 8, n, snr_db: 0.0 }).collect(),
        vec![],
        50,
        RateFloorMode::SnrScaled,
    );
    s.solver.surrogate = MmMode::Spectral;
    s.solver.tolerances.mm_mse_tol = 1e-4;
    let rep = convergence_report(&s).unwrap();
    let med: Vec<f64> = rep.summary.iter().map(|x| x.median_iterations).collect();
    assert!(med.windows(2).all(|w| w[1] > w[0]), "{med:?}");
}

#[test]
fn sum_rate_saturates_without_dropping_in_mirror_size() {
    let s = spec(
        ExperimentKind::SweepN,
        [8, 16, 24, 32].iter().map(|&n| ScenarioPoint { k: 8, m: 8, n, snr_db: 20.0 }).collect(),
        vec![Method::Algorithm1],
        100,
        RateFloorMode::Fixed { value: 2.0 },
    );
    let rows = run_experiment(&s).unwrap();
    let summary = aggregate(&rows, &[GroupKey::Units]).unwrap();
    for w in summary.windows(2) {
        let (a, b) = (w[0].stats.unwrap(), w[1].stats.unwrap());
        let pooled_se = ((a.std * a.std + b.std * b.std) / a.count as f64).sqrt();
        assert!(b.mean >= a.mean - pooled_se, "{:?} -> {:?}", a, b);
    }
}
