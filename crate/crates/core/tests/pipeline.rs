use firesat_core::constellation::{expand, WalkerChromosome};
use firesat_core::coverage::{build_grid, CoverageEvaluator, CoverageStatus, EvalConfig, RegionConfig};
use firesat_core::edgesim::{latency_sweep, LinkBudget, LinkGeometry};
use firesat_core::kepler::EarthModel;
use firesat_core::optimizer::{run, CoverageFitness, GaConfig, Mode};

fn evaluator(dt_s: f64) -> CoverageEvaluator {
    let region = RegionConfig {
        name: "box".into(),
        area_of_interest: vec![[-36.0, 144.0], [-36.0, 152.0], [-28.0, 152.0], [-28.0, 144.0]],
        exclusions: vec![vec![[-33.0, 147.0], [-33.0, 149.0], [-31.0, 149.0], [-31.0, 147.0]]],
        spacing_km: 50.0,
    };
    let earth = EarthModel::default();
    let grid = build_grid(&region, earth.r_e).unwrap();
    assert!(!grid.excluded.is_empty());
    CoverageEvaluator::new(grid, earth, EvalConfig { dt_s, ..EvalConfig::default() }).unwrap()
}

#[test]
fn chromosome_to_report() {
    let c = WalkerChromosome { a_km: 7300.0, e: 0.001, i_deg: 35.0, planes: 6, phasing: 1, per_plane: 8 };
    let r = evaluator(60.0).evaluate(&expand(&c).unwrap()).unwrap();
    assert_eq!(r.status, CoverageStatus::Feasible);
    assert_eq!(r.n_sats, 48);
    assert!(r.p_cov > 0 && r.p_cov <= r.grid_points);
    assert!(r.fitness.is_finite());

    let back: firesat_core::coverage::CoverageReport =
        serde_json::from_str(&serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(back, r);
}

#[test]
fn short_optimization_returns_a_feasible_design() {
    let fit = CoverageFitness { evaluator: evaluator(300.0), bounds: Default::default() };
    let cfg = GaConfig { population: 12, generations: 5, seed: 1, mode: Mode::Scalar, ..GaConfig::default() };
    let res = run(cfg, fit.bounds, &fit).unwrap();
    let best = res.best.unwrap();
    assert!(best.scalar.is_finite());
    assert_eq!(res.history.len(), 6);
    assert_eq!(fit.report(&best.genes).unwrap().fitness, best.scalar);
}

#[test]
fn sweep_from_json_budget() {
    let b: LinkBudget = serde_json::from_str("{}").unwrap();
    assert_eq!(b, LinkBudget::default());
    let s = latency_sweep(&b, &LinkGeometry::default(), &EarthModel::default(), 1..=10, 0.05).unwrap();
    assert_eq!(s.rows.len(), 10);
    assert!(s.rows.windows(2).all(|w| w[1].total_s <= w[0].total_s));
}
