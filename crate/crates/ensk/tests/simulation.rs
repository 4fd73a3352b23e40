use ensk::seed::derive_seed;
use ensk::simulation::*;
use ensk_core::energy::best_subset_exhaustive;
use ensk_core::search::Strategy;
use ensk_core::EnergyModel;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Beta;

#[test]
fn conditional_exponential_mean_cost() {
    let beta = Beta::new(17.0, 5.0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let n = 100_000;
    let mean = (0..n).map(|_| draw_member(&beta, TimeModel::ConditionalExponential, &mut rng).1).sum::<f64>() / n as f64;
    // E[1/(1-p)] = (alpha + beta - 1) / (beta - 1)
    assert!((mean / 5.25 - 1.0).abs() < 0.02, "{mean}");
}

#[test]
fn generated_pools() {
    let spec = PoolGeneratorSpec { n: 30, alpha_p: 17.0, beta_p: 5.0, time_model: TimeModel::ConditionalExponential, seed: 7 };
    let a = generate_pool(&spec).unwrap();
    assert_eq!(a, generate_pool(&spec).unwrap());
    assert_ne!(a, generate_pool(&PoolGeneratorSpec { seed: 8, ..spec }).unwrap());
    assert_eq!(a.len(), 30);
    assert_eq!(a.members()[0].id, "m1");
    assert!(a.members().iter().all(|m| m.accuracy > 0.0 && m.accuracy < 1.0 && m.cost > 0.0));
    let flat = generate_pool(&PoolGeneratorSpec { time_model: TimeModel::None, ..spec }).unwrap();
    assert!(flat.costs().iter().all(|&t| t == 1.0));
    assert!(generate_pool(&PoolGeneratorSpec { n: 0, ..spec }).is_err());
    assert!(generate_pool(&PoolGeneratorSpec { alpha_p: -1.0, ..spec }).is_err());
}

#[test]
fn seeds_are_spread() {
    let seeds: std::collections::BTreeSet<u64> = (0..10_000).map(|i| derive_seed(1, i)).collect();
    assert_eq!(seeds.len(), 10_000);
    assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
}

#[test]
fn adversarial_pool_optimum_is_the_single_expensive_member() {
    let (pool, budget) = adversarial_pool(15, 0.1, 0.05).unwrap();
    assert_eq!(pool.len(), 15);
    assert!((pool.total_cost() - 1.0 - 14.0 / 15.0).abs() < 1e-12);
    let best = best_subset_exhaustive(&pool, budget, &EnergyModel::PlainMajority).unwrap();
    assert_eq!(best.ids(&pool), vec!["d1"]);
    assert!((best.energy() - 0.9).abs() < 1e-15);
    assert!(adversarial_pool(1, 0.1, 0.05).is_err());
    assert!(adversarial_pool(15, 0.6, 0.05).is_err());
}

#[test]
fn mc_vs_sa_small_run() {
    let cfg = McVsSaConfig { replicates: 12, ..McVsSaConfig::canonical(3) };
    let report = run_mc_vs_sa_experiment(&cfg).unwrap();
    assert_eq!(report.records.len(), 24);
    for s in [Strategy::MonteCarlo, Strategy::SimulatedAnnealing] {
        let cell = report.cell(s, RunMode::MaxStep).unwrap();
        assert_eq!(cell.runs, 12);
        assert_eq!(cell.steps_mean, MC_VS_SA_STEPS as f64);
        assert!(cell.precision.is_some());
    }
    assert_eq!(report.runs_csv().lines().count(), 25);
}

#[test]
fn replicates_do_not_depend_on_thread_count() {
    let cfg = McVsSaConfig { replicates: 16, ..McVsSaConfig::canonical(5) };
    let run = |threads| {
        rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .unwrap()
            .install(|| run_mc_vs_sa_experiment(&cfg).unwrap().runs_csv())
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn od_setup_matches_reported_values() {
    let s = od_setup(OD_FRACTION).unwrap();
    let d = s.rule.derivation.as_ref().unwrap();
    assert_eq!(d.energy.ell_hat, 7);
    assert!((s.constrained_mean - 0.969).abs() < 0.005, "{}", s.constrained_mean);
    assert!((s.curve.a / -3.43 - 1.0).abs() < 0.15);
    assert!((s.curve.b / 101.7 - 1.0).abs() < 0.15);
    assert!((s.budget.total() - 240.8).abs() < 1e-9);
    assert!(od_setup(0.0).is_err());
}

#[test]
fn small_table2_run() {
    let cfg = Table2Config { replicates: 3, maxstep_cap: 300, ..Table2Config::canonical(30, 1) };
    let report = run_table2_experiment(&cfg).unwrap();
    assert_eq!(report.experiment, "table2-n30");
    assert_eq!(report.cells.len(), 4);
    for s in [Strategy::SimulatedAnnealing, Strategy::Sherlock] {
        let stop = report.cell(s, RunMode::Stop).unwrap();
        let full = report.cell(s, RunMode::MaxStep).unwrap();
        assert!(stop.steps_mean <= full.steps_mean);
        assert!(full.energy_mean >= stop.energy_mean - 1e-12);
        assert_eq!(full.terminated.max_step, 3);
    }
    assert!(run_table2_experiment(&Table2Config { replicates: 0, ..cfg.clone() }).is_err());
}

#[test]
fn reports_write_three_files() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_od_experiment(&OdConfig { replicates: 4, record_traces: true, ..OdConfig::canonical(1) }).unwrap();
    let files = report.write_to(dir.path()).unwrap();
    let names: Vec<String> = files.iter().map(|p| p.file_name().unwrap().to_string_lossy().into_owned()).collect();
    assert_eq!(names, ["od.json", "od_runs.csv", "od_traces.csv"]);
    let traces = std::fs::read_to_string(&files[2]).unwrap();
    assert!(traces.starts_with("replicate,strategy,mode,step,energy\n"));
    assert!(traces.lines().count() > 1);
}
