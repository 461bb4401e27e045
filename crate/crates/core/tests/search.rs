use ame_phase::field::FieldSpec;
use ame_phase::oracle::{duality_report, DEFAULT_CAP};
use ame_phase::phasecore::{certify_ame, cost};
use ame_phase::search::{run_search, SearchConfig, Termination};

fn config(n: usize, field: FieldSpec, seed: u64) -> SearchConfig {
    let mut cfg = SearchConfig::new(n, field);
    cfg.guide_probability = 0.0;
    cfg.rng_seed = seed;
    cfg
}

#[test]
fn search_descends_to_a_certificate() {
    // Seeds whose random starting matrices are all short of AME.
    for (n, p, seed) in [(6, 2, 1), (7, 3, 2), (8, 5, 2)] {
        let r = run_search(config(n, FieldSpec::Prime { p }, seed)).unwrap();
        assert_eq!(r.terminated_by, Termination::CostZero, "({n},{p})");
        assert!(r.steps_taken > 0, "({n},{p})");
        assert!(r.cost_trace.first().unwrap().best_cost > 0, "({n},{p})");
        assert_eq!(cost(&r.best).unwrap(), 0);
        assert!(certify_ame(&r.best).unwrap().is_ame);
    }
}

#[test]
fn extension_field_search_is_oracle_verified() {
    let r = run_search(config(4, FieldSpec::prime_power(2, 2).unwrap(), 3)).unwrap();
    assert_eq!(r.best_cost, 0);
    let oracle = duality_report(&r.best, 1e-10, DEFAULT_CAP).unwrap();
    assert!(oracle.passed() && oracle.is_ame);
}

#[test]
fn cost_trace_is_monotone() {
    let r = run_search(config(5, FieldSpec::Prime { p: 2 }, 7)).unwrap();
    for w in r.cost_trace.windows(2) {
        assert!(w[1].step >= w[0].step);
        assert!(w[1].best_cost < w[0].best_cost);
    }
    assert_eq!(r.cost_trace.last().unwrap().best_cost, r.best_cost);
}
