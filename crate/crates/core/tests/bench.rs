use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{Binomial, DiscreteCDF};
use varskip_core::armodel::Ordering;
use varskip_core::bench::{
    exact_count, exact_selectivity, gen_workload, q_error, run_bench, summarize, Estimator, ModelSet, Op, QueryResult,
    QueryRunner, Sequential, WorkloadSpec,
};
use varskip_core::data::{synth_table, Column, SynthSpec, Table, Vocab};
use varskip_core::inference::{format_query, parse_query, EmpiricalModel, RangeQuery, Region};
use varskip_core::{Error, Result};

fn hand_table() -> Table {
    let rows: Vec<u32> =
        [[0, 0, 0], [0, 1, 0], [0, 1, 1], [1, 2, 1], [1, 3, 0], [2, 0, 1], [2, 2, 1], [1, 2, 0]].concat();
    let columns = [3, 4, 2]
        .iter()
        .enumerate()
        .map(|(i, &v)| Column { name: format!("col{i}"), vocab: Vocab::integer_range(v) })
        .collect();
    Table::new("hand", columns, rows).unwrap()
}

fn small_synth() -> Table {
    synth_table(&SynthSpec::with_random_domains(6, 3, 9, 2000, 2, 0.1, 4)).unwrap()
}

#[test]
fn scan_oracle_on_hand_table() {
    let t = hand_table();
    let q = parse_query("col0 == 1 AND col1 <= 2", t.columns()).unwrap();
    // Rows (1,2,1) and (1,2,0) qualify; (1,3,0) does not.
    assert_eq!(exact_count(&t, &q), 2);
    assert_eq!(exact_selectivity(&t, &q), 0.25);
    assert_eq!(exact_selectivity(&t, &RangeQuery::unconstrained(3)), 1.0);
    let impossible = RangeQuery::unconstrained(3).with(0, Region::point(0)).with(1, Region::point(3));
    assert_eq!(exact_count(&t, &impossible), 0);
}

#[test]
fn workloads_are_deterministic_and_nonempty() {
    let t = small_synth();
    let spec = WorkloadSpec::new(50, 7);
    let a = gen_workload(&t, &spec).unwrap();
    let b = gen_workload(&t, &spec).unwrap();
    assert_eq!(a, b);
    let text_a: Vec<String> = a.iter().map(|q| format_query(q, t.columns()).unwrap()).collect();
    let text_b: Vec<String> = b.iter().map(|q| format_query(q, t.columns()).unwrap()).collect();
    assert_eq!(text_a, text_b);
    assert_ne!(a, gen_workload(&t, &WorkloadSpec::new(50, 8)).unwrap());
    for q in &a {
        assert!(exact_count(&t, q) >= 1);
        let k = q.regions().iter().filter(|r| r.is_some()).count();
        assert!((5..=6).contains(&k));
    }
}

#[test]
fn full_width_equality_workloads() {
    let t = small_synth();
    let spec = WorkloadSpec { min_constraints: 6, max_constraints: 6, ops: vec![Op::Eq], ..WorkloadSpec::new(30, 1) };
    for q in gen_workload(&t, &spec).unwrap() {
        assert!(q.regions().iter().all(|r| matches!(r, Some(Region::Interval { lo, hi }) if lo == hi)));
        assert!(exact_selectivity(&t, &q) >= 1.0 / t.n_rows() as f64);
    }
    let bad = WorkloadSpec { min_constraints: 0, ..WorkloadSpec::new(1, 1) };
    assert!(gen_workload(&t, &bad).is_err());
    // Clamped to the table width.
    let wide = WorkloadSpec { min_constraints: 20, max_constraints: 30, ..WorkloadSpec::new(3, 1) };
    for q in gen_workload(&t, &wide).unwrap() {
        assert!(q.regions().iter().all(Option::is_some));
    }
}

#[test]
fn clamp_examples() {
    let m = 1000.0;
    assert_eq!(q_error(2.0 / m, 8.0 / m, 1.0 / m).unwrap(), 4.0);
    assert!((q_error(0.0, 5.0 / m, 1.0 / m).unwrap() - 5.0).abs() < 1e-12);
    assert_eq!(q_error(0.0, 0.0, 1.0 / m).unwrap(), 1.0);
    assert!(matches!(q_error(-1.0, 0.1, 0.01), Err(Error::InvalidNumber(_))));
}

#[test]
fn bootstrap_median_spread_matches_binomial_reference() {
    // 101 values: 50 twos and 51 ones. A resample's median (rank 51) is 2
    // exactly when it holds more than 50 twos, so the median is a Bernoulli
    // variable with known success probability and standard deviation.
    let n = 101u64;
    let twos = 50u64;
    let values: Vec<f64> = (0..n).map(|i| if i < twos { 2.0 } else { 1.0 }).collect();
    let dist = Binomial::new(twos as f64 / n as f64, n).unwrap();
    let q = 1.0 - dist.cdf(50);
    let reference = (q * (1.0 - q)).sqrt();
    let s = summarize(&values, 1000, &mut ChaCha8Rng::seed_from_u64(17)).unwrap();
    let rel = (s.median_std - reference).abs() / reference;
    assert!(rel <= 0.10, "bootstrap {} vs reference {reference}", s.median_std);
}

fn stub_sets(table: &Table, k: usize) -> Vec<ModelSet<EmpiricalModel>> {
    (0..k)
        .map(|r| {
            let order = Ordering::random(table.n_cols(), r as u64);
            let m = EmpiricalModel::new(table.clone(), order.clone()).unwrap();
            ModelSet {
                baseline: Some(m.clone()),
                masked: Some(m.clone()),
                multi: Ordering::random_set(table.n_cols(), 2, 10 + r as u64)
                    .into_iter()
                    .map(|o| EmpiricalModel::new(table.clone(), o).unwrap())
                    .collect(),
            }
        })
        .collect()
}

struct Reversed;

impl QueryRunner for Reversed {
    fn run_all(&self, n: usize, f: &(dyn Fn(usize) -> Result<QueryResult> + Sync)) -> Result<Vec<QueryResult>> {
        let mut out: Vec<QueryResult> = (0..n).rev().map(f).collect::<Result<_>>()?;
        out.reverse();
        Ok(out)
    }
}

#[test]
fn report_shape_and_runner_independence() {
    let t = hand_table();
    let spec = WorkloadSpec { min_constraints: 1, max_constraints: 3, ..WorkloadSpec::new(6, 2) };
    let workload = gen_workload(&t, &spec).unwrap();
    let truths: Vec<f64> = workload.iter().map(|q| exact_selectivity(&t, q)).collect();
    let sets = stub_sets(&t, 2);
    let budgets = [10, 100];
    let report = run_bench(&sets, &workload, &truths, t.n_rows(), &budgets, &Estimator::ALL, 5, &Sequential).unwrap();
    assert_eq!(report.rows.len(), budgets.len() * Estimator::ALL.len() * sets.len());
    for row in &report.rows {
        assert!(row.summary.median <= row.summary.p99 && row.summary.p99 <= row.summary.max);
        assert!(row.queries.iter().all(|q| q.q_error >= 1.0));
    }
    let again = run_bench(&sets, &workload, &truths, t.n_rows(), &budgets, &Estimator::ALL, 5, &Reversed).unwrap();
    assert_eq!(report, again);
}

#[test]
fn exact_stub_with_large_budget_is_nearly_exact() {
    let t = hand_table();
    let q = parse_query("col0 >= 1 AND col2 == 1", t.columns()).unwrap();
    let truth = exact_selectivity(&t, &q);
    let sets = stub_sets(&t, 1);
    let report = run_bench(
        &sets,
        &[q],
        &[truth],
        t.n_rows(),
        &[50_000],
        &[Estimator::Skipping, Estimator::Baseline],
        1,
        &Sequential,
    )
    .unwrap();
    for row in &report.rows {
        assert!(row.summary.max < 1.03, "{:?}", row.summary);
    }
}

#[test]
fn missing_flavors_are_reported() {
    let t = hand_table();
    let q = RangeQuery::unconstrained(3).with(0, Region::point(1));
    let sets = vec![ModelSet {
        baseline: Some(EmpiricalModel::new(t.clone(), Ordering::identity(3)).unwrap()),
        ..ModelSet::default()
    }];
    let err = run_bench(&sets, &[q], &[0.375], 8, &[10], &[Estimator::Skipping], 0, &Sequential).unwrap_err();
    assert!(matches!(err, Error::EstimatorMismatch { .. }));
}

proptest! {
    #[test]
    fn q_error_is_symmetric_and_at_least_one(a in 0.0f64..1.0, b in 0.0f64..1.0, m in 1usize..1_000_000) {
        let floor = 1.0 / m as f64;
        let x = q_error(a, b, floor).unwrap();
        prop_assert!(x >= 1.0);
        prop_assert_eq!(x, q_error(b, a, floor).unwrap());
    }

    #[test]
    fn quantiles_are_ordered(v in prop::collection::vec(1.0f64..1e4, 1..300), seed in 0u64..1000) {
        let s = summarize(&v, 50, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert!(s.median <= s.p99 && s.p99 <= s.max);
        prop_assert!(s.median_std >= 0.0 && s.p99_std >= 0.0 && s.max_std >= 0.0);
    }
}
