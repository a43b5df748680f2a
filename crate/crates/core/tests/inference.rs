use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varskip_core::armodel::{ArModel, MaskMode, ModelConfig, Ordering};
use varskip_core::data::{Column, Table, Vocab};
use varskip_core::inference::{
    ensemble_estimate, forward_pass_cost, naive_sample, naive_sample_query, progressive_sample, ConditionalModel,
    CountingModel, EmpiricalModel, RangeQuery, Region,
};
use varskip_core::Error;

fn hand_table() -> Table {
    let rows: Vec<u32> =
        [[0, 0, 0], [0, 1, 0], [0, 1, 1], [1, 2, 1], [1, 3, 0], [2, 0, 1], [2, 2, 1], [1, 2, 0]].concat();
    let columns = [3, 4, 2]
        .iter()
        .enumerate()
        .map(|(i, &v)| Column { name: format!("c{i}"), vocab: Vocab::integer_range(v) })
        .collect();
    Table::new("hand", columns, rows).unwrap()
}

fn scan(table: &Table, q: &RangeQuery) -> f64 {
    table.iter_rows().filter(|r| q.matches(r)).count() as f64 / table.n_rows() as f64
}

fn random_query(vocab: &[usize], rng: &mut ChaCha8Rng) -> RangeQuery {
    let mut q = RangeQuery::unconstrained(vocab.len());
    for (c, &v) in vocab.iter().enumerate() {
        if rng.random_bool(0.6) {
            let a = rng.random_range(0..v as u32);
            let b = rng.random_range(0..v as u32);
            q.constrain(c, Region::Interval { lo: a.min(b), hi: a.max(b) });
        }
    }
    q
}

#[test]
fn progressive_sampling_is_unbiased_under_exact_conditionals() {
    let table = hand_table();
    let vocab = table.vocab_sizes();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    for qi in 0..10 {
        let q = random_query(&vocab, &mut rng);
        let truth = scan(&table, &q);
        let ordering = Ordering::random(3, qi);
        let model = EmpiricalModel::new(table.clone(), ordering).unwrap();
        for skipping in [false, true] {
            let est = progressive_sample(&model, &q, 20_000, skipping, &mut rng).unwrap();
            let gap = (est.selectivity - truth).abs();
            assert!(
                gap <= 3.0 * est.std_error + 1e-12,
                "query {qi} skip={skipping}: {} vs {truth} (se {})",
                est.selectivity,
                est.std_error
            );
            assert!(est.weights.as_ref().unwrap().iter().all(|w| (0.0..=1.0).contains(w)));
        }
    }
}

#[test]
fn unconstrained_query_costs_nothing() {
    let model = EmpiricalModel::new(hand_table(), Ordering::identity(3)).unwrap();
    let counted = CountingModel::new(&model);
    let q = RangeQuery::unconstrained(3).with(1, Region::Interval { lo: 0, hi: 3 });
    let est = progressive_sample(&counted, &q, 500, true, &mut ChaCha8Rng::seed_from_u64(0)).unwrap();
    assert_eq!(est.selectivity, 1.0);
    assert_eq!(est.forward_passes, 0);
    assert_eq!(counted.passes(), 0);
}

#[test]
fn measured_passes_match_the_cost_formula() {
    let vocab = [5, 3, 8, 4, 6, 2, 7, 3];
    let n = vocab.len();
    let mut model = ArModel::new(
        &vocab,
        ModelConfig { hidden: 16, d_emb: 4, ..ModelConfig::default() },
        vec![Ordering::random(n, 4)],
    )
    .unwrap();
    model.set_mask_mode(MaskMode::Random);
    let prepared = model.prepare(0).unwrap();
    let counted = CountingModel::new(&prepared);
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..100 {
        let q = random_query(&vocab, &mut rng);
        let budget = rng.random_range(1..40);
        for skipping in [false, true] {
            counted.reset();
            let est = progressive_sample(&counted, &q, budget, skipping, &mut rng).unwrap();
            let expect = (budget * forward_pass_cost(&q, &vocab, prepared.ordering(), skipping)) as u64;
            assert_eq!(counted.passes(), expect);
            assert_eq!(est.forward_passes, expect);
        }
    }
}

#[test]
fn skipping_drops_the_unconstrained_prefix() {
    // Ordering age, salary, city with a constraint on salary only.
    let rows: Vec<Vec<String>> =
        [["30", "40", "Oslo"], ["45", "60", "Rome"], ["52", "75", "Oslo"], ["28", "55", "Lima"]]
            .iter()
            .map(|r| r.iter().map(|s| s.to_string()).collect())
            .collect();
    let table = Table::from_raw_rows("people", &["age", "salary", "city"], &rows).unwrap();
    let salary = &table.columns()[1].vocab;
    let q = RangeQuery::unconstrained(3)
        .with(1, Region::Interval { lo: salary.count_less_equal("50") as u32, hi: salary.size() as u32 - 1 });
    let model = CountingModel::new(EmpiricalModel::new(table, Ordering::identity(3)).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let plain = progressive_sample(&model, &q, 100, false, &mut rng).unwrap();
    assert_eq!(plain.forward_passes, 200);
    let skip = progressive_sample(&model, &q, 100, true, &mut rng).unwrap();
    assert_eq!(skip.forward_passes, 100);
    // Salary is the first constrained position under MASK_age: the mass is exact.
    assert!((skip.selectivity - 0.75).abs() < 1e-12);
    assert_eq!(skip.std_error, 0.0);
}

#[test]
fn dead_ends_give_zero_weight() {
    // c1 == 3 never co-occurs with c0 == 0.
    let model = EmpiricalModel::new(hand_table(), Ordering::identity(3)).unwrap();
    let q = RangeQuery::unconstrained(3).with(0, Region::point(0)).with(1, Region::point(3));
    let est = progressive_sample(&model, &q, 300, false, &mut ChaCha8Rng::seed_from_u64(2)).unwrap();
    assert_eq!(est.selectivity, 0.0);
    assert_eq!(est.forward_passes, 600);
}

#[test]
fn errors() {
    let model = EmpiricalModel::new(hand_table(), Ordering::identity(3)).unwrap();
    let q = RangeQuery::unconstrained(3).with(0, Region::point(0));
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(progressive_sample(&model, &q, 0, false, &mut rng), Err(Error::ZeroBudget(0)));
    assert!(naive_sample(&model, |_| true, 0, &mut rng).is_err());
    let base = ArModel::new(
        &[3, 4, 2],
        ModelConfig { hidden: 8, d_emb: 2, ..ModelConfig::default() },
        vec![Ordering::identity(3)],
    )
    .unwrap();
    let prepared = base.prepare(0).unwrap();
    assert_eq!(progressive_sample(&prepared, &q, 10, true, &mut rng), Err(Error::SkippingUnsupported));
    assert!(progressive_sample(&prepared, &q, 10, false, &mut rng).is_ok());
    let bad = RangeQuery::unconstrained(3).with(2, Region::point(2));
    assert!(matches!(progressive_sample(&model, &bad, 10, false, &mut rng), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn naive_sampling() {
    let table = hand_table();
    let model = CountingModel::new(EmpiricalModel::new(table.clone(), Ordering::random(3, 2)).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    assert_eq!(naive_sample(&model, |_| true, 100, &mut rng).unwrap().selectivity, 1.0);
    assert_eq!(naive_sample(&model, |_| false, 100, &mut rng).unwrap().selectivity, 0.0);
    assert_eq!(model.passes(), 600);
    for _ in 0..10 {
        let q = random_query(&table.vocab_sizes(), &mut rng);
        let truth = scan(&table, &q);
        let est = naive_sample_query(&model, &q, 20_000, &mut rng).unwrap();
        assert!((est.selectivity - truth).abs() <= 3.0 * est.std_error + 1e-12, "{} vs {truth}", est.selectivity);
    }
}

#[test]
fn ensembles() {
    let table = hand_table();
    let members: Vec<EmpiricalModel> =
        Ordering::random_set(3, 4, 6).into_iter().map(|o| EmpiricalModel::new(table.clone(), o).unwrap()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let q = RangeQuery::unconstrained(3).with(0, Region::Interval { lo: 1, hi: 2 }).with(2, Region::point(1));
    let truth = scan(&table, &q);

    let single = ensemble_estimate(&members[..1], &q, 777, true, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    let direct = progressive_sample(&members[0], &q, 777, true, &mut ChaCha8Rng::seed_from_u64(4)).unwrap();
    assert_eq!(single, direct);

    let est = ensemble_estimate(&members, &q, 20_002, false, &mut rng).unwrap();
    assert!((est.selectivity - truth).abs() <= 3.0 * est.std_error + 1e-12);
    let per: usize = members
        .iter()
        .enumerate()
        .map(|(i, m)| {
            let share = 20_002 / 4 + usize::from(i < 2);
            share * forward_pass_cost(&q, m.vocab_sizes(), m.ordering(), false)
        })
        .sum();
    assert_eq!(est.forward_passes, per as u64);

    // Members that agree exactly give that value.
    let unc = RangeQuery::unconstrained(3);
    assert_eq!(ensemble_estimate(&members, &unc, 8, true, &mut rng).unwrap().selectivity, 1.0);
    assert!(ensemble_estimate(&members, &q, 3, true, &mut rng).is_err());
}
