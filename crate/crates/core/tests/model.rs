use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use varskip_core::armodel::{apply_mask_plans, sample_mask_plan, ArModel, MaskMode, ModelConfig, Ordering};
use varskip_core::numeric::{grad_check, DenseMatrix};
use varskip_core::Error;

fn small_config(orders: usize) -> ModelConfig {
    ModelConfig { blocks: 3, hidden: 16, d_emb: 4, orders, tied_embeddings: false, seed: 11 }
}

fn random_batch(vocab: &[usize], batch: usize, rng: &mut ChaCha8Rng) -> Vec<u32> {
    (0..batch).flat_map(|_| vocab.iter().map(|&v| rng.random_range(0..v as u32)).collect::<Vec<_>>()).collect()
}

fn check_gradients(vocab: &[usize], cfg: ModelConfig, mode: MaskMode) {
    let orderings = Ordering::random_set(vocab.len(), cfg.orders, 5);
    let mut model = ArModel::new(vocab, cfg, orderings).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    // Biases start at zero; move them so ReLU kinks are not sitting at zero.
    for p in model.params_mut().iter_mut() {
        *p += rng.random_range(-0.05..0.05);
    }
    let batch = 6;
    let targets = random_batch(vocab, batch, &mut rng);
    let mut inputs = targets.clone();
    let plans: Vec<_> = (0..batch).map(|_| sample_mask_plan(&mut rng, &model.orderings()[0], mode)).collect();
    apply_mask_plans(&mut inputs, vocab.len(), &plans, &model.mask_indices());
    for k in 0..model.orderings().len() {
        let (_, grads) = model.prepare(k).unwrap().loss_and_grads(&inputs, &targets, batch).unwrap();
        let mut probe = model.clone();
        let report = grad_check(
            model.params(),
            &grads,
            |theta| {
                probe.params_mut().copy_from_slice(theta);
                probe.prepare(k).unwrap().loss_and_grads(&inputs, &targets, batch).unwrap().0
            },
            1e-5,
            400,
            k as u64,
        );
        assert!(report.checked >= 200);
        assert!(report.passed(1e-6), "ordering {k}: {report:?}");
    }
}

#[test]
fn analytic_gradients_match_central_differences() {
    check_gradients(&[3, 5, 8, 2], small_config(1), MaskMode::Random);
}

#[test]
fn multi_order_gradients_include_order_weights() {
    check_gradients(&[4, 2, 7, 3], small_config(2), MaskMode::Random);
}

#[test]
fn tied_embedding_gradients() {
    let cfg = ModelConfig { tied_embeddings: true, ..small_config(1) };
    check_gradients(&[5, 5, 5, 5], cfg, MaskMode::Prefix);
}

#[test]
fn column_logits_ignore_later_positions() {
    let vocab = [4, 6, 3, 5, 2, 7];
    let n = vocab.len();
    let d = 4;
    for seed in 0..3u64 {
        let ordering = Ordering::random(n, seed);
        let model = ArModel::new(&vocab, ModelConfig { seed, ..small_config(1) }, vec![ordering.clone()]).unwrap();
        let prepared = model.prepare(0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let batch = 5;
        let feats: Vec<f64> = (0..batch * n * d).map(|_| rng.random_range(-1.0..1.0)).collect();
        let base = prepared.logits_from_features(&DenseMatrix::from_vec(batch, n * d, feats.clone()).unwrap()).unwrap();
        for k in 0..n {
            let mut changed = feats.clone();
            for later in k..n {
                let c = ordering.column_at(later);
                for b in 0..batch {
                    for x in &mut changed[b * n * d + c * d..b * n * d + (c + 1) * d] {
                        *x += rng.random_range(-3.0..3.0);
                    }
                }
            }
            let out = prepared.logits_from_features(&DenseMatrix::from_vec(batch, n * d, changed).unwrap()).unwrap();
            let c = ordering.column_at(k);
            assert_eq!(out[c].data(), base[c].data(), "seed {seed} position {k}");
            if k + 1 < n {
                let c2 = ordering.column_at(k + 1);
                assert_ne!(out[c2].data(), base[c2].data(), "position {} should see position {k}", k + 1);
            }
        }
    }
}

#[test]
fn conditionals_are_distributions() {
    let vocab = [3, 9, 4];
    let model = ArModel::new(&vocab, small_config(1), vec![Ordering::random(3, 1)]).unwrap();
    let prepared = model.prepare(0).unwrap();
    let inputs = vec![3, 9, 4, 1, 9, 4, 0, 8, 2];
    for pos in 0..3 {
        let probs = prepared.conditional_probs(&inputs, 3, pos).unwrap();
        let c = prepared.ordering().column_at(pos);
        assert_eq!(probs.cols(), vocab[c]);
        for b in 0..3 {
            let s: f64 = probs.row(b).iter().sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }
    assert!(matches!(prepared.conditional_probs(&inputs, 3, 3), Err(Error::PositionOutOfRange { .. })));
    assert!(matches!(prepared.conditional_probs(&[4, 0, 0], 1, 0), Err(Error::IndexOutOfRange { .. })));
}

#[test]
fn conditional_probs_agree_with_full_forward() {
    let vocab = [5, 3, 6, 4];
    let model = ArModel::new(&vocab, small_config(1), vec![Ordering::random(4, 3)]).unwrap();
    let prepared = model.prepare(0).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let inputs = random_batch(&vocab, 4, &mut rng);
    let logits = prepared.forward_logits(&inputs, 4).unwrap();
    for pos in 0..4 {
        let c = prepared.ordering().column_at(pos);
        let probs = prepared.conditional_probs(&inputs, 4, pos).unwrap();
        for b in 0..4 {
            let row = logits[c].row(b);
            let z: f64 = row.iter().map(|l| l.exp()).sum();
            for (j, l) in row.iter().enumerate() {
                assert!((probs.get(b, j) - l.exp() / z).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn multi_order_parameter_count_stays_close() {
    let vocab = [8, 16, 32, 64, 8, 16, 32, 64, 9, 10];
    let single = ArModel::new(&vocab, ModelConfig::default(), vec![Ordering::identity(10)]).unwrap();
    for orders in [2, 5, 10] {
        let cfg = ModelConfig { orders, ..ModelConfig::default() };
        let multi = ArModel::new(&vocab, cfg, Ordering::random_set(10, orders, 0)).unwrap();
        let ratio = multi.param_count() as f64 / single.param_count() as f64;
        assert!((ratio - 1.0).abs() <= 0.10, "orders {orders}: ratio {ratio}");
        assert!(multi.hidden_width() < single.hidden_width());
    }
}

#[test]
fn narrow_hidden_layers_are_rejected() {
    let cfg = ModelConfig { hidden: 3, ..small_config(1) };
    let err = ArModel::new(&[2, 2, 2, 2, 2, 2], cfg, vec![Ordering::identity(6)]).unwrap_err();
    assert!(matches!(err, Error::HiddenTooNarrow { .. }));
}

#[test]
fn zeroed_network_predicts_uniform() {
    let vocab = [4, 7];
    let mut model = ArModel::new(&vocab, small_config(1), vec![Ordering::identity(2)]).unwrap();
    model.params_mut().fill(0.0);
    let prepared = model.prepare(0).unwrap();
    let nll = prepared.nll_rows(&[1, 2, 4, 7], &[1, 2, 0, 6], 2).unwrap();
    let expect = (4.0f64).ln() + (7.0f64).ln();
    assert!(nll.iter().all(|v| (v - expect).abs() < 1e-12));
}

#[test]
fn rebuilding_from_parts_round_trips() {
    let vocab = [3, 4, 5];
    let model = ArModel::new(&vocab, small_config(2), Ordering::random_set(3, 2, 8)).unwrap();
    let masks: Vec<_> = (0..2).map(|k| model.masks(k).to_vec()).collect();
    let back = ArModel::from_parts(
        &vocab,
        model.config().clone(),
        model.orderings().to_vec(),
        Some(masks),
        model.params().to_vec(),
        model.mask_mode(),
    )
    .unwrap();
    assert_eq!(back, model);
    let short = ArModel::from_parts(
        &vocab,
        model.config().clone(),
        model.orderings().to_vec(),
        None,
        vec![0.0; 3],
        MaskMode::None,
    );
    assert!(matches!(short, Err(Error::ShapeMismatch { .. })));
}
