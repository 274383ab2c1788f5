use uq_core::datasets::{generate_toy, read_csv, ToyConfig, ToyMode};
use uq_core::evaluation::{
    confidence_performance, curve_experiment, default_fractions, detection_auc, Method, MethodConfig, Origin,
    ScoredPredictions, Splits, TrainedMethod,
};
use uq_core::metrics::auc_roc;
use uq_core::numeric::SeededRng;

fn toy_splits(mode: ToyMode, seed: u64) -> Splits {
    let cfg = ToyConfig::new(mode);
    let rng = SeededRng::new(seed);
    Splits {
        train: generate_toy(&cfg, &mut rng.split("train")),
        val: generate_toy(&cfg, &mut rng.split("val")),
        test: generate_toy(&ToyConfig { n_train: 800, ..cfg }, &mut rng.split("test")),
    }
}

#[test]
fn every_method_separates_the_toy_classes() {
    let splits = toy_splits(ToyMode::Balanced, 11);
    let rng = SeededRng::new(11);
    for method in Method::ALL.into_iter().filter(|m| m.has_classifier()) {
        let trained = TrainedMethod::train(method, &splits.train, &splits.val, &MethodConfig::toy(), &rng).unwrap();
        let scores = trained.score(splits.test.features(), &rng).unwrap();
        let auc = auc_roc(&scores.probabilities, splits.test.labels()).unwrap();
        assert!(auc > 0.9, "{method}: {auc}");
    }
}

#[test]
fn serialized_model_scores_identically() {
    let splits = toy_splits(ToyMode::Balanced, 5);
    let rng = SeededRng::new(5);
    let trained =
        TrainedMethod::train(Method::McDropout, &splits.train, &splits.val, &MethodConfig::toy(), &rng).unwrap();
    let back: TrainedMethod = serde_json::from_str(&serde_json::to_string(&trained).unwrap()).unwrap();
    let a = trained.score(splits.test.features(), &rng).unwrap();
    let b = back.score(splits.test.features(), &rng).unwrap();
    assert_eq!(a, b);
}

#[test]
fn curve_covers_all_fractions_and_ends_on_full_set() {
    let splits = toy_splits(ToyMode::Unbalanced, 2);
    let curves = curve_experiment(&splits, &[Method::NnEnsemble], &MethodConfig::toy(), &default_fractions(), &SeededRng::new(2))
        .unwrap();
    let points = &curves[0].points;
    assert_eq!(points.len(), 11);
    assert_eq!(points.last().unwrap().included, splits.test.len());
    assert!(points.windows(2).all(|w| w[0].included <= w[1].included));
    assert_eq!(curves[0].ece_platt.len(), 11);
}

#[test]
fn vae_novelty_flags_far_points() {
    let splits = toy_splits(ToyMode::Balanced, 9);
    let rng = SeededRng::new(9);
    let vae = TrainedMethod::train(Method::Vae, &splits.train, &splits.val, &MethodConfig::toy(), &rng).unwrap();
    let near = vae.score(splits.test.features(), &rng).unwrap().uncertainty;
    let far_points = splits.test.features().map(|v| v * 6.0 + 30.0);
    let far = vae.score(&far_points, &rng).unwrap().uncertainty;
    assert!(detection_auc(&near, &far).unwrap() > 0.99);
}

#[test]
fn csv_data_runs_through_scoring() {
    let mut text = String::from("age,visits,label\n");
    let mut rng = SeededRng::new(0);
    for _ in 0..300 {
        let y = u8::from(rng.uniform() < 0.4);
        text.push_str(&format!("{},{},{y}\n", 40.0 + 10.0 * rng.normal() + 15.0 * f64::from(y), rng.index(5)));
    }
    let data = read_csv(text.as_bytes(), "label").unwrap();
    assert_eq!(data.feature_names(), ["age", "visits"]);
    let splits = Splits::stratified(&data, Default::default(), &mut rng).unwrap();
    let trained =
        TrainedMethod::train(Method::BootstrapLr, &splits.train, &splits.val, &MethodConfig::default(), &rng).unwrap();
    let s = trained.score(splits.test.features(), &rng).unwrap();
    let sp = ScoredPredictions::new(Method::BootstrapLr, Origin::Test, s.probabilities, s.uncertainty, splits.test.labels().to_vec())
        .unwrap();
    let curve = confidence_performance(&sp, &[0.5, 1.0]).unwrap();
    assert!(curve[1].auc.unwrap() > 0.75);
}
