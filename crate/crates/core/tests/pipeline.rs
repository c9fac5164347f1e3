use proptest::prelude::*;
use tailmass::bayesnet::{random_network, BayesNet, CptRegime};
use tailmass::contmodel::ContinuousExemplar;
use tailmass::gcurve::{tabulate, MassCurve, Provenance, StepCurve};
use tailmass::tailfit::{
    algorithm_ii_sorted, fit_tail, select_threshold, FitConfig, RobustMethod, ThresholdRule,
};

#[test]
fn network_file_to_tail_fit() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("net.json");
    let net = random_network(15, 2, 3, CptRegime::UnitUniform, 42).unwrap();
    net.write(&path).unwrap();
    let back = BayesNet::read(&path).unwrap();
    assert_eq!(back, net);

    let sample = back.logic_sample(1000, 42).unwrap();
    let u = select_threshold(&sample, ThresholdRule::default()).unwrap();
    for robust in [RobustMethod::Median, RobustMethod::Lms] {
        let fit = fit_tail(&sample, u, &FitConfig::with_robust(robust)).unwrap();
        assert_eq!(fit.m, 50);
        assert_eq!(fit.pairs.len(), 50 - 5 - 1);
        assert!(fit.usable_pairs() >= 3);
        assert_eq!(fit.model.provenance(), Provenance::TailModel);
        assert_eq!(fit.model.g(u).unwrap(), sample.empirical_g(u));
    }
}

#[test]
fn tabulated_curves_carry_provenance() {
    let net = random_network(10, 2, 3, CptRegime::Extreme, 1).unwrap();
    let grid = [1e-6, 1e-4, 1e-2, 0.5];
    let exact = tabulate(&StepCurve::exact(&net).unwrap(), &grid).unwrap();
    assert!(exact.iter().all(|p| p.provenance == Provenance::ExactEnum));
    let model = ContinuousExemplar::new(1.0).unwrap();
    let closed = tabulate(&model, &grid).unwrap();
    assert!(closed
        .iter()
        .all(|p| p.provenance == Provenance::ExactClosedForm));
    assert!((closed[2].mass - model.exact_g(1e-2).unwrap()).abs() == 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fit_is_scale_equivariant(seed in 0u64..1000, log_scale in -6.0f64..6.0) {
        let scale = 10f64.powf(log_scale);
        let (_, sample) = ContinuousExemplar::new(1.0).unwrap().sample(600, seed).unwrap();
        let u = sample.values()[60];
        let config = FitConfig::default();
        let (base, _) = algorithm_ii_sorted(sample.values(), sample.mode(), u, &config).unwrap();
        let scaled: Vec<f64> = sample.values().iter().map(|p| p * scale).collect();
        let (fit, _) = algorithm_ii_sorted(&scaled, sample.mode(), u * scale, &config).unwrap();
        prop_assert!((fit.delta() / (base.delta() * scale) - 1.0).abs() <= 1e-9);
        prop_assert!((fit.alpha() / base.alpha() - 1.0).abs() <= 1e-9);
    }
}
