use mvqn_core::bargmann::TwoModeState;
use mvqn_core::mvqn::*;
use mvqn_core::network::{net_forward, LayerSpec, NetworkModel};
use mvqn_core::qperceptron::*;
use mvqn_core::unity_logic::{csign, sector_value, Sector};
use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn unit(theta: f64) -> Complex64 {
    Complex64::from_polar(1.0, theta)
}

fn weights(n: usize) -> impl Strategy<Value = Vec<Complex64>> {
    prop::collection::vec(
        (-2f64..2.0, -2f64..2.0).prop_map(|(a, b)| Complex64::new(a, b)),
        n + 1,
    )
}

proptest! {
    #[test]
    fn single_sample_hebbian_reproduces_target(
        k in 2u32..9,
        phases in prop::collection::vec(0f64..std::f64::consts::TAU, 1..5),
        j in 0i64..8,
    ) {
        let target = Sector::new(k as i64, j).unwrap();
        let sample = Sample::new(phases.iter().map(|&t| unit(t)).collect(), target).unwrap();
        let ds = Dataset::new(vec![sample.clone()]).unwrap();
        let m = hebbian_init(&ds).unwrap();
        let out = forward(&m, sample.inputs()).unwrap();
        prop_assert_eq!(out.output, target);
        let want = sector_value(target) * (phases.len() as f64 + 1.0);
        prop_assert!((out.weighted_sum - want).norm() < 1e-12);
    }

    #[test]
    fn correction_shifts_sum_by_alpha_delta(
        w in weights(3),
        phases in prop::collection::vec(0f64..std::f64::consts::TAU, 3),
        k in 3u32..9,
        j in 0i64..8,
        alpha in 0.05f64..2.0,
    ) {
        let m = NeuronModel::new(k, w).unwrap();
        let s = Sample::new(phases.iter().map(|&t| unit(t)).collect(), Sector::new(k as i64, j).unwrap()).unwrap();
        let before = forward(&m, s.inputs()).unwrap();
        let delta = sector_value(s.target()) - sector_value(before.output);
        let after = forward(&error_correction_step(&m, &s, alpha).unwrap(), s.inputs()).unwrap();
        prop_assert!((after.weighted_sum - (before.weighted_sum + delta * alpha)).norm() < 1e-12);
    }

    #[test]
    fn correctly_classified_sample_leaves_weights(w in weights(2), phases in prop::collection::vec(0f64..std::f64::consts::TAU, 2), k in 2u32..9) {
        let m = NeuronModel::new(k, w).unwrap();
        let x: Vec<_> = phases.iter().map(|&t| unit(t)).collect();
        let target = forward(&m, &x).unwrap().output;
        let s = Sample::new(x, target).unwrap();
        prop_assert_eq!(error_correction_step(&m, &s, 1.0).unwrap(), m);
    }

    #[test]
    fn matrix_perceptron_contracts_exactly(
        n in 1usize..4,
        seed in any::<u64>(),
        eta_frac in 0.05f64..0.9,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<QubitState> = (0..n).map(|_| random_qubit(&mut rng)).collect();
        let desired = random_qubit(&mut rng);
        let model = PerceptronModel::Matrix((0..n).map(|_| random_matrix(&mut rng)).collect());
        let eta = eta_frac / n as f64;
        let (_, trace) = qp_train(&model, &inputs, &desired, &PerceptronTrainConfig::new(eta, 5)).unwrap();
        let ratio = expected_ratio(eta, n);
        let initial = trace.steps[0].squared_error;
        for (t, s) in trace.steps.iter().enumerate() {
            if let Some(r) = s.contraction_ratio {
                prop_assert!((r - ratio).abs() < 1e-10, "step {} ratio {} want {}", t, r, ratio);
            }
            prop_assert!((s.squared_error - ratio.powi(t as i32) * initial).abs() < 1e-8);
            if t > 0 {
                prop_assert!(s.squared_error <= trace.steps[t - 1].squared_error);
            }
        }
    }

    #[test]
    fn scalar_forward_matches_bargmann_sum(n in 1usize..5, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let inputs: Vec<QubitState> = (0..n).map(|_| random_qubit(&mut rng)).collect();
        let ws: Vec<Complex64> = (0..n).map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
        let y = qp_forward(&PerceptronModel::Scalar(ws.clone()), &inputs).unwrap();
        let mut sum = TwoModeState::zero();
        for (w, x) in ws.iter().zip(&inputs) {
            sum = &sum + &(*w * &qubit_to_bargmann(x));
        }
        prop_assert!((sum.coefficient(1, 0) - y.alpha).norm() < 1e-12);
        prop_assert!((sum.coefficient(0, 1) - y.beta).norm() < 1e-12);
    }

    #[test]
    fn network_outputs_lie_on_unit_circle(seed in any::<u64>(), k in 2u32..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let specs = [LayerSpec { neuron_count: 3, k }, LayerSpec { neuron_count: 2, k }];
        let net = NetworkModel::random(2, &specs, &mut rng).unwrap();
        let x = [unit(rng.random_range(0.0..6.0)), unit(rng.random_range(0.0..6.0))];
        let a = net_forward(&net, &x).unwrap();
        let b = net_forward(&net, &x).unwrap();
        prop_assert_eq!(&a, &b);
        for layer in &a.activations {
            for s in &layer.outputs {
                prop_assert!((sector_value(*s).norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

fn random_qubit(rng: &mut ChaCha8Rng) -> QubitState {
    let v: [f64; 4] = std::array::from_fn(|_| rng.random_range(-1.0..1.0));
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-3);
    QubitState::new(
        Complex64::new(v[0] / norm, v[1] / norm),
        Complex64::new(v[2] / norm, v[3] / norm),
    )
}

fn random_matrix(rng: &mut ChaCha8Rng) -> MatrixWeight {
    let mut c = || Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    MatrixWeight {
        m00: c(),
        m01: c(),
        m10: c(),
        m11: c(),
    }
}

#[test]
fn training_is_deterministic() {
    let rows = [(0, 0, 0), (2, 0, 1), (0, 2, 3), (2, 2, 2)];
    let e = |j| Sector::new(4, j).unwrap();
    let ds = Dataset::new(
        rows.iter()
            .map(|&(a, b, t)| Sample::from_sectors(&[e(a), e(b)], e(t)))
            .collect(),
    )
    .unwrap();
    let cfg = TrainConfig {
        shuffle_seed: Some(99),
        ..TrainConfig::default()
    };
    let m = NeuronModel::random(4, 2, &mut ChaCha8Rng::seed_from_u64(3)).unwrap();
    let a = train(&m, &ds, &cfg).unwrap();
    let b = train(&m, &ds, &cfg).unwrap();
    assert_eq!(a, b);
    for (wa, wb) in a.0.weights().iter().zip(b.0.weights()) {
        assert_eq!(wa.re.to_bits(), wb.re.to_bits());
        assert_eq!(wa.im.to_bits(), wb.im.to_bits());
    }
}

#[test]
fn teacher_labelled_data_is_learned() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for k in 2..=4u32 {
        for n in 1..=2usize {
            let teacher = NeuronModel::random(k, n, &mut rng).unwrap();
            let mut samples = Vec::new();
            for code in 0..k.pow(n as u32) {
                let inputs: Vec<Sector> = (0..n)
                    .map(|i| Sector::new(k as i64, (code / k.pow(i as u32) % k) as i64).unwrap())
                    .collect();
                let x: Vec<Complex64> = inputs.iter().map(|s| s.value()).collect();
                let label = csign(forward(&teacher, &x).unwrap().weighted_sum, k).unwrap();
                samples.push(Sample::from_sectors(&inputs, label));
            }
            let ds = Dataset::new(samples).unwrap();
            let student = NeuronModel::random(k, n, &mut rng).unwrap();
            let cfg = TrainConfig {
                max_epochs: 1000,
                ..TrainConfig::default()
            };
            let (trained, report) = train(&student, &ds, &cfg).unwrap();
            assert!(report.converged, "k={k} n={n}: {report:?}");
            assert_eq!(evaluate(&trained, &ds).unwrap().accuracy, 1.0);
        }
    }
}
