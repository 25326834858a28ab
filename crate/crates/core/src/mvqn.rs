//! The multi-valued neuron.
//!
//! A neuron of order `k` with `n` inputs holds `n + 1` complex weights and
//! outputs `csign(ω_0 + Σ ω_i x_i)`. Learning is either the one-shot
//! Hebbian average or the iterative error-correction rule
//! `W ← W + α/(n+1) · δ · conj(X)` with `δ = ε^target − ε^actual`.

use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::unity_logic::{csign_with, sector_value, ComplexAmplitude, Sector, ZeroPolicy};

/// Tolerance on `|x| = 1` for sample inputs.
pub const UNIT_MODULUS_TOL: f64 = 1e-9;

/// Range of the real and imaginary parts of randomly initialized weights.
pub const INIT_HALF_WIDTH: f64 = 0.5;

#[derive(Debug, Clone, PartialEq)]
pub struct NeuronModel {
    k: u32,
    weights: Vec<ComplexAmplitude>,
}

impl NeuronModel {
    /// `weights[0]` is the bias, followed by one weight per input.
    pub fn new(k: u32, weights: Vec<ComplexAmplitude>) -> Result<Self> {
        if k < 2 {
            return Err(Error::InvalidOrder(k as i64));
        }
        if weights.len() < 2 {
            return Err(Error::Arity {
                expected: 2,
                actual: weights.len(),
            });
        }
        if weights
            .iter()
            .any(|w| !w.re.is_finite() || !w.im.is_finite())
        {
            return Err(Error::NonFinite("neuron weights"));
        }
        Ok(NeuronModel { k, weights })
    }

    pub fn zeros(k: u32, arity: usize) -> Result<Self> {
        Self::new(k, vec![Complex64::new(0.0, 0.0); arity + 1])
    }

    /// Uniform weights with real and imaginary parts in `[-0.5, 0.5]`.
    ///
    /// For `k = 2` the imaginary parts are zeroed: both roots sit on the real
    /// axis, every correction `δ·conj(X)` with real inputs is real, and an
    /// imaginary part in the sum could never be trained away.
    pub fn random<R: Rng + ?Sized>(k: u32, arity: usize, rng: &mut R) -> Result<Self> {
        let weights = (0..=arity)
            .map(|_| {
                let w = random_weight(rng);
                if k == 2 {
                    Complex64::new(w.re, 0.0)
                } else {
                    w
                }
            })
            .collect();
        Self::new(k, weights)
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn arity(&self) -> usize {
        self.weights.len() - 1
    }

    pub fn weights(&self) -> &[ComplexAmplitude] {
        &self.weights
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [ComplexAmplitude] {
        &mut self.weights
    }
}

pub(crate) fn random_weight<R: Rng + ?Sized>(rng: &mut R) -> ComplexAmplitude {
    let re = rng.random_range(-INIT_HALF_WIDTH..=INIT_HALF_WIDTH);
    let im = rng.random_range(-INIT_HALF_WIDTH..=INIT_HALF_WIDTH);
    Complex64::new(re, im)
}

/// One labelled input vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    inputs: Vec<ComplexAmplitude>,
    target: Sector,
}

impl Sample {
    pub fn new(inputs: Vec<ComplexAmplitude>, target: Sector) -> Result<Self> {
        check_unit_inputs(0, &inputs)?;
        Ok(Sample { inputs, target })
    }

    pub fn from_sectors(inputs: &[Sector], target: Sector) -> Self {
        Sample {
            inputs: inputs.iter().map(|s| s.value()).collect(),
            target,
        }
    }

    pub fn inputs(&self) -> &[ComplexAmplitude] {
        &self.inputs
    }

    pub fn target(&self) -> Sector {
        self.target
    }
}

pub(crate) fn check_unit_inputs(sample: usize, inputs: &[ComplexAmplitude]) -> Result<()> {
    for (index, x) in inputs.iter().enumerate() {
        let modulus = x.norm();
        if !((1.0 - UNIT_MODULUS_TOL)..=(1.0 + UNIT_MODULUS_TOL)).contains(&modulus) {
            return Err(Error::NotUnitModulus {
                sample,
                index,
                modulus,
            });
        }
    }
    Ok(())
}

/// Ordered samples sharing arity and target order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
    k: u32,
    arity: usize,
}

impl Dataset {
    pub fn new(samples: Vec<Sample>) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptyDataset)?;
        let (k, arity) = (first.target.order(), first.inputs.len());
        for (i, s) in samples.iter().enumerate() {
            if s.inputs.len() != arity {
                return Err(Error::Arity {
                    expected: arity,
                    actual: s.inputs.len(),
                });
            }
            if s.target.order() != k {
                return Err(Error::OrderMismatch(k, s.target.order()));
            }
            check_unit_inputs(i, &s.inputs)?;
        }
        Ok(Dataset { samples, k, arity })
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn k(&self) -> u32 {
        self.k
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub max_epochs: usize,
    /// Shuffle the sample order every epoch from this seed.
    pub shuffle_seed: Option<u64>,
    pub target_accuracy: f64,
    pub zero_policy: ZeroPolicy,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1.0,
            max_epochs: 100,
            shuffle_seed: None,
            target_accuracy: 1.0,
            zero_policy: ZeroPolicy::FirstSector,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !self.learning_rate.is_finite() || self.learning_rate <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "learning rate {} must be positive",
                self.learning_rate
            )));
        }
        if self.max_epochs < 1 {
            return Err(Error::InvalidConfig("max_epochs must be at least 1".into()));
        }
        if !(self.target_accuracy > 0.0 && self.target_accuracy <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "target accuracy {} must lie in (0, 1]",
                self.target_accuracy
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub epochs_run: usize,
    pub final_accuracy: f64,
    pub converged: bool,
    /// Misclassified samples seen during each epoch's pass.
    pub per_epoch_errors: Vec<usize>,
    pub degenerate_zero_count: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NeuronOutput {
    pub weighted_sum: ComplexAmplitude,
    pub output: Sector,
    pub degenerate: bool,
}

/// `ω_0 + Σ ω_i x_i`
pub(crate) fn weighted_sum(
    weights: &[ComplexAmplitude],
    inputs: &[ComplexAmplitude],
) -> ComplexAmplitude {
    let mut z = weights[0];
    for (w, x) in weights[1..].iter().zip(inputs) {
        z += w * x;
    }
    z
}

pub fn forward(model: &NeuronModel, inputs: &[ComplexAmplitude]) -> Result<NeuronOutput> {
    forward_with(model, inputs, ZeroPolicy::FirstSector)
}

pub fn forward_with(
    model: &NeuronModel,
    inputs: &[ComplexAmplitude],
    policy: ZeroPolicy,
) -> Result<NeuronOutput> {
    if inputs.len() != model.arity() {
        return Err(Error::Arity {
            expected: model.arity(),
            actual: inputs.len(),
        });
    }
    let z = weighted_sum(&model.weights, inputs);
    let act = csign_with(z, model.k, policy)?;
    Ok(NeuronOutput {
        weighted_sum: z,
        output: act.sector,
        degenerate: act.degenerate,
    })
}

/// Normalized Hebbian weights `ω_j = (1/d) Σ_i f_i conj(x_j^i)`, `x_0 ≡ 1`.
pub fn hebbian_init(dataset: &Dataset) -> Result<NeuronModel> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut weights = vec![Complex64::new(0.0, 0.0); dataset.arity + 1];
    for s in &dataset.samples {
        let f = sector_value(s.target);
        weights[0] += f;
        for (w, x) in weights[1..].iter_mut().zip(&s.inputs) {
            *w += f * x.conj();
        }
    }
    let d = dataset.len() as f64;
    NeuronModel::new(dataset.k, weights.into_iter().map(|w| w / d).collect())
}

/// `W ← W + α/(n+1) · δ · conj(X)` with `X = (1, x_1, …, x_n)`.
pub(crate) fn apply_correction(
    weights: &mut [ComplexAmplitude],
    delta: ComplexAmplitude,
    inputs: &[ComplexAmplitude],
    alpha: f64,
) {
    let step = delta * (alpha / weights.len() as f64);
    weights[0] += step;
    for (w, x) in weights[1..].iter_mut().zip(inputs) {
        *w += step * x.conj();
    }
}

/// One application of the error-correction rule to a single sample.
pub fn error_correction_step(
    model: &NeuronModel,
    sample: &Sample,
    alpha: f64,
) -> Result<NeuronModel> {
    let out = forward(model, &sample.inputs)?;
    let mut next = model.clone();
    if out.output != sample.target {
        let delta = sector_value(sample.target) - sector_value(out.output);
        apply_correction(next.weights_mut(), delta, &sample.inputs, alpha);
    }
    Ok(next)
}

fn check_compatible(model: &NeuronModel, dataset: &Dataset) -> Result<()> {
    if model.arity() != dataset.arity {
        return Err(Error::Arity {
            expected: model.arity(),
            actual: dataset.arity,
        });
    }
    if model.k != dataset.k {
        return Err(Error::OrderMismatch(model.k, dataset.k));
    }
    Ok(())
}

/// Visits samples in dataset order, or in a fresh seeded shuffle each epoch.
pub(crate) struct EpochOrder {
    order: Vec<usize>,
    rng: Option<ChaCha8Rng>,
}

impl EpochOrder {
    pub(crate) fn new(len: usize, seed: Option<u64>) -> Self {
        EpochOrder {
            order: (0..len).collect(),
            rng: seed.map(ChaCha8Rng::seed_from_u64),
        }
    }

    pub(crate) fn next_epoch(&mut self) -> &[usize] {
        if let Some(rng) = self.rng.as_mut() {
            self.order.shuffle(rng);
        }
        &self.order
    }
}

/// Iterative error-correction training.
pub fn train(
    model: &NeuronModel,
    dataset: &Dataset,
    cfg: &TrainConfig,
) -> Result<(NeuronModel, TrainReport)> {
    train_observed(model, dataset, cfg, |_, _| {})
}

/// Like [`train`], calling `observer(epoch, model)` after every epoch.
pub fn train_observed(
    model: &NeuronModel,
    dataset: &Dataset,
    cfg: &TrainConfig,
    mut observer: impl FnMut(usize, &NeuronModel),
) -> Result<(NeuronModel, TrainReport)> {
    cfg.validate()?;
    check_compatible(model, dataset)?;
    let mut current = model.clone();
    let mut order = EpochOrder::new(dataset.len(), cfg.shuffle_seed);
    let mut per_epoch_errors = Vec::new();
    let mut degenerate = 0usize;
    let mut converged = false;
    let d = dataset.len();

    for epoch in 1..=cfg.max_epochs {
        let mut errors = 0usize;
        for &i in order.next_epoch() {
            let s = &dataset.samples[i];
            let out = forward_with(&current, &s.inputs, cfg.zero_policy)?;
            if out.degenerate {
                degenerate += 1;
            }
            if out.output != s.target {
                errors += 1;
                let delta = sector_value(s.target) - sector_value(out.output);
                apply_correction(current.weights_mut(), delta, &s.inputs, cfg.learning_rate);
            }
        }
        if current
            .weights
            .iter()
            .any(|w| !w.re.is_finite() || !w.im.is_finite())
        {
            return Err(Error::NonFinite("trained weights"));
        }
        per_epoch_errors.push(errors);
        observer(epoch, &current);
        if (d - errors) as f64 / d as f64 >= cfg.target_accuracy {
            converged = true;
            break;
        }
    }

    let final_accuracy = evaluate(&current, dataset)?.accuracy;
    let report = TrainReport {
        epochs_run: per_epoch_errors.len(),
        final_accuracy,
        converged,
        per_epoch_errors,
        degenerate_zero_count: degenerate,
    };
    Ok((current, report))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Evaluation {
    pub accuracy: f64,
    /// `confusion[target][predicted]`
    pub confusion: Vec<Vec<usize>>,
    pub mean_angular_error: f64,
}

/// Absolute angle between two roots, wrapped into `[0, π]`.
pub fn wrapped_angle(a: Sector, b: Sector) -> f64 {
    let k = a.order() as i64;
    let diff = (a.index() as i64 - b.index() as i64).rem_euclid(k);
    let steps = diff.min(k - diff);
    std::f64::consts::TAU * steps as f64 / k as f64
}

pub fn evaluate(model: &NeuronModel, dataset: &Dataset) -> Result<Evaluation> {
    if dataset.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_compatible(model, dataset)?;
    let k = model.k as usize;
    let mut confusion = vec![vec![0usize; k]; k];
    let mut correct = 0usize;
    let mut angle = 0.0;
    for s in &dataset.samples {
        let out = forward(model, &s.inputs)?;
        confusion[s.target.index() as usize][out.output.index() as usize] += 1;
        if out.output == s.target {
            correct += 1;
        }
        angle += wrapped_angle(out.output, s.target);
    }
    let d = dataset.len() as f64;
    Ok(Evaluation {
        accuracy: correct as f64 / d,
        confusion,
        mean_angular_error: angle / d,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(k: i64, j: i64) -> Sector {
        Sector::new(k, j).unwrap()
    }

    /// Independent evaluation: bias plus dot product, written out.
    fn oracle_sum(w: &[Complex64], x: &[Complex64]) -> Complex64 {
        (0..x.len()).fold(w[0], |acc, i| acc + w[i + 1] * x[i])
    }

    fn xor_k4() -> Dataset {
        // ±1 inputs as ε_4^0 / ε_4^2, labelled by the weights (0, 1, i)
        let rows = [(0, 0, 0), (2, 0, 1), (0, 2, 3), (2, 2, 2)];
        Dataset::new(
            rows.iter()
                .map(|&(a, b, t)| Sample::from_sectors(&[e(4, a), e(4, b)], e(4, t)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn forward_examples() {
        let m = NeuronModel::new(4, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let x = [c(1.0, 0.0), c(1.0, 0.0)];
        let out = forward(&m, &x).unwrap();
        assert_eq!(out.weighted_sum, oracle_sum(m.weights(), &x));
        assert_eq!(out.weighted_sum, c(1.0, 1.0));
        assert_eq!(out.output, e(4, 0));
        let x = [c(-1.0, 0.0), c(1.0, 0.0)];
        let out = forward(&m, &x).unwrap();
        assert_eq!(out.weighted_sum, c(-1.0, 1.0));
        assert_eq!(out.output, e(4, 1));

        let z = NeuronModel::zeros(3, 2).unwrap();
        let out = forward(&z, &x).unwrap();
        assert_eq!(out.output, e(3, 0));
        assert!(out.degenerate);
        assert!(forward_with(&z, &x, ZeroPolicy::Reject).is_err());
        assert_eq!(
            forward(&m, &x[..1]),
            Err(Error::Arity {
                expected: 2,
                actual: 1
            })
        );
    }

    #[test]
    fn xor_weights_solve_dataset() {
        let m = NeuronModel::new(4, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let ev = evaluate(&m, &xor_k4()).unwrap();
        assert_eq!(ev.accuracy, 1.0);
        assert_eq!(ev.mean_angular_error, 0.0);
        // output parity is the XOR of the two ±1 inputs
        for s in xor_k4().samples() {
            let a = (s.inputs()[0].re < 0.0) as u32;
            let b = (s.inputs()[1].re < 0.0) as u32;
            assert_eq!(s.target().index() % 2, a ^ b);
        }
    }

    #[test]
    fn hebbian_examples() {
        let ds = Dataset::new(vec![
            Sample::new(vec![c(0.0, 1.0), c(-1.0, 0.0)], e(4, 1)).unwrap()
        ])
        .unwrap();
        let m = hebbian_init(&ds).unwrap();
        assert_eq!(m.weights(), &[c(0.0, 1.0), c(1.0, 0.0), c(0.0, -1.0)]);
        let out = forward(&m, ds.samples()[0].inputs()).unwrap();
        assert!((out.weighted_sum - c(0.0, 3.0)).norm() < 1e-15);
        assert_eq!(out.output, e(4, 1));

        let ds = Dataset::new(vec![Sample::from_sectors(&[e(2, 0)], e(2, 0))]).unwrap();
        let m = hebbian_init(&ds).unwrap();
        assert_eq!(m.weights(), &[c(1.0, 0.0), c(1.0, 0.0)]);
        assert_eq!(
            forward(&m, ds.samples()[0].inputs()).unwrap().weighted_sum,
            c(2.0, 0.0)
        );

        let ds = Dataset::new(vec![
            Sample::from_sectors(&[e(2, 1)], e(2, 0)),
            Sample::from_sectors(&[e(2, 1)], e(2, 1)),
        ])
        .unwrap();
        assert!(hebbian_init(&ds)
            .unwrap()
            .weights()
            .iter()
            .all(|w| w.norm() == 0.0));
    }

    #[test]
    fn error_correction_examples() {
        let m = NeuronModel::new(2, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let s = Sample::from_sectors(&[e(2, 0)], e(2, 1));
        let next = error_correction_step(&m, &s, 1.0).unwrap();
        assert_eq!(next.weights(), &[c(-1.0, 0.0), c(0.0, 0.0)]);
        let out = forward(&next, s.inputs()).unwrap();
        assert_eq!(out.weighted_sum, c(-1.0, 0.0));
        assert_eq!(out.output, e(2, 1));

        let s = Sample::from_sectors(&[e(2, 0)], e(2, 0));
        assert_eq!(error_correction_step(&m, &s, 1.0).unwrap(), m);
    }

    #[test]
    fn train_on_solved_dataset_is_noop() {
        let m = NeuronModel::new(4, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let (trained, report) = train(&m, &xor_k4(), &TrainConfig::default()).unwrap();
        assert_eq!(trained, m);
        assert_eq!(report.epochs_run, 1);
        assert!(report.converged);
        assert_eq!(report.per_epoch_errors, vec![0]);
    }

    #[test]
    fn train_respects_max_epochs() {
        let m = NeuronModel::new(4, vec![c(0.3, 0.0), c(-1.0, 0.0), c(0.0, 0.2)]).unwrap();
        let cfg = TrainConfig {
            max_epochs: 1,
            ..TrainConfig::default()
        };
        let (_, report) = train(&m, &xor_k4(), &cfg).unwrap();
        assert_eq!(report.epochs_run, 1);
        assert!(!report.converged);
        assert!(train(
            &m,
            &xor_k4(),
            &TrainConfig {
                max_epochs: 0,
                ..cfg.clone()
            }
        )
        .is_err());
        assert!(train(
            &m,
            &xor_k4(),
            &TrainConfig {
                learning_rate: 0.0,
                ..cfg
            }
        )
        .is_err());
    }

    #[test]
    fn train_xor_from_random_start() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let m = NeuronModel::random(4, 2, &mut rng).unwrap();
        let cfg = TrainConfig {
            max_epochs: 100,
            ..TrainConfig::default()
        };
        let (trained, report) = train(&m, &xor_k4(), &cfg).unwrap();
        assert!(report.converged, "{report:?}");
        assert_eq!(evaluate(&trained, &xor_k4()).unwrap().accuracy, 1.0);
    }

    #[test]
    fn evaluate_examples() {
        let ds = Dataset::new(vec![
            Sample::from_sectors(&[e(2, 0)], e(2, 1)),
            Sample::from_sectors(&[e(2, 1)], e(2, 0)),
        ])
        .unwrap();
        let m = NeuronModel::new(2, vec![c(0.0, 0.0), c(1.0, 0.0)]).unwrap();
        let ev = evaluate(&m, &ds).unwrap();
        assert_eq!(ev.accuracy, 0.0);
        assert!((ev.mean_angular_error - PI).abs() < 1e-15);
        assert_eq!(ev.confusion, vec![vec![0, 1], vec![1, 0]]);

        let mut samples = xor_k4().samples().to_vec();
        samples[3] = Sample::from_sectors(&[e(4, 2), e(4, 2)], e(4, 0));
        let ds = Dataset::new(samples).unwrap();
        let m = NeuronModel::new(4, vec![c(0.0, 0.0), c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        assert_eq!(evaluate(&m, &ds).unwrap().accuracy, 0.75);
    }

    #[test]
    fn dataset_validation() {
        assert_eq!(Dataset::new(vec![]), Err(Error::EmptyDataset));
        assert!(Sample::new(vec![c(2.0, 0.0)], e(2, 0)).is_err());
        let mixed = vec![
            Sample::from_sectors(&[e(2, 0)], e(2, 0)),
            Sample::from_sectors(&[e(2, 0), e(2, 1)], e(2, 0)),
        ];
        assert!(matches!(Dataset::new(mixed), Err(Error::Arity { .. })));
        let mixed = vec![
            Sample::from_sectors(&[e(2, 0)], e(2, 0)),
            Sample::from_sectors(&[e(2, 0)], e(3, 0)),
        ];
        assert_eq!(Dataset::new(mixed), Err(Error::OrderMismatch(2, 3)));
    }

    #[test]
    fn angles() {
        assert_eq!(wrapped_angle(e(4, 0), e(4, 3)), PI / 2.0);
        assert_eq!(wrapped_angle(e(4, 1), e(4, 1)), 0.0);
        assert_eq!(wrapped_angle(e(2, 0), e(2, 1)), PI);
    }
}
