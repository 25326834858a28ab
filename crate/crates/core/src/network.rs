//! Feedforward networks of multi-valued neurons.
//!
//! Layers pass exact roots of unity to each other. Training follows the
//! derivative-free MLMVN scheme: output neurons take `δ = ε^target − ε^actual`,
//! each neuron's error is shared equally over its `fan-in + 1` weights and
//! sent back through the conjugated weights, and every neuron then applies
//! the single-neuron correction rule with its local error, layer by layer
//! from the input side. Hidden neurons scale their step by `1/|z|`, their
//! own weighted-sum modulus, as in the MLMVN hidden-layer rule.

use rand::Rng;

use crate::error::{Error, Result};
use crate::mvqn::{
    apply_correction, check_unit_inputs, forward_with, wrapped_angle, Dataset, EpochOrder,
    Evaluation, NeuronModel, TrainConfig, TrainReport,
};
use crate::unity_logic::{sector_value, ComplexAmplitude, Sector, ZeroPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LayerSpec {
    pub neuron_count: usize,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    spec: LayerSpec,
    neurons: Vec<NeuronModel>,
}

impl Layer {
    pub fn spec(&self) -> LayerSpec {
        self.spec
    }

    pub fn neurons(&self) -> &[NeuronModel] {
        &self.neurons
    }

    /// Inputs each neuron in this layer consumes.
    pub fn fan_in(&self) -> usize {
        self.neurons[0].arity()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetworkModel {
    input_arity: usize,
    layers: Vec<Layer>,
}

impl NetworkModel {
    pub fn new(input_arity: usize, layers: Vec<(LayerSpec, Vec<NeuronModel>)>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::Structure("network needs at least one layer".into()));
        }
        let mut arity = input_arity;
        let mut built = Vec::with_capacity(layers.len());
        for (l, (spec, neurons)) in layers.into_iter().enumerate() {
            if spec.neuron_count == 0 || spec.neuron_count != neurons.len() {
                return Err(Error::Structure(format!(
                    "layer {l} declares {} neurons but holds {}",
                    spec.neuron_count,
                    neurons.len()
                )));
            }
            for (i, n) in neurons.iter().enumerate() {
                if n.k() != spec.k {
                    return Err(Error::Structure(format!(
                        "layer {l} neuron {i} has order {} not {}",
                        n.k(),
                        spec.k
                    )));
                }
                if n.arity() != arity {
                    return Err(Error::Structure(format!(
                        "layer {l} neuron {i} has arity {} but receives {arity} inputs",
                        n.arity()
                    )));
                }
            }
            arity = spec.neuron_count;
            built.push(Layer { spec, neurons });
        }
        Ok(NetworkModel {
            input_arity,
            layers: built,
        })
    }

    /// Random weights drawn layer by layer, neuron by neuron, in the same way
    /// as [`NeuronModel::random`].
    pub fn random<R: Rng + ?Sized>(
        input_arity: usize,
        specs: &[LayerSpec],
        rng: &mut R,
    ) -> Result<Self> {
        let mut arity = input_arity;
        let mut layers = Vec::with_capacity(specs.len());
        for spec in specs {
            let neurons = (0..spec.neuron_count)
                .map(|_| NeuronModel::random(spec.k, arity, rng))
                .collect::<Result<Vec<_>>>()?;
            layers.push((*spec, neurons));
            arity = spec.neuron_count;
        }
        Self::new(input_arity, layers)
    }

    pub fn input_arity(&self) -> usize {
        self.input_arity
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn output_count(&self) -> usize {
        self.layers.last().map_or(0, |l| l.spec.neuron_count)
    }

    pub fn output_k(&self) -> u32 {
        self.layers.last().map_or(0, |l| l.spec.k)
    }
}

/// Weighted sums and outputs of one layer during a forward pass.
#[derive(Debug, Clone, PartialEq)]
pub struct LayerActivation {
    pub weighted_sums: Vec<ComplexAmplitude>,
    pub outputs: Vec<Sector>,
    pub degenerate: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetOutput {
    pub outputs: Vec<Sector>,
    pub activations: Vec<LayerActivation>,
}

fn layer_forward(
    layer: &Layer,
    inputs: &[ComplexAmplitude],
    policy: ZeroPolicy,
) -> Result<LayerActivation> {
    let mut act = LayerActivation {
        weighted_sums: Vec::with_capacity(layer.neurons.len()),
        outputs: Vec::with_capacity(layer.neurons.len()),
        degenerate: 0,
    };
    for n in &layer.neurons {
        let out = forward_with(n, inputs, policy)?;
        act.weighted_sums.push(out.weighted_sum);
        act.outputs.push(out.output);
        act.degenerate += out.degenerate as usize;
    }
    Ok(act)
}

fn values(sectors: &[Sector]) -> Vec<ComplexAmplitude> {
    sectors.iter().map(|s| sector_value(*s)).collect()
}

pub fn net_forward(net: &NetworkModel, inputs: &[ComplexAmplitude]) -> Result<NetOutput> {
    net_forward_with(net, inputs, ZeroPolicy::FirstSector)
}

pub fn net_forward_with(
    net: &NetworkModel,
    inputs: &[ComplexAmplitude],
    policy: ZeroPolicy,
) -> Result<NetOutput> {
    if inputs.len() != net.input_arity {
        return Err(Error::Arity {
            expected: net.input_arity,
            actual: inputs.len(),
        });
    }
    let mut activations = Vec::with_capacity(net.layers.len());
    let mut signal = inputs.to_vec();
    for layer in &net.layers {
        let act = layer_forward(layer, &signal, policy)?;
        signal = values(&act.outputs);
        activations.push(act);
    }
    let outputs = activations
        .last()
        .map(|a| a.outputs.clone())
        .unwrap_or_default();
    Ok(NetOutput {
        outputs,
        activations,
    })
}

/// Input vector with one target per output neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct NetSample {
    inputs: Vec<ComplexAmplitude>,
    targets: Vec<Sector>,
}

impl NetSample {
    pub fn new(inputs: Vec<ComplexAmplitude>, targets: Vec<Sector>) -> Result<Self> {
        check_unit_inputs(0, &inputs)?;
        Ok(NetSample { inputs, targets })
    }

    pub fn inputs(&self) -> &[ComplexAmplitude] {
        &self.inputs
    }

    pub fn targets(&self) -> &[Sector] {
        &self.targets
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetDataset {
    samples: Vec<NetSample>,
}

impl NetDataset {
    pub fn new(samples: Vec<NetSample>) -> Result<Self> {
        let first = samples.first().ok_or(Error::EmptyDataset)?;
        let (arity, outputs) = (first.inputs.len(), first.targets.len());
        if outputs == 0 {
            return Err(Error::Structure("samples need at least one target".into()));
        }
        for (i, s) in samples.iter().enumerate() {
            if s.inputs.len() != arity {
                return Err(Error::Arity {
                    expected: arity,
                    actual: s.inputs.len(),
                });
            }
            if s.targets.len() != outputs {
                return Err(Error::Structure(format!(
                    "sample {i} has {} targets, expected {outputs}",
                    s.targets.len()
                )));
            }
            for (t, f) in s.targets.iter().zip(&first.targets) {
                if t.order() != f.order() {
                    return Err(Error::OrderMismatch(f.order(), t.order()));
                }
            }
            check_unit_inputs(i, &s.inputs)?;
        }
        Ok(NetDataset { samples })
    }

    pub fn samples(&self) -> &[NetSample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

impl From<&Dataset> for NetDataset {
    fn from(ds: &Dataset) -> Self {
        NetDataset {
            samples: ds
                .samples()
                .iter()
                .map(|s| NetSample {
                    inputs: s.inputs().to_vec(),
                    targets: vec![s.target()],
                })
                .collect(),
        }
    }
}

fn check_compatible(net: &NetworkModel, ds: &NetDataset) -> Result<()> {
    let first = ds.samples.first().ok_or(Error::EmptyDataset)?;
    if first.inputs.len() != net.input_arity {
        return Err(Error::Arity {
            expected: net.input_arity,
            actual: first.inputs.len(),
        });
    }
    if first.targets.len() != net.output_count() {
        return Err(Error::Structure(format!(
            "dataset has {} targets but network has {} outputs",
            first.targets.len(),
            net.output_count()
        )));
    }
    if first.targets[0].order() != net.output_k() {
        return Err(Error::OrderMismatch(
            net.output_k(),
            first.targets[0].order(),
        ));
    }
    Ok(())
}

/// Local errors for every neuron, output layer last.
fn backpropagate(
    net: &NetworkModel,
    output_errors: Vec<ComplexAmplitude>,
) -> Vec<Vec<ComplexAmplitude>> {
    let depth = net.layers.len();
    let mut errors = vec![Vec::new(); depth];
    errors[depth - 1] = output_errors;
    for l in (0..depth - 1).rev() {
        let next = &net.layers[l + 1];
        let share = 1.0 / (next.fan_in() as f64 + 1.0);
        errors[l] = (0..net.layers[l].spec.neuron_count)
            .map(|h| {
                next.neurons
                    .iter()
                    .zip(&errors[l + 1])
                    .map(|(n, d)| d * share * n.weights()[h + 1].conj())
                    .sum()
            })
            .collect();
    }
    errors
}

/// Layered error-correction training.
pub fn net_train(
    net: &NetworkModel,
    ds: &NetDataset,
    cfg: &TrainConfig,
) -> Result<(NetworkModel, TrainReport)> {
    cfg.validate()?;
    check_compatible(net, ds)?;
    let mut current = net.clone();
    let mut order = EpochOrder::new(ds.len(), cfg.shuffle_seed);
    let mut per_epoch_errors = Vec::new();
    let mut degenerate = 0usize;
    let mut converged = false;
    let d = ds.len();

    for _ in 0..cfg.max_epochs {
        let mut errors = 0usize;
        for &i in order.next_epoch() {
            let s = &ds.samples[i];
            let out = net_forward_with(&current, &s.inputs, cfg.zero_policy)?;
            degenerate += out.activations.iter().map(|a| a.degenerate).sum::<usize>();
            if out.outputs == s.targets {
                continue;
            }
            errors += 1;
            let output_errors = s
                .targets
                .iter()
                .zip(&out.outputs)
                .map(|(t, a)| sector_value(*t) - sector_value(*a))
                .collect();
            let local = backpropagate(&current, output_errors);

            let mut signal = s.inputs.clone();
            let depth = current.layers.len();
            for (l, layer) in current.layers.iter_mut().enumerate() {
                let sums = &out.activations[l].weighted_sums;
                for ((neuron, delta), z) in layer.neurons.iter_mut().zip(&local[l]).zip(sums) {
                    if delta.norm_sqr() == 0.0 {
                        continue;
                    }
                    let modulus = z.norm();
                    let delta = if l + 1 < depth && modulus > 0.0 {
                        delta / modulus
                    } else {
                        *delta
                    };
                    apply_correction(neuron.weights_mut(), delta, &signal, cfg.learning_rate);
                }
                if l + 1 < depth {
                    // later layers see the outputs of the already-corrected layer
                    let act = layer_forward(layer, &signal, cfg.zero_policy)?;
                    signal = values(&act.outputs);
                }
            }
        }
        if current
            .layers
            .iter()
            .flat_map(|l| &l.neurons)
            .flat_map(|n| n.weights())
            .any(|w| !w.re.is_finite() || !w.im.is_finite())
        {
            return Err(Error::NonFinite("network weights"));
        }
        per_epoch_errors.push(errors);
        if (d - errors) as f64 / d as f64 >= cfg.target_accuracy {
            converged = true;
            break;
        }
    }

    let final_accuracy = net_evaluate(&current, ds)?.accuracy;
    Ok((
        current,
        TrainReport {
            epochs_run: per_epoch_errors.len(),
            final_accuracy,
            converged,
            per_epoch_errors,
            degenerate_zero_count: degenerate,
        },
    ))
}

#[derive(Debug, Clone, PartialEq)]
pub struct NetEvaluation {
    /// Fraction of samples with every output correct.
    pub accuracy: f64,
    /// Statistics per output neuron.
    pub per_output: Vec<Evaluation>,
}

pub fn net_evaluate(net: &NetworkModel, ds: &NetDataset) -> Result<NetEvaluation> {
    if ds.is_empty() {
        return Err(Error::EmptyDataset);
    }
    check_compatible(net, ds)?;
    let k = net.output_k() as usize;
    let outputs = net.output_count();
    let mut per_output = vec![
        Evaluation {
            accuracy: 0.0,
            confusion: vec![vec![0; k]; k],
            mean_angular_error: 0.0
        };
        outputs
    ];
    let mut correct = vec![0usize; outputs];
    let mut all_correct = 0usize;
    for s in &ds.samples {
        let out = net_forward(net, &s.inputs)?;
        let mut ok = true;
        for (o, (t, a)) in s.targets.iter().zip(&out.outputs).enumerate() {
            per_output[o].confusion[t.index() as usize][a.index() as usize] += 1;
            per_output[o].mean_angular_error += wrapped_angle(*a, *t);
            if t == a {
                correct[o] += 1;
            } else {
                ok = false;
            }
        }
        all_correct += ok as usize;
    }
    let d = ds.len() as f64;
    for (ev, c) in per_output.iter_mut().zip(correct) {
        ev.accuracy = c as f64 / d;
        ev.mean_angular_error /= d;
    }
    Ok(NetEvaluation {
        accuracy: all_correct as f64 / d,
        per_output,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mvqn::{evaluate, forward, train, Sample};
    use num_complex::Complex64;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e(k: i64, j: i64) -> Sector {
        Sector::new(k, j).unwrap()
    }

    fn neuron(k: u32, w: &[Complex64]) -> NeuronModel {
        NeuronModel::new(k, w.to_vec()).unwrap()
    }

    fn xor_k2() -> Dataset {
        let rows = [(0, 0, 0), (0, 1, 1), (1, 0, 1), (1, 1, 0)];
        Dataset::new(
            rows.iter()
                .map(|&(a, b, t)| Sample::from_sectors(&[e(2, a), e(2, b)], e(2, t)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn single_layer_matches_neuron() {
        let n1 = neuron(4, &[c(0.1, 0.2), c(1.0, -0.3), c(0.0, 1.0)]);
        let n2 = neuron(4, &[c(-0.5, 0.0), c(0.2, 0.2), c(0.3, -1.0)]);
        let net = NetworkModel::new(
            2,
            vec![(
                LayerSpec {
                    neuron_count: 2,
                    k: 4,
                },
                vec![n1.clone(), n2.clone()],
            )],
        )
        .unwrap();
        let x = [e(4, 1).value(), e(4, 3).value()];
        let out = net_forward(&net, &x).unwrap();
        assert_eq!(
            out.outputs,
            vec![
                forward(&n1, &x).unwrap().output,
                forward(&n2, &x).unwrap().output
            ]
        );
    }

    #[test]
    fn pass_through_layers() {
        let n1 = neuron(4, &[c(0.1, 0.2), c(1.0, -0.3), c(0.0, 1.0)]);
        let n2 = neuron(4, &[c(-0.5, 0.0), c(0.2, 0.2), c(0.3, -1.0)]);
        let pass = neuron(4, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)]);
        let net = NetworkModel::new(
            2,
            vec![
                (
                    LayerSpec {
                        neuron_count: 2,
                        k: 4,
                    },
                    vec![n1.clone(), n2],
                ),
                (
                    LayerSpec {
                        neuron_count: 1,
                        k: 4,
                    },
                    vec![pass],
                ),
            ],
        )
        .unwrap();
        for j in 0..4 {
            let x = [e(4, j).value(), e(4, 3 - j).value()];
            let out = net_forward(&net, &x).unwrap();
            assert_eq!(out.outputs[0], forward(&n1, &x).unwrap().output);
        }

        let chain = NetworkModel::new(
            1,
            vec![
                (
                    LayerSpec {
                        neuron_count: 1,
                        k: 5,
                    },
                    vec![neuron(5, &[c(0.0, 0.0), c(1.0, 0.0)])],
                ),
                (
                    LayerSpec {
                        neuron_count: 1,
                        k: 5,
                    },
                    vec![neuron(5, &[c(0.0, 0.0), c(1.0, 0.0)])],
                ),
            ],
        )
        .unwrap();
        for j in 0..5 {
            let out = net_forward(&chain, &[e(5, j).value()]).unwrap();
            assert_eq!(out.outputs, vec![e(5, j)]);
            for a in &out.activations {
                assert!(a
                    .outputs
                    .iter()
                    .all(|s| (sector_value(*s).norm() - 1.0).abs() < 1e-12));
            }
        }
    }

    #[test]
    fn structure_validation() {
        let n = neuron(2, &[c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(NetworkModel::new(
            2,
            vec![(
                LayerSpec {
                    neuron_count: 1,
                    k: 2
                },
                vec![n.clone()]
            )]
        )
        .is_err());
        assert!(NetworkModel::new(
            1,
            vec![(
                LayerSpec {
                    neuron_count: 2,
                    k: 2
                },
                vec![n.clone()]
            )]
        )
        .is_err());
        assert!(NetworkModel::new(
            1,
            vec![(
                LayerSpec {
                    neuron_count: 1,
                    k: 3
                },
                vec![n]
            )]
        )
        .is_err());
        assert!(NetworkModel::new(1, vec![]).is_err());
    }

    #[test]
    fn one_layer_training_equals_neuron_training() {
        let ds = xor_k2();
        let k4 = Dataset::new(
            [(0, 0, 0), (2, 0, 1), (0, 2, 3), (2, 2, 2)]
                .iter()
                .map(|&(a, b, t)| Sample::from_sectors(&[e(4, a), e(4, b)], e(4, t)))
                .collect(),
        )
        .unwrap();
        for (ds, k) in [(ds, 2u32), (k4, 4)] {
            for seed in 0..5u64 {
                let spec = [LayerSpec { neuron_count: 1, k }];
                let net =
                    NetworkModel::random(2, &spec, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                let single =
                    NeuronModel::random(k, 2, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                assert_eq!(net.layers()[0].neurons()[0], single);
                let cfg = TrainConfig {
                    max_epochs: 50,
                    shuffle_seed: Some(seed),
                    ..TrainConfig::default()
                };
                let (tn, rn) = net_train(&net, &NetDataset::from(&ds), &cfg).unwrap();
                let (ts, rs) = train(&single, &ds, &cfg).unwrap();
                assert_eq!(rn, rs);
                assert_eq!(tn.layers()[0].neurons()[0], ts);
                let ne = net_evaluate(&tn, &NetDataset::from(&ds)).unwrap();
                assert_eq!(ne.per_output[0], evaluate(&ts, &ds).unwrap());
            }
        }
    }

    #[test]
    fn xor_two_layers() {
        let ds = NetDataset::from(&xor_k2());
        let specs = [
            LayerSpec {
                neuron_count: 2,
                k: 2,
            },
            LayerSpec {
                neuron_count: 1,
                k: 2,
            },
        ];
        let solved = (0..10u64)
            .filter(|&seed| {
                let cfg = TrainConfig {
                    max_epochs: 2000,
                    shuffle_seed: Some(seed),
                    ..TrainConfig::default()
                };
                let net =
                    NetworkModel::random(2, &specs, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
                let (t, r) = net_train(&net, &ds, &cfg).unwrap();
                r.converged && net_evaluate(&t, &ds).unwrap().accuracy == 1.0
            })
            .count();
        assert!(solved >= 8, "solved {solved}/10");
    }

    #[test]
    fn evaluate_errors() {
        let net = NetworkModel::random(
            2,
            &[LayerSpec {
                neuron_count: 1,
                k: 2,
            }],
            &mut ChaCha8Rng::seed_from_u64(1),
        )
        .unwrap();
        assert!(NetDataset::new(vec![]).is_err());
        let wrong = NetDataset::from(
            &Dataset::new(vec![Sample::from_sectors(&[e(2, 0)], e(2, 0))]).unwrap(),
        );
        assert!(net_evaluate(&net, &wrong).is_err());
    }
}
