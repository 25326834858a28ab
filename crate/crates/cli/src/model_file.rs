//! JSON model files.
//!
//! Output is canonical: keys sorted, no whitespace, integral floats written
//! as integers (except `-0.0`), everything else in shortest round-trip form.
//! Saving and loading a model therefore reproduces it bit for bit.

use std::path::Path;

use mvqn_core::mvqn::NeuronModel;
use mvqn_core::network::{LayerSpec, NetworkModel};
use mvqn_core::qperceptron::{MatrixWeight, PerceptronModel};
use mvqn_core::ComplexAmplitude;
use serde_json::{json, Map, Number, Value};

use crate::error::{CliError, Result};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum ModelFile {
    Neuron(NeuronModel),
    Network(NetworkModel),
    Perceptron(PerceptronModel),
}

impl ModelFile {
    pub fn kind(&self) -> &'static str {
        match self {
            ModelFile::Neuron(_) => "neuron",
            ModelFile::Network(_) => "network",
            ModelFile::Perceptron(_) => "perceptron",
        }
    }
}

fn number(x: f64) -> Value {
    if x.fract() == 0.0 && x.abs() < 9.0e15 && !(x == 0.0 && x.is_sign_negative()) {
        Value::Number(Number::from(x as i64))
    } else {
        // Non-finite values never reach here: every model constructor rejects them.
        Number::from_f64(x)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
}

fn complex(c: ComplexAmplitude) -> Value {
    Value::Array(vec![number(c.re), number(c.im)])
}

fn complexes(cs: &[ComplexAmplitude]) -> Value {
    Value::Array(cs.iter().copied().map(complex).collect())
}

pub fn to_value(model: &ModelFile) -> Value {
    let mut obj = Map::new();
    obj.insert("schema_version".into(), json!(SCHEMA_VERSION));
    obj.insert("kind".into(), json!(model.kind()));
    match model {
        ModelFile::Neuron(n) => {
            obj.insert("k".into(), json!(n.k()));
            obj.insert("weights".into(), complexes(n.weights()));
        }
        ModelFile::Network(net) => {
            obj.insert("input_arity".into(), json!(net.input_arity()));
            let layers = net
                .layers()
                .iter()
                .map(|l| {
                    let neurons = l.neurons().iter().map(|n| complexes(n.weights())).collect();
                    json!({ "k": l.spec().k, "neurons": Value::Array(neurons) })
                })
                .collect();
            obj.insert("layers".into(), Value::Array(layers));
        }
        ModelFile::Perceptron(PerceptronModel::Matrix(ws)) => {
            obj.insert("mode".into(), json!("matrix"));
            let ws = ws
                .iter()
                .map(|w| complexes(&[w.m00, w.m01, w.m10, w.m11]))
                .collect();
            obj.insert("weights".into(), Value::Array(ws));
        }
        ModelFile::Perceptron(PerceptronModel::Scalar(ws)) => {
            obj.insert("mode".into(), json!("scalar"));
            obj.insert("weights".into(), complexes(ws));
        }
    }
    Value::Object(obj)
}

pub fn to_canonical_string(model: &ModelFile) -> String {
    let mut s = to_value(model).to_string();
    s.push('\n');
    s
}

fn schema(msg: impl Into<String>) -> CliError {
    CliError::Schema(msg.into())
}

fn field<'a>(obj: &'a Map<String, Value>, key: &str) -> Result<&'a Value> {
    obj.get(key)
        .ok_or_else(|| schema(format!("missing field {key:?}")))
}

fn as_u64(v: &Value, what: &str) -> Result<u64> {
    v.as_u64()
        .ok_or_else(|| schema(format!("{what} must be a non-negative integer")))
}

fn as_array<'a>(v: &'a Value, what: &str) -> Result<&'a Vec<Value>> {
    v.as_array()
        .ok_or_else(|| schema(format!("{what} must be an array")))
}

fn parse_complex(v: &Value) -> Result<ComplexAmplitude> {
    match v.as_array().map(Vec::as_slice) {
        Some([re, im]) => match (re.as_f64(), im.as_f64()) {
            (Some(re), Some(im)) => Ok(ComplexAmplitude::new(re, im)),
            _ => Err(schema("complex entries must be numbers")),
        },
        _ => Err(schema("complex values are [re, im] pairs")),
    }
}

fn parse_complexes(v: &Value, what: &str) -> Result<Vec<ComplexAmplitude>> {
    as_array(v, what)?.iter().map(parse_complex).collect()
}

fn order(v: &Value) -> Result<u32> {
    u32::try_from(as_u64(v, "k")?).map_err(|_| schema("k out of range"))
}

pub fn from_value(v: &Value) -> Result<ModelFile> {
    let obj = v
        .as_object()
        .ok_or_else(|| schema("model file must be a JSON object"))?;
    let version = as_u64(field(obj, "schema_version")?, "schema_version")?;
    if version != SCHEMA_VERSION {
        return Err(schema(format!(
            "unsupported schema_version {version}, expected {SCHEMA_VERSION}"
        )));
    }
    let kind = field(obj, "kind")?
        .as_str()
        .ok_or_else(|| schema("kind must be a string"))?;
    match kind {
        "neuron" => {
            let k = order(field(obj, "k")?)?;
            let weights = parse_complexes(field(obj, "weights")?, "weights")?;
            Ok(ModelFile::Neuron(NeuronModel::new(k, weights)?))
        }
        "network" => {
            let arity = as_u64(field(obj, "input_arity")?, "input_arity")? as usize;
            let layers = as_array(field(obj, "layers")?, "layers")?
                .iter()
                .map(|l| {
                    let l = l
                        .as_object()
                        .ok_or_else(|| schema("layer must be an object"))?;
                    let k = order(field(l, "k")?)?;
                    let neurons = as_array(field(l, "neurons")?, "neurons")?
                        .iter()
                        .map(|n| {
                            NeuronModel::new(k, parse_complexes(n, "neuron weights")?)
                                .map_err(CliError::from)
                        })
                        .collect::<Result<Vec<_>>>()?;
                    Ok((
                        LayerSpec {
                            neuron_count: neurons.len(),
                            k,
                        },
                        neurons,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            Ok(ModelFile::Network(NetworkModel::new(arity, layers)?))
        }
        "perceptron" => {
            let mode = field(obj, "mode")?
                .as_str()
                .ok_or_else(|| schema("mode must be a string"))?;
            let weights = field(obj, "weights")?;
            let model = match mode {
                "scalar" => PerceptronModel::Scalar(parse_complexes(weights, "weights")?),
                "matrix" => PerceptronModel::Matrix(
                    as_array(weights, "weights")?
                        .iter()
                        .map(|w| match parse_complexes(w, "matrix weight")?.as_slice() {
                            &[m00, m01, m10, m11] => Ok(MatrixWeight { m00, m01, m10, m11 }),
                            _ => Err(schema("matrix weights have four entries")),
                        })
                        .collect::<Result<Vec<_>>>()?,
                ),
                other => return Err(schema(format!("unknown perceptron mode {other:?}"))),
            };
            let finite = |c: &ComplexAmplitude| c.re.is_finite() && c.im.is_finite();
            let ok = match &model {
                PerceptronModel::Scalar(ws) => ws.iter().all(finite),
                PerceptronModel::Matrix(ws) => ws
                    .iter()
                    .all(|w| [w.m00, w.m01, w.m10, w.m11].iter().all(finite)),
            };
            if !ok || model.arity() == 0 {
                return Err(schema("perceptron weights must be finite and non-empty"));
            }
            Ok(ModelFile::Perceptron(model))
        }
        other => Err(schema(format!("unknown model kind {other:?}"))),
    }
}

pub fn from_str(text: &str) -> Result<ModelFile> {
    let value: Value = serde_json::from_str(text).map_err(|e| CliError::Parse {
        line: e.line(),
        message: e.to_string(),
    })?;
    from_value(&value)
}

pub fn save_model(path: &Path, model: &ModelFile) -> Result<()> {
    std::fs::write(path, to_canonical_string(model)).map_err(|e| CliError::io(path, e))
}

pub fn load_model(path: &Path) -> Result<ModelFile> {
    from_str(&std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?)
}
