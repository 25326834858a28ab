//! Quantum perceptron over qubit inputs.
//!
//! The output is the raw linear combination `|y⟩ = Σ_j ŵ_j |x_j⟩` and the
//! weights follow `ŵ_j ← ŵ_j + η (|d⟩ − |y⟩) ⟨x_j|`. With normalized inputs
//! one step maps the residual `d − y` to `(1 − ηn)(d − y)`, so the squared
//! error contracts by exactly `(1 − ηn)²` per step.

use num_complex::Complex64;

use crate::bargmann::TwoModeState;
use crate::error::{Error, Result};
use crate::unity_logic::ComplexAmplitude;

/// Tolerance on `⟨x|x⟩ = 1`.
pub const NORMALIZATION_TOL: f64 = 1e-9;

/// Errors at or below this are treated as zero when forming ratios.
pub const RATIO_FLOOR: f64 = 1e-15;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `α|0⟩ + β|1⟩`, not necessarily normalized.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct QubitState {
    pub alpha: ComplexAmplitude,
    pub beta: ComplexAmplitude,
}

impl QubitState {
    pub fn new(alpha: ComplexAmplitude, beta: ComplexAmplitude) -> Self {
        QubitState { alpha, beta }
    }

    pub fn norm_sqr(&self) -> f64 {
        self.alpha.norm_sqr() + self.beta.norm_sqr()
    }

    pub fn is_normalized(&self) -> bool {
        (self.norm_sqr() - 1.0).abs() <= NORMALIZATION_TOL
    }

    /// `⟨self|other⟩`
    pub fn inner(&self, other: &QubitState) -> ComplexAmplitude {
        self.alpha.conj() * other.alpha + self.beta.conj() * other.beta
    }

    fn sub(&self, other: &QubitState) -> QubitState {
        QubitState::new(self.alpha - other.alpha, self.beta - other.beta)
    }

    fn add(&self, other: &QubitState) -> QubitState {
        QubitState::new(self.alpha + other.alpha, self.beta + other.beta)
    }

    fn scale(&self, c: ComplexAmplitude) -> QubitState {
        QubitState::new(self.alpha * c, self.beta * c)
    }
}

/// 2×2 complex weight `[[m00, m01], [m10, m11]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct MatrixWeight {
    pub m00: ComplexAmplitude,
    pub m01: ComplexAmplitude,
    pub m10: ComplexAmplitude,
    pub m11: ComplexAmplitude,
}

impl MatrixWeight {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        MatrixWeight {
            m00: one,
            m01: ZERO,
            m10: ZERO,
            m11: one,
        }
    }

    pub fn apply(&self, x: &QubitState) -> QubitState {
        QubitState::new(
            self.m00 * x.alpha + self.m01 * x.beta,
            self.m10 * x.alpha + self.m11 * x.beta,
        )
    }

    /// `|u⟩⟨v|`
    pub fn outer(u: &QubitState, v: &QubitState) -> Self {
        let (a, b) = (v.alpha.conj(), v.beta.conj());
        MatrixWeight {
            m00: u.alpha * a,
            m01: u.alpha * b,
            m10: u.beta * a,
            m11: u.beta * b,
        }
    }

    fn entries(&self) -> [ComplexAmplitude; 4] {
        [self.m00, self.m01, self.m10, self.m11]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum PerceptronModel {
    Matrix(Vec<MatrixWeight>),
    Scalar(Vec<ComplexAmplitude>),
}

impl PerceptronModel {
    pub fn arity(&self) -> usize {
        match self {
            PerceptronModel::Matrix(w) => w.len(),
            PerceptronModel::Scalar(w) => w.len(),
        }
    }

    pub fn zeros_matrix(n: usize) -> Self {
        PerceptronModel::Matrix(vec![MatrixWeight::default(); n])
    }

    pub fn zeros_scalar(n: usize) -> Self {
        PerceptronModel::Scalar(vec![ZERO; n])
    }

    fn check_arity(&self, n: usize) -> Result<()> {
        if self.arity() != n {
            return Err(Error::Arity {
                expected: self.arity(),
                actual: n,
            });
        }
        Ok(())
    }

    fn is_finite(&self) -> bool {
        let ok = |c: &ComplexAmplitude| c.re.is_finite() && c.im.is_finite();
        match self {
            PerceptronModel::Matrix(ws) => ws.iter().all(|w| w.entries().iter().all(ok)),
            PerceptronModel::Scalar(ws) => ws.iter().all(ok),
        }
    }
}

/// `|y⟩ = Σ_j ŵ_j |x_j⟩`, not renormalized.
pub fn qp_forward(model: &PerceptronModel, inputs: &[QubitState]) -> Result<QubitState> {
    model.check_arity(inputs.len())?;
    let y = match model {
        PerceptronModel::Matrix(ws) => ws
            .iter()
            .zip(inputs)
            .fold(QubitState::default(), |acc, (w, x)| acc.add(&w.apply(x))),
        PerceptronModel::Scalar(ws) => ws
            .iter()
            .zip(inputs)
            .fold(QubitState::default(), |acc, (w, x)| acc.add(&x.scale(*w))),
    };
    Ok(y)
}

/// Matrix mode: `ŵ_j += η (d − y)⟨x_j|`.
/// Scalar mode: `ω_j += η ⟨x_j|d − y⟩`, the projection of the residual on the input.
pub fn qp_update(
    model: &PerceptronModel,
    inputs: &[QubitState],
    desired: &QubitState,
    y: &QubitState,
    eta: f64,
) -> Result<PerceptronModel> {
    model.check_arity(inputs.len())?;
    let residual = desired.sub(y);
    let eta_c = Complex64::new(eta, 0.0);
    Ok(match model {
        PerceptronModel::Matrix(ws) => PerceptronModel::Matrix(
            ws.iter()
                .zip(inputs)
                .map(|(w, x)| {
                    let d = MatrixWeight::outer(&residual, x);
                    MatrixWeight {
                        m00: w.m00 + eta_c * d.m00,
                        m01: w.m01 + eta_c * d.m01,
                        m10: w.m10 + eta_c * d.m10,
                        m11: w.m11 + eta_c * d.m11,
                    }
                })
                .collect(),
        ),
        PerceptronModel::Scalar(ws) => PerceptronModel::Scalar(
            ws.iter()
                .zip(inputs)
                .map(|(w, x)| w + eta_c * x.inner(&residual))
                .collect(),
        ),
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PerceptronTrainConfig {
    pub eta: f64,
    pub steps: usize,
    /// Reject inputs with `⟨x|x⟩ ≠ 1`; the contraction law needs them normalized.
    pub require_normalized: bool,
}

impl PerceptronTrainConfig {
    pub fn new(eta: f64, steps: usize) -> Self {
        PerceptronTrainConfig {
            eta,
            steps,
            require_normalized: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceStep {
    pub output: QubitState,
    pub squared_error: f64,
    /// `error(t) / error(t-1)`, absent on the first step or after a zero error.
    pub contraction_ratio: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerceptronTrace {
    pub steps: Vec<TraceStep>,
    /// `η` lies outside `(0, 1/n)`, so convergence is not guaranteed.
    pub eta_out_of_range: bool,
}

/// The factor the squared error is multiplied by each step.
pub fn expected_ratio(eta: f64, n: usize) -> f64 {
    let f = 1.0 - eta * n as f64;
    f * f
}

/// Runs `steps` rounds of forward + update, recording the error before each update.
pub fn qp_train(
    model: &PerceptronModel,
    inputs: &[QubitState],
    desired: &QubitState,
    cfg: &PerceptronTrainConfig,
) -> Result<(PerceptronModel, PerceptronTrace)> {
    model.check_arity(inputs.len())?;
    if !cfg.eta.is_finite() || cfg.eta < 0.0 {
        return Err(Error::InvalidConfig(format!(
            "eta {} must be non-negative",
            cfg.eta
        )));
    }
    if cfg.require_normalized {
        if let Some((i, x)) = inputs.iter().enumerate().find(|(_, x)| !x.is_normalized()) {
            return Err(Error::NotNormalized(i, x.norm_sqr()));
        }
    }
    let n = inputs.len() as f64;
    let eta_out_of_range = !(cfg.eta > 0.0 && cfg.eta * n < 1.0);

    let mut current = model.clone();
    let mut steps = Vec::with_capacity(cfg.steps);
    let mut previous: Option<f64> = None;
    for _ in 0..cfg.steps {
        let y = qp_forward(&current, inputs)?;
        let err = desired.sub(&y).norm_sqr();
        let contraction_ratio = previous.filter(|&p| p > RATIO_FLOOR).map(|p| err / p);
        steps.push(TraceStep {
            output: y,
            squared_error: err,
            contraction_ratio,
        });
        previous = Some(err);
        current = qp_update(&current, inputs, desired, &y, cfg.eta)?;
        if !current.is_finite() {
            return Err(Error::NonFinite("perceptron weights"));
        }
    }
    Ok((
        current,
        PerceptronTrace {
            steps,
            eta_out_of_range,
        },
    ))
}

/// `α z + β w` in the Bargmann picture.
pub fn qubit_to_bargmann(x: &QubitState) -> TwoModeState {
    TwoModeState::from_terms([((1, 0), x.alpha), ((0, 1), x.beta)])
}
