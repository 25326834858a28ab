//! Multi-valued quantum neurons.
//!
//! * [`unity_logic`]: k-valued logic on the roots of unity, the `csign`
//!   activation and the radix cost model.
//! * [`bargmann`]: holomorphic (Segal–Bargmann) two-mode states, ladder and
//!   spin operators, and the spin-state to root-of-unity encoding.
//! * [`mvqn`]: the single multi-valued neuron with Hebbian and
//!   error-correction learning.
//! * [`qperceptron`]: the qubit perceptron and its contraction law.
//! * [`network`]: layered networks of multi-valued neurons.

pub mod bargmann;
pub mod error;
pub mod mvqn;
pub mod network;
pub mod qperceptron;
pub mod quadrature;
pub mod unity_logic;

pub use bargmann::{SpinLabel, TwoModeState};
pub use error::{Error, Result};
pub use mvqn::{Dataset, NeuronModel, Sample, TrainConfig, TrainReport};
pub use network::{LayerSpec, NetDataset, NetworkModel};
pub use qperceptron::{MatrixWeight, PerceptronModel, QubitState};
pub use unity_logic::{csign, ComplexAmplitude, Sector, ZeroPolicy};
