//! Segal–Bargmann representation of one- and two-mode bosonic states.
//!
//! States are sparse combinations of the normalized monomials
//! `f_{n1,n2}(z, w) = z^{n1} w^{n2} / sqrt(n1! n2!)`, which are orthonormal
//! under the Gaussian measure with `t = 1`. Creation is multiplication by a
//! mode variable and annihilation is the partial derivative, so every
//! operator here acts on the coefficient map directly.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::quadrature::GaussLaguerre;
use crate::unity_logic::{sector_mul, ComplexAmplitude, Sector};

/// Coefficients with modulus below this are dropped after every operation.
pub const PRUNE_THRESHOLD: f64 = 1e-15;

/// One of the two boson modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Z,
    W,
}

/// Sparse state over normalized monomials, keyed by `(n1, n2)`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TwoModeState {
    terms: BTreeMap<(u32, u32), ComplexAmplitude>,
}

impl TwoModeState {
    pub fn zero() -> Self {
        Self::default()
    }

    /// Collects terms, summing duplicate keys, then prunes.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = ((u32, u32), ComplexAmplitude)>,
    {
        let mut map = BTreeMap::new();
        for (key, c) in terms {
            *map.entry(key).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        let mut s = TwoModeState { terms: map };
        s.prune();
        s
    }

    fn prune(&mut self) {
        self.terms.retain(|_, c| c.norm() >= PRUNE_THRESHOLD);
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), ComplexAmplitude)> + '_ {
        self.terms.iter().map(|(&k, &c)| (k, c))
    }

    pub fn coefficient(&self, n1: u32, n2: u32) -> ComplexAmplitude {
        self.terms.get(&(n1, n2)).copied().unwrap_or_default()
    }

    /// Number of stored (nonzero) coefficients.
    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_one_mode(&self) -> bool {
        self.terms.keys().all(|&(_, n2)| n2 == 0)
    }

    /// Largest total degree `n1 + n2`; zero for the empty state.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|&(a, b)| a + b).max().unwrap_or(0)
    }

    pub fn scale(&self, factor: ComplexAmplitude) -> Self {
        Self::from_terms(self.terms().map(|(k, c)| (k, c * factor)))
    }

    pub fn norm_sqr(&self) -> f64 {
        self.terms.values().map(|c| c.norm_sqr()).sum()
    }

    /// Largest coefficient-wise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &TwoModeState) -> f64 {
        let mut worst: f64 = 0.0;
        for (k, c) in self.terms() {
            worst = worst.max((c - other.coefficient(k.0, k.1)).norm());
        }
        for (k, c) in other.terms() {
            if !self.terms.contains_key(&k) {
                worst = worst.max(c.norm());
            }
        }
        worst
    }

    fn map_keys(
        &self,
        f: impl Fn(u32, u32, ComplexAmplitude) -> Option<((u32, u32), ComplexAmplitude)>,
    ) -> Self {
        Self::from_terms(self.terms().filter_map(|((a, b), c)| f(a, b, c)))
    }

    /// Evaluates the holomorphic function at `(z, w)`.
    pub fn evaluate(&self, z: ComplexAmplitude, w: ComplexAmplitude) -> ComplexAmplitude {
        self.terms()
            .map(|((a, b), c)| c * z.powu(a) * w.powu(b) / (factorial(a) * factorial(b)).sqrt())
            .sum()
    }
}

impl Add for &TwoModeState {
    type Output = TwoModeState;
    fn add(self, rhs: &TwoModeState) -> TwoModeState {
        TwoModeState::from_terms(self.terms().chain(rhs.terms()))
    }
}

impl Sub for &TwoModeState {
    type Output = TwoModeState;
    fn sub(self, rhs: &TwoModeState) -> TwoModeState {
        TwoModeState::from_terms(self.terms().chain(rhs.terms().map(|(k, c)| (k, -c))))
    }
}

impl Neg for &TwoModeState {
    type Output = TwoModeState;
    fn neg(self) -> TwoModeState {
        self.scale(Complex64::new(-1.0, 0.0))
    }
}

impl Mul<&TwoModeState> for ComplexAmplitude {
    type Output = TwoModeState;
    fn mul(self, rhs: &TwoModeState) -> TwoModeState {
        rhs.scale(self)
    }
}

fn factorial(n: u32) -> f64 {
    (2..=n).map(f64::from).product()
}

/// The normalized monomial `f_{n1,n2}`.
pub fn monomial(n1: i64, n2: i64) -> Result<TwoModeState> {
    if n1 < 0 || n2 < 0 || n1 > u32::MAX as i64 || n2 > u32::MAX as i64 {
        return Err(Error::InvalidOccupation(n1, n2));
    }
    Ok(TwoModeState::from_terms([(
        (n1 as u32, n2 as u32),
        Complex64::new(1.0, 0.0),
    )]))
}

/// Coherent state `|α⟩` truncated after the `z^truncation` term.
pub fn coherent_state(alpha: ComplexAmplitude, truncation: u32) -> TwoModeState {
    let envelope = (-alpha.norm_sqr() / 2.0).exp();
    let mut c = Complex64::new(envelope, 0.0);
    let mut terms = Vec::with_capacity(truncation as usize + 1);
    for n in 0..=truncation {
        if n > 0 {
            c = c * alpha / f64::from(n).sqrt();
        }
        terms.push(((n, 0), c));
    }
    TwoModeState::from_terms(terms)
}

/// `⟨f|g⟩` using orthonormality of the monomial basis (t = 1).
pub fn inner_product_analytic(f: &TwoModeState, g: &TwoModeState) -> ComplexAmplitude {
    f.terms
        .iter()
        .filter_map(|(k, a)| g.terms.get(k).map(|b| a.conj() * b))
        .sum()
}

/// Gaussian measure parameter and node counts for the numeric inner product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InnerProductConfig {
    pub t: f64,
    pub radial_nodes: usize,
    pub angular_nodes: usize,
}

impl InnerProductConfig {
    pub fn new(t: f64, radial_nodes: usize, angular_nodes: usize) -> Result<Self> {
        if !t.is_finite() || t <= 0.0 {
            return Err(Error::InvalidQuadrature(format!(
                "t = {t} must be positive"
            )));
        }
        if radial_nodes == 0 || angular_nodes == 0 {
            return Err(Error::InvalidQuadrature(
                "node counts must be at least 1".into(),
            ));
        }
        Ok(InnerProductConfig {
            t,
            radial_nodes,
            angular_nodes,
        })
    }

    /// Smallest node counts deemed sufficient for states of total degree `degree`.
    pub fn for_degree(t: f64, degree: u32) -> Result<Self> {
        let d = degree as usize;
        Self::new(t, d + 1, 2 * d + 1)
    }
}

/// Quadrature value plus whether the node counts covered the input degree.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: ComplexAmplitude,
    pub sufficient: bool,
}

/// One-mode integration grid: points in the plane and their weights.
struct ModeGrid {
    points: Vec<ComplexAmplitude>,
    weights: Vec<f64>,
}

impl ModeGrid {
    /// `(πt)^{-1} ∫ h(z) e^{-|z|²/t} d²z` becomes, with `z = sqrt(t u) e^{iθ}`,
    /// `(2π)^{-1} ∫dθ ∫du e^{-u} h`: Gauss–Laguerre in `u`, trapezoid in `θ`.
    fn new(cfg: &InnerProductConfig) -> Self {
        let rule = GaussLaguerre::new(cfg.radial_nodes);
        let a = cfg.angular_nodes;
        let mut points = Vec::with_capacity(rule.len() * a);
        let mut weights = Vec::with_capacity(rule.len() * a);
        for (&u, &wu) in rule.nodes.iter().zip(&rule.weights) {
            let r = (cfg.t * u).sqrt();
            for m in 0..a {
                points.push(Complex64::from_polar(r, TAU * m as f64 / a as f64));
                weights.push(wu / a as f64);
            }
        }
        ModeGrid { points, weights }
    }

    /// `powers[n][p] = z_p^n / sqrt(n!)` for `n ≤ max_degree`.
    fn normalized_powers(&self, max_degree: u32) -> Vec<Vec<ComplexAmplitude>> {
        let mut out: Vec<Vec<ComplexAmplitude>> = Vec::with_capacity(max_degree as usize + 1);
        out.push(vec![Complex64::new(1.0, 0.0); self.points.len()]);
        for n in 1..=max_degree {
            let s = f64::from(n).sqrt();
            let next = out[n as usize - 1]
                .iter()
                .zip(&self.points)
                .map(|(p, z)| p * z / s)
                .collect();
            out.push(next);
        }
        out
    }
}

/// `⟨f|g⟩` by numerical integration against the Gaussian measure with
/// parameter `cfg.t`, one Gauss–Laguerre × trapezoid grid per mode.
///
/// The integrand is a sum of products of one-mode factors, so the
/// two-dimensional grid sum is taken as a product of per-mode sums.
pub fn inner_product_quadrature(
    f: &TwoModeState,
    g: &TwoModeState,
    cfg: &InnerProductConfig,
) -> Result<QuadratureResult> {
    let cfg = InnerProductConfig::new(cfg.t, cfg.radial_nodes, cfg.angular_nodes)?;
    let degree = f.degree().max(g.degree());
    let sufficient = cfg.radial_nodes > degree as usize && cfg.angular_nodes > 2 * degree as usize;

    let max_mode = f
        .terms
        .keys()
        .chain(g.terms.keys())
        .map(|&(a, b)| a.max(b))
        .max()
        .unwrap_or(0);
    let grid = ModeGrid::new(&cfg);
    let powers = grid.normalized_powers(max_mode);
    let mode_integral = |a: u32, b: u32| -> ComplexAmplitude {
        powers[a as usize]
            .iter()
            .zip(&powers[b as usize])
            .zip(&grid.weights)
            .map(|((pa, pb), w)| pa.conj() * pb * *w)
            .sum()
    };

    let mut value = Complex64::new(0.0, 0.0);
    for ((a1, a2), ca) in f.terms() {
        for ((b1, b2), cb) in g.terms() {
            value += ca.conj() * cb * mode_integral(a1, b1) * mode_integral(a2, b2);
        }
    }
    Ok(QuadratureResult { value, sufficient })
}

/// Multiplication by the mode variable.
pub fn apply_create(state: &TwoModeState, mode: Mode) -> TwoModeState {
    state.map_keys(|a, b, c| match mode {
        Mode::Z => Some(((a + 1, b), c * f64::from(a + 1).sqrt())),
        Mode::W => Some(((a, b + 1), c * f64::from(b + 1).sqrt())),
    })
}

/// Differentiation with respect to the mode variable.
pub fn apply_annihilate(state: &TwoModeState, mode: Mode) -> TwoModeState {
    state.map_keys(|a, b, c| match mode {
        Mode::Z if a > 0 => Some(((a - 1, b), c * f64::from(a).sqrt())),
        Mode::W if b > 0 => Some(((a, b - 1), c * f64::from(b).sqrt())),
        _ => None,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorConfig {
    pub hbar_omega: f64,
}

impl OscillatorConfig {
    pub fn new(hbar_omega: f64) -> Result<Self> {
        if !hbar_omega.is_finite() || hbar_omega <= 0.0 {
            return Err(Error::InvalidConfig(format!(
                "hbar_omega = {hbar_omega} must be positive"
            )));
        }
        Ok(OscillatorConfig { hbar_omega })
    }
}

/// `H = ħω (z d/dz + 1/2)` on a one-mode state.
pub fn apply_hamiltonian(state: &TwoModeState, cfg: &OscillatorConfig) -> Result<TwoModeState> {
    if let Some(&(_, n2)) = state.terms.keys().find(|&&(_, n2)| n2 != 0) {
        return Err(Error::ModeMismatch(n2));
    }
    Ok(state.map_keys(|n, b, c| Some(((n, b), c * (cfg.hbar_omega * (f64::from(n) + 0.5))))))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SpinOperator {
    Jx,
    Jy,
    Jz,
    Jsquared,
}

/// `z ∂/∂w`
fn raise(state: &TwoModeState) -> TwoModeState {
    apply_create(&apply_annihilate(state, Mode::W), Mode::Z)
}

/// `w ∂/∂z`
fn lower(state: &TwoModeState) -> TwoModeState {
    apply_create(&apply_annihilate(state, Mode::Z), Mode::W)
}

/// Jordan–Schwinger angular-momentum operators (ħ = 1).
pub fn apply_spin(op: SpinOperator, state: &TwoModeState) -> TwoModeState {
    let half = Complex64::new(0.5, 0.0);
    match op {
        SpinOperator::Jx => half * &(&raise(state) + &lower(state)),
        SpinOperator::Jy => Complex64::new(0.0, -0.5) * &(&raise(state) - &lower(state)),
        SpinOperator::Jz => {
            state.map_keys(|a, b, c| Some(((a, b), c * ((f64::from(a) - f64::from(b)) / 2.0))))
        }
        SpinOperator::Jsquared => {
            let parts = [SpinOperator::Jx, SpinOperator::Jy, SpinOperator::Jz]
                .map(|j| apply_spin(j, &apply_spin(j, state)));
            &(&parts[0] + &parts[1]) + &parts[2]
        }
    }
}

/// Angular-momentum quantum numbers stored doubled so half-integers are exact.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpinLabel {
    two_j: u32,
    two_m: i32,
}

impl SpinLabel {
    pub fn new(two_j: i64, two_m: i64) -> Result<Self> {
        if two_j < 0 || two_j > i32::MAX as i64 || two_m.abs() > two_j || (two_j + two_m) % 2 != 0 {
            return Err(Error::InvalidSpin { two_j, two_m });
        }
        Ok(SpinLabel {
            two_j: two_j as u32,
            two_m: two_m as i32,
        })
    }

    pub fn two_j(self) -> u32 {
        self.two_j
    }

    pub fn two_m(self) -> i32 {
        self.two_m
    }

    pub fn j(self) -> f64 {
        f64::from(self.two_j) / 2.0
    }

    pub fn m(self) -> f64 {
        f64::from(self.two_m) / 2.0
    }

    /// Number of distinct `m` values, `2j + 1`.
    pub fn multiplicity(self) -> u32 {
        self.two_j + 1
    }
}

fn half_integer(twice: i64) -> String {
    if twice % 2 == 0 {
        format!("{}", twice / 2)
    } else {
        format!("{twice}/2")
    }
}

impl fmt::Display for SpinLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "j={}, m={}",
            half_integer(self.two_j as i64),
            half_integer(self.two_m as i64)
        )
    }
}

/// `(n1, n2) = (j + m, j - m)`.
pub fn spin_to_occupation(s: SpinLabel) -> (u32, u32) {
    let (tj, tm) = (s.two_j as i64, s.two_m as i64);
    (((tj + tm) / 2) as u32, ((tj - tm) / 2) as u32)
}

/// `j = (n1 + n2)/2`, `m = (n1 - n2)/2`.
pub fn occupation_to_spin(n1: i64, n2: i64) -> Result<SpinLabel> {
    if n1 < 0 || n2 < 0 {
        return Err(Error::InvalidOccupation(n1, n2));
    }
    SpinLabel::new(n1 + n2, n1 - n2)
}

/// Phase encoding of `f_{n1,n2}`: `(ε_N^{n1}, ε_N^{n2})` with `N = n1 + n2 + 1`.
/// Moduli are dropped.
pub fn encode_state_roots(n1: i64, n2: i64) -> Result<(Sector, Sector)> {
    if n1 < 0 || n2 < 0 || n1 + n2 + 1 > u32::MAX as i64 {
        return Err(Error::InvalidOccupation(n1, n2));
    }
    let order = (n1 + n2 + 1) as u32;
    Ok((Sector::reduced(order, n1), Sector::reduced(order, n2)))
}

/// Canonical text for `f_{n1,n2}`, e.g. `z^3 w / sqrt(6)`.
pub fn monomial_description(n1: u32, n2: u32) -> String {
    let factor = |var: &str, n: u32| match n {
        0 => None,
        1 => Some(var.to_string()),
        _ => Some(format!("{var}^{n}")),
    };
    let factors: Vec<String> = [factor("z", n1), factor("w", n2)]
        .into_iter()
        .flatten()
        .collect();
    let body = if factors.is_empty() {
        "1".to_string()
    } else {
        factors.join(" ")
    };
    let denom: u128 = (2..=n1 as u128).product::<u128>() * (2..=n2 as u128).product::<u128>();
    if denom > 1 {
        format!("{body} / sqrt({denom})")
    } else {
        body
    }
}

/// One row of the roots-of-unity ↔ state-function table.
#[derive(Debug, Clone, PartialEq)]
pub struct TableRow {
    pub root_z: Sector,
    pub root_w: Sector,
    pub product: Sector,
    pub n1: u32,
    pub n2: u32,
    pub spin: SpinLabel,
    pub monomial_description: String,
}

/// Rows for spin `j = two_j/2`, ordered from `m = j` down to `m = -j`.
pub fn table_rows(two_j: u32) -> Result<Vec<TableRow>> {
    if two_j < 1 {
        return Err(Error::InvalidSpin {
            two_j: two_j as i64,
            two_m: 0,
        });
    }
    let tj = two_j as i64;
    (0..=tj)
        .map(|step| {
            let spin = SpinLabel::new(tj, tj - 2 * step)?;
            let (n1, n2) = spin_to_occupation(spin);
            let (root_z, root_w) = encode_state_roots(n1 as i64, n2 as i64)?;
            let product = sector_mul(root_z, root_w)?;
            Ok(TableRow {
                root_z,
                root_w,
                product,
                n1,
                n2,
                spin,
                monomial_description: monomial_description(n1, n2),
            })
        })
        .collect()
}
