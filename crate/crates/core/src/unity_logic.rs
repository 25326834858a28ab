//! Roots-of-unity logic.
//!
//! A k-valued truth value is the root `ε_k^j = exp(2πij/k)`, stored as the
//! pair `(k, j)` in [`Sector`]. The activation [`csign`] sends any nonzero
//! complex number to the root whose half-open sector `[2πj/k, 2π(j+1)/k)`
//! contains its argument.

use std::f64::consts::TAU;
use std::fmt;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A complex number carried through weighted sums, weights and state
/// coefficients.
pub type ComplexAmplitude = Complex64;

/// Relative nudge applied to `arg·k/2π` before flooring so that roots
/// computed in floating point land on their own sector.
const SNAP_EPS: f64 = 1e-12;

/// The root of unity `ε_k^j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sector {
    k: u32,
    j: u32,
}

impl Sector {
    /// Builds `ε_k^j`, reducing `j` modulo `k`.
    pub fn new(k: i64, j: i64) -> Result<Self> {
        if k < 2 || k > u32::MAX as i64 {
            return Err(Error::InvalidOrder(k));
        }
        Ok(Self::reduced(k as u32, j))
    }

    /// Order-one roots only show up for the vacuum in the state encoding;
    /// everything user-facing goes through [`Sector::new`].
    pub(crate) fn reduced(k: u32, j: i64) -> Self {
        debug_assert!(k >= 1);
        Sector {
            k,
            j: j.rem_euclid(k as i64) as u32,
        }
    }

    pub fn order(self) -> u32 {
        self.k
    }

    pub fn index(self) -> u32 {
        self.j
    }

    /// Phase `2πj/k` in `[0, 2π)`.
    pub fn phase(self) -> f64 {
        TAU * self.j as f64 / self.k as f64
    }

    pub fn value(self) -> ComplexAmplitude {
        sector_value(self)
    }

    /// Inverse element `ε_k^{k-j}`.
    pub fn inverse(self) -> Self {
        Self::reduced(self.k, -(self.j as i64))
    }
}

impl fmt::Display for Sector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ε_{}^{}", self.k, self.j)
    }
}

/// Convenience wrapper matching [`Sector::new`].
pub fn make_sector(k: i64, j: i64) -> Result<Sector> {
    Sector::new(k, j)
}

/// `exp(i·2πj/k)`.
pub fn sector_value(s: Sector) -> ComplexAmplitude {
    // Exact values on the axes keep csign(sector_value(s)) stable.
    let (k, j) = (s.k as u64, s.j as u64);
    if j == 0 {
        return Complex64::new(1.0, 0.0);
    }
    if 2 * j == k {
        return Complex64::new(-1.0, 0.0);
    }
    if 4 * j == k {
        return Complex64::new(0.0, 1.0);
    }
    if 4 * j == 3 * k {
        return Complex64::new(0.0, -1.0);
    }
    Complex64::from_polar(1.0, s.phase())
}

/// Argument of `z` normalized into `[0, 2π)`.
pub fn arg_principal(z: ComplexAmplitude) -> Result<f64> {
    if z.re == 0.0 && z.im == 0.0 {
        return Err(Error::ZeroArgument);
    }
    let a = z.im.atan2(z.re);
    let a = if a < 0.0 { a + TAU } else { a + 0.0 };
    // -tiny + 2π can round up to exactly 2π
    Ok(if a >= TAU { 0.0 } else { a })
}

/// What [`csign_with`] does when asked for the sector of zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ZeroPolicy {
    /// Map zero to `ε_k^0` and report it as degenerate.
    #[default]
    FirstSector,
    /// Fail with [`Error::DegenerateActivation`].
    Reject,
}

/// Result of the activation, with the degenerate-input flag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Activation {
    pub sector: Sector,
    pub degenerate: bool,
}

/// The discrete activation `P(z) = csign(z)` under the default zero policy.
pub fn csign(z: ComplexAmplitude, k: u32) -> Result<Sector> {
    csign_with(z, k, ZeroPolicy::FirstSector).map(|a| a.sector)
}

pub fn csign_with(z: ComplexAmplitude, k: u32, policy: ZeroPolicy) -> Result<Activation> {
    if k < 2 {
        return Err(Error::InvalidOrder(k as i64));
    }
    if !z.re.is_finite() || !z.im.is_finite() {
        return Err(Error::NonFinite("activation input"));
    }
    match arg_principal(z) {
        Ok(arg) => {
            let kf = k as f64;
            let scaled = arg * kf / TAU;
            let j = (scaled + SNAP_EPS * kf).floor() as i64;
            Ok(Activation {
                sector: Sector::reduced(k, j),
                degenerate: false,
            })
        }
        Err(_) => match policy {
            ZeroPolicy::FirstSector => Ok(Activation {
                sector: Sector::reduced(k, 0),
                degenerate: true,
            }),
            ZeroPolicy::Reject => Err(Error::DegenerateActivation),
        },
    }
}

/// Product of two roots of the same order.
pub fn sector_mul(a: Sector, b: Sector) -> Result<Sector> {
    if a.k != b.k {
        return Err(Error::OrderMismatch(a.k, b.k));
    }
    Ok(Sector::reduced(a.k, a.j as i64 + b.j as i64))
}

impl std::ops::Mul for Sector {
    type Output = Sector;

    /// Panics on mismatched orders; use [`sector_mul`] for the fallible form.
    fn mul(self, rhs: Sector) -> Sector {
        sector_mul(self, rhs).expect("sector orders must match")
    }
}

/// Hardware cost query `C = scale · r · log N / log r`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadixCostQuery {
    pub radix: u32,
    pub range: f64,
    pub scale: f64,
}

pub fn radix_cost(q: RadixCostQuery) -> Result<f64> {
    if q.radix < 2 {
        return Err(Error::InvalidRadix(format!("radix {} < 2", q.radix)));
    }
    if !q.range.is_finite() || q.range < 2.0 {
        return Err(Error::InvalidRadix(format!("range {} < 2", q.range)));
    }
    if !q.scale.is_finite() || q.scale <= 0.0 {
        return Err(Error::InvalidRadix(format!(
            "scale {} must be positive",
            q.scale
        )));
    }
    let r = q.radix as f64;
    Ok(q.scale * r * q.range.ln() / r.ln())
}

/// Integer radix in `2..=r_max` with minimal cost; ties go to the smaller radix.
pub fn optimal_radix(range: f64, r_max: u32) -> Result<u32> {
    if r_max < 3 {
        return Err(Error::InvalidRadix(format!("r_max {r_max} < 3")));
    }
    let mut best = (
        2u32,
        radix_cost(RadixCostQuery {
            radix: 2,
            range,
            scale: 1.0,
        })?,
    );
    for radix in 3..=r_max {
        let c = radix_cost(RadixCostQuery {
            radix,
            range,
            scale: 1.0,
        })?;
        if c < best.1 {
            best = (radix, c);
        }
    }
    Ok(best.0)
}
