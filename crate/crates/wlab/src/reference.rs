//! Closed-form reference values on two classical spaces, the unit interval
//! and the Sierpinski gasket, used as external anchors for the resistance
//! and dimension machinery.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ReferenceError {
    #[error("point {value} lies outside the unit interval")]
    OutOfDomain { value: f64 },
    #[error("endpoints snap to the same dyadic node at refinement {p}")]
    DegenerateEndpoints { p: u32 },
}

/// Resistance scaling ratio, walk exponent, and spectral-volume exponent of
/// the Sierpinski gasket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GasketConstants {
    pub r_sg: f64,
    pub beta_sg: f64,
    pub d_sg: f64,
}

pub fn gasket_constants() -> GasketConstants {
    let ratio = (5.0_f64 / 3.0).ln();
    GasketConstants {
        r_sg: 3.0 / 5.0,
        beta_sg: ratio / 2.0_f64.ln(),
        d_sg: 3.0_f64.ln() / ratio,
    }
}

fn check_domain(value: f64) -> Result<f64, ReferenceError> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(ReferenceError::OutOfDomain { value })
    }
}

/// Effective resistance between two points of the unit interval: the
/// distance `|y - x|`.
pub fn interval_resistance(x: f64, y: f64) -> Result<f64, ReferenceError> {
    Ok((check_domain(y)? - check_domain(x)?).abs())
}

/// Per-cell conductance weight at dyadic refinement depth p.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IntervalWeight {
    /// 2^p per cell. The discrete energy of the affine minimizer is then
    /// independent of p and reproduces 1/(y - x) exactly on dyadic points.
    Doubling,
    /// 2^-p per cell; kept for comparison, the energy decays like 4^-p.
    Halving,
}

impl IntervalWeight {
    pub fn factor(&self, p: u32) -> f64 {
        match self {
            IntervalWeight::Doubling => (2.0_f64).powi(p as i32),
            IntervalWeight::Halving => (2.0_f64).powi(-(p as i32)),
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            IntervalWeight::Doubling => "doubling",
            IntervalWeight::Halving => "halving",
        }
    }
}

/// Discrete energy at refinement depth p of the piecewise-affine minimizer
/// joining `x` to `y`, both snapped to the nearest node of the 2^p-cell
/// grid: the weighted sum of squared increments of the unit ramp between
/// the snapped nodes.
pub fn interval_energy(
    x: f64,
    y: f64,
    p: u32,
    weight: IntervalWeight,
) -> Result<f64, ReferenceError> {
    check_domain(x)?;
    check_domain(y)?;
    let cells = 1u64 << p;
    let kx = (x * cells as f64).round() as u64;
    let ky = (y * cells as f64).round() as u64;
    if kx == ky {
        return Err(ReferenceError::DegenerateEndpoints { p });
    }
    let (lo, hi) = (kx.min(ky), kx.max(ky));
    let span = (hi - lo) as f64;
    let w = weight.factor(p);
    let mut energy = 0.0;
    for _ in lo..hi {
        let increment = 1.0 / span;
        energy += w * increment * increment;
    }
    Ok(energy)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEnergyRow {
    pub p: u32,
    pub energy: f64,
}

/// Energies of the affine minimizer for p = 1..=p_max; depths where both
/// endpoints snap to the same node are omitted.
pub fn interval_energy_table(
    x: f64,
    y: f64,
    p_max: u32,
    weight: IntervalWeight,
) -> Result<Vec<IntervalEnergyRow>, ReferenceError> {
    check_domain(x)?;
    check_domain(y)?;
    let mut rows = Vec::new();
    for p in 1..=p_max {
        match interval_energy(x, y, p, weight) {
            Ok(energy) => rows.push(IntervalEnergyRow { p, energy }),
            Err(ReferenceError::DegenerateEndpoints { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Ok(rows)
}
