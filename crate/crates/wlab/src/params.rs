//! Parameter set shared by every other module: a contraction factor
//! `lambda` in (0,1) and an integer base `nb >= 2`, together with the two
//! derived constants used throughout (the box dimension `d_w` of the graph
//! and the height-bound constant `eta`).

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ParamError {
    #[error("lambda must lie strictly between 0 and 1, got {0}")]
    LambdaOutOfRange(f64),
    #[error("nb must be an integer >= 2, got {0}")]
    BaseTooSmall(usize),
    #[error("lambda*nb <= 1: strict mode requires lambda*nb > 1 (lambda = {lambda}, nb = {nb})")]
    NotStrict { lambda: f64, nb: usize },
}

/// Validated parameter pair with its derived constants.
///
/// `strict` records whether the pair was required to satisfy `lambda*nb > 1`,
/// the regime in which the graph has box dimension strictly above 1.
/// Non-strict parameters are accepted (with `strict = false`) so that the
/// dimension formulas for the rectifiable regime stay reachable; geometry
/// operations emit a warning when used there.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeierstrassParams {
    lambda: f64,
    nb: usize,
    strict: bool,
    d_w: f64,
    eta: f64,
}

impl WeierstrassParams {
    pub fn new(lambda: f64, nb: usize, strict: bool) -> Result<Self, ParamError> {
        if !lambda.is_finite() || lambda <= 0.0 || lambda >= 1.0 {
            return Err(ParamError::LambdaOutOfRange(lambda));
        }
        if nb < 2 {
            return Err(ParamError::BaseTooSmall(nb));
        }
        if strict && lambda * nb as f64 <= 1.0 {
            return Err(ParamError::NotStrict { lambda, nb });
        }
        let d_w = 2.0 + lambda.ln() / (nb as f64).ln();
        let eta = height_bound_constant(lambda, nb, d_w);
        Ok(Self {
            lambda,
            nb,
            strict,
            d_w,
            eta,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn nb(&self) -> usize {
        self.nb
    }

    pub fn strict(&self) -> bool {
        self.strict
    }

    /// Box dimension of the graph: `2 + ln(lambda)/ln(nb)`.
    pub fn d_w(&self) -> f64 {
        self.d_w
    }

    /// Constant bounding the vertical extent of the graph over a width-`L_m`
    /// interval by `eta * L_m^(2 - d_w)`.
    pub fn eta(&self) -> f64 {
        self.eta
    }

    /// True when `lambda * nb > 1`, the regime in which the graph is fractal.
    pub fn is_fractal_regime(&self) -> bool {
        self.lambda * self.nb as f64 > 1.0
    }

    /// Horizontal mesh at level `m`: `L_m = 1 / ((nb-1) * nb^m)`.
    pub fn width(&self, m: usize) -> f64 {
        1.0 / ((self.nb - 1) as f64 * (self.nb as f64).powi(m as i32))
    }

    /// Upper bound on the vertical extent of the graph over one level-`m`
    /// mesh interval: `eta * L_m^(2 - d_w)`.
    pub fn height_bound(&self, m: usize) -> f64 {
        self.eta * self.width(m).powf(2.0 - self.d_w)
    }

    /// `nb^m`, or `None` on overflow.
    pub fn nb_pow(&self, m: usize) -> Option<usize> {
        let exp: u32 = m.try_into().ok()?;
        self.nb.checked_pow(exp)
    }

    /// Number of vertices of the level-`m` chain.
    pub fn chain_len(&self, m: usize) -> Option<usize> {
        let cells = self.nb_pow(m)?;
        (self.nb - 1).checked_mul(cells)?.checked_add(1)
    }
}

/// Closed form of the height-bound constant:
///
/// `2 pi^2 (nb-1)^(2-d_w) * [ (2nb-1) lambda (nb^2-1) / ((nb-1)^2 (1-lambda) (lambda nb^2 - 1))
///                            + 2 nb / ((lambda nb^2 - 1)(lambda nb^3 - 1)) ]`
fn height_bound_constant(lambda: f64, nb: usize, d_w: f64) -> f64 {
    let n = nb as f64;
    let first = (2.0 * n - 1.0) * lambda * (n * n - 1.0)
        / ((n - 1.0).powi(2) * (1.0 - lambda) * (lambda * n * n - 1.0));
    let second = 2.0 * n / ((lambda * n * n - 1.0) * (lambda * n * n * n - 1.0));
    2.0 * std::f64::consts::PI.powi(2) * (n - 1.0).powf(2.0 - d_w) * (first + second)
}
