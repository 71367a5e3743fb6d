//! Renormalized energy forms on the vertex chains, harmonic extension and
//! Dirichlet solves, the spline-weighted pointwise Laplacian, the effective
//! resistance metric, and the resistance-metric dimension.

use crate::geometry::GeometryError;
use crate::measure::{integrate, MeasureError, Quadrature};
use crate::params::WeierstrassParams;
use thiserror::Error;

/// Extra refinement levels used when integrating a tent function for the
/// pointwise Laplacian weight.
pub const DEFAULT_SPLINE_DEPTH: usize = 3;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnergyError {
    #[error("expected {expected} vertex values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("level must be >= 1 for a refinement step")]
    LevelTooSmall,
    #[error("vertex {index} is out of range for the level-{level} chain")]
    VertexOutOfRange { index: usize, level: usize },
    #[error("vertex {index} lies on the boundary, which carries no Laplacian value")]
    BoundaryVertex { index: usize },
    #[error("lambda*nb = 1 exactly, on the boundary between the two dimension regimes")]
    RegimeBoundary,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Measure(#[from] MeasureError),
}

/// Per-level renormalization of the edge-sum energy.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    /// Weight ratio nb^(5 - 2 d_w) = nb/lambda^2 per level; the scaling
    /// behind the resistance metric and the counting normalization. Energies
    /// of harmonic functions then grow by nb^(4 - 2 d_w) per level.
    Scaling,
    /// Weight ratio nb per level; harmonic extension conserves energy
    /// exactly.
    Conservative,
}

impl Normalization {
    /// The per-level weight ratio r^{-1}.
    pub fn weight_ratio(&self, p: &WeierstrassParams) -> f64 {
        match self {
            // nb^(5 - 2 d_w) reduces algebraically to nb/lambda^2.
            Normalization::Scaling => p.nb() as f64 / (p.lambda() * p.lambda()),
            Normalization::Conservative => p.nb() as f64,
        }
    }
}

/// The quadratic form `E_m(u) = weight * sum over chain edges (du)^2` with
/// `weight = eta^{-2} * (weight ratio)^m`.
#[derive(Debug, Clone, Copy)]
pub struct EnergyForm {
    pub level: usize,
    pub mode: Normalization,
    pub weight: f64,
}

pub fn energy_form(p: &WeierstrassParams, m: usize, mode: Normalization) -> EnergyForm {
    let weight = mode.weight_ratio(p).powi(m as i32) / (p.eta() * p.eta());
    EnergyForm {
        level: m,
        mode,
        weight,
    }
}

fn expect_len(p: &WeierstrassParams, m: usize, u: &[f64]) -> Result<(), EnergyError> {
    let expected = p
        .chain_len(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    if u.len() != expected {
        return Err(EnergyError::LengthMismatch {
            expected,
            got: u.len(),
        });
    }
    Ok(())
}

/// Level-`m` energy of the vertex values `u`.
pub fn energy(
    p: &WeierstrassParams,
    m: usize,
    u: &[f64],
    mode: Normalization,
) -> Result<f64, EnergyError> {
    expect_len(p, m, u)?;
    let form = energy_form(p, m, mode);
    let sum: f64 = u.windows(2).map(|w| (w[1] - w[0]) * (w[1] - w[0])).sum();
    Ok(form.weight * sum)
}

/// Fills one refined segment: given endpoint values `left` and `right` and
/// the eigenvalue parameter `lam`, returns the `nb + 1` values satisfying
/// `(2 - lam) u_k = u_{k-1} + u_{k+1}` at the `nb - 1` interior points.
/// Propagates `u_k = alpha_k + beta_k * t` with `t = u_1` unknown, then
/// matches the right endpoint. `beta_nb` vanishes exactly when `lam` is a
/// Dirichlet eigenvalue of the segment, the caller's forbidden set.
pub(crate) fn segment_solve(nb: usize, lam: f64, left: f64, right: f64) -> Option<Vec<f64>> {
    // Write u_k = alpha_k + beta_k * t with t = u_1 unknown; the recurrence
    // propagates both coefficients, and matching u_nb = right fixes t.
    let (mut a_prev, mut b_prev) = (left, 0.0);
    let (mut a_cur, mut b_cur) = (0.0, 1.0);
    for _ in 1..nb {
        let a_next = (2.0 - lam) * a_cur - a_prev;
        let b_next = (2.0 - lam) * b_cur - b_prev;
        a_prev = a_cur;
        b_prev = b_cur;
        a_cur = a_next;
        b_cur = b_next;
    }
    if b_cur == 0.0 {
        return None;
    }
    let t = (right - a_cur) / b_cur;
    let mut out = Vec::with_capacity(nb + 1);
    out.push(left);
    let (mut u_prev, mut u_cur) = (left, t);
    for _ in 1..nb {
        out.push(u_cur);
        let next = (2.0 - lam) * u_cur - u_prev;
        u_prev = u_cur;
        u_cur = next;
    }
    out.push(right);
    Some(out)
}

/// Minimal-energy extension of level-`(m-1)` vertex values to level `m`:
/// each parent edge is refined into `nb` edges and its interior filled by
/// the segment Dirichlet solve, which here reduces to linear interpolation.
pub fn harmonic_extend(
    p: &WeierstrassParams,
    m: usize,
    u_parent: &[f64],
) -> Result<Vec<f64>, EnergyError> {
    if m < 1 {
        return Err(EnergyError::LevelTooSmall);
    }
    expect_len(p, m - 1, u_parent)?;
    let nb = p.nb();
    let fine_len = p
        .chain_len(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    let mut out = Vec::with_capacity(fine_len);
    for w in u_parent.windows(2) {
        let seg = segment_solve(nb, 0.0, w[0], w[1])
            .expect("lam = 0 never hits the segment Dirichlet spectrum");
        out.extend_from_slice(&seg[..nb]);
    }
    out.push(*u_parent.last().expect("parent chain is nonempty"));
    debug_assert_eq!(out.len(), fine_len);
    Ok(out)
}

/// Discrete-harmonic function on the level-`m` chain with the given values
/// at the `nb` level-0 vertices: iterated harmonic extension.
pub fn dirichlet_solve(
    p: &WeierstrassParams,
    m: usize,
    boundary: &[f64],
) -> Result<Vec<f64>, EnergyError> {
    if boundary.len() != p.nb() {
        return Err(EnergyError::LengthMismatch {
            expected: p.nb(),
            got: boundary.len(),
        });
    }
    let mut u = boundary.to_vec();
    for level in 1..=m {
        u = harmonic_extend(p, level, &u)?;
    }
    Ok(u)
}

/// `sum over chain neighbors Y of X of (u(Y) - u(X))`, the order-`m` graph
/// Laplacian at an interior vertex.
pub fn laplacian_apply(
    p: &WeierstrassParams,
    m: usize,
    u: &[f64],
    index: usize,
) -> Result<f64, EnergyError> {
    expect_len(p, m, u)?;
    if index >= u.len() {
        return Err(EnergyError::VertexOutOfRange { index, level: m });
    }
    let cell = p
        .nb_pow(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    if index % cell == 0 {
        return Err(EnergyError::BoundaryVertex { index });
    }
    Ok(u[index - 1] + u[index + 1] - 2.0 * u[index])
}

/// Quadrature mass of the tent function that is 1 at vertex `index` of the
/// level-`m` chain and 0 at every other level-`m` vertex, harmonically
/// extended `depth` further levels before integrating.
pub fn spline_integral(
    p: &WeierstrassParams,
    m: usize,
    index: usize,
    depth: usize,
) -> Result<f64, EnergyError> {
    let len = p
        .chain_len(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    if index >= len {
        return Err(EnergyError::VertexOutOfRange { index, level: m });
    }
    let cell = p
        .nb_pow(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    if index % cell == 0 {
        return Err(EnergyError::BoundaryVertex { index });
    }
    let mut tent = vec![0.0; len];
    tent[index] = 1.0;
    for level in m + 1..=m + depth {
        tent = harmonic_extend(p, level, &tent)?;
    }
    Ok(integrate(p, m + depth, &tent, Quadrature::MeanValue)?)
}

/// Renormalized pointwise Laplacian at vertex `index`:
/// `eta^{-2} (weight ratio)^m (integral of the tent at index)^{-1} Delta_m u`.
pub fn pointwise_laplacian(
    p: &WeierstrassParams,
    m: usize,
    u: &[f64],
    index: usize,
    mode: Normalization,
) -> Result<f64, EnergyError> {
    let raw = laplacian_apply(p, m, u, index)?;
    let mass = spline_integral(p, m, index, DEFAULT_SPLINE_DEPTH)?;
    let scale = mode.weight_ratio(p).powi(m as i32) / (p.eta() * p.eta());
    Ok(scale * raw / mass)
}

/// Effective resistance between chain vertices `i` and `j` at level `m`:
/// the reciprocal of the minimal energy among functions with `u(i) = 0`,
/// `u(j) = 1`. The minimizer is constant outside `[i, j]` and affine inside,
/// so the value is the series resistance `eta^2 (weight ratio)^{-m} |i - j|`.
pub fn resistance(
    p: &WeierstrassParams,
    m: usize,
    i: usize,
    j: usize,
    mode: Normalization,
) -> Result<f64, EnergyError> {
    let len = p
        .chain_len(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    for &index in [i, j].iter() {
        if index >= len {
            return Err(EnergyError::VertexOutOfRange { index, level: m });
        }
    }
    if i == j {
        return Ok(0.0);
    }
    let (lo, hi) = (i.min(j), i.max(j));
    let mut u = vec![0.0; len];
    let span = (hi - lo) as f64;
    for (k, slot) in u.iter_mut().enumerate() {
        *slot = if k <= lo {
            0.0
        } else if k >= hi {
            1.0
        } else {
            (k - lo) as f64 / span
        };
    }
    let e = energy(p, m, &u, mode)?;
    Ok(1.0 / e)
}

/// Case split of the resistance-dimension formula on lambda versus 1/nb.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ResistanceCase {
    /// lambda*nb > 1 (the fractal regime): d = ln(nb/lambda) / ((5 - 2 d_w) ln nb).
    Fractal,
    /// lambda*nb < 1 (the rectifiable regime): d = 2 / (5 - 2 d_w).
    Rectifiable,
}

impl ResistanceCase {
    /// Conventional label for reports: "i" for the fractal regime, "ii" for
    /// the rectifiable one.
    pub fn label(&self) -> &'static str {
        match self {
            ResistanceCase::Fractal => "i",
            ResistanceCase::Rectifiable => "ii",
        }
    }
}

/// Dimension of the attractor in the effective resistance metric.
pub fn resistance_dimension(p: &WeierstrassParams) -> Result<(ResistanceCase, f64), EnergyError> {
    let nb = p.nb() as f64;
    let exponent = 5.0 - 2.0 * p.d_w();
    let product = p.lambda() * nb;
    if product == 1.0 {
        return Err(EnergyError::RegimeBoundary);
    }
    if product > 1.0 {
        Ok((
            ResistanceCase::Fractal,
            (nb / p.lambda()).ln() / (exponent * nb.ln()),
        ))
    } else {
        Ok((ResistanceCase::Rectifiable, 2.0 / exponent))
    }
}

/// Exponent `d / (d + 1)` governing the eigenvalue-counting growth in the
/// resistance metric.
pub fn weyl_exponent(d: f64) -> f64 {
    d / (d + 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn half_three() -> WeierstrassParams {
        WeierstrassParams::new(0.5, 3, true).unwrap()
    }

    #[test]
    fn weight_ratios_at_half_three() {
        let p = half_three();
        // nb^(5 - 2 d_w) with d_w = 2 - ln2/ln3 equals nb/lambda^2 = 12.
        assert_abs_diff_eq!(
            Normalization::Scaling.weight_ratio(&p),
            (p.nb() as f64).powf(5.0 - 2.0 * p.d_w()),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(Normalization::Scaling.weight_ratio(&p), 12.0);
        assert_abs_diff_eq!(Normalization::Conservative.weight_ratio(&p), 3.0);
    }

    #[test]
    fn energy_of_constant_vanishes() {
        let p = half_three();
        let u = vec![2.5; p.chain_len(2).unwrap()];
        assert_eq!(energy(&p, 2, &u, Normalization::Scaling).unwrap(), 0.0);
    }

    #[test]
    fn level_zero_energy_of_the_ramp() {
        // Two edges of squared increment 0.25 each, weight eta^{-2}.
        let p = half_three();
        let e = energy(&p, 0, &[0.0, 0.5, 1.0], Normalization::Scaling).unwrap();
        assert_abs_diff_eq!(e, 0.5 / (p.eta() * p.eta()), epsilon = 1e-15);
    }

    #[test]
    fn energy_is_quadratic_under_scaling() {
        let p = half_three();
        let u: Vec<f64> = (0..p.chain_len(1).unwrap())
            .map(|k| (k as f64).sin())
            .collect();
        let scaled: Vec<f64> = u.iter().map(|v| 3.0 * v).collect();
        let e1 = energy(&p, 1, &u, Normalization::Conservative).unwrap();
        let e9 = energy(&p, 1, &scaled, Normalization::Conservative).unwrap();
        assert_abs_diff_eq!(e9, 9.0 * e1, epsilon = 1e-12);
    }

    #[test]
    fn extension_of_constant_is_constant() {
        let p = half_three();
        let out = harmonic_extend(&p, 1, &[4.0, 4.0, 4.0]).unwrap();
        assert!(out.iter().all(|&v| (v - 4.0).abs() < 1e-15));
    }

    #[test]
    fn extension_of_ramp_is_linear_in_chain_position() {
        // Solving the 4-unknown tridiagonal system for boundary (0, 1/2, 1)
        // gives k/6 at chain position k.
        let p = half_three();
        let out = harmonic_extend(&p, 1, &[0.0, 0.5, 1.0]).unwrap();
        assert_eq!(out.len(), 7);
        for (k, v) in out.iter().enumerate() {
            assert_abs_diff_eq!(*v, k as f64 / 6.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn extension_matches_linear_interpolation_generally() {
        let p = WeierstrassParams::new(0.6, 4, true).unwrap();
        let parent = [1.0, -2.0, 0.5, 3.0];
        let out = harmonic_extend(&p, 1, &parent).unwrap();
        for (e, w) in parent.windows(2).enumerate() {
            for t in 0..=4 {
                let expected = w[0] + (w[1] - w[0]) * t as f64 / 4.0;
                assert_abs_diff_eq!(out[4 * e + t], expected, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn perturbing_the_extension_never_lowers_energy() {
        let p = half_three();
        let parent = [0.3, -1.0, 2.0];
        let base = harmonic_extend(&p, 1, &parent).unwrap();
        let e0 = energy(&p, 1, &base, Normalization::Conservative).unwrap();
        // Deterministic perturbations of every interior non-parent vertex.
        for k in 0..base.len() {
            if k % 3 == 0 {
                continue; // parent vertex, pinned
            }
            for delta in [-0.25, 0.1, 0.7] {
                let mut u = base.clone();
                u[k] += delta;
                let e = energy(&p, 1, &u, Normalization::Conservative).unwrap();
                assert!(
                    e >= e0 - 1e-12,
                    "perturbation at {k} by {delta} lowered energy"
                );
            }
        }
    }

    #[test]
    fn conservative_extension_conserves_energy() {
        let p = half_three();
        let parent = [0.0, 0.5, 1.0];
        let coarse = energy(&p, 0, &parent, Normalization::Conservative).unwrap();
        let fine = harmonic_extend(&p, 1, &parent).unwrap();
        let refined = energy(&p, 1, &fine, Normalization::Conservative).unwrap();
        assert_abs_diff_eq!(refined, coarse, epsilon = 1e-12);
    }

    #[test]
    fn dirichlet_solve_of_constant_boundary_is_constant() {
        let p = half_three();
        let u = dirichlet_solve(&p, 3, &[7.0, 7.0, 7.0]).unwrap();
        assert!(u.iter().all(|&v| (v - 7.0).abs() < 1e-12));
    }

    #[test]
    fn dirichlet_solve_is_affine_for_ramp_boundary() {
        let p = half_three();
        for m in 1..=4 {
            let u = dirichlet_solve(&p, m, &[0.0, 0.5, 1.0]).unwrap();
            let n = u.len() - 1;
            for (k, v) in u.iter().enumerate() {
                assert_abs_diff_eq!(*v, k as f64 / n as f64, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn solve_then_extend_equals_deeper_solve() {
        let p = half_three();
        let boundary = [1.0, -0.5, 0.25];
        let shallow = dirichlet_solve(&p, 2, &boundary).unwrap();
        let extended = harmonic_extend(&p, 3, &shallow).unwrap();
        let deep = dirichlet_solve(&p, 3, &boundary).unwrap();
        for (a, b) in extended.iter().zip(&deep) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn laplacian_of_affine_sequences_vanishes() {
        let p = half_three();
        let len = p.chain_len(1).unwrap();
        let u: Vec<f64> = (0..len).map(|k| 3.0 * k as f64 - 1.0).collect();
        for k in [1, 2, 4, 5] {
            assert_abs_diff_eq!(laplacian_apply(&p, 1, &u, k).unwrap(), 0.0);
        }
    }

    #[test]
    fn laplacian_of_squared_position_is_two() {
        let p = half_three();
        let len = p.chain_len(2).unwrap();
        let u: Vec<f64> = (0..len).map(|k| (k as f64) * (k as f64)).collect();
        for k in 1..len - 1 {
            if k % 9 == 0 {
                continue;
            }
            assert_abs_diff_eq!(laplacian_apply(&p, 2, &u, k).unwrap(), 2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn laplacian_rejects_boundary_vertices() {
        let p = half_three();
        let u = vec![0.0; p.chain_len(1).unwrap()];
        for k in [0, 3, 6] {
            assert!(matches!(
                laplacian_apply(&p, 1, &u, k),
                Err(EnergyError::BoundaryVertex { .. })
            ));
        }
    }

    #[test]
    fn tent_masses_are_positive_and_sum_with_boundary_tents_to_one() {
        let p = half_three();
        let m = 1;
        let len = p.chain_len(m).unwrap();
        let mut interior_total = 0.0;
        for k in [1, 2, 4, 5] {
            let mass = spline_integral(&p, m, k, DEFAULT_SPLINE_DEPTH).unwrap();
            assert!(mass > 0.0);
            interior_total += mass;
        }
        // Boundary tents, integrated the same way, complete the partition
        // of unity: the tents sum to the constant 1.
        let mut boundary_total = 0.0;
        for k in [0, 3, 6] {
            let mut tent = vec![0.0; len];
            tent[k] = 1.0;
            for level in m + 1..=m + DEFAULT_SPLINE_DEPTH {
                tent = harmonic_extend(&p, level, &tent).unwrap();
            }
            boundary_total +=
                integrate(&p, m + DEFAULT_SPLINE_DEPTH, &tent, Quadrature::MeanValue).unwrap();
        }
        assert_abs_diff_eq!(interior_total + boundary_total, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn mirror_symmetric_vertices_have_equal_tent_mass() {
        // The ordinates are symmetric about x = 1/2, and so are the cell
        // measures, hence the masses at chain positions k and 6-k agree.
        let p = half_three();
        let left = spline_integral(&p, 1, 1, DEFAULT_SPLINE_DEPTH).unwrap();
        let right = spline_integral(&p, 1, 5, DEFAULT_SPLINE_DEPTH).unwrap();
        assert_abs_diff_eq!(left, right, epsilon = 1e-12);
        let mid_left = spline_integral(&p, 1, 2, DEFAULT_SPLINE_DEPTH).unwrap();
        let mid_right = spline_integral(&p, 1, 4, DEFAULT_SPLINE_DEPTH).unwrap();
        assert_abs_diff_eq!(mid_left, mid_right, epsilon = 1e-12);
    }

    #[test]
    fn pointwise_laplacian_of_harmonic_functions_vanishes() {
        let p = half_three();
        for m in 1..=3 {
            let u = dirichlet_solve(&p, m, &[0.2, -1.0, 0.8]).unwrap();
            let cell = p.nb_pow(m).unwrap();
            for k in 1..u.len() - 1 {
                if k % cell == 0 {
                    continue;
                }
                let v = pointwise_laplacian(&p, m, &u, k, Normalization::Scaling).unwrap();
                assert_abs_diff_eq!(v, 0.0, epsilon = 1e-10);
            }
        }
    }

    #[test]
    fn resistance_of_a_vertex_with_itself_is_zero() {
        let p = half_three();
        assert_eq!(
            resistance(&p, 2, 5, 5, Normalization::Scaling).unwrap(),
            0.0
        );
    }

    #[test]
    fn level_zero_adjacent_resistance_is_eta_squared() {
        let p = half_three();
        let r = resistance(&p, 0, 0, 1, Normalization::Scaling).unwrap();
        assert_abs_diff_eq!(r, p.eta() * p.eta(), epsilon = 1e-9);
    }

    #[test]
    fn resistance_matches_the_series_closed_form() {
        let p = half_three();
        for m in 1..=3 {
            let ratio = Normalization::Scaling.weight_ratio(&p);
            for (i, j) in [(0usize, 1usize), (1, 5), (0, p.chain_len(m).unwrap() - 1)] {
                let r = resistance(&p, m, i, j, Normalization::Scaling).unwrap();
                let expected =
                    p.eta() * p.eta() * ratio.powi(-(m as i32)) * (j as f64 - i as f64).abs();
                assert_abs_diff_eq!(r, expected, epsilon = expected * 1e-12);
            }
        }
    }

    #[test]
    fn chain_resistance_is_additive() {
        let p = half_three();
        let (x, y, z) = (1usize, 4usize, 6usize);
        let xy = resistance(&p, 2, x, y, Normalization::Conservative).unwrap();
        let yz = resistance(&p, 2, y, z, Normalization::Conservative).unwrap();
        let xz = resistance(&p, 2, x, z, Normalization::Conservative).unwrap();
        assert_abs_diff_eq!(xz, xy + yz, epsilon = 1e-12 * xz);
    }

    #[test]
    fn resistance_is_symmetric() {
        let p = half_three();
        let a = resistance(&p, 1, 2, 6, Normalization::Scaling).unwrap();
        let b = resistance(&p, 1, 6, 2, Normalization::Scaling).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn dimension_case_split() {
        let p = half_three();
        let (case, d) = resistance_dimension(&p).unwrap();
        assert_eq!(case, ResistanceCase::Fractal);
        assert_abs_diff_eq!(d, 6.0_f64.ln() / 12.0_f64.ln(), epsilon = 1e-12);
        // Identity behind the shortcut: (5 - 2 d_w) ln nb = ln(nb/lambda^2).
        let direct = (3.0_f64 / 0.5).ln() / ((5.0 - 2.0 * p.d_w()) * 3.0_f64.ln());
        assert_abs_diff_eq!(d, direct, epsilon = 1e-12);

        let q = WeierstrassParams::new(0.25, 3, false).unwrap();
        let (case, d) = resistance_dimension(&q).unwrap();
        assert_eq!(case, ResistanceCase::Rectifiable);
        assert_abs_diff_eq!(d, 2.0 / (5.0 - 2.0 * q.d_w()), epsilon = 1e-15);
        // 5 - 2 d_w = 1 + 4 ln2/ln3 here; the quotient rounds to 0.567582.
        assert_abs_diff_eq!(
            d,
            2.0 / (1.0 + 4.0 * 2.0_f64.ln() / 3.0_f64.ln()),
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(d, 0.567582, epsilon = 1e-6);
    }

    #[test]
    fn regime_boundary_is_rejected() {
        let p = WeierstrassParams::new(1.0 / 3.0, 3, false).unwrap();
        assert!(matches!(
            resistance_dimension(&p),
            Err(EnergyError::RegimeBoundary)
        ));
    }

    #[test]
    fn weyl_exponent_at_half_three() {
        let (_, d) = resistance_dimension(&half_three()).unwrap();
        let alpha = weyl_exponent(d);
        // d = ln6/ln12 gives alpha = ln6/ln72.
        assert_abs_diff_eq!(alpha, 6.0_f64.ln() / 72.0_f64.ln(), epsilon = 1e-12);
    }
}
