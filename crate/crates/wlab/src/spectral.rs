//! Dirichlet Laplacian matrices on the vertex chains, their spectra (dense
//! eigensolve and closed-form oracle), the spectral-decimation recurrence
//! with full branch bookkeeping, eigenfunction extension, the eigenvalue
//! counting function, and growth-rate analysis.

use crate::energy::segment_solve;
use crate::geometry::GeometryError;
use crate::params::WeierstrassParams;
use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

/// Grouping tolerance for eigenvalues: two values closer than this are the
/// same spectral point. Dense solves at the sizes used here are accurate to
/// about 1e-12, and the tightest genuine gap stays above 1e-6.
pub const SPECTRUM_TOLERANCE: f64 = 1e-9;

/// An extension value closer than this to the refinement's forbidden set is
/// rejected before the near-singular segment solve can amplify noise.
pub const FORBIDDEN_TOLERANCE: f64 = 1e-8;

/// Eigensolve level cap when `WLAB_MAX_LEVEL` is not set.
pub const DEFAULT_MAX_EIGENSOLVE_LEVEL: usize = 7;

/// Reads the `WLAB_MAX_LEVEL` cap for dense eigensolves; unset or malformed
/// values fall back to the default.
pub fn max_eigensolve_level() -> usize {
    std::env::var("WLAB_MAX_LEVEL")
        .ok()
        .and_then(|s| s.parse().ok())
        .unwrap_or(DEFAULT_MAX_EIGENSOLVE_LEVEL)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectralError {
    #[error("level must be >= 1 for a Dirichlet spectrum")]
    LevelTooSmall,
    #[error("level {level} exceeds the eigensolve cap {max} (set WLAB_MAX_LEVEL to raise it)")]
    EigensolveCap { level: usize, max: usize },
    #[error("decimation parent {value} lies outside [0, 4]")]
    ParentOutOfRange { value: f64 },
    #[error("value {value} is within {FORBIDDEN_TOLERANCE:e} of the forbidden set, the segment system is singular there")]
    ForbiddenValue { value: f64 },
    #[error("expected {expected} vertex values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("tree depth must be >= 1")]
    DepthTooSmall,
    #[error("level range must be nonempty and start at 1 or above")]
    EmptyRange,
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

mod linalg {
    /// Eigenvalues of the symmetric tridiagonal matrix with diagonal `d` and
    /// off-diagonal `e`, by QL sweeps with implicit shifts, values only.
    /// Deterministic; ascending order.
    pub(crate) fn symmetric_tridiagonal_eigenvalues(mut d: Vec<f64>, off: &[f64]) -> Vec<f64> {
        let n = d.len();
        debug_assert_eq!(off.len(), n.saturating_sub(1));
        if n <= 1 {
            return d;
        }
        let mut e = off.to_vec();
        e.push(0.0);
        for l in 0..n {
            let mut sweeps = 0;
            loop {
                // Split point: the first negligible off-diagonal at or past l.
                let mut m = l;
                while m + 1 < n {
                    let dd = d[m].abs() + d[m + 1].abs();
                    if e[m].abs() <= f64::EPSILON * dd {
                        break;
                    }
                    m += 1;
                }
                if m == l {
                    break;
                }
                sweeps += 1;
                assert!(sweeps < 64, "QL sweep failed to converge");
                // Implicit shift from the leading 2x2 block.
                let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
                let mut r = g.hypot(1.0);
                g = d[m] - d[l] + e[l] / (g + r.copysign(g));
                let (mut s, mut c) = (1.0_f64, 1.0_f64);
                let mut p = 0.0_f64;
                let mut underflow = false;
                for i in (l..m).rev() {
                    let f = s * e[i];
                    let b = c * e[i];
                    r = f.hypot(g);
                    e[i + 1] = r;
                    if r == 0.0 {
                        d[i + 1] -= p;
                        e[m] = 0.0;
                        underflow = true;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2.0 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if underflow {
                    continue;
                }
                d[l] -= p;
                e[l] = g;
                e[m] = 0.0;
            }
        }
        d.sort_by(f64::total_cmp);
        d
    }

}

/// The matrix of the negated order-`m` Laplacian restricted to the interior
/// vertices: block diagonal with `nb - 1` identical second-difference blocks
/// of size `nb^m - 1`, one per inter-boundary stretch of the chain.
#[derive(Debug, Clone, Copy)]
pub struct DirichletMatrix {
    level: usize,
    nb: usize,
    block_size: usize,
}

impl DirichletMatrix {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn block_count(&self) -> usize {
        self.nb - 1
    }

    pub fn block_size(&self) -> usize {
        self.block_size
    }

    pub fn size(&self) -> usize {
        self.block_count() * self.block_size
    }

    /// Entry (i, j) of the full matrix.
    pub fn entry(&self, i: usize, j: usize) -> f64 {
        if i >= self.size() || j >= self.size() || i / self.block_size != j / self.block_size {
            return 0.0;
        }
        match i.abs_diff(j) {
            0 => 2.0,
            1 => -1.0,
            _ => 0.0,
        }
    }
}

pub fn dirichlet_matrix(p: &WeierstrassParams, m: usize) -> Result<DirichletMatrix, SpectralError> {
    if m < 1 {
        return Err(SpectralError::LevelTooSmall);
    }
    let cells = p
        .nb_pow(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    Ok(DirichletMatrix {
        level: m,
        nb: p.nb(),
        block_size: cells - 1,
    })
}

/// How a spectrum was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    /// Dense eigensolve of the Dirichlet matrix.
    Direct,
    /// Spectral-decimation recurrence.
    Decimation,
    /// Closed-form path-graph spectrum, used to validate the dense solve.
    Oracle,
}

impl Provenance {
    pub fn label(&self) -> &'static str {
        match self {
            Provenance::Direct => "direct",
            Provenance::Decimation => "decimation",
            Provenance::Oracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrumEntry {
    pub value: f64,
    pub multiplicity: usize,
}

/// Grouped eigenvalues of one level's Dirichlet problem.
#[derive(Debug, Clone)]
pub struct Spectrum {
    level: usize,
    provenance: Provenance,
    entries: Vec<SpectrumEntry>,
}

impl Spectrum {
    fn from_sorted_values(
        level: usize,
        provenance: Provenance,
        values: &[f64],
        multiplicity_factor: usize,
    ) -> Self {
        let mut entries: Vec<SpectrumEntry> = Vec::new();
        for &v in values {
            match entries.last_mut() {
                Some(last) if v - last.value <= SPECTRUM_TOLERANCE => {
                    last.multiplicity += multiplicity_factor;
                }
                _ => entries.push(SpectrumEntry {
                    value: v,
                    multiplicity: multiplicity_factor,
                }),
            }
        }
        Spectrum {
            level,
            provenance,
            entries,
        }
    }

    pub fn level(&self) -> usize {
        self.level
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn entries(&self) -> &[SpectrumEntry] {
        &self.entries
    }

    pub fn total_multiplicity(&self) -> usize {
        self.entries.iter().map(|e| e.multiplicity).sum()
    }

    pub fn max_value(&self) -> Option<f64> {
        self.entries.last().map(|e| e.value)
    }

    /// The entry whose value lies within `tol` of `value`, if any.
    pub fn find(&self, value: f64, tol: f64) -> Option<&SpectrumEntry> {
        self.entries.iter().find(|e| (e.value - value).abs() <= tol)
    }
}

/// Spectrum of the level-`m` Dirichlet matrix by dense eigensolve. The
/// `nb - 1` blocks are identical, so one block solve provides the whole
/// spectrum with its multiplicities.
pub fn direct_spectrum(p: &WeierstrassParams, m: usize) -> Result<Spectrum, SpectralError> {
    let cap = max_eigensolve_level();
    if m > cap {
        return Err(SpectralError::EigensolveCap { level: m, max: cap });
    }
    let matrix = dirichlet_matrix(p, m)?;
    let k = matrix.block_size();
    let values =
        linalg::symmetric_tridiagonal_eigenvalues(vec![2.0; k], &vec![-1.0; k.saturating_sub(1)]);
    Ok(Spectrum::from_sorted_values(
        m,
        Provenance::Direct,
        &values,
        matrix.block_count(),
    ))
}

/// Closed-form spectrum of the same problem: each block is the Dirichlet
/// second-difference matrix of a path with `nb^m` edges, with eigenvalues
/// `2 - 2 cos(k pi / nb^m)`.
pub fn oracle_spectrum(p: &WeierstrassParams, m: usize) -> Result<Spectrum, SpectralError> {
    if m < 1 {
        return Err(SpectralError::LevelTooSmall);
    }
    let cells = p
        .nb_pow(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    let values: Vec<f64> = (1..cells)
        .map(|k| 2.0 - 2.0 * (k as f64 * PI / cells as f64).cos())
        .collect();
    Ok(Spectrum::from_sorted_values(
        m,
        Provenance::Oracle,
        &values,
        p.nb() - 1,
    ))
}

/// Branch sign in the decimation recurrence.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    Plus,
    Minus,
}

impl Branch {
    pub fn signum(&self) -> f64 {
        match self {
            Branch::Plus => 1.0,
            Branch::Minus => -1.0,
        }
    }
}

fn phi(value: f64, branch: Branch) -> Complex64 {
    let lam = Complex64::new(value - 2.0, 0.0);
    (lam - branch.signum() * (lam * lam - 4.0).sqrt()) / 2.0
}

/// One real child eigenvalue of a decimation step, tagged with the index of
/// the `nb`-th root that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecimationChild {
    pub value: f64,
    pub root_index: usize,
}

/// All level-(m+1) eigenvalue candidates descending from `parent` along one
/// branch sign: the map `z -> (z + 1)^2 / z` over all `nb` complex `nb`-th
/// roots of `phi(parent)`. On `[0, 4]` the radicand is nonpositive, `phi`
/// lies on the unit circle, and every child comes out real.
pub fn decimate_step(
    p: &WeierstrassParams,
    parent: f64,
    branch: Branch,
) -> Result<Vec<DecimationChild>, SpectralError> {
    if !(0.0..=4.0).contains(&parent) {
        return Err(SpectralError::ParentOutOfRange { value: parent });
    }
    let nb = p.nb();
    let w = phi(parent, branch);
    let modulus = w.norm().powf(1.0 / nb as f64);
    let argument = w.arg();
    let mut out = Vec::with_capacity(nb);
    for k in 0..nb {
        let angle = (argument + 2.0 * PI * k as f64) / nb as f64;
        let z = Complex64::from_polar(modulus, angle);
        let child = z + 2.0 + z.inv();
        if child.im.abs() <= 1e-10 {
            out.push(DecimationChild {
                value: child.re.clamp(0.0, 4.0),
                root_index: k,
            });
        }
    }
    Ok(out)
}

/// Folds a child value back through the recurrence: `phi(child)` is an
/// `nb`-th root of the parent's `phi`, so `phi(child)^nb` recomposes the
/// parent as `2 + 2 Re`.
pub fn decimation_parent(p: &WeierstrassParams, child: f64) -> Result<f64, SpectralError> {
    if !(0.0..=4.0).contains(&child) {
        return Err(SpectralError::ParentOutOfRange { value: child });
    }
    let w = phi(child, Branch::Plus).powu(p.nb() as u32);
    Ok(2.0 + 2.0 * w.re)
}

/// How a tree node arose.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NodeOrigin {
    /// Present in the direct spectrum without a decimation parent.
    Newborn,
    /// Produced by a decimation step from `nodes[parent]`.
    Continued {
        parent: usize,
        epsilon: Branch,
        root_index: usize,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DecimationNode {
    pub value: f64,
    pub level: usize,
    pub origin: NodeOrigin,
}

/// A stated multiplicity from the source analysis next to the eigensolve's
/// observed one; the two disagree at levels 2 and 3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MultiplicityClaim {
    pub value: f64,
    pub claimed: usize,
    pub observed: usize,
}

/// Per-level reconciliation of the decimation tree against the direct
/// spectrum.
#[derive(Debug, Clone)]
pub struct LevelReport {
    pub level: usize,
    /// Direct values reached by a decimation step, with observed
    /// multiplicities.
    pub continued: Vec<SpectrumEntry>,
    /// Direct values no decimation step reaches.
    pub newborn: Vec<SpectrumEntry>,
    /// Decimation children absent from the direct spectrum.
    pub unmatched: Vec<f64>,
    /// Stated-versus-observed multiplicities (populated for nb = 3, where
    /// the source analysis states them).
    pub claims: Vec<MultiplicityClaim>,
}

#[derive(Debug, Clone)]
pub struct DecimationTree {
    pub nodes: Vec<DecimationNode>,
    pub reports: Vec<LevelReport>,
}

impl DecimationTree {
    pub fn nodes_at(&self, level: usize) -> impl Iterator<Item = &DecimationNode> + '_ {
        self.nodes.iter().filter(move |n| n.level == level)
    }
}

/// Stated multiplicity for the two seed values at each level of the nb = 3
/// analysis: 2 at level 1, then 5, 8, and 2 from level 4 on.
fn claimed_seed_multiplicity(level: usize) -> usize {
    match level {
        1 => 2,
        2 => 5,
        3 => 8,
        _ => 2,
    }
}

/// Stated multiplicity for the distinguished continued eigenvalue at each
/// level: "quadruple" at levels 2 and 3, then 2^(level-1) by induction.
fn claimed_continued_multiplicity(level: usize) -> usize {
    match level {
        2 | 3 => 4,
        _ => 1usize << (level - 1),
    }
}

fn observed_multiplicity(direct: &Spectrum, value: f64) -> usize {
    direct
        .find(value, SPECTRUM_TOLERANCE)
        .map_or(0, |e| e.multiplicity)
}

/// Builds the decimation tree down to `depth` levels. Level 1 is seeded with
/// the direct spectrum; each later level applies `decimate_step` over both
/// branch signs and every root of every node of the previous level, then
/// compares against the direct spectrum of that level to classify values as
/// continued or newborn. Levels beyond the eigensolve cap are built from
/// decimation alone, without reconciliation or newborn detection.
pub fn decimation_tree(
    p: &WeierstrassParams,
    depth: usize,
) -> Result<DecimationTree, SpectralError> {
    if depth < 1 {
        return Err(SpectralError::DepthTooSmall);
    }
    let cap = max_eigensolve_level();
    let mut nodes: Vec<DecimationNode> = Vec::new();
    let mut reports: Vec<LevelReport> = Vec::new();

    let seed = direct_spectrum(p, 1)?;
    for entry in seed.entries() {
        nodes.push(DecimationNode {
            value: entry.value,
            level: 1,
            origin: NodeOrigin::Newborn,
        });
    }
    // The distinguished lineages the source analysis follows: the largest
    // child of each seed, taken again at every level.
    let mut lineages: Vec<f64> = if p.nb() == 3 {
        seed.entries().iter().map(|e| e.value).collect()
    } else {
        Vec::new()
    };
    reports.push(LevelReport {
        level: 1,
        continued: Vec::new(),
        newborn: seed.entries().to_vec(),
        unmatched: Vec::new(),
        claims: lineages
            .iter()
            .map(|&v| MultiplicityClaim {
                value: v,
                claimed: claimed_seed_multiplicity(1),
                observed: observed_multiplicity(&seed, v),
            })
            .collect(),
    });

    for level in 2..=depth {
        let parents: Vec<(usize, f64)> = nodes
            .iter()
            .enumerate()
            .filter(|(_, n)| n.level == level - 1)
            .map(|(i, n)| (i, n.value))
            .collect();
        let mut children: Vec<DecimationNode> = Vec::new();
        for &(parent, value) in &parents {
            for branch in [Branch::Plus, Branch::Minus] {
                for child in decimate_step(p, value, branch)? {
                    let duplicate = children
                        .iter()
                        .any(|c| (c.value - child.value).abs() <= SPECTRUM_TOLERANCE);
                    if !duplicate {
                        children.push(DecimationNode {
                            value: child.value,
                            level,
                            origin: NodeOrigin::Continued {
                                parent,
                                epsilon: branch,
                                root_index: child.root_index,
                            },
                        });
                    }
                }
            }
        }
        children.sort_by(|a, b| a.value.total_cmp(&b.value));

        if level <= cap {
            let direct = direct_spectrum(p, level)?;
            let mut continued = Vec::new();
            let mut newborn = Vec::new();
            for entry in direct.entries() {
                let reached = children
                    .iter()
                    .any(|c| (c.value - entry.value).abs() <= SPECTRUM_TOLERANCE);
                if reached {
                    continued.push(*entry);
                } else {
                    newborn.push(*entry);
                }
            }
            let unmatched: Vec<f64> = children
                .iter()
                .filter(|c| direct.find(c.value, SPECTRUM_TOLERANCE).is_none())
                .map(|c| c.value)
                .collect();
            let mut claims = Vec::new();
            if p.nb() == 3 {
                for seed_entry in seed.entries() {
                    claims.push(MultiplicityClaim {
                        value: seed_entry.value,
                        claimed: claimed_seed_multiplicity(level),
                        observed: observed_multiplicity(&direct, seed_entry.value),
                    });
                }
                for lineage in lineages.iter_mut() {
                    let largest = decimate_step(p, *lineage, Branch::Plus)?
                        .into_iter()
                        .map(|c| c.value)
                        .fold(f64::NEG_INFINITY, f64::max);
                    *lineage = largest;
                    claims.push(MultiplicityClaim {
                        value: largest,
                        claimed: claimed_continued_multiplicity(level),
                        observed: observed_multiplicity(&direct, largest),
                    });
                }
            }
            let newborn_nodes: Vec<DecimationNode> = newborn
                .iter()
                .map(|e| DecimationNode {
                    value: e.value,
                    level,
                    origin: NodeOrigin::Newborn,
                })
                .collect();
            reports.push(LevelReport {
                level,
                continued,
                newborn,
                unmatched,
                claims,
            });
            nodes.extend(children);
            nodes.extend(newborn_nodes);
        } else {
            nodes.extend(children);
        }
    }
    Ok(DecimationTree { nodes, reports })
}

/// The values where the refined-segment system is singular: the Dirichlet
/// spectrum of a single `nb`-edge path, `2 - 2 cos(j pi / nb)`.
pub fn forbidden_values(p: &WeierstrassParams) -> Vec<f64> {
    (1..p.nb())
        .map(|j| 2.0 - 2.0 * (j as f64 * PI / p.nb() as f64).cos())
        .collect()
}

/// Extends level-(m-1) vertex values to level `m` through the eigenfunction
/// relation `(2 - lam) u_k = u_{k-1} + u_{k+1}` on each refined segment,
/// keeping the parent values as endpoints. With `lam` a decimation child of
/// the parent's eigenvalue, the output satisfies the level-`m`
/// eigen-equation at every interior vertex.
pub fn extend_eigenfunction(
    p: &WeierstrassParams,
    m: usize,
    u_parent: &[f64],
    lam: f64,
) -> Result<Vec<f64>, SpectralError> {
    if m < 1 {
        return Err(SpectralError::LevelTooSmall);
    }
    let expected = p
        .chain_len(m - 1)
        .ok_or(GeometryError::LevelTooLarge { level: m - 1 })?;
    if u_parent.len() != expected {
        return Err(SpectralError::LengthMismatch {
            expected,
            got: u_parent.len(),
        });
    }
    if forbidden_values(p)
        .iter()
        .any(|f| (lam - f).abs() < FORBIDDEN_TOLERANCE)
    {
        return Err(SpectralError::ForbiddenValue { value: lam });
    }
    let nb = p.nb();
    let fine_len = p
        .chain_len(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    let mut out = Vec::with_capacity(fine_len);
    for w in u_parent.windows(2) {
        let seg = segment_solve(nb, lam, w[0], w[1])
            .ok_or(SpectralError::ForbiddenValue { value: lam })?;
        out.extend_from_slice(&seg[..nb]);
    }
    out.push(*u_parent.last().expect("parent chain is nonempty"));
    Ok(out)
}

/// Scale applied to eigenvalues before counting.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CountingScale {
    /// Raw values in (0, 4).
    Raw,
    /// Values multiplied by eta * nb^m, the renormalized magnitude.
    Renormalized,
}

impl CountingScale {
    pub fn factor(&self, p: &WeierstrassParams, m: usize) -> f64 {
        match self {
            CountingScale::Raw => 1.0,
            CountingScale::Renormalized => p.eta() * (p.nb() as f64).powi(m as i32),
        }
    }
}

/// Number of level-`m` Dirichlet eigenvalues, with multiplicity, whose
/// scaled value is at most `x`.
pub fn counting_function(
    p: &WeierstrassParams,
    m: usize,
    x: f64,
    scale: CountingScale,
) -> Result<usize, SpectralError> {
    let spectrum = direct_spectrum(p, m)?;
    let factor = scale.factor(p, m);
    Ok(spectrum
        .entries()
        .iter()
        .filter(|e| e.value * factor <= x)
        .map(|e| e.multiplicity)
        .sum())
}

/// Log-spaced counting samples per level, spanning the top decade of the
/// scaled spectrum.
pub const WEYL_SAMPLES_PER_LEVEL: usize = 16;

#[derive(Debug, Clone, Copy)]
pub struct WeylGrowthRow {
    pub level: usize,
    pub total: usize,
    pub ln_total_over_level: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct WeylSample {
    pub level: usize,
    pub x: f64,
    pub count: usize,
    /// count / x, the quantity whose logarithmic oscillation is periodic.
    pub ratio: f64,
}

#[derive(Debug, Clone)]
pub struct WeylAnalysis {
    pub growth: Vec<WeylGrowthRow>,
    pub samples: Vec<WeylSample>,
}

/// Counting-growth table over a level range: per level, the total count and
/// `ln(total)/level`, plus `N(x)/x` samples over the top decade of the
/// renormalized spectrum. Sample grids of consecutive levels differ exactly
/// by the factor nb, so overlaying them exposes the log-periodic component.
pub fn weyl_analysis(
    p: &WeierstrassParams,
    levels: std::ops::RangeInclusive<usize>,
) -> Result<WeylAnalysis, SpectralError> {
    if levels.is_empty() || *levels.start() < 1 {
        return Err(SpectralError::EmptyRange);
    }
    let mut growth = Vec::new();
    let mut samples = Vec::new();
    for m in levels {
        let spectrum = direct_spectrum(p, m)?;
        let total = spectrum.total_multiplicity();
        growth.push(WeylGrowthRow {
            level: m,
            total,
            ln_total_over_level: (total as f64).ln() / m as f64,
        });
        let factor = CountingScale::Renormalized.factor(p, m);
        let x_top = 4.0 * factor;
        for i in 0..WEYL_SAMPLES_PER_LEVEL {
            let exponent = -1.0 + i as f64 / (WEYL_SAMPLES_PER_LEVEL - 1) as f64;
            let x = x_top * 10.0_f64.powf(exponent);
            let count: usize = spectrum
                .entries()
                .iter()
                .filter(|e| e.value * factor <= x)
                .map(|e| e.multiplicity)
                .sum();
            samples.push(WeylSample {
                level: m,
                x,
                count,
                ratio: count as f64 / x,
            });
        }
    }
    Ok(WeylAnalysis { growth, samples })
}
