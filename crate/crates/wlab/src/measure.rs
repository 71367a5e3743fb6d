//! Self-similar measure on the polygonal domain: exact polygon areas, the
//! per-map weights they induce, cell measures, and the vertex quadrature
//! rule.

use crate::geometry::{polygons, GeometryError, Polygon, Word};
use crate::params::WeierstrassParams;
use thiserror::Error;

/// Areas below this are reported as exactly zero, with the degeneracy flag
/// set.
pub const AREA_DEGENERACY_TOLERANCE: f64 = 1e-15;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MeasureError {
    #[error("base polygon is degenerate, no measure can be normalized")]
    DegenerateBase,
    #[error("expected {expected} vertex values, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Polygon area together with a collinearity flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolygonArea {
    pub value: f64,
    pub degenerate: bool,
}

/// Area by the triangle-fan sum anchored at the last vertex,
/// `1/2 sum_j |cross(V_j -> V_{j+1}, V_j -> V_{nb-1})|`. For a triangle this
/// is half the single cross product.
pub fn polygon_area(poly: &Polygon) -> PolygonArea {
    let v = &poly.vertices;
    let last = v[v.len() - 1];
    let mut sum = 0.0;
    for j in 0..v.len() - 1 {
        let (ax, ay) = (v[j + 1].x - v[j].x, v[j + 1].y - v[j].y);
        let (bx, by) = (last.x - v[j].x, last.y - v[j].y);
        sum += (ax * by - ay * bx).abs();
    }
    let value = 0.5 * sum;
    if value < AREA_DEGENERACY_TOLERANCE {
        PolygonArea {
            value: 0.0,
            degenerate: true,
        }
    } else {
        PolygonArea {
            value,
            degenerate: false,
        }
    }
}

/// Selects between the raw area ratios and their normalization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightMode {
    Raw,
    Normalized,
}

/// Per-map measure weights: raw_i is the area of the i-th level-1 polygon
/// relative to the level-0 polygon; normalized weights sum to 1 and define
/// the self-similar probability measure.
#[derive(Debug, Clone)]
pub struct MeasureWeights {
    raw: Vec<f64>,
    normalized: Vec<f64>,
}

impl MeasureWeights {
    pub fn raw(&self) -> &[f64] {
        &self.raw
    }

    pub fn normalized(&self) -> &[f64] {
        &self.normalized
    }

    /// Measure of the cell named by `word`: the product of the per-letter
    /// weights. The empty word yields 1.
    pub fn cell(&self, word: &Word, mode: WeightMode) -> Result<f64, MeasureError> {
        let table = match mode {
            WeightMode::Raw => &self.raw,
            WeightMode::Normalized => &self.normalized,
        };
        let mut out = 1.0;
        for &letter in word.letters() {
            let w = table.get(letter).ok_or(GeometryError::LetterOutOfRange {
                letter,
                nb: table.len(),
            })?;
            out *= w;
        }
        Ok(out)
    }
}

pub fn measure_weights(p: &WeierstrassParams) -> Result<MeasureWeights, MeasureError> {
    let base = polygon_area(&polygons(p, 0)?[0]);
    if base.degenerate {
        return Err(MeasureError::DegenerateBase);
    }
    let raw: Vec<f64> = polygons(p, 1)?
        .iter()
        .map(|poly| polygon_area(poly).value / base.value)
        .collect();
    debug_assert!(raw.iter().all(|&w| w > 0.0));
    let total: f64 = raw.iter().sum();
    let normalized = raw.iter().map(|w| w / total).collect();
    Ok(MeasureWeights { raw, normalized })
}

/// Measure of the level-`|word|` cell named by `word`.
pub fn cell_measure(
    p: &WeierstrassParams,
    word: &Word,
    mode: WeightMode,
) -> Result<f64, MeasureError> {
    measure_weights(p)?.cell(word, mode)
}

/// Per-polygon vertex factor kappa in the quadrature rule.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quadrature {
    /// kappa = 1/nb; integrates constants exactly against the normalized
    /// measure.
    MeanValue,
    /// kappa = 1; the plain vertex sum against the cell measure, which
    /// integrates u = 1 to nb.
    VertexSum,
}

/// Quadrature of the vertex values `u` on the level-`m` chain:
/// `sum over cells j of kappa * [sum of u over the cell's vertices] * mu_j`
/// with `mu` the normalized cell measure. Vertices shared by two cells
/// contribute once per cell.
pub fn integrate(
    p: &WeierstrassParams,
    m: usize,
    u: &[f64],
    rule: Quadrature,
) -> Result<f64, MeasureError> {
    let expected = p
        .chain_len(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    if u.len() != expected {
        return Err(MeasureError::LengthMismatch {
            expected,
            got: u.len(),
        });
    }
    let weights = measure_weights(p)?;
    let kappa = match rule {
        Quadrature::MeanValue => 1.0 / p.nb() as f64,
        Quadrature::VertexSum => 1.0,
    };
    let cells = p
        .nb_pow(m)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    let stride = p.nb() - 1;
    let mut total = 0.0;
    for j in 0..cells {
        let word = Word::from_index(j, m, p.nb());
        let mu = weights.cell(&word, WeightMode::Normalized)?;
        let vertex_sum: f64 = u[j * stride..j * stride + p.nb()].iter().sum();
        total += kappa * vertex_sum * mu;
    }
    Ok(total)
}
