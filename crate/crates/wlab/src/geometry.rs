//! Geometry of the iterated function system behind the graph family:
//! the `nb` contractions, their fixed points, the level-`m` vertex chains
//! and polygons, per-edge height bounds, and box counting.

use crate::params::WeierstrassParams;
use std::f64::consts::{PI, TAU};
use thiserror::Error;

/// Two generated vertices are identified when both coordinates differ by
/// less than this. Guards accumulated rounding at levels up to about 12
/// while staying far below the mesh width.
pub const DEDUP_TOLERANCE: f64 = 1e-9;

/// Cap on the raw number of generated points (`nb^(m+1)`) for chain and
/// polygon construction.
const MAX_RAW_POINTS: usize = 1 << 26;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum GeometryError {
    #[error("map index {index} out of range for base {nb}")]
    IndexOutOfRange { index: usize, nb: usize },
    #[error("word letter {letter} out of range for base {nb}")]
    LetterOutOfRange { letter: usize, nb: usize },
    #[error("level {level} too large for the configured memory budget")]
    LevelTooLarge { level: usize },
    #[error("subdivision count must be >= 1")]
    ZeroSubdivision,
    #[error("level range must contain at least two levels for a slope fit")]
    DegenerateFitRange,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point2 {
    pub x: f64,
    pub y: f64,
}

impl Point2 {
    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }
}

/// Composition word over the alphabet `{0, .., nb-1}`. The first letter is
/// the outermost map: a word `(a, b)` denotes the composition `T_a . T_b`,
/// applied to a point as `T_a(T_b(p))`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Word {
    letters: Vec<usize>,
}

impl Word {
    pub fn new(letters: Vec<usize>, nb: usize) -> Result<Self, GeometryError> {
        if let Some(&letter) = letters.iter().find(|&&l| l >= nb) {
            return Err(GeometryError::LetterOutOfRange { letter, nb });
        }
        Ok(Self { letters })
    }

    pub fn empty() -> Self {
        Self {
            letters: Vec::new(),
        }
    }

    /// Word canonically attached to polygon `index` at level `m`: the base-`nb`
    /// digits of `index`, most significant digit outermost.
    pub fn from_index(index: usize, m: usize, nb: usize) -> Self {
        let mut letters = vec![0; m];
        let mut rest = index;
        for slot in letters.iter_mut().rev() {
            *slot = rest % nb;
            rest /= nb;
        }
        debug_assert_eq!(
            rest, 0,
            "index {index} has more than {m} digits in base {nb}"
        );
        Self { letters }
    }

    pub fn letters(&self) -> &[usize] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Concatenation `self ++ tail` (self outermost).
    pub fn then(&self, tail: &Word) -> Self {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&tail.letters);
        Self { letters }
    }
}

/// `T_i(x, y) = ((x + i)/nb, lambda*y + cos(2 pi (x + i)/nb))`.
pub fn contraction(p: &WeierstrassParams, i: usize, pt: Point2) -> Result<Point2, GeometryError> {
    if i >= p.nb() {
        return Err(GeometryError::IndexOutOfRange {
            index: i,
            nb: p.nb(),
        });
    }
    let xs = (pt.x + i as f64) / p.nb() as f64;
    Ok(Point2::new(xs, p.lambda() * pt.y + (TAU * xs).cos()))
}

/// Fixed point of `T_i`: `P_i = (i/(nb-1), cos(2 pi i/(nb-1)) / (1 - lambda))`.
pub fn fixed_point(p: &WeierstrassParams, i: usize) -> Result<Point2, GeometryError> {
    if i >= p.nb() {
        return Err(GeometryError::IndexOutOfRange {
            index: i,
            nb: p.nb(),
        });
    }
    let x = i as f64 / (p.nb() - 1) as f64;
    Ok(Point2::new(x, (TAU * x).cos() / (1.0 - p.lambda())))
}

/// Applies the composition named by `word` (first letter outermost). The
/// empty word is the identity.
pub fn apply_word(p: &WeierstrassParams, word: &Word, pt: Point2) -> Result<Point2, GeometryError> {
    let mut out = pt;
    for &letter in word.letters().iter().rev() {
        out = contraction(p, letter, out)?;
    }
    Ok(out)
}

/// Level-`m` vertex set, ordered by increasing abscissa, with the chain
/// edges given implicitly by consecutive indices.
#[derive(Debug, Clone)]
pub struct LevelGraph {
    level: usize,
    vertices: Vec<Point2>,
    boundary_indices: Vec<usize>,
}

impl LevelGraph {
    pub fn level(&self) -> usize {
        self.level
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Indices of the `nb` level-0 vertices (the map fixed points).
    pub fn boundary_indices(&self) -> &[usize] {
        &self.boundary_indices
    }

    pub fn is_boundary(&self, index: usize) -> bool {
        self.boundary_indices.binary_search(&index).is_ok()
    }

    /// Chain edges as consecutive-index pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.vertices.len().saturating_sub(1)).map(|i| (i, i + 1))
    }

    pub fn edge_count(&self) -> usize {
        self.vertices.len().saturating_sub(1)
    }
}

fn warn_if_rectifiable(p: &WeierstrassParams, what: &str) {
    if !p.is_fractal_regime() {
        log::warn!(
            "{what} with lambda*nb = {} <= 1: the graph is rectifiable and the \
             fractal height bounds are vacuous",
            p.lambda() * p.nb() as f64
        );
    }
}

/// Builds the level-`m` chain: all `T_M(P_j)` over words `M` of length `m`
/// and fixed points `P_j`, deduplicated and sorted by abscissa.
pub fn vertex_chain(p: &WeierstrassParams, m: usize) -> Result<LevelGraph, GeometryError> {
    warn_if_rectifiable(p, "vertex_chain");
    let cells = p
        .nb_pow(m)
        .filter(|c| c.saturating_mul(p.nb()) <= MAX_RAW_POINTS)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;

    let base: Vec<Point2> = (0..p.nb())
        .map(|j| fixed_point(p, j))
        .collect::<Result<_, _>>()?;

    // Generation order (cell index, then vertex index) is already abscissa
    // order, with the duplicate at each cell junction adjacent to its twin.
    let mut vertices: Vec<Point2> = Vec::with_capacity(cells * p.nb());
    for cell in 0..cells {
        let word = Word::from_index(cell, m, p.nb());
        for &pt in &base {
            vertices.push(apply_word(p, &word, pt)?);
        }
    }
    vertices.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    let mut chain: Vec<Point2> = Vec::with_capacity(vertices.len());
    for v in vertices {
        match chain.last() {
            Some(last)
                if (v.x - last.x).abs() < DEDUP_TOLERANCE
                    && (v.y - last.y).abs() < DEDUP_TOLERANCE => {}
            _ => chain.push(v),
        }
    }

    // Locate the level-0 vertices in the chain by coordinate match.
    let mut boundary_indices = Vec::with_capacity(p.nb());
    for pt in &base {
        let idx = chain.partition_point(|v| v.x < pt.x - DEDUP_TOLERANCE);
        debug_assert!(
            idx < chain.len()
                && (chain[idx].x - pt.x).abs() < DEDUP_TOLERANCE
                && (chain[idx].y - pt.y).abs() < DEDUP_TOLERANCE,
            "fixed point not found in chain"
        );
        boundary_indices.push(idx);
    }

    Ok(LevelGraph {
        level: m,
        vertices: chain,
        boundary_indices,
    })
}

/// One level-`m` cell: the polygon through the `nb` images
/// `T_M(P_0), .., T_M(P_{nb-1})` for the word `M` attached to `index`.
#[derive(Debug, Clone)]
pub struct Polygon {
    pub level: usize,
    pub index: usize,
    pub vertices: Vec<Point2>,
}

impl Polygon {
    pub fn word(&self, nb: usize) -> Word {
        Word::from_index(self.index, self.level, nb)
    }
}

/// All `nb^m` level-`m` polygons, ordered by index (equivalently by
/// abscissa).
pub fn polygons(p: &WeierstrassParams, m: usize) -> Result<Vec<Polygon>, GeometryError> {
    warn_if_rectifiable(p, "polygons");
    let cells = p
        .nb_pow(m)
        .filter(|c| c.saturating_mul(p.nb()) <= MAX_RAW_POINTS)
        .ok_or(GeometryError::LevelTooLarge { level: m })?;
    let base: Vec<Point2> = (0..p.nb())
        .map(|j| fixed_point(p, j))
        .collect::<Result<_, _>>()?;
    (0..cells)
        .map(|index| {
            let word = Word::from_index(index, m, p.nb());
            let vertices = base
                .iter()
                .map(|&pt| apply_word(p, &word, pt))
                .collect::<Result<_, _>>()?;
            Ok(Polygon {
                level: m,
                index,
                vertices,
            })
        })
        .collect()
}

/// Per-edge height record: the exact vertical difference of the edge's
/// endpoints together with the level-`m` lower and upper bound values.
#[derive(Debug, Clone, Copy)]
pub struct EdgeHeight {
    /// Polygon index at level `m`.
    pub polygon: usize,
    /// Edge position inside the polygon, `0 .. nb-1`.
    pub edge: usize,
    /// Horizontal extent (always `L_m`).
    pub width: f64,
    /// `|y(T_M(P_{j+1})) - y(T_M(P_j))|`.
    pub height: f64,
    /// `lambda^m` times the lower-bound constant (see
    /// [`height_lower_constant`]); an order estimate, not a per-edge bound.
    pub lower_bound: f64,
    /// `eta * L_m^(2 - d_w)`.
    pub upper_bound: f64,
}

/// The constant `|2/(1-lambda) * min_j sin(pi (2j+1)/(nb-1))
/// - pi/(nb (nb-1) (lambda nb - 1))|`, with the minimum over
/// `0 <= j <= nb-1`.
pub fn height_lower_constant(p: &WeierstrassParams) -> f64 {
    let n = p.nb() as f64;
    let min_sin = (0..p.nb())
        .map(|j| (PI * (2 * j + 1) as f64 / (n - 1.0)).sin())
        .fold(f64::INFINITY, f64::min);
    (2.0 / (1.0 - p.lambda()) * min_sin - PI / (n * (n - 1.0) * (p.lambda() * n - 1.0))).abs()
}

/// Heights of all intra-polygon edges at level `m`, with the accompanying
/// bound values.
pub fn edge_heights(p: &WeierstrassParams, m: usize) -> Result<Vec<EdgeHeight>, GeometryError> {
    let cells = polygons(p, m)?;
    let width = p.width(m);
    let lower = p.lambda().powi(m as i32) * height_lower_constant(p);
    let upper = p.height_bound(m);
    let mut out = Vec::with_capacity(cells.len() * (p.nb() - 1));
    for poly in &cells {
        for edge in 0..p.nb() - 1 {
            let a = poly.vertices[edge];
            let b = poly.vertices[edge + 1];
            out.push(EdgeHeight {
                polygon: poly.index,
                edge,
                width,
                height: (b.y - a.y).abs(),
                lower_bound: lower,
                upper_bound: upper,
            });
        }
    }
    Ok(out)
}

/// Vertical extent of the level-`m + depth` chain over each level-`m` edge's
/// abscissa interval, aligned with the [`edge_heights`] order. Reported next
/// to the endpoint height because the two differ: the endpoint height is the
/// exact rectangle height, the extent measures the sampled sub-graph.
pub fn edge_extents(
    p: &WeierstrassParams,
    m: usize,
    depth: usize,
) -> Result<Vec<f64>, GeometryError> {
    let fine = vertex_chain(p, m + depth)?;
    let per_edge = p
        .nb_pow(depth)
        .ok_or(GeometryError::LevelTooLarge { level: m + depth })?;
    let edges = (p.nb() - 1)
        * p.nb_pow(m)
            .ok_or(GeometryError::LevelTooLarge { level: m })?;
    let mut out = Vec::with_capacity(edges);
    for e in 0..edges {
        let lo = e * per_edge;
        let hi = (e + 1) * per_edge;
        let mut ymin = f64::INFINITY;
        let mut ymax = f64::NEG_INFINITY;
        for v in &fine.vertices()[lo..=hi] {
            ymin = ymin.min(v.y);
            ymax = ymax.max(v.y);
        }
        out.push(ymax - ymin);
    }
    Ok(out)
}

/// Result of covering the sampled graph with axis-aligned squares of side
/// `L_m / n_sub`.
#[derive(Debug, Clone, Copy)]
pub struct BoxCount {
    pub level: usize,
    pub n_sub: usize,
    /// Sampling depth: the graph is approximated by the level-`m + depth`
    /// chain.
    pub depth: usize,
    /// Square side `L_m / n_sub`.
    pub side: f64,
    /// Number of grid squares touched.
    pub count: u64,
    /// Value of the covering-bound formula
    /// `columns * (C * L_m^(1-d_w) * n_sub^(d_w) + n_sub)` with
    /// `C = max(eta, (nb-1)^(2-d_w) * lower-bound constant)`.
    pub bound: f64,
}

/// Counts the axis-aligned squares of side `L_m / n_sub` (grid anchored at
/// the origin) needed to cover the level-`m + depth` polyline, column by
/// column.
pub fn box_count(
    p: &WeierstrassParams,
    m: usize,
    n_sub: usize,
    depth: usize,
) -> Result<BoxCount, GeometryError> {
    if n_sub == 0 {
        return Err(GeometryError::ZeroSubdivision);
    }
    let fine = vertex_chain(p, m + depth)?;
    let per_edge = p
        .nb_pow(depth)
        .ok_or(GeometryError::LevelTooLarge { level: m + depth })?;
    let columns = (p.nb() - 1)
        * p.nb_pow(m)
            .ok_or(GeometryError::LevelTooLarge { level: m })?;
    let side = p.width(m) / n_sub as f64;
    let ys: Vec<f64> = fine.vertices().iter().map(|v| v.y).collect();

    // Sample k sits at abscissa k * L_{m+depth}; subcolumn boundaries sit at
    // multiples of L_m / n_sub. Work with the integer positions
    // k * n_sub and sigma * per_edge to classify samples exactly.
    let mut count: u64 = 0;
    for col in 0..columns {
        for s in 0..n_sub {
            let sigma = col * n_sub + s; // global subcolumn index
            let left_num = sigma * per_edge; // boundary position, in units of L'/n_sub
            let right_num = (sigma + 1) * per_edge;
            let k_lo = left_num.div_ceil(n_sub);
            let k_hi = right_num / n_sub;
            let mut ymin = f64::INFINITY;
            let mut ymax = f64::NEG_INFINITY;
            for &y in &ys[k_lo..=k_hi] {
                ymin = ymin.min(y);
                ymax = ymax.max(y);
            }
            // Clip the polyline at subcolumn boundaries that fall strictly
            // between two samples.
            for (num, k_inside) in [(left_num, k_lo), (right_num, k_hi)] {
                if num % n_sub != 0 {
                    let k0 = num / n_sub;
                    let t = (num % n_sub) as f64 / n_sub as f64;
                    let y = ys[k0] + t * (ys[k0 + 1] - ys[k0]);
                    ymin = ymin.min(y);
                    ymax = ymax.max(y);
                    let _ = k_inside;
                }
            }
            let cells = (ymax / side).floor() - (ymin / side).floor();
            count += cells as u64 + 1;
        }
    }

    let c = p
        .eta()
        .max((p.nb() as f64 - 1.0).powf(2.0 - p.d_w()) * height_lower_constant(p));
    let bound = columns as f64
        * (c * p.width(m).powf(1.0 - p.d_w()) * (n_sub as f64).powf(p.d_w()) + n_sub as f64);

    Ok(BoxCount {
        level: m,
        n_sub,
        depth,
        side,
        count,
        bound,
    })
}

/// Least-squares slope of `ln(count)` against `ln(1/side)` over a range of
/// levels at fixed `n_sub` and sampling depth. The slope estimates the box
/// dimension `d_w`.
#[derive(Debug, Clone)]
pub struct BoxDimensionFit {
    pub slope: f64,
    pub intercept: f64,
    pub points: Vec<BoxCount>,
}

pub fn box_dimension_fit(
    p: &WeierstrassParams,
    levels: std::ops::RangeInclusive<usize>,
    n_sub: usize,
    depth: usize,
) -> Result<BoxDimensionFit, GeometryError> {
    let points: Vec<BoxCount> = levels
        .map(|m| box_count(p, m, n_sub, depth))
        .collect::<Result<_, _>>()?;
    if points.len() < 2 {
        return Err(GeometryError::DegenerateFitRange);
    }
    let xs: Vec<f64> = points.iter().map(|b| (1.0 / b.side).ln()).collect();
    let ys: Vec<f64> = points.iter().map(|b| (b.count as f64).ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    Ok(BoxDimensionFit {
        slope,
        intercept: my - slope * mx,
        points,
    })
}
