//! Domain types shared by all modules: validated vector configurations,
//! weight vectors, scaling (log-weight) vectors, transformations, and solver
//! results, plus the JSON/CSV instance grammar.
//!
//! All types are immutable after construction and safe to share across threads.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tol;

/// A validated configuration of `n >= d` unit column vectors spanning R^d.
///
/// Construction renormalizes every column to unit length (recording the
/// applied scale factors) and rejects configurations that do not span R^d.
#[derive(Debug, Clone, PartialEq)]
pub struct VectorSet {
    dim: usize,
    count: usize,
    columns: DMatrix<f64>,
    applied_scales: Vec<f64>,
}

impl VectorSet {
    /// Builds a vector set from `d x n` column data.
    pub fn new(dim: usize, columns: DMatrix<f64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension("dimension d must be positive".into()));
        }
        if columns.nrows() != dim {
            return Err(Error::Dimension(format!(
                "column length {} does not match d = {}",
                columns.nrows(),
                dim
            )));
        }
        let count = columns.ncols();
        if count < dim {
            return Err(Error::Dimension(format!(
                "need n >= d vectors, got n = {count}, d = {dim}"
            )));
        }
        let mut cols = columns;
        let mut applied_scales = Vec::with_capacity(count);
        for j in 0..count {
            let mut col = cols.column_mut(j);
            let norm = col.norm();
            if !norm.is_finite() {
                return Err(Error::Parse(format!("vector {} has non-finite entries", j + 1)));
            }
            if norm < tol::MIN_NORM {
                return Err(Error::Sign(format!(
                    "vector {} has norm {norm:.3e}, below the {:.0e} floor",
                    j + 1,
                    tol::MIN_NORM
                )));
            }
            // Preserve bits of inputs that are already unit to machine precision
            // (the recomputed norm of a normalized column can be a few ulps off);
            // otherwise renormalize and remember the scale.
            if (norm - 1.0).abs() <= 64.0 * f64::EPSILON {
                applied_scales.push(1.0);
            } else {
                col /= norm;
                applied_scales.push(1.0 / norm);
            }
        }
        let set = VectorSet {
            dim,
            count,
            columns: cols,
            applied_scales,
        };
        if set.rank() < dim {
            return Err(Error::Rank(format!(
                "vectors span a subspace of dimension {} < d = {}",
                set.rank(),
                dim
            )));
        }
        Ok(set)
    }

    /// Convenience constructor from per-vector slices.
    pub fn from_vectors(dim: usize, vectors: &[Vec<f64>]) -> Result<Self> {
        for (j, v) in vectors.iter().enumerate() {
            if v.len() != dim {
                return Err(Error::Dimension(format!(
                    "vector {} has {} entries, expected d = {}",
                    j + 1,
                    v.len(),
                    dim
                )));
            }
        }
        let flat: Vec<f64> = vectors.iter().flatten().copied().collect();
        // from_vec is column-major; our flat data is one vector after another,
        // which is exactly one column after another.
        let m = DMatrix::from_vec(dim, vectors.len(), flat);
        VectorSet::new(dim, m)
    }

    fn rank(&self) -> usize {
        let svd = self.columns.clone().svd(false, false);
        let smax = svd.singular_values.max();
        svd.singular_values
            .iter()
            .filter(|&&s| s > tol::RANK_TOL * smax)
            .count()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn count(&self) -> usize {
        self.count
    }

    /// The d x n matrix whose columns are the unit vectors.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.columns
    }

    pub fn column(&self, j: usize) -> DVector<f64> {
        self.columns.column(j).into_owned()
    }

    /// Per-column factors applied during normalization (1.0 when untouched).
    pub fn applied_scales(&self) -> &[f64] {
        &self.applied_scales
    }
}

/// Target marginals `c` with positive entries summing to the dimension d.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    weights: DVector<f64>,
    rescale: f64,
}

impl WeightVector {
    pub fn new(dim: usize, weights: DVector<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::Dimension("weight vector is empty".into()));
        }
        for (i, &c) in weights.iter().enumerate() {
            if !(c > 0.0) {
                return Err(Error::Sign(format!(
                    "weight c_{} = {c} must be strictly positive",
                    i + 1
                )));
            }
        }
        let sum: f64 = weights.sum();
        let d = dim as f64;
        if (sum - d).abs() > tol::SUM_TOL {
            return Err(Error::Sign(format!(
                "weights sum to {sum}, expected d = {d} (off by more than {:.0e})",
                tol::SUM_TOL
            )));
        }
        // Sums already at machine precision are left untouched so that
        // construction is idempotent bit-for-bit; one rescale pass lands
        // within this window.
        let machine_window = 16.0 * weights.len() as f64 * f64::EPSILON * d;
        let (weights, rescale) = if (sum - d).abs() <= machine_window {
            (weights, 1.0)
        } else {
            (weights.clone() * (d / sum), d / sum)
        };
        Ok(WeightVector { weights, rescale })
    }

    /// The uniform vector with every entry `d/n`.
    pub fn uniform(dim: usize, count: usize) -> Result<Self> {
        let c = dim as f64 / count as f64;
        WeightVector::new(dim, DVector::from_element(count, c))
    }

    pub fn from_slice(dim: usize, weights: &[f64]) -> Result<Self> {
        WeightVector::new(dim, DVector::from_column_slice(weights))
    }

    pub fn len(&self) -> usize {
        self.weights.len()
    }

    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.weights
    }

    pub fn get(&self, i: usize) -> f64 {
        self.weights[i]
    }

    pub fn min(&self) -> f64 {
        self.weights.min()
    }

    /// Factor applied to make the sum exactly d (1.0 when untouched).
    pub fn rescale_factor(&self) -> f64 {
        self.rescale
    }
}

/// Normalization convention for scaling vectors.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Normalization {
    /// `min_i t_i = 0`.
    MinZero,
    /// `sum_i t_i = 0` (projection onto the complement of the all-ones vector).
    MeanZeroOn1,
    Raw,
}

/// The optimization variable: per-vector log-weights `t`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingVector {
    entries: DVector<f64>,
    normalization: Normalization,
}

impl ScalingVector {
    pub fn raw(entries: DVector<f64>) -> Self {
        ScalingVector {
            entries,
            normalization: Normalization::Raw,
        }
    }

    pub fn zeros(n: usize) -> Self {
        ScalingVector {
            entries: DVector::zeros(n),
            normalization: Normalization::Raw,
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vector(&self) -> &DVector<f64> {
        &self.entries
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }
}

/// Renormalizes a scaling vector. Both conventions shift along the all-ones
/// direction only, so the objective value is unchanged.
pub fn normalize_scaling(t: &ScalingVector, mode: Normalization) -> ScalingVector {
    let v = t.vector();
    let entries = match mode {
        Normalization::Raw => v.clone(),
        Normalization::MinZero => {
            let m = v.min();
            v.map(|x| x - m)
        }
        Normalization::MeanZeroOn1 => {
            let mut w = v.clone();
            // Two passes soak up the rounding of the first mean subtraction.
            for _ in 0..2 {
                let mean = w.mean();
                w.apply(|x| *x -= mean);
            }
            w
        }
    };
    ScalingVector {
        entries,
        normalization: mode,
    }
}

/// How a transformation matrix was derived.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Provenance {
    /// Symmetric positive definite square root `V S^{-1} V^T`.
    QInvSqrtSymmetric,
    /// Non-symmetric form `S^{-1} V^T`.
    SigmaInvVt,
}

/// A nonsingular d x d linear map.
#[derive(Debug, Clone, PartialEq)]
pub struct Transformation {
    map: DMatrix<f64>,
    provenance: Provenance,
}

impl Transformation {
    pub fn new(map: DMatrix<f64>, provenance: Provenance) -> Result<Self> {
        if map.nrows() != map.ncols() {
            return Err(Error::Dimension(format!(
                "transformation must be square, got {}x{}",
                map.nrows(),
                map.ncols()
            )));
        }
        let svd = map.clone().svd(false, false);
        let smax = svd.singular_values.max();
        let smin = svd.singular_values.min();
        if !(smin > tol::RANK_TOL * smax) || smax == 0.0 {
            return Err(Error::Singular(
                "transformation is singular within rank tolerance".into(),
            ));
        }
        if provenance == Provenance::QInvSqrtSymmetric {
            let defect = (&map - map.transpose()).norm() / map.norm();
            if defect > tol::SYM_TOL {
                return Err(Error::Precondition(format!(
                    "symmetric provenance but asymmetry defect {defect:.3e}"
                )));
            }
        }
        Ok(Transformation { map, provenance })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.map
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn dim(&self) -> usize {
        self.map.nrows()
    }
}

/// Which optimizer produced a result.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    Smooth,
    SmoothNesterov,
    StronglyConvex,
    StronglyConvexNesterov,
    NewtonOracle,
}

impl std::fmt::Display for MethodKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            MethodKind::Smooth => "smooth",
            MethodKind::SmoothNesterov => "smooth_nesterov",
            MethodKind::StronglyConvex => "strongly_convex",
            MethodKind::StronglyConvexNesterov => "strongly_convex_nesterov",
            MethodKind::NewtonOracle => "newton_oracle",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smooth" => Ok(MethodKind::Smooth),
            "smooth_nesterov" => Ok(MethodKind::SmoothNesterov),
            "strongly_convex" => Ok(MethodKind::StronglyConvex),
            "strongly_convex_nesterov" => Ok(MethodKind::StronglyConvexNesterov),
            "newton_oracle" => Ok(MethodKind::NewtonOracle),
            other => Err(Error::Parse(format!("unknown method '{other}'"))),
        }
    }
}

/// One recorded iteration of a descent run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TracePoint {
    pub f_value: f64,
    pub grad_norm: f64,
}

/// Converged output of a solver run.
#[derive(Debug, Clone)]
pub struct IsotropyResult {
    pub t_apx: ScalingVector,
    pub transform: Transformation,
    pub c_apx: WeightVector,
    /// `|| sum_i c_i z_i z_i^T - I ||_F` for `z_i = T x_i / |T x_i|`, measured
    /// against the *target* weights.
    pub isotropy_residual: f64,
    pub grad_norm: f64,
    pub iterations: usize,
    pub method: MethodKind,
    pub trace: Option<Vec<TracePoint>>,
}

/// Weight specification accompanying an instance.
#[derive(Debug, Clone, PartialEq)]
pub enum CSpec {
    Uniform,
    Explicit(Vec<f64>),
}

impl CSpec {
    fn resolve(&self, dim: usize, count: usize) -> Result<WeightVector> {
        match self {
            CSpec::Uniform => WeightVector::uniform(dim, count),
            CSpec::Explicit(v) => {
                if v.len() != count {
                    return Err(Error::Dimension(format!(
                        "c has {} entries, expected n = {}",
                        v.len(),
                        count
                    )));
                }
                WeightVector::from_slice(dim, v)
            }
        }
    }
}

impl std::str::FromStr for CSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.trim() == "uniform" {
            return Ok(CSpec::Uniform);
        }
        let vals: Result<Vec<f64>> = s
            .split(',')
            .map(|x| {
                x.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("bad weight '{x}': {e}")))
            })
            .collect();
        Ok(CSpec::Explicit(vals?))
    }
}

/// Instance text format.
#[derive(Debug, Clone, PartialEq)]
pub enum InstanceFormat {
    /// JSON object `{"d", "n", "vectors", "c"}`; an explicit spec overrides
    /// the file's `c` field.
    Json(Option<CSpec>),
    /// One vector per row; `c` always comes from the caller.
    Csv(CSpec),
}

#[derive(Deserialize)]
struct RawInstance {
    d: usize,
    n: usize,
    vectors: Vec<Vec<f64>>,
    #[serde(default)]
    c: Option<RawC>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum RawC {
    Keyword(String),
    Values(Vec<f64>),
}

/// Parses and validates an instance from text.
pub fn parse_instance(raw: &str, format: InstanceFormat) -> Result<(VectorSet, WeightVector)> {
    match format {
        InstanceFormat::Json(c_override) => {
            let inst: RawInstance = serde_json::from_str(raw)
                .map_err(|e| Error::Parse(format!("invalid instance JSON: {e}")))?;
            if inst.vectors.len() != inst.n {
                return Err(Error::Parse(format!(
                    "instance declares n = {} but provides {} vectors",
                    inst.n,
                    inst.vectors.len()
                )));
            }
            let x = VectorSet::from_vectors(inst.d, &inst.vectors)?;
            let cspec = match c_override {
                Some(spec) => spec,
                None => match inst.c {
                    None => CSpec::Uniform,
                    Some(RawC::Keyword(k)) if k == "uniform" => CSpec::Uniform,
                    Some(RawC::Keyword(k)) => {
                        return Err(Error::Parse(format!("unknown c keyword '{k}'")))
                    }
                    Some(RawC::Values(v)) => CSpec::Explicit(v),
                },
            };
            let c = cspec.resolve(inst.d, inst.n)?;
            Ok((x, c))
        }
        InstanceFormat::Csv(cspec) => {
            let mut rows: Vec<Vec<f64>> = Vec::new();
            for (lineno, line) in raw.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let row: Result<Vec<f64>> = line
                    .split(',')
                    .map(|x| {
                        x.trim().parse::<f64>().map_err(|e| {
                            Error::Parse(format!("line {}: bad number '{x}': {e}", lineno + 1))
                        })
                    })
                    .collect();
                rows.push(row?);
            }
            if rows.is_empty() {
                return Err(Error::Parse("csv instance has no rows".into()));
            }
            let d = rows[0].len();
            let x = VectorSet::from_vectors(d, &rows)?;
            let c = cspec.resolve(d, rows.len())?;
            Ok((x, c))
        }
    }
}

/// Canonical JSON serialization of a validated instance. Floats use the
/// shortest round-trip decimal form, so `parse(serialize(parse(raw)))`
/// reproduces the instance bit-for-bit.
pub fn serialize_instance_json(x: &VectorSet, c: &WeightVector) -> String {
    #[derive(Serialize)]
    struct Out<'a> {
        d: usize,
        n: usize,
        vectors: Vec<Vec<f64>>,
        c: &'a [f64],
    }
    let vectors: Vec<Vec<f64>> = (0..x.count())
        .map(|j| x.matrix().column(j).iter().copied().collect())
        .collect();
    let out = Out {
        d: x.dim(),
        n: x.count(),
        vectors,
        c: c.vector().as_slice(),
    };
    serde_json::to_string(&out).expect("instance serialization cannot fail")
}
