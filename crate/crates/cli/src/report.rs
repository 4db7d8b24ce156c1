//! Machine-readable run reports with fully deterministic serialization:
//! fixed field order (struct order), sorted maps, and every float printed
//! as a 17-significant-digit decimal so reports round-trip exactly and
//! identical runs produce byte-identical output.

use std::io;

use serde::Serialize;
use serde_json::ser::Formatter;

use radiso_core::model::Provenance;
use radiso_core::polytope::Witness;

/// JSON formatter printing all f64 values as `{:.16e}` (17 significant
/// digits, round-trip exact for doubles).
struct SciFormatter;

impl Formatter for SciFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> io::Result<()>
    where
        W: ?Sized + io::Write,
    {
        if !value.is_finite() {
            // JSON has no non-finite literals; reports must sanitize first.
            return Err(io::Error::new(
                io::ErrorKind::InvalidData,
                "non-finite float in report",
            ));
        }
        write!(writer, "{value:.16e}")
    }
}

/// Serializes any report to the canonical byte form (trailing newline).
pub fn to_canonical_json<T: Serialize>(value: &T) -> io::Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SciFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?;
    buf.push(b'\n');
    String::from_utf8(buf).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))
}

#[derive(Serialize)]
pub struct InstanceDigest {
    pub d: usize,
    pub n: usize,
    /// SHA-256 of the canonical instance serialization.
    pub checksum: String,
}

/// Witness with 1-based indices for human consumption.
#[derive(Serialize)]
pub struct WitnessOut {
    pub indices: Vec<usize>,
    pub c_sum: f64,
    pub span_dim: usize,
}

impl WitnessOut {
    pub fn from_core(w: &Witness) -> Self {
        WitnessOut {
            indices: w.indices.iter().map(|i| i + 1).collect(),
            c_sum: w.c_sum,
            span_dim: w.span_dim,
        }
    }
}

#[derive(Serialize)]
pub struct Verdicts {
    /// interior | boundary | outside | unchecked
    pub membership: String,
    pub witness: Option<WitnessOut>,
    pub irreducible: Option<bool>,
    /// 1-based index classes, or null when the relation exceeded its caps.
    pub classes: Option<Vec<Vec<usize>>>,
    pub class_dims: Option<Vec<usize>>,
}

#[derive(Serialize)]
pub struct SolverBlock {
    pub method: String,
    pub converged: bool,
    pub iterations: usize,
    pub grad_norm: f64,
    pub isotropy_residual: f64,
    pub eps: f64,
    pub region_bound: f64,
    pub region_source: String,
}

#[derive(Serialize)]
pub struct BoundsBlock {
    pub beta: f64,
    pub c_min: f64,
    /// Heuristic deepness certificate (subset-span candidates only).
    pub eta: Option<f64>,
    pub delta: Option<f64>,
    pub deepness_certified: bool,
    pub t_inf_new: Option<f64>,
    pub gamma: Option<f64>,
    pub delta_s_min: Option<f64>,
    /// Corrected margin bound R0.
    pub t_inf_hm: Option<f64>,
    /// Margin route converted through the deepness pair.
    pub t_inf_hm_deepness: Option<f64>,
    pub alpha_general: Option<f64>,
    pub alpha_gp: Option<f64>,
    pub kappa_general: Option<f64>,
    pub kappa_gp: Option<f64>,
}

#[derive(Serialize)]
pub struct TransformBlock {
    pub provenance: Provenance,
    /// Row-major d x d entries.
    pub rows: Vec<Vec<f64>>,
}

#[derive(Serialize)]
pub struct ConfigEcho {
    pub method: String,
    pub eps: f64,
    pub max_iters: usize,
    pub beta: f64,
    pub alpha: Option<f64>,
    pub region_bound: Option<f64>,
    pub svd_tol: String,
    pub seed: Option<u64>,
    pub force: bool,
}

#[derive(Serialize)]
pub struct ProvenanceBlock {
    pub artifact: String,
    pub version: String,
    pub command: String,
    pub config: Option<ConfigEcho>,
}

#[derive(Serialize)]
pub struct RunReport {
    pub instance: InstanceDigest,
    pub verdicts: Verdicts,
    pub solver: Option<SolverBlock>,
    pub bounds: Option<BoundsBlock>,
    pub transform: Option<TransformBlock>,
    pub t_apx: Option<Vec<f64>>,
    pub c_apx: Option<Vec<f64>>,
    pub provenance: ProvenanceBlock,
    /// Wall-clock timing, present only on request: it would break
    /// byte-identical reports for identical inputs.
    pub wall_time_ms: Option<f64>,
}

#[derive(Serialize)]
pub struct CheckReport {
    pub instance: InstanceDigest,
    pub membership: String,
    pub witness: Option<WitnessOut>,
    pub classes: Vec<Vec<usize>>,
    pub class_dims: Vec<usize>,
    pub provenance: ProvenanceBlock,
}

#[derive(Serialize)]
pub struct BoundsReport {
    pub instance: InstanceDigest,
    pub bounds: BoundsBlock,
    pub provenance: ProvenanceBlock,
}

#[derive(Serialize)]
pub struct VerifyReport {
    pub instance: InstanceDigest,
    pub residual: f64,
    pub provenance: ProvenanceBlock,
}
