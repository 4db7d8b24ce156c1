//! Feasibility and conditioning: basis-polytope membership, irreducibility
//! classes and problem decomposition, and the numeric estimators for the
//! deepness parameters, gamma, the minimum squared determinant, and all
//! norm / strong-convexity bounds.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{VectorSet, WeightVector};
use crate::potential::{HessianMatrix, WeightedGram};
use crate::simplex::{solve_lp, LpOutcome};
use crate::subsets::{binomial, check_enumeration_cap, delta_s, Subsets};
use crate::tol;

/// Trilean membership verdict for `c` against the basis polytope of `X`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    Interior,
    Boundary,
    Outside,
}

/// A halfspace certificate: the index set `J`, its weight mass, and the
/// dimension of the span of the corresponding vectors.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub indices: Vec<usize>,
    pub c_sum: f64,
    pub span_dim: usize,
}

/// Outcome of a membership query, together with the irreducibility structure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolytopeReport {
    pub member: Membership,
    pub witness: Option<Witness>,
    pub classes: Vec<Vec<usize>>,
    pub class_dims: Vec<usize>,
}

/// Equivalence classes of the completion relation: `i ~ j` when some
/// (d-1)-subset completes to a basis with either index.
#[derive(Debug, Clone, PartialEq)]
pub struct Partition {
    /// Classes sorted by smallest member.
    pub classes: Vec<Vec<usize>>,
    /// Dimension of the span of each class.
    pub dims: Vec<usize>,
    /// Whether every (d-1)-subset was examined. A single class found by
    /// sampling is still a sound irreducibility certificate (witnesses only
    /// ever merge classes).
    pub exhaustive: bool,
}

impl Partition {
    pub fn is_irreducible(&self) -> bool {
        self.classes.len() == 1
    }
}

/// All d-subsets forming bases, with their squared determinants, in
/// lexicographic order.
pub fn enumerate_bases(x: &VectorSet) -> Result<Vec<(Vec<usize>, f64)>> {
    let (n, d) = (x.count(), x.dim());
    check_enumeration_cap(n, d, "enumerate_bases")?;
    let mut out = Vec::new();
    for s in Subsets::new(n, d) {
        let delta = delta_s(x.matrix(), &s);
        if delta > 0.0 {
            out.push((s, delta));
        }
    }
    assert!(
        !out.is_empty(),
        "vector set passed the rank check but yielded no basis"
    );
    Ok(out)
}

/// True when every d-subset of X is a basis.
pub fn is_general_position(x: &VectorSet) -> Result<bool> {
    let bases = enumerate_bases(x)?;
    let all = binomial(x.count() as u64, x.dim() as u64).unwrap_or(u64::MAX);
    Ok(bases.len() as u64 == all)
}

/// Smallest squared determinant over all bases.
pub fn delta_s_min(x: &VectorSet) -> Result<f64> {
    let bases = enumerate_bases(x)?;
    Ok(bases.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min))
}

fn subset_span_dim(columns: &DMatrix<f64>, indices: &[usize]) -> usize {
    let d = columns.nrows();
    let mut m = DMatrix::zeros(d, indices.len());
    for (k, &i) in indices.iter().enumerate() {
        m.set_column(k, &columns.column(i));
    }
    let sv = m.svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return 0;
    }
    sv.iter().filter(|&&s| s > tol::RANK_TOL * smax).count()
}

struct DisjointSet {
    parent: Vec<usize>,
}

impl DisjointSet {
    fn new(n: usize) -> Self {
        DisjointSet {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, i: usize) -> usize {
        if self.parent[i] != i {
            let root = self.find(self.parent[i]);
            self.parent[i] = root;
        }
        self.parent[i]
    }

    fn union(&mut self, i: usize, j: usize) {
        let (ri, rj) = (self.find(i), self.find(j));
        if ri != rj {
            self.parent[ri.max(rj)] = ri.min(rj);
        }
    }

    fn class_count(&mut self, n: usize) -> usize {
        (0..n).filter(|&i| self.find(i) == i).count()
    }
}

fn completions_of(x: &VectorSet, t: &[usize]) -> Vec<usize> {
    let n = x.count();
    let in_t = |i: usize| t.binary_search(&i).is_ok();
    let mut out = Vec::new();
    for i in 0..n {
        if in_t(i) {
            continue;
        }
        let mut s: Vec<usize> = t.to_vec();
        s.push(i);
        s.sort_unstable();
        if delta_s(x.matrix(), &s) > 0.0 {
            out.push(i);
        }
    }
    out
}

/// Computes the equivalence classes of the completion relation.
///
/// When the (d-1)-subset count exceeds the enumeration cap, a seeded sampling
/// pass is attempted; it can certify irreducibility (one class) but never a
/// nontrivial partition, and errs on the side of a cap error otherwise.
pub fn equivalence_classes(x: &VectorSet) -> Result<Partition> {
    let (n, d) = (x.count(), x.dim());
    let mut dsu = DisjointSet::new(n);
    let count = binomial(n as u64, (d - 1) as u64).unwrap_or(u64::MAX);
    let exhaustive = count <= tol::ENUMERATION_CAP;
    if exhaustive {
        for t in Subsets::new(n, d - 1) {
            let comp = completions_of(x, &t);
            for w in comp.windows(2) {
                dsu.union(w[0], w[1]);
            }
        }
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5EED_1507);
        let budget = 64 * n;
        for _ in 0..budget {
            let mut t: Vec<usize> = Vec::with_capacity(d - 1);
            while t.len() < d - 1 {
                let i = rng.random_range(0..n);
                if !t.contains(&i) {
                    t.push(i);
                }
            }
            t.sort_unstable();
            let comp = completions_of(x, &t);
            for w in comp.windows(2) {
                dsu.union(w[0], w[1]);
            }
            if dsu.class_count(n) == 1 {
                break;
            }
        }
        if dsu.class_count(n) != 1 {
            return Err(Error::Cap(format!(
                "equivalence relation needs C({n},{}) = {count} subsets, beyond the cap, \
                 and sampling could not certify irreducibility",
                d - 1
            )));
        }
    }
    let mut by_root: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        by_root.entry(dsu.find(i)).or_default().push(i);
    }
    let classes: Vec<Vec<usize>> = by_root.into_values().collect();
    let dims: Vec<usize> = classes
        .iter()
        .map(|cls| subset_span_dim(x.matrix(), cls))
        .collect();
    let total: usize = dims.iter().sum();
    if total != d {
        return Err(Error::Rank(format!(
            "class subspace dimensions sum to {total}, expected d = {d}"
        )));
    }
    Ok(Partition {
        classes,
        dims,
        exhaustive,
    })
}

/// Exhaustive halfspace membership check against every proper index subset.
/// An equality certificate only counts as a boundary face when it is not an
/// implied equality of the affine hull (every basis meets `J` in exactly
/// `dim span J` elements).
pub fn membership(x: &VectorSet, c: &WeightVector) -> Result<PolytopeReport> {
    let (n, d) = (x.count(), x.dim());
    let subsets: u64 = 1u64 << n.min(63);
    if n >= 63 || subsets > tol::MEMBERSHIP_CAP {
        return Err(Error::Cap(format!(
            "exhaustive halfspace check needs 2^{n} subsets, beyond the cap of {}; \
             use membership_lp",
            tol::MEMBERSHIP_CAP
        )));
    }
    let partition = equivalence_classes(x)?;
    let eq_tol = tol::BOUNDARY_TOL * d as f64;

    let mut worst_violation: Option<Witness> = None;
    let mut equalities: Vec<Witness> = Vec::new();
    for mask in 1u64..(subsets - 1) {
        let indices: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        let c_sum: f64 = indices.iter().map(|&i| c.get(i)).sum();
        let span_dim = subset_span_dim(x.matrix(), &indices);
        let slack = span_dim as f64 - c_sum;
        if slack < -eq_tol {
            let cand = Witness {
                indices,
                c_sum,
                span_dim,
            };
            let better = match &worst_violation {
                None => true,
                Some(w) => c_sum - span_dim as f64 > w.c_sum - w.span_dim as f64,
            };
            if better {
                worst_violation = Some(cand);
            }
        } else if slack <= eq_tol {
            equalities.push(Witness {
                indices,
                c_sum,
                span_dim,
            });
        }
    }

    let (member, witness) = if let Some(w) = worst_violation {
        (Membership::Outside, Some(w))
    } else {
        let mut face: Option<Witness> = None;
        if !equalities.is_empty() {
            let bases = enumerate_bases(x)?;
            equalities.sort_by(|a, b| {
                a.indices
                    .len()
                    .cmp(&b.indices.len())
                    .then_with(|| a.indices.cmp(&b.indices))
            });
            for w in equalities {
                let implied = bases.iter().all(|(s, _)| {
                    s.iter().filter(|i| w.indices.contains(i)).count() == w.span_dim
                });
                if !implied {
                    face = Some(w);
                    break;
                }
            }
        }
        match face {
            Some(w) => (Membership::Boundary, Some(w)),
            None => (Membership::Interior, None),
        }
    };
    Ok(PolytopeReport {
        member,
        witness,
        classes: partition.classes,
        class_dims: partition.dims,
    })
}

/// Membership via the vertex representation: feasibility of
/// `sum_S lambda_S 1_S = c` over enumerated bases, deciding interior by
/// maximizing the minimum vertex weight.
pub fn membership_lp(x: &VectorSet, c: &WeightVector) -> Result<PolytopeReport> {
    let (n, _d) = (x.count(), x.dim());
    let bases = enumerate_bases(x)?;
    let nb = bases.len();
    // Variables: mu_S >= 0 per basis, plus the margin m with
    // lambda_S = mu_S + m. Constraints: marginals and total weight.
    let mut a = DMatrix::zeros(n + 1, nb + 1);
    for (j, (s, _)) in bases.iter().enumerate() {
        for &i in s {
            a[(i, j)] = 1.0;
        }
        a[(n, j)] = 1.0;
    }
    for i in 0..n {
        a[(i, nb)] = bases.iter().filter(|(s, _)| s.contains(&i)).count() as f64;
    }
    a[(n, nb)] = nb as f64;
    let mut b = DVector::zeros(n + 1);
    b.rows_mut(0, n).copy_from(c.vector());
    b[n] = 1.0;
    let mut obj = DVector::zeros(nb + 1);
    obj[nb] = 1.0;

    let partition = equivalence_classes(x)?;
    let member = match solve_lp(&a, &b, &obj) {
        LpOutcome::Infeasible { .. } => Membership::Outside,
        LpOutcome::Unbounded => {
            return Err(Error::Rank(
                "margin LP unbounded; inconsistent basis enumeration".into(),
            ))
        }
        LpOutcome::Optimal { objective, .. } => {
            if objective > 1e-9 {
                Membership::Interior
            } else {
                Membership::Boundary
            }
        }
    };
    // The LP route has no natural halfspace certificate; recover one from the
    // exhaustive check when that is affordable.
    let witness = if member != Membership::Interior && x.count() <= 16 {
        membership(x, c)?.witness
    } else {
        None
    };
    Ok(PolytopeReport {
        member,
        witness,
        classes: partition.classes,
        class_dims: partition.dims,
    })
}

/// One irreducible block of a decomposed instance, expressed in an
/// orthonormal basis of its subspace after the isotropic pre-map.
#[derive(Debug, Clone)]
pub struct SubInstance {
    pub indices: Vec<usize>,
    pub vectors: VectorSet,
    pub weights: WeightVector,
    /// d x d_j orthonormal basis of the block subspace (in pre-mapped
    /// coordinates).
    pub basis: DMatrix<f64>,
}

/// Result of splitting a reducible instance into irreducible blocks.
#[derive(Debug, Clone)]
pub struct Decomposition {
    /// The c-isotropic pre-map `A = (sum_i c_i x_i x_i^T)^{-1/2}` (identity
    /// for irreducible input).
    pub pre_map: DMatrix<f64>,
    pub parts: Vec<SubInstance>,
    pub partition: Partition,
}

/// Splits a reducible instance into per-class sub-instances after mapping to
/// (non-radial) c-isotropic position, verifying that the class subspaces come
/// out mutually orthogonal and that each class carries weight equal to its
/// subspace dimension.
pub fn decompose(x: &VectorSet, c: &WeightVector) -> Result<Decomposition> {
    let (n, d) = (x.count(), x.dim());
    let partition = equivalence_classes(x)?;
    if partition.is_irreducible() {
        let part = SubInstance {
            indices: (0..n).collect(),
            vectors: x.clone(),
            weights: c.clone(),
            basis: DMatrix::identity(d, d),
        };
        return Ok(Decomposition {
            pre_map: DMatrix::identity(d, d),
            parts: vec![part],
            partition,
        });
    }

    // Feasibility requires each class to carry weight exactly equal to the
    // dimension of its subspace.
    for (cls, &dim) in partition.classes.iter().zip(&partition.dims) {
        let sum: f64 = cls.iter().map(|&i| c.get(i)).sum();
        if (sum - dim as f64).abs() > tol::SUM_TOL {
            let (indices, c_sum, span_dim) = if sum > dim as f64 {
                (cls.clone(), sum, dim)
            } else {
                // The complement then carries more weight than its span.
                let comp: Vec<usize> = (0..n).filter(|i| !cls.contains(i)).collect();
                let comp_sum = d as f64 - sum;
                (comp, comp_sum, d - dim)
            };
            let witness = Witness {
                indices,
                c_sum,
                span_dim,
            };
            return Err(Error::Infeasible {
                reason: format!(
                    "class {:?} carries weight {sum} but spans dimension {dim}",
                    cls.iter().map(|i| i + 1).collect::<Vec<_>>()
                ),
                report: Box::new(PolytopeReport {
                    member: Membership::Outside,
                    witness: Some(witness),
                    classes: partition.classes.clone(),
                    class_dims: partition.dims.clone(),
                }),
            });
        }
    }

    // Pre-map to c-isotropic (not radial) position; the class subspaces
    // become orthogonal there.
    let mut m = DMatrix::zeros(d, d);
    for i in 0..n {
        let col = x.column(i);
        m += c.get(i) * &col * col.transpose();
    }
    let eig = m
        .try_symmetric_eigen(f64::EPSILON, 0)
        .ok_or_else(|| Error::Singular("eigensolver failed on the isotropy moment".into()))?;
    if eig.eigenvalues.min() <= 0.0 {
        return Err(Error::Singular(
            "isotropy moment matrix is not positive definite".into(),
        ));
    }
    let mut pre_map = DMatrix::zeros(d, d);
    for k in 0..d {
        let col = eig.eigenvectors.column(k);
        pre_map += eig.eigenvalues[k].powf(-0.5) * &col * col.transpose();
    }

    let mapped = &pre_map * x.matrix();
    let mut part_bases: Vec<DMatrix<f64>> = Vec::new();
    for (cls, &dim) in partition.classes.iter().zip(&partition.dims) {
        let mut block = DMatrix::zeros(d, cls.len());
        for (k, &i) in cls.iter().enumerate() {
            let col = mapped.column(i).into_owned();
            block.set_column(k, &(col.clone() / col.norm()));
        }
        let svd = block
            .try_svd(true, false, f64::EPSILON, 0)
            .ok_or_else(|| Error::Singular("SVD failed on a class block".into()))?;
        let u = svd.u.expect("u requested");
        part_bases.push(u.columns(0, dim).into_owned());
    }
    let ortho_tol = n as f64 * tol::FRO_TOL;
    for j in 0..part_bases.len() {
        for l in j + 1..part_bases.len() {
            let cross = (part_bases[j].transpose() * &part_bases[l]).norm();
            if cross > ortho_tol {
                return Err(Error::Rank(format!(
                    "class subspaces {j} and {l} are not orthogonal after the pre-map \
                     (defect {cross:.3e})"
                )));
            }
        }
    }

    let mut parts = Vec::new();
    for ((cls, &dim), basis) in partition
        .classes
        .iter()
        .zip(&partition.dims)
        .zip(part_bases)
    {
        let mut block = DMatrix::zeros(dim, cls.len());
        for (k, &i) in cls.iter().enumerate() {
            let col = mapped.column(i).into_owned();
            block.set_column(k, &(basis.transpose() * (col.clone() / col.norm())));
        }
        let vectors = VectorSet::new(dim, block)?;
        let weights =
            WeightVector::from_slice(dim, &cls.iter().map(|&i| c.get(i)).collect::<Vec<_>>())?;
        parts.push(SubInstance {
            indices: cls.clone(),
            vectors,
            weights,
            basis,
        });
    }
    Ok(Decomposition {
        pre_map,
        parts,
        partition,
    })
}

/// Heuristic quantitative-interiority certificate.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DeepnessCertificate {
    pub eta: f64,
    pub delta: f64,
    /// How many candidate subspaces were examined. The candidate family is
    /// restricted to spans and best-fit subspaces of small input subsets, so
    /// the certificate is a heuristic, not a proof over all subspaces.
    pub checked_subspaces: usize,
    /// Index set spanning the candidate subspace that attains the minimum
    /// slack at the certified delta.
    pub worst_case: Vec<usize>,
}

struct Candidate {
    indices: Vec<usize>,
    k: usize,
    /// Distance of every x_j from the candidate subspace.
    dists: Vec<f64>,
}

fn subspace_distances(columns: &DMatrix<f64>, basis: &DMatrix<f64>) -> Vec<f64> {
    let n = columns.ncols();
    (0..n)
        .map(|j| {
            let proj = basis.transpose() * columns.column(j);
            (1.0 - proj.norm_squared()).max(0.0).sqrt()
        })
        .collect()
}

/// Number of candidate subspaces the deepness estimate would examine.
pub fn deepness_candidate_count(n: usize, d: usize) -> u64 {
    let mut total: u64 = 0;
    for m in 1..d {
        total = total.saturating_add(binomial(n as u64, m as u64).unwrap_or(u64::MAX));
    }
    for m in 2..=d.min(n) {
        total = total.saturating_add(binomial(n as u64, m as u64).unwrap_or(u64::MAX));
    }
    total
}

fn deepness_candidates(x: &VectorSet) -> Result<Vec<Candidate>> {
    let (n, d) = (x.count(), x.dim());
    let total = deepness_candidate_count(n, d);
    if total > tol::ENUMERATION_CAP {
        return Err(Error::Cap(format!(
            "deepness candidate family has {total} subspaces, beyond the cap of {}",
            tol::ENUMERATION_CAP
        )));
    }
    let mut out = Vec::new();
    // Spans of independent subsets of size 1..d-1.
    for m in 1..d {
        for s in Subsets::new(n, m) {
            let mut block = DMatrix::zeros(d, m);
            for (k, &i) in s.iter().enumerate() {
                block.set_column(k, &x.matrix().column(i));
            }
            let svd = block
                .try_svd(true, false, f64::EPSILON, 0)
                .ok_or_else(|| Error::Singular("SVD failed on a candidate subset".into()))?;
            let sv = &svd.singular_values;
            let rank = sv.iter().filter(|&&v| v > tol::RANK_TOL * sv.max()).count();
            if rank < m {
                continue; // The same span arises from a smaller subset.
            }
            let u = svd.u.expect("u requested");
            let basis = u.columns(0, m).into_owned();
            out.push(Candidate {
                indices: s,
                k: m,
                dists: subspace_distances(x.matrix(), &basis),
            });
        }
    }
    // Best-fit (m-1)-subspaces of subsets of size 2..d: these approach the
    // extremal directions of near-coplanar clusters that plain spans miss.
    for m in 2..=d.min(n) {
        let k = m - 1;
        for s in Subsets::new(n, m) {
            let mut block = DMatrix::zeros(d, m);
            for (j, &i) in s.iter().enumerate() {
                block.set_column(j, &x.matrix().column(i));
            }
            let svd = block
                .try_svd(true, false, f64::EPSILON, 0)
                .ok_or_else(|| Error::Singular("SVD failed on a candidate subset".into()))?;
            let u = svd.u.expect("u requested");
            let basis = u.columns(0, k).into_owned();
            out.push(Candidate {
                indices: s,
                k,
                dists: subspace_distances(x.matrix(), &basis),
            });
        }
    }
    Ok(out)
}

/// The deepness margin at a single delta: the minimum over examined candidate
/// subspaces E of `1 - (sum of c_j over the delta-neighborhood of E) / dim E`,
/// clamped to [0, 1], together with the attaining candidate's index set.
pub fn eta_at_delta(x: &VectorSet, c: &WeightVector, delta: f64) -> Result<(f64, Vec<usize>)> {
    let candidates = deepness_candidates(x)?;
    eta_over(&candidates, c, delta)
}

fn eta_over(candidates: &[Candidate], c: &WeightVector, delta: f64) -> Result<(f64, Vec<usize>)> {
    let mut eta = 1.0f64;
    let mut worst: Vec<usize> = Vec::new();
    for cand in candidates {
        let captured: f64 = cand
            .dists
            .iter()
            .enumerate()
            .filter(|(_, &dist)| dist <= delta)
            .map(|(j, _)| c.get(j))
            .sum();
        let e = 1.0 - captured / cand.k as f64;
        if e < eta {
            eta = e;
            worst = cand.indices.clone();
        }
    }
    Ok((eta.clamp(0.0, 1.0), worst))
}

/// Geometric default grid `2^-1 .. 2^-20` for the deepness search.
pub fn default_delta_grid() -> Vec<f64> {
    (1..=20).map(|k| (2.0f64).powi(-k)).collect()
}

/// Searches the delta grid for the certified pair minimizing the norm bound.
/// Errors with `Degenerate` when no grid point certifies a positive eta.
pub fn deepness_estimate(
    x: &VectorSet,
    c: &WeightVector,
    delta_grid: &[f64],
) -> Result<DeepnessCertificate> {
    for &delta in delta_grid {
        if !(0.0 < delta && delta <= 1.0) {
            return Err(Error::Precondition(format!(
                "delta grid entries must lie in (0, 1], got {delta}"
            )));
        }
    }
    let candidates = deepness_candidates(x)?;
    let d = x.dim();
    let mut best: Option<(f64, DeepnessCertificate)> = None;
    for &delta in delta_grid {
        let (eta, worst) = eta_over(&candidates, c, delta)?;
        if eta <= 0.0 {
            continue;
        }
        let bound = t_inf_bound(c, eta, delta, d);
        let cert = DeepnessCertificate {
            eta,
            delta,
            checked_subspaces: candidates.len(),
            worst_case: worst,
        };
        match &best {
            Some((b, _)) if *b <= bound => {}
            _ => best = Some((bound, cert)),
        }
    }
    best.map(|(_, cert)| cert).ok_or_else(|| {
        Error::Degenerate(
            "no delta on the grid certifies a positive eta; \
             the weights are not certified deep inside the basis polytope"
                .into(),
        )
    })
}

/// Norm bound on the min-zero-normalized minimizer from a deepness pair:
/// `log(1/c_min) + (d-1) log(8/(eta delta^2))`.
pub fn t_inf_bound(c: &WeightVector, eta: f64, delta: f64, d: usize) -> f64 {
    (1.0 / c.min()).ln() + (d as f64 - 1.0) * (8.0 / (eta * delta * delta)).ln()
}

/// Corrected interiority-margin bound `R0 = (1/gamma) log(sum_S Delta_S / Delta_S^min)`.
pub fn hm_bound(x: &VectorSet, gamma: f64) -> Result<f64> {
    if !(gamma > 0.0) {
        return Err(Error::Precondition(format!(
            "gamma must be positive, got {gamma}"
        )));
    }
    let bases = enumerate_bases(x)?;
    let total: f64 = bases.iter().map(|(_, v)| v).sum();
    let min = bases.iter().map(|(_, v)| *v).fold(f64::INFINITY, f64::min);
    Ok((total / min).ln() / gamma)
}

/// The interiority margin for configurations in general position:
/// `c_min / d` (which is `1/n` for uniform weights). Requires `n > d` and,
/// for non-uniform weights, `max c_i <= 1 - c_min/d`.
pub fn gamma_general_position(c: &WeightVector, x: &VectorSet) -> Result<f64> {
    let (n, d) = (x.count(), x.dim());
    if n <= d {
        return Err(Error::Precondition(format!(
            "the margin lower bound needs n > d, got n = {n}, d = {d}"
        )));
    }
    if !is_general_position(x)? {
        return Err(Error::Precondition(
            "configuration is not in general position".into(),
        ));
    }
    let c_min = c.min();
    let c_max = c.vector().max();
    if c_max > 1.0 - c_min / d as f64 + 1e-12 {
        return Err(Error::Precondition(format!(
            "max c = {c_max} exceeds 1 - c_min/d = {}",
            1.0 - c_min / d as f64
        )));
    }
    Ok(c_min / d as f64)
}

/// Converts an interiority margin into a deepness pair
/// `(eta, delta) = (gamma, sqrt(Delta_S^min)/(2d))`, and returns the induced
/// norm bound `log(1/(gamma d)) + (d-1) log(32 d^2/(gamma Delta_S^min))`.
pub fn hm_to_deepness(gamma: f64, delta_s_min: f64, d: usize) -> (f64, f64, f64) {
    let eta = gamma;
    let delta = delta_s_min.sqrt() / (2.0 * d as f64);
    let bound = (1.0 / (gamma * d as f64)).ln()
        + (d as f64 - 1.0) * (32.0 * (d * d) as f64 / (gamma * delta_s_min)).ln();
    (eta, delta, bound)
}

/// Worst-case strong-convexity lower bounds evaluated at a norm level `t_inf`,
/// with the induced condition numbers `kappa = beta / alpha` for `beta = 1/2`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AlphaBounds {
    pub alpha_general: f64,
    pub alpha_gp: Option<f64>,
    pub kappa_general: f64,
    pub kappa_gp: Option<f64>,
}

/// Evaluates both strong-convexity lower bounds at `|t|_inf = t_inf`:
/// the deepness-based bound `delta^2 / (d n^4 e^{2 t}(1 + sqrt(n) e^t / delta)^{2d})`
/// and, in general position, `(Delta_S^min)^2 d (n-d) / (e^{4 d t} n (n-1))`.
pub fn alpha_bounds(x: &VectorSet, eta: f64, delta: f64, t_inf: f64) -> Result<AlphaBounds> {
    if !(0.0 < eta && eta <= 1.0) || !(0.0 < delta && delta <= 1.0) {
        return Err(Error::Precondition(format!(
            "deepness parameters must lie in (0,1], got eta = {eta}, delta = {delta}"
        )));
    }
    let (n, d) = (x.count() as f64, x.dim() as f64);
    let e_t = t_inf.exp();
    let alpha_general =
        delta * delta / (d * n.powi(4) * (2.0 * t_inf).exp() * (1.0 + n.sqrt() * e_t / delta).powf(2.0 * d));
    let alpha_gp = match is_general_position(x) {
        Ok(true) if x.count() > x.dim() => {
            let dmin = delta_s_min(x)?;
            Some(dmin * dmin * d * (n - d) / ((4.0 * d * t_inf).exp() * n * (n - 1.0)))
        }
        _ => None,
    };
    Ok(AlphaBounds {
        alpha_general,
        kappa_general: 0.5 / alpha_general,
        kappa_gp: alpha_gp.map(|a| 0.5 / a),
        alpha_gp,
    })
}

/// Budget for the bipartition scan in [`xi_estimate`].
#[derive(Debug, Clone, Copy)]
pub enum XiBudget {
    Exhaustive,
    Sampled { partitions: usize, seed: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct XiEstimate {
    /// Minimum over examined bipartitions of
    /// `sum_{i in +} sum_{j in -} <u_i, u_j>^2`.
    pub value: f64,
    pub exact: bool,
    pub partitions_examined: u64,
}

/// Minimum cross-coupling of the U rows over bipartitions of the index set;
/// `alpha >= Xi / n^3` lower-bounds the Hessian on the complement of the
/// all-ones direction.
pub fn xi_estimate(g: &WeightedGram, budget: XiBudget) -> Result<XiEstimate> {
    let n = g.count();
    let gram = g.u() * g.u().transpose();
    let g2 = gram.map(|v| v * v);
    let xi_of = |mask: u64| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            if mask >> i & 1 == 1 {
                for j in 0..n {
                    if mask >> j & 1 == 0 {
                        acc += g2[(i, j)];
                    }
                }
            }
        }
        acc
    };
    match budget {
        XiBudget::Exhaustive => {
            let half: u64 = 1u64 << (n - 1).min(63);
            if n >= 63 || half > tol::MEMBERSHIP_CAP {
                return Err(Error::Cap(format!(
                    "exhaustive bipartition scan needs 2^{} masks, beyond the cap",
                    n - 1
                )));
            }
            let mut min = f64::INFINITY;
            // Fix index n-1 on the negative side to enumerate unordered pairs.
            for mask in 1..half {
                min = min.min(xi_of(mask));
            }
            Ok(XiEstimate {
                value: min,
                exact: true,
                partitions_examined: half - 1,
            })
        }
        XiBudget::Sampled { partitions, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let full: u64 = (1u64 << n.min(63)) - 1;
            let mut min = f64::INFINITY;
            let mut examined = 0;
            for _ in 0..partitions {
                let mask = rng.random_range(1..full);
                min = min.min(xi_of(mask));
                examined += 1;
            }
            Ok(XiEstimate {
                value: min,
                exact: false,
                partitions_examined: examined,
            })
        }
    }
}

/// Orthonormal basis of the hyperplane orthogonal to the all-ones vector.
fn ones_complement_basis(n: usize) -> DMatrix<f64> {
    let u = DVector::from_element(n, 1.0 / (n as f64).sqrt());
    let mut v = -u;
    v[0] += 1.0;
    let norm = v.norm();
    if norm < 1e-300 {
        // n = 1: the complement is trivial.
        return DMatrix::zeros(1, 0);
    }
    v /= norm;
    let house = DMatrix::identity(n, n) - 2.0 * &v * v.transpose();
    house.columns(1, n - 1).into_owned()
}

/// Exact smallest eigenvalue of the Hessian restricted to the complement of
/// the all-ones direction.
pub fn hessian_min_eigenvalue_on_complement(h: &HessianMatrix) -> f64 {
    let n = h.n();
    if n <= 1 {
        return 0.0;
    }
    let p = ones_complement_basis(n);
    let restricted = p.transpose() * h.matrix() * &p;
    let eig = restricted
        .try_symmetric_eigen(f64::EPSILON, 0)
        .expect("symmetric eigensolver converges");
    eig.eigenvalues.min()
}

/// Dimension of the affine hull of the basis polytope, from the rank of the
/// centered vertex indicators.
pub fn basis_polytope_affine_dim(x: &VectorSet) -> Result<usize> {
    let bases = enumerate_bases(x)?;
    let n = x.count();
    if bases.len() == 1 {
        return Ok(0);
    }
    let mut m: DMatrix<f64> = DMatrix::zeros(bases.len() - 1, n);
    for (r, (s, _)) in bases.iter().skip(1).enumerate() {
        for &i in s {
            m[(r, i)] += 1.0;
        }
        for &i in &bases[0].0 {
            m[(r, i)] -= 1.0;
        }
    }
    let sv = m.svd(false, false).singular_values;
    let smax = sv.max();
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > 1e-8 * smax).count())
}
