//! Finite-dimensional real Lie algebras with exact rational structure
//! constants.
//!
//! Brackets are stored antisymmetrically (keys `(a, b)` with `a < b`), so
//! antisymmetry holds by construction and validation reduces to checking
//! the Jacobi identity component by component, with no tolerance anywhere.

use crate::linalg::{QMat, QVec};
use crate::rational::{fmt_q, parse_q, qi, Q};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("parse error in {field}: {message}")]
    Parse { field: String, message: String },
    #[error("structure index out of range: ({a},{b})->{c} in a dimension-{dim} algebra")]
    IndexOutOfRange {
        a: usize,
        b: usize,
        c: usize,
        dim: usize,
    },
    #[error("both ({a},{b}) and ({b},{a}) brackets specified; store one orientation only")]
    DuplicateBracket { a: usize, b: usize },
    #[error("bracket ({a},{a}) must vanish by antisymmetry")]
    DiagonalBracket { a: usize },
    #[error("metric must be a symmetric {dim}x{dim} matrix")]
    BadMetric { dim: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("unknown builtin algebra {0:?}")]
    UnknownBuiltin(String),
    #[error("split index sets do not partition the basis")]
    NotAPartition,
    #[error("subalgebra is not closed: [{a},{b}] has a component along basis element {c}")]
    NotClosed { a: usize, b: usize, c: usize },
    #[error("ideal condition fails: [{a},{b}] has a component along basis element {c}")]
    NotAnIdeal { a: usize, b: usize, c: usize },
    #[error("ideal declared abelian but [{a},{b}] is nonzero")]
    NotAbelian { a: usize, b: usize },
    #[error("Killing form of the subalgebra is degenerate (rank {rank} < {dim})")]
    DegenerateKilling { rank: usize, dim: usize },
    #[error("operation requires metric_for_indices, which is not set")]
    MissingMetric,
}

/// A Lie algebra presented by basis labels and structure constants
/// `[e_a, e_b] = f^c_{ab} e_c`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LieAlgebraSpec {
    pub name: String,
    pub basis: Vec<String>,
    /// `(a, b) -> {c -> f^c_{ab}}` with `a < b`.
    structure: BTreeMap<(usize, usize), BTreeMap<usize, Q>>,
    /// Symmetric matrix used to raise and lower adjoint indices in derived
    /// formulas (invariant polynomials, epsilon contractions).
    pub metric_for_indices: Option<Vec<Vec<Q>>>,
}

/// One violated Jacobi component, with the nonzero residual
/// `sum_e (f^e_ab f^d_ec + f^e_bc f^d_ea + f^e_ca f^d_eb)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct JacobiViolation {
    pub a: usize,
    pub b: usize,
    pub c: usize,
    pub d: usize,
    pub residual: String,
}

/// Outcome of [`LieAlgebraSpec::validate`]; empty means valid.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    /// `(a, b, c)` with `f^c_{ab} + f^c_{ba} != 0`. Always empty for specs
    /// built through the canonical constructors, which store one
    /// orientation per pair.
    pub antisymmetry: Vec<(usize, usize, usize)>,
    pub jacobi: Vec<JacobiViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry.is_empty() && self.jacobi.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid");
        }
        for (a, b, c) in &self.antisymmetry {
            writeln!(f, "antisymmetry violated at (a,b,c)=({a},{b},{c})")?;
        }
        for v in &self.jacobi {
            writeln!(
                f,
                "jacobi violated at (a,b,c,d)=({},{},{},{}): residual {}",
                v.a, v.b, v.c, v.d, v.residual
            )?;
        }
        Ok(())
    }
}

/// Symmetric bilinear form on the algebra, e.g. a Killing metric or an
/// invariant quadratic form for a Chern–Simons action.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BilinearForm {
    pub matrix: Vec<Vec<Q>>,
}

impl BilinearForm {
    pub fn new(matrix: Vec<Vec<Q>>) -> Result<Self, AlgebraError> {
        let dim = matrix.len();
        let square = matrix.iter().all(|r| r.len() == dim);
        let symmetric = square && (0..dim).all(|i| (0..dim).all(|j| matrix[i][j] == matrix[j][i]));
        if !square || !symmetric {
            return Err(AlgebraError::BadMetric { dim });
        }
        Ok(BilinearForm { matrix })
    }

    pub fn dim(&self) -> usize {
        self.matrix.len()
    }

    pub fn rank(&self) -> usize {
        dense_to_mat(&self.matrix).rank()
    }

    pub fn is_nondegenerate(&self) -> bool {
        self.rank() == self.dim()
    }

    pub fn zero(dim: usize) -> Self {
        BilinearForm {
            matrix: vec![vec![Q::zero(); dim]; dim],
        }
    }

    pub fn add_scaled(&self, other: &BilinearForm, scale: &Q) -> Self {
        let dim = self.dim();
        let mut m = self.matrix.clone();
        for i in 0..dim {
            for j in 0..dim {
                m[i][j] += scale * &other.matrix[i][j];
            }
        }
        BilinearForm { matrix: m }
    }
}

fn dense_to_mat(m: &[Vec<Q>]) -> QMat {
    let nrows = m.len();
    let ncols = m.first().map_or(0, |r| r.len());
    let mut cols: Vec<QVec> = vec![Vec::new(); ncols];
    for (i, row) in m.iter().enumerate() {
        for (j, v) in row.iter().enumerate() {
            if !v.is_zero() {
                cols[j].push((i, v.clone()));
            }
        }
    }
    QMat::from_cols(nrows, cols)
}

/// A user-declared decomposition `G = K ⋉ J` into a subalgebra and an ideal.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SemidirectSplit {
    pub subalg_indices: Vec<usize>,
    pub ideal_indices: Vec<usize>,
    pub abelian_ideal: bool,
}

/// Evidence record returned by [`verify_semidirect`].
#[derive(Clone, Debug, Serialize)]
pub struct SplitCertificate {
    pub dim_subalg: usize,
    pub dim_ideal: usize,
    pub abelian_ideal: bool,
    /// Rank of the subalgebra's own Killing form; equals `dim_subalg`.
    pub killing_rank_subalg: usize,
}

impl LieAlgebraSpec {
    /// Builds a spec from raw bracket entries `(a, b, c, f^c_{ab})`.
    /// Either orientation of `(a, b)` may be given, but not both.
    pub fn new(
        name: &str,
        basis: Vec<String>,
        entries: &[(usize, usize, usize, Q)],
        metric_for_indices: Option<Vec<Vec<Q>>>,
    ) -> Result<Self, AlgebraError> {
        let dim = basis.len();
        if let Some(m) = &metric_for_indices {
            BilinearForm::new(m.clone())?;
            if m.len() != dim {
                return Err(AlgebraError::BadMetric { dim });
            }
        }
        let mut structure: BTreeMap<(usize, usize), BTreeMap<usize, Q>> = BTreeMap::new();
        let mut seen_orientation: BTreeMap<(usize, usize), bool> = BTreeMap::new();
        for (a, b, c, v) in entries {
            let (a, b, c) = (*a, *b, *c);
            if a >= dim || b >= dim || c >= dim {
                return Err(AlgebraError::IndexOutOfRange { a, b, c, dim });
            }
            if a == b {
                return Err(AlgebraError::DiagonalBracket { a });
            }
            let (key, flip) = if a < b {
                ((a, b), false)
            } else {
                ((b, a), true)
            };
            if let Some(prev_flip) = seen_orientation.get(&key) {
                if *prev_flip != flip {
                    return Err(AlgebraError::DuplicateBracket { a: key.0, b: key.1 });
                }
            } else {
                seen_orientation.insert(key, flip);
            }
            let coeff = if flip { -v.clone() } else { v.clone() };
            let slot = structure
                .entry(key)
                .or_default()
                .entry(c)
                .or_insert_with(Q::zero);
            *slot += coeff;
        }
        for m in structure.values_mut() {
            m.retain(|_, v| !v.is_zero());
        }
        structure.retain(|_, m| !m.is_empty());
        Ok(LieAlgebraSpec {
            name: name.to_string(),
            basis,
            structure,
            metric_for_indices,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    /// Structure constant `f^c_{ab}`.
    pub fn f(&self, c: usize, a: usize, b: usize) -> Q {
        if a == b {
            return Q::zero();
        }
        let (key, sign) = if a < b { ((a, b), 1) } else { ((b, a), -1) };
        match self.structure.get(&key).and_then(|m| m.get(&c)) {
            Some(v) if sign > 0 => v.clone(),
            Some(v) => -v.clone(),
            None => Q::zero(),
        }
    }

    /// Sparse bracket `[e_a, e_b] = sum_c f^c_{ab} e_c`.
    pub fn bracket(&self, a: usize, b: usize) -> Vec<(usize, Q)> {
        if a == b {
            return Vec::new();
        }
        let (key, neg) = if a < b {
            ((a, b), false)
        } else {
            ((b, a), true)
        };
        self.structure
            .get(&key)
            .map(|m| {
                m.iter()
                    .map(|(c, v)| (*c, if neg { -v.clone() } else { v.clone() }))
                    .collect()
            })
            .unwrap_or_default()
    }

    /// Checks every antisymmetry and Jacobi component exactly.
    pub fn validate(&self) -> ValidationReport {
        let dim = self.dim();
        let mut report = ValidationReport::default();
        for a in 0..dim {
            for b in (a + 1)..dim {
                for c in (b + 1)..dim {
                    for d in 0..dim {
                        let mut acc = Q::zero();
                        for e in 0..dim {
                            acc += self.f(e, a, b) * self.f(d, e, c);
                            acc += self.f(e, b, c) * self.f(d, e, a);
                            acc += self.f(e, c, a) * self.f(d, e, b);
                        }
                        if !acc.is_zero() {
                            report.jacobi.push(JacobiViolation {
                                a,
                                b,
                                c,
                                d,
                                residual: fmt_q(&acc),
                            });
                        }
                    }
                }
            }
        }
        report
    }

    /// Killing metric `G_{ab} = f^d_{ac} f^c_{bd}` and its rank.
    pub fn killing_form(&self) -> BilinearForm {
        let dim = self.dim();
        let mut m = vec![vec![Q::zero(); dim]; dim];
        for a in 0..dim {
            for b in a..dim {
                let mut acc = Q::zero();
                for c in 0..dim {
                    for d in 0..dim {
                        acc += self.f(d, a, c) * self.f(c, b, d);
                    }
                }
                m[a][b] = acc.clone();
                m[b][a] = acc;
            }
        }
        BilinearForm { matrix: m }
    }

    pub fn metric(&self) -> Result<&Vec<Vec<Q>>, AlgebraError> {
        self.metric_for_indices
            .as_ref()
            .ok_or(AlgebraError::MissingMetric)
    }

    /// Extracts the subalgebra spanned by `indices` (must be closed).
    pub fn subalgebra(
        &self,
        indices: &[usize],
        name: &str,
    ) -> Result<LieAlgebraSpec, AlgebraError> {
        let pos: BTreeMap<usize, usize> =
            indices.iter().enumerate().map(|(i, &g)| (g, i)).collect();
        let basis = indices.iter().map(|&g| self.basis[g].clone()).collect();
        let mut entries = Vec::new();
        for (i, &a) in indices.iter().enumerate() {
            for &b in &indices[i + 1..] {
                for (c, v) in self.bracket(a, b) {
                    match pos.get(&c) {
                        Some(&cc) => entries.push((pos[&a], pos[&b], cc, v)),
                        None => return Err(AlgebraError::NotClosed { a, b, c }),
                    }
                }
            }
        }
        let metric = self.metric_for_indices.as_ref().map(|m| {
            indices
                .iter()
                .map(|&i| indices.iter().map(|&j| m[i][j].clone()).collect())
                .collect()
        });
        LieAlgebraSpec::new(name, basis, &entries, metric)
    }

    /// Canonical JSON of the algebra spec file format; stable across runs,
    /// suitable as a cache-key ingredient.
    pub fn to_canonical_json(&self) -> String {
        let mut entries: Vec<(usize, usize, usize, String)> = Vec::new();
        for ((a, b), m) in &self.structure {
            for (c, v) in m {
                entries.push((*a, *b, *c, fmt_q(v)));
            }
        }
        let file = AlgebraFile {
            name: self.name.clone(),
            basis: self.basis.clone(),
            structure: entries
                .into_iter()
                .map(|(a, b, c, v)| StructureEntry(a, b, c, v))
                .collect(),
            metric: self
                .metric_for_indices
                .as_ref()
                .map(|m| m.iter().map(|r| r.iter().map(fmt_q).collect()).collect()),
        };
        serde_json::to_string(&file).expect("algebra spec serializes")
    }

    /// Parses the JSON spec file format.
    pub fn from_json(text: &str) -> Result<Self, AlgebraError> {
        let file: AlgebraFile = serde_json::from_str(text).map_err(|e| AlgebraError::Parse {
            field: "algebra file".into(),
            message: e.to_string(),
        })?;
        let mut entries = Vec::new();
        for (i, StructureEntry(a, b, c, v)) in file.structure.iter().enumerate() {
            let q = parse_q(v).map_err(|message| AlgebraError::Parse {
                field: format!("structure[{i}]"),
                message,
            })?;
            entries.push((*a, *b, *c, q));
        }
        let metric = match file.metric {
            None => None,
            Some(rows) => {
                let mut m = Vec::new();
                for (i, row) in rows.iter().enumerate() {
                    let mut r = Vec::new();
                    for (j, v) in row.iter().enumerate() {
                        r.push(parse_q(v).map_err(|message| AlgebraError::Parse {
                            field: format!("metric[{i}][{j}]"),
                            message,
                        })?);
                    }
                    m.push(r);
                }
                Some(m)
            }
        };
        LieAlgebraSpec::new(&file.name, file.basis, &entries, metric)
    }
}

#[derive(Serialize, Deserialize)]
struct StructureEntry(usize, usize, usize, String);

#[derive(Serialize, Deserialize)]
struct AlgebraFile {
    name: String,
    basis: Vec<String>,
    structure: Vec<StructureEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    metric: Option<Vec<Vec<String>>>,
}

/// Checks the declared split: partition, closure of the subalgebra, the
/// ideal property, abelianness when claimed, and nondegeneracy of the
/// subalgebra's Killing form (the semisimplicity certificate).
pub fn verify_semidirect(
    alg: &LieAlgebraSpec,
    split: &SemidirectSplit,
) -> Result<SplitCertificate, AlgebraError> {
    let dim = alg.dim();
    let mut seen = vec![false; dim];
    for &i in split.subalg_indices.iter().chain(&split.ideal_indices) {
        if i >= dim || seen[i] {
            return Err(AlgebraError::NotAPartition);
        }
        seen[i] = true;
    }
    if seen.iter().any(|s| !s) {
        return Err(AlgebraError::NotAPartition);
    }
    let in_ideal = |c: usize| split.ideal_indices.contains(&c);
    // [K,K] in K
    for (i, &a) in split.subalg_indices.iter().enumerate() {
        for &b in &split.subalg_indices[i + 1..] {
            for (c, _) in alg.bracket(a, b) {
                if in_ideal(c) {
                    return Err(AlgebraError::NotClosed { a, b, c });
                }
            }
        }
    }
    let sub = alg.subalgebra(&split.subalg_indices, "K")?;
    let killing = sub.killing_form();
    let rank = killing.rank();
    if rank != sub.dim() {
        return Err(AlgebraError::DegenerateKilling {
            rank,
            dim: sub.dim(),
        });
    }
    // [K,J] in J and [J,J] in J
    for &a in split.subalg_indices.iter().chain(&split.ideal_indices) {
        for &b in &split.ideal_indices {
            if a == b {
                continue;
            }
            for (c, v) in alg.bracket(a, b) {
                if !in_ideal(c) {
                    return Err(AlgebraError::NotAnIdeal { a, b, c });
                }
                if split.abelian_ideal && in_ideal(a) && !v.is_zero() {
                    return Err(AlgebraError::NotAbelian { a, b });
                }
            }
        }
    }
    Ok(SplitCertificate {
        dim_subalg: split.subalg_indices.len(),
        dim_ideal: split.ideal_indices.len(),
        abelian_ideal: split.abelian_ideal,
        killing_rank_subalg: rank,
    })
}

/// Ad-invariance check: `sum_D (f^D_{CA} Ω_{DB} + f^D_{CB} Ω_{AD}) = 0`
/// for all `A, B, C`; on failure returns the first violating triple.
pub fn check_invariant_metric(
    alg: &LieAlgebraSpec,
    omega: &BilinearForm,
) -> Result<Result<(), (usize, usize, usize)>, AlgebraError> {
    let dim = alg.dim();
    if omega.dim() != dim {
        return Err(AlgebraError::DimensionMismatch {
            expected: dim,
            got: omega.dim(),
        });
    }
    for a in 0..dim {
        for b in 0..dim {
            for c in 0..dim {
                let mut acc = Q::zero();
                for d in 0..dim {
                    acc += alg.f(d, c, a) * &omega.matrix[d][b];
                    acc += alg.f(d, c, b) * &omega.matrix[a][d];
                }
                if !acc.is_zero() {
                    return Ok(Err((a, b, c)));
                }
            }
        }
    }
    Ok(Ok(()))
}

fn eps(a: usize, b: usize, c: usize) -> i64 {
    match (a, b, c) {
        (0, 1, 2) | (1, 2, 0) | (2, 0, 1) => 1,
        (0, 2, 1) | (2, 1, 0) | (1, 0, 2) => -1,
        _ => 0,
    }
}

fn delta3() -> Vec<Vec<Q>> {
    (0..3)
        .map(|i| (0..3).map(|j| qi((i == j) as i64)).collect())
        .collect()
}

fn eta3() -> Vec<Vec<Q>> {
    let mut m = delta3();
    m[0][0] = qi(-1);
    m
}

fn block_diag(a: &[Vec<Q>], b: &[Vec<Q>]) -> Vec<Vec<Q>> {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![Q::zero(); n + m]; n + m];
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[i][j].clone();
        }
    }
    for i in 0..m {
        for j in 0..m {
            out[n + i][n + j] = b[i][j].clone();
        }
    }
    out
}

/// `[e_a, e_b] = eps_{abd} g^{dc} e_c` entries for a 3-dim rotation sector,
/// with `g` diagonal `(+1,+1,+1)` or `(-1,+1,+1)`.
fn rotation_entries(
    g: &[Vec<Q>],
    offset_ab: usize,
    offset_c: usize,
    scale: &Q,
) -> Vec<(usize, usize, usize, Q)> {
    let mut entries = Vec::new();
    for a in 0..3 {
        for b in (a + 1)..3 {
            for c in 0..3 {
                // diagonal metric: raising is division by g_cc (= multiplication)
                let e = eps(a, b, c);
                if e != 0 {
                    let v = qi(e) * &g[c][c] * scale;
                    if !v.is_zero() {
                        entries.push((offset_ab + a, offset_ab + b, offset_c + c, v));
                    }
                }
            }
        }
    }
    entries
}

fn labels(prefix: &str, n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("{prefix}{i}")).collect()
}

/// `so(3)`: `[J_a, J_b] = eps_{abc} J^c` with the Euclidean metric.
pub fn so3() -> LieAlgebraSpec {
    let g = delta3();
    let entries = rotation_entries(&g, 0, 0, &qi(1));
    LieAlgebraSpec::new("so3", labels("J", 3), &entries, Some(g)).unwrap()
}

/// `so(2,1)`: the Lorentzian signature (−,+,+) sibling of `so(3)`.
pub fn so21() -> LieAlgebraSpec {
    let g = eta3();
    let entries = rotation_entries(&g, 0, 0, &qi(1));
    LieAlgebraSpec::new("so21", labels("J", 3), &entries, Some(g)).unwrap()
}

fn iso_entries(g: &[Vec<Q>], pp_scale: &Q) -> Vec<(usize, usize, usize, Q)> {
    let mut entries = rotation_entries(g, 0, 0, &qi(1)); // [J,J] = eps J
                                                         // [J_a, P_b] = eps_{abd} g^{dc} P_c
    for a in 0..3 {
        for b in 0..3 {
            for c in 0..3 {
                let e = eps(a, b, c);
                if e != 0 {
                    entries.push((a, 3 + b, 3 + c, qi(e) * &g[c][c]));
                }
            }
        }
    }
    // [P_a, P_b] = lambda eps_{abd} g^{dc} J_c
    if !pp_scale.is_zero() {
        entries.extend(rotation_entries(g, 3, 0, pp_scale));
    }
    entries
}

/// The Euclidean algebra `iso(3) = so(3) ⋉ R^3`.
pub fn iso3() -> LieAlgebraSpec {
    let g = delta3();
    let entries = iso_entries(&g, &Q::zero());
    let metric = block_diag(&g, &g);
    let mut basis = labels("J", 3);
    basis.extend(labels("P", 3));
    LieAlgebraSpec::new("iso3", basis, &entries, Some(metric)).unwrap()
}

/// The Poincaré algebra `iso(2,1) = so(2,1) ⋉ R^3`.
pub fn iso21() -> LieAlgebraSpec {
    iso21_deformed(&Q::zero())
}

/// `[P_a, P_b] = lambda eps_{abc} J^c` on top of `iso(2,1)`; `lambda = 0`
/// is the Poincaré algebra, `lambda > 0` is `so(2,1) ⊕ so(2,1)` in a
/// rotated basis.
pub fn iso21_deformed(lambda: &Q) -> LieAlgebraSpec {
    let g = eta3();
    let entries = iso_entries(&g, lambda);
    let metric = block_diag(&g, &g);
    let mut basis = labels("J", 3);
    basis.extend(labels("P", 3));
    let name = if lambda.is_zero() {
        "iso21".to_string()
    } else {
        format!("iso21[lambda={}]", fmt_q(lambda))
    };
    LieAlgebraSpec::new(&name, basis, &entries, Some(metric)).unwrap()
}

/// Direct sum of two `so(2,1)` factors.
pub fn so21_plus_so21() -> LieAlgebraSpec {
    let g = eta3();
    let mut entries = rotation_entries(&g, 0, 0, &qi(1));
    entries.extend(rotation_entries(&g, 3, 3, &qi(1)));
    let metric = block_diag(&g, &g);
    let mut basis = labels("J", 3);
    basis.extend(labels("K", 3));
    LieAlgebraSpec::new("so21+so21", basis, &entries, Some(metric)).unwrap()
}

/// The abelian algebra of dimension `n`.
pub fn abelian(n: usize) -> LieAlgebraSpec {
    let metric = (0..n)
        .map(|i| (0..n).map(|j| qi((i == j) as i64)).collect())
        .collect();
    LieAlgebraSpec::new(&format!("abelian{n}"), labels("T", n), &[], Some(metric)).unwrap()
}

/// Resolves a builtin algebra name: `so3`, `so21`, `iso3`, `iso21`,
/// `so21+so21` and `abelianN`.
pub fn builtin(name: &str) -> Result<LieAlgebraSpec, AlgebraError> {
    match name {
        "so3" => Ok(so3()),
        "so21" => Ok(so21()),
        "iso3" => Ok(iso3()),
        "iso21" => Ok(iso21()),
        "so21+so21" | "so21xso21" => Ok(so21_plus_so21()),
        _ => {
            if let Some(n) = name.strip_prefix("abelian") {
                if let Ok(n) = n.parse::<usize>() {
                    return Ok(abelian(n));
                }
            }
            Err(AlgebraError::UnknownBuiltin(name.to_string()))
        }
    }
}

/// The natural split for a builtin name, when one exists.
pub fn builtin_split(name: &str) -> Option<SemidirectSplit> {
    match name {
        "iso3" | "iso21" => Some(SemidirectSplit {
            subalg_indices: vec![0, 1, 2],
            ideal_indices: vec![3, 4, 5],
            abelian_ideal: true,
        }),
        "so21+so21" | "so21xso21" => Some(SemidirectSplit {
            subalg_indices: vec![0, 1, 2],
            ideal_indices: vec![3, 4, 5],
            abelian_ideal: false,
        }),
        "so3" | "so21" => Some(SemidirectSplit {
            subalg_indices: vec![0, 1, 2],
            ideal_indices: vec![],
            abelian_ideal: true,
        }),
        _ => {
            if name
                .strip_prefix("abelian")
                .is_some_and(|n| n.parse::<usize>().is_ok())
            {
                let alg = builtin(name).ok()?;
                Some(SemidirectSplit {
                    subalg_indices: vec![],
                    ideal_indices: (0..alg.dim()).collect(),
                    abelian_ideal: true,
                })
            } else {
                None
            }
        }
    }
}

/// The invariant quadratic form of the `iso(2,1)` Chern–Simons action:
/// off-diagonal `<J_a, P_b> = g_ab` blocks, vanishing on `J×J` and `P×P`.
pub fn omega0_iso21() -> BilinearForm {
    let g = eta3();
    let mut m = vec![vec![Q::zero(); 6]; 6];
    for a in 0..3 {
        for b in 0..3 {
            m[a][3 + b] = g[a][b].clone();
            m[3 + a][b] = g[a][b].clone();
        }
    }
    BilinearForm { matrix: m }
}

/// Deformed structure constants together with the deformed invariant
/// metric `Omega^{lambda,mu} = Omega^(0) + mu * K_lambda`, where
/// `K_lambda` is the Killing form of the deformed algebra. The Killing
/// form is used for the second summand because that is the invariant
/// symmetric tensor the deformation parameter multiplies; it is
/// proportional to `diag(g, lambda g)` on the `(J, P)` blocks.
pub fn deform_iso21(lambda: &Q, mu: &Q) -> (LieAlgebraSpec, BilinearForm) {
    let alg = iso21_deformed(lambda);
    let omega = omega0_iso21().add_scaled(&alg.killing_form(), mu);
    (alg, omega)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::qr;

    #[test]
    fn builtins_validate() {
        for name in ["so3", "so21", "iso3", "iso21", "so21+so21", "abelian4"] {
            let alg = builtin(name).unwrap();
            let report = alg.validate();
            assert!(report.is_valid(), "{name}: {report}");
        }
    }

    #[test]
    fn jacobi_violation_reported() {
        // so(3) with an extra f^1_{12} = 1 component breaks Jacobi at
        // (a,b,c,d) = (0,1,2,1).
        let mut entries = vec![
            (0usize, 1usize, 2usize, qi(1)),
            (1, 2, 0, qi(1)),
            (2, 0, 1, qi(1)),
        ];
        entries.push((0, 1, 0, qi(1)));
        let alg = LieAlgebraSpec::new("so3tilde", labels("e", 3), &entries, None).unwrap();
        let report = alg.validate();
        assert!(!report.is_valid());
        assert!(report
            .jacobi
            .iter()
            .any(|v| (v.a, v.b, v.c, v.d) == (0, 1, 2, 1)));
    }

    #[test]
    fn scaled_epsilon_still_satisfies_jacobi() {
        // Scaling a single epsilon component rescales the basis but stays a
        // Lie algebra, so no Jacobi component may be reported.
        let entries = vec![
            (1usize, 2usize, 0usize, qi(2)),
            (2, 0, 1, qi(1)),
            (0, 1, 2, qi(1)),
        ];
        let alg = LieAlgebraSpec::new("so3scaled", labels("e", 3), &entries, None).unwrap();
        assert!(alg.validate().is_valid());
    }

    #[test]
    fn killing_forms() {
        // so(3): G_ab = -2 delta_ab under eps_123 = 1.
        let k = so3().killing_form();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { qi(-2) } else { qi(0) };
                assert_eq!(k.matrix[i][j], expect);
            }
        }
        assert_eq!(k.rank(), 3);
        // abelian: zero matrix
        assert!(abelian(3)
            .killing_form()
            .matrix
            .iter()
            .flatten()
            .all(|v| v.is_zero()));
        // iso(2,1): rank 3, zero P-P and J-P blocks
        let k = iso21().killing_form();
        assert_eq!(k.rank(), 3);
        for a in 0..6 {
            for b in 3..6 {
                assert!(k.matrix[a][b].is_zero());
                assert!(k.matrix[b][a].is_zero());
            }
        }
    }

    #[test]
    fn semidirect_verification() {
        let alg = iso3();
        let split = builtin_split("iso3").unwrap();
        let cert = verify_semidirect(&alg, &split).unwrap();
        assert_eq!(cert.killing_rank_subalg, 3);

        // direct sum with a non-abelian "ideal" passes with the flag off
        let alg2 = so21_plus_so21();
        let split2 = builtin_split("so21+so21").unwrap();
        assert!(!split2.abelian_ideal);
        verify_semidirect(&alg2, &split2).unwrap();

        // declaring the second factor abelian must fail
        let bad = SemidirectSplit {
            abelian_ideal: true,
            ..split2
        };
        assert!(matches!(
            verify_semidirect(&alg2, &bad),
            Err(AlgebraError::NotAbelian { .. })
        ));

        // K = translations: Killing of an abelian subalgebra is zero
        let swapped = SemidirectSplit {
            subalg_indices: vec![3, 4, 5],
            ideal_indices: vec![0, 1, 2],
            abelian_ideal: false,
        };
        match verify_semidirect(&alg, &swapped) {
            Err(AlgebraError::DegenerateKilling { rank, dim }) => {
                assert_eq!((rank, dim), (0, 3));
            }
            other => panic!("expected degenerate Killing, got {other:?}"),
        }
    }

    #[test]
    fn invariant_metrics() {
        let alg = iso21();
        let omega0 = omega0_iso21();
        assert_eq!(check_invariant_metric(&alg, &omega0).unwrap(), Ok(()));
        assert_eq!(omega0.rank(), 6);
        // the Killing form of any valid algebra is invariant
        for name in ["so3", "iso3", "iso21", "so21+so21"] {
            let a = builtin(name).unwrap();
            assert_eq!(
                check_invariant_metric(&a, &a.killing_form()).unwrap(),
                Ok(())
            );
        }
        // the identity matrix is not invariant for iso(2,1)
        let id = BilinearForm::new(
            (0..6)
                .map(|i| (0..6).map(|j| qi((i == j) as i64)).collect())
                .collect(),
        )
        .unwrap();
        assert!(check_invariant_metric(&alg, &id).unwrap().is_err());
    }

    #[test]
    fn deformation_family() {
        // lambda = 0, mu = 0: the Poincaré algebra with Omega^(0)
        let (alg, omega) = deform_iso21(&qi(0), &qi(0));
        assert!(alg.validate().is_valid());
        assert_eq!(alg.killing_form().rank(), 3);
        assert_eq!(omega, omega0_iso21());

        // Jacobi holds identically in lambda; Killing rank jumps to 6
        for l in [qi(1), qi(-1), qr(1, 2)] {
            let (alg, omega) = deform_iso21(&l, &qi(1));
            assert!(alg.validate().is_valid(), "lambda={}", fmt_q(&l));
            assert_eq!(alg.killing_form().rank(), 6);
            assert_eq!(check_invariant_metric(&alg, &omega).unwrap(), Ok(()));
        }

        // the three metric test points: invariant and nondegenerate
        for (l, m) in [(qi(1), qi(0)), (qi(1), qi(1)), (qr(1, 2), qi(2))] {
            let (alg, omega) = deform_iso21(&l, &m);
            assert_eq!(check_invariant_metric(&alg, &omega).unwrap(), Ok(()));
            assert!(omega.is_nondegenerate());
        }
    }

    #[test]
    fn json_roundtrip() {
        let alg = iso21();
        let json = alg.to_canonical_json();
        let back = LieAlgebraSpec::from_json(&json).unwrap();
        assert_eq!(alg, back);
        assert_eq!(json, back.to_canonical_json());
        // duplicate orientations rejected
        let bad = r#"{"name":"x","basis":["a","b"],"structure":[[0,1,0,"1"],[1,0,0,"-1"]]}"#;
        assert!(matches!(
            LieAlgebraSpec::from_json(bad),
            Err(AlgebraError::DuplicateBracket { .. })
        ));
    }
}
