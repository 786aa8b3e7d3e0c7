//! Exact cohomology on finite graded slices.
//!
//! A derivation restricted to a slice becomes a sparse rational matrix;
//! kernels, images and quotients are then finite computations. All bases
//! are deterministic: slice monomials are enumerated in lexicographic
//! order, pivots are chosen first-nonzero-in-order, and representatives
//! are canonically scaled. Identical inputs give bit-identical output
//! regardless of thread count, because nothing here depends on timing.

use crate::deriv::Derivation;
use crate::gca::{
    basis_slice, Element, FactorKey, GcaError, GeneratorTable, Monomial, SliceConstraints,
};
use crate::linalg::{canonical_scale, Echelon, QMat, QVec};
use crate::rational::Q;
use std::collections::BTreeMap;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CohomError {
    #[error(transparent)]
    Gca(#[from] GcaError),
    #[error("image of {monomial} under {derivation} leaves the declared codomain slice")]
    ShiftLeavesBounds {
        derivation: String,
        monomial: String,
    },
    #[error("{derivation} is not nilpotent on the slice: fails on {witness}")]
    NotNilpotent { derivation: String, witness: String },
    #[error("element is not a cocycle of {derivation}: D x = {residual}")]
    NotCocycle {
        derivation: String,
        residual: String,
    },
    #[error("element has a monomial outside the slice: {monomial}")]
    OutsideSlice { monomial: String },
    #[error("slice shift underflows a degree constraint")]
    BadShift,
}

/// An ordered slice basis with a monomial-to-index lookup.
pub struct SliceIndex {
    table: Arc<GeneratorTable>,
    monomials: Vec<Monomial>,
    lookup: BTreeMap<FactorKey, usize>,
}

impl SliceIndex {
    pub fn new(
        table: &Arc<GeneratorTable>,
        constraints: &SliceConstraints,
    ) -> Result<Self, CohomError> {
        let monomials = basis_slice(table, constraints)?;
        let lookup = monomials
            .iter()
            .enumerate()
            .map(|(i, m)| (m.factors.clone(), i))
            .collect();
        Ok(SliceIndex {
            table: Arc::clone(table),
            monomials,
            lookup,
        })
    }

    pub fn len(&self) -> usize {
        self.monomials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.monomials.is_empty()
    }

    pub fn monomials(&self) -> &[Monomial] {
        &self.monomials
    }

    /// Coordinates of an element in this basis; errors when a monomial of
    /// the element is not part of the slice.
    pub fn coords(&self, x: &Element) -> Result<QVec, CohomError> {
        let mut out: Vec<(usize, Q)> = Vec::with_capacity(x.num_terms());
        for (key, coeff) in x.terms() {
            match self.lookup.get(key) {
                Some(&i) => out.push((i, coeff.clone())),
                None => {
                    let shown = Element::from_monomial(
                        &self.table,
                        &Monomial {
                            coefficient: coeff.clone(),
                            factors: key.clone(),
                        },
                    );
                    return Err(CohomError::OutsideSlice {
                        monomial: shown.to_string(),
                    });
                }
            }
        }
        out.sort_by_key(|(i, _)| *i);
        Ok(out)
    }

    pub fn element(&self, coords: &QVec) -> Element {
        let mut e = Element::zero(&self.table);
        for (i, c) in coords {
            e.add_term(self.monomials[*i].factors.clone(), c.clone());
        }
        e
    }
}

/// A derivation restricted to one slice, as a matrix: column `j` holds the
/// codomain coordinates of the image of the `j`-th domain monomial.
pub struct SliceComplex {
    pub derivation_name: String,
    pub domain: SliceIndex,
    pub codomain: SliceIndex,
    pub matrix: QMat,
}

impl SliceComplex {
    pub fn rank(&self) -> usize {
        self.matrix.rank()
    }

    pub fn nullity(&self) -> usize {
        self.domain.len() - self.rank()
    }
}

/// Builds the matrix of `d` from an explicit domain/codomain slice pair.
pub fn matrix_of(
    d: &Derivation,
    domain: &SliceConstraints,
    codomain: &SliceConstraints,
) -> Result<SliceComplex, CohomError> {
    let table = d.table();
    let domain = SliceIndex::new(table, domain)?;
    let codomain = SliceIndex::new(table, codomain)?;
    let matrix = matrix_between(d, &domain, &codomain)?;
    Ok(SliceComplex {
        derivation_name: d.name.clone(),
        domain,
        codomain,
        matrix,
    })
}

/// As [`matrix_of`], deriving the codomain by shifting the form degree and
/// ghost number by the derivation's degree shift. Count constraints are
/// carried over unchanged, which is correct for the degree-preserving
/// operators this is used with; anything fancier should pass an explicit
/// codomain.
pub fn matrix_of_auto(
    d: &Derivation,
    domain: &SliceConstraints,
) -> Result<SliceComplex, CohomError> {
    let codomain = domain
        .shifted(d.degree_shift.0, d.degree_shift.1)
        .ok_or(CohomError::BadShift)?;
    matrix_of(d, domain, &codomain)
}

fn matrix_between(
    d: &Derivation,
    domain: &SliceIndex,
    codomain: &SliceIndex,
) -> Result<QMat, CohomError> {
    let table = d.table();
    let mut cols: Vec<QVec> = Vec::with_capacity(domain.len());
    for m in domain.monomials() {
        let image = d.apply(&Element::from_monomial(table, m));
        let col = codomain.coords(&image).map_err(|e| match e {
            CohomError::OutsideSlice { monomial } => CohomError::ShiftLeavesBounds {
                derivation: d.name.clone(),
                monomial,
            },
            other => other,
        })?;
        cols.push(col);
    }
    Ok(QMat::from_cols(codomain.len(), cols))
}

/// A computed cohomology slice: representatives of `ker / im`, one
/// coboundary witness per image basis vector, and enough machinery to
/// project further cocycles onto the representative basis.
pub struct CohomologyBasis {
    pub dimension: usize,
    pub representatives: Vec<Element>,
    /// `(boundary, preimage)` pairs with `D(preimage) = boundary`,
    /// spanning the image of the previous slice.
    pub coboundary_witnesses: Vec<(Element, Element)>,
    pub grading: Vec<(String, i64)>,
    index: SliceIndex,
    image_echelon: Echelon,
    rep_echelon: Echelon,
    rep_coords: Vec<QVec>,
}

impl CohomologyBasis {
    /// Class coordinates of a cocycle over the representative basis.
    /// Errors when the element does not lie in the kernel span.
    pub fn class_coordinates(&self, x: &Element) -> Result<QVec, CohomError> {
        let coords = self.index.coords(x)?;
        let (residue, _) = self.image_echelon.reduce(&coords);
        if residue.is_empty() {
            return Ok(Vec::new());
        }
        self.rep_echelon
            .express(&residue)
            .ok_or_else(|| CohomError::NotCocycle {
                derivation: "class projection".into(),
                residual: self.index.element(&residue).to_string(),
            })
    }

    /// Whether two cocycles are cohomologous.
    pub fn same_class(&self, x: &Element, y: &Element) -> Result<bool, CohomError> {
        Ok(self.class_coordinates(x)? == self.class_coordinates(y)?)
    }

    /// Whether a cocycle is a coboundary.
    pub fn is_trivial_class(&self, x: &Element) -> Result<bool, CohomError> {
        Ok(self.class_coordinates(x)?.is_empty())
    }

    pub fn basis_coords(&self) -> &[QVec] {
        &self.rep_coords
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dim": self.dimension,
            "representatives": self.representatives.iter().map(|r| r.to_string()).collect::<Vec<_>>(),
            "grading": self.grading.iter().cloned().collect::<BTreeMap<String, i64>>(),
        })
    }
}

fn grading_of(c: &SliceConstraints) -> Vec<(String, i64)> {
    let mut g = Vec::new();
    let mut push = |name: &str, v: Option<u32>| {
        if let Some(v) = v {
            g.push((name.to_string(), v as i64));
        }
    };
    push("form_degree", c.form_degree);
    push("ghost_number", c.ghost_number);
    push("curvature_degree", c.curvature_count);
    push("gh_c", c.c_ghost_count);
    push("gh_eta", c.eta_count);
    g
}

/// Kernel-mod-image on the middle slice of `previous -> current -> next`.
///
/// `previous` may be `None` for a bottom slice (no incoming boundaries).
/// Nilpotency of `d` across the slices is checked exactly; the quotient
/// basis completes the image echelon inside the kernel, in kernel order.
pub fn cohomology(
    d: &Derivation,
    previous: Option<&SliceConstraints>,
    current: &SliceConstraints,
    next: &SliceConstraints,
) -> Result<CohomologyBasis, CohomError> {
    let table = d.table();
    let current_index = SliceIndex::new(table, current)?;
    // nilpotency on the slice
    for m in current_index.monomials() {
        let once = d.apply(&Element::from_monomial(table, m));
        let twice = d.apply(&once);
        if !twice.is_zero() {
            return Err(CohomError::NotNilpotent {
                derivation: d.name.clone(),
                witness: Element::from_monomial(table, m).to_string(),
            });
        }
    }
    let next_index = SliceIndex::new(table, next)?;
    let out_matrix = matrix_between(d, &current_index, &next_index)?;
    let kernel = out_matrix.kernel_basis();

    let mut image_echelon = Echelon::new();
    let mut coboundary_witnesses = Vec::new();
    if let Some(prev) = previous {
        let prev_index = SliceIndex::new(table, prev)?;
        let in_matrix = matrix_between(d, &prev_index, &current_index)?;
        for (j, m) in prev_index.monomials().iter().enumerate() {
            let col = in_matrix.col(j).clone();
            if image_echelon.insert(&col) {
                coboundary_witnesses.push((
                    current_index.element(&col),
                    Element::from_monomial(table, m),
                ));
            }
        }
    }
    let image_rank = image_echelon.rank();

    let mut rep_echelon = Echelon::with_witnesses();
    let mut rep_coords = Vec::new();
    let mut representatives = Vec::new();
    for v in &kernel {
        // complete the image span inside the kernel
        let (residue, _) = image_echelon.reduce(v);
        if residue.is_empty() {
            continue;
        }
        if rep_echelon.insert(&residue) {
            let rep = canonical_scale(residue);
            representatives.push(current_index.element(&rep));
            rep_coords.push(rep);
        }
    }
    // rebuild the representative echelon on the canonical vectors so that
    // class coordinates refer to the printed representatives
    let mut rep_echelon = Echelon::with_witnesses();
    for r in &rep_coords {
        rep_echelon.insert(r);
    }
    let dimension = kernel.len() - image_rank;
    debug_assert_eq!(dimension, representatives.len());
    Ok(CohomologyBasis {
        dimension,
        representatives,
        coboundary_witnesses,
        grading: grading_of(current),
        index: current_index,
        image_echelon,
        rep_echelon,
        rep_coords,
    })
}

/// Witness for `x` being in the image of `d` restricted to the source
/// slice: `Some(w)` with `d(w) = x`, or `None` with the non-membership
/// certified by the rank of the forward elimination.
pub fn is_coboundary(
    d: &Derivation,
    x: &Element,
    source: &SliceConstraints,
) -> Result<Option<Element>, CohomError> {
    let table = d.table();
    let dx = d.apply(x);
    if !dx.is_zero() {
        return Err(CohomError::NotCocycle {
            derivation: d.name.clone(),
            residual: dx.to_string(),
        });
    }
    if x.is_zero() {
        return Ok(Some(Element::zero(table)));
    }
    let source_index = SliceIndex::new(table, source)?;
    // target basis: all image monomials plus the monomials of x
    let mut keys: BTreeMap<FactorKey, usize> = BTreeMap::new();
    let mut images = Vec::with_capacity(source_index.len());
    for m in source_index.monomials() {
        let image = d.apply(&Element::from_monomial(table, m));
        for (key, _) in image.terms() {
            let next = keys.len();
            keys.entry(key.clone()).or_insert(next);
        }
        images.push(image);
    }
    for (key, _) in x.terms() {
        let next = keys.len();
        keys.entry(key.clone()).or_insert(next);
    }
    let nrows = keys.len();
    let cols: Vec<QVec> = images
        .iter()
        .map(|img| {
            let mut col: QVec = img.terms().map(|(k, c)| (keys[k], c.clone())).collect();
            col.sort_by_key(|(i, _)| *i);
            col
        })
        .collect();
    let matrix = QMat::from_cols(nrows, cols);
    let mut rhs: QVec = x.terms().map(|(k, c)| (keys[k], c.clone())).collect();
    rhs.sort_by_key(|(i, _)| *i);
    match matrix.solve(&rhs) {
        None => Ok(None),
        Some(w) => {
            let witness = source_index.element(&w);
            debug_assert_eq!(&d.apply(&witness), x);
            Ok(Some(witness))
        }
    }
}

/// Witness for `x` lying in the image of `d` restricted to the span of
/// explicit `sources` (not a whole slice): returns `w` in that span with
/// `d(w) = x`, or `None`. A found witness is exact and verified; absence
/// only certifies non-membership over the given span.
pub fn image_witness_in_span(
    d: &Derivation,
    x: &Element,
    sources: &[Element],
) -> Result<Option<Element>, CohomError> {
    let table = d.table();
    if x.is_zero() {
        return Ok(Some(Element::zero(table)));
    }
    let mut keys: BTreeMap<FactorKey, usize> = BTreeMap::new();
    let mut images = Vec::with_capacity(sources.len());
    for s in sources {
        let image = d.apply(s);
        for (key, _) in image.terms() {
            let next = keys.len();
            keys.entry(key.clone()).or_insert(next);
        }
        images.push(image);
    }
    for (key, _) in x.terms() {
        let next = keys.len();
        keys.entry(key.clone()).or_insert(next);
    }
    let cols: Vec<QVec> = images
        .iter()
        .map(|img| {
            let mut col: QVec = img.terms().map(|(k, c)| (keys[k], c.clone())).collect();
            col.sort_by_key(|(i, _)| *i);
            col
        })
        .collect();
    let matrix = QMat::from_cols(keys.len(), cols);
    let mut rhs: QVec = x.terms().map(|(k, c)| (keys[k], c.clone())).collect();
    rhs.sort_by_key(|(i, _)| *i);
    match matrix.solve(&rhs) {
        None => Ok(None),
        Some(sol) => {
            let mut w = Element::zero(table);
            for (j, c) in sol {
                w = w.add(&sources[j].scale(&c));
            }
            debug_assert_eq!(&d.apply(&w), x);
            Ok(Some(w))
        }
    }
}

/// Basis of the joint kernel of `ops` on the slice; with no operators the
/// whole slice is returned.
pub fn invariant_subspace(
    ops: &[Derivation],
    table: &Arc<GeneratorTable>,
    slice: &SliceConstraints,
) -> Result<Vec<Element>, CohomError> {
    let index = SliceIndex::new(table, slice)?;
    if ops.is_empty() {
        return Ok(index
            .monomials()
            .iter()
            .map(|m| Element::from_monomial(table, m))
            .collect());
    }
    // stack the matrices of all operators; codomain rows are the union of
    // image monomials, per operator
    let mut rows_so_far = 0usize;
    let mut stacked_cols: Vec<QVec> = vec![Vec::new(); index.len()];
    for op in ops {
        let mut keys: BTreeMap<FactorKey, usize> = BTreeMap::new();
        let mut images = Vec::with_capacity(index.len());
        for m in index.monomials() {
            let image = op.apply(&Element::from_monomial(table, m));
            for (key, _) in image.terms() {
                let next = keys.len();
                keys.entry(key.clone()).or_insert(next);
            }
            images.push(image);
        }
        for (j, img) in images.iter().enumerate() {
            for (key, c) in img.terms() {
                stacked_cols[j].push((rows_so_far + keys[key], c.clone()));
            }
        }
        rows_so_far += keys.len();
    }
    for col in &mut stacked_cols {
        col.sort_by_key(|(i, _)| *i);
    }
    let matrix = QMat::from_cols(rows_so_far, stacked_cols);
    let kernel = matrix.kernel_basis();
    Ok(kernel.iter().map(|v| index.element(v)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deriv::{build, OperatorId};
    use crate::gca::{GeneratorTable, VariableScheme};
    use crate::liealg;

    fn so3_ce() -> Arc<GeneratorTable> {
        GeneratorTable::new(liealg::so3(), VariableScheme::CeGhost, None).unwrap()
    }

    #[test]
    fn ce_matrix_rank() {
        // ghost 1 -> 2 for so(3): the three images are independent
        let t = so3_ce();
        let gamma = build(&OperatorId::Gamma, &t).unwrap();
        let sc = matrix_of_auto(&gamma, &SliceConstraints::ghost(1)).unwrap();
        assert_eq!((sc.domain.len(), sc.codomain.len()), (3, 3));
        assert_eq!(sc.rank(), 3);
        assert_eq!(sc.rank() + sc.nullity(), sc.domain.len());
        // zero derivation gives the zero matrix
        let zero = crate::deriv::Derivation::zero(&t, "z", crate::deriv::Parity::Odd, (0, 1));
        let sc = matrix_of_auto(&zero, &SliceConstraints::ghost(1)).unwrap();
        assert!(sc.matrix.is_zero());
    }

    #[test]
    fn so3_ghost_cohomology() {
        let t = so3_ce();
        let gamma = build(&OperatorId::Gamma, &t).unwrap();
        // ghost 3: dimension 1, representative eta1 eta2 eta3
        let h3 = cohomology(
            &gamma,
            Some(&SliceConstraints::ghost(2)),
            &SliceConstraints::ghost(3),
            &SliceConstraints::ghost(4),
        )
        .unwrap();
        assert_eq!(h3.dimension, 1);
        // representatives are exact cocycles, witnesses exact preimages
        for r in &h3.representatives {
            assert!(gamma.apply(r).is_zero());
        }
        for (boundary, preimage) in &h3.coboundary_witnesses {
            assert_eq!(&gamma.apply(preimage), boundary);
        }
        assert_eq!(
            h3.representatives[0],
            Element::parse(&t, "eta1 eta2 eta3").unwrap()
        );
        // ghost 1 and 2 vanish
        for g in [1u32, 2] {
            let h = cohomology(
                &gamma,
                Some(&SliceConstraints::ghost(g - 1)),
                &SliceConstraints::ghost(g),
                &SliceConstraints::ghost(g + 1),
            )
            .unwrap();
            assert_eq!(h.dimension, 0, "ghost {g}");
        }
        // empty slice -> dimension 0
        let h7 = cohomology(
            &gamma,
            Some(&SliceConstraints::ghost(6)),
            &SliceConstraints::ghost(7),
            &SliceConstraints::ghost(8),
        )
        .unwrap();
        assert_eq!(h7.dimension, 0);
    }

    #[test]
    fn coboundary_witness_roundtrip() {
        let t = so3_ce();
        let gamma = build(&OperatorId::Gamma, &t).unwrap();
        // gamma(eta1) = -eta2 eta3 is a coboundary with witness
        let x = Element::parse(&t, "-1 * eta2 eta3").unwrap();
        let w = is_coboundary(&gamma, &x, &SliceConstraints::ghost(1))
            .unwrap()
            .unwrap();
        assert_eq!(gamma.apply(&w), x);
        // the top class is not a coboundary
        let theta = Element::parse(&t, "eta1 eta2 eta3").unwrap();
        assert!(is_coboundary(&gamma, &theta, &SliceConstraints::ghost(2))
            .unwrap()
            .is_none());
        // zero has the zero witness
        let z = Element::zero(&t);
        assert!(is_coboundary(&gamma, &z, &SliceConstraints::ghost(2))
            .unwrap()
            .is_some());
    }

    #[test]
    fn invariants_of_iso3() {
        // the quadratic invariants of the curvature module: f1, f2, f3
        let t = GeneratorTable::new(
            liealg::iso3(),
            VariableScheme::SplitFc,
            liealg::builtin_split("iso3"),
        )
        .unwrap();
        let rhos = crate::deriv::subalgebra_actions(&t).unwrap();
        let slice = SliceConstraints {
            eta_count: Some(0),
            c_ghost_count: Some(0),
            curvature_count: Some(2),
            ..Default::default()
        };
        let inv = invariant_subspace(&rhos, &t, &slice).unwrap();
        assert_eq!(inv.len(), 3);
        // empty operator list returns the whole slice
        let all = invariant_subspace(&[], &t, &slice).unwrap();
        assert_eq!(all.len(), 21);
    }

    #[test]
    fn class_projection() {
        let t = so3_ce();
        let gamma = build(&OperatorId::Gamma, &t).unwrap();
        let h3 = cohomology(
            &gamma,
            Some(&SliceConstraints::ghost(2)),
            &SliceConstraints::ghost(3),
            &SliceConstraints::ghost(4),
        )
        .unwrap();
        let theta = Element::parse(&t, "2 * eta1 eta2 eta3").unwrap();
        let coords = h3.class_coordinates(&theta).unwrap();
        assert_eq!(coords.len(), 1);
        assert!(h3.same_class(&theta, &theta).unwrap());
    }
}
