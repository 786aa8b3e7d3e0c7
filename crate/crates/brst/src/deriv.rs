//! Graded derivations on the small algebra.
//!
//! A derivation is stored extensionally: its images on the generators,
//! together with a parity and a bidegree shift. Equality, commutators and
//! nilpotency then become finite checks, because derivations of equal
//! parity that agree on generators agree everywhere.
//!
//! The [`build`] catalog constructs every operator used downstream from
//! the algebra's structure constants:
//!
//! * `gamma` — the gauge differential: `gamma C = -1/2 [C,C]`,
//!   `gamma A = -DC`, `gamma F = [F,C]`, `gamma DC = 0`. On a ghosts-only
//!   table this is the Chevalley–Eilenberg differential.
//! * `d` — the exterior derivative written in the `(A, F, C, DC)`
//!   variables, where it acts algebraically.
//! * `lambda` — the lift operator `A d/dC - dA d/dDC`, with
//!   `d = [lambda, gamma]`.
//! * `tau` — the obstruction differential `F d/dC` (plus `G d/deta` in a
//!   split scheme); `tau = 1/2 [d, lambda]` and `tau^2 = 0`.
//! * `sigma` — `C d/dF` on the ideal sector; requires an abelian ideal,
//!   which is exactly what makes `{sigma, gamma} = 0` hold.
//! * `gamma_s0` / `gamma_s1` — the split of the Chevalley–Eilenberg
//!   differential by ideal-ghost count; `gamma_r1` is a synonym of
//!   `gamma_s1`.
//! * `rho_t_e(A)` / `rho_t_h(alpha)` — the subalgebra and ideal actions on
//!   the curvature module tensored with the ideal ghosts.
//! * `n_c`, `n_eta`, `n_cf` — counting operators.
//!
//! In a split scheme the covariant ghost derivative of an ideal ghost is
//! taken with the full connection, `DC = dC + [B,C] + [A,eta]`, i.e. the
//! split variables are the plain small-algebra variables relabeled along
//! the split. With that choice the whole operator family satisfies the
//! same identities verbatim in every scheme.

use crate::gca::{
    key_form_degree, key_ghost_number, Element, FactorKey, GcaError, GenId, GeneratorKind,
    GeneratorTable, Sector, VariableScheme,
};
use crate::liealg::SemidirectSplit;
use crate::rational::{qr, Q};
use num_traits::Zero;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum DerivError {
    #[error(transparent)]
    Gca(#[from] GcaError),
    #[error("operator {op:?} is not defined in scheme {scheme:?}")]
    IncompatibleScheme { op: String, scheme: VariableScheme },
    #[error("operator {op:?} requires an abelian ideal")]
    NonAbelianIdeal { op: String },
    #[error("image of {label} has bidegree {got:?}, expected {expected:?}")]
    BadImageDegree {
        label: String,
        got: (u32, u32),
        expected: (u32, u32),
    },
    #[error("nilpotency check requires an odd derivation")]
    EvenParity,
    #[error("basis index {index} is not in the {sector:?} sector of the split")]
    NotInSector { index: usize, sector: Sector },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

/// A graded derivation given by its images on generators.
#[derive(Clone)]
pub struct Derivation {
    pub name: String,
    pub parity: Parity,
    pub degree_shift: (i64, i64),
    images: Vec<Element>,
    table: Arc<GeneratorTable>,
}

impl Derivation {
    pub fn new(
        name: &str,
        parity: Parity,
        degree_shift: (i64, i64),
        images: Vec<Element>,
        table: Arc<GeneratorTable>,
    ) -> Result<Self, DerivError> {
        assert_eq!(images.len(), table.len(), "one image per generator");
        for (gen, img) in table.generators.iter().zip(&images) {
            if img.is_zero() {
                continue;
            }
            let expected = (
                (gen.form_degree as i64 + degree_shift.0) as u32,
                (gen.ghost_number as i64 + degree_shift.1) as u32,
            );
            match img.bidegree() {
                Some(got) if got == expected => {}
                got => {
                    return Err(DerivError::BadImageDegree {
                        label: gen.label.clone(),
                        got: got.unwrap_or((u32::MAX, u32::MAX)),
                        expected,
                    })
                }
            }
        }
        Ok(Derivation {
            name: name.to_string(),
            parity,
            degree_shift,
            images,
            table,
        })
    }

    pub fn zero(
        table: &Arc<GeneratorTable>,
        name: &str,
        parity: Parity,
        shift: (i64, i64),
    ) -> Self {
        let images = table
            .generators
            .iter()
            .map(|_| Element::zero(table))
            .collect();
        Derivation {
            name: name.to_string(),
            parity,
            degree_shift: shift,
            images,
            table: Arc::clone(table),
        }
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn image(&self, id: GenId) -> &Element {
        &self.images[id as usize]
    }

    /// Extends the generator images to the whole algebra by the graded
    /// Leibniz rule.
    pub fn apply(&self, x: &Element) -> Element {
        assert!(
            self.table.same_context(x.table()),
            "derivation and element from different generator tables"
        );
        let mut out = Element::zero(&self.table);
        for (key, coeff) in x.terms() {
            self.apply_key(key, coeff, &mut out);
        }
        out
    }

    fn apply_key(&self, key: &FactorKey, coeff: &Q, out: &mut Element) {
        let odd_op = self.parity == Parity::Odd;
        let mut prefix_odd = false;
        for (i, (id, mult)) in key.iter().enumerate() {
            let gen = &self.table.generators[*id as usize];
            let image = &self.images[*id as usize];
            if !image.is_zero() {
                // prefix * g^(mult-1) as one canonical monomial
                let mut left: FactorKey = key[..i].to_vec();
                if *mult > 1 {
                    left.push((*id, mult - 1));
                }
                let right: FactorKey = key[i + 1..].to_vec();
                let mut c = coeff * Q::from_integer((*mult).into());
                if odd_op && prefix_odd {
                    c = -c;
                }
                let left_e = {
                    let mut e = Element::zero(&self.table);
                    e.add_term(left, c);
                    e
                };
                let right_e = {
                    let mut e = Element::zero(&self.table);
                    e.add_term(right, Q::from_integer(1.into()));
                    e
                };
                let term = left_e.mul(image).mul(&right_e);
                *out = out.add(&term);
            }
            if gen.is_odd() && mult % 2 == 1 {
                prefix_odd = !prefix_odd;
            }
        }
    }

    /// `[D1, D2] = D1 D2 - (-1)^{p1 p2} D2 D1`, again a derivation.
    pub fn graded_commutator(&self, other: &Derivation) -> Derivation {
        assert!(self.table.same_context(&other.table));
        let anti = self.parity == Parity::Odd && other.parity == Parity::Odd;
        let images: Vec<Element> = self
            .table
            .generators
            .iter()
            .map(|g| {
                let a = self.apply(other.image(g.id));
                let b = other.apply(self.image(g.id));
                if anti {
                    a.add(&b)
                } else {
                    a.sub(&b)
                }
            })
            .collect();
        let parity = if self.parity == other.parity {
            Parity::Even
        } else {
            Parity::Odd
        };
        let shift = (
            self.degree_shift.0 + other.degree_shift.0,
            self.degree_shift.1 + other.degree_shift.1,
        );
        Derivation {
            name: format!("[{},{}]", self.name, other.name),
            parity,
            degree_shift: shift,
            images,
            table: Arc::clone(&self.table),
        }
    }

    pub fn scale(&self, c: &Q) -> Derivation {
        Derivation {
            name: self.name.clone(),
            parity: self.parity,
            degree_shift: self.degree_shift,
            images: self.images.iter().map(|e| e.scale(c)).collect(),
            table: Arc::clone(&self.table),
        }
    }

    /// True iff parity, shift and all generator images agree; derivations
    /// of equal parity agreeing on generators agree everywhere.
    pub fn equals(&self, other: &Derivation) -> bool {
        self.table.same_context(&other.table)
            && self.parity == other.parity
            && self.degree_shift == other.degree_shift
            && self.images == other.images
    }

    pub fn is_zero(&self) -> bool {
        self.images.iter().all(|e| e.is_zero())
    }

    /// For odd `D`: whether `1/2 {D, D} = D^2` vanishes; on failure
    /// returns the first generator witnessing `D^2 != 0`.
    pub fn nilpotency_check(&self) -> Result<Result<(), GenId>, DerivError> {
        if self.parity != Parity::Odd {
            return Err(DerivError::EvenParity);
        }
        for gen in &self.table.generators {
            if !self.apply(self.image(gen.id)).is_zero() {
                return Ok(Err(gen.id));
            }
        }
        Ok(Ok(()))
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(
            f,
            "{} (parity {:?}, shift ({}, {}))",
            self.name, self.parity, self.degree_shift.0, self.degree_shift.1
        )?;
        for gen in &self.table.generators {
            writeln!(f, "  {} -> {}", gen.label, self.image(gen.id))?;
        }
        Ok(())
    }
}

/// Names of the buildable operators.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum OperatorId {
    Gamma,
    /// Synonym for `Gamma`; the Chevalley–Eilenberg form on curvature
    /// and ghost variables.
    GammaS,
    D,
    Lambda,
    Tau,
    Sigma,
    GammaS0,
    GammaS1,
    /// Synonym for `GammaS1` in the abelian-ideal case.
    GammaR1,
    /// Subalgebra action on the curvature module and ideal ghosts;
    /// the argument is an algebra basis index inside the subalgebra.
    RhoTE(usize),
    /// Ideal action; the argument is a basis index inside the ideal.
    RhoTH(usize),
    NC,
    NEta,
    NCF,
}

impl OperatorId {
    pub fn parse(s: &str) -> Option<OperatorId> {
        match s {
            "gamma" => Some(OperatorId::Gamma),
            "gamma_s" => Some(OperatorId::GammaS),
            "d" => Some(OperatorId::D),
            "lambda" => Some(OperatorId::Lambda),
            "tau" => Some(OperatorId::Tau),
            "sigma" => Some(OperatorId::Sigma),
            "gamma_s0" => Some(OperatorId::GammaS0),
            "gamma_s1" => Some(OperatorId::GammaS1),
            "gamma_r1" => Some(OperatorId::GammaR1),
            "n_c" => Some(OperatorId::NC),
            "n_eta" => Some(OperatorId::NEta),
            "n_cf" => Some(OperatorId::NCF),
            _ => None,
        }
    }

    fn name(&self) -> String {
        match self {
            OperatorId::Gamma => "gamma".into(),
            OperatorId::GammaS => "gamma_s".into(),
            OperatorId::D => "d".into(),
            OperatorId::Lambda => "lambda".into(),
            OperatorId::Tau => "tau".into(),
            OperatorId::Sigma => "sigma".into(),
            OperatorId::GammaS0 => "gamma_s0".into(),
            OperatorId::GammaS1 => "gamma_s1".into(),
            OperatorId::GammaR1 => "gamma_r1".into(),
            OperatorId::RhoTE(a) => format!("rho_t_e{a}"),
            OperatorId::RhoTH(a) => format!("rho_t_h{a}"),
            OperatorId::NC => "n_c".into(),
            OperatorId::NEta => "n_eta".into(),
            OperatorId::NCF => "n_cf".into(),
        }
    }
}

/// `[X, Y]^c = sum_{a,b} f^c_{ab} X^a Y^b` over the generator families of
/// kinds `kx`, `ky`; absent family members contribute nothing. Optional
/// sector filters restrict the summation indices.
fn bracket(
    table: &Arc<GeneratorTable>,
    kx: GeneratorKind,
    sx: Option<Sector>,
    ky: GeneratorKind,
    sy: Option<Sector>,
    c: usize,
) -> Element {
    let alg = &table.algebra;
    let dim = alg.dim();
    let mut out = Element::zero(table);
    for a in 0..dim {
        if sx.is_some() && table.sector_of_index(a) != sx {
            continue;
        }
        let Some(xa) = table.of_kind(kx, a) else {
            continue;
        };
        for b in 0..dim {
            if sy.is_some() && table.sector_of_index(b) != sy {
                continue;
            }
            let Some(yb) = table.of_kind(ky, b) else {
                continue;
            };
            let f = alg.f(c, a, b);
            if f.is_zero() {
                continue;
            }
            let term = Element::from_factors(table, &[xa, yb], f).expect("valid ids");
            out = out.add(&term);
        }
    }
    out
}

fn gen_elem(table: &Arc<GeneratorTable>, kind: GeneratorKind, adjoint: usize) -> Element {
    match table.of_kind(kind, adjoint) {
        Some(id) => Element::generator(table, id).expect("valid id"),
        None => Element::zero(table),
    }
}

fn require_split<'t>(
    table: &'t GeneratorTable,
    op: &OperatorId,
) -> Result<&'t SemidirectSplit, DerivError> {
    table
        .split
        .as_ref()
        .ok_or_else(|| DerivError::IncompatibleScheme {
            op: op.name(),
            scheme: table.scheme,
        })
}

/// Constructs a named operator on `table`. Operators that only exist in a
/// split scheme (`sigma`, the `gamma_s` split, the module actions, the
/// counting operators) refuse unsplit tables, and `sigma` additionally
/// refuses a non-abelian ideal.
pub fn build(op: &OperatorId, table: &Arc<GeneratorTable>) -> Result<Derivation, DerivError> {
    use GeneratorKind::*;
    let scheme = table.scheme;
    let half = qr(1, 2);
    let incompatible = || DerivError::IncompatibleScheme {
        op: op.name(),
        scheme,
    };
    let image_of = |f: &dyn Fn(&crate::gca::Generator) -> Element| -> Vec<Element> {
        table.generators.iter().map(f).collect()
    };
    let deriv = |name: String, parity, shift, images| {
        Derivation::new(&name, parity, shift, images, Arc::clone(table))
    };
    match op {
        OperatorId::Gamma | OperatorId::GammaS => {
            let has_cgd = table
                .generators
                .iter()
                .any(|g| g.kind == CovariantGhostDerivative);
            let images = image_of(&|g| match g.kind {
                Ghost => {
                    bracket(table, Ghost, None, Ghost, None, g.adjoint_index).scale(&-half.clone())
                }
                Connection => {
                    if has_cgd {
                        gen_elem(table, CovariantGhostDerivative, g.adjoint_index).neg()
                    } else {
                        Element::zero(table)
                    }
                }
                Curvature => bracket(table, Curvature, None, Ghost, None, g.adjoint_index),
                CovariantGhostDerivative => Element::zero(table),
            });
            deriv(op.name(), Parity::Odd, (0, 1), images)
        }
        OperatorId::D => {
            if !matches!(
                scheme,
                VariableScheme::SmallFull | VariableScheme::SplitFull
            ) {
                return Err(incompatible());
            }
            let images = image_of(&|g| {
                let a = g.adjoint_index;
                match g.kind {
                    Connection => gen_elem(table, Curvature, a)
                        .sub(&bracket(table, Connection, None, Connection, None, a).scale(&half)),
                    Curvature => bracket(table, Connection, None, Curvature, None, a).neg(),
                    Ghost => gen_elem(table, CovariantGhostDerivative, a)
                        .sub(&bracket(table, Connection, None, Ghost, None, a)),
                    CovariantGhostDerivative => bracket(table, Curvature, None, Ghost, None, a)
                        .sub(&bracket(
                            table,
                            Connection,
                            None,
                            CovariantGhostDerivative,
                            None,
                            a,
                        )),
                }
            });
            deriv(op.name(), Parity::Odd, (1, 0), images)
        }
        OperatorId::Lambda => {
            if !matches!(
                scheme,
                VariableScheme::SmallFull | VariableScheme::SplitFull
            ) {
                return Err(incompatible());
            }
            let images = image_of(&|g| {
                let a = g.adjoint_index;
                match g.kind {
                    Ghost => gen_elem(table, Connection, a),
                    CovariantGhostDerivative => gen_elem(table, Curvature, a)
                        .sub(&bracket(table, Connection, None, Connection, None, a).scale(&half))
                        .neg(),
                    _ => Element::zero(table),
                }
            });
            deriv(op.name(), Parity::Even, (1, -1), images)
        }
        OperatorId::Tau => {
            if scheme == VariableScheme::CeGhost {
                return Err(incompatible());
            }
            let images = image_of(&|g| match g.kind {
                Ghost => gen_elem(table, Curvature, g.adjoint_index),
                _ => Element::zero(table),
            });
            deriv(op.name(), Parity::Odd, (2, -1), images)
        }
        OperatorId::Sigma => {
            let split = require_split(table, op)?;
            if !split.abelian_ideal {
                return Err(DerivError::NonAbelianIdeal { op: op.name() });
            }
            let images = image_of(&|g| {
                if g.kind == Curvature && g.sector == Some(Sector::Ideal) {
                    gen_elem(table, Ghost, g.adjoint_index)
                } else {
                    Element::zero(table)
                }
            });
            deriv(op.name(), Parity::Odd, (-2, 1), images)
        }
        OperatorId::GammaS0 => {
            if scheme != VariableScheme::SplitFc {
                return Err(incompatible());
            }
            let k = Some(Sector::Subalgebra);
            let images = image_of(&|g| {
                let a = g.adjoint_index;
                match (g.kind, g.sector) {
                    (Ghost, Some(Sector::Subalgebra)) => {
                        bracket(table, Ghost, k, Ghost, k, a).scale(&-half.clone())
                    }
                    (Ghost, Some(Sector::Ideal)) => {
                        bracket(table, Ghost, k, Ghost, Some(Sector::Ideal), a).neg()
                    }
                    (Curvature, _) => {
                        bracket(table, Curvature, Some(g.sector.unwrap()), Ghost, k, a)
                    }
                    _ => Element::zero(table),
                }
            });
            deriv(op.name(), Parity::Odd, (0, 1), images)
        }
        OperatorId::GammaS1 | OperatorId::GammaR1 => {
            if scheme != VariableScheme::SplitFc {
                return Err(incompatible());
            }
            let j = Some(Sector::Ideal);
            let images = image_of(&|g| {
                let a = g.adjoint_index;
                match (g.kind, g.sector) {
                    (Ghost, Some(Sector::Ideal)) => {
                        bracket(table, Ghost, j, Ghost, j, a).scale(&-half.clone())
                    }
                    (Curvature, Some(Sector::Ideal)) => {
                        bracket(table, Curvature, Some(Sector::Subalgebra), Ghost, j, a)
                            .add(&bracket(table, Curvature, j, Ghost, j, a))
                    }
                    _ => Element::zero(table),
                }
            });
            deriv(op.name(), Parity::Odd, (0, 1), images)
        }
        OperatorId::RhoTE(idx) | OperatorId::RhoTH(idx) => {
            if scheme != VariableScheme::SplitFc {
                return Err(incompatible());
            }
            let split = require_split(table, op)?;
            let (want, sector) = match op {
                OperatorId::RhoTE(_) => (&split.subalg_indices, Sector::Subalgebra),
                _ => (&split.ideal_indices, Sector::Ideal),
            };
            if !want.contains(idx) {
                return Err(DerivError::NotInSector {
                    index: *idx,
                    sector,
                });
            }
            let alg = &table.algebra;
            let dim = alg.dim();
            let images = image_of(&|g| {
                // rho(x) X^c = -f^c_{x b} X^b; the curvature module pairs
                // against the whole algebra, the ideal ghosts only against
                // the ideal.
                let act = |kind: GeneratorKind, out_sector: Option<Sector>| {
                    let mut out = Element::zero(table);
                    for b in 0..dim {
                        if out_sector.is_some() && table.sector_of_index(b) != out_sector {
                            continue;
                        }
                        let f = alg.f(g.adjoint_index, *idx, b);
                        if f.is_zero() {
                            continue;
                        }
                        if let Some(xb) = table.of_kind(kind, b) {
                            out = out
                                .add(&Element::generator(table, xb).expect("valid id").scale(&-f));
                        }
                    }
                    out
                };
                match (g.kind, g.sector) {
                    (Curvature, _) => act(Curvature, None),
                    (Ghost, Some(Sector::Ideal)) => act(Ghost, Some(Sector::Ideal)),
                    _ => Element::zero(table),
                }
            });
            deriv(op.name(), Parity::Even, (0, 0), images)
        }
        OperatorId::NC | OperatorId::NEta | OperatorId::NCF => {
            require_split(table, op)?;
            let images = image_of(&|g| {
                let counted = match op {
                    OperatorId::NC => g.kind == Ghost && g.sector == Some(Sector::Ideal),
                    OperatorId::NEta => g.kind == Ghost && g.sector == Some(Sector::Subalgebra),
                    _ => {
                        (g.kind == Ghost || g.kind == Curvature) && g.sector == Some(Sector::Ideal)
                    }
                };
                if counted {
                    Element::generator(table, g.id).expect("valid id")
                } else {
                    Element::zero(table)
                }
            });
            deriv(op.name(), Parity::Even, (0, 0), images)
        }
    }
}

/// The family `rho_t_e(A)` for every subalgebra basis element.
pub fn subalgebra_actions(table: &Arc<GeneratorTable>) -> Result<Vec<Derivation>, DerivError> {
    let split = table.split.as_ref().ok_or(DerivError::IncompatibleScheme {
        op: "rho_t_e".into(),
        scheme: table.scheme,
    })?;
    split
        .subalg_indices
        .clone()
        .iter()
        .map(|&a| build(&OperatorId::RhoTE(a), table))
        .collect()
}

/// Bidegree of an element required to agree with `(form, ghost)`; used by
/// callers validating operator inputs.
pub fn key_bidegree(table: &GeneratorTable, key: &FactorKey) -> (u32, u32) {
    (key_form_degree(table, key), key_ghost_number(table, key))
}
