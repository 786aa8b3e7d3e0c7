//! The free graded-commutative algebra on a typed generator set.
//!
//! Generators carry a form degree and a ghost number; total parity
//! `(form + ghost) mod 2` drives the Koszul sign rule. Odd generators
//! square to zero, even ones commute with everything. Monomials are kept
//! in a canonical order (ghosts, then connections, then curvatures, then
//! covariant ghost derivatives, subalgebra sector first), so equality of
//! elements is literal equality of sorted term maps.

use crate::liealg::{LieAlgebraSpec, SemidirectSplit};
use crate::rational::{fmt_q, parse_q, Q};
use num_traits::{One, Signed, Zero};
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use thiserror::Error;

pub type GenId = u32;

#[derive(Debug, Error)]
pub enum GcaError {
    #[error("unknown generator id {0}")]
    UnknownGenerator(GenId),
    #[error("unknown generator label {0:?}")]
    UnknownLabel(String),
    #[error("element parse error: {0}")]
    Parse(String),
    #[error("slice is unbounded: no constraint limits the multiplicity of {label}")]
    UnboundedSlice { label: String },
    #[error("scheme {scheme:?} requires a semidirect split")]
    SplitRequired { scheme: VariableScheme },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum GeneratorKind {
    Ghost,
    Connection,
    Curvature,
    CovariantGhostDerivative,
}

impl GeneratorKind {
    pub fn degrees(self) -> (u32, u32) {
        match self {
            GeneratorKind::Ghost => (0, 1),
            GeneratorKind::Connection => (1, 0),
            GeneratorKind::Curvature => (2, 0),
            GeneratorKind::CovariantGhostDerivative => (1, 1),
        }
    }

    pub const ALL: [GeneratorKind; 4] = [
        GeneratorKind::Ghost,
        GeneratorKind::Connection,
        GeneratorKind::Curvature,
        GeneratorKind::CovariantGhostDerivative,
    ];

    fn index(self) -> usize {
        match self {
            GeneratorKind::Ghost => 0,
            GeneratorKind::Connection => 1,
            GeneratorKind::Curvature => 2,
            GeneratorKind::CovariantGhostDerivative => 3,
        }
    }
}

/// Which side of a semidirect split a generator belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Sector {
    Subalgebra,
    Ideal,
}

#[derive(Clone, Debug)]
pub struct Generator {
    pub id: GenId,
    pub label: String,
    pub kind: GeneratorKind,
    /// Index into the algebra basis this generator is dual to.
    pub adjoint_index: usize,
    pub sector: Option<Sector>,
    pub form_degree: u32,
    pub ghost_number: u32,
}

impl Generator {
    pub fn is_odd(&self) -> bool {
        (self.form_degree + self.ghost_number) % 2 == 1
    }
}

/// Which set of field variables a table instantiates.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariableScheme {
    /// Ghosts only: the Chevalley–Eilenberg complex with trivial
    /// coefficients.
    CeGhost,
    /// Curvatures and ghosts: the quotient where gauge cohomology lives.
    SmallFc,
    /// Connections, curvatures, ghosts and covariant ghost derivatives:
    /// the full small algebra.
    SmallFull,
    /// As `SmallFc`, with generators relabeled along a semidirect split.
    SplitFc,
    /// As `SmallFull`, relabeled along a semidirect split.
    SplitFull,
}

impl VariableScheme {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "ce_ghost" => Some(VariableScheme::CeGhost),
            "small_fc" => Some(VariableScheme::SmallFc),
            "small_full" => Some(VariableScheme::SmallFull),
            "split_fc" => Some(VariableScheme::SplitFc),
            "split_full" => Some(VariableScheme::SplitFull),
            _ => None,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            VariableScheme::CeGhost => "ce_ghost",
            VariableScheme::SmallFc => "small_fc",
            VariableScheme::SmallFull => "small_full",
            VariableScheme::SplitFc => "split_fc",
            VariableScheme::SplitFull => "split_full",
        }
    }

    fn kinds(self) -> &'static [GeneratorKind] {
        match self {
            VariableScheme::CeGhost => &[GeneratorKind::Ghost],
            VariableScheme::SmallFc | VariableScheme::SplitFc => {
                &[GeneratorKind::Ghost, GeneratorKind::Curvature]
            }
            VariableScheme::SmallFull | VariableScheme::SplitFull => &[
                GeneratorKind::Ghost,
                GeneratorKind::Connection,
                GeneratorKind::Curvature,
                GeneratorKind::CovariantGhostDerivative,
            ],
        }
    }

    pub fn is_split(self) -> bool {
        matches!(self, VariableScheme::SplitFc | VariableScheme::SplitFull)
    }
}

/// The generator universe an [`Element`] lives in.
#[derive(Debug)]
pub struct GeneratorTable {
    pub algebra: LieAlgebraSpec,
    pub scheme: VariableScheme,
    pub split: Option<SemidirectSplit>,
    pub generators: Vec<Generator>,
    by_label: BTreeMap<String, GenId>,
    /// `(kind, algebra index) -> generator`, the lookup used when building
    /// bracket expressions.
    family: BTreeMap<(usize, usize), GenId>,
    fingerprint: String,
}

fn sector_labels(kind: GeneratorKind, sector: Option<Sector>) -> &'static str {
    match (kind, sector) {
        (GeneratorKind::Ghost, Some(Sector::Subalgebra)) => "eta",
        (GeneratorKind::Ghost, _) => "C",
        (GeneratorKind::Connection, Some(Sector::Subalgebra)) => "B",
        (GeneratorKind::Connection, _) => "A",
        (GeneratorKind::Curvature, Some(Sector::Subalgebra)) => "G",
        (GeneratorKind::Curvature, _) => "F",
        (GeneratorKind::CovariantGhostDerivative, Some(Sector::Subalgebra)) => "Deta",
        (GeneratorKind::CovariantGhostDerivative, _) => "DC",
    }
}

impl GeneratorTable {
    /// Builds the table for `scheme`. Split schemes require `split`;
    /// unsplit schemes ignore it. In the `ce_ghost` scheme ghosts are
    /// labeled `eta1..`; a split relabels each sector (`eta/C`, `B/A`,
    /// `G/F`, `Deta/DC`), numbering generators within their sector.
    pub fn new(
        algebra: LieAlgebraSpec,
        scheme: VariableScheme,
        split: Option<SemidirectSplit>,
    ) -> Result<Arc<Self>, GcaError> {
        if scheme.is_split() && split.is_none() {
            return Err(GcaError::SplitRequired { scheme });
        }
        let split = if scheme.is_split() { split } else { None };
        let dim = algebra.dim();
        // (kind, sector order, position, algebra index)
        let mut slots: Vec<(GeneratorKind, u8, usize, usize, Option<Sector>)> = Vec::new();
        for &kind in scheme.kinds() {
            match &split {
                None => {
                    for a in 0..dim {
                        slots.push((kind, 0, a, a, None));
                    }
                }
                Some(sp) => {
                    for (pos, &a) in sp.subalg_indices.iter().enumerate() {
                        slots.push((kind, 0, pos, a, Some(Sector::Subalgebra)));
                    }
                    for (pos, &a) in sp.ideal_indices.iter().enumerate() {
                        slots.push((kind, 1, pos, a, Some(Sector::Ideal)));
                    }
                }
            }
        }
        let mut generators = Vec::with_capacity(slots.len());
        let mut by_label = BTreeMap::new();
        let mut family = BTreeMap::new();
        for (id, (kind, _, pos, adjoint, sector)) in slots.into_iter().enumerate() {
            let base = if scheme == VariableScheme::CeGhost && sector.is_none() {
                "eta"
            } else {
                sector_labels(kind, sector)
            };
            let label = format!("{base}{}", pos + 1);
            let (form_degree, ghost_number) = kind.degrees();
            let id = id as GenId;
            by_label.insert(label.clone(), id);
            family.insert((kind.index(), adjoint), id);
            generators.push(Generator {
                id,
                label,
                kind,
                adjoint_index: adjoint,
                sector,
                form_degree,
                ghost_number,
            });
        }
        let fingerprint = format!(
            "{}|{}|{:?}",
            scheme.name(),
            algebra.to_canonical_json(),
            split
                .as_ref()
                .map(|s| (&s.subalg_indices, &s.ideal_indices, s.abelian_ideal)),
        );
        Ok(Arc::new(GeneratorTable {
            algebra,
            scheme,
            split,
            generators,
            by_label,
            family,
            fingerprint,
        }))
    }

    pub fn len(&self) -> usize {
        self.generators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.generators.is_empty()
    }

    pub fn generator(&self, id: GenId) -> Result<&Generator, GcaError> {
        self.generators
            .get(id as usize)
            .ok_or(GcaError::UnknownGenerator(id))
    }

    pub fn by_label(&self, label: &str) -> Result<&Generator, GcaError> {
        let id = self
            .by_label
            .get(label)
            .ok_or_else(|| GcaError::UnknownLabel(label.into()))?;
        Ok(&self.generators[*id as usize])
    }

    /// Generator of `kind` dual to algebra basis element `adjoint`, if the
    /// scheme carries that kind.
    pub fn of_kind(&self, kind: GeneratorKind, adjoint: usize) -> Option<GenId> {
        self.family.get(&(kind.index(), adjoint)).copied()
    }

    pub fn same_context(&self, other: &GeneratorTable) -> bool {
        std::ptr::eq(self, other) || self.fingerprint == other.fingerprint
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// Sector of an algebra basis index under this table's split.
    pub fn sector_of_index(&self, adjoint: usize) -> Option<Sector> {
        self.split.as_ref().map(|s| {
            if s.subalg_indices.contains(&adjoint) {
                Sector::Subalgebra
            } else {
                Sector::Ideal
            }
        })
    }
}

/// Factors of a canonical monomial: strictly increasing generator ids with
/// positive multiplicities; odd generators appear with multiplicity one.
pub type FactorKey = Vec<(GenId, u32)>;

/// A canonically ordered monomial with its rational coefficient.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Monomial {
    pub coefficient: Q,
    pub factors: FactorKey,
}

/// Sorts a raw factor sequence into canonical order, tracking the Koszul
/// sign. Returns `None` when an odd generator repeats.
pub fn normalize(
    table: &GeneratorTable,
    factors: &[GenId],
    coefficient: Q,
) -> Result<Option<Monomial>, GcaError> {
    let mut odd_seen: Vec<GenId> = Vec::new();
    let mut flips = 0usize;
    let mut counts: BTreeMap<GenId, u32> = BTreeMap::new();
    // Walk left to right; inserting an odd factor counts the odd factors
    // already placed that must move past it (those with larger id).
    for &id in factors {
        let gen = table.generator(id)?;
        if gen.is_odd() {
            if odd_seen.contains(&id) {
                return Ok(None);
            }
            flips += odd_seen.iter().filter(|&&prev| prev > id).count();
            odd_seen.push(id);
        }
        *counts.entry(id).or_insert(0) += 1;
    }
    if coefficient.is_zero() {
        return Ok(None);
    }
    let sign = if flips % 2 == 0 {
        coefficient
    } else {
        -coefficient
    };
    Ok(Some(Monomial {
        coefficient: sign,
        factors: counts.into_iter().collect(),
    }))
}

/// Merges two canonical factor keys; `None` when an odd factor repeats,
/// otherwise the merged key and whether the Koszul sign is negative.
fn mul_keys(table: &GeneratorTable, x: &FactorKey, y: &FactorKey) -> Option<(FactorKey, bool)> {
    let odd = |key: &FactorKey| -> Vec<GenId> {
        key.iter()
            .filter(|(id, _)| table.generators[*id as usize].is_odd())
            .map(|(id, _)| *id)
            .collect()
    };
    let ox = odd(x);
    let oy = odd(y);
    let mut inversions = 0usize;
    for &j in &oy {
        for &i in &ox {
            if i == j {
                return None;
            }
            if i > j {
                inversions += 1;
            }
        }
    }
    let mut merged: BTreeMap<GenId, u32> = x.iter().cloned().collect();
    for (id, k) in y {
        *merged.entry(*id).or_insert(0) += k;
    }
    Some((merged.into_iter().collect(), inversions % 2 == 1))
}

pub fn key_form_degree(table: &GeneratorTable, key: &FactorKey) -> u32 {
    key.iter()
        .map(|(id, k)| table.generators[*id as usize].form_degree * k)
        .sum()
}

pub fn key_ghost_number(table: &GeneratorTable, key: &FactorKey) -> u32 {
    key.iter()
        .map(|(id, k)| table.generators[*id as usize].ghost_number * k)
        .sum()
}

pub fn key_homogeneity(key: &FactorKey) -> u32 {
    key.iter().map(|(_, k)| k).sum()
}

pub fn key_kind_count(table: &GeneratorTable, key: &FactorKey, kind: GeneratorKind) -> u32 {
    key.iter()
        .filter(|(id, _)| table.generators[*id as usize].kind == kind)
        .map(|(_, k)| k)
        .sum()
}

pub fn key_sector_kind_count(
    table: &GeneratorTable,
    key: &FactorKey,
    kind: GeneratorKind,
    sector: Sector,
) -> u32 {
    key.iter()
        .filter(|(id, _)| {
            let g = &table.generators[*id as usize];
            g.kind == kind && g.sector == Some(sector)
        })
        .map(|(_, k)| k)
        .sum()
}

/// A finite rational combination of canonical monomials.
#[derive(Clone)]
pub struct Element {
    table: Arc<GeneratorTable>,
    terms: BTreeMap<FactorKey, Q>,
}

impl Element {
    pub fn zero(table: &Arc<GeneratorTable>) -> Self {
        Element {
            table: Arc::clone(table),
            terms: BTreeMap::new(),
        }
    }

    pub fn one(table: &Arc<GeneratorTable>) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), Q::one());
        Element {
            table: Arc::clone(table),
            terms,
        }
    }

    pub fn scalar(table: &Arc<GeneratorTable>, c: Q) -> Self {
        let mut e = Element::zero(table);
        if !c.is_zero() {
            e.terms.insert(Vec::new(), c);
        }
        e
    }

    pub fn generator(table: &Arc<GeneratorTable>, id: GenId) -> Result<Self, GcaError> {
        table.generator(id)?;
        let mut e = Element::zero(table);
        e.terms.insert(vec![(id, 1)], Q::one());
        Ok(e)
    }

    pub fn from_monomial(table: &Arc<GeneratorTable>, m: &Monomial) -> Self {
        let mut e = Element::zero(table);
        if !m.coefficient.is_zero() {
            e.terms.insert(m.factors.clone(), m.coefficient.clone());
        }
        e
    }

    /// Normalizes a raw factor sequence and wraps it as an element.
    pub fn from_factors(
        table: &Arc<GeneratorTable>,
        factors: &[GenId],
        coefficient: Q,
    ) -> Result<Self, GcaError> {
        match normalize(table, factors, coefficient)? {
            None => Ok(Element::zero(table)),
            Some(m) => Ok(Element::from_monomial(table, &m)),
        }
    }

    pub fn table(&self) -> &Arc<GeneratorTable> {
        &self.table
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&FactorKey, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coefficient(&self, key: &FactorKey) -> Q {
        self.terms.get(key).cloned().unwrap_or_else(Q::zero)
    }

    fn assert_context(&self, other: &Element) {
        assert!(
            self.table.same_context(&other.table),
            "elements from different generator tables cannot be combined"
        );
    }

    pub fn add_term(&mut self, key: FactorKey, coeff: Q) {
        if coeff.is_zero() {
            return;
        }
        let slot = self.terms.entry(key).or_insert_with(Q::zero);
        *slot += coeff;
        if slot.is_zero() {
            // re-fetch key by removing zero entries lazily
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add(&self, other: &Element) -> Element {
        self.assert_context(other);
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Element) -> Element {
        self.assert_context(other);
        let mut out = self.clone();
        for (k, v) in &other.terms {
            out.add_term(k.clone(), -v.clone());
        }
        out
    }

    pub fn neg(&self) -> Element {
        let mut out = Element::zero(&self.table);
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), -v.clone());
        }
        out
    }

    pub fn scale(&self, c: &Q) -> Element {
        let mut out = Element::zero(&self.table);
        if c.is_zero() {
            return out;
        }
        for (k, v) in &self.terms {
            out.terms.insert(k.clone(), v * c);
        }
        out
    }

    /// Graded-commutative product.
    pub fn mul(&self, other: &Element) -> Element {
        self.assert_context(other);
        let mut out = Element::zero(&self.table);
        for (kx, vx) in &self.terms {
            for (ky, vy) in &other.terms {
                if let Some((key, negate)) = mul_keys(&self.table, kx, ky) {
                    let c = vx * vy;
                    out.add_term(key, if negate { -c } else { c });
                }
            }
        }
        out
    }

    /// `(form degree, ghost number)` when all terms agree, `None` otherwise
    /// (and for the zero element).
    pub fn bidegree(&self) -> Option<(u32, u32)> {
        let mut it = self.terms.keys();
        let first = it.next()?;
        let bd = (
            key_form_degree(&self.table, first),
            key_ghost_number(&self.table, first),
        );
        for k in it {
            if (
                key_form_degree(&self.table, k),
                key_ghost_number(&self.table, k),
            ) != bd
            {
                return None;
            }
        }
        Some(bd)
    }

    /// Splits into parts with a common value of `grade` per monomial.
    pub fn split_by<F: Fn(&GeneratorTable, &FactorKey) -> u32>(
        &self,
        grade: F,
    ) -> BTreeMap<u32, Element> {
        let mut out: BTreeMap<u32, Element> = BTreeMap::new();
        for (k, v) in &self.terms {
            let g = grade(&self.table, k);
            out.entry(g)
                .or_insert_with(|| Element::zero(&self.table))
                .add_term(k.clone(), v.clone());
        }
        out
    }

    /// Rebuilds the element in another table, matching generators by label.
    pub fn remap(&self, to: &Arc<GeneratorTable>) -> Result<Element, GcaError> {
        let mut out = Element::zero(to);
        for (key, coeff) in &self.terms {
            let mut seq = Vec::new();
            for (id, k) in key {
                let label = &self.table.generators[*id as usize].label;
                let tid = to.by_label(label)?.id;
                for _ in 0..*k {
                    seq.push(tid);
                }
            }
            if let Some(m) = normalize(to, &seq, coeff.clone())? {
                out.add_term(m.factors, m.coefficient);
            }
        }
        Ok(out)
    }

    /// Parses the CLI text syntax: terms `coef * label^k label ...`
    /// joined with `+`/`-`; a missing coefficient means `1`.
    pub fn parse(table: &Arc<GeneratorTable>, text: &str) -> Result<Element, GcaError> {
        let mut out = Element::zero(table);
        let text = text.trim();
        if text.is_empty() || text == "0" {
            return Ok(out);
        }
        // split into signed chunks
        let mut chunks: Vec<(bool, String)> = Vec::new();
        let mut current = String::new();
        let mut negative = false;
        let mut started = false;
        for ch in text.chars() {
            match ch {
                '+' | '-' if started => {
                    chunks.push((negative, current.trim().to_string()));
                    current = String::new();
                    negative = ch == '-';
                }
                '-' => {
                    negative = true;
                    started = true;
                }
                _ => {
                    if !ch.is_whitespace() {
                        started = true;
                    }
                    current.push(ch);
                }
            }
        }
        chunks.push((negative, current.trim().to_string()));
        for (neg, chunk) in chunks {
            if chunk.is_empty() {
                return Err(GcaError::Parse(format!("empty term in {text:?}")));
            }
            let (coeff_str, factors_str) = match chunk.split_once('*') {
                Some((c, f)) => (Some(c.trim()), f.trim()),
                None => {
                    // a bare leading rational is a coefficient only when the
                    // whole chunk is one
                    let first = chunk.split_whitespace().next().unwrap_or("");
                    if first.chars().next().is_some_and(|c| c.is_ascii_digit())
                        && chunk.split_whitespace().count() == 1
                        && parse_q(first).is_ok()
                    {
                        (Some(chunk.as_str()), "")
                    } else {
                        (None, chunk.as_str())
                    }
                }
            };
            let mut coeff = match coeff_str {
                None => Q::one(),
                Some(c) => parse_q(c).map_err(GcaError::Parse)?,
            };
            if neg {
                coeff = -coeff;
            }
            let mut seq: Vec<GenId> = Vec::new();
            for tok in factors_str.split_whitespace() {
                let (label, exp) = match tok.split_once('^') {
                    None => (tok, 1u32),
                    Some((l, e)) => (
                        l,
                        e.parse::<u32>()
                            .map_err(|_| GcaError::Parse(format!("bad exponent in {tok:?}")))?,
                    ),
                };
                let id = table.by_label(label)?.id;
                for _ in 0..exp {
                    seq.push(id);
                }
            }
            if let Some(m) = normalize(table, &seq, coeff)? {
                out.add_term(m.factors, m.coefficient);
            }
        }
        Ok(out)
    }
}

impl PartialEq for Element {
    fn eq(&self, other: &Self) -> bool {
        self.table.same_context(&other.table) && self.terms == other.terms
    }
}

impl Eq for Element {}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (i, (key, coeff)) in self.terms.iter().enumerate() {
            let (mag, neg) = if coeff.is_negative() {
                (-coeff.clone(), true)
            } else {
                (coeff.clone(), false)
            };
            if i == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else if neg {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            if key.is_empty() {
                write!(f, "{}", fmt_q(&mag))?;
                continue;
            }
            write!(f, "{} *", fmt_q(&mag))?;
            for (id, k) in key {
                let label = &self.table.generators[*id as usize].label;
                if *k == 1 {
                    write!(f, " {label}")?;
                } else {
                    write!(f, " {label}^{k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Element({self})")
    }
}

/// Degree constraints cutting a finite slice out of the algebra.
///
/// Every field is optional; enumeration fails with
/// [`GcaError::UnboundedSlice`] when the given constraints do not bound
/// some generator's multiplicity.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SliceConstraints {
    pub form_degree: Option<u32>,
    pub ghost_number: Option<u32>,
    /// Total number of generator factors counted with multiplicity.
    pub homogeneity: Option<u32>,
    pub ghost_count: Option<u32>,
    pub connection_count: Option<u32>,
    pub curvature_count: Option<u32>,
    pub cgd_count: Option<u32>,
    /// Ghost count in the subalgebra sector (the `eta`s).
    pub eta_count: Option<u32>,
    /// Ghost count in the ideal sector (the `C`s).
    pub c_ghost_count: Option<u32>,
    /// Upper bound on the curvature count, for degree-capped enumeration.
    pub max_curvature: Option<u32>,
    /// Restrict to generators of one sector.
    pub sector_only: Option<Sector>,
}

impl SliceConstraints {
    pub fn ghost(g: u32) -> Self {
        SliceConstraints {
            ghost_number: Some(g),
            ..Default::default()
        }
    }

    pub fn ghost_curv(g: u32, m: u32) -> Self {
        SliceConstraints {
            ghost_number: Some(g),
            curvature_count: Some(m),
            ..Default::default()
        }
    }

    pub fn form_ghost(p: u32, g: u32) -> Self {
        SliceConstraints {
            form_degree: Some(p),
            ghost_number: Some(g),
            ..Default::default()
        }
    }

    pub fn with_sector(mut self, s: Sector) -> Self {
        self.sector_only = Some(s);
        self
    }

    pub fn with_max_curvature(mut self, m: u32) -> Self {
        self.max_curvature = Some(m);
        self
    }

    pub fn with_c_ghosts(mut self, k: u32) -> Self {
        self.c_ghost_count = Some(k);
        self
    }

    pub fn with_eta(mut self, k: u32) -> Self {
        self.eta_count = Some(k);
        self
    }

    /// Shifts form degree and ghost number by a derivation's degree shift;
    /// count constraints that the shift invalidates must be adjusted by
    /// the caller.
    pub fn shifted(&self, dform: i64, dghost: i64) -> Option<Self> {
        let shift = |v: Option<u32>, d: i64| -> Option<Option<u32>> {
            match v {
                None => Some(None),
                Some(x) => {
                    let y = x as i64 + d;
                    if y < 0 {
                        None
                    } else {
                        Some(Some(y as u32))
                    }
                }
            }
        };
        Some(SliceConstraints {
            form_degree: shift(self.form_degree, dform)?,
            ghost_number: shift(self.ghost_number, dghost)?,
            ..self.clone()
        })
    }

    fn max_multiplicity(&self, gen: &Generator) -> Option<u32> {
        if let Some(s) = self.sector_only {
            if gen.sector != Some(s) {
                return Some(0);
            }
        }
        if gen.is_odd() {
            return Some(1);
        }
        let mut bound: Option<u32> = None;
        let mut consider = |b: Option<u32>| {
            if let Some(b) = b {
                bound = Some(bound.map_or(b, |cur| cur.min(b)));
            }
        };
        consider(self.homogeneity);
        if gen.form_degree > 0 {
            consider(self.form_degree.map(|p| p / gen.form_degree));
        }
        if gen.ghost_number > 0 {
            consider(self.ghost_number.map(|g| g / gen.ghost_number));
        }
        match gen.kind {
            GeneratorKind::Curvature => {
                consider(self.curvature_count);
                consider(self.max_curvature);
            }
            GeneratorKind::CovariantGhostDerivative => consider(self.cgd_count),
            GeneratorKind::Connection => consider(self.connection_count),
            GeneratorKind::Ghost => consider(self.ghost_count),
        }
        bound
    }

    fn admits(&self, table: &GeneratorTable, key: &FactorKey) -> bool {
        let checks = [
            (self.form_degree, key_form_degree(table, key)),
            (self.ghost_number, key_ghost_number(table, key)),
            (self.homogeneity, key_homogeneity(key)),
            (
                self.ghost_count,
                key_kind_count(table, key, GeneratorKind::Ghost),
            ),
            (
                self.connection_count,
                key_kind_count(table, key, GeneratorKind::Connection),
            ),
            (
                self.curvature_count,
                key_kind_count(table, key, GeneratorKind::Curvature),
            ),
            (
                self.cgd_count,
                key_kind_count(table, key, GeneratorKind::CovariantGhostDerivative),
            ),
            (
                self.eta_count,
                key_sector_kind_count(table, key, GeneratorKind::Ghost, Sector::Subalgebra),
            ),
            (
                self.c_ghost_count,
                key_sector_kind_count(table, key, GeneratorKind::Ghost, Sector::Ideal),
            ),
        ];
        if checks
            .iter()
            .any(|(want, got)| want.is_some_and(|w| w != *got))
        {
            return false;
        }
        if let Some(cap) = self.max_curvature {
            if key_kind_count(table, key, GeneratorKind::Curvature) > cap {
                return false;
            }
        }
        true
    }

    /// Conservative check that a partial monomial can still be completed.
    fn within_caps(&self, table: &GeneratorTable, key: &FactorKey) -> bool {
        let caps = [
            (self.form_degree, key_form_degree(table, key)),
            (self.ghost_number, key_ghost_number(table, key)),
            (self.homogeneity, key_homogeneity(key)),
            (
                self.ghost_count,
                key_kind_count(table, key, GeneratorKind::Ghost),
            ),
            (
                self.connection_count,
                key_kind_count(table, key, GeneratorKind::Connection),
            ),
            (
                self.curvature_count.or(self.max_curvature),
                key_kind_count(table, key, GeneratorKind::Curvature),
            ),
            (
                self.cgd_count,
                key_kind_count(table, key, GeneratorKind::CovariantGhostDerivative),
            ),
            (
                self.eta_count,
                key_sector_kind_count(table, key, GeneratorKind::Ghost, Sector::Subalgebra),
            ),
            (
                self.c_ghost_count,
                key_sector_kind_count(table, key, GeneratorKind::Ghost, Sector::Ideal),
            ),
        ];
        caps.iter()
            .all(|(cap, got)| cap.map_or(true, |c| *got <= c))
    }
}

/// Deterministic enumeration of all canonical monomials in a slice, in
/// lexicographic order of exponent vectors. The enumeration is a pure
/// function of the table and constraints, so concurrent callers see the
/// identical ordered list.
pub fn basis_slice(
    table: &GeneratorTable,
    constraints: &SliceConstraints,
) -> Result<Vec<Monomial>, GcaError> {
    // every even generator must be bounded by something
    for gen in &table.generators {
        if constraints.max_multiplicity(gen).is_none() {
            return Err(GcaError::UnboundedSlice {
                label: gen.label.clone(),
            });
        }
    }
    let mut out = Vec::new();
    let mut key: FactorKey = Vec::new();
    enumerate(table, constraints, 0, &mut key, &mut out);
    Ok(out)
}

/// Counts the slice without materializing it, giving up once the count
/// exceeds `cap`. Used as a resource guard before expensive enumerations.
pub fn slice_size_capped(
    table: &GeneratorTable,
    constraints: &SliceConstraints,
    cap: usize,
) -> Result<Option<usize>, GcaError> {
    for gen in &table.generators {
        if constraints.max_multiplicity(gen).is_none() {
            return Err(GcaError::UnboundedSlice {
                label: gen.label.clone(),
            });
        }
    }
    let mut count = 0usize;
    let mut key: FactorKey = Vec::new();
    let capped = count_enumerate(table, constraints, 0, &mut key, &mut count, cap);
    Ok(if capped { None } else { Some(count) })
}

fn count_enumerate(
    table: &GeneratorTable,
    constraints: &SliceConstraints,
    next: usize,
    key: &mut FactorKey,
    count: &mut usize,
    cap: usize,
) -> bool {
    if next == table.generators.len() {
        if constraints.admits(table, key) {
            *count += 1;
        }
        return *count > cap;
    }
    let gen = &table.generators[next];
    let max = constraints
        .max_multiplicity(gen)
        .expect("bounded by slice_size_capped");
    for mult in 0..=max {
        if mult > 0 {
            key.push((gen.id, mult));
        }
        let over = constraints.within_caps(table, key)
            && count_enumerate(table, constraints, next + 1, key, count, cap);
        if mult > 0 {
            key.pop();
        }
        if over {
            return true;
        }
    }
    false
}

fn enumerate(
    table: &GeneratorTable,
    constraints: &SliceConstraints,
    next: usize,
    key: &mut FactorKey,
    out: &mut Vec<Monomial>,
) {
    if next == table.generators.len() {
        if constraints.admits(table, key) {
            out.push(Monomial {
                coefficient: Q::one(),
                factors: key.clone(),
            });
        }
        return;
    }
    let gen = &table.generators[next];
    let max = constraints
        .max_multiplicity(gen)
        .expect("bounded by basis_slice");
    for mult in 0..=max {
        if mult > 0 {
            key.push((gen.id, mult));
        }
        if constraints.within_caps(table, key) {
            enumerate(table, constraints, next + 1, key, out);
        }
        if mult > 0 {
            key.pop();
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::liealg;
    use crate::rational::qi;

    fn so3_ce() -> Arc<GeneratorTable> {
        GeneratorTable::new(liealg::so3(), VariableScheme::CeGhost, None).unwrap()
    }

    fn iso3_split_fc() -> Arc<GeneratorTable> {
        GeneratorTable::new(
            liealg::iso3(),
            VariableScheme::SplitFc,
            liealg::builtin_split("iso3"),
        )
        .unwrap()
    }

    #[test]
    fn normalize_signs() {
        let t = so3_ce();
        // [eta2, eta1] -> -(eta1 eta2)
        let e2 = t.by_label("eta2").unwrap().id;
        let e1 = t.by_label("eta1").unwrap().id;
        let m = normalize(&t, &[e2, e1], qi(1)).unwrap().unwrap();
        assert_eq!(m.coefficient, qi(-1));
        assert_eq!(m.factors, vec![(e1, 1), (e2, 1)]);
        // odd square vanishes
        assert!(normalize(&t, &[e1, e2, e1], qi(1)).unwrap().is_none());
        // idempotence on canonical input
        let again = normalize(&t, &[e1, e2], m.coefficient.clone())
            .unwrap()
            .unwrap();
        assert_eq!(again.coefficient, qi(-1));
    }

    #[test]
    fn even_factors_commute_freely() {
        let t = iso3_split_fc();
        let f1 = t.by_label("F1").unwrap().id;
        let c1 = t.by_label("C1").unwrap().id;
        // [F1, C1] -> +(C1 F1): moving the even F across the odd C is free
        let m = normalize(&t, &[f1, c1], qi(1)).unwrap().unwrap();
        assert_eq!(m.coefficient, qi(1));
        assert_eq!(m.factors, vec![(c1, 1), (f1, 1)]);
    }

    #[test]
    fn product_rules() {
        let t = iso3_split_fc();
        let c1 = Element::parse(&t, "C1").unwrap();
        let c2 = Element::parse(&t, "C2").unwrap();
        assert!(c1.mul(&c1).is_zero());
        assert_eq!(c1.mul(&c2), c2.mul(&c1).neg());
        let f12 = Element::parse(&t, "F1 + F2").unwrap();
        let cc = c1.mul(&c2);
        assert_eq!(
            f12.mul(&cc),
            Element::parse(&t, "C1 C2 F1 + C1 C2 F2").unwrap()
        );
        // grading adds
        let x = Element::parse(&t, "C1 F2").unwrap();
        assert_eq!(x.bidegree(), Some((2, 1)));
        assert_eq!(cc.mul(&f12).bidegree(), Some((2, 2)));
    }

    #[test]
    fn slice_counts() {
        // top exterior power of a 3-dim ghost complex
        let t = so3_ce();
        let s = basis_slice(&t, &SliceConstraints::ghost(3)).unwrap();
        assert_eq!(s.len(), 1);
        assert_eq!(key_ghost_number(&t, &s[0].factors), 3);

        // pairs from six curvature generators: C(6+1, 2) = 21
        let t = iso3_split_fc();
        let c = SliceConstraints {
            c_ghost_count: Some(0),
            eta_count: Some(0),
            curvature_count: Some(2),
            ..Default::default()
        };
        assert_eq!(basis_slice(&t, &c).unwrap().len(), 21);

        // ghost one, form zero in a dim-6 ce_ghost table
        let t6 = GeneratorTable::new(liealg::iso3(), VariableScheme::CeGhost, None).unwrap();
        let s = basis_slice(&t6, &SliceConstraints::form_ghost(0, 1)).unwrap();
        assert_eq!(s.len(), 6);

        // unbounded: curvatures with no cap
        let t = iso3_split_fc();
        let free = SliceConstraints {
            ghost_number: Some(0),
            ..Default::default()
        };
        assert!(matches!(
            basis_slice(&t, &free),
            Err(GcaError::UnboundedSlice { .. })
        ));
    }

    #[test]
    fn parse_print_roundtrip() {
        let t = iso3_split_fc();
        for text in [
            "0",
            "3/2",
            "-1 * C1 C2",
            "1 * C1 F1^2 - 2/3 * C2 G1 + 5 * eta1 eta2 eta3",
        ] {
            let e = Element::parse(&t, text).unwrap();
            let printed = e.to_string();
            let back = Element::parse(&t, &printed).unwrap();
            assert_eq!(e, back, "{text} -> {printed}");
            assert_eq!(printed, back.to_string());
        }
        assert!(Element::parse(&t, "Z9").is_err());
    }

    #[test]
    fn remap_between_tables() {
        let split = liealg::builtin_split("iso3");
        let fc = iso3_split_fc();
        let full = GeneratorTable::new(liealg::iso3(), VariableScheme::SplitFull, split).unwrap();
        let x = Element::parse(&fc, "1 * C1 G2 - 2 * eta1 eta2").unwrap();
        let y = x.remap(&full).unwrap();
        assert_eq!(y.to_string(), x.to_string());
    }
}

#[cfg(test)]
mod prop_tests {
    use super::*;
    use crate::liealg;
    use crate::rational::qi;
    use proptest::prelude::*;

    fn table() -> Arc<GeneratorTable> {
        GeneratorTable::new(
            liealg::iso3(),
            VariableScheme::SplitFc,
            liealg::builtin_split("iso3"),
        )
        .unwrap()
    }

    fn arb_element(t: Arc<GeneratorTable>) -> impl Strategy<Value = Element> {
        let n = t.len() as u32;
        proptest::collection::vec((proptest::collection::vec(0..n, 0..4), -3i64..4), 0..4).prop_map(
            move |terms| {
                let mut e = Element::zero(&t);
                for (seq, c) in terms {
                    let part = Element::from_factors(&t, &seq, qi(c)).unwrap();
                    e = e.add(&part);
                }
                e
            },
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn associativity((x, y, z) in (arb_element(table()), arb_element(table()), arb_element(table()))) {
            prop_assert_eq!(x.mul(&y).mul(&z), x.mul(&y.mul(&z)));
        }

        #[test]
        fn graded_commutativity((x, y) in (arb_element(table()), arb_element(table()))) {
            // compare homogeneous-parity pieces: x y = (-1)^{|x||y|} y x
            let parity = |t: &GeneratorTable, k: &FactorKey| {
                (key_form_degree(t, k) + key_ghost_number(t, k)) % 2
            };
            for (px, xs) in x.split_by(parity) {
                for (py, ys) in y.split_by(parity) {
                    let lhs = xs.mul(&ys);
                    let rhs = if px * py % 2 == 1 { ys.mul(&xs).neg() } else { ys.mul(&xs) };
                    prop_assert_eq!(lhs, rhs);
                }
            }
        }

        #[test]
        fn grading_is_additive((x, y) in (arb_element(table()), arb_element(table()))) {
            if let (Some((fx, gx)), Some((fy, gy))) = (x.bidegree(), y.bidegree()) {
                let p = x.mul(&y);
                if !p.is_zero() {
                    prop_assert_eq!(p.bidegree(), Some((fx + fy, gx + gy)));
                }
            }
        }
    }
}
