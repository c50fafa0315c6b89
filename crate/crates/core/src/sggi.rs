//! Deciding whether a presentation with involutory generators defines a
//! string C-group, and recording the evidence.
//!
//! Everything is computed from coset tables. The table over the trivial
//! subgroup gives the regular representation; parabolic orders are orbit
//! sizes of the identity coset in it. Intersections `G_I ∩ G_J` come from the
//! orbit of the base coset of `G/G_J` under the generators of `G_I`:
//! `|G_I ∩ G_J| = |G_I| / |orbit|`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::coset::{enumerate, parabolic_words, CosetTable, EnumerationOptions};
use crate::error::{EnumError, SggiError};
use crate::perm::{Permutation, PermutationGroup};
use crate::words::{commutator, evaluate, power, Presentation, Word};

/// A set of generator indices, stored as a bit mask.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Subset(pub u32);

impl Subset {
    pub fn from_indices(indices: &[usize]) -> Self {
        Subset(indices.iter().fold(0, |m, &i| m | (1 << i)))
    }

    pub fn interval(a: usize, b: usize) -> Self {
        Subset::from_indices(&(a..=b).collect::<Vec<_>>())
    }

    pub fn full(rank: usize) -> Self {
        Subset((1u32 << rank) - 1)
    }

    pub fn indices(self) -> Vec<usize> {
        (0..32).filter(|&i| self.0 >> i & 1 == 1).collect()
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn meet(self, other: Subset) -> Subset {
        Subset(self.0 & other.0)
    }

    pub fn is_subset_of(self, other: Subset) -> bool {
        self.0 & !other.0 == 0
    }

    pub fn without(self, i: usize) -> Subset {
        Subset(self.0 & !(1 << i))
    }
}

impl fmt::Display for Subset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

impl Serialize for Subset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.indices().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Subset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<usize>::deserialize(d)?;
        if v.iter().any(|&i| i >= 32) {
            return Err(serde::de::Error::custom("generator index out of range"));
        }
        Ok(Subset::from_indices(&v))
    }
}

/// A presentation whose generators are claimed to be the distinguished
/// involutions `ρ₀..ρ_{d−1}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SggiSpec {
    presentation: Presentation,
}

impl SggiSpec {
    pub fn new(presentation: Presentation) -> Self {
        if let Some(i) = (0..presentation.generator_count() as u32)
            .find(|&i| !presentation.is_declared_involution(i))
        {
            log::debug!("generator r{i} has no literal square relator");
        }
        SggiSpec { presentation }
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn rank(&self) -> usize {
        self.presentation.generator_count()
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IntersectionMode {
    /// Every unordered pair of distinct subsets.
    #[default]
    Full,
    /// Every pair of incomparable subsets; comparable pairs hold trivially.
    Pruned,
    /// Facet and vertex-figure recursion over generator intervals.
    Recursive,
}

impl std::str::FromStr for IntersectionMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "full" => Ok(IntersectionMode::Full),
            "pruned" => Ok(IntersectionMode::Pruned),
            "recursive" => Ok(IntersectionMode::Recursive),
            other => Err(format!("unknown intersection mode {other:?}")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InvolutionStatus {
    Involution,
    /// The generator is trivial in the group.
    Collapsed,
    /// The generator has order other than 1 or 2.
    Other(u64),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvidenceRow {
    pub i: Subset,
    pub j: Subset,
    /// `|G_I ∩ G_J|`.
    pub intersection: u64,
    /// `|G_{I∩J}|`.
    pub meet: u64,
}

impl EvidenceRow {
    pub fn holds(&self) -> bool {
        self.intersection == self.meet
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntersectionReport {
    pub mode: IntersectionMode,
    pub passed: bool,
    pub evidence: Vec<EvidenceRow>,
    /// Coset enumerations issued for this check (cached tables excluded).
    pub enumerations: usize,
}

/// The full verification record of one presentation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SggiCertificate {
    pub rank: usize,
    pub group_order: u64,
    #[serde(rename = "type")]
    pub schlafli_type: Vec<u64>,
    /// Exponent written in the relator `(ρ_{i−1}ρᵢ)^e`, where one is listed.
    pub relator_exponents: Vec<Option<u64>>,
    pub involutions: Vec<InvolutionStatus>,
    pub involutions_ok: bool,
    pub string_ok: bool,
    pub intersection_ok: bool,
    pub intersection_mode: IntersectionMode,
    pub parabolic_orders: BTreeMap<String, u64>,
    pub intersection_evidence: Vec<EvidenceRow>,
    pub minimal: bool,
    pub degenerate: bool,
    pub tight: bool,
    pub enumerations: usize,
}

impl SggiCertificate {
    pub fn passes(&self) -> bool {
        self.involutions_ok && self.string_ok && self.intersection_ok
    }

    /// `2·k₁·…·k_{d−1}`; saturates on overflow.
    pub fn lower_bound(&self) -> u128 {
        self.schlafli_type
            .iter()
            .fold(2u128, |acc, &k| acc.saturating_mul(k as u128))
    }

    /// Listed relator exponents that differ from the true element order.
    pub fn exponent_mismatches(&self) -> Vec<usize> {
        (0..self.schlafli_type.len())
            .filter(|&i| matches!(self.relator_exponents[i], Some(e) if e != self.schlafli_type[i]))
            .map(|i| i + 1)
            .collect()
    }
}

/// A finite group given by a presentation, with its regular representation
/// and a cache of coset tables over parabolic subgroups.
pub struct GroupContext {
    presentation: Presentation,
    options: EnumerationOptions,
    regular: Arc<CosetTable>,
    permutations: OnceLock<Vec<Permutation>>,
    tables: Mutex<HashMap<Subset, Arc<CosetTable>>>,
    orders: Mutex<HashMap<Subset, u64>>,
    enumerations: Mutex<usize>,
}

impl GroupContext {
    /// Enumerates the group over the trivial subgroup.
    pub fn new(presentation: Presentation, options: EnumerationOptions) -> Result<Self, EnumError> {
        let regular = Arc::new(enumerate(&presentation, &[], &options)?);
        let mut tables = HashMap::new();
        tables.insert(Subset(0), regular.clone());
        Ok(GroupContext {
            presentation,
            options,
            regular,
            permutations: OnceLock::new(),
            tables: Mutex::new(tables),
            orders: Mutex::new(HashMap::new()),
            enumerations: Mutex::new(1),
        })
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn rank(&self) -> usize {
        self.presentation.generator_count()
    }

    pub fn order(&self) -> u64 {
        self.regular.index() as u64
    }

    pub fn regular_table(&self) -> &CosetTable {
        &self.regular
    }

    /// Total coset enumerations issued so far, including the regular one.
    pub fn enumerations(&self) -> usize {
        *self.enumerations.lock().expect("counter lock")
    }

    /// The right regular representation: one permutation of the group
    /// elements per generator.
    pub fn permutations(&self) -> &[Permutation] {
        self.permutations.get_or_init(|| {
            self.regular
                .to_permutations()
                .expect("enumerated tables are closed")
        })
    }

    pub fn evaluate(&self, w: &Word) -> Result<Permutation, SggiError> {
        Ok(evaluate(w, self.permutations())?)
    }

    pub fn element_order(&self, w: &Word) -> Result<u64, SggiError> {
        Ok(self.evaluate(w)?.order() as u64)
    }

    /// `|G_I|`, the orbit of the identity under the generators in `subset`.
    pub fn parabolic_order(&self, subset: Subset) -> u64 {
        if let Some(&o) = self.orders.lock().expect("order lock").get(&subset) {
            return o;
        }
        let o = self.regular.orbit(0, &subset.indices()).len() as u64;
        self.orders.lock().expect("order lock").insert(subset, o);
        o
    }

    /// Elements of `G_I`, as points of the regular representation.
    pub fn parabolic_elements(&self, subset: Subset) -> HashSet<u32> {
        self.regular.orbit(0, &subset.indices()).into_iter().collect()
    }

    /// Coset table of `G` over `G_I`, enumerated once and cached.
    pub fn table(&self, subset: Subset) -> Result<Arc<CosetTable>, EnumError> {
        if let Some(t) = self.tables.lock().expect("table lock").get(&subset) {
            return Ok(t.clone());
        }
        let t = Arc::new(enumerate(
            &self.presentation,
            &parabolic_words(&subset.indices()),
            &self.options,
        )?);
        *self.enumerations.lock().expect("counter lock") += 1;
        let mut tables = self.tables.lock().expect("table lock");
        Ok(tables.entry(subset).or_insert(t).clone())
    }

    /// Enumerates the given subsets concurrently, filling the cache.
    pub fn prefetch(&self, subsets: &[Subset]) -> Result<(), EnumError> {
        subsets
            .par_iter()
            .try_for_each(|&s| self.table(s).map(|_| ()))
    }

    /// The subset whose coset action is used for `G_I ∩ G_J`: the one with
    /// the smaller index.
    fn acting_pair(&self, i: Subset, j: Subset) -> (Subset, Subset) {
        let (oi, oj) = (self.parabolic_order(i), self.parabolic_order(j));
        if oi > oj || (oi == oj && i > j) {
            (j, i)
        } else {
            (i, j)
        }
    }

    /// `|G_I ∩ G_J|`.
    pub fn intersection_order(&self, i: Subset, j: Subset) -> Result<u64, EnumError> {
        let (acting, base) = self.acting_pair(i, j);
        let table = self.table(base)?;
        let orbit = table.orbit(0, &acting.indices()).len() as u64;
        Ok(self.parabolic_order(acting) / orbit)
    }

    /// `|G_I ∩ G_J|` by intersecting element sets; used as an oracle.
    pub fn intersection_order_by_elements(&self, i: Subset, j: Subset) -> u64 {
        let a = self.parabolic_elements(i);
        self.regular
            .orbit(0, &j.indices())
            .into_iter()
            .filter(|x| a.contains(x))
            .count() as u64
    }

    fn evidence_row(&self, i: Subset, j: Subset) -> Result<EvidenceRow, EnumError> {
        Ok(EvidenceRow {
            i,
            j,
            intersection: self.intersection_order(i, j)?,
            meet: self.parabolic_order(i.meet(j)),
        })
    }

    pub fn involutions(&self) -> Vec<InvolutionStatus> {
        self.permutations()
            .iter()
            .map(|p| match p.order() {
                1 => InvolutionStatus::Collapsed,
                2 => InvolutionStatus::Involution,
                o => InvolutionStatus::Other(o as u64),
            })
            .collect()
    }

    /// Non-adjacent generators commute.
    pub fn string_property(&self) -> bool {
        let perms = self.permutations();
        let d = perms.len();
        (0..d).all(|i| {
            (i + 2..d).all(|j| {
                let ij = perms[i].then(&perms[j]);
                ij.then(&ij).is_identity()
            })
        })
    }

    /// Orders of `ρ_{i−1}ρᵢ`.
    pub fn schlafli_type(&self) -> Vec<u64> {
        let perms = self.permutations();
        (1..perms.len())
            .map(|i| perms[i - 1].then(&perms[i]).order() as u64)
            .collect()
    }

    /// Removing any generator strictly shrinks the generated group.
    pub fn minimal(&self) -> bool {
        let full = Subset::full(self.rank());
        (0..self.rank()).all(|i| self.parabolic_order(full.without(i)) < self.order())
    }

    /// Checks `G_I ∩ G_J = G_{I∩J}` over canonical subset pairs.
    pub fn intersection_full(&self, pruned: bool) -> Result<IntersectionReport, EnumError> {
        let before = self.enumerations();
        let pairs = canonical_pairs(self.rank(), pruned);
        let mut bases: Vec<Subset> = pairs.iter().map(|&(i, j)| self.acting_pair(i, j).1).collect();
        bases.sort();
        bases.dedup();
        self.prefetch(&bases)?;
        let evidence = pairs
            .into_iter()
            .map(|(i, j)| self.evidence_row(i, j))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(IntersectionReport {
            mode: if pruned {
                IntersectionMode::Pruned
            } else {
                IntersectionMode::Full
            },
            passed: evidence.iter().all(EvidenceRow::holds),
            evidence,
            enumerations: self.enumerations() - before,
        })
    }

    /// Checks the intersection property through generator intervals: for
    /// every interval `[a, b]` with at least three generators,
    /// `G_[a,b−1] ∩ G_[a+1,b] = G_[a+1,b−1]`, and for adjacent pairs that the
    /// two generators are distinct. This reduction is valid for sggis only,
    /// so a spec without the string property or with a non-involutory
    /// generator fails outright.
    pub fn intersection_recursive(&self) -> Result<IntersectionReport, EnumError> {
        let before = self.enumerations();
        let d = self.rank();
        let sggi = self.string_property()
            && self
                .involutions()
                .iter()
                .all(|s| *s == InvolutionStatus::Involution);
        let mut evidence = Vec::new();
        for a in 0..d.saturating_sub(1) {
            let (i, j) = (Subset::from_indices(&[a]), Subset::from_indices(&[a + 1]));
            evidence.push(EvidenceRow {
                i,
                j,
                intersection: self.intersection_order_by_elements(i, j),
                meet: 1,
            });
        }
        let mut intervals = Vec::new();
        for len in 3..=d {
            for a in 0..=d - len {
                let b = a + len - 1;
                intervals.push((Subset::interval(a, b - 1), Subset::interval(a + 1, b)));
            }
        }
        let bases: Vec<Subset> = intervals.iter().map(|&(i, j)| self.acting_pair(i, j).1).collect();
        self.prefetch(&bases)?;
        for (i, j) in intervals {
            evidence.push(self.evidence_row(i, j)?);
        }
        Ok(IntersectionReport {
            mode: IntersectionMode::Recursive,
            passed: sggi && evidence.iter().all(EvidenceRow::holds),
            evidence,
            enumerations: self.enumerations() - before,
        })
    }

    pub fn intersection(&self, mode: IntersectionMode) -> Result<IntersectionReport, EnumError> {
        match mode {
            IntersectionMode::Full => self.intersection_full(false),
            IntersectionMode::Pruned => self.intersection_full(true),
            IntersectionMode::Recursive => self.intersection_recursive(),
        }
    }

    /// Assembles the certificate.
    pub fn certify(&self, mode: IntersectionMode) -> Result<SggiCertificate, SggiError> {
        let involutions = self.involutions();
        let schlafli_type = self.schlafli_type();
        let relator_exponents = listed_exponents(&self.presentation);
        let report = self.intersection(mode)?;
        let rank = self.rank();
        let parabolic_orders = (0..1u32 << rank)
            .map(|m| (Subset(m).to_string(), self.parabolic_order(Subset(m))))
            .collect();
        let mut cert = SggiCertificate {
            rank,
            group_order: self.order(),
            schlafli_type,
            relator_exponents,
            involutions_ok: involutions.iter().all(|s| *s == InvolutionStatus::Involution),
            involutions,
            string_ok: self.string_property(),
            intersection_ok: report.passed,
            intersection_mode: mode,
            parabolic_orders,
            intersection_evidence: report.evidence,
            minimal: self.minimal(),
            degenerate: false,
            tight: false,
            enumerations: self.enumerations(),
        };
        cert.degenerate = cert.schlafli_type.contains(&2);
        cert.tight = cert.passes() && cert.group_order as u128 == cert.lower_bound();
        for i in cert.exponent_mismatches() {
            log::warn!(
                "relator exponent {} for (r{} r{}) exceeds its true order {}",
                cert.relator_exponents[i - 1].unwrap_or(0),
                i - 1,
                i,
                cert.schlafli_type[i - 1]
            );
        }
        Ok(cert)
    }

    /// Evaluates each relator of `source` with generator `j` replaced by
    /// `images[j]`, a word in this group's generators. Returns the first
    /// relator that does not map to the identity.
    pub fn kills_relators(&self, source: &Presentation, images: &[Word]) -> Result<(), SggiError> {
        if images.len() != source.generator_count() {
            return Err(SggiError::RankMismatch {
                left: source.generator_count(),
                right: images.len(),
            });
        }
        let perms: Vec<Permutation> = images
            .iter()
            .map(|w| self.evaluate(w))
            .collect::<Result<_, _>>()?;
        for r in source.relators() {
            if !evaluate(r, &perms)?.is_identity() {
                return Err(SggiError::RelatorNotKilled { relator: r.clone() });
            }
        }
        Ok(())
    }

    /// Order of the subgroup generated by the given elements.
    pub fn subgroup_order(&self, gens: &[Word]) -> Result<u64, SggiError> {
        let perms: Vec<Permutation> = gens
            .iter()
            .map(|w| self.evaluate(w))
            .collect::<Result<_, _>>()?;
        Ok(self.closure_size(&perms))
    }

    /// Size of the subgroup generated by `perms`, acting regularly: the orbit
    /// of the identity point.
    fn closure_size(&self, perms: &[Permutation]) -> u64 {
        let n = self.order() as usize;
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut stack = vec![0u32];
        let mut count = 1u64;
        while let Some(x) = stack.pop() {
            for p in perms {
                let y = p.apply(x);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count
    }

    /// Whether `⟨w⟩` is normal: every generator conjugates `w` to a power
    /// of `w`.
    pub fn cyclic_is_normal(&self, w: &Word) -> Result<bool, SggiError> {
        let all: Vec<usize> = (0..self.rank()).collect();
        self.cyclic_is_normal_in(w, &all)
    }

    /// Whether `⟨w⟩` is normal in `⟨ρᵢ : i ∈ gens⟩`, which must contain `w`.
    pub fn cyclic_is_normal_in(&self, w: &Word, gens: &[usize]) -> Result<bool, SggiError> {
        let x = self.evaluate(w)?;
        let powers: HashSet<Permutation> = cyclic_powers(&x).into_iter().collect();
        let perms = self.permutations();
        Ok(gens.iter().all(|&g| powers.contains(&x.conjugate_by(&perms[g]))))
    }

    /// Stabilizer-chain order of the regular representation.
    pub fn chain_order(&self) -> u128 {
        PermutationGroup::new(self.order() as usize, self.permutations().to_vec())
            .expect("regular representation fits the domain cap")
            .order()
    }
}

fn cyclic_powers(x: &Permutation) -> Vec<Permutation> {
    let mut out = vec![Permutation::identity(x.degree())];
    let mut y = x.clone();
    while !y.is_identity() {
        out.push(y.clone());
        y = y.then(x);
    }
    out
}

/// Distinct unordered subset pairs in the order (|I|+|J|, I, J), skipping
/// comparable pairs when `pruned`.
pub fn canonical_pairs(rank: usize, pruned: bool) -> Vec<(Subset, Subset)> {
    let subsets: Vec<Subset> = (0..1u32 << rank).map(Subset).collect();
    let mut pairs = Vec::new();
    for (a, &i) in subsets.iter().enumerate() {
        for &j in &subsets[a + 1..] {
            let (i, j) = if i.indices() <= j.indices() { (i, j) } else { (j, i) };
            if pruned && (i.is_subset_of(j) || j.is_subset_of(i)) {
                continue;
            }
            pairs.push((i, j));
        }
    }
    pairs.sort_by_key(|&(i, j)| (i.len() + j.len(), i.indices(), j.indices()));
    pairs
}

/// For each adjacent pair `(i−1, i)`, the exponent `e` of a relator spelled
/// exactly `(r_{i−1} r_i)^e`, if any.
fn listed_exponents(p: &Presentation) -> Vec<Option<u64>> {
    let d = p.generator_count();
    (1..d)
        .map(|i| {
            let unit = Word::from_generators(&[i as u32 - 1, i as u32]);
            p.relators().iter().find_map(|r| {
                let e = r.len() / 2;
                (e > 0 && r.len() % 2 == 0 && power(&unit, e as u64) == *r).then_some(e as u64)
            })
        })
        .collect()
}

/// Certifies `spec` with the given enumeration options and intersection mode.
pub fn certify(
    spec: &SggiSpec,
    options: &EnumerationOptions,
    mode: IntersectionMode,
) -> Result<(GroupContext, SggiCertificate), SggiError> {
    let ctx = GroupContext::new(spec.presentation().clone(), *options)?;
    let cert = ctx.certify(mode)?;
    Ok((ctx, cert))
}

/// `|G_I ∩ G_J|` for the group presented by `p`.
pub fn parabolic_intersection_order(
    p: &Presentation,
    i: &[usize],
    j: &[usize],
    options: &EnumerationOptions,
) -> Result<u64, SggiError> {
    for &x in i.iter().chain(j) {
        if x >= p.generator_count() {
            return Err(SggiError::Word(crate::error::WordError::GeneratorOutOfRange {
                index: x as u32,
                count: p.generator_count(),
            }));
        }
    }
    let ctx = GroupContext::new(p.clone(), *options)?;
    Ok(ctx.intersection_order(Subset::from_indices(i), Subset::from_indices(j))?)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientVerdict {
    /// Order of `Γ_{d−1} = ⟨ρ₀..ρ_{d−2}⟩` and of its image.
    pub facet_orders: (u64, u64),
    /// Order of `Γ₀ = ⟨ρ₁..ρ_{d−1}⟩` and of its image.
    pub vertex_figure_orders: (u64, u64),
    pub passes: bool,
}

/// The quotient criterion: `Γ` is a string C-group when `ρⱼ ↦ σ_{mapping[j]}`
/// extends to a homomorphism onto the certified string C-group `Δ` that is
/// injective on the facet or the vertex-figure subgroup. Injectivity is
/// decided by comparing subgroup orders.
pub fn quotient_criterion(
    gamma: &GroupContext,
    delta: &GroupContext,
    delta_certificate: &SggiCertificate,
    mapping: &[usize],
) -> Result<QuotientVerdict, SggiError> {
    let d = gamma.rank();
    if delta.rank() != d {
        return Err(SggiError::RankMismatch {
            left: d,
            right: delta.rank(),
        });
    }
    if mapping.len() != d {
        return Err(SggiError::BadMapping(d));
    }
    let mut seen = vec![false; d];
    for &m in mapping {
        if m >= d || std::mem::replace(&mut seen[m], true) {
            return Err(SggiError::BadMapping(d));
        }
    }
    if !delta_certificate.passes() || delta_certificate.group_order != delta.order() {
        return Err(SggiError::TargetNotCertified);
    }
    let images: Vec<Word> = mapping.iter().map(|&m| Word::generator(m as u32)).collect();
    delta.kills_relators(gamma.presentation(), &images)?;
    let facet: Vec<usize> = (0..d - 1).collect();
    let vertex: Vec<usize> = (1..d).collect();
    let image_order = |idx: &[usize]| -> Result<u64, SggiError> {
        delta.subgroup_order(&idx.iter().map(|&j| images[j].clone()).collect::<Vec<_>>())
    };
    let facet_orders = (
        gamma.parabolic_order(Subset::from_indices(&facet)),
        image_order(&facet)?,
    );
    let vertex_figure_orders = (
        gamma.parabolic_order(Subset::from_indices(&vertex)),
        image_order(&vertex)?,
    );
    Ok(QuotientVerdict {
        facet_orders,
        vertex_figure_orders,
        passes: facet_orders.0 == facet_orders.1 || vertex_figure_orders.0 == vertex_figure_orders.1,
    })
}

/// Outcome of the commutator-identity checks on one generator triple.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TripleReport {
    pub triple: [usize; 3],
    pub hypotheses: bool,
    pub conclusions: bool,
}

/// For each consecutive generator triple `(a, b, c)`, in both directions:
/// if `a² = b² = c² = (ac)² = [(ab)², c] = 1` then checks
/// `[a,(bc)²] = [a,(bc)⁴] = [(ab)⁴,c] = 1` and that `⟨(ab)²⟩` and `⟨(bc)²⟩`
/// are normal in `⟨a, b, c⟩`.
pub fn commutator_identities(ctx: &GroupContext) -> Result<Vec<TripleReport>, SggiError> {
    let d = ctx.rank();
    let mut out = Vec::new();
    for i in 0..d.saturating_sub(2) {
        for triple in [[i, i + 1, i + 2], [i + 2, i + 1, i]] {
            let [a, b, c] = triple.map(|x| Word::generator(x as u32));
            let ab = a.mul(&b);
            let bc = b.mul(&c);
            let one = |w: &Word| ctx.evaluate(w).map(|p| p.is_identity());
            let hypotheses = one(&power(&a, 2))?
                && one(&power(&b, 2))?
                && one(&power(&c, 2))?
                && one(&power(&a.mul(&c), 2))?
                && one(&commutator(&power(&ab, 2), &c))?;
            let conclusions = hypotheses
                && one(&commutator(&a, &power(&bc, 2)))?
                && one(&commutator(&a, &power(&bc, 4)))?
                && one(&commutator(&power(&ab, 4), &c))?
                && ctx.cyclic_is_normal_in(&power(&ab, 2), &triple)?
                && ctx.cyclic_is_normal_in(&power(&bc, 2), &triple)?;
            out.push(TripleReport {
                triple,
                hypotheses,
                conclusions,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{coxeter_string_presentation, tight_quotient_presentation};

    fn opts() -> EnumerationOptions {
        EnumerationOptions::default()
    }

    fn pres(d: usize, rels: &[&str]) -> Presentation {
        Presentation::new(d, rels.iter().map(|r| r.parse().unwrap()).collect()).unwrap()
    }

    #[test]
    fn canonical_pair_order() {
        let pairs = canonical_pairs(2, false);
        let text: Vec<String> = pairs.iter().map(|(i, j)| format!("{i}{j}")).collect();
        assert_eq!(text, ["{}{0}", "{}{1}", "{}{0,1}", "{0}{1}", "{0}{0,1}", "{0,1}{1}"]);
        assert_eq!(canonical_pairs(3, false).len(), 28);
        assert_eq!(canonical_pairs(2, true).len(), 1);
    }

    #[test]
    fn tight_square_tiling_quotient() {
        let p = tight_quotient_presentation(&[4, 4]).unwrap();
        let (ctx, cert) = certify(&SggiSpec::new(p), &opts(), IntersectionMode::Full).unwrap();
        assert_eq!(cert.group_order, 32);
        assert_eq!(cert.schlafli_type, vec![4, 4]);
        assert!(cert.passes() && cert.tight && cert.minimal && !cert.degenerate);
        let i = Subset::from_indices(&[0, 1]);
        let j = Subset::from_indices(&[1, 2]);
        assert_eq!(ctx.intersection_order(i, j).unwrap(), 2);
        assert_eq!(ctx.intersection_order(i, i).unwrap(), 8);
    }

    #[test]
    fn collapsed_generators() {
        let p = pres(2, &["r0^2", "r1^2", "r0 r1"]);
        let ctx = GroupContext::new(p, opts()).unwrap();
        assert_eq!(ctx.order(), 2);
        assert_eq!(ctx.involutions(), vec![InvolutionStatus::Involution; 2]);
        assert!(!ctx.minimal());
        let one = GroupContext::new(pres(1, &["r0"]), opts()).unwrap();
        assert_eq!(one.involutions(), vec![InvolutionStatus::Collapsed]);
    }

    #[test]
    fn string_property_failure() {
        let p = coxeter_string_presentation(&[3, 3]).unwrap();
        // With (r0 r2)^3 the triangle group is infinite.
        let affine = pres(
            3,
            &["r0^2", "r1^2", "r2^2", "r0 r1 r0 r1 r0 r1", "r1 r2 r1 r2 r1 r2", "r0 r2 r0 r2 r0 r2"],
        );
        let small = EnumerationOptions::new(
            crate::coset::EnumerationLimits::with_max_cosets(1 << 14),
            Default::default(),
        );
        assert!(matches!(
            GroupContext::new(affine, small),
            Err(EnumError::LimitExceeded { .. })
        ));
        let bad = pres(
            3,
            &["r0^2", "r1^2", "r2^2", "r0 r1 r0 r1 r0 r1", "r1 r2 r1 r2", "r0 r2 r0 r2 r0 r2"],
        );
        assert!(GroupContext::new(p, opts()).unwrap().string_property());
        let ctx = GroupContext::new(bad, opts()).unwrap();
        assert_eq!(ctx.order(), 24);
        assert!(!ctx.string_property());
        assert!(!ctx.intersection_recursive().unwrap().passed);
        let rank_two = GroupContext::new(coxeter_string_presentation(&[5]).unwrap(), opts()).unwrap();
        assert!(rank_two.string_property());
    }

    #[test]
    fn adjoined_central_generator_fails_both_checks() {
        // D8 = <a, b> with c = (ab)^2 appended as a third generator.
        let p = pres(3, &["r0^2", "r1^2", "r2^2", "r0 r1 r0 r1 r0 r1 r0 r1", "r2^-1 r0 r1 r0 r1"]);
        let ctx = GroupContext::new(p, opts()).unwrap();
        assert_eq!(ctx.order(), 8);
        assert!(ctx.string_property());
        let full = ctx.intersection_full(false).unwrap();
        assert!(!full.passed);
        assert!(!ctx.intersection_full(true).unwrap().passed);
        assert!(!ctx.intersection_recursive().unwrap().passed);
        let bad: Vec<_> = full.evidence.iter().filter(|r| !r.holds()).collect();
        assert!(bad
            .iter()
            .any(|r| r.i == Subset::from_indices(&[0, 1]) && r.j == Subset::from_indices(&[2])));
    }

    #[test]
    fn rank_two_recursive_is_trivial() {
        let ctx = GroupContext::new(coxeter_string_presentation(&[4]).unwrap(), opts()).unwrap();
        let r = ctx.intersection_recursive().unwrap();
        assert!(r.passed);
        assert_eq!(r.enumerations, 0);
    }

    #[test]
    fn orbit_formula_matches_element_sets() {
        let ctx = GroupContext::new(tight_quotient_presentation(&[4, 8]).unwrap(), opts()).unwrap();
        for (i, j) in canonical_pairs(3, false) {
            assert_eq!(
                ctx.intersection_order(i, j).unwrap(),
                ctx.intersection_order_by_elements(i, j),
                "{i} {j}"
            );
        }
    }

    #[test]
    fn quotient_criterion_identity_and_mismatch() {
        let p = tight_quotient_presentation(&[4, 4]).unwrap();
        let (ctx, cert) = certify(&SggiSpec::new(p.clone()), &opts(), IntersectionMode::Full).unwrap();
        let gamma = GroupContext::new(p, opts()).unwrap();
        let v = quotient_criterion(&gamma, &ctx, &cert, &[0, 1, 2]).unwrap();
        assert!(v.passes);
        let four = GroupContext::new(tight_quotient_presentation(&[4, 4, 4]).unwrap(), opts()).unwrap();
        assert!(matches!(
            quotient_criterion(&four, &ctx, &cert, &[0, 1, 2, 3]),
            Err(SggiError::RankMismatch { .. })
        ));
        assert!(matches!(
            quotient_criterion(&gamma, &ctx, &cert, &[0, 0, 2]),
            Err(SggiError::BadMapping(3))
        ));
        // The square tiling quotient is self-dual.
        assert!(quotient_criterion(&gamma, &ctx, &cert, &[2, 1, 0]).unwrap().passes);
    }

    #[test]
    fn relator_not_killed_is_reported() {
        // (r0 r1)^4 holds in the source but not in the target.
        let small = GroupContext::new(tight_quotient_presentation(&[4, 4]).unwrap(), opts()).unwrap();
        let (big, cert) = certify(
            &SggiSpec::new(tight_quotient_presentation(&[8, 4]).unwrap()),
            &opts(),
            IntersectionMode::Full,
        )
        .unwrap();
        let err = quotient_criterion(&small, &big, &cert, &[0, 1, 2]).unwrap_err();
        assert!(matches!(err, SggiError::RelatorNotKilled { .. }));
    }

    #[test]
    fn exponent_mismatch_detected() {
        // (r0 r1)^6 listed, but r0 r1 has order 2 because of (r0 r1)^4 too.
        let p = pres(2, &["r0^2", "r1^2", "r0 r1 r0 r1 r0 r1 r0 r1 r0 r1 r0 r1", "r0 r1 r0 r1 r0 r1 r0 r1"]);
        let (_, cert) = certify(&SggiSpec::new(p), &opts(), IntersectionMode::Full).unwrap();
        assert_eq!(cert.schlafli_type, vec![2]);
        assert_eq!(cert.relator_exponents, vec![Some(6)]);
        assert_eq!(cert.exponent_mismatches(), vec![1]);
        assert!(cert.degenerate);
    }
}
