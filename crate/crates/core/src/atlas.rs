//! Instances, certificate records, the tab-separated atlas and parameter
//! sweeps.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::constructions::{
    check_h_params, coxeter_string_presentation, family_a, family_g, family_k, family_l, family_m,
    tight_quotient_presentation, FamilyParams,
};
use crate::coset::EnumerationOptions;
use crate::error::{ParamError, VerifyError};
use crate::polytope::{FaceLattice, GraphFormat};
use crate::sggi::{certify, EvidenceRow, GroupContext, IntersectionMode, SggiCertificate, SggiSpec};
use crate::words::{Presentation, Word};

pub const SCHEMA_VERSION: u32 = 1;

/// The small cases of the reduced group A, as `(l, k₂, …)`, grouped by rank
/// and then by `n − k₁`.
pub const SMALL_CASE_TUPLES: &[&[u32]] = &[
    &[1, 2, 2],
    &[1, 2, 3], &[1, 3, 2], &[2, 2, 2],
    &[1, 2, 4], &[1, 4, 2], &[1, 3, 3], &[2, 2, 3], &[2, 3, 2], &[3, 2, 2],
    &[1, 2, 5], &[1, 5, 2], &[1, 3, 4], &[1, 4, 3], &[2, 2, 4], &[2, 4, 2], &[2, 3, 3],
    &[3, 2, 3], &[3, 3, 2], &[4, 2, 2],
    &[1, 2, 6], &[1, 6, 2], &[1, 3, 5], &[1, 5, 3], &[1, 4, 4], &[2, 2, 5], &[2, 5, 2],
    &[2, 3, 4], &[2, 4, 3], &[3, 2, 4], &[3, 4, 2], &[3, 3, 3], &[4, 2, 3], &[4, 3, 2],
    &[5, 2, 2],
    &[1, 2, 2, 2],
    &[1, 3, 2, 2], &[1, 2, 3, 2], &[1, 2, 2, 3], &[2, 2, 2, 2],
    &[1, 4, 2, 2], &[1, 2, 4, 2], &[1, 2, 2, 4], &[1, 3, 3, 2], &[1, 3, 2, 3], &[1, 2, 3, 3],
    &[2, 3, 2, 2], &[2, 2, 3, 2], &[2, 2, 2, 3], &[3, 2, 2, 2],
    &[1, 2, 2, 2, 2],
];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    G,
    K,
    L,
    M,
    A,
    H,
    #[serde(rename = "coxeter")]
    Coxeter,
    #[serde(rename = "tight")]
    Tight,
}

impl Family {
    pub fn id(self) -> &'static str {
        match self {
            Family::G => "G",
            Family::K => "K",
            Family::L => "L",
            Family::M => "M",
            Family::A => "A",
            Family::H => "H",
            Family::Coxeter => "coxeter",
            Family::Tight => "tight",
        }
    }

    /// Whether the family is parameterised by `n`.
    pub fn uses_n(self) -> bool {
        matches!(self, Family::G | Family::M | Family::A | Family::H)
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

impl FromStr for Family {
    type Err = ParamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "g" => Family::G,
            "k" => Family::K,
            "l" => Family::L,
            "m" => Family::M,
            "a" => Family::A,
            "h" => Family::H,
            "coxeter" => Family::Coxeter,
            "tight" | "coxeter-tight" => Family::Tight,
            _ => return Err(ParamError::new(format!("unknown family {s:?}"))),
        })
    }
}

/// One member of a family. For H, `k = (s, t)` and `d = 3`; for A the
/// parameters are the reduced ones (`d` is the rank of A, `n` is `n − k₁`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Instance {
    pub family: Family,
    pub d: usize,
    pub n: Option<u32>,
    pub k: Vec<u32>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub unsafe_params: bool,
}

impl Instance {
    pub fn new(family: Family, d: usize, n: Option<u32>, k: Vec<u32>) -> Self {
        Instance {
            family,
            d,
            n: if family.uses_n() { n } else { None },
            k,
            unsafe_params: false,
        }
    }

    pub fn g(d: usize, n: u32, k: &[u32]) -> Self {
        Instance::new(Family::G, d, Some(n), k.to_vec())
    }

    pub fn h(n: u32, s: u32, t: u32) -> Self {
        Instance::new(Family::H, 3, Some(n), vec![s, t])
    }

    pub fn tight(k: &[u32]) -> Self {
        Instance::new(Family::Tight, k.len() + 1, None, k.to_vec())
    }

    /// The reduced group A for the tuple `(l, k₂, …)`.
    pub fn a_tuple(tuple: &[u32]) -> Self {
        Instance::new(
            Family::A,
            tuple.len(),
            Some(tuple.iter().sum()),
            tuple[1..].to_vec(),
        )
    }

    pub fn with_unsafe(mut self, unsafe_params: bool) -> Self {
        self.unsafe_params = unsafe_params;
        self
    }

    fn need_n(&self) -> Result<u32, ParamError> {
        self.n
            .ok_or_else(|| ParamError::new(format!("family {} needs n", self.family)))
    }

    fn check_rank(&self) -> Result<(), ParamError> {
        if self.k.len() + 1 != self.d {
            return Err(ParamError::new(format!(
                "rank {} needs {} entries in k, got {}",
                self.d,
                self.d.saturating_sub(1),
                self.k.len()
            )));
        }
        Ok(())
    }

    fn family_params(&self, theorem: bool) -> Result<FamilyParams, ParamError> {
        let n = self.need_n()?;
        if theorem && !self.unsafe_params {
            FamilyParams::new(self.d, n, self.k.clone())
        } else {
            FamilyParams::unchecked(self.d, n, self.k.clone())
        }
    }

    /// `n − Σk` where it is defined.
    pub fn l(&self) -> Option<u32> {
        let n = self.n?;
        n.checked_sub(self.k.iter().sum())
    }

    pub fn presentation(&self) -> Result<Presentation, ParamError> {
        self.check_rank()?;
        match self.family {
            Family::G => Ok(family_g(&self.family_params(true)?)),
            Family::M => {
                if self.d == 3 && !self.unsafe_params {
                    return Err(ParamError::new("family M needs rank at least 4"));
                }
                Ok(family_m(&self.family_params(true)?))
            }
            Family::A => Ok(family_a(&self.family_params(false)?)),
            Family::H => {
                if self.d != 3 {
                    return Err(ParamError::new("family H has rank 3"));
                }
                let p = check_h_params(self.need_n()?, self.k[0], self.k[1], self.unsafe_params)?;
                Ok(family_g(&p))
            }
            Family::K => family_k(self.d, &self.k),
            Family::L => family_l(self.d, &self.k),
            Family::Coxeter => coxeter_string_presentation(&self.k),
            Family::Tight => tight_quotient_presentation(&self.k),
        }
    }

    /// Order and type the construction is claimed to have, if any.
    pub fn expected(&self) -> Option<(u64, Vec<u64>)> {
        let pow = |e: u32| 1u64.checked_shl(e);
        let two_k = |k: &[u32]| k.iter().map(|&x| 1u64 << x).collect::<Vec<_>>();
        let sum: u32 = self.k.iter().sum();
        match self.family {
            Family::G | Family::H | Family::A => Some((pow(self.n?)?, two_k(&self.k))),
            Family::K => Some((pow(1 + sum)?, two_k(&self.k))),
            Family::L => {
                let k = &self.k[..self.k.len().checked_sub(1)?];
                Some((pow(1 + sum - self.k.last()?)?, two_k(k)))
            }
            Family::M => {
                let mut t = vec![2];
                t.extend(two_k(&self.k[1..]));
                Some((pow(self.n? - self.k.first()? + 1)?, t))
            }
            Family::Tight => {
                let order = self.k.iter().try_fold(2u64, |a, &x| a.checked_mul(x as u64))?;
                Some((order, self.k.iter().map(|&x| x as u64).collect()))
            }
            Family::Coxeter => None,
        }
    }

    pub fn within_theorem(&self) -> bool {
        match self.family {
            Family::G | Family::H => self.n.is_some_and(|n| n >= 10),
            Family::M => self.d >= 4 && self.n.is_some_and(|n| n >= 10),
            _ => true,
        }
    }

    /// `d=4 n=10 k=2,2,2`.
    pub fn params_text(&self) -> String {
        let mut s = format!("d={}", self.d);
        if let Some(n) = self.n {
            s += &format!(" n={n}");
        }
        s + &format!(" k={}", join(&self.k))
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.family, self.params_text())
    }
}

fn join<T: ToString>(xs: &[T]) -> String {
    xs.iter().map(T::to_string).collect::<Vec<_>>().join(",")
}

fn log2_exact(x: u64) -> Option<u32> {
    x.is_power_of_two().then(|| x.trailing_zeros())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub enumeration: EnumerationOptions,
    pub mode: IntersectionMode,
    /// Also run the other intersection check (recursive against full) and
    /// require the verdicts to agree.
    pub cross_check: bool,
    /// Build the face lattice and record the f-vector.
    pub polytope: bool,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            enumeration: EnumerationOptions::default(),
            mode: IntersectionMode::Full,
            cross_check: false,
            polytope: false,
        }
    }
}

/// The audit record written for one verified instance.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CertificateRecord {
    pub schema_version: u32,
    pub family: Family,
    pub d: usize,
    pub n: Option<u32>,
    pub k: Vec<u32>,
    pub l: Option<u32>,
    pub within_theorem: bool,
    pub relators: Vec<Word>,
    pub group_order: u64,
    pub order_log2: Option<u32>,
    #[serde(rename = "type")]
    pub schlafli_type: Vec<u64>,
    pub type_log2: Vec<Option<u32>>,
    pub expected_order: Option<u64>,
    pub expected_type: Option<Vec<u64>>,
    pub involutions_ok: bool,
    pub string_ok: bool,
    pub intersection_ok: bool,
    pub intersection_mode: IntersectionMode,
    pub modes_agree: Option<bool>,
    pub minimal: bool,
    pub degenerate: bool,
    pub tight: bool,
    pub exponent_mismatches: Vec<usize>,
    pub evidence_rows: usize,
    pub evidence_sha256: String,
    pub f_vector: Option<Vec<usize>>,
    pub passed: bool,
}

impl CertificateRecord {
    pub fn instance(&self) -> Instance {
        Instance {
            family: self.family,
            d: self.d,
            n: self.n,
            k: self.k.clone(),
            unsafe_params: !self.within_theorem,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("records serialize")
    }

    pub fn from_json(s: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(s)
    }

    pub fn matches_expected(&self) -> bool {
        self.expected_order.is_none_or(|o| o == self.group_order)
            && self.expected_type.as_ref().is_none_or(|t| *t == self.schlafli_type)
    }
}

/// Canonical text of an evidence list, one `I;J;|G_I ∩ G_J|;|G_{I∩J}|` line
/// per row.
pub fn evidence_text(rows: &[EvidenceRow]) -> String {
    rows.iter()
        .map(|r| format!("{};{};{};{}\n", join(&r.i.indices()), join(&r.j.indices()), r.intersection, r.meet))
        .collect()
}

pub fn evidence_digest(rows: &[EvidenceRow]) -> String {
    hex::encode(Sha256::digest(evidence_text(rows).as_bytes()))
}

pub struct Verification {
    pub record: CertificateRecord,
    pub certificate: SggiCertificate,
    pub context: GroupContext,
}

/// Builds, enumerates and certifies one instance.
pub fn verify(instance: &Instance, options: &VerifyOptions) -> Result<Verification, VerifyError> {
    let presentation = instance.presentation()?;
    let spec = SggiSpec::new(presentation.clone());
    let (ctx, cert) = certify(&spec, &options.enumeration, options.mode)?;
    let modes_agree = if options.cross_check {
        let other = match options.mode {
            IntersectionMode::Recursive => IntersectionMode::Full,
            _ => IntersectionMode::Recursive,
        };
        Some(ctx.intersection(other)?.passed == cert.intersection_ok)
    } else {
        None
    };
    let f_vector = if options.polytope && cert.passes() {
        Some(FaceLattice::build(&ctx, &cert)?.f_vector().to_vec())
    } else {
        None
    };
    let expected = instance.expected();
    let mut record = CertificateRecord {
        schema_version: SCHEMA_VERSION,
        family: instance.family,
        d: instance.d,
        n: instance.n,
        k: instance.k.clone(),
        l: instance.l(),
        within_theorem: instance.within_theorem(),
        relators: presentation.relators().to_vec(),
        group_order: cert.group_order,
        order_log2: log2_exact(cert.group_order),
        type_log2: cert.schlafli_type.iter().map(|&t| log2_exact(t)).collect(),
        schlafli_type: cert.schlafli_type.clone(),
        expected_order: expected.as_ref().map(|e| e.0),
        expected_type: expected.map(|e| e.1),
        involutions_ok: cert.involutions_ok,
        string_ok: cert.string_ok,
        intersection_ok: cert.intersection_ok,
        intersection_mode: cert.intersection_mode,
        modes_agree,
        minimal: cert.minimal,
        degenerate: cert.degenerate,
        tight: cert.tight,
        exponent_mismatches: cert.exponent_mismatches(),
        evidence_rows: cert.intersection_evidence.len(),
        evidence_sha256: evidence_digest(&cert.intersection_evidence),
        f_vector,
        passed: false,
    };
    record.passed = cert.passes() && record.matches_expected() && modes_agree != Some(false);
    Ok(Verification {
        record,
        certificate: cert,
        context: ctx,
    })
}

/// Hasse diagram of a certified instance.
pub fn hasse(instance: &Instance, options: &VerifyOptions, format: GraphFormat) -> Result<String, VerifyError> {
    let v = verify(instance, options)?;
    let lattice = FaceLattice::build(&v.context, &v.certificate)?;
    Ok(lattice.export_hasse(format))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Pass,
    Fail,
    ParamInvalid,
    LimitExceeded,
    Error,
}

impl RowStatus {
    pub fn id(self) -> &'static str {
        match self {
            RowStatus::Pass => "pass",
            RowStatus::Fail => "fail",
            RowStatus::ParamInvalid => "param-invalid",
            RowStatus::LimitExceeded => "limit-exceeded",
            RowStatus::Error => "error",
        }
    }
}

impl FromStr for RowStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "pass" => RowStatus::Pass,
            "fail" => RowStatus::Fail,
            "param-invalid" => RowStatus::ParamInvalid,
            "limit-exceeded" => RowStatus::LimitExceeded,
            "error" => RowStatus::Error,
            _ => return Err(format!("unknown status {s:?}")),
        })
    }
}

/// Verified values for one instance. Fields not computed (because the row
/// failed early) are `None`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtlasRow {
    pub instance: Instance,
    pub order: Option<u64>,
    pub schlafli_type: Vec<u64>,
    pub involutions_ok: Option<bool>,
    pub string_ok: Option<bool>,
    pub intersection_ok: Option<bool>,
    pub degenerate: Option<bool>,
    pub tight: Option<bool>,
    pub status: RowStatus,
    pub detail: String,
    pub millis: Option<u64>,
}

impl AtlasRow {
    pub fn from_record(r: &CertificateRecord, millis: Option<u64>) -> Self {
        let mut detail = Vec::new();
        if !r.matches_expected() {
            detail.push("order or type differs from the construction".to_string());
        }
        if r.modes_agree == Some(false) {
            detail.push("intersection modes disagree".to_string());
        }
        if !r.exponent_mismatches.is_empty() {
            detail.push(format!("exponent mismatch at {}", join(&r.exponent_mismatches)));
        }
        AtlasRow {
            instance: r.instance(),
            order: Some(r.group_order),
            schlafli_type: r.schlafli_type.clone(),
            involutions_ok: Some(r.involutions_ok),
            string_ok: Some(r.string_ok),
            intersection_ok: Some(r.intersection_ok),
            degenerate: Some(r.degenerate),
            tight: Some(r.tight),
            status: if r.passed { RowStatus::Pass } else { RowStatus::Fail },
            detail: detail.join("; "),
            millis,
        }
    }

    pub fn from_result(instance: &Instance, result: &Result<Verification, VerifyError>, millis: u64) -> Self {
        match result {
            Ok(v) => AtlasRow {
                instance: instance.clone(),
                ..AtlasRow::from_record(&v.record, Some(millis))
            },
            Err(e) => AtlasRow {
                instance: instance.clone(),
                order: None,
                schlafli_type: Vec::new(),
                involutions_ok: None,
                string_ok: None,
                intersection_ok: None,
                degenerate: None,
                tight: None,
                status: match e.reason() {
                    "param-invalid" => RowStatus::ParamInvalid,
                    "limit-exceeded" => RowStatus::LimitExceeded,
                    _ => RowStatus::Error,
                },
                detail: e.to_string(),
                millis: Some(millis),
            },
        }
    }
}

/// A parameter tuple that was not run, with the reason.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Skipped {
    pub instance: Instance,
    pub reason: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Atlas {
    pub rows: Vec<AtlasRow>,
    pub skipped: Vec<Skipped>,
}

pub const ATLAS_HEADER: &str = "family\td\tn\tk\tl\torder\torder_log2\ttype\tinvolutions\tstring\tintersection\tdegenerate\ttight\tstatus\tdetail\tmillis\tschema";

const SKIPPED_MARKER: &str = "# skipped";

fn cell<T: ToString>(x: &Option<T>) -> String {
    x.as_ref().map_or("-".to_string(), T::to_string)
}

fn parse_cell<T: FromStr>(s: &str) -> Result<Option<T>, String> {
    if s == "-" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|_| format!("bad cell {s:?}"))
}

fn parse_list(s: &str) -> Result<Vec<u64>, String> {
    if s.is_empty() || s == "-" {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|x| x.parse().map_err(|_| format!("bad list entry {x:?}")))
        .collect()
}

fn clean(s: &str) -> String {
    s.replace(['\t', '\n', '\r'], " ")
}

impl Atlas {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().all(|r| r.status == RowStatus::Pass)
    }

    /// Tab-separated text. With `timing` off the `millis` column is `-`,
    /// which is the canonical form used for comparisons.
    pub fn to_tsv(&self, timing: bool) -> String {
        let mut out = String::from(ATLAS_HEADER);
        out.push('\n');
        for r in &self.rows {
            let i = &r.instance;
            let fields = [
                i.family.to_string(),
                i.d.to_string(),
                cell(&i.n),
                join(&i.k),
                cell(&i.l()),
                cell(&r.order),
                cell(&r.order.and_then(log2_exact)),
                if r.schlafli_type.is_empty() { "-".into() } else { join(&r.schlafli_type) },
                cell(&r.involutions_ok),
                cell(&r.string_ok),
                cell(&r.intersection_ok),
                cell(&r.degenerate),
                cell(&r.tight),
                r.status.id().to_string(),
                if r.detail.is_empty() { "-".into() } else { clean(&r.detail) },
                if timing { cell(&r.millis) } else { "-".into() },
                SCHEMA_VERSION.to_string(),
            ];
            out.push_str(&fields.join("\t"));
            out.push('\n');
        }
        if !self.skipped.is_empty() {
            out.push_str(SKIPPED_MARKER);
            out.push('\n');
            for s in &self.skipped {
                let i = &s.instance;
                out.push_str(&format!(
                    "#\t{}\t{}\t{}\t{}\t{}\n",
                    i.family,
                    i.d,
                    cell(&i.n),
                    join(&i.k),
                    clean(&s.reason)
                ));
            }
        }
        out
    }

    pub fn canonical(&self) -> String {
        self.to_tsv(false)
    }

    pub fn parse_tsv(text: &str) -> Result<Atlas, String> {
        let mut lines = text.lines();
        if lines.next() != Some(ATLAS_HEADER) {
            return Err("missing or unexpected atlas header".into());
        }
        let mut atlas = Atlas::default();
        let mut in_skipped = false;
        for line in lines {
            if line == SKIPPED_MARKER {
                in_skipped = true;
                continue;
            }
            let f: Vec<&str> = line.split('\t').collect();
            let instance = |family: &str, d: &str, n: &str, k: &str| -> Result<Instance, String> {
                let family: Family = family.parse().map_err(|e: ParamError| e.to_string())?;
                let d = d.parse().map_err(|_| format!("bad rank {d:?}"))?;
                let n = parse_cell(n)?;
                let k = parse_list(k)?.into_iter().map(|x| x as u32).collect();
                Ok(Instance::new(family, d, n, k))
            };
            if in_skipped {
                if f.len() != 6 || f[0] != "#" {
                    return Err(format!("bad skipped line {line:?}"));
                }
                atlas.skipped.push(Skipped {
                    instance: instance(f[1], f[2], f[3], f[4])?,
                    reason: f[5].to_string(),
                });
                continue;
            }
            if f.len() != 17 {
                return Err(format!("expected 17 columns, got {}", f.len()));
            }
            atlas.rows.push(AtlasRow {
                instance: instance(f[0], f[1], f[2], f[3])?,
                order: parse_cell(f[5])?,
                schlafli_type: parse_list(f[7])?,
                involutions_ok: parse_cell(f[8])?,
                string_ok: parse_cell(f[9])?,
                intersection_ok: parse_cell(f[10])?,
                degenerate: parse_cell(f[11])?,
                tight: parse_cell(f[12])?,
                status: f[13].parse()?,
                detail: if f[14] == "-" { String::new() } else { f[14].to_string() },
                millis: parse_cell(f[15])?,
            });
        }
        Ok(atlas)
    }
}

/// A rectangular parameter range: every `kᵢ` ranges over `k` independently.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepSpec {
    pub family: Family,
    pub d: (usize, usize),
    pub n: (u32, u32),
    pub k: (u32, u32),
    pub unsafe_params: bool,
}

impl SweepSpec {
    /// Instances in lexicographic order, split into runnable ones and those
    /// failing parameter validation.
    pub fn instances(&self) -> (Vec<Instance>, Vec<Skipped>) {
        let mut all = BTreeSet::new();
        for d in self.d.0..=self.d.1 {
            if d < 2 {
                continue;
            }
            let ns: Vec<Option<u32>> = if self.family.uses_n() {
                (self.n.0..=self.n.1).map(Some).collect()
            } else {
                vec![None]
            };
            for n in ns {
                let mut k = vec![self.k.0; d - 1];
                if self.k.0 > self.k.1 {
                    continue;
                }
                loop {
                    all.insert(Instance::new(self.family, d, n, k.clone()).with_unsafe(self.unsafe_params));
                    let Some(pos) = (0..d - 1).rev().find(|&i| k[i] < self.k.1) else {
                        break;
                    };
                    k[pos] += 1;
                    for x in &mut k[pos + 1..] {
                        *x = self.k.0;
                    }
                }
            }
        }
        let mut run = Vec::new();
        let mut skipped = Vec::new();
        for i in all {
            match i.presentation() {
                Ok(_) => run.push(i),
                Err(e) => skipped.push(Skipped {
                    reason: e.to_string(),
                    instance: i,
                }),
            }
        }
        (run, skipped)
    }
}

/// Verifies `instances` on `jobs` threads (0 for the default) and returns
/// rows in input order.
pub fn run_rows(instances: &[Instance], options: &VerifyOptions, jobs: usize) -> Vec<AtlasRow> {
    let work = || {
        instances
            .par_iter()
            .map(|i| {
                let start = Instant::now();
                let result = verify(i, options);
                AtlasRow::from_result(i, &result, start.elapsed().as_millis() as u64)
            })
            .collect()
    };
    match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(pool) => pool.install(work),
        Err(_) => work(),
    }
}

pub fn sweep(spec: &SweepSpec, options: &VerifyOptions, jobs: usize) -> Atlas {
    let (instances, skipped) = spec.instances();
    Atlas {
        rows: run_rows(&instances, options, jobs),
        skipped,
    }
}

/// All tuples `(l, k₂, …, k_r)` with `l ≥ 1`, `kᵢ ≥ 2` and the given sum,
/// in lexicographic order.
pub fn a_tuples(rank: usize, total: u32) -> Vec<Vec<u32>> {
    fn rec(prefix: &mut Vec<u32>, left: usize, total: u32, out: &mut Vec<Vec<u32>>) {
        if left == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let min = if prefix.is_empty() { 1 } else { 2 };
        let rest_min = 2 * (left as u32 - 1);
        let mut x = min;
        while x + rest_min <= total {
            prefix.push(x);
            rec(prefix, left - 1, total - x, out);
            prefix.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    rec(&mut Vec::new(), rank, total, &mut out);
    out
}

/// The small-case tuples: rank 3 with `n − k₁` in `5..=9`, rank 4 with
/// `7..=9`, and rank 5 with `9`.
pub fn small_case_tuples() -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    for total in 5..=9 {
        out.extend(a_tuples(3, total));
    }
    for total in 7..=9 {
        out.extend(a_tuples(4, total));
    }
    out.extend(a_tuples(5, 9).into_iter().filter(|t| t == &[1, 2, 2, 2, 2]));
    out
}

/// Certifies A for every small-case tuple; each row also checks
/// `|A| = 2^{n−k₁}` against the construction.
pub fn paper_tables(options: &VerifyOptions, jobs: usize) -> Atlas {
    let instances: Vec<Instance> = small_case_tuples().iter().map(|t| Instance::a_tuple(t)).collect();
    Atlas {
        rows: run_rows(&instances, options, jobs),
        skipped: Vec::new(),
    }
}
