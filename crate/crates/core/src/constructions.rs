//! The presentation families: string Coxeter groups, their tight quotients,
//! the rank-3 family H, the rank-d family G and the auxiliary groups K, L, M
//! and A used in its order computation.
//!
//! Relators are listed in a fixed order: involutions, adjacent-pair powers by
//! position, non-adjacent squares in lexicographic order, the commutator
//! families by index, and the parity-dependent tail last.

use serde::{Deserialize, Serialize};

use crate::error::ParamError;
use crate::words::{commutator, power, Presentation, Word};

/// Largest accepted exponent in `2^k`; keeps relator lengths addressable.
pub const MAX_EXPONENT: u32 = 24;

/// Parameters `(d, n, k₁..k_{d−1})` with derived `l = n − Σk`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct FamilyParams {
    d: usize,
    n: u32,
    k: Vec<u32>,
}

impl FamilyParams {
    /// Validated against the full hypotheses: `d ≥ 3`, `n ≥ 10`, `kᵢ ≥ 2`,
    /// `Σk ≤ n − 1`.
    pub fn new(d: usize, n: u32, k: Vec<u32>) -> Result<Self, ParamError> {
        let p = Self::unchecked(d, n, k)?;
        if n < 10 {
            return Err(ParamError::new(format!(
                "n = {n} is below 10; pass the unsafe-params override to explore it"
            )));
        }
        Ok(p)
    }

    /// Validated structurally only (`n ≥ 10` is not enforced).
    pub fn unchecked(d: usize, n: u32, k: Vec<u32>) -> Result<Self, ParamError> {
        if d < 3 {
            return Err(ParamError::new(format!("rank d = {d} must be at least 3")));
        }
        if k.len() != d - 1 {
            return Err(ParamError::new(format!(
                "rank {d} needs {} entries in k, got {}",
                d - 1,
                k.len()
            )));
        }
        check_exponents(&k)?;
        let sum: u32 = k.iter().sum();
        if sum + 1 > n {
            return Err(ParamError::new(format!(
                "k sums to {sum} but must be at most n - 1 = {}",
                n as i64 - 1
            )));
        }
        if n - sum > 2 * MAX_EXPONENT {
            return Err(ParamError::new(format!("l = {} is too large", n - sum)));
        }
        Ok(FamilyParams { d, n, k })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn k(&self) -> &[u32] {
        &self.k
    }

    pub fn sum_k(&self) -> u32 {
        self.k.iter().sum()
    }

    pub fn l(&self) -> u32 {
        self.n - self.sum_k()
    }

    /// Whether the parameters satisfy the hypotheses of the main theorem.
    pub fn within_theorem(&self) -> bool {
        self.n >= 10
    }

    /// Parameters of the group A: rank `d − 1`, exponent `n − k₁`, entries
    /// `k₂..k_{d−1}`, same `l`. Requires `d ≥ 4`.
    pub fn reduced(&self) -> Result<FamilyParams, ParamError> {
        if self.d < 4 {
            return Err(ParamError::new("the reduced group needs rank at least 4"));
        }
        FamilyParams::unchecked(self.d - 1, self.n - self.k[0], self.k[1..].to_vec())
    }
}

fn check_exponents(k: &[u32]) -> Result<(), ParamError> {
    for (i, &ki) in k.iter().enumerate() {
        if ki < 2 {
            return Err(ParamError::new(format!("k{} = {ki} must be at least 2", i + 1)));
        }
        if ki > MAX_EXPONENT {
            return Err(ParamError::new(format!(
                "k{} = {ki} exceeds the supported maximum {MAX_EXPONENT}",
                i + 1
            )));
        }
    }
    Ok(())
}

fn g(i: usize) -> Word {
    Word::generator(i as u32)
}

fn pair(i: usize, j: usize) -> Word {
    Word::from_generators(&[i as u32, j as u32])
}

/// Involutions, adjacent powers `(ρᵢρᵢ₊₁)^{e_{i+1}}`, non-adjacent squares,
/// on generators `0..rank`.
fn string_relators(rank: usize, exponents: &[u64]) -> Vec<Word> {
    let mut out: Vec<Word> = (0..rank).map(|i| power(&g(i), 2)).collect();
    for (l, &e) in exponents.iter().enumerate().take(rank - 1) {
        out.push(power(&pair(l, l + 1), e));
    }
    for j in 0..rank {
        for k in j + 2..rank {
            out.push(power(&pair(j, k), 2));
        }
    }
    out
}

fn two_powers(k: &[u32]) -> Vec<u64> {
    k.iter().map(|&ki| 1u64 << ki).collect()
}

/// `[(ρᵢρᵢ₊₁)², ρᵢ₊₂]` for `i` in `0..count`.
fn r2(count: usize) -> Vec<Word> {
    (0..count)
        .map(|i| commutator(&power(&pair(i, i + 1), 2), &g(i + 2)))
        .collect()
}

/// `[ρ_{d−3}, (ρ_{d−2}ρ_{d−1})⁴]` and `[(ρ_{d−3}ρ_{d−2})⁴, ρ_{d−1}]`.
fn r3(d: usize) -> [Word; 2] {
    let (a, b, c) = (d - 3, d - 2, d - 1);
    [
        commutator(&g(a), &power(&pair(b, c), 4)),
        commutator(&power(&pair(a, b), 4), &g(c)),
    ]
}

/// Tail relator for the last three generators `a, b, c` of a rank-`d` group.
fn tail(d: usize, l: u32) -> Word {
    let (a, b, c) = (d - 3, d - 2, d - 1);
    let ab2 = power(&pair(a, b), 2);
    if l % 2 == 1 {
        power(&commutator(&ab2, &g(c)), 1 << ((l - 1) / 2))
    } else {
        power(&commutator(&ab2, &power(&pair(b, c), 2)), 1 << ((l - 2) / 2))
    }
}

fn presentation(rank: usize, relators: Vec<Word>) -> Presentation {
    Presentation::new(rank, relators).expect("relators use only the listed generators")
}

/// The string Coxeter group `[k₁, …, k_{d−1}]`.
pub fn coxeter_string_presentation(k: &[u32]) -> Result<Presentation, ParamError> {
    if k.is_empty() {
        return Err(ParamError::new("a string Coxeter group needs at least one entry"));
    }
    if let Some(bad) = k.iter().position(|&ki| ki < 2) {
        return Err(ParamError::new(format!("k{} = {} must be at least 2", bad + 1, k[bad])));
    }
    let exps: Vec<u64> = k.iter().map(|&x| x as u64).collect();
    Ok(presentation(k.len() + 1, string_relators(k.len() + 1, &exps)))
}

/// The tight quotient of `[k₁, …, k_{d−1}]` by `[ρᵢ, (ρᵢ₊₁ρᵢ₊₂)²]` and
/// `[(ρᵢρᵢ₊₁)², ρᵢ₊₂]` for `0 ≤ i ≤ d − 3`. Every entry must be even and
/// greater than 2.
pub fn tight_quotient_presentation(k: &[u32]) -> Result<Presentation, ParamError> {
    if let Some(bad) = k.iter().position(|&ki| ki <= 2 || ki % 2 == 1) {
        return Err(ParamError::new(format!(
            "k{} = {} must be even and greater than 2",
            bad + 1,
            k[bad]
        )));
    }
    let mut p = coxeter_string_presentation(k)?;
    let d = k.len() + 1;
    if d >= 3 {
        let first = (0..=d - 3).map(|i| commutator(&g(i), &power(&pair(i + 1, i + 2), 2)));
        let second = (0..=d - 3).map(|i| commutator(&power(&pair(i, i + 1), 2), &g(i + 2)));
        p = p
            .with_relators(first.chain(second))
            .expect("relators use only the listed generators");
    }
    Ok(p)
}

/// Validates `(n, s, t)` for the rank-3 family.
pub fn check_h_params(n: u32, s: u32, t: u32, unsafe_params: bool) -> Result<FamilyParams, ParamError> {
    if s + t >= n {
        return Err(ParamError::new(format!(
            "n - s - t = {} must be at least 1",
            n as i64 - s as i64 - t as i64
        )));
    }
    if unsafe_params {
        FamilyParams::unchecked(3, n, vec![s, t])
    } else {
        FamilyParams::new(3, n, vec![s, t])
    }
}

/// The rank-3 family H of order `2ⁿ` and type `{2ˢ, 2ᵗ}`.
pub fn family_h(n: u32, s: u32, t: u32) -> Result<Presentation, ParamError> {
    let p = check_h_params(n, s, t, false)?;
    Ok(h_presentation(&p))
}

fn h_presentation(p: &FamilyParams) -> Presentation {
    let mut rels = string_relators(3, &two_powers(p.k()));
    rels.push(commutator(&power(&pair(0, 1), 4), &g(2)));
    rels.push(commutator(&g(0), &power(&pair(1, 2), 4)));
    rels.push(tail(3, p.l()));
    presentation(3, rels)
}

fn g_relators(p: &FamilyParams) -> Vec<Word> {
    let d = p.d();
    let mut rels = string_relators(d, &two_powers(p.k()));
    rels.extend(r2(d.saturating_sub(3)));
    rels.extend(r3(d));
    rels.push(tail(d, p.l()));
    rels
}

/// The family G of order `2ⁿ`. Rank 3 gives the family H.
pub fn family_g(p: &FamilyParams) -> Presentation {
    if p.d() == 3 {
        return h_presentation(p);
    }
    presentation(p.d(), g_relators(p))
}

/// `K = ⟨ρ₀..ρ_{d−1} | R1, R2, [(ρ_{d−3}ρ_{d−2})², ρ_{d−1}]⟩`.
pub fn family_k(d: usize, k: &[u32]) -> Result<Presentation, ParamError> {
    if d < 3 || k.len() + 1 != d {
        return Err(ParamError::new(format!("rank {d} with {} entries in k", k.len())));
    }
    check_exponents(k)?;
    if d == 3 {
        log::warn!("family K at rank 3 has no R2 relators");
    }
    let mut rels = string_relators(d, &two_powers(k));
    rels.extend(r2(d - 3));
    rels.push(commutator(&power(&pair(d - 3, d - 2), 2), &g(d - 1)));
    Ok(presentation(d, rels))
}

/// `L = ⟨ρ₀..ρ_{d−2} | R̄1, R2⟩`, using `k₁..k_{d−2}`.
pub fn family_l(d: usize, k: &[u32]) -> Result<Presentation, ParamError> {
    if d < 4 || k.len() + 1 != d {
        return Err(ParamError::new(format!(
            "family L needs rank at least 4 and d - 1 entries in k (rank {d}, {} entries)",
            k.len()
        )));
    }
    check_exponents(k)?;
    let mut rels = string_relators(d - 1, &two_powers(&k[..d - 2]));
    rels.extend(r2(d - 3));
    Ok(presentation(d - 1, rels))
}

/// `M`: the relators of G together with `(ρ₀ρ₁)²`.
pub fn family_m(p: &FamilyParams) -> Presentation {
    family_g(p)
        .with_relators([power(&pair(0, 1), 2)])
        .expect("relators use only the listed generators")
}

/// `A` on the renumbered generators `ρ₁..ρ_{d−1}`, given the reduced
/// parameters (rank `d − 1`, exponent `n − k₁`, entries `k₂..k_{d−1}`).
pub fn family_a(reduced: &FamilyParams) -> Presentation {
    presentation(reduced.d(), g_relators(reduced))
}

/// `A` from the tuple `(l, k₂, …)` as listed in the small-case tables.
pub fn family_a_tuple(l: u32, k: &[u32]) -> Result<Presentation, ParamError> {
    let n = l + k.iter().sum::<u32>();
    if l < 1 {
        return Err(ParamError::new("l must be at least 1"));
    }
    Ok(family_a(&FamilyParams::unchecked(k.len() + 1, n, k.to_vec())?))
}

/// The generator `(ρ₀ρ₁)²` of N.
pub fn subgroup_n_words(_params: &FamilyParams) -> Vec<Word> {
    vec![power(&pair(0, 1), 2)]
}
