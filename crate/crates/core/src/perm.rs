//! Permutations and permutation groups backed by a stabilizer chain.
//!
//! Points are `0..degree`. Composition follows the right-action convention of
//! the rest of the crate: `p.then(q)` applies `p` first.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{PermError, WordError};
use crate::words::{evaluate, Word};

/// Largest supported domain.
pub const MAX_DEGREE: usize = 1 << 22;

/// Transversals are stored as explicit image arrays while `orbit * degree`
/// stays under this many entries; beyond it they are traced through the
/// Schreier tree on demand.
const EXPLICIT_TRANSVERSAL_BUDGET: usize = 1 << 25;

/// Seed used by the randomized Schreier–Sims variant unless overridden.
pub const DEFAULT_SEED: u64 = 0x5eed_2f0c;

const NONE: u32 = u32::MAX;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Permutation {
    images: Vec<u32>,
}

impl Permutation {
    pub fn identity(degree: usize) -> Self {
        Permutation {
            images: (0..degree as u32).collect(),
        }
    }

    pub fn from_images(images: Vec<u32>) -> Result<Self, PermError> {
        let n = images.len();
        if n > MAX_DEGREE {
            return Err(PermError::Capacity(n));
        }
        let mut seen = vec![false; n];
        for &x in &images {
            let x = x as usize;
            if x >= n || seen[x] {
                return Err(PermError::NotBijection(n));
            }
            seen[x] = true;
        }
        Ok(Permutation { images })
    }

    pub(crate) fn from_images_unchecked(images: Vec<u32>) -> Self {
        debug_assert!(Permutation::from_images(images.clone()).is_ok());
        Permutation { images }
    }

    /// Builds a permutation from disjoint cycles on `0..degree`.
    pub fn from_cycles(degree: usize, cycles: &[&[u32]]) -> Result<Self, PermError> {
        let mut images: Vec<u32> = (0..degree as u32).collect();
        for cycle in cycles {
            for (i, &x) in cycle.iter().enumerate() {
                let y = cycle[(i + 1) % cycle.len()];
                if x as usize >= degree || y as usize >= degree {
                    return Err(PermError::PointOutOfDomain {
                        point: x.max(y),
                        degree,
                    });
                }
                images[x as usize] = y;
            }
        }
        Permutation::from_images(images)
    }

    pub fn degree(&self) -> usize {
        self.images.len()
    }

    pub fn images(&self) -> &[u32] {
        &self.images
    }

    #[inline]
    pub fn apply(&self, x: u32) -> u32 {
        self.images[x as usize]
    }

    /// `self` followed by `other`.
    pub fn then(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.degree(), other.degree(), "degree mismatch");
        Permutation {
            images: self.images.iter().map(|&x| other.apply(x)).collect(),
        }
    }

    pub fn inverse(&self) -> Permutation {
        let mut images = vec![0; self.degree()];
        for (i, &x) in self.images.iter().enumerate() {
            images[x as usize] = i as u32;
        }
        Permutation { images }
    }

    pub fn is_identity(&self) -> bool {
        self.images.iter().enumerate().all(|(i, &x)| i as u32 == x)
    }

    pub fn pow(&self, mut e: u64) -> Permutation {
        let mut result = Permutation::identity(self.degree());
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                result = result.then(&base);
            }
            base = base.then(&base);
            e >>= 1;
        }
        result
    }

    /// Conjugate `other⁻¹ · self · other`.
    pub fn conjugate_by(&self, other: &Permutation) -> Permutation {
        other.inverse().then(self).then(other)
    }

    pub fn cycle_lengths(&self) -> Vec<usize> {
        let mut seen = vec![false; self.degree()];
        let mut lengths = Vec::new();
        for start in 0..self.degree() {
            if seen[start] {
                continue;
            }
            let mut len = 0;
            let mut x = start;
            while !seen[x] {
                seen[x] = true;
                x = self.images[x] as usize;
                len += 1;
            }
            lengths.push(len);
        }
        lengths
    }

    /// Multiplicative order, the lcm of the cycle lengths.
    ///
    /// # Panics
    ///
    /// Panics if the order does not fit in a `u128`.
    pub fn order(&self) -> u128 {
        self.cycle_lengths().into_iter().fold(1u128, |acc, len| {
            let len = len as u128;
            let g = gcd(acc, len);
            (acc / g).checked_mul(len).expect("permutation order overflows u128")
        })
    }

    pub fn moved_points(&self) -> impl Iterator<Item = u32> + '_ {
        self.images
            .iter()
            .enumerate()
            .filter(|&(i, &x)| i as u32 != x)
            .map(|(i, _)| i as u32)
    }
}

fn gcd(mut a: u128, mut b: u128) -> u128 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut seen = vec![false; self.degree()];
        let mut wrote = false;
        for start in 0..self.degree() {
            if seen[start] || self.images[start] as usize == start {
                continue;
            }
            f.write_str("(")?;
            let mut x = start;
            let mut first = true;
            while !seen[x] {
                seen[x] = true;
                if !first {
                    f.write_str(" ")?;
                }
                write!(f, "{x}")?;
                first = false;
                x = self.images[x] as usize;
            }
            f.write_str(")")?;
            wrote = true;
        }
        if !wrote {
            f.write_str("()")?;
        }
        Ok(())
    }
}

/// Schreier tree plus (when affordable) explicit coset representatives.
#[derive(Clone, Debug)]
struct Transversal {
    /// `(parent orbit position, strong generator index)`; the root has `NONE`.
    parent: Vec<(u32, u32)>,
    explicit: Option<Vec<u32>>,
}

#[derive(Clone, Debug)]
struct Level {
    base_point: u32,
    /// Indices into the strong generating set of generators fixing all
    /// earlier base points.
    gens: Vec<usize>,
    orbit: Vec<u32>,
    position: Vec<u32>,
    transversal: Transversal,
    /// Per orbit position, how many of `gens` have had their Schreier
    /// generator sifted.
    checked: Vec<usize>,
}

/// A base and strong generating set with transversals.
#[derive(Clone, Debug)]
pub struct StabilizerChain {
    degree: usize,
    strong_gens: Vec<Permutation>,
    levels: Vec<Level>,
    /// Orbit size of each point under the input generators; drives the
    /// base point choice.
    orbit_size: Vec<u32>,
}

impl StabilizerChain {
    /// Deterministic Schreier–Sims. `base_prefix` points come first in the
    /// base; further points are chosen by largest orbit, then smallest id.
    pub fn build(degree: usize, gens: &[Permutation], base_prefix: &[u32]) -> Self {
        let mut chain = StabilizerChain::init(degree, gens, base_prefix);
        chain.complete();
        chain
    }

    /// Randomized Schreier–Sims: sifts random elements until `patience`
    /// consecutive ones sift through. Monte Carlo; use
    /// [`StabilizerChain::verify_full`] to upgrade to a proof.
    pub fn build_random(
        degree: usize,
        gens: &[Permutation],
        base_prefix: &[u32],
        seed: u64,
        patience: usize,
    ) -> Self {
        let mut chain = StabilizerChain::init(degree, gens, base_prefix);
        if gens.iter().all(Permutation::is_identity) {
            return chain;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut pool: Vec<Permutation> = gens.to_vec();
        while pool.len() < 10 {
            pool.push(gens[pool.len() % gens.len()].clone());
        }
        let mut acc = Permutation::identity(degree);
        for _ in 0..50 {
            product_replacement_step(&mut pool, &mut acc, &mut rng);
        }
        let mut streak = 0;
        while streak < patience {
            product_replacement_step(&mut pool, &mut acc, &mut rng);
            let (residue, depth) = chain.strip(&acc, 0);
            if residue.is_identity() {
                streak += 1;
            } else {
                streak = 0;
                chain.add_strong_generator(residue, 0, depth);
            }
        }
        chain
    }

    fn init(degree: usize, gens: &[Permutation], base_prefix: &[u32]) -> Self {
        let orbit_size = orbit_sizes(degree, gens);
        let mut chain = StabilizerChain {
            degree,
            strong_gens: Vec::new(),
            levels: Vec::new(),
            orbit_size,
        };
        for &b in base_prefix {
            chain.push_level(b);
        }
        for g in gens {
            if g.is_identity() {
                continue;
            }
            chain.strong_gens.push(g.clone());
            let t = chain.strong_gens.len() - 1;
            let fixes_base = chain.levels.iter().all(|l| g.apply(l.base_point) == l.base_point);
            if fixes_base {
                let b = chain.choose_base_point(g);
                chain.push_level(b);
            }
            let depth = chain
                .levels
                .iter()
                .position(|l| g.apply(l.base_point) != l.base_point)
                .expect("generator moves a base point");
            for l in 0..=depth {
                chain.levels[l].gens.push(t);
            }
        }
        for l in 0..chain.levels.len() {
            chain.extend_orbit(l);
        }
        chain
    }

    fn choose_base_point(&self, g: &Permutation) -> u32 {
        g.moved_points()
            .max_by_key(|&x| (self.orbit_size[x as usize], std::cmp::Reverse(x)))
            .expect("non-identity permutation moves a point")
    }

    fn push_level(&mut self, base_point: u32) {
        let mut position = vec![NONE; self.degree];
        position[base_point as usize] = 0;
        let explicit = (self.degree <= EXPLICIT_TRANSVERSAL_BUDGET)
            .then(|| (0..self.degree as u32).collect::<Vec<_>>());
        self.levels.push(Level {
            base_point,
            gens: Vec::new(),
            orbit: vec![base_point],
            position,
            transversal: Transversal {
                parent: vec![(NONE, NONE)],
                explicit,
            },
            checked: vec![0],
        });
    }

    /// Closes the orbit of level `l` under its generators, recording new
    /// transversal elements.
    fn extend_orbit(&mut self, l: usize) {
        let n = self.degree;
        let level = &mut self.levels[l];
        let mut pos = 0;
        while pos < level.orbit.len() {
            let b = level.orbit[pos];
            for &t in &level.gens {
                let s = &self.strong_gens[t];
                let c = s.apply(b);
                if level.position[c as usize] != NONE {
                    continue;
                }
                level.position[c as usize] = level.orbit.len() as u32;
                level.orbit.push(c);
                level.checked.push(0);
                level.transversal.parent.push((pos as u32, t as u32));
                if let Some(arena) = level.transversal.explicit.as_mut() {
                    if arena.len() + n > EXPLICIT_TRANSVERSAL_BUDGET {
                        level.transversal.explicit = None;
                    } else {
                        let start = pos * n;
                        for x in 0..n {
                            let y = arena[start + x];
                            arena.push(s.apply(y));
                        }
                    }
                }
            }
            pos += 1;
        }
    }

    /// Images of the transversal element mapping the base point to the
    /// orbit point at `pos`.
    fn transversal_element(&self, l: usize, pos: usize) -> std::borrow::Cow<'_, [u32]> {
        let n = self.degree;
        let level = &self.levels[l];
        if let Some(arena) = &level.transversal.explicit {
            return std::borrow::Cow::Borrowed(&arena[pos * n..(pos + 1) * n]);
        }
        let mut path = Vec::new();
        let mut p = pos;
        while level.transversal.parent[p].0 != NONE {
            let (parent, t) = level.transversal.parent[p];
            path.push(t as usize);
            p = parent as usize;
        }
        let mut images: Vec<u32> = (0..n as u32).collect();
        for &t in path.iter().rev() {
            let s = &self.strong_gens[t];
            for y in images.iter_mut() {
                *y = s.apply(*y);
            }
        }
        std::borrow::Cow::Owned(images)
    }

    /// Sifts `g` through levels `from..`, returning the residue and the
    /// level at which sifting stopped (`levels.len()` if it went through).
    fn strip(&self, g: &Permutation, from: usize) -> (Permutation, usize) {
        let mut g = g.clone();
        for l in from..self.levels.len() {
            let level = &self.levels[l];
            let b = g.apply(level.base_point);
            let pos = level.position[b as usize];
            if pos == NONE {
                return (g, l);
            }
            let u = self.transversal_element(l, pos as usize);
            let mut u_inv = vec![0u32; self.degree];
            for (x, &y) in u.iter().enumerate() {
                u_inv[y as usize] = x as u32;
            }
            for y in g.images.iter_mut() {
                *y = u_inv[*y as usize];
            }
        }
        (g, self.levels.len())
    }

    fn add_strong_generator(&mut self, y: Permutation, from: usize, depth: usize) -> usize {
        let depth = if depth == self.levels.len() {
            let b = self.choose_base_point(&y);
            self.push_level(b);
            depth
        } else {
            depth
        };
        self.strong_gens.push(y);
        let t = self.strong_gens.len() - 1;
        for l in from..=depth {
            self.levels[l].gens.push(t);
            self.extend_orbit(l);
        }
        depth
    }

    /// Whether `u_b · s == u_c`, i.e. the Schreier generator is trivial.
    fn schreier_is_trivial(&self, l: usize, pos: usize, t: usize, cpos: usize) -> bool {
        let s = &self.strong_gens[t];
        let ub = self.transversal_element(l, pos);
        let uc = self.transversal_element(l, cpos);
        ub.iter().zip(uc.iter()).all(|(&x, &y)| s.apply(x) == y)
    }

    fn schreier_generator(&self, l: usize, pos: usize, t: usize, cpos: usize) -> Permutation {
        let s = &self.strong_gens[t];
        let ub = self.transversal_element(l, pos);
        let uc = self.transversal_element(l, cpos);
        let mut uc_inv = vec![0u32; self.degree];
        for (x, &y) in uc.iter().enumerate() {
            uc_inv[y as usize] = x as u32;
        }
        Permutation {
            images: ub.iter().map(|&x| uc_inv[s.apply(x) as usize]).collect(),
        }
    }

    fn complete(&mut self) {
        if self.levels.is_empty() {
            return;
        }
        let mut i = self.levels.len() - 1;
        'outer: loop {
            let mut pos = 0;
            while pos < self.levels[i].orbit.len() {
                while self.levels[i].checked[pos] < self.levels[i].gens.len() {
                    let q = self.levels[i].checked[pos];
                    self.levels[i].checked[pos] += 1;
                    let t = self.levels[i].gens[q];
                    let b = self.levels[i].orbit[pos];
                    let c = self.strong_gens[t].apply(b);
                    let cpos = self.levels[i].position[c as usize] as usize;
                    if self.levels[i].transversal.parent[cpos] == (pos as u32, t as u32) {
                        continue;
                    }
                    if self.schreier_is_trivial(i, pos, t, cpos) {
                        continue;
                    }
                    let h = self.schreier_generator(i, pos, t, cpos);
                    let (y, depth) = self.strip(&h, i + 1);
                    if !y.is_identity() {
                        i = self.add_strong_generator(y, i + 1, depth);
                        continue 'outer;
                    }
                }
                pos += 1;
            }
            if i == 0 {
                break;
            }
            i -= 1;
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn base(&self) -> Vec<u32> {
        self.levels.iter().map(|l| l.base_point).collect()
    }

    pub fn orbit_lengths(&self) -> Vec<usize> {
        self.levels.iter().map(|l| l.orbit.len()).collect()
    }

    pub fn strong_generators(&self) -> &[Permutation] {
        &self.strong_gens
    }

    /// Product of the basic orbit lengths.
    pub fn order(&self) -> u128 {
        self.levels.iter().fold(1u128, |acc, l| {
            acc.checked_mul(l.orbit.len() as u128)
                .expect("group order overflows u128")
        })
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        g.degree() == self.degree && self.strip(g, 0).0.is_identity()
    }

    /// Every strong generator sifts, and every Schreier generator of every
    /// level sifts through the levels below it.
    pub fn verify_full(&self) -> bool {
        if !self.strong_gens.iter().all(|g| self.contains(g)) {
            return false;
        }
        for (l, level) in self.levels.iter().enumerate() {
            for pos in 0..level.orbit.len() {
                for &t in &level.gens {
                    let c = self.strong_gens[t].apply(level.orbit[pos]);
                    let cpos = level.position[c as usize];
                    if cpos == NONE {
                        return false;
                    }
                    if self.schreier_is_trivial(l, pos, t, cpos as usize) {
                        continue;
                    }
                    let h = self.schreier_generator(l, pos, t, cpos as usize);
                    if !self.strip(&h, l + 1).0.is_identity() {
                        return false;
                    }
                }
            }
        }
        true
    }

    /// Sifts `samples` randomly chosen Schreier generators.
    pub fn verify_random(&self, samples: usize, seed: u64) -> bool {
        if !self.strong_gens.iter().all(|g| self.contains(g)) {
            return false;
        }
        if self.levels.is_empty() {
            return true;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let l = rng.random_range(0..self.levels.len());
            let level = &self.levels[l];
            if level.gens.is_empty() {
                continue;
            }
            let pos = rng.random_range(0..level.orbit.len());
            let t = level.gens[rng.random_range(0..level.gens.len())];
            let c = self.strong_gens[t].apply(level.orbit[pos]);
            let cpos = level.position[c as usize];
            if cpos == NONE {
                return false;
            }
            let h = self.schreier_generator(l, pos, t, cpos as usize);
            if !self.strip(&h, l + 1).0.is_identity() {
                return false;
            }
        }
        true
    }

    /// The chain of the stabilizer of the first base point.
    fn tail(&self) -> StabilizerChain {
        let mut levels: Vec<Level> = self.levels[1..].to_vec();
        // Level 1 generators first, so they stay a prefix of the strong set.
        let mut keep: Vec<usize> = levels.first().map(|l| l.gens.clone()).unwrap_or_default();
        for level in &levels {
            for &t in &level.gens {
                if !keep.contains(&t) {
                    keep.push(t);
                }
            }
        }
        let remap: std::collections::HashMap<usize, usize> =
            keep.iter().enumerate().map(|(new, &old)| (old, new)).collect();
        for level in &mut levels {
            for t in level.gens.iter_mut() {
                *t = remap[t];
            }
            for p in level.transversal.parent.iter_mut() {
                if p.1 != NONE {
                    p.1 = remap[&(p.1 as usize)] as u32;
                }
            }
        }
        let strong_gens: Vec<Permutation> = keep.iter().map(|&t| self.strong_gens[t].clone()).collect();
        StabilizerChain {
            degree: self.degree,
            orbit_size: orbit_sizes(self.degree, &strong_gens),
            strong_gens,
            levels,
        }
    }
}

fn product_replacement_step(pool: &mut [Permutation], acc: &mut Permutation, rng: &mut ChaCha8Rng) {
    let i = rng.random_range(0..pool.len());
    let mut j = rng.random_range(0..pool.len() - 1);
    if j >= i {
        j += 1;
    }
    let updated = if rng.random_bool(0.5) {
        pool[i].then(&pool[j])
    } else {
        pool[j].then(&pool[i])
    };
    pool[i] = updated;
    *acc = acc.then(&pool[i]);
}

/// Size of the orbit containing each point.
fn orbit_sizes(degree: usize, gens: &[Permutation]) -> Vec<u32> {
    let mut size = vec![0u32; degree];
    let mut seen = vec![false; degree];
    for start in 0..degree {
        if seen[start] {
            continue;
        }
        let orbit = orbit_of(start as u32, gens, &mut seen);
        for &x in &orbit {
            size[x as usize] = orbit.len() as u32;
        }
    }
    size
}

fn orbit_of(start: u32, gens: &[Permutation], seen: &mut [bool]) -> Vec<u32> {
    let mut orbit = vec![start];
    seen[start as usize] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = g.apply(x);
            if !seen[y as usize] {
                seen[y as usize] = true;
                orbit.push(y);
                queue.push_back(y);
            }
        }
    }
    orbit
}

/// A permutation group given by generators. The stabilizer chain is built
/// on first use and then shared.
#[derive(Clone, Debug)]
pub struct PermutationGroup {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabilizerChain>,
}

impl PermutationGroup {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self, PermError> {
        if degree > MAX_DEGREE {
            return Err(PermError::Capacity(degree));
        }
        if generators.iter().any(|g| g.degree() != degree) {
            return Err(PermError::DegreeMismatch);
        }
        Ok(PermutationGroup {
            degree,
            generators,
            chain: OnceLock::new(),
        })
    }

    pub fn trivial(degree: usize) -> Self {
        PermutationGroup {
            degree,
            generators: Vec::new(),
            chain: OnceLock::new(),
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    pub fn chain(&self) -> &StabilizerChain {
        self.chain
            .get_or_init(|| StabilizerChain::build(self.degree, &self.generators, &[]))
    }

    pub fn order(&self) -> u128 {
        self.chain().order()
    }

    pub fn contains(&self, g: &Permutation) -> bool {
        self.chain().contains(g)
    }

    pub fn orbit(&self, point: u32) -> Result<Vec<u32>, PermError> {
        self.check_point(point)?;
        let mut seen = vec![false; self.degree];
        Ok(orbit_of(point, &self.generators, &mut seen))
    }

    /// Order of the element named by `w` in the generators of this group.
    pub fn element_order(&self, w: &Word) -> Result<u128, WordError> {
        if w.is_empty() {
            return Ok(1);
        }
        Ok(evaluate(w, &self.generators)?.order())
    }

    /// The full stabilizer of `point`, with its chain already attached.
    pub fn stabilizer_of_point(&self, point: u32) -> Result<PermutationGroup, PermError> {
        self.check_point(point)?;
        let chain = StabilizerChain::build(self.degree, &self.generators, &[point]);
        let tail = chain.tail();
        let level_gens = tail.levels.first().map_or(0, |l| l.gens.len());
        let group = PermutationGroup {
            degree: self.degree,
            generators: tail.strong_gens[..level_gens].to_vec(),
            chain: OnceLock::new(),
        };
        let _ = group.chain.set(tail);
        Ok(group)
    }

    fn check_point(&self, point: u32) -> Result<(), PermError> {
        if point as usize >= self.degree {
            return Err(PermError::PointOutOfDomain {
                point,
                degree: self.degree,
            });
        }
        Ok(())
    }
}
