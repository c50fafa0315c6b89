//! Todd–Coxeter coset enumeration.
//!
//! Two strategies are provided: relator-based (HLT, with a lookahead pass
//! whenever the table reaches its current soft capacity) and
//! definition-based (Felsch). Both finish with an exhaustive scan of every
//! relator from every coset, and both standardize the finished table, so for
//! a given presentation and subgroup they produce identical tables.
//!
//! Generators whose square is listed verbatim as a relator get a single
//! self-inverse column.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::EnumError;
use crate::perm::Permutation;
use crate::words::{Letter, Presentation, Word};

const NONE: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Strategy {
    #[default]
    Hlt,
    Felsch,
}

impl std::str::FromStr for Strategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "hlt" => Ok(Strategy::Hlt),
            "felsch" => Ok(Strategy::Felsch),
            other => Err(format!("unknown strategy {other:?} (expected hlt or felsch)")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationLimits {
    /// Upper bound on allocated cosets, live and dead.
    pub max_cosets: usize,
    /// Size of the pending-deduction stack (Felsch). On overflow the stack is
    /// dropped and replaced by a full scan pass.
    pub max_deductions: usize,
}

impl Default for EnumerationLimits {
    fn default() -> Self {
        EnumerationLimits {
            max_cosets: 1 << 22,
            max_deductions: 1 << 20,
        }
    }
}

impl EnumerationLimits {
    pub fn with_max_cosets(max_cosets: usize) -> Self {
        EnumerationLimits {
            max_cosets: max_cosets.max(1),
            ..Default::default()
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumerationOptions {
    pub limits: EnumerationLimits,
    pub strategy: Strategy,
}

impl EnumerationOptions {
    pub fn new(limits: EnumerationLimits, strategy: Strategy) -> Self {
        EnumerationOptions { limits, strategy }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct EnumerationStats {
    pub definitions: u64,
    pub coincidences: u64,
    pub max_allocated: usize,
    pub lookaheads: u32,
    pub compactions: u32,
}

/// Column layout: every generator gets a forward column and, unless it is a
/// declared involution, an inverse column.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Columns {
    forward: Vec<u32>,
    backward: Vec<u32>,
    inverse_of: Vec<u32>,
}

impl Columns {
    fn new(p: &Presentation) -> Self {
        let mut forward = Vec::new();
        let mut backward = Vec::new();
        let mut inverse_of = Vec::new();
        for g in 0..p.generator_count() as u32 {
            let f = inverse_of.len() as u32;
            forward.push(f);
            if p.is_declared_involution(g) {
                backward.push(f);
                inverse_of.push(f);
            } else {
                backward.push(f + 1);
                inverse_of.push(f + 1);
                inverse_of.push(f);
            }
        }
        Columns {
            forward,
            backward,
            inverse_of,
        }
    }

    fn count(&self) -> usize {
        self.inverse_of.len()
    }

    fn of(&self, letter: Letter) -> u32 {
        let g = letter.generator.get();
        if letter.inverse {
            self.backward[g]
        } else {
            self.forward[g]
        }
    }

    /// Column sequence of `w`, cancelling `x x⁻¹` pairs (which for a
    /// self-inverse column includes `x x`). Cyclic cancellation is applied
    /// when `cyclic` is set.
    fn encode(&self, w: &Word, cyclic: bool) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::with_capacity(w.len());
        for &letter in w.letters() {
            let c = self.of(letter);
            if out.last() == Some(&self.inverse_of[c as usize]) {
                out.pop();
            } else {
                out.push(c);
            }
        }
        if cyclic {
            let mut start = 0;
            let mut end = out.len();
            while end - start >= 2 && out[end - 1] == self.inverse_of[out[start] as usize] {
                start += 1;
                end -= 1;
            }
            out = out[start..end].to_vec();
        }
        out
    }
}

/// A closed coset table: the action of the generators on the right cosets
/// of a subgroup. Coset `0` is the subgroup itself.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetTable {
    generator_count: usize,
    columns: Columns,
    rows: Vec<u32>,
    index: usize,
    stats: EnumerationStats,
}

impl CosetTable {
    /// Number of live cosets, i.e. the subgroup index.
    pub fn index(&self) -> usize {
        self.index
    }

    pub fn live_count(&self) -> usize {
        self.index
    }

    pub fn generator_count(&self) -> usize {
        self.generator_count
    }

    pub fn stats(&self) -> EnumerationStats {
        self.stats
    }

    /// Whether every entry is defined.
    pub fn is_closed(&self) -> bool {
        self.rows.iter().all(|&x| x != NONE)
    }

    fn width(&self) -> usize {
        self.columns.count()
    }

    /// Image of `coset` under `letter`.
    pub fn act(&self, coset: u32, letter: Letter) -> u32 {
        self.rows[coset as usize * self.width() + self.columns.of(letter) as usize]
    }

    /// Image of `coset` under the word `w`, letters applied left to right.
    pub fn act_word(&self, coset: u32, w: &Word) -> u32 {
        w.letters().iter().fold(coset, |c, &l| self.act(c, l))
    }

    /// Image of `coset` under generator `g`.
    pub fn image(&self, coset: u32, g: usize) -> u32 {
        self.rows[coset as usize * self.width() + self.columns.forward[g] as usize]
    }

    /// One permutation of `0..index` per generator.
    pub fn to_permutations(&self) -> Result<Vec<Permutation>, EnumError> {
        if !self.is_closed() {
            return Err(EnumError::NotClosed);
        }
        (0..self.generator_count)
            .map(|g| {
                let images = (0..self.index as u32).map(|c| self.image(c, g)).collect();
                Permutation::from_images(images).map_err(|_| EnumError::NotClosed)
            })
            .collect()
    }

    /// Orbit of coset `start` under the generators listed in `gens`.
    pub fn orbit(&self, start: u32, gens: &[usize]) -> Vec<u32> {
        let mut seen = vec![false; self.index];
        seen[start as usize] = true;
        let mut orbit = vec![start];
        let mut queue = VecDeque::from([start]);
        while let Some(c) = queue.pop_front() {
            for &g in gens {
                let d = self.image(c, g);
                if !seen[d as usize] {
                    seen[d as usize] = true;
                    orbit.push(d);
                    queue.push_back(d);
                }
            }
        }
        orbit
    }

    /// Checks, independently of the enumeration bookkeeping, that the table
    /// is complete, each column is a bijection inverse to its partner, every
    /// relator closes at every coset and every subgroup generator fixes
    /// coset 0.
    pub fn verify(&self, p: &Presentation, subgroup: &[Word]) -> bool {
        if !self.is_closed() || p.generator_count() != self.generator_count {
            return false;
        }
        let w = self.width();
        for c in 0..self.index {
            for x in 0..w {
                let d = self.rows[c * w + x] as usize;
                if d >= self.index {
                    return false;
                }
                let back = self.columns.inverse_of[x] as usize;
                if self.rows[d * w + back] as usize != c {
                    return false;
                }
            }
        }
        for r in p.relators() {
            for c in 0..self.index as u32 {
                if self.act_word(c, r) != c {
                    return false;
                }
            }
        }
        subgroup.iter().all(|h| self.act_word(0, h) == 0)
    }

    /// Text dump, one row per coset: `coset: image per column`.
    pub fn dump(&self) -> String {
        let w = self.width();
        let mut out = String::new();
        let _ = write!(out, "# cosets {} columns", self.index);
        for g in 0..self.generator_count {
            let _ = write!(out, " r{g}");
            if self.columns.backward[g] != self.columns.forward[g] {
                let _ = write!(out, " r{g}^-1");
            }
        }
        out.push('\n');
        for c in 0..self.index {
            let _ = write!(out, "{c}:");
            for x in 0..w {
                let _ = write!(out, " {}", self.rows[c * w + x]);
            }
            out.push('\n');
        }
        out
    }
}

struct Full;

struct Enumerator {
    columns: Columns,
    width: usize,
    rows: Vec<u32>,
    parent: Vec<u32>,
    live: usize,
    queue: Vec<u32>,
    deductions: Vec<(u32, u32)>,
    track_deductions: bool,
    deduction_overflow: bool,
    max_deductions: usize,
    capacity: usize,
    max_cosets: usize,
    stats: EnumerationStats,
}

impl Enumerator {
    fn new(columns: Columns, limits: EnumerationLimits, track_deductions: bool) -> Self {
        let width = columns.count();
        let max_cosets = limits.max_cosets.max(1);
        let mut e = Enumerator {
            columns,
            width,
            rows: Vec::new(),
            parent: Vec::new(),
            live: 0,
            queue: Vec::new(),
            deductions: Vec::new(),
            track_deductions,
            deduction_overflow: false,
            max_deductions: limits.max_deductions.max(1),
            capacity: max_cosets.min(1 << 18),
            max_cosets,
            stats: EnumerationStats::default(),
        };
        e.new_coset().ok().expect("room for the first coset");
        e
    }

    fn allocated(&self) -> usize {
        self.parent.len()
    }

    #[inline]
    fn is_live(&self, c: u32) -> bool {
        self.parent[c as usize] == c
    }

    #[inline]
    fn get(&self, c: u32, x: u32) -> u32 {
        self.rows[c as usize * self.width + x as usize]
    }

    #[inline]
    fn set(&mut self, c: u32, x: u32, v: u32) {
        self.rows[c as usize * self.width + x as usize] = v;
    }

    #[inline]
    fn inv(&self, x: u32) -> u32 {
        self.columns.inverse_of[x as usize]
    }

    fn new_coset(&mut self) -> Result<u32, Full> {
        if self.allocated() >= self.capacity {
            return Err(Full);
        }
        let c = self.allocated() as u32;
        self.rows.extend(std::iter::repeat_n(NONE, self.width));
        self.parent.push(c);
        self.live += 1;
        self.stats.max_allocated = self.stats.max_allocated.max(self.allocated());
        Ok(c)
    }

    fn push_deduction(&mut self, c: u32, x: u32) {
        if !self.track_deductions {
            return;
        }
        if self.deductions.len() >= self.max_deductions {
            self.deduction_overflow = true;
        } else {
            self.deductions.push((c, x));
        }
    }

    fn define(&mut self, c: u32, x: u32) -> Result<u32, Full> {
        let d = self.new_coset()?;
        self.stats.definitions += 1;
        self.set(c, x, d);
        self.set(d, self.inv(x), c);
        self.push_deduction(c, x);
        Ok(d)
    }

    fn rep(&mut self, k: u32) -> u32 {
        let mut root = k;
        while self.parent[root as usize] != root {
            root = self.parent[root as usize];
        }
        let mut k = k;
        while self.parent[k as usize] != root {
            let next = self.parent[k as usize];
            self.parent[k as usize] = root;
            k = next;
        }
        root
    }

    fn merge(&mut self, k: u32, l: u32) {
        let a = self.rep(k);
        let b = self.rep(l);
        if a == b {
            return;
        }
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        self.parent[hi as usize] = lo;
        self.queue.push(hi);
        self.live -= 1;
        self.stats.coincidences += 1;
    }

    fn coincidence(&mut self, a: u32, b: u32) {
        self.queue.clear();
        self.merge(a, b);
        let mut i = 0;
        while i < self.queue.len() {
            let dead = self.queue[i];
            i += 1;
            for x in 0..self.width as u32 {
                let target = self.get(dead, x);
                if target == NONE {
                    continue;
                }
                let xi = self.inv(x);
                if self.get(target, xi) == dead {
                    self.set(target, xi, NONE);
                }
                let mu = self.rep(dead);
                let nu = self.rep(target);
                let mu_x = self.get(mu, x);
                if mu_x != NONE {
                    self.merge(nu, mu_x);
                } else {
                    let nu_xi = self.get(nu, xi);
                    if nu_xi != NONE {
                        self.merge(mu, nu_xi);
                    } else {
                        self.set(mu, x, nu);
                        self.set(nu, xi, mu);
                        self.push_deduction(mu, x);
                    }
                }
            }
        }
    }

    /// Scans `w` at `c`, filling gaps with new cosets.
    fn scan_and_fill(&mut self, c: u32, w: &[u32]) -> Result<(), Full> {
        if w.is_empty() {
            return Ok(());
        }
        let mut f = c;
        let mut b = c;
        let mut i = 0isize;
        let mut j = w.len() as isize - 1;
        loop {
            while i <= j {
                let next = self.get(f, w[i as usize]);
                if next == NONE {
                    break;
                }
                f = next;
                i += 1;
            }
            if i > j {
                if f != b {
                    self.coincidence(f, b);
                }
                return Ok(());
            }
            while j >= i {
                let prev = self.get(b, self.inv(w[j as usize]));
                if prev == NONE {
                    break;
                }
                b = prev;
                j -= 1;
            }
            if j < i {
                self.coincidence(f, b);
                return Ok(());
            }
            let x = w[i as usize];
            if i == j {
                self.set(f, x, b);
                self.set(b, self.inv(x), f);
                self.push_deduction(f, x);
                return Ok(());
            }
            self.define(f, x)?;
        }
    }

    /// Scans `w` at `c` without defining cosets; fills a single gap as a
    /// deduction and processes any coincidence. Returns whether the table
    /// changed.
    fn scan(&mut self, c: u32, w: &[u32]) -> bool {
        if w.is_empty() {
            return false;
        }
        let mut f = c;
        let mut i = 0usize;
        let n = w.len();
        while i < n {
            let next = self.get(f, w[i]);
            if next == NONE {
                break;
            }
            f = next;
            i += 1;
        }
        if i == n {
            if f != c {
                self.coincidence(f, c);
                return true;
            }
            return false;
        }
        let mut b = c;
        let mut j = n;
        while j > i {
            let prev = self.get(b, self.inv(w[j - 1]));
            if prev == NONE {
                break;
            }
            b = prev;
            j -= 1;
        }
        if j == i {
            // Every letter was traced from one side or the other.
            self.coincidence(f, b);
            return true;
        }
        if j == i + 1 {
            self.set(f, w[i], b);
            self.set(b, self.inv(w[i]), f);
            self.push_deduction(f, w[i]);
            return true;
        }
        false
    }

    /// Scans every relator from every live coset and the subgroup generators
    /// from coset 0, deducing and merging but never defining.
    fn scan_pass(&mut self, relators: &[Vec<u32>], subgroup: &[Vec<u32>]) -> bool {
        let mut changed = false;
        let root = self.rep(0);
        for h in subgroup {
            changed |= self.scan(root, h);
        }
        let mut c = 0;
        while c < self.allocated() as u32 {
            if self.is_live(c) {
                for r in relators {
                    changed |= self.scan(c, r);
                    if !self.is_live(c) {
                        break;
                    }
                }
            }
            c += 1;
        }
        changed
    }

    /// Renumbers live cosets consecutively, preserving order. Returns the
    /// new id of the first live coset at or after `cursor`.
    fn compact(&mut self, cursor: u32) -> u32 {
        self.stats.compactions += 1;
        let n = self.allocated();
        let mut map = vec![NONE; n];
        let mut next = 0u32;
        let mut new_cursor = None;
        for (c, slot) in map.iter_mut().enumerate() {
            if self.parent[c] == c as u32 {
                if c as u32 >= cursor && new_cursor.is_none() {
                    new_cursor = Some(next);
                }
                *slot = next;
                next += 1;
            }
        }
        let w = self.width;
        let mut rows = Vec::with_capacity(next as usize * w);
        for c in 0..n {
            if map[c] == NONE {
                continue;
            }
            for x in 0..w {
                let v = self.rows[c * w + x];
                rows.push(if v == NONE { NONE } else { map[v as usize] });
            }
        }
        self.rows = rows;
        self.parent = (0..next).collect();
        self.live = next as usize;
        self.deductions = self
            .deductions
            .iter()
            .filter(|&&(c, _)| map[c as usize] != NONE)
            .map(|&(c, x)| (map[c as usize], x))
            .collect();
        new_cursor.unwrap_or(next)
    }

    fn maybe_compact(&mut self, cursor: u32) -> u32 {
        let dead = self.allocated() - self.live;
        if dead > 3 * self.live {
            self.compact(cursor)
        } else {
            cursor
        }
    }

    /// Called when the table is at capacity: lookahead, compact, and grow
    /// the soft capacity if that did not free enough room.
    fn relieve(
        &mut self,
        cursor: u32,
        relators: &[Vec<u32>],
        subgroup: &[Vec<u32>],
    ) -> Result<u32, EnumError> {
        self.stats.lookaheads += 1;
        while self.scan_pass(relators, subgroup) {}
        let cursor = if self.live < self.allocated() {
            self.compact(cursor)
        } else {
            cursor
        };
        if self.allocated() * 4 > self.capacity * 3 {
            if self.capacity >= self.max_cosets && self.allocated() >= self.max_cosets {
                return Err(EnumError::LimitExceeded {
                    max_cosets: self.max_cosets,
                });
            }
            self.capacity = (self.capacity * 2).min(self.max_cosets);
        }
        Ok(cursor)
    }

    fn first_gap(&self, from: u32) -> Option<(u32, u32)> {
        for c in from..self.allocated() as u32 {
            if !self.is_live(c) {
                continue;
            }
            for x in 0..self.width as u32 {
                if self.get(c, x) == NONE {
                    return Some((c, x));
                }
            }
        }
        None
    }

    fn run_hlt(&mut self, relators: &[Vec<u32>], subgroup: &[Vec<u32>]) -> Result<(), EnumError> {
        let mut h = 0;
        while h < subgroup.len() {
            let root = self.rep(0);
            match self.scan_and_fill(root, &subgroup[h]) {
                Ok(()) => h += 1,
                Err(Full) => {
                    self.relieve(0, relators, subgroup)?;
                }
            }
        }
        loop {
            let mut c = 0u32;
            'cosets: while (c as usize) < self.allocated() {
                if self.is_live(c) {
                    let mut r = 0;
                    while r < relators.len() && self.is_live(c) {
                        match self.scan_and_fill(c, &relators[r]) {
                            Ok(()) => r += 1,
                            Err(Full) => {
                                c = self.relieve(c, relators, subgroup)?;
                                continue 'cosets;
                            }
                        }
                    }
                    let mut x = 0;
                    while x < self.width as u32 && self.is_live(c) {
                        if self.get(c, x) == NONE
                            && self.define(c, x).is_err() {
                                c = self.relieve(c, relators, subgroup)?;
                                continue 'cosets;
                            }
                        x += 1;
                    }
                }
                c += 1;
                c = self.maybe_compact(c);
            }
            let changed = self.scan_pass(relators, subgroup);
            if !changed && self.first_gap(0).is_none() {
                return Ok(());
            }
        }
    }

    fn process_deductions(&mut self, by_column: &[Vec<Vec<u32>>], relators: &[Vec<u32>], subgroup: &[Vec<u32>]) {
        loop {
            while let Some((c, x)) = self.deductions.pop() {
                if !self.is_live(c) {
                    continue;
                }
                for w in &by_column[x as usize] {
                    self.scan(c, w);
                    if !self.is_live(c) {
                        break;
                    }
                }
                if !self.is_live(c) {
                    continue;
                }
                let d = self.get(c, x);
                if d == NONE || !self.is_live(d) {
                    continue;
                }
                let xi = self.inv(x);
                for w in &by_column[xi as usize] {
                    self.scan(d, w);
                    if !self.is_live(d) {
                        break;
                    }
                }
            }
            if !self.deduction_overflow {
                return;
            }
            self.deduction_overflow = false;
            self.scan_pass(relators, subgroup);
        }
    }

    fn run_felsch(&mut self, relators: &[Vec<u32>], subgroup: &[Vec<u32>]) -> Result<(), EnumError> {
        let mut by_column: Vec<Vec<Vec<u32>>> = vec![Vec::new(); self.width];
        let mut seen: HashSet<Vec<u32>> = HashSet::new();
        for r in relators {
            let inverse: Vec<u32> = r.iter().rev().map(|&x| self.inv(x)).collect();
            for word in [r, &inverse] {
                for shift in 0..word.len() {
                    let mut rotated = word[shift..].to_vec();
                    rotated.extend_from_slice(&word[..shift]);
                    if seen.insert(rotated.clone()) {
                        by_column[rotated[0] as usize].push(rotated);
                    }
                }
            }
        }
        for h in subgroup {
            let root = self.rep(0);
            if self.scan_and_fill(root, h).is_err() {
                return Err(EnumError::LimitExceeded {
                    max_cosets: self.max_cosets,
                });
            }
            self.process_deductions(&by_column, relators, subgroup);
        }
        let mut cursor = 0u32;
        loop {
            let coincidences = self.stats.coincidences;
            match self.first_gap(cursor) {
                Some((c, x)) => {
                    cursor = c;
                    if self.define(c, x).is_err() {
                        cursor = self.relieve(cursor, relators, subgroup)?;
                        continue;
                    }
                    self.process_deductions(&by_column, relators, subgroup);
                    if self.stats.coincidences != coincidences {
                        cursor = 0;
                    }
                    cursor = self.maybe_compact(cursor);
                }
                None => {
                    let changed = self.scan_pass(relators, subgroup);
                    self.process_deductions(&by_column, relators, subgroup);
                    if !changed && self.first_gap(0).is_none() {
                        return Ok(());
                    }
                    cursor = 0;
                }
            }
        }
    }

    /// Compacts, then renumbers cosets in breadth-first order from coset 0
    /// scanning columns in order.
    fn finish(mut self, generator_count: usize) -> CosetTable {
        self.compact(0);
        let n = self.allocated();
        let w = self.width;
        let mut order = Vec::with_capacity(n);
        let mut map = vec![NONE; n];
        map[0] = 0;
        order.push(0u32);
        let mut i = 0;
        while i < order.len() {
            let c = order[i];
            i += 1;
            for x in 0..w as u32 {
                let d = self.get(c, x);
                if map[d as usize] == NONE {
                    map[d as usize] = order.len() as u32;
                    order.push(d);
                }
            }
        }
        let mut rows = Vec::with_capacity(n * w);
        for &c in &order {
            for x in 0..w as u32 {
                rows.push(map[self.get(c, x) as usize]);
            }
        }
        CosetTable {
            generator_count,
            columns: self.columns,
            rows,
            index: order.len(),
            stats: self.stats,
        }
    }
}

/// Enumerates the cosets of `⟨subgroup⟩` in the group presented by `p`.
pub fn enumerate(
    p: &Presentation,
    subgroup: &[Word],
    options: &EnumerationOptions,
) -> Result<CosetTable, EnumError> {
    for h in subgroup {
        p.check_word(h)?;
    }
    let columns = Columns::new(p);
    let relators: Vec<Vec<u32>> = p
        .relators()
        .iter()
        .map(|r| columns.encode(r, true))
        .filter(|r| !r.is_empty())
        .collect();
    let subgroup_cols: Vec<Vec<u32>> = subgroup
        .iter()
        .map(|h| columns.encode(h, false))
        .filter(|h| !h.is_empty())
        .collect();
    let felsch = options.strategy == Strategy::Felsch;
    let mut e = Enumerator::new(columns, options.limits, felsch);
    if felsch {
        e.run_felsch(&relators, &subgroup_cols)?;
    } else {
        e.run_hlt(&relators, &subgroup_cols)?;
    }
    Ok(e.finish(p.generator_count()))
}

/// Words generating the parabolic subgroup on `subset`.
pub fn parabolic_words(subset: &[usize]) -> Vec<Word> {
    subset.iter().map(|&i| Word::generator(i as u32)).collect()
}

/// `|G|`, the index of the trivial subgroup.
pub fn group_order(p: &Presentation, options: &EnumerationOptions) -> Result<u64, EnumError> {
    Ok(enumerate(p, &[], options)?.index() as u64)
}

/// Index of `⟨r_i : i ∈ subset⟩`.
pub fn subgroup_index(
    p: &Presentation,
    subset: &[usize],
    options: &EnumerationOptions,
) -> Result<u64, EnumError> {
    for &i in subset {
        if i >= p.generator_count() {
            return Err(EnumError::InvalidGenerator(crate::error::WordError::GeneratorOutOfRange {
                index: i as u32,
                count: p.generator_count(),
            }));
        }
    }
    Ok(enumerate(p, &parabolic_words(subset), options)?.index() as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pres(d: usize, rels: &[&str]) -> Presentation {
        Presentation::new(d, rels.iter().map(|r| r.parse().unwrap()).collect()).unwrap()
    }

    fn both() -> [EnumerationOptions; 2] {
        [
            EnumerationOptions::new(EnumerationLimits::default(), Strategy::Hlt),
            EnumerationOptions::new(EnumerationLimits::default(), Strategy::Felsch),
        ]
    }

    fn dihedral(m: u64) -> Presentation {
        let rel = crate::words::power(&Word::from_generators(&[0, 1]), m);
        Presentation::new(2, vec!["r0^2".parse().unwrap(), "r1^2".parse().unwrap(), rel]).unwrap()
    }

    #[test]
    fn dihedral_six_over_reflection() {
        for opts in both() {
            let t = enumerate(&dihedral(3), &[Word::generator(0)], &opts).unwrap();
            assert_eq!(t.index(), 3);
            assert!(t.verify(&dihedral(3), &[Word::generator(0)]));
        }
    }

    #[test]
    fn dihedral_eight_regular() {
        for opts in both() {
            let t = enumerate(&dihedral(4), &[], &opts).unwrap();
            assert_eq!(t.index(), 8);
            let perms = t.to_permutations().unwrap();
            assert_eq!(perms[0].order(), 2);
            assert_eq!(perms[1].order(), 2);
            assert_eq!(perms[0].then(&perms[1]).order(), 4);
        }
    }

    #[test]
    fn full_subgroup_gives_one_point() {
        let p = dihedral(5);
        let t = enumerate(&p, &parabolic_words(&[0, 1]), &EnumerationOptions::default()).unwrap();
        assert_eq!(t.index(), 1);
        assert!(t.to_permutations().unwrap().iter().all(Permutation::is_identity));
    }

    #[test]
    fn cyclic_of_order_two_and_one() {
        let opts = EnumerationOptions::default();
        assert_eq!(group_order(&pres(1, &["r0^2"]), &opts).unwrap(), 2);
        assert_eq!(group_order(&pres(1, &["r0"]), &opts).unwrap(), 1);
        assert_eq!(group_order(&pres(1, &["r0^5"]), &opts).unwrap(), 5);
    }

    #[test]
    fn non_involution_generators() {
        // Quaternion group.
        let q8 = pres(2, &["r0^4", "r0^2 r1^-2", "r1^-1 r0 r1 r0"]);
        for opts in both() {
            assert_eq!(group_order(&q8, &opts).unwrap(), 8);
        }
        // Symmetric group S4 as <a, b | a^2, b^3, (ab)^4>.
        let s4 = pres(2, &["r0^2", "r1^3", "r0 r1 r0 r1 r0 r1 r0 r1"]);
        for opts in both() {
            assert_eq!(group_order(&s4, &opts).unwrap(), 24);
        }
    }

    #[test]
    fn infinite_group_hits_limit() {
        let free = pres(2, &[]);
        let opts = EnumerationOptions::new(EnumerationLimits::with_max_cosets(1000), Strategy::Hlt);
        assert!(matches!(
            group_order(&free, &opts),
            Err(EnumError::LimitExceeded { max_cosets: 1000 })
        ));
        let opts = EnumerationOptions::new(EnumerationLimits::with_max_cosets(1000), Strategy::Felsch);
        assert!(matches!(group_order(&free, &opts), Err(EnumError::LimitExceeded { .. })));
    }

    #[test]
    fn invalid_subgroup_generator() {
        let err = enumerate(&dihedral(3), &[Word::generator(5)], &EnumerationOptions::default());
        assert!(matches!(err, Err(EnumError::InvalidGenerator(_))));
        assert!(subgroup_index(&dihedral(3), &[7], &EnumerationOptions::default()).is_err());
    }

    #[test]
    fn strategies_produce_identical_tables() {
        let p = pres(
            3,
            &[
                "r0^2",
                "r1^2",
                "r2^2",
                "r0 r1 r0 r1 r0 r1",
                "r0 r2 r0 r2",
                "r1 r2 r1 r2 r1 r2",
            ],
        );
        let [hlt, felsch] = both();
        let a = enumerate(&p, &[Word::generator(1)], &hlt).unwrap();
        let b = enumerate(&p, &[Word::generator(1)], &felsch).unwrap();
        assert_eq!(a.dump(), b.dump());
        assert_eq!(a.index(), 12);
        assert_eq!(group_order(&p, &hlt).unwrap(), 24);
    }

    #[test]
    fn tiny_limit_forces_lookahead_and_still_closes() {
        // S4 needs fewer than 64 live cosets but HLT overshoots without
        // lookahead.
        let s4 = pres(2, &["r0^2", "r1^3", "r0 r1 r0 r1 r0 r1 r0 r1"]);
        let opts = EnumerationOptions::new(EnumerationLimits::with_max_cosets(40), Strategy::Hlt);
        let t = enumerate(&s4, &[], &opts).unwrap();
        assert_eq!(t.index(), 24);
        assert!(t.verify(&s4, &[]));
    }
}
