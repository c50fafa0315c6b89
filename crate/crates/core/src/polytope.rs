//! The abstract regular polytope of a certified string C-group.
//!
//! Faces of rank `i` are the right cosets of `G_i = ⟨ρⱼ : j ≠ i⟩`, numbered
//! by the coset table over `G_i`. Flags are group elements: the flag of `g`
//! is `(G_0 g, …, G_{d−1} g)`. Two faces are incident exactly when some flag
//! contains both, so incidences are read off the flags without ever listing
//! coset elements. Flags `g` and `ρᵢ g` differ only in their rank-`i` face,
//! which gives the flag graph.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::PolytopeError;
use crate::sggi::{GroupContext, SggiCertificate, Subset};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GraphFormat {
    /// Graphviz.
    Dot,
    /// Trivial Graph Format.
    Tgf,
}

impl std::str::FromStr for GraphFormat {
    type Err = PolytopeError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "dot" => Ok(GraphFormat::Dot),
            "tgf" => Ok(GraphFormat::Tgf),
            _ => Err(PolytopeError::UnsupportedFormat(s.to_string())),
        }
    }
}

#[derive(Clone, Debug)]
pub struct FaceLattice {
    rank: usize,
    order: usize,
    f_vector: Vec<usize>,
    /// `flag_faces[g * rank + i]` is the rank-`i` face of flag `g`.
    flag_faces: Vec<u32>,
    /// Left multiplication by each generator on the elements.
    left: Vec<Vec<u32>>,
}

impl FaceLattice {
    /// Builds the lattice; refuses groups without a passing certificate.
    pub fn build(ctx: &GroupContext, cert: &SggiCertificate) -> Result<Self, PolytopeError> {
        if !cert.passes() || cert.group_order != ctx.order() || cert.rank != ctx.rank() {
            return Err(PolytopeError::Uncertified);
        }
        let d = ctx.rank();
        let full = Subset::full(d);
        let maximal: Vec<Subset> = (0..d).map(|i| full.without(i)).collect();
        ctx.prefetch(&maximal)?;
        let regular = ctx.regular_table();
        let order = regular.index();
        let bfs = bfs_tree(ctx);

        let mut flag_faces = vec![0u32; order * d];
        let mut f_vector = Vec::with_capacity(d);
        for (i, &s) in maximal.iter().enumerate() {
            let table = ctx.table(s)?;
            f_vector.push(table.index());
            for &(parent, g, child) in &bfs {
                flag_faces[child as usize * d + i] = table.image(flag_faces[parent as usize * d + i], g);
            }
        }
        let left = (0..d)
            .map(|i| {
                let mut l = vec![0u32; order];
                l[0] = regular.image(0, i);
                for &(parent, g, child) in &bfs {
                    l[child as usize] = regular.image(l[parent as usize], g);
                }
                l
            })
            .collect();
        Ok(FaceLattice {
            rank: d,
            order,
            f_vector,
            flag_faces,
            left,
        })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn group_order(&self) -> usize {
        self.order
    }

    /// Number of faces of each rank `0..d`.
    pub fn f_vector(&self) -> &[usize] {
        &self.f_vector
    }

    pub fn face(&self, flag: u32, rank: usize) -> u32 {
        self.flag_faces[flag as usize * self.rank + rank]
    }

    /// Distinct incident pairs between proper faces of ranks `i < j`.
    pub fn incidences(&self, i: usize, j: usize) -> Vec<(u32, u32)> {
        let mut pairs: Vec<(u32, u32)> = (0..self.order as u32)
            .map(|g| (self.face(g, i), self.face(g, j)))
            .collect();
        pairs.sort_unstable();
        pairs.dedup();
        pairs
    }

    /// Cover relations between ranks `r` and `r + 1` for `r` in `−1..d`,
    /// where rank `−1` is the least face and rank `d` the greatest.
    fn covers(&self, r: isize) -> Vec<(u32, u32)> {
        let d = self.rank as isize;
        if r == -1 && d == 0 {
            return vec![(0, 0)];
        }
        if r == -1 {
            return (0..self.f_vector[0] as u32).map(|v| (0, v)).collect();
        }
        if r == d - 1 {
            return (0..self.f_vector[r as usize] as u32).map(|f| (f, 0)).collect();
        }
        self.incidences(r as usize, r as usize + 1)
    }

    fn count_at(&self, r: isize) -> usize {
        if r < 0 || r >= self.rank as isize {
            1
        } else {
            self.f_vector[r as usize]
        }
    }

    /// Total number of edges of the Hasse diagram.
    pub fn cover_count(&self) -> usize {
        (-1..self.rank as isize).map(|r| self.covers(r).len()).sum()
    }

    /// Whether incidence restricted to faces of increasing rank is
    /// transitive, so that it defines a partial order.
    pub fn is_partial_order(&self) -> bool {
        let d = self.rank;
        for i in 0..d {
            for j in i + 1..d {
                let ij = self.incidences(i, j);
                for k in j + 1..d {
                    let ik: HashSet<(u32, u32)> = self.incidences(i, k).into_iter().collect();
                    let jk = self.incidences(j, k);
                    let mut up: Vec<Vec<u32>> = vec![Vec::new(); self.f_vector[j]];
                    for &(b, c) in &jk {
                        up[b as usize].push(c);
                    }
                    for &(a, b) in &ij {
                        if up[b as usize].iter().any(|&c| !ik.contains(&(a, c))) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Between any two incident faces two ranks apart lie exactly two faces.
    pub fn diamond_condition(&self) -> bool {
        let d = self.rank as isize;
        for r in -1..d - 1 {
            let lower = self.covers(r);
            let upper = self.covers(r + 1);
            let mut up: Vec<Vec<u32>> = vec![Vec::new(); self.count_at(r)];
            for &(a, b) in &lower {
                up[a as usize].push(b);
            }
            let mut down: Vec<HashSet<u32>> = vec![HashSet::new(); self.count_at(r + 2)];
            for &(b, c) in &upper {
                down[c as usize].insert(b);
            }
            let outer: Vec<(u32, u32)> = if r == -1 || r + 2 == d {
                let lo = self.count_at(r) as u32;
                let hi = self.count_at(r + 2) as u32;
                (0..lo).flat_map(|a| (0..hi).map(move |c| (a, c))).collect()
            } else {
                self.incidences(r as usize, r as usize + 2)
            };
            for (a, c) in outer {
                let between = up[a as usize]
                    .iter()
                    .filter(|b| down[c as usize].contains(b))
                    .count();
                if between != 2 {
                    return false;
                }
            }
        }
        true
    }

    /// Number of distinct face tuples realised by flags.
    pub fn flag_count(&self) -> usize {
        let d = self.rank;
        let tuples: HashSet<&[u32]> = self.flag_faces.chunks(d.max(1)).collect();
        tuples.len()
    }

    /// Number of maximal chains of proper faces, counted through the cover
    /// relations alone.
    pub fn maximal_chain_count(&self) -> u128 {
        if self.rank == 0 {
            return 1;
        }
        let mut ways = vec![1u128; self.f_vector[0]];
        for r in 0..self.rank - 1 {
            let mut next = vec![0u128; self.f_vector[r + 1]];
            for (a, b) in self.incidences(r, r + 1) {
                next[b as usize] += ways[a as usize];
            }
            ways = next;
        }
        ways.iter().sum()
    }

    pub fn flag_graph(&self) -> FlagGraph {
        FlagGraph {
            adjacency: self.left.clone(),
        }
    }

    /// Strong flag-connectivity as checked here: the flag graph is connected
    /// and, for every face `F` of rank `r`, the flags through `F` are
    /// connected by adjacencies of labels other than `r`.
    pub fn strongly_flag_connected(&self) -> bool {
        let graph = self.flag_graph();
        if !graph.connected() {
            return false;
        }
        for r in 0..self.rank {
            let labels: Vec<usize> = (0..self.rank).filter(|&i| i != r).collect();
            let mut seen = vec![false; self.order];
            let mut components = 0;
            for start in 0..self.order {
                if seen[start] {
                    continue;
                }
                components += 1;
                let face = self.face(start as u32, r);
                seen[start] = true;
                let mut queue = VecDeque::from([start as u32]);
                while let Some(x) = queue.pop_front() {
                    for &i in &labels {
                        let y = graph.adjacency[i][x as usize];
                        if self.face(y, r) != face {
                            return false;
                        }
                        if !seen[y as usize] {
                            seen[y as usize] = true;
                            queue.push_back(y);
                        }
                    }
                }
            }
            if components != self.f_vector[r] {
                return false;
            }
        }
        true
    }

    /// The Hasse diagram, least face to greatest face.
    pub fn export_hasse(&self, format: GraphFormat) -> String {
        let d = self.rank as isize;
        let mut offset = vec![0usize];
        for r in -1..=d {
            offset.push(offset.last().unwrap() + self.count_at(r));
        }
        let node = |r: isize, f: u32| offset[(r + 1) as usize] + f as usize;
        let label = |r: isize, f: u32| match r {
            -1 => "least".to_string(),
            r if r == d => "greatest".to_string(),
            r => format!("F{r}_{f}"),
        };
        let mut nodes = Vec::new();
        for r in -1..=d {
            for f in 0..self.count_at(r) as u32 {
                nodes.push((node(r, f), r, label(r, f)));
            }
        }
        let mut edges = Vec::new();
        for r in -1..d {
            for (a, b) in self.covers(r) {
                edges.push((node(r, a), node(r + 1, b)));
            }
        }
        let mut out = String::new();
        match format {
            GraphFormat::Dot => {
                out.push_str("digraph hasse {\n  rankdir=BT;\n");
                for (id, r, name) in &nodes {
                    let _ = writeln!(out, "  n{id} [label=\"{name}\", rank={r}];");
                }
                for (a, b) in &edges {
                    let _ = writeln!(out, "  n{a} -> n{b};");
                }
                out.push_str("}\n");
            }
            GraphFormat::Tgf => {
                for (id, r, name) in &nodes {
                    let _ = writeln!(out, "{id} {name} rank={r}");
                }
                out.push_str("#\n");
                for (a, b) in &edges {
                    let _ = writeln!(out, "{a} {b}");
                }
            }
        }
        out
    }
}

/// Breadth-first spanning tree of the regular table as
/// `(parent, generator, child)` triples in discovery order.
fn bfs_tree(ctx: &GroupContext) -> Vec<(u32, usize, u32)> {
    let table = ctx.regular_table();
    let n = table.index();
    let d = ctx.rank();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    let mut queue = VecDeque::from([0u32]);
    while let Some(p) = queue.pop_front() {
        for g in 0..d {
            let c = table.image(p, g);
            if !seen[c as usize] {
                seen[c as usize] = true;
                out.push((p, g, c));
                queue.push_back(c);
            }
        }
    }
    out
}

/// Flags with their labelled adjacencies.
#[derive(Clone, Debug)]
pub struct FlagGraph {
    adjacency: Vec<Vec<u32>>,
}

impl FlagGraph {
    pub fn flag_count(&self) -> usize {
        self.adjacency.first().map_or(1, Vec::len)
    }

    /// The `i`-adjacent flag of `flag`.
    pub fn neighbour(&self, flag: u32, i: usize) -> u32 {
        self.adjacency[i][flag as usize]
    }

    /// Whether the `i`-edges pair every flag with a different flag.
    pub fn is_perfect_matching(&self, i: usize) -> bool {
        let a = &self.adjacency[i];
        (0..a.len()).all(|x| a[x] as usize != x && a[a[x] as usize] as usize == x)
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(|a| a.len() / 2).sum()
    }

    pub fn connected(&self) -> bool {
        let n = self.flag_count();
        let mut seen = vec![false; n];
        seen[0] = true;
        let mut count = 1;
        let mut stack = vec![0u32];
        while let Some(x) = stack.pop() {
            for a in &self.adjacency {
                let y = a[x as usize];
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    count += 1;
                    stack.push(y);
                }
            }
        }
        count == n
    }
}
