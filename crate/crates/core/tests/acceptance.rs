use std::collections::HashSet;
use std::panic::{self, AssertUnwindSafe};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use regpoly::atlas::{self, Family, Instance, RowStatus, SweepSpec, VerifyOptions};
use regpoly::coset::{self, EnumerationOptions, Strategy};
use regpoly::polytope::FaceLattice;
use regpoly::sggi::{commutator_identities, GroupContext, IntersectionMode, Subset};
use regpoly::words::{commutator, evaluate, power, Word};
use regpoly::Permutation;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn opts() -> EnumerationOptions {
    EnumerationOptions::default()
}

fn ctx(i: &Instance) -> Result<GroupContext, String> {
    let p = i.presentation().map_err(|e| format!("{}: {e}", i.params_text()))?;
    GroupContext::new(p, opts()).map_err(|e| format!("{}: {e}", i.params_text()))
}

fn label(i: &Instance) -> String {
    format!("{} {}", i.family.id(), i.params_text())
}

fn theorem_sweep() -> Vec<Instance> {
    let mut out = Vec::new();
    for d in 3..=5 {
        let spec = SweepSpec {
            family: Family::G,
            d: (d, d),
            n: (10, 12),
            k: (2, 11),
            unsafe_params: false,
        };
        out.extend(spec.instances().0);
    }
    out
}

fn tight_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for d in 3..=4usize {
        for bits in 0..1u32 << (d - 1) {
            let k: Vec<u32> = (0..d - 1).map(|i| if bits >> i & 1 == 1 { 8 } else { 4 }).collect();
            out.push(Instance::tight(&k));
        }
    }
    out
}

const H_PARAMS: [(u32, u32, u32); 5] = [(10, 2, 2), (10, 3, 3), (10, 2, 5), (11, 4, 4), (12, 2, 2)];

const LEDGER: [(usize, u32, &[u32]); 3] = [(4, 10, &[2, 2, 2]), (4, 11, &[3, 2, 2]), (5, 12, &[2, 2, 2, 2])];

/// A on `ρ₁..ρ_{d−1}`: rank `d − 1`, exponent `n − k₁`, entries `k₂..`.
fn reduced_a(d: usize, n: u32, k: &[u32]) -> Instance {
    Instance::new(Family::A, d - 1, Some(n - k[0]), k[1..].to_vec())
}

fn ledger_instances() -> Vec<Instance> {
    let mut out = Vec::new();
    for (d, n, k) in LEDGER {
        out.push(Instance::g(d, n, k));
        out.push(Instance::new(Family::K, d, None, k.to_vec()));
        out.push(Instance::new(Family::L, d, None, k.to_vec()));
        out.push(Instance::new(Family::M, d, Some(n), k.to_vec()));
        out.push(reduced_a(d, n, k));
    }
    out
}

/// Every group the suite constructs, deduplicated.
fn constructed() -> Vec<Instance> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    let all = theorem_sweep()
        .into_iter()
        .chain(tight_instances())
        .chain(H_PARAMS.iter().map(|&(n, s, t)| Instance::h(n, s, t)))
        .chain(ledger_instances())
        .chain(atlas::small_case_tuples().into_iter().map(|t| Instance::a_tuple(&t)));
    for i in all {
        if seen.insert(i.clone()) {
            out.push(i);
        }
    }
    out
}

fn criterion_1() -> Outcome {
    let instances = theorem_sweep();
    let options = VerifyOptions {
        cross_check: true,
        ..Default::default()
    };
    let rows = atlas::run_rows(&instances, &options, 0);
    for (i, row) in instances.iter().zip(&rows) {
        let n = i.n.unwrap();
        let ty: Vec<u64> = i.k.iter().map(|&k| 1 << k).collect();
        ensure(row.status == RowStatus::Pass, || format!("{}: {:?} {}", label(i), row.status, row.detail))?;
        ensure(row.order == Some(1 << n), || format!("{}: order {:?}", label(i), row.order))?;
        ensure(row.schlafli_type == ty, || format!("{}: type {:?}", label(i), row.schlafli_type))?;
        ensure(row.intersection_ok == Some(true), || format!("{}: intersection", label(i)))?;
    }
    Ok(format!("{} tuples of order 2^n, full and recursive checks agree", rows.len()))
}

fn criterion_2() -> Outcome {
    let table = atlas::paper_tables(&VerifyOptions::default(), 0);
    let mut per_rank = [0usize; 6];
    for row in &table.rows {
        let i = &row.instance;
        let n = i.n.ok_or_else(|| format!("{}: no n", label(i)))?;
        ensure(row.status == RowStatus::Pass, || format!("{}: {:?} {}", label(i), row.status, row.detail))?;
        ensure(row.order == Some(1 << n), || format!("{}: |A| = {:?}", label(i), row.order))?;
        per_rank[i.d] += 1;
    }
    let counts = &per_rank[3..];
    ensure(counts == [35, 15, 1], || format!("tuples per rank {counts:?}"))?;
    Ok("35 rank-3, 15 rank-4, 1 rank-5 tuples with |A| = 2^(n-k1)".into())
}

fn criterion_3() -> Outcome {
    let instances = tight_instances();
    for i in &instances {
        let v = atlas::verify(i, &VerifyOptions::default()).map_err(|e| format!("{}: {e}", label(i)))?;
        let order: u64 = i.k.iter().map(|&k| k as u64).product::<u64>() * 2;
        let ty: Vec<u64> = i.k.iter().map(|&k| k as u64).collect();
        ensure(v.record.passed, || format!("{}: not certified", label(i)))?;
        ensure(v.record.group_order == order, || format!("{}: order {}", label(i), v.record.group_order))?;
        ensure(v.record.schlafli_type == ty, || format!("{}: type {:?}", label(i), v.record.schlafli_type))?;
    }
    Ok(format!("{} tight quotients of order 2*k1*...*k(d-1)", instances.len()))
}

fn criterion_4() -> Outcome {
    for (n, s, t) in H_PARAMS {
        let i = Instance::h(n, s, t);
        let v = atlas::verify(&i, &VerifyOptions::default()).map_err(|e| format!("{}: {e}", label(&i)))?;
        ensure(v.record.passed, || format!("{}: not certified", label(&i)))?;
        ensure(v.record.group_order == 1 << n, || format!("{}: order {}", label(&i), v.record.group_order))?;
        ensure(v.record.schlafli_type == [1 << s, 1 << t], || format!("{}: type", label(&i)))?;
    }
    Ok("5 rank-3 instances of order 2^n and type {2^s,2^t}".into())
}

fn criterion_5() -> Outcome {
    for (d, n, k) in LEDGER {
        let tag = format!("d={d} n={n} k={k:?}");
        let sum: u32 = k.iter().sum();
        let g = ctx(&Instance::g(d, n, k))?;
        let kk = ctx(&Instance::new(Family::K, d, None, k.to_vec()))?;
        let l = ctx(&Instance::new(Family::L, d, None, k.to_vec()))?;
        let m = ctx(&Instance::new(Family::M, d, Some(n), k.to_vec()))?;
        let a = ctx(&reduced_a(d, n, k))?;
        ensure(kk.order() == 1 << (1 + sum), || format!("{tag}: |K| = {}", kk.order()))?;
        ensure(l.order() == 1 << (1 + sum - k[d - 2]), || format!("{tag}: |L| = {}", l.order()))?;

        let n_gen = power(&Word::from_generators(&[0, 1]), 2);
        let n_order = g.subgroup_order(std::slice::from_ref(&n_gen)).map_err(|e| e.to_string())?;
        ensure(n_order == 1 << (k[0] - 1), || format!("{tag}: |N| = {n_order}"))?;
        ensure(g.cyclic_is_normal(&n_gen).map_err(|e| e.to_string())?, || format!("{tag}: N not normal"))?;

        let m1 = m.parabolic_order(Subset::interval(1, d - 1));
        ensure(m.order() == g.order() / n_order, || format!("{tag}: |M| = {}", m.order()))?;
        ensure(m.order() == 2 * m1, || format!("{tag}: |M| = {} but |M1| = {m1}", m.order()))?;
        let meet = m
            .intersection_order(Subset::from_indices(&[0]), Subset::interval(1, d - 1))
            .map_err(|e| e.to_string())?;
        ensure(meet == 1, || format!("{tag}: <r0> meets M1 in {meet} elements"))?;
        ensure(a.order() == 1 << (n - k[0]) && a.order() == m1, || format!("{tag}: |A| = {}", a.order()))?;

        let identity: Vec<Word> = (0..d as u32).map(Word::generator).collect();
        kk.kills_relators(g.presentation(), &identity)
            .map_err(|e| format!("{tag}: alpha: {e}"))?;
        let beta: Vec<Word> = std::iter::once(Word::identity())
            .chain((1..d as u32).map(Word::generator))
            .collect();
        let a_on_m: Vec<Word> = (1..d as u32).map(Word::generator).collect();
        m.kills_relators(a.presentation(), &a_on_m)
            .map_err(|e| format!("{tag}: beta: {e}"))?;
        let a_images: Vec<Word> = beta
            .iter()
            .map(|w| {
                Word::from_letters(w.letters().iter().map(|l| {
                    regpoly::words::Letter::new(l.generator.0 - 1, l.inverse)
                }))
            })
            .collect();
        a.kills_relators(m.presentation(), &a_images)
            .map_err(|e| format!("{tag}: beta: {e}"))?;
    }
    Ok("|K|, |L|, |N|, |M|, |A| and the maps alpha, beta on 3 tuples".into())
}

fn closure_size(gens: &[Permutation]) -> usize {
    let degree = gens[0].degree();
    let mut seen: HashSet<Permutation> = HashSet::new();
    let id = Permutation::identity(degree);
    let mut frontier = vec![id.clone()];
    seen.insert(id);
    while let Some(x) = frontier.pop() {
        for g in gens {
            let y = x.then(g);
            if !seen.contains(&y) {
                seen.insert(y.clone());
                frontier.push(y);
            }
        }
    }
    seen.len()
}

fn criterion_6() -> Outcome {
    let felsch = EnumerationOptions::new(Default::default(), Strategy::Felsch);
    let checked: Vec<Result<bool, String>> = constructed()
        .par_iter()
        .map(|i| {
            let p = i.presentation().map_err(|e| e.to_string())?;
            let hlt = coset::enumerate(&p, &[], &opts()).map_err(|e| format!("{}: {e}", label(i)))?;
            let index = hlt.index() as u64;
            if index > 1 << 12 {
                return Ok(false);
            }
            let fel = coset::enumerate(&p, &[], &felsch).map_err(|e| format!("{}: {e}", label(i)))?;
            ensure(fel.index() as u64 == index, || format!("{}: Felsch index {}", label(i), fel.index()))?;
            ensure(fel.dump() == hlt.dump(), || format!("{}: tables differ", label(i)))?;
            for g in 0..p.generator_count() {
                let sub: Vec<usize> = (0..p.generator_count()).filter(|&x| x != g).collect();
                let a = coset::subgroup_index(&p, &sub, &opts()).map_err(|e| e.to_string())?;
                let b = coset::subgroup_index(&p, &sub, &felsch).map_err(|e| e.to_string())?;
                ensure(a == b && index.is_multiple_of(a), || format!("{}: parabolic index {a} vs {b}", label(i)))?;
            }
            let c = GroupContext::new(p, opts()).map_err(|e| e.to_string())?;
            let chain = c.chain_order();
            let closure = closure_size(c.permutations());
            ensure(chain == index as u128 && closure as u64 == index, || {
                format!("{}: index {index}, chain {chain}, closure {closure}", label(i))
            })?;
            Ok(true)
        })
        .collect();
    let mut n = 0;
    for c in checked {
        n += c? as usize;
    }
    Ok(format!("{n} groups: chain order, index and closure agree; HLT and Felsch agree"))
}

fn criterion_7() -> Outcome {
    let instances = constructed();
    let results: Vec<Result<(Instance, u64, u128, bool), String>> = instances
        .par_iter()
        .map(|i| {
            let v = atlas::verify(i, &VerifyOptions::default()).map_err(|e| format!("{}: {e}", label(i)))?;
            Ok((i.clone(), v.certificate.group_order, v.certificate.lower_bound(), v.certificate.passes()))
        })
        .collect();
    let (mut passing, mut equal) = (0, 0);
    for r in results {
        let (i, order, bound, passes) = r?;
        if !passes {
            continue;
        }
        passing += 1;
        ensure(order as u128 >= bound, || format!("{}: order {order} below {bound}", label(&i)))?;
        let tight_family = match i.family {
            Family::Tight | Family::K | Family::L => true,
            Family::G | Family::H | Family::M | Family::A => i.l() == Some(1),
            Family::Coxeter => false,
        };
        ensure((order as u128 == bound) == tight_family, || {
            format!("{}: order {order}, bound {bound}", label(&i))
        })?;
        equal += tight_family as usize;
    }
    Ok(format!("{passing} certificates above the bound, equality on exactly the {equal} tight ones"))
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x2f0c);
    let [a, b, c] = [0, 1, 2].map(Word::generator);
    let ab_c = commutator(&a.mul(&b), &c);
    let ab_c_rhs = commutator(&a, &c).conjugate_by(&b).mul(&commutator(&b, &c));
    let a_bc = commutator(&a, &b.mul(&c));
    let a_bc_rhs = commutator(&a, &c).mul(&commutator(&a, &b).conjugate_by(&c));
    for trial in 0..10_000 {
        let degree = rng.random_range(1..=16);
        let images: Vec<Permutation> = (0..3)
            .map(|_| {
                let mut v: Vec<u32> = (0..degree).collect();
                v.shuffle(&mut rng);
                Permutation::from_images(v).unwrap()
            })
            .collect();
        let e = |w: &Word| evaluate(w, &images).unwrap();
        ensure(e(&ab_c) == e(&ab_c_rhs), || format!("[ab,c] identity fails on trial {trial}"))?;
        ensure(e(&a_bc) == e(&a_bc_rhs), || format!("[a,bc] identity fails on trial {trial}"))?;
    }
    let reports: Vec<Result<(usize, usize), String>> = constructed()
        .par_iter()
        .map(|i| {
            let c = ctx(i)?;
            let mut hyp = 0;
            for r in commutator_identities(&c).map_err(|e| e.to_string())? {
                if r.hypotheses {
                    hyp += 1;
                    ensure(r.conclusions, || format!("{}: triple {:?}", label(i), r.triple))?;
                }
            }
            Ok((hyp, 1))
        })
        .collect();
    let (mut triples, mut groups) = (0, 0);
    for r in reports {
        let (h, g) = r?;
        triples += h;
        groups += g;
    }
    Ok(format!("10000 random triples; {triples} hypothesis triples in {groups} groups"))
}

fn criterion_9() -> Outcome {
    let results: Vec<Result<Option<Vec<usize>>, String>> = constructed()
        .par_iter()
        .map(|i| {
            let v = atlas::verify(i, &VerifyOptions::default()).map_err(|e| format!("{}: {e}", label(i)))?;
            if !v.certificate.passes() || v.certificate.group_order > 1 << 10 {
                return Ok(None);
            }
            let lattice = FaceLattice::build(&v.context, &v.certificate).map_err(|e| e.to_string())?;
            ensure(lattice.diamond_condition(), || format!("{}: diamond condition", label(i)))?;
            ensure(lattice.is_partial_order(), || format!("{}: not a partial order", label(i)))?;
            ensure(lattice.flag_count() as u64 == v.certificate.group_order, || {
                format!("{}: {} flags", label(i), lattice.flag_count())
            })?;
            ensure(lattice.maximal_chain_count() == v.certificate.group_order as u128, || {
                format!("{}: {} maximal chains", label(i), lattice.maximal_chain_count())
            })?;
            let graph = lattice.flag_graph();
            for r in 0..lattice.rank() {
                ensure(graph.is_perfect_matching(r), || format!("{}: {r}-adjacency", label(i)))?;
            }
            Ok(Some(lattice.f_vector().to_vec()))
        })
        .collect();
    let mut n = 0;
    for r in results {
        n += r?.is_some() as usize;
    }
    let square = atlas::verify(
        &Instance::tight(&[4, 4]),
        &VerifyOptions {
            polytope: true,
            mode: IntersectionMode::Full,
            ..Default::default()
        },
    )
    .map_err(|e| e.to_string())?;
    let f = square.record.f_vector.unwrap_or_default();
    ensure(f == [4, 8, 4], || format!("tight {{4,4}} f-vector {f:?}"))?;
    Ok(format!("{n} lattices: diamonds, flags, matchings; tight {{4,4}} has f = (4,8,4)"))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("theorem sweep d 3..5, n 10..12", criterion_1),
        ("small-case tuple tables", criterion_2),
        ("tight quotients", criterion_3),
        ("rank-3 family H", criterion_4),
        ("proof-step orders and maps", criterion_5),
        ("oracle equivalence", criterion_6),
        ("order lower bound", criterion_7),
        ("commutator identities", criterion_8),
        ("face lattice structure", criterion_9),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let id = format!("criterion {}", n + 1);
        if !filter.is_empty() && !filter.iter().any(|f| id.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(msg) => println!("PASS {id} ({name}): {msg} [{secs:.1}s]"),
            Err(msg) => {
                failed += 1;
                println!("FAIL {id} ({name}): {msg} [{secs:.1}s]");
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
