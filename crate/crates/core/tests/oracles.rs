use regpoly::atlas::{self, Family, Instance, VerifyOptions};
use regpoly::constructions::{family_k, tight_quotient_presentation};
use regpoly::coset::{self, EnumerationLimits, EnumerationOptions, Strategy};
use regpoly::sggi::{parabolic_intersection_order, GroupContext, Subset};
use regpoly::words::{Presentation, Word};
use regpoly::{EnumError, Permutation, PermutationGroup};

fn opts() -> EnumerationOptions {
    EnumerationOptions::default()
}

fn pres(text: &str) -> Presentation {
    text.parse().unwrap()
}

fn regular_group(p: &Presentation) -> PermutationGroup {
    let t = coset::enumerate(p, &[], &opts()).unwrap();
    PermutationGroup::new(t.index(), t.to_permutations().unwrap()).unwrap()
}

#[test]
fn enumeration_examples() {
    let d6 = pres("generators 2\nrelator r0^2\nrelator r1^2\nrelator r0 r1 r0 r1 r0 r1");
    assert_eq!(coset::enumerate(&d6, &["r0".parse().unwrap()], &opts()).unwrap().live_count(), 3);
    let d8 = pres("generators 2\nrelator r0^2\nrelator r1^2\nrelator r0 r1 r0 r1 r0 r1 r0 r1");
    assert_eq!(coset::group_order(&d8, &opts()).unwrap(), 8);
    let tight = tight_quotient_presentation(&[4, 4]).unwrap();
    assert_eq!(coset::group_order(&tight, &opts()).unwrap(), 32);
    assert_eq!(coset::subgroup_index(&tight, &[1, 2], &opts()).unwrap(), 4);
    assert_eq!(coset::subgroup_index(&tight, &[0, 1, 2], &opts()).unwrap(), 1);
    assert_eq!(coset::subgroup_index(&tight, &[], &opts()).unwrap(), 32);
    assert_eq!(coset::group_order(&pres("generators 1\nrelator r0^2"), &opts()).unwrap(), 2);
    assert_eq!(coset::group_order(&family_k(4, &[2, 2, 2]).unwrap(), &opts()).unwrap(), 128);
    let a = Instance::a_tuple(&[1, 2, 2]).presentation().unwrap();
    assert_eq!(coset::group_order(&a, &opts()).unwrap(), 32);
}

#[test]
fn permutations_from_tables() {
    let d8 = pres("generators 2\nrelator r0^2\nrelator r1^2\nrelator r0 r1 r0 r1 r0 r1 r0 r1");
    let perms = coset::enumerate(&d8, &[], &opts()).unwrap().to_permutations().unwrap();
    assert_eq!(perms[0].order(), 2);
    assert_eq!(perms[1].order(), 2);
    assert_eq!(perms[0].then(&perms[1]).order(), 4);
    let whole = coset::enumerate(&d8, &[Word::generator(0), Word::generator(1)], &opts()).unwrap();
    let perms = whole.to_permutations().unwrap();
    assert!(perms.iter().all(|p| p.degree() == 1 && p.is_identity()));
    let k = family_k(3, &[2, 2]).unwrap();
    let perms = coset::enumerate(&k, &[], &opts()).unwrap().to_permutations().unwrap();
    assert_eq!(perms[0].then(&perms[1]).order(), 4);
    assert_eq!(perms[1].then(&perms[2]).order(), 4);
}

#[test]
fn limit_is_reported() {
    let free = pres("generators 2\nrelator r0^2\nrelator r1^2");
    let tiny = EnumerationOptions::new(EnumerationLimits::with_max_cosets(500), Strategy::Hlt);
    assert!(matches!(coset::group_order(&free, &tiny), Err(EnumError::LimitExceeded { .. })));
}

#[test]
fn order_examples() {
    let s3 = PermutationGroup::new(
        3,
        vec![
            Permutation::from_cycles(3, &[&[0, 1]]).unwrap(),
            Permutation::from_cycles(3, &[&[1, 2]]).unwrap(),
        ],
    )
    .unwrap();
    assert_eq!(s3.order(), 6);
    assert_eq!(s3.stabilizer_of_point(0).unwrap().order(), 2);
    assert_eq!(PermutationGroup::trivial(5).order(), 1);
    assert_eq!(PermutationGroup::trivial(5).stabilizer_of_point(3).unwrap().order(), 1);
    let h = Instance::h(10, 2, 2).presentation().unwrap();
    assert_eq!(regular_group(&h).order(), 1 << 10);
}

#[test]
fn element_orders_in_g() {
    let p = Instance::g(4, 10, &[2, 2, 2]).presentation().unwrap();
    let g = regular_group(&p);
    assert_eq!(g.element_order(&Word::from_generators(&[0, 1])).unwrap(), 4);
    assert_eq!(g.element_order(&Word::from_generators(&[0, 2])).unwrap(), 2);
    assert_eq!(g.element_order(&Word::identity()).unwrap(), 1);
}

#[test]
fn vertex_action_of_tight_square_quotient() {
    let p = tight_quotient_presentation(&[4, 4]).unwrap();
    let t = coset::enumerate(&p, &[Word::generator(1), Word::generator(2)], &opts()).unwrap();
    assert_eq!(t.index(), 4);
    let action = PermutationGroup::new(4, t.to_permutations().unwrap()).unwrap();
    assert_eq!(action.orbit(0).unwrap().len(), 4);
    assert_eq!(action.order(), 8);
    for point in 0..4 {
        assert_eq!(action.stabilizer_of_point(point).unwrap().order(), 2);
    }
    let ctx = GroupContext::new(p, opts()).unwrap();
    assert_eq!(ctx.order() / t.index() as u64, 8);
    assert_eq!(ctx.parabolic_order(Subset::from_indices(&[1, 2])), 8);
}

#[test]
fn orbit_stabilizer_on_regular_actions() {
    for i in [Instance::g(4, 10, &[2, 2, 2]), Instance::tight(&[4, 8]), Instance::h(10, 2, 5)] {
        let g = regular_group(&i.presentation().unwrap());
        for b in [0, 1, (g.degree() / 2) as u32, g.degree() as u32 - 1] {
            let orbit = g.orbit(b).unwrap().len() as u128;
            assert_eq!(g.order(), orbit * g.stabilizer_of_point(b).unwrap().order());
        }
        assert!(g.chain().verify_full());
        assert!(g.chain().verify_random(64, 7));
    }
}

#[test]
fn intersection_examples() {
    let tight = tight_quotient_presentation(&[4, 4]).unwrap();
    assert_eq!(parabolic_intersection_order(&tight, &[0, 1], &[1, 2], &opts()).unwrap(), 2);
    assert_eq!(parabolic_intersection_order(&tight, &[0, 1], &[0, 1], &opts()).unwrap(), 8);
    let g = Instance::g(4, 10, &[2, 2, 2]).presentation().unwrap();
    let meet = parabolic_intersection_order(&g, &[0, 1, 2], &[1, 2, 3], &opts()).unwrap();
    let index = coset::subgroup_index(&g, &[1, 2], &opts()).unwrap();
    assert_eq!(meet, (1 << 10) / index);
}

#[test]
fn intersection_orders_match_element_sets() {
    let ctx = GroupContext::new(Instance::g(5, 11, &[2, 3, 2, 2]).presentation().unwrap(), opts()).unwrap();
    for (i, j) in regpoly::sggi::canonical_pairs(5, false) {
        let by_action = ctx.intersection_order(i, j).unwrap();
        assert_eq!(by_action, ctx.intersection_order_by_elements(i, j), "{i} {j}");
        assert_eq!(ctx.parabolic_order(i) % by_action, 0);
        assert_eq!(ctx.parabolic_order(j) % by_action, 0);
        assert!(by_action >= ctx.parabolic_order(i.meet(j)));
    }
}

#[test]
fn strategies_produce_identical_tables() {
    let felsch = EnumerationOptions::new(Default::default(), Strategy::Felsch);
    for i in [
        Instance::g(3, 12, &[3, 4]),
        Instance::g(5, 12, &[2, 2, 3, 2]),
        Instance::new(Family::M, 4, Some(11), vec![3, 2, 2]),
        Instance::tight(&[8, 4, 8]),
    ] {
        let p = i.presentation().unwrap();
        for sub in [vec![], vec![0], vec![1, 2], (1..p.generator_count()).collect()] {
            let words: Vec<Word> = sub.iter().map(|&g| Word::generator(g as u32)).collect();
            let a = coset::enumerate(&p, &words, &opts()).unwrap();
            let b = coset::enumerate(&p, &words, &felsch).unwrap();
            assert_eq!(a.dump(), b.dump(), "{} over {sub:?}", i.params_text());
            assert!(a.verify(&p, &words));
        }
    }
}

#[test]
fn certificate_round_trips() {
    let v = atlas::verify(&Instance::g(4, 11, &[3, 2, 2]), &VerifyOptions::default()).unwrap();
    let json = v.record.to_json();
    let back = atlas::CertificateRecord::from_json(&json).unwrap();
    assert_eq!(back, v.record);
    assert_eq!(back.instance(), Instance::g(4, 11, &[3, 2, 2]));
    let again = atlas::verify(&back.instance(), &VerifyOptions::default()).unwrap();
    assert_eq!(again.record.evidence_sha256, v.record.evidence_sha256);
}
