//! Acceptance suite: one PASS/FAIL line per criterion. Runs without the
//! libtest harness so the lines always appear in the output.

mod common;

use std::collections::BTreeSet;
use std::process::ExitCode;
use std::time::Instant;

use clonelab::axioms::{embed_family, is_clone_structure, Axiom};
use clonelab::clones::all_clone_sets;
use clonelab::pqtree::{build_tree, tree_to_family, Shape};
use clonelab::single_crossing::{
    all_sc_orders, brute_force_sc, fixed_order_analysis, is_single_crossing, is_single_crossing_wrt, sc_declone_exact, sc_declone_fixed,
    x3c_reduction, X3CInstance, DEFAULT_EXACT_BUDGET,
};
use clonelab::single_peaked::{
    basic_declone_sp, brute_force_axis, brute_force_optimal_sp_declone, declone_sp, is_single_peaked, is_single_peaked_wrt,
};
use clonelab::synthesis::{compose, implement_family, implement_string, slide, voters_needed};
use clonelab::util::random_profile;
use clonelab::{parse_profile, CandidateSet, SetFamily};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const EXAMPLE: &str = "4 3\nnames: a,b,c,d\na,b,c,d\nb,d,c,a\na,b,d,c\n";

/// Outcome of one criterion. A criterion that fails only because the
/// property it asserts is false in general carries the reason in
/// `unattainable` and does not fail the run.
struct Verdict {
    pass: bool,
    unattainable: Option<String>,
    detail: String,
}

impl From<(bool, String)> for Verdict {
    fn from((pass, detail): (bool, String)) -> Verdict {
        Verdict { pass, unattainable: None, detail }
    }
}

fn families_from_profiles() -> Vec<SetFamily> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut seen = BTreeSet::new();
    for _ in 0..3000 {
        let p = common::mixed_profile(8, 4, &mut rng);
        seen.insert(all_clone_sets(&p).to_json());
    }
    seen.iter().map(|j| SetFamily::from_json(j).expect("roundtrip")).collect()
}

fn c1() -> Verdict {
    c1_check().into()
}

fn c1_check() -> (bool, String) {
    let p = parse_profile(EXAMPLE).expect("example parses");
    let got: Vec<String> = all_clone_sets(&p).iter().map(|s| p.display_set(s)).collect();
    let want = ["{a}", "{b}", "{c}", "{d}", "{c,d}", "{b,c,d}", "{a,b,c,d}"];
    let mut g = got.clone();
    g.sort();
    let mut w: Vec<String> = want.iter().map(|s| s.to_string()).collect();
    w.sort();
    (g == w, format!("clone sets {}", got.join(" ")))
}

fn c2() -> Verdict {
    c2_check().into()
}

fn c2_check() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let m = rng.gen_range(1..=10);
        let n = rng.gen_range(1..=5);
        let p = random_profile(m, n, &mut rng);
        let ratio = all_clone_sets(&p).len() as f64 / (m * (m + 1) / 2) as f64;
        worst = worst.max(ratio);
    }
    let tight = (1..=10).all(|m| all_clone_sets(&implement_string(m).expect("m >= 1")).len() == m * (m + 1) / 2);
    (worst <= 1.0 && tight, format!("10000 profiles, max |C|/(m(m+1)/2) = {worst:.3}; string attains the bound for m = 1..10: {tight}"))
}

fn c3(families: &[SetFamily]) -> Verdict {
    c3_check(families).into()
}

fn c3_check(families: &[SetFamily]) -> (bool, String) {
    let positives = families.iter().filter(|f| is_clone_structure(f).verdict).count();
    let rings = (3..=6).all(|m| is_clone_structure(&SetFamily::ring(m)).violates(Axiom::A5));
    let nonempty_powerset = |m: usize| {
        let sets = (1u32..1 << m).map(|mask| CandidateSet::new((0..m).filter(|&c| mask >> c & 1 == 1)));
        SetFamily::new(m, sets).expect("valid sets")
    };
    let powersets = (4..=5).all(|m| is_clone_structure(&nonempty_powerset(m)).violates(Axiom::A4));
    (
        positives == families.len() && rings && powersets,
        format!(
            "{positives}/{} profile families accepted; ring m=3..6 tagged A5: {rings}; nonempty powerset m=4,5 tagged A4: {powersets}",
            families.len()
        ),
    )
}

fn c4(families: &[SetFamily]) -> Verdict {
    c4_check(families).into()
}

fn c4_check(families: &[SetFamily]) -> (bool, String) {
    let mut bad = 0;
    let mut max_voters = 0;
    for f in families {
        let t = build_tree(f).expect("clone structure");
        match implement_family(f) {
            Ok(p) if all_clone_sets(&p) == *f && p.n() <= 3 && p.n() == voters_needed(&t) => max_voters = max_voters.max(p.n()),
            _ => bad += 1,
        }
    }
    let strings = (1..=8).all(|m| implement_family(&SetFamily::string(m)).is_ok_and(|p| p.n() == 1));
    let fats = (4..=8).all(|m| implement_family(&SetFamily::fat(m)).is_ok_and(|p| p.n() == 2));
    let fat3 = implement_family(&SetFamily::fat(3)).is_ok_and(|p| p.n() == 3);
    (
        bad == 0 && strings && fats && fat3,
        format!(
            "{} families, {bad} failures, max voters {max_voters}; strings 1 voter: {strings}; fat m>3 2 voters: {fats}; fat m=3 3 voters: {fat3}",
            families.len()
        ),
    )
}

fn c5(families: &[SetFamily]) -> Verdict {
    c5_check(families).into()
}

fn c5_check(families: &[SetFamily]) -> (bool, String) {
    let bad = families.iter().filter(|f| build_tree(f).map(|t| tree_to_family(&t) != **f).unwrap_or(true)).count();
    // a=0, x=1, y=2, c=3
    let ex = SetFamily::new(
        4,
        [vec![0], vec![1], vec![2], vec![1, 2], vec![3], vec![0, 1, 2], vec![1, 2, 3], vec![0, 1, 2, 3]]
            .into_iter()
            .map(CandidateSet::from),
    )
    .expect("valid");
    let shape = build_tree(&ex).expect("clone structure").shape();
    let want = Shape::Q(vec![Shape::Leaf(0), Shape::P(vec![Shape::Leaf(1), Shape::Leaf(2)]), Shape::Leaf(3)]);
    (bad == 0 && shape == want, format!("{} roundtrips, {bad} mismatches; composed example tree {}", families.len(), shape.to_bracket()))
}

fn c6() -> Verdict {
    c6_check().into()
}

fn c6_check() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let (mut disagree, mut invalid, mut positives) = (0, 0, 0);
    for _ in 0..5000 {
        let p = random_profile(rng.gen_range(1..=6), rng.gen_range(1..=5), &mut rng);
        let fast = is_single_peaked(&p);
        let slow = brute_force_axis(&p).expect("m <= 8");
        disagree += usize::from(fast.is_some() != slow.is_some());
        invalid += [&fast, &slow].iter().filter(|w| w.as_ref().is_some_and(|a| !is_single_peaked_wrt(&p, a))).count();
        positives += usize::from(slow.is_some());
    }
    (
        disagree == 0 && invalid == 0,
        format!("5000 profiles ({positives} single-peaked): {disagree} verdict disagreements, {invalid} invalid witnesses"),
    )
}

fn c7() -> Verdict {
    c7_check().into()
}

fn c7_check() -> (bool, String) {
    let s = implement_string(3).expect("m >= 1");
    let p = compose(&s, 1, &s).expect("valid composition");
    let f = SetFamily::string(3);
    let implements = all_clone_sets(&p) == embed_family(&f, 1, &f).expect("valid embedding");
    let rejected = is_single_peaked(&p).is_none();
    let full = declone_sp(&p).candidate_count();
    let basic = basic_declone_sp(&p).0.candidate_count();
    (
        implements && rejected && full == 4 && basic <= 3,
        format!("implements the family: {implements}; rejected: {rejected}; full declone {full} candidates; basic {basic}"),
    )
}

fn c8() -> Verdict {
    c8_check().into()
}

fn c8_check() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let (mut mismatches, mut not_sp, mut improved, mut inputs_sp) = (0, 0, 0, 0);
    for _ in 0..500 {
        let m = rng.gen_range(2..=7);
        let (_, p) = common::synthesized_profile(m, &mut rng);
        inputs_sp += usize::from(is_single_peaked(&p).is_some());
        let fast = declone_sp(&p);
        let best = brute_force_optimal_sp_declone(&p).expect("m <= 7");
        mismatches += usize::from(fast.candidate_count() != best.candidate_count());
        not_sp += usize::from(is_single_peaked(&fast.profile).is_none());
        improved += usize::from(fast.candidate_count() > basic_declone_sp(&p).0.candidate_count());
    }
    (
        mismatches == 0 && not_sp == 0,
        format!("500 synthesized profiles ({inputs_sp} already single-peaked): {mismatches} count mismatches, {not_sp} non-single-peaked outputs; splits beat the basic algorithm on {improved}"),
    )
}

fn c9() -> Verdict {
    c9_check().into()
}

fn c9_check() -> (bool, String) {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let (mut disagree, mut invalid, mut positives) = (0, 0, 0);
    for _ in 0..5000 {
        let p = random_profile(rng.gen_range(1..=6), rng.gen_range(1..=6), &mut rng);
        let fast = is_single_crossing(&p);
        let slow = brute_force_sc(&p).expect("n <= 8");
        disagree += usize::from(fast.is_some() != slow.is_some());
        invalid += [&fast, &slow].iter().filter(|w| w.as_ref().is_some_and(|o| !is_single_crossing_wrt(&p, o))).count();
        positives += usize::from(slow.is_some());
    }
    let counts: Vec<usize> = (3..=6).map(|m| all_sc_orders(&slide(m).expect("m > 2")).expect("n <= 8").len()).collect();
    (
        disagree == 0 && invalid == 0 && counts.iter().all(|&c| c == 2),
        format!("5000 profiles ({positives} single-crossing): {disagree} disagreements, {invalid} invalid witnesses; slide orders for m=3..6: {counts:?}"),
    )
}

fn c10() -> Verdict {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut mismatches, mut not_sc, mut non_laminar, mut nontrivial) = (0, 0, 0, 0);
    let mut example = None;
    for _ in 0..500 {
        let p = random_profile(rng.gen_range(1..=6), rng.gen_range(1..=6), &mut rng);
        let ord = common::random_voter_order(p.n(), &mut rng);
        let a = fixed_order_analysis(&p, &ord).expect("order matches");
        let r = sc_declone_fixed(&p, &ord).expect("disjoint closures");
        mismatches += usize::from(r.candidate_count() != common::best_fixed_order_count(&p, &ord));
        not_sc += usize::from(!is_single_crossing_wrt(&r.profile, &ord));
        nontrivial += usize::from(a.collapsed.iter().any(|s| s.len() < p.m()));
        if !a.laminar {
            non_laminar += 1;
            let crossing = a
                .closures
                .iter()
                .enumerate()
                .find_map(|(i, x)| a.closures[i + 1..].iter().find(|y| x.bowtie(y)).map(|y| (x.clone(), y.clone())));
            let maximal_disjoint = clonelab::single_crossing::is_laminar(&a.collapsed)
                && a.collapsed.iter().enumerate().all(|(i, x)| a.collapsed[i + 1..].iter().all(|y| !x.intersects(y)));
            example.get_or_insert((p.canonical_key(), ord.voters().to_vec(), crossing, maximal_disjoint));
        }
    }
    let hard = mismatches == 0 && not_sc == 0;
    let detail = format!(
        "500 instances ({nontrivial} with a proper collapse): {mismatches} optimality mismatches, {not_sc} not single-crossing, {non_laminar} non-laminar closure families"
    );
    let unattainable = match (&example, hard) {
        (Some((orders, ord, Some((x, y)), true)), true) => Some(format!(
            "closures {x} and {y} cross for orders {orders:?} under voter order {ord:?}; the maximal closures are still pairwise disjoint"
        )),
        _ => None,
    };
    Verdict { pass: hard && non_laminar == 0, unattainable, detail }
}

fn c11() -> Verdict {
    c11_check().into()
}

fn c11_check() -> (bool, String) {
    let yes = X3CInstance::new(1, vec![[0, 1, 2]; 4]).expect("valid instance");
    let red = x3c_reduction(&yes).expect("valid instance");
    let found = sc_declone_exact(&red.profile, red.target, DEFAULT_EXACT_BUDGET).expect("within budget");
    let yes_ok = yes.has_exact_cover() && found.as_ref().is_some_and(|r| r.candidate_count() >= red.target);
    let yes_line =
        format!("yes k=1 s={} (m={}, n={}, target {}): feasible {}", red.s, red.profile.m(), red.profile.n(), red.target, found.is_some());

    // With k = 1 the only 3-subset of the base set is the base set itself,
    // so every k = 1 instance is a yes-instance. The negative side uses the
    // smallest padded no-instance family instead: k = 2, s = 7.
    let no =
        X3CInstance::new(2, vec![[0, 1, 2], [0, 3, 4], [0, 1, 5], [0, 2, 3], [0, 4, 5], [0, 1, 3], [0, 2, 4]]).expect("valid instance");
    let red_no = x3c_reduction(&no).expect("valid instance");
    let found_no = sc_declone_exact(&red_no.profile, red_no.target, DEFAULT_EXACT_BUDGET).expect("within budget");
    let no_ok = !no.has_exact_cover() && found_no.is_none();
    (
        yes_ok && no_ok,
        format!(
            "{yes_line}; no k=2 s={} (m={}, target {}): feasible {} (no k=1 no-instance exists)",
            red_no.s,
            red_no.profile.m(),
            red_no.target,
            found_no.is_some()
        ),
    )
}

fn main() -> ExitCode {
    if std::env::args().any(|a| a == "--list") {
        return ExitCode::SUCCESS;
    }
    let families = families_from_profiles();
    #[allow(clippy::type_complexity)]
    let criteria: Vec<(&str, Box<dyn Fn() -> Verdict + '_>)> = vec![
        ("example clone sets", Box::new(c1)),
        ("size bound", Box::new(c2)),
        ("characterization", Box::new(|| c3(&families))),
        ("constructive converse", Box::new(|| c4(&families))),
        ("PQ-tree roundtrip", Box::new(|| c5(&families))),
        ("single-peaked oracle", Box::new(c6)),
        ("string-in-string regression", Box::new(c7)),
        ("single-peaked decloning optimality", Box::new(c8)),
        ("single-crossing oracle", Box::new(c9)),
        ("fixed-order decloning", Box::new(c10)),
        ("reduction sanity", Box::new(c11)),
    ];
    let (mut failed, mut unattainable) = (0, 0);
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let v = check();
        let secs = start.elapsed().as_secs_f64();
        let status = match (&v.pass, &v.unattainable) {
            (true, _) => "PASS",
            (false, Some(_)) => "FAIL (unattainable)",
            (false, None) => "FAIL",
        };
        println!("criterion {:>2} {status} [{name}] {} ({secs:.1}s)", i + 1, v.detail);
        if !v.pass {
            match &v.unattainable {
                Some(why) => {
                    println!("             {why}");
                    unattainable += 1;
                }
                None => failed += 1,
            }
        }
    }
    println!(
        "acceptance: {} passed, {} failed ({unattainable} unattainable as stated)",
        criteria.len() - failed - unattainable,
        failed + unattainable
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
