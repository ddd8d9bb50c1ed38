mod common;

use common::*;
use proptest::prelude::*;
use rand::Rng;
use wrti::checker::check_proof;
use wrti::cnf::{formula_status, generate_fphp, generate_php, Assignment, Clause, Formula, Restricted, Var};
use wrti::conflict::{ConflictGraph, Decomposition};
use wrti::proof::{ProofBuilder, SystemDescriptor};
use wrti::solvers::*;

fn none() -> Assignment {
    Assignment::new()
}

fn replay_dll(f: &Formula, a: &Assignment, mut s: Schedule) -> Run {
    dll(f, a, &mut s).unwrap()
}

/// Learns nothing: every conflict is closed with the trivial decomposition.
struct Forgetful;

impl LearningStrategy for Forgetful {
    fn name(&self) -> String {
        "none".into()
    }
    fn analyze(&mut self, _ctx: &Ctx, g: ConflictGraph) -> Analysis {
        let decomposition = Decomposition::trivial(&g);
        Analysis { graph: g, decomposition, learned: Vec::new() }
    }
}

#[test]
fn dll_unit_contradiction_round_trip() {
    let f = formula(&[&[1], &[-1]]);
    let run = dll(&f, &none(), &mut Smallest).unwrap();
    assert_eq!(run.outcome, Outcome::Unsat);
    assert_eq!(run.trace.calls(), 2);
    let p = trace_to_rt(&run.trace, &f, &none()).unwrap();
    assert_eq!(p.len(), 3);
    assert!(check_proof(&p, &f, &SystemDescriptor::rt().regular(), true).accepted());
    let replay = replay_dll(&f, &none(), rt_to_schedule(&p, &none()).unwrap());
    assert_eq!(replay.outcome, Outcome::Unsat);
    assert!(replay.trace.calls() <= 2);
}

#[test]
fn single_leaf_proof_needs_no_calls() {
    let f = formula(&[&[1, 2], &[-1]]);
    let a = Assignment::from_lits([lit(-1), lit(-2)]);
    let mut b = ProofBuilder::new(2);
    b.axiom(c(&[1, 2]));
    let p = b.finish().unwrap();
    let s = rt_to_schedule(&p, &a).unwrap();
    assert!(s.steps.is_empty());
    assert_eq!(replay_dll(&f, &a, s).trace.calls(), 0);
}

#[test]
fn branch_without_pivot_forwards_child() {
    let f = formula(&[&[2], &[1, 3]]);
    let trace = SearchTrace {
        algorithm: Algorithm::Dll,
        num_vars: 3,
        seed: 0,
        heuristic: "hand".into(),
        learning: "none".into(),
        root: Event::Branch {
            var: Var::new(1),
            first: false,
            learned: None,
            children: vec![Event::Falsified { clause: c(&[2]) }, Event::Falsified { clause: c(&[2]) }],
        },
    };
    let a = Assignment::from_lits([lit(-2)]);
    let p = trace_to_rt(&trace, &f, &a).unwrap();
    assert_eq!(p.len(), 1);
    assert_eq!(p.root_clause(), &c(&[2]));
}

#[test]
fn dll_php2_round_trip() {
    let f = generate_php(2).unwrap();
    let run = dll(&f, &none(), &mut Smallest).unwrap();
    assert!(run.trace.is_unsat());
    assert!(!is_sat(&f));
    let s = run.trace.calls();
    let p = trace_to_rt(&run.trace, &f, &none()).unwrap();
    assert!(p.len() <= s + 1);
    assert!(check_proof(&p, &f, &SystemDescriptor::rt().regular(), true).accepted());
    let replay = replay_dll(&f, &none(), rt_to_schedule(&p, &none()).unwrap());
    assert!(replay.trace.is_unsat());
    assert!(replay.trace.calls() < p.len());
}

fn implied_unit_example() -> Formula {
    // a = 1, x = 2
    formula(&[&[-1, 2], &[-1, -2], &[1]])
}

#[test]
fn dll_l_up_learns_from_root_conflict() {
    let f = implied_unit_example();
    for (ls, want) in [(Learning::FirstUip, c(&[-1])), (Learning::AllLearnable, c(&[-1])), (Learning::Trivial, c(&[]))] {
        let mut ls = ls;
        let run = dll_l_up(&f, &none(), &mut Smallest, &mut ls, false).unwrap();
        assert_eq!(run.outcome, Outcome::Unsat);
        assert_eq!(run.trace.calls(), 0);
        assert!(run.trace.learned().contains(&want), "{:?}: {:?}", ls, run.trace.learned());
        let p = trace_to_regwrti(&run.trace, &f).unwrap();
        assert!(check_proof(&p, &f, &SystemDescriptor::wrti().regular(), true).accepted());
    }
}

// The quadratic size bound cannot hold when no call is made, nor for one
// variable: every refutation of {x},{-x} has three nodes.
#[test]
fn size_bound_fails_on_tiny_runs() {
    let f = formula(&[&[1], &[-1]]);
    let greedy = dll_l_up(&f, &none(), &mut Smallest, &mut Learning::FirstUip, false).unwrap();
    assert_eq!(greedy.trace.calls(), 0);
    assert_eq!(trace_to_regwrti(&greedy.trace, &f).unwrap().len(), 3);

    let mut h = NonGreedy { inner: Smallest, levels: 1 };
    let eager = dll_l_up(&f, &none(), &mut h, &mut Learning::FirstUip, true).unwrap();
    assert_eq!(eager.trace.calls(), 2);
    assert_eq!(trace_to_regwrti(&eager.trace, &f).unwrap().len(), 3);
}

#[test]
fn dll_l_up_finds_model() {
    let f = formula(&[&[1, 2], &[-1, 3]]);
    let run = dll_l_up(&f, &none(), &mut Smallest, &mut Learning::FirstUip, false).unwrap();
    let Outcome::Sat(m) = run.outcome else { panic!("expected a model") };
    assert!(formula_status(&f, &m).is_one());
}

#[test]
fn dll_l_up_php3_learns_implied_clauses() {
    let f = generate_php(3).unwrap();
    let run = dll_l_up(&f, &none(), &mut Smallest, &mut Learning::FirstUip, false).unwrap();
    assert_eq!(run.outcome, Outcome::Unsat);
    assert!(!run.trace.learned().is_empty());
    for c in run.trace.learned() {
        assert!(implies(&f, &c), "{c} not implied");
    }
}

#[test]
fn regwrti_php2_bound_and_replay() {
    let f = generate_php(2).unwrap();
    let run = dll_l_up(&f, &none(), &mut Smallest, &mut Learning::FirstUip, false).unwrap();
    let s = run.trace.calls();
    let p = trace_to_regwrti(&run.trace, &f).unwrap();
    assert!(check_proof(&p, &f, &SystemDescriptor::wrti().regular(), true).accepted());
    assert!(p.len() <= s * 36, "{} > {}", p.len(), s * 36);
    let (mut h, mut ls) = regwrti_to_schedule(&p, &f).unwrap();
    let replay = dll_l_up(&f, &none(), &mut h, &mut ls, true).unwrap();
    assert_eq!(replay.outcome, Outcome::Unsat);
    assert!(replay.trace.calls() < p.len());
}

#[test]
fn no_learning_gives_lemma_free_proof() {
    let f = generate_php(2).unwrap();
    let run = dll_l_up(&f, &none(), &mut Smallest, &mut Forgetful, false).unwrap();
    assert!(run.trace.learned().is_empty());
    let p = trace_to_regwrti(&run.trace, &f).unwrap();
    assert!(!p.has_lemmas());
    assert!(check_proof(&p, &f, &SystemDescriptor::wrt().regular(), true).accepted());
}

#[test]
fn regwrti_unit_refutation_replays_without_calls() {
    let f = formula(&[&[1], &[-1]]);
    let mut b = ProofBuilder::new(1);
    let l = b.axiom(c(&[1]));
    let r = b.axiom(c(&[-1]));
    b.res(lit(1), l, r).unwrap();
    let p = b.finish().unwrap();
    let (mut h, mut ls) = regwrti_to_schedule(&p, &f).unwrap();
    let replay = dll_l_up(&f, &none(), &mut h, &mut ls, true).unwrap();
    assert_eq!(replay.outcome, Outcome::Unsat);
    assert!(replay.trace.calls() < 3);
}

#[test]
fn regwrti_replay_branches_on_absent_pivot() {
    let f = Formula::new(2, vec![c(&[1]), c(&[-1])]).unwrap();
    let mut b = ProofBuilder::new(2);
    let x = b.axiom(c(&[1]));
    let y = b.axiom(c(&[-1]));
    let l = b.res(lit(1), x, y).unwrap();
    let r = b.lemma(l);
    b.wres(lit(2), l, r);
    let p = b.finish().unwrap();
    assert!(check_proof(&p, &f, &SystemDescriptor::wrti().regular(), true).accepted());
    let (mut h, mut ls) = regwrti_to_schedule(&p, &f).unwrap();
    let replay = dll_l_up(&f, &none(), &mut h, &mut ls, true).unwrap();
    assert_eq!(replay.outcome, Outcome::Unsat);
    assert!(matches!(replay.trace.root, Event::Branch { var, .. } if var == Var::new(2)));
    assert!(replay.trace.calls() < p.len());
}

#[test]
fn dll_learn_unit_contradiction() {
    let f = formula(&[&[1], &[-1]]);
    let run = dll_learn(&f, &none(), &mut Smallest, false).unwrap();
    assert_eq!(run.outcome, Outcome::Unsat);
    assert_eq!(run.trace.calls(), 2);
    assert_eq!(run.trace.learned(), vec![Clause::empty()]);
    let p = trace_to_regwrtl(&run.trace, &f).unwrap();
    assert_eq!(p.len(), 3);
    assert!(check_proof(&p, &f, &SystemDescriptor::wrtl().regular(), true).accepted());
}

#[test]
fn dll_learn_finds_model() {
    let f = formula(&[&[1]]);
    let run = dll_learn(&f, &none(), &mut Smallest, false).unwrap();
    assert!(run.outcome.is_sat());
}

#[test]
fn dll_learn_branches_past_large_falsified_clauses() {
    // a, b, c, x = 1..4; under a = b = c = 0 only the long clauses are falsified
    let f = formula(&[&[1, 2, 3], &[1, 2, 3, 4], &[1, 4], &[2, -4]]);
    let a = Assignment::from_lits([lit(-1), lit(-2), lit(-3)]);
    let mut script = Schedule::default();
    script.steps.insert(vec![], Step::Branch { var: Var::new(4), first: false });
    let run = dll_learn(&f, &a, &mut script, true).unwrap();
    assert_eq!(run.trace.learned(), vec![c(&[1, 2])]);
    let greedy = dll_learn(&f, &a, &mut Smallest, false).unwrap();
    assert_eq!(greedy.trace.calls(), 0);
}

#[test]
fn regwrtl_php2_proof_schedule_proof() {
    let f = generate_php(2).unwrap();
    let run = dll_learn(&f, &none(), &mut Smallest, false).unwrap();
    let p = trace_to_regwrtl(&run.trace, &f).unwrap();
    assert_eq!(p.len(), run.trace.calls() + 1);
    let mut s = regwrtl_to_schedule(&p, &f).unwrap();
    let replay = dll_learn(&f, &none(), &mut s, true).unwrap();
    assert_eq!(replay.trace.calls(), p.len() - 1);
    assert_eq!(trace_to_regwrtl(&replay.trace, &f).unwrap(), p);
}

#[test]
fn empty_clause_means_no_calls() {
    let f = formula(&[&[], &[1]]);
    let run = dll_learn(&f, &none(), &mut Smallest, false).unwrap();
    assert_eq!(run.trace.calls(), 0);
    let p = trace_to_regwrtl(&run.trace, &f).unwrap();
    assert_eq!(p.len(), 1);
    let mut s = regwrtl_to_schedule(&p, &f).unwrap();
    assert_eq!(dll_learn(&f, &none(), &mut s, true).unwrap().trace.calls(), 0);
    let up = dll_l_up(&f, &none(), &mut Smallest, &mut Learning::Trivial, false).unwrap();
    assert_eq!(up.outcome, Outcome::Unsat);
    assert_eq!(trace_to_regwrti(&up.trace, &f).unwrap().len(), 1);
}

#[test]
fn trace_files_round_trip_on_families() {
    for f in [generate_php(2).unwrap(), generate_fphp(2).unwrap()] {
        let traces = [
            dll(&f, &none(), &mut UnitFirst).unwrap().trace,
            dll_l_up(&f, &none(), &mut Smallest, &mut Learning::AllLearnable, false).unwrap().trace,
            dll_learn(&f, &none(), &mut NonGreedy { inner: Smallest, levels: 1 }, true).unwrap().trace,
        ];
        for t in traces {
            assert_eq!(parse_trace(&write_trace(&t)).unwrap(), t);
        }
    }
}

fn random_formula(seed: u64) -> Formula {
    let mut r = rng(seed);
    let n = r.gen_range(1..=9);
    let m = r.gen_range(1..=4 * n as usize);
    let k = r.gen_range(1..=3.min(n as usize));
    random_kcnf(&mut r, n, m, k)
}

fn heuristic(which: u8, seed: u64) -> Box<dyn Heuristic> {
    match which % 3 {
        0 => Box::new(Smallest),
        1 => Box::new(UnitFirst),
        _ => Box::new(Seeded::new(seed)),
    }
}

fn check_model(f: &Formula, o: &Outcome) -> bool {
    match o {
        Outcome::Sat(m) => matches!(formula_status(f, m), Restricted::One),
        Outcome::Unsat => !is_sat(f),
    }
}


proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn dll_verdicts_and_certificates(seed in any::<u64>(), which in 0u8..3) {
        let f = random_formula(seed);
        let run = dll(&f, &none(), heuristic(which, seed).as_mut()).unwrap();
        prop_assert!(check_model(&f, &run.outcome));
        if run.outcome == Outcome::Unsat {
            let s = run.trace.calls();
            let p = trace_to_rt(&run.trace, &f, &none()).unwrap();
            prop_assert!(p.len() <= s + 1);
            prop_assert!(check_proof(&p, &f, &SystemDescriptor::rt().regular(), true).accepted());
            let replay = replay_dll(&f, &none(), rt_to_schedule(&p, &none()).unwrap());
            prop_assert!(replay.trace.is_unsat());
            prop_assert!(replay.trace.calls() < p.len());
        }
    }

    #[test]
    fn dll_l_up_verdicts_and_certificates(seed in any::<u64>(), which in 0u8..3, ls in 0usize..4, eager in 0usize..3) {
        let f = random_formula(seed);
        let mut ls = Learning::ALL[ls];
        let mut h = NonGreedy { inner: heuristic(which, seed), levels: eager };
        let run = dll_l_up(&f, &none(), &mut h, &mut ls, eager > 0).unwrap();
        prop_assert!(check_model(&f, &run.outcome));
        for c in run.trace.learned() {
            prop_assert!(implies(&f, &c));
        }
        if run.outcome == Outcome::Unsat {
            let s = run.trace.calls();
            let n = f.vars().len();
            let p = trace_to_regwrti(&run.trace, &f).unwrap();
            prop_assert!(check_proof(&p, &f, &SystemDescriptor::wrti().regular(), true).accepted());
            if s > 0 && n >= 2 {
                prop_assert!(p.len() <= s * n * n, "size {} > {}·{}²", p.len(), s, n);
            } else if s == 0 {
                prop_assert!(p.len() <= (n * n).max(3));
            }
            let derived: std::collections::BTreeSet<_> =
                p.input_derived_nodes().into_iter().map(|i| p.clause(i).clone()).collect();
            for c in run.trace.learned() {
                prop_assert!(derived.contains(&c));
            }
            let (mut sh, mut sl) = regwrti_to_schedule(&p, &f).unwrap();
            let replay = dll_l_up(&f, &none(), &mut sh, &mut sl, true).unwrap();
            prop_assert_eq!(replay.outcome, Outcome::Unsat);
            prop_assert!(replay.trace.calls() < p.len());
        }
    }

    #[test]
    fn dll_learn_exact_correspondence(seed in any::<u64>(), which in 0u8..3, eager in 0usize..3) {
        let f = random_formula(seed);
        let mut h = NonGreedy { inner: heuristic(which, seed), levels: eager };
        let run = dll_learn(&f, &none(), &mut h, eager > 0).unwrap();
        prop_assert!(check_model(&f, &run.outcome));
        for c in run.trace.learned() {
            prop_assert!(implies(&f, &c));
        }
        if run.outcome == Outcome::Unsat {
            let p = trace_to_regwrtl(&run.trace, &f).unwrap();
            prop_assert_eq!(p.len(), run.trace.calls() + 1);
            prop_assert!(check_proof(&p, &f, &SystemDescriptor::wrtl().regular(), true).accepted());
            let mut s = regwrtl_to_schedule(&p, &f).unwrap();
            let replay = dll_learn(&f, &none(), &mut s, true).unwrap();
            prop_assert_eq!(replay.trace.calls(), p.len() - 1);
            prop_assert_eq!(trace_to_regwrtl(&replay.trace, &f).unwrap(), p);
        }
    }

    #[test]
    fn runs_are_deterministic(seed in any::<u64>(), ls in 0usize..4) {
        let f = random_formula(seed);
        let once = || {
            let a = dll(&f, &none(), &mut Seeded::new(seed)).unwrap().trace;
            let mut strategy = Learning::ALL[ls];
            let b = dll_l_up(&f, &none(), &mut Seeded::new(seed), &mut strategy, false).unwrap().trace;
            let c = dll_learn(&f, &none(), &mut Seeded::new(seed), false).unwrap().trace;
            [write_trace(&a), write_trace(&b), write_trace(&c)]
        };
        let first = once();
        prop_assert_eq!(&first, &once());
        for t in &first {
            prop_assert_eq!(&write_trace(&parse_trace(t).unwrap()), t);
        }
    }
}

#[test]
fn families_agree_with_oracle() {
    let mut fs = vec![generate_php(1).unwrap(), generate_php(2).unwrap(), generate_fphp(2).unwrap()];
    let mut sat = generate_php(2).unwrap().clauses().to_vec();
    sat.remove(0);
    fs.push(Formula::new(6, sat).unwrap());
    for f in fs {
        let truth = is_sat(&f);
        assert_eq!(dll(&f, &none(), &mut Smallest).unwrap().outcome.is_sat(), truth);
        for mut ls in Learning::ALL {
            assert_eq!(dll_l_up(&f, &none(), &mut UnitFirst, &mut ls, false).unwrap().outcome.is_sat(), truth);
        }
        assert_eq!(dll_learn(&f, &none(), &mut Smallest, false).unwrap().outcome.is_sat(), truth);
    }
}

