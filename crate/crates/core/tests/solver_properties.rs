use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sia_core::bnb::{round_incumbent, solve, solve_model, BnbConfig, BranchRule, SearchOrder};
use sia_core::instance::{check_constraints, objective, validate, RawInstance, SiaInstance, SolveStatus};
use sia_core::lp::{solve_lp, LpOptions, LpStatus};
use sia_core::milp::build_milp;
use sia_core::oracle::brute_force_solve;
use sia_core::rational::Rational;

fn tiny(seed: u64) -> SiaInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ni, nj, nk) = (rng.gen_range(1..=3), rng.gen_range(1..=2), rng.gen_range(1..=2));
    let r = |rng: &mut ChaCha8Rng, hi: i64| Rational::from_int(rng.gen_range(0..=hi));
    let raw = RawInstance {
        num_interfaces: ni,
        num_services: nj,
        num_resources: nk,
        demand: (0..nj).map(|_| (0..nk).map(|_| rng.gen_range(0..=3)).collect()).collect(),
        capacity: (0..ni).map(|_| (0..nk).map(|_| rng.gen_range(1..=4)).collect()).collect(),
        unit_cost: (0..ni).map(|_| (0..nk).map(|_| r(&mut rng, 3)).collect()).collect(),
        activation_cost: (0..ni).map(|_| r(&mut rng, 6)).collect(),
        overhead: rng.gen_bool(0.5).then(|| {
            (0..ni)
                .map(|_| (0..nj).map(|_| (0..nk).map(|_| Rational::new(rng.gen_range(0..=2), 4)).collect()).collect())
                .collect()
        }),
    };
    validate(raw).unwrap()
}

/// Replaying without pruning explores the whole tree; the optimum must not
/// move, which shows no pruned subtree held a better point.
#[test]
fn pruning_audit() {
    let mut audited = 0;
    for seed in 0..60 {
        let inst = tiny(seed);
        let model = build_milp(&inst);
        let pruned = solve_model(&model, &BnbConfig::default(), None).unwrap();
        let full = solve_model(&model, &BnbConfig { prune: false, ..BnbConfig::default() }, None).unwrap();
        assert_eq!(pruned.status, full.status, "seed {seed}");
        assert_eq!(pruned.objective, full.objective, "seed {seed}");
        assert!(full.stats.nodes >= pruned.stats.nodes);
        if pruned.status == SolveStatus::Optimal {
            audited += 1;
        }
    }
    assert!(audited >= 20, "only {audited} feasible instances");
}

#[test]
fn child_bounds_never_drop_below_parents() {
    for seed in 0..60 {
        let model = build_milp(&tiny(seed));
        for rule in [BranchRule::ActFirstMostFractional, BranchRule::XMostFractional] {
            for order in [SearchOrder::BestBound, SearchOrder::DepthFirst] {
                let cfg = BnbConfig { branch_rule: rule, search_order: order, ..BnbConfig::default() };
                let out = solve_model(&model, &cfg, None).unwrap();
                assert_eq!(out.bound_regressions, 0, "seed {seed}");
                if let (Some(root), Some(best)) = (&out.stats.root_bound, &out.objective) {
                    assert!(root <= best);
                }
            }
        }
    }
}

#[test]
fn solutions_are_self_consistent_and_match_the_oracle() {
    for seed in 100..160 {
        let inst = tiny(seed);
        let oracle = brute_force_solve(&inst, 10_000_000).ok().map(|r| r.objective);
        match solve(&inst, &BnbConfig::default()) {
            Ok(sol) => {
                assert_eq!(Some(sol.objective().clone()), oracle, "seed {seed}");
                assert_eq!(&objective(&inst, sol.allocation()).unwrap(), sol.objective());
                assert!(check_constraints(&inst, sol.allocation()).unwrap().all_satisfied());
            }
            Err(_) => assert_eq!(oracle, None, "seed {seed}"),
        }
    }
}

#[test]
fn identical_runs_give_identical_trees() {
    for seed in 0..20 {
        let inst = tiny(seed);
        let a = solve(&inst, &BnbConfig::default());
        let b = solve(&inst, &BnbConfig::default());
        match (a, b) {
            (Ok(a), Ok(b)) => {
                assert_eq!(a.stats().nodes, b.stats().nodes);
                assert_eq!(a.allocation(), b.allocation());
            }
            (Err(a), Err(b)) => assert_eq!(a, b),
            _ => panic!("seed {seed}: runs disagree"),
        }
    }
}

/// The rounding heuristic only ever proposes allocations that pass the
/// exact constraint check and cost no less than the proven optimum.
#[test]
fn rounding_never_returns_a_false_incumbent() {
    for seed in 200..260 {
        let inst = tiny(seed);
        let model = build_milp(&inst);
        let lp = solve_lp(&model.relaxation(), &LpOptions::default()).unwrap();
        if lp.status != LpStatus::Optimal {
            continue;
        }
        let Some(found) = round_incumbent(&lp.point, &inst) else { continue };
        assert!(check_constraints(&inst, &found.allocation).unwrap().all_satisfied());
        let best = brute_force_solve(&inst, 10_000_000).unwrap().objective;
        assert!(found.objective >= best, "seed {seed}");
    }
}
