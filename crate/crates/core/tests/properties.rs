mod common;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use priosel_core::domain::{
    decode_lexicographic, encode_lexicographic, pair_dominates, Criterion, Direction, QualitativeLevel, ScaleKind,
};
use priosel_core::fixtures::naples;
use priosel_core::io::{parse_scenario, save_scenario};
use priosel_core::ladder::build_ladder;
use priosel_core::outranking::{
    assign_ascending, assign_descending, AssignmentResult, CategoryInterval, OutrankingModel,
};
use priosel_core::solver::{brute_force_oracle, level_counts, sequential_lexicographic, solve_exact};
use priosel_core::srf::{compute_srf_weights, level_values, CardDeck};
use priosel_core::threshold::{calibrate_affine, AnchorPair, ThresholdSpec};

fn level() -> impl Strategy<Value = u8> {
    1u8..=4
}

proptest! {
    #[test]
    fn composite_code_is_a_bijection(a in level(), b in level()) {
        let code = encode_lexicographic(a, b).unwrap();
        prop_assert!((1..=16).contains(&code));
        prop_assert_eq!(decode_lexicographic(code).unwrap(), (a, b));
    }

    #[test]
    fn composite_code_refines_dominance(a in level(), b in level(), c in level(), d in level()) {
        let lv = |x| QualitativeLevel::new(x).unwrap();
        if pair_dominates((lv(a), lv(b)), (lv(c), lv(d))) {
            prop_assert!(encode_lexicographic(a, b).unwrap() >= encode_lexicographic(c, d).unwrap());
        }
    }
}

fn deck_strategy() -> impl Strategy<Value = CardDeck> {
    (prop::collection::vec((1usize..=3, 0u32..=4), 2..=6), 1.5f64..20.0).prop_map(|(spec, ratio)| {
        let mut n = 0;
        let levels = spec
            .iter()
            .map(|&(size, _)| {
                (0..size)
                    .map(|_| {
                        n += 1;
                        format!("g{n}")
                    })
                    .collect()
            })
            .collect();
        let blanks = spec[1..].iter().map(|&(_, e)| e).collect();
        CardDeck { levels, blanks, ratio }
    })
}

proptest! {
    #[test]
    fn srf_weights_sum_to_100_and_respect_the_ratio(deck in deck_strategy()) {
        let w = compute_srf_weights(&deck).unwrap();
        prop_assert!((w.values().sum::<f64>() - 100.0).abs() < 1e-9);
        let first = w[&deck.levels[0][0]];
        let last = w[&deck.levels.last().unwrap()[0]];
        prop_assert!((last / first - deck.ratio).abs() < 1e-9);
    }

    #[test]
    fn srf_weights_grow_with_rank(deck in deck_strategy()) {
        let w = compute_srf_weights(&deck).unwrap();
        for pair in deck.levels.windows(2) {
            prop_assert!(w[&pair[1][0]] > w[&pair[0][0]]);
        }
        for level in &deck.levels {
            prop_assert!(level.iter().all(|c| w[c] == w[&level[0]]));
        }
    }

    #[test]
    fn extra_blank_widens_its_gap(deck in deck_strategy(), pick in any::<prop::sample::Index>()) {
        let r = pick.index(deck.blanks.len());
        let mut wider = deck.clone();
        wider.blanks[r] += 1;
        let (k, kw) = (level_values(&deck), level_values(&wider));
        let (before, after) = (k[r + 1] / k[r], kw[r + 1] / kw[r]);
        // With a single gap z alone fixes the ratio.
        if deck.blanks.len() == 1 {
            prop_assert!((after - before).abs() < 1e-12);
        } else {
            prop_assert!(after > before);
        }
    }
}

proptest! {
    #[test]
    fn calibration_passes_through_both_anchors(
        x1 in -1e4f64..1e4, x2 in -1e4f64..1e4, t1 in 0f64..1e4, t2 in 0f64..1e4,
    ) {
        prop_assume!((x1 - x2).abs() > 1e-3);
        let spec = calibrate_affine(&AnchorPair::new((x1, t1), (x2, t2))).unwrap();
        let ThresholdSpec::Affine { alpha, beta } = spec else { panic!("{spec:?}") };
        for (x, t) in [(x1, t1), (x2, t2)] {
            let tol = 1e-12 * (alpha.abs() * x.abs() + beta.abs() + t);
            prop_assert!((spec.raw(x).unwrap() - t).abs() <= tol, "{} vs {}", spec.raw(x).unwrap(), t);
        }
    }

    #[test]
    fn calibration_ignores_anchor_order(
        x1 in -1e4f64..1e4, x2 in -1e4f64..1e4, t1 in 0f64..1e4, t2 in 0f64..1e4,
    ) {
        prop_assume!(x1 != x2);
        let a = calibrate_affine(&AnchorPair::new((x1, t1), (x2, t2)));
        let b = calibrate_affine(&AnchorPair::new((x2, t2), (x1, t1)));
        prop_assert_eq!(a, b);
    }
}

fn constant(v: f64) -> ThresholdSpec {
    ThresholdSpec::Constant { value: v }
}

/// Criterion on a 0..100 scale with constant thresholds.
fn criterion(i: usize, q: f64, p: f64, v: Option<f64>) -> Criterion {
    Criterion {
        id: format!("g{i}"),
        label: String::new(),
        unit: String::new(),
        direction: Direction::Maximize,
        scale: ScaleKind::Cardinal,
        indifference: constant(q),
        preference: constant(p),
        veto: v.map_or(ThresholdSpec::None, constant),
        range: Some([0.0, 100.0]),
        provenance: None,
    }
}

#[derive(Debug, Clone)]
struct Instance {
    criteria: Vec<Criterion>,
    weights: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

fn instance() -> impl Strategy<Value = Instance> {
    (2usize..=6)
        .prop_flat_map(|m| {
            (
                prop::collection::vec((0f64..10.0, 0f64..20.0, prop::option::of(0f64..60.0)), m),
                prop::collection::vec(0.1f64..10.0, m),
                prop::collection::vec(0f64..100.0, m),
                prop::collection::vec(0f64..100.0, m),
            )
        })
        .prop_map(|(thr, weights, a, b)| Instance {
            criteria: thr
                .into_iter()
                .enumerate()
                .map(|(i, (q, dp, dv))| criterion(i, q, q + dp, dv.map(|d| q + dp + d)))
                .collect(),
            weights,
            a,
            b,
        })
}

proptest! {
    #[test]
    fn credibility_never_exceeds_concordance(x in instance()) {
        let m = OutrankingModel::new(&x.criteria, &x.weights).unwrap();
        let s = m.credibility(&x.a, &x.b);
        prop_assert!((0.0..=m.concordance(&x.a, &x.b) + 1e-12).contains(&s));
    }

    #[test]
    fn credibility_is_monotone_in_the_first_argument(x in instance(), j in any::<prop::sample::Index>(), up in 0f64..50.0) {
        let m = OutrankingModel::new(&x.criteria, &x.weights).unwrap();
        let j = j.index(x.a.len());
        let mut better = x.a.clone();
        better[j] += up;
        prop_assert!(m.credibility(&better, &x.b) >= m.credibility(&x.a, &x.b) - 1e-12);
    }

    #[test]
    fn a_veto_zeroes_credibility(x in instance(), j in any::<prop::sample::Index>()) {
        let j = j.index(x.a.len());
        let mut criteria = x.criteria.clone();
        criteria[j].veto = constant(criteria[j].preference.raw(0.0).unwrap() + 1.0);
        let m = OutrankingModel::new(&criteria, &x.weights).unwrap();
        let mut a = x.a.clone();
        let mut b = x.b.clone();
        a[j] = 0.0;
        b[j] = 100.0;
        prop_assert_eq!(m.credibility(&a, &b), 0.0);
    }

    #[test]
    fn weights_are_scale_free(x in instance(), k in 0.01f64..100.0) {
        let m = OutrankingModel::new(&x.criteria, &x.weights).unwrap();
        let scaled: Vec<f64> = x.weights.iter().map(|w| w * k).collect();
        let ms = OutrankingModel::new(&x.criteria, &scaled).unwrap();
        prop_assert!((m.credibility(&x.a, &x.b) - ms.credibility(&x.a, &x.b)).abs() < 1e-12);
    }

    #[test]
    fn zero_weight_criterion_without_veto_is_inert(x in instance(), j in any::<prop::sample::Index>(), v in 0f64..100.0) {
        let j = j.index(x.a.len());
        prop_assume!(x.weights.iter().enumerate().any(|(i, w)| i != j && *w > 0.0));
        let mut criteria = x.criteria.clone();
        criteria[j].veto = ThresholdSpec::None;
        let mut w = x.weights.clone();
        w[j] = 0.0;
        let m = OutrankingModel::new(&criteria, &w).unwrap();
        let mut a = x.a.clone();
        a[j] = v;
        prop_assert!((m.credibility(&a, &x.b) - m.credibility(&x.a, &x.b)).abs() < 1e-12);
    }
}

fn credibility_row() -> impl Strategy<Value = priosel_core::outranking::CredibilityRow> {
    (1usize..=5).prop_flat_map(|q| {
        (
            prop::collection::vec(0f64..=1.0, q),
            prop::collection::vec(0f64..=1.0, q),
        )
            .prop_map(|(mut up, mut down)| {
                up.insert(0, 1.0);
                up.push(0.0);
                down.insert(0, 0.0);
                down.push(1.0);
                priosel_core::outranking::CredibilityRow {
                    outranks: up,
                    outranked_by: down,
                }
            })
    })
}

proptest! {
    #[test]
    fn assignment_interval_is_ordered_and_in_range(row in credibility_row(), lambda in 0.5f64..=1.0) {
        let q = row.categories();
        let d = assign_descending(&row, lambda);
        let a = assign_ascending(&row, lambda);
        prop_assert!((1..=q).contains(&d) && (1..=q).contains(&a));
        let r = AssignmentResult::from_row("x", &row, lambda);
        prop_assert!(r.interval.lo <= r.interval.hi);
        prop_assert_eq!(r.interval, CategoryInterval::new(d, a));
    }

    #[test]
    fn interval_text_round_trips(lo in 1usize..9, width in 0usize..3) {
        let i = CategoryInterval::new(lo, lo + width);
        prop_assert_eq!(i.to_string().parse::<CategoryInterval>().unwrap(), i);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn each_ladder_level_outweighs_everything_below(seed in any::<u64>(), n in 1usize..40) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ladder = build_ladder(&common::random_assignments(&mut rng, n)).unwrap();
        let mut below = 0u64;
        for level in &ladder.levels {
            prop_assert!(level.coefficient > below);
            below += level.coefficient * level.members.len() as u64;
        }
    }

    #[test]
    fn branch_and_bound_agrees_with_enumeration(seed in any::<u64>()) {
        let p = common::random_program(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let exact = solve_exact(&p);
        let oracle = brute_force_oracle(&p).unwrap();
        prop_assert_eq!(exact.infeasible, oracle.infeasible);
        prop_assert_eq!(exact.objective, oracle.objective);
        prop_assert_eq!(exact.selected, oracle.selected);
    }

    #[test]
    fn sequential_levels_match_the_weighted_optimum(seed in any::<u64>()) {
        let p = common::random_program(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let exact = solve_exact(&p);
        let seq = sequential_lexicographic(&p);
        prop_assert_eq!(exact.infeasible, seq.infeasible);
        if !exact.infeasible {
            prop_assert_eq!(level_counts(&p, exact.mask), level_counts(&p, seq.mask));
            prop_assert_eq!(exact.objective, seq.objective);
        }
    }

    #[test]
    fn objective_never_drops_with_a_larger_budget(seed in any::<u64>(), extra in 0f64..20000.0) {
        let p = common::random_program(&mut ChaCha8Rng::seed_from_u64(seed), 12);
        let mut richer = p.clone();
        richer.budget += extra;
        let (a, b) = (solve_exact(&p), solve_exact(&richer));
        if !a.infeasible {
            prop_assert!(!b.infeasible);
            prop_assert!(b.objective >= a.objective);
        }
    }

    #[test]
    fn scenario_text_round_trips(
        perf in prop::collection::vec(0f64..=100.0, 20),
        costs in prop::collection::vec(1f64..20000.0, 20),
        w in prop::collection::vec(0.5f64..30.0, 8),
        lambda in 0.5f64..=1.0,
    ) {
        let mut s = naples();
        s.lambda = lambda;
        for (a, (g2, cost)) in s.actions.iter_mut().zip(perf.iter().zip(&costs)) {
            a.performances.insert("g2".into(), *g2);
            a.cost = *cost;
        }
        for (v, x) in s.weight_vectors[0].weights.values_mut().zip(&w) {
            *v = *x;
        }
        prop_assert_eq!(parse_scenario(&save_scenario(&s)).unwrap(), s);
    }
}
