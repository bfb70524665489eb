//! The Naples case study end to end, with frozen values from an independent
//! re-implementation kept in this file.

use priosel_core::constraints::Program;
use priosel_core::domain::Scenario;
use priosel_core::fixtures::{naples, naples_seven_profiles, NAPLES_FIXTURE_NOTE};
use priosel_core::io::sha256_hex;
use priosel_core::ladder::build_ladder;
use priosel_core::outranking::{assign, CategoryInterval, OutrankingModel};
use priosel_core::robustness::select;
use priosel_core::solver::{brute_force_oracle, diagnose, solve_exact};

/// Straight transcription of the sorting model over plain arrays, with
/// thresholds evaluated at the worse of the two performances.
mod oracle {
    pub struct Thr {
        pub q: Option<(f64, f64)>,
        pub p: Option<(f64, f64)>,
        pub v: Option<(f64, f64)>,
    }

    fn at(t: Option<(f64, f64)>, x: f64, missing: f64) -> f64 {
        t.map_or(missing, |(a, b)| (a * x + b).max(0.0))
    }

    pub fn sigma(a: &[f64], b: &[f64], w: &[f64], thr: &[Thr]) -> f64 {
        let total: f64 = w.iter().sum();
        let mut c = 0.0;
        let mut d = Vec::new();
        for j in 0..a.len() {
            let x = a[j].min(b[j]);
            let (q, p, v) = (
                at(thr[j].q, x, 0.0),
                at(thr[j].p, x, 0.0),
                at(thr[j].v, x, f64::INFINITY),
            );
            let diff = a[j] - b[j];
            let phi = if diff >= -q {
                1.0
            } else if diff < -p {
                0.0
            } else {
                (diff + p) / (p - q)
            };
            c += w[j] / total * phi;
            d.push(if diff < -v {
                1.0
            } else if diff < -p {
                (diff + p) / (p - v)
            } else {
                0.0
            });
        }
        d.iter()
            .filter(|&&dj| dj > c)
            .fold(c, |s, dj| s * (1.0 - dj) / (1.0 - c))
    }
}

fn oracle_thresholds() -> Vec<oracle::Thr> {
    use oracle::Thr;
    let qual = || Thr {
        q: None,
        p: None,
        v: Some((0.0, 3.0)),
    };
    let coded = || Thr {
        q: Some((0.0, 1.0)),
        p: Some((0.0, 3.0)),
        v: Some((0.0, 5.0)),
    };
    vec![
        qual(),
        Thr {
            q: Some((0.1, 13.0)),
            p: Some((0.0, 30.0)),
            v: Some((0.0, 110.0)),
        },
        coded(),
        qual(),
        qual(),
        Thr {
            q: Some((0.1, 397.73)),
            p: Some((0.21, 795.46)),
            v: Some((0.0, 60000.0)),
        },
        coded(),
        qual(),
    ]
}

fn vector(p: &std::collections::BTreeMap<String, f64>) -> Vec<f64> {
    (1..=8).map(|j| p[&format!("g{j}")]).collect()
}

fn weights(s: &Scenario, name: &str) -> Vec<f64> {
    vector(&s.weight_vector(name).unwrap().weights)
}

#[test]
fn credibility_matches_the_oracle_on_every_pair() {
    let s = naples();
    let thr = oracle_thresholds();
    for wv in &s.weight_vectors {
        let model = OutrankingModel::from_scenario(&s, &wv.name).unwrap();
        let w = weights(&s, &wv.name);
        for a in &s.actions {
            let ga = vector(&a.performances);
            for set in &s.categories {
                for b in &set.profiles {
                    let gb = vector(&b.performances);
                    let got = model.credibility(&ga, &gb);
                    let want = oracle::sigma(&ga, &gb, &w, &thr);
                    assert!(
                        (got - want).abs() < 1e-12,
                        "{} {} {}: {got} vs {want}",
                        wv.name,
                        a.id,
                        b.id
                    );
                    let got = model.credibility(&gb, &ga);
                    let want = oracle::sigma(&gb, &ga, &w, &thr);
                    assert!(
                        (got - want).abs() < 1e-12,
                        "{} {} {}: {got} vs {want}",
                        wv.name,
                        b.id,
                        a.id
                    );
                }
            }
        }
    }
}

#[test]
fn frozen_credibilities_under_w1() {
    let s = naples();
    let m = OutrankingModel::from_scenario(&s, "w1").unwrap();
    let perf = |id: &str| vector(&s.actions[s.action_index(id).unwrap()].performances);
    let prof = |h: usize, i: usize| vector(&s.categories[h - 1].profiles[i].performances);
    let cases = [
        (perf("a11"), prof(4, 0), 0.58),
        (prof(4, 0), perf("a11"), 1.0),
        // g1 drops by 3 levels: full veto.
        (perf("a3"), prof(4, 0), 0.0),
        (perf("a6"), prof(1, 0), 0.69),
        (perf("a14"), prof(3, 0), 0.58),
    ];
    for (a, b, want) in cases {
        assert!((m.credibility(&a, &b) - want).abs() < 1e-9);
    }
}

fn table(s: &str) -> Vec<CategoryInterval> {
    s.split_whitespace()
        .map(|t| {
            let lo = t[..1].parse().unwrap();
            let hi = t[t.len() - 1..].parse().unwrap();
            CategoryInterval::new(lo, hi)
        })
        .collect()
}

pub const PUBLISHED: [(&str, &str); 6] = [
    ("w1", "3 3 34 3 3 1 2 34 2 3 4 2 2 3 2 2 3 2 3 3"),
    ("w2", "3 3 34 2 3 1 12 34 2 3 4 2 12 3 2 2 3 2 3 3"),
    ("w3", "3 3 34 2 3 1 2 34 2 3 4 2 2 3 23 2 3 2 3 3"),
    ("w4", "3 3 34 2 3 1 12 34 2 3 4 2 2 3 23 2 3 2 3 3"),
    ("w5", "3 3 34 2 3 1 1 34 2 3 4 2 12 3 23 2 3 2 3 3"),
    ("w6", "3 3 34 3 3 12 2 34 2 3 4 2 23 3 2 23 3 2 3 3"),
];

#[test]
fn published_assignments_are_reproduced() {
    let s = naples();
    for (w, expected) in PUBLISHED {
        let lambda = if w == "w1" { 0.60 } else { 0.70 };
        let got: Vec<_> = assign(&s, w, lambda).unwrap().into_iter().map(|a| a.interval).collect();
        assert_eq!(got, table(expected), "{w} at {lambda}");
    }
}

#[test]
fn w1_at_default_lambda_widens_three_actions_downward() {
    let s = naples();
    let got: Vec<_> = assign(&s, "w1", 0.70)
        .unwrap()
        .into_iter()
        .map(|a| a.interval)
        .collect();
    let want = table(PUBLISHED[0].1);
    let diff: Vec<usize> = (0..20).filter(|&i| got[i] != want[i]).map(|i| i + 1).collect();
    assert_eq!(diff, [4, 7, 13]);
    assert_eq!(got[3], CategoryInterval::new(2, 3));
    assert_eq!(got[6], CategoryInterval::new(1, 2));
    assert_eq!(got[12], CategoryInterval::new(1, 2));
}

#[test]
fn ladders_follow_the_recursion() {
    let s = naples();
    let expect: [(&str, &[u64]); 6] = [
        ("w1", &[1, 2, 16, 160, 480]),
        ("w2", &[1, 2, 6, 42, 378, 1134]),
        ("w3", &[1, 2, 16, 32, 288, 864]),
        ("w4", &[1, 2, 4, 28, 56, 504, 1512]),
        ("w5", &[1, 3, 6, 36, 72, 648, 1944]),
        ("w6", &[1, 2, 12, 36, 360, 1080]),
    ];
    for (w, coefs) in expect {
        let lambda = if w == "w1" { 0.60 } else { 0.70 };
        let ladder = build_ladder(&assign(&s, w, lambda).unwrap()).unwrap();
        assert_eq!(ladder.coefficients(), coefs, "{w}");
    }
}

fn w1_assignments(s: &Scenario) -> Vec<priosel_core::outranking::AssignmentResult> {
    assign(s, "w1", 0.60).unwrap()
}

#[test]
fn w1_portfolios_per_budget() {
    let s = naples();
    let a = w1_assignments(&s);
    let expect = [
        ("B1", "full", 942),
        ("B2", "full", 936),
        ("B3", "full", 916),
        ("B4", "full", 886),
        ("B5", "full", 822),
        ("B6", "relaxed", 674),
        ("B7", "relaxed", 90),
    ];
    for (b, profile, objective) in expect {
        let budget = s.resolve_budget(b).unwrap();
        let (ladder, sol) = select(&s, &a, budget, profile).unwrap();
        assert!(!sol.infeasible, "{b}");
        assert_eq!(sol.objective, objective, "{b}");
        assert!(sol.total_cost <= budget);
        assert!(sol.report.all_satisfied());

        let program = Program::build(
            &s.actions,
            &ladder,
            &s.constraint_profile(profile).unwrap().with_budget(budget),
        )
        .unwrap();
        let oracle = brute_force_oracle(&program).unwrap();
        assert_eq!(oracle.objective, objective, "{b}");
        assert_eq!(oracle.selected, sol.selected, "{b}");
    }
}

#[test]
fn smallest_budget_with_full_rules_is_infeasible() {
    let s = naples();
    let a = w1_assignments(&s);
    let (_, sol) = select(&s, &a, 13060.0, "full").unwrap();
    assert!(sol.infeasible);
    let report = sol.infeasibility.unwrap();
    assert!(report.structural.is_empty());
    assert!(report.feasible_without_budget);
    assert_eq!(report.budget_conflicts, ["min_count:decumano"]);
    assert_eq!(report.minimal_relaxation, ["min_count:decumano"]);
}

#[test]
fn diagnosis_of_a_feasible_program_is_empty() {
    let s = naples();
    let ladder = build_ladder(&w1_assignments(&s)).unwrap();
    let p = Program::build(
        &s.actions,
        &ladder,
        &s.constraint_profile("full").unwrap().with_budget(45710.0),
    )
    .unwrap();
    assert!(!solve_exact(&p).infeasible);
    assert!(diagnose(&p).minimal_relaxation.is_empty());
}

#[test]
fn seven_profile_variant_sorts_every_action() {
    let s = naples_seven_profiles();
    for w in ["w1", "w5"] {
        let a = assign(&s, w, 0.70).unwrap();
        assert_eq!(a.len(), 20);
        assert!(a.iter().all(|r| r.interval.lo >= 1 && r.interval.hi <= 4));
    }
}

#[test]
fn fixture_checksum_is_pinned() {
    let text = priosel_core::fixtures::NAPLES_JSON;
    assert_eq!(
        sha256_hex(text.as_bytes()),
        NAPLES_FIXTURE_NOTE.sha256,
        "{}",
        NAPLES_FIXTURE_NOTE.note
    );
}
