//! The relay cell runs entirely on the formula path: no pinned safety
//! values, so every C_S cell combines the declared activity level, the
//! action risk gain, and the worker's trajectory intersection. Expected
//! values below are hand evaluations of those formulas.

use coplan_core::cost::{build_cost_table, ActionGroup};
use coplan_core::planner::{
    brute_force_optimal, plan_search, timed_plan_from, validate_plan, BruteForceResult,
    SearchResult,
};
use coplan_core::scenario::{compile, load_scenario, ScenarioConfig};

fn relay() -> ScenarioConfig {
    let text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../scenarios/relay_cell.scn"
    ))
    .unwrap();
    load_scenario(&text).unwrap()
}

fn approx(got: f64, want: f64, what: &str) {
    assert!((got - want).abs() <= 1e-9, "{what}: got {got}, want {want}");
}

#[test]
fn formula_cells_match_hand_evaluation() {
    let table = build_cost_table(&relay()).unwrap();
    let total = |agent: &str, group, param: &str| {
        table.cell(agent, group, param).unwrap().breakdown.total
    };
    let pp = ActionGroup::PickPlace;
    let mv = ActionGroup::Move;

    // arm1 at feed: D = 90 costs nothing, C_S = (1 + 0.4) * 80/100.
    approx(total("arm1", pp, "feed").value(), 1.0 + 1.4 * 0.8, "arm1/feed");
    // arm1 at shared: R_R = 1 - 55/100, C_S = (1 + 0.4) * 50/100.
    approx(
        total("arm1", pp, "shared").value(),
        1.0 + 0.45 + 1.4 * 0.5,
        "arm1/shared",
    );
    // drop lies outside the arm's range.
    assert!(total("arm1", pp, "drop").is_infinite());
    // arm1 along feedline: farthest waypoint is feed (D = 90),
    // C_S = (1 + 0.6) * 80/100; the dropline leaves the range.
    approx(total("arm1", mv, "feedline").value(), 1.0 + 1.6 * 0.8, "arm1/feedline");
    assert!(total("arm1", mv, "dropline").is_infinite());

    // The worker's reach into feed and shared crosses the arm's range,
    // so C_I = 3 everywhere except at the home station.
    approx(
        total("w1", pp, "feed").value(),
        1.0 + (3.0 + 0.1) * 0.8,
        "w1/feed",
    );
    approx(
        total("w1", pp, "shared").value(),
        1.0 + (3.0 + 0.1) * 0.5,
        "w1/shared",
    );
    approx(total("w1", pp, "drop").value(), 1.0, "w1/drop");
    // Moves pay the path's worst activity level.
    approx(
        total("w1", mv, "feedline").value(),
        1.0 + (3.0 + 0.4) * 0.8,
        "w1/feedline",
    );
    approx(
        total("w1", mv, "dropline").value(),
        1.0 + (3.0 + 0.4) * 0.5,
        "w1/dropline",
    );
}

#[test]
fn relay_plan_hands_the_part_over_at_the_shared_station() {
    // Hand-derived optimum: the arm ferries the slug to the shared
    // station (2.12 + 2.28 + 2.15) and the worker walks in, collects and
    // delivers it (2.7 + 2.55 + 2.7 + 1.0) = 15.50; the worker-only
    // route costs 17.32.
    let compiled = compile(&relay()).unwrap();
    let plan = match plan_search(&compiled.grounded, None).unwrap() {
        SearchResult::Plan(p) => p,
        SearchResult::NoPlan => panic!("no plan"),
    };
    approx(plan.cost, 15.5, "relay optimum");
    match brute_force_optimal(&compiled.grounded, 4_000_000) {
        BruteForceResult::Optimal(c) => assert_eq!(plan.cost, c),
        other => panic!("{other:?}"),
    }
    assert_eq!(plan.ops.len(), 7);

    let timed = timed_plan_from(&compiled.grounded, &plan).unwrap();
    assert_eq!(validate_plan(&compiled.grounded, &timed), Ok(()));
    // The handover: arm places at shared, worker picks it up there.
    let names: Vec<&str> = timed.steps.iter().map(|s| s.action.as_str()).collect();
    assert!(names.contains(&"(place arm1 slug shared)"));
    assert!(names.contains(&"(pick w1 slug shared)"));
    assert!(names.contains(&"(place w1 slug drop)"));
}
