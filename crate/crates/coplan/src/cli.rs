//! Subcommand dispatch for the `coplan` binary. Machine-readable payload
//! goes to stdout; summaries and errors go to stderr. Exit codes: 0
//! success, 1 domain failure (no plan, validation violation), 2 usage or
//! input error.

use std::fs;
use std::process::ExitCode;

use coplan_core::capability::{
    build_capability_map, export_map, MapFormat, PlanarTwoLinkArm, DEFAULT_SAMPLES,
};
use coplan_core::cost::build_cost_table;
use coplan_core::model::{Aabb, Point3, Region};
use coplan_core::pddl::{emit_domain, emit_plan, emit_problem, parse_plan};
use coplan_core::planner::{plan_search, timed_plan_from, validate_plan, SearchResult};
use coplan_core::scenario::{builtin_benchmark, compile, load_scenario, ScenarioConfig};

const USAGE: &str = "\
coplan - cost-aware task allocation and planning for collaborative cells

USAGE:
  coplan cost-table <scenario.scn | --builtin> [--cycles N] [--format csv|json]
  coplan capability-map --out FILE [--format csv|json] [--oracle planar2]
         [--base x,y,z] [--links l1,l2] [--tilt RAD]
         [--bounds x0,y0,z0,x1,y1,z1] [--cell M] [--samples N] [--seed S]
  coplan compile <scenario.scn | --builtin> [--cycles N]
         --out-domain FILE --out-problem FILE
  coplan plan <scenario.scn | --builtin> [--cycles N] [--budget N] [--out FILE]
  coplan validate <scenario.scn | --builtin> [--cycles N] <plan.txt>
  coplan demo --cycles 1|2 [--budget N] [--out FILE]

Scenario files use the structured text format documented in the README;
--builtin loads the desk assembly benchmark (default --cycles 2).
";

pub fn run(args: &[String]) -> ExitCode {
    match args.first().map(|s| s.as_str()) {
        Some("cost-table") => cost_table(&args[1..]),
        Some("capability-map") => capability_map(&args[1..]),
        Some("compile") => compile_cmd(&args[1..]),
        Some("plan") => plan_cmd(&args[1..], false),
        Some("demo") => plan_cmd(&args[1..], true),
        Some("validate") => validate_cmd(&args[1..]),
        Some("--help") | Some("-h") | Some("help") => {
            eprint!("{USAGE}");
            ExitCode::SUCCESS
        }
        Some(other) => {
            eprintln!("unknown subcommand `{other}`");
            eprint!("{USAGE}");
            ExitCode::from(2)
        }
        None => {
            eprint!("{USAGE}");
            ExitCode::from(2)
        }
    }
}

struct Parsed {
    scenario: Option<String>,
    flags: Vec<(String, String)>,
    positional: Vec<String>,
}

/// Split `args` into an optional scenario source, --key value flags, and
/// the remaining positionals.
fn parse_args(args: &[String], flag_names: &[&str]) -> Result<Parsed, String> {
    let mut out = Parsed {
        scenario: None,
        flags: Vec::new(),
        positional: Vec::new(),
    };
    let mut i = 0;
    while i < args.len() {
        let a = &args[i];
        if a == "--builtin" {
            out.scenario = Some("--builtin".to_string());
            i += 1;
        } else if let Some(name) = a.strip_prefix("--") {
            if !flag_names.contains(&name) {
                return Err(format!("unknown flag `--{name}`"));
            }
            let value = args
                .get(i + 1)
                .ok_or_else(|| format!("flag `--{name}` needs a value"))?;
            out.flags.push((name.to_string(), value.clone()));
            i += 2;
        } else {
            if out.scenario.is_none() && !a.ends_with(".txt") {
                out.scenario = Some(a.clone());
            } else {
                out.positional.push(a.clone());
            }
            i += 1;
        }
    }
    Ok(out)
}

fn flag<'a>(parsed: &'a Parsed, name: &str) -> Option<&'a str> {
    parsed
        .flags
        .iter()
        .rev()
        .find(|(n, _)| n == name)
        .map(|(_, v)| v.as_str())
}

fn load(parsed: &Parsed) -> Result<ScenarioConfig, String> {
    let src = parsed
        .scenario
        .as_deref()
        .ok_or("missing scenario: pass a file or --builtin")?;
    if src == "--builtin" {
        let cycles: usize = match flag(parsed, "cycles") {
            Some(v) => v.parse().map_err(|_| format!("bad --cycles `{v}`"))?,
            None => 2,
        };
        builtin_benchmark(cycles).map_err(|e| e.to_string())
    } else {
        let text = fs::read_to_string(src).map_err(|e| format!("{src}: {e}"))?;
        load_scenario(&text).map_err(|e| format!("{src}: {e}"))
    }
}

fn usage_error(msg: &str) -> ExitCode {
    eprintln!("error: {msg}");
    eprint!("{USAGE}");
    ExitCode::from(2)
}

fn cost_table(args: &[String]) -> ExitCode {
    let parsed = match parse_args(args, &["cycles", "format"]) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let cfg = match load(&parsed) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let table = match build_cost_table(&cfg) {
        Ok(t) => t,
        Err(e) => return usage_error(&e.to_string()),
    };
    match flag(&parsed, "format").unwrap_or("csv") {
        "csv" => print!("{}", table.to_csv()),
        "json" => match table.to_json() {
            Ok(j) => println!("{j}"),
            Err(e) => return usage_error(&e.to_string()),
        },
        other => return usage_error(&format!("unknown format `{other}`")),
    }
    ExitCode::SUCCESS
}

fn parse_triple(text: &str) -> Result<Point3, String> {
    let parts: Vec<&str> = text.split(',').collect();
    if parts.len() != 3 {
        return Err(format!("expected x,y,z got `{text}`"));
    }
    let mut v = [0.0f64; 3];
    for (i, p) in parts.iter().enumerate() {
        v[i] = p.trim().parse().map_err(|_| format!("bad number `{p}`"))?;
    }
    Ok(Point3::new(v[0], v[1], v[2]))
}

fn capability_map(args: &[String]) -> ExitCode {
    let parsed = match parse_args(
        args,
        &([
            "oracle", "base", "links", "tilt", "bounds", "cell", "samples", "seed", "out", "format",
        ]),
    ) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let oracle_name = flag(&parsed, "oracle").unwrap_or("planar2");
    if oracle_name != "planar2" {
        return usage_error(&format!("unknown oracle `{oracle_name}`"));
    }
    let base = match parse_triple(flag(&parsed, "base").unwrap_or("0,0,0")) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let links = flag(&parsed, "links").unwrap_or("0.7,0.5");
    let (l1, l2) = match links.split_once(',') {
        Some((a, b)) => match (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            (Ok(a), Ok(b)) => (a, b),
            _ => return usage_error(&format!("bad --links `{links}`")),
        },
        None => return usage_error(&format!("bad --links `{links}`")),
    };
    let tilt: f64 = match flag(&parsed, "tilt").unwrap_or("1.2").parse() {
        Ok(v) => v,
        Err(_) => return usage_error("bad --tilt"),
    };
    let bounds_txt = flag(&parsed, "bounds").unwrap_or("-1.25,-1.25,0,1.25,1.25,0.05");
    let nums: Vec<&str> = bounds_txt.split(',').collect();
    if nums.len() != 6 {
        return usage_error(&format!("bad --bounds `{bounds_txt}`"));
    }
    let lo = match parse_triple(&nums[..3].join(",")) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let hi = match parse_triple(&nums[3..].join(",")) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let cell: f64 = match flag(&parsed, "cell").unwrap_or("0.05").parse() {
        Ok(v) => v,
        Err(_) => return usage_error("bad --cell"),
    };
    let samples: usize = match flag(&parsed, "samples") {
        Some(v) => match v.parse() {
            Ok(n) => n,
            Err(_) => return usage_error("bad --samples"),
        },
        None => DEFAULT_SAMPLES,
    };
    let seed: u64 = match flag(&parsed, "seed").unwrap_or("0").parse() {
        Ok(v) => v,
        Err(_) => return usage_error("bad --seed"),
    };

    let arm = match PlanarTwoLinkArm::new(base, l1, l2, tilt) {
        Ok(a) => a,
        Err(e) => return usage_error(&e.to_string()),
    };
    let bbox = match Aabb::new(lo, hi) {
        Ok(b) => b,
        Err(e) => return usage_error(&e.to_string()),
    };
    let map = match build_capability_map(
        &arm,
        "planar2",
        &Region::from_box(bbox),
        cell,
        samples,
        seed,
    ) {
        Ok(m) => m,
        Err(e) => return usage_error(&e.to_string()),
    };

    let out_path = match flag(&parsed, "out") {
        Some(p) => p.to_string(),
        None => return usage_error("missing --out FILE"),
    };
    let format = match flag(&parsed, "format") {
        Some("csv") => MapFormat::Csv,
        Some("json") => MapFormat::Json,
        Some(other) => return usage_error(&format!("unknown format `{other}`")),
        None if out_path.ends_with(".json") => MapFormat::Json,
        None => MapFormat::Csv,
    };
    let payload = match export_map(&map, format) {
        Ok(p) => p,
        Err(e) => return usage_error(&e.to_string()),
    };
    if let Err(e) = fs::write(&out_path, payload) {
        eprintln!("error: {out_path}: {e}");
        return ExitCode::from(2);
    }
    eprintln!(
        "capability map: {}x{}x{} cells, {} samples each -> {}",
        map.dims.0, map.dims.1, map.dims.2, map.n_samples, out_path
    );
    ExitCode::SUCCESS
}

fn compile_cmd(args: &[String]) -> ExitCode {
    let parsed = match parse_args(args, &["cycles", "out-domain", "out-problem"]) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let cfg = match load(&parsed) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let compiled = match compile(&cfg) {
        Ok(c) => c,
        Err(e) => return usage_error(&e.to_string()),
    };
    let out_domain = flag(&parsed, "out-domain");
    let out_problem = flag(&parsed, "out-problem");
    if out_domain.is_none() && out_problem.is_none() {
        // Without output files the domain goes to stdout.
        print!("{}", emit_domain(&compiled.domain));
        print!("{}", emit_problem(&compiled.problem));
        return ExitCode::SUCCESS;
    }
    if let Some(path) = out_domain {
        if let Err(e) = fs::write(path, emit_domain(&compiled.domain)) {
            eprintln!("error: {path}: {e}");
            return ExitCode::from(2);
        }
    }
    if let Some(path) = out_problem {
        if let Err(e) = fs::write(path, emit_problem(&compiled.problem)) {
            eprintln!("error: {path}: {e}");
            return ExitCode::from(2);
        }
    }
    eprintln!(
        "compiled `{}`: {} grounded actions over {} propositions",
        cfg.name,
        compiled.grounded.ops.len(),
        compiled.grounded.propositions.len()
    );
    ExitCode::SUCCESS
}

fn plan_cmd(args: &[String], demo: bool) -> ExitCode {
    let parsed = match parse_args(args, &["cycles", "budget", "out"]) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let parsed = if demo {
        let mut p = parsed;
        p.scenario = Some("--builtin".to_string());
        if flag(&p, "cycles").is_none() {
            p.flags.push(("cycles".to_string(), "1".to_string()));
        }
        p
    } else {
        parsed
    };
    let cfg = match load(&parsed) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let budget: Option<usize> = match flag(&parsed, "budget") {
        Some(v) => match v.parse() {
            Ok(n) => Some(n),
            Err(_) => return usage_error("bad --budget"),
        },
        None => None,
    };
    let compiled = match compile(&cfg) {
        Ok(c) => c,
        Err(e) => return usage_error(&e.to_string()),
    };
    let plan = match plan_search(&compiled.grounded, budget) {
        Ok(SearchResult::Plan(p)) => p,
        Ok(SearchResult::NoPlan) => {
            eprintln!("no plan: the goal is unreachable");
            return ExitCode::from(1);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    let timed = match timed_plan_from(&compiled.grounded, &plan) {
        Ok(t) => t,
        Err(v) => {
            eprintln!("internal error: planner output failed validation: {v}");
            return ExitCode::from(1);
        }
    };
    if let Err(v) = validate_plan(&compiled.grounded, &timed) {
        eprintln!("internal error: schedule failed validation: {v}");
        return ExitCode::from(1);
    }
    let text = emit_plan(&timed);
    print!("{text}");
    if let Some(path) = flag(&parsed, "out") {
        if let Err(e) = fs::write(path, &text) {
            eprintln!("error: {path}: {e}");
            return ExitCode::from(2);
        }
    }
    eprintln!(
        "plan: {} steps, total cost {:.3}, makespan {:.3} s",
        timed.steps.len(),
        plan.cost,
        timed.makespan
    );
    ExitCode::SUCCESS
}

fn validate_cmd(args: &[String]) -> ExitCode {
    let parsed = match parse_args(args, &["cycles"]) {
        Ok(p) => p,
        Err(e) => return usage_error(&e),
    };
    let Some(plan_path) = parsed.positional.first() else {
        return usage_error("missing plan file");
    };
    let cfg = match load(&parsed) {
        Ok(c) => c,
        Err(e) => return usage_error(&e),
    };
    let compiled = match compile(&cfg) {
        Ok(c) => c,
        Err(e) => return usage_error(&e.to_string()),
    };
    let text = match fs::read_to_string(plan_path) {
        Ok(t) => t,
        Err(e) => return usage_error(&format!("{plan_path}: {e}")),
    };
    let plan = match parse_plan(&text) {
        Ok(p) => p,
        Err(e) => return usage_error(&format!("{plan_path}: {e}")),
    };
    match validate_plan(&compiled.grounded, &plan) {
        Ok(()) => {
            println!("ok");
            ExitCode::SUCCESS
        }
        Err(v) => {
            println!("{}", v.to_json());
            eprintln!("invalid plan: {v}");
            ExitCode::from(1)
        }
    }
}
