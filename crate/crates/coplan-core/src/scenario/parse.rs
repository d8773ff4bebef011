//! Scenario file format: UTF-8 structured text with `[section]` headers
//! and one record per line. `#` starts a comment. Numbers accept the
//! unit suffixes `g`, `kg`, `cm`, `m`, `s`; bare numbers are kilograms,
//! meters or seconds as the field demands. Points are `(x,y,z)` with no
//! internal spaces; boxes are `(x,y,z)..(x,y,z)`.
//!
//! Sections: `scenario`, `agents`, `parts`, `locations`, `paths`,
//! `gains`, `safety_d`, `safety_override`, `info`, `durations`,
//! `assemble`, `goal`. The repository's benchmark scenario file is the
//! canonical example of every construct.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use super::{AssembleRule, Durations, GoalAtom, ScenarioConfig, ScenarioError};
use crate::cost::{CostGains, InfoRequirement, InfoRequirements};
use crate::model::{
    Aabb, ActionKind, AgentKind, AgentRange, AgentSpec, InfoItem, LocationSpec, PartSpec, PathSpec,
    Point3, Region, Trajectory,
};

/// Parse and validate a scenario document.
pub fn load_scenario(text: &str) -> Result<ScenarioConfig, ScenarioError> {
    let mut cfg = ScenarioConfig {
        name: "scenario".to_string(),
        agents: Vec::new(),
        parts: Vec::new(),
        locations: Vec::new(),
        paths: Vec::new(),
        gains: CostGains {
            c_k: Vec::new(),
            k_c: 0.0,
            c_h: 0.0,
            c_r: 0.0,
            double_count_ci: false,
        },
        info_reqs: InfoRequirements(Vec::new()),
        safety_d: Vec::new(),
        safety_override: Vec::new(),
        durations: Durations::default(),
        start_at: Vec::new(),
        goal: Vec::new(),
        assemble_rules: Vec::new(),
    };

    let mut section = String::new();
    let mut counters: [usize; 12] = [0; 12];

    for raw in text.lines() {
        let line = match raw.find('#') {
            Some(i) => &raw[..i],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
            section = name.trim().to_string();
            let known = [
                "scenario",
                "agents",
                "parts",
                "locations",
                "paths",
                "gains",
                "safety_d",
                "safety_override",
                "info",
                "durations",
                "assemble",
                "goal",
            ];
            if !known.contains(&section.as_str()) {
                return Err(ScenarioError::new(
                    section.clone(),
                    format!("unknown section `[{section}]`"),
                ));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match section.as_str() {
            "scenario" => parse_scenario_line(&mut cfg, &fields)?,
            "agents" => {
                let i = counters[0];
                counters[0] += 1;
                parse_agent_line(&mut cfg, &fields, i)?;
            }
            "parts" => {
                let i = counters[1];
                counters[1] += 1;
                parse_part_line(&mut cfg, &fields, i)?;
            }
            "locations" => {
                let i = counters[2];
                counters[2] += 1;
                parse_location_line(&mut cfg, &fields, i)?;
            }
            "paths" => {
                let i = counters[3];
                counters[3] += 1;
                parse_path_line(&mut cfg, &fields, i)?;
            }
            "gains" => parse_gain_line(&mut cfg, &fields)?,
            "safety_d" => {
                let i = counters[4];
                counters[4] += 1;
                let path = format!("safety_d[{i}]");
                if fields.len() != 2 {
                    return Err(ScenarioError::new(path, "expected `<location> <d>`"));
                }
                let d = scalar(&path, fields[1], Unit::None)?;
                cfg.safety_d.push((fields[0].to_string(), d));
            }
            "safety_override" => {
                let i = counters[5];
                counters[5] += 1;
                let path = format!("safety_override[{i}]");
                if fields.len() != 3 {
                    return Err(ScenarioError::new(path, "expected `<agent> <param> <c_s>`"));
                }
                let v = scalar(&path, fields[2], Unit::None)?;
                cfg.safety_override
                    .push((fields[0].to_string(), fields[1].to_string(), v));
            }
            "info" => {
                let i = counters[6];
                counters[6] += 1;
                parse_info_line(&mut cfg, &fields, i)?;
            }
            "durations" => parse_duration_line(&mut cfg, &fields)?,
            "assemble" => {
                let i = counters[7];
                counters[7] += 1;
                parse_assemble_line(&mut cfg, &fields, i)?;
            }
            "goal" => {
                let i = counters[8];
                counters[8] += 1;
                let path = format!("goal[{i}]");
                if fields.len() != 3 || fields[0] != "at" {
                    return Err(ScenarioError::new(path, "expected `at <part> <location>`"));
                }
                cfg.goal.push(GoalAtom {
                    part: fields[1].to_string(),
                    location: fields[2].to_string(),
                });
            }
            "" => {
                return Err(ScenarioError::new(
                    "document",
                    format!("content before any [section]: `{line}`"),
                ))
            }
            _ => unreachable!(),
        }
    }

    cfg.validate()?;
    Ok(cfg)
}

fn parse_scenario_line(cfg: &mut ScenarioConfig, fields: &[&str]) -> Result<(), ScenarioError> {
    match fields {
        ["name", value] => {
            cfg.name = value.to_string();
            Ok(())
        }
        _ => Err(ScenarioError::new(
            "scenario",
            "expected `name <identifier>`",
        )),
    }
}

fn parse_agent_line(
    cfg: &mut ScenarioConfig,
    fields: &[&str],
    i: usize,
) -> Result<(), ScenarioError> {
    let path = |f: &str| format!("agents[{i}].{f}");
    if fields.len() < 2 {
        return Err(ScenarioError::new(
            format!("agents[{i}]"),
            "expected `<id> <human|robot> key=value...`",
        ));
    }
    let id = fields[0].to_string();
    let kind = match fields[1] {
        "human" => AgentKind::Human,
        "robot" => AgentKind::Robot,
        other => {
            return Err(ScenarioError::new(
                path("kind"),
                format!("expected human or robot, got `{other}`"),
            ))
        }
    };
    let mut spec = AgentSpec {
        id,
        kind,
        strength_limit_kg: 0.0,
        range: AgentRange::Unbounded,
        known_info: Vec::new(),
        coop_coeff: 0.0,
        base: Point3::new(0.0, 0.0, 0.0),
    };
    let mut start: Option<String> = None;
    for kv in &fields[2..] {
        let (key, value) = split_kv(&path("fields"), kv)?;
        match key {
            "strength" => spec.strength_limit_kg = scalar(&path("strength"), value, Unit::Mass)?,
            "coop" => spec.coop_coeff = scalar(&path("coop"), value, Unit::None)?,
            "base" => spec.base = point(&path("base"), value)?,
            "at" => start = Some(value.to_string()),
            "range" => spec.range = AgentRange::Within(parse_region(&path("range"), value)?),
            "info" => {
                for item in value.split(',').filter(|s| !s.is_empty()) {
                    spec.known_info.push(InfoItem(item.to_string()));
                }
            }
            other => {
                return Err(ScenarioError::new(
                    path(other),
                    format!("unknown agent field `{other}`"),
                ))
            }
        }
    }
    let start = start.ok_or_else(|| ScenarioError::new(path("at"), "missing `at=<location>`"))?;
    cfg.start_at.push((spec.id.clone(), start));
    cfg.agents.push(spec);
    Ok(())
}

fn parse_part_line(
    cfg: &mut ScenarioConfig,
    fields: &[&str],
    i: usize,
) -> Result<(), ScenarioError> {
    let path = |f: &str| format!("parts[{i}].{f}");
    if fields.is_empty() {
        return Err(ScenarioError::new(format!("parts[{i}]"), "empty part line"));
    }
    let mut spec = PartSpec {
        id: fields[0].to_string(),
        weight_kg: 0.0,
        initial_location: None,
    };
    for kv in &fields[1..] {
        let (key, value) = split_kv(&path("fields"), kv)?;
        match key {
            "weight" => spec.weight_kg = scalar(&path("weight"), value, Unit::Mass)?,
            "at" => spec.initial_location = Some(value.to_string()),
            other => {
                return Err(ScenarioError::new(
                    path(other),
                    format!("unknown part field `{other}`"),
                ))
            }
        }
    }
    cfg.parts.push(spec);
    Ok(())
}

fn parse_location_line(
    cfg: &mut ScenarioConfig,
    fields: &[&str],
    i: usize,
) -> Result<(), ScenarioError> {
    let path = |f: &str| format!("locations[{i}].{f}");
    if fields.is_empty() {
        return Err(ScenarioError::new(
            format!("locations[{i}]"),
            "empty location line",
        ));
    }
    let mut spec = LocationSpec {
        id: fields[0].to_string(),
        position: Point3::new(0.0, 0.0, 0.0),
        reach_index: Vec::new(),
    };
    let mut has_pos = false;
    for kv in &fields[1..] {
        let (key, value) = split_kv(&path("fields"), kv)?;
        if key == "pos" {
            spec.position = point(&path("pos"), value)?;
            has_pos = true;
        } else if let Some(robot) = key.strip_prefix("d[").and_then(|k| k.strip_suffix(']')) {
            let d = scalar(&path("d"), value, Unit::None)?;
            spec.reach_index.push((robot.to_string(), d));
        } else {
            return Err(ScenarioError::new(
                path(key),
                format!("unknown location field `{key}`"),
            ));
        }
    }
    if !has_pos {
        return Err(ScenarioError::new(path("pos"), "missing `pos=(x,y,z)`"));
    }
    cfg.locations.push(spec);
    Ok(())
}

fn parse_path_line(
    cfg: &mut ScenarioConfig,
    fields: &[&str],
    i: usize,
) -> Result<(), ScenarioError> {
    let path = |f: &str| format!("paths[{i}].{f}");
    if fields.is_empty() {
        return Err(ScenarioError::new(format!("paths[{i}]"), "empty path line"));
    }
    let id = fields[0].to_string();
    let mut from: Option<String> = None;
    let mut to: Option<String> = None;
    let mut via: Vec<Point3> = Vec::new();
    for kv in &fields[1..] {
        let (key, value) = split_kv(&path("fields"), kv)?;
        match key {
            "from" => from = Some(value.to_string()),
            "to" => to = Some(value.to_string()),
            "via" => {
                for v in value.split(")(") {
                    let v = v.trim_start_matches('(').trim_end_matches(')');
                    via.push(point(&path("via"), &format!("({v})"))?);
                }
            }
            other => {
                return Err(ScenarioError::new(
                    path(other),
                    format!("unknown path field `{other}`"),
                ))
            }
        }
    }
    let from = from.ok_or_else(|| ScenarioError::new(path("from"), "missing `from=`"))?;
    let to = to.ok_or_else(|| ScenarioError::new(path("to"), "missing `to=`"))?;
    let from_pos = cfg
        .location(&from)
        .ok_or_else(|| ScenarioError::new(path("from"), format!("unknown location `{from}`")))?
        .position;
    let to_pos = cfg
        .location(&to)
        .ok_or_else(|| ScenarioError::new(path("to"), format!("unknown location `{to}`")))?
        .position;
    let mut waypoints = Vec::with_capacity(via.len() + 2);
    waypoints.push(from_pos);
    waypoints.extend(via);
    waypoints.push(to_pos);
    let trajectory = Trajectory::new(waypoints)
        .map_err(|e| ScenarioError::new(path("trajectory"), e.to_string()))?;
    cfg.paths.push(PathSpec {
        id,
        from,
        to,
        trajectory,
    });
    Ok(())
}

fn parse_gain_line(cfg: &mut ScenarioConfig, fields: &[&str]) -> Result<(), ScenarioError> {
    match fields {
        ["ck", agent, action, value] => {
            let kind = match *agent {
                "robot" => AgentKind::Robot,
                "human" => AgentKind::Human,
                other => {
                    return Err(ScenarioError::new(
                        "gains.ck",
                        format!("expected robot or human, got `{other}`"),
                    ))
                }
            };
            let v = scalar("gains.ck", value, Unit::None)?;
            let actions: Vec<ActionKind> = match *action {
                "pick/place" => alloc::vec![ActionKind::Pick, ActionKind::Place],
                "pick" => alloc::vec![ActionKind::Pick],
                "place" => alloc::vec![ActionKind::Place],
                "move" => alloc::vec![ActionKind::Move],
                other => {
                    return Err(ScenarioError::new(
                        "gains.ck",
                        format!("unknown action `{other}`"),
                    ))
                }
            };
            for a in actions {
                cfg.gains.c_k.push((kind, a, v));
            }
            Ok(())
        }
        ["kc", value] => {
            cfg.gains.k_c = scalar("gains.kc", value, Unit::None)?;
            Ok(())
        }
        ["ch", value] => {
            cfg.gains.c_h = scalar("gains.ch", value, Unit::None)?;
            Ok(())
        }
        ["cr", value] => {
            cfg.gains.c_r = scalar("gains.cr", value, Unit::None)?;
            Ok(())
        }
        ["double_count_ci", value] => {
            cfg.gains.double_count_ci = *value == "true";
            Ok(())
        }
        _ => Err(ScenarioError::new(
            "gains",
            "expected `ck <agent> <action> <v>`, `kc <v>`, `ch <v>`, `cr <v>` or `double_count_ci <bool>`",
        )),
    }
}

fn parse_info_line(
    cfg: &mut ScenarioConfig,
    fields: &[&str],
    i: usize,
) -> Result<(), ScenarioError> {
    // <agent> <action> <part|*> [at <location>] requires item[,item...]
    let path = format!("info[{i}]");
    if fields.len() < 5 || fields[fields.len() - 2] != "requires" && fields[3] != "requires" {
        return Err(ScenarioError::new(
            path,
            "expected `<agent> <action> <part|*> [at <loc>] requires <items>`",
        ));
    }
    let kind = match fields[1] {
        "pick" => ActionKind::Pick,
        "place" => ActionKind::Place,
        "move" => ActionKind::Move,
        "cooperate" => ActionKind::Cooperate,
        other => {
            return Err(ScenarioError::new(
                path,
                format!("unknown action `{other}`"),
            ))
        }
    };
    let part = match fields[2] {
        "*" => None,
        p => Some(p.to_string()),
    };
    let (at, req_idx) = if fields[3] == "at" {
        (Some(fields[4].to_string()), 5)
    } else {
        (None, 3)
    };
    if fields.get(req_idx) != Some(&"requires") || fields.len() != req_idx + 2 {
        return Err(ScenarioError::new(
            path,
            "expected `requires <item[,item...]>` at the end",
        ));
    }
    let requires: Vec<InfoItem> = fields[req_idx + 1]
        .split(',')
        .filter(|s| !s.is_empty())
        .map(|s| InfoItem(s.to_string()))
        .collect();
    cfg.info_reqs.0.push(InfoRequirement {
        agent: fields[0].to_string(),
        kind,
        part,
        at,
        requires,
    });
    Ok(())
}

fn parse_duration_line(cfg: &mut ScenarioConfig, fields: &[&str]) -> Result<(), ScenarioError> {
    if fields.len() != 2 {
        return Err(ScenarioError::new(
            "durations",
            "expected `<action> <seconds>`",
        ));
    }
    let v = scalar("durations", fields[1], Unit::Time)?;
    match fields[0] {
        "pick" => cfg.durations.pick_s = v,
        "place" => cfg.durations.place_s = v,
        "move" => cfg.durations.move_s = v,
        "cooperate" => cfg.durations.cooperate_s = v,
        "assemble" => cfg.durations.assemble_s = v,
        other => {
            return Err(ScenarioError::new(
                "durations",
                format!("unknown action `{other}`"),
            ))
        }
    }
    Ok(())
}

fn parse_assemble_line(
    cfg: &mut ScenarioConfig,
    fields: &[&str],
    i: usize,
) -> Result<(), ScenarioError> {
    // base_1 + ring_1 -> finished_1 at workspace
    let path = format!("assemble[{i}]");
    let mut inputs = Vec::new();
    let mut idx = 0;
    loop {
        let part = fields.get(idx).ok_or_else(|| {
            ScenarioError::new(path.clone(), "expected `<a> + <b> -> <out> at <loc>`")
        })?;
        inputs.push(part.to_string());
        match fields.get(idx + 1) {
            Some(&"+") => idx += 2,
            Some(&"->") => {
                idx += 2;
                break;
            }
            _ => {
                return Err(ScenarioError::new(
                    path,
                    "expected `+` or `->` between parts",
                ))
            }
        }
    }
    let output = fields
        .get(idx)
        .ok_or_else(|| ScenarioError::new(path.clone(), "missing output part"))?;
    if fields.get(idx + 1) != Some(&"at") || fields.len() != idx + 3 {
        return Err(ScenarioError::new(
            path,
            "expected `at <location>` at the end",
        ));
    }
    cfg.assemble_rules.push(AssembleRule {
        inputs,
        output: output.to_string(),
        at: fields[idx + 2].to_string(),
    });
    Ok(())
}

fn split_kv<'a>(path: &str, field: &'a str) -> Result<(&'a str, &'a str), ScenarioError> {
    field.split_once('=').ok_or_else(|| {
        ScenarioError::new(
            path.to_string(),
            format!("expected key=value, got `{field}`"),
        )
    })
}

enum Unit {
    None,
    Mass,
    Length,
    Time,
}

/// Parse a number with an optional unit suffix, converting to base
/// units (kg, m, s).
fn scalar(path: &str, text: &str, unit: Unit) -> Result<f64, ScenarioError> {
    let bad = |msg: String| ScenarioError::new(path.to_string(), msg);
    let (num_txt, factor) = match unit {
        Unit::Mass => {
            if let Some(t) = text.strip_suffix("kg") {
                (t, 1.0)
            } else if let Some(t) = text.strip_suffix('g') {
                (t, 1e-3)
            } else {
                (text, 1.0)
            }
        }
        Unit::Length => {
            if let Some(t) = text.strip_suffix("cm") {
                (t, 1e-2)
            } else if let Some(t) = text.strip_suffix('m') {
                (t, 1.0)
            } else {
                (text, 1.0)
            }
        }
        Unit::Time => (text.strip_suffix('s').unwrap_or(text), 1.0),
        Unit::None => (text, 1.0),
    };
    let v: f64 = num_txt
        .parse()
        .map_err(|_| bad(format!("bad number `{text}`")))?;
    if !v.is_finite() {
        return Err(bad(format!("non-finite number `{text}`")));
    }
    Ok(v * factor)
}

/// `(x,y,z)` with optional length suffixes per component.
fn point(path: &str, text: &str) -> Result<Point3, ScenarioError> {
    let inner = text
        .strip_prefix('(')
        .and_then(|t| t.strip_suffix(')'))
        .ok_or_else(|| {
            ScenarioError::new(path.to_string(), format!("expected (x,y,z), got `{text}`"))
        })?;
    let parts: Vec<&str> = inner.split(',').collect();
    if parts.len() != 3 {
        return Err(ScenarioError::new(
            path.to_string(),
            format!("expected 3 coordinates, got {}", parts.len()),
        ));
    }
    Ok(Point3::new(
        scalar(path, parts[0].trim(), Unit::Length)?,
        scalar(path, parts[1].trim(), Unit::Length)?,
        scalar(path, parts[2].trim(), Unit::Length)?,
    ))
}

/// `(x,y,z)..(x,y,z)` as one box; `|`-separated boxes form a union.
fn parse_region(path: &str, text: &str) -> Result<Region, ScenarioError> {
    let mut region = Region::empty();
    for box_txt in text.split('|') {
        let (lo, hi) = box_txt.split_once("..").ok_or_else(|| {
            ScenarioError::new(
                path.to_string(),
                format!("expected (..)..(..), got `{box_txt}`"),
            )
        })?;
        let b = Aabb::new(point(path, lo)?, point(path, hi)?)
            .map_err(|e| ScenarioError::new(path.to_string(), e.to_string()))?;
        region.boxes.push(b);
    }
    Ok(region)
}
