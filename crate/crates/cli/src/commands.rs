use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use omegalab::chain::{
    certify_blocks, certify_points, ict_certificates, ict_finite, invariance_check_finite, verdict_json,
    wi_bruteforce, BoxPartition, FiniteModel, IctVerdict, MAX_SUBSET,
};
use omegalab::counterexamples::{run_all, run_example, ExampleId, ExampleReport};
use omegalab::omega::{nonrealizability_report, realize_expanding, realize_sft, Realizability, RealizabilityExample};
use omegalab::par::Execution;
use omegalab::pseudo_orbit::{is_eps_pseudo_orbit, verify_h_shadow, System};
use omegalab::shadowing::{delta_for_eps, h_shadow_expanding, negative_h_shadow_cert, sft_h_shadow, NegativeCert, ShadowError};
use omegalab::symbolic::{ShiftPresentation, SubsystemSpec};
use omegalab::{PlMap, Scalar};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use crate::config::{load_orbit, load_set, rational, size_guard, RunConfig, SetSpec};
use crate::error::CliError;

/// JSON payload plus the exit code it maps to.
pub struct Outcome {
    pub payload: Value,
    pub code: i32,
}

const CERTIFICATE_LIMIT: usize = 8;

fn verdict_code(v: &IctVerdict) -> i32 {
    match v {
        IctVerdict::Yes { .. } => 0,
        IctVerdict::No { .. } => 1,
        IctVerdict::Unknown { .. } => 2,
    }
}

fn require_set(cfg: &RunConfig, system: &System) -> Result<SetSpec, CliError> {
    let spec = cfg.set.as_deref().ok_or_else(|| CliError::Input("--set is required".into()))?;
    load_set(spec, system)
}

pub fn ict_check(cfg: &RunConfig, dot: Option<&Path>) -> Result<Outcome, CliError> {
    let system = cfg.system()?;
    let set = require_set(cfg, &system)?;
    let (mut payload, graph_dot, code) = match (&system, set) {
        (System::Interval(map), SetSpec::Points { points, .. }) => {
            let eps = cfg.eps()?;
            let partition = match cfg.partition {
                Some(0) => return Err(CliError::Input("--partition must be positive".into())),
                Some(n) => Some(BoxPartition::uniform(&map.domain(), n)?),
                None => None,
            };
            let (inner, outer, s, verdict) = certify_points(map, &points, &eps, partition, Execution::default())?;
            let certs = if verdict.is_yes() { ict_certificates(&inner, &s, CERTIFICATE_LIMIT)? } else { Vec::new() };
            let mut v = verdict_json(&verdict, &inner, &certs);
            v["set_boxes"] = json!(s);
            let shown = if verdict.is_no() { &outer } else { &inner };
            (v, shown.to_dot(), verdict_code(&verdict))
        }
        (System::Shift(ambient), SetSpec::Shift { lambda, .. }) => {
            let k = cfg.k()?;
            let (graph, verdict) = certify_blocks(ambient, lambda.as_ref(), k)?;
            let all: Vec<usize> = (0..graph.len()).collect();
            let certs = if verdict.is_yes() { ict_certificates(&graph, &all, CERTIFICATE_LIMIT)? } else { Vec::new() };
            let mut v = verdict_json(&verdict, &graph, &certs);
            v["blocks"] = json!((0..graph.len()).map(|i| graph.vertex_label(i)).collect::<Vec<_>>());
            (v, graph.to_dot(), verdict_code(&verdict))
        }
        _ => unreachable!("sets are resolved against their system"),
    };
    if let Some(path) = dot {
        fs::write(path, graph_dot).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    payload["config"] = json!(cfg);
    Ok(Outcome { payload, code })
}

pub fn shadow(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let system = cfg.system()?;
    let path = cfg.orbit.as_deref().ok_or_else(|| CliError::Input("--orbit is required".into()))?;
    let doc = load_orbit(path)?;
    let (mut payload, code) = match &system {
        System::Interval(map) => shadow_interval(cfg, map, &doc)?,
        System::Shift(shift) => {
            let po = doc.word_states(shift)?;
            let k = cfg.k.unwrap_or(po.states()[0].len());
            let r = sft_h_shadow(shift, po.states(), k)?;
            (json!({"result": "shadowed", "shadow": r}), 0)
        }
    };
    payload["config"] = json!(cfg);
    Ok(Outcome { payload, code })
}

/// A range obstruction answers 1 before any construction is attempted;
/// failures of the nest construction itself are inconclusive.
fn shadow_interval(cfg: &RunConfig, map: &PlMap, doc: &omegalab::pseudo_orbit::PseudoOrbitDoc) -> Result<(Value, i32), CliError> {
    let po = doc.interval_states()?;
    let eps = cfg.eps()?;
    let budget = cfg.budget()?;
    for x in po.states() {
        budget.check(x)?;
    }
    let cert = negative_h_shadow_cert(map, &po, &eps)?;
    if let NegativeCert::Impossible { .. } = cert {
        return Ok((json!({"result": "impossible", "certificate": cert}), 1));
    }
    let delta = match delta_for_eps(map, &eps) {
        Ok(d) => d,
        Err(e @ ShadowError::NotExpanding(_)) => {
            return Ok((json!({"result": "inconclusive", "reason": e.to_string(), "certificate": cert}), 2));
        }
        Err(e) => return Err(e.into()),
    };
    if !is_eps_pseudo_orbit(map, &po, &delta) {
        return Err(CliError::Analysis(format!("the states are not a {delta}-pseudo-orbit (δ = delta_for_eps(ε))")));
    }
    match h_shadow_expanding(map, &po, &eps) {
        Ok(r) => {
            let verified = r.point().is_some_and(|z| verify_h_shadow(map, &po, z, &eps));
            Ok((json!({"result": "shadowed", "delta": delta, "verified": verified, "shadow": r}), 0))
        }
        Err(e @ (ShadowError::Lap { .. } | ShadowError::EmptyNest { .. })) => {
            Ok((json!({"result": "inconclusive", "reason": e.to_string(), "certificate": cert}), 2))
        }
        Err(e) => Err(e.into()),
    }
}

fn report_outcome(example: RealizabilityExample) -> Result<(Value, i32), CliError> {
    let r = nonrealizability_report(example)?;
    let code = match r.verdict {
        Realizability::Realizable => 0,
        Realizability::NotRealizable => 1,
        Realizability::Undetermined => 2,
    };
    Ok((json!({"report": r}), code))
}

pub fn realize(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let system = cfg.system()?;
    let set = require_set(cfg, &system)?;
    let (mut payload, code) = match (&system, set) {
        (System::Interval(map), SetSpec::Points { name, points }) => {
            if map == &PlMap::exact_map() && name.starts_with('H') {
                report_outcome(RealizabilityExample::ExactMapH)?
            } else {
                let depth = cfg.depth.unwrap_or(6);
                let precision = match &cfg.precision {
                    Some(p) => rational(p)?,
                    None => Scalar::one(),
                };
                let nest = realize_expanding(map, &points, depth, &precision, &cfg.budget()?, Execution::default())?;
                (json!({"realization": nest.to_json()}), 0)
            }
        }
        (System::Shift(ambient), SetSpec::Shift { lambda, .. }) => {
            let target = match &lambda {
                None => ambient.clone(),
                Some(SubsystemSpec::Presentation(p)) => p.clone(),
                Some(SubsystemSpec::Blocks(_)) => {
                    return Err(CliError::Input("realize needs a presentation of the subsystem, not a block list".into()))
                }
            };
            if target.as_sft().is_none()
                && ambient == &ShiftPresentation::bridged_loops()
                && target == ShiftPresentation::unbridged_loops()
            {
                report_outcome(RealizabilityExample::SoficIct)?
            } else {
                let k = cfg.k.or(cfg.depth).unwrap_or(6);
                let stream = realize_sft(&target, k)?;
                (json!({"realization": stream.to_json(cfg.length.unwrap_or(256))}), 0)
            }
        }
        _ => unreachable!("sets are resolved against their system"),
    };
    payload["config"] = json!(cfg);
    Ok(Outcome { payload, code })
}

fn examples_outcome(reports: Vec<ExampleReport>) -> Outcome {
    let passed = reports.iter().filter(|r| r.passed).count();
    let total = reports.len();
    Outcome {
        payload: json!({"passed": passed, "total": total, "reports": reports}),
        code: if passed == total { 0 } else { 1 },
    }
}

pub fn examples_run_all() -> Outcome {
    examples_outcome(run_all())
}

pub fn examples_run(id: &str) -> Result<Outcome, CliError> {
    let id = ExampleId::parse(id).ok_or_else(|| {
        let known: Vec<_> = ExampleId::ALL.iter().map(|i| i.name()).collect();
        CliError::Input(format!("unknown example {id:?}; known: {known:?}"))
    })?;
    Ok(examples_outcome(vec![run_example(id)]))
}

/// Random model on `1..=n` points of a line with a random nonempty `Λ`.
/// `Λ` is a uniform subset of uniform size, a periodic orbit, or a
/// periodic orbit with a few extra points, each a third of the time.
fn random_instance(rng: &mut ChaCha8Rng, n_max: usize) -> Result<(FiniteModel, Vec<usize>), CliError> {
    let n = rng.gen_range(1..=n_max);
    let mut slots: Vec<i64> = (0..(16 * n_max as i64)).collect();
    slots.shuffle(rng);
    let mut positions: Vec<i64> = slots[..n].to_vec();
    positions.sort_unstable();
    let positions: Vec<Scalar> = positions.into_iter().map(Scalar::int).collect();
    let map: Vec<usize> = if rng.gen_bool(0.3) {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(rng);
        p
    } else {
        (0..n).map(|_| rng.gen_range(0..n)).collect()
    };
    let model = FiniteModel::on_line(&positions, map)?;
    let cycle = |rng: &mut ChaCha8Rng| {
        let mut x = rng.gen_range(0..n);
        for _ in 0..n {
            x = model.image(x);
        }
        let mut c = vec![x];
        let mut y = model.image(x);
        while y != x {
            c.push(y);
            y = model.image(y);
        }
        c
    };
    let mut lambda = match rng.gen_range(0..3) {
        0 => {
            let mut all: Vec<usize> = (0..n).collect();
            all.shuffle(rng);
            all.truncate(rng.gen_range(1..=n));
            all
        }
        1 => cycle(rng),
        _ => {
            let mut c = cycle(rng);
            for _ in 0..rng.gen_range(1..=3) {
                c.push(rng.gen_range(0..n));
            }
            c
        }
    };
    lambda.sort_unstable();
    lambda.dedup();
    Ok((model, lambda))
}

/// Compares weak incompressibility with internal chain transitivity on
/// random finite models. Mismatches are dumped and classified.
pub fn oracle_wi_ict(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let n = cfg.n.unwrap_or(10);
    if n == 0 {
        return Err(CliError::Input("--n must be positive".into()));
    }
    size_guard(n, MAX_SUBSET)?;
    let trials = cfg.trials.unwrap_or(500);
    let seed = cfg.seed.unwrap_or(0);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mismatches = Vec::new();
    let mut classes: BTreeMap<&str, usize> = BTreeMap::new();
    let (mut ict_count, mut invariance_failures) = (0, 0);
    for trial in 0..trials {
        let (model, lambda) = random_instance(&mut rng, n)?;
        let wi = wi_bruteforce(&model, &lambda)?;
        let ict = ict_finite(&model, &lambda)?;
        if ict {
            ict_count += 1;
            invariance_failures += (!invariance_check_finite(&model, &lambda)) as usize;
        }
        if wi != ict {
            let class = if lambda.len() == 1 && model.image(lambda[0]) != lambda[0] {
                "singleton_not_fixed"
            } else {
                "other"
            };
            *classes.entry(class).or_default() += 1;
            mismatches.push(json!({"trial": trial, "wi": wi, "ict": ict, "class": class, "model": model, "lambda": lambda}));
        }
    }
    let code = if mismatches.is_empty() && invariance_failures == 0 { 0 } else { 1 };
    let payload = json!({
        "trials": trials,
        "n": n,
        "seed": seed,
        "ict_sets": ict_count,
        "invariance_failures": invariance_failures,
        "mismatches": mismatches.len(),
        "mismatch_classes": classes,
        "mismatched_instances": mismatches,
        "config": cfg,
    });
    Ok(Outcome { payload, code })
}
