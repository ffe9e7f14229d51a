//! The worked counterexamples as self-checking bundles. Each claim runs
//! through the public operations of the other modules and carries the
//! certificate it produced.

use serde::Serialize;
use serde_json::{json, Value};

use crate::chain::{certify_blocks, certify_points, ict_certificates, invariance_check_graph};
use crate::numeric::{Budget, Interval, PlMap, Scalar};
use crate::omega::{nonrealizability_report, Realizability, RealizabilityExample};
use crate::par::Execution;
use crate::pseudo_orbit::is_eps_pseudo_orbit;
use crate::shadowing::{negative_h_shadow_cert, overshoot_pseudo_orbit};
use crate::symbolic::{ShiftPresentation, SubsystemSpec};

/// Default truncation of `H = {0} ∪ {±4^{-n}}`.
pub const H_TRUNCATION: u32 = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ExampleId {
    #[serde(rename = "sofic_ICT")]
    SoficIct,
    #[serde(rename = "tent_no_hshadow")]
    TentNoHShadow,
    #[serde(rename = "exact_map_H")]
    ExactMapH,
}

impl ExampleId {
    pub const ALL: [ExampleId; 3] = [ExampleId::SoficIct, ExampleId::TentNoHShadow, ExampleId::ExactMapH];

    pub fn name(self) -> &'static str {
        match self {
            ExampleId::SoficIct => "sofic_ICT",
            ExampleId::TentNoHShadow => "tent_no_hshadow",
            ExampleId::ExactMapH => "exact_map_H",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        ExampleId::ALL.into_iter().find(|id| id.name() == s)
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Claim {
    pub claim: String,
    pub anchor: String,
    pub verdict: bool,
    pub certificate: Value,
}

#[derive(Clone, Debug, Serialize)]
pub struct ExampleReport {
    pub id: ExampleId,
    pub passed: bool,
    pub claims: Vec<Claim>,
}

fn claim(claim: &str, anchor: &str, verdict: bool, certificate: Value) -> Claim {
    Claim { claim: claim.into(), anchor: anchor.into(), verdict, certificate }
}

fn failed(claim_text: &str, anchor: &str, err: impl std::fmt::Display) -> Claim {
    claim(claim_text, anchor, false, json!({"error": err.to_string()}))
}

/// `{0} ∪ {±4^{-n} : 0 <= n <= truncation}`, ascending.
pub fn exact_map_h(truncation: u32) -> Vec<Scalar> {
    let mut h = vec![Scalar::zero()];
    for n in 0..=truncation {
        let p = Scalar::one() / Scalar::pow2(2 * n);
        h.push(-p.clone());
        h.push(p);
    }
    h.sort();
    h
}

pub fn run_example(id: ExampleId) -> ExampleReport {
    let claims = match id {
        ExampleId::SoficIct => sofic_claims(),
        ExampleId::TentNoHShadow => tent_claims(),
        ExampleId::ExactMapH => exact_map_claims(H_TRUNCATION),
    };
    ExampleReport { id, passed: claims.iter().all(|c| c.verdict), claims }
}

pub fn run_all() -> Vec<ExampleReport> {
    ExampleId::ALL.into_iter().map(run_example).collect()
}

fn sofic_claims() -> Vec<Claim> {
    let x = ShiftPresentation::bridged_loops();
    let lambda = ShiftPresentation::unbridged_loops();
    let spec = SubsystemSpec::Presentation(lambda.clone());
    let mut out = Vec::new();

    let anchor = "subsystem of two loops sharing a symbol is chain transitive";
    for k in 1..=6 {
        let text = format!("Λ block graph at k = {k} is certified ICT");
        match certify_blocks(&x, Some(&spec), k) {
            Ok((g, v)) => out.push(claim(
                &text,
                anchor,
                v.is_yes() && invariance_check_graph(&g, &(0..g.len()).collect::<Vec<_>>()),
                json!({"verdict": v, "blocks": g.len(), "edges": g.graph.edge_count()}),
            )),
            Err(e) => out.push(failed(&text, anchor, e)),
        }
    }

    let sym = |c| x.alphabet().index(c).expect("symbol of the example");
    let cert = x.word_constraint_empty(&[sym('b'), sym('c')], &[sym('d')]);
    let table = match &cert {
        crate::symbolic::ConstraintCertificate::Unsat { reachable } => json!(reachable
            .iter()
            .map(|(s, seen)| json!({"state": s, "seen": x.alphabet().render(seen)}))
            .collect::<Vec<_>>()),
        crate::symbolic::ConstraintCertificate::Sat { witness } => json!({"witness": x.alphabet().render(witness)}),
    };
    out.push(claim(
        "no word of X contains both b and c while avoiding d",
        "orbits accumulating on both loops read d infinitely often",
        cert.is_unsat(),
        table,
    ));

    match nonrealizability_report(RealizabilityExample::SoficIct) {
        Ok(r) => out.push(claim(
            "Λ is not the ω-limit set of any point of X",
            "ICT set that is not an ω-limit set",
            r.verdict == Realizability::NotRealizable,
            json!(r),
        )),
        Err(e) => out.push(failed("Λ is not the ω-limit set of any point of X", "ICT set that is not an ω-limit set", e)),
    }
    out
}

fn tent_claims() -> Vec<Claim> {
    let mut out = Vec::new();
    let t = PlMap::tent(Scalar::new(3, 2)).expect("valid slope");
    let delta = Scalar::new(1, 8);
    let po = overshoot_pseudo_orbit(&delta);
    let states: Vec<String> = po.states().iter().map(Scalar::to_string).collect();
    let c = t.critical_points()[0].clone();
    let tc = t.eval(&c).expect("in domain");
    out.push(claim(
        "δ lies strictly between 0 and 1 - T(c)",
        "overshoot tolerance below the gap above the critical value",
        delta.is_positive() && delta < Scalar::one() - &tc,
        json!({"delta": delta, "T(c)": tc}),
    ));
    out.push(claim(
        "the overshooting sequence is a δ-pseudo-orbit",
        "pre-image path ending just above the critical value",
        is_eps_pseudo_orbit(&t, &po, &delta),
        json!({"states": states, "delta": delta}),
    ));
    match negative_h_shadow_cert(&t, &po, &delta) {
        Ok(cert) => out.push(claim(
            "no point shadows it with an exact final hit",
            "final state lies above the range of the map",
            cert.is_impossible(),
            json!(cert),
        )),
        Err(e) => out.push(failed("no point shadows it with an exact final hit", "final state above the range", e)),
    }
    out
}

fn exact_map_claims(truncation: u32) -> Vec<Claim> {
    let f = PlMap::exact_map();
    let q = Scalar::new;
    let mut out = Vec::new();
    let anchor = "the exact map fixes the structure of H";

    let ones = [q(1, 1), q(-1, 1)].map(|x| f.eval(&x).expect("in domain"));
    out.push(claim("f(1) = f(-1) = 0", anchor, ones.iter().all(Scalar::is_zero), json!({"f(1)": ones[0], "f(-1)": ones[1]})));

    let mut ladder = Vec::new();
    let mut ok = true;
    for n in 0..=truncation {
        let p = Scalar::one() / Scalar::pow2(2 * (n + 1));
        let target = Scalar::one() / Scalar::pow2(2 * n);
        let (a, b) = (f.eval(&p).expect("in domain"), f.eval(&-p.clone()).expect("in domain"));
        ok &= a == target && b == -target.clone();
        ladder.push(json!({"n": n, "f(4^-(n+1))": a, "f(-4^-(n+1))": b}));
    }
    out.push(claim(&format!("f(±4^-(n+1)) = ±4^-n for n <= {truncation}"), anchor, ok, json!(ladder)));

    let left = f.image_interval(&Interval::spanning(q(0, 1), q(7, 4)));
    let right = f.image_interval(&Interval::spanning(q(7, 4), q(2, 1)));
    match (left, right) {
        (Ok(l), Ok(r)) => {
            out.push(claim(
                "f([0, 7/4]) = [0, 2]",
                "nonnegative points below 7/4 stay nonnegative",
                l == Interval::spanning(q(0, 1), q(2, 1)),
                json!({"image": l}),
            ));
            out.push(claim(
                "f([7/4, 2]) = [-2, 0]",
                "crossing to negative values passes through (7/4, 2]",
                r == Interval::spanning(q(-2, 1), q(0, 1)),
                json!({"image": r}),
            ));
        }
        (Err(e), _) | (_, Err(e)) => out.push(failed("exact images", anchor, e)),
    }

    let h = exact_map_h(truncation);
    for eps in [q(1, 16), q(1, 64)] {
        let text = format!("truncated H is certified ICT at ε = {eps}");
        let anchor = "H is closed, invariant and internally chain transitive";
        match certify_points(&f, &h, &eps, None, Execution::default()) {
            Ok((inner, _, s, v)) => {
                let certs = if v.is_yes() { ict_certificates(&inner, &s, 8).unwrap_or_default() } else { Vec::new() };
                out.push(claim(
                    &text,
                    anchor,
                    v.is_yes(),
                    json!({"verdict": v, "boxes_of_H": s.len(), "partition": inner.len(), "sample_chains": certs}),
                ));
            }
            Err(e) => out.push(failed(&text, anchor, e)),
        }
    }

    // f(H_n) ⊆ H_{n-1}: every image of a truncated point is again in H
    let budget = Budget::default();
    let images_ok = h.iter().all(|x| f.iterate(x, 1, &budget).map(|y| h.binary_search(&y).is_ok()).unwrap_or(false));
    out.push(claim(
        &format!("f maps truncated H into itself (n <= {truncation})"),
        "H is invariant; the truncation drops only the preimage ±4^-(n+1) of the outermost level",
        images_ok,
        json!({"points": h.len()}),
    ));

    match nonrealizability_report(RealizabilityExample::ExactMapH) {
        Ok(r) => out.push(claim(
            "H is not the ω-limit set of any point",
            "orbits meeting both halves of H visit (7/4, 2] infinitely often",
            r.verdict == Realizability::NotRealizable,
            json!(r),
        )),
        Err(e) => out.push(failed("H is not the ω-limit set of any point", anchor, e)),
    }

    // smoke check of topological exactness on three seed intervals
    let seeds = [Interval::spanning(q(0, 1), q(1, 64)), Interval::spanning(q(1, 3), q(1, 3) + q(1, 100)), Interval::spanning(q(-7, 4), q(-13, 8))];
    let mut spread = Vec::new();
    let mut all_full = true;
    for seed in seeds {
        let mut j = seed.clone();
        let mut steps = 0;
        while j != f.domain() && steps < 40 {
            j = f.image_interval(&j).expect("in domain");
            steps += 1;
        }
        all_full &= j == f.domain();
        spread.push(json!({"seed": seed, "steps_to_cover": steps}));
    }
    out.push(claim("sample intervals expand onto [-2, 2]", "the map is topologically exact", all_full, json!(spread)));
    out
}
