//! One PASS/FAIL line per acceptance criterion.
//!
//! Exits nonzero on any outcome other than the known one: the odd cotangent
//! model cannot be associative, so criterion 10 fails on exactly that check.

mod common;

use std::process::ExitCode;
use std::time::Instant;

use common::{int, oracle_agreement, prod, pullback_mismatches, random_even_bivector, var};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use superstar::atlas::{check_cocycle, check_weight_law, transport_table, Atlas, WeightLaw};
use superstar::calculus::KernelSign;
use superstar::models::{
    builtin, calabi_yau_index, verify_model, AntiChiralShift, CyIndex, CyWeights, ModelSpec, VerificationReport,
    VerifyOptions,
};
use superstar::moyal::{check_quantization_contract, monomial_basis, ContractOptions, StarEngine};
use superstar::poisson::is_poisson;
use superstar::{GradedPoly, Scalar, Status, VarTable};

const MODELS: [&str; 8] = ["T0-cotangent", "T1-cotangent", "P3|4", "WP[1,3]", "WP[2,2]", "WP[4,0]", "L5|6", "P3|N"];
const KNOWN_FAILURE: &str = "T1-cotangent: contract associativity";

struct Outcome {
    pass: bool,
    detail: String,
    failures: Vec<String>,
}

impl Outcome {
    fn from(failures: Vec<String>, ok_detail: String) -> Self {
        let detail = match failures.first() {
            None => ok_detail,
            Some(f) => format!("{} failure(s), first: {f}", failures.len()),
        };
        Outcome {
            pass: failures.is_empty(),
            detail,
            failures,
        }
    }
}

struct Ctx {
    models: Vec<ModelSpec>,
    reports: Vec<VerificationReport>,
}

impl Ctx {
    fn model(&self, name: &str) -> &ModelSpec {
        self.models.iter().find(|m| m.name == name).unwrap()
    }

    fn report(&self, name: &str) -> &VerificationReport {
        self.reports.iter().find(|r| r.model == name).unwrap()
    }
}

fn report_failures(r: &VerificationReport) -> Vec<String> {
    r.failures().map(|f| format!("{}: {f}", r.model)).collect()
}

/// Every ordered generator pair against `expected` (hbar coefficients, `None` for zero).
fn table_mismatches(m: &ModelSpec, expected: impl Fn(&str, &str) -> Option<GradedPoly>) -> (Vec<String>, usize) {
    let engine = m.engine().unwrap();
    let t = &m.table;
    let gens: Vec<&str> = t.generators().map(|g| g.name.as_str()).collect();
    let mut bad = Vec::new();
    let mut n = 0;
    for a in &gens {
        for b in &gens {
            n += 1;
            let got = engine.supercommutator(&var(t, a), &var(t, b)).unwrap();
            let want = expected(a, b).unwrap_or_default().shift_hbar(1);
            if got != want {
                bad.push(format!("[{a}, {b}] = {} != {}", got.render(t), want.render(t)));
            }
        }
    }
    (bad, n)
}

fn is_x(name: &str) -> bool {
    name.starts_with('x')
}

fn is_theta(name: &str) -> bool {
    name.starts_with('t')
}

fn order(t: &VarTable, a: &str, b: &str) -> bool {
    t.id(a).unwrap() <= t.id(b).unwrap()
}

fn s2(t: &VarTable, a: &str, b: &str) -> GradedPoly {
    &var(t, a).pow(2) + &var(t, b).pow(2)
}

fn criterion_1(ctx: &Ctx) -> Outcome {
    let m = ctx.model("T0-cotangent");
    let t = &m.table;
    let (bad, n) = table_mismatches(m, |a, b| {
        let w = |p: &str, q: &str| var(t, &format!("w_{p}_{q}"));
        if a == b && !is_theta(a) {
            return None;
        }
        if (is_x(a) && is_x(b)) || (is_theta(a) && is_theta(b)) {
            let both_odd = is_theta(a);
            return Some(match (order(t, a, b), both_odd) {
                (true, _) => w(a, b),
                (false, true) => w(b, a),
                (false, false) => -w(b, a),
            });
        }
        None
    });
    Outcome::from(bad, format!("{n} ordered generator pairs, generic constants"))
}

fn criterion_2(ctx: &Ctx) -> Outcome {
    let m = ctx.model("T1-cotangent");
    let t = &m.table;
    let (bad, n) = table_mismatches(m, |a, b| {
        let w = |p: &str, q: &str| var(t, &format!("w_{p}_{q}"));
        match (is_x(a) && is_theta(b), is_theta(a) && is_x(b)) {
            (true, _) => Some(w(a, b)),
            (_, true) => Some(-w(b, a)),
            _ => None,
        }
    });
    Outcome::from(bad, format!("{n} ordered generator pairs"))
}

fn criterion_3(ctx: &Ctx) -> Outcome {
    let m = ctx.model("P3|4");
    let t = &m.table;
    let (mut bad, n) = table_mismatches(m, |a, b| {
        let l12 = &int(2) * &prod(t, &["l1", "l2"]);
        match (a, b) {
            ("z1", "z2") => Some(l12),
            ("z2", "z1") => Some(-l12),
            _ if a == b && a.starts_with("xi") => Some(s2(t, "l1", "l2")),
            _ => None,
        }
    });
    if !is_poisson(&m.bivector) {
        bad.push("Schouten bracket is nonzero".into());
    }
    let r = ctx.report("P3|4");
    for id in ["contract bilinearity", "contract associativity", "contract first-order"] {
        match r.record(id) {
            Some(rec) if rec.status == Status::Pass => {}
            Some(rec) => bad.push(rec.to_string()),
            None => bad.push(format!("{id} missing")),
        }
    }
    let assoc = r.record("contract associativity").map(|r| r.detail.clone()).unwrap_or_default();
    Outcome::from(bad, format!("Poisson, {n} pairs, associativity {assoc}"))
}

fn atlas_of(m: &ModelSpec) -> Atlas {
    let spec = m.atlas.as_ref().unwrap();
    let pi = spec.bivector.clone().unwrap_or_else(|| m.bivector.clone());
    let engine = StarEngine::new(pi, m.max_order).unwrap();
    Atlas::new(&engine, &spec.factors, &m.weights).unwrap()
}

fn inv_pow(t: &VarTable, name: &str, k: i32) -> GradedPoly {
    GradedPoly::var_pow(t.spec(name).unwrap(), -k).unwrap()
}

fn criterion_4(ctx: &Ctx) -> Outcome {
    let m = ctx.model("P3|4");
    let atlas = atlas_of(m);
    let (p, mm) = (atlas.chart("p").unwrap(), atlas.chart("m").unwrap());
    let t = atlas.transition("p", "m").unwrap();
    let mut bad = Vec::new();
    let lp_inv = inv_pow(&p.table, "l2_p", 1);
    if t.inverse.image_of("l1_m") != Some(&lp_inv) {
        bad.push("lambda_- is not 1/lambda_+".into());
    }
    for i in 1..=4 {
        let xi = &var(&p.table, &format!("xi{i}_p")) * &lp_inv;
        if t.inverse.image_of(&format!("xi{i}_m")) != Some(&xi) {
            bad.push(format!("xi{i}_- is not xi{i}_+/lambda_+"));
        }
    }
    match transport_table(&t, &p.bracket_table) {
        Ok(moved) if moved == mm.bracket_table => {}
        Ok(_) => bad.push("transported table differs from the chart table".into()),
        Err(e) => bad.push(e.to_string()),
    }
    let factor = inv_pow(&p.table, "l2_p", 2);
    let mut laws = 0;
    for i in 1..=4 {
        for j in i..=4 {
            let law = WeightLaw {
                pair: (format!("xi{i}"), format!("xi{j}")),
                factor: factor.clone(),
            };
            laws += 1;
            if !check_weight_law(p, mm, &t, &law).unwrap() {
                bad.push(format!("{{xi{i}, xi{j}}} law"));
            }
        }
    }
    // explicit chart forms with the symbolic constants
    for i in 1..=4 {
        for j in i..=4 {
            let c = |ab: &str| var(&p.table, &format!("c{i}{j}_{ab}"));
            let s = var(&p.table, "l2_p");
            let want = &(&c("11") + &(&int(2) * &(&c("12") * &s))) + &(&c("22") * &s.pow(2));
            if p.bracket_table.entry(&format!("xi{i}_p"), &format!("xi{j}_p")).unwrap() != want {
                bad.push(format!("chart p entry {{xi{i}, xi{j}}}"));
            }
        }
    }
    Outcome::from(bad, format!("transport p -> m exact, {laws} odd laws with factor lambda_+^-2"))
}

fn criterion_5(ctx: &Ctx) -> Outcome {
    let (mut bad, n1) = pullback_mismatches(ctx.model("P3|4"), ["l1", "l2"], true);
    let (bad2, n2) = pullback_mismatches(ctx.model("P3|N"), ["z3", "z4"], false);
    bad.extend(bad2);
    Outcome::from(bad, format!("{n1} affine and {n2} homogeneous pulled-back pairs"))
}

fn criterion_6(ctx: &Ctx) -> Outcome {
    let atlas = atlas_of(ctx.model("P3|N"));
    let mut bad = Vec::new();
    let transitions = atlas.transitions().unwrap();
    let mut laws = 0;
    for t in &transitions {
        let (k, l) = (&t.from[1..], &t.to[1..]);
        let from = atlas.chart(&t.from).unwrap();
        let to = atlas.chart(&t.to).unwrap();
        let factor = inv_pow(&from.table, &format!("z{l}_u{k}"), 2);
        for law in atlas.weight_laws(t).unwrap() {
            laws += 1;
            if law.factor != factor {
                bad.push(format!("{} factor {}", t.label(), law.factor.render(&from.table)));
            }
            if !check_weight_law(from, to, t, &law).unwrap() {
                bad.push(format!("{} law {{{}, {}}}", t.label(), law.pair.0, law.pair.1));
            }
        }
    }
    let mut pairs: Vec<(String, String)> = transitions
        .iter()
        .map(|t| if t.from < t.to { (t.from.clone(), t.to.clone()) } else { (t.to.clone(), t.from.clone()) })
        .collect();
    pairs.sort();
    pairs.dedup();
    let three: Vec<_> = atlas.cycles().into_iter().filter(|c| c.len() == 3).collect();
    for c in &three {
        if !check_cocycle(&atlas.cycle_maps(c).unwrap()).unwrap() {
            bad.push(format!("cocycle {}", c.join("->")));
        }
    }
    Outcome::from(
        bad,
        format!(
            "{} chart pairs, {} transitions, {laws} laws, {} three-cycles",
            pairs.len(),
            transitions.len(),
            three.len()
        ),
    )
}

fn criterion_7(ctx: &Ctx) -> Outcome {
    let mut bad = Vec::new();
    for (name, p, q) in [("WP[1,3]", 1, 3), ("WP[2,2]", 2, 2), ("WP[4,0]", 4, 0)] {
        let m = ctx.model(name);
        let t = &m.table;
        let (b, _) = table_mismatches(m, |a, b| {
            let l12 = &int(2) * &prod(t, &["l1", "l2"]);
            match (a, b) {
                ("z1", "z2") => Some(l12),
                ("z2", "z1") => Some(-l12),
                ("xi1", "xi1") => Some(s2(t, "l1", "l2").pow(p)),
                ("xi2", "xi2") => Some(s2(t, "l1", "l2").pow(q)),
                _ => None,
            }
        });
        bad.extend(b.into_iter().map(|f| format!("{name} {f}")));
        bad.extend(report_failures(ctx.report(name)));
    }
    Outcome::from(bad, "three weighted models verified, zero clauses included".into())
}

fn criterion_8(ctx: &Ctx) -> Outcome {
    let m = ctx.model("L5|6");
    let t = &m.table;
    let mixed = [
        ("X1", "Y1", 1, ["l2", "m2"]),
        ("X1", "Y2", 1, ["l1", "m2"]),
        ("X2", "Y1", -1, ["l2", "m1"]),
        ("X2", "Y2", -1, ["l1", "m1"]),
    ];
    let (mut bad, n) = table_mismatches(m, |a, b| {
        for (x, y, s, lm) in mixed {
            let v = &int(s) * &prod(t, &lm);
            if (a, b) == (x, y) {
                return Some(v);
            }
            if (a, b) == (y, x) {
                return Some(-v);
            }
        }
        let l12 = &int(2) * &prod(t, &["l1", "l2"]);
        match (a, b) {
            ("X1", "X2") => Some(l12),
            ("X2", "X1") => Some(-l12),
            _ if a == b && a.starts_with("xi") => Some(s2(t, "l1", "l2")),
            _ if a == b && a.starts_with("zeta") => Some(s2(t, "m1", "m2")),
            _ => None,
        }
    });
    bad.extend(report_failures(ctx.report("L5|6")));
    let s = AntiChiralShift::new().unwrap();
    let c = s.chiral_table();
    let gens: Vec<_> = c.generators().map(|g| g.id()).collect();
    let basis = monomial_basis(c, &gens, 2);
    for mono in &basis {
        let f = GradedPoly::term(Scalar::one(), mono.clone());
        let back = s.invert(&s.apply(&f).unwrap()).unwrap();
        if back != f {
            bad.push(format!("round trip of {}", f.render(c)));
        }
    }
    Outcome::from(bad, format!("{n} ordered pairs, anti-chiral round trip on {} monomials", basis.len()))
}

fn criterion_9() -> Outcome {
    let mut bad = Vec::new();
    let mut cases = 0;
    for n_odd in 0..=12 {
        cases += 1;
        let idx = calabi_yau_index(&CyWeights::Projective { n: 3, n_odd });
        if idx.is_calabi_yau() != (n_odd == 4) {
            bad.push(format!("projective(3, {n_odd}) = {idx}"));
        }
    }
    for p in 0..=8 {
        for q in 0..=8 {
            cases += 1;
            let idx = calabi_yau_index(&CyWeights::Weighted { even: vec![1, 1, 1, 1], odd: vec![p, q] });
            if idx.is_calabi_yau() != (p + q == 4) {
                bad.push(format!("weighted(1,1,1,1; {p},{q}) = {idx}"));
            }
        }
    }
    for n_odd in 0..=8 {
        cases += 1;
        let idx = calabi_yau_index(&CyWeights::Ambitwistor { n_odd });
        if (idx == CyIndex::Pair(0, 0)) != (n_odd == 3) || !matches!(idx, CyIndex::Pair(..)) {
            bad.push(format!("ambitwistor({n_odd}) = {idx}"));
        }
    }
    Outcome::from(bad, format!("{cases} weight choices"))
}

fn criterion_10(ctx: &Ctx) -> Outcome {
    let mut bad = Vec::new();
    for r in &ctx.reports {
        for id in [
            "poisson antisymmetry",
            "poisson jacobi",
            "poisson leibniz",
            "contract associativity",
            "contract first-order",
        ] {
            match r.record(id) {
                Some(rec) if rec.status == Status::Pass => {}
                Some(_) => bad.push(format!("{}: {id}", r.model)),
                None => bad.push(format!("{}: {id} missing", r.model)),
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut top = 0;
    let mut pairs = 0;
    for round in 0..4 {
        let pi = random_even_bivector(&mut rng, 2, 4);
        let (b, order) = oracle_agreement(&pi, 25, 4, round);
        pairs += 25;
        top = top.max(order);
        bad.extend(b.into_iter().map(|f| format!("oracle: {f}")));
    }
    if top != 4 {
        bad.push(format!("oracle inputs only reached order {top}"));
    }
    let mut out = Outcome::from(bad, String::new());
    out.detail = if out.pass {
        format!("{} models, oracle agrees on {pairs} pairs up to order {top}", ctx.reports.len())
    } else {
        format!("failing: {}; oracle agrees on {pairs} pairs up to order {top}", out.failures.join(", "))
    };
    out
}

/// Relation table plus a reduced contract under a replaced kernel.
fn kernel_suite_fails(m: &ModelSpec, kernel: KernelSign) -> bool {
    let engine = m.engine().unwrap().with_kernel(kernel);
    let t = &m.table;
    if !m.relations.is_empty() {
        for a in t.generators() {
            for b in t.generators() {
                let want = m.expected_relation(&a.name, &b.name).unwrap_or_default().shift_hbar(1);
                let got = engine.supercommutator(&GradedPoly::var(a), &GradedPoly::var(b)).unwrap();
                if got != want {
                    return true;
                }
            }
        }
    }
    let opts = ContractOptions {
        max_degree: 2,
        random_cases: 50,
        ..ContractOptions::default()
    };
    !check_quantization_contract(&engine, &opts).passed()
}

fn criterion_11(ctx: &Ctx) -> Outcome {
    let mut bad = Vec::new();
    let mut notes = Vec::new();
    let sound: Vec<&ModelSpec> = ctx.models.iter().filter(|m| m.name != "T1-cotangent").collect();
    for kernel in [KernelSign::SlotSwap, KernelSign::Flipped, KernelSign::LeftOnBoth] {
        let caught = sound.iter().filter(|m| kernel_suite_fails(m, kernel)).count();
        if caught == 0 {
            bad.push(format!("kernel {} not detected", kernel.name()));
        }
        notes.push(format!("{} caught by {caught}/{}", kernel.name(), sound.len()));
    }

    let quick = VerifyOptions {
        run_contract: false,
        ..VerifyOptions::default()
    };
    let mut weight_mutants = 0;
    for m in ctx.models.iter().filter(|m| m.atlas.is_some()) {
        for (g, w) in &m.weights {
            for f in 0..w.len() {
                for delta in [-1, 1] {
                    let mut bad_model = m.clone();
                    bad_model.weights.get_mut(g).unwrap()[f] += delta;
                    weight_mutants += 1;
                    if verify_model(&bad_model, &quick).passed() {
                        bad.push(format!("{}: weight of {g} {delta:+} not detected", m.name));
                    }
                }
            }
        }
    }

    let mut law_mutants = 0;
    for m in ctx.models.iter().filter(|m| m.atlas.is_some()) {
        let atlas = atlas_of(m);
        for t in atlas.transitions().unwrap() {
            let (from, to) = (atlas.chart(&t.from).unwrap(), atlas.chart(&t.to).unwrap());
            for law in atlas.weight_laws(&t).unwrap() {
                let (a, b) = (from.var(&law.pair.0).unwrap(), from.var(&law.pair.1).unwrap());
                if from.bracket_table.entry(a, b).unwrap().is_zero() {
                    continue;
                }
                for s in t.scales.iter().filter(|s| **s != GradedPoly::one()) {
                    let inv = superstar::graded_ring::try_inverse(s, &from.table).unwrap();
                    for k in [s, &inv] {
                        law_mutants += 1;
                        let wrong = WeightLaw {
                            factor: &law.factor * k,
                            ..law.clone()
                        };
                        if check_weight_law(from, to, &t, &wrong).unwrap() {
                            bad.push(format!("{}: {} law {{{}, {}}} off by one not detected", m.name, t.label(), law.pair.0, law.pair.1));
                        }
                    }
                }
            }
        }
    }
    notes.push(format!("{weight_mutants} weight and {law_mutants} law-exponent mutants"));
    Outcome::from(bad, notes.join("; "))
}

fn main() -> ExitCode {
    let start = Instant::now();
    let models: Vec<ModelSpec> = MODELS.iter().map(|n| builtin(n).unwrap()).collect();
    let reports = models.iter().map(|m| verify_model(m, &VerifyOptions::default())).collect();
    let ctx = Ctx { models, reports };
    let verified = start.elapsed();
    let criteria: [fn(&Ctx) -> Outcome; 11] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        |_| criterion_9(),
        criterion_10,
        criterion_11,
    ];
    let mut outcomes = Vec::new();
    let mut times = Vec::new();
    for c in criteria {
        let t = Instant::now();
        outcomes.push(c(&ctx));
        times.push(t.elapsed().as_secs_f64());
    }
    let mut unexpected = Vec::new();
    for (i, o) in outcomes.iter().enumerate() {
        let n = i + 1;
        println!("criterion {n}: {} - {}", if o.pass { "PASS" } else { "FAIL" }, o.detail);
        let known = n == 10 && o.failures == [KNOWN_FAILURE];
        if !o.pass && !known {
            unexpected.push(n);
        }
    }
    let passed = outcomes.iter().filter(|o| o.pass).count();
    println!(
        "{passed}/{} criteria pass in {:.1}s ({:.1}s model verification, per criterion {})",
        outcomes.len(),
        start.elapsed().as_secs_f64(),
        verified.as_secs_f64(),
        times.iter().map(|t| format!("{t:.1}")).collect::<Vec<_>>().join(" ")
    );
    if unexpected.is_empty() {
        ExitCode::SUCCESS
    } else {
        println!("unexpected failures: {unexpected:?}");
        ExitCode::FAILURE
    }
}
