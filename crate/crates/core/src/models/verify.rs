use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{calabi_yau_index, expected_in, Fibration, ModelSpec, Relation, RelationKind};
use crate::atlas::{check_cocycle, check_weight_law, transport_table, Atlas, TransitionMap};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graded_ring::{GradedPoly, Grading, Parity, VarSpec, VarTable};
use crate::moyal::{check_quantization_contract, random_poly, ContractOptions, StarEngine};
use crate::poisson::{is_poisson, poisson_bracket, SuperBivector};
use crate::report::Status;

#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub contract: ContractOptions,
    pub run_contract: bool,
    /// Overrides the model's truncation order.
    pub max_order: Option<u32>,
    /// Random cases for the antisymmetry and Leibniz checks.
    pub bracket_cases: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            contract: ContractOptions::default(),
            run_contract: true,
            max_order: None,
            bracket_cases: 50,
        }
    }
}

impl VerifyOptions {
    pub fn with_exec(mut self, exec: Exec) -> Self {
        self.contract.exec = exec;
        self
    }

    fn exec(&self) -> Exec {
        self.contract.exec
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Record {
    pub check_id: String,
    pub category: String,
    pub status: Status,
    pub lhs: String,
    pub rhs: String,
    pub detail: String,
}

impl Record {
    fn new(category: &str, check_id: impl Into<String>, status: Status) -> Self {
        Record {
            check_id: check_id.into(),
            category: category.to_string(),
            status,
            lhs: String::new(),
            rhs: String::new(),
            detail: String::new(),
        }
    }

    fn sides(mut self, lhs: String, rhs: String) -> Self {
        self.lhs = lhs;
        self.rhs = rhs;
        self
    }

    fn detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    fn error(category: &str, check_id: impl Into<String>, e: &Error) -> Self {
        Record::new(category, check_id, Status::Fail).detail(e.to_string())
    }
}

impl fmt::Display for Record {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lhs.is_empty() {
            write!(f, "{} : {}", self.check_id, self.status)?;
        } else {
            write!(f, "{} = {} : {}", self.check_id, self.lhs, self.status)?;
            if self.status == Status::Fail && !self.rhs.is_empty() {
                write!(f, " (expected {})", self.rhs)?;
            }
        }
        if !self.detail.is_empty() && (self.lhs.is_empty() || self.status == Status::Fail) {
            write!(f, " [{}]", self.detail)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub model: String,
    pub records: Vec<Record>,
}

impl VerificationReport {
    /// True when no record failed; skipped records do not count against it.
    pub fn passed(&self) -> bool {
        self.records.iter().all(|r| r.status != Status::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Record> {
        self.records.iter().filter(|r| r.status == Status::Fail)
    }

    pub fn record(&self, check_id: &str) -> Option<&Record> {
        self.records.iter().find(|r| r.check_id == check_id)
    }

    pub fn category<'a>(&'a self, category: &'a str) -> impl Iterator<Item = &'a Record> {
        self.records.iter().filter(move |r| r.category == category)
    }
}

pub fn verify_model(model: &ModelSpec, opts: &VerifyOptions) -> VerificationReport {
    let mut records = Vec::new();
    records.extend(poisson_checks(model, opts));
    let max_order = opts.max_order.unwrap_or(model.max_order);
    let engine = StarEngine::new(model.bivector.clone(), max_order);
    match &engine {
        Ok(_) => records.push(Record::new("engine", "engine build", Status::Pass).detail(format!("max order {max_order}"))),
        Err(e) => records.push(Record::error("engine", "engine build", e)),
    }
    if let Ok(engine) = &engine {
        records.extend(relation_checks(model, engine, opts.exec()));
        if opts.run_contract {
            let report = check_quantization_contract(engine, &opts.contract);
            for c in report.checks {
                records.push(Record::new("contract", format!("contract {}", c.name), c.status).detail(c.detail));
            }
        } else {
            records.push(Record::new("contract", "contract", Status::Skip).detail("disabled"));
        }
    }
    if let Some(f) = &model.fibration {
        records.extend(fibration_checks(model, f, max_order, opts.exec()));
    }
    if model.atlas.is_some() {
        records.extend(atlas_checks(model, max_order, opts.exec()));
    }
    if let Some(cy) = &model.cy {
        let idx = calabi_yau_index(cy);
        records.push(
            Record::new("cy", "cy index", Status::from_bool(idx.is_calabi_yau()))
                .sides(idx.to_string(), "0".into())
                .detail(cy.to_string()),
        );
    }
    VerificationReport {
        model: model.name.clone(),
        records,
    }
}

fn bit(p: &GradedPoly) -> bool {
    p.parity_of() == Grading::Odd
}

fn signed(neg: bool, p: GradedPoly) -> GradedPoly {
    if neg {
        -p
    } else {
        p
    }
}

/// Bracket identities with the parity shift of the bivector: for an odd
/// bivector every argument parity is shifted by one.
struct Bracket<'a> {
    pi: &'a SuperBivector,
    shift: bool,
}

impl Bracket<'_> {
    fn br(&self, f: &GradedPoly, g: &GradedPoly) -> GradedPoly {
        poisson_bracket(self.pi, f, g)
    }

    fn deg(&self, f: &GradedPoly) -> bool {
        bit(f) ^ self.shift
    }

    fn antisymmetry(&self, f: &GradedPoly, g: &GradedPoly) -> GradedPoly {
        let swapped = signed(self.deg(f) && self.deg(g), self.br(g, f));
        &self.br(f, g) + &swapped
    }

    fn jacobi(&self, f: &GradedPoly, g: &GradedPoly, h: &GradedPoly) -> GradedPoly {
        let (df, dg, dh) = (self.deg(f), self.deg(g), self.deg(h));
        let t1 = signed(df && dh, self.br(f, &self.br(g, h)));
        let t2 = signed(dg && df, self.br(g, &self.br(h, f)));
        let t3 = signed(dh && dg, self.br(h, &self.br(f, g)));
        &(&t1 + &t2) + &t3
    }

    fn leibniz(&self, f: &GradedPoly, g: &GradedPoly, h: &GradedPoly) -> GradedPoly {
        let lhs = self.br(f, &(g * h));
        let rhs = &(&self.br(f, g) * h) + &signed(self.deg(f) && bit(g), g * &self.br(f, h));
        &lhs - &rhs
    }
}

fn tally<T>(category: &str, id: &str, cases: &[T], failures: Vec<Option<String>>) -> Record {
    let failed: Vec<String> = failures.into_iter().flatten().collect();
    let status = Status::from_bool(failed.is_empty());
    let detail = match failed.first() {
        None => format!("{} cases", cases.len()),
        Some(first) => format!("{} of {} cases failed; first: {first}", failed.len(), cases.len()),
    };
    Record::new(category, id, status).detail(detail)
}

fn homogeneous_samples(table: &VarTable, n: usize, seed: u64, arity: usize) -> Vec<Vec<GradedPoly>> {
    let vars: Vec<&VarSpec> = table.generators().collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n)
        .map(|_| {
            (0..arity)
                .map(|_| {
                    let p = Parity::from_bit(rand::Rng::random_bool(&mut rng, 0.5));
                    random_poly(&mut rng, &vars, Some(p), 3, 3)
                })
                .collect()
        })
        .collect()
}

fn poisson_checks(model: &ModelSpec, opts: &VerifyOptions) -> Vec<Record> {
    const CAT: &str = "poisson";
    let pi = &model.bivector;
    let table = &model.table;
    let exec = opts.exec();
    let mut out = Vec::new();
    out.push(Record::new(CAT, "poisson schouten", Status::from_bool(is_poisson(pi))).detail("[pi, pi] = 0"));
    out.push(match pi.first_non_central() {
        None => Record::new(CAT, "poisson central", Status::Pass),
        Some(v) => Record::new(CAT, "poisson central", Status::Fail).detail(format!("a coefficient depends on `{}`", table.get(v).name)),
    });
    let shift = match pi.parity() {
        Grading::Even => false,
        Grading::Odd => true,
        Grading::Mixed => {
            out.push(Record::new(CAT, "poisson parity", Status::Fail).detail("bivector has mixed parity"));
            return out;
        }
    };
    let br = Bracket { pi, shift };
    let gens: Vec<GradedPoly> = table.generators().map(GradedPoly::var).collect();
    let render3 = |f: &GradedPoly, g: &GradedPoly, h: &GradedPoly| {
        format!("({}, {}, {})", f.render(table), g.render(table), h.render(table))
    };

    let mut pairs: Vec<Vec<GradedPoly>> = Vec::new();
    for f in &gens {
        for g in &gens {
            pairs.push(vec![f.clone(), g.clone()]);
        }
    }
    pairs.extend(homogeneous_samples(table, opts.bracket_cases, opts.contract.seed ^ 0xa5, 2));
    let fails = exec.map(&pairs, |p| {
        (!br.antisymmetry(&p[0], &p[1]).is_zero()).then(|| format!("({}, {})", p[0].render(table), p[1].render(table)))
    });
    out.push(tally(CAT, "poisson antisymmetry", &pairs, fails));

    let idx: Vec<usize> = (0..gens.len()).collect();
    let fails: Vec<Option<String>> = exec
        .map(&idx, |&i| {
            let mut local = Vec::new();
            for g in &gens {
                for h in &gens {
                    let bad = !br.jacobi(&gens[i], g, h).is_zero();
                    local.push(bad.then(|| render3(&gens[i], g, h)));
                }
            }
            local
        })
        .into_iter()
        .flatten()
        .collect();
    let triples = vec![(); gens.len().pow(3)];
    out.push(tally(CAT, "poisson jacobi", &triples, fails));

    let triples = homogeneous_samples(table, opts.bracket_cases, opts.contract.seed ^ 0x1e1b, 3);
    let fails = exec.map(&triples, |t| (!br.leibniz(&t[0], &t[1], &t[2]).is_zero()).then(|| render3(&t[0], &t[1], &t[2])));
    out.push(tally(CAT, "poisson leibniz", &triples, fails));
    out
}

/// Generator pairs `(a, b)` with `a` not after `b`, in declaration order.
fn generator_pairs(table: &VarTable) -> Vec<(String, String)> {
    let gens: Vec<&str> = table.generators().map(|s| s.name.as_str()).collect();
    let mut out = Vec::new();
    for (i, a) in gens.iter().enumerate() {
        for b in &gens[i..] {
            out.push((a.to_string(), b.to_string()));
        }
    }
    out
}

fn relation_checks(model: &ModelSpec, engine: &StarEngine, exec: Exec) -> Vec<Record> {
    const CAT: &str = "relations";
    if model.relations.is_empty() {
        return vec![Record::new(CAT, "relations", Status::Skip).detail("no relations declared")];
    }
    let table = &model.table;
    let pairs = generator_pairs(table);
    exec.map(&pairs, |(a, b)| {
        let kind = RelationKind::for_pair(table, a, b).unwrap_or(RelationKind::Comm);
        let id = format!("{kind} {a} {b}");
        let expected = model.expected_relation(a, b).unwrap_or_default().shift_hbar(1);
        let computed = model
            .var(a)
            .and_then(|fa| model.var(b).and_then(|fb| engine.supercommutator(&fa, &fb)));
        match computed {
            Ok(c) => Record::new(CAT, id, Status::from_bool(c == expected))
                .sides(render(model, &c), render(model, &expected)),
            Err(e) => Record::error(CAT, id, &e),
        }
    })
}

fn render(model: &ModelSpec, p: &GradedPoly) -> String {
    p.display(&model.table).with_aliases(&model.aliases).to_string()
}

/// hbar-coefficients of the supercommutators of all mapped generators, computed
/// on the base with the bivector read off `base_relations`.
pub fn fibration_pullback(
    model: &ModelSpec,
    base_relations: &[Relation],
) -> Result<BTreeMap<(String, String), GradedPoly>> {
    let f = model
        .fibration
        .as_ref()
        .ok_or_else(|| Error::MissingFibration(model.name.clone()))?;
    pullback_with(model, f, base_relations, model.max_order, Exec::Sequential)
}

fn pullback_with(
    model: &ModelSpec,
    f: &Fibration,
    base_relations: &[Relation],
    max_order: u32,
    exec: Exec,
) -> Result<BTreeMap<(String, String), GradedPoly>> {
    let pi = super::bivector_from_relations(&f.base, base_relations)?;
    let engine = StarEngine::new(pi, max_order)?;
    let sub = f.substitution(&model.table)?;
    let mapped: Vec<&str> = f.map.iter().map(|(n, _)| n.as_str()).collect();
    let mut pairs = Vec::new();
    for (i, a) in mapped.iter().enumerate() {
        for b in &mapped[i..] {
            pairs.push((a.to_string(), b.to_string()));
        }
    }
    let results = exec.map(&pairs, |(a, b)| -> Result<GradedPoly> {
        let fa = sub.apply(&model.var(a)?)?;
        let fb = sub.apply(&model.var(b)?)?;
        let br = engine.supercommutator(&fa, &fb)?;
        let coeff = br.hbar_coefficient(1);
        if coeff.shift_hbar(1) != br {
            return Err(Error::InvalidModel(format!("pulled-back bracket of `{a}` and `{b}` is not of first order")));
        }
        Ok(coeff)
    });
    pairs.into_iter().zip(results).map(|(k, r)| r.map(|v| (k, v))).collect()
}

fn fibration_checks(model: &ModelSpec, f: &Fibration, max_order: u32, exec: Exec) -> Vec<Record> {
    const CAT: &str = "fibration";
    let mut out = Vec::new();
    let sub = match f.substitution(&model.table) {
        Ok(s) => s,
        Err(e) => return vec![Record::error(CAT, "fibration map", &e)],
    };
    let base_render = |p: &GradedPoly| p.render(&f.base);
    if !f.expectations.is_empty() {
        match pullback_with(model, f, &f.base_relations, max_order, exec) {
            Err(e) => out.push(Record::error(CAT, "pullback", &e)),
            Ok(table) => {
                for ((a, b), got) in table {
                    let kind = RelationKind::for_pair(&model.table, &a, &b).unwrap_or(RelationKind::Comm);
                    let expected = expected_in(&model.table, &f.expectations, &a, &b).unwrap_or_default();
                    let (got, expected) = (got.shift_hbar(1), expected.shift_hbar(1));
                    out.push(
                        Record::new(CAT, format!("pullback {kind} {a} {b}"), Status::from_bool(got == expected))
                            .sides(base_render(&got), base_render(&expected)),
                    );
                }
            }
        }
    }
    for (name, expr) in &f.identities {
        let id = format!("identity {name}");
        out.push(match sub.apply(expr) {
            Ok(p) => Record::new(CAT, id, Status::from_bool(p.is_zero())).sides(base_render(&p), "0".into()),
            Err(e) => Record::error(CAT, id, &e),
        });
    }
    if let Some(atlas) = &model.atlas {
        for (name, image) in &f.map {
            let Some(w) = model.weights.get(name) else { continue };
            let mut degrees = Vec::new();
            let mut ok = true;
            for (factor, want) in atlas.factors.iter().zip(w) {
                let coords: Vec<_> = factor.coords.iter().filter_map(|c| f.base.lookup(c)).map(|s| s.id()).collect();
                if coords.is_empty() {
                    continue;
                }
                let mut seen = Vec::new();
                for (m, _) in image.terms() {
                    let d: i64 = m.even().iter().filter(|(v, _)| coords.contains(v)).map(|(_, e)| *e as i64).sum();
                    if !seen.contains(&d) {
                        seen.push(d);
                    }
                }
                ok &= seen == [*want as i64];
                degrees.push(seen.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("|"));
            }
            if degrees.is_empty() {
                continue;
            }
            let want: Vec<String> = w.iter().map(|d| d.to_string()).collect();
            out.push(
                Record::new(CAT, format!("degree {name}"), Status::from_bool(ok))
                    .sides(degrees.join(","), want.join(",")),
            );
        }
    }
    out
}

fn atlas_checks(model: &ModelSpec, max_order: u32, exec: Exec) -> Vec<Record> {
    const CAT: &str = "atlas";
    let spec = model.atlas.as_ref().expect("atlas present");
    let pi = spec.bivector.clone().unwrap_or_else(|| model.bivector.clone());
    let atlas = StarEngine::new(pi, max_order).and_then(|e| Atlas::new(&e, &spec.factors, &model.weights));
    let atlas = match atlas {
        Ok(a) => a,
        Err(e) => return vec![Record::error(CAT, "atlas charts", &e)],
    };
    let mut out = vec![Record::new(CAT, "atlas charts", Status::Pass).detail(
        atlas.charts().iter().map(|c| c.name.as_str()).collect::<Vec<_>>().join(","),
    )];
    let transitions = match atlas.transitions() {
        Ok(t) => t,
        Err(e) => {
            out.push(Record::error(CAT, "atlas transitions", &e));
            return out;
        }
    };
    let per: Vec<Vec<Record>> = exec.map(&transitions, |t| transition_checks(&atlas, t));
    out.extend(per.into_iter().flatten());
    for cycle in atlas.cycles() {
        let mut label = cycle.clone();
        label.push(cycle[0].clone());
        let id = format!("cocycle {}", label.join("->"));
        out.push(match atlas.cycle_maps(&cycle).and_then(|m| check_cocycle(&m)) {
            Ok(ok) => Record::new(CAT, id, Status::from_bool(ok)),
            Err(e) => Record::error(CAT, id, &e),
        });
    }
    out
}

fn transition_checks(atlas: &Atlas, t: &TransitionMap) -> Vec<Record> {
    const CAT: &str = "atlas";
    let from = atlas.chart(&t.from).expect("chart");
    let to = atlas.chart(&t.to).expect("chart");
    let label = t.label();
    let mut out = Vec::new();
    out.push(match transport_table(t, &from.bracket_table) {
        Ok(moved) => Record::new(CAT, format!("transport {label}"), Status::from_bool(moved == to.bracket_table)),
        Err(e) => Record::error(CAT, format!("transport {label}"), &e),
    });
    let laws = atlas.weight_laws(t).and_then(|laws| {
        let mut bad = Vec::new();
        for law in &laws {
            if !check_weight_law(from, to, t, law)? {
                bad.push(format!("{{{}, {}}}", law.pair.0, law.pair.1));
            }
        }
        Ok((laws.len(), bad))
    });
    out.push(match laws {
        Ok((n, bad)) if bad.is_empty() => Record::new(CAT, format!("weights {label}"), Status::Pass).detail(format!("{n} laws")),
        Ok((n, bad)) => Record::new(CAT, format!("weights {label}"), Status::Fail)
            .detail(format!("{} of {n} laws failed: {}", bad.len(), bad.join(" "))),
        Err(e) => Record::error(CAT, format!("weights {label}"), &e),
    });
    let scales = (|| -> Result<Vec<String>> {
        let mut bad = Vec::new();
        for g in atlas.weighted_generators() {
            let expected = atlas.generator_scale(t, g)?;
            let v_to = to.var(g).ok_or_else(|| Error::UnresolvedPair(g.into(), g.into(), to.name.clone()))?;
            let got = t.inverse.image_of(v_to).cloned().unwrap_or_default();
            if got != expected {
                bad.push(g.to_string());
            }
        }
        Ok(bad)
    })();
    out.push(match scales {
        Ok(bad) if bad.is_empty() => Record::new(CAT, format!("scale {label}"), Status::Pass),
        Ok(bad) => Record::new(CAT, format!("scale {label}"), Status::Fail).detail(format!("wrong weight for {}", bad.join(", "))),
        Err(e) => Record::error(CAT, format!("scale {label}"), &e),
    });
    out
}
