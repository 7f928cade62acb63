use std::collections::BTreeMap;

use super::{AtlasSpec, CyWeights, Fibration, ModelSpec, Relation};
use crate::atlas::ProjectiveFactor;
use crate::error::{Error, Result};
use crate::graded_ring::{GradedPoly, VarTable, VarTableBuilder};
use crate::moyal::DEFAULT_MAX_ORDER;
use crate::poisson::SuperBivector;
use crate::scalar::Scalar;

const NAMES: [&str; 8] = [
    "T0-cotangent",
    "T1-cotangent",
    "P3|4",
    "WP[1,3]",
    "WP[2,2]",
    "WP[4,0]",
    "L5|6",
    "P3|N",
];

/// Names accepted by [`builtin`]; `P3|N` also takes `P3|N:<n>`.
pub fn builtin_names() -> &'static [&'static str] {
    &NAMES
}

pub fn builtin(name: &str) -> Result<ModelSpec> {
    let model = match name {
        "T0-cotangent" => cotangent_even()?,
        "T1-cotangent" => cotangent_odd()?,
        "P3|4" => twistor()?,
        "WP[1,3]" => weighted(1, 3)?,
        "WP[2,2]" => weighted(2, 2)?,
        "WP[4,0]" => weighted(4, 0)?,
        "L5|6" => ambitwistor()?,
        "P3|N" => p3_n(4)?,
        other => match other.strip_prefix("P3|N:").and_then(|n| n.parse::<u32>().ok()) {
            Some(n) if n > 0 => p3_n(n)?,
            _ => return Err(Error::UnknownModel(name.to_string())),
        },
    };
    model.validate()?;
    Ok(model)
}

/// File name stem for a builtin: `P3|4` -> `p3_4`, `WP[1,3]` -> `wp_1_3`.
pub fn model_file_stem(name: &str) -> String {
    let mut out = String::new();
    for c in name.chars() {
        if c.is_ascii_alphanumeric() {
            out.push(c.to_ascii_lowercase());
        } else if !out.ends_with('_') {
            out.push('_');
        }
    }
    out.trim_matches('_').to_string()
}

struct Vars<'a>(&'a VarTable);

impl Vars<'_> {
    fn v(&self, name: &str) -> Result<GradedPoly> {
        Ok(GradedPoly::var(self.0.spec(name)?))
    }

    fn prod(&self, names: &[&str]) -> Result<GradedPoly> {
        let mut acc = GradedPoly::one();
        for n in names {
            acc = &acc * &self.v(n)?;
        }
        Ok(acc)
    }
}

fn half() -> GradedPoly {
    GradedPoly::constant(Scalar::new(1, 2))
}

/// `c dA ^ dB` (or `c dA v dB` for two odd directions) as bivector entries.
fn wedge(pi: &mut SuperBivector, a: &str, b: &str, c: GradedPoly) -> Result<()> {
    pi.set(a, b, &GradedPoly::int(2) * &c)
}

fn rel(table: &VarTable, a: &str, b: &str, value: GradedPoly) -> Result<Relation> {
    Relation::new(table, a, b, value)
}

fn x_names() -> Vec<String> {
    ["x11", "x12", "x21", "x22"].iter().map(|s| s.to_string()).collect()
}

fn theta_names(n: u32) -> Vec<String> {
    (1..=n).flat_map(|i| (1..=2).map(move |a| format!("t{i}_{a}"))).collect()
}

fn model(name: &str, table: VarTable, bivector: SuperBivector, relations: Vec<Relation>) -> ModelSpec {
    ModelSpec {
        name: name.to_string(),
        table,
        weights: BTreeMap::new(),
        bivector,
        relations,
        fibration: None,
        atlas: None,
        cy: None,
        max_order: DEFAULT_MAX_ORDER,
        aliases: BTreeMap::new(),
    }
}

fn w_name(a: &str, b: &str) -> String {
    format!("w_{a}_{b}")
}

// Cotangent models over C^{2|2}: x^{aa'} | theta_i^{a'} with central l's.
fn cotangent_base(constants: &[String]) -> Result<VarTable> {
    let mut b = VarTable::builder();
    for x in x_names() {
        b = b.even(x);
    }
    b = b.even("l1").even("l2");
    for t in theta_names(2) {
        b = b.odd(t);
    }
    for c in constants {
        b = b.constant(c.clone());
    }
    b.build()
}

fn cotangent_even() -> Result<ModelSpec> {
    let xs = x_names();
    let ts = theta_names(2);
    let mut pairs = Vec::new();
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            pairs.push((xs[i].clone(), xs[j].clone()));
        }
    }
    for i in 0..ts.len() {
        for j in i..ts.len() {
            pairs.push((ts[i].clone(), ts[j].clone()));
        }
    }
    let constants: Vec<String> = pairs.iter().map(|(a, b)| w_name(a, b)).collect();
    let table = cotangent_base(&constants)?;
    let v = Vars(&table);
    let mut pi = SuperBivector::new(&table);
    let mut relations = Vec::new();
    for (a, b) in &pairs {
        let w = v.v(&w_name(a, b))?;
        pi.set(a, b, w.clone())?;
        relations.push(rel(&table, a, b, w)?);
    }
    Ok(model("T0-cotangent", table, pi, relations))
}

fn cotangent_odd() -> Result<ModelSpec> {
    let mut pairs = Vec::new();
    for x in x_names() {
        for t in theta_names(2) {
            pairs.push((x.clone(), t));
        }
    }
    let constants: Vec<String> = pairs.iter().map(|(a, b)| w_name(a, b)).collect();
    let table = cotangent_base(&constants)?;
    let v = Vars(&table);
    let mut pi = SuperBivector::new(&table);
    let mut relations = Vec::new();
    for (a, b) in &pairs {
        let w = v.v(&w_name(a, b))?;
        pi.set(a, b, w.clone())?;
        relations.push(rel(&table, a, b, w)?);
    }
    Ok(model("T1-cotangent", table, pi, relations))
}

fn d_name(a: usize, b: usize) -> String {
    format!("d_x1{a}_x2{b}")
}

/// Generic constant for `{theta_i^a, theta_j^b}`, symmetric in the pair and
/// in the dotted indices.
fn c_name(i: u32, a: u32, j: u32, b: u32) -> String {
    let (i, j) = (i.min(j), i.max(j));
    format!("c{i}{j}_{}{}", a.min(b), a.max(b))
}

fn c_names(n: u32) -> Vec<String> {
    let mut out = Vec::new();
    for i in 1..=n {
        for j in i..=n {
            for ab in ["11", "12", "22"] {
                out.push(format!("c{i}{j}_{ab}"));
            }
        }
    }
    out
}

fn d_names() -> Vec<String> {
    let mut out = Vec::new();
    for a in 1..=2 {
        for b in 1..=2 {
            out.push(d_name(a, b));
        }
    }
    out
}

/// `C^{i a, j b} u_a u_b` summed over the dotted indices.
fn c_block(v: &Vars, i: u32, j: u32, u: [&str; 2]) -> Result<GradedPoly> {
    let mut acc = GradedPoly::zero();
    for a in 1..=2u32 {
        for b in 1..=2u32 {
            let c = v.v(&c_name(i, a, j, b))?;
            acc += &(&c * &v.prod(&[u[a as usize - 1], u[b as usize - 1]])?);
        }
    }
    Ok(acc)
}

/// `D^{1a, 2b} l_a l_b` summed over the dotted indices.
fn d_block(v: &Vars) -> Result<GradedPoly> {
    let mut acc = GradedPoly::zero();
    for a in 1..=2 {
        for b in 1..=2 {
            let l = v.prod(&[&format!("l{a}"), &format!("l{b}")])?;
            acc += &(&v.v(&d_name(a, b))? * &l);
        }
    }
    Ok(acc)
}

fn lambda_square(v: &Vars, u: [&str; 2]) -> Result<GradedPoly> {
    Ok(&v.v(u[0])?.pow(2) + &v.v(u[1])?.pow(2))
}

fn twistor() -> Result<ModelSpec> {
    let n = 4;
    let mut b = VarTable::builder().even("z1").even("z2").invertible("l1").invertible("l2");
    for i in 1..=n {
        b = b.odd(format!("xi{i}"));
    }
    for c in d_names().into_iter().chain(c_names(n)) {
        b = b.constant(c);
    }
    let table = b.build()?;
    let v = Vars(&table);
    let s = lambda_square(&v, ["l1", "l2"])?;
    let mut pi = SuperBivector::new(&table);
    wedge(&mut pi, "z1", "z2", v.prod(&["l1", "l2"])?)?;
    let mut relations = vec![rel(&table, "z1", "z2", &GradedPoly::int(2) * &v.prod(&["l1", "l2"])?)?];
    for i in 1..=n {
        let xi = format!("xi{i}");
        wedge(&mut pi, &xi, &xi, &half() * &s)?;
        relations.push(rel(&table, &xi, &xi, s.clone())?);
    }

    let mut generic = SuperBivector::new(&table);
    generic.set("z1", "z2", d_block(&v)?)?;
    for i in 1..=n {
        for j in i..=n {
            generic.set(&format!("xi{i}"), &format!("xi{j}"), c_block(&v, i, j, ["l1", "l2"])?)?;
        }
    }

    let mut weights = BTreeMap::new();
    for g in ["z1", "z2"].into_iter().map(String::from).chain((1..=n).map(|i| format!("xi{i}"))) {
        weights.insert(g, vec![1]);
    }

    let mut spec = model("P3|4", table.clone(), pi, relations);
    spec.weights = weights;
    spec.atlas = Some(AtlasSpec {
        factors: vec![ProjectiveFactor::new(&["l1", "l2"], &["p", "m"])],
        bivector: Some(generic),
    });
    spec.fibration = Some(twistor_fibration(&table, n, ["l1", "l2"], true)?);
    spec.cy = Some(CyWeights::Projective { n: 3, n_odd: n });
    Ok(spec)
}

/// `z^a = x^{a a'} u_{a'}`, `xi_i = theta_i^{a'} u_{a'}` over a base with
/// generic constant brackets; `u` are the fibre coordinates.
fn twistor_fibration(model: &VarTable, n: u32, u: [&str; 2], with_d: bool) -> Result<Fibration> {
    let mut b = VarTable::builder();
    for x in x_names() {
        b = b.even(x);
    }
    b = b.invertible(u[0]).invertible(u[1]);
    for t in theta_names(n) {
        b = b.odd(t);
    }
    if with_d {
        for d in d_names() {
            b = b.constant(d);
        }
    }
    for c in c_names(n) {
        b = b.constant(c);
    }
    let base = b.build()?;
    let v = Vars(&base);

    let mut base_relations = Vec::new();
    if with_d {
        for a in 1..=2 {
            for bb in 1..=2 {
                base_relations.push(rel(&base, &format!("x1{a}"), &format!("x2{bb}"), v.v(&d_name(a, bb))?)?);
            }
        }
    }
    let odd: Vec<(u32, u32)> = (1..=n).flat_map(|i| (1..=2).map(move |a| (i, a))).collect();
    for (k, &(i, a)) in odd.iter().enumerate() {
        for &(j, bb) in &odd[k..] {
            base_relations.push(rel(&base, &format!("t{i}_{a}"), &format!("t{j}_{bb}"), v.v(&c_name(i, a, j, bb))?)?);
        }
    }

    let mut map = Vec::new();
    for al in 1..=2 {
        let img = &v.prod(&[&format!("x{al}1"), u[0]])? + &v.prod(&[&format!("x{al}2"), u[1]])?;
        map.push((format!("z{al}"), img));
    }
    for i in 1..=n {
        let img = &v.prod(&[&format!("t{i}_1"), u[0]])? + &v.prod(&[&format!("t{i}_2"), u[1]])?;
        map.push((format!("xi{i}"), img));
    }

    let mut expectations = Vec::new();
    if with_d {
        expectations.push(rel(model, "z1", "z2", d_block(&v)?)?);
    }
    for i in 1..=n {
        for j in i..=n {
            expectations.push(rel(model, &format!("xi{i}"), &format!("xi{j}"), c_block(&v, i, j, u)?)?);
        }
    }
    Ok(Fibration {
        base,
        base_relations,
        map,
        expectations,
        identities: Vec::new(),
    })
}

/// `P^{3|n}` in homogeneous coordinates `z1..z4 | xi1..xin`, with the odd
/// brackets carried by `z3, z4`.
pub fn p3_n(n: u32) -> Result<ModelSpec> {
    let mut b = VarTable::builder();
    for k in 1..=4 {
        b = b.invertible(format!("z{k}"));
    }
    for i in 1..=n {
        b = b.odd(format!("xi{i}"));
    }
    for c in c_names(n) {
        b = b.constant(c);
    }
    let table = b.build()?;
    let v = Vars(&table);
    let mut pi = SuperBivector::new(&table);
    let mut relations = Vec::new();
    let mut weights = BTreeMap::new();
    for i in 1..=n {
        weights.insert(format!("xi{i}"), vec![1]);
        for j in i..=n {
            let c = c_block(&v, i, j, ["z3", "z4"])?;
            let (a, bb) = (format!("xi{i}"), format!("xi{j}"));
            pi.set(&a, &bb, c.clone())?;
            relations.push(rel(&table, &a, &bb, c)?);
        }
    }
    let mut spec = model("P3|N", table.clone(), pi, relations);
    if n != 4 {
        spec.name = format!("P3|N:{n}");
    }
    spec.weights = weights;
    spec.atlas = Some(AtlasSpec {
        factors: vec![ProjectiveFactor::new(&["z1", "z2", "z3", "z4"], &["u1", "u2", "u3", "u4"])],
        bivector: None,
    });
    spec.fibration = Some(twistor_fibration(&table, n, ["z3", "z4"], false)?);
    spec.cy = Some(CyWeights::Projective { n: 3, n_odd: n });
    Ok(spec)
}

fn binomial(n: u32, k: u32) -> i64 {
    (0..k).fold(1i64, |acc, i| acc * (n - i) as i64 / (i + 1) as i64)
}

/// `theta^{a_1..a_w} l_{a_1}..l_{a_w}` with a symmetric multi-index.
fn symmetric_pullback(v: &Vars, i: u32, w: u32) -> Result<GradedPoly> {
    if w == 0 {
        return v.v(&format!("t{i}"));
    }
    let mut acc = GradedPoly::zero();
    for ones in (0..=w).rev() {
        let idx = format!("{}{}", "1".repeat(ones as usize), "2".repeat((w - ones) as usize));
        let mono = &v.v("l1")?.pow(ones) * &v.v("l2")?.pow(w - ones);
        let t = v.v(&format!("t{i}_{idx}"))?;
        acc += &(&GradedPoly::int(binomial(w, ones)) * &(&t * &mono));
    }
    Ok(acc)
}

fn symmetric_names(i: u32, w: u32) -> Vec<String> {
    if w == 0 {
        return vec![format!("t{i}")];
    }
    (0..=w)
        .rev()
        .map(|ones| format!("t{i}_{}{}", "1".repeat(ones as usize), "2".repeat((w - ones) as usize)))
        .collect()
}

fn weighted(p: u32, q: u32) -> Result<ModelSpec> {
    let table = VarTable::builder()
        .even("z1")
        .even("z2")
        .invertible("l1")
        .invertible("l2")
        .odd("xi1")
        .odd("xi2")
        .build()?;
    let v = Vars(&table);
    let s = lambda_square(&v, ["l1", "l2"])?;
    let mut pi = SuperBivector::new(&table);
    wedge(&mut pi, "z1", "z2", v.prod(&["l1", "l2"])?)?;
    let mut relations = vec![rel(&table, "z1", "z2", &GradedPoly::int(2) * &v.prod(&["l1", "l2"])?)?];
    for (xi, w) in [("xi1", p), ("xi2", q)] {
        wedge(&mut pi, xi, xi, &half() * &s.pow(w))?;
        relations.push(rel(&table, xi, xi, s.pow(w))?);
    }
    let weights = BTreeMap::from([
        ("z1".to_string(), vec![1]),
        ("z2".to_string(), vec![1]),
        ("xi1".to_string(), vec![p as i32]),
        ("xi2".to_string(), vec![q as i32]),
    ]);

    let mut b = VarTable::builder();
    for x in x_names() {
        b = b.even(x);
    }
    b = b.invertible("l1").invertible("l2");
    for (i, w) in [(1, p), (2, q)] {
        for t in symmetric_names(i, w) {
            b = b.odd(t);
        }
    }
    let base = b.build()?;
    let bv = Vars(&base);
    let mut map = Vec::new();
    for al in 1..=2 {
        let img = &bv.prod(&[&format!("x{al}1"), "l1"])? + &bv.prod(&[&format!("x{al}2"), "l2"])?;
        map.push((format!("z{al}"), img));
    }
    map.push(("xi1".to_string(), symmetric_pullback(&bv, 1, p)?));
    map.push(("xi2".to_string(), symmetric_pullback(&bv, 2, q)?));

    let mut spec = model(&format!("WP[{p},{q}]"), table, pi, relations);
    spec.weights = weights;
    spec.atlas = Some(AtlasSpec {
        factors: vec![ProjectiveFactor::new(&["l1", "l2"], &["p", "m"])],
        bivector: None,
    });
    spec.fibration = Some(Fibration {
        base,
        base_relations: Vec::new(),
        map,
        expectations: Vec::new(),
        identities: Vec::new(),
    });
    spec.cy = Some(CyWeights::Weighted {
        even: vec![1, 1, 1, 1],
        odd: vec![p as i64, q as i64],
    });
    Ok(spec)
}

fn ambitwistor() -> Result<ModelSpec> {
    let n = 3;
    let mut b: VarTableBuilder = VarTable::builder()
        .even("X1")
        .even("X2")
        .invertible("l1")
        .invertible("l2")
        .even("Y1")
        .even("Y2")
        .invertible("m1")
        .invertible("m2");
    for i in 1..=n {
        b = b.odd(format!("xi{i}"));
    }
    for i in 1..=n {
        b = b.odd(format!("zeta{i}"));
    }
    let table = b.build()?;
    let v = Vars(&table);
    let sl = lambda_square(&v, ["l1", "l2"])?;
    let sm = lambda_square(&v, ["m1", "m2"])?;
    let mut pi = SuperBivector::new(&table);
    let mixed: [(&str, &str, i64, [&str; 2]); 4] = [
        ("X1", "Y1", 1, ["l2", "m2"]),
        ("X1", "Y2", 1, ["l1", "m2"]),
        ("X2", "Y1", -1, ["l2", "m1"]),
        ("X2", "Y2", -1, ["l1", "m1"]),
    ];
    wedge(&mut pi, "X1", "X2", v.prod(&["l1", "l2"])?)?;
    let mut relations = vec![rel(&table, "X1", "X2", &GradedPoly::int(2) * &v.prod(&["l1", "l2"])?)?];
    for (a, bb, sign, lm) in mixed {
        let c = &GradedPoly::int(sign) * &v.prod(&lm)?;
        wedge(&mut pi, a, bb, &half() * &c)?;
        relations.push(rel(&table, a, bb, c)?);
    }
    relations.push(rel(&table, "Y1", "Y2", GradedPoly::zero())?);
    for i in 1..=n {
        let (xi, zeta) = (format!("xi{i}"), format!("zeta{i}"));
        wedge(&mut pi, &xi, &xi, &half() * &sl)?;
        wedge(&mut pi, &zeta, &zeta, &half() * &sm)?;
        relations.push(rel(&table, &xi, &xi, sl.clone())?);
        relations.push(rel(&table, &zeta, &zeta, sm.clone())?);
    }

    let mut weights = BTreeMap::new();
    for g in ["X1", "X2"].into_iter().map(String::from).chain((1..=n).map(|i| format!("xi{i}"))) {
        weights.insert(g, vec![1, 0]);
    }
    for g in ["Y1", "Y2"].into_iter().map(String::from).chain((1..=n).map(|i| format!("zeta{i}"))) {
        weights.insert(g, vec![0, 1]);
    }

    let mut spec = model("L5|6", table.clone(), pi, relations);
    spec.weights = weights;
    spec.atlas = Some(AtlasSpec {
        factors: vec![
            ProjectiveFactor::new(&["l1", "l2"], &["p", "m"]),
            ProjectiveFactor::new(&["m1", "m2"], &["p", "m"]),
        ],
        bivector: None,
    });
    spec.fibration = Some(ambitwistor_fibration(&table, n)?);
    spec.cy = Some(CyWeights::Ambitwistor { n_odd: n });
    Ok(spec)
}

fn ambitwistor_fibration(model: &VarTable, n: u32) -> Result<Fibration> {
    let mut b = VarTable::builder();
    for x in x_names() {
        b = b.even(x);
    }
    b = b.invertible("l1").invertible("l2").invertible("m1").invertible("m2");
    for t in theta_names(n) {
        b = b.odd(t);
    }
    for i in 1..=n {
        for a in 1..=2 {
            b = b.odd(format!("e{i}_{a}"));
        }
    }
    let base = b.build()?;
    let v = Vars(&base);
    let mut map = Vec::new();
    // X^a = (x^{aa'} + eta^{ia} theta_i^{a'}) l_{a'}
    for al in 1..=2 {
        let mut img = GradedPoly::zero();
        for ad in 1..=2 {
            let mut inner = v.v(&format!("x{al}{ad}"))?;
            for i in 1..=n {
                inner += &v.prod(&[&format!("e{i}_{al}"), &format!("t{i}_{ad}")])?;
            }
            img += &(&inner * &v.v(&format!("l{ad}"))?);
        }
        map.push((format!("X{al}"), img));
    }
    // Y^{a'} = (x^{aa'} + theta_i^{a'} eta^{ia}) m_a
    for ad in 1..=2 {
        let mut img = GradedPoly::zero();
        for al in 1..=2 {
            let mut inner = v.v(&format!("x{al}{ad}"))?;
            for i in 1..=n {
                inner += &v.prod(&[&format!("t{i}_{ad}"), &format!("e{i}_{al}")])?;
            }
            img += &(&inner * &v.v(&format!("m{al}"))?);
        }
        map.push((format!("Y{ad}"), img));
    }
    for i in 1..=n {
        let xi = &v.prod(&[&format!("t{i}_1"), "l1"])? + &v.prod(&[&format!("t{i}_2"), "l2"])?;
        let zeta = &v.prod(&[&format!("e{i}_1"), "m1"])? + &v.prod(&[&format!("e{i}_2"), "m2"])?;
        map.push((format!("xi{i}"), xi));
        map.push((format!("zeta{i}"), zeta));
    }

    let mv = Vars(model);
    let mut ideal = &(&mv.prod(&["X1", "m1"])? + &mv.prod(&["X2", "m2"])?)
        - &(&mv.prod(&["Y1", "l1"])? + &mv.prod(&["Y2", "l2"])?);
    for i in 1..=n {
        ideal += &(&GradedPoly::int(2) * &mv.prod(&[&format!("xi{i}"), &format!("zeta{i}")])?);
    }
    Ok(Fibration {
        base,
        base_relations: Vec::new(),
        map,
        expectations: Vec::new(),
        identities: vec![("quadric".to_string(), ideal)],
    })
}
