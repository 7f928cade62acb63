#![allow(dead_code)]

pub mod oracle;

use rand::Rng;
use superstar::{GradedPoly, Parity, Scalar, VarSpec, VarTable};

pub fn var(t: &VarTable, name: &str) -> GradedPoly {
    GradedPoly::var(t.spec(name).unwrap_or_else(|_| panic!("no variable {name}")))
}

pub fn prod(t: &VarTable, names: &[&str]) -> GradedPoly {
    names.iter().fold(GradedPoly::one(), |acc, n| &acc * &var(t, n))
}

pub fn int(n: i64) -> GradedPoly {
    GradedPoly::int(n)
}

pub fn hbar_times(p: &GradedPoly) -> GradedPoly {
    &GradedPoly::hbar() * p
}

/// Homogeneous random polynomial in `vars`, each term of degree at most `max_degree`.
pub fn random_homogeneous(rng: &mut impl Rng, vars: &[&VarSpec], parity: Parity, max_terms: usize, max_degree: u32) -> GradedPoly {
    let mut out = GradedPoly::zero();
    let terms = rng.random_range(1..=max_terms);
    for _ in 0..terms * 20 {
        if out.len() >= terms {
            break;
        }
        let mut p = GradedPoly::constant(Scalar::new(rng.random_range(-4i64..=4).max(1), rng.random_range(1..=3)));
        if rng.random_bool(0.5) {
            p = -p;
        }
        for _ in 0..rng.random_range(0..=max_degree) {
            p = &p * &GradedPoly::var(vars[rng.random_range(0..vars.len())]);
        }
        if p.is_zero() || p.parity_of().parity() != Some(parity) {
            continue;
        }
        out += &p;
    }
    out
}

/// A constant-coefficient even bivector over `n_even` even and `n_odd` odd variables.
pub fn random_even_bivector(rng: &mut impl Rng, n_even: usize, n_odd: usize) -> superstar::SuperBivector {
    let mut b = VarTable::builder();
    for i in 0..n_even {
        b = b.even(format!("x{i}"));
    }
    for i in 0..n_odd {
        b = b.odd(format!("t{i}"));
    }
    let table = b.build().unwrap();
    let mut pi = superstar::SuperBivector::new(&table);
    let names: Vec<(String, bool)> = table.iter().map(|v| (v.name.clone(), v.is_odd())).collect();
    for (i, (a, oa)) in names.iter().enumerate() {
        for (b, ob) in &names[i..] {
            if oa != ob || (a == b && !oa) || rng.random_bool(0.3) {
                continue;
            }
            let c = Scalar::new(rng.random_range(-3i64..=3), rng.random_range(1..=2));
            pi.set(a, b, GradedPoly::constant(c)).unwrap();
        }
    }
    pi
}

/// Random polynomials over the non-constant variables of `table`; even
/// invertible variables may get negative exponents.
pub fn poly_in(table: &VarTable, max_terms: usize, max_degree: usize) -> impl proptest::strategy::Strategy<Value = GradedPoly> {
    use proptest::prelude::*;
    let specs: Vec<VarSpec> = table.generators().cloned().collect();
    let n = specs.len();
    let term = (-6i64..=6, 1i64..=3, 0u32..=1, prop::collection::vec((0..n, -1i32..=2), 0..=max_degree));
    prop::collection::vec(term, 0..=max_terms).prop_map(move |terms| {
        let mut out = GradedPoly::zero();
        for (num, den, h, factors) in terms {
            let mut p = &GradedPoly::constant(Scalar::new(num, den)) * &GradedPoly::hbar().pow(h);
            for (i, e) in factors {
                let s = &specs[i];
                let e = if s.invertible { e } else { e.max(1) };
                p = &p * &GradedPoly::var_pow(s, e).unwrap();
            }
            out += &p;
        }
        out
    })
}

/// Like [`poly_in`] but homogeneous of the given parity.
pub fn homogeneous_in(table: &VarTable, parity: Parity, max_terms: usize, max_degree: usize) -> impl proptest::strategy::Strategy<Value = GradedPoly> {
    use proptest::prelude::*;
    poly_in(table, max_terms, max_degree).prop_map(move |p| {
        let (even, odd) = p.homogeneous_parts();
        if parity.is_odd() {
            odd
        } else {
            even
        }
    })
}

pub fn sign_of(a: &GradedPoly, b: &GradedPoly) -> i64 {
    let odd = |p: &GradedPoly| p.parity_of() == superstar::Grading::Odd;
    if odd(a) && odd(b) {
        -1
    } else {
        1
    }
}

/// `x, y, l (invertible) | t1, t2, t3`.
pub fn small_table() -> VarTable {
    VarTable::builder()
        .even("x")
        .even("y")
        .invertible("l")
        .odd("t1")
        .odd("t2")
        .odd("t3")
        .build()
        .unwrap()
}

/// Compares the engine with the reference expansion on random homogeneous
/// pairs. Returns the mismatching pairs and the highest hbar order seen.
pub fn oracle_agreement(pi: &superstar::SuperBivector, pairs: usize, max_degree: u32, seed: u64) -> (Vec<String>, u32) {
    use rand::SeedableRng;
    let table = pi.table();
    let oracle = oracle::Oracle::new(pi);
    let engine = superstar::StarEngine::new(pi.clone(), 16).unwrap();
    let vars: Vec<_> = table.generators().collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut top = 0;
    let mut bad = Vec::new();
    for _ in 0..pairs {
        let pf = Parity::from_bit(rng.random_bool(0.5));
        let pg = Parity::from_bit(rng.random_bool(0.5));
        let f = random_homogeneous(&mut rng, &vars, pf, 4, max_degree);
        let g = random_homogeneous(&mut rng, &vars, pg, 4, max_degree);
        let (want, order) = oracle.star(table, &f, &g);
        let got = engine.star(&f, &g).unwrap();
        if oracle.single(table, &got) != want {
            bad.push(format!("f = {}, g = {}", f.render(table), g.render(table)));
        }
        top = top.max(order);
    }
    (bad, top)
}

/// `c_ij_11 u1^2 + 2 c_ij_12 u1 u2 + c_ij_22 u2^2`
pub fn c_form(t: &VarTable, i: u32, j: u32, u: [&str; 2]) -> GradedPoly {
    let c = |ab: &str| var(t, &format!("c{i}{j}_{ab}"));
    let mut acc = &c("11") * &var(t, u[0]).pow(2);
    acc += &(&int(2) * &(&c("12") * &prod(t, &u)));
    acc += &(&c("22") * &var(t, u[1]).pow(2));
    acc
}

/// `d_x11_x21 l1^2 + (d_x11_x22 + d_x12_x21) l1 l2 + d_x12_x22 l2^2`
pub fn d_form(t: &VarTable) -> GradedPoly {
    let d = |x: &str| var(t, &format!("d_{x}"));
    let mut acc = &d("x11_x21") * &var(t, "l1").pow(2);
    acc += &(&(&d("x11_x22") + &d("x12_x21")) * &prod(t, &["l1", "l2"]));
    acc += &(&d("x12_x22") * &var(t, "l2").pow(2));
    acc
}

/// Pulled-back brackets that differ from the hand formulas, plus the number
/// of pairs compared.
pub fn pullback_mismatches(m: &superstar::models::ModelSpec, u: [&str; 2], with_d: bool) -> (Vec<String>, usize) {
    let f = m.fibration.as_ref().unwrap();
    let b = &f.base;
    let table = superstar::models::fibration_pullback(m, &f.base_relations).unwrap();
    let mut bad = Vec::new();
    for ((x, y), got) in &table {
        let expected = match (x.strip_prefix("xi"), y.strip_prefix("xi")) {
            (Some(i), Some(j)) => c_form(b, i.parse().unwrap(), j.parse().unwrap(), u),
            _ if with_d && x == "z1" && y == "z2" => d_form(b),
            _ => GradedPoly::zero(),
        };
        if got != &expected {
            bad.push(format!("{x} {y}: {} != {}", got.render(b), expected.render(b)));
        }
    }
    (bad, table.len())
}
