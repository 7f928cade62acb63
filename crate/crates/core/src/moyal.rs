//! Moyal-type star products for bivectors with central coefficients.

use std::collections::HashMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::calculus::{KernelSign, Side};
use crate::error::{Error, Result};
use crate::exec::Exec;
use crate::graded_ring::{GradedPoly, Grading, Monomial, Parity, VarId, VarSpec, VarTable};
use crate::poisson::{poisson_bracket, SuperBivector};
use crate::report::Status;
use crate::scalar::{factorial, Scalar};

pub const DEFAULT_MAX_ORDER: u32 = 8;

#[derive(Clone, Debug)]
struct Pair {
    a: VarId,
    b: VarId,
    pa: Parity,
    pb: Parity,
    entry: GradedPoly,
}

/// `f * g = f exp[(hbar/2) sum <-d_A pi^{AB} d_B->] g`, truncated only when the
/// series terminates.
#[derive(Clone, Debug)]
pub struct StarEngine {
    bivector: SuperBivector,
    max_order: u32,
    kernel: KernelSign,
    pairs: Vec<Pair>,
    row: Vec<bool>,
}

type Memo = HashMap<(Monomial, Monomial), GradedPoly>;

impl StarEngine {
    pub fn new(bivector: SuperBivector, max_order: u32) -> Result<Self> {
        if let Some(v) = bivector.first_non_central() {
            return Err(Error::NonCentralBivector(bivector.table().get(v).name.clone()));
        }
        let table = bivector.table();
        let mut row = vec![false; table.len()];
        let pairs = bivector
            .entries()
            .map(|(a, b, entry)| {
                row[a.index()] = true;
                Pair {
                    a,
                    b,
                    pa: table.get(a).parity,
                    pb: table.get(b).parity,
                    entry: entry.clone(),
                }
            })
            .collect();
        Ok(StarEngine {
            bivector,
            max_order,
            kernel: KernelSign::InPlace,
            pairs,
            row,
        })
    }

    /// Replaces the kernel sign convention; used by mutation tests.
    #[doc(hidden)]
    pub fn with_kernel(mut self, kernel: KernelSign) -> Self {
        self.kernel = kernel;
        self
    }

    pub fn kernel(&self) -> KernelSign {
        self.kernel
    }

    pub fn bivector(&self) -> &SuperBivector {
        &self.bivector
    }

    pub fn table(&self) -> &VarTable {
        self.bivector.table()
    }

    pub fn max_order(&self) -> u32 {
        self.max_order
    }

    /// Variables the bivector differentiates.
    pub fn row_vars(&self) -> Vec<VarId> {
        self.bivector.row_vars()
    }

    pub fn star(&self, f: &GradedPoly, g: &GradedPoly) -> Result<GradedPoly> {
        self.star_memo(f, g, &mut Memo::new())
    }

    fn star_memo(&self, f: &GradedPoly, g: &GradedPoly, memo: &mut Memo) -> Result<GradedPoly> {
        let mut out = GradedPoly::zero();
        let gs: Vec<_> = g.terms().map(|(m, c)| (self.split(m), c)).collect();
        for (mf, cf) in f.terms() {
            let (of, inf) = self.split(mf);
            for ((og, ing), cg) in &gs {
                let key = (inf.clone(), ing.clone());
                let core = match memo.get(&key) {
                    Some(p) => p.clone(),
                    None => {
                        let p = self.star_monomials(&key.0, &key.1)?;
                        memo.insert(key, p.clone());
                        p
                    }
                };
                if core.is_zero() {
                    continue;
                }
                let outer = of.mul(og).expect("outer parts are even").1;
                out += &core.mul_monomial(&(cf * *cg), &outer);
            }
        }
        Ok(out)
    }

    /// `(outer, inner)` with `outer` the hbar and non-differentiated even part.
    fn split(&self, m: &Monomial) -> (Monomial, Monomial) {
        let (inner_even, outer_even): (Vec<_>, Vec<_>) =
            m.even().iter().partition(|(v, _)| self.row[v.index()]);
        let outer = Monomial::from_parts(m.hbar(), outer_even, &[]).expect("even").1;
        let inner = Monomial::from_parts(0, inner_even, m.odd()).expect("canonical").1;
        (outer, inner)
    }

    fn star_monomials(&self, a: &Monomial, b: &Monomial) -> Result<GradedPoly> {
        let mut out = GradedPoly::zero();
        if let Some((s, m)) = a.mul(b) {
            out.add_term(m, Scalar::from_int(s as i64));
        }
        let mut states: HashMap<(Monomial, Monomial, bool), GradedPoly> = HashMap::new();
        states.insert((a.clone(), b.clone(), false), GradedPoly::one());
        let left_side = self.kernel.left_side();
        let mut n = 0u32;
        while !states.is_empty() {
            n += 1;
            let mut next: HashMap<(Monomial, Monomial, bool), GradedPoly> = HashMap::new();
            for ((l, r, beta), coeff) in &states {
                for p in &self.pairs {
                    let Some((el, dl)) = mono_derivative(l, p.a, p.pa, left_side) else {
                        continue;
                    };
                    let Some((er, dr)) = mono_derivative(r, p.b, p.pb, Side::Left) else {
                        continue;
                    };
                    let neg = self.kernel.sign(p.pa, p.pb, dl.parity(), *beta);
                    let k = el * er * if neg { -1 } else { 1 };
                    let c = (coeff * &p.entry).scale(&Scalar::from_int(k));
                    let key = (dl, dr, *beta ^ p.pa.is_odd());
                    *next.entry(key).or_default() += &c;
                }
            }
            next.retain(|_, c| !c.is_zero());
            if next.is_empty() {
                break;
            }
            if n > self.max_order {
                return Err(Error::TruncationExceeded(self.max_order));
            }
            let weight = Scalar::one() / (Scalar::from_int(1i64 << n) * factorial(n));
            let hbar_n = Monomial::hbar_power(n);
            for ((l, r, _), coeff) in &next {
                if let Some((s, m)) = l.mul(r) {
                    let w = if s < 0 { -weight.clone() } else { weight.clone() };
                    out += &coeff.mul_monomial(&w, &m.mul(&hbar_n).expect("hbar").1);
                }
            }
            states = next;
        }
        Ok(out)
    }

    /// `f * g - (-1)^{|f||g|} g * f`.
    pub fn supercommutator(&self, f: &GradedPoly, g: &GradedPoly) -> Result<GradedPoly> {
        let pf = f.parity_of().parity().ok_or(Error::MixedParityInput)?;
        let pg = g.parity_of().parity().ok_or(Error::MixedParityInput)?;
        let fg = self.star(f, g)?;
        let gf = self.star(g, f)?;
        Ok(if pf.is_odd() && pg.is_odd() { &fg + &gf } else { &fg - &gf })
    }
}

fn mono_derivative(m: &Monomial, v: VarId, parity: Parity, side: Side) -> Option<(i64, Monomial)> {
    match parity {
        Parity::Even => m.d_even(v).map(|(e, r)| (e as i64, r)),
        Parity::Odd => {
            let k = m.odd().len();
            m.remove_odd(v).map(|(pos, r)| {
                let moves = match side {
                    Side::Left => pos,
                    Side::Right => k - 1 - pos,
                };
                (if moves % 2 == 0 { 1 } else { -1 }, r)
            })
        }
    }
}

/// Settings for [`check_quantization_contract`].
#[derive(Clone, Debug)]
pub struct ContractOptions {
    pub max_even: usize,
    pub max_odd: usize,
    pub max_degree: u32,
    /// Randomized cases for each of bilinearity, associativity and the first-order check.
    pub random_cases: usize,
    pub seed: u64,
    pub exec: Exec,
}

impl Default for ContractOptions {
    fn default() -> Self {
        ContractOptions {
            max_even: 2,
            max_odd: 4,
            max_degree: 3,
            random_cases: 200,
            seed: 0x5eed,
            exec: Exec::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractCheck {
    pub name: &'static str,
    pub status: Status,
    pub cases: usize,
    pub failures: usize,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ContractReport {
    pub checks: Vec<ContractCheck>,
}

impl ContractReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.status != Status::Fail)
    }

    pub fn check(&self, name: &str) -> Option<&ContractCheck> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub const BILINEARITY: &str = "bilinearity";
pub const ASSOCIATIVITY: &str = "associativity";
pub const FIRST_ORDER: &str = "first-order";

/// Probe variables for the exhaustive suite: differentiated variables first,
/// pairing the second even one with the first when the bivector links them.
pub fn probe_variables(engine: &StarEngine, max_even: usize, max_odd: usize) -> Vec<VarId> {
    let table = engine.table();
    let rows = engine.row_vars();
    let even_rows: Vec<VarId> = rows.iter().copied().filter(|v| !table.get(*v).is_odd()).collect();
    let odd_rows: Vec<VarId> = rows.iter().copied().filter(|v| table.get(*v).is_odd()).collect();
    let mut even = Vec::new();
    if let Some(&first) = even_rows.first() {
        even.push(first);
        let linked = even_rows
            .iter()
            .copied()
            .find(|v| *v != first && !engine.bivector().get(first, *v).is_zero());
        let rest = linked.into_iter().chain(even_rows.iter().copied().filter(|v| *v != first));
        for v in rest {
            if even.len() >= max_even {
                break;
            }
            if !even.contains(&v) {
                even.push(v);
            }
        }
    }
    even.truncate(max_even);
    let mut out: Vec<VarId> = even;
    out.extend(odd_rows.into_iter().take(max_odd));
    out.sort();
    out
}

/// Every monomial in `vars` of total degree at most `max_degree`.
pub fn monomial_basis(table: &VarTable, vars: &[VarId], max_degree: u32) -> Vec<Monomial> {
    let mut out = vec![Monomial::one()];
    for &v in vars {
        let top = if table.get(v).is_odd() { 1 } else { max_degree as i32 };
        let mut grown = Vec::new();
        for m in &out {
            for e in 1..=top {
                if m.degree() + e as i64 > max_degree as i64 {
                    break;
                }
                let factor = if table.get(v).is_odd() {
                    Monomial::odd_var(v)
                } else {
                    Monomial::even_var(v, e)
                };
                if let Some((_, p)) = m.mul(&factor) {
                    grown.push(p);
                }
            }
        }
        out.extend(grown);
    }
    out.sort_by(|a, b| a.degree().cmp(&b.degree()).then(a.cmp(b)));
    out
}

/// Random polynomial in the given variables with small integer coefficients.
pub fn random_poly(rng: &mut impl Rng, vars: &[&VarSpec], parity: Option<Parity>, max_terms: usize, max_degree: u32) -> GradedPoly {
    let mut out = GradedPoly::zero();
    let terms = rng.random_range(1..=max_terms.max(1));
    let mut attempts = 0;
    while out.len() < terms && attempts < 50 * terms {
        attempts += 1;
        let mut m = Monomial::one();
        let degree = rng.random_range(0..=max_degree);
        for _ in 0..degree {
            if vars.is_empty() {
                break;
            }
            let v = vars[rng.random_range(0..vars.len())];
            let factor = if v.is_odd() {
                Monomial::odd_var(v.id())
            } else {
                Monomial::even_var(v.id(), 1)
            };
            if let Some((_, p)) = m.mul(&factor) {
                m = p;
            }
        }
        if let Some(p) = parity {
            if m.parity() != p {
                continue;
            }
        }
        let mut c = rng.random_range(-3i64..=3);
        if c == 0 {
            c = 1;
        }
        out.add_term(m, Scalar::from_int(c));
    }
    out
}

fn random_parity(rng: &mut impl Rng) -> Parity {
    Parity::from_bit(rng.random_bool(0.5))
}

/// Bilinearity and hbar-linearity, associativity (exhaustive and randomized) and
/// agreement of the first-order term with half the Poisson bracket.
pub fn check_quantization_contract(engine: &StarEngine, opts: &ContractOptions) -> ContractReport {
    let checks = vec![
        check_bilinearity(engine, opts),
        check_associativity(engine, opts),
        check_first_order(engine, opts),
    ];
    ContractReport { checks }
}

fn generators(engine: &StarEngine) -> Vec<&VarSpec> {
    engine.table().generators().collect()
}

fn finish(name: &'static str, cases: usize, failures: usize, first: Option<String>, errors: Option<String>) -> ContractCheck {
    let status = Status::from_bool(failures == 0 && errors.is_none());
    let detail = match (errors, first) {
        (Some(e), _) => e,
        (None, Some(f)) => format!("{failures} of {cases} cases failed; first: {f}"),
        (None, None) => format!("{cases} cases"),
    };
    ContractCheck {
        name,
        status,
        cases,
        failures,
        detail,
    }
}

fn check_bilinearity(engine: &StarEngine, opts: &ContractOptions) -> ContractCheck {
    let table = engine.table();
    let vars = generators(engine);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let cases: Vec<[GradedPoly; 4]> = (0..opts.random_cases.min(50))
        .map(|_| {
            let c = GradedPoly::int(rng.random_range(-4..=4));
            [
                random_poly(&mut rng, &vars, None, 3, 2),
                random_poly(&mut rng, &vars, None, 3, 2),
                random_poly(&mut rng, &vars, None, 3, 2),
                c,
            ]
        })
        .collect();
    let hbar = GradedPoly::hbar();
    let results = opts.exec.map(&cases, |[f, g, h, c]| -> Result<Option<String>> {
        let s = |a: &GradedPoly, b: &GradedPoly| engine.star(a, b);
        let combo = &(c * g) + f;
        let left = s(&combo, h)?;
        let left_expected = &s(f, h)? + &(c * &s(g, h)?);
        let right = s(h, &combo)?;
        let right_expected = &s(h, f)? + &(c * &s(h, g)?);
        let fh = &hbar * &s(f, g)?;
        let ok = left == left_expected
            && right == right_expected
            && s(&(&hbar * f), g)? == fh
            && s(f, &(&hbar * g))? == fh;
        Ok(if ok { None } else { Some(format!("f = {}, g = {}", f.render(table), g.render(table))) })
    });
    tally(BILINEARITY, results)
}

fn tally(name: &'static str, results: Vec<Result<Option<String>>>) -> ContractCheck {
    let cases = results.len();
    let mut failures = 0;
    let mut first = None;
    let mut error = None;
    for r in results {
        match r {
            Ok(None) => {}
            Ok(Some(msg)) => {
                failures += 1;
                first.get_or_insert(msg);
            }
            Err(e) => {
                failures += 1;
                error.get_or_insert(e.to_string());
            }
        }
    }
    finish(name, cases, failures, first, error)
}

fn check_associativity(engine: &StarEngine, opts: &ContractOptions) -> ContractCheck {
    let table = engine.table();
    let probes = probe_variables(engine, opts.max_even, opts.max_odd);
    let basis: Vec<GradedPoly> = monomial_basis(table, &probes, opts.max_degree)
        .into_iter()
        .map(|m| GradedPoly::term(Scalar::one(), m))
        .collect();
    // every pairwise product once, then each triple reuses them
    let pair_products = opts.exec.map(&basis, |f| -> Vec<Result<GradedPoly>> {
        let mut memo = Memo::new();
        basis.iter().map(|g| engine.star_memo(f, g, &mut memo)).collect()
    });
    let indices: Vec<usize> = (0..basis.len()).collect();
    let exhaustive = opts.exec.map(&indices, |&i| -> Vec<Result<Option<String>>> {
        let mut memo = Memo::new();
        let f = &basis[i];
        let mut out = Vec::with_capacity(basis.len() * basis.len());
        for (j, g) in basis.iter().enumerate() {
            for (k, h) in basis.iter().enumerate() {
                let r = (|| {
                    let fg = pair_products[i][j].clone()?;
                    let gh = pair_products[j][k].clone()?;
                    let lhs = engine.star_memo(f, &gh, &mut memo)?;
                    let rhs = engine.star_memo(&fg, h, &mut memo)?;
                    Ok(if lhs == rhs {
                        None
                    } else {
                        Some(format!(
                            "({}, {}, {})",
                            f.render(table),
                            g.render(table),
                            h.render(table)
                        ))
                    })
                })();
                out.push(r);
            }
        }
        out
    });
    let mut results: Vec<Result<Option<String>>> = exhaustive.into_iter().flatten().collect();
    let vars = generators(engine);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xa550c);
    let triples: Vec<[GradedPoly; 3]> = (0..opts.random_cases.min(50))
        .map(|_| {
            [
                random_poly(&mut rng, &vars, None, 3, 2),
                random_poly(&mut rng, &vars, None, 3, 2),
                random_poly(&mut rng, &vars, None, 3, 2),
            ]
        })
        .collect();
    results.extend(opts.exec.map(&triples, |[f, g, h]| -> Result<Option<String>> {
        let lhs = engine.star(f, &engine.star(g, h)?)?;
        let rhs = engine.star(&engine.star(f, g)?, h)?;
        Ok(if lhs == rhs {
            None
        } else {
            Some(format!("({}, {}, {})", f.render(table), g.render(table), h.render(table)))
        })
    }));
    let mut check = tally(ASSOCIATIVITY, results);
    if check.status == Status::Pass {
        check.detail = format!("{} cases over {} basis monomials", check.cases, basis.len());
    }
    check
}

fn check_first_order(engine: &StarEngine, opts: &ContractOptions) -> ContractCheck {
    let table = engine.table();
    let vars = generators(engine);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed ^ 0xf1257);
    let pairs: Vec<(GradedPoly, GradedPoly)> = (0..opts.random_cases)
        .map(|_| {
            let pf = random_parity(&mut rng);
            let pg = random_parity(&mut rng);
            (
                random_poly(&mut rng, &vars, Some(pf), 3, 3),
                random_poly(&mut rng, &vars, Some(pg), 3, 3),
            )
        })
        .collect();
    let half = Scalar::new(1, 2);
    let results = opts.exec.map(&pairs, |(f, g)| -> Result<Option<String>> {
        let first = engine.star(f, g)?.hbar_coefficient(1);
        let pb = poisson_bracket(engine.bivector(), f, g).scale(&half);
        Ok(if first == pb {
            None
        } else {
            Some(format!("f = {}, g = {}", f.render(table), g.render(table)))
        })
    });
    tally(FIRST_ORDER, results)
}

/// Convenience: `Grading` of a polynomial as a parity bit, mixed counted as even.
pub fn parity_bit(p: &GradedPoly) -> bool {
    p.parity_of() == Grading::Odd
}
