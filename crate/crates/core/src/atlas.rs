//! Charts of projective bundles, transition maps between them, and the
//! gluing checks for star-bracket tables.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graded_ring::{GradedPoly, Parity, Substitution, VarId, VarTable};
use crate::moyal::StarEngine;
use crate::poisson::{poisson_bracket, SuperBivector};

/// Homogeneous coordinates of one projective factor and its standard charts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProjectiveFactor {
    pub coords: Vec<String>,
    /// `(label, index of the coordinate set to 1)`.
    pub charts: Vec<(String, usize)>,
}

impl ProjectiveFactor {
    /// One chart per coordinate, labelled by the caller.
    pub fn new(coords: &[&str], labels: &[&str]) -> Self {
        assert_eq!(coords.len(), labels.len(), "one label per chart");
        ProjectiveFactor {
            coords: coords.iter().map(|s| s.to_string()).collect(),
            charts: labels.iter().enumerate().map(|(i, l)| (l.to_string(), i)).collect(),
        }
    }
}

/// Supercommutator coefficients of hbar between chart coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BracketTable {
    table: VarTable,
    entries: BTreeMap<(VarId, VarId), GradedPoly>,
}

impl BracketTable {
    pub fn new(table: &VarTable) -> Self {
        BracketTable {
            table: table.clone(),
            entries: BTreeMap::new(),
        }
    }

    pub fn table(&self) -> &VarTable {
        &self.table
    }

    /// Sets `(a, b)` and its mirror under supercommutator symmetry.
    pub fn set(&mut self, a: VarId, b: VarId, value: GradedPoly) {
        let both_odd = self.table.get(a).is_odd() && self.table.get(b).is_odd();
        let mirror = if both_odd { value.clone() } else { -&value };
        for (key, v) in [((a, b), value), ((b, a), mirror)] {
            if v.is_zero() {
                self.entries.remove(&key);
            } else {
                self.entries.insert(key, v);
            }
        }
    }

    pub fn get(&self, a: VarId, b: VarId) -> GradedPoly {
        self.entries.get(&(a, b)).cloned().unwrap_or_default()
    }

    pub fn entry(&self, a: &str, b: &str) -> Result<GradedPoly> {
        Ok(self.get(self.table.id(a)?, self.table.id(b)?))
    }

    pub fn entries(&self) -> impl Iterator<Item = (VarId, VarId, &GradedPoly)> {
        self.entries.iter().map(|((a, b), v)| (*a, *b, v))
    }

    /// The table read as a bivector, so that brackets of composite functions follow.
    pub fn to_bivector(&self) -> Result<SuperBivector> {
        let mut pi = SuperBivector::new(&self.table);
        for (a, b, v) in self.entries() {
            if a <= b {
                pi.set_id(a, b, v.clone())?;
            }
        }
        Ok(pi)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub name: String,
    pub table: VarTable,
    /// Homogeneous generator or coordinate name to chart variable name.
    pub names: BTreeMap<String, String>,
    /// Divisor coordinate per factor.
    pub divisors: Vec<String>,
    /// Chart variables as homogeneous Laurent expressions.
    pub embedding: Substitution,
    /// Homogeneous expressions of weight zero back to chart variables.
    pub dehomogenize: Substitution,
    pub bracket_table: BracketTable,
}

impl Chart {
    pub fn var(&self, homogeneous: &str) -> Option<&str> {
        self.names.get(homogeneous).map(|s| s.as_str())
    }

    /// Rewrites a weight-zero homogeneous expression in chart variables.
    pub fn from_homogeneous(&self, p: &GradedPoly) -> Result<GradedPoly> {
        let out = self.dehomogenize.apply(p)?;
        if self.embedding.apply(&out)? != *p {
            return Err(Error::InvalidAtlas(format!(
                "expression is not of weight zero on chart `{}`",
                self.name
            )));
        }
        Ok(out)
    }
}

/// Change of coordinates between two charts.
#[derive(Clone, Debug, PartialEq)]
pub struct TransitionMap {
    pub from: String,
    pub to: String,
    /// `from` variables as expressions in `to` variables.
    pub rules: Substitution,
    /// `to` variables as expressions in `from` variables.
    pub inverse: Substitution,
    /// Per factor, the ratio `d_to / d_from` in `from` variables.
    pub scales: Vec<GradedPoly>,
}

impl TransitionMap {
    /// `self` followed by `next`.
    pub fn then(&self, next: &TransitionMap) -> Result<TransitionMap> {
        if self.to != next.from {
            return Err(Error::NonComposableCycle(format!(
                "{} -> {} then {} -> {}",
                self.from, self.to, next.from, next.to
            )));
        }
        let scales = self
            .scales
            .iter()
            .zip(&next.scales)
            .map(|(a, b)| Ok(a * &self.inverse.apply(b)?))
            .collect::<Result<Vec<_>>>()?;
        Ok(TransitionMap {
            from: self.from.clone(),
            to: next.to.clone(),
            rules: self.rules.then(&next.rules)?,
            inverse: next.inverse.then(&self.inverse)?,
            scales,
        })
    }

    pub fn label(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

/// Expected scaling of one bracket entry under a transition.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightLaw {
    /// Homogeneous generator names.
    pub pair: (String, String),
    /// In the variables of the source chart.
    pub factor: GradedPoly,
}

#[derive(Clone, Debug)]
pub struct Atlas {
    homogeneous: VarTable,
    factors: Vec<ProjectiveFactor>,
    weights: BTreeMap<String, Vec<i32>>,
    charts: Vec<Chart>,
}

impl Atlas {
    /// Builds every product chart and its bracket table from the homogeneous star product.
    pub fn new(
        engine: &StarEngine,
        factors: &[ProjectiveFactor],
        weights: &BTreeMap<String, Vec<i32>>,
    ) -> Result<Atlas> {
        let hom = engine.table().clone();
        let factor_coords: Vec<&str> = factors.iter().flat_map(|f| f.coords.iter().map(|s| s.as_str())).collect();
        for c in &factor_coords {
            let spec = hom.spec(c)?;
            if spec.parity != Parity::Even || !spec.invertible {
                return Err(Error::InvalidAtlas(format!("factor coordinate `{c}` must be even and invertible")));
            }
        }
        for g in hom.generators() {
            if factor_coords.contains(&g.name.as_str()) {
                continue;
            }
            match weights.get(&g.name) {
                Some(w) if w.len() == factors.len() => {}
                _ => {
                    return Err(Error::InvalidAtlas(format!(
                        "generator `{}` needs one weight per factor",
                        g.name
                    )))
                }
            }
        }
        let mut choices: Vec<Vec<(String, usize)>> = vec![Vec::new()];
        for f in factors {
            let mut grown = Vec::new();
            for prefix in &choices {
                for c in &f.charts {
                    let mut next = prefix.clone();
                    next.push(c.clone());
                    grown.push(next);
                }
            }
            choices = grown;
        }
        let mut charts = Vec::new();
        for choice in choices {
            charts.push(build_chart(engine, factors, weights, &choice)?);
        }
        Ok(Atlas {
            homogeneous: hom,
            factors: factors.to_vec(),
            weights: weights.clone(),
            charts,
        })
    }

    pub fn charts(&self) -> &[Chart] {
        &self.charts
    }

    pub fn chart(&self, name: &str) -> Option<&Chart> {
        self.charts.iter().find(|c| c.name == name)
    }

    pub fn factors(&self) -> &[ProjectiveFactor] {
        &self.factors
    }

    pub fn homogeneous_table(&self) -> &VarTable {
        &self.homogeneous
    }

    /// Generators that are not factor coordinates, in declaration order.
    pub fn weighted_generators(&self) -> Vec<&str> {
        self.homogeneous
            .generators()
            .filter(|g| self.weights.contains_key(&g.name))
            .map(|g| g.name.as_str())
            .collect()
    }

    pub fn transition(&self, from: &str, to: &str) -> Result<TransitionMap> {
        let a = self.chart(from).ok_or_else(|| Error::InvalidAtlas(format!("no chart `{from}`")))?;
        let b = self.chart(to).ok_or_else(|| Error::InvalidAtlas(format!("no chart `{to}`")))?;
        let rules = a.embedding.then(&b.dehomogenize)?;
        let inverse = b.embedding.then(&a.dehomogenize)?;
        let mut scales = Vec::new();
        for (fa, fb) in a.divisors.iter().zip(&b.divisors) {
            let ratio = &GradedPoly::var(self.homogeneous.spec(fb)?)
                * &GradedPoly::var_pow(self.homogeneous.spec(fa)?, -1)?;
            scales.push(a.from_homogeneous(&ratio)?);
        }
        Ok(TransitionMap {
            from: from.to_string(),
            to: to.to_string(),
            rules,
            inverse,
            scales,
        })
    }

    /// Every ordered pair of distinct charts.
    pub fn transitions(&self) -> Result<Vec<TransitionMap>> {
        let mut out = Vec::new();
        for a in &self.charts {
            for b in &self.charts {
                if a.name != b.name {
                    out.push(self.transition(&a.name, &b.name)?);
                }
            }
        }
        Ok(out)
    }

    /// Chart-name cycles of length two and three, each up to rotation and reversal.
    pub fn cycles(&self) -> Vec<Vec<String>> {
        let names: Vec<&String> = self.charts.iter().map(|c| &c.name).collect();
        let mut out = Vec::new();
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                out.push(vec![names[i].clone(), names[j].clone()]);
            }
        }
        for i in 0..names.len() {
            for j in i + 1..names.len() {
                for k in j + 1..names.len() {
                    out.push(vec![names[i].clone(), names[j].clone(), names[k].clone()]);
                }
            }
        }
        out
    }

    /// The transition maps around a cycle of chart names.
    pub fn cycle_maps(&self, cycle: &[String]) -> Result<Vec<TransitionMap>> {
        (0..cycle.len())
            .map(|i| self.transition(&cycle[i], &cycle[(i + 1) % cycle.len()]))
            .collect()
    }

    /// Laws `{u, v}_to = factor * {u, v}_from` for all generator pairs, with
    /// `factor = prod_f scale_f^{-(w_u + w_v)}`.
    pub fn weight_laws(&self, t: &TransitionMap) -> Result<Vec<WeightLaw>> {
        let from = self.chart(&t.from).ok_or_else(|| Error::InvalidAtlas(t.from.clone()))?;
        let gens = self.weighted_generators();
        let mut out = Vec::new();
        for (i, a) in gens.iter().enumerate() {
            for b in &gens[i..] {
                let exps: Vec<i32> = self.weights[*a]
                    .iter()
                    .zip(&self.weights[*b])
                    .map(|(x, y)| -(x + y))
                    .collect();
                out.push(WeightLaw {
                    pair: (a.to_string(), b.to_string()),
                    factor: scale_power(from, &t.scales, &exps)?,
                });
            }
        }
        Ok(out)
    }

    /// Expected image of a generator under a transition: `v_from * prod scale^{-w}`.
    pub fn generator_scale(&self, t: &TransitionMap, generator: &str) -> Result<GradedPoly> {
        let from = self.chart(&t.from).ok_or_else(|| Error::InvalidAtlas(t.from.clone()))?;
        let exps: Vec<i32> = self.weights[generator].iter().map(|w| -w).collect();
        let v = from
            .var(generator)
            .ok_or_else(|| Error::UnresolvedPair(generator.into(), generator.into(), from.name.clone()))?;
        Ok(&GradedPoly::var(from.table.spec(v)?) * &scale_power(from, &t.scales, &exps)?)
    }

    pub fn weights(&self) -> &BTreeMap<String, Vec<i32>> {
        &self.weights
    }
}

fn scale_power(chart: &Chart, scales: &[GradedPoly], exps: &[i32]) -> Result<GradedPoly> {
    let mut acc = GradedPoly::one();
    for (s, e) in scales.iter().zip(exps) {
        let p = if *e >= 0 {
            s.pow(*e as u32)
        } else {
            crate::graded_ring::try_inverse(s, &chart.table)
                .ok_or_else(|| Error::InvalidAtlas("transition scale is not a unit".into()))?
                .pow((-e) as u32)
        };
        acc = &acc * &p;
    }
    Ok(acc)
}

fn build_chart(
    engine: &StarEngine,
    factors: &[ProjectiveFactor],
    weights: &BTreeMap<String, Vec<i32>>,
    choice: &[(String, usize)],
) -> Result<Chart> {
    let hom = engine.table();
    let name: String = choice.iter().map(|(l, _)| l.as_str()).collect();
    let divisors: Vec<String> = factors
        .iter()
        .zip(choice)
        .map(|(f, (_, i))| f.coords[*i].clone())
        .collect();
    let factor_of = |v: &str| factors.iter().position(|f| f.coords.iter().any(|c| c == v));
    let mut builder = VarTable::builder();
    let mut names = BTreeMap::new();
    for spec in hom.iter() {
        if spec.constant {
            builder = builder.constant(spec.name.clone());
            names.insert(spec.name.clone(), spec.name.clone());
            continue;
        }
        if divisors.contains(&spec.name) {
            continue;
        }
        let local = format!("{}_{}", spec.name, name);
        builder = builder.var(local.clone(), spec.parity, spec.invertible && factor_of(&spec.name).is_some(), false);
        names.insert(spec.name.clone(), local);
    }
    let table = builder.build()?;
    let mut embedding = Substitution::empty(&table, hom);
    let mut dehom = Substitution::empty(hom, &table);
    for spec in hom.iter() {
        let hv = GradedPoly::var(spec);
        if spec.constant {
            embedding.set(&spec.name, hv.clone())?;
            dehom.set(&spec.name, GradedPoly::var(table.spec(&spec.name)?))?;
            continue;
        }
        if divisors.contains(&spec.name) {
            dehom.set(&spec.name, GradedPoly::one())?;
            continue;
        }
        let local = &names[&spec.name];
        dehom.set(&spec.name, GradedPoly::var(table.spec(local)?))?;
        let image = match factor_of(&spec.name) {
            Some(f) => &hv * &GradedPoly::var_pow(hom.spec(&divisors[f])?, -1)?,
            None => {
                let w = weights
                    .get(&spec.name)
                    .ok_or_else(|| Error::InvalidAtlas(format!("no weight for `{}`", spec.name)))?;
                let mut img = hv.clone();
                for (d, e) in divisors.iter().zip(w) {
                    img = &img * &GradedPoly::var_pow(hom.spec(d)?, -e)?;
                }
                img
            }
        };
        embedding.set(local, image)?;
    }
    let mut chart = Chart {
        name,
        table: table.clone(),
        names,
        divisors,
        embedding,
        dehomogenize: dehom,
        bracket_table: BracketTable::new(&table),
    };
    let gens: Vec<VarId> = table.generators().map(|s| s.id()).collect();
    for (i, &a) in gens.iter().enumerate() {
        for &b in &gens[i..] {
            let fa = chart.embedding.apply(&GradedPoly::var(table.get(a)))?;
            let fb = chart.embedding.apply(&GradedPoly::var(table.get(b)))?;
            let bracket = engine.supercommutator(&fa, &fb)?;
            let coeff = bracket.hbar_coefficient(1);
            if bracket != coeff.shift_hbar(1) {
                return Err(Error::InvalidAtlas(format!(
                    "bracket of `{}` and `{}` is not of first order in hbar",
                    table.get(a).name,
                    table.get(b).name
                )));
            }
            let local = chart.from_homogeneous(&coeff)?;
            chart.bracket_table.set(a, b, local);
        }
    }
    Ok(chart)
}

/// Pushes a bracket table along a transition: brackets of the target
/// coordinates are computed with `table` and rewritten in target variables.
pub fn transport_table(t: &TransitionMap, table: &BracketTable) -> Result<BracketTable> {
    if t.rules.from_table() != table.table() {
        return Err(Error::VariableMismatch(format!("table is not over chart `{}`", t.from)));
    }
    let pi = table.to_bivector()?;
    let to = t.rules.to_table();
    let mut out = BracketTable::new(to);
    let gens: Vec<VarId> = to.generators().map(|s| s.id()).collect();
    let images: Vec<GradedPoly> = gens
        .iter()
        .map(|v| t.inverse.apply(&GradedPoly::var(to.get(*v))))
        .collect::<Result<_>>()?;
    for i in 0..gens.len() {
        for j in i..gens.len() {
            let b = poisson_bracket(&pi, &images[i], &images[j]);
            out.set(gens[i], gens[j], t.rules.apply(&b)?);
        }
    }
    Ok(out)
}

/// `table_minus(pair) == factor * table_plus(pair)`, rewritten in `minus` variables.
pub fn check_weight_law(plus: &Chart, minus: &Chart, t: &TransitionMap, law: &WeightLaw) -> Result<bool> {
    let resolve = |chart: &Chart| -> Result<(VarId, VarId)> {
        let unresolved = || Error::UnresolvedPair(law.pair.0.clone(), law.pair.1.clone(), chart.name.clone());
        let a = chart.var(&law.pair.0).ok_or_else(unresolved)?;
        let b = chart.var(&law.pair.1).ok_or_else(unresolved)?;
        Ok((chart.table.id(a)?, chart.table.id(b)?))
    };
    let (pa, pb) = resolve(plus)?;
    let (ma, mb) = resolve(minus)?;
    let lhs = minus.bracket_table.get(ma, mb);
    let rhs = t.rules.apply(&(&law.factor * &plus.bracket_table.get(pa, pb)))?;
    Ok(lhs == rhs)
}

/// The composite of a closed chain of transitions is the identity.
pub fn check_cocycle(maps: &[TransitionMap]) -> Result<bool> {
    let Some(first) = maps.first() else {
        return Ok(true);
    };
    let last = maps.last().expect("nonempty");
    if last.to != first.from {
        return Err(Error::NonComposableCycle(format!("cycle ends at `{}`, not `{}`", last.to, first.from)));
    }
    let mut acc = first.rules.clone();
    for pair in maps.windows(2) {
        if pair[0].to != pair[1].from {
            return Err(Error::NonComposableCycle(format!("{} then {}", pair[0].label(), pair[1].label())));
        }
    }
    for m in &maps[1..] {
        acc = acc.then(&m.rules)?;
    }
    Ok(acc.is_identity())
}
