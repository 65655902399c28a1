use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Binary,
    Continuous,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Le,
    Ge,
    Eq,
}

impl Relation {
    pub fn holds(self, lhs: f64, rhs: f64, tol: f64) -> bool {
        match self {
            Relation::Le => lhs <= rhs + tol,
            Relation::Ge => lhs >= rhs - tol,
            Relation::Eq => (lhs - rhs).abs() <= tol,
        }
    }

    /// Amount by which `lhs (rel) rhs` fails; zero when satisfied.
    pub fn violation(self, lhs: f64, rhs: f64) -> f64 {
        match self {
            Relation::Le => (lhs - rhs).max(0.0),
            Relation::Ge => (rhs - lhs).max(0.0),
            Relation::Eq => (lhs - rhs).abs(),
        }
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Le => "<=",
            Relation::Ge => ">=",
            Relation::Eq => "=",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Variable {
    pub name: String,
    pub kind: VarKind,
    pub lb: f64,
    pub ub: f64,
    /// Branching class; fractional binaries of a higher class go first.
    pub priority: i32,
}

/// A row over variable indices.
#[derive(Debug, Clone, PartialEq)]
pub struct Constraint {
    pub name: String,
    pub terms: Vec<(usize, f64)>,
    pub relation: Relation,
    pub rhs: f64,
}

impl Constraint {
    pub fn lhs(&self, values: &[f64]) -> f64 {
        self.terms.iter().map(|&(v, a)| a * values[v]).sum()
    }

    pub fn is_satisfied(&self, values: &[f64], tol: f64) -> bool {
        self.relation.holds(self.lhs(values), self.rhs, tol)
    }
}

/// Where a cut came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CutTag {
    NoGood,
    StrengthenedNoGood,
    Submodular,
    NewValid,
    OraclePhase,
}

impl fmt::Display for CutTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CutTag::NoGood => "no_good",
            CutTag::StrengthenedNoGood => "strengthened_no_good",
            CutTag::Submodular => "submodular",
            CutTag::NewValid => "new_valid",
            CutTag::OraclePhase => "oracle_phase",
        })
    }
}

/// A linear inequality over named variables. Zero coefficients are dropped,
/// so two cuts with the same nonzero terms compare equal.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearCut {
    terms: BTreeMap<String, f64>,
    relation: Relation,
    rhs: f64,
    tag: CutTag,
}

impl LinearCut {
    /// Builds `sum terms (rel) rhs - constant`, i.e. `constant` is a fixed
    /// amount sitting on the left-hand side.
    pub fn new<S: Into<String>>(
        tag: CutTag,
        terms: impl IntoIterator<Item = (S, f64)>,
        constant: f64,
        relation: Relation,
        rhs: f64,
    ) -> Result<Self> {
        let mut map = BTreeMap::new();
        for (name, a) in terms {
            *map.entry(name.into()).or_insert(0.0) += a;
        }
        map.retain(|_, a| *a != 0.0);
        if map.is_empty() {
            return Err(Error::InvalidModel("cut has no nonzero coefficient".into()));
        }
        Ok(LinearCut {
            terms: map,
            relation,
            rhs: rhs - constant,
            tag,
        })
    }

    pub fn terms(&self) -> &BTreeMap<String, f64> {
        &self.terms
    }

    pub fn coefficient(&self, name: &str) -> f64 {
        self.terms.get(name).copied().unwrap_or(0.0)
    }

    pub fn relation(&self) -> Relation {
        self.relation
    }

    pub fn rhs(&self) -> f64 {
        self.rhs
    }

    pub fn tag(&self) -> CutTag {
        self.tag
    }

    pub fn lhs(&self, value: impl Fn(&str) -> f64) -> f64 {
        self.terms.iter().map(|(name, a)| a * value(name)).sum()
    }

    pub fn violation(&self, value: impl Fn(&str) -> f64) -> f64 {
        self.relation.violation(self.lhs(value), self.rhs)
    }

    pub fn is_satisfied(&self, value: impl Fn(&str) -> f64, tol: f64) -> bool {
        self.relation.holds(self.lhs(value), self.rhs, tol)
    }
}

impl fmt::Display for LinearCut {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_terms(f, self.terms.iter().map(|(n, a)| (n.as_str(), *a)))?;
        write!(f, " {} {}  [{}]", self.relation, self.rhs, self.tag)
    }
}

fn write_terms<'a>(f: &mut fmt::Formatter<'_>, terms: impl Iterator<Item = (&'a str, f64)>) -> fmt::Result {
    let mut first = true;
    for (name, a) in terms {
        if first {
            write!(f, "{a} {name}")?;
            first = false;
        } else if a < 0.0 {
            write!(f, " - {} {name}", -a)?;
        } else {
            write!(f, " + {a} {name}")?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

/// A minimization model over binary and bounded continuous variables, plus a
/// pool of cuts added after construction.
#[derive(Debug, Clone, Default)]
pub struct LinearModel {
    vars: Vec<Variable>,
    index: HashMap<String, usize>,
    objective: Vec<f64>,
    constraints: Vec<Constraint>,
    cuts: Vec<(CutTag, Constraint)>,
    cut_keys: HashSet<Vec<u64>>,
}

impl LinearModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_var(&mut self, name: impl Into<String>, kind: VarKind, lb: f64, ub: f64) -> Result<usize> {
        let name = name.into();
        if self.index.contains_key(&name) {
            return Err(Error::InvalidModel(format!("duplicate variable name `{name}`")));
        }
        if !(lb.is_finite() && ub.is_finite()) || lb > ub {
            return Err(Error::InvalidModel(format!("variable `{name}` needs finite bounds lb <= ub, got [{lb}, {ub}]")));
        }
        if kind == VarKind::Binary && (lb < 0.0 || ub > 1.0) {
            return Err(Error::InvalidModel(format!("binary `{name}` must have bounds within [0,1]")));
        }
        let id = self.vars.len();
        self.index.insert(name.clone(), id);
        self.vars.push(Variable {
            name,
            kind,
            lb,
            ub,
            priority: 0,
        });
        self.objective.push(0.0);
        Ok(id)
    }

    pub fn add_binary(&mut self, name: impl Into<String>) -> Result<usize> {
        self.add_var(name, VarKind::Binary, 0.0, 1.0)
    }

    pub fn add_continuous(&mut self, name: impl Into<String>, lb: f64, ub: f64) -> Result<usize> {
        self.add_var(name, VarKind::Continuous, lb, ub)
    }

    pub fn set_objective(&mut self, var: usize, coef: f64) {
        self.objective[var] = coef;
    }

    pub fn set_priority(&mut self, var: usize, priority: i32) {
        self.vars[var].priority = priority;
    }

    pub fn set_bounds(&mut self, var: usize, lb: f64, ub: f64) -> Result<()> {
        let v = &self.vars[var];
        if lb > ub || (v.kind == VarKind::Binary && (lb < 0.0 || ub > 1.0)) || !lb.is_finite() || !ub.is_finite() {
            return Err(Error::InvalidModel(format!("bad bounds [{lb}, {ub}] for `{}`", v.name)));
        }
        self.vars[var].lb = lb;
        self.vars[var].ub = ub;
        Ok(())
    }

    pub fn add_constraint(
        &mut self,
        name: impl Into<String>,
        terms: Vec<(usize, f64)>,
        relation: Relation,
        rhs: f64,
    ) -> Result<usize> {
        let name = name.into();
        if let Some(&(v, _)) = terms.iter().find(|(v, _)| *v >= self.vars.len()) {
            return Err(Error::InvalidModel(format!("constraint `{name}` references variable {v}")));
        }
        let terms = merge_terms(terms);
        self.constraints.push(Constraint { name, terms, relation, rhs });
        Ok(self.constraints.len() - 1)
    }

    pub fn set_rhs(&mut self, constraint: usize, rhs: f64) {
        self.constraints[constraint].rhs = rhs;
    }

    /// Appends a cut to the pool. Returns `false` when an identical cut is
    /// already present.
    pub fn add_cut(&mut self, cut: &LinearCut) -> Result<bool> {
        let mut terms = Vec::with_capacity(cut.terms.len());
        for (name, &a) in &cut.terms {
            let v = self.var(name).ok_or_else(|| Error::UnknownVariable(name.clone()))?;
            terms.push((v, a));
        }
        terms.sort_by_key(|&(v, _)| v);
        let mut key: Vec<u64> = Vec::with_capacity(2 * terms.len() + 2);
        for &(v, a) in &terms {
            key.push(v as u64);
            key.push(a.to_bits());
        }
        key.push(cut.relation as u64);
        key.push(cut.rhs.to_bits());
        if !self.cut_keys.insert(key) {
            return Ok(false);
        }
        let name = format!("cut{}", self.cuts.len());
        self.cuts.push((
            cut.tag,
            Constraint {
                name,
                terms,
                relation: cut.relation,
                rhs: cut.rhs,
            },
        ));
        Ok(true)
    }

    pub fn var(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn variables(&self) -> &[Variable] {
        &self.vars
    }

    pub fn num_vars(&self) -> usize {
        self.vars.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn constraints(&self) -> &[Constraint] {
        &self.constraints
    }

    pub fn cuts(&self) -> impl Iterator<Item = (CutTag, &Constraint)> {
        self.cuts.iter().map(|(t, c)| (*t, c))
    }

    pub fn num_cuts(&self) -> usize {
        self.cuts.len()
    }

    /// Constraints followed by pool cuts.
    pub fn rows(&self) -> impl Iterator<Item = &Constraint> {
        self.constraints.iter().chain(self.cuts.iter().map(|(_, c)| c))
    }

    pub fn num_rows(&self) -> usize {
        self.constraints.len() + self.cuts.len()
    }

    pub fn objective_value(&self, values: &[f64]) -> f64 {
        self.objective.iter().zip(values).map(|(c, v)| c * v).sum()
    }

    /// Value of a named variable in an assignment.
    pub fn value_of(&self, values: &[f64], name: &str) -> Option<f64> {
        self.var(name).map(|v| values[v])
    }

    /// Checks bounds, integrality, constraints and cuts.
    pub fn is_feasible(&self, values: &[f64], tol: f64) -> bool {
        values.len() == self.vars.len()
            && self.vars.iter().zip(values).all(|(v, &x)| {
                x >= v.lb - tol
                    && x <= v.ub + tol
                    && (v.kind == VarKind::Continuous || (x - x.round()).abs() <= tol)
            })
            && self.rows().all(|c| c.is_satisfied(values, tol))
    }

    pub(crate) fn has_integral_objective(&self) -> bool {
        self.vars.iter().zip(&self.objective).all(|(v, &c)| match v.kind {
            VarKind::Binary => c == c.round(),
            VarKind::Continuous => c == 0.0,
        })
    }
}

fn merge_terms(terms: Vec<(usize, f64)>) -> Vec<(usize, f64)> {
    let mut map: BTreeMap<usize, f64> = BTreeMap::new();
    for (v, a) in terms {
        *map.entry(v).or_insert(0.0) += a;
    }
    map.into_iter().filter(|(_, a)| *a != 0.0).collect()
}

impl fmt::Display for LinearModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "minimize")?;
        f.write_str("  obj: ")?;
        write_terms(
            f,
            self.objective
                .iter()
                .enumerate()
                .filter(|(_, c)| **c != 0.0)
                .map(|(v, c)| (self.vars[v].name.as_str(), *c)),
        )?;
        writeln!(f)?;
        writeln!(f, "subject to")?;
        for c in &self.constraints {
            write!(f, "  {}: ", c.name)?;
            write_terms(f, c.terms.iter().map(|&(v, a)| (self.vars[v].name.as_str(), a)))?;
            writeln!(f, " {} {}", c.relation, c.rhs)?;
        }
        if !self.cuts.is_empty() {
            writeln!(f, "cuts")?;
            for (tag, c) in &self.cuts {
                write!(f, "  {} [{tag}]: ", c.name)?;
                write_terms(f, c.terms.iter().map(|&(v, a)| (self.vars[v].name.as_str(), a)))?;
                writeln!(f, " {} {}", c.relation, c.rhs)?;
            }
        }
        writeln!(f, "bounds")?;
        for v in &self.vars {
            let kind = match v.kind {
                VarKind::Binary => "bin",
                VarKind::Continuous => "cont",
            };
            writeln!(f, "  {} <= {} <= {} ({kind})", v.lb, v.name, v.ub)?;
        }
        write!(f, "end")
    }
}
