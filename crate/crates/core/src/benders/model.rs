use crate::error::{Error, Result};
use crate::exact::{selection_master, x_var};
use crate::instance::PpscInstance;
use crate::mip::{LinearModel, Relation};
use crate::scenario::ScenarioSet;

use super::cuts::{theta_var, z_var};

/// Master over `(x, z, theta)` with `theta_w >= tau z_w` and the sampled
/// chance constraint. Scenario cuts go into the model's pool.
#[derive(Debug, Clone)]
pub struct BendersMaster {
    pub model: LinearModel,
    n: usize,
    omega: usize,
}

impl BendersMaster {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn omega(&self) -> usize {
        self.omega
    }

    pub fn x(&self, i: usize) -> usize {
        i
    }

    pub fn z(&self, w: usize) -> usize {
        self.n + 2 * w
    }

    pub fn theta(&self, w: usize) -> usize {
        self.n + 2 * w + 1
    }
}

fn check_dims(instance: &PpscInstance, scenarios: &ScenarioSet) -> Result<()> {
    let s = scenarios.get(0);
    if s.n() != instance.n() || s.m() != instance.m() {
        return Err(Error::Incompatible(format!(
            "scenarios are {}x{}, instance is {}x{}",
            s.n(),
            s.m(),
            instance.n(),
            instance.m()
        )));
    }
    Ok(())
}

fn add_chance_row(model: &mut LinearModel, z: &[usize], scenarios: &ScenarioSet, epsilon: f64) -> Result<()> {
    let terms = z.iter().zip(scenarios.weights()).map(|(&v, p)| (v, p)).collect();
    model.add_constraint("chance", terms, Relation::Ge, 1.0 - epsilon)?;
    Ok(())
}

pub fn build_master(instance: &PpscInstance, scenarios: &ScenarioSet) -> Result<BendersMaster> {
    check_dims(instance, scenarios)?;
    let mut model = selection_master(instance)?;
    let tau = instance.tau() as f64;
    let mut zs = Vec::with_capacity(scenarios.len());
    for w in 0..scenarios.len() {
        let z = model.add_binary(z_var(w))?;
        let theta = model.add_continuous(theta_var(w), 0.0, instance.m() as f64)?;
        model.add_constraint(format!("target{w}"), vec![(theta, 1.0), (z, -tau)], Relation::Ge, 0.0)?;
        zs.push(z);
    }
    add_chance_row(&mut model, &zs, scenarios, instance.epsilon())?;
    Ok(BendersMaster {
        model,
        n: instance.n(),
        omega: scenarios.len(),
    })
}

/// Deterministic equivalent over `(x, y, z)`, with `y{w}_{i}` marking item
/// `i` covered in scenario `w`. Branching prefers `x` and `z`: once both are
/// integral the `y` rows have integral vertices, so `y` never needs a branch.
pub fn build_dep(instance: &PpscInstance, scenarios: &ScenarioSet) -> Result<LinearModel> {
    check_dims(instance, scenarios)?;
    let mut model = selection_master(instance)?;
    for j in 0..instance.n() {
        model.set_priority(j, 1);
    }
    let tau = instance.tau() as f64;
    let mut zs = Vec::with_capacity(scenarios.len());
    for (w, s) in scenarios.scenarios().iter().enumerate() {
        let mut ys = Vec::with_capacity(instance.m());
        for i in 0..instance.m() {
            let y = model.add_binary(format!("y{w}_{i}"))?;
            let mut terms: Vec<(usize, f64)> = s.reached_by(i).iter().map(|&j| (j, 1.0)).collect();
            terms.push((y, -1.0));
            model.add_constraint(format!("cover{w}_{i}"), terms, Relation::Ge, 0.0)?;
            ys.push(y);
        }
        let z = model.add_binary(z_var(w))?;
        model.set_priority(z, 1);
        let mut terms: Vec<(usize, f64)> = ys.iter().map(|&y| (y, 1.0)).collect();
        terms.push((z, -tau));
        model.add_constraint(format!("target{w}"), terms, Relation::Ge, 0.0)?;
        zs.push(z);
    }
    add_chance_row(&mut model, &zs, scenarios, instance.epsilon())?;
    Ok(model)
}

/// Reduced formulation over `(x, z)` for scenario sets in which every item
/// has at most one live incoming arc: `sum_i sigma_w({i}) x_i >= tau z_w`.
pub fn build_dep_lt(instance: &PpscInstance, scenarios: &ScenarioSet) -> Result<LinearModel> {
    check_dims(instance, scenarios)?;
    if !scenarios.is_linear_threshold() {
        return Err(Error::Incompatible(
            "reduced formulation needs scenarios with at most one incoming arc per item".into(),
        ));
    }
    let mut model = selection_master(instance)?;
    let tau = instance.tau() as f64;
    let mut zs = Vec::with_capacity(scenarios.len());
    for (w, s) in scenarios.scenarios().iter().enumerate() {
        let z = model.add_binary(z_var(w))?;
        let mut terms: Vec<(usize, f64)> = (0..instance.n())
            .filter(|&i| s.singleton(i) > 0)
            .map(|i| (model.var(&x_var(i)).expect("x declared"), s.singleton(i) as f64))
            .collect();
        terms.push((z, -tau));
        model.add_constraint(format!("target{w}"), terms, Relation::Ge, 0.0)?;
        zs.push(z);
    }
    add_chance_row(&mut model, &zs, scenarios, instance.epsilon())?;
    Ok(model)
}
