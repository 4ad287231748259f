//! The four worked examples: graphs, structural equations, response models and exact truth.

use alloc::vec;
use alloc::vec::Vec;

use thiserror::Error;

use crate::graph::{GraphBuilder, MissingDataGraph};
use crate::rng::Seed;
use crate::sem::{LogitTerm, ResponseModel, ResponseSpec, SemSpec, SpecError, StructuralEquation};
use crate::simulate::{simulate_dataset, SimulateError, Simulation};
use crate::stats::{table_statistics, StatisticId};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PresetError {
    #[error("unknown example {0}; expected 1, 2, 3 or 4")]
    UnknownExample(u32),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error(transparent)]
    Simulate(#[from] SimulateError),
}

/// X -> Y, X -> R_Y.
pub fn bivariate() -> MissingDataGraph {
    GraphBuilder::new()
        .partially_observed("X")
        .partially_observed("Y")
        .indicator("R_X", "X")
        .indicator("R_Y", "Y")
        .edge("X", "Y")
        .edge("X", "R_Y")
        .build()
        .expect("fixed graph")
}

/// [`bivariate`] plus the colluding edge R_X -> R_Y.
pub fn colluder() -> MissingDataGraph {
    GraphBuilder::new()
        .partially_observed("X")
        .partially_observed("Y")
        .indicator("R_X", "X")
        .indicator("R_Y", "Y")
        .edge("X", "Y")
        .edge("X", "R_Y")
        .edge("R_X", "R_Y")
        .build()
        .expect("fixed graph")
}

/// Four-variable chain X -> W -> Z -> Y with X -> Y and the colluder Z -> R_W <- R_Z.
pub fn four_chain() -> MissingDataGraph {
    GraphBuilder::new()
        .partially_observed("X")
        .partially_observed("W")
        .partially_observed("Z")
        .partially_observed("Y")
        .indicator("R_X", "X")
        .indicator("R_W", "W")
        .indicator("R_Z", "Z")
        .indicator("R_Y", "Y")
        .edge("X", "Y")
        .edge("X", "W")
        .edge("X", "R_Y")
        .edge("W", "Z")
        .edge("W", "R_X")
        .edge("Z", "Y")
        .edge("Z", "R_W")
        .edge("R_Z", "R_W")
        .build()
        .expect("fixed graph")
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExampleSpec {
    pub id: u32,
    pub graph: MissingDataGraph,
    pub sem: SemSpec,
    pub response: ResponseSpec,
}

impl ExampleSpec {
    /// Statistics in table order (means, sds, then correlations of variable pairs).
    pub fn statistics(&self) -> Vec<StatisticId> {
        let vars: Vec<_> = self
            .graph
            .substantive()
            .into_iter()
            .map(|i| self.graph.id(i).clone())
            .collect();
        table_statistics(&vars)
    }

    /// Exact values of [`Self::statistics`] under the structural equations.
    pub fn truth(&self) -> Result<Vec<(StatisticId, f64)>, SpecError> {
        let moments = self.sem.implied_moments(&self.graph)?;
        Ok(self
            .statistics()
            .into_iter()
            .map(|s| {
                let v = moments
                    .statistic(&s)
                    .expect("statistic over graph variables");
                (s, v)
            })
            .collect())
    }
}

fn eq(intercept: f64, coefficients: &[(&str, f64)], noise_sd: f64) -> StructuralEquation {
    StructuralEquation {
        intercept,
        coefficients: coefficients
            .iter()
            .map(|(p, c)| (crate::graph::NodeId::new(*p).expect("nonempty"), *c))
            .collect(),
        noise_sd,
    }
}

/// X ~ N(0, 1), Y = X + N(0, 1): var(Y) = 2, cor(X, Y) = 1/√2.
fn bivariate_sem() -> Result<SemSpec, SpecError> {
    SemSpec::new()
        .with_equation("X", eq(0.0, &[], 1.0))?
        .with_equation("Y", eq(0.0, &[("X", 1.0)], 1.0))
}

/// Unit-variance chain reproducing the four-variable truth table:
/// cor(X,W) = cor(W,Z) = 1/√2, cor(X,Z) = 1/2, cor(X,Y) = cor(Z,Y) = 3/4.
fn chain_sem() -> Result<SemSpec, SpecError> {
    let h = libm::sqrt(0.5);
    SemSpec::new()
        .with_equation("X", eq(0.0, &[], 1.0))?
        .with_equation("W", eq(0.0, &[("X", h)], h))?
        .with_equation("Z", eq(0.0, &[("W", h)], h))?
        .with_equation("Y", eq(0.0, &[("X", 0.5), ("Z", 0.5)], 0.5))
}

pub fn example_spec(id: u32) -> Result<ExampleSpec, PresetError> {
    let t = LogitTerm::new;
    let (graph, sem, response) = match id {
        1 => (
            bivariate(),
            bivariate_sem()?,
            ResponseSpec::new()
                .with_model("R_X", ResponseModel::Constant(0.7))?
                .with_model("R_Y", ResponseModel::Logistic(vec![t(1.0, &["X"])]))?,
        ),
        2 => (
            colluder(),
            bivariate_sem()?,
            // X + 2 R_X - 1
            ResponseSpec::new()
                .with_model("R_X", ResponseModel::Constant(0.7))?
                .with_model(
                    "R_Y",
                    ResponseModel::Logistic(vec![t(1.0, &["X"]), t(2.0, &["R_X"]), t(-1.0, &[])]),
                )?,
        ),
        3 => (
            colluder(),
            bivariate_sem()?,
            // X (2 R_X - 1)
            ResponseSpec::new()
                .with_model("R_X", ResponseModel::Constant(0.7))?
                .with_model(
                    "R_Y",
                    ResponseModel::Logistic(vec![t(2.0, &["X", "R_X"]), t(-1.0, &["X"])]),
                )?,
        ),
        4 => (
            four_chain(),
            chain_sem()?,
            ResponseSpec::new()
                .with_model("R_Z", ResponseModel::Constant(0.7))?
                .with_model("R_X", ResponseModel::Logistic(vec![t(1.0, &["W"])]))?
                .with_model("R_Y", ResponseModel::Logistic(vec![t(1.0, &["X"])]))?
                // Z (2 R_Z - 1)
                .with_model(
                    "R_W",
                    ResponseModel::Logistic(vec![t(2.0, &["Z", "R_Z"]), t(-1.0, &["Z"])]),
                )?,
        ),
        other => return Err(PresetError::UnknownExample(other)),
    };
    sem.validate(&graph)?;
    response.validate(&graph)?;
    Ok(ExampleSpec {
        id,
        graph,
        sem,
        response,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BuiltinExample {
    pub spec: ExampleSpec,
    pub simulation: Simulation,
    pub truth: Vec<(StatisticId, f64)>,
}

/// Wires up example `id` and simulates `n` rows from it.
pub fn builtin_example(id: u32, n: usize, seed: Seed) -> Result<BuiltinExample, PresetError> {
    let spec = example_spec(id)?;
    let simulation = simulate_dataset(&spec.graph, &spec.sem, &spec.response, n, seed)?;
    let truth = spec.truth()?;
    Ok(BuiltinExample {
        spec,
        simulation,
        truth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_example_is_rejected() {
        assert_eq!(
            builtin_example(5, 10, Seed(1)).unwrap_err(),
            PresetError::UnknownExample(5)
        );
    }

    #[test]
    fn presets_use_the_right_graphs() {
        assert_eq!(example_spec(1).unwrap().graph, bivariate());
        assert_eq!(example_spec(2).unwrap().graph, colluder());
        assert_eq!(example_spec(3).unwrap().graph, colluder());
        assert_eq!(example_spec(4).unwrap().graph, four_chain());
    }

    #[test]
    fn truth_tables_have_expected_shapes() {
        assert_eq!(example_spec(1).unwrap().truth().unwrap().len(), 5);
        let t4 = example_spec(4).unwrap().truth().unwrap();
        assert_eq!(t4.len(), 14);
        let labels: Vec<_> = t4.iter().map(|(s, _)| alloc::format!("{s}")).collect();
        assert_eq!(
            labels,
            [
                "E(X)", "E(W)", "E(Z)", "E(Y)", "sd(X)", "sd(W)", "sd(Z)", "sd(Y)", "Cor(X,W)",
                "Cor(X,Z)", "Cor(X,Y)", "Cor(W,Z)", "Cor(W,Y)", "Cor(Z,Y)"
            ]
        );
    }
}
