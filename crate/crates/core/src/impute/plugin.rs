//! Monte-Carlo sampling from the identified chain factorization of the target law.

use alloc::vec::Vec;

use rand::Rng;

use super::decomposable::check_terms;
use super::regression::{ols, Design, RegressionDraw};
use super::ImputeError;
use crate::identify::FactorizationTerm;
use crate::rng::Seed;
use crate::simulate::{CompleteData, Dataset};

enum Sampler {
    /// Resample observed values of the target.
    Bootstrap(Vec<f64>),
    Regression {
        conditioning: Vec<usize>,
        fit: RegressionDraw,
    },
}

/// Draws `n_draws` rows from `Π p(target | conditioning, required indicators = 1)`.
///
/// Each factor is estimated on the rows where its required indicators are all 1. Factors
/// without conditioning variables are sampled by bootstrap from those rows; the others
/// from the fitted linear-Gaussian conditional. Columns come back in dataset order.
pub fn plug_in_target_law(
    d: &Dataset,
    terms: &[FactorizationTerm],
    n_draws: usize,
    seed: Seed,
) -> Result<CompleteData, ImputeError> {
    check_terms(d, terms)?;
    let names = d.variables().iter().map(|v| v.name.clone()).collect();
    if n_draws == 0 {
        return Ok(CompleteData {
            names,
            columns: alloc::vec![Vec::new(); d.variables().len()],
        });
    }

    let mut samplers = Vec::with_capacity(terms.len());
    for term in terms {
        let target = d.position(term.target.as_str()).expect("checked");
        let required: Vec<&Vec<bool>> = term
            .indicator_owners
            .iter()
            .filter_map(|o| d.variable(o.as_str()).and_then(|v| v.indicator.as_ref()))
            .collect();
        let rows: Vec<usize> = (0..d.n_rows())
            .filter(|&row| required.iter().all(|r| r[row]))
            .collect();
        let value = |var: usize, row: usize| {
            d.variables()[var].proxy[row].ok_or_else(|| {
                ImputeError::FactorizationMismatch(alloc::format!(
                    "{term} uses `{}` without requiring its indicator",
                    d.variables()[var].name
                ))
            })
        };
        if rows.is_empty() {
            return Err(ImputeError::EmptyFittingSet(
                alloc::string::ToString::to_string(term),
            ));
        }
        let sampler = if term.conditioning.is_empty() {
            Sampler::Bootstrap(
                rows.iter()
                    .map(|&r| value(target, r))
                    .collect::<Result<_, _>>()?,
            )
        } else {
            let conditioning: Vec<usize> = term
                .conditioning
                .iter()
                .map(|c| d.position(c.as_str()).expect("checked"))
                .collect();
            let q = conditioning.len() + 1;
            let mut design = Design::with_capacity(q, rows.len());
            let mut y = Vec::with_capacity(rows.len());
            let mut x = Vec::with_capacity(q);
            for &row in &rows {
                x.clear();
                x.push(1.0);
                for &c in &conditioning {
                    x.push(value(c, row)?);
                }
                design.push_row(&x);
                y.push(value(target, row)?);
            }
            Sampler::Regression {
                conditioning,
                fit: ols(&design, &y)?.point(),
            }
        };
        samplers.push((target, sampler));
    }

    let mut rng = seed.rng(0);
    let mut columns: Vec<Vec<f64>> = alloc::vec![alloc::vec![0.0; n_draws]; d.variables().len()];
    let mut x = Vec::new();
    #[allow(clippy::needless_range_loop)]
    for (target, sampler) in &samplers {
        match sampler {
            Sampler::Bootstrap(pool) => {
                for cell in columns[*target].iter_mut() {
                    *cell = pool[rng.random_range(0..pool.len())];
                }
            }
            Sampler::Regression { conditioning, fit } => {
                for i in 0..n_draws {
                    x.clear();
                    x.push(1.0);
                    x.extend(conditioning.iter().map(|&c| columns[c][i]));
                    columns[*target][i] = fit.sample(&x, &mut rng);
                }
            }
        }
    }
    Ok(CompleteData { names, columns })
}
