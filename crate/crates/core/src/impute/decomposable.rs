//! Decomposable multiple imputation: force a monotone missingness pattern along a valid
//! ordering, then impute variable by variable from the chain factorization.

use alloc::string::ToString;
use alloc::vec::Vec;

use super::regression::{ols, Design, LinearFit};
use super::{completed, CompletedDataset, ImputeError};
use crate::identify::{FactorizationTerm, OrderingCertificate};
use crate::rng::Seed;
use crate::simulate::Dataset;

/// Proxies after monotone forcing, in dataset column order.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneData {
    pub proxies: Vec<Vec<Option<f64>>>,
    /// `forced[var][row]`: the cell was observed but has been set to NA.
    pub forced: Vec<Vec<bool>>,
}

impl MonotoneData {
    pub fn n_forced(&self) -> usize {
        self.forced.iter().flatten().filter(|&&f| f).count()
    }
}

fn ordering_positions<S: AsRef<str>>(
    d: &Dataset,
    ordering: &[S],
) -> Result<Vec<usize>, ImputeError> {
    let mut pos = Vec::with_capacity(ordering.len());
    for name in ordering {
        let name = name.as_ref();
        let p = d.position(name).ok_or_else(|| {
            ImputeError::FactorizationMismatch(alloc::format!(
                "ordering names `{name}`, which is not in the data"
            ))
        })?;
        if pos.contains(&p) {
            return Err(ImputeError::FactorizationMismatch(alloc::format!(
                "ordering repeats `{name}`"
            )));
        }
        pos.push(p);
    }
    if let Some(v) = d
        .variables()
        .iter()
        .enumerate()
        .find(|(j, _)| !pos.contains(j))
    {
        return Err(ImputeError::FactorizationMismatch(alloc::format!(
            "ordering omits `{}`",
            v.1.name
        )));
    }
    Ok(pos)
}

/// In each row, every partially observed variable after the first missing one (along
/// `ordering`) is set to NA.
pub fn force_monotone<S: AsRef<str>>(
    d: &Dataset,
    ordering: &[S],
) -> Result<MonotoneData, ImputeError> {
    let pos = ordering_positions(d, ordering)?;
    let vars = d.variables();
    let mut proxies: Vec<Vec<Option<f64>>> = vars.iter().map(|v| v.proxy.clone()).collect();
    let mut forced: Vec<Vec<bool>> = vars
        .iter()
        .map(|_| alloc::vec![false; d.n_rows()])
        .collect();
    for row in 0..d.n_rows() {
        let mut broken = false;
        for &j in &pos {
            let Some(r) = vars[j].indicator.as_ref() else {
                continue;
            };
            if broken {
                if r[row] {
                    proxies[j][row] = None;
                    forced[j][row] = true;
                }
            } else if !r[row] {
                broken = true;
            }
        }
    }
    Ok(MonotoneData { proxies, forced })
}

struct TermPlan {
    target: usize,
    conditioning: Vec<usize>,
    fit: LinearFit,
}

fn term_plans(d: &Dataset, terms: &[FactorizationTerm]) -> Result<Vec<TermPlan>, ImputeError> {
    let lookup = |name: &str| {
        d.position(name).ok_or_else(|| {
            ImputeError::FactorizationMismatch(alloc::format!("`{name}` is not in the data"))
        })
    };
    let mut plans = Vec::with_capacity(terms.len());
    for term in terms {
        let target = lookup(term.target.as_str())?;
        let conditioning: Vec<usize> = term
            .conditioning
            .iter()
            .map(|c| lookup(c.as_str()))
            .collect::<Result<_, _>>()?;
        let mut required = Vec::with_capacity(term.indicator_owners.len());
        for owner in &term.indicator_owners {
            let var = &d.variables()[lookup(owner.as_str())?];
            let r = var.indicator.as_ref().ok_or_else(|| {
                ImputeError::FactorizationMismatch(alloc::format!(
                    "`{owner}` is fully observed in the data but {term} requires its indicator"
                ))
            })?;
            required.push(r);
        }
        let rows: Vec<usize> = (0..d.n_rows())
            .filter(|&row| required.iter().all(|r| r[row]))
            .collect();
        if rows.is_empty() {
            return Err(ImputeError::EmptyFittingSet(term.to_string()));
        }
        let q = conditioning.len() + 1;
        let mut design = Design::with_capacity(q, rows.len());
        let mut y = Vec::with_capacity(rows.len());
        let mut x = Vec::with_capacity(q);
        for &row in &rows {
            x.clear();
            x.push(1.0);
            for &c in &conditioning {
                x.push(d.variables()[c].proxy[row].ok_or_else(|| {
                    ImputeError::FactorizationMismatch(alloc::format!(
                        "{term} conditions on `{}` without requiring its indicator",
                        d.variables()[c].name
                    ))
                })?);
            }
            design.push_row(&x);
            y.push(d.variables()[target].proxy[row].ok_or_else(|| {
                ImputeError::FactorizationMismatch(alloc::format!(
                    "{term} does not require the indicator of its target"
                ))
            })?);
        }
        let fit = ols(&design, &y)?;
        plans.push(TermPlan {
            target,
            conditioning,
            fit,
        });
    }
    Ok(plans)
}

/// Terms must cover every variable once, and condition only on earlier targets.
pub(crate) fn check_terms(d: &Dataset, terms: &[FactorizationTerm]) -> Result<(), ImputeError> {
    let targets: Vec<&str> = terms.iter().map(|t| t.target.as_str()).collect();
    ordering_positions(d, &targets)?;
    for (k, term) in terms.iter().enumerate() {
        if let Some(c) = term
            .conditioning
            .iter()
            .find(|c| !targets[..k].contains(&c.as_str()))
        {
            return Err(ImputeError::FactorizationMismatch(alloc::format!(
                "{term} conditions on `{c}`, which is not an earlier term"
            )));
        }
        if term.indicator_owners.len() != term.required_indicators.len() {
            return Err(ImputeError::FactorizationMismatch(alloc::format!(
                "{term} lists indicators without owners"
            )));
        }
    }
    Ok(())
}

/// Decomposable imputation along `cert`'s ordering.
///
/// Stage one forces a monotone pattern ([`force_monotone`]). Stage two walks the terms in
/// order: each term's regression is fitted on the rows where all of its required
/// indicators are 1, a parameter draw is taken per imputation, and every NA cell of the
/// term's target (including forced cells) is imputed from already completed predecessors.
pub fn impute_decomposable(
    d: &Dataset,
    cert: &OrderingCertificate,
    terms: &[FactorizationTerm],
    m: usize,
    seed: Seed,
) -> Result<Vec<CompletedDataset>, ImputeError> {
    if m == 0 {
        return Err(ImputeError::InvalidCount { what: "m" });
    }
    if let Some(bad) = cert.failing().next() {
        return Err(ImputeError::InvalidCertificate(bad.to_string()));
    }
    let order: Vec<&str> = cert
        .ordering()
        .variables()
        .iter()
        .map(|v| v.as_str())
        .collect();
    let targets: Vec<&str> = terms.iter().map(|t| t.target.as_str()).collect();
    if order != targets {
        return Err(ImputeError::FactorizationMismatch(
            "terms do not follow the certificate's ordering".into(),
        ));
    }
    check_terms(d, terms)?;

    let monotone = force_monotone(d, &order)?;
    let plans = term_plans(d, terms)?;

    let mut out = Vec::with_capacity(m);
    let mut x = Vec::new();
    for imp in 0..m {
        let mut rng = seed.rng(imp as u64);
        let mut current: Vec<Vec<f64>> = monotone
            .proxies
            .iter()
            .map(|col| col.iter().map(|v| v.unwrap_or(f64::NAN)).collect())
            .collect();
        for plan in &plans {
            let draw = plan.fit.draw(&mut rng);
            #[allow(clippy::needless_range_loop)]
            for row in 0..d.n_rows() {
                if monotone.proxies[plan.target][row].is_some() {
                    continue;
                }
                x.clear();
                x.push(1.0);
                x.extend(plan.conditioning.iter().map(|&c| current[c][row]));
                current[plan.target][row] = draw.sample(&x, &mut rng);
            }
        }
        out.push(completed(d, imp + 1, current));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::NodeId;
    use crate::simulate::Variable;
    use alloc::vec;

    fn var(name: &str, vals: &[Option<f64>]) -> Variable {
        Variable {
            name: NodeId::new(name).unwrap(),
            proxy: vals.to_vec(),
            indicator: Some(vals.iter().map(Option::is_some).collect()),
        }
    }

    #[test]
    fn forcing_follows_the_ordering() {
        let d = Dataset::new(vec![
            var("X", &[Some(1.0), None, Some(3.0), None]),
            var("Y", &[Some(1.0), Some(2.0), None, None]),
        ])
        .unwrap();
        let m = force_monotone(&d, &["X", "Y"]).unwrap();
        assert_eq!(m.proxies[1], vec![Some(1.0), None, None, None]);
        assert_eq!(m.forced[1], vec![false, true, false, false]);
        assert_eq!(m.n_forced(), 1);

        let m = force_monotone(&d, &["Y", "X"]).unwrap();
        assert_eq!(m.proxies[0], vec![Some(1.0), None, None, None]);
        assert_eq!(m.forced[0], vec![false, false, true, false]);
    }

    #[test]
    fn complete_row_is_untouched() {
        let d = Dataset::new(vec![var("X", &[Some(1.0)]), var("Y", &[Some(2.0)])]).unwrap();
        let m = force_monotone(&d, &["X", "Y"]).unwrap();
        assert_eq!(m.n_forced(), 0);
    }

    #[test]
    fn fully_observed_variables_are_never_forced() {
        let d = Dataset::new(vec![
            var("X", &[None, Some(1.0)]),
            Variable {
                name: NodeId::new("O").unwrap(),
                proxy: vec![Some(5.0), Some(6.0)],
                indicator: None,
            },
        ])
        .unwrap();
        let m = force_monotone(&d, &["X", "O"]).unwrap();
        assert_eq!(m.proxies[1], vec![Some(5.0), Some(6.0)]);
    }

    #[test]
    fn ordering_must_cover_the_data() {
        let d = Dataset::new(vec![var("X", &[Some(1.0)]), var("Y", &[Some(2.0)])]).unwrap();
        assert!(matches!(
            force_monotone(&d, &["X"]),
            Err(ImputeError::FactorizationMismatch(_))
        ));
    }
}
