use mdimp_core::experiment::{resolve_factorization, OrderingChoice, Settings};
use mdimp_core::impute::{
    bayes_linreg_draw, force_monotone, impute_chained, impute_decomposable, impute_miri, ols,
    plug_in_target_law, CompletedDataset, Design, PredictorMatrix,
};
use mdimp_core::presets::{builtin_example, colluder};
use mdimp_core::simulate::{Dataset, Variable};
use mdimp_core::stats::{pool, summarize, table_statistics};
use mdimp_core::{NodeId, Seed};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

fn id(s: &str) -> NodeId {
    NodeId::new(s).unwrap()
}

fn partial(name: &str, values: &[f64], observed: &[bool]) -> Variable {
    Variable {
        name: id(name),
        proxy: values
            .iter()
            .zip(observed)
            .map(|(v, &o)| o.then_some(*v))
            .collect(),
        indicator: Some(observed.to_vec()),
    }
}

#[test]
fn regression_recovers_a_slope() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let n = 100_000;
    let mut design = Design::with_capacity(2, n);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let x: f64 = rng.sample(StandardNormal);
        let e: f64 = rng.sample(StandardNormal);
        design.push_row(&[1.0, x]);
        y.push(1.0 + 2.0 * x + 0.1 * e);
    }
    let fit = ols(&design, &y).unwrap();
    assert!((fit.coefficients()[1] - 2.0).abs() < 0.01);
    assert!((fit.point().residual_sd - 0.1).abs() < 0.01);

    let draws: Vec<f64> = (0..200)
        .map(|_| {
            bayes_linreg_draw(&design, &y, &mut rng)
                .unwrap()
                .coefficients[1]
        })
        .collect();
    let m = draws.iter().sum::<f64>() / 200.0;
    assert!((m - 2.0).abs() < 0.01);
    // Posterior spread is of order 0.1 / sqrt(n).
    let spread = draws.iter().map(|d| (d - m).abs()).fold(0.0, f64::max);
    assert!(spread > 0.0 && spread < 0.003, "{spread}");
}

#[test]
fn chained_imputation_is_unbiased_under_mcar() {
    let n = 100_000;
    let ex = builtin_example(1, n, Seed(21)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let x = ex.simulation.truth.column("X").unwrap();
    let y = ex.simulation.truth.column("Y").unwrap();
    let mx: Vec<bool> = (0..n).map(|_| rng.random_bool(0.7)).collect();
    let my: Vec<bool> = (0..n).map(|_| rng.random_bool(0.6)).collect();
    let d = Dataset::new(vec![partial("X", x, &mx), partial("Y", y, &my)]).unwrap();
    let stats = table_statistics(&[id("X"), id("Y")]);
    let truth = summarize(&ex.simulation.truth, &stats).unwrap();
    let sets = impute_chained(&d, &PredictorMatrix::standard(&d), 5, 5, Seed(23)).unwrap();
    let per: Vec<Vec<f64>> = sets.iter().map(|s| summarize(s, &stats).unwrap()).collect();
    let pooled = pool(&per).unwrap();
    for k in 0..stats.len() {
        assert!(
            (pooled[k] - truth[k]).abs() <= 0.02,
            "{}: {}",
            stats[k],
            pooled[k] - truth[k]
        );
        let lo = per.iter().map(|p| p[k]).fold(f64::INFINITY, f64::min);
        let hi = per.iter().map(|p| p[k]).fold(f64::NEG_INFINITY, f64::max);
        assert!(pooled[k] >= lo && pooled[k] <= hi);
    }
}

#[test]
fn decomposable_and_plug_in_fix_example_two() {
    let n = 50_000;
    let ex = builtin_example(2, n, Seed(31)).unwrap();
    let d = &ex.simulation.dataset;
    let f = resolve_factorization(
        &ex.spec.graph,
        &OrderingChoice::Search,
        &Settings::default(),
    )
    .unwrap();
    let stats: Vec<_> = ex.truth.iter().map(|(s, _)| s.clone()).collect();
    let sets = impute_decomposable(d, &f.certificate, &f.terms, 5, Seed(32)).unwrap();
    let per: Vec<Vec<f64>> = sets.iter().map(|s| summarize(s, &stats).unwrap()).collect();
    let pooled = pool(&per).unwrap();
    let plug = summarize(
        &plug_in_target_law(d, &f.terms, n, Seed(33)).unwrap(),
        &stats,
    )
    .unwrap();
    for (k, (s, t)) in ex.truth.iter().enumerate() {
        assert!((pooled[k] - t).abs() < 0.03, "decomp {s}: {}", pooled[k]);
        assert!((plug[k] - t).abs() < 0.03, "plug-in {s}: {}", plug[k]);
    }
}

#[test]
fn plug_in_with_no_draws_is_empty() {
    let ex = builtin_example(1, 500, Seed(1)).unwrap();
    let f = resolve_factorization(
        &ex.spec.graph,
        &OrderingChoice::Search,
        &Settings::default(),
    )
    .unwrap();
    let s = plug_in_target_law(&ex.simulation.dataset, &f.terms, 0, Seed(2)).unwrap();
    assert_eq!(s.n_rows(), 0);
    assert_eq!(s.names.len(), 2);
}

fn bits(sets: &[CompletedDataset]) -> Vec<Vec<Vec<u64>>> {
    sets.iter()
        .map(|s| {
            s.columns
                .iter()
                .map(|c| c.iter().map(|v| v.to_bits()).collect())
                .collect()
        })
        .collect()
}

fn rows() -> impl Strategy<Value = Vec<(f64, f64, bool, bool)>> {
    prop::collection::vec(
        (
            -3.0..3.0f64,
            -1.0..1.0f64,
            prop::bool::weighted(0.7),
            prop::bool::weighted(0.7),
        ),
        15..60,
    )
}

fn dataset(rows: &[(f64, f64, bool, bool)]) -> Dataset {
    let x: Vec<f64> = rows.iter().map(|r| r.0).collect();
    let y: Vec<f64> = rows.iter().map(|r| r.0 + r.1).collect();
    let rx: Vec<bool> = rows.iter().map(|r| r.2).collect();
    let ry: Vec<bool> = rows.iter().map(|r| r.3).collect();
    Dataset::new(vec![partial("X", &x, &rx), partial("Y", &y, &ry)]).unwrap()
}

fn enough(rows: &[(f64, f64, bool, bool)]) -> bool {
    rows.iter().filter(|r| r.2 && r.3).count() >= 5
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn chained_never_overwrites_observed_cells(rows in rows(), seed in any::<u64>(), miri in any::<bool>()) {
        prop_assume!(enough(&rows));
        let d = dataset(&rows);
        let run = || if miri {
            impute_miri(&d, 3, 2, Seed(seed))
        } else {
            impute_chained(&d, &PredictorMatrix::standard(&d), 3, 2, Seed(seed))
        };
        let sets = run().unwrap();
        prop_assert_eq!(sets.len(), 3);
        for (i, s) in sets.iter().enumerate() {
            prop_assert_eq!(s.index, i + 1);
            for (v, col) in d.variables().iter().zip(&s.columns) {
                for (cell, value) in v.proxy.iter().zip(col) {
                    prop_assert!(value.is_finite());
                    if let Some(o) = cell {
                        prop_assert_eq!(o.to_bits(), value.to_bits());
                    }
                }
            }
        }
        prop_assert_eq!(bits(&sets), bits(&run().unwrap()));
    }

    #[test]
    fn decomposable_only_touches_missing_or_forced_cells(rows in rows(), seed in any::<u64>()) {
        prop_assume!(enough(&rows));
        let d = dataset(&rows);
        let f = resolve_factorization(&colluder(), &OrderingChoice::Search, &Settings::default()).unwrap();
        let order: Vec<&str> = f.certificate.ordering().variables().iter().map(|v| v.as_str()).collect();
        let mono = force_monotone(&d, &order).unwrap();
        let run = || impute_decomposable(&d, &f.certificate, &f.terms, 2, Seed(seed)).unwrap();
        let sets = run();
        for s in &sets {
            for (j, v) in d.variables().iter().enumerate() {
                for row in 0..d.n_rows() {
                    let value = s.columns[j][row];
                    prop_assert!(value.is_finite());
                    match v.proxy[row] {
                        Some(o) if !mono.forced[j][row] => prop_assert_eq!(o.to_bits(), value.to_bits()),
                        _ => {}
                    }
                }
            }
        }
        prop_assert_eq!(bits(&sets), bits(&run()));
    }

    #[test]
    fn forcing_yields_a_monotone_pattern(rows in rows(), reverse in any::<bool>()) {
        let d = dataset(&rows);
        let order: &[&str] = if reverse { &["Y", "X"] } else { &["X", "Y"] };
        let mono = force_monotone(&d, order).unwrap();
        let pos: Vec<usize> = order.iter().map(|n| d.position(n).unwrap()).collect();
        for row in 0..d.n_rows() {
            let mut gone = false;
            for &j in &pos {
                let present = mono.proxies[j][row].is_some();
                prop_assert!(!(gone && present));
                gone |= !present;
                let was = d.variables()[j].proxy[row].is_some();
                prop_assert_eq!(mono.forced[j][row], was && !present);
            }
        }
    }
}
