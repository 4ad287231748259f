use mdimp_core::presets::{builtin_example, example_spec};
use mdimp_core::simulate::spec_hash;
use mdimp_core::Seed;
use mdimp_oracles::{logistic, mean, normal_expectation, pearson, sample_sd, sem_covariance};

const N: usize = 1_000_000;

fn rounded_truth(id: u32) -> Vec<(String, f64)> {
    example_spec(id)
        .unwrap()
        .truth()
        .unwrap()
        .into_iter()
        .map(|(s, v)| (s.to_string(), v))
        .collect()
}

#[test]
fn published_truth_columns() {
    let two = [0.0, 0.0, 1.0, 1.41, 0.71];
    for id in 1..=3 {
        let got: Vec<f64> = rounded_truth(id).iter().map(|(_, v)| *v).collect();
        for (g, e) in got.iter().zip(two) {
            assert!((g - e).abs() < 0.005, "example {id}: {got:?}");
        }
    }
    let four = [
        0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.71, 0.50, 0.75, 0.71, 0.71, 0.75,
    ];
    let labels: Vec<String> = rounded_truth(4).into_iter().map(|(s, _)| s).collect();
    assert_eq!(
        labels[8..],
        ["Cor(X,W)", "Cor(X,Z)", "Cor(X,Y)", "Cor(W,Z)", "Cor(W,Y)", "Cor(Z,Y)"]
    );
    for ((label, g), e) in rounded_truth(4).iter().zip(four) {
        assert!((g - e).abs() < 0.005, "{label}: {g} vs {e}");
    }
}

#[test]
fn chain_truth_matches_the_linear_system() {
    // Order X, W, Z, Y.
    let h = 0.5f64.sqrt();
    let coef = vec![
        vec![0.0, 0.0, 0.0, 0.0],
        vec![h, 0.0, 0.0, 0.0],
        vec![0.0, h, 0.0, 0.0],
        vec![0.5, 0.0, 0.5, 0.0],
    ];
    let cov = sem_covariance(&coef, &[1.0, 0.5, 0.5, 0.25]);
    let names = ["X", "W", "Z", "Y"];
    let truth = rounded_truth(4);
    let get = |label: String| truth.iter().find(|(s, _)| *s == label).unwrap().1;
    for i in 0..4 {
        assert!((get(format!("sd({})", names[i])) - cov[i][i].sqrt()).abs() < 1e-12);
        for j in i + 1..4 {
            let r = cov[i][j] / (cov[i][i] * cov[j][j]).sqrt();
            assert!((get(format!("Cor({},{})", names[i], names[j])) - r).abs() < 1e-12);
        }
    }
}

#[test]
fn bivariate_sample_moments() {
    let ex = builtin_example(1, N, Seed(11)).unwrap();
    let x = ex.simulation.truth.column("X").unwrap();
    let y = ex.simulation.truth.column("Y").unwrap();
    let got = [mean(x), mean(y), sample_sd(x), sample_sd(y), pearson(x, y)];
    for ((_, t), g) in ex.truth.iter().zip(got) {
        assert!((t - g).abs() < 0.01, "{got:?}");
    }
}

#[test]
fn response_mechanisms_of_example_one() {
    let ex = builtin_example(1, N, Seed(12)).unwrap();
    let d = &ex.simulation.dataset;
    let x = ex.simulation.truth.column("X").unwrap();
    let rx: Vec<f64> = d
        .variable("X")
        .unwrap()
        .indicator
        .as_ref()
        .unwrap()
        .iter()
        .map(|&b| f64::from(u8::from(b)))
        .collect();
    let ry = d.variable("Y").unwrap().indicator.as_ref().unwrap();

    assert!((mean(&rx) - 0.7).abs() < 0.005);
    assert!(pearson(x, &rx).abs() < 0.01);

    let expected = normal_expectation(|z| z * logistic(z)) / normal_expectation(logistic);
    assert!((expected - 0.41).abs() < 0.005, "{expected}");
    let kept: Vec<f64> = x
        .iter()
        .zip(ry)
        .filter(|(_, &r)| r)
        .map(|(v, _)| *v)
        .collect();
    assert!((mean(&kept) - expected).abs() < 0.01);
}

#[test]
fn interaction_flips_selection_with_the_other_indicator() {
    let ex = builtin_example(3, N, Seed(13)).unwrap();
    let d = &ex.simulation.dataset;
    let x = ex.simulation.truth.column("X").unwrap();
    let rx = d.variable("X").unwrap().indicator.as_ref().unwrap();
    let ry = d.variable("Y").unwrap().indicator.as_ref().unwrap();
    let shift = normal_expectation(|z| z * logistic(z)) / normal_expectation(logistic);
    for (r, sign) in [(true, 1.0), (false, -1.0)] {
        let kept: Vec<f64> = (0..N)
            .filter(|&i| ry[i] && rx[i] == r)
            .map(|i| x[i])
            .collect();
        assert!(
            (mean(&kept) - sign * shift).abs() < 0.015,
            "R_X={r}: {}",
            mean(&kept)
        );
    }
}

#[test]
fn colluding_response_of_example_two() {
    let ex = builtin_example(2, N, Seed(14)).unwrap();
    let d = &ex.simulation.dataset;
    let x = ex.simulation.truth.column("X").unwrap();
    let rx = d.variable("X").unwrap().indicator.as_ref().unwrap();
    let ry = d.variable("Y").unwrap().indicator.as_ref().unwrap();
    for (r, offset) in [(true, 1.0), (false, -1.0)] {
        let p = normal_expectation(|z| logistic(z + offset));
        let sub: Vec<usize> = (0..N).filter(|&i| rx[i] == r).collect();
        let rate = sub.iter().filter(|&&i| ry[i]).count() as f64 / sub.len() as f64;
        assert!((rate - p).abs() < 0.005, "R_X={r}: {rate} vs {p}");
        let e = normal_expectation(|z| z * logistic(z + offset)) / p;
        let kept: Vec<f64> = sub.iter().filter(|&&i| ry[i]).map(|&i| x[i]).collect();
        assert!((mean(&kept) - e).abs() < 0.015);
    }
}

#[test]
fn chain_sample_moments() {
    let ex = builtin_example(4, N, Seed(15)).unwrap();
    let t = &ex.simulation.truth;
    for (stat, truth) in &ex.truth {
        let vars = stat.variables();
        let a = t.column(vars[0].as_str()).unwrap();
        let got = match stat.to_string().split('(').next().unwrap() {
            "E" => mean(a),
            "sd" => sample_sd(a),
            _ => pearson(a, t.column(vars[1].as_str()).unwrap()),
        };
        assert!((got - truth).abs() < 0.01, "{stat}: {got}");
    }
    let rz: Vec<f64> = ex
        .simulation
        .dataset
        .variable("Z")
        .unwrap()
        .indicator
        .as_ref()
        .unwrap()
        .iter()
        .map(|&b| f64::from(u8::from(b)))
        .collect();
    assert!((mean(&rz) - 0.7).abs() < 0.005);
}

#[test]
fn masking_hides_exactly_the_unobserved_cells() {
    let ex = builtin_example(4, 5_000, Seed(16)).unwrap();
    for v in ex.simulation.dataset.variables() {
        let r = v.indicator.as_ref().unwrap();
        let truth = ex.simulation.truth.column(v.name.as_str()).unwrap();
        for i in 0..5_000 {
            assert_eq!(v.proxy[i], r[i].then_some(truth[i]));
        }
    }
}

#[test]
fn same_seed_same_data() {
    let a = builtin_example(4, 2_000, Seed(99)).unwrap();
    let b = builtin_example(4, 2_000, Seed(99)).unwrap();
    let c = builtin_example(4, 2_000, Seed(100)).unwrap();
    assert_eq!(a.simulation, b.simulation);
    assert_ne!(a.simulation.truth, c.simulation.truth);
    assert_eq!(a.simulation.dataset.provenance.seed, Some(99));
}

#[test]
fn spec_hash_distinguishes_examples() {
    let hashes: Vec<String> = (1..=4)
        .map(|id| {
            let s = example_spec(id).unwrap();
            spec_hash(&s.graph, &s.sem, &s.response)
        })
        .collect();
    for i in 0..4 {
        assert_eq!(hashes[i].len(), 64);
        for j in i + 1..4 {
            assert_ne!(hashes[i], hashes[j]);
        }
    }
    let s = example_spec(2).unwrap();
    assert_eq!(hashes[1], spec_hash(&s.graph, &s.sem, &s.response));
}
