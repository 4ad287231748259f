use std::path::{Path, PathBuf};

use mdimp::config::{parse_methods, ConfigError, ExperimentConfig, ModelSource};
use mdimp::graph_doc::{parse_graph, read_graph, render_graph, GraphDocError};
use mdimp::io::{dataset_csv, read_dataset, table_csv, table_markdown, write_dataset};
use mdimp::model_doc::{parse_responses, parse_sem, render_model};
use mdimp_core::presets::{bivariate, builtin_example, colluder, example_spec, four_chain};
use mdimp_core::stats::bias_table;
use mdimp_core::{Method, Seed};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

#[test]
fn graph_documents_round_trip() {
    for g in [bivariate(), colluder(), four_chain()] {
        let text = render_graph(&g);
        let back = parse_graph(&text).unwrap();
        assert_eq!(render_graph(&back), text);
        assert_eq!(back.edges(), g.edges());
    }
}

#[test]
fn fixture_graphs_match_builtins() {
    for (file, g) in [
        ("bivariate.graph", bivariate()),
        ("colluder.graph", colluder()),
        ("four_chain.graph", four_chain()),
    ] {
        let read = read_graph(&fixture(file)).unwrap();
        assert_eq!(render_graph(&read), render_graph(&g), "{file}");
    }
}

#[test]
fn fixture_configs_match_builtins() {
    for id in 1..=4 {
        let cfg = ExperimentConfig::read(&fixture(&format!("example{id}.toml"))).unwrap();
        assert!(matches!(cfg.model, ModelSource::Files { .. }));
        assert_eq!((cfg.n, cfg.seed, cfg.m, cfg.iters), (200_000, 2024, 5, 5));
        let loaded = cfg.model.load().unwrap();
        let builtin = example_spec(id).unwrap();
        assert_eq!(render_graph(&loaded.graph), render_graph(&builtin.graph));
        assert_eq!(loaded.sem, builtin.sem, "example {id}");
        assert_eq!(loaded.response, builtin.response, "example {id}");
        assert_eq!(loaded.truth().unwrap(), builtin.truth().unwrap());
    }
}

#[test]
fn syntax_errors_name_the_line() {
    let err = read_graph(&fixture("malformed.graph")).unwrap_err();
    match err {
        GraphDocError::Syntax { line, .. } => assert_eq!(line, 4),
        other => panic!("{other}"),
    }
    assert!(parse_graph("X partial\n").is_err());
    assert!(parse_graph("[nodes]\nX partial\n[wrong]\n").is_err());
    assert!(matches!(
        parse_graph("[nodes]\nX partial\n[edges]\nR_X -> X\n"),
        Err(GraphDocError::Graph(_))
    ));
    let g = parse_graph("# only comments\n[nodes]\nO full # trailing\n").unwrap();
    assert_eq!(g.len(), 1);
}

#[test]
fn model_documents_round_trip() {
    for id in 1..=4 {
        let s = example_spec(id).unwrap();
        let text = render_model(&s.sem, &s.response);
        assert_eq!(parse_sem(&text).unwrap(), s.sem);
        assert_eq!(parse_responses(&text).unwrap(), s.response);
    }
    assert!(parse_responses("[responses.R_X]\nprobability = 0.5\nlogit = []\n").is_err());
    assert!(parse_responses("[responses.R_X]\nprobability = 1.5\n").is_err());
    assert!(parse_sem("[equations.X]\nnoise_sd = 0.0\n").is_err());
    assert!(parse_sem("[equations.X]\nnoise_sd = 1.0\nslope = 2\n").is_err());
}

#[test]
fn dataset_csv_round_trips_exactly() {
    let ex = builtin_example(4, 300, Seed(5)).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("data.csv");
    write_dataset(&path, &ex.simulation.dataset).unwrap();
    let back = read_dataset(&path).unwrap();
    assert_eq!(back.variables(), ex.simulation.dataset.variables());
    assert_eq!(dataset_csv(&back), std::fs::read(&path).unwrap());

    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.starts_with("X_star,R_X,W_star,R_W,Z_star,R_Z,Y_star,R_Y\n"));
}

#[test]
fn dataset_reader_rejects_inconsistent_rows() {
    let dir = tempfile::tempdir().unwrap();
    let bad = [
        "X_star,R_X\n1.0,0\n",
        "X_star,R_X\n,1\n",
        "X_star,R_X\n1.0,2\n",
        "X_star,R_X\nabc,1\n",
        "X_star\n1.0\n",
        "O,X_star,R_X\n,1,1\n",
    ];
    for (i, text) in bad.iter().enumerate() {
        let p = dir.path().join(format!("bad{i}.csv"));
        std::fs::write(&p, text).unwrap();
        assert!(read_dataset(&p).is_err(), "{text:?}");
    }
    let p = dir.path().join("good.csv");
    std::fs::write(&p, "O,X_star,R_X\n1.5,,0\n2.5,3,1\n").unwrap();
    let d = read_dataset(&p).unwrap();
    assert_eq!(d.n_missing(), 1);
    assert!(d.variable("O").unwrap().indicator.is_none());
}

#[test]
fn configs_resolve_paths_and_reject_nonsense() {
    let base = Path::new("/data/cfg");
    let c = ExperimentConfig::parse(
        "graph = 'g.graph'\nsem = 'm.toml'\nresponse = 'm.toml'\nmethods = ['decomp', 'mi', 'mi']\nordering = ['X', 'Y']\nout = 'res'\n",
        base,
    )
    .unwrap();
    assert_eq!(
        c.model,
        ModelSource::Files {
            graph: base.join("g.graph"),
            sem: base.join("m.toml"),
            response: base.join("m.toml"),
        }
    );
    assert_eq!(c.methods, vec![Method::Mi, Method::DecompMi]);
    assert_eq!(c.out, Some(base.join("res")));

    assert!(matches!(
        ExperimentConfig::parse("n = 10\n", base),
        Err(ConfigError::ModelSource)
    ));
    assert!(matches!(
        ExperimentConfig::parse("example = 1\ngraph = 'g'\n", base),
        Err(ConfigError::ModelSource)
    ));
    assert!(ExperimentConfig::parse("example = 1\nbogus = 3\n", base).is_err());
    assert!(matches!(
        ExperimentConfig::parse("example = 1\nm = 0\n", base),
        Err(ConfigError::NonPositive("m"))
    ));
    assert!(matches!(
        parse_methods(&["mice"]),
        Err(ConfigError::UnknownMethod(_))
    ));
}

#[test]
fn tables_render_at_two_decimals_and_full_precision() {
    let s = example_spec(1).unwrap();
    let truth = s.truth().unwrap();
    let mut estimates = std::collections::BTreeMap::new();
    estimates.insert(
        Method::Cca,
        truth
            .iter()
            .map(|(st, v)| (st.clone(), v + 0.123456789))
            .collect(),
    );
    let t = bias_table(&truth, &[Method::Cca], &estimates).unwrap();
    let md = table_markdown(&t);
    let lines: Vec<&str> = md.lines().collect();
    assert_eq!(lines[0], "| Statistic | Truth |  CCA |");
    assert_eq!(lines[2], "| E(X)      |  0.00 | 0.12 |");
    assert_eq!(lines.len(), 7);
    let csv = String::from_utf8(table_csv(&t)).unwrap();
    assert!(csv.starts_with("statistic,truth,cca_estimate,cca_bias\n"));
    assert!(csv.contains("0.123456789"));
}
