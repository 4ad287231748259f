use mdimp_core::dag::Dag;
use mdimp_oracles::d_separated_by_paths;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn random_dag(rng: &mut ChaCha8Rng) -> (usize, Vec<(usize, usize)>) {
    let n = rng.random_range(2..=7);
    let density: f64 = rng.random_range(0.1..0.7);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                edges.push((perm[i], perm[j]));
            }
        }
    }
    (n, edges)
}

/// Disjoint nonempty `a`, `b` and possibly empty `given`.
fn random_query(n: usize, rng: &mut ChaCha8Rng) -> (Vec<usize>, Vec<usize>, Vec<usize>) {
    let mut nodes: Vec<usize> = (0..n).collect();
    nodes.shuffle(rng);
    let na = rng.random_range(1..n);
    let nb = rng.random_range(1..=n - na);
    let nz = rng.random_range(0..=n - na - nb);
    (
        nodes[..na].to_vec(),
        nodes[na..na + nb].to_vec(),
        nodes[na + nb..na + nb + nz].to_vec(),
    )
}

#[test]
fn agrees_with_path_enumeration_on_random_dags() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut separated = 0;
    for _ in 0..200 {
        let (n, edges) = random_dag(&mut rng);
        let dag = Dag::from_edges(n, &edges).unwrap();
        for _ in 0..200 {
            let (a, b, z) = random_query(n, &mut rng);
            let fast = dag.d_separated(&a, &b, &z);
            let slow = d_separated_by_paths(n, &edges, &a, &b, &z);
            assert_eq!(fast, slow, "edges {edges:?}, {a:?} vs {b:?} given {z:?}");
            separated += usize::from(fast);
        }
    }
    // Both answers occur often enough for the agreement to mean something.
    assert!(separated > 2_000 && separated < 38_000, "{separated}");
}

#[test]
fn symmetric_in_the_two_sets() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..100 {
        let (n, edges) = random_dag(&mut rng);
        let dag = Dag::from_edges(n, &edges).unwrap();
        for _ in 0..50 {
            let (a, b, z) = random_query(n, &mut rng);
            assert_eq!(dag.d_separated(&a, &b, &z), dag.d_separated(&b, &a, &z));
        }
    }
}

#[test]
fn adding_an_edge_never_separates() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for _ in 0..100 {
        let (n, edges) = random_dag(&mut rng);
        let dag = Dag::from_edges(n, &edges).unwrap();
        let (u, v) = (rng.random_range(0..n), rng.random_range(0..n));
        let mut more = edges.clone();
        more.push((u, v));
        let Ok(bigger) = Dag::from_edges(n, &more) else {
            continue;
        };
        for _ in 0..50 {
            let (a, b, z) = random_query(n, &mut rng);
            if !dag.d_separated(&a, &b, &z) {
                assert!(!bigger.d_separated(&a, &b, &z));
            }
        }
    }
}
