use mdimp_core::simulate::CompleteData;
use mdimp_core::stats::{pool, summarize, StatisticId};
use mdimp_core::NodeId;
use mdimp_oracles::{mean, pearson, sample_sd};
use proptest::prelude::*;

fn id(s: &str) -> NodeId {
    NodeId::new(s).unwrap()
}

fn data(a: Vec<f64>, b: Vec<f64>) -> CompleteData {
    CompleteData {
        names: vec![id("A"), id("B")],
        columns: vec![a, b],
    }
}

fn stats() -> Vec<StatisticId> {
    vec![
        StatisticId::mean(id("A")),
        StatisticId::sd(id("B")),
        StatisticId::corr(id("A"), id("B")).unwrap(),
    ]
}

fn pairs() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((-100.0..100.0f64, -100.0..100.0f64), 3..80)
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

proptest! {
    #[test]
    fn matches_two_pass_formulas(p in pairs()) {
        let (a, b): (Vec<f64>, Vec<f64>) = p.into_iter().unzip();
        let got = summarize(&data(a.clone(), b.clone()), &stats()).unwrap();
        prop_assert!(close(got[0], mean(&a)));
        prop_assert!(close(got[1], sample_sd(&b)));
        let r = pearson(&a, &b);
        prop_assume!(r.is_finite());
        prop_assert!((got[2] - r).abs() < 1e-9);
    }

    #[test]
    fn row_order_does_not_matter(p in pairs(), rot in 0usize..80) {
        let (a, b): (Vec<f64>, Vec<f64>) = p.iter().copied().unzip();
        let mut q = p.clone();
        q.reverse();
        let k = rot % q.len();
        q.rotate_left(k);
        let (a2, b2): (Vec<f64>, Vec<f64>) = q.into_iter().unzip();
        let x = summarize(&data(a, b), &stats());
        let y = summarize(&data(a2, b2), &stats());
        if let (Ok(x), Ok(y)) = (x, y) {
            for (u, v) in x.iter().zip(&y) {
                prop_assert!((u - v).abs() < 1e-9 * (1.0 + u.abs()));
            }
        }
    }

    #[test]
    fn correlation_is_symmetric_and_affine_invariant(p in pairs(), scale in 0.01..50.0f64, shift in -10.0..10.0f64) {
        let (a, b): (Vec<f64>, Vec<f64>) = p.into_iter().unzip();
        let ab = StatisticId::corr(id("A"), id("B")).unwrap();
        let ba = StatisticId::corr(id("B"), id("A")).unwrap();
        let d = data(a.clone(), b.clone());
        let Ok(r) = summarize(&d, &[ab.clone(), ba]) else { return Ok(()); };
        prop_assert_eq!(r[0].to_bits(), r[1].to_bits());
        let moved = data(a.iter().map(|v| scale * v + shift).collect(), b);
        let r2 = summarize(&moved, &[ab]).unwrap();
        prop_assert!((r[0] - r2[0]).abs() < 1e-8);
    }

    #[test]
    fn pooling_ignores_chain_order(chains in prop::collection::vec(prop::collection::vec(-5.0..5.0f64, 3), 1..8)) {
        let forward = pool(&chains).unwrap();
        let mut rev = chains.clone();
        rev.reverse();
        let backward = pool(&rev).unwrap();
        for (f, b) in forward.iter().zip(&backward) {
            prop_assert!((f - b).abs() < 1e-12);
        }
        let lo = chains.iter().map(|c| c[0]).fold(f64::INFINITY, f64::min);
        let hi = chains.iter().map(|c| c[0]).fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(forward[0] >= lo - 1e-12 && forward[0] <= hi + 1e-12);
    }
}

#[test]
fn constant_column_and_edge_cases() {
    let d = data(vec![3.0; 4], vec![1.0, 2.0, 3.0, 4.0]);
    let s = summarize(&d, &[StatisticId::mean(id("A")), StatisticId::sd(id("A"))]).unwrap();
    assert_eq!(s, vec![3.0, 0.0]);
    assert!(summarize(&d, &[StatisticId::corr(id("A"), id("B")).unwrap()]).is_err());
    assert!(StatisticId::corr(id("A"), id("A")).is_err());
    assert!(pool(&[]).is_err());
    assert_eq!(pool(&[vec![0.9], vec![1.1]]).unwrap()[0], 1.0);
    let one = data(vec![1.0], vec![2.0]);
    assert!(summarize(&one, &[StatisticId::sd(id("A"))]).is_err());
}
