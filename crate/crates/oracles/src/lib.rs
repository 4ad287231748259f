//! Slow, obviously-correct reference computations used only by tests.
//!
//! Nothing here shares code with `mdimp-core`: graphs are plain edge lists, distributions
//! are explicit probability tables, and Gaussian integrals are done by quadrature.

pub mod binary;

use std::collections::BTreeSet;

/// d-separation by enumerating every simple path between `a` and `b` in the skeleton.
///
/// A path is open when each interior collider has itself or a descendant in `given` and
/// each interior non-collider is outside `given`. Exponential, fine for a handful of nodes.
pub fn d_separated_by_paths(
    n: usize,
    edges: &[(usize, usize)],
    a: &[usize],
    b: &[usize],
    given: &[usize],
) -> bool {
    let edge_set: BTreeSet<(usize, usize)> = edges.iter().copied().collect();
    let z: BTreeSet<usize> = given.iter().copied().collect();
    let mut neighbours = vec![Vec::new(); n];
    for &(p, c) in edges {
        neighbours[p].push(c);
        neighbours[c].push(p);
    }
    let desc: Vec<BTreeSet<usize>> = (0..n).map(|v| descendants(n, edges, v)).collect();
    let collider_open = |v: usize| desc[v].iter().any(|d| z.contains(d));

    for &s in a {
        for &t in b {
            if s == t {
                return false;
            }
            let mut path = vec![s];
            if open_path_exists(&mut path, t, &neighbours, &edge_set, &z, &collider_open) {
                return false;
            }
        }
    }
    true
}

fn open_path_exists(
    path: &mut Vec<usize>,
    target: usize,
    neighbours: &[Vec<usize>],
    edges: &BTreeSet<(usize, usize)>,
    z: &BTreeSet<usize>,
    collider_open: &dyn Fn(usize) -> bool,
) -> bool {
    let last = *path.last().unwrap();
    if last == target {
        return path_is_open(path, edges, z, collider_open);
    }
    for &next in &neighbours[last] {
        if path.contains(&next) {
            continue;
        }
        path.push(next);
        let found = open_path_exists(path, target, neighbours, edges, z, collider_open);
        path.pop();
        if found {
            return true;
        }
    }
    false
}

fn path_is_open(
    path: &[usize],
    edges: &BTreeSet<(usize, usize)>,
    z: &BTreeSet<usize>,
    collider_open: &dyn Fn(usize) -> bool,
) -> bool {
    path.windows(3).all(|w| {
        let (prev, mid, next) = (w[0], w[1], w[2]);
        let collider = edges.contains(&(prev, mid)) && edges.contains(&(next, mid));
        if collider {
            collider_open(mid)
        } else {
            !z.contains(&mid)
        }
    })
}

/// `v` together with everything reachable from it along directed edges.
pub fn descendants(n: usize, edges: &[(usize, usize)], v: usize) -> BTreeSet<usize> {
    let mut seen = BTreeSet::from([v]);
    let mut stack = vec![v];
    while let Some(u) = stack.pop() {
        for &(p, c) in edges {
            if p == u && c < n && seen.insert(c) {
                stack.push(c);
            }
        }
    }
    seen
}

/// Covariance matrix of a linear-Gaussian SEM `x = B x + e`, `Var(e) = diag(noise_var)`,
/// computed as `(I - B)^-1 D (I - B)^-T` with Gauss-Jordan inversion.
///
/// `coef[i][j]` is the coefficient of variable `j` in the equation for variable `i`.
pub fn sem_covariance(coef: &[Vec<f64>], noise_var: &[f64]) -> Vec<Vec<f64>> {
    let n = coef.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| f64::from(u8::from(i == j)) - coef[i][j])
                .collect()
        })
        .collect();
    let inv = invert(&mut a);
    let mut cov = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            cov[i][j] = (0..n).map(|k| inv[i][k] * noise_var[k] * inv[j][k]).sum();
        }
    }
    cov
}

/// Means of a linear SEM with intercepts: `(I - B)^-1 c`.
pub fn sem_means(coef: &[Vec<f64>], intercepts: &[f64]) -> Vec<f64> {
    let n = coef.len();
    let mut a: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| f64::from(u8::from(i == j)) - coef[i][j])
                .collect()
        })
        .collect();
    let inv = invert(&mut a);
    (0..n)
        .map(|i| (0..n).map(|k| inv[i][k] * intercepts[k]).sum())
        .collect()
}

fn invert(a: &mut [Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let mut inv: Vec<Vec<f64>> = (0..n)
        .map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect())
        .collect();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-14, "singular matrix");
        for j in 0..n {
            a[col][j] /= p;
            inv[col][j] /= p;
        }
        for row in 0..n {
            if row != col {
                let f = a[row][col];
                for j in 0..n {
                    a[row][j] -= f * a[col][j];
                    inv[row][j] -= f * inv[col][j];
                }
            }
        }
    }
    inv
}

/// Standard normal density.
pub fn phi(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// `E f(Z)` for `Z ~ N(0, 1)`, composite Simpson's rule on [-12, 12].
pub fn normal_expectation(f: impl Fn(f64) -> f64) -> f64 {
    let steps = 24_000;
    let h = 24.0 / steps as f64;
    let mut sum = 0.0;
    for i in 0..=steps {
        let x = -12.0 + i as f64 * h;
        let w = if i == 0 || i == steps {
            1.0
        } else if i % 2 == 1 {
            4.0
        } else {
            2.0
        };
        sum += w * f(x) * phi(x);
    }
    sum * h / 3.0
}

pub fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Divisor `n - 1`.
pub fn sample_sd(xs: &[f64]) -> f64 {
    let m = mean(xs);
    (xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64).sqrt()
}

pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    let (mx, my) = (mean(xs), mean(ys));
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my).powi(2)).sum();
    sxy / (sxx * syy).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn collider_and_chain() {
        // 0 -> 2 <- 1, 2 -> 3
        let e = [(0, 2), (1, 2), (2, 3)];
        assert!(d_separated_by_paths(4, &e, &[0], &[1], &[]));
        assert!(!d_separated_by_paths(4, &e, &[0], &[1], &[2]));
        assert!(!d_separated_by_paths(4, &e, &[0], &[1], &[3]));
        assert!(d_separated_by_paths(4, &e, &[0], &[3], &[2]));
    }

    #[test]
    fn quadrature_moments() {
        assert!((normal_expectation(|_| 1.0) - 1.0).abs() < 1e-12);
        assert!((normal_expectation(|x| x * x) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sem_covariance_of_a_chain() {
        // y = 2 x + e, var(x) = 1, var(e) = 3
        let c = sem_covariance(&[vec![0.0, 0.0], vec![2.0, 0.0]], &[1.0, 3.0]);
        assert!((c[1][1] - 7.0).abs() < 1e-12);
        assert!((c[0][1] - 2.0).abs() < 1e-12);
        let m = sem_means(&[vec![0.0, 0.0], vec![2.0, 0.0]], &[1.0, 0.5]);
        assert!((m[1] - 2.5).abs() < 1e-12);
    }
}
