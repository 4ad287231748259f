//! Explicit probability tables over binary substantive variables and their response indicators.

use std::collections::HashMap;

/// A distribution over `k` binary variables and their `k` indicators.
///
/// Cell index is `values | (r << k)`: bit `i` of `values` is variable `i`, bit `i` of `r`
/// is its indicator (1 = observed).
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryLaw {
    pub k: usize,
    pub p: Vec<f64>,
}

impl BinaryLaw {
    pub fn cell(&self, values: usize, r: usize) -> f64 {
        self.p[values | (r << self.k)]
    }

    /// The observed-data law: each cell mass moves to the cell whose unobserved values are
    /// zeroed, so cells with a missing variable set to 1 end up empty.
    pub fn observed(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.p.len()];
        for r in 0..1usize << self.k {
            for values in 0..1usize << self.k {
                out[(values & r) | (r << self.k)] += self.cell(values, r);
            }
        }
        out
    }

    pub fn total(&self) -> f64 {
        self.p.iter().sum()
    }

    /// `p(values)`, summing out the indicators.
    pub fn target(&self) -> Vec<f64> {
        (0..1usize << self.k)
            .map(|v| (0..1usize << self.k).map(|r| self.cell(v, r)).sum())
            .collect()
    }
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

fn bern(p1: f64, v: usize) -> f64 {
    if v == 1 {
        p1
    } else {
        1.0 - p1
    }
}

/// Parameters of binary X -> Y, X -> R_Y, R_X -> R_Y (variable 0 is X, variable 1 is Y).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoVariableModel {
    pub p_x: f64,
    /// `P(Y = 1 | X = x)`.
    pub p_y: [f64; 2],
    pub p_rx: f64,
    /// `P(R_Y = 1 | X = x, R_X = r)` at `[x][r]`.
    pub p_ry: [[f64; 2]; 2],
}

impl TwoVariableModel {
    pub fn full_law(&self) -> BinaryLaw {
        let mut p = vec![0.0; 16];
        for x in 0..2 {
            for y in 0..2 {
                for rx in 0..2 {
                    for ry in 0..2 {
                        p[(x | (y << 1)) | ((rx | (ry << 1)) << 2)] = bern(self.p_x, x)
                            * bern(self.p_y[x], y)
                            * bern(self.p_rx, rx)
                            * bern(self.p_ry[x][rx], ry);
                    }
                }
            }
        }
        BinaryLaw { k: 2, p }
    }

    /// Every model with each parameter drawn from `grid`; when `collude` is false the
    /// response of Y ignores R_X.
    pub fn grid(grid: &[f64], collude: bool) -> Vec<TwoVariableModel> {
        let mut out = Vec::new();
        let g = grid;
        for &p_x in g {
            for &y0 in g {
                for &y1 in g {
                    for &p_rx in g {
                        for &a in g {
                            for &b in g {
                                if collude {
                                    for &c in g {
                                        for &d in g {
                                            out.push(TwoVariableModel {
                                                p_x,
                                                p_y: [y0, y1],
                                                p_rx,
                                                p_ry: [[a, b], [c, d]],
                                            });
                                        }
                                    }
                                } else {
                                    out.push(TwoVariableModel {
                                        p_x,
                                        p_y: [y0, y1],
                                        p_rx,
                                        p_ry: [[a, a], [b, b]],
                                    });
                                }
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

/// Two full laws whose observed laws agree to `tol` while the full laws differ by more
/// than `min_gap` in some cell. Observed laws are bucketed after rounding to `tol`, so
/// near-boundary pairs may be missed; the returned pair is always rechecked exactly.
pub fn find_observational_twins(
    laws: &[BinaryLaw],
    tol: f64,
    min_gap: f64,
) -> Option<(usize, usize)> {
    let mut buckets: HashMap<Vec<i64>, Vec<usize>> = HashMap::new();
    for (i, law) in laws.iter().enumerate() {
        let key = law
            .observed()
            .iter()
            .map(|v| (v / tol).round() as i64)
            .collect();
        buckets.entry(key).or_default().push(i);
    }
    let mut keys: Vec<_> = buckets.keys().cloned().collect();
    keys.sort();
    for key in keys {
        let members = &buckets[&key];
        for (n, &i) in members.iter().enumerate() {
            for &j in &members[n + 1..] {
                let obs = max_abs_diff(&laws[i].observed(), &laws[j].observed());
                let full = max_abs_diff(&laws[i].p, &laws[j].p);
                if obs <= tol && full > min_gap {
                    return Some((i, j));
                }
            }
        }
    }
    None
}

/// Rebuilds the full law from the observed law of a model on X -> Y, X -> R_Y (no
/// colluding edge) by `p(Y | X, R = 11) p(R_Y | X, R_X = 1) p(X | R_X = 1) p(R_X)`.
pub fn reconstruct_without_collusion(observed: &[f64]) -> BinaryLaw {
    let o = |x: usize, y: usize, rx: usize, ry: usize| {
        observed[(x | (y << 1)) | ((rx | (ry << 1)) << 2)]
    };
    let p_rx1: f64 = (0..16)
        .filter(|i| (i >> 2) & 1 == 1)
        .map(|i| observed[i])
        .sum();
    // p(X = x, R_X = 1)
    let px_rx1 = |x: usize| o(x, 0, 1, 1) + o(x, 1, 1, 1) + o(x, 0, 1, 0);
    let mut p = vec![0.0; 16];
    for x in 0..2 {
        let p_x = px_rx1(x) / p_rx1;
        let both = o(x, 0, 1, 1) + o(x, 1, 1, 1);
        let p_ry1 = both / px_rx1(x);
        for y in 0..2 {
            let p_y = o(x, y, 1, 1) / both;
            for rx in 0..2 {
                for ry in 0..2 {
                    let prx = if rx == 1 { p_rx1 } else { 1.0 - p_rx1 };
                    let pry = if ry == 1 { p_ry1 } else { 1.0 - p_ry1 };
                    p[(x | (y << 1)) | ((rx | (ry << 1)) << 2)] = p_y * pry * p_x * prx;
                }
            }
        }
    }
    BinaryLaw { k: 2, p }
}
