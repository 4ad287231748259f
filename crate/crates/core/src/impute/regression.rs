//! Least-squares fits and posterior draws for the Bayesian linear model used by the
//! `norm` imputation method.

use alloc::vec::Vec;

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rand::Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};

use super::ImputeError;

/// Relative ridge added to the Gram diagonal when the design is rank deficient.
pub const RIDGE_JITTER: f64 = 1e-8;

/// Dense row-major design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Design {
    n_cols: usize,
    data: Vec<f64>,
}

impl Design {
    pub fn new(n_cols: usize) -> Self {
        Design {
            n_cols,
            data: Vec::new(),
        }
    }

    pub fn with_capacity(n_cols: usize, rows: usize) -> Self {
        Design {
            n_cols,
            data: Vec::with_capacity(n_cols * rows),
        }
    }

    pub fn from_rows(n_cols: usize, rows: &[Vec<f64>]) -> Self {
        let mut d = Design::with_capacity(n_cols, rows.len());
        for r in rows {
            d.push_row(r);
        }
        d
    }

    pub fn push_row(&mut self, row: &[f64]) {
        assert_eq!(row.len(), self.n_cols, "design row has wrong width");
        self.data.extend_from_slice(row);
    }

    pub fn n_rows(&self) -> usize {
        self.data.len().checked_div(self.n_cols).unwrap_or(0)
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n_cols..(i + 1) * self.n_cols]
    }
}

/// One draw of regression parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionDraw {
    pub coefficients: Vec<f64>,
    /// Non-negative; zero only for an exact fit.
    pub residual_sd: f64,
}

impl RegressionDraw {
    pub fn predict(&self, x: &[f64]) -> f64 {
        self.coefficients.iter().zip(x).map(|(b, v)| b * v).sum()
    }

    /// `x·β + N(0, σ²)`.
    pub fn sample<R: Rng + ?Sized>(&self, x: &[f64], rng: &mut R) -> f64 {
        let z: f64 = rng.sample(StandardNormal);
        self.predict(x) + self.residual_sd * z
    }
}

/// Ordinary least-squares fit, kept with the Cholesky factor of the Gram matrix so that
/// posterior draws are cheap.
#[derive(Debug, Clone)]
pub struct LinearFit {
    coefficients: DVector<f64>,
    chol: Cholesky<f64, Dyn>,
    rss: f64,
    df: usize,
}

impl LinearFit {
    pub fn coefficients(&self) -> &[f64] {
        self.coefficients.as_slice()
    }

    pub fn residual_sum_of_squares(&self) -> f64 {
        self.rss
    }

    pub fn degrees_of_freedom(&self) -> usize {
        self.df
    }

    /// Point estimate: OLS coefficients and `sqrt(RSS / (n − q))`.
    pub fn point(&self) -> RegressionDraw {
        RegressionDraw {
            coefficients: self.coefficients.as_slice().to_vec(),
            residual_sd: libm::sqrt(self.rss / self.df as f64),
        }
    }

    /// Posterior draw under the flat prior: `σ² = RSS / χ²(n − q)`, then
    /// `β ~ N(β̂, σ² (XᵀX)⁻¹)`.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> RegressionDraw {
        let chi2 = ChiSquared::new(self.df as f64).expect("positive degrees of freedom");
        let sigma = libm::sqrt(self.rss / chi2.sample(rng));
        let q = self.coefficients.len();
        let z = DVector::from_iterator(q, (0..q).map(|_| rng.sample::<f64, _>(StandardNormal)));
        // (XᵀX)⁻¹ = L⁻ᵀ L⁻¹, so L⁻ᵀ z has the required covariance.
        let shift = self
            .chol
            .l()
            .transpose()
            .solve_upper_triangular(&z)
            .expect("Cholesky factor has a positive diagonal");
        RegressionDraw {
            coefficients: (&self.coefficients + shift * sigma).as_slice().to_vec(),
            residual_sd: sigma,
        }
    }
}

/// Least-squares fit of `response` on `design`. Falls back to a small ridge when the Gram
/// matrix is numerically singular.
pub fn ols(design: &Design, response: &[f64]) -> Result<LinearFit, ImputeError> {
    let (n, q) = (design.n_rows(), design.n_cols());
    assert_eq!(n, response.len(), "design and response lengths differ");
    if q == 0 || n < q + 2 {
        return Err(ImputeError::TooFewRows { rows: n, cols: q });
    }
    let mut gram = DMatrix::<f64>::zeros(q, q);
    let mut xty = DVector::<f64>::zeros(q);
    for (i, &y) in response.iter().enumerate() {
        let x = design.row(i);
        for a in 0..q {
            xty[a] += x[a] * y;
            for b in 0..=a {
                gram[(a, b)] += x[a] * x[b];
            }
        }
    }
    for a in 0..q {
        for b in 0..a {
            gram[(b, a)] = gram[(a, b)];
        }
    }

    let chol = match well_conditioned_cholesky(&gram) {
        Some(c) => c,
        None => {
            log::warn!("rank-deficient design ({n}×{q}); adding ridge {RIDGE_JITTER:e}");
            let mut ridged = gram.clone();
            for a in 0..q {
                let d = ridged[(a, a)];
                ridged[(a, a)] = d + RIDGE_JITTER * if d > 0.0 { d } else { 1.0 };
            }
            Cholesky::new(ridged).ok_or(ImputeError::SingularDesign)?
        }
    };
    let coefficients = chol.solve(&xty);
    let rss = response
        .iter()
        .enumerate()
        .map(|(i, &y)| {
            let fitted: f64 = design
                .row(i)
                .iter()
                .zip(coefficients.iter())
                .map(|(x, b)| x * b)
                .sum();
            (y - fitted) * (y - fitted)
        })
        .sum();
    Ok(LinearFit {
        coefficients,
        chol,
        rss,
        df: n - q,
    })
}

fn well_conditioned_cholesky(gram: &DMatrix<f64>) -> Option<Cholesky<f64, Dyn>> {
    let scale = gram.diagonal().iter().copied().fold(0.0_f64, f64::max);
    if scale <= 0.0 {
        return None;
    }
    let chol = Cholesky::new(gram.clone())?;
    let l = chol.l_dirty();
    let tiny = (0..gram.nrows()).any(|i| l[(i, i)] * l[(i, i)] < 1e-12 * scale);
    (!tiny).then_some(chol)
}

/// One posterior draw of the regression parameters.
pub fn bayes_linreg_draw<R: Rng + ?Sized>(
    design: &Design,
    response: &[f64],
    rng: &mut R,
) -> Result<RegressionDraw, ImputeError> {
    Ok(ols(design, response)?.draw(rng))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::Seed;
    use alloc::vec;

    #[test]
    fn too_few_rows() {
        let d = Design::from_rows(4, &[vec![1.0; 4], vec![2.0; 4], vec![3.0; 4]]);
        assert_eq!(
            bayes_linreg_draw(&d, &[1.0, 2.0, 3.0], &mut Seed(1).rng(0)).unwrap_err(),
            ImputeError::TooFewRows { rows: 3, cols: 4 }
        );
    }

    #[test]
    fn intercept_only_recovers_constant() {
        let mut rng = Seed(5).rng(0);
        let n = 10_000;
        let d = Design::from_rows(1, &vec![vec![1.0]; n]);
        let y: Vec<f64> = (0..n)
            .map(|_| 5.0 + 1e-6 * rng.sample::<f64, _>(StandardNormal))
            .collect();
        let draw = bayes_linreg_draw(&d, &y, &mut rng).unwrap();
        assert!((draw.coefficients[0] - 5.0).abs() < 0.01);
        assert!(draw.residual_sd < 1e-5);
    }

    #[test]
    fn duplicated_column_uses_ridge() {
        let rows: Vec<Vec<f64>> = (0..50).map(|i| vec![1.0, i as f64, i as f64]).collect();
        let y: Vec<f64> = (0..50).map(|i| 1.0 + 2.0 * i as f64).collect();
        let fit = ols(&Design::from_rows(3, &rows), &y).unwrap();
        let b = fit.coefficients();
        assert!((b[1] + b[2] - 2.0).abs() < 1e-4, "{b:?}");
    }
}
