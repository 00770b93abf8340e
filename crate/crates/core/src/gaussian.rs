//! Multivariate normal models over linkage sets, with conditioning on
//! variables outside the set.

use alloc::vec;
use alloc::vec::Vec;

use libm::sqrt;
use rand::Rng;
use rand_distr::StandardNormal;

/// Diagonal regularization scale, relative to `1 + trace / dim`.
pub const REGULARIZATION: f64 = 1e-12;

/// Maximum-likelihood mean and covariance (row-major, `dim x dim`).
#[derive(Debug, Clone, PartialEq)]
pub struct MeanCovariance {
    pub mean: Vec<f64>,
    pub covariance: Vec<f64>,
}

impl MeanCovariance {
    /// ML estimate over `samples` restricted to `variables`.
    pub fn estimate(samples: &[&[f64]], variables: &[usize]) -> Self {
        let d = variables.len();
        let n = samples.len() as f64;
        let mut mean = vec![0.0; d];
        for x in samples {
            for (m, &v) in mean.iter_mut().zip(variables) {
                *m += x[v];
            }
        }
        mean.iter_mut().for_each(|m| *m /= n);
        let mut covariance = vec![0.0; d * d];
        for x in samples {
            for i in 0..d {
                let di = x[variables[i]] - mean[i];
                for j in 0..=i {
                    covariance[i * d + j] += di * (x[variables[j]] - mean[j]);
                }
            }
        }
        for i in 0..d {
            for j in 0..=i {
                let c = covariance[i * d + j] / n;
                covariance[i * d + j] = c;
                covariance[j * d + i] = c;
            }
        }
        Self { mean, covariance }
    }

    pub fn dim(&self) -> usize {
        self.mean.len()
    }
}

/// In-place lower Cholesky factor of a symmetric `d x d` matrix. Returns
/// false if the matrix is not positive definite.
pub fn cholesky(a: &mut [f64], d: usize) -> bool {
    for j in 0..d {
        let mut s = a[j * d + j];
        for k in 0..j {
            s -= a[j * d + k] * a[j * d + k];
        }
        if !(s > 0.0) || !s.is_finite() {
            return false;
        }
        let l = sqrt(s);
        a[j * d + j] = l;
        for i in j + 1..d {
            let mut s = a[i * d + j];
            for k in 0..j {
                s -= a[i * d + k] * a[j * d + k];
            }
            a[i * d + j] = s / l;
        }
        for k in j + 1..d {
            a[j * d + k] = 0.0;
        }
    }
    true
}

/// Cholesky factor after adding `eps (1 + trace/d)` to the diagonal,
/// growing `eps` tenfold until the factorization succeeds.
pub fn regularized_cholesky(matrix: &[f64], d: usize) -> Vec<f64> {
    if d == 0 {
        return Vec::new();
    }
    let trace: f64 = (0..d).map(|i| matrix[i * d + i]).sum();
    let scale = 1.0 + (trace / d as f64).abs();
    let mut eps = REGULARIZATION;
    loop {
        let mut l = matrix.to_vec();
        for i in 0..d {
            l[i * d + i] += eps * scale;
        }
        if cholesky(&mut l, d) {
            return l;
        }
        eps *= 10.0;
        if !eps.is_finite() || eps > 1e300 {
            // degenerate input (NaN); fall back to the regularizer alone
            let mut l = vec![0.0; d * d];
            for i in 0..d {
                l[i * d + i] = sqrt(REGULARIZATION * scale);
            }
            return l;
        }
    }
}

/// Solves `L L^T x = b` in place given the lower factor `L`.
fn cholesky_solve(l: &[f64], d: usize, b: &mut [f64]) {
    for i in 0..d {
        let mut s = b[i];
        for k in 0..i {
            s -= l[i * d + k] * b[k];
        }
        b[i] = s / l[i * d + i];
    }
    for i in (0..d).rev() {
        let mut s = b[i];
        for k in i + 1..d {
            s -= l[k * d + i] * b[k];
        }
        b[i] = s / l[i * d + i];
    }
}

/// Normal law of `variables` given `conditioning`:
/// `x_A | x_B ~ N(mu_A + K (x_B - mu_B), S)` with `K = C_AB C_BB^-1` and
/// `S = C_AA - K C_BA`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConditionalGaussian {
    pub variables: Vec<usize>,
    pub conditioning: Vec<usize>,
    mean: Vec<f64>,
    conditioning_mean: Vec<f64>,
    /// `|A| x |B|`, row-major.
    regression: Vec<f64>,
    /// Lower Cholesky factor of the conditional covariance.
    factor: Vec<f64>,
}

impl ConditionalGaussian {
    /// Estimates the joint ML model over `variables ∪ conditioning` from
    /// `samples` and conditions it.
    pub fn estimate(samples: &[&[f64]], variables: &[usize], conditioning: &[usize]) -> Self {
        let mut all = variables.to_vec();
        all.extend_from_slice(conditioning);
        let joint = MeanCovariance::estimate(samples, &all);
        Self::from_joint(&joint, variables.to_vec(), conditioning.to_vec())
    }

    /// Conditions a joint model whose first `variables.len()` coordinates
    /// are the sampled variables and the rest the conditioning variables.
    pub fn from_joint(joint: &MeanCovariance, variables: Vec<usize>, conditioning: Vec<usize>) -> Self {
        let a = variables.len();
        let b = conditioning.len();
        let d = a + b;
        debug_assert_eq!(joint.dim(), d);
        let c = |i: usize, j: usize| joint.covariance[i * d + j];

        let mut regression = vec![0.0; a * b];
        let mut conditional = vec![0.0; a * a];
        for i in 0..a {
            for j in 0..a {
                conditional[i * a + j] = c(i, j);
            }
        }
        if b > 0 {
            let mut cbb = vec![0.0; b * b];
            for i in 0..b {
                for j in 0..b {
                    cbb[i * b + j] = c(a + i, a + j);
                }
            }
            let lbb = regularized_cholesky(&cbb, b);
            let mut row = vec![0.0; b];
            for i in 0..a {
                for j in 0..b {
                    row[j] = c(i, a + j);
                }
                cholesky_solve(&lbb, b, &mut row);
                regression[i * b..(i + 1) * b].copy_from_slice(&row);
            }
            for i in 0..a {
                for j in 0..a {
                    let mut s = 0.0;
                    for k in 0..b {
                        s += regression[i * b + k] * c(a + k, j);
                    }
                    conditional[i * a + j] -= s;
                }
            }
            // symmetrize against rounding
            for i in 0..a {
                for j in 0..i {
                    let m = 0.5 * (conditional[i * a + j] + conditional[j * a + i]);
                    conditional[i * a + j] = m;
                    conditional[j * a + i] = m;
                }
            }
        }
        let factor = regularized_cholesky(&conditional, a);
        Self {
            variables,
            conditioning,
            mean: joint.mean[..a].to_vec(),
            conditioning_mean: joint.mean[a..].to_vec(),
            regression,
            factor,
        }
    }

    pub fn dim(&self) -> usize {
        self.variables.len()
    }

    /// Conditional mean given the conditioning values found in `genotype`.
    pub fn conditional_mean(&self, genotype: &[f64], out: &mut Vec<f64>) {
        let b = self.conditioning.len();
        out.clear();
        for i in 0..self.variables.len() {
            let mut m = self.mean[i];
            for k in 0..b {
                m += self.regression[i * b + k] * (genotype[self.conditioning[k]] - self.conditioning_mean[k]);
            }
            out.push(m);
        }
    }

    /// Draws the set's variables, reading conditioning values from
    /// `genotype`, with the covariance scaled by `multiplier^2`. Values are
    /// written to `out` in the order of `variables`. Returns the norm of the
    /// standard-normal draw.
    pub fn sample<R: Rng + ?Sized>(
        &self,
        genotype: &[f64],
        multiplier: f64,
        rng: &mut R,
        out: &mut Vec<f64>,
        z: &mut Vec<f64>,
    ) -> f64 {
        let a = self.variables.len();
        self.conditional_mean(genotype, out);
        z.clear();
        z.extend((0..a).map(|_| rng.sample::<f64, _>(StandardNormal)));
        for i in 0..a {
            let mut s = 0.0;
            for k in 0..=i {
                s += self.factor[i * a + k] * z[k];
            }
            out[i] += multiplier * s;
        }
        sqrt(z.iter().map(|v| v * v).sum())
    }
}
