//! Pairwise variable similarity estimated from a population.

use alloc::vec;
use alloc::vec::Vec;

use libm::{log, sqrt};

/// Symmetric `ell x ell` similarity matrix; the diagonal is unused.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SimilarityMatrix {
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            data: vec![0.0; n * n],
        }
    }

    /// Builds a matrix from a pairwise function evaluated on `u < v`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for u in 0..n {
            for v in u + 1..n {
                m.set(u, v, f(u, v));
            }
        }
        m
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, u: usize, v: usize) -> f64 {
        self.data[u * self.n + v]
    }

    #[inline]
    pub fn set(&mut self, u: usize, v: usize, value: f64) {
        self.data[u * self.n + v] = value;
        self.data[v * self.n + u] = value;
    }
}

/// Similarity measure for learned linkage trees over discrete populations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SimilarityMeasure {
    /// Mutual information, in nats.
    MutualInformation,
    /// Mutual information divided by the joint entropy (0/0 taken as 0).
    NormalizedMutualInformation,
}

fn plogp(count: usize, total: f64) -> f64 {
    if count == 0 {
        0.0
    } else {
        let p = count as f64 / total;
        -p * log(p)
    }
}

/// Empirical entropy (nats) of each binary variable.
pub fn entropies(population: &[&[u8]], ell: usize) -> Vec<f64> {
    let n = population.len() as f64;
    (0..ell)
        .map(|u| {
            let ones = population.iter().filter(|x| x[u] == 1).count();
            plogp(ones, n) + plogp(population.len() - ones, n)
        })
        .collect()
}

/// Estimates pairwise MI or NMI from binary genotypes.
pub fn estimate_similarity(population: &[&[u8]], ell: usize, measure: SimilarityMeasure) -> SimilarityMatrix {
    let n = population.len();
    let total = n as f64;
    let h = entropies(population, ell);
    let mut m = SimilarityMatrix::zeros(ell);
    for u in 0..ell {
        for v in u + 1..ell {
            let mut counts = [0usize; 4];
            for x in population {
                counts[(x[u] as usize) * 2 + x[v] as usize] += 1;
            }
            let joint: f64 = counts.iter().map(|&c| plogp(c, total)).sum();
            let mi = (h[u] + h[v] - joint).max(0.0);
            let s = match measure {
                SimilarityMeasure::MutualInformation => mi,
                SimilarityMeasure::NormalizedMutualInformation => {
                    if joint > 0.0 {
                        (mi / joint).min(1.0)
                    } else {
                        0.0
                    }
                }
            };
            m.set(u, v, s);
        }
    }
    m
}

/// Absolute Pearson correlation between real-valued variables; 0 when
/// either variable has no variance.
pub fn absolute_correlation(population: &[&[f64]], ell: usize) -> SimilarityMatrix {
    let n = population.len() as f64;
    let mean: Vec<f64> = (0..ell)
        .map(|u| population.iter().map(|x| x[u]).sum::<f64>() / n)
        .collect();
    let sd: Vec<f64> = (0..ell)
        .map(|u| sqrt(population.iter().map(|x| (x[u] - mean[u]) * (x[u] - mean[u])).sum::<f64>()))
        .collect();
    SimilarityMatrix::from_fn(ell, |u, v| {
        if sd[u] == 0.0 || sd[v] == 0.0 {
            return 0.0;
        }
        let cov: f64 = population.iter().map(|x| (x[u] - mean[u]) * (x[v] - mean[v])).sum();
        (cov / (sd[u] * sd[v])).abs().min(1.0)
    })
}
