//! Graph Fourier analysis on the normalized Laplacian.
//!
//! The dense path ([`dense_eigendecompose`], [`gft`], [`apply_spectral_filter`])
//! exists for analysis and as an oracle for the sparse polynomial path
//! ([`apply_spatial_filter`]), which is what the model uses. For a polynomial
//! response `g(λ) = Σ_k θ_k λ^k` the two agree exactly in exact arithmetic:
//!
//! ```text
//! U g(Λ) Uᵀ x = Σ_k θ_k L^k x
//! ```

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::{connected_components, degrees, laplacian_matvec, DegreeVector, NormalizedLaplacian, SparseAdjacency};
use crate::tensor::DenseMatrix;

pub const DEFAULT_DENSE_CAP: usize = 4096;

/// Eigenpairs of the normalized Laplacian, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenBasis {
    pub lambdas: Vec<f64>,
    /// `n × n`, column `i` is the eigenvector of `lambdas[i]`.
    pub u: DenseMatrix,
}

impl EigenBasis {
    pub fn n(&self) -> usize {
        self.lambdas.len()
    }

    pub fn eigenvector(&self, i: usize) -> Vec<f64> {
        self.u.col_vec(i)
    }
}

/// Dense eigendecomposition with the default size cap.
pub fn dense_eigendecompose(adj: &SparseAdjacency) -> Result<EigenBasis> {
    dense_eigendecompose_capped(adj, DEFAULT_DENSE_CAP)
}

/// Dense eigendecomposition of `L`, refusing graphs larger than `cap`.
///
/// `L` is block diagonal over connected components, so each component is
/// solved on its own and the eigenvectors are embedded back into `n`
/// dimensions. Ties in eigenvalue keep component order. Each eigenvector is
/// sign-normalised so that its largest-magnitude entry is positive.
pub fn dense_eigendecompose_capped(adj: &SparseAdjacency, cap: usize) -> Result<EigenBasis> {
    let n = adj.n_nodes();
    if n > cap {
        return Err(Error::GraphTooLarge { n_nodes: n, cap });
    }
    let deg = degrees(adj);
    let comps = connected_components(adj).members();

    let mut pairs: Vec<(f64, Vec<(usize, f64)>)> = Vec::with_capacity(n);
    let mut local = vec![usize::MAX; n];
    for members in &comps {
        let m = members.len();
        if m == 1 {
            pairs.push((1.0, vec![(members[0], 1.0)]));
            continue;
        }
        for (k, &g) in members.iter().enumerate() {
            local[g] = k;
        }
        let mut dense = DMatrix::<f64>::identity(m, m);
        for (k, &g) in members.iter().enumerate() {
            let (nbrs, weights) = adj.row(g);
            for (&j, &w) in nbrs.iter().zip(weights) {
                dense[(k, local[j])] -= w * (deg.d_inv_sqrt[g] * deg.d_inv_sqrt[j]);
            }
        }
        let eig = SymmetricEigen::new(dense);
        for c in 0..m {
            let col = eig.eigenvectors.column(c);
            let mut pivot = 0;
            for r in 1..m {
                if col[r].abs() > col[pivot].abs() {
                    pivot = r;
                }
            }
            let sign = if col[pivot] < 0.0 { -1.0 } else { 1.0 };
            let entries = members
                .iter()
                .enumerate()
                .map(|(k, &g)| (g, sign * col[k]))
                .collect();
            pairs.push((eig.eigenvalues[c], entries));
        }
    }
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));

    let mut u = DenseMatrix::zeros(n, n);
    let mut lambdas = Vec::with_capacity(n);
    for (col, (lambda, entries)) in pairs.into_iter().enumerate() {
        lambdas.push(lambda);
        for (row, v) in entries {
            u.set(row, col, v);
        }
    }
    Ok(EigenBasis { lambdas, u })
}

fn check_len(expected: usize, actual: usize) -> Result<()> {
    if expected != actual {
        return Err(Error::LengthMismatch { expected, actual });
    }
    Ok(())
}

/// Graph Fourier transform `x̂ = Uᵀ x`.
pub fn gft(basis: &EigenBasis, x: &[f64]) -> Result<Vec<f64>> {
    check_len(basis.n(), x.len())?;
    let n = basis.n();
    let mut out = vec![0.0; n];
    for (r, &xr) in x.iter().enumerate() {
        if xr == 0.0 {
            continue;
        }
        for (o, &u) in out.iter_mut().zip(basis.u.row(r)) {
            *o += u * xr;
        }
    }
    Ok(out)
}

/// Inverse transform `x = U x̂`.
pub fn igft(basis: &EigenBasis, xhat: &[f64]) -> Result<Vec<f64>> {
    check_len(basis.n(), xhat.len())?;
    Ok((0..basis.n())
        .map(|r| basis.u.row(r).iter().zip(xhat).map(|(u, c)| u * c).sum())
        .collect())
}

/// Monomial filter coefficients `θ_0 … θ_{K-1}` of `g(λ) = Σ_k θ_k λ^k`.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterCoefficients {
    theta: Vec<f64>,
}

impl FilterCoefficients {
    pub fn new(theta: Vec<f64>) -> Result<Self> {
        if theta.is_empty() {
            return Err(Error::InvalidConfig("filter needs at least one coefficient".into()));
        }
        Ok(FilterCoefficients { theta })
    }

    /// `θ = e_{K-1}`: the pure power `L^{K-1}`. For `K = 1` this is the identity.
    pub fn pure_power(k: usize) -> Result<Self> {
        if k == 0 {
            return Err(Error::InvalidConfig("K must be at least 1".into()));
        }
        let mut theta = vec![0.0; k];
        theta[k - 1] = 1.0;
        Ok(FilterCoefficients { theta })
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Filter order `K`.
    pub fn order(&self) -> usize {
        self.theta.len()
    }

    /// `g(λ)` by Horner's rule.
    pub fn response(&self, lambda: f64) -> f64 {
        self.theta.iter().rev().fold(0.0, |acc, &t| acc * lambda + t)
    }
}

/// `y = U g(Λ) Uᵀ x`.
pub fn apply_spectral_filter(basis: &EigenBasis, coeffs: &FilterCoefficients, x: &[f64]) -> Result<Vec<f64>> {
    let mut xhat = gft(basis, x)?;
    for (c, &lambda) in xhat.iter_mut().zip(&basis.lambdas) {
        *c *= coeffs.response(lambda);
    }
    igft(basis, &xhat)
}

/// `y = Σ_k θ_k L^k x` using `K - 1` sparse Laplacian products.
pub fn apply_spatial_filter(
    adj: &SparseAdjacency,
    deg: &DegreeVector,
    coeffs: &FilterCoefficients,
    x: &[f64],
) -> Result<Vec<f64>> {
    check_len(adj.n_nodes(), x.len())?;
    let theta = coeffs.theta();
    let mut y: Vec<f64> = x.iter().map(|v| theta[0] * v).collect();
    let mut power = x.to_vec();
    for &t in &theta[1..] {
        power = laplacian_matvec(adj, deg, &power)?;
        for (yi, p) in y.iter_mut().zip(&power) {
            *yi += t * p;
        }
    }
    Ok(y)
}

/// Same as [`apply_spatial_filter`] with a prebuilt operator.
pub fn apply_spatial_filter_with(lap: &NormalizedLaplacian, coeffs: &FilterCoefficients, x: &[f64]) -> Result<Vec<f64>> {
    apply_spatial_filter(lap.adjacency(), lap.degrees(), coeffs, x)
}

/// `h(λ) = Σ_k θ_k λ^k` on every grid point.
pub fn frequency_response(coeffs: &FilterCoefficients, lambda_grid: &[f64]) -> Vec<f64> {
    lambda_grid.iter().map(|&l| coeffs.response(l)).collect()
}

/// Gaussian band-pass `h(λ) = exp(-(λ - center)² / 2σ²)`, the comparison
/// response for spectrum plots.
pub fn bandpass_response(center: f64, sigma: f64, lambda_grid: &[f64]) -> Vec<f64> {
    lambda_grid
        .iter()
        .map(|&l| (-(l - center).powi(2) / (2.0 * sigma * sigma)).exp())
        .collect()
}

/// Per-frequency decomposition of one signal.
#[derive(Debug, Clone)]
pub struct SpectrumReport {
    pub lambdas: Vec<f64>,
    /// `x̂_i`, signed.
    pub coefficients: Vec<f64>,
    pub cutoff: f64,
    /// `Σ x̂_i²`.
    pub total_energy: f64,
    /// Fraction of energy at `λ_i > cutoff`.
    pub energy_above: f64,
    /// Set when the signal is identically zero; `energy_above` is then 0.
    pub zero_signal: bool,
}

impl SpectrumReport {
    pub fn magnitudes(&self) -> Vec<f64> {
        self.coefficients.iter().map(|c| c.abs()).collect()
    }

    /// Energy fraction above another cutoff, from the same coefficients.
    pub fn energy_above(&self, cutoff: f64) -> f64 {
        energy_fraction_above(&self.lambdas, &self.coefficients, cutoff)
    }
}

fn energy_fraction_above(lambdas: &[f64], coefficients: &[f64], cutoff: f64) -> f64 {
    let total: f64 = coefficients.iter().map(|c| c * c).sum();
    if total == 0.0 {
        return 0.0;
    }
    let above: f64 = lambdas
        .iter()
        .zip(coefficients)
        .filter(|(&l, _)| l > cutoff)
        .map(|(_, c)| c * c)
        .sum();
    above / total
}

pub fn spectral_energy_profile(basis: &EigenBasis, x: &[f64], cutoff: f64) -> Result<SpectrumReport> {
    if !(0.0..=2.0).contains(&cutoff) {
        return Err(Error::InvalidConfig(format!("cutoff {cutoff} outside [0, 2]")));
    }
    let coefficients = gft(basis, x)?;
    let total_energy = coefficients.iter().map(|c| c * c).sum();
    let energy_above = energy_fraction_above(&basis.lambdas, &coefficients, cutoff);
    Ok(SpectrumReport {
        lambdas: basis.lambdas.clone(),
        coefficients,
        cutoff,
        total_energy,
        energy_above,
        zero_signal: x.iter().all(|&v| v == 0.0),
    })
}
