//! Truncated harmonic basis, weighted Gram matrix, symmetric
//! orthonormalization and the truncated reproducing kernel `K^ω_z`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::PseudoDisk;
use crate::quadrature::{DiskQuadrature, Region};
use crate::symbol::{fill_harmonic_monomials, harmonic_monomials};
use crate::weights::{region_mass, Weight};

pub type CMatrix = DMatrix<Complex64>;
pub type CVector = DVector<Complex64>;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };
const MAX_CONDITION: f64 = 1e12;

/// Monomials `[1, z, .., z^N, conj z, .., conj z^N]`: the analytic block
/// first, then the conjugate block.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruncatedBasis {
    pub degree: usize,
}

impl TruncatedBasis {
    pub fn new(degree: usize) -> Self {
        Self { degree }
    }

    pub fn dim(&self) -> usize {
        2 * self.degree + 1
    }

    pub fn eval(&self, z: Complex64) -> CVector {
        CVector::from_vec(harmonic_monomials(self.degree, z))
    }

    /// Index of `z^n` (with `n = 0` the constant).
    pub fn analytic_index(&self, n: usize) -> usize {
        n
    }

    /// Index of `conj(z)^n` for `n >= 1`.
    pub fn conjugate_index(&self, n: usize) -> usize {
        debug_assert!(n >= 1);
        self.degree + n
    }

    /// Rows `sqrt(w_k c_k) m(z_k)^T` for a rule with per-node factors `c_k`;
    /// then `V^H V` is the Gram matrix of the monomials against `c dA`.
    pub(crate) fn design_matrix(&self, nodes: &[Complex64], scales: &[f64]) -> CMatrix {
        let d = self.dim();
        let mut v = CMatrix::zeros(nodes.len(), d);
        let mut row = vec![ZERO; d];
        for (k, (&z, &s)) in nodes.iter().zip(scales).enumerate() {
            fill_harmonic_monomials(self.degree, z, &mut row);
            let s = s.sqrt();
            for (j, m) in row.iter().enumerate() {
                v[(k, j)] = m * s;
            }
        }
        v
    }
}

/// Weighted Gram matrix `G[j,k] = <m_k, m_j>_{L²(ω)}` and, once
/// orthonormalized, the transform `Q = G^{-1/2}` with `Q^H G Q = I`.
#[derive(Debug, Clone)]
pub struct GramSystem {
    pub weight: Weight,
    pub basis: TruncatedBasis,
    pub gram: CMatrix,
    pub transform: Option<CMatrix>,
    pub condition_number: f64,
    pub min_eigenvalue: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SpaceReport {
    pub degree: usize,
    pub dimension: usize,
    pub condition_number: f64,
    pub min_eigenvalue: f64,
    pub gram_residual: f64,
    pub hermitian_defect: f64,
}

pub fn gram_matrix(basis: TruncatedBasis, w: &Weight, quad: &DiskQuadrature) -> Result<GramSystem> {
    if quad.radial_order < 2 * basis.degree + 2 {
        return Err(Error::Parameter(format!(
            "radial order {} cannot resolve degree {}; need at least {}",
            quad.radial_order,
            basis.degree,
            2 * basis.degree + 2
        )));
    }
    let scales: Vec<f64> = quad
        .iter()
        .map(|(z, lam)| Ok(lam * w.eval(z)?))
        .collect::<Result<_>>()?;
    let v = basis.design_matrix(&quad.nodes, &scales);
    let mut g = v.adjoint() * &v;
    symmetrize(&mut g);
    let eig = g.clone().symmetric_eigen();
    let min_eigenvalue = eig.eigenvalues.min();
    let max = eig.eigenvalues.max();
    Ok(GramSystem {
        weight: w.clone(),
        basis,
        gram: g,
        transform: None,
        condition_number: if min_eigenvalue > 0.0 { max / min_eigenvalue } else { f64::INFINITY },
        min_eigenvalue,
    })
}

pub(crate) fn symmetrize(m: &mut CMatrix) {
    let h = (&*m + m.adjoint()) * Complex64::new(0.5, 0.0);
    *m = h;
}

/// Symmetric orthonormalization via the Hermitian eigendecomposition of G.
pub fn orthonormalize(mut gs: GramSystem) -> Result<GramSystem> {
    let eig = gs.gram.clone().symmetric_eigen();
    let lmin = eig.eigenvalues.min();
    let lmax = eig.eigenvalues.max();
    if !(lmin > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: lmin });
    }
    let cond = lmax / lmin;
    if cond > MAX_CONDITION {
        return Err(Error::IllConditioned { condition: cond });
    }
    let u = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| Complex64::new(l.sqrt().recip(), 0.0)));
    let mut q = u * d * u.adjoint();
    symmetrize(&mut q);
    gs.transform = Some(q);
    gs.condition_number = cond;
    gs.min_eigenvalue = lmin;
    Ok(gs)
}

/// Gram matrix and orthonormalization in one step.
pub fn orthonormal_system(degree: usize, w: &Weight, quad: &DiskQuadrature) -> Result<GramSystem> {
    orthonormalize(gram_matrix(TruncatedBasis::new(degree), w, quad)?)
}

impl GramSystem {
    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    pub fn q(&self) -> &CMatrix {
        self.transform
            .as_ref()
            .expect("GramSystem must be orthonormalized first")
    }

    /// Values of the orthonormal basis `e_k(z) = sum_i Q[i,k] m_i(z)`.
    pub fn eval_orthonormal(&self, z: Complex64) -> CVector {
        self.q().transpose() * self.basis.eval(z)
    }

    /// Monomial coefficients to orthonormal coordinates: `c = Q^{-1} beta`.
    pub fn to_orthonormal(&self, beta: &CVector) -> CVector {
        &self.gram * self.q() * beta
    }

    /// Orthonormal coordinates to monomial coefficients: `beta = Q c`.
    pub fn to_monomial(&self, c: &CVector) -> CVector {
        self.q() * c
    }

    /// `‖Q^H G Q - I‖_max`.
    pub fn residual(&self) -> f64 {
        let q = self.q();
        let r = q.adjoint() * &self.gram * q - CMatrix::identity(self.dim(), self.dim());
        r.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn report(&self) -> SpaceReport {
        let h = &self.gram - self.gram.adjoint();
        SpaceReport {
            degree: self.basis.degree,
            dimension: self.dim(),
            condition_number: self.condition_number,
            min_eigenvalue: self.min_eigenvalue,
            gram_residual: if self.transform.is_some() { self.residual() } else { f64::NAN },
            hermitian_defect: h.iter().map(|c| c.norm()).fold(0.0, f64::max),
        }
    }

    /// `K^ω_z(λ) = sum_n e_n(λ) conj(e_n(z))` (truncated).
    pub fn kernel(&self, z: Complex64, lambda: Complex64) -> Complex64 {
        let ez = self.eval_orthonormal(z);
        let el = self.eval_orthonormal(lambda);
        el.iter().zip(ez.iter()).map(|(a, b)| a * b.conj()).sum()
    }

    /// A closure `λ -> K^ω_z(λ)` with `e(z)` precomputed.
    pub fn kernel_fn(&self, z: Complex64) -> impl Fn(Complex64) -> Complex64 + '_ {
        let ez = self.eval_orthonormal(z).map(|c| c.conj());
        move |l| self.eval_orthonormal(l).dot(&ez)
    }

    /// `K^ω_z(z) = sum |e_n(z)|^2`.
    pub fn kernel_diagonal(&self, z: Complex64) -> f64 {
        self.eval_orthonormal(z).norm_squared()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SchattenLemmaReport {
    pub r: f64,
    pub min_product: f64,
    pub max_product: f64,
    /// `max / min`, the empirical `C^2`.
    pub spread: f64,
    pub points: usize,
}

/// `K^ω_z(z) |D(z,r)|_ω` over a grid of points.
pub fn schatten_lemma_check(
    gs: &GramSystem,
    r: f64,
    z_grid: &[Complex64],
    quad: &DiskQuadrature,
) -> Result<SchattenLemmaReport> {
    if z_grid.is_empty() {
        return Err(Error::Parameter("empty z-grid".into()));
    }
    let products: Vec<f64> = z_grid
        .par_iter()
        .map(|&z| {
            let m = region_mass(&gs.weight, &Region::Pseudo(PseudoDisk::new(z, r)?), quad)?;
            Ok(gs.kernel_diagonal(z) * m)
        })
        .collect::<Result<_>>()?;
    let min = products.iter().copied().fold(f64::INFINITY, f64::min);
    let max = products.iter().copied().fold(0.0, f64::max);
    Ok(SchattenLemmaReport {
        r,
        min_product: min,
        max_product: max,
        spread: max / min,
        points: products.len(),
    })
}

/// Polar grid: `rays` directions times the given moduli.
pub fn polar_grid(rays: usize, moduli: &[f64]) -> Vec<Complex64> {
    let mut out = Vec::new();
    for &m in moduli {
        if m == 0.0 {
            out.push(Complex64::new(0.0, 0.0));
            continue;
        }
        for j in 0..rays {
            out.push(Complex64::from_polar(m, std::f64::consts::TAU * j as f64 / rays as f64));
        }
    }
    out
}
