//! Truncated Toeplitz operators `T_ν`, Berezin transforms, singular values
//! and Schatten norms.

use std::sync::OnceLock;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{symmetrize, CMatrix, CVector, GramSystem};
use crate::error::{Error, Result};
use crate::geometry::{check_in_disk, PseudoDisk};
use crate::kernels::{k_alpha, r_alpha};
use crate::lattice::Lattice;
use crate::numeric::KahanSum;
use crate::quadrature::{region_refine, DiskQuadrature, Region};
use crate::symbol::{harmonic_monomials, Symbol};
use crate::weights::{standard_alpha, Weight};

/// `dν = φ ω dA + sum w_i δ_{p_i}`, where ω is the weight of the space the
/// measure is paired with.
#[derive(Debug, Clone)]
pub struct SymbolMeasure {
    pub density: Option<Symbol>,
    pub atoms: Vec<(Complex64, f64)>,
    /// Declared nonnegative; checked at every node it is evaluated on.
    pub nonnegative: bool,
}

impl SymbolMeasure {
    /// `dν = ω dA`.
    pub fn weight_measure() -> Self {
        Self::density(Symbol::constant(1.0))
    }

    pub fn density(phi: Symbol) -> Self {
        let nonnegative = phi.is_real();
        Self {
            density: Some(phi),
            atoms: Vec::new(),
            nonnegative,
        }
    }

    pub fn atomic(atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        for &(p, w) in &atoms {
            check_in_disk(p)?;
            if !(w.is_finite() && w >= 0.0) {
                return Err(Error::Parameter(format!("atom weight must be nonnegative, got {w}")));
            }
        }
        Ok(Self {
            density: None,
            atoms,
            nonnegative: true,
        })
    }

    pub fn zero() -> Self {
        Self {
            density: None,
            atoms: Vec::new(),
            nonnegative: true,
        }
    }

    pub fn with_atoms(mut self, atoms: Vec<(Complex64, f64)>) -> Result<Self> {
        let extra = Self::atomic(atoms)?;
        self.atoms.extend(extra.atoms);
        Ok(self)
    }

    pub fn label(&self) -> String {
        let mut parts = Vec::new();
        if let Some(d) = &self.density {
            parts.push(format!("({}) w dA", d.label()));
        }
        if !self.atoms.is_empty() {
            parts.push(format!("{} atoms", self.atoms.len()));
        }
        if parts.is_empty() {
            "0".into()
        } else {
            parts.join(" + ")
        }
    }

    fn density_at(&self, z: Complex64) -> Result<Complex64> {
        let Some(phi) = &self.density else {
            return Ok(Complex64::new(0.0, 0.0));
        };
        let v = phi.eval(z)?;
        if self.nonnegative && (v.re < 0.0 || v.im != 0.0) {
            return Err(Error::Parameter(format!(
                "symbol `{}` is negative or complex at {z} ({v}) but the measure is flagged nonnegative",
                phi.label()
            )));
        }
        Ok(v)
    }

    /// `∫ f dν` for the density part (over `rule`, against `w`) plus atoms.
    pub fn integrate_real<F>(&self, w: &Weight, rule: &DiskQuadrature, f: F) -> Result<f64>
    where
        F: Fn(Complex64) -> f64,
    {
        let mut acc = KahanSum::new();
        if self.density.is_some() {
            for (z, lam) in rule.iter() {
                acc.add(lam * self.density_at(z)?.re * w.eval(z)? * f(z));
            }
        }
        for &(p, a) in &self.atoms {
            acc.add(a * f(p));
        }
        Ok(acc.value())
    }

    /// `ν(D(z, r))`.
    pub fn disk_mass(&self, w: &Weight, z: Complex64, r: f64, quad: &DiskQuadrature) -> Result<f64> {
        let disk = PseudoDisk::new(z, r)?;
        let mut acc = KahanSum::new();
        if self.density.is_some() {
            let rule = region_refine(&Region::Pseudo(disk), quad)?;
            for (x, lam) in rule.iter() {
                acc.add(lam * self.density_at(x)?.re * w.eval(x)?);
            }
        }
        for &(p, a) in &self.atoms {
            if disk.contains(p) {
                acc.add(a);
            }
        }
        Ok(acc.value())
    }
}

/// `M[j,k] = ∫ e_k conj(e_j) dν` in the orthonormal basis of a GramSystem.
#[derive(Debug, Clone)]
pub struct ToeplitzMatrix {
    pub matrix: CMatrix,
    pub hermitian_psd: bool,
    sigma: OnceLock<Vec<f64>>,
}

impl ToeplitzMatrix {
    pub fn new(matrix: CMatrix, hermitian_psd: bool) -> Self {
        Self {
            matrix,
            hermitian_psd,
            sigma: OnceLock::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn trace(&self) -> Complex64 {
        self.matrix.trace()
    }
}

/// Monomial moments `A[l,i] = ∫ m_i conj(m_l) dν`.
pub fn monomial_moments(sm: &SymbolMeasure, gs: &GramSystem, quad: &DiskQuadrature) -> Result<CMatrix> {
    let basis = gs.basis;
    let d = basis.dim();
    let mut a = CMatrix::zeros(d, d);
    if sm.density.is_some() {
        let mut scales = Vec::with_capacity(quad.len());
        let mut phis = Vec::with_capacity(quad.len());
        for (z, lam) in quad.iter() {
            let phi = sm.density_at(z)?;
            scales.push(lam * gs.weight.eval(z)?);
            phis.push(phi);
        }
        if sm.nonnegative {
            let s: Vec<f64> = scales.iter().zip(&phis).map(|(s, p)| s * p.re).collect();
            let v = basis.design_matrix(&quad.nodes, &s);
            a += v.adjoint() * v;
        } else {
            let v = basis.design_matrix(&quad.nodes, &scales);
            let mut dv = v.clone();
            for (k, p) in phis.iter().enumerate() {
                for j in 0..d {
                    dv[(k, j)] *= p;
                }
            }
            a += v.adjoint() * dv;
        }
    }
    for &(p, w) in &sm.atoms {
        let m = CVector::from_vec(harmonic_monomials(basis.degree, p));
        a += m.conjugate() * m.transpose() * Complex64::new(w, 0.0);
    }
    Ok(a)
}

pub fn assemble(sm: &SymbolMeasure, gs: &GramSystem, quad: &DiskQuadrature) -> Result<ToeplitzMatrix> {
    let a = monomial_moments(sm, gs, quad)?;
    let q = gs.q();
    let mut m = q.adjoint() * a * q;
    if sm.nonnegative {
        symmetrize(&mut m);
    }
    Ok(ToeplitzMatrix::new(m, sm.nonnegative))
}

/// Descending singular values; a Hermitian eigensolve for PSD matrices, an
/// SVD otherwise.
pub fn singular_values(tm: &ToeplitzMatrix) -> Result<Vec<f64>> {
    if let Some(s) = tm.sigma.get() {
        return Ok(s.clone());
    }
    let mut s: Vec<f64> = if tm.hermitian_psd {
        tm.matrix
            .clone()
            .symmetric_eigen()
            .eigenvalues
            .iter()
            .map(|l| l.abs())
            .collect()
    } else {
        tm.matrix
            .clone()
            .try_svd(false, false, 1e-15, 10_000)
            .ok_or_else(|| Error::Spectral("SVD did not converge".into()))?
            .singular_values
            .iter()
            .copied()
            .collect()
    };
    s.sort_by(|a, b| b.total_cmp(a));
    let _ = tm.sigma.set(s.clone());
    Ok(s)
}

/// Schatten norm of the truncation; `p = ∞` gives the operator norm.
pub fn schatten_norm(tm: &ToeplitzMatrix, p: f64) -> Result<f64> {
    schatten_from_sigma(&singular_values(tm)?, p)
}

pub fn schatten_from_sigma(sigma: &[f64], p: f64) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("Schatten exponent must be at least 1, got {p}")));
    }
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    if p.is_infinite() {
        return Ok(smax);
    }
    if smax == 0.0 {
        return Ok(0.0);
    }
    // scale out the maximum to avoid overflow at large p
    let s: f64 = sigma.iter().map(|x| (x / smax).powf(p)).collect::<KahanSum>().value();
    Ok(smax * s.powf(1.0 / p))
}

/// `ν̃(z) = ‖R_z‖^{-2}_{L²(ω)} ∫ |R_z|^2 dν` with the unweighted harmonic
/// kernel `R_z`. Both integrals use the same rule pulled back to `z`.
pub fn berezin(sm: &SymbolMeasure, z: Complex64, w: &Weight, quad: &DiskQuadrature) -> Result<f64> {
    check_in_disk(z)?;
    let rule = quad.pullback(z);
    let den = rule.try_sum_real(|l| Ok(r_alpha(0.0, z, l).powi(2) * w.eval(l)?))?;
    let num = sm.integrate_real(w, &rule, |l| r_alpha(0.0, z, l).powi(2))?;
    Ok(num / den)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BerezinFlavor {
    /// averaged against `|R^α_z|^2 ω_α`
    Harmonic,
    /// averaged against `|K^α_z|^2 ω_α`
    Analytic,
}

/// Berezin transform of a bounded symbol on the standard-weight space.
pub fn berezin_alpha(
    phi: &Symbol,
    z: Complex64,
    alpha: f64,
    flavor: BerezinFlavor,
    quad: &DiskQuadrature,
) -> Result<f64> {
    check_in_disk(z)?;
    let rule = quad.pullback(z);
    let kern = |l: Complex64| match flavor {
        BerezinFlavor::Harmonic => r_alpha(alpha, z, l).powi(2),
        BerezinFlavor::Analytic => k_alpha(alpha, z, l).norm_sqr(),
    } * standard_alpha(alpha, l);
    let den = rule.sum_real(kern);
    let num = rule.try_sum_real(|l| Ok(phi.eval(l)?.re * kern(l)))?;
    Ok(num / den)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceReport {
    pub trace: f64,
    pub kernel_integral: f64,
    pub deviation: f64,
    pub holds: bool,
}

/// `trace M` against `∫ K^ω_z(z) dν(z)` with the truncated diagonal kernel.
pub fn trace_identity_check(
    sm: &SymbolMeasure,
    gs: &GramSystem,
    quad: &DiskQuadrature,
    tm: &ToeplitzMatrix,
) -> Result<TraceReport> {
    let trace = tm.trace().re;
    let kernel_integral = sm.integrate_real(&gs.weight, quad, |z| gs.kernel_diagonal(z))?;
    let deviation = (trace - kernel_integral).abs();
    Ok(TraceReport {
        trace,
        kernel_integral,
        deviation,
        holds: deviation <= 1e-8 * (1.0 + trace.abs()),
    })
}

/// `sum_n (ν(D(a_n, ε)) / |D(a_n, ε)|_ω)^p` over the lattice.
pub fn lattice_schatten_sum(
    sm: &SymbolMeasure,
    lattice: &Lattice,
    w: &Weight,
    p: f64,
    quad: &DiskQuadrature,
) -> Result<f64> {
    if !(p >= 1.0) {
        return Err(Error::Parameter(format!("Schatten exponent must be at least 1, got {p}")));
    }
    let eps = lattice.epsilon;
    let terms: Vec<f64> = lattice
        .points
        .par_iter()
        .map(|&a| {
            let nu = sm.disk_mass(w, a, eps, quad)?;
            let rule = region_refine(&Region::Pseudo(PseudoDisk::new(a, eps)?), quad)?;
            let m = rule.try_sum_real(|z| w.eval(z))?;
            Ok((nu / m).powf(p))
        })
        .collect::<Result<_>>()?;
    Ok(terms.into_iter().collect::<KahanSum>().value())
}

/// `ν(D(z,r)) / |D(z,r)|_ω`.
pub fn carleson_ratio(
    sm: &SymbolMeasure,
    w: &Weight,
    z: Complex64,
    r: f64,
    quad: &DiskQuadrature,
) -> Result<f64> {
    let nu = sm.disk_mass(w, z, r, quad)?;
    let rule = region_refine(&Region::Pseudo(PseudoDisk::new(z, r)?), quad)?;
    let m = rule.try_sum_real(|x| w.eval(x))?;
    Ok(nu / m)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundednessReport {
    pub sigma_max: f64,
    pub berezin_sup: f64,
    pub carleson_sup: f64,
    /// Largest `∫|f|^2 dν / ‖f‖^2` over a seeded family in the truncation.
    pub sampling_constant: f64,
    pub lattice_sum: Option<f64>,
    /// `berezin_sup <= sigma_max + slack`
    pub berezin_below_norm: bool,
    pub slack: f64,
}

#[allow(clippy::too_many_arguments)]
pub fn carleson_boundedness_report(
    sm: &SymbolMeasure,
    gs: &GramSystem,
    quad: &DiskQuadrature,
    z_grid: &[Complex64],
    r: f64,
    lattice: Option<&Lattice>,
    seed: u64,
    slack: f64,
) -> Result<BoundednessReport> {
    let w = &gs.weight;
    let tm = assemble(sm, gs, quad)?;
    let sigma_max = singular_values(&tm)?[0];
    let small = DiskQuadrature::build(12, 24)?;
    let (berezin_sup, carleson_sup) = z_grid
        .par_iter()
        .map(|&z| Ok((berezin(sm, z, w, quad)?, carleson_ratio(sm, w, z, r, &small)?)))
        .collect::<Result<Vec<(f64, f64)>>>()?
        .into_iter()
        .fold((0.0f64, 0.0f64), |acc, v| (acc.0.max(v.0), acc.1.max(v.1)));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let d = tm.dim();
    let mut sampling_constant: f64 = 0.0;
    for _ in 0..50 {
        let c = CVector::from_fn(d, |_, _| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
        let num = (c.adjoint() * &tm.matrix * &c)[(0, 0)].re;
        sampling_constant = sampling_constant.max(num / c.norm_squared());
    }
    let lattice_sum = match lattice {
        Some(l) => Some(lattice_schatten_sum(sm, l, w, 1.0, &small)?),
        None => None,
    };
    Ok(BoundednessReport {
        sigma_max,
        berezin_sup,
        carleson_sup,
        sampling_constant,
        lattice_sum,
        berezin_below_norm: berezin_sup <= sigma_max + slack,
        slack,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::orthonormal_system;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unweighted(n: usize) -> (GramSystem, DiskQuadrature) {
        let q = DiskQuadrature::for_degree(n);
        (orthonormal_system(n, &Weight::unweighted(), &q).unwrap(), q)
    }

    fn max_dev(a: &CMatrix, b: &CMatrix) -> f64 {
        (a - b).iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    #[test]
    fn assemble_examples() {
        let w = Weight::alpha(0.5).unwrap();
        let q = DiskQuadrature::for_degree(4);
        let gs = orthonormal_system(4, &w, &q).unwrap();
        let tm = assemble(&SymbolMeasure::weight_measure(), &gs, &q).unwrap();
        assert!(max_dev(&tm.matrix, &CMatrix::identity(9, 9)) < 1e-10);

        let (gs, q) = unweighted(3);
        let tm = assemble(&SymbolMeasure::density(Symbol::real("r2", |z| z.norm_sqr())), &gs, &q).unwrap();
        let want = [0.5, 2.0 / 3.0, 0.75, 0.8, 2.0 / 3.0, 0.75, 0.8];
        for j in 0..7 {
            for k in 0..7 {
                let v = if j == k { want[j] } else { 0.0 };
                assert!((tm.matrix[(j, k)] - v).norm() < 1e-12);
            }
        }
        let s = singular_values(&tm).unwrap();
        let mut sorted = want.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        for (a, b) in s.iter().zip(&sorted) {
            assert!((a - b).abs() < 1e-12);
        }

        let delta = SymbolMeasure::atomic(vec![(c(0.0, 0.0), 1.0)]).unwrap();
        let tm = assemble(&delta, &gs, &q).unwrap();
        let s = singular_values(&tm).unwrap();
        let k00 = gs.kernel_diagonal(c(0.0, 0.0));
        assert!((s[0] - k00).abs() < 1e-12);
        assert!(s[1..].iter().all(|&x| x < 1e-10));
        assert!((tm.trace().re - k00).abs() < 1e-12);
        for p in [1.0, 2.0, 7.5] {
            assert!((schatten_norm(&tm, p).unwrap() - k00).abs() < 1e-10);
        }
    }

    #[test]
    fn atoms_outside_disk_are_rejected() {
        assert!(SymbolMeasure::atomic(vec![(c(1.0, 0.0), 1.0)]).is_err());
        assert!(SymbolMeasure::atomic(vec![(c(0.1, 0.0), -1.0)]).is_err());
    }

    #[test]
    fn schatten_examples() {
        let tm = ToeplitzMatrix::new(CMatrix::identity(7, 7), true);
        assert!((schatten_norm(&tm, 1.0).unwrap() - 7.0).abs() < 1e-12);
        assert!(singular_values(&tm).unwrap().iter().all(|&s| (s - 1.0).abs() < 1e-14));
        let (gs, q) = unweighted(6);
        let tm = assemble(&SymbolMeasure::density(Symbol::real("r2", |z| z.norm_sqr())), &gs, &q).unwrap();
        let mut last = f64::INFINITY;
        for p in [1.0, 1.5, 2.0, 4.0, 16.0, 64.0] {
            let v = schatten_norm(&tm, p).unwrap();
            assert!(v <= last + 1e-12);
            last = v;
        }
        let op = schatten_norm(&tm, f64::INFINITY).unwrap();
        assert!((last - op) / op < 0.06, "{last} vs {op}");
        assert!(schatten_norm(&tm, 0.5).is_err());
    }

    #[test]
    fn trace_class_symbol_stabilizes() {
        let phi = Symbol::real("(1-r^2)^4", |z| (1.0 - z.norm_sqr()).powi(4));
        let mut s1 = Vec::new();
        for n in [8, 12, 16, 20] {
            let (gs, q) = unweighted(n);
            let tm = assemble(&SymbolMeasure::density(phi.clone()), &gs, &q).unwrap();
            s1.push(schatten_norm(&tm, 1.0).unwrap());
        }
        let inc: Vec<f64> = s1.windows(2).map(|p| p[1] - p[0]).collect();
        assert!(inc.windows(2).all(|p| p[1] < p[0]), "{s1:?}");
        assert!(*inc.last().unwrap() < 1e-3, "{s1:?}");
    }

    #[test]
    fn berezin_examples() {
        let q = DiskQuadrature::build(32, 64).unwrap();
        let w = Weight::alpha(0.5).unwrap();
        for k in 0..20 {
            let z = Complex64::from_polar(0.045 * k as f64, 0.7 * k as f64);
            let v = berezin(&SymbolMeasure::weight_measure(), z, &w, &q).unwrap();
            assert!((v - 1.0).abs() < 1e-8);
            let v3 = berezin(&SymbolMeasure::density(Symbol::constant(3.0)), z, &w, &q).unwrap();
            assert!((v3 - 3.0).abs() < 1e-8);
        }
        let r2 = Symbol::real("r2", |z| z.norm_sqr());
        let v = berezin(&SymbolMeasure::density(r2.clone()), c(0.0, 0.0), &Weight::unweighted(), &q).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        for flavor in [BerezinFlavor::Harmonic, BerezinFlavor::Analytic] {
            let v = berezin_alpha(&Symbol::constant(0.7), c(0.5, 0.5), 1.0, flavor, &q).unwrap();
            assert!((v - 0.7).abs() < 1e-12);
        }
        let v = berezin_alpha(&r2, c(0.0, 0.0), 0.0, BerezinFlavor::Harmonic, &q).unwrap();
        assert!((v - 0.5).abs() < 1e-12);
        let outer = Symbol::real("chi", |z| if z.norm() > 0.5 { 1.0 } else { 0.0 });
        let q = DiskQuadrature::build(64, 128).unwrap();
        let v = berezin_alpha(&outer, c(0.95, 0.0), 0.0, BerezinFlavor::Harmonic, &q).unwrap();
        assert!(v > 0.9, "{v}");
    }

    #[test]
    fn trace_identity_examples() {
        let (gs, q) = unweighted(3);
        let cases = [
            (SymbolMeasure::weight_measure(), Some(7.0)),
            (SymbolMeasure::atomic(vec![(c(0.0, 0.0), 1.0)]).unwrap(), Some(1.0)),
            (
                SymbolMeasure::density(Symbol::real("r2", |z| z.norm_sqr())),
                Some(0.5 + 2.0 * (2.0 / 3.0 + 0.75 + 0.8)),
            ),
        ];
        for (sm, want) in cases {
            let tm = assemble(&sm, &gs, &q).unwrap();
            let rep = trace_identity_check(&sm, &gs, &q, &tm).unwrap();
            assert!(rep.holds, "{rep:?}");
            if let Some(w) = want {
                assert!((rep.trace - w).abs() < 1e-10, "{rep:?}");
            }
        }
    }

    #[test]
    fn lattice_sum_examples() {
        let l = crate::lattice::generate_lattice(1.0 / 32.0, 0.5, 40).unwrap();
        let w = Weight::unweighted();
        let q = DiskQuadrature::build(8, 16).unwrap();
        let s = lattice_schatten_sum(&SymbolMeasure::weight_measure(), &l, &w, 1.0, &q).unwrap();
        assert!((s - l.len() as f64).abs() < 1e-8 * l.len() as f64);
        assert_eq!(lattice_schatten_sum(&SymbolMeasure::zero(), &l, &w, 2.0, &q).unwrap(), 0.0);
        let delta = SymbolMeasure::atomic(vec![(c(0.0, 0.0), 1.0)]).unwrap();
        let p = 2.0;
        let s = lattice_schatten_sum(&delta, &l, &w, p, &q).unwrap();
        let want: f64 = l
            .points
            .iter()
            .filter(|a| a.norm() < l.epsilon)
            .map(|a| PseudoDisk::new(*a, l.epsilon).unwrap().area().powf(-p))
            .sum();
        assert!((s - want).abs() < 1e-8 * want, "{s} vs {want}");
    }

    #[test]
    fn psd_and_monotone() {
        let (gs, q) = unweighted(6);
        let small = SymbolMeasure::density(Symbol::real("r2", |z| z.norm_sqr()));
        let big = SymbolMeasure::density(Symbol::real("r2+chi", |z| {
            z.norm_sqr() + if z.re > 0.0 { 1.0 } else { 0.0 }
        }))
        .with_atoms(vec![(c(0.3, 0.1), 0.5)])
        .unwrap();
        let m1 = assemble(&small, &gs, &q).unwrap();
        let m2 = assemble(&big, &gs, &q).unwrap();
        let diff = ToeplitzMatrix::new(&m2.matrix - &m1.matrix, true);
        let eig = diff.matrix.clone().symmetric_eigen().eigenvalues;
        assert!(eig.min() > -1e-10);
        let eig = m2.matrix.clone().symmetric_eigen().eigenvalues;
        assert!(eig.min() > -1e-10);
    }

    #[test]
    fn boundedness_report_examples() {
        let (gs, q) = unweighted(12);
        let grid = crate::basis::polar_grid(8, &[0.0, 0.5, 0.8]);
        let rep = carleson_boundedness_report(&SymbolMeasure::weight_measure(), &gs, &q, &grid, 0.125, None, 17, 0.05)
            .unwrap();
        for v in [rep.sigma_max, rep.berezin_sup, rep.carleson_sup, rep.sampling_constant] {
            assert!((v - 1.0).abs() < 1e-6, "{rep:?}");
        }
        let r2 = SymbolMeasure::density(Symbol::real("r2", |z| z.norm_sqr()));
        let rep = carleson_boundedness_report(&r2, &gs, &q, &grid, 0.125, None, 17, 0.05).unwrap();
        assert!(rep.sigma_max < 1.0 && rep.berezin_sup < 1.0 && rep.carleson_sup < 1.0, "{rep:?}");
        assert!(rep.berezin_below_norm);
        let singular = SymbolMeasure::density(Symbol::real("(1-r^2)^-1/4", |z| (1.0 - z.norm_sqr()).powf(-0.25)));
        let rep = carleson_boundedness_report(&singular, &gs, &q, &grid, 0.125, None, 17, 0.05).unwrap();
        assert!(rep.sigma_max.is_finite() && rep.carleson_sup.is_finite(), "{rep:?}");
    }
}
