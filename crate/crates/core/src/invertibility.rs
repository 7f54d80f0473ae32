//! Invertibility experiments on the standard-weight spaces `L²_h(ω_α)`:
//! Berezin transforms, level-set densities and smallest singular values,
//! the `W T_φ W*` block identity, and analytic symbols.
//!
//! The analytic space `L²_a(ω_α)` uses the normalized monomials
//! `e_k = z^k / ‖z^k‖`; `zL²_a` uses `e_1 .. e_N` with the same norms.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{orthonormal_system, CMatrix, TruncatedBasis};
use crate::carleson::{boundary_density, default_t_grid, directions};
use crate::error::{Error, Result};
use crate::quadrature::{DiskQuadrature, Region};
use crate::symbol::{harmonic_monomials, Symbol};
use crate::toeplitz::{assemble, berezin_alpha, singular_values, BerezinFlavor, SymbolMeasure, ToeplitzMatrix};
use crate::weights::Weight;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Indicators below this count as zero.
pub const FLOOR: f64 = 0.05;
pub const BEREZIN_RADII: [f64; 5] = [0.5, 0.8, 0.9, 0.95, 0.99];
pub const BEREZIN_RAYS: usize = 16;
pub const DEFAULT_THRESHOLDS: [f64; 3] = [0.1, 0.25, 0.5];
pub const DENSITY_DIRECTIONS: usize = 64;

/// `(φ⋆, φ*)` with `φ⋆(z) = φ(conj z)` and `φ*(z) = conj φ(conj z)`.
pub fn conjugate_symbols(phi: &Symbol) -> (Symbol, Symbol) {
    (phi.star(), phi.reflect_conj())
}

/// `‖z^k‖_{L²(ω)}` for `k = 0..=n` under the rule.
pub fn analytic_norms(w: &Weight, n: usize, quad: &DiskQuadrature) -> Result<Vec<f64>> {
    let mut acc = vec![0.0; n + 1];
    for (z, lam) in quad.iter() {
        let s = lam * w.eval(z)?;
        let r2 = z.norm_sqr();
        let mut p = 1.0;
        for a in acc.iter_mut() {
            *a += s * p;
            p *= r2;
        }
    }
    Ok(acc.into_iter().map(f64::sqrt).collect())
}

/// `M[j,k] = ∫ φ f_k conj(e_j) ω dA` for `j, k = 0..=n`, where `f_k = e_k`
/// (Toeplitz) or `f_k = U e_k = e_k(conj z)` (Hankel).
fn analytic_pairing(phi: &Symbol, w: &Weight, n: usize, hankel: bool, quad: &DiskQuadrature) -> Result<CMatrix> {
    let norms = analytic_norms(w, n, quad)?;
    let mut m = CMatrix::zeros(n + 1, n + 1);
    let mut pw = vec![ZERO; n + 1];
    for (z, lam) in quad.iter() {
        let s = phi.eval(z)? * (lam * w.eval(z)?);
        if s == ZERO {
            continue;
        }
        let mut p = Complex64::new(1.0, 0.0);
        for v in pw.iter_mut() {
            *v = p;
            p *= z;
        }
        for k in 0..=n {
            let fk = if hankel { pw[k].conj() } else { pw[k] } * s;
            for j in 0..=n {
                m[(j, k)] += fk * pw[j].conj();
            }
        }
    }
    for k in 0..=n {
        for j in 0..=n {
            m[(j, k)] /= norms[j] * norms[k];
        }
    }
    Ok(m)
}

fn alpha_weight(alpha: f64) -> Result<Weight> {
    Weight::alpha(alpha)
}

/// Matrix of the analytic Toeplitz operator `𝕋_φ f = P(φ f)` on `e_0 .. e_N`.
pub fn analytic_toeplitz_matrix(phi: &Symbol, alpha: f64, n: usize, quad: &DiskQuadrature) -> Result<CMatrix> {
    analytic_pairing(phi, &alpha_weight(alpha)?, n, false, quad)
}

/// Matrix of `ℍ_φ f = P(φ U f)` on `e_0 .. e_N`.
pub fn hankel_matrix(phi: &Symbol, alpha: f64, n: usize, quad: &DiskQuadrature) -> Result<CMatrix> {
    analytic_pairing(phi, &alpha_weight(alpha)?, n, true, quad)
}

/// `<e_k, g>` for `k = 0..=n`.
fn coefficients_against(g: &Symbol, w: &Weight, n: usize, quad: &DiskQuadrature) -> Result<Vec<Complex64>> {
    let norms = analytic_norms(w, n, quad)?;
    let mut out = vec![ZERO; n + 1];
    for (z, lam) in quad.iter() {
        let s = g.eval(z)?.conj() * (lam * w.eval(z)?);
        let mut p = Complex64::new(1.0, 0.0);
        for o in out.iter_mut() {
            *o += p * s;
            p *= z;
        }
    }
    for (o, nk) in out.iter_mut().zip(&norms) {
        *o /= *nk;
    }
    Ok(out)
}

/// The four blocks of `W T_φ W*` on `zL²_a ⊕ L²_a`.
///
/// Row 0 of the top blocks (the constant direction) is kept before the
/// rank-one corrections are applied; after them it must vanish, which is
/// reported as `codomain_leak`.
#[derive(Debug, Clone)]
pub struct BlockDecomposition {
    pub degree: usize,
    pub alpha: f64,
    /// `𝕋_φ − (1⊗φ̄)`, `N × N`
    pub a: CMatrix,
    /// `ℍ_φ − (1⊗φ*)`, `N × (N+1)`
    pub b: CMatrix,
    /// `ℍ_{φ⋆}`, `(N+1) × N`
    pub c: CMatrix,
    /// `𝕋_{φ⋆}`, `(N+1) × (N+1)`
    pub d: CMatrix,
    /// `<e_k, φ̄>` for `k = 1..=N`: the rank-one correction on `zL²_a`.
    pub rank_one_a: Vec<Complex64>,
    /// `<e_k, φ*>` for `k = 0..=N`.
    pub rank_one_b: Vec<Complex64>,
    pub codomain_leak: f64,
    pub matrix: CMatrix,
}

fn max_abs<'a>(it: impl IntoIterator<Item = &'a Complex64>) -> f64 {
    it.into_iter().map(|c| c.norm()).fold(0.0, f64::max)
}

pub fn block_decomposition(phi: &Symbol, alpha: f64, n: usize, quad: &DiskQuadrature) -> Result<BlockDecomposition> {
    if n == 0 {
        return Err(Error::Parameter("block decomposition needs N >= 1".into()));
    }
    let w = alpha_weight(alpha)?;
    let (phi_star, phi_refl) = conjugate_symbols(phi);
    // conj φ(z) = conj φ⋆(conj z)
    let phi_bar = phi_star.reflect_conj();

    let t_phi = analytic_pairing(phi, &w, n, false, quad)?;
    let h_phi = analytic_pairing(phi, &w, n, true, quad)?;
    let h_star = analytic_pairing(&phi_star, &w, n, true, quad)?;
    let t_star = analytic_pairing(&phi_star, &w, n, false, quad)?;
    let ga = coefficients_against(&phi_bar, &w, n, quad)?;
    let gb = coefficients_against(&phi_refl, &w, n, quad)?;
    // (1⊗g) e_k = <e_k, g> 1, and 1 = ‖1‖ e_0
    let one = analytic_norms(&w, 0, quad)?[0];

    let mut top_a = t_phi.columns(1, n).into_owned();
    let mut top_b = h_phi;
    for k in 0..n {
        top_a[(0, k)] -= ga[k + 1] * one;
    }
    for k in 0..=n {
        top_b[(0, k)] -= gb[k] * one;
    }
    let codomain_leak = max_abs(top_a.row(0).iter()).max(max_abs(top_b.row(0).iter()));
    let a = top_a.rows(1, n).into_owned();
    let b = top_b.rows(1, n).into_owned();
    let c = h_star.columns(1, n).into_owned();
    let d = t_star;

    let dim = 2 * n + 1;
    let mut matrix = CMatrix::zeros(dim, dim);
    matrix.view_mut((0, 0), (n, n)).copy_from(&a);
    matrix.view_mut((0, n), (n, n + 1)).copy_from(&b);
    matrix.view_mut((n, 0), (n + 1, n)).copy_from(&c);
    matrix.view_mut((n, n), (n + 1, n + 1)).copy_from(&d);

    Ok(BlockDecomposition {
        degree: n,
        alpha,
        a,
        b,
        c,
        d,
        rank_one_a: ga[1..].to_vec(),
        rank_one_b: gb,
        codomain_leak,
        matrix,
    })
}

/// Matrix of `T_φ` on the harmonic truncation, reordered to
/// `[z .. z^N | 1, conj z .. conj z^N]` so that `W` acts as the identity on
/// coordinates.
pub fn harmonic_matrix_w_order(phi: &Symbol, alpha: f64, n: usize, quad: &DiskQuadrature) -> Result<CMatrix> {
    let gs = orthonormal_system(n, &alpha_weight(alpha)?, quad)?;
    let sm = SymbolMeasure {
        density: Some(phi.clone()),
        atoms: Vec::new(),
        nonnegative: false,
    };
    let m = assemble(&sm, &gs, quad)?.matrix;
    let basis = TruncatedBasis::new(n);
    let perm: Vec<usize> = (1..=n)
        .chain(std::iter::once(0))
        .chain((1..=n).map(|k| basis.conjugate_index(k)))
        .collect();
    Ok(CMatrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(perm[i], perm[j])]))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BlockCheckReport {
    pub symbol: String,
    pub alpha: f64,
    pub degree: usize,
    /// max-abs difference between the block matrix and `W T_φ W*`
    pub deviation: f64,
    pub c_block_max: f64,
    /// max over `k >= 1` of `|<e_k, φ̄>|`
    pub rank_one_max: f64,
    pub codomain_leak: f64,
    pub block_norms: [f64; 4],
}

pub fn block_identity_check(phi: &Symbol, alpha: f64, n: usize, quad: &DiskQuadrature) -> Result<BlockCheckReport> {
    let blocks = block_decomposition(phi, alpha, n, quad)?;
    let direct = harmonic_matrix_w_order(phi, alpha, n, quad)?;
    let deviation = max_abs((&blocks.matrix - &direct).iter());
    Ok(BlockCheckReport {
        symbol: phi.label().to_string(),
        alpha,
        degree: n,
        deviation,
        c_block_max: max_abs(blocks.c.iter()),
        rank_one_max: max_abs(blocks.rank_one_a.iter()),
        codomain_leak: blocks.codomain_leak,
        block_norms: [
            blocks.a.norm(),
            blocks.b.norm(),
            blocks.c.norm(),
            blocks.d.norm(),
        ],
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Invertible,
    NotInvertible,
    Inconclusive,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Invertible => "invertible",
            Verdict::NotInvertible => "not invertible",
            Verdict::Inconclusive => "inconclusive",
        })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepRow {
    pub degree: usize,
    /// harmonic truncation of `T_φ`
    pub sigma_min_harmonic: f64,
    /// analytic truncation of `𝕋_φ`
    pub sigma_min_analytic: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LevelSetDensity {
    pub threshold: f64,
    pub boundary_density: f64,
    pub argmin: Complex64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InvertibilityReport {
    pub symbol: String,
    pub alpha: f64,
    pub sweep: Vec<SweepRow>,
    /// `inf φ̃` over the Berezin grid
    pub berezin_harmonic_inf: f64,
    /// `inf φ̂` over the Berezin grid
    pub berezin_analytic_inf: f64,
    pub berezin_argmin: Complex64,
    pub level_sets: Vec<LevelSetDensity>,
    /// best boundary density over the thresholds
    pub density_indicator: f64,
    pub sigma_decreasing: bool,
    pub floor: f64,
    pub indicators_agree: bool,
    pub verdict: Verdict,
}

/// 16 rays at the radii where invertibility failures show up.
pub fn berezin_grid() -> Vec<Complex64> {
    let dirs = directions(BEREZIN_RAYS);
    BEREZIN_RADII
        .iter()
        .flat_map(|&r| dirs.iter().map(move |&u| u * r))
        .collect()
}

fn sigma_min(m: CMatrix, hermitian_psd: bool) -> Result<f64> {
    let s = singular_values(&ToeplitzMatrix::new(m, hermitian_psd))?;
    Ok(s.last().copied().unwrap_or(0.0))
}

pub fn invertibility_report(
    phi: &Symbol,
    alpha: f64,
    n_list: &[usize],
    thresholds: &[f64],
    quad: Option<&DiskQuadrature>,
) -> Result<InvertibilityReport> {
    if n_list.is_empty() {
        return Err(Error::Parameter("empty N list".into()));
    }
    let w = alpha_weight(alpha)?;
    let psd = phi.is_real();
    let sweep = n_list
        .par_iter()
        .map(|&n| {
            let own;
            let q = match quad {
                Some(q) => q,
                None => {
                    own = DiskQuadrature::for_degree(n);
                    &own
                }
            };
            let gs = orthonormal_system(n, &w, q)?;
            let sm = SymbolMeasure {
                density: Some(phi.clone()),
                atoms: Vec::new(),
                nonnegative: psd,
            };
            let tm = assemble(&sm, &gs, q)?;
            let sh = singular_values(&tm)?.last().copied().unwrap_or(0.0);
            let sa = sigma_min(analytic_pairing(phi, &w, n, false, q)?, psd)?;
            Ok(SweepRow {
                degree: n,
                sigma_min_harmonic: sh,
                sigma_min_analytic: sa,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    let bq = DiskQuadrature::build(64, 128)?;
    let grid = berezin_grid();
    let values = grid
        .par_iter()
        .map(|&z| {
            Ok((
                z,
                berezin_alpha(phi, z, alpha, BerezinFlavor::Harmonic, &bq)?,
                berezin_alpha(phi, z, alpha, BerezinFlavor::Analytic, &bq)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut bh = f64::INFINITY;
    let mut ba = f64::INFINITY;
    let mut argmin = ZERO;
    for &(z, h, a) in &values {
        if h < bh {
            bh = h;
            argmin = z;
        }
        ba = ba.min(a);
    }

    let dq = DiskQuadrature::build(24, 48)?;
    let t_grid = default_t_grid(6);
    let u_grid = directions(DENSITY_DIRECTIONS);
    let mut level_sets = Vec::with_capacity(thresholds.len());
    for &t in thresholds {
        let p = phi.clone();
        let g = Region::indicator(format!("{{{} > {t}}}", phi.label()), move |z| {
            p.eval(z).map(|v| v.re > t).unwrap_or(false)
        });
        let rep = boundary_density(&g, &t_grid, &u_grid, &dq)?;
        level_sets.push(LevelSetDensity {
            threshold: t,
            boundary_density: rep.inf,
            argmin: rep.argmin,
        });
    }
    let density_indicator = level_sets.iter().map(|l| l.boundary_density).fold(0.0, f64::max);

    let sig: Vec<f64> = sweep.iter().map(|r| r.sigma_min_harmonic).collect();
    let sigma_decreasing = sig.len() > 1 && sig.windows(2).all(|p| p[1] < p[0] * (1.0 - 1e-9));
    let last = *sig.last().unwrap();
    let berezin_inf = bh.min(ba);
    let sigma_ok = sig.iter().all(|&s| s > FLOOR);
    let positive = [sigma_ok, berezin_inf > FLOOR, density_indicator > FLOOR];
    let indicators_agree = positive.iter().all(|&p| p) || positive.iter().all(|&p| !p);
    let verdict = if positive.iter().all(|&p| p) {
        Verdict::Invertible
    } else if sigma_decreasing && (last < FLOOR || berezin_inf < FLOOR) {
        Verdict::NotInvertible
    } else {
        Verdict::Inconclusive
    };

    Ok(InvertibilityReport {
        symbol: phi.label().to_string(),
        alpha,
        sweep,
        berezin_harmonic_inf: bh,
        berezin_analytic_inf: ba,
        berezin_argmin: argmin,
        level_sets,
        density_indicator,
        sigma_decreasing,
        floor: FLOOR,
        indicators_agree,
        verdict,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyticRow {
    pub degree: usize,
    pub sigma_min: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AnalyticReport {
    pub coefficients: Vec<Complex64>,
    pub alpha: f64,
    /// `inf |φ|` over a polar grid including the origin
    pub inf_modulus: f64,
    pub rows: Vec<AnalyticRow>,
    pub sigma_floor: f64,
    pub symbol_invertible: bool,
    pub operator_bounded_below: bool,
    /// `T_φ` bounded below although `φ` is not invertible
    pub counterexample: bool,
}

/// `inf |φ|` over 64 rays at 200 moduli in `[0, 0.999]`.
fn inf_modulus(coeffs: &[Complex64]) -> f64 {
    let dirs = directions(64);
    let mut best = crate::symbol::horner(coeffs, ZERO).norm();
    for i in 1..=200 {
        let r = 0.999 * i as f64 / 200.0;
        for &u in &dirs {
            best = best.min(crate::symbol::horner(coeffs, u * r).norm());
        }
    }
    best
}

/// Smallest singular value of `T_φ` restricted to the harmonic truncation
/// of degree `N`. For an analytic polynomial of degree `d` the image lies in
/// the truncation of degree `N + d`, so the tall compression is exact.
pub fn analytic_sigma_min(coeffs: &[Complex64], alpha: f64, n: usize) -> Result<f64> {
    let deg = coeffs.len().saturating_sub(1);
    let big = n + deg;
    let quad = DiskQuadrature::for_degree(big);
    let w = alpha_weight(alpha)?;
    let small = orthonormal_system(n, &w, &quad)?;
    let large = orthonormal_system(big, &w, &quad)?;
    let (ds, db) = (small.dim(), large.dim());
    let mut a = CMatrix::zeros(db, ds);
    for (z, lam) in quad.iter() {
        let s = crate::symbol::horner(coeffs, z) * (lam * w.eval(z)?);
        let ms = harmonic_monomials(n, z);
        let mb = harmonic_monomials(big, z);
        for (i, mi) in ms.iter().enumerate() {
            let v = mi * s;
            for (l, ml) in mb.iter().enumerate() {
                a[(l, i)] += v * ml.conj();
            }
        }
    }
    let m = large.q().adjoint() * a * small.q();
    let svd = m
        .try_svd(false, false, 1e-15, 10_000)
        .ok_or_else(|| Error::Spectral("SVD did not converge".into()))?;
    Ok(svd.singular_values.iter().copied().fold(f64::INFINITY, f64::min))
}

pub fn analytic_invertibility_check(coeffs: &[Complex64], alpha: f64, n_list: &[usize]) -> Result<AnalyticReport> {
    if coeffs.is_empty() {
        return Err(Error::Parameter("empty coefficient list".into()));
    }
    let rows = n_list
        .par_iter()
        .map(|&n| {
            Ok(AnalyticRow {
                degree: n,
                sigma_min: analytic_sigma_min(coeffs, alpha, n)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let inf = inf_modulus(coeffs);
    let floor = rows.iter().map(|r| r.sigma_min).fold(f64::INFINITY, f64::min);
    let symbol_invertible = inf > FLOOR;
    let operator_bounded_below = floor > FLOOR;
    Ok(AnalyticReport {
        coefficients: coeffs.to_vec(),
        alpha,
        inf_modulus: inf,
        rows,
        sigma_floor: floor,
        symbol_invertible,
        operator_bounded_below,
        counterexample: !symbol_invertible && operator_bounded_below,
    })
}
