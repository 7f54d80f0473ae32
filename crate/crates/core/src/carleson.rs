//! Carleson and reverse-Carleson analysis: disk-ratio sweeps, boundary-ball
//! and box densities of sets, lattice frame bounds, atomic decomposition.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{CMatrix, CVector, GramSystem};
use crate::dsl;
use crate::error::{Error, Result};
use crate::geometry::{BoundaryBall, CarlesonBox, MetricBall, PseudoDisk};
use crate::kernels::DkBump;
use crate::lattice::Lattice;
use crate::numeric::KahanSum;
use crate::quadrature::{region_refine, DiskQuadrature, Region};
use crate::symbol::{harmonic_monomials, HarmonicPoly};
use crate::toeplitz::{carleson_ratio, SymbolMeasure};
use crate::weights::Weight;

pub const DEFAULT_RADIUS: f64 = 0.125;
/// Below this an infimum counts as zero.
pub const POSITIVITY_FLOOR: f64 = 0.05;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityEntry {
    pub point: Complex64,
    pub scale: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DensityReport {
    pub family: String,
    pub entries: Vec<DensityEntry>,
    pub inf: f64,
    pub sup: f64,
    pub argmin: Complex64,
    /// `(scale, inf, sup)` per distinct scale, in input order.
    pub profile: Vec<(f64, f64, f64)>,
}

impl DensityReport {
    fn from_entries(family: String, entries: Vec<DensityEntry>) -> Self {
        let mut inf = f64::INFINITY;
        let mut sup = f64::NEG_INFINITY;
        let mut argmin = Complex64::new(0.0, 0.0);
        let mut profile: Vec<(f64, f64, f64)> = Vec::new();
        for e in &entries {
            if e.ratio < inf {
                inf = e.ratio;
                argmin = e.point;
            }
            sup = sup.max(e.ratio);
            match profile.iter_mut().find(|p| (p.0 - e.scale).abs() <= 1e-12) {
                Some(p) => {
                    p.1 = p.1.min(e.ratio);
                    p.2 = p.2.max(e.ratio);
                }
                None => profile.push((e.scale, e.ratio, e.ratio)),
            }
        }
        Self {
            family,
            entries,
            inf,
            sup,
            argmin,
            profile,
        }
    }

    pub fn positive(&self) -> bool {
        self.inf >= POSITIVITY_FLOOR
    }
}

/// `ν(D(z,r)) / |D(z,r)|_ω` over a grid, with the profile keyed by `|z|`.
pub fn carleson_ratio_sweep(
    sm: &SymbolMeasure,
    w: &Weight,
    r: f64,
    z_grid: &[Complex64],
    quad: &DiskQuadrature,
) -> Result<DensityReport> {
    if !(r > 0.0 && r <= 0.25) {
        return Err(Error::Parameter(format!("Carleson radius must lie in (0, 1/4], got {r}")));
    }
    let entries = z_grid
        .par_iter()
        .map(|&z| {
            Ok(DensityEntry {
                point: z,
                scale: z.norm(),
                ratio: carleson_ratio(sm, w, z, r, quad)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityReport::from_entries(
        format!("D(z,{r}) over {} points", z_grid.len()),
        entries,
    ))
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VanishingReport {
    /// `(|z|, max ratio on that circle)`.
    pub bands: Vec<(f64, f64)>,
    pub tolerance: f64,
    pub vanishing: bool,
    pub verdict: String,
}

/// Max Carleson ratio per radius; vanishing iff the outermost band is below
/// `tolerance` times the innermost one.
pub fn vanishing_profile(
    sm: &SymbolMeasure,
    w: &Weight,
    r: f64,
    radial_grid: &[f64],
    rays: usize,
    tolerance: f64,
    quad: &DiskQuadrature,
) -> Result<VanishingReport> {
    if radial_grid.len() < 2 {
        return Err(Error::Parameter("vanishing profile needs at least two radii".into()));
    }
    let grid: Vec<Complex64> = radial_grid
        .iter()
        .flat_map(|&m| {
            (0..rays).map(move |j| Complex64::from_polar(m, std::f64::consts::TAU * j as f64 / rays as f64))
        })
        .collect();
    let rep = carleson_ratio_sweep(sm, w, r, &grid, quad)?;
    let bands: Vec<(f64, f64)> = rep.profile.iter().map(|p| (p.0, p.2)).collect();
    let first = bands[0].1;
    let last = bands[bands.len() - 1].1;
    let vanishing = last < tolerance * first;
    Ok(VanishingReport {
        bands,
        tolerance,
        vanishing,
        verdict: if vanishing {
            "vanishing".into()
        } else {
            "not vanishing".into()
        },
    })
}

fn parse_numbers(s: &str, n: usize) -> Result<Vec<f64>> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| {
            x.trim()
                .parse::<f64>()
                .map_err(|_| Error::Spec(format!("`{}` is not a number", x.trim())))
        })
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Spec(format!("expected {n} numbers in `{s}`")));
    }
    Ok(v)
}

/// Parses a set specification:
/// `all`, `halfplane:<angle>` (`Re(z e^{-i angle}) > 0`), `annulus:<r1>,<r2>`,
/// `disk:<x>,<y>,<r>` (Euclidean), `pseudo:<x>,<y>,<r>` (pseudohyperbolic),
/// `complement:<spec>`, `union:<spec>;<spec>[;..]`, `levelset:<dsl>,<t>`
/// (`expr > t`).
pub fn parse_set(spec: &str) -> Result<Region> {
    let spec = spec.trim();
    if spec == "all" {
        return Ok(Region::Disk);
    }
    let (kind, rest) = spec
        .split_once(':')
        .ok_or_else(|| Error::Spec(format!("set spec `{spec}` lacks a `kind:` prefix")))?;
    match kind {
        "halfplane" => {
            let a = parse_numbers(rest, 1)?[0];
            let rot = Complex64::from_polar(1.0, -a);
            Ok(Region::indicator(spec, move |z| (z * rot).re > 0.0))
        }
        "annulus" => {
            let v = parse_numbers(rest, 2)?;
            let (r1, r2) = (v[0], v[1]);
            if !(0.0 <= r1 && r1 < r2) {
                return Err(Error::Spec(format!("annulus needs 0 <= r1 < r2, got `{rest}`")));
            }
            Ok(Region::indicator(spec, move |z| {
                let m = z.norm();
                r1 < m && m < r2
            }))
        }
        "disk" => {
            let v = parse_numbers(rest, 3)?;
            Ok(Region::Ball(MetricBall::new(Complex64::new(v[0], v[1]), v[2])?))
        }
        "pseudo" => {
            let v = parse_numbers(rest, 3)?;
            Ok(Region::Pseudo(PseudoDisk::new(Complex64::new(v[0], v[1]), v[2])?))
        }
        "complement" => {
            let inner = parse_set(rest)?;
            Ok(Region::indicator(spec, move |z| !inner.contains(z)))
        }
        "union" => {
            let parts = rest.split(';').map(parse_set).collect::<Result<Vec<_>>>()?;
            if parts.is_empty() {
                return Err(Error::Spec("empty union".into()));
            }
            Ok(Region::Union(parts))
        }
        "levelset" => {
            let (src, t) = rest
                .rsplit_once(',')
                .ok_or_else(|| Error::Spec("levelset needs `<expr>,<threshold>`".into()))?;
            let expr = dsl::parse(src)?;
            let t = parse_numbers(t, 1)?[0];
            Ok(Region::indicator(spec, move |z| expr.eval(z).map(|v| v > t).unwrap_or(false)))
        }
        other => Err(Error::Spec(format!("unknown set kind `{other}`"))),
    }
}

/// Unit directions `e^{2 pi i k / n}`.
pub fn directions(n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|k| Complex64::from_polar(1.0, std::f64::consts::TAU * k as f64 / n as f64))
        .collect()
}

/// Boundary-ball radii `2^-1 .. 2^-levels`.
pub fn default_t_grid(levels: usize) -> Vec<f64> {
    (1..=levels).map(|k| 0.5f64.powi(k as i32)).collect()
}

/// Box centers: `rays` directions at moduli `0, 1 - 2^-1, .., 1 - 2^-levels`.
pub fn default_box_grid(rays: usize, levels: usize) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0)];
    for k in 1..=levels {
        let m = 1.0 - 0.5f64.powi(k as i32);
        out.extend(directions(rays).into_iter().map(|u| u * m));
    }
    out
}

fn fraction_in(g: &Region, rule: &DiskQuadrature) -> f64 {
    let mut all = KahanSum::new();
    let mut inside = KahanSum::new();
    for (z, w) in rule.iter() {
        all.add(w);
        if g.contains(z) {
            inside.add(w);
        }
    }
    inside.value() / all.value()
}

/// `|G ∩ K| / |𝔻 ∩ K|` over boundary balls `K = {|z - u| < t}`.
pub fn boundary_density(
    g: &Region,
    t_grid: &[f64],
    u_grid: &[Complex64],
    quad: &DiskQuadrature,
) -> Result<DensityReport> {
    let pairs: Vec<(Complex64, f64)> = t_grid
        .iter()
        .flat_map(|&t| u_grid.iter().map(move |&u| (u, t)))
        .collect();
    let entries = pairs
        .par_iter()
        .map(|&(u, t)| {
            let rule = region_refine(&Region::Boundary(BoundaryBall::new(u, t)?), quad)?;
            Ok(DensityEntry {
                point: u,
                scale: t,
                ratio: fraction_in(g, &rule),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityReport::from_entries(
        format!("boundary balls: {} radii x {} directions", t_grid.len(), u_grid.len()),
        entries,
    ))
}

/// `|G ∩ S(a,r)| / |S(a,r)|` over box centers.
pub fn box_density(g: &Region, r: f64, a_grid: &[Complex64], quad: &DiskQuadrature) -> Result<DensityReport> {
    let entries = a_grid
        .par_iter()
        .map(|&a| {
            let rule = region_refine(&Region::Box(CarlesonBox::new(a, r)?), quad)?;
            Ok(DensityEntry {
                point: a,
                scale: a.norm(),
                ratio: fraction_in(g, &rule),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DensityReport::from_entries(
        format!("Carleson boxes S(a,{r}) over {} centers", a_grid.len()),
        entries,
    ))
}

/// A test function for sampling and reverse-Carleson experiments.
#[derive(Debug, Clone, PartialEq)]
pub enum TestFunction {
    Poly(HarmonicPoly),
    Bump(DkBump),
}

impl TestFunction {
    pub fn eval(&self, z: Complex64) -> Complex64 {
        match self {
            TestFunction::Poly(p) => p.eval(z),
            TestFunction::Bump(b) => Complex64::new(b.eval(z), 0.0),
        }
    }

    /// Rule suited to the function: kernel bumps get the rule pulled back to
    /// their peak.
    fn rule(&self, quad: &DiskQuadrature) -> DiskQuadrature {
        match self {
            TestFunction::Poly(_) => quad.clone(),
            TestFunction::Bump(b) => quad.pullback(b.z0),
        }
    }
}

/// `count` seeded harmonic polynomials of the given degree with coefficients
/// uniform in the unit square, scaled by `1/sqrt(k+1)` at degree `k`.
pub fn random_harmonic_family(degree: usize, count: usize, seed: u64) -> Vec<HarmonicPoly> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let coeffs = (0..2 * degree + 1)
                .map(|i| {
                    let k = if i <= degree { i } else { i - degree };
                    Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))
                        / ((k + 1) as f64).sqrt()
                })
                .collect();
            HarmonicPoly::new(degree, coeffs)
        })
        .collect()
}

/// Truncated `R`-kernel bumps at `modulus * u_k` for `count` directions.
pub fn kernel_bump_family(degree: usize, count: usize, modulus: f64) -> Vec<HarmonicPoly> {
    directions(count)
        .into_iter()
        .map(|u| {
            let a = u * modulus;
            HarmonicPoly::kernel_r(degree, a).scale((1.0 - a.norm_sqr()).powi(2))
        })
        .collect()
}

/// Kernel bumps at `|z0| = modulus` in `count` directions plus `random`
/// seeded polynomials of the given degree.
pub fn adversarial_family(
    alpha: f64,
    degree: usize,
    count: usize,
    modulus: f64,
    random: usize,
    seed: u64,
) -> Result<Vec<TestFunction>> {
    let mut out = Vec::new();
    for u in directions(count) {
        out.push(TestFunction::Bump(DkBump::at(alpha, u * modulus)?));
    }
    out.extend(
        random_harmonic_family(degree, random, seed)
            .into_iter()
            .map(TestFunction::Poly),
    );
    Ok(out)
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FrameReport {
    pub epsilon: f64,
    pub lattice_size: usize,
    pub c1: f64,
    pub c2: f64,
    pub ratio: f64,
    pub per_function: Vec<f64>,
}

/// `sum_n |f(a_n)|^2 |D(a_n,ε)|_ω / ‖f‖^2_ω` over the family; masses are
/// the lattice's `|D(a_n,ε)|_ω`.
pub fn frame_bounds(
    lattice: &Lattice,
    masses: &[f64],
    family: &[HarmonicPoly],
    gs: &GramSystem,
) -> Result<FrameReport> {
    if family.is_empty() {
        return Err(Error::Parameter("empty test family".into()));
    }
    let n = gs.basis.degree;
    let d = gs.dim();
    let mut coeffs = CMatrix::zeros(d, family.len());
    let mut norms = Vec::with_capacity(family.len());
    for (j, f) in family.iter().enumerate() {
        if f.degree != n {
            return Err(Error::Parameter(format!(
                "test function degree {} differs from the space degree {n}",
                f.degree
            )));
        }
        let beta = CVector::from_vec(f.coeffs.clone());
        let norm = (beta.adjoint() * &gs.gram * &beta)[(0, 0)].re;
        if !(norm > 0.0) {
            return Err(Error::ZeroNorm(format!("family member {j}")));
        }
        norms.push(norm);
        coeffs.set_column(j, &beta);
    }
    let chunk = 4096;
    let partial: Vec<Vec<f64>> = lattice
        .points
        .par_chunks(chunk)
        .zip(masses.par_chunks(chunk))
        .map(|(pts, ms)| {
            let mut mono = CMatrix::zeros(pts.len(), d);
            for (i, &p) in pts.iter().enumerate() {
                for (j, m) in harmonic_monomials(n, p).into_iter().enumerate() {
                    mono[(i, j)] = m;
                }
            }
            let vals = mono * &coeffs;
            (0..family.len())
                .map(|j| {
                    vals.column(j)
                        .iter()
                        .zip(ms)
                        .map(|(v, m)| v.norm_sqr() * m)
                        .collect::<KahanSum>()
                        .value()
                })
                .collect()
        })
        .collect();
    let per_function: Vec<f64> = (0..family.len())
        .map(|j| partial.iter().map(|p| p[j]).collect::<KahanSum>().value() / norms[j])
        .collect();
    let c1 = per_function.iter().copied().fold(f64::INFINITY, f64::min);
    let c2 = per_function.iter().copied().fold(0.0, f64::max);
    Ok(FrameReport {
        epsilon: lattice.epsilon,
        lattice_size: lattice.len(),
        c1,
        c2,
        ratio: c2 / c1,
        per_function,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AtomFlavor {
    /// `(1 - |a_n|^2)^2 |D(a_n,ε)|_ω^{-1/2} R_{a_n}`
    R,
    /// `|D(a_n,ε)|_ω^{1/2} K^ω_{a_n}`
    KOmega,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AtomicResult {
    pub coefficients: Vec<Complex64>,
    pub residual: f64,
    pub relative_residual: f64,
    pub coefficient_norm: f64,
    /// `‖c‖_ℓ² / ‖f‖_ω`
    pub coefficient_ratio: f64,
    pub rank: usize,
    pub dimension: usize,
    pub ridge: bool,
}

/// Orthonormal coordinates of every atom, one column per lattice point.
pub fn atom_matrix(lattice: &Lattice, masses: &[f64], flavor: AtomFlavor, gs: &GramSystem) -> CMatrix {
    let n = gs.basis.degree;
    let d = gs.dim();
    let to_on = &gs.gram * gs.q();
    let cols: Vec<CVector> = lattice
        .points
        .par_iter()
        .zip(masses)
        .map(|(&a, &m)| match flavor {
            AtomFlavor::R => {
                let s = (1.0 - a.norm_sqr()).powi(2) / m.sqrt();
                let beta = CVector::from_vec(HarmonicPoly::kernel_r(n, a).scale(s).coeffs);
                &to_on * beta
            }
            AtomFlavor::KOmega => gs.eval_orthonormal(a).map(|c| c.conj()) * Complex64::new(m.sqrt(), 0.0),
        })
        .collect();
    let mut out = CMatrix::zeros(d, cols.len());
    for (j, c) in cols.iter().enumerate() {
        out.set_column(j, c);
    }
    out
}

/// Minimal-norm least-squares coefficients for `f` in the span of the atoms.
pub fn atomic_decompose(
    f: &HarmonicPoly,
    lattice: &Lattice,
    masses: &[f64],
    flavor: AtomFlavor,
    gs: &GramSystem,
) -> Result<AtomicResult> {
    let d = gs.dim();
    let beta = CVector::from_vec(f.coeffs.clone());
    let target = gs.to_orthonormal(&beta);
    let fnorm = target.norm();
    let atoms = atom_matrix(lattice, masses, flavor, gs);
    let frame = &atoms * atoms.adjoint();
    let eig = frame.clone().symmetric_eigen();
    let lmax = eig.eigenvalues.max();
    let rank = eig.eigenvalues.iter().filter(|&&l| l > 1e-12 * lmax).count();
    let ridge = rank < d;
    let shift = if ridge { 1e-12 * lmax } else { 0.0 };
    let inv = DMatrix::from_diagonal(&eig.eigenvalues.map(|l| {
        if l + shift > 0.0 {
            Complex64::new(1.0 / (l + shift), 0.0)
        } else {
            Complex64::new(0.0, 0.0)
        }
    }));
    let y = &eig.eigenvectors * inv * eig.eigenvectors.adjoint() * &target;
    let x = atoms.adjoint() * &y;
    let residual = (&target - &atoms * &x).norm();
    let coefficient_norm = x.norm();
    if ridge && residual > 1e-6 * fnorm.max(f64::MIN_POSITIVE) {
        return Err(Error::RankDeficient { rank, dimension: d });
    }
    Ok(AtomicResult {
        coefficients: x.iter().copied().collect(),
        residual,
        relative_residual: if fnorm > 0.0 { residual / fnorm } else { 0.0 },
        coefficient_norm,
        coefficient_ratio: if fnorm > 0.0 { coefficient_norm / fnorm } else { 0.0 },
        rank,
        dimension: d,
        ridge,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ReverseReport {
    pub inf: f64,
    pub argmin: usize,
    pub ratios: Vec<f64>,
    pub positive: bool,
}

/// `inf_f ∫_G |f|^2 ω / ∫ |f|^2 ω` over the family.
pub fn reverse_carleson_empirical(
    g: &Region,
    w: &Weight,
    family: &[TestFunction],
    quad: &DiskQuadrature,
) -> Result<ReverseReport> {
    if family.is_empty() {
        return Err(Error::Parameter("empty test family".into()));
    }
    let ratios = family
        .par_iter()
        .enumerate()
        .map(|(k, f)| {
            let rule = f.rule(quad);
            let mut all = KahanSum::new();
            let mut inside = KahanSum::new();
            for (z, lam) in rule.iter() {
                let v = lam * f.eval(z).norm_sqr() * w.eval(z)?;
                all.add(v);
                if g.contains(z) {
                    inside.add(v);
                }
            }
            if !(all.value() > 0.0) {
                return Err(Error::ZeroNorm(format!("family member {k}")));
            }
            Ok(inside.value() / all.value())
        })
        .collect::<Result<Vec<f64>>>()?;
    let (argmin, inf) = ratios
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::INFINITY), |a, (k, v)| if v < a.1 { (k, v) } else { a });
    Ok(ReverseReport {
        inf,
        argmin,
        ratios,
        positive: inf >= POSITIVITY_FLOOR,
    })
}

/// `μ = sum δ_{a_n} |D(a_n, ε/4)|_ω`.
pub fn lattice_measure(lattice: &Lattice, w: &Weight, quad: &DiskQuadrature) -> Result<SymbolMeasure> {
    let masses = lattice.disk_masses(w, 0.25 * lattice.epsilon, quad)?;
    SymbolMeasure::atomic(lattice.points.iter().copied().zip(masses).collect())
}

/// The six sets used for reverse-Carleson consistency runs.
pub fn set_catalog() -> Vec<(&'static str, &'static str)> {
    vec![
        ("whole disk", "all"),
        ("inner disk |z| < 1/2", "disk:0,0,0.5"),
        ("right half plane", "halfplane:0"),
        ("annulus 1/2 < |z| < 1", "annulus:0.5,1"),
        ("complement of D(0, 0.1)", "complement:pseudo:0,0,0.1"),
        ("half plane with outer annulus", "union:halfplane:0;annulus:0.9,1"),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::orthonormal_system;
    use crate::lattice::generate_lattice;
    use crate::symbol::Symbol;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn ratio_sweep_examples() {
        let q = DiskQuadrature::build(16, 32).unwrap();
        let w = Weight::unweighted();
        let grid = crate::basis::polar_grid(8, &[0.0, 0.5, 0.9]);
        let rep = carleson_ratio_sweep(&SymbolMeasure::weight_measure(), &w, 0.125, &grid, &q).unwrap();
        assert!((rep.inf - 1.0).abs() < 1e-12 && (rep.sup - 1.0).abs() < 1e-12);

        let phi = SymbolMeasure::density(Symbol::real("1-r2", |z| 1.0 - z.norm_sqr()));
        let rep = carleson_ratio_sweep(&phi, &w, 0.125, &grid, &q).unwrap();
        let maxes: Vec<f64> = rep.profile.iter().map(|p| p.2).collect();
        assert!(maxes.windows(2).all(|p| p[1] < p[0]), "{maxes:?}");

        let delta = SymbolMeasure::atomic(vec![(c(0.5, 0.0), 1.0)]).unwrap();
        let pts = [c(0.5, 0.0), c(0.52, 0.01), c(0.0, 0.0), c(-0.5, 0.0)];
        let rep = carleson_ratio_sweep(&delta, &w, 0.125, &pts, &q).unwrap();
        for e in &rep.entries {
            let d = PseudoDisk::new(e.point, 0.125).unwrap();
            let want = if d.contains(c(0.5, 0.0)) { 1.0 / d.area() } else { 0.0 };
            assert!((e.ratio - want).abs() < 1e-8 * want.max(1.0), "{e:?}");
        }
        assert!(carleson_ratio_sweep(&delta, &w, 0.3, &pts, &q).is_err());
    }

    #[test]
    fn vanishing_examples() {
        let q = DiskQuadrature::build(16, 32).unwrap();
        let w = Weight::unweighted();
        let radii = [0.0, 0.5, 0.8, 0.9, 0.95, 0.99];
        let flat = vanishing_profile(&SymbolMeasure::weight_measure(), &w, 0.125, &radii, 8, 0.1, &q).unwrap();
        assert!(!flat.vanishing);
        let decay = SymbolMeasure::density(Symbol::real("(1-r2)^2", |z| (1.0 - z.norm_sqr()).powi(2)));
        assert!(vanishing_profile(&decay, &w, 0.125, &radii, 8, 0.1, &q).unwrap().vanishing);
        let half = SymbolMeasure::density(Symbol::real("chi", |z| if z.re > 0.0 { 1.0 } else { 0.0 }));
        assert!(!vanishing_profile(&half, &w, 0.125, &radii, 8, 0.1, &q).unwrap().vanishing);
    }

    #[test]
    fn set_specs() {
        let z = c(0.3, -0.2);
        assert!(parse_set("halfplane:0").unwrap().contains(z));
        assert!(!parse_set("halfplane:3.141592653589793").unwrap().contains(z));
        assert!(parse_set("annulus:0.2,0.5").unwrap().contains(z));
        assert!(parse_set("disk:0.3,-0.2,0.01").unwrap().contains(z));
        assert!(!parse_set("complement:disk:0.3,-0.2,0.01").unwrap().contains(z));
        assert!(parse_set("union:annulus:0.9,1;disk:0.3,-0.2,0.01").unwrap().contains(z));
        assert!(parse_set("levelset:x - y,0.4").unwrap().contains(z));
        assert!(!parse_set("levelset:x - y,0.6").unwrap().contains(z));
        assert!(parse_set("pseudo:0,0,0.5").unwrap().contains(z));
        for bad in ["square:1", "annulus:0.5", "annulus:0.6,0.5", "levelset:x+", "nonsense"] {
            assert!(parse_set(bad).unwrap_err().is_config_error(), "{bad}");
        }
    }

    #[test]
    fn boundary_density_examples() {
        let q = DiskQuadrature::build(24, 48).unwrap();
        let us = directions(64);
        let ts = default_t_grid(5);
        assert!((boundary_density(&Region::Disk, &ts, &us, &q).unwrap().inf - 1.0).abs() < 1e-12);
        let half = parse_set("halfplane:0").unwrap();
        let at_i = boundary_density(&half, &[0.1, 0.05], &[c(0.0, 1.0)], &q).unwrap();
        assert!((at_i.inf - 0.5).abs() < 0.02, "{}", at_i.inf);
        let inner = parse_set("disk:0,0,0.5").unwrap();
        assert_eq!(boundary_density(&inner, &[0.5, 0.25], &us, &q).unwrap().sup, 0.0);
    }

    #[test]
    fn box_density_examples() {
        let q = DiskQuadrature::build(24, 48).unwrap();
        let grid = default_box_grid(64, 6);
        assert!((box_density(&Region::Disk, 0.5, &grid, &q).unwrap().inf - 1.0).abs() < 1e-12);
        let hole = parse_set("complement:pseudo:0,0,0.1").unwrap();
        assert!(box_density(&hole, 0.5, &grid, &q).unwrap().inf > 0.5);
    }

    #[test]
    fn frame_and_atomic_on_small_lattice() {
        let l = generate_lattice(1.0 / 20.0, 0.3, 40).unwrap();
        let w = Weight::unweighted();
        let small = DiskQuadrature::build(8, 16).unwrap();
        let masses = l.disk_masses(&w, l.epsilon, &small).unwrap();
        let gs = orthonormal_system(4, &w, &DiskQuadrature::for_degree(4)).unwrap();

        let one = HarmonicPoly::new(4, {
            let mut v = vec![c(0.0, 0.0); 9];
            v[0] = c(1.0, 0.0);
            v
        });
        let rep = frame_bounds(&l, &masses, &[one.clone(), one.scale(5.0)], &gs).unwrap();
        assert!((rep.per_function[0] - rep.per_function[1]).abs() < 1e-12 * rep.per_function[0]);
        let total: f64 = masses.iter().sum();
        assert!((rep.per_function[0] - total).abs() < 1e-10 * total);

        let atom0 = HarmonicPoly::kernel_r(4, c(0.0, 0.0)).scale(1.0 / masses[0].sqrt());
        for flavor in [AtomFlavor::R, AtomFlavor::KOmega] {
            let res = atomic_decompose(&atom0, &l, &masses, flavor, &gs).unwrap();
            assert!(res.residual <= 1e-10, "{flavor:?}: {}", res.residual);
        }
        let zero = one.scale(0.0);
        let res = atomic_decompose(&zero, &l, &masses, AtomFlavor::R, &gs).unwrap();
        assert_eq!(res.residual, 0.0);
        assert!(res.coefficients.iter().all(|c| c.norm() == 0.0));

        let zero_err = frame_bounds(&l, &masses, &[zero], &gs).unwrap_err();
        assert!(matches!(zero_err, Error::ZeroNorm(_)));
    }

    #[test]
    fn reverse_carleson_examples() {
        let q = DiskQuadrature::build(48, 96).unwrap();
        let w = Weight::unweighted();
        let fam = adversarial_family(0.0, 6, 16, 0.95, 10, 17).unwrap();
        assert!((reverse_carleson_empirical(&Region::Disk, &w, &fam, &q).unwrap().inf - 1.0).abs() < 1e-12);
        let inner = parse_set("disk:0,0,0.5").unwrap();
        let rep = reverse_carleson_empirical(&inner, &w, &fam, &q).unwrap();
        assert!(rep.inf < 0.01 && !rep.positive, "{}", rep.inf);
    }
}
