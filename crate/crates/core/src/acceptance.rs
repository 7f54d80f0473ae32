//! The acceptance battery: eleven criteria, each a list of named checks
//! with a runtime budget.
//!
//! A check may carry a `known_defect` note when the stated target is
//! contradicted by the mathematics; such a check is still evaluated and
//! reported, and the criterion line reads FAIL when it fails.

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::basis::{orthonormal_system, polar_grid};
use crate::carleson::{
    adversarial_family, box_density, boundary_density, default_box_grid, default_t_grid, directions,
    frame_bounds, kernel_bump_family, parse_set, random_harmonic_family, reverse_carleson_empirical,
    set_catalog, vanishing_profile, POSITIVITY_FLOOR,
};
use crate::dsl;
use crate::error::Result;
use crate::invertibility::{
    analytic_invertibility_check, block_identity_check, invertibility_report, Verdict, DEFAULT_THRESHOLDS,
};
use crate::kernels::{kernel_bounds_check, kernel_norm_alpha, r_alpha};
use crate::lattice::{generate_lattice, DEFAULT_CUTOFF, DEFAULT_PROBE};
use crate::quadrature::{DiskQuadrature, Region};
use crate::symbol::Symbol;
use crate::toeplitz::{assemble, berezin, singular_values, trace_identity_check, SymbolMeasure};
use crate::weights::{a2_refinement, doubling_check, doubling_pairs, standard_alpha, Weight};

pub const SEED: u64 = 17;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
    /// Why the target is expected to fail, if it is.
    pub known_defect: Option<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: usize,
    pub name: String,
    pub checks: Vec<Check>,
    pub elapsed_s: f64,
    pub budget_s: f64,
}

impl CriterionResult {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.elapsed_s <= self.budget_s
    }

    /// True when every failing check is a documented defect.
    pub fn only_known_defects(&self) -> bool {
        self.elapsed_s <= self.budget_s && self.checks.iter().all(|c| c.passed || c.known_defect.is_some())
    }

    pub fn line(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let mut s = format!("{status} [{:>2}] {} ({:.2} s / {:.0} s)", self.id, self.name, self.elapsed_s, self.budget_s);
        for c in self.checks.iter().filter(|c| !c.passed) {
            s.push_str(&format!("\n       failed: {}: {}", c.name, c.detail));
            if let Some(d) = &c.known_defect {
                s.push_str(&format!("\n       known defect: {d}"));
            }
        }
        s
    }
}

#[derive(Default)]
struct Checks(Vec<Check>);

impl Checks {
    fn add(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
            known_defect: None,
        });
    }

    fn defect(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>, why: &str) {
        self.0.push(Check {
            name: name.into(),
            passed,
            detail: detail.into(),
            known_defect: Some(why.into()),
        });
    }

    fn fail(&mut self, name: impl Into<String>, err: crate::Error) {
        self.add(name, false, format!("error: {err}"));
    }
}

pub struct Criterion {
    pub id: usize,
    pub name: &'static str,
    pub budget_s: f64,
    run: fn(&mut Checks) -> Result<()>,
}

pub fn criteria() -> Vec<Criterion> {
    vec![
        Criterion { id: 1, name: "kernel norm closed form", budget_s: 10.0, run: kernel_norm },
        Criterion { id: 2, name: "doubling with constant 8[w]_A2", budget_s: 30.0, run: doubling },
        Criterion { id: 3, name: "kernel pointwise bounds", budget_s: 10.0, run: kernel_bounds },
        Criterion { id: 4, name: "lattice frame bounds", budget_s: 60.0, run: frame },
        Criterion { id: 5, name: "trace identity", budget_s: 10.0, run: trace },
        Criterion { id: 6, name: "Berezin transform below operator norm", budget_s: 30.0, run: berezin_vs_norm },
        Criterion { id: 7, name: "compactness trend", budget_s: 60.0, run: compactness },
        Criterion { id: 8, name: "block identity for W T W*", budget_s: 20.0, run: block_identity },
        Criterion { id: 9, name: "invertibility indicators", budget_s: 120.0, run: invertibility },
        Criterion { id: 10, name: "reverse Carleson catalog", budget_s: 60.0, run: reverse_catalog },
        Criterion { id: 11, name: "DSL corpus and precedence", budget_s: 1.0, run: dsl_corpus },
    ]
}

pub fn run_criterion(c: &Criterion) -> CriterionResult {
    let start = Instant::now();
    let mut checks = Checks::default();
    if let Err(e) = (c.run)(&mut checks) {
        checks.fail("criterion aborted", e);
    }
    CriterionResult {
        id: c.id,
        name: c.name.to_string(),
        checks: checks.0,
        elapsed_s: start.elapsed().as_secs_f64(),
        budget_s: c.budget_s,
    }
}

/// Runs the selected criteria (all when `ids` is empty) in order.
pub fn run_suite(ids: &[usize]) -> Vec<CriterionResult> {
    criteria()
        .iter()
        .filter(|c| ids.is_empty() || ids.contains(&c.id))
        .map(run_criterion)
        .collect()
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn kernel_norm(ck: &mut Checks) -> Result<()> {
    let quad = DiskQuadrature::build(96, 128)?;
    let grid = polar_grid(16, &[0.1, 0.3, 0.5, 0.7, 0.9]);
    for alpha in [0.0, 0.5, 1.0] {
        let mut worst: f64 = 0.0;
        let mut at = c(0.0, 0.0);
        for &z in &grid {
            let rule = quad.pullback(z);
            let q = rule.sum_real(|l| r_alpha(alpha, z, l).powi(2) * standard_alpha(alpha, l));
            let exact = kernel_norm_alpha(alpha, z)?;
            let rel = (q - exact).abs() / exact;
            if rel > worst {
                worst = rel;
                at = z;
            }
        }
        ck.add(
            format!("alpha = {alpha}"),
            worst <= 1e-6,
            format!("max relative error {worst:.2e} at z = {at:.3}"),
        );
    }
    Ok(())
}

fn doubling(ck: &mut Checks) -> Result<()> {
    let weights = [
        Weight::unweighted(),
        Weight::alpha(0.5)?,
        Weight::alpha(-0.5)?,
        Weight::poly(vec![c(-0.9, 0.0), c(1.0, 0.0)])?,
    ];
    let quad = DiskQuadrature::build(16, 32)?;
    let pairs = doubling_pairs(100, 0.9, 0.125, SEED);
    for w in &weights {
        let a2 = a2_refinement(w, 2)?;
        let rep = doubling_check(w, 0.125, &pairs, a2.estimate, &quad)?;
        ck.add(
            format!("w = {}", w.spec()),
            rep.holds,
            format!(
                "worst ratio {:.4} vs 8 [w]_A2 = {:.4} ({})",
                rep.worst_ratio, rep.bound, a2.verdict
            ),
        );
    }
    Ok(())
}

const KERNEL_LOWER_DEFECT: &str = "min over D(λ,1/8) of |R_λ(z)|(1-|λ|)^2 drops below 1/2 near |λ| = 0.64 \
    (0.471 at |λ| = 0.76, 0.406 at |λ| = 0.95, about 0.383 as |λ| -> 1); with (1-|λ|^2)^2 in place of \
    (1-|λ|)^2 the lower bound holds on the whole grid";

fn kernel_bounds(ck: &mut Checks) -> Result<()> {
    let grid = polar_grid(16, &[0.1, 0.3, 0.5, 0.7, 0.9, 0.95]);
    let mut lower_fail = Vec::new();
    let mut upper_fail = 0;
    let mut min_lower = f64::INFINITY;
    let mut min_upper = f64::INFINITY;
    for &l in &grid {
        let rep = kernel_bounds_check(l, 0.125, 1000)?;
        min_lower = min_lower.min(rep.lower_margin);
        min_upper = min_upper.min(rep.upper_margin);
        if rep.lower_margin < 0.0 {
            lower_fail.push(l.norm());
        }
        if rep.upper_margin < 0.0 {
            upper_fail += 1;
        }
    }
    ck.add(
        "upper bound 3/(1-|λ|)^2",
        upper_fail == 0,
        format!("smallest margin {min_upper:.4} over {} centers", grid.len()),
    );
    lower_fail.sort_by(f64::total_cmp);
    lower_fail.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    ck.defect(
        "lower bound 1/2/(1-|λ|)^2",
        lower_fail.is_empty(),
        format!("smallest margin {min_lower:.4}; fails at |λ| in {lower_fail:.2?}"),
        KERNEL_LOWER_DEFECT,
    );
    Ok(())
}

fn frame(ck: &mut Checks) -> Result<()> {
    let lattices = [
        generate_lattice(1.0 / 32.0, DEFAULT_CUTOFF, DEFAULT_PROBE)?,
        generate_lattice(1.0 / 64.0, DEFAULT_CUTOFF, DEFAULT_PROBE)?,
    ];
    let small = DiskQuadrature::build(8, 16)?;
    let quad = DiskQuadrature::for_degree(12);
    let mut family = random_harmonic_family(12, 50, SEED);
    family.extend(kernel_bump_family(12, 16, 0.9));
    for w in [Weight::unweighted(), Weight::alpha(0.5)?] {
        let gs = orthonormal_system(12, &w, &quad)?;
        let mut ratios = Vec::new();
        for lat in &lattices {
            let masses = lat.disk_masses(&w, lat.epsilon, &small)?;
            let rep = frame_bounds(lat, &masses, &family, &gs)?;
            ck.add(
                format!("w = {}, eps = 1/{:.0}", w.spec(), 1.0 / lat.epsilon),
                rep.c1 > 0.0 && rep.ratio <= 100.0,
                format!("C1 {:.4}, C2 {:.4}, ratio {:.3} ({} points)", rep.c1, rep.c2, rep.ratio, rep.lattice_size),
            );
            ratios.push(rep.ratio);
        }
        let q = ratios[1] / ratios[0];
        ck.add(
            format!("w = {}, ratio stable under halving eps", w.spec()),
            (0.5..=2.0).contains(&q),
            format!("ratio(1/64) / ratio(1/32) = {q:.3}"),
        );
    }
    Ok(())
}

/// The five measures used by the trace and Berezin criteria, all against
/// `ω = 1`.
pub fn measure_battery() -> Result<Vec<SymbolMeasure>> {
    Ok(vec![
        SymbolMeasure::weight_measure(),
        SymbolMeasure::density(Symbol::parse_dsl("r^2")?),
        SymbolMeasure::density(Symbol::parse_dsl("(1 - r^2)^(-0.25)")?),
        SymbolMeasure::atomic(vec![(c(0.0, 0.0), 1.0), (c(0.5, 0.0), 0.5)])?,
        SymbolMeasure::density(Symbol::parse_dsl("chi_pos(x)")?),
    ])
}

fn trace(ck: &mut Checks) -> Result<()> {
    let w = Weight::unweighted();
    let quad = DiskQuadrature::for_degree(12);
    let gs = orthonormal_system(12, &w, &quad)?;
    for sm in measure_battery()? {
        let tm = assemble(&sm, &gs, &quad)?;
        let rep = trace_identity_check(&sm, &gs, &quad, &tm)?;
        ck.add(
            sm.label(),
            rep.holds,
            format!("trace {:.12}, kernel integral {:.12}, deviation {:.2e}", rep.trace, rep.kernel_integral, rep.deviation),
        );
    }
    Ok(())
}

fn berezin_vs_norm(ck: &mut Checks) -> Result<()> {
    let w = Weight::unweighted();
    let grid = polar_grid(16, &[0.0, 0.3, 0.5, 0.7, 0.8, 0.9]);
    let bq = DiskQuadrature::build(64, 128)?;
    for sm in measure_battery()? {
        let sup = grid
            .iter()
            .map(|&z| berezin(&sm, z, &w, &bq))
            .collect::<Result<Vec<f64>>>()?
            .into_iter()
            .fold(0.0, f64::max);
        let mut excess = Vec::new();
        for n in [12, 20] {
            let quad = DiskQuadrature::for_degree(n);
            let gs = orthonormal_system(n, &w, &quad)?;
            let smax = singular_values(&assemble(&sm, &gs, &quad)?)?[0];
            excess.push((n, smax, (sup - smax).max(0.0)));
        }
        let ok = excess.iter().all(|e| e.2 <= 0.05) && excess[1].2 <= excess[0].2;
        ck.add(
            sm.label(),
            ok,
            format!(
                "sup Berezin {sup:.4}; sigma_max {:.4} (N=12), {:.4} (N=20); excess {:.2e}, {:.2e}",
                excess[0].1, excess[1].1, excess[0].2, excess[1].2
            ),
        );
    }
    Ok(())
}

fn compactness(ck: &mut Checks) -> Result<()> {
    let w = Weight::unweighted();
    let ns = [8, 12, 16, 20];
    let phi = SymbolMeasure::density(Symbol::parse_dsl("(1 - r^2)^2")?);
    let one = SymbolMeasure::weight_measure();
    let mut tenth = Vec::new();
    let mut middle = Vec::new();
    let mut one_min = Vec::new();
    for n in ns {
        let quad = DiskQuadrature::for_degree(n);
        let gs = orthonormal_system(n, &w, &quad)?;
        let s = singular_values(&assemble(&phi, &gs, &quad)?)?;
        tenth.push(s[9]);
        middle.push(s[s.len() / 2]);
        let s1 = singular_values(&assemble(&one, &gs, &quad)?)?;
        one_min.push(*s1.last().unwrap());
    }
    let nonincreasing = tenth.windows(2).all(|p| p[1] <= p[0] + 1e-12);
    ck.add(
        "10th singular value nonincreasing in N",
        nonincreasing,
        format!("{tenth:.6?}"),
    );
    let strict = middle.windows(2).all(|p| p[1] < p[0]);
    ck.add(
        "singular value at k = dim/2 strictly decreasing",
        strict,
        format!("{middle:.6?}"),
    );
    let pq = DiskQuadrature::build(12, 24)?;
    let radii = [0.0, 0.5, 0.8, 0.9, 0.95, 0.99];
    let vp = vanishing_profile(&phi, &w, 0.125, &radii, 16, 0.1, &pq)?;
    ck.add(
        "(1-|z|^2)^2 profile vanishes",
        vp.verdict == "vanishing",
        format!("verdict {}, bands {:.4?}", vp.verdict, vp.bands),
    );
    let flat = vanishing_profile(&one, &w, 0.125, &radii, 16, 0.1, &pq)?;
    let dev = flat.bands.iter().map(|b| (b.1 - 1.0).abs()).fold(0.0, f64::max);
    ck.add(
        "w dA profile flat at 1",
        dev < 1e-10 && !flat.vanishing,
        format!("max |ratio - 1| = {dev:.2e}, verdict {}", flat.verdict),
    );
    let dev = one_min.iter().map(|s| (s - 1.0).abs()).fold(0.0, f64::max);
    ck.add("sigma_min = 1 for w dA", dev < 1e-10, format!("{one_min:.12?}"));
    Ok(())
}

fn block_identity(ck: &mut Checks) -> Result<()> {
    let z = Symbol::analytic_poly(vec![c(0.0, 0.0), c(1.0, 0.0)]);
    let battery = [
        (Symbol::constant(1.0), true),
        (z, true),
        (Symbol::new("conj z", |z: Complex64| z.conj()), false),
        (Symbol::parse_dsl("r^2")?, false),
        (Symbol::parse_dsl("x")?, false),
    ];
    let quad = DiskQuadrature::for_degree(8);
    for (phi, analytic) in &battery {
        for alpha in [0.0, 1.0] {
            let rep = block_identity_check(phi, alpha, 8, &quad)?;
            let mut ok = rep.deviation <= 1e-8;
            let mut detail = format!("deviation {:.2e}", rep.deviation);
            if *analytic {
                ok &= rep.c_block_max <= 1e-10 && rep.rank_one_max <= 1e-10;
                detail.push_str(&format!(", C block {:.2e}, rank-one {:.2e}", rep.c_block_max, rep.rank_one_max));
            }
            ck.add(format!("{} at alpha = {alpha}", phi.label()), ok, detail);
        }
    }
    Ok(())
}

const HALFPLANE_DENSITY_DEFECT: &str = "boundary balls centred at u = -1 miss {Re z > 0} once t < 1, so the \
    infimum over all boundary balls is 0; the value 1/2 is the limit at u = ±i only";

/// `|G ∩ K| / |𝔻 ∩ K|` at `u = i` for the smallest tested radius.
fn density_at_i(g: &Region, quad: &DiskQuadrature) -> Result<f64> {
    let t = *default_t_grid(6).last().unwrap();
    Ok(boundary_density(g, &[t], &[c(0.0, 1.0)], quad)?.inf)
}

fn invertibility(ck: &mut Checks) -> Result<()> {
    let ns = [8, 12, 16, 20];
    let step = Symbol::parse_dsl("0.2 + 0.8*chi_pos(x)")?;
    let rep = invertibility_report(&step, 0.0, &ns, &DEFAULT_THRESHOLDS, None)?;
    let sig: Vec<f64> = rep.sweep.iter().map(|r| r.sigma_min_harmonic).collect();
    ck.add(
        "0.2 + 0.8 chi: sigma_min above floor across N",
        sig.iter().all(|&s| s > rep.floor),
        format!("{sig:.4?}"),
    );
    ck.add(
        "0.2 + 0.8 chi: inf of harmonic Berezin >= 0.2",
        rep.berezin_harmonic_inf >= 0.2 - 1e-12,
        format!("{:.6}", rep.berezin_harmonic_inf),
    );
    ck.add(
        "0.2 + 0.8 chi: inf of analytic Berezin >= 0.2",
        rep.berezin_analytic_inf >= 0.2 - 1e-12,
        format!("{:.6}", rep.berezin_analytic_inf),
    );
    ck.add(
        "0.2 + 0.8 chi: verdict invertible",
        rep.verdict == Verdict::Invertible,
        format!("{}, density indicator {:.3}", rep.verdict, rep.density_indicator),
    );
    let half = rep.level_sets.iter().find(|l| l.threshold == 0.5).map(|l| l.boundary_density);
    let half = half.unwrap_or(f64::NAN);
    ck.defect(
        "0.2 + 0.8 chi: boundary density of {phi > 0.5} = 0.5 +- 0.05",
        (half - 0.5).abs() <= 0.05,
        format!("infimum {half:.4}"),
        HALFPLANE_DENSITY_DEFECT,
    );
    let g = Region::indicator("{phi > 0.5}", move |z| z.re > 0.0);
    let at_i = density_at_i(&g, &DiskQuadrature::build(24, 48)?)?;
    ck.add(
        "0.2 + 0.8 chi: density of {phi > 0.5} at u = i is 0.5 +- 0.05",
        (at_i - 0.5).abs() <= 0.05,
        format!("{at_i:.4}"),
    );

    let decay = invertibility_report(&Symbol::parse_dsl("1 - r^2")?, 0.0, &ns, &DEFAULT_THRESHOLDS, None)?;
    let sig: Vec<f64> = decay.sweep.iter().map(|r| r.sigma_min_harmonic).collect();
    ck.add(
        "1 - |z|^2: all indicators decay, verdict not invertible",
        decay.verdict == Verdict::NotInvertible
            && decay.sigma_decreasing
            && decay.berezin_harmonic_inf < decay.floor
            && decay.berezin_analytic_inf < decay.floor
            && decay.density_indicator < decay.floor,
        format!(
            "{}; sigma_min {sig:.4?}; Berezin inf {:.4} / {:.4}; density {:.3}",
            decay.verdict, decay.berezin_harmonic_inf, decay.berezin_analytic_inf, decay.density_indicator
        ),
    );

    // T_z maps 1 to z with ‖z‖ = 1/sqrt 2 for ω = 1, and this is the smallest
    // singular value of every truncation.
    let c0 = FRAC_1_SQRT_2;
    let az = analytic_invertibility_check(&[c(0.0, 0.0), c(1.0, 0.0)], 0.0, &[8, 12, 16, 20, 24])?;
    let sig: Vec<f64> = az.rows.iter().map(|r| r.sigma_min).collect();
    ck.add(
        "phi = z: sigma_min >= c0 = 1/sqrt 2 up to N = 24 while inf |phi| = 0",
        sig.iter().all(|&s| s >= c0 - 1e-10) && az.inf_modulus == 0.0 && az.counterexample,
        format!("{sig:.10?}, inf |phi| = {}", az.inf_modulus),
    );
    Ok(())
}

const BOX_DEFECT: &str = "the box condition at a fixed r = 1/2 is sufficient for reverse Carleson, not \
    necessary: S(a, 1/2) for interior centres a can miss a set that still meets every boundary ball";

fn reverse_catalog(ck: &mut Checks) -> Result<()> {
    let quad = DiskQuadrature::build(24, 48)?;
    let rq = DiskQuadrature::build(32, 64)?;
    let w = Weight::unweighted();
    let t_grid = default_t_grid(6);
    let u_grid = directions(64);
    let a_grid = default_box_grid(64, 6);
    let family = adversarial_family(0.0, 12, 16, 0.95, 50, SEED)?;
    for (name, spec) in set_catalog() {
        let g = parse_set(spec)?;
        let bd = boundary_density(&g, &t_grid, &u_grid, &quad)?;
        let bx = box_density(&g, 0.5, &a_grid, &quad)?;
        let rc = reverse_carleson_empirical(&g, &w, &family, &rq)?;
        let signs = [bd.positive(), bx.positive(), rc.positive];
        let agree = signs.iter().all(|&s| s) || signs.iter().all(|&s| !s);
        let detail = format!(
            "boundary {:.4}, box {:.4}, reverse {:.4} (floor {POSITIVITY_FLOOR})",
            bd.inf, bx.inf, rc.inf
        );
        ck.add(
            format!("{name}: boundary density and reverse Carleson agree"),
            signs[0] == signs[2],
            detail.clone(),
        );
        ck.add(
            format!("{name}: box density positive implies reverse Carleson"),
            !signs[1] || signs[2],
            detail.clone(),
        );
        ck.defect(format!("{name}: all three signs agree"), agree, detail.clone(), BOX_DEFECT);
        if spec == "disk:0,0,0.5" {
            ck.add(format!("{name}: fails all three"), signs.iter().all(|&s| !s), detail.clone());
        }
        if spec == "halfplane:0" {
            ck.defect(
                format!("{name}: passes all three"),
                signs.iter().all(|&s| s),
                detail.clone(),
                HALFPLANE_DENSITY_DEFECT,
            );
            ck.defect(
                format!("{name}: boundary density 0.5 +- 0.05"),
                (bd.inf - 0.5).abs() <= 0.05,
                format!("infimum {:.4} at u = {:.3}", bd.inf, bd.argmin),
                HALFPLANE_DENSITY_DEFECT,
            );
            let at_i = density_at_i(&g, &quad)?;
            ck.add(
                format!("{name}: density at u = i is 0.5 +- 0.05"),
                (at_i - 0.5).abs() <= 0.05,
                format!("{at_i:.4}"),
            );
        }
    }
    Ok(())
}

/// Round-trip corpus for the expression language.
pub const DSL_CORPUS: [&str; 50] = [
    "1",
    "0.5",
    "x",
    "y",
    "r",
    "theta",
    "pi",
    "-x",
    "--x",
    "x + y",
    "x - y - r",
    "x - (y - r)",
    "x * y / r",
    "x / (y * r)",
    "2^3^2",
    "(2^3)^2",
    "-2^2",
    "(-2)^2",
    "2^-1",
    "x^2 + y^2",
    "r^2",
    "1 - r^2",
    "(1 - r^2)^0.5",
    "2*(1 - r^2)",
    "1.5*(1 - r^2)^0.5",
    "(1 - r^2)^(-0.25)",
    "abs(x)",
    "abs(x - 0.9)^2 + y^2",
    "exp(-r)",
    "log(2 - r)",
    "sin(theta)",
    "cos(2*theta)",
    "sqrt(1 - x*x)",
    "re(x)",
    "im(y)",
    "chi_pos(x)",
    "0.2 + 0.8*chi_pos(x)",
    "chi_pos(r - 0.5)",
    "chi_pos(-x)*chi_pos(y)",
    "exp(sin(theta))*r",
    "1/(1 + r)",
    "1/(2 - x)/(2 + y)",
    "x*(y + r)*(r - y)",
    "(x + 1)^(y + 1)",
    "-(x + y)",
    "-x*y",
    "pi*r^2",
    "sqrt(abs(log(1 + r)))",
    "cos(pi*x)^2 + sin(pi*y)^2",
    "1e-3 + r^4",
];

fn dsl_corpus(ck: &mut Checks) -> Result<()> {
    let mut failures = Vec::new();
    for src in DSL_CORPUS {
        let e = dsl::parse(src)?;
        let printed = e.to_string();
        match dsl::parse(&printed) {
            Ok(back) if back == e => {}
            _ => failures.push(format!("`{src}` -> `{printed}`")),
        }
    }
    ck.add(
        format!("{} expressions round-trip", DSL_CORPUS.len()),
        failures.is_empty(),
        if failures.is_empty() { "all equal".into() } else { failures.join("; ") },
    );
    let z = c(0.0, 0.0);
    let v = dsl::parse("2^3^2")?.eval(z)?;
    ck.add("2^3^2 = 512", v == 512.0, format!("{v}"));
    let v = dsl::parse("-2^2")?.eval(z)?;
    ck.add("-2^2 = -4", v == -4.0, format!("{v}"));
    let a = dsl::parse("r^2")?;
    let b = dsl::parse("x*x+y*y")?;
    let mut worst: f64 = 0.0;
    for k in 0..1000 {
        let p = Complex64::from_polar(((k as f64 + 0.5) / 1000.0).sqrt() * 0.999, 2.399963229728653 * k as f64);
        worst = worst.max((a.eval(p)? - b.eval(p)?).abs());
    }
    ck.add("r^2 = x*x+y*y on 1000 points", worst <= 1e-14, format!("max difference {worst:.1e}"));
    Ok(())
}
