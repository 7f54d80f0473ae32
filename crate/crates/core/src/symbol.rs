//! Symbols (functions on the disk) and truncated harmonic polynomials.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::dsl::{self, Expr};
use crate::error::Result;

type SymbolFn = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

/// A complex-valued function on the disk with a printable label.
#[derive(Clone)]
pub struct Symbol {
    label: String,
    real: bool,
    f: SymbolFn,
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Symbol({})", self.label)
    }
}

impl Symbol {
    pub fn new<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> Complex64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            real: false,
            f: Arc::new(move |z| Ok(f(z))),
        }
    }

    /// A real-valued symbol.
    pub fn real<F>(label: impl Into<String>, f: F) -> Self
    where
        F: Fn(Complex64) -> f64 + Send + Sync + 'static,
    {
        Self {
            label: label.into(),
            real: true,
            f: Arc::new(move |z| Ok(Complex64::new(f(z), 0.0))),
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::real(format!("{c}"), move |_| c)
    }

    pub fn from_expr(expr: Expr) -> Self {
        let label = expr.to_string();
        Self {
            label,
            real: true,
            f: Arc::new(move |z| Ok(Complex64::new(expr.eval(z)?, 0.0))),
        }
    }

    pub fn parse_dsl(src: &str) -> Result<Self> {
        Ok(Self::from_expr(dsl::parse(src)?))
    }

    /// Analytic polynomial `sum c_k z^k`.
    pub fn analytic_poly(coeffs: Vec<Complex64>) -> Self {
        let label = poly_label(&coeffs);
        Self::new(label, move |z| horner(&coeffs, z))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    #[inline]
    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        (self.f)(z)
    }

    /// `z -> phi(conj z)`.
    pub fn star(&self) -> Self {
        let f = self.f.clone();
        Self {
            label: format!("{}(conj z)", self.label),
            real: self.real,
            f: Arc::new(move |z| f(z.conj())),
        }
    }

    /// `z -> conj(phi(conj z))`.
    pub fn reflect_conj(&self) -> Self {
        let f = self.f.clone();
        Self {
            label: format!("conj {}(conj z)", self.label),
            real: self.real,
            f: Arc::new(move |z| f(z.conj()).map(|v| v.conj())),
        }
    }
}

/// `"2 + z"`, `"z^2 - (0.5+1i) z"` style labels.
pub fn poly_label(coeffs: &[Complex64]) -> String {
    let mut out = String::new();
    for (k, c) in coeffs.iter().enumerate() {
        if *c == Complex64::new(0.0, 0.0) {
            continue;
        }
        let mono = match k {
            0 => String::new(),
            1 => "z".into(),
            _ => format!("z^{k}"),
        };
        let (neg, mag) = if c.im == 0.0 {
            (c.re < 0.0, format!("{}", c.re.abs()))
        } else {
            (false, format!("({}{:+}i)", c.re, c.im))
        };
        let coef = if k > 0 && mag == "1" { String::new() } else if k > 0 { format!("{mag} ") } else { mag };
        if out.is_empty() {
            out = format!("{}{coef}{mono}", if neg { "-" } else { "" });
        } else {
            out.push_str(&format!(" {} {coef}{mono}", if neg { '-' } else { '+' }));
        }
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

pub(crate) fn horner(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .rev()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

/// Values `[1, z, .., z^n, conj z, .., conj z^n]` of the truncated harmonic
/// monomials.
pub fn harmonic_monomials(n: usize, z: Complex64) -> Vec<Complex64> {
    let mut out = vec![Complex64::new(0.0, 0.0); 2 * n + 1];
    fill_harmonic_monomials(n, z, &mut out);
    out
}

pub(crate) fn fill_harmonic_monomials(n: usize, z: Complex64, out: &mut [Complex64]) {
    out[0] = Complex64::new(1.0, 0.0);
    let mut p = Complex64::new(1.0, 0.0);
    for k in 1..=n {
        p *= z;
        out[k] = p;
        out[n + k] = p.conj();
    }
}

/// A harmonic polynomial `a_0 + sum a_k z^k + sum b_k conj(z)^k`, stored in
/// the monomial order of [`harmonic_monomials`].
#[derive(Debug, Clone, PartialEq)]
pub struct HarmonicPoly {
    pub degree: usize,
    pub coeffs: Vec<Complex64>,
}

impl HarmonicPoly {
    pub fn new(degree: usize, coeffs: Vec<Complex64>) -> Self {
        assert_eq!(coeffs.len(), 2 * degree + 1, "coefficient count");
        Self { degree, coeffs }
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        let n = self.degree;
        let mut acc = self.coeffs[0];
        let mut p = Complex64::new(1.0, 0.0);
        for k in 1..=n {
            p *= z;
            acc += self.coeffs[k] * p + self.coeffs[n + k] * p.conj();
        }
        acc
    }

    /// Truncation of the unweighted harmonic kernel `R_a`:
    /// `1 + sum (k+1) (conj(a)^k z^k + a^k conj(z)^k)`.
    pub fn kernel_r(degree: usize, a: Complex64) -> Self {
        let mut coeffs = vec![Complex64::new(0.0, 0.0); 2 * degree + 1];
        coeffs[0] = Complex64::new(1.0, 0.0);
        let mut p = Complex64::new(1.0, 0.0);
        for k in 1..=degree {
            p *= a;
            let s = (k + 1) as f64;
            coeffs[k] = p.conj() * s;
            coeffs[degree + k] = p * s;
        }
        Self { degree, coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            degree: self.degree,
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn poly_labels() {
        assert_eq!(poly_label(&[c(0.0, 0.0), c(1.0, 0.0)]), "z");
        assert_eq!(poly_label(&[c(2.0, 0.0), c(1.0, 0.0)]), "2 + z");
        assert_eq!(poly_label(&[c(-2.0, 0.0), c(1.0, 0.0)]), "-2 + z");
        assert_eq!(poly_label(&[c(0.0, 0.0), c(-0.5, 0.0), c(1.0, 0.0)]), "-0.5 z + z^2");
        assert_eq!(poly_label(&[c(0.5, 1.0)]), "(0.5+1i)");
        assert_eq!(poly_label(&[]), "0");
    }

    #[test]
    fn conjugate_symbol_definitions() {
        let phi = Symbol::new("z", |z| z);
        let z = c(0.3, 0.4);
        assert_eq!(phi.star().eval(z).unwrap(), z.conj());
        assert_eq!(phi.reflect_conj().eval(z).unwrap(), z);
        let radial = Symbol::real("r2", |z| z.norm_sqr());
        assert_eq!(radial.star().eval(z).unwrap(), radial.eval(z).unwrap());
        assert_eq!(radial.reflect_conj().eval(z).unwrap(), radial.eval(z).unwrap());
        let re = Symbol::real("re", |z| z.re);
        assert_eq!(re.star().eval(z).unwrap().re, 0.3);
        assert_eq!(re.reflect_conj().eval(z).unwrap().re, 0.3);
    }

    #[test]
    fn truncated_kernel_matches_series() {
        let a = c(0.3, -0.2);
        let z = c(-0.1, 0.25);
        let p = HarmonicPoly::kernel_r(60, a);
        let exact = 2.0 * (c(1.0, 0.0) / (c(1.0, 0.0) - a.conj() * z).powi(2)).re - 1.0;
        assert!((p.eval(z) - exact).norm() < 1e-14);
    }

    #[test]
    fn monomials_layout() {
        let z = c(0.5, 0.5);
        let m = harmonic_monomials(2, z);
        assert_eq!(m.len(), 5);
        assert_eq!(m[2], z * z);
        assert_eq!(m[4], (z * z).conj());
    }
}
