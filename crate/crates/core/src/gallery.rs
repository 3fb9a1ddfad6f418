//! Closed-form maps: the harmonic fold, power maps, the squeeze maps and the
//! counterexamples built from them, and the folded square.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{DiscreteMap, UnitDiskMesh};

/// `x + iy ↦ (1-x)² - y² + 1.6(x+y) + i(x² - (2+y)² - x - 2y)`, a harmonic
/// polynomial whose boundary trace is a homeomorphism onto a nonconvex curve
/// but which folds inside the disk.
pub fn fig1(z: Complex64) -> Complex64 {
    let (x, y) = (z.re, z.im);
    Complex64::new((1.0 - x).powi(2) - y * y + 1.6 * (x + y), x * x - (2.0 + y).powi(2) - x - 2.0 * y)
}

/// Jacobian determinant of [`fig1`], which is affine.
pub fn fig1_jacobian(z: Complex64) -> f64 {
    4.0 - 15.2 * z.re - 1.2 * z.im
}

pub fn power(z: Complex64, n: u32) -> Complex64 {
    z.powu(n)
}

/// The squeeze map `G_{ω,s,a}` on the closed disk `B(ω, 2s)`: the outer
/// annulus is stretched over the punctured disk and the inner disk `B(ω, s)`
/// collapses linearly onto the segment `[ω, ω + a]`.
pub fn squeeze(z: Complex64, omega: Complex64, s: f64, a: Complex64) -> Result<Complex64> {
    let w = z - omega;
    let r = w.norm();
    if r > 2.0 * s * (1.0 + 1e-12) {
        return Err(Error::Domain {
            map: "squeeze".into(),
            detail: format!("|z - ω| = {r} exceeds 2s = {}", 2.0 * s),
        });
    }
    if r >= s {
        Ok(omega + w * (2.0 * (r - s) / r))
    } else {
        Ok(omega + a * ((s - r) / s))
    }
}

/// `G_{ω,s,a,ε}`: like [`squeeze`] but the circles `|z - ω| = r`, `ε < r < s`,
/// land on the segment at logarithmic height `log(s/r) / log(s/ε)`.
pub fn log_squeeze(z: Complex64, omega: Complex64, s: f64, a: Complex64, eps: f64) -> Result<Complex64> {
    if !(eps > 0.0 && eps < s) {
        return Err(Error::InvalidArgument(format!("log squeeze needs 0 < ε < s, got ε = {eps}, s = {s}")));
    }
    let w = z - omega;
    let r = w.norm();
    if r > 2.0 * s * (1.0 + 1e-12) {
        return Err(Error::Domain {
            map: "logsqueeze".into(),
            detail: format!("|z - ω| = {r} exceeds 2s = {}", 2.0 * s),
        });
    }
    if r >= s {
        Ok(omega + w * (2.0 * (r - s) / r))
    } else if r > eps {
        let height = (s.ln() - r.ln()) / (s.ln() - eps.ln());
        Ok(omega + a * height)
    } else {
        Ok(omega + a)
    }
}

pub fn example2(z: Complex64) -> Result<Complex64> {
    if z.norm() > 1.0 + 1e-12 {
        return Err(Error::Domain { map: "example2".into(), detail: format!("|z| = {} > 1", z.norm()) });
    }
    squeeze(z, Complex64::new(0.0, 0.0), 0.5, Complex64::new(1.0, 0.0))
}

/// The fold of the square `[0,2]²` along `x = 1`.
pub fn square_fold(z: Complex64) -> Result<Complex64> {
    let (x, y) = (z.re, z.im);
    let tol = 1e-12;
    if !(-tol..=2.0 + tol).contains(&x) || !(-tol..=2.0 + tol).contains(&y) {
        return Err(Error::Domain { map: "squarefold".into(), detail: format!("{z} outside [0,2]²") });
    }
    if x <= 1.0 {
        Ok(Complex64::new(2.0 * x, y))
    } else {
        Ok(Complex64::new(-2.0 * x + 4.0, y))
    }
}

/// One squeezed disk of the boundary-discontinuous counterexample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SqueezeDisk {
    pub omega: Complex64,
    pub s: f64,
    pub a: Complex64,
    pub eps: f64,
}

/// Identity outside finitely many disjoint disks `B(ω_k, 2s_k)`, a log
/// squeeze inside each. With the default parameters `ω_k = 1 - 1/k`,
/// `s_k = 10^-k`, `a = 2`, `ε_k = e^{-k⁴} s_k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Example1 {
    pub disks: Vec<SqueezeDisk>,
    /// Indices `k` whose `ε_k` underflowed and was clamped.
    pub clamped: Vec<usize>,
}

impl Example1 {
    pub fn new(k_terms: usize) -> Result<Self> {
        if k_terms == 0 {
            return Err(Error::InvalidArgument("example1 needs at least one term".into()));
        }
        let mut disks = Vec::with_capacity(k_terms);
        let mut clamped = Vec::new();
        for k in 1..=k_terms {
            let kf = k as f64;
            let s = 10f64.powi(-(k as i32));
            let mut eps = (-kf.powi(4)).exp() * s;
            if !eps.is_normal() {
                log::warn!("example1: ε_{k} = e^(-{})·s_{k} underflows; clamped to {:e}", k.pow(4), f64::MIN_POSITIVE);
                eps = f64::MIN_POSITIVE;
                clamped.push(k);
            }
            disks.push(SqueezeDisk { omega: Complex64::new(1.0 - 1.0 / kf, 0.0), s, a: Complex64::new(2.0, 0.0), eps });
        }
        let mut out = Self::with_disks(disks)?;
        out.clamped = clamped;
        Ok(out)
    }

    /// Custom disks; rejected unless each `B(ω, 2s)` lies in the open unit
    /// disk and the disks are pairwise disjoint.
    pub fn with_disks(disks: Vec<SqueezeDisk>) -> Result<Self> {
        for (k, d) in disks.iter().enumerate() {
            if !(d.s > 0.0 && d.eps > 0.0 && d.eps < d.s) {
                return Err(Error::InvalidArgument(format!("disk {k}: need 0 < ε < s")));
            }
            if d.omega.norm() + 2.0 * d.s >= 1.0 {
                return Err(Error::InvalidArgument(format!("disk {k}: B(ω, 2s) leaves the unit disk")));
            }
        }
        for i in 0..disks.len() {
            for j in i + 1..disks.len() {
                let gap = (disks[i].omega - disks[j].omega).norm();
                if gap <= 2.0 * (disks[i].s + disks[j].s) {
                    return Err(Error::InvalidArgument(format!("disks {i} and {j} overlap")));
                }
            }
        }
        Ok(Self { disks, clamped: Vec::new() })
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        if z.norm() > 1.0 + 1e-12 {
            return Err(Error::Domain { map: "example1".into(), detail: format!("|z| = {} > 1", z.norm()) });
        }
        for d in &self.disks {
            if (z - d.omega).norm() < 2.0 * d.s {
                return log_squeeze(z, d.omega, d.s, d.a, d.eps);
            }
        }
        Ok(z)
    }
}

/// Closed form of the Dirichlet energy of a log squeeze over `B(ω, 2s)`:
/// `C₁ s²` from the stretched annulus plus `2π|a|² / log(s/ε)` from the
/// logarithmic core. `C₁` is left to the caller.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyBound {
    pub s_squared: f64,
    pub core: f64,
}

impl EnergyBound {
    pub fn log_squeeze(s: f64, a: Complex64, eps: f64) -> Self {
        Self { s_squared: s * s, core: 2.0 * PI * a.norm_sqr() / (s.ln() - eps.ln()) }
    }

    pub fn value(&self, c1: f64) -> f64 {
        c1 * self.s_squared + self.core
    }
}

/// `∫|Df|²` over the disk `B(ω, breaks.last())`, integrated in polar
/// coordinates with the midpoint rule on each radial piece between
/// consecutive `breaks`, and central-difference gradients. Put the radii
/// where `f` changes formula in `breaks` so no cell straddles a kink.
pub fn polar_dirichlet_energy(
    f: impl Fn(Complex64) -> Result<Complex64>,
    omega: Complex64,
    breaks: &[f64],
    n_r: usize,
    n_theta: usize,
) -> Result<f64> {
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[0] < w[1])) || breaks[0] < 0.0 {
        return Err(Error::InvalidArgument("radial breaks must be increasing and non-negative".into()));
    }
    if n_r == 0 || n_theta == 0 {
        return Err(Error::InvalidArgument("quadrature needs at least one cell".into()));
    }
    let dtheta = 2.0 * PI / n_theta as f64;
    let mut total = 0.0;
    for w in breaks.windows(2) {
        let dr = (w[1] - w[0]) / n_r as f64;
        for i in 0..n_r {
            let r = w[0] + (i as f64 + 0.5) * dr;
            let step = (1e-6 * r).min(0.25 * dr);
            let mut ring = 0.0;
            for j in 0..n_theta {
                let z = omega + Complex64::from_polar(r, (j as f64 + 0.5) * dtheta);
                let hx = (f(z + step)? - f(z - step)?) / (2.0 * step);
                let iy = Complex64::new(0.0, step);
                let hy = (f(z + iy)? - f(z - iy)?) / (2.0 * step);
                ring += hx.norm_sqr() + hy.norm_sqr();
            }
            total += ring * r * dr * dtheta;
        }
    }
    Ok(total)
}

/// Measured energy of a log squeeze against its closed-form bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogSqueezeEnergy {
    /// `C₁`, measured on the stretched annulus of the unit-scale squeeze.
    pub annulus_constant: f64,
    /// Energy over `B(ω, 2s)`.
    pub numeric: f64,
    pub bound: f64,
    /// `bound - numeric`.
    pub margin: f64,
}

const QUAD_RADIAL: usize = 4000;
const QUAD_ANGULAR: usize = 64;

/// `C₁`: energy of `z ↦ 2(|z| - 1) z/|z|` over `1 ≤ |z| ≤ 2`.
pub fn annulus_constant() -> Result<f64> {
    let zero = Complex64::new(0.0, 0.0);
    polar_dirichlet_energy(|z| squeeze(z, zero, 1.0, zero), zero, &[1.0, 2.0], QUAD_RADIAL, QUAD_ANGULAR)
}

pub fn log_squeeze_energy(omega: Complex64, s: f64, a: Complex64, eps: f64) -> Result<LogSqueezeEnergy> {
    let annulus_constant = annulus_constant()?;
    let numeric = polar_dirichlet_energy(
        |z| log_squeeze(z, omega, s, a, eps),
        omega,
        &[0.0, eps, s, 2.0 * s],
        QUAD_RADIAL,
        QUAD_ANGULAR,
    )?;
    let bound = EnergyBound::log_squeeze(s, a, eps).value(annulus_constant);
    Ok(LogSqueezeEnergy { annulus_constant, numeric, bound, margin: bound - numeric })
}

/// The named maps available to scenes and the CLI.
#[derive(Debug, Clone, PartialEq)]
pub enum GalleryMap {
    Identity,
    /// `x + iy ↦ a x + i b y`.
    Ellipse { a: f64, b: f64 },
    Fig1,
    Power(u32),
    Squeeze { omega: Complex64, s: f64, a: Complex64 },
    LogSqueeze { omega: Complex64, s: f64, a: Complex64, eps: f64 },
    Example1(Example1),
    Example2,
    /// [`square_fold`] transplanted to the disk via `z ↦ z + 1 + i`.
    SquareFold,
}

impl GalleryMap {
    pub fn name(&self) -> String {
        self.to_string()
    }

    pub fn domain_note(&self) -> &'static str {
        match self {
            GalleryMap::Identity | GalleryMap::Ellipse { .. } | GalleryMap::Fig1 | GalleryMap::Power(_) => {
                "entire plane"
            }
            GalleryMap::Squeeze { .. } | GalleryMap::LogSqueeze { .. } => "closed disk B(ω, 2s)",
            GalleryMap::Example1(_) | GalleryMap::Example2 => "closed unit disk",
            GalleryMap::SquareFold => "closed unit disk, mapped into the square [0,2]²",
        }
    }

    pub fn energy_bound(&self) -> Option<EnergyBound> {
        match self {
            GalleryMap::LogSqueeze { s, a, eps, .. } => Some(EnergyBound::log_squeeze(*s, *a, *eps)),
            GalleryMap::Example1(ex) => {
                let mut total = EnergyBound { s_squared: 0.0, core: 0.0 };
                for d in &ex.disks {
                    let b = EnergyBound::log_squeeze(d.s, d.a, d.eps);
                    total.s_squared += b.s_squared;
                    total.core += b.core;
                }
                Some(total)
            }
            _ => None,
        }
    }

    pub fn evaluate(&self, z: Complex64) -> Result<Complex64> {
        match self {
            GalleryMap::Identity => Ok(z),
            GalleryMap::Ellipse { a, b } => Ok(Complex64::new(a * z.re, b * z.im)),
            GalleryMap::Fig1 => Ok(fig1(z)),
            GalleryMap::Power(n) => Ok(power(z, *n)),
            GalleryMap::Squeeze { omega, s, a } => squeeze(z, *omega, *s, *a),
            GalleryMap::LogSqueeze { omega, s, a, eps } => log_squeeze(z, *omega, *s, *a, *eps),
            GalleryMap::Example1(ex) => ex.evaluate(z),
            GalleryMap::Example2 => example2(z),
            GalleryMap::SquareFold => square_fold(z + Complex64::new(1.0, 1.0)),
        }
    }

    pub fn sample(&self, mesh: &UnitDiskMesh) -> Result<DiscreteMap> {
        DiscreteMap::try_from_fn(mesh, |z| self.evaluate(z))
    }

    /// The boundary trace `θ ↦ f(e^{iθ})`.
    pub fn boundary(&self, theta: f64) -> Result<Complex64> {
        self.evaluate(Complex64::from_polar(1.0, theta))
    }
}

impl fmt::Display for GalleryMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GalleryMap::Identity => write!(f, "identity"),
            GalleryMap::Ellipse { a, b } => write!(f, "ellipse:{a},{b}"),
            GalleryMap::Fig1 => write!(f, "fig1"),
            GalleryMap::Power(n) => write!(f, "power:{n}"),
            GalleryMap::Squeeze { omega, s, a } => {
                write!(f, "squeeze:{},{s},{}", format_complex(*omega), format_complex(*a))
            }
            GalleryMap::LogSqueeze { omega, s, a, eps } => {
                write!(f, "logsqueeze:{},{s},{},{eps}", format_complex(*omega), format_complex(*a))
            }
            GalleryMap::Example1(ex) => write!(f, "example1:{}", ex.disks.len()),
            GalleryMap::Example2 => write!(f, "example2"),
            GalleryMap::SquareFold => write!(f, "squarefold"),
        }
    }
}

fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 {
        format!("{}", z.re)
    } else if z.im > 0.0 {
        format!("{}+{}i", z.re, z.im)
    } else {
        format!("{}{}i", z.re, z.im)
    }
}

/// Parses `x`, `yi`, `x+yi` or `x-yi`.
pub fn parse_complex(text: &str) -> Result<Complex64> {
    let t = text.trim();
    let bad = || Error::Parse(format!("bad complex number `{text}`"));
    if let Some(body) = t.strip_suffix('i') {
        // Split at the last sign that is not an exponent sign or leading.
        let bytes = body.as_bytes();
        let mut split = None;
        for idx in (1..bytes.len()).rev() {
            if (bytes[idx] == b'+' || bytes[idx] == b'-') && !matches!(bytes[idx - 1], b'e' | b'E') {
                split = Some(idx);
                break;
            }
        }
        let (re, im) = match split {
            Some(idx) => (body[..idx].parse::<f64>().map_err(|_| bad())?, &body[idx..]),
            None => (0.0, body),
        };
        let im = match im {
            "" | "+" => 1.0,
            "-" => -1.0,
            s => s.parse::<f64>().map_err(|_| bad())?,
        };
        Ok(Complex64::new(re, im))
    } else {
        Ok(Complex64::new(t.parse::<f64>().map_err(|_| bad())?, 0.0))
    }
}

fn parse_reals(args: &str, n: usize, name: &str) -> Result<Vec<f64>> {
    let v: Vec<f64> = args
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| Error::Parse(format!("bad argument `{s}` for {name}"))))
        .collect::<Result<_>>()?;
    if v.len() != n {
        return Err(Error::Parse(format!("{name} expects {n} arguments, got {}", v.len())));
    }
    Ok(v)
}

impl FromStr for GalleryMap {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let s = s.strip_prefix("gallery:").unwrap_or(s);
        let (name, args) = match s.split_once(':') {
            Some((n, a)) => (n, Some(a)),
            None => (s, None),
        };
        let need = || args.ok_or_else(|| Error::Parse(format!("`{name}` needs arguments")));
        match name {
            "identity" | "id" => Ok(GalleryMap::Identity),
            "ellipse" => {
                let v = parse_reals(need()?, 2, "ellipse")?;
                Ok(GalleryMap::Ellipse { a: v[0], b: v[1] })
            }
            "fig1" => Ok(GalleryMap::Fig1),
            "power" => {
                let n: u32 = need()?.trim().parse().map_err(|_| Error::Parse("power:n needs an integer".into()))?;
                if n < 2 {
                    return Err(Error::InvalidArgument("power map needs n ≥ 2".into()));
                }
                Ok(GalleryMap::Power(n))
            }
            "squeeze" => {
                let parts: Vec<&str> = need()?.split(',').collect();
                if parts.len() != 3 {
                    return Err(Error::Parse("squeeze expects om,s,a".into()));
                }
                let s: f64 = parts[1].trim().parse().map_err(|_| Error::Parse("bad s".into()))?;
                if s <= 0.0 {
                    return Err(Error::InvalidArgument("squeeze needs s > 0".into()));
                }
                Ok(GalleryMap::Squeeze { omega: parse_complex(parts[0])?, s, a: parse_complex(parts[2])? })
            }
            "logsqueeze" => {
                let parts: Vec<&str> = need()?.split(',').collect();
                if parts.len() != 4 {
                    return Err(Error::Parse("logsqueeze expects om,s,a,eps".into()));
                }
                let s: f64 = parts[1].trim().parse().map_err(|_| Error::Parse("bad s".into()))?;
                let eps: f64 = parts[3].trim().parse().map_err(|_| Error::Parse("bad eps".into()))?;
                if !(eps > 0.0 && eps < s) {
                    return Err(Error::InvalidArgument("logsqueeze needs 0 < eps < s".into()));
                }
                Ok(GalleryMap::LogSqueeze { omega: parse_complex(parts[0])?, s, a: parse_complex(parts[2])?, eps })
            }
            "example1" => {
                let k: usize = need()?.trim().parse().map_err(|_| Error::Parse("example1:K needs an integer".into()))?;
                Ok(GalleryMap::Example1(Example1::new(k)?))
            }
            "example2" => Ok(GalleryMap::Example2),
            "squarefold" => Ok(GalleryMap::SquareFold),
            _ => Err(Error::UnknownGallery(s.to_string())),
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
    fn fig1_values() {
        assert_eq!(fig1(c(0.0, 0.0)), c(1.0, -4.0));
        assert_eq!(fig1_jacobian(c(0.0, 0.0)), 4.0);
        assert!((fig1_jacobian(c(1.0, 0.0)) + 11.2).abs() < 1e-12);
    }

    #[test]
    fn fig1_is_harmonic_with_affine_jacobian() {
        // Central differences on a quadratic polynomial are exact up to rounding.
        let h = 1e-3;
        for &z in &[c(0.1, 0.2), c(-0.5, 0.3), c(0.7, -0.6)] {
            let lap = (fig1(z + h) + fig1(z - h) + fig1(z + c(0.0, h)) + fig1(z - c(0.0, h)) - 4.0 * fig1(z)) / (h * h);
            assert!(lap.norm() < 1e-6);
            let dx = (fig1(z + h) - fig1(z - h)) / (2.0 * h);
            let dy = (fig1(z + c(0.0, h)) - fig1(z - c(0.0, h))) / (2.0 * h);
            let jac = dx.re * dy.im - dx.im * dy.re;
            assert!((jac - fig1_jacobian(z)).abs() < 1e-8);
        }
    }

    #[test]
    fn power_values() {
        assert!((power(c(0.0, 1.0), 2) - c(-1.0, 0.0)).norm() < 1e-15);
        let h = 1e-6;
        for &z in &[c(0.3, 0.4), c(-0.2, 0.9)] {
            let dx = (power(z + h, 2) - power(z - h, 2)) / (2.0 * h);
            let dy = (power(z + c(0.0, h), 2) - power(z - c(0.0, h), 2)) / (2.0 * h);
            let jac = dx.re * dy.im - dx.im * dy.re;
            assert!((jac - 4.0 * z.norm_sqr()).abs() < 1e-6);
        }
    }

    #[test]
    fn squeeze_examples() {
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        assert_eq!(squeeze(zero, zero, 0.5, one).unwrap(), one);
        for k in 0..16 {
            let z = Complex64::from_polar(1.0, k as f64 * 0.4);
            assert!((squeeze(z, zero, 0.5, one).unwrap() - z).norm() < 1e-15);
            let w = Complex64::from_polar(0.25, k as f64 * 0.4);
            assert!((squeeze(w, zero, 0.5, one).unwrap() - 0.5).norm() < 1e-15);
        }
        assert!(matches!(squeeze(c(1.1, 0.0), zero, 0.5, one), Err(Error::Domain { .. })));
    }

    #[test]
    fn branch_continuity() {
        let omega = c(0.2, -0.1);
        let (s, a, eps) = (0.3, c(0.4, 0.1), 0.01);
        for k in 0..12 {
            let dir = Complex64::from_polar(1.0, 0.5 * k as f64);
            let inside = squeeze(omega + dir * (s * (1.0 - 1e-14)), omega, s, a).unwrap();
            let outside = squeeze(omega + dir * s, omega, s, a).unwrap();
            assert!((inside - outside).norm() < 1e-12);
            let li = log_squeeze(omega + dir * (s * (1.0 - 1e-14)), omega, s, a, eps).unwrap();
            let lo = log_squeeze(omega + dir * s, omega, s, a, eps).unwrap();
            assert!((li - lo).norm() < 1e-12);
            assert!((lo - omega).norm() < 1e-15);
            let ei = log_squeeze(omega + dir * eps, omega, s, a, eps).unwrap();
            let eo = log_squeeze(omega + dir * (eps * (1.0 + 1e-13)), omega, s, a, eps).unwrap();
            assert!((ei - eo).norm() < 1e-12);
            assert_eq!(ei, omega + a);
        }
    }

    #[test]
    fn annulus_constant_matches_closed_form() {
        // ∫₁² (4 + 4(r-1)²/r²) 2πr dr = 8π(1 + log 2)
        let exact = 8.0 * PI * (1.0 + 2f64.ln());
        assert!((annulus_constant().unwrap() - exact).abs() / exact < 1e-6);
    }

    #[test]
    fn polar_energy_of_linear_maps() {
        let e = polar_dirichlet_energy(|z| Ok(z * 3.0), c(0.2, 0.1), &[0.0, 0.5], 200, 32).unwrap();
        assert!((e - 18.0 * PI * 0.25).abs() < 1e-6);
        assert!(polar_dirichlet_energy(Ok, c(0.0, 0.0), &[0.5, 0.2], 10, 10).is_err());
    }

    #[test]
    fn log_squeeze_energy_within_bound() {
        for eps in [0.05, 0.005] {
            let e = log_squeeze_energy(c(0.0, 0.0), 0.5, c(1.0, 0.0), eps).unwrap();
            assert!(e.margin >= 0.0 && e.margin < 1e-3 * e.bound, "{e:?}");
        }
    }

    #[test]
    fn example1_structure() {
        let ex = Example1::new(4).unwrap();
        assert!(ex.clamped.is_empty());
        for (k, d) in ex.disks.iter().enumerate() {
            let got = ex.evaluate(d.omega).unwrap();
            assert_eq!(got, d.omega + 2.0);
            assert_eq!(d.omega.re, 1.0 - 1.0 / (k + 1) as f64);
        }
        assert_eq!(ex.evaluate(c(-0.5, 0.5)).unwrap(), c(-0.5, 0.5));
        for k in 0..64 {
            let z = Complex64::from_polar(1.0, k as f64 * 0.1);
            assert_eq!(ex.evaluate(z).unwrap(), z);
        }
        let long = Example1::new(7).unwrap();
        assert_eq!(long.clamped, vec![6, 7]);
        assert!(long.disks.iter().all(|d| d.eps > 0.0));
    }

    #[test]
    fn example1_rejects_overlap() {
        let d = SqueezeDisk { omega: c(0.0, 0.0), s: 0.1, a: c(2.0, 0.0), eps: 0.01 };
        let e = SqueezeDisk { omega: c(0.3, 0.0), s: 0.1, a: c(2.0, 0.0), eps: 0.01 };
        assert!(Example1::with_disks(vec![d, e]).is_err());
        let far = SqueezeDisk { omega: c(0.5, 0.0), ..e };
        assert!(Example1::with_disks(vec![d, far]).is_ok());
    }

    #[test]
    fn example2_fibers() {
        // The circle |z| = 1/4 and the point 3/4 both land on 1/2.
        assert!((example2(c(0.75, 0.0)).unwrap() - 0.5).norm() < 1e-15);
        assert!((example2(c(0.0, 0.25)).unwrap() - 0.5).norm() < 1e-15);
        assert!((example2(c(-0.75, 0.0)).unwrap() + 0.5).norm() < 1e-15);
    }

    #[test]
    fn square_fold_values() {
        assert_eq!(square_fold(c(0.5, 1.0)).unwrap(), c(1.0, 1.0));
        assert_eq!(square_fold(c(1.5, 1.0)).unwrap(), c(1.0, 1.0));
        assert!(square_fold(c(2.5, 1.0)).is_err());
        assert_eq!(GalleryMap::SquareFold.evaluate(c(-0.5, 0.0)).unwrap(), c(1.0, 1.0));
    }

    #[test]
    fn parse_names() {
        for name in ["fig1", "power:3", "example1:4", "example2", "squarefold", "identity", "ellipse:1,0.5"] {
            let g: GalleryMap = name.parse().unwrap();
            assert_eq!(g.to_string(), name);
        }
        let g: GalleryMap = "squeeze:0,0.5,1".parse().unwrap();
        assert_eq!(g, GalleryMap::Squeeze { omega: c(0.0, 0.0), s: 0.5, a: c(1.0, 0.0) });
        let g: GalleryMap = "logsqueeze:0.1+0.2i,0.5,2,0.05".parse().unwrap();
        assert!(matches!(g, GalleryMap::LogSqueeze { .. }));
        assert!(matches!("nope".parse::<GalleryMap>(), Err(Error::UnknownGallery(_))));
        assert_eq!(parse_complex("1e-3-2i").unwrap(), c(1e-3, -2.0));
        assert_eq!(parse_complex("-i").unwrap(), c(0.0, -1.0));
    }
}
