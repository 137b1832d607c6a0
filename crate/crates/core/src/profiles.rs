//! Closed-form profiles and the function-space toolbox around them.
//!
//! The physical-space blowup profile U lives in R^d; the reduced-mass
//! change of variable w(r) = (1/(2 r^d)) int_0^r u(s) s^{d-1} ds carries it
//! to phi_n(x) = 2/(2(n-4)+|x|^2) in R^n, n = d+2. Around n = 5 the module
//! provides the Gaussian-weighted Hilbert spaces, the unstable-mode
//! profile nu with its normalized version g, the rank-one projection onto
//! g, homogeneous Sobolev norms through the radial operators D^k, Hankel
//! transforms with closed-form spherical Bessel kernels, and the
//! dimension-shift norm equivalence check.

use crate::error::{Error, Result};
use crate::grid::{sphere_area, IntegralResult, RadialField, RadialGrid};
use serde::Serialize;
use std::sync::Arc;

/// Physical-space blowup profile U(r) = 4(d-2)(2d + r^2)/(2(d-2) + r^2)^2.
pub fn profile_u(d: u32, r: f64) -> f64 {
    assert!(d >= 3, "profile U needs d >= 3");
    let dd = d as f64;
    let den = 2.0 * (dd - 2.0) + r * r;
    4.0 * (dd - 2.0) * (2.0 * dd + r * r) / (den * den)
}

/// Static similarity profile phi_n(r) = 2/(2(n-4) + r^2).
pub fn profile_phi(n: u32, r: f64) -> f64 {
    assert!(n >= 5, "profile phi needs n >= 5");
    2.0 / (2.0 * (n as f64 - 4.0) + r * r)
}

/// Unstable-mode profile nu = phi + Lambda phi / 2 = 4/(2+r^2)^2 (n = 5).
pub fn profile_nu(r: f64) -> f64 {
    let den = 2.0 + r * r;
    4.0 / (den * den)
}

/// Free Gaussian weight sigma_0(r) = e^{-r^2/4}.
pub fn sigma0_weight(r: f64) -> f64 {
    (-r * r / 4.0).exp()
}

/// Conjugated weight sigma(r) = phi(r)^{-2} e^{-r^2/4} (n = 5).
pub fn sigma_weight(r: f64) -> f64 {
    let phi = profile_phi(5, r);
    (-r * r / 4.0).exp() / (phi * phi)
}

pub fn phi_field(grid: &Arc<RadialGrid>) -> RadialField {
    let n = grid.dim();
    RadialField::from_fn(grid, |r| profile_phi(n, r)).with_decay_hint(2.0)
}

/// nu on an R^5 grid.
pub fn nu_field(grid: &Arc<RadialGrid>) -> RadialField {
    assert_eq!(grid.dim(), 5, "nu is the n = 5 unstable mode");
    RadialField::from_fn(grid, profile_nu).with_decay_hint(4.0)
}

/// U on an R^d grid (d = grid dimension).
pub fn u_field(grid: &Arc<RadialGrid>) -> RadialField {
    let d = grid.dim();
    RadialField::from_fn(grid, |r| profile_u(d, r)).with_decay_hint(2.0)
}

/// Dimension pair (d, n = d + 2) of the reduced-mass lift.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct ProfileFamily {
    pub d: u32,
}

impl ProfileFamily {
    pub fn new(d: u32) -> Result<Self> {
        if d < 3 {
            return Err(Error::InvalidParameter(format!(
                "physical dimension must be >= 3, got {d}"
            )));
        }
        Ok(ProfileFamily { d })
    }

    pub fn lifted(&self) -> u32 {
        self.d + 2
    }
}

/// Reduced-mass normalization: the evolution convention carries a factor
/// 1/2, the norm-equivalence convention does not.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MassNormalization {
    Half,
    Unit,
}

impl MassNormalization {
    fn prefactor(self) -> f64 {
        match self {
            MassNormalization::Half => 0.5,
            MassNormalization::Unit => 1.0,
        }
    }
}

/// w(r) = pref * r^{-d} int_0^r u(s) s^{d-1} ds, lifted to R^{d+2}.
pub fn reduced_mass(u: &RadialField, norm: MassNormalization) -> Result<RadialField> {
    let grid = u.grid();
    let d = grid.dim();
    let lifted = grid.with_dimension(d + 2)?;
    let cum = grid.cumulative_integral(u, |_| 1.0);
    let pref = norm.prefactor();
    let values = grid
        .nodes()
        .iter()
        .zip(cum)
        .map(|(&r, c)| pref * c / r.powi(d as i32))
        .collect();
    Ok(RadialField::from_values(&lifted, values))
}

/// Analytic inverse of the reduced mass: u = (d w + r w') / pref.
pub fn inverse_reduced_mass(w: &RadialField, norm: MassNormalization) -> Result<RadialField> {
    let grid = w.grid();
    let n = grid.dim();
    if n < 5 {
        return Err(Error::InvalidParameter(format!(
            "reduced-mass field lives in dimension >= 5, got {n}"
        )));
    }
    let d = n - 2;
    let dropped = grid.with_dimension(d)?;
    let lam = w.lambda_op();
    let pref = norm.prefactor();
    let values = w
        .values()
        .iter()
        .zip(lam.values())
        .map(|(&wv, &lv)| (d as f64 * wv + lv) / pref)
        .collect();
    Ok(RadialField::from_values(&dropped, values))
}

/// A norm value together with the truncation tail of its squared integral.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct NormResult {
    pub value: f64,
    pub tail_estimate: f64,
}

impl NormResult {
    fn from_square(sq: IntegralResult) -> Self {
        NormResult {
            value: sq.value.max(0.0).sqrt(),
            tail_estimate: sq.tail_estimate,
        }
    }

    pub fn truncation_dominated(&self, tol: f64) -> bool {
        self.tail_estimate > tol * (self.value * self.value).max(1e-30)
    }
}

/// Homogeneous Sobolev norm ||f||_{H^k(R^n)} = ||D^k f||_{L^2(R^n)} on the
/// field's own grid dimension; k = 0 gives the plain L^2 norm.
pub fn norm_hdot(f: &RadialField, k: usize) -> Result<NormResult> {
    let dk = f.dk_op(k)?;
    let sq = f.grid().integrate_full(&(&dk * &dk), |_| 1.0);
    Ok(NormResult::from_square(sq))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct XkNorm {
    pub value: f64,
    pub h1: NormResult,
    pub hk: NormResult,
}

/// ||f||_{X^k}^2 = ||f||_{H^1}^2 + ||f||_{H^k}^2 on R^5.
pub fn norm_xk(f: &RadialField, k: usize) -> Result<XkNorm> {
    if f.grid().dim() != 5 {
        return Err(Error::InvalidParameter(
            "X^k norms are defined on R^5 fields".into(),
        ));
    }
    if k < 1 {
        return Err(Error::InvalidParameter("X^k needs k >= 1".into()));
    }
    let h1 = norm_hdot(f, 1)?;
    let hk = norm_hdot(f, k)?;
    Ok(XkNorm {
        value: (h1.value * h1.value + hk.value * hk.value).sqrt(),
        h1,
        hk,
    })
}

/// The weighted Hilbert spaces over one grid: sigma_0 = e^{-r^2/4} for the
/// free flow, sigma = phi^{-2} sigma_0 where the linearized operator is
/// self-adjoint. Caches the node weights and the normalized unstable mode
/// g = nu/||nu||, so inner products are plain dot products in hot loops.
#[derive(Debug)]
pub struct WeightedSpace {
    grid: Arc<RadialGrid>,
    sigma0_w: Vec<f64>,
    sigma_w: Vec<f64>,
    nu_norm: f64,
    g: RadialField,
}

impl WeightedSpace {
    pub fn new(grid: &Arc<RadialGrid>) -> Result<Self> {
        if grid.dim() != 5 {
            return Err(Error::InvalidParameter(
                "weighted spaces are built over R^5 grids".into(),
            ));
        }
        let s = sphere_area(5);
        let sigma0_w: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(grid.quad_weights())
            .map(|(&r, &w)| s * w * sigma0_weight(r))
            .collect();
        let sigma_w: Vec<f64> = grid
            .nodes()
            .iter()
            .zip(grid.quad_weights())
            .map(|(&r, &w)| s * w * sigma_weight(r))
            .collect();
        let nu = nu_field(grid);
        let nu_sq: f64 = nu
            .values()
            .iter()
            .zip(&sigma_w)
            .map(|(&v, &w)| w * v * v)
            .sum();
        let nu_norm = nu_sq.sqrt();
        let g = nu.scaled(1.0 / nu_norm);
        Ok(WeightedSpace {
            grid: grid.clone(),
            sigma0_w,
            sigma_w,
            nu_norm,
            g,
        })
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    /// ||nu||_H on this grid; the constant relating nu and g.
    pub fn nu_norm(&self) -> f64 {
        self.nu_norm
    }

    /// Normalized unstable mode g = nu/||nu||_H.
    pub fn g(&self) -> &RadialField {
        &self.g
    }

    pub fn inner_h(&self, f: &RadialField, g: &RadialField) -> f64 {
        f.values()
            .iter()
            .zip(g.values())
            .zip(&self.sigma_w)
            .map(|((&a, &b), &w)| w * a * b)
            .sum()
    }

    pub fn inner_h0(&self, f: &RadialField, g: &RadialField) -> f64 {
        f.values()
            .iter()
            .zip(g.values())
            .zip(&self.sigma0_w)
            .map(|((&a, &b), &w)| w * a * b)
            .sum()
    }

    pub fn norm_h(&self, f: &RadialField) -> f64 {
        self.inner_h(f, f).max(0.0).sqrt()
    }

    pub fn norm_h0(&self, f: &RadialField) -> f64 {
        self.inner_h0(f, f).max(0.0).sqrt()
    }

    /// H inner product with the truncation tail of the quadrature.
    pub fn inner_h_checked(&self, f: &RadialField, g: &RadialField) -> IntegralResult {
        self.grid.integrate_full(&(f * g), sigma_weight)
    }

    /// Rank-one spectral projection P f = <f, g>_H g.
    pub fn project_p(&self, f: &RadialField) -> RadialField {
        let c = self.inner_h(f, &self.g);
        self.g.scaled(c)
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct HankelResult {
    pub aliasing: bool,
}

/// j_n(z)/z^n for small spherical Bessel orders, series near zero to dodge
/// the cancellation in the closed forms.
fn jn_scaled(n: u32, z: f64) -> f64 {
    let az = z.abs();
    if az < 0.8 {
        // sum_k (-z^2/2)^k / (k! (2n+2k+1)!!)
        let mut dfac = 1.0;
        let mut m = 1;
        while m <= 2 * n + 1 {
            dfac *= m as f64;
            m += 2;
        }
        let mut term = 1.0 / dfac;
        let mut sum = term;
        let z2 = z * z;
        for k in 0..24u32 {
            term *= -z2 / (2.0 * (k as f64 + 1.0) * (2 * n + 2 * k + 3) as f64);
            sum += term;
            if term.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        let (s, c) = z.sin_cos();
        match n {
            0 => s / z,
            1 => (s / z - c) / (z * z),
            2 => ((3.0 / (z * z) - 1.0) * s - 3.0 * c / z) / (z * z),
            _ => unreachable!("spherical Bessel order not supported"),
        }
    }
}

/// Radial Fourier transform in R^d (d odd, 3 <= d <= 7), symmetric
/// normalization, sampled on the frequency grid. Its own inverse on even
/// radial data.
pub fn hankel_transform(
    f: &RadialField,
    freq: &Arc<RadialGrid>,
) -> Result<(RadialField, HankelResult)> {
    let d = f.grid().dim();
    if d != freq.dim() {
        return Err(Error::ShapeMismatch(format!(
            "field dimension {d} vs frequency grid dimension {}",
            freq.dim()
        )));
    }
    if d > 7 {
        return Err(Error::InvalidParameter(
            "Hankel kernels implemented for d in {3, 5, 7}".into(),
        ));
    }
    let order = (d - 3) / 2;
    let pref = (2.0 / std::f64::consts::PI).sqrt();
    let nodes = f.grid().nodes();
    let wq = f.grid().quad_weights();
    let fv = f.values();
    let max_abs = f.max_abs();

    // resolution checks: kernel oscillation against node spacing, field
    // decayed at the outer boundary
    let max_spacing = nodes
        .windows(2)
        .map(|w| w[1] - w[0])
        .fold(nodes[0], f64::max);
    let xi_max = freq.r_max();
    let mut aliasing = xi_max * max_spacing > 1.5;
    if fv[fv.len() - 1].abs() > 1e-8 * max_abs.max(1e-300) {
        aliasing = true;
    }

    let values: Vec<f64> = freq
        .nodes()
        .iter()
        .map(|&xi| {
            let mut acc = 0.0;
            for j in 0..nodes.len() {
                acc += wq[j] * fv[j] * jn_scaled(order, nodes[j] * xi);
            }
            pref * acc
        })
        .collect();
    Ok((
        RadialField::from_values(freq, values),
        HankelResult { aliasing },
    ))
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct EquivalenceReport {
    pub k: usize,
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
    pub lhs_tail: f64,
    pub rhs_tail: f64,
}

/// Compare ||u||_{H^k(R^d)} against ||w||_{H^{k+1}(R^{d+2})} for the
/// unit-normalized reduced mass w of u. The ratio is a k-independent
/// constant; its value is measured, not asserted.
pub fn norm_equivalence_check(u: &RadialField, k: usize) -> Result<EquivalenceReport> {
    if k > 4 {
        return Err(Error::InvalidParameter(
            "norm equivalence check supports k <= 4".into(),
        ));
    }
    let lhs = norm_hdot(u, k)?;
    let w = reduced_mass(u, MassNormalization::Unit)?;
    let rhs = norm_hdot(&w, k + 1)?;
    Ok(EquivalenceReport {
        k,
        lhs: lhs.value,
        rhs: rhs.value,
        ratio: if rhs.value > 0.0 {
            lhs.value / rhs.value
        } else {
            0.0
        },
        lhs_tail: lhs.tail_estimate,
        rhs_tail: rhs.tail_estimate,
    })
}

/// Smooth bump supported on [c - w, c + w]; the workhorse test profile.
pub fn bump(r: f64, center: f64, width: f64) -> f64 {
    let z = (r - center) / width;
    if z.abs() < 1.0 {
        (-1.0 / (1.0 - z * z)).exp()
    } else {
        0.0
    }
}
