//! Radial grids on (0, R_max], quadrature against the r^{n-1} measure, and
//! the finite-difference operators used everywhere else: the radial
//! Laplacian, the scaling operator r d/dr, and their compositions D^k.
//!
//! All profiles are even across the origin, so there is no node at r = 0;
//! stencils adjacent to the origin work in the variable s = r^2 where an
//! even function is smooth, and quadrature panels start at r = 0 with
//! interpolatory rules built from the nearest nodes.

use crate::error::{Error, Result};
use crate::quad::{GL8_NODES, GL8_WEIGHTS};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

/// Number of nodes in each interpolatory quadrature stencil. The composite
/// rule reproduces polynomials through degree `QUAD_STENCIL - 1` exactly.
const QUAD_STENCIL: usize = 6;

/// Stated polynomial exactness degree of the node quadrature.
pub const QUAD_DEGREE: usize = QUAD_STENCIL - 1;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GridScheme {
    Uniform,
    /// Nodes r = R_max sinh(a t)/sinh(a) on a uniform t-grid; clusters
    /// nodes near the origin while extending far out, for unweighted norms
    /// of algebraically decaying profiles.
    MappedStretched {
        strength: f64,
    },
}

impl GridScheme {
    pub fn stretched() -> Self {
        GridScheme::MappedStretched { strength: 3.0 }
    }
}

#[derive(Debug, Clone, Copy)]
struct Stencil {
    start: u32,
    len: u8,
    w: [f64; 4],
}

#[derive(Debug, Clone, Copy)]
struct PanelRule {
    start: u32,
    w: [f64; QUAD_STENCIL],
}

/// Discretized radial half-line for R^n with quadrature and derivative
/// stencils.
#[derive(Debug)]
pub struct RadialGrid {
    n: u32,
    r_max: f64,
    scheme: GridScheme,
    nodes: Vec<f64>,
    quad_weights: Vec<f64>,
    panels: Vec<PanelRule>,
    d1: Vec<Stencil>,
    d2: Vec<Stencil>,
}

/// Fornberg's algorithm: weights of derivatives 0..=m at the point `z`
/// for the (arbitrary, distinct) nodes `x`.
pub fn fd_weights(z: f64, x: &[f64], m: usize) -> Vec<Vec<f64>> {
    let n = x.len();
    let mut c = vec![vec![0.0; n]; m + 1];
    let mut c1 = 1.0;
    let mut c4 = x[0] - z;
    c[0][0] = 1.0;
    for i in 1..n {
        let mn = i.min(m);
        let mut c2 = 1.0;
        let c5 = c4;
        c4 = x[i] - z;
        for j in 0..i {
            let c3 = x[i] - x[j];
            c2 *= c3;
            if j == i - 1 {
                for k in (1..=mn).rev() {
                    c[k][i] = c1 * (k as f64 * c[k - 1][i - 1] - c5 * c[k][i - 1]) / c2;
                }
                c[0][i] = -c1 * c5 * c[0][i - 1] / c2;
            }
            for k in (1..=mn).rev() {
                c[k][j] = (c4 * c[k][j] - k as f64 * c[k - 1][j]) / c3;
            }
            c[0][j] = c4 * c[0][j] / c3;
        }
        c1 = c2;
    }
    c
}

/// Surface area of the unit sphere S^{n-1}; n odd.
pub fn sphere_area(n: u32) -> f64 {
    // 2 pi^{n/2} / Gamma(n/2), with Gamma(k + 1/2) built up from sqrt(pi)
    let half = n as f64 / 2.0;
    let mut gamma = std::f64::consts::PI.sqrt();
    let mut x = 0.5;
    while x + 1.0 <= half + 1e-12 {
        gamma *= x;
        x += 1.0;
    }
    2.0 * std::f64::consts::PI.powf(half) / gamma
}

impl RadialGrid {
    /// Build a grid for R^n with N nodes on (0, R_max].
    pub fn new(n: u32, r_max: f64, num_nodes: usize, scheme: GridScheme) -> Result<Arc<Self>> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "ambient dimension must be odd and >= 3, got {n}"
            )));
        }
        if num_nodes < 16 {
            return Err(Error::InvalidParameter(format!(
                "need at least 16 nodes, got {num_nodes}"
            )));
        }
        if !(r_max > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "R_max must be positive, got {r_max}"
            )));
        }
        if let GridScheme::MappedStretched { strength } = scheme {
            if !(strength > 0.0) {
                return Err(Error::InvalidParameter(format!(
                    "stretch strength must be positive, got {strength}"
                )));
            }
        }
        let nodes: Vec<f64> = (1..=num_nodes)
            .map(|j| {
                let t = j as f64 / num_nodes as f64;
                match scheme {
                    GridScheme::Uniform => r_max * t,
                    GridScheme::MappedStretched { strength } => {
                        r_max * (strength * t).sinh() / strength.sinh()
                    }
                }
            })
            .collect();
        let (quad_weights, panels) = build_quadrature(&nodes, n);
        let (d1, d2) = build_stencils(&nodes);
        Ok(Arc::new(RadialGrid {
            n,
            r_max,
            scheme,
            nodes,
            quad_weights,
            panels,
            d1,
            d2,
        }))
    }

    /// Same nodes, different ambient dimension (quadrature weights change
    /// with the r^{n-1} measure, derivative stencils do not).
    pub fn with_dimension(self: &Arc<Self>, n: u32) -> Result<Arc<Self>> {
        if n < 3 || n % 2 == 0 {
            return Err(Error::InvalidParameter(format!(
                "ambient dimension must be odd and >= 3, got {n}"
            )));
        }
        let (quad_weights, panels) = build_quadrature(&self.nodes, n);
        Ok(Arc::new(RadialGrid {
            n,
            r_max: self.r_max,
            scheme: self.scheme,
            nodes: self.nodes.clone(),
            quad_weights,
            panels,
            d1: self.d1.clone(),
            d2: self.d2.clone(),
        }))
    }

    pub fn dim(&self) -> u32 {
        self.n
    }

    pub fn r_max(&self) -> f64 {
        self.r_max
    }

    pub fn scheme(&self) -> GridScheme {
        self.scheme
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn quad_weights(&self) -> &[f64] {
        &self.quad_weights
    }

    /// Smallest node spacing, the resolution scale for stability bounds.
    pub fn min_spacing(&self) -> f64 {
        let mut h = self.nodes[0];
        for w in self.nodes.windows(2) {
            h = h.min(w[1] - w[0]);
        }
        h
    }

    /// int_0^{R_max} f(r) w(r) r^{n-1} dr by the node rule, with a tail
    /// estimate extrapolated from the last nodes.
    pub fn integrate_radial<W: Fn(f64) -> f64>(&self, f: &RadialField, w: W) -> IntegralResult {
        self.check_field(f);
        let mut acc = 0.0;
        let mut integrand_tail = [0.0; TAIL_FIT];
        let nn = self.len();
        for j in 0..nn {
            let g = f.values[j] * w(self.nodes[j]);
            acc += self.quad_weights[j] * g;
            if j + TAIL_FIT >= nn {
                integrand_tail[j + TAIL_FIT - nn] = g;
            }
        }
        let tail = tail_estimate(&self.nodes[nn - TAIL_FIT..], &integrand_tail, self.n);
        IntegralResult {
            value: acc,
            tail_estimate: tail,
        }
    }

    /// Full-space integral over R^n (sphere factor included).
    pub fn integrate_full<W: Fn(f64) -> f64>(&self, f: &RadialField, w: W) -> IntegralResult {
        let r = self.integrate_radial(f, w);
        let s = sphere_area(self.n);
        IntegralResult {
            value: s * r.value,
            tail_estimate: s * r.tail_estimate,
        }
    }

    /// Running integral int_0^{r_j} f(r) w(r) r^{n-1} dr at every node.
    pub fn cumulative_integral<W: Fn(f64) -> f64>(&self, f: &RadialField, w: W) -> Vec<f64> {
        self.check_field(f);
        let mut out = Vec::with_capacity(self.len());
        let mut acc = 0.0;
        for (j, rule) in self.panels.iter().enumerate() {
            let s = rule.start as usize;
            let mut panel = 0.0;
            for (i, wi) in rule.w.iter().enumerate() {
                panel += wi * f.values[s + i] * w(self.nodes[s + i]);
            }
            acc += panel;
            debug_assert_eq!(j, out.len());
            out.push(acc);
        }
        out
    }

    fn check_field(&self, f: &RadialField) {
        assert_eq!(
            f.values.len(),
            self.nodes.len(),
            "field length does not match grid"
        );
    }

    fn apply_stencils(&self, table: &[Stencil], v: &[f64]) -> Vec<f64> {
        table
            .iter()
            .map(|st| {
                let s = st.start as usize;
                let mut acc = 0.0;
                for i in 0..st.len as usize {
                    acc += st.w[i] * v[s + i];
                }
                acc
            })
            .collect()
    }
}

const TAIL_FIT: usize = 6;

/// Crude decay-model fit on the last nodes of an integrand: try algebraic
/// and exponential tails, keep whichever fits better, integrate it past
/// R_max. Conservative where the integrand is not decaying.
fn tail_estimate(r: &[f64], g: &[f64], _n: u32) -> f64 {
    let y: Vec<f64> = g.iter().map(|v| v.abs().max(1e-300)).collect();
    let yn = y[y.len() - 1];
    if yn <= 1e-290 {
        return 0.0;
    }
    let rn = r[r.len() - 1];
    let lsq = |xs: &[f64], ys: &[f64]| -> (f64, f64) {
        let n = xs.len() as f64;
        let sx: f64 = xs.iter().sum();
        let sy: f64 = ys.iter().sum();
        let sxx: f64 = xs.iter().map(|x| x * x).sum();
        let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| x * y).sum();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let icpt = (sy - slope * sx) / n;
        let res: f64 = xs
            .iter()
            .zip(ys)
            .map(|(x, y)| (y - slope * x - icpt).powi(2))
            .sum();
        (slope, res)
    };
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let lr: Vec<f64> = r.iter().map(|v| v.ln()).collect();
    let (alg_slope, alg_res) = lsq(&lr, &ly);
    let (exp_slope, exp_res) = lsq(r, &ly);
    let p = -alg_slope;
    let kappa = -exp_slope;
    let tail_alg = if p > 1.1 { yn * rn / (p - 1.0) } else { f64::INFINITY };
    let tail_exp = if kappa > 0.0 { yn / kappa } else { f64::INFINITY };
    let best = if alg_res <= exp_res { tail_alg } else { tail_exp };
    if best.is_finite() {
        best
    } else {
        yn * rn
    }
}

fn build_quadrature(nodes: &[f64], n: u32) -> (Vec<f64>, Vec<PanelRule>) {
    let nn = nodes.len();
    let m = QUAD_STENCIL;
    let mut weights = vec![0.0; nn];
    let mut panels = Vec::with_capacity(nn);
    let pow = (n - 1) as i32;
    for p in 0..nn {
        let a = if p == 0 { 0.0 } else { nodes[p - 1] };
        let b = nodes[p];
        let c = 0.5 * (a + b);
        let hi = nodes.partition_point(|&x| x < c);
        let start = hi.saturating_sub(m / 2).min(nn - m);
        let xs = &nodes[start..start + m];
        let mut w = [0.0; QUAD_STENCIL];
        // integrate each Lagrange basis times r^{n-1} with Gauss-Legendre,
        // exact for the polynomial integrand
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        for (gx, gw) in GL8_NODES.iter().zip(GL8_WEIGHTS.iter()) {
            let r = mid + half * gx;
            let meas = gw * half * r.powi(pow);
            for i in 0..m {
                let mut ell = 1.0;
                for j in 0..m {
                    if j != i {
                        ell *= (r - xs[j]) / (xs[i] - xs[j]);
                    }
                }
                w[i] += meas * ell;
            }
        }
        for i in 0..m {
            weights[start + i] += w[i];
        }
        panels.push(PanelRule {
            start: start as u32,
            w,
        });
    }
    (weights, panels)
}

/// Stencil rows for f'(r_j) and f''(r_j) from a quadratic fit in s = r^2
/// over three consecutive nodes. Built for even fields: writing f = F(r^2)
/// removes the odd derivatives that make r-space stencils lose accuracy
/// against the (n-1)/r amplification next to the origin.
fn s_space_rows(nodes: &[f64], j: usize, start: usize) -> (Stencil, Stencil) {
    let s = [
        nodes[start] * nodes[start],
        nodes[start + 1] * nodes[start + 1],
        nodes[start + 2] * nodes[start + 2],
    ];
    let sj = nodes[j] * nodes[j];
    let mut dl = [0.0; 3];
    let mut ddl = [0.0; 3];
    for i in 0..3 {
        let mut others = [0.0; 2];
        let mut k = 0;
        for (m, &sm) in s.iter().enumerate() {
            if m != i {
                others[k] = sm;
                k += 1;
            }
        }
        let denom = (s[i] - others[0]) * (s[i] - others[1]);
        dl[i] = (2.0 * sj - others[0] - others[1]) / denom;
        ddl[i] = 2.0 / denom;
    }
    let rj = nodes[j];
    let mut w1 = [0.0; 4];
    let mut w2 = [0.0; 4];
    for i in 0..3 {
        w1[i] = 2.0 * rj * dl[i];
        w2[i] = 2.0 * dl[i] + 4.0 * sj * ddl[i];
    }
    let start = start as u32;
    (
        Stencil { start, len: 3, w: w1 },
        Stencil { start, len: 3, w: w2 },
    )
}

/// Below this radius derivative stencils are built in s = r^2, where even
/// fields are smooth; this keeps the (n-1)/r first-order term from
/// amplifying truncation error next to the origin. The two families are
/// blended smoothly up to `S_SPACE_OUTER` so that composed operators (D^3
/// and higher) see no kink in the truncation error.
const S_SPACE_INNER: f64 = 0.35;
const S_SPACE_OUTER: f64 = 0.65;

fn blend_factor(r: f64) -> f64 {
    let t = ((S_SPACE_OUTER - r) / (S_SPACE_OUTER - S_SPACE_INNER)).clamp(0.0, 1.0);
    t * t * (3.0 - 2.0 * t)
}

fn build_stencils(nodes: &[f64]) -> (Vec<Stencil>, Vec<Stencil>) {
    let nn = nodes.len();
    let mut d1 = Vec::with_capacity(nn);
    let mut d2 = Vec::with_capacity(nn);

    for j in 0..nn - 1 {
        let theta = if j < 3 { 1.0 } else { blend_factor(nodes[j]) };
        if theta >= 1.0 {
            let start = j.saturating_sub(1).min(nn - 3);
            let (s1, s2) = s_space_rows(nodes, j, start);
            d1.push(s1);
            d2.push(s2);
            continue;
        }
        let xs = &nodes[j - 1..j + 2];
        let c = fd_weights(nodes[j], xs, 2);
        let mut w1 = [0.0; 4];
        let mut w2 = [0.0; 4];
        for i in 0..3 {
            w1[i] = c[1][i];
            w2[i] = c[2][i];
        }
        if theta > 0.0 {
            // same three-node window as the r-space row
            let (s1, s2) = s_space_rows(nodes, j, j - 1);
            for i in 0..3 {
                w1[i] = theta * s1.w[i] + (1.0 - theta) * w1[i];
                w2[i] = theta * s2.w[i] + (1.0 - theta) * w2[i];
            }
        }
        let start = (j - 1) as u32;
        d1.push(Stencil { start, len: 3, w: w1 });
        d2.push(Stencil { start, len: 3, w: w2 });
    }

    // last node: one-sided four-point stencils
    {
        let j = nn - 1;
        let xs = &nodes[j - 3..=j];
        let c = fd_weights(nodes[j], xs, 2);
        let mut w1 = [0.0; 4];
        let mut w2 = [0.0; 4];
        for i in 0..4 {
            w1[i] = c[1][i];
            w2[i] = c[2][i];
        }
        let start = (j - 3) as u32;
        d1.push(Stencil { start, len: 4, w: w1 });
        d2.push(Stencil { start, len: 4, w: w2 });
    }
    (d1, d2)
}

#[derive(Debug, Clone, Copy)]
pub struct IntegralResult {
    pub value: f64,
    pub tail_estimate: f64,
}

impl IntegralResult {
    /// True when the truncation tail exceeds the requested tolerance
    /// (relative where the value is not tiny).
    pub fn truncation_dominated(&self, tol: f64) -> bool {
        self.tail_estimate > tol * self.value.abs().max(1e-30)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    fn product(self, other: Parity) -> Parity {
        if self == other {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Samples of a radial function on a grid.
#[derive(Debug, Clone)]
pub struct RadialField {
    grid: Arc<RadialGrid>,
    values: Vec<f64>,
    parity: Parity,
    decay_hint: Option<f64>,
}

impl RadialField {
    pub fn from_values(grid: &Arc<RadialGrid>, values: Vec<f64>) -> Self {
        assert_eq!(values.len(), grid.len(), "field length does not match grid");
        RadialField {
            grid: grid.clone(),
            values,
            parity: Parity::Even,
            decay_hint: None,
        }
    }

    pub fn from_fn<F: Fn(f64) -> f64>(grid: &Arc<RadialGrid>, f: F) -> Self {
        let values = grid.nodes().iter().map(|&r| f(r)).collect();
        Self::from_values(grid, values)
    }

    pub fn zeros(grid: &Arc<RadialGrid>) -> Self {
        Self::from_values(grid, vec![0.0; grid.len()])
    }

    pub fn with_decay_hint(mut self, p: f64) -> Self {
        self.decay_hint = Some(p);
        self
    }

    pub fn grid(&self) -> &Arc<RadialGrid> {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn parity(&self) -> Parity {
        self.parity
    }

    pub fn decay_hint(&self) -> Option<f64> {
        self.decay_hint
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }

    fn same_grid(&self, other: &RadialField) {
        assert!(
            Arc::ptr_eq(&self.grid, &other.grid) || self.grid.nodes() == other.grid.nodes(),
            "fields live on different grids"
        );
    }

    /// First radial derivative f'(r). The input must be even across the
    /// origin (all physical profiles here are).
    pub fn deriv(&self) -> RadialField {
        assert_eq!(self.parity, Parity::Even, "derivative needs an even field");
        let values = self.grid.apply_stencils(&self.grid.d1, &self.values);
        RadialField {
            grid: self.grid.clone(),
            values,
            parity: Parity::Odd,
            decay_hint: self.decay_hint.map(|p| p + 1.0),
        }
    }

    /// Radial Laplacian f'' + (n-1)/r f' of an even field.
    pub fn radial_laplacian(&self) -> RadialField {
        assert_eq!(self.parity, Parity::Even, "laplacian needs an even field");
        let g = &self.grid;
        let fpp = g.apply_stencils(&g.d2, &self.values);
        let fp = g.apply_stencils(&g.d1, &self.values);
        let coef = (g.n - 1) as f64;
        let values = (0..g.len())
            .map(|j| fpp[j] + coef / g.nodes[j] * fp[j])
            .collect();
        RadialField {
            grid: self.grid.clone(),
            values,
            parity: Parity::Even,
            decay_hint: self.decay_hint.map(|p| p + 2.0),
        }
    }

    /// Scaling operator r f'(r); vanishes at the origin, even output.
    pub fn lambda_op(&self) -> RadialField {
        let mut d = self.deriv();
        for (v, r) in d.values.iter_mut().zip(self.grid.nodes()) {
            *v *= r;
        }
        d.parity = Parity::Even;
        d.decay_hint = self.decay_hint;
        d
    }

    /// D^k: iterated radial Laplacian for even k, with one extra radial
    /// derivative for odd k.
    pub fn dk_op(&self, k: usize) -> Result<RadialField> {
        if k == 0 {
            return Ok(self.clone());
        }
        if self.grid.len() < 10 * k {
            return Err(Error::ResolutionTooCoarse(format!(
                "D^{k} needs at least {} nodes, grid has {}",
                10 * k,
                self.grid.len()
            )));
        }
        let mut f = self.clone();
        for _ in 0..k / 2 {
            f = f.radial_laplacian();
        }
        if k % 2 == 1 {
            f = f.deriv();
        }
        Ok(f)
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> RadialField {
        RadialField {
            grid: self.grid.clone(),
            values: self.values.iter().map(|&v| f(v)).collect(),
            parity: self.parity,
            decay_hint: None,
        }
    }

    pub fn zip_with<F: Fn(f64, f64) -> f64>(&self, other: &RadialField, f: F) -> RadialField {
        self.same_grid(other);
        RadialField {
            grid: self.grid.clone(),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            parity: self.parity,
            decay_hint: None,
        }
    }

    pub fn scaled(&self, c: f64) -> RadialField {
        self.map(|v| c * v)
    }

    /// Interpolate at an arbitrary radius. Cubic Lagrange on the four
    /// nearest nodes; even continuation below the first node; zero beyond
    /// R_max with the second component flagging the extrapolation.
    pub fn interp(&self, x: f64) -> (f64, bool) {
        let nodes = self.grid.nodes();
        let nn = nodes.len();
        if x > self.grid.r_max {
            return (0.0, true);
        }
        if x < nodes[0] {
            // quadratic in s = r^2 through the first three nodes
            let s: Vec<f64> = nodes[..3].iter().map(|r| r * r).collect();
            let sx = x * x;
            let mut acc = 0.0;
            for i in 0..3 {
                let mut ell = 1.0;
                for j in 0..3 {
                    if j != i {
                        ell *= (sx - s[j]) / (s[i] - s[j]);
                    }
                }
                let vi = if self.parity == Parity::Even {
                    self.values[i]
                } else {
                    // odd fields interpolate v/r in s and multiply back
                    self.values[i] / nodes[i]
                };
                acc += ell * vi;
            }
            if self.parity == Parity::Odd {
                acc *= x;
            }
            return (acc, false);
        }
        let hi = nodes.partition_point(|&r| r < x);
        let start = hi.saturating_sub(2).min(nn - 4);
        let xs = &nodes[start..start + 4];
        let mut acc = 0.0;
        for i in 0..4 {
            let mut ell = 1.0;
            for j in 0..4 {
                if j != i {
                    ell *= (x - xs[j]) / (xs[i] - xs[j]);
                }
            }
            acc += ell * self.values[start + i];
        }
        (acc, false)
    }
}

impl std::ops::Add for &RadialField {
    type Output = RadialField;
    fn add(self, rhs: &RadialField) -> RadialField {
        assert_eq!(self.parity, rhs.parity, "parity mismatch in field addition");
        self.zip_with(rhs, |a, b| a + b)
    }
}

impl std::ops::Sub for &RadialField {
    type Output = RadialField;
    fn sub(self, rhs: &RadialField) -> RadialField {
        assert_eq!(self.parity, rhs.parity, "parity mismatch in field subtraction");
        self.zip_with(rhs, |a, b| a - b)
    }
}

impl std::ops::Mul for &RadialField {
    type Output = RadialField;
    fn mul(self, rhs: &RadialField) -> RadialField {
        let mut out = self.zip_with(rhs, |a, b| a * b);
        out.parity = self.parity.product(rhs.parity);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quad;

    fn grid(n: u32, r_max: f64, nn: usize) -> Arc<RadialGrid> {
        RadialGrid::new(n, r_max, nn, GridScheme::Uniform).unwrap()
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(RadialGrid::new(4, 30.0, 100, GridScheme::Uniform).is_err());
        assert!(RadialGrid::new(5, 30.0, 8, GridScheme::Uniform).is_err());
        assert!(RadialGrid::new(5, -1.0, 100, GridScheme::Uniform).is_err());
    }

    #[test]
    fn uniform_spacing() {
        let g = grid(5, 30.0, 3000);
        let h = g.nodes()[1] - g.nodes()[0];
        assert!((h - 0.01).abs() < 1e-14);
        assert!((g.nodes()[2999] - 30.0).abs() < 1e-12);
        assert!((g.nodes()[0] - 0.01).abs() < 1e-14);
    }

    #[test]
    fn quadrature_monomial_exact() {
        // int_0^1 r^2 r^4 dr = 1/7
        let g = grid(5, 1.0, 64);
        let f = RadialField::from_fn(&g, |r| r * r);
        let got = g.integrate_radial(&f, |_| 1.0).value;
        assert!(
            (got - 1.0 / 7.0).abs() < 1e-15,
            "got {got}, want {}",
            1.0 / 7.0
        );
        // every monomial through the stated degree
        for k in 0..=QUAD_DEGREE {
            let f = RadialField::from_fn(&g, |r| r.powi(k as i32));
            let got = g.integrate_radial(&f, |_| 1.0).value;
            let exact = 1.0 / (k as f64 + 5.0);
            assert!(
                (got - exact).abs() < 1e-14 * exact.abs().max(1.0),
                "degree {k}: got {got}, want {exact}"
            );
        }
    }

    #[test]
    fn quadrature_gaussian_vs_adaptive_oracle() {
        let g = grid(5, 30.0, 3000);
        let f = RadialField::from_fn(&g, |r| (-r * r / 4.0).exp());
        let got = g.integrate_radial(&f, |_| 1.0).value;
        let oracle = quad::adaptive(|r| (-r * r / 4.0).exp() * r.powi(4), 0.0, 30.0, 1e-13);
        assert!(
            (got - oracle.value).abs() < 1e-10 * oracle.value,
            "grid {got} vs oracle {}",
            oracle.value
        );
    }

    #[test]
    fn quadrature_weights_positive() {
        for (n, r_max, nn, scheme) in [
            (5, 30.0, 3000, GridScheme::Uniform),
            (5, 30.0, 100, GridScheme::Uniform),
            (3, 1.0, 64, GridScheme::Uniform),
            (5, 150.0, 2000, GridScheme::stretched()),
            (7, 30.0, 500, GridScheme::Uniform),
        ] {
            let g = RadialGrid::new(n, r_max, nn, scheme).unwrap();
            let min = g.quad_weights().iter().cloned().fold(f64::INFINITY, f64::min);
            assert!(min > 0.0, "min weight {min} for n={n}, scheme {scheme:?}");
        }
    }

    #[test]
    fn cumulative_matches_total() {
        let g = grid(5, 10.0, 256);
        let f = RadialField::from_fn(&g, |r| (-r).exp());
        let cum = g.cumulative_integral(&f, |_| 1.0);
        let total = g.integrate_radial(&f, |_| 1.0).value;
        assert!((cum[g.len() - 1] - total).abs() < 1e-13 * total.abs());
        // monotone for positive integrand
        for w in cum.windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn laplacian_of_r_squared_is_2n() {
        for n in [3u32, 5, 7] {
            let g = grid(n, 10.0, 200);
            let f = RadialField::from_fn(&g, |r| r * r);
            let lap = f.radial_laplacian();
            for &v in lap.values() {
                assert!((v - 2.0 * n as f64).abs() < 1e-9, "n={n}: {v}");
            }
        }
    }

    #[test]
    fn laplacian_of_constant_is_zero() {
        let g = grid(5, 10.0, 128);
        let f = RadialField::from_fn(&g, |_| 1.0);
        assert!(f.radial_laplacian().max_abs() < 1e-10);
    }

    #[test]
    fn laplacian_of_phi_near_origin() {
        // phi = 2/(2+r^2) has laplacian -5 at the origin in R^5
        let mut prev_err = f64::INFINITY;
        for nn in [500, 1000, 2000] {
            let g = grid(5, 5.0, nn);
            let f = RadialField::from_fn(&g, |r| 2.0 / (2.0 + r * r));
            let lap = f.radial_laplacian();
            let err = (lap.values()[0] + 5.0).abs();
            assert!(err < prev_err);
            prev_err = err;
        }
        assert!(prev_err < 1e-4, "error at first node {prev_err}");
    }

    #[test]
    fn lambda_op_examples() {
        let g = grid(5, 10.0, 1000);
        // r phi' = -4r^2/(2+r^2)^2; at r = sqrt(2) this is -1/2
        let f = RadialField::from_fn(&g, |r| 2.0 / (2.0 + r * r));
        let lam = f.lambda_op();
        let (v, _) = lam.interp(2f64.sqrt());
        assert!((v + 0.5).abs() < 1e-5, "{v}");
        // constants map to zero
        let c = RadialField::from_fn(&g, |_| 3.25);
        assert!(c.lambda_op().max_abs() < 1e-9);
        // r^2 maps to 2 r^2
        let f = RadialField::from_fn(&g, |r| r * r);
        let lam = f.lambda_op();
        for (j, &r) in g.nodes().iter().enumerate() {
            assert!((lam.values()[j] - 2.0 * r * r).abs() < 1e-8);
        }
    }

    #[test]
    fn dk_op_matches_definition() {
        let g = grid(5, 10.0, 600);
        let f = RadialField::from_fn(&g, |r| (-r * r / 2.0).exp());
        // k = 2 equals the radial Laplacian pointwise
        let d2 = f.dk_op(2).unwrap();
        let lap = f.radial_laplacian();
        for (a, b) in d2.values().iter().zip(lap.values()) {
            assert_eq!(a, b);
        }
        // k = 1 of r^2 is 2r
        let f = RadialField::from_fn(&g, |r| r * r);
        let d1 = f.dk_op(1).unwrap();
        for (j, &r) in g.nodes().iter().enumerate() {
            assert!((d1.values()[j] - 2.0 * r).abs() < 1e-8);
        }
    }

    #[test]
    fn dk3_of_phi_vs_symbolic_oracle() {
        // phi = 2/(2+r^2): lap phi = -4(r^2+10)/(2+r^2)^3 and
        // D^3 phi = (lap phi)' = 16 r (r^2+14)/(2+r^2)^4
        let lap_phi = |r: f64| {
            let d = 2.0 + r * r;
            -4.0 * (r * r + 10.0) / (d * d * d)
        };
        assert!((lap_phi(0.0) + 5.0).abs() < 1e-12);
        let dlap_phi = |r: f64| {
            let d = 2.0 + r * r;
            16.0 * r * (r * r + 14.0) / (d * d * d * d)
        };
        let mut errs = Vec::new();
        for nn in [300, 600, 1200] {
            let g = grid(5, 10.0, nn);
            let f = RadialField::from_fn(&g, |r| 2.0 / (2.0 + r * r));
            let d3 = f.dk_op(3).unwrap();
            let mut err = 0.0f64;
            for (j, &r) in g.nodes().iter().enumerate() {
                if r > 0.2 && r < 8.0 {
                    err = err.max((d3.values()[j] - dlap_phi(r)).abs());
                }
            }
            errs.push(err);
        }
        // second-order convergence toward the symbolic derivative
        let order = (errs[0] / errs[2]).log2() / 2.0;
        assert!((order - 2.0).abs() < 0.4, "observed order {order}, errors {errs:?}");
        assert!(errs[2] < 2e-3, "final D^3 error {}", errs[2]);
    }

    #[test]
    fn operators_are_linear_at_stencil_level() {
        let g = grid(5, 10.0, 128);
        let f1 = RadialField::from_fn(&g, |r| (-r).exp() * (1.0 + r * r));
        let f2 = RadialField::from_fn(&g, |r| 1.0 / (1.0 + r * r));
        let (a, b) = (1.7, -0.3);
        let comb = &f1.scaled(a) + &f2.scaled(b);
        for (lhs, rhs) in [
            (
                comb.radial_laplacian(),
                &f1.radial_laplacian().scaled(a) + &f2.radial_laplacian().scaled(b),
            ),
            (
                comb.lambda_op(),
                &f1.lambda_op().scaled(a) + &f2.lambda_op().scaled(b),
            ),
        ] {
            for (x, y) in lhs.values().iter().zip(rhs.values()) {
                assert!((x - y).abs() <= 1e-13 * x.abs().max(1.0));
            }
        }
    }

    #[test]
    fn stencil_convergence_order() {
        // second-order convergence of the Laplacian on a smooth profile:
        // lap e^{-r^2/2} = (r^2 - 5) e^{-r^2/2} in R^5
        let exact = |r: f64| (r * r - 5.0) * (-r * r / 2.0).exp();
        let mut errs = Vec::new();
        let sizes = [200usize, 400, 800];
        for &nn in &sizes {
            let g = grid(5, 8.0, nn);
            let f = RadialField::from_fn(&g, |r| (-r * r / 2.0).exp());
            let lap = f.radial_laplacian();
            let mut err = 0.0f64;
            for (j, &r) in g.nodes().iter().enumerate() {
                err = err.max((lap.values()[j] - exact(r)).abs());
            }
            errs.push(err);
        }
        let order1 = (errs[0] / errs[1]).log2();
        let order2 = (errs[1] / errs[2]).log2();
        for o in [order1, order2] {
            assert!((o - 2.0).abs() < 0.2, "observed order {o}");
        }
    }

    #[test]
    fn stretched_grid_shape() {
        let g = RadialGrid::new(5, 150.0, 1500, GridScheme::stretched()).unwrap();
        assert!((g.nodes()[1499] - 150.0).abs() < 1e-9);
        // clustered near origin: first spacing well below uniform
        assert!(g.nodes()[0] < 150.0 / 1500.0);
        // laplacian stays accurate on the mapped mesh:
        // lap 1/(1+r^2) = -2(r^2+5)/(1+r^2)^3 in R^5
        let f = RadialField::from_fn(&g, |r| 1.0 / (1.0 + r * r));
        let lap = f.radial_laplacian();
        let mut err = 0.0f64;
        for (j, &r) in g.nodes().iter().enumerate() {
            if r < 20.0 {
                let d = 1.0 + r * r;
                let ex = -2.0 * (r * r + 5.0) / (d * d * d);
                err = err.max((lap.values()[j] - ex).abs());
            }
        }
        assert!(err < 5e-3, "stretched laplacian err {err}");
    }

    #[test]
    fn interp_roundtrip() {
        let g = grid(5, 10.0, 400);
        let f = RadialField::from_fn(&g, |r| (1.0 + r * r).recip());
        for &x in &[0.003, 0.017, 1.234, 5.5, 9.99] {
            let (v, ex) = f.interp(x);
            assert!(!ex);
            assert!((v - (1.0 + x * x).recip()).abs() < 1e-8, "x={x}");
        }
        let (v, ex) = f.interp(10.5);
        assert!(ex);
        assert_eq!(v, 0.0);
    }

    #[test]
    fn integrate_zero_field() {
        let g = grid(5, 30.0, 100);
        let z = RadialField::zeros(&g);
        assert_eq!(g.integrate_full(&z, |_| 1.0).value, 0.0);
    }

    #[test]
    fn sphere_areas() {
        use std::f64::consts::PI;
        assert!((sphere_area(3) - 4.0 * PI).abs() < 1e-12);
        assert!((sphere_area(5) - 8.0 * PI * PI / 3.0).abs() < 1e-12);
    }

    #[test]
    fn truncation_flag_raised_for_slow_decay() {
        let g = grid(5, 30.0, 500);
        // integrand ~ r^{-2} * r^4 grows: truncation clearly dominated
        let f = RadialField::from_fn(&g, |r| 1.0 / (1.0 + r * r));
        let res = g.integrate_radial(&f, |_| 1.0);
        assert!(res.truncation_dominated(1e-10));
        // a weighted integrand decays fast: no flag
        let res = g.integrate_radial(&f, |r| (-r * r / 4.0).exp());
        assert!(!res.truncation_dominated(1e-10));
    }
}
