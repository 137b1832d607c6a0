//! Adaptive quadrature and scalar root finding.
//!
//! The adaptive integrator is a 7/15 Gauss-Kronrod pair with recursive
//! interval bisection. It serves as the reference integrator for weighted
//! inner products on unbounded domains and for the spectral certificate,
//! where fixed-grid quadrature would be either wasteful or not accurate
//! enough.

/// Kronrod-15 abscissae on [0, 1] side of the symmetric rule.
const XGK: [f64; 8] = [
    0.991_455_371_120_813,
    0.949_107_912_342_759,
    0.864_864_423_359_769,
    0.741_531_185_599_394,
    0.586_087_235_467_691,
    0.405_845_151_377_397,
    0.207_784_955_007_898,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529,
    0.063_092_092_629_979,
    0.104_790_010_322_250,
    0.140_653_259_715_525,
    0.169_004_726_639_267,
    0.190_350_578_064_785,
    0.204_432_940_075_298,
    0.209_482_141_084_728,
];

/// Gauss-7 weights, matching the even-index Kronrod abscissae.
const WG: [f64; 4] = [
    0.129_484_966_168_870,
    0.279_705_391_489_277,
    0.381_830_050_505_119,
    0.417_959_183_673_469,
];

/// 8-point Gauss-Legendre nodes/weights on [-1, 1]; exact through degree 15.
pub const GL8_NODES: [f64; 8] = [
    -0.960_289_856_497_536_3,
    -0.796_666_477_413_626_7,
    -0.525_532_409_916_329_0,
    -0.183_434_642_495_649_8,
    0.183_434_642_495_649_8,
    0.525_532_409_916_329_0,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];

pub const GL8_WEIGHTS: [f64; 8] = [
    0.101_228_536_290_376_3,
    0.222_381_034_453_374_5,
    0.313_706_645_877_887_3,
    0.362_683_783_378_362_0,
    0.362_683_783_378_362_0,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

#[derive(Debug, Clone, Copy)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub evaluations: usize,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut kron = 0.0;
    let mut gauss = 0.0;
    for i in 0..8 {
        let x = XGK[i] * half;
        let (fl, fr) = if i == 7 {
            let v = f(c);
            (v, 0.0)
        } else {
            (f(c - x), f(c + x))
        };
        let s = fl + fr;
        kron += WGK[i] * s;
        if i % 2 == 1 {
            gauss += WG[i / 2] * s;
        } else if i == 7 {
            gauss += WG[3] * fl;
        }
    }
    kron *= half;
    gauss *= half;
    let diff = (kron - gauss).abs();
    // standard Kronrod error magnification
    let err = (200.0 * diff).powf(1.5).min(diff.max(1e-300));
    (kron, err)
}

/// Adaptively integrate `f` over `[a, b]` to absolute tolerance `tol`
/// (interpreted relative to the accumulated value when that is larger).
pub fn adaptive<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> QuadResult {
    struct Stack {
        total: f64,
        err: f64,
        evals: usize,
    }
    fn recurse<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        tol: f64,
        depth: usize,
        st: &mut Stack,
    ) {
        let (v, e) = gk15(f, a, b);
        st.evals += 15;
        if e <= tol || depth >= 48 || (b - a).abs() < 1e-15 * (a.abs() + b.abs() + 1.0) {
            st.total += v;
            st.err += e;
            return;
        }
        let c = 0.5 * (a + b);
        recurse(f, a, c, 0.5 * tol, depth + 1, st);
        recurse(f, c, b, 0.5 * tol, depth + 1, st);
    }
    let mut st = Stack { total: 0.0, err: 0.0, evals: 0 };
    if a == b {
        return QuadResult { value: 0.0, error_estimate: 0.0, evaluations: 0 };
    }
    recurse(&f, a, b, tol, 0, &mut st);
    QuadResult { value: st.total, error_estimate: st.err, evaluations: st.evals }
}

/// Brent's method on a bracketing interval. Panics if `f(a)` and `f(b)` do
/// not bracket a root.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> f64 {
    let (mut a, mut b) = (a, b);
    let mut fa = f(a);
    let mut fb = f(b);
    assert!(
        fa * fb <= 0.0,
        "brent_root: no sign change on [{a}, {b}] ({fa}, {fb})"
    );
    if fa.abs() < fb.abs() {
        std::mem::swap(&mut a, &mut b);
        std::mem::swap(&mut fa, &mut fb);
    }
    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut mflag = true;
    for _ in 0..200 {
        if fb == 0.0 || (b - a).abs() < tol {
            return b;
        }
        let s = if fa != fc && fb != fc {
            // inverse quadratic interpolation
            a * fb * fc / ((fa - fb) * (fa - fc))
                + b * fa * fc / ((fb - fa) * (fb - fc))
                + c * fa * fb / ((fc - fa) * (fc - fb))
        } else {
            b - fb * (b - a) / (fb - fa)
        };
        let cond = {
            let lo = (3.0 * a + b) / 4.0;
            let (lo, hi) = if lo < b { (lo, b) } else { (b, lo) };
            s < lo
                || s > hi
                || (mflag && (s - b).abs() >= (b - c).abs() / 2.0)
                || (!mflag && (s - b).abs() >= (c - d).abs() / 2.0)
                || (mflag && (b - c).abs() < tol)
                || (!mflag && (c - d).abs() < tol)
        };
        let s = if cond {
            mflag = true;
            0.5 * (a + b)
        } else {
            mflag = false;
            s
        };
        let fs = f(s);
        d = c;
        c = b;
        fc = fb;
        if fa * fs < 0.0 {
            b = s;
            fb = fs;
        } else {
            a = s;
            fa = fs;
        }
        if fa.abs() < fb.abs() {
            std::mem::swap(&mut a, &mut b);
            std::mem::swap(&mut fa, &mut fb);
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_moment() {
        // int_0^inf r^4 e^{-r^2/4} dr = 12 sqrt(pi)
        let q = adaptive(|r| r.powi(4) * (-r * r / 4.0).exp(), 0.0, 40.0, 1e-12);
        assert!((q.value - 12.0 * PI.sqrt()).abs() < 1e-10);
    }

    #[test]
    fn polynomial_exact() {
        let q = adaptive(|r| r * r, 0.0, 1.0, 1e-13);
        assert!((q.value - 1.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn oscillatory() {
        let q = adaptive(|r| (10.0 * r).sin(), 0.0, PI, 1e-12);
        let exact = (1.0 - (10.0 * PI).cos()) / 10.0;
        assert!((q.value - exact).abs() < 1e-10);
    }

    #[test]
    fn brent_finds_sqrt2() {
        let r = brent_root(|x| x * x - 2.0, 1.0, 2.0, 1e-14);
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
    }
}
