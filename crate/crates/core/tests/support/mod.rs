//! Reference implementations used as test oracles. Nothing here calls into
//! the library's numerics or extraction code.

#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

// ---------------------------------------------------------------------------
// naive DcOS walker

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefEvent {
    pub is_dc: bool,
    pub up: bool,
    pub tick: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefCycle {
    pub k: u64,
    pub x_over_delta: f64,
}

/// Tick-by-tick walker. Overshoots are found by stepping one threshold at a
/// time past the confirmation level rather than by flooring a ratio.
pub fn reference_walk(x: &[f64], delta: f64) -> (Vec<RefEvent>, Vec<RefCycle>) {
    let mut events = Vec::new();
    let mut cycles = Vec::new();
    if x.is_empty() {
        return (events, cycles);
    }
    let mut hi = x[0];
    let mut lo = x[0];
    // None until the first directional change
    let mut up: Option<bool> = None;
    let mut level = 0.0;
    let mut ext = 0.0;
    let mut k = 0u64;

    let step_overshoots = |up: bool, level: f64, ext: f64, k: &mut u64, tick: usize, events: &mut Vec<RefEvent>| {
        loop {
            let dist = if up { ext - level } else { level - ext };
            if dist / delta >= (*k + 1) as f64 {
                *k += 1;
                events.push(RefEvent { is_dc: false, up, tick });
            } else {
                break;
            }
        }
    };

    for (t, &p) in x.iter().enumerate().skip(1) {
        match up {
            None => {
                if p - lo >= delta {
                    up = Some(true);
                    level = lo + delta;
                } else if hi - p >= delta {
                    up = Some(false);
                    level = hi - delta;
                } else {
                    hi = hi.max(p);
                    lo = lo.min(p);
                    continue;
                }
                ext = p;
                k = 0;
                events.push(RefEvent { is_dc: true, up: up.unwrap(), tick: t });
                step_overshoots(up.unwrap(), level, ext, &mut k, t, &mut events);
            }
            Some(u) => {
                let further = if u { p > ext } else { p < ext };
                let reversal = if u { ext - p >= delta } else { p - ext >= delta };
                if further {
                    ext = p;
                    step_overshoots(u, level, ext, &mut k, t, &mut events);
                } else if reversal {
                    let dist = if u { ext - level } else { level - ext };
                    cycles.push(RefCycle { k, x_over_delta: dist / delta });
                    level = if u { ext - delta } else { ext + delta };
                    ext = p;
                    k = 0;
                    up = Some(!u);
                    events.push(RefEvent { is_dc: true, up: !u, tick: t });
                    step_overshoots(!u, level, ext, &mut k, t, &mut events);
                }
            }
        }
    }
    (events, cycles)
}

/// Gaussian random walk in log space (xorshift + Box–Muller, separate
/// from the library generator).
pub fn random_walk(seed: u64, n: usize, sigma: f64) -> Vec<f64> {
    let mut s = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut uniform = move || {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        ((s >> 11) as f64 + 0.5) / (1u64 << 53) as f64
    };
    let mut x = 0.0;
    let mut out = Vec::with_capacity(n);
    out.push(x);
    while out.len() < n {
        let (u1, u2) = (uniform(), uniform());
        x += sigma * (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos();
        out.push(x);
    }
    out
}

// ---------------------------------------------------------------------------
// quadrature

fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adaptive(f: &dyn Fn(f64) -> f64, a: f64, b: f64, fa: f64, fm: f64, fb: f64, whole: f64, tol: f64, depth: u32) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    adaptive(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + adaptive(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// Adaptive Simpson on `[a, b]`, split into 64 panels first.
pub fn integrate(f: &dyn Fn(f64) -> f64, a: f64, b: f64, tol: f64) -> f64 {
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    (0..pieces)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = lo + h;
            let (fa, fm, fb) = (f(lo), f(0.5 * (lo + hi)), f(hi));
            let whole = simpson(lo, hi, fa, fm, fb);
            adaptive(f, lo, hi, fa, fm, fb, whole, tol / pieces as f64, 40)
        })
        .sum()
}

/// ln Γ(m/2) for a positive integer m, by exact recursion from Γ(1) = 1
/// and Γ(1/2) = √π.
pub fn ln_gamma_half(m: u32) -> f64 {
    let (mut acc, mut z) = if m.is_multiple_of(2) { (0.0, 1.0) } else { (0.5 * PI.ln(), 0.5) };
    let target = f64::from(m) / 2.0;
    while z < target {
        acc += z.ln();
        z += 1.0;
    }
    acc
}

/// Upper χ² tail by integrating the density after the substitution t = u².
pub fn chi2_sf_oracle(x: f64, k: u32) -> f64 {
    let kf = f64::from(k);
    let ln_norm = -(kf / 2.0) * 2f64.ln() - ln_gamma_half(k) + 2f64.ln();
    let g = move |u: f64| {
        if u <= 0.0 {
            return if k == 1 { (ln_norm).exp() } else { 0.0 };
        }
        (ln_norm + (kf - 1.0) * u.ln() - 0.5 * u * u).exp()
    };
    let a = x.sqrt();
    let b = a.max(kf.sqrt()) + 40.0;
    integrate(&g, a, b, 1e-13)
}

/// Two-sided Student-t tail: one minus the integral of the density on
/// `[-|t|, |t|]`.
pub fn t_sf_oracle(t: f64, nu: u32) -> f64 {
    let n = f64::from(nu);
    let ln_c = ln_gamma_half(nu + 1) - ln_gamma_half(nu) - 0.5 * (n * PI).ln();
    let f = move |s: f64| (ln_c - 0.5 * (n + 1.0) * (1.0 + s * s / n).ln()).exp();
    1.0 - 2.0 * integrate(&f, 0.0, t.abs(), 1e-13)
}

/// `2 Σ (-1)^(k-1) exp(-2 k² λ²)` summed until terms vanish.
pub fn kolmogorov_oracle(lambda: f64) -> f64 {
    let mut sum = 0.0;
    for k in 1..=100_000u64 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        if term == 0.0 {
            break;
        }
        sum += if k % 2 == 1 { term } else { -term };
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Splitmix-style uniform stream for picking oracle test points.
pub struct Points(u64);

impl Points {
    pub fn new(seed: u64) -> Self {
        Self(seed)
    }

    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        self.0 = self.0.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        lo + (hi - lo) * ((z >> 11) as f64 / (1u64 << 53) as f64)
    }

    pub fn int(&mut self, lo: u32, hi: u32) -> u32 {
        lo + (self.uniform(0.0, f64::from(hi - lo + 1)) as u32).min(hi - lo)
    }
}
