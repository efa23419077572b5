//! Extremal bounds on the density of UST vertices of a given degree, the
//! one-dimensional optimization behind them, and the graphs showing sharpness.

use rand::Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::MultiGraph;
use crate::rng;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    Lower,
    Upper,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DegreeBound {
    pub k: usize,
    pub direction: Direction,
    pub value: f64,
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|x| (x as f64).ln()).sum()
}

/// Asymptotic bound on `L_k / n` for dense graphs close to a nondegenerate graphon.
pub fn degree_density_bound(k: usize) -> Result<DegreeBound> {
    let inv_e = (-1.0f64).exp();
    match k {
        0 => Err(Error::InvalidDegree(0)),
        1 => Ok(DegreeBound { k, direction: Direction::Lower, value: inv_e }),
        2 => Ok(DegreeBound { k, direction: Direction::Upper, value: inv_e }),
        _ => {
            let m = (k - 2) as f64;
            let value = (m * m.ln() - ln_factorial(k - 1) - m).exp();
            Ok(DegreeBound { k, direction: Direction::Upper, value })
        }
    }
}

/// `((k − 1)/e)^{k − 1}`.
pub fn lemma_closed_form(k: usize) -> f64 {
    let m = (k - 1) as f64;
    (m * (m.ln() - 1.0)).exp()
}

fn f(k: i32, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-x).exp() * x.powi(k)
    }
}

fn df(k: i32, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-x).exp() * x.powi(k - 1) * (k as f64 - x)
    }
}

/// Two-point value `λ e^{−y} y^k` at the best feasible `λ = min(1, 1/y)`.
fn reduced(k: i32, y: f64) -> f64 {
    (1.0f64).min(1.0 / y) * f(k, y)
}

/// Golden-section maximization of a unimodal function on `[a, b]`.
fn golden_max(g: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = b - r * (b - a);
    let mut x2 = a + r * (b - a);
    let (mut f1, mut f2) = (g(x1), g(x2));
    while b - a > tol {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + r * (b - a);
            f2 = g(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - r * (b - a);
            f1 = g(x1);
        }
    }
    let x = (a + b) / 2.0;
    (x, g(x))
}

/// Euclidean projection onto `{b ≥ 0, mean(b) ≤ 1}`.
fn project(b: &mut [f64]) {
    let n = b.len() as f64;
    let clamped: f64 = b.iter().map(|x| x.max(0.0)).sum();
    if clamped <= n {
        b.iter_mut().for_each(|x| *x = x.max(0.0));
        return;
    }
    // find τ with Σ max(b_i − τ, 0) = n
    let mut sorted = b.to_vec();
    sorted.sort_by(|x, y| y.total_cmp(x));
    let mut prefix = 0.0;
    let mut tau = 0.0;
    for (i, &x) in sorted.iter().enumerate() {
        prefix += x;
        let t = (prefix - n) / (i + 1) as f64;
        if i + 1 == sorted.len() || sorted[i + 1] <= t {
            tau = t;
            break;
        }
    }
    b.iter_mut().for_each(|x| *x = (*x - tau).max(0.0));
}

fn phi(k: i32, b: &[f64]) -> f64 {
    b.iter().map(|&x| f(k, x)).sum::<f64>() / b.len() as f64
}

/// Projected gradient ascent of `Φ(b) = mean f(b_i)` over `{b ≥ 0, mean(b) ≤ 1}`.
fn ascend(k: i32, mut b: Vec<f64>) -> f64 {
    project(&mut b);
    let mut value = phi(k, &b);
    let mut step = 1.0;
    for _ in 0..20_000 {
        let mut next: Vec<f64> = b.iter().map(|&x| x + step * df(k, x)).collect();
        project(&mut next);
        let v = phi(k, &next);
        if v > value {
            let gain = v - value;
            b = next;
            value = v;
            step *= 1.5;
            if gain < 1e-16 {
                break;
            }
        } else {
            step /= 2.0;
            if step < 1e-14 {
                break;
            }
        }
    }
    value
}

/// Number of points in the gradient oracle's discretization.
pub const ORACLE_POINTS: usize = 420;

/// Multistart projected-gradient maximum of the `n`-point problem.
///
/// Starts cover every support size `m ∈ 1..=n` (values `n/m` on `m` seeded
/// random coordinates, jittered) plus fully random vectors.
pub fn gradient_oracle(k: usize, n: usize, seed: u64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidDegree(k));
    }
    if n == 0 {
        return Err(Error::ParameterOutOfRange { name: "n", value: 0.0 });
    }
    let ki = k as i32;
    let mut rng = rng::stream(seed, k as u64);
    let mut best: f64 = 0.0;
    for m in 1..=n {
        let mut b = vec![0.0; n];
        let mut idx: Vec<usize> = (0..n).collect();
        for i in 0..m {
            let j = rng.random_range(i..n);
            idx.swap(i, j);
        }
        for &i in &idx[..m] {
            b[i] = n as f64 / m as f64 * (1.0 + 0.01 * (rng.random::<f64>() - 0.5));
        }
        best = best.max(ascend(ki, b));
    }
    for _ in 0..16 {
        let b: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * 2.0 * k as f64).collect();
        best = best.max(ascend(ki, b));
    }
    Ok(best)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LemmaMax {
    pub k: usize,
    /// Golden-section maximum of the reduced two-point problem.
    pub value: f64,
    pub argmax_y: f64,
    pub closed_form: f64,
    /// Best value found by the `n`-point gradient oracle.
    pub oracle: f64,
}

/// Maximum of `λ e^{−y} y^k` over `λ ∈ [0,1]`, `y ≥ 0`, `λ y ≤ 1`, cross-checked
/// against the closed form (within `tol`) and the gradient oracle (never above,
/// within `10·tol`).
pub fn optimize_lemma(k: usize, tol: f64) -> Result<LemmaMax> {
    if k < 2 {
        return Err(Error::InvalidDegree(k));
    }
    if !(tol > 0.0) {
        return Err(Error::ParameterOutOfRange { name: "tol", value: tol });
    }
    let oracle = gradient_oracle(k, ORACLE_POINTS, 0)?;
    let ki = k as i32;
    let (y, value) = golden_max(|y| reduced(ki, y), 0.0, k as f64, 1e-10);
    let closed_form = lemma_closed_form(k);
    if (value - closed_form).abs() > tol * closed_form.max(1.0) {
        return Err(Error::Numerical(format!("reduced maximum {value} differs from {closed_form}")));
    }
    if oracle > closed_form + 1e-12 * closed_form.max(1.0) {
        return Err(Error::Numerical(format!("gradient oracle {oracle} exceeds {closed_form}")));
    }
    if (oracle - value).abs() > 10.0 * tol * closed_form.max(1.0) {
        return Err(Error::Numerical(format!("gradient oracle {oracle} disagrees with {value}")));
    }
    Ok(LemmaMax { k, value, argmax_y: y, closed_form, oracle })
}

pub fn optimize_lemma_max(k: usize, tol: f64) -> Result<f64> {
    Ok(optimize_lemma(k, tol)?.value)
}

/// Clique on `n/(k−2)` vertices (`0..c`) plus `n − c` outside vertices, each
/// clique–outside pair joined independently with probability `alpha`.
pub fn sharpness_graph(n: usize, k: usize, alpha: f64, seed: u64) -> Result<MultiGraph> {
    if k < 4 {
        return Err(Error::InvalidDegree(k));
    }
    if !(0.0..=1.0).contains(&alpha) {
        return Err(Error::ParameterOutOfRange { name: "alpha", value: alpha });
    }
    let c = ((n as f64) / (k - 2) as f64).round() as usize;
    if c < 1 || c > n {
        return Err(Error::ParameterOutOfRange { name: "n", value: n as f64 });
    }
    let mut rng = rng::stream(seed, 0);
    let mut pairs = Vec::new();
    for a in 0..c {
        for b in a + 1..c {
            pairs.push((a, b));
        }
    }
    for a in 0..c {
        for x in c..n {
            if rng.random::<f64>() < alpha {
                pairs.push((a, x));
            }
        }
    }
    MultiGraph::from_pairs(n, &pairs)
}
