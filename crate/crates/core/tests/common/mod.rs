//! Brute-force oracles on raw row-major arrays, independent of the library's
//! projection, entropy and divergence code.

#![allow(dead_code)]

use markov_minimax::{ChainFamily, DualObjectiveContext, SimplexWeights};

/// Row-major `|X| x |X|` matrix with its stationary law.
#[derive(Debug, Clone)]
pub struct Raw {
    pub dims: Vec<usize>,
    pub pi: Vec<f64>,
    pub m: Vec<f64>,
}

impl Raw {
    pub fn size(&self) -> usize {
        self.dims.iter().product()
    }
}

pub fn states(dims: &[usize]) -> Vec<Vec<usize>> {
    let mut out = vec![vec![]];
    for &k in dims {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..k).map(move |v| {
                    let mut s = prefix.clone();
                    s.push(v);
                    s
                })
            })
            .collect();
    }
    out
}

/// Index of `coords` restricted to `subset` (1-based coordinates) in the subspace.
fn sub_index(dims: &[usize], x: &[usize], subset: &[usize]) -> usize {
    subset.iter().fold(0, |acc, &c| acc * dims[c - 1] + x[c - 1])
}

fn sub_size(dims: &[usize], subset: &[usize]) -> usize {
    subset.iter().map(|&c| dims[c - 1]).product()
}

/// Keep-`subset`-in projection by summing over every pair of full states.
pub fn project(p: &Raw, subset: &[usize]) -> Raw {
    let xs = states(&p.dims);
    let k = sub_size(&p.dims, subset);
    let mut mass = vec![0.0; k];
    let mut flow = vec![0.0; k * k];
    for (i, x) in xs.iter().enumerate() {
        let a = sub_index(&p.dims, x, subset);
        mass[a] += p.pi[i];
        for (j, y) in xs.iter().enumerate() {
            let b = sub_index(&p.dims, y, subset);
            flow[a * k + b] += p.pi[i] * p.m[i * xs.len() + j];
        }
    }
    let m = (0..k * k).map(|ab| flow[ab] / mass[ab / k]).collect();
    Raw {
        dims: subset.iter().map(|&c| p.dims[c - 1]).collect(),
        pi: mass,
        m,
    }
}

/// `(x)_j Q_j` with `Q_j` acting on the coordinates `blocks[j]`.
pub fn tensor(dims: &[usize], factors: &[(&Raw, &[usize])]) -> Vec<f64> {
    let xs = states(dims);
    let n = xs.len();
    let mut out = vec![1.0; n * n];
    for (i, x) in xs.iter().enumerate() {
        for (j, y) in xs.iter().enumerate() {
            for (q, block) in factors {
                let k = q.size();
                out[i * n + j] *= q.m[sub_index(dims, x, block) * k + sub_index(dims, y, block)];
            }
        }
    }
    out
}

pub fn entropy_rate(p: &Raw) -> f64 {
    let n = p.size();
    let mut h = 0.0;
    for x in 0..n {
        for y in 0..n {
            let v = p.m[x * n + y];
            if v > 0.0 {
                h -= p.pi[x] * v * v.ln();
            }
        }
    }
    h
}

/// `+inf` on support violations.
pub fn kl(p: &[f64], q: &[f64], pi: &[f64]) -> f64 {
    let n = pi.len();
    let mut d = 0.0;
    for x in 0..n {
        for y in 0..n {
            let a = p[x * n + y];
            if a > 0.0 && pi[x] > 0.0 {
                let b = q[x * n + y];
                if b <= 0.0 {
                    return f64::INFINITY;
                }
                d += pi[x] * a * (a / b).ln();
            }
        }
    }
    d
}

pub fn tv(p: &[f64], q: &[f64], pi: &[f64]) -> f64 {
    let n = pi.len();
    (0..n)
        .map(|x| pi[x] * 0.5 * (0..n).map(|y| (p[x * n + y] - q[x * n + y]).abs()).sum::<f64>())
        .sum()
}

pub fn members(family: &ChainFamily) -> Vec<Raw> {
    let pi = family.pi().values().to_vec();
    family
        .members()
        .iter()
        .map(|p| Raw {
            dims: family.space().dims().to_vec(),
            pi: pi.clone(),
            m: p.entries().to_vec(),
        })
        .collect()
}

pub fn average(ms: &[Raw], w: &[f64]) -> Raw {
    let mut m = vec![0.0; ms[0].m.len()];
    for (p, wi) in ms.iter().zip(w) {
        for (a, b) in m.iter_mut().zip(&p.m) {
            *a += wi * b;
        }
    }
    Raw {
        dims: ms[0].dims.clone(),
        pi: ms[0].pi.clone(),
        m,
    }
}

/// `Q*(w) = (x)_j P-bar(w)^(S_j)` over the given non-empty blocks.
pub fn factorized(ms: &[Raw], w: &[f64], blocks: &[Vec<usize>]) -> Vec<f64> {
    let avg = average(ms, w);
    let projs: Vec<Raw> = blocks.iter().map(|b| project(&avg, b)).collect();
    let pairs: Vec<(&Raw, &[usize])> = projs.iter().zip(blocks).map(|(q, b)| (q, b.as_slice())).collect();
    tensor(&avg.dims, &pairs)
}

/// `sum_i w_i D(P_i || Q*(w))` by direct summation.
pub fn dual_value(ms: &[Raw], w: &[f64], blocks: &[Vec<usize>]) -> f64 {
    let q = factorized(ms, w, blocks);
    ms.iter()
        .zip(w)
        .map(|(p, wi)| if *wi == 0.0 { 0.0 } else { wi * kl(&p.m, &q, &p.pi) })
        .sum()
}

/// Non-empty blocks of a tuple followed by its complement in `[d]`.
pub fn induced_blocks(blocks: &[Vec<usize>], d: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = blocks.iter().filter(|b| !b.is_empty()).cloned().collect();
    let rest: Vec<usize> = (1..=d).filter(|c| !blocks.iter().any(|b| b.contains(c))).collect();
    if !rest.is_empty() {
        out.push(rest);
    }
    out
}

/// Minimizer of `h` over a uniform grid of step `1/steps` on the 2-simplex.
pub fn grid_argmin_h(ctx: &DualObjectiveContext, steps: usize) -> (SimplexWeights, f64) {
    assert_eq!(ctx.n(), 2);
    let mut best = (SimplexWeights::uniform(2), f64::INFINITY);
    for k in 0..=steps {
        let a = k as f64 / steps as f64;
        let w = SimplexWeights::new(vec![a, 1.0 - a]).unwrap();
        let h = ctx.h(&w).unwrap();
        if h < best.1 {
            best = (w, h);
        }
    }
    best
}

/// Nearest point to `v` among simplex points with coordinates in `(1/steps) Z`.
pub fn grid_projection(v: &[f64], steps: usize) -> (Vec<f64>, f64) {
    let r = 1.0 / steps as f64;
    let dist = |w: &[f64]| w.iter().zip(v).map(|(a, b)| (a - b).powi(2)).sum::<f64>();
    let mut best = (vec![], f64::INFINITY);
    match v.len() {
        2 => {
            for a in 0..=steps {
                let w = [a as f64 * r, (steps - a) as f64 * r];
                let d = dist(&w);
                if d < best.1 {
                    best = (w.to_vec(), d);
                }
            }
        }
        3 => {
            for a in 0..=steps {
                for b in 0..=steps - a {
                    let w = [a as f64 * r, b as f64 * r, (steps - a - b) as f64 * r];
                    let d = dist(&w);
                    if d < best.1 {
                        best = (w.to_vec(), d);
                    }
                }
            }
        }
        n => panic!("grid oracle supports n in {{2, 3}}, got {n}"),
    }
    best
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let cov: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let var: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    cov / var
}

/// Every subset of `[d]` as a sorted coordinate list.
pub fn subsets(d: usize) -> Vec<Vec<usize>> {
    (0u32..1 << d)
        .map(|mask| (1..=d).filter(|c| mask >> (c - 1) & 1 == 1).collect())
        .collect()
}
