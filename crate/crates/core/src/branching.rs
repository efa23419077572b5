//! The multi-type branching process `κ_W` on a step graphon, with blocks as
//! particle types, and the closed-form law of the root degree.

use std::collections::BTreeMap;

use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::Serialize;
use statrs::distribution::{Discrete, DiscreteCDF, Poisson as PoissonLaw};

use crate::error::{Error, Result};
use crate::graphon::{categorical, StepGraphon};
use crate::rng::{self, StreamRng};
use crate::trees::RootedTree;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ParticleKind {
    Ancestral,
    Other,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct KappaParticle {
    pub kind: ParticleKind,
    pub block: usize,
}

/// Precomputed offspring laws of `κ_W`.
pub struct Kappa {
    mu: Vec<f64>,
    /// `others[i]`: per target block `j`, Poisson law with mean `W_ij μ_j / d_j` (absent when zero).
    others: Vec<Vec<Option<Poisson<f64>>>>,
    /// `ancestral[i][j] = W_ij μ_j / d_i`.
    ancestral: Vec<Vec<f64>>,
}

impl Kappa {
    pub fn new(w: &StepGraphon) -> Result<Self> {
        w.require_nondegenerate()?;
        let k = w.k();
        let d = w.degrees();
        let mu = w.mu().to_vec();
        let others = (0..k)
            .map(|i| {
                (0..k)
                    .map(|j| {
                        let rate = w.w(i, j) * mu[j] / d[j];
                        (rate > 0.0).then(|| Poisson::new(rate).expect("positive finite rate"))
                    })
                    .collect()
            })
            .collect();
        let ancestral = (0..k).map(|i| (0..k).map(|j| w.w(i, j) * mu[j] / d[i]).collect()).collect();
        Ok(Kappa { mu, others, ancestral })
    }

    /// First `r` generations with particle labels, in breadth-first order
    /// (the ancestral child of a particle precedes its other children).
    pub fn sample_particles(&self, r: usize, rng: &mut StreamRng) -> (RootedTree, Vec<KappaParticle>) {
        let root = KappaParticle { kind: ParticleKind::Ancestral, block: categorical(rng, &self.mu) };
        let mut particles = vec![root];
        let mut parent = vec![None];
        let mut depth = vec![0usize];
        let mut head = 0;
        while head < particles.len() {
            if depth[head] < r {
                let KappaParticle { kind, block } = particles[head];
                if kind == ParticleKind::Ancestral {
                    particles.push(KappaParticle { kind, block: categorical(rng, &self.ancestral[block]) });
                    parent.push(Some(head));
                    depth.push(depth[head] + 1);
                }
                for (j, law) in self.others[block].iter().enumerate() {
                    if let Some(law) = law {
                        let count = law.sample(rng) as usize;
                        for _ in 0..count {
                            particles.push(KappaParticle { kind: ParticleKind::Other, block: j });
                            parent.push(Some(head));
                            depth.push(depth[head] + 1);
                        }
                    }
                }
            }
            head += 1;
        }
        (RootedTree::new(parent).expect("breadth-first parent array"), particles)
    }

    pub fn sample(&self, r: usize, rng: &mut StreamRng) -> RootedTree {
        self.sample_particles(r, rng).0
    }
}

/// First `r` generations of `κ_W` as a rooted tree (blocks discarded).
pub fn sample_kappa(w: &StepGraphon, r: usize, seed: u64) -> Result<RootedTree> {
    Ok(Kappa::new(w)?.sample(r, &mut rng::stream(seed, 0)))
}

/// Counts of canonical root-ball codes over `samples` replicates; replicate `i` uses stream `i`.
pub fn root_ball_census(w: &StepGraphon, r: usize, samples: usize, seed: u64) -> Result<BTreeMap<String, u64>> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let kappa = Kappa::new(w)?;
    let census = (0..samples as u64)
        .into_par_iter()
        .fold(BTreeMap::new, |mut acc: BTreeMap<String, u64>, i| {
            let t = kappa.sample(r, &mut rng::stream(seed, i));
            *acc.entry(t.canonical_code()).or_insert(0) += 1;
            acc
        })
        .reduce(BTreeMap::new, |mut a, b| {
            for (k, v) in b {
                *a.entry(k).or_insert(0) += v;
            }
            a
        });
    Ok(census)
}

/// Empirical law of the root ball: code → (probability, standard error).
pub fn root_ball_distribution_mc(w: &StepGraphon, r: usize, samples: usize, seed: u64) -> Result<BTreeMap<String, (f64, f64)>> {
    if r == 0 {
        return Err(Error::ParameterOutOfRange { name: "r", value: 0.0 });
    }
    let census = root_ball_census(w, r, samples, seed)?;
    let n = samples as f64;
    Ok(census
        .into_iter()
        .map(|(code, c)| {
            let p = c as f64 / n;
            (code, (p, (p * (1.0 - p) / n).sqrt()))
        })
        .collect())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RootDegreeLaw {
    /// `probabilities[k − 1] = P(root degree = k)` for `k = 1..=k_max`.
    pub probabilities: Vec<f64>,
    /// `P(root degree > k_max)`.
    pub tail: f64,
}

/// Root degree `1 + Poisson(b_i)` mixed over the root block `i ~ μ`.
pub fn root_degree_distribution(w: &StepGraphon, k_max: usize) -> Result<RootDegreeLaw> {
    w.require_nondegenerate()?;
    let b = w.b_values();
    let laws: Vec<PoissonLaw> = b
        .iter()
        .map(|&x| PoissonLaw::new(x).map_err(|e| Error::Numerical(format!("Poisson({x}): {e}"))))
        .collect::<Result<_>>()?;
    let probabilities = (1..=k_max)
        .map(|k| w.mu().iter().zip(&laws).map(|(m, law)| m * law.pmf(k as u64 - 1)).sum())
        .collect();
    let tail = if k_max == 0 {
        1.0
    } else {
        w.mu().iter().zip(&laws).map(|(m, law)| m * law.sf(k_max as u64 - 1)).sum()
    };
    Ok(RootDegreeLaw { probabilities, tail })
}

/// Mean number of other-children of a block-`block` particle, by simulation.
pub fn mean_other_offspring_mc(w: &StepGraphon, block: usize, samples: usize, seed: u64) -> Result<(f64, f64)> {
    if samples == 0 {
        return Err(Error::ZeroSamples);
    }
    let kappa = Kappa::new(w)?;
    if block >= w.k() {
        return Err(Error::PartIndexOutOfRange(block));
    }
    let counts: Vec<f64> = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let mut rng = rng::stream(seed, i);
            kappa.others[block].iter().flatten().map(|law| law.sample(&mut rng)).sum::<f64>()
        })
        .collect();
    let n = samples as f64;
    let mean = counts.iter().sum::<f64>() / n;
    let var = counts.iter().map(|c| (c - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    Ok((mean, (var / n).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn depth_zero_is_single_vertex() {
        let t = sample_kappa(&StepGraphon::constant(1.0), 0, 1).unwrap();
        assert_eq!(t.len(), 1);
        let deg = StepGraphon::new(vec![0.5, 0.5], vec![vec![0.0, 0.0], vec![0.0, 1.0]]).unwrap();
        assert!(matches!(sample_kappa(&deg, 2, 1), Err(Error::DegenerateGraphon)));
    }

    #[test]
    fn ancestral_line_survives() {
        let w = StepGraphon::new(vec![0.25, 0.75], vec![vec![0.9, 0.2], vec![0.2, 0.6]]).unwrap();
        let kappa = Kappa::new(&w).unwrap();
        for i in 0..500 {
            for r in 0..4 {
                let (t, parts) = kappa.sample_particles(r, &mut rng::stream(9, i));
                assert_eq!(t.height(), r);
                assert_eq!(parts[0].kind, ParticleKind::Ancestral);
                let anc_children = |v: usize| {
                    t.children(v).iter().filter(|&&c| parts[c].kind == ParticleKind::Ancestral).count()
                };
                for v in 0..t.len() {
                    match parts[v].kind {
                        ParticleKind::Ancestral if t.depth(v) < r => assert_eq!(anc_children(v), 1),
                        ParticleKind::Other => assert_eq!(anc_children(v), 0),
                        _ => {}
                    }
                }
            }
        }
    }

    #[test]
    fn block_diagonal_lineages_keep_their_block() {
        let w = StepGraphon::new(vec![0.5, 0.5], vec![vec![1.0, 0.0], vec![0.0, 0.5]]).unwrap();
        let kappa = Kappa::new(&w).unwrap();
        for i in 0..200 {
            let (_, parts) = kappa.sample_particles(3, &mut rng::stream(4, i));
            assert!(parts.iter().all(|p| p.block == parts[0].block));
        }
    }

    #[test]
    fn root_mean_offspring_is_two_for_constant_kernel() {
        let kappa = Kappa::new(&StepGraphon::constant(1.0)).unwrap();
        let n = 200_000u64;
        let degs: Vec<f64> = (0..n).map(|i| kappa.sample(1, &mut rng::stream(5, i)).children(0).len() as f64).collect();
        let mean = degs.iter().sum::<f64>() / n as f64;
        // Var(1 + Poisson(1)) = 1
        let se = (1.0 / n as f64).sqrt();
        assert!((mean - 2.0).abs() <= 4.0 * se, "{mean}");
    }

    #[test]
    fn empirical_law_sums_to_one_and_is_reproducible() {
        let w = StepGraphon::new(vec![0.5, 0.5], vec![vec![1.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let law = root_ball_distribution_mc(&w, 1, 5000, 3).unwrap();
        let total: f64 = law.values().map(|(p, _)| p).sum();
        assert!((total - 1.0).abs() < 1e-12);
        assert_eq!(law, root_ball_distribution_mc(&w, 1, 5000, 3).unwrap());
        assert!(matches!(root_ball_distribution_mc(&w, 1, 0, 3), Err(Error::ZeroSamples)));
        let edge = &law[&RootedTree::path(2).canonical_code()];
        assert!(edge.0 > 0.0 && edge.1 > 0.0);
    }

    #[test]
    fn root_degree_law_examples() {
        let law = root_degree_distribution(&StepGraphon::constant(1.0), 6).unwrap();
        let mut fact = 1.0;
        for k in 1..=6 {
            assert!((law.probabilities[k - 1] - (-1.0f64).exp() / fact).abs() < 1e-14);
            fact *= k as f64;
        }
        let w = StepGraphon::new(vec![0.25, 0.75], vec![vec![0.9, 0.2], vec![0.2, 0.6]]).unwrap();
        for k_max in [1, 3, 10, 30] {
            let law = root_degree_distribution(&w, k_max).unwrap();
            let total = law.probabilities.iter().sum::<f64>() + law.tail;
            assert!((total - 1.0).abs() < 1e-12, "{total}");
        }
    }

    #[test]
    fn root_degree_law_matches_simulation() {
        let w = StepGraphon::new(vec![0.25, 0.75], vec![vec![0.9, 0.2], vec![0.2, 0.6]]).unwrap();
        let law = root_degree_distribution(&w, 8).unwrap();
        let kappa = Kappa::new(&w).unwrap();
        let n = 100_000u64;
        let mut hist = [0u64; 9];
        for i in 0..n {
            let d = kappa.sample(1, &mut rng::stream(12, i)).children(0).len();
            hist[d.min(8)] += 1;
        }
        for k in 1..8 {
            let p = law.probabilities[k - 1];
            let se = (p * (1.0 - p) / n as f64).sqrt().max(1e-4);
            let emp = hist[k] as f64 / n as f64;
            assert!((emp - p).abs() <= 4.0 * se, "k={k}: {emp} vs {p}");
        }
    }

    #[test]
    fn other_offspring_mean_is_b() {
        let w = StepGraphon::new(vec![0.25, 0.75], vec![vec![0.9, 0.2], vec![0.2, 0.6]]).unwrap();
        let b = w.b_values();
        for i in 0..2 {
            let (mean, se) = mean_other_offspring_mc(&w, i, 100_000, 8).unwrap();
            assert!((mean - b[i]).abs() <= 4.0 * se, "{mean} vs {}", b[i]);
        }
    }
}
