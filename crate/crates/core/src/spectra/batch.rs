use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bordered::{growth_threshold, localize, BorderedHermitian};
use crate::error::{Error, Result};
use crate::sampling::SampleRng;

/// One entry of a batch lemma file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LemmaInstance {
    pub n: usize,
    pub d: Vec<f64>,
    pub a_re: Vec<f64>,
    pub a_im: Vec<f64>,
    pub epsilon: f64,
    pub corner_multipliers: Vec<f64>,
}

impl LemmaInstance {
    pub fn bordered(&self) -> Result<BorderedHermitian> {
        if self.n < 2 || self.d.len() != self.n - 1 || self.a_re.len() != self.n - 1 || self.a_im.len() != self.n - 1 {
            return Err(Error::Config(format!("instance shape does not match n = {}", self.n)));
        }
        let a = self.a_re.iter().zip(&self.a_im).map(|(&re, &im)| Complex64::new(re, im)).collect();
        BorderedHermitian::new(self.d.clone(), a, 0.0)
    }
}

pub fn read_instances(json: &str) -> Result<Vec<LemmaInstance>> {
    serde_json::from_str(json).map_err(|e| Error::Config(format!("lemma instances: {e}")))
}

/// `d ∈ [−1, 1]`, `a` uniform in the unit disk.
pub fn random_instance(rng: &mut SampleRng, n: usize, epsilon: f64, corner_multipliers: &[f64]) -> LemmaInstance {
    let d = (0..n - 1).map(|_| rng.gen_range(-1.0..=1.0)).collect();
    let mut a_re = Vec::with_capacity(n - 1);
    let mut a_im = Vec::with_capacity(n - 1);
    for _ in 0..n - 1 {
        let r = rng.gen::<f64>().sqrt();
        let th = rng.gen_range(0.0..std::f64::consts::TAU);
        a_re.push(r * th.cos());
        a_im.push(r * th.sin());
    }
    LemmaInstance { n, d, a_re, a_im, epsilon, corner_multipliers: corner_multipliers.to_vec() }
}

#[derive(Debug, Clone, Serialize)]
pub struct BatteryRow {
    pub instance: usize,
    pub n: usize,
    pub epsilon: f64,
    pub multiplier: f64,
    pub threshold: f64,
    pub corner: f64,
    pub satisfied: bool,
    pub worst_ratio: f64,
    pub top_excess: f64,
    pub boundary_hits: usize,
}

/// Localization verdict for every instance × corner multiplier.
pub fn run_battery(instances: &[LemmaInstance]) -> Result<Vec<BatteryRow>> {
    let rows: Result<Vec<Vec<BatteryRow>>> = instances
        .par_iter()
        .enumerate()
        .map(|(idx, inst)| {
            let b = inst.bordered()?;
            let threshold = growth_threshold(&b, inst.epsilon)?;
            inst.corner_multipliers
                .iter()
                .map(|&m| {
                    let corner = threshold * m;
                    let v = localize(&b.with_corner(corner), inst.epsilon)?;
                    Ok(BatteryRow {
                        instance: idx,
                        n: inst.n,
                        epsilon: inst.epsilon,
                        multiplier: m,
                        threshold,
                        corner,
                        satisfied: v.satisfied,
                        worst_ratio: v.worst_ratio,
                        top_excess: v.witness[inst.n - 1] - corner,
                        boundary_hits: v.boundary_hits,
                    })
                })
                .collect()
        })
        .collect();
    Ok(rows?.into_iter().flatten().collect())
}
