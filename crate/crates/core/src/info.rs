//! Unified query interface for conditional entropy and conditional
//! mutual information, backed either by an exact joint distribution or
//! by a dataset plus estimator.
//!
//! The learner and boundary-search algorithms are written against this
//! interface, so they run identically at the population level and on
//! samples. Subset entropies are memoized behind a mutex keyed by node
//! bitmask; values are computed deterministically, so caching never
//! changes results across thread counts.

use std::collections::HashMap;
use std::sync::Mutex;

use crate::data::Dataset;
use crate::estimators::{empirical_entropy, EstimatorKind};
use crate::oracle::JointDist;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum InfoError {
    #[error("sources with more than 64 variables are not supported (got {0})")]
    TooManyVariables(usize),
}

enum Backing {
    Exact(JointDist),
    Empirical { data: Dataset, kind: EstimatorKind },
}

/// Entropy/CMI oracle over `d <= 64` variables.
pub struct InfoSource {
    backing: Backing,
    cache: Mutex<HashMap<u64, f64>>,
}

impl InfoSource {
    /// Exact population source.
    pub fn exact(joint: JointDist) -> Result<Self, InfoError> {
        if joint.num_vars() > 64 {
            return Err(InfoError::TooManyVariables(joint.num_vars()));
        }
        Ok(InfoSource {
            backing: Backing::Exact(joint),
            cache: Mutex::new(HashMap::new()),
        })
    }

    /// Empirical source estimating from `data` with the given estimator.
    pub fn empirical(data: Dataset, kind: EstimatorKind) -> Result<Self, InfoError> {
        if data.d() > 64 {
            return Err(InfoError::TooManyVariables(data.d()));
        }
        Ok(InfoSource {
            backing: Backing::Empirical { data, kind },
        cache: Mutex::new(HashMap::new()),
        })
    }

    pub fn num_vars(&self) -> usize {
        match &self.backing {
            Backing::Exact(j) => j.num_vars(),
            Backing::Empirical { data, .. } => data.d(),
        }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.backing, Backing::Exact(_))
    }

    /// Row count of the backing dataset; `None` for exact sources.
    pub fn sample_size(&self) -> Option<usize> {
        match &self.backing {
            Backing::Exact(_) => None,
            Backing::Empirical { data, .. } => Some(data.n()),
        }
    }

    pub fn estimator(&self) -> Option<EstimatorKind> {
        match &self.backing {
            Backing::Exact(_) => None,
            Backing::Empirical { kind, .. } => Some(*kind),
        }
    }

    fn mask_of(&self, s: &[usize]) -> u64 {
        let d = self.num_vars();
        let mut mask = 0u64;
        for &k in s {
            assert!(k < d, "node {k} out of range for {d} variables");
            mask |= 1 << k;
        }
        mask
    }

    fn entropy_mask(&self, mask: u64) -> f64 {
        if mask == 0 {
            return 0.0;
        }
        if let Some(&h) = self.cache.lock().unwrap().get(&mask) {
            return h;
        }
        let nodes: Vec<usize> = (0..self.num_vars()).filter(|&k| mask & (1 << k) != 0).collect();
        let h = match &self.backing {
            Backing::Exact(j) => j.entropy(&nodes),
            Backing::Empirical { data, kind } => empirical_entropy(data, &nodes, *kind),
        };
        self.cache.lock().unwrap().insert(mask, h);
        h
    }

    /// Entropy of the set `s` in nats (duplicates ignored).
    pub fn entropy(&self, s: &[usize]) -> f64 {
        self.entropy_mask(self.mask_of(s))
    }

    /// `H(k | a)`, clamped to be non-negative.
    pub fn cond_entropy(&self, k: usize, a: &[usize]) -> f64 {
        let ma = self.mask_of(a);
        let mk = self.mask_of(&[k]);
        (self.entropy_mask(mk | ma) - self.entropy_mask(ma)).max(0.0)
    }

    /// `I(k; l | a)`, clamped to be non-negative. `l` may be a set
    /// (used by the aggregated masking test).
    pub fn cmi(&self, k: usize, l: &[usize], a: &[usize]) -> f64 {
        let ma = self.mask_of(a);
        let mk = self.mask_of(&[k]);
        let ml = self.mask_of(l);
        (self.entropy_mask(mk | ma) + self.entropy_mask(ml | ma)
            - self.entropy_mask(mk | ml | ma)
            - self.entropy_mask(ma))
        .max(0.0)
    }

    /// Set-valued variant of [`InfoSource::cmi`]: `I(k; l | a)` with
    /// every argument a set.
    pub fn cmi_set(&self, k: &[usize], l: &[usize], a: &[usize]) -> f64 {
        let ma = self.mask_of(a);
        let mk = self.mask_of(k);
        let ml = self.mask_of(l);
        (self.entropy_mask(mk | ma) + self.entropy_mask(ml | ma)
            - self.entropy_mask(mk | ml | ma)
            - self.entropy_mask(ma))
        .max(0.0)
    }
}
