use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use super::IpError;

/// Extra cost charged when every member of `members` is intervened on in the
/// same experiment.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Interaction {
    pub members: Vec<usize>,
    pub delta: f64,
}

/// Per-vertex intervention and observation costs plus joint-intervention
/// surcharges.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct CostModel {
    intervene: Vec<f64>,
    observe: Vec<f64>,
    #[cfg_attr(feature = "serde", serde(default))]
    interactions: Vec<Interaction>,
}

impl CostModel {
    /// All costs zero.
    pub fn zero(n: usize) -> Self {
        Self::uniform(n, 0.0, 0.0)
    }

    pub fn uniform(n: usize, intervene: f64, observe: f64) -> Self {
        CostModel {
            intervene: vec![intervene; n],
            observe: vec![observe; n],
            interactions: Vec::new(),
        }
    }

    pub fn new(intervene: Vec<f64>, observe: Vec<f64>) -> Result<Self, IpError> {
        let model = CostModel {
            intervene,
            observe,
            interactions: Vec::new(),
        };
        model.validate()?;
        Ok(model)
    }

    /// Adds a surcharge for intervening on all of `members` at once.
    pub fn with_interaction(mut self, members: impl IntoIterator<Item = usize>, delta: f64) -> Result<Self, IpError> {
        let set: BTreeSet<usize> = members.into_iter().collect();
        self.interactions.push(Interaction {
            members: set.into_iter().collect(),
            delta,
        });
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<(), IpError> {
        let n = self.intervene.len();
        if self.observe.len() != n {
            return Err(IpError::Config(format!(
                "{} intervention costs but {} observation costs",
                n,
                self.observe.len()
            )));
        }
        if let Some(c) = self
            .intervene
            .iter()
            .chain(&self.observe)
            .find(|c| !c.is_finite() || **c < 0.0)
        {
            return Err(IpError::Config(format!(
                "per-vertex costs must be finite and non-negative, got {c}"
            )));
        }
        let mut seen = BTreeSet::new();
        for it in &self.interactions {
            let mut sorted = it.members.clone();
            sorted.sort_unstable();
            sorted.dedup();
            if sorted.len() < 2 {
                return Err(IpError::Config(format!(
                    "interaction {:?} needs at least two vertices",
                    it.members
                )));
            }
            if let Some(&v) = sorted.iter().find(|&&v| v >= n) {
                return Err(IpError::Config(format!("interaction vertex {v} out of range")));
            }
            if !it.delta.is_finite() {
                return Err(IpError::Config(format!("interaction cost {} is not finite", it.delta)));
            }
            if !seen.insert(sorted) {
                return Err(IpError::Config(format!("interaction {:?} listed twice", it.members)));
            }
        }
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.intervene.len()
    }

    pub fn intervene(&self, v: usize) -> f64 {
        self.intervene[v]
    }

    pub fn observe(&self, v: usize) -> f64 {
        self.observe[v]
    }

    pub fn interactions(&self) -> &[Interaction] {
        &self.interactions
    }
}

/// Cost of one experiment: intervention cost of every chosen vertex,
/// observation cost of every other viable vertex, and the surcharge of every
/// interaction fully contained in the chosen set.
pub fn cost_of(chosen: &BTreeSet<usize>, costs: &CostModel, viable: &[usize]) -> f64 {
    let per_vertex: f64 = viable
        .iter()
        .map(|&v| {
            if chosen.contains(&v) {
                costs.intervene(v)
            } else {
                costs.observe(v)
            }
        })
        .sum();
    let joint: f64 = costs
        .interactions()
        .iter()
        .filter(|it| it.members.iter().all(|m| chosen.contains(m)))
        .map(|it| it.delta)
        .sum();
    per_vertex + joint
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(v: &[usize]) -> BTreeSet<usize> {
        v.iter().copied().collect()
    }

    #[test]
    fn additive_cost() {
        let costs = CostModel::uniform(2, 1.0, 0.0);
        assert_eq!(cost_of(&set(&[0, 1]), &costs, &[0, 1]), 2.0);
    }

    #[test]
    fn superadditive_pair() {
        let costs = CostModel::uniform(2, 1.0, 0.0).with_interaction([0, 1], 8.0).unwrap();
        assert_eq!(cost_of(&set(&[0, 1]), &costs, &[0, 1]), 10.0);
        assert_eq!(cost_of(&set(&[0]), &costs, &[0, 1]), 1.0);
    }

    #[test]
    fn observation_only() {
        let costs = CostModel::uniform(4, 1.0, 0.5);
        assert_eq!(cost_of(&set(&[]), &costs, &[0, 1, 2, 3]), 2.0);
    }

    #[test]
    fn invalid_models() {
        assert!(CostModel::new(vec![1.0], vec![]).is_err());
        assert!(CostModel::new(vec![-1.0], vec![0.0]).is_err());
        assert!(CostModel::zero(3).with_interaction([1], 2.0).is_err());
        assert!(CostModel::zero(3).with_interaction([1, 5], 2.0).is_err());
        let twice = CostModel::zero(3).with_interaction([0, 1], 1.0).unwrap();
        assert!(twice.with_interaction([1, 0], 2.0).is_err());
    }
}
