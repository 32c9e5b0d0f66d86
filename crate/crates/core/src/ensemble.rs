//! Random element generators for audits and experiments.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::{AlgebraElement, AlgebraInstance, AlgebraKind, Carrier, TrigPolynomial};
use crate::error::{Error, Result};
use crate::group::{GroupModel, WeightedSection};
use crate::rng::{complex_gaussian, random_banded, random_matrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ensemble {
    /// Dense i.i.d. complex Gaussian matrix.
    Gaussian,
    /// Gaussian entries damped by `(1 + |i-j|)^{-β}`.
    Banded,
    /// Section on a ball with coefficients damped by `2^{-l(x)}`.
    Convolution,
    /// Gaussian coefficients on a sphere of the Cayley graph.
    Sphere,
    /// Trigonometric polynomial of degree `size` with Gaussian coefficients.
    Trig,
}

/// `{ensemble, size, band_beta, support_radius, self_adjoint}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplerSpec {
    pub ensemble: Ensemble,
    #[serde(default)]
    pub size: usize,
    #[serde(default)]
    pub band_beta: Option<f64>,
    #[serde(default)]
    pub support_radius: Option<usize>,
    #[serde(default)]
    pub self_adjoint: bool,
}

pub const MAX_CONVOLUTION_RADIUS: usize = 8;

impl SamplerSpec {
    /// A sensible ensemble for the instance's carrier.
    pub fn default_for(inst: &AlgebraInstance, size: usize) -> Self {
        let ensemble = match (inst.carrier(), inst.kind()) {
            (Carrier::Matrix, AlgebraKind::GroSchur { .. } | AlgebraKind::Bgs { .. } | AlgebraKind::Beurling { .. }) => {
                Ensemble::Banded
            }
            (Carrier::Matrix, _) => Ensemble::Gaussian,
            (Carrier::Section, _) => Ensemble::Convolution,
            (Carrier::Trig, _) => Ensemble::Trig,
        };
        Self {
            ensemble,
            size,
            band_beta: None,
            support_radius: None,
            self_adjoint: false,
        }
    }

    pub fn self_adjoint(mut self, yes: bool) -> Self {
        self.self_adjoint = yes;
        self
    }

    fn beta(&self, inst: &AlgebraInstance) -> f64 {
        self.band_beta.unwrap_or(match inst.kind() {
            AlgebraKind::GroSchur { alpha, .. } | AlgebraKind::Bgs { alpha, .. } | AlgebraKind::Beurling { alpha, .. } => {
                alpha + 1.0
            }
            _ => 2.0,
        })
    }

    fn check(&self, inst: &AlgebraInstance) -> Result<()> {
        let ok = matches!(
            (self.ensemble, inst.carrier()),
            (Ensemble::Gaussian | Ensemble::Banded, Carrier::Matrix)
                | (Ensemble::Convolution | Ensemble::Sphere, Carrier::Section)
                | (Ensemble::Trig, Carrier::Trig)
        );
        if !ok {
            return Err(Error::Unsupported {
                op: "sampling",
                carrier: format!("{:?} ensemble for {}", self.ensemble, inst.name()),
            });
        }
        if inst.carrier() == Carrier::Matrix && self.size == 0 {
            return Err(Error::InvalidParameter("matrix ensembles need size ≥ 1".into()));
        }
        if self.ensemble == Ensemble::Convolution && self.radius() > MAX_CONVOLUTION_RADIUS {
            return Err(Error::InvalidParameter(format!(
                "convolution support radius {} exceeds {MAX_CONVOLUTION_RADIUS}",
                self.radius()
            )));
        }
        Ok(())
    }

    fn radius(&self) -> usize {
        self.support_radius.unwrap_or(4)
    }

    /// One draw; `self_adjoint` replaces `x` by `(x + x*)/2`.
    pub fn sample<R: Rng + ?Sized>(&self, inst: &AlgebraInstance, rng: &mut R) -> Result<AlgebraElement> {
        self.check(inst)?;
        let x = match self.ensemble {
            Ensemble::Gaussian => AlgebraElement::Matrix(random_matrix(rng, self.size)),
            Ensemble::Banded => AlgebraElement::Matrix(random_banded(rng, self.size, self.beta(inst))),
            Ensemble::Convolution | Ensemble::Sphere => {
                let g = inst.group().expect("section instances carry a group").clone();
                AlgebraElement::Section(self.sample_section(&g, rng)?)
            }
            Ensemble::Trig => {
                let d = self.size as i64;
                AlgebraElement::Trig(TrigPolynomial::new((-d..=d).map(|n| (n, complex_gaussian(rng))).collect::<Vec<_>>())?)
            }
        };
        Ok(if self.self_adjoint {
            x.add(&x.adjoint())?.scale_real(0.5)
        } else {
            x
        })
    }

    fn sample_section<R: Rng + ?Sized>(&self, g: &std::sync::Arc<GroupModel>, rng: &mut R) -> Result<WeightedSection> {
        let r = self.radius();
        let layers = g.bfs_layers(r, crate::group::DEFAULT_BALL_CAP)?;
        let terms: Vec<_> = match self.ensemble {
            Ensemble::Sphere => layers
                .into_iter()
                .filter(|(_, l)| *l == r)
                .map(|(x, _)| (x, complex_gaussian(rng)))
                .collect(),
            _ => layers
                .into_iter()
                .map(|(x, l)| (x, complex_gaussian(rng) * 0.5f64.powi(l as i32)))
                .collect(),
        };
        WeightedSection::from_terms(g.clone(), terms)
    }
}

/// Draws until a nonzero element appears (Gaussian draws are nonzero almost surely).
pub fn sample_nonzero<R: Rng + ?Sized>(spec: &SamplerSpec, inst: &AlgebraInstance, rng: &mut R) -> Result<AlgebraElement> {
    for _ in 0..16 {
        let x = spec.sample(inst, rng)?;
        if !x.is_zero() {
            return Ok(x);
        }
    }
    Err(Error::InvalidParameter("sampler keeps producing zero elements".into()))
}


#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::sample_rng;

    #[test]
    fn samples_match_carriers() {
        for (name, size) in [("jaffard:2", 6), ("schatten:1", 4), ("l1w:z:poly-2", 0), ("l1w:f2:1", 0), ("c1-torus", 5)] {
            let inst = AlgebraInstance::from_name(name).unwrap();
            let spec = SamplerSpec::default_for(&inst, size).self_adjoint(true);
            let x = spec.sample(&inst, &mut sample_rng(1, 0)).unwrap();
            assert_eq!(x.carrier(), inst.carrier());
            assert!(x.self_adjoint_defect() <= 1e-15 * (1.0 + x.max_abs()));
            assert!(inst.a_norm(&x).unwrap() > 0.0);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let inst = AlgebraInstance::from_name("l1w:z2:poly-1").unwrap();
        let spec = SamplerSpec::default_for(&inst, 0);
        let a = spec.sample(&inst, &mut sample_rng(9, 3)).unwrap();
        let b = spec.sample(&inst, &mut sample_rng(9, 3)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sphere_support() {
        let inst = AlgebraInstance::from_name("l2w:f2:1").unwrap();
        let spec = SamplerSpec {
            ensemble: Ensemble::Sphere,
            size: 0,
            band_beta: None,
            support_radius: Some(3),
            self_adjoint: false,
        };
        let x = spec.sample(&inst, &mut sample_rng(2, 0)).unwrap();
        let f = x.as_section().unwrap();
        assert_eq!(f.support_len(), 4 * 9);
        assert!(f.terms().keys().all(|w| w.0.len() == 3));
    }

    #[test]
    fn rejects_mismatched_or_oversized() {
        let inst = AlgebraInstance::from_name("l1w:z:1").unwrap();
        let mut spec = SamplerSpec::default_for(&inst, 0);
        spec.support_radius = Some(9);
        assert!(spec.sample(&inst, &mut sample_rng(0, 0)).is_err());
        spec.ensemble = Ensemble::Gaussian;
        assert!(spec.sample(&inst, &mut sample_rng(0, 0)).is_err());
    }
}
