//! Full physics model: Kahler sector, superpotential, gauge couplings, charges.

use crate::error::{Error, Result};
use crate::kahler::KahlerModel;
use crate::potentials::{Charges, GaugeCouplings, Superpotential};

/// Everything needed to evaluate the potentials that drive a flow. The
/// charges stored here are the model's defaults; operations that scan or
/// override charges accept them explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub kahler: KahlerModel,
    pub superpotential: Superpotential,
    pub couplings: GaugeCouplings,
    pub charges: Charges,
}

impl ModelSpec {
    pub fn n_fields(&self) -> usize {
        self.kahler.n_fields
    }

    pub fn n_vectors(&self) -> usize {
        self.couplings.n_vectors()
    }

    /// Arity consistency across the four sectors.
    pub fn validate(&self) -> Result<()> {
        let n_c = self.kahler.n_fields;
        let n_v = self.couplings.n_vectors();
        if self.superpotential.nvars() != n_c {
            return Err(Error::ValidationError {
                section: "model".into(),
                key: "w".into(),
                msg: format!(
                    "superpotential has {} variables, model has {} fields",
                    self.superpotential.nvars(),
                    n_c
                ),
            });
        }
        if self.couplings.nvars() != n_c {
            return Err(Error::ValidationError {
                section: "model".into(),
                key: "f".into(),
                msg: format!(
                    "gauge couplings depend on {} variables, model has {} fields",
                    self.couplings.nvars(),
                    n_c
                ),
            });
        }
        if self.charges.electric.len() != n_v || self.charges.magnetic.len() != n_v {
            return Err(Error::ValidationError {
                section: "model".into(),
                key: "charges".into(),
                msg: format!(
                    "charge vectors have lengths ({}, {}), expected {}",
                    self.charges.magnetic.len(),
                    self.charges.electric.len(),
                    n_v
                ),
            });
        }
        Ok(())
    }

    /// True when all coefficient data is real, in which case flows commute
    /// with componentwise complex conjugation.
    pub fn has_real_coefficients(&self) -> bool {
        self.superpotential.has_real_coeffs() && self.couplings.has_real_coeffs()
    }
}
