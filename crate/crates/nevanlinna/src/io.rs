//! JSON wire formats: Hamiltonians as {"lengths": [...], "angles": [...]},
//! Jacobi parameters as {"a": [...], "b": [...]}.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::HamburgerHamiltonian;
use crate::jacobi::JacobiParameters;

#[derive(Debug, Serialize, Deserialize)]
pub struct HamiltonianJson {
    pub lengths: Vec<f64>,
    pub angles: Vec<f64>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct JacobiJson {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
}

/// Either accepted input document, detected by its keys.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum SystemJson {
    Hamiltonian(HamiltonianJson),
    Jacobi(JacobiJson),
}

pub fn hamiltonian_to_json(h: &HamburgerHamiltonian) -> HamiltonianJson {
    HamiltonianJson {
        lengths: h.lengths().to_vec(),
        angles: h.angles().to_vec(),
    }
}

pub fn hamiltonian_from_json(doc: HamiltonianJson) -> Result<HamburgerHamiltonian> {
    HamburgerHamiltonian::new(doc.lengths, doc.angles)
}

pub fn jacobi_to_json(j: &JacobiParameters) -> JacobiJson {
    JacobiJson {
        a: j.a().to_vec(),
        b: j.b().to_vec(),
    }
}

pub fn jacobi_from_json(doc: JacobiJson) -> Result<JacobiParameters> {
    JacobiParameters::new(doc.a, doc.b)
}

pub fn parse_system(text: &str) -> Result<SystemJson> {
    serde_json::from_str(text)
        .map_err(|e| Error::InvalidInput(format!("malformed system JSON: {e}")))
}
