//! Separation certificates: the archival JSON schema. Field order is fixed
//! for reproducible hashing; integers are decimal; tables are row-major.

use serde::{Deserialize, Serialize};

use crate::arith::PiSet;
use crate::error::ArithError;

pub const CERT_VERSION: u32 = 1;
pub const CLAIM: &str = "separated";

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertificateFile {
    pub version: u32,
    pub spec: String,
    pub pi: PiValue,
    pub group: CertGroup,
    pub images: CertImages,
    pub g: String,
    pub c: String,
    pub claim: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
#[serde(untagged)]
pub enum PiValue {
    Prime(u64),
    All(String),
}

impl PiValue {
    pub fn to_pi_set(&self) -> Result<PiSet, String> {
        match self {
            PiValue::Prime(p) => PiSet::single(*p).map_err(|e: ArithError| e.to_string()),
            PiValue::All(s) if s == "all" => Ok(PiSet::all()),
            PiValue::All(s) => Err(format!("unknown pi value `{s}`")),
        }
    }

    pub fn from_pi_set(pi: &PiSet) -> PiValue {
        match pi {
            PiSet::AllPrimes => PiValue::All("all".to_string()),
            PiSet::SinglePrime(p) => PiValue::Prime(*p),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertGroup {
    pub order: usize,
    pub table: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CertImages {
    #[serde(rename = "A")]
    pub a: Vec<usize>,
    #[serde(rename = "B")]
    pub b: Vec<usize>,
}

impl CertificateFile {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("certificate serializes")
    }

    pub fn from_json(text: &str) -> Result<CertificateFile, String> {
        serde_json::from_str(text).map_err(|e| format!("malformed certificate: {e}"))
    }
}
