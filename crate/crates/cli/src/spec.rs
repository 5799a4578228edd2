//! On-disk CP-map spec format.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use rotcp::weyl::WeylElement;
use rotcp::{AlgebraContext, CoreError, CpMap};

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaField {
    Irrational(f64),
    Rational { rational: (i64, i64) },
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TermJson {
    pub pow: (i64, i64),
    pub re: f64,
    pub im: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct KrausJson {
    pub terms: Vec<TermJson>,
}

#[derive(Debug, Clone, Default, Serialize, Deserialize)]
pub struct FlagsJson {
    #[serde(default)]
    pub unital_expected: bool,
}

/// CP-map spec file: rotation parameter, Kraus operators as sparse
/// coefficient lists, and expectation flags.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CpMapSpecFile {
    pub theta: ThetaField,
    pub kraus: Vec<KrausJson>,
    #[serde(default)]
    pub flags: FlagsJson,
}

impl CpMapSpecFile {
    pub fn to_map(&self) -> Result<CpMap, CoreError> {
        let ctx = match self.theta {
            ThetaField::Irrational(t) => AlgebraContext::new(t)?,
            ThetaField::Rational { rational: (p, q) } => AlgebraContext::rational(p, q)?,
        };
        if self.kraus.is_empty() {
            return Err(CoreError::InvalidSpec {
                reason: "kraus list must be nonempty".into(),
            });
        }
        let mut ops = Vec::with_capacity(self.kraus.len());
        for (i, k) in self.kraus.iter().enumerate() {
            if k.terms.is_empty() {
                return Err(CoreError::InvalidSpec {
                    reason: format!("kraus[{i}] has an empty term list"),
                });
            }
            ops.push(WeylElement::from_terms(
                k.terms
                    .iter()
                    .map(|t| (t.pow, Complex64::new(t.re, t.im))),
            ));
        }
        let map = CpMap::new(ops, ctx)?;
        if self.flags.unital_expected && !map.is_unital(1e-10) {
            return Err(CoreError::InvalidSpec {
                reason: format!(
                    "map flagged unital but ||T(1) - 1|| = {:.3e}",
                    map.unitality_residual()
                ),
            });
        }
        Ok(map)
    }
}
