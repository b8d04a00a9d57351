//! Torsion modules over k[[x, y]]/(xy) and their images under the Fourier–Mukai lookup on E₁.

use std::fmt;

use serde_json::{json, Value};

use crate::descriptors::{BandDescriptor, Descriptor, StringDescriptor};
use crate::error::{Error, Result};
use crate::field::Scalar;

/// M(n, m, λ) = R/(xⁿ + λyᵐ) and N(n, m) = R/(xⁿ⁺¹, yᵐ⁺¹).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TorsionModuleDescriptor {
    M { n: usize, m: usize, lambda: Scalar },
    N { n: usize, m: usize },
}

impl TorsionModuleDescriptor {
    pub fn m(n: usize, m: usize, lambda: Scalar) -> Result<TorsionModuleDescriptor> {
        let t = TorsionModuleDescriptor::M { n, m, lambda };
        t.validate()?;
        Ok(t)
    }

    pub fn n(n: usize, m: usize) -> TorsionModuleDescriptor {
        TorsionModuleDescriptor::N { n, m }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            TorsionModuleDescriptor::M { n, m, lambda } => {
                if *n == 0 || *m == 0 {
                    return Err(Error::invalid("M(n, m, λ) needs n, m ≥ 1"));
                }
                if lambda.is_zero() {
                    return Err(Error::invalid("M(n, m, λ) needs λ ≠ 0"));
                }
                Ok(())
            }
            TorsionModuleDescriptor::N { .. } => Ok(()),
        }
    }

    /// dim_k of the module.
    pub fn length(&self) -> usize {
        match self {
            TorsionModuleDescriptor::M { n, m, .. } => n + m,
            TorsionModuleDescriptor::N { n, m } => n + m + 1,
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            TorsionModuleDescriptor::M { n, m, lambda } => json!({ "kind": "M", "n": n, "m": m, "lambda": lambda.to_json() }),
            TorsionModuleDescriptor::N { n, m } => json!({ "kind": "N", "n": n, "m": m }),
        }
    }

    pub fn from_json(field: crate::Field, v: &Value) -> Result<TorsionModuleDescriptor> {
        let get = |key: &str| -> Result<usize> {
            v.get(key)
                .and_then(Value::as_u64)
                .map(|x| x as usize)
                .ok_or_else(|| Error::invalid(format!("module needs a non-negative integer `{key}`")))
        };
        match v.get("kind").and_then(Value::as_str) {
            Some("M") => {
                let lambda = field.parse_json_scalar(v.get("lambda").ok_or_else(|| Error::invalid("M needs `lambda`"))?)?;
                TorsionModuleDescriptor::m(get("n")?, get("m")?, lambda)
            }
            Some("N") => Ok(TorsionModuleDescriptor::n(get("n")?, get("m")?)),
            _ => Err(Error::invalid("module needs \"kind\": \"M\" or \"N\"")),
        }
    }
}

impl fmt::Display for TorsionModuleDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TorsionModuleDescriptor::M { n, m, lambda } => write!(f, "M(({n},{m}),1,{lambda})"),
            TorsionModuleDescriptor::N { n, m } => write!(f, "N(0,({n},{m}),0)"),
        }
    }
}

/// M(n, m, λ) ↦ B((1, 0^{m−1}, −1, 0^{n−1}), 1, t − (−1)^{n+m}λ) and
/// N(n, m) ↦ S((0^m, −1, 0^n)), both on E₁.
pub fn fm_image(t: &TorsionModuleDescriptor) -> Result<Descriptor> {
    t.validate()?;
    match t {
        TorsionModuleDescriptor::M { n, m, lambda } => {
            let mut d = vec![0; n + m];
            d[0] = 1;
            d[*m] = -1;
            let mu = if (n + m) % 2 == 0 { lambda.clone() } else { -lambda };
            Ok(Descriptor::Band(BandDescriptor::linear(1, d, 1, &mu)?))
        }
        TorsionModuleDescriptor::N { n, m } => {
            let mut d = vec![0; n + m + 1];
            d[*m] = -1;
            Ok(Descriptor::String(StringDescriptor::new(1, d, 1)?))
        }
    }
}

pub fn module_length(t: &TorsionModuleDescriptor) -> usize {
    t.length()
}
