use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

/// Working precision of an intermediate computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Precision {
    Single,
    Double,
}

impl Precision {
    pub fn mantissa_digits(self) -> u32 {
        match self {
            Precision::Single => f32::MANTISSA_DIGITS,
            Precision::Double => f64::MANTISSA_DIGITS,
        }
    }

    pub fn wider(self, other: Self) -> Self {
        if self == Precision::Double || other == Precision::Double {
            Precision::Double
        } else {
            Precision::Single
        }
    }

    fn letter(self) -> char {
        match self {
            Precision::Single => 'S',
            Precision::Double => 'D',
        }
    }
}

/// Which intermediates of compression run in single or double precision.
///
/// `theta` covers the arctangent, `phi` covers the norm, the `z / r`
/// quotient and the arccosine, `quantisation` covers scaling an angle to
/// its bucket index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PrecisionPolicy {
    pub theta: Precision,
    pub phi: Precision,
    pub quantisation: Precision,
}

impl PrecisionPolicy {
    pub const fn new(theta: Precision, phi: Precision, quantisation: Precision) -> Self {
        Self {
            theta,
            phi,
            quantisation,
        }
    }

    /// Everything in double precision; the reference pipeline.
    pub const fn oracle() -> Self {
        Self::new(Precision::Double, Precision::Double, Precision::Double)
    }

    pub const fn all_single() -> Self {
        Self::new(Precision::Single, Precision::Single, Precision::Single)
    }

    /// Precision in which the stored magnitude is computed.
    pub fn magnitude(&self) -> Precision {
        self.theta.wider(self.phi)
    }

    /// Narrowest significand among the angle intermediates.
    pub fn narrowest_mantissa_digits(&self) -> u32 {
        self.theta
            .mantissa_digits()
            .min(self.phi.mantissa_digits())
            .min(self.quantisation.mantissa_digits())
    }
}

impl Default for PrecisionPolicy {
    /// Single-precision θ, double-precision φ, single-precision quantisation.
    fn default() -> Self {
        Self::new(Precision::Single, Precision::Double, Precision::Single)
    }
}

impl fmt::Display for PrecisionPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "theta={},phi={},quant={}",
            self.theta.letter(),
            self.phi.letter(),
            self.quantisation.letter()
        )
    }
}

/// Parses `theta=S|D,phi=S|D,quant=S|D`; omitted keys keep their default.
impl FromStr for PrecisionPolicy {
    type Err = String;

    fn from_str(src: &str) -> Result<Self, String> {
        let mut policy = Self::default();
        for item in src.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (key, value) = item
                .split_once('=')
                .ok_or_else(|| format!("expected key=value, got `{item}`"))?;
            let precision = match value.trim() {
                "S" | "s" | "single" => Precision::Single,
                "D" | "d" | "double" => Precision::Double,
                other => return Err(format!("precision must be S or D, got `{other}`")),
            };
            match key.trim() {
                "theta" => policy.theta = precision,
                "phi" => policy.phi = precision,
                "quant" | "quantisation" => policy.quantisation = precision,
                other => return Err(format!("unknown policy key `{other}`")),
            }
        }
        Ok(policy)
    }
}
