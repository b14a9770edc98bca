//! Tolerance-chain data model and the chain-definition document.
//!
//! A chain file is strict JSON:
//!
//! ```json
//! {
//!   "name": "actuator-clamping",
//!   "dimensions": [
//!     {"name": "a1", "nominal": 25.3, "upper_dev": 0.5, "lower_dev": 0.0, "coefficient": 1.0}
//!   ],
//!   "condition": {"name": "Ja", "min": 10.0, "max": 11.16}
//! }
//! ```
//!
//! `condition` is optional, as are its `min` and `max`. Unknown keys are
//! rejected. Deviations are signed offsets from the nominal, so `9 ± 0.1` is
//! `upper_dev = 0.1, lower_dev = -0.1` and `2 +0/-0.06` is `0.0 / -0.06`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;
use crate::worst_case::IntervalResult;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChainError {
    #[error("malformed chain document: {0}")]
    Syntax(String),
    #[error("chain `{chain}` has no dimensions; at least one is required")]
    EmptyChain { chain: String },
    #[error(
        "invalid identifier {0:?}: expected a non-empty name of letters, digits, `_`, `-` or `.`"
    )]
    InvalidName(String),
    #[error("dimension name `{0}` appears more than once; names must be unique within a chain")]
    DuplicateName(String),
    #[error("dimension `{name}`: lower_dev ({lower}) exceeds upper_dev ({upper}); lower_dev <= upper_dev is required")]
    InvertedDeviations {
        name: String,
        lower: f64,
        upper: f64,
    },
    #[error("dimension `{0}`: coefficient must be non-zero")]
    ZeroCoefficient(String),
    #[error("`{name}`: field `{field}` must be a finite number")]
    NonFinite { name: String, field: &'static str },
    #[error("condition `{name}`: imposed min ({min}) exceeds imposed max ({max})")]
    InvertedCondition { name: String, min: f64, max: f64 },
    #[error("no dimension named `{0}` in the chain")]
    UnknownDimension(String),
}

fn check_name(name: &str) -> Result<(), ChainError> {
    let ok = !name.is_empty()
        && name
            .chars()
            .all(|c| c.is_alphanumeric() || matches!(c, '_' | '-' | '.'));
    if ok {
        Ok(())
    } else {
        Err(ChainError::InvalidName(name.to_string()))
    }
}

fn check_finite<T: Scalar>(name: &str, field: &'static str, v: T) -> Result<(), ChainError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(ChainError::NonFinite {
            name: name.to_string(),
            field,
        })
    }
}

/// One toleranced dimension ("rating") of a chain.
#[derive(Debug, Clone, PartialEq)]
pub struct DimensionSpec<T> {
    name: String,
    nominal: T,
    upper_dev: T,
    lower_dev: T,
    coefficient: T,
}

impl<T: Scalar> DimensionSpec<T> {
    pub fn new(
        name: impl Into<String>,
        nominal: T,
        upper_dev: T,
        lower_dev: T,
        coefficient: T,
    ) -> Result<Self, ChainError> {
        let name = name.into();
        check_name(&name)?;
        check_finite(&name, "nominal", nominal)?;
        check_finite(&name, "upper_dev", upper_dev)?;
        check_finite(&name, "lower_dev", lower_dev)?;
        check_finite(&name, "coefficient", coefficient)?;
        if lower_dev > upper_dev {
            return Err(ChainError::InvertedDeviations {
                name,
                lower: lower_dev.as_f64(),
                upper: upper_dev.as_f64(),
            });
        }
        if coefficient == T::zero() {
            return Err(ChainError::ZeroCoefficient(name));
        }
        Ok(Self {
            name,
            nominal,
            upper_dev,
            lower_dev,
            coefficient,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn nominal(&self) -> T {
        self.nominal
    }

    pub fn upper_dev(&self) -> T {
        self.upper_dev
    }

    pub fn lower_dev(&self) -> T {
        self.lower_dev
    }

    /// Chain coefficient: +1 for an increasing member, -1 for a decreasing one.
    pub fn coefficient(&self) -> T {
        self.coefficient
    }

    /// Tolerance interval, `upper_dev - lower_dev`.
    pub fn it(&self) -> T {
        self.upper_dev - self.lower_dev
    }

    pub fn min_limit(&self) -> T {
        self.nominal + self.lower_dev
    }

    pub fn max_limit(&self) -> T {
        self.nominal + self.upper_dev
    }

    /// Centre of the tolerance zone, `nominal + (upper_dev + lower_dev) / 2`.
    pub fn midpoint(&self) -> T {
        self.nominal + (self.upper_dev + self.lower_dev) / T::lit(2.0)
    }

    /// Same dimension with new deviations.
    pub fn with_deviations(&self, upper_dev: T, lower_dev: T) -> Result<Self, ChainError> {
        Self::new(
            self.name.clone(),
            self.nominal,
            upper_dev,
            lower_dev,
            self.coefficient,
        )
    }
}

/// Tolerance interval of a dimension.
pub fn it_of<T: Scalar>(d: &DimensionSpec<T>) -> T {
    d.it()
}

/// Imposed limits on the functional condition. Either bound may be absent.
#[derive(Debug, Clone, PartialEq)]
pub struct FunctionalCondition<T> {
    name: String,
    min: Option<T>,
    max: Option<T>,
}

impl<T: Scalar> FunctionalCondition<T> {
    pub fn new(
        name: impl Into<String>,
        min: Option<T>,
        max: Option<T>,
    ) -> Result<Self, ChainError> {
        let name = name.into();
        check_name(&name)?;
        if let Some(v) = min {
            check_finite(&name, "min", v)?;
        }
        if let Some(v) = max {
            check_finite(&name, "max", v)?;
        }
        if let (Some(lo), Some(hi)) = (min, max) {
            if lo > hi {
                return Err(ChainError::InvertedCondition {
                    name,
                    min: lo.as_f64(),
                    max: hi.as_f64(),
                });
            }
        }
        Ok(Self { name, min, max })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn min(&self) -> Option<T> {
        self.min
    }

    pub fn max(&self) -> Option<T> {
        self.max
    }

    pub fn has_bounds(&self) -> bool {
        self.min.is_some() || self.max.is_some()
    }

    /// Closed-interval membership; an absent bound never rejects.
    pub fn contains(&self, x: T) -> bool {
        self.min.is_none_or(|lo| x >= lo) && self.max.is_none_or(|hi| x <= hi)
    }
}

/// An ordered, validated chain of dimensions with an optional imposed condition.
///
/// The functional condition is `sum(coefficient_i * a_i)` over the dimensions,
/// in order.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceChain<T> {
    name: String,
    dimensions: Vec<DimensionSpec<T>>,
    condition: Option<FunctionalCondition<T>>,
}

impl<T: Scalar> ToleranceChain<T> {
    pub fn new(
        name: impl Into<String>,
        dimensions: Vec<DimensionSpec<T>>,
        condition: Option<FunctionalCondition<T>>,
    ) -> Result<Self, ChainError> {
        let name = name.into();
        check_name(&name)?;
        if dimensions.is_empty() {
            return Err(ChainError::EmptyChain { chain: name });
        }
        for (i, d) in dimensions.iter().enumerate() {
            if dimensions[..i].iter().any(|o| o.name == d.name) {
                return Err(ChainError::DuplicateName(d.name.clone()));
            }
        }
        Ok(Self {
            name,
            dimensions,
            condition,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dimensions(&self) -> &[DimensionSpec<T>] {
        &self.dimensions
    }

    pub fn condition(&self) -> Option<&FunctionalCondition<T>> {
        self.condition.as_ref()
    }

    /// Name used for the functional condition in reports; `"fc"` when none is imposed.
    pub fn condition_name(&self) -> &str {
        self.condition.as_ref().map_or("fc", |c| c.name())
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.dimensions.iter().position(|d| d.name == name)
    }

    pub fn dimension(&self, name: &str) -> Option<&DimensionSpec<T>> {
        self.dimensions.iter().find(|d| d.name == name)
    }

    pub fn with_condition(&self, condition: Option<FunctionalCondition<T>>) -> Self {
        Self {
            condition,
            ..self.clone()
        }
    }

    /// Copy of the chain with one dimension swapped for `replacement` (matched by name).
    pub fn with_dimension(&self, replacement: DimensionSpec<T>) -> Result<Self, ChainError> {
        let idx = self
            .index_of(&replacement.name)
            .ok_or_else(|| ChainError::UnknownDimension(replacement.name.clone()))?;
        let mut dimensions = self.dimensions.clone();
        dimensions[idx] = replacement;
        Ok(Self {
            dimensions,
            ..self.clone()
        })
    }

    /// Pretty-printed chain document.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&ChainDocument::from(self.clone()))
            .expect("chain documents always serialize")
    }
}

/// Wire form of a dimension.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DimensionDocument<T> {
    pub name: String,
    pub nominal: T,
    pub upper_dev: T,
    pub lower_dev: T,
    pub coefficient: T,
}

/// Wire form of a functional condition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConditionDocument<T> {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub min: Option<T>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max: Option<T>,
}

/// Unvalidated chain document, exactly as it appears on disk.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChainDocument<T> {
    pub name: String,
    pub dimensions: Vec<DimensionDocument<T>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub condition: Option<ConditionDocument<T>>,
}

impl<T: Scalar> TryFrom<ChainDocument<T>> for ToleranceChain<T> {
    type Error = ChainError;

    fn try_from(doc: ChainDocument<T>) -> Result<Self, Self::Error> {
        let dimensions = doc
            .dimensions
            .into_iter()
            .map(|d| DimensionSpec::new(d.name, d.nominal, d.upper_dev, d.lower_dev, d.coefficient))
            .collect::<Result<Vec<_>, _>>()?;
        let condition = doc
            .condition
            .map(|c| FunctionalCondition::new(c.name, c.min, c.max))
            .transpose()?;
        ToleranceChain::new(doc.name, dimensions, condition)
    }
}

impl<T: Scalar> From<ToleranceChain<T>> for ChainDocument<T> {
    fn from(chain: ToleranceChain<T>) -> Self {
        ChainDocument {
            name: chain.name,
            dimensions: chain
                .dimensions
                .into_iter()
                .map(|d| DimensionDocument {
                    name: d.name,
                    nominal: d.nominal,
                    upper_dev: d.upper_dev,
                    lower_dev: d.lower_dev,
                    coefficient: d.coefficient,
                })
                .collect(),
            condition: chain.condition.map(|c| ConditionDocument {
                name: c.name,
                min: c.min,
                max: c.max,
            }),
        }
    }
}

impl<T: Scalar> Serialize for ToleranceChain<T> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        ChainDocument::from(self.clone()).serialize(serializer)
    }
}

impl<'de, T: Scalar> Deserialize<'de> for ToleranceChain<T> {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let doc = ChainDocument::<T>::deserialize(deserializer)?;
        ToleranceChain::try_from(doc).map_err(serde::de::Error::custom)
    }
}

/// Parses and validates a chain-definition document.
pub fn parse_chain<T: Scalar>(text: &str) -> Result<ToleranceChain<T>, ChainError> {
    let doc: ChainDocument<T> =
        serde_json::from_str(text).map_err(|e| ChainError::Syntax(e.to_string()))?;
    ToleranceChain::try_from(doc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ConformityStatus {
    Conforming,
    NonConformingLow,
    NonConformingHigh,
    NonConformingBoth,
    Unchecked,
}

impl ConformityStatus {
    pub fn is_conforming(self) -> bool {
        self == ConformityStatus::Conforming
    }
}

/// Where a computed interval sits relative to the imposed compliance domain.
#[derive(Debug, Clone, PartialEq)]
pub struct ConformityVerdict<T> {
    pub status: ConformityStatus,
    pub computed: IntervalResult<T>,
    pub imposed: Option<FunctionalCondition<T>>,
}

impl<T: Scalar> ConformityVerdict<T> {
    /// Classifies `computed` against the closed interval `[min, max]` of `imposed`.
    /// Comparisons are exact.
    pub fn assess(computed: IntervalResult<T>, imposed: Option<&FunctionalCondition<T>>) -> Self {
        let status = match imposed.filter(|c| c.has_bounds()) {
            None => ConformityStatus::Unchecked,
            Some(c) => {
                let low = c.min.is_some_and(|lo| computed.min < lo);
                let high = c.max.is_some_and(|hi| computed.max > hi);
                match (low, high) {
                    (false, false) => ConformityStatus::Conforming,
                    (true, false) => ConformityStatus::NonConformingLow,
                    (false, true) => ConformityStatus::NonConformingHigh,
                    (true, true) => ConformityStatus::NonConformingBoth,
                }
            }
        };
        Self {
            status,
            computed,
            imposed: imposed.cloned(),
        }
    }
}
