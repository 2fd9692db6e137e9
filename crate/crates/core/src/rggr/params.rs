//! Weight update rules and edge strength.
//!
//! An individual whose fitness lies at least `lambda` above the population
//! mean reinforces every edge of its chain; any other individual weakens
//! them. The step for a nonzero weight is `damping * d / (d + rho) * V(w)`,
//! which is below `V(w)` for any `rho > 0`. A zero weight moves by
//! `damping * mu * d` instead, so an unused edge can re-enter competition.
//! All results are floored at zero.

use serde::{Deserialize, Serialize};

use super::RggrError;
use crate::Real;

/// Control function `V(w) > 0` bounding the size of a single update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum VFunction<T> {
    /// `V(w) = c`.
    Constant { c: T },
    /// `V(w) = c / (1 + alpha * w)`: heavy edges grow more slowly.
    Saturating { c: T, alpha: T },
}

impl<T: Real> VFunction<T> {
    pub fn eval(&self, w: T) -> T {
        match *self {
            VFunction::Constant { c } => c,
            VFunction::Saturating { c, alpha } => c / (T::one() + alpha * w),
        }
    }

    fn validate(&self) -> Result<(), RggrError> {
        match *self {
            VFunction::Constant { c } if c > T::zero() && c.is_finite() => Ok(()),
            VFunction::Saturating { c, alpha }
                if c > T::zero() && c.is_finite() && alpha >= T::zero() && alpha.is_finite() =>
            {
                Ok(())
            }
            _ => Err(RggrError::InvalidParam {
                name: "v_function",
                reason: "c must be positive and alpha non-negative".into(),
            }),
        }
    }
}

impl<T: Real> Default for VFunction<T> {
    fn default() -> Self {
        VFunction::Constant { c: T::one() }
    }
}

/// Parameters of the fitness-driven weight update.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct UpdateParams<T> {
    /// Acceptability threshold on `fitness - mean`.
    pub lambda: T,
    /// `rho = max(rho_min, rho_fraction * |mean fitness|)`.
    pub rho_fraction: T,
    pub rho_min: T,
    /// Step factor for edges currently at zero weight, in `(0, 1)`.
    pub mu: T,
    pub v_function: VFunction<T>,
    /// Multiplier applied to every update of edge column 0.
    pub first_column_damping: T,
}

impl<T: Real> Default for UpdateParams<T> {
    fn default() -> Self {
        Self {
            lambda: T::zero(),
            rho_fraction: T::lit(0.1),
            rho_min: T::lit(1e-6),
            mu: T::lit(0.8),
            v_function: VFunction::default(),
            first_column_damping: T::lit(0.5),
        }
    }
}

impl<T: Real> UpdateParams<T> {
    pub fn validate(&self) -> Result<(), RggrError> {
        let invalid = |name, reason: &str| {
            Err(RggrError::InvalidParam {
                name,
                reason: reason.into(),
            })
        };
        // A negative threshold lets the zero-weight branch push weights below zero.
        if !(self.lambda >= T::zero() && self.lambda.is_finite()) {
            return invalid("lambda", "must be finite and non-negative");
        }
        if !(self.rho_fraction > T::zero() && self.rho_fraction.is_finite()) {
            return invalid("rho_fraction", "must be finite and positive");
        }
        if !(self.rho_min > T::zero() && self.rho_min.is_finite()) {
            return invalid("rho_min", "must be finite and positive");
        }
        if !(self.mu > T::zero() && self.mu < T::one()) {
            return invalid("mu", "must lie in (0, 1)");
        }
        if !(self.first_column_damping > T::zero() && self.first_column_damping <= T::one()) {
            return invalid("first_column_damping", "must lie in (0, 1]");
        }
        self.v_function.validate()
    }

    /// Resolves the update-rate coefficient for a population mean.
    pub fn resolve_rho(&self, avg_fitness: T) -> T {
        (self.rho_fraction * avg_fitness.abs()).max(self.rho_min)
    }

    pub fn damping(&self, column: usize) -> T {
        if column == 0 {
            self.first_column_damping
        } else {
            T::one()
        }
    }
}

/// Reinforces weight `w` in edge column `column` by an individual with
/// `delta = fitness - mean >= lambda`.
pub fn strengthen_edge<T: Real>(w: T, delta: T, rho: T, params: &UpdateParams<T>, column: usize) -> T {
    let damping = params.damping(column);
    if w != T::zero() {
        let step = damping * (delta / (delta + rho)) * params.v_function.eval(w);
        (w + step).max(T::zero())
    } else {
        w + damping * params.mu * delta
    }
}

/// Weakens weight `w` by an individual falling short of the threshold by
/// `delta_magnitude = |delta - lambda|`.
pub fn weaken_edge<T: Real>(w: T, delta_magnitude: T, rho: T, params: &UpdateParams<T>, column: usize) -> T {
    let damping = params.damping(column);
    if w != T::zero() {
        let step = damping * (delta_magnitude / (delta_magnitude + rho)) * params.v_function.eval(w);
        (w - step).max(T::zero())
    } else {
        (w - damping * params.mu * delta_magnitude).max(T::zero())
    }
}

/// Constants of the strength transform `s = 1 / (c1 + c2 * w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct StrengthParams<T> {
    pub c1: T,
    pub c2: T,
}

impl<T: Real> Default for StrengthParams<T> {
    fn default() -> Self {
        Self {
            c1: T::one(),
            c2: T::lit(0.1),
        }
    }
}

impl<T: Real> StrengthParams<T> {
    pub fn validate(&self) -> Result<(), RggrError> {
        if !(self.c1 > T::zero() && self.c1.is_finite()) {
            return Err(RggrError::InvalidParam {
                name: "c1",
                reason: "must be finite and positive".into(),
            });
        }
        if !(self.c2 >= T::zero() && self.c2.is_finite()) {
            return Err(RggrError::InvalidParam {
                name: "c2",
                reason: "must be finite and non-negative".into(),
            });
        }
        Ok(())
    }
}

/// Strength of an edge of weight `w`. Heavier edges are weaker cut points.
pub fn edge_strength<T: Real>(w: T, params: &StrengthParams<T>) -> T {
    T::one() / (params.c1 + params.c2 * w)
}
