//! Scalar parameters and closed-form game functions.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Absolute tolerance for threshold comparisons (`z` vs 1/2, gap vs m/2,
/// utility difference vs 0).
pub const EPS_CMP: f64 = 1e-9;

/// Prices, morality coefficient and environmental weight.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GameParams {
    pub price_clean: f64,
    pub price_unclean: f64,
    pub morality: f64,
    #[serde(default)]
    pub env_weight: f64,
}

impl GameParams {
    pub fn new(price_clean: f64, price_unclean: f64, morality: f64) -> Result<Self> {
        let p = Self {
            price_clean,
            price_unclean,
            morality,
            env_weight: 0.0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with the unclean price pinned at 1 and the given price gap.
    pub fn from_gap(morality: f64, price_gap: f64) -> Result<Self> {
        Self::new(1.0 + price_gap, 1.0, morality)
    }

    pub fn with_env_weight(mut self, env_weight: f64) -> Result<Self> {
        self.env_weight = env_weight;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let all = [
            self.price_clean,
            self.price_unclean,
            self.morality,
            self.env_weight,
        ];
        if all.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParams("non-finite value".into()));
        }
        if self.price_clean <= self.price_unclean {
            return Err(Error::InvalidParams(format!(
                "price_clean ({}) must exceed price_unclean ({})",
                self.price_clean, self.price_unclean
            )));
        }
        if self.morality <= 0.0 {
            return Err(Error::InvalidParams(format!(
                "morality must be positive, got {}",
                self.morality
            )));
        }
        if self.env_weight < 0.0 {
            return Err(Error::InvalidParams(format!(
                "env_weight must be nonnegative, got {}",
                self.env_weight
            )));
        }
        Ok(())
    }

    /// Extra cost of the clean technology, `P_c - P_uc`.
    pub fn price_gap(&self) -> f64 {
        self.price_clean - self.price_unclean
    }

    /// Peak of the utility difference, `m/2 - gap`, attained at `z = 1/2`.
    pub fn peak_advantage(&self) -> f64 {
        0.5 * self.morality - self.price_gap()
    }
}

/// Behavioral-type fractions: rational, herding, lethargic.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PopulationMix {
    pub alpha_r: f64,
    pub alpha_h: f64,
    #[serde(default)]
    pub alpha_l: f64,
}

impl PopulationMix {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(alpha_r: f64, alpha_h: f64, alpha_l: f64) -> Result<Self> {
        let mix = Self {
            alpha_r,
            alpha_h,
            alpha_l,
        };
        mix.validate()?;
        Ok(mix)
    }

    /// Rational/herding population without lethargic agents.
    pub fn two_type(alpha_r: f64) -> Result<Self> {
        Self::new(alpha_r, 1.0 - alpha_r, 0.0)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("alpha_r", self.alpha_r),
            ("alpha_h", self.alpha_h),
            ("alpha_l", self.alpha_l),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidMix(format!("{name} = {v} is outside [0, 1]")));
            }
        }
        let sum = self.alpha_r + self.alpha_h + self.alpha_l;
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::InvalidMix(format!(
                "fractions sum to {sum}, expected 1"
            )));
        }
        Ok(())
    }

    pub fn is_two_type(&self) -> bool {
        self.alpha_l == 0.0
    }
}

/// The binary technology choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Action {
    /// Clean technology, action 1.
    Clean = 1,
    /// Unclean technology, action 2.
    Unclean = 2,
}

impl Action {
    pub const ALL: [Action; 2] = [Action::Clean, Action::Unclean];

    pub fn is_clean(self) -> bool {
        self == Action::Clean
    }
}

/// Set of actions played with positive probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Support {
    pub clean: bool,
    pub unclean: bool,
}

impl Support {
    pub fn contains(&self, a: Action) -> bool {
        match a {
            Action::Clean => self.clean,
            Action::Unclean => self.unclean,
        }
    }
}

/// Zeros `R- <= R+` of the rational utility difference.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Roots {
    pub lower: f64,
    pub upper: f64,
}

impl Roots {
    pub fn is_double(&self) -> bool {
        self.lower == self.upper
    }
}

pub(crate) fn check_unit(what: &'static str, value: f64) -> Result<()> {
    if (0.0..=1.0).contains(&value) {
        Ok(())
    } else {
        Err(Error::Domain { what, value })
    }
}

/// Social-pressure term `(1 - z) z m`.
fn moral_term(z: f64, p: &GameParams) -> f64 {
    (1.0 - z) * z * p.morality
}

/// Instantaneous utility of a rational agent at aggregate adoption `z`.
pub fn utility_rational(a: Action, z: f64, p: &GameParams) -> Result<f64> {
    check_unit("z", z)?;
    Ok(match a {
        Action::Clean => -p.price_clean + moral_term(z, p),
        Action::Unclean => -p.price_unclean - moral_term(z, p),
    })
}

/// Herding agents value whichever action is more popular.
pub fn utility_herding(a: Action, z: f64) -> Result<f64> {
    check_unit("z", z)?;
    Ok(match a {
        Action::Clean => z,
        Action::Unclean => 1.0 - z,
    })
}

/// Lethargic agents: UC strictly dominates regardless of `z`.
pub fn utility_lethargic(a: Action) -> f64 {
    match a {
        Action::Clean => 0.0,
        Action::Unclean => 1.0,
    }
}

/// Rational utility difference `h(z) = u(CT, z) - u(UC, z) = 2(1 - z) z m - gap`.
pub fn utility_difference(z: f64, p: &GameParams) -> Result<f64> {
    check_unit("z", z)?;
    Ok(utility_difference_unchecked(z, p))
}

/// Polynomial form of [`utility_difference`], valid for any real `z`.
pub(crate) fn utility_difference_unchecked(z: f64, p: &GameParams) -> f64 {
    2.0 * moral_term(z, p) - p.price_gap()
}

/// Zeros of the utility difference using the default tolerance.
pub fn roots(p: &GameParams) -> Option<Roots> {
    roots_with(p, EPS_CMP)
}

/// Zeros of the utility difference. A gap within `eps` of `m/2` yields the
/// double root `(1/2, 1/2)`; a larger gap yields `None`.
pub fn roots_with(p: &GameParams, eps: f64) -> Option<Roots> {
    let half_m = 0.5 * p.morality;
    let gap = p.price_gap();
    if (gap - half_m).abs() <= eps {
        return Some(Roots {
            lower: 0.5,
            upper: 0.5,
        });
    }
    if gap > half_m {
        return None;
    }
    let ratio = gap / p.morality;
    let s = (1.0 - 2.0 * ratio).sqrt();
    // (1 - s)/2 rewritten to avoid cancellation when the gap is small.
    let lower = ratio / (1.0 + s);
    Some(Roots {
        lower,
        upper: 1.0 - lower,
    })
}

/// CT share among rationals consistent with aggregate adoption `z` in a
/// two-type population, where herding agents play CT iff `z >= 1/2`.
pub fn y_of_z(z: f64, mix: &PopulationMix) -> Result<f64> {
    check_unit("z", z)?;
    if mix.alpha_l != 0.0 {
        return Err(Error::InvalidMix(
            "the rational-share map is defined for two-type populations only".into(),
        ));
    }
    if mix.alpha_r == 0.0 {
        return Err(Error::NoRationals);
    }
    let y = if z < 0.5 {
        z / mix.alpha_r
    } else {
        (mix.alpha_r - (1.0 - z)) / mix.alpha_r
    };
    if !(-EPS_CMP..=1.0 + EPS_CMP).contains(&y) {
        return Err(Error::Infeasible { z, y });
    }
    Ok(y.clamp(0.0, 1.0))
}

/// Actions played with positive probability when CT is played with
/// probability `y`.
pub fn support(y: f64) -> Result<Support> {
    check_unit("y", y)?;
    Ok(if y == 0.0 {
        Support {
            clean: false,
            unclean: true,
        }
    } else if y == 1.0 {
        Support {
            clean: true,
            unclean: false,
        }
    } else {
        Support {
            clean: true,
            unclean: true,
        }
    })
}

/// Best responses of a rational agent, with ties (`|h| <= eps`) admitting both.
pub fn rational_best_responses(z: f64, p: &GameParams, eps: f64) -> Result<Support> {
    let h = utility_difference(z, p)?;
    Ok(Support {
        clean: h >= -eps,
        unclean: h <= eps,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(pc: f64, puc: f64, m: f64) -> GameParams {
        GameParams::new(pc, puc, m).unwrap()
    }

    #[test]
    fn rational_utility_examples() {
        let g = p(2.0, 1.0, 2.0);
        assert_eq!(utility_rational(Action::Clean, 0.0, &g).unwrap(), -2.0);
        assert_eq!(utility_rational(Action::Unclean, 0.5, &g).unwrap(), -1.5);
        assert_eq!(utility_rational(Action::Clean, 0.5, &g).unwrap(), -1.5);
        assert!(matches!(
            utility_rational(Action::Clean, 1.5, &g),
            Err(Error::Domain { .. })
        ));
    }

    #[test]
    fn herding_and_lethargic_utilities() {
        assert_eq!(utility_herding(Action::Clean, 0.7).unwrap(), 0.7);
        assert!((utility_herding(Action::Unclean, 0.7).unwrap() - 0.3).abs() < 1e-15);
        assert_eq!(
            utility_herding(Action::Clean, 0.5).unwrap(),
            utility_herding(Action::Unclean, 0.5).unwrap()
        );
        assert!(utility_herding(Action::Clean, -0.1).is_err());
        assert_eq!(utility_lethargic(Action::Clean), 0.0);
        assert_eq!(utility_lethargic(Action::Unclean), 1.0);
    }

    #[test]
    fn utility_difference_examples() {
        let g = GameParams::from_gap(2.0, 0.5).unwrap();
        assert!((utility_difference(0.0, &g).unwrap() + 0.5).abs() < 1e-15);
        assert!((utility_difference(0.5, &g).unwrap() - 0.5).abs() < 1e-15);
        let r = roots(&g).unwrap();
        assert!(utility_difference(r.upper, &g).unwrap().abs() < 1e-12);
        assert!(utility_difference(r.lower, &g).unwrap().abs() < 1e-12);
    }

    #[test]
    fn roots_examples() {
        // Quadratic solve of 4 z (1 - z) = 0.5, i.e. z^2 - z + 1/8 = 0.
        let disc: f64 = 1.0 - 4.0 * 0.125;
        let r = roots(&GameParams::from_gap(2.0, 0.5).unwrap()).unwrap();
        assert!((r.lower - (1.0 - disc.sqrt()) / 2.0).abs() < 1e-12);
        assert!((r.upper - (1.0 + disc.sqrt()) / 2.0).abs() < 1e-12);
        assert!((r.lower - 0.1464466).abs() < 1e-7);
        assert!((r.upper - 0.8535534).abs() < 1e-7);

        let d = roots(&GameParams::from_gap(2.0, 1.0).unwrap()).unwrap();
        assert_eq!((d.lower, d.upper), (0.5, 0.5));
        assert!(d.is_double());
        assert!(roots(&GameParams::from_gap(2.0, 1.5).unwrap()).is_none());
    }

    #[test]
    fn y_of_z_examples() {
        let mix = PopulationMix::two_type(0.6).unwrap();
        assert_eq!(y_of_z(0.0, &mix).unwrap(), 0.0);
        assert!((y_of_z(0.3, &mix).unwrap() - 0.5).abs() < 1e-15);
        let half = PopulationMix::two_type(0.5).unwrap();
        assert!((y_of_z(0.75, &half).unwrap() - 0.5).abs() < 1e-15);
        // Herding mass 0.7 alone already exceeds z = 0.55.
        assert!(matches!(
            y_of_z(0.55, &PopulationMix::two_type(0.3).unwrap()),
            Err(Error::Infeasible { .. })
        ));
        assert_eq!(
            y_of_z(0.2, &PopulationMix::two_type(0.0).unwrap()),
            Err(Error::NoRationals)
        );
        assert!(y_of_z(0.2, &PopulationMix::new(0.5, 0.3, 0.2).unwrap()).is_err());
    }

    #[test]
    fn support_convention() {
        assert_eq!(
            support(0.4).unwrap(),
            Support {
                clean: true,
                unclean: true
            }
        );
        assert!(support(1.0).unwrap().contains(Action::Clean));
        assert!(!support(1.0).unwrap().contains(Action::Unclean));
        assert!(support(0.0).unwrap().contains(Action::Unclean));
        assert!(!support(0.0).unwrap().contains(Action::Clean));
        assert!(support(1.2).is_err());
    }

    #[test]
    fn param_and_mix_validation() {
        assert!(GameParams::new(1.0, 2.0, 1.0).is_err());
        assert!(GameParams::new(2.0, 1.0, 0.0).is_err());
        assert!(GameParams::new(2.0, 1.0, 1.0)
            .unwrap()
            .with_env_weight(-1.0)
            .is_err());
        assert!(PopulationMix::new(0.5, 0.4, 0.0).is_err());
        assert!(PopulationMix::new(1.1, -0.1, 0.0).is_err());
        assert!(PopulationMix::new(0.2, 0.3, 0.5).is_ok());
    }
}
