use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::num::Scalar;
use crate::reference::ReferenceProfile;
use crate::timeseries::{MonthTotal, MonthlyTotals, Provenance};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FactorMode {
    /// Mean of `(ref - observed) / ref`, taken verbatim.
    PaperLiteral,
    /// Mean of `observed / ref`; equals one minus the literal factor.
    #[default]
    Ratio,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct AdjustmentFactor<T> {
    pub value: T,
    pub mode: FactorMode,
    /// Observed months the factor was averaged over.
    pub k: usize,
}

/// Scalar relating the household's observed months to the reference profile.
pub fn adjustment_factor<T: Scalar>(
    observed: &MonthlyTotals<T>,
    reference: &ReferenceProfile<T>,
    mode: FactorMode,
) -> Result<AdjustmentFactor<T>> {
    let months: Vec<&MonthTotal<T>> = observed.observed().collect();
    let k = months.len();
    if k == 0 {
        return Err(Error::InsufficientData(
            "need ≥ 1 observed month; found 0".to_string(),
        ));
    }
    let sum: T = months
        .iter()
        .map(|m| {
            let r = reference.month(m.month);
            match mode {
                FactorMode::PaperLiteral => (r - m.total_kwh) / r,
                FactorMode::Ratio => m.total_kwh / r,
            }
        })
        .sum();
    Ok(AdjustmentFactor {
        value: sum / T::of_usize(k),
        mode,
        k,
    })
}

/// Keeps observed months and fills every other month with `factor · reference`.
pub fn fill_monthly<T: Scalar>(
    observed: &MonthlyTotals<T>,
    reference: &ReferenceProfile<T>,
    factor: &AdjustmentFactor<T>,
) -> Result<MonthlyTotals<T>> {
    if !factor.value.is_finite() {
        return Err(Error::InvalidFactor(format!("factor {} is not finite", factor.value)));
    }
    match factor.mode {
        FactorMode::Ratio if factor.value <= T::zero() => {
            return Err(Error::InvalidFactor(format!(
                "ratio factor must be positive, got {}",
                factor.value
            )))
        }
        FactorMode::PaperLiteral if factor.value < T::zero() => {
            return Err(Error::InvalidFactor(format!(
                "paper-literal factor {} would fill months with negative energy",
                factor.value
            )))
        }
        _ => {}
    }
    if factor.k != observed.observed_count() {
        return Err(Error::Precondition(format!(
            "factor was computed over {} observed months but the totals hold {}",
            factor.k,
            observed.observed_count()
        )));
    }
    let months = observed.months().map(|m| match m.provenance {
        Provenance::Observed => m,
        Provenance::Absent | Provenance::Filled => MonthTotal {
            total_kwh: factor.value * reference.month(m.month),
            provenance: Provenance::Filled,
            ..m
        },
    });
    MonthlyTotals::new(months)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn observed(apr: f64, may: f64) -> MonthlyTotals<f64> {
        let mut v = [None; 12];
        v[3] = Some(apr);
        v[4] = Some(may);
        MonthlyTotals::from_observed(v).unwrap()
    }

    fn flat_ref(v: f64) -> ReferenceProfile<f64> {
        ReferenceProfile::new("EL", "test", [v; 12]).unwrap()
    }

    #[test]
    fn ratio_and_literal_examples() {
        let obs = observed(300.0, 320.0);
        let r = flat_ref(400.0);
        // oracle: (300/400 + 320/400) / 2 and ((400-300)/400 + (400-320)/400) / 2
        let oracle_ratio = (0.75 + 0.80) / 2.0;
        let oracle_literal = (0.25 + 0.20) / 2.0;
        let fr = adjustment_factor(&obs, &r, FactorMode::Ratio).unwrap();
        let fl = adjustment_factor(&obs, &r, FactorMode::PaperLiteral).unwrap();
        assert!((fr.value - oracle_ratio).abs() < 1e-15);
        assert!((fl.value - oracle_literal).abs() < 1e-15);
        assert_eq!(fr.k, 2);
    }

    #[test]
    fn identity_case() {
        let obs = observed(400.0, 400.0);
        let r = flat_ref(400.0);
        assert_eq!(adjustment_factor(&obs, &r, FactorMode::Ratio).unwrap().value, 1.0);
        assert_eq!(adjustment_factor(&obs, &r, FactorMode::PaperLiteral).unwrap().value, 0.0);
    }

    #[test]
    fn no_observed_months() {
        let obs = MonthlyTotals::<f64>::from_observed([None; 12]).unwrap();
        match adjustment_factor(&obs, &flat_ref(1.0), FactorMode::Ratio) {
            Err(Error::InsufficientData(msg)) => assert!(msg.contains("≥ 1 observed month")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn fill_examples() {
        let obs = observed(300.0, 320.0);
        let r = flat_ref(400.0);
        let f = adjustment_factor(&obs, &r, FactorMode::Ratio).unwrap();
        let filled = fill_monthly(&obs, &r, &f).unwrap();
        assert_eq!(filled.month(4).total_kwh, 300.0);
        assert_eq!(filled.month(4).provenance, Provenance::Observed);
        let jan = filled.month(1);
        assert_eq!(jan.provenance, Provenance::Filled);
        assert!((jan.total_kwh - 0.775 * 400.0).abs() < 1e-12);
        assert!(filled.all_present());
    }

    #[test]
    fn literal_with_zero_consumption_fills_reference() {
        let obs = observed(0.0, 0.0);
        let r = ReferenceProfile::new("EL", "t", std::array::from_fn(|i| 100.0 + i as f64 * 7.3)).unwrap();
        let f = adjustment_factor(&obs, &r, FactorMode::PaperLiteral).unwrap();
        assert_eq!(f.value, 1.0);
        let filled = fill_monthly(&obs, &r, &f).unwrap();
        for m in filled.months().iter().filter(|m| m.provenance == Provenance::Filled) {
            assert_eq!(m.total_kwh, r.month(m.month));
        }
    }

    #[test]
    fn invalid_factors_rejected() {
        let obs = observed(300.0, 320.0);
        let r = flat_ref(400.0);
        let bad = AdjustmentFactor { value: 0.0, mode: FactorMode::Ratio, k: 2 };
        assert!(matches!(fill_monthly(&obs, &r, &bad), Err(Error::InvalidFactor(_))));
        let neg = AdjustmentFactor { value: -0.2, mode: FactorMode::PaperLiteral, k: 2 };
        assert!(matches!(fill_monthly(&obs, &r, &neg), Err(Error::InvalidFactor(_))));
        let wrong_k = AdjustmentFactor { value: 0.5, mode: FactorMode::Ratio, k: 3 };
        assert!(matches!(fill_monthly(&obs, &r, &wrong_k), Err(Error::Precondition(_))));
    }

    proptest! {
        #[test]
        fn factor_duality(vals in proptest::array::uniform12(proptest::option::of(0.0f64..2000.0)), refs in proptest::array::uniform12(100.0f64..2000.0)) {
            prop_assume!(vals.iter().any(|v| v.is_some()));
            let obs = MonthlyTotals::from_observed(vals).unwrap();
            let r = ReferenceProfile::new("EL", "p", refs).unwrap();
            let a = adjustment_factor(&obs, &r, FactorMode::Ratio).unwrap().value;
            let b = adjustment_factor(&obs, &r, FactorMode::PaperLiteral).unwrap().value;
            prop_assert!((a + b - 1.0).abs() <= 1e-12);
        }
    }
}
