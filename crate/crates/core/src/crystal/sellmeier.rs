//! Dispersion formulas for one principal index of a crystal.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const BBO_O_JSON: &str = include_str!("../../data/bbo_kato1986_o.json");
const BBO_E_JSON: &str = include_str!("../../data/bbo_kato1986_e.json");

/// Functional form of `n²(λ)`, λ in µm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormulaVariant {
    /// `n² = A + B/(λ² − C) − Dλ²`, coefficients `[A, B, C, D]`.
    Kato,
    /// `n² = 1 + Σ Bᵢλ²/(λ² − Cᵢ)`, coefficients `[B₁, C₁, B₂, C₂, …]`.
    Sellmeier,
}

/// One principal refractive index as a named dispersion formula.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SellmeierSet {
    pub name: String,
    pub formula_variant: FormulaVariant,
    pub coefficients: Vec<f64>,
    pub valid_range_nm: [f64; 2],
}

impl SellmeierSet {
    /// Parses and validates a set from its JSON document.
    pub fn from_json_str(json: &str) -> std::result::Result<Self, String> {
        let set: SellmeierSet = serde_json::from_str(json).map_err(|e| e.to_string())?;
        set.validate()?;
        Ok(set)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_str(&text).map_err(|message| Error::Parse {
            path: path.to_path_buf(),
            message,
        })
    }

    /// BBO ordinary index shipped with the crate.
    pub fn bbo_ordinary() -> Self {
        Self::from_json_str(BBO_O_JSON).expect("embedded BBO ordinary set is valid")
    }

    /// BBO extraordinary (principal) index shipped with the crate.
    pub fn bbo_extraordinary() -> Self {
        Self::from_json_str(BBO_E_JSON).expect("embedded BBO extraordinary set is valid")
    }

    fn validate(&self) -> std::result::Result<(), String> {
        let expected_ok = match self.formula_variant {
            FormulaVariant::Kato => self.coefficients.len() == 4,
            FormulaVariant::Sellmeier => {
                !self.coefficients.is_empty() && self.coefficients.len() % 2 == 0
            }
        };
        if !expected_ok {
            return Err(format!(
                "{}: wrong number of coefficients ({}) for {:?}",
                self.name,
                self.coefficients.len(),
                self.formula_variant
            ));
        }
        let [lo, hi] = self.valid_range_nm;
        if !(lo > 0.0 && hi > lo) {
            return Err(format!("{}: invalid valid_range_nm [{lo}, {hi}]", self.name));
        }
        Ok(())
    }

    pub fn check_range(&self, lambda_nm: f64) -> Result<()> {
        let [lo, hi] = self.valid_range_nm;
        if lambda_nm.is_finite() && lambda_nm >= lo && lambda_nm <= hi {
            Ok(())
        } else {
            Err(Error::WavelengthOutOfRange {
                wavelength_nm: lambda_nm,
                min_nm: lo,
                max_nm: hi,
                name: self.name.clone(),
            })
        }
    }

    /// `n²` and its first two derivatives with respect to λ (µm).
    pub(crate) fn n_squared_derivatives(&self, lambda_um: f64) -> [f64; 3] {
        let l = lambda_um;
        let l2 = l * l;
        let c = &self.coefficients;
        match self.formula_variant {
            FormulaVariant::Kato => {
                let (a, b, cc, d) = (c[0], c[1], c[2], c[3]);
                let den = l2 - cc;
                let f = a + b / den - d * l2;
                let f1 = -2.0 * b * l / (den * den) - 2.0 * d * l;
                let f2 = -2.0 * b / (den * den) + 8.0 * b * l2 / (den * den * den) - 2.0 * d;
                [f, f1, f2]
            }
            FormulaVariant::Sellmeier => {
                let mut f = 1.0;
                let mut f1 = 0.0;
                let mut f2 = 0.0;
                for term in c.chunks_exact(2) {
                    let (bi, ci) = (term[0], term[1]);
                    let den = l2 - ci;
                    f += bi * l2 / den;
                    f1 += -2.0 * bi * ci * l / (den * den);
                    f2 += -2.0 * bi * ci / (den * den) + 8.0 * bi * ci * l2 / (den * den * den);
                }
                [f, f1, f2]
            }
        }
    }

    /// Principal refractive index at `lambda_nm`.
    pub fn index(&self, lambda_nm: f64) -> Result<f64> {
        self.check_range(lambda_nm)?;
        let [f, _, _] = self.n_squared_derivatives(lambda_nm * 1e-3);
        if f <= 1.0 || !f.is_finite() {
            return Err(Error::Numerical(format!(
                "{}: n² = {f} at {lambda_nm} nm",
                self.name
            )));
        }
        Ok(f.sqrt())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn embedded_sets_parse() {
        let o = SellmeierSet::bbo_ordinary();
        let e = SellmeierSet::bbo_extraordinary();
        assert_eq!(o.formula_variant, FormulaVariant::Kato);
        assert!(e.index(702.2).unwrap() < o.index(702.2).unwrap());
    }

    #[test]
    fn rejects_wrong_coefficient_count() {
        let json = r#"{"name":"x","formula_variant":"kato","coefficients":[1,2,3],"valid_range_nm":[200,900]}"#;
        assert!(SellmeierSet::from_json_str(json).is_err());
    }

    #[test]
    fn standard_sellmeier_variant() {
        // fused-silica-like three-term set
        let json = r#"{"name":"silica","formula_variant":"sellmeier",
            "coefficients":[0.6961663,0.0046791,0.4079426,0.0135121,0.8974794,97.934],
            "valid_range_nm":[210,3700]}"#;
        let s = SellmeierSet::from_json_str(json).unwrap();
        let n = s.index(589.3).unwrap();
        assert!((n - 1.4585).abs() < 2e-4, "n = {n}");
    }

    #[test]
    fn analytic_derivatives_match_differences() {
        for set in [SellmeierSet::bbo_ordinary(), SellmeierSet::bbo_extraordinary()] {
            let l = 0.7022;
            let h = 1e-4;
            let [_, f1, f2] = set.n_squared_derivatives(l);
            let fp = set.n_squared_derivatives(l + h)[0];
            let fm = set.n_squared_derivatives(l - h)[0];
            let f0 = set.n_squared_derivatives(l)[0];
            assert!(((fp - fm) / (2.0 * h) - f1).abs() < 1e-7);
            assert!(((fp - 2.0 * f0 + fm) / (h * h) - f2).abs() < 1e-4);
        }
    }

    #[test]
    fn missing_file_names_path() {
        let err = SellmeierSet::from_file("/nonexistent/bbo.json").unwrap_err();
        assert!(err.to_string().contains("/nonexistent/bbo.json"));
        assert_eq!(err.exit_code(), 2);
    }
}
