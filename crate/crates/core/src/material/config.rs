//! Flat `key = value` material files.
//!
//! One key per line, SI units, `#` starts a comment. `A`, `Pa` and `R`
//! default to aluminium / standard-atmosphere values when absent.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use super::{
    Absorption, MaterialSpec, SpecificHeat, ALUMINIUM_ATOMIC_WEIGHT, GAS_CONSTANT,
    STANDARD_PRESSURE,
};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Every recognised key, in canonical output order.
pub const KEYS: [&str; 18] = [
    "lambda1", "lambda2", "rho", "c1", "c2_a", "c2_b", "Lm", "Lv", "Tv", "Tm", "Tinf", "chi0",
    "chi_p", "chi_Tref", "q0", "A", "Pa", "R",
];

const OPTIONAL: [(&str, f64); 3] = [
    ("A", ALUMINIUM_ATOMIC_WEIGHT),
    ("Pa", STANDARD_PRESSURE),
    ("R", GAS_CONSTANT),
];

fn parse_pairs(text: &str) -> Result<BTreeMap<String, f64>> {
    let mut out = BTreeMap::new();
    for (no, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| Error::Config(format!("line {}: expected `key = value`", no + 1)))?;
        let key = key.trim();
        if !KEYS.contains(&key) {
            return Err(Error::Config(format!("line {}: unknown key `{key}`", no + 1)));
        }
        let value: f64 = value
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("line {}: `{}` is not a number", no + 1, value.trim())))?;
        if out.insert(key.to_string(), value).is_some() {
            return Err(Error::Config(format!("line {}: duplicate key `{key}`", no + 1)));
        }
    }
    Ok(out)
}

impl<S: Real> MaterialSpec<S> {
    /// Parses a material file body. The result is validated.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut kv = parse_pairs(text)?;
        for (k, v) in OPTIONAL {
            kv.entry(k.to_string()).or_insert(v);
        }
        let get = |k: &str| -> Result<S> {
            kv.get(k)
                .copied()
                .map(S::of)
                .ok_or_else(|| Error::Config(format!("missing key `{k}`")))
        };
        let spec = MaterialSpec {
            lambda1: get("lambda1")?,
            lambda2: get("lambda2")?,
            rho: get("rho")?,
            c_liquid: SpecificHeat::Constant(get("c1")?),
            c_solid: SpecificHeat::Linear {
                a: get("c2_a")?,
                b: get("c2_b")?,
            },
            latent_melting: get("Lm")?,
            latent_evaporation: get("Lv")?,
            t_evaporation: get("Tv")?,
            t_melting: get("Tm")?,
            t_far: get("Tinf")?,
            absorption: Absorption {
                chi0: get("chi0")?,
                exponent: get("chi_p")?,
                t_ref: get("chi_Tref")?,
            },
            q0: get("q0")?,
            atomic_weight: get("A")?,
            ambient_pressure: get("Pa")?,
            gas_constant: get("R")?,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn from_config_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_config_str(&text)
    }

    /// Sets one key to `value`; same names as the file format.
    pub fn set(&mut self, key: &str, value: S) -> Result<()> {
        match key {
            "lambda1" => self.lambda1 = value,
            "lambda2" => self.lambda2 = value,
            "rho" => self.rho = value,
            "c1" => self.c_liquid = SpecificHeat::Constant(value),
            "c2_a" | "c2_b" => {
                let (mut a, mut b) = match self.c_solid {
                    SpecificHeat::Linear { a, b } => (a, b),
                    SpecificHeat::Constant(c) => (c, S::zero()),
                    SpecificHeat::General(_) => {
                        return Err(Error::Config(format!(
                            "`{key}` cannot override a general specific-heat law"
                        )))
                    }
                };
                if key == "c2_a" {
                    a = value;
                } else {
                    b = value;
                }
                self.c_solid = SpecificHeat::Linear { a, b };
            }
            "Lm" => self.latent_melting = value,
            "Lv" => self.latent_evaporation = value,
            "Tv" => self.t_evaporation = value,
            "Tm" => self.t_melting = value,
            "Tinf" => self.t_far = value,
            "chi0" => self.absorption.chi0 = value,
            "chi_p" => self.absorption.exponent = value,
            "chi_Tref" => self.absorption.t_ref = value,
            "q0" => self.q0 = value,
            "A" => self.atomic_weight = value,
            "Pa" => self.ambient_pressure = value,
            "R" => self.gas_constant = value,
            _ => return Err(Error::Config(format!("unknown key `{key}`"))),
        }
        Ok(())
    }

    /// Renders the material in the file format. Fails for general specific-heat laws.
    pub fn to_config_string(&self) -> Result<String> {
        let c1 = match self.c_liquid {
            SpecificHeat::Constant(c) => c,
            _ => return Err(Error::Config("liquid specific heat must be constant".into())),
        };
        let (a, b) = match self.c_solid {
            SpecificHeat::Linear { a, b } => (a, b),
            SpecificHeat::Constant(c) => (c, S::zero()),
            SpecificHeat::General(_) => {
                return Err(Error::Config("solid specific heat must be linear".into()))
            }
        };
        let values = [
            self.lambda1,
            self.lambda2,
            self.rho,
            c1,
            a,
            b,
            self.latent_melting,
            self.latent_evaporation,
            self.t_evaporation,
            self.t_melting,
            self.t_far,
            self.absorption.chi0,
            self.absorption.exponent,
            self.absorption.t_ref,
            self.q0,
            self.atomic_weight,
            self.ambient_pressure,
            self.gas_constant,
        ];
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {:e}", v.as_f64());
        }
        Ok(out)
    }
}
