//! Versioned JSON documents for family parameters.
//!
//! ```json
//! {"schema_version": 1, "family": "normal", "variant": {},
//!  "parameterization": "classical", "values": {"sigma": 1.0, "mu": 0.0}}
//! ```
//!
//! Natural values are either a flat array `[φ..., χ...]` or an object
//! `{"phi": [...], "chi_exponents": [...]}`. Classical values are either an
//! object with named fields (matrices as nested arrays) or a flat array in
//! the order given by [`classical_field_order`].

use super::{Classical, FamilySpec, FamilyTag};
use crate::construction::NaturalParameter;
use crate::error::{Error, Result};
use crate::linalg::{pack_sym, sym_len, unpack_sym};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Variant {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
}

impl Variant {
    pub fn of(tag: &FamilyTag) -> Self {
        Variant { n: tag.variant_n(), lambda: tag.variant_lambda() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parameterization {
    Natural,
    Classical,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParameterDocument {
    pub schema_version: u32,
    pub family: String,
    #[serde(default)]
    pub variant: Variant,
    pub parameterization: Parameterization,
    pub values: Value,
}

impl ParameterDocument {
    pub fn natural(spec: &FamilySpec, theta: &NaturalParameter) -> Result<Self> {
        spec.construction.check_parameter(theta)?;
        Ok(ParameterDocument {
            schema_version: SCHEMA_VERSION,
            family: spec.name().to_string(),
            variant: Variant::of(&spec.tag),
            parameterization: Parameterization::Natural,
            values: json!({ "phi": finite_array(&theta.phi)?, "chi_exponents": finite_array(&theta.chi_exponents)? }),
        })
    }

    pub fn classical(spec: &FamilySpec, c: &Classical) -> Result<Self> {
        Ok(ParameterDocument {
            schema_version: SCHEMA_VERSION,
            family: spec.name().to_string(),
            variant: Variant::of(&spec.tag),
            parameterization: Parameterization::Classical,
            values: classical_to_json(spec, c)?,
        })
    }

    pub fn spec(&self) -> Result<FamilySpec> {
        if self.schema_version != SCHEMA_VERSION {
            return Err(Error::Schema(format!(
                "unsupported schema_version {} (expected {SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        FamilySpec::from_name(&self.family, self.variant.n, self.variant.lambda)
    }

    /// The family and natural parameter described by the document. Classical
    /// values are converted, which checks the domain; natural values are only
    /// checked for shape.
    pub fn resolve(&self) -> Result<(FamilySpec, NaturalParameter)> {
        let spec = self.spec()?;
        let theta = match self.parameterization {
            Parameterization::Natural => natural_from_json(&spec, &self.values)?,
            Parameterization::Classical => spec.from_classical(&classical_from_json(&spec, &self.values)?)?,
        };
        Ok((spec, theta))
    }

    pub fn to_json_string(&self) -> Result<String> {
        serde_json::to_string(self).map_err(|e| Error::Schema(e.to_string()))
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| Error::Schema(e.to_string()))
    }
}

fn finite_array(v: &[f64]) -> Result<Value> {
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::Schema(format!("{bad} cannot be written as JSON")));
    }
    Ok(json!(v))
}

fn numbers(v: &Value, what: &str) -> Result<Vec<f64>> {
    let arr = v
        .as_array()
        .ok_or_else(|| Error::Schema(format!("{what} must be an array of numbers")))?;
    arr.iter()
        .map(|x| x.as_f64().ok_or_else(|| Error::Schema(format!("{what} contains a non-number: {x}"))))
        .collect()
}

fn number(obj: &Map<String, Value>, key: &str) -> Result<f64> {
    obj.get(key)
        .and_then(Value::as_f64)
        .ok_or_else(|| Error::Schema(format!("missing numeric field '{key}'")))
}

fn vector(obj: &Map<String, Value>, key: &str, n: usize) -> Result<DVector<f64>> {
    let v = numbers(obj.get(key).ok_or_else(|| Error::Schema(format!("missing field '{key}'")))?, key)?;
    if v.len() != n {
        return Err(Error::dims(n, v.len()));
    }
    Ok(DVector::from_vec(v))
}

fn matrix(obj: &Map<String, Value>, key: &str, n: usize) -> Result<DMatrix<f64>> {
    let rows = obj
        .get(key)
        .and_then(Value::as_array)
        .ok_or_else(|| Error::Schema(format!("field '{key}' must be a nested array")))?;
    if rows.len() != n {
        return Err(Error::dims(n, rows.len()));
    }
    let mut m = DMatrix::zeros(n, n);
    for (i, row) in rows.iter().enumerate() {
        let r = numbers(row, key)?;
        if r.len() != n {
            return Err(Error::dims(n, r.len()));
        }
        for (j, x) in r.into_iter().enumerate() {
            m[(i, j)] = x;
        }
    }
    Ok(m)
}

fn matrix_json(m: &DMatrix<f64>) -> Result<Value> {
    (0..m.nrows())
        .map(|i| finite_array(&m.row(i).iter().copied().collect::<Vec<_>>()))
        .collect::<Result<Vec<_>>>()
        .map(Value::Array)
}

pub fn natural_from_json(spec: &FamilySpec, v: &Value) -> Result<NaturalParameter> {
    let theta = match v {
        Value::Array(_) => spec.natural(&numbers(v, "values")?)?,
        Value::Object(obj) => {
            if let Some(k) = obj.keys().find(|k| *k != "phi" && *k != "chi_exponents") {
                return Err(Error::Schema(format!("unknown natural field '{k}'")));
            }
            let phi = numbers(obj.get("phi").ok_or_else(|| Error::Schema("missing field 'phi'".into()))?, "phi")?;
            let chi = match obj.get("chi_exponents") {
                Some(c) => numbers(c, "chi_exponents")?,
                None => vec![],
            };
            NaturalParameter::new(phi, chi)
        }
        _ => return Err(Error::Schema("natural values must be an array or an object".into())),
    };
    spec.construction.check_parameter(&theta)?;
    Ok(theta)
}

/// Field names of the flat classical layout; matrices are packed upper triangles.
pub fn classical_field_order(tag: &FamilyTag) -> Vec<String> {
    let seq = |name: &str, len: usize| (1..=len).map(|i| format!("{name}{i}")).collect::<Vec<_>>();
    let packed = |name: &str, n: usize| {
        let mut out = Vec::new();
        for i in 1..=n {
            for j in i..=n {
                out.push(format!("{name}{i}{j}"));
            }
        }
        out
    };
    let s = |v: &[&str]| v.iter().map(|x| x.to_string()).collect::<Vec<_>>();
    match *tag {
        FamilyTag::Bernoulli => s(&["s"]),
        FamilyTag::Categorical { n } => seq("s", n),
        FamilyTag::Normal => s(&["sigma", "mu"]),
        FamilyTag::MvNormal { n } => [packed("sigma", n), seq("mu", n)].concat(),
        FamilyTag::GammaLambda { .. } => s(&["k", "theta"]),
        FamilyTag::Wishart { n } => [packed("y", n), s(&["alpha"])].concat(),
        FamilyTag::VonMises => s(&["kappa", "mu"]),
        FamilyTag::Vmf { n } => seq("mu", n),
        FamilyTag::FisherBingham { n } => [seq("mu", n), packed("a", n)].concat(),
        FamilyTag::Hyperboloid { n } => [s(&["kappa"]), seq("xi", n + 1)].concat(),
        FamilyTag::Poincare => s(&["a", "b", "c"]),
    }
}

pub fn classical_to_flat(c: &Classical) -> Vec<f64> {
    match c {
        Classical::Bernoulli { s } => vec![*s],
        Classical::Categorical { s } => s.clone(),
        Classical::Normal { sigma, mu } => vec![*sigma, *mu],
        Classical::MvNormal { sigma, mu } => [pack_sym(sigma), mu.as_slice().to_vec()].concat(),
        Classical::GammaLambda { k, theta } => vec![*k, *theta],
        Classical::Wishart { y, alpha } => [pack_sym(y), vec![*alpha]].concat(),
        Classical::VonMises { kappa, mu } => vec![*kappa, *mu],
        Classical::Vmf { mu } => mu.as_slice().to_vec(),
        Classical::FisherBingham { mu, a } => [mu.as_slice().to_vec(), pack_sym(a)].concat(),
        Classical::Hyperboloid { kappa, xi } => [vec![*kappa], xi.as_slice().to_vec()].concat(),
        Classical::Poincare { a, b, c } => vec![*a, *b, *c],
    }
}

pub fn classical_from_flat(tag: &FamilyTag, v: &[f64]) -> Result<Classical> {
    let expected = classical_field_order(tag).len();
    if v.len() != expected {
        return Err(Error::dims(expected, v.len()));
    }
    let vec_at = |start: usize, len: usize| DVector::from_column_slice(&v[start..start + len]);
    Ok(match *tag {
        FamilyTag::Bernoulli => Classical::Bernoulli { s: v[0] },
        FamilyTag::Categorical { .. } => Classical::Categorical { s: v.to_vec() },
        FamilyTag::Normal => Classical::Normal { sigma: v[0], mu: v[1] },
        FamilyTag::MvNormal { n } => Classical::MvNormal {
            sigma: unpack_sym(&v[..sym_len(n)], n),
            mu: vec_at(sym_len(n), n),
        },
        FamilyTag::GammaLambda { .. } => Classical::GammaLambda { k: v[0], theta: v[1] },
        FamilyTag::Wishart { n } => Classical::Wishart { y: unpack_sym(&v[..sym_len(n)], n), alpha: v[sym_len(n)] },
        FamilyTag::VonMises => Classical::VonMises { kappa: v[0], mu: v[1] },
        FamilyTag::Vmf { n } => Classical::Vmf { mu: vec_at(0, n) },
        FamilyTag::FisherBingham { n } => Classical::FisherBingham { mu: vec_at(0, n), a: unpack_sym(&v[n..], n) },
        FamilyTag::Hyperboloid { n } => Classical::Hyperboloid { kappa: v[0], xi: vec_at(1, n + 1) },
        FamilyTag::Poincare => Classical::Poincare { a: v[0], b: v[1], c: v[2] },
    })
}

/// Named-field JSON object for a classical parameter.
pub fn classical_to_json(spec: &FamilySpec, c: &Classical) -> Result<Value> {
    // Reject mismatched variants and non-finite values before writing.
    classical_from_flat(&spec.tag, &classical_to_flat(c))?;
    finite_array(&classical_to_flat(c))?;
    let vecj = |v: &DVector<f64>| json!(v.as_slice());
    Ok(match c {
        Classical::Bernoulli { s } => json!({ "s": s }),
        Classical::Categorical { s } => json!({ "s": s }),
        Classical::Normal { sigma, mu } => json!({ "sigma": sigma, "mu": mu }),
        Classical::MvNormal { sigma, mu } => json!({ "sigma": matrix_json(sigma)?, "mu": vecj(mu) }),
        Classical::GammaLambda { k, theta } => json!({ "k": k, "theta": theta }),
        Classical::Wishart { y, alpha } => json!({ "y": matrix_json(y)?, "alpha": alpha }),
        Classical::VonMises { kappa, mu } => json!({ "kappa": kappa, "mu": mu }),
        Classical::Vmf { mu } => json!({ "mu": vecj(mu) }),
        Classical::FisherBingham { mu, a } => json!({ "mu": vecj(mu), "a": matrix_json(a)? }),
        Classical::Hyperboloid { kappa, xi } => json!({ "kappa": kappa, "xi": vecj(xi) }),
        Classical::Poincare { a, b, c } => json!({ "a": a, "b": b, "c": c }),
    })
}

pub fn classical_from_json(spec: &FamilySpec, v: &Value) -> Result<Classical> {
    let obj = match v {
        Value::Array(_) => return classical_from_flat(&spec.tag, &numbers(v, "values")?),
        Value::Object(o) => o,
        _ => return Err(Error::Schema("classical values must be an array or an object".into())),
    };
    let allowed: &[&str] = match spec.tag {
        FamilyTag::Bernoulli | FamilyTag::Categorical { .. } => &["s"],
        FamilyTag::Normal | FamilyTag::MvNormal { .. } => &["sigma", "mu"],
        FamilyTag::GammaLambda { .. } => &["k", "theta"],
        FamilyTag::Wishart { .. } => &["y", "alpha"],
        FamilyTag::VonMises => &["kappa", "mu"],
        FamilyTag::Vmf { .. } => &["mu"],
        FamilyTag::FisherBingham { .. } => &["mu", "a"],
        FamilyTag::Hyperboloid { .. } => &["kappa", "xi"],
        FamilyTag::Poincare => &["a", "b", "c"],
    };
    if let Some(k) = obj.keys().find(|k| !allowed.contains(&k.as_str())) {
        return Err(Error::Schema(format!(
            "unknown classical field '{k}' for {} (expected {allowed:?})",
            spec.name()
        )));
    }
    Ok(match spec.tag {
        FamilyTag::Bernoulli => Classical::Bernoulli { s: number(obj, "s")? },
        FamilyTag::Categorical { n } => Classical::Categorical { s: vector(obj, "s", n)?.as_slice().to_vec() },
        FamilyTag::Normal => Classical::Normal { sigma: number(obj, "sigma")?, mu: number(obj, "mu")? },
        FamilyTag::MvNormal { n } => Classical::MvNormal { sigma: matrix(obj, "sigma", n)?, mu: vector(obj, "mu", n)? },
        FamilyTag::GammaLambda { .. } => Classical::GammaLambda { k: number(obj, "k")?, theta: number(obj, "theta")? },
        FamilyTag::Wishart { n } => Classical::Wishart { y: matrix(obj, "y", n)?, alpha: number(obj, "alpha")? },
        FamilyTag::VonMises => Classical::VonMises { kappa: number(obj, "kappa")?, mu: number(obj, "mu")? },
        FamilyTag::Vmf { n } => Classical::Vmf { mu: vector(obj, "mu", n)? },
        FamilyTag::FisherBingham { n } => Classical::FisherBingham { mu: vector(obj, "mu", n)?, a: matrix(obj, "a", n)? },
        FamilyTag::Hyperboloid { n } => Classical::Hyperboloid { kappa: number(obj, "kappa")?, xi: vector(obj, "xi", n + 1)? },
        FamilyTag::Poincare => Classical::Poincare { a: number(obj, "a")?, b: number(obj, "b")?, c: number(obj, "c")? },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn named_classical_document() {
        let text = r#"{"schema_version":1,"family":"von_mises","parameterization":"classical","values":{"kappa":0,"mu":0}}"#;
        let (spec, theta) = ParameterDocument::from_json_str(text).unwrap().resolve().unwrap();
        assert_eq!(spec.tag, FamilyTag::VonMises);
        assert_eq!(theta.phi, vec![0.0, 0.0]);
    }

    #[test]
    fn flat_and_named_agree() {
        for tag in FamilyTag::defaults() {
            let spec = FamilySpec::new(tag).unwrap();
            for theta in spec.example_parameters() {
                let c = spec.to_classical(&theta).unwrap();
                let named = classical_to_json(&spec, &c).unwrap();
                let flat = json!(classical_to_flat(&c));
                assert_eq!(classical_from_json(&spec, &named).unwrap(), c);
                assert_eq!(classical_from_json(&spec, &flat).unwrap(), c);
                assert_eq!(classical_field_order(&tag).len(), classical_to_flat(&c).len());
            }
        }
    }

    #[test]
    fn rejects_bad_documents() {
        let bad = [
            r#"{"schema_version":2,"family":"normal","parameterization":"natural","values":[1,0,0]}"#,
            r#"{"schema_version":1,"family":"normal","parameterization":"natural","values":[1,0]}"#,
            r#"{"schema_version":1,"family":"normal","parameterization":"classical","values":{"sd":1,"mu":0}}"#,
            r#"{"schema_version":1,"family":"normal","parameterization":"moments","values":[1,0]}"#,
            r#"{"schema_version":1,"family":"normal","variant":{"n":2},"parameterization":"natural","values":[1,0,0]}"#,
        ];
        for text in bad {
            let r = ParameterDocument::from_json_str(text).and_then(|d| d.resolve());
            assert!(matches!(r, Err(Error::Schema(_)) | Err(Error::DimensionMismatch { .. })), "{text}: {r:?}");
        }
        let unknown = r#"{"schema_version":1,"family":"student_t","parameterization":"natural","values":[1]}"#;
        let r = ParameterDocument::from_json_str(unknown).unwrap().resolve();
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }
}
