//! TOML descriptor files.
//!
//! Vectors are written as comma separated rationals, e.g. `"1, -1/2"`.

use std::path::Path;

use serde::Deserialize;

use super::{ensure_valid, Flags, HBlock, Ideal, QuotientLink, SphericalDescriptor};
use crate::cones::Subspace;
use crate::error::{Error, Result};
use crate::linalg::{self, QVec};
use crate::rootsys::{standard_datum, PositiveRoot, RootDatum};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct DatumSpec {
    series: Option<String>,
    rank: Option<usize>,
    multiplicity: Option<u32>,
    multiplicities: Option<Vec<u32>>,
    factors: Option<Vec<DatumSpec>>,
    simple_roots: Option<Vec<String>>,
    positive_roots: Option<Vec<String>>,
    gram: Option<Vec<String>>,
    #[serde(default)]
    central: usize,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
enum SigmaSpec {
    Keyword(String),
    Indices(Vec<usize>),
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct IdealSpec {
    label: String,
    dim: usize,
    #[serde(default = "yes")]
    simple: bool,
    #[serde(default)]
    compact: bool,
    coords: Vec<usize>,
    simple_roots: Vec<usize>,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct HBlockSpec {
    dim: usize,
    support: Vec<String>,
}

#[derive(Debug, Deserialize, Default)]
#[serde(deny_unknown_fields)]
struct FlagSpec {
    #[serde(default)]
    h_reductive: bool,
    #[serde(default)]
    unimodular: bool,
    #[serde(default)]
    symmetric: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct QuotientSpec {
    ideals: Vec<String>,
    descriptor: String,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct FileSpec {
    name: String,
    #[serde(default)]
    description: Option<String>,
    root_datum: DatumSpec,
    #[serde(default)]
    a_h: Vec<String>,
    sigma_u: SigmaSpec,
    monoid_generators: Vec<String>,
    #[serde(default)]
    ideals: Vec<IdealSpec>,
    #[serde(default)]
    h_blocks: Vec<HBlockSpec>,
    #[serde(default)]
    flags: FlagSpec,
    realization: Option<String>,
    #[serde(default)]
    quotients: Vec<QuotientSpec>,
}

fn vectors(field: &str, rows: &[String]) -> Result<Vec<QVec>> {
    rows.iter()
        .enumerate()
        .map(|(i, r)| linalg::parse_qvec(r).map_err(|e| Error::Parse(format!("{field}[{i}]: {e}"))))
        .collect()
}

fn build_datum(spec: &DatumSpec) -> Result<RootDatum> {
    let base = if let Some(factors) = &spec.factors {
        let fs = factors.iter().map(build_datum).collect::<Result<Vec<_>>>()?;
        RootDatum::product(&fs)?
    } else if let Some(series) = &spec.series {
        let rank = spec.rank.ok_or_else(|| Error::Parse("root_datum.rank is required with series".into()))?;
        standard_datum(series.parse()?, rank, None)?
    } else if let Some(simple) = &spec.simple_roots {
        let simple = vectors("root_datum.simple_roots", simple)?;
        let pos = spec
            .positive_roots
            .as_ref()
            .ok_or_else(|| Error::Parse("root_datum.positive_roots is required with simple_roots".into()))?;
        let pos = vectors("root_datum.positive_roots", pos)?;
        let gram = spec.gram.as_ref().ok_or_else(|| Error::Parse("root_datum.gram is required with simple_roots".into()))?;
        let gram = vectors("root_datum.gram", gram)?;
        RootDatum::new(simple, pos.into_iter().map(|c| PositiveRoot { covector: c, multiplicity: 1 }).collect(), gram)?
    } else {
        return Err(Error::Parse("root_datum needs one of `series`, `factors`, `simple_roots`".into()));
    };
    let with_mult = match (&spec.multiplicities, spec.multiplicity) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse("root_datum: give `multiplicity` or `multiplicities`, not both".into()))
        }
        (Some(ms), None) => base.with_multiplicities(ms)?,
        (None, Some(m)) => base.with_uniform_multiplicity(m)?,
        (None, None) => base,
    };
    Ok(if spec.central > 0 { with_mult.with_central(spec.central) } else { with_mult })
}

/// Parses and validates a descriptor from TOML text.
pub fn parse_descriptor_str(text: &str) -> Result<SphericalDescriptor> {
    let spec: FileSpec = toml::from_str(text).map_err(|e| Error::Parse(e.to_string().trim_end().to_string()))?;
    let datum = build_datum(&spec.root_datum)?;
    let n = datum.ambient_dim();
    let a_h_rows = vectors("a_h", &spec.a_h)?;
    if let Some(bad) = a_h_rows.iter().position(|r| r.len() != n) {
        return Err(Error::Parse(format!("a_h[{bad}]: expected {n} entries")));
    }
    let sigma_u = match spec.sigma_u {
        SigmaSpec::Keyword(k) if k == "all" => (0..datum.positive_roots().len()).collect(),
        SigmaSpec::Keyword(k) => return Err(Error::Parse(format!("sigma_u: expected \"all\" or a list of indices, got `{k}`"))),
        SigmaSpec::Indices(v) => v,
    };
    let desc = SphericalDescriptor {
        name: spec.name,
        description: spec.description.unwrap_or_default(),
        a_h: Subspace::new(n, &a_h_rows),
        sigma_u,
        monoid_generators: vectors("monoid_generators", &spec.monoid_generators)?,
        ideals: spec
            .ideals
            .into_iter()
            .map(|i| Ideal {
                label: i.label,
                dim: i.dim,
                simple: i.simple,
                compact: i.compact,
                coords: i.coords,
                simple_roots: i.simple_roots,
            })
            .collect(),
        h_blocks: spec.h_blocks.into_iter().map(|b| HBlock { dim: b.dim, support: b.support }).collect(),
        flags: Flags { h_reductive: spec.flags.h_reductive, unimodular: spec.flags.unimodular, symmetric: spec.flags.symmetric },
        realization: spec.realization,
        quotients: spec.quotients.into_iter().map(|q| QuotientLink { ideals: q.ideals, descriptor: q.descriptor }).collect(),
        datum,
    };
    ensure_valid(&desc)?;
    Ok(desc)
}

pub fn parse_descriptor(path: &Path) -> Result<SphericalDescriptor> {
    let text = std::fs::read_to_string(path)?;
    parse_descriptor_str(&text).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
name = "line"
root_datum = { series = "A", rank = 1 }
sigma_u = "all"
monoid_generators = ["2"]
"#;

    #[test]
    fn minimal_file() {
        let d = parse_descriptor_str(MINIMAL).unwrap();
        assert_eq!(d.real_rank(), 1);
        assert_eq!(d.sigma_u, vec![0]);
    }

    #[test]
    fn missing_sigma_u_names_field() {
        let text = MINIMAL.replace("sigma_u = \"all\"\n", "");
        match parse_descriptor_str(&text) {
            Err(Error::Parse(m)) => assert!(m.contains("sigma_u"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn parse_error_carries_line() {
        let text = MINIMAL.replace("monoid_generators = [\"2\"]", "monoid_generators = [\"2\"");
        match parse_descriptor_str(&text) {
            Err(Error::Parse(m)) => assert!(m.contains("line"), "{m}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_generator_is_validation_error() {
        let text = r#"
name = "bad"
root_datum = { factors = [{ series = "A", rank = 1 }, { series = "A", rank = 1 }] }
a_h = ["1, -1"]
sigma_u = "all"
monoid_generators = ["2, 0"]
"#;
        match parse_descriptor_str(text) {
            Err(Error::Validation(v)) => assert!(v[0].contains("monoid generator 0"), "{v:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn explicit_datum() {
        let text = r#"
name = "explicit"
sigma_u = [0]
monoid_generators = ["1"]
[root_datum]
simple_roots = ["1"]
positive_roots = ["1"]
gram = ["1"]
"#;
        let d = parse_descriptor_str(text).unwrap();
        assert_eq!(d.datum.rank(), 1);
    }
}
