//! JSON group definition files and the built-in catalog.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{format_rational, parse_rational, Rational};
use crate::lie_ring::LieRingDescription;
use crate::linalg::Matrix;
use crate::mgroup::{DeclaredBound, FinitePart, GroupElement, MGroupDescription};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupFile {
    pub name: String,
    pub dim_k: usize,
    pub rank_h: usize,
    pub delta: u64,
    pub nilpotency_class: usize,
    /// [i, j, k, c] with 1-based indices and i < j: [v_i, v_j] has c in coordinate k.
    pub structure_constants: Vec<(usize, usize, usize, String)>,
    /// Row-major, acting on column vectors.
    pub actions: Vec<Vec<Vec<String>>>,
    pub finite_part: Option<FinitePartFile>,
    pub generators: GeneratorsFile,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub relators: Vec<Vec<(usize, i64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub declared_bound: Option<DeclaredBound>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FinitePartFile {
    pub order: usize,
    pub table: Vec<Vec<usize>>,
    pub actions: Vec<Vec<Vec<String>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorsFile {
    /// The literal string "standard".
    Standard(String),
    Explicit(Vec<GeneratorFile>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GeneratorFile {
    /// m + n rationals: K coordinates then integer h exponents.
    Flat(Vec<String>),
    Full {
        k: Vec<String>,
        #[serde(default)]
        h: Vec<i64>,
        #[serde(default)]
        f: usize,
    },
}

fn rat(s: &str) -> Result<Rational> {
    parse_rational(s).ok_or_else(|| Error::Schema(format!("malformed rational {s:?}")))
}

fn matrix(rows: &[Vec<String>], m: usize, what: &str) -> Result<Matrix<Rational>> {
    if rows.len() != m || rows.iter().any(|r| r.len() != m) {
        return Err(Error::Schema(format!("{what} must be {m}x{m}")));
    }
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|x| rat(x)).collect::<Result<Vec<_>>>())
        .collect::<Result<Vec<_>>>()?;
    Ok(Matrix::from_rows(rows))
}

fn matrix_file(a: &Matrix<Rational>) -> Vec<Vec<String>> {
    a.rows().iter().map(|r| r.iter().map(format_rational).collect()).collect()
}

/// Splits a flat coordinate list (m K-coordinates, n integer exponents, optional finite index).
pub fn element_from_coords(g: &MGroupDescription, coords: &[Rational]) -> Result<GroupElement> {
    let (m, n) = (g.dim_k(), g.rank_h());
    let with_f = g.finite.is_some() && coords.len() == m + n + 1;
    if coords.len() != m + n && !with_f {
        return Err(Error::DimensionMismatch {
            expected: m + n,
            got: coords.len(),
        });
    }
    let to_int = |x: &Rational| -> Result<i64> {
        if !x.is_integer() {
            return Err(Error::Schema(format!("h exponent {} is not an integer", format_rational(x))));
        }
        i64::try_from(x.to_integer()).map_err(|_| Error::Schema("h exponent out of range".into()))
    };
    let h = coords[m..m + n].iter().map(to_int).collect::<Result<Vec<_>>>()?;
    let f = if with_f { to_int(&coords[m + n])? as usize } else { 0 };
    Ok(GroupElement {
        k: coords[..m].to_vec(),
        h,
        f,
    })
}

/// "0,0,1" style element string.
pub fn parse_element(g: &MGroupDescription, s: &str) -> Result<GroupElement> {
    let coords = s
        .split(',')
        .map(|t| rat(t.trim()))
        .collect::<Result<Vec<_>>>()?;
    element_from_coords(g, &coords)
}

impl GroupFile {
    pub fn into_description(self) -> Result<MGroupDescription> {
        let m = self.dim_k;
        let constants = self
            .structure_constants
            .iter()
            .map(|(i, j, k, c)| {
                if *i == 0 || *j == 0 || *k == 0 {
                    return Err(Error::Schema("structure constant indices are 1-based".into()));
                }
                Ok((i - 1, j - 1, k - 1, rat(c)?))
            })
            .collect::<Result<Vec<_>>>()?;
        let lie = LieRingDescription::new(m, constants, self.nilpotency_class, self.delta)
            .map_err(|e| Error::Schema(e.to_string()))?;
        if self.actions.len() != self.rank_h {
            return Err(Error::Schema(format!(
                "rank_h is {} but {} actions given",
                self.rank_h,
                self.actions.len()
            )));
        }
        let actions = self
            .actions
            .iter()
            .enumerate()
            .map(|(j, a)| matrix(a, m, &format!("action {}", j + 1)))
            .collect::<Result<Vec<_>>>()?;
        let finite = match &self.finite_part {
            None => None,
            Some(fp) => Some(FinitePart {
                order: fp.order,
                table: fp.table.clone(),
                actions: fp
                    .actions
                    .iter()
                    .map(|a| matrix(a, m, "finite part action"))
                    .collect::<Result<Vec<_>>>()?,
            }),
        };
        let generators = match &self.generators {
            GeneratorsFile::Standard(s) if s == "standard" => None,
            GeneratorsFile::Standard(s) => return Err(Error::Schema(format!("unknown generator set {s:?}"))),
            GeneratorsFile::Explicit(list) => Some(
                list.iter()
                    .map(|g| match g {
                        GeneratorFile::Flat(coords) => {
                            let coords = coords.iter().map(|x| rat(x)).collect::<Result<Vec<_>>>()?;
                            if coords.len() != m + self.rank_h {
                                return Err(Error::Schema(format!(
                                    "generator needs {} coordinates, got {}",
                                    m + self.rank_h,
                                    coords.len()
                                )));
                            }
                            let h = coords[m..]
                                .iter()
                                .map(|x| {
                                    x.is_integer()
                                        .then(|| i64::try_from(x.to_integer()).ok())
                                        .flatten()
                                        .ok_or_else(|| Error::Schema("h exponent must be an integer".into()))
                                })
                                .collect::<Result<Vec<_>>>()?;
                            Ok(GroupElement {
                                k: coords[..m].to_vec(),
                                h,
                                f: 0,
                            })
                        }
                        GeneratorFile::Full { k, h, f } => Ok(GroupElement {
                            k: k.iter().map(|x| rat(x)).collect::<Result<Vec<_>>>()?,
                            h: if h.is_empty() { vec![0; self.rank_h] } else { h.clone() },
                            f: *f,
                        }),
                    })
                    .collect::<Result<Vec<_>>>()?,
            ),
        };
        let mut g = MGroupDescription::new(self.name.clone(), lie, actions, finite, generators)
            .map_err(|e| Error::Schema(e.to_string()))?;
        for w in &self.relators {
            if w.iter().any(|&(i, _)| i == 0 || i > g.generators.len()) {
                return Err(Error::Schema("relator uses an unknown generator (indices are 1-based)".into()));
            }
        }
        g.relators = self
            .relators
            .iter()
            .map(|w| w.iter().map(|&(i, e)| (i - 1, e)).collect())
            .collect();
        g.declared_bound = self.declared_bound.clone();
        Ok(g)
    }

    pub fn from_description(g: &MGroupDescription, standard_generators: bool) -> Self {
        GroupFile {
            name: g.name.clone(),
            dim_k: g.dim_k(),
            rank_h: g.rank_h(),
            delta: g.lie.delta(),
            nilpotency_class: g.lie.class(),
            structure_constants: g
                .lie
                .structure()
                .iter()
                .map(|(i, j, k, c)| (i + 1, j + 1, k + 1, format_rational(c)))
                .collect(),
            actions: g.actions.iter().map(matrix_file).collect(),
            finite_part: g.finite.as_ref().map(|fp| FinitePartFile {
                order: fp.order,
                table: fp.table.clone(),
                actions: fp.actions.iter().map(matrix_file).collect(),
            }),
            generators: if standard_generators {
                GeneratorsFile::Standard("standard".into())
            } else {
                GeneratorsFile::Explicit(
                    g.generators
                        .iter()
                        .map(|x| GeneratorFile::Full {
                            k: x.k.iter().map(format_rational).collect(),
                            h: x.h.clone(),
                            f: x.f,
                        })
                        .collect(),
                )
            },
            relators: g
                .relators
                .iter()
                .map(|w| w.iter().map(|&(i, e)| (i + 1, e)).collect())
                .collect(),
            declared_bound: g.declared_bound.clone(),
        }
    }
}

/// Parses and validates a group definition.
pub fn parse_group_str(text: &str) -> Result<MGroupDescription> {
    let file: GroupFile = serde_json::from_str(text).map_err(|e| Error::Schema(e.to_string()))?;
    let g = file.into_description()?;
    let report = g.validate();
    if let Some(v) = report.first() {
        return Err(Error::Invalid(v.to_string()));
    }
    Ok(g)
}

pub fn parse_group_file(path: &std::path::Path) -> Result<MGroupDescription> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_group_str(&text)
}

pub const CATALOG: [(&str, &str); 5] = [
    ("z2_fibonacci", include_str!("../catalog/z2_fibonacci.json")),
    ("bs12", include_str!("../catalog/bs12.json")),
    ("heisenberg", include_str!("../catalog/heisenberg.json")),
    ("z2_trivial", include_str!("../catalog/z2_trivial.json")),
    ("heis_x_z2A", include_str!("../catalog/heis_x_z2A.json")),
];

/// Built-in group by name, with or without the ".json" suffix.
pub fn catalog(name: &str) -> Result<MGroupDescription> {
    let key = name.strip_suffix(".json").unwrap_or(name);
    let (_, text) = CATALOG
        .iter()
        .find(|(n, _)| *n == key)
        .ok_or_else(|| Error::Io(format!("no group file or catalog entry named {name:?}")))?;
    parse_group_str(text)
}

/// A path if it exists, otherwise a catalog name.
pub fn load_group(spec: &str) -> Result<MGroupDescription> {
    let path = std::path::Path::new(spec);
    if path.is_file() {
        parse_group_file(path)
    } else {
        catalog(spec)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::int;

    #[test]
    fn catalog_shapes() {
        let bs = catalog("bs12.json").unwrap();
        assert_eq!((bs.dim_k(), bs.rank_h(), bs.lie.delta()), (1, 1, 2));
        assert_eq!(bs.actions[0].data, vec![int(2)]);
        let h = catalog("heisenberg").unwrap();
        assert_eq!((h.dim_k(), h.rank_h(), h.lie.class()), (3, 0, 2));
        for (name, _) in CATALOG {
            let g = catalog(name).unwrap();
            assert!(g.validate().is_valid(), "{name}");
            assert!(g.declared_bound.is_some());
        }
    }

    #[test]
    fn relators_hold() {
        for (name, _) in CATALOG {
            let g = catalog(name).unwrap();
            assert!(!g.relators.is_empty());
            for w in &g.relators {
                assert!(g.word(w).unwrap().is_identity(), "{name}: {w:?}");
            }
        }
    }

    #[test]
    fn round_trip() {
        for (name, _) in CATALOG {
            let g = catalog(name).unwrap();
            for standard in [true, false] {
                let text = serde_json::to_string(&GroupFile::from_description(&g, standard)).unwrap();
                let back = parse_group_str(&text).unwrap();
                assert_eq!(back.generators, g.generators);
                assert_eq!(back.actions, g.actions);
                assert_eq!(back.lie, g.lie);
            }
        }
    }

    #[test]
    fn schema_errors() {
        let bad = include_str!("../catalog/bs12.json").replace("\"2\"", "\"1/0\"");
        assert!(matches!(parse_group_str(&bad), Err(Error::Schema(_))));
        let bad = include_str!("../catalog/bs12.json").replace("\"rank_h\": 1", "\"rank_h\": 2");
        assert!(matches!(parse_group_str(&bad), Err(Error::Schema(_))));
        let bad = include_str!("../catalog/bs12.json").replace("\"standard\"", "\"fancy\"");
        assert!(matches!(parse_group_str(&bad), Err(Error::Schema(_))));
        // action 3 with delta 2 is not invertible over Z[1/2]
        let bad = include_str!("../catalog/bs12.json").replace("[[\"2\"]]", "[[\"3\"]]");
        assert!(matches!(parse_group_str(&bad), Err(Error::Invalid(_))));
    }

    #[test]
    fn explicit_generators() {
        let text = include_str!("../catalog/heisenberg.json")
            .replace("\"standard\"", "[[\"1\", \"0\", \"0\"], {\"k\": [\"0\", \"1\", \"0\"]}]")
            .replace(
                "[[1, 1], [3, 1], [1, -1], [3, -1]],\n    [[2, 1], [3, 1], [2, -1], [3, -1]]",
                "[[1, 1], [1, -1]]",
            )
            .replace("[[1, 1], [2, 1], [1, -1], [2, -1], [3, -1]],", "");
        let g = parse_group_str(&text).unwrap();
        assert_eq!(g.generators.len(), 2);
        assert_eq!(g.generators[1].k, vec![int(0), int(1), int(0)]);
        let e = parse_element(&g, "0, 0, 1/2").unwrap();
        assert_eq!(e.k[2], crate::field::rational(1, 2));
        assert!(parse_element(&g, "0,1").is_err());
    }
}
