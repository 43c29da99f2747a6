use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::matrix::DEFAULT_CLOSURE_CAP;

/// How a group is realized. Parsed from and printed as the group-spec mini-grammar:
///
/// ```text
/// metacyclic:p=<prime>,m=<int>,n=<int>,lambda=<int>
/// cayley:<path>
/// matrix:p=<prime>,dim=<int>,gens=<row-major lists separated by ';'>,cap=<int>
/// ```
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroupDescription {
    Metacyclic {
        p: u64,
        m: u32,
        n: u32,
        lambda: u64,
    },
    CayleyTable {
        /// The path this table was read from, or an `inline:` label.
        label: String,
        table: Vec<Vec<u64>>,
    },
    MatrixClosure {
        p: u64,
        dim: usize,
        generators: Vec<Vec<u64>>,
        cap: usize,
    },
}

/// On-disk Cayley table: `{"order": N, "table": [[...], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct CayleyFile {
    pub order: usize,
    pub table: Vec<Vec<u64>>,
}

impl GroupDescription {
    pub fn metacyclic(p: u64, m: u32, n: u32, lambda: u64) -> Self {
        GroupDescription::Metacyclic { p, m, n, lambda }
    }

    pub fn cayley_inline(table: Vec<Vec<u64>>) -> Self {
        GroupDescription::CayleyTable {
            label: format!("inline:order={}", table.len()),
            table,
        }
    }

    pub fn matrix(p: u64, dim: usize, generators: Vec<Vec<u64>>) -> Self {
        GroupDescription::MatrixClosure {
            p,
            dim,
            generators,
            cap: DEFAULT_CLOSURE_CAP,
        }
    }

    /// Upper unitriangular 3×3 matrices over `F_p`.
    pub fn heisenberg(p: u64) -> Self {
        Self::matrix(
            p,
            3,
            vec![
                vec![1, 1, 0, 0, 1, 0, 0, 0, 1],
                vec![1, 0, 0, 0, 1, 1, 0, 0, 1],
            ],
        )
    }

    /// `Z/n × Z/n` as a Cayley table, element `(i, j)` at index `i·n + j`.
    pub fn abelian_square(n: u64) -> Self {
        let n = n as usize;
        let table = (0..n * n)
            .map(|g| {
                let (a, b) = (g / n, g % n);
                (0..n * n)
                    .map(|h| {
                        let (c, d) = (h / n, h % n);
                        (((a + c) % n) * n + (b + d) % n) as u64
                    })
                    .collect()
            })
            .collect();
        GroupDescription::CayleyTable {
            label: format!("inline:abelian-square:{n}"),
            table,
        }
    }

    /// `Z/n` as a Cayley table.
    pub fn cyclic(n: u64) -> Self {
        let table = (0..n)
            .map(|i| (0..n).map(|j| (i + j) % n).collect())
            .collect();
        GroupDescription::CayleyTable {
            label: format!("inline:cyclic:{n}"),
            table,
        }
    }

    /// Dihedral group of order `2n`: `r^i` at index `i`, `s·r^i` at index `n + i`.
    pub fn dihedral(n: u64) -> Self {
        let decode = |g: u64| (g / n, g % n);
        let table = (0..2 * n)
            .map(|g| {
                let (f, i) = decode(g);
                (0..2 * n)
                    .map(|h| {
                        let (f2, j) = decode(h);
                        // s^f r^i s^f2 r^j = s^(f+f2) r^(±i + j)
                        let i2 = if f2 == 1 { (n - i) % n } else { i };
                        ((f + f2) % 2) * n + (i2 + j) % n
                    })
                    .collect()
            })
            .collect();
        GroupDescription::CayleyTable {
            label: format!("inline:dihedral:{}", 2 * n),
            table,
        }
    }

    /// The quaternion group: index `2u + s` is `(-1)^s` times unit `u` of `1, i, j, k`.
    pub fn quaternion8() -> Self {
        // unit products (sign, unit) for 1, i, j, k
        const UNITS: [[(u64, u64); 4]; 4] = [
            [(0, 0), (0, 1), (0, 2), (0, 3)],
            [(0, 1), (1, 0), (0, 3), (1, 2)],
            [(0, 2), (1, 3), (1, 0), (0, 1)],
            [(0, 3), (0, 2), (1, 1), (1, 0)],
        ];
        let table = (0..8u64)
            .map(|g| {
                (0..8u64)
                    .map(|h| {
                        let (s, u) = UNITS[(g / 2) as usize][(h / 2) as usize];
                        2 * u + (s + g % 2 + h % 2) % 2
                    })
                    .collect()
            })
            .collect();
        GroupDescription::CayleyTable {
            label: "inline:quaternion:8".to_string(),
            table,
        }
    }

    pub fn load_cayley(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let file: CayleyFile = serde_json::from_str(&text)?;
        if file.order != file.table.len() {
            return Err(Error::InvalidSpec(format!(
                "cayley file declares order {} but has {} rows",
                file.order,
                file.table.len()
            )));
        }
        Ok(GroupDescription::CayleyTable {
            label: path.display().to_string(),
            table: file.table,
        })
    }
}

fn parse_fields(body: &str) -> Result<Vec<(String, String)>> {
    // values of `gens` contain commas; a token without '=' continues the previous field
    let mut fields: Vec<(String, String)> = Vec::new();
    for token in body.split(',') {
        match token.split_once('=') {
            Some((k, v)) => fields.push((k.trim().to_string(), v.trim().to_string())),
            None => match fields.last_mut() {
                Some((_, v)) => {
                    v.push(',');
                    v.push_str(token.trim());
                }
                None => return Err(Error::InvalidSpec(format!("dangling token '{token}'"))),
            },
        }
    }
    Ok(fields)
}

fn field<'a>(fields: &'a [(String, String)], key: &str) -> Result<&'a str> {
    fields
        .iter()
        .find(|(k, _)| k == key)
        .map(|(_, v)| v.as_str())
        .ok_or_else(|| Error::InvalidSpec(format!("missing field '{key}'")))
}

fn number<T: FromStr>(fields: &[(String, String)], key: &str) -> Result<T> {
    let v = field(fields, key)?;
    v.parse().map_err(|_| {
        Error::InvalidSpec(format!(
            "field '{key}' is not a non-negative integer: '{v}'"
        ))
    })
}

fn reject_unknown(fields: &[(String, String)], known: &[&str]) -> Result<()> {
    match fields.iter().find(|(k, _)| !known.contains(&k.as_str())) {
        Some((k, _)) => Err(Error::InvalidSpec(format!("unknown field '{k}'"))),
        None => Ok(()),
    }
}

impl FromStr for GroupDescription {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, body) = s
            .split_once(':')
            .ok_or_else(|| Error::InvalidSpec(format!("expected '<kind>:...', got '{s}'")))?;
        match kind.trim() {
            "metacyclic" => {
                let fields = parse_fields(body)?;
                reject_unknown(&fields, &["p", "m", "n", "lambda"])?;
                Ok(GroupDescription::Metacyclic {
                    p: number(&fields, "p")?,
                    m: number(&fields, "m")?,
                    n: number(&fields, "n")?,
                    lambda: number(&fields, "lambda")?,
                })
            }
            "cayley" => Self::load_cayley(Path::new(body.trim())),
            "matrix" => {
                let fields = parse_fields(body)?;
                reject_unknown(&fields, &["p", "dim", "gens", "cap"])?;
                let generators = field(&fields, "gens")?
                    .split(';')
                    .map(|g| {
                        g.split(',')
                            .map(|v| {
                                v.trim().parse::<u64>().map_err(|_| {
                                    Error::InvalidSpec(format!("bad matrix entry '{v}'"))
                                })
                            })
                            .collect::<Result<Vec<u64>>>()
                    })
                    .collect::<Result<Vec<_>>>()?;
                let cap = if fields.iter().any(|(k, _)| k == "cap") {
                    number(&fields, "cap")?
                } else {
                    DEFAULT_CLOSURE_CAP
                };
                Ok(GroupDescription::MatrixClosure {
                    p: number(&fields, "p")?,
                    dim: number(&fields, "dim")?,
                    generators,
                    cap,
                })
            }
            other => Err(Error::InvalidSpec(format!("unknown group kind '{other}'"))),
        }
    }
}

impl fmt::Display for GroupDescription {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupDescription::Metacyclic { p, m, n, lambda } => {
                write!(f, "metacyclic:p={p},m={m},n={n},lambda={lambda}")
            }
            GroupDescription::CayleyTable { label, .. } => write!(f, "cayley:{label}"),
            GroupDescription::MatrixClosure {
                p,
                dim,
                generators,
                cap,
            } => {
                let gens: Vec<String> = generators
                    .iter()
                    .map(|g| g.iter().map(u64::to_string).collect::<Vec<_>>().join(","))
                    .collect();
                write!(
                    f,
                    "matrix:p={p},dim={dim},gens={},cap={cap}",
                    gens.join(";")
                )
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn metacyclic_round_trip() {
        let d: GroupDescription = "metacyclic:p=5,m=2,n=2,lambda=6".parse().unwrap();
        assert_eq!(d, GroupDescription::metacyclic(5, 2, 2, 6));
        assert_eq!(d.to_string(), "metacyclic:p=5,m=2,n=2,lambda=6");
    }

    #[test]
    fn matrix_round_trip() {
        let s = "matrix:p=5,dim=3,gens=1,1,0,0,1,0,0,0,1;1,0,0,0,1,1,0,0,1,cap=1000000";
        let d: GroupDescription = s.parse().unwrap();
        assert_eq!(d, GroupDescription::heisenberg(5));
        assert_eq!(d.to_string(), s);
        let no_cap: GroupDescription = "matrix:p=5,dim=3,gens=1,1,0,0,1,0,0,0,1;1,0,0,0,1,1,0,0,1"
            .parse()
            .unwrap();
        assert_eq!(no_cap, d);
    }

    #[test]
    fn parse_errors() {
        for bad in [
            "metacyclic:p=5,m=2,n=2",
            "metacyclic:p=5,m=2,n=2,lambda=x",
            "metacyclic:p=5,m=2,n=2,lambda=6,q=1",
            "torus:p=5",
            "no-colon",
            "matrix:p=5,dim=2,gens=1,0,0,z",
        ] {
            assert!(bad.parse::<GroupDescription>().is_err(), "{bad}");
        }
    }

    #[test]
    fn cayley_file_round_trip() {
        let dir = std::env::temp_dir().join(format!("cayley-{}", std::process::id()));
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("z3.json");
        std::fs::write(&path, r#"{"order":3,"table":[[0,1,2],[1,2,0],[2,0,1]]}"#).unwrap();
        let d: GroupDescription = format!("cayley:{}", path.display()).parse().unwrap();
        match &d {
            GroupDescription::CayleyTable { table, .. } => assert_eq!(table.len(), 3),
            _ => panic!("wrong kind"),
        }
        assert_eq!(d.to_string(), format!("cayley:{}", path.display()));
        std::fs::write(&path, r#"{"order":4,"table":[[0]]}"#).unwrap();
        assert!(format!("cayley:{}", path.display())
            .parse::<GroupDescription>()
            .is_err());
    }
}
