//! Plain-text SCM format.
//!
//! ```text
//! SCM 1
//! ambient <N>
//! dim <k>
//! vertices <V>
//! <x_1> ... <x_N>          (V lines)
//! simplices <C>
//! <mult> <v0> ... <vk> [norm <id>]   (C lines)
//! ```
//!
//! Tokens are whitespace separated and `#` starts a comment. Blank lines are ignored.

use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::{SimplicialCurrent, VertexSet};
use crate::error::{Error, Result};

struct Lines<'a> {
    inner: std::iter::Enumerate<std::str::Lines<'a>>,
    last: usize,
}

impl<'a> Lines<'a> {
    fn next_tokens(&mut self) -> Result<(usize, Vec<&'a str>)> {
        for (i, raw) in self.inner.by_ref() {
            let line = raw.split('#').next().unwrap_or("");
            let toks: Vec<&str> = line.split_whitespace().collect();
            if !toks.is_empty() {
                self.last = i + 1;
                return Ok((i + 1, toks));
            }
        }
        Err(Error::Parse {
            line: self.last + 1,
            msg: "unexpected end of file".into(),
        })
    }

    fn keyword(&mut self, key: &str) -> Result<(usize, usize)> {
        let (line, toks) = self.next_tokens()?;
        if toks.len() != 2 || toks[0] != key {
            return Err(Error::Parse {
                line,
                msg: format!("expected `{key} <count>`"),
            });
        }
        let n = toks[1].parse::<usize>().map_err(|_| Error::Parse {
            line,
            msg: format!("invalid {key} value {:?}", toks[1]),
        })?;
        Ok((line, n))
    }
}

pub fn parse_scm(text: &str) -> Result<SimplicialCurrent> {
    let mut lines = Lines {
        inner: text.lines().enumerate(),
        last: 0,
    };
    let (line, header) = lines.next_tokens()?;
    if header != ["SCM", "1"] {
        return Err(Error::Parse {
            line,
            msg: "malformed header, expected `SCM 1`".into(),
        });
    }
    let (line, ambient) = lines.keyword("ambient")?;
    if ambient == 0 {
        return Err(Error::Parse {
            line,
            msg: "ambient dimension must be positive".into(),
        });
    }
    let (line, dim) = lines.keyword("dim")?;
    if dim > ambient {
        return Err(Error::Parse {
            line,
            msg: format!("dim {dim} exceeds ambient {ambient}"),
        });
    }
    let (_, nv) = lines.keyword("vertices")?;
    let mut coords = Vec::with_capacity(nv * ambient);
    for _ in 0..nv {
        let (line, toks) = lines.next_tokens()?;
        if toks.len() != ambient {
            return Err(Error::Parse {
                line,
                msg: format!("expected {ambient} coordinates, found {}", toks.len()),
            });
        }
        for t in toks {
            let x: f64 = t.parse().map_err(|_| Error::Parse {
                line,
                msg: format!("invalid coordinate {t:?}"),
            })?;
            if !x.is_finite() {
                return Err(Error::Parse {
                    line,
                    msg: "non-finite coordinate".into(),
                });
            }
            coords.push(x);
        }
    }
    let verts = Arc::new(VertexSet::from_flat(ambient, coords)?);
    let (_, nc) = lines.keyword("simplices")?;
    let mut cells = Vec::with_capacity(nc);
    for _ in 0..nc {
        let (line, toks) = lines.next_tokens()?;
        let bad = |msg: String| Error::Parse { line, msg };
        let (body, norm) = match toks.iter().position(|&t| t == "norm") {
            Some(p) if p + 2 == toks.len() => (&toks[..p], Some(toks[p + 1].to_string())),
            Some(_) => return Err(bad("`norm` must be followed by exactly one id".into())),
            None => (&toks[..], None),
        };
        if body.len() != dim + 2 {
            return Err(bad(format!(
                "expected multiplicity and {} vertex indices",
                dim + 1
            )));
        }
        let mult: i64 = body[0]
            .parse()
            .map_err(|_| bad(format!("invalid multiplicity {:?}", body[0])))?;
        if mult == 0 {
            return Err(bad("zero multiplicity".into()));
        }
        let mut idx = Vec::with_capacity(dim + 1);
        for t in &body[1..] {
            let v: usize = t
                .parse()
                .map_err(|_| bad(format!("invalid vertex index {t:?}")))?;
            if v >= nv {
                return Err(bad(format!("vertex index {v} out of range (have {nv})")));
            }
            idx.push(v);
        }
        let mut sorted = idx.clone();
        sorted.sort_unstable();
        if sorted.windows(2).any(|w| w[0] == w[1]) {
            return Err(bad("repeated vertex in simplex".into()));
        }
        // validate geometry per line so errors carry a line number
        SimplicialCurrent::new(verts.clone(), dim, vec![(idx.clone(), 1)])
            .map_err(|e| bad(e.to_string()))?;
        cells.push((idx, mult, norm));
    }
    if let Ok((line, _)) = lines.next_tokens() {
        return Err(Error::Parse {
            line,
            msg: "trailing content after simplices".into(),
        });
    }
    SimplicialCurrent::with_norms(verts, dim, cells)
}

pub fn read_scm(path: impl AsRef<Path>) -> Result<SimplicialCurrent> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_scm(&text)
}

pub fn to_scm_string(t: &SimplicialCurrent) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "SCM 1");
    let _ = writeln!(out, "ambient {}", t.ambient_dim());
    let _ = writeln!(out, "dim {}", t.dim());
    let _ = writeln!(out, "vertices {}", t.vertices().len());
    for p in t.vertices().points() {
        let row: Vec<String> = p.iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    let _ = writeln!(out, "simplices {}", t.cells().len());
    for c in t.cells() {
        let _ = write!(out, "{}", c.mult);
        for v in &c.vertices {
            let _ = write!(out, " {v}");
        }
        if let Some(id) = &c.norm {
            let _ = write!(out, " norm {id}");
        }
        out.push('\n');
    }
    out
}

pub fn write_scm(t: &SimplicialCurrent, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    std::fs::write(path, to_scm_string(t)).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::current::mesh;

    #[test]
    fn round_trip_square() {
        let t = mesh::unit_square();
        let back = parse_scm(&to_scm_string(&t)).unwrap();
        assert!(back.chain_eq(&t));
        assert_eq!(back.vertices(), t.vertices());
    }

    #[test]
    fn round_trip_file_with_norm_tags() {
        let text = "SCM 1\nambient 2\ndim 1\nvertices 2\n0 0\n1 0.5\nsimplices 1\n-3 1 0 norm linf # tag\n";
        let t = parse_scm(text).unwrap();
        assert_eq!(t.cells()[0].mult, 3);
        assert_eq!(t.cells()[0].norm.as_deref(), Some("linf"));
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.scm");
        write_scm(&t, &p).unwrap();
        let again = read_scm(&p).unwrap();
        assert_eq!(again.cells(), t.cells());
    }

    #[test]
    fn zero_multiplicity_reports_line() {
        let text = "SCM 1\nambient 1\ndim 1\nvertices 2\n0\n1\nsimplices 1\n0 0 1\n";
        match parse_scm(text) {
            Err(Error::Parse { line, msg }) => {
                assert_eq!(line, 8);
                assert!(msg.contains("zero"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn out_of_range_index() {
        let text = "SCM 1\nambient 1\ndim 1\nvertices 2\n0\n1\nsimplices 1\n1 0 2\n";
        assert!(matches!(parse_scm(text), Err(Error::Parse { line: 8, .. })));
    }

    #[test]
    fn malformed_header() {
        assert!(matches!(
            parse_scm("SCM 2\n"),
            Err(Error::Parse { line: 1, .. })
        ));
    }
}
