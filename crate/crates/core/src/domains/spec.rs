//! Body specifications: builtin names and a small key–value file format.
//!
//! ```text
//! # comment
//! type = polytope            # polytope | ellipsoid | levelset | union | intersection | transformed
//! A = 1 0; -1 0; 0 1; 0 -1   # rows separated by ';', entries by spaces or commas
//! b = 1 1 1 1
//! witness = 0 0              # optional when the polytope is bounded
//! ```
//!
//! `ellipsoid` takes `center` and either `Q` or `radius`; `levelset` takes
//! `name = quartic | quartic_graph | paraboloid | lens` (plus `dim` for the
//! paraboloid); `union` and `intersection` list their members in `[part]`
//! sections; `transformed` takes `map` (d+1 rows) and one `[base]` section.
//! Sections do not nest.

use std::collections::BTreeMap;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use sha2::{Digest, Sha256};

use super::{Body, EllipsoidBody, HalfspacePolytope, IntersectionBody, LevelSetBody, UnionBody};
use crate::error::{Error, Result};
use crate::projective::ProjectiveMap;

/// A resolved body together with the text it was built from.
#[derive(Debug, Clone)]
pub struct BodySpec {
    pub body: Body,
    /// `builtin:<name>` or the file contents.
    pub source: String,
}

impl BodySpec {
    /// First 16 hex digits of the SHA-256 of the source text.
    pub fn hash(&self) -> String {
        spec_hash(&self.source)
    }
}

pub fn spec_hash(source: &str) -> String {
    let digest = Sha256::digest(source.as_bytes());
    hex::encode(&digest[..8])
}

pub const BUILTINS: &[&str] = &[
    "ball2", "ball3", "square", "triangle", "ellipse(a,b)", "quartic", "lshape", "frankelV(d)", "lens", "slab",
    "paraboloid",
];

/// Builtin name, or else a path to a spec file.
pub fn resolve(arg: &str) -> Result<BodySpec> {
    if let Some(body) = builtin(arg)? {
        return Ok(BodySpec { body, source: format!("builtin:{}", arg.trim()) });
    }
    let path = Path::new(arg);
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Spec { line: 0, message: format!("unknown builtin and unreadable file {arg:?}: {e}") })?;
    let body = parse(&text)?;
    Ok(BodySpec { body, source: text })
}

fn spec_err(line: usize, message: impl Into<String>) -> Error {
    Error::Spec { line, message: message.into() }
}

fn call_args(name: &str, s: &str) -> Option<Vec<f64>> {
    let rest = s.strip_prefix(name)?.trim();
    let inner = rest.strip_prefix('(')?.strip_suffix(')')?;
    inner.split(',').map(|t| t.trim().parse::<f64>().ok()).collect()
}

/// The builtin bodies; `Ok(None)` if `name` is not one.
pub fn builtin(name: &str) -> Result<Option<Body>> {
    let name = name.trim();
    let body = match name {
        "ball2" => EllipsoidBody::unit_ball(2).into(),
        "ball3" => EllipsoidBody::unit_ball(3).into(),
        "square" => HalfspacePolytope::cuboid(&[-1.0, -1.0], &[1.0, 1.0])?.into(),
        "triangle" => triangle().into(),
        "quartic" => LevelSetBody::quartic().into(),
        "lshape" => lshape(),
        "lens" => lens(),
        "slab" => HalfspacePolytope::new(
            DMatrix::from_row_slice(2, 2, &[1.0, 0.0, -1.0, 0.0]),
            DVector::from_vec(vec![1.0, 1.0]),
            DVector::zeros(2),
        )?
        .into(),
        "paraboloid" => LevelSetBody::paraboloid(2).into(),
        _ => {
            if let Some(args) = call_args("ellipse", name) {
                let [a, b] = args[..] else {
                    return Err(spec_err(1, "ellipse takes two semi-axes"));
                };
                if !(a > 0.0 && b > 0.0) {
                    return Err(spec_err(1, "ellipse semi-axes must be positive"));
                }
                EllipsoidBody::axis_aligned(DVector::zeros(2), &[a, b])?.into()
            } else if let Some(args) = call_args("frankelV", name) {
                let [d] = args[..] else {
                    return Err(spec_err(1, "frankelV takes a dimension"));
                };
                if !(d >= 1.0 && d.fract() == 0.0) {
                    return Err(spec_err(1, "frankelV dimension must be a positive integer"));
                }
                frankel_v(d as usize).into()
            } else {
                return Ok(None);
            }
        }
    };
    Ok(Some(body))
}

/// Equilateral triangle with barycenter 0 and circumradius 1.
pub fn triangle() -> HalfspacePolytope {
    let pts: Vec<DVector<f64>> = (0..3)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            DVector::from_vec(vec![t.cos(), t.sin()])
        })
        .collect();
    HalfspacePolytope::from_points_2d(&pts).expect("nondegenerate")
}

/// `(−1,1)² ∖ [0,1)²` as the union of two open rectangles; reflex vertex at 0.
pub fn lshape() -> Body {
    let bottom = HalfspacePolytope::cuboid(&[-1.0, -1.0], &[1.0, 0.0]).expect("valid");
    let left = HalfspacePolytope::cuboid(&[-1.0, -1.0], &[0.0, 1.0]).expect("valid");
    Body::Union(UnionBody::new(vec![bottom.into(), left.into()]).expect("valid"))
}

/// Intersection of the unit disks centred at `(±1/2, 0)`.
pub fn lens() -> Body {
    let a = EllipsoidBody::ball(DVector::from_vec(vec![0.5, 0.0]), 1.0).expect("valid");
    let b = EllipsoidBody::ball(DVector::from_vec(vec![-0.5, 0.0]), 1.0).expect("valid");
    Body::Intersection(IntersectionBody::new(vec![a.into(), b.into()], Some(DVector::zeros(2))).expect("valid"))
}

/// `(−1, 10)^d`, the truncation of `(−1, ∞)^d`.
pub fn frankel_v(d: usize) -> HalfspacePolytope {
    HalfspacePolytope::cuboid(&vec![-1.0; d], &vec![10.0; d]).expect("valid")
}

#[derive(Debug, Default)]
struct Section {
    header_line: usize,
    entries: BTreeMap<String, (usize, String)>,
}

impl Section {
    fn get(&self, key: &str) -> Option<(usize, &str)> {
        self.entries.get(key).map(|(l, v)| (*l, v.as_str()))
    }

    fn require(&self, key: &str) -> Result<(usize, &str)> {
        self.get(key).ok_or_else(|| spec_err(self.header_line, format!("missing key `{key}`")))
    }
}

fn parse_row(line: usize, s: &str) -> Result<Vec<f64>> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<f64>().map_err(|_| spec_err(line, format!("not a number: {t:?}"))))
        .collect()
}

fn parse_vector(line: usize, s: &str) -> Result<DVector<f64>> {
    let v = parse_row(line, s)?;
    if v.is_empty() {
        return Err(spec_err(line, "empty vector"));
    }
    Ok(DVector::from_vec(v))
}

fn parse_matrix(line: usize, s: &str) -> Result<DMatrix<f64>> {
    let rows: Vec<Vec<f64>> = s.split(';').map(|r| parse_row(line, r)).collect::<Result<_>>()?;
    let rows: Vec<Vec<f64>> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let Some(n) = rows.first().map(Vec::len) else {
        return Err(spec_err(line, "empty matrix"));
    };
    if rows.iter().any(|r| r.len() != n) {
        return Err(spec_err(line, "rows differ in length"));
    }
    Ok(DMatrix::from_fn(rows.len(), n, |i, j| rows[i][j]))
}

/// Parses a spec file; every error carries the offending line number.
pub fn parse(text: &str) -> Result<Body> {
    let mut top = Section { header_line: 1, ..Default::default() };
    let mut subs: Vec<(String, Section)> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        if let Some(name) = content.strip_prefix('[').and_then(|r| r.strip_suffix(']')) {
            let name = name.trim();
            if name != "part" && name != "base" {
                return Err(spec_err(line, format!("unknown section [{name}]")));
            }
            subs.push((name.to_string(), Section { header_line: line, ..Default::default() }));
            continue;
        }
        let Some((k, v)) = content.split_once('=') else {
            return Err(spec_err(line, "expected `key = value`"));
        };
        let key = k.trim().to_string();
        let target = match subs.last_mut() {
            Some((_, s)) => s,
            None => &mut top,
        };
        if target.entries.insert(key.clone(), (line, v.trim().to_string())).is_some() {
            return Err(spec_err(line, format!("duplicate key `{key}`")));
        }
    }
    let (tline, ty) = top.require("type")?;
    let children = |want: &str| -> Result<Vec<&Section>> {
        let mut out = Vec::new();
        for (name, s) in &subs {
            if name != want {
                return Err(spec_err(s.header_line, format!("section [{name}] not allowed for type {ty}")));
            }
            out.push(s);
        }
        if out.is_empty() {
            return Err(spec_err(tline, format!("type {ty} needs [{want}] sections")));
        }
        Ok(out)
    };
    match ty {
        "union" => {
            let parts = children("part")?.into_iter().map(build_simple).collect::<Result<Vec<_>>>()?;
            Ok(Body::Union(UnionBody::new(parts).map_err(|e| spec_err(tline, e.to_string()))?))
        }
        "intersection" => {
            let parts = children("part")?.into_iter().map(build_simple).collect::<Result<Vec<_>>>()?;
            let witness = match top.get("witness") {
                Some((l, v)) => Some(parse_vector(l, v)?),
                None => None,
            };
            Ok(Body::Intersection(IntersectionBody::new(parts, witness).map_err(|e| spec_err(tline, e.to_string()))?))
        }
        "transformed" => {
            let bases = children("base")?;
            if bases.len() != 1 {
                return Err(spec_err(bases[1].header_line, "exactly one [base] section"));
            }
            let base = build_simple(bases[0])?;
            let (ml, mv) = top.require("map")?;
            let m = parse_matrix(ml, mv)?;
            let d = base.dim();
            if m.shape() != (d + 1, d + 1) {
                return Err(spec_err(ml, format!("map must be {}×{}", d + 1, d + 1)));
            }
            let map = ProjectiveMap::new(m).map_err(|e| spec_err(ml, e.to_string()))?;
            base.transformed(map).map_err(|e| spec_err(ml, e.to_string()))
        }
        _ => {
            if let Some((_, s)) = subs.first() {
                return Err(spec_err(s.header_line, format!("type {ty} takes no sections")));
            }
            build_simple(&top)
        }
    }
}

fn build_simple(s: &Section) -> Result<Body> {
    let (tline, ty) = s.require("type")?;
    let wrap = |line: usize| move |e: Error| spec_err(line, e.to_string());
    match ty {
        "polytope" => {
            let (al, av) = s.require("A")?;
            let (bl, bv) = s.require("b")?;
            let a = parse_matrix(al, av)?;
            let b = parse_vector(bl, bv)?;
            if b.len() != a.nrows() {
                return Err(spec_err(bl, format!("b has {} entries but A has {} rows", b.len(), a.nrows())));
            }
            let (wl, witness) = match s.get("witness") {
                Some((l, v)) => (l, parse_vector(l, v)?),
                None => (tline, default_witness(&a, &b).ok_or_else(|| spec_err(tline, "unbounded polytope needs a `witness`"))?),
            };
            if witness.len() != a.ncols() {
                return Err(spec_err(wl, "witness dimension differs from A"));
            }
            Ok(HalfspacePolytope::new(a, b, witness).map_err(wrap(wl))?.into())
        }
        "ellipsoid" => {
            let (cl, cv) = s.require("center")?;
            let c = parse_vector(cl, cv)?;
            match (s.get("Q"), s.get("radius")) {
                (Some((ql, qv)), None) => {
                    let q = parse_matrix(ql, qv)?;
                    Ok(EllipsoidBody::new(c, q).map_err(wrap(ql))?.into())
                }
                (None, Some((rl, rv))) => {
                    let r: f64 = rv.trim().parse().map_err(|_| spec_err(rl, "radius must be a number"))?;
                    if !(r > 0.0) {
                        return Err(spec_err(rl, "radius must be positive"));
                    }
                    Ok(EllipsoidBody::ball(c, r).map_err(wrap(rl))?.into())
                }
                _ => Err(spec_err(tline, "ellipsoid needs exactly one of `Q`, `radius`")),
            }
        }
        "levelset" => {
            let (nl, name) = s.require("name")?;
            match name {
                "quartic" => Ok(LevelSetBody::quartic().into()),
                "quartic_graph" => Ok(LevelSetBody::quartic_graph().into()),
                "lens" => Ok(lens()),
                "paraboloid" => {
                    let d = match s.get("dim") {
                        Some((dl, dv)) => dv.trim().parse::<usize>().ok().filter(|d| *d >= 2).ok_or_else(|| spec_err(dl, "dim must be an integer ≥ 2"))?,
                        None => 2,
                    };
                    Ok(LevelSetBody::paraboloid(d).into())
                }
                other => Err(spec_err(nl, format!("unknown level set {other:?}"))),
            }
        }
        other => Err(spec_err(tline, format!("unknown or misplaced type {other:?}"))),
    }
}

/// Vertex average of `{Ax ≤ b}` when it is bounded, found by vertex enumeration.
fn default_witness(a: &DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    let d = a.ncols();
    let mut verts: Vec<DVector<f64>> = Vec::new();
    super::polytope::for_each_subset(a.nrows(), d, |rows| {
        let sub = DMatrix::from_fn(d, d, |i, j| a[(rows[i], j)]);
        let rhs = DVector::from_fn(d, |i, _| b[rows[i]]);
        if let Some(x) = sub.lu().solve(&rhs) {
            let scale = 1.0 + x.amax();
            if (a * &x - b).iter().all(|s| *s <= 1e-9 * scale) {
                verts.push(x);
            }
        }
    });
    if verts.len() <= d {
        return None;
    }
    let w = verts.iter().fold(DVector::zeros(d), |acc, v| acc + v) / verts.len() as f64;
    // the average only lies inside if the polytope is bounded
    let probe = HalfspacePolytope::new(a.clone(), b.clone(), w.clone()).ok()?;
    probe.is_bounded().then_some(w)
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::dvector;

    #[test]
    fn parses_polytope_without_witness() {
        let text = "# unit square\ntype = polytope\nA = 1 0; -1 0; 0 1; 0 -1\nb = 1, 1, 1, 1\n";
        let body = parse(text).unwrap();
        assert!(body.contains(&dvector![0.5, -0.5]));
        assert!(!body.contains(&dvector![1.5, 0.0]));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let text = "type = ellipsoid\ncenter = 0 0\n\nQ = 1 0; 0 -1\n";
        match parse(text) {
            Err(Error::Spec { line, .. }) => assert_eq!(line, 4),
            other => panic!("unexpected {other:?}"),
        }
        match parse("type = polytope\nA = 1 0; 0 x\nb = 1 1\n") {
            Err(Error::Spec { line, .. }) => assert_eq!(line, 2),
            other => panic!("unexpected {other:?}"),
        }
        match parse("type = polytope\nA = 1 0; -1 0\nb = 1 1\n") {
            Err(Error::Spec { line, message }) => {
                assert_eq!(line, 1);
                assert!(message.contains("witness"));
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn union_and_transformed_sections() {
        let text = "type = union\n[part]\ntype = polytope\nA = 1 0; -1 0; 0 1; 0 -1\nb = 1 1 0 1\n[part]\ntype = polytope\nA = 1 0; -1 0; 0 1; 0 -1\nb = 0 1 1 1\n";
        let l = parse(text).unwrap();
        assert!(l.contains(&dvector![0.5, -0.5]));
        assert!(!l.contains(&dvector![0.5, 0.5]));
        let t = "type = transformed\nmap = 1 0 0; 0 2 0; 0 0 1\n[base]\ntype = ellipsoid\ncenter = 0 0\nradius = 1\n";
        let e = parse(t).unwrap();
        assert!(e.contains(&dvector![1.9, 0.0]));
        assert!(!e.contains(&dvector![0.0, 1.1]));
    }

    #[test]
    fn builtins_resolve() {
        for name in ["ball2", "ball3", "square", "triangle", "ellipse(2,1)", "quartic", "lshape", "frankelV(3)", "lens", "slab"] {
            let s = resolve(name).unwrap();
            assert!(s.body.contains(&s.body.interior_point()), "{name}");
            assert_eq!(s.hash().len(), 16);
        }
        assert!(matches!(resolve("ellipse(2)"), Err(Error::Spec { .. })));
        assert!(matches!(resolve("no-such-body"), Err(Error::Spec { line: 0, .. })));
    }
}
