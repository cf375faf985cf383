//! JSON documents for bodies, ellipsoids and their certificates. Numbers
//! are written in exponent form with 17 significant digits.

use std::str::FromStr;

use serde_json::{Map, Number, Value};

use super::HarnessError;
use crate::bodies::{BallHull, ConvexBody, Ellipsoid, HPolytope, KEllipsoid, VPolytope};
use crate::constructions::{
    construction_polytope, Certificate, Construction, Enclosing, MinkowskiCertificate, Position, ScalarParams,
};
use crate::ellipsoid::JohnDecomposition;
use crate::linalg::{Matrix, Vector};

/// A body together with whatever was recorded about its origin.
#[derive(Debug, Clone, PartialEq)]
pub struct BodyFile {
    pub body: ConvexBody,
    pub family: Option<String>,
    pub params: Option<ScalarParams>,
    pub certificate: Option<Certificate>,
}

impl BodyFile {
    pub fn bare(body: ConvexBody) -> Self {
        Self { body, family: None, params: None, certificate: None }
    }
}

impl From<Construction> for BodyFile {
    fn from(c: Construction) -> Self {
        Self {
            body: c.body,
            family: Some(c.family.to_string()),
            params: Some(c.params),
            certificate: Some(c.certificate),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Document {
    Body(BodyFile),
    Ellipsoid(Ellipsoid),
}

pub fn number(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    Number::from_str(&format!("{x:.16e}")).map(Value::Number).unwrap_or(Value::Null)
}

pub fn vector(v: &Vector) -> Value {
    Value::Array(v.iter().map(|&x| number(x)).collect())
}

pub fn vectors(vs: &[Vector]) -> Value {
    Value::Array(vs.iter().map(vector).collect())
}

pub fn rows(m: &Matrix) -> Value {
    Value::Array(m.row_iter().map(|r| Value::Array(r.iter().map(|&x| number(x)).collect())).collect())
}

fn columns(m: &Matrix) -> Value {
    Value::Array(m.column_iter().map(|c| Value::Array(c.iter().map(|&x| number(x)).collect())).collect())
}

pub fn object(fields: Vec<(&str, Value)>) -> Value {
    Value::Object(fields.into_iter().map(|(k, v)| (k.to_string(), v)).collect::<Map<_, _>>())
}

pub fn kball_json(e: &KEllipsoid) -> Value {
    object(vec![("center", vector(e.center())), ("basis", columns(e.basis())), ("axes", rows(e.axes()))])
}

pub fn ellipsoid_json(e: &Ellipsoid) -> Value {
    object(vec![
        ("type", Value::from("ellipsoid")),
        ("dim", Value::from(e.dim())),
        ("center", vector(e.center())),
        ("shape", rows(e.shape())),
    ])
}

pub fn decomposition_json(d: &JohnDecomposition) -> Value {
    object(vec![
        ("contacts", vectors(&d.contacts)),
        ("weights", Value::Array(d.weights.iter().map(|&w| number(w)).collect())),
    ])
}

fn params_json(p: &ScalarParams) -> Value {
    let mut m = vec![("n", Value::from(p.n))];
    if let Some(k) = p.k {
        m.push(("k", Value::from(k)));
    }
    for (name, v) in [("s", p.s), ("t", p.t), ("tau", p.tau)] {
        if let Some(x) = v {
            m.push((name, number(x)));
        }
    }
    if let Some(j) = &p.j {
        m.push(("j", Value::from(j.clone())));
    }
    object(m)
}

fn certificate_json(c: &Certificate) -> Value {
    let mut m = vec![
        ("position", Value::from(c.position.name())),
        ("contacts", vectors(&c.decomposition.contacts)),
        ("weights", Value::Array(c.decomposition.weights.iter().map(|&w| number(w)).collect())),
    ];
    if let Some(e) = &c.kball {
        m.push(("kball", kball_json(e)));
    }
    if let Some(e) = &c.enclosing {
        m.push(("enclosing", object(vec![("j", Value::from(e.j.clone())), ("tau", number(e.tau))])));
    }
    if !c.inner_points.is_empty() {
        m.push(("inner_points", vectors(&c.inner_points)));
    }
    if let Some(s) = c.john_asymmetry {
        m.push(("john_asymmetry", number(s)));
    }
    if let Some(mk) = &c.minkowski {
        m.push((
            "minkowski",
            object(vec![
                ("center", vector(&mk.center)),
                ("value", number(mk.value)),
                ("equality_directions", vectors(&mk.equality_directions)),
            ]),
        ));
    }
    object(m)
}

pub fn body_json(f: &BodyFile) -> Value {
    let b = &f.body;
    let mut m = vec![("type", Value::from(b.kind())), ("dim", Value::from(b.dim()))];
    match b {
        ConvexBody::V(p) => m.push(("vertices", vectors(p.vertices()))),
        ConvexBody::H(p) => m.push((
            "halfspaces",
            Value::Array(
                p.halfspaces()
                    .map(|(a, off)| object(vec![("a", vector(a)), ("b", number(off))]))
                    .collect(),
            ),
        )),
        ConvexBody::Ball(h) => {
            m.push(("center", vector(h.center())));
            m.push(("radius", number(h.radius())));
            m.push(("apexes", vectors(h.apexes())));
        }
    }
    if let Some(fam) = &f.family {
        m.push(("family", Value::from(fam.clone())));
    }
    if let Some(p) = &f.params {
        m.push(("params", params_json(p)));
    }
    if let Some(c) = &f.certificate {
        m.push(("certificate", certificate_json(c)));
    }
    object(m)
}

pub fn to_string(v: &Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

/// A JSON node together with its path, so that every error names the
/// offending field.
struct Node<'a> {
    value: &'a Value,
    path: String,
}

fn bad(path: &str, message: impl Into<String>) -> HarnessError {
    HarnessError::Format { field: path.to_string(), message: message.into() }
}

impl<'a> Node<'a> {
    fn child(&self, name: &str) -> String {
        if self.path.is_empty() {
            name.to_string()
        } else {
            format!("{}.{name}", self.path)
        }
    }

    fn get(&self, name: &str) -> Option<Node<'a>> {
        let value = self.value.get(name)?;
        Some(Node { value, path: self.child(name) })
    }

    fn required(&self, name: &str) -> Result<Node<'a>, HarnessError> {
        self.get(name).ok_or_else(|| bad(&self.child(name), "missing field"))
    }

    fn items(&self) -> Result<Vec<Node<'a>>, HarnessError> {
        let items = self.value.as_array().ok_or_else(|| bad(&self.path, "expected an array"))?;
        Ok(items
            .iter()
            .enumerate()
            .map(|(i, value)| Node { value, path: format!("{}[{i}]", self.path) })
            .collect())
    }

    fn f64(&self) -> Result<f64, HarnessError> {
        self.value
            .as_f64()
            .filter(|x| x.is_finite())
            .ok_or_else(|| bad(&self.path, "expected a finite number"))
    }

    fn usize(&self) -> Result<usize, HarnessError> {
        self.value
            .as_u64()
            .map(|x| x as usize)
            .ok_or_else(|| bad(&self.path, "expected a nonnegative integer"))
    }

    fn str(&self) -> Result<&'a str, HarnessError> {
        self.value.as_str().ok_or_else(|| bad(&self.path, "expected a string"))
    }

    fn vector(&self, dim: usize) -> Result<Vector, HarnessError> {
        let items = self.items()?;
        if items.len() != dim {
            return Err(bad(&self.path, format!("expected {dim} coordinates, got {}", items.len())));
        }
        items.iter().map(Node::f64).collect::<Result<Vec<_>, _>>().map(Vector::from_vec)
    }

    fn vectors(&self, dim: usize) -> Result<Vec<Vector>, HarnessError> {
        self.items()?.iter().map(|v| v.vector(dim)).collect()
    }

    fn indices(&self) -> Result<Vec<usize>, HarnessError> {
        self.items()?.iter().map(Node::usize).collect()
    }

    fn geom(&self) -> impl Fn(crate::error::GeomError) -> HarnessError + '_ {
        move |e| bad(&self.path, e.to_string())
    }
}

fn square_rows(node: &Node, k: usize) -> Result<Matrix, HarnessError> {
    let rs = node.vectors(k)?;
    if rs.len() != k {
        return Err(bad(&node.path, format!("expected {k} rows, got {}", rs.len())));
    }
    Ok(Matrix::from_fn(k, k, |i, j| rs[i][j]))
}

fn parse_kball(node: &Node, n: usize) -> Result<KEllipsoid, HarnessError> {
    let center = node.required("center")?.vector(n)?;
    let basis_node = node.required("basis")?;
    let cols = basis_node.vectors(n)?;
    if cols.is_empty() || cols.len() > n {
        return Err(bad(&basis_node.path, format!("expected 1 to {n} columns")));
    }
    let axes = square_rows(&node.required("axes")?, cols.len())?;
    KEllipsoid::new(center, Matrix::from_columns(&cols), axes).map_err(node.geom())
}

fn parse_params(node: &Node) -> Result<ScalarParams, HarnessError> {
    let mut p = ScalarParams::new(node.required("n")?.usize()?);
    p.k = node.get("k").map(|x| x.usize()).transpose()?;
    p.s = node.get("s").map(|x| x.f64()).transpose()?;
    p.t = node.get("t").map(|x| x.f64()).transpose()?;
    p.tau = node.get("tau").map(|x| x.f64()).transpose()?;
    p.j = node.get("j").map(|x| x.indices()).transpose()?;
    Ok(p)
}

fn parse_certificate(node: &Node, n: usize) -> Result<Certificate, HarnessError> {
    let position = match node.get("position") {
        None => Position::John,
        Some(p) => match p.str()? {
            "john" => Position::John,
            "loewner" => Position::Loewner,
            other => return Err(bad(&p.path, format!("unknown position '{other}'"))),
        },
    };
    let contacts = node.required("contacts")?.vectors(n)?;
    let weights = node.required("weights")?.vector(contacts.len())?.iter().copied().collect();
    let mut cert = Certificate::new(position, JohnDecomposition { contacts, weights });
    cert.kball = node.get("kball").map(|k| parse_kball(&k, n)).transpose()?;
    if let Some(e) = node.get("enclosing") {
        let j = e.required("j")?.indices()?;
        let tau = e.required("tau")?.f64()?;
        let (polytope, _) = construction_polytope(&j, tau, n).map_err(e.geom())?;
        cert.enclosing = Some(Enclosing { j, tau, polytope });
    }
    if let Some(p) = node.get("inner_points") {
        cert.inner_points = p.vectors(n)?;
    }
    cert.john_asymmetry = node.get("john_asymmetry").map(|s| s.f64()).transpose()?;
    if let Some(m) = node.get("minkowski") {
        cert.minkowski = Some(MinkowskiCertificate {
            center: m.required("center")?.vector(n)?,
            value: m.required("value")?.f64()?,
            equality_directions: m.required("equality_directions")?.vectors(n)?,
        });
    }
    Ok(cert)
}

pub fn parse_document(text: &str) -> Result<Document, HarnessError> {
    let value: Value = serde_json::from_str(text).map_err(|e| bad("<document>", e.to_string()))?;
    if !value.is_object() {
        return Err(bad("<document>", "expected a JSON object"));
    }
    let root = Node { value: &value, path: String::new() };
    let kind = root.required("type")?.str()?;
    let n = root.required("dim")?.usize()?;
    if n == 0 {
        return Err(bad("dim", "dimension must be positive"));
    }
    let body: ConvexBody = match kind {
        "vpolytope" => {
            let node = root.required("vertices")?;
            VPolytope::new(node.vectors(n)?).map_err(node.geom())?.into()
        }
        "hpolytope" => {
            let node = root.required("halfspaces")?;
            let mut normals = Vec::new();
            let mut offsets = Vec::new();
            for h in node.items()? {
                normals.push(h.required("a")?.vector(n)?);
                offsets.push(h.required("b")?.f64()?);
            }
            HPolytope::new(normals, offsets).map_err(node.geom())?.into()
        }
        "ballhull" => {
            let center = root.required("center")?.vector(n)?;
            let radius = root.required("radius")?;
            let apexes = root.get("apexes").map(|a| a.vectors(n)).transpose()?.unwrap_or_default();
            BallHull::new(center, radius.f64()?, apexes).map_err(radius.geom())?.into()
        }
        "ellipsoid" => {
            let center = root.required("center")?.vector(n)?;
            let shape = root.required("shape")?;
            return Ellipsoid::new(center, square_rows(&shape, n)?).map(Document::Ellipsoid).map_err(shape.geom());
        }
        other => {
            return Err(bad(
                "type",
                format!("unknown type '{other}', expected vpolytope, hpolytope, ballhull or ellipsoid"),
            ))
        }
    };
    let family = root.get("family").map(|f| f.str().map(str::to_string)).transpose()?;
    let params = root.get("params").map(|p| parse_params(&p)).transpose()?;
    let certificate = root.get("certificate").map(|c| parse_certificate(&c, n)).transpose()?;
    let body = match (body, &certificate) {
        (ConvexBody::Ball(b), Some(c)) => ConvexBody::Ball(b.with_contacts(c.decomposition.contacts.clone())),
        (b, _) => b,
    };
    Ok(Document::Body(BodyFile { body, family, params, certificate }))
}

pub fn parse_body(text: &str) -> Result<BodyFile, HarnessError> {
    match parse_document(text)? {
        Document::Body(b) => Ok(b),
        Document::Ellipsoid(_) => Err(bad("type", "an ellipsoid is not accepted here; expected a body")),
    }
}

pub fn read_body(path: &std::path::Path) -> Result<BodyFile, HarnessError> {
    let text = std::fs::read_to_string(path).map_err(|e| HarnessError::Io(format!("{}: {e}", path.display())))?;
    parse_body(&text)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{construct, rounding_body};

    #[test]
    fn roundtrip_keeps_every_bit() {
        for c in [
            rounding_body(3, 2.2).unwrap(),
            construct("high-asym", &ScalarParams { k: Some(2), s: Some(3.5), ..ScalarParams::new(4) }, Position::John)
                .unwrap(),
            construct("polytope", &ScalarParams { tau: Some(0.8), ..ScalarParams::new(3) }, Position::John).unwrap(),
        ] {
            let f = BodyFile::from(c);
            let back = parse_body(&to_string(&body_json(&f))).unwrap();
            assert_eq!(back, f);
        }
    }

    #[test]
    fn numbers_have_seventeen_digits() {
        let s = number(0.1).to_string();
        assert_eq!(s, "1.0000000000000001e-1");
        assert_eq!(number(f64::NAN), Value::Null);
    }

    #[test]
    fn errors_name_the_field() {
        let cases = [
            ("{", "<document>"),
            (r#"{"dim": 2}"#, "type"),
            (r#"{"type": "vpolytope", "dim": 2, "vertices": [[0, 0], [1, 0], [0, "x"]]}"#, "vertices[2][1]"),
            (r#"{"type": "hpolytope", "dim": 2, "halfspaces": [{"a": [1, 0]}]}"#, "halfspaces[0].b"),
            (r#"{"type": "ballhull", "dim": 2, "center": [0, 0], "radius": -1}"#, "radius"),
            (r#"{"type": "cone", "dim": 2}"#, "type"),
        ];
        for (text, field) in cases {
            match parse_document(text) {
                Err(HarnessError::Format { field: f, .. }) => assert_eq!(f, field, "{text}"),
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn ellipsoid_documents() {
        let e = Ellipsoid::new(Vector::from_vec(vec![1.0, 2.0]), Matrix::from_row_slice(2, 2, &[2.0, 0.5, 0.5, 1.0]))
            .unwrap();
        let back = parse_document(&to_string(&ellipsoid_json(&e))).unwrap();
        assert_eq!(back, Document::Ellipsoid(e));
    }
}
