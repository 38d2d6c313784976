//! The `.ifm` layout format.
//!
//! Line oriented, `#` starts a comment:
//!
//! ```text
//! vertex <id> <x> <y> <z>
//! beamsplitter <vertex> normal <x> <y> <z>
//! mirror <vertex> normal <x> <y> <z>
//! arm <from> <to> length <L> [label <name>]
//! source momentum <x> <y> <z> polarization <x> <y> <z> width <sigma>
//! bomb arm <label> [efficiency <e>]
//! detector <D1|D2> port <a|b>
//! ```
//!
//! Parsing never stops at the first problem; every line is checked and all
//! diagnostics are returned together.

use std::collections::BTreeMap;
use std::fmt::{self, Write as _};

use nalgebra::Vector3;

use crate::interferometer::{Arm, ArmId, DetectorId, Layout, LayoutParts, Port, Source, VertexId};
use crate::optics::{ElementKind, Momentum3, OpticalElement, PhotonMode};

/// Normals further than this from unit length are normalized with a warning.
const UNIT_NORMAL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub severity: Severity,
    pub message: String,
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {sev}: {}", self.line, self.column, self.message)
    }
}

/// Parsed source text. `layout` is present iff no error-severity diagnostic
/// was produced; warnings do not block.
#[derive(Debug, Clone)]
pub struct LayoutDocument {
    pub source: String,
    pub layout: Option<Layout>,
    pub diagnostics: Vec<Diagnostic>,
}

impl LayoutDocument {
    pub fn errors(&self) -> impl Iterator<Item = &Diagnostic> {
        self.diagnostics.iter().filter(|d| d.severity == Severity::Error)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }
}

#[derive(Clone, Copy)]
struct Token<'a> {
    column: usize,
    text: &'a str,
}

struct Line<'a> {
    number: usize,
    tokens: Vec<Token<'a>>,
    pos: usize,
    end_column: usize,
}

type Step<T> = Result<T, Diagnostic>;

fn error(line: usize, column: usize, message: impl Into<String>) -> Diagnostic {
    Diagnostic {
        line,
        column,
        severity: Severity::Error,
        message: message.into(),
    }
}

impl<'a> Line<'a> {
    fn new(number: usize, text: &'a str) -> Self {
        let body = text.split('#').next().unwrap_or("");
        let mut tokens = Vec::new();
        let mut start = None;
        for (col, ch) in body.chars().enumerate().chain(std::iter::once((body.chars().count(), ' '))) {
            match (ch.is_whitespace(), start) {
                (false, None) => start = Some(col),
                (true, Some(s)) => {
                    let (b0, b1) = (char_offset(body, s), char_offset(body, col));
                    tokens.push(Token {
                        column: s + 1,
                        text: &body[b0..b1],
                    });
                    start = None;
                }
                _ => {}
            }
        }
        Line {
            number,
            tokens,
            pos: 0,
            end_column: body.trim_end().chars().count() + 1,
        }
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |t| t.column)
    }

    fn next(&mut self, what: &str) -> Step<Token<'a>> {
        let tok = *self.tokens.get(self.pos).ok_or_else(|| {
            error(self.number, self.end_column, format!("expected {what}, found end of line"))
        })?;
        self.pos += 1;
        Ok(tok)
    }

    fn keyword(&mut self, kw: &str) -> Step<()> {
        let col = self.column();
        let tok = self.next(&format!("`{kw}`"))?;
        if tok.text != kw {
            return Err(error(self.number, col, format!("expected `{kw}`, found `{}`", tok.text)));
        }
        Ok(())
    }

    fn number(&mut self, what: &str) -> Step<(f64, usize)> {
        let tok = self.next(what)?;
        match tok.text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok((v, tok.column)),
            _ => Err(error(
                self.number,
                tok.column,
                format!("malformed number `{}` for {what}", tok.text),
            )),
        }
    }

    fn vector(&mut self, what: &str) -> Step<(Vector3<f64>, usize)> {
        let col = self.column();
        let mut v = [0.0; 3];
        for (i, c) in v.iter_mut().enumerate() {
            *c = self
                .number(&format!("{what} component {}", i + 1))
                .map_err(|mut d| {
                    d.message = format!("malformed vector: {}", d.message);
                    d
                })?
                .0;
        }
        Ok((Vector3::from(v), col))
    }

    fn vertex(&mut self) -> Step<(VertexId, usize)> {
        let tok = self.next("a vertex id")?;
        tok.text
            .parse::<VertexId>()
            .map(|v| (v, tok.column))
            .map_err(|e| error(self.number, tok.column, e.to_string()))
    }

    fn finish(&self) -> Step<()> {
        match self.tokens.get(self.pos) {
            None => Ok(()),
            Some(t) => Err(error(self.number, t.column, format!("unexpected trailing token `{}`", t.text))),
        }
    }
}

fn char_offset(s: &str, chars: usize) -> usize {
    s.char_indices().nth(chars).map_or(s.len(), |(b, _)| b)
}

struct Bomb {
    label: String,
    efficiency: f64,
    line: usize,
    column: usize,
}

#[derive(Default)]
struct Collected {
    vertices: BTreeMap<VertexId, Vector3<f64>>,
    elements: BTreeMap<VertexId, OpticalElement>,
    arms: BTreeMap<ArmId, Arm>,
    detectors: BTreeMap<DetectorId, Port>,
    source: Option<Source>,
    bomb: Option<Bomb>,
}

/// Parses `.ifm` text into a layout, collecting every diagnostic.
pub fn parse_layout(text: &str) -> LayoutDocument {
    let mut diags = Vec::new();
    let mut c = Collected::default();
    let mut last_line = 1;

    for (idx, raw) in text.lines().enumerate() {
        let mut line = Line::new(idx + 1, raw);
        last_line = idx + 1;
        if line.tokens.is_empty() {
            continue;
        }
        if let Err(d) = directive(&mut line, &mut c, &mut diags) {
            diags.push(d);
        }
    }

    let eof = |msg: String| error(last_line, 1, msg);
    for v in VertexId::ALL {
        if !c.vertices.contains_key(&v) {
            diags.push(eof(format!("missing mandatory vertex {v}")));
        }
        if !c.elements.contains_key(&v) {
            let kind = match v.expected_kind() {
                ElementKind::Mirror => "mirror",
                ElementKind::BeamSplitter => "beamsplitter",
            };
            diags.push(eof(format!("missing {kind} at {v}")));
        }
    }
    for id in ArmId::REQUIRED {
        if !c.arms.contains_key(&id) {
            diags.push(eof(format!("missing arm {} {}", id.from, id.to)));
        }
    }
    for d in [DetectorId::D1, DetectorId::D2] {
        if !c.detectors.contains_key(&d) {
            diags.push(eof(format!("missing detector {d}")));
        }
    }
    if c.source.is_none() {
        diags.push(eof("missing source".to_owned()));
    }

    let mut layout = None;
    if !diags.iter().any(|d| d.severity == Severity::Error) {
        let parts = LayoutParts {
            vertices: c.vertices,
            elements: c.elements,
            arms: c.arms.into_values().collect(),
            detectors: c.detectors,
            obstruction: None,
            source: c.source,
        };
        match Layout::new(parts) {
            Err(e) => diags.push(eof(e.to_string())),
            Ok(l) => match &c.bomb {
                None => layout = Some(l),
                Some(b) => match l.with_obstruction(&b.label, b.efficiency) {
                    Ok(l) => layout = Some(l),
                    Err(e) => diags.push(error(b.line, b.column, e.to_string())),
                },
            },
        }
    }

    diags.sort_by_key(|d| (d.line, d.column));
    LayoutDocument {
        source: text.to_owned(),
        layout,
        diagnostics: diags,
    }
}

fn directive(line: &mut Line<'_>, c: &mut Collected, diags: &mut Vec<Diagnostic>) -> Step<()> {
    let n = line.number;
    let head = line.next("a directive")?;
    match head.text {
        "vertex" => {
            let (v, col) = line.vertex()?;
            let (pos, _) = line.vector("position")?;
            line.finish()?;
            if c.vertices.insert(v, pos).is_some() {
                return Err(error(n, col, format!("duplicate vertex {v}")));
            }
        }
        "beamsplitter" | "mirror" => {
            let kind = if head.text == "mirror" {
                ElementKind::Mirror
            } else {
                ElementKind::BeamSplitter
            };
            let (v, vcol) = line.vertex()?;
            line.keyword("normal")?;
            let (normal, ncol) = line.vector("normal")?;
            line.finish()?;
            let norm = normal.norm();
            if !(norm > 0.0) {
                return Err(error(n, ncol, "degenerate normal: the zero vector has no direction"));
            }
            if (norm - 1.0).abs() > UNIT_NORMAL_TOL {
                diags.push(Diagnostic {
                    line: n,
                    column: ncol,
                    severity: Severity::Warning,
                    message: format!("normal has length {norm}; normalized"),
                });
            }
            if kind != v.expected_kind() {
                return Err(error(
                    n,
                    head.column,
                    format!("{v} must hold a {}", kind_name(v.expected_kind())),
                ));
            }
            let el = OpticalElement::new(kind, normal, v).map_err(|e| error(n, ncol, e.to_string()))?;
            if c.elements.contains_key(&v) {
                return Err(error(n, vcol, format!("duplicate element at {v}")));
            }
            c.elements.insert(v, el);
        }
        "arm" => {
            let (from, fcol) = line.vertex()?;
            let (to, _) = line.vertex()?;
            line.keyword("length")?;
            let (length, lcol) = line.number("arm length")?;
            let mut label = None;
            if line.pos < line.tokens.len() {
                line.keyword("label")?;
                let tok = line.next("a label")?;
                if tok.text.parse::<VertexId>().is_ok() || tok.text.contains('-') {
                    return Err(error(n, tok.column, format!("label `{}` clashes with arm notation", tok.text)));
                }
                label = Some(tok.text.to_owned());
            }
            line.finish()?;
            let id = ArmId::new(from, to);
            if !ArmId::REQUIRED.contains(&id) {
                return Err(error(n, fcol, format!("arm {from} {to} is not part of the interferometer")));
            }
            if !(length > 0.0) {
                return Err(error(n, lcol, format!("arm length must be positive, got {length}")));
            }
            if let Some(l) = &label {
                if c.arms.values().any(|a| a.label.as_ref() == Some(l)) {
                    return Err(error(n, fcol, format!("duplicate arm label `{l}`")));
                }
            }
            if c.arms.contains_key(&id) {
                return Err(error(n, fcol, format!("duplicate arm {from} {to}")));
            }
            c.arms.insert(id, Arm { id, length, label });
        }
        "source" => {
            line.keyword("momentum")?;
            let (p, pcol) = line.vector("momentum")?;
            line.keyword("polarization")?;
            let (e, ecol) = line.vector("polarization")?;
            line.keyword("width")?;
            let (width, wcol) = line.number("width")?;
            line.finish()?;
            let p = Momentum3::new(p.x, p.y, p.z).map_err(|err| error(n, pcol, err.to_string()))?;
            let mode = PhotonMode::new(p, e).map_err(|err| error(n, ecol, err.to_string()))?;
            if !(width > 0.0) {
                return Err(error(n, wcol, format!("width must be positive, got {width}")));
            }
            if c.source.is_some() {
                return Err(error(n, head.column, "duplicate source"));
            }
            c.source = Some(Source { mode, width });
        }
        "bomb" => {
            line.keyword("arm")?;
            let tok = line.next("an arm label")?;
            let mut efficiency = 1.0;
            if line.pos < line.tokens.len() {
                line.keyword("efficiency")?;
                let (e, ecol) = line.number("efficiency")?;
                if !(0.0..=1.0).contains(&e) {
                    return Err(error(n, ecol, format!("efficiency must lie in [0, 1], got {e}")));
                }
                efficiency = e;
            }
            line.finish()?;
            if c.bomb.is_some() {
                return Err(error(n, head.column, "only one bomb is supported"));
            }
            c.bomb = Some(Bomb {
                label: tok.text.to_owned(),
                efficiency,
                line: n,
                column: tok.column,
            });
        }
        "detector" => {
            let tok = line.next("D1 or D2")?;
            let d = match tok.text {
                "D1" => DetectorId::D1,
                "D2" => DetectorId::D2,
                other => return Err(error(n, tok.column, format!("unknown detector `{other}`"))),
            };
            line.keyword("port")?;
            let ptok = line.next("port a or b")?;
            let port = match ptok.text {
                "a" => Port::A,
                "b" => Port::B,
                other => return Err(error(n, ptok.column, format!("unknown port `{other}`"))),
            };
            line.finish()?;
            if c.detectors.values().any(|&p| p == port) && c.detectors.get(&d) != Some(&port) {
                return Err(error(n, ptok.column, format!("port {port} already has a detector")));
            }
            if c.detectors.insert(d, port).is_some() {
                return Err(error(n, tok.column, format!("duplicate detector {d}")));
            }
        }
        other => return Err(error(n, head.column, format!("unknown directive `{other}`"))),
    }
    Ok(())
}

fn kind_name(k: ElementKind) -> &'static str {
    match k {
        ElementKind::Mirror => "mirror",
        ElementKind::BeamSplitter => "beamsplitter",
    }
}

fn num(x: f64) -> String {
    // shortest representation that parses back to the same bits
    format!("{x}")
}

fn vec3(v: &Vector3<f64>) -> String {
    format!("{} {} {}", num(v.x), num(v.y), num(v.z))
}

/// Canonical text form. Sections come in a fixed order, each sorted by id,
/// and numbers are written so that parsing restores them bit for bit.
pub fn serialize_layout(layout: &Layout) -> String {
    let mut out = String::new();
    for (v, pos) in layout.vertices() {
        let _ = writeln!(out, "vertex {v} {}", vec3(pos));
    }
    for (v, el) in layout.elements() {
        let _ = writeln!(out, "{} {v} normal {}", kind_name(el.kind), vec3(&el.reflection.normal()));
    }
    for arm in layout.arms() {
        let _ = write!(out, "arm {} {} length {}", arm.id.from, arm.id.to, num(arm.length));
        if let Some(l) = &arm.label {
            let _ = write!(out, " label {l}");
        }
        out.push('\n');
    }
    let src = layout.source();
    let _ = writeln!(
        out,
        "source momentum {} polarization {} width {}",
        vec3(&src.mode.momentum().0),
        vec3(&src.mode.polarization()),
        num(src.width)
    );
    if let Some(obs) = layout.obstruction() {
        let arm = layout.arm(obs.arm);
        let name = arm.label.clone().unwrap_or_else(|| obs.arm.to_string());
        let _ = writeln!(out, "bomb arm {name} efficiency {}", num(obs.efficiency));
    }
    for (d, p) in layout.detectors() {
        let _ = writeln!(out, "detector {d} port {p}");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const MZI: &str = include_str!("../examples/mzi.ifm");

    #[test]
    fn bundled_file_parses_cleanly() {
        let doc = parse_layout(MZI);
        assert!(doc.diagnostics.is_empty(), "{:?}", doc.diagnostics);
        let l = doc.layout.unwrap();
        assert_eq!(l.vertices().len(), 4);
        assert_eq!(l.elements().values().filter(|e| e.kind == ElementKind::Mirror).count(), 2);
        assert_eq!(l.elements().values().filter(|e| e.kind == ElementKind::BeamSplitter).count(), 2);
        assert_eq!(l, Layout::square());
    }

    #[test]
    fn bomb_line_adds_obstruction() {
        let text = format!("{MZI}bomb arm lower efficiency 1.0\n");
        let l = parse_layout(&text).layout.unwrap();
        assert_eq!(l.obstruction().unwrap().efficiency, 1.0);
        assert_eq!(l.obstruction().unwrap().arm, ArmId::new(VertexId::L11, VertexId::L12));
    }

    #[test]
    fn degenerate_normal_is_positioned() {
        let text = MZI.replace("mirror L12 normal 0.7071067811865476 0.7071067811865476 0", "mirror L12 normal 0 0 0");
        let doc = parse_layout(&text);
        assert!(doc.layout.is_none());
        let line = text.lines().position(|l| l.starts_with("mirror L12")).unwrap() + 1;
        let d = doc.errors().next().unwrap();
        assert_eq!((d.line, d.column), (line, 19));
        assert!(d.message.contains("degenerate normal"));
    }

    #[test]
    fn multiple_diagnostics_reported() {
        let text = "vertex L11 0 0\nlaser on\nmirror L12 normal 0 0 0\nvertex L99 0 0 0\n";
        let doc = parse_layout(text);
        let lines: Vec<usize> = doc.errors().map(|d| d.line).collect();
        assert!(lines.contains(&1) && lines.contains(&2) && lines.contains(&3) && lines.contains(&4));
        assert!(doc.errors().any(|d| d.message.contains("malformed vector")));
        assert!(doc.errors().any(|d| d.message.contains("unknown directive `laser`")));
        assert!(doc.errors().any(|d| d.message.contains("missing mandatory vertex L21")));
    }

    #[test]
    fn duplicate_element_rejected() {
        let text = format!("{MZI}mirror L21 normal 1 0 0\n");
        let doc = parse_layout(&text);
        assert!(doc.layout.is_none());
        assert!(doc.errors().any(|d| d.message.contains("duplicate element at L21")));
    }

    #[test]
    fn non_unit_normal_warns_but_parses() {
        let text = MZI.replace("mirror L12 normal 0.7071067811865476 0.7071067811865476 0", "mirror L12 normal 2 2 0");
        let doc = parse_layout(&text);
        assert!(!doc.has_errors());
        assert_eq!(doc.diagnostics.len(), 1);
        assert_eq!(doc.diagnostics[0].severity, Severity::Warning);
        assert!(doc.layout.is_some());
    }

    #[test]
    fn unknown_bomb_arm() {
        let text = format!("{MZI}bomb arm sideways\n");
        let doc = parse_layout(&text);
        assert!(doc.errors().any(|d| d.message.contains("sideways")));
    }

    #[test]
    fn round_trip_with_half_efficiency() {
        let l = Layout::square().with_obstruction("lower", 0.5).unwrap();
        let text = serialize_layout(&l);
        assert!(text.contains("bomb arm lower efficiency 0.5\n"));
        let back = parse_layout(&text).layout.unwrap();
        assert_eq!(back, l);
        assert_eq!(serialize_layout(&back), text);
    }

    #[test]
    fn columns_are_one_based_and_count_characters() {
        let doc = parse_layout("  vertex  L11 0 0 x\n");
        let d = doc.errors().find(|d| d.message.contains("malformed")).unwrap();
        assert_eq!((d.line, d.column), (1, 19));
    }
}
