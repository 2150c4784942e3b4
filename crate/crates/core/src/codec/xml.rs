//! Minimal element tree over `roxmltree` plus the text escaping rules of the
//! canonical form.

use super::ParseCode;

/// 1-based source position.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct Pos {
    pub line: u32,
    pub column: u32,
}

#[derive(Debug)]
pub(crate) struct Element {
    pub name: String,
    pub pos: Pos,
    pub children: Vec<Element>,
    /// Decoded text content, after trimming and quote stripping.
    pub text: String,
}

#[derive(Debug)]
pub(crate) struct TreeError {
    pub pos: Pos,
    pub code: ParseCode,
    pub detail: String,
}

fn is_xml_space(c: char) -> bool {
    matches!(c, ' ' | '\t' | '\n' | '\r')
}

pub(crate) fn parse_tree(bytes: &[u8]) -> Result<Element, TreeError> {
    let text = std::str::from_utf8(bytes).map_err(|e| {
        let pos = position_of(bytes, e.valid_up_to());
        TreeError { pos, code: ParseCode::MalformedXml, detail: "input is not valid UTF-8".into() }
    })?;
    let doc = roxmltree::Document::parse(text).map_err(|e| {
        let p = e.pos();
        TreeError {
            pos: Pos { line: p.row.max(1), column: p.col.max(1) },
            code: ParseCode::MalformedXml,
            detail: e.to_string(),
        }
    })?;
    convert(&doc, text, doc.root_element())
}

fn position_of(bytes: &[u8], offset: usize) -> Pos {
    let before = &bytes[..offset.min(bytes.len())];
    let line = before.iter().filter(|&&b| b == b'\n').count() as u32 + 1;
    let line_start = before.iter().rposition(|&b| b == b'\n').map_or(0, |i| i + 1);
    Pos { line, column: (offset - line_start) as u32 + 1 }
}

fn node_pos(doc: &roxmltree::Document, node: roxmltree::Node) -> Pos {
    let p = doc.text_pos_at(node.range().start);
    Pos { line: p.row, column: p.col }
}

fn convert(doc: &roxmltree::Document, src: &str, node: roxmltree::Node) -> Result<Element, TreeError> {
    let pos = node_pos(doc, node);
    let tag = node.tag_name();
    if tag.namespace().is_some() {
        return Err(TreeError { pos, code: ParseCode::UnknownTag, detail: format!("namespaced element {:?}", tag.name()) });
    }
    if let Some(attr) = node.attributes().next() {
        return Err(TreeError {
            pos,
            code: ParseCode::UnknownTag,
            detail: format!("attribute {:?} on <{}> is not part of the grammar", attr.name(), tag.name()),
        });
    }
    let mut children = Vec::new();
    let mut raw = String::new();
    let mut text_pos = None;
    for child in node.children() {
        if child.is_element() {
            children.push(convert(doc, src, child)?);
        } else if child.is_text() {
            let slice = &src[child.range()];
            if slice.contains("<![CDATA[") {
                return Err(TreeError {
                    pos: node_pos(doc, child),
                    code: ParseCode::MalformedXml,
                    detail: "CDATA sections are not supported".into(),
                });
            }
            if text_pos.is_none() && !slice.trim_matches(is_xml_space).is_empty() {
                text_pos = Some(node_pos(doc, child));
            }
            raw.push_str(slice);
        }
    }
    if let (Some(tp), false) = (text_pos, children.is_empty()) {
        return Err(TreeError {
            pos: tp,
            code: ParseCode::MalformedXml,
            detail: format!("<{}> mixes text with child elements", tag.name()),
        });
    }
    Ok(Element { name: tag.name().to_string(), pos, children, text: leaf_text(&raw) })
}

/// Trim, drop one surrounding pair of literal double quotes, trim again,
/// then decode entity and character references.
fn leaf_text(raw: &str) -> String {
    let mut t = raw.trim_matches(is_xml_space);
    if t.len() >= 2 && t.starts_with('"') && t.ends_with('"') {
        t = t[1..t.len() - 1].trim_matches(is_xml_space);
    }
    unescape(t)
}

fn unescape(s: &str) -> String {
    // roxmltree has already rejected malformed references.
    let mut out = String::with_capacity(s.len());
    let mut rest = s;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let after = &rest[amp + 1..];
        let Some(semi) = after.find(';') else {
            out.push_str(&rest[amp..]);
            return out;
        };
        let name = &after[..semi];
        let decoded = match name {
            "amp" => Some('&'),
            "lt" => Some('<'),
            "gt" => Some('>'),
            "quot" => Some('"'),
            "apos" => Some('\''),
            _ => name
                .strip_prefix("#x")
                .and_then(|h| u32::from_str_radix(h, 16).ok())
                .or_else(|| name.strip_prefix('#').and_then(|d| d.parse().ok()))
                .and_then(char::from_u32),
        };
        match decoded {
            Some(c) => out.push(c),
            None => out.push_str(&rest[amp..amp + semi + 2]),
        }
        rest = &after[semi + 1..];
    }
    out.push_str(rest);
    out
}

/// Escapes a value so that `leaf_text` gives it back unchanged: markup
/// characters and double quotes always, whitespace other than interior spaces
/// as character references.
pub(crate) fn escape(s: &str) -> String {
    let mut out = String::with_capacity(s.len());
    let last = s.chars().count().saturating_sub(1);
    for (i, c) in s.chars().enumerate() {
        match c {
            '&' => out.push_str("&amp;"),
            '<' => out.push_str("&lt;"),
            '>' => out.push_str("&gt;"),
            '"' => out.push_str("&quot;"),
            '\t' => out.push_str("&#x9;"),
            '\n' => out.push_str("&#xA;"),
            '\r' => out.push_str("&#xD;"),
            ' ' if i == 0 || i == last => out.push_str("&#x20;"),
            c => out.push(c),
        }
    }
    out
}

/// Indenting writer for the canonical layout.
pub(crate) struct Writer {
    out: String,
    depth: usize,
}

impl Writer {
    pub fn new() -> Self {
        Writer { out: String::new(), depth: 0 }
    }

    fn indent(&mut self) {
        for _ in 0..self.depth {
            self.out.push_str("  ");
        }
    }

    pub fn open(&mut self, tag: &str) {
        self.indent();
        self.out.push('<');
        self.out.push_str(tag);
        self.out.push_str(">\n");
        self.depth += 1;
    }

    pub fn close(&mut self, tag: &str) {
        self.depth -= 1;
        self.indent();
        self.out.push_str("</");
        self.out.push_str(tag);
        self.out.push_str(">\n");
    }

    pub fn leaf(&mut self, tag: &str, value: &str) {
        self.indent();
        self.out.push('<');
        self.out.push_str(tag);
        self.out.push('>');
        self.out.push_str(&escape(value));
        self.out.push_str("</");
        self.out.push_str(tag);
        self.out.push_str(">\n");
    }

    pub fn finish(self) -> Vec<u8> {
        debug_assert_eq!(self.depth, 0);
        self.out.into_bytes()
    }
}
