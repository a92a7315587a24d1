//! Front-end for a Python subset.
//!
//! Supported constructs: `def` and `class` (nested or not), parameters,
//! assignment targets (plain, tuple, annotated, walrus, `for`/`with`/`except`
//! targets, comprehension and lambda variables), `import X [as Y]`,
//! `from X import Y [as Z]`, decorators, calls `name(...)`, bare names and
//! `name.member` attribute access. Control-flow blocks do not produce nodes;
//! their contents are attached to the enclosing function, class or file.

use std::collections::BTreeSet;

use super::{file_span, FrontEnd, FrontEndDescriptor, ParseResult, Span, SyntaxNode};
use crate::model::Diagnostic;

pub const LANGUAGE: &str = "python-subset";

pub const FUNCTION: &str = "function-declaration";
pub const CLASS: &str = "class-declaration";
pub const PARAMETER: &str = "parameter-declaration";
pub const VARIABLE: &str = "variable-declaration";
pub const MODULE_IMPORT: &str = "module-import";
pub const IMPORT_ALIAS: &str = "import-alias";
pub const NAME_USAGE: &str = "name-usage";
pub const CALL: &str = "call-expression";
pub const ATTRIBUTE: &str = "attribute-usage";
pub const IMPORT_NAME: &str = "import-name";
pub const STRING_LITERAL: &str = "string-literal";
pub const NUMERIC_LITERAL: &str = "numeric-literal";

const ANY_BINDING: &[&str] = &[
    FUNCTION,
    CLASS,
    PARAMETER,
    VARIABLE,
    MODULE_IMPORT,
    IMPORT_ALIAS,
    IMPORT_NAME,
];

pub const DESCRIPTOR: FrontEndDescriptor = FrontEndDescriptor {
    language: LANGUAGE,
    extensions: &["py"],
    declaration_kinds: &[
        FUNCTION,
        CLASS,
        PARAMETER,
        VARIABLE,
        MODULE_IMPORT,
        IMPORT_ALIAS,
    ],
    usage_kinds: &[NAME_USAGE, CALL, ATTRIBUTE, IMPORT_NAME],
    other_kinds: &[
        super::FILE_KIND,
        super::TOPLEVEL_KIND,
        super::DIRECTORY_KIND,
        STRING_LITERAL,
        NUMERIC_LITERAL,
    ],
    function_kinds: &[FUNCTION],
    class_kinds: &[CLASS],
    scope_kinds: &[super::FILE_KIND, FUNCTION, CLASS],
    opaque_scope_kinds: &[CLASS],
    container_kinds: &[super::FILE_KIND],
    exported_kinds: &[FUNCTION, CLASS, VARIABLE],
    overloadable_kinds: &[],
    import_kinds: &[IMPORT_NAME],
    module_import_kinds: &[MODULE_IMPORT],
    import_alias_kind: Some(IMPORT_ALIAS),
    member_kinds: &[ATTRIBUTE],
    global_member_lookup: false,
    name_usage_kind: NAME_USAGE,
    target_kinds: &[
        (NAME_USAGE, ANY_BINDING),
        (CALL, ANY_BINDING),
        (ATTRIBUTE, &[FUNCTION, CLASS, VARIABLE, IMPORT_NAME]),
        (IMPORT_NAME, ANY_BINDING),
    ],
    builtins: BUILTINS,
};

const BUILTINS: &[&str] = &[
    "__file__",
    "__name__",
    "__doc__",
    "abs",
    "all",
    "any",
    "bin",
    "bool",
    "bytearray",
    "bytes",
    "callable",
    "chr",
    "classmethod",
    "delattr",
    "dict",
    "dir",
    "divmod",
    "enumerate",
    "filter",
    "float",
    "format",
    "frozenset",
    "getattr",
    "globals",
    "hasattr",
    "hash",
    "hex",
    "id",
    "input",
    "int",
    "isinstance",
    "issubclass",
    "iter",
    "len",
    "list",
    "locals",
    "map",
    "max",
    "min",
    "next",
    "object",
    "oct",
    "open",
    "ord",
    "pow",
    "print",
    "property",
    "range",
    "repr",
    "reversed",
    "round",
    "set",
    "setattr",
    "slice",
    "sorted",
    "staticmethod",
    "str",
    "sum",
    "super",
    "tuple",
    "type",
    "vars",
    "zip",
    "Exception",
    "BaseException",
    "ValueError",
    "TypeError",
    "KeyError",
    "IndexError",
    "RuntimeError",
    "NotImplementedError",
    "StopIteration",
    "AttributeError",
    "OSError",
    "IOError",
    "ZeroDivisionError",
    "AssertionError",
    "ImportError",
    "NameError",
    "LookupError",
    "NotImplemented",
    "self",
    "cls",
];

const KEYWORDS: &[&str] = &[
    "False", "None", "True", "and", "as", "assert", "async", "await", "break", "class", "continue",
    "def", "del", "elif", "else", "except", "finally", "for", "from", "global", "if", "import",
    "in", "is", "lambda", "nonlocal", "not", "or", "pass", "raise", "return", "try", "while",
    "with", "yield",
];

fn is_keyword(s: &str) -> bool {
    KEYWORDS.contains(&s)
}

#[derive(Debug, Clone, Copy)]
pub struct PythonFrontEnd;

impl FrontEnd for PythonFrontEnd {
    fn descriptor(&self) -> &'static FrontEndDescriptor {
        &DESCRIPTOR
    }

    fn parse(&self, path: &str, content: &str) -> ParseResult {
        let mut diagnostics = Vec::new();
        let lines = tokenize(content, path, &mut diagnostics);
        let mut parser = Parser {
            lines,
            pos: 0,
            path,
            diagnostics,
            rebound: Vec::new(),
        };
        let children = parser.parse_block(0);
        let mut root =
            SyntaxNode::new(super::FILE_KIND, file_span(content)).with_children(children);
        root.normalize();
        ParseResult {
            path: path.to_string(),
            language: LANGUAGE,
            root,
            diagnostics: parser.diagnostics,
        }
    }

    fn module_candidates(
        &self,
        importer: &ParseResult,
        qualifier: &str,
        _name: &str,
    ) -> Vec<String> {
        module_candidates(&importer.path, qualifier)
    }
}

fn join(dir: &str, rest: &str) -> String {
    if dir.is_empty() {
        rest.to_string()
    } else {
        format!("{dir}/{rest}")
    }
}

/// Candidate files for `module` imported from `importer`.
///
/// Relative modules (leading dots) are anchored at the importer's package.
/// Absolute modules are searched from the importer's directory up to the
/// project root, nearest first.
pub fn module_candidates(importer: &str, module: &str) -> Vec<String> {
    let dots = module.chars().take_while(|&c| c == '.').count();
    let rest = module[dots..].replace('.', "/");
    let mut dirs: Vec<&str> = Vec::new();
    let mut dir = importer.rsplit_once('/').map_or("", |(d, _)| d);
    if dots > 0 {
        for _ in 1..dots {
            if dir.is_empty() {
                return Vec::new();
            }
            dir = dir.rsplit_once('/').map_or("", |(d, _)| d);
        }
        dirs.push(dir);
    } else {
        loop {
            dirs.push(dir);
            if dir.is_empty() {
                break;
            }
            dir = dir.rsplit_once('/').map_or("", |(d, _)| d);
        }
    }
    let mut out = Vec::new();
    for d in dirs {
        if rest.is_empty() {
            out.push(join(d, "__init__.py"));
        } else {
            out.push(join(d, &format!("{rest}.py")));
            out.push(join(d, &format!("{rest}/__init__.py")));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Tokenizer

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Name,
    Number,
    Str,
    Op,
}

#[derive(Debug, Clone)]
struct Tok {
    kind: TokKind,
    text: String,
    line: u32,
    end_line: u32,
}

impl Tok {
    fn is_op(&self, op: &str) -> bool {
        self.kind == TokKind::Op && self.text == op
    }

    fn is_kw(&self, kw: &str) -> bool {
        self.kind == TokKind::Name && self.text == kw
    }

    fn is_ident(&self) -> bool {
        self.kind == TokKind::Name && !is_keyword(&self.text)
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.end_line)
    }
}

#[derive(Debug, Clone)]
struct LogicalLine {
    indent: usize,
    start: u32,
    end: u32,
    toks: Vec<Tok>,
}

const OPERATORS: &[&str] = &[
    "**=", "//=", ">>=", "<<=", "...", "->", ":=", "==", "!=", "<=", ">=", "**", "//", "<<", ">>",
    "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "@=", "<>",
];

const RECOVERY_STARTS: &[&str] = &["def ", "class ", "async def ", "import ", "from ", "@"];

fn is_string_prefix(s: &str) -> bool {
    s.len() <= 2
        && s.chars()
            .all(|c| matches!(c.to_ascii_lowercase(), 'r' | 'b' | 'u' | 'f'))
}

fn tokenize(src: &str, path: &str, diags: &mut Vec<Diagnostic>) -> Vec<LogicalLine> {
    let chars: Vec<char> = src.chars().collect();
    let n = chars.len();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut depth: usize = 0;
    let mut opened_at = 1;
    let mut at_line_start = true;
    let mut out = Vec::new();
    let mut cur: Option<LogicalLine> = None;

    fn finish(cur: &mut Option<LogicalLine>, out: &mut Vec<LogicalLine>) {
        if let Some(l) = cur.take() {
            if !l.toks.is_empty() {
                out.push(l);
            }
        }
    }

    while i < n {
        if at_line_start {
            let mut col = 0;
            let mut j = i;
            while j < n && matches!(chars[j], ' ' | '\t' | '\x0c') {
                col += if chars[j] == '\t' { 4 } else { 1 };
                j += 1;
            }
            if j >= n {
                break;
            }
            if matches!(chars[j], '\n' | '\r' | '#') {
                while j < n && chars[j] != '\n' {
                    j += 1;
                }
                if j < n {
                    line += 1;
                    j += 1;
                }
                i = j;
                continue;
            }
            cur = Some(LogicalLine {
                indent: col,
                start: line,
                end: line,
                toks: Vec::new(),
            });
            at_line_start = false;
            i = j;
            continue;
        }

        let c = chars[i];
        match c {
            '\n' => {
                line += 1;
                i += 1;
                if depth > 0 {
                    let rest: String = chars[i..n.min(i + 10)].iter().collect();
                    let logical_indent = cur.as_ref().map_or(0, |l| l.indent);
                    if RECOVERY_STARTS.iter().any(|p| rest.starts_with(p))
                        || starts_statement_at(&chars, i, logical_indent)
                    {
                        diags.push(Diagnostic::new(path, line - 1, "unclosed bracket"));
                        depth = 0;
                        finish(&mut cur, &mut out);
                        at_line_start = true;
                    }
                } else {
                    finish(&mut cur, &mut out);
                    at_line_start = true;
                }
            }
            '\r' | ' ' | '\t' | '\x0c' => i += 1,
            '#' => {
                while i < n && chars[i] != '\n' {
                    i += 1;
                }
            }
            '\\' if i + 1 < n && (chars[i + 1] == '\n' || chars[i + 1] == '\r') => {
                i += 1;
                if chars[i] == '\r' {
                    i += 1;
                }
                if i < n && chars[i] == '\n' {
                    i += 1;
                }
                line += 1;
            }
            '"' | '\'' => {
                let tok = read_string(&chars, &mut i, &mut line, path, diags);
                push(&mut cur, tok);
            }
            c if c.is_ascii_digit() || (c == '.' && i + 1 < n && chars[i + 1].is_ascii_digit()) => {
                let start = i;
                while i < n {
                    let d = chars[i];
                    if d.is_ascii_alphanumeric()
                        || d == '_'
                        || d == '.'
                        || (d == '+' || d == '-') && matches!(chars[i - 1], 'e' | 'E')
                    {
                        i += 1;
                    } else {
                        break;
                    }
                }
                let text: String = chars[start..i].iter().collect();
                push(
                    &mut cur,
                    Tok {
                        kind: TokKind::Number,
                        text,
                        line,
                        end_line: line,
                    },
                );
            }
            c if c.is_alphabetic() || c == '_' => {
                let start = i;
                while i < n && (chars[i].is_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let text: String = chars[start..i].iter().collect();
                if i < n && (chars[i] == '"' || chars[i] == '\'') && is_string_prefix(&text) {
                    let tok = read_string(&chars, &mut i, &mut line, path, diags);
                    push(&mut cur, tok);
                } else {
                    push(
                        &mut cur,
                        Tok {
                            kind: TokKind::Name,
                            text,
                            line,
                            end_line: line,
                        },
                    );
                }
            }
            _ => {
                let rest: String = chars[i..n.min(i + 3)].iter().collect();
                let op = OPERATORS
                    .iter()
                    .find(|op| rest.starts_with(*op))
                    .map(|s| s.to_string())
                    .unwrap_or_else(|| c.to_string());
                i += op.chars().count();
                match op.as_str() {
                    "(" | "[" | "{" => {
                        if depth == 0 {
                            opened_at = line;
                        }
                        depth += 1;
                    }
                    ")" | "]" | "}" => {
                        if depth == 0 {
                            diags.push(Diagnostic::new(path, line, format!("unmatched `{op}`")));
                        } else {
                            depth -= 1;
                        }
                    }
                    _ => {}
                }
                push(
                    &mut cur,
                    Tok {
                        kind: TokKind::Op,
                        text: op,
                        line,
                        end_line: line,
                    },
                );
            }
        }
    }
    if depth > 0 {
        diags.push(Diagnostic::new(
            path,
            opened_at,
            "unclosed bracket at end of file",
        ));
    }
    finish(&mut cur, &mut out);
    out
}

/// A physical line at or left of the logical line's indentation that begins
/// with a name: bracketed continuations are normally indented further.
fn starts_statement_at(chars: &[char], mut i: usize, logical_indent: usize) -> bool {
    let mut col = 0;
    while i < chars.len() && matches!(chars[i], ' ' | '\t') {
        col += if chars[i] == '\t' { 4 } else { 1 };
        i += 1;
    }
    col <= logical_indent && i < chars.len() && (chars[i].is_alphabetic() || chars[i] == '_')
}

fn push(cur: &mut Option<LogicalLine>, tok: Tok) {
    if let Some(l) = cur.as_mut() {
        l.end = l.end.max(tok.end_line);
        l.toks.push(tok);
    }
}

fn read_string(
    chars: &[char],
    i: &mut usize,
    line: &mut u32,
    path: &str,
    diags: &mut Vec<Diagnostic>,
) -> Tok {
    let n = chars.len();
    let start_line = *line;
    let q = chars[*i];
    let triple = *i + 2 < n && chars[*i + 1] == q && chars[*i + 2] == q;
    *i += if triple { 3 } else { 1 };
    let mut closed = false;
    while *i < n {
        let c = chars[*i];
        if c == '\\' {
            if *i + 1 < n && chars[*i + 1] == '\n' {
                *line += 1;
            }
            *i += 2;
            continue;
        }
        if c == '\n' {
            if !triple {
                break;
            }
            *line += 1;
        }
        if c == q {
            if !triple {
                *i += 1;
                closed = true;
                break;
            }
            if *i + 2 < n && chars[*i + 1] == q && chars[*i + 2] == q {
                *i += 3;
                closed = true;
                break;
            }
        }
        *i += 1;
    }
    if !closed {
        diags.push(Diagnostic::new(
            path,
            start_line,
            "unterminated string literal",
        ));
    }
    Tok {
        kind: TokKind::Str,
        text: String::new(),
        line: start_line,
        end_line: *line,
    }
}

// ---------------------------------------------------------------------------
// Parser

struct Parser<'a> {
    lines: Vec<LogicalLine>,
    pos: usize,
    path: &'a str,
    diagnostics: Vec<Diagnostic>,
    /// Names declared `global` or `nonlocal`, one set per enclosing `def`.
    rebound: Vec<BTreeSet<String>>,
}

/// Index of the first `pred` token at bracket depth 0, starting at `from`.
fn find_top(toks: &[Tok], from: usize, pred: impl Fn(&Tok) -> bool) -> Option<usize> {
    let mut depth = 0i32;
    for (i, t) in toks.iter().enumerate().skip(from) {
        if depth == 0 && pred(t) {
            return Some(i);
        }
        if t.kind == TokKind::Op {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            }
        }
    }
    None
}

/// Splits at depth-0 tokens matching `pred`.
fn split_top(toks: &[Tok], pred: impl Fn(&Tok) -> bool) -> Vec<&[Tok]> {
    let mut parts = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, t) in toks.iter().enumerate() {
        if depth == 0 && pred(t) {
            parts.push(&toks[start..i]);
            start = i + 1;
            continue;
        }
        if t.kind == TokKind::Op {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            }
        }
    }
    parts.push(&toks[start..]);
    parts
}

fn matching_close(toks: &[Tok], open: usize) -> Option<usize> {
    let mut depth = 0i32;
    for (i, t) in toks.iter().enumerate().skip(open) {
        if t.kind == TokKind::Op {
            match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => {
                    depth -= 1;
                    if depth == 0 {
                        return Some(i);
                    }
                }
                _ => {}
            }
        }
    }
    None
}

impl Parser<'_> {
    fn diag(&mut self, line: u32, msg: impl Into<String>) {
        self.diagnostics.push(Diagnostic::new(self.path, line, msg));
    }

    fn parse_block(&mut self, indent: usize) -> Vec<SyntaxNode> {
        let mut out = Vec::new();
        while self.pos < self.lines.len() {
            let li = &self.lines[self.pos];
            if li.indent < indent {
                break;
            }
            if li.indent > indent {
                let (line, inner) = (li.start, li.indent);
                self.diag(line, "unexpected indent");
                out.extend(self.parse_block(inner));
                continue;
            }
            self.parse_statement(&mut out);
        }
        out
    }

    /// Parses the indented body following the line just consumed.
    /// Returns the nodes and the last line of the body.
    fn parse_body(&mut self, header_indent: usize, header_end: u32) -> (Vec<SyntaxNode>, u32) {
        match self.lines.get(self.pos) {
            Some(next) if next.indent > header_indent => {
                let indent = next.indent;
                let nodes = self.parse_block(indent);
                let end = self.lines[self.pos - 1].end;
                (nodes, end.max(header_end))
            }
            _ => (Vec::new(), header_end),
        }
    }

    /// Skips lines indented deeper than `indent`.
    fn skip_body(&mut self, indent: usize) -> u32 {
        let mut end = self.lines[self.pos - 1].end;
        while let Some(l) = self.lines.get(self.pos) {
            if l.indent <= indent {
                break;
            }
            end = l.end;
            self.pos += 1;
        }
        end
    }

    fn parse_statement(&mut self, out: &mut Vec<SyntaxNode>) {
        let line = self.lines[self.pos].clone();
        self.pos += 1;
        let mut toks: &[Tok] = &line.toks;

        if toks[0].is_op("@") {
            scan_expr(&toks[1..], out);
            return;
        }
        if toks[0].is_kw("async") && toks.len() > 1 {
            toks = &toks[1..];
        }
        let first = &toks[0];
        if first.kind == TokKind::Name {
            match first.text.as_str() {
                "def" => return self.parse_def(toks, &line, out),
                "class" => return self.parse_class(toks, &line, out),
                "import" => return self.parse_import(toks, out),
                "from" if find_top(toks, 1, |t| t.is_kw("import")).is_some() => {
                    return self.parse_from(toks, out)
                }
                "if" | "elif" | "else" | "while" | "for" | "try" | "except" | "finally"
                | "with" => return self.parse_compound(toks, &line, out),
                _ => {}
            }
        }
        let ends_with_colon = toks.last().is_some_and(|t| t.is_op(":"))
            && find_top(toks, 0, |t| t.is_op(":")) == Some(toks.len() - 1);
        let opens_block = self
            .lines
            .get(self.pos)
            .is_some_and(|next| next.indent > line.indent);
        if ends_with_colon && opens_block {
            // Unknown compound statement (e.g. `match`): scan its header.
            return self.parse_compound(toks, &line, out);
        }
        self.simple_statements(toks, out);
    }

    fn parse_def(&mut self, toks: &[Tok], line: &LogicalLine, out: &mut Vec<SyntaxNode>) {
        let name = match toks.get(1) {
            Some(t) if t.is_ident() => t.text.clone(),
            _ => {
                self.diag(line.start, "malformed function definition");
                self.skip_body(line.indent);
                return;
            }
        };
        let close = match toks.get(2) {
            Some(t) if t.is_op("(") => matching_close(toks, 2),
            _ => None,
        };
        let Some(close) = close else {
            self.diag(line.start, format!("malformed parameter list for `{name}`"));
            self.skip_body(line.indent);
            return;
        };
        let mut children = Vec::new();
        for segment in split_top(&toks[3..close], |t| t.is_op(",")) {
            let mut seg = segment;
            while seg.first().is_some_and(|t| t.is_op("*") || t.is_op("**")) {
                seg = &seg[1..];
            }
            let Some(p) = seg.first() else { continue };
            if !p.is_ident() {
                if !p.is_op("/") {
                    scan_expr(seg, &mut children);
                }
                continue;
            }
            children.push(SyntaxNode::named(PARAMETER, p.span(), p.text.clone()));
            scan_expr(&seg[1..], &mut children);
        }
        let colon = find_top(toks, close + 1, |t| t.is_op(":"));
        let header_end = match colon {
            Some(c) => c,
            None => {
                self.diag(
                    line.start,
                    format!("missing `:` after definition of `{name}`"),
                );
                toks.len()
            }
        };
        scan_expr(&toks[close + 1..header_end], &mut children);
        let mut end = line.end;
        if let Some(c) = colon {
            if c + 1 < toks.len() {
                self.simple_statements(&toks[c + 1..], &mut children);
            }
            self.rebound.push(BTreeSet::new());
            let (body, body_end) = self.parse_body(line.indent, line.end);
            children.extend(body);
            end = body_end;
            let rebound = self.rebound.pop().unwrap_or_default();
            if !rebound.is_empty() {
                rebind(&mut children, &rebound);
            }
        }
        out.push(
            SyntaxNode::named(FUNCTION, Span::new(line.start, end), name).with_children(children),
        );
    }

    fn parse_class(&mut self, toks: &[Tok], line: &LogicalLine, out: &mut Vec<SyntaxNode>) {
        let name = match toks.get(1) {
            Some(t) if t.is_ident() => t.text.clone(),
            _ => {
                self.diag(line.start, "malformed class definition");
                self.skip_body(line.indent);
                return;
            }
        };
        let mut children = Vec::new();
        let mut after = 2;
        if toks.get(2).is_some_and(|t| t.is_op("(")) {
            match matching_close(toks, 2) {
                Some(close) => {
                    scan_expr(&toks[2..=close], &mut children);
                    after = close + 1;
                }
                None => {
                    self.diag(line.start, format!("malformed base list for `{name}`"));
                    self.skip_body(line.indent);
                    return;
                }
            }
        }
        let mut end = line.end;
        match find_top(toks, after, |t| t.is_op(":")) {
            Some(c) => {
                if c + 1 < toks.len() {
                    self.simple_statements(&toks[c + 1..], &mut children);
                }
                let (body, body_end) = self.parse_body(line.indent, line.end);
                children.extend(body);
                end = body_end;
            }
            None => self.diag(line.start, format!("missing `:` after class `{name}`")),
        }
        out.push(
            SyntaxNode::named(CLASS, Span::new(line.start, end), name).with_children(children),
        );
    }

    fn parse_import(&mut self, toks: &[Tok], out: &mut Vec<SyntaxNode>) {
        for item in split_top(&toks[1..], |t| t.is_op(",")) {
            let Some(first) = item.first() else { continue };
            let as_pos = item.iter().position(|t| t.is_kw("as"));
            let module: String = item[..as_pos.unwrap_or(item.len())]
                .iter()
                .map(|t| t.text.as_str())
                .collect();
            if module.is_empty() || !first.is_ident() {
                self.diag(first.line, "malformed import");
                continue;
            }
            let (name, target) = match as_pos.and_then(|p| item.get(p + 1)) {
                Some(alias) => (alias.text.clone(), module.clone()),
                None => {
                    let head = module.split('.').next().unwrap_or_default().to_string();
                    (head.clone(), head)
                }
            };
            out.push(
                SyntaxNode::named(MODULE_IMPORT, Span::line(first.line), name)
                    .with_qualifier(Some(target)),
            );
        }
    }

    fn parse_from(&mut self, toks: &[Tok], out: &mut Vec<SyntaxNode>) {
        let import_at = find_top(toks, 1, |t| t.is_kw("import")).unwrap_or(toks.len());
        let module: String = toks[1..import_at].iter().map(|t| t.text.as_str()).collect();
        if module.is_empty() {
            self.diag(toks[0].line, "malformed from-import");
            return;
        }
        let mut names = &toks[(import_at + 1).min(toks.len())..];
        if names.first().is_some_and(|t| t.is_op("(")) {
            names =
                &names[1..names.len() - usize::from(names.last().is_some_and(|t| t.is_op(")")))];
        }
        for item in split_top(names, |t| t.is_op(",")) {
            let Some(first) = item.first() else { continue };
            if first.is_op("*") {
                continue;
            }
            if !first.is_ident() {
                self.diag(first.line, "malformed from-import");
                continue;
            }
            let mut node =
                SyntaxNode::named(IMPORT_NAME, Span::line(first.line), first.text.clone())
                    .with_qualifier(Some(module.clone()));
            if let (Some(_), Some(alias)) = (
                item.get(1).filter(|t| t.is_kw("as")),
                item.get(2).filter(|t| t.is_ident()),
            ) {
                node.children.push(
                    SyntaxNode::named(IMPORT_ALIAS, Span::line(alias.line), alias.text.clone())
                        .with_qualifier(Some(module.clone())),
                );
            }
            out.push(node);
        }
    }

    fn parse_compound(&mut self, toks: &[Tok], line: &LogicalLine, out: &mut Vec<SyntaxNode>) {
        let colon = find_top(toks, 0, |t| t.is_op(":"));
        let header = &toks[..colon.unwrap_or(toks.len())];
        if colon.is_none() {
            self.diag(line.start, format!("missing `:` after `{}`", toks[0].text));
        }
        match toks[0].text.as_str() {
            "for" => match find_top(header, 1, |t| t.is_kw("in")) {
                Some(in_at) => {
                    scan_expr(&header[in_at + 1..], out);
                    declare_targets(&header[1..in_at], out);
                }
                None => scan_expr(header, out),
            },
            "with" => {
                for item in split_top(&header[1..], |t| t.is_op(",")) {
                    match find_top(item, 0, |t| t.is_kw("as")) {
                        Some(a) => {
                            scan_expr(&item[..a], out);
                            declare_targets(&item[a + 1..], out);
                        }
                        None => scan_expr(item, out),
                    }
                }
            }
            "except" => match find_top(header, 1, |t| t.is_kw("as")) {
                Some(a) => {
                    scan_expr(&header[1..a], out);
                    declare_targets(&header[a + 1..], out);
                }
                None => scan_expr(header, out),
            },
            _ => scan_expr(header, out),
        }
        if let Some(c) = colon {
            if c + 1 < toks.len() {
                self.simple_statements(&toks[c + 1..], out);
            }
            let (body, _) = self.parse_body(line.indent, line.end);
            out.extend(body);
        }
    }

    fn simple_statements(&mut self, toks: &[Tok], out: &mut Vec<SyntaxNode>) {
        for stmt in split_top(toks, |t| t.is_op(";")) {
            let Some(first) = stmt.first() else { continue };
            if first.is_kw("global") || first.is_kw("nonlocal") {
                if let Some(set) = self.rebound.last_mut() {
                    set.extend(
                        stmt[1..]
                            .iter()
                            .filter(|t| t.is_ident())
                            .map(|t| t.text.clone()),
                    );
                }
                continue;
            }
            if first.is_kw("import") {
                self.parse_import(stmt, out);
                continue;
            }
            if first.is_kw("from") && find_top(stmt, 1, |t| t.is_kw("import")).is_some() {
                self.parse_from(stmt, out);
                continue;
            }
            simple_statement(stmt, out);
        }
    }
}

/// Assignments to names declared `global`/`nonlocal` write an outer binding,
/// so they are usages rather than local declarations.
fn rebind(nodes: &mut [SyntaxNode], names: &BTreeSet<String>) {
    for n in nodes {
        if n.kind == VARIABLE && n.identifier.as_ref().is_some_and(|id| names.contains(id)) {
            n.kind = NAME_USAGE;
        }
        if n.kind != FUNCTION && n.kind != CLASS {
            rebind(&mut n.children, names);
        }
    }
}

fn simple_statement(stmt: &[Tok], out: &mut Vec<SyntaxNode>) {
    let parts = split_top(stmt, |t| t.is_op("="));
    let starts_lambda = stmt.first().is_some_and(|t| t.is_kw("lambda"));
    let colon = if starts_lambda {
        None
    } else {
        find_top(parts[0], 0, |t| t.is_op(":"))
    };
    if let Some(c) = colon {
        // Annotated assignment: `target: annotation [= value]`.
        let target = &parts[0][..c];
        scan_expr(&parts[0][c + 1..], out);
        for value in &parts[1..] {
            scan_expr(value, out);
        }
        declare_targets(target, out);
        return;
    }
    if parts.len() == 1 {
        scan_expr(stmt, out);
        return;
    }
    let (targets, value) = parts.split_at(parts.len() - 1);
    scan_expr(value[0], out);
    for target in targets {
        declare_targets(target, out);
    }
}

/// Assignment targets: simple (possibly starred, parenthesized or nested
/// tuple) names become variable declarations; anything else is scanned as an
/// expression.
fn declare_targets(toks: &[Tok], out: &mut Vec<SyntaxNode>) {
    let parts = split_top(toks, |t| t.is_op(","));
    for part in parts {
        let mut p = part;
        while p.first().is_some_and(|t| t.is_op("*")) {
            p = &p[1..];
        }
        match p {
            [] => {}
            [name] if name.is_ident() => {
                out.push(SyntaxNode::named(VARIABLE, name.span(), name.text.clone()));
            }
            [open, inner @ .., close]
                if (open.is_op("(") && close.is_op(")"))
                    || (open.is_op("[") && close.is_op("]")) =>
            {
                if matching_close(p, 0) == Some(p.len() - 1) {
                    declare_targets(inner, out);
                } else {
                    scan_expr(p, out);
                }
            }
            _ => scan_expr(p, out),
        }
    }
}

/// Receiver chain preceding the member at `i` (`toks[i - 1]` is `.`):
/// a dotted run of plain names, or `<expr>` for anything else.
fn qualifier_before(toks: &[Tok], i: usize) -> String {
    let mut parts = Vec::new();
    let mut j = i as isize - 2;
    loop {
        if j < 0 {
            break;
        }
        let t = &toks[j as usize];
        if !t.is_ident() {
            return "<expr>".to_string();
        }
        parts.push(t.text.as_str());
        if j >= 1 && toks[j as usize - 1].is_op(".") {
            j -= 2;
        } else {
            break;
        }
    }
    if parts.is_empty() {
        return "<expr>".to_string();
    }
    parts.reverse();
    parts.join(".")
}

fn scan_expr(toks: &[Tok], out: &mut Vec<SyntaxNode>) {
    let mut i = 0;
    let mut depth = 0i32;
    while i < toks.len() {
        let t = &toks[i];
        match t.kind {
            TokKind::Str => out.push(SyntaxNode::new(STRING_LITERAL, t.span())),
            TokKind::Number => out.push(SyntaxNode::new(NUMERIC_LITERAL, t.span())),
            TokKind::Op => match t.text.as_str() {
                "(" | "[" | "{" => depth += 1,
                ")" | "]" | "}" => depth -= 1,
                _ => {}
            },
            TokKind::Name if is_keyword(&t.text) => {
                if t.text == "lambda" {
                    let colon = find_top(toks, i + 1, |t| t.is_op(":")).unwrap_or(toks.len());
                    for (j, p) in toks.iter().enumerate().take(colon).skip(i + 1) {
                        let prev = &toks[j - 1];
                        if p.is_ident()
                            && (prev.is_kw("lambda")
                                || prev.is_op(",")
                                || prev.is_op("*")
                                || prev.is_op("**"))
                        {
                            out.push(SyntaxNode::named(PARAMETER, p.span(), p.text.clone()));
                        }
                    }
                    i = colon + 1;
                    continue;
                }
                if t.text == "for" && depth > 0 {
                    if let Some(in_at) = find_top(toks, i + 1, |t| t.is_kw("in")) {
                        declare_targets(&toks[i + 1..in_at], out);
                        i = in_at + 1;
                        continue;
                    }
                }
            }
            TokKind::Name => {
                let prev = i.checked_sub(1).map(|p| &toks[p]);
                let next = toks.get(i + 1);
                let name = t.text.clone();
                if prev.is_some_and(|p| p.is_op(".")) {
                    out.push(
                        SyntaxNode::named(ATTRIBUTE, t.span(), name)
                            .with_qualifier(Some(qualifier_before(toks, i))),
                    );
                } else if next.is_some_and(|n| n.is_op("=")) {
                    // keyword argument name
                } else if next.is_some_and(|n| n.is_op(":=")) {
                    out.push(SyntaxNode::named(VARIABLE, t.span(), name));
                } else if next.is_some_and(|n| n.is_op("(")) {
                    out.push(SyntaxNode::named(CALL, t.span(), name));
                } else {
                    out.push(SyntaxNode::named(NAME_USAGE, t.span(), name));
                }
            }
        }
        i += 1;
    }
}
