//! Front-end for a Java subset.
//!
//! Supported constructs: `package`, single-type `import`, class, interface,
//! enum and record declarations (nested, local and anonymous bodies
//! included), fields, methods, constructors, parameters, local variables,
//! lambda and catch parameters, `new T(...)`, method calls, field accesses,
//! type references and bare names. Annotations, static and on-demand imports
//! are skipped.

use super::{file_span, FrontEnd, FrontEndDescriptor, ParseResult, Span, SyntaxNode};
use crate::model::Diagnostic;

pub const LANGUAGE: &str = "java-subset";

pub const PACKAGE: &str = "package-declaration";
pub const IMPORT_NAME: &str = "import-name";
pub const CLASS: &str = "class-declaration";
pub const INTERFACE: &str = "interface-declaration";
pub const ENUM: &str = "enum-declaration";
pub const RECORD: &str = "record-declaration";
pub const FIELD: &str = "field-declaration";
pub const METHOD: &str = "method-declaration";
pub const CONSTRUCTOR: &str = "constructor-declaration";
pub const PARAMETER: &str = "parameter-declaration";
pub const VARIABLE: &str = "variable-declaration";
pub const TYPE_USAGE: &str = "type-usage";
pub const NEW: &str = "new-expression";
pub const METHOD_CALL: &str = "method-call";
pub const FIELD_ACCESS: &str = "field-access";
pub const NAME_USAGE: &str = "name-usage";
pub const STRING_LITERAL: &str = "string-literal";
pub const NUMERIC_LITERAL: &str = "numeric-literal";

const TYPES: &[&str] = &[CLASS, INTERFACE, ENUM, RECORD];
const TYPES_OR_IMPORT: &[&str] = &[CLASS, INTERFACE, ENUM, RECORD, IMPORT_NAME];

pub const DESCRIPTOR: FrontEndDescriptor = FrontEndDescriptor {
    language: LANGUAGE,
    extensions: &["java"],
    declaration_kinds: &[
        CLASS,
        INTERFACE,
        ENUM,
        RECORD,
        FIELD,
        METHOD,
        CONSTRUCTOR,
        PARAMETER,
        VARIABLE,
    ],
    usage_kinds: &[
        NAME_USAGE,
        METHOD_CALL,
        NEW,
        TYPE_USAGE,
        FIELD_ACCESS,
        IMPORT_NAME,
    ],
    other_kinds: &[
        super::FILE_KIND,
        super::TOPLEVEL_KIND,
        super::DIRECTORY_KIND,
        PACKAGE,
        STRING_LITERAL,
        NUMERIC_LITERAL,
    ],
    function_kinds: &[METHOD, CONSTRUCTOR],
    class_kinds: TYPES,
    scope_kinds: &[
        super::FILE_KIND,
        CLASS,
        INTERFACE,
        ENUM,
        RECORD,
        METHOD,
        CONSTRUCTOR,
    ],
    opaque_scope_kinds: &[],
    container_kinds: &[super::FILE_KIND, CLASS, INTERFACE, ENUM, RECORD],
    exported_kinds: &[CLASS, INTERFACE, ENUM, RECORD, METHOD, FIELD],
    overloadable_kinds: &[METHOD],
    import_kinds: &[IMPORT_NAME],
    module_import_kinds: &[],
    import_alias_kind: None,
    member_kinds: &[METHOD_CALL, FIELD_ACCESS, TYPE_USAGE, NEW],
    global_member_lookup: true,
    name_usage_kind: NAME_USAGE,
    target_kinds: &[
        (
            NAME_USAGE,
            &[
                VARIABLE,
                PARAMETER,
                FIELD,
                CLASS,
                INTERFACE,
                ENUM,
                RECORD,
                IMPORT_NAME,
            ],
        ),
        (METHOD_CALL, &[METHOD]),
        (NEW, TYPES_OR_IMPORT),
        (TYPE_USAGE, TYPES_OR_IMPORT),
        (FIELD_ACCESS, &[FIELD, CLASS, INTERFACE, ENUM, RECORD]),
        (IMPORT_NAME, TYPES),
    ],
    builtins: BUILTINS,
};

const BUILTINS: &[&str] = &[
    "Object",
    "String",
    "System",
    "Math",
    "Integer",
    "Long",
    "Double",
    "Float",
    "Boolean",
    "Character",
    "Byte",
    "Short",
    "Number",
    "Void",
    "StringBuilder",
    "List",
    "ArrayList",
    "LinkedList",
    "Map",
    "HashMap",
    "TreeMap",
    "LinkedHashMap",
    "Set",
    "HashSet",
    "TreeSet",
    "Collection",
    "Collections",
    "Arrays",
    "Iterator",
    "Iterable",
    "Optional",
    "Objects",
    "Comparable",
    "Comparator",
    "Runnable",
    "Thread",
    "Deque",
    "ArrayDeque",
    "Queue",
    "Stream",
    "Collectors",
    "Exception",
    "RuntimeException",
    "IllegalArgumentException",
    "IllegalStateException",
    "NullPointerException",
    "UnsupportedOperationException",
    "IndexOutOfBoundsException",
    "Error",
    "Throwable",
    "Override",
    "Deprecated",
    "FunctionalInterface",
    "SuppressWarnings",
    "out",
    "err",
    "println",
    "print",
    "length",
];

const KEYWORDS: &[&str] = &[
    "abstract",
    "assert",
    "boolean",
    "break",
    "byte",
    "case",
    "catch",
    "char",
    "class",
    "const",
    "continue",
    "default",
    "do",
    "double",
    "else",
    "enum",
    "extends",
    "final",
    "finally",
    "float",
    "for",
    "goto",
    "if",
    "implements",
    "import",
    "instanceof",
    "int",
    "interface",
    "long",
    "native",
    "new",
    "package",
    "private",
    "protected",
    "public",
    "return",
    "short",
    "static",
    "strictfp",
    "super",
    "switch",
    "synchronized",
    "this",
    "throw",
    "throws",
    "transient",
    "try",
    "void",
    "volatile",
    "while",
    "true",
    "false",
    "null",
];

const PRIMITIVES: &[&str] = &[
    "boolean", "byte", "char", "short", "int", "long", "float", "double", "void",
];

const MODIFIERS: &[&str] = &[
    "public",
    "protected",
    "private",
    "static",
    "final",
    "abstract",
    "native",
    "synchronized",
    "transient",
    "volatile",
    "strictfp",
    "default",
    "sealed",
    "non-sealed",
];

#[derive(Debug, Clone, Copy)]
pub struct JavaFrontEnd;

impl FrontEnd for JavaFrontEnd {
    fn descriptor(&self) -> &'static FrontEndDescriptor {
        &DESCRIPTOR
    }

    fn parse(&self, path: &str, content: &str) -> ParseResult {
        let mut diagnostics = Vec::new();
        let toks = tokenize(content, path, &mut diagnostics);
        let mut p = Parser {
            toks,
            pos: 0,
            path,
            diagnostics,
        };
        let children = p.compilation_unit();
        let mut root =
            SyntaxNode::new(super::FILE_KIND, file_span(content)).with_children(children);
        root.normalize();
        ParseResult {
            path: path.to_string(),
            language: LANGUAGE,
            root,
            diagnostics: p.diagnostics,
        }
    }

    fn module_candidates(
        &self,
        importer: &ParseResult,
        qualifier: &str,
        name: &str,
    ) -> Vec<String> {
        let package = importer
            .root
            .children
            .iter()
            .find(|n| n.kind == PACKAGE)
            .and_then(|n| n.qualifier.as_deref())
            .unwrap_or("");
        module_candidates(&importer.path, package, qualifier, name)
    }
}

/// Candidate files for type `qualifier.name` imported by `importer`, which
/// declares `package`. The source root is the importer's directory with the
/// package path stripped; the project root is tried as a fallback.
pub fn module_candidates(
    importer: &str,
    package: &str,
    qualifier: &str,
    name: &str,
) -> Vec<String> {
    let mut rel = qualifier.replace('.', "/");
    if !rel.is_empty() {
        rel.push('/');
    }
    rel.push_str(name);
    rel.push_str(".java");

    let dir = importer.rsplit_once('/').map_or("", |(d, _)| d);
    let pkg_path = package.replace('.', "/");
    let source_root = if pkg_path.is_empty() {
        Some(dir)
    } else if dir == pkg_path {
        Some("")
    } else {
        dir.strip_suffix(&format!("/{pkg_path}"))
    };
    let mut out = Vec::new();
    if let Some(root) = source_root {
        out.push(if root.is_empty() {
            rel.clone()
        } else {
            format!("{root}/{rel}")
        });
    }
    if !out.contains(&rel) {
        out.push(rel);
    }
    out
}

// ---------------------------------------------------------------------------
// Tokenizer

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TokKind {
    Ident,
    Keyword,
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
    fn is(&self, text: &str) -> bool {
        matches!(self.kind, TokKind::Op | TokKind::Keyword) && self.text == text
    }

    fn is_ident(&self) -> bool {
        self.kind == TokKind::Ident
    }

    fn span(&self) -> Span {
        Span::new(self.line, self.end_line)
    }
}

const OPERATORS: &[&str] = &[
    ">>>=", "<<=", ">>=", "...", "->", "::", "++", "--", "&&", "||", "==", "!=", "<=", ">=", "+=",
    "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<",
];

fn tokenize(src: &str, path: &str, diags: &mut Vec<Diagnostic>) -> Vec<Tok> {
    let chars: Vec<char> = src.chars().collect();
    let n = chars.len();
    let mut i = 0;
    let mut line: u32 = 1;
    let mut out = Vec::new();
    while i < n {
        let c = chars[i];
        if c == '\n' {
            line += 1;
            i += 1;
        } else if c.is_whitespace() {
            i += 1;
        } else if c == '/' && i + 1 < n && chars[i + 1] == '/' {
            while i < n && chars[i] != '\n' {
                i += 1;
            }
        } else if c == '/' && i + 1 < n && chars[i + 1] == '*' {
            let start = line;
            i += 2;
            while i < n && !(chars[i] == '*' && i + 1 < n && chars[i + 1] == '/') {
                if chars[i] == '\n' {
                    line += 1;
                }
                i += 1;
            }
            if i >= n {
                diags.push(Diagnostic::new(path, start, "unterminated comment"));
            }
            i += 2;
        } else if c == '"' || c == '\'' {
            let start = line;
            let text_block = c == '"' && i + 2 < n && chars[i + 1] == '"' && chars[i + 2] == '"';
            i += if text_block { 3 } else { 1 };
            let mut closed = false;
            while i < n {
                let d = chars[i];
                if d == '\\' {
                    i += 2;
                    continue;
                }
                if d == '\n' {
                    if !text_block {
                        break;
                    }
                    line += 1;
                }
                if d == c
                    && (!text_block || (i + 2 < n && chars[i + 1] == '"' && chars[i + 2] == '"'))
                {
                    i += if text_block { 3 } else { 1 };
                    closed = true;
                    break;
                }
                i += 1;
            }
            if !closed {
                diags.push(Diagnostic::new(path, start, "unterminated literal"));
            }
            let kind = if c == '"' {
                TokKind::Str
            } else {
                TokKind::Number
            };
            out.push(Tok {
                kind,
                text: String::new(),
                line: start,
                end_line: line,
            });
        } else if c.is_ascii_digit() || (c == '.' && i + 1 < n && chars[i + 1].is_ascii_digit()) {
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
            let text = chars[start..i].iter().collect();
            out.push(Tok {
                kind: TokKind::Number,
                text,
                line,
                end_line: line,
            });
        } else if c.is_alphabetic() || c == '_' || c == '$' {
            let start = i;
            while i < n && (chars[i].is_alphanumeric() || chars[i] == '_' || chars[i] == '$') {
                i += 1;
            }
            let text: String = chars[start..i].iter().collect();
            let kind = if KEYWORDS.contains(&text.as_str()) {
                TokKind::Keyword
            } else {
                TokKind::Ident
            };
            out.push(Tok {
                kind,
                text,
                line,
                end_line: line,
            });
        } else {
            let rest: String = chars[i..n.min(i + 4)].iter().collect();
            let op = OPERATORS
                .iter()
                .find(|op| rest.starts_with(*op))
                .map(|s| s.to_string())
                .unwrap_or_else(|| c.to_string());
            i += op.chars().count();
            out.push(Tok {
                kind: TokKind::Op,
                text: op,
                line,
                end_line: line,
            });
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Parser

struct Parser<'a> {
    toks: Vec<Tok>,
    pos: usize,
    path: &'a str,
    diagnostics: Vec<Diagnostic>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Stop {
    /// Stop at an unmatched `}`.
    Block,
    /// Stop at an unmatched `)` or `}`.
    Paren,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, offset: usize) -> Option<&Tok> {
        self.toks.get(self.pos + offset)
    }

    fn at(&self, text: &str) -> bool {
        self.peek().is_some_and(|t| t.is(text))
    }

    fn at_ident(&self) -> bool {
        self.peek().is_some_and(Tok::is_ident)
    }

    fn eat(&mut self, text: &str) -> bool {
        if self.at(text) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn cur_line(&self) -> u32 {
        self.peek()
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.line)
    }

    fn prev_line(&self) -> u32 {
        self.toks
            .get(self.pos.wrapping_sub(1))
            .or_else(|| self.toks.last())
            .map_or(1, |t| t.end_line)
    }

    fn diag(&mut self, line: u32, msg: impl Into<String>) {
        self.diagnostics.push(Diagnostic::new(self.path, line, msg));
    }

    fn expect_close_brace(&mut self, what: &str) {
        if !self.eat("}") {
            let line = self.prev_line();
            self.diag(line, format!("missing `}}` closing {what}"));
        }
    }

    /// Skips a balanced group starting at the current opening token.
    fn skip_group(&mut self, open: &str, close: &str) {
        let mut depth = 0;
        while let Some(t) = self.peek() {
            if t.is(open) {
                depth += 1;
            } else if t.is(close) {
                depth -= 1;
                if depth == 0 {
                    self.pos += 1;
                    return;
                }
            } else if open == "<" && (t.is(";") || t.is("{") || t.is("}")) {
                return;
            }
            self.pos += 1;
        }
    }

    fn skip_annotation(&mut self) {
        self.pos += 1;
        while self.at_ident() {
            self.pos += 1;
            if !(self.at(".") && self.peek_at(1).is_some_and(Tok::is_ident)) {
                break;
            }
            self.pos += 1;
        }
        if self.at("(") {
            self.skip_group("(", ")");
        }
    }

    /// Skips modifiers and annotations; returns the line of the first one.
    fn skip_modifiers(&mut self) -> Option<u32> {
        let mut first = None;
        while let Some(t) = self.peek() {
            let line = t.line;
            if t.is("@") && !self.peek_at(1).is_some_and(|t| t.is("interface")) {
                self.skip_annotation();
            } else if MODIFIERS.contains(&t.text.as_str())
                && matches!(t.kind, TokKind::Keyword | TokKind::Ident)
                && !(t.text == "sealed"
                    && self
                        .peek_at(1)
                        .is_some_and(|n| n.is("(") || n.is("=") || n.is(";")))
            {
                self.pos += 1;
            } else {
                break;
            }
            first.get_or_insert(line);
        }
        first
    }

    fn compilation_unit(&mut self) -> Vec<SyntaxNode> {
        let mut out = Vec::new();
        while let Some(t) = self.peek() {
            if t.is("package") {
                let line = t.line;
                self.pos += 1;
                let name = self.dotted_name();
                self.eat(";");
                out.push(SyntaxNode::new(PACKAGE, Span::line(line)).with_qualifier(Some(name)));
            } else if t.is("import") {
                self.import(&mut out);
            } else if t.is(";") {
                self.pos += 1;
            } else {
                let start = self.skip_modifiers();
                if !self.type_declaration(start, &mut out) {
                    let line = self.cur_line();
                    if self.peek().is_some() {
                        self.diag(line, "unexpected token at top level");
                        self.pos += 1;
                    }
                }
            }
        }
        out
    }

    fn dotted_name(&mut self) -> String {
        let mut parts = Vec::new();
        while self.at_ident() {
            parts.push(self.toks[self.pos].text.clone());
            self.pos += 1;
            if !(self.at(".") && self.peek_at(1).is_some_and(Tok::is_ident)) {
                break;
            }
            self.pos += 1;
        }
        parts.join(".")
    }

    fn import(&mut self, out: &mut Vec<SyntaxNode>) {
        let line = self.toks[self.pos].line;
        self.pos += 1;
        let is_static = self.eat("static");
        let mut parts = Vec::new();
        let mut wildcard = false;
        while let Some(t) = self.peek() {
            if t.is(";") {
                break;
            }
            if t.is_ident() {
                parts.push(t.text.clone());
            } else if t.is("*") {
                wildcard = true;
            } else if !t.is(".") {
                break;
            }
            self.pos += 1;
        }
        if !self.eat(";") {
            self.diag(line, "malformed import");
        }
        if is_static || wildcard {
            return;
        }
        let Some(name) = parts.pop() else {
            self.diag(line, "malformed import");
            return;
        };
        out.push(
            SyntaxNode::named(IMPORT_NAME, Span::line(line), name)
                .with_qualifier(Some(parts.join("."))),
        );
    }

    /// Parses a class, interface, enum, record or annotation type at the
    /// current position. Returns false (consuming nothing) when there is none.
    fn type_declaration(&mut self, start: Option<u32>, out: &mut Vec<SyntaxNode>) -> bool {
        let Some(t) = self.peek().cloned() else {
            return false;
        };
        let kind = match t.text.as_str() {
            "class" if t.kind == TokKind::Keyword => CLASS,
            "interface" if t.kind == TokKind::Keyword => INTERFACE,
            "enum" if t.kind == TokKind::Keyword => ENUM,
            "record"
                if self.peek_at(1).is_some_and(Tok::is_ident)
                    && self.peek_at(2).is_some_and(|t| t.is("(") || t.is("<")) =>
            {
                RECORD
            }
            "@" if self.peek_at(1).is_some_and(|t| t.is("interface")) => {
                self.pos += 1;
                INTERFACE
            }
            _ => return false,
        };
        let start = start.unwrap_or(t.line);
        self.pos += 1;
        let Some(name_tok) = self.peek().filter(|t| t.is_ident()).cloned() else {
            let line = self.cur_line();
            self.diag(line, "missing type name");
            return true;
        };
        self.pos += 1;
        let name = name_tok.text;
        let mut children = Vec::new();
        if self.at("<") {
            self.skip_group("<", ">");
        }
        if kind == RECORD && self.at("(") {
            self.pos += 1;
            self.parameters(FIELD, &mut children);
        }
        loop {
            let permits = self
                .peek()
                .is_some_and(|t| t.is_ident() && t.text == "permits");
            if permits {
                self.pos += 1;
            }
            if permits || self.eat("extends") || self.eat("implements") {
                loop {
                    if !self.parse_type(&mut children) {
                        break;
                    }
                    if !self.eat(",") {
                        break;
                    }
                }
            } else {
                break;
            }
        }
        if !self.eat("{") {
            let line = self.cur_line();
            self.diag(line, format!("missing body for `{name}`"));
            out.push(
                SyntaxNode::named(kind, Span::new(start, self.prev_line()), name)
                    .with_children(children),
            );
            return true;
        }
        if kind == ENUM {
            self.enum_constants(&mut children);
        }
        self.class_body(&name, &mut children);
        self.expect_close_brace(&format!("`{name}`"));
        let end = self.prev_line();
        out.push(SyntaxNode::named(kind, Span::new(start, end), name).with_children(children));
        true
    }

    fn enum_constants(&mut self, out: &mut Vec<SyntaxNode>) {
        loop {
            while self.at("@") {
                self.skip_annotation();
            }
            let Some(t) = self.peek().filter(|t| t.is_ident()).cloned() else {
                break;
            };
            self.pos += 1;
            let mut field = SyntaxNode::named(FIELD, t.span(), t.text.clone());
            if self.eat("(") {
                self.scan(Stop::Paren, out);
                self.eat(")");
            }
            if self.eat("{") {
                self.class_body(&t.text, &mut field.children);
                self.expect_close_brace("enum constant body");
                field.span.end = self.prev_line();
            }
            out.push(field);
            if !self.eat(",") {
                break;
            }
        }
        self.eat(";");
    }

    /// Members up to (not including) the closing `}`.
    fn class_body(&mut self, class_name: &str, out: &mut Vec<SyntaxNode>) {
        while let Some(t) = self.peek() {
            if t.is("}") {
                return;
            }
            if t.is(";") {
                self.pos += 1;
                continue;
            }
            let start = self.skip_modifiers();
            if self.at("{") {
                self.pos += 1;
                self.scan(Stop::Block, out);
                self.expect_close_brace("initializer");
                continue;
            }
            if self.type_declaration(start, out) {
                continue;
            }
            if self.at("<") {
                self.skip_group("<", ">");
            }
            let start = start.unwrap_or_else(|| self.cur_line());
            let is_ctor = self
                .peek()
                .is_some_and(|t| t.is_ident() && t.text == class_name)
                && self.peek_at(1).is_some_and(|t| t.is("("));
            if is_ctor {
                let name = self.toks[self.pos].text.clone();
                self.pos += 1;
                self.method_rest(CONSTRUCTOR, name, start, Vec::new(), out);
                continue;
            }
            let mut types = Vec::new();
            let save = self.pos;
            if self.parse_type(&mut types) && self.at_ident() {
                let name_tok = self.toks[self.pos].clone();
                self.pos += 1;
                if self.at("(") {
                    self.method_rest(METHOD, name_tok.text, start, types, out);
                } else {
                    out.extend(types);
                    self.pos -= 1;
                    self.declarators(FIELD, out);
                    self.eat(";");
                }
                continue;
            }
            self.pos = save;
            if let Some(t) = self.peek() {
                if t.is("}") {
                    return;
                }
                let line = t.line;
                self.diag(line, "unexpected token in class body");
                self.pos += 1;
            }
        }
    }

    /// After a method or constructor name: parameters, throws clause, body.
    fn method_rest(
        &mut self,
        kind: &'static str,
        name: String,
        start: u32,
        mut children: Vec<SyntaxNode>,
        out: &mut Vec<SyntaxNode>,
    ) {
        self.pos += 1; // (
        self.parameters(PARAMETER, &mut children);
        while self.at("[") {
            self.skip_group("[", "]");
        }
        if self.eat("throws") {
            loop {
                if !self.parse_type(&mut children) || !self.eat(",") {
                    break;
                }
            }
        }
        if self.eat("default") {
            self.scan_until_semicolon(&mut children);
        }
        if self.eat("{") {
            self.scan(Stop::Block, &mut children);
            self.expect_close_brace(&format!("`{name}`"));
        } else if !self.eat(";") {
            let line = self.cur_line();
            self.diag(line, format!("missing body for `{name}`"));
        }
        let end = self.prev_line().max(start);
        out.push(SyntaxNode::named(kind, Span::new(start, end), name).with_children(children));
    }

    /// Formal parameters after `(`, consuming the closing `)`.
    fn parameters(&mut self, kind: &'static str, out: &mut Vec<SyntaxNode>) {
        loop {
            if self.eat(")") {
                return;
            }
            self.skip_modifiers();
            if self.parse_type(out) {
                if let Some(t) = self
                    .peek()
                    .filter(|t| t.is_ident() || t.is("this"))
                    .cloned()
                {
                    self.pos += 1;
                    if t.is_ident() {
                        out.push(SyntaxNode::named(kind, t.span(), t.text));
                    }
                    while self.at("[") {
                        self.skip_group("[", "]");
                    }
                }
            }
            if self.eat(",") {
                continue;
            }
            if self.eat(")") {
                return;
            }
            let line = self.cur_line();
            self.diag(line, "malformed parameter list");
            // resynchronize at the closing parenthesis
            while let Some(t) = self.peek() {
                if t.is("{") || t.is(";") || t.is("}") {
                    return;
                }
                let close = t.is(")");
                self.pos += 1;
                if close {
                    return;
                }
            }
            return;
        }
    }

    /// A type reference. Emits type-usages for named types.
    fn parse_type(&mut self, out: &mut Vec<SyntaxNode>) -> bool {
        while self.at("@") {
            self.skip_annotation();
        }
        let Some(t) = self.peek().cloned() else {
            return false;
        };
        if t.kind == TokKind::Keyword && PRIMITIVES.contains(&t.text.as_str()) {
            self.pos += 1;
        } else if t.is_ident() {
            let mut parts = vec![t.clone()];
            self.pos += 1;
            let mut nested = Vec::new();
            loop {
                if self.at("<") && !self.type_arguments(&mut nested) {
                    return false;
                }
                if self.at(".") && self.peek_at(1).is_some_and(Tok::is_ident) {
                    self.pos += 1;
                    parts.push(self.toks[self.pos].clone());
                    self.pos += 1;
                } else {
                    break;
                }
            }
            let last = parts.pop().expect("at least one part");
            if !(parts.is_empty() && last.text == "var") {
                let qualifier = (!parts.is_empty()).then(|| {
                    parts
                        .iter()
                        .map(|p| p.text.as_str())
                        .collect::<Vec<_>>()
                        .join(".")
                });
                out.push(
                    SyntaxNode::named(TYPE_USAGE, last.span(), last.text).with_qualifier(qualifier),
                );
            }
            out.extend(nested);
        } else {
            return false;
        }
        while self.at("[") && self.peek_at(1).is_some_and(|t| t.is("]")) {
            self.pos += 2;
        }
        self.eat("...");
        true
    }

    /// `<...>` after a type name. Fails without consuming on anything that is
    /// not a well-formed argument list.
    fn type_arguments(&mut self, out: &mut Vec<SyntaxNode>) -> bool {
        let save = self.pos;
        let mut nodes = Vec::new();
        self.pos += 1;
        if self.eat(">") {
            return true;
        }
        loop {
            if self.eat("?") {
                if (self.eat("extends") || self.eat("super")) && !self.parse_type(&mut nodes) {
                    break;
                }
            } else if !self.parse_type(&mut nodes) {
                break;
            }
            while self.eat("&") {
                if !self.parse_type(&mut nodes) {
                    break;
                }
            }
            if self.eat(",") {
                continue;
            }
            if self.eat(">") {
                out.extend(nodes);
                return true;
            }
            break;
        }
        self.pos = save;
        false
    }

    /// `name [= init] {, name [= init]}` for fields and locals. Leaves the
    /// terminating token in place.
    fn declarators(&mut self, kind: &'static str, out: &mut Vec<SyntaxNode>) {
        while let Some(t) = self.peek().filter(|t| t.is_ident()).cloned() {
            self.pos += 1;
            out.push(SyntaxNode::named(kind, t.span(), t.text));
            while self.at("[") {
                self.skip_group("[", "]");
            }
            if self.eat("=") {
                self.scan_expression(out);
            }
            if !self.eat(",") {
                break;
            }
        }
    }

    fn scan_until_semicolon(&mut self, out: &mut Vec<SyntaxNode>) {
        self.scan_expression(out);
        self.eat(";");
    }

    /// One expression: stops before a depth-0 `,`, `;`, `)` or `}`.
    fn scan_expression(&mut self, out: &mut Vec<SyntaxNode>) {
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if depth == 0 && (t.is(",") || t.is(";") || t.is(")") || t.is("}")) {
                return;
            }
            if t.is("(") || t.is("[") {
                depth += 1;
            } else if t.is(")") || t.is("]") {
                depth = depth.saturating_sub(1);
            }
            if t.is("{") {
                self.pos += 1;
                self.scan(Stop::Block, out);
                self.expect_close_brace("block");
                continue;
            }
            self.scan_token(out, true);
        }
    }

    /// Local declaration at statement start: `[final] Type name (= | ; | , | :)`.
    fn try_local_declaration(&mut self, out: &mut Vec<SyntaxNode>) -> bool {
        let save = self.pos;
        self.skip_modifiers();
        let mut types = Vec::new();
        if self.parse_type(&mut types)
            && self.at_ident()
            && self
                .peek_at(1)
                .is_some_and(|t| t.is("=") || t.is(";") || t.is(",") || t.is(":") || t.is("["))
        {
            out.extend(types);
            self.declarators(VARIABLE, out);
            return true;
        }
        self.pos = save;
        false
    }

    /// Statements and expressions up to the matching close token.
    fn scan(&mut self, stop: Stop, out: &mut Vec<SyntaxNode>) {
        let mut stmt_start = stop == Stop::Block;
        let mut depth = 0usize;
        while let Some(t) = self.peek() {
            if t.is("}") {
                return;
            }
            if t.is(")") || t.is("]") {
                if depth == 0 {
                    if stop == Stop::Paren {
                        return;
                    }
                    let line = t.line;
                    self.diag(line, format!("unmatched `{}`", t.text));
                    self.pos += 1;
                    continue;
                }
                depth -= 1;
                self.pos += 1;
                stmt_start = false;
                continue;
            }
            if t.is("{") {
                self.pos += 1;
                self.scan(Stop::Block, out);
                self.expect_close_brace("block");
                stmt_start = true;
                continue;
            }
            if t.is(";") || t.is(":") || t.is("->") {
                self.pos += 1;
                stmt_start = true;
                continue;
            }
            if stmt_start {
                stmt_start = false;
                let start = self.skip_modifiers();
                if self.type_declaration(start, out) {
                    stmt_start = true;
                    continue;
                }
                if self.try_local_declaration(out) {
                    continue;
                }
            }
            let Some(t) = self.peek().cloned() else {
                return;
            };
            if (t.is("for") || t.is("try")) && self.peek_at(1).is_some_and(|n| n.is("(")) {
                self.pos += 2;
                depth += 1;
                stmt_start = true;
                continue;
            }
            if t.is("catch") && self.peek_at(1).is_some_and(|n| n.is("(")) {
                self.pos += 2;
                self.skip_modifiers();
                while self.parse_type(out) {
                    if !self.eat("|") {
                        break;
                    }
                }
                if let Some(name) = self.peek().filter(|t| t.is_ident()).cloned() {
                    self.pos += 1;
                    out.push(SyntaxNode::named(PARAMETER, name.span(), name.text));
                }
                self.eat(")");
                continue;
            }
            if t.is("(") && self.lambda_parameters(out) {
                stmt_start = true;
                continue;
            }
            if t.is("(") || t.is("[") {
                depth += 1;
                self.pos += 1;
                continue;
            }
            self.scan_token(out, true);
        }
    }

    /// `(a, b) ->` or `(T a, U b) ->` at the current `(`.
    fn lambda_parameters(&mut self, out: &mut Vec<SyntaxNode>) -> bool {
        let save = self.pos;
        let mut depth = 0;
        let mut close = None;
        for (i, t) in self.toks.iter().enumerate().skip(self.pos) {
            if t.is("(") {
                depth += 1;
            } else if t.is(")") {
                depth -= 1;
                if depth == 0 {
                    close = Some(i);
                    break;
                }
            } else if t.is(";") || t.is("{") || t.is("}") {
                break;
            }
        }
        let Some(close) = close else { return false };
        if !self.toks.get(close + 1).is_some_and(|t| t.is("->")) {
            return false;
        }
        self.pos += 1;
        let mut nodes = Vec::new();
        while self.pos < close {
            self.skip_modifiers();
            let bare = self.at_ident() && self.peek_at(1).is_some_and(|t| t.is(",") || t.is(")"));
            if !bare && !self.parse_type(&mut nodes) {
                self.pos = save;
                return false;
            }
            match self.peek().filter(|t| t.is_ident()).cloned() {
                Some(name) => {
                    self.pos += 1;
                    nodes.push(SyntaxNode::named(PARAMETER, name.span(), name.text));
                }
                None if bare => unreachable!(),
                None => {
                    self.pos = save;
                    return false;
                }
            }
            if !self.eat(",") {
                break;
            }
        }
        if self.pos != close {
            self.pos = save;
            return false;
        }
        self.pos = close + 2;
        out.extend(nodes);
        true
    }

    /// Receiver chain before the member at `i` (`toks[i - 1]` is `.`).
    /// `None` for `this.`/`super.` members.
    fn qualifier_before(&self, i: usize) -> Option<String> {
        let mut parts = Vec::new();
        let mut j = i as isize - 2;
        while j >= 0 {
            let t = &self.toks[j as usize];
            if t.is_ident() {
                parts.push(t.text.as_str());
            } else if t.is("this") || t.is("super") {
                if parts.is_empty() {
                    return None;
                }
                break;
            } else {
                return Some("<expr>".to_string());
            }
            if j >= 1 && self.toks[j as usize - 1].is(".") {
                j -= 2;
            } else {
                break;
            }
        }
        if parts.is_empty() {
            return Some("<expr>".to_string());
        }
        parts.reverse();
        Some(parts.join("."))
    }

    /// Consumes one expression token, emitting a node when it is a name,
    /// literal or `new`.
    fn scan_token(&mut self, out: &mut Vec<SyntaxNode>, allow_bodies: bool) {
        let i = self.pos;
        let t = self.toks[i].clone();
        self.pos += 1;
        match t.kind {
            TokKind::Str => out.push(SyntaxNode::new(STRING_LITERAL, t.span())),
            TokKind::Number => out.push(SyntaxNode::new(NUMERIC_LITERAL, t.span())),
            TokKind::Op if t.text == "@" => {
                self.pos -= 1;
                self.skip_annotation();
            }
            TokKind::Op => {}
            TokKind::Keyword if t.text == "new" => self.new_expression(t.line, out, allow_bodies),
            TokKind::Keyword if t.text == "instanceof" => {
                self.eat("final");
                if self.parse_type(out) && self.at_ident() {
                    let name = self.toks[self.pos].clone();
                    self.pos += 1;
                    out.push(SyntaxNode::named(VARIABLE, name.span(), name.text));
                }
            }
            TokKind::Keyword => {}
            TokKind::Ident => {
                let prev = i.checked_sub(1).map(|p| &self.toks[p]);
                let next = self.toks.get(i + 1);
                if prev.is_some_and(|p| p.is("::")) {
                    return;
                }
                let name = t.text.clone();
                if prev.is_some_and(|p| p.is(".")) {
                    let kind = if next.is_some_and(|n| n.is("(")) {
                        METHOD_CALL
                    } else {
                        FIELD_ACCESS
                    };
                    let qualifier = self.qualifier_before(i);
                    out.push(SyntaxNode::named(kind, t.span(), name).with_qualifier(qualifier));
                } else if next.is_some_and(|n| n.is("->")) {
                    out.push(SyntaxNode::named(PARAMETER, t.span(), name));
                } else if next.is_some_and(|n| n.is("(")) {
                    out.push(SyntaxNode::named(METHOD_CALL, t.span(), name));
                } else {
                    out.push(SyntaxNode::named(NAME_USAGE, t.span(), name));
                }
            }
        }
    }

    fn new_expression(&mut self, line: u32, out: &mut Vec<SyntaxNode>, allow_bodies: bool) {
        while self.at("@") {
            self.skip_annotation();
        }
        let Some(first) = self.peek().cloned() else {
            return;
        };
        if first.kind == TokKind::Keyword {
            // primitive array creation
            return;
        }
        if !first.is_ident() {
            self.diag(line, "malformed `new` expression");
            return;
        }
        let mut parts = vec![first];
        self.pos += 1;
        let mut nested = Vec::new();
        loop {
            if self.at("<") && !self.type_arguments(&mut nested) {
                self.skip_group("<", ">");
            }
            if self.at(".") && self.peek_at(1).is_some_and(Tok::is_ident) {
                self.pos += 1;
                parts.push(self.toks[self.pos].clone());
                self.pos += 1;
            } else {
                break;
            }
        }
        let last = parts.pop().expect("at least one part");
        let qualifier = (!parts.is_empty()).then(|| {
            parts
                .iter()
                .map(|p| p.text.as_str())
                .collect::<Vec<_>>()
                .join(".")
        });
        if self.at("[") {
            out.push(
                SyntaxNode::named(TYPE_USAGE, last.span(), last.text).with_qualifier(qualifier),
            );
            out.extend(nested);
            return;
        }
        let mut node =
            SyntaxNode::named(NEW, last.span(), last.text.clone()).with_qualifier(qualifier);
        out.push(SyntaxNode::new("", Span::EMPTY)); // placeholder keeps source order
        let slot = out.len() - 1;
        out.extend(nested);
        if self.eat("(") {
            self.scan(Stop::Paren, out);
            self.eat(")");
        }
        if allow_bodies && self.at("{") {
            self.pos += 1;
            self.class_body(&last.text, &mut node.children);
            self.expect_close_brace("anonymous class");
            node.span.end = self.prev_line();
        }
        out[slot] = node;
    }
}
