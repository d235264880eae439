//! The `.gt` and `.cfsm` text formats.
//!
//! ```text
//! # comment
//! gtype g0 {
//!   processes: p, q;
//!   messages: m;
//!   arrows: p->q:m;          # optional; defaults to the arrows used below
//!   states: s0*, s1+;        # * initial, + accepting
//!   s0 -- p->q:m --> s1;
//! }
//! ```
//!
//! A `.cfsm` file has the same shape with header `cfsm <process>`, an
//! optional `actions:` list and labels `p!q:m` (send) or `q?p:m` (receive).
//! State names are identifiers or double-quoted strings; `eps` labels an
//! epsilon move.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::Arc;

use crate::automata::{Letter, Nfa};
use crate::gtype::GlobalType;
use crate::semantics::{Action, Cfsm};
use crate::trace::{is_identifier, Arrow, Declaration, TraceError};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Ident(String),
    Str(String),
    LBrace,
    RBrace,
    Colon,
    Semi,
    Comma,
    Star,
    Plus,
    Dash2,
    LongArrow,
    Arrow,
    Bang,
    Question,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Colon => "`:`".into(),
            Tok::Semi => "`;`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Star => "`*`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Dash2 => "`--`".into(),
            Tok::LongArrow => "`-->`".into(),
            Tok::Arrow => "`->`".into(),
            Tok::Bang => "`!`".into(),
            Tok::Question => "`?`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, column, message: String| ParseError { line, column, message };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let advance = |n: usize, i: &mut usize, col: &mut usize| {
            *i += n;
            *col += n;
        };
        match c {
            '\n' => {
                i += 1;
                line += 1;
                col = 1;
                continue;
            }
            c if c.is_whitespace() => {
                advance(1, &mut i, &mut col);
                continue;
            }
            '#' => {
                while i < chars.len() && chars[i] != '\n' {
                    i += 1;
                }
                continue;
            }
            '{' | '}' | ':' | ';' | ',' | '*' | '+' | '!' | '?' => {
                let tok = match c {
                    '{' => Tok::LBrace,
                    '}' => Tok::RBrace,
                    ':' => Tok::Colon,
                    ';' => Tok::Semi,
                    ',' => Tok::Comma,
                    '*' => Tok::Star,
                    '+' => Tok::Plus,
                    '!' => Tok::Bang,
                    _ => Tok::Question,
                };
                advance(1, &mut i, &mut col);
                out.push(Token { tok, line: l0, col: c0 });
            }
            '-' => {
                let next = chars.get(i + 1).copied();
                let next2 = chars.get(i + 2).copied();
                let (tok, n) = match (next, next2) {
                    (Some('-'), Some('>')) => (Tok::LongArrow, 3),
                    (Some('-'), _) => (Tok::Dash2, 2),
                    (Some('>'), _) => (Tok::Arrow, 2),
                    _ => return Err(err(l0, c0, "unexpected `-`".into())),
                };
                advance(n, &mut i, &mut col);
                out.push(Token { tok, line: l0, col: c0 });
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                col += 1;
                loop {
                    match chars.get(i) {
                        None | Some('\n') => return Err(err(l0, c0, "unterminated string".into())),
                        Some('"') => {
                            i += 1;
                            col += 1;
                            break;
                        }
                        Some('\\') => {
                            match chars.get(i + 1) {
                                Some(&e @ ('"' | '\\')) => s.push(e),
                                _ => return Err(err(line, col, "invalid escape".into())),
                            }
                            i += 2;
                            col += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                            col += 1;
                        }
                    }
                }
                out.push(Token {
                    tok: Tok::Str(s),
                    line: l0,
                    col: c0,
                });
            }
            c if c.is_ascii_alphabetic() => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_' || chars[i] == '\'') {
                    i += 1;
                }
                col += i - start;
                out.push(Token {
                    tok: Tok::Ident(chars[start..i].iter().collect()),
                    line: l0,
                    col: c0,
                });
            }
            other => return Err(err(l0, c0, format!("unexpected character `{other}`"))),
        }
    }
    out.push(Token {
        tok: Tok::Eof,
        line,
        col,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error_at(&self, t: &Token, message: impl Into<String>) -> ParseError {
        ParseError {
            line: t.line,
            column: t.col,
            message: message.into(),
        }
    }

    fn expect(&mut self, tok: Tok) -> Result<Token, ParseError> {
        let t = self.next();
        if t.tok == tok {
            Ok(t)
        } else {
            Err(self.error_at(&t, format!("expected {}, found {}", tok.describe(), t.tok.describe())))
        }
    }

    fn ident(&mut self) -> Result<(String, Token), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            _ => Err(self.error_at(&t, format!("expected identifier, found {}", t.tok.describe()))),
        }
    }

    fn state_name(&mut self) -> Result<(String, Token), ParseError> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) | Tok::Str(s) => Ok((s.clone(), t.clone())),
            _ => Err(self.error_at(&t, format!("expected state name, found {}", t.tok.describe()))),
        }
    }

    /// Comma-separated items up to `;` (possibly empty).
    fn list<T>(&mut self, mut item: impl FnMut(&mut Self) -> Result<T, ParseError>) -> Result<Vec<T>, ParseError> {
        let mut out = Vec::new();
        if self.peek().tok == Tok::Semi {
            self.next();
            return Ok(out);
        }
        loop {
            out.push(item(self)?);
            let t = self.next();
            match t.tok {
                Tok::Comma => continue,
                Tok::Semi => return Ok(out),
                _ => return Err(self.error_at(&t, format!("expected `,` or `;`, found {}", t.tok.describe()))),
            }
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Kind {
    GlobalType,
    Cfsm,
}

enum Label {
    Epsilon,
    Arrow(Arrow),
    Action(Action),
}

struct Parsed {
    name: String,
    decl: Arc<Declaration>,
    alphabet: Option<Vec<Label>>,
    states: Vec<(String, bool, bool)>,
    transitions: Vec<(usize, Label, usize, Token)>,
}

fn trace_error(p: &Parser, t: &Token, e: TraceError) -> ParseError {
    p.error_at(t, e.to_string())
}

fn parse_label(p: &mut Parser, kind: Kind, decl: &Declaration) -> Result<Label, ParseError> {
    let start = p.peek().clone();
    let (a, at) = p.ident()?;
    if a == "eps" && *p.peek_at(0) == Tok::LongArrow {
        return Ok(Label::Epsilon);
    }
    let op = p.next();
    let (b, bt) = p.ident()?;
    p.expect(Tok::Colon)?;
    let (m, mt) = p.ident()?;
    let lookup_p = |p: &Parser, name: &str, t: &Token| decl.process(name).map_err(|e| trace_error(p, t, e));
    let pa = lookup_p(p, &a, &at)?;
    let pb = lookup_p(p, &b, &bt)?;
    let msg = decl.message(&m).map_err(|e| trace_error(p, &mt, e))?;
    if pa == pb {
        return Err(trace_error(p, &start, TraceError::SelfMessage(format!("{a}->{b}:{m}"))));
    }
    match (kind, &op.tok) {
        (Kind::GlobalType, Tok::Arrow) => Ok(Label::Arrow(Arrow {
            sender: pa,
            receiver: pb,
            message: msg,
        })),
        (Kind::Cfsm, Tok::Bang) => Ok(Label::Action(Action::send(Arrow {
            sender: pa,
            receiver: pb,
            message: msg,
        }))),
        (Kind::Cfsm, Tok::Question) => Ok(Label::Action(Action::receive(Arrow {
            sender: pb,
            receiver: pa,
            message: msg,
        }))),
        (Kind::GlobalType, _) => Err(p.error_at(&op, format!("expected `->`, found {}", op.tok.describe()))),
        (Kind::Cfsm, _) => Err(p.error_at(&op, format!("expected `!` or `?`, found {}", op.tok.describe()))),
    }
}

fn parse_file(src: &str, kind: Kind) -> Result<Parsed, ParseError> {
    let mut p = Parser { toks: lex(src)?, pos: 0 };
    let keyword = match kind {
        Kind::GlobalType => "gtype",
        Kind::Cfsm => "cfsm",
    };
    let (kw, kt) = p.ident()?;
    if kw != keyword {
        return Err(p.error_at(&kt, format!("expected `{keyword}`, found `{kw}`")));
    }
    let (name, _) = p.ident()?;
    p.expect(Tok::LBrace)?;

    let mut processes: Option<Vec<String>> = None;
    let mut messages: Option<Vec<String>> = None;
    let mut decl: Option<Arc<Declaration>> = None;
    let mut alphabet: Option<Vec<Label>> = None;
    let mut states: Vec<(String, bool, bool)> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut states_seen = false;
    let mut transitions = Vec::new();

    loop {
        let t = p.peek().clone();
        match &t.tok {
            Tok::RBrace => {
                p.next();
                break;
            }
            Tok::Ident(word) if *p.peek_at(1) == Tok::Colon => {
                let word = word.clone();
                p.next();
                p.next();
                match word.as_str() {
                    "processes" | "messages" => {
                        if decl.is_some() {
                            return Err(p.error_at(&t, format!("`{word}` must precede states, arrows and transitions")));
                        }
                        let slot = if word == "processes" { &mut processes } else { &mut messages };
                        if slot.is_some() {
                            return Err(p.error_at(&t, format!("duplicate `{word}` section")));
                        }
                        *slot = Some(p.list(|p| p.ident().map(|(s, _)| s))?);
                    }
                    "arrows" | "actions" => {
                        let expected = if kind == Kind::GlobalType { "arrows" } else { "actions" };
                        if word != expected {
                            return Err(p.error_at(&t, format!("`{word}` is not allowed here")));
                        }
                        if alphabet.is_some() {
                            return Err(p.error_at(&t, format!("duplicate `{word}` section")));
                        }
                        let d = ensure_decl(&p, &t, &mut decl, &processes, &messages)?;
                        alphabet = Some(p.list(|p| {
                            let at = p.peek().clone();
                            match parse_label(p, kind, &d)? {
                                Label::Epsilon => Err(p.error_at(&at, "`eps` cannot be declared")),
                                l => Ok(l),
                            }
                        })?);
                    }
                    "states" => {
                        if states_seen {
                            return Err(p.error_at(&t, "duplicate `states` section"));
                        }
                        states_seen = true;
                        ensure_decl(&p, &t, &mut decl, &processes, &messages)?;
                        let list = p.list(|p| {
                            let (s, st) = p.state_name()?;
                            let (mut init, mut acc) = (false, false);
                            loop {
                                match p.peek().tok {
                                    Tok::Star => init = true,
                                    Tok::Plus => acc = true,
                                    _ => break,
                                }
                                p.next();
                            }
                            Ok((s, st, init, acc))
                        })?;
                        for (s, st, init, acc) in list {
                            if index.contains_key(&s) {
                                return Err(p.error_at(&st, format!("duplicate state `{s}`")));
                            }
                            index.insert(s.clone(), states.len());
                            states.push((s, init, acc));
                        }
                    }
                    _ => return Err(p.error_at(&t, format!("unknown section `{word}`"))),
                }
            }
            Tok::Ident(_) | Tok::Str(_) => {
                let d = ensure_decl(&p, &t, &mut decl, &processes, &messages)?;
                let (from, _) = p.state_name()?;
                p.expect(Tok::Dash2)?;
                let lt = p.peek().clone();
                let label = parse_label(&mut p, kind, &d)?;
                p.expect(Tok::LongArrow)?;
                let (to, _) = p.state_name()?;
                if p.peek().tok != Tok::RBrace {
                    p.expect(Tok::Semi)?;
                }
                let mut id = |s: String| {
                    *index.entry(s.clone()).or_insert_with(|| {
                        states.push((s, false, false));
                        states.len() - 1
                    })
                };
                let (f, g) = (id(from), id(to));
                transitions.push((f, label, g, lt));
            }
            _ => return Err(p.error_at(&t, format!("unexpected {}", t.tok.describe()))),
        }
    }
    let end = p.peek().clone();
    if end.tok != Tok::Eof {
        return Err(p.error_at(&end, format!("unexpected {} after `}}`", end.tok.describe())));
    }
    let decl = ensure_decl(&p, &end, &mut decl, &processes, &messages)?;
    if states.is_empty() {
        states.push(("s0".into(), true, false));
    }
    if !states.iter().any(|s| s.1) {
        return Err(p.error_at(&end, "no initial state; mark one with `*`"));
    }
    Ok(Parsed {
        name,
        decl,
        alphabet,
        states,
        transitions,
    })
}

fn ensure_decl(
    p: &Parser,
    at: &Token,
    decl: &mut Option<Arc<Declaration>>,
    processes: &Option<Vec<String>>,
    messages: &Option<Vec<String>>,
) -> Result<Arc<Declaration>, ParseError> {
    if let Some(d) = decl {
        return Ok(d.clone());
    }
    let (Some(ps), Some(ms)) = (processes, messages) else {
        return Err(p.error_at(at, "`processes` and `messages` must be declared first"));
    };
    let d = Arc::new(Declaration::new(ps.iter().map(String::as_str), ms.iter().map(String::as_str)).map_err(|e| p.error_at(at, e.to_string()))?);
    *decl = Some(d.clone());
    Ok(d)
}

fn build<L: Letter>(
    parsed: &Parsed,
    declared: Option<Vec<L>>,
    letter: impl Fn(&Label) -> Option<L>,
) -> Result<Nfa<L>, ParseError> {
    let used: BTreeSet<L> = parsed.transitions.iter().filter_map(|(_, l, _, _)| letter(l)).collect();
    let alphabet = match declared {
        Some(a) => {
            for (_, l, _, t) in &parsed.transitions {
                if let Some(x) = letter(l) {
                    if !a.contains(&x) {
                        return Err(ParseError {
                            line: t.line,
                            column: t.col,
                            message: "label is not in the declared alphabet".into(),
                        });
                    }
                }
            }
            a
        }
        None => used.into_iter().collect(),
    };
    let mut nfa = Nfa::new(alphabet);
    for (name, init, acc) in &parsed.states {
        let s = nfa.add_state(name.clone(), *acc);
        if *init {
            nfa.set_initial(s).expect("in range");
        }
    }
    for (f, l, g, _) in &parsed.transitions {
        let x = letter(l);
        nfa.add_transition(*f, x.as_ref(), *g).expect("letters are in the alphabet");
    }
    Ok(nfa)
}

pub fn parse_gt(src: &str) -> Result<GlobalType, ParseError> {
    let parsed = parse_file(src, Kind::GlobalType)?;
    let arrow = |l: &Label| match l {
        Label::Arrow(a) => Some(*a),
        _ => None,
    };
    let declared = parsed.alphabet.as_ref().map(|ls| ls.iter().filter_map(arrow).collect());
    let nfa = build(&parsed, declared, arrow)?;
    GlobalType::new(parsed.name.clone(), parsed.decl.clone(), nfa).map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })
}

/// Parses a `.cfsm` file; returns the declaration with the machine.
pub fn parse_cfsm(src: &str) -> Result<(Arc<Declaration>, Cfsm), ParseError> {
    let parsed = parse_file(src, Kind::Cfsm)?;
    let process = parsed.decl.process(&parsed.name).map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })?;
    let action = |l: &Label| match l {
        Label::Action(a) => Some(*a),
        _ => None,
    };
    if parsed.transitions.iter().any(|(_, l, _, _)| matches!(l, Label::Epsilon)) {
        let t = &parsed
            .transitions
            .iter()
            .find(|(_, l, _, _)| matches!(l, Label::Epsilon))
            .expect("found")
            .3;
        return Err(ParseError {
            line: t.line,
            column: t.col,
            message: "local machines cannot have epsilon moves".into(),
        });
    }
    let declared = parsed.alphabet.as_ref().map(|ls| ls.iter().filter_map(action).collect());
    let nfa = build(&parsed, declared, action)?;
    let cfsm = Cfsm::new(process, nfa, &parsed.decl).map_err(|e| ParseError {
        line: 1,
        column: 1,
        message: e.to_string(),
    })?;
    Ok((parsed.decl, cfsm))
}

fn quote_state(name: &str) -> String {
    if is_identifier(name) && name != "eps" {
        name.to_string()
    } else {
        let escaped = name.replace('\\', "\\\\").replace('"', "\\\"");
        format!("\"{escaped}\"")
    }
}

/// State names made unique by suffixing `#k` to repeats.
pub(crate) fn unique_names(names: &[String]) -> Vec<String> {
    let taken: BTreeSet<&str> = names.iter().map(String::as_str).collect();
    let mut seen: BTreeSet<String> = BTreeSet::new();
    names
        .iter()
        .map(|n| {
            if seen.insert(n.clone()) {
                return n.clone();
            }
            let mut k = 1;
            loop {
                let candidate = format!("{n}#{k}");
                if !taken.contains(candidate.as_str()) && seen.insert(candidate.clone()) {
                    return candidate;
                }
                k += 1;
            }
        })
        .collect()
}

fn sanitize_name(name: &str) -> String {
    let mut s: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '_' || c == '\'' { c } else { '_' })
        .collect();
    if !s.starts_with(|c: char| c.is_ascii_alphabetic()) {
        s.insert(0, 'g');
    }
    s
}

fn render<L: Letter>(
    keyword: &str,
    name: &str,
    decl: &Declaration,
    alphabet_key: &str,
    nfa: &Nfa<L>,
    show: impl Fn(&L) -> String,
) -> String {
    let names = unique_names(nfa.state_names());
    let mut out = String::new();
    out.push_str(&format!("{keyword} {} {{\n", sanitize_name(name)));
    let ps: Vec<&str> = decl.processes().map(|p| decl.process_name(p)).collect();
    let ms: Vec<&str> = decl.messages().map(|m| decl.message_name(m)).collect();
    out.push_str(&format!("  processes: {};\n", ps.join(", ")));
    out.push_str(&format!("  messages: {};\n", ms.join(", ")));
    let letters: Vec<String> = nfa.alphabet().iter().map(&show).collect();
    out.push_str(&format!("  {alphabet_key}: {};\n", letters.join(", ")));
    let states: Vec<String> = (0..nfa.num_states())
        .map(|s| {
            let mut t = quote_state(&names[s]);
            if nfa.initial_states().contains(&s) {
                t.push('*');
            }
            if nfa.is_accepting(s) {
                t.push('+');
            }
            t
        })
        .collect();
    out.push_str(&format!("  states: {};\n", states.join(", ")));
    for (s, l, t) in nfa.transitions() {
        let label = l.map(&show).unwrap_or_else(|| "eps".into());
        out.push_str(&format!("  {} -- {} --> {};\n", quote_state(&names[s]), label, quote_state(&names[t])));
    }
    out.push_str("}\n");
    out
}

pub fn render_gt(g: &GlobalType) -> String {
    let decl = g.decl();
    render("gtype", g.name(), decl, "arrows", g.automaton(), |a| decl.show_arrow(a))
}

pub fn render_cfsm(decl: &Declaration, m: &Cfsm) -> String {
    render(
        "cfsm",
        decl.process_name(m.process()),
        decl,
        "actions",
        m.automaton(),
        |a| a.show(decl),
    )
}

/// Reads the leading keyword of a file in either format.
pub fn file_kind(src: &str) -> Option<&'static str> {
    let first = src
        .lines()
        .map(|l| l.split('#').next().unwrap_or("").trim())
        .find(|l| !l.is_empty())?;
    match first.split_whitespace().next()? {
        "gtype" => Some("gtype"),
        "cfsm" => Some("cfsm"),
        _ => None,
    }
}
