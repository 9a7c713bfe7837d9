//! Recursive-descent parser for the concrete syntax of types and terms.
//!
//! ```text
//! type  ::= prod ('->' type)?
//! prod  ::= tapp ('*' tapp)*
//! tapp  ::= 'T' tapp | 'unit' | 'bool' | ident | '(' type ')'
//! term  ::= '\' ident ':' type '.' term
//!         | 'let' ident '<=' term 'in' term
//!         | 'if' term 'then' term 'else' term
//!         | ('val' | 'fst' | 'snd') app
//!         | app
//! app   ::= atom atom*
//! atom  ::= ident | ident '[' type,* ']' | ident '#' nat | '()' | '(' term ')'
//!         | '(' term ',' term ')' | 'true' | 'false' | '_'
//! ```

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::monads::ConstKind;
use crate::signature::{strip_comment, Signature};
use crate::syntax::{Term, Type};

#[derive(Clone, PartialEq, Debug)]
enum Tok {
    Ident(String),
    Nat(u32),
    Sym(&'static str),
}

#[derive(Clone, Debug)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

const SYMBOLS: [&str; 12] = ["<=", "->", "\\", ":", ".", "(", ")", ",", "[", "]", "*", "#"];
const KEYWORDS: [&str; 14] = [
    "let", "in", "if", "then", "else", "val", "fst", "snd", "true", "false", "T", "unit", "bool",
    "_",
];

fn lex(text: &str) -> Result<Vec<Spanned>> {
    let mut out = Vec::new();
    for (li, raw) in text.lines().enumerate() {
        let line = strip_comment(raw);
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
                continue;
            }
            if c == 'λ' {
                out.push(Spanned { tok: Tok::Sym("\\"), line: li + 1, col });
                i += 1;
                continue;
            }
            if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Spanned { tok: Tok::Ident(s), line: li + 1, col });
                continue;
            }
            if c.is_ascii_digit() {
                let start = i;
                while i < chars.len() && chars[i].is_ascii_digit() {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                let n = s.parse().map_err(|_| Error::Syntax {
                    line: li + 1,
                    col,
                    msg: format!("number `{s}` too large"),
                })?;
                out.push(Spanned { tok: Tok::Nat(n), line: li + 1, col });
                continue;
            }
            let rest: String = chars[i..].iter().take(2).collect();
            match SYMBOLS.iter().find(|s| rest.starts_with(**s)) {
                Some(s) => {
                    out.push(Spanned { tok: Tok::Sym(s), line: li + 1, col });
                    i += s.chars().count();
                }
                None => {
                    return Err(Error::Syntax {
                        line: li + 1,
                        col,
                        msg: format!("unexpected character `{c}`"),
                    })
                }
            }
        }
    }
    Ok(out)
}

pub(crate) struct Parser<'s> {
    toks: Vec<Spanned>,
    pos: usize,
    sig: Option<&'s Signature>,
    end: (usize, usize),
}

impl<'s> Parser<'s> {
    pub(crate) fn new(text: &str) -> Result<Parser<'s>> {
        let toks = lex(text)?;
        let lines = text.lines().count().max(1);
        let last = text.lines().last().map_or(0, |l| l.chars().count());
        Ok(Parser { toks, pos: 0, sig: None, end: (lines, last + 1) })
    }

    pub(crate) fn with_signature(text: &str, sig: &'s Signature) -> Result<Parser<'s>> {
        let mut p = Parser::new(text)?;
        p.sig = Some(sig);
        Ok(p)
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn peek_at(&self, k: usize) -> Option<&Tok> {
        self.toks.get(self.pos + k).map(|s| &s.tok)
    }

    fn err<T>(&self, msg: impl Into<String>) -> Result<T> {
        let (line, col) = self
            .toks
            .get(self.pos)
            .map_or(self.end, |s| (s.line, s.col));
        Err(Error::Syntax { line, col, msg: msg.into() })
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek(), Some(Tok::Sym(t)) if *t == s)
    }

    fn is_kw(&self, k: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(t)) if t == k)
    }

    fn eat_sym(&mut self, s: &str) -> bool {
        if self.is_sym(s) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_sym(&mut self, s: &str) -> Result<()> {
        if self.eat_sym(s) {
            Ok(())
        } else {
            self.err(format!("expected `{s}`"))
        }
    }

    fn expect_kw(&mut self, k: &str) -> Result<()> {
        if self.is_kw(k) {
            self.pos += 1;
            Ok(())
        } else {
            self.err(format!("expected `{k}`"))
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn expect_end(&self) -> Result<()> {
        if self.at_end() {
            Ok(())
        } else {
            self.err("unexpected trailing input")
        }
    }

    fn binder(&mut self) -> Result<String> {
        match self.peek().cloned() {
            Some(Tok::Ident(x))
                if !KEYWORDS.contains(&x.as_str()) && ConstKind::from_name(&x).is_none() =>
            {
                self.pos += 1;
                Ok(x)
            }
            _ => self.err("expected a variable name"),
        }
    }

    pub(crate) fn ty(&mut self) -> Result<Type> {
        let dom = self.ty_prod()?;
        if self.eat_sym("->") {
            let cod = self.ty()?;
            Ok(Type::arrow(dom, cod))
        } else {
            Ok(dom)
        }
    }

    fn ty_prod(&mut self) -> Result<Type> {
        let mut t = self.ty_app()?;
        while self.eat_sym("*") {
            let r = self.ty_app()?;
            t = Type::prod(t, r);
        }
        Ok(t)
    }

    fn ty_app(&mut self) -> Result<Type> {
        match self.peek().cloned() {
            Some(Tok::Ident(k)) if k == "T" => {
                self.pos += 1;
                Ok(Type::comp(self.ty_app()?))
            }
            Some(Tok::Ident(k)) if k == "unit" => {
                self.pos += 1;
                Ok(Type::Unit)
            }
            Some(Tok::Ident(k)) if k == "bool" => {
                self.pos += 1;
                Ok(Type::Bool)
            }
            Some(Tok::Ident(k)) if !KEYWORDS.contains(&k.as_str()) => {
                if let Some(sig) = self.sig {
                    if !sig.has_base(&k) {
                        return self.err(format!("unknown base type `{k}`"));
                    }
                }
                self.pos += 1;
                Ok(Type::base(&k))
            }
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                let t = self.ty()?;
                self.expect_sym(")")?;
                Ok(t)
            }
            _ => self.err("expected a type"),
        }
    }

    pub(crate) fn term(&mut self) -> Result<Term> {
        if self.eat_sym("\\") {
            let x = self.binder()?;
            self.expect_sym(":")?;
            let ty = self.ty()?;
            self.expect_sym(".")?;
            let body = self.term()?;
            return Ok(Term::lam(&x, ty, body));
        }
        if self.is_kw("let") {
            self.pos += 1;
            let x = self.binder()?;
            self.expect_sym("<=")?;
            let m = self.term()?;
            self.expect_kw("in")?;
            let n = self.term()?;
            return Ok(Term::letc(&x, m, n));
        }
        if self.is_kw("if") {
            self.pos += 1;
            let c = self.term()?;
            self.expect_kw("then")?;
            let a = self.term()?;
            self.expect_kw("else")?;
            let b = self.term()?;
            return Ok(Term::ite(c, a, b));
        }
        for (kw, mk) in [
            ("val", Term::val as fn(Term) -> Term),
            ("fst", Term::fst),
            ("snd", Term::snd),
        ] {
            if self.is_kw(kw) {
                self.pos += 1;
                return Ok(mk(self.app()?));
            }
        }
        self.app()
    }

    fn starts_atom(&self) -> bool {
        match self.peek() {
            Some(Tok::Ident(k)) => {
                !matches!(k.as_str(), "let" | "in" | "if" | "then" | "else" | "val" | "fst" | "snd")
            }
            Some(Tok::Sym("(")) => true,
            _ => false,
        }
    }

    fn app(&mut self) -> Result<Term> {
        let mut t = self.atom()?;
        while self.starts_atom() {
            let a = self.atom()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn atom(&mut self) -> Result<Term> {
        match self.peek().cloned() {
            Some(Tok::Sym("(")) => {
                self.pos += 1;
                if self.eat_sym(")") {
                    return Ok(Term::UnitVal);
                }
                let a = self.term()?;
                if self.eat_sym(",") {
                    let b = self.term()?;
                    self.expect_sym(")")?;
                    return Ok(Term::pair(a, b));
                }
                self.expect_sym(")")?;
                Ok(a)
            }
            Some(Tok::Ident(k)) => match k.as_str() {
                "true" => {
                    self.pos += 1;
                    Ok(Term::BoolLit(true))
                }
                "false" => {
                    self.pos += 1;
                    Ok(Term::BoolLit(false))
                }
                "_" => {
                    self.pos += 1;
                    Ok(Term::Hole)
                }
                _ if KEYWORDS.contains(&k.as_str()) => self.err(format!("unexpected `{k}`")),
                _ => self.ident_atom(k),
            },
            _ => self.err("expected a term"),
        }
    }

    fn ident_atom(&mut self, name: String) -> Result<Term> {
        if matches!(self.peek_at(1), Some(Tok::Sym("#"))) {
            let at = self.pos;
            self.pos += 2;
            let Some(Tok::Nat(i)) = self.peek().cloned() else {
                return self.err("expected an element index after `#`");
            };
            self.pos += 1;
            if let Some(sig) = self.sig {
                if !sig.has_base(&name) {
                    self.pos = at;
                    return self.err(format!("unknown base type `{name}`"));
                }
            }
            return Ok(Term::Lit(name.into(), i));
        }
        let is_const = ConstKind::from_name(&name).is_some();
        let bracket = matches!(self.peek_at(1), Some(Tok::Sym("[")));
        if !is_const && !bracket {
            self.pos += 1;
            return Ok(Term::var(&name));
        }
        if !is_const {
            return self.err(format!("unknown constant `{name}`"));
        }
        if let Some(sig) = self.sig {
            if !ConstKind::from_name(&name).is_some_and(|c| c.available_in(sig)) {
                return self.err(format!("unknown constant `{name}` for monad `{}`", sig.monad));
            }
        }
        self.pos += 1;
        let mut args = Vec::new();
        if self.eat_sym("[") {
            if !self.eat_sym("]") {
                loop {
                    args.push(self.ty()?);
                    if self.eat_sym("]") {
                        break;
                    }
                    self.expect_sym(",")?;
                }
            }
        }
        Ok(Term::Const(name.into(), args))
    }
}

/// Parse a term, checking base types and constants against `sig`.
pub fn parse_term(text: &str, sig: &Signature) -> Result<Term> {
    let mut p = Parser::with_signature(text, sig)?;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parse a term without a signature; base names and constants are accepted
/// syntactically and checked later by typing.
pub fn parse_term_unchecked(text: &str) -> Result<Term> {
    let mut p = Parser::new(text)?;
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parse a term file: either one term, or bindings `name = term;` where later
/// bindings may mention earlier (closed) ones by name. Returns the bindings in
/// order; a bare term is returned under the name `main`.
pub fn parse_file(text: &str, sig: &Signature) -> Result<Vec<(String, Term)>> {
    let chunks = split_bindings(text);
    match chunks {
        None => Ok(vec![("main".to_string(), parse_term(text, sig)?)]),
        Some(chunks) => {
            let mut out: Vec<(String, Term)> = Vec::new();
            for (line_offset, name, body) in chunks {
                let t = parse_term(&body, sig).map_err(|e| match e {
                    Error::Syntax { line, col, msg } => Error::Syntax {
                        line: line + line_offset,
                        col,
                        msg,
                    },
                    other => other,
                })?;
                let mut t = Arc::new(t);
                for (prev, def) in out.iter().rev() {
                    t = t.subst_closed(prev, &Arc::new(def.clone()));
                }
                out.push((name, (*t).clone()));
            }
            Ok(out)
        }
    }
}

/// Split `name = body;` chunks. Returns `None` when the text is a bare term.
fn split_bindings(text: &str) -> Option<Vec<(usize, String, String)>> {
    let cleaned: Vec<&str> = text.lines().map(strip_comment).collect();
    let joined = cleaned.join("\n");
    if !joined.contains(';') {
        return None;
    }
    let mut out = Vec::new();
    let mut line_offset = 0;
    for chunk in joined.split(';') {
        let lead_newlines = chunk.chars().take_while(|c| c.is_whitespace()).filter(|&c| c == '\n').count();
        let trimmed = chunk.trim();
        let here = line_offset + lead_newlines;
        line_offset += chunk.matches('\n').count();
        if trimmed.is_empty() {
            continue;
        }
        let (name, body) = trimmed.split_once('=')?;
        let name = name.trim();
        if !crate::signature::is_ident(name) || body.starts_with('>') {
            return None;
        }
        out.push((here, name.to_string(), body.to_string()));
    }
    Some(out)
}
