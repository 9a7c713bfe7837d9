//! The finite model a run is interpreted in: base type sizes, the active
//! monad, and the bases designated as states, answers or exceptions.

use std::collections::BTreeMap;
use std::fmt;

use crate::error::{Error, Result};
use crate::monads::MonadKind;
use crate::syntax::{Name, Type};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Signature {
    pub bases: BTreeMap<Name, u32>,
    pub monad: MonadKind,
    pub state_base: Option<Name>,
    pub answer_base: Option<Name>,
    pub exception_base: Option<Name>,
}

impl Signature {
    pub fn new(monad: MonadKind) -> Signature {
        Signature {
            bases: BTreeMap::new(),
            monad,
            state_base: None,
            answer_base: None,
            exception_base: None,
        }
    }

    /// The desk-scale default for a monad: `st = 2` for state, `exn = 1`
    /// for exceptions, `ans = 2` for continuations.
    pub fn default_for(monad: MonadKind) -> Signature {
        let mut sig = Signature::new(monad);
        match monad {
            MonadKind::State => sig = sig.with_state("st", 2),
            MonadKind::Exceptions => sig = sig.with_exceptions("exn", 1),
            MonadKind::Continuation => sig = sig.with_answer("ans", 2),
            _ => {}
        }
        sig
    }

    pub fn with_base(mut self, name: &str, size: u32) -> Signature {
        self.bases.insert(name.into(), size);
        self
    }

    pub fn with_state(self, name: &str, size: u32) -> Signature {
        let mut s = self.with_base(name, size);
        s.state_base = Some(name.into());
        s
    }

    pub fn with_answer(self, name: &str, size: u32) -> Signature {
        let mut s = self.with_base(name, size);
        s.answer_base = Some(name.into());
        s
    }

    pub fn with_exceptions(self, name: &str, size: u32) -> Signature {
        let mut s = self.with_base(name, size);
        s.exception_base = Some(name.into());
        s
    }

    pub fn base_size(&self, name: &str) -> Option<u32> {
        self.bases.get(name).copied()
    }

    pub fn has_base(&self, name: &str) -> bool {
        self.bases.contains_key(name)
    }

    /// Designated bases admit literals `b#i`; they are always related by
    /// the identity relation.
    pub fn is_designated(&self, name: &str) -> bool {
        [&self.state_base, &self.answer_base, &self.exception_base]
            .iter()
            .any(|d| d.as_deref() == Some(name))
    }

    pub fn designated(&self) -> Vec<Name> {
        let mut out: Vec<Name> = [&self.state_base, &self.answer_base, &self.exception_base]
            .into_iter()
            .flatten()
            .cloned()
            .collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn state_type(&self) -> Option<Type> {
        self.state_base.as_ref().map(|b| Type::Base(b.clone()))
    }

    pub fn check_type(&self, t: &Type) -> Result<()> {
        let mut names = Default::default();
        t.base_names(&mut names);
        for n in names {
            if !self.has_base(&n) {
                return Err(crate::error::TypeError::UnknownBase(n.to_string()).into());
            }
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        for (b, &n) in &self.bases {
            if n == 0 {
                return Err(Error::Config(format!("base `{b}` must have size >= 1")));
            }
        }
        for (role, d) in [
            ("state-base", &self.state_base),
            ("answer-base", &self.answer_base),
            ("exception-base", &self.exception_base),
        ] {
            if let Some(d) = d {
                if !self.has_base(d) {
                    return Err(Error::Config(format!("{role} `{d}` is not a declared base")));
                }
            }
        }
        let needed = match self.monad {
            MonadKind::State => Some(("state-base", &self.state_base)),
            MonadKind::Exceptions => Some(("exception-base", &self.exception_base)),
            MonadKind::Continuation => Some(("answer-base", &self.answer_base)),
            _ => None,
        };
        if let Some((role, None)) = needed {
            return Err(Error::Config(format!(
                "monad `{}` needs a designated {role}",
                self.monad
            )));
        }
        Ok(())
    }

    /// Parse a signature file: `base b = 2`, `monad = state`,
    /// `state-base = b`, `answer-base = r`, `exception-base = e`.
    /// Lines starting with `--` or `#` are comments.
    pub fn parse(text: &str) -> Result<Signature> {
        let mut sig = Signature::new(MonadKind::Identity);
        for (lineno, raw) in text.lines().enumerate() {
            let line = strip_comment(raw).trim();
            if line.is_empty() {
                continue;
            }
            let err = |msg: String| Error::Config(format!("line {}: {msg}", lineno + 1));
            let (lhs, rhs) = line
                .split_once('=')
                .ok_or_else(|| err(format!("expected `key = value`, got `{line}`")))?;
            let (lhs, rhs) = (lhs.trim(), rhs.trim());
            if let Some(name) = lhs.strip_prefix("base ") {
                let name = name.trim();
                if !is_ident(name) {
                    return Err(err(format!("bad base name `{name}`")));
                }
                let n: u32 = rhs.parse().map_err(|_| err(format!("bad size `{rhs}`")))?;
                sig.bases.insert(name.into(), n);
                continue;
            }
            match lhs {
                "monad" => sig.monad = rhs.parse().map_err(|e: Error| err(e.to_string()))?,
                "state-base" => sig.state_base = Some(rhs.into()),
                "answer-base" => sig.answer_base = Some(rhs.into()),
                "exception-base" => sig.exception_base = Some(rhs.into()),
                other => return Err(err(format!("unknown key `{other}`"))),
            }
        }
        sig.validate()?;
        Ok(sig)
    }
}

pub(crate) fn strip_comment(line: &str) -> &str {
    let line = line.split("--").next().unwrap_or("");
    if line.trim_start().starts_with('#') {
        ""
    } else {
        line
    }
}

pub(crate) fn is_ident(s: &str) -> bool {
    let mut cs = s.chars();
    matches!(cs.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && cs.all(|c| c.is_ascii_alphanumeric() || c == '_')
        && s != "_"
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (b, n) in &self.bases {
            writeln!(f, "base {b} = {n}")?;
        }
        writeln!(f, "monad = {}", self.monad)?;
        if let Some(b) = &self.state_base {
            writeln!(f, "state-base = {b}")?;
        }
        if let Some(b) = &self.answer_base {
            writeln!(f, "answer-base = {b}")?;
        }
        if let Some(b) = &self.exception_base {
            writeln!(f, "exception-base = {b}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_signature_file() {
        let sig = Signature::parse("-- model\nbase b = 2\nmonad = state\nstate-base = b\n").unwrap();
        assert_eq!(sig.monad, MonadKind::State);
        assert_eq!(sig.base_size("b"), Some(2));
        assert!(sig.is_designated("b"));
        assert_eq!(Signature::parse(&sig.to_string()).unwrap(), sig);
    }

    #[test]
    fn signature_errors() {
        assert!(Signature::parse("base b = 0").is_err());
        assert!(Signature::parse("monad = state").is_err());
        assert!(Signature::parse("base b = 1\nstate-base = c").is_err());
        assert!(Signature::parse("monad = bogus").is_err());
    }
}
