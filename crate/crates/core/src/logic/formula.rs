use std::fmt;

use crate::error::{Error, Result};
use crate::model::Ballot;

/// Propositional formula over issue atoms. Atoms are 0-based issue indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Formula {
    Top,
    Bot,
    Atom(usize),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
}

impl Formula {
    pub fn atom(issue: usize) -> Self {
        Formula::Atom(issue)
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Self {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Self {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Self {
        Formula::Or(Box::new(a), Box::new(b))
    }

    pub fn implies(a: Formula, b: Formula) -> Self {
        Formula::Implies(Box::new(a), Box::new(b))
    }

    /// Right-nested conjunction; `Top` when empty.
    pub fn conjunction<I: IntoIterator<Item = Formula>>(parts: I) -> Self {
        let mut parts: Vec<Formula> = parts.into_iter().collect();
        let Some(mut acc) = parts.pop() else {
            return Formula::Top;
        };
        while let Some(f) = parts.pop() {
            acc = Formula::and(f, acc);
        }
        acc
    }

    /// Largest atom index plus one (0 for atom-free formulas).
    pub fn atom_bound(&self) -> usize {
        match self {
            Formula::Top | Formula::Bot => 0,
            Formula::Atom(j) => j + 1,
            Formula::Not(f) => f.atom_bound(),
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                a.atom_bound().max(b.atom_bound())
            }
        }
    }

    /// Evaluation without range checks; atoms past the ballot read as false.
    pub(crate) fn eval(&self, b: &Ballot) -> bool {
        match self {
            Formula::Top => true,
            Formula::Bot => false,
            Formula::Atom(j) => *j < b.len() && b.get(*j),
            Formula::Not(f) => !f.eval(b),
            Formula::And(x, y) => x.eval(b) && y.eval(b),
            Formula::Or(x, y) => x.eval(b) || y.eval(b),
            Formula::Implies(x, y) => !x.eval(b) || y.eval(b),
        }
    }

    fn level(&self) -> u8 {
        match self {
            Formula::Implies(..) => 1,
            Formula::Or(..) => 2,
            Formula::And(..) => 3,
            Formula::Not(_) => 4,
            _ => 5,
        }
    }

    /// Canonical text using the given issue names (`p<k>` where absent).
    pub fn render(&self, names: &IssueTable) -> String {
        let mut out = String::new();
        self.write(names, &mut out);
        out
    }

    fn write(&self, names: &IssueTable, out: &mut String) {
        let child = |f: &Formula, min: u8, out: &mut String| {
            if f.level() < min {
                out.push('(');
                f.write(names, out);
                out.push(')');
            } else {
                f.write(names, out);
            }
        };
        match self {
            Formula::Top => out.push_str("top"),
            Formula::Bot => out.push_str("bot"),
            Formula::Atom(j) => out.push_str(&names.name(*j)),
            Formula::Not(f) => {
                out.push('!');
                child(f, 4, out);
            }
            Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
                let l = self.level();
                let op = match l {
                    1 => " -> ",
                    2 => " | ",
                    _ => " & ",
                };
                // right-associative: a left operand of equal level needs parentheses
                child(a, l + 1, out);
                out.push_str(op);
                child(b, l, out);
            }
        }
    }
}

impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(&IssueTable::anonymous(self.atom_bound())))
    }
}

/// Issue count plus optional display names (e.g. `W`, `F`, `P`).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct IssueTable {
    issues: usize,
    names: Vec<Option<String>>,
}

impl IssueTable {
    pub fn anonymous(issues: usize) -> Self {
        Self {
            issues,
            names: vec![None; issues],
        }
    }

    /// One name per issue, in issue order.
    pub fn named<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let mut table = Self::anonymous(names.len());
        for (j, n) in names.iter().enumerate() {
            table.set_name(j, n.as_ref())?;
        }
        Ok(table)
    }

    pub fn set_name(&mut self, issue: usize, name: &str) -> Result<()> {
        if issue >= self.issues {
            return Err(Error::IssueOutOfRange {
                issue: issue + 1,
                issues: self.issues,
            });
        }
        let valid = name.chars().next().is_some_and(|c| c.is_ascii_alphabetic() || c == '_')
            && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
            && name != "top"
            && name != "bot";
        if !valid {
            return Err(Error::Parse {
                column: 1,
                message: format!("`{name}` is not a valid issue name"),
            });
        }
        let positional = name
            .strip_prefix('p')
            .and_then(|k| k.parse::<usize>().ok())
            .is_some_and(|k| k != issue + 1);
        if positional || self.lookup(name).is_some_and(|k| k != issue) {
            return Err(Error::Parse {
                column: 1,
                message: format!("issue name `{name}` clashes with another issue"),
            });
        }
        self.names[issue] = Some(name.to_string());
        Ok(())
    }

    pub fn issues(&self) -> usize {
        self.issues
    }

    pub fn has_names(&self) -> bool {
        self.names.iter().any(Option::is_some)
    }

    pub fn declared(&self, issue: usize) -> Option<&str> {
        self.names.get(issue).and_then(|n| n.as_deref())
    }

    pub fn name(&self, issue: usize) -> String {
        match self.declared(issue) {
            Some(n) => n.to_string(),
            None => format!("p{}", issue + 1),
        }
    }

    /// Declared names take priority over the `p<k>` form.
    pub fn lookup(&self, name: &str) -> Option<usize> {
        if let Some(j) = self.names.iter().position(|n| n.as_deref() == Some(name)) {
            return Some(j);
        }
        let k: usize = name.strip_prefix('p')?.parse().ok()?;
        (k >= 1 && k <= self.issues && name[1..].starts_with(|c: char| c != '0')).then(|| k - 1)
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Not,
    And,
    Or,
    Implies,
    LParen,
    RParen,
    End,
}

fn lex(text: &str) -> Result<Vec<(Tok, usize)>> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        match c {
            c if c.is_whitespace() => i += 1,
            '!' => {
                out.push((Tok::Not, col));
                i += 1;
            }
            '&' => {
                out.push((Tok::And, col));
                i += 1;
            }
            '|' => {
                out.push((Tok::Or, col));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, col));
                i += 1;
            }
            '-' if chars.get(i + 1) == Some(&'>') => {
                out.push((Tok::Implies, col));
                i += 2;
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                out.push((Tok::Ident(chars[start..i].iter().collect()), col));
            }
            other => {
                return Err(Error::Parse {
                    column: col,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    out.push((Tok::End, chars.len() + 1));
    Ok(out)
}

struct Parser<'a> {
    toks: Vec<(Tok, usize)>,
    pos: usize,
    names: &'a IssueTable,
}

impl Parser<'_> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].0
    }

    fn column(&self) -> usize {
        self.toks[self.pos].1
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.pos].clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn error(&self, message: impl Into<String>) -> Error {
        Error::Parse {
            column: self.column(),
            message: message.into(),
        }
    }

    fn implication(&mut self) -> Result<Formula> {
        let lhs = self.disjunction()?;
        if *self.peek() == Tok::Implies {
            self.bump();
            return Ok(Formula::implies(lhs, self.implication()?));
        }
        Ok(lhs)
    }

    fn disjunction(&mut self) -> Result<Formula> {
        let lhs = self.conjunction()?;
        if *self.peek() == Tok::Or {
            self.bump();
            return Ok(Formula::or(lhs, self.disjunction()?));
        }
        Ok(lhs)
    }

    fn conjunction(&mut self) -> Result<Formula> {
        let lhs = self.unary()?;
        if *self.peek() == Tok::And {
            self.bump();
            return Ok(Formula::and(lhs, self.conjunction()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Formula> {
        let (tok, col) = self.bump();
        match tok {
            Tok::Not => Ok(Formula::not(self.unary()?)),
            Tok::LParen => {
                let inner = self.implication()?;
                if *self.peek() != Tok::RParen {
                    return Err(self.error("expected `)`"));
                }
                self.bump();
                Ok(inner)
            }
            Tok::Ident(name) if name == "top" => Ok(Formula::Top),
            Tok::Ident(name) if name == "bot" => Ok(Formula::Bot),
            Tok::Ident(name) => match self.names.lookup(&name) {
                Some(j) => Ok(Formula::Atom(j)),
                None => Err(Error::UnknownIssue { name, column: col }),
            },
            Tok::End => Err(Error::Parse {
                column: col,
                message: "unexpected end of formula".into(),
            }),
            other => Err(Error::Parse {
                column: col,
                message: format!("unexpected {}", describe(&other)),
            }),
        }
    }
}

fn describe(t: &Tok) -> &'static str {
    match t {
        Tok::Not => "`!`",
        Tok::And => "`&`",
        Tok::Or => "`|`",
        Tok::Implies => "`->`",
        Tok::LParen => "`(`",
        Tok::RParen => "`)`",
        Tok::Ident(_) => "identifier",
        Tok::End => "end of input",
    }
}

/// Parses a formula, resolving atom names against `names`.
///
/// Precedence is `!` > `&` > `|` > `->`; the binary connectives associate to
/// the right.
pub fn parse_formula(text: &str, names: &IssueTable) -> Result<Formula> {
    let mut p = Parser {
        toks: lex(text)?,
        pos: 0,
        names,
    };
    let f = p.implication()?;
    if *p.peek() != Tok::End {
        return Err(p.error(format!("unexpected {} after formula", describe(p.peek()))));
    }
    Ok(f)
}

/// Truth of `f` under `b` (bit 1 = atom true).
pub fn satisfies(b: &Ballot, f: &Formula) -> Result<bool> {
    let bound = f.atom_bound();
    if bound > b.len() {
        return Err(Error::IssueOutOfRange {
            issue: bound,
            issues: b.len(),
        });
    }
    Ok(f.eval(b))
}
