use super::EventExpr;
use crate::error::{Error, Result};
use std::collections::HashSet;

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Name(String),
    Int(usize),
    Comma,
    Bar,
    Amp,
    Bang,
    LParen,
    RParen,
    Union,
    NPaths,
    End,
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Name(n) => format!("name `{n}`"),
        Tok::Int(i) => format!("integer `{i}`"),
        Tok::Comma => "`,`".into(),
        Tok::Bar => "`|`".into(),
        Tok::Amp => "`&`".into(),
        Tok::Bang => "`!`".into(),
        Tok::LParen => "`(`".into(),
        Tok::RParen => "`)`".into(),
        Tok::Union => "`U`".into(),
        Tok::NPaths => "`npaths(`".into(),
        Tok::End => "end of input".into(),
    }
}

fn syntax(pos: usize, msg: impl Into<String>) -> Error {
    Error::EventSyntax {
        pos,
        msg: msg.into(),
    }
}

fn lex(text: &str) -> Result<Vec<(usize, Tok)>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        let single = match c {
            b',' => Some(Tok::Comma),
            b'|' => Some(Tok::Bar),
            b'&' => Some(Tok::Amp),
            b'!' => Some(Tok::Bang),
            b'(' => Some(Tok::LParen),
            b')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = single {
            out.push((start, t));
            i += 1;
        } else if c.is_ascii_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            let n = text[start..i]
                .parse()
                .map_err(|_| syntax(start, "integer out of range"))?;
            out.push((start, Tok::Int(n)));
        } else if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            let word = &text[start..i];
            if word == "U" {
                out.push((start, Tok::Union));
            } else if word == "npaths" && bytes.get(i) == Some(&b'(') {
                i += 1;
                out.push((start, Tok::NPaths));
            } else {
                out.push((start, Tok::Name(word.to_string())));
            }
        } else {
            let ch = text[start..].chars().next().unwrap_or('?');
            return Err(syntax(start, format!("unexpected character `{ch}`")));
        }
    }
    out.push((text.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.at].1
    }

    fn pos(&self) -> usize {
        self.toks[self.at].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.at].1.clone();
        if t != Tok::End {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        if *self.peek() == want {
            self.bump();
            Ok(())
        } else {
            Err(syntax(
                self.pos(),
                format!("expected {}, found {}", describe(&want), describe(self.peek())),
            ))
        }
    }

    fn name(&mut self) -> Result<String> {
        match self.peek().clone() {
            Tok::Name(n) => {
                self.bump();
                Ok(n)
            }
            other => Err(syntax(
                self.pos(),
                format!("expected vertex name, found {}", describe(&other)),
            )),
        }
    }

    fn expr(&mut self) -> Result<EventExpr> {
        let mut parts = vec![self.term()?];
        while *self.peek() == Tok::Union {
            self.bump();
            parts.push(self.term()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            EventExpr::Union(parts)
        })
    }

    fn term(&mut self) -> Result<EventExpr> {
        let mut parts = vec![self.factor()?];
        while *self.peek() == Tok::Amp {
            self.bump();
            parts.push(self.factor()?);
        }
        Ok(if parts.len() == 1 {
            parts.pop().unwrap()
        } else {
            EventExpr::Intersect(parts)
        })
    }

    fn factor(&mut self) -> Result<EventExpr> {
        match self.peek() {
            Tok::Bang => {
                self.bump();
                Ok(EventExpr::Not(Box::new(self.factor()?)))
            }
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::NPaths => {
                self.bump();
                let u = self.name()?;
                self.expect(Tok::Comma)?;
                let v = self.name()?;
                self.expect(Tok::Comma)?;
                let pos = self.pos();
                let n = match self.bump() {
                    Tok::Int(n) => n,
                    other => {
                        return Err(syntax(
                            pos,
                            format!("expected path count, found {}", describe(&other)),
                        ))
                    }
                };
                if n == 0 {
                    return Err(syntax(pos, "npaths count must be at least 1"));
                }
                self.expect(Tok::RParen)?;
                Ok(EventExpr::NPaths(u, v, n))
            }
            _ => self.partition(),
        }
    }

    fn partition(&mut self) -> Result<EventExpr> {
        let mut seen = HashSet::new();
        let mut groups = Vec::new();
        loop {
            let mut group = Vec::new();
            loop {
                let pos = self.pos();
                let n = self.name()?;
                if !seen.insert(n.clone()) {
                    return Err(syntax(pos, format!("vertex `{n}` appears twice in a partition")));
                }
                group.push(n);
                if *self.peek() != Tok::Comma {
                    break;
                }
                self.bump();
            }
            groups.push(group);
            if *self.peek() != Tok::Bar {
                break;
            }
            self.bump();
        }
        Ok(EventExpr::Partition(groups))
    }
}

pub fn parse_event(text: &str) -> Result<EventExpr> {
    let mut p = Parser {
        toks: lex(text)?,
        at: 0,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(syntax(
            p.pos(),
            format!("unexpected {}", describe(p.peek())),
        ));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(groups: &[&[&str]]) -> EventExpr {
        EventExpr::partition(groups)
    }

    #[test]
    fn atoms_and_precedence() {
        assert_eq!(parse_event("a,b|c").unwrap(), p(&[&["a", "b"], &["c"]]));
        assert_eq!(
            parse_event("a,b U a,c").unwrap(),
            EventExpr::Union(vec![p(&[&["a", "b"]]), p(&[&["a", "c"]])])
        );
        assert_eq!(
            parse_event("npaths(a,b,2)").unwrap(),
            EventExpr::NPaths("a".into(), "b".into(), 2)
        );
        assert_eq!(
            parse_event("a,b & b,c U !a|c").unwrap(),
            EventExpr::Union(vec![
                EventExpr::Intersect(vec![p(&[&["a", "b"]]), p(&[&["b", "c"]])]),
                p(&[&["a"], &["c"]]).negate(),
            ])
        );
    }

    #[test]
    fn errors_carry_positions() {
        let cases = [
            ("a,b|a", 4, "twice"),
            ("npaths(a,b,0)", 11, "at least 1"),
            ("a,b U", 5, "expected vertex name"),
            ("(a,b", 4, "expected `)`"),
            ("a,b c", 4, "unexpected name"),
            ("a,$", 2, "unexpected character"),
            ("npaths(a b,2)", 9, "expected `,`"),
        ];
        for (text, pos, needle) in cases {
            match parse_event(text) {
                Err(Error::EventSyntax { pos: got, msg }) => {
                    assert_eq!(got, pos, "{text}: {msg}");
                    assert!(msg.contains(needle), "{text}: {msg}");
                }
                other => panic!("{text}: {other:?}"),
            }
        }
    }

    #[test]
    fn printing_is_minimal() {
        for s in ["a,b|c", "a,b U a,c & b,c", "(a,b U a,c) & b,c", "!(a,b & b,c)", "!!a|b|c"] {
            assert_eq!(parse_event(s).unwrap().to_string(), s);
        }
    }

    fn arb_expr() -> impl Strategy<Value = EventExpr> {
        let names = prop::sample::subsequence(vec!["a", "b", "c", "d", "x1"], 1..=5);
        let partition = (names, any::<u8>()).prop_map(|(vs, cut)| {
            let mut groups: Vec<Vec<String>> = vec![Vec::new()];
            for (i, v) in vs.iter().enumerate() {
                if i > 0 && (cut >> i) & 1 == 1 {
                    groups.push(Vec::new());
                }
                groups.last_mut().unwrap().push(v.to_string());
            }
            EventExpr::Partition(groups)
        });
        let npaths = (1usize..4).prop_map(|n| EventExpr::NPaths("a".into(), "b".into(), n));
        let leaf = prop_oneof![partition, npaths];
        leaf.prop_recursive(4, 24, 3, |inner| {
            prop_oneof![
                prop::collection::vec(inner.clone(), 2..4).prop_map(EventExpr::Union),
                prop::collection::vec(inner.clone(), 2..4).prop_map(EventExpr::Intersect),
                inner.prop_map(|e| e.negate()),
            ]
        })
    }

    proptest! {
        #[test]
        fn print_parse_round_trip(e in arb_expr()) {
            let text = e.to_string();
            prop_assert_eq!(parse_event(&text).unwrap(), e);
        }
    }
}
