//! PD text and JSON input.
//!
//! Text grammar (whitespace and `#` comments ignored):
//!
//! ```text
//! diagram  = "PD" "[" [ crossing { "," crossing } ] "]" { clause }
//! crossing = "X" ( "(" | "[" ) int "," int "," int "," int ( ")" | "]" )
//! clause   = [ "," | ";" ] ( "N" "=" list | "basepoint" "=" int | "circles" "=" int )
//! list     = "[" [ int { "," int } ] "]"
//! ```
//!
//! JSON form: `{"crossings":[[a,b,c,d],...],"n":[ids],"basepoint":arc,"circles":k}`
//! with every field but `crossings` optional. Crossing ids in `N` are 1-based.

use serde::Deserialize;

use super::{ArcLabel, PlanarDiagram};
use crate::error::{Error, Result};

/// Parses either input form, dispatching on the first non-blank character.
pub fn parse_pd(text: &str) -> Result<PlanarDiagram> {
    let body = strip_comments(text);
    if body.trim_start().starts_with('{') {
        parse_json(&body)
    } else {
        parse_text(&body)
    }
}

fn strip_comments(text: &str) -> String {
    text.lines()
        .map(|l| l.split('#').next().unwrap_or(""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonDiagram {
    crossings: Vec<[ArcLabel; 4]>,
    #[serde(default)]
    n: Option<Vec<usize>>,
    #[serde(default)]
    basepoint: Option<ArcLabel>,
    #[serde(default)]
    circles: Option<usize>,
}

pub fn parse_json(text: &str) -> Result<PlanarDiagram> {
    let j: JsonDiagram =
        serde_json::from_str(text).map_err(|e| Error::MalformedPd(format!("json: {e}")))?;
    PlanarDiagram::new(j.crossings, j.n, j.basepoint, j.circles)
}

struct Lexer<'a> {
    s: &'a [u8],
    i: usize,
}

impl<'a> Lexer<'a> {
    fn skip_ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.i).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.i += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.error(&format!("expected '{}'", c as char)))
        }
    }

    fn word(&mut self) -> String {
        self.skip_ws();
        let start = self.i;
        while self.i < self.s.len() && (self.s[self.i].is_ascii_alphabetic() || self.s[self.i] == b'_') {
            self.i += 1;
        }
        String::from_utf8_lossy(&self.s[start..self.i]).into_owned()
    }

    fn int(&mut self) -> Result<i64> {
        self.skip_ws();
        let start = self.i;
        if self.i < self.s.len() && (self.s[self.i] == b'-' || self.s[self.i] == b'+') {
            self.i += 1;
        }
        while self.i < self.s.len() && self.s[self.i].is_ascii_digit() {
            self.i += 1;
        }
        std::str::from_utf8(&self.s[start..self.i])
            .ok()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| self.error("expected integer"))
    }

    fn error(&self, msg: &str) -> Error {
        Error::MalformedPd(format!("{msg} at byte {}", self.i))
    }
}

pub fn parse_text(text: &str) -> Result<PlanarDiagram> {
    let mut lx = Lexer { s: text.as_bytes(), i: 0 };
    if lx.word() != "PD" {
        return Err(lx.error("expected 'PD'"));
    }
    lx.expect(b'[')?;
    let mut tuples = Vec::new();
    if !lx.eat(b']') {
        loop {
            if lx.word() != "X" {
                return Err(lx.error("expected 'X'"));
            }
            let close = if lx.eat(b'(') {
                b')'
            } else if lx.eat(b'[') {
                b']'
            } else {
                return Err(lx.error("expected '(' or '['"));
            };
            let mut t = [0; 4];
            for (k, slot) in t.iter_mut().enumerate() {
                if k > 0 {
                    lx.expect(b',')?;
                }
                *slot = lx.int()?;
            }
            lx.expect(close)?;
            tuples.push(t);
            if lx.eat(b']') {
                break;
            }
            lx.expect(b',')?;
        }
    }

    let mut n_ids: Option<Vec<usize>> = None;
    let mut basepoint = None;
    let mut circles = None;
    while lx.peek().is_some() {
        if lx.eat(b',') || lx.eat(b';') {
            continue;
        }
        let key = lx.word();
        lx.expect(b'=')?;
        match key.as_str() {
            "N" | "n" => {
                lx.expect(b'[')?;
                let mut ids = Vec::new();
                if !lx.eat(b']') {
                    loop {
                        let v = lx.int()?;
                        if v <= 0 {
                            return Err(Error::UnknownCrossingId(v.max(0) as usize));
                        }
                        ids.push(v as usize);
                        if lx.eat(b']') {
                            break;
                        }
                        lx.expect(b',')?;
                    }
                }
                n_ids = Some(ids);
            }
            "basepoint" => basepoint = Some(lx.int()?),
            "circles" => {
                let v = lx.int()?;
                if v < 0 {
                    return Err(lx.error("circles must be nonnegative"));
                }
                circles = Some(v as usize);
            }
            other => return Err(lx.error(&format!("unknown clause '{other}'"))),
        }
    }
    PlanarDiagram::new(tuples, n_ids, basepoint, circles)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_diagram_is_an_unknot() {
        let d = parse_pd("PD[] circles=1").unwrap();
        assert_eq!(d.crossing_count(), 0);
        assert_eq!(d.component_count(), 1);
        let d = parse_pd("PD[]").unwrap();
        assert_eq!(d.component_count(), 1);
    }

    #[test]
    fn trefoil_text_and_json_agree() {
        let a = parse_pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)]").unwrap();
        let b = parse_pd(r#"{"crossings":[[1,4,2,5],[3,6,4,1],[5,2,6,3]]}"#).unwrap();
        assert_eq!(a.crossings(), b.crossings());
        assert_eq!(a.component_count(), 1);
        assert_eq!(a.arc_count(), 6);
    }

    #[test]
    fn n_clause_marks_subset() {
        let d = parse_pd("PD[X(4,2,3,1),X(3,2,4,1)], N=[1]").unwrap();
        assert_eq!(d.n_size(), 1);
        assert!(d.crossings()[0].in_n);
        assert!(!d.crossings()[1].in_n);
    }

    #[test]
    fn brackets_and_comments_accepted() {
        let d = parse_pd("# trefoil\nPD[X[1,4,2,5], X[3,6,4,1], X[5,2,6,3]] basepoint=2 # done").unwrap();
        assert_eq!(d.basepoint(), Some(2));
    }

    #[test]
    fn errors() {
        assert!(matches!(parse_pd("PX[]"), Err(Error::MalformedPd(_))));
        assert!(matches!(parse_pd("PD[X(1,2,3)]"), Err(Error::MalformedPd(_))));
        assert!(matches!(
            parse_pd("PD[X(1,4,2,5),X(3,6,4,1)]"),
            Err(Error::InconsistentArcs { .. })
        ));
        assert!(matches!(
            parse_pd("PD[X(4,2,3,1),X(3,2,4,1)] N=[5]"),
            Err(Error::UnknownCrossingId(5))
        ));
        assert!(matches!(parse_pd("PD[] circles=0"), Err(Error::MalformedPd(_))));
        assert!(matches!(parse_pd(r#"{"crossings":[[1,1,2]]}"#), Err(Error::MalformedPd(_))));
        assert!(matches!(
            parse_pd("PD[X(1,4,2,5),X(3,6,4,1),X(5,2,6,3)] basepoint=9"),
            Err(Error::MalformedPd(_))
        ));
    }
}
