//! Lexer and recursive-descent parser for strategy programs.

use thiserror::Error;

use super::ast::{Budget, Cmp, Expr, Source};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{line}:{column}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

const KEYWORDS: &[&str] = &[
    "const", "bestresp", "sim", "match", "halted", "exhausted", "if", "then", "else", "loop", "grow",
    "opp", "self", "rest",
];

#[derive(Debug, Clone, PartialEq, Eq)]
enum Tok {
    Word(String),
    Int(i64),
    Str(String),
    LParen,
    RParen,
    LBrace,
    RBrace,
    Comma,
    Bar,
    FatArrow,
    EqEq,
    Lt,
    Gt,
    Eof,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Word(w) => format!("`{w}`"),
            Tok::Int(n) => format!("integer {n}"),
            Tok::Str(_) => "quoted program".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBrace => "`{`".into(),
            Tok::RBrace => "`}`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Bar => "`|`".into(),
            Tok::FatArrow => "`=>`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Eof => "end of input".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, ParseError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut column) = (0, 1, 1);
    let err = |line, column, message: String| ParseError {
        line,
        column,
        message,
    };

    while i < chars.len() {
        let c = chars[i];
        let (start_line, start_col) = (line, column);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    column = 1;
                } else {
                    column += 1;
                }
                *i += 1;
            }
        };

        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '#' {
            while i < chars.len() && chars[i] != '\n' {
                advance(1, &mut i);
            }
            continue;
        }

        let tok = if c.is_ascii_alphabetic() || c == '_' {
            let mut word = String::new();
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                word.push(chars[i]);
                advance(1, &mut i);
            }
            Tok::Word(word)
        } else if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(char::is_ascii_digit)) {
            let mut digits = String::new();
            digits.push(c);
            advance(1, &mut i);
            while i < chars.len() && chars[i].is_ascii_digit() {
                digits.push(chars[i]);
                advance(1, &mut i);
            }
            let n = digits
                .parse::<i64>()
                .map_err(|_| err(start_line, start_col, format!("integer {digits} out of range")))?;
            Tok::Int(n)
        } else if c == '"' {
            advance(1, &mut i);
            let mut body = String::new();
            loop {
                match chars.get(i) {
                    None => return Err(err(start_line, start_col, "unterminated quoted program".into())),
                    Some('"') => {
                        advance(1, &mut i);
                        break;
                    }
                    Some('\\') => {
                        let escaped = match chars.get(i + 1) {
                            Some('"') => '"',
                            Some('\\') => '\\',
                            Some('n') => '\n',
                            _ => return Err(err(line, column, "bad escape in quoted program".into())),
                        };
                        body.push(escaped);
                        advance(2, &mut i);
                    }
                    Some(&ch) => {
                        body.push(ch);
                        advance(1, &mut i);
                    }
                }
            }
            Tok::Str(body)
        } else {
            let two: String = chars[i..chars.len().min(i + 2)].iter().collect();
            let (tok, len) = match (c, two.as_str()) {
                (_, "=>") => (Tok::FatArrow, 2),
                (_, "==") => (Tok::EqEq, 2),
                ('(', _) => (Tok::LParen, 1),
                (')', _) => (Tok::RParen, 1),
                ('{', _) => (Tok::LBrace, 1),
                ('}', _) => (Tok::RBrace, 1),
                (',', _) => (Tok::Comma, 1),
                ('|', _) => (Tok::Bar, 1),
                ('<', _) => (Tok::Lt, 1),
                ('>', _) => (Tok::Gt, 1),
                _ => return Err(err(line, column, format!("unexpected character {c:?}"))),
            };
            advance(len, &mut i);
            tok
        };
        out.push(Spanned {
            tok,
            line: start_line,
            column: start_col,
        });
    }
    out.push(Spanned {
        tok: Tok::Eof,
        line,
        column,
    });
    Ok(out)
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    scope: Vec<String>,
}

impl Parser {
    fn peek(&self) -> &Spanned {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Spanned {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn fail<T>(&self, at: &Spanned, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            line: at.line,
            column: at.column,
            message: message.into(),
        })
    }

    fn expect(&mut self, tok: Tok) -> Result<(), ParseError> {
        let t = self.bump();
        if t.tok == tok {
            Ok(())
        } else {
            self.fail(&t, format!("expected {}, found {}", tok.describe(), t.tok.describe()))
        }
    }

    fn keyword(&mut self, word: &str) -> Result<(), ParseError> {
        self.expect(Tok::Word(word.to_string()))
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let t = self.bump();
        match t.tok.clone() {
            Tok::Int(n) => Ok(n),
            other => self.fail(&t, format!("expected integer, found {}", other.describe())),
        }
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        let t = self.bump();
        match &t.tok {
            Tok::Word(w) if !KEYWORDS.contains(&w.as_str()) => Ok(w.clone()),
            other => self.fail(&t, format!("expected identifier, found {}", other.describe())),
        }
    }

    fn source(&mut self) -> Result<Source, ParseError> {
        let t = self.bump();
        match t.tok.clone() {
            Tok::Word(w) if w == "opp" => Ok(Source::Opp),
            Tok::Word(w) if w == "self" => Ok(Source::SelfSource),
            Tok::Str(body) => Ok(Source::Quoted(body)),
            other => self.fail(&t, format!("expected `opp`, `self` or a quoted program, found {}", other.describe())),
        }
    }

    fn budget(&mut self) -> Result<Budget, ParseError> {
        let t = self.bump();
        match t.tok.clone() {
            Tok::Word(w) if w == "rest" => Ok(Budget::Rest),
            Tok::Int(n) if n >= 0 => Ok(Budget::Fixed(n as u64)),
            other => self.fail(&t, format!("expected `rest` or a non-negative budget, found {}", other.describe())),
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let t = self.bump();
        let word = match &t.tok {
            Tok::Int(n) => return Ok(Expr::Int(*n)),
            Tok::Word(w) => w.clone(),
            other => return self.fail(&t, format!("expected expression, found {}", other.describe())),
        };
        match word.as_str() {
            "const" => Ok(Expr::Const(self.int()?)),
            "loop" => Ok(Expr::Loop),
            "grow" => Ok(Expr::Grow),
            "bestresp" => {
                self.expect(Tok::LParen)?;
                let inner = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::BestResp(Box::new(inner)))
            }
            "sim" => {
                self.expect(Tok::LParen)?;
                let program = self.source()?;
                self.expect(Tok::Comma)?;
                let input = self.source()?;
                self.expect(Tok::Comma)?;
                let budget = self.budget()?;
                self.expect(Tok::RParen)?;
                Ok(Expr::Sim {
                    program,
                    input,
                    budget,
                })
            }
            "match" => {
                let scrutinee = self.expr()?;
                self.expect(Tok::LBrace)?;
                self.keyword("halted")?;
                self.expect(Tok::LParen)?;
                let binder = self.ident()?;
                self.expect(Tok::RParen)?;
                self.expect(Tok::FatArrow)?;
                self.scope.push(binder.clone());
                let on_halted = self.expr();
                self.scope.pop();
                let on_halted = on_halted?;
                self.expect(Tok::Bar)?;
                self.keyword("exhausted")?;
                self.expect(Tok::FatArrow)?;
                let on_exhausted = self.expr()?;
                self.expect(Tok::RBrace)?;
                Ok(Expr::Match {
                    scrutinee: Box::new(scrutinee),
                    binder,
                    on_halted: Box::new(on_halted),
                    on_exhausted: Box::new(on_exhausted),
                })
            }
            "if" => {
                let lhs = self.expr()?;
                let t = self.bump();
                let cmp = match t.tok.clone() {
                    Tok::EqEq => Cmp::Eq,
                    Tok::Lt => Cmp::Lt,
                    Tok::Gt => Cmp::Gt,
                    other => return self.fail(&t, format!("expected `==`, `<` or `>`, found {}", other.describe())),
                };
                let rhs = self.expr()?;
                self.keyword("then")?;
                let then = self.expr()?;
                self.keyword("else")?;
                let otherwise = self.expr()?;
                Ok(Expr::If {
                    lhs: Box::new(lhs),
                    cmp,
                    rhs: Box::new(rhs),
                    then: Box::new(then),
                    otherwise: Box::new(otherwise),
                })
            }
            w if KEYWORDS.contains(&w) => self.fail(&t, format!("unexpected keyword `{w}`")),
            w => {
                if self.scope.iter().any(|s| s == w) {
                    Ok(Expr::Var(w.to_string()))
                } else {
                    self.fail(&t, format!("unbound identifier `{w}`"))
                }
            }
        }
    }
}

pub(crate) fn parse_expr(text: &str) -> Result<Expr, ParseError> {
    let mut parser = Parser {
        toks: lex(text)?,
        pos: 0,
        scope: Vec::new(),
    };
    let expr = parser.expr()?;
    let t = parser.peek().clone();
    if t.tok != Tok::Eof {
        return parser.fail(&t, format!("unexpected {} after program", t.tok.describe()));
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn literals() {
        assert_eq!(parse_expr("const 2").unwrap(), Expr::Const(2));
        assert_eq!(parse_expr("  7 ").unwrap(), Expr::Int(7));
        assert_eq!(parse_expr("const -1").unwrap(), Expr::Const(-1));
        assert_eq!(parse_expr("grow").unwrap(), Expr::Grow);
        assert_eq!(parse_expr("loop # spin\n").unwrap(), Expr::Loop);
    }

    #[test]
    fn exploiter_term() {
        let text = "match sim(opp, self, rest) { halted(k) => bestresp(k) | exhausted => const 1 }";
        let e = parse_expr(text).unwrap();
        assert_eq!(
            e,
            Expr::Match {
                scrutinee: Box::new(Expr::Sim {
                    program: Source::Opp,
                    input: Source::SelfSource,
                    budget: Budget::Rest,
                }),
                binder: "k".into(),
                on_halted: Box::new(Expr::BestResp(Box::new(Expr::Var("k".into())))),
                on_exhausted: Box::new(Expr::Const(1)),
            }
        );
        assert_eq!(e.to_string(), text);
    }

    #[test]
    fn quoted_and_if() {
        let text = r#"if sim("match sim(opp, self, 40) { halted(x) => x | exhausted => const \"2\" }", opp, 100) < 3 then const 1 else const 2"#;
        // the inner quoted program is only parsed when simulated
        let e = parse_expr(text).unwrap();
        let printed = e.to_string();
        assert_eq!(parse_expr(&printed).unwrap(), e);
    }

    #[test]
    fn errors_carry_position() {
        let e = parse_expr("match sim(opp, self, rest) {\n  halted(k) => bestresp(j) | exhausted => const 1 }").unwrap_err();
        assert_eq!((e.line, e.column), (2, 25));
        assert!(e.message.contains("unbound"));

        let e = parse_expr("const").unwrap_err();
        assert_eq!((e.line, e.column), (1, 6));
        assert!(parse_expr("const 1 const 2").is_err());
        assert!(parse_expr("sim(opp, self, -3)").is_err());
        assert!(parse_expr("\"open").is_err());
        assert!(parse_expr("bestresp(k)").is_err());
        assert!(parse_expr("match const 1 { halted(self) => 1 | exhausted => 2 }").is_err());
        assert!(parse_expr("if 1 = 2 then 1 else 2").is_err());
    }

    use proptest::prelude::*;

    fn source() -> impl Strategy<Value = Source> {
        prop_oneof![
            Just(Source::Opp),
            Just(Source::SelfSource),
            "[a-z0-9 \"\\\\\n(){}|#]{0,12}".prop_map(Source::Quoted),
        ]
    }

    fn expr(depth: u32, scope: Vec<String>) -> BoxedStrategy<Expr> {
        let mut leaves: Vec<BoxedStrategy<Expr>> = vec![
            (-5i64..5).prop_map(Expr::Const).boxed(),
            (-5i64..5).prop_map(Expr::Int).boxed(),
            Just(Expr::Loop).boxed(),
            Just(Expr::Grow).boxed(),
            (source(), source(), prop_oneof![Just(Budget::Rest), (0u64..500).prop_map(Budget::Fixed)])
                .prop_map(|(program, input, budget)| Expr::Sim { program, input, budget })
                .boxed(),
        ];
        if !scope.is_empty() {
            leaves.push(proptest::sample::select(scope.clone()).prop_map(Expr::Var).boxed());
        }
        let leaf = proptest::strategy::Union::new(leaves).boxed();
        if depth == 0 {
            return leaf;
        }
        let sub = move |extra: Option<String>| {
            let mut s = scope.clone();
            s.extend(extra);
            expr(depth - 1, s)
        };
        let binder = prop_oneof![Just("k".to_string()), Just("x1".to_string())];
        let with_binder = binder.prop_flat_map(move |b| {
            (sub(None), Just(b.clone()), sub(Some(b)), sub(None)).prop_map(|(s, binder, h, e)| Expr::Match {
                scrutinee: Box::new(s),
                binder,
                on_halted: Box::new(h),
                on_exhausted: Box::new(e),
            })
        });
        let plain = expr(depth - 1, vec![]);
        prop_oneof![
            leaf,
            plain.clone().prop_map(|e| Expr::BestResp(Box::new(e))),
            with_binder,
            (plain.clone(), prop_oneof![Just(Cmp::Eq), Just(Cmp::Lt), Just(Cmp::Gt)], plain.clone(), plain.clone(), plain)
                .prop_map(|(lhs, cmp, rhs, then, otherwise)| Expr::If {
                    lhs: Box::new(lhs),
                    cmp,
                    rhs: Box::new(rhs),
                    then: Box::new(then),
                    otherwise: Box::new(otherwise),
                }),
        ]
        .boxed()
    }

    proptest! {
        #[test]
        fn canonical_round_trip(e in expr(3, vec![])) {
            let printed = e.to_string();
            prop_assert_eq!(parse_expr(&printed).unwrap(), e.clone());
            prop_assert_eq!(parse_expr(&printed).unwrap().to_string(), printed);
        }
    }
}
