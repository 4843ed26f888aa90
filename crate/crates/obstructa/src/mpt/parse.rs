//! Relation-file grammar.
//!
//! Line-oriented plain text, `#` starts a comment:
//!
//! ```text
//! base 16n+0          # symbolic base dimension b
//! bundle 32n+12       # the bundle is (32n+12)·xi
//! space 16n+10        # classes live in H^*(P^{16n+10})
//! stage 0
//! w(b+2)
//! stage 1
//! k(b+3) = Sq2 w(b+2)
//! k(b+5) = (Sq4 + w4) w(b+2)
//! stage 2
//! k'(b+8) = (Sq4 + Sq3 Sq1 + w4) k(b+5)@1 + (Sq6 + w4 Sq2) k(b+3)@1
//! ```
//!
//! A term is an optional `w4`/`w8`/`w4w4` coefficient, a word of `Sq<k>`
//! factors and a source (`w(b+d)` or `k[<prime>](b+d)@<stage>`).
//! Parenthesized sums distribute over the factors that follow them.  A
//! right-hand side of `?` declares the invariant without carrying its
//! relation (used by partially tabulated towers).  Every expanded term is
//! degree-checked at parse time: coefficient degree + word degree + source
//! degree must exceed the invariant degree by exactly 1 (sources enter
//! through their fiber classes, one dimension down).  Parsing a printed
//! model is the identity on normalized files.

use super::{Coef, DimExpr, KInvariant, Label, MptError, MptModel, RelationBody, Stage, Term};
use crate::cohomology::SteenrodWord;

#[derive(Clone, Debug, PartialEq)]
enum Token {
    LParen,
    RParen,
    Plus,
    Sq(u64),
    Coef(Coef),
    Source(Label),
    Question,
}

fn parse_dim_expr(s: &str, line: usize) -> Result<DimExpr, MptError> {
    let s = s.trim();
    let npos = s.find('n').ok_or_else(|| MptError::Syntax {
        line,
        msg: format!("expected <coef>n[+|-]<offset>, got `{s}`"),
    })?;
    let coef: u64 = s[..npos].parse().map_err(|_| MptError::Syntax {
        line,
        msg: format!("bad coefficient in `{s}`"),
    })?;
    let rest = &s[npos + 1..];
    let offset: i64 = if rest.is_empty() {
        0
    } else {
        rest.replace('+', "")
            .parse()
            .map_err(|_| MptError::Syntax {
                line,
                msg: format!("bad offset in `{s}`"),
            })?
    };
    Ok(DimExpr { coef, offset })
}

/// Parse a degree `b`, `b+<d>` or `b-<d>` (inside parentheses of a label).
fn parse_b_offset(s: &str, line: usize) -> Result<i64, MptError> {
    let s = s.trim();
    let err = || MptError::Syntax {
        line,
        msg: format!("expected b, b+<d> or b-<d>, got `{s}`"),
    };
    if s == "b" {
        return Ok(0);
    }
    let rest = s.strip_prefix('b').ok_or_else(err)?;
    let (sign, digits) = match rest.as_bytes().first() {
        Some(b'+') => (1i64, &rest[1..]),
        Some(b'-') => (-1i64, &rest[1..]),
        _ => return Err(err()),
    };
    let d: i64 = digits.parse().map_err(|_| err())?;
    Ok(sign * d)
}

/// Parse a label as used in sources and on the command line:
/// `w(b+2)`, `k(b+4)@1`, `k'(b+8)@2`.
pub fn parse_label(s: &str) -> Result<Label, MptError> {
    parse_label_at(s.trim(), 0)
}

fn parse_label_at(s: &str, line: usize) -> Result<Label, MptError> {
    let err = |msg: String| MptError::Syntax { line, msg };
    if let Some(rest) = s.strip_prefix("w(") {
        let inner = rest
            .strip_suffix(')')
            .ok_or_else(|| err(format!("unterminated w-label `{s}`")))?;
        return Ok(Label::W {
            offset: parse_b_offset(inner, line)?,
        });
    }
    if let Some(rest) = s.strip_prefix('k') {
        let (prime, rest) = match rest.strip_prefix('\'') {
            Some(r) => (true, r),
            None => (false, rest),
        };
        let rest = rest
            .strip_prefix('(')
            .ok_or_else(|| err(format!("expected `(` in `{s}`")))?;
        let close = rest
            .find(')')
            .ok_or_else(|| err(format!("unterminated k-label `{s}`")))?;
        let offset = parse_b_offset(&rest[..close], line)?;
        let after = &rest[close + 1..];
        let stage_str = after
            .strip_prefix('@')
            .ok_or_else(|| err(format!("k-source `{s}` needs a `@<stage>` suffix")))?;
        let stage: u32 = stage_str
            .parse()
            .map_err(|_| err(format!("bad stage in `{s}`")))?;
        return Ok(Label::K {
            prime,
            offset,
            stage,
        });
    }
    Err(err(format!("not a label: `{s}`")))
}

fn lex_rhs(s: &str, line: usize) -> Result<Vec<Token>, MptError> {
    let err = |msg: String| MptError::Syntax { line, msg };
    let mut tokens = Vec::new();
    let bytes = s.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' => i += 1,
            '(' => {
                tokens.push(Token::LParen);
                i += 1;
            }
            ')' => {
                tokens.push(Token::RParen);
                i += 1;
            }
            '+' => {
                tokens.push(Token::Plus);
                i += 1;
            }
            '?' => {
                tokens.push(Token::Question);
                i += 1;
            }
            'S' => {
                if !s[i..].starts_with("Sq") {
                    return Err(err(format!("unexpected token at `{}`", &s[i..])));
                }
                let start = i + 2;
                let mut end = start;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                if end == start {
                    return Err(err("Sq needs an exponent".into()));
                }
                tokens.push(Token::Sq(s[start..end].parse().unwrap()));
                i = end;
            }
            'w' => {
                if s[i..].starts_with("w4w4") {
                    tokens.push(Token::Coef(Coef::W4W4));
                    i += 4;
                } else if s[i..].starts_with("w8") {
                    tokens.push(Token::Coef(Coef::W8));
                    i += 2;
                } else if s[i..].starts_with("w4") {
                    tokens.push(Token::Coef(Coef::W4));
                    i += 2;
                } else if s[i..].starts_with("w(") {
                    let close = s[i..]
                        .find(')')
                        .ok_or_else(|| err("unterminated w-source".into()))?;
                    tokens.push(Token::Source(parse_label_at(&s[i..i + close + 1], line)?));
                    i += close + 1;
                } else {
                    return Err(err(format!("unexpected token at `{}`", &s[i..])));
                }
            }
            'k' => {
                // source label runs through the `@<stage>` suffix
                let close = s[i..]
                    .find(')')
                    .ok_or_else(|| err("unterminated k-source".into()))?;
                let mut end = i + close + 1;
                if !s[end..].starts_with('@') {
                    return Err(err(format!(
                        "k-source `{}` needs a `@<stage>` suffix",
                        &s[i..end]
                    )));
                }
                end += 1;
                let digits_start = end;
                while end < bytes.len() && bytes[end].is_ascii_digit() {
                    end += 1;
                }
                if end == digits_start {
                    return Err(err("bad stage suffix".into()));
                }
                tokens.push(Token::Source(parse_label_at(&s[i..end], line)?));
                i = end;
            }
            _ => return Err(err(format!("unexpected character `{c}`"))),
        }
    }
    Ok(tokens)
}

/// A factor string before distribution: squares and w-coefficients.
#[derive(Clone, Debug)]
enum Simple {
    Sq(u64),
    Coef(Coef),
}

/// Parse a `+`-separated sum of factor products, each ending in a source,
/// expanding parenthesized sums by distributivity.
fn parse_rhs(tokens: &[Token], line: usize) -> Result<Vec<(Vec<Simple>, Label)>, MptError> {
    let err = |msg: String| MptError::Syntax { line, msg };
    let mut out = Vec::new();
    let mut pos = 0;
    loop {
        // one product: alternatives of factor prefixes x a source
        let mut prefixes: Vec<Vec<Simple>> = vec![Vec::new()];
        let mut source: Option<Label> = None;
        while pos < tokens.len() {
            match &tokens[pos] {
                Token::Sq(k) => {
                    for p in &mut prefixes {
                        p.push(Simple::Sq(*k));
                    }
                    pos += 1;
                }
                Token::Coef(c) => {
                    for p in &mut prefixes {
                        p.push(Simple::Coef(*c));
                    }
                    pos += 1;
                }
                Token::LParen => {
                    // collect alternatives until the matching RParen
                    pos += 1;
                    let mut alts: Vec<Vec<Simple>> = vec![Vec::new()];
                    let mut depth = 0usize;
                    loop {
                        if pos >= tokens.len() {
                            return Err(err("unbalanced parenthesis".into()));
                        }
                        match &tokens[pos] {
                            Token::RParen if depth == 0 => {
                                pos += 1;
                                break;
                            }
                            Token::RParen => {
                                depth -= 1;
                                pos += 1;
                            }
                            Token::LParen => {
                                return Err(err("nested parentheses are not supported".into()));
                            }
                            Token::Plus if depth == 0 => {
                                alts.push(Vec::new());
                                pos += 1;
                            }
                            Token::Sq(k) => {
                                alts.last_mut().unwrap().push(Simple::Sq(*k));
                                pos += 1;
                            }
                            Token::Coef(c) => {
                                alts.last_mut().unwrap().push(Simple::Coef(*c));
                                pos += 1;
                            }
                            t => {
                                return Err(err(format!(
                                    "token {t:?} is not allowed inside parentheses"
                                )))
                            }
                        }
                    }
                    if alts.iter().any(|a| a.is_empty()) {
                        return Err(err("empty alternative in parenthesized sum".into()));
                    }
                    let mut next = Vec::new();
                    for p in &prefixes {
                        for a in &alts {
                            let mut q = p.clone();
                            q.extend(a.iter().cloned());
                            next.push(q);
                        }
                    }
                    prefixes = next;
                }
                Token::Source(l) => {
                    source = Some(*l);
                    pos += 1;
                    break;
                }
                Token::Plus => return Err(err("term is missing its source".into())),
                Token::Question => return Err(err("`?` must stand alone".into())),
                Token::RParen => return Err(err("unbalanced parenthesis".into())),
            }
        }
        let source = source.ok_or_else(|| err("term is missing its source".into()))?;
        for p in prefixes {
            out.push((p, source));
        }
        match tokens.get(pos) {
            None => break,
            Some(Token::Plus) => pos += 1,
            Some(t) => return Err(err(format!("unexpected token {t:?} after source"))),
        }
    }
    Ok(out)
}

fn build_term(factors: &[Simple], source: Label, line: usize) -> Result<Term, MptError> {
    let mut coef = Coef::One;
    let mut word = Vec::new();
    for f in factors {
        match f {
            Simple::Sq(k) => word.push(*k),
            Simple::Coef(c) => {
                coef = match (coef, c) {
                    (Coef::One, c) => *c,
                    (Coef::W4, Coef::W4) => Coef::W4W4,
                    (a, b) => {
                        return Err(MptError::Syntax {
                            line,
                            msg: format!("coefficient {a:?}*{b:?} is outside 1, w4, w8, w4w4"),
                        })
                    }
                };
            }
        }
    }
    Ok(Term {
        coef,
        word: SteenrodWord(word),
        source,
    })
}

/// Parse and validate a relation file.
pub fn parse_relations(text: &str) -> Result<MptModel, MptError> {
    let mut base = None;
    let mut bundle = None;
    let mut space = None;
    let mut stage0: Vec<i64> = Vec::new();
    let mut stages: Vec<Stage> = Vec::new();
    let mut current_stage: Option<u32> = None;

    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let err = |msg: String| MptError::Syntax { line, msg };

        if let Some(rest) = content.strip_prefix("base ") {
            base = Some(parse_dim_expr(rest, line)?);
        } else if let Some(rest) = content.strip_prefix("bundle ") {
            bundle = Some(parse_dim_expr(rest, line)?);
        } else if let Some(rest) = content.strip_prefix("space ") {
            space = Some(parse_dim_expr(rest, line)?);
        } else if let Some(rest) = content.strip_prefix("stage ") {
            let j: u32 = rest
                .trim()
                .parse()
                .map_err(|_| err(format!("bad stage number `{rest}`")))?;
            let expected = current_stage.map_or(0, |s| s + 1);
            if j != expected {
                return Err(err(format!("expected `stage {expected}`, got `stage {j}`")));
            }
            current_stage = Some(j);
            if j > 0 {
                stages.push(Stage::default());
            }
        } else {
            match current_stage {
                None => return Err(err("class line before any `stage` header".into())),
                Some(0) => {
                    let label = parse_label_at(content, line)?;
                    let Label::W { offset } = label else {
                        return Err(err("stage 0 lines must be w-classes".into()));
                    };
                    if stage0.contains(&offset) {
                        return Err(err(format!("duplicate stage-0 class `{content}`")));
                    }
                    stage0.push(offset);
                }
                Some(j) => {
                    let (lhs, rhs) = content
                        .split_once('=')
                        .ok_or_else(|| err("k-invariant line needs `= <relation>`".into()))?;
                    let lhs = lhs.trim();
                    let (prime, lhs_rest) = match lhs.strip_prefix("k'") {
                        Some(r) => (true, r),
                        None => (
                            false,
                            lhs.strip_prefix('k').ok_or_else(|| {
                                err(format!("expected a k-invariant, got `{lhs}`"))
                            })?,
                        ),
                    };
                    let inner = lhs_rest
                        .strip_prefix('(')
                        .and_then(|r| r.strip_suffix(')'))
                        .ok_or_else(|| err(format!("bad k-invariant degree in `{lhs}`")))?;
                    let offset = parse_b_offset(inner, line)?;
                    let stage_block = stages.last_mut().expect("inside a stage block");
                    if stage_block
                        .k_invariants
                        .iter()
                        .any(|k| k.prime == prime && k.offset == offset)
                    {
                        return Err(err(format!("duplicate k-invariant `{lhs}` in stage {j}")));
                    }

                    let rhs = rhs.trim();
                    let relation = if rhs == "?" {
                        RelationBody::Unknown
                    } else {
                        let tokens = lex_rhs(rhs, line)?;
                        let products = parse_rhs(&tokens, line)?;
                        let mut terms: Vec<Term> = Vec::new();
                        for (factors, source) in products {
                            let term = build_term(&factors, source, line)?;
                            // degree balance: coef + word + source = invariant + 1
                            let term_deg = term.coef.degree() as i128
                                + term.word.degree() as i128
                                + term.source.offset() as i128;
                            if term_deg != offset as i128 + 1 {
                                return Err(MptError::DegreeImbalance {
                                    line,
                                    term: term.to_string(),
                                    detail: format!(
                                        "term degree b+{} but the invariant needs b+{}",
                                        term_deg - 1,
                                        offset
                                    ),
                                });
                            }
                            // source stage: w anywhere, k exactly one stage down
                            match term.source {
                                Label::W { offset: w_off } => {
                                    if !stage0.contains(&w_off) {
                                        return Err(MptError::DanglingSource {
                                            line,
                                            reference: term.source.to_string(),
                                        });
                                    }
                                }
                                Label::K { stage: s, .. } => {
                                    if s + 1 != j {
                                        return Err(err(format!(
                                            "source `{}` must live in stage {}",
                                            term.source,
                                            j - 1
                                        )));
                                    }
                                    let exists =
                                        stages[(s - 1) as usize].k_invariants.iter().any(|k| {
                                            let l = Label::K {
                                                prime: k.prime,
                                                offset: k.offset,
                                                stage: s,
                                            };
                                            l == term.source
                                        });
                                    if !exists {
                                        return Err(MptError::DanglingSource {
                                            line,
                                            reference: term.source.to_string(),
                                        });
                                    }
                                }
                            }
                            // F2 formal sum: duplicate terms cancel
                            match terms.iter().position(|t| *t == term) {
                                Some(i) => {
                                    terms.remove(i);
                                }
                                None => terms.push(term),
                            }
                        }
                        RelationBody::Known(terms)
                    };
                    stages.last_mut().unwrap().k_invariants.push(KInvariant {
                        prime,
                        offset,
                        relation,
                    });
                }
            }
        }
    }

    let missing = |what: &str| MptError::Syntax {
        line: 0,
        msg: format!("missing `{what}` header"),
    };
    Ok(MptModel {
        base: base.ok_or_else(|| missing("base"))?,
        bundle: bundle.ok_or_else(|| missing("bundle"))?,
        space: space.ok_or_else(|| missing("space"))?,
        stage0,
        stages,
    })
}

/// Print a model in normalized form; `parse_relations ∘ print` is the
/// identity on its output.
pub fn print_relations(model: &MptModel) -> String {
    let mut out = String::new();
    out.push_str(&format!("base {}\n", model.base));
    out.push_str(&format!("bundle {}\n", model.bundle));
    out.push_str(&format!("space {}\n", model.space));
    out.push_str("stage 0\n");
    for &offset in &model.stage0 {
        out.push_str(&format!("{}\n", Label::W { offset }.decl()));
    }
    for (i, stage) in model.stages.iter().enumerate() {
        out.push_str(&format!("stage {}\n", i + 1));
        for k in &stage.k_invariants {
            let label = Label::K {
                prime: k.prime,
                offset: k.offset,
                stage: (i + 1) as u32,
            };
            let rhs = match &k.relation {
                RelationBody::Unknown => "?".to_string(),
                RelationBody::Known(terms) => terms
                    .iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(" + "),
            };
            out.push_str(&format!("{} = {}\n", label.decl(), rhs));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = "\
# a toy tower
base 8n+0
bundle 16n+0
space 8n+2
stage 0
w(b-4)
w(b+0)
stage 1
k(b-1) = (Sq4 + w4) w(b-4)
stage 2
k(b+0) = ?
stage 3
k(b+0) = Sq1 k(b+0)@2
";

    #[test]
    fn parse_and_round_trip() {
        let model = parse_relations(SMALL).unwrap();
        assert_eq!(model.stage0, vec![-4, 0]);
        assert_eq!(model.stages.len(), 3);
        let k = &model.stages[0].k_invariants[0];
        match &k.relation {
            RelationBody::Known(terms) => assert_eq!(terms.len(), 2),
            RelationBody::Unknown => panic!("expected known relation"),
        }
        let printed = print_relations(&model);
        let reparsed = parse_relations(&printed).unwrap();
        assert_eq!(model, reparsed);
        assert_eq!(print_relations(&reparsed), printed);
    }

    #[test]
    fn degree_imbalance_is_caught() {
        let text = "\
base 8n+0
bundle 16n+0
space 8n+2
stage 0
w(b+2)
stage 1
k(b+5) = Sq2 w(b+2)
";
        match parse_relations(text) {
            Err(MptError::DegreeImbalance { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected imbalance, got {other:?}"),
        }
    }

    #[test]
    fn dangling_source_is_caught() {
        let text = "\
base 8n+0
bundle 16n+0
space 8n+2
stage 0
w(b+2)
stage 1
k(b+3) = Sq2 w(b+2)
stage 2
k(b+4) = Sq2 k(b+3)@1 + Sq1 k(b+4)@1
";
        match parse_relations(text) {
            Err(MptError::DanglingSource { line, reference }) => {
                assert_eq!(line, 9);
                assert_eq!(reference, "k(b+4)@1");
            }
            other => panic!("expected dangling source, got {other:?}"),
        }
    }

    #[test]
    fn duplicate_terms_cancel() {
        let with_dup = "\
base 8n+0
bundle 16n+0
space 8n+2
stage 0
w(b+2)
stage 1
k(b+3) = Sq2 w(b+2) + Sq2 w(b+2)
";
        let model = parse_relations(with_dup).unwrap();
        match &model.stages[0].k_invariants[0].relation {
            RelationBody::Known(terms) => assert!(terms.is_empty()),
            _ => panic!(),
        }
    }

    #[test]
    fn syntax_error_carries_line_number() {
        let text = "base 8n+0\nbundle 16n+0\nspace 8n+2\nstage 0\nw(b+2)\nstage 1\nk(b+3) = Sq2 + w(b+2)\n";
        match parse_relations(text) {
            Err(MptError::Syntax { line, .. }) => assert_eq!(line, 7),
            other => panic!("expected syntax error, got {other:?}"),
        }
    }

    #[test]
    fn labels_parse() {
        assert_eq!(parse_label("w(b-4)").unwrap(), Label::W { offset: -4 });
        assert_eq!(
            parse_label("k'(b+8)@2").unwrap(),
            Label::K {
                prime: true,
                offset: 8,
                stage: 2
            }
        );
        assert!(parse_label("q(b+1)").is_err());
    }
}
