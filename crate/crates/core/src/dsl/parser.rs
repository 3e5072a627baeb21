use std::collections::BTreeSet;

use crate::decimal::Decimal;
use crate::diag::{Diagnostic, SourceSpan};
use crate::dsl::lexer::{lex, Token, TokenKind};
use crate::model::*;
use crate::units::Role;

/// Result of parsing one `.dom` file. The model holds every declaration that
/// parsed; `diagnostics` lists what did not.
#[derive(Debug, Clone)]
pub struct ParseOutput {
    pub model: DomainModel,
    pub source_map: SourceMap,
    pub diagnostics: Vec<Diagnostic>,
}

impl ParseOutput {
    pub fn has_errors(&self) -> bool {
        crate::diag::has_errors(&self.diagnostics)
    }
}

pub fn parse_model(file: &str, text: &str) -> ParseOutput {
    let (toks, mut diagnostics) = lex(file, text);
    let mut p = Parser {
        toks,
        pos: 0,
        file: file.to_string(),
        diags: Vec::new(),
        model: DomainModel::default(),
        map: SourceMap::new(file),
        seen: BTreeSet::new(),
    };
    p.items();
    diagnostics.append(&mut p.diags);
    diagnostics.sort_by_key(|d| d.span.start());
    ParseOutput { model: p.model, source_map: p.map, diagnostics }
}

/// Parses `text`, failing on any error-level diagnostic.
pub fn parse_str(text: &str) -> Result<DomainModel, Vec<Diagnostic>> {
    let out = parse_model("<input>", text);
    if out.has_errors() {
        Err(out.diagnostics)
    } else {
        Ok(out.model)
    }
}

/// Marker for a reported syntax error; the diagnostic is already recorded.
struct Reported;

type PResult<T> = Result<T, Reported>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    file: String,
    diags: Vec<Diagnostic>,
    model: DomainModel,
    map: SourceMap,
    /// Namespaced declaration keys, for duplicate detection.
    seen: BTreeSet<String>,
}

const ITEM_KEYWORDS: [&str; 9] = ["type", "quantity", "part", "component", "material", "conversion", "channel", "axiom", "observe"];

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn peek_at(&self, n: usize) -> Option<&TokenKind> {
        self.toks.get(self.pos + n).map(|t| &t.kind)
    }

    fn at_eof(&self) -> bool {
        self.pos >= self.toks.len()
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        self.pos += 1;
        t
    }

    fn span(&self, t: &Token) -> SourceSpan {
        SourceSpan::new(&self.file, t.start, t.end)
    }

    fn here(&self) -> SourceSpan {
        match self.peek() {
            Some(t) => self.span(t),
            None => match self.toks.last() {
                Some(t) => SourceSpan::new(&self.file, t.end, t.end),
                None => SourceSpan::origin(&self.file),
            },
        }
    }

    fn error<T>(&mut self, code: &'static str, msg: impl Into<String>, span: SourceSpan) -> PResult<T> {
        self.diags.push(Diagnostic::error(code, msg, span));
        Err(Reported)
    }

    fn unexpected<T>(&mut self, expected: &str) -> PResult<T> {
        let found = self.peek().map(|t| t.kind.describe()).unwrap_or_else(|| "end of input".into());
        let span = self.here();
        self.error("E001", format!("expected {expected}, found {found}"), span)
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Token { kind: TokenKind::Ident(s), .. }) if s == kw)
    }

    fn eat_kw(&mut self, kw: &str) -> bool {
        if self.is_kw(kw) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<()> {
        if self.eat_kw(kw) {
            Ok(())
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek().map(|t| &t.kind) == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind) -> PResult<Token> {
        if self.peek().map(|t| &t.kind) == Some(&kind) {
            Ok(self.bump())
        } else {
            self.unexpected(&kind.describe())
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, SourceSpan)> {
        match self.peek() {
            Some(Token { kind: TokenKind::Ident(s), .. }) => {
                let s = s.clone();
                let t = self.bump();
                Ok((s, self.span(&t)))
            }
            _ => self.unexpected(what),
        }
    }

    fn string(&mut self, what: &str) -> PResult<String> {
        match self.peek() {
            Some(Token { kind: TokenKind::Str(s), .. }) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => self.unexpected(what),
        }
    }

    fn number(&mut self) -> PResult<Decimal> {
        let neg = self.eat(&TokenKind::Minus);
        match self.peek() {
            Some(Token { kind: TokenKind::Number(s), .. }) => {
                let s = s.clone();
                let t = self.bump();
                match s.parse::<Decimal>() {
                    Ok(d) => Ok(if neg { -d } else { d }),
                    Err(_) => {
                        let span = self.span(&t);
                        self.error("E003", format!("malformed number `{s}`"), span)
                    }
                }
            }
            _ => self.unexpected("a number"),
        }
    }

    /// Records a declaration key; reports E002 and returns false on reuse.
    fn declare(&mut self, key: String, what: &str, name: &str, span: &SourceSpan) -> bool {
        if self.seen.insert(key.clone()) {
            self.map.spans.insert(key, span.clone());
            true
        } else {
            let first = self.map.span(&key);
            self.diags.push(Diagnostic::error(
                "E002",
                format!("duplicate {what} `{name}` (first declared at {}:{})", first.start_line, first.start_col),
                span.clone(),
            ));
            false
        }
    }

    fn items(&mut self) {
        while !self.at_eof() {
            let start = self.pos;
            if self.item().is_err() {
                self.recover(start);
            }
        }
    }

    /// Skips to the end of the item that began at `start`: the first `;` at
    /// brace depth zero or the `}` closing its block. A keyword that begins a
    /// new line at depth zero also ends the skip.
    fn recover(&mut self, start: usize) {
        let failed_at = self.pos.max(start + 1);
        self.pos = start;
        let mut depth = 0i32;
        while !self.at_eof() {
            if self.pos >= failed_at && depth <= 0 && self.pos > start {
                if let Some(Token { kind: TokenKind::Ident(s), start: (line, _), .. }) = self.peek() {
                    let prev_line = self.toks[self.pos - 1].end.0;
                    if ITEM_KEYWORDS.contains(&s.as_str()) && *line > prev_line {
                        return;
                    }
                }
            }
            let t = self.bump();
            match t.kind {
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    depth -= 1;
                    if depth <= 0 && self.pos > failed_at.saturating_sub(1) {
                        return;
                    }
                }
                TokenKind::Semi if depth <= 0 && self.pos >= failed_at => return,
                _ => {}
            }
        }
    }

    fn item(&mut self) -> PResult<()> {
        let Some(Token { kind: TokenKind::Ident(kw), .. }) = self.peek() else {
            return self.unexpected("a declaration");
        };
        match kw.clone().as_str() {
            "type" => self.type_decl(),
            "quantity" => self.quantity_decl(),
            "part" => self.endurant(EndurantKind::Part),
            "component" => self.endurant(EndurantKind::Component),
            "material" => self.endurant(EndurantKind::Material),
            "conversion" => self.conversion_decl(),
            "channel" => self.channel_decl(),
            "axiom" => self.axiom_decl(),
            "observe" => self.observer_decl(),
            _ => self.unexpected("a declaration"),
        }
    }

    fn type_decl(&mut self) -> PResult<()> {
        self.bump();
        let mut names = Vec::new();
        loop {
            let (n, span) = self.ident("a type name")?;
            self.map.spans.entry(format!("type:{n}")).or_insert(span);
            names.push(n);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        self.expect(TokenKind::Semi)?;
        self.model.types.push(names);
        Ok(())
    }

    fn quantity_decl(&mut self) -> PResult<()> {
        self.bump();
        let (name, span) = self.ident("a quantity name")?;
        self.expect(TokenKind::Colon)?;
        let (role_kw, role_span) = self.ident("`point`, `interval` or `plain`")?;
        let Some(role) = Role::from_keyword(&role_kw) else {
            return self.error("E001", format!("expected `point`, `interval` or `plain`, found `{role_kw}`"), role_span);
        };
        let unit = self.string("a unit string")?;
        let mut q = QuantityDecl { name: name.clone(), role, unit, interval: None, mean: None, ordered: false };
        loop {
            if self.eat_kw("interval") {
                q.interval = Some(self.ident("an interval kind")?.0);
            } else if self.eat_kw("mean") {
                q.mean = Some(self.ident("a mean kind")?.0);
            } else if self.eat_kw("ordered") {
                q.ordered = true;
            } else {
                break;
            }
        }
        self.expect(TokenKind::Semi)?;
        if self.declare(format!("quantity:{name}"), "quantity", &name, &span) {
            self.model.quantities.push(q);
        }
        Ok(())
    }

    fn mereology(&mut self) -> PResult<MereologyExpr> {
        if self.eat_kw("empty") {
            return Ok(MereologyExpr::Empty);
        }
        let mut items = vec![self.mereo_term()?];
        while self.eat_kw("x") {
            items.push(self.mereo_term()?);
        }
        Ok(if items.len() == 1 { items.pop().unwrap() } else { MereologyExpr::Product(items) })
    }

    fn mereo_term(&mut self) -> PResult<MereologyExpr> {
        if self.is_kw("set") && matches!(self.peek_at(1), Some(TokenKind::Ident(_))) {
            self.bump();
            return Ok(MereologyExpr::Set(self.ident("an id type")?.0));
        }
        Ok(MereologyExpr::Id(self.ident("an id type")?.0))
    }

    fn endurant(&mut self, kind: EndurantKind) -> PResult<()> {
        self.bump();
        let (name, span) = self.ident("a sort name")?;
        let mut e = EndurantDecl::new(&name, kind);
        if self.eat_kw("discrete") {
            e.discreteness = Discreteness::Discrete;
        } else if self.eat_kw("continuous") {
            e.discreteness = Discreteness::Continuous;
        }
        if self.eat_kw("composite") {
            self.expect(TokenKind::LParen)?;
            let mut children = Vec::new();
            if !self.eat(&TokenKind::RParen) {
                loop {
                    let (c, cspan) = self.ident("a child sort")?;
                    self.map.spans.insert(format!("child:{name}.{c}"), cspan);
                    children.push(c);
                    if self.eat(&TokenKind::RParen) {
                        break;
                    }
                    self.expect(TokenKind::Comma)?;
                }
            }
            e.structure = Structure::Composite(children);
        }
        self.expect(TokenKind::LBrace)?;
        let mut doc = None;
        let mut attr_names = BTreeSet::new();
        while !self.eat(&TokenKind::RBrace) {
            let clause_start = self.here();
            let (kw, kw_span) = self.ident("a clause (`id`, `mereo`, `attr`, `behaviour`, `doc`) or `}`")?;
            match kw.as_str() {
                "id" => {
                    let (id, id_span) = self.ident("an id type")?;
                    self.expect(TokenKind::Semi)?;
                    if e.id_type.is_some() {
                        self.diags.push(Diagnostic::error("E002", format!("sort `{name}` already has an id clause"), kw_span));
                    } else {
                        self.map.spans.insert(format!("id:{name}"), id_span);
                        e.id_type = Some(id);
                    }
                }
                "mereo" => {
                    if matches!(self.peek_at(1), Some(TokenKind::Arrow)) {
                        let (s, s_span) = self.ident("a sort name")?;
                        self.bump();
                        if s != name {
                            self.diags.push(Diagnostic::error(
                                "E003",
                                format!("mereology of `{name}` is written for `{s}`"),
                                s_span,
                            ));
                        }
                    }
                    let m = self.mereology()?;
                    let end = self.expect(TokenKind::Semi)?;
                    if e.mereology.is_some() {
                        self.diags.push(Diagnostic::error("E002", format!("sort `{name}` already has a mereo clause"), kw_span));
                    } else {
                        let sp = SourceSpan::new(&self.file, clause_start.start(), end.start);
                        self.map.spans.insert(format!("mereo:{name}"), sp);
                        e.mereology = Some(m);
                    }
                }
                "behaviour" => {
                    let (process, _) = self.ident("a behaviour name")?;
                    e.behaviour.process = Some(process);
                    if self.eat_kw("as") {
                        e.behaviour.channel_abbrev = Some(self.ident("a channel abbreviation")?.0);
                    }
                    if self.eat_kw("pi") {
                        e.behaviour.uid_placeholder = Some(self.ident("an identifier placeholder")?.0);
                    }
                    self.expect(TokenKind::Semi)?;
                    self.map.spans.insert(format!("behaviour:{name}"), kw_span);
                }
                "attr" => {
                    let (a, a_span) = self.ident("an attribute name")?;
                    self.expect(TokenKind::Colon)?;
                    let (q, q_span) = self.ident("a quantity kind")?;
                    let mut category = Category::Static;
                    if let Some(Token { kind: TokenKind::Ident(c), .. }) = self.peek() {
                        if let Some(cat) = Category::from_keyword(c) {
                            category = cat;
                            self.bump();
                        }
                    }
                    let mut decl = AttributeDecl::new(&a, &q, category);
                    if self.eat_kw("init") {
                        decl.init = Some(self.number()?);
                    }
                    self.expect(TokenKind::Semi)?;
                    if attr_names.insert(a.clone()) {
                        self.map.spans.insert(format!("attr:{name}.{a}"), a_span);
                        self.map.spans.insert(format!("attrkind:{name}.{a}"), q_span);
                        e.attributes.push(decl);
                    } else {
                        self.diags.push(Diagnostic::error("E002", format!("duplicate attribute `{a}` in `{name}`"), a_span));
                    }
                }
                "doc" => {
                    doc = Some(self.string("a doc string")?);
                    self.expect(TokenKind::Semi)?;
                }
                other => {
                    return self.error(
                        "E001",
                        format!("unknown clause `{other}`; expected `id`, `mereo`, `attr`, `behaviour` or `doc`"),
                        kw_span,
                    )
                }
            }
        }
        if self.declare(format!("sort:{name}"), "sort", &name, &span) {
            if let Some(d) = doc {
                self.model.docs.insert(format!("sort:{name}"), d);
            }
            self.model.endurants.push(e);
        }
        Ok(())
    }

    fn conversion_decl(&mut self) -> PResult<()> {
        self.bump();
        let (name, span) = self.ident("a conversion name")?;
        self.expect(TokenKind::Colon)?;
        let (from, _) = self.ident("a quantity kind")?;
        self.expect(TokenKind::Arrow)?;
        let (to, _) = self.ident("a quantity kind")?;
        let inverse_of = if self.eat_kw("inverse") { Some(self.ident("a conversion name")?.0) } else { None };
        self.expect(TokenKind::Eq)?;
        self.expect_kw("affine")?;
        self.expect(TokenKind::LParen)?;
        let scale = self.number()?;
        self.expect(TokenKind::Comma)?;
        let offset = self.number()?;
        self.expect(TokenKind::RParen)?;
        self.expect(TokenKind::Semi)?;
        if self.declare(format!("conversion:{name}"), "conversion", &name, &span) {
            self.model.conversions.push(ConversionDecl { name, from, to, inverse_of, map: Affine::new(scale, offset) });
        }
        Ok(())
    }

    fn channel_decl(&mut self) -> PResult<()> {
        self.bump();
        let (name, span) = self.ident("a channel name")?;
        self.expect(TokenKind::Colon)?;
        let mut message = vec![self.ident("a quantity kind")?.0];
        while self.eat_kw("x") {
            message.push(self.ident("a quantity kind")?.0);
        }
        self.expect(TokenKind::Semi)?;
        if self.declare(format!("channel:{name}"), "channel", &name, &span) {
            self.model.channels.push(ChannelDecl { name, message });
        }
        Ok(())
    }

    fn qualified(&mut self) -> PResult<(String, String, SourceSpan)> {
        let (s, s_span) = self.ident("a sort name")?;
        self.expect(TokenKind::Dot)?;
        let (a, a_span) = self.ident("an attribute name")?;
        Ok((s, a, SourceSpan::new(&self.file, s_span.start(), a_span.end())))
    }

    fn axiom_decl(&mut self) -> PResult<()> {
        self.bump();
        let (name, span) = self.ident("an axiom name")?;
        self.expect(TokenKind::LBrace)?;
        self.expect_kw("display")?;
        self.expect(TokenKind::LParen)?;
        let mut target_sort: Option<String> = None;
        let mut targets = Vec::new();
        loop {
            let (s, a, sp) = self.qualified()?;
            match &target_sort {
                None => target_sort = Some(s),
                Some(t) if *t != s => {
                    return self.error("E001", format!("axiom targets must belong to one sort; `{s}` differs from `{t}`"), sp)
                }
                _ => {}
            }
            self.map.spans.insert(format!("axiom:{name}.target.{}", targets.len()), sp);
            targets.push(a);
            if self.eat(&TokenKind::RParen) {
                break;
            }
            self.expect(TokenKind::Comma)?;
        }
        self.expect_kw("tracks")?;
        self.expect(TokenKind::LParen)?;
        let mut sources = Vec::new();
        loop {
            let (sort, attr, sp) = self.qualified()?;
            let mut chain = Vec::new();
            if self.eat_kw("via") {
                chain.push(self.ident("a conversion name")?.0);
                while self.eat(&TokenKind::Arrow) {
                    chain.push(self.ident("a conversion name")?.0);
                }
            }
            self.map.spans.insert(format!("axiom:{name}.source.{}", sources.len()), sp);
            sources.push(AxiomSource { sort, attr, chain });
            if self.eat(&TokenKind::RParen) {
                break;
            }
            self.expect(TokenKind::Comma)?;
        }
        self.expect(TokenKind::Semi)?;
        let mut doc = None;
        if self.eat_kw("doc") {
            doc = Some(self.string("a doc string")?);
            self.expect(TokenKind::Semi)?;
        }
        self.expect(TokenKind::RBrace)?;
        if self.declare(format!("axiom:{name}"), "axiom", &name, &span) {
            if let Some(d) = doc {
                self.model.docs.insert(format!("axiom:{name}"), d);
            }
            self.model.axioms.push(AxiomDecl { name, target_sort: target_sort.unwrap_or_default(), targets, sources });
        }
        Ok(())
    }

    fn observer_decl(&mut self) -> PResult<()> {
        self.bump();
        let (name, span) = self.ident("an observer name")?;
        self.expect(TokenKind::Colon)?;
        let (from, _) = self.ident("a sort name")?;
        self.expect(TokenKind::Arrow)?;
        let target = if name.starts_with("obs_") {
            ObserverTarget::Sort(self.ident("a sort name")?.0)
        } else if name.starts_with("uid_") {
            ObserverTarget::UniqueId(self.ident("an id type")?.0)
        } else if name.starts_with("mereo_") {
            ObserverTarget::Mereology(self.mereology()?)
        } else if name.starts_with("attr_") {
            let (quantity, _) = self.ident("a quantity kind")?;
            self.expect_kw("x")?;
            self.expect_kw("value")?;
            let (c, c_span) = self.ident("an attribute category")?;
            let Some(category) = Category::from_keyword(&c) else {
                return self.error("E001", format!("`{c}` is not an attribute category"), c_span);
            };
            ObserverTarget::Attribute { quantity, category }
        } else {
            return self.error("E001", format!("observer `{name}` must be named obs_, uid_, mereo_ or attr_…"), span);
        };
        self.expect(TokenKind::Semi)?;
        if self.declare(format!("observer:{name}"), "observer", &name, &span) {
            self.model.observers.push(ObserverDecl { name, from, target });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
-- two parts
quantity LO : point "deg" ordered;
part AC composite(PP) {
  id ACI;
  mereo AC -> empty;
}
part PP {
  id PPI;
  mereo empty;
  behaviour position as po pi p;
  attr LO : LO reactive;
  attr n : Real programmable init -2.5;
  doc "the plane's position";
}
"#;

    #[test]
    fn parses_small_model() {
        let out = parse_model("s.dom", SMALL);
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        let m = out.model;
        assert_eq!(m.quantities[0].role, Role::Point);
        assert!(m.quantities[0].ordered);
        let pp = m.endurant("PP").unwrap();
        assert_eq!(pp.attributes[1].init, Some("-2.5".parse().unwrap()));
        assert_eq!(pp.behaviour.channel_abbrev.as_deref(), Some("po"));
        assert_eq!(m.docs["sort:PP"], "the plane's position");
        assert_eq!(m.endurant("AC").unwrap().children(), ["PP"]);
        assert_eq!(out.source_map.span("sort:PP").start(), (8, 6));
    }

    #[test]
    fn recovers_and_keeps_later_items() {
        let src = "part A { id AI; mereo empty; oops; }\npart B { id BI; mereo empty; }\nchannel c : Real x ;\nchannel d : Real;\n";
        let out = parse_model("r.dom", src);
        let codes: Vec<_> = out.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, ["E001", "E001"]);
        assert_eq!(out.diagnostics[0].span.start(), (1, 30));
        assert!(out.model.endurant("B").is_some());
        assert!(out.model.endurant("A").is_none());
        assert_eq!(out.model.channels.len(), 1);
    }

    #[test]
    fn missing_semicolon_recovers_at_next_line() {
        let src = "channel c : Real\nchannel d : Real;\n";
        let out = parse_model("r.dom", src);
        assert_eq!(out.diagnostics.len(), 1);
        assert_eq!(out.diagnostics[0].span.start(), (2, 1));
        assert_eq!(out.model.channels[0].name, "d");
    }

    #[test]
    fn duplicates_are_e002() {
        let src = "part A { id AI; id AJ; mereo empty; }\npart A { id X; mereo empty; }\n";
        let out = parse_model("d.dom", src);
        let codes: Vec<_> = out.diagnostics.iter().map(|d| d.code).collect();
        assert_eq!(codes, ["E002", "E002"]);
        assert_eq!(out.model.endurants.len(), 1);
    }

    #[test]
    fn mereo_for_other_sort_is_e003() {
        let out = parse_model("m.dom", "part A { id AI; mereo B -> empty; }");
        assert_eq!(out.diagnostics[0].code, "E003");
    }

    #[test]
    fn axioms_and_observers() {
        let src = r#"
axiom t { display(DP.a, DP.b) tracks (PP.x via f -> g, PP.y); }
observe obs_PP : AC -> PP;
observe uid_PP : PP -> PPI;
observe mereo_DP : DP -> PPI x set TDI;
observe attr_LO : PP -> LO x value reactive;
"#;
        let out = parse_model("a.dom", src);
        assert!(out.diagnostics.is_empty(), "{:?}", out.diagnostics);
        let ax = &out.model.axioms[0];
        assert_eq!(ax.target_sort, "DP");
        assert_eq!(ax.sources[0].chain, ["f", "g"]);
        assert!(ax.sources[1].chain.is_empty());
        assert_eq!(
            out.model.observers[2].target,
            ObserverTarget::Mereology(MereologyExpr::Product(vec![MereologyExpr::Id("PPI".into()), MereologyExpr::Set("TDI".into())]))
        );
    }

    #[test]
    fn empty_input_is_empty_model() {
        let out = parse_model("e.dom", "  -- nothing\n");
        assert!(out.diagnostics.is_empty());
        assert!(out.model.is_empty());
    }
}
