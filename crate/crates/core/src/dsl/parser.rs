use super::ast::*;
use super::lexer::{Tok, Token};
use super::{Diagnostic, Span};

type PResult<T> = Result<T, ()>;

pub struct Parser {
    toks: Vec<Token>,
    pos: usize,
    pub diags: Vec<Diagnostic>,
}

impl Parser {
    pub fn new(toks: Vec<Token>) -> Self {
        Parser { toks, pos: 0, diags: Vec::new() }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn skip_breaks(&mut self) {
        while self.peek().tok == Tok::Break {
            self.bump();
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident { text, quoted: false } if text == kw)
    }

    fn error(&mut self, expected: &str) {
        let t = self.peek().clone();
        self.diags.push(Diagnostic::syntax(t.span, format!("expected {expected}, found {}", t.tok.describe())));
    }

    fn ident(&mut self, what: &str) -> PResult<Name> {
        match self.peek().tok.clone() {
            Tok::Ident { text, .. } => {
                let span = self.bump().span;
                Ok(Spanned::new(text, span))
            }
            _ => {
                self.error(what);
                Err(())
            }
        }
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        if self.at_keyword(kw) {
            Ok(self.bump().span)
        } else {
            self.error(&format!("`{kw}`"));
            Err(())
        }
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if self.peek().tok == tok {
            Ok(self.bump().span)
        } else {
            self.error(&tok.describe());
            Err(())
        }
    }

    /// Skips to the end of the current entry without consuming a closing brace.
    fn recover_line(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek().tok {
                Tok::Eof => return,
                Tok::Break if depth == 0 => return,
                Tok::RBrace if depth == 0 => return,
                Tok::LBrace => depth += 1,
                Tok::RBrace => depth -= 1,
                _ => {}
            }
            self.bump();
        }
    }

    /// Skips a whole declaration, including any braced body.
    fn recover_decl(&mut self) {
        let mut depth = 0usize;
        loop {
            match self.peek().tok {
                Tok::Eof => return,
                Tok::Break if depth == 0 => {
                    self.bump();
                    if self.peek().tok != Tok::LBrace {
                        return;
                    }
                }
                Tok::LBrace => {
                    depth += 1;
                    self.bump();
                }
                Tok::RBrace => {
                    self.bump();
                    depth = depth.saturating_sub(1);
                    if depth == 0 {
                        return;
                    }
                }
                _ => {
                    self.bump();
                }
            }
        }
    }

    fn list(&mut self, what: &str) -> PResult<Vec<Name>> {
        let mut out = vec![self.ident(what)?];
        while self.peek().tok == Tok::Comma {
            self.bump();
            out.push(self.ident(what)?);
        }
        Ok(out)
    }

    /// `{ a, b }`, possibly empty.
    fn braced_list(&mut self, what: &str) -> PResult<Vec<Name>> {
        self.expect(Tok::LBrace)?;
        if self.peek().tok == Tok::RBrace {
            self.bump();
            return Ok(Vec::new());
        }
        let out = self.list(what)?;
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    /// Parses `{ entry* }`, returning the closing span.
    fn body(&mut self, mut entry: impl FnMut(&mut Parser) -> PResult<()>) -> Span {
        if self.expect(Tok::LBrace).is_err() {
            self.recover_decl();
            return self.toks[self.pos.saturating_sub(1)].span;
        }
        loop {
            self.skip_breaks();
            match self.peek().tok {
                Tok::RBrace => return self.bump().span,
                Tok::Eof => {
                    let span = self.peek().span;
                    self.diags.push(Diagnostic::syntax(span, "unclosed block: expected `}`"));
                    return span;
                }
                _ => {}
            }
            if entry(self).is_err() {
                self.recover_line();
                continue;
            }
            match self.peek().tok {
                Tok::Break | Tok::RBrace | Tok::Eof => {}
                _ => {
                    self.error("end of line");
                    self.recover_line();
                }
            }
        }
    }

    pub fn document(&mut self) -> Vec<Block> {
        let mut blocks = Vec::new();
        loop {
            self.skip_breaks();
            if self.peek().tok == Tok::Eof {
                return blocks;
            }
            let start = self.peek().span;
            match self.declaration() {
                Ok((decl, end)) => blocks.push(Block { decl, span: start.to(end) }),
                Err(()) => self.recover_decl(),
            }
        }
    }

    fn declaration(&mut self) -> PResult<(Decl, Span)> {
        let kw = match &self.peek().tok {
            Tok::Ident { text, quoted: false } => text.clone(),
            _ => {
                self.error("a declaration (category, topology, functor, indexed, presheaf, transform, site or check)");
                return Err(());
            }
        };
        match kw.as_str() {
            "category" => self.category(),
            "topology" => self.topology(),
            "functor" => self.functor(),
            "indexed" => self.indexed(),
            "presheaf" => self.presheaf(),
            "transform" => self.transform(),
            "site" => self.site(),
            "check" => self.check(),
            _ => {
                self.error("a declaration (category, topology, functor, indexed, presheaf, transform, site or check)");
                Err(())
            }
        }
    }

    fn category(&mut self) -> PResult<(Decl, Span)> {
        self.bump();
        let name = self.ident("a category name")?;
        let mut d = CategoryDecl { name, objects: Vec::new(), arrows: Vec::new(), compositions: Vec::new() };
        let end = self.body(|p| {
            let start = p.peek().span;
            if p.at_keyword("objects") {
                p.bump();
                p.expect(Tok::Colon)?;
                if !matches!(p.peek().tok, Tok::Break | Tok::RBrace | Tok::Eof) {
                    d.objects.extend(p.list("an object name")?);
                }
            } else if p.at_keyword("arrow") {
                p.bump();
                let f = p.ident("an arrow name")?;
                p.expect(Tok::Colon)?;
                let a = p.ident("a source object")?;
                p.expect(Tok::Arrow)?;
                let b = p.ident("a target object")?;
                let span = start.to(b.span);
                d.arrows.push(Spanned::new((f, a, b), span));
            } else if p.at_keyword("compose") {
                p.bump();
                let f = p.ident("an arrow name")?;
                p.expect(Tok::Dot)?;
                let g = p.ident("an arrow name")?;
                p.expect(Tok::Eq)?;
                let h = p.ident("an arrow name")?;
                let span = start.to(h.span);
                d.compositions.push(Spanned::new((f, g, h), span));
            } else {
                p.error("`objects`, `arrow` or `compose`");
                return Err(());
            }
            Ok(())
        });
        Ok((Decl::Category(d), end))
    }

    fn topology(&mut self) -> PResult<(Decl, Span)> {
        self.bump();
        let name = self.ident("a topology name")?;
        self.keyword("on")?;
        let on = self.ident("a category name")?;
        let mut entries = Vec::new();
        let end = self.body(|p| {
            let start = p.peek().span;
            let entry = if p.at_keyword("trivial") {
                p.bump();
                TopologyEntry::Trivial
            } else if p.at_keyword("maximal") {
                p.bump();
                TopologyEntry::Maximal
            } else if p.at_keyword("canonical") {
                p.bump();
                TopologyEntry::Canonical
            } else if p.at_keyword("giraud") {
                p.bump();
                p.keyword("of")?;
                let functor = p.ident("a functor name")?;
                p.keyword("over")?;
                let over = p.ident("a topology name")?;
                TopologyEntry::Giraud { functor, over }
            } else if p.at_keyword("cover") || p.at_keyword("generate") {
                let generate = p.at_keyword("generate");
                p.bump();
                let object = p.ident("an object name")?;
                p.keyword("with")?;
                let arrows = p.braced_list("an arrow name")?;
                if generate {
                    TopologyEntry::Generate { object, arrows }
                } else {
                    TopologyEntry::Cover { object, arrows }
                }
            } else {
                p.error("`trivial`, `maximal`, `canonical`, `giraud`, `cover` or `generate`");
                return Err(());
            };
            let span = start.to(p.toks[p.pos - 1].span);
            entries.push(Spanned::new(entry, span));
            Ok(())
        });
        Ok((Decl::Topology(TopologyDecl { name, on, entries }), end))
    }

    fn functor(&mut self) -> PResult<(Decl, Span)> {
        self.bump();
        let name = self.ident("a functor name")?;
        self.expect(Tok::Colon)?;
        let source = self.ident("a source category")?;
        self.expect(Tok::Arrow)?;
        let target = self.ident("a target category")?;
        let mut d = FunctorDecl { name, source, target, objects: Vec::new(), arrows: Vec::new() };
        let end = self.body(|p| {
            let start = p.peek().span;
            let is_obj = p.at_keyword("obj");
            if !is_obj && !p.at_keyword("arr") {
                p.error("`obj` or `arr`");
                return Err(());
            }
            p.bump();
            let x = p.ident("a source name")?;
            p.expect(Tok::Arrow)?;
            let y = p.ident("a target name")?;
            let span = start.to(y.span);
            if is_obj {
                d.objects.push(Spanned::new((x, y), span));
            } else {
                d.arrows.push(Spanned::new((x, y), span));
            }
            Ok(())
        });
        Ok((Decl::Functor(d), end))
    }

    fn indexed(&mut self) -> PResult<(Decl, Span)> {
        self.bump();
        let name = self.ident("an indexed category name")?;
        self.keyword("over")?;
        let base = self.ident("a base category")?;
        let mut d = IndexedDecl { name, base, fibers: Vec::new(), transports: Vec::new(), total: None, projection: None };
        let end = self.body(|p| {
            let start = p.peek().span;
            if p.at_keyword("fiber") || p.at_keyword("transport") {
                let fiber = p.at_keyword("fiber");
                p.bump();
                let x = p.ident(if fiber { "a base object" } else { "a base arrow" })?;
                p.expect(Tok::Eq)?;
                let y = p.ident(if fiber { "a category name" } else { "a functor name" })?;
                let span = start.to(y.span);
                if fiber {
                    d.fibers.push(Spanned::new((x, y), span));
                } else {
                    d.transports.push(Spanned::new((x, y), span));
                }
            } else if p.at_keyword("total") {
                p.bump();
                d.total = Some(p.ident("a category name")?);
            } else if p.at_keyword("projection") {
                p.bump();
                d.projection = Some(p.ident("a functor name")?);
            } else {
                p.error("`fiber`, `transport`, `total` or `projection`");
                return Err(());
            }
            Ok(())
        });
        Ok((Decl::Indexed(d), end))
    }

    fn presheaf(&mut self) -> PResult<(Decl, Span)> {
        self.bump();
        let name = self.ident("a presheaf name")?;
        self.keyword("on")?;
        let on = self.ident("a category name")?;
        let mut d = PresheafDecl { name, on, elements: Vec::new(), actions: Vec::new() };
        let end = self.body(|p| {
            let start = p.peek().span;
            if p.at_keyword("elements") {
                p.bump();
                let c = p.ident("an object name")?;
                let colon = p.expect(Tok::Colon)?;
                let xs = if matches!(p.peek().tok, Tok::Break | Tok::RBrace | Tok::Eof) {
                    Vec::new()
                } else {
                    p.list("an element name")?
                };
                let span = start.to(xs.last().map_or(colon, |x| x.span));
                d.elements.push(Spanned::new((c, xs), span));
            } else if p.at_keyword("act") {
                p.bump();
                let f = p.ident("an arrow name")?;
                p.expect(Tok::Colon)?;
                let x = p.ident("an element name")?;
                p.expect(Tok::Arrow)?;
                let y = p.ident("an element name")?;
                let span = start.to(y.span);
                d.actions.push(Spanned::new((f, x, y), span));
            } else {
                p.error("`elements` or `act`");
                return Err(());
            }
            Ok(())
        });
        Ok((Decl::Presheaf(d), end))
    }

    fn transform(&mut self) -> PResult<(Decl, Span)> {
        self.bump();
        let name = self.ident("a transformation name")?;
        self.expect(Tok::Colon)?;
        let source = self.ident("a source functor")?;
        self.expect(Tok::FatArrow)?;
        let target = self.ident("a target functor")?;
        let mut components = Vec::new();
        let end = self.body(|p| {
            let start = p.keyword("at")?;
            let x = p.ident("an object name")?;
            p.expect(Tok::Eq)?;
            let f = p.ident("an arrow name")?;
            let span = start.to(f.span);
            components.push(Spanned::new((x, f), span));
            Ok(())
        });
        Ok((Decl::Transform(TransformDecl { name, source, target, components }), end))
    }

    fn site(&mut self) -> PResult<(Decl, Span)> {
        self.bump();
        let name = self.ident("a site name")?;
        self.expect(Tok::Colon)?;
        let functor = self.ident("a functor name")?;
        self.keyword("from")?;
        let source = self.ident("a source topology")?;
        self.keyword("to")?;
        let target = self.ident("a target topology")?;
        let end = target.span;
        self.end_of_line()?;
        Ok((Decl::Site(SiteDecl { name, functor, source, target }), end))
    }

    fn check(&mut self) -> PResult<(Decl, Span)> {
        self.bump();
        let mut kind = self.ident("a check kind")?;
        while self.peek().tok == Tok::Minus {
            self.bump();
            let more = self.ident("a check kind")?;
            kind = Spanned::new(format!("{}-{}", kind.node, more.node), kind.span.to(more.span));
        }
        let target = self.ident("a check target")?;
        let mut end = target.span;
        let mut args = Vec::new();
        while let Tok::Ident { .. } = self.peek().tok {
            let a = self.ident("an argument")?;
            end = a.span;
            args.push(a);
        }
        self.end_of_line()?;
        Ok((Decl::Check(CheckDecl { kind, target, args }), end))
    }

    fn end_of_line(&mut self) -> PResult<()> {
        match self.peek().tok {
            Tok::Break | Tok::Eof => Ok(()),
            _ => {
                self.error("end of line");
                Err(())
            }
        }
    }
}
