//! Syntax tree and recursive-descent grammar for `.tm` files.

use crate::diag::{Code, Diagnostic, Position};
use crate::model::{ActionKind, ArrowKind};
use crate::parse::lexer::{Tok, Token};

#[derive(Debug, Clone)]
pub(crate) struct Name {
    pub text: String,
    pub pos: Position,
}

#[derive(Debug, Clone)]
pub(crate) struct PathAst {
    pub segments: Vec<Name>,
}

impl PathAst {
    pub fn pos(&self) -> Position {
        self.segments[0].pos
    }

    pub fn dotted(&self) -> String {
        self.segments
            .iter()
            .map(|s| s.text.as_str())
            .collect::<Vec<_>>()
            .join(".")
    }
}

#[derive(Debug, Clone)]
pub(crate) struct ThimacAst {
    pub name: Name,
    /// Declared with `thing`: carries an implicit create action.
    pub thing: bool,
    pub body: Vec<ThimacItem>,
}

#[derive(Debug, Clone)]
pub(crate) enum ThimacItem {
    Action {
        kind: ActionKind,
        name: Option<Name>,
        label: Option<String>,
        pos: Position,
    },
    Thimac(ThimacAst),
}

#[derive(Debug, Clone)]
pub(crate) enum ModelItem {
    Thimac(ThimacAst),
    Arrow {
        kind: ArrowKind,
        src: PathAst,
        dst: PathAst,
        label: Option<Name>,
        pos: Position,
    },
    Negative {
        src: PathAst,
        target: Name,
        label: Option<Name>,
        pos: Position,
    },
    Bar {
        name: Name,
        kind: ArrowKind,
        required: Vec<PathAst>,
        dst: PathAst,
    },
}

#[derive(Debug, Clone)]
pub(crate) enum RefAst {
    Path(PathAst),
    Arrow {
        kind: ArrowKind,
        src: PathAst,
        dst: PathAst,
    },
    Negative {
        src: PathAst,
        target: Name,
    },
}

#[derive(Debug, Clone)]
pub(crate) enum RegionAst {
    List(Vec<RefAst>),
    Merge(Vec<Name>),
}

#[derive(Debug, Clone)]
pub(crate) enum EventItem {
    Event {
        name: Name,
        kind: Option<crate::bundle::EventKind>,
        region: RegionAst,
    },
    Negative {
        name: Name,
        negates: Name,
    },
    Exclusive {
        a: Name,
        b: Name,
        pos: Position,
    },
}

#[derive(Debug, Clone)]
pub(crate) enum BehaviorItem {
    Edge {
        pred: Name,
        succ: Name,
        temporal: bool,
    },
    Join {
        required: Vec<Name>,
        successor: Name,
        temporal: bool,
        pos: Position,
    },
}

#[derive(Debug, Clone)]
pub(crate) enum ScenarioItem {
    Choose(Vec<Name>),
    Start { tick: u32, event: Name },
    Horizon(u32),
}

#[derive(Debug, Clone)]
pub(crate) struct ScenarioAst {
    pub name: Name,
    pub items: Vec<ScenarioItem>,
}

#[derive(Debug, Clone, Default)]
pub(crate) struct FileAst {
    pub model: Option<(String, Position)>,
    pub model_items: Vec<ModelItem>,
    pub events: Vec<EventItem>,
    pub behavior: Vec<BehaviorItem>,
    pub scenarios: Vec<ScenarioAst>,
}

const THIMAC_KEYWORDS: &[&str] = &["thimac", "thing", "action", "label"];

pub(crate) struct Parser {
    tokens: Vec<Token>,
    at: usize,
}

type PResult<T> = Result<T, Diagnostic>;

fn syntax(pos: Position, message: impl Into<String>) -> Diagnostic {
    Diagnostic::new(Code::Syntax, message).at(pos)
}

impl Parser {
    pub fn new(tokens: Vec<Token>) -> Self {
        Parser { tokens, at: 0 }
    }

    fn peek(&self) -> &Token {
        &self.tokens[self.at.min(self.tokens.len() - 1)]
    }

    fn peek_at(&self, offset: usize) -> &Tok {
        &self.tokens[(self.at + offset).min(self.tokens.len() - 1)].tok
    }

    fn next(&mut self) -> Token {
        let t = self.peek().clone();
        if self.at < self.tokens.len() - 1 {
            self.at += 1;
        }
        t
    }

    fn unexpected(&self, expected: &str) -> Diagnostic {
        let t = self.peek();
        syntax(t.pos, format!("expected {expected}, found {}", t.tok.describe()))
    }

    fn expect(&mut self, tok: Tok, expected: &str) -> PResult<Position> {
        if self.peek().tok == tok {
            Ok(self.next().pos)
        } else {
            Err(self.unexpected(expected))
        }
    }

    fn is_keyword(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Ident(s) if s == word)
    }

    fn eat_keyword(&mut self, word: &str) -> bool {
        if self.is_keyword(word) {
            self.next();
            true
        } else {
            false
        }
    }

    fn expect_keyword(&mut self, word: &str) -> PResult<Position> {
        if self.is_keyword(word) {
            Ok(self.next().pos)
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    fn ident(&mut self, expected: &str) -> PResult<Name> {
        match &self.peek().tok {
            Tok::Ident(s) => {
                let text = s.clone();
                let pos = self.next().pos;
                Ok(Name { text, pos })
            }
            _ => Err(self.unexpected(expected)),
        }
    }

    fn int(&mut self) -> PResult<u32> {
        match self.peek().tok {
            Tok::Int(n) => {
                self.next();
                Ok(n)
            }
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn string(&mut self) -> PResult<String> {
        match &self.peek().tok {
            Tok::Str(s) => {
                let s = s.clone();
                self.next();
                Ok(s)
            }
            _ => Err(self.unexpected("a string")),
        }
    }

    /// Runs `item` until the closing brace of a block opened at `open`.
    fn block<T>(
        &mut self,
        open: Position,
        what: &str,
        mut item: impl FnMut(&mut Self) -> PResult<T>,
    ) -> PResult<Vec<T>> {
        let mut items = Vec::new();
        loop {
            match self.peek().tok {
                Tok::RBrace => {
                    self.next();
                    return Ok(items);
                }
                Tok::Eof => {
                    return Err(syntax(open, format!("unclosed `{{` of {what} block")));
                }
                _ => items.push(item(self)?),
            }
        }
    }

    fn name_list(&mut self, expected: &str) -> PResult<Vec<Name>> {
        let open = self.expect(Tok::LParen, "`(`")?;
        let mut names = vec![self.ident(expected)?];
        loop {
            match self.peek().tok {
                Tok::Comma => {
                    self.next();
                    names.push(self.ident(expected)?);
                }
                Tok::RParen => {
                    self.next();
                    return Ok(names);
                }
                Tok::Eof => return Err(syntax(open, "unclosed `(`")),
                _ => return Err(self.unexpected("`,` or `)`")),
            }
        }
    }

    pub fn file(&mut self) -> PResult<FileAst> {
        let mut file = FileAst::default();
        loop {
            let t = self.peek().clone();
            match &t.tok {
                Tok::Eof => break,
                Tok::Ident(word) => match word.as_str() {
                    "model" => {
                        self.next();
                        if file.model.is_some() {
                            return Err(syntax(t.pos, "only one `model` block is allowed"));
                        }
                        let name = self.string()?;
                        let open = self.expect(Tok::LBrace, "`{`")?;
                        file.model_items = self.block(open, "model", Self::model_item)?;
                        file.model = Some((name, t.pos));
                    }
                    "events" => {
                        self.next();
                        let open = self.expect(Tok::LBrace, "`{`")?;
                        let items = self.block(open, "events", Self::event_item)?;
                        file.events.extend(items);
                    }
                    "behavior" => {
                        self.next();
                        let open = self.expect(Tok::LBrace, "`{`")?;
                        let items = self.block(open, "behavior", Self::behavior_item)?;
                        file.behavior.extend(items);
                    }
                    "scenario" => {
                        self.next();
                        let name = self.ident("a scenario name")?;
                        let open = self.expect(Tok::LBrace, "`{`")?;
                        let items = self.block(open, "scenario", Self::scenario_item)?;
                        file.scenarios.push(ScenarioAst { name, items });
                    }
                    _ => return Err(self.unexpected("`model`, `events`, `behavior` or `scenario`")),
                },
                _ => return Err(self.unexpected("`model`, `events`, `behavior` or `scenario`")),
            }
        }
        if file.model.is_none() {
            return Err(syntax(Position::new(1, 1), "missing `model` block"));
        }
        Ok(file)
    }

    fn path(&mut self) -> PResult<PathAst> {
        let mut segments = vec![self.ident("a name")?];
        while self.peek().tok == Tok::Dot {
            self.next();
            segments.push(self.ident("a name after `.`")?);
        }
        Ok(PathAst { segments })
    }

    fn optional_label(&mut self) -> PResult<Option<Name>> {
        if self.eat_keyword("as") {
            Ok(Some(self.ident("an arc label")?))
        } else {
            Ok(None)
        }
    }

    fn arrow_token(&mut self) -> PResult<ArrowKind> {
        match self.peek().tok {
            Tok::Arrow => {
                self.next();
                Ok(ArrowKind::Flow)
            }
            Tok::Squiggle => {
                self.next();
                Ok(ArrowKind::Trigger)
            }
            _ => Err(self.unexpected("`->` or `~>`")),
        }
    }

    fn model_item(&mut self) -> PResult<ModelItem> {
        let t = self.peek().clone();
        let word = match &t.tok {
            Tok::Ident(w) => w.clone(),
            _ => return Err(self.unexpected("a model declaration")),
        };
        match word.as_str() {
            "thimac" | "thing" => Ok(ModelItem::Thimac(self.thimac()?)),
            "flow" | "trigger" => {
                self.next();
                let src = self.path()?;
                let kind = if word == "flow" {
                    self.expect(Tok::Arrow, "`->`")?;
                    ArrowKind::Flow
                } else {
                    self.expect(Tok::Squiggle, "`~>`")?;
                    ArrowKind::Trigger
                };
                let dst = self.path()?;
                let label = self.optional_label()?;
                Ok(ModelItem::Arrow {
                    kind,
                    src,
                    dst,
                    label,
                    pos: t.pos,
                })
            }
            "neg" => {
                self.next();
                let src = self.path()?;
                self.expect(Tok::NegArrow, "`-o`")?;
                let target = self.ident("an event name")?;
                let label = self.optional_label()?;
                Ok(ModelItem::Negative {
                    src,
                    target,
                    label,
                    pos: t.pos,
                })
            }
            "bar" => {
                self.next();
                let name = self.ident("a bar name")?;
                self.expect_keyword("requires")?;
                let open = self.expect(Tok::LParen, "`(`")?;
                let mut required = vec![self.path()?];
                loop {
                    match self.peek().tok {
                        Tok::Comma => {
                            self.next();
                            required.push(self.path()?);
                        }
                        Tok::RParen => {
                            self.next();
                            break;
                        }
                        Tok::Eof => return Err(syntax(open, "unclosed `(`")),
                        _ => return Err(self.unexpected("`,` or `)`")),
                    }
                }
                let kind = self.arrow_token()?;
                let dst = self.path()?;
                Ok(ModelItem::Bar {
                    name,
                    kind,
                    required,
                    dst,
                })
            }
            _ => Err(self.unexpected("`thimac`, `thing`, `flow`, `trigger`, `bar` or `neg`")),
        }
    }

    fn thimac(&mut self) -> PResult<ThimacAst> {
        let thing = self.is_keyword("thing");
        self.next();
        let name = self.ident("a thimac name")?;
        let body = if thing {
            if self.peek().tok == Tok::LBrace {
                let open = self.next().pos;
                self.block(open, "thing", Self::thimac_item)?
            } else {
                Vec::new()
            }
        } else {
            let open = self.expect(Tok::LBrace, "`{`")?;
            self.block(open, "thimac", Self::thimac_item)?
        };
        Ok(ThimacAst { name, thing, body })
    }

    fn thimac_item(&mut self) -> PResult<ThimacItem> {
        if self.is_keyword("thimac") || self.is_keyword("thing") {
            return Ok(ThimacItem::Thimac(self.thimac()?));
        }
        let pos = self.expect_keyword("action")?;
        let kind_name = self.ident("an action kind")?;
        let kind = ActionKind::from_keyword(&kind_name.text).ok_or_else(|| {
            syntax(
                kind_name.pos,
                format!(
                    "unknown action kind `{}` (expected create, process, release, transfer or receive)",
                    kind_name.text
                ),
            )
        })?;
        let name = match &self.peek().tok {
            Tok::Ident(w) if !THIMAC_KEYWORDS.contains(&w.as_str()) => Some(self.ident("a name")?),
            _ => None,
        };
        let label = if self.eat_keyword("label") {
            Some(self.string()?)
        } else {
            None
        };
        Ok(ThimacItem::Action {
            kind,
            name,
            label,
            pos,
        })
    }

    fn region_ref(&mut self) -> PResult<RefAst> {
        let src = self.path()?;
        match self.peek().tok {
            Tok::Arrow | Tok::Squiggle => {
                let kind = self.arrow_token()?;
                let dst = self.path()?;
                Ok(RefAst::Arrow { kind, src, dst })
            }
            Tok::NegArrow => {
                self.next();
                let target = self.ident("an event name")?;
                Ok(RefAst::Negative { src, target })
            }
            _ => Ok(RefAst::Path(src)),
        }
    }

    fn event_item(&mut self) -> PResult<EventItem> {
        let t = self.peek().clone();
        if self.eat_keyword("event") {
            let name = self.ident("an event name")?;
            let kind = if self.eat_keyword("extended") {
                Some(crate::bundle::EventKind::Extended)
            } else if self.eat_keyword("terminating") {
                Some(crate::bundle::EventKind::Terminating)
            } else {
                None
            };
            let region = if self.eat_keyword("merge") {
                RegionAst::Merge(self.name_list("an event name")?)
            } else {
                self.expect_keyword("region")?;
                let open = self.expect(Tok::LBrace, "`{`")?;
                let mut refs = Vec::new();
                loop {
                    match self.peek().tok {
                        Tok::RBrace => {
                            self.next();
                            break;
                        }
                        Tok::Eof => return Err(syntax(open, "unclosed `{` of region block")),
                        _ => {
                            refs.push(self.region_ref()?);
                            match self.peek().tok {
                                Tok::Comma => {
                                    self.next();
                                }
                                Tok::RBrace => {}
                                Tok::Eof => {
                                    return Err(syntax(open, "unclosed `{` of region block"))
                                }
                                _ => return Err(self.unexpected("`,` or `}`")),
                            }
                        }
                    }
                }
                RegionAst::List(refs)
            };
            Ok(EventItem::Event { name, kind, region })
        } else if self.eat_keyword("negative") {
            let name = self.ident("a negative event name")?;
            self.expect_keyword("negates")?;
            let negates = self.ident("an event name")?;
            Ok(EventItem::Negative { name, negates })
        } else if self.eat_keyword("exclusive") {
            let names = self.name_list("an event name")?;
            if names.len() != 2 {
                return Err(syntax(t.pos, "`exclusive` takes exactly two events"));
            }
            let mut names = names.into_iter();
            let a = names.next().expect("two names");
            let b = names.next().expect("two names");
            Ok(EventItem::Exclusive { a, b, pos: t.pos })
        } else {
            Err(self.unexpected("`event`, `negative` or `exclusive`"))
        }
    }

    fn behavior_item(&mut self) -> PResult<BehaviorItem> {
        if self.is_keyword("join") && *self.peek_at(1) == Tok::LParen {
            let pos = self.next().pos;
            let required = self.name_list("an event name")?;
            self.expect(Tok::Arrow, "`->`")?;
            let successor = self.ident("an event name")?;
            let temporal = self.eat_keyword("temporal");
            return Ok(BehaviorItem::Join {
                required,
                successor,
                temporal,
                pos,
            });
        }
        let pred = self.ident("an event name")?;
        self.expect(Tok::Arrow, "`->`")?;
        let succ = self.ident("an event name")?;
        let temporal = self.eat_keyword("temporal");
        Ok(BehaviorItem::Edge {
            pred,
            succ,
            temporal,
        })
    }

    fn scenario_item(&mut self) -> PResult<ScenarioItem> {
        if self.eat_keyword("choose") {
            let mut names = vec![self.ident("an event name")?];
            while self.peek().tok == Tok::Comma {
                self.next();
                names.push(self.ident("an event name")?);
            }
            Ok(ScenarioItem::Choose(names))
        } else if self.eat_keyword("at") {
            let tick = self.int()?;
            self.expect_keyword("start")?;
            let event = self.ident("an event name")?;
            Ok(ScenarioItem::Start { tick, event })
        } else if self.eat_keyword("horizon") {
            Ok(ScenarioItem::Horizon(self.int()?))
        } else {
            Err(self.unexpected("`choose`, `at` or `horizon`"))
        }
    }
}
