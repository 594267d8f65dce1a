//! Recursive-descent parser with panic-mode recovery.
//!
//! Each production reports the first offending token and then skips to a
//! synchronization point (`;`, a brace boundary, or the next declaration
//! keyword) so one broken statement does not hide later errors.

use super::ast::{
    Block, Decl, DeclKind, FieldDecl, Import, Member, MethodDecl, NameRef, Signature, SourceUnit,
    Stmt,
};
use super::token::{lex, Token, TokenKind};
use super::{ParseDiagnostic, Severity};

/// Parse one file. Returns the tree only when the file is clean; any
/// lexical or syntax problem yields the full diagnostic list instead.
pub fn parse_unit(text: &str, path: &str) -> Result<SourceUnit, Vec<ParseDiagnostic>> {
    let (tokens, mut diagnostics) = lex(text, path);
    let mut parser = Parser {
        tokens,
        pos: 0,
        path: path.to_string(),
        diagnostics: Vec::new(),
        end_line: (text.lines().count().max(1)) as u32,
    };
    let unit = parser.unit(text);
    diagnostics.extend(parser.diagnostics);
    if diagnostics.iter().any(|d| d.severity == Severity::Error) {
        Err(diagnostics)
    } else {
        Ok(unit)
    }
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    path: String,
    diagnostics: Vec<ParseDiagnostic>,
    end_line: u32,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn at(&self, kind: &TokenKind) -> bool {
        self.peek().map(|t| &t.kind == kind).unwrap_or(false)
    }

    fn advance(&mut self) -> Option<Token> {
        let token = self.tokens.get(self.pos).cloned();
        if token.is_some() {
            self.pos += 1;
        }
        token
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.at(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    /// Position of the current token, or just past the last line at EOF.
    fn here(&self) -> (u32, u32) {
        match self.peek() {
            Some(token) => (token.line, token.column),
            None => (self.end_line, 1),
        }
    }

    fn found(&self) -> String {
        match self.peek() {
            Some(token) => format!("`{}`", token.kind.lexeme()),
            None => "end of file".to_string(),
        }
    }

    fn error(&mut self, expected: &str) {
        let (line, column) = self.here();
        let found = self.found();
        self.diagnostics.push(ParseDiagnostic {
            path: self.path.clone(),
            line,
            column,
            message: format!("expected {expected}, found {found}"),
            severity: Severity::Error,
        });
    }

    fn expect(&mut self, kind: &TokenKind, expected: &str) -> Option<Token> {
        if self.at(kind) {
            self.advance()
        } else {
            self.error(expected);
            None
        }
    }

    fn expect_ident(&mut self, expected: &str) -> Option<(String, u32)> {
        match self.peek() {
            Some(Token {
                kind: TokenKind::Ident(name),
                line,
                ..
            }) => {
                let result = (name.clone(), *line);
                self.pos += 1;
                Some(result)
            }
            _ => {
                self.error(expected);
                None
            }
        }
    }

    /// `NAME ("." NAME)*`
    fn dotted_path(&mut self, expected: &str) -> Option<(String, u32)> {
        let (mut path, line) = self.expect_ident(expected)?;
        while self.eat(&TokenKind::Dot) {
            let (segment, _) = self.expect_ident("name after `.`")?;
            path.push('.');
            path.push_str(&segment);
        }
        Some((path, line))
    }

    // -- recovery ----------------------------------------------------------

    fn at_decl_start(&self) -> bool {
        matches!(
            self.peek().map(|t| &t.kind),
            Some(TokenKind::Interface) | Some(TokenKind::Abstract) | Some(TokenKind::Class)
        )
    }

    /// Skip to the next declaration keyword at brace depth zero.
    fn recover_to_decl(&mut self) {
        let mut depth: i64 = 0;
        while let Some(token) = self.peek() {
            match token.kind {
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    depth -= 1;
                    if depth <= 0 {
                        self.pos += 1;
                        if depth == 0 {
                            return; // consumed the closing brace of the broken decl
                        }
                        continue;
                    }
                }
                _ => {
                    if depth == 0 && self.at_decl_start() {
                        return;
                    }
                }
            }
            self.pos += 1;
        }
    }

    /// Skip to just past the next `;`, or stop before a brace boundary.
    fn recover_to_stmt(&mut self) {
        while let Some(token) = self.peek() {
            match token.kind {
                TokenKind::Semi => {
                    self.pos += 1;
                    return;
                }
                // Stop before `}` so the enclosing body can close.
                TokenKind::RBrace => return,
                // A stray `{…}` group (say, an orphaned body) is skipped
                // wholesale; otherwise the caller's loop would see the same
                // `{` forever.
                TokenKind::LBrace => {
                    self.skip_balanced_braces();
                    return;
                }
                _ => self.pos += 1,
            }
        }
    }

    /// Consume from an opening `{` through its matching `}` (or to end of
    /// input when unbalanced).
    fn skip_balanced_braces(&mut self) {
        let mut depth: i64 = 0;
        while let Some(token) = self.peek() {
            match token.kind {
                TokenKind::LBrace => depth += 1,
                TokenKind::RBrace => {
                    depth -= 1;
                    if depth == 0 {
                        self.pos += 1;
                        return;
                    }
                }
                _ => {}
            }
            self.pos += 1;
        }
    }

    // -- productions -------------------------------------------------------

    fn unit(&mut self, text: &str) -> SourceUnit {
        let mut unit = SourceUnit {
            path: self.path.clone(),
            package: String::new(),
            package_line: 1,
            imports: Vec::new(),
            decls: Vec::new(),
            lines: text.lines().map(|l| l.to_string()).collect(),
        };

        if self.expect(&TokenKind::Package, "`package`").is_some() {
            if let Some((path, line)) = self.dotted_path("package path") {
                unit.package = path;
                unit.package_line = line;
            }
            self.expect(&TokenKind::Semi, "`;` after package path");
        } else {
            self.recover_to_decl();
        }

        while self.at(&TokenKind::Import) {
            self.advance();
            if let Some((path, line)) = self.dotted_path("import path") {
                unit.imports.push(Import { path, line });
            }
            self.expect(&TokenKind::Semi, "`;` after import path");
        }

        while let Some(token) = self.peek() {
            match token.kind {
                TokenKind::Interface => {
                    if let Some(decl) = self.interface_decl() {
                        unit.decls.push(decl);
                    } else {
                        self.recover_to_decl();
                    }
                }
                TokenKind::Abstract | TokenKind::Class => {
                    if let Some(decl) = self.class_decl() {
                        unit.decls.push(decl);
                    } else {
                        self.recover_to_decl();
                    }
                }
                _ => {
                    self.error("a declaration (`interface`, `class`, or `abstract class`)");
                    self.advance();
                    self.recover_to_decl();
                }
            }
        }

        unit
    }

    fn interface_decl(&mut self) -> Option<Decl> {
        self.expect(&TokenKind::Interface, "`interface`")?;
        let (name, line) = self.expect_ident("interface name")?;
        self.expect(&TokenKind::LBrace, "`{` after interface name")?;
        let mut sigs = Vec::new();
        loop {
            if self.eat(&TokenKind::RBrace) {
                break;
            }
            if self.peek().is_none() {
                self.error("`}` to close the interface");
                return None;
            }
            match self.signature() {
                Some(sig) => sigs.push(sig),
                None => self.recover_to_stmt(),
            }
        }
        Some(Decl {
            name,
            line,
            kind: DeclKind::Interface { sigs },
        })
    }

    fn signature(&mut self) -> Option<Signature> {
        let (name, line) = self.expect_ident("method signature")?;
        let params = self.param_list()?;
        self.expect(&TokenKind::Semi, "`;` after signature")?;
        Some(Signature { name, params, line })
    }

    fn class_decl(&mut self) -> Option<Decl> {
        let is_abstract = self.eat(&TokenKind::Abstract);
        self.expect(&TokenKind::Class, "`class`")?;
        let (name, line) = self.expect_ident("class name")?;
        let extends = if self.eat(&TokenKind::Extends) {
            let (parent, parent_line) = self.expect_ident("superclass name")?;
            Some(NameRef {
                name: parent,
                line: parent_line,
            })
        } else {
            None
        };
        let mut implements = Vec::new();
        if self.eat(&TokenKind::Implements) {
            loop {
                let (iface, iface_line) = self.expect_ident("interface name")?;
                implements.push(NameRef {
                    name: iface,
                    line: iface_line,
                });
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(&TokenKind::LBrace, "`{` to open the class body")?;
        let mut members = Vec::new();
        loop {
            if self.eat(&TokenKind::RBrace) {
                break;
            }
            if self.peek().is_none() {
                self.error("`}` to close the class body");
                return None;
            }
            match self.member() {
                Some(member) => members.push(member),
                None => self.recover_to_stmt(),
            }
        }
        Some(Decl {
            name,
            line,
            kind: DeclKind::Class {
                is_abstract,
                extends,
                implements,
                members,
            },
        })
    }

    fn member(&mut self) -> Option<Member> {
        if self.eat(&TokenKind::Field) {
            let (name, line) = self.expect_ident("field name")?;
            self.expect(&TokenKind::Semi, "`;` after field name")?;
            return Some(Member::Field(FieldDecl { name, line }));
        }
        let (name, line) = self.expect_ident("a member (`field` or a method)")?;
        let params = self.param_list()?;
        let body = self.block()?;
        Some(Member::Method(MethodDecl {
            name,
            params,
            body,
            line,
        }))
    }

    fn param_list(&mut self) -> Option<Vec<String>> {
        self.expect(&TokenKind::LParen, "`(`")?;
        let mut params = Vec::new();
        if self.eat(&TokenKind::RParen) {
            return Some(params);
        }
        loop {
            let (param, _) = self.expect_ident("parameter name")?;
            params.push(param);
            if self.eat(&TokenKind::Comma) {
                continue;
            }
            self.expect(&TokenKind::RParen, "`)` after parameters")?;
            return Some(params);
        }
    }

    fn block(&mut self) -> Option<Block> {
        let open = self.expect(&TokenKind::LBrace, "`{` to open a block")?;
        let open_line = open.line;
        let mut stmts = Vec::new();
        loop {
            if self.at(&TokenKind::RBrace) {
                let close = self.advance().expect("peeked");
                return Some(Block {
                    stmts,
                    open_line,
                    close_line: close.line,
                });
            }
            if self.peek().is_none() {
                self.error("`}` to close the block");
                return None;
            }
            match self.stmt() {
                Some(stmt) => stmts.push(stmt),
                None => self.recover_to_stmt(),
            }
        }
    }

    fn stmt(&mut self) -> Option<Stmt> {
        let token = self.peek()?.clone();
        match token.kind {
            TokenKind::Call => {
                self.advance();
                let (class, class_line) = self.expect_ident("class name after `call`")?;
                self.expect(&TokenKind::Dot, "`.` between class and method")?;
                let (method, _) = self.expect_ident("method name")?;
                let args = self.param_list()?;
                self.expect(&TokenKind::Semi, "`;` after call")?;
                Some(Stmt::Call {
                    class: NameRef {
                        name: class,
                        line: class_line,
                    },
                    method,
                    args,
                    line: token.line,
                })
            }
            TokenKind::Access => {
                self.advance();
                let (class, class_line) = self.expect_ident("class name after `access`")?;
                self.expect(&TokenKind::Dot, "`.` between class and attribute")?;
                let (attribute, _) = self.expect_ident("attribute name")?;
                self.expect(&TokenKind::Semi, "`;` after access")?;
                Some(Stmt::Access {
                    class: NameRef {
                        name: class,
                        line: class_line,
                    },
                    attribute,
                    line: token.line,
                })
            }
            TokenKind::Assign => {
                self.advance();
                let (name, _) = self.expect_ident("attribute name after `assign`")?;
                self.expect(&TokenKind::Semi, "`;` after assign")?;
                Some(Stmt::Assign {
                    name,
                    line: token.line,
                })
            }
            TokenKind::If => {
                self.advance();
                self.expect(&TokenKind::LParen, "`(` after `if`")?;
                let (condition, _) = self.expect_ident("condition name")?;
                self.expect(&TokenKind::RParen, "`)` after condition")?;
                let then_block = self.block()?;
                let else_block = if self.eat(&TokenKind::Else) {
                    Some(self.block()?)
                } else {
                    None
                };
                Some(Stmt::If {
                    condition,
                    then_block,
                    else_block,
                    line: token.line,
                })
            }
            TokenKind::While => {
                self.advance();
                self.expect(&TokenKind::LParen, "`(` after `while`")?;
                let (condition, _) = self.expect_ident("condition name")?;
                self.expect(&TokenKind::RParen, "`)` after condition")?;
                let body = self.block()?;
                Some(Stmt::While {
                    condition,
                    body,
                    line: token.line,
                })
            }
            TokenKind::Return => {
                self.advance();
                self.expect(&TokenKind::Semi, "`;` after `return`")?;
                Some(Stmt::Return { line: token.line })
            }
            _ => {
                self.error("a statement");
                None
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn parse_ok(text: &str) -> SourceUnit {
        parse_unit(text, "test.moo").expect("should parse")
    }

    fn parse_errors(text: &str) -> Vec<ParseDiagnostic> {
        parse_unit(text, "test.moo").expect_err("should fail")
    }

    #[test]
    fn minimal_unit() {
        let unit = parse_ok("package p; class A { }");
        assert_eq!(unit.package, "p");
        assert_eq!(unit.decls.len(), 1);
        assert_eq!(unit.decls[0].name, "A");
        assert!(matches!(
            unit.decls[0].kind,
            DeclKind::Class {
                is_abstract: false,
                ..
            }
        ));
    }

    #[test]
    fn missing_class_name_points_at_the_brace() {
        let errors = parse_errors("package p; class { }");
        assert_eq!(errors.len(), 1);
        assert_eq!(errors[0].line, 1);
        assert_eq!(errors[0].column, 18);
        assert!(errors[0].message.contains("class name"));
        assert!(errors[0].message.contains("`{`"));
    }

    #[test]
    fn three_class_fixture_matches_hand_built_tree() {
        // Hand-derived from the grammar: one interface, one abstract base,
        // one concrete subclass with an if/else and a while.
        let text = "\
package demo;

interface Store {
    put(item);
}

abstract class Base {
    field id;

    tag() {
        assign id;
    }
}

class Widget extends Base implements Store {
    field size;

    put(item) {
        if (ready) {
            call Widget.grow();
        } else {
            return;
        }
    }

    grow() {
        while (small) {
            assign size;
        }
        access Base.id;
    }
}
";
        let unit = parse_ok(text);
        assert_eq!(unit.package, "demo");
        assert_eq!(unit.decls.len(), 3);

        let expected = SourceUnit {
            path: "test.moo".to_string(),
            package: "demo".to_string(),
            package_line: 1,
            imports: vec![],
            lines: text.lines().map(|l| l.to_string()).collect(),
            decls: vec![
                Decl {
                    name: "Store".to_string(),
                    line: 3,
                    kind: DeclKind::Interface {
                        sigs: vec![Signature {
                            name: "put".to_string(),
                            params: vec!["item".to_string()],
                            line: 4,
                        }],
                    },
                },
                Decl {
                    name: "Base".to_string(),
                    line: 7,
                    kind: DeclKind::Class {
                        is_abstract: true,
                        extends: None,
                        implements: vec![],
                        members: vec![
                            Member::Field(FieldDecl {
                                name: "id".to_string(),
                                line: 8,
                            }),
                            Member::Method(MethodDecl {
                                name: "tag".to_string(),
                                params: vec![],
                                line: 10,
                                body: Block {
                                    stmts: vec![Stmt::Assign {
                                        name: "id".to_string(),
                                        line: 11,
                                    }],
                                    open_line: 10,
                                    close_line: 12,
                                },
                            }),
                        ],
                    },
                },
                Decl {
                    name: "Widget".to_string(),
                    line: 15,
                    kind: DeclKind::Class {
                        is_abstract: false,
                        extends: Some(NameRef {
                            name: "Base".to_string(),
                            line: 15,
                        }),
                        implements: vec![NameRef {
                            name: "Store".to_string(),
                            line: 15,
                        }],
                        members: vec![
                            Member::Field(FieldDecl {
                                name: "size".to_string(),
                                line: 16,
                            }),
                            Member::Method(MethodDecl {
                                name: "put".to_string(),
                                params: vec!["item".to_string()],
                                line: 18,
                                body: Block {
                                    stmts: vec![Stmt::If {
                                        condition: "ready".to_string(),
                                        line: 19,
                                        then_block: Block {
                                            stmts: vec![Stmt::Call {
                                                class: NameRef {
                                                    name: "Widget".to_string(),
                                                    line: 20,
                                                },
                                                method: "grow".to_string(),
                                                args: vec![],
                                                line: 20,
                                            }],
                                            open_line: 19,
                                            close_line: 21,
                                        },
                                        else_block: Some(Block {
                                            stmts: vec![Stmt::Return { line: 22 }],
                                            open_line: 21,
                                            close_line: 23,
                                        }),
                                    }],
                                    open_line: 18,
                                    close_line: 24,
                                },
                            }),
                            Member::Method(MethodDecl {
                                name: "grow".to_string(),
                                params: vec![],
                                line: 26,
                                body: Block {
                                    stmts: vec![
                                        Stmt::While {
                                            condition: "small".to_string(),
                                            line: 27,
                                            body: Block {
                                                stmts: vec![Stmt::Assign {
                                                    name: "size".to_string(),
                                                    line: 28,
                                                }],
                                                open_line: 27,
                                                close_line: 29,
                                            },
                                        },
                                        Stmt::Access {
                                            class: NameRef {
                                                name: "Base".to_string(),
                                                line: 30,
                                            },
                                            attribute: "id".to_string(),
                                            line: 30,
                                        },
                                    ],
                                    open_line: 26,
                                    close_line: 31,
                                },
                            }),
                        ],
                    },
                },
            ],
        };
        assert_eq!(unit, expected);
    }

    #[test]
    fn tree_reproduces_the_token_sequence() {
        let text = "package p;\nimport q.r.S;\nclass A extends B implements C, D {\n  field x;\n  m(a, b) { if (c) { return; } else { call S.go(a); } while (d) { assign x; } access A.x; }\n}\n";
        let unit = parse_ok(text);
        let lexed: Vec<TokenKind> = lex(text, "test.moo")
            .0
            .into_iter()
            .map(|t| t.kind)
            .collect();
        assert_eq!(unit.to_token_kinds(), lexed);
    }

    #[test]
    fn recovery_collects_multiple_errors() {
        let text = "package p;\nclass A {\n  m() { call X; return; }\n  n() { assign ; }\n}\n";
        let errors = parse_errors(text);
        assert!(errors.len() >= 2, "got {errors:?}");
        assert_eq!(errors[0].line, 3); // `call X;` missing `.method(...)`
        assert!(errors.iter().any(|e| e.line == 4)); // `assign ;` missing name
    }

    #[test]
    fn missing_package_is_an_error() {
        let errors = parse_errors("class A { }");
        assert!(errors[0].message.contains("`package`"));
    }

    #[test]
    fn unclosed_block_reports_eof() {
        let errors = parse_errors("package p; class A { m() { return;");
        assert!(errors.iter().any(|e| e.message.contains("end of file")));
    }

    #[test]
    fn stray_token_before_a_body_recovers_past_the_block() {
        // A word before the method name derails member parsing right in
        // front of a `{`; recovery must swallow the orphaned body instead
        // of re-reading the same brace forever.
        let errors = parse_errors("package p; class C { method m() { } }");
        assert!(!errors.is_empty());

        // After skipping the orphan, the next member still parses.
        let unit = parse_unit("package p; class C { junk m() { } ok() { return; } }", "t.moo");
        assert!(unit.is_err(), "the stray word is still an error");
    }

    #[test]
    fn rendered_source_parses_back_to_the_same_tokens() {
        let text = "package p; abstract class A extends B implements C { field f; m() { if (x) { assign f; } } }";
        let unit = parse_ok(text);
        let rendered = unit.render_source();
        let reparsed = parse_ok(&rendered);
        assert_eq!(reparsed.to_token_kinds(), unit.to_token_kinds());
    }
}
