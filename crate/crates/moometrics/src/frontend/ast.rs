//! Parse tree for one source file.
//!
//! The tree keeps enough position data for diagnostics and line tallies, and
//! can reproduce both its token sequence (the parser round-trip contract)
//! and a formatted source rendering (used by generators in tests).

use super::token::TokenKind;

/// One parsed `.moo` file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SourceUnit {
    pub path: String,
    /// Dot-separated package path from the mandatory `package` declaration.
    pub package: String,
    pub package_line: u32,
    pub imports: Vec<Import>,
    pub decls: Vec<Decl>,
    /// Raw source lines, kept for blank/comment/code classification.
    pub lines: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Import {
    /// Fully qualified class path, e.g. `shop.core.Entity`.
    pub path: String,
    pub line: u32,
}

/// A simple-name reference with its source position, resolved during
/// lowering.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NameRef {
    pub name: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decl {
    pub name: String,
    pub line: u32,
    pub kind: DeclKind,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DeclKind {
    Interface {
        sigs: Vec<Signature>,
    },
    Class {
        is_abstract: bool,
        extends: Option<NameRef>,
        implements: Vec<NameRef>,
        members: Vec<Member>,
    },
}

/// Interface method signature (no body).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Signature {
    pub name: String,
    pub params: Vec<String>,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Member {
    Field(FieldDecl),
    Method(MethodDecl),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FieldDecl {
    pub name: String,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MethodDecl {
    pub name: String,
    pub params: Vec<String>,
    pub body: Block,
    pub line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Block {
    pub stmts: Vec<Stmt>,
    /// Line of the opening brace.
    pub open_line: u32,
    /// Line of the closing brace.
    pub close_line: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Stmt {
    Call {
        class: NameRef,
        method: String,
        args: Vec<String>,
        line: u32,
    },
    Access {
        class: NameRef,
        attribute: String,
        line: u32,
    },
    Assign {
        name: String,
        line: u32,
    },
    If {
        condition: String,
        then_block: Block,
        else_block: Option<Block>,
        line: u32,
    },
    While {
        condition: String,
        body: Block,
        line: u32,
    },
    Return {
        line: u32,
    },
}

impl Stmt {
    pub fn line(&self) -> u32 {
        match self {
            Stmt::Call { line, .. }
            | Stmt::Access { line, .. }
            | Stmt::Assign { line, .. }
            | Stmt::If { line, .. }
            | Stmt::While { line, .. }
            | Stmt::Return { line } => *line,
        }
    }
}

fn ident(name: &str) -> TokenKind {
    TokenKind::Ident(name.to_string())
}

fn push_path(out: &mut Vec<TokenKind>, path: &str) {
    for (i, segment) in path.split('.').enumerate() {
        if i > 0 {
            out.push(TokenKind::Dot);
        }
        out.push(ident(segment));
    }
}

fn push_params(out: &mut Vec<TokenKind>, params: &[String]) {
    out.push(TokenKind::LParen);
    for (i, param) in params.iter().enumerate() {
        if i > 0 {
            out.push(TokenKind::Comma);
        }
        out.push(ident(param));
    }
    out.push(TokenKind::RParen);
}

impl SourceUnit {
    /// The exact token sequence this tree stands for. Parsing text and
    /// re-emitting tokens from the tree must agree with lexing the text.
    pub fn to_token_kinds(&self) -> Vec<TokenKind> {
        let mut out = Vec::new();
        out.push(TokenKind::Package);
        push_path(&mut out, &self.package);
        out.push(TokenKind::Semi);
        for import in &self.imports {
            out.push(TokenKind::Import);
            push_path(&mut out, &import.path);
            out.push(TokenKind::Semi);
        }
        for decl in &self.decls {
            decl.push_tokens(&mut out);
        }
        out
    }

    /// Format the tree back to parseable source text.
    pub fn render_source(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("package {};\n", self.package));
        for import in &self.imports {
            out.push_str(&format!("import {};\n", import.path));
        }
        for decl in &self.decls {
            out.push('\n');
            decl.render(&mut out);
        }
        out
    }
}

impl Decl {
    fn push_tokens(&self, out: &mut Vec<TokenKind>) {
        match &self.kind {
            DeclKind::Interface { sigs } => {
                out.push(TokenKind::Interface);
                out.push(ident(&self.name));
                out.push(TokenKind::LBrace);
                for sig in sigs {
                    out.push(ident(&sig.name));
                    push_params(out, &sig.params);
                    out.push(TokenKind::Semi);
                }
                out.push(TokenKind::RBrace);
            }
            DeclKind::Class {
                is_abstract,
                extends,
                implements,
                members,
            } => {
                if *is_abstract {
                    out.push(TokenKind::Abstract);
                }
                out.push(TokenKind::Class);
                out.push(ident(&self.name));
                if let Some(parent) = extends {
                    out.push(TokenKind::Extends);
                    out.push(ident(&parent.name));
                }
                if !implements.is_empty() {
                    out.push(TokenKind::Implements);
                    for (i, iface) in implements.iter().enumerate() {
                        if i > 0 {
                            out.push(TokenKind::Comma);
                        }
                        out.push(ident(&iface.name));
                    }
                }
                out.push(TokenKind::LBrace);
                for member in members {
                    match member {
                        Member::Field(field) => {
                            out.push(TokenKind::Field);
                            out.push(ident(&field.name));
                            out.push(TokenKind::Semi);
                        }
                        Member::Method(method) => {
                            out.push(ident(&method.name));
                            push_params(out, &method.params);
                            method.body.push_tokens(out);
                        }
                    }
                }
                out.push(TokenKind::RBrace);
            }
        }
    }

    fn render(&self, out: &mut String) {
        match &self.kind {
            DeclKind::Interface { sigs } => {
                out.push_str(&format!("interface {} {{\n", self.name));
                for sig in sigs {
                    out.push_str(&format!("    {}({});\n", sig.name, sig.params.join(", ")));
                }
                out.push_str("}\n");
            }
            DeclKind::Class {
                is_abstract,
                extends,
                implements,
                members,
            } => {
                if *is_abstract {
                    out.push_str("abstract ");
                }
                out.push_str(&format!("class {}", self.name));
                if let Some(parent) = extends {
                    out.push_str(&format!(" extends {}", parent.name));
                }
                if !implements.is_empty() {
                    let names: Vec<&str> =
                        implements.iter().map(|i| i.name.as_str()).collect();
                    out.push_str(&format!(" implements {}", names.join(", ")));
                }
                out.push_str(" {\n");
                for member in members {
                    match member {
                        Member::Field(field) => {
                            out.push_str(&format!("    field {};\n", field.name));
                        }
                        Member::Method(method) => {
                            out.push_str(&format!(
                                "    {}({}) {{\n",
                                method.name,
                                method.params.join(", ")
                            ));
                            render_stmts(&method.body.stmts, out, 2);
                            out.push_str("    }\n");
                        }
                    }
                }
                out.push_str("}\n");
            }
        }
    }
}

impl Block {
    fn push_tokens(&self, out: &mut Vec<TokenKind>) {
        out.push(TokenKind::LBrace);
        for stmt in &self.stmts {
            stmt.push_tokens(out);
        }
        out.push(TokenKind::RBrace);
    }
}

impl Stmt {
    fn push_tokens(&self, out: &mut Vec<TokenKind>) {
        match self {
            Stmt::Call {
                class,
                method,
                args,
                ..
            } => {
                out.push(TokenKind::Call);
                out.push(ident(&class.name));
                out.push(TokenKind::Dot);
                out.push(ident(method));
                push_params(out, args);
                out.push(TokenKind::Semi);
            }
            Stmt::Access {
                class, attribute, ..
            } => {
                out.push(TokenKind::Access);
                out.push(ident(&class.name));
                out.push(TokenKind::Dot);
                out.push(ident(attribute));
                out.push(TokenKind::Semi);
            }
            Stmt::Assign { name, .. } => {
                out.push(TokenKind::Assign);
                out.push(ident(name));
                out.push(TokenKind::Semi);
            }
            Stmt::If {
                condition,
                then_block,
                else_block,
                ..
            } => {
                out.push(TokenKind::If);
                out.push(TokenKind::LParen);
                out.push(ident(condition));
                out.push(TokenKind::RParen);
                then_block.push_tokens(out);
                if let Some(else_block) = else_block {
                    out.push(TokenKind::Else);
                    else_block.push_tokens(out);
                }
            }
            Stmt::While {
                condition, body, ..
            } => {
                out.push(TokenKind::While);
                out.push(TokenKind::LParen);
                out.push(ident(condition));
                out.push(TokenKind::RParen);
                body.push_tokens(out);
            }
            Stmt::Return { .. } => {
                out.push(TokenKind::Return);
                out.push(TokenKind::Semi);
            }
        }
    }
}

fn render_stmts(stmts: &[Stmt], out: &mut String, depth: usize) {
    let pad = "    ".repeat(depth);
    for stmt in stmts {
        match stmt {
            Stmt::Call {
                class,
                method,
                args,
                ..
            } => out.push_str(&format!(
                "{pad}call {}.{}({});\n",
                class.name,
                method,
                args.join(", ")
            )),
            Stmt::Access {
                class, attribute, ..
            } => out.push_str(&format!("{pad}access {}.{};\n", class.name, attribute)),
            Stmt::Assign { name, .. } => out.push_str(&format!("{pad}assign {name};\n")),
            Stmt::If {
                condition,
                then_block,
                else_block,
                ..
            } => {
                out.push_str(&format!("{pad}if ({condition}) {{\n"));
                render_stmts(&then_block.stmts, out, depth + 1);
                match else_block {
                    Some(else_block) => {
                        out.push_str(&format!("{pad}}} else {{\n"));
                        render_stmts(&else_block.stmts, out, depth + 1);
                        out.push_str(&format!("{pad}}}\n"));
                    }
                    None => out.push_str(&format!("{pad}}}\n")),
                }
            }
            Stmt::While {
                condition, body, ..
            } => {
                out.push_str(&format!("{pad}while ({condition}) {{\n"));
                render_stmts(&body.stmts, out, depth + 1);
                out.push_str(&format!("{pad}}}\n"));
            }
            Stmt::Return { .. } => out.push_str(&format!("{pad}return;\n")),
        }
    }
}
