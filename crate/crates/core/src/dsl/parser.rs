use std::collections::{BTreeSet, HashMap};
use std::sync::Arc;

use super::diagnostic::*;
use super::lexer::{lex, Tok, Token};
use crate::kernel::{
    Action, DefectKind, Domain, Expr, ModelError, Process, Program, Site, Stmt, VarKind, VarRef, VariableDecl,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Bound {
    Int(i64),
    /// `N` minus the given offset.
    FromEnd(i64),
}

impl Bound {
    fn eval(self, n: usize) -> i64 {
        match self {
            Bound::Int(i) => i,
            Bound::FromEnd(k) => n as i64 - k,
        }
    }
}

#[derive(Debug)]
struct SrcVar {
    kind: VarKind,
    name: String,
    ty: String,
    span: Span,
}

#[derive(Debug)]
struct SrcAction {
    name: String,
    guard: Expr,
    command: Vec<Stmt>,
    span: Span,
}

#[derive(Debug)]
struct Group {
    label: String,
    lo: Bound,
    hi: Bound,
    vars: Vec<SrcVar>,
    actions: Vec<SrcAction>,
    span: Span,
}

#[derive(Debug)]
struct SrcDomain {
    name: String,
    values: Vec<String>,
    span: Span,
}

#[derive(Debug)]
struct Source {
    name: String,
    n_param: Option<(Option<usize>, Span)>,
    ids: Option<(Vec<i64>, Span)>,
    domains: Vec<SrcDomain>,
    groups: Vec<Group>,
    span: Span,
}

const RESERVED: &[&str] = &[
    "protocol", "domain", "process", "in", "var", "input", "output", "channel", "bool", "self", "left", "right", "if",
    "then", "else", "true", "false", "N", "ids",
];

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    /// Non-fatal diagnostics collected while parsing.
    diags: Vec<Diagnostic>,
}

type PResult<T> = Result<T, Diagnostic>;

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn peek_at(&self, k: usize) -> &Tok {
        &self.toks[(self.pos + k).min(self.toks.len() - 1)].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn prev_span(&self) -> Span {
        self.toks[self.pos.saturating_sub(1)].span
    }

    fn bump(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if self.pos < self.toks.len() - 1 {
            self.pos += 1;
        }
        t
    }

    fn unexpected(&self, what: &str) -> Diagnostic {
        Diagnostic::error(
            SYNTAX,
            self.span(),
            format!("expected {what}, found {}", self.peek().describe()),
        )
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{}`", tok.symbol())))
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn expect_kw(&mut self, kw: &str) -> PResult<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{kw}`")))
        }
    }

    fn ident(&mut self, what: &str) -> PResult<(String, Span)> {
        match self.peek().clone() {
            Tok::Ident(s) if !RESERVED.contains(&s.as_str()) => Ok((s, self.bump().span)),
            _ => Err(self.unexpected(what)),
        }
    }

    fn int(&mut self) -> PResult<(i64, Span)> {
        match *self.peek() {
            Tok::Int(i) => Ok((i, self.bump().span)),
            _ => Err(self.unexpected("an integer")),
        }
    }

    fn protocol(&mut self) -> PResult<Source> {
        let start = self.expect_kw("protocol")?;
        let (name, _) = self.ident("a protocol name")?;
        self.expect(Tok::LParen)?;
        let mut n_param = None;
        let mut ids = None;
        while *self.peek() != Tok::RParen {
            if self.is_kw("N") {
                let sp = self.bump().span;
                let default = if *self.peek() == Tok::Eq {
                    self.bump();
                    let (v, _) = self.int()?;
                    Some(v.max(0) as usize)
                } else {
                    None
                };
                n_param = Some((default, sp));
            } else if self.is_kw("ids") {
                let sp = self.bump().span;
                self.expect(Tok::Eq)?;
                self.expect(Tok::LBracket)?;
                let mut list = Vec::new();
                while *self.peek() != Tok::RBracket {
                    let neg = if *self.peek() == Tok::Minus {
                        self.bump();
                        true
                    } else {
                        false
                    };
                    let (v, _) = self.int()?;
                    list.push(if neg { -v } else { v });
                    if *self.peek() != Tok::Comma {
                        break;
                    }
                    self.bump();
                }
                let end = self.expect(Tok::RBracket)?;
                ids = Some((list, sp.to(end)));
            } else {
                return Err(self.unexpected("`N` or `ids` parameter"));
            }
            if *self.peek() != Tok::Comma {
                break;
            }
            self.bump();
        }
        self.expect(Tok::RParen)?;
        self.expect(Tok::LBrace)?;
        let mut domains = Vec::new();
        while self.is_kw("domain") {
            domains.push(self.domain()?);
        }
        let mut groups = Vec::new();
        while self.is_kw("process") {
            groups.push(self.group()?);
        }
        if groups.is_empty() {
            return Err(self.unexpected("`domain` or `process`"));
        }
        let end = self.expect(Tok::RBrace)?;
        if *self.peek() != Tok::Eof {
            return Err(self.unexpected("end of input"));
        }
        Ok(Source {
            name,
            n_param,
            ids,
            domains,
            groups,
            span: start.to(end),
        })
    }

    fn domain(&mut self) -> PResult<SrcDomain> {
        let start = self.expect_kw("domain")?;
        let (name, _) = self.ident("a domain name")?;
        self.expect(Tok::Eq)?;
        self.expect(Tok::LBrace)?;
        let mut values = vec![self.ident("a domain value")?.0];
        while *self.peek() == Tok::Comma {
            self.bump();
            values.push(self.ident("a domain value")?.0);
        }
        let end = self.expect(Tok::RBrace)?;
        Ok(SrcDomain {
            name,
            values,
            span: start.to(end),
        })
    }

    fn bound(&mut self) -> PResult<Bound> {
        if self.is_kw("N") {
            self.bump();
            if *self.peek() == Tok::Minus {
                self.bump();
                let (k, _) = self.int()?;
                return Ok(Bound::FromEnd(k));
            }
            return Ok(Bound::FromEnd(0));
        }
        Ok(Bound::Int(self.int()?.0))
    }

    fn group(&mut self) -> PResult<Group> {
        let start = self.expect_kw("process")?;
        let (label, _) = self.ident("a process group name")?;
        self.expect_kw("in")?;
        let lo = self.bound()?;
        self.expect(Tok::DotDot)?;
        let hi = self.bound()?;
        let head_end = self.prev_span();
        self.expect(Tok::LBrace)?;
        let mut vars = Vec::new();
        loop {
            let kind = match self.peek() {
                Tok::Ident(s) if s == "var" => VarKind::Internal,
                Tok::Ident(s) if s == "input" => VarKind::Input,
                Tok::Ident(s) if s == "output" => VarKind::Output,
                Tok::Ident(s) if s == "channel" => VarKind::Channel,
                _ => break,
            };
            let vstart = self.bump().span;
            let (name, _) = self.ident("a variable name")?;
            self.expect(Tok::Colon)?;
            let ty = if self.is_kw("bool") {
                self.bump();
                "bool".to_string()
            } else {
                self.ident("`bool` or a domain name")?.0
            };
            let end = self.expect(Tok::Semi)?;
            vars.push(SrcVar {
                kind,
                name,
                ty,
                span: vstart.to(end),
            });
        }
        let mut actions = Vec::new();
        while *self.peek() != Tok::RBrace {
            actions.push(self.action()?);
        }
        self.expect(Tok::RBrace)?;
        Ok(Group {
            label,
            lo,
            hi,
            vars,
            actions,
            span: start.to(head_end),
        })
    }

    fn action(&mut self) -> PResult<SrcAction> {
        let (name, start) = self.ident("an action name or `}`")?;
        self.expect(Tok::Colon)?;
        let guard = self.expr()?;
        self.expect(Tok::Arrow)?;
        let command = self.command()?;
        let end = self.expect(Tok::Semi)?;
        Ok(SrcAction {
            name,
            guard,
            command,
            span: start.to(end),
        })
    }

    fn starts_stmt(&self) -> bool {
        matches!(self.peek(), Tok::Ident(s) if matches!(s.as_str(), "self" | "left" | "right" | "if"))
    }

    /// `stmt (";" stmt)*`; a `;` not followed by a statement is left for the caller.
    fn command(&mut self) -> PResult<Vec<Stmt>> {
        let mut out = vec![self.stmt()?];
        while *self.peek() == Tok::Semi
            && matches!(self.peek_at(1), Tok::Ident(s) if matches!(s.as_str(), "self" | "left" | "right" | "if"))
        {
            self.bump();
            out.push(self.stmt()?);
        }
        Ok(out)
    }

    fn block(&mut self) -> PResult<Vec<Stmt>> {
        self.expect(Tok::LBrace)?;
        let mut out = Vec::new();
        while self.starts_stmt() {
            out.push(self.stmt()?);
            if *self.peek() == Tok::Semi {
                self.bump();
            } else {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(out)
    }

    fn stmt(&mut self) -> PResult<Stmt> {
        if self.is_kw("if") {
            self.bump();
            let cond = self.expr()?;
            self.expect_kw("then")?;
            let then_branch = self.block()?;
            let else_branch = if self.is_kw("else") {
                self.bump();
                self.block()?
            } else {
                Vec::new()
            };
            return Ok(Stmt::If {
                cond,
                then_branch,
                else_branch,
            });
        }
        let target = match self.reference()? {
            Some(r) => r,
            None => return Err(self.unexpected("an assignment target such as `self.x`")),
        };
        self.expect(Tok::Assign)?;
        let value = self.expr()?;
        Ok(Stmt::Assign { target, value })
    }

    fn expr(&mut self) -> PResult<Expr> {
        let mut e = self.and()?;
        while *self.peek() == Tok::OrOr {
            self.bump();
            e = e.or(self.and()?);
        }
        Ok(e)
    }

    fn and(&mut self) -> PResult<Expr> {
        let mut e = self.unary()?;
        while *self.peek() == Tok::AndAnd {
            self.bump();
            e = e.and(self.unary()?);
        }
        Ok(e)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if *self.peek() == Tok::Bang {
            self.bump();
            return Ok(self.unary()?.negate());
        }
        let a = self.atom()?;
        match self.peek() {
            Tok::Eq => {
                self.bump();
                Ok(a.is(self.atom()?))
            }
            Tok::Ne => {
                self.bump();
                Ok(a.is_not(self.atom()?))
            }
            _ => Ok(a),
        }
    }

    fn atom(&mut self) -> PResult<Expr> {
        match self.peek().clone() {
            Tok::LParen => {
                self.bump();
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(s) if s == "true" || s == "false" => {
                self.bump();
                Ok(Expr::Const(s == "true"))
            }
            Tok::Ident(_) => {
                if let Some(r) = self.reference()? {
                    return Ok(Expr::Var(r));
                }
                let (l, _) = self.ident("a value")?;
                Ok(Expr::Literal(l))
            }
            _ => Err(self.unexpected("an expression")),
        }
    }

    /// Parses `site.name`. Paths longer than one hop, or through anything
    /// other than `self`/`left`/`right`, are reported as non-neighbor references.
    fn reference(&mut self) -> PResult<Option<VarRef>> {
        let Tok::Ident(head) = self.peek().clone() else {
            return Ok(None);
        };
        if *self.peek_at(1) != Tok::Dot {
            return Ok(None);
        }
        let start = self.bump().span;
        self.bump();
        let (name, mut end) = match self.peek().clone() {
            Tok::Ident(s) => (s, self.bump().span),
            _ => return Err(self.unexpected("a variable name")),
        };
        let mut hops = 1;
        let mut path = format!("{head}.{name}");
        while *self.peek() == Tok::Dot {
            self.bump();
            match self.peek().clone() {
                Tok::Ident(s) => {
                    path.push('.');
                    path.push_str(&s);
                    end = self.bump().span;
                    hops += 1;
                }
                _ => return Err(self.unexpected("a variable name")),
            }
        }
        let site = match head.as_str() {
            "self" => Some(Site::Own),
            "left" => Some(Site::Left),
            "right" => Some(Site::Right),
            _ => None,
        };
        match site {
            Some(site) if hops == 1 => Ok(Some(VarRef { site, name })),
            _ => {
                self.diags.push(Diagnostic::error(
                    NON_NEIGHBOR_REF,
                    start.to(end),
                    format!("`{path}` does not name a variable of this process or an adjacent one"),
                ));
                // keep parsing with a placeholder so later defects are still reported
                Ok(Some(VarRef {
                    site: Site::Own,
                    name: path.split('.').next_back().unwrap_or_default().to_string(),
                }))
            }
        }
    }
}

/// Parameters resolved at parse time.
#[derive(Debug, Clone, Default)]
pub struct ParseOptions {
    pub n: Option<usize>,
    pub ids: Option<Vec<i64>>,
}

/// A successfully parsed program together with any warnings.
#[derive(Debug, Clone)]
pub struct Parsed {
    pub program: Program,
    pub warnings: Vec<Diagnostic>,
}

/// Parses and validates a protocol source into a kernel [`Program`].
pub fn parse_protocol(src: &str, opts: &ParseOptions) -> Result<Parsed, Vec<Diagnostic>> {
    let toks = lex(src).map_err(|d| vec![d])?;
    let mut p = Parser {
        toks,
        pos: 0,
        diags: Vec::new(),
    };
    let source = match p.protocol() {
        Ok(s) => s,
        Err(d) => {
            let mut all = p.diags;
            all.push(d);
            return Err(all);
        }
    };
    let mut diags = p.diags;
    let program = resolve(&source, opts, &mut diags);
    if diags.iter().any(Diagnostic::is_error) {
        diags.sort_by_key(|d| (d.span.line, d.span.col));
        return Err(diags);
    }
    Ok(Parsed {
        program: program.expect("no error diagnostics implies a program"),
        warnings: diags,
    })
}

fn resolve(src: &Source, opts: &ParseOptions, diags: &mut Vec<Diagnostic>) -> Option<Program> {
    let ids_src = opts.ids.clone().or_else(|| src.ids.as_ref().map(|(l, _)| l.clone()));
    let ids_span = src.ids.as_ref().map(|(_, s)| *s).unwrap_or(src.span);

    let n = match (&src.n_param, opts.n) {
        (Some(_), Some(n)) => n,
        (Some((Some(d), _)), None) => ids_src.as_ref().map(Vec::len).unwrap_or(*d),
        (Some((None, sp)), None) => match &ids_src {
            Some(ids) => ids.len(),
            None => {
                diags.push(Diagnostic::error(
                    BAD_PARAM,
                    *sp,
                    "protocol is parameterized by N but no value was supplied",
                ));
                return None;
            }
        },
        (None, given) => {
            let fixed = src
                .groups
                .iter()
                .flat_map(|g| [g.lo, g.hi])
                .filter_map(|b| match b {
                    Bound::Int(i) => Some(i),
                    Bound::FromEnd(_) => None,
                })
                .max()
                .unwrap_or(0)
                .max(0) as usize;
            if src
                .groups
                .iter()
                .any(|g| matches!(g.lo, Bound::FromEnd(_)) || matches!(g.hi, Bound::FromEnd(_)))
            {
                diags.push(Diagnostic::error(
                    BAD_PARAM,
                    src.span,
                    "ranges mention N but the protocol declares no N parameter",
                ));
                return None;
            }
            if let Some(g) = given.filter(|&g| g != fixed) {
                diags.push(Diagnostic::error(
                    BAD_PARAM,
                    src.span,
                    format!("protocol has a fixed chain of {fixed} processes; N = {g} was requested"),
                ));
                return None;
            }
            fixed
        }
    };
    if n == 0 {
        diags.push(Diagnostic::error(BAD_PARAM, src.span, "N must be at least 1"));
        return None;
    }
    let ids = match ids_src {
        Some(ids) if ids.len() != n => {
            diags.push(Diagnostic::error(
                BAD_PARAM,
                ids_span,
                format!("{} identifiers given for {n} processes", ids.len()),
            ));
            return None;
        }
        Some(ids) => {
            let unique: BTreeSet<_> = ids.iter().collect();
            if unique.len() != ids.len() {
                diags.push(Diagnostic::error(
                    BAD_PARAM,
                    ids_span,
                    "process identifiers must be unique",
                ));
                return None;
            }
            ids
        }
        None => (1..=n as i64).collect(),
    };

    let mut domains: Vec<Arc<Domain>> = Vec::new();
    let mut by_name: HashMap<String, Arc<Domain>> = HashMap::new();
    by_name.insert("bool".into(), Domain::shared_bool());
    for d in &src.domains {
        if by_name.contains_key(&d.name) {
            diags.push(Diagnostic::error(
                DUPLICATE_DOMAIN,
                d.span,
                format!("domain `{}` declared twice", d.name),
            ));
            continue;
        }
        match Domain::new(d.name.clone(), d.values.iter().cloned()) {
            Ok(dom) => {
                let dom = Arc::new(dom);
                by_name.insert(d.name.clone(), dom.clone());
                domains.push(dom);
            }
            Err(e) => diags.push(Diagnostic::error(DUPLICATE_DOMAIN, d.span, e.to_string())),
        }
    }

    let mut owner: Vec<Option<usize>> = vec![None; n + 1];
    for (gi, g) in src.groups.iter().enumerate() {
        let (lo, hi) = (g.lo.eval(n), g.hi.eval(n));
        if lo > hi {
            diags.push(Diagnostic::warning(
                EMPTY_GROUP,
                g.span,
                format!("group `{}` covers no process when N = {n}", g.label),
            ));
            continue;
        }
        if lo < 1 || hi > n as i64 {
            diags.push(Diagnostic::error(
                RANGE_ERROR,
                g.span,
                format!("range {lo}..{hi} of group `{}` leaves the chain 1..{n}", g.label),
            ));
            continue;
        }
        for (pos, slot) in owner.iter_mut().enumerate().take(hi as usize + 1).skip(lo as usize) {
            if let Some(other) = *slot {
                diags.push(Diagnostic::error(
                    RANGE_ERROR,
                    g.span,
                    format!(
                        "position {pos} is claimed by both `{}` and `{}`",
                        src.groups[other].label, g.label
                    ),
                ));
            } else {
                *slot = Some(gi);
            }
        }
    }
    for (pos, o) in owner.iter().enumerate().skip(1) {
        if o.is_none() {
            diags.push(Diagnostic::error(
                RANGE_ERROR,
                src.span,
                format!("no process group covers position {pos}"),
            ));
        }
    }

    let mut bad_types = false;
    let mut group_vars: Vec<Vec<VariableDecl>> = Vec::new();
    for g in &src.groups {
        let mut vars = Vec::new();
        for v in &g.vars {
            match by_name.get(&v.ty) {
                Some(d) => vars.push(VariableDecl::new(&v.name, d.clone(), v.kind)),
                None => {
                    bad_types = true;
                    diags.push(Diagnostic::error(
                        UNKNOWN_DOMAIN,
                        v.span,
                        format!("unknown domain `{}`", v.ty),
                    ));
                }
            }
        }
        group_vars.push(vars);
    }
    if diags.iter().any(Diagnostic::is_error) || bad_types {
        return None;
    }

    let processes: Vec<Process> = (1..=n)
        .map(|pos| {
            let gi = owner[pos].expect("coverage checked");
            let g = &src.groups[gi];
            Process {
                index: pos,
                id: ids[pos - 1],
                role: g.label.clone(),
                vars: group_vars[gi].clone(),
                actions: g
                    .actions
                    .iter()
                    .map(|a| Action {
                        name: a.name.clone(),
                        guard: a.guard.clone(),
                        command: a.command.clone(),
                    })
                    .collect(),
            }
        })
        .collect();

    match Program::build(&src.name, processes, domains) {
        Ok(p) => Some(p),
        Err(errs) => {
            let mut seen = BTreeSet::new();
            for e in errs {
                let span = locate(src, &owner, &e);
                if seen.insert((e.kind, span.line, span.col)) {
                    diags.push(Diagnostic::error(e.kind.code(), span, e.message.clone()));
                }
            }
            None
        }
    }
}

fn locate(src: &Source, owner: &[Option<usize>], e: &ModelError) -> Span {
    let Some(g) = owner.get(e.position).copied().flatten().map(|gi| &src.groups[gi]) else {
        return src.span;
    };
    if let Some(a) = e
        .action
        .as_ref()
        .and_then(|name| g.actions.iter().find(|a| &a.name == name))
    {
        return a.span;
    }
    if e.kind == DefectKind::DuplicateDecl {
        if let Some(v) = g.vars.iter().find(|v| e.message.contains(&format!("`{}`", v.name))) {
            return v.span;
        }
    }
    g.span
}

#[cfg(test)]
mod tests {
    use super::*;

    const CM: &str = "protocol cm(N) {
  process p in 1..N {
    var access : bool;
    flip: true -> self.access := !self.access;
  }
}";

    fn codes(src: &str, n: Option<usize>) -> Vec<String> {
        parse_protocol(src, &ParseOptions { n, ids: None })
            .map(|_| Vec::new())
            .unwrap_or_else(|d| d.into_iter().filter(|d| d.is_error()).map(|d| d.code).collect())
    }

    #[test]
    fn parses_cm_source() {
        let p = parse_protocol(CM, &ParseOptions { n: Some(4), ids: None })
            .unwrap()
            .program;
        assert_eq!(p.n(), 4);
        assert!(p.processes().iter().all(|pr| pr.actions.len() == 1));
        assert_eq!(p.ids(), vec![1, 2, 3, 4]);
    }

    #[test]
    fn ids_come_from_options_or_source() {
        let p = parse_protocol(
            CM,
            &ParseOptions {
                n: None,
                ids: Some(vec![2, 1, 3, 4]),
            },
        )
        .unwrap()
        .program;
        assert_eq!(p.ids(), vec![2, 1, 3, 4]);
        let src = CM.replace("cm(N)", "cm(N, ids = [5, 7])");
        let p = parse_protocol(&src, &ParseOptions::default()).unwrap().program;
        assert_eq!(p.n(), 2);
        assert_eq!(
            codes(&CM.replace("cm(N)", "cm(N, ids = [5, 5])"), None),
            vec![BAD_PARAM]
        );
    }

    #[test]
    fn two_hop_reference_is_rejected() {
        let src = CM.replace("flip: true", "flip: left.left.access");
        assert_eq!(codes(&src, Some(4)), vec![NON_NEIGHBOR_REF]);
        let src = CM.replace("flip: true", "flip: p3.access");
        assert_eq!(codes(&src, Some(4)), vec![NON_NEIGHBOR_REF]);
    }

    // one fixture per rejection code
    #[test]
    fn each_defect_class_has_a_fixture() {
        let cases: Vec<(String, &str)> = vec![
            (CM.replace("flip: true ->", "flip: true"), SYNTAX),
            (
                CM.replace("self.access := !self.access", "self.acces := true"),
                "UNDECLARED_VAR",
            ),
            (CM.replace("var access", "input access"), "ASSIGN_TO_INPUT"),
            (
                CM.replace("flip: true -> self.access := !", "flip: true -> left.access := !")
                    .replace("1..N", "2..N")
                    .replace(
                        "protocol cm(N) {",
                        "protocol cm(N) {\n  process h in 1..1 { var access : bool; }",
                    ),
                "ASSIGN_TO_NEIGHBOR",
            ),
            (CM.replace("var access : bool", "var access : color"), UNKNOWN_DOMAIN),
            (CM.replace("1..N", "2..N"), RANGE_ERROR),
            (CM.replace("flip: true", "flip: left.access"), "MISSING_NEIGHBOR"),
            (
                CM.replace("process p", "domain c = {red, blue}\n  process p")
                    .replace("var access : bool;", "var access : bool;\n    var c0 : c;")
                    .replace("flip: true", "flip: self.c0 = green"),
                "VALUE_OUT_OF_DOMAIN",
            ),
            (
                CM.replace("process p", "domain c = {red, blue}\n  process p")
                    .replace("var access : bool;", "var access : bool;\n    var c0 : c;")
                    .replace("flip: true", "flip: self.c0 = self.access"),
                "TYPE_MISMATCH",
            ),
            (
                CM.replace("var access : bool;", "var access : bool; var access : bool;"),
                "DUPLICATE_DECL",
            ),
            (
                CM.replace(
                    "flip: true -> self.access := !self.access;",
                    "f: true -> self.access := true; f: true -> self.access := false;",
                ),
                "DUPLICATE_ACTION",
            ),
            (
                CM.replace("process p", "domain c = {a, a}\n  process p"),
                DUPLICATE_DOMAIN,
            ),
        ];
        for (src, code) in cases {
            assert_eq!(
                codes(&src, Some(4)),
                vec![code.to_string()],
                "fixture for {code}:\n{src}"
            );
        }
        let d = parse_protocol(CM, &ParseOptions::default()).unwrap_err();
        assert_eq!(d[0].code, BAD_PARAM);
    }

    #[test]
    fn diagnostics_carry_locations() {
        let src = CM.replace("self.access := !self.access", "self.nope := true");
        let d = parse_protocol(&src, &ParseOptions { n: Some(3), ids: None }).unwrap_err();
        assert_eq!(d.len(), 1, "one diagnostic per group, not per process: {d:?}");
        assert_eq!(d[0].span.line, 4);
        assert_eq!(d[0].span.col, 5);
    }

    #[test]
    fn empty_middle_group_is_a_warning() {
        let src = "protocol t(N) {
  process a in 1..1 { output x : bool; }
  process m in 2..N-1 { output x : bool; }
  process z in N..N { output x : bool; }
}";
        let parsed = parse_protocol(src, &ParseOptions { n: Some(2), ids: None }).unwrap();
        assert_eq!(parsed.warnings.len(), 1);
        assert_eq!(parsed.warnings[0].code, EMPTY_GROUP);
        assert_eq!(parsed.program.n(), 2);
    }

    #[test]
    fn fixed_size_protocols_reject_other_n() {
        let src = "protocol t() {
  process a in 1..1 { output x : bool; }
  process b in 2..2 { output y : bool; }
}";
        assert_eq!(parse_protocol(src, &ParseOptions::default()).unwrap().program.n(), 2);
        assert_eq!(codes(src, Some(3)), vec![BAD_PARAM]);
    }

    #[test]
    fn nested_commands_and_precedence() {
        let src = "protocol t(N = 2) {
  process p in 1..N {
    output x : bool;
    output y : bool;
    a: !self.x = self.y && true || false -> if self.x then { self.y := false; self.x := false } else { self.x := true };
  }
}";
        let p = parse_protocol(src, &ParseOptions::default()).unwrap().program;
        let act = &p.processes()[0].actions[0];
        let expected = crate::kernel::own("x")
            .is(crate::kernel::own("y"))
            .negate()
            .and(Expr::Const(true))
            .or(Expr::Const(false));
        assert_eq!(act.guard, expected);
        assert_eq!(act.command.len(), 1);
    }
}
